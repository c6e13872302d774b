use clap::{ArgAction, Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Errors surfaced by the command-line layer, tagged with their exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(#[from] jcsim_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "jcsim",
    version,
    about = "Truncated Fock-space Jaynes-Cummings simulator: field states, inversion and negativity dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Construct a field state and write its photon-number distribution as CSV
    State(RunArgs),
    /// Evolve the excited atom against the field and write the inversion/negativity series as CSV
    Evolve(RunArgs),
    /// Run the self-verification suite and write a report
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Field family: coherent | thermal | dts | mtcs | pacs | photon_added_dts | photon_added_mtcs
    #[arg(long, value_name = "KIND")]
    pub state: Option<String>,
    /// Coherent intensity |alpha|^2
    #[arg(long = "alpha-sq", value_name = "X")]
    pub alpha_sq: Option<f64>,
    /// Phase of alpha in radians
    #[arg(long, value_name = "RAD")]
    pub theta: Option<f64>,
    /// Thermal mean photon number
    #[arg(long, value_name = "NBAR")]
    pub nbar: Option<f64>,
    /// Explicit coherent weight of the mixed thermal-coherent state
    #[arg(long, value_name = "Q", conflicts_with = "equal_overlap")]
    pub q: Option<f64>,
    /// Calibrate q so the mixed state's coherent overlap matches the displaced thermal state's
    #[arg(long, action = ArgAction::SetTrue)]
    pub equal_overlap: bool,
    /// Fock-space truncation dimension
    #[arg(long, value_name = "N")]
    pub cutoff: Option<usize>,
    /// Final dimensionless time lambda*t
    #[arg(long = "t-max", value_name = "T")]
    pub t_max: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long, value_name = "K")]
    pub steps: Option<usize>,
    /// Evolution path: analytic | numeric
    #[arg(long, value_name = "KIND")]
    pub propagator: Option<String>,
    /// Output CSV path; the metadata sidecar and plot script are written next to it
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Optional key=value config file; explicit flags override its entries
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Working truncation dimension for the suite (min 60)
    #[arg(long, default_value_t = 150)]
    pub cutoff: usize,
    /// Report output path
    #[arg(long, default_value = "verify_report.txt")]
    pub out: PathBuf,
    /// Self-test flag: perturb the Rabi-frequency law so the frequency check must fail
    #[arg(long, action = ArgAction::SetTrue)]
    pub perturb: bool,
}

/// What a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Photon-number distribution of the constructed state.
    Distribution,
    /// Inversion and negativity time series.
    Series,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Distribution => "distribution",
            Scenario::Series => "series",
        }
    }
}

/// Field family selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Coherent,
    Thermal,
    Dts,
    Mtcs,
    Pacs,
    PhotonAddedDts,
    PhotonAddedMtcs,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Thermal => "thermal",
            StateKind::Dts => "dts",
            StateKind::Mtcs => "mtcs",
            StateKind::Pacs => "pacs",
            StateKind::PhotonAddedDts => "photon_added_dts",
            StateKind::PhotonAddedMtcs => "photon_added_mtcs",
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "coherent" => Ok(StateKind::Coherent),
            "thermal" => Ok(StateKind::Thermal),
            "dts" => Ok(StateKind::Dts),
            "mtcs" => Ok(StateKind::Mtcs),
            "pacs" => Ok(StateKind::Pacs),
            "photon_added_dts" => Ok(StateKind::PhotonAddedDts),
            "photon_added_mtcs" => Ok(StateKind::PhotonAddedMtcs),
            other => Err(CliError::Usage(format!(
                "--state: unknown kind '{other}' (expected coherent|thermal|dts|mtcs|pacs|photon_added_dts|photon_added_mtcs)"
            ))),
        }
    }

    /// Kinds whose mixing weight must be supplied or calibrated.
    pub fn needs_q(self) -> bool {
        matches!(self, StateKind::Mtcs | StateKind::PhotonAddedMtcs)
    }
}

/// How the mixing weight q is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QMode {
    Explicit(f64),
    EqualOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorChoice {
    Analytic,
    Numeric,
}

impl PropagatorChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            PropagatorChoice::Analytic => "analytic",
            PropagatorChoice::Numeric => "numeric",
        }
    }

    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "analytic" => Ok(PropagatorChoice::Analytic),
            "numeric" => Ok(PropagatorChoice::Numeric),
            other => Err(CliError::Usage(format!(
                "--propagator: unknown kind '{other}' (expected analytic|numeric)"
            ))),
        }
    }

    pub fn to_core(self) -> jcsim_core::PropagatorKind {
        match self {
            PropagatorChoice::Analytic => jcsim_core::PropagatorKind::Analytic,
            PropagatorChoice::Numeric => jcsim_core::PropagatorKind::Numeric,
        }
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub state_kind: StateKind,
    pub alpha_sq: f64,
    pub theta: f64,
    pub nbar: f64,
    pub q_mode: QMode,
    pub cutoff: usize,
    pub t_max: f64,
    pub steps: usize,
    pub propagator: PropagatorChoice,
    pub output_path: PathBuf,
}

impl ExperimentConfig {
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.alpha_sq.sqrt(), self.theta)
    }

    /// Mixing weight actually used when constructing the state.
    pub fn resolved_q(&self) -> f64 {
        match self.q_mode {
            QMode::Explicit(q) => q,
            QMode::EqualOverlap => jcsim_core::states::equal_overlap_q(self.alpha(), self.nbar),
        }
    }
}

/// Keys a config file or metadata sidecar may contain. The last three are
/// informational sidecar outputs; they are accepted and ignored on input so a
/// sidecar can be replayed directly as a config file.
const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "state",
    "alpha_sq",
    "theta",
    "nbar",
    "q",
    "equal_overlap",
    "cutoff",
    "t_max",
    "steps",
    "propagator",
    "out",
    "resolved_q",
    "tail_mass",
    "library_version",
];

const INFORMATIONAL_KEYS: &[&str] = &["scenario", "resolved_q", "tail_mass", "library_version"];

/// Parses a flat key=value config file, rejecting unknown or duplicate keys.
pub fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Usage(format!("--config: cannot read {}: {e}", path.display()))
    })?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown key '{key}'",
                path.display(),
                lineno + 1
            )));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(CliError::Usage(format!(
                "{}:{}: duplicate key '{key}'",
                path.display(),
                lineno + 1
            )));
        }
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| CliError::Usage(format!("{key}: cannot parse '{value}': {e}")))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(CliError::Usage(format!("{key}: expected true or false, got '{other}'"))),
    }
}

/// Merges command-line flags over an optional config file and validates the
/// result. Flags always win; the scenario comes from the subcommand.
pub fn resolve(scenario: Scenario, args: &RunArgs) -> CliResult<ExperimentConfig> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    // informational keys are validated for form, then ignored
    for &key in INFORMATIONAL_KEYS {
        if key == "scenario" {
            if let Some(v) = file.get(key) {
                if !["distribution", "inversion", "negativity", "series", "verify"]
                    .contains(&v.as_str())
                {
                    return Err(CliError::Usage(format!("scenario: unknown value '{v}'")));
                }
            }
        }
    }

    let state_str = match (&args.state, file.get("state")) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(CliError::Usage("--state is required".into())),
    };
    let state_kind = StateKind::parse(&state_str)?;

    let pick_f64 = |flag: Option<f64>, key: &str, default: f64| -> CliResult<f64> {
        match (flag, file.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => parse_value::<f64>(key, s),
            (None, None) => Ok(default),
        }
    };
    let pick_usize = |flag: Option<usize>, key: &str, default: usize| -> CliResult<usize> {
        match (flag, file.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => parse_value::<usize>(key, s),
            (None, None) => Ok(default),
        }
    };

    let alpha_sq = pick_f64(args.alpha_sq, "alpha_sq", 0.0)?;
    let theta = pick_f64(args.theta, "theta", 0.0)?;
    let nbar = pick_f64(args.nbar, "nbar", 0.0)?;
    let cutoff = pick_usize(args.cutoff, "cutoff", jcsim_core::DEFAULT_CUTOFF)?;
    let t_max = pick_f64(args.t_max, "t_max", jcsim_core::DEFAULT_T_MAX)?;
    let steps = pick_usize(args.steps, "steps", jcsim_core::DEFAULT_STEPS)?;

    let propagator = match (&args.propagator, file.get("propagator")) {
        (Some(s), _) => PropagatorChoice::parse(s)?,
        (None, Some(s)) => PropagatorChoice::parse(s)?,
        (None, None) => PropagatorChoice::Analytic,
    };

    let output_path = match (&args.out, file.get("out")) {
        (Some(p), _) => p.clone(),
        (None, Some(s)) => PathBuf::from(s),
        (None, None) => return Err(CliError::Usage("--out is required".into())),
    };

    // q selection: an explicit flag beats the file outright
    let file_q = file.get("q").map(|s| parse_value::<f64>("q", s)).transpose()?;
    let file_eq = file
        .get("equal_overlap")
        .map(|s| parse_bool("equal_overlap", s))
        .transpose()?
        .unwrap_or(false);
    let q_mode = if let Some(q) = args.q {
        Some(QMode::Explicit(q))
    } else if args.equal_overlap {
        Some(QMode::EqualOverlap)
    } else if let Some(q) = file_q {
        if file_eq {
            return Err(CliError::Usage(
                "config file sets both q and equal_overlap=true; pick one".into(),
            ));
        }
        Some(QMode::Explicit(q))
    } else if file_eq {
        Some(QMode::EqualOverlap)
    } else {
        None
    };
    let q_mode = match q_mode {
        Some(m) => m,
        None if state_kind.needs_q() => {
            return Err(CliError::Usage(format!(
                "--state {} requires --q or --equal-overlap",
                state_kind.as_str()
            )))
        }
        // irrelevant for the pure and displaced families; a pure coherent
        // component is the consistent placeholder
        None => QMode::Explicit(1.0),
    };

    let config = ExperimentConfig {
        scenario,
        state_kind,
        alpha_sq,
        theta,
        nbar,
        q_mode,
        cutoff,
        t_max,
        steps,
        propagator,
        output_path,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &ExperimentConfig) -> CliResult<()> {
    if !config.alpha_sq.is_finite() || config.alpha_sq < 0.0 {
        return Err(CliError::Usage(format!(
            "--alpha-sq: must be finite and nonnegative, got {}",
            config.alpha_sq
        )));
    }
    if !config.theta.is_finite() {
        return Err(CliError::Usage(format!("--theta: must be finite, got {}", config.theta)));
    }
    if !config.nbar.is_finite() || config.nbar < 0.0 {
        return Err(CliError::Usage(format!(
            "--nbar: must be finite and nonnegative, got {}",
            config.nbar
        )));
    }
    if let QMode::Explicit(q) = config.q_mode {
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(CliError::Usage(format!("--q: must lie in [0, 1], got {q}")));
        }
    }
    if config.cutoff < 2 {
        return Err(CliError::Usage(format!(
            "--cutoff: must be at least 2, got {}",
            config.cutoff
        )));
    }
    if !config.t_max.is_finite() || config.t_max <= 0.0 {
        return Err(CliError::Usage(format!(
            "--t-max: must be finite and positive, got {}",
            config.t_max
        )));
    }
    if config.steps < 1 {
        return Err(CliError::Usage("--steps: must be at least 1".into()));
    }
    Ok(())
}
