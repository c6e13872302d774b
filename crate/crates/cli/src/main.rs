use clap::Parser;
use jcsim_cli::config::{Cli, CliError, Command, Scenario, VerifyArgs};
use jcsim_cli::runner::{run_scenario, write_atomic};
use jcsim_cli::verify::run_suite;
use std::process::ExitCode;

fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    if args.cutoff < 60 {
        return Err(CliError::Usage(format!(
            "verify --cutoff: must be at least 60, got {}",
            args.cutoff
        )));
    }
    let report = run_suite(args.cutoff, args.perturb)?;
    let rendered = report.render();
    print!("{rendered}");
    write_atomic(&args.out, rendered.as_bytes())?;
    println!("report: {}", args.out.display());
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::State(args) => {
            let config = jcsim_cli::config::resolve(Scenario::Distribution, &args)?;
            let out = run_scenario(&config)?;
            println!("csv:  {}", out.csv.display());
            println!("meta: {}", out.meta.display());
            println!("plot: {}", out.plot.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Evolve(args) => {
            let config = jcsim_cli::config::resolve(Scenario::Series, &args)?;
            let out = run_scenario(&config)?;
            println!("csv:  {}", out.csv.display());
            println!("meta: {}", out.meta.display());
            println!("plot: {}", out.plot.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
