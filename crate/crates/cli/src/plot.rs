use crate::config::{ExperimentConfig, Scenario};
use std::path::Path;

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "data.csv".into())
}

/// Renders the standalone plot script for a run. The script only needs
/// python3 with matplotlib and reads the CSV sitting next to it.
pub fn script(config: &ExperimentConfig) -> String {
    let csv = file_name(&config.output_path);
    let title = format!(
        "{} ({}, |alpha|^2 = {}, nbar = {})",
        match config.scenario {
            Scenario::Distribution => "photon-number distribution",
            Scenario::Series => "inversion and negativity",
        },
        config.state_kind.as_str(),
        config.alpha_sq,
        config.nbar
    );
    match config.scenario {
        Scenario::Distribution => distribution_script(&csv, &title),
        Scenario::Series => series_script(&csv, &title),
    }
}

fn distribution_script(csv: &str, title: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Renders the photon-number distribution from {csv}."""
import csv
import os
import sys

here = os.path.dirname(os.path.abspath(__file__))
path = os.path.join(here, {csv:?})

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required: pip install matplotlib")

ns, ps = [], []
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        ns.append(int(row["n"]))
        ps.append(float(row["p"]))

support = [n for n, p in zip(ns, ps) if p > 1e-8]
upper = (max(support) + 5) if support else len(ns)

fig, ax = plt.subplots(figsize=(6, 4))
ax.stem(ns[:upper], ps[:upper], basefmt=" ")
ax.set_xlabel("n")
ax.set_ylabel("P(n)")
ax.set_title({title:?})
fig.tight_layout()
out = path + ".png"
fig.savefig(out, dpi=150)
print("wrote", out)
"#
    )
}

fn series_script(csv: &str, title: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Renders the inversion and negativity series from {csv}."""
import csv
import os
import sys

here = os.path.dirname(os.path.abspath(__file__))
path = os.path.join(here, {csv:?})

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required: pip install matplotlib")

ts, ws, negs = [], [], []
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        ts.append(float(row["lambda_t"]))
        ws.append(float(row["inversion"]))
        negs.append(float(row["negativity"]))

fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
top.plot(ts, ws, lw=0.8)
top.set_ylabel("W(t)")
top.set_ylim(-1.05, 1.05)
top.set_title({title:?})
bottom.plot(ts, negs, lw=0.8, color="tab:red")
bottom.set_xlabel("lambda t")
bottom.set_ylabel("N(t)")
fig.tight_layout()
out = path + ".png"
fig.savefig(out, dpi=150)
print("wrote", out)
"#
    )
}
