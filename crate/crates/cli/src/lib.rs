//! Command-line front end: `nhqc run` evaluates a scenario from the catalog and
//! writes `<scenario>.csv` plus `<scenario>.summary.json`; `nhqc pulse` exports
//! a pulse as a 2001-point CSV time series.
//!
//! Numbers on the command line and in config files are in caption units:
//! frequencies as Ω/2π in MHz, times in µs, decay rates in kHz or MHz as the
//! key name says.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 simulation failure,
//! 3 unknown scenario.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rydberg_nhqc::experiments::{content_hash, run_scenario, scenario, SCENARIOS};
use rydberg_nhqc::pulses::{duration_for_cap, AngleFamily, DriveGeometry, InvariantParams, PulseSet, PulseShape};
use rydberg_nhqc::units::{mhz, to_mhz};
use rydberg_nhqc::Error;

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_SIMULATION: i32 = 2;
pub const EXIT_UNKNOWN_SCENARIO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nhqc", version, about = "Rydberg-ensemble holonomic gate simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario and write its CSV and JSON summary.
    Run(RunArgs),
    /// Print a pulse as CSV: t, Ω_A/2π, Ω_B/2π, φ_A, φ_B, Ω_eff/2π.
    Pulse(PulseArgs),
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Scenario id (fig3a … fig12b, table1).
    pub scenario_pos: Option<String>,
    #[arg(long)]
    pub scenario: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "SIM_THREADS")]
    pub threads: Option<usize>,
    /// Fixed integration step (µs).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Option<Vec<f64>>,
    #[arg(long = "N", value_delimiter = ',')]
    pub n_atoms: Option<Vec<f64>>,
    #[arg(long = "cap-mhz", value_delimiter = ',')]
    pub cap_mhz: Option<Vec<f64>>,
    /// Any scenario parameter: `--set key=v1,v2`.
    #[arg(long = "set", value_name = "KEY=VALUES")]
    pub set: Vec<String>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Nhqc,
    Lr,
    Zss,
    Adiabatic,
}

#[derive(Args, Debug)]
pub struct PulseArgs {
    pub family: Family,
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    /// Peak Ω_eff/2π (MHz).
    #[arg(long = "cap-mhz")]
    pub cap_mhz: Option<f64>,
    /// Pulse duration (µs); overrides the cap.
    #[arg(long, alias = "T")]
    pub tau: Option<f64>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolved run configuration; the TOML form of this struct is the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, Vec<f64>>,
}

fn default_out() -> PathBuf {
    PathBuf::from(".")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn usage() -> String {
    format!(
        "usage: nhqc run <scenario> [--config FILE] [--out DIR] [--seed S] [--threads T] [--dt DT] \
         [--n ..] [--eps ..] [--N ..] [--cap-mhz ..] [--set key=v1,v2] [--dump-config]\n\
         scenarios: {}",
        SCENARIOS.join(", ")
    )
}

/// Merges the config file (if any) with command-line overrides.
pub fn resolve_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| fail(EXIT_PARSE, format!("cannot read config {}: {e}\n{}", path.display(), usage())))?;
            RunConfig::parse(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?
        }
        None => {
            let id = args
                .scenario
                .clone()
                .or_else(|| args.scenario_pos.clone())
                .ok_or_else(|| fail(EXIT_PARSE, format!("no scenario and no config given\n{}", usage())))?;
            RunConfig { scenario: id, out: default_out(), seed: 0, threads: None, dt: None, params: BTreeMap::new() }
        }
    };
    if let Some(id) = args.scenario.clone().or_else(|| args.scenario_pos.clone()) {
        cfg.scenario = id;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    if args.dt.is_some() {
        cfg.dt = args.dt;
    }
    for (key, v) in [("n", &args.n), ("eps", &args.eps), ("N", &args.n_atoms), ("cap_mhz", &args.cap_mhz)] {
        if let Some(v) = v {
            cfg.params.insert(key.into(), v.clone());
        }
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| fail(EXIT_PARSE, format!("--set expects key=values, got '{kv}'")))?;
        let values = v
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| fail(EXIT_PARSE, format!("--set {k}: {e}")))?;
        cfg.params.insert(k.trim().into(), values);
    }
    if cfg.threads == Some(0) {
        return Err(fail(EXIT_PARSE, "threads must be at least 1"));
    }
    if let Some(dt) = cfg.dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(fail(EXIT_PARSE, format!("dt must be positive, got {dt}")));
        }
    }
    Ok(cfg)
}

/// Runs a resolved configuration. Returns the CSV and summary paths.
pub fn execute(cfg: &RunConfig) -> Result<(PathBuf, PathBuf), Failure> {
    let mut s = scenario(&cfg.scenario).map_err(|e| fail(EXIT_UNKNOWN_SCENARIO, format!("{e}\n{}", usage())))?;
    for (k, v) in &cfg.params {
        s.set(k, v.clone()).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
    }
    s.seed = cfg.seed;
    s.dt = cfg.dt;
    let run = || run_scenario(&s);
    let result = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| fail(EXIT_SIMULATION, e.to_string()))?
            .install(run),
        None => run(),
    };
    let result = result.map_err(|e| match e {
        Error::UnknownParameter { .. } | Error::InvalidParameter(_) => fail(EXIT_PARSE, e.to_string()),
        e => fail(EXIT_SIMULATION, format!("simulation failed: {e}")),
    })?;
    let hash = content_hash(cfg.to_toml().as_bytes());
    result.write(&cfg.out, &s, &hash).map_err(|e| fail(EXIT_SIMULATION, format!("cannot write output: {e}")))
}

/// Samples of a pulse: `[t, Ω_A/2π, Ω_B/2π, φ_A, φ_B, Ω_eff/2π]`, 2001 rows.
/// The geometry is the ensemble NOT gate (ϑ = −π/2) with `Ω_C/2π = 10 MHz`
/// and `Δ = 12Ω_C`, so `Ω′ = 24 Ω_eff`.
pub fn pulse_table(family: Family, n: f64, cap_mhz: Option<f64>, tau: Option<f64>) -> Result<Vec<[f64; 6]>, Failure> {
    let bad = |m: String| fail(EXIT_PARSE, m);
    if let Some(t) = tau {
        if !(t > 0.0 && t.is_finite()) {
            return Err(bad(format!("duration must be positive, got {t}")));
        }
    }
    let cap = mhz(cap_mhz.unwrap_or(0.5));
    let pulse = match family {
        Family::Nhqc => {
            let (omega, t) = match tau {
                Some(t) => (2.0 * PI / t, t),
                None => (cap, 2.0 * PI / cap),
            };
            PulseSet::new(PulseShape::Constant { omega, phase: 0.0 }, t)
        }
        Family::Lr | Family::Zss => {
            let fam = if family == Family::Lr { AngleFamily::Linear } else { AngleFamily::Zss { n } };
            if let AngleFamily::Zss { n } = fam {
                if !(0.0..=10.0).contains(&n) {
                    return Err(bad(format!("n must lie in [0, 10], got {n}")));
                }
            }
            let t = match tau {
                Some(t) => t,
                None => duration_for_cap(&fam, cap).map_err(|e| bad(e.to_string()))?,
            };
            PulseSet::new(PulseShape::Invariant(InvariantParams::new(fam, t)), t)
        }
        Family::Adiabatic => {
            let t = tau.unwrap_or(0.2121);
            PulseSet::new(PulseShape::SineSquared { area: 2.0 * PI, phase: 0.0 }, t)
        }
    };
    let geom = DriveGeometry { vartheta: -PI / 2.0, phi: 0.0, gain: 24.0 };
    let t_end = pulse.duration;
    Ok((0..2001)
        .map(|k| {
            let t = t_end * k as f64 / 2000.0;
            let (wa, wb, pa, pb) = pulse.components(t, &geom);
            [t, to_mhz(wa), to_mhz(wb), pa, pb, to_mhz(pulse.omega_eff(t))]
        })
        .collect())
}

pub fn pulse_csv(rows: &[[f64; 6]]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t_us", "omega_a_mhz", "omega_b_mhz", "phi_a", "phi_b", "omega_eff_mhz"]).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:.16e}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| fail(EXIT_SIMULATION, format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| fail(EXIT_SIMULATION, e.to_string())),
    }
}

/// Entry point: returns the process exit code.
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => resolve_config(&a).and_then(|cfg| {
            if a.dump_config {
                write_text(None, &cfg.to_toml())
            } else {
                let (csv, json) = execute(&cfg)?;
                eprintln!("wrote {} and {}", csv.display(), json.display());
                Ok(())
            }
        }),
        Command::Pulse(a) => {
            pulse_table(a.family, a.n, a.cap_mhz, a.tau).and_then(|rows| write_text(a.out.as_deref(), &pulse_csv(&rows)))
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> RunArgs {
        match Cli::try_parse_from(v.iter().map(|s| s.to_string())).unwrap().command {
            Command::Run(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn dump_config_round_trips() {
        let cfg = resolve_config(&args(&["nhqc", "run", "fig6a", "--n", "1", "--eps", "-0.1,0.1", "--dt", "0.001"])).unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(cfg.params["eps"], vec![-0.1, 0.1]);
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let e = RunConfig::parse("scenario = \"fig4\"\nsede = 3\n").unwrap_err();
        assert!(e.contains("sede") && e.contains("seed"), "{e}");
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "scenario = \"table1\"\nseed = 4\n[params]\nn = [0.5]\n").unwrap();
        let cfg = resolve_config(&args(&["nhqc", "run", "--config", p.to_str().unwrap(), "--n", "0.7"])).unwrap();
        assert_eq!(cfg.seed, 4);
        assert_eq!(cfg.params["n"], vec![0.7]);
    }

    #[test]
    fn pulse_units_round_trip() {
        let rows = pulse_table(Family::Nhqc, 0.0, Some(0.5), None).unwrap();
        assert!((rows[1000][5] - 0.5).abs() < 1e-12);
        assert!((rows[2000][0] - 2.0).abs() < 1e-12);
        assert!((mhz(to_mhz(3.7)) - 3.7).abs() < 1e-15);
    }
}
