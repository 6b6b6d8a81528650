use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::json;

use competing_types::analysis::{analyze, CompetitionFunction};
use competing_types::experiments::plot::{competition_svg, Curve};
use competing_types::experiments::{
    default_suite, phase_scan, run_ensemble, stepped, suite_passed, BoundaryCause, DominationRule, Engine,
};
use competing_types::sim::{run, Trajectory};
use competing_types::urn::run_urn;
use competing_types::Error;

use crate::config::{Config, Format, DEFAULT_RUNS};
use crate::manifest::{now_ms, sha256_hex, OutputDir};
use crate::CliError;

pub const DEFAULT_OUT: &str = "out";

fn out_dir(cfg: Option<&Config>, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| cfg.and_then(|c| c.out.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn core(e: Error) -> CliError {
    CliError::from_core(e)
}

pub fn analyze_cmd(cfg: &Config) -> Result<(), CliError> {
    let started = now_ms();
    let ta = cfg.type_assignment_exact()?;
    let fm = cfg.fitness_exact()?;
    let report = analyze(&ta, &fm, cfg.search()).map_err(core)?;
    let mut out = OutputDir::create(&out_dir(Some(cfg), &None))?;
    out.write_json("analysis.json", &report)?;
    if cfg.format() == Format::Csv {
        let mut csv = String::from("root,class,derivative\n");
        for z in &report.zeros {
            writeln!(csv, "{},{},{}", z.location, z.class.as_str(), z.derivative).unwrap();
        }
        out.write("zeros.csv", csv.as_bytes())?;
    }
    if cfg.plot.unwrap_or(true) && !report.degenerate {
        let cf = CompetitionFunction::new(ta.to_f64(), fm.to_f64()).map_err(core)?;
        let title = format!("{:?} competition function", report.function);
        let svg = competition_svg(
            &title,
            &[Curve {
                label: format!("m = {}", report.params.m),
                function: &cf,
                zeros: &report.zeros,
            }],
        );
        out.write("competition.svg", svg.as_bytes())?;
    }
    println!(
        "{} zeros, degenerate: {}",
        report.zeros.len(),
        report.degenerate
    );
    out.finish("analyze", cfg.seed(), Some(cfg.clone()), started)
}

fn trajectory_json(t: &Trajectory) -> serde_json::Value {
    json!({ "model": t.model, "m": t.m, "records": t.records })
}

pub fn simulate_cmd(cfg: &Config) -> Result<(), CliError> {
    let started = now_ms();
    let sim = cfg.sim_config()?;
    let traj = match cfg.engine.unwrap_or_default() {
        Engine::Graph => run(&sim),
        Engine::Urn => run_urn(&sim),
    }
    .map_err(core)?;
    let mut out = OutputDir::create(&out_dir(Some(cfg), &None))?;
    match cfg.format() {
        Format::Csv => out.write("trajectory.csv", traj.to_csv().as_bytes())?,
        Format::Json => out.write_json("trajectory.json", &trajectory_json(&traj))?,
    }
    out.write_json("summary.json", &traj.summary_json())?;
    println!("{} records, terminal q = {}", traj.records.len(), traj.records.last().map_or(f64::NAN, |r| r.q));
    out.finish("simulate", cfg.seed(), Some(cfg.clone()), started)
}

pub fn ensemble_cmd(cfg: &Config) -> Result<(), CliError> {
    let started = now_ms();
    let runs = cfg.runs.unwrap_or(DEFAULT_RUNS);
    if runs == 0 {
        return Err(CliError::Config("runs must be at least 1".into()));
    }
    let sim = cfg.sim_config()?;
    let engine = cfg.engine.unwrap_or_default();
    let result = run_ensemble(&sim, runs, DominationRule::new(sim.steps), engine).map_err(core)?;
    let digest = sha256_hex(serde_json::to_string(cfg).map_err(|e| CliError::Io(e.to_string()))?.as_bytes());
    let mut doc = json!({
        "config_digest": digest,
        "master_seed": result.master_seed,
        "rng": result.rng,
        "engine": result.engine,
        "runs": result.runs,
        "rule": result.rule,
        "counts": { "red": result.red.count, "blue": result.blue.count, "undecided": result.undecided.count },
        "frequencies": { "red": result.red, "blue": result.blue, "undecided": result.undecided },
        "terminal_quantiles": {
            "p10": result.terminal_quantile(0.1),
            "p50": result.terminal_quantile(0.5),
            "p90": result.terminal_quantile(0.9),
        },
    });
    if cfg.per_run_terminals.unwrap_or(false) {
        doc["per_run_terminals"] = json!(result.terminals);
    }
    let mut out = OutputDir::create(&out_dir(Some(cfg), &None))?;
    out.write_json("ensemble.json", &doc)?;
    if cfg.format() == Format::Csv {
        let mut csv = String::from("run,early,terminal\n");
        for (i, (e, t)) in result.early.iter().zip(&result.terminals).enumerate() {
            writeln!(csv, "{i},{e},{t}").unwrap();
        }
        out.write("terminals.csv", csv.as_bytes())?;
    }
    println!(
        "red {} blue {} undecided {} of {runs}",
        result.red.count, result.blue.count, result.undecided.count
    );
    out.finish("ensemble", cfg.seed(), Some(cfg.clone()), started)
}

pub fn scan_cmd(cfg: &Config) -> Result<(), CliError> {
    let started = now_ms();
    let block = cfg
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Config("scan needs a \"scan\" block".into()))?;
    let grid = match (&block.values, block.from, block.to, block.step) {
        (Some(v), ..) => v.clone(),
        (None, Some(lo), Some(hi), Some(step)) => stepped(lo, hi, step).map_err(|e| CliError::Config(e.to_string()))?,
        _ => return Err(CliError::Config("scan needs \"values\" or \"from\", \"to\" and \"step\"".into())),
    };
    let ta = cfg.type_assignment_exact()?.to_f64();
    let fm = cfg.fitness_exact()?.to_f64();
    let scan = phase_scan(&ta, &fm, block.parameter, &grid, cfg.search()).map_err(core)?;
    let mut out = OutputDir::create(&out_dir(Some(cfg), &None))?;
    match cfg.format() {
        Format::Csv => {
            out.write("bifurcation.csv", scan.to_csv().as_bytes())?;
            let mut csv = String::from("lo,hi,value,cause,endpoint\n");
            for b in &scan.boundaries {
                let (cause, endpoint) = match b.cause {
                    BoundaryCause::Endpoint { endpoint } => ("endpoint", endpoint.to_string()),
                    BoundaryCause::Interior => ("interior", String::new()),
                };
                writeln!(csv, "{},{},{},{cause},{endpoint}", b.lo, b.hi, b.value).unwrap();
            }
            out.write("boundaries.csv", csv.as_bytes())?;
        }
        Format::Json => out.write_json("scan.json", &scan)?,
    }
    for b in &scan.boundaries {
        println!("boundary {} = {}", block.parameter, b.value);
    }
    out.finish("scan", cfg.seed(), Some(cfg.clone()), started)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn verify_cmd(cfg: Option<&Config>, out_flag: &Option<PathBuf>, format: Format, seed: u64) -> Result<(), CliError> {
    let started = now_ms();
    let results = default_suite();
    let passed = suite_passed(&results);
    for r in &results {
        let tag = match (r.passed, r.required) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        println!("{tag} {}: {}", r.name, r.detail);
    }
    let mut out = OutputDir::create(&out_dir(cfg, out_flag))?;
    out.write_json("verify.json", &json!({ "passed": passed, "checks": results }))?;
    if format == Format::Csv {
        let mut csv = String::from("name,passed,required,detail\n");
        for r in &results {
            writeln!(csv, "{},{},{},{}", r.name, r.passed, r.required, csv_field(&r.detail)).unwrap();
        }
        out.write("verify.csv", csv.as_bytes())?;
    }
    out.finish("verify", seed, cfg.cloned(), started)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}
