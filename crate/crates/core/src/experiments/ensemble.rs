//! Independent seeded runs and domination frequencies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::domination::{DominationRule, Domination};
use crate::rng::{run_rng, RNG_ALGORITHM};
use crate::sim::run::run_with_rng;
use crate::sim::state::SimConfig;
use crate::urn::run_urn_with_rng;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Graph,
    Urn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> Interval {
    if n == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: u64,
    pub fraction: f64,
    pub wilson95: Interval,
}

impl Frequency {
    pub fn new(count: u64, runs: u64) -> Self {
        Self {
            count,
            fraction: count as f64 / runs as f64,
            wilson95: wilson_interval(count, runs, Z95),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub runs: u64,
    pub master_seed: u64,
    pub rng: String,
    pub engine: Engine,
    pub rule: DominationRule,
    pub red: Frequency,
    pub blue: Frequency,
    pub undecided: Frequency,
    /// Terminal red statistic per run, in run order.
    pub terminals: Vec<f64>,
    /// Red statistic at `N'` per run, in run order.
    pub early: Vec<f64>,
}

impl EnsembleResult {
    /// Empirical quantile of the terminal statistic (nearest rank).
    pub fn terminal_quantile(&self, p: f64) -> f64 {
        quantile(&self.terminals, p)
    }
}

/// Nearest-rank quantile of unsorted data.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty data");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// Runs `runs` independent copies of `cfg` (run `i` uses stream `i` of
/// `cfg.seed`) and classifies each with `rule`.
pub fn run_ensemble(cfg: &SimConfig, runs: u64, rule: DominationRule, engine: Engine) -> Result<EnsembleResult> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    if rule.final_step > cfg.steps || rule.early_step > rule.final_step {
        return Err(Error::InvalidArgument(format!(
            "checkpoints {} and {} must lie within {} steps",
            rule.early_step, rule.final_step, cfg.steps
        )));
    }
    cfg.validate()?;
    let mut run_cfg = cfg.clone();
    run_cfg.steps = rule.final_step;
    run_cfg.record_every = 0;
    run_cfg.record_at = vec![rule.early_step];
    let outcomes: Vec<Result<(f64, f64)>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = run_rng(cfg.seed, i);
            let traj = match engine {
                Engine::Graph => run_with_rng(&run_cfg, &mut rng)?,
                Engine::Urn => run_urn_with_rng(&run_cfg, &mut rng)?,
            };
            let early = traj
                .statistic_at(rule.early_step)
                .ok_or(Error::MissingRecord(rule.early_step))?;
            let last = traj
                .statistic_at(rule.final_step)
                .ok_or(Error::MissingRecord(rule.final_step))?;
            Ok((early, last))
        })
        .collect();
    let mut early = Vec::with_capacity(runs as usize);
    let mut terminals = Vec::with_capacity(runs as usize);
    let (mut red, mut blue, mut undecided) = (0, 0, 0);
    for o in outcomes {
        let (e, l) = o?;
        match rule.classify(e, l) {
            Domination::Red => red += 1,
            Domination::Blue => blue += 1,
            Domination::Undecided => undecided += 1,
        }
        early.push(e);
        terminals.push(l);
    }
    Ok(EnsembleResult {
        runs,
        master_seed: cfg.seed,
        rng: RNG_ALGORITHM.to_string(),
        engine,
        rule,
        red: Frequency::new(red, runs),
        blue: Frequency::new(blue, runs),
        undecided: Frequency::new(undecided, runs),
        terminals,
        early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FitnessModel, TypeAssignment};

    #[test]
    fn wilson_reference_values() {
        // Reference: k = 0, n = 10 gives [0, z^2/(n+z^2)].
        let w = wilson_interval(0, 10, Z95);
        assert_eq!(w.lo, 0.0);
        assert!((w.hi - Z95 * Z95 / (10.0 + Z95 * Z95)).abs() < 1e-15);
        let w = wilson_interval(50, 100, Z95);
        assert!((w.lo + w.hi - 1.0).abs() < 1e-15);
        // statsmodels proportion_confint(50, 100, method="wilson")
        assert!((w.hi - 0.596_168_469_634_004_4).abs() < 1e-12);
    }

    #[test]
    fn quantiles() {
        let v = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.9), 5.0);
        assert_eq!(quantile(&v, 0.0), 1.0);
    }

    fn table_cfg(phi: f64) -> SimConfig {
        SimConfig::new(
            TypeAssignment::new(vec![0.0, 0.0, 0.9, 1.0]).unwrap(),
            FitnessModel::Multiplicative { phi, alpha: 0.0 },
            2000,
            99,
        )
    }

    #[test]
    fn counts_add_up_and_are_reproducible() {
        let cfg = table_cfg(1.1);
        let rule = DominationRule::new(2000);
        let a = run_ensemble(&cfg, 40, rule, Engine::Graph).unwrap();
        assert_eq!(a.red.count + a.blue.count + a.undecided.count, 40);
        let b = run_ensemble(&cfg, 40, rule, Engine::Graph).unwrap();
        assert_eq!(a, b);
        let u = run_ensemble(&cfg, 40, rule, Engine::Urn).unwrap();
        assert_eq!(u.terminals.len(), 40);
    }

    #[test]
    fn zero_runs_is_rejected() {
        assert!(run_ensemble(&table_cfg(1.0), 0, DominationRule::new(2000), Engine::Graph).is_err());
        assert!(run_ensemble(&table_cfg(1.0), 3, DominationRule::new(5000), Engine::Graph).is_err());
    }

    #[test]
    fn linear_plain_runs_split_between_colours() {
        let cfg = SimConfig::new(TypeAssignment::linear(2), FitnessModel::Plain { alpha: 0.0 }, 2000, 5);
        let r = run_ensemble(&cfg, 200, DominationRule::new(2000), Engine::Graph).unwrap();
        // The limit is spread over [0, 1]; neither colour takes most runs.
        assert!(r.red.count > 40 && r.blue.count > 40, "{:?} {:?}", r.red, r.blue);
    }
}
