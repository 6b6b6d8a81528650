//! Red/blue domination classifier applied at two checkpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::run::Trajectory;

/// Red domination iff `s_N > threshold` and `s_N > s_{N'}`, where `s` is the
/// tracked red statistic; blue by the mirrored rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationRule {
    pub final_step: u64,
    pub early_step: u64,
    pub threshold: f64,
}

impl DominationRule {
    /// `N' = floor(0.9 N)`, threshold one half.
    pub fn new(final_step: u64) -> Self {
        Self {
            final_step,
            early_step: final_step * 9 / 10,
            threshold: 0.5,
        }
    }

    pub fn classify(&self, early: f64, last: f64) -> Domination {
        if last > self.threshold && last > early {
            Domination::Red
        } else if 1.0 - last > self.threshold && 1.0 - last > 1.0 - early {
            Domination::Blue
        } else {
            Domination::Undecided
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domination {
    Red,
    Blue,
    Undecided,
}

pub fn classify_domination(traj: &Trajectory, rule: &DominationRule) -> Result<Domination> {
    let early = traj
        .statistic_at(rule.early_step)
        .ok_or(Error::MissingRecord(rule.early_step))?;
    let last = traj
        .statistic_at(rule.final_step)
        .ok_or(Error::MissingRecord(rule.final_step))?;
    Ok(rule.classify(early, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FitnessModel, TypeAssignment};
    use crate::sim::run::run;
    use crate::sim::state::SimConfig;
    use proptest::prelude::*;

    #[test]
    fn worked_cases() {
        let rule = DominationRule::new(100_000);
        assert_eq!(rule.early_step, 90_000);
        assert_eq!(rule.classify(0.7, 0.9), Domination::Red);
        assert_ne!(rule.classify(0.7, 0.6), Domination::Red);
        assert_eq!(rule.classify(0.2, 0.1), Domination::Blue);
        assert_eq!(rule.classify(0.4, 0.45), Domination::Undecided);
    }

    #[test]
    fn missing_checkpoint_is_an_error() {
        let mut cfg = SimConfig::new(TypeAssignment::linear(2), FitnessModel::Plain { alpha: 0.0 }, 100, 1);
        cfg.record_every = 7;
        let traj = run(&cfg).unwrap();
        let rule = DominationRule::new(100);
        assert_eq!(classify_domination(&traj, &rule), Err(Error::MissingRecord(90)));
        cfg.record_at = vec![90];
        assert!(classify_domination(&run(&cfg).unwrap(), &rule).is_ok());
    }

    proptest! {
        #[test]
        fn raising_final_value_keeps_red(early in 0.0..1.0f64, last in 0.0..1.0f64, bump in 0.0..1.0f64) {
            let rule = DominationRule::new(1000);
            let higher = (last + bump).min(1.0);
            if rule.classify(early, last) == Domination::Red {
                prop_assert_eq!(rule.classify(early, higher), Domination::Red);
            }
        }
    }
}
