//! Urn view of the multiplicative model with `alpha = 0`.
//!
//! With `alpha = 0` the attachment weight of a colour is its total degree,
//! scaled by `phi` for blue, so `(X_n, Y_n)` evolves on its own: draw `K`
//! red balls out of `m` with success probability `X/(X + phi Y)`, add `K` red
//! and `m - K` blue balls for the chosen endpoints and `m` balls of the new
//! vertex's colour. The exact enumerators below compute the law of
//! `(X_n, A_n)` both from this urn and from the full graph process.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Colour, FitnessModel, ModelKind, TypeAssignment};
use crate::rng::run_rng;
use crate::scalar::{binomial, powi, Rational};
use crate::sim::run::{schedule, Record, TerminalSummary, Trajectory};
use crate::sim::state::{InitialGraph, SimConfig};

/// Largest number of distinct states an exact enumeration may hold.
pub const MAX_ENUMERATED_STATES: usize = 100_000;
/// Largest `m` accepted by the enumerators.
pub const MAX_ENUMERATED_M: usize = 2;
/// Largest step count accepted by the enumerators.
pub const MAX_ENUMERATED_STEPS: u64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UrnState {
    /// Red mass `X_n`.
    pub x: u64,
    /// Blue mass `Y_n`.
    pub y: u64,
    pub reds: u64,
    pub blues: u64,
    pub n: u64,
    /// Activity of blue balls.
    pub phi: f64,
}

impl UrnState {
    pub fn from_initial(initial: &InitialGraph, phi: f64) -> Self {
        Self {
            x: initial.degree_of(Colour::Red),
            y: initial.degree_of(Colour::Blue),
            reds: initial.count_of(Colour::Red),
            blues: initial.count_of(Colour::Blue),
            n: 0,
            phi,
        }
    }

    /// Probability that a single draw is red.
    pub fn red_draw_probability(&self) -> f64 {
        let x = self.x as f64;
        x / (x + self.phi * self.y as f64)
    }

    fn record(&self) -> Record {
        let x = self.x as f64 / (self.x + self.y) as f64;
        Record {
            n: self.n,
            q: self.red_draw_probability(),
            x,
            y: 1.0 - x,
            red_fraction: self.reds as f64 / (self.reds + self.blues) as f64,
        }
    }
}

/// One urn step. Returns the number of red draws and the new colour.
pub fn urn_step<R: Rng + ?Sized>(
    state: &mut UrnState,
    ta: &TypeAssignment<f64>,
    rng: &mut R,
) -> (usize, Colour) {
    let m = ta.m();
    let r = state.red_draw_probability();
    let k = (0..m).filter(|_| rng.random::<f64>() < r).count();
    let u: f64 = rng.random();
    let colour = if u < *ta.p_k(k) {
        Colour::Red
    } else {
        Colour::Blue
    };
    let (k64, m64) = (k as u64, m as u64);
    state.x += k64;
    state.y += m64 - k64;
    match colour {
        Colour::Red => {
            state.x += m64;
            state.reds += 1;
        }
        Colour::Blue => {
            state.y += m64;
            state.blues += 1;
        }
    }
    state.n += 1;
    (k, colour)
}

/// `phi` of a fitness model the urn path can serve (`alpha = 0`).
pub fn urn_activity(fitness: &FitnessModel<f64>) -> Result<f64> {
    match fitness.phi_alpha() {
        Some((phi, alpha)) if alpha == 0.0 => Ok(phi),
        _ => Err(Error::NotApplicable(
            "the urn path needs a plain or multiplicative model with alpha = 0".into(),
        )),
    }
}

/// Runs `cfg` through the urn, stream 0 of its seed.
pub fn run_urn(cfg: &SimConfig) -> Result<Trajectory> {
    run_urn_with_rng(cfg, &mut run_rng(cfg.seed, 0))
}

pub fn run_urn_with_rng<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Trajectory> {
    cfg.validate()?;
    let phi = urn_activity(&cfg.fitness)?;
    let initial = cfg.initial_graph();
    let mut state = UrnState::from_initial(&initial, phi);
    let (x0, y0, m) = (state.x, state.y, cfg.ta.m() as u64);
    let marks = schedule(cfg);
    let mut records = Vec::with_capacity(marks.len());
    for &mark in &marks {
        while state.n < mark {
            urn_step(&mut state, &cfg.ta, rng);
        }
        if cfg.check_invariants && state.x + state.y != x0 + y0 + 2 * m * state.n {
            return Err(Error::InvariantViolation {
                step: state.n,
                detail: "urn mass is not conserved".into(),
            });
        }
        records.push(state.record());
    }
    let x = state.x as f64 / (state.x + state.y) as f64;
    Ok(Trajectory {
        model: cfg.fitness.kind(),
        m: cfg.ta.m(),
        records,
        terminal: TerminalSummary {
            n: state.n,
            red_degree: state.x,
            blue_degree: state.y,
            reds: state.reds,
            blues: state.blues,
            red_statistic: x,
        },
    })
}

/// Exact law of `(X_n, A_n)`.
pub type ExactDistribution = BTreeMap<(u64, u64), Rational>;

fn check_enumeration_size(m: usize, steps: u64) -> Result<()> {
    if m > MAX_ENUMERATED_M || steps > MAX_ENUMERATED_STEPS {
        return Err(Error::InvalidArgument(format!(
            "exact enumeration supports m <= {MAX_ENUMERATED_M} and at most {MAX_ENUMERATED_STEPS} steps"
        )));
    }
    Ok(())
}

fn rat(v: u64) -> Rational {
    Rational::from_integer(v.into())
}

/// Enumerates the urn chain for `steps` steps with exact probabilities.
pub fn enumerate_urn_exact(
    initial: &InitialGraph,
    ta: &TypeAssignment<Rational>,
    phi: &Rational,
    steps: u64,
) -> Result<ExactDistribution> {
    let m = ta.m();
    check_enumeration_size(m, steps)?;
    initial.validate(m)?;
    if !phi.is_positive() {
        return Err(Error::InvalidFitness("phi must be positive".into()));
    }
    let total0 = initial.total_degree();
    let mut dist = ExactDistribution::new();
    dist.insert(
        (initial.degree_of(Colour::Red), initial.count_of(Colour::Red)),
        Rational::one(),
    );
    for n in 0..steps {
        let total = total0 + 2 * m as u64 * n;
        let mut next = ExactDistribution::new();
        for ((x, a), prob) in &dist {
            let y = total - x;
            let r = rat(*x) / (rat(*x) + phi.clone() * rat(y));
            let s = Rational::one() - r.clone();
            for k in 0..=m {
                let pk = Rational::from_integer(binomial(m, k).into()) * powi(&r, k) * powi(&s, m - k);
                if pk.is_zero() {
                    continue;
                }
                let red = ta.p_k(k).clone();
                let blue = Rational::one() - red.clone();
                let (m64, k64) = (m as u64, k as u64);
                for (key, w) in [((x + k64 + m64, a + 1), red), ((x + k64, *a), blue)] {
                    if w.is_zero() {
                        continue;
                    }
                    *next.entry(key).or_insert_with(Rational::zero) += prob.clone() * pk.clone() * w;
                }
            }
        }
        if next.len() > MAX_ENUMERATED_STATES {
            return Err(Error::StateSpaceTooLarge {
                limit: MAX_ENUMERATED_STATES,
            });
        }
        dist = next;
    }
    Ok(dist)
}

/// Graph state up to relabelling: sorted `(colour, degree)` pairs.
type GraphKey = Vec<(Colour, u64)>;

fn weight(fitness: &FitnessModel<Rational>, colour: Colour, degree: u64) -> Rational {
    let d = rat(degree);
    match fitness {
        FitnessModel::Plain { alpha } => d + alpha.clone(),
        FitnessModel::Multiplicative { phi, alpha } => match colour {
            Colour::Red => d + alpha.clone(),
            Colour::Blue => (d + alpha.clone()) * phi.clone(),
        },
        FitnessModel::Additive {
            alpha_red,
            alpha_blue,
        } => match colour {
            Colour::Red => d + alpha_red.clone(),
            Colour::Blue => d + alpha_blue.clone(),
        },
    }
}

/// Enumerates the graph process over all ordered `m`-tuples of neighbours,
/// then projects to `(X_n, A_n)`.
pub fn enumerate_graph_exact(
    initial: &InitialGraph,
    ta: &TypeAssignment<Rational>,
    fitness: &FitnessModel<Rational>,
    steps: u64,
) -> Result<ExactDistribution> {
    let m = ta.m();
    check_enumeration_size(m, steps)?;
    fitness.validate(m)?;
    initial.validate(m)?;
    let mut start: GraphKey = initial.vertices.iter().map(|v| (v.colour, v.degree)).collect();
    start.sort_unstable();
    let mut states: BTreeMap<GraphKey, Rational> = BTreeMap::new();
    states.insert(start, Rational::one());
    for _ in 0..steps {
        let mut next: BTreeMap<GraphKey, Rational> = BTreeMap::new();
        for (key, prob) in &states {
            let weights: Vec<Rational> = key.iter().map(|&(c, d)| weight(fitness, c, d)).collect();
            let total: Rational = weights.iter().cloned().fold(Rational::zero(), |a, b| a + b);
            let nv = key.len();
            let mut tuple = vec![0usize; m];
            loop {
                let mut p = prob.clone();
                for &i in &tuple {
                    p *= weights[i].clone() / total.clone();
                }
                let k = tuple.iter().filter(|&&i| key[i].0.is_red()).count();
                let mut grown = key.clone();
                for &i in &tuple {
                    grown[i].1 += 1;
                }
                let red = ta.p_k(k).clone();
                let blue = Rational::one() - red.clone();
                for (colour, w) in [(Colour::Red, red), (Colour::Blue, blue)] {
                    if w.is_zero() {
                        continue;
                    }
                    let mut child = grown.clone();
                    child.push((colour, m as u64));
                    child.sort_unstable();
                    *next.entry(child).or_insert_with(Rational::zero) += p.clone() * w;
                }
                // Advance the base-`nv` odometer over ordered tuples.
                let mut pos = 0;
                while pos < m {
                    tuple[pos] += 1;
                    if tuple[pos] < nv {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == m {
                    break;
                }
            }
        }
        if next.len() > MAX_ENUMERATED_STATES {
            return Err(Error::StateSpaceTooLarge {
                limit: MAX_ENUMERATED_STATES,
            });
        }
        states = next;
    }
    let mut dist = ExactDistribution::new();
    for (key, prob) in states {
        let x: u64 = key.iter().filter(|v| v.0.is_red()).map(|v| v.1).sum();
        let a = key.iter().filter(|v| v.0.is_red()).count() as u64;
        *dist.entry((x, a)).or_insert_with(Rational::zero) += prob;
    }
    Ok(dist)
}

/// `1/2 sum |p - q|` over the union of supports.
pub fn total_variation(p: &ExactDistribution, q: &ExactDistribution) -> Rational {
    let mut acc = Rational::zero();
    for (key, a) in p {
        let b = q.get(key).cloned().unwrap_or_else(Rational::zero);
        acc += (a.clone() - b).abs();
    }
    for (key, b) in q {
        if !p.contains_key(key) {
            acc += b.abs();
        }
    }
    acc / Rational::from_integer(2.into())
}

/// Total probability mass of `p` (1 for a valid distribution).
pub fn total_mass(p: &ExactDistribution) -> Rational {
    p.values().cloned().fold(Rational::zero(), |a, b| a + b)
}

/// Whether `kind` can be run on the urn path at all.
pub fn urn_supports(kind: ModelKind) -> bool {
    matches!(kind, ModelKind::Plain | ModelKind::Multiplicative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use crate::sim::run::run;
    use rand::SeedableRng;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn single_pair() -> InitialGraph {
        InitialGraph::pair(1)
    }

    #[test]
    fn zero_steps_is_a_point_mass() {
        let ta = TypeAssignment::<Rational>::linear(2);
        let d = enumerate_urn_exact(&InitialGraph::default_for(2), &ta, &q("3/2"), 0).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&(4, 1)], Rational::one());
    }

    #[test]
    fn one_step_single_edge() {
        let ta = TypeAssignment::new(vec![q("0"), q("1")]).unwrap();
        let d = enumerate_urn_exact(&single_pair(), &ta, &q("1"), 1).unwrap();
        assert_eq!(d[&(3, 2)], q("1/2"));
        assert_eq!(d[&(1, 1)], q("1/2"));
        let d = enumerate_urn_exact(&single_pair(), &ta, &q("2"), 1).unwrap();
        // Blue branch: Y = 1 + 2 = 3 and X stays at 1.
        assert_eq!(d[&(3, 2)], q("1/3"));
        assert_eq!(d[&(1, 1)], q("2/3"));
    }

    #[test]
    fn urn_step_single_edge_frequencies() {
        let ta = TypeAssignment::new(vec![0.0, 1.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let trials = 60_000;
        let mut red = 0;
        for _ in 0..trials {
            let mut s = UrnState { x: 1, y: 1, reds: 1, blues: 1, n: 0, phi: 2.0 };
            urn_step(&mut s, &ta, &mut rng);
            if s.x == 3 {
                assert_eq!(s.y, 1);
                red += 1;
            } else {
                assert_eq!((s.x, s.y), (1, 3));
            }
        }
        let f = red as f64 / trials as f64;
        let se = (1.0 / 3.0 * 2.0 / 3.0 / trials as f64).sqrt();
        assert!((f - 1.0 / 3.0).abs() < 4.0 * se);
    }

    #[test]
    fn dominant_red_urn_adds_two_m_red() {
        let ta = TypeAssignment::new(vec![0.0, 0.5, 1.0]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut s = UrnState { x: 1 << 40, y: 2, reds: 1000, blues: 1, n: 0, phi: 1.0 };
        let x0 = s.x;
        urn_step(&mut s, &ta, &mut rng);
        assert_eq!(s.x, x0 + 4);
    }

    #[test]
    fn graph_and_urn_laws_coincide_small() {
        let ta = TypeAssignment::new(vec![q("0"), q("1/3"), q("1")]).unwrap();
        let fm = FitnessModel::Multiplicative { phi: q("3/2"), alpha: q("0") };
        let g0 = InitialGraph::default_for(2);
        let a = enumerate_graph_exact(&g0, &ta, &fm, 3).unwrap();
        let b = enumerate_urn_exact(&g0, &ta, &q("3/2"), 3).unwrap();
        assert_eq!(total_mass(&a), Rational::one());
        assert!(total_variation(&a, &b).is_zero());
    }

    #[test]
    fn total_variation_detects_difference() {
        let ta = TypeAssignment::new(vec![q("0"), q("1/3"), q("1")]).unwrap();
        let g0 = InitialGraph::default_for(2);
        let a = enumerate_urn_exact(&g0, &ta, &q("1"), 2).unwrap();
        let b = enumerate_urn_exact(&g0, &ta, &q("2"), 2).unwrap();
        assert!(total_variation(&a, &b).is_positive());
        assert_eq!(total_variation(&a, &a), Rational::zero());
    }

    #[test]
    fn enumeration_limits() {
        let ta = TypeAssignment::<Rational>::linear(3);
        assert!(enumerate_urn_exact(&InitialGraph::default_for(3), &ta, &q("1"), 2).is_err());
        let ta = TypeAssignment::<Rational>::linear(2);
        assert!(enumerate_urn_exact(&InitialGraph::default_for(2), &ta, &q("1"), 7).is_err());
    }

    #[test]
    fn urn_rejects_affine_offset() {
        let cfg = SimConfig::new(
            TypeAssignment::linear(2),
            FitnessModel::Multiplicative { phi: 1.5, alpha: 1.0 },
            10,
            0,
        );
        assert!(matches!(run_urn(&cfg), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn urn_and_graph_terminal_means_agree() {
        let ta = TypeAssignment::new(vec![0.0, 0.0, 0.9, 1.0]).unwrap();
        let mut cfg = SimConfig::new(ta, FitnessModel::Multiplicative { phi: 1.2, alpha: 0.0 }, 400, 0);
        cfg.check_invariants = false;
        let runs = 400;
        let mut g = Vec::new();
        let mut u = Vec::new();
        for seed in 0..runs {
            cfg.seed = seed;
            g.push(run(&cfg).unwrap().terminal.red_statistic);
            u.push(run_urn(&cfg).unwrap().terminal.red_statistic);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64]| {
            let mu = mean(v);
            v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() - 1) as f64
        };
        let se = ((var(&g) + var(&u)) / runs as f64).sqrt();
        assert!((mean(&g) - mean(&u)).abs() < 4.0 * se);
    }

    #[test]
    #[ignore = "timing benchmark"]
    fn urn_path_is_much_faster() {
        use std::time::Instant;
        let ta = TypeAssignment::new(vec![0.0, 0.0, 0.9, 1.0]).unwrap();
        let mut cfg = SimConfig::new(ta, FitnessModel::Multiplicative { phi: 1.2, alpha: 0.0 }, 1_000_000, 0);
        cfg.check_invariants = false;
        let t = Instant::now();
        run(&cfg).unwrap();
        let graph = t.elapsed();
        let t = Instant::now();
        run_urn(&cfg).unwrap();
        let urn = t.elapsed();
        let ratio = graph.as_secs_f64() / urn.as_secs_f64();
        println!("graph {graph:?}, urn {urn:?}, ratio {ratio:.1}");
        assert!(ratio >= 50.0);
    }
}
