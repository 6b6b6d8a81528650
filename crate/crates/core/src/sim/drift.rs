//! One-step conditional drift of the tracked statistic, computed two ways.
//!
//! The *expected* increment sums over the binomial law of the red-neighbour
//! count directly from the attachment probabilities. The *theory* increment
//! is the competition function scaled by the step size. The two agree
//! algebraically, so their difference checks both the simulator's
//! probabilities and the analysis module.

use serde::{Deserialize, Serialize};

use crate::analysis::competition::{eval_p, eval_pm, red_probability};
use crate::model::{FitnessModel, TypeAssignment};
use crate::scalar::{one, Scalar};
use crate::sim::state::SimState;

/// Colour aggregates `(X, Y, A, B)` after `n` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregates {
    pub red_degree: u64,
    pub blue_degree: u64,
    pub reds: u64,
    pub blues: u64,
    pub n: u64,
}

impl Aggregates {
    pub fn of(state: &SimState) -> Self {
        Self {
            red_degree: state.red_degree(),
            blue_degree: state.blue_degree(),
            reds: state.reds(),
            blues: state.blues(),
            n: state.n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Drift<T> {
    /// Increment of `x_n` (plain and multiplicative models).
    Scalar { expected: T, theory: T },
    /// Increment of `(x_n, y_n)` (additive model).
    Planar { expected: [T; 2], theory: [T; 2] },
}

impl<T: Scalar> Drift<T> {
    /// Largest `|expected - theory| / (1 + |theory|)` over components.
    pub fn discrepancy(&self) -> f64 {
        let rel = |e: &T, t: &T| {
            let t64 = t.to_f64();
            (e.clone() - t.clone()).abs().to_f64() / (1.0 + t64.abs())
        };
        match self {
            Drift::Scalar { expected, theory } => rel(expected, theory),
            Drift::Planar { expected, theory } => {
                rel(&expected[0], &theory[0]).max(rel(&expected[1], &theory[1]))
            }
        }
    }

    pub fn theory(&self) -> Vec<T> {
        match self {
            Drift::Scalar { theory, .. } => vec![theory.clone()],
            Drift::Planar { theory, .. } => theory.to_vec(),
        }
    }

    pub fn expected(&self) -> Vec<T> {
        match self {
            Drift::Scalar { expected, .. } => vec![expected.clone()],
            Drift::Planar { expected, .. } => expected.to_vec(),
        }
    }
}

/// Additive flow `(F_1, F_2)` at `(x, y)` with `q = x/(x+y)`.
pub fn additive_flow<T: Scalar>(
    ta: &TypeAssignment<T>,
    alpha_red: &T,
    alpha_blue: &T,
    x: &T,
    y: &T,
) -> [T; 2] {
    let m = T::from_usize_exact(ta.m());
    let two = T::from_usize_exact(2);
    let q = x.clone() / (x.clone() + y.clone());
    let p = eval_p(ta, &q);
    let f1 = (two.clone() * m.clone() + alpha_red.clone()) * q.clone()
        + two.clone() * (m.clone() + alpha_red.clone()) * p.clone()
        - x.clone();
    let f2 = (two.clone() * m.clone() + alpha_blue.clone()) * (one::<T>() - q)
        - two * (m + alpha_blue.clone()) * p
        - y.clone();
    [f1, f2]
}

/// Exact drift for the aggregate state `agg`, in any scalar type.
pub fn drift_from_aggregates<T: Scalar>(
    ta: &TypeAssignment<T>,
    fitness: &FitnessModel<T>,
    agg: &Aggregates,
) -> Drift<T> {
    let int = |v: u64| T::from_u64(v).expect("aggregate fits the scalar type");
    let m_us = ta.m();
    let m = T::from_usize_exact(m_us);
    let two = T::from_usize_exact(2);
    let (x_deg, y_deg, a, b, n) = (
        int(agg.red_degree),
        int(agg.blue_degree),
        int(agg.reds),
        int(agg.blues),
        int(agg.n),
    );
    match fitness {
        FitnessModel::Plain { alpha } | FitnessModel::Multiplicative { alpha, .. } => {
            let phi = match fitness {
                FitnessModel::Multiplicative { phi, .. } => phi.clone(),
                _ => one(),
            };
            let red_mass = x_deg + alpha.clone() * a;
            let blue_mass = y_deg + alpha.clone() * b;
            let mass = red_mass.clone() + blue_mass.clone();
            let step_mass = two.clone() * m.clone() + alpha.clone();
            let r = red_mass.clone() / (red_mass.clone() + phi.clone() * blue_mass);
            let pi = red_probability(ta, &r);
            let x = red_mass.clone() / mass.clone();
            let next_mass = mass.clone() + step_mass.clone();
            let expected = (red_mass + m.clone() * r.clone() + (m.clone() + alpha.clone()) * pi)
                / next_mass.clone()
                - x.clone();
            let c = mass - step_mass.clone() * n.clone();
            let theory = match fitness {
                FitnessModel::Plain { .. } => {
                    two * (m + alpha.clone()) * eval_p(ta, &r)
                        / (step_mass.clone() * (n + one()) + c)
                }
                _ => eval_pm(ta, &phi, alpha, &x) / (n + one() + c / step_mass),
            };
            Drift::Scalar { expected, theory }
        }
        FitnessModel::Additive {
            alpha_red,
            alpha_blue,
        } => {
            let tau = (x_deg.clone() + y_deg.clone()) / (two * m.clone());
            let red_mass = x_deg + alpha_red.clone() * a;
            let blue_mass = y_deg + alpha_blue.clone() * b;
            let x = red_mass.clone() / tau.clone();
            let y = blue_mass.clone() / tau.clone();
            let q = red_mass.clone() / (red_mass.clone() + blue_mass.clone());
            let pi = red_probability(ta, &q);
            let next = tau + one();
            let ex = (red_mass + m.clone() * q.clone() + (m.clone() + alpha_red.clone()) * pi.clone())
                / next.clone()
                - x.clone();
            let ey = (blue_mass
                + m.clone() * (one::<T>() - q)
                + (m + alpha_blue.clone()) * (one::<T>() - pi))
                / next.clone()
                - y.clone();
            let [f1, f2] = additive_flow(ta, alpha_red, alpha_blue, &x, &y);
            Drift::Planar {
                expected: [ex, ey],
                theory: [f1 / next.clone(), f2 / next],
            }
        }
    }
}

/// Exact drift at the current state of a simulation.
pub fn exact_drift(state: &SimState) -> Drift<f64> {
    drift_from_aggregates(state.type_assignment(), state.fitness(), &Aggregates::of(state))
}
