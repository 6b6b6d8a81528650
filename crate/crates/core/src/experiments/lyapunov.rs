//! Lyapunov quantities for the additive flow `F = (F_1, F_2)`.
//!
//! All computations use coordinates in which blue is the fitter colour
//! (`alpha_1 < alpha_2`); inputs with `alpha_red > alpha_blue` are relabelled.
//!
//! With `g(x, y) = m (alpha_2 - alpha_1) P'(q) / (x + y)` the derivative of
//! `L = l^2 + 2 (S_2^2 / S_1) L_1(q)` along the flow is exactly
//! `-2 l^2 - 4 g l P^A(q) - 2 (S_2^2 / S_1) P^A(q)^2 / (x + y)`.
//! Taking `S_2 = sup |g|` makes this at most `-2 (|l| - S_2 |P^A|)^2`.
//! [`LyapunovParams::s2_signed`] keeps the plain supremum of `g`, for which
//! the bound `-2 (l + S_2 P^A)^2` does not hold in general.

use serde::{Deserialize, Serialize};

use crate::analysis::competition::{p_polynomial, pa_polynomial};
use crate::error::{Error, Result};
use crate::experiments::ode::{integrate, OdeTolerance};
use crate::model::{normalize_additive, FitnessModel, ModelKind, TypeAssignment};
use crate::poly::PolyCoeffs;
use crate::sim::drift::additive_flow;
use crate::sim::run::Trajectory;
use crate::sim::statespace::AdditiveDomain;

const GRID: usize = 512;
const ZOOM_ROUNDS: usize = 4;
const ZOOM_GRID: usize = 16;

/// Which `S_2` goes into `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum S2Choice {
    /// `sup g` over `D`.
    Signed,
    /// `sup |g|` over `D`.
    Absolute,
}

/// Constants and polynomials for one additive parameter set, normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovParams {
    pub m: usize,
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub swapped: bool,
    /// `inf over D of 1/(x+y) = 1/(2m + alpha_2)`.
    pub s1: f64,
    /// `sup over D of g`.
    pub s2_signed: f64,
    /// `sup over D of |g|`, used in `L`.
    pub s2: f64,
    ta: TypeAssignment<f64>,
    p: PolyCoeffs<f64>,
    dp: PolyCoeffs<f64>,
    pa: PolyCoeffs<f64>,
    pa_int: PolyCoeffs<f64>,
}

/// Pointwise values at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovPoint {
    pub ell: f64,
    pub l1: f64,
    pub l2: f64,
    pub l: f64,
    pub pa: f64,
    pub g: f64,
}

impl LyapunovParams {
    pub fn new(ta: &TypeAssignment<f64>, alpha_red: f64, alpha_blue: f64) -> Result<Self> {
        let m = ta.m();
        FitnessModel::Additive {
            alpha_red,
            alpha_blue,
        }
        .validate(m)?;
        let norm = normalize_additive(ta, &alpha_red, &alpha_blue);
        let (a1, a2) = (norm.alpha_red, norm.alpha_blue);
        let p = p_polynomial(&norm.ta);
        let dp = p.derivative();
        let pa = pa_polynomial(&norm.ta, &a1, &a2);
        let pa_int = pa.antiderivative();
        let mut out = Self {
            m,
            alpha_1: a1,
            alpha_2: a2,
            swapped: norm.swapped,
            s1: 1.0 / (2.0 * m as f64 + a2),
            s2_signed: 0.0,
            s2: 0.0,
            ta: norm.ta,
            p,
            dp,
            pa,
            pa_int,
        };
        out.s2_signed = out.maximize_g(|g| g);
        out.s2 = out.maximize_g(f64::abs);
        Ok(out)
    }

    pub fn domain(&self) -> AdditiveDomain {
        AdditiveDomain::new(self.m, self.alpha_1, self.alpha_2)
    }

    pub fn type_assignment(&self) -> &TypeAssignment<f64> {
        &self.ta
    }

    pub fn g(&self, x: f64, y: f64) -> f64 {
        let s = x + y;
        self.m as f64 * (self.alpha_2 - self.alpha_1) * self.dp.eval(&(x / s)) / s
    }

    /// Grid maximum over `D` followed by repeated zooms on the best cell.
    fn maximize_g(&self, score: impl Fn(f64) -> f64) -> f64 {
        let d = self.domain();
        let eval = |t: f64, e: f64| {
            let (x, y) = d.point(t, e);
            score(self.g(x, y))
        };
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=GRID {
            for j in 0..=GRID {
                let (t, e) = (i as f64 / GRID as f64, j as f64 / GRID as f64);
                let v = eval(t, e);
                if v > best.0 {
                    best = (v, t, e);
                }
            }
        }
        let mut half = 1.0 / GRID as f64;
        for _ in 0..ZOOM_ROUNDS {
            let (_, t0, e0) = best;
            for i in 0..=ZOOM_GRID {
                for j in 0..=ZOOM_GRID {
                    let t = (t0 - half + 2.0 * half * i as f64 / ZOOM_GRID as f64).clamp(0.0, 1.0);
                    let e = (e0 - half + 2.0 * half * j as f64 / ZOOM_GRID as f64).clamp(0.0, 1.0);
                    let v = eval(t, e);
                    if v > best.0 {
                        best = (v, t, e);
                    }
                }
            }
            half *= 2.0 / ZOOM_GRID as f64;
        }
        best.0
    }

    fn s2_for(&self, choice: S2Choice) -> f64 {
        match choice {
            S2Choice::Signed => self.s2_signed,
            S2Choice::Absolute => self.s2,
        }
    }

    pub fn ell(&self, x: f64, y: f64) -> f64 {
        let m2 = 2.0 * self.m as f64;
        let (a1, a2) = (self.alpha_1, self.alpha_2);
        let q = x / (x + y);
        (m2 + a1) * (m2 + a2) + m2 * (a1 - a2) * self.p.eval(&q) - (m2 + a2) * x - (m2 + a1) * y
    }

    /// `L_1(z) = -integral from 1 to z of P^A`.
    pub fn l1(&self, z: f64) -> f64 {
        self.pa_int.eval(&1.0) - self.pa_int.eval(&z)
    }

    pub fn pa(&self, z: f64) -> f64 {
        self.pa.eval(&z)
    }

    pub fn point(&self, x: f64, y: f64, choice: S2Choice) -> LyapunovPoint {
        let s2 = self.s2_for(choice);
        let q = x / (x + y);
        let ell = self.ell(x, y);
        let l1 = self.l1(q);
        let l2 = ell * ell;
        LyapunovPoint {
            ell,
            l1,
            l2,
            l: l2 + 2.0 * s2 * s2 / self.s1 * l1,
            pa: self.pa(q),
            g: self.g(x, y),
        }
    }

    pub fn lyapunov(&self, x: f64, y: f64, choice: S2Choice) -> f64 {
        self.point(x, y, choice).l
    }

    /// Flow in normalized coordinates.
    pub fn flow(&self, x: f64, y: f64) -> [f64; 2] {
        additive_flow(&self.ta, &self.alpha_1, &self.alpha_2, &x, &y)
    }

    /// Exact `grad L . F`.
    pub fn derivative_along_flow(&self, x: f64, y: f64, choice: S2Choice) -> f64 {
        let s2 = self.s2_for(choice);
        let pt = self.point(x, y, choice);
        -2.0 * pt.ell * pt.ell - 4.0 * pt.g * pt.ell * pt.pa - 2.0 * s2 * s2 / self.s1 * pt.pa * pt.pa / (x + y)
    }

    /// Right-hand side of the published bound, `-2 (l + S_2 P^A)^2` with the
    /// signed `S_2`.
    pub fn published_bound(&self, x: f64, y: f64) -> f64 {
        let pt = self.point(x, y, S2Choice::Signed);
        let v = pt.ell + self.s2_signed * pt.pa;
        -2.0 * v * v
    }

    /// `-2 (|l| - S_2 |P^A|)^2` with `S_2 = sup |g|`.
    pub fn corrected_bound(&self, x: f64, y: f64) -> f64 {
        let pt = self.point(x, y, S2Choice::Absolute);
        let v = pt.ell.abs() - self.s2 * pt.pa.abs();
        -2.0 * v * v
    }

    /// Evenly spread interior points of `D`: `nt * ne` of them.
    pub fn grid(&self, nt: usize, ne: usize) -> Vec<(f64, f64)> {
        let d = self.domain();
        let mut out = Vec::with_capacity(nt * ne);
        for i in 0..nt {
            for j in 0..ne {
                out.push(d.point((i as f64 + 0.5) / nt as f64, (j as f64 + 0.5) / ne as f64));
            }
        }
        out
    }
}

/// Largest excess of `grad L . F` over a bound on a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentCheck {
    pub points: usize,
    /// `max (grad L . F - bound)`; the bound holds when this is `<= slack`.
    pub max_excess: f64,
    pub worst: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentBound {
    /// Signed `S_2`, bound `-2 (l + S_2 P^A)^2`.
    Published,
    /// `S_2 = sup |g|`, bound `-2 (|l| - S_2 |P^A|)^2`.
    Corrected,
}

pub fn check_descent(params: &LyapunovParams, points: &[(f64, f64)], bound: DescentBound) -> DescentCheck {
    let mut out = DescentCheck {
        points: points.len(),
        max_excess: f64::NEG_INFINITY,
        worst: (f64::NAN, f64::NAN),
    };
    for &(x, y) in points {
        let excess = match bound {
            DescentBound::Published => {
                params.derivative_along_flow(x, y, S2Choice::Signed) - params.published_bound(x, y)
            }
            DescentBound::Corrected => {
                params.derivative_along_flow(x, y, S2Choice::Absolute) - params.corrected_bound(x, y)
            }
        };
        if excess > out.max_excess {
            out.max_excess = excess;
            out.worst = (x, y);
        }
    }
    out
}

/// Outcome of integrating the flow from one start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRun {
    pub start: (f64, f64),
    pub end: (f64, f64),
    /// Largest increase of `L` between accepted steps, per unit time.
    pub max_increase_rate: f64,
    pub terminal_abs_ell: f64,
    pub terminal_abs_pa: f64,
}

/// Integrates the flow from `start` to time `t_end`, tracking `L`.
pub fn flow_run(params: &LyapunovParams, start: (f64, f64), t_end: f64, choice: S2Choice) -> Result<FlowRun> {
    let mut prev: Option<(f64, f64)> = None;
    let mut worst = f64::NEG_INFINITY;
    let end = integrate(
        |_, s: &[f64; 2]| params.flow(s[0], s[1]),
        0.0,
        [start.0, start.1],
        t_end,
        OdeTolerance::default(),
        |t, s| {
            let l = params.lyapunov(s[0], s[1], choice);
            if let Some((t0, l0)) = prev {
                if t > t0 {
                    worst = worst.max((l - l0) / (t - t0));
                }
            }
            prev = Some((t, l));
        },
    )?;
    let q = end[0] / (end[0] + end[1]);
    Ok(FlowRun {
        start,
        end: (end[0], end[1]),
        max_increase_rate: worst,
        terminal_abs_ell: params.ell(end[0], end[1]).abs(),
        terminal_abs_pa: params.pa(q).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovRecord {
    pub n: u64,
    pub ell: f64,
    pub l1: f64,
    pub l2: f64,
    pub l: f64,
}

/// Lyapunov quantities along a simulated additive trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub params: LyapunovParams,
    pub records: Vec<LyapunovRecord>,
    pub terminal_abs_ell: f64,
    pub terminal_abs_pa: f64,
}

/// Evaluates `l`, `L_1`, `L_2` and `L` at every record of `traj`.
pub fn lyapunov_monitor(
    traj: &Trajectory,
    ta: &TypeAssignment<f64>,
    fitness: &FitnessModel<f64>,
) -> Result<LyapunovReport> {
    let (alpha_red, alpha_blue) = match (traj.model, fitness) {
        (
            ModelKind::Additive,
            FitnessModel::Additive {
                alpha_red,
                alpha_blue,
            },
        ) => (*alpha_red, *alpha_blue),
        _ => {
            return Err(Error::WrongModel(format!(
                "Lyapunov monitoring needs an additive trajectory, got {:?}",
                traj.model
            )))
        }
    };
    let params = LyapunovParams::new(ta, alpha_red, alpha_blue)?;
    let orient = |x: f64, y: f64| if params.swapped { (y, x) } else { (x, y) };
    let records: Vec<LyapunovRecord> = traj
        .records
        .iter()
        .map(|r| {
            let (x, y) = orient(r.x, r.y);
            let pt = params.point(x, y, S2Choice::Absolute);
            LyapunovRecord {
                n: r.n,
                ell: pt.ell,
                l1: pt.l1,
                l2: pt.l2,
                l: pt.l,
            }
        })
        .collect();
    let last = traj
        .records
        .last()
        .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
    let (x, y) = orient(last.x, last.y);
    Ok(LyapunovReport {
        terminal_abs_ell: params.ell(x, y).abs(),
        terminal_abs_pa: params.pa(x / (x + y)).abs(),
        params,
        records,
    })
}
