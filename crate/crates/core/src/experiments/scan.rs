//! Zero structure across a one-parameter family and the boundaries between
//! regimes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::competition::CompetitionFunction;
use crate::analysis::thresholds::{endpoint_derivative, locate_endpoint_threshold, with_parameter, Parameter};
use crate::analysis::zeros::{find_zeros, ClassifiedZero, ZeroClass, ZeroSearch, ZeroSet};
use crate::error::{Error, Result};
use crate::model::{FitnessModel, TypeAssignment};

pub const BIFURCATION_HEADER: &str = "param,root,class,derivative";

/// Attempts at `grid_n * 8^k` after an unresolved cell.
const RETRIES: u32 = 3;
/// Width to which interior-structure boundaries are bisected.
const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub degenerate: bool,
    pub zeros: Vec<ClassifiedZero>,
}

impl ScanPoint {
    /// Classes in order of location; two points are in the same regime when
    /// their signatures agree.
    pub fn signature(&self) -> Vec<ZeroClass> {
        self.zeros.iter().map(|z| z.class).collect()
    }

    pub fn stable_zeros(&self) -> impl Iterator<Item = &ClassifiedZero> {
        self.zeros.iter().filter(|z| z.class.is_stable())
    }

    pub fn has_interior_stable(&self) -> bool {
        self.stable_zeros().any(|z| z.location > 0.0 && z.location < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "snake_case")]
pub enum BoundaryCause {
    /// The derivative at this endpoint changes sign.
    Endpoint { endpoint: f64 },
    /// Interior zeros appear, vanish or change class.
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    /// Grid values bracketing the change.
    pub lo: f64,
    pub hi: f64,
    /// Refined location.
    pub value: f64,
    pub cause: BoundaryCause,
    pub before: Vec<ZeroClass>,
    pub after: Vec<ZeroClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseScan {
    pub parameter: Parameter,
    pub points: Vec<ScanPoint>,
    pub boundaries: Vec<Boundary>,
}

impl PhaseScan {
    /// Rows `param,root,class,derivative`, one per zero.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(BIFURCATION_HEADER);
        out.push('\n');
        for p in &self.points {
            for z in &p.zeros {
                writeln!(out, "{},{},{},{}", p.value, z.location, z.class.as_str(), z.derivative).unwrap();
            }
        }
        out
    }

    pub fn boundary_values(&self) -> Vec<f64> {
        self.boundaries.iter().map(|b| b.value).collect()
    }

    /// Boundary closest to `target`, if any.
    pub fn nearest_boundary(&self, target: f64) -> Option<&Boundary> {
        self.boundaries.iter().min_by(|a, b| {
            (a.value - target)
                .abs()
                .partial_cmp(&(b.value - target).abs())
                .expect("finite boundaries")
        })
    }
}

/// `n` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Values `lo, lo + step, ...` up to `hi` (inclusive within half a step).
pub fn stepped(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| lo + step * i as f64).collect())
}

/// [`find_zeros`], retrying with a finer grid when a cell is unresolved.
pub fn zeros_with_retry(cf: &CompetitionFunction<f64>, search: ZeroSearch) -> Result<ZeroSet> {
    let mut s = search;
    let mut attempt = 0;
    loop {
        match find_zeros(cf, s) {
            Err(Error::UnresolvedRoot { .. }) if attempt < RETRIES => {
                attempt += 1;
                s.grid_n *= 8;
            }
            other => return other,
        }
    }
}

fn scan_point(
    ta: &TypeAssignment<f64>,
    fitness: &FitnessModel<f64>,
    param: Parameter,
    value: f64,
    search: ZeroSearch,
) -> Result<ScanPoint> {
    let (t, f) = with_parameter(ta, fitness, param, value)?;
    let cf = CompetitionFunction::new(t, f)?;
    let zs = zeros_with_retry(&cf, search)?;
    Ok(ScanPoint {
        value,
        degenerate: zs.is_degenerate(),
        zeros: zs.zeros().to_vec(),
    })
}

/// Endpoint derivative, or `None` when `e` is not a zero.
fn endpoint_slope(ta: &TypeAssignment<f64>, fitness: &FitnessModel<f64>, param: Parameter, value: f64, e: f64) -> Result<Option<f64>> {
    let (t, f) = with_parameter(ta, fitness, param, value)?;
    let is_zero = if e == 0.0 { *t.p_k(0) == 0.0 } else { *t.p_k(t.m()) == 1.0 };
    Ok(is_zero.then(|| endpoint_derivative(&t, &f, e)))
}

fn endpoint_class(p: &ScanPoint, e: f64) -> Option<ZeroClass> {
    p.zeros.iter().find(|z| z.location == e).map(|z| z.class)
}

/// Finds and classifies zeros at every grid value of `param`, then locates
/// each change of regime between neighbouring grid values.
pub fn phase_scan(
    ta: &TypeAssignment<f64>,
    fitness: &FitnessModel<f64>,
    param: Parameter,
    grid: &[f64],
    search: ZeroSearch,
) -> Result<PhaseScan> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("parameter grid must be strictly increasing".into()));
    }
    let points = grid
        .iter()
        .map(|&v| scan_point(ta, fitness, param, v, search))
        .collect::<Result<Vec<_>>>()?;
    let mut boundaries = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.signature() == b.signature() {
            continue;
        }
        let mut endpoint_flip = false;
        for e in [0.0, 1.0] {
            let sa = endpoint_slope(ta, fitness, param, a.value, e)?;
            let sb = endpoint_slope(ta, fitness, param, b.value, e)?;
            let (Some(ga), Some(gb)) = (sa, sb) else { continue };
            // A slope that is zero to rounding at a grid value can leave the
            // signs equal while the classification has already changed.
            if (ga < 0.0) != (gb < 0.0) || endpoint_class(a, e) != endpoint_class(b, e) {
                endpoint_flip = true;
                let value = match locate_endpoint_threshold(ta, fitness, param, e, a.value, b.value)? {
                    Some(v) => v,
                    None if ga.abs() <= gb.abs() => a.value,
                    None => b.value,
                };
                boundaries.push(Boundary {
                    lo: a.value,
                    hi: b.value,
                    value,
                    cause: BoundaryCause::Endpoint { endpoint: e },
                    before: a.signature(),
                    after: b.signature(),
                });
            }
        }
        if endpoint_flip {
            continue;
        }
        let before = a.signature();
        let (mut lo, mut hi) = (a.value, b.value);
        while hi - lo > BOUNDARY_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if scan_point(ta, fitness, param, mid, search)?.signature() == before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        boundaries.push(Boundary {
            lo: a.value,
            hi: b.value,
            value: 0.5 * (lo + hi),
            cause: BoundaryCause::Interior,
            before,
            after: b.signature(),
        });
    }
    Ok(PhaseScan {
        parameter: param,
        points,
        boundaries,
    })
}
