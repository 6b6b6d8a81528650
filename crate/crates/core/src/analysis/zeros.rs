//! Zeros of a competition function on `[0, 1]` and their stability classes.
//!
//! The numerator is scanned on a uniform grid. Sign changes are refined by
//! bisection, and local minima of `|f|` without a sign change are refined by
//! golden-section search to find touchpoints or close root pairs. Each zero is
//! classified from the signs of `f` on either side.

use serde::{Deserialize, Serialize};

use crate::analysis::competition::CompetitionFunction;
use crate::error::{Error, Result};
use crate::poly::PolyCoeffs;
use crate::scalar::Scalar;

/// Stability class of a zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroClass {
    /// `+` on the left, `-` on the right.
    Stable,
    /// `-` on the left, `+` on the right.
    Unstable,
    /// Same non-zero sign on both sides.
    Touchpoint,
    /// Endpoint zero whose interior side points back towards it.
    EndpointStable,
    /// Endpoint zero whose interior side points away from it.
    EndpointUnstable,
}

impl ZeroClass {
    pub fn is_stable(self) -> bool {
        matches!(self, ZeroClass::Stable | ZeroClass::EndpointStable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZeroClass::Stable => "stable",
            ZeroClass::Unstable => "unstable",
            ZeroClass::Touchpoint => "touchpoint",
            ZeroClass::EndpointStable => "endpoint_stable",
            ZeroClass::EndpointUnstable => "endpoint_unstable",
        }
    }
}

/// Extra information attached to a zero whose class is not clear-cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroWarning {
    /// Derivative vanishes (to tolerance) at an interior zero, or the sign on
    /// one side could not be resolved.
    Multiplicity,
    /// Endpoint zero with vanishing derivative; the class comes from the sign
    /// on the interior side only.
    FlatEndpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedZero {
    pub location: f64,
    pub class: ZeroClass,
    pub derivative: f64,
    /// Classified from one side only.
    pub one_sided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<ZeroWarning>,
}

/// Result of [`find_zeros`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ZeroSet {
    /// The numerator is identically zero (linear plain model).
    Degenerate,
    Zeros(Vec<ClassifiedZero>),
}

impl ZeroSet {
    pub fn zeros(&self) -> &[ClassifiedZero] {
        match self {
            ZeroSet::Degenerate => &[],
            ZeroSet::Zeros(z) => z,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, ZeroSet::Degenerate)
    }

    pub fn at_endpoint(&self, endpoint: f64) -> Option<&ClassifiedZero> {
        self.zeros().iter().find(|z| z.location == endpoint)
    }

    pub fn interior(&self) -> impl Iterator<Item = &ClassifiedZero> {
        self.zeros()
            .iter()
            .filter(|z| z.location > 0.0 && z.location < 1.0)
    }
}

/// Grid and tolerance for [`find_zeros`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSearch {
    pub grid_n: usize,
    pub tol: f64,
}

impl Default for ZeroSearch {
    fn default() -> Self {
        Self {
            grid_n: 4096,
            tol: 1e-12,
        }
    }
}

const TOUCH_TOL: f64 = 1e-10;
const SUBCELLS: usize = 32;

/// Finds and classifies every zero of `cf` in `[0, 1]`.
pub fn find_zeros<T: Scalar>(cf: &CompetitionFunction<T>, search: ZeroSearch) -> Result<ZeroSet> {
    if search.grid_n < 1000 {
        return Err(Error::InvalidArgument(format!(
            "grid_n = {} is below the minimum of 1000",
            search.grid_n
        )));
    }
    if !(search.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if cf.is_degenerate() {
        return Ok(ZeroSet::Degenerate);
    }
    let num = cf.numerator().to_f64();
    let den = cf.denominator().to_f64();
    let roots = locate_roots(&num, search)?;
    let h = 1.0 / search.grid_n as f64;
    let scale = num.max_abs_coeff();
    let dnum = num.derivative();
    let zeros = roots
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let gap_left = if i > 0 { r - roots[i - 1] } else { f64::INFINITY };
            let gap_right = roots.get(i + 1).map_or(f64::INFINITY, |&n| n - r);
            let delta = search.tol.max(h.min(0.5 * gap_left.min(gap_right)));
            let derivative = dnum.eval(&r) / den.eval(&r);
            classify(&num, r, delta, derivative, scale)
        })
        .collect();
    Ok(ZeroSet::Zeros(zeros))
}

fn sign(v: f64, noise: f64) -> i8 {
    if v > noise {
        1
    } else if v < -noise {
        -1
    } else {
        0
    }
}

fn classify(num: &PolyCoeffs<f64>, r: f64, delta: f64, derivative: f64, scale: f64) -> ClassifiedZero {
    let noise = 1e-14 * scale;
    let flat = derivative.abs() < 1e-8 * scale.max(1e-300);
    if r == 0.0 || r == 1.0 {
        let (probe, towards_stable) = if r == 0.0 { (delta, -1) } else { (1.0 - delta, 1) };
        let s = sign(num.eval(&probe), noise);
        let (class, warning) = match s {
            0 => (ZeroClass::Touchpoint, Some(ZeroWarning::Multiplicity)),
            s if s == towards_stable => (ZeroClass::EndpointStable, flat.then_some(ZeroWarning::FlatEndpoint)),
            _ => (ZeroClass::EndpointUnstable, flat.then_some(ZeroWarning::FlatEndpoint)),
        };
        return ClassifiedZero {
            location: r,
            class,
            derivative,
            one_sided: true,
            warning,
        };
    }
    let left = sign(num.eval(&(r - delta).max(0.0)), noise);
    let right = sign(num.eval(&(r + delta).min(1.0)), noise);
    let (class, warning) = match (left, right) {
        (1, -1) => (ZeroClass::Stable, flat.then_some(ZeroWarning::Multiplicity)),
        (-1, 1) => (ZeroClass::Unstable, flat.then_some(ZeroWarning::Multiplicity)),
        (l, r) if l == r && l != 0 => (ZeroClass::Touchpoint, None),
        _ => (ZeroClass::Touchpoint, Some(ZeroWarning::Multiplicity)),
    };
    ClassifiedZero {
        location: r,
        class,
        derivative,
        one_sided: false,
        warning,
    }
}

fn bisect(f: &PolyCoeffs<f64>, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f.eval(&lo);
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f.eval(&mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes `s * f` on `[lo, hi]` by golden-section search.
fn golden_min(f: &PolyCoeffs<f64>, s: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let mut fa = s * f.eval(&a);
    let mut fb = s * f.eval(&b);
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = s * f.eval(&a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = s * f.eval(&b);
        }
        if fa < 0.0 || fb < 0.0 {
            // Crossed zero: the minimum has the opposite sign already.
            return if fa < fb { a } else { b };
        }
    }
    0.5 * (lo + hi)
}

/// Consecutive sign changes of `f` along `points`, skipping points where the
/// sign is unresolved.
fn sign_changes(f: &PolyCoeffs<f64>, points: impl Iterator<Item = f64>, noise: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, i8)> = None;
    for x in points {
        let s = sign(f.eval(&x), noise);
        if s == 0 {
            continue;
        }
        if let Some((px, ps)) = prev {
            if ps != s {
                out.push(if px < x { (px, x) } else { (x, px) });
            }
        }
        prev = Some((x, s));
    }
    out
}

/// Sub-grid of `[from, to]` in walking order; `from` itself is excluded when
/// `skip_first` is set.
fn sub_grid(from: f64, to: f64, skip_first: bool) -> impl Iterator<Item = f64> {
    let step = (to - from) / SUBCELLS as f64;
    let start = usize::from(skip_first);
    (start..=SUBCELLS).map(move |j| if j == SUBCELLS { to } else { from + step * j as f64 })
}

fn locate_roots(num: &PolyCoeffs<f64>, search: ZeroSearch) -> Result<Vec<f64>> {
    let n = search.grid_n;
    let h = 1.0 / n as f64;
    let scale = num.max_abs_coeff();
    let zero_tol = search.tol * scale;
    let noise = 1e-14 * scale;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let vs: Vec<f64> = xs.iter().map(|x| num.eval(x)).collect();
    let flagged: Vec<bool> = vs.iter().map(|v| v.abs() < zero_tol).collect();

    let mut roots = Vec::new();
    for i in 0..=n {
        if flagged[i] {
            roots.push(xs[i]);
        }
    }

    for i in 0..n {
        let (a, b) = (xs[i], xs[i + 1]);
        let changes = match (flagged[i], flagged[i + 1]) {
            (true, true) => continue,
            // A root sits on a grid point; look for another one inside the cell.
            (true, false) => sign_changes(num, sub_grid(a, b, true), noise),
            (false, true) => sign_changes(num, sub_grid(b, a, true), noise),
            (false, false) => {
                if (vs[i] > 0.0) == (vs[i + 1] > 0.0) {
                    continue;
                }
                sign_changes(num, sub_grid(a, b, false), noise)
            }
        };
        if changes.len() > 1 {
            return Err(Error::UnresolvedRoot { lo: a, hi: b });
        }
        for (l, r) in changes {
            roots.push(bisect(num, l, r, search.tol));
        }
    }

    // Local minima of |f| with no sign change: touchpoints or close pairs.
    for i in 1..n {
        if flagged[i - 1] || flagged[i] || flagged[i + 1] {
            continue;
        }
        let s = vs[i].signum();
        if vs[i - 1].signum() != s || vs[i + 1].signum() != s {
            continue;
        }
        if !(vs[i].abs() < vs[i - 1].abs() && vs[i].abs() <= vs[i + 1].abs()) {
            continue;
        }
        let xm = golden_min(num, s, xs[i - 1], xs[i + 1], search.tol);
        let fm = num.eval(&xm);
        if fm.signum() != s && fm != 0.0 {
            roots.push(bisect(num, xs[i - 1], xm, search.tol));
            roots.push(bisect(num, xm, xs[i + 1], search.tol));
        } else if fm.abs() < TOUCH_TOL * scale {
            roots.push(xm);
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 4.0 * search.tol);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FitnessModel, TypeAssignment};
    use crate::scalar::{parse_rational, Rational};
    use rand::{Rng, SeedableRng};

    fn mult(p: &[f64], phi: f64, alpha: f64) -> CompetitionFunction<f64> {
        CompetitionFunction::new(
            TypeAssignment::new(p.to_vec()).unwrap(),
            FitnessModel::Multiplicative { phi, alpha },
        )
        .unwrap()
    }

    fn plain_bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn half_half_below_threshold_has_interior_stable_zero() {
        let cf = mult(&[0.0, 0.5, 0.5, 1.0], 7.0 / 6.0, 0.0);
        let zs = find_zeros(&cf, ZeroSearch::default()).unwrap();
        assert_eq!(zs.at_endpoint(0.0).unwrap().class, ZeroClass::EndpointUnstable);
        assert_eq!(zs.at_endpoint(1.0).unwrap().class, ZeroClass::EndpointUnstable);
        let inner: Vec<_> = zs.interior().collect();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].class, ZeroClass::Stable);
        let oracle = plain_bisect(|x| cf.eval(&x), 0.05, 0.5);
        assert!((inner[0].location - oracle).abs() < 1e-10, "{} vs {oracle}", inner[0].location);
        assert!((oracle - 0.1997).abs() < 1e-3);
    }

    #[test]
    fn half_half_above_threshold_has_stable_zero_at_origin_only() {
        let cf = mult(&[0.0, 0.5, 0.5, 1.0], 4.0 / 3.0, 0.0);
        let zs = find_zeros(&cf, ZeroSearch::default()).unwrap();
        assert_eq!(zs.at_endpoint(0.0).unwrap().class, ZeroClass::EndpointStable);
        assert!(zs.interior().all(|z| !z.class.is_stable()));
        assert_eq!(zs.zeros().iter().filter(|z| z.class.is_stable()).count(), 1);
    }

    #[test]
    fn linear_p_is_degenerate() {
        let cf = CompetitionFunction::new(TypeAssignment::<Rational>::linear(3), FitnessModel::Plain {
            alpha: parse_rational("1/2").unwrap(),
        })
        .unwrap();
        assert!(find_zeros(&cf, ZeroSearch::default()).unwrap().is_degenerate());
    }

    #[test]
    fn rejects_small_grid_and_bad_tol() {
        let cf = mult(&[0.0, 0.5, 0.5, 1.0], 1.1, 0.0);
        assert!(find_zeros(&cf, ZeroSearch { grid_n: 999, tol: 1e-12 }).is_err());
        assert!(find_zeros(&cf, ZeroSearch { grid_n: 4096, tol: 0.0 }).is_err());
    }

    #[test]
    fn flat_endpoints_are_flagged() {
        // Only p_2 deviates: P = 3 e z^2 (1-z)^2, negative inside.
        let ta = TypeAssignment::new(vec![0.0, 0.25, 0.45, 0.75, 1.0]).unwrap();
        let cf = CompetitionFunction::new(ta, FitnessModel::Plain { alpha: 0.0 }).unwrap();
        let zs = find_zeros(&cf, ZeroSearch::default()).unwrap();
        assert_eq!(zs.zeros().len(), 2);
        let z0 = zs.at_endpoint(0.0).unwrap();
        assert_eq!(z0.class, ZeroClass::EndpointStable);
        assert_eq!(z0.warning, Some(ZeroWarning::FlatEndpoint));
        assert_eq!(zs.at_endpoint(1.0).unwrap().class, ZeroClass::EndpointUnstable);
    }

    #[test]
    fn interior_touchpoint_of_squared_factor() {
        // P = c (z - 1/2)^2 z (1 - z) requires excess_k with
        // sum_k C(m,k) e_k z^k (1-z)^(m-k) = 2c z (1-z) (z - 1/2)^2.
        // For m = 4: e_1 = e_3 = c/8, e_2 = -c/6.
        let c: f64 = 0.4;
        let ta = TypeAssignment::new(vec![0.0, 0.25 + c / 8.0, 0.5 - c / 6.0, 0.75 + c / 8.0, 1.0]).unwrap();
        let cf = CompetitionFunction::new(ta, FitnessModel::Plain { alpha: 0.0 }).unwrap();
        for &z in &[0.1, 0.3, 0.7] {
            let want = c * (z - 0.5) * (z - 0.5) * z * (1.0 - z);
            assert!((cf.eval(&z) - want).abs() < 1e-14);
        }
        let zs = find_zeros(&cf, ZeroSearch::default()).unwrap();
        let inner: Vec<_> = zs.interior().collect();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].class, ZeroClass::Touchpoint);
        assert!((inner[0].location - 0.5).abs() < 1e-5);
    }

    /// Roots of `f` by a plain scan on `n` cells plus bisection.
    fn fine_grid_roots(f: &PolyCoeffs<f64>, n: usize) -> Vec<f64> {
        let scale = f.max_abs_coeff();
        let mut out = Vec::new();
        if f.eval(&0.0).abs() < 1e-12 * scale {
            out.push(0.0);
        }
        let mut prev = f.eval(&0.0);
        for i in 1..=n {
            let x = i as f64 / n as f64;
            let v = f.eval(&x);
            if i == n && v.abs() < 1e-12 * scale {
                out.push(1.0);
                break;
            }
            if prev.abs() >= 1e-12 * scale && v.abs() >= 1e-12 * scale && (prev > 0.0) != (v > 0.0) {
                out.push(plain_bisect(|t| f.eval(&t), (i - 1) as f64 / n as f64, x));
            }
            if v.abs() >= 1e-12 * scale {
                prev = v;
            }
        }
        out
    }

    #[test]
    fn agrees_with_fine_grid_oracle_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0;
        while checked < 200 {
            let m = rng.random_range(1..=4);
            let mut p: Vec<f64> = (0..=m).map(|_| rng.random::<f64>()).collect();
            if rng.random::<bool>() {
                p[0] = 0.0;
                p[m] = 1.0;
            }
            let ta = TypeAssignment::new(p).unwrap();
            let fm = match rng.random_range(0..3) {
                0 => FitnessModel::Plain { alpha: rng.random_range(-(m as f64) + 0.1..3.0) },
                1 => FitnessModel::Multiplicative {
                    phi: rng.random_range(0.3..3.0),
                    alpha: rng.random_range(-(m as f64) + 0.1..3.0),
                },
                _ => FitnessModel::Additive {
                    alpha_red: rng.random_range(-(m as f64) + 0.1..3.0),
                    alpha_blue: rng.random_range(-(m as f64) + 0.1..3.0),
                },
            };
            let cf = CompetitionFunction::new(ta, fm).unwrap();
            if cf.is_degenerate() {
                continue;
            }
            let got: Vec<f64> = find_zeros(&cf, ZeroSearch::default())
                .unwrap()
                .zeros()
                .iter()
                .map(|z| z.location)
                .collect();
            let want = fine_grid_roots(cf.numerator(), 1_000_000);
            assert_eq!(got.len(), want.len(), "{cf:?}: {got:?} vs {want:?}");
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-8, "{cf:?}: {got:?} vs {want:?}");
            }
            checked += 1;
        }
    }

    #[test]
    fn near_minus_m_limit_is_negative_inside() {
        let m = 3;
        let alpha = -(m as f64) + 1e-3;
        let cf = mult(&[0.0, 0.5, 0.5, 1.0], 1.5, alpha);
        for i in 1..99 {
            let x = 0.01 + 0.98 * i as f64 / 99.0;
            assert!(cf.eval(&x) < 0.0, "x = {x}");
            let lin = (1.0 - 1.5) * x * (1.0 - x) / (x + 1.5 * (1.0 - x));
            assert!((cf.eval(&x) - lin).abs() < 1e-3);
        }
    }
}
