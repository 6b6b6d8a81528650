//! The competition functions `P`, `P^M` and `P^A` and their power-basis forms.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{FitnessModel, TypeAssignment};
use crate::poly::PolyCoeffs;
use crate::scalar::{binomial_scalar, one, powi, zero, Scalar};

/// `P(z) = 1/2 sum_k C(m,k) z^k (1-z)^(m-k) (p_k - k/m)`.
///
/// Returns exactly zero for the linear mechanism.
pub fn eval_p<T: Scalar>(ta: &TypeAssignment<T>, z: &T) -> T {
    if ta.is_linear() {
        return zero();
    }
    let m = ta.m();
    let w = one::<T>() - z.clone();
    let mut acc = zero::<T>();
    for k in 0..=m {
        let term = binomial_scalar::<T>(m, k) * powi(z, k) * powi(&w, m - k) * ta.excess(k);
        acc = acc + term;
    }
    acc / T::from_usize_exact(2)
}

/// Probability that a vertex with `k ~ Bin(m, r)` red neighbours is red,
/// `sum_k p_k C(m,k) r^k (1-r)^(m-k)`. Equals `2 P(r) + r`.
pub fn red_probability<T: Scalar>(ta: &TypeAssignment<T>, r: &T) -> T {
    let m = ta.m();
    let w = one::<T>() - r.clone();
    (0..=m).fold(zero(), |acc: T, k| {
        acc + binomial_scalar::<T>(m, k) * powi(r, k) * powi(&w, m - k) * ta.p_k(k).clone()
    })
}

/// Probability that a single multiplicative-fitness draw picks red when the
/// red share of unweighted mass is `x`: `x / (x + phi (1 - x))`.
pub fn weighted_share<T: Scalar>(phi: &T, x: &T) -> T {
    x.clone() / (x.clone() + phi.clone() * (one::<T>() - x.clone()))
}

/// `2(m+alpha)/(2m+alpha) P(s) + (s - x)` with `s = x / (x + phi(1-x))`.
pub fn eval_pm<T: Scalar>(ta: &TypeAssignment<T>, phi: &T, alpha: &T, x: &T) -> T {
    let m = T::from_usize_exact(ta.m());
    let two = T::from_usize_exact(2);
    let s = weighted_share(phi, x);
    let gain = two.clone() * (m.clone() + alpha.clone()) / (two * m + alpha.clone());
    gain * eval_p(ta, &s) + (s - x.clone())
}

/// `(a1 - a2) z (1-z) + [2(m+a1) + 2(a2-a1) z] P(z)`.
pub fn eval_pa<T: Scalar>(ta: &TypeAssignment<T>, alpha_red: &T, alpha_blue: &T, z: &T) -> T {
    let m = T::from_usize_exact(ta.m());
    let two = T::from_usize_exact(2);
    let a1 = alpha_red.clone();
    let a2 = alpha_blue.clone();
    let bracket = two.clone() * (m + a1.clone()) + two * (a2.clone() - a1.clone()) * z.clone();
    (a1 - a2) * z.clone() * (one::<T>() - z.clone()) + bracket * eval_p(ta, z)
}

/// Power-basis coefficients of `P`.
pub fn p_polynomial<T: Scalar>(ta: &TypeAssignment<T>) -> PolyCoeffs<T> {
    let m = ta.m();
    let one_minus_z = PolyCoeffs::linear(one::<T>(), -one::<T>());
    let z = PolyCoeffs::linear(zero::<T>(), one::<T>());
    let mut acc = PolyCoeffs::zero();
    if ta.is_linear() {
        return acc;
    }
    let half = T::ratio(1, 2);
    for k in 0..=m {
        let c = binomial_scalar::<T>(m, k) * ta.excess(k) * half.clone();
        if c.is_zero() {
            continue;
        }
        let term = (&z.pow(k) * &one_minus_z.pow(m - k)).scale(&c);
        acc = &acc + &term;
    }
    acc
}

/// Power-basis coefficients of `P^A`.
pub fn pa_polynomial<T: Scalar>(
    ta: &TypeAssignment<T>,
    alpha_red: &T,
    alpha_blue: &T,
) -> PolyCoeffs<T> {
    let m = T::from_usize_exact(ta.m());
    let two = T::from_usize_exact(2);
    let a1 = alpha_red.clone();
    let a2 = alpha_blue.clone();
    let diff = a1.clone() - a2.clone();
    // (a1 - a2)(z - z^2)
    let logistic = PolyCoeffs::new(vec![zero(), diff.clone(), -diff]);
    let bracket = PolyCoeffs::linear(
        two.clone() * (m + a1.clone()),
        two * (a2 - a1),
    );
    &logistic + &(&bracket * &p_polynomial(ta))
}

/// Numerator and denominator of `P^M` with common factors of
/// `x + phi(1-x)` cancelled.
///
/// Before cancellation the numerator is
/// `gain * 1/2 sum_k C(m,k)(p_k - k/m) x^k phi^(m-k) (1-x)^(m-k) + (1-phi) x (1-x) d^(m-1)`
/// over `d^m`, where `d = phi + (1 - phi) x`.
pub fn pm_polynomials<T: Scalar>(
    ta: &TypeAssignment<T>,
    phi: &T,
    alpha: &T,
) -> (PolyCoeffs<T>, PolyCoeffs<T>) {
    let m = ta.m();
    let mt = T::from_usize_exact(m);
    let two = T::from_usize_exact(2);
    let gain = two.clone() * (mt.clone() + alpha.clone()) / (two * mt + alpha.clone());
    let d0 = phi.clone();
    let d1 = one::<T>() - phi.clone();
    let d = PolyCoeffs::linear(d0.clone(), d1.clone());
    let x = PolyCoeffs::linear(zero::<T>(), one::<T>());
    let one_minus_x = PolyCoeffs::linear(one::<T>(), -one::<T>());

    let mut bern = PolyCoeffs::zero();
    if !ta.is_linear() {
        let half = T::ratio(1, 2);
        for k in 0..=m {
            let c = binomial_scalar::<T>(m, k) * ta.excess(k) * half.clone() * powi(phi, m - k);
            if c.is_zero() {
                continue;
            }
            bern = &bern + &(&x.pow(k) * &one_minus_x.pow(m - k)).scale(&c);
        }
    }
    let correction = (&(&x * &one_minus_x) * &d.pow(m - 1)).scale(&d1);
    let mut numerator = &bern.scale(&gain) + &correction;
    let mut den_power = m;

    if !d1.is_zero() {
        while den_power > 0 {
            let (quot, rem) = numerator.div_rem_linear(&d0, &d1);
            let tol = 1e-12 * numerator.max_abs_coeff().max(1.0);
            if !rem.is_negligible(tol) {
                break;
            }
            numerator = quot;
            den_power -= 1;
        }
    } else {
        den_power = 0;
    }
    let denominator = if den_power == 0 {
        PolyCoeffs::constant(one())
    } else {
        d.pow(den_power)
    };
    (numerator.trimmed(), denominator.trimmed())
}

/// Which competition function a [`CompetitionFunction`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    /// Plain/affine model.
    P,
    /// Multiplicative fitness.
    PM,
    /// Additive fitness.
    PA,
}

/// A competition function with its rational power-basis form.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitionFunction<T> {
    kind: FunctionKind,
    ta: TypeAssignment<T>,
    fitness: FitnessModel<T>,
    numerator: PolyCoeffs<T>,
    denominator: PolyCoeffs<T>,
}

impl<T: Scalar> CompetitionFunction<T> {
    /// Builds the function governing `fitness`: `P` for the plain model,
    /// `P^M` for multiplicative, `P^A` for additive fitness.
    pub fn new(ta: TypeAssignment<T>, fitness: FitnessModel<T>) -> Result<Self> {
        fitness.validate(ta.m())?;
        Ok(Self::new_unchecked(ta, fitness))
    }

    /// Skips parameter validation. Used for the `alpha_red == alpha_blue`
    /// reduction probe.
    pub fn new_unchecked(ta: TypeAssignment<T>, fitness: FitnessModel<T>) -> Self {
        let (kind, numerator, denominator) = match &fitness {
            FitnessModel::Plain { .. } => {
                (FunctionKind::P, p_polynomial(&ta), PolyCoeffs::constant(one()))
            }
            FitnessModel::Multiplicative { phi, alpha } => {
                let (n, d) = pm_polynomials(&ta, phi, alpha);
                (FunctionKind::PM, n, d)
            }
            FitnessModel::Additive {
                alpha_red,
                alpha_blue,
            } => (
                FunctionKind::PA,
                pa_polynomial(&ta, alpha_red, alpha_blue),
                PolyCoeffs::constant(one()),
            ),
        };
        Self {
            kind,
            ta,
            fitness,
            numerator,
            denominator,
        }
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn type_assignment(&self) -> &TypeAssignment<T> {
        &self.ta
    }

    pub fn fitness(&self) -> &FitnessModel<T> {
        &self.fitness
    }

    pub fn numerator(&self) -> &PolyCoeffs<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &PolyCoeffs<T> {
        &self.denominator
    }

    /// `(numerator, denominator)` in the power basis.
    pub fn to_polynomial(&self) -> (PolyCoeffs<T>, PolyCoeffs<T>) {
        (self.numerator.clone(), self.denominator.clone())
    }

    /// Evaluates from the defining formula (not the expanded form).
    pub fn eval(&self, x: &T) -> T {
        match &self.fitness {
            FitnessModel::Plain { .. } => eval_p(&self.ta, x),
            FitnessModel::Multiplicative { phi, alpha } => eval_pm(&self.ta, phi, alpha, x),
            FitnessModel::Additive {
                alpha_red,
                alpha_blue,
            } => eval_pa(&self.ta, alpha_red, alpha_blue, x),
        }
    }

    /// Identically zero numerator; exact for rational inputs,
    /// `|c| < 1e-14` on every coefficient otherwise.
    pub fn is_degenerate(&self) -> bool {
        self.numerator.is_identically_zero(1e-14)
    }

    pub fn to_f64(&self) -> CompetitionFunction<f64> {
        CompetitionFunction {
            kind: self.kind,
            ta: self.ta.to_f64(),
            fitness: self.fitness.to_f64(),
            numerator: self.numerator.to_f64(),
            denominator: self.denominator.to_f64(),
        }
    }
}

impl CompetitionFunction<f64> {
    /// Derivative of `num/den` at `x`.
    pub fn derivative_at(&self, x: f64) -> f64 {
        let n = self.numerator.eval(&x);
        let dn = self.numerator.derivative().eval(&x);
        let d = self.denominator.eval(&x);
        let dd = self.denominator.derivative().eval(&x);
        (dn * d - n * dd) / (d * d)
    }
}
