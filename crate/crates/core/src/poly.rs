//! Dense univariate polynomials in the power basis.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{one, zero, Scalar};

/// Coefficients `c[0] + c[1] z + ... + c[d] z^d`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> PolyCoeffs<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(zero());
        }
        p
    }

    pub fn zero() -> Self {
        Self::new(vec![zero()])
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `a + b z`.
    pub fn linear(a: T, b: T) -> Self {
        Self::new(vec![a, b])
    }

    /// `c z^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Index of the highest non-zero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Drops trailing exact zeros.
    pub fn trimmed(mut self) -> Self {
        let d = self.degree();
        self.coeffs.truncate(d + 1);
        self
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(zero(), |acc: T, c| acc * z.clone() + c.clone())
    }

    /// Term-by-term evaluation `sum c_i z^i`, used to cross-check Horner.
    pub fn eval_direct(&self, z: &T) -> T {
        let mut power = one::<T>();
        let mut acc = zero::<T>();
        for c in &self.coeffs {
            acc = acc + c.clone() * power.clone();
            power = power * z.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_usize_exact(i))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / T::from_usize_exact(i + 1));
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::constant(one());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// True when every coefficient is negligible: exact zero for rationals,
    /// `|c| < abs_tol` for floats.
    pub fn is_identically_zero(&self, abs_tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(abs_tol))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Divides by `a + b z` (with `b != 0`), returning quotient and remainder.
    pub fn div_rem_linear(&self, a: &T, b: &T) -> (Self, T) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Self::zero(), self.coeffs[0].clone());
        }
        // Synthetic division by the root r = -a/b, then rescale by 1/b.
        let root = -(a.clone() / b.clone());
        let mut quot = vec![zero::<T>(); n - 1];
        let mut carry = self.coeffs[n - 1].clone();
        for i in (0..n - 1).rev() {
            quot[i] = carry.clone();
            carry = self.coeffs[i].clone() + carry * root.clone();
        }
        let quot = quot.into_iter().map(|q| q / b.clone()).collect();
        (Self::new(quot), carry)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PolyCoeffs<U> {
        PolyCoeffs::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> PolyCoeffs<f64> {
        self.map(|c| c.to_f64())
    }
}

impl<T: Scalar> Add for &PolyCoeffs<T> {
    type Output = PolyCoeffs<T>;

    fn add(self, rhs: Self) -> PolyCoeffs<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &PolyCoeffs<T>, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(zero);
        PolyCoeffs::new((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }
}

impl<T: Scalar> Sub for &PolyCoeffs<T> {
    type Output = PolyCoeffs<T>;

    fn sub(self, rhs: Self) -> PolyCoeffs<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &PolyCoeffs<T> {
    type Output = PolyCoeffs<T>;

    fn neg(self) -> PolyCoeffs<T> {
        PolyCoeffs::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Mul for &PolyCoeffs<T> {
    type Output = PolyCoeffs<T>;

    fn mul(self, rhs: Self) -> PolyCoeffs<T> {
        let mut out = vec![zero::<T>(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        PolyCoeffs::new(out)
    }
}
