//! Model parameters: the type-assignment mechanism and the fitness rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{one, zero, Scalar};

/// Vertex colour. Red is type 1, blue is type 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    pub fn is_red(self) -> bool {
        self == Colour::Red
    }

    pub fn other(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }
}

/// `m` edges per new vertex and the probabilities `p_0..p_m` that a new vertex
/// is red given `k` red neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeAssignment<T> {
    m: usize,
    p: Vec<T>,
}

impl<T: Scalar> TypeAssignment<T> {
    /// `p` must hold `m + 1 >= 2` probabilities in `[0, 1]`.
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::InvalidTypeAssignment(format!(
                "need at least p_0 and p_1, got {} entries",
                p.len()
            )));
        }
        for (k, pk) in p.iter().enumerate() {
            if *pk < zero() || *pk > one() {
                return Err(Error::InvalidTypeAssignment(format!(
                    "p_{k} = {pk:?} is outside [0, 1]"
                )));
            }
        }
        Ok(Self { m: p.len() - 1, p })
    }

    /// The linear model `p_k = k / m`.
    pub fn linear(m: usize) -> Self {
        assert!(m >= 1, "m must be positive");
        Self {
            m,
            p: (0..=m).map(|k| T::ratio(k as i64, m as i64)).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn p_k(&self, k: usize) -> &T {
        &self.p[k]
    }

    /// `p_k - k/m`, the coefficient of the k-th Bernstein term of `2P`.
    pub fn excess(&self, k: usize) -> T {
        self.p[k].clone() - T::ratio(k as i64, self.m as i64)
    }

    /// Exact comparison `p_k == k/m` for every k.
    pub fn is_linear(&self) -> bool {
        (0..=self.m).all(|k| self.p[k] == T::ratio(k as i64, self.m as i64))
    }

    /// `p_0 = 0` and `p_m = 1`: both colours can die out.
    pub fn has_absorbing_endpoints(&self) -> bool {
        self.p[0].is_zero() && self.p[self.m] == one()
    }

    /// Colour-swapped mechanism `p'_k = 1 - p_{m-k}`.
    pub fn mirrored(&self) -> Self {
        Self {
            m: self.m,
            p: (0..=self.m)
                .map(|k| one::<T>() - self.p[self.m - k].clone())
                .collect(),
        }
    }

    pub fn with_p(&self, k: usize, value: T) -> Result<Self> {
        let mut p = self.p.clone();
        *p.get_mut(k).ok_or_else(|| {
            Error::InvalidArgument(format!("p_{k} does not exist for m = {}", self.m))
        })? = value;
        Self::new(p)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TypeAssignment<U> {
        TypeAssignment {
            m: self.m,
            p: self.p.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> TypeAssignment<f64> {
        self.map(|v| v.to_f64())
    }
}

/// Discriminant of [`FitnessModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Plain,
    Multiplicative,
    Additive,
}

/// Attachment-weight rule.
///
/// * `Plain`: weight `deg + alpha` for both colours.
/// * `Multiplicative`: weight `(deg + alpha) * phi` for blue, `deg + alpha` for red.
/// * `Additive`: weight `deg + alpha_red` for red, `deg + alpha_blue` for blue.
///
/// Fields are public; [`FitnessModel::validate`] checks the parameter ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FitnessModel<T> {
    Plain { alpha: T },
    Multiplicative { phi: T, alpha: T },
    Additive { alpha_red: T, alpha_blue: T },
}

impl<T: Scalar> FitnessModel<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            FitnessModel::Plain { .. } => ModelKind::Plain,
            FitnessModel::Multiplicative { .. } => ModelKind::Multiplicative,
            FitnessModel::Additive { .. } => ModelKind::Additive,
        }
    }

    /// Checks `alpha > -m`, `phi > 0` and `alpha_red != alpha_blue`.
    pub fn validate(&self, m: usize) -> Result<()> {
        let floor = -T::from_usize_exact(m);
        let check_alpha = |name: &str, a: &T| {
            if *a > floor {
                Ok(())
            } else {
                Err(Error::InvalidFitness(format!("{name} = {a:?} must exceed -m = -{m}")))
            }
        };
        match self {
            FitnessModel::Plain { alpha } => check_alpha("alpha", alpha),
            FitnessModel::Multiplicative { phi, alpha } => {
                if *phi <= zero() {
                    return Err(Error::InvalidFitness(format!("phi = {phi:?} must be positive")));
                }
                check_alpha("alpha", alpha)
            }
            FitnessModel::Additive {
                alpha_red,
                alpha_blue,
            } => {
                check_alpha("alpha_red", alpha_red)?;
                check_alpha("alpha_blue", alpha_blue)?;
                if alpha_red == alpha_blue {
                    return Err(Error::InvalidFitness(
                        "additive model needs alpha_red != alpha_blue".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> FitnessModel<U> {
        match self {
            FitnessModel::Plain { alpha } => FitnessModel::Plain { alpha: f(alpha) },
            FitnessModel::Multiplicative { phi, alpha } => FitnessModel::Multiplicative {
                phi: f(phi),
                alpha: f(alpha),
            },
            FitnessModel::Additive {
                alpha_red,
                alpha_blue,
            } => FitnessModel::Additive {
                alpha_red: f(alpha_red),
                alpha_blue: f(alpha_blue),
            },
        }
    }

    pub fn to_f64(&self) -> FitnessModel<f64> {
        self.map(|v| v.to_f64())
    }

    /// `(phi, alpha)` for the plain and multiplicative models (`phi = 1` when plain).
    pub fn phi_alpha(&self) -> Option<(T, T)> {
        match self {
            FitnessModel::Plain { alpha } => Some((one(), alpha.clone())),
            FitnessModel::Multiplicative { phi, alpha } => Some((phi.clone(), alpha.clone())),
            FitnessModel::Additive { .. } => None,
        }
    }
}

/// Additive parameters relabelled so that blue is the fitter colour.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdditive<T> {
    pub ta: TypeAssignment<T>,
    pub alpha_red: T,
    pub alpha_blue: T,
    /// Colours were exchanged: the normalized red is the original blue.
    pub swapped: bool,
}

/// Swaps colour roles when `alpha_red > alpha_blue`, mirroring the mechanism
/// (`p_k <- 1 - p_{m-k}`) so that `alpha_blue > alpha_red` afterwards.
pub fn normalize_additive<T: Scalar>(
    ta: &TypeAssignment<T>,
    alpha_red: &T,
    alpha_blue: &T,
) -> NormalizedAdditive<T> {
    if alpha_red > alpha_blue {
        NormalizedAdditive {
            ta: ta.mirrored(),
            alpha_red: alpha_blue.clone(),
            alpha_blue: alpha_red.clone(),
            swapped: true,
        }
    } else {
        NormalizedAdditive {
            ta: ta.clone(),
            alpha_red: alpha_red.clone(),
            alpha_blue: alpha_blue.clone(),
            swapped: false,
        }
    }
}
