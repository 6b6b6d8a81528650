//! Endpoint phase-transition thresholds.
//!
//! A zero at an endpoint is stable iff the competition function's derivative
//! there is negative. Closed forms cover the multiplicative model with
//! `alpha = 0` and the additive model with `m = 2`; every other case is
//! located by bisection on the sign of that derivative.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::competition::CompetitionFunction;
use crate::error::{Error, Result};
use crate::model::{FitnessModel, TypeAssignment};

/// A scalar model parameter that can be varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Parameter {
    Phi,
    Alpha,
    AlphaRed,
    AlphaBlue,
    /// `p_k`.
    P(usize),
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::Phi => write!(f, "phi"),
            Parameter::Alpha => write!(f, "alpha"),
            Parameter::AlphaRed => write!(f, "alpha_red"),
            Parameter::AlphaBlue => write!(f, "alpha_blue"),
            Parameter::P(k) => write!(f, "p{k}"),
        }
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Parameter::Phi),
            "alpha" => Ok(Parameter::Alpha),
            "alpha_red" | "alpha1" => Ok(Parameter::AlphaRed),
            "alpha_blue" | "alpha2" => Ok(Parameter::AlphaBlue),
            _ => s
                .strip_prefix('p')
                .and_then(|k| k.parse().ok())
                .map(Parameter::P)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter {s:?}"))),
        }
    }
}

impl TryFrom<String> for Parameter {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Parameter> for String {
    fn from(p: Parameter) -> String {
        p.to_string()
    }
}

/// Returns `(ta, fitness)` with `param` set to `value`.
pub fn with_parameter(
    ta: &TypeAssignment<f64>,
    fitness: &FitnessModel<f64>,
    param: Parameter,
    value: f64,
) -> Result<(TypeAssignment<f64>, FitnessModel<f64>)> {
    let mismatch = || {
        Error::InvalidArgument(format!(
            "parameter {param} does not apply to the {:?} model",
            fitness.kind()
        ))
    };
    let fitness = match (param, fitness.clone()) {
        (Parameter::P(k), f) => return Ok((ta.with_p(k, value)?, f)),
        (Parameter::Phi, FitnessModel::Multiplicative { alpha, .. }) => {
            FitnessModel::Multiplicative { phi: value, alpha }
        }
        (Parameter::Phi, FitnessModel::Plain { alpha }) => {
            FitnessModel::Multiplicative { phi: value, alpha }
        }
        (Parameter::Alpha, FitnessModel::Multiplicative { phi, .. }) => {
            FitnessModel::Multiplicative { phi, alpha: value }
        }
        (Parameter::Alpha, FitnessModel::Plain { .. }) => FitnessModel::Plain { alpha: value },
        (Parameter::AlphaRed, FitnessModel::Additive { alpha_blue, .. }) => FitnessModel::Additive {
            alpha_red: value,
            alpha_blue,
        },
        (Parameter::AlphaBlue, FitnessModel::Additive { alpha_red, .. }) => FitnessModel::Additive {
            alpha_red,
            alpha_blue: value,
        },
        _ => return Err(mismatch()),
    };
    Ok((ta.clone(), fitness))
}

/// Derivative of the competition function at `endpoint` (0 or 1).
pub fn endpoint_derivative(ta: &TypeAssignment<f64>, fitness: &FitnessModel<f64>, endpoint: f64) -> f64 {
    CompetitionFunction::new_unchecked(ta.clone(), fitness.clone()).derivative_at(endpoint)
}

/// Which side of the threshold makes the endpoint zero stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StableSide {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// 0 or 1.
    pub endpoint: f64,
    pub parameter: Parameter,
    pub value: f64,
    pub stable_when: StableSide,
    pub method: ThresholdMethod,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub thresholds: Vec<Threshold>,
}

impl ThresholdReport {
    pub fn find(&self, endpoint: f64, parameter: Parameter) -> Option<&Threshold> {
        self.thresholds
            .iter()
            .find(|t| t.endpoint == endpoint && t.parameter == parameter)
    }
}

/// Bisects the sign of the endpoint derivative in `param` over `[lo, hi]`.
///
/// Returns `None` when the sign does not change on the bracket.
pub fn locate_endpoint_threshold(
    ta: &TypeAssignment<f64>,
    fitness: &FitnessModel<f64>,
    param: Parameter,
    endpoint: f64,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let g = |v: f64| -> Result<f64> {
        let (t, f) = with_parameter(ta, fitness, param, v)?;
        Ok(endpoint_derivative(&t, &f, endpoint))
    };
    let (mut a, mut b) = (lo, hi);
    let ga = g(a)?;
    let gb = g(b)?;
    if ga == 0.0 {
        return Ok(Some(a));
    }
    if gb == 0.0 {
        return Ok(Some(b));
    }
    if (ga > 0.0) == (gb > 0.0) {
        return Ok(None);
    }
    let positive_at_a = ga > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(Some(mid));
        }
        if (gm > 0.0) == positive_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

fn stable_side(
    ta: &TypeAssignment<f64>,
    fitness: &FitnessModel<f64>,
    param: Parameter,
    endpoint: f64,
    value: f64,
) -> Result<StableSide> {
    let step = 1e-6 * value.abs().max(1.0);
    let (t, f) = with_parameter(ta, fitness, param, value + step)?;
    Ok(if endpoint_derivative(&t, &f, endpoint) < 0.0 {
        StableSide::Above
    } else {
        StableSide::Below
    })
}

/// Thresholds at which the zeros at 0 and 1 change stability.
///
/// Requires `p_0 = 0` and `p_m = 1` so that both endpoints are zeros.
pub fn endpoint_thresholds(ta: &TypeAssignment<f64>, fitness: &FitnessModel<f64>) -> Result<ThresholdReport> {
    let m = ta.m();
    if *ta.p_k(0) != 0.0 {
        return Err(Error::NotApplicable(format!(
            "p_0 = {} > 0: zero is not a zero of the competition function",
            ta.p_k(0)
        )));
    }
    if *ta.p_k(m) != 1.0 {
        return Err(Error::NotApplicable(format!(
            "p_m = {} < 1: one is not a zero of the competition function",
            ta.p_k(m)
        )));
    }
    fitness.validate(m)?;
    let mut out = Vec::new();
    let mut push = |endpoint: f64, parameter, value: f64, stable_when, method| {
        out.push(Threshold {
            endpoint,
            parameter,
            value,
            stable_when,
            method,
        })
    };
    let mf = m as f64;
    match fitness {
        FitnessModel::Plain { .. } => {
            return Err(Error::NotApplicable(
                "the plain model has no fitness parameter to vary".into(),
            ))
        }
        FitnessModel::Multiplicative { phi, alpha } => {
            if *alpha == 0.0 {
                let p1 = *ta.p_k(1);
                let pm1 = *ta.p_k(m - 1);
                push(0.0, Parameter::Phi, (mf * p1 + 1.0) / 2.0, StableSide::Above, ThresholdMethod::ClosedForm);
                push(1.0, Parameter::Phi, 2.0 / (mf * (1.0 - pm1) + 1.0), StableSide::Below, ThresholdMethod::ClosedForm);
                if m == 2 {
                    push(0.0, Parameter::P(1), phi - 0.5, StableSide::Below, ThresholdMethod::ClosedForm);
                    push(1.0, Parameter::P(1), 1.5 - 1.0 / phi, StableSide::Above, ThresholdMethod::ClosedForm);
                }
            } else {
                for endpoint in [0.0, 1.0] {
                    if let Some(v) =
                        locate_endpoint_threshold(ta, fitness, Parameter::Phi, endpoint, 1e-9, 1e4)?
                    {
                        let side = stable_side(ta, fitness, Parameter::Phi, endpoint, v)?;
                        push(endpoint, Parameter::Phi, v, side, ThresholdMethod::Numeric);
                    }
                }
            }
        }
        FitnessModel::Additive {
            alpha_red,
            alpha_blue,
        } => {
            let (a1, a2) = (*alpha_red, *alpha_blue);
            if m == 2 {
                push(0.0, Parameter::P(1), 0.5 + (a2 - a1) / (2.0 * a1 + 4.0), StableSide::Below, ThresholdMethod::ClosedForm);
                push(1.0, Parameter::P(1), 0.5 + (a2 - a1) / (2.0 * a2 + 4.0), StableSide::Above, ThresholdMethod::ClosedForm);
            } else {
                let floor = -mf + 1e-9;
                for endpoint in [0.0, 1.0] {
                    for param in [Parameter::AlphaBlue, Parameter::AlphaRed] {
                        if let Some(v) = locate_endpoint_threshold(ta, fitness, param, endpoint, floor, 1e4)? {
                            let side = stable_side(ta, fitness, param, endpoint, v)?;
                            push(endpoint, param, v, side, ThresholdMethod::Numeric);
                        }
                    }
                }
            }
        }
    }
    Ok(ThresholdReport { thresholds: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ta(p: &[f64]) -> TypeAssignment<f64> {
        TypeAssignment::new(p.to_vec()).unwrap()
    }

    fn mult0() -> FitnessModel<f64> {
        FitnessModel::Multiplicative { phi: 1.1, alpha: 0.0 }
    }

    #[test]
    fn multiplicative_closed_forms() {
        let r = endpoint_thresholds(&ta(&[0.0, 0.5, 0.5, 1.0]), &mult0()).unwrap();
        assert_eq!(r.find(0.0, Parameter::Phi).unwrap().value, 1.25);
        let r = endpoint_thresholds(&ta(&[0.0, 0.0, 0.9, 1.0]), &mult0()).unwrap();
        assert!((r.find(1.0, Parameter::Phi).unwrap().value - 20.0 / 13.0).abs() < 1e-15);
        let r = endpoint_thresholds(&ta(&[0.0, 0.25, 0.75, 1.0]), &mult0()).unwrap();
        assert!((r.find(1.0, Parameter::Phi).unwrap().value - 8.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn not_applicable_without_absorbing_endpoints() {
        let err = endpoint_thresholds(&ta(&[0.1, 0.5, 1.0]), &mult0()).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
        let err = endpoint_thresholds(&ta(&[0.0, 0.5, 0.9]), &mult0()).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)));
    }

    #[test]
    fn numeric_matches_closed_form_for_alpha_zero() {
        let t = ta(&[0.0, 0.3, 0.8, 1.0]);
        let closed = endpoint_thresholds(&t, &mult0()).unwrap();
        for endpoint in [0.0, 1.0] {
            let v = locate_endpoint_threshold(&t, &mult0(), Parameter::Phi, endpoint, 1e-9, 1e4)
                .unwrap()
                .unwrap();
            assert!((v - closed.find(endpoint, Parameter::Phi).unwrap().value).abs() < 1e-9);
        }
    }

    #[test]
    fn numeric_alpha_threshold_matches_derived_formula() {
        // With alpha != 0 the derivative at 0 is [g (m p1 - 1)/2 + 1]/phi - 1,
        // g = 2(m+alpha)/(2m+alpha), so the threshold is 1 + g (m p1 - 1)/2.
        let t = ta(&[0.0, 0.6, 0.7, 1.0]);
        let alpha = 1.5;
        let f = FitnessModel::Multiplicative { phi: 1.2, alpha };
        let r = endpoint_thresholds(&t, &f).unwrap();
        let g = 2.0 * (3.0 + alpha) / (6.0 + alpha);
        let expected = 1.0 + g * (3.0 * 0.6 - 1.0) / 2.0;
        let got = r.find(0.0, Parameter::Phi).unwrap();
        assert_eq!(got.method, ThresholdMethod::Numeric);
        assert_eq!(got.stable_when, StableSide::Above);
        assert!((got.value - expected).abs() < 1e-9, "{} vs {expected}", got.value);
    }

    #[test]
    fn additive_m3_thresholds() {
        let t = ta(&[0.0, 0.5, 0.5, 1.0]);
        let f = FitnessModel::Additive { alpha_red: 0.0, alpha_blue: 1.0 };
        let r = endpoint_thresholds(&t, &f).unwrap();
        let th = r.find(0.0, Parameter::AlphaBlue).unwrap();
        assert!((th.value - 1.5).abs() < 1e-9);
        assert_eq!(th.stable_when, StableSide::Above);
    }

    #[test]
    fn parameter_names_round_trip() {
        for p in [Parameter::Phi, Parameter::Alpha, Parameter::AlphaRed, Parameter::AlphaBlue, Parameter::P(2)] {
            assert_eq!(p.to_string().parse::<Parameter>().unwrap(), p);
        }
        assert!("q1".parse::<Parameter>().is_err());
    }
}
