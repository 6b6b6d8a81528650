//! Competition functions, their zeros, and endpoint thresholds.

pub mod competition;
pub mod thresholds;
pub mod zeros;

use serde::{Deserialize, Serialize};

pub use competition::{
    eval_p, eval_pa, eval_pm, p_polynomial, pa_polynomial, pm_polynomials, red_probability,
    weighted_share, CompetitionFunction, FunctionKind,
};
pub use thresholds::{
    endpoint_derivative, endpoint_thresholds, locate_endpoint_threshold, with_parameter, Parameter,
    StableSide, Threshold, ThresholdMethod, ThresholdReport,
};
pub use zeros::{find_zeros, ClassifiedZero, ZeroClass, ZeroSearch, ZeroSet, ZeroWarning};

use crate::error::{Error, Result};
use crate::model::{FitnessModel, ModelKind, TypeAssignment};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub m: usize,
    pub p: Vec<f64>,
    pub fitness: FitnessModel<f64>,
}

/// JSON-serializable analysis of one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub model: ModelKind,
    pub function: FunctionKind,
    pub params: ReportParams,
    pub degenerate: bool,
    pub zeros: Vec<ClassifiedZero>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdReport>,
    /// Why thresholds were not computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds_note: Option<String>,
    /// Additive model with `alpha_red > alpha_blue`: colours are relabelled
    /// before any analysis that assumes blue is fitter.
    pub colour_swap: bool,
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

/// Zeros, classes and thresholds for one parameter set.
pub fn analyze<T: Scalar>(
    ta: &TypeAssignment<T>,
    fitness: &FitnessModel<T>,
    search: ZeroSearch,
) -> Result<AnalysisReport> {
    let cf = CompetitionFunction::new(ta.clone(), fitness.clone())?;
    let zeros = find_zeros(&cf, search)?;
    let ta64 = ta.to_f64();
    let fit64 = fitness.to_f64();
    let (thresholds, thresholds_note) = match endpoint_thresholds(&ta64, &fit64) {
        Ok(r) => (Some(r), None),
        Err(Error::NotApplicable(reason)) => (None, Some(reason)),
        Err(e) => return Err(e),
    };
    let colour_swap = matches!(
        &fit64,
        FitnessModel::Additive { alpha_red, alpha_blue } if alpha_red > alpha_blue
    );
    let (num, den) = cf.to_polynomial();
    Ok(AnalysisReport {
        model: fitness.kind(),
        function: cf.kind(),
        params: ReportParams {
            m: ta.m(),
            p: ta64.p().to_vec(),
            fitness: fit64,
        },
        degenerate: zeros.is_degenerate(),
        zeros: zeros.zeros().to_vec(),
        thresholds,
        thresholds_note,
        colour_swap,
        numerator: num.to_f64().into_coeffs(),
        denominator: den.to_f64().into_coeffs(),
    })
}
