//! Closed-form supercriticality criteria, `E[xi(inf)] > 1`, per model class.

use serde::{Deserialize, Serialize};

use super::{AgingSpec, FitnessSpec, ModelConfig, PrefAttachSpec};

/// Which closed form produced the condition value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupercriticalFormula {
    /// No aging: the lifetime offspring mean is infinite.
    UnboundedLifetime,
    /// `E[eta] = (tau - 1) x_min / (tau - 2)`.
    ParetoFitnessMean,
    /// `E[eta] = 1 / lambda`.
    ExponentialFitnessMean,
    /// `(b / a)(e^a - 1)`.
    AffineAging,
    /// `+inf` if `lambda <= a`, else `b / (lambda - a)`.
    ExponentialAffineAging,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupercriticalityReport {
    /// Expected lifetime number of offspring of one vertex (may be `+inf`).
    pub condition_value: f64,
    pub is_supercritical: bool,
    /// `condition_value / E[M]`, the analogue for members that split the
    /// rate of their batch ([`BatchRate::Divided`](crate::model::BatchRate)).
    /// Conservative: batching and the shared batch birth time both change
    /// survival in ways this ratio does not capture.
    pub collapsed_conservative_value: f64,
    pub formula: SupercriticalFormula,
}

/// Evaluates the offspring-mean criterion for the uncollapsed process with
/// the same mechanisms.
pub fn check_supercritical(config: &ModelConfig) -> SupercriticalityReport {
    let (value, formula) = match (config.fitness(), config.aging(), config.pa()) {
        (_, AgingSpec::None, _) => (f64::INFINITY, SupercriticalFormula::UnboundedLifetime),
        (FitnessSpec::Pareto { x_min, tau }, AgingSpec::Lognormal { .. }, PrefAttachSpec::None) => {
            ((tau - 1.0) * x_min / (tau - 2.0), SupercriticalFormula::ParetoFitnessMean)
        }
        (FitnessSpec::Exponential { lambda }, AgingSpec::Lognormal { .. }, PrefAttachSpec::None) => {
            (1.0 / lambda, SupercriticalFormula::ExponentialFitnessMean)
        }
        (FitnessSpec::ConstantOne, AgingSpec::Lognormal { .. }, PrefAttachSpec::Affine { a, b }) => {
            ((b / a) * a.exp_m1(), SupercriticalFormula::AffineAging)
        }
        (FitnessSpec::Exponential { lambda }, AgingSpec::Lognormal { .. }, PrefAttachSpec::Affine { a, b }) => {
            let v = if lambda <= a { f64::INFINITY } else { b / (lambda - a) };
            (v, SupercriticalFormula::ExponentialAffineAging)
        }
        // Remaining combinations are rejected by `ModelConfig::new`; treat a
        // generic fitness with aging and no PA by its mean.
        (fitness, AgingSpec::Lognormal { .. }, PrefAttachSpec::None) => {
            (fitness.mean(), SupercriticalFormula::ExponentialFitnessMean)
        }
        (_, AgingSpec::Lognormal { .. }, PrefAttachSpec::Affine { .. }) => {
            (f64::INFINITY, SupercriticalFormula::UnboundedLifetime)
        }
    };
    SupercriticalityReport {
        condition_value: value,
        is_supercritical: value > 1.0,
        collapsed_conservative_value: value / config.outdeg().mean(),
        formula,
    }
}
