//! Attack likelihood, partial and total risk.

use std::collections::BTreeMap;

use crate::config_space::AuthConfiguration;
use crate::context::ContextState;
use crate::model::{Attack, EdgeKind, ModelSpec, ATTR_STRENGTH};

/// Harm assumed for an attack with no active harm edge. Also a floor:
/// switching on a factor with a milder harm edge must not lower the risk.
pub const DEFAULT_HARM: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RiskAssessment {
    pub likelihoods: BTreeMap<String, f64>,
    pub partial_risks: BTreeMap<String, f64>,
    pub total_risk: f64,
}

/// Strength attribute of a selected feature under `feature`, if any.
/// Scales that feature's reduction coefficient.
fn strength_scale(model: &ModelSpec, feature: &str, config: &AuthConfiguration) -> f64 {
    config
        .selected
        .iter()
        .filter_map(|id| model.feature(id))
        .filter(|f| f.id != feature)
        .filter_map(|f| f.attribute_value(ATTR_STRENGTH).map(|v| (f, v)))
        .find(|(f, _)| descends_from(model, f, feature))
        .map(|(_, v)| v)
        .unwrap_or(1.0)
}

fn descends_from(model: &ModelSpec, f: &crate::model::Feature, ancestor: &str) -> bool {
    let mut cur = f.parent.as_deref();
    while let Some(p) = cur {
        if p == ancestor {
            return true;
        }
        cur = model.feature(p).and_then(|x| x.parent.as_deref());
    }
    false
}

/// Largest reduction any selected feature applies to `attack`.
pub fn max_reduction(attack: &str, config: &AuthConfiguration, model: &ModelSpec) -> f64 {
    model
        .edges_to(EdgeKind::FeatureReduction, attack)
        .filter(|e| config.is_selected(&e.from))
        .map(|e| e.weight() * strength_scale(model, &e.from, config))
        .fold(0.0, f64::max)
}

/// Largest weight among active context edges of `kind` into `attack`.
pub(crate) fn max_active(kind: EdgeKind, attack: &str, ctx: &ContextState, model: &ModelSpec) -> Option<f64> {
    model
        .edges_to(kind, attack)
        .filter(|e| ctx.is_active(&e.from))
        .map(|e| e.weight())
        .reduce(f64::max)
}

/// `max(0, max active context likelihood − max enabled feature reduction)`.
pub fn attack_likelihood(
    attack: &Attack,
    ctx: &ContextState,
    config: &AuthConfiguration,
    model: &ModelSpec,
) -> f64 {
    let exposure = max_active(EdgeKind::ContextLikelihood, &attack.id, ctx, model).unwrap_or(0.0);
    (exposure - max_reduction(&attack.id, config, model)).max(0.0)
}

/// `likelihood × harm`, harm being the largest active harm impact and
/// never below [`DEFAULT_HARM`].
pub fn partial_risk(attack: &Attack, likelihood: f64, ctx: &ContextState, model: &ModelSpec) -> f64 {
    likelihood * harm(&attack.id, ctx, model)
}

fn harm(attack: &str, ctx: &ContextState, model: &ModelSpec) -> f64 {
    max_active(EdgeKind::ContextHarm, attack, ctx, model).map_or(DEFAULT_HARM, |h| h.max(DEFAULT_HARM))
}

pub fn total_risk<'a>(partial_risks: impl IntoIterator<Item = &'a f64>) -> f64 {
    partial_risks.into_iter().copied().fold(0.0, f64::max)
}

pub fn assess_risk(config: &AuthConfiguration, ctx: &ContextState, model: &ModelSpec) -> RiskAssessment {
    assess_risk_with(config, &exposures(ctx, model), model)
}

/// Context-only part of each attack: its likelihood before any reduction
/// and its harm, in model order.
pub(crate) fn exposures(ctx: &ContextState, model: &ModelSpec) -> Vec<(f64, f64)> {
    model
        .attacks
        .iter()
        .map(|a| {
            let exposure = max_active(EdgeKind::ContextLikelihood, &a.id, ctx, model).unwrap_or(0.0);
            (exposure, harm(&a.id, ctx, model))
        })
        .collect()
}

pub(crate) fn assess_risk_with(
    config: &AuthConfiguration,
    exposures: &[(f64, f64)],
    model: &ModelSpec,
) -> RiskAssessment {
    let mut likelihoods = BTreeMap::new();
    let mut partial_risks = BTreeMap::new();
    for (a, (exposure, harm)) in model.attacks.iter().zip(exposures) {
        let l = (exposure - max_reduction(&a.id, config, model)).max(0.0);
        partial_risks.insert(a.id.clone(), l * harm);
        likelihoods.insert(a.id.clone(), l);
    }
    let total_risk = total_risk(partial_risks.values());
    RiskAssessment {
        likelihoods,
        partial_risks,
        total_risk,
    }
}
