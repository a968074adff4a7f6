//! Leaf priorities from context and goal satisfaction from the enabled
//! features.

use std::collections::BTreeMap;

use crate::config_space::AuthConfiguration;
use crate::context::ContextState;
use crate::model::{EdgeKind, Goal, ModelSpec, RootCategory};

/// Priority of a leaf goal with no active context influence.
pub const DEFAULT_PRIORITY: f64 = 0.5;

/// Impact of a credential on a goal it has no edge to.
pub const DEFAULT_CREDENTIAL_IMPACT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct GoalAssessment {
    pub priorities: BTreeMap<String, f64>,
    pub satisfactions: BTreeMap<String, f64>,
}

impl GoalAssessment {
    pub fn satisfaction(&self, goal: &str) -> f64 {
        self.satisfactions.get(goal).copied().unwrap_or(0.0)
    }

    pub fn root(&self, model: &ModelSpec, category: RootCategory) -> f64 {
        model
            .root_goal(category)
            .map(|g| self.satisfaction(&g.id))
            .unwrap_or(0.0)
    }
}

/// Max over active context factors of their priority impact on `goal`;
/// [`DEFAULT_PRIORITY`] when none applies.
pub fn compute_priority(goal: &Goal, ctx: &ContextState, model: &ModelSpec) -> f64 {
    model
        .edges_to(EdgeKind::ContextPriority, &goal.id)
        .filter(|e| ctx.is_active(&e.from))
        .map(|e| e.weight())
        .reduce(f64::max)
        .unwrap_or(DEFAULT_PRIORITY)
}

fn feature_impact(model: &ModelSpec, feature: &str, goal: &str) -> Option<f64> {
    model
        .edges_to(EdgeKind::FeatureGoal, goal)
        .find(|e| e.from == feature)
        .map(|e| e.weight())
}

/// What the selected credential(s) contribute to `goal`. Two credentials
/// are averaged and, on security-sensitive leaves, receive the two-factor
/// bonus; the result is capped at 1.
pub fn credential_contribution(goal: &Goal, config: &AuthConfiguration, model: &ModelSpec) -> f64 {
    let impacts: Vec<f64> = config
        .credentials
        .iter()
        .map(|c| feature_impact(model, c, &goal.id).unwrap_or(DEFAULT_CREDENTIAL_IMPACT))
        .collect();
    match impacts.as_slice() {
        [] => 0.0,
        [single] => *single,
        many => {
            let mean = many.iter().sum::<f64>() / many.len() as f64;
            let bonus = if goal.security_sensitive {
                model.two_factor_bonus
            } else {
                0.0
            };
            (mean + bonus).min(1.0)
        }
    }
}

/// `priority × max(credential contribution, impact of any other enabled
/// feature on the goal)`.
pub fn leaf_satisfaction(
    goal: &Goal,
    config: &AuthConfiguration,
    ctx: &ContextState,
    model: &ModelSpec,
) -> f64 {
    let priority = compute_priority(goal, ctx, model);
    leaf_satisfaction_with_priority(goal, priority, config, model)
}

pub(crate) fn leaf_satisfaction_with_priority(
    goal: &Goal,
    priority: f64,
    config: &AuthConfiguration,
    model: &ModelSpec,
) -> f64 {
    let credential = credential_contribution(goal, config, model);
    let other = model
        .edges_to(EdgeKind::FeatureGoal, &goal.id)
        .filter(|e| config.is_selected(&e.from))
        .filter(|e| !config.credentials.contains(&e.from))
        .map(|e| e.weight())
        .fold(credential, f64::max);
    priority * other
}

/// Fills in every non-leaf goal as the minimum of its children.
pub fn propagate_satisfaction(
    leaf_values: &BTreeMap<String, f64>,
    priorities: BTreeMap<String, f64>,
    model: &ModelSpec,
) -> GoalAssessment {
    let mut satisfactions = BTreeMap::new();
    for g in &model.goals {
        satisfy(&g.id, model, leaf_values, &mut satisfactions);
    }
    GoalAssessment {
        priorities,
        satisfactions,
    }
}

fn satisfy(
    id: &str,
    model: &ModelSpec,
    leaves: &BTreeMap<String, f64>,
    memo: &mut BTreeMap<String, f64>,
) -> f64 {
    if let Some(v) = memo.get(id) {
        return *v;
    }
    let Some(goal) = model.goal(id) else { return 0.0 };
    let value = if goal.is_leaf() {
        leaves.get(id).copied().unwrap_or(0.0)
    } else {
        goal.children
            .iter()
            .map(|c| satisfy(c, model, leaves, memo))
            .fold(f64::INFINITY, f64::min)
    };
    memo.insert(id.to_string(), value);
    value
}

/// Priorities and satisfactions for every goal under `config`.
pub fn assess_goals(config: &AuthConfiguration, ctx: &ContextState, model: &ModelSpec) -> GoalAssessment {
    assess_goals_with(config, &leaf_priorities(ctx, model), model)
}

pub(crate) fn leaf_priorities(ctx: &ContextState, model: &ModelSpec) -> BTreeMap<String, f64> {
    model
        .leaves()
        .map(|g| (g.id.clone(), compute_priority(g, ctx, model)))
        .collect()
}

pub(crate) fn assess_goals_with(
    config: &AuthConfiguration,
    priorities: &BTreeMap<String, f64>,
    model: &ModelSpec,
) -> GoalAssessment {
    let leaf_values = model
        .leaves()
        .map(|g| {
            let s = leaf_satisfaction_with_priority(g, priorities[&g.id], config, model);
            (g.id.clone(), s)
        })
        .collect();
    propagate_satisfaction(&leaf_values, priorities.clone(), model)
}
