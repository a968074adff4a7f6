//! Utility scoring and selection of the best feasible configuration.
//!
//! Two engines share one ranking order. [`decide_exhaustive`] scores every
//! feasible configuration. [`decide_search`] bisects a utility threshold over
//! `[0, 1]`, answering each "is there a configuration with utility ≥ t?"
//! query by a search over credential groups pruned with admissible upper
//! bounds, then ranks only the configurations left in the final bracket.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::config_space::{disabled_features, enumerate_configs, infeasibility, AuthConfiguration};
use crate::context::ContextState;
use crate::error::DecisionError;
use crate::goals::{assess_goals_with, credential_contribution, leaf_priorities, propagate_satisfaction, GoalAssessment};
use crate::model::{EdgeKind, ModelSpec, RootCategory};
use crate::risk::{assess_risk_with, exposures, RiskAssessment};

pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_TOP_K: usize = 5;

/// Utilities (and security satisfactions) closer than this are ties.
pub const TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub goal: GoalAssessment,
    pub risk: RiskAssessment,
    pub security: f64,
    pub usability: f64,
    pub performance: f64,
    pub utility: f64,
}

/// Equal-weight mean of the three root satisfactions and `1 − risk`.
pub fn utility(security: f64, usability: f64, performance: f64, total_risk: f64) -> f64 {
    (security + usability + performance + (1.0 - total_risk)) / 4.0
}

/// Context-only inputs shared by every configuration of one decision.
struct Scorer<'a> {
    model: &'a ModelSpec,
    priorities: BTreeMap<String, f64>,
    exposures: Vec<(f64, f64)>,
}

impl<'a> Scorer<'a> {
    fn new(model: &'a ModelSpec, ctx: &ContextState) -> Self {
        Scorer {
            model,
            priorities: leaf_priorities(ctx, model),
            exposures: exposures(ctx, model),
        }
    }

    fn score(&self, config: &AuthConfiguration) -> Assessment {
        let model = self.model;
        let goal = assess_goals_with(config, &self.priorities, model);
        let risk = assess_risk_with(config, &self.exposures, model);
        let security = goal.root(model, RootCategory::Security);
        let usability = goal.root(model, RootCategory::Usability);
        let performance = goal.root(model, RootCategory::Performance);
        let utility = utility(security, usability, performance, risk.total_risk);
        Assessment {
            goal,
            risk,
            security,
            usability,
            performance,
            utility,
        }
    }
}

pub fn assess(
    model: &ModelSpec,
    ctx: &ContextState,
    config: &AuthConfiguration,
) -> Result<Assessment, DecisionError> {
    if infeasibility(config, &disabled_features(ctx, model), model).is_some() {
        return Err(DecisionError::InfeasibleConfig(config.to_string()));
    }
    Ok(Scorer::new(model, ctx).score(config))
}

fn bucket(x: f64) -> i64 {
    (x / TIE_EPSILON).round() as i64
}

/// Order among configurations of equal utility: higher security
/// satisfaction, then fewer credentials, then the smaller credential id
/// tuple, then canonical enumeration order.
pub fn tie_break(a: (&AuthConfiguration, &Assessment), b: (&AuthConfiguration, &Assessment)) -> Ordering {
    let (ca, aa) = a;
    let (cb, ab) = b;
    bucket(ab.security)
        .cmp(&bucket(aa.security))
        .then(ca.credentials.len().cmp(&cb.credentials.len()))
        .then_with(|| ca.credentials.cmp(&cb.credentials))
        .then_with(|| ca.canonical_cmp(cb))
}

/// Total ranking order; `Less` means `a` ranks ahead of `b`.
pub fn rank_cmp(a: (&AuthConfiguration, &Assessment), b: (&AuthConfiguration, &Assessment)) -> Ordering {
    bucket(b.1.utility)
        .cmp(&bucket(a.1.utility))
        .then_with(|| tie_break(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Exhaustive,
    Search,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Exhaustive => "exhaustive",
            Engine::Search => "search",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineStats {
    pub configs_evaluated: usize,
    pub iterations: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionResult {
    pub chosen: AuthConfiguration,
    pub ranked: Vec<(AuthConfiguration, Assessment)>,
    pub engine: Engine,
    pub stats: EngineStats,
}

impl DecisionResult {
    pub fn best(&self) -> &(AuthConfiguration, Assessment) {
        &self.ranked[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecideOptions {
    pub engine: Engine,
    pub top_k: usize,
    pub tolerance: f64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            engine: Engine::Exhaustive,
            top_k: DEFAULT_TOP_K,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

pub fn decide(model: &ModelSpec, ctx: &ContextState, opts: &DecideOptions) -> Result<DecisionResult, DecisionError> {
    match opts.engine {
        Engine::Exhaustive => decide_exhaustive(model, ctx, opts.top_k),
        Engine::Search => decide_search(model, ctx, opts.tolerance, opts.top_k),
    }
}

fn finish(
    mut scored: Vec<(AuthConfiguration, Assessment)>,
    top_k: usize,
    engine: Engine,
    mut stats: EngineStats,
    started: Instant,
) -> Result<DecisionResult, DecisionError> {
    scored.sort_by(|a, b| rank_cmp((&a.0, &a.1), (&b.0, &b.1)));
    scored.truncate(top_k.max(1));
    let chosen = scored
        .first()
        .map(|(c, _)| c.clone())
        .ok_or(DecisionError::ConfigSpaceEmpty)?;
    stats.elapsed = started.elapsed();
    Ok(DecisionResult {
        chosen,
        ranked: scored,
        engine,
        stats,
    })
}

/// Scores every feasible configuration and returns the top `top_k`.
pub fn decide_exhaustive(
    model: &ModelSpec,
    ctx: &ContextState,
    top_k: usize,
) -> Result<DecisionResult, DecisionError> {
    let started = Instant::now();
    let configs = enumerate_configs(ctx, model)?;
    let scorer = Scorer::new(model, ctx);
    let scored: Vec<_> = configs
        .into_iter()
        .map(|c| {
            let a = scorer.score(&c);
            (c, a)
        })
        .collect();
    let stats = EngineStats {
        configs_evaluated: scored.len(),
        iterations: 0,
        elapsed: Duration::ZERO,
    };
    finish(scored, top_k, Engine::Exhaustive, stats, started)
}

/// Configurations sharing one credential tuple, with a utility bound valid
/// for all of them.
struct Group {
    members: Vec<usize>,
    upper_bound: f64,
}

struct Searcher<'a> {
    scorer: Scorer<'a>,
    configs: Vec<AuthConfiguration>,
    groups: Vec<Group>,
    cache: BTreeMap<usize, f64>,
    assessments: BTreeMap<usize, Assessment>,
}

impl<'a> Searcher<'a> {
    fn new(model: &'a ModelSpec, ctx: &ContextState, configs: Vec<AuthConfiguration>) -> Self {
        let scorer = Scorer::new(model, ctx);
        let mut by_credentials: BTreeMap<&[String], Vec<usize>> = BTreeMap::new();
        for (i, c) in configs.iter().enumerate() {
            by_credentials.entry(&c.credentials).or_default().push(i);
        }
        let mut groups: Vec<Group> = by_credentials
            .into_values()
            .map(|members| {
                let upper_bound = group_upper_bound(&scorer, &configs, &members);
                Group { members, upper_bound }
            })
            .collect();
        // Most promising first; ties keep canonical order.
        groups.sort_by(|a, b| b.upper_bound.total_cmp(&a.upper_bound));

        Searcher {
            scorer,
            configs,
            groups,
            cache: BTreeMap::new(),
            assessments: BTreeMap::new(),
        }
    }

    fn utility_of(&mut self, i: usize) -> f64 {
        if let Some(u) = self.cache.get(&i) {
            return *u;
        }
        let a = self.scorer.score(&self.configs[i]);
        let u = a.utility;
        self.cache.insert(i, u);
        self.assessments.insert(i, a);
        u
    }

    /// A configuration with utility ≥ `threshold`, if one exists.
    fn witness(&mut self, threshold: f64) -> Option<(usize, f64)> {
        for g in 0..self.groups.len() {
            if self.groups[g].upper_bound < threshold - TIE_EPSILON {
                // Groups are sorted by bound; nothing further can qualify.
                return None;
            }
            for k in 0..self.groups[g].members.len() {
                let i = self.groups[g].members[k];
                let u = self.utility_of(i);
                if u >= threshold {
                    return Some((i, u));
                }
            }
        }
        None
    }
}

/// Admissible bound on the utility of any configuration in `members`
/// (which all share the same credentials).
fn group_upper_bound(scorer: &Scorer, configs: &[AuthConfiguration], members: &[usize]) -> f64 {
    let model = scorer.model;
    let first = &configs[members[0]];
    let reachable: BTreeSet<&str> = members
        .iter()
        .flat_map(|&i| configs[i].selected.iter().map(String::as_str))
        .collect();

    let leaf_bounds: BTreeMap<String, f64> = model
        .leaves()
        .map(|g| {
            let best_other = model
                .edges_to(EdgeKind::FeatureGoal, &g.id)
                .filter(|e| reachable.contains(e.from.as_str()))
                .filter(|e| !first.credentials.contains(&e.from))
                .map(|e| e.weight())
                .fold(credential_contribution(g, first, model), f64::max);
            (g.id.clone(), scorer.priorities[&g.id] * best_other)
        })
        .collect();
    let goals = propagate_satisfaction(&leaf_bounds, BTreeMap::new(), model);

    // Strength scaling only shrinks a reduction, so the raw weight bounds it.
    let risk_floor = model
        .attacks
        .iter()
        .zip(&scorer.exposures)
        .map(|(a, (exposure, harm))| {
            let best_reduction = model
                .edges_to(EdgeKind::FeatureReduction, &a.id)
                .filter(|e| reachable.contains(e.from.as_str()))
                .map(|e| e.weight())
                .fold(0.0, f64::max);
            (exposure - best_reduction).max(0.0) * harm
        })
        .fold(0.0, f64::max);

    utility(
        goals.root(model, RootCategory::Security),
        goals.root(model, RootCategory::Usability),
        goals.root(model, RootCategory::Performance),
        risk_floor,
    )
}

/// Bisection over the utility threshold. The chosen configuration matches
/// [`decide_exhaustive`]; `ranked` holds at most `top_k` configurations from
/// the final bracket `[lo, hi]`.
pub fn decide_search(
    model: &ModelSpec,
    ctx: &ContextState,
    tolerance: f64,
    top_k: usize,
) -> Result<DecisionResult, DecisionError> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(DecisionError::InvalidTolerance(tolerance));
    }
    let started = Instant::now();
    let configs = enumerate_configs(ctx, model)?;
    let mut s = Searcher::new(model, ctx, configs);

    let (_, mut lo) = s.witness(0.0).ok_or(DecisionError::ConfigSpaceEmpty)?;
    let mut hi = 1.0_f64;
    let mut iterations = 0;
    while hi - lo >= tolerance {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        match s.witness(mid) {
            Some((_, u)) => lo = u,
            None => hi = mid,
        }
    }

    // The optimum lies in [lo, hi]; rank everything that can reach lo.
    let candidates: Vec<usize> = s
        .groups
        .iter()
        .filter(|g| g.upper_bound >= lo - 2.0 * TIE_EPSILON)
        .flat_map(|g| g.members.iter().copied())
        .collect();
    let mut scored = Vec::new();
    for i in candidates {
        if s.utility_of(i) >= lo - 2.0 * TIE_EPSILON {
            scored.push((s.configs[i].clone(), s.assessments[&i].clone()));
        }
    }
    let stats = EngineStats {
        configs_evaluated: s.cache.len(),
        iterations,
        elapsed: Duration::ZERO,
    };
    finish(scored, top_k, Engine::Search, stats, started)
}

/// Number of bisection steps needed to shrink `[0, 1]` below `tolerance`.
pub fn max_bisection_iterations(tolerance: f64) -> usize {
    (1.0 / tolerance).log2().ceil() as usize
}
