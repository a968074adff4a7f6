//! Knowledge-layer types: goal tree, context factors, attacks, the extended
//! feature model and the weighted impact edges that connect them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Default bonus added to the averaged contribution of a two-factor
/// configuration on security-sensitive leaves.
pub const DEFAULT_TWO_FACTOR_BONUS: f64 = 0.2;

/// Qualitative impact label and its numeric interval on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImpactLabel {
    VeryNegative,
    Negative,
    Neutral,
    Positive,
    VeryPositive,
}

impl ImpactLabel {
    pub const ALL: [ImpactLabel; 5] = [
        ImpactLabel::VeryNegative,
        ImpactLabel::Negative,
        ImpactLabel::Neutral,
        ImpactLabel::Positive,
        ImpactLabel::VeryPositive,
    ];

    /// Interval bounds `(low, high)`. Every interval is open at `low` and
    /// closed at `high`, except very-negative which is closed on both ends.
    pub fn interval(self) -> (f64, f64) {
        match self {
            ImpactLabel::VeryNegative => (0.0, 0.2),
            ImpactLabel::Negative => (0.2, 0.4),
            ImpactLabel::Neutral => (0.4, 0.6),
            ImpactLabel::Positive => (0.6, 0.8),
            ImpactLabel::VeryPositive => (0.8, 1.0),
        }
    }

    pub fn contains(self, value: f64) -> bool {
        let (lo, hi) = self.interval();
        match self {
            ImpactLabel::VeryNegative => (lo..=hi).contains(&value),
            _ => value > lo && value <= hi,
        }
    }

    pub fn midpoint(self) -> f64 {
        match self {
            ImpactLabel::VeryNegative => 0.1,
            ImpactLabel::Negative => 0.3,
            ImpactLabel::Neutral => 0.5,
            ImpactLabel::Positive => 0.7,
            ImpactLabel::VeryPositive => 0.9,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ImpactLabel::VeryNegative => "very-negative",
            ImpactLabel::Negative => "negative",
            ImpactLabel::Neutral => "neutral",
            ImpactLabel::Positive => "positive",
            ImpactLabel::VeryPositive => "very-positive",
        }
    }
}

impl fmt::Display for ImpactLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ImpactLabel {
    type Err = ModelError;

    /// Accepts the kebab-case names and the `++ + 0 - --` shorthand.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "very-negative" | "--" => Ok(ImpactLabel::VeryNegative),
            "negative" | "-" => Ok(ImpactLabel::Negative),
            "neutral" | "0" => Ok(ImpactLabel::Neutral),
            "positive" | "+" => Ok(ImpactLabel::Positive),
            "very-positive" | "++" => Ok(ImpactLabel::VeryPositive),
            other => Err(ModelError::UnknownLabel(other.to_string())),
        }
    }
}

/// Per-label overrides of the default midpoint values.
pub type Calibration = BTreeMap<ImpactLabel, f64>;

/// A weight on `[0, 1]`, optionally tagged with the label it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactValue {
    value: f64,
    label: Option<ImpactLabel>,
}

impl ImpactValue {
    pub fn new(value: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(ModelError::OutOfRange(value));
        }
        Ok(ImpactValue { value, label: None })
    }

    pub fn labelled(value: f64, label: ImpactLabel) -> Result<Self, ModelError> {
        if !label.contains(value) {
            return Err(ModelError::OutsideLabel { label, value });
        }
        Ok(ImpactValue {
            value,
            label: Some(label),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn label(&self) -> Option<ImpactLabel> {
        self.label
    }
}

/// Resolves a qualitative label to its numeric weight, honoring overrides.
pub fn label_to_value(label: &str, calibration: &Calibration) -> Result<ImpactValue, ModelError> {
    let label: ImpactLabel = label.parse()?;
    let value = calibration
        .get(&label)
        .copied()
        .unwrap_or_else(|| label.midpoint());
    ImpactValue::labelled(value, label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RootCategory {
    Security,
    Usability,
    Performance,
}

impl RootCategory {
    pub const ALL: [RootCategory; 3] = [
        RootCategory::Security,
        RootCategory::Usability,
        RootCategory::Performance,
    ];
}

impl fmt::Display for RootCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub id: String,
    pub name: String,
    pub children: Vec<String>,
    pub root_category: Option<RootCategory>,
    pub security_sensitive: bool,
}

impl Goal {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextFactor {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attack {
    pub id: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Root,
    Mandatory,
    Optional,
    AlternativeGroup,
    GroupMember,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCardinality {
    pub min: u32,
    pub max: u32,
}

/// Named scalar attached to a feature (`strength`, `automation`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub value: f64,
}

pub const ATTR_STRENGTH: &str = "strength";
pub const ATTR_AUTOMATION: &str = "automation";
pub const STRENGTH_LEVELS: [f64; 3] = [0.5, 0.7, 1.0];
pub const AUTOMATION_LEVELS: [f64; 3] = [0.0, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CredentialClass {
    Know,
    Have,
    Are,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub id: String,
    pub kind: FeatureKind,
    pub parent: Option<String>,
    pub group: Option<GroupCardinality>,
    pub attribute: Option<Attribute>,
    pub requires: Vec<String>,
    pub excludes: Vec<String>,
    pub credential_class: Option<CredentialClass>,
}

impl Feature {
    pub fn is_credential(&self) -> bool {
        self.credential_class.is_some()
    }

    pub fn attribute_value(&self, name: &str) -> Option<f64> {
        self.attribute
            .as_ref()
            .filter(|a| a.name == name)
            .map(|a| a.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    /// context factor → leaf goal priority
    ContextPriority,
    /// context factor → attack likelihood
    ContextLikelihood,
    /// context factor → attack harm
    ContextHarm,
    /// context factor → feature it makes infeasible (unweighted)
    ContextDisable,
    /// feature → leaf goal satisfaction impact
    FeatureGoal,
    /// feature → attack likelihood reduction
    FeatureReduction,
}

impl EdgeKind {
    pub fn weighted(self) -> bool {
        self != EdgeKind::ContextDisable
    }

    fn endpoints(self) -> (Category, Category) {
        match self {
            EdgeKind::ContextPriority => (Category::Context, Category::Goal),
            EdgeKind::ContextLikelihood | EdgeKind::ContextHarm => {
                (Category::Context, Category::Attack)
            }
            EdgeKind::ContextDisable => (Category::Context, Category::Feature),
            EdgeKind::FeatureGoal => (Category::Feature, Category::Goal),
            EdgeKind::FeatureReduction => (Category::Feature, Category::Attack),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::ContextPriority => "context-priority",
            EdgeKind::ContextLikelihood => "context-likelihood",
            EdgeKind::ContextHarm => "context-harm",
            EdgeKind::ContextDisable => "context-disable",
            EdgeKind::FeatureGoal => "feature-goal",
            EdgeKind::FeatureReduction => "feature-reduction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Context,
    Goal,
    Attack,
    Feature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactEdge {
    pub kind: EdgeKind,
    pub from: String,
    pub to: String,
    pub impact: Option<ImpactValue>,
}

impl ImpactEdge {
    pub fn weight(&self) -> f64 {
        self.impact.map(|i| i.value()).unwrap_or(0.0)
    }
}

/// Immutable bundle of everything the engine reasons over.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub goals: Vec<Goal>,
    pub context_factors: Vec<ContextFactor>,
    pub attacks: Vec<Attack>,
    pub features: Vec<Feature>,
    pub edges: Vec<ImpactEdge>,
    pub calibration: Calibration,
    pub two_factor_bonus: f64,
    /// Named credential tuples used for side-by-side reports.
    pub comparison: Vec<Vec<String>>,
}

impl ModelSpec {
    pub fn goal(&self, id: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.id == id)
    }

    pub fn feature(&self, id: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.id == id)
    }

    pub fn root_goal(&self, category: RootCategory) -> Option<&Goal> {
        self.goals
            .iter()
            .find(|g| g.root_category == Some(category))
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Goal> {
        self.goals.iter().filter(|g| g.is_leaf())
    }

    pub fn root_feature(&self) -> Option<&Feature> {
        self.features.iter().find(|f| f.kind == FeatureKind::Root)
    }

    pub fn children_of<'a>(&'a self, parent: &'a str) -> impl Iterator<Item = &'a Feature> + 'a {
        self.features
            .iter()
            .filter(move |f| f.parent.as_deref() == Some(parent))
    }

    pub fn credentials(&self) -> impl Iterator<Item = &Feature> {
        self.features.iter().filter(|f| f.is_credential())
    }

    pub fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &ImpactEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn edges_to<'a>(&'a self, kind: EdgeKind, to: &'a str) -> impl Iterator<Item = &'a ImpactEdge> + 'a {
        self.edges_of(kind).filter(move |e| e.to == to)
    }

    /// Optional features whose subtree carries no weighted edge and that no
    /// other feature requires. They cannot move utility, so enumeration skips
    /// them; a pruned feature is still pulled in when something requires it.
    pub fn pruned_features(&self) -> BTreeSet<String> {
        let has_edges: BTreeSet<&str> = self
            .edges
            .iter()
            .filter(|e| matches!(e.kind, EdgeKind::FeatureGoal | EdgeKind::FeatureReduction))
            .map(|e| e.from.as_str())
            .collect();
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Optional)
            .filter(|f| {
                !self
                    .subtree(&f.id)
                    .iter()
                    .any(|id| has_edges.contains(id.as_str()))
            })
            .map(|f| f.id.clone())
            .collect()
    }

    /// `id` plus all of its feature descendants.
    pub fn subtree(&self, id: &str) -> Vec<String> {
        let mut out = vec![id.to_string()];
        let mut i = 0;
        while i < out.len() {
            let cur = out[i].clone();
            out.extend(self.children_of(&cur).map(|c| c.id.clone()));
            i += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub id: String,
    pub message: String,
}

impl Diagnostic {
    fn error(id: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            id: id.into(),
            message: message.into(),
        }
    }

    fn warning(id: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            id: id.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {}: {}", self.id, self.message)
    }
}

/// Structural checks over a model. Returns an empty list for a well-formed
/// model; never fails.
pub fn validate_model(model: &ModelSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    check_unique_ids(model, &mut diags);
    check_goals(model, &mut diags);
    check_features(model, &mut diags);
    check_edges(model, &mut diags);
    check_constants(model, &mut diags);
    diags
}

fn check_unique_ids(model: &ModelSpec, diags: &mut Vec<Diagnostic>) {
    let mut seen = BTreeSet::new();
    let ids = model
        .goals
        .iter()
        .map(|g| (&g.id, "goal"))
        .chain(model.context_factors.iter().map(|c| (&c.id, "context factor")))
        .chain(model.attacks.iter().map(|a| (&a.id, "attack")))
        .chain(model.features.iter().map(|f| (&f.id, "feature")));
    for (id, what) in ids {
        if !seen.insert(id.as_str()) {
            diags.push(Diagnostic::error(id.clone(), format!("duplicate id (redeclared as {what})")));
        }
    }
}

fn check_goals(model: &ModelSpec, diags: &mut Vec<Diagnostic>) {
    let ids: BTreeSet<&str> = model.goals.iter().map(|g| g.id.as_str()).collect();
    let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
    for g in &model.goals {
        for c in &g.children {
            if !ids.contains(c.as_str()) {
                diags.push(Diagnostic::error(c.clone(), format!("unknown child goal of {}", g.id)));
                continue;
            }
            if let Some(prev) = parent_of.insert(c.as_str(), g.id.as_str()) {
                diags.push(Diagnostic::error(
                    c.clone(),
                    format!("goal has two parents ({prev}, {})", g.id),
                ));
            }
        }
    }

    for category in RootCategory::ALL {
        let roots: Vec<&Goal> = model
            .goals
            .iter()
            .filter(|g| g.root_category == Some(category))
            .collect();
        match roots.len() {
            0 => diags.push(Diagnostic::error(
                category.to_string(),
                format!("missing root goal with root_category {category}"),
            )),
            1 => {}
            _ => diags.push(Diagnostic::error(
                roots[1].id.clone(),
                format!("duplicate root_category {category}"),
            )),
        }
    }

    for g in &model.goals {
        let is_root = g.root_category.is_some();
        if is_root && parent_of.contains_key(g.id.as_str()) {
            diags.push(Diagnostic::error(g.id.clone(), "root goal has a parent"));
        }
        if !is_root && !parent_of.contains_key(g.id.as_str()) {
            diags.push(Diagnostic::error(
                g.id.clone(),
                "goal is neither a root nor a child of another goal",
            ));
        }
    }

    // Walk up from every goal; a cycle never reaches a root.
    for g in &model.goals {
        let mut cur = g.id.as_str();
        let mut steps = 0;
        while let Some(p) = parent_of.get(cur) {
            cur = p;
            steps += 1;
            if steps > model.goals.len() {
                diags.push(Diagnostic::error(g.id.clone(), "goal refinement cycle"));
                break;
            }
        }
    }

    for g in model.goals.iter().filter(|g| g.security_sensitive) {
        if !g.is_leaf() {
            diags.push(Diagnostic::error(
                g.id.clone(),
                "security_sensitive is only allowed on leaf goals",
            ));
            continue;
        }
        let mut cur = g.id.as_str();
        let mut steps = 0;
        while let Some(p) = parent_of.get(cur) {
            cur = p;
            steps += 1;
            if steps > model.goals.len() {
                break;
            }
        }
        let under_security = model
            .goal(cur)
            .is_some_and(|r| r.root_category == Some(RootCategory::Security));
        if !under_security {
            diags.push(Diagnostic::error(
                g.id.clone(),
                "security_sensitive leaf is not under the Security root",
            ));
        }
    }
}

fn check_features(model: &ModelSpec, diags: &mut Vec<Diagnostic>) {
    let roots: Vec<&Feature> = model
        .features
        .iter()
        .filter(|f| f.kind == FeatureKind::Root)
        .collect();
    match roots.len() {
        0 => diags.push(Diagnostic::error("features", "feature model has no root")),
        1 => {}
        _ => diags.push(Diagnostic::error(roots[1].id.clone(), "second root feature")),
    }

    for f in &model.features {
        match (&f.parent, f.kind) {
            (Some(_), FeatureKind::Root) => {
                diags.push(Diagnostic::error(f.id.clone(), "root feature has a parent"))
            }
            (None, FeatureKind::Root) => {}
            (None, _) => diags.push(Diagnostic::error(f.id.clone(), "feature has no parent")),
            (Some(p), kind) => match model.feature(p) {
                None => diags.push(Diagnostic::error(
                    p.clone(),
                    format!("unknown parent feature of {}", f.id),
                )),
                Some(parent) => {
                    let in_group = parent.kind == FeatureKind::AlternativeGroup;
                    if kind == FeatureKind::GroupMember && !in_group {
                        diags.push(Diagnostic::error(
                            f.id.clone(),
                            "group-member's parent is not an alternative-group",
                        ));
                    }
                    if kind != FeatureKind::GroupMember && in_group {
                        diags.push(Diagnostic::error(
                            f.id.clone(),
                            "children of an alternative-group must be group-members",
                        ));
                    }
                }
            },
        }

        if f.kind == FeatureKind::AlternativeGroup {
            match f.group {
                None => diags.push(Diagnostic::error(f.id.clone(), "alternative-group without cardinality")),
                Some(GroupCardinality { min, max }) => {
                    let members = model.children_of(&f.id).count() as u32;
                    if min > max || max == 0 {
                        diags.push(Diagnostic::error(
                            f.id.clone(),
                            format!("invalid group cardinality [{min},{max}]"),
                        ));
                    } else if members < min {
                        diags.push(Diagnostic::error(
                            f.id.clone(),
                            format!("group needs {min} members but has {members}"),
                        ));
                    }
                }
            }
        } else if f.group.is_some() {
            diags.push(Diagnostic::error(f.id.clone(), "cardinality on a non-group feature"));
        }

        for r in f.requires.iter().chain(&f.excludes) {
            if model.feature(r).is_none() {
                diags.push(Diagnostic::error(
                    r.clone(),
                    format!("unknown feature referenced by constraint on {}", f.id),
                ));
            }
        }

        if let Some(attr) = &f.attribute {
            let allowed: &[f64] = match attr.name.as_str() {
                ATTR_STRENGTH => &STRENGTH_LEVELS,
                ATTR_AUTOMATION => &AUTOMATION_LEVELS,
                _ => &[],
            };
            if !(0.0..=1.0).contains(&attr.value) {
                diags.push(Diagnostic::error(f.id.clone(), "attribute value outside [0,1]"));
            } else if !allowed.is_empty() && !allowed.contains(&attr.value) {
                diags.push(Diagnostic::error(
                    f.id.clone(),
                    format!("{} must be one of {allowed:?}", attr.name),
                ));
            }
        }
    }

    // Reachability from the root; also catches parent cycles.
    if let Some(root) = roots.first() {
        let reachable: BTreeSet<String> = model.subtree(&root.id).into_iter().collect();
        for f in &model.features {
            if !reachable.contains(&f.id) && f.kind != FeatureKind::Root && f.parent.is_some() {
                diags.push(Diagnostic::error(f.id.clone(), "feature not reachable from the root"));
            }
        }
    }

    if model.credentials().next().is_none() {
        diags.push(Diagnostic::warning("features", "no credential features declared"));
    }
}

fn check_edges(model: &ModelSpec, diags: &mut Vec<Diagnostic>) {
    let category_of = |id: &str| -> Option<Category> {
        if model.goal(id).is_some() {
            Some(Category::Goal)
        } else if model.context_factors.iter().any(|c| c.id == id) {
            Some(Category::Context)
        } else if model.attacks.iter().any(|a| a.id == id) {
            Some(Category::Attack)
        } else if model.feature(id).is_some() {
            Some(Category::Feature)
        } else {
            None
        }
    };

    let mut seen = BTreeSet::new();
    for e in &model.edges {
        let (want_from, want_to) = e.kind.endpoints();
        for (id, want) in [(&e.from, want_from), (&e.to, want_to)] {
            match category_of(id) {
                None => diags.push(Diagnostic::error(
                    id.clone(),
                    format!("{} edge references unknown id", e.kind.as_str()),
                )),
                Some(c) if c != want => diags.push(Diagnostic::error(
                    id.clone(),
                    format!("{} edge endpoint has the wrong category", e.kind.as_str()),
                )),
                Some(_) => {}
            }
        }
        if e.kind == EdgeKind::ContextPriority || e.kind == EdgeKind::FeatureGoal {
            if let Some(g) = model.goal(&e.to) {
                if !g.is_leaf() {
                    diags.push(Diagnostic::error(
                        e.to.clone(),
                        format!("{} edge must target a leaf goal", e.kind.as_str()),
                    ));
                }
            }
        }
        match (e.kind.weighted(), e.impact) {
            (true, None) => diags.push(Diagnostic::error(
                format!("{}->{}", e.from, e.to),
                "weighted edge without impact",
            )),
            (false, Some(_)) => diags.push(Diagnostic::error(
                format!("{}->{}", e.from, e.to),
                "context-disable edges carry no impact",
            )),
            (true, Some(imp)) => {
                if !(0.0..=1.0).contains(&imp.value()) {
                    diags.push(Diagnostic::error(
                        format!("{}->{}", e.from, e.to),
                        "impact outside [0,1]",
                    ));
                }
            }
            (false, None) => {}
        }
        if !seen.insert((e.kind, e.from.as_str(), e.to.as_str())) {
            diags.push(Diagnostic::error(
                format!("{}->{}", e.from, e.to),
                format!("duplicate {} edge", e.kind.as_str()),
            ));
        }
    }
}

fn check_constants(model: &ModelSpec, diags: &mut Vec<Diagnostic>) {
    for (label, value) in &model.calibration {
        if !label.contains(*value) {
            diags.push(Diagnostic::error(
                label.as_str(),
                format!("calibration {value} lies outside the label's interval"),
            ));
        }
    }
    if !(0.0..=1.0).contains(&model.two_factor_bonus) {
        diags.push(Diagnostic::error("two_factor_bonus", "bonus must lie in [0,1]"));
    }
    for (i, tuple) in model.comparison.iter().enumerate() {
        for id in tuple {
            if !model.feature(id).is_some_and(|f| f.is_credential()) {
                diags.push(Diagnostic::error(
                    id.clone(),
                    format!("comparison entry {i} names a non-credential feature"),
                ));
            }
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
