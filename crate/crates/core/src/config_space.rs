//! Feasible authentication configurations of the extended feature model.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use std::fmt;

use crate::context::ContextState;
use crate::error::DecisionError;
use crate::model::{EdgeKind, Feature, FeatureKind, GroupCardinality, ModelSpec, ATTR_AUTOMATION};

/// One selection of the feature model, summarized by the parts the engine
/// reasons about.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthConfiguration {
    /// Selected credential features, sorted by id.
    pub credentials: Vec<String>,
    /// Attribute value of the selected automation level (0 when the model
    /// declares none).
    pub automation: f64,
    /// Selected optional features and group members other than credentials
    /// and the automation level.
    pub options: BTreeSet<String>,
    /// Every selected feature, including structural ones.
    pub selected: BTreeSet<String>,
}

impl AuthConfiguration {
    pub fn from_selection(model: &ModelSpec, selected: BTreeSet<String>) -> Self {
        let mut credentials = Vec::new();
        let mut automation = 0.0;
        let mut options = BTreeSet::new();
        for id in &selected {
            let Some(f) = model.feature(id) else { continue };
            if f.is_credential() {
                credentials.push(id.clone());
            } else if let Some(v) = f.attribute_value(ATTR_AUTOMATION) {
                automation = v;
            } else if matches!(f.kind, FeatureKind::Optional | FeatureKind::GroupMember) {
                options.insert(id.clone());
            }
        }
        AuthConfiguration {
            credentials,
            automation,
            options,
            selected,
        }
    }

    pub fn two_factor(&self) -> bool {
        self.credentials.len() == 2
    }

    pub fn is_selected(&self, id: &str) -> bool {
        self.selected.contains(id)
    }

    /// Short credential label such as `Fingerprint+PlateLicense`.
    pub fn credential_label(&self) -> String {
        self.credentials.join("+")
    }

    /// Deterministic enumeration order: credential ids, then automation,
    /// then options.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.credentials
            .cmp(&other.credentials)
            .then(self.automation.total_cmp(&other.automation))
            .then_with(|| self.options.iter().cmp(other.options.iter()))
    }
}

impl fmt::Display for AuthConfiguration {
    /// `Certificate [automation=1.0; CryptoType; Signature]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [automation={:.1}", self.credential_label(), self.automation)?;
        for o in &self.options {
            write!(f, "; {o}")?;
        }
        f.write_str("]")
    }
}

/// Features made infeasible by the active context: targets of active
/// `context-disable` edges, closed under `requires`.
pub fn disabled_features(ctx: &ContextState, model: &ModelSpec) -> BTreeSet<String> {
    let mut disabled: BTreeSet<String> = model
        .edges_of(EdgeKind::ContextDisable)
        .filter(|e| ctx.is_active(&e.from))
        .map(|e| e.to.clone())
        .collect();
    loop {
        let before = disabled.len();
        for f in &model.features {
            if !disabled.contains(&f.id) && f.requires.iter().any(|r| disabled.contains(r)) {
                disabled.insert(f.id.clone());
            }
        }
        if disabled.len() == before {
            return disabled;
        }
    }
}

pub fn is_feasible(config: &AuthConfiguration, ctx: &ContextState, model: &ModelSpec) -> bool {
    infeasibility(config, &disabled_features(ctx, model), model).is_none()
}

/// First violated constraint, if any.
pub(crate) fn infeasibility(
    config: &AuthConfiguration,
    disabled: &BTreeSet<String>,
    model: &ModelSpec,
) -> Option<String> {
    let sel = &config.selected;
    let root = model.root_feature()?;
    if !sel.contains(&root.id) {
        return Some(format!("root feature {} not selected", root.id));
    }
    for id in sel {
        let Some(f) = model.feature(id) else {
            return Some(format!("unknown feature {id}"));
        };
        if disabled.contains(id) {
            return Some(format!("{id} is disabled by the context"));
        }
        if let Some(p) = &f.parent {
            if !sel.contains(p) {
                return Some(format!("{id} selected without its parent {p}"));
            }
        }
        for c in model.children_of(id) {
            let forced = matches!(c.kind, FeatureKind::Mandatory | FeatureKind::AlternativeGroup);
            if forced && !sel.contains(&c.id) {
                return Some(format!("{} is required under {id}", c.id));
            }
        }
        if let (FeatureKind::AlternativeGroup, Some(card)) = (f.kind, f.group) {
            let n = model.children_of(id).filter(|m| sel.contains(&m.id)).count() as u32;
            if n < card.min || n > card.max {
                return Some(format!("group {id} has {n} members selected, needs [{},{}]", card.min, card.max));
            }
        }
        if let Some(r) = f.requires.iter().find(|r| !sel.contains(*r)) {
            return Some(format!("{id} requires {r}"));
        }
        if let Some(x) = f.excludes.iter().find(|x| sel.contains(*x)) {
            return Some(format!("{id} excludes {x}"));
        }
    }

    let derived = AuthConfiguration::from_selection(model, sel.clone());
    if derived.credentials != config.credentials {
        return Some(format!(
            "credential list {:?} does not match the selection",
            config.credentials
        ));
    }
    if !(1..=2).contains(&derived.credentials.len()) {
        return Some(format!("{} credentials selected, need 1 or 2", derived.credentials.len()));
    }
    if derived.automation != config.automation || derived.options != config.options {
        return Some("automation/options do not match the selection".into());
    }
    None
}

/// All feasible configurations under `ctx`, each once, in canonical order.
pub fn enumerate_configs(
    ctx: &ContextState,
    model: &ModelSpec,
) -> Result<Vec<AuthConfiguration>, DecisionError> {
    let index = Index::new(model, &disabled_features(ctx, model));
    let Some(root) = index.root else {
        return Err(DecisionError::ConfigSpaceEmpty);
    };

    let mut seen = HashSet::new();
    let mut out: Vec<AuthConfiguration> = index
        .expand(root)
        .into_iter()
        .filter_map(|sel| index.pull_required(sel))
        .filter(|sel| index.feasible(sel))
        .filter(|sel| seen.insert(sel.clone()))
        .map(|sel| {
            let ids = sel.ones().map(|i| index.features[i].id.clone()).collect();
            AuthConfiguration::from_selection(model, ids)
        })
        .collect();
    if out.is_empty() {
        return Err(DecisionError::ConfigSpaceEmpty);
    }
    out.sort_by(AuthConfiguration::canonical_cmp);
    Ok(out)
}

type Selection = FixedBitSet;

/// Positional view of the feature model; selections are bitsets over
/// feature positions.
struct Index<'a> {
    features: &'a [Feature],
    root: Option<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    /// `None` marks a feature with an unresolvable requires edge.
    requires: Vec<Option<Vec<usize>>>,
    excludes: Vec<Vec<usize>>,
    disabled: Selection,
    pruned: Selection,
}

impl<'a> Index<'a> {
    fn new(model: &'a ModelSpec, disabled: &BTreeSet<String>) -> Self {
        let features = model.features.as_slice();
        let n = features.len();
        let pos: HashMap<&str, usize> = features.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect();
        let parent: Vec<Option<usize>> = features
            .iter()
            .map(|f| f.parent.as_deref().and_then(|p| pos.get(p).copied()))
            .collect();
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        let requires = features
            .iter()
            .map(|f| f.requires.iter().map(|r| pos.get(r.as_str()).copied()).collect())
            .collect();
        let excludes = features
            .iter()
            .map(|f| f.excludes.iter().filter_map(|x| pos.get(x.as_str()).copied()).collect())
            .collect();
        let mark = |ids: &BTreeSet<String>| {
            let mut set = Selection::with_capacity(n);
            for id in ids {
                if let Some(&i) = pos.get(id.as_str()) {
                    set.insert(i);
                }
            }
            set
        };
        Index {
            features,
            root: features.iter().position(|f| f.kind == FeatureKind::Root),
            parent,
            children,
            requires,
            excludes,
            disabled: mark(disabled),
            pruned: mark(&model.pruned_features()),
        }
    }

    fn single(&self, i: usize) -> Selection {
        let mut s = Selection::with_capacity(self.features.len());
        s.insert(i);
        s
    }

    /// Every way of completing the subtree of a selected feature.
    fn expand(&self, i: usize) -> Vec<Selection> {
        if self.disabled.contains(i) {
            return Vec::new();
        }
        let mut acc = vec![self.single(i)];
        for &c in &self.children[i] {
            let choices = match self.features[c].kind {
                FeatureKind::Mandatory => self.expand(c),
                FeatureKind::Optional if self.pruned.contains(c) => vec![Selection::new()],
                FeatureKind::Optional => {
                    let mut v = vec![Selection::new()];
                    v.extend(self.expand(c));
                    v
                }
                FeatureKind::AlternativeGroup => self.expand_group(c),
                FeatureKind::GroupMember | FeatureKind::Root => vec![Selection::new()],
            };
            acc = product(&acc, &choices);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    fn expand_group(&self, g: usize) -> Vec<Selection> {
        if self.disabled.contains(g) {
            return Vec::new();
        }
        let card = self.features[g].group.unwrap_or(GroupCardinality { min: 1, max: 1 });
        let members: Vec<usize> = self.children[g].iter().copied().filter(|&m| !self.disabled.contains(m)).collect();
        let expanded: Vec<Vec<Selection>> = members.iter().map(|&m| self.expand(m)).collect();

        let mut out = Vec::new();
        for k in card.min..=card.max.min(members.len() as u32) {
            for combo in combinations(members.len(), k as usize) {
                let mut acc = vec![self.single(g)];
                for &i in &combo {
                    acc = product(&acc, &expanded[i]);
                }
                out.extend(acc);
            }
        }
        out
    }

    /// Adds pruned features that selected features require. Returns `None`
    /// when a required pruned feature cannot be added.
    fn pull_required(&self, mut sel: Selection) -> Option<Selection> {
        loop {
            let mut missing = Vec::new();
            for i in sel.ones() {
                for r in self.requires[i].as_deref()? {
                    if !sel.contains(*r) && self.pruned.contains(*r) {
                        missing.push(*r);
                    }
                }
            }
            if missing.is_empty() {
                return Some(sel);
            }
            for r in missing {
                let sub = self.expand(r).into_iter().next()?;
                sel.union_with(&sub);
            }
        }
    }

    /// Same constraints as [`infeasibility`], over positions.
    fn feasible(&self, sel: &Selection) -> bool {
        let Some(root) = self.root else { return false };
        if !sel.contains(root) || !sel.is_disjoint(&self.disabled) {
            return false;
        }
        let mut credentials = 0;
        for i in sel.ones() {
            let f = &self.features[i];
            if f.parent.is_some() && !self.parent[i].is_some_and(|p| sel.contains(p)) {
                return false;
            }
            let mut members = 0;
            for &c in &self.children[i] {
                let forced = matches!(self.features[c].kind, FeatureKind::Mandatory | FeatureKind::AlternativeGroup);
                if forced && !sel.contains(c) {
                    return false;
                }
                members += sel.contains(c) as u32;
            }
            if let (FeatureKind::AlternativeGroup, Some(card)) = (f.kind, f.group) {
                if members < card.min || members > card.max {
                    return false;
                }
            }
            match &self.requires[i] {
                Some(req) if req.iter().all(|r| sel.contains(*r)) => {}
                _ => return false,
            }
            if self.excludes[i].iter().any(|x| sel.contains(*x)) {
                return false;
            }
            credentials += f.is_credential() as usize;
        }
        (1..=2).contains(&credentials)
    }
}

fn product(left: &[Selection], right: &[Selection]) -> Vec<Selection> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            let mut s = l.clone();
            s.union_with(r);
            out.push(s);
        }
    }
    out
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(3, 0).len(), 1);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(10, 2).len(), 45);
        assert!(combinations(2, 3).is_empty());
    }
}
