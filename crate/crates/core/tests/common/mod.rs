//! Random model generator and a from-scratch reference evaluator shared by
//! the integration suites. The reference side works directly on the JSON
//! document and never calls into the engine.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use adaptauth::{
    assess, decide_exhaustive, decide_search, enumerate_configs, parse_context, parse_model, AuthConfiguration,
    DecisionError, ModelSpec,
};

const EPS: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

pub const LABELS: [(&str, f64); 5] = [
    ("very-negative", 0.1),
    ("negative", 0.3),
    ("neutral", 0.5),
    ("positive", 0.7),
    ("very-positive", 0.9),
];

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_features: usize,
    pub max_factors: usize,
    pub max_attacks: usize,
    pub max_leaves: usize,
    /// Allow a strength group, an optional add-on and an excludes pair.
    pub rich: bool,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        max_features: 8,
        max_factors: 4,
        max_attacks: 3,
        max_leaves: 6,
        rich: true,
    };
    /// Smallest instances: at most five features.
    pub const TINY: Shape = Shape {
        max_features: 5,
        max_factors: 3,
        max_attacks: 2,
        max_leaves: 6,
        rich: false,
    };
    /// Up to nine features, so the power set of non-root features stays
    /// at 256 selections.
    pub const CARTESIAN: Shape = Shape {
        max_features: 9,
        max_factors: 4,
        max_attacks: 3,
        max_leaves: 6,
        rich: true,
    };
}

fn weight(rng: &mut ChaCha8Rng) -> Value {
    if rng.gen_bool(0.4) {
        let (label, _) = LABELS[rng.gen_range(0..LABELS.len())];
        json!({ "label": label })
    } else {
        let v = (rng.gen_range(0.0..=1.0f64) * 1000.0).round() / 1000.0;
        json!({ "value": v })
    }
}

fn edge(kind: &str, from: &str, to: &str, impact: Option<Value>) -> Value {
    let mut e = json!({ "kind": kind, "from": from, "to": to });
    if let Some(i) = impact {
        e["impact"] = i;
    }
    e
}

/// A valid model document drawn from `seed`.
pub fn random_model(seed: u64, shape: Shape) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Goal tree: one root per category, each with one or two leaves.
    let mut goals = Vec::new();
    let mut leaves: Vec<(String, bool)> = Vec::new();
    let mut budget = shape.max_leaves.max(3) - 3;
    for cat in ["Security", "Usability", "Performance"] {
        let n = if budget > 0 && rng.gen_bool(0.5) {
            budget -= 1;
            2
        } else {
            1
        };
        let kids: Vec<String> = (0..n).map(|i| format!("{cat}{i}")).collect();
        goals.push(json!({ "id": cat, "name": cat, "root_category": cat, "children": kids }));
        for k in kids {
            let sensitive = cat == "Security" && rng.gen_bool(0.7);
            goals.push(json!({ "id": k, "name": k, "security_sensitive": sensitive }));
            leaves.push((k, sensitive));
        }
    }

    let factors: Vec<String> = (0..rng.gen_range(1..=shape.max_factors)).map(|i| format!("F{i}")).collect();
    let attacks: Vec<String> = (0..rng.gen_range(0..=shape.max_attacks)).map(|i| format!("A{i}")).collect();

    // Feature tree. Structural: Root, Cred group, Auto group.
    let cred_max = if rng.gen_bool(0.7) { 2 } else { 1 };
    let mut features = vec![
        json!({ "id": "Root", "kind": "root" }),
        json!({ "id": "Cred", "kind": "alternative-group", "parent": "Root",
                "group": { "min": 1, "max": cred_max } }),
    ];
    let room = shape.max_features.saturating_sub(2);
    let n_creds = rng.gen_range(2..=4.min(room.saturating_sub(2)).max(2));
    let creds: Vec<String> = (0..n_creds).map(|i| format!("C{i}")).collect();
    for c in &creds {
        let class = ["know", "have", "are"][rng.gen_range(0..3)];
        features.push(json!({ "id": c, "kind": "group-member", "parent": "Cred", "credential_class": class }));
    }
    let mut left = shape.max_features - features.len();
    let mut autos = Vec::new();
    if left >= 2 {
        features.push(json!({ "id": "Auto", "kind": "alternative-group", "parent": "Root", "group": { "min": 1, "max": 1 } }));
        let n = rng.gen_range(1..=3.min(left - 1));
        let mut levels = vec![0.0, 0.5, 1.0];
        levels.shuffle(&mut rng);
        for (i, v) in levels.into_iter().take(n).enumerate() {
            let id = format!("L{i}");
            features.push(json!({ "id": id, "kind": "group-member", "parent": "Auto",
                                  "attribute": { "name": "automation", "value": v } }));
            autos.push((id, v));
        }
        left = shape.max_features - features.len();
    }

    let mut extra_features: Vec<String> = Vec::new();
    let mut strength_owner = None;
    if shape.rich && left >= 3 && rng.gen_bool(0.5) {
        // Strength levels below the first credential.
        let owner = creds[0].clone();
        features.push(json!({ "id": "Str", "kind": "alternative-group", "parent": owner, "group": { "min": 1, "max": 1 } }));
        features.push(json!({ "id": "Weak", "kind": "group-member", "parent": "Str", "attribute": { "name": "strength", "value": 0.5 } }));
        features.push(json!({ "id": "Strong", "kind": "group-member", "parent": "Str", "attribute": { "name": "strength", "value": 1.0 } }));
        strength_owner = Some(owner);
        left = shape.max_features - features.len();
    }
    if shape.rich && left >= 1 && rng.gen_bool(0.5) {
        // Optional add-on tied to the last credential.
        let target = creds.last().unwrap().clone();
        features.push(json!({ "id": "Opt", "kind": "optional", "parent": "Root", "requires": [target] }));
        extra_features.push("Opt".into());
    }
    if shape.rich && creds.len() >= 3 && rng.gen_bool(0.3) {
        let idx = features.iter().position(|f| f["id"] == creds[1].as_str()).unwrap();
        features[idx]["excludes"] = json!([creds[2]]);
    }

    // Edges. A set keeps (kind, from, to) unique.
    let mut edges = Vec::new();
    let mut used = BTreeSet::new();
    let mut push = |edges: &mut Vec<Value>, kind: &str, from: &str, to: &str, imp: Option<Value>| {
        if used.insert((kind.to_string(), from.to_string(), to.to_string())) {
            edges.push(edge(kind, from, to, imp));
        }
    };
    for (leaf, _) in &leaves {
        for f in &factors {
            if rng.gen_bool(0.4) {
                let w = weight(&mut rng);
                push(&mut edges, "context-priority", f, leaf, Some(w));
            }
        }
    }
    for a in &attacks {
        for f in &factors {
            if rng.gen_bool(0.5) {
                let w = weight(&mut rng);
                push(&mut edges, "context-likelihood", f, a, Some(w));
            }
            if rng.gen_bool(0.3) {
                let w = weight(&mut rng);
                push(&mut edges, "context-harm", f, a, Some(w));
            }
        }
    }
    for f in &factors {
        if rng.gen_bool(0.2) {
            let c = creds.choose(&mut rng).unwrap();
            push(&mut edges, "context-disable", f, c, None);
        }
    }
    for c in &creds {
        for (leaf, _) in &leaves {
            if rng.gen_bool(0.5) {
                let w = weight(&mut rng);
                push(&mut edges, "feature-goal", c, leaf, Some(w));
            }
        }
        for a in &attacks {
            if rng.gen_bool(0.4) {
                let w = weight(&mut rng);
                push(&mut edges, "feature-reduction", c, a, Some(w));
            }
        }
    }
    let usability: Vec<&String> = leaves.iter().map(|(l, _)| l).filter(|l| l.starts_with("Usability")).collect();
    for (id, v) in &autos {
        if rng.gen_bool(0.7) {
            let leaf = usability.choose(&mut rng).unwrap();
            push(&mut edges, "feature-goal", id, leaf, Some(json!({ "value": v })));
        }
    }
    for id in &extra_features {
        // Always carries an impact, so it is never pruned.
        if attacks.is_empty() || rng.gen_bool(0.5) {
            let leaf = &leaves.choose(&mut rng).unwrap().0;
            let w = weight(&mut rng);
            push(&mut edges, "feature-goal", id, leaf, Some(w));
        } else {
            let a = attacks.choose(&mut rng).unwrap();
            let w = weight(&mut rng);
            push(&mut edges, "feature-reduction", id, a, Some(w));
        }
    }
    let _ = strength_owner;

    let mut calibration = serde_json::Map::new();
    if rng.gen_bool(0.3) {
        calibration.insert("positive".into(), json!(0.65));
    }
    let bonus = if rng.gen_bool(0.5) { 0.2 } else { (rng.gen_range(0.0..=1.0f64) * 100.0).round() / 100.0 };

    json!({
        "meta": { "name": format!("random-{seed}"), "two_factor_bonus": bonus },
        "goals": goals,
        "context_factors": factors.iter().map(|f| json!({ "id": f })).collect::<Vec<_>>(),
        "attacks": attacks.iter().map(|a| json!({ "id": a })).collect::<Vec<_>>(),
        "features": features,
        "edges": edges,
        "calibration": calibration,
    })
}

/// Random context over the document's factors: each factor is active with
/// probability one half, at a random positive value.
pub fn random_context(doc: &Value, seed: u64) -> BTreeMap<String, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    doc["context_factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            let v = if rng.gen_bool(0.5) { rng.gen_range(0.01..=1.0) } else { 0.0 };
            (f["id"].as_str().unwrap().to_string(), v)
        })
        .collect()
}

pub fn context_json(ctx: &BTreeMap<String, f64>) -> Vec<u8> {
    serde_json::to_vec(ctx).unwrap()
}

// ---------------------------------------------------------------------
// Reference evaluator
// ---------------------------------------------------------------------

/// Read-only view of a model document for the reference evaluator.
pub struct Doc<'a> {
    pub v: &'a Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub priorities: BTreeMap<String, f64>,
    pub satisfactions: BTreeMap<String, f64>,
    pub likelihoods: BTreeMap<String, f64>,
    pub partial_risks: BTreeMap<String, f64>,
    pub total_risk: f64,
    pub security: f64,
    pub usability: f64,
    pub performance: f64,
    pub utility: f64,
}

fn s(v: &Value) -> &str {
    v.as_str().unwrap()
}

impl<'a> Doc<'a> {
    pub fn new(v: &'a Value) -> Self {
        Doc { v }
    }

    fn arr(&self, key: &str) -> &'a Vec<Value> {
        self.v[key].as_array().unwrap()
    }

    pub fn impact(&self, imp: &Value) -> f64 {
        if let Some(x) = imp.get("value") {
            return x.as_f64().unwrap();
        }
        let label = s(&imp["label"]);
        if let Some(over) = self.v["calibration"].get(label) {
            return over.as_f64().unwrap();
        }
        LABELS.iter().find(|(l, _)| *l == label).unwrap().1
    }

    /// (from, to, weight) of every edge of `kind`.
    pub fn edges(&self, kind: &str) -> Vec<(&'a str, &'a str, f64)> {
        self.arr("edges")
            .iter()
            .filter(|e| e["kind"] == kind)
            .map(|e| {
                let w = e.get("impact").map(|i| self.impact(i)).unwrap_or(0.0);
                (s(&e["from"]), s(&e["to"]), w)
            })
            .collect()
    }

    pub fn feature(&self, id: &str) -> &'a Value {
        self.arr("features").iter().find(|f| f["id"] == id).unwrap()
    }

    pub fn feature_ids(&self) -> Vec<&'a str> {
        self.arr("features").iter().map(|f| s(&f["id"])).collect()
    }

    pub fn is_credential(&self, id: &str) -> bool {
        self.feature(id).get("credential_class").is_some()
    }

    pub fn parent(&self, id: &str) -> Option<&'a str> {
        self.feature(id).get("parent").map(s)
    }

    fn list(&self, id: &str, key: &str) -> Vec<&'a str> {
        self.feature(id)
            .get(key)
            .and_then(|v| v.as_array())
            .map(|a| a.iter().map(s).collect())
            .unwrap_or_default()
    }

    pub fn bonus(&self) -> f64 {
        self.v["meta"]["two_factor_bonus"].as_f64().unwrap_or(0.2)
    }

    /// Disable targets of active factors, then everything whose requires
    /// list hits a disabled feature, to a fixed point.
    pub fn disabled(&self, ctx: &BTreeMap<String, f64>) -> BTreeSet<String> {
        let on = |f: &str| ctx.get(f).copied().unwrap_or(0.0) > 0.0;
        let mut out: BTreeSet<String> = self
            .edges("context-disable")
            .into_iter()
            .filter(|(f, _, _)| on(f))
            .map(|(_, t, _)| t.to_string())
            .collect();
        loop {
            let add: Vec<String> = self
                .feature_ids()
                .into_iter()
                .filter(|id| !out.contains(*id))
                .filter(|id| self.list(id, "requires").iter().any(|r| out.contains(*r)))
                .map(str::to_string)
                .collect();
            if add.is_empty() {
                return out;
            }
            out.extend(add);
        }
    }

    /// Feasibility of a full selection, checked rule by rule.
    pub fn feasible(&self, sel: &BTreeSet<String>, ctx: &BTreeMap<String, f64>) -> bool {
        let disabled = self.disabled(ctx);
        let ids = self.feature_ids();
        let root = ids.iter().find(|id| self.feature(id)["kind"] == "root").unwrap();
        if !sel.contains(*root) {
            return false;
        }
        for id in sel {
            if disabled.contains(id) {
                return false;
            }
            if let Some(p) = self.parent(id) {
                if !sel.contains(p) {
                    return false;
                }
            }
            if self.list(id, "requires").iter().any(|r| !sel.contains(*r)) {
                return false;
            }
            if self.list(id, "excludes").iter().any(|x| sel.contains(*x)) {
                return false;
            }
            let kids: Vec<&str> = ids.iter().copied().filter(|k| self.parent(k) == Some(id.as_str())).collect();
            for k in &kids {
                let kind = &self.feature(k)["kind"];
                if (kind == "mandatory" || kind == "alternative-group") && !sel.contains(*k) {
                    return false;
                }
            }
            let f = self.feature(id);
            if f["kind"] == "alternative-group" {
                let n = kids.iter().filter(|k| sel.contains(**k)).count() as u64;
                let min = f["group"]["min"].as_u64().unwrap();
                let max = f["group"]["max"].as_u64().unwrap();
                if n < min || n > max {
                    return false;
                }
            }
        }
        let creds = sel.iter().filter(|id| self.is_credential(id)).count();
        (1..=2).contains(&creds)
    }

    /// Every feasible selection, by brute force over the power set of the
    /// non-root features.
    pub fn all_feasible(&self, ctx: &BTreeMap<String, f64>) -> Vec<BTreeSet<String>> {
        let ids = self.feature_ids();
        let root = ids.iter().copied().find(|id| self.feature(id)["kind"] == "root").unwrap();
        let rest: Vec<&str> = ids.iter().copied().filter(|id| *id != root).collect();
        assert!(rest.len() <= 9, "power set too large: {} features", rest.len());
        let mut out = Vec::new();
        for mask in 0u32..(1 << rest.len()) {
            let mut sel = BTreeSet::from([root.to_string()]);
            for (i, id) in rest.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sel.insert(id.to_string());
                }
            }
            if self.feasible(&sel, ctx) {
                out.push(sel);
            }
        }
        out
    }

    fn leaves(&self) -> Vec<(&'a str, bool)> {
        self.arr("goals")
            .iter()
            .filter(|g| g.get("children").and_then(|c| c.as_array()).is_none_or(|c| c.is_empty()))
            .map(|g| (s(&g["id"]), g.get("security_sensitive").and_then(|x| x.as_bool()).unwrap_or(false)))
            .collect()
    }

    /// Goal, risk and utility values of `sel` under `ctx`.
    pub fn evaluate(&self, sel: &BTreeSet<String>, ctx: &BTreeMap<String, f64>) -> Reference {
        let on = |f: &str| ctx.get(f).copied().unwrap_or(0.0) > 0.0;
        let creds: Vec<&String> = sel.iter().filter(|id| self.is_credential(id)).collect();
        let fg = self.edges("feature-goal");

        let mut priorities = BTreeMap::new();
        let mut sats = BTreeMap::new();
        for (leaf, sensitive) in self.leaves() {
            let mut p: Option<f64> = None;
            for (f, t, w) in self.edges("context-priority") {
                if t == leaf && on(f) {
                    p = Some(p.map_or(w, |x: f64| x.max(w)));
                }
            }
            let p = p.unwrap_or(0.5);
            let imp = |c: &str| fg.iter().find(|(f, t, _)| *f == c && *t == leaf).map_or(0.5, |e| e.2);
            let cc = match creds.as_slice() {
                [a] => imp(a),
                [a, b] => {
                    let mean = (imp(a) + imp(b)) / 2.0;
                    let bonus = if sensitive { self.bonus() } else { 0.0 };
                    if mean + bonus > 1.0 { 1.0 } else { mean + bonus }
                }
                _ => 0.0,
            };
            let mut best = cc;
            for (f, t, w) in &fg {
                if *t == leaf && sel.contains(*f) && !self.is_credential(f) && *w > best {
                    best = *w;
                }
            }
            priorities.insert(leaf.to_string(), p);
            sats.insert(leaf.to_string(), p * best);
        }
        // Parents after children: repeat until every goal has a value.
        let goals = self.arr("goals");
        while sats.len() < goals.len() {
            for g in goals {
                let id = s(&g["id"]);
                if sats.contains_key(id) {
                    continue;
                }
                let kids: Vec<&str> = g["children"].as_array().unwrap().iter().map(s).collect();
                if kids.iter().all(|k| sats.contains_key(*k)) {
                    let m = kids.iter().map(|k| sats[*k]).fold(f64::INFINITY, f64::min);
                    sats.insert(id.to_string(), m);
                }
            }
        }

        let mut likelihoods = BTreeMap::new();
        let mut partial = BTreeMap::new();
        for a in self.arr("attacks") {
            let a = s(&a["id"]);
            let exposure = self
                .edges("context-likelihood")
                .into_iter()
                .filter(|(f, t, _)| *t == a && on(f))
                .map(|e| e.2)
                .fold(0.0, f64::max);
            let mut reduction: f64 = 0.0;
            for (f, t, w) in self.edges("feature-reduction") {
                if t != a || !sel.contains(f) {
                    continue;
                }
                // Strength of a selected descendant scales the coefficient.
                let mut scale = 1.0;
                for other in sel {
                    let mut cur = self.parent(other);
                    let mut below = false;
                    while let Some(p) = cur {
                        if p == f {
                            below = true;
                            break;
                        }
                        cur = self.parent(p);
                    }
                    let attr = &self.feature(other)["attribute"];
                    if below && attr["name"] == "strength" {
                        scale = attr["value"].as_f64().unwrap();
                    }
                }
                reduction = reduction.max(w * scale);
            }
            let l = (exposure - reduction).max(0.0);
            // Neutral harm is both the default and the floor.
            let harm = self
                .edges("context-harm")
                .into_iter()
                .filter(|(f, t, _)| *t == a && on(f))
                .map(|e| e.2)
                .fold(0.5, f64::max);
            likelihoods.insert(a.to_string(), l);
            partial.insert(a.to_string(), l * harm);
        }
        let total_risk = partial.values().cloned().fold(0.0, f64::max);
        let security = sats["Security"];
        let usability = sats["Usability"];
        let performance = sats["Performance"];
        Reference {
            priorities,
            satisfactions: sats,
            likelihoods,
            partial_risks: partial,
            total_risk,
            security,
            usability,
            performance,
            utility: (security + usability + performance + 1.0 - total_risk) / 4.0,
        }
    }
}

// ---------------------------------------------------------------------
// Engine against reference
// ---------------------------------------------------------------------

pub fn check_instance(doc: &Value, model: &ModelSpec, ctxmap: &BTreeMap<String, f64>, cfg: &AuthConfiguration) {
    let reference = Doc::new(doc).evaluate(&cfg.selected, ctxmap);
    let c = parse_context(&context_json(ctxmap), model).unwrap();
    let got = assess(model, &c, cfg).unwrap();
    let tag = format!("{} under {ctxmap:?}", cfg);

    assert_eq!(got.goal.priorities.len(), reference.priorities.len(), "{tag}");
    for (k, v) in &reference.priorities {
        assert!(close(got.goal.priorities[k], *v), "priority {k}: {tag}");
    }
    assert_eq!(got.goal.satisfactions.len(), reference.satisfactions.len(), "{tag}");
    for (k, v) in &reference.satisfactions {
        assert!(close(got.goal.satisfactions[k], *v), "satisfaction {k}: {} vs {v}: {tag}", got.goal.satisfactions[k]);
    }
    for (k, v) in &reference.likelihoods {
        assert!(close(got.risk.likelihoods[k], *v), "likelihood {k}: {tag}");
    }
    for (k, v) in &reference.partial_risks {
        assert!(close(got.risk.partial_risks[k], *v), "partial risk {k}: {tag}");
    }
    assert!(close(got.risk.total_risk, reference.total_risk), "{tag}");
    assert!(close(got.security, reference.security), "{tag}");
    assert!(close(got.usability, reference.usability), "{tag}");
    assert!(close(got.performance, reference.performance), "{tag}");
    assert!(close(got.utility, reference.utility), "{tag}");
}

/// Runs the reference comparison until `instances` (model, context,
/// configuration) triples have been checked. Returns the count.
pub fn reference_sweep(instances: usize) -> usize {
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < instances {
        let shape = if seed.is_multiple_of(2) { Shape::SMALL } else { Shape::TINY };
        let doc = random_model(seed, shape);
        let model = parse_model(doc.to_string().as_bytes()).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let ctxmap = random_context(&doc, seed);
        let c = parse_context(&context_json(&ctxmap), &model).unwrap();
        if let Ok(configs) = enumerate_configs(&c, &model) {
            // A spread of configurations from each space.
            let step = (configs.len() / 4).max(1);
            for cfg in configs.iter().step_by(step) {
                check_instance(&doc, &model, &ctxmap, cfg);
                checked += 1;
                if checked == instances {
                    break;
                }
            }
        }
        seed += 1;
    }
    checked
}


/// Expected credential label per bundled scenario.
pub const EXPECTED: [(&str, &str); 6] = [
    ("s1", "Certificate"),
    ("s2", "PlateLicense"),
    ("s3", "Fingerprint+PlateLicense"),
    ("s4", "Fingerprint+Smartcard"),
    ("s5", "Smartcard"),
    ("s6", "Face+Token"),
];

/// Outcome of running both engines over random models.
#[derive(Debug, Default)]
pub struct Agreement {
    pub models: usize,
    pub empty: usize,
    pub disagreements: Vec<String>,
}

/// Runs both engines on `models` random models (seeds from `first`) and
/// records every case where the chosen configuration differs or the
/// utilities are further apart than the tolerance.
pub fn engine_agreement(first: u64, models: usize) -> Agreement {
    let mut out = Agreement::default();
    for seed in first..first + models as u64 {
        let doc = random_model(seed, Shape::SMALL);
        let model = parse_model(doc.to_string().as_bytes()).unwrap();
        let ctx = parse_context(&context_json(&random_context(&doc, seed)), &model).unwrap();
        out.models += 1;
        match (decide_exhaustive(&model, &ctx, 3), decide_search(&model, &ctx, 1e-3, 3)) {
            (Ok(e), Ok(s)) => {
                let (ue, us) = (e.best().1.utility, s.best().1.utility);
                if e.chosen != s.chosen || (ue - us).abs() > 1e-3 {
                    out.disagreements.push(format!("seed {seed}: {} ({ue}) vs {} ({us})", e.chosen, s.chosen));
                }
            }
            (Err(DecisionError::ConfigSpaceEmpty), Err(DecisionError::ConfigSpaceEmpty)) => out.empty += 1,
            (a, b) => out.disagreements.push(format!("seed {seed}: {:?} vs {:?}", a.err(), b.err())),
        }
    }
    out
}
