//! JSON model documents, context documents and JSONL scenario streams.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::context::ContextState;
use crate::error::ParseError;
use crate::model::{
    has_errors, validate_model, Attack, Attribute, Calibration, ContextFactor, CredentialClass, EdgeKind,
    Feature, FeatureKind, Goal, GroupCardinality, ImpactEdge, ImpactLabel, ImpactValue, ModelSpec, RootCategory,
    Severity, DEFAULT_TWO_FACTOR_BONUS,
};

#[derive(Debug, Default, Serialize, Deserialize)]
struct MetaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    two_factor_bonus: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    comparison: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GoalDoc {
    id: String,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    children: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root_category: Option<RootCategory>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    security_sensitive: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct NamedDoc {
    id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureDoc {
    id: String,
    kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<GroupCardinality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attribute: Option<Attribute>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    requires: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    excludes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    credential_class: Option<CredentialClass>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ImpactDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    kind: EdgeKind,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    impact: Option<ImpactDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    #[serde(default)]
    meta: MetaDoc,
    goals: Vec<GoalDoc>,
    context_factors: Vec<NamedDoc>,
    attacks: Vec<NamedDoc>,
    features: Vec<FeatureDoc>,
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    calibration: BTreeMap<String, f64>,
}

fn parse_json(bytes: &[u8]) -> Result<Value, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Syntax {
        line: 0,
        column: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ParseError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let field = match (prefix.is_empty(), path.as_str()) {
            (true, p) => p.to_string(),
            (false, ".") => prefix.to_string(),
            (false, p) => format!("{prefix}.{p}"),
        };
        ParseError::schema(field, e.into_inner().to_string())
    })
}

fn resolve_impact(doc: &ImpactDoc, calibration: &Calibration, field: &str) -> Result<ImpactValue, ParseError> {
    let label = doc
        .label
        .as_deref()
        .map(|l| l.parse::<ImpactLabel>())
        .transpose()
        .map_err(|e| ParseError::schema(format!("{field}.label"), e.to_string()))?;
    match (label, doc.value) {
        (_, Some(v)) if !(0.0..=1.0).contains(&v) => Err(ParseError::schema(
            format!("{field}.value"),
            format!("impact {v} is outside [0,1]"),
        )),
        (Some(l), Some(v)) => {
            ImpactValue::labelled(v, l).map_err(|e| ParseError::schema(format!("{field}.value"), e.to_string()))
        }
        (None, Some(v)) => ImpactValue::new(v).map_err(|e| ParseError::schema(format!("{field}.value"), e.to_string())),
        (Some(l), None) => {
            let v = calibration.get(&l).copied().unwrap_or_else(|| l.midpoint());
            ImpactValue::labelled(v, l).map_err(|e| ParseError::schema("calibration", e.to_string()))
        }
        (None, None) => Err(ParseError::schema(field, "impact needs a label or a value")),
    }
}

/// Parses and validates a model document.
pub fn parse_model(bytes: &[u8]) -> Result<ModelSpec, ParseError> {
    let doc: ModelDoc = typed(parse_json(bytes)?, "")?;

    let mut calibration = Calibration::new();
    for (label, value) in &doc.calibration {
        let l: ImpactLabel = label
            .parse()
            .map_err(|e: crate::error::ModelError| ParseError::schema(format!("calibration.{label}"), e.to_string()))?;
        calibration.insert(l, *value);
    }

    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.iter().enumerate() {
        let impact = e
            .impact
            .as_ref()
            .map(|imp| resolve_impact(imp, &calibration, &format!("edges[{i}].impact")))
            .transpose()?;
        edges.push(ImpactEdge {
            kind: e.kind,
            from: e.from.clone(),
            to: e.to.clone(),
            impact,
        });
    }

    let model = ModelSpec {
        goals: doc
            .goals
            .into_iter()
            .map(|g| Goal {
                name: g.name.unwrap_or_else(|| g.id.clone()),
                id: g.id,
                children: g.children,
                root_category: g.root_category,
                security_sensitive: g.security_sensitive,
            })
            .collect(),
        context_factors: doc
            .context_factors
            .into_iter()
            .map(|c| ContextFactor {
                id: c.id,
                description: c.description,
            })
            .collect(),
        attacks: doc
            .attacks
            .into_iter()
            .map(|a| Attack {
                id: a.id,
                description: a.description,
            })
            .collect(),
        features: doc
            .features
            .into_iter()
            .map(|f| Feature {
                id: f.id,
                kind: f.kind,
                parent: f.parent,
                group: f.group,
                attribute: f.attribute,
                requires: f.requires,
                excludes: f.excludes,
                credential_class: f.credential_class,
            })
            .collect(),
        edges,
        calibration,
        two_factor_bonus: doc.meta.two_factor_bonus.unwrap_or(DEFAULT_TWO_FACTOR_BONUS),
        comparison: doc.meta.comparison,
    };

    let diags = validate_model(&model);
    if has_errors(&diags) {
        return Err(ParseError::Semantic(
            diags.into_iter().filter(|d| d.severity == Severity::Error).collect(),
        ));
    }
    Ok(model)
}

/// Pretty JSON document that parses back to an equal model.
pub fn serialize_model(model: &ModelSpec) -> String {
    let doc = ModelDoc {
        meta: MetaDoc {
            name: None,
            two_factor_bonus: Some(model.two_factor_bonus),
            comparison: model.comparison.clone(),
        },
        goals: model
            .goals
            .iter()
            .map(|g| GoalDoc {
                id: g.id.clone(),
                name: Some(g.name.clone()),
                children: g.children.clone(),
                root_category: g.root_category,
                security_sensitive: g.security_sensitive,
            })
            .collect(),
        context_factors: model
            .context_factors
            .iter()
            .map(|c| NamedDoc {
                id: c.id.clone(),
                description: c.description.clone(),
            })
            .collect(),
        attacks: model
            .attacks
            .iter()
            .map(|a| NamedDoc {
                id: a.id.clone(),
                description: a.description.clone(),
            })
            .collect(),
        features: model
            .features
            .iter()
            .map(|f| FeatureDoc {
                id: f.id.clone(),
                kind: f.kind,
                parent: f.parent.clone(),
                group: f.group,
                attribute: f.attribute.clone(),
                requires: f.requires.clone(),
                excludes: f.excludes.clone(),
                credential_class: f.credential_class,
            })
            .collect(),
        edges: model
            .edges
            .iter()
            .map(|e| EdgeDoc {
                kind: e.kind,
                from: e.from.clone(),
                to: e.to.clone(),
                impact: e.impact.map(|i| ImpactDoc {
                    label: i.label().map(|l| l.as_str().to_string()),
                    value: Some(i.value()),
                }),
            })
            .collect(),
        calibration: model
            .calibration
            .iter()
            .map(|(l, v)| (l.as_str().to_string(), *v))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}

fn factor_assignments(
    value: Value,
    model: &ModelSpec,
    field: &str,
) -> Result<BTreeMap<String, f64>, ParseError> {
    let map: BTreeMap<String, f64> = typed(value, field)?;
    for (id, v) in &map {
        if !(0.0..=1.0).contains(v) {
            let path = if field.is_empty() { id.clone() } else { format!("{field}.{id}") };
            return Err(ParseError::schema(path, format!("context value {v} is outside [0,1]")));
        }
        if !model.context_factors.iter().any(|c| &c.id == id) {
            return Err(ParseError::semantic(id.clone(), "unknown context factor"));
        }
    }
    Ok(map)
}

/// Flat `factor-id → value` map; omitted factors are 0.
pub fn parse_context(bytes: &[u8], model: &ModelSpec) -> Result<ContextState, ParseError> {
    let map = factor_assignments(parse_json(bytes)?, model, "")?;
    Ok(ContextState::from_pairs(model, map.iter().map(|(k, v)| (k.as_str(), *v))))
}

pub fn serialize_context(ctx: &ContextState) -> String {
    let map: BTreeMap<&str, f64> = ctx.iter().collect();
    serde_json::to_string_pretty(&map).expect("context serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRecord {
    pub seq: u64,
    pub set: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioStream {
    pub records: Vec<ScenarioRecord>,
}

impl ScenarioStream {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Deserialize)]
struct RecordDoc {
    seq: u64,
    set: Value,
}

/// One JSON record per line; blank lines are skipped.
pub fn parse_scenario_stream(bytes: &[u8], model: &ModelSpec) -> Result<ScenarioStream, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Syntax {
        line: 0,
        column: 0,
        message: format!("input is not UTF-8: {e}"),
    })?;
    let mut records: Vec<ScenarioRecord> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| ParseError::Syntax {
            line: lineno,
            column: e.column(),
            message: e.to_string(),
        })?;
        let rec: RecordDoc = typed(value, &format!("line {lineno}"))?;
        if let Some(prev) = records.last() {
            if rec.seq <= prev.seq {
                return Err(ParseError::schema(
                    format!("line {lineno}.seq"),
                    format!("seq {} does not follow {}", rec.seq, prev.seq),
                ));
            }
        }
        let set = factor_assignments(rec.set, model, &format!("line {lineno}.set"))?;
        records.push(ScenarioRecord { seq: rec.seq, set });
    }
    Ok(ScenarioStream { records })
}
