use std::collections::BTreeMap;

use crate::model::ModelSpec;

/// Snapshot of context factor values. A factor is active when its value is
/// strictly positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContextState {
    values: BTreeMap<String, f64>,
}

impl ContextState {
    /// Every factor of `model` at 0.
    pub fn inactive(model: &ModelSpec) -> Self {
        ContextState {
            values: model
                .context_factors
                .iter()
                .map(|c| (c.id.clone(), 0.0))
                .collect(),
        }
    }

    /// Builds a state over `model` from explicit assignments; everything else
    /// defaults to 0. Ids are not checked here, see `model_io::parse_context`.
    pub fn from_pairs<'a>(model: &ModelSpec, pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let mut ctx = ContextState::inactive(model);
        for (id, v) in pairs {
            ctx.set(id, v);
        }
        ctx
    }

    pub fn get(&self, id: &str) -> f64 {
        self.values.get(id).copied().unwrap_or(0.0)
    }

    pub fn is_active(&self, id: &str) -> bool {
        self.get(id) > 0.0
    }

    /// Returns true when the stored value changed.
    pub fn set(&mut self, id: &str, value: f64) -> bool {
        let prev = self.values.insert(id.to_string(), value);
        prev != Some(value)
    }

    pub fn active(&self) -> impl Iterator<Item = &str> {
        self.values
            .iter()
            .filter(|(_, v)| **v > 0.0)
            .map(|(k, _)| k.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}
