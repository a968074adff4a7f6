//! Reference models and scenario contexts shipped with the crate.

use crate::context::ContextState;
use crate::model::ModelSpec;
use crate::model_io::{parse_context, parse_model, parse_scenario_stream, ScenarioStream};

pub const IOV_MODEL: &str = include_str!("../assets/iov.model.json");
pub const HEALTHCARE_MODEL: &str = include_str!("../assets/healthcare.model.json");

pub const IOV_SCENARIOS: [(&str, &str); 3] = [
    ("s1", include_str!("../assets/iov/s1.ctx.json")),
    ("s2", include_str!("../assets/iov/s2.ctx.json")),
    ("s3", include_str!("../assets/iov/s3.ctx.json")),
];

pub const HEALTHCARE_SCENARIOS: [(&str, &str); 3] = [
    ("s4", include_str!("../assets/healthcare/s4.ctx.json")),
    ("s5", include_str!("../assets/healthcare/s5.ctx.json")),
    ("s6", include_str!("../assets/healthcare/s6.ctx.json")),
];

pub const IOV_STREAM: &str = include_str!("../assets/iov.stream.jsonl");
pub const HEALTHCARE_STREAM: &str = include_str!("../assets/healthcare.stream.jsonl");

pub fn iov_model() -> ModelSpec {
    parse_model(IOV_MODEL.as_bytes()).expect("bundled IoV model is valid")
}

pub fn healthcare_model() -> ModelSpec {
    parse_model(HEALTHCARE_MODEL.as_bytes()).expect("bundled healthcare model is valid")
}

/// Bundled scenario context by name (`s1`..`s6`) parsed against its model.
pub fn scenario(name: &str, model: &ModelSpec) -> Option<ContextState> {
    IOV_SCENARIOS
        .iter()
        .chain(HEALTHCARE_SCENARIOS.iter())
        .find(|(n, _)| *n == name)
        .map(|(_, doc)| parse_context(doc.as_bytes(), model).expect("bundled context is valid"))
}

pub fn iov_stream(model: &ModelSpec) -> ScenarioStream {
    parse_scenario_stream(IOV_STREAM.as_bytes(), model).expect("bundled IoV stream is valid")
}

pub fn healthcare_stream(model: &ModelSpec) -> ScenarioStream {
    parse_scenario_stream(HEALTHCARE_STREAM.as_bytes(), model).expect("bundled healthcare stream is valid")
}
