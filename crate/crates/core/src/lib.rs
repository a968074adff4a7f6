//! Decision engine for context-aware authentication.
//!
//! A [`ModelSpec`] ties together a goal tree (security, usability,
//! performance), the context factors that shift goal priorities and attack
//! exposure, and an extended feature model of authentication methods. Given
//! a [`ContextState`], the engine enumerates feasible configurations, scores
//! each one by goal satisfaction against residual attack risk, and returns
//! the best.

pub mod bundled;
pub mod config_space;
pub mod context;
pub mod decision;
pub mod error;
pub mod goals;
pub mod model;
pub mod model_io;
pub mod risk;
pub mod runtime;

pub use config_space::{disabled_features, enumerate_configs, is_feasible, AuthConfiguration};
pub use context::ContextState;
pub use decision::{
    assess, decide, decide_exhaustive, decide_search, tie_break, Assessment, DecideOptions, DecisionResult, Engine,
};
pub use error::{DecisionError, ModelError, ParseError};
pub use model::{label_to_value, validate_model, Diagnostic, ImpactLabel, ImpactValue, ModelSpec, Severity};
pub use model_io::{parse_context, parse_model, parse_scenario_stream, serialize_model, ScenarioStream};
