//! Analyze/plan loop: fold context-change events into re-decisions.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::context::ContextState;
use crate::decision::{decide, DecideOptions, DecisionResult};
use crate::model::ModelSpec;
use crate::model_io::{ScenarioRecord, ScenarioStream};

#[derive(Debug, Clone, PartialEq)]
pub struct LoopState {
    pub current_ctx: ContextState,
    pub last_decision: Option<DecisionResult>,
    pub decisions_made: usize,
}

impl LoopState {
    pub fn new(initial_ctx: ContextState) -> Self {
        LoopState {
            current_ctx: initial_ctx,
            last_decision: None,
            decisions_made: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionLogEntry {
    pub seq: u64,
    pub ctx_delta: BTreeMap<String, f64>,
    pub chosen: Option<String>,
    pub credentials: Option<String>,
    pub utility: Option<f64>,
    pub total_risk: Option<f64>,
    pub changed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct RuntimeLoop<'a> {
    model: &'a ModelSpec,
    opts: DecideOptions,
}

impl<'a> RuntimeLoop<'a> {
    pub fn new(model: &'a ModelSpec, opts: DecideOptions) -> Self {
        RuntimeLoop { model, opts }
    }

    /// Applies one event. Emits an entry only when some factor value
    /// actually changed.
    pub fn step(&self, mut state: LoopState, event: &ScenarioRecord) -> (LoopState, Option<DecisionLogEntry>) {
        let mut delta = BTreeMap::new();
        for (id, v) in &event.set {
            if state.current_ctx.set(id, *v) {
                delta.insert(id.clone(), *v);
            }
        }
        if delta.is_empty() {
            return (state, None);
        }

        let previous = state.last_decision.as_ref().map(|d| d.chosen.clone());
        let entry = match decide(self.model, &state.current_ctx, &self.opts) {
            Ok(result) => {
                let (chosen, assessment) = result.best();
                let entry = DecisionLogEntry {
                    seq: event.seq,
                    ctx_delta: delta,
                    chosen: Some(chosen.to_string()),
                    credentials: Some(chosen.credential_label()),
                    utility: Some(assessment.utility),
                    total_risk: Some(assessment.risk.total_risk),
                    changed: previous.as_ref() != Some(chosen),
                    error: None,
                };
                state.last_decision = Some(result);
                entry
            }
            Err(e) => {
                state.last_decision = None;
                DecisionLogEntry {
                    seq: event.seq,
                    ctx_delta: delta,
                    chosen: None,
                    credentials: None,
                    utility: None,
                    total_risk: None,
                    changed: previous.is_some(),
                    error: Some(e.to_string()),
                }
            }
        };
        state.decisions_made += 1;
        (state, Some(entry))
    }

    pub fn run(&self, initial_ctx: ContextState, stream: &ScenarioStream) -> Vec<DecisionLogEntry> {
        let mut state = LoopState::new(initial_ctx);
        let mut log = Vec::new();
        for event in &stream.records {
            let (next, entry) = self.step(state, event);
            state = next;
            log.extend(entry);
        }
        log
    }
}

pub fn run(
    model: &ModelSpec,
    initial_ctx: ContextState,
    stream: &ScenarioStream,
    opts: DecideOptions,
) -> Vec<DecisionLogEntry> {
    RuntimeLoop::new(model, opts).run(initial_ctx, stream)
}

pub fn log_to_jsonl(log: &[DecisionLogEntry]) -> String {
    let mut out = String::new();
    for e in log {
        out.push_str(&serde_json::to_string(e).expect("log entry serializes"));
        out.push('\n');
    }
    out
}

pub fn log_to_csv(log: &[DecisionLogEntry]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["seq", "ctx_delta", "chosen", "credentials", "utility", "total_risk", "changed", "error"])
        .expect("in-memory write");
    for e in log {
        let delta = e
            .ctx_delta
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let num = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_default();
        w.write_record([
            e.seq.to_string(),
            delta,
            e.chosen.clone().unwrap_or_default(),
            e.credentials.clone().unwrap_or_default(),
            num(e.utility),
            num(e.total_risk),
            e.changed.to_string(),
            e.error.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}
