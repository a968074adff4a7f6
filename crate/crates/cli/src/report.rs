//! Side-by-side satisfaction/risk/utility rows for a fixed comparison set.

use adaptauth::{decide, ContextState, DecideOptions, ModelSpec};

use crate::{best_with_credentials, root_values};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub config: String,
    pub detail: String,
    pub feasible: bool,
    /// Whether the engine selects this credential tuple in the scenario.
    pub chosen: bool,
    /// One value per model leaf, in model order.
    pub leaves: Vec<f64>,
    pub roots: [f64; 3],
    pub total_risk: f64,
    pub utility: f64,
}

pub fn build_report(model: &ModelSpec, scenarios: &[(String, ContextState)], comparison: &[Vec<String>]) -> Vec<ReportRow> {
    let leaf_ids: Vec<&str> = model.leaves().map(|g| g.id.as_str()).collect();
    let mut rows = Vec::new();
    for (name, ctx) in scenarios {
        let selected = decide(model, ctx, &DecideOptions::default())
            .ok()
            .map(|r| r.chosen.credentials);
        for tuple in comparison {
            let mut label: Vec<String> = tuple.clone();
            label.sort();
            let row = match best_with_credentials(model, ctx, tuple) {
                Some((config, a)) => ReportRow {
                    scenario: name.clone(),
                    config: config.credential_label(),
                    detail: config.to_string(),
                    feasible: true,
                    chosen: selected.as_ref() == Some(&config.credentials),
                    leaves: leaf_ids.iter().map(|id| a.goal.satisfaction(id)).collect(),
                    roots: root_values(&a).map(|(_, v)| v),
                    total_risk: a.risk.total_risk,
                    utility: a.utility,
                },
                None => ReportRow {
                    scenario: name.clone(),
                    config: label.join("+"),
                    detail: String::new(),
                    feasible: false,
                    chosen: false,
                    leaves: Vec::new(),
                    roots: [0.0; 3],
                    total_risk: 0.0,
                    utility: 0.0,
                },
            };
            rows.push(row);
        }
    }
    rows
}

pub fn write_report_csv(model: &ModelSpec, rows: &[ReportRow]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Vec<String> = vec!["scenario".into(), "config".into(), "detail".into()];
    header.extend(model.leaves().map(|g| g.id.clone()));
    header.extend(
        ["Security", "Usability", "Performance", "total_risk", "utility", "feasible", "chosen"].map(String::from),
    );
    w.write_record(&header)?;

    let fmt = |v: f64| format!("{v:.4}");
    for r in rows {
        let mut rec = vec![r.scenario.clone(), r.config.clone(), r.detail.clone()];
        if r.feasible {
            rec.extend(r.leaves.iter().map(|v| fmt(*v)));
            rec.extend(r.roots.iter().map(|v| fmt(*v)));
            rec.push(fmt(r.total_risk));
            rec.push(fmt(r.utility));
        } else {
            rec.extend(std::iter::repeat_n(String::new(), model.leaves().count() + 5));
        }
        rec.push(r.feasible.to_string());
        rec.push(r.chosen.to_string());
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
