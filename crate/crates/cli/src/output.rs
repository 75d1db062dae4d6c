//! JSON documents shared by the CLI and the HTTP service, plus the human tables.
//!
//! Every document goes through [`to_json`], so the two front ends emit the same
//! bytes for the same request.

use serde::Serialize;
use serde_json::{json, Value};
use vga_core::analysis::{self, EfficiencyReport};
use vga_core::dataset::{DecisionMatrix, ValidationReport};
use vga_core::models::{self, ModelKind, ModelSolution, RatioBounds};
use vga_core::procedure::RankingTable;

use crate::error::CliError;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub dataset_hash: String,
    pub model: String,
    pub dmu: String,
    pub kappa: Option<f64>,
    #[serde(rename = "E")]
    pub efficiency: f64,
    #[serde(rename = "F")]
    pub inefficiency: f64,
    #[serde(rename = "Xi")]
    pub xi: f64,
    /// Intensity sum of the unscaled model of the same family.
    pub kappa1: f64,
    pub report: EfficiencyReport,
}

pub fn evaluation(m: &DecisionMatrix, sol: &ModelSolution) -> Result<Evaluation, CliError> {
    let report = analysis::report(m, sol);
    let kappa1 = if sol.kind == sol.kind.base() {
        report.first_scalar
    } else {
        models::first_scalar(&models::evaluate(m, &sol.kind.base(), sol.dmu_index, None)?)
    };
    Ok(Evaluation {
        dataset_hash: m.hash(),
        model: report.model.clone(),
        dmu: report.dmu.clone(),
        kappa: report.kappa,
        efficiency: report.efficiency,
        inefficiency: report.inefficiency,
        xi: report.xi,
        kappa1,
        report,
    })
}

/// Parses the model name, evaluates, and builds the evaluation document.
pub fn evaluate(
    m: &DecisionMatrix,
    model: &str,
    dmu: &str,
    kappa: Option<f64>,
    q_max: &[f64],
    p_max: &[f64],
) -> Result<Evaluation, CliError> {
    let kind = ModelKind::parse(model, kappa).map_err(CliError::Usage)?;
    let o = m.dmu_index(dmu)?;
    let bounds = if q_max.is_empty() && p_max.is_empty() {
        None
    } else {
        Some(RatioBounds::upper(m.m(), m.s(), q_max, p_max)?)
    };
    let sol = models::evaluate(m, &kind, o, bounds.as_ref())?;
    evaluation(m, &sol)
}

pub fn plot(m: &DecisionMatrix, model: &str, dmu: &str, kappa: Option<f64>) -> Result<analysis::PlotGeometry, CliError> {
    let kind = ModelKind::parse(model, kappa).map_err(CliError::Usage)?;
    let o = m.dmu_index(dmu)?;
    let sol = models::evaluate(m, &kind, o, None)?;
    Ok(analysis::plot_geometry(m, &sol))
}

pub fn dataset_summary(m: &DecisionMatrix) -> Value {
    json!({ "hash": m.hash(), "dataset": m })
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.4}")
    } else {
        format!("{x}")
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

pub fn evaluation_table(e: &Evaluation) -> String {
    let r = &e.report;
    let mut rows = vec![
        ("model", e.model.clone()),
        ("dmu", e.dmu.clone()),
        ("kappa", e.kappa.map(num).unwrap_or_else(|| "-".into())),
        ("kappa1", num(e.kappa1)),
        ("E", num(e.efficiency)),
        ("F", num(e.inefficiency)),
        ("Xi", num(e.xi)),
        ("tau", num(r.tau)),
        ("delta", num(r.delta)),
        ("alpha, beta", format!("{} {}", num(r.alpha), num(r.beta))),
        ("alpha^, beta^", format!("{} {}", num(r.alpha_hat), num(r.beta_hat))),
        ("gamma, omega", format!("{} {}", num(r.gamma), num(r.omega))),
        ("anchor", list(&r.anchor_point)),
        ("v", list(&r.v)),
        ("u", list(&r.u)),
        ("Q", list(&r.q)),
        ("P", list(&r.p)),
        ("x^", list(&r.benchmark_inputs)),
        ("y^", list(&r.benchmark_outputs)),
        ("reference set", r.reference_set.join(" ")),
    ];
    if let Some(w) = r.w {
        rows.insert(9, ("w", num(w)));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

pub fn ranking_table(t: &RankingTable) -> String {
    let mut out = format!("{:>4}  {:<10} {:<5} {:>10} {:>10}  {}\n", "rank", "dmu", "model", "kappa", "score", "criterion");
    for r in &t.rows {
        out.push_str(&format!(
            "{:>4}  {:<10} {:<5} {:>10} {:>10}  {} ({})\n",
            r.rank,
            r.dmu,
            r.model,
            r.kappa.map(num).unwrap_or_else(|| "-".into()),
            num(r.score),
            r.criterion,
            num(r.criterion_ratio)
        ));
    }
    out
}

pub fn validation_table(v: &ValidationReport) -> String {
    let mut out = String::new();
    if v.accepted() {
        out.push_str(&format!("accepted: {} DMUs, {} inputs, {} outputs\n", v.n, v.m, v.s));
    }
    for e in &v.errors {
        out.push_str(&format!("error: {e}\n"));
    }
    for w in &v.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    for c in &v.criteria {
        out.push_str(&format!("{:<6} {:<12} {:>12} {:>12} {}\n", c.role, c.label, num(c.min), num(c.max), c.unit));
    }
    out
}
