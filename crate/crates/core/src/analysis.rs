//! Scores, benchmarks and virtual scales derived from a solved model.

use crate::dataset::DecisionMatrix;
use crate::models::{self, dot, scale_values, ModelError, ModelSolution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub model: String,
    pub dmu: String,
    pub kappa: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// `E = beta / alpha`.
    pub efficiency: f64,
    /// `Delta* / alpha`; `1 - E` for the inefficiency models, `E - 1` for the super models.
    pub inefficiency: f64,
    /// Benchmark-to-original score ratio; equals `1 / E` when the benchmark is efficient.
    pub xi: f64,
    pub benchmark_inputs: Vec<f64>,
    pub benchmark_outputs: Vec<f64>,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub anchor_point: [f64; 2],
    pub gamma: f64,
    pub omega: f64,
    pub gamma_q: Vec<f64>,
    pub gamma_p: Vec<f64>,
    pub reference_set: Vec<String>,
    pub scale_factor: f64,
    pub tau: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Option<f64>,
    pub pi: Vec<f64>,
    pub delta: f64,
    pub big_delta: f64,
    pub first_scalar: f64,
}

/// Benchmark input and output vectors of DMU `o`.
pub fn benchmarks(sol: &ModelSolution) -> (Vec<f64>, Vec<f64>) {
    let s = &sol.step2;
    let sign = if sol.kind.is_super() { 1.0 } else { -1.0 };
    let xh = sol.x_o.iter().zip(&s.q).map(|(x, q)| x * (1.0 + sign * q)).collect();
    let yh = sol.y_o.iter().zip(&s.p).map(|(y, p)| y * (1.0 - sign * p)).collect();
    (xh, yh)
}

/// Anchor point: where the price-weighted part of DMU `o`'s scales starts.
pub fn anchor_point(sol: &ModelSolution) -> [f64; 2] {
    let (g, w) = (sol.gamma, sol.omega);
    // adding 0.0 turns a negative zero into a plain one
    if sol.kind.is_super() {
        [-(1.0 - g) * w + 0.0, g * w + 0.0]
    } else {
        [(1.0 - g) * w + 0.0, -g * w + 0.0]
    }
}

fn shares(weight: f64, ratios: &[f64]) -> Vec<f64> {
    let total: f64 = ratios.iter().sum();
    if total > 1e-12 {
        ratios.iter().map(|r| weight * r / total).collect()
    } else {
        vec![weight / ratios.len() as f64; ratios.len()]
    }
}

pub fn report(m: &DecisionMatrix, sol: &ModelSolution) -> EfficiencyReport {
    let s = &sol.step2;
    let (alpha, beta) = sol.scales();
    let (xh, yh) = benchmarks(sol);
    let (alpha_hat, beta_hat) = scale_values(&sol.kind, dot(&s.v, &xh), dot(&s.u, &yh), sol.gamma, sol.omega);
    EfficiencyReport {
        model: sol.kind.name().to_string(),
        dmu: sol.dmu.clone(),
        kappa: sol.kappa(),
        alpha,
        beta,
        efficiency: beta / alpha,
        inefficiency: s.big_delta / alpha,
        xi: (beta_hat / beta) / (alpha_hat / alpha),
        benchmark_inputs: xh,
        benchmark_outputs: yh,
        alpha_hat,
        beta_hat,
        anchor_point: anchor_point(sol),
        gamma: sol.gamma,
        omega: sol.omega,
        gamma_q: shares(1.0 - sol.gamma, &s.q),
        gamma_p: shares(sol.gamma, &s.p),
        reference_set: s.reference_set.iter().map(|&j| m.dmus()[j].clone()).collect(),
        scale_factor: sol.scale_factor,
        tau: s.tau,
        q: s.q.clone(),
        p: s.p.clone(),
        v: s.v.clone(),
        u: s.u.clone(),
        w: s.w,
        pi: s.pi.clone(),
        delta: s.delta,
        big_delta: s.big_delta,
        first_scalar: models::first_scalar(sol),
    }
}

/// Re-runs the same model with DMU `o`'s data replaced by its benchmark.
///
/// For the super models DMU `o` is outside its own reference set, so this is
/// the adjusted DMU evaluated against the remaining DMUs.
pub fn reevaluate_at_benchmark(m: &DecisionMatrix, sol: &ModelSolution) -> Result<ModelSolution, ModelError> {
    let (xh, yh) = benchmarks(sol);
    let adjusted = m.with_dmu_data(sol.dmu_index, &xh, &yh)?;
    models::evaluate(&adjusted, &sol.kind, sol.dmu_index, sol.bounds.as_ref())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualPoint {
    pub dmu: String,
    pub alpha: f64,
    pub beta: f64,
    pub evaluated: bool,
    pub peer: bool,
}

/// `(alpha_j, beta_j)` for every DMU under DMU `o`'s step-II prices.
///
/// Other DMUs take the unit price `w` of the intensity row; DMU `o` itself
/// takes `omega = kappa * w`, so its point is `(alpha_o, beta_o)`.
pub fn virtual_technology_set(m: &DecisionMatrix, sol: &ModelSolution) -> Vec<VirtualPoint> {
    let s = &sol.step2;
    let w = s.w.unwrap_or(0.0);
    (0..m.n())
        .map(|j| {
            let evaluated = j == sol.dmu_index;
            let (alpha, beta) = if evaluated {
                sol.scales()
            } else {
                scale_values(
                    &sol.kind,
                    dot(&s.v, &m.input_column(j)),
                    dot(&s.u, &m.output_column(j)),
                    sol.gamma,
                    w,
                )
            };
            VirtualPoint {
                dmu: m.dmus()[j].clone(),
                alpha,
                beta,
                evaluated,
                peer: s.reference_set.contains(&j),
            }
        })
        .collect()
}

/// Quadrant of a point by coordinate signs; points on an axis take the
/// lower-numbered neighbouring quadrant.
pub fn quadrant(p: [f64; 2]) -> &'static str {
    match (p[0] >= 0.0, p[1] >= 0.0) {
        (true, true) => "I",
        (false, true) => "II",
        (false, false) => "III",
        (true, false) => "IV",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotVector {
    pub name: String,
    pub from: [f64; 2],
    pub to: [f64; 2],
    /// `None` for a vertical vector.
    pub slope: Option<f64>,
}

impl PlotVector {
    fn new(name: &str, from: [f64; 2], to: [f64; 2]) -> Self {
        let dx = to[0] - from[0];
        let dy = to[1] - from[1];
        PlotVector {
            name: name.to_string(),
            from,
            to,
            slope: (dx.abs() > 1e-15).then(|| dy / dx),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotGeometry {
    pub model: String,
    pub dmu: String,
    pub kappa: Option<f64>,
    pub points: Vec<VirtualPoint>,
    pub evaluated: [f64; 2],
    pub anchor: [f64; 2],
    pub target: [f64; 2],
    pub vectors: Vec<PlotVector>,
    /// The line `beta = alpha`, as two endpoints spanning the plot extent.
    pub equator: [[f64; 2]; 2],
    pub evaluated_quadrant: String,
    pub anchor_quadrant: String,
    pub efficiency: f64,
}

pub fn plot_geometry(m: &DecisionMatrix, sol: &ModelSolution) -> PlotGeometry {
    let r = report(m, sol);
    let points = virtual_technology_set(m, sol);
    let evaluated = [r.alpha, r.beta];
    let anchor = r.anchor_point;
    let target = [r.alpha_hat, r.beta_hat];
    let origin = [0.0, 0.0];
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 0.0;
    for p in points.iter().map(|p| [p.alpha, p.beta]).chain([evaluated, anchor, target]) {
        lo = lo.min(p[0]).min(p[1]);
        hi = hi.max(p[0]).max(p[1]);
    }
    let pad = 0.05 * (hi - lo).max(1e-9);
    PlotGeometry {
        model: r.model.clone(),
        dmu: r.dmu.clone(),
        kappa: r.kappa,
        points,
        evaluated,
        anchor,
        target,
        vectors: vec![
            PlotVector::new("origin_to_dmu", origin, evaluated),
            PlotVector::new("origin_to_anchor", origin, anchor),
            PlotVector::new("anchor_to_dmu", anchor, evaluated),
            PlotVector::new("origin_to_target", origin, target),
        ],
        equator: [[lo - pad, lo - pad], [hi + pad, hi + pad]],
        evaluated_quadrant: quadrant(evaluated).to_string(),
        anchor_quadrant: quadrant(anchor).to_string(),
        efficiency: r.efficiency,
    }
}

/// Standalone SVG drawing of a [`PlotGeometry`].
pub fn render_svg(g: &PlotGeometry) -> String {
    let size = 480.0;
    let margin = 40.0;
    let lo = g.equator[0][0];
    let hi = g.equator[1][0];
    let span = (hi - lo).max(1e-12);
    let sx = |x: f64| margin + (x - lo) / span * (size - 2.0 * margin);
    let sy = |y: f64| size - margin - (y - lo) / span * (size - 2.0 * margin);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\"/>\n",
        sx(lo),
        sy(0.0),
        sx(hi),
        sy(0.0)
    ));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\"/>\n",
        sx(0.0),
        sy(lo),
        sx(0.0),
        sy(hi)
    ));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#6a6\" stroke-dasharray=\"4 3\"/>\n",
        sx(g.equator[0][0]),
        sy(g.equator[0][1]),
        sx(g.equator[1][0]),
        sy(g.equator[1][1])
    ));
    for v in &g.vectors {
        let colour = match v.name.as_str() {
            "anchor_to_dmu" => "#c33",
            "origin_to_anchor" => "#33c",
            "origin_to_target" => "#aa3",
            _ => "#333",
        };
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{colour}\"><title>{}</title></line>\n",
            sx(v.from[0]),
            sy(v.from[1]),
            sx(v.to[0]),
            sy(v.to[1]),
            v.name
        ));
    }
    for p in &g.points {
        let fill = if p.evaluated {
            "#c33"
        } else if p.peer {
            "#3a3"
        } else {
            "#555"
        };
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{fill}\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
            sx(p.alpha),
            sy(p.beta),
            sx(p.alpha) + 5.0,
            sy(p.beta) - 5.0,
            escape(&p.dmu)
        ));
    }
    out.push_str(&format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#33c\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">AP</text>\n",
        sx(g.anchor[0]),
        sy(g.anchor[1]),
        sx(g.anchor[0]) + 5.0,
        sy(g.anchor[1]) + 12.0
    ));
    out.push_str(&format!(
        "<text x=\"{margin}\" y=\"20\" font-size=\"13\">{} {}  E = {:.4}</text>\n",
        escape(&g.model),
        escape(&g.dmu),
        g.efficiency
    ));
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
