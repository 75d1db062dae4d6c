//! Additive DEA baseline, for side-by-side comparison with the gap models.
//!
//! Envelopment program: maximize weighted slacks subject to
//! `sum_j x_j lambda_j + s_x = x_o`, `-sum_j y_j lambda_j + s_y = -y_o` and,
//! under variable returns to scale, `sum_j lambda_j = 1`.
//! Multiplier program: minimize `v.x_o - u.y_o (+ sigma)` subject to
//! `v.x_j - u.y_j (+ sigma) >= 0` for every `j`, `v >= b_x`, `u >= b_y`.

use crate::dataset::DecisionMatrix;
use crate::models::{self, dot, ModelError, ModelKind};
use crate::procedure::EFFICIENT_TOL;
use crate::simplex::{self, Domain, LinearProgram, LpError, LpStatus, Relation, Sense};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rts {
    Crs,
    Vrs,
}

impl Rts {
    pub fn parse(s: &str) -> Result<Rts, String> {
        match s.to_ascii_lowercase().as_str() {
            "crs" => Ok(Rts::Crs),
            "vrs" => Ok(Rts::Vrs),
            other => Err(format!("unknown returns to scale '{other}' (expected crs or vrs)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveConfig {
    pub rts: Rts,
    /// Goal weights per input; empty means all ones.
    #[serde(default)]
    pub input_weights: Vec<f64>,
    /// Goal weights per output; empty means all ones.
    #[serde(default)]
    pub output_weights: Vec<f64>,
}

impl AdditiveConfig {
    pub fn new(rts: Rts) -> Self {
        AdditiveConfig {
            rts,
            input_weights: Vec::new(),
            output_weights: Vec::new(),
        }
    }

    fn resolved(&self, m: &DecisionMatrix) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        let fill = |w: &[f64], k: usize, what: &str| -> Result<Vec<f64>, ModelError> {
            let w = if w.is_empty() { vec![1.0; k] } else { w.to_vec() };
            if w.len() != k {
                return Err(ModelError::InvalidBounds(format!(
                    "{what} weights: expected {k}, got {}",
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
                return Err(ModelError::InvalidBounds(format!("{what} weight {bad} is not positive")));
            }
            Ok(w)
        };
        Ok((
            fill(&self.input_weights, m.m(), "input")?,
            fill(&self.output_weights, m.s(), "output")?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveSolution {
    pub dmu: String,
    pub rts: Rts,
    pub envelopment_status: LpStatus,
    pub multiplier_status: LpStatus,
    /// Envelopment optimum `F`; `None` unless optimal.
    pub envelopment: Option<f64>,
    /// Multiplier optimum `f`; `None` unless optimal.
    pub multiplier: Option<f64>,
    pub input_slacks: Vec<f64>,
    pub output_slacks: Vec<f64>,
    pub lambda: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub sigma: Option<f64>,
    pub efficient: bool,
}

impl AdditiveSolution {
    pub fn duality_gap(&self) -> Option<f64> {
        Some((self.envelopment? - self.multiplier?).abs())
    }

    pub fn reference_set(&self) -> Vec<usize> {
        (0..self.lambda.len())
            .filter(|&j| self.lambda[j] > models::PEER_TOL)
            .collect()
    }
}

/// Envelopment program; columns are `lambda`, `s_x`, `s_y`.
pub fn envelopment_program(
    m: &DecisionMatrix,
    o: usize,
    cfg: &AdditiveConfig,
) -> Result<LinearProgram, ModelError> {
    let (bx, by) = cfg.resolved(m)?;
    let (n, ni, no) = (m.n(), m.m(), m.s());
    let width = n + ni + no;
    let mut c = vec![0.0; width];
    c[n..n + ni].copy_from_slice(&bx);
    c[n + ni..].copy_from_slice(&by);
    let mut lp = LinearProgram::new(Sense::Maximize, c);
    for i in 0..ni {
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = m.x(i, j);
        }
        row[n + i] = 1.0;
        lp.add_constraint(row, Relation::Eq, m.x(i, o));
    }
    for r in 0..no {
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = -m.y(r, j);
        }
        row[n + ni + r] = 1.0;
        lp.add_constraint(row, Relation::Eq, -m.y(r, o));
    }
    if cfg.rts == Rts::Vrs {
        let mut row = vec![0.0; width];
        row[..n].fill(1.0);
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    Ok(lp)
}

/// Multiplier program; columns are `v`, `u` and, under VRS, `sigma`.
pub fn multiplier_program(
    m: &DecisionMatrix,
    o: usize,
    cfg: &AdditiveConfig,
) -> Result<LinearProgram, ModelError> {
    let (bx, by) = cfg.resolved(m)?;
    let (n, ni, no) = (m.n(), m.m(), m.s());
    let vrs = cfg.rts == Rts::Vrs;
    let width = ni + no + usize::from(vrs);
    let mut c = vec![0.0; width];
    for i in 0..ni {
        c[i] = m.x(i, o);
    }
    for r in 0..no {
        c[ni + r] = -m.y(r, o);
    }
    if vrs {
        c[ni + no] = 1.0;
    }
    let mut lp = LinearProgram::new(Sense::Minimize, c);
    for j in 0..n {
        let mut row = vec![0.0; width];
        for i in 0..ni {
            row[i] = m.x(i, j);
        }
        for r in 0..no {
            row[ni + r] = -m.y(r, j);
        }
        if vrs {
            row[ni + no] = 1.0;
        }
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    for (k, b) in bx.iter().chain(&by).enumerate() {
        lp.set_domain(k, Domain::Free);
        lp.set_bounds(k, Some(*b), None);
    }
    if vrs {
        lp.set_domain(ni + no, Domain::Free);
    }
    Ok(lp)
}

/// Solves both additive programs for DMU `o`. Unbounded or infeasible
/// outcomes are returned as statuses, not errors.
pub fn evaluate_additive(
    m: &DecisionMatrix,
    o: usize,
    cfg: &AdditiveConfig,
) -> Result<AdditiveSolution, ModelError> {
    if o >= m.n() {
        return Err(crate::dataset::DatasetError::UnknownDmu(format!("#{o}")).into());
    }
    let (n, ni, no) = (m.n(), m.m(), m.s());
    let env_lp = envelopment_program(m, o, cfg)?;
    let mul_lp = multiplier_program(m, o, cfg)?;
    let env = simplex::solve(&env_lp)?;
    let mul = simplex::solve(&mul_lp)?;
    let (lambda, input_slacks, output_slacks) = if env.is_optimal() {
        (
            env.x[..n].to_vec(),
            env.x[n..n + ni].to_vec(),
            env.x[n + ni..].to_vec(),
        )
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    let (v, u, sigma) = if mul.is_optimal() {
        (
            mul.x[..ni].to_vec(),
            mul.x[ni..ni + no].to_vec(),
            (cfg.rts == Rts::Vrs).then(|| mul.x[ni + no]),
        )
    } else {
        (Vec::new(), Vec::new(), None)
    };
    let envelopment = env.is_optimal().then_some(env.objective);
    let multiplier = mul.is_optimal().then_some(mul.objective);
    let efficient = envelopment.or(multiplier).is_some_and(|f| f <= EFFICIENT_TOL);
    Ok(AdditiveSolution {
        dmu: m.dmus()[o].clone(),
        rts: cfg.rts,
        envelopment_status: env.status,
        multiplier_status: mul.status,
        envelopment,
        multiplier,
        input_slacks,
        output_slacks,
        lambda,
        v,
        u,
        sigma,
        efficient,
    })
}

/// Largest slack/weight complementary slackness residual of an additive optimum.
pub fn additive_slackness(
    m: &DecisionMatrix,
    cfg: &AdditiveConfig,
    sol: &AdditiveSolution,
) -> Result<f64, ModelError> {
    if sol.envelopment.is_none() || sol.multiplier.is_none() {
        return Err(LpError::NotOptimal.into());
    }
    let (bx, by) = cfg.resolved(m)?;
    let sigma = sol.sigma.unwrap_or(0.0);
    let mut worst = 0.0f64;
    for j in 0..m.n() {
        let gap = dot(&sol.v, &m.input_column(j)) - dot(&sol.u, &m.output_column(j)) + sigma;
        worst = worst.max((sol.lambda[j] * gap).abs());
    }
    for i in 0..m.m() {
        worst = worst.max((sol.input_slacks[i] * (sol.v[i] - bx[i])).abs());
    }
    for r in 0..m.s() {
        worst = worst.max((sol.output_slacks[r] * (sol.u[r] - by[r])).abs());
    }
    Ok(worst)
}

/// One row of the side-by-side comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub dmu: String,
    pub additive: AdditiveSolution,
    pub pt_efficiency: f64,
    pub pt_efficient: bool,
    /// Scaled model at intensity sum one.
    pub tsc1_efficiency: f64,
    /// Both gap-model scores lie in `[0, 1]`.
    pub vga_score_bounded: bool,
    /// The additive score lies in `[0, 1]`.
    pub dea_score_bounded: bool,
    /// `v.x_o` of the additive multiplier solution.
    pub dea_virtual_input: Option<f64>,
    pub dea_virtual_input_is_one: bool,
    /// `v.x_o` of the PT step-II prices.
    pub vga_virtual_input: f64,
    pub dea_reference_set: Vec<String>,
    pub vga_reference_set: Vec<String>,
    pub reference_overlap: Vec<String>,
    pub classification_agrees: bool,
}

/// Runs the additive model next to PT and the scaled model at intensity sum one.
pub fn compare(m: &DecisionMatrix, o: usize, cfg: &AdditiveConfig) -> Result<Comparison, ModelError> {
    let additive = evaluate_additive(m, o, cfg)?;
    let pt = models::evaluate(m, &ModelKind::Pt, o, None)?;
    let tsc = models::evaluate(m, &ModelKind::Tsc { kappa: 1.0 }, o, None)?;
    let pt_e = pt.efficiency();
    let tsc_e = tsc.efficiency();
    let in_unit = |e: f64| (-1e-9..=1.0 + 1e-9).contains(&e);
    let labels = |idx: &[usize]| idx.iter().map(|&j| m.dmus()[j].clone()).collect::<Vec<_>>();
    let dea_ref = additive.reference_set();
    let vga_ref = pt.step2.reference_set.clone();
    let overlap: Vec<usize> = dea_ref.iter().copied().filter(|j| vga_ref.contains(j)).collect();
    let dea_vx = (!additive.v.is_empty()).then(|| dot(&additive.v, &pt.x_o));
    let pt_efficient = pt.step1.delta <= EFFICIENT_TOL;
    Ok(Comparison {
        dmu: m.dmus()[o].clone(),
        pt_efficiency: pt_e,
        pt_efficient,
        tsc1_efficiency: tsc_e,
        vga_score_bounded: in_unit(pt_e) && in_unit(tsc_e),
        dea_score_bounded: additive.envelopment.is_some_and(in_unit),
        dea_virtual_input: dea_vx,
        dea_virtual_input_is_one: dea_vx.is_some_and(|v| (v - 1.0).abs() <= 1e-9),
        vga_virtual_input: pt.virtual_input(),
        dea_reference_set: labels(&dea_ref),
        vga_reference_set: labels(&vga_ref),
        reference_overlap: labels(&overlap),
        classification_agrees: additive.efficient == pt_efficient,
        additive,
    })
}
