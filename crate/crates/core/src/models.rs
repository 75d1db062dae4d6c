//! The four gap models and their two-step evaluation.
//!
//! Each model is a pair of programs for one DMU `o`. The adjustment program
//! (TAP) finds input reduction ratios `Q`, output expansion ratios `P` and
//! peer intensities `pi`. The price program (TVG) finds input prices `v`,
//! output prices `u` and, for the scaled models, the price `w` of the
//! intensity-sum row. Step I solves both at goal price `tau = 1`; step II
//! re-solves them at `tau = 1 / normalizer` so that DMU `o`'s virtual input
//! (virtual output for the super models) equals one.
//!
//! Layout of the adjustment program: variables `pi` (one per peer), `Q`, `P`;
//! rows for inputs, outputs and, for the scaled models, `sum(pi) = kappa`.
//! The price program has variables `v`, `u`, `w` and one gap row per peer
//! followed by one price row per input and per output.

use crate::dataset::{DatasetError, DecisionMatrix};
use crate::simplex::{self, Basis, Domain, LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Duality gap tolerance between the two programs.
pub const DUALITY_TOL: f64 = 1e-7;
/// Step-I normalizers at or below this are treated as degenerate, and the
/// optimal prices with the largest normalizer are used instead.
pub const NORMALIZER_TOL: f64 = 1e-6;
/// Intensity above which a DMU counts as a peer.
pub const PEER_TOL: f64 = 1e-9;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("{model} {side} program at step {step} is {status:?}")]
    NotSolved {
        model: String,
        side: Side,
        step: u8,
        status: LpStatus,
    },
    #[error("duality gap {gap:e} between adjustment ({tap}) and price ({tvg}) programs")]
    DualityGap { tap: f64, tvg: f64, gap: f64 },
    #[error("normalizer {0} is not positive; scale factor is undefined")]
    NonPositiveNormalizer(f64),
    #[error("intensity sum must be a positive finite number, got {0}")]
    InvalidKappa(f64),
    #[error("invalid ratio bounds: {0}")]
    InvalidBounds(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelKind {
    #[serde(rename = "pt")]
    Pt,
    #[serde(rename = "tsc")]
    Tsc { kappa: f64 },
    #[serde(rename = "spt")]
    Spt,
    #[serde(rename = "stsc")]
    Stsc { kappa: f64 },
}

impl ModelKind {
    /// Parses `pt | tsc | spt | stsc`; the scaled models need `kappa`.
    pub fn parse(name: &str, kappa: Option<f64>) -> Result<ModelKind, String> {
        let need = |k: Option<f64>| k.ok_or_else(|| format!("model {name} needs a kappa value"));
        match name.to_ascii_lowercase().as_str() {
            "pt" => Ok(ModelKind::Pt),
            "spt" => Ok(ModelKind::Spt),
            "tsc" => Ok(ModelKind::Tsc { kappa: need(kappa)? }),
            "stsc" => Ok(ModelKind::Stsc { kappa: need(kappa)? }),
            other => Err(format!("unknown model {other:?} (expected pt, tsc, spt or stsc)")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Pt => "PT",
            ModelKind::Tsc { .. } => "TSc",
            ModelKind::Spt => "sPT",
            ModelKind::Stsc { .. } => "sTSc",
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match self {
            ModelKind::Tsc { kappa } | ModelKind::Stsc { kappa } => Some(*kappa),
            _ => None,
        }
    }

    /// Super-efficiency variants exclude DMU `o` from its own reference set.
    pub fn is_super(&self) -> bool {
        matches!(self, ModelKind::Spt | ModelKind::Stsc { .. })
    }

    pub fn with_kappa(&self, kappa: f64) -> ModelKind {
        if self.is_super() {
            ModelKind::Stsc { kappa }
        } else {
            ModelKind::Tsc { kappa }
        }
    }

    /// The unscaled member of the same family.
    pub fn base(&self) -> ModelKind {
        if self.is_super() {
            ModelKind::Spt
        } else {
            ModelKind::Pt
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Tap,
    Tvg,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Tap => "adjustment",
            Side::Tvg => "price",
        })
    }
}

/// Optional per-criterion limits on the adjustment ratios.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RatioBounds {
    pub q_lower: Vec<Option<f64>>,
    pub q_upper: Vec<Option<f64>>,
    pub p_lower: Vec<Option<f64>>,
    pub p_upper: Vec<Option<f64>>,
}

impl RatioBounds {
    /// Upper limits only, broadcast or per criterion.
    pub fn upper(m: usize, s: usize, q_max: &[f64], p_max: &[f64]) -> Result<Self, ModelError> {
        let spread = |v: &[f64], k: usize, what: &str| -> Result<Vec<Option<f64>>, ModelError> {
            match v.len() {
                0 => Ok(vec![None; k]),
                1 => Ok(vec![Some(v[0]); k]),
                l if l == k => Ok(v.iter().map(|x| Some(*x)).collect()),
                l => Err(ModelError::InvalidBounds(format!("{what} has {l} values, expected 1 or {k}"))),
            }
        };
        Ok(RatioBounds {
            q_lower: vec![None; m],
            q_upper: spread(q_max, m, "Q upper bound")?,
            p_lower: vec![None; s],
            p_upper: spread(p_max, s, "P upper bound")?,
        })
    }

    fn check(&self, m: usize, s: usize) -> Result<(), ModelError> {
        if self.q_lower.len() != m || self.q_upper.len() != m || self.p_lower.len() != s || self.p_upper.len() != s {
            return Err(ModelError::InvalidBounds("bound vectors do not match the criteria".into()));
        }
        let pairs = self.q_lower.iter().zip(&self.q_upper).chain(self.p_lower.iter().zip(&self.p_upper));
        for (lo, hi) in pairs {
            let l = lo.unwrap_or(0.0);
            if l < 0.0 || hi.is_some_and(|h| h < l) || lo.is_some_and(|v| !v.is_finite()) || hi.is_some_and(|v| !v.is_finite()) {
                return Err(ModelError::InvalidBounds(format!("lower {lo:?} / upper {hi:?} is not a valid range")));
            }
        }
        Ok(())
    }
}

/// One solved step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSolution {
    pub tau: f64,
    /// Input reduction (inefficiency models) or allowance (super models) ratios.
    pub q: Vec<f64>,
    /// Output expansion (inefficiency models) or allowance (super models) ratios.
    pub p: Vec<f64>,
    /// Intensity per DMU; zero for DMU `o` in the super models.
    pub pi: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Option<f64>,
    /// Adjustment program optimum.
    pub delta: f64,
    /// Price program optimum.
    pub big_delta: f64,
    pub reference_set: Vec<usize>,
    pub tap_basis: Basis,
    pub tvg_basis: Option<Basis>,
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSolution {
    pub kind: ModelKind,
    pub dmu: String,
    pub dmu_index: usize,
    pub x_o: Vec<f64>,
    pub y_o: Vec<f64>,
    pub step1: StepSolution,
    pub step2: StepSolution,
    /// `t̄`, the reciprocal of the step-I normalizer; equals step II's `tau`.
    pub scale_factor: f64,
    pub gamma: f64,
    /// `kappa * w` at step II; zero for the unscaled models.
    pub omega: f64,
    pub bounds: Option<RatioBounds>,
}

impl ModelSolution {
    pub fn kappa(&self) -> Option<f64> {
        self.kind.kappa()
    }

    pub fn virtual_input(&self) -> f64 {
        dot(&self.step2.v, &self.x_o)
    }

    pub fn virtual_output(&self) -> f64 {
        dot(&self.step2.u, &self.y_o)
    }

    /// `(alpha, beta)` of DMU `o` at step II.
    pub fn scales(&self) -> (f64, f64) {
        scale_values(&self.kind, self.virtual_input(), self.virtual_output(), self.gamma, self.omega)
    }

    /// `E = beta / alpha`.
    pub fn efficiency(&self) -> f64 {
        let (a, b) = self.scales();
        b / a
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// `(alpha, beta)` from virtual input, virtual output, `gamma` and `omega`.
pub fn scale_values(kind: &ModelKind, vx: f64, uy: f64, gamma: f64, omega: f64) -> (f64, f64) {
    if kind.is_super() {
        (vx - (1.0 - gamma) * omega, uy + gamma * omega)
    } else {
        (vx + (1.0 - gamma) * omega, uy - gamma * omega)
    }
}

/// Share of the total adjustment carried by the inputs.
///
/// With no adjustment at all the share is 0 for the unscaled models and 1/2
/// for the scaled ones.
pub fn gamma_of(kind: &ModelKind, q: &[f64], p: &[f64]) -> f64 {
    let sq: f64 = q.iter().sum();
    let sp: f64 = p.iter().sum();
    if sq + sp <= 1e-12 {
        if kind.kappa().is_some() {
            0.5
        } else {
            0.0
        }
    } else {
        sq / (sq + sp)
    }
}

/// DMUs allowed in the reference set of `o`.
pub fn peers(n: usize, kind: &ModelKind, o: usize) -> Vec<usize> {
    (0..n).filter(|&j| !(kind.is_super() && j == o)).collect()
}

fn check_kind(kind: &ModelKind) -> Result<(), ModelError> {
    if let Some(k) = kind.kappa() {
        if !(k.is_finite() && k > 0.0) {
            return Err(ModelError::InvalidKappa(k));
        }
    }
    Ok(())
}

/// Builds the adjustment or price program of `kind` for DMU `o` at goal price `tau`.
///
/// Ratio bounds only affect the adjustment program.
pub fn build_program(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    tau: f64,
    side: Side,
    bounds: Option<&RatioBounds>,
) -> Result<LinearProgram, ModelError> {
    check_kind(kind)?;
    if o >= m.n() {
        return Err(DatasetError::UnknownDmu(format!("#{o}")).into());
    }
    let (ni, no) = (m.m(), m.s());
    let peers = peers(m.n(), kind, o);
    let sup = kind.is_super();
    match side {
        Side::Tap => {
            let np = peers.len();
            let mut obj = vec![0.0; np];
            obj.extend(std::iter::repeat(tau).take(ni + no));
            let sense = if sup { Sense::Minimize } else { Sense::Maximize };
            let mut lp = LinearProgram::new(sense, obj);
            let width = np + ni + no;
            for i in 0..ni {
                let mut row = vec![0.0; width];
                let sign = if sup { -1.0 } else { 1.0 };
                for (k, &j) in peers.iter().enumerate() {
                    row[k] = sign * m.x(i, j);
                }
                row[np + i] = m.x(i, o);
                if sup {
                    lp.add_constraint(row, Relation::Ge, -m.x(i, o));
                } else {
                    lp.add_constraint(row, Relation::Eq, m.x(i, o));
                }
            }
            for r in 0..no {
                let mut row = vec![0.0; width];
                let sign = if sup { 1.0 } else { -1.0 };
                for (k, &j) in peers.iter().enumerate() {
                    row[k] = sign * m.y(r, j);
                }
                row[np + ni + r] = m.y(r, o);
                lp.add_constraint(row, Relation::Eq, sign * m.y(r, o));
            }
            if let Some(kappa) = kind.kappa() {
                let mut row = vec![0.0; width];
                for v in row.iter_mut().take(np) {
                    *v = 1.0;
                }
                lp.add_constraint(row, Relation::Eq, kappa);
            }
            if let Some(b) = bounds {
                b.check(ni, no)?;
                for i in 0..ni {
                    lp.set_bounds(np + i, b.q_lower[i], b.q_upper[i]);
                }
                for r in 0..no {
                    lp.set_bounds(np + ni + r, b.p_lower[r], b.p_upper[r]);
                }
            }
            Ok(lp)
        }
        Side::Tvg => {
            let scaled = kind.kappa();
            let width = ni + no + usize::from(scaled.is_some());
            let sign = if sup { -1.0 } else { 1.0 };
            let mut obj: Vec<f64> = (0..ni).map(|i| sign * m.x(i, o)).collect();
            obj.extend((0..no).map(|r| -sign * m.y(r, o)));
            if let Some(k) = scaled {
                obj.push(k);
            }
            let sense = if sup { Sense::Maximize } else { Sense::Minimize };
            let mut lp = LinearProgram::new(sense, obj);
            for j in 0..width {
                let free = !(sup && j < ni);
                if free {
                    lp.set_domain(j, Domain::Free);
                }
            }
            let rel = if sup { Relation::Le } else { Relation::Ge };
            for &j in &peers {
                let mut row: Vec<f64> = (0..ni).map(|i| sign * m.x(i, j)).collect();
                row.extend((0..no).map(|r| -sign * m.y(r, j)));
                if scaled.is_some() {
                    row.push(1.0);
                }
                lp.add_constraint(row, rel, 0.0);
            }
            for i in 0..ni {
                let mut row = vec![0.0; width];
                row[i] = m.x(i, o);
                lp.add_constraint(row, rel, tau);
            }
            for r in 0..no {
                let mut row = vec![0.0; width];
                row[ni + r] = m.y(r, o);
                lp.add_constraint(row, rel, tau);
            }
            Ok(lp)
        }
    }
}

fn require(sol: LpSolution, kind: &ModelKind, side: Side, step: u8) -> Result<LpSolution, ModelError> {
    if sol.is_optimal() {
        Ok(sol)
    } else {
        Err(ModelError::NotSolved {
            model: kind.name().to_string(),
            side,
            step,
            status: sol.status,
        })
    }
}

// optimal solution of `lp`, preferring `basis` when it is certified optimal
fn solve_warm(lp: &LinearProgram, basis: Option<&Basis>) -> Result<LpSolution, LpError> {
    if let Some(b) = basis {
        match simplex::evaluate_basis(lp, b) {
            Ok(s) => return Ok(s),
            Err(LpError::BasisNotOptimal { .. }) | Err(LpError::NumericInstability(_)) => {}
            Err(e) => return Err(e),
        }
    }
    simplex::solve(lp)
}

struct Prices {
    v: Vec<f64>,
    u: Vec<f64>,
    w: Option<f64>,
}

fn prices_from_tap(tap: &LpSolution, ni: usize, no: usize, scaled: bool) -> Prices {
    Prices {
        v: tap.duals[..ni].to_vec(),
        u: tap.duals[ni..ni + no].to_vec(),
        w: scaled.then(|| tap.duals[ni + no]),
    }
}

fn prices_from_tvg(tvg: &LpSolution, ni: usize, no: usize, scaled: bool) -> Prices {
    Prices {
        v: tvg.x[..ni].to_vec(),
        u: tvg.x[ni..ni + no].to_vec(),
        w: scaled.then(|| tvg.x[ni + no]),
    }
}

struct Step {
    sol: StepSolution,
}

// Among the optimal step-I prices, those with the largest normalizer. Used only
// when the vertex found first leaves the normalizer non-positive.
fn select_prices(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    s1: &StepSolution,
    gamma: f64,
) -> Result<Option<Prices>, ModelError> {
    let (ni, no) = (m.m(), m.s());
    let tvg = build_program(m, kind, o, s1.tau, Side::Tvg, None)?;
    let kappa = kind.kappa();
    let mut lp = tvg.clone();
    let slack = 1e-10 * s1.big_delta.abs().max(1.0);
    let (rel, rhs) = match tvg.sense {
        Sense::Minimize => (Relation::Le, s1.big_delta + slack),
        Sense::Maximize => (Relation::Ge, s1.big_delta - slack),
    };
    lp.add_constraint(tvg.objective.clone(), rel, rhs);
    let mut obj = vec![0.0; tvg.num_vars()];
    if kind.is_super() {
        for r in 0..no {
            obj[ni + r] = m.y(r, o);
        }
    } else {
        for i in 0..ni {
            obj[i] = m.x(i, o);
        }
    }
    if let Some(k) = kappa {
        obj[ni + no] = if kind.is_super() { gamma * k } else { (1.0 - gamma) * k };
    }
    lp.sense = Sense::Maximize;
    lp.objective = obj;
    let sol = simplex::solve(&lp)?;
    if !sol.is_optimal() || sol.objective <= 0.0 {
        return Ok(None);
    }
    Ok(Some(prices_from_tvg(&sol, ni, no, kappa.is_some())))
}

fn run_step(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    tau: f64,
    step: u8,
    bounds: Option<&RatioBounds>,
    tap_basis: Option<&Basis>,
    tvg_basis: Option<&Basis>,
    pinned: bool,
) -> Result<Step, ModelError> {
    let (ni, no) = (m.m(), m.s());
    let scaled = kind.kappa().is_some();
    let tap_lp = build_program(m, kind, o, tau, Side::Tap, bounds)?;
    let tap = if pinned {
        let b = tap_basis.expect("pinned runs carry a basis");
        match simplex::evaluate_basis(&tap_lp, b) {
            Ok(s) => s,
            Err(LpError::BasisNotOptimal { .. }) if step == 2 => simplex::solve(&tap_lp)?,
            Err(e) => return Err(e.into()),
        }
    } else {
        solve_warm(&tap_lp, tap_basis)?
    };
    let tap = require(tap, kind, Side::Tap, step)?;
    let peers = peers(m.n(), kind, o);
    let np = peers.len();
    let mut pi = vec![0.0; m.n()];
    for (k, &j) in peers.iter().enumerate() {
        pi[j] = tap.x[k];
    }
    let q = tap.x[np..np + ni].to_vec();
    let p = tap.x[np + ni..np + ni + no].to_vec();
    let delta = tap.objective;

    let (prices, big_delta, tvg_basis_out) = if bounds.is_some() {
        let prices = prices_from_tap(&tap, ni, no, scaled);
        (prices, tap.dual_objective(&tap_lp), None)
    } else {
        let tvg_lp = build_program(m, kind, o, tau, Side::Tvg, None)?;
        let tvg = require(solve_warm(&tvg_lp, tvg_basis)?, kind, Side::Tvg, step)?;
        let prices = if pinned {
            prices_from_tap(&tap, ni, no, scaled)
        } else {
            prices_from_tvg(&tvg, ni, no, scaled)
        };
        (prices, tvg.objective, Some(tvg.basis))
    };
    let gap = (delta - big_delta).abs();
    if gap > DUALITY_TOL * delta.abs().max(1.0) {
        return Err(ModelError::DualityGap {
            tap: delta,
            tvg: big_delta,
            gap,
        });
    }
    let reference_set = (0..m.n()).filter(|&j| pi[j] > PEER_TOL).collect();
    Ok(Step {
        sol: StepSolution {
            tau,
            q,
            p,
            pi,
            v: prices.v,
            u: prices.u,
            w: prices.w,
            delta,
            big_delta,
            reference_set,
            tap_basis: tap.basis,
            tvg_basis: tvg_basis_out,
        },
    })
}

fn run(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    bounds: Option<&RatioBounds>,
    pinned: Option<&Basis>,
) -> Result<ModelSolution, ModelError> {
    check_kind(kind)?;
    if o >= m.n() {
        return Err(DatasetError::UnknownDmu(format!("#{o}")).into());
    }
    let x_o = m.input_column(o);
    let y_o = m.output_column(o);
    let mut s1 = run_step(m, kind, o, 1.0, 1, bounds, pinned, None, pinned.is_some())?.sol;
    let gamma = gamma_of(kind, &s1.q, &s1.p);
    let kappa = kind.kappa().unwrap_or(0.0);
    let normalizer_of = |s: &StepSolution| {
        let (a, b) = scale_values(kind, dot(&s.v, &x_o), dot(&s.u, &y_o), gamma, kappa * s.w.unwrap_or(0.0));
        if kind.is_super() {
            b
        } else {
            a
        }
    };
    let mut normalizer = normalizer_of(&s1);
    let mut selected = false;
    if !(normalizer > NORMALIZER_TOL) && bounds.is_none() {
        if let Some(prices) = select_prices(m, kind, o, &s1, gamma)? {
            let mut trial = s1.clone();
            trial.v = prices.v;
            trial.u = prices.u;
            trial.w = prices.w;
            let better = normalizer_of(&trial);
            if better > normalizer {
                s1 = trial;
                normalizer = better;
                selected = true;
            }
        }
    }
    if !(normalizer > 0.0 && normalizer.is_finite()) {
        return Err(ModelError::NonPositiveNormalizer(normalizer));
    }
    let t = 1.0 / normalizer;
    let mut s2 = run_step(
        m,
        kind,
        o,
        t,
        2,
        bounds,
        Some(&s1.tap_basis),
        s1.tvg_basis.as_ref(),
        pinned.is_some(),
    )?
    .sol;
    if selected {
        s2.v = s1.v.iter().map(|v| t * v).collect();
        s2.u = s1.u.iter().map(|u| t * u).collect();
        s2.w = s1.w.map(|w| t * w);
    }
    let omega = kappa * s2.w.unwrap_or(0.0);
    Ok(ModelSolution {
        kind: *kind,
        dmu: m.dmus()[o].clone(),
        dmu_index: o,
        x_o,
        y_o,
        step1: s1,
        step2: s2,
        scale_factor: t,
        gamma,
        omega,
        bounds: bounds.cloned(),
    })
}

/// Two-step evaluation of DMU `o` under `kind`.
pub fn evaluate(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    bounds: Option<&RatioBounds>,
) -> Result<ModelSolution, ModelError> {
    run(m, kind, o, bounds, None)
}

/// Two-step evaluation with the adjustment program held to `basis`.
///
/// The basis must be optimal for the step-I adjustment program; prices are then
/// read from that basis's duals, while the price program is still solved for
/// the duality check.
pub fn evaluate_with_basis(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    basis: &Basis,
) -> Result<ModelSolution, ModelError> {
    run(m, kind, o, None, Some(basis))
}

/// Intensity sum of the step-II reference combination.
pub fn first_scalar(sol: &ModelSolution) -> f64 {
    sol.step2.pi.iter().sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlacknessReport {
    /// Largest `|pi_j * gap_j|`.
    pub peer_rows: f64,
    /// Largest `|Q_i * (price row slack)|`.
    pub input_rows: f64,
    /// Largest `|P_r * (price row slack)|`.
    pub output_rows: f64,
    pub duality_gap: f64,
    pub ok: bool,
}

/// Complementary slackness residuals of the step-II pair.
pub fn verify_complementary_slackness(
    m: &DecisionMatrix,
    sol: &ModelSolution,
) -> Result<SlacknessReport, ModelError> {
    let s = &sol.step2;
    let o = sol.dmu_index;
    let sup = sol.kind.is_super();
    let w = s.w.unwrap_or(0.0);
    let duality_gap = (s.delta - s.big_delta).abs();
    let (mut peer_rows, mut input_rows, mut output_rows) = (0.0f64, 0.0f64, 0.0f64);
    if let Some(b) = &sol.bounds {
        let lp = build_program(m, &sol.kind, o, s.tau, Side::Tap, Some(b))?;
        let tap = simplex::evaluate_basis(&lp, &s.tap_basis)?;
        let np = peers(m.n(), &sol.kind, o).len();
        for (j, (d, x)) in tap.reduced_costs.iter().zip(&tap.x).enumerate() {
            let (lo, hi) = lp.effective_bounds(j);
            let dist = (x - lo).abs().min((hi - x).abs());
            let r = (d * dist).abs();
            if j < np {
                peer_rows = peer_rows.max(r);
            } else if j < np + m.m() {
                input_rows = input_rows.max(r);
            } else {
                output_rows = output_rows.max(r);
            }
        }
    } else {
        for j in peers(m.n(), &sol.kind, o) {
            let vx = dot(&s.v, &m.input_column(j));
            let uy = dot(&s.u, &m.output_column(j));
            let gap = if sup { vx - uy - w } else { vx - uy + w };
            peer_rows = peer_rows.max((s.pi[j] * gap).abs());
        }
        for i in 0..m.m() {
            let slack = m.x(i, o) * s.v[i] - s.tau;
            input_rows = input_rows.max((s.q[i] * slack).abs());
        }
        for r in 0..m.s() {
            let slack = m.y(r, o) * s.u[r] - s.tau;
            output_rows = output_rows.max((s.p[r] * slack).abs());
        }
    }
    let tol = simplex::COMPLEMENTARITY_TOL;
    Ok(SlacknessReport {
        peer_rows,
        input_rows,
        output_rows,
        duality_gap,
        ok: peer_rows <= tol
            && input_rows <= tol
            && output_rows <= tol
            && duality_gap <= DUALITY_TOL * s.delta.abs().max(1.0),
    })
}
