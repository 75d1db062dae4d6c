//! Four-phase procedure for choosing the intensity-sum scalar of one DMU.
//!
//! Phase 1 runs the unscaled model and records its intensity sum `kappa1`.
//! Phase 2 runs the scaled model at `kappa1`. Because `kappa1` is where the
//! scaled model's value function bends, its adjustment program is degenerate
//! there; phase 2 therefore splits it into the two one-sided optimal bases
//! (left and right segment) and ranges the intensity-sum row on each.
//! Phase 3 evaluates the finite segment endpoints and picks `kappa2`.
//! Phase 4 tries scalars inside `[kappa1, kappa2]` and commits one.

use crate::analysis::{self, EfficiencyReport};
use crate::dataset::DecisionMatrix;
use crate::models::{self, ModelError, ModelKind, ModelSolution, Side};
use crate::simplex::{self, Basis, RangeDirection};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// `delta` at or below which a DMU counts as efficient.
pub const EFFICIENT_TOL: f64 = 1e-7;
/// Shortest segment accepted as a usable side of `kappa1`.
pub const MIN_SEGMENT: f64 = 1e-9;
/// Bisection stops once `|E - target|` falls below this.
pub const MATCH_TOL: f64 = 1e-4;
/// Tolerance when matching a committed scalar to a tried one.
pub const KAPPA_MATCH_TOL: f64 = 1e-9;
pub const SESSION_VERSION: u32 = 1;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ProcedureError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("phase {wanted} needs phase {needed} to be complete")]
    OutOfOrder { wanted: u8, needed: u8 },
    #[error("DMU {0} is efficient; evaluate it with the super-efficiency scenario")]
    AlreadyEfficient(String),
    #[error("DMU {0} is not efficient; the super-efficiency scenario does not apply")]
    NotEfficient(String),
    #[error("no side of kappa1 = {0} has a finite feasible endpoint")]
    NoEndpoint(f64),
    #[error("kappa {kappa} lies outside [{lo}, {hi}]")]
    OutsideInterval { kappa: f64, lo: f64, hi: f64 },
    #[error("kappa {0} has not been tried")]
    NotTried(f64),
    #[error("target {target} is not bracketed by E({lo_kappa}) = {lo_e} and E({hi_kappa}) = {hi_e}")]
    NotBracketed {
        target: f64,
        lo_kappa: f64,
        lo_e: f64,
        hi_kappa: f64,
        hi_e: f64,
    },
    #[error("procedure is finished")]
    Finished,
    #[error("session belongs to dataset {found}, not {expected}")]
    DatasetMismatch { expected: String, found: String },
    #[error("unsupported session version {0}")]
    Version(u32),
    #[error("malformed session: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Inefficiency,
    Super,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Scenario, String> {
        match s.to_ascii_lowercase().as_str() {
            "inefficiency" | "ineff" => Ok(Scenario::Inefficiency),
            "super" | "super-efficiency" => Ok(Scenario::Super),
            other => Err(format!("unknown scenario {other:?} (expected inefficiency or super)")),
        }
    }

    fn base(&self) -> ModelKind {
        match self {
            Scenario::Inefficiency => ModelKind::Pt,
            Scenario::Super => ModelKind::Spt,
        }
    }

    fn scaled(&self, kappa: f64) -> ModelKind {
        self.base().with_kappa(kappa)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1 {
    pub solution: ModelSolution,
    pub report: EfficiencyReport,
    pub kappa1: f64,
    pub efficient: bool,
    pub directive: Option<String>,
}

/// One side of `kappa1`: the optimal basis valid on that side and its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSide {
    pub direction: RangeDirection,
    pub basis: Basis,
    /// Price of the intensity-sum row on this side.
    pub w: f64,
    /// Distance the scalar can move before the basis changes; may be infinite.
    pub allowance: f64,
    pub endpoint: Option<f64>,
    pub solution: Option<ModelSolution>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase2 {
    /// Scaled model at `kappa1`, solved cold.
    pub solution: ModelSolution,
    pub report: EfficiencyReport,
    /// `delta` of the scaled model equals `delta` of the unscaled one.
    pub same_delta: bool,
    pub delta_gap: f64,
    /// Whether `tau`, prices and scores differ from phase 1.
    pub tau_changed: bool,
    pub prices_changed: bool,
    pub score_changed: bool,
    pub sides: Vec<SegmentSide>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Endpoint {
    pub direction: RangeDirection,
    pub kappa: f64,
    pub solution: Option<ModelSolution>,
    pub report: Option<EfficiencyReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase3 {
    pub endpoints: Vec<Endpoint>,
    pub direction: RangeDirection,
    pub kappa2: f64,
    /// Scaled model at `kappa1` on the selected side.
    pub start: ModelSolution,
    pub start_report: EfficiencyReport,
    pub solution: ModelSolution,
    pub report: EfficiencyReport,
    pub interval: [f64; 2],
    pub basis: Basis,
    pub tau_changed: bool,
    pub prices_changed: bool,
    pub w_changed: bool,
    pub ratios_changed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub kappa: f64,
    pub inside: bool,
    pub solution: ModelSolution,
    pub report: EfficiencyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commitment {
    pub kappa: f64,
    pub efficiency: f64,
    pub benchmark_inputs: Vec<f64>,
    pub benchmark_outputs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureState {
    pub version: u32,
    pub dataset_hash: String,
    pub dmu: String,
    pub scenario: Scenario,
    pub phase1: Option<Phase1>,
    pub phase2: Option<Phase2>,
    pub phase3: Option<Phase3>,
    pub trials: Vec<Trial>,
    pub committed: Option<Commitment>,
}

fn differs(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).any(|(x, y)| (x - y).abs() > 1e-7 * (1.0 + x.abs().max(y.abs())))
}

fn scalar_differs(a: f64, b: f64) -> bool {
    differs(&[a], &[b])
}

impl ProcedureState {
    pub fn new(m: &DecisionMatrix, dmu: &str, scenario: Scenario) -> Result<Self, ProcedureError> {
        m.dmu_index(dmu).map_err(ModelError::from)?;
        Ok(ProcedureState {
            version: SESSION_VERSION,
            dataset_hash: m.hash(),
            dmu: dmu.to_string(),
            scenario,
            phase1: None,
            phase2: None,
            phase3: None,
            trials: Vec::new(),
            committed: None,
        })
    }

    /// Last completed phase; 4 once a scalar is committed.
    pub fn phase(&self) -> u8 {
        if self.committed.is_some() {
            4
        } else if self.phase3.is_some() {
            3
        } else if self.phase2.is_some() {
            2
        } else if self.phase1.is_some() {
            1
        } else {
            0
        }
    }

    pub fn check_dataset(&self, m: &DecisionMatrix) -> Result<(), ProcedureError> {
        let h = m.hash();
        if h != self.dataset_hash {
            return Err(ProcedureError::DatasetMismatch {
                expected: h,
                found: self.dataset_hash.clone(),
            });
        }
        if self.version != SESSION_VERSION {
            return Err(ProcedureError::Version(self.version));
        }
        Ok(())
    }

    fn index(&self, m: &DecisionMatrix) -> Result<usize, ProcedureError> {
        self.check_dataset(m)?;
        Ok(m.dmu_index(&self.dmu).map_err(ModelError::from)?)
    }

    /// Phase 1: unscaled model and its intensity sum.
    pub fn run_phase1(&mut self, m: &DecisionMatrix) -> Result<&Phase1, ProcedureError> {
        let o = self.index(m)?;
        if self.committed.is_some() {
            return Err(ProcedureError::Finished);
        }
        let pt = models::evaluate(m, &ModelKind::Pt, o, None)?;
        let efficient = pt.step1.delta <= EFFICIENT_TOL;
        let record = match self.scenario {
            Scenario::Inefficiency => {
                let directive = efficient.then(|| "DMU is efficient; rerun with the super-efficiency scenario".to_string());
                Phase1 {
                    report: analysis::report(m, &pt),
                    kappa1: models::first_scalar(&pt),
                    solution: pt,
                    efficient,
                    directive,
                }
            }
            Scenario::Super => {
                if !efficient {
                    return Err(ProcedureError::NotEfficient(self.dmu.clone()));
                }
                let spt = models::evaluate(m, &ModelKind::Spt, o, None)?;
                Phase1 {
                    report: analysis::report(m, &spt),
                    kappa1: models::first_scalar(&spt),
                    solution: spt,
                    efficient,
                    directive: None,
                }
            }
        };
        self.phase2 = None;
        self.phase3 = None;
        self.trials.clear();
        self.phase1 = Some(record);
        Ok(self.phase1.as_ref().unwrap())
    }

    /// Phase 2: scaled model at `kappa1` plus the one-sided bases around it.
    pub fn run_phase2(&mut self, m: &DecisionMatrix) -> Result<&Phase2, ProcedureError> {
        let o = self.index(m)?;
        if self.committed.is_some() {
            return Err(ProcedureError::Finished);
        }
        let p1 = self.phase1.as_ref().ok_or(ProcedureError::OutOfOrder { wanted: 2, needed: 1 })?;
        if p1.efficient && self.scenario == Scenario::Inefficiency {
            return Err(ProcedureError::AlreadyEfficient(self.dmu.clone()));
        }
        let kappa1 = p1.kappa1;
        let kind = self.scenario.scaled(kappa1);
        let ts1 = models::evaluate(m, &kind, o, None)?;
        let sides = segment_sides(m, &kind, o, &ts1.step1.tap_basis)?;
        let delta_gap = (ts1.step1.delta - p1.solution.step1.delta).abs();
        let ts1_report = analysis::report(m, &ts1);
        let record = Phase2 {
            same_delta: delta_gap <= models::DUALITY_TOL * p1.solution.step1.delta.abs().max(1.0),
            delta_gap,
            tau_changed: scalar_differs(ts1.step2.tau, p1.solution.step2.tau),
            prices_changed: differs(&ts1.step2.v, &p1.solution.step2.v) || differs(&ts1.step2.u, &p1.solution.step2.u),
            score_changed: scalar_differs(ts1_report.efficiency, p1.report.efficiency),
            report: ts1_report,
            solution: ts1,
            sides,
        };
        self.phase3 = None;
        self.trials.clear();
        self.phase2 = Some(record);
        Ok(self.phase2.as_ref().unwrap())
    }

    /// Phase 3: evaluate the finite segment endpoints and choose `kappa2`.
    ///
    /// Sides whose intensity-row price `w` is positive are preferred; among the
    /// remaining candidates the higher endpoint score wins.
    pub fn run_phase3(&mut self, m: &DecisionMatrix) -> Result<&Phase3, ProcedureError> {
        let o = self.index(m)?;
        if self.committed.is_some() {
            return Err(ProcedureError::Finished);
        }
        let p2 = self.phase2.as_ref().ok_or(ProcedureError::OutOfOrder { wanted: 3, needed: 2 })?;
        let kappa1 = self.phase1.as_ref().expect("phase 1 precedes phase 2").kappa1;
        let mut endpoints = Vec::new();
        let mut candidates: Vec<(usize, &SegmentSide, ModelSolution, EfficiencyReport)> = Vec::new();
        for side in &p2.sides {
            let (Some(kappa), Some(_)) = (side.endpoint, side.solution.as_ref()) else {
                continue;
            };
            let kind = self.scenario.scaled(kappa);
            let result = evaluate_pinned(m, &kind, o, &side.basis);
            match result {
                Ok(sol) => {
                    let rep = analysis::report(m, &sol);
                    endpoints.push(Endpoint {
                        direction: side.direction,
                        kappa,
                        solution: Some(sol.clone()),
                        report: Some(rep.clone()),
                        error: None,
                    });
                    candidates.push((endpoints.len() - 1, side, sol, rep));
                }
                Err(e) => endpoints.push(Endpoint {
                    direction: side.direction,
                    kappa,
                    solution: None,
                    report: None,
                    error: Some(e.to_string()),
                }),
            }
        }
        if candidates.iter().any(|c| c.1.w > MIN_SEGMENT) {
            candidates.retain(|c| c.1.w > MIN_SEGMENT);
        }
        let best = candidates
            .into_iter()
            .max_by(|a, b| a.3.efficiency.total_cmp(&b.3.efficiency))
            .ok_or(ProcedureError::NoEndpoint(kappa1))?;
        let (_, side, ts2, ts2_report) = best;
        let start = side.solution.clone().expect("candidate sides carry a solution");
        let start_report = analysis::report(m, &start);
        let kappa2 = ts2.kappa().expect("scaled model");
        let record = Phase3 {
            direction: side.direction,
            kappa2,
            interval: [kappa1.min(kappa2), kappa1.max(kappa2)],
            basis: side.basis.clone(),
            tau_changed: scalar_differs(ts2.step2.tau, start.step2.tau),
            prices_changed: differs(&ts2.step2.v, &start.step2.v) || differs(&ts2.step2.u, &start.step2.u),
            w_changed: scalar_differs(ts2.step2.w.unwrap_or(0.0), start.step2.w.unwrap_or(0.0)),
            ratios_changed: differs(&ts2.step2.q, &start.step2.q) || differs(&ts2.step2.p, &start.step2.p),
            endpoints,
            start,
            start_report,
            solution: ts2,
            report: ts2_report,
        };
        self.trials.clear();
        self.phase3 = Some(record);
        Ok(self.phase3.as_ref().unwrap())
    }

    /// Phase 4: evaluate the scaled model at `kappa`.
    ///
    /// Inside the phase-3 interval the selected segment basis is used; outside
    /// it the model is solved cold, and only when `allow_outside` is set.
    pub fn try_kappa(&mut self, m: &DecisionMatrix, kappa: f64, allow_outside: bool) -> Result<&Trial, ProcedureError> {
        let o = self.index(m)?;
        if self.committed.is_some() {
            return Err(ProcedureError::Finished);
        }
        let p3 = self.phase3.as_ref().ok_or(ProcedureError::OutOfOrder { wanted: 4, needed: 3 })?;
        let [lo, hi] = p3.interval;
        let slack = 1e-12 * hi.abs().max(1.0);
        let inside = kappa >= lo - slack && kappa <= hi + slack;
        if !inside && !allow_outside {
            return Err(ProcedureError::OutsideInterval { kappa, lo, hi });
        }
        let kind = self.scenario.scaled(kappa);
        let sol = if inside {
            evaluate_pinned(m, &kind, o, &p3.basis)?
        } else {
            models::evaluate(m, &kind, o, None)?
        };
        let report = analysis::report(m, &sol);
        self.trials.push(Trial {
            kappa,
            inside,
            solution: sol,
            report,
        });
        Ok(self.trials.last().unwrap())
    }

    /// Freezes a previously tried scalar and its benchmarks.
    pub fn commit(&mut self, kappa: f64) -> Result<&Commitment, ProcedureError> {
        if self.committed.is_some() {
            return Err(ProcedureError::Finished);
        }
        let trial = self
            .trials
            .iter()
            .rev()
            .find(|t| (t.kappa - kappa).abs() <= KAPPA_MATCH_TOL * kappa.abs().max(1.0))
            .ok_or(ProcedureError::NotTried(kappa))?;
        self.committed = Some(Commitment {
            kappa: trial.kappa,
            efficiency: trial.report.efficiency,
            benchmark_inputs: trial.report.benchmark_inputs.clone(),
            benchmark_outputs: trial.report.benchmark_outputs.clone(),
        });
        Ok(self.committed.as_ref().unwrap())
    }

    pub fn run_phase(&mut self, m: &DecisionMatrix, phase: u8) -> Result<serde_json::Value, ProcedureError> {
        let value = match phase {
            1 => serde_json::to_value(self.run_phase1(m)?),
            2 => serde_json::to_value(self.run_phase2(m)?),
            3 => serde_json::to_value(self.run_phase3(m)?),
            other => return Err(ProcedureError::Malformed(format!("phase {other} is not 1, 2 or 3"))),
        };
        Ok(value.expect("phase records serialize"))
    }
}

// pinned evaluation, falling back to a cold solve if the basis is not certified at this data
fn evaluate_pinned(m: &DecisionMatrix, kind: &ModelKind, o: usize, basis: &Basis) -> Result<ModelSolution, ModelError> {
    match models::evaluate_with_basis(m, kind, o, basis) {
        Ok(s) => Ok(s),
        Err(ModelError::Lp(simplex::LpError::BasisNotOptimal { .. })) | Err(ModelError::Lp(simplex::LpError::NumericInstability(_))) => {
            models::evaluate(m, kind, o, None)
        }
        Err(e) => Err(e),
    }
}

/// One-sided bases of the scaled adjustment program around its current scalar.
pub fn segment_sides(
    m: &DecisionMatrix,
    kind: &ModelKind,
    o: usize,
    basis: &Basis,
) -> Result<Vec<SegmentSide>, ProcedureError> {
    let kappa = kind.kappa().expect("scaled model");
    let lp = models::build_program(m, kind, o, 1.0, Side::Tap, None)?;
    let base = simplex::evaluate_basis(&lp, basis).map_err(ModelError::from)?;
    let row = m.m() + m.s();
    let mut sides = Vec::new();
    for direction in [RangeDirection::Decrease, RangeDirection::Increase] {
        let Some(sol) = simplex::one_sided_basis(&lp, &base, row, direction).map_err(ModelError::from)? else {
            continue;
        };
        let range = simplex::rhs_range(&lp, &sol, row).map_err(ModelError::from)?;
        let allowance = range.allowance(direction);
        if allowance <= MIN_SEGMENT {
            continue;
        }
        let endpoint = allowance.is_finite().then(|| match direction {
            RangeDirection::Decrease => kappa - allowance,
            RangeDirection::Increase => kappa + allowance,
        });
        let endpoint = endpoint.filter(|k| *k > 0.0);
        let (solution, error) = match models::evaluate_with_basis(m, kind, o, &sol.basis) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        };
        sides.push(SegmentSide {
            direction,
            basis: sol.basis.clone(),
            w: sol.duals[row],
            allowance,
            endpoint,
            solution,
            error,
        });
    }
    Ok(sides)
}

/// Runs phases 1 to 3 for DMU `o`, picking the scenario from its efficiency.
pub fn prepare(m: &DecisionMatrix, dmu: &str) -> Result<ProcedureState, ProcedureError> {
    let mut state = ProcedureState::new(m, dmu, Scenario::Inefficiency)?;
    if state.run_phase1(m)?.efficient {
        state = ProcedureState::new(m, dmu, Scenario::Super)?;
        state.run_phase1(m)?;
    }
    state.run_phase2(m)?;
    state.run_phase3(m)?;
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarMatch {
    pub kappa: f64,
    pub efficiency: f64,
    pub iterations: usize,
}

/// Bisection on `kappa -> E` over the phase-3 interval for a target score.
pub fn find_matching_scalar(m: &DecisionMatrix, dmu: &str, target: f64) -> Result<ScalarMatch, ProcedureError> {
    let state = prepare(m, dmu)?;
    let o = m.dmu_index(dmu).map_err(ModelError::from)?;
    let p3 = state.phase3.as_ref().expect("prepared");
    let kappa1 = state.phase1.as_ref().expect("prepared").kappa1;
    let score = |k: f64| -> Result<f64, ProcedureError> {
        let sol = evaluate_pinned(m, &state.scenario.scaled(k), o, &p3.basis)?;
        Ok(sol.efficiency())
    };
    let mut a = kappa1;
    let mut b = p3.kappa2;
    let mut ea = score(a)?;
    let eb = score(b)?;
    if (ea - target).abs() <= MATCH_TOL {
        return Ok(ScalarMatch {
            kappa: a,
            efficiency: ea,
            iterations: 0,
        });
    }
    if (eb - target).abs() <= MATCH_TOL {
        return Ok(ScalarMatch {
            kappa: b,
            efficiency: eb,
            iterations: 0,
        });
    }
    if (ea - target).signum() == (eb - target).signum() {
        return Err(ProcedureError::NotBracketed {
            target,
            lo_kappa: a,
            lo_e: ea,
            hi_kappa: b,
            hi_e: eb,
        });
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (a + b);
        let em = score(mid)?;
        if (em - target).abs() <= MATCH_TOL || (b - a).abs() <= 1e-12 {
            return Ok(ScalarMatch {
                kappa: mid,
                efficiency: em,
                iterations,
            });
        }
        if (em - target).signum() == (ea - target).signum() {
            a = mid;
            ea = em;
        } else {
            b = mid;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rank: usize,
    pub dmu: String,
    pub efficient: bool,
    pub model: String,
    pub kappa: Option<f64>,
    pub score: f64,
    /// Weakest criterion (largest adjustment ratio) for inefficient DMUs,
    /// strongest (largest allowance ratio) for efficient ones.
    pub criterion: String,
    pub criterion_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub dataset_hash: String,
    pub rows: Vec<RankRow>,
}

fn largest_ratio(m: &DecisionMatrix, sol: &ModelSolution) -> (String, f64) {
    let ins = m.inputs().iter().zip(&sol.step2.q);
    let outs = m.outputs().iter().zip(&sol.step2.p);
    ins.chain(outs)
        .fold((String::new(), f64::NEG_INFINITY), |best, (c, &r)| {
            if r > best.1 + 1e-12 {
                (c.label.clone(), r)
            } else {
                best
            }
        })
}

fn rank_one(m: &DecisionMatrix, j: usize, scalars: &BTreeMap<String, f64>) -> Result<RankRow, ModelError> {
    let label = &m.dmus()[j];
    let pt = models::evaluate(m, &ModelKind::Pt, j, None)?;
    let efficient = pt.step1.delta <= EFFICIENT_TOL;
    let kappa = scalars.get(label).copied();
    let kind = match (efficient, kappa) {
        (true, Some(k)) => ModelKind::Stsc { kappa: k },
        (true, None) => ModelKind::Spt,
        (false, Some(k)) => ModelKind::Tsc { kappa: k },
        (false, None) => ModelKind::Pt,
    };
    let sol = if kind == ModelKind::Pt { pt } else { models::evaluate(m, &kind, j, None)? };
    let (criterion, criterion_ratio) = largest_ratio(m, &sol);
    Ok(RankRow {
        rank: 0,
        dmu: label.clone(),
        efficient,
        model: kind.name().to_string(),
        kappa,
        score: sol.efficiency(),
        criterion,
        criterion_ratio,
    })
}

/// Ranks all DMUs: efficient ones by super-efficiency first, then the rest by
/// efficiency; equal scores fall back to label order.
pub fn rank(m: &DecisionMatrix, scalars: &BTreeMap<String, f64>) -> Result<RankingTable, ModelError> {
    let results: Vec<Result<RankRow, ModelError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..m.n()).map(|j| scope.spawn(move || rank_one(m, j, scalars))).collect();
        handles.into_iter().map(|h| h.join().expect("rank worker panicked")).collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let key = |s: f64| (s * 1e9).round() as i64;
    rows.sort_by(|a, b| {
        b.efficient
            .cmp(&a.efficient)
            .then(key(b.score).cmp(&key(a.score)))
            .then(a.dmu.cmp(&b.dmu))
    });
    for (k, r) in rows.iter_mut().enumerate() {
        r.rank = k + 1;
    }
    Ok(RankingTable {
        dataset_hash: m.hash(),
        rows,
    })
}

/// Several DMUs' procedure states for one dataset, as stored in a session file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionFile {
    pub version: u32,
    pub dataset_hash: String,
    pub procedures: BTreeMap<String, ProcedureState>,
}

impl SessionFile {
    pub fn new(m: &DecisionMatrix) -> Self {
        SessionFile {
            version: SESSION_VERSION,
            dataset_hash: m.hash(),
            procedures: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str, m: &DecisionMatrix) -> Result<Self, ProcedureError> {
        let s: SessionFile = serde_json::from_str(text).map_err(|e| ProcedureError::Malformed(e.to_string()))?;
        if s.version != SESSION_VERSION {
            return Err(ProcedureError::Version(s.version));
        }
        let h = m.hash();
        if s.dataset_hash != h {
            return Err(ProcedureError::DatasetMismatch {
                expected: h,
                found: s.dataset_hash,
            });
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session serializes")
    }
}
