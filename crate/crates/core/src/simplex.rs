//! Dense two-phase simplex.
//!
//! Every program is rewritten into an internal standard form
//! `min c'z, A'z = b', z >= 0` before solving: bounded variables are shifted,
//! finite upper bounds become hidden rows, free variables are split, rows and
//! columns are equilibrated to unit max-norm and each row gets a slack (for
//! inequalities) plus an artificial. Reported values are mapped back to the
//! caller's program, so duals are `d objective / d rhs` in the caller's sense.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Dual feasibility (reduced cost sign) tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-7;
/// Complementary slackness tolerance.
pub const COMPLEMENTARITY_TOL: f64 = 1e-7;
/// Smallest pivot magnitude accepted.
pub const PIVOT_TOL: f64 = 1e-10;

const MAX_ITERATIONS: usize = 50_000;
const DEGENERATE_RUN_LIMIT: usize = 50;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("numerical instability: {0}")]
    NumericInstability(String),
    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("row {0} is out of range")]
    RowOutOfRange(usize),
    #[error("basis does not match the shape of the program")]
    BasisMismatch,
    #[error("basis is not optimal (primal feasible: {primal_feasible}, dual feasible: {dual_feasible})")]
    BasisNotOptimal {
        primal_feasible: bool,
        dual_feasible: bool,
    },
    #[error("operation requires an optimal solution")]
    NotOptimal,
    #[error("vertex enumeration supports at most {max} variables, got {got}")]
    TooLarge { max: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub domains: Vec<Domain>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl LinearProgram {
    /// New program over `objective.len()` nonnegative variables and no rows.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            domains: vec![Domain::NonNegative; n],
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    /// Appends a row and returns its index.
    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_domain(&mut self, var: usize, domain: Domain) {
        self.domains[var] = domain;
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    /// Effective `[lower, upper]` after combining domain and explicit bounds.
    pub fn effective_bounds(&self, var: usize) -> (f64, f64) {
        let base = match self.domains[var] {
            Domain::NonNegative => 0.0,
            Domain::Free => f64::NEG_INFINITY,
        };
        let lo = match self.lower[var] {
            Some(l) => l.max(base),
            None => base,
        };
        let hi = self.upper[var].unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.domains.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Dimension("variable attribute lengths differ from objective".into()));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(LpError::Dimension(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coefficients.len()
                )));
            }
            if !row.rhs.is_finite() || row.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(LpError::Dimension(format!("row {i} has non-finite data")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Dimension("objective has non-finite data".into()));
        }
        for j in 0..n {
            let (lo, hi) = self.effective_bounds(j);
            if lo > hi {
                return Err(LpError::Dimension(format!("variable {j} has lower bound above upper bound")));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.constraints {
            let lhs: f64 = row.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            let (lo, hi) = self.effective_bounds(j);
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Opaque basis identifier: internal standard-form columns, one per internal row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub columns: Vec<usize>,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, objective: f64, iterations: usize) -> Self {
        LpSolution {
            status,
            objective,
            x: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            basis: Basis {
                columns: Vec::new(),
                width: 0,
            },
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `b'y` plus the bound terms carried by nonzero reduced costs.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let rows: f64 = lp.constraints.iter().zip(&self.duals).map(|(r, y)| r.rhs * y).sum();
        let bounds: f64 = self
            .reduced_costs
            .iter()
            .zip(&self.x)
            .enumerate()
            .map(|(j, (d, x))| {
                let (lo, hi) = lp.effective_bounds(j);
                if d.abs() <= OPTIMALITY_TOL {
                    0.0
                } else if hi.is_finite() && (x - hi).abs() <= (x - lo).abs() {
                    d * hi
                } else if lo.is_finite() {
                    d * lo
                } else {
                    d * x
                }
            })
            .sum();
        rows + bounds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeDirection {
    Increase,
    Decrease,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsRange {
    pub row: usize,
    pub rhs: f64,
    pub dual: f64,
    /// `f64::INFINITY` when the basis stays feasible for any increase.
    pub allowable_increase: f64,
    pub allowable_decrease: f64,
}

impl RhsRange {
    pub fn allowance(&self, direction: RangeDirection) -> f64 {
        match direction {
            RangeDirection::Increase => self.allowable_increase,
            RangeDirection::Decrease => self.allowable_decrease,
        }
    }
}

// x_j = offset + sum(coef * z[col])
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    terms: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
struct StandardForm {
    rows: usize,
    user_rows: usize,
    width: usize,
    art_start: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    row_scale: Vec<f64>,
    row_sign: Vec<f64>,
    col_scale: Vec<f64>,
    vars: Vec<VarMap>,
    obj_sign: f64,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Result<Self, LpError> {
        lp.check()?;
        let n = lp.num_vars();
        let mut vars = Vec::with_capacity(n);
        let mut n_struct = 0usize;
        let mut hidden: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            let (lo, hi) = lp.effective_bounds(j);
            let map = if lo.is_finite() {
                let col = n_struct;
                n_struct += 1;
                if hi.is_finite() {
                    hidden.push((col, hi - lo));
                }
                VarMap {
                    offset: lo,
                    terms: vec![(col, 1.0)],
                }
            } else if hi.is_finite() {
                let col = n_struct;
                n_struct += 1;
                VarMap {
                    offset: hi,
                    terms: vec![(col, -1.0)],
                }
            } else {
                let col = n_struct;
                n_struct += 2;
                VarMap {
                    offset: 0.0,
                    terms: vec![(col, 1.0), (col + 1, -1.0)],
                }
            };
            vars.push(map);
        }

        let user_rows = lp.num_rows();
        let rows = user_rows + hidden.len();
        let mut sa = vec![vec![0.0; n_struct]; rows];
        let mut rhs = vec![0.0; rows];
        let mut rel = Vec::with_capacity(rows);
        for (i, row) in lp.constraints.iter().enumerate() {
            let mut shift = 0.0;
            for (j, &aij) in row.coefficients.iter().enumerate() {
                if aij == 0.0 {
                    continue;
                }
                shift += aij * vars[j].offset;
                for &(col, coef) in &vars[j].terms {
                    sa[i][col] += aij * coef;
                }
            }
            rhs[i] = row.rhs - shift;
            rel.push(row.relation);
        }
        for (k, &(col, cap)) in hidden.iter().enumerate() {
            sa[user_rows + k][col] = 1.0;
            rhs[user_rows + k] = cap;
            rel.push(Relation::Le);
        }

        let obj_sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut sc = vec![0.0; n_struct];
        for (j, &cj) in lp.objective.iter().enumerate() {
            for &(col, coef) in &vars[j].terms {
                sc[col] += obj_sign * cj * coef;
            }
        }

        let mut row_scale = vec![1.0; rows];
        for i in 0..rows {
            let m = sa[i].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if m > 0.0 {
                row_scale[i] = 1.0 / m;
            }
        }
        let mut col_scale = vec![1.0; n_struct];
        for (j, scale) in col_scale.iter_mut().enumerate() {
            let m = (0..rows).fold(0.0f64, |acc, i| acc.max((sa[i][j] * row_scale[i]).abs()));
            if m > 0.0 {
                *scale = 1.0 / m;
            }
        }

        let n_slack = rel.iter().filter(|r| **r != Relation::Eq).count();
        let art_start = n_struct + n_slack;
        let width = art_start + rows;
        let mut a = vec![vec![0.0; width]; rows];
        let mut b = vec![0.0; rows];
        let mut row_sign = vec![1.0; rows];
        let mut slack = n_struct;
        for i in 0..rows {
            for j in 0..n_struct {
                a[i][j] = sa[i][j] * row_scale[i] * col_scale[j];
            }
            match rel[i] {
                Relation::Le => {
                    a[i][slack] = 1.0;
                    slack += 1;
                }
                Relation::Ge => {
                    a[i][slack] = -1.0;
                    slack += 1;
                }
                Relation::Eq => {}
            }
            b[i] = rhs[i] * row_scale[i];
            if b[i] < 0.0 {
                row_sign[i] = -1.0;
                b[i] = -b[i];
                for v in a[i][..art_start].iter_mut() {
                    *v = -*v;
                }
            }
            a[i][art_start + i] = 1.0;
        }
        let mut c = vec![0.0; width];
        for j in 0..n_struct {
            c[j] = sc[j] * col_scale[j];
        }

        Ok(StandardForm {
            rows,
            user_rows,
            width,
            art_start,
            a,
            b,
            c,
            row_scale,
            row_sign,
            col_scale,
            vars,
            obj_sign,
        })
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.art_start
    }

    fn check_basis(&self, basis: &Basis) -> Result<(), LpError> {
        if basis.width != self.width
            || basis.columns.len() != self.rows
            || basis.columns.iter().any(|&c| c >= self.width)
        {
            return Err(LpError::BasisMismatch);
        }
        Ok(())
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(mut m: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, LpError> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    for col in 0..n {
        let (p, mag) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag < PIVOT_TOL {
            return Err(LpError::NumericInstability(format!(
                "basis matrix is singular (pivot {mag:e} in column {col})"
            )));
        }
        m.swap(col, p);
        inv.swap(col, p);
        let piv = m[col][col];
        for v in m[col].iter_mut() {
            *v /= piv;
        }
        for v in inv[col].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                m[r][k] -= f * m[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    Ok(inv)
}

struct Factored {
    binv: Vec<Vec<f64>>,
    xb: Vec<f64>,
    y: Vec<f64>,
    reduced: Vec<f64>,
    primal_feasible: bool,
    dual_feasible: bool,
}

fn factor(sf: &StandardForm, basis: &[usize]) -> Result<Factored, LpError> {
    let m = sf.rows;
    let bmat: Vec<Vec<f64>> = (0..m).map(|i| basis.iter().map(|&c| sf.a[i][c]).collect()).collect();
    let binv = invert(bmat.clone())?;
    let mut xb: Vec<f64> = (0..m).map(|i| (0..m).map(|k| binv[i][k] * sf.b[k]).sum()).collect();
    // one round of iterative refinement
    let resid: Vec<f64> = (0..m)
        .map(|i| sf.b[i] - (0..m).map(|k| bmat[i][k] * xb[k]).sum::<f64>())
        .collect();
    for i in 0..m {
        xb[i] += (0..m).map(|k| binv[i][k] * resid[k]).sum::<f64>();
    }
    let y: Vec<f64> = (0..m)
        .map(|k| (0..m).map(|i| sf.c[basis[i]] * binv[i][k]).sum())
        .collect();
    let reduced: Vec<f64> = (0..sf.width)
        .map(|j| sf.c[j] - (0..m).map(|i| y[i] * sf.a[i][j]).sum::<f64>())
        .collect();
    let primal_feasible = xb.iter().zip(basis).all(|(&v, &col)| {
        if sf.is_artificial(col) {
            v.abs() <= FEASIBILITY_TOL
        } else {
            v >= -FEASIBILITY_TOL
        }
    });
    let mut in_basis = vec![false; sf.width];
    for &col in basis {
        in_basis[col] = true;
    }
    let dual_feasible = (0..sf.art_start).all(|j| in_basis[j] || reduced[j] >= -OPTIMALITY_TOL);
    Ok(Factored {
        binv,
        xb,
        y,
        reduced,
        primal_feasible,
        dual_feasible,
    })
}

fn map_solution(lp: &LinearProgram, sf: &StandardForm, basis: &[usize], f: &Factored, iterations: usize) -> LpSolution {
    let mut z = vec![0.0; sf.width];
    for (i, &col) in basis.iter().enumerate() {
        z[col] = f.xb[i];
    }
    let x: Vec<f64> = sf
        .vars
        .iter()
        .map(|vm| vm.offset + vm.terms.iter().map(|&(col, coef)| coef * z[col] * sf.col_scale[col]).sum::<f64>())
        .collect();
    let duals: Vec<f64> = (0..sf.user_rows)
        .map(|i| sf.obj_sign * sf.row_sign[i] * sf.row_scale[i] * f.y[i])
        .collect();
    let reduced_costs: Vec<f64> = (0..lp.num_vars())
        .map(|j| {
            lp.objective[j]
                - lp
                    .constraints
                    .iter()
                    .zip(&duals)
                    .map(|(r, y)| r.coefficients[j] * y)
                    .sum::<f64>()
        })
        .collect();
    LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&x),
        x,
        duals,
        reduced_costs,
        basis: Basis {
            columns: basis.to_vec(),
            width: sf.width,
        },
        iterations,
    }
}

struct Tableau {
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    d: Vec<f64>,
}

impl Tableau {
    fn from_identity(sf: &StandardForm) -> Self {
        Tableau {
            t: sf.a.clone(),
            rhs: sf.b.clone(),
            basis: (sf.art_start..sf.width).collect(),
            d: vec![0.0; sf.width],
        }
    }

    fn from_basis(sf: &StandardForm, basis: &[usize]) -> Result<Self, LpError> {
        let f = factor(sf, basis)?;
        let m = sf.rows;
        let t: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..sf.width)
                    .map(|j| (0..m).map(|k| f.binv[i][k] * sf.a[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(Tableau {
            t,
            rhs: f.xb,
            basis: basis.to_vec(),
            d: f.reduced,
        })
    }

    fn price(&mut self, cost: &[f64]) {
        let width = cost.len();
        for j in 0..width {
            let mut v = cost[j];
            for (i, &col) in self.basis.iter().enumerate() {
                v -= cost[col] * self.t[i][j];
            }
            self.d[j] = v;
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.t[r][q];
        for v in self.t[r].iter_mut() {
            *v /= piv;
        }
        self.rhs[r] /= piv;
        let prow = self.t[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][q];
            if f == 0.0 {
                continue;
            }
            for (v, p) in self.t[i].iter_mut().zip(&prow) {
                *v -= f * p;
            }
            self.t[i][q] = 0.0;
            self.rhs[i] -= f * prhs;
            if self.rhs[i].abs() < 1e-14 {
                self.rhs[i] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, p) in self.d.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            self.d[q] = 0.0;
        }
        self.basis[r] = q;
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

fn run_simplex(
    tab: &mut Tableau,
    eligible: &dyn Fn(usize) -> bool,
    iterations: &mut usize,
) -> Result<Outcome, LpError> {
    let width = tab.d.len();
    let mut bland = false;
    let mut degenerate_run = 0usize;
    let warm_limit = 20 * (tab.t.len() + width);
    let mut in_basis = vec![false; width];
    for &c in &tab.basis {
        in_basis[c] = true;
    }
    loop {
        if *iterations >= MAX_ITERATIONS {
            return Err(LpError::IterationLimit(MAX_ITERATIONS));
        }
        if !bland && (degenerate_run > DEGENERATE_RUN_LIMIT || *iterations > warm_limit) {
            bland = true;
        }
        let mut entering: Option<usize> = None;
        let mut best = -OPTIMALITY_TOL;
        for j in 0..width {
            if in_basis[j] || !eligible(j) {
                continue;
            }
            if tab.d[j] < best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = tab.d[j];
            }
        }
        let Some(q) = entering else {
            return Ok(Outcome::Optimal);
        };
        let mut leave: Option<usize> = None;
        let mut min_ratio = f64::INFINITY;
        for i in 0..tab.t.len() {
            let a = tab.t[i][q];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = tab.rhs[i].max(0.0) / a;
            match leave {
                None => {
                    leave = Some(i);
                    min_ratio = ratio;
                }
                Some(l) => {
                    let tie = (ratio - min_ratio).abs() <= 1e-12 * (1.0 + min_ratio.abs());
                    if ratio < min_ratio && !tie {
                        leave = Some(i);
                        min_ratio = ratio;
                    } else if tie {
                        let better = if bland {
                            tab.basis[i] < tab.basis[l]
                        } else {
                            a > tab.t[l][q]
                        };
                        if better {
                            leave = Some(i);
                            min_ratio = min_ratio.min(ratio);
                        }
                    }
                }
            }
        }
        let Some(r) = leave else {
            return Ok(Outcome::Unbounded);
        };
        if min_ratio <= 1e-14 {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        in_basis[tab.basis[r]] = false;
        in_basis[q] = true;
        tab.pivot(r, q);
        *iterations += 1;
    }
}

/// Solves `lp` to optimality or reports infeasibility / unboundedness.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let sf = StandardForm::build(lp)?;
    let mut iterations = 0usize;
    let mut tab = Tableau::from_identity(&sf);

    let phase1_cost: Vec<f64> = (0..sf.width).map(|j| if sf.is_artificial(j) { 1.0 } else { 0.0 }).collect();
    tab.price(&phase1_cost);
    run_simplex(&mut tab, &|_| true, &mut iterations)?;
    let infeasibility: f64 = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(c, _)| sf.is_artificial(**c))
        .map(|(_, v)| v.max(0.0))
        .sum();
    if infeasibility > FEASIBILITY_TOL {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, f64::NAN, iterations));
    }

    // drive zero-valued artificials out of the basis where a structural column can replace them
    for r in 0..sf.rows {
        if !sf.is_artificial(tab.basis[r]) {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..sf.art_start {
            if tab.basis.contains(&j) {
                continue;
            }
            let mag = tab.t[r][j].abs();
            if mag > 1e-9 && best.map_or(true, |(_, m)| mag > m) {
                best = Some((j, mag));
            }
        }
        if let Some((j, _)) = best {
            tab.rhs[r] = 0.0;
            tab.pivot(r, j);
            iterations += 1;
        }
    }

    tab.price(&sf.c);
    let art_start = sf.art_start;
    match run_simplex(&mut tab, &|j| j < art_start, &mut iterations)? {
        Outcome::Unbounded => {
            let obj = if lp.sense == Sense::Maximize {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            Ok(LpSolution::without_point(LpStatus::Unbounded, obj, iterations))
        }
        Outcome::Optimal => {
            let f = factor(&sf, &tab.basis)?;
            if !f.primal_feasible {
                return Err(LpError::NumericInstability(
                    "final basis lost primal feasibility on refactorization".into(),
                ));
            }
            Ok(map_solution(lp, &sf, &tab.basis, &f, iterations))
        }
    }
}

/// Re-evaluates `basis` on (possibly changed) data and certifies it optimal.
pub fn evaluate_basis(lp: &LinearProgram, basis: &Basis) -> Result<LpSolution, LpError> {
    let sf = StandardForm::build(lp)?;
    sf.check_basis(basis)?;
    let f = factor(&sf, &basis.columns)?;
    if !(f.primal_feasible && f.dual_feasible) {
        return Err(LpError::BasisNotOptimal {
            primal_feasible: f.primal_feasible,
            dual_feasible: f.dual_feasible,
        });
    }
    Ok(map_solution(lp, &sf, &basis.columns, &f, 0))
}

// derivative of the basic variables (internal units) with respect to the caller's rhs of `row`
fn rhs_direction(sf: &StandardForm, f: &Factored, row: usize) -> Vec<f64> {
    let s = sf.row_sign[row] * sf.row_scale[row];
    (0..sf.rows).map(|i| f.binv[i][row] * s).collect()
}

/// Allowable increase and decrease of the rhs of `row` keeping the basis of `solution` optimal.
pub fn rhs_range(lp: &LinearProgram, solution: &LpSolution, row: usize) -> Result<RhsRange, LpError> {
    if !solution.is_optimal() {
        return Err(LpError::NotOptimal);
    }
    if row >= lp.num_rows() {
        return Err(LpError::RowOutOfRange(row));
    }
    let sf = StandardForm::build(lp)?;
    sf.check_basis(&solution.basis)?;
    let f = factor(&sf, &solution.basis.columns)?;
    let g = rhs_direction(&sf, &f, row);
    let scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let tol = 1e-11 * scale;
    let mut inc = f64::INFINITY;
    let mut dec = f64::INFINITY;
    for (i, &col) in solution.basis.columns.iter().enumerate() {
        let gi = g[i];
        if gi.abs() <= tol {
            continue;
        }
        if sf.is_artificial(col) {
            inc = 0.0;
            dec = 0.0;
            continue;
        }
        let v = f.xb[i].max(0.0);
        if gi < 0.0 {
            inc = inc.min(v / -gi);
        } else {
            dec = dec.min(v / gi);
        }
    }
    Ok(RhsRange {
        row,
        rhs: lp.constraints[row].rhs,
        dual: solution.duals[row],
        allowable_increase: inc,
        allowable_decrease: dec,
    })
}

/// Optimal basis at the current data that stays optimal when the rhs of `row`
/// moves a positive amount in `direction`.
///
/// Starting from `solution`'s basis, dual simplex pivots are taken on the
/// degenerate rows that would turn negative, which leaves the primal point
/// unchanged. Returns `None` when the program becomes infeasible for any move
/// in that direction.
pub fn one_sided_basis(
    lp: &LinearProgram,
    solution: &LpSolution,
    row: usize,
    direction: RangeDirection,
) -> Result<Option<LpSolution>, LpError> {
    if !solution.is_optimal() {
        return Err(LpError::NotOptimal);
    }
    if row >= lp.num_rows() {
        return Err(LpError::RowOutOfRange(row));
    }
    let sf = StandardForm::build(lp)?;
    sf.check_basis(&solution.basis)?;
    let sign = match direction {
        RangeDirection::Increase => 1.0,
        RangeDirection::Decrease => -1.0,
    };
    let mut tab = Tableau::from_basis(&sf, &solution.basis.columns)?;
    let mut iterations = 0usize;
    loop {
        if iterations >= MAX_ITERATIONS {
            return Err(LpError::IterationLimit(MAX_ITERATIONS));
        }
        let f = factor(&sf, &tab.basis)?;
        let g: Vec<f64> = rhs_direction(&sf, &f, row).iter().map(|v| v * sign).collect();
        let scale = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        let tol = 1e-11 * scale;
        let mut leave: Option<usize> = None;
        for i in 0..sf.rows {
            if f.xb[i] > FEASIBILITY_TOL || g[i] >= -tol {
                continue;
            }
            if sf.is_artificial(tab.basis[i]) {
                return Ok(None);
            }
            if leave.map_or(true, |l| tab.basis[i] < tab.basis[l]) {
                leave = Some(i);
            }
        }
        for i in 0..sf.rows {
            if sf.is_artificial(tab.basis[i]) && f.xb[i].abs() <= FEASIBILITY_TOL && g[i].abs() > tol {
                return Ok(None);
            }
        }
        let Some(r) = leave else {
            return Ok(Some(map_solution(lp, &sf, &tab.basis, &f, iterations)));
        };
        // dual ratio test over columns that can enter with a negative entry in row r
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..sf.art_start {
            if tab.basis.contains(&j) {
                continue;
            }
            let a = tab.t[r][j];
            if a >= -PIVOT_TOL {
                continue;
            }
            let ratio = tab.d[j].max(0.0) / -a;
            match entering {
                None => entering = Some((j, ratio)),
                Some((_, best)) if ratio < best - 1e-12 * (1.0 + best) => entering = Some((j, ratio)),
                _ => {}
            }
        }
        let Some((q, _)) = entering else {
            return Ok(None);
        };
        tab.pivot(r, q);
        iterations += 1;
        // rebuild from a fresh factorization to keep the tableau accurate
        tab = Tableau::from_basis(&sf, &tab.basis)?;
    }
}

/// Maximum number of variables accepted by [`enumerate_vertices`].
pub const ENUMERATION_MAX_VARS: usize = 12;

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for t in i + 1..k {
                idx[t] = idx[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Every basic feasible point of `lp`, by brute force over active constraint sets.
///
/// Independent of the simplex path; meant as a test oracle for small programs.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<Vec<f64>>, LpError> {
    lp.check()?;
    let n = lp.num_vars();
    if n > ENUMERATION_MAX_VARS {
        return Err(LpError::TooLarge {
            max: ENUMERATION_MAX_VARS,
            got: n,
        });
    }
    let mut forced: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut optional: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &lp.constraints {
        let entry = (row.coefficients.clone(), row.rhs);
        if row.relation == Relation::Eq {
            forced.push(entry);
        } else {
            optional.push(entry);
        }
    }
    for j in 0..n {
        let (lo, hi) = lp.effective_bounds(j);
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if lo.is_finite() {
            optional.push((e.clone(), lo));
        }
        if hi.is_finite() {
            optional.push((e, hi));
        }
    }
    if forced.len() > n {
        optional.extend(forced.drain(..));
    }
    let need = n - forced.len();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    if need > optional.len() {
        return Ok(vertices);
    }
    let mut idx: Vec<usize> = (0..need).collect();
    loop {
        let mut a: Vec<Vec<f64>> = forced.iter().map(|(r, _)| r.clone()).collect();
        let mut b: Vec<f64> = forced.iter().map(|(_, v)| *v).collect();
        for &k in &idx {
            a.push(optional[k].0.clone());
            b.push(optional[k].1);
        }
        if let Some(x) = solve_square(a, b) {
            let scale = 1.0 + x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if lp.max_violation(&x) <= 1e-9 * scale
                && !vertices
                    .iter()
                    .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-9 * scale))
            {
                vertices.push(x);
            }
        }
        if need == 0 || !next_combination(&mut idx, optional.len()) {
            break;
        }
    }
    Ok(vertices)
}

/// Best vertex objective by enumeration, `None` if there are no vertices.
pub fn enumeration_optimum(lp: &LinearProgram) -> Result<Option<(f64, Vec<f64>)>, LpError> {
    let vertices = enumerate_vertices(lp)?;
    let better = |a: f64, b: f64| match lp.sense {
        Sense::Maximize => a > b,
        Sense::Minimize => a < b,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for v in vertices {
        let val = lp.objective_value(&v);
        if best.as_ref().map_or(true, |(b, _)| better(val, *b)) {
            best = Some((val, v));
        }
    }
    Ok(best)
}
