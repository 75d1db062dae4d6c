//! Property suites over the worked example and seeded random matrices.

use super::random;
use super::Outcome;
use rand::Rng;
use std::collections::BTreeMap;
use vga_core::analysis::{reevaluate_at_benchmark, report};
use vga_core::dataset::{example_matrix, DecisionMatrix};
use vga_core::dea::{evaluate_additive, AdditiveConfig, Rts};
use vga_core::models::{
    evaluate, first_scalar, verify_complementary_slackness, ModelError, ModelKind, ModelSolution, PEER_TOL,
};
use vga_core::procedure::{find_matching_scalar, prepare, EFFICIENT_TOL};
use vga_core::simplex::{
    enumeration_optimum, evaluate_basis, rhs_range, solve, LinearProgram, LpError, RangeDirection,
};

fn tag(m: &DecisionMatrix, sol: &ModelSolution) -> String {
    match sol.kappa() {
        Some(k) => format!("{}({k:.6}) {}", sol.kind.name(), m.dmus()[sol.dmu_index]),
        None => format!("{} {}", sol.kind.name(), m.dmus()[sol.dmu_index]),
    }
}

/// Every model run of the worked example: both phases of the procedure for
/// each DMU, both ranging endpoints, the try-and-error scalar for K and the
/// midpoint trials.
pub fn example_runs() -> Vec<ModelSolution> {
    let m = example_matrix();
    let mut out = Vec::new();
    for d in m.dmus().to_vec() {
        let o = m.dmu_index(&d).unwrap();
        let mut st = prepare(&m, &d).expect("procedure");
        if st.phase1.as_ref().unwrap().solution.kind.is_super() {
            out.push(evaluate(&m, &ModelKind::Pt, o, None).expect("PT"));
        }
        out.push(st.phase1.clone().unwrap().solution);
        out.push(st.phase2.clone().unwrap().solution);
        let p3 = st.phase3.clone().unwrap();
        out.push(p3.solution.clone());
        out.extend(p3.endpoints.iter().filter_map(|e| e.solution.clone()));
        let mid = 0.5 * (p3.interval[0] + p3.interval[1]);
        out.push(st.try_kappa(&m, mid, false).unwrap().solution.clone());
        if d == "K" {
            out.push(st.try_kappa(&m, 0.718, false).unwrap().solution.clone());
        }
    }
    out
}

/// PT and TSc at the DMU's own first scalar for every DMU; sPT and sTSc at
/// the super first scalar for PT-efficient DMUs. Runs whose step-I normalizer
/// is not positive have no scores and are counted separately.
pub fn standard_runs(m: &DecisionMatrix) -> Result<(Vec<ModelSolution>, usize), String> {
    let mut out = Vec::new();
    let mut undefined = 0;
    let mut push = |r: Result<ModelSolution, ModelError>, o: usize| -> Result<Option<f64>, String> {
        match r {
            Ok(s) => {
                let k = first_scalar(&s);
                out.push(s);
                Ok(Some(k))
            }
            Err(ModelError::NonPositiveNormalizer(_)) => {
                undefined += 1;
                Ok(None)
            }
            Err(e) => Err(format!("{}: {e}", m.dmus()[o])),
        }
    };
    for o in 0..m.n() {
        let pt = evaluate(m, &ModelKind::Pt, o, None).map_err(|e| format!("{}: {e}", m.dmus()[o]))?;
        let efficient = pt.step1.delta <= EFFICIENT_TOL;
        let k1 = push(Ok(pt), o)?.unwrap();
        push(evaluate(m, &ModelKind::Tsc { kappa: k1 }, o, None), o)?;
        if efficient {
            if let Some(k1) = push(evaluate(m, &ModelKind::Spt, o, None), o)? {
                if k1 > 0.0 {
                    push(evaluate(m, &ModelKind::Stsc { kappa: k1 }, o, None), o)?;
                }
            }
        }
    }
    Ok((out, undefined))
}

pub fn t2_golden() -> Outcome {
    super::golden::outcome("T2-golden", &super::golden::table2())
}

pub fn t3_golden() -> Outcome {
    let mut out = super::golden::outcome("T3-golden", &super::golden::table3());
    let m = example_matrix();
    let mut extra = Vec::new();
    for (d, k1, k2) in [("B", 0.2417, 0.4273), ("D", 1.3411, 1.4774)] {
        let st = prepare(&m, d).unwrap();
        let got1 = st.phase1.as_ref().unwrap().kappa1;
        let got2 = st.phase3.as_ref().unwrap().kappa2;
        if (got1 - k1).abs() > 2e-3 {
            extra.push(format!("kappa1 {d}: table {k1} got {got1:.6}"));
        }
        if (got2 - k2).abs() > 2e-3 {
            extra.push(format!("kappa2 {d}: table {k2} got {got2:.6}"));
        }
    }
    out.pass &= extra.is_empty();
    out.failures.extend(extra);
    out
}

pub fn kappa3() -> Outcome {
    let m = example_matrix();
    let mut failures = Vec::new();
    let detail = match find_matching_scalar(&m, "K", 0.589) {
        Ok(found) => {
            if !(0.714..=0.722).contains(&found.kappa) {
                failures.push(format!("kappa {} outside [0.714, 0.722]", found.kappa));
            }
            format!("kappa = {:.6}, E = {:.6}", found.kappa, found.efficiency)
        }
        Err(e) => {
            failures.push(e.to_string());
            "no scalar".to_string()
        }
    };
    Outcome::new("kappa3-reproduction", failures, detail)
}

pub fn duality() -> Outcome {
    let m = example_matrix();
    let runs = example_runs();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for sol in &runs {
        for step in [&sol.step1, &sol.step2] {
            let gap = (step.delta - step.big_delta).abs();
            worst = worst.max(gap);
            if gap > 1e-7 {
                failures.push(format!("{}: |delta - Delta| = {gap:e}", tag(&m, sol)));
            }
        }
        match verify_complementary_slackness(&m, sol) {
            Ok(r) => {
                let res = r.peer_rows.max(r.input_rows).max(r.output_rows);
                worst = worst.max(res);
                if res > 1e-7 {
                    failures.push(format!("{}: slackness residual {res:e}", tag(&m, sol)));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", tag(&m, sol))),
        }
    }
    Outcome::new(
        "duality-suite",
        failures,
        format!("{} runs, worst residual {worst:.1e}", runs.len()),
    )
}

/// Runs with an unbounded score have no finite benchmark to re-evaluate and
/// are only counted.
fn reevaluation_failures(
    m: &DecisionMatrix,
    runs: &[ModelSolution],
    worst: &mut f64,
    unbounded: &mut usize,
) -> Vec<String> {
    let mut failures = Vec::new();
    for sol in runs {
        if !sol.efficiency().is_finite() {
            *unbounded += 1;
            continue;
        }
        match reevaluate_at_benchmark(m, sol) {
            Ok(again) => {
                let e = again.efficiency();
                *worst = worst.max((e - 1.0).abs());
                if (e - 1.0).abs() > 5e-6 {
                    failures.push(format!("{}: E at benchmark {e}", tag(m, sol)));
                }
            }
            Err(err) => failures.push(format!("{}: {err}", tag(m, sol))),
        }
    }
    failures
}

pub fn theorems() -> Outcome {
    let m = example_matrix();
    let (mut worst, mut unbounded) = (0.0, 0);
    let mut failures = reevaluation_failures(&m, &example_runs(), &mut worst, &mut unbounded);
    let mut rng = random::rng(0x7e0);
    let (mut count, mut skipped) = (0, 0);
    for t in 0..100 {
        let n = rng.gen_range(5..=10);
        let (ni, no) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rm = random::matrix(&mut rng, n, ni, no);
        match standard_runs(&rm) {
            Ok((runs, undefined)) => {
                count += runs.len();
                skipped += undefined;
                failures.extend(
                    reevaluation_failures(&rm, &runs, &mut worst, &mut unbounded)
                        .into_iter()
                        .map(|f| format!("matrix {t}: {f}")),
                );
            }
            Err(e) => failures.push(format!("matrix {t}: {e}")),
        }
    }
    Outcome::new(
        "theorem-suite",
        failures,
        format!(
            "example runs + {count} random runs ({skipped} without a positive normalizer, \
             {unbounded} with unbounded E), worst |E - 1| {worst:.1e}"
        ),
    )
}

fn normalization_failures(m: &DecisionMatrix, sol: &ModelSolution, worst: &mut f64) -> Vec<String> {
    let mut failures = Vec::new();
    let (alpha, beta) = sol.scales();
    let anchor = match sol.kind {
        ModelKind::Pt => sol.virtual_input(),
        ModelKind::Tsc { .. } => alpha,
        ModelKind::Spt => sol.virtual_output(),
        ModelKind::Stsc { .. } => beta,
    };
    *worst = worst.max((anchor - 1.0).abs());
    if (anchor - 1.0).abs() > 1e-9 {
        failures.push(format!("{}: step-II anchor {anchor}", tag(m, sol)));
    }
    let t = sol.scale_factor;
    let (a, b) = (&sol.step1, &sol.step2);
    let mut scaled: Vec<(f64, f64)> = vec![(b.delta, a.delta), (b.big_delta, a.big_delta), (b.tau, a.tau)];
    scaled.extend(b.v.iter().copied().zip(a.v.iter().copied()));
    scaled.extend(b.u.iter().copied().zip(a.u.iter().copied()));
    if let (Some(wb), Some(wa)) = (b.w, a.w) {
        scaled.push((wb, wa));
    }
    let ratio = scaled.iter().map(|(two, one)| (two - t * one).abs()).fold(0.0, f64::max);
    let same = b
        .q
        .iter()
        .zip(&a.q)
        .chain(b.p.iter().zip(&a.p))
        .chain(b.pi.iter().zip(&a.pi))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if ratio > 1e-7 || same > 1e-7 {
        failures.push(format!("{}: ratio law off by {ratio:e} (prices) / {same:e} (ratios)", tag(m, sol)));
    }
    failures
}

pub fn normalization() -> Outcome {
    let m = example_matrix();
    let mut worst = 0.0;
    let mut failures = Vec::new();
    for sol in example_runs() {
        failures.extend(normalization_failures(&m, &sol, &mut worst));
    }
    let mut rng = random::rng(0x40);
    let (mut count, mut skipped) = (0, 0);
    for t in 0..50 {
        let n = rng.gen_range(5..=10);
        let (ni, no) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rm = random::matrix(&mut rng, n, ni, no);
        match standard_runs(&rm) {
            Ok((runs, undefined)) => {
                count += runs.len();
                skipped += undefined;
                for sol in &runs {
                    failures.extend(
                        normalization_failures(&rm, sol, &mut worst)
                            .into_iter()
                            .map(|f| format!("matrix {t}: {f}")),
                    );
                }
            }
            Err(e) => failures.push(format!("matrix {t}: {e}")),
        }
    }
    Outcome::new(
        "normalization-suite",
        failures,
        format!("example runs + {count} random runs ({skipped} without a positive normalizer), worst anchor error {worst:.1e}"),
    )
}

pub fn score_range() -> Outcome {
    let mut rng = random::rng(0x5c0);
    let mut failures = Vec::new();
    let mut count = 0;
    for t in 0..200 {
        let n = rng.gen_range(4..=12);
        let (ni, no) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let rm = random::matrix(&mut rng, n, ni, no);
        let mut runs = match standard_runs(&rm) {
            Ok((r, undefined)) => {
                for _ in 0..undefined {
                    failures.push(format!("matrix {t}: a run has no positive normalizer"));
                }
                r
            }
            Err(e) => {
                failures.push(format!("matrix {t}: {e}"));
                continue;
            }
        };
        for o in 0..rm.n() {
            match evaluate(&rm, &ModelKind::Tsc { kappa: 1.0 }, o, None) {
                Ok(s) => runs.push(s),
                // intensity sum one is not reachable for this DMU
                Err(ModelError::NotSolved { .. }) => {}
                Err(e) => failures.push(format!("matrix {t}: TSc(1) {}: {e}", rm.dmus()[o])),
            }
        }
        for sol in &runs {
            count += 1;
            let e = sol.efficiency();
            let ok = if sol.kind.is_super() {
                e >= 1.0 - 1e-9
            } else {
                (-1e-9..=1.0 + 1e-9).contains(&e)
            };
            if !ok {
                failures.push(format!("matrix {t}: {} E = {e}", tag(&rm, sol)));
            }
        }
    }
    Outcome::new("score-range", failures, format!("{count} evaluations on 200 matrices"))
}

/// Checks the ranging allowance of one row by perturbing its right-hand side.
fn ranging_failures(lp: &LinearProgram, row: usize, t: usize) -> Vec<String> {
    let mut failures = Vec::new();
    let sol = solve(lp).unwrap();
    let range = match rhs_range(lp, &sol, row) {
        Ok(r) => r,
        Err(e) => return vec![format!("lp {t} row {row}: {e}")],
    };
    const EPS: f64 = 1e-6;
    for (dir, sign) in [(RangeDirection::Increase, 1.0), (RangeDirection::Decrease, -1.0)] {
        let allow = range.allowance(dir);
        let moved = |delta: f64| {
            let mut p = lp.clone();
            p.constraints[row].rhs += sign * delta;
            p
        };
        if !allow.is_finite() {
            let far = moved(1e3);
            if evaluate_basis(&far, &sol.basis).is_err() {
                failures.push(format!("lp {t} row {row} {dir:?}: infinite allowance, basis lost at +1e3"));
            }
            continue;
        }
        if allow > EPS {
            let inside = moved(allow - EPS);
            match evaluate_basis(&inside, &sol.basis) {
                Ok(s) => {
                    let expect = sol.objective + sign * (allow - EPS) * range.dual;
                    if (s.objective - expect).abs() > 1e-7 * (1.0 + expect.abs()) {
                        failures.push(format!("lp {t} row {row} {dir:?}: objective slope differs"));
                    }
                }
                Err(e) => failures.push(format!("lp {t} row {row} {dir:?}: inside endpoint: {e}")),
            }
        }
        let outside = moved(allow + EPS);
        match evaluate_basis(&outside, &sol.basis) {
            Err(LpError::BasisNotOptimal { primal_feasible: false, .. }) => {}
            other => failures.push(format!(
                "lp {t} row {row} {dir:?}: basis still feasible past endpoint ({:?})",
                other.map(|s| s.objective)
            )),
        }
    }
    failures
}

pub fn lp_oracle() -> Outcome {
    let mut rng = random::rng(0x1b);
    let mut failures = Vec::new();
    let mut ranged = 0;
    for t in 0..50 {
        let lp = random::program(&mut rng);
        let sol = match solve(&lp) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("lp {t}: {e}"));
                continue;
            }
        };
        match enumeration_optimum(&lp) {
            Ok(Some((best, _))) => {
                if !sol.is_optimal() || (sol.objective - best).abs() > 1e-9 * (1.0 + best.abs()) {
                    failures.push(format!("lp {t}: simplex {:?} {} vs enumeration {best}", sol.status, sol.objective));
                }
            }
            Ok(None) => failures.push(format!("lp {t}: enumeration found no vertex")),
            Err(e) => failures.push(format!("lp {t}: {e}")),
        }
        if sol.is_optimal() {
            for row in 0..lp.num_rows() {
                ranged += 1;
                failures.extend(ranging_failures(&lp, row, t));
            }
        }
    }
    Outcome::new("lp-oracle", failures, format!("50 programs, {ranged} ranged rows"))
}

type Scores = Vec<(String, Vec<f64>, Vec<Vec<usize>>)>;

/// Scores of every DMU under PT and under TSc at that DMU's scalars.
fn scores(m: &DecisionMatrix, kappas: &BTreeMap<String, Vec<f64>>) -> Result<Scores, String> {
    let mut out = Vec::new();
    for o in 0..m.n() {
        let label = &m.dmus()[o];
        let mut es = Vec::new();
        let mut refs = Vec::new();
        let mut kinds = vec![ModelKind::Pt];
        kinds.extend(kappas[label].iter().map(|&k| ModelKind::Tsc { kappa: k }));
        for kind in kinds {
            let s = evaluate(m, &kind, o, None).map_err(|e| format!("{label}: {e}"))?;
            es.push(s.efficiency());
            refs.push((0..m.n()).filter(|&j| s.step2.pi[j] > PEER_TOL).collect());
        }
        out.push((label.clone(), es, refs));
    }
    Ok(out)
}

/// Each DMU's own first scalar.
fn first_scalars(m: &DecisionMatrix) -> Result<BTreeMap<String, Vec<f64>>, String> {
    (0..m.n())
        .map(|o| {
            let pt = evaluate(m, &ModelKind::Pt, o, None).map_err(|e| e.to_string())?;
            Ok((m.dmus()[o].clone(), vec![first_scalar(&pt)]))
        })
        .collect()
}

/// Midpoint of each inefficient DMU's scalar interval; efficient DMUs keep
/// their first scalar.
fn midpoint_scalars(m: &DecisionMatrix) -> Result<BTreeMap<String, Vec<f64>>, String> {
    m.dmus()
        .iter()
        .map(|d| {
            let st = prepare(m, d).map_err(|e| format!("{d}: {e}"))?;
            let p1 = st.phase1.as_ref().unwrap();
            let k = if p1.solution.kind.is_super() {
                1.0
            } else {
                let [lo, hi] = st.phase3.as_ref().unwrap().interval;
                0.5 * (lo + hi)
            };
            Ok((d.clone(), vec![k]))
        })
        .collect()
}

fn irrelevance_failures(
    m: &DecisionMatrix,
    kappas: &BTreeMap<String, Vec<f64>>,
    label: &str,
    removed: &mut usize,
) -> Vec<String> {
    let full = match scores(m, kappas) {
        Ok(s) => s,
        Err(e) => return vec![format!("{label}: {e}")],
    };
    let mut failures = Vec::new();
    for j in 0..m.n() {
        let idle = full
            .iter()
            .enumerate()
            .filter(|(o, _)| *o != j)
            .all(|(_, (_, _, refs))| refs.iter().all(|r| !r.contains(&j)));
        if !idle {
            continue;
        }
        *removed += 1;
        let reduced = m.without_dmu(j).unwrap();
        let after = match scores(&reduced, kappas) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("{label} without {}: {e}", m.dmus()[j]));
                continue;
            }
        };
        for (dmu, es, _) in &after {
            let before = &full.iter().find(|(d, _, _)| d == dmu).unwrap().1;
            for (a, b) in es.iter().zip(before) {
                if (a - b).abs() > 1e-9 {
                    failures.push(format!("{label} without {}: {dmu} {b} -> {a}", m.dmus()[j]));
                }
            }
        }
    }
    failures
}

pub fn irrelevance() -> Outcome {
    let m = example_matrix();
    let mut removed = 0;
    let mut kappas = first_scalars(&m).unwrap();
    let k = prepare(&m, "K").unwrap();
    kappas.get_mut("K").unwrap().extend([0.718, k.phase3.unwrap().kappa2]);
    let mut failures = irrelevance_failures(&m, &kappas, "example", &mut removed);
    let mut rng = random::rng(0x1e);
    for t in 0..20 {
        let n = rng.gen_range(5..=9);
        let (ni, no) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let rm = random::matrix(&mut rng, n, ni, no);
        match midpoint_scalars(&rm) {
            Ok(kappas) => {
                failures.extend(irrelevance_failures(&rm, &kappas, &format!("matrix {t}"), &mut removed))
            }
            Err(e) => failures.push(format!("matrix {t}: {e}")),
        }
    }
    Outcome::new("irrelevance", failures, format!("{removed} idle DMUs removed"))
}

pub fn dea_comparison() -> Outcome {
    let m = example_matrix();
    let mut failures = Vec::new();
    let mut efficient = Vec::new();
    let mut worst = 0.0f64;
    for rts in [Rts::Crs, Rts::Vrs] {
        let cfg = AdditiveConfig::new(rts);
        for o in 0..m.n() {
            let sol = match evaluate_additive(&m, o, &cfg) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("{rts:?} {}: {e}", m.dmus()[o]));
                    continue;
                }
            };
            if let Some(gap) = sol.duality_gap() {
                worst = worst.max(gap);
                if gap > 1e-7 {
                    failures.push(format!("{rts:?} {}: F - f = {gap:e}", m.dmus()[o]));
                }
            }
            if rts == Rts::Crs {
                if sol.efficient {
                    efficient.push(m.dmus()[o].clone());
                }
                let pt = evaluate(&m, &ModelKind::Pt, o, None).unwrap();
                if (pt.step1.delta <= EFFICIENT_TOL) != sol.efficient {
                    failures.push(format!("{}: additive and PT classifications differ", m.dmus()[o]));
                }
                if report(&m, &pt).efficiency > 1.0 + 1e-9 {
                    failures.push(format!("{}: PT score above one", m.dmus()[o]));
                }
            }
        }
    }
    if efficient != ["B", "D"] {
        failures.push(format!("additive CRS efficient set {efficient:?}"));
    }
    Outcome::new(
        "dea-comparison",
        failures,
        format!("CRS efficient {efficient:?}, worst |F - f| {worst:.1e}"),
    )
}

/// All primary criteria in order.
pub fn all() -> Vec<Outcome> {
    vec![
        t2_golden(),
        t3_golden(),
        kappa3(),
        duality(),
        theorems(),
        normalization(),
        score_range(),
        lp_oracle(),
        irrelevance(),
        dea_comparison(),
    ]
}
