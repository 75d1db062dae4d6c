//! Printed values of the two worked-example tables, and the comparison against
//! the pipeline.
//!
//! Expected values are kept as the printed strings so the tolerance can follow
//! the printed precision: 2e-3 for values printed to three or more decimals
//! (and for exact integers), half a unit in the last place otherwise.

use super::Outcome;
use std::collections::BTreeMap;
use vga_core::analysis::{report, virtual_technology_set};
use vga_core::dataset::{example_matrix, DecisionMatrix};
use vga_core::models::{evaluate, first_scalar, verify_complementary_slackness, ModelKind, ModelSolution};
use vga_core::procedure::prepare;

pub const TIER_A: &[&str] = &[
    "kappa", "tau", "delta", "big_delta", "E", "F", "Xi", "gamma", "omega", "alpha", "beta", "alpha_hat",
    "beta_hat", "AP_x", "AP_y",
];

pub struct Column {
    pub name: &'static str,
    pub expected: Vec<(&'static str, &'static str)>,
}

fn col(name: &'static str, rows: &[(&'static str, &'static str)]) -> Column {
    let mut expected = rows.to_vec();
    if let Some(&(_, delta)) = rows.iter().find(|(k, _)| *k == "delta") {
        expected.push(("big_delta", delta));
    }
    Column { name, expected }
}


fn scales(
    rows: &mut Vec<(&'static str, &'static str)>,
    alpha: [&'static str; 6],
    beta: [&'static str; 6],
) {
    const A: [&str; 6] = ["alpha_K", "alpha_A", "alpha_B", "alpha_D", "alpha_G", "alpha_H"];
    const B: [&str; 6] = ["beta_K", "beta_A", "beta_B", "beta_D", "beta_G", "beta_H"];
    for k in 0..6 {
        rows.push((A[k], alpha[k]));
        rows.push((B[k], beta[k]));
    }
}

/// Step-II columns of the inefficiency table.
pub fn table2() -> Vec<Column> {
    let mut pt_k = vec![
        ("kappa", "1.5153"), ("tau", "0.179"), ("delta", "0.4113"),
        ("v1", "0.5133"), ("v2", "0.0012"), ("u1", "0.0004"), ("u2", "0.0036"), ("w", "0"),
        ("Q1", "0"), ("Q2", "0.5334"), ("P1", "0"), ("P2", "1.7677"), ("pi_B", "1.421"), ("pi_D", "0.094"),
        ("xh1", "1.6"), ("xh2", "67.66"), ("yh1", "1036"), ("yh2", "135.6"), ("gamma", "0.232"), ("omega", "0"),
        ("alpha", "1.000"), ("beta", "0.589"), ("alpha_hat", "0.905"), ("beta_hat", "0.905"),
        ("Xi", "1.699"), ("E", "0.589"), ("AP_x", "0"), ("AP_y", "0"),
    ];
    scales(
        &mut pt_k,
        ["1", "1.000", "1.328", "0.549", "1.322", "1.232"],
        ["0.589", "0.879", "0.549", "1.322", "0.918", "0.651"],
    );
    let mut ts1 = vec![
        ("kappa", "1.5153"), ("tau", "0.256"), ("delta", "0.5893"),
        ("v1", "0.1601"), ("v2", "0.0018"), ("u1", "0.0003"), ("u2", "0.0052"), ("w", "0.4190"),
        ("Q1", "0"), ("Q2", "0.5334"), ("P1", "0"), ("P2", "1.7677"), ("pi_B", "1.421"), ("pi_D", "0.094"),
        ("xh1", "1.6"), ("xh2", "67.66"), ("yh1", "1036"), ("yh2", "135.6"), ("gamma", "0.232"), ("omega", "0.635"),
        ("alpha", "1.000"), ("beta", "0.411"), ("alpha_hat", "0.863"), ("beta_hat", "0.863"),
        ("Xi", "2.435"), ("E", "0.411"), ("AP_x", "0.488"), ("AP_y", "-0.147"),
    ];
    scales(
        &mut ts1,
        ["1.000", "0.902", "0.533", "1.122", "1.052", "0.899"],
        ["0.411", "0.796", "0.533", "1.122", "0.723", "0.560"],
    );
    let mut ts2 = vec![
        ("kappa", "0.5150"), ("tau", "0.500"), ("delta", "0.3321"),
        ("v1", "0.3125"), ("v2", "0.0034"), ("u1", "0.0006"), ("u2", "0.0102"), ("w", "0.8181"),
        ("Q1", "0.4554"), ("Q2", "0.2089"), ("P1", "0"), ("P2", "0"), ("pi_B", "0.119"), ("pi_D", "0.396"),
        ("xh1", "0.8713"), ("xh2", "114.72"), ("yh1", "1036"), ("yh2", "49.0"), ("gamma", "1.000"), ("omega", "0.421"),
        ("alpha", "1.000"), ("beta", "0.668"), ("alpha_hat", "0.668"), ("beta_hat", "0.668"),
        ("Xi", "1.497"), ("E", "0.668"), ("AP_x", "0"), ("AP_y", "-0.421"),
    ];
    scales(
        &mut ts2,
        ["1", "1.133", "0.413", "1.563", "1.425", "1.126"],
        ["0.668", "0.926", "0.413", "1.563", "0.784", "0.465"],
    );
    let mut ts3 = vec![
        ("kappa", "0.718"), ("tau", "0.413"), ("delta", "0.411"),
        ("v1", "0.258"), ("v2", "0.003"), ("u1", "0.0005"), ("u2", "0.008"), ("w", "0.675"),
        ("Q1", "0.363"), ("Q2", "0.275"), ("P1", "0"), ("P2", "0.359"), ("pi_B", "0.383"), ("pi_D", "0.335"),
        ("xh1", "1.019"), ("xh2", "105.165"), ("yh1", "1036"), ("yh2", "66.58"), ("gamma", "0.640"), ("omega", "0.485"),
        ("alpha", "1.000"), ("beta", "0.589"), ("alpha_hat", "0.737"), ("beta_hat", "0.737"),
        ("Xi", "1.699"), ("E", "0.589"), ("AP_x", "0.175"), ("AP_y", "-0.310"),
    ];
    scales(
        &mut ts3,
        ["1.000", "0.902", "0.533", "1.122", "1.052", "0.899"],
        ["0.589", "0.796", "0.533", "1.122", "0.723", "0.560"],
    );
    let mut pt_b = vec![
        ("kappa", "1"), ("tau", "0.500"), ("delta", "0"),
        ("v1", "0.500"), ("v2", "0.017"), ("u1", "0.001"), ("u2", "0.006"), ("w", "0"),
        ("Q1", "0"), ("Q2", "0"), ("P1", "0"), ("P2", "0"), ("pi_B", "1"), ("pi_D", "0"),
        ("xh1", "1.0"), ("xh2", "29"), ("yh1", "567"), ("yh2", "89"), ("gamma", "0"), ("omega", "0"),
        ("alpha", "1"), ("beta", "1"), ("alpha_hat", "1"), ("beta_hat", "1"),
        ("Xi", "1"), ("E", "1"),
    ];
    scales(
        &mut pt_b,
        ["3.300", "3.219", "1", "5.795", "5.210", "2.974"],
        ["1.189", "1.715", "1", "2.702", "1.902", "1.275"],
    );
    let mut pt_d = vec![
        ("kappa", "1"), ("tau", "0.266"), ("delta", "0"),
        ("v1", "0.387"), ("v2", "0.001"), ("u1", "0.0003"), ("u2", "0.003"), ("w", "0"),
        ("Q1", "0"), ("Q2", "0"), ("P1", "0"), ("P2", "0"), ("pi_B", "0"), ("pi_D", "1"),
        ("xh1", "1.9"), ("xh2", "281"), ("yh1", "2446"), ("yh2", "97"), ("gamma", "0"), ("omega", "0"),
        ("alpha", "1"), ("beta", "1"), ("alpha_hat", "1"), ("beta_hat", "1"),
        ("Xi", "1"), ("E", "1"),
    ];
    scales(
        &mut pt_d,
        ["0.755", "1.002", "0.414", "1", "0.932", "1.061"],
        ["0.445", "0.664", "0.414", "1", "0.695", "0.492"],
    );
    vec![
        col("PT-II K", &pt_k),
        col("TS1-II K", &ts1),
        col("TS2-II K", &ts2),
        col("TS3-II K", &ts3),
        col("PT-II B", &pt_b),
        col("PT-II D", &pt_d),
    ]
}

/// Step-II columns of the super-efficiency table.
pub fn table3() -> Vec<Column> {
    let raw: [(&'static str, [&'static str; 41]); 8] = [
        ("sPT-II B", [
            "0.2417", "0.5", "0.5855", "0", "0.0143", "0.0009", "0.0056", "0.0000",
            "0", "0", "0.4344", "0.7366", "0.2417", "0", "0",
            "1", "29", "320.7", "23.442", "0", "0",
            "0.4145", "1", "0.4145", "0.4145", "0.4145", "2.4126",
            "2.0725", "1.7151", "0.4145", "4.0163", "3.5732", "1.4293",
            "1.1889", "1.7151", "1", "2.702", "1.902", "1.2751", "0", "0",
        ]),
        ("sTS1-II B", [
            "0.2417", "0.5", "0.5855", "0", "0.0172", "0.0009", "0.0056", "0.3538",
            "0", "0", "0.4344", "0.7366", "0.2417", "0", "0",
            "1", "29", "320.7", "23.442", "0", "0.0855",
            "0.4145", "1", "0.4145", "0.4145", "0.4145", "2.4126",
            "2.1462", "1.7151", "0.4145", "4.4910", "3.9565", "1.3703",
            "1.1889", "1.7151", "1", "2.702", "1.902", "1.2751", "-0.0855", "0",
        ]),
        ("sTSz-II B", [
            "0.3345", "0.4823", "0.5964", "0", "0.0166", "0.0009", "0.0054", "0.3413",
            "0", "0.3840", "0.2172", "0.6355", "0.3345", "0", "0",
            "1", "40.137", "443.8", "32.444", "0.3105", "0.1142",
            "0.4036", "1", "0.5888", "0.5888", "0.4036", "2.4779",
            "2.1761", "1.7603", "0.4036", "4.4378", "3.9222", "1.4277",
            "1.2527", "1.7603", "1", "2.712", "1.941", "1.3359", "-0.0787", "0.0354",
        ]),
        ("sTS2-II B", [
            "0.4273", "0.4591", "0.5979", "0", "0.0158", "0.0008", "0.0052", "0.3249",
            "0", "0.7681", "0.0000", "0.5343", "0.4273", "0", "0",
            "51.273", "567", "41.4", "0.5897", "0.1388", "0",
            "1", "0.7547", "0.7547", "0.4021", "2.4868", "2.1621",
            "1.7663", "0.4021", "4.3150", "3.8242", "1.4497", "1.2831",
            "1.7663", "1", "2.6723", "1.938", "1.362", "0", "0.0000", "0.1313",
        ]),
        ("sPT-II D", [
            "1.3411", "0.7709", "0.2611", "0.3889", "0", "0.0003", "0.0024", "0",
            "0", "0", "0.3387", "0", "0", "0.6424", "0.6986",
            "1.9", "281", "1617.6", "97", "0", "0",
            "0.7389", "1", "0.7389", "0.7389", "0.7389", "1.3533",
            "0.6223", "0.8945", "0.3889", "0.7389", "0.7000", "0.9723",
            "0.4422", "0.6473", "0.3889", "1", "0.7000", "0.4805", "0", "0",
        ]),
        ("sTS1-II D", [
            "1.3411", "0.8037", "0.2722", "0.4230", "0", "0.0003", "0.0020", "0.0566",
            "0.0000", "0", "0.3387", "0", "0", "0.6424", "0.6986",
            "1.9", "281", "1617.6", "97", "0.0000", "0.0759",
            "0.7278", "1", "0.7278", "0.7278", "0.7278", "1.3740",
            "0.6202", "0.9163", "0.3664", "0.7278", "0.7048", "1.0009",
            "0.4396", "0.6323", "0.3664", "1", "0.7048", "0.4702", "-0.076", "0",
        ]),
        ("sTSz-II D", [
            "1.4092", "0.7827", "0.2688", "0.4119", "0", "0.0003", "0.0020", "0.0551",
            "0.1156", "0", "0.2278", "0", "0", "0.5211", "0.8881",
            "2.119", "281", "1888.8", "97", "0.3367", "0.0776",
            "0.7312", "1", "0.8217", "0.8217", "0.7312", "1.3676",
            "0.6226", "0.9109", "0.3754", "0.7312", "0.7049", "0.9933",
            "0.4466", "0.6343", "0.3754", "1", "0.7049", "0.4765", "-0.051", "0.026",
        ]),
        ("sTS2-II D", [
            "1.4774", "0.7614", "0.2652", "0.4007", "0", "0.0003", "0.0019", "0.0536",
            "0.2313", "0", "0.1170", "0", "0", "0.3997", "1.0776",
            "2.339", "281", "2159.9", "97", "0.6642", "0.0792",
            "0.7348", "1", "0.9109", "0.9109", "0.7348", "1.3609",
            "0.6232", "0.9037", "0.3827", "0.7348", "0.7033", "0.9839",
            "0.4520", "0.6347", "0.3827", "1", "0.7033", "0.4811", "-0.027", "0.053",
        ]),
    ];
    const KEYS: [&str; 41] = [
        "kappa", "tau", "delta", "v1", "v2", "u1", "u2", "w",
        "Q1", "Q2", "P1", "P2", "pi_A", "pi_B", "pi_G",
        "xh1", "xh2", "yh1", "yh2", "gamma", "omega",
        "alpha", "beta", "alpha_hat", "beta_hat", "Xi", "E",
        "alpha_K", "alpha_A", "alpha_B", "alpha_D", "alpha_G", "alpha_H",
        "beta_K", "beta_A", "beta_B", "beta_D", "beta_G", "beta_H", "AP_x", "AP_y",
    ];
    raw.iter()
        .map(|(name, values)| {
            let rows: Vec<(&'static str, &'static str)> =
                KEYS.iter().zip(values.iter()).map(|(k, v)| (*k, *v)).collect();
            col(name, &rows)
        })
        .collect()
}

/// Tolerance implied by a printed value.
pub fn tolerance(printed: &str) -> f64 {
    match printed.split_once('.') {
        Some((_, frac)) if frac.len() <= 2 => 0.5 * 10f64.powi(-(frac.len() as i32)),
        _ => 2e-3,
    }
}

/// Computed values keyed like the table rows.
pub fn computed(m: &DecisionMatrix, sol: &ModelSolution) -> BTreeMap<String, f64> {
    let r = report(m, sol);
    let mut out = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        out.insert(k.to_string(), v);
    };
    put("kappa", sol.kappa().unwrap_or_else(|| first_scalar(sol)));
    put("tau", r.tau);
    put("delta", r.delta);
    put("big_delta", r.big_delta);
    put("E", r.efficiency);
    put("F", r.inefficiency);
    put("Xi", r.xi);
    put("gamma", r.gamma);
    put("omega", r.omega);
    put("alpha", r.alpha);
    put("beta", r.beta);
    put("alpha_hat", r.alpha_hat);
    put("beta_hat", r.beta_hat);
    put("AP_x", r.anchor_point[0]);
    put("AP_y", r.anchor_point[1]);
    put("w", r.w.unwrap_or(0.0));
    for (i, v) in r.v.iter().enumerate() {
        put(&format!("v{}", i + 1), *v);
    }
    for (i, v) in r.u.iter().enumerate() {
        put(&format!("u{}", i + 1), *v);
    }
    for (i, v) in r.q.iter().enumerate() {
        put(&format!("Q{}", i + 1), *v);
    }
    for (i, v) in r.p.iter().enumerate() {
        put(&format!("P{}", i + 1), *v);
    }
    for (i, v) in r.benchmark_inputs.iter().enumerate() {
        put(&format!("xh{}", i + 1), *v);
    }
    for (i, v) in r.benchmark_outputs.iter().enumerate() {
        put(&format!("yh{}", i + 1), *v);
    }
    for (j, label) in m.dmus().iter().enumerate() {
        put(&format!("pi_{label}"), r.pi[j]);
    }
    for p in virtual_technology_set(m, sol) {
        put(&format!("alpha_{}", p.dmu), p.alpha);
        put(&format!("beta_{}", p.dmu), p.beta);
    }
    out
}

/// Step-II solutions for every table column, produced by the four-phase
/// procedure (scalars from ranging; the try-and-error and midpoint scalars as
/// the trials).
pub fn solutions() -> Vec<(&'static str, ModelSolution)> {
    let m = example_matrix();
    let mut out = Vec::new();
    let mut k = prepare(&m, "K").expect("procedure K");
    out.push(("PT-II K", k.phase1.clone().unwrap().solution));
    out.push(("TS1-II K", k.phase2.clone().unwrap().solution));
    out.push(("TS2-II K", k.phase3.clone().unwrap().solution));
    out.push(("TS3-II K", k.try_kappa(&m, 0.718, false).expect("trial").solution.clone()));
    for d in ["B", "D"] {
        let o = m.dmu_index(d).unwrap();
        let pt = evaluate(&m, &ModelKind::Pt, o, None).expect("PT");
        out.push((if d == "B" { "PT-II B" } else { "PT-II D" }, pt));
    }
    for d in ["B", "D"] {
        let mut st = prepare(&m, d).expect("procedure");
        let p3 = st.phase3.clone().unwrap();
        let mid = 0.5 * (p3.interval[0] + p3.interval[1]);
        let z = st.try_kappa(&m, mid, false).expect("midpoint trial").solution.clone();
        let names: [&'static str; 4] = if d == "B" {
            ["sPT-II B", "sTS1-II B", "sTSz-II B", "sTS2-II B"]
        } else {
            ["sPT-II D", "sTS1-II D", "sTSz-II D", "sTS2-II D"]
        };
        out.push((names[0], st.phase1.clone().unwrap().solution));
        out.push((names[1], st.phase2.clone().unwrap().solution));
        out.push((names[2], z));
        out.push((names[3], p3.solution));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub column: &'static str,
    pub key: &'static str,
    pub printed: String,
    pub got: f64,
    pub tier_a: bool,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} table {} got {:.6} ({})",
            self.column,
            self.key,
            self.printed,
            self.got,
            if self.tier_a { "A" } else { "B" }
        )
    }
}

/// Compares every printed value with the computed one.
pub fn compare(columns: &[Column]) -> Vec<Mismatch> {
    let m = example_matrix();
    let sols = solutions();
    let mut out = Vec::new();
    for c in columns {
        let sol = &sols.iter().find(|(n, _)| *n == c.name).expect("column").1;
        let got = computed(&m, sol);
        let mut expected: Vec<(&'static str, String)> =
            c.expected.iter().map(|(k, v)| (*k, v.to_string())).collect();
        if let Some((_, e)) = c.expected.iter().find(|(k, _)| *k == "E") {
            let e: f64 = e.parse().unwrap();
            let f = if sol.kind.is_super() { e - 1.0 } else { 1.0 - e };
            expected.push(("F", format!("{f:.4}")));
        }
        for (key, printed) in expected {
            let want: f64 = printed.parse().unwrap();
            let value = *got.get(key).unwrap_or_else(|| panic!("no computed value for {key}"));
            if (value - want).abs() > tolerance(&printed) {
                out.push(Mismatch {
                    column: c.name,
                    key,
                    printed,
                    got: value,
                    tier_a: TIER_A.contains(&key),
                });
            }
        }
    }
    out
}

/// Printed cells known to disagree with the table's own other cells, with the reason.
pub fn table_defect(column: &str, key: &str) -> Option<&'static str> {
    let scale_row = key.starts_with("alpha_") || key.starts_with("beta_");
    match column {
        "PT-II K" if key.starts_with("alpha_") && key != "alpha_K" => {
            Some("row R8 is shifted down one DMU (alpha_A repeats alpha_K; alpha_B..alpha_H hold alpha_A..alpha_G)")
        }
        "TS3-II K" if scale_row && key != "alpha_K" && key != "beta_K" => {
            Some("rows R8-R9 repeat the TS1-II column, inconsistent with the column's own prices")
        }
        "sTS2-II B" if !matches!(
            key,
            "kappa" | "tau" | "delta" | "big_delta" | "v1" | "v2" | "u1" | "u2" | "w" | "Q1" | "Q2" | "P1" | "P2"
                | "pi_A" | "pi_B" | "pi_G"
        ) =>
        {
            Some("from R4 on each printed cell holds the value of the next row; the E cell shows the K intensity ratio")
        }
        _ => None,
    }
}

/// Outcome of a table comparison. Tier-B cells may be waived when the
/// column's objective matches and its complementary slackness holds.
pub fn outcome(label: &str, columns: &[Column]) -> Outcome {
    let m = example_matrix();
    let sols = solutions();
    let mismatches = compare(columns);
    let mut failures = Vec::new();
    let mut waived = 0;
    for mm in &mismatches {
        let sol = &sols.iter().find(|(n, _)| *n == mm.column).unwrap().1;
        let cs_ok = verify_complementary_slackness(&m, sol).map(|r| r.ok).unwrap_or(false);
        let objective_ok = !mismatches
            .iter()
            .any(|o| o.column == mm.column && matches!(o.key, "delta" | "big_delta" | "E"));
        if !mm.tier_a && cs_ok && objective_ok && table_defect(mm.column, mm.key).is_some() {
            waived += 1;
            continue;
        }
        failures.push(mm.to_string());
    }
    let cells: usize = columns.iter().map(|c| c.expected.len()).sum();
    Outcome {
        label: label.to_string(),
        pass: failures.is_empty(),
        detail: format!("{cells} cells, {} mismatched, {waived} tier-B waived", mismatches.len()),
        failures,
    }
}

/// Table-defect reason of a failure line reading "<column> <key> table ...",
/// where a column name is two words.
pub fn defect_of(failure: &str) -> Option<&'static str> {
    let mut words = failure.splitn(4, ' ');
    let column = format!("{} {}", words.next()?, words.next()?);
    table_defect(&column, words.next()?)
}
