//! Procedure steps and their persisted state.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};
use vga_core::dataset::DecisionMatrix;
use vga_core::models::{self, ModelKind};
use vga_core::procedure::{ProcedureState, Scenario, EFFICIENT_TOL};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Phase(u8),
    Try { kappa: f64, allow_outside: bool },
    Commit(f64),
}

/// Scenario from the request, or from the DMU's own efficiency when absent.
pub fn scenario_for(m: &DecisionMatrix, dmu: &str, requested: Option<&str>) -> Result<Scenario, CliError> {
    if let Some(s) = requested {
        return Scenario::parse(s).map_err(CliError::Usage);
    }
    let o = m.dmu_index(dmu)?;
    let pt = models::evaluate(m, &ModelKind::Pt, o, None)?;
    Ok(if pt.step1.delta <= EFFICIENT_TOL {
        Scenario::Super
    } else {
        Scenario::Inefficiency
    })
}

/// Runs one step; phase 1 starts the DMU's procedure afresh.
pub fn apply(
    state: Option<ProcedureState>,
    m: &DecisionMatrix,
    dmu: &str,
    scenario: Option<&str>,
    step: Step,
) -> Result<(ProcedureState, Value), CliError> {
    let mut st = match (step, state) {
        (Step::Phase(1), _) => ProcedureState::new(m, dmu, scenario_for(m, dmu, scenario)?)?,
        (_, Some(st)) => st,
        (_, None) => {
            m.dmu_index(dmu)?;
            return Err(CliError::Conflict(format!("no procedure for DMU {dmu}; run phase 1 first")));
        }
    };
    let value = match step {
        Step::Phase(p) => st.run_phase(m, p)?,
        Step::Try { kappa, allow_outside } => {
            serde_json::to_value(st.try_kappa(m, kappa, allow_outside)?).expect("trial serializes")
        }
        Step::Commit(kappa) => serde_json::to_value(st.commit(kappa)?).expect("commitment serializes"),
    };
    Ok((st, value))
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// One DMU's procedure as stored by the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiSession {
    pub id: String,
    pub dataset_hash: String,
    pub dmu: String,
    pub created: u64,
    pub updated: u64,
    pub state: ProcedureState,
}

impl ApiSession {
    pub fn new(state: ProcedureState) -> Self {
        let t = now();
        ApiSession {
            id: format!("{}/{}", state.dataset_hash, state.dmu),
            dataset_hash: state.dataset_hash.clone(),
            dmu: state.dmu.clone(),
            created: t,
            updated: t,
            state,
        }
    }

    /// Replaces the state; the dataset is fixed for the session's lifetime.
    pub fn update(&mut self, state: ProcedureState) -> Result<(), CliError> {
        if state.dataset_hash != self.dataset_hash {
            return Err(CliError::Conflict(format!(
                "session {} belongs to dataset {}",
                self.id, self.dataset_hash
            )));
        }
        self.state = state;
        self.updated = now();
        Ok(())
    }
}

/// `{dir}/{hash}/{dmu}.json`, with label bytes outside `[A-Za-z0-9_-]` escaped as `%XX`.
pub fn session_path(dir: &Path, hash: &str, dmu: &str) -> PathBuf {
    let name: String = dmu
        .bytes()
        .map(|b| {
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' {
                (b as char).to_string()
            } else {
                format!("%{b:02X}")
            }
        })
        .collect();
    dir.join(hash).join(format!("{name}.json"))
}

pub fn load(dir: &Path, hash: &str, dmu: &str) -> Result<Option<ApiSession>, CliError> {
    let path = session_path(dir, hash, dmu);
    match std::fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::Io(format!("{}: {e}", path.display()))),
    }
}

pub fn store(dir: &Path, session: &ApiSession) -> Result<(), CliError> {
    let path = session_path(dir, &session.dataset_hash, &session.dmu);
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    std::fs::create_dir_all(path.parent().expect("session path has a parent")).map_err(io)?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_string_pretty(session).expect("session serializes")).map_err(io)?;
    std::fs::rename(&tmp, &path).map_err(io)
}
