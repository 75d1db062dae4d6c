use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use vga_core::analysis;
use vga_core::dataset::{self, DecisionMatrix, Format};
use vga_core::dea::{self, AdditiveConfig, Rts};
use vga_core::procedure::{self, SessionFile};

use crate::error::{CliError, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use crate::output;
use crate::server::{self, AppState};
use crate::session::{self, Step};

#[derive(Parser, Debug)]
#[command(name = "vga", version, about = "Virtual gap analysis of decision-making units")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a decision matrix and print its summary.
    Validate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Evaluate one DMU under one model.
    Evaluate(EvaluateArgs),
    /// Run one step of the scalar-selection procedure, persisted in a session file.
    Procedure(ProcedureArgs),
    /// Rank every DMU.
    Rank {
        #[arg(long)]
        data: PathBuf,
        /// JSON object mapping DMU labels to intensity-sum scalars.
        #[arg(long)]
        scalars: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Plot geometry as JSON, optionally also as an SVG file.
    Plot {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        dmu: String,
        #[arg(long)]
        model: String,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Additive DEA model side by side with the VGA classification.
    Dea {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        dmu: String,
        #[arg(long, default_value = "crs")]
        rts: String,
        /// JSON object with `input_weights` and `output_weights` arrays.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Serve the HTTP JSON API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Dataset answering requests without a hash; the built-in example when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        session_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub dmu: String,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Upper bound on the input ratios: one value for all, or one per input.
    #[arg(long, value_delimiter = ',')]
    pub qmax: Vec<f64>,
    /// Upper bound on the output ratios: one value for all, or one per output.
    #[arg(long, value_delimiter = ',')]
    pub pmax: Vec<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("step").required(true).args(["phase", "try_kappa", "commit"])))]
pub struct ProcedureArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub dmu: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub phase: Option<u8>,
    #[arg(long = "try")]
    pub try_kappa: Option<f64>,
    #[arg(long)]
    pub commit: Option<f64>,
    /// Session file holding every DMU's procedure for this dataset.
    #[arg(long)]
    pub session: PathBuf,
    /// `inefficiency` or `super`; picked from the DMU's efficiency when absent.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Let `--try` leave the phase-3 interval.
    #[arg(long)]
    pub allow_outside: bool,
}

pub fn load_matrix(path: &Path) -> Result<DecisionMatrix, CliError> {
    let text = read(path)?;
    let name = path.to_string_lossy();
    Ok(DecisionMatrix::parse(&text, Format::detect(&name, &text))?)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    #[serde(default)]
    input_weights: Vec<f64>,
    #[serde(default)]
    output_weights: Vec<f64>,
}

/// Runs one command, writing the document to `out`. Returns the exit code.
pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    let emit = |out: &mut dyn Write, text: String| {
        out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
    };
    match cmd {
        Command::Validate { data, format } => {
            let text = read(&data)?;
            let report = dataset::validate_source(&text, Format::detect(&data.to_string_lossy(), &text));
            let doc = match format {
                OutputFormat::Json => output::to_json(&report),
                OutputFormat::Table => output::validation_table(&report),
            };
            emit(out, doc)?;
            Ok(if report.accepted() { EXIT_OK } else { EXIT_VALIDATION })
        }
        Command::Evaluate(a) => {
            let m = load_matrix(&a.data)?;
            let doc = output::evaluate(&m, &a.model, &a.dmu, a.kappa, &a.qmax, &a.pmax)?;
            emit(
                out,
                match a.format {
                    OutputFormat::Json => output::to_json(&doc),
                    OutputFormat::Table => output::evaluation_table(&doc),
                },
            )?;
            Ok(EXIT_OK)
        }
        Command::Procedure(a) => {
            let m = load_matrix(&a.data)?;
            let mut file = match std::fs::read_to_string(&a.session) {
                Ok(text) => SessionFile::from_json(&text, &m)?,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => SessionFile::new(&m),
                Err(e) => return Err(CliError::Io(format!("{}: {e}", a.session.display()))),
            };
            let step = match (a.phase, a.try_kappa, a.commit) {
                (Some(p), _, _) => Step::Phase(p),
                (_, Some(k), _) => Step::Try {
                    kappa: k,
                    allow_outside: a.allow_outside,
                },
                (_, _, Some(k)) => Step::Commit(k),
                _ => unreachable!("clap requires one step"),
            };
            let current = file.procedures.get(&a.dmu).cloned();
            let (state, value) = session::apply(current, &m, &a.dmu, a.scenario.as_deref(), step)?;
            file.procedures.insert(a.dmu.clone(), state);
            std::fs::write(&a.session, file.to_json())
                .map_err(|e| CliError::Io(format!("{}: {e}", a.session.display())))?;
            emit(out, output::to_json(&value))?;
            Ok(EXIT_OK)
        }
        Command::Rank { data, scalars, format } => {
            let m = load_matrix(&data)?;
            let scalars: BTreeMap<String, f64> = match scalars {
                Some(p) => read_json(&p)?,
                None => BTreeMap::new(),
            };
            for label in scalars.keys() {
                m.dmu_index(label)?;
            }
            let table = procedure::rank(&m, &scalars)?;
            emit(
                out,
                match format {
                    OutputFormat::Json => output::to_json(&table),
                    OutputFormat::Table => output::ranking_table(&table),
                },
            )?;
            Ok(EXIT_OK)
        }
        Command::Plot {
            data,
            dmu,
            model,
            kappa,
            svg,
        } => {
            let m = load_matrix(&data)?;
            let g = output::plot(&m, &model, &dmu, kappa)?;
            if let Some(path) = svg {
                std::fs::write(&path, analysis::render_svg(&g))
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            emit(out, output::to_json(&g))?;
            Ok(EXIT_OK)
        }
        Command::Dea { data, dmu, rts, weights } => {
            let m = load_matrix(&data)?;
            let o = m.dmu_index(&dmu)?;
            let mut cfg = AdditiveConfig::new(Rts::parse(&rts).map_err(CliError::Usage)?);
            if let Some(p) = weights {
                let w: WeightsFile = read_json(&p)?;
                cfg.input_weights = w.input_weights;
                cfg.output_weights = w.output_weights;
            }
            let cmp = dea::compare(&m, o, &cfg)?;
            emit(out, output::to_json(&cmp))?;
            Ok(EXIT_OK)
        }
        Command::Serve { port, data, session_dir } => {
            let m = match data {
                Some(p) => load_matrix(&p)?,
                None => dataset::example_matrix(),
            };
            let state = AppState::new(Some(m), session_dir);
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            rt.block_on(server::serve(port, state))?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `argv` (program name first) and runs it.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
