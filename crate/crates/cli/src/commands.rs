use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use pmrsim::circuit::{compile_step, gate_count, to_qasm, to_text, AlphaMode};
use pmrsim::divdiff::{bound_sweep, BoundRow, BoundSweep, DEFAULT_TERM_BUDGET};
use pmrsim::lcu::{choose_params, simulate, state_from_pairs, state_to_pairs, SimOptions, SimParams, SimReport};
use pmrsim::linalg::DEFAULT_DENSE_LIMIT;
use pmrsim::models::{format_table, resource_report, Geometry, ModelFamily};
use pmrsim::pauli::PauliFile;
use pmrsim::pmr::{pmr_decompose, PmrFile};
use pmrsim::PmrHamiltonian;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot parse `{path}`: {msg}")]
    Input { path: PathBuf, msg: String },
    #[error(transparent)]
    Lib(#[from] pmrsim::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use pmrsim::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Read { .. } | CliError::Write { .. } => "io",
            CliError::Input { .. } => "parse",
            CliError::Lib(e) => match e {
                E::Parse(_) | E::Json(_) => "parse",
                E::Io(_) => "io",
                E::NonHermitian { .. } => "non_hermitian",
                E::Contract(_) | E::NotBasisPreserving { .. } => "contract",
                E::DenseLimit { .. } => "dense_limit",
                E::Budget { .. } => "budget",
                E::Range(_) => "range",
                E::NoConvergence { .. } => "no_convergence",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "usage" => 2,
            "io" => 3,
            "parse" => 4,
            "non_hermitian" => 5,
            "contract" => 6,
            "dense_limit" => 7,
            "budget" => 8,
            "range" => 9,
            _ => 10,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "pmrsim", version, about = "PMR Hamiltonian simulation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pauli-string file -> PMR file.
    Decompose {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose step count, truncation order and subdivision depth.
    Params {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a state with the dense LCU step operator.
    Simulate {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
        dense_limit: usize,
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        term_budget: f64,
    },
    /// Compile one step (prep, select, prep^dagger) to circuit text, optionally QASM.
    Compile {
        #[arg(long)]
        hamiltonian: PathBuf,
        /// Parameters from `params`; otherwise `--eps` and `--time` are required.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also emit OpenQASM 2.0 (to `<out>.qasm`, or to stdout without `--out`).
        #[arg(long)]
        qasm: bool,
        #[arg(long, value_enum, default_value_t = AlphaArg::BinarySearch)]
        alpha_mode: AlphaArg,
    },
    /// Randomized check of the divided-difference error bound.
    VerifyDd {
        #[arg(long, default_value_t = 6)]
        q_max: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 2, 4, 8])]
        k: Vec<u32>,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        de: f64,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        term_budget: f64,
        #[command(flatten)]
        output: TableOut,
    },
    /// Resource scaling of a model family over a list of sizes.
    Estimate {
        /// Model family JSON.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        /// Override the Rydberg geometry.
        #[arg(long, value_enum)]
        geometry: Option<GeometryArg>,
        /// Override the Rydberg loading seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = AlphaArg::BinarySearch)]
        alpha_mode: AlphaArg,
        #[command(flatten)]
        output: TableOut,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    time: f64,
}

#[derive(Debug, Args)]
pub struct TableOut {
    /// Write JSON here; the table still goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlphaArg {
    BinarySearch,
    Membership,
}

impl From<AlphaArg> for AlphaMode {
    fn from(a: AlphaArg) -> Self {
        match a {
            AlphaArg::BinarySearch => AlphaMode::BinarySearch,
            AlphaArg::Membership => AlphaMode::Membership,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GeometryArg {
    Chain,
    Clustered,
}

/// Output of `simulate`; its `state` field is accepted back by `--state`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub state: Vec<[f64; 2]>,
    pub report: SimReport,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Bare(Vec<[f64; 2]>),
    Wrapped { state: Vec<[f64; 2]> },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.into(),
        source,
    })
}

fn parse<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input {
        path: path.into(),
        msg: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.into(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(pmrsim::Error::from)?;
    s.push('\n');
    Ok(s)
}

/// Accept a PMR file, or a Pauli file that is decomposed on the fly.
fn load_pmr(path: &Path) -> Result<PmrHamiltonian> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Input {
        path: path.into(),
        msg: e.to_string(),
    })?;
    let bad = |e: serde_json::Error| CliError::Input {
        path: path.into(),
        msg: e.to_string(),
    };
    let looks_pmr = value
        .get("terms")
        .and_then(|t| t.as_array())
        .is_some_and(|a| a.first().map_or(value.get("gamma_total").is_some(), |t| t.get("x_mask").is_some()));
    if looks_pmr {
        let f: PmrFile = serde_json::from_value(value).map_err(bad)?;
        Ok(f.to_hamiltonian()?)
    } else {
        let f: PauliFile = serde_json::from_value(value).map_err(bad)?;
        Ok(pmr_decompose(&f.to_hamiltonian()?)?)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!("--eps {eps} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::Usage(format!("--time {t} must be finite and nonnegative")));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Decompose { hamiltonian, out } => {
            let f: PauliFile = parse(&hamiltonian)?;
            let h = pmr_decompose(&f.to_hamiltonian()?)?;
            emit(out.as_deref(), &to_json(&PmrFile::from_hamiltonian(&h))?)
        }
        Command::Params { hamiltonian, target, out } => {
            check_eps(target.eps)?;
            check_time(target.time)?;
            let h = load_pmr(&hamiltonian)?;
            emit(out.as_deref(), &to_json(&choose_params(target.eps, target.time, &h)?)?)
        }
        Command::Simulate {
            hamiltonian,
            state,
            target,
            out,
            dense_limit,
            term_budget,
        } => {
            check_eps(target.eps)?;
            check_time(target.time)?;
            if dense_limit == 0 || term_budget.is_nan() || term_budget <= 0.0 {
                return Err(CliError::Usage("budgets must be positive".into()));
            }
            let h = load_pmr(&hamiltonian)?;
            let psi = match parse::<StateFile>(&state)? {
                StateFile::Bare(v) | StateFile::Wrapped { state: v } => v,
            };
            let opts = SimOptions { dense_limit, term_budget };
            let (fin, report) = simulate(&h, &state_from_pairs(&psi), target.eps, target.time, &opts)?;
            // Hand back the input values untouched when nothing was applied.
            let state = if report.params.is_none() { psi } else { state_to_pairs(&fin) };
            emit(out.as_deref(), &to_json(&SimulateOutput { state, report })?)
        }
        Command::Compile {
            hamiltonian,
            params,
            eps,
            time,
            out,
            qasm,
            alpha_mode,
        } => {
            let h = load_pmr(&hamiltonian)?;
            let p: SimParams = match (params, eps, time) {
                (Some(path), None, None) => parse(&path)?,
                (None, Some(e), Some(t)) => {
                    check_eps(e)?;
                    check_time(t)?;
                    choose_params(e, t, &h)?
                }
                _ => return Err(CliError::Usage("give either --params or both --eps and --time".into())),
            };
            let step = compile_step(&h, &p, alpha_mode.into())?;
            let counts = gate_count(&step.w);
            match out {
                Some(path) => {
                    write(&path, &to_text(&step.w))?;
                    let qpath = qasm.then(|| path.with_extension("qasm"));
                    if let Some(q) = &qpath {
                        write(q, &to_qasm(&step.w))?;
                    }
                    let summary = json!({
                        "qubits": step.w.n_qubits,
                        "gates": counts,
                        "tally": step.layout.tally,
                        "text": path,
                        "qasm": qpath,
                    });
                    emit(None, &to_json(&summary)?)
                }
                None if qasm => emit(None, &to_qasm(&step.w)),
                None => emit(None, &to_text(&step.w)),
            }
        }
        Command::VerifyDd {
            q_max,
            k,
            dt,
            de,
            instances,
            seed,
            term_budget,
            output,
        } => {
            let rows = bound_sweep(&BoundSweep {
                q_max,
                ks: k,
                dt,
                de,
                instances,
                seed,
                term_budget,
            })?;
            let table = bound_table(&rows);
            finish_table(&output, &rows, &table)
        }
        Command::Estimate {
            model,
            sizes,
            eps,
            time,
            geometry,
            seed,
            alpha_mode,
            output,
        } => {
            check_eps(eps)?;
            if !(time > 0.0 && time.is_finite()) {
                return Err(CliError::Usage(format!("--time {time} must be positive")));
            }
            let mut family: ModelFamily = parse(&model)?;
            if let ModelFamily::Rydberg {
                geometry: g, seed: s, ..
            } = &mut family
            {
                if let Some(v) = geometry {
                    *g = match v {
                        GeometryArg::Chain => Geometry::Chain,
                        GeometryArg::Clustered => Geometry::Clustered,
                    };
                }
                if let Some(v) = seed {
                    *s = v;
                }
            } else if geometry.is_some() {
                return Err(CliError::Usage("--geometry applies to Rydberg models only".into()));
            }
            let summary = resource_report(&family, &sizes, time, eps, alpha_mode.into())?;
            finish_table(&output, &summary, &format_table(&summary))
        }
    }
}

fn finish_table<T: Serialize>(o: &TableOut, value: &T, table: &str) -> Result<()> {
    let j = to_json(value)?;
    if let Some(p) = &o.out {
        write(p, &j)?;
    }
    emit(None, if o.json { &j } else { table })
}

fn bound_table(rows: &[BoundRow]) -> String {
    let mut s = format!(
        "{:>3} {:>4} {:>12} {:>12} {:>8} {:>12} {:>10}\n",
        "q", "K", "bound", "max_error", "ratio", "worst_error", "closed_dev"
    );
    for r in rows {
        s.push_str(&format!(
            "{:>3} {:>4} {:>12.4e} {:>12.4e} {:>8.4} {:>12.4e} {:>10.1e}\n",
            r.q, r.big_k, r.bound, r.max_error, r.ratio, r.worst_error, r.closed_form_mismatch
        ));
    }
    s
}
