//! `qferro` command-line tool.
//!
//! Exit codes: 0 on success, 2 when the randomized estimator aborts, 1 for
//! invalid input and every other failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qferro::estimator::{estimate_perfmatch, EstimatorConfig};
use qferro::exact::{matching_ladder, nearperfmatch_exact, perfmatch_exact};
use qferro::hamiltonian::{FerroHamiltonian, RawHamiltonian};
use qferro::matchgraph::{compile_circuit, GraphRecord, WeightedMultigraph};
use qferro::pipeline::{
    estimate_free_energy, estimate_ground_energy, estimate_partition, plan_partition, PipelineConfig,
    DEFAULT_THEORY_BUDGET,
};
use qferro::sampler::{default_steps, sample_many, SamplerConfig, WeightView};
use qferro::trotter::{build_sequence, build_sequence_with_r, GateSequence, SequenceRecord};
use qferro::{Error, Mode};

#[derive(Parser, Debug)]
#[command(name = "qferro", version, about = "Partition functions of ferromagnetic XY-type Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a Hamiltonian file and print it in normalized form.
    Validate(HamArgs),
    /// Build the Trotter gate sequence.
    Trotterize(TrotterArgs),
    /// Compile a gate sequence into a weighted graph.
    CompileGraph(CompileArgs),
    /// Exact oracles for a graph and/or a Hamiltonian.
    Exact(ExactArgs),
    /// Draw matchings from the weighted matchings chain.
    Sample(SampleArgs),
    /// Estimate the perfect-matching sum of a graph.
    EstimatePm(EstimatePmArgs),
    /// Estimate the partition function Tr e^{-beta H}.
    EstimateZ(EstimateZArgs),
    /// Estimate the free energy to an absolute error.
    FreeEnergy(FreeEnergyArgs),
    /// Estimate the ground energy to an absolute error.
    GroundEnergy(GroundEnergyArgs),
}

#[derive(Args, Debug)]
struct HamArgs {
    #[arg(long, value_name = "FILE")]
    hamiltonian: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrotterArgs {
    #[arg(long, value_name = "FILE")]
    hamiltonian: PathBuf,
    #[arg(long)]
    beta: f64,
    /// Trotter relative error; ignored when --r is given.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// Gate sequence JSON as written by `trotterize`.
    #[arg(long, value_name = "FILE", conflicts_with = "hamiltonian")]
    sequence: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "beta")]
    hamiltonian: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    format: GraphFormat,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    hamiltonian: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Chain steps per sample; defaults to the rule for --mode.
    #[arg(long)]
    steps: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Theory,
    Practical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Theory => Mode::Theory,
            ModeArg::Practical => Mode::Practical,
        }
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Sampler precision used for the default step count.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimatePmArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Samples per level (practical mode).
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 1.0)]
    q_coeff: f64,
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(long, value_name = "FILE")]
    hamiltonian: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    q_coeff: f64,
    /// Theory-mode refusal threshold in chain steps.
    #[arg(long, default_value_t = DEFAULT_THEORY_BUDGET)]
    budget: f64,
    /// Attach exact oracle values (at most 3 qubits).
    #[arg(long)]
    cross_check: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl PipelineArgs {
    fn config(&self, beta: f64, eps: f64) -> PipelineConfig {
        PipelineConfig {
            beta,
            eps,
            mode: self.mode.into(),
            r: self.r,
            samples: self.samples,
            steps: self.steps,
            seed: self.seed,
            trials: self.trials,
            q_coeff: self.q_coeff,
            budget: self.budget,
            cross_check: self.cross_check,
        }
    }
}

#[derive(Args, Debug)]
struct EstimateZArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct FreeEnergyArgs {
    #[arg(long)]
    beta: f64,
    /// Absolute error on the free energy.
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct GroundEnergyArgs {
    /// Absolute error on the ground energy.
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> qferro::Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn read_hamiltonian(path: &Path) -> qferro::Result<FerroHamiltonian> {
    read_json::<RawHamiltonian>(path)?.validate()
}

fn read_graph(path: &Path) -> qferro::Result<WeightedMultigraph> {
    WeightedMultigraph::from_record(&read_json::<GraphRecord>(path)?)
}

fn emit_text(text: &str, out: Option<&Path>) -> qferro::Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> qferro::Result<()> {
    emit_text(&serde_json::to_string_pretty(value)?, out)
}

fn sequence_for(h: &FerroHamiltonian, beta: f64, eps: f64, r: Option<usize>) -> qferro::Result<GateSequence> {
    match r {
        Some(r) => build_sequence_with_r(h, beta, r),
        None => build_sequence(h, beta, eps),
    }
}

fn run(cmd: Command) -> qferro::Result<()> {
    match cmd {
        Command::Validate(a) => {
            let h = read_hamiltonian(&a.hamiltonian)?;
            emit(
                &json!({
                    "valid": true,
                    "n": h.n(),
                    "couplings": h.pairs().count(),
                    "hamiltonian": h.to_raw(),
                }),
                a.out.as_deref(),
            )
        }
        Command::Trotterize(a) => {
            let h = read_hamiltonian(&a.hamiltonian)?;
            let seq = sequence_for(&h, a.beta, a.eps, a.r)?;
            emit(&seq.to_record(), a.out.as_deref())
        }
        Command::CompileGraph(a) => {
            let seq = match (&a.sequence, &a.hamiltonian, a.beta) {
                (Some(p), _, _) => GateSequence::from_record(&read_json::<SequenceRecord>(p)?)?,
                (None, Some(p), Some(beta)) => sequence_for(&read_hamiltonian(p)?, beta, a.eps, a.r)?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "give --sequence, or --hamiltonian with --beta".into(),
                    ))
                }
            };
            let g = compile_circuit(&seq)?;
            match a.format {
                GraphFormat::Json => emit(&g.to_record(), a.out.as_deref()),
                GraphFormat::Dot => emit_text(&g.to_dot(), a.out.as_deref()),
            }
        }
        Command::Exact(a) => {
            if a.graph.is_none() && a.hamiltonian.is_none() {
                return Err(Error::InvalidParameter("give --graph and/or --hamiltonian".into()));
            }
            let mut report = serde_json::Map::new();
            if let Some(p) = &a.graph {
                let g = read_graph(p)?;
                let ladder = matching_ladder(&g)?;
                report.insert("total".into(), json!(ladder.total()));
                if g.num_vertices() % 2 == 0 {
                    report.insert("perfmatch".into(), json!(perfmatch_exact(&g)?));
                    report.insert("nearperfmatch".into(), json!(nearperfmatch_exact(&g)?));
                }
                report.insert("ladder".into(), serde_json::to_value(&ladder)?);
            }
            if let Some(p) = &a.hamiltonian {
                let h = read_hamiltonian(p)?;
                report.insert("ground_energy".into(), json!(h.exact_ground_energy()?));
                report.insert("spectrum".into(), json!(h.spectrum()?));
                if let Some(beta) = a.beta {
                    report.insert("beta".into(), json!(beta));
                    report.insert("partition".into(), json!(h.exact_partition(beta)?));
                    report.insert("log_partition".into(), json!(h.exact_log_partition(beta)?));
                    report.insert("free_energy".into(), json!(h.exact_free_energy(beta)?));
                }
            }
            emit(&Value::Object(report), a.out.as_deref())
        }
        Command::Sample(a) => {
            let g = read_graph(&a.graph)?;
            let mode: Mode = a.chain.mode.into();
            let steps = match a.chain.steps {
                Some(s) => s,
                None => default_steps(&g, a.delta, mode)?,
            };
            let cfg = SamplerConfig::new(steps, mode, a.chain.seed)?;
            let (samples, stats) = sample_many(&WeightView::plain(&g), &cfg, &[], a.samples);
            let mut histogram = vec![0usize; g.num_vertices() / 2 + 1];
            for m in &samples {
                histogram[m.len()] += 1;
            }
            let matchings: Vec<Vec<usize>> = samples.iter().map(|m| m.edge_ids()).collect();
            emit(
                &json!({
                    "seed": cfg.seed,
                    "steps": cfg.steps,
                    "mode": mode,
                    "size_histogram": histogram,
                    "acceptance_rate": stats.acceptance_rate(),
                    "stats": stats,
                    "matchings": matchings,
                }),
                a.out.as_deref(),
            )
        }
        Command::EstimatePm(a) => {
            let g = read_graph(&a.graph)?;
            let mut cfg = match a.chain.mode {
                ModeArg::Practical => {
                    EstimatorConfig::practical(&g, a.eps, a.samples, a.chain.steps, a.chain.seed, a.trials)?
                }
                ModeArg::Theory => EstimatorConfig::theory(&g, a.eps, a.q_coeff, a.chain.seed, a.trials)?,
            };
            cfg.q_coeff = a.q_coeff;
            let rep = estimate_perfmatch(&g, &cfg)?;
            emit(
                &json!({
                    "estimate": rep.estimate,
                    "relative_error_target": cfg.eps,
                    "mode": cfg.mode,
                    "seed": cfg.seed,
                    "config": cfg,
                    "aborted_runs": rep.aborted_runs,
                    "runs": rep.runs,
                }),
                a.out.as_deref(),
            )
        }
        Command::EstimateZ(a) => {
            let h = read_hamiltonian(&a.pipeline.hamiltonian)?;
            let cfg = a.pipeline.config(a.beta, a.eps);
            if cfg.mode == Mode::Theory {
                let plan = plan_partition(&h, &cfg)?;
                eprintln!("{}", serde_json::to_string_pretty(&plan)?);
            }
            let rep = estimate_partition(&h, &cfg)?;
            emit(&rep, a.pipeline.out.as_deref())
        }
        Command::FreeEnergy(a) => {
            let h = read_hamiltonian(&a.pipeline.hamiltonian)?;
            let cfg = a.pipeline.config(a.beta, 0.5);
            let rep = estimate_free_energy(&h, a.beta, a.delta, &cfg)?;
            emit(&rep, a.pipeline.out.as_deref())
        }
        Command::GroundEnergy(a) => {
            let h = read_hamiltonian(&a.pipeline.hamiltonian)?;
            let cfg = a.pipeline.config(1.0, 0.5);
            let rep = estimate_ground_energy(&h, a.delta, &cfg)?;
            emit(&rep, a.pipeline.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_abort() { 2 } else { 1 })
        }
    }
}
