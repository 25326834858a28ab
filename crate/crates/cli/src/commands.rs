use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvqn_core::mvqn::{
    evaluate, forward, hebbian_init, train, train_observed, Evaluation, TrainReport,
};
use mvqn_core::network::{net_evaluate, net_train, LayerSpec};
use mvqn_core::qperceptron::{expected_ratio, qp_train, MatrixWeight, PerceptronTrainConfig};
use mvqn_core::unity_logic::{optimal_radix, radix_cost, RadixCostQuery};
use mvqn_core::{
    ComplexAmplitude, NetworkModel, NeuronModel, PerceptronModel, QubitState, TrainConfig,
    ZeroPolicy,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{load_dataset, load_net_dataset, CsvOptions, DatasetFormat};
use crate::error::{CliError, Result};
use crate::model_file::{load_model, save_model, ModelFile};
use crate::render::{render_svg, render_table, PlotPoint};

#[derive(Debug, Parser)]
#[command(
    name = "mvqn",
    version,
    about = "Multi-valued neurons over roots of unity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the roots-of-unity / two-mode state table.
    Table(TableArgs),
    /// Train a neuron or a layered network on a CSV dataset.
    Train(TrainArgs),
    /// Score a saved model on a CSV dataset.
    Eval(EvalArgs),
    /// Run the quantum perceptron on random qubits and print the error trace.
    PerceptronDemo(PerceptronArgs),
    /// Tabulate the radix cost and report its minimum.
    Radix(RadixArgs),
    /// Draw sectors and weighted sums as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Twice the spin of each block.
    #[arg(long = "two-j", value_delimiter = ',', default_values_t = [1u32, 2, 4])]
    pub two_j: Vec<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = DatasetFormat::Sector)]
    pub format: DatasetFormat,
    /// Skip the first line of the CSV.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Neuron,
    Network,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Random,
    Hebbian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroArg {
    FirstSector,
    Reject,
}

impl From<ZeroArg> for ZeroPolicy {
    fn from(z: ZeroArg) -> Self {
        match z {
            ZeroArg::FirstSector => ZeroPolicy::FirstSector,
            ZeroArg::Reject => ZeroPolicy::Reject,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LearnArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    #[arg(long, default_value_t = 100)]
    pub max_epochs: usize,
    /// Reshuffle the sample order every epoch.
    #[arg(long)]
    pub shuffle: bool,
    #[arg(long, default_value_t = 1.0)]
    pub target_accuracy: f64,
    #[arg(long, value_enum, default_value_t = ZeroArg::FirstSector)]
    pub zero_policy: ZeroArg,
    /// Seed for every random draw in the run.
    #[arg(long, env = "MVQN_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Neuron)]
    pub kind: ModelKind,
    /// Number of sectors.
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub data: DataArgs,
    /// Neurons per layer, input side first; the last entry is the output count.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 1])]
    pub layers: Vec<usize>,
    #[arg(long, value_enum, default_value_t = InitKind::Random)]
    pub init: InitKind,
    #[command(flatten)]
    pub learn: LearnArgs,
    /// Where to write the model JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch CSV; defaults to `<out stem>.report.csv` next to the model.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerceptronMode {
    Matrix,
    Scalar,
}

#[derive(Debug, Args)]
pub struct PerceptronArgs {
    /// Number of input qubits.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, env = "MVQN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PerceptronMode::Matrix)]
    pub mode: PerceptronMode,
    /// Write the trace CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also save the trained weights as a model file.
    #[arg(long)]
    pub save_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RadixArgs {
    /// Size of the number range.
    #[arg(long = "N", alias = "range")]
    pub range: f64,
    #[arg(long, default_value_t = 10)]
    pub r_max: u32,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Neuron model; its weighted sums are plotted for every sample.
    #[arg(long, requires = "data")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DatasetFormat::Sector)]
    pub format: DatasetFormat,
    #[arg(long)]
    pub header: bool,
    /// Sector count when no model is given.
    #[arg(long, required_unless_present = "model")]
    pub k: Option<u32>,
    /// Train from the model and trace this sample's weighted sum per epoch.
    #[arg(long, requires = "model")]
    pub trajectory: Option<usize>,
    #[command(flatten)]
    pub learn: LearnArgs,
    #[arg(long)]
    pub out: PathBuf,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Table(a) => emit(out, &render_table(&a.two_j)?),
        Command::Train(a) => cmd_train(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::PerceptronDemo(a) => cmd_perceptron(a, out),
        Command::Radix(a) => cmd_radix(a, out),
        Command::Plot(a) => cmd_plot(a, out),
    }
}

fn train_config(learn: &LearnArgs, rng: &mut ChaCha8Rng) -> TrainConfig {
    TrainConfig {
        learning_rate: learn.lr,
        max_epochs: learn.max_epochs,
        shuffle_seed: learn.shuffle.then(|| rng.next_u64()),
        target_accuracy: learn.target_accuracy,
        zero_policy: learn.zero_policy.into(),
    }
}

pub fn default_report_path(model_path: &Path) -> PathBuf {
    let stem = model_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    model_path.with_file_name(format!("{stem}.report.csv"))
}

pub fn report_csv(report: &TrainReport, samples: usize) -> String {
    let mut s = String::from("epoch,errors,accuracy\n");
    for (i, e) in report.per_epoch_errors.iter().enumerate() {
        s.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            e,
            (samples - e) as f64 / samples as f64
        ));
    }
    s
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.learn.seed);
    let opts = CsvOptions {
        format: a.data.format,
        k: a.k,
        outputs: 1,
        header: a.data.header,
    };
    let (model, report, samples) = match a.kind {
        ModelKind::Neuron => {
            let ds = load_dataset(&a.data.data, &opts)?;
            let init = match a.init {
                InitKind::Random => NeuronModel::random(a.k, ds.arity(), &mut rng)?,
                InitKind::Hebbian => hebbian_init(&ds)?,
            };
            let cfg = train_config(&a.learn, &mut rng);
            let (m, r) = train(&init, &ds, &cfg)?;
            (ModelFile::Neuron(m), r, ds.len())
        }
        ModelKind::Network => {
            if a.init == InitKind::Hebbian {
                return Err(CliError::Usage(
                    "hebbian init applies to single neurons only".into(),
                ));
            }
            if a.layers.is_empty() || a.layers.contains(&0) {
                return Err(CliError::Usage(
                    "every layer needs at least one neuron".into(),
                ));
            }
            let outputs = *a.layers.last().unwrap_or(&1);
            let ds = load_net_dataset(&a.data.data, &CsvOptions { outputs, ..opts })?;
            let specs: Vec<LayerSpec> = a
                .layers
                .iter()
                .map(|&n| LayerSpec {
                    neuron_count: n,
                    k: a.k,
                })
                .collect();
            let arity = ds.samples()[0].inputs().len();
            let init = NetworkModel::random(arity, &specs, &mut rng)?;
            let cfg = train_config(&a.learn, &mut rng);
            let (m, r) = net_train(&init, &ds, &cfg)?;
            (ModelFile::Network(m), r, ds.len())
        }
    };
    save_model(&a.out, &model)?;
    let report_path = a.report.unwrap_or_else(|| default_report_path(&a.out));
    write_file(&report_path, &report_csv(&report, samples))?;
    emit(
        out,
        &format!(
            "epochs_run={} converged={} final_accuracy={} degenerate_zero_count={}\n",
            report.epochs_run,
            report.converged,
            report.final_accuracy,
            report.degenerate_zero_count
        ),
    )
}

fn format_evaluation(label: &str, e: &Evaluation) -> String {
    let mut s = format!(
        "{label}accuracy={} mean_angular_error={:.6}\n",
        e.accuracy, e.mean_angular_error
    );
    s.push_str("confusion (row = target, column = predicted)\n");
    for row in &e.confusion {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let text = match load_model(&a.model)? {
        ModelFile::Neuron(m) => {
            let opts = CsvOptions {
                format: a.data.format,
                k: m.k(),
                outputs: 1,
                header: a.data.header,
            };
            let ds = load_dataset(&a.data.data, &opts)?;
            format_evaluation("", &evaluate(&m, &ds)?)
        }
        ModelFile::Network(net) => {
            let opts = CsvOptions {
                format: a.data.format,
                k: net.output_k(),
                outputs: net.output_count(),
                header: a.data.header,
            };
            let ds = load_net_dataset(&a.data.data, &opts)?;
            let ev = net_evaluate(&net, &ds)?;
            let mut s = format!("accuracy={}\n", ev.accuracy);
            for (i, e) in ev.per_output.iter().enumerate() {
                s.push_str(&format_evaluation(&format!("output {i}: "), e));
            }
            s
        }
        ModelFile::Perceptron(_) => {
            return Err(CliError::Schema(
                "perceptron models have no sector dataset to score".into(),
            ));
        }
    };
    emit(out, &text)
}

fn random_qubit(rng: &mut ChaCha8Rng) -> QubitState {
    let mut c = || ComplexAmplitude::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (a, b) = (c(), c());
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    QubitState::new(a / n, b / n)
}

fn random_amplitude(rng: &mut ChaCha8Rng) -> ComplexAmplitude {
    ComplexAmplitude::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
}

/// The trace CSV: `step,squared_error,contraction_ratio`; the ratio is
/// empty where it is undefined.
pub fn trace_csv(trace: &mvqn_core::qperceptron::PerceptronTrace) -> String {
    let mut s = String::from("step,squared_error,contraction_ratio\n");
    for (i, st) in trace.steps.iter().enumerate() {
        let ratio = st
            .contraction_ratio
            .map(|r| format!("{r:.10}"))
            .unwrap_or_default();
        s.push_str(&format!("{i},{:e},{ratio}\n", st.squared_error));
    }
    s
}

fn cmd_perceptron(a: PerceptronArgs, out: &mut dyn Write) -> Result<()> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let inputs: Vec<QubitState> = (0..a.n).map(|_| random_qubit(&mut rng)).collect();
    let desired = random_qubit(&mut rng);
    let model = match a.mode {
        PerceptronMode::Matrix => PerceptronModel::Matrix(
            (0..a.n)
                .map(|_| MatrixWeight {
                    m00: random_amplitude(&mut rng),
                    m01: random_amplitude(&mut rng),
                    m10: random_amplitude(&mut rng),
                    m11: random_amplitude(&mut rng),
                })
                .collect(),
        ),
        PerceptronMode::Scalar => {
            PerceptronModel::Scalar((0..a.n).map(|_| random_amplitude(&mut rng)).collect())
        }
    };
    let (trained, trace) = qp_train(
        &model,
        &inputs,
        &desired,
        &PerceptronTrainConfig::new(a.eta, a.steps),
    )?;
    if trace.eta_out_of_range {
        eprintln!(
            "warning: eta = {} is outside (0, 1/{}); the error need not shrink",
            a.eta, a.n
        );
    }
    if a.mode == PerceptronMode::Matrix {
        eprintln!(
            "expected ratio (1 - eta n)^2 = {:.10}",
            expected_ratio(a.eta, a.n)
        );
    }
    if let Some(path) = &a.save_model {
        save_model(path, &ModelFile::Perceptron(trained))?;
    }
    let csv = trace_csv(&trace);
    match &a.out {
        Some(path) => write_file(path, &csv),
        None => emit(out, &csv),
    }
}

fn cmd_radix(a: RadixArgs, out: &mut dyn Write) -> Result<()> {
    let best = optimal_radix(a.range, a.r_max)?;
    let mut s = String::from("r,cost\n");
    for r in 2..=a.r_max {
        let c = radix_cost(RadixCostQuery {
            radix: r,
            range: a.range,
            scale: a.scale,
        })?;
        s.push_str(&format!("{r},{c:.6}\n"));
    }
    s.push_str(&format!("argmin r={best}\n"));
    emit(out, &s)
}

fn cmd_plot(a: PlotArgs, out: &mut dyn Write) -> Result<()> {
    let mut points = Vec::new();
    let mut trajectory = Vec::new();
    let k = match &a.model {
        Some(path) => {
            let ModelFile::Neuron(model) = load_model(path)? else {
                return Err(CliError::Schema("plot needs a neuron model".into()));
            };
            let data = a
                .data
                .as_ref()
                .ok_or_else(|| CliError::Usage("--model needs --data".into()))?;
            let opts = CsvOptions {
                format: a.format,
                k: model.k(),
                outputs: 1,
                header: a.header,
            };
            let ds = load_dataset(data, &opts)?;
            let model = match a.trajectory {
                Some(i) => {
                    let sample = ds
                        .samples()
                        .get(i)
                        .ok_or_else(|| CliError::Usage(format!("sample {i} does not exist")))?
                        .clone();
                    let mut rng = ChaCha8Rng::seed_from_u64(a.learn.seed);
                    let cfg = train_config(&a.learn, &mut rng);
                    trajectory.push(forward(&model, sample.inputs())?.weighted_sum);
                    let mut last_err = None;
                    let (trained, _) = train_observed(&model, &ds, &cfg, |_, m| {
                        match forward(m, sample.inputs()) {
                            Ok(o) => trajectory.push(o.weighted_sum),
                            Err(e) => last_err = Some(e),
                        }
                    })?;
                    if let Some(e) = last_err {
                        return Err(e.into());
                    }
                    trained
                }
                None => model,
            };
            for s in ds.samples() {
                let o = forward(&model, s.inputs())?;
                points.push(PlotPoint {
                    z: o.weighted_sum,
                    correct: o.output == s.target(),
                });
            }
            model.k()
        }
        None => {
            a.k.ok_or_else(|| CliError::Usage("--k is required without --model".into()))?
        }
    };
    if k < 2 {
        return Err(CliError::Usage(format!("k = {k} must be at least 2")));
    }
    write_file(&a.out, &render_svg(k, &points, &trajectory))?;
    emit(out, &format!("wrote {}\n", a.out.display()))
}
