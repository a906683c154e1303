//! Command-line pipeline: ingest a bipartite graph, run a null model or
//! threshold, extract a backbone, persist results with a JSON run summary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;

use backbone::io::{self, BackboneFormat};
use backbone::{
    backbone_correlation, backbone_extract, density, fdsm, hyperg, modularity, sdsm, universal,
    Backbone, BipartiteGraph, Dyad, Error, FdsmConfig, Fwer, ModelSummary, ProbabilityMethod,
    Result, ThresholdSpec,
};

#[derive(Parser)]
#[command(
    name = "backbone",
    version,
    about = "Backbone extraction from bipartite projections",
    after_help = "Set BACKBONE_THREADS to cap the worker threads used by the models."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project a bipartite graph to its weighted co-occurrence matrix.
    Project {
        #[command(flatten)]
        input: InputArgs,
        /// Destination CSV path.
        #[arg(long)]
        output: PathBuf,
    },
    /// Universal-threshold backbone of the weighted projection.
    Universal {
        #[command(flatten)]
        input: InputArgs,
        /// Upper threshold: a number or an expression such as "mean+1sd" or "q0.9".
        #[arg(long)]
        upper: ThresholdSpec,
        /// Lower threshold for a signed backbone.
        #[arg(long)]
        lower: Option<ThresholdSpec>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hypergeometric null model (row sums fixed, column sums free).
    Hyperg {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        extract: ExtractOpts,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stochastic degree sequence model (margins fixed in expectation).
    Sdsm {
        #[command(flatten)]
        input: InputArgs,
        /// Probability matrix construction.
        #[arg(long, default_value_t = ProbabilityMethod::Polytope)]
        method: ProbabilityMethod,
        #[command(flatten)]
        extract: ExtractOpts,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fixed degree sequence model (margins fixed exactly, Monte Carlo).
    Fdsm {
        #[command(flatten)]
        input: InputArgs,
        /// Number of sampled matrices.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// RNG seed; a random seed is drawn and recorded when absent.
        #[arg(long)]
        seed: Option<u64>,
        /// Curveball trades between samples (default 5 * rows).
        #[arg(long)]
        trades: Option<u64>,
        /// Restart the chain from the observed graph for every sample.
        #[arg(long)]
        restart: bool,
        /// Agent pair whose sampled weights are exported as <output>.dyad.csv.
        /// Use two values, or one value with a comma for labels without commas.
        #[arg(long, num_args = 1..=2)]
        dyad: Option<Vec<String>>,
        #[command(flatten)]
        extract: ExtractOpts,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extract a backbone from persisted p-value matrices.
    Extract {
        /// Prefix of a persisted null-model result
        /// (<prefix>.positive.csv, <prefix>.negative.csv, <prefix>.summary.json).
        #[arg(long)]
        input: PathBuf,
        /// Two-tailed significance level.
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        /// Keep significantly weak edges as -1.
        #[arg(long)]
        signed: bool,
        /// Familywise error rate correction.
        #[arg(long, default_value_t = Fwer::None)]
        fwer: Fwer,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Side-by-side report on extracted backbones.
    Compare {
        /// Backbone matrix CSV; repeat for each backbone.
        #[arg(long, required = true)]
        backbone: Vec<PathBuf>,
        /// Node partition CSV (label,community) for modularity.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Compare binary backbones (negative edges dropped).
        #[arg(long)]
        binary: bool,
        /// Report destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Report format.
        #[arg(long, default_value = "text", value_parser = ["text", "csv", "json"])]
        output_format: String,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Input file path.
    #[arg(long)]
    input: PathBuf,
    /// Input format.
    #[arg(long, default_value = "matrix", value_parser = ["matrix", "edgelist"])]
    format: String,
}

impl InputArgs {
    fn read(&self) -> Result<BipartiteGraph> {
        match self.format.as_str() {
            "matrix" => io::read_biadjacency_csv(&self.input),
            "edgelist" => io::read_edgelist(&self.input),
            other => Err(Error::InvalidInput(format!("unknown input format {other:?}"))),
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output path: the backbone file when extracting, otherwise the
    /// p-value prefix.
    #[arg(long)]
    output: PathBuf,
    /// Backbone serialization format.
    #[arg(long, default_value_t = BackboneFormat::MatrixCsv)]
    output_format: BackboneFormat,
}

/// Inline-extraction options shared by the null-model subcommands. Without
/// `--alpha` the p-value matrices are persisted for a later `extract` run.
#[derive(Args)]
struct ExtractOpts {
    /// Extract a backbone inline at this two-tailed significance level.
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<f64>,
    /// Keep significantly weak edges as -1.
    #[arg(long)]
    signed: bool,
    /// Familywise error rate correction.
    #[arg(long, default_value_t = Fwer::None)]
    fwer: Fwer,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("alpha must be strictly between 0 and 1, got {v}"))
    }
}

/// Everything needed to replay a run; embedded into the summary JSON.
#[derive(Serialize)]
struct RunConfig {
    command: String,
    input: String,
    format: String,
    output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fwer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trades: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restart: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dyad: Option<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower: Option<String>,
}

impl RunConfig {
    fn new(command: &str, input: &InputArgs, output: &OutputArgs) -> Self {
        RunConfig {
            command: command.into(),
            input: input.input.display().to_string(),
            format: input.format.clone(),
            output: output.output.display().to_string(),
            output_format: Some(output.output_format.to_string()),
            alpha: None,
            signed: None,
            fwer: None,
            method: None,
            trials: None,
            seed: None,
            trades: None,
            restart: None,
            dyad: None,
            upper: None,
            lower: None,
        }
    }

    fn with_extract(mut self, opts: &ExtractOpts) -> Self {
        self.alpha = opts.alpha;
        self.signed = Some(opts.signed);
        self.fwer = Some(opts.fwer.to_string());
        self
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(suffix);
    PathBuf::from(os)
}

fn embed_config(summary: &mut ModelSummary, config: &RunConfig) -> Result<()> {
    summary
        .extra
        .insert("config".into(), serde_json::to_value(config)?);
    Ok(())
}

/// Persist a model run: with `--alpha` an extracted backbone plus
/// `<output>.summary.json`, otherwise the p-value matrices under the
/// `<output>` prefix.
fn finish_model_run(
    mut result: backbone::NullModelResult,
    opts: &ExtractOpts,
    output: &OutputArgs,
    config: &RunConfig,
) -> Result<()> {
    embed_config(result.summary_mut(), config)?;
    match opts.alpha {
        Some(alpha) => {
            let bb = backbone_extract(&result, alpha, opts.signed, opts.fwer)?;
            io::write_backbone(&bb, &output.output, output.output_format)?;
            io::write_summary_json(result.summary(), with_suffix(&output.output, ".summary.json"))?;
            println!(
                "wrote backbone with {} positive edges to {}",
                bb.positive_edge_count(),
                output.output.display()
            );
        }
        None => {
            io::write_null_result(&result, &output.output)?;
            println!(
                "wrote p-value matrices and summary under prefix {}",
                output.output.display()
            );
        }
    }
    Ok(())
}

fn parse_dyad(values: &[String]) -> Result<Dyad> {
    match values {
        [a, b] => Ok(Dyad::new(a.clone(), b.clone())),
        [joint] => match joint.split_once(',') {
            Some((a, b)) => Ok(Dyad::new(a.trim(), b.trim())),
            None => Err(Error::InvalidInput(format!(
                "--dyad {joint:?} has no comma; pass two values or a,b"
            ))),
        },
        _ => unreachable!("clap enforces 1..=2 values"),
    }
}

fn run_compare(
    paths: &[PathBuf],
    partition: Option<&Path>,
    binary: bool,
    output: Option<&Path>,
    output_format: &str,
) -> Result<()> {
    let partition = partition.map(io::read_partition_csv).transpose()?;
    let mut names = Vec::new();
    let mut backbones: Vec<Backbone> = Vec::new();
    let mut reports = Vec::new();
    for path in paths {
        let mut bb = io::read_backbone_csv(path)?;
        if binary {
            bb = bb.to_binary();
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        // an inline-extraction run leaves its summary next to the backbone
        let sidecar = with_suffix(path, ".summary.json");
        let summary = sidecar
            .exists()
            .then(|| io::read_summary_json(&sidecar))
            .transpose()?;
        let model = summary
            .as_ref()
            .map(|s| s.model_name.clone())
            .unwrap_or_else(|| bb.provenance().model_name.clone());
        let report = BackboneReport {
            name: name.clone(),
            model,
            runtime_seconds: summary.as_ref().map(|s| s.runtime_seconds),
            positive_edges: bb.positive_edge_count(),
            density: density(&bb),
            modularity: partition
                .as_ref()
                .map(|p| modularity(&bb, p))
                .transpose()?,
        };
        names.push(name);
        backbones.push(bb);
        reports.push(report);
    }
    let k = backbones.len();
    let mut correlation = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = backbone_correlation(&backbones[i], &backbones[j])?;
            correlation[i][j] = r;
            correlation[j][i] = r;
        }
    }
    let report = CompareReport {
        backbones: reports,
        correlation,
    };
    let rendered = match output_format {
        "text" => report.to_text(),
        "csv" => report.to_csv()?,
        "json" => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
        other => return Err(Error::InvalidInput(format!("unknown report format {other:?}"))),
    };
    match output {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct BackboneReport {
    name: String,
    model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
    positive_edges: usize,
    density: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    modularity: Option<f64>,
}

#[derive(Serialize)]
struct CompareReport {
    backbones: Vec<BackboneReport>,
    /// Pairwise Pearson correlations, indexed like `backbones`.
    correlation: Vec<Vec<f64>>,
}

impl CompareReport {
    fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let name_w = self
            .backbones
            .iter()
            .map(|b| b.name.len())
            .chain(["name".len()])
            .max()
            .unwrap_or(4);
        let model_w = self
            .backbones
            .iter()
            .map(|b| b.model.len())
            .chain(["model".len()])
            .max()
            .unwrap_or(5);
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<model_w$}  {:>10}  {:>6}  {:>8}  {:>10}",
            "name", "model", "runtime_s", "edges", "density", "modularity"
        );
        for b in &self.backbones {
            let runtime = b
                .runtime_seconds
                .map(|r| format!("{r:.2}"))
                .unwrap_or_else(|| "-".into());
            let modularity = b
                .modularity
                .map(|q| format!("{q:.4}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<name_w$}  {:<model_w$}  {:>10}  {:>6}  {:>8.4}  {:>10}",
                b.name, b.model, runtime, b.positive_edges, b.density, modularity
            );
        }
        if self.backbones.len() > 1 {
            let cell_w = name_w.max(7);
            let _ = writeln!(out, "\npairwise correlation:");
            let _ = write!(out, "{:<name_w$}", "");
            for b in &self.backbones {
                let _ = write!(out, "  {:>cell_w$}", b.name);
            }
            let _ = writeln!(out);
            for (i, b) in self.backbones.iter().enumerate() {
                let _ = write!(out, "{:<name_w$}", b.name);
                for j in 0..self.backbones.len() {
                    let _ = write!(out, "  {:>cell_w$.4}", self.correlation[i][j]);
                }
                let _ = writeln!(out);
            }
        }
        out
    }

    fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "name".to_string(),
            "model".into(),
            "runtime_seconds".into(),
            "positive_edges".into(),
            "density".into(),
            "modularity".into(),
        ];
        header.extend(self.backbones.iter().map(|b| format!("r_{}", b.name)));
        writer.write_record(&header)?;
        for (i, b) in self.backbones.iter().enumerate() {
            let mut record = vec![
                b.name.clone(),
                b.model.clone(),
                b.runtime_seconds.map(|r| r.to_string()).unwrap_or_default(),
                b.positive_edges.to_string(),
                b.density.to_string(),
                b.modularity.map(|q| q.to_string()).unwrap_or_default(),
            ];
            record.extend(self.correlation[i].iter().map(|r| r.to_string()));
            writer.write_record(&record)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Project { input, output } => {
            let b = input.read()?;
            let g = b.project();
            io::write_projection_csv(&g, &output)?;
            println!(
                "projected {} x {} graph to a {} x {} weighted matrix at {}",
                b.rows(),
                b.cols(),
                g.size(),
                g.size(),
                output.display()
            );
        }
        Command::Universal {
            input,
            upper,
            lower,
            output,
        } => {
            let b = input.read()?;
            let mut config = RunConfig::new("universal", &input, &output);
            config.upper = Some(upper.to_string());
            config.lower = lower.as_ref().map(|l| l.to_string());
            let start = Instant::now();
            let bb = universal(&b.project(), &upper, lower.as_ref())?;
            let mut summary = ModelSummary::for_graph("universal", &b)?;
            summary.runtime_seconds = start.elapsed().as_secs_f64();
            embed_config(&mut summary, &config)?;
            io::write_backbone(&bb, &output.output, output.output_format)?;
            io::write_summary_json(&summary, with_suffix(&output.output, ".summary.json"))?;
            println!(
                "wrote backbone with {} positive edges to {}",
                bb.positive_edge_count(),
                output.output.display()
            );
        }
        Command::Hyperg {
            input,
            extract,
            output,
        } => {
            let b = input.read()?;
            let config = RunConfig::new("hyperg", &input, &output).with_extract(&extract);
            let result = hyperg(&b)?;
            finish_model_run(result, &extract, &output, &config)?;
        }
        Command::Sdsm {
            input,
            method,
            extract,
            output,
        } => {
            let b = input.read()?;
            let mut config = RunConfig::new("sdsm", &input, &output).with_extract(&extract);
            config.method = Some(method.to_string());
            let result = sdsm(&b, method)?;
            finish_model_run(result, &extract, &output, &config)?;
        }
        Command::Fdsm {
            input,
            trials,
            seed,
            trades,
            restart,
            dyad,
            extract,
            output,
        } => {
            let b = input.read()?;
            let seed = seed.unwrap_or_else(|| rand::rng().random());
            let dyad = dyad.as_deref().map(parse_dyad).transpose()?;
            let mut config = RunConfig::new("fdsm", &input, &output).with_extract(&extract);
            config.trials = Some(trials);
            config.seed = Some(seed);
            config.trades = trades;
            config.restart = Some(restart);
            config.dyad = dyad.as_ref().map(|d| (d.a.clone(), d.b.clone()));
            let fdsm_config = FdsmConfig {
                trials,
                seed,
                trades_per_sample: trades,
                dyad,
                restart,
            };
            let result = fdsm(&b, &fdsm_config)?;
            if let Some(values) = result.dyad_values() {
                let path = with_suffix(&output.output, ".dyad.csv");
                io::write_dyad_values(values, &path)?;
                println!("wrote {} dyad samples to {}", values.len(), path.display());
            }
            finish_model_run(result.into_null_result(), &extract, &output, &config)?;
        }
        Command::Extract {
            input,
            alpha,
            signed,
            fwer,
            output,
        } => {
            let mut result = io::read_null_result(&input)?;
            let bb = backbone_extract(&result, alpha, signed, fwer)?;
            io::write_backbone(&bb, &output.output, output.output_format)?;
            let config = RunConfig {
                command: "extract".into(),
                input: input.display().to_string(),
                format: "null-result".into(),
                output: output.output.display().to_string(),
                output_format: Some(output.output_format.to_string()),
                alpha: Some(alpha),
                signed: Some(signed),
                fwer: Some(fwer.to_string()),
                method: None,
                trials: None,
                seed: None,
                trades: None,
                restart: None,
                dyad: None,
                upper: None,
                lower: None,
            };
            result
                .summary_mut()
                .extra
                .insert("extract_config".into(), serde_json::to_value(&config)?);
            io::write_summary_json(result.summary(), with_suffix(&output.output, ".summary.json"))?;
            println!(
                "wrote backbone with {} positive edges to {}",
                bb.positive_edge_count(),
                output.output.display()
            );
        }
        Command::Compare {
            backbone,
            partition,
            binary,
            output,
            output_format,
        } => {
            run_compare(
                &backbone,
                partition.as_deref(),
                binary,
                output.as_deref(),
                &output_format,
            )?;
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    match std::env::var("BACKBONE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| Error::InvalidInput(format!("BACKBONE_THREADS={v:?} is not a thread count")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::InvalidInput(e.to_string()))
        }
        Err(_) => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads().and_then(|()| run(cli)) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
