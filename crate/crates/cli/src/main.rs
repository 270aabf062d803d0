use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use novelty_core::evaluation::{
    cross_validate, derive_labels, sweep, write_det_tsv, CostConfig, GroundTruth, LabeledScores,
};
use novelty_core::runner::{
    bench, document_of, generate_synthetic, read_scores, read_stream, run_grid, write_cost_csv, write_scores,
    BenchConfig, BenchRow, GridSpec, RunConfig, StreamRecord, SynthConfig,
};
use novelty_core::scorers::{Detector, ScorerKind};
use novelty_core::tdf::DecayKind;
use novelty_core::text::{Document, Stoplist};
use novelty_core::weighting::WeightingScheme;

#[derive(Parser)]
#[command(name = "novelty", version, about = "Novelty detection over text streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every document of a JSON-lines stream.
    Score(ScoreArgs),
    /// Detection cost and DET curve for a score file.
    Evaluate(EvaluateArgs),
    /// Cross-validated cost over a grid of configurations.
    Sweep(SweepArgs),
    /// Scoring latency per document across scorers and window lengths.
    Bench(BenchArgs),
    /// Write a labelled synthetic stream.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct RunFlags {
    /// key = value file; its settings override flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scorer: Option<String>,
    /// Three-letter weighting code, e.g. nsd or kbn.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long = "window", short = 'n')]
    window: Option<usize>,
    #[arg(long)]
    decay: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// title_snippet or content.
    #[arg(long)]
    field: Option<String>,
    /// Leave the first N documents out of evaluation.
    #[arg(long)]
    exclude_warmup: bool,
    #[arg(long)]
    include_zero_length: bool,
    #[arg(long)]
    folds: Option<usize>,
    /// Shuffle folds with this seed instead of contiguous blocks.
    #[arg(long)]
    shuffle: Option<u64>,
    /// Stopword file, or "none"; the built-in English list by default.
    #[arg(long)]
    stopwords: Option<String>,
}

impl RunFlags {
    fn run_config(&self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        let pairs = [
            ("scorer", self.scorer.clone()),
            ("scheme", self.scheme.clone()),
            ("window", self.window.map(|v| v.to_string())),
            ("decay", self.decay.clone()),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("lambda", self.lambda.map(|v| v.to_string())),
            ("k1", self.k1.map(|v| v.to_string())),
            ("b", self.b.map(|v| v.to_string())),
            ("field", self.field.clone()),
            ("folds", self.folds.map(|v| v.to_string())),
            ("shuffle", self.shuffle.map(|v| v.to_string())),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                c.set(key, &v)?;
            }
        }
        c.exclude_warmup |= self.exclude_warmup;
        c.include_zero_length |= self.include_zero_length;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            c.apply_file(&text)?;
        }
        Ok(c)
    }

    fn stoplist(&self) -> Result<Stoplist> {
        match self.stopwords.as_deref() {
            None => Ok(Stoplist::english()),
            Some("none") => Ok(Stoplist::empty()),
            Some(path) => Ok(Stoplist::read(open(Path::new(path))?)?),
        }
    }
}

#[derive(Args)]
struct ScoreArgs {
    /// JSON-lines stream; stdin when omitted.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Score TSV; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write elapsed_ns as 0 so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Save the temporal index after the run (ns_t only).
    #[arg(long)]
    save_index: Option<PathBuf>,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    scores: PathBuf,
    /// Stream with cluster ids to derive labels from.
    #[arg(long, conflicts_with = "truth", required_unless_present = "truth")]
    stream: Option<PathBuf>,
    /// `doc_id<TAB>label` file.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Comma-separated cluster ids left out of evaluation.
    #[arg(long, value_delimiter = ',')]
    mixed: Vec<String>,
    /// Write the DET curve of the full score set here.
    #[arg(long)]
    det: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    c_miss: f64,
    #[arg(long, default_value_t = 1.0)]
    c_fa: f64,
    #[arg(long, default_value_t = 0.5)]
    p_target: f64,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "ns")]
    scorers: Vec<String>,
    /// Comma-separated codes; "default" uses each scorer's own.
    #[arg(long, value_delimiter = ',', default_value = "default")]
    schemes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "20,40,60,80,100,120,140,160,180,200")]
    windows: Vec<usize>,
    /// Comma-separated kind:alpha pairs for ns_t.
    #[arg(long, value_delimiter = ',', default_value = "sigmoid:50")]
    decays: Vec<String>,
    #[arg(long)]
    mixed: Vec<String>,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args)]
struct BenchArgs {
    /// Stream to time; a synthetic content-length stream when omitted.
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    docs: usize,
    #[arg(long, value_delimiter = ',', default_value = "ns,mean_cs")]
    scorers: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "20,40,60,80,100,120,140,160,180,200")]
    windows: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    clusters: usize,
    #[arg(long, default_value_t = 1)]
    min_cluster: usize,
    #[arg(long, default_value_t = 10)]
    max_cluster: usize,
    #[arg(long, default_value_t = 20)]
    topic_vocab: usize,
    #[arg(long, default_value_t = 200)]
    background_vocab: usize,
    #[arg(long, default_value_t = 0.3)]
    background_fraction: f64,
    #[arg(long, default_value_t = 20)]
    min_length: usize,
    #[arg(long, default_value_t = 400)]
    max_length: usize,
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_stream(path: Option<&Path>) -> Result<Vec<StreamRecord>> {
    let input = match path {
        Some(p) => read_stream(open(p)?)?,
        None => read_stream(io::stdin().lock())?,
    };
    if input.skipped > 0 {
        log::warn!("skipped {} malformed lines", input.skipped);
    }
    if input.out_of_order > 0 {
        log::warn!("{} records out of timestamp order", input.out_of_order);
    }
    Ok(input.records)
}

fn truth_from_stream(records: &[StreamRecord], mixed: &[String]) -> GroundTruth {
    let mixed: HashSet<String> = mixed.iter().cloned().collect();
    derive_labels(records.iter().map(|r| (r.id.as_str(), r.cluster_id.as_deref())), &mixed)
}

fn score(args: &ScoreArgs) -> Result<()> {
    let config = args.run.run_config()?;
    let stoplist = args.run.stoplist()?;
    let records = load_stream(args.input.as_deref())?;
    let mut detector = Detector::new(config.detector_config()?)?;
    let mut scores = Vec::with_capacity(records.len());
    for r in &records {
        scores.push(detector.process(document_of(r, config.field, &stoplist))?);
    }
    info!("scored {} documents with {}", scores.len(), config.scorer);
    let mut out = output(args.output.as_deref())?;
    write_scores(&scores, &config, !args.no_timing, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.save_index {
        let Some(index) = detector.tdf_index() else {
            bail!("--save-index needs --scorer ns_t");
        };
        let mut f = output(Some(path))?;
        index.write_snapshot(&mut f)?;
        f.flush()?;
    }
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let config = args.run.run_config()?;
    let records = read_scores(open(&args.scores)?)?;
    let truth = match (&args.stream, &args.truth) {
        (Some(s), _) => truth_from_stream(&load_stream(Some(s))?, &args.mixed),
        (None, Some(t)) => GroundTruth::read_tsv(open(t)?)?,
        (None, None) => bail!("one of --stream or --truth is required"),
    };
    let cost = CostConfig {
        c_miss: args.c_miss,
        c_fa: args.c_fa,
        p_target: args.p_target,
    };
    cost.validate()?;
    let data = LabeledScores::from_records(&records, &truth, &config.eval_options())?;
    let full = sweep(&data, &cost)?;
    let cv = cross_validate(&data, &config.cv_config(), &cost)?;

    let mut out = io::stdout().lock();
    writeln!(out, "documents\t{}", data.len())?;
    writeln!(out, "targets\t{}", data.target_count())?;
    writeln!(out, "minC_Det\t{}", full.best().cost)?;
    writeln!(out, "threshold\t{}", full.best().threshold)?;
    for (i, (c, t)) in cv.fold_costs.iter().zip(&cv.thresholds).enumerate() {
        writeln!(out, "fold{i}\t{c}\t{t}")?;
    }
    writeln!(out, "avgC_Det\t{}", cv.average_cost())?;
    if let Some(path) = &args.det {
        let mut f = output(Some(path))?;
        write_det_tsv(&full.points, &mut f)?;
        f.flush()?;
    }
    Ok(())
}

fn parse_scorers(names: &[String]) -> Result<Vec<ScorerKind>> {
    names.iter().map(|s| Ok(s.parse()?)).collect()
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let base = args.run.run_config()?;
    let stoplist = args.run.stoplist()?;
    let records = load_stream(Some(&args.input))?;
    let truth = truth_from_stream(&records, &args.mixed);
    let docs: Vec<Document> = records.iter().map(|r| document_of(r, base.field, &stoplist)).collect();

    let schemes = args
        .schemes
        .iter()
        .map(|s| match s.as_str() {
            "default" => Ok(None),
            code => Ok(Some(WeightingScheme::parse(code)?)),
        })
        .collect::<Result<Vec<_>>>()?;
    let decays = args
        .decays
        .iter()
        .map(|s| {
            let (kind, alpha) = s.split_once(':').unwrap_or((s, "50"));
            Ok((kind.parse::<DecayKind>()?, alpha.parse::<f64>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GridSpec {
        base,
        scorers: parse_scorers(&args.scorers)?,
        schemes,
        windows: args.windows.clone(),
        decays,
    };
    let rows = run_grid(&docs, &truth, &spec, &CostConfig::default());
    let mut out = output(args.output.as_deref())?;
    write_cost_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let config = args.run.run_config()?;
    let stoplist = args.run.stoplist()?;
    let records = match &args.input {
        Some(p) => load_stream(Some(p))?,
        None => generate_synthetic(&SynthConfig {
            clusters: args.docs,
            cluster_size: (1, 9),
            doc_length: (300, 460),
            ..SynthConfig::default()
        }),
    };
    let docs: Vec<Document> = records
        .iter()
        .take(args.docs)
        .map(|r| document_of(r, config.field, &stoplist))
        .collect();
    let bench_config = BenchConfig {
        scorers: parse_scorers(&args.scorers)?,
        windows: args.windows.clone(),
        repetitions: args.repetitions,
    };
    let rows = bench(&docs, &bench_config)?;
    BenchRow::write_tsv(&rows, io::stdout().lock())?;
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let config = SynthConfig {
        seed: args.seed,
        clusters: args.clusters,
        cluster_size: (args.min_cluster, args.max_cluster),
        topic_vocab: args.topic_vocab,
        background_vocab: args.background_vocab,
        background_fraction: args.background_fraction,
        doc_length: (args.min_length, args.max_length),
        overlap: args.overlap,
    };
    let mut out = output(args.output.as_deref())?;
    for r in generate_synthetic(&config) {
        writeln!(out, "{}", r.to_json_line())?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Score(a) => score(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Bench(a) => run_bench(a),
        Command::Synth(a) => synth(a),
    }
}
