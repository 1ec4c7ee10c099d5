//! Batch command-line frontend.
//!
//! `kcut cluster` runs the recursive pipeline and writes per-iteration
//! partition/metrics/embedding files (plus optional scatter SVGs) and a
//! manifest. `kcut vectorize` turns a directory of text documents into a
//! probability-vector dataset. `kcut oracle` prints the exhaustive optimum
//! for small inputs.
//!
//! Exit codes: 0 success, 2 usage or input error, 1 internal error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;

use crate::dataset::{build_weights, load_dataset, WeightKind};
use crate::error::{Error, Result};
use crate::oracle::{brute_force_max_kcut, MAX_BRUTE_FORCE_SIZE};
use crate::pipeline::{run_recursive, RecursionConfig};
use crate::rounding::Partition;
use crate::sdp::SolverConfig;
use crate::textvec::{vectorize_corpus, SubstitutionLexicon, TargetList};

#[derive(Parser)]
#[command(
    name = "kcut",
    version,
    about = "Recursive Max k-Cut clustering with dimensional relaxation and a window-based text vectorizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a dataset and write per-iteration results.
    Cluster(ClusterArgs),
    /// Vectorize a directory of text documents into a dataset.
    Vectorize(VectorizeArgs),
    /// Print the exhaustive Max k-Cut optimum of a small dataset.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Euclidean,
    Squared,
}

impl From<WeightsArg> for WeightKind {
    fn from(w: WeightsArg) -> Self {
        match w {
            WeightsArg::Euclidean => WeightKind::Euclidean,
            WeightsArg::Squared => WeightKind::SquaredEuclidean,
        }
    }
}

#[derive(Args)]
struct ClusterArgs {
    /// Input dataset (delimiter-separated numeric text).
    input: PathBuf,
    /// Number of clusters.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Rounding rounds per iteration.
    #[arg(long, default_value_t = 200)]
    rounds: usize,
    /// Recursion iterations.
    #[arg(long, default_value_t = 5)]
    recursions: usize,
    /// Zero-pad the weight matrix to this size before solving.
    #[arg(long = "pad-to")]
    pad_to: Option<usize>,
    /// Pairwise dissimilarity rule.
    #[arg(long, value_enum, default_value = "euclidean")]
    weights: WeightsArg,
    /// Master seed; fixes every random choice in the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (default: $KCUT_OUT_DIR or ./kcut_out).
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Also write a scatter-plot SVG per iteration.
    #[arg(long = "emit-svg")]
    emit_svg: bool,
    /// Treat the last input column as a label instead of a coordinate.
    #[arg(long = "has-labels")]
    has_labels: bool,
}

#[derive(Args)]
struct VectorizeArgs {
    /// Directory with one plain-text document per file.
    corpus_dir: PathBuf,
    /// Side-effect lexicon file (default: bundled list).
    #[arg(long = "side-effects")]
    side_effects: Option<PathBuf>,
    /// Human-context lexicon file (default: bundled list).
    #[arg(long = "human-terms")]
    human_terms: Option<PathBuf>,
    /// Window size in tokens (split evenly around the anchor; must be even).
    #[arg(long, default_value_t = 10)]
    window: usize,
    /// Comma-separated target words; the first is the anchor.
    #[arg(long, default_value = "amodiaquine,human,side-effect")]
    targets: String,
    /// Output dataset file.
    #[arg(long, short, default_value = "vectors.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    /// Input dataset (at most 12 rows).
    input: PathBuf,
    /// Number of clusters.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Pairwise dissimilarity rule.
    #[arg(long, value_enum, default_value = "euclidean")]
    weights: WeightsArg,
    /// Treat the last input column as a label instead of a coordinate.
    #[arg(long = "has-labels")]
    has_labels: bool,
    /// Print machine-readable JSON.
    #[arg(long)]
    json: bool,
}

/// Parse the process arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cluster(args) => cmd_cluster(&args),
        Command::Vectorize(args) => cmd_vectorize(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    // A pipeline failure is classified by its cause: a stage rejecting its
    // input is still an input error. Exit 1 stays reserved for failures
    // with no such cause.
    match e {
        Error::Pipeline { source, .. } => exit_code_for(source),
        _ => 2,
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read {}: {e}", path.display()))
    })
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn cmd_cluster(args: &ClusterArgs) -> Result<()> {
    let text = read_input(&args.input)?;
    let ds = load_dataset(&text, args.has_labels)?;

    let cfg = RecursionConfig {
        k: args.k,
        rounds: args.rounds,
        recursions: args.recursions,
        padded_size: args.pad_to,
        weight_kind: args.weights.into(),
        master_seed: args.seed,
        solver: SolverConfig::default(),
    };

    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("KCUT_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("kcut_out"));
    fs::create_dir_all(&out_dir)?;

    let run = run_recursive(&ds, &cfg)?;

    let mut manifest = String::new();
    let mut warnings: Vec<String> = Vec::new();
    writeln!(manifest, "tool = kcut {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(manifest, "command = cluster").unwrap();
    writeln!(manifest, "input = {}", args.input.display()).unwrap();
    writeln!(manifest, "points = {}", ds.len()).unwrap();
    writeln!(manifest, "dimension = {}", ds.dim()).unwrap();
    writeln!(manifest, "k = {}", cfg.k).unwrap();
    writeln!(manifest, "rounds = {}", cfg.rounds).unwrap();
    writeln!(manifest, "recursions = {}", cfg.recursions).unwrap();
    writeln!(
        manifest,
        "padded_size = {}",
        cfg.padded_size.map_or("none".to_string(), |m| m.to_string())
    )
    .unwrap();
    writeln!(
        manifest,
        "weights = {}",
        match cfg.weight_kind {
            WeightKind::Euclidean => "euclidean",
            WeightKind::SquaredEuclidean => "squared_euclidean",
        }
    )
    .unwrap();
    writeln!(manifest, "seed = {}", cfg.master_seed).unwrap();
    writeln!(manifest, "out_dir = {}", out_dir.display()).unwrap();

    for rec in &run.records {
        let tag = format!("{:02}", rec.index);

        let partition_path = out_dir.join(format!("partition_{tag}.csv"));
        let mut body = String::from("index,cluster\n");
        for (i, &c) in rec.partition.assignment().iter().enumerate() {
            writeln!(body, "{i},{c}").unwrap();
        }
        fs::write(&partition_path, body)?;

        let embedding_path = out_dir.join(format!("embedding_{tag}.csv"));
        let mut body = String::from("x,y\n");
        for i in 0..rec.embedding.len() {
            let [x, y] = rec.embedding.row(i);
            writeln!(body, "{},{}", fmt_f64(x), fmt_f64(y)).unwrap();
        }
        fs::write(&embedding_path, body)?;

        let metrics_path = out_dir.join(format!("metrics_{tag}.txt"));
        let mut body = String::new();
        writeln!(body, "iteration = {}", rec.index).unwrap();
        writeln!(body, "k = {}", cfg.k).unwrap();
        writeln!(body, "between = {}", fmt_f64(rec.metrics.between)).unwrap();
        writeln!(body, "within = {}", fmt_f64(rec.metrics.within)).unwrap();
        writeln!(body, "total = {}", fmt_f64(rec.metrics.total)).unwrap();
        writeln!(body, "sdp_objective = {}", fmt_f64(rec.sdp_objective)).unwrap();
        writeln!(body, "solver_iterations = {}", rec.solver_iterations).unwrap();
        writeln!(
            body,
            "solver_constraint_violation = {}",
            fmt_f64(rec.solver_residuals.constraint_violation)
        )
        .unwrap();
        writeln!(
            body,
            "solver_stationarity = {}",
            fmt_f64(rec.solver_residuals.stationarity)
        )
        .unwrap();
        writeln!(body, "solver_converged = {}", rec.solver_converged).unwrap();
        writeln!(
            body,
            "explained_variance = {},{}",
            fmt_f64(rec.embedding.explained_variance()[0]),
            fmt_f64(rec.embedding.explained_variance()[1])
        )
        .unwrap();
        fs::write(&metrics_path, body)?;

        writeln!(
            manifest,
            "iteration.{}.partition = {}",
            rec.index,
            partition_path.display()
        )
        .unwrap();
        writeln!(
            manifest,
            "iteration.{}.embedding = {}",
            rec.index,
            embedding_path.display()
        )
        .unwrap();
        writeln!(
            manifest,
            "iteration.{}.metrics = {}",
            rec.index,
            metrics_path.display()
        )
        .unwrap();

        if args.emit_svg {
            let svg_path = out_dir.join(format!("scatter_{tag}.svg"));
            fs::write(
                &svg_path,
                scatter_svg(rec.embedding.coords(), &rec.partition),
            )?;
            writeln!(manifest, "iteration.{}.svg = {}", rec.index, svg_path.display()).unwrap();
        }

        if !rec.solver_converged {
            warnings.push(format!(
                "iteration {}: solver stopped at stationarity {:e} / constraint violation {:e}",
                rec.index,
                rec.solver_residuals.stationarity,
                rec.solver_residuals.constraint_violation
            ));
        }

        println!(
            "iteration {}: between={} within={} sdp={}",
            rec.index,
            fmt_f64(rec.metrics.between),
            fmt_f64(rec.metrics.within),
            fmt_f64(rec.sdp_objective)
        );
    }

    for rec in &run.records {
        writeln!(
            manifest,
            "timing.iteration.{}.solve_s = {:.6}",
            rec.index,
            rec.timings.solve.as_secs_f64()
        )
        .unwrap();
        writeln!(
            manifest,
            "timing.iteration.{}.rounding_s = {:.6}",
            rec.index,
            rec.timings.rounding.as_secs_f64()
        )
        .unwrap();
        writeln!(
            manifest,
            "timing.iteration.{}.embed_s = {:.6}",
            rec.index,
            rec.timings.embed.as_secs_f64()
        )
        .unwrap();
    }
    writeln!(
        manifest,
        "timing.total_s = {:.6}",
        run.total_time.as_secs_f64()
    )
    .unwrap();
    writeln!(manifest, "warnings = {}", warnings.len()).unwrap();
    for (i, wmsg) in warnings.iter().enumerate() {
        writeln!(manifest, "warning.{} = {}", i + 1, wmsg).unwrap();
    }
    fs::write(out_dir.join("manifest.txt"), manifest)?;
    println!("wrote {}", out_dir.join("manifest.txt").display());
    Ok(())
}

fn cmd_vectorize(args: &VectorizeArgs) -> Result<()> {
    let target_words: Vec<String> = args
        .targets
        .split(',')
        .map(|t| t.trim().to_lowercase())
        .filter(|t| !t.is_empty())
        .collect();
    let anchor = target_words
        .first()
        .cloned()
        .ok_or_else(|| Error::Config("--targets must name at least one word".into()))?;
    let targets = TargetList::new(target_words, &anchor)?;

    let lex = match (&args.side_effects, &args.human_terms) {
        (None, None) => SubstitutionLexicon::default(),
        (se, ht) => {
            let se_text = match se {
                Some(p) => read_input(p)?,
                None => include_str!("../assets/side_effect_terms.txt").to_string(),
            };
            let ht_text = match ht {
                Some(p) => read_input(p)?,
                None => include_str!("../assets/human_terms.txt").to_string(),
            };
            SubstitutionLexicon::from_texts(&se_text, &ht_text)?
        }
    };

    let mut entries: Vec<(String, PathBuf)> = fs::read_dir(&args.corpus_dir)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.corpus_dir.display())))?
        .filter_map(|entry| entry.ok())
        .filter(|entry| entry.path().is_file())
        .map(|entry| (entry.file_name().to_string_lossy().into_owned(), entry.path()))
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    if entries.is_empty() {
        return Err(Error::Size(format!(
            "no document files in {}",
            args.corpus_dir.display()
        )));
    }

    let mut documents = Vec::with_capacity(entries.len());
    for (_, path) in &entries {
        documents.push(read_input(path)?);
    }

    let cv = vectorize_corpus(&documents, &targets, &lex, args.window)?;

    let mut body = String::new();
    for t in targets.non_anchor() {
        write!(body, "p_{t},").unwrap();
    }
    body.push_str("provenance\n");
    for (point, prov) in cv.dataset.points().rows().into_iter().zip(&cv.provenance) {
        for p in point.iter() {
            write!(body, "{},", fmt_f64(*p)).unwrap();
        }
        writeln!(body, "{}:{}", prov.document, prov.paragraph).unwrap();
    }
    fs::write(&args.out, body)?;

    for (i, (name, _)) in entries.iter().enumerate() {
        println!("document {i} = {name}");
    }
    println!(
        "wrote {} ({} paragraphs, {} coordinates each)",
        args.out.display(),
        cv.dataset.len(),
        cv.dataset.dim()
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let text = read_input(&args.input)?;
    let ds = load_dataset(&text, args.has_labels)?;
    if ds.len() > MAX_BRUTE_FORCE_SIZE {
        return Err(Error::TooLarge(format!(
            "{} points exceed the brute-force bound of {MAX_BRUTE_FORCE_SIZE}",
            ds.len()
        )));
    }
    let w = build_weights(&ds, args.weights.into());
    let result = brute_force_max_kcut(&w, args.k, true)?;
    if args.json {
        let payload = serde_json::json!({
            "optimum": result.optimum,
            "partition": result.argmax.assignment(),
            "enumerated": result.enumerated,
            "k": args.k,
        });
        println!("{payload}");
    } else {
        println!("optimum = {}", fmt_f64(result.optimum));
        let ids: Vec<String> = result.argmax.assignment().iter().map(|c| c.to_string()).collect();
        println!("partition = {}", ids.join(" "));
        println!("enumerated = {}", result.enumerated);
    }
    Ok(())
}

/// Scatter plot of a 2D embedding colored by cluster; 480x480 canvas, the
/// 3-color palette repeats cyclically for k > 3.
fn scatter_svg(coords: &Array2<f64>, p: &Partition) -> String {
    const PALETTE: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 24.0;

    let n = coords.nrows();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        min_x = min_x.min(coords[[i, 0]]);
        max_x = max_x.max(coords[[i, 0]]);
        min_y = min_y.min(coords[[i, 1]]);
        max_y = max_y.max(coords[[i, 1]]);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span_x.max(span_y);

    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for i in 0..n {
        let cx = MARGIN + (coords[[i, 0]] - min_x) * scale;
        let cy = SIZE - MARGIN - (coords[[i, 1]] - min_y) * scale;
        let color = PALETTE[p.cluster_of(i) % PALETTE.len()];
        write!(
            svg,
            "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"4\" fill=\"{color}\"/>"
        )
        .unwrap();
    }
    svg.push_str("</svg>");
    svg
}
