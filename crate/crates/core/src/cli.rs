//! Command-line front end. Exit codes: 0 success, 1 data error, 2 usage error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::clustering::{self, Affinity, ClusterError, Linkage, SpectralParams};
use crate::dataset::Dataset;
use crate::dissimilarity::{
    self, combine, component_matrices, validate_weights, Component, DissimilarityConfig,
    DissimilarityError,
};
use crate::evaluation::{self, EvaluationError, EvaluationReport, Task, TuneOptions};
use crate::hypergraph::Hypergraph;
use crate::ingest::{self, IngestError};
use crate::tree::{AttributeBag, NeighbourhoodTree, TreeError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "relsim",
    version,
    about = "Neighbourhood-tree dissimilarity for relational data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise distance matrix over the target vertices.
    Distances(DistancesArgs),
    /// Cluster a distance matrix.
    Cluster(ClusterArgs),
    /// Cross-validated kNN classification.
    Knn(KnnArgs),
    /// Print the level multisets of one vertex's neighbourhood tree.
    InspectTree(InspectArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    /// w1..w5 for ad, nad, cd, nd, ed.
    #[arg(long, num_args = 5, value_names = ["AD", "NAD", "CD", "ND", "ED"],
          default_values_t = [0.2, 0.2, 0.2, 0.2, 0.2], allow_negative_numbers = true)]
    pub weights: Vec<f64>,
    #[arg(long, env = "RELSIM_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    pub dataset: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Also write the five normalised component matrices next to the output.
    #[arg(long)]
    pub emit_components: bool,
    /// Matrix file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Agglomerative,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AffinityKind {
    OneMinus,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    pub matrix: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Method::Agglomerative)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Linkage::Average)]
    pub linkage: Linkage,
    #[arg(long, value_enum, default_value_t = AffinityKind::OneMinus)]
    pub affinity: AffinityKind,
    /// Bandwidth for the gaussian affinity.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Class labels (`<id> <class>` lines or a dataset file).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Require an ARI score; needs --labels.
    #[arg(long)]
    pub ari: bool,
    /// Assignment file; stdout when omitted.
    #[arg(long)]
    pub assignments: Option<PathBuf>,
    /// JSON report file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    pub dataset: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Select weights per fold by inner cross-validation (default).
    #[arg(long, overrides_with = "no_tune")]
    pub tune: bool,
    /// Use --weights for every fold.
    #[arg(long, overrides_with = "tune")]
    pub no_tune: bool,
    #[arg(long, default_value_t = 0.2)]
    pub grid_step: f64,
    /// Explicit grid point `w1,w2,w3,w4,w5`; repeatable, replaces --grid-step.
    #[arg(long = "grid", value_name = "W1,..,W5")]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report file; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub vertex: String,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<DissimilarityError> for Failure {
    fn from(e: DissimilarityError) -> Self {
        match e {
            DissimilarityError::WeightSumInvalid { .. }
            | DissimilarityError::InvalidWeight(_)
            | DissimilarityError::InvalidDepth(_)
            | DissimilarityError::NoAggregates
            | DissimilarityError::Workers(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<ClusterError> for Failure {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::BadK { .. }
            | ClusterError::InvalidSigma(_)
            | ClusterError::NoRestarts => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<EvaluationError> for Failure {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::BadK | EvaluationError::BadGrid(_) | EvaluationError::BadFolds(_) => {
                Failure::Usage(e.to_string())
            }
            EvaluationError::Dissimilarity(d) => d.into(),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Distances(a) => distances(&a, out, err),
        Command::Cluster(a) => cluster(&a, out, err),
        Command::Knn(a) => knn(&a, out, err),
        Command::InspectTree(a) => inspect_tree(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Data(format!("stdout: {e}"))),
    }
}

fn measure_config(m: &MeasureArgs) -> Result<DissimilarityConfig, Failure> {
    let weights: [f64; 5] = m
        .weights
        .as_slice()
        .try_into()
        .map_err(|_| Failure::Usage("--weights takes exactly five values".into()))?;
    if m.workers == Some(0) {
        return Err(Failure::Usage("--workers must be >= 1".into()));
    }
    let cfg = DissimilarityConfig {
        weights,
        depth: m.depth,
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `out.csv` → `out.ad.csv`; `out` → `out.ad`.
pub fn component_path(output: &Path, c: Component) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match output.extension() {
        Some(ext) => format!("{stem}.{}.{}", c.name(), ext.to_string_lossy()),
        None => format!("{stem}.{}", c.name()),
    };
    output.with_file_name(name)
}

fn distances(a: &DistancesArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let cfg = measure_config(&a.measure)?;
    if a.emit_components && a.output.is_none() {
        return Err(Failure::Usage("--emit-components needs --output".into()));
    }
    let dataset = ingest::read_dataset(&a.dataset)?;
    let start = Instant::now();
    let (_, norm) = component_matrices(&dataset, &cfg, a.measure.workers)?;
    let matrix = combine(&norm, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    emit(
        a.output.as_deref(),
        &ingest::write_distance_matrix(&matrix)?,
        out,
    )?;
    if let (true, Some(output)) = (a.emit_components, &a.output) {
        for c in Component::ALL {
            let text = ingest::write_matrix(norm.get(c), &norm.ids)?;
            write_file(&component_path(output, c), &text)?;
        }
    }
    let _ = writeln!(err, "{} targets, {elapsed:.3}s", matrix.len());
    Ok(())
}

fn cluster(a: &ClusterArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    if a.ari && a.labels.is_none() {
        return Err(Failure::Usage("--ari needs --labels".into()));
    }
    if a.k == 0 {
        return Err(Failure::Usage("--k must be >= 1".into()));
    }
    let affinity = match a.affinity {
        AffinityKind::OneMinus => Affinity::OneMinus,
        AffinityKind::Gaussian => {
            if !(a.sigma > 0.0 && a.sigma.is_finite()) {
                return Err(Failure::Usage(format!(
                    "--sigma must be > 0, got {}",
                    a.sigma
                )));
            }
            Affinity::Gaussian { sigma: a.sigma }
        }
    };
    if a.restarts == 0 {
        return Err(Failure::Usage("--restarts must be >= 1".into()));
    }
    let matrix = ingest::parse_matrix(&ingest::read_text(&a.matrix)?)?;
    let labels = match &a.labels {
        Some(p) => Some(ingest::parse_labels(&ingest::read_text(p)?)?),
        None => None,
    };

    let start = Instant::now();
    let mut warnings = Vec::new();
    let (assignment, config) = match a.method {
        Method::Agglomerative => (
            clustering::agglomerative(&matrix, a.k, a.linkage)?,
            json!({ "method": "agglomerative", "k": a.k, "linkage": a.linkage }),
        ),
        Method::Spectral => {
            let params = SpectralParams {
                affinity,
                kmeans_restarts: a.restarts,
                seed: a.seed,
            };
            let outcome = clustering::spectral(&matrix, a.k, &params)?;
            warnings.extend(outcome.warnings);
            (
                outcome.assignment,
                json!({ "method": "spectral", "k": a.k, "params": params }),
            )
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    let ari = match &labels {
        Some(l) => Some(evaluation::ari(&assignment, l)?),
        None => None,
    };
    emit(
        a.assignments.as_deref(),
        &ingest::write_assignment(&assignment),
        out,
    )?;
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if let Some(x) = ari {
        let _ = writeln!(err, "ari {x}");
    }
    if let Some(path) = &a.report {
        let report = EvaluationReport {
            task: Task::Clustering,
            metric: "ari".into(),
            values: ari.into_iter().collect(),
            mean: ari,
            config,
            selected_weights: vec![],
            best_weights: None,
            wall_clock_seconds: elapsed,
            warnings,
        };
        write_file(path, &report.to_json())?;
    }
    Ok(())
}

fn parse_grid_point(s: &str) -> Result<[f64; 5], Failure> {
    let values: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("bad grid point `{s}`")))?;
    let w: [f64; 5] = values
        .try_into()
        .map_err(|_| Failure::Usage(format!("grid point `{s}` needs five values")))?;
    validate_weights(&w).map_err(|e| Failure::Usage(format!("grid point `{s}`: {e}")))?;
    Ok(w)
}

fn knn(a: &KnnArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let cfg = measure_config(&a.measure)?;
    if a.k == 0 {
        return Err(Failure::Usage("--k must be >= 1".into()));
    }
    if a.folds < 2 {
        return Err(Failure::Usage("--folds must be >= 2".into()));
    }
    let tune = !a.no_tune;
    let grid = if !tune {
        vec![cfg.weights]
    } else if a.grid.is_empty() {
        evaluation::weight_grid(a.grid_step)?
    } else {
        a.grid
            .iter()
            .map(|s| parse_grid_point(s))
            .collect::<Result<_, _>>()?
    };
    let dataset: Dataset = ingest::read_dataset(&a.dataset)?;
    let labels = dataset
        .target_labels()
        .map_err(|id| Failure::Data(EvaluationError::MissingLabels(id).to_string()))?;

    let start = Instant::now();
    let (_, norm) = component_matrices(&dataset, &cfg, a.measure.workers)?;
    let opts = TuneOptions {
        folds: a.folds,
        k: a.k,
        seed: a.seed,
        grid,
    };
    let outcome = dissimilarity::with_workers(a.measure.workers, || {
        evaluation::tune_weights_observed(&norm, &labels, &opts, None)
    })??;
    let elapsed = start.elapsed().as_secs_f64();

    for w in &outcome.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let report = EvaluationReport {
        task: Task::Classification,
        metric: "accuracy".into(),
        values: outcome.folds.iter().map(|f| f.accuracy).collect(),
        mean: Some(outcome.mean_accuracy),
        config: json!({
            "k": a.k,
            "folds": outcome.fold_count,
            "tune": tune,
            "grid_size": opts.grid.len(),
            "seed": a.seed,
            "depth": cfg.depth,
            "weights": cfg.weights,
        }),
        selected_weights: if tune {
            outcome.folds.iter().map(|f| f.weights).collect()
        } else {
            vec![]
        },
        best_weights: tune.then_some(outcome.best_weights),
        wall_clock_seconds: elapsed,
        warnings: outcome.warnings,
    };
    let mut text = report.to_json();
    text.push('\n');
    emit(a.report.as_deref(), &text, out)
}

/// Text dump of a tree: one block per level with sorted `vertex`, `edge`
/// and `attr` lines, each ending in a multiplicity.
pub fn format_tree(graph: &Hypergraph, tree: &NeighbourhoodTree) -> String {
    let mut s = String::new();
    let root = graph.vertex(tree.root());
    let _ = writeln!(s, "tree {} depth {}", root.id, tree.depth());
    for l in 1..=tree.depth() {
        let _ = writeln!(s, "level {l}");
        let mut vertices: Vec<(&str, u32)> = tree
            .level_vertices(l)
            .expect("level in range")
            .entries()
            .iter()
            .map(|&(v, c)| (graph.vertex(v).id.as_str(), c))
            .collect();
        vertices.sort();
        for (id, c) in vertices {
            let _ = writeln!(s, "vertex {id} {c}");
        }
        let mut edges: Vec<(&str, u32, u32)> = tree
            .level_edge_labels(l)
            .expect("level in range")
            .entries()
            .iter()
            .map(|&(e, c)| {
                (
                    graph.edge_type(e.edge_type).name.as_str(),
                    e.parent_position,
                    c,
                )
            })
            .collect();
        edges.sort();
        for (ty, pos, c) in edges {
            let _ = writeln!(s, "edge {ty},{pos} {c}");
        }
        let mut attrs = Vec::new();
        for (t, vt) in graph.vertex_types().iter().enumerate() {
            for (ai, schema) in vt.attributes.iter().enumerate() {
                let ty = crate::hypergraph::VertexTypeIx(t as u32);
                let bag = tree
                    .level_attribute_values(l, ty, ai)
                    .expect("declared attribute");
                let key = format!("{}.{}", vt.name, schema.name);
                match bag {
                    AttributeBag::Discrete(m) => {
                        let mut vals: Vec<(&str, u32)> = m
                            .entries()
                            .iter()
                            .map(|&(sym, c)| (graph.symbol(sym), c))
                            .collect();
                        vals.sort();
                        for (v, c) in vals {
                            attrs.push(format!("attr {key} {v} {c}"));
                        }
                    }
                    AttributeBag::Continuous(b) => {
                        let vals = b.values();
                        let mut i = 0;
                        while i < vals.len() {
                            let run = vals[i..].iter().take_while(|&&x| x == vals[i]).count();
                            attrs.push(format!("attr {key} {} {run}", vals[i]));
                            i += run;
                        }
                    }
                }
            }
        }
        for a in attrs {
            s.push_str(&a);
            s.push('\n');
        }
    }
    s
}

fn inspect_tree(a: &InspectArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if a.depth < 1 {
        return Err(TreeError::InvalidDepth(a.depth).into());
    }
    let dataset = ingest::read_dataset(&a.dataset)?;
    let graph = dataset.hypergraph();
    let tree = NeighbourhoodTree::build_by_id(graph, &a.vertex, a.depth)?;
    emit(None, &format_tree(graph, &tree), out)
}
