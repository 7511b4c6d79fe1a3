//! The `semmap` command line: ingest, distance, scaling, clustering,
//! interpretation and plotting, composed through files.
//!
//! Exit status is 0 on success, 1 for invalid input or usage and 2 when the
//! numerics fail on valid input.

pub mod plot;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use semmap::cluster::{self, Dendrogram, Linkage};
use semmap::corpus::{self, CompareMode};
use semmap::dissim::{self, FeatureWeights, MissingPolicy};
use semmap::interpret;
use semmap::mds::{self, ElbowScan, MdsSolution, Method, SmacofStart};
use semmap::ParseError;
use thiserror::Error;

use crate::plot::PlotError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{context}: {source}")]
    Lib { context: String, source: semmap::Error },
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib { source, .. } if source.is_numeric() => 2,
            _ => 1,
        }
    }
}

fn lib<E: Into<semmap::Error>>(context: impl Into<String>) -> impl FnOnce(E) -> CliError {
    let context = context.into();
    move |e| CliError::Lib { context, source: e.into() }
}

#[derive(Debug, Parser)]
#[command(name = "semmap", version, about = "Semantic maps from cross-linguistic data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic data
    #[command(subcommand)]
    Synth(Synth),
    /// Build a dissimilarity matrix
    #[command(subcommand)]
    Dist(Dist),
    /// Scale a dissimilarity matrix
    #[command(subcommand)]
    Mds(Mds),
    /// Stress by dimensionality and the elbow
    Elbow(ElbowArgs),
    /// Cluster a dissimilarity matrix
    #[command(subcommand)]
    Cluster(Cluster),
    /// Read a solution against annotations or category labels
    #[command(subcommand)]
    Interpret(Interpret),
    /// Render SVG figures
    #[command(subcommand)]
    Plot(Plot),
}

#[derive(Debug, Args)]
struct Output {
    /// Output file
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Synth {
    /// Points on a rolled-up sheet with their intrinsic parameters
    SwissRoll {
        #[arg(long, default_value_t = 800)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Lexeme,
    Feature,
}

impl From<ModeArg> for CompareMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lexeme => CompareMode::Lexeme,
            ModeArg::Feature => CompareMode::Feature,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MissingArg {
    Delete,
    Differ,
}

#[derive(Debug, Subcommand)]
enum Dist {
    /// Hamming distances between contexts of a translation table
    Hamming {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Lexeme)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = MissingArg::Delete)]
        missing: MissingArg,
        /// Per-language weights: `language<TAB>weight`
        #[arg(long)]
        weights: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Co-expression distances between functions of a binary table
    Coexpr {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Co-classification distances between languages
    Language {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Lexeme)]
        mode: ModeArg,
        #[command(flatten)]
        out: Output,
    },
    /// Shortest-path distances over a k-nearest-neighbour graph
    Geodesic {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Random,
    Classic,
}

#[derive(Debug, Args)]
struct SmacofKnobs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Classic)]
    init: InitArg,
    #[arg(long, default_value_t = mds::SMACOF_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value_t = mds::SMACOF_EPS)]
    eps: f64,
}

impl SmacofKnobs {
    fn method(&self) -> Method {
        let init = match self.init {
            InitArg::Random => SmacofStart::Random(self.seed),
            InitArg::Classic => SmacofStart::Classic,
        };
        Method::Smacof { init, max_iter: self.max_iter, eps: self.eps }
    }
}

#[derive(Debug, Subcommand)]
enum Mds {
    /// Classic (Torgerson) scaling
    Classic {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Stress majorization
    Smacof {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        #[command(flatten)]
        knobs: SmacofKnobs,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Classic,
    Smacof,
}

#[derive(Debug, Args)]
struct ElbowArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 6)]
    max_dims: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Classic)]
    engine: EngineArg,
    #[command(flatten)]
    knobs: SmacofKnobs,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LinkageArg {
    Single,
    Complete,
    Average,
}

#[derive(Debug, Subcommand)]
enum Cluster {
    /// k-medoids (PAM)
    Pam {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Accepted for compatibility; PAM is deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Agglomerative clustering; writes the dendrogram as JSON
    Hier {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
        linkage: LinkageArg,
        /// Also cut the tree into this many clusters
        #[arg(long, requires = "cut_out")]
        cut_k: Option<usize>,
        /// Where to write the cut
        #[arg(long, requires = "cut_k")]
        cut_out: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Subcommand)]
enum Interpret {
    /// Regress each dimension on each 0/1 annotation
    Regress {
        solution: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Subset relations between languages for one category
    Subset {
        corpus: PathBuf,
        #[arg(long)]
        category: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Feature)]
        mode: ModeArg,
        #[command(flatten)]
        out: Output,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected I,J")?;
    let parse = |x: &str| match x.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(format!("invalid dimension '{x}' (1-based)")),
    };
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Subcommand)]
enum Plot {
    /// Scatter plot of a solution, optionally colored by one language
    Map {
        solution: PathBuf,
        /// Translation table supplying the colors
        #[arg(long, requires = "color_by")]
        corpus: Option<PathBuf>,
        #[arg(long, requires = "corpus")]
        color_by: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Lexeme)]
        mode: ModeArg,
        /// Dimensions to plot, 1-based
        #[arg(long, value_parser = parse_dims, default_value = "1,2")]
        dims: (usize, usize),
        #[arg(long, default_value_t = plot::DEFAULT_WIDTH)]
        width: u32,
        #[arg(long, default_value_t = plot::DEFAULT_HEIGHT)]
        height: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Dendrogram from `cluster hier` output
    Dendrogram {
        input: PathBuf,
        #[arg(long, default_value_t = plot::DEFAULT_WIDTH)]
        width: u32,
        #[arg(long, default_value_t = plot::DEFAULT_HEIGHT)]
        height: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Stress curve from `elbow` output
    Elbow {
        input: PathBuf,
        #[arg(long, default_value_t = plot::DEFAULT_WIDTH)]
        width: u32,
        #[arg(long, default_value_t = plot::DEFAULT_HEIGHT)]
        height: u32,
        #[command(flatten)]
        out: Output,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, ParseError>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn linkage(l: LinkageArg) -> Linkage {
    match l {
        LinkageArg::Single => Linkage::Single,
        LinkageArg::Complete => Linkage::Complete,
        LinkageArg::Average => Linkage::Average,
    }
}

/// Runs one command and returns the summary line.
fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Synth(Synth::SwissRoll { n, noise, seed, out }) => {
            let cloud = corpus::swiss_roll(n, noise, seed).map_err(lib("swiss roll"))?;
            write_atomic(&out.output, &cloud.to_tsv())?;
            Ok(format!("points={}", cloud.len()))
        }
        Command::Dist(dist) => {
            let (delta, out) = match dist {
                Dist::Hamming { input, mode, missing, weights, out } => {
                    let table = load(&input, corpus::parse_corpus)?;
                    let weights = match weights {
                        Some(path) => {
                            let named = load(&path, dissim::parse_weights)?;
                            Some(FeatureWeights::for_languages(&named, table.languages()).map_err(lib(path.display().to_string()))?)
                        }
                        None => None,
                    };
                    let missing = match missing {
                        MissingArg::Delete => MissingPolicy::PairwiseDelete,
                        MissingArg::Differ => MissingPolicy::CountAsDiffer,
                    };
                    (dissim::context_distances(&table, mode.into(), weights.as_ref(), missing).map_err(lib(input.display().to_string()))?, out)
                }
                Dist::Coexpr { input, out } => {
                    let table = load(&input, corpus::parse_binary_table)?;
                    (dissim::coexpression_distances(&table).map_err(lib(input.display().to_string()))?, out)
                }
                Dist::Language { input, mode, out } => {
                    let table = load(&input, corpus::parse_corpus)?;
                    (dissim::language_distances(&table, mode.into()).map_err(lib(input.display().to_string()))?, out)
                }
                Dist::Geodesic { input, k, out } => {
                    let cloud = load(&input, corpus::parse_point_cloud)?;
                    (dissim::geodesic_distances(&cloud, k).map_err(lib(input.display().to_string()))?, out)
                }
            };
            write_atomic(&out.output, &delta.to_tsv())?;
            Ok(format!("items={}", delta.len()))
        }
        Command::Mds(m) => {
            let (input, dims, method, out) = match m {
                Mds::Classic { input, dims, out } => (input, dims, Method::Classic, out),
                Mds::Smacof { input, dims, knobs, out } => (input, dims, knobs.method(), out),
            };
            let delta = load(&input, dissim::parse_dissimilarity)?;
            let sol = method.solve(&delta, dims).map_err(lib(input.display().to_string()))?;
            write_atomic(&out.output, &sol.to_json())?;
            Ok(format!("stress={:.6} iterations={} converged={}", sol.stress, sol.iterations, sol.converged))
        }
        Command::Elbow(args) => {
            let delta = load(&args.input, dissim::parse_dissimilarity)?;
            let method = match args.engine {
                EngineArg::Classic => Method::Classic,
                EngineArg::Smacof => args.knobs.method(),
            };
            let scan = mds::elbow_scan(&delta, args.max_dims, &method).map_err(lib(args.input.display().to_string()))?;
            write_atomic(&args.out.output, &scan.to_tsv())?;
            Ok(format!("elbow={}", scan.elbow))
        }
        Command::Cluster(Cluster::Pam { input, k, seed: _, out }) => {
            let delta = load(&input, dissim::parse_dissimilarity)?;
            let result = cluster::pam(&delta, k).map_err(lib(input.display().to_string()))?;
            write_atomic(&out.output, &result.to_tsv(delta.labels()))?;
            let cost = result.cost.unwrap_or(0.0);
            Ok(match cluster::silhouette(&delta, &result.assignment) {
                Ok(s) => format!("k={k} cost={cost:.6} silhouette={:.6}", s.mean),
                Err(_) => format!("k={k} cost={cost:.6}"),
            })
        }
        Command::Cluster(Cluster::Hier { input, linkage: l, cut_k, cut_out, out }) => {
            let delta = load(&input, dissim::parse_dissimilarity)?;
            let dg = cluster::agglomerative(&delta, linkage(l)).map_err(lib(input.display().to_string()))?;
            write_atomic(&out.output, &dg.to_json())?;
            let mut summary = format!("merges={}", dg.merges.len());
            if let (Some(k), Some(path)) = (cut_k, cut_out) {
                let cut = cluster::cut(&dg, k).map_err(lib("cut"))?;
                write_atomic(&path, &cut.to_tsv(delta.labels()))?;
                summary.push_str(&format!(" clusters={k}"));
            }
            Ok(summary)
        }
        Command::Interpret(Interpret::Regress { solution, annotations, out }) => {
            let sol = load(&solution, MdsSolution::from_json)?;
            let ann = load(&annotations, interpret::parse_annotations)?;
            let report = interpret::dimension_regression(&sol, &ann).map_err(lib(annotations.display().to_string()))?;
            write_atomic(&out.output, &report.to_tsv())?;
            let top = &report.rows[0];
            Ok(format!("top=dim{}:{} r2={:.6}", top.dimension, top.variable, top.r_squared))
        }
        Command::Interpret(Interpret::Subset { corpus: path, category, mode, out }) => {
            let table = load(&path, corpus::parse_corpus)?;
            let report = interpret::subset_report(&table, &category, mode.into()).map_err(lib(path.display().to_string()))?;
            write_atomic(&out.output, &report.to_tsv())?;
            let chain: Vec<&str> = report.chain.iter().map(|l| l.language.as_str()).collect();
            Ok(format!("chain={} violations={}", chain.join("<"), report.total_violations()))
        }
        Command::Plot(Plot::Map { solution, corpus: table_path, color_by, mode, dims, width, height, out }) => {
            let sol = load(&solution, MdsSolution::from_json)?;
            let layer = match (table_path, color_by) {
                (Some(path), Some(language)) => {
                    let table = load(&path, corpus::parse_corpus)?;
                    let layers = interpret::color_layers(&sol, &table, mode.into()).map_err(lib(path.display().to_string()))?;
                    let layer = layers
                        .into_iter()
                        .find(|l| l.language == language)
                        .ok_or_else(|| CliError::Usage(format!("{}: no language '{language}'", path.display())))?;
                    Some(layer)
                }
                _ => None,
            };
            let svg = plot::plot_map(&sol, layer.as_ref(), dims, width, height)?;
            write_atomic(&out.output, &svg)?;
            Ok(format!("points={}", sol.n_points()))
        }
        Command::Plot(Plot::Dendrogram { input, width, height, out }) => {
            let dg = load(&input, Dendrogram::from_json)?;
            write_atomic(&out.output, &plot::plot_dendrogram(&dg, width, height)?)?;
            Ok(format!("leaves={}", dg.leaves()))
        }
        Command::Plot(Plot::Elbow { input, width, height, out }) => {
            let scan: ElbowScan = load(&input, mds::parse_elbow_table)?;
            write_atomic(&out.output, &plot::plot_elbow(&scan, width, height)?)?;
            Ok(format!("elbow={}", scan.elbow))
        }
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
