//! Command-line surface: descriptor extraction, index construction,
//! queries, benchmarking, and synthetic data generation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or format error,
//! 3 internal invariant violation (cross-mode result mismatch).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use nohis::bench::{run_bench, to_json, to_tsv, BenchError, BenchInput, BenchMode};
use nohis::format::{
    read_index_from_path, read_vectors_from_path, write_index_to_path, write_vectors_to_path,
    VectorFile,
};
use nohis::imageio::load_image;
use nohis::synth::{gaussian_mixture, MixtureSpec};
use nohis_core::descriptors::{image_descriptors, ExtractParams};
use nohis_core::retrieval::{rank_images, ScoreScheme};
use nohis_core::search::{knn_search, range_search, SearchStats};
use nohis_core::{NohisTree, VectorSet};

const STATS_SCHEMA: &str = "nohis-search-stats/1";

#[derive(Parser)]
#[command(name = "nohis", version, about = "Non-overlapping hierarchical vector index")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum BaselineKind {
    Pddp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SchemeArg {
    InverseDistance,
    Count,
}

#[derive(Subcommand)]
enum Command {
    /// Extract descriptors from a directory of PGM/PNG images.
    Extract {
        #[arg(long, value_name = "DIR")]
        images: PathBuf,
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
        /// Keep at most this many points per image.
        #[arg(long)]
        max_points: Option<usize>,
        /// Harris trace weight.
        #[arg(long)]
        kappa: Option<f64>,
        /// Detection sigma ladder, comma separated.
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<f64>>,
        /// Worker threads for per-image extraction.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Build an index from a descriptor file.
    Build {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
        /// Target leaf count; defaults to count/500.
        #[arg(long)]
        cmax: Option<usize>,
        /// Leaves smaller than twice this are not split.
        #[arg(long, default_value_t = 32)]
        min_leaf: usize,
        /// Build the overlapping axis-aligned baseline instead.
        #[arg(long, value_enum)]
        baseline: Option<BaselineKind>,
    },
    /// Query an index with descriptor vectors or a whole image.
    Query {
        #[arg(long, value_name = "FILE")]
        index: PathBuf,
        /// Descriptor file of query vectors (image ids ignored).
        #[arg(long, value_name = "FILE")]
        vector: Option<PathBuf>,
        /// Query image; runs the full extraction + voting pipeline.
        #[arg(long, value_name = "FILE")]
        image: Option<PathBuf>,
        #[arg(short, long, default_value_t = 20)]
        k: usize,
        /// Range search with this radius instead of k-NN (vector mode).
        #[arg(long)]
        range: Option<f64>,
        /// Emit a JSON stats line per query.
        #[arg(long)]
        stats: bool,
        /// Number of ranked images to print (image mode).
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Vote weighting for image queries.
        #[arg(long, value_enum, default_value_t = SchemeArg::InverseDistance)]
        scheme: SchemeArg,
    },
    /// Compare query modes on a shared workload (TSV + JSON report).
    Bench {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        queries: PathBuf,
        #[arg(short, long, default_value_t = 20)]
        k: usize,
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = [BenchMode::Nohis, BenchMode::Pddp, BenchMode::Scan])]
        modes: Vec<BenchMode>,
        /// Timing repeats; the median per-query mean is reported.
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        #[arg(long)]
        cmax: Option<usize>,
        #[arg(long, default_value_t = 32)]
        min_leaf: usize,
    },
    /// Generate a seeded Gaussian-mixture descriptor file.
    Gen {
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        clusters: usize,
        /// Within-cluster standard deviation.
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Seed for the component means; defaults to --seed so separate
        /// data/query files can share a mixture.
        #[arg(long)]
        means_seed: Option<u64>,
    },
}

enum AppError {
    Usage(String),
    Data(String),
    Invariant(String),
}

impl AppError {
    fn exit(self) -> ExitCode {
        let (code, label, msg) = match self {
            AppError::Usage(m) => (1, "usage", m),
            AppError::Data(m) => (2, "error", m),
            AppError::Invariant(m) => (3, "invariant violation", m),
        };
        eprintln!("nohis: {label}: {msg}");
        ExitCode::from(code)
    }
}

impl From<nohis::format::FormatError> for AppError {
    fn from(e: nohis::format::FormatError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<nohis::imageio::ImageIoError> for AppError {
    fn from(e: nohis::imageio::ImageIoError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<nohis_core::Error> for AppError {
    fn from(e: nohis_core::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<BenchError> for AppError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::ResultMismatch { .. } => AppError::Invariant(e.to_string()),
            BenchError::Search(inner) => AppError::Data(inner.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.exit(),
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Extract { images, output, max_points, kappa, scales, jobs } => {
            cmd_extract(&images, &output, max_points, kappa, scales, jobs)
        }
        Command::Build { input, output, cmax, min_leaf, baseline } => {
            cmd_build(&input, &output, cmax, min_leaf, baseline)
        }
        Command::Query { index, vector, image, k, range, stats, top, scheme } => {
            cmd_query(&index, vector, image, k, range, stats, top, scheme)
        }
        Command::Bench { input, queries, k, modes, repeat, cmax, min_leaf } => {
            cmd_bench(&input, &queries, k, &modes, repeat, cmax, min_leaf)
        }
        Command::Gen { output, count, dim, clusters, spread, seed, means_seed } => {
            cmd_gen(&output, count, dim, clusters, spread, seed, means_seed)
        }
    }
}

fn default_cmax(count: usize) -> usize {
    (count / 500).max(1)
}

fn cmd_extract(
    images: &Path,
    output: &Path,
    max_points: Option<usize>,
    kappa: Option<f64>,
    scales: Option<Vec<f64>>,
    jobs: usize,
) -> Result<(), AppError> {
    let mut params = ExtractParams::default();
    if let Some(n) = max_points {
        params.max_points = n;
    }
    if let Some(k) = kappa {
        params.kappa = k;
    }
    if let Some(s) = scales {
        if s.is_empty() || s.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(AppError::Usage("--scales must be positive".into()));
        }
        params.scales = s;
    }
    if jobs == 0 {
        return Err(AppError::Usage("--jobs must be at least 1".into()));
    }

    let mut paths: Vec<PathBuf> = std::fs::read_dir(images)
        .map_err(|e| AppError::Data(format!("cannot read {}: {e}", images.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "png"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        eprintln!("nohis: warning: no PGM/PNG images in {}", images.display());
    }

    // Per-image work is independent; merging in path order keeps the output
    // byte-identical regardless of --jobs.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| AppError::Data(e.to_string()))?;
    let per_image: Vec<Result<Vec<Vec<f64>>, String>> = pool.install(|| {
        paths
            .par_iter()
            .map(|path| {
                load_image(path)
                    .map_err(|e| e.to_string())
                    .and_then(|img| image_descriptors(&img, &params).map_err(|e| e.to_string()))
            })
            .collect()
    });

    let mut file = VectorFile {
        vectors: VectorSet::new(nohis_core::descriptors::DESCRIPTOR_DIM),
        image_ids: Vec::new(),
        global_indices: Vec::new(),
    };
    let mut global_index = 0u64;
    for (i, (path, result)) in paths.iter().zip(&per_image).enumerate() {
        match result {
            Ok(vectors) => {
                println!("{}\t{}\t{}", i, vectors.len(), path.display());
                for v in vectors {
                    file.vectors.push(v);
                    file.image_ids.push(i as u32);
                    file.global_indices.push(global_index);
                    global_index += 1;
                }
            }
            Err(msg) => eprintln!("nohis: warning: {}: {msg}", path.display()),
        }
    }
    write_vectors_to_path(output, &file)?;
    println!("wrote {} descriptors from {} images", file.len(), paths.len());
    Ok(())
}

fn cmd_build(
    input: &Path,
    output: &Path,
    cmax: Option<usize>,
    min_leaf: usize,
    baseline: Option<BaselineKind>,
) -> Result<(), AppError> {
    let file = read_vectors_from_path(input)?;
    if file.is_empty() {
        return Err(AppError::Data("descriptor file is empty".into()));
    }
    let c_max = cmax.unwrap_or_else(|| default_cmax(file.len()));
    let start = Instant::now();
    let tree = match baseline {
        None => NohisTree::build_nohis(&file.vectors, &file.image_ids, c_max, min_leaf)?,
        Some(BaselineKind::Pddp) => {
            NohisTree::build_pddp_baseline(&file.vectors, &file.image_ids, c_max, min_leaf)?
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    if tree.leaf_count() == 1 && c_max > 1 {
        eprintln!("nohis: warning: dataset is degenerate; index is a single leaf");
    }
    write_index_to_path(output, &tree)?;
    println!(
        "leaves={} depth={} descriptors={} dim={} build_seconds={:.3}",
        tree.leaf_count(),
        tree.depth(),
        tree.descriptor_count(),
        tree.dim(),
        elapsed
    );
    Ok(())
}

fn stats_json(prefix: &str, index: usize, stats: &SearchStats) -> String {
    format!(
        "{{\"schema\":\"{STATS_SCHEMA}\",\"{prefix}\":{index},\"leaves_visited\":{},\
         \"internal_nodes_visited\":{},\"distance_computations\":{},\"prunes\":{}}}",
        stats.leaves_visited, stats.internal_nodes_visited, stats.distance_computations,
        stats.prunes
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    index: &Path,
    vector: Option<PathBuf>,
    image: Option<PathBuf>,
    k: usize,
    range: Option<f64>,
    stats: bool,
    top: usize,
    scheme: SchemeArg,
) -> Result<(), AppError> {
    let tree = read_index_from_path(index)?;
    match (vector, image) {
        (Some(path), None) => {
            let queries = read_vectors_from_path(&path)?;
            nohis::format::check_dimension(tree.dim(), queries.dim())?;
            for (qi, q) in queries.vectors.rows().enumerate() {
                println!("# query {qi}");
                let st = match range {
                    Some(radius) => {
                        if radius < 0.0 {
                            return Err(AppError::Usage("--range must be nonnegative".into()));
                        }
                        let (hits, st) = range_search(&tree, q, radius)?;
                        for (rank, h) in hits.iter().enumerate() {
                            println!(
                                "{}\t{}\t{:.6}\t{}",
                                rank + 1,
                                h.index,
                                h.dist2.sqrt(),
                                h.cluster
                            );
                        }
                        st
                    }
                    None => {
                        let (list, st) = knn_search(&tree, q, k)?;
                        for (rank, h) in list.entries().iter().enumerate() {
                            println!(
                                "{}\t{}\t{:.6}\t{}",
                                rank + 1,
                                h.index,
                                h.dist2.sqrt(),
                                h.cluster
                            );
                        }
                        st
                    }
                };
                if stats {
                    println!("{}", stats_json("query", qi, &st));
                }
            }
            Ok(())
        }
        (None, Some(path)) => {
            if range.is_some() {
                return Err(AppError::Usage("--range applies to vector queries only".into()));
            }
            let img = load_image(&path)?;
            let params = ExtractParams::default();
            let vectors = image_descriptors(&img, &params)?;
            if vectors.is_empty() {
                return Err(AppError::Data(nohis_core::Error::FeaturelessQuery.to_string()));
            }
            let mut lists = Vec::with_capacity(vectors.len());
            let mut total = SearchStats::default();
            for v in &vectors {
                let (list, st) = knn_search(&tree, v, k)?;
                total.leaves_visited += st.leaves_visited;
                total.internal_nodes_visited += st.internal_nodes_visited;
                total.distance_computations += st.distance_computations;
                total.prunes += st.prunes;
                lists.push(list.into_vec());
            }
            let scheme = match scheme {
                SchemeArg::InverseDistance => ScoreScheme::InverseDistance,
                SchemeArg::Count => ScoreScheme::Count,
            };
            let ranking = rank_images(lists.iter().map(Vec::as_slice), scheme, top);
            for (rank, e) in ranking.entries.iter().enumerate() {
                println!(
                    "{}\t{}\t{:.6}\t{}",
                    rank + 1,
                    e.image_id,
                    e.score,
                    e.supporting_matches
                );
            }
            if stats {
                println!("{}", stats_json("descriptors", vectors.len(), &total));
            }
            Ok(())
        }
        _ => Err(AppError::Usage("provide exactly one of --vector or --image".into())),
    }
}

fn cmd_bench(
    input: &Path,
    queries: &Path,
    k: usize,
    modes: &[BenchMode],
    repeat: usize,
    cmax: Option<usize>,
    min_leaf: usize,
) -> Result<(), AppError> {
    if modes.is_empty() {
        return Err(AppError::Usage("--modes must name at least one mode".into()));
    }
    let data = read_vectors_from_path(input)?;
    if data.is_empty() {
        return Err(AppError::Data("descriptor file is empty".into()));
    }
    let query_file = read_vectors_from_path(queries)?;
    if query_file.is_empty() {
        return Err(AppError::Data("query file is empty".into()));
    }
    nohis::format::check_dimension(data.dim(), query_file.dim())?;
    let c_max = cmax.unwrap_or_else(|| default_cmax(data.len()));
    let nohis_tree = if modes.contains(&BenchMode::Nohis) {
        let t = Instant::now();
        let tree = NohisTree::build_nohis(&data.vectors, &data.image_ids, c_max, min_leaf)?;
        eprintln!(
            "built nohis index: {} leaves in {:.2}s",
            tree.leaf_count(),
            t.elapsed().as_secs_f64()
        );
        Some(tree)
    } else {
        None
    };
    let pddp_tree = if modes.contains(&BenchMode::Pddp) {
        let t = Instant::now();
        let tree = NohisTree::build_pddp_baseline(&data.vectors, &data.image_ids, c_max, min_leaf)?;
        eprintln!(
            "built pddp baseline: {} leaves in {:.2}s",
            tree.leaf_count(),
            t.elapsed().as_secs_f64()
        );
        Some(tree)
    } else {
        None
    };
    let reports = run_bench(
        &BenchInput {
            data: &data.vectors,
            queries: &query_file.vectors,
            k,
            repeat,
            nohis: nohis_tree.as_ref(),
            pddp: pddp_tree.as_ref(),
        },
        modes,
    )?;
    print!("{}", to_tsv(&reports));
    println!("{}", to_json(&reports));
    Ok(())
}

fn cmd_gen(
    output: &Path,
    count: usize,
    dim: usize,
    clusters: usize,
    spread: f64,
    seed: u64,
    means_seed: Option<u64>,
) -> Result<(), AppError> {
    if count == 0 || dim < 2 || clusters == 0 {
        return Err(AppError::Usage(
            "--count and --clusters must be positive, --dim at least 2".into(),
        ));
    }
    if !spread.is_finite() || spread <= 0.0 {
        return Err(AppError::Usage("--spread must be positive".into()));
    }
    let spec = MixtureSpec::new(count, dim, clusters).with_spread(spread);
    let (vectors, labels) = gaussian_mixture(&spec, means_seed.unwrap_or(seed), seed);
    let file = VectorFile {
        global_indices: (0..vectors.len() as u64).collect(),
        image_ids: labels,
        vectors,
    };
    write_vectors_to_path(output, &file)?;
    println!("wrote {count} vectors (dim {dim}, {clusters} components) to {}", output.display());
    Ok(())
}
