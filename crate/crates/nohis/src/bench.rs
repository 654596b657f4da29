//! Benchmark harness comparing the reflected index, the overlapping
//! baseline, and the sequential scan on the same query workload.
//!
//! All three are exact searches, so the harness first verifies that every
//! query returns the same result set under every mode and refuses to report
//! timings otherwise — a mismatch is a correctness bug, not noise.

use std::fmt;
use std::time::Instant;

use nohis_core::linalg::squared_distance;
use nohis_core::search::{brute_force_knn, knn_search, Neighbor};
use nohis_core::{NohisTree, VectorSet};
use serde::Serialize;

pub const BENCH_SCHEMA: &str = "nohis-bench/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BenchMode {
    Nohis,
    Pddp,
    Scan,
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchMode::Nohis => write!(f, "nohis"),
            BenchMode::Pddp => write!(f, "pddp"),
            BenchMode::Scan => write!(f, "scan"),
        }
    }
}

/// One row of the report.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub mode: String,
    pub dataset_size: usize,
    /// Leaf count of the index; absent for the scan.
    pub cluster_count: Option<usize>,
    /// Median over repeats of the per-query mean, seconds.
    pub mean_query_time: f64,
    /// Mean leaves visited per query; absent for the scan.
    pub mean_leaves_visited: Option<f64>,
    pub k: usize,
    pub query_count: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("query {query}: results differ between {baseline} and {mode}: {detail}")]
    ResultMismatch { query: usize, baseline: String, mode: String, detail: String },
    #[error(transparent)]
    Search(#[from] nohis_core::Error),
}

/// Tie-tolerant equivalence of two exact result sets for the same query.
///
/// Pairwise distances must agree to `1e-9` relative; indices may differ only
/// where the recomputed true distance ties the boundary (k-th) distance.
pub fn results_equivalent(
    data: &VectorSet,
    query: &[f64],
    got: &[Neighbor],
    want: &[Neighbor],
) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("lengths {} vs {}", got.len(), want.len()));
    }
    let tol = |d: f64| 1e-9 * d.max(1.0);
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if (g.dist2 - w.dist2).abs() > tol(w.dist2) {
            return Err(format!("rank {i}: distance {} vs {}", g.dist2, w.dist2));
        }
    }
    let gi: std::collections::BTreeSet<u64> = got.iter().map(|e| e.index).collect();
    let wi: std::collections::BTreeSet<u64> = want.iter().map(|e| e.index).collect();
    if gi != wi {
        let Some(kth) = want.last().map(|e| e.dist2) else {
            return Ok(());
        };
        for idx in gi.symmetric_difference(&wi) {
            let d2 = squared_distance(query, data.row(*idx as usize));
            if (d2 - kth).abs() > tol(kth) {
                return Err(format!(
                    "index {idx} differs and its distance {d2} does not tie the boundary {kth}"
                ));
            }
        }
    }
    Ok(())
}

pub struct BenchInput<'a> {
    pub data: &'a VectorSet,
    pub queries: &'a VectorSet,
    pub k: usize,
    pub repeat: usize,
    /// Prebuilt indexes for the tree modes, keyed by mode order.
    pub nohis: Option<&'a NohisTree>,
    pub pddp: Option<&'a NohisTree>,
}

fn run_mode_once(
    input: &BenchInput<'_>,
    mode: BenchMode,
    q: &[f64],
) -> Result<(Vec<Neighbor>, usize), BenchError> {
    match mode {
        BenchMode::Scan => Ok((brute_force_knn(input.data, q, input.k)?.into_vec(), 0)),
        BenchMode::Nohis => {
            let tree = input.nohis.expect("nohis mode requires a prebuilt index");
            let (list, stats) = knn_search(tree, q, input.k)?;
            Ok((list.into_vec(), stats.leaves_visited))
        }
        BenchMode::Pddp => {
            let tree = input.pddp.expect("pddp mode requires a prebuilt index");
            let (list, stats) = knn_search(tree, q, input.k)?;
            Ok((list.into_vec(), stats.leaves_visited))
        }
    }
}

/// Runs the workload under every requested mode. The first mode acts as the
/// reference for the cross-mode result check.
pub fn run_bench(
    input: &BenchInput<'_>,
    modes: &[BenchMode],
) -> Result<Vec<BenchReport>, BenchError> {
    assert!(!modes.is_empty());
    let query_count = input.queries.len();

    // Correctness pass (also warms caches): collect results and leaf visits.
    let mut reference: Vec<Vec<Neighbor>> = Vec::with_capacity(query_count);
    let mut leaves: Vec<f64> = vec![0.0; modes.len()];
    for (qi, q) in input.queries.rows().enumerate() {
        for (mi, &mode) in modes.iter().enumerate() {
            let (result, visited) = run_mode_once(input, mode, q)?;
            leaves[mi] += visited as f64;
            if mi == 0 {
                reference.push(result);
            } else if let Err(detail) = results_equivalent(input.data, q, &result, &reference[qi])
            {
                return Err(BenchError::ResultMismatch {
                    query: qi,
                    baseline: modes[0].to_string(),
                    mode: mode.to_string(),
                    detail,
                });
            }
        }
    }

    // Timing pass: median over repeats of the per-query mean.
    let mut reports = Vec::with_capacity(modes.len());
    for (mi, &mode) in modes.iter().enumerate() {
        let mut means = Vec::with_capacity(input.repeat);
        for _ in 0..input.repeat.max(1) {
            let start = Instant::now();
            for q in input.queries.rows() {
                let out = run_mode_once(input, mode, q)?;
                std::hint::black_box(&out);
            }
            means.push(start.elapsed().as_secs_f64() / query_count.max(1) as f64);
        }
        means.sort_by(f64::total_cmp);
        let median = means[means.len() / 2];
        let cluster_count = match mode {
            BenchMode::Scan => None,
            BenchMode::Nohis => input.nohis.map(|t| t.leaf_count()),
            BenchMode::Pddp => input.pddp.map(|t| t.leaf_count()),
        };
        reports.push(BenchReport {
            mode: mode.to_string(),
            dataset_size: input.data.len(),
            cluster_count,
            mean_query_time: median,
            mean_leaves_visited: match mode {
                BenchMode::Scan => None,
                _ => Some(leaves[mi] / query_count.max(1) as f64),
            },
            k: input.k,
            query_count,
        });
    }
    Ok(reports)
}

/// Renders the reports as a TSV table with a header row; absent values
/// print as `-`.
pub fn to_tsv(reports: &[BenchReport]) -> String {
    let mut out = String::from(
        "mode\tdataset_size\tcluster_count\tmean_query_time_s\tmean_leaves_visited\tk\tquery_count\n",
    );
    for r in reports {
        let clusters = r.cluster_count.map_or("-".into(), |c| c.to_string());
        let leaves = r.mean_leaves_visited.map_or("-".into(), |l| format!("{l:.2}"));
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.9}\t{}\t{}\t{}\n",
            r.mode, r.dataset_size, clusters, r.mean_query_time, leaves, r.k, r.query_count
        ));
    }
    out
}

/// Renders the reports as a single-line JSON document with a stable schema.
pub fn to_json(reports: &[BenchReport]) -> String {
    serde_json::json!({ "schema": BENCH_SCHEMA, "reports": reports }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gaussian_mixture, MixtureSpec};

    #[test]
    fn three_modes_agree_and_report() {
        let (data, ids) = gaussian_mixture(&MixtureSpec::new(2000, 6, 8), 3, 4);
        let (queries, _) = gaussian_mixture(&MixtureSpec::new(20, 6, 8), 3, 5);
        let nohis = NohisTree::build_nohis(&data, &ids, 16, 1).unwrap();
        let pddp = NohisTree::build_pddp_baseline(&data, &ids, 16, 1).unwrap();
        let input = BenchInput {
            data: &data,
            queries: &queries,
            k: 5,
            repeat: 1,
            nohis: Some(&nohis),
            pddp: Some(&pddp),
        };
        let modes = [BenchMode::Nohis, BenchMode::Pddp, BenchMode::Scan];
        let reports = run_bench(&input, &modes).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.mean_query_time > 0.0));
        assert_eq!(reports[2].mean_leaves_visited, None);
        assert_eq!(reports[2].cluster_count, None);
        assert!(reports[0].mean_leaves_visited.unwrap() >= 1.0);

        let tsv = to_tsv(&reports);
        assert!(tsv.lines().count() == 4);
        assert!(tsv.contains("scan\t2000\t-"));
        let json = to_json(&reports);
        assert!(json.contains("\"schema\":\"nohis-bench/1\""));
    }

    #[test]
    fn mismatch_is_detected() {
        let (data, ids) = gaussian_mixture(&MixtureSpec::new(200, 3, 2), 1, 2);
        let nohis = NohisTree::build_nohis(&data, &ids, 4, 1).unwrap();
        // Sabotage: query against a *different* dataset for the scan mode by
        // handing the harness a shifted copy as `data`.
        let mut shifted = VectorSet::new(3);
        for row in data.rows() {
            shifted.push(&[row[0] + 10.0, row[1], row[2]]);
        }
        let (queries, _) = gaussian_mixture(&MixtureSpec::new(4, 3, 2), 1, 3);
        let input = BenchInput {
            data: &shifted,
            queries: &queries,
            k: 3,
            repeat: 1,
            nohis: Some(&nohis),
            pddp: None,
        };
        let err = run_bench(&input, &[BenchMode::Nohis, BenchMode::Scan]).unwrap_err();
        assert!(matches!(err, BenchError::ResultMismatch { .. }));
    }
}
