//! Label-length sweeps across instance sizes.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Recipe;
use crate::generate::derive_seed;
use crate::schemes::{BudgetConfig, SchemeKind};
use crate::verify::measure;
use crate::HarnessError;

/// Column order of the CSV output.
pub const CSV_HEADER: &str = "scheme,n,seed,max_vlabel,mean_vlabel,max_klabel,max_kappa,slack_bits,ms";

/// Weight profile of swept instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum WeightProfile {
    Unit,
    Random,
}

/// Measurements of one labelled instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub scheme: SchemeKind,
    pub n: usize,
    pub seed: u64,
    pub weights: WeightProfile,
    pub max_vlabel: usize,
    pub mean_vlabel: f64,
    pub max_klabel: usize,
    pub max_kappa: usize,
    /// `max_v |μ(v)| − (log ω(G) − log ω(v))`.
    pub slack_bits: f64,
    pub ms: f64,
}

/// Sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub scheme: SchemeKind,
    /// Target sizes, ascending.
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub weights: WeightProfile,
}

/// Labels `reps` fresh instances per size (in parallel) and measures them.
pub fn bench_sweep(sweep: &Sweep, cfg: &BudgetConfig) -> Result<Vec<BenchRecord>, HarnessError> {
    if sweep.sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(HarnessError::Input("sizes must be ascending".into()));
    }
    let jobs: Vec<(usize, usize)> = sweep
        .sizes
        .iter()
        .flat_map(|&n| (0..sweep.reps).map(move |r| (n, r)))
        .collect();
    jobs.par_iter()
        .map(|&(n, r)| {
            let seed = derive_seed(derive_seed(sweep.seed, n as u64), r as u64);
            let mut w = Recipe::scaled(sweep.scheme, n).build(&format!("{}-{n}-{r}", sweep.scheme), seed)?;
            if sweep.weights == WeightProfile::Unit {
                w.instance.set_unit_weights();
            }
            let start = Instant::now();
            let (_, report, _) = measure(&w, cfg)?;
            Ok(BenchRecord {
                scheme: sweep.scheme,
                n: w.instance.n(),
                seed,
                weights: sweep.weights,
                max_vlabel: report.max_vertex_label,
                mean_vlabel: report.mean_vertex_label,
                max_klabel: report.max_clique_label,
                max_kappa: report.max_kappa,
                slack_bits: report.vertex_slack,
                ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

/// The records as CSV.  With `timing` off the `ms` column is written as 0,
/// which makes the output a pure function of the sweep settings.
pub fn to_csv(records: &[BenchRecord], timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let ms = if timing { r.ms } else { 0.0 };
        writeln!(
            out,
            "{},{},{},{},{:.4},{},{},{:.6},{:.3}",
            r.scheme, r.n, r.seed, r.max_vlabel, r.mean_vlabel, r.max_klabel, r.max_kappa, r.slack_bits, ms
        )
        .expect("writing to a string");
    }
    out
}

/// Worst slack at one target size, relative to `log₂ n` and `(log₂ n)^{3/4}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub n: usize,
    pub max_slack: f64,
    pub max_vlabel: usize,
    pub slack_per_log: f64,
    pub slack_per_log34: f64,
    pub vlabel_per_log: f64,
}

/// Aggregates records by size (records must be grouped by ascending size).
pub fn scaling_summary(records: &[BenchRecord]) -> Vec<ScalePoint> {
    let mut points: Vec<ScalePoint> = Vec::new();
    for r in records {
        let lg = (r.n.max(2) as f64).log2();
        let fresh = ScalePoint {
            n: r.n,
            max_slack: r.slack_bits,
            max_vlabel: r.max_vlabel,
            slack_per_log: r.slack_bits / lg,
            slack_per_log34: r.slack_bits / lg.powf(0.75),
            vlabel_per_log: r.max_vlabel as f64 / lg,
        };
        match points.last_mut() {
            Some(p) if p.n == r.n => {
                if fresh.max_slack > p.max_slack {
                    p.max_slack = fresh.max_slack;
                    p.slack_per_log = fresh.slack_per_log;
                    p.slack_per_log34 = fresh.slack_per_log34;
                }
                if fresh.max_vlabel > p.max_vlabel {
                    p.max_vlabel = fresh.max_vlabel;
                    p.vlabel_per_log = fresh.vlabel_per_log;
                }
            }
            _ => points.push(fresh),
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(sizes: Vec<usize>) -> Sweep {
        Sweep {
            scheme: SchemeKind::Compose,
            sizes,
            reps: 1,
            seed: 5,
            weights: WeightProfile::Unit,
        }
    }

    #[test]
    fn one_size_one_rep_gives_one_row() {
        let records = bench_sweep(&sweep(vec![256]), &BudgetConfig::default()).unwrap();
        assert_eq!(records.len(), 1);
        let csv = to_csv(&records, true);
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    }

    #[test]
    fn same_seed_gives_identical_csv() {
        let cfg = BudgetConfig::default();
        let a = to_csv(&bench_sweep(&sweep(vec![64, 128]), &cfg).unwrap(), false);
        let b = to_csv(&bench_sweep(&sweep(vec![64, 128]), &cfg).unwrap(), false);
        assert_eq!(a, b);
    }

    #[test]
    fn descending_sizes_are_rejected() {
        assert!(bench_sweep(&sweep(vec![128, 64]), &BudgetConfig::default()).is_err());
    }

    #[test]
    fn summary_keeps_the_worst_record_per_size() {
        let rec = |n, slack: f64, v| BenchRecord {
            scheme: SchemeKind::Compose,
            n,
            seed: 0,
            weights: WeightProfile::Unit,
            max_vlabel: v,
            mean_vlabel: 0.0,
            max_klabel: 0,
            max_kappa: 0,
            slack_bits: slack,
            ms: 0.0,
        };
        let s = scaling_summary(&[rec(16, 3.0, 10), rec(16, 5.0, 9), rec(256, 8.0, 20)]);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].max_slack, 5.0);
        assert_eq!(s[0].max_vlabel, 10);
        assert_eq!(s[1].slack_per_log, 1.0);
    }
}
