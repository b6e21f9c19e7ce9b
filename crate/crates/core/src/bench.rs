//! Benchmark grid: vehicles × samples × methods, aggregated over seeds.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `vehicles` | fleet size |
//! | `samples` | samples per task cluster |
//! | `method` | method tag |
//! | `seeds` | runs attempted |
//! | `ok_runs` | runs that produced a solution |
//! | `failed_runs` | runs that returned an error |
//! | `mean_objective` | mean over successful runs, empty if none |
//! | `min_objective` | best successful run, empty if none |
//! | `mean_wall_s` | mean wall time of successful runs, empty if none |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instance::{build_instance, InstanceParams};
use crate::memetic::MaParams;
use crate::refine::RefineParams;
use crate::solve::{solve, Method};
use crate::tsplib::{load_tsplib, BAYS29};
use crate::Error;

pub const CSV_HEADER: [&str; 9] = [
    "vehicles",
    "samples",
    "method",
    "seeds",
    "ok_runs",
    "failed_runs",
    "mean_objective",
    "min_objective",
    "mean_wall_s",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub vehicles: Vec<usize>,
    pub samples: Vec<usize>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    /// Base instance parameters; `vehicles` and `samples_per_cluster` are
    /// overridden per cell.
    pub instance: InstanceParams,
    /// TSPLIB text of the task set; bays29 when absent.
    pub tsplib: Option<String>,
    /// Base MA parameters; `seed` is overridden per run.
    pub ma: MaParams,
    pub refine: RefineParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub seed: u64,
    pub objective: Option<f64>,
    pub wall_seconds: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub vehicles: usize,
    pub samples: usize,
    pub method: Method,
    pub runs: Vec<RunOutcome>,
}

impl CellResult {
    fn ok(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.runs
            .iter()
            .filter_map(|r| Some((r.objective?, r.wall_seconds?)))
    }

    pub fn ok_runs(&self) -> usize {
        self.ok().count()
    }

    pub fn failed_runs(&self) -> usize {
        self.runs.len() - self.ok_runs()
    }

    pub fn mean_objective(&self) -> Option<f64> {
        mean(self.ok().map(|r| r.0))
    }

    pub fn min_objective(&self) -> Option<f64> {
        self.ok().map(|r| r.0).min_by(f64::total_cmp)
    }

    pub fn mean_wall(&self) -> Option<f64> {
        mean(self.ok().map(|r| r.1))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub cells: Vec<CellResult>,
    /// Cells whose mean wall time drops as the fleet grows.
    pub warnings: Vec<String>,
}

fn run_one(
    cfg: &BenchConfig,
    centers: &[crate::Point2],
    vehicles: usize,
    samples: usize,
    method: Method,
    seed: u64,
) -> Result<(f64, f64), Error> {
    if method == Method::MilpExport {
        return Err(Error::Other("MILP-EXPORT is not a benchmark method".into()));
    }
    let params = InstanceParams {
        vehicles,
        samples_per_cluster: samples,
        ..cfg.instance.clone()
    };
    let instance = build_instance(&params, centers, seed)?;
    let ma = MaParams {
        seed,
        ..cfg.ma.clone()
    };
    let (_, solved) = solve(&instance, method, &ma, &cfg.refine)?;
    Ok((solved.objective, solved.wall_seconds))
}

/// Runs every (cell, seed) pair on the rayon pool. Failures are recorded
/// in their cell and do not stop the grid.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchResult, Error> {
    let centers = load_tsplib(cfg.tsplib.as_deref().unwrap_or(BAYS29))?;
    let mut cells = Vec::new();
    for &m in &cfg.vehicles {
        for &s in &cfg.samples {
            for &method in &cfg.methods {
                cells.push(CellResult {
                    vehicles: m,
                    samples: s,
                    method,
                    runs: Vec::new(),
                });
            }
        }
    }
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| cfg.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let outcomes: Vec<(usize, RunOutcome)> = jobs
        .into_par_iter()
        .map(|(c, seed)| {
            let cell = &cells[c];
            let out = match run_one(
                cfg,
                &centers,
                cell.vehicles,
                cell.samples,
                cell.method,
                seed,
            ) {
                Ok((obj, wall)) => RunOutcome {
                    seed,
                    objective: Some(obj),
                    wall_seconds: Some(wall),
                    error: None,
                },
                Err(e) => RunOutcome {
                    seed,
                    objective: None,
                    wall_seconds: None,
                    error: Some(e.to_string()),
                },
            };
            (c, out)
        })
        .collect();
    for (c, out) in outcomes {
        cells[c].runs.push(out);
    }
    let warnings = wall_time_warnings(&cells);
    Ok(BenchResult { cells, warnings })
}

fn wall_time_warnings(cells: &[CellResult]) -> Vec<String> {
    let mut out = Vec::new();
    for a in cells {
        for b in cells {
            if a.method == b.method && a.samples == b.samples && a.vehicles < b.vehicles {
                if let (Some(wa), Some(wb)) = (a.mean_wall(), b.mean_wall()) {
                    if wb < wa {
                        out.push(format!(
                            "{} with {} samples: {} vehicles took {wb:.3}s, less than {:.3}s for {}",
                            a.method.tag(),
                            a.samples,
                            b.vehicles,
                            wa,
                            a.vehicles
                        ));
                    }
                }
            }
        }
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_default()
}

impl BenchResult {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for c in &self.cells {
            w.write_record([
                c.vehicles.to_string(),
                c.samples.to_string(),
                c.method.tag().to_string(),
                c.runs.len().to_string(),
                c.ok_runs().to_string(),
                c.failed_runs().to_string(),
                opt(c.mean_objective()),
                opt(c.min_objective()),
                opt(c.mean_wall()),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "| {} |\n|{}\n",
            CSV_HEADER.join(" | "),
            "---|".repeat(CSV_HEADER.len())
        );
        for c in &self.cells {
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
                c.vehicles,
                c.samples,
                c.method.tag(),
                c.runs.len(),
                c.ok_runs(),
                c.failed_runs(),
                opt(c.mean_objective()),
                opt(c.min_objective()),
                opt(c.mean_wall())
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_header_only() {
        let r = run_bench(&BenchConfig::default()).unwrap();
        assert!(r.cells.is_empty());
        assert_eq!(r.to_csv().lines().count(), 1);
        assert_eq!(r.to_markdown().lines().count(), 2);
    }

    #[test]
    fn failures_stay_in_their_cell() {
        let cfg = BenchConfig {
            vehicles: vec![1],
            samples: vec![1],
            seeds: vec![0, 1],
            methods: vec![Method::Oracle],
            ..Default::default()
        };
        let r = run_bench(&cfg).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.cells[0].failed_runs(), 2);
        assert!(r
            .to_csv()
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("1,1,ORACLE,2,0,2,,,"));
    }
}
