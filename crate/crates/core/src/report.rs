//! JSON artifacts: the tour file and the run report.

use serde::{Deserialize, Serialize};

use crate::geometry::dubins_length;
use crate::memetic::{evaluate, Termination, TourSet};
use crate::refine::{RefineOutcome, WaypointChain};
use crate::roadmap::{Cluster, Roadmap};
use crate::solve::{Method, Solved};
use crate::{Config, Instance};

/// Content hash of an instance plus its sampling seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub hash: String,
    pub seed: u64,
}

impl Fingerprint {
    pub fn of(instance: &Instance) -> Self {
        Self {
            hash: instance.fingerprint(),
            seed: instance.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourNode {
    pub cluster: Cluster,
    pub sample: usize,
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedChain {
    pub refined: bool,
    #[serde(flatten)]
    pub chain: WaypointChain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleTour {
    pub id: usize,
    pub cost: f64,
    pub nodes: Vec<TourNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_chain: Option<RefinedChain>,
}

/// Objective after each refinement half-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub half_sweep_objectives: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourFile {
    pub instance_fingerprint: Fingerprint,
    pub method: Method,
    pub objective: f64,
    pub vehicles: Vec<VehicleTour>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<SweepTrace>,
}

impl TourFile {
    /// Snapshot of `tours`, with refined chains attached when given.
    pub fn new(
        instance: &Instance,
        roadmap: &Roadmap,
        method: Method,
        tours: &TourSet,
        refined: Option<&RefineOutcome>,
    ) -> Self {
        let mut vehicles: Vec<VehicleTour> = tours
            .tours
            .iter()
            .enumerate()
            .map(|(k, tour)| VehicleTour {
                id: instance.vehicles[k].id,
                cost: tours.per_vehicle_cost[k],
                nodes: tour
                    .iter()
                    .map(|&s| {
                        let n = &roadmap.nodes[s];
                        TourNode {
                            cluster: n.cluster,
                            sample: n.index_in_cluster,
                            config: n.config,
                        }
                    })
                    .collect(),
                refined_chain: None,
            })
            .collect();
        let mut objective = tours.objective;
        if let Some(r) = refined {
            for chain in &r.chains {
                vehicles[chain.vehicle].refined_chain = Some(RefinedChain {
                    refined: true,
                    chain: chain.clone(),
                });
            }
            for (v, &c) in vehicles.iter_mut().zip(&r.per_vehicle_cost) {
                v.cost = c;
            }
            objective = r.objective;
        }
        Self {
            instance_fingerprint: Fingerprint::of(instance),
            method,
            objective,
            vehicles,
            refinement: refined.map(|r| SweepTrace {
                half_sweep_objectives: r.half_sweep_objectives.clone(),
                sweeps: r.sweeps,
                converged: r.converged,
            }),
        }
    }

    /// Per-vehicle costs recomputed from the stored poses with Dubins paths.
    pub fn recompute_costs(&self, instance: &Instance) -> Vec<f64> {
        self.vehicles
            .iter()
            .enumerate()
            .map(|(k, v)| match &v.refined_chain {
                Some(rc) => rc.chain.cost(),
                None => {
                    let veh = &instance.vehicles[k];
                    let r = veh.r_min();
                    v.nodes
                        .windows(2)
                        .map(|w| {
                            veh.cost_of_length(
                                dubins_length(w[0].config, w[1].config, r),
                                instance.cost_metric,
                            )
                        })
                        .sum()
                }
            })
            .collect()
    }

    pub fn recompute_objective(&self, instance: &Instance) -> f64 {
        evaluate(&self.recompute_costs(instance), instance.alpha)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tour file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, crate::Error> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Summary of one solver invocation. Fields that do not apply to the
/// method are left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_fingerprint: Fingerprint,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_vehicle_costs: Vec<f64>,
    pub wall_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    /// MA seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// NIN tasks whose refined entry state was projected into the disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projected_tasks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_sweeps: Option<usize>,
    /// Model size, MILP export only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milp_variables: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milp_rows: Option<usize>,
}

impl RunReport {
    fn empty(instance: &Instance, method: Method, wall_seconds: f64) -> Self {
        Self {
            instance_fingerprint: Fingerprint::of(instance),
            method,
            objective: None,
            per_vehicle_costs: Vec::new(),
            wall_seconds,
            generations: None,
            termination: None,
            seed: None,
            projected_tasks: None,
            refine_sweeps: None,
            milp_variables: None,
            milp_rows: None,
        }
    }

    pub fn for_solve(instance: &Instance, method: Method, solved: &Solved, seed: u64) -> Self {
        let mut r = Self::empty(instance, method, solved.wall_seconds);
        r.objective = Some(solved.objective);
        r.per_vehicle_costs = solved.per_vehicle_cost.clone();
        r.generations = solved.generations;
        r.termination = solved.termination;
        if solved.ma.is_some() {
            r.seed = Some(seed);
        }
        if let Some((build, outcome)) = solved.ma.as_ref().and_then(|m| m.refined.as_ref()) {
            r.projected_tasks = Some(build.projected.clone());
            r.refine_sweeps = Some(outcome.sweeps);
        }
        r
    }

    pub fn for_export(
        instance: &Instance,
        variables: usize,
        rows: usize,
        wall_seconds: f64,
    ) -> Self {
        let mut r = Self::empty(instance, Method::MilpExport, wall_seconds);
        r.milp_variables = Some(variables);
        r.milp_rows = Some(rows);
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
