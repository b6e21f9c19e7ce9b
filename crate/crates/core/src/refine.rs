//! Continuous refinement of entry poses along fixed visiting sequences.
//!
//! Each vehicle with at least one task gets a chain of states: fixed-position
//! depot and terminal states with free headings, and task states free to
//! move anywhere inside their disk. Sweeps alternately re-optimize the
//! states at even and at odd chain indices while their neighbors stay fixed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{dubins_length, dubins_shortest_path, sample_path};
use crate::instance::Instance;
use crate::memetic::{evaluate, TourSet};
use crate::nelder_mead::{minimize, NelderMeadParams};
use crate::roadmap::{Cluster, Roadmap};
use crate::{Config, Disk};

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("task {task} is claimed as NIN-covered but no densified path of a claiming vehicle enters it")]
    MissedNinTask { task: usize },
    #[error("task {task} is not covered by the tours")]
    Uncovered { task: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateKind {
    Depot,
    Terminal,
    /// `direct` is false for tasks covered only through a NIN entry.
    Task {
        task: usize,
        direct: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    #[serde(flatten)]
    pub kind: StateKind,
    pub config: Config,
    /// Feasible region of task states.
    pub disk: Option<Disk>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointChain {
    pub vehicle: usize,
    pub r_min: f64,
    /// Cost per meter (1 for length, `1/v` for time).
    pub cost_scale: f64,
    pub states: Vec<ChainState>,
}

impl WaypointChain {
    pub fn leg_cost(&self, a: Config, b: Config) -> f64 {
        self.cost_scale * dubins_length(a, b, self.r_min)
    }

    pub fn cost(&self) -> f64 {
        self.states
            .windows(2)
            .map(|w| self.leg_cost(w[0].config, w[1].config))
            .sum()
    }

    /// Task indices in chain order.
    pub fn task_order(&self) -> Vec<usize> {
        self.states
            .iter()
            .filter_map(|s| match s.kind {
                StateKind::Task { task, .. } => Some(task),
                _ => None,
            })
            .collect()
    }

    /// Densified trajectory through all states.
    pub fn trajectory(&self, spacing: f64) -> Vec<Config> {
        let mut out = vec![self.states[0].config];
        for w in self.states.windows(2) {
            let path = dubins_shortest_path(w[0].config, w[1].config, self.r_min);
            out.extend(sample_path(&path, spacing).into_iter().skip(1));
        }
        out
    }
}

/// How to treat a NIN claim that the densified path never realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissedEntry {
    /// Fail with [`ChainError::MissedNinTask`].
    #[default]
    Error,
    /// Insert the closest-approach pose, moved into the disk.
    Project,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChainBuild {
    pub chains: Vec<WaypointChain>,
    /// Tasks whose entry state had to be projected.
    pub projected: Vec<usize>,
}

/// Entry candidates along one vehicle's tour: `(leg, arc length, pose)`.
struct Densified {
    poses: Vec<(usize, f64, Config)>,
}

impl Densified {
    fn new(roadmap: &Roadmap, tour: &[usize], r_min: f64) -> Self {
        let spacing = r_min / 50.0;
        let mut poses = Vec::new();
        for (leg, w) in tour.windows(2).enumerate() {
            let path = dubins_shortest_path(
                roadmap.nodes[w[0]].config,
                roadmap.nodes[w[1]].config,
                r_min,
            );
            let pts = sample_path(&path, spacing);
            let step = if pts.len() > 1 {
                path.length / (pts.len() - 1) as f64
            } else {
                0.0
            };
            poses.extend(
                pts.into_iter()
                    .enumerate()
                    .map(|(i, c)| (leg, i as f64 * step, c)),
            );
        }
        Self { poses }
    }

    fn first_inside(&self, disk: &Disk) -> Option<(usize, f64, Config)> {
        self.poses
            .iter()
            .copied()
            .find(|(_, _, c)| disk.contains(c.position(), 1e-9))
    }

    fn closest(&self, disk: &Disk) -> (usize, f64, Config) {
        self.poses
            .iter()
            .copied()
            .min_by(|a, b| {
                a.2.position()
                    .distance(disk.center)
                    .total_cmp(&b.2.position().distance(disk.center))
            })
            .expect("a tour has at least its endpoints")
    }
}

/// Builds one chain per vehicle that covers at least one task. Directly
/// visited tasks keep their sample pose; each NIN-covered task is entered at
/// the first densified pose inside its disk, on the first claiming vehicle
/// whose path enters it.
pub fn build_chain(
    tours: &TourSet,
    roadmap: &Roadmap,
    missed: MissedEntry,
) -> Result<ChainBuild, ChainError> {
    let inst = &roadmap.instance;
    let n = inst.n_tasks();
    let mut direct = vec![false; n];
    // Vehicles whose tour nodes claim each task.
    let mut claims: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, tour) in tours.tours.iter().enumerate() {
        for &s in tour {
            if let Cluster::Task(t) = roadmap.nodes[s].cluster {
                direct[t] = true;
            }
            for &t in roadmap.nin_tasks(s) {
                if !claims[t].contains(&k) {
                    claims[t].push(k);
                }
            }
        }
    }

    let densified: Vec<Densified> = tours
        .tours
        .iter()
        .enumerate()
        .map(|(k, tour)| Densified::new(roadmap, tour, inst.vehicles[k].r_min()))
        .collect();

    // (leg, arc, pose, task) insertions per vehicle.
    let mut inserts: Vec<Vec<(usize, f64, Config, usize)>> = vec![Vec::new(); tours.tours.len()];
    let mut projected = Vec::new();
    for t in (0..n).filter(|&t| !direct[t]) {
        if claims[t].is_empty() {
            return Err(ChainError::Uncovered { task: t });
        }
        let hit = claims[t].iter().find_map(|&k| {
            let disk = inst.vehicles[k].neighborhood(&inst.tasks[t]);
            densified[k]
                .first_inside(&disk)
                .map(|(leg, arc, c)| (k, leg, arc, c))
        });
        match (hit, missed) {
            (Some((k, leg, arc, c)), _) => inserts[k].push((leg, arc, c, t)),
            (None, MissedEntry::Error) => return Err(ChainError::MissedNinTask { task: t }),
            (None, MissedEntry::Project) => {
                let k = claims[t][0];
                let disk = inst.vehicles[k].neighborhood(&inst.tasks[t]);
                let (leg, arc, c) = densified[k].closest(&disk);
                inserts[k].push((leg, arc, Config::at(disk.project(c.position()), c.theta), t));
                projected.push(t);
            }
        }
    }

    let mut chains = Vec::new();
    for (k, tour) in tours.tours.iter().enumerate() {
        let veh = &inst.vehicles[k];
        let mut ins = std::mem::take(&mut inserts[k]);
        ins.sort_by(|a, b| {
            (a.0, a.1)
                .partial_cmp(&(b.0, b.1))
                .expect("finite arc lengths")
        });
        let mut ins = ins.into_iter().peekable();
        let mut states = Vec::with_capacity(tour.len() + ins.len());
        for (pos, &s) in tour.iter().enumerate() {
            let node = &roadmap.nodes[s];
            let kind = match node.cluster {
                Cluster::Depot => StateKind::Depot,
                Cluster::Terminal => StateKind::Terminal,
                Cluster::Task(task) => StateKind::Task { task, direct: true },
            };
            let disk = match node.cluster {
                Cluster::Task(task) => Some(veh.neighborhood(&inst.tasks[task])),
                _ => None,
            };
            states.push(ChainState {
                kind,
                config: node.config,
                disk,
            });
            // Entries on the leg leaving this node.
            while let Some(&(leg, _, c, task)) = ins.peek() {
                if leg != pos {
                    break;
                }
                states.push(ChainState {
                    kind: StateKind::Task {
                        task,
                        direct: false,
                    },
                    config: c,
                    disk: Some(veh.neighborhood(&inst.tasks[task])),
                });
                ins.next();
            }
        }
        let chain = WaypointChain {
            vehicle: k,
            r_min: veh.r_min(),
            cost_scale: veh.cost_of_length(1.0, inst.cost_metric),
            states,
        };
        if !chain.task_order().is_empty() {
            chains.push(chain);
        }
    }
    Ok(ChainBuild { chains, projected })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineParams {
    /// Stop when a sweep improves the objective by less than this fraction.
    pub convergence_threshold: f64,
    pub max_sweeps: usize,
    /// Initial simplex edge for positions, as a fraction of the disk radius.
    pub position_step: f64,
    /// Initial simplex edge for headings, radians.
    pub heading_step: f64,
    pub max_evals: usize,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            convergence_threshold: 1e-4,
            max_sweeps: 100,
            position_step: 0.25,
            heading_step: 0.5,
            max_evals: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineOutcome {
    pub chains: Vec<WaypointChain>,
    /// Indexed by vehicle; vehicles without a chain keep their tour cost.
    pub per_vehicle_cost: Vec<f64>,
    pub objective: f64,
    /// Objective before refinement and after every half-sweep.
    pub half_sweep_objectives: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

const RESTARTS: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    -std::f64::consts::FRAC_PI_4,
    std::f64::consts::PI,
];

/// Re-optimizes state `i` of `chain` against its fixed neighbors. Returns a
/// strictly better state, if found.
fn optimize_state(chain: &WaypointChain, i: usize, params: &RefineParams) -> Option<ChainState> {
    let st = chain.states[i];
    let prev = (i > 0).then(|| chain.states[i - 1].config);
    let next = chain.states.get(i + 1).map(|s| s.config);
    let local = |c: Config| -> f64 {
        prev.map_or(0.0, |p| chain.leg_cost(p, c)) + next.map_or(0.0, |n| chain.leg_cost(c, n))
    };
    let current = local(st.config);
    if current <= 0.0 {
        return None;
    }
    let nm = NelderMeadParams {
        max_evals: params.max_evals,
        f_tol: current * 1e-12,
        x_tol: 1e-9,
    };
    let mut best = (current, st.config);
    for dh in RESTARTS {
        let theta0 = st.config.theta + dh;
        let found = match st.disk {
            None => {
                let (x, y) = (st.config.x, st.config.y);
                let m = minimize(
                    |v| local(Config::new(x, y, v[0])),
                    &[theta0],
                    &[params.heading_step],
                    &nm,
                );
                (m.f, Config::new(x, y, m.x[0]))
            }
            Some(disk) => {
                let place = |v: &[f64]| {
                    let p = disk.project(crate::Point2::new(v[0], v[1]));
                    Config::new(p.x, p.y, v[2])
                };
                let step = params.position_step * disk.radius;
                let m = minimize(
                    |v| local(place(v)),
                    &[st.config.x, st.config.y, theta0],
                    &[step, step, params.heading_step],
                    &nm,
                );
                (m.f, place(&m.x))
            }
        };
        if found.0 < best.0 {
            best = found;
        }
    }
    (best.0 < current).then_some(ChainState {
        config: best.1,
        ..st
    })
}

/// One half-sweep over the states with index parity `parity`.
fn half_sweep(chain: &mut WaypointChain, parity: usize, params: &RefineParams) {
    let updates: Vec<(usize, ChainState)> = (parity..chain.states.len())
        .step_by(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|i| optimize_state(chain, i, params).map(|s| (i, s)))
        .collect();
    for (i, s) in updates {
        chain.states[i] = s;
    }
}

fn objective(instance: &Instance, chains: &[WaypointChain], base: &[f64]) -> (Vec<f64>, f64) {
    let mut costs = base.to_vec();
    for c in chains {
        costs[c.vehicle] = c.cost();
    }
    let obj = evaluate(&costs, instance.alpha);
    (costs, obj)
}

/// Alternating coordinate descent. `base_costs[k]` is used for vehicles
/// without a chain.
pub fn refine(
    instance: &Instance,
    mut chains: Vec<WaypointChain>,
    base_costs: &[f64],
    params: &RefineParams,
) -> RefineOutcome {
    let (_, mut obj) = objective(instance, &chains, base_costs);
    let mut trace = vec![obj];
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < params.max_sweeps {
        let before = obj;
        for parity in [0, 1] {
            chains
                .par_iter_mut()
                .for_each(|c| half_sweep(c, parity, params));
            obj = objective(instance, &chains, base_costs).1;
            trace.push(obj);
        }
        sweeps += 1;
        if before <= 0.0 || (before - obj) / before < params.convergence_threshold {
            converged = true;
            break;
        }
    }
    let (per_vehicle_cost, objective) = objective(instance, &chains, base_costs);
    RefineOutcome {
        chains,
        per_vehicle_cost,
        objective,
        half_sweep_objectives: trace,
        sweeps,
        converged,
    }
}
