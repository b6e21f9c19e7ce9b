//! Randomized constructions shared by the exact, refine and acceptance tests.

use ghmdatsp::exact::IntegralSolution;
use ghmdatsp::memetic::TourSet;
use ghmdatsp::refine::{ChainState, StateKind, WaypointChain};
use ghmdatsp::{Config, Disk, Point2, Roadmap};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::tiny_instance;

pub struct PlantedCase {
    pub roadmap: Roadmap,
    /// Every task on a depot-to-terminal chain.
    pub complete: IntegralSolution,
    /// Chains over the kept tasks plus the planted cycles.
    pub broken: IntegralSolution,
    /// Planted cycles, each rotated to start at its smallest node, sorted.
    pub planted: Vec<Vec<usize>>,
}

/// NIN off, 4 to 8 tasks, 1 to 3 vehicles. Between two and six tasks are
/// pulled off the chains and regrouped into cycles of length two or more.
pub fn planted_case(case: u64, rng: &mut ChaCha8Rng) -> PlantedCase {
    let (n, m) = (rng.gen_range(4..9), rng.gen_range(1..4));
    let mut inst = tiny_instance(case, n, m, 2);
    inst.nin_enabled = false;
    let rm = Roadmap::build(&inst);
    let mut tasks: Vec<usize> = (0..n).collect();
    tasks.shuffle(rng);
    let pulled = rng.gen_range(2..=n.min(6));
    let (removed, kept) = tasks.split_at(pulled);
    let owner: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let chains = |tasks: &[usize]| -> Vec<Vec<usize>> {
        (0..m)
            .map(|k| {
                let mut tour = vec![rm.depot_node(k, 0)];
                tour.extend(
                    tasks
                        .iter()
                        .filter(|&&t| owner[t] == k)
                        .map(|&t| rm.task_node(k, t, t % 2)),
                );
                tour.push(rm.terminal_node(k, 0));
                tour
            })
            .collect()
    };
    let complete = IntegralSolution::from_tours(&TourSet::from_tours(&rm, chains(&tasks), 0.5));
    let mut broken = IntegralSolution::from_tours(&TourSet::from_tours(&rm, chains(kept), 0.5));
    let mut planted = Vec::new();
    let mut rest = removed.to_vec();
    while rest.len() >= 2 {
        let len = rng.gen_range(2..=rest.len());
        let k = rng.gen_range(0..m);
        let cycle: Vec<usize> = rest
            .drain(..len)
            .map(|t| rm.task_node(k, t, rng.gen_range(0..2)))
            .collect();
        broken.add_cycle(&cycle);
        let min = cycle.iter().enumerate().min_by_key(|(_, &s)| s).unwrap().0;
        let mut c = cycle;
        c.rotate_left(min);
        planted.push(c);
    }
    planted.sort();
    PlantedCase {
        roadmap: rm,
        complete,
        broken,
        planted,
    }
}

pub fn endpoint(kind: StateKind, x: f64, y: f64, theta: f64) -> ChainState {
    ChainState {
        kind,
        config: Config::new(x, y, theta),
        disk: None,
    }
}

pub fn task_state(task: usize, config: Config, disk: Disk) -> ChainState {
    ChainState {
        kind: StateKind::Task { task, direct: true },
        config,
        disk: Some(disk),
    }
}

/// One to five task disks in a 1 km square with feasible random states and
/// free endpoint headings.
pub fn random_chain(rng: &mut ChaCha8Rng) -> WaypointChain {
    let n = rng.gen_range(1..6);
    let pose = |rng: &mut ChaCha8Rng| {
        (
            rng.gen_range(0.0..1000.0),
            rng.gen_range(0.0..1000.0),
            rng.gen_range(0.0..6.3),
        )
    };
    let (x, y, th) = pose(rng);
    let mut states = vec![endpoint(StateKind::Depot, x, y, th)];
    for task in 0..n {
        let c = Point2::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
        let disk = Disk::new(c, rng.gen_range(30.0..150.0));
        let (a, r): (f64, f64) = (
            rng.gen_range(0.0..6.3),
            disk.radius * rng.gen_range(0.0..1.0f64).sqrt(),
        );
        states.push(task_state(
            task,
            Config::new(
                c.x + r * a.cos(),
                c.y + r * a.sin(),
                rng.gen_range(0.0..6.3),
            ),
            disk,
        ));
    }
    let (x, y, th) = pose(rng);
    states.push(endpoint(StateKind::Terminal, x, y, th));
    WaypointChain {
        vehicle: 0,
        r_min: rng.gen_range(40.0..130.0),
        cost_scale: 1.0,
        states,
    }
}
