//! Initial population: random chromosomes and Voronoi-seeded ones.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    improve, Chromosome, EndpointSamples, Evaluator, Gene, ImproveLevel, MaParams, OperatorStats,
};
use crate::instance::Instance;
use crate::Point2;

fn random_payload<R: Rng + ?Sized>(endpoint_samples: usize, rng: &mut R) -> EndpointSamples {
    EndpointSamples {
        depot: rng.gen_range(0..endpoint_samples),
        terminal: rng.gen_range(0..endpoint_samples),
    }
}

/// Random permutation of task genes and delimiters with random samples.
pub fn random_chromosome<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    samples: usize,
    endpoint_samples: usize,
    rng: &mut R,
) -> Chromosome {
    let mut genes: Vec<Gene> = (0..n)
        .map(|cluster| Gene::Task {
            cluster,
            sample: rng.gen_range(0..samples),
        })
        .collect();
    genes.extend((0..2 * m - 1).map(|_| Gene::Delimiter { payload: None }));
    genes.shuffle(rng);
    let payloads: Vec<EndpointSamples> = (0..m)
        .map(|_| random_payload(endpoint_samples, rng))
        .collect();
    let mut c = Chromosome::new(genes);
    c.assign_payloads(&payloads);
    c
}

/// Task indices per vehicle: each task goes to its nearest depot, the lowest
/// vehicle index winning ties.
pub fn voronoi_assignment(instance: &Instance) -> Vec<Vec<usize>> {
    let mut cells = vec![Vec::new(); instance.n_vehicles()];
    for (t, task) in instance.tasks.iter().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, v) in instance.vehicles.iter().enumerate() {
            let d = task.center.distance(v.depot);
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        cells[best].push(t);
    }
    cells
}

fn open_path_length(start: Point2, end: Point2, pts: &[Point2], order: &[usize]) -> f64 {
    let mut len = 0.0;
    let mut prev = start;
    for &i in order {
        len += prev.distance(pts[i]);
        prev = pts[i];
    }
    len + prev.distance(end)
}

/// Nearest-neighbor order from `start`, then 2-opt until no reversal helps;
/// the path ends at `end`.
fn order_cell(start: Point2, end: Point2, pts: &[Point2]) -> Vec<usize> {
    let mut left: Vec<usize> = (0..pts.len()).collect();
    let mut order = Vec::with_capacity(pts.len());
    let mut cur = start;
    while !left.is_empty() {
        let (idx, _) = left
            .iter()
            .enumerate()
            .min_by(|a, b| cur.distance(pts[*a.1]).total_cmp(&cur.distance(pts[*b.1])))
            .expect("nonempty");
        let next = left.remove(idx);
        order.push(next);
        cur = pts[next];
    }
    let mut best = open_path_length(start, end, pts, &order);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                order[i..=j].reverse();
                let len = open_path_length(start, end, pts, &order);
                if len < best - 1e-9 {
                    best = len;
                    improved = true;
                } else {
                    order[i..=j].reverse();
                }
            }
        }
    }
    order
}

/// Per-vehicle task orderings of the Voronoi cells, computed once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiSeeds {
    pub cells: Vec<Vec<usize>>,
}

impl VoronoiSeeds {
    pub fn new(instance: &Instance) -> Self {
        let cells = voronoi_assignment(instance)
            .into_iter()
            .enumerate()
            .map(|(k, cell)| {
                let v = &instance.vehicles[k];
                let pts: Vec<Point2> = cell.iter().map(|&t| instance.tasks[t].center).collect();
                order_cell(v.depot, v.terminal, &pts)
                    .into_iter()
                    .map(|i| cell[i])
                    .collect()
            })
            .collect();
        Self { cells }
    }

    /// A chromosome following the cell orderings with random samples.
    pub fn chromosome<R: Rng + ?Sized>(
        &self,
        samples: usize,
        endpoint_samples: usize,
        rng: &mut R,
    ) -> Chromosome {
        let segments: Vec<(EndpointSamples, Vec<(usize, usize)>)> = self
            .cells
            .iter()
            .map(|cell| {
                let ep = random_payload(endpoint_samples, rng);
                (
                    ep,
                    cell.iter()
                        .map(|&t| (t, rng.gen_range(0..samples)))
                        .collect(),
                )
            })
            .collect();
        Chromosome::from_segments(&segments)
    }
}

/// One immigrant (even `slot` random, odd `slot` Voronoi), evaluated and
/// given Level-I improvement.
pub(crate) fn immigrant(
    ev: &Evaluator,
    seeds: &VoronoiSeeds,
    params: &MaParams,
    slot: usize,
    seed: u64,
) -> (Chromosome, OperatorStats) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rm = ev.roadmap;
    let mut c = if slot % 2 == 0 {
        random_chromosome(
            rm.n_tasks(),
            rm.n_vehicles(),
            rm.samples(),
            rm.endpoint_samples,
            &mut rng,
        )
    } else {
        seeds.chromosome(rm.samples(), rm.endpoint_samples, &mut rng)
    };
    ev.refresh(&mut c);
    let stats = improve(ev, &mut c, ImproveLevel::I, params, &mut rng);
    (c, stats)
}

/// `params.population_size` chromosomes, half random and half Voronoi,
/// each improved by Level-I, sorted by ascending cost.
pub fn init_population<R: Rng + ?Sized>(
    ev: &Evaluator,
    params: &MaParams,
    rng: &mut R,
) -> Vec<Chromosome> {
    let seeds = VoronoiSeeds::new(&ev.roadmap.instance);
    let child_seeds: Vec<u64> = (0..params.population_size).map(|_| rng.gen()).collect();
    let mut pop: Vec<Chromosome> = child_seeds
        .par_iter()
        .enumerate()
        .map(|(slot, &seed)| immigrant(ev, &seeds, params, slot, seed).0)
        .collect();
    pop.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    pop
}
