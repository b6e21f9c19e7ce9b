//! Memetic search over delimiter-encoded chromosomes.
//!
//! A chromosome for `n` tasks and `m` vehicles holds `n` task genes and
//! `2m − 1` delimiter genes. Counting delimiters from the left, the 1st,
//! 3rd, 5th, … carry the depot/terminal sample choice of one vehicle and the
//! 2nd, 4th, … separate consecutive vehicles' segments.

mod chromosome;
mod ga;
mod init;
mod operators;

pub use chromosome::{Chromosome, EndpointSamples, Gene, Segment};
pub use ga::{run, GenerationStats, MaParams, RunHistory, RunResult, Termination};
pub use init::{init_population, random_chromosome, voronoi_assignment, VoronoiSeeds};
pub use operators::{
    crossover, global_2opt, improve, local_2opt, reverse_genes, sample_swap, select,
    selection_probabilities, swap_genes, task_swap, Counter, ImproveLevel, OperatorStats,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roadmap::{Cluster, Roadmap};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("malformed chromosome: {0}")]
    Malformed(String),
}

/// Per-vehicle tours as global node ids, depot first and terminal last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourSet {
    pub tours: Vec<Vec<usize>>,
    pub per_vehicle_cost: Vec<f64>,
    pub objective: f64,
}

impl TourSet {
    /// Costs each tour on the roadmap and evaluates the objective.
    pub fn from_tours(roadmap: &Roadmap, tours: Vec<Vec<usize>>, alpha: f64) -> Self {
        let per_vehicle_cost: Vec<f64> = tours.iter().map(|t| tour_cost(roadmap, t)).collect();
        let objective = evaluate(&per_vehicle_cost, alpha);
        Self {
            tours,
            per_vehicle_cost,
            objective,
        }
    }

    pub fn total_cost(&self) -> f64 {
        self.per_vehicle_cost.iter().sum()
    }

    pub fn max_cost(&self) -> f64 {
        self.per_vehicle_cost.iter().copied().fold(0.0, f64::max)
    }

    /// Task nodes of all tours.
    pub fn task_nodes<'a>(&'a self, roadmap: &'a Roadmap) -> impl Iterator<Item = usize> + 'a {
        self.tours
            .iter()
            .flatten()
            .copied()
            .filter(move |&s| matches!(roadmap.nodes[s].cluster, Cluster::Task(_)))
    }

    /// Tasks covered neither directly nor through a NIN table entry.
    pub fn uncovered_tasks(&self, roadmap: &Roadmap) -> Vec<usize> {
        let mut covered = vec![false; roadmap.n_tasks()];
        for s in self.task_nodes(roadmap) {
            if let Cluster::Task(t) = roadmap.nodes[s].cluster {
                covered[t] = true;
            }
            for &t in roadmap.nin_tasks(s) {
                covered[t] = true;
            }
        }
        covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(t, _)| t)
            .collect()
    }
}

/// Sum of edge costs along a node sequence.
pub fn tour_cost(roadmap: &Roadmap, tour: &[usize]) -> f64 {
    tour.windows(2).map(|w| roadmap.cost(w[0], w[1])).sum()
}

/// `α·mean(costs) + (1 − α)·max(costs)`.
pub fn evaluate<S: Scalar>(costs: &[S], alpha: S) -> S {
    if costs.is_empty() {
        return S::zero();
    }
    let sum = costs.iter().fold(S::zero(), |a, &c| a + c);
    let max = costs.iter().fold(S::neg_infinity(), |a, &c| a.max(c));
    let m = S::from_usize(costs.len()).expect("vehicle count");
    alpha * sum / m + (S::one() - alpha) * max
}

/// Splits a chromosome into per-vehicle tours without NIN reduction.
pub fn decode(roadmap: &Roadmap, chrom: &Chromosome) -> Result<TourSet, DecodeError> {
    let tours = decode_tours(roadmap, chrom)?;
    Ok(TourSet::from_tours(roadmap, tours, roadmap.instance.alpha))
}

fn decode_tours(roadmap: &Roadmap, chrom: &Chromosome) -> Result<Vec<Vec<usize>>, DecodeError> {
    chrom.validate(
        roadmap.n_tasks(),
        roadmap.n_vehicles(),
        roadmap.samples(),
        roadmap.endpoint_samples,
    )?;
    Ok(chrom
        .segments()
        .iter()
        .enumerate()
        .map(|(k, seg)| {
            let ep = seg.payload.unwrap_or_default();
            let mut tour = Vec::with_capacity(seg.tasks.len() + 2);
            tour.push(roadmap.depot_node(k, ep.depot));
            tour.extend(
                seg.tasks
                    .iter()
                    .map(|&(_, c, s)| roadmap.task_node(k, c, s)),
            );
            tour.push(roadmap.terminal_node(k, ep.terminal));
            tour
        })
        .collect())
}

/// Decodes and then greedily drops task nodes whose tasks stay covered
/// through NIN entries of the remaining nodes (basket procedure).
pub fn decode_nin(roadmap: &Roadmap, chrom: &Chromosome) -> Result<TourSet, DecodeError> {
    let mut tours = decode_tours(roadmap, chrom)?;
    reduce_nin(roadmap, &mut tours, &mut |_| {});
    Ok(TourSet::from_tours(roadmap, tours, roadmap.instance.alpha))
}

/// Basket reduction in place; `on_delete` sees each deleted node in order.
pub fn reduce_nin(roadmap: &Roadmap, tours: &mut [Vec<usize>], on_delete: &mut dyn FnMut(usize)) {
    let n = roadmap.n_tasks();
    let mut basket = vec![1i64; n];
    // Node of each task still on a tour.
    let mut holder: Vec<Option<usize>> = vec![None; n];
    for &s in tours.iter().flatten() {
        if let Cluster::Task(t) = roadmap.nodes[s].cluster {
            holder[t] = Some(s);
            for &u in roadmap.nin_tasks(s) {
                basket[u] += 1;
            }
        }
    }
    loop {
        let mut pick: Option<(usize, usize)> = None;
        for (t, h) in holder.iter().enumerate() {
            let Some(s) = *h else { continue };
            let better = match pick {
                None => true,
                Some((bt, bs)) => {
                    basket[t] > basket[bt]
                        || (basket[t] == basket[bt]
                            && roadmap.nin_tasks(s).len() < roadmap.nin_tasks(bs).len())
                }
            };
            if better {
                pick = Some((t, s));
            }
        }
        let Some((t_del, s)) = pick else { break };
        basket[t_del] -= 1;
        for &u in roadmap.nin_tasks(s) {
            basket[u] -= 1;
        }
        if basket.iter().any(|&b| b <= 0) {
            break;
        }
        holder[t_del] = None;
        on_delete(s);
        for tour in tours.iter_mut() {
            if let Some(pos) = tour.iter().position(|&x| x == s) {
                tour.remove(pos);
                break;
            }
        }
    }
}

/// Inverse of [`decode`] for tours that visit every task exactly once.
pub fn encode(roadmap: &Roadmap, tours: &TourSet) -> Result<Chromosome, DecodeError> {
    let mut segments = Vec::with_capacity(tours.tours.len());
    for (k, tour) in tours.tours.iter().enumerate() {
        let (Some(&first), Some(&last)) = (tour.first(), tour.last()) else {
            return Err(DecodeError::Malformed(format!("tour {k} is empty")));
        };
        if roadmap.nodes[first].cluster != Cluster::Depot
            || roadmap.nodes[last].cluster != Cluster::Terminal
        {
            return Err(DecodeError::Malformed(format!(
                "tour {k} must run depot to terminal"
            )));
        }
        let ep = EndpointSamples {
            depot: roadmap.nodes[first].index_in_cluster,
            terminal: roadmap.nodes[last].index_in_cluster,
        };
        let mut tasks = Vec::new();
        for &s in &tour[1..tour.len() - 1] {
            match roadmap.nodes[s].cluster {
                Cluster::Task(t) => tasks.push((t, roadmap.nodes[s].index_in_cluster)),
                _ => {
                    return Err(DecodeError::Malformed(format!(
                        "tour {k} has an inner endpoint node"
                    )))
                }
            }
        }
        segments.push((ep, tasks));
    }
    let chrom = Chromosome::from_segments(&segments);
    chrom.validate(
        roadmap.n_tasks(),
        roadmap.n_vehicles(),
        roadmap.samples(),
        roadmap.endpoint_samples,
    )?;
    Ok(chrom)
}

/// Cost function used by the search: plain or NIN-reduced decoding.
#[derive(Clone, Copy)]
pub struct Evaluator<'a> {
    pub roadmap: &'a Roadmap,
    pub use_nin: bool,
}

impl<'a> Evaluator<'a> {
    pub fn new(roadmap: &'a Roadmap) -> Self {
        Self {
            roadmap,
            use_nin: roadmap.instance.nin_enabled && !roadmap.nin.is_empty(),
        }
    }

    pub fn tours(&self, chrom: &Chromosome) -> Result<TourSet, DecodeError> {
        if self.use_nin {
            decode_nin(self.roadmap, chrom)
        } else {
            decode(self.roadmap, chrom)
        }
    }

    /// Objective of a chromosome; panics on malformed input.
    pub fn cost(&self, chrom: &Chromosome) -> f64 {
        self.tours(chrom)
            .expect("operators keep chromosomes valid")
            .objective
    }

    /// Recomputes and caches `chrom.cost`.
    pub fn refresh(&self, chrom: &mut Chromosome) {
        chrom.cost = self.cost(chrom);
    }

    pub fn n_tasks(&self) -> usize {
        self.roadmap.n_tasks()
    }

    pub fn n_vehicles(&self) -> usize {
        self.roadmap.n_vehicles()
    }

    pub fn samples(&self) -> usize {
        self.roadmap.samples()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&[100.0, 50.0], 0.5), 87.5);
        assert_eq!(evaluate(&[100.0, 50.0], 1.0), 75.0);
        assert_eq!(evaluate(&[100.0, 50.0], 0.0), 100.0);
        assert_eq!(evaluate(&[100.0f32, 50.0], 0.5), 87.5);
    }
}
