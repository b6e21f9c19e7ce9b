use std::collections::HashMap;

use super::ExactError;
use crate::memetic::{evaluate, TourSet};
use crate::roadmap::Roadmap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteLimits {
    /// Largest admissible count of (assignment, vehicle order) evaluations.
    pub max_leaves: u128,
}

impl Default for BruteLimits {
    fn default() -> Self {
        Self {
            max_leaves: 100_000_000,
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Exact number of leaves the naive enumeration visits: every task is left
/// for NIN coverage or given a (vehicle, sample); every vehicle then tries
/// each order of its tasks with each depot/terminal sample pair.
pub fn search_size(roadmap: &Roadmap) -> u128 {
    let (n, m, s, e) = (
        roadmap.n_tasks() as u128,
        roadmap.n_vehicles() as u128,
        roadmap.samples() as u128,
        roadmap.endpoint_samples as u128,
    );
    // By symmetry: m · e² · Σ_j C(n, j) · s^j · (1 + (m − 1)s)^(n − j) · j!.
    let rest = 1 + (m - 1) * s;
    let mut total: u128 = 0;
    let mut fact: u128 = 1;
    for j in 0..=n {
        if j > 0 {
            fact = fact.saturating_mul(j);
        }
        let term = binomial(n, j)
            .saturating_mul(s.saturating_pow(j as u32))
            .saturating_mul(rest.saturating_pow((n - j) as u32))
            .saturating_mul(fact);
        total = total.saturating_add(term);
    }
    total.saturating_mul(m).saturating_mul(e * e)
}

/// Cheapest depot → nodes (in some order) → terminal tour of one vehicle.
fn best_tour(roadmap: &Roadmap, k: usize, nodes: &[usize]) -> (f64, Vec<usize>) {
    let e = roadmap.endpoint_samples;
    let mut best = (f64::INFINITY, Vec::new());
    let perms = permutations(nodes);
    for d in 0..e {
        for t in 0..e {
            let (dn, tn) = (roadmap.depot_node(k, d), roadmap.terminal_node(k, t));
            for p in &perms {
                let mut cost = 0.0;
                let mut prev = dn;
                for &s in p {
                    cost += roadmap.cost(prev, s);
                    prev = s;
                }
                cost += roadmap.cost(prev, tn);
                if cost < best.0 {
                    let mut tour = Vec::with_capacity(p.len() + 2);
                    tour.push(dn);
                    tour.extend_from_slice(p);
                    tour.push(tn);
                    best = (cost, tour);
                }
            }
        }
    }
    best
}

/// All orderings in lexicographic order.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut items = items.to_vec();
    items.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(items.clone());
        let Some(i) = (1..items.len()).rev().find(|&i| items[i - 1] < items[i]) else {
            break;
        };
        let j = (i..items.len())
            .rev()
            .find(|&j| items[j] > items[i - 1])
            .expect("pivot");
        items.swap(i - 1, j);
        items[i..].reverse();
    }
    out
}

/// Exhaustive minimizer of the objective with coefficient `alpha`. Ties keep
/// the first solution in enumeration order.
pub fn solve_bruteforce(
    roadmap: &Roadmap,
    alpha: f64,
    limits: BruteLimits,
) -> Result<TourSet, ExactError> {
    let bound = search_size(roadmap);
    if bound > limits.max_leaves {
        return Err(ExactError::SizeLimit {
            bound,
            limit: limits.max_leaves,
        });
    }
    let n = roadmap.n_tasks();
    let m = roadmap.n_vehicles();
    let s = roadmap.samples();
    // Option 0 leaves the task to NIN coverage; option 1 + k·s + i picks
    // sample i of vehicle k.
    let options = 1 + m * s;
    let mut choice = vec![0usize; n];
    let mut memo: HashMap<(usize, Vec<usize>), (f64, Vec<usize>)> = HashMap::new();
    let mut best: Option<(f64, Vec<Vec<usize>>)> = None;

    loop {
        let mut per_vehicle: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (t, &c) in choice.iter().enumerate() {
            if c > 0 {
                let (k, i) = ((c - 1) / s, (c - 1) % s);
                per_vehicle[k].push(roadmap.task_node(k, t, i));
            }
        }
        if covers(roadmap, &choice, &per_vehicle) {
            let mut costs = Vec::with_capacity(m);
            let mut tours = Vec::with_capacity(m);
            for (k, nodes) in per_vehicle.into_iter().enumerate() {
                let entry = memo
                    .entry((k, nodes))
                    .or_insert_with_key(|(k, nodes)| best_tour(roadmap, *k, nodes));
                costs.push(entry.0);
                tours.push(entry.1.clone());
            }
            let obj = evaluate(&costs, alpha);
            if best.as_ref().map_or(true, |b| obj < b.0) {
                best = Some((obj, tours));
            }
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == n {
                let (_, tours) = best.ok_or(ExactError::Infeasible)?;
                return Ok(TourSet::from_tours(roadmap, tours, alpha));
            }
            choice[pos] += 1;
            if choice[pos] < options {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn covers(roadmap: &Roadmap, choice: &[usize], per_vehicle: &[Vec<usize>]) -> bool {
    let mut covered: Vec<bool> = choice.iter().map(|&c| c > 0).collect();
    for &node in per_vehicle.iter().flatten() {
        for &t in roadmap.nin_tasks(node) {
            covered[t] = true;
        }
    }
    covered.into_iter().all(|c| c)
}
