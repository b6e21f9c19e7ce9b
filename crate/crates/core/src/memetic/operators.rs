//! Selection, crossover and the four improvement operators.
//!
//! Every improvement operator mutates the chromosome only when the new cost
//! is strictly lower than the cached one, so costs never increase.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Chromosome, Evaluator, Gene, MaParams};
use crate::roadmap::Cluster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImproveLevel {
    I,
    II,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counter {
    pub tried: u64,
    pub accepted: u64,
}

impl Counter {
    fn record(&mut self, accepted: bool) {
        self.tried += 1;
        self.accepted += accepted as u64;
    }

    fn merge(&mut self, other: &Counter) {
        self.tried += other.tried;
        self.accepted += other.accepted;
    }
}

/// Operator application counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorStats {
    pub global_2opt: Counter,
    pub local_2opt: Counter,
    pub task_swap: Counter,
    /// One `tried` per full left-to-right pass.
    pub sample_swap: Counter,
}

impl OperatorStats {
    pub fn merge(&mut self, other: &OperatorStats) {
        self.global_2opt.merge(&other.global_2opt);
        self.local_2opt.merge(&other.local_2opt);
        self.task_swap.merge(&other.task_swap);
        self.sample_swap.merge(&other.sample_swap);
    }
}

/// Roulette-wheel probabilities from `f_i = c_w − c_i + (c_w − c_b)/(κ − 1)`.
pub fn selection_probabilities(costs: &[f64], kappa: f64) -> Vec<f64> {
    let worst = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = worst - best;
    if costs.is_empty() {
        return Vec::new();
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return vec![1.0 / costs.len() as f64; costs.len()];
    }
    let fitness: Vec<f64> = costs
        .iter()
        .map(|c| worst - c + spread / (kappa - 1.0))
        .collect();
    let total: f64 = fitness.iter().sum();
    fitness.into_iter().map(|f| f / total).collect()
}

fn spin<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Two parent indices drawn by roulette wheel; the second is redrawn a few
/// times when its cost equals the first one's.
pub fn select<R: Rng + ?Sized>(
    population: &[Chromosome],
    kappa: f64,
    rng: &mut R,
) -> (usize, usize) {
    let costs: Vec<f64> = population.iter().map(|c| c.cost).collect();
    let probs = selection_probabilities(&costs, kappa);
    let a = spin(&probs, rng);
    let mut b = spin(&probs, rng);
    for _ in 0..10 {
        if costs[b] != costs[a] {
            break;
        }
        b = spin(&probs, rng);
    }
    (a, b)
}

/// Parameterized uniform crossover. `share` of the positions (rounded up)
/// keep parent 1's gene; the others are filled left to right with parent
/// 2's genes in order, skipping clusters already present. Payloads follow
/// parent 1.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    share: f64,
    rng: &mut R,
) -> Chromosome {
    let len = p1.len();
    debug_assert_eq!(len, p2.len());
    let keep = ((share * len as f64).ceil() as usize).min(len);
    let n_delims = p1.genes.iter().filter(|g| g.is_delimiter()).count();
    let n_clusters = len - n_delims;

    let mut p1_sample = vec![0usize; n_clusters];
    for g in &p1.genes {
        if let Gene::Task { cluster, sample } = *g {
            p1_sample[cluster] = sample;
        }
    }

    let mut child: Vec<Option<Gene>> = vec![None; len];
    let mut present = vec![false; n_clusters];
    let mut delims = 0usize;
    for pos in index::sample(rng, len, keep) {
        let g = p1.genes[pos];
        match g {
            Gene::Task { cluster, .. } => present[cluster] = true,
            Gene::Delimiter { .. } => delims += 1,
        }
        child[pos] = Some(g);
    }

    let mut slots = (0..len)
        .filter(|&p| child[p].is_none())
        .collect::<Vec<_>>()
        .into_iter();
    for g in &p2.genes {
        let take = match *g {
            Gene::Task { cluster, .. } => !std::mem::replace(&mut present[cluster], true),
            Gene::Delimiter { .. } => {
                delims += 1;
                delims <= n_delims
            }
        };
        if take {
            let Some(pos) = slots.next() else { break };
            child[pos] = Some(match *g {
                Gene::Delimiter { .. } => Gene::Delimiter { payload: None },
                task => task,
            });
        }
    }

    // Blanks only arise if the parents disagree on the gene multiset.
    let mut missing: Vec<usize> = (0..n_clusters).filter(|&c| !present[c]).collect();
    missing.shuffle(rng);
    let mut missing = missing.into_iter();
    for slot in child.iter_mut().filter(|g| g.is_none()) {
        *slot = Some(match missing.next() {
            Some(cluster) => Gene::Task {
                cluster,
                sample: p1_sample[cluster],
            },
            None => Gene::Delimiter { payload: None },
        });
    }

    let mut out = Chromosome::new(child.into_iter().map(Option::unwrap).collect());
    out.assign_payloads(&p1.payloads());
    out
}

/// Reverses `genes[i..=j]` and repairs delimiter payloads.
pub fn reverse_genes(chrom: &mut Chromosome, i: usize, j: usize) {
    chrom.genes[i..=j].reverse();
    chrom.fixup();
}

/// Exchanges two genes and repairs delimiter payloads.
pub fn swap_genes(chrom: &mut Chromosome, i: usize, j: usize) {
    chrom.genes.swap(i, j);
    chrom.fixup();
}

fn accept_if_better(ev: &Evaluator, chrom: &mut Chromosome, candidate: Chromosome) -> bool {
    let cost = ev.cost(&candidate);
    if cost < chrom.cost {
        *chrom = candidate;
        chrom.cost = cost;
        true
    } else {
        false
    }
}

/// Reverses positions `i..=j` of the whole chromosome; improve-or-reject.
pub fn global_2opt(ev: &Evaluator, chrom: &mut Chromosome, i: usize, j: usize) -> bool {
    if i >= j {
        return false;
    }
    let mut cand = chrom.clone();
    reverse_genes(&mut cand, i, j);
    accept_if_better(ev, chrom, cand)
}

/// Reverses task genes `i..=j` (indices within the vehicle's task list) of
/// one vehicle segment; improve-or-reject.
pub fn local_2opt(
    ev: &Evaluator,
    chrom: &mut Chromosome,
    vehicle: usize,
    i: usize,
    j: usize,
) -> bool {
    let segs = chrom.segments();
    let Some(seg) = segs.get(vehicle) else {
        return false;
    };
    if i >= j || j >= seg.tasks.len() {
        return false;
    }
    // The payload delimiter may sit between task genes; it stays put.
    let positions: Vec<usize> = seg.tasks[i..=j].iter().map(|t| t.0).collect();
    let mut cand = chrom.clone();
    for (&dst, &src) in positions.iter().zip(positions.iter().rev()) {
        cand.genes[dst] = chrom.genes[src];
    }
    accept_if_better(ev, chrom, cand)
}

/// Exchanges genes `i` and `j`; improve-or-reject.
pub fn task_swap(ev: &Evaluator, chrom: &mut Chromosome, i: usize, j: usize) -> bool {
    if i == j || (chrom.genes[i].is_delimiter() && chrom.genes[j].is_delimiter()) {
        return false;
    }
    let mut cand = chrom.clone();
    swap_genes(&mut cand, i, j);
    accept_if_better(ev, chrom, cand)
}

/// One left-to-right pass switching each task gene to its cheapest
/// alternative sample. A switch must not leave any task uncovered on the
/// current reduced tours. Returns the number of accepted switches.
pub fn sample_swap(ev: &Evaluator, chrom: &mut Chromosome) -> usize {
    let samples = ev.samples();
    if samples < 2 {
        return 0;
    }
    let rm = ev.roadmap;
    let mut accepted = 0;
    for pos in 0..chrom.len() {
        let Gene::Task { cluster, sample } = chrom.genes[pos] else {
            continue;
        };
        let vehicle = chrom.vehicle_of(pos);
        let current = rm.task_node(vehicle, cluster, sample);
        let reduced = ev.tours(chrom).expect("valid chromosome");
        let on_tour = reduced.tours[vehicle].contains(&current);
        let mut best: Option<Chromosome> = None;
        let mut best_cost = chrom.cost;
        for alt in (0..samples).filter(|&s| s != sample) {
            let alt_node = rm.task_node(vehicle, cluster, alt);
            if on_tour && !covers_after_switch(ev, &reduced.tours, current, alt_node) {
                continue;
            }
            let mut cand = chrom.clone();
            cand.genes[pos] = Gene::Task {
                cluster,
                sample: alt,
            };
            let cost = ev.cost(&cand);
            if cost < best_cost {
                best_cost = cost;
                cand.cost = cost;
                best = Some(cand);
            }
        }
        if let Some(b) = best {
            *chrom = b;
            accepted += 1;
        }
    }
    accepted
}

/// Whether replacing node `old` by `new` on the given tours keeps every task
/// covered directly or through NIN entries.
fn covers_after_switch(ev: &Evaluator, tours: &[Vec<usize>], old: usize, new: usize) -> bool {
    let rm = ev.roadmap;
    let mut covered = vec![false; rm.n_tasks()];
    let nodes = tours
        .iter()
        .flatten()
        .copied()
        .filter(|&s| s != old)
        .chain(std::iter::once(new));
    for s in nodes {
        if let Cluster::Task(t) = rm.nodes[s].cluster {
            covered[t] = true;
            for &u in rm.nin_tasks(s) {
                covered[u] = true;
            }
        }
    }
    covered.into_iter().all(|c| c)
}

fn random_pair<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Option<(usize, usize)> {
    if len < 2 {
        return None;
    }
    let i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    Some((i.min(j), i.max(j)))
}

fn try_global<R: Rng + ?Sized>(
    ev: &Evaluator,
    chrom: &mut Chromosome,
    rng: &mut R,
    stats: &mut OperatorStats,
) -> bool {
    let Some((i, j)) = random_pair(chrom.len(), rng) else {
        return false;
    };
    let ok = global_2opt(ev, chrom, i, j);
    stats.global_2opt.record(ok);
    ok
}

fn try_local<R: Rng + ?Sized>(
    ev: &Evaluator,
    chrom: &mut Chromosome,
    rng: &mut R,
    stats: &mut OperatorStats,
) -> bool {
    let segs = chrom.segments();
    let eligible: Vec<usize> = (0..segs.len())
        .filter(|&k| segs[k].tasks.len() >= 2)
        .collect();
    let Some(&k) = eligible.choose(rng) else {
        return false;
    };
    let (i, j) = random_pair(segs[k].tasks.len(), rng).expect("segment has two tasks");
    let ok = local_2opt(ev, chrom, k, i, j);
    stats.local_2opt.record(ok);
    ok
}

fn try_task_swap<R: Rng + ?Sized>(
    ev: &Evaluator,
    chrom: &mut Chromosome,
    rng: &mut R,
    stats: &mut OperatorStats,
) -> bool {
    // Draw a task gene and any other gene so the pair is never two delimiters.
    let tasks: Vec<usize> = (0..chrom.len())
        .filter(|&p| !chrom.genes[p].is_delimiter())
        .collect();
    let Some(&i) = tasks.choose(rng) else {
        return false;
    };
    let Some((a, b)) = random_pair(chrom.len(), rng) else {
        return false;
    };
    let j = if a == i { b } else { a };
    let ok = task_swap(ev, chrom, i, j);
    stats.task_swap.record(ok);
    ok
}

fn try_sample_swap(ev: &Evaluator, chrom: &mut Chromosome, stats: &mut OperatorStats) -> bool {
    let ok = sample_swap(ev, chrom) > 0;
    stats.sample_swap.record(ok);
    ok
}

type Move<R> = fn(&Evaluator, &mut Chromosome, &mut R, &mut OperatorStats) -> bool;

/// Applies the Level-I or Level-II schedule. `chrom.cost` must be current.
pub fn improve<R: Rng + ?Sized>(
    ev: &Evaluator,
    chrom: &mut Chromosome,
    level: ImproveLevel,
    params: &MaParams,
    rng: &mut R,
) -> OperatorStats {
    let mut stats = OperatorStats::default();
    match level {
        ImproveLevel::I => {
            try_global(ev, chrom, rng, &mut stats);
            try_local(ev, chrom, rng, &mut stats);
            try_sample_swap(ev, chrom, &mut stats);
            for _ in 0..params.task_swap_repeats_l1 {
                try_task_swap(ev, chrom, rng, &mut stats);
            }
        }
        ImproveLevel::II => {
            let moves: [Move<R>; 3] = [try_global, try_local, try_task_swap];
            for mv in moves {
                let mut fails = 0;
                // Every success strictly lowers the cost, so this terminates.
                while fails < params.stagnation_streak_l2 {
                    if mv(ev, chrom, rng, &mut stats) {
                        fails = 0;
                    } else {
                        fails += 1;
                    }
                }
            }
            for _ in 0..params.sample_swap_repeats_l2 {
                if !try_sample_swap(ev, chrom, &mut stats) {
                    break;
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn fitness_ratio_matches_kappa() {
        let p = selection_probabilities(&[60.0, 100.0], 4.0);
        assert!((p[0] - 0.8).abs() < 1e-12);
        assert!((p[0] / p[1] - 4.0).abs() < 1e-12);
        let u = selection_probabilities(&[5.0, 5.0, 5.0], 4.0);
        assert!(u.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn random_pair_is_ordered_and_distinct() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (i, j) = random_pair(5, &mut rng).unwrap();
            assert!(i < j && j < 5);
        }
        assert!(random_pair(1, &mut rng).is_none());
    }
}
