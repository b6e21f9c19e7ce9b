//! Generational loop: elitism, roulette selection with crossover,
//! immigration, rank-dependent improvement and duplicate purging.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::init::{immigrant, init_population, VoronoiSeeds};
use super::{
    crossover, improve, select, Chromosome, DecodeError, Evaluator, ImproveLevel, OperatorStats,
    TourSet,
};
use crate::roadmap::Roadmap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaParams {
    pub population_size: usize,
    pub elite_fraction: f64,
    /// κ in the roulette fitness.
    pub selection_pressure: f64,
    /// Share of genes a crossover child takes from parent 1.
    pub crossover_p1_share: f64,
    /// Share of non-elite slots filled by crossover; immigrants fill the rest.
    pub crossover_fill_share: f64,
    /// Children at or above this rank (as a population fraction) get Level-II.
    pub level2_rank_fraction: f64,
    pub task_swap_repeats_l1: usize,
    pub sample_swap_repeats_l2: usize,
    pub stagnation_streak_l2: usize,
    pub max_generations: usize,
    pub stagnation_limit: usize,
    /// Relative cost gap under which two chromosomes count as duplicates.
    pub duplicate_cost_epsilon: f64,
    pub seed: u64,
    /// Wall-clock budget in seconds.
    pub time_limit: Option<f64>,
}

impl Default for MaParams {
    fn default() -> Self {
        Self {
            population_size: 100,
            elite_fraction: 0.10,
            selection_pressure: 4.0,
            crossover_p1_share: 0.60,
            crossover_fill_share: 0.60,
            level2_rank_fraction: 0.10,
            task_swap_repeats_l1: 5,
            sample_swap_repeats_l2: 3,
            stagnation_streak_l2: 10,
            max_generations: 500,
            stagnation_limit: 50,
            duplicate_cost_epsilon: 1e-6,
            seed: 0,
            time_limit: None,
        }
    }
}

impl MaParams {
    pub fn validate(&self) -> Result<(), String> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        let mut bad = Vec::new();
        if self.population_size < 2 {
            bad.push("population_size must be at least 2".to_string());
        }
        if !(self.selection_pressure > 1.0) {
            bad.push(format!(
                "selection_pressure {} must exceed 1",
                self.selection_pressure
            ));
        }
        for (name, v) in [
            ("elite_fraction", self.elite_fraction),
            ("crossover_p1_share", self.crossover_p1_share),
            ("crossover_fill_share", self.crossover_fill_share),
            ("level2_rank_fraction", self.level2_rank_fraction),
        ] {
            if !unit(v) {
                bad.push(format!("{name} {v} must lie in (0, 1)"));
            }
        }
        if !(self.duplicate_cost_epsilon >= 0.0) {
            bad.push("duplicate_cost_epsilon must be non-negative".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad.join("; "))
        }
    }

    fn elite_count(&self) -> usize {
        ((self.elite_fraction * self.population_size as f64).ceil() as usize)
            .clamp(1, self.population_size)
    }

    fn level2_rank(&self) -> usize {
        ((self.level2_rank_fraction * self.population_size as f64).ceil() as usize)
            .clamp(1, self.population_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxGenerations,
    Stagnation,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub level2_children: usize,
    pub duplicates_replaced: usize,
    pub operators: OperatorStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    /// Entry 0 describes the initial population.
    pub generations: Vec<GenerationStats>,
    pub termination: Termination,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Chromosome,
    pub tours: TourSet,
    pub history: RunHistory,
    pub wall_seconds: f64,
}

impl RunResult {
    /// Generations run after initialization.
    pub fn generations(&self) -> usize {
        self.history.generations.len() - 1
    }
}

fn same_cost(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps * a.abs().max(b.abs()).max(1.0)
}

fn summarize(
    pop: &[Chromosome],
    generation: usize,
    level2: usize,
    dups: usize,
    ops: OperatorStats,
) -> GenerationStats {
    GenerationStats {
        generation,
        best: pop[0].cost,
        mean: pop.iter().map(|c| c.cost).sum::<f64>() / pop.len() as f64,
        level2_children: level2,
        duplicates_replaced: dups,
        operators: ops,
    }
}

enum Offspring {
    Cross { a: usize, b: usize, seed: u64 },
    Immigrant { slot: usize, seed: u64 },
}

/// Replaces cost duplicates (after the first) with fresh immigrants; a few
/// rounds at most. Returns how many were replaced.
fn purge_duplicates(
    ev: &Evaluator,
    seeds: &VoronoiSeeds,
    params: &MaParams,
    pop: &mut Vec<Chromosome>,
    rng: &mut ChaCha8Rng,
    ops: &mut OperatorStats,
) -> usize {
    let mut replaced = 0;
    for _ in 0..3 {
        let mut dup_idx = Vec::new();
        for i in 1..pop.len() {
            if same_cost(pop[i].cost, pop[i - 1].cost, params.duplicate_cost_epsilon) {
                dup_idx.push(i);
            }
        }
        if dup_idx.is_empty() {
            break;
        }
        let jobs: Vec<(usize, u64)> = dup_idx.iter().map(|&i| (i, rng.gen())).collect();
        let fresh: Vec<(usize, Chromosome, OperatorStats)> = jobs
            .par_iter()
            .map(|&(i, seed)| {
                let (c, s) = immigrant(ev, seeds, params, i, seed);
                (i, c, s)
            })
            .collect();
        for (i, c, s) in fresh {
            pop[i] = c;
            ops.merge(&s);
        }
        replaced += dup_idx.len();
        pop.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    }
    replaced
}

/// Runs the memetic algorithm. Deterministic for a fixed `params.seed`
/// regardless of thread count.
pub fn run(roadmap: &Roadmap, params: &MaParams) -> Result<RunResult, DecodeError> {
    params.validate().map_err(DecodeError::Malformed)?;
    let start = Instant::now();
    let ev = Evaluator::new(roadmap);
    let seeds = VoronoiSeeds::new(&roadmap.instance);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_pop = params.population_size;

    let mut pop = init_population(&ev, params, &mut rng);
    let mut ops = OperatorStats::default();
    let dups = purge_duplicates(&ev, &seeds, params, &mut pop, &mut rng, &mut ops);
    let mut history = vec![summarize(&pop, 0, 0, dups, ops)];

    let elite = params.elite_count();
    let n_cross = ((n_pop - elite) as f64 * params.crossover_fill_share).round() as usize;
    let mut best_cost = pop[0].cost;
    let mut stagnant = 0usize;
    let mut termination = Termination::MaxGenerations;

    for generation in 1..=params.max_generations {
        if let Some(limit) = params.time_limit {
            if start.elapsed().as_secs_f64() >= limit {
                termination = Termination::TimeLimit;
                break;
            }
        }
        let threshold = pop[params.level2_rank() - 1].cost;
        let mut plan = Vec::with_capacity(n_pop - elite);
        for _ in 0..n_cross {
            let (a, b) = select(&pop, params.selection_pressure, &mut rng);
            plan.push(Offspring::Cross {
                a,
                b,
                seed: rng.gen(),
            });
        }
        for slot in n_cross..n_pop - elite {
            plan.push(Offspring::Immigrant {
                slot,
                seed: rng.gen(),
            });
        }

        let children: Vec<(Chromosome, OperatorStats, bool)> = plan
            .par_iter()
            .map(|job| match *job {
                Offspring::Cross { a, b, seed } => {
                    let mut crng = ChaCha8Rng::seed_from_u64(seed);
                    let mut child =
                        crossover(&pop[a], &pop[b], params.crossover_p1_share, &mut crng);
                    ev.refresh(&mut child);
                    let level = if child.cost <= threshold {
                        ImproveLevel::II
                    } else {
                        ImproveLevel::I
                    };
                    let stats = improve(&ev, &mut child, level, params, &mut crng);
                    (child, stats, level == ImproveLevel::II)
                }
                Offspring::Immigrant { slot, seed } => {
                    let (c, s) = immigrant(&ev, &seeds, params, slot, seed);
                    (c, s, false)
                }
            })
            .collect();

        let mut ops = OperatorStats::default();
        let mut level2 = 0;
        let mut next: Vec<Chromosome> = pop[..elite].to_vec();
        for (c, s, l2) in children {
            ops.merge(&s);
            level2 += l2 as usize;
            next.push(c);
        }
        next.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        let dups = purge_duplicates(&ev, &seeds, params, &mut next, &mut rng, &mut ops);
        pop = next;
        history.push(summarize(&pop, generation, level2, dups, ops));

        if pop[0].cost < best_cost {
            best_cost = pop[0].cost;
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= params.stagnation_limit {
                termination = Termination::Stagnation;
                break;
            }
        }
    }

    // Elites survive unchanged and duplicates are purged only after the
    // first copy, so the best cost never regresses.
    let best = pop[0].clone();
    let tours = ev.tours(&best)?;
    Ok(RunResult {
        best,
        tours,
        history: RunHistory {
            generations: history,
            termination,
        },
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
