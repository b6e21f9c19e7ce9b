use std::collections::{BTreeMap, BTreeSet};

use super::ExactError;
use crate::memetic::TourSet;
use crate::roadmap::{Cluster, Roadmap};

/// An integral candidate: selected nodes (`y = 1`) and edges (`x = 1`).
/// NIN variables follow their nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegralSolution {
    pub nodes: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl IntegralSolution {
    pub fn from_tours(tours: &TourSet) -> Self {
        let mut sol = Self::default();
        for tour in &tours.tours {
            sol.nodes.extend(tour.iter().copied());
            sol.edges.extend(tour.windows(2).map(|w| (w[0], w[1])));
        }
        sol
    }

    /// Adds a directed cycle through the given nodes.
    pub fn add_cycle(&mut self, cycle: &[usize]) {
        self.nodes.extend(cycle.iter().copied());
        for i in 0..cycle.len() {
            self.edges.insert((cycle[i], cycle[(i + 1) % cycle.len()]));
        }
    }
}

/// Separation for integral candidates. Walks each vehicle from its selected
/// depot node to a terminal, removing directly and NIN-visited tasks from
/// the unvisited set. If tasks remain, returns every closed cycle of the
/// selected edges that passes through a remaining task, either through a
/// node of its cluster or through a node whose NIN set contains it. Each
/// cycle starts at its smallest node id; cycles are sorted.
pub fn find_subtours(
    sol: &IntegralSolution,
    roadmap: &Roadmap,
) -> Result<Vec<Vec<usize>>, ExactError> {
    let bad = |m: String| Err(ExactError::Malformed(m));
    let mut succ: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &sol.edges {
        if succ.insert(a, b).is_some() {
            return bad(format!("node {a} has two successors"));
        }
    }

    let mut unvisited: BTreeSet<usize> = (0..roadmap.n_tasks()).collect();
    let mut on_chain = BTreeSet::new();
    for k in 0..roadmap.n_vehicles() {
        let depots: Vec<usize> = (0..roadmap.endpoint_samples)
            .map(|i| roadmap.depot_node(k, i))
            .filter(|s| sol.nodes.contains(s))
            .collect();
        let [s1] = depots[..] else {
            return bad(format!("vehicle {k} selects {} depot nodes", depots.len()));
        };
        on_chain.insert(s1);
        let mut cur = s1;
        loop {
            let Some(&s2) = succ.get(&cur) else {
                return bad(format!("walk of vehicle {k} stops at node {cur}"));
            };
            if !on_chain.insert(s2) {
                return bad(format!("walk of vehicle {k} revisits node {s2}"));
            }
            match roadmap.nodes[s2].cluster {
                Cluster::Terminal => break,
                Cluster::Depot => {
                    return bad(format!("walk of vehicle {k} enters depot node {s2}"))
                }
                Cluster::Task(t) => {
                    unvisited.remove(&t);
                    for u in roadmap.nin_tasks(s2) {
                        unvisited.remove(u);
                    }
                }
            }
            cur = s2;
        }
    }
    if unvisited.is_empty() {
        return Ok(Vec::new());
    }

    let touches = |s: usize| match roadmap.nodes[s].cluster {
        Cluster::Task(t) => {
            unvisited.contains(&t) || roadmap.nin_tasks(s).iter().any(|u| unvisited.contains(u))
        }
        _ => false,
    };
    let mut seen = on_chain;
    let mut cycles = Vec::new();
    for &start in succ.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut path = vec![start];
        let mut cur = start;
        let closed = loop {
            match succ.get(&cur) {
                Some(&nx) if nx == start => break true,
                Some(&nx) if !seen.contains(&nx) && !path.contains(&nx) => {
                    path.push(nx);
                    cur = nx;
                }
                _ => break false,
            }
        };
        seen.extend(path.iter().copied());
        if closed && path.iter().any(|&s| touches(s)) {
            let min_pos = path
                .iter()
                .enumerate()
                .min_by_key(|(_, &s)| s)
                .map(|(i, _)| i)
                .unwrap_or(0);
            path.rotate_left(min_pos);
            cycles.push(path);
        }
    }
    cycles.sort();
    Ok(cycles)
}
