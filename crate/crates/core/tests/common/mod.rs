//! Builders and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

pub mod cases;
pub mod fixtures;

use std::f64::consts::TAU;

use ghmdatsp::geometry::Point2;
use ghmdatsp::instance::{CostMetric, Task};
use ghmdatsp::roadmap::{Cluster, NinTables, SampleNode};
use ghmdatsp::{Config, Instance, Roadmap, VehicleSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn p(x: f64, y: f64) -> Point2<f64> {
    Point2::new(x, y)
}

pub fn vehicle(
    id: usize,
    velocity: f64,
    range: f64,
    depot: Point2<f64>,
    terminal: Point2<f64>,
) -> VehicleSpec {
    VehicleSpec {
        id,
        velocity,
        load_factor: 4.0,
        gravity: 9.80,
        depot,
        terminal,
        sensing_range: range,
    }
}

pub fn instance(
    centers: &[Point2<f64>],
    vehicles: Vec<VehicleSpec>,
    samples: usize,
    alpha: f64,
    seed: u64,
) -> Instance {
    Instance {
        tasks: centers
            .iter()
            .enumerate()
            .map(|(i, &c)| Task {
                id: i + 1,
                center: c,
                radius: vehicles[0].sensing_range,
            })
            .collect(),
        vehicles,
        alpha,
        cost_metric: CostMetric::Length,
        samples_per_cluster: samples,
        seed,
        nin_enabled: true,
    }
}

/// Nodes in the standard layout with `e` depot/terminal samples. `pose`
/// maps (vehicle, cluster, sample index) to a configuration.
pub fn layout_nodes(
    inst: &Instance,
    e: usize,
    pose: impl Fn(usize, Cluster, usize) -> Config,
) -> Vec<SampleNode> {
    let mut nodes = Vec::new();
    for k in 0..inst.n_vehicles() {
        let mut push = |cluster, i| {
            let id = nodes.len();
            nodes.push(SampleNode {
                id,
                vehicle: k,
                cluster,
                index_in_cluster: i,
                config: pose(k, cluster, i),
            });
        };
        for i in 0..e {
            push(Cluster::Depot, i);
        }
        for i in 0..e {
            push(Cluster::Terminal, i);
        }
        for t in 0..inst.n_tasks() {
            for i in 0..inst.samples_per_cluster {
                push(Cluster::Task(t), i);
            }
        }
    }
    nodes
}

/// Roadmap over the instance's sampled nodes with synthetic NIN sets.
/// `nin(global node id)` gives `T^NIN` for each node.
pub fn with_nin(
    inst: &Instance,
    nodes: Vec<SampleNode>,
    nin: impl Fn(usize) -> Vec<usize>,
) -> Roadmap {
    let sets = (0..nodes.len()).map(nin).collect();
    Roadmap::from_parts(inst, nodes, NinTables::from_node_sets(inst.n_tasks(), sets))
}

/// Seeded tiny instance: `n` tasks in a 1 km square, `m` vehicles.
pub fn tiny_instance(seed: u64, n: usize, m: usize, samples: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<_> = (0..n)
        .map(|_| p(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0)))
        .collect();
    let vehicles = (0..m)
        .map(|k| {
            let d = p(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
            vehicle(k + 1, 50.0 + 10.0 * k as f64, 150.0, d, d)
        })
        .collect();
    instance(&centers, vehicles, samples, 0.5, seed)
}

pub fn random_pose<R: Rng>(rng: &mut R, extent: f64) -> Config {
    Config::new(
        rng.gen_range(-extent..extent),
        rng.gen_range(-extent..extent),
        rng.gen_range(0.0..TAU),
    )
}

// ---------------------------------------------------------------------------
// Dubins reference: search over the first switching time.

fn wrap(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

fn left_center(c: (f64, f64, f64), r: f64) -> (f64, f64) {
    (c.0 - r * c.2.sin(), c.1 + r * c.2.cos())
}

fn right_center(c: (f64, f64, f64), r: f64) -> (f64, f64) {
    (c.0 + r * c.2.sin(), c.1 - r * c.2.cos())
}

/// Pose after turning through `angle` radians (`turn` = +1 left, −1 right).
fn turn(c: (f64, f64, f64), angle: f64, r: f64, dir: f64) -> (f64, f64, f64) {
    let center = if dir > 0.0 {
        left_center(c, r)
    } else {
        right_center(c, r)
    };
    let th = c.2 + dir * angle;
    // Position relative to the center rotates with the heading.
    let (ox, oy) = (c.0 - center.0, c.1 - center.1);
    let (s, co) = (dir * angle).sin_cos();
    (center.0 + ox * co - oy * s, center.1 + ox * s + oy * co, th)
}

fn arc(from: f64, to: f64, dir: f64) -> f64 {
    if dir > 0.0 {
        wrap(to - from)
    } else {
        wrap(from - to)
    }
}

/// For a first-arc angle `a`, the residual whose zero makes the rest of a
/// CSC word feasible, with the total length at that `a`.
fn csc(
    start: (f64, f64, f64),
    goal: (f64, f64, f64),
    r: f64,
    d1: f64,
    d3: f64,
    a: f64,
) -> (f64, Option<f64>) {
    let q = turn(start, a, r, d1);
    let cg = if d3 > 0.0 {
        left_center(goal, r)
    } else {
        right_center(goal, r)
    };
    let (ux, uy) = (q.2.cos(), q.2.sin());
    let (dx, dy) = (cg.0 - q.0, cg.1 - q.1);
    let lateral = -uy * dx + ux * dy;
    let along = ux * dx + uy * dy;
    let f = lateral - d3 * r;
    let len = (along >= 0.0).then(|| r * a + along + r * arc(q.2, goal.2, d3));
    (f, len)
}

fn ccc(
    start: (f64, f64, f64),
    goal: (f64, f64, f64),
    r: f64,
    d1: f64,
    a: f64,
) -> (f64, Option<f64>) {
    let q = turn(start, a, r, d1);
    // Middle circle turns the other way.
    let cm = if d1 > 0.0 {
        right_center(q, r)
    } else {
        left_center(q, r)
    };
    let cg = if d1 > 0.0 {
        left_center(goal, r)
    } else {
        right_center(goal, r)
    };
    let dist = (cg.0 - cm.0).hypot(cg.1 - cm.1);
    let f = dist - 2.0 * r;
    let tp = ((cm.0 + cg.0) / 2.0, (cm.1 + cg.1) / 2.0);
    let phi = (tp.1 - cm.1).atan2(tp.0 - cm.0);
    // Heading on a circle: left turns run counter-clockwise.
    let heading = if d1 > 0.0 {
        phi - std::f64::consts::FRAC_PI_2
    } else {
        phi + std::f64::consts::FRAC_PI_2
    };
    let len = r * a + r * arc(q.2, heading, -d1) + r * arc(heading, goal.2, d1);
    (f, Some(len))
}

/// Shortest Dubins length found by scanning the first arc angle on a grid
/// and bisecting every sign change of the word's feasibility residual.
pub fn dubins_reference(start: Config, goal: Config, r: f64) -> f64 {
    let (s, g) = (
        (start.x, start.y, start.theta),
        (goal.x, goal.y, goal.theta),
    );
    let steps = 2000;
    let mut best = f64::INFINITY;
    type Word<'a> = Box<dyn Fn(f64) -> (f64, Option<f64>) + 'a>;
    let words: Vec<Word> = vec![
        Box::new(|a| csc(s, g, r, 1.0, 1.0, a)),
        Box::new(|a| csc(s, g, r, 1.0, -1.0, a)),
        Box::new(|a| csc(s, g, r, -1.0, 1.0, a)),
        Box::new(|a| csc(s, g, r, -1.0, -1.0, a)),
        Box::new(|a| ccc(s, g, r, 1.0, a)),
        Box::new(|a| ccc(s, g, r, -1.0, a)),
    ];
    for w in &words {
        let mut prev = (0.0, w(0.0).0);
        if prev.1 == 0.0 {
            if let Some(l) = w(0.0).1 {
                best = best.min(l);
            }
        }
        for i in 1..=steps {
            let a = TAU * i as f64 / steps as f64;
            let f = w(a).0;
            if prev.1.signum() != f.signum() {
                let (mut lo, mut hi, mut flo) = (prev.0, a, prev.1);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = w(mid).0;
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                if let Some(l) = w(0.5 * (lo + hi)).1 {
                    best = best.min(l);
                }
            }
            prev = (a, f);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// NIN reference.

/// The closed disk meets a circle of radius `r` around `c` exactly when the
/// disk center's distance to `c` lies in `[r − R, r + R]`; squared form.
pub fn circle_meets_disk(c: (f64, f64), r: f64, center: (f64, f64), radius: f64) -> bool {
    let d2 = (c.0 - center.0).powi(2) + (c.1 - center.1).powi(2);
    let hi = (r + radius).powi(2);
    let lo = if radius >= r {
        0.0
    } else {
        (r - radius).powi(2)
    };
    d2 <= hi && d2 >= lo
}

pub fn nin_reference(c: Config, r: f64, center: (f64, f64), radius: f64) -> bool {
    let pose = (c.x, c.y, c.theta);
    circle_meets_disk(left_center(pose, r), r, center, radius)
        && circle_meets_disk(right_center(pose, r), r, center, radius)
}

// ---------------------------------------------------------------------------
// Exhaustive reference for small instances, written independently of the
// library oracle: enumerates per-vehicle ordered subsets directly.

fn ordered_subsets(
    items: &[usize],
    out: &mut Vec<Vec<usize>>,
    cur: &mut Vec<usize>,
    used: &mut Vec<bool>,
) {
    out.push(cur.clone());
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i]);
            ordered_subsets(items, out, cur, used);
            cur.pop();
            used[i] = false;
        }
    }
}

/// Optimal objective by enumerating, for every vehicle, each sequence of
/// distinct task nodes (at most one per cluster), then all combinations.
pub fn reference_optimum(rm: &Roadmap) -> f64 {
    let m = rm.n_vehicles();
    let n = rm.n_tasks();
    let mut per_vehicle: Vec<Vec<(Vec<usize>, f64, u64)>> = Vec::new();
    for k in 0..m {
        let all: Vec<usize> = (0..n).flat_map(|t| rm.cluster_nodes(k, t)).collect();
        let mut seqs = Vec::new();
        ordered_subsets(
            &all,
            &mut seqs,
            &mut Vec::new(),
            &mut vec![false; all.len()],
        );
        let mut opts = Vec::new();
        for seq in seqs {
            let mut mask = 0u64;
            let mut ok = true;
            for &s in &seq {
                let Cluster::Task(t) = rm.nodes[s].cluster else {
                    unreachable!()
                };
                if mask & (1 << t) != 0 {
                    ok = false;
                    break;
                }
                mask |= 1 << t;
            }
            if !ok {
                continue;
            }
            let mut cover = mask;
            for &s in &seq {
                for &u in rm.nin_tasks(s) {
                    cover |= 1 << u;
                }
            }
            let mut best = f64::INFINITY;
            for d in 0..rm.endpoint_samples {
                for e in 0..rm.endpoint_samples {
                    let mut path = vec![rm.depot_node(k, d)];
                    path.extend(&seq);
                    path.push(rm.terminal_node(k, e));
                    best = best.min(path.windows(2).map(|w| rm.cost(w[0], w[1])).sum());
                }
            }
            opts.push((seq, best, cover));
        }
        per_vehicle.push(opts);
    }
    let full = (1u64 << n) - 1;
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; m];
    loop {
        let mut cover = 0;
        let mut costs = Vec::with_capacity(m);
        let mut used = 0u64;
        let mut clash = false;
        for k in 0..m {
            let (seq, c, cv) = &per_vehicle[k][idx[k]];
            for &s in seq {
                if let Cluster::Task(t) = rm.nodes[s].cluster {
                    clash |= used & (1 << t) != 0;
                    used |= 1 << t;
                }
            }
            cover |= cv;
            costs.push(*c);
        }
        if !clash && cover == full {
            let sum: f64 = costs.iter().sum();
            let max = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let obj = rm.instance.alpha * sum / m as f64 + (1.0 - rm.instance.alpha) * max;
            best = best.min(obj);
        }
        let mut k = 0;
        loop {
            if k == m {
                return best;
            }
            idx[k] += 1;
            if idx[k] < per_vehicle[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
