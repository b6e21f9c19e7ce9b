//! Hand-built roadmaps for the worked examples.

use ghmdatsp::memetic::{Chromosome, EndpointSamples, Gene};
use ghmdatsp::roadmap::Cluster;
use ghmdatsp::{Config, Roadmap};

use super::{instance, layout_nodes, p, vehicle, with_nin};

pub fn t(c: usize, s: usize) -> Gene {
    Gene::Task {
        cluster: c - 1,
        sample: s - 1,
    }
}
pub fn d(depot: usize, terminal: usize) -> Gene {
    Gene::Delimiter {
        payload: Some(EndpointSamples {
            depot: depot - 1,
            terminal: terminal - 1,
        }),
    }
}
pub const E: Gene = Gene::Delimiter { payload: None };

/// Two vehicles, five tasks, three samples per cluster including the depot
/// and terminal clusters. Tasks lie on a line, far enough apart that no NIN
/// relation exists. Vehicle 1's depot sits past task 3 heading back, so
/// visiting tasks 3, 2, 1 is a straight run.
pub fn worked_roadmap() -> Roadmap {
    let centers: Vec<_> = (0..5).map(|i| p(1000.0 * (i + 1) as f64, 0.0)).collect();
    let vehicles = vec![
        vehicle(1, 50.0, 150.0, p(4000.0, 0.0), p(0.0, 0.0)),
        vehicle(2, 50.0, 150.0, p(4000.0, 3000.0), p(6000.0, 3000.0)),
    ];
    let mut inst = instance(&centers, vehicles, 3, 0.5, 0);
    inst.nin_enabled = false;
    let pi = std::f64::consts::PI;
    let nodes = layout_nodes(&inst, 3, |k, c, i| {
        let v = &inst.vehicles[k];
        let dy = 20.0 * i as f64;
        match c {
            Cluster::Depot => Config::new(v.depot.x, v.depot.y + dy, pi),
            Cluster::Terminal => Config::new(v.terminal.x, v.terminal.y + dy, pi),
            Cluster::Task(t) => Config::new(1000.0 * (t + 1) as f64, dy, pi),
        }
    });
    Roadmap::from_nodes(&inst, nodes)
}

pub fn worked() -> Chromosome {
    Chromosome::new(vec![
        d(1, 3),
        t(1, 1),
        t(2, 3),
        t(3, 3),
        E,
        d(2, 1),
        t(4, 2),
        t(5, 1),
    ])
}

/// `(cluster, sample)` pairs of one decoded tour, 1-based, with `0` for
/// depot and `usize::MAX` for terminal clusters.
pub fn labels(rm: &Roadmap, tour: &[usize]) -> Vec<(usize, usize)> {
    tour.iter()
        .map(|&s| {
            let n = &rm.nodes[s];
            let c = match n.cluster {
                Cluster::Depot => 0,
                Cluster::Terminal => usize::MAX,
                Cluster::Task(t) => t + 1,
            };
            (c, n.index_in_cluster + 1)
        })
        .collect()
}

pub const D_: usize = 0;
pub const T_: usize = usize::MAX;

/// Deletion-order example: one sample per cluster and NIN sets chosen so
/// that `V_{1,1}` crosses tasks 2 and 3, `V_{2,1}` task 1,
/// `V_{3,1}` task 2, `V_{4,1}` task 5 and `V_{5,1}` nothing.
pub fn deletion_example() -> Roadmap {
    let centers: Vec<_> = (0..5).map(|i| p(400.0 * i as f64, 0.0)).collect();
    let vehicles = vec![
        vehicle(1, 50.0, 150.0, p(0.0, -300.0), p(800.0, -300.0)),
        vehicle(2, 50.0, 150.0, p(1200.0, 300.0), p(1600.0, 300.0)),
    ];
    let inst = instance(&centers, vehicles, 1, 0.5, 0);
    let nodes = layout_nodes(&inst, 1, |k, c, _| match c {
        Cluster::Depot => Config::at(inst.vehicles[k].depot, 0.0),
        Cluster::Terminal => Config::at(inst.vehicles[k].terminal, 0.0),
        Cluster::Task(t) => Config::new(400.0 * t as f64, 0.0, 0.0),
    });
    let per = 2 + 5;
    let sets: [&[usize]; 5] = [&[1, 2], &[0], &[1], &[4], &[]];
    with_nin(&inst, nodes, |s| {
        if s % per >= 2 {
            sets[s % per - 2].to_vec()
        } else {
            Vec::new()
        }
    })
}

/// NIN example: `s1`, `s2` on the boundary of task 1's disk,
/// heading toward its center; `t2` sits where both nodes' turning circles
/// reach it, `t3` only where `s1`'s do.
pub fn nin_example() -> Roadmap {
    let centers = [p(0.0, 0.0), p(-100.0, -100.0), p(-300.0, 0.0)];
    let inst = instance(
        &centers,
        vec![vehicle(
            1,
            50.0,
            150.0,
            p(1000.0, 1000.0),
            p(1000.0, 1000.0),
        )],
        2,
        0.5,
        0,
    );
    let nodes = layout_nodes(&inst, 1, |_, c, i| match (c, i) {
        (Cluster::Task(0), 0) => Config::new(-150.0, 0.0, 0.0),
        (Cluster::Task(0), _) => Config::new(0.0, -150.0, std::f64::consts::FRAC_PI_2),
        (Cluster::Task(1), 0) => Config::new(0.0, -180.0, 0.0),
        (Cluster::Task(1), _) => Config::new(-50.0, -150.0, 0.0),
        (Cluster::Task(_), _) => Config::new(-350.0, 0.0, std::f64::consts::PI),
        _ => Config::new(1000.0, 1000.0, 0.0),
    });
    Roadmap::from_nodes(&inst, nodes)
}
