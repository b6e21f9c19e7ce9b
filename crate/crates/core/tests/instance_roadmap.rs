mod common;

use common::fixtures::nin_example;
use common::{instance, layout_nodes, p, vehicle};
use ghmdatsp::instance::{build_instance, turn_radius, CostMetric, InstanceParams, DEFAULT_DEPOTS};
use ghmdatsp::roadmap::{generate_samples, Cluster};
use ghmdatsp::tsplib::{load_tsplib, TsplibError, BAYS29};
use ghmdatsp::{Config, Instance, Roadmap};
use proptest::prelude::*;

#[test]
fn turn_radius_table() {
    for (v, want) in [(50.0, 65.9), (60.0, 94.8), (70.0, 129.1)] {
        let r: f64 = turn_radius(v, 4.0, 9.80).unwrap();
        assert!((r - want).abs() <= 0.05, "{v}: {r}");
    }
    assert!(turn_radius(50.0, 1.0, 9.8).is_err());
}

#[test]
fn tsplib_examples() {
    assert_eq!(load_tsplib(BAYS29).unwrap().len(), 29);
    assert_eq!(
        load_tsplib("DIMENSION: 0\nNODE_COORD_SECTION\nEOF\n").unwrap(),
        vec![]
    );
    let mut short = String::from("DIMENSION: 29\nNODE_COORD_SECTION\n");
    for i in 0..28 {
        short.push_str(&format!("{} {} {}\n", i + 1, i, i));
    }
    assert_eq!(
        load_tsplib(&short),
        Err(TsplibError::DimensionMismatch {
            expected: 29,
            found: 28
        })
    );
    assert!(matches!(
        load_tsplib("NODE_COORD_SECTION\n1 2 x\n"),
        Err(TsplibError::Parse { line: 2, .. })
    ));
}

fn bays(m: usize, seed: u64) -> Instance {
    let params = InstanceParams {
        vehicles: m,
        ..InstanceParams::default()
    };
    build_instance(&params, &load_tsplib(BAYS29).unwrap(), seed).unwrap()
}

#[test]
fn build_instance_examples() {
    let one = bays(1, 3);
    assert_eq!(
        (one.n_tasks(), one.n_vehicles(), one.samples_per_cluster),
        (29, 1, 5)
    );
    assert_eq!(one.vehicles[0].depot, p(110.0, 230.0));
    let four = bays(4, 3);
    for (v, d) in four.vehicles.iter().zip(DEFAULT_DEPOTS) {
        assert_eq!(v.depot, p(d[0], d[1]));
    }
    assert_eq!(four, bays(4, 3));
    let rm = Roadmap::build(&four);
    // 29 task clusters plus depot and terminal per vehicle.
    assert_eq!(rm.per_vehicle(), 29 * 5 + 2);
    assert_eq!(rm.nodes.len(), 588);
    assert_eq!(Roadmap::build(&one).nodes.len(), 147);
}

#[test]
fn json_round_trip_is_exact() {
    let inst = bays(4, 9);
    let text = inst.to_json();
    let back = Instance::from_json(&text).unwrap();
    assert_eq!(back, inst);
    assert_eq!(back.to_json(), text);
}

#[test]
fn sampling_is_deterministic() {
    let inst = bays(2, 5);
    assert_eq!(generate_samples(&inst, 1), generate_samples(&inst, 1));
    assert_ne!(generate_samples(&inst, 1), generate_samples(&inst, 2));
}

#[test]
fn samples_lie_in_neighborhoods() {
    let inst = bays(2, 5);
    for n in generate_samples(&inst, 5) {
        let veh = &inst.vehicles[n.vehicle];
        match n.cluster {
            Cluster::Task(t) => assert!(veh
                .neighborhood(&inst.tasks[t])
                .contains(n.config.position(), 1e-9)),
            Cluster::Depot => assert_eq!(n.config.position(), veh.depot),
            Cluster::Terminal => assert_eq!(n.config.position(), veh.terminal),
        }
    }
}

#[test]
fn cost_matrix_examples() {
    let mut inst = instance(
        &[p(0.0, 0.0), p(500.0, 0.0)],
        vec![vehicle(1, 70.0, 150.0, p(-1000.0, 0.0), p(1000.0, 0.0))],
        1,
        0.5,
        0,
    );
    inst.nin_enabled = false;
    let nodes = layout_nodes(&inst, 1, |_, c, _| match c {
        Cluster::Task(t) => Config::new(500.0 * t as f64, 0.0, 0.0),
        Cluster::Depot => Config::new(-1000.0, 0.0, 0.0),
        Cluster::Terminal => Config::new(1000.0, 0.0, 0.0),
    });
    let rm = Roadmap::from_nodes(&inst, nodes.clone());
    let (a, b) = (rm.task_node(0, 0, 0), rm.task_node(0, 1, 0));
    assert!((rm.cost(a, b) - 500.0).abs() < 1e-9);
    assert!(!rm.has_edge(a, a));
    inst.cost_metric = CostMetric::Time;
    let rm = Roadmap::from_nodes(&inst, nodes);
    assert!((rm.cost(a, b) - 500.0 / 70.0).abs() < 1e-9);
}

#[test]
fn edge_topology() {
    let inst = instance(
        &[p(0.0, 0.0), p(500.0, 0.0)],
        vec![vehicle(1, 70.0, 150.0, p(0.0, 0.0), p(0.0, 0.0))],
        1,
        0.5,
        0,
    );
    let rm = Roadmap::build(&inst);
    let (d, t) = (rm.depot_node(0, 0), rm.terminal_node(0, 0));
    let (a, b) = (rm.task_node(0, 0, 0), rm.task_node(0, 1, 0));
    // Depot only leaves, terminal only receives.
    for s in [a, b, t] {
        assert!(!rm.has_edge(s, d));
        assert!(rm.has_edge(d, s));
    }
    for s in [a, b] {
        assert!(!rm.has_edge(t, s));
        assert!(rm.has_edge(s, t));
    }
    assert_eq!(rm.edges(0).count(), 7);
}

#[test]
fn nin_example_sets() {
    let rm = nin_example();
    let (s1, s2) = (rm.task_node(0, 0, 0), rm.task_node(0, 0, 1));
    assert_eq!(rm.nin_tasks(s1), &[1, 2]);
    assert_eq!(rm.nin_tasks(s2), &[1]);
    assert!(rm.nin_nodes(1).contains(&s1) && rm.nin_nodes(1).contains(&s2));
    assert_eq!(rm.nin_nodes(2), &[s1]);
}

#[test]
fn separated_tasks_have_no_nin() {
    let centers: Vec<_> = (0..5).map(|i| p(5000.0 * i as f64, 0.0)).collect();
    let inst = instance(
        &centers,
        vec![vehicle(1, 70.0, 150.0, p(0.0, 0.0), p(0.0, 0.0))],
        3,
        0.5,
        4,
    );
    let rm = Roadmap::build(&inst);
    assert!(rm.nin.is_empty());
}

#[test]
fn roadmap_dump_has_checksum() {
    let rm = nin_example();
    let dump = serde_json::to_value(rm.dump()).unwrap();
    assert_eq!(dump["cost_checksum"].as_str().unwrap(), rm.cost_checksum());
    assert_eq!(dump["nodes"].as_array().unwrap().len(), rm.nodes.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nin_tables_are_symmetric(seed in 0u64..1000) {
        let inst = common::tiny_instance(seed, 6, 2, 3);
        let rm = Roadmap::build(&inst);
        for s in 0..rm.nodes.len() {
            for &t in rm.nin_tasks(s) {
                prop_assert!(rm.nin_nodes(t).contains(&s));
                prop_assert_ne!(rm.nodes[s].cluster, Cluster::Task(t));
            }
        }
        for t in 0..rm.n_tasks() {
            for &s in rm.nin_nodes(t) {
                prop_assert!(rm.nin_tasks(s).contains(&t));
            }
        }
    }

    #[test]
    fn r_min_matches_formula(v in 10.0..120.0f64, n in 1.1..8.0f64) {
        let r: f64 = turn_radius(v, n, 9.80).unwrap();
        let want = v * v / (9.80 * (n * n - 1.0).sqrt());
        prop_assert!((r - want).abs() <= 1e-9 * want);
        prop_assert!(turn_radius(v + 1.0, n, 9.80).unwrap() > r);
        prop_assert!(turn_radius(v, n + 0.5, 9.80).unwrap() < r);
    }
}
