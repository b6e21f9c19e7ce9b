//! Sampled roadmap: per-vehicle sample nodes, asymmetric Dubins edge costs
//! and the necessarily-intersecting-neighborhood (NIN) tables.
//!
//! Node layout per vehicle `k` (local indices): `e` depot nodes, `e`
//! terminal nodes, then `samples_per_cluster` nodes for every task in task
//! order. Sampled roadmaps use `e = 1`. Global ids are `offset(k) + local`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{dubins_length, nin_check};
use crate::instance::{CostMetric, Instance};
use crate::{Config, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cluster {
    Depot,
    Terminal,
    /// 0-based task index.
    Task(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleNode {
    pub id: usize,
    /// 0-based vehicle index.
    pub vehicle: usize,
    pub cluster: Cluster,
    pub index_in_cluster: usize,
    pub config: Config,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NinTables {
    /// `S^NIN_t`: global node ids that necessarily cross task `t`.
    pub task_to_nodes: Vec<Vec<usize>>,
    /// `T^NIN_s`: tasks necessarily crossed when visiting node `s`, sorted.
    pub node_to_tasks: Vec<Vec<usize>>,
}

impl NinTables {
    pub fn empty(n_tasks: usize, n_nodes: usize) -> Self {
        Self {
            task_to_nodes: vec![Vec::new(); n_tasks],
            node_to_tasks: vec![Vec::new(); n_nodes],
        }
    }

    /// Builds `S^NIN` as the inverse image of `T^NIN`.
    pub fn from_node_sets(n_tasks: usize, node_to_tasks: Vec<Vec<usize>>) -> Self {
        let mut task_to_nodes = vec![Vec::new(); n_tasks];
        for (s, ts) in node_to_tasks.iter().enumerate() {
            for &t in ts {
                task_to_nodes[t].push(s);
            }
        }
        Self {
            task_to_nodes,
            node_to_tasks,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.node_to_tasks.iter().all(Vec::is_empty)
    }
}

/// Dense cost table for one vehicle over its local node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleCosts {
    pub offset: usize,
    pub len: usize,
    /// Row-major, `f64::INFINITY` where no edge exists.
    pub costs: Vec<f64>,
}

impl VehicleCosts {
    #[inline]
    pub fn get(&self, from_local: usize, to_local: usize) -> f64 {
        self.costs[from_local * self.len + to_local]
    }
}

/// Number of local nodes for one vehicle.
pub fn nodes_per_vehicle(n_tasks: usize, samples: usize, endpoint_samples: usize) -> usize {
    2 * endpoint_samples + n_tasks * samples
}

/// Whether the topology allows a directed edge between two nodes of one vehicle.
pub fn edge_allowed(from: Cluster, to: Cluster) -> bool {
    match (from, to) {
        (Cluster::Terminal, _) | (_, Cluster::Depot) => false,
        (Cluster::Depot, _) => true,
        (Cluster::Task(a), Cluster::Task(b)) => a != b,
        (Cluster::Task(_), Cluster::Terminal) => true,
    }
}

/// Uniform samples in each task neighborhood plus one depot and one terminal
/// node per vehicle, all with uniform random headings.
pub fn generate_samples(instance: &Instance, seed: u64) -> Vec<SampleNode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = instance.samples_per_cluster;
    let per = nodes_per_vehicle(instance.n_tasks(), s, 1);
    let mut nodes = Vec::with_capacity(per * instance.n_vehicles());
    let tau = std::f64::consts::TAU;
    for (k, veh) in instance.vehicles.iter().enumerate() {
        let offset = k * per;
        let heading = rng.gen_range(0.0..tau);
        nodes.push(SampleNode {
            id: offset,
            vehicle: k,
            cluster: Cluster::Depot,
            index_in_cluster: 0,
            config: Config::at(veh.depot, heading),
        });
        let heading = rng.gen_range(0.0..tau);
        nodes.push(SampleNode {
            id: offset + 1,
            vehicle: k,
            cluster: Cluster::Terminal,
            index_in_cluster: 0,
            config: Config::at(veh.terminal, heading),
        });
        for (t, task) in instance.tasks.iter().enumerate() {
            let disk = veh.neighborhood(task);
            for i in 0..s {
                let r = disk.radius * rng.gen::<f64>().sqrt();
                let a = rng.gen_range(0.0..tau);
                let heading = rng.gen_range(0.0..tau);
                let p = Point2::new(disk.center.x + r * a.cos(), disk.center.y + r * a.sin());
                nodes.push(SampleNode {
                    id: nodes.len(),
                    vehicle: k,
                    cluster: Cluster::Task(t),
                    index_in_cluster: i,
                    config: Config::at(p, heading),
                });
            }
        }
    }
    nodes
}

/// Dubins edge costs for every permitted ordered pair, one table per vehicle.
pub fn build_cost_matrix(nodes: &[SampleNode], instance: &Instance) -> Vec<VehicleCosts> {
    let per = nodes.len() / instance.n_vehicles().max(1);
    instance
        .vehicles
        .iter()
        .enumerate()
        .map(|(k, veh)| {
            let offset = k * per;
            let local = &nodes[offset..offset + per];
            let r = veh.r_min();
            let metric = instance.cost_metric;
            let costs: Vec<f64> = (0..per)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let a = &local[i];
                    local.iter().map(move |b| {
                        if a.id != b.id && edge_allowed(a.cluster, b.cluster) {
                            veh.cost_of_length(dubins_length(a.config, b.config, r), metric)
                        } else {
                            f64::INFINITY
                        }
                    })
                })
                .collect();
            VehicleCosts {
                offset,
                len: per,
                costs,
            }
        })
        .collect()
}

/// `T^NIN_s` for each task node and its inverse `S^NIN_t`, using the owning
/// vehicle's turning radius and sensing range.
pub fn build_nin_tables(nodes: &[SampleNode], instance: &Instance) -> NinTables {
    let node_to_tasks: Vec<Vec<usize>> = nodes
        .par_iter()
        .map(|node| {
            let Cluster::Task(own) = node.cluster else {
                return Vec::new();
            };
            let veh = &instance.vehicles[node.vehicle];
            let r = veh.r_min();
            instance
                .tasks
                .iter()
                .enumerate()
                .filter(|&(t, task)| t != own && nin_check(node.config, r, &veh.neighborhood(task)))
                .map(|(t, _)| t)
                .collect()
        })
        .collect();
    NinTables::from_node_sets(instance.n_tasks(), node_to_tasks)
}

#[derive(Debug, Clone)]
pub struct Roadmap {
    pub instance: Instance,
    /// Nodes per depot (and per terminal) cluster.
    pub endpoint_samples: usize,
    pub nodes: Vec<SampleNode>,
    pub costs: Vec<VehicleCosts>,
    pub nin: NinTables,
}

impl Roadmap {
    /// Samples, costs and (if enabled) NIN tables from the instance seed.
    pub fn build(instance: &Instance) -> Self {
        let nodes = generate_samples(instance, instance.seed);
        Self::from_nodes(instance, nodes)
    }

    /// Builds costs and NIN tables for explicitly given nodes, which must
    /// follow the standard layout.
    pub fn from_nodes(instance: &Instance, nodes: Vec<SampleNode>) -> Self {
        let nin = if instance.nin_enabled {
            build_nin_tables(&nodes, instance)
        } else {
            NinTables::empty(instance.n_tasks(), nodes.len())
        };
        Self::from_parts(instance, nodes, nin)
    }

    /// Like [`Roadmap::from_nodes`] but with caller-provided NIN tables.
    pub fn from_parts(instance: &Instance, nodes: Vec<SampleNode>, nin: NinTables) -> Self {
        let endpoint_samples = nodes
            .iter()
            .filter(|n| n.vehicle == 0 && n.cluster == Cluster::Depot)
            .count()
            .max(1);
        let per = nodes_per_vehicle(
            instance.n_tasks(),
            instance.samples_per_cluster,
            endpoint_samples,
        );
        assert_eq!(
            nodes.len(),
            per * instance.n_vehicles(),
            "node count does not match layout"
        );
        for (id, n) in nodes.iter().enumerate() {
            assert_eq!(n.id, id, "node ids must be dense");
            let local = id % per;
            let (cluster, index) = if local < endpoint_samples {
                (Cluster::Depot, local)
            } else if local < 2 * endpoint_samples {
                (Cluster::Terminal, local - endpoint_samples)
            } else {
                let t = local - 2 * endpoint_samples;
                (
                    Cluster::Task(t / instance.samples_per_cluster),
                    t % instance.samples_per_cluster,
                )
            };
            assert_eq!(
                (n.vehicle, n.cluster, n.index_in_cluster),
                (id / per, cluster, index),
                "node {id} breaks the layout"
            );
        }
        assert_eq!(nin.node_to_tasks.len(), nodes.len());
        let costs = build_cost_matrix(&nodes, instance);
        Self {
            instance: instance.clone(),
            endpoint_samples,
            nodes,
            costs,
            nin,
        }
    }

    pub fn n_tasks(&self) -> usize {
        self.instance.n_tasks()
    }

    pub fn n_vehicles(&self) -> usize {
        self.instance.n_vehicles()
    }

    pub fn samples(&self) -> usize {
        self.instance.samples_per_cluster
    }

    pub fn per_vehicle(&self) -> usize {
        nodes_per_vehicle(self.n_tasks(), self.samples(), self.endpoint_samples)
    }

    pub fn depot_node(&self, vehicle: usize, sample: usize) -> usize {
        vehicle * self.per_vehicle() + sample
    }

    pub fn terminal_node(&self, vehicle: usize, sample: usize) -> usize {
        vehicle * self.per_vehicle() + self.endpoint_samples + sample
    }

    pub fn task_node(&self, vehicle: usize, task: usize, sample: usize) -> usize {
        vehicle * self.per_vehicle() + 2 * self.endpoint_samples + task * self.samples() + sample
    }

    /// Nodes of vehicle `k` in cluster `t`.
    pub fn cluster_nodes(&self, vehicle: usize, task: usize) -> std::ops::Range<usize> {
        let first = self.task_node(vehicle, task, 0);
        first..first + self.samples()
    }

    /// Edge cost between two global nodes; infinite when no edge exists.
    #[inline]
    pub fn cost(&self, from: usize, to: usize) -> f64 {
        let k = self.nodes[from].vehicle;
        if self.nodes[to].vehicle != k {
            return f64::INFINITY;
        }
        let table = &self.costs[k];
        table.get(from - table.offset, to - table.offset)
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.cost(from, to).is_finite()
    }

    /// All permitted edges of one vehicle as `(from, to, cost)`.
    pub fn edges(&self, vehicle: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let table = &self.costs[vehicle];
        (0..table.len).flat_map(move |i| {
            (0..table.len).filter_map(move |j| {
                let c = table.get(i, j);
                c.is_finite()
                    .then_some((table.offset + i, table.offset + j, c))
            })
        })
    }

    pub fn nin_tasks(&self, node: usize) -> &[usize] {
        &self.nin.node_to_tasks[node]
    }

    pub fn nin_nodes(&self, task: usize) -> &[usize] {
        &self.nin.task_to_nodes[task]
    }

    pub fn metric(&self) -> CostMetric {
        self.instance.cost_metric
    }

    /// SHA-256 over the cost table bit patterns, hex encoded.
    pub fn cost_checksum(&self) -> String {
        let mut h = Sha256::new();
        for table in &self.costs {
            for c in &table.costs {
                h.update(c.to_bits().to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn dump(&self) -> RoadmapDump<'_> {
        RoadmapDump {
            nodes: &self.nodes,
            nin_task_to_nodes: &self.nin.task_to_nodes,
            nin_node_to_tasks: &self.nin.node_to_tasks,
            cost_checksum: self.cost_checksum(),
        }
    }
}

/// Debug view of a roadmap for JSON export.
#[derive(Debug, Serialize)]
pub struct RoadmapDump<'a> {
    pub nodes: &'a [SampleNode],
    pub nin_task_to_nodes: &'a [Vec<usize>],
    pub nin_node_to_tasks: &'a [Vec<usize>],
    pub cost_checksum: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_instance, InstanceParams};
    use crate::tsplib::{load_tsplib, BAYS29};

    fn bays(vehicles: usize, samples: usize) -> Instance {
        let pts = load_tsplib(BAYS29).unwrap();
        let params = InstanceParams {
            vehicles,
            samples_per_cluster: samples,
            ..Default::default()
        };
        build_instance(&params, &pts, 11).unwrap()
    }

    #[test]
    fn sample_counts() {
        assert_eq!(generate_samples(&bays(1, 5), 1).len(), 147);
        assert_eq!(generate_samples(&bays(4, 5), 1).len(), 588);
    }

    #[test]
    fn samples_deterministic_and_inside() {
        let inst = bays(2, 3);
        let a = generate_samples(&inst, 9);
        assert_eq!(a, generate_samples(&inst, 9));
        assert_ne!(a, generate_samples(&inst, 10));
        for n in &a {
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
    fn topology_rules() {
        let inst = bays(2, 2);
        let rm = Roadmap::build(&inst);
        let d0 = rm.depot_node(0, 0);
        let t0 = rm.terminal_node(0, 0);
        assert!(!rm.has_edge(d0, d0));
        assert!(rm.has_edge(d0, t0));
        assert!(!rm.has_edge(t0, d0));
        assert!(!rm.has_edge(t0, rm.task_node(0, 0, 0)));
        assert!(!rm.has_edge(rm.task_node(0, 0, 0), rm.task_node(0, 0, 1)));
        assert!(rm.has_edge(rm.task_node(0, 0, 0), rm.task_node(0, 1, 1)));
        assert!(!rm.has_edge(rm.task_node(0, 0, 0), rm.task_node(1, 1, 0)));
        assert!(!rm.has_edge(rm.task_node(0, 3, 0), d0));
        for (a, b, c) in rm.edges(1) {
            assert_eq!(rm.nodes[a].vehicle, 1);
            assert_eq!(rm.nodes[b].vehicle, 1);
            assert!(
                c >= rm.nodes[a]
                    .config
                    .position()
                    .distance(rm.nodes[b].config.position())
                    - 1e-9
            );
        }
    }

    #[test]
    fn time_metric_divides_by_velocity() {
        let mut inst = bays(1, 1);
        inst.tasks.truncate(2);
        inst.tasks[0].center = Point2::new(0.0, 0.0);
        inst.tasks[1].center = Point2::new(500.0, 0.0);
        let mut nodes = generate_samples(&inst, 0);
        nodes[2].config = Config::new(0.0, 0.0, 0.0);
        nodes[3].config = Config::new(500.0, 0.0, 0.0);
        let rm = Roadmap::from_nodes(&inst, nodes.clone());
        assert!((rm.cost(2, 3) - 500.0).abs() < 1e-9);
        inst.cost_metric = CostMetric::Time;
        let rm = Roadmap::from_nodes(&inst, nodes);
        assert!((rm.cost(2, 3) - 500.0 / 70.0).abs() < 1e-9);
    }

    #[test]
    fn nin_tables_are_consistent() {
        let rm = Roadmap::build(&bays(2, 5));
        let mut any = false;
        for (s, ts) in rm.nin.node_to_tasks.iter().enumerate() {
            for &t in ts {
                any = true;
                assert!(rm.nin_nodes(t).contains(&s));
                assert_ne!(rm.nodes[s].cluster, Cluster::Task(t));
            }
        }
        for (t, ss) in rm.nin.task_to_nodes.iter().enumerate() {
            for &s in ss {
                assert!(rm.nin_tasks(s).contains(&t));
            }
        }
        assert!(any, "bays29 at 150 m range should have some NIN pairs");
        assert!(rm.nin_tasks(rm.depot_node(0, 0)).is_empty());
    }

    #[test]
    fn far_tasks_have_no_nin() {
        let mut inst = bays(1, 3);
        for (i, t) in inst.tasks.iter_mut().enumerate() {
            t.center = Point2::new(10_000.0 * i as f64, 0.0);
        }
        let rm = Roadmap::build(&inst);
        assert!(rm.nin.is_empty());
    }

    #[test]
    fn disabled_nin_gives_empty_tables() {
        let mut inst = bays(1, 3);
        inst.nin_enabled = false;
        assert!(Roadmap::build(&inst).nin.is_empty());
    }

    #[test]
    fn costs_are_asymmetric() {
        let rm = Roadmap::build(&bays(1, 2));
        let a = rm.task_node(0, 0, 0);
        let b = rm.task_node(0, 1, 0);
        assert!((rm.cost(a, b) - rm.cost(b, a)).abs() > 1e-6);
    }
}
