//! Problem data: tasks, heterogeneous vehicles, objective weighting.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{Disk, Point2};
use crate::scalar::Scalar;

pub const DEFAULT_GRAVITY: f64 = 9.80;
pub const DEFAULT_LOAD_FACTOR: f64 = 4.0;
pub const DEFAULT_VELOCITY: f64 = 70.0;
pub const DEFAULT_SENSING_RANGE: f64 = 150.0;
pub const DEFAULT_SAMPLES: usize = 5;
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Depot locations used when none are given, in vehicle order.
pub const DEFAULT_DEPOTS: [[f64; 2]; 4] = [
    [110.0, 230.0],
    [1800.0, 2100.0],
    [200.0, 1500.0],
    [1700.0, 1000.0],
];

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("turn radius undefined: load factor {0} must exceed 1")]
    LoadFactorDomain(f64),
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// Minimum turning radius of a coordinated level turn: `v² / (g·sqrt(l² − 1))`.
pub fn turn_radius<S: Scalar>(velocity: S, load_factor: S, gravity: S) -> Result<S, InstanceError> {
    if load_factor <= S::one() {
        return Err(InstanceError::LoadFactorDomain(
            load_factor.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(velocity * velocity / (gravity * (load_factor * load_factor - S::one()).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMetric {
    #[default]
    Length,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    /// 1-based identifier.
    pub id: usize,
    pub center: Point2<f64>,
    /// Nominal neighborhood radius; each vehicle uses its own sensing range.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    /// 1-based identifier.
    pub id: usize,
    pub velocity: f64,
    pub load_factor: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    pub depot: Point2<f64>,
    pub terminal: Point2<f64>,
    pub sensing_range: f64,
}

fn default_gravity() -> f64 {
    DEFAULT_GRAVITY
}

impl VehicleSpec {
    pub fn r_min(&self) -> f64 {
        turn_radius(self.velocity, self.load_factor, self.gravity).unwrap_or(f64::NAN)
    }

    /// The vehicle's view of a task neighborhood.
    pub fn neighborhood(&self, task: &Task) -> Disk<f64> {
        Disk {
            center: task.center,
            radius: self.sensing_range,
        }
    }

    /// Converts a path length into this vehicle's edge cost.
    pub fn cost_of_length(&self, length: f64, metric: CostMetric) -> f64 {
        match metric {
            CostMetric::Length => length,
            CostMetric::Time => length / self.velocity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub tasks: Vec<Task>,
    pub vehicles: Vec<VehicleSpec>,
    pub alpha: f64,
    #[serde(default)]
    pub cost_metric: CostMetric,
    pub samples_per_cluster: usize,
    pub seed: u64,
    #[serde(default = "yes")]
    pub nin_enabled: bool,
}

fn yes() -> bool {
    true
}

impl Instance {
    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn n_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    /// Every violated invariant, empty when valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.tasks.is_empty() {
            v.push("at least one task is required".to_string());
        }
        if self.vehicles.is_empty() {
            v.push("at least one vehicle is required".to_string());
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            v.push(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if self.samples_per_cluster == 0 {
            v.push("samples_per_cluster must be at least 1".to_string());
        }
        for (i, t) in self.tasks.iter().enumerate() {
            if t.id != i + 1 {
                v.push(format!(
                    "task at position {} has id {} (ids must be 1..n in order)",
                    i + 1,
                    t.id
                ));
            }
            if !(t.radius > 0.0) {
                v.push(format!(
                    "task {} radius {} must be positive",
                    t.id, t.radius
                ));
            }
        }
        for (i, k) in self.vehicles.iter().enumerate() {
            if k.id != i + 1 {
                v.push(format!(
                    "vehicle at position {} has id {} (ids must be 1..m in order)",
                    i + 1,
                    k.id
                ));
            }
            if !(k.velocity > 0.0) {
                v.push(format!(
                    "vehicle {} velocity {} must be positive",
                    k.id, k.velocity
                ));
            }
            if !(k.load_factor > 1.0) {
                v.push(format!(
                    "vehicle {} load factor {} must exceed 1",
                    k.id, k.load_factor
                ));
            }
            if !(k.gravity > 0.0) {
                v.push(format!(
                    "vehicle {} gravity {} must be positive",
                    k.id, k.gravity
                ));
            }
            if !(k.sensing_range > 0.0) {
                v.push(format!(
                    "vehicle {} sensing range {} must be positive",
                    k.id, k.sensing_range
                ));
            }
            if k.velocity > 0.0 && k.load_factor > 1.0 && k.gravity > 0.0 && !(k.r_min() > 1e-9) {
                v.push(format!("vehicle {} turning radius is degenerate", k.id));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(InstanceError::Invalid(v))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, crate::Error> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    /// Short content hash of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("instance serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Knobs for [`build_instance`]. Per-vehicle lists of length one are
/// broadcast to every vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceParams {
    pub vehicles: usize,
    pub samples_per_cluster: usize,
    pub velocities: Vec<f64>,
    pub sensing_ranges: Vec<f64>,
    pub load_factor: f64,
    pub gravity: f64,
    pub alpha: f64,
    pub cost_metric: CostMetric,
    pub nin_enabled: bool,
    /// Overrides [`DEFAULT_DEPOTS`].
    pub depots: Option<Vec<Point2<f64>>>,
    /// Defaults to the depots.
    pub terminals: Option<Vec<Point2<f64>>>,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            vehicles: 1,
            samples_per_cluster: DEFAULT_SAMPLES,
            velocities: vec![DEFAULT_VELOCITY],
            sensing_ranges: vec![DEFAULT_SENSING_RANGE],
            load_factor: DEFAULT_LOAD_FACTOR,
            gravity: DEFAULT_GRAVITY,
            alpha: DEFAULT_ALPHA,
            cost_metric: CostMetric::Length,
            nin_enabled: true,
            depots: None,
            terminals: None,
        }
    }
}

fn per_vehicle(values: &[f64], k: usize, name: &str, errors: &mut Vec<String>) -> f64 {
    match values.len() {
        0 => {
            errors.push(format!("no {name} given"));
            f64::NAN
        }
        1 => values[0],
        _ => values.get(k).copied().unwrap_or_else(|| {
            errors.push(format!(
                "{name} list has {} entries but vehicle {} needs one",
                values.len(),
                k + 1
            ));
            f64::NAN
        }),
    }
}

/// Assembles and validates an instance from task centers and parameters.
pub fn build_instance(
    params: &InstanceParams,
    task_centers: &[Point2<f64>],
    seed: u64,
) -> Result<Instance, InstanceError> {
    let mut errors = Vec::new();
    let base_range = params
        .sensing_ranges
        .first()
        .copied()
        .unwrap_or(DEFAULT_SENSING_RANGE);
    let tasks = task_centers
        .iter()
        .enumerate()
        .map(|(i, &center)| Task {
            id: i + 1,
            center,
            radius: base_range,
        })
        .collect();

    let depots: Vec<Point2<f64>> = match &params.depots {
        Some(d) => d.clone(),
        None => DEFAULT_DEPOTS.iter().map(|&p| p.into()).collect(),
    };
    let mut vehicles = Vec::with_capacity(params.vehicles);
    for k in 0..params.vehicles {
        let Some(&depot) = depots.get(k) else {
            errors.push(format!(
                "vehicle {} has no depot ({} available)",
                k + 1,
                depots.len()
            ));
            continue;
        };
        let terminal = match &params.terminals {
            Some(t) => match t.get(k) {
                Some(&p) => p,
                None => {
                    errors.push(format!("vehicle {} has no terminal", k + 1));
                    depot
                }
            },
            None => depot,
        };
        vehicles.push(VehicleSpec {
            id: k + 1,
            velocity: per_vehicle(&params.velocities, k, "velocity", &mut errors),
            load_factor: params.load_factor,
            gravity: params.gravity,
            depot,
            terminal,
            sensing_range: per_vehicle(&params.sensing_ranges, k, "sensing range", &mut errors),
        });
    }
    let inst = Instance {
        tasks,
        vehicles,
        alpha: params.alpha,
        cost_metric: params.cost_metric,
        samples_per_cluster: params.samples_per_cluster,
        seed,
        nin_enabled: params.nin_enabled,
    };
    errors.extend(inst.violations());
    if errors.is_empty() {
        Ok(inst)
    } else {
        Err(InstanceError::Invalid(errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsplib::{load_tsplib, BAYS29};

    #[test]
    fn table_turn_radii() {
        for (v, r) in [(50.0, 65.9), (60.0, 94.8), (70.0, 129.1)] {
            let got = turn_radius::<f64>(v, 4.0, 9.80).unwrap();
            assert!((got - r).abs() <= 0.05, "{v}: {got}");
        }
    }

    #[test]
    fn turn_radius_domain() {
        assert!(matches!(
            turn_radius(50.0, 1.0, 9.8),
            Err(InstanceError::LoadFactorDomain(_))
        ));
        assert!(turn_radius(50.0f32, 4.0, 9.8).unwrap() > 65.0);
    }

    #[test]
    fn turn_radius_monotone() {
        let r = |v: f64, l: f64| turn_radius(v, l, 9.8).unwrap();
        assert!(r(50.0, 4.0) < r(60.0, 4.0));
        assert!(r(50.0, 3.0) > r(50.0, 4.0));
    }

    #[test]
    fn default_single_vehicle() {
        let pts = load_tsplib(BAYS29).unwrap();
        let inst = build_instance(&InstanceParams::default(), &pts, 7).unwrap();
        assert_eq!(inst.n_tasks(), 29);
        assert_eq!(inst.n_vehicles(), 1);
        assert_eq!(inst.vehicles[0].depot, Point2::new(110.0, 230.0));
        assert_eq!(inst.vehicles[0].terminal, inst.vehicles[0].depot);
    }

    #[test]
    fn four_vehicles_use_table_depots() {
        let pts = load_tsplib(BAYS29).unwrap();
        let params = InstanceParams {
            vehicles: 4,
            ..Default::default()
        };
        let inst = build_instance(&params, &pts, 1).unwrap();
        let got: Vec<[f64; 2]> = inst.vehicles.iter().map(|v| v.depot.into()).collect();
        assert_eq!(got, DEFAULT_DEPOTS.to_vec());
        // Depot and terminal clusters per vehicle graph view.
        assert_eq!(inst.n_tasks() + 2 * inst.n_vehicles(), 37);
    }

    #[test]
    fn validation_lists_every_problem() {
        let params = InstanceParams {
            vehicles: 5,
            alpha: 1.5,
            load_factor: 0.5,
            ..Default::default()
        };
        let err = build_instance(&params, &[], 0).unwrap_err();
        let InstanceError::Invalid(list) = err else {
            panic!()
        };
        assert!(list.iter().any(|e| e.contains("depot")));
        assert!(list.iter().any(|e| e.contains("alpha")));
        assert!(list.iter().any(|e| e.contains("load factor")));
        assert!(list.iter().any(|e| e.contains("task")));
    }

    #[test]
    fn deterministic_and_round_trips() {
        let pts = load_tsplib(BAYS29).unwrap();
        let a = build_instance(&InstanceParams::default(), &pts, 3).unwrap();
        let b = build_instance(&InstanceParams::default(), &pts, 3).unwrap();
        assert_eq!(a, b);
        let json = a.to_json();
        let back = Instance::from_json(&json).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json(), json);
        assert_eq!(a.fingerprint(), back.fingerprint());
    }

    #[test]
    fn r_min_matches_formula() {
        let pts = load_tsplib(BAYS29).unwrap();
        let params = InstanceParams {
            vehicles: 3,
            velocities: vec![50.0, 60.0, 70.0],
            ..Default::default()
        };
        let inst = build_instance(&params, &pts, 0).unwrap();
        for v in &inst.vehicles {
            let expect =
                v.velocity * v.velocity / (v.gravity * (v.load_factor.powi(2) - 1.0).sqrt());
            assert!(((v.r_min() - expect) / expect).abs() < 1e-9);
        }
    }
}
