use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::memetic::TourSet;
use crate::roadmap::{Cluster, Roadmap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    /// Edge between two global node ids.
    X {
        from: usize,
        to: usize,
    },
    Y {
        node: usize,
    },
    YNin {
        task: usize,
        node: usize,
    },
    /// Upper bound on every vehicle's cost.
    Z,
}

impl Var {
    pub fn name(&self) -> String {
        match *self {
            Var::X { from, to } => format!("x_{from}_{to}"),
            Var::Y { node } => format!("y_{node}"),
            Var::YNin { task, node } => format!("yn_{task}_{node}"),
            Var::Z => "z".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// `(variable index, coefficient)`.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub vars: Vec<Var>,
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<Row>,
    index: HashMap<Var, usize>,
}

/// 0/1 (or continuous for `z`) values indexed like `MilpModel::vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub values: Vec<f64>,
}

impl MilpModel {
    fn new() -> Self {
        Self {
            vars: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn add_var(&mut self, v: Var) -> usize {
        let i = self.vars.len();
        self.vars.push(v);
        self.index.insert(v, i);
        i
    }

    pub fn var(&self, v: Var) -> Option<usize> {
        self.index.get(&v).copied()
    }

    fn push_row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row {
            name,
            terms,
            sense,
            rhs,
        });
    }

    pub fn count(&self, pred: impl Fn(&Var) -> bool) -> usize {
        self.vars.iter().filter(|v| pred(v)).count()
    }

    /// Adds one `Σ crossing x ≥ 2·y_s` row for every node of each subtour.
    pub fn add_subtour_cuts(&mut self, roadmap: &Roadmap, subtours: &[Vec<usize>]) -> Vec<Row> {
        let mut added = Vec::new();
        for (c, cycle) in subtours.iter().enumerate() {
            let inside: std::collections::HashSet<usize> = cycle.iter().copied().collect();
            let k = roadmap.nodes[cycle[0]].vehicle;
            let mut crossing = Vec::new();
            for (from, to, _) in roadmap.edges(k) {
                if inside.contains(&from) != inside.contains(&to) {
                    crossing.push((self.var(Var::X { from, to }).expect("edge variable"), 1.0));
                }
            }
            for &s in cycle {
                let mut terms = crossing.clone();
                terms.push((self.var(Var::Y { node: s }).expect("node variable"), -2.0));
                let row = Row {
                    name: format!("cut_{}_{c}_{s}", self.rows.len()),
                    terms,
                    sense: Sense::Ge,
                    rhs: 0.0,
                };
                added.push(row.clone());
                self.rows.push(row);
            }
        }
        added
    }

    fn lhs(&self, row: &Row, a: &Assignment) -> f64 {
        row.terms.iter().map(|&(i, c)| c * a.values[i]).sum()
    }

    /// Names of the rows the assignment violates (absolute tolerance `tol`).
    pub fn check(&self, a: &Assignment, tol: f64) -> Vec<String> {
        self.rows
            .iter()
            .filter(|row| {
                let lhs = self.lhs(row, a);
                match row.sense {
                    Sense::Le => lhs > row.rhs + tol,
                    Sense::Ge => lhs < row.rhs - tol,
                    Sense::Eq => (lhs - row.rhs).abs() > tol,
                }
            })
            .map(|row| row.name.clone())
            .collect()
    }

    pub fn objective_value(&self, a: &Assignment) -> f64 {
        self.objective.iter().map(|&(i, c)| c * a.values[i]).sum()
    }

    /// The assignment induced by a tour set: its edges and nodes, NIN
    /// variables bound to their nodes and `z` at the largest tour cost.
    pub fn assignment_for(&self, roadmap: &Roadmap, tours: &TourSet) -> Assignment {
        let mut values = vec![0.0; self.vars.len()];
        for tour in &tours.tours {
            for &s in tour {
                values[self.var(Var::Y { node: s }).expect("node variable")] = 1.0;
                for &t in roadmap.nin_tasks(s) {
                    if let Some(i) = self.var(Var::YNin { task: t, node: s }) {
                        values[i] = 1.0;
                    }
                }
            }
            for w in tour.windows(2) {
                values[self
                    .var(Var::X {
                        from: w[0],
                        to: w[1],
                    })
                    .expect("edge variable")] = 1.0;
            }
        }
        values[self.var(Var::Z).expect("z")] = tours.max_cost();
        Assignment { values }
    }

    /// LP-format text: objective, constraints, bounds, binaries.
    pub fn to_lp(&self) -> String {
        let mut out = String::from("\\ GHMDATSP model\nMinimize\n obj:");
        write_terms(&mut out, &self.vars, &self.objective);
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            write_terms(&mut out, &self.vars, &row.terms);
            let _ = writeln!(out, " {} {}", row.sense.symbol(), fmt_num(row.rhs));
        }
        out.push_str("Bounds\n z >= 0\nBinaries\n");
        for v in self.vars.iter().filter(|v| **v != Var::Z) {
            let _ = writeln!(out, " {}", v.name());
        }
        out.push_str("End\n");
        out
    }
}

/// LP text rows for a list of cuts, one per line.
pub fn rows_to_lp(vars: &[Var], rows: &[Row]) -> String {
    let mut out = String::new();
    for row in rows {
        let _ = write!(out, "{}:", row.name);
        write_terms(&mut out, vars, &row.terms);
        let _ = writeln!(out, " {} {}", row.sense.symbol(), fmt_num(row.rhs));
    }
    out
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn write_terms(out: &mut String, vars: &[Var], terms: &[(usize, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0");
    }
    for &(i, c) in terms {
        let sign = if c < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", fmt_num(c.abs()), vars[i].name());
    }
}

/// Builds the model for `roadmap` with objective coefficient `alpha`.
/// Subtour elimination rows are left out; see [`MilpModel::add_subtour_cuts`].
pub fn export_milp(roadmap: &Roadmap, alpha: f64) -> MilpModel {
    let mut model = MilpModel::new();
    let m = roadmap.n_vehicles();

    // y variables come first, so y_s has index s.
    for s in 0..roadmap.nodes.len() {
        model.add_var(Var::Y { node: s });
    }
    let mut edges_per_vehicle = Vec::with_capacity(m);
    for k in 0..m {
        let mut edges = Vec::new();
        for (from, to, c) in roadmap.edges(k) {
            edges.push((model.add_var(Var::X { from, to }), from, to, c));
        }
        edges_per_vehicle.push(edges);
    }
    for t in 0..roadmap.n_tasks() {
        for &s in roadmap.nin_nodes(t) {
            model.add_var(Var::YNin { task: t, node: s });
        }
    }
    let z = model.add_var(Var::Z);

    // Objective: α/m Σ cost·x + (1 − α) z.
    for edges in &edges_per_vehicle {
        for &(i, _, _, c) in edges {
            model.objective.push((i, alpha * c / m as f64));
        }
    }
    if 1.0 - alpha != 0.0 {
        model.objective.push((z, 1.0 - alpha));
    }

    // z ≥ Cost_k.
    for (k, edges) in edges_per_vehicle.iter().enumerate() {
        let mut terms = vec![(z, 1.0)];
        terms.extend(edges.iter().map(|&(i, _, _, c)| (i, -c)));
        model.push_row(format!("max_{k}"), terms, Sense::Ge, 0.0);
    }

    // NIN binding and coverage.
    for t in 0..roadmap.n_tasks() {
        for &s in roadmap.nin_nodes(t) {
            let yn = model
                .var(Var::YNin { task: t, node: s })
                .expect("registered");
            model.push_row(
                format!("nin_{t}_{s}"),
                vec![(yn, 1.0), (s, -1.0)],
                Sense::Eq,
                0.0,
            );
        }
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for k in 0..m {
            terms.extend(roadmap.cluster_nodes(k, t).map(|s| (s, 1.0)));
        }
        for &s in roadmap.nin_nodes(t) {
            terms.push((
                model
                    .var(Var::YNin { task: t, node: s })
                    .expect("registered"),
                1.0,
            ));
        }
        model.push_row(format!("cover_{t}"), terms, Sense::Ge, 1.0);
    }

    // One depot and one terminal node per vehicle.
    for k in 0..m {
        let e = roadmap.endpoint_samples;
        let depots = (0..e).map(|i| (roadmap.depot_node(k, i), 1.0)).collect();
        model.push_row(format!("depot_{k}"), depots, Sense::Eq, 1.0);
        let terminals = (0..e).map(|i| (roadmap.terminal_node(k, i), 1.0)).collect();
        model.push_row(format!("terminal_{k}"), terminals, Sense::Eq, 1.0);
    }

    // Degree rows in split form.
    let mut out_edges = vec![Vec::new(); roadmap.nodes.len()];
    let mut in_edges = vec![Vec::new(); roadmap.nodes.len()];
    for edges in &edges_per_vehicle {
        for &(i, from, to, _) in edges {
            out_edges[from].push((i, 1.0));
            in_edges[to].push((i, 1.0));
        }
    }
    for (s, node) in roadmap.nodes.iter().enumerate() {
        let with_y = |mut terms: Vec<(usize, f64)>| {
            terms.push((s, -1.0));
            terms
        };
        match node.cluster {
            Cluster::Depot => model.push_row(
                format!("out_{s}"),
                with_y(out_edges[s].clone()),
                Sense::Eq,
                0.0,
            ),
            Cluster::Terminal => model.push_row(
                format!("in_{s}"),
                with_y(in_edges[s].clone()),
                Sense::Eq,
                0.0,
            ),
            Cluster::Task(_) => {
                model.push_row(
                    format!("in_{s}"),
                    with_y(in_edges[s].clone()),
                    Sense::Eq,
                    0.0,
                );
                model.push_row(
                    format!("out_{s}"),
                    with_y(out_edges[s].clone()),
                    Sense::Eq,
                    0.0,
                );
            }
        }
    }
    model
}
