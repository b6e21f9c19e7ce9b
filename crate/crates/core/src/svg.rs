//! SVG plot of a tour file: task disks, endpoints and densified paths.
//!
//! World coordinates map one-to-one to user units with `y` flipped so the
//! picture is y-up.

use std::fmt::Write as _;

use crate::geometry::{dubins_shortest_path, sample_path};
use crate::report::TourFile;
use crate::roadmap::Cluster;
use crate::{Config, Instance};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Densified pose sequence of every vehicle, depot first, terminal last.
pub fn vehicle_paths(instance: &Instance, tours: &TourFile) -> Vec<Vec<Config>> {
    tours
        .vehicles
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let r = instance.vehicles[k].r_min();
            let spacing = r / 10.0;
            match &v.refined_chain {
                Some(rc) => rc.chain.trajectory(spacing),
                None => {
                    let mut out = vec![v.nodes[0].config];
                    for w in v.nodes.windows(2) {
                        let path = dubins_shortest_path(w[0].config, w[1].config, r);
                        out.extend(sample_path(&path, spacing).into_iter().skip(1));
                    }
                    out
                }
            }
        })
        .collect()
}

struct Bounds {
    min: (f64, f64),
    max: (f64, f64),
}

impl Bounds {
    fn new() -> Self {
        Self {
            min: (f64::INFINITY, f64::INFINITY),
            max: (f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn add(&mut self, x: f64, y: f64, pad: f64) {
        self.min = (self.min.0.min(x - pad), self.min.1.min(y - pad));
        self.max = (self.max.0.max(x + pad), self.max.1.max(y + pad));
    }
}

/// Renders the plot. Tasks visited at one of their samples are filled;
/// tasks covered only through a crossing neighborhood get just a border.
pub fn render(instance: &Instance, tours: &TourFile) -> String {
    let paths = vehicle_paths(instance, tours);
    let n = instance.n_tasks();
    let mut owner = vec![None; n];
    for (k, v) in tours.vehicles.iter().enumerate() {
        let direct_tasks = v.nodes.iter().filter_map(|nd| match nd.cluster {
            Cluster::Task(t) => Some(t),
            _ => None,
        });
        let chain_tasks = v.refined_chain.iter().flat_map(|rc| rc.chain.task_order());
        for t in direct_tasks.chain(chain_tasks) {
            owner[t].get_or_insert(k);
        }
    }
    let direct: Vec<bool> = (0..n)
        .map(|t| {
            tours
                .vehicles
                .iter()
                .any(|v| v.nodes.iter().any(|nd| nd.cluster == Cluster::Task(t)))
        })
        .collect();
    let radius = |t: usize| instance.vehicles[owner[t].unwrap_or(0)].sensing_range;

    let mut b = Bounds::new();
    for (t, task) in instance.tasks.iter().enumerate() {
        b.add(task.center.x, task.center.y, radius(t));
    }
    for v in &instance.vehicles {
        b.add(v.depot.x, v.depot.y, 0.0);
        b.add(v.terminal.x, v.terminal.y, 0.0);
    }
    for c in paths.iter().flatten() {
        b.add(c.x, c.y, 0.0);
    }
    let (w, h) = ((b.max.0 - b.min.0).max(1.0), (b.max.1 - b.min.1).max(1.0));
    let margin = 0.05 * w.max(h);
    let (vx, vy) = (b.min.0 - margin, -b.max.1 - margin);
    let (vw, vh) = (w + 2.0 * margin, h + 2.0 * margin);
    let stroke = 0.002 * vw.max(vh);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.3} {vy:.3} {vw:.3} {vh:.3}" width="{:.0}" height="{:.0}">"#,
        800.0,
        800.0 * vh / vw
    );
    let _ = writeln!(
        s,
        r##"<g id="tasks" stroke="#555" stroke-width="{stroke:.3}">"##
    );
    for (t, task) in instance.tasks.iter().enumerate() {
        let fill = if direct[t] {
            r##"fill="#bbb" fill-opacity="0.5""##
        } else {
            r#"fill="none""#
        };
        let _ = writeln!(
            s,
            r#"<circle class="task{}" cx="{:.3}" cy="{:.3}" r="{:.3}" {fill}/>"#,
            if direct[t] { "" } else { " nin" },
            task.center.x,
            -task.center.y,
            radius(t)
        );
    }
    s.push_str("</g>\n<g id=\"paths\" fill=\"none\">\n");
    for (k, path) in paths.iter().enumerate() {
        let pts: Vec<String> = path
            .iter()
            .map(|c| format!("{:.3},{:.3}", c.x, -c.y))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline id="vehicle{k}" stroke="{}" stroke-width="{:.3}" points="{}"/>"#,
            PALETTE[k % PALETTE.len()],
            2.0 * stroke,
            pts.join(" ")
        );
    }
    s.push_str("</g>\n<g id=\"endpoints\">\n");
    for (k, v) in instance.vehicles.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let size = 6.0 * stroke;
        let _ = writeln!(
            s,
            r#"<rect class="depot" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}"/>"#,
            v.depot.x - size,
            -v.depot.y - size,
            2.0 * size,
            2.0 * size
        );
        let _ = writeln!(
            s,
            r#"<circle class="terminal" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="white" stroke="{color}" stroke-width="{stroke:.3}"/>"#,
            v.terminal.x, -v.terminal.y, size
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
