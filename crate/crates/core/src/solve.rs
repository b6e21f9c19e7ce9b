//! End-to-end solving used by the command line and the benchmark harness.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::exact::{solve_bruteforce, BruteLimits};
use crate::memetic::{run, MaParams, RunResult, Termination, TourSet};
use crate::refine::{build_chain, refine, ChainBuild, MissedEntry, RefineOutcome, RefineParams};
use crate::{Error, Instance, Roadmap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MA-noNIN")]
    MaNoNin,
    #[serde(rename = "MA-NIN")]
    MaNin,
    #[serde(rename = "MA-NIN-PR")]
    MaNinPr,
    #[serde(rename = "ORACLE")]
    Oracle,
    #[serde(rename = "MILP-EXPORT")]
    MilpExport,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::MaNoNin => "MA-noNIN",
            Method::MaNin => "MA-NIN",
            Method::MaNinPr => "MA-NIN-PR",
            Method::Oracle => "ORACLE",
            Method::MilpExport => "MILP-EXPORT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Method::MaNoNin,
            Method::MaNin,
            Method::MaNinPr,
            Method::Oracle,
            Method::MilpExport,
        ]
        .into_iter()
        .find(|m| m.tag().eq_ignore_ascii_case(s))
    }
}

/// Memetic search result with optional refinement.
#[derive(Debug, Clone)]
pub struct MaSolution {
    pub run: RunResult,
    pub refined: Option<(ChainBuild, RefineOutcome)>,
}

impl MaSolution {
    pub fn objective(&self) -> f64 {
        self.refined
            .as_ref()
            .map_or(self.run.tours.objective, |(_, r)| r.objective)
    }

    pub fn per_vehicle_cost(&self) -> &[f64] {
        self.refined
            .as_ref()
            .map_or(&self.run.tours.per_vehicle_cost, |(_, r)| {
                &r.per_vehicle_cost
            })
    }
}

/// Runs the memetic algorithm on `roadmap` and, if asked, refines the
/// result. NIN claims the densified path never realizes get a projected
/// entry state rather than an error.
pub fn solve_ma(
    roadmap: &Roadmap,
    params: &MaParams,
    refine_params: Option<&RefineParams>,
) -> Result<MaSolution, Error> {
    let result = run(roadmap, params)?;
    let refined = match refine_params {
        Some(rp) => {
            let build = build_chain(&result.tours, roadmap, MissedEntry::Project)?;
            let outcome = refine(
                &roadmap.instance,
                build.chains.clone(),
                &result.tours.per_vehicle_cost,
                rp,
            );
            Some((build, outcome))
        }
        None => None,
    };
    Ok(MaSolution {
        run: result,
        refined,
    })
}

/// The instance as the given method sees it: `MA-noNIN` switches NIN off.
pub fn instance_for(instance: &Instance, method: Method) -> Instance {
    let mut inst = instance.clone();
    if method == Method::MaNoNin {
        inst.nin_enabled = false;
    }
    inst
}

/// One solve outcome in a uniform shape.
#[derive(Debug, Clone)]
pub struct Solved {
    pub tours: TourSet,
    pub objective: f64,
    pub per_vehicle_cost: Vec<f64>,
    pub wall_seconds: f64,
    pub generations: Option<usize>,
    pub termination: Option<Termination>,
    pub ma: Option<MaSolution>,
}

/// Solves `instance` with an optimizing method (not `MILP-EXPORT`).
pub fn solve(
    instance: &Instance,
    method: Method,
    ma: &MaParams,
    rp: &RefineParams,
) -> Result<(Roadmap, Solved), Error> {
    let start = Instant::now();
    let inst = instance_for(instance, method);
    let roadmap = Roadmap::build(&inst);
    let solved = match method {
        Method::Oracle => {
            let tours = solve_bruteforce(&roadmap, inst.alpha, BruteLimits::default())?;
            Solved {
                objective: tours.objective,
                per_vehicle_cost: tours.per_vehicle_cost.clone(),
                tours,
                wall_seconds: start.elapsed().as_secs_f64(),
                generations: None,
                termination: None,
                ma: None,
            }
        }
        Method::MilpExport => return Err(Error::Other("MILP-EXPORT does not solve".into())),
        _ => {
            let sol = solve_ma(&roadmap, ma, (method == Method::MaNinPr).then_some(rp))?;
            Solved {
                tours: sol.run.tours.clone(),
                objective: sol.objective(),
                per_vehicle_cost: sol.per_vehicle_cost().to_vec(),
                wall_seconds: start.elapsed().as_secs_f64(),
                generations: Some(sol.run.generations()),
                termination: Some(sol.run.history.termination),
                ma: Some(sol),
            }
        }
    };
    Ok((roadmap, solved))
}
