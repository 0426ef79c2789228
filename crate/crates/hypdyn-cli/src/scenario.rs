//! Scenario JSON schema and task execution.
//!
//! A scenario is data: a space, a map on it, one task with its parameters,
//! and a seed. Flags exist only for output paths, seed override, filtering
//! and verbosity. Reports are JSON; orbit traces are CSV with the fixed
//! header `n,t,coord_0,coord_1,step,displacement,h_anchor_0,...`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hypdyn_core::backward::{
    backward_orbit_via_inverse, backward_orbit_via_solver, classify_backward_limit,
    equivalence_battery, step_profile, synthesize_backward_orbit, BackwardLimitReport,
    BackwardOrbit, BatteryParams, BatteryReport, StepProfile, SynthesizerConfig, SynthesizerState,
};
use hypdyn_core::dilation::{
    brfp_record, dilation_along_ray, BrfpRecord, DilationTable, RayDilation,
};
use hypdyn_core::forward::{classify, forward_orbit, ClassificationResult};
use hypdyn_core::horo::{verify_julia, HorofunctionHandle, JuliaMode, JuliaReport};
use hypdyn_core::metric::{estimate_delta, DeltaEstimate};
use hypdyn_core::trace::OrbitTrace;
use hypdyn_core::{BoundaryLabel, MapHandle, MapKind, ModelSpace, Point, SampleWindow};

use crate::RunFailure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitMethod {
    Inverse,
    Solver,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    Classify {
        seeds: Vec<[f64; 2]>,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        window: Option<WindowSpec>,
    },
    Dilation {
        label: BoundaryLabel,
        #[serde(default)]
        basepoint: Option<[f64; 2]>,
        #[serde(default)]
        t_max: Option<f64>,
    },
    StableDilation {
        label: BoundaryLabel,
        #[serde(default)]
        basepoint: Option<[f64; 2]>,
        #[serde(default)]
        n_max: Option<usize>,
        #[serde(default)]
        t_base: Option<f64>,
    },
    ForwardOrbit {
        x0: [f64; 2],
        n: usize,
        #[serde(default)]
        h_labels: Vec<BoundaryLabel>,
    },
    BackwardOrbit {
        x0: [f64; 2],
        n: usize,
        method: OrbitMethod,
        #[serde(default)]
        m_max: Option<usize>,
        #[serde(default)]
        h_labels: Vec<BoundaryLabel>,
    },
    Synthesize {
        label: BoundaryLabel,
        #[serde(default)]
        basepoint: Option<[f64; 2]>,
        #[serde(default)]
        depth: Option<usize>,
    },
    Battery {
        x0: [f64; 2],
        n: usize,
        method: OrbitMethod,
        #[serde(default)]
        basepoint: Option<[f64; 2]>,
        #[serde(default)]
        m_max: Option<usize>,
    },
    DeltaEstimate {
        n_samples: usize,
        #[serde(default)]
        window: Option<WindowSpec>,
    },
    JuliaVerify {
        label: BoundaryLabel,
        mode: JuliaMode,
        #[serde(default)]
        basepoint: Option<[f64; 2]>,
        #[serde(default)]
        samples: Option<usize>,
    },
    Reproduce {
        id: String,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl WindowSpec {
    fn to_window(self) -> SampleWindow {
        SampleWindow::new(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub space: ModelSpace,
    pub map: MapKind,
    pub task: TaskSpec,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, RunFailure> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| RunFailure::Config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), RunFailure> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let ok = match &self.task {
            TaskSpec::Classify { seeds, .. } => {
                !seeds.is_empty() && seeds.iter().all(|s| finite(s))
            }
            TaskSpec::ForwardOrbit { x0, n, .. } => finite(x0) && *n >= 1,
            TaskSpec::BackwardOrbit { x0, n, .. } => finite(x0) && *n >= 1,
            TaskSpec::Battery { x0, n, .. } => finite(x0) && *n >= 16,
            TaskSpec::DeltaEstimate { n_samples, .. } => *n_samples >= 1,
            TaskSpec::Dilation { t_max, .. } => t_max.map(|t| t.is_finite() && t >= 20.0) != Some(false),
            TaskSpec::StableDilation { n_max, .. } => n_max.map(|n| n >= 2) != Some(false),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(RunFailure::Config(
                "scenario parameter out of range (counts must be positive, numbers finite)".into(),
            ))
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskReport {
    Classify {
        classification: ClassificationResult,
    },
    Dilation {
        ray: RayDilation,
        brfp: BrfpRecord,
    },
    StableDilation {
        table: DilationTable,
        brfp: BrfpRecord,
    },
    ForwardOrbit {
        len: usize,
        stopped_early: bool,
        final_displacement: f64,
    },
    BackwardOrbit {
        len: usize,
        stopped_early: bool,
        max_residual: f64,
        profile: Option<StepProfile>,
        limit: Option<BackwardLimitReport>,
    },
    Synthesize {
        state: SynthesizerState,
        max_residual: f64,
    },
    Battery {
        report: BatteryReport,
    },
    DeltaEstimate {
        estimate: DeltaEstimate,
    },
    JuliaVerify {
        report: JuliaReport,
    },
    Reproduce {
        outcome: crate::registry::EntryOutcome,
    },
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub verification_pass: bool,
    pub result: TaskReport,
}

fn point_of(space: &ModelSpace, coords: [f64; 2]) -> Result<Point, RunFailure> {
    space
        .point(coords[0], coords[1])
        .map_err(|e| RunFailure::Config(e.to_string()))
}

fn default_basepoint(space: &ModelSpace) -> Point {
    match space {
        ModelSpace::RealLine => Point::real(0.0),
        ModelSpace::LogLine => Point::real(1.0),
        ModelSpace::PoincareDisc => space.point(0.0, 0.0).expect("origin"),
        ModelSpace::UpperHalfPlane => Point::new(0.0, 1.0),
        ModelSpace::SlitPlane => Point::new(1.0, 0.0),
        ModelSpace::L1Cylinder | ModelSpace::FlatCylinder => Point::new(0.0, 0.0),
        ModelSpace::HyperbolicPuncturedCylinder { .. } => Point::new(0.0, 1.0),
    }
}

fn write_orbit_csv(
    out_dir: Option<&Path>,
    space: &ModelSpace,
    trace: &OrbitTrace,
    basepoint: Point,
    h_labels: &[BoundaryLabel],
) -> Result<(), RunFailure> {
    let Some(dir) = out_dir else {
        return Ok(());
    };
    let mut anchors = Vec::new();
    for &label in h_labels {
        anchors.push(space.ray_toward(basepoint, label)?);
    }
    let mut h_values = Vec::new();
    for anchor in &anchors {
        let handle = HorofunctionHandle::new(anchor.clone(), basepoint);
        let col: hypdyn_core::Result<Vec<f64>> =
            trace.points.iter().map(|&q| handle.value(q)).collect();
        h_values.push(col?);
    }
    let anchor_refs: Vec<&hypdyn_core::BoundaryAnchor> = anchors.iter().collect();
    let csv = trace.to_csv(space, &anchor_refs, &h_values);
    fs::create_dir_all(dir).map_err(|e| RunFailure::Config(e.to_string()))?;
    fs::write(dir.join("trace.csv"), csv).map_err(|e| RunFailure::Config(e.to_string()))?;
    Ok(())
}

/// Executes one scenario, optionally writing `report.json` and trace CSVs
/// under `out_dir`.
pub fn execute(scenario: &Scenario, out_dir: Option<&Path>) -> Result<RunReport, RunFailure> {
    let space = scenario.space.clone();
    let map = MapHandle::new(space.clone(), scenario.map.clone())
        .map_err(|e| RunFailure::Config(e.to_string()))?;
    let seed = scenario.seed.unwrap_or(7);

    let (result, pass) = match &scenario.task {
        TaskSpec::Classify { seeds, n, window } => {
            let mut pts = Vec::new();
            for &s in seeds {
                pts.push(point_of(&space, s)?);
            }
            let window = window.map(|w| w.to_window()).unwrap_or_else(|| space.default_window());
            let classification = classify(&map, &pts, n.unwrap_or(500), &window)?;
            (TaskReport::Classify { classification }, true)
        }
        TaskSpec::Dilation {
            label,
            basepoint,
            t_max,
        } => {
            let p = match basepoint {
                Some(b) => point_of(&space, *b)?,
                None => default_basepoint(&space),
            };
            let anchor = space.ray_toward(p, *label)?;
            let ray = dilation_along_ray(&map, &anchor, 1, t_max.unwrap_or(40.0), 1e-6)?;
            let brfp = hypdyn_core::dilation::detect_brfp(&map, &anchor, 40.0)?;
            if let Some(dir) = out_dir {
                let mut rows = Vec::with_capacity(ray.trace.len());
                for &(t, g) in &ray.trace {
                    let gamma_t = anchor.point_at(t);
                    let disp = space.distance(gamma_t, map.apply(gamma_t)?)?;
                    rows.push((t, g, disp));
                }
                fs::create_dir_all(dir).map_err(|e| RunFailure::Config(e.to_string()))?;
                fs::write(dir.join("ray.csv"), hypdyn_core::trace::ray_trace_csv(&rows))
                    .map_err(|e| RunFailure::Config(e.to_string()))?;
            }
            (TaskReport::Dilation { ray, brfp }, true)
        }
        TaskSpec::StableDilation {
            label,
            basepoint,
            n_max,
            t_base,
        } => {
            let p = match basepoint {
                Some(b) => point_of(&space, *b)?,
                None => default_basepoint(&space),
            };
            let anchor = space.ray_toward(p, *label)?;
            let brfp = brfp_record(
                &map,
                &anchor,
                n_max.unwrap_or(hypdyn_core::dilation::DEFAULT_N_MAX),
                t_base.unwrap_or(40.0),
                None,
            )?;
            let table = brfp
                .dilation_table
                .clone()
                .ok_or_else(|| RunFailure::Verification("anchor is not a BRFP".into()))?;
            (TaskReport::StableDilation { table, brfp }, true)
        }
        TaskSpec::ForwardOrbit { x0, n, h_labels } => {
            let x0 = point_of(&space, *x0)?;
            let trace = forward_orbit(&map, x0, *n)?;
            write_orbit_csv(out_dir, &space, &trace, x0, h_labels)?;
            (
                TaskReport::ForwardOrbit {
                    len: trace.len(),
                    stopped_early: trace.stopped_early.is_some(),
                    final_displacement: *trace.displacement.last().unwrap(),
                },
                true,
            )
        }
        TaskSpec::BackwardOrbit {
            x0,
            n,
            method,
            m_max,
            h_labels,
        } => {
            let x0p = point_of(&space, *x0)?;
            let orbit = build_backward_orbit(&map, x0p, *n, *method)?;
            write_orbit_csv(out_dir, &space, &orbit.trace, x0p, h_labels)?;
            let m_max = m_max.unwrap_or(40).min((orbit.len().saturating_sub(1)) / 4);
            let (profile, limit) = if m_max >= 1 && orbit.trace.stopped_early.is_none() {
                let profile = step_profile(&map, &orbit, m_max)?;
                let class = classify(
                    &map,
                    &[default_basepoint(&space)],
                    500,
                    &space.default_window(),
                )?;
                let limit = classify_backward_limit(&map, &orbit, &profile, &class, None).ok();
                (Some(profile), limit)
            } else {
                (None, None)
            };
            (
                TaskReport::BackwardOrbit {
                    len: orbit.len(),
                    stopped_early: orbit.trace.stopped_early.is_some(),
                    max_residual: orbit.max_residual(),
                    profile,
                    limit,
                },
                true,
            )
        }
        TaskSpec::Synthesize {
            label,
            basepoint,
            depth,
        } => {
            let p = match basepoint {
                Some(b) => point_of(&space, *b)?,
                None => default_basepoint(&space),
            };
            let anchor = space.ray_toward(p, *label)?;
            let record = brfp_record(&map, &anchor, 16, 40.0, None)?;
            let config = SynthesizerConfig {
                depth: depth.unwrap_or(50),
                ..SynthesizerConfig::default()
            };
            let out = synthesize_backward_orbit(&map, p, &record, &config)?;
            (
                TaskReport::Synthesize {
                    max_residual: out.orbit.max_residual(),
                    state: out.state,
                },
                true,
            )
        }
        TaskSpec::Battery {
            x0,
            n,
            method,
            basepoint,
            m_max,
        } => {
            let x0p = point_of(&space, *x0)?;
            let orbit = build_backward_orbit(&map, x0p, *n, *method)?;
            let p = match basepoint {
                Some(b) => point_of(&space, *b)?,
                None => default_basepoint(&space),
            };
            let mut params = BatteryParams::new(p);
            if let Some(m) = m_max {
                params.m_max = *m;
            }
            let report = equivalence_battery(&map, &orbit, &params)?;
            let pass = report.unanimous.is_some();
            (TaskReport::Battery { report }, pass)
        }
        TaskSpec::DeltaEstimate { n_samples, window } => {
            let window = window.map(|w| w.to_window()).unwrap_or_else(|| space.default_window());
            let estimate = estimate_delta(&space, &window, *n_samples, seed)?;
            (TaskReport::DeltaEstimate { estimate }, true)
        }
        TaskSpec::JuliaVerify {
            label,
            mode,
            basepoint,
            samples,
        } => {
            let p = match basepoint {
                Some(b) => point_of(&space, *b)?,
                None => default_basepoint(&space),
            };
            let anchor = space.ray_toward(p, *label)?;
            let log_dilation = dilation_along_ray(&map, &anchor, 1, 40.0, 1e-6)?.value;
            let delta = match mode {
                JuliaMode::Delta => Some(estimate_delta(
                    &space,
                    &space.default_window(),
                    20000,
                    seed,
                )?),
                JuliaMode::Exact => None,
            };
            let report = verify_julia(
                &space,
                &map,
                &anchor,
                log_dilation,
                p,
                &space.default_window(),
                samples.unwrap_or(1000),
                *mode,
                delta.as_ref(),
                seed,
            )?;
            let pass = report.pass;
            (TaskReport::JuliaVerify { report }, pass)
        }
        TaskSpec::Reproduce { id } => {
            let outcome = crate::registry::run_entry(id)
                .ok_or_else(|| RunFailure::Config(format!("unknown example id: {id}")))??;
            let pass = outcome.pass;
            (TaskReport::Reproduce { outcome }, pass)
        }
    };

    let report = RunReport {
        scenario: scenario.clone(),
        verification_pass: pass,
        result,
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| RunFailure::Config(e.to_string()))?;
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| RunFailure::Config(e.to_string()))?;
        fs::write(dir.join("report.json"), json)
            .map_err(|e| RunFailure::Config(e.to_string()))?;
    }
    Ok(report)
}

fn build_backward_orbit(
    map: &MapHandle,
    x0: Point,
    n: usize,
    method: OrbitMethod,
) -> Result<BackwardOrbit, RunFailure> {
    Ok(match method {
        OrbitMethod::Inverse => backward_orbit_via_inverse(map, x0, n)?,
        OrbitMethod::Solver => backward_orbit_via_solver(map, x0, n, 6)?,
    })
}
