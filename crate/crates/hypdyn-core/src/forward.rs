//! Forward-orbit machinery: the bounded/escaping dichotomy, divergence
//! rate, Denjoy–Wolff label estimation, elliptic/parabolic/hyperbolic
//! classification and limit-retract sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::MapHandle;
use crate::spaces::{BoundaryLabel, Point, SampleWindow};
use crate::trace::{EarlyStop, OrbitDirection, OrbitTrace};

/// `points[n] = fⁿ(x0)`. A domain escape stops the trace at the last valid
/// point and is reported through `stopped_early`, not as an error.
pub fn forward_orbit(map: &MapHandle, x0: Point, n: usize) -> Result<OrbitTrace> {
    if n == 0 {
        return Err(Error::InvalidParameter("orbit length must be ≥ 1".into()));
    }
    let mut points = vec![x0];
    let mut stopped = None;
    for i in 0..n {
        match map.apply(points[i]) {
            Ok(next) => points.push(next),
            Err(e) => {
                stopped = Some(EarlyStop {
                    last_valid: i,
                    reason: e.to_string(),
                });
                break;
            }
        }
    }
    OrbitTrace::from_points(&map.space, points, OrbitDirection::Forward, stopped)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalkaVerdict {
    Bounded,
    Escaping,
    Undetermined,
}

pub const CALKA_N_MIN: usize = 50;
pub const R_ESCAPE: f64 = 20.0;
pub const R_BOUND: f64 = 10.0;

/// Least-squares slope of `values` against their indices.
pub(crate) fn lsq_slope(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean_x = (values.len() - 1) as f64 / 2.0;
    let mean_y = values.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let dx = i as f64 - mean_x;
        num += dx * (v - mean_y);
        den += dx * dx;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Finite-sample bounded/escaping dichotomy.
///
/// Escaping requires either large displacement with a non-negative tail
/// slope, or a monotone displacement that is still visibly climbing at the
/// end of the window (slow escapers like `ln(1+n)` never clear a radius
/// threshold at desk scale). Bounded requires the whole tail below
/// `R_BOUND` with no head-to-tail growth. Anything else is Undetermined —
/// a first-class outcome, since finite data cannot prove unboundedness.
pub fn calka_dichotomy(trace: &OrbitTrace) -> CalkaVerdict {
    let disp = &trace.displacement;
    if disp.len() < CALKA_N_MIN {
        return CalkaVerdict::Undetermined;
    }
    let n = disp.len();
    let head_max = disp[..n / 2].iter().cloned().fold(0.0f64, f64::max);
    let tail_max = disp[n / 2..].iter().cloned().fold(0.0f64, f64::max);
    let last_quarter = &disp[3 * n / 4..];
    let slope = lsq_slope(last_quarter);
    let monotone = disp.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let final_growth = disp[n - 1] - disp[3 * n / 4];

    if tail_max >= R_ESCAPE && slope >= -1e-9 && tail_max >= head_max {
        return CalkaVerdict::Escaping;
    }
    if monotone && disp[n - 1] - disp[0] >= 0.5 && final_growth >= 0.02 {
        return CalkaVerdict::Escaping;
    }
    if tail_max < R_BOUND && tail_max - head_max <= 0.25 {
        return CalkaVerdict::Bounded;
    }
    CalkaVerdict::Undetermined
}

/// Divergence rate (translation length) estimate: the subadditive Fekete
/// floor `min_n d(x, fⁿx)/n` refined by the least-squares slope of the last
/// half of the displacement trace. Subadditivity makes the Fekete floor an
/// upper bound converging from above, so the refined slope is clamped by it.
pub fn divergence_rate(map: &MapHandle, x0: Point, n: usize) -> Result<f64> {
    if n < 10 {
        return Err(Error::InvalidParameter(
            "divergence_rate needs n ≥ 10".into(),
        ));
    }
    let trace = forward_orbit(map, x0, n)?;
    Ok(divergence_rate_of_trace(&trace))
}

pub fn divergence_rate_of_trace(trace: &OrbitTrace) -> f64 {
    let disp = &trace.displacement;
    let mut fekete = f64::INFINITY;
    for (i, &d) in disp.iter().enumerate().skip(1) {
        fekete = fekete.min(d / i as f64);
    }
    let slope = lsq_slope(&disp[disp.len() / 2..]).max(0.0);
    slope.min(fekete).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EllipticStrength {
    /// Retract sample bounded inside the sampling window.
    Strong,
    /// Retract sample reaches the window edge.
    Weak,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum MapClass {
    Elliptic { strength: EllipticStrength },
    Parabolic,
    Hyperbolic,
    Undetermined,
}

impl std::fmt::Display for MapClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapClass::Elliptic { strength } => write!(f, "elliptic({strength:?})"),
            MapClass::Parabolic => write!(f, "parabolic"),
            MapClass::Hyperbolic => write!(f, "hyperbolic"),
            MapClass::Undetermined => write!(f, "undetermined"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationDiagnostics {
    pub per_seed: Vec<CalkaVerdict>,
    /// Residual sums of the `α·n` and `β·ln(1+n)` displacement fits.
    pub linear_sse: f64,
    pub log_sse: f64,
    pub fekete_floor: f64,
    pub tail_slope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub class: MapClass,
    pub c_estimate: f64,
    pub dw_label: Option<BoundaryLabel>,
    pub diagnostics: ClassificationDiagnostics,
}

pub const EPS_C: f64 = 1e-3;
pub const DEFAULT_CLASSIFY_N: usize = 500;

/// Orbit-based map classification from a seed set.
///
/// All seeds bounded ⇒ elliptic, with strength decided by the retract
/// sample relative to `window`. Any escaping seed ⇒ the displacement is
/// fitted against both `α·n` and `β·ln(1+n)`; a better logarithmic fit
/// reads as parabolic regardless of the raw rate (slow escape like
/// `ln(1+n)/n` would otherwise clear `EPS_C` spuriously), otherwise the
/// divergence-rate threshold decides hyperbolic vs parabolic.
pub fn classify(
    map: &MapHandle,
    seeds: &[Point],
    n: usize,
    window: &SampleWindow,
) -> Result<ClassificationResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("classify needs seeds".into()));
    }
    let mut traces = Vec::with_capacity(seeds.len());
    let mut verdicts = Vec::with_capacity(seeds.len());
    for &s in seeds {
        let t = forward_orbit(map, s, n)?;
        verdicts.push(calka_dichotomy(&t));
        traces.push(t);
    }
    let escaping = verdicts.iter().filter(|v| **v == CalkaVerdict::Escaping).count();
    let bounded = verdicts.iter().filter(|v| **v == CalkaVerdict::Bounded).count();

    // fit diagnostics from the first escaping trace (or the first trace)
    let fit_trace = traces
        .iter()
        .zip(&verdicts)
        .find(|(_, v)| **v == CalkaVerdict::Escaping)
        .map(|(t, _)| t)
        .unwrap_or(&traces[0]);
    let disp = &fit_trace.displacement;
    let (mut sxx_lin, mut sxy_lin, mut sxx_log, mut sxy_log) = (0.0, 0.0, 0.0, 0.0);
    for (i, &d) in disp.iter().enumerate().skip(1) {
        let x = i as f64;
        let l = (1.0 + x).ln();
        sxx_lin += x * x;
        sxy_lin += x * d;
        sxx_log += l * l;
        sxy_log += l * d;
    }
    let alpha = if sxx_lin > 0.0 { sxy_lin / sxx_lin } else { 0.0 };
    let beta = if sxx_log > 0.0 { sxy_log / sxx_log } else { 0.0 };
    let (mut linear_sse, mut log_sse) = (0.0, 0.0);
    for (i, &d) in disp.iter().enumerate().skip(1) {
        let x = i as f64;
        linear_sse += (d - alpha * x).powi(2);
        log_sse += (d - beta * (1.0 + x).ln()).powi(2);
    }
    let c_estimate = divergence_rate_of_trace(fit_trace);
    let mut fekete = f64::INFINITY;
    for (i, &d) in disp.iter().enumerate().skip(1) {
        fekete = fekete.min(d / i as f64);
    }
    let diagnostics = ClassificationDiagnostics {
        per_seed: verdicts.clone(),
        linear_sse,
        log_sse,
        fekete_floor: fekete,
        tail_slope: lsq_slope(&disp[disp.len() / 2..]),
    };

    if escaping == 0 && bounded == seeds.len() {
        let retract = limit_retract_sample_from_traces(map, &traces, 0.25, 0.2, window)?;
        let strength = if retract.reaches_edge {
            EllipticStrength::Weak
        } else if retract.points.is_empty() {
            EllipticStrength::Undetermined
        } else {
            EllipticStrength::Strong
        };
        return Ok(ClassificationResult {
            class: MapClass::Elliptic { strength },
            c_estimate: 0.0,
            dw_label: None,
            diagnostics,
        });
    }
    if escaping == 0 {
        return Ok(ClassificationResult {
            class: MapClass::Undetermined,
            c_estimate,
            dw_label: None,
            diagnostics,
        });
    }

    let dw_label = traces
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| **v == CalkaVerdict::Escaping)
        .find_map(|(t, _)| map.space.nearest_boundary_label(t.last()));
    let class = if diagnostics.log_sse < diagnostics.linear_sse {
        MapClass::Parabolic
    } else if c_estimate > EPS_C {
        MapClass::Hyperbolic
    } else {
        MapClass::Parabolic
    };
    Ok(ClassificationResult {
        class,
        c_estimate,
        dw_label,
        diagnostics,
    })
}

/// Accumulation structure of long orbits of an elliptic map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetractSample {
    /// Cluster representatives of orbit tail points.
    pub points: Vec<Point>,
    /// Bounded within the sampling window (i.e. did not reach its edge).
    pub bounded: bool,
    pub reaches_edge: bool,
    pub boundary_labels_touched: Vec<BoundaryLabel>,
}

/// Tail-point sampling of the limit retract. Refuses non-elliptic maps.
pub fn limit_retract_sample(
    map: &MapHandle,
    seeds: &[Point],
    n: usize,
    tail_fraction: f64,
    cluster_tol: f64,
    window: &SampleWindow,
) -> Result<RetractSample> {
    let mut traces = Vec::new();
    for &s in seeds {
        let t = forward_orbit(map, s, n)?;
        let v = calka_dichotomy(&t);
        if v != CalkaVerdict::Bounded {
            return Err(Error::NotElliptic {
                class: format!("{v:?}"),
            });
        }
        traces.push(t);
    }
    limit_retract_sample_from_traces(map, &traces, tail_fraction, cluster_tol, window)
}

fn limit_retract_sample_from_traces(
    map: &MapHandle,
    traces: &[OrbitTrace],
    tail_fraction: f64,
    cluster_tol: f64,
    window: &SampleWindow,
) -> Result<RetractSample> {
    let mut centers: Vec<Point> = Vec::new();
    for t in traces {
        let start = ((t.len() as f64) * (1.0 - tail_fraction)) as usize;
        for &p in &t.points[start.min(t.len() - 1)..] {
            let mut close = false;
            for &c in &centers {
                if map.space.distance(p, c)? <= cluster_tol {
                    close = true;
                    break;
                }
            }
            if !close {
                centers.push(p);
            }
        }
    }
    let mut reaches_edge = false;
    for &c in &centers {
        let (a, b) = map.space.natural_coords(c);
        for (v, lo, hi) in [(a, window.lo[0], window.hi[0]), (b, window.lo[1], window.hi[1])] {
            let size = hi - lo;
            if size > 0.0 {
                let margin = 0.02 * size;
                if v <= lo + margin || v >= hi - margin {
                    reaches_edge = true;
                }
            }
        }
    }
    let mut labels: Vec<BoundaryLabel> = Vec::new();
    for &c in &centers {
        if let Some(l) = map.space.nearest_boundary_label(c) {
            if !labels.iter().any(|k| k.close_to(&l, 1e-6)) {
                labels.push(l);
            }
        }
    }
    Ok(RetractSample {
        points: centers,
        bounded: !reaches_edge,
        reaches_edge,
        boundary_labels_touched: labels,
    })
}
