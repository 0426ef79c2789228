//! Backward orbits: inverse- and solver-based construction, step profiles
//! and the backward step rate, the horosphere-stopping orbit synthesizer,
//! the seven-condition equivalence battery, and the backward limit
//! classification.

use serde::{Deserialize, Serialize};

use crate::dilation::{brfp_record, BrfpClass, BrfpRecord};
use crate::error::{Error, Result};
use crate::forward::{
    calka_dichotomy, forward_orbit, CalkaVerdict, ClassificationResult, MapClass, RetractSample,
};
use crate::horo::HorofunctionHandle;
use crate::maps::{MapHandle, MapKind};
use crate::metric::{certify_discrete_quasigeodesic, distance_to_ray, QuasiGeodesicCertificate};
use crate::spaces::{BoundaryLabel, Point};
use crate::trace::{EarlyStop, OrbitDirection, OrbitTrace};

pub const RESIDUAL_TOL: f64 = 1e-8;
/// Backward step rates below this count as zero.
pub const EPS_B: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Inverse,
    Solver,
    Synthesized,
}

/// A backward orbit: `f(points[n+1]) = points[n]` within `RESIDUAL_TOL`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackwardOrbit {
    pub trace: OrbitTrace,
    /// `d(f(x_{n+1}), x_n)`.
    pub residuals: Vec<f64>,
    pub construction: Construction,
    /// Steps where the preimage solver saw competing branches.
    pub ambiguous_steps: Vec<usize>,
}

impl BackwardOrbit {
    pub fn points(&self) -> &[Point] {
        &self.trace.points
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn from_points(
        map: &MapHandle,
        points: Vec<Point>,
        construction: Construction,
        stopped: Option<EarlyStop>,
        ambiguous_steps: Vec<usize>,
    ) -> Result<BackwardOrbit> {
        let mut residuals = Vec::with_capacity(points.len().saturating_sub(1));
        for w in points.windows(2) {
            residuals.push(map.space.distance(map.apply(w[1])?, w[0])?);
        }
        let trace =
            OrbitTrace::from_points(&map.space, points, OrbitDirection::Backward, stopped)?;
        Ok(BackwardOrbit {
            trace,
            residuals,
            construction,
            ambiguous_steps,
        })
    }
}

/// `points[n] = f⁻ⁿ(x0)` using the declared exact inverse. A domain escape
/// terminates the orbit at the last valid index (some maps simply have no
/// backward orbit through a given point).
pub fn backward_orbit_via_inverse(map: &MapHandle, x0: Point, n: usize) -> Result<BackwardOrbit> {
    if !map.has_exact_inverse() {
        return Err(Error::NoInverse);
    }
    let mut points = vec![x0];
    let mut stopped = None;
    for i in 0..n {
        match map.apply_inverse(points[i]) {
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
    BackwardOrbit::from_points(map, points, Construction::Inverse, stopped, Vec::new())
}

fn is_one_dimensional(map: &MapHandle) -> bool {
    matches!(
        map.space,
        crate::spaces::ModelSpace::RealLine | crate::spaces::ModelSpace::LogLine
    )
}

/// Damped finite-difference Newton iteration for `f(w) = target`, run from
/// one seed. Returns the solution and its metric residual.
fn newton_from_seed(
    map: &MapHandle,
    target: Point,
    seed: Point,
    one_dim: bool,
) -> Option<(Point, f64)> {
    let eval = |w: Point| -> Option<(f64, f64)> {
        let img = map.apply(w).ok()?;
        Some((img.c0 - target.c0, img.c1 - target.c1))
    };
    let norm = |f: (f64, f64)| f.0.hypot(f.1);
    let mut w = seed;
    let mut f = eval(w)?;
    for _ in 0..80 {
        if norm(f) <= 1e-14 * (1.0 + target.c0.abs() + target.c1.abs()) {
            break;
        }
        let h = 1e-7 * (1.0 + w.c0.abs() + w.c1.abs());
        let fx_p = eval(Point::new(w.c0 + h, w.c1))?;
        let fx_m = eval(Point::new(w.c0 - h, w.c1))?;
        let (dx, dy);
        if one_dim {
            let j = (fx_p.0 - fx_m.0) / (2.0 * h);
            if j.abs() < 1e-300 {
                return None;
            }
            dx = -f.0 / j;
            dy = 0.0;
        } else {
            let fy_p = eval(Point::new(w.c0, w.c1 + h))?;
            let fy_m = eval(Point::new(w.c0, w.c1 - h))?;
            let j00 = (fx_p.0 - fx_m.0) / (2.0 * h);
            let j10 = (fx_p.1 - fx_m.1) / (2.0 * h);
            let j01 = (fy_p.0 - fy_m.0) / (2.0 * h);
            let j11 = (fy_p.1 - fy_m.1) / (2.0 * h);
            let det = j00 * j11 - j01 * j10;
            if det.abs() < 1e-300 {
                return None;
            }
            dx = -(j11 * f.0 - j01 * f.1) / det;
            dy = -(-j10 * f.0 + j00 * f.1) / det;
        }
        // damping: halve the step until the residual decreases
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let cand = Point::new(w.c0 + lambda * dx, w.c1 + lambda * dy);
            if let Some(fc) = eval(cand) {
                if norm(fc) < norm(f) {
                    w = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            lambda /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    let img = map.apply(w).ok()?;
    let res = map.space.distance(img, target).ok()?;
    Some((w, res))
}

/// Each step solves `f(x_{n+1}) = x_n` by damped Newton iteration from
/// multiple seeds (continuation from the previous point first), keeping the
/// in-domain solution of least displacement, then least residual. Branch
/// ambiguity (two distinct solutions at comparable displacement) is
/// recorded per step.
pub fn backward_orbit_via_solver(
    map: &MapHandle,
    x0: Point,
    n: usize,
    seeds_per_step: usize,
) -> Result<BackwardOrbit> {
    let one_dim = is_one_dimensional(map);
    let mut points = vec![x0];
    let mut ambiguous = Vec::new();
    for step in 1..=n {
        let target = points[step - 1];
        let prev = target;
        let mut seeds = vec![prev];
        if step >= 2 {
            let prev2 = points[step - 2];
            seeds.push(Point::new(
                2.0 * prev.c0 - prev2.c0,
                2.0 * prev.c1 - prev2.c1,
            ));
        }
        let h0 = 0.3 * (1.0 + 0.05 * (prev.c0.abs() + prev.c1.abs()));
        seeds.push(Point::new(prev.c0 + h0, prev.c1));
        seeds.push(Point::new(prev.c0 - h0, prev.c1));
        seeds.push(Point::new(prev.c0, prev.c1 + h0));
        seeds.push(Point::new(prev.c0, (prev.c1 - h0).max(prev.c1 * 0.5)));
        seeds.truncate(seeds_per_step.max(1));

        let mut solutions: Vec<(Point, f64, f64)> = Vec::new(); // (w, residual, displacement)
        let mut best_residual = f64::INFINITY;
        for seed in seeds {
            if map.space.check_point(seed).is_err() {
                continue;
            }
            if let Some((w, res)) = newton_from_seed(map, target, seed, one_dim) {
                best_residual = best_residual.min(res);
                if res <= RESIDUAL_TOL {
                    let disp = map.space.distance(w, prev)?;
                    let dup = solutions
                        .iter()
                        .any(|(s, _, _)| map.space.distance(*s, w).unwrap_or(1.0) <= 1e-6);
                    if !dup {
                        solutions.push((w, res, disp));
                    }
                }
            }
        }
        if solutions.is_empty() {
            return Err(Error::SolverFailed {
                steps: step - 1,
                residual: best_residual,
            });
        }
        solutions.sort_by(|a, b| {
            a.2.partial_cmp(&b.2)
                .unwrap()
                .then(a.1.partial_cmp(&b.1).unwrap())
        });
        if solutions.len() >= 2 && (solutions[1].2 - solutions[0].2).abs() < 0.2 {
            ambiguous.push(step);
        }
        points.push(solutions[0].0);
    }
    BackwardOrbit::from_points(map, points, Construction::Solver, None, ambiguous)
}

/// Tail-averaged step profile `σ_m` with the backward step rate estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepProfile {
    /// `sigma[m-1] ≈ σ_m = lim_n d(x_{n+m}, x_n)`, tail average.
    pub sigma: Vec<f64>,
    /// max − min of `d(x_{n+m}, x_n)` over the averaging window.
    pub spreads: Vec<f64>,
    pub m_max: usize,
    /// `min_m σ_m / m` (Fekete form for the subadditive `σ`).
    pub b_estimate: f64,
    pub b_at: usize,
    /// `d(x_{n+m}, x_n)` non-decreasing in `n` on the sampled windows.
    pub monotone_ok: bool,
    pub max_subadditivity_defect: f64,
    pub spread_warning: bool,
}

pub const SPREAD_TOL: f64 = 0.05;

pub fn step_profile(map: &MapHandle, orbit: &BackwardOrbit, m_max: usize) -> Result<StepProfile> {
    step_profile_of_points(map, orbit.points(), m_max)
}

pub fn step_profile_of_points(
    map: &MapHandle,
    points: &[Point],
    m_max: usize,
) -> Result<StepProfile> {
    if points.len() < 4 * m_max {
        return Err(Error::InvalidParameter(format!(
            "step profile needs ≥ {} points, got {}",
            4 * m_max,
            points.len()
        )));
    }
    let space = &map.space;
    let mut sigma = Vec::with_capacity(m_max);
    let mut spreads = Vec::with_capacity(m_max);
    let mut monotone_ok = true;
    for m in 1..=m_max {
        let last = points.len() - 1 - m;
        let lo = (3 * last) / 4;
        let mut sum = 0.0;
        let mut min_v = f64::INFINITY;
        let mut max_v = f64::NEG_INFINITY;
        let mut prev = f64::NEG_INFINITY;
        for n in lo..=last {
            let d = space.distance(points[n + m], points[n])?;
            sum += d;
            min_v = min_v.min(d);
            max_v = max_v.max(d);
            if d < prev - 1e-6 {
                monotone_ok = false;
            }
            prev = d;
        }
        sigma.push(sum / (last - lo + 1) as f64);
        spreads.push(max_v - min_v);
    }
    let (mut b_estimate, mut b_at) = (f64::INFINITY, 1);
    for (i, &s) in sigma.iter().enumerate() {
        let ratio = s / (i + 1) as f64;
        if ratio < b_estimate {
            b_estimate = ratio;
            b_at = i + 1;
        }
    }
    let mut max_defect = 0.0f64;
    for m in 1..=m_max {
        for k in m..=m_max {
            if m + k > m_max {
                break;
            }
            max_defect = max_defect.max(sigma[m + k - 1] - sigma[m - 1] - sigma[k - 1]);
        }
    }
    let spread_warning = spreads.iter().any(|&s| s > SPREAD_TOL);
    Ok(StepProfile {
        sigma,
        spreads,
        m_max,
        b_estimate,
        b_at,
        monotone_ok,
        max_subadditivity_defect: max_defect,
        spread_warning,
    })
}

// ---------------------------------------------------------------------------
// Synthesizer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesizerConfig {
    /// Iterate power; default: the least `n` with `log λ(fⁿ) > 0`.
    pub m: Option<usize>,
    /// Horosphere level; default: auto-tuned from forward probes.
    pub c: Option<f64>,
    /// Anchor parameters `t_k`; default: `t0 + k·max(1, m·stable)` — spaced
    /// by the expected per-block drop so successive anchors stop at nearby
    /// points and realize a convergent subsequence at finite budget.
    pub t_anchors: Option<Vec<f64>>,
    pub depth: usize,
    pub cluster_tol: f64,
    pub n_anchors: usize,
}

impl Default for SynthesizerConfig {
    fn default() -> Self {
        SynthesizerConfig {
            m: None,
            c: None,
            t_anchors: None,
            depth: 50,
            cluster_tol: 0.2,
            n_anchors: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesizerState {
    pub m: usize,
    pub c: f64,
    pub t_anchors: Vec<f64>,
    /// `n_{m,k}` per anchor: last block index still inside `{h ≤ c}`.
    pub stop_indices: Vec<usize>,
    /// Anchors whose pulled-back families agree with the reference chain.
    pub chain_size: usize,
    pub max_family_spread: f64,
    pub b_estimate: f64,
    pub sigma_1: f64,
    /// `sup_ν d(x_ν, f^{-ν}(p))` when an exact inverse exists: the
    /// same-index comparison, bounded but offset-sensitive.
    pub sup_distance_to_exact_inverse: Option<f64>,
    /// Directed Hausdorff distance from the synthesized orbit to the exact
    /// inverse orbit of the basepoint.
    pub hausdorff_to_exact_inverse: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesizedOrbit {
    pub orbit: BackwardOrbit,
    pub state: SynthesizerState,
}

/// Builds a backward orbit converging to a repelling BRFP by the
/// horosphere-stopping construction: follow forward orbits of `f^m` started
/// on the anchor ray until they exit `{h_{a,p} ≤ c}`, pull the stopped
/// trajectories back `depth` steps, and extract the subsequence of anchors
/// whose pulled-back families agree within `cluster_tol`. When no
/// consistent subfamily exists the run reports `ClustersDiverged` — the
/// underlying extraction is a compactness argument, which a finite run can
/// only corroborate, never force.
pub fn synthesize_backward_orbit(
    map: &MapHandle,
    p: Point,
    record: &BrfpRecord,
    config: &SynthesizerConfig,
) -> Result<SynthesizedOrbit> {
    if !record.is_brfp || record.classification != BrfpClass::Repelling {
        return Err(Error::NoRepellingCertificate);
    }
    let table = record
        .dilation_table
        .as_ref()
        .ok_or(Error::NoRepellingCertificate)?;
    let anchor = map.space.ray_toward(p, record.label)?;
    let handle = HorofunctionHandle::new(anchor.clone(), p);

    let m = match config.m {
        Some(m) => m,
        None => {
            table
                .entries
                .iter()
                .find(|e| e.value > crate::dilation::TOL_SUPER)
                .ok_or(Error::NoRepellingCertificate)?
                .n
        }
    };
    let block_gain = table.entry(m).max(0.05);

    // auto-tune c: forward probes must exit the candidate horosphere
    let c = match config.c {
        Some(c) => c,
        None => {
            let mut level = 0.0f64;
            for seed in [p, anchor.point_at(2.0), anchor.point_at(5.0)] {
                let probe = forward_orbit(map, seed, 240)?;
                let tail_max = probe.points[probe.len() / 2..]
                    .iter()
                    .map(|&q| handle.value(q))
                    .collect::<Result<Vec<f64>>>()?
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                level = level.min(tail_max - 1.0);
            }
            level.min(0.0)
        }
    };

    let t_anchors = match &config.t_anchors {
        Some(t) => t.clone(),
        None => {
            // anchors must sit deep enough that the stopped trajectory can
            // be pulled back `depth` steps, and are spaced by the expected
            // per-block drop, phase-quantized to a quarter block so the
            // stopped points land at a reproducible horosphere offset
            let spacing = (m as f64 * table.stable).max(1.0);
            let base = (10.0f64).max(-c + 1.0)
                + 1.05 * (config.depth as f64 + 2.0 * m as f64) * table.stable.max(0.1)
                + 5.0;
            let t0 = ((base / spacing).floor() + 0.25) * spacing;
            (0..config.n_anchors)
                .map(|k| t0 + spacing * k as f64)
                .collect()
        }
    };

    // stop search per anchor, keeping each full one-step trajectory
    let mut chains: Vec<Vec<Point>> = Vec::new();
    let mut stop_indices = Vec::new();
    for &t_k in &t_anchors {
        let start = anchor.point_at(t_k);
        let j_cap = ((t_k + c.abs() + 20.0) / block_gain).ceil() as usize + 60;
        let mut chain = vec![start];
        let mut stop: Option<usize> = None;
        'blocks: for j in 1..=j_cap {
            for _ in 0..m {
                let next = map.apply(*chain.last().unwrap())?;
                chain.push(next);
            }
            if handle.value(chain[m * j])? > c {
                stop = Some(j - 1);
                break 'blocks;
            }
        }
        let n_k = stop.ok_or(Error::HorosphereExitFailed {
            c,
            steps: j_cap * m,
        })?;
        chains.push(chain);
        stop_indices.push(n_k);
    }

    // diagonal extraction: reference = deepest eligible anchor
    let depth = config.depth;
    let eligible: Vec<usize> = (0..chains.len())
        .filter(|&k| m * stop_indices[k] >= depth)
        .collect();
    if eligible.is_empty() {
        return Err(Error::ClustersDiverged {
            spread: f64::INFINITY,
            tol: config.cluster_tol,
            depth,
        });
    }
    let reference = *eligible.last().unwrap();
    let pulled = |k: usize, nu: usize| chains[k][m * stop_indices[k] - nu];
    let probes: Vec<usize> = vec![0, depth / 4, depth / 2, 3 * depth / 4, depth];
    let mut chain_members = Vec::new();
    let mut max_family_spread = 0.0f64;
    for &k in &eligible {
        let mut worst = 0.0f64;
        for &nu in &probes {
            worst = worst.max(map.space.distance(pulled(k, nu), pulled(reference, nu))?);
        }
        if worst <= config.cluster_tol {
            chain_members.push(k);
            max_family_spread = max_family_spread.max(worst);
        }
    }
    if chain_members.len() < 2 {
        let spread = probes
            .iter()
            .map(|&nu| map.space.distance(pulled(eligible[0], nu), pulled(reference, nu)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        return Err(Error::ClustersDiverged {
            spread,
            tol: config.cluster_tol,
            depth,
        });
    }

    let points: Vec<Point> = (0..=depth).map(|nu| pulled(reference, nu)).collect();
    let orbit =
        BackwardOrbit::from_points(map, points, Construction::Synthesized, None, Vec::new())?;
    let profile = step_profile(map, &orbit, (depth / 4).max(4))?;
    let sigma_1 = orbit
        .trace
        .step_distances
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    let (sup_distance, hausdorff) = if map.has_exact_inverse() {
        let mut exact = vec![p];
        let mut ok = true;
        for _ in 0..depth + 2 {
            match map.apply_inverse(*exact.last().unwrap()) {
                Ok(next) => exact.push(next),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let mut sup = 0.0f64;
            let mut haus = 0.0f64;
            for (nu, &x) in orbit.points().iter().enumerate() {
                sup = sup.max(map.space.distance(x, exact[nu])?);
                let mut best = f64::INFINITY;
                for &y in &exact {
                    best = best.min(map.space.distance(x, y)?);
                }
                haus = haus.max(best);
            }
            (Some(sup), Some(haus))
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };

    Ok(SynthesizedOrbit {
        orbit,
        state: SynthesizerState {
            m,
            c,
            t_anchors,
            stop_indices,
            chain_size: chain_members.len(),
            max_family_spread,
            b_estimate: profile.b_estimate,
            sigma_1,
            sup_distance_to_exact_inverse: sup_distance,
            hausdorff_to_exact_inverse: hausdorff,
        },
    })
}

// ---------------------------------------------------------------------------
// Equivalence battery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BatteryItem {
    pub name: &'static str,
    pub verdict: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub items: Vec<BatteryItem>,
    /// `Some(v)` when all seven verdicts agree on `v`; `None` is a
    /// falsification alarm.
    pub unanimous: Option<bool>,
    pub limit_label: Option<BoundaryLabel>,
    pub b_estimate: f64,
    pub sigma_sup: f64,
    pub stable_at_limit: Option<f64>,
    pub quasi_geodesic: Option<QuasiGeodesicCertificate>,
}

#[derive(Debug, Clone)]
pub struct BatteryParams {
    pub basepoint: Point,
    pub m_max: usize,
    pub eps_b: f64,
    /// Tolerance for `b = log Λ` in condition 7.
    pub rate_tol: f64,
    /// Allowed growth of the ray distance between the first and last
    /// quarter of the orbit before residence is denied.
    pub region_growth_tol: f64,
    /// Horofunction drop demanded between the middle and the end.
    pub h_drop_min: f64,
}

impl BatteryParams {
    pub fn new(basepoint: Point) -> BatteryParams {
        BatteryParams {
            basepoint,
            m_max: 40,
            eps_b: EPS_B,
            rate_tol: 1e-3,
            region_growth_tol: 0.5,
            h_drop_min: 1.0,
        }
    }
}

/// Finite-sample versions of the seven equivalent conditions for an
/// escaping backward orbit with bounded step:
///
/// 1. positive backward step rate;
/// 2. the orbit is a discrete quasi-geodesic;
/// 3. it converges to a boundary label inside a geodesic region;
/// 4. `h → −∞` along the orbit for the limit anchor;
/// 5. `liminf h = −∞`;
/// 6. the limit label is a repelling BRFP;
/// 7. condition 6 together with `b = log Λ` at the limit.
///
/// The verdicts must be unanimous; disagreement is reported as a
/// falsification alarm through `unanimous = None`.
pub fn equivalence_battery(
    map: &MapHandle,
    orbit: &BackwardOrbit,
    params: &BatteryParams,
) -> Result<BatteryReport> {
    let points = orbit.points();
    let n = points.len();
    if n < 16 {
        return Err(Error::OrbitPrecondition {
            reason: format!("orbit too short ({n} points)"),
        });
    }
    if calka_dichotomy(&orbit.trace) != CalkaVerdict::Escaping {
        return Err(Error::OrbitPrecondition {
            reason: "orbit is not escaping".into(),
        });
    }
    let steps = &orbit.trace.step_distances;
    let sigma_sup = steps.iter().cloned().fold(0.0, f64::max);
    let tail_mean =
        steps[steps.len() / 2..].iter().sum::<f64>() / (steps.len() - steps.len() / 2) as f64;
    if sigma_sup > 2.0 * tail_mean + 0.5 {
        return Err(Error::OrbitPrecondition {
            reason: format!("step not bounded/flat: sup {sigma_sup}, tail mean {tail_mean}"),
        });
    }

    let profile = step_profile(map, orbit, params.m_max.min((n - 1) / 4))?;
    let b = profile.b_estimate;

    let space = &map.space;
    let limit_label = (0..6).find_map(|back| {
        let idx = n.checked_sub(1 + back)?;
        space.nearest_boundary_label(points[idx])
    });

    let mut items = Vec::new();
    items.push(BatteryItem {
        name: "positive backward step rate",
        verdict: b > params.eps_b,
        detail: format!("b = {b:.6}, threshold {}", params.eps_b),
    });

    let qg = certify_discrete_quasigeodesic(space, points, None, None)?;
    items.push(BatteryItem {
        name: "discrete quasi-geodesic",
        verdict: qg.valid(),
        detail: format!(
            "A = {:.4}, required B = {:.3}, violations = {}",
            qg.a,
            qg.required_b,
            qg.violations.len()
        ),
    });

    // items 3-7 need the limit anchor
    let mut stable_at_limit = None;
    match limit_label {
        None => {
            for name in [
                "geodesic-region convergence",
                "h → −∞ along the orbit",
                "liminf h = −∞",
                "repelling limit BRFP",
                "b equals the stable dilation",
            ] {
                items.push(BatteryItem {
                    name,
                    verdict: false,
                    detail: "no boundary label resolved for the deep orbit".into(),
                });
            }
        }
        Some(label) => {
            let anchor = space.ray_toward(params.basepoint, label)?;
            let deepest = space.distance(params.basepoint, points[n - 1])?;
            let t_ray = 1.1 * deepest + 10.0;
            let stride = (n / 200).max(1);
            let mut head_max = 0.0f64;
            let mut tail_max = 0.0f64;
            for (i, &pnt) in points.iter().enumerate().step_by(stride) {
                let (d, _) = distance_to_ray(space, &anchor, pnt, t_ray)?;
                if i <= n / 4 {
                    head_max = head_max.max(d);
                }
                if i >= 3 * n / 4 {
                    tail_max = tail_max.max(d);
                }
            }
            items.push(BatteryItem {
                name: "geodesic-region convergence",
                verdict: tail_max <= head_max + params.region_growth_tol,
                detail: format!("ray distance head {head_max:.3} → tail {tail_max:.3}"),
            });

            let handle = HorofunctionHandle::new(anchor.clone(), params.basepoint);
            let h: Vec<f64> = points
                .iter()
                .map(|&q| handle.value(q))
                .collect::<Result<Vec<f64>>>()?;
            items.push(BatteryItem {
                name: "h → −∞ along the orbit",
                verdict: h[n - 1] <= h[n / 2] - params.h_drop_min,
                detail: format!("h mid {:.3} → end {:.3}", h[n / 2], h[n - 1]),
            });
            let head_min = h[..n / 4].iter().cloned().fold(f64::INFINITY, f64::min);
            let tail_min = h[3 * n / 4..].iter().cloned().fold(f64::INFINITY, f64::min);
            items.push(BatteryItem {
                name: "liminf h = −∞",
                verdict: tail_min <= head_min - params.h_drop_min,
                detail: format!("running min {head_min:.3} → {tail_min:.3}"),
            });

            let record = brfp_record(map, &anchor, 8, 40.0, None)?;
            let repelling = record.is_brfp && record.classification == BrfpClass::Repelling;
            stable_at_limit = record.stable();
            items.push(BatteryItem {
                name: "repelling limit BRFP",
                verdict: repelling,
                detail: format!(
                    "is_brfp = {}, class = {:?}, stable = {:?}",
                    record.is_brfp, record.classification, stable_at_limit
                ),
            });
            let rate_match = stable_at_limit
                .map(|s| (s - b).abs() <= params.rate_tol)
                .unwrap_or(false);
            items.push(BatteryItem {
                name: "b equals the stable dilation",
                verdict: repelling && rate_match,
                detail: format!("b = {b:.6} vs log Λ = {stable_at_limit:?}"),
            });
        }
    }

    let first = items[0].verdict;
    let unanimous = items.iter().all(|i| i.verdict == first).then_some(first);
    Ok(BatteryReport {
        items,
        unanimous,
        limit_label,
        b_estimate: b,
        sigma_sup,
        stable_at_limit,
        quasi_geodesic: Some(qg),
    })
}

// ---------------------------------------------------------------------------
// Backward limit classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BackwardLimitClass {
    RepellingBrfp { label: BoundaryLabel },
    ParabolicDw { label: BoundaryLabel },
    WeaklyEllipticUndetermined,
    NonEscaping,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackwardLimitReport {
    pub class: BackwardLimitClass,
    pub b_estimate: f64,
    pub limit_label: Option<BoundaryLabel>,
    /// Orbit points all within tolerance of the sampled limit retract
    /// (checked for non-escaping orbits when a sample is supplied).
    pub inside_retract_sample: Option<bool>,
    pub notes: Vec<String>,
}

/// The backward trichotomy at desk scale: non-escaping orbits force an
/// elliptic map; escaping bounded-step orbits split by the backward step
/// rate into repelling-BRFP convergence (`b > ε`) versus the parabolic /
/// weakly-elliptic regime (`b ≤ ε`). A small rate on a hyperbolic or
/// strongly elliptic map violates the trichotomy and errors out loudly.
pub fn classify_backward_limit(
    map: &MapHandle,
    orbit: &BackwardOrbit,
    profile: &StepProfile,
    forward_class: &ClassificationResult,
    retract: Option<&RetractSample>,
) -> Result<BackwardLimitReport> {
    let verdict = calka_dichotomy(&orbit.trace);
    let mut notes = Vec::new();
    let limit_label = map
        .space
        .nearest_boundary_label(*orbit.points().last().unwrap());
    match verdict {
        CalkaVerdict::Undetermined => Err(Error::OrbitPrecondition {
            reason: "escape status undetermined".into(),
        }),
        CalkaVerdict::Bounded => {
            if !matches!(forward_class.class, MapClass::Elliptic { .. }) {
                notes.push(format!(
                    "non-escaping backward orbit on a map classified {}",
                    forward_class.class
                ));
            }
            let inside = match retract {
                None => None,
                Some(sample) => {
                    let mut all = true;
                    for &x in orbit.points() {
                        let mut near = false;
                        for &c in &sample.points {
                            if map.space.distance(x, c)? <= 0.5 {
                                near = true;
                                break;
                            }
                        }
                        all &= near;
                    }
                    Some(all)
                }
            };
            Ok(BackwardLimitReport {
                class: BackwardLimitClass::NonEscaping,
                b_estimate: profile.b_estimate,
                limit_label,
                inside_retract_sample: inside,
                notes,
            })
        }
        CalkaVerdict::Escaping => {
            let b = profile.b_estimate;
            if b > EPS_B {
                let label = limit_label.ok_or_else(|| Error::OrbitPrecondition {
                    reason: "escaping orbit with no resolved limit label".into(),
                })?;
                Ok(BackwardLimitReport {
                    class: BackwardLimitClass::RepellingBrfp { label },
                    b_estimate: b,
                    limit_label,
                    inside_retract_sample: None,
                    notes,
                })
            } else {
                match forward_class.class {
                    MapClass::Parabolic => {
                        let label = limit_label.ok_or_else(|| Error::OrbitPrecondition {
                            reason: "escaping orbit with no resolved limit label".into(),
                        })?;
                        if let Some(dw) = forward_class.dw_label {
                            if !dw.close_to(&label, 1e-6) {
                                notes.push(format!(
                                    "orbit limit {label:?} differs from Denjoy–Wolff {dw:?}"
                                ));
                            }
                        }
                        Ok(BackwardLimitReport {
                            class: BackwardLimitClass::ParabolicDw { label },
                            b_estimate: b,
                            limit_label,
                            inside_retract_sample: None,
                            notes,
                        })
                    }
                    MapClass::Elliptic {
                        strength: crate::forward::EllipticStrength::Weak,
                    } => Ok(BackwardLimitReport {
                        class: BackwardLimitClass::WeaklyEllipticUndetermined,
                        b_estimate: b,
                        limit_label,
                        inside_retract_sample: None,
                        notes,
                    }),
                    ref other => Err(Error::OrbitPrecondition {
                        reason: format!(
                            "trichotomy violated: b = {b} ≤ {EPS_B} on a map classified {other}"
                        ),
                    }),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Unbounded-step probe
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnboundedStepReport {
    /// `d(x_n, x_{n+1})` for the materialized prefix of the backward orbit.
    pub steps: Vec<f64>,
    pub max_step: f64,
    /// Step at the sample index requested (n = 20 in the shipped probe).
    pub step_at: (usize, f64),
    pub n_cells: usize,
    pub cells_hit: usize,
    pub angular_samples: usize,
    /// With zero rotation the angular set collapses to a point.
    pub bounded_angular_set: bool,
}

/// Probe for backward orbits with unbounded step on the punctured cylinder:
/// the backward orbit of `(α, t) ↦ (α + θ, 2t)` halves heights, so its
/// steps grow without bound while the angular coordinates `α − nθ` sweep
/// the circle. Metric steps are materialized for a short prefix (heights
/// `2^{-n}` underflow past `n ≈ 1000`); angular occupancy follows the
/// rotation recurrence directly.
pub fn unbounded_step_probe(
    map: &MapHandle,
    x0: Point,
    metric_steps: usize,
    angular_samples: usize,
    n_cells: usize,
) -> Result<UnboundedStepReport> {
    let theta = match map.kind {
        MapKind::PuncturedDoubling { theta } => theta,
        _ => {
            return Err(Error::InvalidParameter(
                "probe applies to the punctured-cylinder doubling map".into(),
            ))
        }
    };
    let orbit = backward_orbit_via_inverse(map, x0, metric_steps)?;
    let steps = orbit.trace.step_distances.clone();
    let max_step = steps.iter().cloned().fold(0.0, f64::max);
    let idx = 20.min(steps.len().saturating_sub(1));
    let step_at = (idx, steps[idx]);

    let mut hit = vec![false; n_cells];
    for n in 0..angular_samples {
        let alpha = (x0.c0 - n as f64 * theta).rem_euclid(std::f64::consts::TAU);
        let cell = ((alpha / std::f64::consts::TAU) * n_cells as f64) as usize;
        hit[cell.min(n_cells - 1)] = true;
    }
    let cells_hit = hit.iter().filter(|&&h| h).count();
    Ok(UnboundedStepReport {
        steps,
        max_step,
        step_at,
        n_cells,
        cells_hit,
        angular_samples,
        bounded_angular_set: cells_hit <= 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::classify;
    use crate::spaces::ModelSpace::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn disc_auto() -> (MapHandle, Point) {
        let disc = PoincareDisc;
        let map = MapHandle::new(disc.clone(), MapKind::DiscAutomorphism { a: 0.5 }).unwrap();
        let p = disc.point(0.0, 0.0).unwrap();
        (map, p)
    }

    fn pc_map() -> MapHandle {
        MapHandle::new(UpperHalfPlane, MapKind::SqrtShift).unwrap()
    }

    #[test]
    fn inverse_orbit_of_disc_automorphism() {
        let (map, p) = disc_auto();
        let orbit = backward_orbit_via_inverse(&map, p, 60).unwrap();
        assert_eq!(orbit.len(), 61);
        assert!(orbit.max_residual() < 1e-10);
        let log3 = 3.0f64.ln();
        for (n, &d) in orbit.trace.displacement.iter().enumerate() {
            assert!((d - log3 * n as f64).abs() < 1e-8, "n = {n}: {d}");
        }
        // closed form: f^{-n}(0) = -tanh(n arctanh 1/2), checked while the
        // disc coordinate is representable
        let disc = &map.space;
        for n in [1usize, 5, 10, 15] {
            let expect = disc
                .point(-((n as f64) * 0.5f64.atanh()).tanh(), 0.0)
                .unwrap();
            let err = disc.distance(orbit.points()[n], expect).unwrap();
            assert!(err < 1e-7, "n = {n}: err = {err}");
        }
    }

    #[test]
    fn log_line_backward_orbit_terminates() {
        let map = MapHandle::new(LogLine, MapKind::Translate { c: 1.0 }).unwrap();
        let orbit = backward_orbit_via_inverse(&map, Point::real(10.0), 50).unwrap();
        let stop = orbit.trace.stopped_early.as_ref().expect("must terminate");
        assert_eq!(stop.last_valid, 9);
        assert_eq!(orbit.len(), 10);
        assert!((orbit.points()[9].c0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slit_plane_companion_orbits_separate() {
        let map = MapHandle::new(SlitPlane, MapKind::Translate { c: 1.0 }).unwrap();
        let x = backward_orbit_via_inverse(&map, Point::new(0.0, 1.0), 100).unwrap();
        let y = backward_orbit_via_inverse(&map, Point::new(0.0, -1.0), 100).unwrap();
        let mut prev = 0.0;
        for n in [10usize, 40, 100] {
            let d = map.space.distance(x.points()[n], y.points()[n]).unwrap();
            assert!(d > prev, "separation should grow");
            prev = d;
        }
        assert!(prev > 10.0, "d(x_100, y_100) = {prev}");
    }

    #[test]
    fn solver_reconstructs_sqrt_orbit() {
        let map = pc_map();
        let x0 = Complex64::new(0.0, 1.0).sqrt();
        let orbit = backward_orbit_via_solver(&map, Point::new(x0.re, x0.im), 400, 6).unwrap();
        assert!(orbit.max_residual() < RESIDUAL_TOL);
        let mut worst = 0.0f64;
        for (n, &pt) in orbit.points().iter().enumerate() {
            let z = Complex64::new(n as f64, 1.0).sqrt();
            let err = map.space.distance(pt, Point::new(z.re, z.im)).unwrap();
            worst = worst.max(err);
        }
        assert!(worst < 1e-8, "max deviation from √(n+i): {worst}");
    }

    #[test]
    fn solver_agrees_with_exact_inverse_on_disc() {
        let (map, p) = disc_auto();
        let by_inverse = backward_orbit_via_inverse(&map, p, 30).unwrap();
        let by_solver = backward_orbit_via_solver(&map, p, 30, 6).unwrap();
        for n in 0..=30 {
            let d = map
                .space
                .distance(by_inverse.points()[n], by_solver.points()[n])
                .unwrap();
            assert!(d < 1e-9, "n = {n}: solver drift {d}");
        }
    }

    #[test]
    fn solver_constant_orbit_for_identity() {
        let map = MapHandle::new(UpperHalfPlane, MapKind::Identity).unwrap();
        let orbit = backward_orbit_via_solver(&map, Point::new(0.3, 2.0), 20, 4).unwrap();
        for &pt in orbit.points() {
            assert!(map.space.distance(pt, Point::new(0.3, 2.0)).unwrap() < 1e-9);
        }
    }

    #[test]
    fn step_profiles_disc_vs_parabolic() {
        let (map, p) = disc_auto();
        let orbit = backward_orbit_via_inverse(&map, p, 200).unwrap();
        let profile = step_profile(&map, &orbit, 40).unwrap();
        let log3 = 3.0f64.ln();
        for (i, &s) in profile.sigma.iter().enumerate() {
            assert!((s - log3 * (i + 1) as f64).abs() < 1e-9);
        }
        assert!((profile.b_estimate - log3).abs() < 1e-9);
        assert!(profile.monotone_ok);
        assert!(profile.max_subadditivity_defect <= 1e-6);

        // parabolic orbit: σ_m → arccosh(1 + m²/2), so σ_m/m sinks slowly
        let map = pc_map();
        let x0 = Complex64::new(0.0, 1.0).sqrt();
        let orbit = backward_orbit_via_solver(&map, Point::new(x0.re, x0.im), 1010, 6).unwrap();
        let profile = step_profile(&map, &orbit, 250).unwrap();
        assert!(
            profile.b_estimate <= EPS_B,
            "b = {} should fall below {EPS_B}",
            profile.b_estimate
        );
        let sigma20_limit = (1.0 + 200.0f64).acosh();
        assert!(
            (profile.sigma[19] - sigma20_limit).abs() < 0.05,
            "σ_20 = {} vs {sigma20_limit}",
            profile.sigma[19]
        );
        assert!(profile.max_subadditivity_defect <= 1e-6);
    }

    #[test]
    fn synthesizer_refuses_identity() {
        let map = MapHandle::new(UpperHalfPlane, MapKind::Identity).unwrap();
        let p = Point::new(0.0, 1.0);
        let anchor = map
            .space
            .ray_toward(p, BoundaryLabel::PlusInfinity)
            .unwrap();
        let record = brfp_record(&map, &anchor, 8, 40.0, None).unwrap();
        let err = synthesize_backward_orbit(&map, p, &record, &SynthesizerConfig::default());
        assert!(matches!(err, Err(Error::NoRepellingCertificate)));
    }

    #[test]
    fn synthesizer_tracks_exact_inverse_orbit_on_disc() {
        let (map, p) = disc_auto();
        let anchor = map
            .space
            .ray_toward(p, BoundaryLabel::Circle { angle: PI })
            .unwrap();
        let record = brfp_record(&map, &anchor, 16, 40.0, None).unwrap();
        let out =
            synthesize_backward_orbit(&map, p, &record, &SynthesizerConfig::default()).unwrap();
        assert!(out.orbit.max_residual() < 1e-10);
        let log3 = 3.0f64.ln();
        assert!(
            (out.state.b_estimate - log3).abs() < 1e-2,
            "b = {}",
            out.state.b_estimate
        );
        let haus = out.state.hausdorff_to_exact_inverse.unwrap();
        assert!(haus <= 0.5, "distance to the exact inverse orbit: {haus}");
        assert!(out.state.sup_distance_to_exact_inverse.unwrap().is_finite());
        assert!(out.state.chain_size >= 2);
    }

    #[test]
    fn synthesizer_on_l1_cylinder_rate_attained_step_not() {
        let map = MapHandle::new(
            L1Cylinder,
            MapKind::CylinderIsometry {
                step: 1.0,
                theta: PI / 2.0,
            },
        )
        .unwrap();
        let p = Point::new(0.0, 0.5);
        let anchor = map
            .space
            .ray_toward(p, BoundaryLabel::MinusInfinity)
            .unwrap();
        let record = brfp_record(&map, &anchor, 16, 40.0, None).unwrap();
        assert_eq!(record.classification, BrfpClass::Repelling);
        let out =
            synthesize_backward_orbit(&map, p, &record, &SynthesizerConfig::default()).unwrap();
        assert!(
            (out.state.b_estimate - 1.0).abs() < 1e-2,
            "b = {}",
            out.state.b_estimate
        );
        assert!(
            out.state.sigma_1 >= 1.0 + PI / 2.0 - 1e-3,
            "σ₁ = {}",
            out.state.sigma_1
        );
        assert!(out.orbit.max_residual() < 1e-10);
    }

    #[test]
    fn battery_unanimous_true_on_disc_orbit() {
        let (map, p) = disc_auto();
        let orbit = backward_orbit_via_inverse(&map, p, 240).unwrap();
        let report = equivalence_battery(&map, &orbit, &BatteryParams::new(p)).unwrap();
        assert_eq!(report.unanimous, Some(true), "items: {:#?}", report.items);
        assert!((report.b_estimate - 3.0f64.ln()).abs() < 1e-3);
        assert!(report
            .limit_label
            .unwrap()
            .close_to(&BoundaryLabel::Circle { angle: PI }, 1e-9));
    }

    #[test]
    fn battery_unanimous_false_on_parabolic_orbit() {
        let map = pc_map();
        let x0 = Complex64::new(0.0, 1.0).sqrt();
        let orbit = backward_orbit_via_solver(&map, Point::new(x0.re, x0.im), 1010, 6).unwrap();
        let mut params = BatteryParams::new(Point::new(0.0, 1.0));
        params.m_max = 250;
        let report = equivalence_battery(&map, &orbit, &params).unwrap();
        assert_eq!(report.unanimous, Some(false), "items: {:#?}", report.items);
        assert_eq!(report.limit_label, Some(BoundaryLabel::PlusInfinity));
    }

    #[test]
    fn battery_unanimous_false_on_clamp_orbit() {
        let map = MapHandle::new(UpperHalfPlane, MapKind::HalfPlaneClamp).unwrap();
        // x_n = (n+1) + i is a backward orbit: f(x_{n+1}) = x_n
        let points: Vec<Point> = (0..=1010)
            .map(|n| Point::new(n as f64 + 1.0, 1.0))
            .collect();
        let orbit =
            BackwardOrbit::from_points(&map, points, Construction::Inverse, None, Vec::new())
                .unwrap();
        assert!(orbit.max_residual() < 1e-12);
        let mut params = BatteryParams::new(Point::new(0.0, 1.0));
        params.m_max = 250;
        let report = equivalence_battery(&map, &orbit, &params).unwrap();
        assert_eq!(report.unanimous, Some(false), "items: {:#?}", report.items);
    }

    #[test]
    fn backward_limits_classified() {
        // repelling case
        let (map, p) = disc_auto();
        let orbit = backward_orbit_via_inverse(&map, p, 200).unwrap();
        let profile = step_profile(&map, &orbit, 40).unwrap();
        let class = classify(&map, &[p], 400, &map.space.default_window()).unwrap();
        let report = classify_backward_limit(&map, &orbit, &profile, &class, None).unwrap();
        match report.class {
            BackwardLimitClass::RepellingBrfp { label } => {
                assert!(label.close_to(&BoundaryLabel::Circle { angle: PI }, 1e-9))
            }
            ref other => panic!("expected repelling, got {other:?}"),
        }

        // parabolic case
        let map = pc_map();
        let x0 = Complex64::new(0.0, 1.0).sqrt();
        let orbit = backward_orbit_via_solver(&map, Point::new(x0.re, x0.im), 1010, 6).unwrap();
        let profile = step_profile(&map, &orbit, 250).unwrap();
        let class = classify(
            &map,
            &[Point::new(0.0, 1.0)],
            500,
            &map.space.default_window(),
        )
        .unwrap();
        assert_eq!(class.class, MapClass::Parabolic);
        let report = classify_backward_limit(&map, &orbit, &profile, &class, None).unwrap();
        assert_eq!(
            report.class,
            BackwardLimitClass::ParabolicDw {
                label: BoundaryLabel::PlusInfinity
            }
        );
    }

    #[test]
    fn non_escaping_backward_orbit_lands_in_retract_sample() {
        // backward orbit of an elliptic isometry stays relatively compact
        // and inside the sampled limit retract
        let disc = PoincareDisc;
        let map = MapHandle::new(disc.clone(), MapKind::DiscRotation { theta: 1.0 }).unwrap();
        let seed = disc.point(0.5, 0.0).unwrap();
        let orbit = backward_orbit_via_inverse(&map, seed, 200).unwrap();
        let profile = step_profile(&map, &orbit, 20).unwrap();
        let class = classify(&map, &[seed], 400, &disc.default_window()).unwrap();
        let retract = crate::forward::limit_retract_sample(
            &map,
            &[seed],
            400,
            0.5,
            0.2,
            &disc.default_window(),
        )
        .unwrap();
        let report =
            classify_backward_limit(&map, &orbit, &profile, &class, Some(&retract)).unwrap();
        assert_eq!(report.class, BackwardLimitClass::NonEscaping);
        assert_eq!(report.inside_retract_sample, Some(true));
        assert!(report.notes.is_empty(), "notes: {:?}", report.notes);
    }

    #[test]
    fn clamp_orbit_classifies_weakly_elliptic_undetermined() {
        let map = MapHandle::new(UpperHalfPlane, MapKind::HalfPlaneClamp).unwrap();
        let points: Vec<Point> = (0..=1010)
            .map(|n| Point::new(n as f64 + 1.0, 1.0))
            .collect();
        let orbit =
            BackwardOrbit::from_points(&map, points, Construction::Inverse, None, Vec::new())
                .unwrap();
        let profile = step_profile(&map, &orbit, 250).unwrap();
        let window = crate::spaces::SampleWindow::new([-20.0, 0.5], [20.0, 10f64.exp()]);
        let mut seeds = Vec::new();
        for k in 0..6 {
            seeds.push(Point::new(5.0 + k as f64, (2.0 * k as f64).exp()));
        }
        let class = classify(&map, &seeds, 200, &window).unwrap();
        let report = classify_backward_limit(&map, &orbit, &profile, &class, None).unwrap();
        assert_eq!(report.class, BackwardLimitClass::WeaklyEllipticUndetermined);
        assert!(report.b_estimate <= EPS_B);
    }

    #[test]
    fn backward_divergence_rate_matches_b() {
        let (map, p) = disc_auto();
        let orbit = backward_orbit_via_inverse(&map, p, 200).unwrap();
        let profile = step_profile(&map, &orbit, 40).unwrap();
        let rate = orbit.trace.displacement[200] / 200.0;
        assert!((rate - profile.b_estimate).abs() < 1e-2);

        let map = pc_map();
        let x0 = Complex64::new(0.0, 1.0).sqrt();
        let orbit = backward_orbit_via_solver(&map, Point::new(x0.re, x0.im), 1010, 6).unwrap();
        let profile = step_profile(&map, &orbit, 250).unwrap();
        let rate = orbit.trace.displacement[200] / 200.0;
        assert!(
            (rate - profile.b_estimate).abs() < 1e-2,
            "rate {rate} vs b {}",
            profile.b_estimate
        );
    }

    #[test]
    fn punctured_cylinder_probe() {
        let map = MapHandle::new(
            HyperbolicPuncturedCylinder { deck_truncation: 8 },
            MapKind::PuncturedDoubling { theta: 1.0 },
        )
        .unwrap();
        let report = unbounded_step_probe(&map, Point::new(0.3, 1.0), 40, 2000, 16).unwrap();
        assert!(report.step_at.1 > 20.0, "step at n = 20: {}", report.step_at.1);
        assert_eq!(report.cells_hit, 16, "angular cells hit: {}", report.cells_hit);
        // oracle: deck-minimized distance between consecutive orbit points
        let n = 30usize;
        let expected = {
            let t = 2f64.powi(-(n as i32));
            let dt = t / 2.0;
            let chord = 1.0f64.hypot(dt);
            2.0 * (chord / (2.0 * (t * (t / 2.0)).sqrt())).asinh()
        };
        assert!(
            (report.steps[n] - expected).abs() < 1e-6,
            "step[{n}] = {} vs {expected}",
            report.steps[n]
        );

        let frozen = MapHandle::new(
            HyperbolicPuncturedCylinder { deck_truncation: 8 },
            MapKind::PuncturedDoubling { theta: 0.0 },
        )
        .unwrap();
        let report = unbounded_step_probe(&frozen, Point::new(0.3, 1.0), 40, 2000, 16).unwrap();
        assert!(report.bounded_angular_set);
    }
}
