//! Dilation along rays, iterate-dilation tables, stable dilation, boundary
//! regular fixed point (BRFP) detection and classification, and the global
//! dilation identities.
//!
//! The dilation of `f` at a boundary point `η` w.r.t. a basepoint `p` is the
//! liminf of `d(z, p) − d(f(z), p)` as `z → η`. The lab evaluates it along
//! the anchor ray only: `g(t) = d(γ(t), γ(0)) − d(f(γ(t)), γ(0))`, which is
//! non-decreasing in `t` for any non-expanding map, exactly the dilation in
//! spaces with equivalent Gromov/horofunction compactifications, and exact
//! for the shipped cylinder anchors as well (the liminf over all approaches
//! is attained along the axis ray). Every table records which regime
//! applies.
//!
//! The stable dilation `log Λ_η = lim log λ_{η,p}(fⁿ)/n` exists because the
//! sequence `log λ_{η,p}(fⁿ)` is superadditive; the estimator is the Fekete
//! form `max_n entries[n]/n`, a certified lower bound that reaches the limit
//! at finite `n` on periodic examples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ClassificationResult, MapClass, RetractSample};
use crate::maps::MapHandle;
use crate::metric::{empirical_hausdorff, DeltaEstimate};
use crate::spaces::{BoundaryAnchor, BoundaryLabel, Point};

/// Threshold below which a stable dilation counts as indifferent.
pub const EPS_LAMBDA: f64 = 1e-3;
/// Superadditivity slack and the repelling short-circuit threshold.
pub const TOL_SUPER: f64 = 1e-6;
/// Displacement-trace flatness threshold for BRFP detection.
pub const DISP_FLAT_TOL: f64 = 0.1;
pub const DEFAULT_T_BASE: f64 = 40.0;
pub const DEFAULT_N_MAX: usize = 64;

/// One along-ray dilation evaluation with its trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayDilation {
    /// `g(t_max)`.
    pub value: f64,
    /// `(t, g(t))` on the evaluation grid, ascending in `t`.
    pub trace: Vec<(f64, f64)>,
    /// `|g(t_max) − g(t_max/2)|`.
    pub tail_gap: f64,
    pub t_max: f64,
}

fn t_grid(t_max: f64) -> Vec<f64> {
    let mut ts = vec![t_max];
    let mut t = t_max;
    while t > 1e-3 && ts.len() < 40 {
        t /= 2.0;
        ts.push(t);
    }
    ts.push(0.0);
    ts.reverse();
    ts
}

/// `g(t_max)` for `g(t) = d(γ(t), γ(0)) − d(fⁿ(γ(t)), γ(0))`, asserting the
/// monotone-trace property along the way and certifying the tail by the
/// halving gap against `tail_tol`.
pub fn dilation_along_ray(
    map: &MapHandle,
    anchor: &BoundaryAnchor,
    n_power: usize,
    t_max: f64,
    tail_tol: f64,
) -> Result<RayDilation> {
    if t_max < 20.0 {
        return Err(Error::InvalidParameter("t grid must reach t ≥ 20".into()));
    }
    let p = anchor.basepoint;
    let space = &map.space;
    let mut trace = Vec::new();
    let mut g_half = None;
    let mut prev: Option<f64> = None;
    for &t in &t_grid(t_max) {
        let gamma_t = anchor.point_at(t);
        let image = map.apply_n(gamma_t, n_power)?;
        let g = space.distance(gamma_t, p)? - space.distance(image, p)?;
        if let Some(prev) = prev {
            // slack scales with t: distances of magnitude t carry O(t·ε) noise
            if g < prev - 1e-9 - t.abs() * 1e-15 {
                return Err(Error::MonotonicityViolated { t, drop: prev - g });
            }
        }
        prev = Some(g);
        if (t - t_max / 2.0).abs() < 1e-12 {
            g_half = Some(g);
        }
        trace.push((t, g));
    }
    let value = trace.last().unwrap().1;
    let tail_gap = (value - g_half.expect("grid contains t_max/2")).abs();
    if tail_gap > tail_tol {
        return Err(Error::TailNotConverged {
            gap: tail_gap,
            tol: tail_tol,
            t_max,
        });
    }
    Ok(RayDilation {
        value,
        trace,
        tail_gap,
        t_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationEntry {
    pub n: usize,
    /// `log λ_{η,p}(fⁿ)` along the anchor ray.
    pub value: f64,
    pub ratio: f64,
    pub tail_gap: f64,
    pub t_max: f64,
}

/// Per-iterate dilation estimates with the Fekete-extrapolated stable
/// dilation and superadditivity diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationTable {
    pub label: BoundaryLabel,
    pub anchor_angle: Option<f64>,
    /// Basepoint in natural coordinates.
    pub basepoint: (f64, f64),
    pub n_max: usize,
    pub entries: Vec<DilationEntry>,
    /// `max_n entries[n]/n`.
    pub stable: f64,
    pub stable_at: usize,
    /// Whether the along-ray value is the dilation exactly (equivalent
    /// compactifications).
    pub exact_regime: bool,
    pub max_super_defect: f64,
    pub superadditive_ok: bool,
    /// Iterate bound `aₙ ≤ n(a₁ + 8δ + M + d(f(p), p))` when a four-point
    /// estimate was supplied; `M` is the sampled Hausdorff distance between
    /// the ray and its image curve.
    pub ceiling_ok: Option<bool>,
}

impl DilationTable {
    pub fn entry(&self, n: usize) -> f64 {
        self.entries[n - 1].value
    }

    /// `max_n |entries[n] − n·entries[1]|`, the deviation from the exact
    /// power rule of equivalent compactifications.
    pub fn power_rule_defect(&self) -> f64 {
        let a1 = self.entry(1);
        self.entries
            .iter()
            .map(|e| (e.value - a1 * e.n as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Builds the iterate table `n ↦ log λ_{η,p}(fⁿ)`, `n = 1..=n_max`. The
/// per-iterate horizon grows with `n` so the ray always outruns the
/// iterate's displacement; `t_base` also serves as the floor (the flat
/// cylinder needs `t_base ~ 2e7` for its `O(1/t)` dilation tail).
pub fn dilation_iterates(
    map: &MapHandle,
    anchor: &BoundaryAnchor,
    n_max: usize,
    t_base: f64,
    tail_tol: f64,
    delta: Option<&DeltaEstimate>,
) -> Result<DilationTable> {
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be ≥ 2".into()));
    }
    let first = dilation_along_ray(map, anchor, 1, t_base, tail_tol)?;
    let scale = first.value.abs() + 2.0;
    let mut entries = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let t_n = t_base.max(scale * n as f64 + DEFAULT_T_BASE);
        let ray = dilation_along_ray(map, anchor, n, t_n, tail_tol)?;
        entries.push(DilationEntry {
            n,
            value: ray.value,
            ratio: ray.value / n as f64,
            tail_gap: ray.tail_gap,
            t_max: t_n,
        });
    }
    let (mut stable, mut stable_at) = (f64::NEG_INFINITY, 1);
    for e in &entries {
        if e.ratio > stable {
            stable = e.ratio;
            stable_at = e.n;
        }
    }
    let mut max_super_defect = 0.0f64;
    for i in 1..=n_max {
        for j in i..=n_max {
            if i + j > n_max {
                break;
            }
            let defect = entries[i - 1].value + entries[j - 1].value - entries[i + j - 1].value;
            max_super_defect = max_super_defect.max(defect);
        }
    }
    let ceiling_ok = match delta {
        None => None,
        Some(d) => {
            let p = anchor.basepoint;
            let ray_pts: Vec<Point> = (0..=40)
                .map(|i| anchor.point_at(t_base.min(40.0) * i as f64 / 40.0))
                .collect();
            let img_pts: Result<Vec<Point>> = ray_pts.iter().map(|&q| map.apply(q)).collect();
            let m = empirical_hausdorff(&map.space, &ray_pts, &img_pts?)?;
            let dfp = map.space.distance(map.apply(p)?, p)?;
            let a1 = entries[0].value;
            let bound_per_n = a1 + 8.0 * d.implied_thin_delta + m + dfp;
            Some(
                entries
                    .iter()
                    .all(|e| e.value <= e.n as f64 * bound_per_n + 1e-6),
            )
        }
    };
    Ok(DilationTable {
        label: anchor.label,
        anchor_angle: anchor.anchor_angle(),
        basepoint: map.space.natural_coords(anchor.basepoint),
        n_max,
        entries,
        stable,
        stable_at,
        exact_regime: map.space.compactification_equivalent(),
        max_super_defect,
        superadditive_ok: max_super_defect <= TOL_SUPER,
        ceiling_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BrfpClass {
    Attracting,
    Indifferent,
    Repelling,
    Unknown,
}

/// Sign classification of the stable dilation, honoring the superadditive
/// short-circuit: a single iterate with `log λ(fⁿ) > 0` already certifies
/// repelling, whatever the horizon.
pub fn classify_brfp(table: &DilationTable) -> BrfpClass {
    let any_positive = table.entries.iter().any(|e| e.value > TOL_SUPER);
    if any_positive {
        return BrfpClass::Repelling;
    }
    if table.stable < -EPS_LAMBDA {
        BrfpClass::Attracting
    } else if table.stable.abs() <= EPS_LAMBDA {
        BrfpClass::Indifferent
    } else {
        BrfpClass::Repelling
    }
}

/// Boundary regular fixed point evidence at one anchor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BrfpRecord {
    pub label: BoundaryLabel,
    pub anchor_angle: Option<f64>,
    pub is_brfp: bool,
    /// min/max of `d(γ(t), f(γ(t)))` over the last half of the grid.
    pub displacement_liminf: f64,
    pub displacement_limsup: f64,
    /// One-step along-ray dilation `log λ_{η,p}(f)`.
    pub log_dilation: f64,
    /// `|log λ| ≤ liminf ≤ limsup` held on the sampled trace.
    pub bracketing_ok: bool,
    /// Empirical excess `limsup − |log λ|`.
    pub c_emp: f64,
    pub dilation_table: Option<DilationTable>,
    pub classification: BrfpClass,
}

impl BrfpRecord {
    pub fn stable(&self) -> Option<f64> {
        self.dilation_table.as_ref().map(|t| t.stable)
    }
}

/// Probes the anchor for the BRFP criterion `limsup_t d(γ(t), f(γ(t))) < ∞`
/// (finite-horizon form: the displacement trace is bounded and flat over
/// the last half of the grid) and records the displacement bracketing
/// around `|log λ|`.
pub fn detect_brfp(map: &MapHandle, anchor: &BoundaryAnchor, t_max: f64) -> Result<BrfpRecord> {
    let steps = 120;
    let mut disp = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        let g = anchor.point_at(t);
        disp.push(map.space.distance(g, map.apply(g)?)?);
    }
    let tail = &disp[steps / 2..];
    let liminf = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let limsup = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let flat = limsup - liminf <= DISP_FLAT_TOL;
    // the one-step dilation along the ray exists whether or not the anchor
    // is fixed; for non-fixed anchors it is only a diagnostic
    let log_dilation = {
        let p = anchor.basepoint;
        let gamma_t = anchor.point_at(t_max);
        let image = map.apply(gamma_t)?;
        map.space.distance(gamma_t, p)? - map.space.distance(image, p)?
    };
    let bracketing_ok = log_dilation.abs() <= liminf + 1e-6;
    Ok(BrfpRecord {
        label: anchor.label,
        anchor_angle: anchor.anchor_angle(),
        is_brfp: flat,
        displacement_liminf: liminf,
        displacement_limsup: limsup,
        log_dilation,
        bracketing_ok,
        c_emp: limsup - log_dilation.abs(),
        dilation_table: None,
        classification: BrfpClass::Unknown,
    })
}

/// Full record: detection, iterate table and classification in one call.
pub fn brfp_record(
    map: &MapHandle,
    anchor: &BoundaryAnchor,
    n_max: usize,
    t_base: f64,
    delta: Option<&DeltaEstimate>,
) -> Result<BrfpRecord> {
    let mut record = detect_brfp(map, anchor, t_base.min(60.0))?;
    if record.is_brfp {
        let table = dilation_iterates(map, anchor, n_max.max(2), t_base, 1e-6, delta)?;
        record.classification = classify_brfp(&table);
        record.dilation_table = Some(table);
    }
    Ok(record)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalRelationsReport {
    pub checks: Vec<RelationCheck>,
    pub all_pass: bool,
}

pub const TOL_REL: f64 = 1e-3;

/// Global dilation identities tying the stable dilations to the divergence
/// rate and the Denjoy–Wolff point.
///
/// Non-elliptic maps: (a) `log Λ_ζ = −c(f)` at the Denjoy–Wolff point ζ;
/// (b) `log Λ_η ≥ −log Λ_ζ` for every other BRFP; (c) no BRFP besides ζ is
/// attracting or indifferent. Elliptic isometries: every BRFP is
/// indifferent; with a retract sample available, indifferent BRFPs must sit
/// in the closure of the sampled limit retract.
pub fn global_dilation_relations(
    map: &MapHandle,
    records: &[BrfpRecord],
    classification: &ClassificationResult,
    retract: Option<&RetractSample>,
) -> GlobalRelationsReport {
    let mut checks = Vec::new();
    let brfps: Vec<&BrfpRecord> = records.iter().filter(|r| r.is_brfp).collect();
    match classification.class {
        MapClass::Hyperbolic | MapClass::Parabolic => {
            let dw = classification
                .dw_label
                .and_then(|l| brfps.iter().find(|r| r.label.close_to(&l, 1e-6)).copied());
            match dw {
                None => checks.push(RelationCheck {
                    name: "denjoy-wolff anchor present".into(),
                    pass: false,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    detail: format!("no BRFP record matches {:?}", classification.dw_label),
                }),
                Some(dw) => {
                    let stable_dw = dw.stable().unwrap_or(f64::NAN);
                    let c = classification.c_estimate;
                    checks.push(RelationCheck {
                        name: "log Λ(dw) = -c(f)".into(),
                        pass: (stable_dw + c).abs() <= TOL_REL,
                        lhs: stable_dw,
                        rhs: -c,
                        detail: format!("|{stable_dw} + {c}|"),
                    });
                    for r in brfps.iter().filter(|r| !r.label.close_to(&dw.label, 1e-6)) {
                        let s = r.stable().unwrap_or(f64::NAN);
                        checks.push(RelationCheck {
                            name: format!("log Λ({:?}) ≥ -log Λ(dw)", r.label),
                            pass: s >= -stable_dw - TOL_REL,
                            lhs: s,
                            rhs: -stable_dw,
                            detail: String::new(),
                        });
                        checks.push(RelationCheck {
                            name: format!("{:?} is repelling", r.label),
                            pass: r.classification == BrfpClass::Repelling,
                            lhs: s,
                            rhs: 0.0,
                            detail: format!("classified {:?}", r.classification),
                        });
                    }
                }
            }
        }
        MapClass::Elliptic { .. } => {
            if map.is_isometry() {
                for r in &brfps {
                    checks.push(RelationCheck {
                        name: format!("elliptic isometry: {:?} indifferent", r.label),
                        pass: r.classification == BrfpClass::Indifferent,
                        lhs: r.stable().unwrap_or(f64::NAN),
                        rhs: 0.0,
                        detail: format!("classified {:?}", r.classification),
                    });
                }
            }
            if let Some(sample) = retract {
                for r in &brfps {
                    let touched = sample
                        .boundary_labels_touched
                        .iter()
                        .any(|l| l.close_to(&r.label, 1e-6));
                    let indifferent = r.classification == BrfpClass::Indifferent;
                    checks.push(RelationCheck {
                        name: format!(
                            "{:?}: indifferent ⇔ in retract closure",
                            r.label
                        ),
                        pass: touched == indifferent,
                        lhs: if indifferent { 1.0 } else { 0.0 },
                        rhs: if touched { 1.0 } else { 0.0 },
                        detail: format!("touched: {touched}, class {:?}", r.classification),
                    });
                }
            }
        }
        MapClass::Undetermined => checks.push(RelationCheck {
            name: "classification available".into(),
            pass: false,
            lhs: f64::NAN,
            rhs: f64::NAN,
            detail: "map classification undetermined".into(),
        }),
    }
    let all_pass = checks.iter().all(|c| c.pass);
    GlobalRelationsReport { checks, all_pass }
}
