//! Concrete proper geodesic Gromov hyperbolic model spaces.
//!
//! Every space exposes closed-form (or provably convergent) distance,
//! geodesic, unit-speed ray and boundary-label computations under the
//! curvature −1 convention. Internal coordinate charts:
//!
//! * `RealLine` — `c0 ∈ ℝ`;
//! * `LogLine` — `c0 > 0`, `d = |ln(c0/c0')|`;
//! * `UpperHalfPlane` — `(x, y)`, `y > 0`, `ds = |dz|/y`;
//! * `PoincareDisc` — stored on the upper half-plane chart through the Cayley
//!   map `w = i(1-z)/(1+z)`; constructors and labels speak disc language.
//!   The chart is an isometry onto the half-plane, and unlike raw disc
//!   coordinates it represents points hundreds of units deep without
//!   saturating at the unit circle;
//! * `SlitPlane` — native `z ∈ ℂ ∖ ℝ_{≤0}`; distances pull back through the
//!   principal square root onto the right half-plane;
//! * `L1Cylinder` — `(x, θ)` on `ℝ × S¹` with `d = |Δx| + d_{S¹}(Δθ)`;
//! * `FlatCylinder` — `(x, θ)` with the flat product metric
//!   `d = sqrt(Δx² + d_{S¹}(Δθ)²)`;
//! * `HyperbolicPuncturedCylinder` — `(α, t)`, `t > 0`, metric
//!   `(dα² + dt²)/t²` modulo `α ↦ α + 2π`; distances minimize the half-plane
//!   distance over deck translates `|k| ≤ K`.

pub mod halfplane;

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use halfplane as hp;

/// A point of a model space. Coordinates are space-specific and opaque
/// outside the owning space; combine points only within one space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub c0: f64,
    pub c1: f64,
}

impl Point {
    pub fn new(c0: f64, c1: f64) -> Point {
        Point { c0, c1 }
    }

    pub fn real(c0: f64) -> Point {
        Point { c0, c1: 0.0 }
    }
}

/// Arc-length distance on the unit circle, values in `[0, π]`.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let r = (a - b).rem_euclid(TAU);
    r.min(TAU - r)
}

/// Shortest signed representative of `b - a` on the circle, in `(-π, π]`.
pub fn circle_diff(a: f64, b: f64) -> f64 {
    let r = (b - a).rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Canonical boundary identifier, kind-specific per space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryLabel {
    /// `+∞` for line-like spaces and cylinders, `∞` for half-plane and slit
    /// plane, the cusp for the punctured cylinder.
    PlusInfinity,
    MinusInfinity,
    /// The boundary point `0` of the log-line, the slit tip.
    Zero,
    /// Unimodular point `e^{i angle}` of the disc, or a point of the `S¹`
    /// boundary circle of the punctured cylinder.
    Circle { angle: f64 },
    /// A finite real boundary point of the upper half-plane.
    Real { x: f64 },
}

impl BoundaryLabel {
    /// Angular/positional proximity test used when comparing an extracted
    /// limit label with a declared one.
    pub fn close_to(&self, other: &BoundaryLabel, tol: f64) -> bool {
        match (self, other) {
            (BoundaryLabel::Circle { angle: a }, BoundaryLabel::Circle { angle: b }) => {
                circle_dist(*a, *b) <= tol
            }
            (BoundaryLabel::Real { x: a }, BoundaryLabel::Real { x: b }) => (a - b).abs() <= tol,
            (a, b) => a == b,
        }
    }
}

/// Compact coordinate box (in the space's natural coordinates) used by the
/// seeded samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl SampleWindow {
    pub fn new(lo: [f64; 2], hi: [f64; 2]) -> SampleWindow {
        SampleWindow { lo, hi }
    }
}

fn default_deck() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpace {
    RealLine,
    LogLine,
    PoincareDisc,
    UpperHalfPlane,
    SlitPlane,
    L1Cylinder,
    FlatCylinder,
    HyperbolicPuncturedCylinder {
        #[serde(default = "default_deck")]
        deck_truncation: u32,
    },
}

use ModelSpace::*;

// ---------------------------------------------------------------------------
// Cayley chart for the disc
// ---------------------------------------------------------------------------

/// `w = i(1-z)/(1+z)`, mapping the open unit disc onto the upper half-plane
/// with `0 ↦ i`, `1 ↦ 0`, `-1 ↦ ∞`.
fn disc_to_chart(re: f64, im: f64) -> (f64, f64) {
    // (1 - z)/(1 + z), then multiply by i
    let (nr, ni) = (1.0 - re, -im);
    let (dr, di) = (1.0 + re, im);
    let den = dr * dr + di * di;
    let qr = (nr * dr + ni * di) / den;
    let qi = (ni * dr - nr * di) / den;
    (-qi, qr)
}

/// Inverse Cayley map `z = (i - w)/(i + w)`.
fn chart_to_disc(x: f64, y: f64) -> (f64, f64) {
    let (nr, ni) = (-x, 1.0 - y);
    let (dr, di) = (x, 1.0 + y);
    let den = dr * dr + di * di;
    (
        (nr * dr + ni * di) / den,
        (ni * dr - nr * di) / den,
    )
}

/// Chart image of the disc boundary point `e^{iφ}`: the real point
/// `tan(φ/2)`, with `φ = π` going to infinity.
fn disc_label_to_chart(angle: f64) -> Option<f64> {
    let a = circle_diff(0.0, angle); // normalize to (-π, π]
    if (a - PI).abs() < 1e-12 {
        None
    } else {
        Some((a / 2.0).tan())
    }
}

// ---------------------------------------------------------------------------
// Slit plane kernel coordinates
// ---------------------------------------------------------------------------

/// Kernel coordinates of a slit-plane point: with `w = √z` (principal
/// branch, `Re w > 0`), returns `(Im w, Re w)` so that `Re w` plays the role
/// of the half-plane height.
fn slit_kernel(p: Point) -> (f64, f64) {
    let w = num_complex::Complex64::new(p.c0, p.c1).sqrt();
    (w.im, w.re)
}

fn slit_from_kernel(x: f64, y: f64) -> Point {
    // w = y + i x, z = w²
    Point::new(y * y - x * x, 2.0 * x * y)
}

// ---------------------------------------------------------------------------
// Rays
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum RayRep {
    Line { x0: f64, dir: f64 },
    LogRay { t0: f64, dir: f64 },
    Hp(hp::HpRay),
    SlitHp(hp::HpRay),
    Cyl { x0: f64, theta: f64, dir: f64 },
    Cusp { alpha: f64, t0: f64 },
}

/// A Gromov boundary point represented by a unit-speed geodesic ray from a
/// basepoint, plus its canonical label. Doubles as the Busemann-point
/// representative used by the horofunction machinery.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryAnchor {
    pub space: ModelSpace,
    pub label: BoundaryLabel,
    pub basepoint: Point,
    rep: RayRep,
}

impl BoundaryAnchor {
    /// `γ(t)`; `γ(0)` is the basepoint and `d(γ(s), γ(t)) = |s - t|`.
    pub fn point_at(&self, t: f64) -> Point {
        match self.rep {
            RayRep::Line { x0, dir } => Point::real(x0 + dir * t),
            RayRep::LogRay { t0, dir } => Point::real(t0 * (dir * t).exp()),
            RayRep::Hp(ray) => {
                let (x, y) = ray.point_at(t);
                Point::new(x, y)
            }
            RayRep::SlitHp(ray) => {
                let (x, y) = ray.point_at(t);
                slit_from_kernel(x, y)
            }
            RayRep::Cyl { x0, theta, dir } => Point::new(x0 + dir * t, theta),
            RayRep::Cusp { alpha, t0 } => Point::new(alpha, t0 * t.exp()),
        }
    }

    /// The angular coordinate carried by cylinder rays (the Busemann points
    /// of the `ℓ¹` cylinder form a circle; the angle identifies which one).
    pub fn anchor_angle(&self) -> Option<f64> {
        match self.rep {
            RayRep::Cyl { theta, .. } => Some(theta),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// ModelSpace
// ---------------------------------------------------------------------------

impl ModelSpace {
    pub fn name(&self) -> &'static str {
        match self {
            RealLine => "real-line",
            LogLine => "log-line",
            PoincareDisc => "poincare-disc",
            UpperHalfPlane => "upper-half-plane",
            SlitPlane => "slit-plane",
            L1Cylinder => "l1-cylinder",
            FlatCylinder => "flat-cylinder",
            HyperbolicPuncturedCylinder { .. } => "hyperbolic-punctured-cylinder",
        }
    }

    /// Whether the Gromov and horofunction compactifications agree, so that
    /// along-ray dilation limits are exact dilations and base-point free.
    /// The `ℓ¹` cylinder's horofunction boundary is a pair of circles over
    /// the two Gromov endpoints, so it is flagged false; the punctured
    /// cylinder is flagged false conservatively.
    pub fn compactification_equivalent(&self) -> bool {
        !matches!(self, L1Cylinder | HyperbolicPuncturedCylinder { .. })
    }

    /// Build an internal point from natural coordinates (disc points are
    /// given as `z = a + bi`, `|z| < 1`).
    pub fn point(&self, a: f64, b: f64) -> Result<Point> {
        let p = match self {
            PoincareDisc => {
                if a * a + b * b >= 1.0 {
                    return Err(Error::Domain {
                        space: self.name(),
                        point: Point::new(a, b),
                        reason: "|z| must be < 1",
                    });
                }
                let (x, y) = disc_to_chart(a, b);
                Point::new(x, y)
            }
            _ => Point::new(a, b),
        };
        self.check_point(p)?;
        Ok(p)
    }

    /// Natural coordinates of a point (inverse of [`ModelSpace::point`]);
    /// used for display and CSV export.
    pub fn natural_coords(&self, p: Point) -> (f64, f64) {
        match self {
            PoincareDisc => chart_to_disc(p.c0, p.c1),
            _ => (p.c0, p.c1),
        }
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        let bad = |reason| {
            Err(Error::Domain {
                space: self.name(),
                point: p,
                reason,
            })
        };
        if !p.c0.is_finite() || !p.c1.is_finite() {
            return bad("coordinates must be finite");
        }
        match self {
            RealLine => Ok(()),
            LogLine => {
                if p.c0 > 0.0 {
                    Ok(())
                } else {
                    bad("log-line points need c0 > 0")
                }
            }
            PoincareDisc | UpperHalfPlane => {
                if p.c1 > 0.0 {
                    Ok(())
                } else {
                    bad("half-plane height must be positive")
                }
            }
            SlitPlane => {
                if p.c1 == 0.0 && p.c0 <= 0.0 {
                    bad("point lies on the slit ℝ_{≤0}")
                } else {
                    Ok(())
                }
            }
            L1Cylinder | FlatCylinder => Ok(()),
            HyperbolicPuncturedCylinder { .. } => {
                if p.c1 > 0.0 {
                    Ok(())
                } else {
                    bad("cylinder height must be positive")
                }
            }
        }
    }

    pub fn distance(&self, p: Point, q: Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(match self {
            RealLine => (p.c0 - q.c0).abs(),
            LogLine => (p.c0 / q.c0).ln().abs(),
            PoincareDisc | UpperHalfPlane => hp::dist(p.c0, p.c1, q.c0, q.c1),
            SlitPlane => {
                let (x1, y1) = slit_kernel(p);
                let (x2, y2) = slit_kernel(q);
                hp::dist(x1, y1, x2, y2)
            }
            L1Cylinder => (p.c0 - q.c0).abs() + circle_dist(p.c1, q.c1),
            FlatCylinder => (p.c0 - q.c0).hypot(circle_dist(p.c1, q.c1)),
            HyperbolicPuncturedCylinder { deck_truncation } => {
                deck_min_dist(p, q, *deck_truncation).0
            }
        })
    }

    /// Point at arc-length fraction `s ∈ [0, 1]` along a geodesic from `p`
    /// to `q`. Quotient spaces follow the minimizing deck representative,
    /// ties broken by smallest `|k|`, then `k ≥ 0`.
    pub fn geodesic_point(&self, p: Point, q: Point, s: f64) -> Result<Point> {
        self.check_point(p)?;
        self.check_point(q)?;
        if p == q {
            return Err(Error::InvalidParameter(
                "geodesic_point requires p ≠ q".into(),
            ));
        }
        Ok(match self {
            RealLine => Point::real(p.c0 + s * (q.c0 - p.c0)),
            LogLine => Point::real(((1.0 - s) * p.c0.ln() + s * q.c0.ln()).exp()),
            PoincareDisc | UpperHalfPlane => {
                let (x, y) = hp::geodesic_point(p.c0, p.c1, q.c0, q.c1, s);
                Point::new(x, y)
            }
            SlitPlane => {
                let (x1, y1) = slit_kernel(p);
                let (x2, y2) = slit_kernel(q);
                let (x, y) = hp::geodesic_point(x1, y1, x2, y2, s);
                slit_from_kernel(x, y)
            }
            L1Cylinder | FlatCylinder => {
                let dth = circle_diff(p.c1, q.c1);
                Point::new(p.c0 + s * (q.c0 - p.c0), p.c1 + s * dth)
            }
            HyperbolicPuncturedCylinder { deck_truncation } => {
                let (_, k) = deck_min_dist(p, q, *deck_truncation);
                let (x, y) =
                    hp::geodesic_point(p.c0, p.c1, q.c0 + TAU * k as f64, q.c1, s);
                Point::new(x, y)
            }
        })
    }

    /// Unit-speed geodesic ray from `basepoint` toward the boundary point
    /// named by `label`.
    pub fn ray_toward(&self, basepoint: Point, label: BoundaryLabel) -> Result<BoundaryAnchor> {
        self.check_point(basepoint)?;
        let invalid = || {
            Err(Error::InvalidLabel {
                space: self.name(),
                label,
            })
        };
        let rep = match (self, label) {
            (RealLine, BoundaryLabel::PlusInfinity) => RayRep::Line {
                x0: basepoint.c0,
                dir: 1.0,
            },
            (RealLine, BoundaryLabel::MinusInfinity) => RayRep::Line {
                x0: basepoint.c0,
                dir: -1.0,
            },
            (LogLine, BoundaryLabel::PlusInfinity) => RayRep::LogRay {
                t0: basepoint.c0,
                dir: 1.0,
            },
            (LogLine, BoundaryLabel::Zero) => RayRep::LogRay {
                t0: basepoint.c0,
                dir: -1.0,
            },
            (UpperHalfPlane, BoundaryLabel::PlusInfinity) => RayRep::Hp(
                hp::HpRay::from_basepoint_to_infinity(basepoint.c0, basepoint.c1),
            ),
            (UpperHalfPlane, BoundaryLabel::Real { x }) => RayRep::Hp(
                hp::HpRay::from_basepoint_to_real(basepoint.c0, basepoint.c1, x),
            ),
            (PoincareDisc, BoundaryLabel::Circle { angle }) => {
                RayRep::Hp(match disc_label_to_chart(angle) {
                    None => hp::HpRay::from_basepoint_to_infinity(basepoint.c0, basepoint.c1),
                    Some(xi) => {
                        hp::HpRay::from_basepoint_to_real(basepoint.c0, basepoint.c1, xi)
                    }
                })
            }
            (SlitPlane, BoundaryLabel::PlusInfinity) => {
                let (x, y) = slit_kernel(basepoint);
                RayRep::SlitHp(hp::HpRay::from_basepoint_to_infinity(x, y))
            }
            (SlitPlane, BoundaryLabel::Zero) => {
                let (x, y) = slit_kernel(basepoint);
                RayRep::SlitHp(hp::HpRay::from_basepoint_to_real(x, y, 0.0))
            }
            (L1Cylinder | FlatCylinder, BoundaryLabel::PlusInfinity) => RayRep::Cyl {
                x0: basepoint.c0,
                theta: basepoint.c1,
                dir: 1.0,
            },
            (L1Cylinder | FlatCylinder, BoundaryLabel::MinusInfinity) => RayRep::Cyl {
                x0: basepoint.c0,
                theta: basepoint.c1,
                dir: -1.0,
            },
            (HyperbolicPuncturedCylinder { .. }, BoundaryLabel::PlusInfinity) => RayRep::Cusp {
                alpha: basepoint.c0,
                t0: basepoint.c1,
            },
            _ => return invalid(),
        };
        Ok(BoundaryAnchor {
            space: self.clone(),
            label,
            basepoint,
            rep,
        })
    }

    /// Closed-form Busemann function `h_{a,p}(x)` for the anchor's boundary
    /// point, normalized to vanish at `p`. Errors with [`Error::NotAvailable`]
    /// when no exact formula is declared for the label.
    pub fn busemann_exact(&self, anchor: &BoundaryAnchor, p: Point, x: Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(x)?;
        let b = |pt: Point| -> Result<f64> {
            Ok(match (&anchor.rep, self) {
                (RayRep::Line { dir, .. }, RealLine) => -dir * pt.c0,
                (RayRep::LogRay { dir, .. }, LogLine) => -dir * pt.c0.ln(),
                (RayRep::Hp(hp::HpRay::Vertical { .. }), PoincareDisc | UpperHalfPlane) => {
                    hp::busemann_infinity(pt.c1)
                }
                (RayRep::Hp(hp::HpRay::ToReal { xi, .. }), PoincareDisc | UpperHalfPlane) => {
                    hp::busemann_real(*xi, pt.c0, pt.c1)
                }
                (RayRep::SlitHp(ray), SlitPlane) => {
                    let (kx, ky) = slit_kernel(pt);
                    match ray {
                        hp::HpRay::Vertical { .. } => hp::busemann_infinity(ky),
                        hp::HpRay::ToReal { xi, .. } => hp::busemann_real(*xi, kx, ky),
                    }
                }
                (RayRep::Cyl { theta, dir, .. }, L1Cylinder) => {
                    -dir * pt.c0 + circle_dist(pt.c1, *theta)
                }
                (RayRep::Cyl { dir, .. }, FlatCylinder) => -dir * pt.c0,
                (RayRep::Cusp { .. }, HyperbolicPuncturedCylinder { .. }) => -pt.c1.ln(),
                _ => return Err(Error::NotAvailable),
            })
        };
        Ok(b(x)? - b(p)?)
    }

    /// Canonical boundary labels swept when a map declares no fixed
    /// boundary data.
    pub fn canonical_labels(&self) -> Vec<BoundaryLabel> {
        match self {
            RealLine => vec![BoundaryLabel::PlusInfinity, BoundaryLabel::MinusInfinity],
            LogLine => vec![BoundaryLabel::PlusInfinity, BoundaryLabel::Zero],
            PoincareDisc => vec![
                BoundaryLabel::Circle { angle: 0.0 },
                BoundaryLabel::Circle { angle: PI },
                BoundaryLabel::Circle { angle: PI / 2.0 },
                BoundaryLabel::Circle { angle: -PI / 2.0 },
            ],
            UpperHalfPlane => vec![BoundaryLabel::PlusInfinity, BoundaryLabel::Real { x: 0.0 }],
            SlitPlane => vec![BoundaryLabel::PlusInfinity, BoundaryLabel::Zero],
            L1Cylinder | FlatCylinder => {
                vec![BoundaryLabel::PlusInfinity, BoundaryLabel::MinusInfinity]
            }
            HyperbolicPuncturedCylinder { .. } => vec![BoundaryLabel::PlusInfinity],
        }
    }

    /// Space-specific nearest-boundary-label heuristic for deep points.
    /// Returns `None` when the point is not decisively near the boundary.
    pub fn nearest_boundary_label(&self, p: Point) -> Option<BoundaryLabel> {
        match self {
            RealLine => {
                if p.c0 >= 25.0 {
                    Some(BoundaryLabel::PlusInfinity)
                } else if p.c0 <= -25.0 {
                    Some(BoundaryLabel::MinusInfinity)
                } else {
                    None
                }
            }
            LogLine => {
                if p.c0 >= 50.0 {
                    Some(BoundaryLabel::PlusInfinity)
                } else if p.c0 <= 0.02 {
                    Some(BoundaryLabel::Zero)
                } else {
                    None
                }
            }
            UpperHalfPlane => {
                if p.c0.hypot(p.c1) >= 25.0 || p.c1 >= 10.0 {
                    Some(BoundaryLabel::PlusInfinity)
                } else if p.c1 <= 0.1 {
                    Some(BoundaryLabel::Real { x: p.c0 })
                } else {
                    None
                }
            }
            PoincareDisc => {
                let (zr, zi) = chart_to_disc(p.c0, p.c1);
                if zr.hypot(zi) >= 0.9 {
                    Some(BoundaryLabel::Circle {
                        angle: f64::atan2(zi, zr),
                    })
                } else {
                    None
                }
            }
            SlitPlane => {
                let (kx, ky) = slit_kernel(p);
                if kx.hypot(ky) >= 25.0 {
                    Some(BoundaryLabel::PlusInfinity)
                } else if p.c0.hypot(p.c1) <= 1e-3 {
                    Some(BoundaryLabel::Zero)
                } else {
                    None
                }
            }
            L1Cylinder | FlatCylinder => {
                if p.c0 >= 25.0 {
                    Some(BoundaryLabel::PlusInfinity)
                } else if p.c0 <= -25.0 {
                    Some(BoundaryLabel::MinusInfinity)
                } else {
                    None
                }
            }
            HyperbolicPuncturedCylinder { .. } => {
                if p.c1 >= 1e4 {
                    Some(BoundaryLabel::PlusInfinity)
                } else if p.c1 <= 1e-4 {
                    Some(BoundaryLabel::Circle {
                        angle: p.c0.rem_euclid(TAU),
                    })
                } else {
                    None
                }
            }
        }
    }

    /// Default sampling window in natural coordinates.
    pub fn default_window(&self) -> SampleWindow {
        match self {
            RealLine => SampleWindow::new([-20.0, 0.0], [20.0, 0.0]),
            LogLine => SampleWindow::new([0.1, 0.0], [20.0, 0.0]),
            PoincareDisc => SampleWindow::new([-0.95, -0.95], [0.95, 0.95]),
            UpperHalfPlane => SampleWindow::new([-10.0, 0.1], [10.0, 10.0]),
            SlitPlane => SampleWindow::new([-8.0, -8.0], [8.0, 8.0]),
            L1Cylinder | FlatCylinder => SampleWindow::new([-10.0, 0.0], [10.0, TAU]),
            HyperbolicPuncturedCylinder { .. } => SampleWindow::new([0.0, 0.2], [TAU, 5.0]),
        }
    }

    /// Seeded uniform sample from `window` (natural coordinates), rejecting
    /// out-of-domain draws.
    pub fn sample_point<R: Rng>(&self, rng: &mut R, window: &SampleWindow) -> Point {
        loop {
            let a = rng.gen_range(window.lo[0]..=window.hi[0]);
            let b = if window.lo[1] == window.hi[1] {
                window.lo[1]
            } else {
                rng.gen_range(window.lo[1]..=window.hi[1])
            };
            if let PoincareDisc = self {
                if a * a + b * b > 0.995 * 0.995 {
                    continue;
                }
            }
            if let SlitPlane = self {
                // keep a sliver away from the slit so distances stay finite
                if b.abs() < 1e-6 && a < 1e-6 {
                    continue;
                }
            }
            if let Ok(p) = self.point(a, b) {
                return p;
            }
        }
    }
}

/// Deck-minimized half-plane distance on the punctured cylinder together
/// with the minimizing translate index (ties: smallest `|k|`, then `k ≥ 0`).
fn deck_min_dist(p: Point, q: Point, deck: u32) -> (f64, i64) {
    let mut best = f64::INFINITY;
    let mut best_k = 0i64;
    let mut order: Vec<i64> = vec![0];
    for k in 1..=(deck as i64) {
        order.push(k);
        order.push(-k);
    }
    for &k in &order {
        let d = hp::dist(p.c0, p.c1, q.c0 + TAU * k as f64, q.c1);
        if d < best - 1e-15 {
            best = d;
            best_k = k;
        }
    }
    (best, best_k)
}
