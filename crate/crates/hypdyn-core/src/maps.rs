//! Non-expanding self-maps of the model spaces.
//!
//! A [`MapHandle`] binds a [`MapKind`] to its space and exposes `apply`, an
//! optional exact inverse, declared fixed boundary labels and a seeded
//! non-expansivity check. The catalog covers every map the lab studies:
//! disc automorphisms and rotations, `z²`, the half-plane clamp, the
//! parabolic square-root map `z ↦ √(z² − 1)`, translations of line-like
//! spaces and the slit plane, cylinder shift–rotations and the
//! angle-rotating height-doubling map of the punctured cylinder.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{BoundaryLabel, ModelSpace, Point, SampleWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    Identity,
    /// Disc automorphism `z ↦ (z + a)/(1 + a z)` with real `a ∈ (-1, 1)`.
    /// On the half-plane chart this is `w ↦ w (1-a)/(1+a)`.
    DiscAutomorphism { a: f64 },
    /// Disc rotation `z ↦ e^{iθ} z`, an elliptic isometry.
    DiscRotation { theta: f64 },
    /// The holomorphic self-map `z ↦ z²` of the disc.
    DiscSquare,
    /// `x + iy ↦ [x-1]_+ - [-x-1]_+ + iy` on the upper half-plane: shrinks
    /// the horizontal coordinate toward 0 by one unit per step and fixes the
    /// imaginary axis pointwise.
    HalfPlaneClamp,
    /// `z ↦ √(z² - 1)` on the upper half-plane (the square root branch with
    /// positive imaginary part).
    SqrtShift,
    /// `p ↦ p + c` on the real line, log-line or slit plane.
    Translate { c: f64 },
    /// `(x, θ) ↦ (x + step, θ + theta)` on either cylinder.
    CylinderIsometry { step: f64, theta: f64 },
    /// `(α, t) ↦ (α + theta, 2t)` on the punctured cylinder.
    PuncturedDoubling { theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapHandle {
    pub space: ModelSpace,
    pub kind: MapKind,
    pub name: String,
}

impl MapHandle {
    pub fn new(space: ModelSpace, kind: MapKind) -> Result<MapHandle> {
        let ok = matches!(
            (&space, &kind),
            (_, MapKind::Identity)
                | (ModelSpace::PoincareDisc, MapKind::DiscAutomorphism { .. })
                | (ModelSpace::PoincareDisc, MapKind::DiscRotation { .. })
                | (ModelSpace::PoincareDisc, MapKind::DiscSquare)
                | (ModelSpace::UpperHalfPlane, MapKind::HalfPlaneClamp)
                | (ModelSpace::UpperHalfPlane, MapKind::SqrtShift)
                | (ModelSpace::RealLine, MapKind::Translate { .. })
                | (ModelSpace::LogLine, MapKind::Translate { .. })
                | (ModelSpace::SlitPlane, MapKind::Translate { .. })
                | (ModelSpace::L1Cylinder, MapKind::CylinderIsometry { .. })
                | (ModelSpace::FlatCylinder, MapKind::CylinderIsometry { .. })
                | (
                    ModelSpace::HyperbolicPuncturedCylinder { .. },
                    MapKind::PuncturedDoubling { .. }
                )
        );
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "map {kind:?} is not defined on {}",
                space.name()
            )));
        }
        if let MapKind::DiscAutomorphism { a } = kind {
            if a.abs() >= 1.0 || a.is_nan() {
                return Err(Error::InvalidParameter(
                    "disc automorphism needs |a| < 1".into(),
                ));
            }
        }
        let name = match &kind {
            MapKind::Identity => "identity".to_string(),
            MapKind::DiscAutomorphism { a } => format!("disc-automorphism(a={a})"),
            MapKind::DiscRotation { theta } => format!("disc-rotation(theta={theta})"),
            MapKind::DiscSquare => "disc-square".to_string(),
            MapKind::HalfPlaneClamp => "half-plane-clamp".to_string(),
            MapKind::SqrtShift => "sqrt-shift".to_string(),
            MapKind::Translate { c } => format!("translate(c={c})"),
            MapKind::CylinderIsometry { step, theta } => {
                format!("cylinder-isometry(step={step},theta={theta})")
            }
            MapKind::PuncturedDoubling { theta } => format!("punctured-doubling(theta={theta})"),
        };
        Ok(MapHandle { space, kind, name })
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        self.space.check_point(p)?;
        let q = match &self.kind {
            MapKind::Identity => p,
            MapKind::DiscAutomorphism { a } => {
                let mu = (1.0 - a) / (1.0 + a);
                Point::new(p.c0 * mu, p.c1 * mu)
            }
            MapKind::DiscRotation { theta } => {
                // chart conjugate of z ↦ e^{iθ} z: the elliptic Möbius map
                // w ↦ (c w + s)/(-s w + c), c = cos(θ/2), s = sin(θ/2)
                let (s, c) = (theta / 2.0).sin_cos();
                let w = Complex64::new(p.c0, p.c1);
                let img = (c * w + s) / (-s * w + c);
                Point::new(img.re, img.im)
            }
            MapKind::DiscSquare => {
                let (a, b) = self.space.natural_coords(p);
                let z = Complex64::new(a, b);
                let z2 = z * z;
                self.space.point(z2.re, z2.im)?
            }
            MapKind::HalfPlaneClamp => {
                let x = p.c0;
                let clamped = (x - 1.0).max(0.0) - (-x - 1.0).max(0.0);
                Point::new(clamped, p.c1)
            }
            MapKind::SqrtShift => {
                let z = Complex64::new(p.c0, p.c1);
                let w = z * z - Complex64::new(1.0, 0.0);
                let mut r = w.sqrt();
                if r.im < 0.0 {
                    r = -r;
                }
                Point::new(r.re, r.im)
            }
            MapKind::Translate { c } => Point::new(p.c0 + c, p.c1),
            MapKind::CylinderIsometry { step, theta } => Point::new(p.c0 + step, p.c1 + theta),
            MapKind::PuncturedDoubling { theta } => Point::new(p.c0 + theta, 2.0 * p.c1),
        };
        self.space.check_point(q)?;
        Ok(q)
    }

    pub fn apply_n(&self, p: Point, n: usize) -> Result<Point> {
        let mut q = p;
        for _ in 0..n {
            q = self.apply(q)?;
        }
        Ok(q)
    }

    pub fn has_exact_inverse(&self) -> bool {
        matches!(
            self.kind,
            MapKind::Identity
                | MapKind::DiscAutomorphism { .. }
                | MapKind::DiscRotation { .. }
                | MapKind::Translate { .. }
                | MapKind::CylinderIsometry { .. }
                | MapKind::PuncturedDoubling { .. }
        )
    }

    /// Exact inverse where declared. Errors with [`Error::NoInverse`] for
    /// maps without one, and with a domain error when the preimage leaves
    /// the space (the backward-orbit machinery reports that as termination).
    pub fn apply_inverse(&self, p: Point) -> Result<Point> {
        self.space.check_point(p)?;
        let q = match &self.kind {
            MapKind::Identity => p,
            MapKind::DiscAutomorphism { a } => {
                let mu = (1.0 - a) / (1.0 + a);
                Point::new(p.c0 / mu, p.c1 / mu)
            }
            MapKind::DiscRotation { theta } => {
                let (s, c) = (-theta / 2.0).sin_cos();
                let w = Complex64::new(p.c0, p.c1);
                let img = (c * w + s) / (-s * w + c);
                Point::new(img.re, img.im)
            }
            MapKind::Translate { c } => Point::new(p.c0 - c, p.c1),
            MapKind::CylinderIsometry { step, theta } => Point::new(p.c0 - step, p.c1 - theta),
            MapKind::PuncturedDoubling { theta } => Point::new(p.c0 - theta, p.c1 / 2.0),
            _ => return Err(Error::NoInverse),
        };
        self.space.check_point(q)?;
        Ok(q)
    }

    /// Whether the map is an isometry of its space. Translations are
    /// isometries only on the real line; on the log-line and slit plane they
    /// are strictly non-expanding.
    pub fn is_isometry(&self) -> bool {
        matches!(
            self.kind,
            MapKind::Identity
                | MapKind::DiscAutomorphism { .. }
                | MapKind::DiscRotation { .. }
                | MapKind::CylinderIsometry { .. }
        ) || matches!(
            (&self.space, &self.kind),
            (ModelSpace::RealLine, MapKind::Translate { .. })
        )
    }

    /// Boundary labels the map is known to fix in the geodesic-limit sense.
    pub fn declared_brfps(&self) -> Vec<BoundaryLabel> {
        match (&self.space, &self.kind) {
            (_, MapKind::Identity) => self.space.canonical_labels(),
            (_, MapKind::DiscAutomorphism { .. }) => vec![
                BoundaryLabel::Circle { angle: 0.0 },
                BoundaryLabel::Circle { angle: PI },
            ],
            (_, MapKind::DiscRotation { .. }) => vec![],
            (ModelSpace::UpperHalfPlane, MapKind::SqrtShift) => {
                vec![BoundaryLabel::PlusInfinity]
            }
            (ModelSpace::UpperHalfPlane, MapKind::HalfPlaneClamp) => {
                vec![BoundaryLabel::PlusInfinity, BoundaryLabel::Real { x: 0.0 }]
            }
            (ModelSpace::LogLine, MapKind::Translate { .. }) => {
                vec![BoundaryLabel::PlusInfinity]
            }
            (ModelSpace::SlitPlane, MapKind::Translate { .. }) => {
                vec![BoundaryLabel::PlusInfinity]
            }
            (ModelSpace::RealLine, MapKind::Translate { c }) => {
                if *c >= 0.0 {
                    vec![BoundaryLabel::PlusInfinity, BoundaryLabel::MinusInfinity]
                } else {
                    vec![BoundaryLabel::MinusInfinity, BoundaryLabel::PlusInfinity]
                }
            }
            (_, MapKind::CylinderIsometry { .. }) => {
                vec![BoundaryLabel::PlusInfinity, BoundaryLabel::MinusInfinity]
            }
            (_, MapKind::PuncturedDoubling { .. }) => vec![BoundaryLabel::PlusInfinity],
            _ => vec![],
        }
    }

    /// Labels to probe when searching for boundary regular fixed points:
    /// the declared ones, else the space's canonical sweep.
    pub fn brfp_candidates(&self) -> Vec<BoundaryLabel> {
        let declared = self.declared_brfps();
        if declared.is_empty() {
            self.space.canonical_labels()
        } else {
            declared
        }
    }
}

/// Result of a seeded non-expansivity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonExpandingReport {
    pub pairs: usize,
    pub max_excess: f64,
    pub pass: bool,
    /// Worst pair in natural coordinates, for failure forensics.
    pub witness: Option<((f64, f64), (f64, f64))>,
}

/// Samples `n_pairs` point pairs from `window` and checks
/// `d(f p, f q) ≤ d(p, q) + 1e-9`, failing loudly with the witnessing pair.
pub fn check_nonexpanding(
    map: &MapHandle,
    window: &SampleWindow,
    n_pairs: usize,
    seed: u64,
) -> Result<NonExpandingReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_excess = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..n_pairs {
        let p = map.space.sample_point(&mut rng, window);
        let q = map.space.sample_point(&mut rng, window);
        let d = map.space.distance(p, q)?;
        let df = map.space.distance(map.apply(p)?, map.apply(q)?)?;
        let excess = df - d;
        if excess > max_excess {
            max_excess = excess;
            witness = Some((map.space.natural_coords(p), map.space.natural_coords(q)));
        }
    }
    let pass = max_excess <= 1e-9;
    Ok(NonExpandingReport {
        pairs: n_pairs,
        max_excess,
        pass,
        witness: if pass { None } else { witness },
    })
}
