//! Numerical laboratory for forward and backward dynamics of non-expanding
//! self-maps of proper geodesic Gromov hyperbolic metric spaces.
//!
//! The crate ships a family of exactly-computable model spaces (Poincaré disc,
//! upper half-plane, slit plane, log-line, two cylinders, a hyperbolic
//! punctured cylinder and the real line), a catalog of non-expanding self-maps
//! on them, and the machinery to study their dynamics at desk scale:
//!
//! * [`metric`] — Gromov products, four-point hyperbolicity estimation,
//!   discrete quasi-geodesic certification, geodesic regions, empirical
//!   Hausdorff distances;
//! * [`spaces`] — distances, geodesics, unit-speed rays and boundary labels;
//! * [`horo`] — Busemann/horofunction evaluation, horoballs, Julia-type
//!   inequality verification;
//! * [`forward`] — forward orbits, the bounded/escaping dichotomy,
//!   divergence rate, elliptic/parabolic/hyperbolic classification and
//!   limit-retract sampling;
//! * [`dilation`] — dilations along rays, iterate tables, stable dilation via
//!   the Fekete rule, boundary regular fixed point detection and global
//!   dilation identities;
//! * [`backward`] — backward orbits by exact inverse or root solving, step
//!   profiles and the backward step rate, the horosphere-stopping orbit
//!   synthesizer, the seven-condition equivalence battery and the backward
//!   limit classification.
//!
//! All sampling is seeded and deterministic. Distances use the curvature −1
//! convention throughout (disc distance `2·arctanh`), so dilations of disc
//! automorphisms equal logarithms of classical angular derivatives.

pub mod backward;
pub mod dilation;
pub mod error;
pub mod forward;
pub mod horo;
pub mod maps;
pub mod metric;
pub mod spaces;
pub mod trace;

pub use error::{Error, Result};
pub use maps::{MapHandle, MapKind};
pub use spaces::{BoundaryAnchor, BoundaryLabel, ModelSpace, Point, SampleWindow};
