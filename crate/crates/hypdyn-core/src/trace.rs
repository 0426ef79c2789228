//! Orbit traces and their CSV export.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spaces::{BoundaryAnchor, ModelSpace, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitDirection {
    Forward,
    Backward,
}

/// Why an orbit stopped before the requested length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarlyStop {
    /// Index of the last valid point.
    pub last_valid: usize,
    pub reason: String,
}

/// A finite forward or backward orbit with per-step distances and derived
/// statistics. `points[n]` is `fⁿ(x0)` (forward) or the `n`-th backward
/// iterate (backward).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub points: Vec<Point>,
    /// `d(x_n, x_{n+1})`, length `points.len() - 1`.
    pub step_distances: Vec<f64>,
    /// `d(x_0, x_n)`, same length as `points`.
    pub displacement: Vec<f64>,
    pub direction: OrbitDirection,
    pub stopped_early: Option<EarlyStop>,
}

impl OrbitTrace {
    pub fn from_points(
        space: &ModelSpace,
        points: Vec<Point>,
        direction: OrbitDirection,
        stopped_early: Option<EarlyStop>,
    ) -> Result<OrbitTrace> {
        let mut step_distances = Vec::with_capacity(points.len().saturating_sub(1));
        for w in points.windows(2) {
            step_distances.push(space.distance(w[0], w[1])?);
        }
        let mut displacement = Vec::with_capacity(points.len());
        for &p in &points {
            displacement.push(space.distance(points[0], p)?);
        }
        Ok(OrbitTrace {
            points,
            step_distances,
            displacement,
            direction,
            stopped_early,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Point {
        *self.points.last().expect("orbit has at least one point")
    }

    /// CSV rows with the fixed column contract
    /// `n,t,coord_0,coord_1,step,displacement,h_anchor_0,...`.
    /// Coordinates are the space's natural coordinates; `step` on the last
    /// row is empty. Horofunction columns are filled from `h_values`
    /// (one inner vector per requested anchor, each of orbit length).
    pub fn to_csv(
        &self,
        space: &ModelSpace,
        anchors: &[&BoundaryAnchor],
        h_values: &[Vec<f64>],
    ) -> String {
        let mut header = String::from("n,t,coord_0,coord_1,step,displacement");
        for i in 0..anchors.len() {
            header.push_str(&format!(",h_anchor_{i}"));
        }
        let mut out = header;
        out.push('\n');
        for (n, &p) in self.points.iter().enumerate() {
            let (a, b) = space.natural_coords(p);
            let step = if n < self.step_distances.len() {
                format!("{}", self.step_distances[n])
            } else {
                String::new()
            };
            out.push_str(&format!(
                "{n},{t},{a},{b},{step},{disp}",
                t = n as f64,
                disp = self.displacement[n]
            ));
            for col in h_values {
                out.push_str(&format!(",{}", col[n]));
            }
            out.push('\n');
        }
        out
    }
}

/// CSV for a ray/dilation trace: `(t, g(t), displacement(t))` triples under
/// the same fixed header shape.
pub fn ray_trace_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("n,t,coord_0,coord_1,step,displacement\n");
    for (i, &(t, g, disp)) in rows.iter().enumerate() {
        out.push_str(&format!("{i},{t},{g},,,{disp}\n"));
    }
    out
}
