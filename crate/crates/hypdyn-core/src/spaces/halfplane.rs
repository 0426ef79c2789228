//! Shared kernel for the upper half-plane with the curvature −1 metric
//! `ds = |dz| / Im z`. The Poincaré disc (through the Cayley chart), the slit
//! plane (through the principal square root) and the universal cover of the
//! hyperbolic punctured cylinder all reduce to these routines.

/// Hyperbolic distance between `(x1, y1)` and `(x2, y2)`, `y > 0`.
///
/// Uses `d = 2 asinh(|z - w| / (2 sqrt(y1 y2)))`, which is exact for the
/// curvature −1 metric and well conditioned both for nearby points and for
/// points separated by hundreds of units.
pub fn dist(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let chord = (x1 - x2).hypot(y1 - y2);
    2.0 * (chord / (2.0 * (y1 * y2).sqrt())).asinh()
}

/// Point at arc-length fraction `s` along the geodesic from `z1` to `z2`.
pub fn geodesic_point(x1: f64, y1: f64, x2: f64, y2: f64, s: f64) -> (f64, f64) {
    let scale = y1.abs() + y2.abs();
    if (x1 - x2).abs() <= 1e-12 * (scale + (x1.abs() + x2.abs())) {
        // vertical geodesic: log-linear in height
        let y = ((1.0 - s) * y1.ln() + s * y2.ln()).exp();
        return (x1, y);
    }
    // semicircle centered at (c, 0) through both points
    let c = (x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2) / (2.0 * (x1 - x2));
    let r = (x1 - c).hypot(y1);
    // arc length along the circle is u(phi) = ln tan(phi/2)
    let u1 = (f64::atan2(y1, x1 - c) / 2.0).tan().ln();
    let u2 = (f64::atan2(y2, x2 - c) / 2.0).tan().ln();
    let u = (1.0 - s) * u1 + s * u2;
    let phi = 2.0 * u.exp().atan();
    (c + r * phi.cos(), r * phi.sin())
}

/// Unit-speed geodesic ray representation in half-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HpRay {
    /// Toward the boundary point at infinity: `γ(t) = x + i y0 e^t`.
    Vertical { x: f64, y0: f64 },
    /// Toward the finite boundary point `xi`. Obtained by conjugating the
    /// vertical ray with the isometry `z ↦ -1/(z - xi)`; `w0 = -1/(p - xi)`.
    ToReal { xi: f64, w0x: f64, w0y: f64 },
}

impl HpRay {
    pub fn from_basepoint_to_infinity(px: f64, py: f64) -> HpRay {
        HpRay::Vertical { x: px, y0: py }
    }

    pub fn from_basepoint_to_real(px: f64, py: f64, xi: f64) -> HpRay {
        // w0 = -1/(p - xi)
        let dx = px - xi;
        let dy = py;
        let n = dx * dx + dy * dy;
        HpRay::ToReal {
            xi,
            w0x: -dx / n,
            w0y: dy / n,
        }
    }

    pub fn point_at(&self, t: f64) -> (f64, f64) {
        match *self {
            HpRay::Vertical { x, y0 } => (x, y0 * t.exp()),
            HpRay::ToReal { xi, w0x, w0y } => {
                // γ(t) = xi - 1/(w0x + i w0y e^t)
                let wy = w0y * t.exp();
                let n = w0x * w0x + wy * wy;
                (xi - w0x / n, wy / n)
            }
        }
    }
}

/// Unnormalized Busemann value at the boundary point at infinity: `-ln y`.
pub fn busemann_infinity(y: f64) -> f64 {
    -y.ln()
}

/// Unnormalized Busemann value at the finite boundary point `xi`:
/// `ln(|z - xi|^2 / y)`, computed in log form so far-away points do not
/// overflow.
pub fn busemann_real(xi: f64, x: f64, y: f64) -> f64 {
    2.0 * (x - xi).hypot(y).ln() - y.ln()
}
