//! Space-agnostic metric primitives: Gromov products, four-point
//! hyperbolicity-constant estimation, discrete quasi-geodesic certification,
//! geodesic regions and empirical Hausdorff distances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{BoundaryAnchor, ModelSpace, Point, SampleWindow};

/// `(x, y)_w = ½(d(x,w) + d(y,w) − d(x,y))`. Symmetric in `x, y` and
/// nonnegative by the triangle inequality.
pub fn gromov_product(space: &ModelSpace, x: Point, y: Point, w: Point) -> Result<f64> {
    let dxw = space.distance(x, w)?;
    let dyw = space.distance(y, w)?;
    let dxy = space.distance(x, y)?;
    Ok(0.5 * (dxw + dyw - dxy))
}

/// Window-relative estimate of the four-point hyperbolicity constant.
/// `four_point_C` is a max over sampled quadruples, hence a lower bound for
/// the true constant; `implied_thin_delta = 4 · four_point_C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub four_point_c: f64,
    pub implied_thin_delta: f64,
    pub samples: usize,
    pub seed: u64,
}

const DELTA_SHARD: usize = 4096;

/// Seeded four-point scan: `max over (w,x,y,z)` of
/// `min{(x,z)_w, (y,z)_w} − (x,y)_w`, clamped at 0. Quadruples are drawn in
/// shards of 4096 with per-shard seeds derived from the master seed, so the
/// estimate is deterministic and non-decreasing when `n_samples` grows by
/// whole shards.
pub fn estimate_delta(
    space: &ModelSpace,
    window: &SampleWindow,
    n_samples: usize,
    seed: u64,
) -> Result<DeltaEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be ≥ 1".into()));
    }
    let n_shards = n_samples.div_ceil(DELTA_SHARD);
    let shard_max = |shard: usize| -> Result<f64> {
        let lo = shard * DELTA_SHARD;
        let hi = ((shard + 1) * DELTA_SHARD).min(n_samples);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(shard as u64 + 1)));
        let mut best = 0.0f64;
        for _ in lo..hi {
            let w = space.sample_point(&mut rng, window);
            let x = space.sample_point(&mut rng, window);
            let y = space.sample_point(&mut rng, window);
            let z = space.sample_point(&mut rng, window);
            let xz = gromov_product(space, x, z, w)?;
            let yz = gromov_product(space, y, z, w)?;
            let xy = gromov_product(space, x, y, w)?;
            best = best.max(xz.min(yz) - xy);
        }
        Ok(best)
    };
    let shard_values: Result<Vec<f64>> = (0..n_shards).into_par_iter().map(shard_max).collect();
    let four_point_c = shard_values?
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(DeltaEstimate {
        four_point_c,
        implied_thin_delta: 4.0 * four_point_c,
        samples: n_samples,
        seed,
    })
}

/// Certificate that a finite sequence is (or fails to be) a discrete
/// `(A, B)`-quasi-geodesic on its window:
/// `A⁻¹|n−m| − B ≤ d(x_n, x_m) ≤ A|n−m| + B` for all pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiGeodesicCertificate {
    pub a: f64,
    pub b: f64,
    pub window: (usize, usize),
    /// Index pairs violating one of the two bounds under `(a, b)`.
    pub violations: Vec<(usize, usize)>,
    /// All points coincide; `A` is undefined and reported as 1.
    pub degenerate: bool,
    /// The additive constant demanded by the data before capping.
    pub required_b: f64,
}

impl QuasiGeodesicCertificate {
    pub fn valid(&self) -> bool {
        !self.degenerate && self.violations.is_empty()
    }
}

/// Additive-constant budget: a fit needing more slack than this is reported
/// through `violations` rather than silently absorbed, since any finite
/// sequence satisfies the bounds for a large enough `B`.
pub const QG_B_CAP: f64 = 10.0;

/// Two-pass fit: `A = max(1, max d/gap)` over all pairs, then the least `B`
/// making both bounds hold, capped at [`QG_B_CAP`] (or the hints, when
/// given). Violations are re-scanned against the returned `(A, B)`.
pub fn certify_discrete_quasigeodesic(
    space: &ModelSpace,
    seq: &[Point],
    a_hint: Option<f64>,
    b_hint: Option<f64>,
) -> Result<QuasiGeodesicCertificate> {
    if seq.len() < 2 {
        return Err(Error::InvalidParameter(
            "quasi-geodesic certification needs at least 2 points".into(),
        ));
    }
    let n = seq.len();
    let mut dist = vec![0.0f64; n * n];
    let mut max_d = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.distance(seq[i], seq[j])?;
            dist[i * n + j] = d;
            max_d = max_d.max(d);
        }
    }
    if max_d <= 1e-12 {
        return Ok(QuasiGeodesicCertificate {
            a: 1.0,
            b: 0.0,
            window: (0, n - 1),
            violations: Vec::new(),
            degenerate: true,
            required_b: 0.0,
        });
    }

    let a = match a_hint {
        Some(a) => a.max(1.0),
        None => {
            let mut ratio = 1.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    ratio = ratio.max(dist[i * n + j] / (j - i) as f64);
                }
            }
            ratio
        }
    };
    let mut required_b = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (j - i) as f64;
            let d = dist[i * n + j];
            required_b = required_b.max(d - a * gap).max(gap / a - d);
        }
    }
    let b = match b_hint {
        Some(b) => b.max(0.0),
        None => required_b.clamp(0.0, QG_B_CAP),
    };
    let mut violations = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (j - i) as f64;
            let d = dist[i * n + j];
            if d > a * gap + b + 1e-9 || d < gap / a - b - 1e-9 {
                violations.push((i, j));
            }
        }
    }
    Ok(QuasiGeodesicCertificate {
        a,
        b,
        window: (0, n - 1),
        violations,
        degenerate: false,
        required_b,
    })
}

/// Geodesic region `A(γ, R)`: the open `R`-neighborhood of a ray.
#[derive(Debug, Clone)]
pub struct GeodesicRegion {
    pub ray: BoundaryAnchor,
    pub r: f64,
}

/// Sampled distance from `x` to the ray trace `γ([0, T_max])`: a coarse
/// uniform grid followed by golden-section refinement around the coarse
/// minimizer (the shipped spaces have unimodal ray-distance functions).
/// Returns the distance and whether the minimizer sat at the grid edge
/// (inconclusive for the infimum over the full ray).
pub fn distance_to_ray(
    space: &ModelSpace,
    anchor: &BoundaryAnchor,
    x: Point,
    t_max: f64,
) -> Result<(f64, bool)> {
    if t_max <= 0.0 {
        return Err(Error::InvalidParameter("t_max must be > 0".into()));
    }
    let coarse = 96usize;
    let mut best_t = 0.0;
    let mut best_d = f64::INFINITY;
    for i in 0..=coarse {
        let t = t_max * i as f64 / coarse as f64;
        let d = space.distance(x, anchor.point_at(t))?;
        if d < best_d {
            best_d = d;
            best_t = t;
        }
    }
    let h = t_max / coarse as f64;
    let (mut lo, mut hi) = ((best_t - h).max(0.0), (best_t + h).min(t_max));
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        let d1 = space.distance(x, anchor.point_at(m1))?;
        let d2 = space.distance(x, anchor.point_at(m2))?;
        if d1 < d2 {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let d_star = space.distance(x, anchor.point_at(t_star))?.min(best_d);
    let at_edge = t_star > t_max - 2.0 * h;
    Ok((d_star, at_edge))
}

/// Membership of `x` in the sampled geodesic region, with the sampled
/// distance. The sampled distance upper-bounds the true infimum.
pub fn geodesic_region_contains(
    space: &ModelSpace,
    region: &GeodesicRegion,
    x: Point,
    t_max: f64,
) -> Result<(bool, f64)> {
    let (d, _) = distance_to_ray(space, &region.ray, x, t_max)?;
    Ok((d < region.r, d))
}

/// Max of the two directed sampled Hausdorff distances between point traces.
pub fn empirical_hausdorff(space: &ModelSpace, a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter(
            "empirical_hausdorff needs non-empty traces".into(),
        ));
    }
    let directed = |from: &[Point], to: &[Point]| -> Result<f64> {
        let mut worst = 0.0f64;
        for &p in from {
            let mut best = f64::INFINITY;
            for &q in to {
                best = best.min(space.distance(p, q)?);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(directed(a, b)?.max(directed(b, a)?))
}
