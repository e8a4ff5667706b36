//! Upper bound on `d_N(P_λ ∩ Q, Q)` from the inclusion map and the bracketed
//! nearest-point map, with the continuum `Q` replaced by a probe grid.

use crate::causet::{heights_from, heights_to, normalization};
use crate::error::{Error, Result};
use crate::geometry::{causal_distance_unchecked, timelike_future, IntervalSpec};
use crate::num::Scalar;
use crate::pointset::PointSet;
use crate::sampling::CausetSample;

use super::lattice::{probe_grid, LatticeFrame};

#[derive(Clone, Debug, PartialEq)]
pub struct DnUpperOptions<T> {
    /// Probe points per axis over the bounding box of `Q`; at least 20.
    pub probe_resolution: usize,
    /// Scale of the lattice that defines the bracket points `x_±`.
    pub eps: T,
    /// Samples up to this size use every sample point as a pair source;
    /// larger samples use only the images of the probes.
    pub full_pair_limit: usize,
}

impl<T: Scalar> DnUpperOptions<T> {
    pub fn new(probe_resolution: usize, eps: T) -> Self {
        DnUpperOptions {
            probe_resolution,
            eps,
            full_pair_limit: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DnUpperReport<T> {
    /// Larger of the two distortions.
    pub upper: T,
    /// Distortion of the inclusion `P_λ ∩ Q -> Q`.
    pub inclusion_distortion: T,
    /// Distortion of the probe map `Q -> P_λ ∩ Q`.
    pub nearest_distortion: T,
    pub probes: usize,
    /// Probes whose bracket interval held no sample point.
    pub fallbacks: usize,
    /// Sample points whose pairs entered the inclusion term.
    pub sources: usize,
    /// True when every sample pair was examined.
    pub exhaustive_pairs: bool,
    /// `h · spacing · √d` for the probe grid (zero for explicit probes).
    pub discretization_error: T,
}

/// Upper-bound estimate for a sample over an interval region.
pub fn estimate_dn_upper<T: Scalar>(
    s: &CausetSample<T>,
    c_d: T,
    opts: &DnUpperOptions<T>,
) -> Result<DnUpperReport<T>> {
    let q = s
        .region
        .as_interval()
        .ok_or_else(|| Error::invalid("the estimator needs a sample over an interval region"))?
        .clone();
    if opts.probe_resolution < 20 {
        return Err(Error::invalid(format!(
            "probe resolution must be at least 20, got {}",
            opts.probe_resolution
        )));
    }
    let probes = probe_grid(&q, opts.probe_resolution);
    let mut report = estimate_dn_upper_with_probes(s, c_d, &probes, &q, opts)?;
    let (lo, hi) = q.bounding_box();
    let spacing = lo
        .iter()
        .zip(&hi)
        .map(|(&a, &b)| (b - a) / T::of_usize(opts.probe_resolution))
        .fold(T::zero(), T::max);
    report.discretization_error = q.proper_time * spacing * T::of_usize(q.dim()).sqrt();
    Ok(report)
}

/// Same estimate with an explicit set of continuum probe points standing in
/// for `Q`.
pub fn estimate_dn_upper_with_probes<T: Scalar>(
    s: &CausetSample<T>,
    c_d: T,
    probes: &PointSet<T>,
    q: &IntervalSpec<T>,
    opts: &DnUpperOptions<T>,
) -> Result<DnUpperReport<T>> {
    if s.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if !(c_d > T::zero() && c_d.is_finite()) {
        return Err(Error::invalid(format!("c_d must be positive, got {c_d}")));
    }
    if probes.dim() != s.dim() || q.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: probes.dim(),
        });
    }
    let frame = LatticeFrame::new(q, opts.eps)?;
    let pts = &s.points;
    let n = pts.len();
    let norm = normalization(s.density, s.dim(), c_d);

    let mut fallbacks = 0;
    let images: Vec<usize> = probes
        .iter()
        .map(|x| {
            let (lo, hi) = frame.bracket(x);
            match nearest_in_interval(pts, x, &lo, &hi) {
                Some(i) => i,
                None => {
                    fallbacks += 1;
                    nearest(pts, x)
                }
            }
        })
        .collect();

    let exhaustive_pairs = n <= opts.full_pair_limit;
    let sources: Vec<usize> = if exhaustive_pairs {
        (0..n).collect()
    } else {
        let mut v = images.clone();
        v.sort_unstable();
        v.dedup();
        v
    };

    // distinct probe images, and the heights between them
    let mut distinct = images.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut slot = vec![usize::MAX; n];
    for (k, &i) in distinct.iter().enumerate() {
        slot[i] = k;
    }
    let m = distinct.len();
    let mut image_heights = vec![0u32; m * m];

    let mut inclusion = T::zero();
    for &a in &sources {
        let pa = pts.point(a);
        let fwd = heights_from(pts, a);
        for &(b, h) in &fwd {
            let err = (T::of(h as f64) / norm - causal_distance_unchecked(pa, pts.point(b))).abs();
            inclusion = inclusion.max(err);
            if slot[a] != usize::MAX && slot[b] != usize::MAX {
                image_heights[slot[a] * m + slot[b]] = h;
            }
        }
        for (b, h) in heights_to(pts, a) {
            let err = (T::of(h as f64) / norm - causal_distance_unchecked(pts.point(b), pa)).abs();
            inclusion = inclusion.max(err);
        }
    }
    let mut nearest_term = T::zero();
    for (i, x) in probes.iter().enumerate() {
        for (j, y) in probes.iter().enumerate() {
            if i == j {
                continue;
            }
            let (a, b) = (images[i], images[j]);
            let discrete = if a == b {
                T::zero()
            } else {
                T::of(image_heights[slot[a] * m + slot[b]] as f64) / norm
            };
            let err = (discrete - causal_distance_unchecked(x, y)).abs();
            nearest_term = nearest_term.max(err);
        }
    }

    Ok(DnUpperReport {
        upper: inclusion.max(nearest_term),
        inclusion_distortion: inclusion,
        nearest_distortion: nearest_term,
        probes: probes.len(),
        fallbacks,
        sources: sources.len(),
        exhaustive_pairs,
        discretization_error: T::zero(),
    })
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&p, &q)| acc + (p - q) * (p - q))
}

/// First index with time `>= t` (points time-sorted).
fn lower_bound<T: Scalar>(pts: &PointSet<T>, t: T) -> usize {
    let (mut lo, mut hi) = (0, pts.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pts.time(mid) < t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn nearest_in_interval<T: Scalar>(pts: &PointSet<T>, x: &[T], lo: &[T], hi: &[T]) -> Option<usize> {
    let start = lower_bound(pts, lo[0]);
    let mut best: Option<(usize, T)> = None;
    for i in start..pts.len() {
        let p = pts.point(i);
        if p[0] >= hi[0] {
            break;
        }
        if timelike_future(lo, p) && timelike_future(p, hi) {
            let d = sq_dist(p, x);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Euclidean nearest sample point, scanning outward in time from `x`.
fn nearest<T: Scalar>(pts: &PointSet<T>, x: &[T]) -> usize {
    let n = pts.len();
    let mid = lower_bound(pts, x[0]);
    let mut best = (usize::MAX, T::infinity());
    let (mut down, mut up) = (mid, mid);
    loop {
        let mut moved = false;
        if up < n {
            let dt = pts.time(up) - x[0];
            if dt * dt < best.1 {
                let d = sq_dist(pts.point(up), x);
                if d < best.1 || best.0 == usize::MAX {
                    best = (up, d);
                }
                up += 1;
                moved = true;
            }
        }
        if down > 0 {
            let dt = x[0] - pts.time(down - 1);
            if dt * dt < best.1 {
                let d = sq_dist(pts.point(down - 1), x);
                if d < best.1 || best.0 == usize::MAX {
                    best = (down - 1, d);
                }
                down -= 1;
                moved = true;
            }
        }
        if !moved {
            return best.0;
        }
    }
}
