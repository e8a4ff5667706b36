//! The induced causal order on a sample, longest-chain heights and the
//! discrete causal distance `D(x, y) = H(<x, y> ∩ P) / (c_d λ^{1/d})`.

mod dag;
mod lis;

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{check_dims, timelike_future};
use crate::num::Scalar;
use crate::pointset::PointSet;
use crate::sampling::CausetSample;

/// A longest chain: its length and the indices realizing it, earliest first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeightResult {
    pub height: usize,
    pub witness_chain: Vec<usize>,
}

impl HeightResult {
    fn from_depths(depth: &[u32], pred: &[Option<u32>]) -> Self {
        let Some((end, &h)) = depth.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))) else {
            return HeightResult::default();
        };
        let mut chain = Vec::with_capacity(h as usize);
        let mut cur = Some(end as u32);
        while let Some(i) = cur {
            chain.push(i as usize);
            cur = pred[i as usize];
        }
        chain.reverse();
        HeightResult {
            height: h as usize,
            witness_chain: chain,
        }
    }

    /// CSV with a single `index` column.
    pub fn write_witness_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index")?;
        for i in &self.witness_chain {
            writeln!(w, "{i}")?;
        }
        Ok(())
    }
}

fn time_order_of<T: Scalar>(points: &PointSet<T>) -> Vec<usize> {
    if points.is_time_sorted() {
        (0..points.len()).collect()
    } else {
        points.time_order()
    }
}

/// Longest chain ending at each point (counting the point itself).
pub fn chain_depths<T: Scalar>(points: &PointSet<T>) -> Vec<u32> {
    if points.dim() == 2 {
        lis::product_order_depths(&lis::lightcone(points)).0
    } else {
        dag::layered_depths(points, &time_order_of(points)).0
    }
}

/// Height of a point set: light-cone patience sorting in two dimensions,
/// dynamic programming over the time order otherwise.
pub fn height<T: Scalar>(points: &PointSet<T>) -> HeightResult {
    if points.dim() == 2 {
        height_lightcone(points).expect("two-dimensional input")
    } else {
        height_dag(points)
    }
}

/// Height by dynamic programming over the time order, any dimension.
///
/// The witness links each point to its earliest deepest predecessor, so for
/// time-sorted input ties go to the lowest index.
pub fn height_dag<T: Scalar>(points: &PointSet<T>) -> HeightResult {
    let (depth, pred) = dag::layered_depths(points, &time_order_of(points));
    HeightResult::from_depths(&depth, &pred)
}

/// Height of a two dimensional point set in `O(n log n)`.
pub fn height_lightcone<T: Scalar>(points: &PointSet<T>) -> Result<HeightResult> {
    if points.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: points.dim(),
        });
    }
    let (depth, pred) = lis::product_order_depths(&lis::lightcone(points));
    Ok(HeightResult::from_depths(&depth, &pred))
}

/// Indices of `points` inside the open interval `<x, y>`.
pub fn interval_members<T: Scalar>(points: &PointSet<T>, x: &[T], y: &[T]) -> Result<Vec<usize>> {
    check_dims(x, y)?;
    if x.len() != points.dim() {
        return Err(Error::DimensionMismatch {
            left: points.dim(),
            right: x.len(),
        });
    }
    Ok((0..points.len())
        .filter(|&i| {
            let p = points.point(i);
            timelike_future(x, p) && timelike_future(p, y)
        })
        .collect())
}

/// Height of `{p in points : x < p < y}`; witness indices refer to `points`.
pub fn interval_height_in<T: Scalar>(points: &PointSet<T>, x: &[T], y: &[T]) -> Result<HeightResult> {
    let members = interval_members(points, x, y)?;
    Ok(restricted_height(points, &members))
}

fn restricted_height<T: Scalar>(points: &PointSet<T>, members: &[usize]) -> HeightResult {
    let sub = points.subset(members);
    let mut h = height(&sub);
    for i in &mut h.witness_chain {
        *i = members[*i];
    }
    h
}

/// Height of the sample inside `<x, y>`.
///
/// `x` and `y` need not be sample points; if they are, they are excluded.
pub fn interval_height<T: Scalar>(s: &CausetSample<T>, x: &[T], y: &[T]) -> Result<HeightResult> {
    check_dims(x, y)?;
    if s.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: x.len(),
        });
    }
    let pts = &s.points;
    let lo = partition_time(pts, x[0]);
    let hi = partition_time(pts, y[0]);
    let members: Vec<usize> = (lo..hi.max(lo))
        .filter(|&i| {
            let p = pts.point(i);
            timelike_future(x, p) && timelike_future(p, y)
        })
        .collect();
    Ok(restricted_height(pts, &members))
}

/// First index whose time is strictly greater than `t` (points time-sorted).
fn partition_time<T: Scalar>(pts: &PointSet<T>, t: T) -> usize {
    let (mut lo, mut hi) = (0, pts.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pts.time(mid) <= t {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `c_d λ^{1/d}`, the expected height per unit proper time.
pub fn normalization<T: Scalar>(density: T, dim: usize, c_d: T) -> T {
    c_d * density.powf(T::one() / T::of_usize(dim))
}

/// `D(x, y) = H(<x, y> ∩ P) / (c_d λ^{1/d})`.
pub fn discrete_distance<T: Scalar>(s: &CausetSample<T>, x: &[T], y: &[T], c_d: T) -> Result<T> {
    if !(c_d > T::zero() && c_d.is_finite()) {
        return Err(Error::invalid(format!("c_d must be positive, got {c_d}")));
    }
    let h = interval_height(s, x, y)?.height;
    Ok(T::of_usize(h) / normalization(s.density, s.dim(), c_d))
}

/// Heights of `<points[src], points[j]>` for every `j` in the future of `src`.
///
/// Equivalent to [`interval_height_in`] against each target, in one
/// `O(m log m)` (two dimensions) or layered-DP pass over the `m` future points.
pub fn heights_from<T: Scalar>(points: &PointSet<T>, src: usize) -> Vec<(usize, u32)> {
    let s = points.point(src);
    let members: Vec<usize> = (0..points.len())
        .filter(|&j| timelike_future(s, points.point(j)))
        .collect();
    let depths = chain_depths(&points.subset(&members));
    members.into_iter().zip(depths).map(|(j, d)| (j, d - 1)).collect()
}

/// Heights of `<points[j], points[dst]>` for every `j` in the past of `dst`.
pub fn heights_to<T: Scalar>(points: &PointSet<T>, dst: usize) -> Vec<(usize, u32)> {
    let s = points.point(dst);
    let members: Vec<usize> = (0..points.len())
        .filter(|&j| timelike_future(points.point(j), s))
        .collect();
    // reversing time reverses the causal order
    let reversed = points.subset(&members).map_rows(|src, dst| {
        dst.copy_from_slice(src);
        dst[0] = -src[0];
    });
    let depths = chain_depths(&reversed);
    members.into_iter().zip(depths).map(|(j, d)| (j, d - 1)).collect()
}

/// Row-major `n x n` matrix of interval heights `H(<p_i, p_j>)`.
pub fn interval_height_matrix<T: Scalar>(points: &PointSet<T>) -> Vec<u32> {
    let n = points.len();
    let mut m = vec![0u32; n * n];
    for i in 0..n {
        for (j, h) in heights_from(points, i) {
            m[i * n + j] = h;
        }
    }
    m
}

/// The strict causal relation of a point set as successor lists.
#[derive(Clone, Debug)]
pub struct CausalOrder<'a, T> {
    points: &'a PointSet<T>,
    successors: Vec<Vec<usize>>,
}

impl<'a, T: Scalar> CausalOrder<'a, T> {
    /// `O(n^2)` construction; intended for small and medium sets.
    pub fn new(points: &'a PointSet<T>) -> Self {
        let n = points.len();
        let successors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| timelike_future(points.point(i), points.point(j)))
                    .collect()
            })
            .collect();
        CausalOrder { points, successors }
    }

    pub fn points(&self) -> &PointSet<T> {
        self.points
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// Reflexive order `i <= j`.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        i == j || self.successors[i].binary_search(&j).is_ok()
    }

    /// Longest chain by relaxing successor edges in time order.
    pub fn longest_chain(&self) -> HeightResult {
        let order = time_order_of(self.points);
        let n = self.points.len();
        let mut depth = vec![1u32; n];
        let mut pred = vec![None; n];
        for &i in &order {
            for &j in &self.successors[i] {
                if depth[i] + 1 > depth[j] {
                    depth[j] = depth[i] + 1;
                    pred[j] = Some(i as u32);
                }
            }
        }
        if n == 0 {
            return HeightResult::default();
        }
        HeightResult::from_depths(&depth, &pred)
    }
}
