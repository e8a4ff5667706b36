//! Patience-sorting longest chains in two dimensions.
//!
//! In light-cone coordinates `u = t - x`, `v = t + x` the causal order of 1+1
//! Minkowski space is the strict product order on `(u, v)`, because
//! `dt^2 - dx^2 = du * dv`. A longest chain is then a longest strictly
//! increasing subsequence of `v` once points are sorted by `u`.

use crate::num::Scalar;
use crate::pointset::PointSet;

pub(crate) fn lightcone<T: Scalar>(points: &PointSet<T>) -> Vec<(T, T)> {
    debug_assert_eq!(points.dim(), 2);
    points.iter().map(|p| (p[0] - p[1], p[0] + p[1])).collect()
}

/// Longest chain ending at each element under the strict product order.
///
/// Returns the chain length (counting the element) and the predecessor on one
/// such chain. `O(n log n)`.
pub(crate) fn product_order_depths<T: Scalar>(uv: &[(T, T)]) -> (Vec<u32>, Vec<Option<u32>>) {
    let n = uv.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    // equal u never chain, so among them the larger v must come first
    order.sort_unstable_by(|&a, &b| {
        let (ua, va) = uv[a as usize];
        let (ub, vb) = uv[b as usize];
        ua.partial_cmp(&ub)
            .unwrap()
            .then_with(|| vb.partial_cmp(&va).unwrap())
    });
    let mut depth = vec![0u32; n];
    let mut pred = vec![None; n];
    // tails[k] = element ending an increasing run of length k + 1 with the smallest v
    let mut tails: Vec<u32> = Vec::new();
    for e in order {
        let v = uv[e as usize].1;
        let pos = tails.partition_point(|&t| uv[t as usize].1 < v);
        if pos > 0 {
            pred[e as usize] = Some(tails[pos - 1]);
        }
        depth[e as usize] = pos as u32 + 1;
        if pos == tails.len() {
            tails.push(e);
        } else {
            tails[pos] = e;
        }
    }
    (depth, pred)
}
