//! Longest chains by dynamic programming over the time order.

use crate::geometry::timelike_future;
use crate::num::Scalar;
use crate::pointset::PointSet;

/// Longest chain ending at each element, scanning elements in `order` (which
/// must be a time order).
///
/// Elements are grouped by their depth. For a new element the groups are
/// searched from the deepest down; the first group holding a causal
/// predecessor fixes the depth, and the earliest such predecessor (in `order`)
/// becomes the witness link. The result equals the plain
/// `1 + max over predecessors` recursion with the same tie-break.
pub(crate) fn layered_depths<T: Scalar>(
    points: &PointSet<T>,
    order: &[usize],
) -> (Vec<u32>, Vec<Option<u32>>) {
    let n = points.len();
    let mut depth = vec![0u32; n];
    let mut pred = vec![None; n];
    let mut layers: Vec<Vec<u32>> = Vec::new();
    for &e in order {
        let pe = points.point(e);
        let mut found = None;
        for (k, layer) in layers.iter().enumerate().rev() {
            if let Some(&i) = layer
                .iter()
                .find(|&&i| timelike_future(points.point(i as usize), pe))
            {
                found = Some((k, i));
                break;
            }
        }
        let d = match found {
            Some((k, i)) => {
                pred[e] = Some(i);
                k + 1
            }
            None => 0,
        };
        depth[e] = d as u32 + 1;
        if d == layers.len() {
            layers.push(Vec::new());
        }
        layers[d].push(e as u32);
    }
    (depth, pred)
}

/// The textbook quadratic recursion, kept as a reference for tests.
#[cfg(test)]
pub(crate) fn plain_depths<T: Scalar>(points: &PointSet<T>, order: &[usize]) -> (Vec<u32>, Vec<Option<u32>>) {
    let n = points.len();
    let mut depth = vec![0u32; n];
    let mut pred = vec![None; n];
    for (pos, &e) in order.iter().enumerate() {
        let mut best = 0;
        for &i in &order[..pos] {
            if depth[i] > best && timelike_future(points.point(i), points.point(e)) {
                best = depth[i];
                pred[e] = Some(i as u32);
            }
        }
        depth[e] = best + 1;
    }
    (depth, pred)
}
