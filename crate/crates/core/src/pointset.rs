use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::num::Scalar;

/// Flat, row-major storage for a list of events of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(dim: usize) -> Self {
        Self::with_capacity(dim, 0)
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        assert!(dim >= 1, "points need at least one coordinate");
        PointSet {
            dim,
            coords: Vec::with_capacity(dim * n),
        }
    }

    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into rows of {dim}",
                coords.len()
            )));
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points(dim: usize, points: &[Point<T>]) -> Result<Self> {
        let mut set = Self::with_capacity(dim, points.len());
        for p in points {
            set.push(p)?;
        }
        Ok(set)
    }

    pub fn from_rows(rows: &[&[T]]) -> Result<Self> {
        let dim = rows
            .first()
            .map(|r| r.len())
            .ok_or_else(|| Error::invalid("cannot infer dimension of an empty row list"))?;
        let mut set = Self::with_capacity(dim, rows.len());
        for r in rows {
            set.push(r)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: &[T]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: p.len(),
            });
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn time(&self, i: usize) -> T {
        self.coords[i * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, T> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<Point<T>> {
        self.iter()
            .map(|c| Point::from_slice(c).expect("stored points are finite"))
            .collect()
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut out = Self::with_capacity(self.dim, indices.len());
        for &i in indices {
            out.coords.extend_from_slice(self.point(i));
        }
        out
    }

    /// Applies `f` to every row.
    pub fn map_rows(&self, mut f: impl FnMut(&[T], &mut [T])) -> Self {
        let mut coords = vec![T::zero(); self.coords.len()];
        for (src, dst) in self.iter().zip(coords.chunks_exact_mut(self.dim)) {
            f(src, dst);
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    /// Order by time, ties broken by the remaining coordinates.
    pub fn row_cmp(&self, i: usize, j: usize) -> Ordering {
        cmp_rows(self.point(i), self.point(j))
    }

    pub fn is_time_sorted(&self) -> bool {
        (1..self.len()).all(|i| self.row_cmp(i - 1, i) == Ordering::Less)
    }

    /// Indices in ascending time order.
    pub fn time_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| self.row_cmp(a, b));
        order
    }

    /// Sorts rows into ascending time order and returns the permutation applied
    /// (`new[k] = old[perm[k]]`).
    pub fn sort_by_time(&mut self) -> Vec<usize> {
        let order = self.time_order();
        *self = self.subset(&order);
        order
    }
}

pub(crate) fn cmp_rows<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}
