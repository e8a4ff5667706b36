//! Finite causal spaces and the Noldus distance between them.
//!
//! Two causal spaces are ε-close when there are maps in both directions whose
//! distortion of all pairwise causal distances is at most ε. The two maps are
//! constrained independently, so on finite spaces the distance is the larger of
//! the two separate minimal distortions.

mod bound;
mod estimate;
mod lattice;

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::num::Scalar;

pub use bound::{theorem_bound, theorem_bound_eps_power, BoundEval, BoundParse};
pub use estimate::{estimate_dn_upper, estimate_dn_upper_with_probes, DnUpperOptions, DnUpperReport};
pub use lattice::{
    bracket_points, build_lattice, check_brackets, check_lattice_gaps, probe_grid, BracketCheck,
    GapCheck, LatticeFrame, LatticeSpec,
};

/// An `n x n` causal-distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteCausalSpace<T> {
    n: usize,
    dist: Vec<T>,
}

impl<T: Scalar> FiniteCausalSpace<T> {
    /// Builds and validates against the three causal-distance axioms.
    pub fn new(n: usize, dist: Vec<T>) -> Result<Self> {
        let space = Self::new_unchecked(n, dist)?;
        space.validate()?;
        Ok(space)
    }

    /// Builds without checking the axioms (shape and finiteness still checked).
    pub fn new_unchecked(n: usize, dist: Vec<T>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(Error::invalid(format!(
                "{} entries cannot form a {n} x {n} matrix",
                dist.len()
            )));
        }
        if let Some(k) = dist.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::invalid(format!(
                "entry ({}, {}) = {} is not a nonnegative real",
                k / n,
                k % n,
                dist[k]
            )));
        }
        Ok(FiniteCausalSpace { n, dist })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(f(i, j));
            }
        }
        Self::new_unchecked(n, dist)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.dist[i * self.n + j]
    }

    /// Checks reflexivity, antisymmetry and the reverse triangle inequality,
    /// naming the first offending pair or triple.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let zero = T::zero();
        for i in 0..n {
            if self.get(i, i) != zero {
                return Err(Error::Axiom {
                    axiom: 1,
                    indices: vec![i],
                    detail: format!("d({i},{i}) = {}", self.get(i, i)),
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) > zero && self.get(j, i) > zero {
                    return Err(Error::Axiom {
                        axiom: 2,
                        indices: vec![i, j],
                        detail: format!(
                            "d({i},{j}) = {} and d({j},{i}) = {} are both positive",
                            self.get(i, j),
                            self.get(j, i)
                        ),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.get(i, j);
                if dij <= zero {
                    continue;
                }
                for k in 0..n {
                    let djk = self.get(j, k);
                    if djk > zero && dij + djk > self.get(i, k) {
                        return Err(Error::Axiom {
                            axiom: 3,
                            indices: vec![i, j, k],
                            detail: format!(
                                "d({i},{j}) + d({j},{k}) = {} exceeds d({i},{k}) = {}",
                                dij + djk,
                                self.get(i, k)
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Plain CSV matrix: `n` rows of `n` comma-separated values, `#` comments allowed.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads a CSV matrix and validates the axioms.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows: Vec<Vec<T>> = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|c| {
                    c.trim().parse::<T>().map_err(|_| Error::Parse {
                        line: ln + 1,
                        msg: format!("not a number: {c:?}"),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Parse {
                line: bad + 1,
                msg: format!("row {bad} has {} entries, expected {n}", rows[bad].len()),
            });
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }
}

/// Maps `psi: X1 -> X2` and `phi: X2 -> X1` as index tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapPair {
    pub psi: Vec<usize>,
    pub phi: Vec<usize>,
}

/// `max_{i,j} |d1(i, j) - d2(psi(i), psi(j))|`.
pub fn distortion<T: Scalar>(
    psi: &[usize],
    d1: &FiniteCausalSpace<T>,
    d2: &FiniteCausalSpace<T>,
) -> Result<T> {
    if psi.len() != d1.len() {
        return Err(Error::invalid(format!(
            "map has {} entries for a space of {} points",
            psi.len(),
            d1.len()
        )));
    }
    if let Some(&bad) = psi.iter().find(|&&k| k >= d2.len()) {
        return Err(Error::invalid(format!("image index {bad} out of range {}", d2.len())));
    }
    Ok(distortion_unchecked(psi, d1, d2))
}

fn distortion_unchecked<T: Scalar>(psi: &[usize], d1: &FiniteCausalSpace<T>, d2: &FiniteCausalSpace<T>) -> T {
    let mut worst = T::zero();
    for i in 0..d1.len() {
        for j in 0..d1.len() {
            let e = (d1.get(i, j) - d2.get(psi[i], psi[j])).abs();
            if e > worst {
                worst = e;
            }
        }
    }
    worst
}

/// Result of the exhaustive search, with minimizing maps.
#[derive(Clone, Debug, PartialEq)]
pub struct NoldusExact<T> {
    pub distance: T,
    pub maps: MapPair,
    pub psi_distortion: T,
    pub phi_distortion: T,
}

/// Largest space size accepted by [`noldus_exact`] unless overridden.
pub const DEFAULT_EXACT_MAX_SIZE: usize = 6;

/// Lowest-distortion map `X1 -> X2` among all `|X2|^|X1|`, first in
/// lexicographic order on ties.
fn best_map<T: Scalar>(d1: &FiniteCausalSpace<T>, d2: &FiniteCausalSpace<T>) -> (Vec<usize>, T) {
    let (n, m) = (d1.len(), d2.len());
    if n == 0 {
        return (Vec::new(), T::zero());
    }
    let mut map = vec![0usize; n];
    let mut best = (map.clone(), distortion_unchecked(&map, d1, d2));
    loop {
        // odometer increment
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            map[k] += 1;
            if map[k] < m {
                break;
            }
            map[k] = 0;
        }
        let e = distortion_unchecked(&map, d1, d2);
        if e < best.1 {
            best = (map.clone(), e);
        }
    }
}

/// Exact Noldus distance between two small finite causal spaces.
///
/// Both spaces must have at most `max_size` points (enumeration cost
/// `m^n + n^m`).
pub fn noldus_exact<T: Scalar>(
    x1: &FiniteCausalSpace<T>,
    x2: &FiniteCausalSpace<T>,
    max_size: usize,
) -> Result<NoldusExact<T>> {
    let largest = x1.len().max(x2.len());
    if largest > max_size {
        return Err(Error::Budget {
            what: "exact Noldus distance (space size)",
            needed: largest as f64,
            limit: max_size as f64,
            hint: Some("use estimate_dN_upper (noldus::estimate_dn_upper) for larger spaces".into()),
        });
    }
    if x1.is_empty() != x2.is_empty() {
        return Err(Error::invalid("no map exists between an empty and a nonempty space"));
    }
    let (psi, psi_distortion) = best_map(x1, x2);
    let (phi, phi_distortion) = best_map(x2, x1);
    Ok(NoldusExact {
        distance: if psi_distortion > phi_distortion { psi_distortion } else { phi_distortion },
        maps: MapPair { psi, phi },
        psi_distortion,
        phi_distortion,
    })
}
