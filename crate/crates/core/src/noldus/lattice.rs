//! The ε-lattice `Λ = ηZ^d ∩ B_η(Q)` with `η = ε² / (16 √d h)`, its bracket
//! points and checks of the four lattice properties.

use crate::error::{Error, Result};
use crate::geometry::{causal_distance_unchecked, Point, IntervalSpec};
use crate::num::Scalar;
use crate::pointset::PointSet;

/// Lattice parameters without the enumerated points.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFrame<T> {
    pub eps: T,
    pub q: IntervalSpec<T>,
    pub h: T,
    pub eta: T,
}

impl<T: Scalar> LatticeFrame<T> {
    pub fn new(q: &IntervalSpec<T>, eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps.is_finite()) {
            return Err(Error::invalid(format!("ε must be positive, got {eps}")));
        }
        if q.is_empty() {
            return Err(Error::EmptyInterval);
        }
        let h = q.proper_time;
        let sqrt_d = T::of_usize(q.dim()).sqrt();
        let eta = eps * eps / (T::of(16.0) * sqrt_d * h);
        Ok(LatticeFrame {
            eps,
            q: q.clone(),
            h,
            eta,
        })
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// Time offset `√d η` of the bracket points.
    pub fn bracket_offset(&self) -> T {
        T::of_usize(self.dim()).sqrt() * self.eta
    }

    /// Closed-ball membership in `B_η(Q)`.
    pub fn in_neighbourhood(&self, z: &[T]) -> bool {
        self.q.euclidean_distance(z) <= self.eta
    }

    /// Bounding box of `Q` grown by `η` on every side.
    pub fn inflated_box(&self) -> (Vec<T>, Vec<T>) {
        let (mut lo, mut hi) = self.q.bounding_box();
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            *a = *a - self.eta;
            *b = *b + self.eta;
        }
        (lo, hi)
    }

    /// Nearest point of `ηZ^d`, as integer indices.
    pub fn round_to_node(&self, x: &[T]) -> Vec<i64> {
        x.iter()
            .map(|&c| (c / self.eta).round().to_i64().expect("finite coordinate"))
            .collect()
    }

    pub fn node_coords(&self, idx: &[i64]) -> Vec<T> {
        idx.iter().map(|&k| T::of(k as f64) * self.eta).collect()
    }

    /// `(node - √d η e_t, node + √d η e_t)`.
    pub fn bracket_around(&self, node: &[T]) -> (Vec<T>, Vec<T>) {
        let s = self.bracket_offset();
        let mut minus = node.to_vec();
        let mut plus = node.to_vec();
        minus[0] = minus[0] - s;
        plus[0] = plus[0] + s;
        (minus, plus)
    }

    /// Brackets from the nearest point of `ηZ^d`. For `d <= 4` that point is
    /// within `η` of any `x` in `Q`, hence it is also the nearest lattice point.
    pub fn bracket(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let node = self.node_coords(&self.round_to_node(x));
        self.bracket_around(&node)
    }
}

/// The enumerated lattice.
#[derive(Clone, Debug)]
pub struct LatticeSpec<T> {
    pub frame: LatticeFrame<T>,
    pub points: PointSet<T>,
    /// Integer coordinates of each point, row-major with the same dimension.
    pub indices: Vec<i64>,
}

impl<T: Scalar> LatticeSpec<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn node_index(&self, i: usize) -> &[i64] {
        let d = self.frame.dim();
        &self.indices[i * d..(i + 1) * d]
    }
}

/// Enumerates `ηZ^d ∩ B_η(Q)` by scanning the inflated bounding box.
pub fn build_lattice<T: Scalar>(q: &IntervalSpec<T>, eps: T, max_points: usize) -> Result<LatticeSpec<T>> {
    let frame = LatticeFrame::new(q, eps)?;
    let dim = q.dim();
    let (lo, hi) = frame.inflated_box();
    let lo_idx: Vec<i64> = lo.iter().map(|&c| (c / frame.eta).ceil().to_i64().unwrap()).collect();
    let hi_idx: Vec<i64> = hi.iter().map(|&c| (c / frame.eta).floor().to_i64().unwrap()).collect();
    let box_nodes: f64 = lo_idx
        .iter()
        .zip(&hi_idx)
        .map(|(a, b)| (b - a + 1).max(0) as f64)
        .product();
    // the neighbourhood fills at least the fraction C_d of its box
    let expected = box_nodes * crate::geometry::diamond_constant::<f64>(dim)?;
    if expected > max_points as f64 {
        return Err(Error::Budget {
            what: "lattice points",
            needed: expected,
            limit: max_points as f64,
            hint: Some("increase ε or the lattice budget".into()),
        });
    }
    let mut points = PointSet::new(dim);
    let mut indices = Vec::new();
    let mut cur = lo_idx.clone();
    if cur.iter().zip(&hi_idx).any(|(a, b)| a > b) {
        return Ok(LatticeSpec { frame, points, indices });
    }
    loop {
        let z = frame.node_coords(&cur);
        if frame.in_neighbourhood(&z) {
            if points.len() >= max_points {
                return Err(Error::Budget {
                    what: "lattice points",
                    needed: (points.len() + 1) as f64,
                    limit: max_points as f64,
                    hint: Some("increase ε or the lattice budget".into()),
                });
            }
            points.push(&z)?;
            indices.extend_from_slice(&cur);
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(LatticeSpec { frame, points, indices });
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] <= hi_idx[k] {
                break;
            }
            cur[k] = lo_idx[k];
        }
    }
}

/// Bracket points `(x_-, x_+)` of `x`: the nearest lattice point moved by
/// `∓√d η` in time.
pub fn bracket_points<T: Scalar>(lattice: &LatticeSpec<T>, x: &[T]) -> Result<(Point<T>, Point<T>)> {
    let frame = &lattice.frame;
    if x.len() != frame.dim() {
        return Err(Error::DimensionMismatch {
            left: frame.dim(),
            right: x.len(),
        });
    }
    let (lo, hi) = frame.inflated_box();
    if x.iter().zip(lo.iter().zip(&hi)).any(|(&c, (&a, &b))| c < a || c > b) {
        return Err(Error::invalid("point lies outside the lattice's bounding box"));
    }
    let rounded = frame.node_coords(&frame.round_to_node(x));
    let node = if frame.in_neighbourhood(&rounded) {
        rounded
    } else {
        let sq = |p: &[T]| p.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        lattice
            .points
            .iter()
            .min_by(|a, b| sq(a).partial_cmp(&sq(b)).unwrap())
            .ok_or_else(|| Error::invalid("empty lattice"))?
            .to_vec()
    };
    let (m, p) = frame.bracket_around(&node);
    Ok((Point::new(m)?, Point::new(p)?))
}

/// Cell-centred grid of `resolution` points per axis over the bounding box of
/// `q`, keeping those strictly inside `q`.
pub fn probe_grid<T: Scalar>(q: &IntervalSpec<T>, resolution: usize) -> PointSet<T> {
    let dim = q.dim();
    let (lo, hi) = q.bounding_box();
    let mut out = PointSet::new(dim);
    if resolution == 0 {
        return out;
    }
    let mut cur = vec![0usize; dim];
    let mut z = vec![T::zero(); dim];
    let half = T::of(0.5);
    loop {
        for k in 0..dim {
            z[k] = lo[k] + (hi[k] - lo[k]) * (T::of_usize(cur[k]) + half) / T::of_usize(resolution);
        }
        if q.contains(&z) {
            out.push(&z).expect("matching dimension");
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < resolution {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Outcome of the bracket-point checks over a probe set.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketCheck {
    pub probes: usize,
    pub pairs: u64,
    /// `x ∈ <x_-, x_+>`, `d(x_-, x_+) <= 2√d η`, `|x_+ - x_-| <= 2√d η`.
    pub containment_violations: usize,
    /// `d(x_+, y_-) <= d(x, y) <= d(x_-, y_+)`.
    pub sandwich_violations: u64,
    /// `d(x_-, y_+) <= d(x_+, y_-) + ε/4` beyond the tolerance.
    pub spread_violations: u64,
    /// Largest `d(x_-, y_+) - d(x_+, y_-) - ε/4` seen.
    pub spread_max_excess: f64,
}

/// Checks the bracket properties on every probe and every ordered probe pair.
pub fn check_brackets<T: Scalar>(
    lattice: &LatticeSpec<T>,
    probes: &PointSet<T>,
    spread_tolerance: f64,
) -> Result<BracketCheck> {
    let frame = &lattice.frame;
    let n = probes.len();
    let width = (T::of(2.0) * frame.bracket_offset()).as_f64() * (1.0 + 1e-12);
    let mut minus = PointSet::with_capacity(probes.dim(), n);
    let mut plus = PointSet::with_capacity(probes.dim(), n);
    let mut containment_violations = 0;
    for x in probes.iter() {
        let (m, p) = bracket_points(lattice, x)?;
        let iv = IntervalSpec::new(m.clone(), p.clone())?;
        let euclid = m
            .iter()
            .zip(p.iter())
            .fold(0.0, |acc, (&a, &b)| acc + ((b - a).as_f64()).powi(2))
            .sqrt();
        if !iv.contains(x) || iv.proper_time.as_f64() > width || euclid > width {
            containment_violations += 1;
        }
        minus.push(&m)?;
        plus.push(&p)?;
    }
    let quarter = frame.eps.as_f64() / 4.0;
    let mut sandwich_violations = 0;
    let mut spread_violations = 0;
    let mut spread_max_excess = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let inner = causal_distance_unchecked(plus.point(i), minus.point(j)).as_f64();
            let mid = causal_distance_unchecked(probes.point(i), probes.point(j)).as_f64();
            let outer = causal_distance_unchecked(minus.point(i), plus.point(j)).as_f64();
            if inner > mid || mid > outer {
                sandwich_violations += 1;
            }
            let excess = outer - inner - quarter;
            spread_max_excess = spread_max_excess.max(excess);
            if excess > spread_tolerance {
                spread_violations += 1;
            }
        }
    }
    Ok(BracketCheck {
        probes: n,
        pairs: (n as u64) * (n.saturating_sub(1) as u64),
        containment_violations,
        sandwich_violations,
        spread_violations,
        spread_max_excess,
    })
}

/// Outcome of the lattice gap check: every timelike lattice pair should be at
/// least `ε² / (4 √d h)` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct GapCheck {
    pub lattice_points: usize,
    pub pairs_checked: u64,
    pub exhaustive: bool,
    pub stated_threshold: f64,
    pub violations: u64,
    pub first_violation: Option<(usize, usize, f64)>,
    /// Smallest positive causal distance among checked pairs.
    pub min_positive: f64,
    /// Pairs whose `d^2 / η^2` is not an integer (within 1e-6 relative).
    pub quantization_violations: u64,
}

/// Checks the gap property over lattice pairs: all pairs when
/// `n (n - 1) / 2 <= pair_budget`, otherwise every pair touching an evenly
/// strided subset of source points.
pub fn check_lattice_gaps<T: Scalar>(lattice: &LatticeSpec<T>, pair_budget: u64) -> GapCheck {
    let f = &lattice.frame;
    let n = lattice.len();
    let dim = f.dim();
    let threshold = (f.eps * f.eps / (T::of(4.0) * T::of_usize(dim).sqrt() * f.h)).as_f64();
    let eta = f.eta.as_f64();
    let all_pairs = (n as u64) * (n.saturating_sub(1) as u64) / 2;
    let exhaustive = all_pairs <= pair_budget;
    let sources: Vec<usize> = if exhaustive {
        (0..n).collect()
    } else {
        let count = (pair_budget / n.max(1) as u64).max(1) as usize;
        let stride = n.div_ceil(count).max(1);
        (0..n).step_by(stride).collect()
    };
    let mut check = GapCheck {
        lattice_points: n,
        pairs_checked: 0,
        exhaustive,
        stated_threshold: threshold,
        violations: 0,
        first_violation: None,
        min_positive: f64::INFINITY,
        quantization_violations: 0,
    };
    for &a in &sources {
        let ia = lattice.node_index(a);
        let targets = if exhaustive { a + 1..n } else { 0..n };
        for b in targets {
            if a == b {
                continue;
            }
            check.pairs_checked += 1;
            let ib = lattice.node_index(b);
            let dt = ib[0] - ia[0];
            let k = dt * dt - (1..dim).map(|c| (ib[c] - ia[c]).pow(2)).sum::<i64>();
            if k <= 0 {
                continue;
            }
            let (past, fut) = if dt > 0 { (a, b) } else { (b, a) };
            let d = causal_distance_unchecked(lattice.points.point(past), lattice.points.point(fut)).as_f64();
            let ratio = d * d / (eta * eta);
            if (ratio - k as f64).abs() > 1e-6 * (k as f64) {
                check.quantization_violations += 1;
            }
            check.min_positive = check.min_positive.min(d);
            if d < threshold * (1.0 - 1e-12) {
                check.violations += 1;
                if check.first_violation.is_none() {
                    check.first_violation = Some((past, fut, d));
                }
            }
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_formula() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let f = LatticeFrame::new(&q, 0.4).unwrap();
        assert!((f.eta - 0.16 / (16.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((f.eta - 0.0070711).abs() < 1e-7);
        assert!(LatticeFrame::new(&q, 0.0).is_err());
    }

    #[test]
    fn lattice_points_are_near_q() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let l = build_lattice(&q, 0.6, 1_000_000).unwrap();
        assert!(!l.is_empty());
        for p in l.points.iter() {
            assert!(q.euclidean_distance(p) <= l.frame.eta);
        }
        // roughly |B_η(Q)| / η^2 points, with |B_η(Q)| = area + perimeter η + π η^2
        let eta = l.frame.eta;
        let expected = (q.volume() + 2.0 * 2f64.sqrt() * eta + std::f64::consts::PI * eta * eta) / (eta * eta);
        assert!((l.len() as f64 - expected).abs() / expected < 0.05);
    }

    #[test]
    fn huge_eps_still_has_points() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let l = build_lattice(&q, 20.0, 1_000_000).unwrap();
        assert!(!l.is_empty());
    }

    #[test]
    fn lattice_budget() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        assert!(matches!(build_lattice(&q, 0.05, 1000), Err(Error::Budget { .. })));
    }

    #[test]
    fn bracket_of_lattice_point() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let l = build_lattice(&q, 0.4, 1_000_000).unwrap();
        let i = l.len() / 2;
        let p = l.points.point(i).to_vec();
        let (m, pl) = bracket_points(&l, &p).unwrap();
        let s = 2f64.sqrt() * l.frame.eta;
        assert_eq!(m.coords(), &[p[0] - s, p[1]]);
        assert_eq!(pl.coords(), &[p[0] + s, p[1]]);
        assert!(bracket_points(&l, &[5.0, 0.0]).is_err());
    }

    #[test]
    fn probe_grid_inside() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let g = probe_grid(&q, 20);
        assert!(g.iter().all(|p| q.contains(p)));
        // the diamond covers half the box
        assert!((g.len() as f64 - 200.0).abs() <= 20.0);
    }

    #[test]
    fn gap_check_finds_adjacent_nodes() {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let l = build_lattice(&q, 0.8, 1_000_000).unwrap();
        let g = check_lattice_gaps(&l, u64::MAX);
        assert!(g.exhaustive);
        assert_eq!(g.quantization_violations, 0);
        // nodes one step apart in time are η apart, a quarter of the threshold
        assert!((g.min_positive - l.frame.eta).abs() < 1e-12);
        assert!(g.violations > 0);
    }
}
