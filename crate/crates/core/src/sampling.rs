//! Poisson sprinklings on boxes and Minkowski intervals.
//!
//! Every sample is driven by an [`RngSpec`]: a ChaCha8 generator seeded from
//! `master_seed` and switched to the independent stream `stream_id`. Equal specs
//! reproduce samples bit for bit, whatever thread runs them.

use std::io::{BufRead, Write};

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{boost_to_diamond, Boost, IntervalSpec};
use crate::num::Scalar;
use crate::pointset::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngSpec {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn seed_path(&self) -> Vec<u64> {
        vec![self.master_seed, self.stream_id]
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> BoxRegion<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::invalid("box corners must have equal, nonzero length"));
        }
        Ok(BoxRegion { lo, hi })
    }

    pub fn unit(dim: usize) -> Self {
        BoxRegion {
            lo: vec![T::zero(); dim],
            hi: vec![T::one(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(T::one(), |acc, (&a, &b)| acc * (b - a))
    }

    pub fn contains(&self, p: &[T]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&a, &b))| x >= a && x <= b)
    }
}

/// The region a sample was drawn in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region<T> {
    Box(BoxRegion<T>),
    Interval(IntervalSpec<T>),
    /// The image of `base` under `boost`.
    Image {
        base: std::boxed::Box<Region<T>>,
        boost: Boost<T>,
    },
}

impl<T: Scalar> Region<T> {
    pub fn dim(&self) -> usize {
        match self {
            Region::Box(b) => b.dim(),
            Region::Interval(iv) => iv.dim(),
            Region::Image { base, .. } => base.dim(),
        }
    }

    pub fn contains(&self, p: &[T]) -> bool {
        match self {
            Region::Box(b) => b.contains(p),
            Region::Interval(iv) => iv.contains(p),
            Region::Image { base, boost } => base.contains(&boost.inverse().apply(p)),
        }
    }

    pub fn volume(&self) -> T {
        match self {
            Region::Box(b) => b.volume(),
            Region::Interval(iv) => iv.volume(),
            Region::Image { base, .. } => base.volume(),
        }
    }

    pub fn as_interval(&self) -> Option<&IntervalSpec<T>> {
        match self {
            Region::Interval(iv) => Some(iv),
            _ => None,
        }
    }
}

/// A realized Poisson sample, points sorted by time.
#[derive(Clone, Debug, PartialEq)]
pub struct CausetSample<T> {
    pub points: PointSet<T>,
    pub density: T,
    pub region: Region<T>,
    pub seed_path: Vec<u64>,
}

impl<T: Scalar> CausetSample<T> {
    /// Wraps externally produced points, sorting them by time.
    pub fn from_points(
        mut points: PointSet<T>,
        density: T,
        region: Region<T>,
        seed_path: Vec<u64>,
    ) -> Result<Self> {
        check_density(density)?;
        if points.dim() != region.dim() {
            return Err(Error::DimensionMismatch {
                left: points.dim(),
                right: region.dim(),
            });
        }
        points.sort_by_time();
        Ok(CausetSample {
            points,
            density,
            region,
            seed_path,
        })
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the sample invariants; reports the first offending index.
    pub fn validate(&self) -> Result<()> {
        check_density(self.density)?;
        if !self.points.is_time_sorted() {
            return Err(Error::invalid("points are not strictly sorted by time"));
        }
        if let Some(i) = (0..self.len()).find(|&i| !self.region.contains(self.points.point(i))) {
            return Err(Error::invalid(format!("point {i} lies outside the region")));
        }
        Ok(())
    }

    /// CSV with header `t,x1,...`, preceded by an optional `#` comment line.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", csv_header(self.dim()))?;
        for row in self.points.iter() {
            let mut first = true;
            for c in row {
                if !first {
                    w.write_all(b",")?;
                }
                write!(w, "{c}")?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn envelope(&self) -> SampleEnvelope<T> {
        SampleEnvelope {
            density: self.density,
            dim: self.dim(),
            count: self.len(),
            region: self.region.clone(),
            seed_path: self.seed_path.clone(),
        }
    }
}

/// JSON metadata written next to a sample CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleEnvelope<T> {
    pub density: T,
    pub dim: usize,
    pub count: usize,
    pub region: Region<T>,
    pub seed_path: Vec<u64>,
}

pub fn csv_header(dim: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..dim).map(|k| format!("x{k}")));
    cols.join(",")
}

/// Reads a sample CSV written by [`CausetSample::write_csv`].
pub fn read_points_csv<T: Scalar, R: BufRead>(r: R) -> Result<PointSet<T>> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match dim {
            None => {
                let cols: Vec<&str> = line.split(',').collect();
                if cols != csv_header(cols.len()).split(',').collect::<Vec<_>>() {
                    return Err(Error::Parse {
                        line: n + 1,
                        msg: format!("unexpected header {line:?}"),
                    });
                }
                dim = Some(cols.len());
            }
            Some(d) => {
                let row = line
                    .split(',')
                    .map(|c| c.trim().parse::<T>())
                    .collect::<std::result::Result<Vec<T>, _>>()
                    .map_err(|_| Error::Parse {
                        line: n + 1,
                        msg: "not a number".into(),
                    })?;
                if row.len() != d {
                    return Err(Error::Parse {
                        line: n + 1,
                        msg: format!("expected {d} columns, found {}", row.len()),
                    });
                }
                coords.extend(row);
            }
        }
    }
    let dim = dim.ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    PointSet::from_flat(dim, coords)
}

fn check_density<T: Scalar>(density: T) -> Result<()> {
    if !(density.is_finite() && density > T::zero()) {
        return Err(Error::invalid(format!("density must be positive and finite, got {density}")));
    }
    Ok(())
}

/// A Poisson variate with the given mean (zero mean gives zero).
pub fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::invalid(format!("Poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

#[inline]
fn open01<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u: f64 = Open01.sample(rng);
    T::of(u)
}

/// Poisson process of density `lambda` on an axis-aligned box.
pub fn sample_box<T: Scalar>(lambda: T, region: &BoxRegion<T>, spec: RngSpec) -> Result<CausetSample<T>> {
    check_density(lambda)?;
    let volume = region.volume();
    if !(volume.is_finite() && volume > T::zero()) {
        return Err(Error::invalid(format!("box volume must be positive and finite, got {volume}")));
    }
    let mut rng = spec.rng();
    let n = poisson_count(&mut rng, (lambda * volume).as_f64())? as usize;
    let dim = region.dim();
    let mut points = PointSet::with_capacity(dim, n);
    let mut row = vec![T::zero(); dim];
    for _ in 0..n {
        for (k, c) in row.iter_mut().enumerate() {
            *c = region.lo[k] + (region.hi[k] - region.lo[k]) * open01::<T, _>(&mut rng);
        }
        points.push(&row)?;
    }
    points.sort_by_time();
    Ok(CausetSample {
        points,
        density: lambda,
        region: Region::Box(region.clone()),
        seed_path: spec.seed_path(),
    })
}

/// Poisson process of density `lambda` restricted to the open interval `iv`.
///
/// Points are drawn in the standard diamond `<0, tau>` and carried back by the
/// inverse of [`boost_to_diamond`]. In two dimensions the diamond is a square in
/// light-cone coordinates and is sampled directly; otherwise candidates are
/// rejected from the box `[0, tau] x [-tau/2, tau/2]^(d-1)`.
pub fn sample_interval<T: Scalar>(
    lambda: T,
    iv: &IntervalSpec<T>,
    spec: RngSpec,
) -> Result<CausetSample<T>> {
    check_density(lambda)?;
    let dim = iv.dim();
    let region = Region::Interval(iv.clone());
    if iv.is_empty() {
        return Ok(CausetSample {
            points: PointSet::new(dim),
            density: lambda,
            region,
            seed_path: spec.seed_path(),
        });
    }
    let tau = iv.proper_time;
    let standard = IntervalSpec::standard(dim, tau);
    let back = boost_to_diamond(iv)?.inverse();
    let mut rng = spec.rng();
    let n = poisson_count(&mut rng, (lambda * iv.volume()).as_f64())? as usize;

    let two = T::of(2.0);
    let mut cand = vec![T::zero(); dim];
    let mut out = vec![T::zero(); dim];
    let mut points = PointSet::with_capacity(dim, n);
    for _ in 0..n {
        loop {
            match dim {
                1 => cand[0] = tau * open01::<T, _>(&mut rng),
                2 => {
                    let u = tau * open01::<T, _>(&mut rng);
                    let v = tau * open01::<T, _>(&mut rng);
                    cand[0] = (u + v) / two;
                    cand[1] = (v - u) / two;
                }
                _ => {
                    cand[0] = tau * open01::<T, _>(&mut rng);
                    for c in cand.iter_mut().skip(1) {
                        *c = tau * (open01::<T, _>(&mut rng) - T::of(0.5));
                    }
                    if !standard.contains(&cand) {
                        continue;
                    }
                }
            }
            back.apply_into(&cand, &mut out);
            // rounding in the transform can push boundary points out
            if iv.contains(&out) {
                break;
            }
        }
        points.push(&out)?;
    }
    points.sort_by_time();
    Ok(CausetSample {
        points,
        density: lambda,
        region,
        seed_path: spec.seed_path(),
    })
}

/// The image of a sample under `boost`, re-sorted by time.
pub fn boost_sample<T: Scalar>(s: &CausetSample<T>, boost: &Boost<T>) -> Result<CausetSample<T>> {
    if boost.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: boost.dim(),
        });
    }
    let mut points = s.points.map_rows(|src, dst| boost.apply_into(src, dst));
    points.sort_by_time();
    let region = match &s.region {
        Region::Interval(iv) => Region::Interval(IntervalSpec::new(
            boost.apply_point(&iv.past)?,
            boost.apply_point(&iv.future)?,
        )?),
        other => Region::Image {
            base: std::boxed::Box::new(other.clone()),
            boost: boost.clone(),
        },
    };
    Ok(CausetSample {
        points,
        density: s.density,
        region,
        seed_path: s.seed_path.clone(),
    })
}
