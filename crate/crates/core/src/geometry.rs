//! Minkowski geometry: causal distance, intervals, diamond volumes and boosts.
//!
//! Coordinates are ordered time first: `coords[0]` is `t`, `coords[1..]` are
//! the spatial components. The metric is `dt^2 - |dx|^2`.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// A spacetime event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Point { coords })
    }

    pub fn from_slice(coords: &[T]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![T::zero(); dim.max(1)],
        }
    }

    /// The event `(t, 0, ..., 0)`.
    pub fn on_time_axis(dim: usize, t: T) -> Self {
        let mut p = Self::origin(dim);
        p.coords[0] = t;
        p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn time(&self) -> T {
        self.coords[0]
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }
}

impl<T> Deref for Point<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.coords
    }
}

#[inline]
pub(crate) fn check_dims<T>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::invalid("zero-dimensional point"));
    }
    Ok(())
}

/// Signed Minkowski square `dt^2 - |dx|^2` of `y - x`. Dimensions are not checked.
#[inline]
pub fn interval_sq<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    let dt = y[0] - x[0];
    let mut s = dt * dt;
    for i in 1..x.len() {
        let dx = y[i] - x[i];
        s = s - dx * dx;
    }
    s
}

/// `true` iff `y` lies strictly inside the future light cone of `x`.
///
/// Null separations are not causal. Dimensions are not checked.
#[inline]
pub fn timelike_future<T: Scalar>(x: &[T], y: &[T]) -> bool {
    y[0] > x[0] && interval_sq(x, y) > T::zero()
}

/// Proper time from `x` to `y`, or zero when `y` is not in the timelike future of `x`.
pub fn causal_distance<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    check_dims(x, y)?;
    Ok(causal_distance_unchecked(x, y))
}

#[inline]
pub(crate) fn causal_distance_unchecked<T: Scalar>(x: &[T], y: &[T]) -> T {
    if y[0] <= x[0] {
        return T::zero();
    }
    let s = interval_sq(x, y);
    if s > T::zero() {
        s.sqrt()
    } else {
        T::zero()
    }
}

/// The causal order on events: `x <= y` iff `x == y` or `d(x, y) > 0`.
pub fn causally_precedes<T: Scalar>(x: &[T], y: &[T]) -> Result<bool> {
    check_dims(x, y)?;
    Ok(x == y || timelike_future(x, y))
}

/// Volume of the standard diamond `<0, 1>` in `dim` dimensions.
///
/// The diamond is two cones of height 1/2 over a `(dim-1)`-ball of radius 1/2,
/// so its volume is `V_{dim-1}(1/2) / dim`.
pub fn diamond_constant<T: Scalar>(dim: usize) -> Result<T> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let n = dim - 1;
    // V_0 = 1, V_1(1/2) = 1, V_n(1/2) = V_{n-2}(1/2) * pi / (2n)
    let mut ball = T::one();
    let mut k = 2 + n % 2;
    while k <= n {
        ball = ball * T::PI() / T::of_usize(2 * k);
        k += 2;
    }
    Ok(ball / T::of_usize(dim))
}

/// The spacetime interval `<past, future>`, open at both endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec<T> {
    pub past: Point<T>,
    pub future: Point<T>,
    pub proper_time: T,
}

impl<T: Scalar> IntervalSpec<T> {
    pub fn new(past: Point<T>, future: Point<T>) -> Result<Self> {
        let proper_time = causal_distance(&past, &future)?;
        Ok(IntervalSpec {
            past,
            future,
            proper_time,
        })
    }

    /// The diamond `<0, (t, 0, ..., 0)>`.
    pub fn standard(dim: usize, t: T) -> Self {
        let past = Point::origin(dim);
        let future = Point::on_time_axis(dim, t);
        let proper_time = if t > T::zero() { t } else { T::zero() };
        IntervalSpec {
            past,
            future,
            proper_time,
        }
    }

    pub fn dim(&self) -> usize {
        self.past.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.proper_time <= T::zero()
    }

    /// Membership without dimension checks.
    #[inline]
    pub fn contains(&self, p: &[T]) -> bool {
        timelike_future(&self.past, p) && timelike_future(p, &self.future)
    }

    /// Lebesgue measure `C_d * tau^d`.
    pub fn volume(&self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let c = diamond_constant::<T>(self.dim()).expect("dim >= 1");
        c * self.proper_time.powi(self.dim() as i32)
    }

    /// An axis-aligned box containing the closure of the interval.
    ///
    /// The time extent is exact. Spatial extents use
    /// `|p_k - x_k| <= p_t - x_t` and `|y_k - p_k| <= y_t - p_t`, which is
    /// tight for unboosted diamonds.
    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        let two = T::of(2.0);
        let dt = self.future[0] - self.past[0];
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        lo.push(self.past[0]);
        hi.push(self.future[0]);
        for k in 1..self.dim() {
            let mid = (self.past[k] + self.future[k]) / two;
            lo.push(mid - dt / two);
            hi.push(mid + dt / two);
        }
        (lo, hi)
    }

    /// Euclidean distance from `p` to the closure of the interval.
    pub fn euclidean_distance(&self, p: &[T]) -> T {
        euclidean_distance_to_interval(self, p)
    }
}

pub fn interval_contains<T: Scalar>(iv: &IntervalSpec<T>, p: &[T]) -> Result<bool> {
    check_dims(&iv.past, p)?;
    Ok(iv.contains(p))
}

pub fn interval_volume<T: Scalar>(iv: &IntervalSpec<T>) -> T {
    iv.volume()
}

/// Translation followed by a Lorentz boost: `p -> L(v) (p + translation)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boost<T> {
    translation: Vec<T>,
    velocity: Vec<T>,
}

impl<T: Scalar> Boost<T> {
    pub fn new(translation: Vec<T>, velocity: Vec<T>) -> Result<Self> {
        if translation.is_empty() || velocity.len() + 1 != translation.len() {
            return Err(Error::invalid(format!(
                "translation has {} components, velocity {}; expected d and d-1",
                translation.len(),
                velocity.len()
            )));
        }
        if translation.iter().chain(&velocity).any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite boost parameter"));
        }
        let beta2 = velocity.iter().fold(T::zero(), |acc, &v| acc + v * v);
        if beta2 >= T::one() {
            return Err(Error::invalid(format!(
                "boost speed {} is not below 1",
                beta2.sqrt()
            )));
        }
        Ok(Boost {
            translation,
            velocity,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let dim = dim.max(1);
        Boost {
            translation: vec![T::zero(); dim],
            velocity: vec![T::zero(); dim - 1],
        }
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    pub fn velocity(&self) -> &[T] {
        &self.velocity
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn gamma(&self) -> T {
        let beta2 = self.velocity.iter().fold(T::zero(), |acc, &v| acc + v * v);
        T::one() / (T::one() - beta2).sqrt()
    }

    /// Pure Lorentz part applied to a vector (no translation).
    fn lorentz(&self, w: &[T], out: &mut [T]) {
        let gamma = self.gamma();
        let t = w[0];
        let v_dot_x = self
            .velocity
            .iter()
            .zip(&w[1..])
            .fold(T::zero(), |acc, (&v, &x)| acc + v * x);
        // (gamma - 1) / beta^2 == gamma^2 / (gamma + 1), finite at beta = 0
        let k = gamma * gamma / (gamma + T::one());
        let coeff = k * v_dot_x - gamma * t;
        out[0] = gamma * (t - v_dot_x);
        for (i, &v) in self.velocity.iter().enumerate() {
            out[i + 1] = w[i + 1] + coeff * v;
        }
    }

    pub fn apply_into(&self, p: &[T], out: &mut [T]) {
        debug_assert_eq!(p.len(), self.dim());
        let shifted: Vec<T> = p
            .iter()
            .zip(&self.translation)
            .map(|(&a, &b)| a + b)
            .collect();
        self.lorentz(&shifted, out);
    }

    pub fn apply(&self, p: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); p.len()];
        self.apply_into(p, &mut out);
        out
    }

    pub fn apply_point(&self, p: &Point<T>) -> Result<Point<T>> {
        check_dims(p, &self.translation)?;
        Point::new(self.apply(p))
    }

    /// The inverse transform, written again as translation-then-boost.
    pub fn inverse(&self) -> Self {
        let reversed = Boost {
            translation: vec![T::zero(); self.dim()],
            velocity: self.velocity.iter().map(|&v| -v).collect(),
        };
        // L(v)^{-1} q - a = L(-v) (q - L(v) a)
        let mut la = vec![T::zero(); self.dim()];
        self.lorentz(&self.translation, &mut la);
        Boost {
            translation: la.into_iter().map(|c| -c).collect(),
            velocity: reversed.velocity,
        }
    }
}

/// The transform taking `iv.past` to the origin and `iv.future` to `(tau, 0, ..., 0)`.
pub fn boost_to_diamond<T: Scalar>(iv: &IntervalSpec<T>) -> Result<Boost<T>> {
    if iv.is_empty() {
        return Err(Error::EmptyInterval);
    }
    let dt = iv.future[0] - iv.past[0];
    let velocity = (1..iv.dim())
        .map(|k| (iv.future[k] - iv.past[k]) / dt)
        .collect();
    let translation = iv.past.iter().map(|&c| -c).collect();
    Boost::new(translation, velocity)
}

fn project_future_cone<T: Scalar>(apex: &[T], p: &[T], sign: T, out: &mut [T]) {
    let t = sign * (p[0] - apex[0]);
    let r = (1..p.len())
        .fold(T::zero(), |acc, k| {
            let d = p[k] - apex[k];
            acc + d * d
        })
        .sqrt();
    if r <= t {
        out.copy_from_slice(p);
    } else if r <= -t {
        out.copy_from_slice(apex);
    } else {
        let alpha = (t + r) / T::of(2.0);
        out[0] = apex[0] + sign * alpha;
        for k in 1..p.len() {
            out[k] = apex[k] + alpha * (p[k] - apex[k]) / r;
        }
    }
}

/// Euclidean distance from `p` to the closed interval, by Dykstra's
/// alternating projections onto the two light cones. Infinite for empty intervals.
pub fn euclidean_distance_to_interval<T: Scalar>(iv: &IntervalSpec<T>, p: &[T]) -> T {
    let dim = p.len();
    let dt = iv.future[0] - iv.past[0];
    let inside_closure = |q: &[T]| {
        q[0] >= iv.past[0]
            && q[0] <= iv.future[0]
            && interval_sq(&iv.past, q) >= T::zero()
            && interval_sq(q, &iv.future) >= T::zero()
    };
    if inside_closure(p) {
        return T::zero();
    }
    if iv.is_empty() {
        return T::infinity();
    }
    let tol = T::epsilon() * T::of(16.0) * (T::one() + dt.abs());
    let mut x = p.to_vec();
    let mut y = vec![T::zero(); dim];
    let mut z = vec![T::zero(); dim];
    let mut inc_a = vec![T::zero(); dim];
    let mut inc_b = vec![T::zero(); dim];
    let mut buf = vec![T::zero(); dim];
    for _ in 0..20_000 {
        for k in 0..dim {
            buf[k] = x[k] + inc_a[k];
        }
        project_future_cone(&iv.past, &buf, T::one(), &mut y);
        for k in 0..dim {
            inc_a[k] = buf[k] - y[k];
            buf[k] = y[k] + inc_b[k];
        }
        project_future_cone(&iv.future, &buf, -T::one(), &mut z);
        let mut change = T::zero();
        for k in 0..dim {
            inc_b[k] = buf[k] - z[k];
            change = change + (z[k] - x[k]).abs();
        }
        std::mem::swap(&mut x, &mut z);
        if change <= tol {
            break;
        }
    }
    x.iter()
        .zip(p)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
        .sqrt()
}
