//! Monte Carlo estimates of the height `H_λ` of a Poisson sample of the
//! standard diamond, and empirical checks of its concentration bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::causet::height;
use crate::error::{Error, Result};
use crate::geometry::{diamond_constant, IntervalSpec};
use crate::num::Scalar;
use crate::sampling::{sample_interval, RngSpec};
use crate::stats::{wilson_interval, Summary};

/// Constants of the concentration and convergence bounds. The paper leaves
/// all four unspecified, so they are either fitted or supplied by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub c_d: f64,
    pub k: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BoundParams {
    pub fn new(c_d: f64, k: f64, c1: f64, c2: f64) -> Result<Self> {
        let p = BoundParams { c_d, k, c1, c2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c_d", self.c_d), ("K_d", self.k), ("C1_d", self.c1), ("C2_d", self.c2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightEnsemble {
    pub lambda: f64,
    pub dim: usize,
    pub trials: usize,
    pub heights: Vec<u64>,
    pub mean: f64,
    pub sd: f64,
    pub c_hat: f64,
}

impl HeightEnsemble {
    pub fn from_heights(lambda: f64, dim: usize, heights: Vec<u64>) -> Result<Self> {
        if heights.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 trials for a standard deviation, got {}",
                heights.len()
            )));
        }
        check_lambda(lambda)?;
        let xs: Vec<f64> = heights.iter().map(|&h| h as f64).collect();
        let s = Summary::of(&xs);
        Ok(HeightEnsemble {
            lambda,
            dim,
            trials: heights.len(),
            heights,
            mean: s.mean,
            sd: s.sd,
            c_hat: s.mean / root(lambda, dim),
        })
    }

    /// Standard error of the mean height.
    pub fn se(&self) -> f64 {
        self.sd / (self.trials as f64).sqrt()
    }

    /// Standard error of `c_hat`.
    pub fn c_se(&self) -> f64 {
        self.se() / root(self.lambda, self.dim)
    }

    /// Recomputes the summary fields and compares.
    pub fn validate(&self) -> Result<()> {
        let again = HeightEnsemble::from_heights(self.lambda, self.dim, self.heights.clone())?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0);
        if self.trials != again.trials || !close(self.mean, again.mean) || !close(self.sd, again.sd) {
            return Err(Error::invalid("stored summary does not match the heights"));
        }
        Ok(())
    }
}

fn root(lambda: f64, dim: usize) -> f64 {
    lambda.powf(1.0 / dim as f64)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("λ must be positive, got {lambda}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightOptions {
    /// Refuse a run whose expected points per trial exceed this.
    pub max_expected_points: f64,
    /// Trial `i` uses stream `stream_offset + i`.
    pub stream_offset: u64,
}

impl Default for HeightOptions {
    fn default() -> Self {
        HeightOptions {
            max_expected_points: 1e7,
            stream_offset: 0,
        }
    }
}

/// Runs `f` on streams `offset..offset + trials` in parallel and returns the
/// results in stream order.
pub fn map_trials<R, F>(trials: usize, master_seed: u64, offset: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(RngSpec) -> R + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|i| f(RngSpec::new(master_seed, offset + i)))
        .collect()
}

/// Height of one Poisson sample of `<0, 1>`.
pub fn trial_height<T: Scalar>(lambda: f64, dim: usize, spec: RngSpec) -> Result<u64> {
    let q = IntervalSpec::<T>::standard(dim, T::one());
    let s = sample_interval(T::of(lambda), &q, spec)?;
    Ok(height(&s.points).height as u64)
}

/// Budget check for `λ C_d` expected points per trial.
pub fn check_point_budget(lambda: f64, dim: usize, max_expected_points: f64) -> Result<()> {
    let expected = lambda * diamond_constant::<f64>(dim)?;
    if expected > max_expected_points {
        return Err(Error::Budget {
            what: "expected points per trial",
            needed: expected,
            limit: max_expected_points,
            hint: Some("lower λ or raise the per-trial point budget".into()),
        });
    }
    Ok(())
}

/// Ensemble of `trials` independent heights of `P_λ ∩ <0, 1>`.
pub fn estimate_heights(lambda: f64, dim: usize, trials: usize, master_seed: u64, opts: &HeightOptions) -> Result<HeightEnsemble> {
    estimate_heights_as::<f64>(lambda, dim, trials, master_seed, opts)
}

/// [`estimate_heights`] with coordinates of type `T`.
pub fn estimate_heights_as<T: Scalar>(
    lambda: f64,
    dim: usize,
    trials: usize,
    master_seed: u64,
    opts: &HeightOptions,
) -> Result<HeightEnsemble> {
    if trials < 2 {
        return Err(Error::invalid(format!("need at least 2 trials, got {trials}")));
    }
    check_lambda(lambda)?;
    check_point_budget(lambda, dim, opts.max_expected_points)?;
    let heights = map_trials(trials, master_seed, opts.stream_offset, |spec| {
        trial_height::<T>(lambda, dim, spec)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    HeightEnsemble::from_heights(lambda, dim, heights)
}

/// `λ^{1/2d} log λ / log log λ`, the deviation unit of the concentration bound.
pub fn deviation_scale(lambda: f64, dim: usize) -> Result<f64> {
    if !(lambda > std::f64::consts::E && lambda.is_finite()) {
        return Err(Error::invalid(format!("λ must exceed e so that log log λ > 0, got {lambda}")));
    }
    let l = lambda.ln();
    Ok(lambda.powf(1.0 / (2.0 * dim as f64)) * l / l.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationBound {
    pub threshold: f64,
    pub probability: f64,
    /// Whether `μ <= λ^{1/2d} / log log λ`, the narrower range of the corollary.
    pub in_corollary_range: bool,
}

/// `P(|H_λ - E H_λ| >= μ K λ^{1/2d} log λ / log log λ) <= 4 μ² e^{-μ²}`
/// for `2 <= μ <= λ^{1/2d} log λ`.
pub fn deviation_bound(lambda: f64, dim: usize, mu: f64, k: f64) -> Result<DeviationBound> {
    let scale = deviation_scale(lambda, dim)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("K_d must be positive, got {k}")));
    }
    let r = lambda.powf(1.0 / (2.0 * dim as f64));
    let hi = r * lambda.ln();
    if !(2.0..=hi).contains(&mu) {
        return Err(Error::invalid(format!("μ must lie in [2, {hi}], got {mu}")));
    }
    Ok(DeviationBound {
        threshold: mu * k * scale,
        probability: 4.0 * mu * mu * (-mu * mu).exp(),
        in_corollary_range: mu <= r / lambda.ln().ln(),
    })
}

/// Fitted `K` making `sd = K λ^{1/2d} log λ / log log λ` for one ensemble.
pub fn fit_k(e: &HeightEnsemble) -> Result<f64> {
    Ok(e.sd / deviation_scale(e.lambda, e.dim)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub threshold: f64,
    pub exceed: usize,
    pub trials: usize,
    pub freq: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Frequency of `|H - mean(H)| >= t` for each threshold, with Wilson intervals.
pub fn tail_curve(heights: &[u64], thresholds: &[f64], confidence: f64) -> Vec<TailPoint> {
    let n = heights.len();
    let mean = heights.iter().map(|&h| h as f64).sum::<f64>() / n.max(1) as f64;
    thresholds
        .iter()
        .map(|&t| {
            let exceed = heights.iter().filter(|&&h| (h as f64 - mean).abs() >= t).count();
            let (lo, hi) = wilson_interval(exceed, n, confidence);
            TailPoint {
                threshold: t,
                exceed,
                trials: n,
                freq: if n == 0 { 0.0 } else { exceed as f64 / n as f64 },
                lo,
                hi,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub mu: f64,
    pub point: TailPoint,
    /// `4 μ² e^{-μ²}` when `μ` lies in the admissible range.
    pub bound: Option<f64>,
    pub in_corollary_range: bool,
}

impl TailRow {
    /// Frequency at most the bound plus the width of its Wilson interval.
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.point.freq <= b + (self.point.hi - self.point.lo))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub ensemble: HeightEnsemble,
    pub k: f64,
    pub confidence: f64,
    pub rows: Vec<TailRow>,
    /// Corollary reading: deviation `K λ^{1/2d} log^{3/2}λ / log log λ`
    /// against `4 μ² e^{-μ²}` at `μ = √log λ`.
    pub corollary: TailRow,
}

/// Tail rows for an existing ensemble at the deviations of the given `μ`s.
pub fn tail_report(ensemble: HeightEnsemble, mus: &[f64], k: f64, confidence: f64) -> Result<TailReport> {
    let (lambda, dim) = (ensemble.lambda, ensemble.dim);
    let scale = deviation_scale(lambda, dim)?;
    let mut rows = Vec::with_capacity(mus.len());
    for &mu in mus {
        let threshold = mu * k * scale;
        let point = tail_curve(&ensemble.heights, &[threshold], confidence)[0];
        let (bound, narrow) = match deviation_bound(lambda, dim, mu, k) {
            Ok(b) => (Some(b.probability), b.in_corollary_range),
            Err(_) => (None, false),
        };
        rows.push(TailRow {
            mu,
            point,
            bound,
            in_corollary_range: narrow,
        });
    }
    let mu = lambda.ln().sqrt();
    let threshold = k * lambda.powf(1.0 / (2.0 * dim as f64)) * lambda.ln().powf(1.5) / lambda.ln().ln();
    let corollary = TailRow {
        mu,
        point: tail_curve(&ensemble.heights, &[threshold], confidence)[0],
        bound: Some(4.0 * mu * mu * (-mu * mu).exp()),
        in_corollary_range: mu <= lambda.powf(1.0 / (2.0 * dim as f64)) / lambda.ln().ln(),
    };
    Ok(TailReport {
        ensemble,
        k,
        confidence,
        rows,
        corollary,
    })
}

/// Samples `trials >= 100` heights and reports their tails at the given `μ`s.
/// A `k` of `None` fits `K` from this ensemble.
#[allow(clippy::too_many_arguments)]
pub fn tail_experiment(
    lambda: f64,
    dim: usize,
    trials: usize,
    mus: &[f64],
    k: Option<f64>,
    confidence: f64,
    master_seed: u64,
    opts: &HeightOptions,
) -> Result<TailReport> {
    if trials < 100 {
        return Err(Error::invalid(format!("tail experiments need at least 100 trials, got {trials}")));
    }
    let e = estimate_heights(lambda, dim, trials, master_seed, opts)?;
    let k = match k {
        Some(k) => k,
        None => fit_k(&e)?,
    };
    tail_report(e, mus, k, confidence)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub lambda: f64,
    pub c_hat: f64,
    pub se: f64,
    /// `c - C log^{3/2}λ / (λ^{1/2d} log log λ)`.
    pub lower: f64,
    pub in_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dim: usize,
    /// Fitted limit of `c_hat` from `c_hat ≈ c - amplitude λ^{-1/2d}`.
    pub c: f64,
    pub amplitude: f64,
    pub beta: f64,
    /// The same model with the exponent also fitted (over `[0.02, 1]`).
    pub c_free: f64,
    pub beta_free: f64,
    /// Smallest band constant covering every `c_hat`.
    pub band_constant: f64,
    pub rows: Vec<BandRow>,
    pub band_satisfied: bool,
    /// `c_hat` nondecreasing within 2 standard errors of each step.
    pub nondecreasing: bool,
}

fn band_gauge(lambda: f64, dim: usize) -> f64 {
    let l = lambda.ln();
    l.powf(1.5) / (lambda.powf(1.0 / (2.0 * dim as f64)) * l.ln())
}

/// Weighted least squares of `y = c - a x`; returns `(c, a, sse)`.
fn fit_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = my - slope * mx;
    let sse = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, c2), b)| b * (c2 - (c + slope * a)).powi(2))
        .sum();
    (c, -slope, sse)
}

/// Fits the limit `c` of `c_hat` over an ascending λ grid, with the correction
/// decaying at the rate `λ^{-1/2d}` of the band, and checks the band
/// `c - C log^{3/2}λ / (λ^{1/2d} log log λ) <= c_hat <= c`.
pub fn check_mean_convergence(ensembles: &[HeightEnsemble]) -> Result<ConvergenceReport> {
    if ensembles.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 λ values, got {}", ensembles.len())));
    }
    let dim = ensembles[0].dim;
    if ensembles.windows(2).any(|w| w[0].lambda.partial_cmp(&w[1].lambda) != Some(std::cmp::Ordering::Less) || w[1].dim != dim) {
        return Err(Error::invalid("λ grid must be strictly ascending in one dimension"));
    }
    for e in ensembles {
        deviation_scale(e.lambda, e.dim)?;
    }
    let y: Vec<f64> = ensembles.iter().map(|e| e.c_hat).collect();
    let floor = 1e-12;
    let w: Vec<f64> = ensembles.iter().map(|e| 1.0 / e.c_se().powi(2).max(floor)).collect();
    let fit_at = |beta: f64| {
        let x: Vec<f64> = ensembles.iter().map(|e| e.lambda.powf(-beta)).collect();
        fit_line(&x, &y, &w)
    };
    let beta = 1.0 / (2.0 * dim as f64);
    let (c, amplitude, _) = fit_at(beta);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for step in 0..=98 {
        let b = 0.02 + 0.01 * step as f64;
        let (cf, _, sse) = fit_at(b);
        if sse < best.0 - 1e-15 {
            best = (sse, cf, b);
        }
    }
    let (_, c_free, beta_free) = best;
    let band_constant = ensembles
        .iter()
        .map(|e| (c - e.c_hat) / band_gauge(e.lambda, dim))
        .fold(0.0, f64::max);
    let rows: Vec<BandRow> = ensembles
        .iter()
        .map(|e| {
            let lower = c - band_constant * band_gauge(e.lambda, dim);
            let se = e.c_se();
            BandRow {
                lambda: e.lambda,
                c_hat: e.c_hat,
                se,
                lower,
                in_band: e.c_hat >= lower - 1e-12 && e.c_hat <= c + 2.0 * se + 1e-9,
            }
        })
        .collect();
    let nondecreasing = ensembles
        .windows(2)
        .all(|w| w[1].c_hat >= w[0].c_hat - 2.0 * (w[0].c_se().powi(2) + w[1].c_se().powi(2)).sqrt());
    Ok(ConvergenceReport {
        dim,
        c,
        amplitude,
        beta,
        c_free,
        beta_free,
        band_constant,
        band_satisfied: rows.iter().all(|r| r.in_band),
        rows,
        nondecreasing,
    })
}

/// Runs [`estimate_heights`] on each λ of the grid (with disjoint stream
/// ranges) and checks the convergence band.
pub fn mean_convergence_check(
    lambdas: &[f64],
    dim: usize,
    trials: usize,
    master_seed: u64,
    opts: &HeightOptions,
) -> Result<(Vec<HeightEnsemble>, ConvergenceReport)> {
    let ensembles = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let o = HeightOptions {
                stream_offset: opts.stream_offset + ((i as u64) << 32),
                ..*opts
            };
            estimate_heights(l, dim, trials, master_seed, &o)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = check_mean_convergence(&ensembles)?;
    Ok((ensembles, report))
}

/// `E H_{2^d λ} >= 2 E H_λ` within two combined standard errors.
pub fn superadditive(small: &HeightEnsemble, big: &HeightEnsemble) -> bool {
    let se = (big.se().powi(2) + 4.0 * small.se().powi(2)).sqrt();
    big.mean >= 2.0 * small.mean - 2.0 * se
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_examples() {
        let b = deviation_bound(1e6, 2, 2.0, 1.0).unwrap();
        assert!((b.probability - 16.0 * (-4.0f64).exp()).abs() < 1e-15);
        assert!((b.probability - 0.29305).abs() < 1e-5);
        assert!((b.threshold - 332.8).abs() < 0.2, "{}", b.threshold);
        let b = deviation_bound(1e6, 2, 3.0, 1.0).unwrap();
        assert!((b.probability - 0.004443).abs() < 1e-6);
        assert!(deviation_bound(1e6, 2, 1.5, 1.0).is_err());
        assert!(deviation_bound(1e6, 2, 1e4, 1.0).is_err());
    }

    #[test]
    fn corollary_range_flag() {
        // λ^{1/4} / log log λ ≈ 12.04 at λ = 10^6
        assert!(deviation_bound(1e6, 2, 12.0, 1.0).unwrap().in_corollary_range);
        assert!(!deviation_bound(1e6, 2, 13.0, 1.0).unwrap().in_corollary_range);
    }

    #[test]
    fn ensemble_invariants() {
        let e = HeightEnsemble::from_heights(100.0, 2, vec![10, 12, 14]).unwrap();
        assert_eq!(e.mean, 12.0);
        assert_eq!(e.sd, 2.0);
        assert!((e.c_hat - 1.2).abs() < 1e-15);
        e.validate().unwrap();
        assert!(HeightEnsemble::from_heights(100.0, 2, vec![1]).is_err());
    }

    #[test]
    fn small_lambda_mostly_empty() {
        let e = estimate_heights(0.1, 2, 200, 5, &HeightOptions::default()).unwrap();
        let zeros = e.heights.iter().filter(|&&h| h == 0).count();
        assert!(zeros > 180);
    }

    #[test]
    fn deterministic_and_budgeted() {
        let o = HeightOptions::default();
        let a = estimate_heights(500.0, 2, 8, 42, &o).unwrap();
        let b = estimate_heights(500.0, 2, 8, 42, &o).unwrap();
        assert_eq!(a, b);
        let tight = HeightOptions {
            max_expected_points: 10.0,
            ..o
        };
        assert!(matches!(estimate_heights(500.0, 2, 8, 42, &tight), Err(Error::Budget { .. })));
        assert!(estimate_heights(500.0, 2, 1, 42, &o).is_err());
    }

    #[test]
    fn tail_edges() {
        let h = vec![3, 5, 7, 9, 11];
        let c = tail_curve(&h, &[0.0, 100.0], 0.95);
        assert_eq!(c[0].freq, 1.0);
        assert_eq!(c[1].freq, 0.0);
    }

    #[test]
    fn tail_needs_trials() {
        assert!(tail_experiment(1e3, 2, 50, &[2.0], None, 0.99, 1, &HeightOptions::default()).is_err());
    }

    #[test]
    fn constant_c_hat_band() {
        let es: Vec<HeightEnsemble> = [1e4, 1e6, 1e8]
            .iter()
            .map(|&l: &f64| {
                let h = (1.4 * l.sqrt()).round() as u64;
                HeightEnsemble::from_heights(l, 2, vec![h; 4]).unwrap()
            })
            .collect();
        let r = check_mean_convergence(&es).unwrap();
        assert!(r.band_satisfied);
        assert!(r.band_constant < 1e-9);
        assert!((r.c - 1.4).abs() < 1e-3);
    }

    #[test]
    fn convergence_fit_recovers_curve() {
        let es: Vec<HeightEnsemble> = [1e4, 1e5, 1e6, 1e7]
            .iter()
            .map(|&l: &f64| {
                let c = 1.5 - 0.8 * l.powf(-0.25);
                let m = c * l.sqrt();
                HeightEnsemble::from_heights(l, 2, vec![(m - 1.0) as u64, m as u64, (m + 1.0) as u64]).unwrap()
            })
            .collect();
        let r = check_mean_convergence(&es).unwrap();
        assert!((r.c - 1.5).abs() < 5e-3, "{}", r.c);
        assert!((r.c_free - 1.5).abs() < 5e-3, "{}", r.c_free);
        assert!(r.nondecreasing);
    }
}
