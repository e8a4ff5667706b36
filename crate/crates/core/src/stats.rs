//! Small statistics toolkit: summaries, Wilson intervals and chi-square tests.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); zero for n < 2.
    pub sd: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Summary { n, mean: f64::NAN, sd: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { n, mean, sd }
    }

    pub fn se(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

/// Two-sided standard normal quantile for the given confidence level.
pub fn z_value(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Wilson score interval for `successes` out of `n` trials.
pub fn wilson_interval(successes: usize, n: usize, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z_value(confidence);
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Pearson statistic and p-value for observed vs expected bin counts.
pub fn chi_square(observed: &[f64], expected: &[f64], lost_dof: usize) -> Result<(f64, f64)> {
    if observed.len() != expected.len() || observed.len() <= lost_dof + 1 {
        return Err(Error::invalid("too few bins for a chi-square test"));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = (observed.len() - 1 - lost_dof) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("dof > 0").cdf(stat);
    Ok((stat, p))
}

/// Goodness of fit of integer counts to Poisson(`mean`).
///
/// Bins are contiguous ranges of counts, each with expected frequency at least 5;
/// the two tails are folded into the outer bins.
pub fn poisson_gof(counts: &[u64], mean: f64) -> Result<f64> {
    let n = counts.len() as f64;
    let pois = statrs::distribution::Poisson::new(mean)
        .map_err(|e| Error::invalid(format!("Poisson({mean}): {e}")))?;
    let max = counts.iter().copied().max().unwrap_or(0).max((mean * 3.0) as u64 + 10);
    let mut edges = Vec::new(); // inclusive upper edge of each bin
    let mut acc = 0.0;
    for k in 0..=max {
        acc += pois.pmf(k) * n;
        if acc >= 5.0 {
            edges.push(k);
            acc = 0.0;
        }
    }
    if edges.len() < 3 {
        return Err(Error::invalid("too few trials for a Poisson goodness-of-fit test"));
    }
    // the last partial bin merges into the final one, which is open-ended
    edges.pop();
    let mut expected = Vec::with_capacity(edges.len() + 1);
    let mut lo = 0u64;
    for &hi in &edges {
        expected.push((lo..=hi).map(|k| pois.pmf(k)).sum::<f64>() * n);
        lo = hi + 1;
    }
    expected.push(n - expected.iter().sum::<f64>());
    let mut observed = vec![0.0; expected.len()];
    for &c in counts {
        let bin = edges.iter().position(|&e| c <= e).unwrap_or(edges.len());
        observed[bin] += 1.0;
    }
    Ok(chi_square(&observed, &expected, 0)?.1)
}

/// Chi-square test of homogeneity between two samples of integer counts.
pub fn two_sample_counts(a: &[u64], b: &[u64]) -> Result<f64> {
    let mut all: Vec<u64> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    // bins of pooled size ~ (n_a + n_b) / k with at least 10 pooled entries each
    let k = (all.len() / 20).clamp(2, 30);
    let mut edges: Vec<u64> = (1..k).map(|i| all[i * all.len() / k]).collect();
    edges.dedup();
    let bin = |c: u64| edges.iter().position(|&e| c < e).unwrap_or(edges.len());
    let nb = edges.len() + 1;
    let mut table = vec![vec![0.0; nb]; 2];
    for &c in a {
        table[0][bin(c)] += 1.0;
    }
    for &c in b {
        table[1][bin(c)] += 1.0;
    }
    contingency(&table)
}

/// Chi-square test of independence on a contingency table (empty columns dropped).
pub fn contingency(table: &[Vec<f64>]) -> Result<f64> {
    let cols = table.first().map(|r| r.len()).unwrap_or(0);
    let col_tot: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let keep: Vec<usize> = (0..cols).filter(|&j| col_tot[j] > 0.0).collect();
    let rows: Vec<f64> = table.iter().map(|r| keep.iter().map(|&j| r[j]).sum()).collect();
    let total: f64 = rows.iter().sum();
    if keep.len() < 2 || rows.len() < 2 {
        return Err(Error::invalid("contingency table needs two nonempty rows and columns"));
    }
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for &j in &keep {
            let e = rows[i] * col_tot[j] / total;
            if e > 0.0 {
                stat += (r[j] - e) * (r[j] - e) / e;
            }
        }
    }
    let dof = ((rows.len() - 1) * (keep.len() - 1)) as f64;
    Ok(1.0 - ChiSquared::new(dof).expect("dof > 0").cdf(stat))
}
