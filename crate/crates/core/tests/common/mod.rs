//! Reference implementations kept deliberately naive, shared by the
//! integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strict timelike order, written out from the Minkowski form.
pub fn before(x: &[f64], y: &[f64]) -> bool {
    let dt = y[0] - x[0];
    let space: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (b - a) * (b - a)).sum();
    dt > 0.0 && dt * dt - space > 0.0
}

/// Longest chain by checking every subset; `n <= 20`.
pub fn brute_force_height(points: &[Vec<f64>]) -> usize {
    let n = points.len();
    assert!(n <= 20);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a][0].partial_cmp(&points[b][0]).unwrap());
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let chosen: Vec<usize> = order.iter().copied().filter(|&i| mask >> i & 1 == 1).collect();
        let chain = chosen
            .iter()
            .enumerate()
            .all(|(k, &a)| chosen[k + 1..].iter().all(|&b| before(&points[a], &points[b])));
        if chain {
            best = size;
        }
    }
    best
}

/// Longest increasing subsequence in light-cone coordinates: sort by
/// `u = t - x`, then take a strictly increasing run of `v = t + x` with a
/// tails array.
pub fn lis_height(points: &[Vec<f64>]) -> usize {
    let mut uv: Vec<(f64, f64)> = points.iter().map(|p| (p[0] - p[1], p[0] + p[1])).collect();
    uv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.partial_cmp(&a.1).unwrap()));
    let mut tails: Vec<f64> = Vec::new();
    for &(_, v) in &uv {
        let k = tails.partition_point(|&t| t < v);
        if k == tails.len() {
            tails.push(v);
        } else {
            tails[k] = v;
        }
    }
    tails.len()
}

pub fn random_points(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Distances of a random weighted DAG, taken along longest paths. Weights are
/// multiples of 1/8 so that path sums are exact.
#[allow(clippy::needless_range_loop)]
pub fn random_causal_space(rng: &mut impl Rng, n: usize, edge_prob: f64) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_prob {
                w[i][j] = rng.random_range(1..16) as f64 / 8.0;
            }
        }
    }
    let mut d = vec![vec![0.0f64; n]; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            let mut best: f64 = w[i][j];
            for k in i + 1..j {
                if w[i][k] > 0.0 && d[k][j] > 0.0 {
                    best = best.max(w[i][k] + d[k][j]);
                }
            }
            d[i][j] = best;
        }
    }
    // relabel so that the order is not just the index order
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[perm[i]][perm[j]] = d[i][j];
        }
    }
    out
}

/// Noldus distance straight from the definition: the smallest `ε` for which
/// some pair `(ψ, φ)` distorts both directions by at most `ε`.
pub fn noldus_definition(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let maps = |from: usize, to: usize| -> Vec<Vec<usize>> {
        let total = to.pow(from as u32);
        (0..total)
            .map(|mut code| {
                (0..from)
                    .map(|_| {
                        let v = code % to;
                        code /= to;
                        v
                    })
                    .collect()
            })
            .collect()
    };
    let dist = |f: &[usize], x: &[Vec<f64>], y: &[Vec<f64>]| -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..f.len() {
            for j in 0..f.len() {
                worst = worst.max((x[i][j] - y[f[i]][f[j]]).abs());
            }
        }
        worst
    };
    let psis = maps(n, m);
    let phis = maps(m, n);
    let mut best = f64::INFINITY;
    for psi in &psis {
        let dp = dist(psi, a, b);
        for phi in &phis {
            best = best.min(dp.max(dist(phi, b, a)));
        }
    }
    best
}
