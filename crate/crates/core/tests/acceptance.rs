//! Acceptance suite. Each criterion prints one `[PASS]` or `[FAIL]` line to
//! the terminal (bypassing the test harness capture) before asserting.

mod common;

use std::io::Write;
use std::sync::OnceLock;

use rand::Rng;

use causet_core::causet::{height, height_dag, interval_height, interval_height_matrix};
use causet_core::chainstats::{
    check_mean_convergence, deviation_scale, estimate_heights, fit_k, superadditive, tail_report, HeightEnsemble,
    HeightOptions,
};
use causet_core::geometry::{Boost, IntervalSpec, Point};
use causet_core::noldus::{
    build_lattice, check_brackets, check_lattice_gaps, estimate_dn_upper, noldus_exact, probe_grid,
    DnUpperOptions, FiniteCausalSpace,
};
use causet_core::pointset::PointSet;
use causet_core::sampling::{boost_sample, sample_box, sample_interval, BoxRegion, RngSpec};
use causet_core::stats::{poisson_gof, two_sample_counts, wilson_interval};

const SEED: u64 = 20_240_611;

fn report(id: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr();
    let _ = writeln!(err, "[{tag}] {id}: {detail}");
    let _ = err.flush();
}

fn ensemble(lambda: f64, dim: usize, trials: usize, offset: u64) -> HeightEnsemble {
    let opts = HeightOptions {
        stream_offset: offset,
        ..HeightOptions::default()
    };
    estimate_heights(lambda, dim, trials, SEED, &opts).expect("ensemble")
}

/// The d = 2, λ = 10^6 ensemble shared by the anchor and the convergence fit.
fn million() -> &'static HeightEnsemble {
    static E: OnceLock<HeightEnsemble> = OnceLock::new();
    E.get_or_init(|| ensemble(1e6, 2, 50, 1 << 40))
}

fn rows_2d(p: &PointSet<f64>) -> Vec<Vec<f64>> {
    p.iter().map(|r| r.to_vec()).collect()
}

#[test]
fn criterion_01_c2_anchor() {
    let e = million();
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let mut mismatches = 0;
    for (i, &h) in e.heights.iter().enumerate() {
        let s = sample_interval(1e6, &q, RngSpec::new(SEED, (1 << 40) + i as u64)).unwrap();
        if common::lis_height(&rows_2d(&s.points)) as u64 != h {
            mismatches += 1;
        }
    }
    let pass = (1.37..=1.42).contains(&e.c_hat) && e.c_hat < 2f64.sqrt() && mismatches == 0;
    report(
        "criterion 1 (c_2 anchor)",
        pass,
        &format!(
            "λ=1e6, {} trials: c_hat={:.5} ± {:.5}, reference LIS mismatches {mismatches}",
            e.trials,
            e.c_hat,
            e.c_se()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_01b_mean_convergence_fit() {
    let grid = [ensemble(1e4, 2, 1000, 1 << 41), ensemble(1e5, 2, 300, 1 << 42), million().clone()];
    let r = check_mean_convergence(&grid).unwrap();
    let pass = (1.40..=1.43).contains(&r.c) && r.band_satisfied;
    report(
        "criterion 1b (limit fit over λ ∈ {1e4, 1e5, 1e6})",
        pass,
        &format!(
            "c={:.4}, c_hat ≈ c - {:.3} λ^-{:.2} (free exponent: c={:.4}, β={:.2}), band constant {:.4}, band satisfied {}",
            r.c, r.amplitude, r.beta, r.c_free, r.beta_free, r.band_constant, r.band_satisfied
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_superadditivity() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (dim, trials) in [(2usize, 200usize), (3, 60)] {
        let factor = 2f64.powi(dim as i32);
        let es: Vec<HeightEnsemble> = (0..3)
            .map(|k| ensemble(1e3 * factor.powi(k), dim, trials, ((dim as u64) << 36) + ((k as u64) << 32)))
            .collect();
        for w in es.windows(2) {
            let ok = superadditive(&w[0], &w[1]);
            pass &= ok;
            detail.push(format!(
                "d={dim} E H({:.0})={:.2}±{:.2} vs 2 E H({:.0})={:.2}±{:.2} {}",
                w[1].lambda,
                w[1].mean,
                w[1].se(),
                w[0].lambda,
                2.0 * w[0].mean,
                2.0 * w[0].se(),
                if ok { "ok" } else { "VIOLATED" }
            ));
        }
        let r = check_mean_convergence(&es).unwrap();
        detail.push(format!("d={dim} c_hat nondecreasing within 2 SE: {}", r.nondecreasing));
        pass &= r.nondecreasing;
    }
    report("criterion 2 (superadditivity)", pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_03_height_oracles() {
    let mut rng = common::rng(SEED ^ 3);
    let mut lis_dp = 0;
    for _ in 0..500 {
        let n = rng.random_range(0..=500);
        let pts = PointSet::from_flat(2, (0..2 * n).map(|_| rng.random::<f64>()).collect()).unwrap();
        if height(&pts).height == height_dag(&pts).height {
            lis_dp += 1;
        }
    }
    let mut dp_enum = 0;
    for _ in 0..100 {
        let n = rng.random_range(0..=15);
        let dim = rng.random_range(1..=3);
        let rows = common::random_points(&mut rng, n, dim);
        let pts = PointSet::from_flat(dim, rows.concat()).unwrap();
        if height_dag(&pts).height == common::brute_force_height(&rows) {
            dp_enum += 1;
        }
    }
    let pass = lis_dp == 500 && dp_enum == 100;
    report(
        "criterion 3 (height oracles)",
        pass,
        &format!("LIS = DP on {lis_dp}/500 instances, DP = enumeration on {dp_enum}/100"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_discrete_axioms() {
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let norm = 2f64.sqrt() * 1e3f64.sqrt();
    let mut invalid = 0;
    let mut pairs = 0u64;
    let mut rng = common::rng(SEED ^ 4);
    let mut triples = 0;
    let mut triple_failures = 0;
    for t in 0..100 {
        let s = sample_interval(1e3, &q, RngSpec::new(SEED, (4 << 32) + t)).unwrap();
        let n = s.len();
        let h = interval_height_matrix(&s.points);
        pairs += (n * n) as u64;
        let dist: Vec<f64> = h.iter().map(|&v| v as f64 / norm).collect();
        if FiniteCausalSpace::new(n, dist).is_err() {
            invalid += 1;
        }
        // ten random chains x < y < z per sample
        let mut found = 0;
        let mut attempts = 0;
        while found < 10 && attempts < 100_000 && n >= 3 {
            attempts += 1;
            let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            let p = |i: usize| s.points.point(i);
            if common::before(p(a), p(b)) && common::before(p(b), p(c)) {
                found += 1;
                triples += 1;
                if h[a * n + b] + h[b * n + c] + 1 > h[a * n + c] {
                    triple_failures += 1;
                }
            }
        }
    }
    let pass = invalid == 0 && triples == 1000 && triple_failures == 0;
    report(
        "criterion 4 (discrete causal axioms)",
        pass,
        &format!(
            "100 samples at λ=1e3, {pairs} ordered pairs: {invalid} samples violate an axiom; \
             H(x,y)+H(y,z)+1 <= H(x,z) fails on {triple_failures}/{triples} chains"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_scaling_law() {
    let lambda = 1e4;
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, t) in [0.5f64, 2.0].into_iter().enumerate() {
        let x = Point::origin(2);
        let y = Point::on_time_axis(2, t);
        let iv = IntervalSpec::new(x.clone(), y.clone()).unwrap();
        let heights: Vec<u64> = (0..200u64)
            .map(|i| {
                let s = sample_interval(lambda, &iv, RngSpec::new(SEED, (5 << 32) + ((k as u64) << 16) + i)).unwrap();
                interval_height(&s, &x, &y).unwrap().height as u64
            })
            .collect();
        let a = HeightEnsemble::from_heights(lambda, 2, heights).unwrap();
        let b = ensemble(lambda * t * t, 2, 200, (6 << 32) + ((k as u64) << 16));
        let se = (a.se().powi(2) + b.se().powi(2)).sqrt();
        let ok = (a.mean - b.mean).abs() <= 2.0 * se;
        pass &= ok;
        detail.push(format!(
            "t={t}: E H(<0,t>)={:.2} vs E H_(λt²)={:.2}, 2 SE={:.2}",
            a.mean,
            b.mean,
            2.0 * se
        ));
    }
    report("criterion 5 (scaling law)", pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_06_lattice_brackets() {
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let probes = probe_grid(&q, 100);
    let mut pass = true;
    let mut detail = Vec::new();
    let mut flagged = Vec::new();
    for eps in [0.2, 0.4] {
        let l = build_lattice(&q, eps, 1_000_000).unwrap();
        let c = check_brackets(&l, &probes, 1e-9).unwrap();
        let gaps = check_lattice_gaps(&l, 60_000_000);
        pass &= c.containment_violations == 0 && c.sandwich_violations == 0 && gaps.quantization_violations == 0;
        detail.push(format!(
            "ε={eps}: {} lattice points, {} probes; containment violations {}, sandwich violations {} of {} pairs, \
             distance quantization violations {} of {} lattice pairs",
            l.len(),
            c.probes,
            c.containment_violations,
            c.sandwich_violations,
            c.pairs,
            gaps.quantization_violations,
            gaps.pairs_checked
        ));
        if c.spread_violations > 0 {
            flagged.push(format!(
                "ε={eps}: spread bound d(x-,y+) <= d(x+,y-) + ε/4 fails on {} of {} probe pairs (max excess {:.4})",
                c.spread_violations, c.pairs, c.spread_max_excess
            ));
        }
    }
    report("criterion 6 (lattice brackets and ordering)", pass, &detail.join("; "));
    // a nonzero spread-violation count is reported as a lemma discrepancy
    let spread = if flagged.is_empty() {
        "no violations at tolerance 1e-9".to_string()
    } else {
        format!("LEMMA DISCREPANCY FLAGGED: {}", flagged.join("; "))
    };
    report("criterion 6 (lattice spread bound, reported)", true, &spread);
    assert!(pass);
}

#[test]
fn criterion_06_lattice_gap_threshold() {
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let mut pass = true;
    let mut detail = Vec::new();
    for eps in [0.2, 0.4] {
        let l = build_lattice(&q, eps, 1_000_000).unwrap();
        let g = check_lattice_gaps(&l, 60_000_000);
        pass &= g.violations == 0;
        let example = g
            .first_violation
            .map(|(a, b, d)| format!(", e.g. {:?} -> {:?} at d={d:.6}", l.points.point(a), l.points.point(b)))
            .unwrap_or_default();
        detail.push(format!(
            "ε={eps}: {} of {} lattice pairs ({}) have 0 < d < ε²/(4√d h) = {:.6}; smallest positive d = {:.6} = η{example}",
            g.violations,
            g.pairs_checked,
            if g.exhaustive { "all pairs" } else { "strided sources" },
            g.stated_threshold,
            g.min_positive
        ));
    }
    report("criterion 6 (lattice gap d = 0 or d >= ε²/(4√d h))", pass, &detail.join("; "));
    assert!(pass, "the stated lattice gap does not hold: neighbouring lattice points are η apart");
}

fn random_space(rng: &mut impl Rng, n: usize) -> FiniteCausalSpace<f64> {
    let d = common::random_causal_space(rng, n, 0.6);
    FiniteCausalSpace::new(n, d.concat()).unwrap()
}

fn rows(s: &FiniteCausalSpace<f64>) -> Vec<Vec<f64>> {
    (0..s.len()).map(|i| (0..s.len()).map(|j| s.get(i, j)).collect()).collect()
}

#[test]
fn criterion_07_noldus_exact() {
    let mut rng = common::rng(SEED ^ 7);
    let mut agree = 0;
    let mut self_zero = 0;
    let mut symmetric = 0;
    let trials = 60;
    for _ in 0..trials {
        let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let a = random_space(&mut rng, n);
        let b = random_space(&mut rng, m);
        let ab = noldus_exact(&a, &b, 6).unwrap().distance;
        if ab == common::noldus_definition(&rows(&a), &rows(&b)) {
            agree += 1;
        }
        if noldus_exact(&a, &a, 6).unwrap().distance == 0.0 {
            self_zero += 1;
        }
        if noldus_exact(&b, &a, 6).unwrap().distance == ab {
            symmetric += 1;
        }
    }
    let chain = |u: f64| FiniteCausalSpace::new(3, vec![0.0, u, 2.0 * u, 0.0, 0.0, u, 0.0, 0.0, 0.0]).unwrap();
    let three = noldus_exact(&chain(1.0), &chain(1.5), 6).unwrap().distance;
    let pass = agree == trials && self_zero == trials && symmetric == trials && three == 1.0;
    report(
        "criterion 7 (Noldus exactness)",
        pass,
        &format!(
            "definition oracle agrees on {agree}/{trials} random pairs, d_N(X,X)=0 on {self_zero}/{trials}, \
             symmetric on {symmetric}/{trials}, 3-chain example = {three}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_convergence_in_probability() {
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let eps = 0.3;
    let opts = DnUpperOptions::new(20, eps);
    let mut freq = Vec::new();
    let mut detail = Vec::new();
    for (k, lambda) in [1e3, 1e4, 1e5].into_iter().enumerate() {
        let mut exceed = 0;
        let mut empty = 0;
        let mut uppers = Vec::new();
        for i in 0..100u64 {
            let s = sample_interval(lambda, &q, RngSpec::new(SEED, (8 << 32) + ((k as u64) << 16) + i)).unwrap();
            if s.is_empty() {
                empty += 1;
                exceed += 1;
                continue;
            }
            let r = estimate_dn_upper(&s, 2f64.sqrt(), &opts).unwrap();
            uppers.push(r.upper);
            if r.upper >= eps {
                exceed += 1;
            }
        }
        let (lo, hi) = wilson_interval(exceed, 100, 0.95);
        let mean = uppers.iter().sum::<f64>() / uppers.len().max(1) as f64;
        detail.push(format!(
            "λ={lambda:.0}: P(upper >= ε) = {:.2} [{lo:.3}, {hi:.3}], mean upper {mean:.4}, empty samples {empty}",
            exceed as f64 / 100.0
        ));
        freq.push((exceed as f64 / 100.0, lo, hi));
    }
    let nonincreasing = freq.windows(2).all(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].2);
    let strict = freq[2].0 < freq[0].0;
    let pass = nonincreasing && strict;
    report("criterion 8 (convergence in probability, ε=0.3)", pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_09_concentration() {
    let small = ensemble(1e3, 2, 1000, 9 << 32);
    let mid = ensemble(1e4, 2, 1000, (9 << 32) + (1 << 20));
    let big = ensemble(1e5, 2, 1000, (9 << 32) + (2 << 20));
    let k = fit_k(&small).unwrap();
    let mut pass = true;
    let mut detail = vec![format!("K fitted at λ=1e3: {k:.4}")];
    for e in [&small, &mid, &big] {
        let cap = k * deviation_scale(e.lambda, 2).unwrap();
        let ok = e.sd <= cap;
        pass &= ok;
        detail.push(format!("sd(λ={:.0})={:.3} <= {cap:.3}: {ok}", e.lambda, e.sd));
    }
    let t = tail_report(big, &[2.0, 2.5, 3.0], k, 0.99).unwrap();
    for r in &t.rows {
        let ok = r.within_bound() == Some(true);
        pass &= ok;
        detail.push(format!(
            "μ={}: freq {:.4} [{:.4}, {:.4}] vs 4μ²e^-μ² = {:.4}",
            r.mu,
            r.point.freq,
            r.point.lo,
            r.point.hi,
            r.bound.unwrap_or(f64::NAN)
        ));
    }
    detail.push(format!(
        "corollary reading μ=√log λ={:.3}: freq {:.4} vs {:.2e}",
        t.corollary.mu,
        t.corollary.point.freq,
        t.corollary.bound.unwrap_or(f64::NAN)
    ));
    report("criterion 9 (concentration, λ=1e5, 1000 trials)", pass, &detail.join("; "));
    assert!(pass);
}

#[test]
fn criterion_10_sampler_statistics() {
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let lambda = 100.0;
    let counts: Vec<u64> = (0..2000u64)
        .map(|i| sample_interval(lambda, &q, RngSpec::new(SEED, (10 << 32) + i)).unwrap().len() as u64)
        .collect();
    let p_gof = poisson_gof(&counts, lambda * 0.5).unwrap();

    // counts in a test diamond S, directly and after boosting a box sample
    let region = BoxRegion::new(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap();
    let s_iv = IntervalSpec::new(Point::new(vec![-0.5, 0.0]).unwrap(), Point::new(vec![0.5, 0.2]).unwrap()).unwrap();
    let boost = Boost::<f64>::new(vec![0.1, -0.2], vec![0.6]).unwrap();
    let inv = boost.inverse();
    let pre = IntervalSpec::new(inv.apply_point(&s_iv.past).unwrap(), inv.apply_point(&s_iv.future).unwrap()).unwrap();
    let (plo, phi) = pre.bounding_box();
    assert!(plo.iter().chain(&phi).all(|c: &f64| c.abs() < 3.0), "preimage must sit inside the box");
    let count_in = |pts: &PointSet<f64>| pts.iter().filter(|p| s_iv.contains(p)).count() as u64;
    let direct: Vec<u64> = (0..2000u64)
        .map(|i| count_in(&sample_box(lambda, &region, RngSpec::new(SEED, (11 << 32) + i)).unwrap().points))
        .collect();
    let boosted: Vec<u64> = (0..2000u64)
        .map(|i| {
            let s = sample_box(lambda, &region, RngSpec::new(SEED, (12 << 32) + i)).unwrap();
            count_in(&boost_sample(&s, &boost).unwrap().points)
        })
        .collect();
    let p_boost = two_sample_counts(&direct, &boosted).unwrap();
    let pass = p_gof > 0.01 && p_boost > 0.01;
    report(
        "criterion 10 (sampler statistics)",
        pass,
        &format!("Poisson goodness of fit p={p_gof:.4} (2000 trials); boost invariance two-sample p={p_boost:.4}"),
    );
    assert!(pass);
}
