//! Property-based checks across modules.

use proptest::prelude::*;

use crate::causet::{height, height_dag, interval_height_in, interval_height_matrix, normalization};
use crate::geometry::{causal_distance, causally_precedes, Boost, IntervalSpec};
use crate::noldus::{estimate_dn_upper_with_probes, noldus_exact, DnUpperOptions, FiniteCausalSpace};
use crate::pointset::PointSet;
use crate::sampling::{boost_sample, sample_interval, CausetSample, Region, RngSpec};

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, dim)
}

fn cloud(dim: usize, max: usize) -> impl Strategy<Value = PointSet<f64>> {
    prop::collection::vec(coords(dim), 0..max).prop_map(move |rows| PointSet::from_flat(dim, rows.concat()).unwrap())
}

/// Longest-path distances of a random weighted DAG on `0..n`. Weights are
/// multiples of 1/8 so that path sums are exact.
fn dag_space() -> impl Strategy<Value = FiniteCausalSpace<f64>> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec(prop::option::weighted(0.5, (1u32..24).prop_map(|k| k as f64 / 8.0)), n * n).prop_map(move |w| {
            let mut d = vec![0.0f64; n * n];
            for i in (0..n).rev() {
                for j in i + 1..n {
                    let mut best = w[i * n + j].unwrap_or(0.0);
                    for k in i + 1..j {
                        if let Some(wik) = w[i * n + k] {
                            if d[k * n + j] > 0.0 {
                                best = best.max(wik + d[k * n + j]);
                            }
                        }
                    }
                    d[i * n + j] = best;
                }
            }
            FiniteCausalSpace::new_unchecked(n, d).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minkowski_distance_is_causal(x in coords(3), y in coords(3), z in coords(3)) {
        let dxy = causal_distance(&x, &y).unwrap();
        let dyx = causal_distance(&y, &x).unwrap();
        prop_assert!(dxy >= 0.0 && (dxy == 0.0 || dyx == 0.0));
        let dyz = causal_distance(&y, &z).unwrap();
        if dxy > 0.0 && dyz > 0.0 {
            prop_assert!(dxy + dyz <= causal_distance(&x, &z).unwrap() + 1e-12);
        }
    }

    #[test]
    fn boosts_preserve_distance(x in coords(3), y in coords(3), a in coords(3), v in prop::collection::vec(-0.6f64..0.6, 2)) {
        let b = Boost::new(a, v).unwrap();
        let before = causal_distance(&x, &y).unwrap();
        let after = causal_distance(&b.apply(&x), &b.apply(&y)).unwrap();
        prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before));
    }

    #[test]
    fn lightcone_matches_dag(p in cloud(2, 120)) {
        prop_assert_eq!(height(&p).height, height_dag(&p).height);
    }

    #[test]
    fn witness_is_a_chain(p in cloud(3, 60)) {
        let h = height(&p);
        prop_assert_eq!(h.witness_chain.len(), h.height);
        for w in h.witness_chain.windows(2) {
            prop_assert!(causally_precedes(p.point(w[0]), p.point(w[1])).unwrap());
        }
    }

    #[test]
    fn height_matrix_matches_pairwise(p in cloud(2, 25)) {
        let n = p.len();
        let m = interval_height_matrix(&p);
        for i in 0..n {
            for j in 0..n {
                let direct = interval_height_in(&p, p.point(i), p.point(j)).unwrap().height as u32;
                let related = causally_precedes(p.point(i), p.point(j)).unwrap();
                prop_assert_eq!(m[i * n + j], if related { direct } else { 0 });
            }
        }
    }

    #[test]
    fn random_dag_spaces_are_valid(s in dag_space()) {
        prop_assert!(s.validate().is_ok());
        prop_assert_eq!(noldus_exact(&s, &s, 6).unwrap().distance, 0.0);
    }

    #[test]
    fn exact_noldus_is_symmetric(a in dag_space(), b in dag_space()) {
        let ab = noldus_exact(&a, &b, 6).unwrap().distance;
        let ba = noldus_exact(&b, &a, 6).unwrap().distance;
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn estimator_bounds_exact_distance(
        sample in prop::collection::vec((0.05f64..0.95, -0.4f64..0.4), 1..=5),
        probes in prop::collection::vec((0.05f64..0.95, -0.4f64..0.4), 1..=5),
        density in 2.0f64..50.0,
    ) {
        let q = IntervalSpec::<f64>::standard(2, 1.0);
        let inside = |v: &[(f64, f64)]| -> PointSet<f64> {
            let rows: Vec<f64> = v.iter().filter(|&&(t, x)| q.contains(&[t, x])).flat_map(|&(t, x)| [t, x]).collect();
            PointSet::from_flat(2, rows).unwrap()
        };
        let pts = inside(&sample);
        let mut cont = inside(&probes);
        prop_assume!(!pts.is_empty() && !cont.is_empty());
        let s = CausetSample::from_points(pts, density, Region::Interval(q.clone()), vec![]).unwrap();
        // the continuum stand-in contains the sample itself
        for p in s.points.iter() {
            cont.push(p).unwrap();
        }
        let c_d = 2f64.sqrt();
        let est = estimate_dn_upper_with_probes(&s, c_d, &cont, &q, &DnUpperOptions::new(20, 0.4)).unwrap();
        let norm = normalization(density, 2, c_d);
        let h = interval_height_matrix(&s.points);
        let x1 = FiniteCausalSpace::new(s.len(), h.iter().map(|&v| v as f64 / norm).collect()).unwrap();
        let x2 = FiniteCausalSpace::from_fn(cont.len(), |i, j| causal_distance(cont.point(i), cont.point(j)).unwrap()).unwrap();
        let exact = noldus_exact(&x1, &x2, 10).unwrap().distance;
        prop_assert!(est.upper >= exact - 1e-12, "estimate {} below exact {}", est.upper, exact);
    }
}

#[test]
fn heights_invariant_under_boosts() {
    let q = IntervalSpec::<f64>::standard(2, 1.0);
    let b = Boost::new(vec![0.3, -0.1], vec![0.4]).unwrap();
    for i in 0..20 {
        let s = sample_interval(2000.0, &q, RngSpec::new(99, i)).unwrap();
        let t = boost_sample(&s, &b).unwrap();
        assert_eq!(height(&s.points).height, height(&t.points).height);
    }
}
