//! Property tests for the structural invariants: norm axioms on grid
//! sup-norms, multiplier algebra, discretizing-sequence properties under
//! random weights and parameters, and verdict invariances.

use proptest::prelude::*;

use lipap::embedding::{classify, EmbeddingQuery};
use lipap::majorant::{discretize, verify_discretizing_properties, Majorant};
use lipap::synth;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sup_norm_is_homogeneous_and_subadditive(
        seed in 0u64..1000,
        scale in 0.01f64..16.0,
    ) {
        let f = synth::random_box(1, 6, seed).unwrap();
        let g = synth::random_box(1, 6, seed ^ 0xdead).unwrap();
        let nf = f.sup_norm(4);
        let scaled = f.map_multiplier(|_| num_complex::Complex64::new(scale, 0.0));
        prop_assert!((scaled.sup_norm(4) - scale * nf).abs() <= 1e-9 * (1.0 + scale * nf));
        let sum = f.add(&g).unwrap();
        prop_assert!(sum.sup_norm(4) <= nf + g.sup_norm(4) + 1e-9);
    }

    #[test]
    fn sup_norm_vanishes_only_on_zero(seed in 0u64..1000) {
        let f = synth::random_box(2, 3, seed).unwrap();
        prop_assert!(f.sup_norm(2) > 0.0);
    }

    #[test]
    fn difference_power_law_random_steps(
        seed in 0u64..1000,
        h1 in -0.5f64..0.5,
        h2 in -0.5f64..0.5,
    ) {
        let f = synth::random_box(2, 3, seed).unwrap();
        let h = [h1, h2];
        let a = f.difference(&h, 1).difference(&h, 1).difference(&h, 1);
        let b = f.difference(&h, 3);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-11 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn discretizing_properties_hold_for_random_weights(
        seed in 0u64..500,
        lambda in 4.2f64..20.0,
        r in 0.5f64..2.5,
    ) {
        let omega = synth::random_quasiconcave(r, 300, seed);
        let seq = discretize(&omega, lambda, r, 300).unwrap();
        let report = verify_discretizing_properties(&seq, &omega);
        prop_assert!(report.pass, "{:?}", report.violations);
    }

    #[test]
    fn discretize_is_scale_invariant_dyadic(
        seed in 0u64..300,
        log2_scale in -8i32..8,
    ) {
        let r = 1.0;
        let omega = synth::random_quasiconcave(r, 200, seed);
        let seq = discretize(&omega, 5.0, r, 200).unwrap();
        let c = 2.0f64.powi(log2_scale);
        let Majorant::Tabulated { values } = &omega else { unreachable!() };
        let scaled = Majorant::tabulated(values.iter().map(|v| c * v).collect()).unwrap();
        let seq_c = discretize(&scaled, 5.0, r, 200).unwrap();
        prop_assert_eq!(&seq.mu, &seq_c.mu);
        prop_assert_eq!(&seq.labels, &seq_c.labels);
    }

    #[test]
    fn classify_is_scale_invariant(
        seed in 0u64..300,
        log2_scale in -6i32..6,
    ) {
        let omega = synth::random_quasiconcave(1.0, 512, seed);
        let q = EmbeddingQuery { d: 1, r: 1, l: 0, p: 1.0, omega: omega.clone(), continuous: false };
        let v0 = classify(&q, 16).unwrap().verdict;
        let c = 2.0f64.powi(log2_scale);
        let Majorant::Tabulated { values } = &omega else { unreachable!() };
        let scaled = Majorant::tabulated(values.iter().map(|v| c * v).collect()).unwrap();
        let qc = EmbeddingQuery { omega: scaled, ..q };
        prop_assert_eq!(classify(&qc, 16).unwrap().verdict, v0);
    }

    #[test]
    fn modulus_monotone_under_dyadic_refinement(seed in 0u64..200) {
        use lipap::smoothness::{dyadic_t_grid, modulus, ModulusQuery, SampleNorm};
        let f = synth::random_box(1, 8, seed).unwrap();
        let q = ModulusQuery::new(1, 0, SampleNorm::L2, dyadic_t_grid(32));
        let pts = modulus(&f, &q).unwrap();
        for w in pts.windows(2) {
            prop_assert!(w[0].value >= w[1].value * (1.0 - 1e-12));
        }
    }
}
