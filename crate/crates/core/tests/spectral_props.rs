mod common;

use common::{arb_graph, arb_graph_signal, norm, rel_diff};
use hpgcn::graph::{degrees, NormalizedLaplacian};
use hpgcn::spectral::{
    apply_spatial_filter, apply_spectral_filter, dense_eigendecompose, frequency_response, gft, igft,
    FilterCoefficients,
};
use proptest::prelude::*;

fn arb_theta() -> impl Strategy<Value = FilterCoefficients> {
    proptest::collection::vec(-2.0f64..2.0, 1..=8).prop_map(|t| FilterCoefficients::new(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spatial_matches_spectral((g, x) in arb_graph_signal(64), theta in arb_theta()) {
        let basis = dense_eigendecompose(&g).unwrap();
        let spectral = apply_spectral_filter(&basis, &theta, &x).unwrap();
        let spatial = apply_spatial_filter(&g, &degrees(&g), &theta, &x).unwrap();
        let rel = rel_diff(&spatial, &spectral);
        prop_assert!(rel < 1e-8 || norm(&spectral) < 1e-12, "relative difference {}", rel);
    }

    #[test]
    fn spectrum_in_bounds_and_orthonormal(g in arb_graph(48)) {
        let basis = dense_eigendecompose(&g).unwrap();
        let n = basis.n();
        for w in basis.lambdas.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for &l in &basis.lambdas {
            prop_assert!((-1e-9..=2.0 + 1e-9).contains(&l), "lambda {}", l);
        }
        let utu = basis.u.t_matmul(&basis.u).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((utu.get(i, j) - expected).abs() < 1e-9);
            }
        }
        let lap = NormalizedLaplacian::new(g.clone());
        for i in 0..n {
            let u = basis.eigenvector(i);
            let lu = lap.apply(&u).unwrap();
            let lambda_u: Vec<f64> = u.iter().map(|v| v * basis.lambdas[i]).collect();
            prop_assert!(rel_diff(&lu, &lambda_u) < 1e-8 || norm(&lu) < 1e-12);
        }
    }

    #[test]
    fn parseval_and_roundtrip((g, x) in arb_graph_signal(64)) {
        let basis = dense_eigendecompose(&g).unwrap();
        let xhat = gft(&basis, &x).unwrap();
        prop_assert!((norm(&xhat) - norm(&x)).abs() <= 1e-9 * norm(&x).max(1e-300));
        let back = igft(&basis, &xhat).unwrap();
        prop_assert!(rel_diff(&back, &x) < 1e-9 || norm(&x) == 0.0);
    }

    #[test]
    fn spatial_filter_is_linear(
        (g, x) in arb_graph_signal(32),
        theta in arb_theta(),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let deg = degrees(&g);
        let z: Vec<f64> = (0..x.len()).map(|i| ((seed.wrapping_add(i as u64) % 1000) as f64) / 100.0 - 5.0).collect();
        let combo: Vec<f64> = x.iter().zip(&z).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = apply_spatial_filter(&g, &deg, &theta, &combo).unwrap();
        let fx = apply_spatial_filter(&g, &deg, &theta, &x).unwrap();
        let fz = apply_spatial_filter(&g, &deg, &theta, &z).unwrap();
        for i in 0..x.len() {
            let rhs = alpha * fx[i] + beta * fz[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-10 * (1.0 + rhs.abs().max(lhs[i].abs())));
        }
    }

    #[test]
    fn pure_powers_are_high_pass(k in 1usize..8) {
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 / 200.0).collect();
        let h = frequency_response(&FilterCoefficients::pure_power(k + 1).unwrap(), &grid);
        for w in h.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }
}
