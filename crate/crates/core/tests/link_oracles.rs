//! Pair geometry and the union bound against independent computations.

use mbm::experiment::ExperimentConfig;
use mbm::link_analysis::{
    diff_matrix, gram_matrix, pair_geometry, pep_bound, union_bound, DEFAULT_RANK_TOL,
};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

fn nalgebra_sigma_sq(delta: &[Vec<num_complex::Complex<i64>>]) -> Vec<f64> {
    let rows = delta.len();
    let cols = delta[0].len();
    let d = DMatrix::from_fn(rows, cols, |r, c| {
        Complex::new(delta[r][c].re as f64, delta[r][c].im as f64)
    });
    let g = d.adjoint() * &d;
    let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_match_nalgebra(i in 0usize..512, j in 0usize..512) {
        prop_assume!(i != j);
        let set = ExperimentConfig::mic_sq(4, 2, 4, 2, 1).signal_set().unwrap();
        let geo = pair_geometry(&set, i, j, DEFAULT_RANK_TOL).unwrap();
        let want = nalgebra_sigma_sq(&diff_matrix(&set, i, j).unwrap());
        prop_assert_eq!(geo.squared_singular_values.len(), want.len());
        for (a, b) in geo.squared_singular_values.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{} vs {}", a, b);
        }
        // trace of the Gram matrix is the squared distance
        let trace: f64 = geo.squared_singular_values.iter().sum();
        prop_assert!((trace - set.pair_distance(i, j) as f64).abs() < 1e-8);
        let g = gram_matrix(&set, i, j);
        let n = set.n();
        let diag: i64 = (0..n).map(|k| g[k * n + k].re).sum();
        prop_assert_eq!(diag as u64, set.pair_distance(i, j));
    }

    #[test]
    fn rank_matches_nalgebra(i in 0usize..8192, j in 0usize..8192) {
        prop_assume!(i != j);
        let set = ExperimentConfig::mic_sq(4, 2, 6, 2, 1).signal_set().unwrap();
        let geo = pair_geometry(&set, i, j, DEFAULT_RANK_TOL).unwrap();
        let want = nalgebra_sigma_sq(&diff_matrix(&set, i, j).unwrap());
        let rank = want.iter().filter(|&&s| s > 1e-9 * want[0]).count();
        prop_assert_eq!(geo.rank, rank);
    }
}

#[test]
fn union_bound_matches_direct_pair_sum() {
    let set = ExperimentConfig::conventional(2, 4, 2).signal_set().unwrap();
    let snrs = [0.0, 5.0, 12.0];
    let curve = union_bound(&set, &snrs, 2).unwrap();
    for (k, &db) in snrs.iter().enumerate() {
        let rho = 10f64.powf(db / 10.0);
        let mut sum = 0.0;
        for i in 0..set.len() {
            for j in 0..set.len() {
                if i != j {
                    let g = pair_geometry(&set, i, j, DEFAULT_RANK_TOL).unwrap();
                    sum += pep_bound(&g, rho, 2) * set.bit_distance(i, j) as f64;
                }
            }
        }
        let direct = sum / (set.len() as f64 * set.bit_width() as f64);
        assert!((curve.ber_bound[k] - direct).abs() <= 1e-12 * direct, "{db} dB");
    }
}

#[test]
fn bound_decays_with_diversity_n_r() {
    let set = ExperimentConfig::mic_sq(4, 2, 4, 2, 1).signal_set().unwrap();
    for n_r in [1u32, 2, 4] {
        let c = union_bound(&set, &[60.0, 70.0], n_r).unwrap();
        let slope = (c.ber_bound[1].log10() - c.ber_bound[0].log10()) / 1.0;
        assert!((slope + n_r as f64).abs() < 0.05, "n_r={n_r} slope {slope}");
    }
}
