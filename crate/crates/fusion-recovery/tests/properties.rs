//! Property tests for the structural invariants of the signal model and the
//! matrix analytics.

use fusion_recovery::frame::FusionFrame;
use fusion_recovery::measurement::{coherence, fusion_coherence, random_measurement_matrix};
use fusion_recovery::signal::{
    mixed_norm, sgn_rows, synthesize, unvectorize_rows, vectorize_rows, BlockCoefficients,
    SupportSet,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..6, 1usize..6).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-10.0f64..10.0, rows * cols)
            .prop_map(move |data| DMatrix::from_row_slice(rows, cols, &data))
    })
}

fn coefficient_pair() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    proptest::collection::vec(1usize..4, 1..5).prop_flat_map(|dims| {
        let total: usize = dims.iter().sum();
        let make = move |data: Vec<f64>, dims: &[usize]| {
            let mut blocks = Vec::new();
            let mut offset = 0;
            for &d in dims {
                blocks.push(data[offset..offset + d].to_vec());
                offset += d;
            }
            blocks
        };
        let dims2 = dims.clone();
        (
            proptest::collection::vec(-5.0f64..5.0, total),
            proptest::collection::vec(-5.0f64..5.0, total),
        )
            .prop_map(move |(a, b)| (make(a, &dims), make(b, &dims2)))
    })
}

fn to_coefficients(blocks: &[Vec<f64>]) -> BlockCoefficients {
    BlockCoefficients::new(blocks.iter().map(|b| DVector::from_column_slice(b)).collect())
}

proptest! {
    #[test]
    fn sgn_rows_normalizes_and_is_idempotent(x in small_matrix()) {
        let s = sgn_rows(&x);
        for i in 0..s.nrows() {
            let norm = s.row(i).norm();
            prop_assert!(norm <= 1e-12 || (norm - 1.0).abs() <= 1e-12);
        }
        let twice = sgn_rows(&s);
        prop_assert!((twice - &s).amax() <= 1e-12);
    }

    #[test]
    fn vectorize_round_trips(x in small_matrix()) {
        let v = vectorize_rows(&x);
        let back = unvectorize_rows(&v, x.nrows(), x.ncols()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn group_norm_triangle_inequality((a, b) in coefficient_pair()) {
        let ca = to_coefficients(&a);
        let cb = to_coefficients(&b);
        let sum = to_coefficients(
            &a.iter()
                .zip(&b)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
                .collect::<Vec<_>>(),
        );
        let w = vec![1.0; ca.num_blocks()];
        let lhs = mixed_norm(&sum, &w, 1).unwrap();
        let rhs = mixed_norm(&ca, &w, 1).unwrap() + mixed_norm(&cb, &w, 1).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn block_count_subadditive_on_disjoint_supports(
        (a, b) in coefficient_pair(),
        mask in proptest::collection::vec(any::<bool>(), 1..5),
    ) {
        // Zero out complementary blocks so the two supports are disjoint.
        let n = a.len();
        let zero = |blocks: &[Vec<f64>], keep: &dyn Fn(usize) -> bool| -> Vec<Vec<f64>> {
            blocks
                .iter()
                .enumerate()
                .map(|(j, b)| if keep(j) { b.clone() } else { vec![0.0; b.len()] })
                .collect()
        };
        let pick = |j: usize| mask.get(j % mask.len()).copied().unwrap_or(false);
        let a = zero(&a, &|j| pick(j));
        let b = zero(&b, &|j| !pick(j));
        let sum: Vec<Vec<f64>> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
            .collect();
        let w = vec![1.0; n];
        let lhs = mixed_norm(&to_coefficients(&sum), &w, 0).unwrap();
        let rhs = mixed_norm(&to_coefficients(&a), &w, 0).unwrap()
            + mixed_norm(&to_coefficients(&b), &w, 0).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn fusion_coherence_never_exceeds_coherence(
        seed in any::<u64>(),
        rows in 2usize..8,
        cols in 2usize..8,
        ambient in 2usize..6,
    ) {
        let dim = 1 + (seed as usize % ambient);
        let frame = FusionFrame::random(ambient, dim, cols, seed).unwrap();
        let matrix = random_measurement_matrix(rows, cols, seed ^ 0xabcd).unwrap();
        let mu = coherence(&matrix).unwrap();
        let mu_f = fusion_coherence(&matrix, &frame).unwrap();
        prop_assert!(mu_f <= mu + 1e-12);
    }

    #[test]
    fn theta_stays_within_support_size(
        seed in any::<u64>(),
        ambient in 2usize..6,
        count in 2usize..7,
    ) {
        let dim = 1 + (seed as usize % ambient);
        let frame = FusionFrame::random(ambient, dim, count, seed).unwrap();
        let k = 1 + (seed as usize % count);
        let support = SupportSet::random(count, k, seed ^ 0x77).unwrap();
        let theta = frame.theta_of_support(&support).unwrap();
        prop_assert!(theta >= 1.0 - 1e-12);
        prop_assert!(theta <= k as f64 + 1e-9);
    }

    #[test]
    fn synthesis_preserves_block_norms(seed in any::<u64>(), count in 1usize..6) {
        let frame = FusionFrame::random(5, 2, count, seed).unwrap();
        let support = SupportSet::new((0..count).collect()).unwrap();
        let c = fusion_recovery::random_gaussian_signal(&frame, &support, seed ^ 0x3).unwrap();
        let x = synthesize(&frame, &c).unwrap();
        for j in 0..count {
            prop_assert!((x.entries().row(j).norm() - c.block(j).norm()).abs() <= 1e-10);
        }
    }
}
