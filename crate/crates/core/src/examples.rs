//! Fixture tensors: the standard counterexamples of bilocality and a
//! signaling tensor.

use crate::tensor::{mix, product_ct, CorrelationTensor, ResponseMatrix, Scenario};

fn rm(rows: &[&[f64]]) -> ResponseMatrix {
    ResponseMatrix::from_rows(rows).expect("fixture matrices are well formed")
}

/// The 2/2/2 tensor `½ P'_A⊗P_B⊗P'_C + ½ P''_A⊗P_B⊗P''_C`: Bell local, yet
/// `P_AC ≠ P_A ⊗ P_C` everywhere, hence not bilocal.
///
/// `P_B` is uniform, `P'_A` always answers 1, `P''_A` always answers 2,
/// `P'_C` answers `z`, `P''_C` answers `3 - z`.
pub fn not_bilocal() -> CorrelationTensor {
    let (p, pp) = not_bilocal_components();
    mix(&[(0.5, &p), (0.5, &pp)]).expect("weights sum to one")
}

/// The two bilocal product tensors whose even mixture is [`not_bilocal`].
pub fn not_bilocal_components() -> (CorrelationTensor, CorrelationTensor) {
    let pb = rm(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let pa1 = rm(&[&[1.0, 0.0], &[1.0, 0.0]]);
    let pa2 = rm(&[&[0.0, 1.0], &[0.0, 1.0]]);
    let pc1 = rm(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let pc2 = rm(&[&[0.0, 1.0], &[1.0, 0.0]]);
    (
        product_ct(&[pa1, pc1, pb.clone()]).expect("consistent factors"),
        product_ct(&[pa2, pc2, pb]).expect("consistent factors"),
    )
}

/// The 2/2/2 probability tensor `P(1,1,1) = P(2,2,2) = ½`.
pub fn shared_coin() -> CorrelationTensor {
    let s = Scenario::probability(vec![2, 2], 2).expect("valid scenario");
    CorrelationTensor::from_fn(s, |a, _| {
        if a[0] == a[1] && a[1] == a[2] {
            0.5
        } else {
            0.0
        }
    })
    .expect("valid fixture")
}

/// 2/2/2 tensor whose hub output equals `x_1` while every edge always
/// answers 1: normalized, but maximally signaling from `A_1` to `B`.
pub fn hub_copies_first_input() -> CorrelationTensor {
    let s = Scenario::homogeneous(2, 2, 2).expect("valid scenario");
    CorrelationTensor::from_fn(s, |a, x| {
        if a[0] == 0 && a[1] == 0 && a[2] == x[0] {
            1.0
        } else {
            0.0
        }
    })
    .expect("valid fixture")
}
