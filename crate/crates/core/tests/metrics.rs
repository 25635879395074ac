use jpegcompat::metrics::rate;
use jpegcompat::{collapse_to_blocks, evaluate, Label};
use proptest::prelude::*;

use Label::{Authentic as A, Manipulated as M};

#[test]
fn collapse_examples() {
    assert!(collapse_to_blocks(&[false; 256], 16, 16).unwrap().iter().all(|&l| l == A));
    let mut one = vec![false; 256];
    one[9 * 16 + 3] = true;
    assert_eq!(collapse_to_blocks(&one, 16, 16).unwrap(), vec![A, A, M, A]);
    assert!(collapse_to_blocks(&[true; 256], 16, 16).unwrap().iter().all(|&l| l == M));
    assert!(collapse_to_blocks(&[false; 96], 12, 8).is_err());
    assert!(collapse_to_blocks(&[false; 10], 16, 16).is_err());
}

#[test]
fn evaluate_examples() {
    let truth = [M, M, A, A];
    let e = evaluate(&truth, &truth, false).unwrap();
    assert_eq!((e.acc, e.fpr), (1.0, 0.0));
    let inv: Vec<Label> = truth.iter().map(|l| l.inverted()).collect();
    assert_eq!(evaluate(&inv, &truth, false).unwrap().acc, 0.0);
    let e = evaluate(&inv, &truth, true).unwrap();
    assert_eq!((e.acc, e.fpr, e.inverted), (1.0, 0.0, true));
    assert_eq!(evaluate(&[A; 4], &truth, true).unwrap().acc, 0.5);
    let e = evaluate(&[M, A, M, A], &truth, false).unwrap();
    assert_eq!((e.counts.tp, e.counts.fn_, e.counts.fp, e.counts.tn), (1, 1, 1, 1));
    assert_eq!(e.fpr, 0.5);
    assert!(evaluate(&[A; 3], &truth, false).is_err());
}

#[test]
fn zero_denominators() {
    assert_eq!(rate(0, 0), 1.0);
    // No manipulated blocks: TPR is 1 by convention, so ACC rests on TNR.
    let e = evaluate(&[A, M], &[A, A], false).unwrap();
    assert_eq!((e.tpr, e.tnr, e.acc), (1.0, 0.5, 0.75));
}

fn labels(n: usize) -> impl Strategy<Value = Vec<Label>> {
    prop::collection::vec(prop_oneof![Just(A), Just(M)], n)
}

proptest! {
    #[test]
    fn permuted_never_scores_lower((p, t) in (1usize..64).prop_flat_map(|n| (labels(n), labels(n)))) {
        let plain = evaluate(&p, &t, false).unwrap();
        let perm = evaluate(&p, &t, true).unwrap();
        prop_assert!(perm.acc >= plain.acc);
        prop_assert_eq!(perm.counts.total(), p.len() as u64);
    }

    #[test]
    fn joint_inversion_keeps_permuted_acc((p, t) in (1usize..64).prop_flat_map(|n| (labels(n), labels(n)))) {
        let ip: Vec<Label> = p.iter().map(|l| l.inverted()).collect();
        let it: Vec<Label> = t.iter().map(|l| l.inverted()).collect();
        let a = evaluate(&p, &t, true).unwrap().acc;
        let b = evaluate(&ip, &it, true).unwrap().acc;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn collapse_is_monotone(mask in prop::collection::vec(any::<bool>(), 256), extra in 0usize..256) {
        let before = collapse_to_blocks(&mask, 16, 16).unwrap();
        let mut more = mask.clone();
        more[extra] = true;
        let after = collapse_to_blocks(&more, 16, 16).unwrap();
        for (b, a) in before.iter().zip(&after) {
            prop_assert!(*b == A || *a == M);
        }
    }
}
