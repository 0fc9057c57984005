mod common;

use common::*;
use controversy::measures::{
    accordance_matrix, correctness_matrix, ensemble_positive_prob, entropy, phi_cac, phi_ccl, phi_cco, phi_gt_yac,
    phi_gt_yac_prime, phi_rasl, phi_row, CountVector, PositiveProbVector,
};
use controversy::{Error, RowSet};
use proptest::prelude::*;

fn h(counts: &[u64]) -> f64 {
    entropy(&CountVector::from_counts(counts.to_vec())).unwrap()
}

#[test]
fn entropy_reference_values() {
    assert!((h(&[3, 4, 3]) - 1.570951).abs() < 1e-6);
    assert!((h(&[1, 1, 8]) - 0.921928).abs() < 1e-6);
    assert!((h(&[4, 1]) - 0.721928).abs() < 1e-6);
    assert_eq!(h(&[5, 5]), 1.0);
    assert_eq!(h(&[10, 0]), 0.0);
    assert!(matches!(
        entropy(&CountVector::from_counts(vec![0, 0])),
        Err(Error::UndefinedInput(_))
    ));
}

#[test]
fn toy_a_row_controversy() {
    let m = toy_matrix(&TOY_A);
    assert_eq!(phi_row(&rows1(&[2, 5]), &m).unwrap(), 1.0);
    // three rows with a 3:1 split
    let q = phi_row(&rows1(&[1, 3, 4]), &m).unwrap();
    assert!((q - ref_entropy(&[3, 1])).abs() < 1e-12);
    assert_eq!(phi_row(&rows1(&[6, 7]), &m).unwrap(), 0.0);
}

#[test]
fn toy_b_class_controversy() {
    let m = toy_matrix(&TOY_B);
    let rows: Vec<Vec<u32>> = TOY_B.iter().map(|r| r.to_vec()).collect();
    for ids in [&[1, 2, 3, 4][..], &[1, 3, 4], &[5, 6, 7, 8], &[5, 6, 7], &[5, 6], &[1, 2, 3, 4, 5, 6, 7, 8]] {
        let zero: Vec<usize> = ids.iter().map(|i| i - 1).collect();
        let got = phi_ccl(&rows1(ids), &m).unwrap();
        assert!((got - ref_ccl(&rows, &zero, 2)).abs() < 1e-12, "{ids:?}");
    }
    assert!((phi_ccl(&rows1(&[1, 3, 4]), &m).unwrap() - 0.811278).abs() < 1e-6);
    assert_eq!(phi_ccl(&rows1(&[5, 6]), &m).unwrap(), 0.0);
}

#[test]
fn empty_subgroup_is_rejected() {
    let m = toy_matrix(&TOY_A);
    let empty = RowSet::empty(8);
    assert!(matches!(phi_row(&empty, &m), Err(Error::UndefinedInput(_))));
    assert!(matches!(phi_ccl(&empty, &m), Err(Error::UndefinedInput(_))));
}

/// Accordance by hand: majority per row, ties to the smallest code.
fn ref_accordance(rows: &[Vec<u32>], classes: usize) -> Vec<Vec<u32>> {
    rows.iter()
        .map(|r| {
            let mut counts = vec![0; classes];
            for &c in r {
                counts[c as usize] += 1;
            }
            let top = (0..classes).fold(0, |best, c| if counts[c] > counts[best] { c } else { best }) as u32;
            r.iter().map(|&c| (c == top) as u32).collect()
        })
        .collect()
}

#[test]
fn accordance_matches_hand_construction() {
    let rows: Vec<Vec<u32>> = TOY_A.iter().map(|r| r.to_vec()).collect();
    let acc = accordance_matrix(&toy_matrix(&TOY_A));
    let expected = ref_accordance(&rows, 2);
    for (i, row) in expected.iter().enumerate() {
        let got: Vec<u32> = acc.row(i).iter().map(|&b| b as u32).collect();
        assert_eq!(&got, row, "row {}", i + 1);
    }
    // (0,1,0,1) ties; class 0 wins
    assert_eq!(acc.row(1), &[1, 0, 1, 0]);
}

#[test]
fn cac_is_ccl_of_accordance() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 12, 1, 4, 3);
        let sg = random_subset(&mut rng, 12);
        let acc = ref_accordance(&inst.rows, 3);
        let members = sg.to_vec();
        let want = ref_ccl(&acc, &members, 2);
        let got = phi_cac(&sg, &inst.matrix).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn cco_equals_cac_when_majority_is_truth() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 10, 1, 5, 2);
        let majority: Vec<u32> = ref_accordance(&inst.rows, 2)
            .iter()
            .zip(&inst.rows)
            .map(|(acc, row)| row[acc.iter().position(|&a| a == 1).unwrap()])
            .collect();
        let sg = random_subset(&mut rng, 10);
        assert_eq!(
            phi_cco(&sg, &inst.matrix, Some(&majority)).unwrap(),
            phi_cac(&sg, &inst.matrix).unwrap()
        );
    }
}

#[test]
fn cco_on_negated_and_half_wrong_matrices() {
    // every classifier always wrong: correctness is all zeros
    let truth = [0, 1, 0, 1, 1, 0];
    let rows: Vec<Vec<u32>> = truth.iter().map(|&y| vec![1 - y; 4]).collect();
    let m = matrix_from_rows(&rows, 2);
    let all = RowSet::full(6);
    assert_eq!(phi_cco(&all, &m, Some(&truth)).unwrap(), 0.0);

    // two classifiers right and two wrong on every row
    let truth = [0, 1, 1, 0];
    let rows: Vec<Vec<u32>> = truth.iter().map(|&y| vec![y, y, 1 - y, 1 - y]).collect();
    let m = matrix_from_rows(&rows, 2);
    assert_eq!(phi_cco(&RowSet::full(4), &m, Some(&truth)).unwrap(), 1.0);
    let c = correctness_matrix(&m, Some(&truth)).unwrap();
    assert_eq!(c.row(0), &[1, 1, 0, 0]);
    assert!(matches!(correctness_matrix(&m, None), Err(Error::MissingGroundTruth)));
}

#[test]
fn truth_augmented_rows() {
    let m = toy_matrix(&TOY_A);
    let truth = [1, 1, 1, 1, 0, 0, 0, 0];
    // row 2 (0,1,0,1) plus truth 1: tally (2,3)
    let sg = rows1(&[2]);
    assert!((phi_gt_yac(&sg, &m, Some(&truth)).unwrap() - ref_entropy(&[2, 3])).abs() < 1e-12);
    // n copies of the truth: tally (2,6)
    assert!((phi_gt_yac_prime(&sg, &m, Some(&truth)).unwrap() - ref_entropy(&[2, 6])).abs() < 1e-12);
    assert!(matches!(phi_gt_yac(&sg, &m, None), Err(Error::MissingGroundTruth)));
}

#[test]
fn rasl_worked_cases() {
    let truth = [1, 0, 1, 0];
    let all = RowSet::full(4);
    let perfect = PositiveProbVector(vec![0.9, 0.1, 0.8, 0.2]);
    assert_eq!(phi_rasl(&all, &perfect, Some(&truth), 1).unwrap(), 0.0);
    let reversed = PositiveProbVector(vec![0.1, 0.9, 0.2, 0.8]);
    assert_eq!(phi_rasl(&all, &reversed, Some(&truth), 1).unwrap(), 2.0);
    let tied = PositiveProbVector(vec![0.5; 4]);
    assert_eq!(phi_rasl(&all, &tied, Some(&truth), 1).unwrap(), 1.0);
    // positive at 0.2 against negatives at 0.8 and 0.2
    let mixed = PositiveProbVector(vec![0.2, 0.8, 0.0, 0.2]);
    let sg = RowSet::from_indices(4, [0, 1, 3]);
    assert_eq!(phi_rasl(&sg, &mixed, Some(&truth), 1).unwrap(), 1.5);
    // one positive among negatives only
    let only_pos = RowSet::from_indices(4, [0, 2]);
    assert!(matches!(phi_rasl(&only_pos, &perfect, Some(&truth), 1), Err(Error::UndefinedSubgroup(_))));
}

#[test]
fn rasl_from_votes_matches_pair_count() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 15, 1, 5, 2);
        let truth = inst.ds.truth().unwrap();
        let prob = ensemble_positive_prob(&inst.matrix, 1).unwrap();
        let sg = random_subset(&mut rng, 15);
        let want = ref_rasl(prob.values(), truth, &sg.to_vec(), 1);
        assert_eq!(phi_rasl(&sg, &prob, Some(truth), 1).ok(), want);
    }
}

fn matrix_strategy() -> impl Strategy<Value = (Vec<Vec<u32>>, usize, Vec<bool>)> {
    (2usize..=4, 1usize..=20, 2usize..=6).prop_flat_map(|(classes, m, n)| {
        (
            prop::collection::vec(prop::collection::vec(0..classes as u32, n), m),
            Just(classes),
            prop::collection::vec(any::<bool>(), m),
        )
    })
}

proptest! {
    #[test]
    fn ccl_never_exceeds_row((rows, classes, mask) in matrix_strategy()) {
        let m = matrix_from_rows(&rows, classes);
        let mut sg = RowSet::from_predicate(rows.len(), |i| mask[i]);
        if sg.is_empty() {
            sg.insert(0);
        }
        let row = phi_row(&sg, &m).unwrap();
        let ccl = phi_ccl(&sg, &m).unwrap();
        prop_assert!(ccl <= row + 1e-12);
        prop_assert!(row >= 0.0 && row <= (classes as f64).log2() + 1e-12);
        prop_assert!((row - ref_row(&rows, &sg.to_vec(), classes)).abs() < 1e-12);
        prop_assert!((ccl - ref_ccl(&rows, &sg.to_vec(), classes)).abs() < 1e-12);
    }

    #[test]
    fn reversing_classifiers_changes_nothing((rows, classes, mask) in matrix_strategy()) {
        let m = matrix_from_rows(&rows, classes);
        let order: Vec<usize> = (0..m.n()).rev().collect();
        let p = m.permute_columns(&order);
        let mut sg = RowSet::from_predicate(rows.len(), |i| mask[i]);
        if sg.is_empty() {
            sg.insert(0);
        }
        prop_assert_eq!(phi_row(&sg, &m).unwrap(), phi_row(&sg, &p).unwrap());
        prop_assert_eq!(phi_ccl(&sg, &m).unwrap(), phi_ccl(&sg, &p).unwrap());
        prop_assert_eq!(phi_cac(&sg, &m).unwrap(), phi_cac(&sg, &p).unwrap());
    }
}
