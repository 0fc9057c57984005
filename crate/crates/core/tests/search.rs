mod common;

use common::*;
use controversy::description::{refine, Binning};
use controversy::search::DEFAULT_ORACLE_BUDGET;
use controversy::{
    beam_search, exhaustive_search, AttributeColumn, Dataset, Description, Direction, Error, Measure, SearchConfig,
};

#[test]
fn toy_a_beam_finds_starred_rows() {
    let ds = indicator_dataset();
    let cfg = SearchConfig {
        measure: Measure::Row,
        depth: 6,
        min_support: 0.25,
        ..SearchConfig::default()
    };
    let results = beam_search(&ds, &toy_matrix(&TOY_A), &cfg).unwrap();
    let top = &results.entries[0];
    assert_eq!(top.description.evaluate(&ds).to_vec(), [1, 4]);
    assert_eq!(top.quality, 1.0);
}

#[test]
fn toy_b_beam_reaches_top_region() {
    let ds = indicator_dataset();
    let cfg = SearchConfig {
        measure: Measure::Ccl,
        depth: 5,
        min_support: 3.0 / 8.0,
        ..SearchConfig::default()
    };
    let m = toy_matrix(&TOY_B);
    let beam = beam_search(&ds, &m, &cfg).unwrap();
    let oracle = exhaustive_search(&ds, &m, &cfg, DEFAULT_ORACLE_BUDGET).unwrap();
    let top = &beam.entries[0];
    assert_eq!(top.description.evaluate(&ds).to_vec(), [0, 2, 3]);
    assert!((top.quality - 0.811278).abs() < 1e-6);
    assert!(top.quality <= oracle.entries[0].quality);
}

#[test]
fn min_support_holds_for_every_entry() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, 50, 4, 3, 2);
        let cfg = SearchConfig {
            measure: Measure::Ccl,
            min_support: 0.1,
            ..SearchConfig::default()
        };
        let results = beam_search(&inst.ds, &inst.matrix, &cfg).unwrap();
        for e in &results.entries {
            assert!(e.case_count >= 5);
            assert_eq!(e.description.evaluate(&inst.ds).count(), e.case_count);
        }
    }
}

#[test]
fn results_are_sorted_and_unique() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let inst = random_instance(&mut rng, 40, 4, 4, 3);
    for direction in [Direction::Maximize, Direction::Minimize] {
        let cfg = SearchConfig {
            measure: Measure::Row,
            direction,
            top_q: 25,
            ..SearchConfig::default()
        };
        let results = beam_search(&inst.ds, &inst.matrix, &cfg).unwrap();
        for w in results.entries.windows(2) {
            let better = match direction {
                Direction::Maximize => w[0].quality >= w[1].quality,
                Direction::Minimize => w[0].quality <= w[1].quality,
            };
            assert!(better);
            assert_ne!(w[0].description, w[1].description);
        }
    }
}

#[test]
fn unanimous_matrix_gives_zero_qualities() {
    let ds = indicator_dataset();
    let m = matrix_from_rows(&vec![vec![1, 1, 1]; 8], 2);
    let cfg = SearchConfig {
        min_support: 0.2,
        ..SearchConfig::default()
    };
    let results = beam_search(&ds, &m, &cfg).unwrap();
    assert_eq!(results.entries.len(), 10);
    assert!(results.entries.iter().all(|e| e.quality == 0.0));
}

#[test]
fn beam_never_beats_the_oracle() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let inst = random_instance(&mut rng, 30, 4, 4, 2);
        let cfg = SearchConfig {
            measure: Measure::Ccl,
            beam_width: 2,
            depth: 3,
            min_support: 0.1,
            ..SearchConfig::default()
        };
        let beam = beam_search(&inst.ds, &inst.matrix, &cfg).unwrap();
        let oracle = exhaustive_search(&inst.ds, &inst.matrix, &cfg, DEFAULT_ORACLE_BUDGET).unwrap();
        assert!(beam.entries[0].quality <= oracle.entries[0].quality);
    }
}

#[test]
fn precondition_failures_stop_before_searching() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
    let inst = random_instance(&mut rng, 20, 2, 3, 3);
    let cfg = SearchConfig {
        measure: Measure::Rasl,
        ..SearchConfig::default()
    };
    let err = beam_search(&inst.ds, &inst.matrix, &cfg).unwrap_err();
    assert!(matches!(err, Error::BinaryOnly { classes: 3 }));
    assert_eq!(err.exit_code(), 2);

    let ds = indicator_dataset();
    let cfg = SearchConfig {
        measure: Measure::Cco,
        ..SearchConfig::default()
    };
    let err = beam_search(&ds, &toy_matrix(&TOY_A), &cfg).unwrap_err();
    assert!(matches!(err, Error::MissingGroundTruth));
}

#[test]
fn oracle_budget_error() {
    let ds = indicator_dataset();
    let cfg = SearchConfig {
        depth: 8,
        ..SearchConfig::default()
    };
    let err = exhaustive_search(&ds, &toy_matrix(&TOY_A), &cfg, 1000).unwrap_err();
    assert!(matches!(err, Error::OracleTooLarge { budget: 1000, .. }));
}

#[test]
fn numeric_refinements_use_full_column_splits() {
    let fare: Vec<f64> = (0..20).map(|i| i as f64).collect();
    let ds = Dataset::new::<&str>(20, vec![AttributeColumn::numeric("Fare", fare)], None).unwrap();
    let level1 = refine(&Description::empty(), &ds, 4, Binning::EqualWidth).unwrap();
    let texts: Vec<String> = level1
        .iter()
        .map(|d| d.render(&ds, controversy::Notation::Ascii))
        .collect();
    assert_eq!(
        texts,
        ["Fare <= 4.75", "Fare <= 9.5", "Fare <= 14.25", "Fare > 4.75", "Fare > 9.5", "Fare > 14.25"]
    );
    // refinements of a refinement never repeat a condition
    let level2 = refine(&level1[0], &ds, 4, Binning::EqualWidth).unwrap();
    assert_eq!(level2.len(), 5);
    assert!(level2.iter().all(|d| d.len() == 2));
}
