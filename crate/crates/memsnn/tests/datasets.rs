//! Integration checks against the vendored corpus files in `data/`.

use std::fs;
use std::path::PathBuf;

use memsnn::data::{load_optdigits, Split, CLASSES, DEFAULT_DIGIT_SUBSET, PIXELS};

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

#[test]
fn train_split_has_canonical_shape() {
    let ds = load_optdigits(&data_file("optdigits.tra"), Split::Train).unwrap();
    assert_eq!(ds.len(), 3823);
    assert_eq!(ds.split, Split::Train);
    let counts = ds.class_counts();
    assert!(counts.iter().all(|&c| c > 300), "counts {counts:?}");
    assert_eq!(counts.iter().sum::<usize>(), 3823);
}

#[test]
fn test_split_has_canonical_shape() {
    let ds = load_optdigits(&data_file("optdigits.tes"), Split::Test).unwrap();
    assert_eq!(ds.len(), 1797);
    let counts = ds.class_counts();
    assert!(counts.iter().all(|&c| c > 100), "counts {counts:?}");
}

#[test]
fn four_digit_subset_counts() {
    let tra = load_optdigits(&data_file("optdigits.tra"), Split::Train).unwrap();
    let tes = load_optdigits(&data_file("optdigits.tes"), Split::Test).unwrap();
    let sub_tra = tra.subset_digits(&DEFAULT_DIGIT_SUBSET).unwrap();
    let sub_tes = tes.subset_digits(&DEFAULT_DIGIT_SUBSET).unwrap();
    assert_eq!(sub_tra.len(), 1534);
    assert_eq!(sub_tes.len(), 720);
    assert!(sub_tra.samples.iter().all(|s| s.label < 4));
}

#[test]
fn corpus_files_round_trip_byte_exactly() {
    for (name, split) in [
        ("optdigits.tra", Split::Train),
        ("optdigits.tes", Split::Test),
        ("synthetic_20.csv", Split::Train),
    ] {
        let path = data_file(name);
        let original = fs::read_to_string(&path).unwrap();
        let ds = load_optdigits(&path, split).unwrap();
        assert_eq!(ds.to_csv(), original, "{name} is not in canonical form");
    }
}

#[test]
fn synthetic_fixture_matches_generator_contract() {
    let ds = load_optdigits(&data_file("synthetic_20.csv"), Split::Train).unwrap();
    assert_eq!(ds.len(), 20);
    assert_eq!(ds.class_counts(), [2; CLASSES]);
    // Digit d lights exactly the pixels whose index falls in the d-th tenth
    // of the grid; the second variant is two intensity steps dimmer.
    for (idx, s) in ds.samples.iter().enumerate() {
        let expected_label = (idx % CLASSES) as u8;
        let intensity = if idx < CLASSES { 16 } else { 14 };
        assert_eq!(s.label, expected_label);
        for (p, &px) in s.pixels.iter().enumerate() {
            let lit = p * CLASSES / PIXELS == usize::from(s.label);
            assert_eq!(
                px,
                if lit { intensity } else { 0 },
                "sample {idx} pixel {p}"
            );
        }
    }
}
