mod common;

use bandsel::data::{generate_synthetic, GroundTruth, HyperCube, SyntheticSpec};
use bandsel::eval::{
    classify_knn, classify_map, export_features, prepare_split, split, ClassifierConfig, Split,
    SplitSpec,
};
use proptest::prelude::*;

/// Small cube with coarse integer values so distance ties are common.
fn instances() -> impl Strategy<Value = (HyperCube, GroundTruth, Vec<usize>, Split, usize)> {
    (2usize..15, 2usize..14, 1usize..5, 1u32..5).prop_flat_map(|(w, h, b, c)| {
        let n = w * h;
        (
            prop::collection::vec(0u8..6, n * b),
            prop::collection::vec(0..=c, n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(0..b, 1..=b),
            1usize..8,
        )
            .prop_filter_map(
                "valid ground truth",
                move |(vals, labels, mask, bands, k)| {
                    let cube =
                        HyperCube::new(w, h, b, vals.into_iter().map(f64::from).collect()).ok()?;
                    let gt = GroundTruth::new(w, h, labels).ok()?;
                    let m: Vec<bool> = gt.labeled_pixels().iter().map(|&p| mask[p]).collect();
                    if !m.iter().any(|&t| t) {
                        return None;
                    }
                    Some((cube, gt, bands, Split::from_train_mask(m), k))
                },
            )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn knn_matches_all_pairs_oracle((cube, gt, bands, s, k) in instances()) {
        let pixels = gt.labeled_pixels();
        let labels = gt.labeled_labels();
        let rows = |idx: &[usize]| -> Vec<Vec<f64>> {
            idx.iter().map(|&i| bands.iter().map(|&b| cube.band(b)[pixels[i]]).collect()).collect()
        };
        let (tr, te) = (s.train_indices(), s.test_indices());
        let (train_raw, test_raw) = (rows(&tr), rows(&te));
        let expected = if te.is_empty() {
            Vec::new()
        } else {
            let train = common::normalize(&train_raw, &train_raw);
            let test = common::normalize(&train_raw, &test_raw);
            let train_labels: Vec<u32> = tr.iter().map(|&i| labels[i]).collect();
            common::knn_oracle(&train, &train_labels, &test, k)
        };
        prop_assert_eq!(classify_knn(&cube, &gt, &bands, &s, k).unwrap(), expected);
    }

    #[test]
    fn stratified_split_invariants(w in 2usize..20, h in 2usize..20, c in 1u32..6, seed in any::<u64>(), fraction in 0.05f64..0.95, ls in any::<u64>()) {
        let spec = SyntheticSpec { width: w, height: h, n_classes: c.min((w * h) as u32 / 2).max(1), seed: ls, ..Default::default() };
        let (_, gt) = generate_synthetic(&spec).unwrap();
        let ss = SplitSpec { train_fraction: fraction, seed, stratified: true };
        let s = split(&gt, &ss).unwrap();
        prop_assert_eq!(&s, &split(&gt, &ss).unwrap());
        let labels = gt.labeled_labels();
        prop_assert_eq!(s.train.len(), labels.len());
        for i in 0..labels.len() {
            prop_assert!(s.train[i] != s.test[i]);
        }
        let mut total_train = 0;
        for class in 1..=gt.n_classes() {
            let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            let n_train = members.iter().filter(|&&i| s.train[i]).count();
            let ideal = fraction * members.len() as f64;
            prop_assert!(n_train >= 1 && n_train < members.len());
            prop_assert!((n_train as f64 - ideal).abs() <= 1.0 + 1e-9, "class {} got {} for {}", class, n_train, ideal);
            total_train += n_train;
        }
        // Cumulative rounding hits round(f * N) exactly; only classes small
        // enough to need the one-pixel floor or ceiling can move it.
        let ideal_total = fraction * labels.len() as f64;
        let counts = gt.class_counts();
        let forced = counts[1..]
            .iter()
            .filter(|&&n| (fraction * n as f64) < 1.0 || (fraction * n as f64) > n as f64 - 1.0)
            .count();
        if forced == 0 {
            prop_assert_eq!(total_train, (ideal_total + 0.5).floor() as usize);
        }
    }
}

#[test]
fn map_keeps_training_labels_and_zeros() {
    let spec = SyntheticSpec {
        n_noise: 0,
        noise_sigma: 0.0,
        ..Default::default()
    };
    let (cube, mut_gt) = generate_synthetic(&spec).unwrap();
    // Blank out a corner to get unlabeled pixels.
    let mut labels = mut_gt.labels().to_vec();
    labels[0] = 0;
    labels[1] = 0;
    let gt = GroundTruth::new(cube.width(), cube.height(), labels).unwrap();
    let s = split(&gt, &SplitSpec::default()).unwrap();
    let map = classify_map(&cube, &gt, &[0, 1], &s, &ClassifierConfig::default()).unwrap();
    assert_eq!(&map[..2], &[0, 0]);
    let pixels = gt.labeled_pixels();
    for i in s.train_indices() {
        assert_eq!(map[pixels[i]], gt.labels()[pixels[i]]);
    }
    // Noiseless informative bands classify perfectly.
    for i in s.test_indices() {
        assert_eq!(map[pixels[i]], gt.labels()[pixels[i]]);
    }
}

#[test]
fn exported_features_match_prepared_split() {
    let (cube, gt) = generate_synthetic(&SyntheticSpec::default()).unwrap();
    let s = split(&gt, &SplitSpec::default()).unwrap();
    let (train, test) = export_features(&cube, &gt, &[2, 0], &s).unwrap();
    assert!(train.starts_with("pixel_id,label,b3,b1\n"));
    let prepared = prepare_split(&cube, &gt, &[2, 0], &s).unwrap();
    assert_eq!(train.lines().count(), prepared.train.n_rows() + 1);
    assert_eq!(test.lines().count(), prepared.test.n_rows() + 1);
    let first: Vec<&str> = train.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0].parse::<usize>().unwrap(), prepared.train_pixels[0]);
    assert_eq!(first[2].parse::<f64>().unwrap(), prepared.train.row(0)[0]);
}
