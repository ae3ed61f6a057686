use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::GroundTruth;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.5,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Train/test partition of the labeled pixels, indexed in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<bool>,
    pub test: Vec<bool>,
}

impl Split {
    pub fn from_train_mask(train: Vec<bool>) -> Self {
        let test = train.iter().map(|t| !t).collect();
        Split { train, test }
    }

    pub fn train_indices(&self) -> Vec<usize> {
        mask_indices(&self.train)
    }

    pub fn test_indices(&self) -> Vec<usize> {
        mask_indices(&self.test)
    }
}

fn mask_indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| i)
        .collect()
}

/// Splits the labeled pixels. In stratified mode each class (ascending) is
/// shuffled with one seeded ChaCha8 stream and its first `n_c` members go to
/// training, where `n_c` comes from rounding the cumulative class counts so
/// per-class sizes alternate between floor and ceil of `fraction * count`.
pub fn split(gt: &GroundTruth, spec: &SplitSpec) -> Result<Split> {
    spec.validate()?;
    let labels = gt.labeled_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = vec![false; labels.len()];

    let groups: Vec<(u32, Vec<usize>)> = if spec.stratified {
        (1..=gt.n_classes())
            .map(|c| {
                let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
                (c, members)
            })
            .collect()
    } else {
        vec![(0, (0..labels.len()).collect())]
    };

    let round = |x: f64| (x + 0.5).floor() as usize;
    let mut cumulative = 0usize;
    for (class, mut members) in groups {
        let n = members.len();
        if n < 2 {
            return Err(Error::DegenerateClass { class, count: n });
        }
        let before = round(spec.train_fraction * cumulative as f64);
        cumulative += n;
        let after = round(spec.train_fraction * cumulative as f64);
        let n_train = after.saturating_sub(before).clamp(1, n - 1);
        members.shuffle(&mut rng);
        for &i in &members[..n_train] {
            train[i] = true;
        }
    }
    Ok(Split::from_train_mask(train))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_pixels_one_class() {
        let gt = GroundTruth::new(2, 2, vec![1; 4]).unwrap();
        let s = split(&gt, &SplitSpec::default()).unwrap();
        assert_eq!(s.train_indices().len(), 2);
        assert_eq!(s.test_indices().len(), 2);
    }

    #[test]
    fn same_seed_same_masks() {
        let labels: Vec<u32> = (0..60).map(|i| i % 3 + 1).collect();
        let gt = GroundTruth::new(10, 6, labels).unwrap();
        let spec = SplitSpec {
            seed: 9,
            ..Default::default()
        };
        assert_eq!(split(&gt, &spec).unwrap(), split(&gt, &spec).unwrap());
        let other = SplitSpec { seed: 10, ..spec };
        assert_ne!(split(&gt, &spec).unwrap(), split(&gt, &other).unwrap());
    }

    #[test]
    fn singleton_class_rejected_when_stratified() {
        let gt = GroundTruth::new(3, 1, vec![1, 1, 2]).unwrap();
        match split(&gt, &SplitSpec::default()).unwrap_err() {
            Error::DegenerateClass { class, count } => assert_eq!((class, count), (2, 1)),
            e => panic!("unexpected {e}"),
        }
        let plain = SplitSpec {
            stratified: false,
            ..Default::default()
        };
        assert!(split(&gt, &plain).is_ok());
    }

    #[test]
    fn odd_classes_alternate_floor_and_ceil() {
        // Three classes of 5 pixels: 2.5 each, totals must stay at 7 or 8.
        let labels: Vec<u32> = (0..15).map(|i| i / 5 + 1).collect();
        let gt = GroundTruth::new(15, 1, labels.clone()).unwrap();
        let s = split(&gt, &SplitSpec::default()).unwrap();
        let per_class: Vec<usize> = (1..=3)
            .map(|c| {
                s.train_indices()
                    .iter()
                    .filter(|&&i| labels[i] == c)
                    .count()
            })
            .collect();
        assert!(per_class.iter().all(|&n| n == 2 || n == 3));
        let total: usize = per_class.iter().sum();
        assert!(total == 7 || total == 8);
    }

    #[test]
    fn bad_fraction() {
        let gt = GroundTruth::new(2, 2, vec![1; 4]).unwrap();
        for f in [0.0, 1.0, f64::NAN] {
            let spec = SplitSpec {
                train_fraction: f,
                ..Default::default()
            };
            assert!(matches!(split(&gt, &spec), Err(Error::Config(_))));
        }
    }
}
