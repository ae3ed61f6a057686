use std::cmp::Ordering;

use rayon::prelude::*;

use super::split::Split;
use crate::data::{GroundTruth, HyperCube};
use crate::error::{Error, Result};

/// Row-major feature matrix, one row per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_features: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n_features: usize, data: Vec<f64>) -> Result<Self> {
        if n_features == 0 || !data.len().is_multiple_of(n_features) {
            return Err(Error::Contract(format!(
                "{} values do not form rows of {n_features} features",
                data.len()
            )));
        }
        Ok(FeatureMatrix { n_features, data })
    }

    /// Raw band values of `pixels` (raster indices) over `bands` (0-based).
    pub fn from_cube(cube: &HyperCube, bands: &[usize], pixels: &[usize]) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Contract("band list is empty".into()));
        }
        if let Some(&b) = bands.iter().find(|&&b| b >= cube.n_bands()) {
            return Err(Error::Contract(format!("band {b} out of range")));
        }
        let mut data = Vec::with_capacity(bands.len() * pixels.len());
        for &p in pixels {
            data.extend(bands.iter().map(|&b| cube.band(b)[p]));
        }
        Ok(FeatureMatrix {
            n_features: bands.len(),
            data,
        })
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_features..(i + 1) * self.n_features]
    }
}

/// Per-feature min-max scaling fitted on training rows. Applied values are
/// clamped to `[0, 1]`; a constant training feature maps to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(train: &FeatureMatrix) -> Self {
        let f = train.n_features();
        let mut mins = vec![f64::INFINITY; f];
        let mut maxs = vec![f64::NEG_INFINITY; f];
        for i in 0..train.n_rows() {
            for (j, &v) in train.row(i).iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        MinMaxScaler { mins, maxs }
    }

    pub fn transform(&self, m: &FeatureMatrix) -> FeatureMatrix {
        let data = m
            .data
            .chunks(m.n_features)
            .flat_map(|row| {
                row.iter().enumerate().map(|(j, &v)| {
                    let span = self.maxs[j] - self.mins[j];
                    if span > 0.0 {
                        ((v - self.mins[j]) / span).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        FeatureMatrix {
            n_features: m.n_features,
            data,
        }
    }
}

/// Classifier backend used by the evaluation pipeline.
pub trait Classifier: Sync {
    fn name(&self) -> &str;

    /// Predicts a label for each test row. Training rows are in canonical
    /// pixel order.
    fn fit_predict(
        &self,
        train: &FeatureMatrix,
        train_labels: &[u32],
        test: &FeatureMatrix,
    ) -> Result<Vec<u32>>;
}

/// Majority vote among the `k` nearest training rows (squared Euclidean).
/// Distance ties go to the lower training row; vote ties to the smaller label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnClassifier {
    pub k: usize,
}

impl Default for KnnClassifier {
    fn default() -> Self {
        KnnClassifier { k: 3 }
    }
}

impl KnnClassifier {
    fn predict_one(&self, train: &FeatureMatrix, labels: &[u32], x: &[f64]) -> u32 {
        let mut dist: Vec<(f64, usize)> = (0..train.n_rows())
            .map(|i| {
                let d = train
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                (d, i)
            })
            .collect();
        let k = self.k.min(dist.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        };
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        let mut votes: Vec<(u32, usize)> = Vec::with_capacity(k);
        for &(_, i) in &dist[..k] {
            let l = labels[i];
            match votes.iter_mut().find(|(v, _)| *v == l) {
                Some((_, n)) => *n += 1,
                None => votes.push((l, 1)),
            }
        }
        votes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(l, _)| l)
            .expect("k >= 1 and training set nonempty")
    }
}

impl Classifier for KnnClassifier {
    fn name(&self) -> &str {
        "knn"
    }

    fn fit_predict(
        &self,
        train: &FeatureMatrix,
        train_labels: &[u32],
        test: &FeatureMatrix,
    ) -> Result<Vec<u32>> {
        if self.k == 0 {
            return Err(Error::Contract("k must be at least 1".into()));
        }
        if train.n_rows() == 0 {
            return Err(Error::Contract("training set is empty".into()));
        }
        if train_labels.len() != train.n_rows() {
            return Err(Error::Contract("training labels do not match rows".into()));
        }
        if train.n_features() != test.n_features() {
            return Err(Error::Contract(
                "train and test feature counts differ".into(),
            ));
        }
        Ok((0..test.n_rows())
            .into_par_iter()
            .map(|i| self.predict_one(train, train_labels, test.row(i)))
            .collect())
    }
}

/// Normalized train/test features for a split, with training labels.
pub struct PreparedSplit {
    pub train: FeatureMatrix,
    pub train_labels: Vec<u32>,
    pub test: FeatureMatrix,
    pub test_labels: Vec<u32>,
    /// Raster indices of the train and test pixels.
    pub train_pixels: Vec<usize>,
    pub test_pixels: Vec<usize>,
}

pub fn prepare_split(
    cube: &HyperCube,
    gt: &GroundTruth,
    bands: &[usize],
    split: &Split,
) -> Result<PreparedSplit> {
    let pixels = gt.labeled_pixels();
    let labels = gt.labeled_labels();
    if split.train.len() != pixels.len() || split.test.len() != pixels.len() {
        return Err(Error::Contract(format!(
            "masks cover {} pixels, ground truth labels {}",
            split.train.len(),
            pixels.len()
        )));
    }
    let train_idx = split.train_indices();
    let test_idx = split.test_indices();
    let train_pixels: Vec<usize> = train_idx.iter().map(|&i| pixels[i]).collect();
    let test_pixels: Vec<usize> = test_idx.iter().map(|&i| pixels[i]).collect();
    let train_raw = FeatureMatrix::from_cube(cube, bands, &train_pixels)?;
    let test_raw = FeatureMatrix::from_cube(cube, bands, &test_pixels)?;
    let scaler = MinMaxScaler::fit(&train_raw);
    Ok(PreparedSplit {
        train: scaler.transform(&train_raw),
        test: scaler.transform(&test_raw),
        train_labels: train_idx.iter().map(|&i| labels[i]).collect(),
        test_labels: test_idx.iter().map(|&i| labels[i]).collect(),
        train_pixels,
        test_pixels,
    })
}

/// k-NN predictions for the test pixels of `split`, in canonical order.
pub fn classify_knn(
    cube: &HyperCube,
    gt: &GroundTruth,
    bands: &[usize],
    split: &Split,
    k: usize,
) -> Result<Vec<u32>> {
    let prepared = prepare_split(cube, gt, bands, split)?;
    KnnClassifier { k }.fit_predict(&prepared.train, &prepared.train_labels, &prepared.test)
}
