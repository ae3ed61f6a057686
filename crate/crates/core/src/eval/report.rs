use std::fmt::Write as _;

use super::knn::{prepare_split, Classifier, KnnClassifier};
use super::split::{split, Split, SplitSpec};
use crate::data::{GroundTruth, HyperCube};
use crate::error::{Error, Result};
use crate::kv;
use crate::selection::{join_ids, select, Algorithm, SelectionConfig, SelectionResult};

/// Overall accuracy in percent: `100 * correct / total`.
pub fn accuracy(predictions: &[u32], truth: &[u32]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::Contract(format!(
            "{} predictions for {} truth labels",
            predictions.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Contract("empty test set".into()));
    }
    let correct = predictions
        .iter()
        .zip(truth)
        .filter(|(p, t)| p == t)
        .count();
    Ok(100.0 * correct as f64 / truth.len() as f64)
}

/// Mean of per-class recalls in percent, over classes present in `truth`.
pub fn macro_accuracy(predictions: &[u32], truth: &[u32]) -> Result<f64> {
    accuracy(predictions, truth)?;
    let mut classes: Vec<u32> = truth.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut sum = 0.0;
    for &c in &classes {
        let (hit, n) = predictions
            .iter()
            .zip(truth)
            .filter(|(_, &t)| t == c)
            .fold((0usize, 0usize), |(h, n), (p, t)| {
                (h + (p == t) as usize, n + 1)
            });
        sum += hit as f64 / n as f64;
    }
    Ok(100.0 * sum / classes.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Overall,
    MacroAverage,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Overall => "overall",
            Metric::MacroAverage => "macro_average",
        }
    }

    pub fn score(self, predictions: &[u32], truth: &[u32]) -> Result<f64> {
        match self {
            Metric::Overall => accuracy(predictions, truth),
            Metric::MacroAverage => macro_accuracy(predictions, truth),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierConfig {
    pub knn_k: usize,
    pub metric: Metric,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            knn_k: 3,
            metric: Metric::Overall,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub algorithm: Algorithm,
    /// Subset size asked for.
    pub requested: usize,
    /// Subset size actually evaluated; smaller than `requested` when the
    /// selector ran out of acceptable bands.
    pub n_bands: usize,
    pub accuracy_percent: f64,
    /// 0-based band indices.
    pub selected_bands: Vec<usize>,
}

impl EvalRow {
    pub fn shortfall(&self) -> bool {
        self.n_bands < self.requested
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    /// `(requested, evaluated)` for each size the selection could not fill.
    pub shortfalls: Vec<(usize, usize)>,
    pub split: SplitSpec,
    pub classifier: ClassifierConfig,
    pub band_id_offset: usize,
}

impl EvalReport {
    /// `algorithm,n_bands,accuracy_percent,selected_bands`; bands `|`-joined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("algorithm,n_bands,accuracy_percent,selected_bands\n");
        for r in &self.rows {
            let ids: Vec<usize> = r
                .selected_bands
                .iter()
                .map(|b| b + self.band_id_offset)
                .collect();
            let _ = writeln!(
                out,
                "{},{},{:.4},{}",
                r.algorithm,
                r.n_bands,
                r.accuracy_percent,
                join_ids(&ids)
            );
        }
        out
    }

    /// Split, classifier and shortfall notes as `key = value` text.
    pub fn sidecar(&self) -> String {
        let shortfalls: Vec<String> = self
            .shortfalls
            .iter()
            .map(|(req, got)| format!("{req}:{got}"))
            .collect();
        kv::render(&[
            ("train_fraction", self.split.train_fraction.to_string()),
            ("split_seed", self.split.seed.to_string()),
            ("stratified", self.split.stratified.to_string()),
            ("classifier", "knn".to_string()),
            ("knn_k", self.classifier.knn_k.to_string()),
            ("metric", self.classifier.metric.as_str().to_string()),
            ("shortfall", shortfalls.join("|")),
        ])
    }
}

fn check_sizes(sizes: &[usize], n_bands: usize) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Config("sizes list is empty".into()));
    }
    if sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "sizes must be positive and strictly ascending, got {sizes:?}"
        )));
    }
    let max = *sizes.last().unwrap();
    if max > n_bands {
        return Err(Error::Config(format!(
            "largest size {max} exceeds the cube's {n_bands} bands"
        )));
    }
    Ok(())
}

/// Evaluates each prefix of an existing selection. Sizes the selection cannot
/// fill are evaluated at the selection's full length; a row per distinct
/// evaluated length is kept, and every unmet size is listed in `shortfalls`.
pub fn evaluate_prefixes(
    cube: &HyperCube,
    gt: &GroundTruth,
    selection: &SelectionResult,
    sizes: &[usize],
    split_masks: &Split,
    split_spec: &SplitSpec,
    classifier: &ClassifierConfig,
) -> Result<EvalReport> {
    check_sizes(sizes, cube.n_bands())?;
    let knn = KnnClassifier {
        k: classifier.knn_k,
    };
    let mut rows: Vec<EvalRow> = Vec::new();
    let mut shortfalls = Vec::new();
    for &size in sizes {
        let n = size.min(selection.selected.len());
        if n < size {
            shortfalls.push((size, n));
        }
        if rows.last().is_some_and(|r| r.n_bands == n) {
            continue;
        }
        let bands = &selection.selected[..n];
        let prepared = prepare_split(cube, gt, bands, split_masks)?;
        let predictions =
            knn.fit_predict(&prepared.train, &prepared.train_labels, &prepared.test)?;
        rows.push(EvalRow {
            algorithm: selection.config.algorithm,
            requested: size,
            n_bands: n,
            accuracy_percent: classifier
                .metric
                .score(&predictions, &prepared.test_labels)?,
            selected_bands: bands.to_vec(),
        });
    }
    Ok(EvalReport {
        rows,
        shortfalls,
        split: *split_spec,
        classifier: *classifier,
        band_id_offset: cube.band_id_offset(),
    })
}

/// Runs the selector once at `k_max = max(sizes)` and scores every prefix.
pub fn sweep(
    cube: &HyperCube,
    gt: &GroundTruth,
    config: &SelectionConfig,
    sizes: &[usize],
    split_spec: &SplitSpec,
    classifier: &ClassifierConfig,
) -> Result<(EvalReport, SelectionResult)> {
    check_sizes(sizes, cube.n_bands())?;
    let config = SelectionConfig {
        k_max: *sizes.last().unwrap(),
        ..*config
    };
    let selection = select(cube, gt, &config)?;
    let masks = split(gt, split_spec)?;
    let report = evaluate_prefixes(cube, gt, &selection, sizes, &masks, split_spec, classifier)?;
    Ok((report, selection))
}

/// Full-scene label raster: training pixels keep their ground-truth label,
/// test pixels get predictions, unlabeled pixels are 0.
pub fn classify_map(
    cube: &HyperCube,
    gt: &GroundTruth,
    bands: &[usize],
    split_masks: &Split,
    classifier: &ClassifierConfig,
) -> Result<Vec<u32>> {
    let mut out: Vec<u32> = gt.labels().to_vec();
    if split_masks.test.iter().any(|&t| t) {
        let prepared = prepare_split(cube, gt, bands, split_masks)?;
        let knn = KnnClassifier {
            k: classifier.knn_k,
        };
        let predictions =
            knn.fit_predict(&prepared.train, &prepared.train_labels, &prepared.test)?;
        for (&p, pred) in prepared.test_pixels.iter().zip(predictions) {
            out[p] = pred;
        }
    } else if bands.is_empty() {
        return Err(Error::Contract("band list is empty".into()));
    }
    Ok(out)
}

/// `train.csv` and `test.csv` contents for an outside classifier. Columns are
/// `pixel_id,label,b<id>...`: `pixel_id` is the row-major raster index,
/// features are min-max normalized on the training pixels, band columns
/// follow the order of `bands`.
pub fn export_features(
    cube: &HyperCube,
    gt: &GroundTruth,
    bands: &[usize],
    split_masks: &Split,
) -> Result<(String, String)> {
    let prepared = prepare_split(cube, gt, bands, split_masks)?;
    let mut header = String::from("pixel_id,label");
    for b in bands {
        let _ = write!(header, ",b{}", b + cube.band_id_offset());
    }
    header.push('\n');
    let render = |pixels: &[usize], labels: &[u32], m: &super::knn::FeatureMatrix| {
        let mut out = header.clone();
        for (i, (&p, &l)) in pixels.iter().zip(labels).enumerate() {
            let _ = write!(out, "{p},{l}");
            for v in m.row(i) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    };
    Ok((
        render(
            &prepared.train_pixels,
            &prepared.train_labels,
            &prepared.train,
        ),
        render(&prepared.test_pixels, &prepared.test_labels, &prepared.test),
    ))
}
