//! Split, classify and score band subsets.
//!
//! The classifier is a deterministic k-NN baseline; [`export_features`]
//! writes normalized train/test tables for any external classifier.

mod knn;
mod report;
mod split;

pub use knn::{
    classify_knn, prepare_split, Classifier, FeatureMatrix, KnnClassifier, MinMaxScaler,
    PreparedSplit,
};
pub use report::{
    accuracy, classify_map, evaluate_prefixes, export_features, macro_accuracy, sweep,
    ClassifierConfig, EvalReport, EvalRow, Metric,
};
pub use split::{split, Split, SplitSpec};
