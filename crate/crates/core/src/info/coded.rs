use crate::data::{GroundTruth, HyperCube};
use crate::error::{Error, Result};

/// Integer-coded samples over the labeled pixels of a dataset, in canonical
/// (row-major) pixel order. Never empty; every code is below `alphabet_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedVariable {
    codes: Vec<u32>,
    alphabet_size: usize,
}

impl CodedVariable {
    pub fn new(codes: Vec<u32>, alphabet_size: usize) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::Contract("coded variable has no samples".into()));
        }
        if let Some(&c) = codes.iter().find(|&&c| c as usize >= alphabet_size) {
            return Err(Error::Contract(format!(
                "code {c} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(CodedVariable {
            codes,
            alphabet_size,
        })
    }

    /// Uses the smallest alphabet that holds every code.
    pub fn from_codes(codes: Vec<u32>) -> Result<Self> {
        let alphabet = codes.iter().max().map_or(0, |&m| m as usize + 1);
        Self::new(codes, alphabet)
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Pairs two variables into one over the product alphabet, code `b * |c| + c`.
    pub fn join(&self, other: &CodedVariable) -> Result<CodedVariable> {
        check_lengths(&[self, other])?;
        let alphabet = self
            .alphabet_size
            .checked_mul(other.alphabet_size)
            .filter(|&a| a <= u32::MAX as usize + 1)
            .ok_or_else(|| Error::Contract("joined alphabet does not fit 32-bit codes".into()))?;
        let width = other.alphabet_size as u32;
        let codes = self
            .codes
            .iter()
            .zip(&other.codes)
            .map(|(&b, &c)| b * width + c)
            .collect();
        Ok(CodedVariable {
            codes,
            alphabet_size: alphabet,
        })
    }
}

pub(crate) fn check_lengths(vars: &[&CodedVariable]) -> Result<()> {
    let n = vars[0].len();
    if let Some(v) = vars.iter().find(|v| v.len() != n) {
        return Err(Error::Contract(format!(
            "coded variables differ in length ({n} vs {})",
            v.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinStrategy {
    /// Observed `[min, max]` of the band onto `0..n_bins` uniform bins.
    MinMaxUniform,
    /// Observed `[min, max]` onto one bin per ground-truth class.
    GtRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscretizationConfig {
    pub n_bins: usize,
    pub strategy: BinStrategy,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig {
            n_bins: 256,
            strategy: BinStrategy::MinMaxUniform,
        }
    }
}

impl DiscretizationConfig {
    pub fn gt_range() -> Self {
        DiscretizationConfig {
            n_bins: 256,
            strategy: BinStrategy::GtRange,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategy == BinStrategy::MinMaxUniform && self.n_bins < 2 {
            return Err(Error::Config(format!(
                "n_bins must be at least 2, got {}",
                self.n_bins
            )));
        }
        Ok(())
    }
}

/// Uniform binning of `values` onto `0..n_bins`: half-open bins of width
/// `(max - min) / n_bins`, with the maximum clamped into the top bin. A
/// constant input maps to bin 0.
pub fn uniform_bins(values: &[f64], n_bins: usize) -> Vec<u32> {
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        return vec![0; values.len()];
    }
    let top = (n_bins - 1) as u32;
    values
        .iter()
        .map(|&v| {
            let b = ((v - min) / span * n_bins as f64).floor();
            (b.max(0.0) as u32).min(top)
        })
        .collect()
}

/// Codes one band over the labeled pixels of `gt`. The band's range is taken
/// over those same pixels.
pub fn discretize_band(
    cube: &HyperCube,
    band: usize,
    gt: &GroundTruth,
    config: &DiscretizationConfig,
) -> Result<CodedVariable> {
    if band >= cube.n_bands() {
        return Err(Error::Contract(format!(
            "band {band} out of range for a {}-band cube",
            cube.n_bands()
        )));
    }
    if cube.width() != gt.width() || cube.height() != gt.height() {
        return Err(Error::Dimension {
            expected_width: cube.width(),
            expected_height: cube.height(),
            width: gt.width(),
            height: gt.height(),
        });
    }
    let plane = cube.band(band);
    let values: Vec<f64> = gt.labeled_pixels().into_iter().map(|p| plane[p]).collect();
    if values.is_empty() {
        return Err(Error::NoLabeledPixels);
    }
    let n_bins = match config.strategy {
        BinStrategy::MinMaxUniform => {
            config.validate()?;
            config.n_bins
        }
        BinStrategy::GtRange => gt.n_classes() as usize,
    };
    CodedVariable::new(uniform_bins(&values, n_bins), n_bins)
}

/// Class labels `1..=C` of the labeled pixels, remapped to `0..C`.
pub fn gt_codes(gt: &GroundTruth) -> CodedVariable {
    let codes = gt.labeled_labels().into_iter().map(|l| l - 1).collect();
    CodedVariable {
        codes,
        alphabet_size: gt.n_classes() as usize,
    }
}
