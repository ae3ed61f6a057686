//! Greedy forward band selection driven by a running ground-truth estimate.
//!
//! Both filters rank bands by MI with the ground truth, seed an estimate of
//! the ground truth from the top band and grow it by averaging in selected
//! bands. Bands enter the estimate recoded into the class alphabet
//! (`BinStrategy::GtRange`) so the estimate always lives in label space.
//!
//! * [`select_mi_filter`] walks the ranking once and keeps a band when the
//!   estimate's MI with the ground truth rises by more than a threshold.
//! * [`select_tmi_filter`] adds, at each step, the band with the largest
//!   interaction information `I3(estimate, band, gt)`; no threshold.
//!
//! Ties break to the lowest band index everywhere.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::{GroundTruth, HyperCube};
use crate::error::{Error, Result};
use crate::info::{
    discretize_band, gt_codes, interaction_info, mutual_info, BinStrategy, CodedVariable,
    DiscretizationConfig,
};
use crate::kv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    MiFilter,
    TmiFilter,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::MiFilter => "mi_filter",
            Algorithm::TmiFilter => "tmi_filter",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mi" | "mi_filter" => Ok(Algorithm::MiFilter),
            "tmi" | "tmi_filter" => Ok(Algorithm::TmiFilter),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected mi or tmi)"
            ))),
        }
    }
}

/// Coding of the candidate band inside `I3` for the tmi filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateCoding {
    /// Class-alphabet coding, the same one used to update the estimate.
    GtRange,
    /// The ranking discretization (e.g. 256 bins).
    Ranking,
}

impl CandidateCoding {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateCoding::GtRange => "gt_range",
            CandidateCoding::Ranking => "ranking",
        }
    }
}

impl std::str::FromStr for CandidateCoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gt_range" => Ok(CandidateCoding::GtRange),
            "ranking" => Ok(CandidateCoding::Ranking),
            other => Err(Error::Config(format!("unknown candidate coding `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub k_max: usize,
    /// Minimum MI gain (bits) for the mi filter to accept a band. Ignored by tmi.
    pub threshold_th: f64,
    /// Discretization used for the initial MI ranking.
    pub discretization: DiscretizationConfig,
    pub algorithm: Algorithm,
    pub candidate_coding: CandidateCoding,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            k_max: 20,
            threshold_th: 0.0,
            discretization: DiscretizationConfig::default(),
            algorithm: Algorithm::TmiFilter,
            candidate_coding: CandidateCoding::GtRange,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if !self.threshold_th.is_finite() {
            return Err(Error::Config("threshold_th must be finite".into()));
        }
        self.discretization.validate()
    }

    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let strategy = match self.discretization.strategy {
            BinStrategy::MinMaxUniform => "min_max_uniform",
            BinStrategy::GtRange => "gt_range",
        };
        vec![
            ("algorithm", self.algorithm.to_string()),
            ("k_max", self.k_max.to_string()),
            ("threshold_th", self.threshold_th.to_string()),
            ("n_bins", self.discretization.n_bins.to_string()),
            ("bin_strategy", strategy.to_string()),
            (
                "candidate_coding",
                self.candidate_coding.as_str().to_string(),
            ),
        ]
    }
}

/// Running approximation of the ground truth, coded in the class alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtEstimate {
    codes: CodedVariable,
}

impl GtEstimate {
    pub fn new(codes: CodedVariable) -> Self {
        GtEstimate { codes }
    }

    pub fn codes(&self) -> &CodedVariable {
        &self.codes
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedBand {
    /// 0-based band index.
    pub band: usize,
    pub mi_bits: f64,
}

/// Scores every band by MI with the ground truth; descending, ties by band index.
pub fn rank_bands_by_mi(
    cube: &HyperCube,
    gt: &GroundTruth,
    disc: &DiscretizationConfig,
) -> Result<Vec<RankedBand>> {
    let target = gt_codes(gt);
    let mut ranking = (0..cube.n_bands())
        .into_par_iter()
        .map(|band| {
            let codes = discretize_band(cube, band, gt, disc)?;
            Ok(RankedBand {
                band,
                mi_bits: mutual_info(&codes, &target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(|a, b| b.mi_bits.total_cmp(&a.mi_bits).then(a.band.cmp(&b.band)));
    Ok(ranking)
}

/// Class-alphabet codes of every band, indexed by band.
pub fn estimate_codes(cube: &HyperCube, gt: &GroundTruth) -> Result<Vec<CodedVariable>> {
    let disc = DiscretizationConfig::gt_range();
    (0..cube.n_bands())
        .into_par_iter()
        .map(|b| discretize_band(cube, b, gt, &disc))
        .collect()
}

/// Seeds the estimate from one band recoded into the class alphabet.
pub fn init_estimate(cube: &HyperCube, gt: &GroundTruth, best_band: usize) -> Result<GtEstimate> {
    Ok(GtEstimate::new(discretize_band(
        cube,
        best_band,
        gt,
        &DiscretizationConfig::gt_range(),
    )?))
}

/// Pixel-wise average of the estimate and a class-alphabet band, rounding
/// halves up: `(e + b + 1) / 2` in integers.
pub fn update_estimate(est: &GtEstimate, band_codes: &CodedVariable) -> Result<GtEstimate> {
    let e = est.codes();
    if e.alphabet_size() != band_codes.alphabet_size() {
        return Err(Error::Contract(format!(
            "estimate alphabet {} differs from band alphabet {}",
            e.alphabet_size(),
            band_codes.alphabet_size()
        )));
    }
    if e.len() != band_codes.len() {
        return Err(Error::Contract(format!(
            "estimate has {} samples, band has {}",
            e.len(),
            band_codes.len()
        )));
    }
    let codes = e
        .codes()
        .iter()
        .zip(band_codes.codes())
        .map(|(&a, &b)| (a + b).div_ceil(2))
        .collect();
    Ok(GtEstimate::new(CodedVariable::new(
        codes,
        e.alphabet_size(),
    )?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// Seed band; score is MI(estimate, gt) after initialization.
    Init,
    MiGain,
    I3,
}

impl ScoreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKind::Init => "init",
            ScoreKind::MiGain => "mi_gain",
            ScoreKind::I3 => "i3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub step: usize,
    /// 0-based band index.
    pub band: usize,
    pub score_bits: f64,
    pub kind: ScoreKind,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// 0-based band indices in selection order.
    pub selected: Vec<usize>,
    pub trace: Vec<TraceEntry>,
    pub config: SelectionConfig,
    pub ranking: Vec<RankedBand>,
    pub band_id_offset: usize,
}

impl SelectionResult {
    /// User-facing band ids (1-based by default).
    pub fn selected_ids(&self) -> Vec<usize> {
        self.selected
            .iter()
            .map(|b| b + self.band_id_offset)
            .collect()
    }

    /// `step,band,score_bits,score_kind,accepted`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,band,score_bits,score_kind,accepted\n");
        for t in &self.trace {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                t.step,
                t.band + self.band_id_offset,
                t.score_bits,
                t.kind.as_str(),
                t.accepted
            );
        }
        out
    }

    /// Config snapshot plus the selected ids as `key = value` text.
    pub fn sidecar(&self) -> String {
        let mut pairs = self.config.to_pairs();
        pairs.push(("selected", join_ids(&self.selected_ids())));
        kv::render(&pairs)
    }
}

pub(crate) fn join_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

/// `rank,band,mi_bits` with 1-based ranks and band ids.
pub fn ranking_csv(ranking: &[RankedBand], band_id_offset: usize) -> String {
    let mut out = String::from("rank,band,mi_bits\n");
    for (i, r) in ranking.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, r.band + band_id_offset, r.mi_bits);
    }
    out
}

/// Runs whichever filter `config.algorithm` names.
pub fn select(
    cube: &HyperCube,
    gt: &GroundTruth,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    match config.algorithm {
        Algorithm::MiFilter => select_mi_filter(cube, gt, config),
        Algorithm::TmiFilter => select_tmi_filter(cube, gt, config),
    }
}

fn check_pair(cube: &HyperCube, gt: &GroundTruth) -> Result<()> {
    if cube.width() != gt.width() || cube.height() != gt.height() {
        return Err(Error::Dimension {
            expected_width: cube.width(),
            expected_height: cube.height(),
            width: gt.width(),
            height: gt.height(),
        });
    }
    Ok(())
}

/// Threshold filter: single pass over the MI ranking, accepting a band when
/// `MI(gt, update(est, band)) - MI(gt, est) > threshold_th`.
pub fn select_mi_filter(
    cube: &HyperCube,
    gt: &GroundTruth,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    check_pair(cube, gt)?;
    let ranking = rank_bands_by_mi(cube, gt, &config.discretization)?;
    let target = gt_codes(gt);
    let codes = estimate_codes(cube, gt)?;

    let first = ranking[0].band;
    let mut est = GtEstimate::new(codes[first].clone());
    let mut current = mutual_info(&target, est.codes())?;
    let mut selected = vec![first];
    let mut trace = vec![TraceEntry {
        step: 0,
        band: first,
        score_bits: current,
        kind: ScoreKind::Init,
        accepted: true,
    }];

    for (step, cand) in ranking.iter().skip(1).enumerate() {
        if selected.len() >= config.k_max {
            break;
        }
        let tentative = update_estimate(&est, &codes[cand.band])?;
        let mi = mutual_info(&target, tentative.codes())?;
        let gain = mi - current;
        let accepted = gain > config.threshold_th;
        trace.push(TraceEntry {
            step: step + 1,
            band: cand.band,
            score_bits: gain,
            kind: ScoreKind::MiGain,
            accepted,
        });
        if accepted {
            est = tentative;
            current = mi;
            selected.push(cand.band);
        }
    }

    Ok(SelectionResult {
        selected,
        trace,
        config: *config,
        ranking,
        band_id_offset: cube.band_id_offset(),
    })
}

/// `I3(estimate, band, gt)` for every candidate, in the candidates' order.
pub fn score_tmi_candidates(
    est: &GtEstimate,
    candidates: &[usize],
    candidate_codes: &[CodedVariable],
    target: &CodedVariable,
) -> Result<Vec<f64>> {
    candidates
        .par_iter()
        .map(|&b| interaction_info(est.codes(), &candidate_codes[b], target))
        .collect()
}

/// Position of the largest score; the earliest position wins ties.
pub fn argmax_first(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        match best {
            Some(j) if s <= scores[j] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Interaction-information filter: repeatedly adds the remaining band that
/// maximizes `I3(estimate, band, gt)` until `k_max` bands are selected.
pub fn select_tmi_filter(
    cube: &HyperCube,
    gt: &GroundTruth,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    check_pair(cube, gt)?;
    let ranking = rank_bands_by_mi(cube, gt, &config.discretization)?;
    let target = gt_codes(gt);
    let codes = estimate_codes(cube, gt)?;
    let ranking_codes;
    let candidate_codes = match config.candidate_coding {
        CandidateCoding::GtRange => &codes,
        CandidateCoding::Ranking => {
            ranking_codes = (0..cube.n_bands())
                .into_par_iter()
                .map(|b| discretize_band(cube, b, gt, &config.discretization))
                .collect::<Result<Vec<_>>>()?;
            &ranking_codes
        }
    };

    let first = ranking[0].band;
    let mut est = GtEstimate::new(codes[first].clone());
    let mut selected = vec![first];
    let mut trace = vec![TraceEntry {
        step: 0,
        band: first,
        score_bits: mutual_info(&target, est.codes())?,
        kind: ScoreKind::Init,
        accepted: true,
    }];
    // Ascending band order so the first maximum is the lowest index.
    let mut remaining: Vec<usize> = (0..cube.n_bands()).filter(|&b| b != first).collect();

    while selected.len() < config.k_max && !remaining.is_empty() {
        let scores = score_tmi_candidates(&est, &remaining, candidate_codes, &target)?;
        let pos = argmax_first(&scores).expect("candidates are nonempty");
        let band = remaining.remove(pos);
        trace.push(TraceEntry {
            step: selected.len(),
            band,
            score_bits: scores[pos],
            kind: ScoreKind::I3,
            accepted: true,
        });
        est = update_estimate(&est, &codes[band])?;
        selected.push(band);
    }

    Ok(SelectionResult {
        selected,
        trace,
        config: *config,
        ranking,
        band_id_offset: cube.band_id_offset(),
    })
}
