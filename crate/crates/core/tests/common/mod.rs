//! Brute-force reference implementations shared by the integration tests and
//! the acceptance harness. Nothing here calls into the measures under test.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bandsel::data::{GroundTruth, HyperCube};
use bandsel::selection::{
    argmax_first, score_tmi_candidates, GtEstimate, ScoreKind, SelectionResult,
};
use bandsel::CodedVariable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Probability table of the tuples `(cols[0][i], cols[1][i], ...)`.
pub fn table(cols: &[&[u32]]) -> BTreeMap<Vec<u32>, f64> {
    let n = cols[0].len();
    let mut t: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for i in 0..n {
        *t.entry(cols.iter().map(|c| c[i]).collect()).or_default() += 1.0;
    }
    for p in t.values_mut() {
        *p /= n as f64;
    }
    t
}

pub fn h(cols: &[&[u32]]) -> f64 {
    -table(cols).values().map(|&p| p * p.log2()).sum::<f64>()
}

/// `sum p(x,y) log2(p(x,y) / (p(x) p(y)))` over the joint table.
pub fn mi(x: &[u32], y: &[u32]) -> f64 {
    let px = table(&[x]);
    let py = table(&[y]);
    table(&[x, y])
        .iter()
        .map(|(k, &p)| p * (p / (px[&vec![k[0]]] * py[&vec![k[1]]])).log2())
        .sum()
}

/// `I(a; (b, c))` by the same double sum with `(b, c)` as one variable.
pub fn mi_joined(a: &[u32], b: &[u32], c: &[u32]) -> f64 {
    let pa = table(&[a]);
    let pbc = table(&[b, c]);
    table(&[a, b, c])
        .iter()
        .map(|(k, &p)| p * (p / (pa[&vec![k[0]]] * pbc[&vec![k[1], k[2]]])).log2())
        .sum()
}

/// `I((a, b); c) - I(a; c) - I(b; c)`.
pub fn i3(a: &[u32], b: &[u32], c: &[u32]) -> f64 {
    mi_joined(c, a, b) - mi(a, c) - mi(b, c)
}

pub fn random_variable(rng: &mut ChaCha8Rng, len: usize, alphabet: usize) -> CodedVariable {
    let codes = (0..len)
        .map(|_| rng.random_range(0..alphabet as u32))
        .collect();
    CodedVariable::new(codes, alphabet).unwrap()
}

/// Three equal-length random variables, sometimes correlated so that the
/// redundant and synergistic regimes both show up.
pub fn random_triple(seed: u64) -> [CodedVariable; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(1..=64);
    let alpha: Vec<usize> = (0..3).map(|_| rng.random_range(1..=8)).collect();
    let a = random_variable(&mut rng, len, alpha[0]);
    let b = random_variable(&mut rng, len, alpha[1]);
    let c = match rng.random_range(0..3) {
        0 => random_variable(&mut rng, len, alpha[2]),
        1 => {
            let codes = a
                .codes()
                .iter()
                .zip(b.codes())
                .map(|(x, y)| (x + y) % alpha[2] as u32)
                .collect();
            CodedVariable::new(codes, alpha[2]).unwrap()
        }
        _ => {
            let codes = a.codes().iter().map(|x| x % alpha[2] as u32).collect();
            CodedVariable::new(codes, alpha[2]).unwrap()
        }
    };
    [a, b, c]
}

/// Uniform min-max binning over the labeled pixels of one band.
pub fn bin_band(cube: &HyperCube, gt: &GroundTruth, band: usize, n_bins: usize) -> Vec<u32> {
    let pixels = gt.labeled_pixels();
    let vals: Vec<f64> = pixels.iter().map(|&p| cube.band(band)[p]).collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    vals.iter()
        .map(|&v| {
            if hi > lo {
                (((v - lo) / (hi - lo) * n_bins as f64).floor() as u32).min(n_bins as u32 - 1)
            } else {
                0
            }
        })
        .collect()
}

pub fn labels0(gt: &GroundTruth) -> Vec<u32> {
    gt.labeled_labels().iter().map(|l| l - 1).collect()
}

fn average(est: &[u32], band: &[u32]) -> Vec<u32> {
    est.iter()
        .zip(band)
        .map(|(e, b)| (e + b).div_ceil(2))
        .collect()
}

/// Checks a threshold-filter result against a from-scratch recomputation.
pub fn replay_mi_filter(
    cube: &HyperCube,
    gt: &GroundTruth,
    r: &SelectionResult,
    n_bins: usize,
) -> Result<(), String> {
    let target = labels0(gt);
    let c = gt.n_classes() as usize;
    let ranking = check_ranking(cube, gt, r, n_bins)?;
    let th = r.config.threshold_th;
    let mut est = bin_band(cube, gt, ranking[0], c);
    let mut current = mi(&est, &target);
    let mut selected = vec![ranking[0]];
    let t0 = &r.trace[0];
    if t0.band != ranking[0] || t0.kind != ScoreKind::Init || (t0.score_bits - current).abs() > 1e-9
    {
        return Err(format!("bad seed row {t0:?}"));
    }
    let mut rows = r.trace[1..].iter();
    for &b in &ranking[1..] {
        if selected.len() >= r.config.k_max {
            break;
        }
        let row = rows.next().ok_or("trace ends early")?;
        let tentative = average(&est, &bin_band(cube, gt, b, c));
        let mi_new = mi(&tentative, &target);
        let gain = mi_new - current;
        if row.band != b || row.kind != ScoreKind::MiGain {
            return Err(format!("trace row {row:?} should examine band {b}"));
        }
        if (row.score_bits - gain).abs() > 1e-9 {
            return Err(format!(
                "band {b}: trace gain {} vs recomputed {gain}",
                row.score_bits
            ));
        }
        if row.accepted != (row.score_bits > th) {
            return Err(format!(
                "band {b}: accepted={} with gain {} and Th {th}",
                row.accepted, row.score_bits
            ));
        }
        if (gain - th).abs() > 1e-9 && row.accepted != (gain > th) {
            return Err(format!(
                "band {b}: decision disagrees with recomputed gain {gain}"
            ));
        }
        if row.accepted {
            est = tentative;
            current = mi_new;
            selected.push(b);
        }
    }
    if rows.next().is_some() {
        return Err("trace has extra rows".into());
    }
    if selected != r.selected {
        return Err(format!("selected {:?}, replay {selected:?}", r.selected));
    }
    Ok(())
}

/// Checks an interaction-filter result: every step is the argmax of the
/// recomputed scores, with the earliest band winning exact ties.
pub fn replay_tmi_filter(
    cube: &HyperCube,
    gt: &GroundTruth,
    r: &SelectionResult,
    n_bins: usize,
) -> Result<(), String> {
    let target = labels0(gt);
    let c = gt.n_classes() as usize;
    let ranking = check_ranking(cube, gt, r, n_bins)?;
    let codes: Vec<Vec<u32>> = (0..cube.n_bands())
        .map(|b| bin_band(cube, gt, b, c))
        .collect();
    let lib_codes: Vec<CodedVariable> = codes
        .iter()
        .map(|v| CodedVariable::new(v.clone(), c).unwrap())
        .collect();
    let lib_target = CodedVariable::new(target.clone(), c).unwrap();
    let mut est = codes[ranking[0]].clone();
    if r.selected[0] != ranking[0] || r.trace[0].kind != ScoreKind::Init {
        return Err("seed band is not the top-ranked band".into());
    }
    let mut remaining: Vec<usize> = (0..cube.n_bands()).filter(|&b| b != ranking[0]).collect();
    for (step, row) in r.trace.iter().enumerate().skip(1) {
        let oracle: Vec<f64> = remaining
            .iter()
            .map(|&b| i3(&est, &codes[b], &target))
            .collect();
        let lib = score_tmi_candidates(
            &GtEstimate::new(CodedVariable::new(est.clone(), c).unwrap()),
            &remaining,
            &lib_codes,
            &lib_target,
        )
        .map_err(|e| e.to_string())?;
        for (o, l) in oracle.iter().zip(&lib) {
            if (o - l).abs() > 1e-9 {
                return Err(format!("step {step}: score {l} vs oracle {o}"));
            }
        }
        let max = oracle.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pos = remaining
            .iter()
            .position(|&b| b == row.band)
            .ok_or("band selected twice")?;
        if oracle[pos] < max - 1e-9 {
            return Err(format!(
                "step {step}: band {} scores {} below max {max}",
                row.band, oracle[pos]
            ));
        }
        if argmax_first(&lib) != Some(pos) {
            return Err(format!("step {step}: tie-break picked band {}", row.band));
        }
        if row.step != step
            || row.kind != ScoreKind::I3
            || (row.score_bits - oracle[pos]).abs() > 1e-9
        {
            return Err(format!("step {step}: malformed row {row:?}"));
        }
        est = average(&est, &codes[row.band]);
        remaining.remove(pos);
    }
    let expected_len = r.config.k_max.min(cube.n_bands());
    if r.selected.len() != expected_len || r.trace.len() != expected_len {
        return Err(format!(
            "{} bands selected, expected {expected_len}",
            r.selected.len()
        ));
    }
    let trace_bands: Vec<usize> = r.trace.iter().map(|t| t.band).collect();
    if trace_bands != r.selected {
        return Err("trace and selection differ".into());
    }
    Ok(())
}

/// Recomputes the MI ranking and compares it with the result's.
fn check_ranking(
    cube: &HyperCube,
    gt: &GroundTruth,
    r: &SelectionResult,
    n_bins: usize,
) -> Result<Vec<usize>, String> {
    let target = labels0(gt);
    let scores: Vec<f64> = (0..cube.n_bands())
        .map(|b| mi(&bin_band(cube, gt, b, n_bins), &target))
        .collect();
    for (i, rb) in r.ranking.iter().enumerate() {
        if (rb.mi_bits - scores[rb.band]).abs() > 1e-9 {
            return Err(format!(
                "band {} MI {} vs oracle {}",
                rb.band, rb.mi_bits, scores[rb.band]
            ));
        }
        if let Some(next) = r.ranking.get(i + 1) {
            let ordered =
                rb.mi_bits > next.mi_bits || (rb.mi_bits == next.mi_bits && rb.band < next.band);
            if !ordered {
                return Err(format!("ranking out of order at position {i}"));
            }
        }
    }
    Ok(r.ranking.iter().map(|rb| rb.band).collect())
}

/// All-pairs k-NN: full sort by (distance, training index), then majority vote
/// with ties to the smaller label.
pub fn knn_oracle(train: &[Vec<f64>], labels: &[u32], test: &[Vec<f64>], k: usize) -> Vec<u32> {
    test.iter()
        .map(|x| {
            let mut d: Vec<(f64, usize)> = train
                .iter()
                .enumerate()
                .map(|(i, t)| (t.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum(), i))
                .collect();
            d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
            for &(_, i) in d.iter().take(k) {
                *votes.entry(labels[i]).or_default() += 1;
            }
            let top = *votes.values().max().unwrap();
            *votes.iter().find(|(_, &n)| n == top).unwrap().0
        })
        .collect()
}

/// Min-max normalization with statistics from `train`, clamped to [0, 1].
pub fn normalize(train: &[Vec<f64>], rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let f = train[0].len();
    let lo: Vec<f64> = (0..f)
        .map(|j| train.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..f)
        .map(|j| train.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    rows.iter()
        .map(|r| {
            (0..f)
                .map(|j| {
                    if hi[j] > lo[j] {
                        ((r[j] - lo[j]) / (hi[j] - lo[j])).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}
