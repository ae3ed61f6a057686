//! Plug-in (empirical histogram) estimators, in bits.
//!
//! Entropy is the standard `H = -sum p log2 p`. Every entropy is computed
//! from the sorted multiset of nonzero cell counts, so joint entropies are
//! bit-identical under any reordering of their arguments.

use super::coded::{check_lengths, CodedVariable};
use crate::error::{Error, Result};

/// Joint alphabets up to this many cells are counted densely; larger ones
/// fall back to sorting mixed-radix keys.
const DENSE_LIMIT: u64 = 1 << 20;

/// Dense joint histogram of one to three coded variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    dims: Vec<usize>,
    counts: Vec<u64>,
    total: u64,
}

impl JointHistogram {
    pub fn new(vars: &[&CodedVariable]) -> Result<Self> {
        if vars.is_empty() || vars.len() > 3 {
            return Err(Error::Contract(format!(
                "joint histograms take 1 to 3 variables, got {}",
                vars.len()
            )));
        }
        check_lengths(vars)?;
        let dims: Vec<usize> = vars.iter().map(|v| v.alphabet_size()).collect();
        let cells = product(&dims)?;
        if cells > DENSE_LIMIT << 6 {
            return Err(Error::Contract(format!(
                "joint alphabet of {cells} cells is too large for a dense histogram"
            )));
        }
        let mut counts = vec![0u64; cells as usize];
        for i in 0..vars[0].len() {
            counts[key(vars, i) as usize] += 1;
        }
        Ok(JointHistogram {
            dims,
            counts,
            total: vars[0].len() as u64,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Row-major counts over the product alphabet (last variable fastest).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn entropy(&self) -> f64 {
        let mut nz: Vec<u64> = self.counts.iter().copied().filter(|&c| c > 0).collect();
        entropy_of_counts(&mut nz, self.total)
    }
}

fn product(dims: &[usize]) -> Result<u64> {
    dims.iter().try_fold(1u64, |acc, &d| {
        acc.checked_mul(d as u64)
            .ok_or_else(|| Error::Contract("joint alphabet overflows 64-bit keys".into()))
    })
}

#[inline]
fn key(vars: &[&CodedVariable], i: usize) -> u64 {
    vars.iter().fold(0u64, |k, v| {
        k * v.alphabet_size() as u64 + v.codes()[i] as u64
    })
}

/// `log2(N) - sum(c log2 c) / N` over the nonzero counts, summed in
/// ascending count order.
fn entropy_of_counts(nonzero: &mut [u64], total: u64) -> f64 {
    nonzero.sort_unstable();
    let n = total as f64;
    let s: f64 = nonzero
        .iter()
        .map(|&c| {
            let c = c as f64;
            c * c.log2()
        })
        .sum();
    let h = n.log2() - s / n;
    // A single occupied cell gives exactly zero. Otherwise clamp rounding noise
    // into [0, log2(occupied cells)], the exact bounds of H.
    if nonzero.len() <= 1 {
        0.0
    } else {
        h.clamp(0.0, (nonzero.len() as f64).log2())
    }
}

fn joint_entropy_unchecked(vars: &[&CodedVariable]) -> Result<f64> {
    let total = vars[0].len() as u64;
    let cells = product(&vars.iter().map(|v| v.alphabet_size()).collect::<Vec<_>>())?;
    let mut nonzero: Vec<u64> = if cells <= DENSE_LIMIT {
        let mut counts = vec![0u64; cells as usize];
        for i in 0..vars[0].len() {
            counts[key(vars, i) as usize] += 1;
        }
        counts.into_iter().filter(|&c| c > 0).collect()
    } else {
        let mut keys: Vec<u64> = (0..vars[0].len()).map(|i| key(vars, i)).collect();
        keys.sort_unstable();
        let mut runs = Vec::new();
        let mut start = 0;
        for i in 1..=keys.len() {
            if i == keys.len() || keys[i] != keys[start] {
                runs.push((i - start) as u64);
                start = i;
            }
        }
        runs
    };
    Ok(entropy_of_counts(&mut nonzero, total))
}

/// Shannon entropy `H(X)` in bits.
pub fn entropy(x: &CodedVariable) -> f64 {
    joint_entropy_unchecked(&[x]).expect("single-variable alphabet always fits")
}

/// Entropy of the product variable formed by pairing codes pixel-wise.
pub fn joint_entropy(vars: &[&CodedVariable]) -> Result<f64> {
    if vars.is_empty() || vars.len() > 3 {
        return Err(Error::Contract(format!(
            "joint entropy takes 1 to 3 variables, got {}",
            vars.len()
        )));
    }
    check_lengths(vars)?;
    joint_entropy_unchecked(vars)
}

/// `I(A;B) = H(A) + H(B) - H(A,B)`, clamped at zero.
pub fn mutual_info(a: &CodedVariable, b: &CodedVariable) -> Result<f64> {
    check_lengths(&[a, b])?;
    let i = entropy(a) + entropy(b) - joint_entropy_unchecked(&[a, b])?;
    Ok(i.max(0.0))
}

/// `I(A; B,C)`: mutual information between `a` and the joined pair `(b, c)`.
pub fn mi_joined(a: &CodedVariable, b: &CodedVariable, c: &CodedVariable) -> Result<f64> {
    check_lengths(&[a, b, c])?;
    let i = entropy(a) + joint_entropy_unchecked(&[b, c])? - joint_entropy_unchecked(&[a, b, c])?;
    Ok(i.max(0.0))
}

/// Interaction information `I(A,B; C) - I(A;C) - I(B;C)`: the information
/// about `c` gained by joining `a` and `b`. Symmetric in all three arguments.
/// Positive values mean synergy, negative values redundancy. Not clamped.
pub fn interaction_info(a: &CodedVariable, b: &CodedVariable, c: &CodedVariable) -> Result<f64> {
    Ok(mi_joined(c, a, b)? - mutual_info(a, c)? - mutual_info(b, c)?)
}
