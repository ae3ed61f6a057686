//! Seeded synthetic cubes with known band roles.
//!
//! Band order in the generated cube is: informative, redundant, noise, then
//! the synergy pairs (each pair adjacent). Every pixel is labeled; classes are
//! dealt round-robin and shuffled, so class sizes differ by at most one.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! Uniforms are `(next_u64 >> 11) * 2^-53`; normals use Box-Muller with the
//! cosine branch only, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`. Draws happen in
//! this order: the label shuffle, then bands in cube order, pixels row-major.
//! Synergy bands first shuffle each class's pixels (classes ascending), then
//! draw their noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GroundTruth, HyperCube};
use crate::error::{Error, Result};
use crate::kv::{self, KeyValues};

/// Radiance offset between consecutive classes on an informative band.
pub const INFORMATIVE_STEP: f64 = 1.0;
/// Radiance offset between the two levels of a synergy band.
pub const SYNERGY_STEP: f64 = 4.0;
/// Noise bands are uniform on `[0, NOISE_RANGE)`.
pub const NOISE_RANGE: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    pub n_classes: u32,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub n_noise: usize,
    pub noise_sigma: f64,
    pub synergy_pairs: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            width: 32,
            height: 32,
            n_classes: 4,
            n_informative: 2,
            n_redundant: 2,
            n_noise: 4,
            noise_sigma: 0.5,
            synergy_pairs: 0,
            seed: 0,
        }
    }
}

/// Role of each generated band, in cube order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandRole {
    Informative,
    /// Affine copy of the given 0-based informative band.
    Redundant {
        parent: usize,
    },
    Noise,
    /// Member of a synergy pair; `pair` counts from zero.
    Synergy {
        pair: usize,
    },
}

impl SyntheticSpec {
    pub fn n_bands(&self) -> usize {
        self.n_informative + self.n_redundant + self.n_noise + 2 * self.synergy_pairs
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Spec("width and height must be positive".into()));
        }
        if self.n_classes == 0 {
            return Err(Error::Spec("n_classes must be at least 1".into()));
        }
        if (self.n_classes as usize) > self.width * self.height {
            return Err(Error::Spec(format!(
                "{} classes cannot fit in {} pixels",
                self.n_classes,
                self.width * self.height
            )));
        }
        if self.n_bands() == 0 {
            return Err(Error::Spec("the band counts sum to zero".into()));
        }
        if self.n_redundant > 0 && self.n_informative == 0 {
            return Err(Error::Spec(
                "redundant bands need at least one informative parent".into(),
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Spec(format!(
                "noise_sigma {} is invalid",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    pub fn roles(&self) -> Vec<BandRole> {
        let mut roles = Vec::with_capacity(self.n_bands());
        roles.extend(std::iter::repeat_n(
            BandRole::Informative,
            self.n_informative,
        ));
        roles.extend((0..self.n_redundant).map(|r| BandRole::Redundant {
            parent: r % self.n_informative.max(1),
        }));
        roles.extend(std::iter::repeat_n(BandRole::Noise, self.n_noise));
        for pair in 0..self.synergy_pairs {
            roles.push(BandRole::Synergy { pair });
            roles.push(BandRole::Synergy { pair });
        }
        roles
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let d = SyntheticSpec::default();
        let spec = SyntheticSpec {
            width: kv.parse_opt("width")?.unwrap_or(d.width),
            height: kv.parse_opt("height")?.unwrap_or(d.height),
            n_classes: kv.parse_opt("n_classes")?.unwrap_or(d.n_classes),
            n_informative: kv.parse_opt("n_informative")?.unwrap_or(d.n_informative),
            n_redundant: kv.parse_opt("n_redundant")?.unwrap_or(d.n_redundant),
            n_noise: kv.parse_opt("n_noise")?.unwrap_or(d.n_noise),
            noise_sigma: kv.parse_opt("noise_sigma")?.unwrap_or(d.noise_sigma),
            synergy_pairs: kv.parse_opt("synergy_pairs")?.unwrap_or(d.synergy_pairs),
            seed: kv.parse_opt("seed")?.unwrap_or(d.seed),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn render(&self) -> String {
        kv::render(&[
            ("width", self.width.to_string()),
            ("height", self.height.to_string()),
            ("n_classes", self.n_classes.to_string()),
            ("n_informative", self.n_informative.to_string()),
            ("n_redundant", self.n_redundant.to_string()),
            ("n_noise", self.n_noise.to_string()),
            ("noise_sigma", self.noise_sigma.to_string()),
            ("synergy_pairs", self.synergy_pairs.to_string()),
            ("seed", self.seed.to_string()),
        ])
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generates a cube and its ground truth. Pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(HyperCube, GroundTruth)> {
    spec.validate()?;
    let n = spec.width * spec.height;
    let c = spec.n_classes as usize;
    let sigma = spec.noise_sigma;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut labels: Vec<u32> = (0..n).map(|i| (i % c) as u32 + 1).collect();
    labels.shuffle(&mut rng);

    let roles = spec.roles();
    let mut bands: Vec<Vec<f64>> = Vec::with_capacity(roles.len());
    // Level of the first member of the current synergy pair, per pixel.
    let mut pending_levels: Vec<u32> = Vec::new();
    for (b, role) in roles.iter().enumerate() {
        let plane: Vec<f64> = match *role {
            BandRole::Informative => {
                let base = 10.0 * (b + 1) as f64;
                labels
                    .iter()
                    .map(|&l| base + INFORMATIVE_STEP * (l - 1) as f64 + sigma * normal(&mut rng))
                    .collect()
            }
            BandRole::Redundant { parent } => {
                let r = b - spec.n_informative;
                let gain = 1.5 + 0.5 * (r % 3) as f64;
                let offset = 5.0 + r as f64;
                bands[parent]
                    .iter()
                    .map(|&v| gain * v + offset + sigma * normal(&mut rng))
                    .collect()
            }
            BandRole::Noise => (0..n).map(|_| NOISE_RANGE * uniform(&mut rng)).collect(),
            BandRole::Synergy { .. } => {
                let first = pending_levels.is_empty();
                let levels = if first {
                    let lv = balanced_levels(&labels, c, &mut rng);
                    pending_levels = lv.clone();
                    lv
                } else {
                    // Partner level makes (level1 + level2) share the class parity.
                    let lv = pending_levels
                        .iter()
                        .zip(&labels)
                        .map(|(&l1, &label)| (l1 + (label - 1)) % 2)
                        .collect();
                    pending_levels.clear();
                    lv
                };
                let base = 20.0 + 10.0 * b as f64;
                levels
                    .iter()
                    .map(|&lv| base + SYNERGY_STEP * lv as f64 + sigma * normal(&mut rng))
                    .collect()
            }
        };
        bands.push(plane);
    }

    let cube = HyperCube::from_bands(spec.width, spec.height, bands)?;
    let gt = GroundTruth::new(spec.width, spec.height, labels)?;
    Ok((cube, gt))
}

/// Binary levels that split every class as evenly as possible: each class's
/// pixels are shuffled and alternate between level 0 and level 1.
fn balanced_levels(labels: &[u32], n_classes: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut levels = vec![0u32; labels.len()];
    for class in 1..=n_classes as u32 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(rng);
        for (rank, &p) in members.iter().enumerate() {
            levels[p] = (rank % 2) as u32;
        }
    }
    levels
}
