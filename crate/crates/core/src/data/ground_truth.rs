use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kv;

/// Per-pixel class labels. `0` marks an unlabeled pixel; classes are `1..=n_classes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    n_classes: u32,
}

impl GroundTruth {
    /// Validates a row-major label plane. `n_classes` is the largest label;
    /// every class `1..=n_classes` must occur.
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Contract(format!(
                "ground truth dimensions must be positive, got {width}x{height}"
            )));
        }
        if labels.len() != width * height {
            return Err(Error::Contract(format!(
                "ground truth needs {} labels, got {}",
                width * height,
                labels.len()
            )));
        }
        let n_classes = labels.iter().copied().max().unwrap_or(0);
        if n_classes == 0 {
            return Err(Error::NoLabeledPixels);
        }
        let mut seen = vec![false; n_classes as usize + 1];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = (1..=n_classes as usize).find(|&c| !seen[c]) {
            return Err(Error::format(
                "labels",
                format!("class {missing} does not occur but {n_classes} is the largest label"),
            ));
        }
        Ok(GroundTruth {
            width,
            height,
            labels,
            n_classes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l > 0).count()
    }

    /// Raster indices of labeled pixels in row-major order. This is the
    /// canonical sample order shared by every coded variable of a dataset.
    pub fn labeled_pixels(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Labels of the labeled pixels, in canonical order.
    pub fn labeled_labels(&self) -> Vec<u32> {
        self.labels.iter().copied().filter(|&l| l > 0).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes as usize + 1];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Text grid: `height` rows of `width` space-separated labels.
    pub fn to_text(&self) -> String {
        render_grid(self.width, &self.labels)
    }
}

/// Renders a row-major label plane as a text grid.
pub fn render_grid(width: usize, labels: &[u32]) -> String {
    let mut out = String::with_capacity(labels.len() * 3);
    for row in labels.chunks(width) {
        for (i, l) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{l}");
        }
        out.push('\n');
    }
    out
}

/// Sidecar declaring the dims of a binary 8-bit label plane: `<path>.dims`,
/// one line `width height`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".dims");
    PathBuf::from(s)
}

/// Loads a ground-truth map. If a `.dims` sidecar exists the file is read as a
/// raw 8-bit plane; otherwise as a text grid of whitespace- or comma-separated
/// non-negative integers.
pub fn load_ground_truth(path: &Path, expected_dims: (usize, usize)) -> Result<GroundTruth> {
    let sidecar = sidecar_path(path);
    let (width, height, labels) = if sidecar.is_file() {
        read_binary_plane(path, &sidecar)?
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_text_grid(&text)?
    };
    let (ew, eh) = expected_dims;
    if (width, height) != (ew, eh) {
        return Err(Error::Dimension {
            expected_width: ew,
            expected_height: eh,
            width,
            height,
        });
    }
    GroundTruth::new(width, height, labels)
}

fn read_binary_plane(path: &Path, sidecar: &Path) -> Result<(usize, usize, Vec<u32>)> {
    let text = std::fs::read_to_string(sidecar).map_err(|e| Error::io(sidecar, e))?;
    let dims: Vec<&str> = text.split_whitespace().collect();
    let parse = |i: usize, name: &str| -> Result<usize> {
        dims.get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(name, format!("cannot read from {}", sidecar.display())))
    };
    let (width, height) = (parse(0, "width")?, parse(1, "height")?);
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != width * height {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected: (width * height) as u64,
            actual: bytes.len() as u64,
        });
    }
    Ok((width, height, bytes.into_iter().map(u32::from).collect()))
}

/// Parses a text label grid into `(width, height, labels)`.
pub fn parse_text_grid(text: &str) -> Result<(usize, usize, Vec<u32>)> {
    let mut labels = Vec::new();
    let mut width = None;
    let mut height = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut n = 0;
        for tok in line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let label: u32 = tok.parse().map_err(|_| {
                Error::format(
                    format!("row {}", lineno + 1),
                    format!("`{tok}` is not a non-negative integer label"),
                )
            })?;
            labels.push(label);
            n += 1;
        }
        match width {
            None => width = Some(n),
            Some(w) if w != n => {
                return Err(Error::format(
                    format!("row {}", lineno + 1),
                    format!("has {n} labels, expected {w}"),
                ))
            }
            _ => {}
        }
        height += 1;
    }
    let width = width.ok_or_else(|| Error::format("grid", "empty ground-truth file"))?;
    Ok((width, height, labels))
}

pub fn write_ground_truth_text(path: &Path, width: usize, labels: &[u32]) -> Result<()> {
    kv::write_atomic(path, render_grid(width, labels).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt_from(text: &str) -> Result<GroundTruth> {
        let (w, h, l) = parse_text_grid(text)?;
        GroundTruth::new(w, h, l)
    }

    #[test]
    fn single_class_map() {
        let gt = gt_from("1 1\n1 1\n").unwrap();
        assert_eq!(gt.n_classes(), 1);
        assert_eq!(gt.labeled_count(), 4);
    }

    #[test]
    fn all_unlabeled_rejected() {
        assert!(matches!(gt_from("0 0\n0 0\n"), Err(Error::NoLabeledPixels)));
    }

    #[test]
    fn negative_and_fractional_labels_rejected() {
        assert!(matches!(gt_from("1 -1\n1 1\n"), Err(Error::Format { .. })));
        assert!(matches!(gt_from("1 1.5\n1 1\n"), Err(Error::Format { .. })));
    }

    #[test]
    fn comma_separated_accepted() {
        let gt = gt_from("1,2\n0,2\n").unwrap();
        assert_eq!(gt.labels(), &[1, 2, 0, 2]);
        assert_eq!(gt.labeled_pixels(), vec![0, 1, 3]);
    }

    #[test]
    fn aviris_shaped_counts() {
        // 16 classes over 10366 labeled pixels, the rest zero.
        let mut labels = vec![0u32; 145 * 145];
        for (i, l) in labels.iter_mut().take(10366).enumerate() {
            *l = (i % 16) as u32 + 1;
        }
        let gt = GroundTruth::new(145, 145, labels).unwrap();
        assert_eq!(gt.n_classes(), 16);
        assert_eq!(gt.labeled_count(), 10366);
        assert_eq!(gt.class_counts()[0], 10659);
    }

    #[test]
    fn dims_checked_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gt.txt");
        std::fs::write(&p, "1 2\n2 1\n").unwrap();
        assert!(matches!(
            load_ground_truth(&p, (3, 2)),
            Err(Error::Dimension { .. })
        ));
        assert_eq!(load_ground_truth(&p, (2, 2)).unwrap().n_classes(), 2);
    }

    #[test]
    fn binary_plane_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gt.raw");
        std::fs::write(&p, [1u8, 0, 2, 2, 1, 0]).unwrap();
        std::fs::write(sidecar_path(&p), "3 2\n").unwrap();
        let gt = load_ground_truth(&p, (3, 2)).unwrap();
        assert_eq!(gt.labels(), &[1, 0, 2, 2, 1, 0]);
        assert_eq!(gt.labeled_count(), 4);
    }
}
