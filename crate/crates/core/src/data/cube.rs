use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kv::{self, KeyValues};

/// A `width x height x n_bands` radiance raster stored band-major, so one
/// band is a contiguous row-major plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    width: usize,
    height: usize,
    n_bands: usize,
    values: Vec<f64>,
    band_id_offset: usize,
}

impl HyperCube {
    /// Builds a cube from band-major samples, `values[(band * height + row) * width + col]`.
    pub fn new(width: usize, height: usize, n_bands: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || n_bands == 0 {
            return Err(Error::Contract(format!(
                "cube dimensions must be positive, got {width}x{height}x{n_bands}"
            )));
        }
        let expected = width * height * n_bands;
        if values.len() != expected {
            return Err(Error::Contract(format!(
                "cube needs {expected} samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!(
                "non-finite sample at band {}, pixel {}",
                i / (width * height),
                i % (width * height)
            )));
        }
        Ok(HyperCube {
            width,
            height,
            n_bands,
            values,
            band_id_offset: 1,
        })
    }

    /// Builds a cube from per-band row-major planes.
    pub fn from_bands(width: usize, height: usize, bands: Vec<Vec<f64>>) -> Result<Self> {
        let n_bands = bands.len();
        let mut values = Vec::with_capacity(width * height * n_bands);
        for (b, plane) in bands.into_iter().enumerate() {
            if plane.len() != width * height {
                return Err(Error::Contract(format!(
                    "band {b} has {} samples, expected {}",
                    plane.len(),
                    width * height
                )));
            }
            values.extend(plane);
        }
        Self::new(width, height, n_bands, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn n_pixels(&self) -> usize {
        self.width * self.height
    }

    /// Offset added to 0-based band indices in user-facing output (default 1).
    pub fn band_id_offset(&self) -> usize {
        self.band_id_offset
    }

    pub fn with_band_id_offset(mut self, offset: usize) -> Self {
        self.band_id_offset = offset;
        self
    }

    /// Row-major plane of a 0-based band.
    pub fn band(&self, band: usize) -> &[f64] {
        let n = self.n_pixels();
        &self.values[band * n..(band + 1) * n]
    }

    pub fn get(&self, band: usize, row: usize, col: usize) -> f64 {
        self.values[(band * self.height + row) * self.width + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    Bsq,
    Bil,
    Bip,
}

impl Interleave {
    pub fn as_str(self) -> &'static str {
        match self {
            Interleave::Bsq => "bsq",
            Interleave::Bil => "bil",
            Interleave::Bip => "bip",
        }
    }

    /// Position of sample (band, row, col) in the on-disk sample stream.
    fn offset(self, dims: (usize, usize, usize), band: usize, row: usize, col: usize) -> usize {
        let (width, height, n_bands) = dims;
        match self {
            Interleave::Bsq => (band * height + row) * width + col,
            Interleave::Bil => (row * n_bands + band) * width + col,
            Interleave::Bip => (row * width + col) * n_bands + band,
        }
    }
}

impl std::str::FromStr for Interleave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsq" => Ok(Interleave::Bsq),
            "bil" => Ok(Interleave::Bil),
            "bip" => Ok(Interleave::Bip),
            other => Err(Error::format(
                "interleave",
                format!("expected bsq, bil or bip, found `{other}`"),
            )),
        }
    }
}

/// ENVI `data type` codes supported by the reader and writer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    U8,
    I16,
    F32,
    U16,
}

impl DataType {
    pub fn from_envi_code(code: u32) -> Result<Self> {
        match code {
            1 => Ok(DataType::U8),
            2 => Ok(DataType::I16),
            4 => Ok(DataType::F32),
            12 => Ok(DataType::U16),
            other => Err(Error::Unsupported(format!("ENVI data type code {other}"))),
        }
    }

    pub fn envi_code(self) -> u32 {
        match self {
            DataType::U8 => 1,
            DataType::I16 => 2,
            DataType::F32 => 4,
            DataType::U16 => 12,
        }
    }

    pub fn size(self) -> usize {
        match self {
            DataType::U8 => 1,
            DataType::I16 | DataType::U16 => 2,
            DataType::F32 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

/// On-disk layout of a cube: everything needed besides the dimensions to
/// decode or encode the raw payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubeLayout {
    pub interleave: Interleave,
    pub data_type: DataType,
    pub byte_order: ByteOrder,
}

impl Default for CubeLayout {
    fn default() -> Self {
        CubeLayout {
            interleave: Interleave::Bsq,
            data_type: DataType::F32,
            byte_order: ByteOrder::Little,
        }
    }
}

/// Parsed ENVI header.
#[derive(Debug, Clone, PartialEq)]
pub struct EnviHeader {
    pub samples: usize,
    pub lines: usize,
    pub bands: usize,
    pub header_offset: u64,
    pub layout: CubeLayout,
    /// Explicit `data file` entry, resolved relative to the header.
    pub data_file: Option<PathBuf>,
}

impl EnviHeader {
    pub fn read(path: &Path) -> Result<Self> {
        let kv = KeyValues::read(path)?;
        let mut header = Self::from_key_values(&kv)?;
        if let Some(df) = kv.get("data file") {
            let base = path.parent().unwrap_or(Path::new("."));
            header.data_file = Some(base.join(df));
        }
        Ok(header)
    }

    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let positive = |key: &str| -> Result<usize> {
            let v: usize = kv.parse_required(key)?;
            if v == 0 {
                return Err(Error::format(key, "must be positive"));
            }
            Ok(v)
        };
        let samples = positive("samples")?;
        let lines = positive("lines")?;
        let bands = positive("bands")?;
        let interleave: Interleave = kv.require("interleave")?.parse()?;
        let data_type = DataType::from_envi_code(kv.parse_required("data type")?)?;
        let byte_order = match kv.parse_opt::<u32>("byte order")?.unwrap_or(0) {
            0 => ByteOrder::Little,
            1 => ByteOrder::Big,
            other => {
                return Err(Error::format(
                    "byte order",
                    format!("expected 0 or 1, found {other}"),
                ))
            }
        };
        let header_offset = kv.parse_opt("header offset")?.unwrap_or(0);
        Ok(EnviHeader {
            samples,
            lines,
            bands,
            header_offset,
            layout: CubeLayout {
                interleave,
                data_type,
                byte_order,
            },
            data_file: None,
        })
    }

    pub fn render(&self) -> String {
        let order = match self.layout.byte_order {
            ByteOrder::Little => "0",
            ByteOrder::Big => "1",
        };
        let mut out = String::from("ENVI\n");
        out.push_str(&kv::render(&[
            ("samples", self.samples.to_string()),
            ("lines", self.lines.to_string()),
            ("bands", self.bands.to_string()),
            ("header offset", self.header_offset.to_string()),
            ("file type", "ENVI Standard".to_string()),
            ("data type", self.layout.data_type.envi_code().to_string()),
            ("interleave", self.layout.interleave.as_str().to_string()),
            ("byte order", order.to_string()),
        ]));
        out
    }

    fn payload_len(&self) -> u64 {
        (self.samples * self.lines * self.bands * self.layout.data_type.size()) as u64
    }
}

/// Locates the binary payload for a header: an explicit `data file` entry,
/// else the header path without `.hdr`, else the same stem with `.img`,
/// `.raw`, `.dat` or the interleave name as extension.
pub fn data_path_for(header_path: &Path, header: &EnviHeader) -> Result<PathBuf> {
    if let Some(p) = &header.data_file {
        return Ok(p.clone());
    }
    let mut candidates = Vec::new();
    let is_hdr = header_path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("hdr"));
    if is_hdr {
        candidates.push(header_path.with_extension(""));
        for ext in ["img", "raw", "dat", header.layout.interleave.as_str()] {
            candidates.push(header_path.with_extension(ext));
        }
    } else {
        let mut s = header_path.as_os_str().to_owned();
        s.push(".img");
        candidates.push(PathBuf::from(s));
    }
    candidates
        .iter()
        .find(|p| p.is_file())
        .cloned()
        .ok_or_else(|| {
            Error::io(
                &candidates[0],
                std::io::Error::new(std::io::ErrorKind::NotFound, "binary data file not found"),
            )
        })
}

/// Loads an ENVI header + raw binary cube, converting samples to `f64` and
/// normalizing any interleave to band-major order.
pub fn load_cube(header_path: &Path) -> Result<HyperCube> {
    let header = EnviHeader::read(header_path)?;
    let data_path = data_path_for(header_path, &header)?;
    let bytes = std::fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expected = header.header_offset + header.payload_len();
    if bytes.len() as u64 != expected {
        return Err(Error::Truncated {
            path: data_path,
            expected,
            actual: bytes.len() as u64,
        });
    }
    decode_payload(&header, &bytes[header.header_offset as usize..])
}

/// Decodes a raw payload (without header offset) into a cube.
pub fn decode_payload(header: &EnviHeader, payload: &[u8]) -> Result<HyperCube> {
    let (width, height, n_bands) = (header.samples, header.lines, header.bands);
    let layout = header.layout;
    let size = layout.data_type.size();
    if payload.len() as u64 != header.payload_len() {
        return Err(Error::Contract(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            header.payload_len()
        )));
    }
    let mut values = vec![0.0; width * height * n_bands];
    let dims = (width, height, n_bands);
    for band in 0..n_bands {
        for row in 0..height {
            for col in 0..width {
                let at = layout.interleave.offset(dims, band, row, col) * size;
                let v = decode_sample(&payload[at..at + size], layout);
                values[(band * height + row) * width + col] = v;
            }
        }
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::format(
            "data",
            format!("non-finite sample in band {}", i / (width * height) + 1),
        ));
    }
    HyperCube::new(width, height, n_bands, values)
}

fn decode_sample(b: &[u8], layout: CubeLayout) -> f64 {
    let big = layout.byte_order == ByteOrder::Big;
    match layout.data_type {
        DataType::U8 => b[0] as f64,
        DataType::I16 => {
            let a = [b[0], b[1]];
            (if big {
                i16::from_be_bytes(a)
            } else {
                i16::from_le_bytes(a)
            }) as f64
        }
        DataType::U16 => {
            let a = [b[0], b[1]];
            (if big {
                u16::from_be_bytes(a)
            } else {
                u16::from_le_bytes(a)
            }) as f64
        }
        DataType::F32 => {
            let a = [b[0], b[1], b[2], b[3]];
            (if big {
                f32::from_be_bytes(a)
            } else {
                f32::from_le_bytes(a)
            }) as f64
        }
    }
}

/// Encodes a cube into a raw payload. Integer types round to nearest and
/// reject samples outside the type's range.
pub fn encode_payload(cube: &HyperCube, layout: CubeLayout) -> Result<Vec<u8>> {
    let (width, height, n_bands) = (cube.width, cube.height, cube.n_bands);
    let size = layout.data_type.size();
    let dims = (width, height, n_bands);
    let mut out = vec![0u8; width * height * n_bands * size];
    let big = layout.byte_order == ByteOrder::Big;
    for band in 0..n_bands {
        for row in 0..height {
            for col in 0..width {
                let v = cube.get(band, row, col);
                let at = layout.interleave.offset(dims, band, row, col) * size;
                let dst = &mut out[at..at + size];
                match layout.data_type {
                    DataType::U8 => dst[0] = int_sample(v, 0.0, u8::MAX as f64)? as u8,
                    DataType::I16 => {
                        let x = int_sample(v, i16::MIN as f64, i16::MAX as f64)? as i16;
                        dst.copy_from_slice(&if big {
                            x.to_be_bytes()
                        } else {
                            x.to_le_bytes()
                        });
                    }
                    DataType::U16 => {
                        let x = int_sample(v, 0.0, u16::MAX as f64)? as u16;
                        dst.copy_from_slice(&if big {
                            x.to_be_bytes()
                        } else {
                            x.to_le_bytes()
                        });
                    }
                    DataType::F32 => {
                        let x = v as f32;
                        dst.copy_from_slice(&if big {
                            x.to_be_bytes()
                        } else {
                            x.to_le_bytes()
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn int_sample(v: f64, lo: f64, hi: f64) -> Result<i64> {
    let r = v.round();
    if r < lo || r > hi {
        return Err(Error::Contract(format!(
            "sample {v} does not fit the target integer type"
        )));
    }
    Ok(r as i64)
}

/// Writes `<header_path>` and its payload (the header path without `.hdr`).
/// Returns the payload path.
pub fn write_cube(cube: &HyperCube, header_path: &Path, layout: CubeLayout) -> Result<PathBuf> {
    let header = EnviHeader {
        samples: cube.width,
        lines: cube.height,
        bands: cube.n_bands,
        header_offset: 0,
        layout,
        data_file: None,
    };
    let payload = encode_payload(cube, layout)?;
    let data_path = if header_path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("hdr"))
    {
        header_path.with_extension("")
    } else {
        let mut s = header_path.as_os_str().to_owned();
        s.push(".img");
        PathBuf::from(s)
    };
    kv::write_atomic(&data_path, &payload)?;
    kv::write_atomic(header_path, header.render().as_bytes())?;
    Ok(data_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(w: usize, h: usize, b: usize, il: Interleave, dt: DataType) -> EnviHeader {
        EnviHeader {
            samples: w,
            lines: h,
            bands: b,
            header_offset: 0,
            layout: CubeLayout {
                interleave: il,
                data_type: dt,
                byte_order: ByteOrder::Little,
            },
            data_file: None,
        }
    }

    #[test]
    fn identity_layout_one_band() {
        let cube = decode_payload(
            &header(2, 2, 1, Interleave::Bsq, DataType::U8),
            &[0, 1, 2, 3],
        )
        .unwrap();
        assert_eq!(cube.band(0), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn interleave_is_vacuous_for_one_band() {
        let bytes = [0u8, 1, 2, 3];
        let a = decode_payload(&header(2, 2, 1, Interleave::Bsq, DataType::U8), &bytes).unwrap();
        let b = decode_payload(&header(2, 2, 1, Interleave::Bil, DataType::U8), &bytes).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bip_and_bil_decode_to_band_major() {
        // 2x1 pixels, 2 bands; band0 = (1,2), band1 = (10,20)
        let bip = [1u8, 10, 2, 20];
        let bil = [1u8, 2, 10, 20];
        let c1 = decode_payload(&header(2, 1, 2, Interleave::Bip, DataType::U8), &bip).unwrap();
        let c2 = decode_payload(&header(2, 1, 2, Interleave::Bil, DataType::U8), &bil).unwrap();
        assert_eq!(c1.band(1), &[10.0, 20.0]);
        assert_eq!(c1, c2);
    }

    #[test]
    fn big_endian_u16() {
        let mut h = header(1, 1, 1, Interleave::Bsq, DataType::U16);
        h.layout.byte_order = ByteOrder::Big;
        let cube = decode_payload(&h, &[0x01, 0x02]).unwrap();
        assert_eq!(cube.band(0), &[258.0]);
    }

    #[test]
    fn non_finite_float_rejected() {
        let h = header(1, 1, 1, Interleave::Bsq, DataType::F32);
        let err = decode_payload(&h, &f32::NAN.to_le_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn unsupported_type_code() {
        let kv =
            KeyValues::parse("samples=1\nlines=1\nbands=1\ninterleave=bsq\ndata type=5").unwrap();
        assert!(matches!(
            EnviHeader::from_key_values(&kv).unwrap_err(),
            Error::Unsupported(_)
        ));
    }

    #[test]
    fn missing_field_named() {
        let kv = KeyValues::parse("samples=1\nlines=1\ninterleave=bsq\ndata type=1").unwrap();
        match EnviHeader::from_key_values(&kv).unwrap_err() {
            Error::Format { field, .. } => assert_eq!(field, "bands"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn aviris_sized_header_loads() {
        let dir = tempfile::tempdir().unwrap();
        let hdr = dir.path().join("92av3c.hdr");
        std::fs::write(
            &hdr,
            "ENVI\nsamples = 145\nlines = 145\nbands = 220\ninterleave = bsq\ndata type = 12\nbyte order = 0\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("92av3c"), vec![0u8; 145 * 145 * 220 * 2]).unwrap();
        let cube = load_cube(&hdr).unwrap();
        assert_eq!(
            (cube.width(), cube.height(), cube.n_bands()),
            (145, 145, 220)
        );
    }

    #[test]
    fn truncated_payload_reports_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let hdr = dir.path().join("c.hdr");
        std::fs::write(
            &hdr,
            "samples = 2\nlines = 2\nbands = 1\ninterleave = bsq\ndata type = 2\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("c"), [0u8; 7]).unwrap();
        match load_cube(&hdr).unwrap_err() {
            Error::Truncated {
                expected, actual, ..
            } => assert_eq!((expected, actual), (8, 7)),
            e => panic!("unexpected {e}"),
        }
    }
}
