//! On-disk formats: binary grid dumps, portable bitmaps, CSV curves.
//!
//! All binary formats are little-endian with a 4-byte magic and a u16
//! version. Encoders are pure byte builders, so identical inputs produce
//! identical files.
//!
//! Height dump (`SHPF`): magic, version, width u32, rows u32, lookahead
//! u32, seed u64, spec-JSON (u32 length prefix), then `(width + lookahead)
//! * rows` f64 heights row-major.
//!
//! Slope dump (`SHAF`): magic, version, width u32, rows u32, truncation
//! u32, seed u64, spec-JSON, then `width * rows` f64 slopes row-major.
//!
//! Reconstruction dump (`SHRC`): magic, version, cols u32, rows u32, then
//! `cols * rows` f64 values row-major with NaN outside each row's valid
//! range; row statuses travel in the JSON sidecar next to the file.

use std::fmt;

use shadowperc_core::alpha::LevelSetMask;
use shadowperc_core::reconstruct::{ReconstructionResult, RowStatus};
use shadowperc_core::{DistributionSpec, HeightField};

pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug)]
pub enum FormatError {
    BadMagic { expected: &'static str },
    Truncated,
    Version(u16),
    Spec(String),
    Grid(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::BadMagic { expected } => write!(f, "bad magic, expected {expected}"),
            FormatError::Truncated => write!(f, "file ends mid-record"),
            FormatError::Version(v) => write!(f, "unsupported format version {v}"),
            FormatError::Spec(msg) => write!(f, "bad embedded spec: {msg}"),
            FormatError::Grid(msg) => write!(f, "bad grid payload: {msg}"),
        }
    }
}

impl std::error::Error for FormatError {}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, at: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.at + n > self.bytes.len() {
            return Err(FormatError::Truncated);
        }
        let slice = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(slice)
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64_grid(&mut self, count: usize) -> Result<Vec<f64>, FormatError> {
        let raw = self.take(count * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

fn push_spec(buf: &mut Vec<u8>, spec: &DistributionSpec) {
    let json = serde_json::to_vec(spec).expect("spec serializes");
    buf.extend_from_slice(&(json.len() as u32).to_le_bytes());
    buf.extend_from_slice(&json);
}

fn read_spec(r: &mut Reader) -> Result<DistributionSpec, FormatError> {
    let len = r.u32()? as usize;
    let raw = r.take(len)?;
    serde_json::from_slice(raw).map_err(|e| FormatError::Spec(e.to_string()))
}

fn expect_magic(r: &mut Reader, magic: &'static str) -> Result<(), FormatError> {
    if r.take(4)? != magic.as_bytes() {
        return Err(FormatError::BadMagic { expected: magic });
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::Version(version));
    }
    Ok(())
}

/// Magic of a dump, if recognized.
pub fn sniff_magic(bytes: &[u8]) -> Option<&'static str> {
    ["SHPF", "SHAF", "SHRC"]
        .into_iter()
        .find(|m| bytes.starts_with(m.as_bytes()))
}

pub fn encode_height_field(field: &HeightField) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(b"SHPF");
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&field.width().to_le_bytes());
    buf.extend_from_slice(&field.rows().to_le_bytes());
    buf.extend_from_slice(&field.lookahead().to_le_bytes());
    buf.extend_from_slice(&field.seed().to_le_bytes());
    push_spec(&mut buf, &field.spec());
    for h in field.heights() {
        buf.extend_from_slice(&h.to_le_bytes());
    }
    buf
}

pub fn decode_height_field(bytes: &[u8]) -> Result<HeightField, FormatError> {
    let mut r = Reader::new(bytes);
    expect_magic(&mut r, "SHPF")?;
    let width = r.u32()?;
    let rows = r.u32()?;
    let lookahead = r.u32()?;
    let seed = r.u64()?;
    let spec = read_spec(&mut r)?;
    let cells = (width as u64 + lookahead as u64) * rows as u64;
    let heights = r.f64_grid(cells as usize)?;
    HeightField::from_parts(width, rows, lookahead, spec, seed, heights)
        .map_err(|e| FormatError::Grid(e.to_string()))
}

/// A slope grid as stored on disk; offsets are not serialized because the
/// reconstruction contract forbids using them anyway.
#[derive(Clone, Debug)]
pub struct AlphaDump {
    pub width: u32,
    pub rows: u32,
    pub truncation: u32,
    pub seed: u64,
    pub spec: DistributionSpec,
    pub values: Vec<f64>,
}

impl AlphaDump {
    pub fn from_field(alpha: &shadowperc_core::AlphaField) -> Self {
        Self {
            width: alpha.width(),
            rows: alpha.rows(),
            truncation: alpha.truncation(),
            seed: alpha.source_seed(),
            spec: alpha.source_spec(),
            values: alpha.values().to_vec(),
        }
    }

    pub fn row(&self, j: u32) -> &[f64] {
        let w = self.width as usize;
        &self.values[j as usize * w..(j as usize + 1) * w]
    }
}

pub fn encode_alpha(dump: &AlphaDump) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(b"SHAF");
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&dump.width.to_le_bytes());
    buf.extend_from_slice(&dump.rows.to_le_bytes());
    buf.extend_from_slice(&dump.truncation.to_le_bytes());
    buf.extend_from_slice(&dump.seed.to_le_bytes());
    push_spec(&mut buf, &dump.spec);
    for v in &dump.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

pub fn decode_alpha(bytes: &[u8]) -> Result<AlphaDump, FormatError> {
    let mut r = Reader::new(bytes);
    expect_magic(&mut r, "SHAF")?;
    let width = r.u32()?;
    let rows = r.u32()?;
    let truncation = r.u32()?;
    let seed = r.u64()?;
    let spec = read_spec(&mut r)?;
    let values = r.f64_grid(width as usize * rows as usize)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FormatError::Grid("non-finite slope".into()));
    }
    Ok(AlphaDump {
        width,
        rows,
        truncation,
        seed,
        spec,
        values,
    })
}

pub fn encode_reconstruction(result: &ReconstructionResult) -> Vec<u8> {
    let cols = result.cols;
    let mut buf = Vec::new();
    buf.extend_from_slice(b"SHRC");
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(cols as u32).to_le_bytes());
    buf.extend_from_slice(&(result.rows.len() as u32).to_le_bytes());
    for row in &result.rows {
        for i in 0..cols {
            let v = row.values.get(i).copied().unwrap_or(f64::NAN);
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

pub fn decode_reconstruction_grid(bytes: &[u8]) -> Result<(u32, u32, Vec<f64>), FormatError> {
    let mut r = Reader::new(bytes);
    expect_magic(&mut r, "SHRC")?;
    let cols = r.u32()?;
    let rows = r.u32()?;
    let grid = r.f64_grid(cols as usize * rows as usize)?;
    Ok((cols, rows, grid))
}

/// Sidecar describing each rebuilt row; written next to the `SHRC` dump.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ReconstructionSidecar {
    pub mean_mode: shadowperc_core::MeanMode,
    pub cols: usize,
    pub rows: Vec<RowMeta>,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct RowMeta {
    pub status: RowStatus,
    pub valid_start: usize,
    pub valid_end: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub averaged_over: Option<usize>,
}

pub fn sidecar_for(
    result: &ReconstructionResult,
    mean_mode: shadowperc_core::MeanMode,
) -> ReconstructionSidecar {
    ReconstructionSidecar {
        mean_mode,
        cols: result.cols,
        rows: result
            .rows
            .iter()
            .map(|r| RowMeta {
                status: r.status,
                valid_start: 0,
                valid_end: r.valid_len(),
                averaged_over: r.averaged_over,
            })
            .collect(),
    }
}

/// Plain-text export of a height grid, one row per line, comma-separated
/// west to east. Meant for small fields; the binary dump is the real format.
pub fn heights_csv(field: &HeightField) -> String {
    let mut out = String::new();
    for j in 0..field.rows() {
        let row = field.row(j);
        for (i, h) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&h.to_string());
        }
        out.push('\n');
    }
    out
}

/// One line per scan point:
/// `level,side,axis,N,successes,p_hat,stderr,W,H,L,seed`.
pub fn scan_csv(estimates: &[shadowperc_core::CrossingEstimate]) -> String {
    let mut out = String::from("level,side,axis,N,successes,p_hat,stderr,W,H,L,seed\n");
    for e in estimates {
        let side = match e.side {
            shadowperc_core::Side::Le => "le",
            shadowperc_core::Side::Ge => "ge",
            shadowperc_core::Side::Lt => "lt",
            shadowperc_core::Side::Gt => "gt",
        };
        let axis = match e.axis {
            shadowperc_core::Axis::Horizontal => "horizontal",
            shadowperc_core::Axis::Vertical => "vertical",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            e.level,
            side,
            axis,
            e.samples,
            e.successes,
            e.p_hat,
            e.stderr,
            e.width,
            e.rows,
            e.lookahead,
            e.master_seed
        ));
    }
    out
}

/// P4 portable bitmap of a mask: set bits paint black. One comment line
/// carries the provenance string.
pub fn mask_pbm(mask: &LevelSetMask, comment: &str) -> Vec<u8> {
    let w = mask.width() as usize;
    let h = mask.rows() as usize;
    let mut out = format!("P4\n# {}\n{} {}\n", comment.replace('\n', " "), w, h).into_bytes();
    for j in 0..h {
        let mut byte = 0u8;
        for i in 0..w {
            if mask.get(i as u32, j as u32) {
                byte |= 0x80 >> (i % 8);
            }
            if i % 8 == 7 {
                out.push(byte);
                byte = 0;
            }
        }
        if !w.is_multiple_of(8) {
            out.push(byte);
        }
    }
    out
}

/// P6 portable pixmap from an RGB buffer. One comment line carries the
/// provenance string.
pub fn rgb_ppm(rgb: &[u8], width: u32, rows: u32, comment: &str) -> Vec<u8> {
    assert_eq!(rgb.len(), width as usize * rows as usize * 3);
    let mut out = format!(
        "P6\n# {}\n{} {}\n255\n",
        comment.replace('\n', " "),
        width,
        rows
    )
    .into_bytes();
    out.extend_from_slice(rgb);
    out
}
