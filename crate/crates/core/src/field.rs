//! The i.i.d. height field on a finite lattice window.
//!
//! The window has `width` columns where shadow slopes will be evaluated plus
//! `lookahead` margin columns to the east that only ever *cast* shadows.
//! Rows are mutually independent, each generated from its own substream of
//! the field seed, so generation can be sharded by row without changing a
//! single byte of output.

use alloc::vec::Vec;

use crate::dist::DistributionSpec;
use crate::rng::{substream, Xoshiro256PlusPlus};

/// Hard ceiling on `(width + lookahead) * rows`; 2^28 cells is 2 GiB of f64.
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    /// The requested grid exceeds the cell budget.
    Capacity { requested: u64, budget: u64 },
    /// Raw grid data did not match the declared dimensions.
    Shape { expected: u64, got: u64 },
    /// Raw grid data contained a non-finite height.
    NonFinite { index: usize },
}

impl core::fmt::Display for FieldError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FieldError::Capacity { requested, budget } => {
                write!(f, "field of {requested} cells exceeds budget of {budget}")
            }
            FieldError::Shape { expected, got } => {
                write!(f, "expected {expected} heights, got {got}")
            }
            FieldError::NonFinite { index } => {
                write!(f, "non-finite height at flat index {index}")
            }
        }
    }
}

impl core::error::Error for FieldError {}

/// Seeded grid of i.i.d. heights over `(width + lookahead) x rows` cells.
///
/// Entry `(i, j)` for `0 <= i < width + lookahead`, `0 <= j < rows` is the
/// height at column `i` of row `j`, stored row-major. Immutable once built.
#[derive(Clone, Debug)]
pub struct HeightField {
    width: u32,
    rows: u32,
    lookahead: u32,
    seed: u64,
    spec: DistributionSpec,
    heights: Vec<f64>,
}

impl HeightField {
    /// Samples a fresh field with the default cell budget.
    pub fn generate(
        width: u32,
        rows: u32,
        lookahead: u32,
        spec: DistributionSpec,
        seed: u64,
    ) -> Result<Self, FieldError> {
        Self::generate_with_budget(width, rows, lookahead, spec, seed, DEFAULT_CELL_BUDGET)
    }

    pub fn generate_with_budget(
        width: u32,
        rows: u32,
        lookahead: u32,
        spec: DistributionSpec,
        seed: u64,
        budget: u64,
    ) -> Result<Self, FieldError> {
        assert!(width >= 1 && rows >= 1 && lookahead >= 1, "degenerate window");
        let cols = width as u64 + lookahead as u64;
        let cells = cols * rows as u64;
        if cells > budget {
            return Err(FieldError::Capacity {
                requested: cells,
                budget,
            });
        }
        let cols = cols as usize;
        let mut heights = alloc::vec![0.0f64; cells as usize];
        for j in 0..rows as usize {
            Self::fill_row(&spec, seed, j as u64, &mut heights[j * cols..(j + 1) * cols]);
        }
        Ok(Self {
            width,
            rows,
            lookahead,
            seed,
            spec,
            heights,
        })
    }

    /// Fills one row from its substream. This is *the* definition of the
    /// field's content: any generation strategy (sequential, row-parallel)
    /// must call this per row to stay byte-identical.
    pub fn fill_row(spec: &DistributionSpec, field_seed: u64, row_index: u64, out: &mut [f64]) {
        let mut rng: Xoshiro256PlusPlus = substream(field_seed, row_index);
        for slot in out {
            *slot = spec.sample(&mut rng);
        }
    }

    /// Wraps an existing grid (file loads, fixtures). Length and finiteness
    /// are checked; statistical provenance is whatever the caller says.
    pub fn from_parts(
        width: u32,
        rows: u32,
        lookahead: u32,
        spec: DistributionSpec,
        seed: u64,
        heights: Vec<f64>,
    ) -> Result<Self, FieldError> {
        assert!(width >= 1 && rows >= 1 && lookahead >= 1, "degenerate window");
        let expected = (width as u64 + lookahead as u64) * rows as u64;
        if heights.len() as u64 != expected {
            return Err(FieldError::Shape {
                expected,
                got: heights.len() as u64,
            });
        }
        if let Some(index) = heights.iter().position(|h| !h.is_finite()) {
            return Err(FieldError::NonFinite { index });
        }
        Ok(Self {
            width,
            rows,
            lookahead,
            seed,
            spec,
            heights,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn lookahead(&self) -> u32 {
        self.lookahead
    }

    /// Total stored columns, `width + lookahead`.
    pub fn total_cols(&self) -> u32 {
        self.width + self.lookahead
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> DistributionSpec {
        self.spec
    }

    /// Read-only view of row `j`, west to east, length `width + lookahead`.
    ///
    /// Panics if `j` is out of range.
    pub fn row(&self, j: u32) -> &[f64] {
        assert!(j < self.rows, "row {j} out of range (rows = {})", self.rows);
        let cols = self.total_cols() as usize;
        &self.heights[j as usize * cols..(j as usize + 1) * cols]
    }

    /// Height at column `i` of row `j`. Panics if out of range.
    pub fn height_at(&self, i: u32, j: u32) -> f64 {
        assert!(
            i < self.total_cols(),
            "column {i} out of range (cols = {})",
            self.total_cols()
        );
        self.row(j)[i as usize]
    }

    /// The whole grid, row-major.
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }
}
