//! The shadow-slope field and its level sets.
//!
//! For a height row `y` the shadow slope at column `u` is the largest
//! eastward difference slope `(y[u+r] - y[u]) / r` over the truncation
//! horizon `1 <= r <= L`. A cell sees a sun of ray slope `level` exactly
//! when its shadow slope is `<= level`, so sublevel sets of this field are
//! the lit sets and superlevel sets are the shadowed ones.
//!
//! Two kernels produce the same numbers: a literal `O(n * R)` maximum
//! ([`alpha_row_naive`]) and an `O(n log n)` right-to-left sweep over the
//! upper convex hull of the points seen so far ([`alpha_row_hull`]), which
//! serves the full-suffix case. Ties always resolve to the smallest offset.

use alloc::vec::Vec;

use crate::dist::DistributionSpec;
use crate::field::HeightField;

/// Comparison side selecting a level set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Side {
    /// `alpha <= level`: the lit set.
    Le,
    /// `alpha >= level`: the shadowed set.
    Ge,
    /// `alpha < level`.
    Lt,
    /// `alpha > level`.
    Gt,
}

impl Side {
    /// Exact floating-point comparison; boundary ties are genuine ties.
    pub fn admits(self, alpha: f64, level: f64) -> bool {
        match self {
            Side::Le => alpha <= level,
            Side::Ge => alpha >= level,
            Side::Lt => alpha < level,
            Side::Gt => alpha > level,
        }
    }
}

/// Truncated shadow slopes over the evaluation window, with the least
/// maximizer offset per cell and generation provenance.
#[derive(Clone, Debug)]
pub struct AlphaField {
    width: u32,
    rows: u32,
    truncation: u32,
    values: Vec<f64>,
    offsets: Vec<u32>,
    source_seed: u64,
    source_spec: DistributionSpec,
}

impl AlphaField {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    /// The horizon `L` the maxima were taken over.
    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn source_seed(&self) -> u64 {
        self.source_seed
    }

    pub fn source_spec(&self) -> DistributionSpec {
        self.source_spec
    }

    /// Slope values of row `j`, length `width`.
    pub fn row(&self, j: u32) -> &[f64] {
        assert!(j < self.rows, "row {j} out of range");
        let w = self.width as usize;
        &self.values[j as usize * w..(j as usize + 1) * w]
    }

    /// Least maximizer offsets of row `j`, each in `[1, truncation]`.
    pub fn offsets_row(&self, j: u32) -> &[u32] {
        assert!(j < self.rows, "row {j} out of range");
        let w = self.width as usize;
        &self.offsets[j as usize * w..(j as usize + 1) * w]
    }

    pub fn value(&self, u: u32, j: u32) -> f64 {
        assert!(u < self.width, "column {u} out of range");
        self.row(j)[u as usize]
    }

    pub fn offset(&self, u: u32, j: u32) -> u32 {
        assert!(u < self.width, "column {u} out of range");
        self.offsets_row(j)[u as usize]
    }

    /// Whole value grid, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when the cell sees a sun of ray slope `level`, i.e. its shadow
    /// slope is at most `level`. Panics on NaN levels.
    pub fn is_lit(&self, u: u32, j: u32, level: f64) -> bool {
        assert!(!level.is_nan(), "level must not be NaN");
        self.value(u, j) <= level
    }

    /// Bit mask of the cells whose slope satisfies `side` at `level`.
    pub fn level_set(&self, level: f64, side: Side) -> LevelSetMask {
        LevelSetMask::from_values(&self.values, self.width, self.rows, level, side)
    }
}

/// Bit grid of one level-set comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetMask {
    width: u32,
    rows: u32,
    level: f64,
    side: Side,
    bits: Vec<bool>,
}

impl LevelSetMask {
    pub fn from_values(values: &[f64], width: u32, rows: u32, level: f64, side: Side) -> Self {
        assert!(!level.is_nan(), "level must not be NaN");
        assert_eq!(values.len(), width as usize * rows as usize);
        let bits = values.iter().map(|&a| side.admits(a, level)).collect();
        Self {
            width,
            rows,
            level,
            side,
            bits,
        }
    }

    /// Builds a mask directly from bits (fixtures, oracle tests).
    pub fn from_bits(bits: Vec<bool>, width: u32, rows: u32, level: f64, side: Side) -> Self {
        assert_eq!(bits.len(), width as usize * rows as usize);
        Self {
            width,
            rows,
            level,
            side,
            bits,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn get(&self, u: u32, j: u32) -> bool {
        assert!(u < self.width && j < self.rows, "cell out of range");
        self.bits[j as usize * self.width as usize + u as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Literal per-cell maximum over offsets `1..=r_max`; the reference kernel.
///
/// Returns slope values and least maximizer offsets for every column with a
/// full horizon, i.e. `u` in `[0, n - r_max)`. Panics unless
/// `1 <= r_max < n`.
pub fn alpha_row_naive(row: &[f64], r_max: usize) -> (Vec<f64>, Vec<u32>) {
    let n = row.len();
    assert!(r_max >= 1 && r_max < n, "need 1 <= r_max < row length");
    let cells = n - r_max;
    let mut values = Vec::with_capacity(cells);
    let mut offsets = Vec::with_capacity(cells);
    for u in 0..cells {
        let (v, r) = alpha_at(row, u, r_max);
        values.push(v);
        offsets.push(r);
    }
    (values, offsets)
}

/// Shadow slope of one cell: max difference slope from `u` over offsets
/// `1..=r_max`, least offset winning ties. `row[u + r_max]` must exist.
#[inline]
pub fn alpha_at(row: &[f64], u: usize, r_max: usize) -> (f64, u32) {
    let base = row[u];
    let mut best = f64::NEG_INFINITY;
    let mut best_r = 0u32;
    for r in 1..=r_max {
        let slope = (row[u + r] - base) / r as f64;
        if slope > best {
            best = slope;
            best_r = r as u32;
        }
    }
    (best, best_r)
}

/// Full-suffix slopes for every `u` in `[0, n - 1)` in `O(n log n)`.
///
/// Sweeps right to left maintaining the upper convex hull of the points
/// `(v, row[v])` already passed. The best shadow caster for `u` is a hull
/// vertex, and slopes from `u` to consecutive hull vertices rise then fall,
/// so a binary search on the first non-increasing step finds the leftmost
/// maximizer — which matches the naive kernel's least-offset tie rule
/// because collinear hull points are popped keeping their left endpoint.
pub fn alpha_row_hull(row: &[f64]) -> (Vec<f64>, Vec<u32>) {
    let n = row.len();
    assert!(n >= 2, "need at least two columns");
    let mut values = alloc::vec![0.0f64; n - 1];
    let mut offsets = alloc::vec![0u32; n - 1];
    // Hull vertices by column index; last element is the leftmost vertex.
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    let slope = |a: usize, b: usize| (row[b] - row[a]) / (b - a) as f64;
    // cross(o, p, q) > 0 iff p lies strictly below segment o-q (o < p < q).
    let cross = |o: usize, p: usize, q: usize| {
        (p - o) as f64 * (row[q] - row[o]) - (q - o) as f64 * (row[p] - row[o])
    };
    for u in (0..n - 1).rev() {
        let v = u + 1;
        while hull.len() >= 2 {
            let p = hull[hull.len() - 1];
            let q = hull[hull.len() - 2];
            // Pop p when it is on or below the chord v-q.
            if cross(v, p, q) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(v);
        // Binary search for the first index where the slope stops rising.
        let len = hull.len();
        let at = |i: usize| hull[len - 1 - i]; // logical order, left to right
        let mut lo = 0usize;
        let mut hi = len - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if slope(u, at(mid + 1)) > slope(u, at(mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let arg = at(lo);
        values[u] = slope(u, arg);
        offsets[u] = (arg - u) as u32;
    }
    (values, offsets)
}

/// Shadow slopes of every cell in the evaluation window.
///
/// Row `j`, column `u` gets the maximum slope over offsets `1..=L`, all of
/// which land inside the stored grid because the margin columns exist for
/// exactly this purpose. Margin columns themselves receive no value.
pub fn compute_alpha(field: &HeightField) -> AlphaField {
    let w = field.width() as usize;
    let l = field.lookahead() as usize;
    let rows = field.rows();
    let mut values = Vec::with_capacity(w * rows as usize);
    let mut offsets = Vec::with_capacity(w * rows as usize);
    for j in 0..rows {
        let row = field.row(j);
        for u in 0..w {
            let (v, r) = alpha_at(row, u, l);
            values.push(v);
            offsets.push(r);
        }
    }
    AlphaField {
        width: field.width(),
        rows,
        truncation: field.lookahead(),
        values,
        offsets,
        source_seed: field.seed(),
        source_spec: field.spec(),
    }
}

/// True when the peak at `j` puts the peak at `i` in shadow under ray slope
/// `level`: strictly, `row[j] > row[i] + (j - i) * level`. Panics unless
/// `i < j`.
pub fn casts_shadow(row: &[f64], i: usize, j: usize, level: f64) -> bool {
    assert!(i < j && j < row.len(), "need i < j < row length");
    row[j] > row[i] + (j - i) as f64 * level
}

/// Least `j > i` maximizing `row[j] - (j - i) * level` over the suffix, the
/// index of the principal shadow caster for `i`. `None` iff the suffix is
/// empty.
pub fn t_level_index(row: &[f64], i: usize, level: f64) -> Option<usize> {
    let n = row.len();
    if i + 1 >= n {
        return None;
    }
    let mut best_j = i + 1;
    let mut best = row[best_j] - level;
    for (j, &y) in row.iter().enumerate().skip(i + 2) {
        let v = y - (j - i) as f64 * level;
        if v > best {
            best = v;
            best_j = j;
        }
    }
    Some(best_j)
}

/// Fraction of window cells whose lit status at `level` differs between
/// truncations `l1 <= l2` on the same heights. Growing the horizon can only
/// push a lit cell into shadow, never the reverse.
///
/// Panics if `l2` exceeds the field's lookahead or `l1 > l2`.
pub fn truncation_stability(field: &HeightField, level: f64, l1: u32, l2: u32) -> f64 {
    assert!(l1 >= 1 && l1 <= l2, "need 1 <= l1 <= l2");
    assert!(
        l2 <= field.lookahead(),
        "truncation {l2} exceeds lookahead {}",
        field.lookahead()
    );
    let w = field.width() as usize;
    let mut flipped = 0u64;
    for j in 0..field.rows() {
        let row = field.row(j);
        for u in 0..w {
            let (short, _) = alpha_at(row, u, l1 as usize);
            if short > level {
                // Already shadowed at l1; a longer horizon cannot relight it.
                continue;
            }
            let base = row[u];
            let mut long = short;
            for r in l1 as usize + 1..=l2 as usize {
                let s = (row[u + r] - base) / r as f64;
                if s > long {
                    long = s;
                }
            }
            if long > level {
                flipped += 1;
            }
        }
    }
    flipped as f64 / (w as f64 * field.rows() as f64)
}
