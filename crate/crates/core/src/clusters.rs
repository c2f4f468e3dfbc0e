//! Connected components of level-set masks and crossing statistics.
//!
//! Labeling runs union-find with path halving and union by size over a
//! deterministic row-major scan, then renumbers roots in first-touch order,
//! so label IDs are reproducible. "Percolates" on a finite window means a
//! single cluster touches both opposite edges of the chosen axis.

use alloc::vec::Vec;

use crate::alpha::{compute_alpha, LevelSetMask, Side};
use crate::dist::DistributionSpec;
use crate::field::{FieldError, HeightField};
use crate::rng::substream_seed;

/// Lattice adjacency: 4 orthogonal neighbors, or all 8 (star).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Adjacency {
    #[cfg_attr(feature = "serde", serde(rename = "orth"))]
    Orthogonal,
    Star,
}

/// Crossing direction: horizontal joins the left and right edges, vertical
/// the top and bottom ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Disjoint-set forest over flat cell indices.
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: alloc::vec![1; n],
        }
    }

    pub fn find(&mut self, mut i: u32) -> u32 {
        // Path halving.
        while self.parent[i as usize] != i {
            let grand = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = grand;
            i = grand;
        }
        i
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        // Union by size; ties attach the larger index under the smaller.
        let (big, small) = if self.size[ra as usize] > self.size[rb as usize]
            || (self.size[ra as usize] == self.size[rb as usize] && ra < rb)
        {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }
}

/// Component labels of a mask; 0 is background, clusters count from 1 in
/// first-touch scan order.
#[derive(Clone, Debug)]
pub struct ClusterLabeling {
    width: u32,
    rows: u32,
    mode: Adjacency,
    labels: Vec<u32>,
    /// sizes[k] is the cell count of label k + 1.
    sizes: Vec<u64>,
}

impl ClusterLabeling {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn mode(&self) -> Adjacency {
        self.mode
    }

    pub fn label(&self, u: u32, j: u32) -> u32 {
        assert!(u < self.width && j < self.rows, "cell out of range");
        self.labels[j as usize * self.width as usize + u as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn cluster_count(&self) -> u32 {
        self.sizes.len() as u32
    }

    /// Cell count of `label` (1-based). Panics for background or unknown
    /// labels.
    pub fn size_of(&self, label: u32) -> u64 {
        assert!(label >= 1 && (label as usize) <= self.sizes.len());
        self.sizes[label as usize - 1]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Builds a labeling from a dense label grid (0 = background, clusters
    /// numbered from 1 with no holes). Sizes are tallied here.
    pub fn from_labels(width: u32, rows: u32, mode: Adjacency, labels: Vec<u32>) -> Self {
        assert_eq!(labels.len(), width as usize * rows as usize);
        let max = labels.iter().copied().max().unwrap_or(0);
        let mut sizes = alloc::vec![0u64; max as usize];
        for &label in &labels {
            if label > 0 {
                sizes[label as usize - 1] += 1;
            }
        }
        assert!(sizes.iter().all(|&s| s > 0), "label numbering has holes");
        Self {
            width,
            rows,
            mode,
            labels,
            sizes,
        }
    }

    /// True when both labelings cut the set cells into the same clusters;
    /// label IDs are allowed to differ.
    pub fn same_partition(&self, other: &ClusterLabeling) -> bool {
        if self.width != other.width || self.rows != other.rows {
            return false;
        }
        let n_mine = self.sizes.len();
        let n_theirs = other.sizes.len();
        if n_mine != n_theirs {
            return false;
        }
        let mut mine_to_theirs = alloc::vec![0u32; n_mine + 1];
        let mut theirs_to_mine = alloc::vec![0u32; n_theirs + 1];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            if (a == 0) != (b == 0) {
                return false;
            }
            if a == 0 {
                continue;
            }
            if mine_to_theirs[a as usize] == 0 {
                mine_to_theirs[a as usize] = b;
            } else if mine_to_theirs[a as usize] != b {
                return false;
            }
            if theirs_to_mine[b as usize] == 0 {
                theirs_to_mine[b as usize] = a;
            } else if theirs_to_mine[b as usize] != a {
                return false;
            }
        }
        true
    }
}

const ORTH_BACK: [(i64, i64); 2] = [(-1, 0), (0, -1)];
const STAR_BACK: [(i64, i64); 4] = [(-1, 0), (-1, -1), (0, -1), (1, -1)];

/// Labels the set cells of `mask` under `mode`.
pub fn label_clusters(mask: &LevelSetMask, mode: Adjacency) -> ClusterLabeling {
    let w = mask.width() as usize;
    let h = mask.rows() as usize;
    let bits = mask.bits();
    let mut uf = UnionFind::new(w * h);
    let back: &[(i64, i64)] = match mode {
        Adjacency::Orthogonal => &ORTH_BACK,
        Adjacency::Star => &STAR_BACK,
    };
    for j in 0..h {
        for i in 0..w {
            let idx = j * w + i;
            if !bits[idx] {
                continue;
            }
            for &(di, dj) in back {
                let ni = i as i64 + di;
                let nj = j as i64 + dj;
                if ni < 0 || nj < 0 || ni >= w as i64 {
                    continue;
                }
                let nidx = nj as usize * w + ni as usize;
                if bits[nidx] {
                    uf.union(idx as u32, nidx as u32);
                }
            }
        }
    }
    let mut labels = alloc::vec![0u32; w * h];
    let mut root_label = alloc::vec![0u32; w * h];
    let mut sizes: Vec<u64> = Vec::new();
    for idx in 0..w * h {
        if !bits[idx] {
            continue;
        }
        let root = uf.find(idx as u32) as usize;
        if root_label[root] == 0 {
            sizes.push(0);
            root_label[root] = sizes.len() as u32;
        }
        let label = root_label[root];
        labels[idx] = label;
        sizes[label as usize - 1] += 1;
    }
    ClusterLabeling {
        width: mask.width(),
        rows: mask.rows(),
        mode,
        labels,
        sizes,
    }
}

/// True when one cluster touches both opposite edges along `axis`.
pub fn has_crossing(labeling: &ClusterLabeling, axis: Axis) -> bool {
    let w = labeling.width as usize;
    let h = labeling.rows as usize;
    let n = labeling.sizes.len();
    if n == 0 {
        return false;
    }
    let mut near = alloc::vec![false; n + 1];
    let mut far = alloc::vec![false; n + 1];
    match axis {
        Axis::Horizontal => {
            for j in 0..h {
                near[labeling.labels[j * w] as usize] = true;
                far[labeling.labels[j * w + w - 1] as usize] = true;
            }
        }
        Axis::Vertical => {
            for i in 0..w {
                near[labeling.labels[i] as usize] = true;
                far[labeling.labels[(h - 1) * w + i] as usize] = true;
            }
        }
    }
    (1..=n).any(|k| near[k] && far[k])
}

/// Largest cluster by size, ties to the least label. `None` on empty masks.
pub fn largest_cluster(labeling: &ClusterLabeling) -> Option<(u32, u64)> {
    labeling
        .sizes
        .iter()
        .enumerate()
        .max_by(|(ia, sa), (ib, sb)| sa.cmp(sb).then(ib.cmp(ia)))
        .map(|(i, &s)| (i as u32 + 1, s))
}

/// One Monte Carlo crossing estimate.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossingEstimate {
    pub level: f64,
    pub side: Side,
    pub axis: Axis,
    pub samples: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub stderr: f64,
    pub width: u32,
    pub rows: u32,
    pub lookahead: u32,
    pub master_seed: u64,
}

impl CrossingEstimate {
    #[allow(clippy::too_many_arguments)]
    fn from_counts(
        level: f64,
        side: Side,
        axis: Axis,
        samples: u64,
        successes: u64,
        width: u32,
        rows: u32,
        lookahead: u32,
        master_seed: u64,
    ) -> Self {
        let p_hat = successes as f64 / samples as f64;
        let stderr = libm::sqrt(p_hat * (1.0 - p_hat) / samples as f64);
        Self {
            level,
            side,
            axis,
            samples,
            successes,
            p_hat,
            stderr,
            width,
            rows,
            lookahead,
            master_seed,
        }
    }
}

/// Crossing indicators of one sampled field at each level.
///
/// This is the per-sample kernel behind [`scan_levels`]; the field and its
/// slopes are computed once and every level reuses them, which is what makes
/// common-random-number scans pathwise monotone. Exposed so external drivers
/// (e.g. a thread pool) can reproduce the sequential results sample by
/// sample.
#[allow(clippy::too_many_arguments)]
pub fn sample_level_indicators(
    spec: DistributionSpec,
    width: u32,
    rows: u32,
    lookahead: u32,
    levels: &[f64],
    side: Side,
    axis: Axis,
    mode: Adjacency,
    sample_seed: u64,
) -> Result<Vec<bool>, FieldError> {
    let field = HeightField::generate(width, rows, lookahead, spec, sample_seed)?;
    let alpha = compute_alpha(&field);
    let mut out = Vec::with_capacity(levels.len());
    for &level in levels {
        let mask = alpha.level_set(level, side);
        let labeling = label_clusters(&mask, mode);
        out.push(has_crossing(&labeling, axis));
    }
    Ok(out)
}

/// Seed of Monte Carlo sample `index` under `master_seed`.
pub fn sample_seed(master_seed: u64, index: u64) -> u64 {
    substream_seed(master_seed, index)
}

/// Crossing probability curve over `levels` with common random numbers: the
/// same per-sample fields serve every level, so `Le` curves are monotone
/// nondecreasing sample by sample (and `Ge` curves nonincreasing), not just
/// in expectation.
///
/// Panics if `levels` is empty or unsorted; `samples >= 1` required.
#[allow(clippy::too_many_arguments)]
pub fn scan_levels(
    spec: DistributionSpec,
    width: u32,
    rows: u32,
    lookahead: u32,
    levels: &[f64],
    side: Side,
    axis: Axis,
    mode: Adjacency,
    samples: u64,
    master_seed: u64,
) -> Result<Vec<CrossingEstimate>, FieldError> {
    assert!(!levels.is_empty(), "need at least one level");
    assert!(
        levels.windows(2).all(|w| w[0] <= w[1]),
        "levels must be sorted ascending"
    );
    assert!(samples >= 1, "need at least one sample");
    let mut successes = alloc::vec![0u64; levels.len()];
    for s in 0..samples {
        let indicators = sample_level_indicators(
            spec,
            width,
            rows,
            lookahead,
            levels,
            side,
            axis,
            mode,
            sample_seed(master_seed, s),
        )?;
        for (count, hit) in successes.iter_mut().zip(indicators) {
            *count += hit as u64;
        }
    }
    Ok(successes
        .into_iter()
        .zip(levels)
        .map(|(k, &level)| {
            CrossingEstimate::from_counts(
                level,
                side,
                axis,
                samples,
                k,
                width,
                rows,
                lookahead,
                master_seed,
            )
        })
        .collect())
}

/// Single-level crossing estimate; see [`scan_levels`].
#[allow(clippy::too_many_arguments)]
pub fn estimate_crossing(
    spec: DistributionSpec,
    width: u32,
    rows: u32,
    lookahead: u32,
    level: f64,
    side: Side,
    axis: Axis,
    mode: Adjacency,
    samples: u64,
    master_seed: u64,
) -> Result<CrossingEstimate, FieldError> {
    let mut curve = scan_levels(
        spec,
        width,
        rows,
        lookahead,
        &[level],
        side,
        axis,
        mode,
        samples,
        master_seed,
    )?;
    Ok(curve.pop().expect("one level in, one estimate out"))
}
