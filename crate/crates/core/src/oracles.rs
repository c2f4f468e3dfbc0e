//! Brute-force reference implementations.
//!
//! Everything in this module is written straight from the definitions, with
//! no algorithmic shortcuts and no code shared with the optimized kernels it
//! exists to check. Quadratic cost is fine here; keep instances small.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::alpha::LevelSetMask;
use crate::clusters::{Adjacency, ClusterLabeling};
use crate::dist::DistributionSpec;
use crate::field::HeightField;
use crate::rng::substream;

/// One comparison between a reference value and a candidate.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleReport {
    pub name: String,
    pub instance: String,
    pub reference: f64,
    pub candidate: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(
        name: &str,
        instance: String,
        reference: f64,
        candidate: f64,
        tolerance: f64,
    ) -> Self {
        let abs_diff = (reference - candidate).abs();
        Self {
            name: String::from(name),
            instance,
            reference,
            candidate,
            abs_diff,
            tolerance,
            pass: abs_diff <= tolerance,
        }
    }
}

/// Literal maximum of `(row[u + r] - row[u]) / r` over `r = 1..=r_max`,
/// returning the value and the least maximizing offset.
pub fn brute_alpha(row: &[f64], u: usize, r_max: usize) -> (f64, u32) {
    assert!(r_max >= 1 && u + r_max < row.len(), "horizon out of range");
    let mut best = f64::NEG_INFINITY;
    let mut best_r = 0u32;
    for r in 1..=r_max {
        let slope = (row[u + r] - row[u]) / r as f64;
        if slope > best {
            best = slope;
            best_r = r as u32;
        }
    }
    (best, best_r)
}

/// Literal least argmax of `row[j] - (j - u) * level` over `j > u`.
pub fn brute_t(row: &[f64], u: usize, level: f64) -> usize {
    assert!(u + 1 < row.len(), "suffix is empty");
    let mut best_j = u + 1;
    let mut best = row[best_j] - level;
    for (j, &y) in row.iter().enumerate().skip(u + 2) {
        let v = y - (j - u) as f64 * level;
        if v > best {
            best = v;
            best_j = j;
        }
    }
    best_j
}

/// Breadth-first labeling of a mask; the reference for union-find labeling.
pub fn flood_fill(mask: &LevelSetMask, mode: Adjacency) -> ClusterLabeling {
    let w = mask.width() as i64;
    let h = mask.rows() as i64;
    let bits = mask.bits();
    let mut labels = alloc::vec![0u32; bits.len()];
    let mut next_label = 0u32;
    let neighbors: &[(i64, i64)] = match mode {
        Adjacency::Orthogonal => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        Adjacency::Star => &[
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ],
    };
    let mut queue = VecDeque::new();
    for start in 0..bits.len() {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        next_label += 1;
        labels[start] = next_label;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (i, j) = ((idx as i64) % w, (idx as i64) / w);
            for &(di, dj) in neighbors {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= w || nj >= h {
                    continue;
                }
                let nidx = (nj * w + ni) as usize;
                if bits[nidx] && labels[nidx] == 0 {
                    labels[nidx] = next_label;
                    queue.push_back(nidx);
                }
            }
        }
    }
    ClusterLabeling::from_labels(mask.width(), mask.rows(), mode, labels)
}

/// Monte Carlo frequency of every one of the `n!` orderings of `n` i.i.d.
/// draws; all should sit near `1 / n!`. Reports the worst deviation against
/// a five-sigma multinomial tolerance. Panics for `n` outside `2..=6`.
pub fn ordering_symmetry_check(
    n: u32,
    spec: DistributionSpec,
    samples: u64,
    seed: u64,
) -> OracleReport {
    assert!((2..=6).contains(&n), "orderings are enumerated up to n = 6");
    let mut fact = 1usize;
    for k in 2..=n as usize {
        fact *= k;
    }
    let mut counts = alloc::vec![0u64; fact];
    let mut rng = substream(seed, 0);
    let mut draws = alloc::vec![0.0f64; n as usize];
    for _ in 0..samples {
        for d in draws.iter_mut() {
            *d = spec.sample(&mut rng);
        }
        counts[permutation_index(&draws)] += 1;
    }
    let p = 1.0 / fact as f64;
    let worst = counts
        .iter()
        .map(|&c| (c as f64 / samples as f64 - p).abs())
        .fold(0.0f64, f64::max);
    let tolerance = 5.0 * libm::sqrt(p * (1.0 - p) / samples as f64);
    OracleReport::new(
        "ordering_symmetry",
        format!("n={n}, samples={samples}, seed={seed}"),
        0.0,
        worst,
        tolerance,
    )
}

/// Lehmer index of the ranking pattern of `values`: mixed-radix digits
/// count how many later entries are smaller. Ties break by position, a null
/// event for laws with densities.
fn permutation_index(values: &[f64]) -> usize {
    let n = values.len();
    let mut index = 0usize;
    for i in 0..n {
        let digit = (i + 1..n).filter(|&j| values[j] < values[i]).count();
        index = index * (n - i) + digit;
    }
    index
}

/// Two height fields that differ by more than a constant yet produce the
/// same shadow slopes on every window column except the one just west of
/// the step, where a finite horizon sees the never-attained zero slope.
///
/// Field one is identically zero; field two is one west of the step column
/// `width / 2` and zero from there on. Slopes of both vanish on all other
/// window columns, exhibiting that slopes cannot pin heights beyond a
/// constant.
pub fn counterexample_pair(width: u32) -> (HeightField, HeightField) {
    assert!(width >= 2, "need at least two columns");
    let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
    let cols = (2 * width) as usize;
    let flat = HeightField::from_parts(width, 1, width, spec, 0, alloc::vec![0.0; cols])
        .expect("fixture dimensions are consistent");
    let step_at = (width / 2) as usize;
    let step_row: Vec<f64> = (0..cols)
        .map(|i| if i < step_at { 1.0 } else { 0.0 })
        .collect();
    let step = HeightField::from_parts(width, 1, width, spec, 0, step_row)
        .expect("fixture dimensions are consistent");
    (flat, step)
}
