//! Rayon drivers that reproduce the sequential results byte for byte.
//!
//! Rows and Monte Carlo samples each draw from their own substream, so
//! sharding them over threads changes nothing; tests pin the equality.

use rayon::prelude::*;
use shadowperc_core::clusters::{sample_level_indicators, sample_seed, CrossingEstimate};
use shadowperc_core::field::FieldError;
use shadowperc_core::{Adjacency, Axis, DistributionSpec, HeightField, Side};

/// Row-parallel field generation; equals `HeightField::generate` exactly.
pub fn generate_parallel(
    width: u32,
    rows: u32,
    lookahead: u32,
    spec: DistributionSpec,
    seed: u64,
) -> Result<HeightField, FieldError> {
    let cols = width as usize + lookahead as usize;
    let cells = cols.checked_mul(rows as usize).expect("cell count fits usize");
    if cells as u64 > shadowperc_core::field::DEFAULT_CELL_BUDGET {
        return Err(FieldError::Capacity {
            requested: cells as u64,
            budget: shadowperc_core::field::DEFAULT_CELL_BUDGET,
        });
    }
    let mut heights = vec![0.0f64; cells];
    heights
        .par_chunks_mut(cols)
        .enumerate()
        .for_each(|(j, row)| HeightField::fill_row(&spec, seed, j as u64, row));
    HeightField::from_parts(width, rows, lookahead, spec, seed, heights)
}

/// Sample-parallel level scan; same seeds, same counts, same estimates as
/// the sequential scan.
#[allow(clippy::too_many_arguments)]
pub fn scan_levels_parallel(
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
    let successes = (0..samples)
        .into_par_iter()
        .map(|s| {
            sample_level_indicators(
                spec,
                width,
                rows,
                lookahead,
                levels,
                side,
                axis,
                mode,
                sample_seed(master_seed, s),
            )
        })
        .try_fold(
            || vec![0u64; levels.len()],
            |mut acc, indicators| {
                for (slot, hit) in acc.iter_mut().zip(indicators?) {
                    *slot += hit as u64;
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; levels.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(successes
        .into_iter()
        .zip(levels)
        .map(|(k, &level)| {
            let p_hat = k as f64 / samples as f64;
            CrossingEstimate {
                level,
                side,
                axis,
                samples,
                successes: k,
                p_hat,
                stderr: (p_hat * (1.0 - p_hat) / samples as f64).sqrt(),
                width,
                rows,
                lookahead,
                master_seed,
            }
        })
        .collect())
}
