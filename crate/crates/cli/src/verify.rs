//! The `verify-bounds` suite and the oracle `selftest`.
//!
//! Each bound check pits a closed form or explicit bound against a seeded
//! Monte Carlo estimate and reports `{name, reference, estimate, stderr,
//! pass}`; the process exits nonzero when any check fails.

use serde::Serialize;
use shadowperc_core::alpha::{alpha_row_hull, alpha_row_naive, LevelSetMask, Side};
use shadowperc_core::analysis::{
    gaussian_point_bound, mc_ordering_with_slack, mc_shadow_set_probability,
    mc_truncated_nonpositive, peierls_circuit_partial_sum, peierls_circuit_sum,
    shadow_set_bound,
};
use shadowperc_core::clusters::{label_clusters, Adjacency};
use shadowperc_core::oracles::{flood_fill, ordering_symmetry_check, OracleReport};
use shadowperc_core::rng::substream;
use shadowperc_core::DistributionSpec;

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// The closed-form value or bound being tested against.
    pub reference: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub seed: u64,
    pub checks: Vec<BoundCheck>,
    pub all_pass: bool,
}

fn equality_check(name: &str, target: f64, est: shadowperc_core::analysis::McEstimate) -> BoundCheck {
    let stderr = est.stderr();
    // Four-sigma two-sided window around an exact identity.
    let sigma = (target * (1.0 - target) / est.samples as f64).sqrt();
    BoundCheck {
        name: name.into(),
        reference: target,
        estimate: est.p_hat(),
        stderr,
        pass: (est.p_hat() - target).abs() <= 4.0 * sigma,
    }
}

fn upper_bound_check(
    name: &str,
    bound: f64,
    est: shadowperc_core::analysis::McEstimate,
) -> BoundCheck {
    let stderr = est.stderr();
    BoundCheck {
        name: name.into(),
        reference: bound,
        estimate: est.p_hat(),
        stderr,
        pass: est.p_hat() <= bound + 4.0 * stderr,
    }
}

/// Runs the default bound suite with substreams of `seed`.
pub fn run_bound_checks(seed: u64) -> BoundReport {
    let gauss = DistributionSpec::gaussian(0.0, 1.0).expect("valid parameters");
    let mut checks = Vec::new();

    for r0 in 1..=8u32 {
        let est = mc_truncated_nonpositive(
            gauss,
            r0,
            200_000,
            shadowperc_core::rng::substream_seed(seed, r0 as u64),
        );
        checks.push(equality_check(
            &format!("truncated_nonpositive_r0_{r0}"),
            1.0 / (r0 as f64 + 1.0),
            est,
        ));
    }

    for n in 2..=6u32 {
        let est = mc_ordering_with_slack(
            n,
            0.0,
            gauss,
            1_000_000,
            shadowperc_core::rng::substream_seed(seed, 100 + n as u64),
        );
        let mut fact = 1.0f64;
        for k in 2..=n {
            fact *= k as f64;
        }
        checks.push(equality_check(
            &format!("descending_order_n_{n}"),
            1.0 / fact,
            est,
        ));
    }

    let cells: Vec<(u32, u32)> = (0..5).map(|i| (i, 0)).collect();
    for (k, level) in [2.0f64, 2.5, 3.0].into_iter().enumerate() {
        let est = mc_shadow_set_probability(
            gauss,
            &cells,
            level,
            256,
            100_000,
            shadowperc_core::rng::substream_seed(seed, 200 + k as u64),
        );
        checks.push(upper_bound_check(
            &format!("gaussian_point_bound_level_{level}"),
            shadow_set_bound(gaussian_point_bound(level), 5),
            est,
        ));
    }

    for eps in [0.001f64, 0.01, 0.1] {
        let closed = peierls_circuit_sum(eps).expect("inside radius of convergence");
        let partial = peierls_circuit_partial_sum(eps, 10_000);
        checks.push(BoundCheck {
            name: format!("circuit_series_eps_{eps}"),
            reference: closed,
            estimate: partial,
            stderr: 0.0,
            pass: (closed - partial).abs() <= 1e-12,
        });
    }

    let all_pass = checks.iter().all(|c| c.pass);
    BoundReport {
        seed,
        checks,
        all_pass,
    }
}

/// Exit status for a bound report: 0 all green, 1 otherwise.
pub fn exit_code_for(report: &BoundReport) -> i32 {
    if report.all_pass {
        0
    } else {
        1
    }
}

/// Cross-checks of optimized kernels against their brute-force oracles,
/// emitted by the `selftest` subcommand.
pub fn selftest_suite(seed: u64) -> Vec<OracleReport> {
    let gauss = DistributionSpec::gaussian(0.0, 1.0).expect("valid parameters");
    let mut reports = Vec::new();

    reports.push(ordering_symmetry_check(2, gauss, 100_000, seed));
    reports.push(ordering_symmetry_check(4, gauss, 1_000_000, seed + 1));

    // Hull kernel vs brute force on 200 rows of 128.
    {
        let mut rng = substream(seed, 10);
        let mut worst = 0.0f64;
        let mut offsets_equal = true;
        for _ in 0..200 {
            let row: Vec<f64> = (0..128).map(|_| gauss.sample(&mut rng)).collect();
            let (hv, hr) = alpha_row_hull(&row);
            for u in 0..row.len() - 1 {
                let (nv, nr) = alpha_row_naive(&row[u..], row.len() - 1 - u);
                worst = worst.max((hv[u] - nv[0]).abs());
                offsets_equal &= hr[u] == nr[0];
            }
        }
        reports.push(OracleReport::new(
            "hull_vs_naive_values",
            "200 rows of length 128".into(),
            0.0,
            worst,
            1e-12,
        ));
        reports.push(OracleReport::new(
            "hull_vs_naive_offsets",
            "200 rows of length 128".into(),
            1.0,
            offsets_equal as u64 as f64,
            0.0,
        ));
    }

    // Union-find vs flood fill on 50 random 32x32 masks, both adjacencies.
    {
        let mut rng = substream(seed, 11);
        let mut agreements = 0u32;
        let total = 100;
        for _ in 0..50 {
            let bits: Vec<bool> = (0..32 * 32).map(|_| rng.next_u64().is_multiple_of(2)).collect();
            let mask = LevelSetMask::from_bits(bits, 32, 32, 0.0, Side::Le);
            for mode in [Adjacency::Orthogonal, Adjacency::Star] {
                agreements +=
                    label_clusters(&mask, mode).same_partition(&flood_fill(&mask, mode)) as u32;
            }
        }
        reports.push(OracleReport::new(
            "union_find_vs_flood_fill",
            "50 random 32x32 masks, both adjacencies".into(),
            total as f64,
            agreements as f64,
            0.0,
        ));
    }

    reports
}
