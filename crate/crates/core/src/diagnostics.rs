//! Validity audits and Kendall tau estimators.

use rayon::prelude::*;
use serde::Serialize;

use crate::copula::UnitPoint;
use crate::error::{CopulaError, Result};
use crate::generator::{Archimedean, ConditionReport, FamilyId};
use crate::numeric::adaptive_quad;

pub const BOUNDARY_TOL: f64 = 1e-12;
pub const MARGIN_TOL: f64 = 1e-12;
pub const CELL_VOLUME_TOL: f64 = -1e-12;
pub const SINGULARITY_TOL: f64 = 1e-8;
/// Probe count used for the generator-condition part of a validity report.
pub const GENERATOR_PROBES: usize = 64;
/// Largest sample accepted by the quadratic-time concordance count.
pub const MC_MAX_PAIRS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub ok: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checks {
    pub boundary: Check,
    pub margins: Check,
    pub two_increasing: Check,
    pub singularity: Check,
    pub generator_conditions: Check,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.boundary.ok
            && self.margins.ok
            && self.two_increasing.ok
            && self.singularity.ok
            && self.generator_conditions.ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub family: FamilyId,
    /// Dependence parameter (θ for the Gumbel reference, null for independence).
    pub alpha: Option<f64>,
    pub grid_n: usize,
    pub boundary_max_abs_err: f64,
    pub margin_max_abs_err: f64,
    pub min_cell_volume: f64,
    pub singularity_probes: Vec<(f64, f64)>,
    pub generator_conditions: ConditionReport,
    pub passed: Checks,
}

/// Ratio `φ(u)/φ′(u)` at `u = 10^-k` for each `k` in `ks`.
pub fn singularity_probes(copula: &Archimedean, ks: std::ops::RangeInclusive<i32>) -> Vec<(f64, f64)> {
    ks.map(|k| {
        let u = 10f64.powi(-k);
        let ratio = copula.phi_ratio(u).expect("10^-k lies in (0,1)");
        (u, ratio)
    })
    .collect()
}

/// Estimate of `lim_{u→0} φ(u)/φ′(u)`: the ratio at `u = 1e-12`, the last of
/// the ladder `u = 10^-k, k = 3..12`. Zero means no singular component.
pub fn singularity_limit(copula: &Archimedean) -> f64 {
    singularity_probes(copula, 3..=12)
        .last()
        .map(|&(_, r)| r)
        .unwrap_or(f64::NAN)
}

/// Audit groundedness, uniform margins, 2-increasingness and absolute
/// continuity on the uniform `(grid_n + 1)²` lattice over the closed square.
pub fn grid_validity_report(copula: &Archimedean, grid_n: usize) -> Result<ValidityReport> {
    if grid_n < 3 {
        return Err(CopulaError::argument("grid_n", grid_n as f64, "[3, inf)"));
    }
    let n = grid_n;
    let x = |i: usize| i as f64 / n as f64;
    let rows: Vec<Vec<f64>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            (0..=n)
                .map(|j| copula.cdf(UnitPoint::new(x(i), x(j)).expect("lattice point")))
                .collect()
        })
        .collect();

    let mut boundary = 0f64;
    let mut margin = 0f64;
    for k in 0..=n {
        boundary = boundary.max(rows[0][k].abs()).max(rows[k][0].abs());
        margin = margin
            .max((rows[n][k] - x(k)).abs())
            .max((rows[k][n] - x(k)).abs());
    }
    // row-major scan for a reproducible reduction order
    let mut min_volume = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let vol = rows[i + 1][j + 1] - rows[i + 1][j] - rows[i][j + 1] + rows[i][j];
            min_volume = min_volume.min(vol);
        }
    }

    let probes = singularity_probes(copula, 3..=9);
    let limit = singularity_limit(copula);
    let generator_conditions = copula.check_generator_conditions(GENERATOR_PROBES)?;

    let passed = Checks {
        boundary: Check {
            ok: boundary <= BOUNDARY_TOL,
            tolerance: BOUNDARY_TOL,
        },
        margins: Check {
            ok: margin <= MARGIN_TOL,
            tolerance: MARGIN_TOL,
        },
        two_increasing: Check {
            ok: min_volume >= CELL_VOLUME_TOL,
            tolerance: CELL_VOLUME_TOL,
        },
        singularity: Check {
            ok: limit.abs() <= SINGULARITY_TOL,
            tolerance: SINGULARITY_TOL,
        },
        generator_conditions: Check {
            ok: generator_conditions.all_passed(),
            tolerance: 0.0,
        },
    };

    Ok(ValidityReport {
        family: copula.family(),
        alpha: copula.param(),
        grid_n,
        boundary_max_abs_err: boundary,
        margin_max_abs_err: margin,
        min_cell_volume: min_volume,
        singularity_probes: probes,
        generator_conditions,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauEstimate {
    pub tau: f64,
    pub method: TauMethod,
    pub error_bound: f64,
    /// Sample size; only set for Monte Carlo estimates.
    pub n: Option<usize>,
    pub note: String,
}

/// Constant tau of the frailty-rational family, `4·(−0.19917) + 1`.
pub const F3_TAU_CONSTANT: f64 = 0.20332;

pub fn kendall_tau_closed(copula: &Archimedean) -> TauEstimate {
    let (tau, note) = match (copula.family(), copula.param()) {
        (FamilyId::F1PowerLog, Some(a)) => (1.0 - a, "1 - alpha".to_string()),
        (FamilyId::F2PowerLogSq, Some(a)) => (
            1.0 - a * a,
            "errata: 1 - alpha^2 (same copula as gumbel theta = 1/alpha^2); \
             the formula 1 - 2*alpha^2 contradicts the tau integral and is not used"
                .to_string(),
        ),
        (FamilyId::F3FrailtyRational, _) => (
            F3_TAU_CONSTANT,
            "alpha-free constant 4*(-0.19917) + 1 = 0.20332; quadrature gives 0.2030890; \
             errata: 1 - 2*alpha^2 and 0.32 are not reproduced"
                .to_string(),
        ),
        (FamilyId::GumbelRef, Some(theta)) => (1.0 - 1.0 / theta, "1 - 1/theta".to_string()),
        (FamilyId::Independence, _) => (0.0, "independence".to_string()),
        (family, None) => unreachable!("family {family} always carries a parameter"),
    };
    TauEstimate {
        tau,
        method: TauMethod::ClosedForm,
        error_bound: 0.0,
        n: None,
        note,
    }
}

/// `τ = 1 + 4∫₀¹ φ(u)/φ′(u) du` by adaptive quadrature.
pub fn kendall_tau_quadrature(copula: &Archimedean, abs_tol: f64) -> Result<TauEstimate> {
    if !(abs_tol >= 1e-12) {
        return Err(CopulaError::argument("abs_tol", abs_tol, "[1e-12, inf)"));
    }
    let ratio = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            0.0
        } else {
            copula.phi_ratio(u).expect("u in (0,1)")
        }
    };
    let q = adaptive_quad(ratio, 0.0, 1.0, abs_tol)?;
    if !q.converged {
        return Err(CopulaError::Convergence {
            what: "kendall_tau_quadrature",
            detail: format!(
                "integral {} with error estimate {} after {} evaluations",
                q.value, q.abs_error_estimate, q.evaluations
            ),
        });
    }
    let mut note = format!("1 + 4*integral(phi/phi'), {} evaluations", q.evaluations);
    if copula.family() == FamilyId::F2PowerLogSq {
        note.push_str("; errata: matches 1 - alpha^2, not 1 - 2*alpha^2");
    }
    Ok(TauEstimate {
        tau: (1.0 + 4.0 * q.value).clamp(-1.0, 1.0),
        method: TauMethod::Quadrature,
        error_bound: 4.0 * q.abs_error_estimate,
        n: None,
        note,
    })
}

fn sign(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Exact `(concordant − discordant) / C(n,2)`; ties count as zero.
pub fn concordance_tau(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len();
    if n < 2 {
        return f64::NAN;
    }
    let score: i64 = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let (ui, vi) = pairs[i];
            pairs[i + 1..]
                .iter()
                .map(|&(uj, vj)| sign(uj - ui) * sign(vj - vi))
                .sum::<i64>()
        })
        .sum();
    score as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}

/// Sample Kendall tau with a standard error from `block_count` contiguous,
/// equal-size blocks (a trailing remainder is excluded from the blocks but
/// not from the point estimate). `error_bound` holds one standard error.
pub fn kendall_tau_mc(pairs: &[(f64, f64)], block_count: usize) -> Result<TauEstimate> {
    let n = pairs.len();
    if block_count < 5 {
        return Err(CopulaError::argument("block_count", block_count as f64, "[5, inf)"));
    }
    if n < 10 * block_count {
        return Err(CopulaError::SampleSize {
            n,
            reason: format!("need at least 10 * block_count = {}", 10 * block_count),
        });
    }
    if n > MC_MAX_PAIRS {
        return Err(CopulaError::SampleSize {
            n,
            reason: format!("exact concordance count is capped at {MC_MAX_PAIRS} pairs"),
        });
    }
    let tau = concordance_tau(pairs);
    let m = n / block_count;
    let blocks: Vec<f64> = pairs
        .chunks_exact(m)
        .take(block_count)
        .map(concordance_tau)
        .collect();
    let b = blocks.len() as f64;
    let mean = blocks.iter().sum::<f64>() / b;
    let var = blocks.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (b - 1.0);
    Ok(TauEstimate {
        tau,
        method: TauMethod::MonteCarlo,
        error_bound: (var / b).sqrt(),
        n: Some(n),
        note: format!("exact pairwise concordance; standard error from {block_count} blocks of {m}"),
    })
}

/// Single-line JSON with lexicographically sorted keys.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // serde_json's Map is a BTreeMap unless `preserve_order` is enabled
    let v = serde_json::to_value(value).expect("report types serialize");
    serde_json::to_string(&v).expect("value serializes")
}
