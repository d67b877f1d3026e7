//! Archimedean generators φ, their inverses ψ, and derivatives.
//!
//! Two generator shapes cover all five families:
//!
//! * power-log: `φ(z) = (β·(−ln z))^k`, `ψ(t) = exp(−t^{1/k} / β)`. The first
//!   family uses `β = α, k = 1/α`; the second `β = 1, k = 1/α²`; the Gumbel
//!   reference `β = 1, k = θ`; independence `β = 1, k = 1`.
//! * frailty-rational: `φ(z) = (α/2)(√(1 + 24/z) − 5)`,
//!   `ψ(t) = 6α² / ((t + 2α)(t + 3α))`.
//!
//! Besides the plain evaluations, every shape exposes a log-domain view
//! (`ln φ`, `ln(−φ′)`, `ln(−ψ′)`, `ln ψ″`) that the copula evaluation uses.
//! With `k = 100` the plain generator underflows for `z > 0.9993`, while the
//! log-domain values stay finite everywhere on the open interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CopulaError, Result};

/// Closed set of supported copula families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    #[serde(rename = "F1_POWER_LOG")]
    F1PowerLog,
    #[serde(rename = "F2_POWER_LOG_SQ")]
    F2PowerLogSq,
    #[serde(rename = "F3_FRAILTY_RATIONAL")]
    F3FrailtyRational,
    #[serde(rename = "GUMBEL_REF")]
    GumbelRef,
    #[serde(rename = "INDEPENDENCE")]
    Independence,
}

impl FamilyId {
    pub const ALL: [FamilyId; 5] = [
        FamilyId::F1PowerLog,
        FamilyId::F2PowerLogSq,
        FamilyId::F3FrailtyRational,
        FamilyId::GumbelRef,
        FamilyId::Independence,
    ];

    /// Short lowercase tag used on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            FamilyId::F1PowerLog => "f1",
            FamilyId::F2PowerLogSq => "f2",
            FamilyId::F3FrailtyRational => "f3",
            FamilyId::GumbelRef => "gumbel",
            FamilyId::Independence => "independence",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FamilyId {
    type Err = CopulaError;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| {
                CopulaError::Unsupported(format!(
                    "unknown family '{s}' (expected f1|f2|f3|gumbel|independence)"
                ))
            })
    }
}

/// The dependence parameter as supplied by a caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DependenceParam {
    Alpha(f64),
    Theta(f64),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    PowerLog {
        beta: f64,
        exponent: f64,
        ln_beta: f64,
    },
    Rational {
        alpha: f64,
        ln_alpha: f64,
    },
}

/// A validated Archimedean generator: family plus admissible parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Archimedean {
    family: FamilyId,
    param: Option<f64>,
    kernel: Kernel,
}

fn power_log(beta: f64, exponent: f64) -> Kernel {
    Kernel::PowerLog {
        beta,
        exponent,
        ln_beta: beta.ln(),
    }
}

fn reject(family: FamilyId, name: &'static str, value: f64, domain: &'static str) -> CopulaError {
    CopulaError::Parameter {
        family,
        name,
        value,
        domain,
    }
}

impl Archimedean {
    pub fn new(family: FamilyId, param: DependenceParam) -> Result<Self> {
        match (family, param) {
            (FamilyId::F1PowerLog, DependenceParam::Alpha(a)) => Self::f1(a),
            (FamilyId::F2PowerLogSq, DependenceParam::Alpha(a)) => Self::f2(a),
            (FamilyId::F3FrailtyRational, DependenceParam::Alpha(a)) => Self::f3(a),
            (FamilyId::GumbelRef, DependenceParam::Theta(t)) => Self::gumbel(t),
            (FamilyId::Independence, DependenceParam::None) => Ok(Self::independence()),
            (family, param) => Err(CopulaError::Unsupported(format!(
                "family {family} does not take parameter {param:?} \
                 (f1/f2/f3 take alpha, gumbel takes theta, independence takes none)"
            ))),
        }
    }

    pub fn f1(alpha: f64) -> Result<Self> {
        let family = FamilyId::F1PowerLog;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(reject(family, "alpha", alpha, "(0,1]"));
        }
        Ok(Self {
            family,
            param: Some(alpha),
            kernel: power_log(alpha, 1.0 / alpha),
        })
    }

    pub fn f2(alpha: f64) -> Result<Self> {
        let family = FamilyId::F2PowerLogSq;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(reject(family, "alpha", alpha, "(0,1]"));
        }
        Ok(Self {
            family,
            param: Some(alpha),
            kernel: power_log(1.0, 1.0 / (alpha * alpha)),
        })
    }

    pub fn f3(alpha: f64) -> Result<Self> {
        let family = FamilyId::F3FrailtyRational;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(reject(family, "alpha", alpha, "(0,inf)"));
        }
        Ok(Self {
            family,
            param: Some(alpha),
            kernel: Kernel::Rational {
                alpha,
                ln_alpha: alpha.ln(),
            },
        })
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        let family = FamilyId::GumbelRef;
        if !(theta >= 1.0 && theta.is_finite()) {
            return Err(reject(family, "theta", theta, "[1,inf)"));
        }
        Ok(Self {
            family,
            param: Some(theta),
            kernel: power_log(1.0, theta),
        })
    }

    pub fn independence() -> Self {
        Self {
            family: FamilyId::Independence,
            param: None,
            kernel: power_log(1.0, 1.0),
        }
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    /// α for f1/f2/f3, θ for the Gumbel reference, `None` for independence.
    pub fn param(&self) -> Option<f64> {
        self.param
    }

    /// Generator φ(z). `φ(1) = 0` and `φ(0) = +∞` exactly.
    pub fn phi(&self, z: f64) -> Result<f64> {
        check_closed_unit("z", z)?;
        if z == 1.0 {
            return Ok(0.0);
        }
        if z == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(match self.kernel {
            Kernel::PowerLog { beta, exponent, .. } => (beta * -z.ln()).powf(exponent),
            Kernel::Rational { alpha, .. } => {
                // (α/2)(s − 5) rewritten as 12α(1 − z) / (z(s + 5)) to avoid cancellation near z = 1
                let s = (1.0 + 24.0 / z).sqrt();
                12.0 * alpha * (1.0 - z) / (z * (s + 5.0))
            }
        })
    }

    pub fn phi_prime(&self, z: f64) -> Result<f64> {
        check_open_unit("z", z)?;
        Ok(match self.kernel {
            Kernel::PowerLog { beta, exponent, .. } => {
                let a = beta * -z.ln();
                -exponent * beta * a.powf(exponent - 1.0) / z
            }
            Kernel::Rational { alpha, .. } => {
                let s = (1.0 + 24.0 / z).sqrt();
                -6.0 * alpha / (z * z * s)
            }
        })
    }

    pub fn phi_double_prime(&self, z: f64) -> Result<f64> {
        check_open_unit("z", z)?;
        Ok(match self.kernel {
            Kernel::PowerLog { beta, exponent, .. } => {
                let l = -z.ln();
                let a = beta * l;
                exponent * beta * beta * a.powf(exponent - 2.0) * (l + exponent - 1.0) / (z * z)
            }
            Kernel::Rational { alpha, .. } => {
                let s = (1.0 + 24.0 / z).sqrt();
                12.0 * alpha * (z + 18.0) / (z * z * z * s * (z + 24.0))
            }
        })
    }

    /// `φ(z)/φ′(z)` in simplified closed form, finite on all of (0,1).
    ///
    /// Power-log: `−z·(−ln z)/k`. Frailty-rational: `−2(1 − z)·z·s/(s + 5)`.
    pub fn phi_ratio(&self, z: f64) -> Result<f64> {
        check_open_unit("z", z)?;
        Ok(match self.kernel {
            Kernel::PowerLog { exponent, .. } => z * z.ln() / exponent,
            Kernel::Rational { .. } => {
                let s = (1.0 + 24.0 / z).sqrt();
                -2.0 * (1.0 - z) * z * s / (s + 5.0)
            }
        })
    }

    /// `ln φ(z)`, representable where φ itself under- or overflows.
    pub fn log_phi(&self, z: f64) -> Result<f64> {
        check_closed_unit("z", z)?;
        Ok(if z == 1.0 {
            f64::NEG_INFINITY
        } else if z == 0.0 {
            f64::INFINITY
        } else {
            self.ln_phi(z)
        })
    }

    /// ψ evaluated at `exp(ln_t)`; inverse of [`Archimedean::log_phi`].
    pub fn psi_of_log(&self, ln_t: f64) -> Result<f64> {
        if ln_t.is_nan() {
            return Err(CopulaError::argument("ln t", ln_t, "[-inf, inf]"));
        }
        Ok(self.psi_ln(ln_t))
    }

    /// Inverse generator ψ(t) for `t ∈ [0, +∞]`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        check_generator_value(t)?;
        if t == 0.0 {
            return Ok(1.0);
        }
        if t == f64::INFINITY {
            return Ok(0.0);
        }
        Ok(self.psi_ln(t.ln()))
    }

    pub fn psi_prime(&self, t: f64) -> Result<f64> {
        check_generator_value(t)?;
        if t == f64::INFINITY {
            return Ok(0.0);
        }
        if t == 0.0 {
            return match self.kernel {
                Kernel::PowerLog { beta, exponent, .. } if exponent == 1.0 => Ok(-1.0 / beta),
                Kernel::PowerLog { .. } => Err(CopulaError::argument(
                    "t",
                    t,
                    "(0,inf] (psi' is unbounded at 0 for this parameter)",
                )),
                Kernel::Rational { alpha, .. } => Ok(-5.0 / (6.0 * alpha)),
            };
        }
        Ok(-self.ln_neg_psi_prime(t.ln()).exp())
    }

    pub fn psi_double_prime(&self, t: f64) -> Result<f64> {
        check_generator_value(t)?;
        if t == f64::INFINITY {
            return Ok(0.0);
        }
        if t == 0.0 {
            return match self.kernel {
                Kernel::PowerLog { beta, exponent, .. } if exponent == 1.0 => {
                    Ok(1.0 / (beta * beta))
                }
                Kernel::PowerLog { .. } => Err(CopulaError::argument(
                    "t",
                    t,
                    "(0,inf] (psi'' is unbounded at 0 for this parameter)",
                )),
                // 12α²·19α² / (6α²)³
                Kernel::Rational { alpha, .. } => Ok(19.0 / (18.0 * alpha * alpha)),
            };
        }
        Ok(self.ln_psi_double_prime(t.ln()).exp())
    }

    // ---- log-domain views, all on the open interval / positive half line ----

    /// `ln φ(z)` for `z ∈ (0,1)`.
    pub(crate) fn ln_phi(&self, z: f64) -> f64 {
        match self.kernel {
            Kernel::PowerLog {
                exponent, ln_beta, ..
            } => exponent * (ln_beta + (-z.ln()).ln()),
            Kernel::Rational { ln_alpha, .. } => {
                let s = (1.0 + 24.0 / z).sqrt();
                ln_alpha + (12.0 * (1.0 - z) / (z * (s + 5.0))).ln()
            }
        }
    }

    /// `ln(−φ′(z))` for `z ∈ (0,1)`.
    pub(crate) fn ln_neg_phi_prime(&self, z: f64) -> f64 {
        match self.kernel {
            Kernel::PowerLog {
                exponent, ln_beta, ..
            } => {
                let ln_a = ln_beta + (-z.ln()).ln();
                exponent.ln() + ln_beta + (exponent - 1.0) * ln_a - z.ln()
            }
            Kernel::Rational { ln_alpha, .. } => {
                let s = (1.0 + 24.0 / z).sqrt();
                6f64.ln() + ln_alpha - 2.0 * z.ln() - s.ln()
            }
        }
    }

    /// Sign and log-magnitude of φ″(z); exact in sign even where φ″ underflows.
    pub(crate) fn signed_ln_phi_double_prime(&self, z: f64) -> (f64, f64) {
        match self.kernel {
            Kernel::PowerLog {
                exponent, ln_beta, ..
            } => {
                let l = -z.ln();
                let ln_a = ln_beta + l.ln();
                let bracket = l + exponent - 1.0;
                let ln_abs = exponent.ln() + 2.0 * ln_beta + (exponent - 2.0) * ln_a
                    + bracket.abs().ln()
                    - 2.0 * z.ln();
                (bracket.signum(), ln_abs)
            }
            Kernel::Rational { ln_alpha, .. } => {
                let s = (1.0 + 24.0 / z).sqrt();
                let ln_abs = 12f64.ln() + ln_alpha + (z + 18.0).ln()
                    - 3.0 * z.ln()
                    - s.ln()
                    - (z + 24.0).ln();
                (1.0, ln_abs)
            }
        }
    }

    /// ψ evaluated at `t = exp(ln_t)`; `ln_t` may be ±∞.
    pub(crate) fn psi_ln(&self, ln_t: f64) -> f64 {
        match self.kernel {
            Kernel::PowerLog {
                exponent, ln_beta, ..
            } => {
                let q = (ln_t / exponent - ln_beta).exp();
                (-q).exp()
            }
            Kernel::Rational { ln_alpha, .. } => {
                let x = (ln_t - ln_alpha).exp();
                6.0 / ((x + 2.0) * (x + 3.0))
            }
        }
    }

    /// `ln(−ψ′(t))` at `t = exp(ln_t)`, `t ∈ (0,∞)`.
    pub(crate) fn ln_neg_psi_prime(&self, ln_t: f64) -> f64 {
        match self.kernel {
            Kernel::PowerLog {
                exponent, ln_beta, ..
            } => {
                let r = 1.0 / exponent;
                let q = (r * ln_t - ln_beta).exp();
                r.ln() - ln_beta + (r - 1.0) * ln_t - q
            }
            Kernel::Rational { ln_alpha, .. } => {
                let x = (ln_t - ln_alpha).exp();
                6f64.ln() - ln_alpha + (2.0 * x + 5.0).ln()
                    - 2.0 * ((x + 2.0).ln() + (x + 3.0).ln())
            }
        }
    }

    /// `ln ψ″(t)` at `t = exp(ln_t)`, `t ∈ (0,∞)`.
    pub(crate) fn ln_psi_double_prime(&self, ln_t: f64) -> f64 {
        match self.kernel {
            Kernel::PowerLog {
                exponent, ln_beta, ..
            } => {
                let r = 1.0 / exponent;
                let q = (r * ln_t - ln_beta).exp();
                r.ln() - ln_beta + (r - 2.0) * ln_t - q + (r * q + 1.0 - r).ln()
            }
            Kernel::Rational { ln_alpha, .. } => {
                let x = (ln_t - ln_alpha).exp();
                let ln_quad = if x > 1e8 {
                    2.0 * x.ln() + (3.0 + 15.0 / x + 19.0 / (x * x)).ln()
                } else {
                    (3.0 * x * x + 15.0 * x + 19.0).ln()
                };
                12f64.ln() - 2.0 * ln_alpha + ln_quad
                    - 3.0 * ((x + 2.0).ln() + (x + 3.0).ln())
            }
        }
    }

    /// Audit the sufficient generator conditions on `probe_count` points
    /// log-spaced over `[1e-12, 1 − 1e-6]`.
    pub fn check_generator_conditions(&self, probe_count: usize) -> Result<ConditionReport> {
        if probe_count < 3 {
            return Err(CopulaError::argument(
                "probe_count",
                probe_count as f64,
                "[3, inf)",
            ));
        }
        let lo = PROBE_LO.ln();
        let hi = PROBE_HI.ln();
        let probes: Vec<f64> = (0..probe_count)
            .map(|i| (lo + (hi - lo) * i as f64 / (probe_count - 1) as f64).exp())
            .collect();

        // φ′ < 0 ⇔ −φ′ > 0; both checks report the probe closest to violating
        let decreasing = positivity_check(
            &probes,
            |z| (1.0, self.ln_neg_phi_prime(z)),
            |z| self.phi_prime(z),
        )?;
        let convex = positivity_check(
            &probes,
            |z| self.signed_ln_phi_double_prime(z),
            |z| self.phi_double_prime(z),
        )?;

        let at_one = self.phi(1.0)?;
        let vanishes_at_one = ConditionCheck {
            passed: at_one == 0.0,
            worst_point: Some(1.0),
            worst_value: at_one,
        };

        // φ(0) = +∞ exactly, ln φ strictly increasing along z = 10^-j, and
        // φ(1e-300) exceeding DIVERGENCE_RATIO·φ(1/2).
        let at_zero = self.phi(0.0)?;
        let ladder: Vec<f64> = (1..=300).map(|j| self.ln_phi(10f64.powi(-j))).collect();
        let increasing = ladder.windows(2).all(|w| w[1] > w[0]);
        let ln_ratio = ladder[ladder.len() - 1] - self.ln_phi(0.5);
        let diverges_at_zero = ConditionCheck {
            passed: at_zero == f64::INFINITY && increasing && ln_ratio > DIVERGENCE_RATIO.ln(),
            worst_point: Some(1e-300),
            worst_value: ln_ratio.exp(),
        };

        Ok(ConditionReport {
            probe_count,
            decreasing,
            convex,
            vanishes_at_one,
            diverges_at_zero,
        })
    }
}

const PROBE_LO: f64 = 1e-12;
const PROBE_HI: f64 = 1.0 - 1e-6;
/// Minimum growth φ(1e-300)/φ(1/2) accepted as evidence of φ(0⁺) = ∞.
/// Log generators with exponent k ≥ 1 grow at least like (−ln z), which
/// gives a ratio of about 996 at 1e-300.
pub const DIVERGENCE_RATIO: f64 = 1e2;

/// Outcome of one generator condition.
///
/// `worst_value` is the plain evaluation at `worst_point` and may underflow
/// to zero; `passed` is decided from a sign-exact log-domain evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub passed: bool,
    pub worst_point: Option<f64>,
    pub worst_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    pub probe_count: usize,
    pub decreasing: ConditionCheck,
    pub convex: ConditionCheck,
    pub vanishes_at_one: ConditionCheck,
    pub diverges_at_zero: ConditionCheck,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.decreasing.passed
            && self.convex.passed
            && self.vanishes_at_one.passed
            && self.diverges_at_zero.passed
    }
}

/// Checks that a quantity given as (sign, ln|value|) is strictly positive at
/// every probe. The reported worst point is the smallest value in signed order.
fn positivity_check(
    probes: &[f64],
    signed_ln: impl Fn(f64) -> (f64, f64),
    plain: impl Fn(f64) -> Result<f64>,
) -> Result<ConditionCheck> {
    let mut passed = true;
    let mut worst: Option<(f64, (i8, f64))> = None;
    for &z in probes {
        let (sign, ln_abs) = signed_ln(z);
        let key = if ln_abs.is_nan() {
            (-1, 0.0)
        } else if sign > 0.0 && ln_abs > f64::NEG_INFINITY {
            (1, ln_abs)
        } else {
            (0, -ln_abs)
        };
        passed &= key.0 == 1;
        if worst.is_none_or(|(_, k)| key < k) {
            worst = Some((z, key));
        }
    }
    let worst_point = worst.map(|(z, _)| z);
    let worst_value = match worst_point {
        Some(z) => plain(z)?,
        None => f64::NAN,
    };
    Ok(ConditionCheck {
        passed,
        worst_point,
        worst_value,
    })
}

fn check_closed_unit(name: &'static str, z: f64) -> Result<()> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(CopulaError::argument(name, z, "[0,1]"))
    }
}

fn check_open_unit(name: &'static str, z: f64) -> Result<()> {
    if z > 0.0 && z < 1.0 {
        Ok(())
    } else {
        Err(CopulaError::argument(name, z, "(0,1)"))
    }
}

fn check_generator_value(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(CopulaError::argument("t", t, "[0,inf]"))
    }
}
