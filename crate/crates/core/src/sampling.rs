//! Random pairs from the copulas.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`). Pair `i` of a
//! batch draws from its own stream: the generator is seeded with the batch
//! seed and switched to stream `i`, so a batch is identical whatever order or
//! thread its pairs are filled in.

use std::fmt::Write as _;
use std::io;

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::copula::UnitPoint;
use crate::error::{CopulaError, Result};
use crate::generator::{Archimedean, FamilyId};
use crate::numeric::bisect_monotone;

/// Root-finding tolerance for conditional inversion.
pub const CONDITIONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    Conditional,
    Frailty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub pairs: Vec<(f64, f64)>,
    pub family: FamilyId,
    pub alpha: Option<f64>,
    pub seed: u64,
    pub method: SampleMethod,
}

impl SampleBatch {
    /// CSV with header `u,v`; values in shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.pairs.len() * 40 + 4);
        out.push_str("u,v\n");
        for (u, v) in &self.pairs {
            writeln!(out, "{u},{v}").expect("writing to a String cannot fail");
        }
        out
    }

    pub fn write_csv(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Parse a `u,v` CSV (header required) into pairs.
pub fn read_pairs_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("u,v") => {}
        other => {
            return Err(CopulaError::Unsupported(format!(
                "expected CSV header 'u,v', found {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = || CopulaError::Unsupported(format!("malformed CSV row {}: '{line}'", i + 2));
            let (u, v) = line.trim().split_once(',').ok_or_else(bad)?;
            let u: f64 = u.trim().parse().map_err(|_| bad())?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            Ok((u, v))
        })
        .collect()
}

fn pair_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Unit exponential by inversion, `−ln(1 − U)` with `U ∈ [0,1)`.
fn unit_exponential(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Density of the MBUR law on (0,1) that the frailty is built from.
pub fn mbur_pdf(y: f64, alpha: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(CopulaError::argument("y", y, "(0,1)"));
    }
    check_alpha(alpha)?;
    let k = 1.0 / (alpha * alpha);
    Ok(6.0 * k * (1.0 - y.powf(k)) * y.powf(2.0 * k - 1.0))
}

/// Frailty density `6α(1 − e^{−αw})e^{−2αw}` on (0,∞).
pub fn frailty_pdf(w: f64, alpha: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(CopulaError::argument("w", w, "(0,inf)"));
    }
    check_alpha(alpha)?;
    Ok(6.0 * alpha * (-(-alpha * w).exp_m1()) * (-2.0 * alpha * w).exp())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(CopulaError::Parameter {
            family: FamilyId::F3FrailtyRational,
            name: "alpha",
            value: alpha,
            domain: "(0,inf)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrailtyDraw {
    pub gamma: f64,
}

/// Draw the frailty. Its density `6α(e^{−2αw} − e^{−3αw})` is the
/// hypoexponential law of `E₁/(2α) + E₂/(3α)`, whose Laplace transform is
/// the frailty-rational inverse generator.
pub fn sample_frailty(alpha: f64, rng: &mut impl Rng) -> Result<FrailtyDraw> {
    check_alpha(alpha)?;
    loop {
        let gamma = unit_exponential(rng) / (2.0 * alpha) + unit_exponential(rng) / (3.0 * alpha);
        if gamma > 0.0 {
            return Ok(FrailtyDraw { gamma });
        }
    }
}

/// Conditional-distribution method: `u, p ~ U(0,1)`, then solve
/// `∂C/∂u(u, v) = p` for `v` by bisection.
pub fn sample_conditional(copula: &Archimedean, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(CopulaError::SampleSize {
            n,
            reason: "need at least one pair".into(),
        });
    }
    let pairs = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = pair_rng(seed, i);
            let u: f64 = Open01.sample(&mut rng);
            let p: f64 = Open01.sample(&mut rng);
            let conditional = |v: f64| {
                copula
                    .partial_u(UnitPoint::new(u, v).expect("v in [0,1]"))
                    .expect("u in (0,1)")
            };
            let root = bisect_monotone(conditional, p, 0.0, 1.0, CONDITIONAL_TOL)?;
            if !root.converged {
                return Err(CopulaError::Convergence {
                    what: "conditional inversion",
                    detail: format!("pair {i}: u = {u}, p = {p}, residual {}", root.residual),
                });
            }
            Ok((u, root.root))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch {
        pairs,
        family: copula.family(),
        alpha: copula.param(),
        seed,
        method: SampleMethod::Conditional,
    })
}

/// Marshall–Olkin construction for the frailty-rational family:
/// `(ψ(E₁/γ), ψ(E₂/γ))` with `γ` from [`sample_frailty`].
pub fn sample_frailty_copula(alpha: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    let copula = Archimedean::f3(alpha)?;
    if n == 0 {
        return Err(CopulaError::SampleSize {
            n,
            reason: "need at least one pair".into(),
        });
    }
    let pairs = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = pair_rng(seed, i);
            loop {
                let gamma = sample_frailty(alpha, &mut rng)?.gamma;
                let u = copula.psi(unit_exponential(&mut rng) / gamma)?;
                let v = copula.psi(unit_exponential(&mut rng) / gamma)?;
                // redraw in the (≈1e-16 probability) event of rounding onto the boundary
                if u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0 {
                    return Ok((u, v));
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch {
        pairs,
        family: FamilyId::F3FrailtyRational,
        alpha: Some(alpha),
        seed,
        method: SampleMethod::Frailty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_quad;

    #[test]
    fn mbur_examples() {
        assert!(mbur_pdf(1.0 - 1e-12, 1.0).unwrap() < 1e-10);
        assert!((mbur_pdf(0.25, 1.0).unwrap() - 1.125).abs() < 1e-15);
        for a in [0.5, 1.0, 2.0] {
            let q = adaptive_quad(|y| mbur_pdf(y, a).unwrap(), 0.0, 1.0, 1e-11).unwrap();
            assert!((q.value - 1.0).abs() <= 1e-8, "alpha {a}: {}", q.value);
        }
        assert!(mbur_pdf(0.0, 1.0).is_err());
        assert!(mbur_pdf(0.5, 0.0).is_err());
    }

    #[test]
    fn frailty_pdf_examples() {
        assert!(frailty_pdf(1e-300, 1.0).unwrap() < 1e-290);
        let expected = 6.0 * (1.0 - (-1f64).exp()) * (-2f64).exp();
        assert!((frailty_pdf(1.0, 1.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.513_289_289).abs() < 1e-9);
        assert!(frailty_pdf(0.0, 1.0).is_err());
        assert!(frailty_pdf(1.0, -2.0).is_err());
    }

    #[test]
    fn frailty_pdf_is_mbur_after_log_transform() {
        for a in [0.3, 1.0, 2.5] {
            for i in 1..=50 {
                let w = i as f64 * 0.1 / a;
                let y = (-a.powi(3) * w).exp();
                let via_mbur = mbur_pdf(y, a).unwrap() * a.powi(3) * y;
                let direct = frailty_pdf(w, a).unwrap();
                assert!((via_mbur - direct).abs() <= 1e-10 * direct, "a {a} w {w}");
            }
        }
    }

    #[test]
    fn batches_are_reproducible_and_interior() {
        let g = Archimedean::f1(0.5).unwrap();
        let a = sample_conditional(&g, 500, 11).unwrap();
        let b = sample_conditional(&g, 500, 11).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_ne!(a.pairs, sample_conditional(&g, 500, 12).unwrap().pairs);
        // prefix property of per-index streams
        assert_eq!(&a.pairs[..100], &sample_conditional(&g, 100, 11).unwrap().pairs[..]);
        let f = sample_frailty_copula(1.0, 500, 3).unwrap();
        for (u, v) in a.pairs.iter().chain(&f.pairs) {
            assert!(*u > 0.0 && *u < 1.0 && *v > 0.0 && *v < 1.0);
        }
        assert!(sample_conditional(&g, 0, 1).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let batch = sample_frailty_copula(2.0, 50, 9).unwrap();
        let csv = batch.to_csv();
        assert!(csv.starts_with("u,v\n"));
        assert_eq!(read_pairs_csv(&csv).unwrap(), batch.pairs);
        assert!(read_pairs_csv("x,y\n0.1,0.2\n").is_err());
        assert!(read_pairs_csv("u,v\n0.1;0.2\n").is_err());
    }
}
