//! Joint CDF `C(u,v) = ψ(φ(u) + φ(v))`, conditional `∂C/∂u` and density.
//!
//! The generator sum is formed in log space (`ln(φ(u) + φ(v))` via
//! log-add-exp), so families whose generator values under- or overflow in
//! plain doubles still evaluate accurately.

use serde::{Deserialize, Serialize};

use crate::error::{CopulaError, Result};
use crate::generator::Archimedean;

/// A point of the closed unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPoint {
    u: f64,
    v: f64,
}

impl UnitPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(CopulaError::argument("u", u, "[0,1]"));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(CopulaError::argument("v", v, "[0,1]"));
        }
        Ok(Self { u, v })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn swapped(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.u > 0.0 && self.u < 1.0 && self.v > 0.0 && self.v < 1.0
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl Archimedean {
    /// `ln(φ(u) + φ(v))` for interior coordinates.
    fn ln_generator_sum(&self, u: f64, v: f64) -> f64 {
        log_add_exp(self.ln_phi(u), self.ln_phi(v))
    }

    /// Joint distribution function.
    pub fn cdf(&self, pt: UnitPoint) -> f64 {
        let (u, v) = (pt.u, pt.v);
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        if u == 1.0 {
            return v;
        }
        if v == 1.0 {
            return u;
        }
        self.psi_ln(self.ln_generator_sum(u, v))
    }

    /// Conditional distribution `∂C/∂u = ψ′(φ(u) + φ(v))·φ′(u)`.
    pub fn partial_u(&self, pt: UnitPoint) -> Result<f64> {
        let (u, v) = (pt.u, pt.v);
        if !(u > 0.0 && u < 1.0) {
            return Err(CopulaError::argument("u", u, "(0,1)"));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        if v == 1.0 {
            return Ok(1.0);
        }
        let ln_t = self.ln_generator_sum(u, v);
        let value = (self.ln_neg_psi_prime(ln_t) + self.ln_neg_phi_prime(u)).exp();
        Ok(value.min(1.0))
    }

    /// Copula density `c(u,v) = ψ″(φ(u) + φ(v))·φ′(u)·φ′(v)` on the open square.
    pub fn density(&self, pt: UnitPoint) -> Result<f64> {
        if !pt.is_interior() {
            return Err(CopulaError::Argument {
                name: "(u,v)",
                value: if pt.u > 0.0 && pt.u < 1.0 { pt.v } else { pt.u },
                domain: "(0,1)x(0,1)",
            });
        }
        let ln_t = self.ln_generator_sum(pt.u, pt.v);
        if ln_t == f64::INFINITY {
            return Ok(0.0);
        }
        let ln_c = self.ln_psi_double_prime(ln_t)
            + self.ln_neg_phi_prime(pt.u)
            + self.ln_neg_phi_prime(pt.v);
        Ok(ln_c.exp())
    }
}

/// Gumbel copula by its textbook closed form; used as an independent oracle.
pub fn reference_gumbel_cdf(theta: f64, pt: UnitPoint) -> Result<f64> {
    if !(theta >= 1.0 && theta.is_finite()) {
        return Err(CopulaError::Parameter {
            family: crate::generator::FamilyId::GumbelRef,
            name: "theta",
            value: theta,
            domain: "[1,inf)",
        });
    }
    let (u, v) = (pt.u, pt.v);
    if u == 0.0 || v == 0.0 {
        return Ok(0.0);
    }
    let a = (-u.ln()).powf(theta);
    let b = (-v.ln()).powf(theta);
    Ok((-(a + b).powf(1.0 / theta)).exp())
}
