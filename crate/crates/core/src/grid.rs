//! Tabulated curves and surfaces (generator, joint CDF, density) as CSV.

use std::fmt::Write as _;

use crate::copula::UnitPoint;
use crate::error::{CopulaError, Result};
use crate::generator::Archimedean;

/// Uniform lattice on [0,1] with `n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n: usize,
    includes_boundary: bool,
}

impl GridSpec {
    pub fn new(n: usize, includes_boundary: bool) -> Result<Self> {
        if n < 2 {
            return Err(CopulaError::argument("grid n", n as f64, "[2, inf)"));
        }
        Ok(Self {
            n,
            includes_boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn includes_boundary(&self) -> bool {
        self.includes_boundary
    }

    /// `i/n` for `i = 0..=n` with boundary, cell midpoints `(i + 0.5)/n` without.
    pub fn points(&self) -> Vec<f64> {
        let n = self.n as f64;
        if self.includes_boundary {
            (0..=self.n).map(|i| i as f64 / n).collect()
        } else {
            (0..self.n).map(|i| (i as f64 + 0.5) / n).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridWhat {
    Cdf,
    Pdf,
    Generator,
}

impl GridWhat {
    /// The lattice each table is drawn on: the CDF includes the boundary,
    /// the density and the generator use cell midpoints.
    pub fn spec(self, n: usize) -> Result<GridSpec> {
        GridSpec::new(n, self == GridWhat::Cdf)
    }
}

/// Render a table as CSV. Surfaces are written row-major with `u` outermost.
pub fn grid_csv(copula: &Archimedean, what: GridWhat, n: usize) -> Result<String> {
    let xs = what.spec(n)?.points();
    let mut out = String::new();
    match what {
        GridWhat::Generator => {
            out.push_str("z,phi\n");
            for &z in &xs {
                writeln!(out, "{z},{}", copula.phi(z)?).expect("String write");
            }
        }
        GridWhat::Cdf | GridWhat::Pdf => {
            out.push_str("u,v,value\n");
            for &u in &xs {
                for &v in &xs {
                    let pt = UnitPoint::new(u, v)?;
                    let value = match what {
                        GridWhat::Cdf => copula.cdf(pt),
                        _ => copula.density(pt)?,
                    };
                    writeln!(out, "{u},{v},{value}").expect("String write");
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_points() {
        assert_eq!(GridSpec::new(4, true).unwrap().points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(GridSpec::new(2, false).unwrap().points(), vec![0.25, 0.75]);
        assert!(GridSpec::new(1, true).is_err());
    }

    #[test]
    fn generator_table_is_decreasing_and_convex() {
        let csv = grid_csv(&Archimedean::f1(0.6).unwrap(), GridWhat::Generator, 50).unwrap();
        let phi: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(phi.len(), 50);
        assert!(phi.windows(2).all(|w| w[1] < w[0]));
        assert!(phi.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] > 0.0));
    }

    #[test]
    fn product_density_table() {
        let csv = grid_csv(&Archimedean::f1(1.0).unwrap(), GridWhat::Pdf, 10).unwrap();
        assert_eq!(csv.lines().count(), 101);
        for line in csv.lines().skip(1) {
            let c: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!((c - 1.0).abs() < 1e-13, "{line}");
        }
    }
}
