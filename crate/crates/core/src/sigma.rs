//! Conformal factors: polynomials of degree ≤ 2 in the chart coordinates.
//!
//! Keys: `c0` constant, `c<i>` coefficient of `xⁱ`, `c<i><j>` coefficient of
//! `xⁱxʲ` (1-based, single digits), `y<i>` coefficient of `yⁱ`. A nonzero `y`
//! term makes the factor non-basic, which the conformal checks reject.

use std::fmt;

use crate::error::{GeomError, Result};
use crate::jet::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Term {
    Const,
    X(usize),
    XX(usize, usize),
    Y(usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaSpec {
    terms: Vec<(Term, f64)>,
}

impl SigmaSpec {
    pub fn zero() -> Self {
        SigmaSpec::default()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GeomError::Config(format!("sigma term '{part}' is not key=value")))?;
            let coef: f64 = v.trim().parse().map_err(|e| GeomError::Config(format!("sigma coefficient '{v}': {e}")))?;
            let k = k.trim();
            let digits = |s: &str| -> Result<Vec<usize>> {
                s.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .filter(|&d| d >= 1)
                            .map(|d| d as usize - 1)
                            .ok_or_else(|| GeomError::Config(format!("bad sigma index in '{k}'")))
                    })
                    .collect()
            };
            let term = if k == "c0" {
                Term::Const
            } else if let Some(rest) = k.strip_prefix('c') {
                match digits(rest)?.as_slice() {
                    [i] => Term::X(*i),
                    [i, j] => Term::XX((*i).min(*j), (*i).max(*j)),
                    _ => return Err(GeomError::Config(format!("sigma key '{k}' has degree > 2"))),
                }
            } else if let Some(rest) = k.strip_prefix('y') {
                match digits(rest)?.as_slice() {
                    [i] => Term::Y(*i),
                    _ => return Err(GeomError::Config(format!("bad sigma key '{k}'"))),
                }
            } else {
                return Err(GeomError::Config(format!("unknown sigma key '{k}'")));
            };
            terms.push((term, coef));
        }
        Ok(SigmaSpec { terms })
    }

    /// `σ = c · xⁱ` (0-based `i`).
    pub fn linear(i: usize, c: f64) -> Self {
        SigmaSpec { terms: vec![(Term::X(i), c)] }
    }

    pub fn with_quadratic(mut self, i: usize, j: usize, c: f64) -> Self {
        self.terms.push((Term::XX(i.min(j), i.max(j)), c));
        self
    }

    pub fn with_linear(mut self, i: usize, c: f64) -> Self {
        self.terms.push((Term::X(i), c));
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.terms.push((Term::Const, c));
        self
    }

    /// Largest coordinate index used (0-based), for dimension checks.
    pub fn max_index(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter_map(|(t, _)| match t {
                Term::Const => None,
                Term::X(i) | Term::Y(i) => Some(*i),
                Term::XX(_, j) => Some(*j),
            })
            .max()
    }

    pub fn is_basic(&self) -> bool {
        !self.terms.iter().any(|(t, c)| matches!(t, Term::Y(_)) && *c != 0.0)
    }

    pub fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let n = x.len();
        if let Some(m) = self.max_index() {
            if m >= n {
                return Err(GeomError::Dimension(format!("sigma uses coordinate {} in dimension {n}", m + 1)));
            }
        }
        let mut acc = x[0].cst(0.0);
        for (t, c) in &self.terms {
            let v = match t {
                Term::Const => x[0].cst(*c),
                Term::X(i) => x[*i].scale(*c),
                Term::XX(i, j) => x[*i].mul(&x[*j]).scale(*c),
                Term::Y(i) => y[*i].scale(*c),
            };
            acc = acc.add(&v);
        }
        Ok(acc)
    }
}

impl fmt::Display for SigmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(t, c)| match t {
                Term::Const => format!("c0={c}"),
                Term::X(i) => format!("c{}={c}", i + 1),
                Term::XX(i, j) => format!("c{}{}={c}", i + 1, j + 1),
                Term::Y(i) => format!("y{}={c}", i + 1),
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let s = SigmaSpec::parse("c11=0.1, c2=0.2, c0=1").unwrap();
        let v = s.eval(&[2.0, 3.0], &[1.0, 0.0]).unwrap();
        assert!((v - (0.4 + 0.6 + 1.0)).abs() < 1e-15);
        assert!(s.is_basic());
        assert_eq!(SigmaSpec::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn y_terms_are_not_basic() {
        assert!(!SigmaSpec::parse("y1=0.1").unwrap().is_basic());
        assert!(SigmaSpec::parse("c123=1").is_err());
        assert!(SigmaSpec::parse("z1=1").is_err());
        assert!(SigmaSpec::parse("c3=1").unwrap().eval(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
