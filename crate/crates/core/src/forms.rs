//! Exterior algebra over a fixed coframe with up to 16 generators.
//!
//! A form is a sparse map from increasing index sets (bit masks) to
//! coefficients. With [`Jet`] coefficients over the coordinate coframe
//! `(dx, dy)` the exterior derivative is exact; with `f64` coefficients the
//! same type holds pointwise values in any basis, e.g. the moving coframe.

use std::collections::BTreeMap;

use crate::error::{GeomError, Result};
use crate::jet::{Jet, Scalar};

pub type Mask = u16;

/// Differential form with coefficients in `S`.
#[derive(Debug, Clone)]
pub struct ExtForm<S> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<Mask, S>,
}

/// Form on `TM₀` in the coordinate coframe, coefficients as jets.
pub type FormField = ExtForm<Jet>;

/// Coordinate components of a vector field, as jets.
pub type VectorField = Vec<Jet>;

fn indices(mask: Mask) -> impl Iterator<Item = usize> {
    (0..16).filter(move |b| mask & (1 << b) != 0)
}

/// Sign of reordering `dz^I ∧ dz^J` into increasing order (`I ∩ J = ∅`).
fn merge_sign(a: Mask, b: Mask) -> f64 {
    let mut swaps = 0u32;
    for j in indices(b) {
        swaps += (a >> (j + 1)).count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All masks with `k` bits among the low `dim` bits, in increasing order.
pub fn subsets(dim: usize, k: usize) -> Vec<Mask> {
    (0u32..(1 << dim)).filter(|m| m.count_ones() as usize == k).map(|m| m as Mask).collect()
}

fn det<S: Scalar>(m: &[Vec<S>]) -> S {
    match m.len() {
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        k => {
            let mut acc = m[0][0].cst(0.0);
            for c in 0..k {
                let minor: Vec<Vec<S>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][c].mul(&det(&minor));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

impl<S: Scalar> ExtForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= 16 && degree <= dim);
        ExtForm { dim, degree, terms: BTreeMap::new() }
    }

    /// `c · dz^{i₁} ∧ … ∧ dz^{i_k}` for increasing or arbitrary distinct indices.
    pub fn monomial(dim: usize, idx: &[usize], c: S) -> Self {
        let mut out = ExtForm::zero(dim, idx.len());
        let mut mask: Mask = 0;
        let mut sign = 1.0;
        for &i in idx {
            assert!(i < dim);
            if mask & (1 << i) != 0 {
                return out;
            }
            sign *= merge_sign(mask, 1 << i);
            mask |= 1 << i;
        }
        out.terms.insert(mask, c.scale(sign));
        out
    }

    /// `Σ c_i dz^i`.
    pub fn one_form(coeffs: Vec<S>) -> Self {
        let dim = coeffs.len();
        let mut out = ExtForm::zero(dim, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            out.terms.insert(1 << i, c);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &S)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn component(&self, mask: Mask) -> Option<&S> {
        self.terms.get(&mask)
    }

    /// Coefficient on the increasing index set `idx` (0 when absent).
    pub fn coefficient(&self, idx: &[usize]) -> f64 {
        let mask = idx.iter().fold(0, |m, i| m | (1 << i));
        self.terms.get(&mask).map(|c| c.val()).unwrap_or(0.0)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "forms over different coframes");
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let v = match out.terms.get(m) {
                Some(a) => a.add(c),
                None => c.clone(),
            };
            out.terms.insert(*m, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        ExtForm { dim: self.dim, degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, c.scale(s))).collect() }
    }

    /// Multiply every coefficient by the function `f`.
    pub fn mul_fn(&self, f: &S) -> Self {
        ExtForm { dim: self.dim, degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, c.mul(f))).collect() }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "forms over different coframes");
        let mut out = ExtForm::zero(self.dim, self.degree + other.degree);
        if out.degree > self.dim {
            return out;
        }
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let term = ca.mul(cb).scale(merge_sign(*a, *b));
                let v = match out.terms.get(&(a | b)) {
                    Some(x) => x.add(&term),
                    None => term,
                };
                out.terms.insert(a | b, v);
            }
        }
        out
    }

    /// `α(X₁, …, X_k)` with the determinant convention, so that
    /// `(dz¹∧dz²)(∂₁, ∂₂) = 1`.
    pub fn eval(&self, vectors: &[&[S]]) -> S {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        assert!(self.degree > 0, "evaluate a 0-form with `component(0)`");
        let mut acc = vectors[0][0].cst(0.0);
        for (m, c) in &self.terms {
            let rows: Vec<usize> = indices(*m).collect();
            let mat: Vec<Vec<S>> = rows.iter().map(|&r| vectors.iter().map(|v| v[r].clone()).collect()).collect();
            acc = acc.add(&c.mul(&det(&mat)));
        }
        acc
    }

    /// Components in the basis dual to `frame` (vectors given in this
    /// form's coordinates): the coefficient on `θ^A` is `α(f_{a₁}, …, f_{a_k})`.
    pub fn in_basis(&self, frame: &[Vec<S>]) -> ExtForm<S> {
        let dim = frame.len();
        let mut out = ExtForm::zero(dim, self.degree);
        if self.degree == 0 {
            out.terms = self.terms.clone();
            return out;
        }
        for mask in subsets(dim, self.degree) {
            let args: Vec<&[S]> = indices(mask).map(|a| frame[a].as_slice()).collect();
            out.terms.insert(mask, self.eval(&args));
        }
        out
    }

    /// Interior product with a vector.
    pub fn interior(&self, x: &[S]) -> ExtForm<S> {
        assert!(self.degree > 0);
        let mut out = ExtForm::<S>::zero(self.dim, self.degree - 1);
        for (m, c) in &self.terms {
            for (pos, i) in indices(*m).enumerate() {
                let rest = m & !(1 << i);
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let term = c.mul(&x[i]).scale(sign);
                let v = match out.terms.get(&rest) {
                    Some(a) => a.add(&term),
                    None => term,
                };
                out.terms.insert(rest, v);
            }
        }
        out
    }

    pub fn values(&self) -> ExtForm<f64> {
        ExtForm { dim: self.dim, degree: self.degree, terms: self.terms.iter().map(|(m, c)| (*m, c.val())).collect() }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.val().abs()).fold(0.0, f64::max)
    }
}

impl ExtForm<f64> {
    /// The constant coordinate form `dz^i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        ExtForm::monomial(dim, &[i], 1.0)
    }
}

impl ExtForm<Jet> {
    /// Exact exterior derivative; coefficients lose one jet order.
    pub fn d(&self) -> Result<ExtForm<Jet>> {
        let mut out = ExtForm::zero(self.dim, self.degree + 1);
        if out.degree > self.dim {
            return Ok(out);
        }
        for (m, c) in &self.terms {
            if c.order() == 0 {
                return Err(GeomError::OrderExceeded { needed: 1, available: 0 });
            }
            for v in 0..self.dim {
                if m & (1 << v) != 0 {
                    continue;
                }
                let sign = if (m & ((1 << v) - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                let term = c.derivative(v)?.scale(sign);
                let key = m | (1 << v);
                let val = match out.terms.get(&key) {
                    Some(a) => a.add(&term),
                    None => term,
                };
                out.terms.insert(key, val);
            }
        }
        Ok(out)
    }

    /// Lowest jet order among the coefficients.
    pub fn order(&self) -> Option<usize> {
        self.terms.values().map(|c| c.order()).min()
    }

    pub fn truncate(&self, order: usize) -> Self {
        ExtForm {
            dim: self.dim,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (*m, c.truncate(order))).collect(),
        }
    }
}

/// `X(f) = Σ Xᵛ ∂_v f`.
pub fn apply(x: &[Jet], f: &Jet) -> Result<Jet> {
    let mut acc: Option<Jet> = None;
    for (v, xv) in x.iter().enumerate() {
        if xv.value() == 0.0 && xv.coeffs().iter().all(|c| *c == 0.0) {
            continue;
        }
        let term = xv * &f.derivative(v)?;
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
    }
    match acc {
        Some(a) => Ok(a),
        None => Ok(f.derivative(0)?.zero_like()),
    }
}

/// Lie bracket `[X, Y]^k = X(Yᵏ) − Y(Xᵏ)`; one jet order is lost.
pub fn lie_bracket(x: &[Jet], y: &[Jet]) -> Result<VectorField> {
    (0..x.len()).map(|k| Ok(apply(x, &y[k])? - apply(y, &x[k])?)).collect()
}

/// Value of `[X, Y]` at the base point from first-order data only.
pub fn lie_bracket_value(x: &[Jet], y: &[Jet]) -> Result<Vec<f64>> {
    let dim = x.len();
    let slope = |f: &Jet, v: usize| -> Result<f64> {
        if f.order() == 0 {
            return Err(GeomError::OrderExceeded { needed: 1, available: 0 });
        }
        Ok(f.coeffs()[1 + v])
    };
    (0..dim)
        .map(|k| {
            let mut s = 0.0;
            for v in 0..dim {
                s += x[v].value() * slope(&y[k], v)? - y[v].value() * slope(&x[k], v)?;
            }
            Ok(s)
        })
        .collect()
}

pub fn vector_values(x: &[Jet]) -> Vec<f64> {
    x.iter().map(|c| c.value()).collect()
}
