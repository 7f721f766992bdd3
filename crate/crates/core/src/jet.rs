//! Truncated multivariate Taylor arithmetic ("jets").
//!
//! A [`Jet`] of order `K` over `m` variables stores the Taylor coefficients
//! `∂^α f / α!` for every multi-index `|α| ≤ K`, in graded order (all degree-0
//! monomials, then degree 1, ...). Truncating to a lower order is a prefix slice
//! and multiplication is a convolution over a precomputed pair table.
//!
//! Operands of different orders combine at the smaller order, so a pipeline can
//! differentiate intermediate results ([`Jet::derivative`]) and keep going: every
//! derivative costs one order.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{GeomError, Result};
use crate::point::ChartPoint;

pub const DEFAULT_ORDER: usize = 4;
pub const MAX_ORDER: usize = 6;
pub const MAX_VARS: usize = 8;

type Exponents = [u8; MAX_VARS];

fn key(e: &Exponents) -> u32 {
    e.iter().enumerate().fold(0u32, |k, (i, &x)| k | ((x as u32) << (4 * i)))
}

/// Monomial enumeration and product/derivative tables for one `(nvars, order)`.
pub struct JetTables {
    nvars: usize,
    max_order: usize,
    exps: Vec<Exponents>,
    degree: Vec<usize>,
    len_upto: Vec<usize>,
    lookup: HashMap<u32, usize>,
    // (a, b, c) with c = a + b, sorted by deg(c)
    mul: Vec<(u32, u32, u32)>,
    mul_upto: Vec<usize>,
    // deriv[v * len + a] = index of a + e_v, or u32::MAX past the top degree
    deriv: Vec<u32>,
}

fn push_degree(nvars: usize, deg: usize, prefix: &mut Exponents, pos: usize, out: &mut Vec<Exponents>) {
    if pos + 1 == nvars {
        prefix[pos] = deg as u8;
        out.push(*prefix);
        prefix[pos] = 0;
        return;
    }
    for d in (0..=deg).rev() {
        prefix[pos] = d as u8;
        push_degree(nvars, deg - d, prefix, pos + 1, out);
    }
    prefix[pos] = 0;
}

impl JetTables {
    fn build(nvars: usize, max_order: usize) -> Self {
        let mut exps = Vec::new();
        let mut len_upto = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            let mut prefix = [0u8; MAX_VARS];
            push_degree(nvars, d, &mut prefix, 0, &mut exps);
            len_upto.push(exps.len());
        }
        let degree: Vec<usize> = exps.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let lookup: HashMap<u32, usize> = exps.iter().enumerate().map(|(i, e)| (key(e), i)).collect();
        let len = exps.len();

        let mut mul = Vec::new();
        for a in 0..len {
            for b in 0..len {
                if degree[a] + degree[b] > max_order {
                    // graded order: later b only grow in degree
                    if degree[b] > max_order - degree[a] {
                        break;
                    }
                    continue;
                }
                let mut s = [0u8; MAX_VARS];
                for v in 0..nvars {
                    s[v] = exps[a][v] + exps[b][v];
                }
                mul.push((a as u32, b as u32, lookup[&key(&s)] as u32));
            }
        }
        mul.sort_by_key(|&(a, b, c)| (degree[c as usize], c, a, b));
        let mut mul_upto = vec![0usize; max_order + 1];
        for (r, slot) in mul_upto.iter_mut().enumerate() {
            *slot = mul.partition_point(|&(_, _, c)| degree[c as usize] <= r);
        }

        let mut deriv = vec![u32::MAX; nvars * len];
        for v in 0..nvars {
            for a in 0..len {
                if degree[a] < max_order {
                    let mut s = exps[a];
                    s[v] += 1;
                    deriv[v * len + a] = lookup[&key(&s)] as u32;
                }
            }
        }
        JetTables { nvars, max_order, exps, degree, len_upto, lookup, mul, mul_upto, deriv }
    }

    /// Shared tables for `nvars` variables up to `max_order`.
    pub fn get(nvars: usize, max_order: usize) -> Result<Arc<JetTables>> {
        if nvars == 0 || nvars > MAX_VARS {
            return Err(GeomError::Dimension(format!("jets support 1..={MAX_VARS} variables, got {nvars}")));
        }
        if max_order > MAX_ORDER {
            return Err(GeomError::OrderExceeded { needed: max_order, available: MAX_ORDER });
        }
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetTables>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet table cache poisoned");
        Ok(guard
            .entry((nvars, max_order))
            .or_insert_with(|| Arc::new(JetTables::build(nvars, max_order)))
            .clone())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of order `r`.
    pub fn len(&self, r: usize) -> usize {
        self.len_upto[r]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn index_of(&self, exps: &[u8]) -> Option<usize> {
        if exps.len() != self.nvars {
            return None;
        }
        let mut e = [0u8; MAX_VARS];
        e[..self.nvars].copy_from_slice(exps);
        self.lookup.get(&key(&e)).copied()
    }

    /// Exponent vector of the coefficient at `idx`.
    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx][..self.nvars]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.degree[idx]
    }
}

/// Truncated Taylor expansion of a scalar function at a fixed base point.
#[derive(Clone)]
pub struct Jet {
    tables: Arc<JetTables>,
    order: usize,
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("value", &self.coeffs[0])
            .finish()
    }
}

impl Jet {
    pub fn constant(tables: &Arc<JetTables>, value: f64) -> Jet {
        let order = tables.max_order;
        let mut coeffs = vec![0.0; tables.len(order)];
        coeffs[0] = value;
        Jet { tables: tables.clone(), order, coeffs }
    }

    /// The coordinate function `z_var` expanded at a point where it equals `value`.
    pub fn variable(tables: &Arc<JetTables>, var: usize, value: f64) -> Jet {
        let mut j = Jet::constant(tables, value);
        if j.order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// A constant with the same tables and order as `self`.
    pub fn cst(&self, value: f64) -> Jet {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        Jet { tables: self.tables.clone(), order: self.order, coeffs }
    }

    pub fn zero_like(&self) -> Jet {
        self.cst(0.0)
    }

    pub fn tables(&self) -> &Arc<JetTables> {
        &self.tables
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.tables.nvars
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw Taylor coefficients in graded order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient for the exponent vector `exps` (zero above the order).
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        match self.tables.index_of(exps) {
            Some(i) if i < self.coeffs.len() => self.coeffs[i],
            _ => 0.0,
        }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet { tables: self.tables.clone(), order, coeffs: self.coeffs[..self.tables.len(order)].to_vec() }
    }

    fn check_same(&self, other: &Jet) {
        debug_assert!(Arc::ptr_eq(&self.tables, &other.tables), "jets from different tables");
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        self.check_same(other);
        let order = self.order.min(other.order);
        let n = self.tables.len(order);
        let coeffs = (0..n).map(|i| f(self.coeffs[i], other.coeffs[i])).collect();
        Jet { tables: self.tables.clone(), order, coeffs }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { tables: self.tables.clone(), order: self.order, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] += s;
        j
    }

    /// Truncated product.
    pub fn mul_jet(&self, other: &Jet) -> Jet {
        self.check_same(other);
        let order = self.order.min(other.order);
        let t = &self.tables;
        let mut out = vec![0.0; t.len(order)];
        let (x, y) = (&self.coeffs, &other.coeffs);
        // constant operands are common (seeded params, scalars)
        if x[1..t.len(order)].iter().all(|&c| c == 0.0) {
            let s = x[0];
            for (o, &c) in out.iter_mut().zip(y.iter()) {
                *o = s * c;
            }
        } else if y[1..t.len(order)].iter().all(|&c| c == 0.0) {
            let s = y[0];
            for (o, &c) in out.iter_mut().zip(x.iter()) {
                *o = s * c;
            }
        } else {
            for &(a, b, c) in &t.mul[..t.mul_upto[order]] {
                out[c as usize] += x[a as usize] * y[b as usize];
            }
        }
        Jet { tables: t.clone(), order, coeffs: out }
    }

    /// `Σ_k taylor[k] (self - self(0))^k`, the composition with a univariate
    /// function whose Taylor coefficients at the value part are `taylor`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        let r = self.order;
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut acc = self.cst(taylor[r.min(taylor.len() - 1)]);
        for k in (0..r.min(taylor.len() - 1)).rev() {
            acc = acc.mul_jet(&h).add_scalar(taylor[k]);
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(GeomError::Domain(format!("reciprocal of {a}")));
        }
        let mut t = Vec::with_capacity(self.order + 1);
        let mut p = 1.0 / a;
        for _ in 0..=self.order {
            t.push(p);
            p *= -1.0 / a;
        }
        Ok(self.compose(&t))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul_jet(&other.recip()?))
    }

    /// `self^p` for a real exponent; requires a positive value part.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(GeomError::Domain(format!("power {p} of non-positive value {a}")));
        }
        let mut t = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for k in 0..=self.order {
            t.push(binom * a.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        Ok(self.compose(&t))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(GeomError::Domain(format!("sqrt of non-positive value {a}")));
        }
        self.powf(0.5)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f *= k as f64;
            }
            t.push(e / f);
        }
        self.compose(&t)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(GeomError::Domain(format!("log of non-positive value {a}")));
        }
        let mut t = vec![a.ln()];
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign / (k as f64 * a.powi(k as i32)));
        }
        Ok(self.compose(&t))
    }

    /// `self^other = exp(other · ln self)`.
    pub fn pow(&self, other: &Jet) -> Result<Jet> {
        Ok(other.mul_jet(&self.ln()?).exp())
    }

    /// Jet of `∂f/∂z_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(GeomError::OrderExceeded { needed: 1, available: 0 });
        }
        let t = &self.tables;
        let full = t.len(t.max_order);
        let order = self.order - 1;
        let coeffs = (0..t.len(order))
            .map(|a| {
                let src = t.deriv[var * full + a] as usize;
                (t.exps[a][var] as f64 + 1.0) * self.coeffs[src]
            })
            .collect();
        Ok(Jet { tables: t.clone(), order, coeffs })
    }

    /// Raw partial derivative `∂^α f` at the base point for exponent vector `α`.
    pub fn partial(&self, exps: &[u8]) -> Result<f64> {
        let deg: usize = exps.iter().map(|&e| e as usize).sum();
        if deg > self.order {
            return Err(GeomError::OrderExceeded { needed: deg, available: self.order });
        }
        let fact: f64 = exps.iter().map(|&e| (1..=e as u32).product::<u32>() as f64).product();
        Ok(fact * self.coeff(exps))
    }

    /// Partial derivative along the listed variables (repetition allowed).
    pub fn partial_vars(&self, vars: &[usize]) -> Result<f64> {
        self.partial(&multi_index(self.nvars(), vars))
    }

    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).map(|i| (self.coeffs[i] - other.coeffs[i]).abs()).fold(0.0, f64::max)
    }
}

/// Exponent vector with one count per listed variable.
pub fn multi_index(nvars: usize, vars: &[usize]) -> Vec<u8> {
    let mut e = vec![0u8; nvars];
    for &v in vars {
        e[v] += 1;
    }
    e
}

/// Coordinate functions `(x¹..xⁿ, y¹..yⁿ)` as jets at `p`.
pub fn seed_coordinates(p: &ChartPoint, order: usize) -> Result<Vec<Jet>> {
    if order < 1 {
        return Err(GeomError::Config("jet order must be at least 1".into()));
    }
    let tables = JetTables::get(2 * p.dim(), order)?;
    Ok(p.coords().iter().enumerate().map(|(i, &v)| Jet::variable(&tables, i, v)).collect())
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                $f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                $f(&self, rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &Jet, b: &Jet| a.zip(b, |x, y| x + y));
binop!(Sub, sub, |a: &Jet, b: &Jet| a.zip(b, |x, y| x - y));
binop!(Mul, mul, |a: &Jet, b: &Jet| a.mul_jet(b));

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Arithmetic shared by `f64` and [`Jet`], so closed-form metrics are written once
/// and evaluated both plainly (for finite-difference oracles) and as jets.
pub trait Scalar: Clone {
    fn cst(&self, v: f64) -> Self;
    fn val(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn sqrt(&self) -> Result<Self>;
    fn powf(&self, p: f64) -> Result<Self>;
    fn exp(&self) -> Self;
    fn ln(&self) -> Result<Self>;
}

impl Scalar for f64 {
    fn cst(&self, v: f64) -> Self {
        v
    }
    fn val(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if *o == 0.0 {
            return Err(GeomError::Domain("division by zero".into()));
        }
        Ok(self / o)
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(GeomError::Domain(format!("sqrt of negative value {self}")));
        }
        Ok(f64::sqrt(*self))
    }
    fn powf(&self, p: f64) -> Result<Self> {
        if *self < 0.0 {
            return Err(GeomError::Domain(format!("power of negative value {self}")));
        }
        Ok(f64::powf(*self, p))
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(GeomError::Domain(format!("log of non-positive value {self}")));
        }
        Ok(f64::ln(*self))
    }
}

impl Scalar for Jet {
    fn cst(&self, v: f64) -> Self {
        Jet::cst(self, v)
    }
    fn val(&self) -> f64 {
        self.value()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_jet(o)
    }
    fn scale(&self, s: f64) -> Self {
        Jet::scale(self, s)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Jet::div(self, o)
    }
    fn sqrt(&self) -> Result<Self> {
        Jet::sqrt(self)
    }
    fn powf(&self, p: f64) -> Result<Self> {
        Jet::powf(self, p)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Result<Self> {
        Jet::ln(self)
    }
}

/// Sum of a sequence of jets; `None` for an empty sequence.
pub fn sum<'a>(items: impl IntoIterator<Item = &'a Jet>) -> Option<Jet> {
    let mut it = items.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, j| acc + j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], y: &[f64]) -> ChartPoint {
        ChartPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn seeded_y_coordinate() {
        let z = seed_coordinates(&pt(&[0.0], &[1.0]), 2).unwrap();
        let y1 = &z[1];
        assert_eq!(y1.value(), 1.0);
        assert_eq!(y1.partial_vars(&[1]).unwrap(), 1.0);
        assert_eq!(y1.partial_vars(&[0]).unwrap(), 0.0);
        assert_eq!(y1.partial_vars(&[1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn coordinates_are_linear() {
        let z = seed_coordinates(&pt(&[0.3, -0.2], &[0.5, 1.0]), 4).unwrap();
        let t = z[0].tables().clone();
        for idx in 0..z[0].coeffs().len() {
            if t.degree(idx) >= 2 {
                assert_eq!(z[0].coeffs()[idx], 0.0);
            }
        }
    }

    #[test]
    fn bilinear_monomial() {
        let z = seed_coordinates(&pt(&[0.3, 0.1], &[1.0, 2.0]), 3).unwrap();
        let prod = &z[0] * &z[3];
        assert!((prod.value() - 0.6).abs() < 1e-15);
        assert_eq!(prod.partial_vars(&[0, 3]).unwrap(), 1.0);
    }

    #[test]
    fn sqrt_of_square_on_positive_axis() {
        let z = seed_coordinates(&pt(&[0.0, 0.0], &[2.0, 0.0]), 3).unwrap();
        let s = (&z[2] * &z[2]).sqrt().unwrap();
        assert!((s.value() - 2.0).abs() < 1e-15);
        assert!((s.partial_vars(&[2]).unwrap() - 1.0).abs() < 1e-14);
        assert!(s.partial_vars(&[2, 2]).unwrap().abs() < 1e-14);
        assert!(s.partial_vars(&[2, 2, 2]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn exp_log_roundtrip() {
        let z = seed_coordinates(&pt(&[0.4, -0.3], &[1.2, 0.7]), 4).unwrap();
        let a = (&z[0] * &z[2]).add_scalar(2.0) + &z[3] * &z[1];
        let back = a.ln().unwrap().exp();
        assert!(back.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn randers_square_value_and_slope() {
        // F = |y| + 0.5 y¹ at y = (1, 0); the slope is frozen from the central
        // difference oracle below (step 1e-5): 2·F·(y¹/|y| + 0.5) = 4.5.
        let z = seed_coordinates(&pt(&[0.0, 0.0], &[1.0, 0.0]), 3).unwrap();
        let norm = (&z[2] * &z[2] + &z[3] * &z[3]).sqrt().unwrap();
        let f = norm + z[2].scale(0.5);
        let f2 = &f * &f;
        let g = |t: f64| ((1.0f64 + t).abs() + 0.5 * (1.0 + t)).powi(2);
        let h = 1e-5;
        let fd = (g(h) - g(-h)) / (2.0 * h);
        assert!((fd - 4.5).abs() < 1e-8);
        assert!((f2.value() - 2.25).abs() < 1e-14);
        assert!((f2.partial_vars(&[2]).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn division_by_zero_value_is_domain_error() {
        let z = seed_coordinates(&pt(&[0.0, 0.0], &[1.0, 0.0]), 2).unwrap();
        assert!(matches!(z[3].recip(), Err(GeomError::Domain(_))));
        assert!(matches!(z[0].sqrt(), Err(GeomError::Domain(_))));
        assert!(matches!(z[3].scale(-1.0).ln(), Err(GeomError::Domain(_))));
    }

    #[test]
    fn partial_beyond_order_fails() {
        let z = seed_coordinates(&pt(&[0.0, 0.0], &[1.0, 0.0]), 2).unwrap();
        assert!(matches!(z[2].partial_vars(&[2, 2, 2]), Err(GeomError::OrderExceeded { .. })));
        let d = z[2].derivative(2).unwrap().derivative(2).unwrap();
        assert!(matches!(d.derivative(2), Err(GeomError::OrderExceeded { .. })));
    }

    #[test]
    fn cube_third_derivative() {
        let z = seed_coordinates(&pt(&[0.0], &[0.7]), 4).unwrap();
        let c = &z[1] * &z[1] * &z[1];
        assert!((c.partial_vars(&[1, 1, 1]).unwrap() - 6.0).abs() < 1e-13);
        let k = z[1].cst(3.0);
        assert_eq!(k.partial_vars(&[1]).unwrap(), 0.0);
        assert_eq!(k.partial_vars(&[0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn table_sizes() {
        let t = JetTables::get(4, 4).unwrap();
        assert_eq!(t.len(4), 70);
        assert_eq!(t.len(0), 1);
        assert!(JetTables::get(9, 2).is_err());
        assert!(JetTables::get(2, 7).is_err());
    }
}
