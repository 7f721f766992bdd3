//! Central finite-difference oracle for mixed partial derivatives.
//!
//! Independent of the jet engine: it only calls a plain `f64` evaluator. Used to
//! cross-check jet derivatives, never as the primary method.

use crate::point::ChartPoint;

/// Stencil `(offset multiples of h, weight)` of the second-order central
/// difference for the `m`-th derivative, already divided by nothing; the caller
/// divides by `h^m`.
fn stencil(m: usize) -> &'static [(f64, f64)] {
    match m {
        0 => &[(0.0, 1.0)],
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        4 => &[(2.0, 1.0), (1.0, -4.0), (0.0, 6.0), (-1.0, -4.0), (-2.0, 1.0)],
        _ => panic!("finite-difference stencil only up to order 4"),
    }
}

/// Step used for a derivative of total order `order`.
pub fn default_step(order: usize) -> f64 {
    if order >= 3 {
        1e-2
    } else {
        1e-4
    }
}

fn central(f: &dyn Fn(&[f64]) -> f64, z: &[f64], counts: &[u8], h: f64) -> f64 {
    // tensor product of one-dimensional stencils over the active variables
    let active: Vec<(usize, usize)> =
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, &c)| (v, c as usize)).collect();
    let order: usize = active.iter().map(|&(_, c)| c).sum();
    let mut total = 0.0;
    let mut idx = vec![0usize; active.len()];
    loop {
        let mut w = 1.0;
        let mut pt = z.to_vec();
        for (k, &(v, c)) in active.iter().enumerate() {
            let (off, wt) = stencil(c)[idx[k]];
            pt[v] += off * h;
            w *= wt;
        }
        total += w * f(&pt);
        // odometer
        let mut k = 0;
        loop {
            if k == active.len() {
                return total / h.powi(order as i32);
            }
            idx[k] += 1;
            if idx[k] < stencil(active[k].1).len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Estimate `∂^α f(p)` for the exponent vector `alpha` (`|α| ≤ 4`) with one
/// Richardson step: `(4 D(h/2) - D(h)) / 3`.
pub fn fd_oracle(f: &dyn Fn(&[f64]) -> f64, p: &ChartPoint, alpha: &[u8]) -> f64 {
    let order: usize = alpha.iter().map(|&a| a as usize).sum();
    assert!(order <= 4, "fd_oracle supports total order ≤ 4");
    let z = p.coords();
    if order == 0 {
        return f(&z);
    }
    let h = default_step(order);
    let coarse = central(f, &z, alpha, h);
    let fine = central(f, &z, alpha, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Richardson-extrapolated central first derivative of a vector-valued map along
/// direction `dir` from `z`.
pub fn fd_directional(f: &dyn Fn(&[f64]) -> Vec<f64>, z: &[f64], dir: &[f64], h: f64) -> Vec<f64> {
    let at = |s: f64| {
        let pt: Vec<f64> = z.iter().zip(dir).map(|(a, d)| a + s * d).collect();
        f(&pt)
    };
    let diff = |h: f64| -> Vec<f64> {
        let (p, m) = (at(h), at(-h));
        p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    };
    let (c, fz) = (diff(h), diff(h / 2.0));
    c.iter().zip(&fz).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_mixed_partial() {
        let p = ChartPoint::new(vec![0.0, 0.1], vec![1.0, 0.0]).unwrap();
        let f = |z: &[f64]| z[0] * z[3];
        let d = fd_oracle(&f, &p, &[1, 0, 0, 1]);
        assert!((d - 1.0).abs() < 1e-9, "{d}");
        // away from the zero set the rounding floor ε|f|/h² dominates
        let q = ChartPoint::new(vec![0.3, 0.1], vec![1.0, 2.0]).unwrap();
        assert!((fd_oracle(&f, &q, &[1, 0, 0, 1]) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn gradient_of_norm() {
        let p = ChartPoint::new(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap();
        let f = |z: &[f64]| (z[2] * z[2] + z[3] * z[3]).sqrt();
        let d = fd_oracle(&f, &p, &[0, 0, 1, 0]);
        assert!((d - 0.6).abs() < 1e-7);
    }

    #[test]
    fn fourth_order_of_polynomial() {
        let p = ChartPoint::new(vec![0.2], vec![0.5]).unwrap();
        let f = |z: &[f64]| z[0].powi(2) * z[1].powi(3) + z[1].powi(4);
        // ∂²x ∂²y = 2·6y = 6 at y = 0.5; ∂⁴y = 24
        assert!((fd_oracle(&f, &p, &[2, 2]) - 6.0).abs() < 1e-6);
        assert!((fd_oracle(&f, &p, &[0, 4]) - 24.0).abs() < 1e-5);
    }
}
