//! Geodesic spray, nonlinear connection and the adapted basis.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;

/// `Gⁱ` and `Nⁱ_j = ∂Gⁱ/∂yʲ` at a point.
#[derive(Debug, Clone, Serialize)]
pub struct SprayData {
    pub g: Vec<f64>,
    pub n: Vec<Vec<f64>>,
    pub at: ChartPoint,
}

pub fn spray(m: &FinslerMetric, p: &ChartPoint) -> Result<SprayData> {
    spray_from(&LocalGeometry::new(m, p, 3)?)
}

pub fn spray_from(geo: &LocalGeometry) -> Result<SprayData> {
    let nl = geo.nonlinear()?;
    Ok(SprayData {
        g: geo.spray().iter().map(|j| j.value()).collect(),
        n: nl.iter().map(|row| row.iter().map(|j| j.value()).collect()).collect(),
        at: geo.point().clone(),
    })
}

/// `δ/δxⁱ = ∂/∂xⁱ − Nʲ_i ∂/∂yʲ` and `δ/δyⁱ = F ∂/∂yⁱ` as columns of `2n`
/// coordinate components.
#[derive(Debug, Clone)]
pub struct AdaptedBasis {
    pub horizontal: Vec<Vec<f64>>,
    pub vertical: Vec<Vec<f64>>,
}

impl AdaptedBasis {
    /// Columns `δ/δx¹..δ/δxⁿ, δ/δy¹..δ/δyⁿ` as a matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.horizontal.len();
        DMatrix::from_fn(2 * n, 2 * n, |r, c| if c < n { self.horizontal[c][r] } else { self.vertical[c - n][r] })
    }
}

pub fn adapted_basis(m: &FinslerMetric, p: &ChartPoint) -> Result<AdaptedBasis> {
    adapted_basis_from(&LocalGeometry::new(m, p, 3)?)
}

pub fn adapted_basis_from(geo: &LocalGeometry) -> Result<AdaptedBasis> {
    let n = geo.dim();
    let nl = geo.nonlinear_values()?;
    let f = geo.f().value();
    let horizontal = (0..n)
        .map(|i| (0..2 * n).map(|r| if r < n { (r == i) as u8 as f64 } else { -nl[(r - n, i)] }).collect())
        .collect();
    let vertical = (0..n).map(|i| (0..2 * n).map(|r| if r == n + i { f } else { 0.0 }).collect()).collect();
    Ok(AdaptedBasis { horizontal, vertical })
}

/// `max_j |F_{xʲ} − Nᵏ_j F_{yᵏ}|`, which vanishes for every Finsler metric.
pub fn spray_compatibility(m: &FinslerMetric, p: &ChartPoint) -> Result<f64> {
    spray_compatibility_from(&LocalGeometry::new(m, p, 3)?)
}

pub fn spray_compatibility_from(geo: &LocalGeometry) -> Result<f64> {
    let n = geo.dim();
    let nl = geo.nonlinear_values()?;
    let mut r: f64 = 0.0;
    for j in 0..n {
        let fx = geo.f().derivative(j)?.value();
        let s: f64 = (0..n).map(|k| nl[(k, j)] * geo.fy()[k].value()).sum();
        r = r.max((fx - s).abs());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::christoffel_fd;

    #[test]
    fn euclidean_spray_vanishes() {
        let m = FinslerMetric::euclidean(3).unwrap();
        let p = ChartPoint::new(vec![0.1, 0.2, 0.3], vec![1.0, -0.5, 0.2]).unwrap();
        let s = spray(&m, &p).unwrap();
        assert!(s.g.iter().chain(s.n.iter().flatten()).all(|v| *v == 0.0));
        let b = adapted_basis(&m, &p).unwrap();
        for i in 0..3 {
            for r in 0..6 {
                assert_eq!(b.horizontal[i][r], if r == i { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(spray_compatibility(&m, &p).unwrap(), 0.0);
    }

    #[test]
    fn minkowski_spray_vanishes() {
        let m = FinslerMetric::randers(&[0.5, 0.0]).unwrap();
        let p = ChartPoint::new(vec![0.2, 0.2], vec![0.3, 1.0]).unwrap();
        let s = spray(&m, &p).unwrap();
        assert!(s.g.iter().all(|v| *v == 0.0));
        assert_eq!(spray_compatibility(&m, &p).unwrap(), 0.0);
    }

    #[test]
    fn sphere_spray_is_christoffel_form() {
        let m = FinslerMetric::round_sphere(2).unwrap();
        let p = ChartPoint::new(vec![0.5, 0.0], vec![0.0, 1.0]).unwrap();
        let s = spray(&m, &p).unwrap();
        let gamma = christoffel_fd(&m, p.x());
        for i in 0..2 {
            let mut q = 0.0;
            for j in 0..2 {
                for k in 0..2 {
                    q += 0.5 * gamma[i][j][k] * p.y()[j] * p.y()[k];
                }
            }
            assert!((s.g[i] - q).abs() < 1e-8, "{i}: {} vs {q}", s.g[i]);
        }
    }

    #[test]
    fn adapted_basis_is_independent() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        let p = ChartPoint::new(vec![0.2, -0.3], vec![0.5, 1.0]).unwrap();
        let det = adapted_basis(&m, &p).unwrap().matrix().determinant();
        let f = m.value(&p).unwrap();
        assert!((det - f * f).abs() < 1e-12);
        assert!(spray_compatibility(&m, &p).unwrap() < 1e-9);
    }
}
