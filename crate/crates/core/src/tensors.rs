//! Tensors from fiberwise derivatives of `F²`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;

/// `g_{ij} = ½[F²]_{yⁱyʲ}` and its inverse.
#[derive(Debug, Clone)]
pub struct FundamentalTensor {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub at: ChartPoint,
}

/// `A_{ijk} = ¼F[F²]_{yⁱyʲyᵏ}`.
#[derive(Debug, Clone, Serialize)]
pub struct CartanTensor {
    pub n: usize,
    pub a: Vec<f64>,
    pub at: ChartPoint,
}

impl CartanTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.a[(i * self.n + j) * self.n + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `max_{ij} |A_{ijk} yᵏ|`.
    pub fn euler_residual(&self) -> f64 {
        let n = self.n;
        let y = self.at.y();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| self.get(i, j, k) * y[k]).sum();
                r = r.max(s.abs());
            }
        }
        r
    }

    /// Largest deviation from total symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.get(i, j, k);
                    r = r.max((a - self.get(j, i, k)).abs()).max((a - self.get(i, k, j)).abs());
                }
            }
        }
        r
    }
}

pub fn fundamental_tensor(m: &FinslerMetric, p: &ChartPoint) -> Result<FundamentalTensor> {
    let geo = LocalGeometry::new(m, p, 2)?;
    fundamental_from(&geo)
}

pub fn fundamental_from(geo: &LocalGeometry) -> Result<FundamentalTensor> {
    let g = geo.g_values();
    let chol = g.clone().cholesky().ok_or_else(|| GeomError::NotPositiveDefinite("Cholesky factorization failed".into()))?;
    Ok(FundamentalTensor { g_inv: chol.inverse(), g, at: geo.point().clone() })
}

pub fn cartan_tensor(m: &FinslerMetric, p: &ChartPoint) -> Result<CartanTensor> {
    let geo = LocalGeometry::new(m, p, 3)?;
    cartan_from(&geo)
}

pub fn cartan_from(geo: &LocalGeometry) -> Result<CartanTensor> {
    Ok(CartanTensor { n: geo.dim(), a: geo.cartan()?.iter().map(|j| j.value()).collect(), at: geo.point().clone() })
}

/// `A_k = g^{ij}A_{ijk}`, the coefficients of the Cartan form `𝐈 = A_k dxᵏ`.
pub fn cartan_form_i_coeffs(m: &FinslerMetric, p: &ChartPoint) -> Result<Vec<f64>> {
    let geo = LocalGeometry::new(m, p, 3)?;
    cartan_form_from(&geo)
}

pub fn cartan_form_from(geo: &LocalGeometry) -> Result<Vec<f64>> {
    let n = geo.dim();
    let a = cartan_from(geo)?;
    let ginv = geo.g_inv_values();
    Ok((0..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += ginv[(i, j)] * a.get(i, j, k);
                }
            }
            s
        })
        .collect())
}
