//! Finite-difference oracles that share no derivative code with the jet
//! pipeline. They are slow and only accurate to roughly `1e-8`; tests use them
//! to cross-check the exact computations.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::fd::fd_directional;
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;

const STEP: f64 = 1e-4;

fn unit(dim: usize, i: usize) -> Vec<f64> {
    (0..dim).map(|k| (k == i) as u8 as f64).collect()
}

fn riemannian_a(m: &FinslerMetric, x: &[f64]) -> DMatrix<f64> {
    let a = m.riemannian_coefficients(x).expect("oracle needs a Riemannian metric");
    DMatrix::from_fn(x.len(), x.len(), |i, j| a[i][j])
}

/// `γⁱ_{jk}` of `a_{ij}(x)`, indexed `[i][j][k]`.
pub fn christoffel_fd(m: &FinslerMetric, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
    christoffel_fd_step(m, x, STEP)
}

fn christoffel_fd_step(m: &FinslerMetric, x: &[f64], h: f64) -> Vec<Vec<Vec<f64>>> {
    let n = x.len();
    let flat = |z: &[f64]| riemannian_a(m, z).iter().copied().collect::<Vec<f64>>();
    // da[k][(i,j)] = ∂_k a_ij, column-major as stored by nalgebra
    let da: Vec<Vec<f64>> = (0..n).map(|k| fd_directional(&flat, x, &unit(n, k), h)).collect();
    let d = |k: usize, i: usize, j: usize| da[k][i + j * n];
    let ainv = riemannian_a(m, x).try_inverse().expect("a is invertible");
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| (0..n).map(|l| 0.5 * ainv[(i, l)] * (d(j, l, k) + d(k, l, j) - d(l, j, k))).sum())
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Gauss curvature of a Riemannian surface from nested differences of `a_{ij}`.
pub fn gauss_curvature_fd(m: &FinslerMetric, x: &[f64]) -> f64 {
    assert_eq!(x.len(), 2);
    let h = 1e-3;
    let gam = christoffel_fd(m, x);
    let flat = |z: &[f64]| christoffel_fd(m, z).into_iter().flatten().flatten().collect::<Vec<f64>>();
    let dg: Vec<Vec<f64>> = (0..2).map(|k| fd_directional(&flat, x, &unit(2, k), h)).collect();
    let dgam = |k: usize, l: usize, i: usize, j: usize| dg[k][(l * 2 + i) * 2 + j];
    // R(∂₁,∂₂)∂₂ = Rˡ ∂_l
    let r: Vec<f64> = (0..2)
        .map(|l| {
            let mut s = dgam(0, l, 2 - 1, 1) - dgam(1, l, 0, 1);
            for mm in 0..2 {
                s += gam[mm][1][1] * gam[l][0][mm] - gam[mm][0][1] * gam[l][1][mm];
            }
            s
        })
        .collect();
    let a = riemannian_a(m, x);
    (a[(0, 0)] * r[0] + a[(0, 1)] * r[1]) / a.determinant()
}

fn frame_u(m: &FinslerMetric, z: &[f64]) -> Result<Vec<f64>> {
    let p = ChartPoint::from_coords(z)?;
    let geo = LocalGeometry::new(m, &p, 2)?;
    Ok(geo.u_values()?.iter().copied().collect())
}

/// Frame coefficients `ω_jⁱ(e_a)` of the Levi-Civita connection of `a_{ij}`
/// pulled back to `TM₀`, for every frame field `e_a` (`a < 2n−1`), indexed
/// `[a][i][j]`. The moving frame is differentiated numerically.
pub fn riemannian_frame_connection_fd(m: &FinslerMetric, p: &ChartPoint) -> Result<Vec<Vec<Vec<f64>>>> {
    if !m.is_riemannian() {
        return Err(GeomError::InvalidMetric("Riemannian oracle on a non-Riemannian metric".into()));
    }
    let n = m.dim();
    let geo = LocalGeometry::new(m, p, 3)?;
    let frame = geo.frame_values()?;
    let u = geo.u_values()?;
    let v = geo.v_values()?;
    let gam = christoffel_fd(m, p.x());
    let z = p.coords();
    let fu = |w: &[f64]| frame_u(m, w).unwrap_or_else(|_| vec![f64::NAN; n * n]);
    let mut out = Vec::with_capacity(2 * n - 1);
    for e in frame.iter().take(2 * n - 1) {
        let du = fd_directional(&fu, &z, e, STEP);
        let du = DMatrix::from_column_slice(n, n, &du);
        let mut table = vec![vec![0.0; n]; n];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for mm in 0..n {
                    let mut inner = du[(mm, j)];
                    for l in 0..n {
                        for k in 0..n {
                            inner += gam[mm][l][k] * e[l] * u[(k, j)];
                        }
                    }
                    s += v[(i, mm)] * inner;
                }
                *entry = s;
            }
        }
        out.push(table);
    }
    Ok(out)
}

fn coframe_metric(m: &FinslerMetric, z: &[f64]) -> Result<Vec<f64>> {
    let p = ChartPoint::from_coords(z)?;
    let geo = LocalGeometry::new(m, &p, 3)?;
    let dim = z.len();
    let rows: Vec<Vec<f64>> = geo
        .coframe()?
        .iter()
        .map(|w| {
            let vals = w.values();
            (0..dim).map(|c| vals.coefficient(&[c])).collect()
        })
        .collect();
    let mut out = vec![0.0; dim * dim];
    for r in &rows {
        for a in 0..dim {
            for b in 0..dim {
                out[a * dim + b] += r[a] * r[b];
            }
        }
    }
    Ok(out)
}

fn frame_flat(m: &FinslerMetric, z: &[f64]) -> Result<Vec<f64>> {
    let p = ChartPoint::from_coords(z)?;
    let geo = LocalGeometry::new(m, &p, 3)?;
    Ok(geo.frame_values()?.into_iter().flatten().collect())
}

/// `⟨∇_{e_a} e_b, e_c⟩` for the Sasaki-type metric (`ε = 1`), from coordinate
/// Christoffel symbols of `Σ_{a ≤ 2n} ωᵃ⊗ωᵃ` on `TM₀`, indexed `[a][b][c]` over
/// `a, b, c < 2n−1`. The radial direction is a Riemannian submersion fiber, so
/// these equal the Levi-Civita coefficients on `SM`.
pub fn sasaki_connection_fd(m: &FinslerMetric, p: &ChartPoint) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = m.dim();
    let dim = 2 * n;
    let z = p.coords();
    let gm = |w: &[f64]| coframe_metric(m, w).unwrap_or_else(|_| vec![f64::NAN; dim * dim]);
    let g0 = DMatrix::from_row_slice(dim, dim, &coframe_metric(m, &z)?);
    let dg: Vec<Vec<f64>> = (0..dim).map(|q| fd_directional(&gm, &z, &unit(dim, q), STEP)).collect();
    let d = |q: usize, a: usize, b: usize| dg[q][a * dim + b];
    // Γ_{s,qr} = ½(∂_q g_{sr} + ∂_r g_{sq} − ∂_s g_{qr})
    let first = |s: usize, q: usize, r: usize| 0.5 * (d(q, s, r) + d(r, s, q) - d(s, q, r));
    let geo = LocalGeometry::new(m, p, 3)?;
    let frame = geo.frame_values()?;
    let ff = |w: &[f64]| frame_flat(m, w).unwrap_or_else(|_| vec![f64::NAN; dim * dim]);
    let sm = dim - 1;
    let mut out = vec![vec![vec![0.0; sm]; sm]; sm];
    for a in 0..sm {
        let dframe = fd_directional(&ff, &z, &frame[a], STEP);
        for b in 0..sm {
            let xy: Vec<f64> = (0..dim).map(|k| dframe[b * dim + k]).collect();
            for c in 0..sm {
                let mut s = 0.0;
                for q in 0..dim {
                    for r in 0..dim {
                        s += g0[(q, r)] * xy[q] * frame[c][r];
                    }
                }
                for ss in 0..dim {
                    for q in 0..dim {
                        for r in 0..dim {
                            s += first(ss, q, r) * frame[a][q] * frame[b][r] * frame[c][ss];
                        }
                    }
                }
                out[a][b][c] = s;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_signs() {
        let s = FinslerMetric::round_sphere(2).unwrap();
        assert!((gauss_curvature_fd(&s, &[0.4, -0.3]) - 1.0).abs() < 1e-6);
        let h = FinslerMetric::hyperbolic(2).unwrap();
        assert!((gauss_curvature_fd(&h, &[0.2, 0.9]) + 1.0).abs() < 1e-6);
        let e = FinslerMetric::euclidean(2).unwrap();
        assert!(gauss_curvature_fd(&e, &[0.2, 0.9]).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_christoffels() {
        // a = δ/y²: γ¹₁₂ = −1/y, γ²₁₁ = 1/y, γ²₂₂ = −1/y
        let h = FinslerMetric::hyperbolic(2).unwrap();
        let g = christoffel_fd(&h, &[0.3, 0.5]);
        assert!((g[0][0][1] + 2.0).abs() < 1e-8);
        assert!((g[1][0][0] - 2.0).abs() < 1e-8);
        assert!((g[1][1][1] + 2.0).abs() < 1e-8);
        assert!(g[0][0][0].abs() < 1e-8);
    }
}
