//! Moving frame, coframe, Sasaki-type metric, almost complex structure and the
//! bracket table of the frame fields.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::forms::{apply, lie_bracket_value, ExtForm, FormField, VectorField};
use crate::local::{LocalGeometry, FRAME_PIVOT_MIN};
use crate::metric::{random_point, FinslerMetric};
use crate::point::ChartPoint;

/// `v` and `u = v⁻¹` with `ωⁱ = vⁱ_j dxʲ` and `e_i = uʲ_i δ/δxʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameData {
    pub v: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub at: ChartPoint,
}

pub fn build_frame(m: &FinslerMetric, p: &ChartPoint) -> Result<FrameData> {
    frame_data(&LocalGeometry::new(m, p, 2)?)
}

pub fn frame_data(geo: &LocalGeometry) -> Result<FrameData> {
    Ok(FrameData { v: geo.v_values()?, u: geo.u_values()?, at: geo.point().clone() })
}

/// Residuals of the algebraic identities satisfied by the frame matrices.
#[derive(Debug, Clone, Serialize)]
pub struct FrameIdentities {
    /// `‖u v − I‖`.
    pub inverse: f64,
    /// `‖uᵀ g u − I‖`.
    pub orthonormal: f64,
    /// `‖vⁿ_i − F_{yⁱ}‖` and `‖uⁱ_n − yⁱ/F‖`.
    pub hilbert_row: f64,
    /// `‖Σ_α v^α_i v^α_j − F F_{yⁱyʲ}‖`.
    pub angular: f64,
    /// `‖F F_{yⁱ} gⁱʲ − yʲ‖`.
    pub euler: f64,
    /// `|g_{ij}yⁱyʲ − F²| / F²`.
    pub euler_g: f64,
}

impl FrameIdentities {
    pub fn max(&self) -> f64 {
        [self.inverse, self.orthonormal, self.hilbert_row, self.angular, self.euler].into_iter().fold(0.0, f64::max)
    }
}

pub fn frame_identities(geo: &LocalGeometry) -> Result<FrameIdentities> {
    let n = geo.dim();
    let u = geo.u_values()?;
    let v = geo.v_values()?;
    let g = geo.g_values();
    let ginv = geo.g_inv_values();
    let f = geo.f().value();
    let y = geo.point().y().to_vec();
    let id = DMatrix::<f64>::identity(n, n);
    let inverse = (&u * &v - &id).abs().max();
    let orthonormal = (u.transpose() * &g * &u - &id).abs().max();
    let mut hilbert_row: f64 = 0.0;
    for i in 0..n {
        hilbert_row = hilbert_row.max((v[(n - 1, i)] - geo.fy()[i].value()).abs());
        hilbert_row = hilbert_row.max((u[(i, n - 1)] - y[i] / f).abs());
    }
    let mut angular: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n - 1).map(|a| v[(a, i)] * v[(a, j)]).sum();
            let fyy = geo.fy()[i].derivative(n + j)?.value();
            angular = angular.max((s - f * fyy).abs());
        }
    }
    let mut euler: f64 = 0.0;
    for j in 0..n {
        let s: f64 = (0..n).map(|i| f * geo.fy()[i].value() * ginv[(i, j)]).sum();
        euler = euler.max((s - y[j]).abs());
    }
    let mut gyy = 0.0;
    for i in 0..n {
        for j in 0..n {
            gyy += g[(i, j)] * y[i] * y[j];
        }
    }
    Ok(FrameIdentities { inverse, orthonormal, hilbert_row, angular, euler, euler_g: (gyy - f * f).abs() / (f * f) })
}

/// Smallest Gram–Schmidt pivot of the moving frame, from plain `f64` values.
pub fn frame_pivot(geo: &LocalGeometry) -> f64 {
    let n = geo.dim();
    let g = geo.g_values();
    let f = geo.f().value();
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * g[(i, j)] * b[j];
            }
        }
        s
    };
    let mut done: Vec<Vec<f64>> = vec![geo.point().y().iter().map(|c| c / f).collect()];
    let mut pivot = f64::INFINITY;
    for k in 0..n - 1 {
        let mut w: Vec<f64> = (0..n).map(|i| (i == k) as u8 as f64).collect();
        for e in &done {
            let c = inner(&w, e);
            w = w.iter().zip(e).map(|(wi, ei)| wi - c * ei).collect();
        }
        let norm = inner(&w, &w).max(0.0).sqrt();
        pivot = pivot.min(norm);
        if norm < FRAME_PIVOT_MIN {
            break;
        }
        done.push(w.iter().map(|c| c / norm).collect());
    }
    pivot
}

/// Pivot floor used when sampling, well above [`FRAME_PIVOT_MIN`], so that
/// frame coefficients stay well conditioned at every returned point.
pub const SAMPLE_PIVOT_MIN: f64 = 1e-2;

/// `count` points on the indicatrix `F = 1`, reproducible from `seed`; `x` is
/// drawn in the metric's sampling box and `y = d/F(x, d)` for a uniform
/// direction `d`. Directions whose frame would be nearly degenerate are
/// redrawn.
pub fn indicatrix_sample(m: &FinslerMetric, count: usize, seed: u64) -> Result<Vec<ChartPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(GeomError::Domain(format!("could not sample {count} regular points for {}", m.name())));
        }
        let p = random_point(m, &mut rng);
        let f = match m.value(&p) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let q = p.scaled(1.0 / f)?;
        match LocalGeometry::new(m, &q, 2) {
            Ok(geo) if frame_pivot(&geo) >= SAMPLE_PIVOT_MIN => out.push(q),
            Ok(_) => continue,
            Err(GeomError::NotPositiveDefinite(_)) => out.push(q),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Coframe values as rows over the `2n` coordinate directions.
pub fn coframe_values(geo: &LocalGeometry) -> Result<DMatrix<f64>> {
    let dim = 2 * geo.dim();
    let cf = geo.coframe()?;
    Ok(DMatrix::from_fn(dim, dim, |a, c| cf[a].component(1 << c).map(|j| j.value()).unwrap_or(0.0)))
}

/// `max |ωᵃ(e_b) − δᵃ_b|` over the full `2n` frame.
pub fn duality_residual(geo: &LocalGeometry) -> Result<f64> {
    let w = coframe_values(geo)?;
    let e = geo.frame_values()?;
    let dim = e.len();
    let emat = DMatrix::from_fn(dim, dim, |r, c| e[c][r]);
    Ok((w * emat - DMatrix::identity(dim, dim)).abs().max())
}

/// `‖ω^{2n} + d log F‖`.
pub fn log_f_residual(geo: &LocalGeometry) -> Result<f64> {
    let n = geo.dim();
    let w = coframe_values(geo)?;
    let f = geo.f().value();
    let mut r: f64 = 0.0;
    for c in 0..2 * n {
        let dlog = geo.f().derivative(c)?.value() / f;
        r = r.max((w[(2 * n - 1, c)] + dlog).abs());
    }
    Ok(r)
}

/// `‖dωⁿ − Σ_α ω^α ∧ ω^{n+α}‖` in coordinates.
pub fn hilbert_form_residual(geo: &LocalGeometry) -> Result<f64> {
    let n = geo.dim();
    let cf = geo.coframe()?;
    let d = cf[n - 1].d()?.values();
    let mut rhs = ExtForm::<f64>::zero(2 * n, 2);
    for a in 0..n - 1 {
        rhs = rhs.add(&cf[a].values().wedge(&cf[n + a].values()));
    }
    Ok(d.sub(&rhs).max_abs())
}

/// `(ω ∧ (dω)^{n−1})(e_1, …, e_{2n−1})` for the Hilbert form `ω = ωⁿ`.
pub fn contact_volume(geo: &LocalGeometry) -> Result<f64> {
    let n = geo.dim();
    let cf = geo.coframe()?;
    let w = cf[n - 1].values();
    let dw = cf[n - 1].d()?.values();
    let mut top = w;
    for _ in 0..n - 1 {
        top = top.wedge(&dw);
    }
    let e = geo.frame_values()?;
    let args: Vec<&[f64]> = e.iter().take(2 * n - 1).map(|v| v.as_slice()).collect();
    Ok(top.eval(&args))
}

/// `c[a][b][d] = ωᵈ([e_a, e_b])` for all `a, b, d < 2n`.
#[derive(Debug, Clone)]
pub struct Brackets {
    pub dim: usize,
    pub c: Vec<f64>,
}

impl Brackets {
    pub fn get(&self, a: usize, b: usize, d: usize) -> f64 {
        self.c[(a * self.dim + b) * self.dim + d]
    }
}

/// Structure functions of the moving frame from first jets of its components.
pub fn brackets(geo: &LocalGeometry) -> Result<Brackets> {
    let frame = geo.frame()?;
    let w = coframe_values(geo)?;
    brackets_of(frame, &w)
}

/// Structure functions of arbitrary fields against a dual coframe (rows of `w`).
pub fn brackets_of(frame: &[VectorField], w: &DMatrix<f64>) -> Result<Brackets> {
    let dim = frame.len();
    let mut c = vec![0.0; dim * dim * dim];
    for a in 0..dim {
        for b in (a + 1)..dim {
            let br = lie_bracket_value(&frame[a], &frame[b])?;
            for d in 0..dim {
                let val: f64 = (0..w.ncols()).map(|k| w[(d, k)] * br[k]).sum();
                c[(a * dim + b) * dim + d] = val;
                c[(b * dim + a) * dim + d] = -val;
            }
        }
    }
    Ok(Brackets { dim, c })
}

/// `(L_X h)(U, V) = X(h(U,V)) − h([X,U],V) − h(U,[X,V])` for the symmetric
/// tensor `h = Σ θᵏ⊗θᵏ`, over all pairs of `fields`.
pub fn lie_derivative_tensor(x: &VectorField, fields: &[VectorField], theta: &[FormField]) -> Result<DMatrix<f64>> {
    let k = fields.len();
    let pair = |u: &[crate::jet::Jet], v: &[crate::jet::Jet]| {
        let mut acc = theta[0].eval(&[u]).zero_like();
        for t in theta {
            acc = acc + t.eval(&[u]) * t.eval(&[v]);
        }
        acc
    };
    let theta_vals: Vec<ExtForm<f64>> = theta.iter().map(|t| t.values()).collect();
    let h = |u: &[f64], v: &[f64]| -> f64 { theta_vals.iter().map(|t| t.eval(&[u]) * t.eval(&[v])).sum() };
    let vals: Vec<Vec<f64>> = fields.iter().map(|f| f.iter().map(|c| c.value()).collect()).collect();
    let br: Vec<Vec<f64>> = fields.iter().map(|f| lie_bracket_value(x, f)).collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let xh = apply(x, &pair(&fields[a], &fields[b]))?.value();
            let v = xh - h(&br[a], &vals[b]) - h(&vals[a], &br[b]);
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    Ok(out)
}

/// `L_X g` on the `2n−1` frame fields of `SM`, with `g = Σ_{i≤n} ωⁱ⊗ωⁱ`.
pub fn lie_derivative_metric(geo: &LocalGeometry, x: &VectorField) -> Result<DMatrix<f64>> {
    let n = geo.dim();
    let frame = geo.frame()?;
    let cf = geo.coframe()?;
    lie_derivative_tensor(x, &frame[..2 * n - 1], &cf[..n])
}

/// `‖L_𝐆 g + Σ_α (ω^α⊗ω^{n+α} + ω^{n+α}⊗ω^α)‖` on frame pairs.
pub fn reeb_lie_residual(geo: &LocalGeometry) -> Result<f64> {
    let n = geo.dim();
    let reeb = geo.frame()?[n - 1].clone();
    let l = lie_derivative_metric(geo, &reeb)?;
    let mut r: f64 = 0.0;
    for a in 0..2 * n - 1 {
        for b in 0..2 * n - 1 {
            let mixed = ((a < n - 1 && b == n + a) || (b < n - 1 && a == n + b)) as u8 as f64;
            r = r.max((l[(a, b)] + mixed).abs());
        }
    }
    Ok(r)
}

/// Gram matrix of `e_1..e_{2n−1}` under the `ε`-rescaled Sasaki-type metric,
/// the metric being assembled in coordinates from `g`, `N` and `F_y`.
pub fn sasaki_metric(geo: &LocalGeometry, eps: f64) -> Result<DMatrix<f64>> {
    if !(eps > 0.0) {
        return Err(GeomError::Config(format!("ε must be positive, got {eps}")));
    }
    let n = geo.dim();
    let s = geo.sasaki_coordinate_metric(eps)?;
    let e = geo.frame_values()?;
    let k = 2 * n - 1;
    let emat = DMatrix::from_fn(2 * n, k, |r, c| e[c][r]);
    Ok(emat.transpose() * s * emat)
}

/// Diagonal of the rescaled Sasaki Gram matrix on `e_1..e_{2n−1}`.
pub fn sasaki_diagonal(n: usize, eps: f64) -> Vec<f64> {
    (0..2 * n - 1).map(|a| if a < n { 1.0 / (eps * eps) } else { 1.0 }).collect()
}

/// The almost complex structure as a `2n × 2n` coordinate matrix.
pub fn almost_complex_j(geo: &LocalGeometry) -> Result<DMatrix<f64>> {
    let n = geo.dim();
    let b = crate::spray::adapted_basis_from(geo)?.matrix();
    let mut jad = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        jad[(n + i, i)] = 1.0;
        jad[(i, n + i)] = -1.0;
    }
    let binv = b.clone().try_inverse().ok_or_else(|| GeomError::DegenerateFrame(0.0))?;
    Ok(&b * jad * binv)
}

/// Residuals of `J² = −1`, `J*ω^α = ω^{n+α}` and `J*δxⁱ = −δyⁱ`.
pub fn almost_complex_residuals(geo: &LocalGeometry) -> Result<(f64, f64, f64)> {
    let n = geo.dim();
    let j = almost_complex_j(geo)?;
    let square = (&j * &j + DMatrix::identity(2 * n, 2 * n)).abs().max();
    let w = coframe_values(geo)?;
    let pulled = &w * &j;
    let mut coframe: f64 = 0.0;
    for a in 0..n {
        for c in 0..2 * n {
            coframe = coframe.max((pulled[(a, c)] - w[(n + a, c)]).abs());
        }
    }
    let nl = geo.nonlinear_values()?;
    let f = geo.f().value();
    let mut adapted: f64 = 0.0;
    for i in 0..n {
        for c in 0..2 * n {
            let jdx = j[(i, c)];
            let dy = if c < n { nl[(i, c)] / f } else if c - n == i { 1.0 / f } else { 0.0 };
            adapted = adapted.max((jdx + dy).abs());
        }
    }
    Ok((square, coframe, adapted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_and_normalized() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        let a = indicatrix_sample(&m, 4, 42).unwrap();
        let b = indicatrix_sample(&m, 4, 42).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!((m.value(p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn euclidean_coframe() {
        let m = FinslerMetric::euclidean(2).unwrap();
        let p = ChartPoint::new(vec![0.1, 0.2], vec![0.0, 1.0]).unwrap();
        let geo = LocalGeometry::at(&m, &p).unwrap();
        let w = coframe_values(&geo).unwrap();
        // ωⁿ = dx²
        assert_eq!(w.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0, 0.0]);
        assert!(duality_residual(&geo).unwrap() < 1e-15);
    }

    #[test]
    fn frame_identities_hold_for_funk() {
        let m = FinslerMetric::funk(3, 1.0).unwrap();
        for p in indicatrix_sample(&m, 8, 5).unwrap() {
            let geo = LocalGeometry::at(&m, &p).unwrap();
            let id = frame_identities(&geo).unwrap();
            assert!(id.max() < 1e-10, "{id:?}");
            assert!(duality_residual(&geo).unwrap() < 1e-10);
            assert!(log_f_residual(&geo).unwrap() < 1e-9);
            assert!(hilbert_form_residual(&geo).unwrap() < 1e-8);
            assert!(reeb_lie_residual(&geo).unwrap() < 1e-8);
            assert!((contact_volume(&geo).unwrap().abs() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn wedge_of_coframe_on_frame() {
        let m = FinslerMetric::randers(&[0.5, 0.0]).unwrap();
        let p = indicatrix_sample(&m, 1, 9).unwrap().remove(0);
        let geo = LocalGeometry::at(&m, &p).unwrap();
        let cf = geo.coframe().unwrap();
        let e = geo.frame_values().unwrap();
        let w12 = cf[0].values().wedge(&cf[1].values());
        assert!((w12.eval(&[&e[0], &e[1]]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radial_part_of_vertical_bracket_vanishes() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        for p in indicatrix_sample(&m, 4, 3).unwrap() {
            let geo = LocalGeometry::at(&m, &p).unwrap();
            let c = brackets(&geo).unwrap();
            assert!(c.get(2, 1, 3).abs() < 1e-9);
        }
    }

    #[test]
    fn sasaki_gram_and_j() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        for p in indicatrix_sample(&m, 4, 8).unwrap() {
            let geo = LocalGeometry::at(&m, &p).unwrap();
            let gram = sasaki_metric(&geo, 1.0).unwrap();
            assert!((gram - DMatrix::identity(3, 3)).abs().max() < 1e-10);
            let half = sasaki_metric(&geo, 0.5).unwrap();
            assert!((half[(0, 0)] - 4.0).abs() < 1e-10 && (half[(1, 1)] - 4.0).abs() < 1e-10);
            let (sq, cf, ad) = almost_complex_residuals(&geo).unwrap();
            assert!(sq < 1e-12 && cf < 1e-10 && ad < 1e-12, "{sq} {cf} {ad}");
        }
    }

    #[test]
    fn degree_zero_quantities_are_scale_invariant() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        let p = indicatrix_sample(&m, 1, 17).unwrap().remove(0);
        let a = LocalGeometry::at(&m, &p).unwrap();
        let b = LocalGeometry::at(&m, &p.scaled(3.0).unwrap()).unwrap();
        assert!((a.g_values() - b.g_values()).abs().max() < 1e-9);
        assert!((a.u_values().unwrap() - b.u_values().unwrap()).abs().max() < 1e-9);
    }
}
