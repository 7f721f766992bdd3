//! Jets of every pointwise object built from `F` at one chart point.
//!
//! Jet orders drop along the pipeline: with `F` at order `K`, the fundamental
//! tensor, spray and frame matrices are known to order `K-2`, the Cartan
//! tensor, nonlinear connection, moving frame and coframe to order `K-3`.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::forms::{FormField, VectorField};
use crate::jet::{seed_coordinates, Jet, DEFAULT_ORDER};
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;

/// Gram–Schmidt pivots below this norm are rejected.
pub const FRAME_PIVOT_MIN: f64 = 1e-10;

pub type JetMatrix = Vec<Vec<Jet>>;

/// Inverse of a jet matrix by Gauss–Jordan elimination with partial pivoting
/// on the value part.
pub fn jet_inverse(m: &[Vec<Jet>]) -> Result<JetMatrix> {
    let n = m.len();
    let mut a: JetMatrix = m.to_vec();
    let zero = m[0][0].zero_like();
    let mut inv: JetMatrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { zero.cst(1.0) } else { zero.clone() }).collect()).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
            .expect("nonempty");
        if a[piv][col].value().abs() < 1e-300 {
            return Err(GeomError::NotPositiveDefinite("singular matrix".into()));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let r = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col].clone();
            if f.coeffs().iter().all(|c| *c == 0.0) {
                continue;
            }
            for j in 0..n {
                a[row][j] = &a[row][j] - &(&f * &a[col][j]);
                inv[row][j] = &inv[row][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

pub fn values(m: &[Vec<Jet>]) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), m[0].len(), |i, j| m[i][j].value())
}

/// Everything derived from `F` at a chart point, as jets.
#[derive(Clone)]
pub struct LocalGeometry {
    metric: FinslerMetric,
    point: ChartPoint,
    order: usize,
    n: usize,
    z: Vec<Jet>,
    f: Jet,
    f2: Jet,
    fy: Vec<Jet>,
    g: JetMatrix,
    ginv: JetMatrix,
    spray: Vec<Jet>,
    moving: std::result::Result<(JetMatrix, JetMatrix), GeomError>,
    cartan: Option<Vec<Jet>>,
    nonlinear: Option<JetMatrix>,
    frame: Option<Vec<VectorField>>,
    coframe: Option<Vec<FormField>>,
}

impl std::fmt::Debug for LocalGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalGeometry")
            .field("metric", &self.metric.name())
            .field("point", &self.point)
            .field("order", &self.order)
            .finish()
    }
}

impl LocalGeometry {
    /// Geometry at the default jet order.
    pub fn at(metric: &FinslerMetric, p: &ChartPoint) -> Result<Self> {
        Self::new(metric, p, DEFAULT_ORDER)
    }

    pub fn new(metric: &FinslerMetric, p: &ChartPoint, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(GeomError::OrderExceeded { needed: 2, available: order });
        }
        metric.check_point(p)?;
        let n = metric.dim();
        let z = seed_coordinates(p, order)?;
        let f = metric.eval(&z[..n], &z[n..])?;
        let f2 = &f * &f;
        let fy = (0..n).map(|i| f.derivative(n + i)).collect::<Result<Vec<_>>>()?;
        let f2y = (0..n).map(|i| f2.derivative(n + i)).collect::<Result<Vec<_>>>()?;
        let g: JetMatrix = (0..n)
            .map(|i| (0..n).map(|j| Ok(f2y[i].derivative(n + j)?.scale(0.5))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let gval = values(&g);
        if gval.clone().cholesky().is_none() {
            let eig = nalgebra::SymmetricEigen::new(gval).eigenvalues;
            return Err(GeomError::NotPositiveDefinite(format!(
                "fundamental tensor of {} at {:?} has eigenvalue {:.3e}",
                metric.name(),
                p.coords(),
                eig.min()
            )));
        }
        let ginv = jet_inverse(&g)?;

        // Gⁱ = ¼ gⁱʲ ([F²]_{yʲxᵏ} yᵏ − [F²]_{xʲ})
        let mut rhs = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = f2.derivative(j)?.scale(-1.0);
            for k in 0..n {
                acc = acc + &f2y[j].derivative(k)? * &z[n + k];
            }
            rhs.push(acc);
        }
        let spray: Vec<Jet> = (0..n)
            .map(|i| {
                let mut acc = ginv[i][0].zero_like();
                for j in 0..n {
                    acc = acc + &ginv[i][j] * &rhs[j];
                }
                acc.scale(0.25)
            })
            .collect();

        // v = uᵀ g, the inverse of u for a g-orthonormal u
        let moving = gram_schmidt(&g, &f, &z[n..]).map(|u| {
            let v: JetMatrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = g[0][0].zero_like();
                        for k in 0..n {
                            acc = acc + &u[k][i] * &g[k][j];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
            (u, v)
        });

        let mut geo = LocalGeometry {
            metric: metric.clone(),
            point: p.clone(),
            order,
            n,
            z,
            f,
            f2,
            fy,
            g,
            ginv,
            spray,
            moving,
            cartan: None,
            nonlinear: None,
            frame: None,
            coframe: None,
        };
        if order >= 3 {
            geo.build_third_order(&f2y)?;
        }
        Ok(geo)
    }

    fn build_third_order(&mut self, f2y: &[Jet]) -> Result<()> {
        let n = self.n;
        let mut cartan = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let f2yi = &f2y[i];
            for j in 0..n {
                let f2yij = f2yi.derivative(n + j)?;
                for k in 0..n {
                    cartan.push(&self.f * &f2yij.derivative(n + k)?.scale(0.25));
                }
            }
        }
        let nonlinear: JetMatrix = (0..n)
            .map(|i| (0..n).map(|j| self.spray[i].derivative(n + j)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        self.cartan = Some(cartan);
        let (u, v) = match &self.moving {
            Ok(uv) => uv.clone(),
            Err(_) => {
                self.nonlinear = Some(nonlinear);
                return Ok(());
            }
        };
        let recip_f = self.f.recip()?;
        let zero = nonlinear[0][0].zero_like();

        let mut frame = Vec::with_capacity(2 * n);
        for i in 0..n {
            // uʲ_i (∂_{xʲ} − N^k_j ∂_{yᵏ})
            let mut comps = vec![zero.clone(); 2 * n];
            for j in 0..n {
                comps[j] = u[j][i].truncate(zero.order());
            }
            for k in 0..n {
                let mut acc = zero.clone();
                for j in 0..n {
                    acc = acc - &u[j][i] * &nonlinear[k][j];
                }
                comps[n + k] = acc;
            }
            frame.push(comps);
        }
        for i in 0..n {
            // −uʲ_i F ∂_{yʲ}
            let mut comps = vec![zero.clone(); 2 * n];
            for j in 0..n {
                comps[n + j] = -(&u[j][i] * &self.f);
            }
            frame.push(comps);
        }

        let mut coframe = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut c = vec![zero.clone(); 2 * n];
            for j in 0..n {
                c[j] = v[i][j].clone();
            }
            coframe.push(FormField::one_form(c));
        }
        for i in 0..n {
            // −vⁱ_j δyʲ with δyʲ = (dyʲ + Nʲ_k dxᵏ)/F
            let mut c = vec![zero.clone(); 2 * n];
            for j in 0..n {
                let w = -(&v[i][j] * &recip_f);
                for k in 0..n {
                    c[k] = &c[k] + &(&w * &nonlinear[j][k]);
                }
                c[n + j] = w;
            }
            coframe.push(FormField::one_form(c));
        }
        self.nonlinear = Some(nonlinear);
        self.frame = Some(frame);
        self.coframe = Some(coframe);
        Ok(())
    }

    fn need(&self, needed: usize) -> Result<()> {
        if self.order < needed {
            return Err(GeomError::OrderExceeded { needed, available: self.order });
        }
        Ok(())
    }

    pub fn metric(&self) -> &FinslerMetric {
        &self.metric
    }

    pub fn point(&self) -> &ChartPoint {
        &self.point
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coordinates(&self) -> &[Jet] {
        &self.z
    }

    pub fn f(&self) -> &Jet {
        &self.f
    }

    pub fn f2(&self) -> &Jet {
        &self.f2
    }

    pub fn fy(&self) -> &[Jet] {
        &self.fy
    }

    pub fn g(&self) -> &JetMatrix {
        &self.g
    }

    pub fn g_inv(&self) -> &JetMatrix {
        &self.ginv
    }

    pub fn spray(&self) -> &[Jet] {
        &self.spray
    }

    /// `u[j][i] = uʲ_i`: column `i` holds the components of `e_i`.
    pub fn u(&self) -> Result<&JetMatrix> {
        self.moving.as_ref().map(|uv| &uv.0).map_err(Clone::clone)
    }

    /// `v[i][j] = vⁱ_j`, with `ωⁱ = vⁱ_j dxʲ`.
    pub fn v(&self) -> Result<&JetMatrix> {
        self.moving.as_ref().map(|uv| &uv.1).map_err(Clone::clone)
    }

    /// `A_{ijk}` stored at `(i·n + j)·n + k`.
    pub fn cartan(&self) -> Result<&[Jet]> {
        self.need(3)?;
        Ok(self.cartan.as_deref().expect("built at order ≥ 3"))
    }

    /// `N[i][j] = ∂Gⁱ/∂yʲ`.
    pub fn nonlinear(&self) -> Result<&JetMatrix> {
        self.need(3)?;
        Ok(self.nonlinear.as_ref().expect("built at order ≥ 3"))
    }

    /// The `2n` fields `e_1..e_n, e_{n+1}..e_{2n}`; `e_{2n} = −yⁱ∂_{yⁱ}`.
    pub fn frame(&self) -> Result<&[VectorField]> {
        self.need(3)?;
        self.u()?;
        Ok(self.frame.as_deref().expect("built at order ≥ 3"))
    }

    /// The dual coframe `ω¹..ω^{2n}` in coordinates; `ω^{2n} = −d log F`.
    pub fn coframe(&self) -> Result<&[FormField]> {
        self.need(3)?;
        self.u()?;
        Ok(self.coframe.as_deref().expect("built at order ≥ 3"))
    }

    pub fn frame_values(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self.frame()?.iter().map(|e| e.iter().map(|c| c.value()).collect()).collect())
    }

    pub fn g_values(&self) -> DMatrix<f64> {
        values(&self.g)
    }

    pub fn g_inv_values(&self) -> DMatrix<f64> {
        values(&self.ginv)
    }

    pub fn u_values(&self) -> Result<DMatrix<f64>> {
        Ok(values(self.u()?))
    }

    pub fn v_values(&self) -> Result<DMatrix<f64>> {
        Ok(values(self.v()?))
    }

    pub fn nonlinear_values(&self) -> Result<DMatrix<f64>> {
        Ok(values(self.nonlinear()?))
    }

    pub fn cartan_value(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        let n = self.n;
        Ok(self.cartan()?[(i * n + j) * n + k].value())
    }

    /// Coordinate matrix of the `ε`-rescaled Sasaki-type metric on `TM₀`,
    /// `ε⁻² g_{jk} dxʲdxᵏ + g_{jk} δyʲδyᵏ − (F_{yʲ}δyʲ)²`, assembled from `g`, `N`
    /// and `F_y` only.
    pub fn sasaki_coordinate_metric(&self, eps: f64) -> Result<DMatrix<f64>> {
        let n = self.n;
        let g = self.g_values();
        let nl = self.nonlinear_values()?;
        let f = self.f.value();
        // rows: δyʲ as coordinate covectors
        let dy = DMatrix::from_fn(n, 2 * n, |j, c| if c < n { nl[(j, c)] / f } else if c - n == j { 1.0 / f } else { 0.0 });
        let dx = DMatrix::from_fn(n, 2 * n, |j, c| if c == j { 1.0 } else { 0.0 });
        let fy = DMatrix::from_fn(1, n, |_, j| self.fy[j].value());
        let hilbert_dy = &fy * &dy;
        Ok(dx.transpose() * &g * &dx / (eps * eps) + dy.transpose() * &g * &dy
            - hilbert_dy.transpose() * hilbert_dy)
    }
}

/// Columns: `e_1..e_{n-1}` from `∂_{x¹}..∂_{x^{n-1}}`, then `e_n = y/F`.
fn gram_schmidt(g: &JetMatrix, f: &Jet, y: &[Jet]) -> Result<JetMatrix> {
    let n = g.len();
    let zero = g[0][0].zero_like();
    let inner = |a: &[Jet], b: &[Jet]| -> Jet {
        let mut acc = zero.clone();
        for i in 0..n {
            for j in 0..n {
                acc = acc + &(&a[i] * &g[i][j]) * &b[j];
            }
        }
        acc
    };
    let recip_f = f.recip()?;
    let l: Vec<Jet> = y.iter().map(|c| (c * &recip_f).truncate(zero.order())).collect();
    let mut done: Vec<Vec<Jet>> = vec![l.clone()];
    let mut cols: Vec<Vec<Jet>> = Vec::with_capacity(n);
    for k in 0..n - 1 {
        let mut w: Vec<Jet> = (0..n).map(|i| zero.cst(if i == k { 1.0 } else { 0.0 })).collect();
        for e in &done {
            let c = inner(&w, e);
            w = w.iter().zip(e).map(|(wi, ei)| wi - &(&c * ei)).collect();
        }
        let norm2 = inner(&w, &w);
        if !(norm2.value() >= FRAME_PIVOT_MIN * FRAME_PIVOT_MIN) {
            return Err(GeomError::DegenerateFrame(norm2.value().max(0.0).sqrt()));
        }
        let norm = norm2.sqrt()?;
        let r = norm.recip()?;
        let e: Vec<Jet> = w.iter().map(|wi| wi * &r).collect();
        done.push(e.clone());
        cols.push(e);
    }
    cols.push(l);
    Ok((0..n).map(|j| (0..n).map(|i| cols[i][j].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_frame_completion() {
        let m = FinslerMetric::euclidean(2).unwrap();
        let p = ChartPoint::new(vec![0.1, 0.2], vec![0.0, 1.0]).unwrap();
        let geo = LocalGeometry::at(&m, &p).unwrap();
        let u = geo.u_values().unwrap();
        assert_eq!(u, DMatrix::identity(2, 2));
        let v = geo.v_values().unwrap();
        assert_eq!(v.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn jet_inverse_of_g() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        let p = ChartPoint::new(vec![0.3, -0.2], vec![0.4, 1.0]).unwrap();
        let geo = LocalGeometry::at(&m, &p).unwrap();
        let n = 2;
        for i in 0..n {
            for j in 0..n {
                let mut acc = geo.g()[0][0].zero_like();
                for k in 0..n {
                    acc = acc + &geo.g()[i][k] * &geo.g_inv()[k][j];
                }
                let target = acc.cst(if i == j { 1.0 } else { 0.0 });
                assert!(acc.max_abs_diff(&target) < 1e-12);
            }
        }
    }

    #[test]
    fn order_two_has_no_frame() {
        let m = FinslerMetric::euclidean(2).unwrap();
        let p = ChartPoint::new(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let geo = LocalGeometry::new(&m, &p, 2).unwrap();
        assert!(matches!(geo.frame(), Err(GeomError::OrderExceeded { .. })));
        assert!(LocalGeometry::new(&m, &p, 1).is_err());
    }

    #[test]
    fn degenerate_metric_rejected() {
        let m = FinslerMetric::broken_degenerate(2).unwrap();
        let p = ChartPoint::new(vec![0.0, 0.0], vec![1.0, 0.3]).unwrap();
        assert!(matches!(LocalGeometry::at(&m, &p), Err(GeomError::NotPositiveDefinite(_))));
    }
}
