//! Transgression term, Chern–Simons type form and the conformal behavior of
//! the Cartan form `η = tr[H]`.
//!
//! Matrices of forms multiply as `(A∧B)ⁱ_j = Aⁱ_k ∧ Bᵏ_j`, the convention in
//! which `Ω = dω + ω∧ω` and `[∇, H] = dH + ω∧H + H∧ω`.

use serde::Serialize;

use crate::connections::{chern_solve, curvature_from, curvature_order};
use crate::error::{GeomError, Result};
use crate::forms::{ExtForm, FormField};
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;
use crate::sigma::SigmaSpec;
use crate::tensors::{cartan_form_from, cartan_from};

/// Square matrix of forms of a common degree.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub n: usize,
    pub entries: Vec<ExtForm<f64>>,
}

impl FormMatrix {
    pub fn new(n: usize, entries: Vec<ExtForm<f64>>) -> Self {
        assert_eq!(entries.len(), n * n);
        FormMatrix { n, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &ExtForm<f64> {
        &self.entries[i * self.n + j]
    }

    pub fn degree(&self) -> usize {
        self.entries[0].degree()
    }

    fn zip(&self, other: &FormMatrix, f: impl Fn(&ExtForm<f64>, &ExtForm<f64>) -> ExtForm<f64>) -> FormMatrix {
        FormMatrix::new(self.n, self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &FormMatrix) -> FormMatrix {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &FormMatrix) -> FormMatrix {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: f64) -> FormMatrix {
        FormMatrix::new(self.n, self.entries.iter().map(|a| a.scale(s)).collect())
    }

    pub fn wedge(&self, other: &FormMatrix) -> FormMatrix {
        let n = self.n;
        let dim = self.entries[0].dim();
        let deg = self.degree() + other.degree();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ExtForm::zero(dim, deg);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).wedge(other.get(k, j)));
                }
                out.push(acc);
            }
        }
        FormMatrix::new(n, out)
    }

    pub fn trace(&self) -> ExtForm<f64> {
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.n {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(points: usize) -> Result<Vec<(f64, f64)>> {
    let raw: Vec<(f64, f64)> = match points {
        1 => vec![(0.0, 2.0)],
        2 => {
            let a = 1.0 / 3f64.sqrt();
            vec![(-a, 1.0), (a, 1.0)]
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            vec![(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)]
        }
        4 => {
            let r = (6.0f64 / 5.0).sqrt() * 2.0 / 7.0;
            let a = (3.0 / 7.0 - r).sqrt();
            let b = (3.0 / 7.0 + r).sqrt();
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        _ => return Err(GeomError::Dimension(format!("no quadrature rule with {points} points"))),
    };
    Ok(raw.into_iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect())
}

/// The pieces entering the transgression: Chern connection `ω`, `H`, Chern
/// curvature `R₀`, `[∇₀, H]` and `H∧H`, with the frame used to evaluate top
/// forms.
#[derive(Debug, Clone)]
pub struct TransgressionData {
    pub n: usize,
    pub theta: FormMatrix,
    pub h: FormMatrix,
    pub r0: FormMatrix,
    pub dh: FormMatrix,
    pub hh: FormMatrix,
    /// `η = tr[H]` and `dη` in coordinates.
    pub eta: ExtForm<f64>,
    pub d_eta: ExtForm<f64>,
    frame: Vec<Vec<f64>>,
    d_theta: FormMatrix,
    d_h: FormMatrix,
}

pub fn transgression_data(m: &FinslerMetric, p: &ChartPoint, jet_order: usize) -> Result<TransgressionData> {
    let geo = LocalGeometry::new(m, p, curvature_order(jet_order))?;
    transgression_data_from(&geo)
}

pub fn transgression_data_from(geo: &LocalGeometry) -> Result<TransgressionData> {
    let n = geo.dim();
    let sol = chern_solve(geo)?;
    let curv = curvature_from(geo, &sol)?;
    let theta_j = sol.theta_forms(geo)?;
    let h_j = sol.h_forms(geo)?;
    let values = |v: &[FormField]| FormMatrix::new(n, v.iter().map(|f| f.values()).collect());
    let derivs = |v: &[FormField]| -> Result<FormMatrix> {
        Ok(FormMatrix::new(n, v.iter().map(|f| Ok(f.d()?.values())).collect::<Result<_>>()?))
    };
    let theta = values(&theta_j);
    let h = values(&h_j);
    let d_theta = derivs(&theta_j)?;
    let d_h = derivs(&h_j)?;
    let dh = d_h.add(&theta.wedge(&h)).add(&h.wedge(&theta));
    let hh = h.wedge(&h);
    let mut eta_j = h_j[0].clone();
    for i in 1..n {
        eta_j = eta_j.add(&h_j[i * n + i]);
    }
    Ok(TransgressionData {
        n,
        r0: FormMatrix::new(n, curv.omega),
        theta,
        h,
        dh,
        hh,
        eta: eta_j.values(),
        d_eta: eta_j.d()?.values(),
        frame: geo.frame_values()?,
        d_theta,
        d_h,
    })
}

impl TransgressionData {
    /// `R_t = R₀ + t[∇₀,H] + t²H∧H`.
    pub fn r_t(&self, t: f64) -> FormMatrix {
        self.r0.add(&self.dh.scale(t)).add(&self.hh.scale(t * t))
    }

    /// Curvature of `ω + tH` computed directly, `d(ω + tH) + (ω + tH)∧(ω + tH)`.
    pub fn r_t_direct(&self, t: f64) -> FormMatrix {
        let conn = self.theta.add(&self.h.scale(t));
        self.d_theta.add(&self.d_h.scale(t)).add(&conn.wedge(&conn))
    }

    /// `max_t ‖R_t(direct) − R_t(expansion)‖` over `t ∈ {0.3, 0.7}`.
    pub fn expansion_residual(&self) -> f64 {
        [0.3, 0.7].iter().map(|&t| self.r_t_direct(t).sub(&self.r_t(t)).max_abs()).fold(0.0, f64::max)
    }

    /// Top form evaluated on `e_1..e_{2n−1}`.
    pub fn on_frame(&self, form: &ExtForm<f64>) -> f64 {
        let args: Vec<&[f64]> = self.frame.iter().take(2 * self.n - 1).map(|v| v.as_slice()).collect();
        form.eval(&args)
    }

    /// `tr[H R_t^{n−1}]` on the frame.
    pub fn integrand(&self, t: f64) -> f64 {
        let rt = self.r_t(t);
        let mut acc = self.h.clone();
        for _ in 0..self.n - 1 {
            acc = acc.wedge(&rt);
        }
        self.on_frame(&acc.trace())
    }

    /// `∫₀¹ tr[H R_t^{n−1}] dt` by `n`-point Gauss–Legendre quadrature.
    pub fn integral(&self) -> Result<f64> {
        Ok(gauss_legendre(self.n)?.iter().map(|(t, w)| w * self.integrand(*t)).sum())
    }

    /// `tr[HR₀ + ½H[∇₀,H] + ⅓H³]` on the frame, for surfaces.
    pub fn closed_form(&self) -> Option<f64> {
        if self.n != 2 {
            return None;
        }
        let m = self
            .h
            .wedge(&self.r0)
            .add(&self.h.wedge(&self.dh).scale(0.5))
            .add(&self.h.wedge(&self.hh).scale(1.0 / 3.0));
        Some(self.on_frame(&m.trace()))
    }

    /// `η∧(dη)^{n−1}` on the frame.
    pub fn chern_simons(&self) -> f64 {
        let mut acc = self.eta.clone();
        for _ in 0..self.n - 1 {
            acc = acc.wedge(&self.d_eta);
        }
        self.on_frame(&acc)
    }
}

/// The transgression term `−n∫₀¹ tr[H R_t^{n−1}] dt` on the frame, with the
/// closed-form value for surfaces.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Transgression {
    pub quadrature: f64,
    pub closed_form: Option<f64>,
}

pub fn transgression_term(m: &FinslerMetric, p: &ChartPoint, jet_order: usize) -> Result<Transgression> {
    transgression_of(&transgression_data(m, p, jet_order)?)
}

pub fn transgression_of(d: &TransgressionData) -> Result<Transgression> {
    let k = -(d.n as f64);
    Ok(Transgression { quadrature: k * d.integral()?, closed_form: d.closed_form().map(|c| k * c) })
}

pub fn chern_simons_form(m: &FinslerMetric, p: &ChartPoint, jet_order: usize) -> Result<f64> {
    Ok(transgression_data(m, p, jet_order)?.chern_simons())
}

/// Both sides of `−2∫tr[HR_t]dt = η∧dη` on `(e₁, e₂, e₃)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SurfaceIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// `|quadrature − closed form|`.
    pub closed_form_gap: f64,
    pub h111: f64,
    pub r1212: f64,
    /// `∫tr[HR_t]dt`, which equals `½H₁₁₁²R¹₂₁₂`.
    pub integral: f64,
}

impl SurfaceIdentity {
    /// `|lhs − rhs| / max(|lhs|, 1e-12)`.
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.lhs.abs().max(1e-12)
    }
}

pub fn surface_identity_check(m: &FinslerMetric, p: &ChartPoint, jet_order: usize) -> Result<SurfaceIdentity> {
    if m.dim() != 2 {
        return Err(GeomError::Dimension(format!("the surface identity needs n = 2, got {}", m.dim())));
    }
    let geo = LocalGeometry::new(m, p, curvature_order(jet_order))?;
    surface_identity_from(&geo)
}

pub fn surface_identity_from(geo: &LocalGeometry) -> Result<SurfaceIdentity> {
    if geo.dim() != 2 {
        return Err(GeomError::Dimension(format!("the surface identity needs n = 2, got {}", geo.dim())));
    }
    let d = transgression_data_from(geo)?;
    let tr = transgression_of(&d)?;
    let closed = tr.closed_form.unwrap_or(f64::NAN);
    let rhs = d.chern_simons();
    let e = &d.frame;
    let h111 = d.eta.eval(&[&e[2]]);
    let r1212 = d.r0.get(0, 1).eval(&[&e[0], &e[1]]);
    Ok(SurfaceIdentity {
        lhs: tr.quadrature,
        rhs,
        gap: (tr.quadrature - rhs).abs(),
        closed_form_gap: (tr.quadrature - closed).abs(),
        h111,
        r1212,
        integral: d.integral()?,
    })
}

/// `η̄` of `e^σF` computed directly and from the unbarred data, as coordinate
/// coefficients over `dx¹..dxⁿ, dy¹..dyⁿ`.
#[derive(Debug, Clone, Serialize)]
pub struct ConformalEta {
    pub direct: Vec<f64>,
    pub formula: Vec<f64>,
    pub eta: Vec<f64>,
    pub residual: f64,
}

fn eta_coefficients(geo: &LocalGeometry) -> Result<Vec<f64>> {
    let n = geo.dim();
    let sol = chern_solve(geo)?;
    let h = sol.h_forms(geo)?;
    let mut eta = h[0].values();
    for i in 1..n {
        eta = eta.add(&h[i * n + i].values());
    }
    Ok((0..2 * n).map(|c| eta.coefficient(&[c])).collect())
}

/// `σ_{xˡ}` at the point.
fn sigma_gradient(sigma: &SigmaSpec, p: &ChartPoint) -> Result<Vec<f64>> {
    let n = p.dim();
    let z = crate::jet::seed_coordinates(p, 1)?;
    let s = sigma.eval(&z[..n], &z[n..])?;
    Ok((0..n).map(|l| s.coeffs()[1 + l]).collect())
}

/// `𝐆(σ)𝐈 + 𝐀(𝐈*, dσ*)` and `⟨𝐈*, dσ*⟩`, with sharps taken by `gⁱʲ`.
fn correction_terms(geo: &LocalGeometry, sigma: &SigmaSpec) -> Result<(Vec<f64>, f64)> {
    let n = geo.dim();
    let p = geo.point();
    let ds = sigma_gradient(sigma, p)?;
    let ginv = geo.g_inv_values();
    let a = cartan_from(geo)?;
    let i_form = cartan_form_from(geo)?;
    let f = geo.f().value();
    let g_sigma: f64 = (0..n).map(|l| p.y()[l] * ds[l]).sum::<f64>() / f;
    let i_sharp: Vec<f64> = (0..n).map(|p_| (0..n).map(|j| i_form[j] * ginv[(j, p_)]).sum()).collect();
    let s_sharp: Vec<f64> = (0..n).map(|q| (0..n).map(|l| ginv[(q, l)] * ds[l]).sum()).collect();
    let first = (0..n)
        .map(|k| {
            let mut s = g_sigma * i_form[k];
            for pp in 0..n {
                for q in 0..n {
                    s += i_sharp[pp] * a.get(pp, q, k) * s_sharp[q];
                }
            }
            s
        })
        .collect();
    let pairing: f64 = (0..n).map(|j| i_form[j] * s_sharp[j]).sum();
    Ok((first, pairing))
}

pub fn conformal_eta(m: &FinslerMetric, p: &ChartPoint, sigma: &SigmaSpec) -> Result<ConformalEta> {
    conformal_eta_at_order(m, p, sigma, crate::jet::DEFAULT_ORDER)
}

pub fn conformal_eta_at_order(m: &FinslerMetric, p: &ChartPoint, sigma: &SigmaSpec, jet_order: usize) -> Result<ConformalEta> {
    crate::sasaki::require_basic(sigma, p)?;
    let geo = LocalGeometry::new(m, p, jet_order)?;
    let bar = FinslerMetric::conformal(m, sigma.clone())?;
    let bgeo = LocalGeometry::new(&bar, p, jet_order)?;
    let n = geo.dim();
    let eta = eta_coefficients(&geo)?;
    let direct = eta_coefficients(&bgeo)?;
    let (first, pairing) = correction_terms(&geo, sigma)?;
    let mut formula = eta.clone();
    for k in 0..n {
        formula[k] += first[k] - pairing * geo.fy()[k].value();
    }
    let residual = direct.iter().zip(&formula).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ConformalEta { direct, formula, eta, residual })
}

/// The two expressions of the invariance condition and `‖η̄ − η‖`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvarianceCondition {
    pub cond1: f64,
    pub cond2: f64,
    pub eta_gap: f64,
}

impl InvarianceCondition {
    /// False only when both conditions hold within `tol` but `η̄ ≠ η`.
    pub fn consistent(&self, tol: f64) -> bool {
        !(self.cond1 < tol && self.cond2 < tol) || self.eta_gap < tol
    }
}

pub fn invariance_condition(m: &FinslerMetric, p: &ChartPoint, sigma: &SigmaSpec) -> Result<InvarianceCondition> {
    let ce = conformal_eta(m, p, sigma)?;
    let geo = LocalGeometry::at(m, p)?;
    let (first, pairing) = correction_terms(&geo, sigma)?;
    Ok(InvarianceCondition {
        cond1: first.iter().map(|v| v.abs()).fold(0.0, f64::max),
        cond2: pairing.abs(),
        eta_gap: ce.direct.iter().zip(&ce.eta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::indicatrix_sample;

    #[test]
    fn quadrature_is_exact_on_cubics() {
        for k in 1..=4 {
            let rule = gauss_legendre(k).unwrap();
            for deg in 0..2 * k {
                let q: f64 = rule.iter().map(|(t, w)| w * t.powi(deg as i32)).sum();
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "{k} {deg}");
            }
        }
    }

    #[test]
    fn funk_surface_identity() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        for p in indicatrix_sample(&m, 4, 42).unwrap() {
            let t = surface_identity_check(&m, &p, 4).unwrap();
            assert!(t.lhs.abs() > 1e-6);
            assert!(t.relative_gap() < 1e-6, "{t:?}");
            assert!(t.closed_form_gap < 1e-10);
            assert!((t.integral - 0.5 * t.h111 * t.h111 * t.r1212).abs() < 1e-8 * t.integral.abs().max(1.0), "{t:?}");
        }
    }

    #[test]
    fn r_t_expansion_matches_direct_curvature() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        let p = indicatrix_sample(&m, 1, 7).unwrap().remove(0);
        let d = transgression_data(&m, &p, 4).unwrap();
        assert!(d.expansion_residual() < 1e-9);
    }

    #[test]
    fn riemannian_terms_vanish() {
        let m = FinslerMetric::round_sphere(2).unwrap();
        let p = indicatrix_sample(&m, 1, 7).unwrap().remove(0);
        let t = surface_identity_check(&m, &p, 4).unwrap();
        assert!(t.lhs.abs() < 1e-9 && t.rhs.abs() < 1e-9);
        let three = FinslerMetric::euclidean(3).unwrap();
        let q = indicatrix_sample(&three, 1, 7).unwrap().remove(0);
        assert!(matches!(surface_identity_check(&three, &q, 4), Err(GeomError::Dimension(_))));
    }

    #[test]
    fn conformal_eta_formula() {
        let m = FinslerMetric::funk(2, 1.0).unwrap();
        let s = SigmaSpec::linear(0, 0.2);
        for p in indicatrix_sample(&m, 4, 5).unwrap() {
            let c = conformal_eta(&m, &p, &s).unwrap();
            assert!(c.residual < 1e-6, "{c:?}");
            let k = conformal_eta(&m, &p, &SigmaSpec::zero().with_constant(0.4)).unwrap();
            assert!(k.residual < 1e-10);
            let inv = invariance_condition(&m, &p, &s).unwrap();
            assert!(inv.consistent(1e-8));
        }
    }
}
