//! Chern and Cartan connections on the horizontal bundle of `SM`, the Cartan
//! endomorphism `H`, and curvature.
//!
//! Index convention: `ω_jⁱ = Γⁱ_{jk}ωᵏ + bⁱ_{jγ}ω^{n+γ}` with
//! `dωⁱ = Σ_j ωʲ∧ω_jⁱ`, so `dωⁱ(e_j, e_k) = Γⁱ_{jk} − Γⁱ_{kj}`. All indices are
//! 0-based; the Reeb direction is `n−1`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::forms::{ExtForm, FormField};
use crate::frame::{brackets, lie_derivative_metric};
use crate::jet::Jet;
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;

/// Consistency threshold of the structure-equation solve.
pub const STRUCTURE_TOL: f64 = 1e-7;

/// Connection 1-forms on the horizontal bundle in the moving frame.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionMatrix {
    pub n: usize,
    pub at: ChartPoint,
    /// `Γⁱ_{jk}` at `(i·n + j)·n + k`.
    pub gamma: Vec<f64>,
    /// `bⁱ_{jγ}` at `(i·n + j)·(n−1) + γ`.
    pub b: Vec<f64>,
}

impl ConnectionMatrix {
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    pub fn b(&self, i: usize, j: usize, g: usize) -> f64 {
        self.b[(i * self.n + j) * (self.n - 1) + g]
    }

    /// `ω_jⁱ(e_a)` for a frame direction `a < 2n−1`.
    pub fn entry(&self, i: usize, j: usize, a: usize) -> f64 {
        if a < self.n {
            self.gamma(i, j, a)
        } else {
            self.b(i, j, a - self.n)
        }
    }

    /// `max |ω_jⁱ + ω_iʲ|` over all frame directions.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..2 * n - 1 {
                    r = r.max((self.entry(i, j, a) + self.entry(j, i, a)).abs());
                }
            }
        }
        r
    }

    /// Largest entrywise difference to another connection at the same point.
    pub fn max_diff(&self, other: &ConnectionMatrix) -> f64 {
        self.gamma.iter().zip(&other.gamma).chain(self.b.iter().zip(&other.b)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// The 1-form `ω_jⁱ` in coordinates, from coframe values.
    pub fn form(&self, i: usize, j: usize, coframe: &[ExtForm<f64>]) -> ExtForm<f64> {
        let mut acc = ExtForm::zero(2 * self.n, 1);
        for a in 0..2 * self.n - 1 {
            acc = acc.add(&coframe[a].scale(self.entry(i, j, a)));
        }
        acc
    }
}

/// `H_{ijγ}`, the coefficients of `H_{ij} = H_{ijγ}ω^{n+γ}`.
#[derive(Debug, Clone, Serialize)]
pub struct CartanEndomorphism {
    pub n: usize,
    pub at: ChartPoint,
    pub h: Vec<f64>,
}

impl CartanEndomorphism {
    pub fn get(&self, i: usize, j: usize, g: usize) -> f64 {
        self.h[(i * self.n + j) * (self.n - 1) + g]
    }

    pub fn max_abs(&self) -> f64 {
        self.h.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &CartanEndomorphism) -> f64 {
        self.h.iter().zip(&other.h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for g in 0..n - 1 {
                    r = r.max((self.get(i, j, g) - self.get(j, i, g)).abs());
                }
            }
        }
        r
    }

    /// `max |H_{njγ}|`, the entries along the Reeb index.
    pub fn reeb_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for j in 0..n {
            for g in 0..n - 1 {
                r = r.max(self.get(n - 1, j, g).abs()).max(self.get(j, n - 1, g).abs());
            }
        }
        r
    }
}

fn h_index(n: usize, i: usize, j: usize, g: usize) -> usize {
    (i * n + j) * (n - 1) + g
}

/// `H_{ijγ} = −A_{pqk}u^p_i u^q_j u^k_γ` as jets.
fn h_tensor_jets(geo: &LocalGeometry) -> Result<Vec<Jet>> {
    let n = geo.dim();
    let a = geo.cartan()?;
    let u = geo.u()?;
    let mut out = Vec::with_capacity(n * n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            for g in 0..n - 1 {
                let mut acc = a[0].zero_like();
                for p in 0..n {
                    for q in 0..n {
                        let uu = &u[p][i] * &u[q][j];
                        for k in 0..n {
                            acc = acc - &(&a[(p * n + q) * n + k] * &uu) * &u[k][g];
                        }
                    }
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

pub fn cartan_endomorphism_tensor(m: &FinslerMetric, p: &ChartPoint) -> Result<CartanEndomorphism> {
    cartan_endomorphism_tensor_from(&LocalGeometry::at(m, p)?)
}

pub fn cartan_endomorphism_tensor_from(geo: &LocalGeometry) -> Result<CartanEndomorphism> {
    Ok(CartanEndomorphism {
        n: geo.dim(),
        at: geo.point().clone(),
        h: h_tensor_jets(geo)?.iter().map(|j| j.value()).collect(),
    })
}

pub fn cartan_endomorphism_lie(m: &FinslerMetric, p: &ChartPoint) -> Result<CartanEndomorphism> {
    cartan_endomorphism_lie_from(&LocalGeometry::at(m, p)?)
}

/// `H_{ijγ} = ½(L_{e_{n+γ}} g)(e_i, e_j)`.
pub fn cartan_endomorphism_lie_from(geo: &LocalGeometry) -> Result<CartanEndomorphism> {
    let n = geo.dim();
    let frame = geo.frame()?;
    let mut h = vec![0.0; n * n * (n - 1)];
    for g in 0..n - 1 {
        let l = lie_derivative_metric(geo, &frame[n + g])?;
        for i in 0..n {
            for j in 0..n {
                h[h_index(n, i, j, g)] = 0.5 * l[(i, j)];
            }
        }
    }
    Ok(CartanEndomorphism { n, at: geo.point().clone(), h })
}

/// The Chern connection solved from the structure equations, with the jets
/// needed to differentiate it further.
#[derive(Debug, Clone)]
pub struct ChernSolution {
    pub connection: ConnectionMatrix,
    pub h: CartanEndomorphism,
    /// `max |dωⁱ(e_{n+γ}, e_{n+δ})|` and `max |ι_{e_{2n}} dωⁱ|`.
    pub vertical_residual: f64,
    /// `max |bⁱ_{jγ} + bʲ_{iγ} + 2H_{ijγ}|`.
    pub symmetrization_residual: f64,
    gamma_jets: Vec<Jet>,
    b_jets: Vec<Jet>,
    h_jets: Vec<Jet>,
}

pub fn chern_from_structure_equations(m: &FinslerMetric, p: &ChartPoint) -> Result<ConnectionMatrix> {
    Ok(chern_solve(&LocalGeometry::at(m, p)?)?.connection)
}

/// Expands `dωⁱ` in the coframe and reads off the unique solution: the mixed
/// part gives `b`, the horizontal part `Cⁱ_{jk} = ½dωⁱ(e_j,e_k)` gives
/// `Γⁱ_{jk} = Cⁱ_{jk} + Cʲ_{ki} + Cᵏ_{ji}`.
pub fn chern_solve(geo: &LocalGeometry) -> Result<ChernSolution> {
    let n = geo.dim();
    let dim = 2 * n;
    let frame = geo.frame()?;
    let cf = geo.coframe()?;
    let dw: Vec<FormField> = cf[..n].iter().map(|w| w.d()).collect::<Result<_>>()?;
    let mut t: Vec<Option<Jet>> = vec![None; n * dim * dim];
    let tix = |i: usize, a: usize, b: usize| (i * dim + a) * dim + b;
    for i in 0..n {
        for a in 0..dim {
            for b in (a + 1)..dim {
                let v = dw[i].eval(&[&frame[a], &frame[b]]);
                t[tix(i, b, a)] = Some(v.scale(-1.0));
                t[tix(i, a, b)] = Some(v);
            }
        }
    }
    let tj = |i: usize, a: usize, b: usize| -> Jet {
        match &t[tix(i, a, b)] {
            Some(j) => j.clone(),
            None => t[tix(0, 0, 1)].as_ref().map(|j| j.zero_like()).expect("dim ≥ 4"),
        }
    };
    let c = |i: usize, j: usize, k: usize| tj(i, j, k).scale(0.5);
    let mut gamma_jets = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma_jets.push(c(i, j, k) + c(j, k, i) + c(k, j, i));
            }
        }
    }
    let mut b_jets = Vec::with_capacity(n * n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            for g in 0..n - 1 {
                b_jets.push(tj(i, j, n + g));
            }
        }
    }
    let mut vertical_residual: f64 = 0.0;
    for i in 0..n {
        for a in n..dim {
            for b in (a + 1)..dim {
                vertical_residual = vertical_residual.max(tj(i, a, b).value().abs());
            }
        }
        for a in 0..dim - 1 {
            vertical_residual = vertical_residual.max(tj(i, a, dim - 1).value().abs());
        }
    }
    let h_jets = h_tensor_jets(geo)?;
    let mut symmetrization_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for g in 0..n - 1 {
                let s = b_jets[h_index(n, i, j, g)].value()
                    + b_jets[h_index(n, j, i, g)].value()
                    + 2.0 * h_jets[h_index(n, i, j, g)].value();
                symmetrization_residual = symmetrization_residual.max(s.abs());
            }
        }
    }
    let worst = vertical_residual.max(symmetrization_residual);
    if !(worst <= STRUCTURE_TOL) {
        return Err(GeomError::StructureInconsistent(worst));
    }
    let at = geo.point().clone();
    Ok(ChernSolution {
        connection: ConnectionMatrix {
            n,
            at: at.clone(),
            gamma: gamma_jets.iter().map(|j| j.value()).collect(),
            b: b_jets.iter().map(|j| j.value()).collect(),
        },
        h: CartanEndomorphism { n, at, h: h_jets.iter().map(|j| j.value()).collect() },
        vertical_residual,
        symmetrization_residual,
        gamma_jets,
        b_jets,
        h_jets,
    })
}

impl ChernSolution {
    /// `ω_jⁱ` as form fields, at `[i·n + j]`.
    pub fn theta_forms(&self, geo: &LocalGeometry) -> Result<Vec<FormField>> {
        let n = geo.dim();
        let cf = geo.coframe()?;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = FormField::zero(2 * n, 1);
                for k in 0..n {
                    acc = acc.add(&cf[k].mul_fn(&self.gamma_jets[(i * n + j) * n + k]));
                }
                for g in 0..n - 1 {
                    acc = acc.add(&cf[n + g].mul_fn(&self.b_jets[h_index(n, i, j, g)]));
                }
                out.push(acc);
            }
        }
        Ok(out)
    }

    /// `H_{ij} = H_{ijγ}ω^{n+γ}` as form fields, at `[i·n + j]`.
    pub fn h_forms(&self, geo: &LocalGeometry) -> Result<Vec<FormField>> {
        let n = geo.dim();
        let cf = geo.coframe()?;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = FormField::zero(2 * n, 1);
                for g in 0..n - 1 {
                    acc = acc.add(&cf[n + g].mul_fn(&self.h_jets[h_index(n, i, j, g)]));
                }
                out.push(acc);
            }
        }
        Ok(out)
    }
}

pub fn cartan_connection(m: &FinslerMetric, p: &ChartPoint) -> Result<ConnectionMatrix> {
    Ok(cartan_from(&chern_solve(&LocalGeometry::at(m, p)?)?))
}

/// `b̂ⁱ_{jγ} = bⁱ_{jγ} + H_{ijγ}` with the horizontal part unchanged.
pub fn cartan_from(sol: &ChernSolution) -> ConnectionMatrix {
    let mut c = sol.connection.clone();
    for (bv, hv) in c.b.iter_mut().zip(&sol.h.h) {
        *bv += hv;
    }
    c
}

/// `Γⁿ_{nk}`, `bⁿ_{nγ}`, `Γⁿ_{αk}` vanish and `bⁿ_{αγ} = δ_{αγ}`.
pub fn reeb_row_residual(c: &ConnectionMatrix) -> f64 {
    let n = c.n;
    let top = n - 1;
    let mut r: f64 = 0.0;
    for k in 0..n {
        r = r.max(c.gamma(top, top, k).abs());
        for a in 0..n - 1 {
            r = r.max(c.gamma(top, a, k).abs());
        }
    }
    for g in 0..n - 1 {
        r = r.max(c.b(top, top, g).abs());
        for a in 0..n - 1 {
            r = r.max((c.b(top, a, g) - (a == g) as u8 as f64).abs());
        }
    }
    r
}

pub fn bott_vertical_check(m: &FinslerMetric, p: &ChartPoint) -> Result<f64> {
    let geo = LocalGeometry::at(m, p)?;
    bott_vertical_from(&geo, &chern_solve(&geo)?.connection)
}

/// `max |ωʲ([e_{n+γ}, e_i]) − bʲ_{iγ}|` over `i, j ≤ n`.
pub fn bott_vertical_from(geo: &LocalGeometry, c: &ConnectionMatrix) -> Result<f64> {
    let n = geo.dim();
    let br = brackets(geo)?;
    let mut r: f64 = 0.0;
    for g in 0..n - 1 {
        for i in 0..n {
            for j in 0..n {
                r = r.max((br.get(n + g, i, j) - c.b(j, i, g)).abs());
            }
        }
    }
    Ok(r)
}

/// Residuals of `X⟨e_i,e_j⟩ − ⟨∇_X e_i, e_j⟩ − ⟨e_i, ∇_X e_j⟩ = 2H_{ij}(X)`
/// for vertical and for horizontal `X`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualCheck {
    pub vertical: f64,
    pub horizontal: f64,
}

impl DualCheck {
    pub fn max(&self) -> f64 {
        self.vertical.max(self.horizontal)
    }
}

pub fn dual_and_symmetrization_check(m: &FinslerMetric, p: &ChartPoint) -> Result<DualCheck> {
    let geo = LocalGeometry::at(m, p)?;
    let sol = chern_solve(&geo)?;
    dual_check_from(&sol.connection, &cartan_endomorphism_lie_from(&geo)?)
}

pub fn dual_check_from(c: &ConnectionMatrix, h: &CartanEndomorphism) -> Result<DualCheck> {
    let n = c.n;
    let mut out = DualCheck { vertical: 0.0, horizontal: 0.0 };
    for a in 0..2 * n - 1 {
        for i in 0..n {
            for j in 0..n {
                let defect = -c.entry(j, i, a) - c.entry(i, j, a);
                if a < n {
                    out.horizontal = out.horizontal.max(defect.abs());
                } else {
                    out.vertical = out.vertical.max((defect - 2.0 * h.get(i, j, a - n)).abs());
                }
            }
        }
    }
    Ok(out)
}

/// Curvature 2-forms `Ωⁱ_j = dω_jⁱ + ω_kⁱ∧ω_jᵏ` and their frame components.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub n: usize,
    /// `Ωⁱ_j` in coordinates at `[i·n + j]`.
    pub omega: Vec<ExtForm<f64>>,
    /// `Rⁱ_{jkl} = Ωⁱ_j(e_k, e_l)`.
    pub r: Vec<f64>,
    /// `Pⁱ_{jkγ} = Ωⁱ_j(e_k, e_{n+γ})`.
    pub p: Vec<f64>,
    /// `max |Ωⁱ_j(e_{n+γ}, e_{n+δ})|`.
    pub vertical_max: f64,
}

impl Curvature {
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.r[((i * n + j) * n + k) * n + l]
    }

    pub fn p(&self, i: usize, j: usize, k: usize, g: usize) -> f64 {
        let n = self.n;
        self.p[((i * n + j) * n + k) * (n - 1) + g]
    }
}

/// Minimum jet order for curvature.
pub const CURVATURE_ORDER: usize = 5;

/// Jet order used for curvature when the connection itself is wanted at
/// `jet_order`.
pub fn curvature_order(jet_order: usize) -> usize {
    (jet_order + 1).clamp(CURVATURE_ORDER, crate::jet::MAX_ORDER)
}

/// Curvature of the Chern connection; the geometry is built one jet order
/// above `jet_order` so that the connection can be differentiated.
pub fn curvature(m: &FinslerMetric, p: &ChartPoint, jet_order: usize) -> Result<Curvature> {
    let geo = LocalGeometry::new(m, p, curvature_order(jet_order))?;
    let sol = chern_solve(&geo)?;
    curvature_from(&geo, &sol)
}

pub fn curvature_from(geo: &LocalGeometry, sol: &ChernSolution) -> Result<Curvature> {
    if geo.order() < CURVATURE_ORDER {
        return Err(GeomError::OrderExceeded { needed: CURVATURE_ORDER, available: geo.order() });
    }
    let n = geo.dim();
    let theta = sol.theta_forms(geo)?;
    let tv: Vec<ExtForm<f64>> = theta.iter().map(|t| t.values()).collect();
    let mut omega = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut o = theta[i * n + j].d()?.values();
            for k in 0..n {
                o = o.add(&tv[i * n + k].wedge(&tv[k * n + j]));
            }
            omega.push(o);
        }
    }
    let e = geo.frame_values()?;
    let mut r = Vec::with_capacity(n.pow(4));
    let mut pp = Vec::with_capacity(n.pow(3) * (n - 1));
    let mut vertical_max: f64 = 0.0;
    for o in &omega {
        for k in 0..n {
            for l in 0..n {
                r.push(o.eval(&[&e[k], &e[l]]));
            }
        }
        for k in 0..n {
            for g in 0..n - 1 {
                pp.push(o.eval(&[&e[k], &e[n + g]]));
            }
        }
        for a in n..2 * n {
            for b in (a + 1)..2 * n {
                vertical_max = vertical_max.max(o.eval(&[&e[a], &e[b]]).abs());
            }
        }
    }
    Ok(Curvature { n, omega, r, p: pp, vertical_max })
}

fn frame_forms(geo: &LocalGeometry) -> Result<(Vec<ExtForm<f64>>, Vec<Vec<f64>>)> {
    Ok((geo.coframe()?.iter().map(|w| w.values()).collect(), geo.frame_values()?))
}

fn first_residual(dw: &[ExtForm<f64>], cf: &[ExtForm<f64>], theta: &[ExtForm<f64>], frame: &[Vec<f64>]) -> f64 {
    let n = dw.len();
    let mut r: f64 = 0.0;
    for i in 0..n {
        let mut lhs = dw[i].clone();
        for j in 0..n {
            lhs = lhs.sub(&cf[j].wedge(&theta[i * n + j]));
        }
        r = r.max(lhs.in_basis(frame).max_abs());
    }
    r
}

/// Residuals of `dϑ = ϑ∧ω` (frame components) and `ω + ωᵗ = −2H`
/// (coordinate components).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StructureResiduals {
    pub first: f64,
    pub second: f64,
}

pub fn structure_residuals(geo: &LocalGeometry, sol: &ChernSolution) -> Result<StructureResiduals> {
    let n = geo.dim();
    let (cf, frame) = frame_forms(geo)?;
    let dw: Vec<ExtForm<f64>> = geo.coframe()?[..n].iter().map(|w| Ok(w.d()?.values())).collect::<Result<_>>()?;
    let theta: Vec<ExtForm<f64>> = (0..n * n).map(|k| sol.connection.form(k / n, k % n, &cf)).collect();
    let first = first_residual(&dw, &cf, &theta, &frame);
    let mut second: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut h = ExtForm::zero(2 * n, 1);
            for g in 0..n - 1 {
                h = h.add(&cf[n + g].scale(sol.h.get(i, j, g)));
            }
            let s = theta[i * n + j].add(&theta[j * n + i]).add(&h.scale(2.0));
            second = second.max(s.max_abs());
        }
    }
    Ok(StructureResiduals { first, second })
}

/// Outcome of perturbing the solved connection by `aⁱ_{jk}ωᵏ` with `a`
/// antisymmetric in `(i, j)`, which keeps `ω + ωᵗ = −2H`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UniquenessReport {
    pub trials: usize,
    /// Smallest `residual(a) / max|a|`.
    pub min_ratio: f64,
    /// Largest `|residual(2a) − 2 residual(a)| / residual(a)`.
    pub max_nonlinearity: f64,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.min_ratio > 1e-3 && self.max_nonlinearity < 1e-6
    }
}

pub fn uniqueness_test(geo: &LocalGeometry, sol: &ChernSolution, trials: usize, seed: u64) -> Result<UniquenessReport> {
    let n = geo.dim();
    let (cf, frame) = frame_forms(geo)?;
    let dw: Vec<ExtForm<f64>> = geo.coframe()?[..n].iter().map(|w| Ok(w.d()?.values())).collect::<Result<_>>()?;
    let theta: Vec<ExtForm<f64>> = (0..n * n).map(|k| sol.connection.form(k / n, k % n, &cf)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_nonlinearity: f64 = 0.0;
    for _ in 0..trials {
        let raw: Vec<f64> = (0..n * n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = |i: usize, j: usize, k: usize| raw[(i * n + j) * n + k] - raw[(j * n + i) * n + k];
        let amax = (0..n * n * n).map(|q| a(q / (n * n), (q / n) % n, q % n).abs()).fold(0.0, f64::max);
        let perturbed = |s: f64| -> Vec<ExtForm<f64>> {
            (0..n * n)
                .map(|q| {
                    let (i, j) = (q / n, q % n);
                    let mut t = theta[q].clone();
                    for k in 0..n {
                        t = t.add(&cf[k].scale(s * a(i, j, k)));
                    }
                    t
                })
                .collect()
        };
        let r1 = first_residual(&dw, &cf, &perturbed(1.0), &frame);
        let r2 = first_residual(&dw, &cf, &perturbed(2.0), &frame);
        min_ratio = min_ratio.min(r1 / amax);
        max_nonlinearity = max_nonlinearity.max((r2 - 2.0 * r1).abs() / r1);
    }
    Ok(UniquenessReport { trials, min_ratio, max_nonlinearity })
}

/// Frame Gram matrix of `g` on the horizontal frame; identity by construction.
pub fn horizontal_gram(geo: &LocalGeometry) -> Result<DMatrix<f64>> {
    let u = geo.u_values()?;
    Ok(u.transpose() * geo.g_values() * u)
}
