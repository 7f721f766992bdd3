//! Levi-Civita connections of the rescaled Sasaki-type metrics on `SM`, their
//! projections to the horizontal bundle, and the adiabatic limit.

use serde::Serialize;

use crate::connections::{cartan_endomorphism_lie_from, cartan_from, chern_solve, CartanEndomorphism, ChernSolution, ConnectionMatrix};
use crate::error::{GeomError, Result};
use crate::forms::{FormField, VectorField};
use crate::frame::{brackets, lie_derivative_tensor, sasaki_diagonal, Brackets};
use crate::jet::seed_coordinates;
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;
use crate::sigma::SigmaSpec;

/// Largest `|∂σ/∂y|` accepted as a basic function.
pub const BASIC_TOL: f64 = 1e-14;

/// `∇_{e_a} e_b = Γᶜ_{ab} e_c` on `e_1..e_{2n−1}` for the `ε`-rescaled metric.
#[derive(Debug, Clone, Serialize)]
pub struct SMConnectionTable {
    pub at: ChartPoint,
    pub eps: f64,
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl SMConnectionTable {
    fn dim(&self) -> usize {
        2 * self.n - 1
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = self.dim();
        self.coeffs[(a * d + b) * d + c]
    }

    /// `⟨∇_{e_a} e_b, e_c⟩_ε`.
    pub fn lowered(&self, a: usize, b: usize, c: usize) -> f64 {
        self.get(a, b, c) * sasaki_diagonal(self.n, self.eps)[c]
    }

    /// `max |Γᶜ_{ab} − Γᶜ_{ba} − cᶜ_{ab}|`.
    pub fn torsion_residual(&self, br: &Brackets) -> f64 {
        let d = self.dim();
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    r = r.max((self.get(a, b, c) - self.get(b, a, c) - br.get(a, b, c)).abs());
                }
            }
        }
        r
    }

    /// `max |⟨∇_{e_a}e_b, e_c⟩ + ⟨e_b, ∇_{e_a}e_c⟩|`, scaled by `ε²` so that
    /// the horizontal weight `ε⁻²` does not inflate rounding.
    pub fn compatibility_residual(&self) -> f64 {
        let d = self.dim();
        let w = self.eps * self.eps;
        let mut r: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    r = r.max(w * (self.lowered(a, b, c) + self.lowered(a, c, b)).abs());
                }
            }
        }
        r
    }
}

pub fn levi_civita_koszul(m: &FinslerMetric, p: &ChartPoint, eps: f64) -> Result<SMConnectionTable> {
    let geo = LocalGeometry::at(m, p)?;
    koszul_from(&brackets(&geo)?, geo.dim(), eps, p)
}

/// Koszul formula with constant frame Gram entries `G`:
/// `2Γᶜ_{ab}G_c = cᶜ_{ab}G_c − cᵇ_{ac}G_b − cᵃ_{bc}G_a`.
pub fn koszul_from(br: &Brackets, n: usize, eps: f64, at: &ChartPoint) -> Result<SMConnectionTable> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GeomError::Config(format!("ε must be positive, got {eps}")));
    }
    let d = 2 * n - 1;
    let gd = sasaki_diagonal(n, eps);
    let mut coeffs = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let s = br.get(a, b, c) * gd[c] - br.get(a, c, b) * gd[b] - br.get(b, c, a) * gd[a];
                coeffs[(a * d + b) * d + c] = 0.5 * s / gd[c];
            }
        }
    }
    Ok(SMConnectionTable { at: at.clone(), eps, n, coeffs })
}

pub fn projected_connection(m: &FinslerMetric, p: &ChartPoint, eps: f64) -> Result<ConnectionMatrix> {
    Ok(project(&levi_civita_koszul(m, p, eps)?))
}

/// `ω_iʲ(e_a) = ⟨∇_{e_a}e_i, e_j⟩/⟨e_j, e_j⟩` for `i, j ≤ n`.
pub fn project(t: &SMConnectionTable) -> ConnectionMatrix {
    let n = t.n;
    let mut gamma = vec![0.0; n * n * n];
    let mut b = vec![0.0; n * n * (n - 1)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] = t.get(k, j, i);
            }
            for g in 0..n - 1 {
                b[(i * n + j) * (n - 1) + g] = t.get(n + g, j, i);
            }
        }
    }
    ConnectionMatrix { n, at: t.at.clone(), gamma, b }
}

/// Validates an ε sweep: positive, finite and strictly decreasing.
pub fn check_eps_list(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(GeomError::Config("empty ε list".into()));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(GeomError::Config(format!("ε values must be positive: {eps:?}")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GeomError::Config(format!("ε list must be strictly decreasing: {eps:?}")));
    }
    Ok(())
}

pub fn adiabatic_deviation(m: &FinslerMetric, p: &ChartPoint, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_eps_list(eps)?;
    let geo = LocalGeometry::at(m, p)?;
    let sol = chern_solve(&geo)?;
    adiabatic_from(&geo, &sol, eps)
}

/// `max |ω_iʲ,ε(e_a) − ω̂_iʲ(e_a)|` over all frame directions, per `ε`.
pub fn adiabatic_from(geo: &LocalGeometry, sol: &ChernSolution, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_eps_list(eps)?;
    let br = brackets(geo)?;
    let cartan = cartan_from(sol);
    eps.iter()
        .map(|&e| {
            let proj = project(&koszul_from(&br, geo.dim(), e, geo.point())?);
            Ok((e, proj.max_diff(&cartan)))
        })
        .collect()
}

/// Least-squares slope of `log deviation` against `log ε`; `None` when some
/// deviation is not positive or fewer than two points are given.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(e, d)| !(*e > 0.0) || !(*d > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// One row of an ε sweep.
#[derive(Debug, Clone, Serialize)]
pub struct AdiabaticRow {
    pub metric: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub eps: f64,
    pub deviation: f64,
}

/// CSV with columns `metric,x1..,y1..,eps,deviation` and a `# slope=` footer.
pub fn adiabatic_csv(rows: &[AdiabaticRow], slope: Option<f64>) -> Result<String> {
    let n = rows.first().map(|r| r.x.len()).unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["metric".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.extend(["eps".to_string(), "deviation".to_string()]);
    let io = |e: csv::Error| GeomError::Config(format!("csv: {e}"));
    w.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![r.metric.clone()];
        rec.extend(r.x.iter().chain(&r.y).map(|v| format!("{v:e}")));
        rec.push(format!("{:e}", r.eps));
        rec.push(format!("{:e}", r.deviation));
        w.write_record(&rec).map_err(io)?;
    }
    let mut out = String::from_utf8(w.into_inner().map_err(|e| GeomError::Config(e.to_string()))?)
        .map_err(|e| GeomError::Config(e.to_string()))?;
    match slope {
        Some(s) => out.push_str(&format!("# slope={s:e}\n")),
        None => out.push_str("# slope=nan\n"),
    }
    Ok(out)
}

pub fn bott_horizontal_check(m: &FinslerMetric, p: &ChartPoint) -> Result<f64> {
    let geo = LocalGeometry::at(m, p)?;
    let sol = chern_solve(&geo)?;
    bott_horizontal_from(&geo, &sol)
}

/// `max |ω_iʲ(e_k) − ω_iʲ,¹(e_k)|` over horizontal `k`.
pub fn bott_horizontal_from(geo: &LocalGeometry, sol: &ChernSolution) -> Result<f64> {
    let n = geo.dim();
    let proj = project(&koszul_from(&brackets(geo)?, n, 1.0, geo.point())?);
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                r = r.max((sol.connection.gamma(i, j, k) - proj.gamma(i, j, k)).abs());
            }
        }
    }
    Ok(r)
}

/// Largest `|∂σ/∂yⁱ|` at `p`.
pub fn sigma_y_derivative(sigma: &SigmaSpec, p: &ChartPoint) -> Result<f64> {
    let n = p.dim();
    let z = seed_coordinates(p, 1)?;
    let s = sigma.eval(&z[..n], &z[n..])?;
    Ok((0..n).map(|i| s.coeffs()[1 + n + i].abs()).fold(0.0, f64::max))
}

/// Errors with `BasicViolation` unless `σ` is pulled back from `M`.
pub fn require_basic(sigma: &SigmaSpec, p: &ChartPoint) -> Result<()> {
    let dy = sigma_y_derivative(sigma, p)?;
    if dy > BASIC_TOL || !sigma.is_basic() {
        return Err(GeomError::BasicViolation(dy));
    }
    Ok(())
}

/// `H̄` of the frame rescaled by `e^{−σ}` under `e^{2σ}` times the Sasaki
/// metric, normalized back to the unbarred frame as `e^{σ}H̄_{ijγ}`.
pub fn conformal_h(geo: &LocalGeometry, sigma: &SigmaSpec) -> Result<CartanEndomorphism> {
    require_basic(sigma, geo.point())?;
    let n = geo.dim();
    let z = geo.coordinates();
    let s = sigma.eval(&z[..n], &z[n..])?;
    let es = s.exp();
    let ems = s.scale(-1.0).exp();
    let frame: Vec<VectorField> = geo.frame()?.iter().map(|e| e.iter().map(|c| c * &ems).collect()).collect();
    let theta: Vec<FormField> = geo.coframe()?[..n].iter().map(|w| w.mul_fn(&es)).collect();
    let mut h = vec![0.0; n * n * (n - 1)];
    for g in 0..n - 1 {
        let l = lie_derivative_tensor(&frame[n + g], &frame[..n], &theta)?;
        for i in 0..n {
            for j in 0..n {
                h[(i * n + j) * (n - 1) + g] = 0.5 * l[(i, j)] * es.value();
            }
        }
    }
    Ok(CartanEndomorphism { n, at: geo.point().clone(), h })
}

pub fn conformal_h_check(m: &FinslerMetric, p: &ChartPoint, sigma: &SigmaSpec) -> Result<f64> {
    require_basic(sigma, p)?;
    let geo = LocalGeometry::at(m, p)?;
    conformal_h_from(&geo, sigma)
}

/// `‖e^{σ}H̄ − H‖_∞` with both sides from the Lie-derivative route.
pub fn conformal_h_from(geo: &LocalGeometry, sigma: &SigmaSpec) -> Result<f64> {
    let bar = conformal_h(geo, sigma)?;
    Ok(bar.max_diff(&cartan_endomorphism_lie_from(geo)?))
}
