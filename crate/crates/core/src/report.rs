//! Verification suites over indicatrix samples and their JSON reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chern_simons::{conformal_eta_at_order, invariance_condition, transgression_data_from, transgression_of};
use crate::connections::{
    bott_vertical_from, cartan_endomorphism_lie_from, cartan_from, chern_solve, reeb_row_residual, curvature_from,
    curvature_order, dual_check_from, structure_residuals, uniqueness_test, ChernSolution,
};
use crate::error::{GeomError, Result};
use crate::frame::{
    almost_complex_residuals, brackets, contact_volume, duality_residual, frame_identities, hilbert_form_residual,
    indicatrix_sample, log_f_residual, reeb_lie_residual, sasaki_metric,
};
use crate::jet::{DEFAULT_ORDER, MAX_ORDER};
use crate::local::LocalGeometry;
use crate::metric::FinslerMetric;
use crate::point::ChartPoint;
use crate::sasaki::{adiabatic_from, bott_horizontal_from, conformal_h_from, koszul_from, loglog_slope, AdiabaticRow};
use crate::sigma::SigmaSpec;
use crate::spray::spray_compatibility_from;
use crate::tensors::cartan_from as cartan_tensor_from;

/// Tolerance for algebraic identities.
pub const TOL_ALGEBRAIC: f64 = 1e-10;
/// Tolerance for identities involving exact jet derivatives.
pub const TOL_JET: f64 = 1e-8;
/// Tolerance for identities comparing two independent computations.
pub const TOL_ROUTES: f64 = 1e-6;
/// Required reduction `deviation(ε_min) / deviation(ε_max)` on an ε sweep.
pub const ADIABATIC_RATIO: f64 = 0.05;
/// Sweep used by the adiabatic suite.
pub const DEFAULT_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
/// Below this both sides of the surface identity count as vanishing.
pub const VANISHING: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Basics,
    Frames,
    Connections,
    Adiabatic,
    ChernSimons,
    Conformal,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["basics", "frames", "connections", "adiabatic", "chern-simons", "conformal", "all"];

    pub fn parse(s: &str) -> Result<Suite> {
        Ok(match s {
            "basics" => Suite::Basics,
            "frames" => Suite::Frames,
            "connections" => Suite::Connections,
            "adiabatic" => Suite::Adiabatic,
            "chern-simons" => Suite::ChernSimons,
            "conformal" => Suite::Conformal,
            "all" => Suite::All,
            other => return Err(GeomError::Config(format!("unknown suite '{other}' (known: {})", Suite::NAMES.join(", ")))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Basics => "basics",
            Suite::Frames => "frames",
            Suite::Connections => "connections",
            Suite::Adiabatic => "adiabatic",
            Suite::ChernSimons => "chern-simons",
            Suite::Conformal => "conformal",
            Suite::All => "all",
        }
    }

    fn includes(self, part: Suite) -> bool {
        self == Suite::All || self == part
    }
}

/// One check: identifier, descriptive anchor and default tolerance.
struct CheckSpec {
    id: &'static str,
    anchor: &'static str,
    tol: f64,
    /// Fixed tolerances are not replaced by `--tol`.
    fixed: bool,
}

const fn check(id: &'static str, anchor: &'static str, tol: f64) -> CheckSpec {
    CheckSpec { id, anchor, tol, fixed: false }
}

const CATALOG: &[CheckSpec] = &[
    check("local-geometry", "F, g and the moving frame are defined", 0.0),
    check("homogeneity", "F(x, λy) = λF(x, y)", TOL_ALGEBRAIC),
    check("fundamental-tensor", "g_ij yⁱyʲ = F²", TOL_ALGEBRAIC),
    check("cartan-tensor", "A totally symmetric, A_ijk yᵏ = 0", TOL_ALGEBRAIC),
    check("spray-compatibility", "F_xʲ = Nᵏ_j F_yᵏ", TOL_JET),
    check("frame-algebra", "u v = I, uᵀgu = I, Σv^α v^α = F F_yy", TOL_ALGEBRAIC),
    check("coframe-duality", "ωᵃ(e_b) = δᵃ_b", TOL_ALGEBRAIC),
    check("radial-coframe", "ω^{2n} = −d log F", TOL_JET),
    check("hilbert-form-derivative", "dωⁿ = Σ ω^α∧ω^{n+α}", TOL_JET),
    check("reeb-lie-derivative", "L_𝐆 g = −Σ(ω^α⊗ω^{n+α} + ω^{n+α}⊗ω^α)", TOL_JET),
    check("contact-volume", "ωⁿ∧(dωⁿ)^{n−1}(e_1..e_{2n−1}) = ±(n−1)!", TOL_JET),
    check("almost-complex", "J² = −1, J*ω^α = ω^{n+α}, J*δx = −δy", TOL_ALGEBRAIC),
    check("sasaki-gram", "Sasaki-type metric makes the frame orthonormal", TOL_ALGEBRAIC),
    check("structure-solve", "dωⁱ has no vertical-vertical part; b + bᵗ = −2H", 1e-7),
    check("first-structure-equation", "dϑ = ϑ∧ω", 1e-7),
    check("second-structure-equation", "ω + ωᵗ = −2H", 1e-9),
    check("reeb-row", "ω_αⁿ = ω^{n+α}, ω_nⁿ = 0", TOL_JET),
    check("uniqueness", "admissible perturbations break dϑ = ϑ∧ω linearly", TOL_ROUTES),
    check("cartan-endomorphism-routes", "H from the Cartan tensor equals ½L_X g", 1e-7),
    check("cartan-endomorphism-symmetry", "H_ijγ = H_jiγ, H_njγ = 0", TOL_ALGEBRAIC),
    check("compatibility-defect", "X⟨U,V⟩ − ⟨∇_X U,V⟩ − ⟨U,∇_X V⟩ = ⟨2H(X)U,V⟩", 1e-7),
    check("bott-vertical", "p^⊥[e_{n+γ}, e_i] = bʲ_iγ e_j", 1e-7),
    check("cartan-antisymmetry", "ω̂ = ω + H is antisymmetric", TOL_JET),
    check("curvature-vertical", "Ω has no ω^{n+γ}∧ω^{n+δ} part", 1e-7),
    check("koszul-torsion", "Levi-Civita of the rescaled Sasaki metric is torsion free", TOL_JET),
    check("koszul-compatibility", "Levi-Civita of the rescaled Sasaki metric is metric", TOL_JET),
    check("bott-horizontal", "horizontal Chern entries equal the ε = 1 projection", TOL_ROUTES),
    CheckSpec {
        id: "adiabatic-convergence",
        anchor: "projected Levi-Civita connections tend to the Cartan connection as ε → 0",
        tol: ADIABATIC_RATIO,
        fixed: true,
    },
    check("transgression-expansion", "R_t = R₀ + t[∇₀,H] + t²H²", 1e-9),
    check("transgression-closed-form", "∫tr[HR_t] = tr[HR₀ + ½H[∇₀,H] + ⅓H³]", TOL_ALGEBRAIC),
    check("surface-identity", "−2∫tr[HR_t]dt = η∧dη", TOL_ROUTES),
    check("cartan-form-trace", "η = tr[H] = H₁₁₁ω³", TOL_ALGEBRAIC),
    check("chern-simons-vanishing", "transgression and η∧(dη)^{n−1} vanish for Berwald data", VANISHING),
    check("conformal-cartan-endomorphism", "H̄ = H for e^{2σ}g^{T(SM)}", TOL_JET),
    check("conformal-cartan-form", "η̄ = η + 𝐆(σ)𝐈 + 𝐀(𝐈*,dσ*) − ⟨𝐈*,dσ*⟩ωⁿ", TOL_ROUTES),
    check("conformal-constant-factor", "η̄ = η for constant σ", TOL_ALGEBRAIC),
    check("invariance-consistency", "invariance conditions imply η̄ = η", TOL_JET),
];

/// Settings of a suite run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    /// Replaces the tolerance of every residual check.
    pub tol: Option<f64>,
    pub jet_order: usize,
    pub sigma: SigmaSpec,
    pub eps: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: Suite::All,
            samples: 16,
            seed: 1,
            tol: None,
            jet_order: DEFAULT_ORDER,
            sigma: SigmaSpec::linear(0, 0.3),
            eps: DEFAULT_EPS.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(GeomError::Config("--samples must be positive".into()));
        }
        if !(4..=MAX_ORDER).contains(&self.jet_order) {
            return Err(GeomError::Config(format!("--jet-order must be in 4..={MAX_ORDER}, got {}", self.jet_order)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(GeomError::Config(format!("--tol must be positive, got {t}")));
            }
        }
        if !self.sigma.is_basic() && self.suite.includes(Suite::Conformal) {
            return Err(GeomError::Config(format!("conformal factor '{}' depends on y", self.sigma)));
        }
        crate::sasaki::check_eps_list(&self.eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    /// `None` when some sample raised an error.
    pub max_residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub metric: String,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub jet_order: usize,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| GeomError::Config(format!("json: {e}")))
    }

    pub fn from_json(s: &str) -> Result<SuiteReport> {
        serde_json::from_str(s).map_err(|e| GeomError::Config(format!("json: {e}")))
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Outcome {
    id: &'static str,
    value: std::result::Result<f64, String>,
    ms: f64,
}

#[derive(Default)]
struct Recorder {
    out: Vec<Outcome>,
}

impl Recorder {
    fn run(&mut self, id: &'static str, f: impl FnOnce() -> Result<f64>) {
        let start = Instant::now();
        let value = f().map_err(|e| e.to_string());
        self.out.push(Outcome { id, value, ms: start.elapsed().as_secs_f64() * 1e3 });
    }

    fn fail(&mut self, id: &'static str, e: &GeomError) {
        self.out.push(Outcome { id, value: Err(e.to_string()), ms: 0.0 });
    }
}

fn max_of(vals: impl IntoIterator<Item = f64>) -> f64 {
    vals.into_iter().fold(0.0, f64::max)
}

fn sample_checks(m: &FinslerMetric, p: &ChartPoint, cfg: &RunConfig) -> Vec<Outcome> {
    let mut rec = Recorder::default();
    let suite = cfg.suite;
    let n = m.dim();
    if suite.includes(Suite::Basics) {
        rec.run("homogeneity", || {
            let f = m.value(p)?;
            let mut r: f64 = 0.0;
            for lambda in [0.5, 2.0, 7.3] {
                let ys: Vec<f64> = p.y().iter().map(|v| v * lambda).collect();
                r = r.max((m.eval(p.x(), &ys)? - lambda * f).abs() / (lambda * f));
            }
            Ok(r)
        });
    }
    let geo = match LocalGeometry::new(m, p, cfg.jet_order) {
        Ok(g) => g,
        Err(e) => {
            let id = if matches!(e, GeomError::NotPositiveDefinite(_)) { "fundamental-tensor" } else { "local-geometry" };
            rec.fail(id, &e);
            return rec.out;
        }
    };
    if suite.includes(Suite::Basics) {
        rec.run("fundamental-tensor", || {
            let g = geo.g_values();
            let y = p.y();
            let f2 = geo.f2().value();
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += g[(i, j)] * y[i] * y[j];
                }
            }
            Ok((s - f2).abs() / f2)
        });
        rec.run("cartan-tensor", || {
            let a = cartan_tensor_from(&geo)?;
            Ok(a.symmetry_residual().max(a.euler_residual()))
        });
        rec.run("spray-compatibility", || spray_compatibility_from(&geo));
    }
    if geo.frame().is_err() {
        if let Err(e) = geo.frame() {
            rec.fail("local-geometry", &e);
        }
        return rec.out;
    }
    if suite.includes(Suite::Frames) {
        rec.run("frame-algebra", || Ok(frame_identities(&geo)?.max()));
        rec.run("coframe-duality", || duality_residual(&geo));
        rec.run("radial-coframe", || log_f_residual(&geo));
        rec.run("hilbert-form-derivative", || hilbert_form_residual(&geo));
        rec.run("reeb-lie-derivative", || reeb_lie_residual(&geo));
        rec.run("contact-volume", || {
            let fact: f64 = (1..n).map(|k| k as f64).product();
            Ok((contact_volume(&geo)?.abs() - fact).abs())
        });
        rec.run("almost-complex", || {
            let (a, b, c) = almost_complex_residuals(&geo)?;
            Ok(a.max(b).max(c))
        });
        rec.run("sasaki-gram", || {
            let gram = sasaki_metric(&geo, 1.0)?;
            Ok((gram.clone() - nalgebra::DMatrix::identity(gram.nrows(), gram.ncols())).abs().max())
        });
    }
    let needs_chern = suite.includes(Suite::Connections) || suite.includes(Suite::Adiabatic);
    let sol: Option<ChernSolution> = if needs_chern {
        let start = Instant::now();
        match chern_solve(&geo) {
            Ok(s) => {
                rec.out.push(Outcome {
                    id: "structure-solve",
                    value: Ok(s.vertical_residual.max(s.symmetrization_residual)),
                    ms: start.elapsed().as_secs_f64() * 1e3,
                });
                Some(s)
            }
            Err(e) => {
                rec.fail("structure-solve", &e);
                None
            }
        }
    } else {
        None
    };
    if let (true, Some(sol)) = (suite.includes(Suite::Connections), &sol) {
        rec.run("first-structure-equation", || Ok(structure_residuals(&geo, sol)?.first));
        rec.run("second-structure-equation", || Ok(structure_residuals(&geo, sol)?.second));
        rec.run("reeb-row", || Ok(reeb_row_residual(&sol.connection)));
        rec.run("uniqueness", || {
            let u = uniqueness_test(&geo, sol, 8, cfg.seed)?;
            if u.min_ratio > 1e-3 {
                Ok(u.max_nonlinearity)
            } else {
                Err(GeomError::StructureInconsistent(u.min_ratio))
            }
        });
        let lie = cartan_endomorphism_lie_from(&geo);
        rec.run("cartan-endomorphism-routes", || Ok(sol.h.max_diff(lie.as_ref().map_err(Clone::clone)?)));
        rec.run("cartan-endomorphism-symmetry", || {
            let h = lie.as_ref().map_err(Clone::clone)?;
            Ok(max_of([h.symmetry_residual(), h.reeb_residual(), sol.h.symmetry_residual(), sol.h.reeb_residual()]))
        });
        rec.run("compatibility-defect", || Ok(dual_check_from(&sol.connection, lie.as_ref().map_err(Clone::clone)?)?.max()));
        rec.run("bott-vertical", || bott_vertical_from(&geo, &sol.connection));
        rec.run("cartan-antisymmetry", || Ok(cartan_from(sol).antisymmetry_residual()));
        rec.run("curvature-vertical", || {
            let deep = LocalGeometry::new(m, p, curvature_order(cfg.jet_order))?;
            Ok(curvature_from(&deep, &chern_solve(&deep)?)?.vertical_max)
        });
    }
    if let (true, Some(sol)) = (suite.includes(Suite::Adiabatic), &sol) {
        let br = brackets(&geo);
        let mut eps_all = cfg.eps.clone();
        eps_all.push(1.0);
        rec.run("koszul-torsion", || {
            let br = br.as_ref().map_err(Clone::clone)?;
            let mut r: f64 = 0.0;
            for &e in &eps_all {
                r = r.max(koszul_from(br, n, e, p)?.torsion_residual(br));
            }
            Ok(r)
        });
        rec.run("koszul-compatibility", || {
            let br = br.as_ref().map_err(Clone::clone)?;
            let mut r: f64 = 0.0;
            for &e in &eps_all {
                r = r.max(koszul_from(br, n, e, p)?.compatibility_residual());
            }
            Ok(r)
        });
        rec.run("bott-horizontal", || bott_horizontal_from(&geo, sol));
        rec.run("adiabatic-convergence", || {
            let d = adiabatic_from(&geo, sol, &cfg.eps)?;
            Ok(convergence_measure(&d))
        });
    }
    if suite.includes(Suite::ChernSimons) {
        match LocalGeometry::new(m, p, curvature_order(cfg.jet_order)).and_then(|deep| transgression_data_from(&deep)) {
            Err(e) => rec.fail("transgression-expansion", &e),
            Ok(d) => {
                rec.run("transgression-expansion", || Ok(d.expansion_residual()));
                let tr = transgression_of(&d);
                let cs = d.chern_simons();
                if n == 2 {
                    rec.run("transgression-closed-form", || {
                        let t = tr.clone()?;
                        Ok((t.quadrature - t.closed_form.unwrap_or(f64::NAN)).abs())
                    });
                    rec.run("surface-identity", || {
                        let lhs = tr.clone()?.quadrature;
                        if lhs.abs().max(cs.abs()) < VANISHING {
                            Ok(0.0)
                        } else {
                            Ok((lhs - cs).abs() / lhs.abs().max(1e-12))
                        }
                    });
                    rec.run("cartan-form-trace", || {
                        let e = geo.frame_values()?;
                        let h11 = d.h.get(0, 0);
                        Ok(max_of([
                            (d.eta.eval(&[&e[2]]) - h11.eval(&[&e[2]])).abs(),
                            d.eta.eval(&[&e[0]]).abs(),
                            d.eta.eval(&[&e[1]]).abs(),
                        ]))
                    });
                }
                if m.is_riemannian() || m.is_locally_minkowski() {
                    rec.run("chern-simons-vanishing", || Ok(tr.clone()?.quadrature.abs().max(cs.abs())));
                }
            }
        }
    }
    if suite.includes(Suite::Conformal) {
        rec.run("conformal-cartan-endomorphism", || conformal_h_from(&geo, &cfg.sigma));
        rec.run("conformal-cartan-form", || Ok(conformal_eta_at_order(m, p, &cfg.sigma, cfg.jet_order)?.residual));
        rec.run("conformal-constant-factor", || {
            Ok(conformal_eta_at_order(m, p, &SigmaSpec::zero().with_constant(0.4), cfg.jet_order)?.residual)
        });
        rec.run("invariance-consistency", || {
            let c = invariance_condition(m, p, &cfg.sigma)?;
            Ok(if c.consistent(TOL_JET) { 0.0 } else { c.eta_gap })
        });
    }
    rec.out
}

/// `0` when the sweep is already at its limit, `d(ε_min)/d(ε_max)` when the
/// deviations decrease strictly, `+∞` otherwise.
pub fn convergence_measure(d: &[(f64, f64)]) -> f64 {
    let first = d.first().map(|v| v.1).unwrap_or(0.0);
    let last = d.last().map(|v| v.1).unwrap_or(0.0);
    if first < 1e-12 {
        return 0.0;
    }
    if d.windows(2).all(|w| w[1].1 < w[0].1) {
        last / first
    } else {
        f64::INFINITY
    }
}

/// Runs `f` on every point in parallel, results in sample order; the pool size
/// is capped by `FINSLERLAB_THREADS` when set.
pub fn ordered_par_map<T: Send, F: Fn(&ChartPoint) -> T + Sync + Send>(points: &[ChartPoint], f: F) -> Vec<T> {
    let threads = std::env::var("FINSLERLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| points.par_iter().map(&f).collect()),
        Err(_) => points.iter().map(f).collect(),
    }
}

pub fn run_suite(m: &FinslerMetric, cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let points = indicatrix_sample(m, cfg.samples, cfg.seed)?;
    let per_sample = ordered_par_map(&points, |p| sample_checks(m, p, cfg));
    let mut agg: BTreeMap<usize, (f64, Option<String>, f64)> = BTreeMap::new();
    for outcomes in per_sample {
        for o in outcomes {
            let idx = CATALOG.iter().position(|c| c.id == o.id).expect("check id is in the catalog");
            let entry = agg.entry(idx).or_insert((0.0, None, 0.0));
            match o.value {
                Ok(v) => entry.0 = entry.0.max(if v.is_nan() { f64::INFINITY } else { v }),
                Err(e) => {
                    if entry.1.is_none() {
                        entry.1 = Some(e);
                    }
                }
            }
            entry.2 += o.ms;
        }
    }
    let checks: Vec<CheckRecord> = agg
        .into_iter()
        .map(|(idx, (r, err, ms))| {
            let s = &CATALOG[idx];
            let tol = if s.fixed { s.tol } else { cfg.tol.unwrap_or(s.tol) };
            let max_residual = if err.is_some() || !r.is_finite() { None } else { Some(r) };
            let pass = err.is_none() && r.is_finite() && r <= tol;
            let error = err.or_else(|| (!r.is_finite()).then(|| "residual is not finite".to_string()));
            CheckRecord { id: s.id.into(), anchor: s.anchor.into(), max_residual, tol, pass, ms: (ms * 1e3).round() / 1e3, error }
        })
        .collect();
    Ok(SuiteReport {
        metric: m.name().to_string(),
        dim: m.dim(),
        params: m.params().clone(),
        suite: cfg.suite.name().to_string(),
        samples: cfg.samples,
        seed: cfg.seed,
        jet_order: cfg.jet_order,
        pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
        checks,
    })
}

/// ε sweep at indicatrix samples; the slope is fitted to every row with a
/// positive deviation.
pub fn adiabatic_sweep(m: &FinslerMetric, samples: usize, seed: u64, eps: &[f64], jet_order: usize) -> Result<(Vec<AdiabaticRow>, Option<f64>)> {
    crate::sasaki::check_eps_list(eps)?;
    let points = indicatrix_sample(m, samples, seed)?;
    let per = ordered_par_map(&points, |p| -> Result<Vec<(f64, f64)>> {
        let geo = LocalGeometry::new(m, p, jet_order)?;
        adiabatic_from(&geo, &chern_solve(&geo)?, eps)
    });
    let mut rows = Vec::new();
    let mut pooled = Vec::new();
    for (p, res) in points.iter().zip(per) {
        for (e, d) in res? {
            if d > 0.0 {
                pooled.push((e, d));
            }
            rows.push(AdiabaticRow { metric: m.name().to_string(), x: p.x().to_vec(), y: p.y().to_vec(), eps: e, deviation: d });
        }
    }
    Ok((rows, loglog_slope(&pooled)))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{:>13.6e}", x)).collect();
    parts.join(" ")
}

/// Human-readable dump of the pointwise objects at `p`.
pub fn point_table(m: &FinslerMetric, p: &ChartPoint, jet_order: usize) -> Result<String> {
    let geo = LocalGeometry::new(m, p, jet_order)?;
    let n = geo.dim();
    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        let _ = writeln!(s, "{line}");
    };
    w(&mut s, format!("metric {} (n = {n}) at x = {:?}, y = {:?}", m.name(), p.x(), p.y()));
    w(&mut s, format!("F = {:.12e}", geo.f().value()));
    w(&mut s, "fundamental tensor g_ij = ½[F²]_yⁱyʲ".into());
    let g = geo.g_values();
    for i in 0..n {
        w(&mut s, format!("  {}", fmt_vec(&g.row(i).iter().copied().collect::<Vec<_>>())));
    }
    w(&mut s, "spray coefficients Gⁱ".into());
    w(&mut s, format!("  {}", fmt_vec(&geo.spray().iter().map(|j| j.value()).collect::<Vec<_>>())));
    w(&mut s, "nonlinear connection Nⁱ_j = ∂Gⁱ/∂yʲ".into());
    let nl = geo.nonlinear_values()?;
    for i in 0..n {
        w(&mut s, format!("  {}", fmt_vec(&nl.row(i).iter().copied().collect::<Vec<_>>())));
    }
    let a = cartan_tensor_from(&geo)?;
    w(&mut s, "Cartan tensor A_ijk = ¼F[F²]_yⁱyʲyᵏ".into());
    for i in 0..n {
        for j in 0..n {
            w(&mut s, format!("  A_{}{}· {}", i + 1, j + 1, fmt_vec(&(0..n).map(|k| a.get(i, j, k)).collect::<Vec<_>>())));
        }
    }
    let sol = chern_solve(&geo)?;
    w(&mut s, "Cartan endomorphism H_ijγ = −A_pqk uᵖ_i u^q_j uᵏ_γ".into());
    for i in 0..n {
        for j in 0..n {
            w(&mut s, format!("  H_{}{}· {}", i + 1, j + 1, fmt_vec(&(0..n - 1).map(|g| sol.h.get(i, j, g)).collect::<Vec<_>>())));
        }
    }
    let eta: Vec<f64> = (0..n - 1).map(|g| (0..n).map(|i| sol.h.get(i, i, g)).sum()).collect();
    w(&mut s, "Cartan form η = H_iiγ ω^{n+γ}, coefficients".into());
    w(&mut s, format!("  {}", fmt_vec(&eta)));
    let cartan = cartan_from(&sol);
    for (label, c) in [("Chern connection", &sol.connection), ("Cartan connection", &cartan)] {
        w(&mut s, format!("{label} Γⁱ_jk"));
        for i in 0..n {
            for j in 0..n {
                w(&mut s, format!("  Γ{}_{}· {}", i + 1, j + 1, fmt_vec(&(0..n).map(|k| c.gamma(i, j, k)).collect::<Vec<_>>())));
            }
        }
        w(&mut s, format!("{label} bⁱ_jγ"));
        for i in 0..n {
            for j in 0..n {
                w(&mut s, format!("  b{}_{}· {}", i + 1, j + 1, fmt_vec(&(0..n - 1).map(|g| c.b(i, j, g)).collect::<Vec<_>>())));
            }
        }
    }
    Ok(s)
}
