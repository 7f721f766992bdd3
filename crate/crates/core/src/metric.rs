//! Closed-form Finsler metrics and the registry that names them.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::{seed_coordinates, Jet, Scalar};
use crate::point::ChartPoint;
use crate::sigma::SigmaSpec;

/// Chart domain in `x`-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { radius: f64 },
}

impl Domain {
    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Domain::Box { lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| v > l && v < h),
            Domain::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>() < radius * radius,
        }
    }

    /// Sub-box used for sampling, well inside the domain.
    pub fn safe_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lo, hi } => {
                let l = lo.iter().zip(hi).map(|(l, h)| l + 0.2 * (h - l)).collect();
                let h = lo.iter().zip(hi).map(|(l, h)| h - 0.2 * (h - l)).collect();
                (l, h)
            }
            Domain::Ball { radius } => {
                // inscribed in the ball of half the radius
                let n = self.dim_hint();
                let s = 0.5 * radius / (n as f64).sqrt();
                (vec![-s; n], vec![s; n])
            }
        }
    }

    fn dim_hint(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Ball { .. } => 0,
        }
    }

    fn bounding_box(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Ball { radius } => (vec![-radius; n], vec![*radius; n]),
        }
    }
}

/// Conformally flat Riemannian bases `a_ij = λ(x)² δ_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiemannianBase {
    Flat,
    /// Stereographic chart of the unit sphere, `λ = 1/(1 + |x|²/4)`.
    RoundSphere,
    /// Upper half-space `xⁿ > 0`, `λ = 1/xⁿ`.
    HyperbolicHalfSpace,
}

impl RiemannianBase {
    fn factor<S: Scalar>(&self, x: &[S]) -> Result<S> {
        match self {
            RiemannianBase::Flat => Ok(x[0].cst(1.0)),
            RiemannianBase::RoundSphere => {
                let r2 = x.iter().fold(x[0].cst(0.0), |acc, v| acc.add(&v.mul(v)));
                x[0].cst(1.0).div(&r2.scale(0.25).add(&x[0].cst(1.0)))
            }
            RiemannianBase::HyperbolicHalfSpace => x[0].cst(1.0).div(&x[x.len() - 1]),
        }
    }

    fn domain(&self, n: usize) -> Domain {
        match self {
            RiemannianBase::Flat => Domain::cube(n, -1.0, 1.0),
            RiemannianBase::RoundSphere => Domain::cube(n, -1.5, 1.5),
            RiemannianBase::HyperbolicHalfSpace => {
                let mut lo = vec![-1.0; n];
                let mut hi = vec![1.0; n];
                lo[n - 1] = 0.1;
                hi[n - 1] = 2.1;
                Domain::Box { lo, hi }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Euclidean,
    Riemannian(RiemannianBase),
    /// `F = λ(x)|y| + (b + B x)·y`.
    Randers { base: RiemannianBase, b: Vec<f64>, db: Vec<Vec<f64>> },
    /// Funk metric of the ball of the given radius.
    Funk { radius: f64 },
    /// `F = (|y|² + ε (Σ (yⁱ)⁴)^{1/2})^{1/2}`.
    PerturbedQuartic { eps: f64 },
    /// `F = |y¹|`, whose Hessian has rank one.
    BrokenDegenerate,
    /// `e^σ F` for a basic `σ`.
    Conformal { base: Box<FinslerMetric>, sigma: SigmaSpec },
}

/// A named, parameterized chart-local Finsler metric.
#[derive(Debug, Clone, PartialEq)]
pub struct FinslerMetric {
    name: String,
    dim: usize,
    params: BTreeMap<String, f64>,
    domain: Domain,
    kind: MetricKind,
}

/// Registry entry.
#[derive(Debug, Clone, Serialize)]
pub struct MetricDescriptor {
    pub name: &'static str,
    pub default_dim: usize,
    pub params: Vec<(&'static str, f64)>,
    pub riemannian: bool,
    pub description: &'static str,
}

pub fn registry_list() -> Vec<MetricDescriptor> {
    vec![
        MetricDescriptor {
            name: "euclidean",
            default_dim: 2,
            params: vec![],
            riemannian: true,
            description: "flat |y|",
        },
        MetricDescriptor {
            name: "round-sphere",
            default_dim: 2,
            params: vec![],
            riemannian: true,
            description: "unit sphere, stereographic chart a = δ/(1+|x|²/4)²",
        },
        MetricDescriptor {
            name: "hyperbolic-half-plane",
            default_dim: 2,
            params: vec![],
            riemannian: true,
            description: "upper half-space a = δ/(xⁿ)², xⁿ > 0.1",
        },
        MetricDescriptor {
            name: "randers",
            default_dim: 2,
            params: vec![("b1", 0.5), ("b2", 0.0)],
            riemannian: false,
            description: "|y| + b·y with constant b, |b| < 1 (locally Minkowski)",
        },
        MetricDescriptor {
            name: "randers-sphere",
            default_dim: 2,
            params: vec![("b1", 0.3), ("b2", 0.0)],
            riemannian: false,
            description: "round-sphere norm + b·y (curved base)",
        },
        MetricDescriptor {
            name: "funk",
            default_dim: 2,
            params: vec![("radius", 1.0)],
            riemannian: false,
            description: "Funk metric of the ball",
        },
        MetricDescriptor {
            name: "perturbed-quartic",
            default_dim: 2,
            params: vec![("eps", 0.2)],
            riemannian: false,
            description: "(|y|² + ε‖y‖₄²)^{1/2}, locally Minkowski",
        },
        MetricDescriptor {
            name: "broken-degenerate",
            default_dim: 2,
            params: vec![],
            riemannian: false,
            description: "|y¹|, not strongly convex (designed failure)",
        },
    ]
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

impl FinslerMetric {
    fn make(name: &str, dim: usize, params: BTreeMap<String, f64>, domain: Domain, kind: MetricKind) -> Result<Self> {
        if !(2..=4).contains(&dim) {
            return Err(GeomError::InvalidMetric(format!("dimension {dim} outside 2..=4")));
        }
        Ok(FinslerMetric { name: name.to_string(), dim, params, domain, kind })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::make("euclidean", n, BTreeMap::new(), Domain::cube(n, -1.0, 1.0), MetricKind::Euclidean)
    }

    pub fn riemannian(name: &str, n: usize, base: RiemannianBase) -> Result<Self> {
        Self::make(name, n, BTreeMap::new(), base.domain(n), MetricKind::Riemannian(base))
    }

    pub fn round_sphere(n: usize) -> Result<Self> {
        Self::riemannian("round-sphere", n, RiemannianBase::RoundSphere)
    }

    pub fn hyperbolic(n: usize) -> Result<Self> {
        Self::riemannian("hyperbolic-half-plane", n, RiemannianBase::HyperbolicHalfSpace)
    }

    /// Randers metric with constant `b` over a flat base.
    pub fn randers(b: &[f64]) -> Result<Self> {
        Self::randers_over(RiemannianBase::Flat, b, None)
    }

    /// Randers metric `λ|y| + (b + B x)·y`; rejects `b` whose base norm reaches 1
    /// anywhere on a grid of the chart domain.
    pub fn randers_over(base: RiemannianBase, b: &[f64], db: Option<Vec<Vec<f64>>>) -> Result<Self> {
        let n = b.len();
        let db = db.unwrap_or_else(|| vec![vec![0.0; n]; n]);
        if db.len() != n || db.iter().any(|r| r.len() != n) {
            return Err(GeomError::InvalidMetric("randers gradient matrix has wrong shape".into()));
        }
        let name = match base {
            RiemannianBase::Flat => "randers",
            RiemannianBase::RoundSphere => "randers-sphere",
            RiemannianBase::HyperbolicHalfSpace => "randers-hyperbolic",
        };
        let mut params = BTreeMap::new();
        for (i, v) in b.iter().enumerate() {
            params.insert(format!("b{}", i + 1), *v);
        }
        for (i, row) in db.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    params.insert(format!("b{}_x{}", i + 1, j + 1), *v);
                }
            }
        }
        let domain = base.domain(n);
        let m = Self::make(name, n, params, domain, MetricKind::Randers { base, b: b.to_vec(), db })?;
        let sup = m.randers_sup_norm();
        if !(sup < 1.0) {
            return Err(GeomError::InvalidMetric(format!("randers requires |b| < 1, got {sup:.4}")));
        }
        Ok(m)
    }

    fn randers_sup_norm(&self) -> f64 {
        let MetricKind::Randers { base, b, db } = &self.kind else { return 0.0 };
        let n = self.dim;
        let (lo, hi) = self.domain.bounding_box(n);
        let mut pts: Vec<Vec<f64>> = Vec::new();
        let steps = 5usize;
        let total = steps.pow(n as u32);
        for k in 0..total {
            let mut r = k;
            let x: Vec<f64> = (0..n)
                .map(|i| {
                    let t = (r % steps) as f64 / (steps - 1) as f64;
                    r /= steps;
                    // stay strictly inside
                    lo[i] + (0.001 + 0.998 * t) * (hi[i] - lo[i])
                })
                .collect();
            if self.domain.contains(&x) {
                pts.push(x);
            }
        }
        pts.iter()
            .map(|x| {
                let lam = base.factor(x).unwrap_or(f64::INFINITY);
                let bx: Vec<f64> = (0..n).map(|i| b[i] + (0..n).map(|j| db[i][j] * x[j]).sum::<f64>()).collect();
                bx.iter().map(|v| v * v).sum::<f64>().sqrt() / lam
            })
            .fold(0.0, f64::max)
    }

    pub fn funk(n: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(GeomError::InvalidMetric("funk radius must be positive".into()));
        }
        let mut params = BTreeMap::new();
        params.insert("radius".to_string(), radius);
        Self::make("funk", n, params, Domain::Ball { radius }, MetricKind::Funk { radius })
            .map(|mut m| {
                // record the dimension in the domain hint
                m.domain = Domain::Ball { radius };
                m
            })
    }

    pub fn perturbed_quartic(n: usize, eps: f64) -> Result<Self> {
        let mut params = BTreeMap::new();
        params.insert("eps".to_string(), eps);
        let m = Self::make(
            "perturbed-quartic",
            n,
            params,
            Domain::cube(n, -1.0, 1.0),
            MetricKind::PerturbedQuartic { eps },
        )?;
        if eps < 0.0 {
            // the quartic part is convex, so only negative ε can break convexity
            let report = validate_metric(&m, 64, 7);
            if report.not_positive_definite > 0 || report.min_eigenvalue <= 0.0 {
                return Err(GeomError::InvalidMetric(format!("perturbed-quartic ε = {eps} is not strongly convex")));
            }
        }
        Ok(m)
    }

    pub fn broken_degenerate(n: usize) -> Result<Self> {
        Self::make("broken-degenerate", n, BTreeMap::new(), Domain::cube(n, -1.0, 1.0), MetricKind::BrokenDegenerate)
    }

    /// `e^σ F`; `σ` must be basic.
    pub fn conformal(base: &FinslerMetric, sigma: SigmaSpec) -> Result<Self> {
        if !sigma.is_basic() {
            return Err(GeomError::BasicViolation(f64::NAN));
        }
        let mut params = base.params.clone();
        params.insert("sigma".into(), f64::NAN);
        params.remove("sigma");
        Ok(FinslerMetric {
            name: format!("{}~conformal", base.name),
            dim: base.dim,
            params,
            domain: base.domain.clone(),
            kind: MetricKind::Conformal { base: Box::new(base.clone()), sigma },
        })
    }

    /// Build a registry metric by name.
    pub fn by_name(name: &str, dim: usize, params: &BTreeMap<String, f64>) -> Result<Self> {
        let known: Vec<&str> = registry_list().iter().map(|d| d.name).collect();
        let randers_b = |default: &[f64]| -> (Vec<f64>, Vec<Vec<f64>>) {
            let b = (0..dim)
                .map(|i| param(params, &format!("b{}", i + 1), default.get(i).copied().unwrap_or(0.0)))
                .collect();
            let db = (0..dim)
                .map(|i| (0..dim).map(|j| param(params, &format!("b{}_x{}", i + 1, j + 1), 0.0)).collect())
                .collect();
            (b, db)
        };
        match name {
            "euclidean" => Self::euclidean(dim),
            "round-sphere" => Self::round_sphere(dim),
            "hyperbolic-half-plane" => Self::hyperbolic(dim),
            "randers" => {
                let (b, db) = randers_b(&[0.5]);
                Self::randers_over(RiemannianBase::Flat, &b, Some(db))
            }
            "randers-sphere" => {
                let (b, db) = randers_b(&[0.3]);
                Self::randers_over(RiemannianBase::RoundSphere, &b, Some(db))
            }
            "randers-hyperbolic" => {
                let (b, db) = randers_b(&[0.3]);
                Self::randers_over(RiemannianBase::HyperbolicHalfSpace, &b, Some(db))
            }
            "funk" => Self::funk(dim, param(params, "radius", 1.0)),
            "perturbed-quartic" => Self::perturbed_quartic(dim, param(params, "eps", 0.2)),
            "broken-degenerate" => Self::broken_degenerate(dim),
            other => Err(GeomError::Config(format!("unknown metric '{other}' (known: {})", known.join(", ")))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn is_riemannian(&self) -> bool {
        match &self.kind {
            MetricKind::Euclidean | MetricKind::Riemannian(_) => true,
            MetricKind::Conformal { base, .. } => base.is_riemannian(),
            _ => false,
        }
    }

    /// `F` independent of `x`.
    pub fn is_locally_minkowski(&self) -> bool {
        match &self.kind {
            MetricKind::Euclidean | MetricKind::PerturbedQuartic { .. } | MetricKind::BrokenDegenerate => true,
            MetricKind::Randers { base, db, .. } => {
                *base == RiemannianBase::Flat && db.iter().flatten().all(|v| *v == 0.0)
            }
            _ => false,
        }
    }

    /// Sampling box in `x`.
    pub fn safe_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.domain {
            Domain::Ball { radius } => {
                let s = 0.5 * radius / (self.dim as f64).sqrt();
                (vec![-s; self.dim], vec![s; self.dim])
            }
            d => d.safe_box(),
        }
    }

    /// Riemannian coefficients `a_ij(x)` for the Riemannian families.
    pub fn riemannian_coefficients(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        let lam = match &self.kind {
            MetricKind::Euclidean => 1.0,
            MetricKind::Riemannian(base) => base.factor(x).ok()?,
            _ => return None,
        };
        let n = self.dim;
        Some((0..n).map(|i| (0..n).map(|j| if i == j { lam * lam } else { 0.0 }).collect()).collect())
    }

    /// Evaluate `F(x, y)` in any [`Scalar`] arithmetic.
    pub fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> Result<S> {
        let norm2 = |v: &[S]| v.iter().fold(v[0].cst(0.0), |acc, c| acc.add(&c.mul(c)));
        let dot = |a: &[S], b: &[S]| a.iter().zip(b).fold(a[0].cst(0.0), |acc, (p, q)| acc.add(&p.mul(q)));
        let f = match &self.kind {
            MetricKind::Euclidean => norm2(y).sqrt()?,
            MetricKind::Riemannian(base) => base.factor(x)?.mul(&norm2(y).sqrt()?),
            MetricKind::Randers { base, b, db } => {
                let n = b.len();
                let mut lin = y[0].cst(0.0);
                for i in 0..n {
                    let mut bi = x[0].cst(b[i]);
                    for j in 0..n {
                        if db[i][j] != 0.0 {
                            bi = bi.add(&x[j].scale(db[i][j]));
                        }
                    }
                    lin = lin.add(&bi.mul(&y[i]));
                }
                base.factor(x)?.mul(&norm2(y).sqrt()?).add(&lin)
            }
            MetricKind::Funk { radius } => {
                let denom = x[0].cst(radius * radius).sub(&norm2(x));
                if denom.val() <= 0.0 {
                    return Err(GeomError::Domain("funk metric evaluated outside the ball".into()));
                }
                let xy = dot(x, y);
                let root = denom.mul(&norm2(y)).add(&xy.mul(&xy)).sqrt()?;
                root.add(&xy).div(&denom)?
            }
            MetricKind::PerturbedQuartic { eps } => {
                let q = y.iter().fold(y[0].cst(0.0), |acc, c| {
                    let c2 = c.mul(c);
                    acc.add(&c2.mul(&c2))
                });
                norm2(y).add(&q.sqrt()?.scale(*eps)).sqrt()?
            }
            MetricKind::BrokenDegenerate => y[0].mul(&y[0]).sqrt()?,
            MetricKind::Conformal { base, sigma } => sigma.eval(x, y)?.exp().mul(&base.eval(x, y)?),
        };
        if !(f.val() > 0.0) {
            return Err(GeomError::Domain(format!("F = {} is not positive", f.val())));
        }
        Ok(f)
    }

    pub fn value(&self, p: &ChartPoint) -> Result<f64> {
        self.check_point(p)?;
        self.eval(p.x(), p.y())
    }

    /// `F²` as a plain function of the concatenated coordinates, for oracles.
    pub fn f2_fn(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        move |z: &[f64]| {
            let n = z.len() / 2;
            let f = self.eval(&z[..n], &z[n..]).unwrap_or(f64::NAN);
            f * f
        }
    }

    pub fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.dim() != self.dim {
            return Err(GeomError::Dimension(format!("point of dimension {} for metric of dimension {}", p.dim(), self.dim)));
        }
        if !self.domain.contains(p.x()) {
            return Err(GeomError::Domain(format!("x = {:?} outside the chart domain of {}", p.x(), self.name)));
        }
        Ok(())
    }

    /// Seeded coordinate jets and the jet of `F` at `p`.
    pub fn jet(&self, p: &ChartPoint, order: usize) -> Result<(Vec<Jet>, Jet)> {
        self.check_point(p)?;
        let z = seed_coordinates(p, order)?;
        let n = self.dim;
        let f = self.eval(&z[..n], &z[n..])?;
        Ok((z, f))
    }
}

/// Outcome of [`validate_metric`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    /// `max |F(x,λy) − λF(x,y)| / (λF)` over `λ ∈ {0.5, 2, 7.3}`.
    pub max_homogeneity_residual: f64,
    pub min_f: f64,
    pub min_eigenvalue: f64,
    pub not_positive_definite: usize,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random chart point with `x` in the sampling box and `y` a uniform direction.
pub(crate) fn random_point(m: &FinslerMetric, rng: &mut ChaCha8Rng) -> ChartPoint {
    use rand_distr::{Distribution, StandardNormal};
    let (lo, hi) = m.safe_box();
    loop {
        let x: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| rng.gen_range(*l..*h)).collect();
        let d: Vec<f64> = (0..m.dim()).map(|_| StandardNormal.sample(rng)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-3 || !m.domain().contains(&x) {
            continue;
        }
        let y = d.iter().map(|v| v / norm).collect();
        return ChartPoint::new(x, y).expect("unit direction");
    }
}

/// Numerically check homogeneity, positivity and strong convexity of `m`.
pub fn validate_metric(m: &FinslerMetric, samples: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ValidationReport {
        samples,
        max_homogeneity_residual: 0.0,
        min_f: f64::INFINITY,
        min_eigenvalue: f64::INFINITY,
        not_positive_definite: 0,
        failures: Vec::new(),
    };
    for _ in 0..samples {
        let p = random_point(m, &mut rng);
        let f = match m.value(&p) {
            Ok(f) => f,
            Err(e) => {
                report.failures.push(format!("F at {:?}: {e}", p.coords()));
                continue;
            }
        };
        report.min_f = report.min_f.min(f);
        for lambda in [0.5, 2.0, 7.3] {
            let scaled: Vec<f64> = p.y().iter().map(|v| v * lambda).collect();
            match m.eval(p.x(), &scaled) {
                Ok(fl) => {
                    let r = (fl - lambda * f).abs() / (lambda * f);
                    report.max_homogeneity_residual = report.max_homogeneity_residual.max(r);
                }
                Err(e) => report.failures.push(format!("F(x, {lambda}y): {e}")),
            }
        }
        match crate::tensors::fundamental_tensor(m, &p) {
            Ok(t) => {
                let eig = nalgebra::SymmetricEigen::new(t.g.clone()).eigenvalues;
                report.min_eigenvalue = report.min_eigenvalue.min(eig.min());
            }
            Err(e @ GeomError::NotPositiveDefinite(_)) => {
                report.not_positive_definite += 1;
                report.min_eigenvalue = report.min_eigenvalue.min(0.0);
                report.failures.push(e.to_string());
            }
            Err(e) => report.failures.push(e.to_string()),
        }
    }
    if report.max_homogeneity_residual > 1e-10 {
        report.failures.push(format!("homogeneity residual {:.3e}", report.max_homogeneity_residual));
    }
    report
}

/// `[metric]` table of a TOML config file.
#[derive(Debug, Clone, Deserialize)]
pub struct MetricConfig {
    pub name: String,
    pub dim: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub domain: DomainConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct DomainConfig {
    pub radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct ConfigFile {
    metric: MetricConfig,
}

impl MetricConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| GeomError::Config(e.to_string()))?;
        Ok(file.metric)
    }

    pub fn build(&self) -> Result<FinslerMetric> {
        let dim = self.dim.unwrap_or(2);
        let mut params = self.params.clone();
        if let Some(r) = self.domain.radius {
            params.insert("radius".into(), r);
        }
        let mut m = FinslerMetric::by_name(&self.name, dim, &params)?;
        if let (Some(r), Domain::Box { .. }) = (self.domain.radius, &m.domain) {
            if !matches!(m.kind, MetricKind::Riemannian(RiemannianBase::HyperbolicHalfSpace)) {
                m.domain = Domain::cube(dim, -r, r);
            }
        }
        Ok(m)
    }
}
