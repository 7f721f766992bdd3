//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use finslerlab_core::chern_simons::{conformal_eta, surface_identity_from};
use finslerlab_core::connections::{
    cartan_endomorphism_lie_from, chern_solve, reeb_row_residual, curvature, dual_check_from, structure_residuals,
    uniqueness_test, bott_vertical_from, curvature_order,
};
use finslerlab_core::fd::fd_oracle;
use finslerlab_core::frame::{hilbert_form_residual, indicatrix_sample, reeb_lie_residual};
use finslerlab_core::oracle::{gauss_curvature_fd, riemannian_frame_connection_fd};
use finslerlab_core::report::ordered_par_map;
use finslerlab_core::sasaki::{adiabatic_from, bott_horizontal_from, conformal_h_check};
use finslerlab_core::tensors::cartan_from as cartan_tensor_from;
use finslerlab_core::{ChartPoint, FinslerMetric, LocalGeometry, Result, SigmaSpec};

const SAMPLES: usize = 64;
const EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn metric(name: &str, dim: usize) -> FinslerMetric {
    FinslerMetric::by_name(name, dim, &BTreeMap::new()).expect("registry metric")
}

const GRID: [&str; 6] = ["euclidean", "round-sphere", "hyperbolic-half-plane", "randers", "funk", "perturbed-quartic"];

fn grid() -> Vec<FinslerMetric> {
    [2, 3].iter().flat_map(|&n| GRID.iter().map(move |name| metric(name, n))).collect()
}

fn points(m: &FinslerMetric, count: usize, seed: u64) -> Vec<ChartPoint> {
    indicatrix_sample(m, count, seed).expect("indicatrix sample")
}

/// Running maximum of named residuals; errors count as failures.
#[derive(Default)]
struct Tally {
    parts: Vec<(String, f64, f64)>,
    errors: Vec<String>,
}

impl Tally {
    fn add(&mut self, label: impl Into<String>, value: f64, tol: f64) {
        let label = label.into();
        if let Some(e) = self.parts.iter_mut().find(|e| e.0 == label) {
            e.1 = e.1.max(if value.is_nan() { f64::INFINITY } else { value });
        } else {
            self.parts.push((label, if value.is_nan() { f64::INFINITY } else { value }, tol));
        }
    }

    fn take<T>(&mut self, label: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{label}: {e}"));
                None
            }
        }
    }

    fn pass(&self) -> bool {
        self.errors.is_empty() && self.parts.iter().all(|(_, v, t)| v < t)
    }

    fn detail(&self) -> String {
        let mut s: Vec<String> = self
            .parts
            .iter()
            .map(|(l, v, t)| format!("{l} {v:.2e}{}{t:.0e}", if v < t { "<" } else { "≥" }))
            .collect();
        s.extend(self.errors.iter().take(3).cloned());
        s.join("; ")
    }
}

fn for_points<F>(m: &FinslerMetric, count: usize, seed: u64, tally: &mut Tally, f: F)
where
    F: Fn(&LocalGeometry, &mut Tally) + Sync + Send,
{
    let name = format!("{}/n={}", m.name(), m.dim());
    let partial = ordered_par_map(&points(m, count, seed), |p| {
        let mut t = Tally::default();
        if let Some(geo) = t.take(&name, LocalGeometry::at(m, p)) {
            f(&geo, &mut t);
        }
        t
    });
    for t in partial {
        for (l, v, tol) in t.parts {
            tally.add(l, v, tol);
        }
        tally.errors.extend(t.errors);
    }
}

fn criterion1() -> Tally {
    let mut t = Tally::default();
    let start = Instant::now();
    for m in grid() {
        for_points(&m, SAMPLES, 1, &mut t, |geo, t| {
            let r = hilbert_form_residual(geo);
            if let Some(r) = t.take("dωⁿ", r) {
                t.add("‖dωⁿ − Σω^α∧ω^{n+α}‖", r, 1e-8);
            }
        });
    }
    t.add("runtime s", start.elapsed().as_secs_f64(), 30.0);
    t
}

fn criterion2() -> Tally {
    let mut t = Tally::default();
    for m in grid() {
        for_points(&m, SAMPLES, 2, &mut t, |geo, t| {
            if let Some(r) = t.take("L_G g", reeb_lie_residual(geo)) {
                t.add("L_G g residual", r, 1e-8);
            }
        });
    }
    t
}

fn criterion3() -> Tally {
    let mut t = Tally::default();
    for m in grid() {
        for_points(&m, SAMPLES, 3, &mut t, |geo, t| {
            let Some(sol) = t.take("solve", chern_solve(geo)) else { return };
            if let Some(s) = t.take("structure", structure_residuals(geo, &sol)) {
                t.add("first structure equation", s.first, 1e-7);
                t.add("second structure equation", s.second, 1e-9);
            }
            t.add("Reeb row", reeb_row_residual(&sol.connection), 1e-8);
            if let Some(u) = t.take("uniqueness", uniqueness_test(geo, &sol, 8, 3)) {
                t.add("uniqueness nonlinearity", u.max_nonlinearity, 1e-6);
                t.add("uniqueness 1/ratio", 1.0 / u.min_ratio, 1e3);
            }
        });
    }
    t
}

fn criterion4() -> Tally {
    let mut t = Tally::default();
    for m in grid() {
        for_points(&m, SAMPLES, 4, &mut t, |geo, t| {
            let Some(sol) = t.take("solve", chern_solve(geo)) else { return };
            let Some(lie) = t.take("Lie H", cartan_endomorphism_lie_from(geo)) else { return };
            t.add("H tensor vs Lie", sol.h.max_diff(&lie), 1e-7);
            t.add("H symmetry", lie.symmetry_residual().max(sol.h.symmetry_residual()), 1e-10);
            t.add("H n-index", lie.reeb_residual().max(sol.h.reeb_residual()), 1e-10);
            if let Some(d) = t.take("defect", dual_check_from(&sol.connection, &lie)) {
                t.add("compatibility defect vs 2H", d.max(), 1e-7);
            }
        });
    }
    t
}

fn criterion5() -> Tally {
    let mut t = Tally::default();
    for m in grid() {
        for_points(&m, SAMPLES, 5, &mut t, |geo, t| {
            let Some(sol) = t.take("solve", chern_solve(geo)) else { return };
            if let Some(v) = t.take("bott vertical", bott_vertical_from(geo, &sol.connection)) {
                t.add("Bott vertical", v, 1e-7);
            }
            if let Some(h) = t.take("bott horizontal", bott_horizontal_from(geo, &sol)) {
                t.add("Bott horizontal", h, 1e-6);
            }
        });
    }
    t
}

fn criterion6() -> Tally {
    let mut t = Tally::default();
    let start = Instant::now();
    for name in ["funk", "randers-sphere"] {
        for_points(&metric(name, 2), SAMPLES, 6, &mut t, |geo, t| {
            let Some(sol) = t.take("solve", chern_solve(geo)) else { return };
            let Some(d) = t.take("sweep", adiabatic_from(geo, &sol, &EPS)) else { return };
            let decreasing = d.windows(2).all(|w| w[1].1 < w[0].1);
            t.add("non-decreasing Finsler sweeps", if decreasing { 0.0 } else { 1.0 }, 0.5);
            t.add("Finsler final/initial", d[3].1 / d[0].1, 0.05);
        });
    }
    for name in ["round-sphere", "hyperbolic-half-plane"] {
        for_points(&metric(name, 2), SAMPLES, 6, &mut t, |geo, t| {
            let Some(sol) = t.take("solve", chern_solve(geo)) else { return };
            if let Some(d) = t.take("sweep", adiabatic_from(geo, &sol, &EPS)) {
                t.add("Riemannian deviation", d.iter().map(|v| v.1).fold(0.0, f64::max), 1e-9);
            }
        });
    }
    t.add("runtime s", start.elapsed().as_secs_f64(), 120.0);
    t
}

fn criterion7() -> Tally {
    let mut t = Tally::default();
    let sigmas = [SigmaSpec::linear(0, 0.3), SigmaSpec::parse("c11=0.1,c2=0.2").unwrap()];
    for name in ["funk", "randers", "randers-sphere"] {
        let m = metric(name, 2);
        for sigma in &sigmas {
            let per = ordered_par_map(&points(&m, SAMPLES, 7), |p| conformal_h_check(&m, p, sigma));
            for r in per {
                if let Some(v) = t.take(name, r) {
                    t.add("‖H̄ − H‖", v, 1e-8);
                }
            }
        }
    }
    t
}

fn criterion8() -> Tally {
    let mut t = Tally::default();
    let cases = [
        ("funk", true),
        ("randers-sphere", true),
        ("round-sphere", false),
        ("hyperbolic-half-plane", false),
        ("perturbed-quartic", false),
    ];
    for (name, curved) in cases {
        let m = metric(name, 2);
        let per = ordered_par_map(&points(&m, SAMPLES, 8), |p| {
            LocalGeometry::new(&m, p, curvature_order(4)).and_then(|g| surface_identity_from(&g))
        });
        for r in per {
            let Some(th) = t.take(name, r) else { continue };
            if curved {
                t.add("relative |LHS − RHS|", th.relative_gap(), 1e-6);
            } else {
                t.add("degenerate max(|LHS|, |RHS|)", th.lhs.abs().max(th.rhs.abs()), 1e-9);
            }
            t.add("quadrature vs closed form", th.closed_form_gap, 1e-10);
        }
    }
    t
}

fn criterion9() -> Tally {
    let mut t = Tally::default();
    let sigmas = [
        SigmaSpec::linear(0, 0.3),
        SigmaSpec::parse("c11=0.1,c2=0.2").unwrap(),
        SigmaSpec::parse("c0=0.1,c1=-0.2,c12=0.15").unwrap(),
    ];
    for name in GRID {
        let m = metric(name, 2);
        let riemannian = m.is_riemannian();
        for sigma in &sigmas {
            let per = ordered_par_map(&points(&m, 16, 9), |p| conformal_eta(&m, p, sigma));
            for r in per {
                let Some(c) = t.take(name, r) else { continue };
                t.add("η̄ direct vs formula", c.residual, 1e-6);
                if riemannian {
                    t.add("Riemannian η̄", c.direct.iter().map(|v| v.abs()).fold(0.0, f64::max), 1e-10);
                }
            }
        }
        let constant = SigmaSpec::zero().with_constant(0.4);
        let per = ordered_par_map(&points(&m, 16, 9), |p| conformal_eta(&m, p, &constant));
        for r in per {
            let Some(c) = t.take(name, r) else { continue };
            let gap = c.direct.iter().zip(&c.eta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            t.add("constant σ: η̄ − η", gap, 1e-10);
        }
    }
    t
}

fn criterion10() -> Tally {
    let mut t = Tally::default();
    for name in ["round-sphere", "hyperbolic-half-plane"] {
        let m = metric(name, 2);
        for_points(&m, SAMPLES, 10, &mut t, |geo, t| {
            let n = geo.dim();
            if let Some(a) = t.take("A", cartan_tensor_from(geo)) {
                t.add("A", a.max_abs(), 1e-12);
            }
            let Some(sol) = t.take("solve", chern_solve(geo)) else { return };
            t.add("H", sol.h.max_abs(), 1e-9);
            let eta = (0..n - 1).map(|g| (0..n).map(|i| sol.h.get(i, i, g)).sum::<f64>().abs()).fold(0.0, f64::max);
            t.add("η", eta, 1e-9);
            if let Some(oracle) = t.take("oracle", riemannian_frame_connection_fd(geo.metric(), geo.point())) {
                let mut worst: f64 = 0.0;
                for (a, table) in oracle.iter().enumerate() {
                    for i in 0..n {
                        for j in 0..n {
                            worst = worst.max((sol.connection.entry(i, j, a) - table[i][j]).abs());
                        }
                    }
                }
                t.add("Chern vs Christoffel oracle", worst, 1e-7);
            }
        });
    }
    let m = metric("round-sphere", 2);
    for r in ordered_par_map(&points(&m, 16, 10), |p| curvature(&m, p, 4).map(|k| (k.r(0, 1, 0, 1), gauss_curvature_fd(&m, p.x())))) {
        if let Some((r, k)) = t.take("curvature", r) {
            t.add("R¹₂₁₂ vs Gauss curvature", (r - k).abs(), 1e-6);
        }
    }
    t
}

fn multi_indices(vars: usize, max: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; vars]];
    let mut frontier = out.clone();
    for _ in 0..max {
        let mut next = Vec::new();
        for a in &frontier {
            let last = a.iter().rposition(|&c| c > 0).unwrap_or(0);
            for v in last..vars {
                let mut b = a.clone();
                b[v] += 1;
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn criterion11() -> Tally {
    let mut t = Tally::default();
    for m in grid() {
        let n = m.dim();
        let alphas = multi_indices(2 * n, 4);
        let f2 = m.f2_fn();
        let per = ordered_par_map(&points(&m, 32, 11), |p| -> Result<f64> {
            let geo = LocalGeometry::new(&m, p, 4)?;
            let mut worst: f64 = 0.0;
            for alpha in &alphas {
                let jet = geo.f2().partial(alpha)?;
                let fd = fd_oracle(&f2, p, alpha);
                worst = worst.max((jet - fd).abs() / fd.abs().max(1.0));
            }
            Ok(worst)
        });
        for r in per {
            if let Some(v) = t.take(m.name(), r) {
                t.add("jet vs finite differences (relative)", v, 1e-5);
            }
        }
    }
    t
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Tally); 11] = [
        ("Hilbert form derivative", criterion1),
        ("Reeb Lie derivative of g", criterion2),
        ("Chern connection structure equations", criterion3),
        ("Cartan endomorphism routes and compatibility", criterion4),
        ("Bott connection checks", criterion5),
        ("adiabatic limit", criterion6),
        ("conformal invariance of H", criterion7),
        ("surface transgression identity", criterion8),
        ("conformal change of the Cartan form", criterion9),
        ("Riemannian degeneration", criterion10),
        ("jet engine vs finite differences", criterion11),
    ];
    let mut failed = 0;
    for (k, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let t = run();
        let ok = t.pass();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {label} ({:.1}s): {}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            t.detail()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
