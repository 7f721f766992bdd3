use std::collections::BTreeMap;

use finslerlab_core::frame::indicatrix_sample;
use finslerlab_core::metric::{registry_list, MetricConfig};
use finslerlab_core::report::{adiabatic_sweep, run_suite, RunConfig, Suite};
use finslerlab_core::sasaki::adiabatic_deviation;
use finslerlab_core::{FinslerMetric, GeomError};

fn registry(dim: usize) -> Vec<FinslerMetric> {
    registry_list()
        .iter()
        .filter(|d| d.name != "broken-degenerate")
        .map(|d| FinslerMetric::by_name(d.name, dim, &BTreeMap::new()).unwrap())
        .collect()
}

#[test]
fn every_surface_passes_every_suite() {
    for m in registry(2) {
        let r = run_suite(&m, &RunConfig { samples: 8, seed: 3, ..RunConfig::default() }).unwrap();
        let failed: Vec<_> = r.failed().collect();
        assert!(r.pass, "{}: {failed:?}", m.name());
    }
}

#[test]
fn three_dimensional_suites_pass() {
    for m in registry(3) {
        for suite in [Suite::Frames, Suite::Connections, Suite::ChernSimons, Suite::Conformal] {
            let r = run_suite(&m, &RunConfig { suite, samples: 4, seed: 5, ..RunConfig::default() }).unwrap();
            assert!(r.pass, "{} {:?}: {:?}", m.name(), suite, r.failed().collect::<Vec<_>>());
            assert!(r.checks.iter().all(|c| c.id != "surface-identity"));
        }
    }
}

#[test]
fn suites_are_independent_of_jet_order() {
    let m = FinslerMetric::funk(2, 1.0).unwrap();
    for jet_order in 4..=6 {
        let r = run_suite(&m, &RunConfig { suite: Suite::Connections, samples: 3, jet_order, ..RunConfig::default() }).unwrap();
        assert!(r.pass, "order {jet_order}: {:?}", r.failed().collect::<Vec<_>>());
    }
}

#[test]
fn adiabatic_deviation_reference_values() {
    // ½ε² times the bracket curvature of the horizontal distribution
    let eps = [0.2, 0.1];
    for (name, at_02) in [("funk", 0.005), ("round-sphere", 0.02), ("hyperbolic-half-plane", 0.02)] {
        let m = FinslerMetric::by_name(name, 2, &BTreeMap::new()).unwrap();
        for p in indicatrix_sample(&m, 4, 9).unwrap() {
            let d = adiabatic_deviation(&m, &p, &eps).unwrap();
            assert!((d[0].1 - at_02).abs() < 1e-12, "{name}: {}", d[0].1);
            assert!((d[1].1 - at_02 / 4.0).abs() < 1e-12, "{name}: {}", d[1].1);
        }
    }
    let flat = FinslerMetric::by_name("randers", 2, &BTreeMap::new()).unwrap();
    let (rows, slope) = adiabatic_sweep(&flat, 4, 1, &[0.2, 0.1, 0.05], 4).unwrap();
    assert!(rows.iter().all(|r| r.deviation < 1e-14));
    assert!(slope.is_none() || slope.unwrap().is_finite());
}

#[test]
fn randers_sphere_sweep_has_quadratic_slope() {
    let m = FinslerMetric::by_name("randers-sphere", 2, &BTreeMap::new()).unwrap();
    let (rows, slope) = adiabatic_sweep(&m, 6, 2, &[0.2, 0.1, 0.05, 0.025], 4).unwrap();
    assert_eq!(rows.len(), 24);
    assert!((slope.unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn toml_config_builds_metric() {
    let cfg = MetricConfig::from_toml("[metric]\nname = \"randers-sphere\"\ndim = 2\nparams.b1 = 0.1\nparams.b2 = 0.2\n").unwrap();
    let m = cfg.build().unwrap();
    assert_eq!(m.params()["b2"], 0.2);
    let r = run_suite(&m, &RunConfig { suite: Suite::Basics, samples: 4, ..RunConfig::default() }).unwrap();
    assert!(r.pass);
}

#[test]
fn sampling_rejects_degenerate_metric_cleanly() {
    let m = FinslerMetric::broken_degenerate(2).unwrap();
    let r = run_suite(&m, &RunConfig { suite: Suite::Connections, samples: 2, ..RunConfig::default() }).unwrap();
    assert!(!r.pass);
    assert!(r.checks.iter().all(|c| !c.pass));
    assert!(matches!(
        run_suite(&m, &RunConfig { samples: 0, ..RunConfig::default() }),
        Err(GeomError::Config(_))
    ));
}
