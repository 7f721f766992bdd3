use std::sync::Arc;

use finslerlab_core::jet::{JetTables, MAX_ORDER};
use finslerlab_core::Jet;
use proptest::prelude::*;

const VARS: usize = 3;

/// Polynomial `Σ c_k Π z_v^{e_kv}` expanded at `base`.
fn poly(t: &Arc<JetTables>, base: &[f64], terms: &[(f64, [u8; VARS])]) -> Jet {
    let z: Vec<Jet> = (0..VARS).map(|v| Jet::variable(t, v, base[v])).collect();
    let mut acc = Jet::constant(t, 0.0);
    for (c, e) in terms {
        let mut m = Jet::constant(t, *c);
        for v in 0..VARS {
            for _ in 0..e[v] {
                m = &m * &z[v];
            }
        }
        acc = &acc + &m;
    }
    acc
}

fn close(a: &Jet, b: &Jet) -> bool {
    let scale = a.coeffs().iter().chain(b.coeffs()).fold(1.0f64, |s, c| s.max(c.abs()));
    a.max_abs_diff(b) <= 1e-12 * scale
}

fn terms() -> impl Strategy<Value = Vec<(f64, [u8; VARS])>> {
    prop::collection::vec((-2.0..2.0f64, prop::array::uniform3(0u8..3)), 1..6)
}

fn base() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, VARS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_commutes_and_associates(b in base(), p in terms(), q in terms(), r in terms(), order in 1usize..=MAX_ORDER) {
        let t = JetTables::get(VARS, order).unwrap();
        let (p, q, r) = (poly(&t, &b, &p), poly(&t, &b, &q), poly(&t, &b, &r));
        prop_assert!(close(&(&p * &q), &(&q * &p)));
        prop_assert!(close(&(&(&p * &q) * &r), &(&p * &(&q * &r))));
        prop_assert!(close(&(&p * &(&q + &r)), &(&(&p * &q) + &(&p * &r))));
    }

    #[test]
    fn product_rule_on_first_derivatives(b in base(), p in terms(), q in terms(), var in 0usize..VARS) {
        let t = JetTables::get(VARS, 4).unwrap();
        let (p, q) = (poly(&t, &b, &p), poly(&t, &b, &q));
        let lhs = (&p * &q).derivative(var).unwrap();
        let rhs = &(&p.derivative(var).unwrap() * &q) + &(&p * &q.derivative(var).unwrap());
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn reciprocal_and_log_invert(b in base(), p in terms()) {
        let t = JetTables::get(VARS, 4).unwrap();
        let p = poly(&t, &b, &p);
        let shifted = p.add_scalar(p.value().abs() + 1.0);
        let one = Jet::constant(&t, 1.0);
        prop_assert!(close(&(&shifted * &shifted.recip().unwrap()), &one));
        prop_assert!(close(&shifted.ln().unwrap().exp(), &shifted));
        let sq = shifted.sqrt().unwrap();
        prop_assert!(close(&(&sq * &sq), &shifted));
    }
}
