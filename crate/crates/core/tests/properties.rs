use dirac_harmonic::constructor::build_pair;
use dirac_harmonic::expr::Expr;
use dirac_harmonic::geometry::{Chart, ChartedSphere, MetricSpec};
use dirac_harmonic::map::{Orientation, SphereMap};
use dirac_harmonic::operators::dirac_apply;
use dirac_harmonic::rational::RationalFunction;
use dirac_harmonic::spinor::{Frame, TwistedSpinorField};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

fn point() -> impl Strategy<Value = C> {
    (0.05f64..0.95, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r, t))
}

fn close(a: C, b: C, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_product_rule(p in proptest::collection::vec(complex(2.0), 1..4), q in proptest::collection::vec(complex(2.0), 1..4), z in point()) {
        let f = Expr::rational(RationalFunction::polynomial(p)) * Expr::var().conj() + Expr::abs_sq_var();
        let g = Expr::rational(RationalFunction::polynomial(q)).conj() + Expr::real(3.0);
        let prod = (f.clone() * g.clone()).jet(z).unwrap();
        let direct = f.jet(z).unwrap() * g.jet(z).unwrap();
        prop_assert!(close(prod.value, direct.value, 1e-13));
        prop_assert!(close(prod.d_z, direct.d_z, 1e-13));
        prop_assert!(close(prod.d_zzbar, direct.d_zzbar, 1e-13));
    }

    #[test]
    fn metric_transition(c in 0.2f64..5.0, z in point()) {
        let m = ChartedSphere::from_spec(&MetricSpec::Round { c }).unwrap();
        let a = m.lambda(Chart::North, z).unwrap() * z.norm_sqr().powi(2);
        let b = m.lambda(Chart::South, z.inv()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b);
    }

    #[test]
    fn slot_norms_chart_invariant(d in 1i32..4, u1 in complex(1.0), u2 in complex(1.0), t in 0.0..std::f64::consts::TAU, r in 0.5f64..2.0) {
        let m = ChartedSphere::round();
        let map = SphereMap::rational(RationalFunction::monomial(C::new(1.0, 0.0), d), Orientation::Holomorphic);
        let f1 = RationalFunction::monomial(u1, 0);
        let f2 = RationalFunction::monomial(u2, 0);
        let pair = build_pair(&m, &m, &map, &f1, &f2).unwrap();
        let z = C::from_polar(r, t);
        let a = pair.field.slot_norms(&m, Chart::North, z).unwrap();
        let b = pair.field.slot_norms(&m, Chart::South, z.inv()).unwrap();
        for k in 0..4 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-9 * (1.0 + a[k]), "{:?} {:?}", a, b);
        }
    }

    #[test]
    fn dirac_is_complex_linear(alpha in complex(3.0), z in point(), south in any::<bool>()) {
        let m = ChartedSphere::round();
        let map = SphereMap::general(Expr::var() + Expr::var().conj() * C::new(0.1, 0.2));
        let nn = Frame::new(Chart::North, Chart::North);
        let f = TwistedSpinorField::new(map.clone(), nn, [
            Expr::var(), Expr::abs_sq_var(), Expr::var().conj(), Expr::real(1.0),
        ]);
        let g = TwistedSpinorField::new(map, nn, [
            Expr::real(0.5), Expr::var() * Expr::var(), Expr::zero(), Expr::var().conj() * C::new(0.0, 1.0),
        ]);
        let chart = if south { Chart::South } else { Chart::North };
        let a = dirac_apply(&m, &m, &f, z, chart).unwrap();
        let b = dirac_apply(&m, &m, &g, z, chart).unwrap();
        let ab = dirac_apply(&m, &m, &f.scale(alpha).add(&g), z, chart).unwrap();
        for k in 0..4 {
            prop_assert!(close(ab.values[k], alpha * a.values[k] + b.values[k], 1e-12));
        }
    }
}
