use fracq::frac1d::{rl_integral_left, Func, Power1D};
use fracq::geometry::{volume_integral, QuadratureSpec, Rect4};
use fracq::quat::{theta_embed, theta_unembed};
use fracq::verify::ResidualReport;
use fracq::{BiQuat, CPoint2, Cx, FracOrder, Interval, Quaternion, StructuralSet};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    -1.0f64..1.0
}

fn biquat() -> impl Strategy<Value = BiQuat> {
    prop::array::uniform8(unit()).prop_map(|c| {
        BiQuat::from_coeffs([
            Cx::new(c[0], c[1]),
            Cx::new(c[2], c[3]),
            Cx::new(c[4], c[5]),
            Cx::new(c[6], c[7]),
        ])
    })
}

proptest! {
    #[test]
    fn product_is_associative(p in biquat(), q in biquat(), r in biquat()) {
        let scale = p.norm() * q.norm() * r.norm() + 1e-300;
        prop_assert!(((p * q) * r - p * (q * r)).norm() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn conjugation_reverses_products(p in biquat(), q in biquat()) {
        prop_assert!(((p * q).conj() - q.conj() * p.conj()).norm() <= 1e-13 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn embedding_round_trips(x in prop::array::uniform4(unit()), theta in 0.0f64..6.3) {
        let s = StructuralSet::new(theta);
        let back = theta_unembed(theta_embed(CPoint2::from_coords(x), &s), &s).coords();
        for k in 0..4 {
            prop_assert!((back[k] - x[k]).abs() <= 1e-14);
        }
    }

    #[test]
    fn embedding_agrees_with_structural_set(x in prop::array::uniform4(unit()), theta in 0.0f64..6.3) {
        let s = StructuralSet::new(theta);
        let d: Quaternion = theta_embed(CPoint2::from_coords(x), &s) - s.combine(x);
        prop_assert!(d.norm() <= 1e-14);
    }

    #[test]
    fn report_matches_its_formula(l in biquat(), r in biquat()) {
        let rep = ResidualReport::new("p", l, r, QuadratureSpec::default());
        prop_assert!(rep.is_consistent());
        prop_assert!(rep.rel_residual >= 0.0 && rep.rel_residual <= 2.0 + 1e-12);
    }

    #[test]
    fn order_gate(re in -2.0f64..3.0, im in -1.0f64..1.0) {
        let ok = FracOrder::new(Cx::new(re, im)).is_ok();
        prop_assert_eq!(ok, (1e-6..=1.0 - 1e-6).contains(&re));
    }

    #[test]
    fn rl_integral_is_linear(c in unit(), re in 0.1f64..0.9, im in -0.3f64..0.3, x in 0.2f64..1.0) {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let alpha = FracOrder::new(Cx::new(re, im)).unwrap();
        let f = Power1D::new(0.0, Cx::new(1.5, 0.0));
        let g = Func::scalar(|t| Cx::new(t.cos(), 0.0)).with_scalar_deriv(|t| Cx::new(-t.sin(), 0.0));
        let sum = Func::scalar(move |t| Cx::new(c * t.powf(1.5) + t.cos(), 0.0));
        let lhs = rl_integral_left(&sum, iv, alpha, x).unwrap();
        let rhs = rl_integral_left(&f, iv, alpha, x).unwrap().scale_re(c) + rl_integral_left(&g, iv, alpha, x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
    }
}

#[test]
fn cubature_is_bitwise_stable_across_pools() {
    let r = Rect4::new([0.0, -0.5, 0.2, 0.0], [1.0, 0.5, 1.4, 0.7]).unwrap();
    let f = |x: [f64; 4]| Ok(BiQuat::scalar(Cx::new((x[0] * x[1]).sin() + x[2] * x[3], x[0] - x[3])));
    let spec = QuadratureSpec::uniform(12);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| volume_integral(&f, &r, &spec).unwrap())
    };
    let one = run(1);
    for t in [2, 3, 5] {
        assert_eq!(run(t), one);
    }
}
