use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fracq::field::{ConstField, Poly4};
use fracq::frac1d::{left_deriv_raw, left_integral_raw, Func};
use fracq::fueter::{BasePoint, FracContext, FracOrder4};
use fracq::geometry::{volume_integral, QuadratureSpec, Rect4};
use fracq::kernels::{cauchy_kernel_at, FracKernel, KernelConvention};
use fracq::verify::{bp_fractional, stokes_classical, FracProblem};
use fracq::{BiQuat, Cx, StructuralSet};

fn rl(c: &mut Criterion) {
    let f = Func::scalar(|t| Cx::new(t.exp(), 0.0)).with_scalar_deriv(|t| Cx::new(t.exp(), 0.0));
    let a = Cx::new(0.3, 0.2);
    c.bench_function("rl_integral_32", |b| b.iter(|| left_integral_raw(&f, 0.0, black_box(a), 0.8, 32).unwrap()));
    c.bench_function("rl_derivative_32", |b| b.iter(|| left_deriv_raw(&f, 0.0, black_box(a), 0.8, 32).unwrap()));
}

fn kernels(c: &mut Criterion) {
    let s = StructuralSet::new(0.4);
    let q = [0.3, 0.1, 0.2, 0.4];
    c.bench_function("cauchy_kernel", |b| {
        b.iter(|| cauchy_kernel_at(black_box([0.9, 0.7, 0.6, 0.8]), q, &s, KernelConvention::Reproducing).unwrap())
    });
    let rect = Rect4::unit();
    let base = BasePoint::new([0.7; 4], rect).unwrap();
    let k = FracKernel::new(base, s).with_nodes(24);
    let alpha = FracOrder4::real([0.5; 4]).unwrap();
    c.bench_function("frac_kernel", |b| {
        b.iter(|| k.eval(black_box([0.2, 0.3, 0.25, 0.15]), [0.8, 0.75, 0.7, 0.85], &alpha).unwrap())
    });
    let ctx = FracContext::new(base, s).with_nodes(24);
    let f = Poly4::z_monomial(BiQuat::ONE, [1, 0, 1, 0]);
    c.bench_function("frac_fueter_d", |b| b.iter(|| ctx.frac_fueter_d(&f, black_box([0.8, 0.75, 0.7, 0.85]), &alpha).unwrap()));
}

fn identities(c: &mut Criterion) {
    let mut g = c.benchmark_group("identities");
    g.sample_size(10);
    let rect = Rect4::unit();
    let s = StructuralSet::new(0.4);
    let f = Poly4::monomial(BiQuat::ONE, [2, 1, 0, 0]);
    let one = ConstField(BiQuat::ONE);
    g.bench_function("volume_integral_16", |b| {
        b.iter(|| volume_integral(&|x: [f64; 4]| Ok(BiQuat::scalar(Cx::new(x[0] * x[1], 0.0))), &rect, &QuadratureSpec::uniform(16)).unwrap())
    });
    g.bench_function("stokes_classical_12", |b| {
        b.iter(|| stokes_classical(&f, &one, &rect, &s, &QuadratureSpec::uniform(12)).unwrap())
    });
    let p = FracProblem {
        base: BasePoint::new([0.7; 4], rect).unwrap(),
        alpha: FracOrder4::real([0.5; 4]).unwrap(),
        beta: FracOrder4::real([0.4; 4]).unwrap(),
        s,
        spec: QuadratureSpec::uniform(6).with_frac_nodes(16).with_delta(2.0 / 6.0),
        conv: KernelConvention::Reproducing,
    };
    let lin = Poly4::monomial(BiQuat::ONE, [1, 0, 0, 0]);
    g.bench_function("bp_fractional_6", |b| b.iter(|| bp_fractional(&lin, &one, [0.8, 0.75, 0.7, 0.8], &p).unwrap()));
    g.finish();
}

criterion_group!(benches, rl, kernels, identities);
criterion_main!(benches);
