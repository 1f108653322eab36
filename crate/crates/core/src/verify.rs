//! Both sides of the integral and pointwise identities, their residuals, and
//! refinement studies.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::{Component, ComponentField, Field, FieldFn};
use crate::frac1d::{left_deriv_raw, left_integral_raw, FracOrder, Func1D, Interval, LeftIntegral, Reflected};
use crate::fueter::classical::{dbar, dz, fueter_d_exact, laplacian_r4, laplacian_z1, laplacian_z2, FueterKind};
use crate::fueter::{classical, AxisOperatorField, BasePoint, FracContext, FracOrder4, LastTermVariant};
use crate::gamma::rgamma;
use crate::geometry::{boundary_integral, boundary_sum, sigma_theta, volume_integral, Face3, Point4, QuadratureSpec, Rect4};
use crate::kernels::{cauchy_kernel_at, singular_volume_integral, FracKernel, KernelConvention};
use crate::quadrature::rpow;
use crate::quat::{BiQuat, Bicomplex, Cx, Quaternion, StructuralSet};

/// Relative residuals are taken against `max(|lhs|, |rhs|, REL_FLOOR)`.
pub const REL_FLOOR: f64 = 1e-30;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub identity_id: String,
    pub lhs: BiQuat,
    pub rhs: BiQuat,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub grid: QuadratureSpec,
    /// Wall time in seconds.
    pub elapsed: f64,
    pub order_estimate: Option<f64>,
    pub notes: String,
}

impl ResidualReport {
    pub fn new(identity_id: impl Into<String>, lhs: BiQuat, rhs: BiQuat, grid: QuadratureSpec) -> Self {
        let abs_residual = (lhs - rhs).norm();
        let rel_residual = abs_residual / lhs.norm().max(rhs.norm()).max(REL_FLOOR);
        ResidualReport {
            identity_id: identity_id.into(),
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            grid,
            elapsed: 0.0,
            order_estimate: None,
            notes: String::new(),
        }
    }

    pub fn note(mut self, s: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(s.as_ref());
        self
    }

    pub fn is_consistent(&self) -> bool {
        let abs = (self.lhs - self.rhs).norm();
        let rel = abs / self.lhs.norm().max(self.rhs.norm()).max(REL_FLOOR);
        abs == self.abs_residual && rel == self.rel_residual
    }
}

fn coeff_pairs(v: &BiQuat) -> [[f64; 2]; 4] {
    v.coeffs().map(|c| [c.re, c.im])
}

impl Serialize for ResidualReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("ResidualReport", 9)?;
        st.serialize_field("identity_id", &self.identity_id)?;
        st.serialize_field("lhs", &coeff_pairs(&self.lhs))?;
        st.serialize_field("rhs", &coeff_pairs(&self.rhs))?;
        st.serialize_field("abs_residual", &self.abs_residual)?;
        st.serialize_field("rel_residual", &self.rel_residual)?;
        st.serialize_field("grid", &self.grid)?;
        st.serialize_field("elapsed", &self.elapsed)?;
        st.serialize_field("order_estimate", &self.order_estimate)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

/// Runs `f` and stores its wall time in the report.
pub fn timed(f: impl FnOnce() -> Result<ResidualReport>) -> Result<ResidualReport> {
    let t = Instant::now();
    let mut r = f()?;
    r.elapsed = t.elapsed().as_secs_f64();
    Ok(r)
}

fn bq(q: Quaternion) -> BiQuat {
    BiQuat::real(q)
}

fn ci(z: Cx) -> BiQuat {
    bq(Quaternion::from_ci(z))
}

/// Counts nodes refused by the kernel exclusion rule.
#[derive(Default)]
struct ClipCounter {
    clipped: AtomicUsize,
    total: AtomicUsize,
}

impl ClipCounter {
    fn take(&self, r: Result<BiQuat>) -> Result<BiQuat> {
        self.total.fetch_add(1, Ordering::Relaxed);
        match r {
            Ok(v) => Ok(v),
            Err(e) if matches!(e.root(), Error::SingularSegment { .. }) => {
                self.clipped.fetch_add(1, Ordering::Relaxed);
                Ok(BiQuat::ZERO)
            }
            Err(e) => Err(e),
        }
    }

    fn summary(&self) -> String {
        format!(
            "clipped kernel evaluations {} of {}",
            self.clipped.load(Ordering::Relaxed),
            self.total.load(Ordering::Relaxed)
        )
    }
}

// ---------------------------------------------------------------------------
// One-dimensional identities

/// `D^alpha I^alpha f = f` on the left and on the right at x.
pub fn fund_theorem_1d<F: Func1D>(
    f: &F,
    iv: Interval,
    alpha: FracOrder,
    x: f64,
    nodes: usize,
) -> Result<(ResidualReport, ResidualReport)> {
    let spec = QuadratureSpec::default().with_frac_nodes(nodes);
    let a = alpha.value();
    let fx = f.eval(x)?;
    let left = timed(|| {
        let integ = LeftIntegral { f, a: iv.a, alpha: a, nodes };
        let v = left_deriv_raw(&integ, iv.a, a, x, nodes)?;
        Ok(ResidualReport::new("fund_theorem_1d", v, fx, spec).note("left"))
    })?;
    let right = timed(|| {
        let refl = Reflected::new(f, iv);
        let integ = LeftIntegral { f: &refl, a: iv.a, alpha: a, nodes };
        let xr = iv.a + iv.b - x;
        let v = left_deriv_raw(&integ, iv.a, a, xr, nodes)?;
        Ok(ResidualReport::new("fund_theorem_1d", v, fx, spec).note("right"))
    })?;
    Ok((left, right))
}

/// `D^alpha_{a+} 1 (x) = (x - a)^{-alpha} / Gamma(1 - alpha)`.
pub fn cte_rule(a: f64, alpha: FracOrder, x: f64, nodes: usize) -> Result<ResidualReport> {
    timed(|| {
        let one = crate::frac1d::Const1D(BiQuat::ONE);
        let lhs = left_deriv_raw(&one, a, alpha.value(), x, nodes)?;
        let rhs = BiQuat::scalar(rpow(x - a, -alpha.value()) * rgamma(1.0 - alpha.value()));
        Ok(ResidualReport::new("cte_rule", lhs, rhs, QuadratureSpec::default().with_frac_nodes(nodes)))
    })
}

// ---------------------------------------------------------------------------
// Classical identities

/// `int_{dOmega} g sigma f = int_Omega (g D[f] + D_r[g] f)`.
pub fn stokes_classical(
    f: &dyn Field,
    g: &dyn Field,
    r: &Rect4,
    s: &StructuralSet,
    spec: &QuadratureSpec,
) -> Result<ResidualReport> {
    spec.validate(r)?;
    timed(|| {
        let lhs = boundary_integral(&|x| g.eval(x), &|x| f.eval(x), r, s, spec)?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let df = fueter_d_exact(f, x, s, FueterKind::Left)?;
            let dg = fueter_d_exact(g, x, s, FueterKind::Right)?;
            Ok(g.eval(x)? * df + dg * f.eval(x)?)
        };
        let rhs = volume_integral(&vol, r, spec)?;
        Ok(ResidualReport::new("stokes_classical", lhs, rhs, *spec))
    })
}

/// Which branch of a Borel-Pompeiu identity applies at q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Interior,
    Exterior,
}

fn classical_branch(r: &Rect4, q: Point4, delta: f64) -> Result<Branch> {
    let clearance = delta.max(1e-9 * r.min_edge());
    if r.contains(q) {
        if r.inner_distance(q) <= clearance {
            return Err(Error::InvalidPoint(format!("q = {q:?} is within {clearance} of the boundary")));
        }
        Ok(Branch::Interior)
    } else {
        if r.outer_distance(q) <= clearance {
            return Err(Error::InvalidPoint(format!("q = {q:?} is within {clearance} of the boundary")));
        }
        Ok(Branch::Exterior)
    }
}

/// Boundary terms with the Cauchy kernel minus volume terms, against
/// `f(q) + g(q)` inside and 0 outside.
pub fn bp_classical(
    f: &dyn Field,
    g: &dyn Field,
    r: &Rect4,
    q: Point4,
    s: &StructuralSet,
    spec: &QuadratureSpec,
    conv: KernelConvention,
) -> Result<ResidualReport> {
    spec.validate(r)?;
    let branch = classical_branch(r, q, spec.exclusion_delta)?;
    timed(|| {
        let k = |t: Point4| cauchy_kernel_at(t, q, s, conv).map(bq);
        let bnd = |x: Point4, face: &Face3| -> Result<BiQuat> {
            let nu = bq(sigma_theta(face.outward_normal, s)?);
            let kx = k(x)?;
            Ok(kx * nu * f.eval(x)? + g.eval(x)? * nu * kx)
        };
        let boundary = boundary_sum(&bnd, r, spec)?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let kx = k(x)?;
            let df = fueter_d_exact(f, x, s, FueterKind::Left)?;
            let dg = fueter_d_exact(g, x, s, FueterKind::Right)?;
            Ok(kx * df + dg * kx)
        };
        let (volume, rhs) = match branch {
            Branch::Interior => (
                singular_volume_integral(&vol, r, q, spec.volume_nodes, spec.exclusion_delta)?,
                f.eval(q)? + g.eval(q)?,
            ),
            Branch::Exterior => (volume_integral(&vol, r, spec)?, BiQuat::ZERO),
        };
        Ok(ResidualReport::new("bp_classical", boundary - volume, rhs, *spec).note(format!("{branch:?}").to_lowercase()))
    })
}

// ---------------------------------------------------------------------------
// Fractional identities

/// Common data of the fractional identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracProblem {
    pub base: BasePoint,
    pub alpha: FracOrder4,
    pub beta: FracOrder4,
    pub s: StructuralSet,
    pub spec: QuadratureSpec,
    pub conv: KernelConvention,
}

impl FracProblem {
    pub fn ctx(&self) -> FracContext {
        FracContext::new(self.base, self.s).with_nodes(self.spec.frac_nodes)
    }

    pub fn kernel(&self) -> FracKernel {
        FracKernel::new(self.base, self.s)
            .with_convention(self.conv)
            .with_nodes(self.spec.frac_nodes)
            .with_delta(self.spec.exclusion_delta)
    }

    pub fn rect(&self) -> Rect4 {
        self.base.rect
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate(&self.base.rect)
    }

    /// Interior if q lies in the open box; exterior if q lies above a and at
    /// least two coordinates exceed b, so that no segment from a to q meets
    /// the closed box.
    pub fn branch(&self, q: Point4) -> Result<Branch> {
        let r = self.base.rect;
        if r.contains(q) {
            return Ok(Branch::Interior);
        }
        self.base.check_above(q)?;
        let above = (0..4).filter(|&k| q[k] > r.hi[k]).count();
        if above >= 2 {
            Ok(Branch::Exterior)
        } else {
            Err(Error::InvalidPoint(format!(
                "exterior q = {q:?} needs at least two coordinates above b"
            )))
        }
    }
}

/// `N[f](xi, q, alpha)` split into its RL integrals and coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NCorrection {
    /// `I^{alpha_l}[f o S_l](q_l)`.
    pub integrals: [BiQuat; 4],
    /// `coefficients[l]` lists `1 / (Gamma(alpha_m) e_m^{alpha_m})` for m != l in increasing m.
    pub coefficients: [[Cx; 3]; 4],
}

impl NCorrection {
    pub fn value(&self) -> BiQuat {
        let mut acc = BiQuat::ZERO;
        for l in 0..4 {
            let c: Cx = self.coefficients[l].iter().sum();
            acc += self.integrals[l].scale(c);
        }
        acc
    }
}

pub fn n_correction_parts(
    f: &dyn Field,
    base: &BasePoint,
    q: Point4,
    alpha: &FracOrder4,
    nodes: usize,
) -> Result<NCorrection> {
    base.check_above(q)?;
    let e = base.edges_to(q);
    let a = base.a();
    let inv: [Cx; 4] = std::array::from_fn(|m| rgamma(alpha.get(m)) * rpow(e[m], -alpha.get(m)));
    let mut integrals = [BiQuat::ZERO; 4];
    let mut coefficients = [[Cx::new(0.0, 0.0); 3]; 4];
    for l in 0..4 {
        let line = f.line(base.xi, l);
        integrals[l] = left_integral_raw(&line, a[l], alpha.get(l), q[l], nodes)?;
        for (k, m) in (0..4).filter(|&m| m != l).enumerate() {
            coefficients[l][k] = inv[m];
        }
    }
    Ok(NCorrection { integrals, coefficients })
}

pub fn n_correction(f: &dyn Field, base: &BasePoint, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
    Ok(n_correction_parts(f, base, q, alpha, crate::frac1d::DEFAULT_FRAC_NODES)?.value())
}

/// Right side of the fractional Borel-Pompeiu identities.
fn frac_bp_rhs(f: &dyn Field, g: &dyn Field, p: &FracProblem, q: Point4, branch: Branch) -> Result<BiQuat> {
    if branch == Branch::Exterior {
        return Ok(BiQuat::ZERO);
    }
    let v: Vec<BiQuat> = (0..4)
        .map(|l| {
            let x = p.base.shift(q, l);
            Ok(f.eval(x)? + g.eval(x)?)
        })
        .collect::<Result<_>>()?;
    let n = p.spec.frac_nodes;
    let nf = n_correction_parts(f, &p.base, q, &p.alpha, n)?.value();
    let ng = n_correction_parts(g, &p.base, q, &p.beta, n)?.value();
    Ok(((v[0] + v[1]) + (v[2] + v[3])) + nf + ng)
}

/// Least-squares complex c with `lhs - N[f] - N[g] ~ c (f + g)(xi)`.
fn fitted_coefficient(f: &dyn Field, g: &dyn Field, p: &FracProblem, lhs: BiQuat) -> Result<Cx> {
    let xi = p.base.xi;
    let n = p.spec.frac_nodes;
    let w = lhs
        - n_correction_parts(f, &p.base, xi, &p.alpha, n)?.value()
        - n_correction_parts(g, &p.base, xi, &p.beta, n)?.value();
    let v = f.eval(xi)? + g.eval(xi)?;
    let (vc, wc) = (v.coeffs(), w.coeffs());
    let num: Cx = (0..4).map(|k| vc[k].conj() * wc[k]).sum();
    let den: f64 = (0..4).map(|k| vc[k].norm_sqr()).sum();
    if den == 0.0 {
        return Ok(Cx::new(f64::NAN, 0.0));
    }
    Ok(num / den)
}

/// `int_{dJ} I[g] sigma I[f] = int_J (I[g] D[f] + D_r[g] I[f])`.
pub fn stokes_fractional(f: &dyn Field, g: &dyn Field, p: &FracProblem) -> Result<ResidualReport> {
    p.validate()?;
    let ctx = p.ctx();
    let r = p.rect();
    timed(|| {
        let lhs = boundary_integral(
            &|x| ctx.cal_i_closed(g, x, &p.beta),
            &|x| ctx.cal_i_closed(f, x, &p.alpha),
            &r,
            &p.s,
            &p.spec,
        )?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let ig = ctx.cal_i(g, x, &p.beta)?;
            let df = ctx.frac_fueter_d(f, x, &p.alpha)?;
            let dg = ctx.frac_fueter_d_right(g, x, &p.beta)?;
            let if_ = ctx.cal_i(f, x, &p.alpha)?;
            Ok(ig * df + dg * if_)
        };
        let rhs = volume_integral(&vol, &r, &p.spec)?;
        Ok(ResidualReport::new("stokes_fractional", lhs, rhs, p.spec))
    })
}

fn bp_fractional_impl(f: &dyn Field, g: &dyn Field, q: Point4, p: &FracProblem, id: &str) -> Result<ResidualReport> {
    p.validate()?;
    let branch = p.branch(q)?;
    let ctx = p.ctx();
    let kern = p.kernel();
    let r = p.rect();
    let clips = ClipCounter::default();
    timed(|| {
        let bnd = |x: Point4, face: &Face3| -> Result<BiQuat> {
            let nu = bq(sigma_theta(face.outward_normal, &p.s)?);
            let ka = clips.take(kern.eval(x, q, &p.alpha))?;
            let kb = clips.take(kern.eval(x, q, &p.beta))?;
            Ok(ka * nu * ctx.cal_i_closed(f, x, &p.alpha)? + ctx.cal_i_closed(g, x, &p.beta)? * nu * kb)
        };
        let boundary = boundary_sum(&bnd, &r, &p.spec)?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let ka = clips.take(kern.eval(x, q, &p.alpha))?;
            let kb = clips.take(kern.eval(x, q, &p.beta))?;
            Ok(ka * ctx.frac_fueter_d(f, x, &p.alpha)? + ctx.frac_fueter_d_right(g, x, &p.beta)? * kb)
        };
        let volume = volume_integral(&vol, &r, &p.spec)?;
        let lhs = boundary - volume;
        let rhs = frac_bp_rhs(f, g, p, q, branch)?;
        let mut rep = ResidualReport::new(id, lhs, rhs, p.spec)
            .note(format!("{branch:?}").to_lowercase())
            .note(clips.summary());
        if q == p.base.xi {
            let c = fitted_coefficient(f, g, p, lhs)?;
            rep = rep.note(format!("fitted diagonal coefficient {:.6}{:+.6}I", c.re, c.im));
        }
        Ok(rep)
    })
}

/// Boundary terms with the fractional kernels minus volume terms, against the
/// shifted samples of f + g plus the corrections inside, 0 outside.
pub fn bp_fractional(f: &dyn Field, g: &dyn Field, q: Point4, p: &FracProblem) -> Result<ResidualReport> {
    bp_fractional_impl(f, g, q, p, "bp_fractional")
}

/// The identity at q = xi, where the right side is `4 (f + g)(xi) + N[f] + N[g]`.
pub fn bp_fractional_diag(f: &dyn Field, g: &dyn Field, p: &FracProblem) -> Result<ResidualReport> {
    bp_fractional_impl(f, g, p.base.xi, p, "bp_fractional_diag")
}

/// The diagonal right side computed directly from its closed form.
pub fn bp_fractional_diag_rhs(f: &dyn Field, g: &dyn Field, p: &FracProblem) -> Result<BiQuat> {
    let xi = p.base.xi;
    let n = p.spec.frac_nodes;
    let v = f.eval(xi)? + g.eval(xi)?;
    Ok(v.scale_re(4.0)
        + n_correction_parts(f, &p.base, xi, &p.alpha, n)?.value()
        + n_correction_parts(g, &p.base, xi, &p.beta, n)?.value())
}

/// `(d qbar_[2] ^ dq) = A dS` and `(dq_[1] ^ d qbar) = B dS` on a face with
/// outward normal n: `A = 2 (n0 + i n1)`, `B = -2 (n2 - i n3)`.
pub fn complex_forms(n: Point4) -> (Cx, Cx) {
    (Cx::new(2.0 * n[0], 2.0 * n[1]), Cx::new(-2.0 * n[2], 2.0 * n[3]))
}

/// `i e^{-i theta}` as it appears in the displays.
fn phase_minus(s: &StructuralSet) -> Cx {
    Cx::new(s.theta.sin(), s.theta.cos())
}

fn c_part(f: &dyn Field) -> ComponentField<&dyn Field> {
    ComponentField { f, which: Component::F1 }
}

/// The two Stokes-type identities for C(i)-valued f and g; only the first
/// component of the inputs is used.
pub fn stokes_complex(f: &dyn Field, g: &dyn Field, p: &FracProblem) -> Result<(ResidualReport, ResidualReport)> {
    p.validate()?;
    let (f, g) = (c_part(f), c_part(g));
    let (f, g): (&dyn Field, &dyn Field) = (&f, &g);
    let ctx = p.ctx();
    let r = p.rect();
    let (a, b) = (p.alpha.orders, p.beta.orders);
    let w = ci(p.s.omega());
    let first = timed(|| {
        let bnd = |x: Point4, face: &Face3| -> Result<BiQuat> {
            let (fa, _) = complex_forms(face.outward_normal);
            Ok(ctx.cal_i_closed(g, x, &p.beta)? * ci(fa) * ctx.cal_i_closed(f, x, &p.alpha)?)
        };
        let lhs = boundary_sum(&bnd, &r, &p.spec)?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let t1 = ctx.cal_i(g, x, &p.beta)? * ctx.frac_d_a1(f, x, a[0], a[1])?;
            let t2 = ctx.frac_d_r_a1(g, x, b[0], b[1])? * ctx.cal_i(f, x, &p.alpha)?;
            Ok((t1 + t2).scale_re(2.0))
        };
        let rhs = volume_integral(&vol, &r, &p.spec)?;
        Ok(ResidualReport::new("stokes_complex_1", lhs, rhs, p.spec))
    })?;
    let second = timed(|| {
        let bnd = |x: Point4, face: &Face3| -> Result<BiQuat> {
            let (_, fb) = complex_forms(face.outward_normal);
            Ok(-(ctx.cal_i_closed(g, x, &p.beta)? * w * ci(fb) * ctx.cal_i_closed(f, x, &p.alpha)?.conj()))
        };
        let lhs = boundary_sum(&bnd, &r, &p.spec)?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let t1 = ctx.cal_i(g, x, &p.beta)? * w * ctx.frac_d_a2(f, x, a[2], a[3])?.conj();
            let t2 = ctx.frac_d_r_a2(g, x, b[2], b[3])? * w * ctx.cal_i(f, x, &p.alpha)?.conj();
            Ok((t1 + t2).scale_re(2.0))
        };
        let rhs = volume_integral(&vol, &r, &p.spec)?;
        Ok(ResidualReport::new("stokes_complex_2", lhs, rhs, p.spec))
    })?;
    Ok((first, second))
}

/// The Borel-Pompeiu-type identity for C(i)-valued f and g with the split
/// kernels, assembled term by term as displayed.
pub fn bp_complex(f: &dyn Field, g: &dyn Field, q: Point4, p: &FracProblem) -> Result<ResidualReport> {
    p.validate()?;
    let branch = p.branch(q)?;
    let (f, g) = (c_part(f), c_part(g));
    let (f, g): (&dyn Field, &dyn Field) = (&f, &g);
    let ctx = p.ctx();
    let kern = p.kernel();
    let r = p.rect();
    let (a, b) = (p.alpha.orders, p.beta.orders);
    let w = ci(p.s.omega());
    let pm = ci(phase_minus(&p.s));
    let clips = ClipCounter::default();
    timed(|| {
        let bnd = |x: Point4, face: &Face3| -> Result<BiQuat> {
            let (fa, fb) = complex_forms(face.outward_normal);
            let (fa, fb) = (ci(fa), ci(fb));
            let k01a = clips.take(kern.k01(x, q, a[0], a[1]))?;
            let k23a = clips.take(kern.k23(x, q, a[2], a[3]))?;
            let k01b = clips.take(kern.k01(x, q, b[0], b[1]))?;
            let k23b = clips.take(kern.k23(x, q, b[2], b[3]))?;
            let left = (k01a * fa - k23a * pm * fb.conj()).scale_re(0.5) * ctx.cal_i_closed(f, x, &p.alpha)?;
            let right = ctx.cal_i_closed(g, x, &p.beta)? * (fa * k01b + w * fb * k23b.conj()).scale_re(0.5);
            Ok(left + right)
        };
        let boundary = boundary_sum(&bnd, &r, &p.spec)?;
        let vol = |x: Point4| -> Result<BiQuat> {
            let k01a = clips.take(kern.k01(x, q, a[0], a[1]))?;
            let k23a = clips.take(kern.k23(x, q, a[2], a[3]))?;
            let k01b = clips.take(kern.k01(x, q, b[0], b[1]))?;
            let k23b = clips.take(kern.k23(x, q, b[2], b[3]))?;
            Ok(k01a * ctx.frac_d_a1(f, x, a[0], a[1])? + k23a * pm * ctx.frac_d_a2(f, x, a[2], a[3])?
                + ctx.frac_d_r_a1(g, x, b[0], b[1])? * k01b
                - ctx.frac_d_r_a2(g, x, b[2], b[3])? * w * k23b.conj())
        };
        let volume = volume_integral(&vol, &r, &p.spec)?;
        let rhs = frac_bp_rhs(f, g, p, q, branch)?;
        Ok(ResidualReport::new("bp_complex", boundary - volume, rhs, p.spec)
            .note(format!("{branch:?}").to_lowercase())
            .note(clips.summary()))
    })
}

// ---------------------------------------------------------------------------
// Pointwise operator identities

/// Point and finite-difference step of a pointwise check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCheck {
    pub q: Point4,
    pub h: f64,
}

fn point_spec(p: &FracProblem) -> QuadratureSpec {
    p.spec
}

fn bc(v: Bicomplex) -> BiQuat {
    BiQuat::from(v)
}

/// `Re f_c(S_k q) + i Im f_c(S_l q)` for component c.
fn mixed_sample(f: &dyn Field, base: &BasePoint, q: Point4, comp: Component, k: usize, l: usize) -> Result<Bicomplex> {
    let pick = |v: BiQuat| {
        let (f1, f2) = v.split();
        match comp {
            Component::F1 => f1,
            Component::F2 => f2,
        }
    };
    let re = pick(f.eval(base.shift(q, k))?).re;
    let im = pick(f.eval(base.shift(q, l))?).im;
    Ok(Bicomplex::new(re, im))
}

/// Fact 1: the fractional operator equals the classical one applied to the
/// averaged integral (finite differences in q).
pub fn prop_fact_1(f: &dyn Field, p: &FracProblem, pc: PointCheck) -> Result<ResidualReport> {
    let ctx = p.ctx();
    timed(|| {
        let lhs = ctx.frac_fueter_d(f, pc.q, &p.alpha)?;
        let ci_field = FieldFn(|x: Point4| ctx.cal_i(f, x, &p.alpha));
        let rhs = classical::classical_fueter_d(&ci_field, pc.q, &p.s, pc.h)?;
        Ok(ResidualReport::new("prop_fact_1", lhs, rhs, point_spec(p)).note(format!("h={}", pc.h)))
    })
}

/// Fact 2: the fractional operator applied to the antiderivative gives the
/// mixed samples of f1 and f2.
pub fn prop_fact_2(f: &dyn Field, p: &FracProblem, q: Point4) -> Result<ResidualReport> {
    prop_fact_2_with(f, p, q, BiQuat::real(Quaternion::J))
}

/// Fact 2 with `trailing` in place of the unit that follows the second block
/// of the antiderivative.
pub fn prop_fact_2_with(f: &dyn Field, p: &FracProblem, q: Point4, trailing: BiQuat) -> Result<ResidualReport> {
    let ctx = p.ctx();
    timed(|| {
        p.base.check_above(q)?;
        let inner = ctx.field(f, ctx.j_terms_with(&p.alpha, trailing));
        let lhs = ctx.field(&inner, ctx.fueter_terms(&p.alpha)).eval(q)?;
        let f1 = mixed_sample(f, &p.base, q, Component::F1, 0, 1)?;
        let f2 = mixed_sample(f, &p.base, q, Component::F2, 2, 3)?;
        let rhs = bc(f1) + bc(f2) * BiQuat::real(Quaternion::J);
        Ok(ResidualReport::new("prop_fact_2", lhs, rhs, point_spec(p)))
    })
}

/// Fact 3: the conjugate classical operator after the fractional one equals
/// the z1 and z2 Laplacians of the averaged integral.
pub fn prop_fact_3(f: &dyn Field, p: &FracProblem, pc: PointCheck) -> Result<ResidualReport> {
    let ctx = p.ctx();
    timed(|| {
        let d_field = FieldFn(|x: Point4| ctx.frac_fueter_d(f, x, &p.alpha));
        let lhs = classical::classical_fueter_d_kind(&d_field, pc.q, &p.s, pc.h, FueterKind::LeftConj)?;
        let ci_field = FieldFn(|x: Point4| ctx.cal_i(f, x, &p.alpha));
        let rhs = laplacian_r4(&ci_field, pc.q, pc.h)?;
        Ok(ResidualReport::new("prop_fact_3", lhs, rhs, point_spec(p)).note(format!("h={}", pc.h)))
    })
}

/// Fact 4: the operator applied twice against the displayed order-(alpha + beta) sum.
pub fn prop_fact_4(f: &dyn Field, p: &FracProblem, q: Point4, conjugate: bool) -> Result<ResidualReport> {
    let ctx = p.ctx();
    timed(|| {
        let lhs = ctx.compose_iterated(f, q, &p.alpha, &p.beta, conjugate)?;
        let printed = ctx.compose_dd(f, q, &p.alpha, &p.beta, conjugate, LastTermVariant::AsPrinted)?;
        let consistent = ctx.compose_dd(f, q, &p.alpha, &p.beta, conjugate, LastTermVariant::Consistent)?;
        Ok(ResidualReport::new("prop_fact_4", lhs, printed, point_spec(p))
            .note(if conjugate { "conjugate" } else { "plain" })
            .note(format!("residual with Im z2 in the last term {:.3e}", (lhs - consistent).norm())))
    })
}

/// First and second fact of the complex setting: half the component operator
/// equals the d/d(conj z_k) derivative of the averaged integral.
pub fn prop32_fact_dbar(f: &dyn Field, p: &FracProblem, pc: PointCheck, k: usize) -> Result<ResidualReport> {
    let f = c_part(f);
    let ctx = p.ctx();
    let (a, id) = match k {
        1 => ([p.alpha.orders[0], p.alpha.orders[1]], "prop32_fact_1"),
        _ => ([p.alpha.orders[2], p.alpha.orders[3]], "prop32_fact_2"),
    };
    timed(|| {
        let d = if k == 1 {
            ctx.frac_d_a1(&f, pc.q, a[0], a[1])?
        } else {
            ctx.frac_d_a2(&f, pc.q, a[0], a[1])?
        };
        let ci_field = FieldFn(|x: Point4| ctx.cal_i(&f, x, &p.alpha));
        let rhs = bc(dbar(&ci_field, k, pc.q, pc.h)?);
        Ok(ResidualReport::new(id, d.scale_re(0.5), rhs, point_spec(p)).note(format!("h={}", pc.h)))
    })
}

/// Facts 3 and 4 of the complex setting: component operator after the matching
/// antiderivative.
pub fn prop32_fact_reproduce(f: &dyn Field, p: &FracProblem, q: Point4, k: usize) -> Result<ResidualReport> {
    let f = c_part(f);
    let ctx = p.ctx();
    let o = p.alpha.orders;
    timed(|| {
        p.base.check_above(q)?;
        let (inner_terms, outer_terms, id, axes) = if k == 1 {
            (
                FracContext::j_a1_terms(o[0], o[1], Component::F1, BiQuat::ONE),
                FracContext::d_a1_terms(o[0], o[1]),
                "prop32_fact_3",
                (0, 1),
            )
        } else {
            (
                ctx.j_a2_terms(o[2], o[3], Component::F1, BiQuat::ONE),
                FracContext::d_a2_terms(o[2], o[3]),
                "prop32_fact_4",
                (2, 3),
            )
        };
        let inner = ctx.field(&f, inner_terms);
        let lhs = ctx.field(&inner, outer_terms).eval(q)?;
        let rhs = bc(mixed_sample(&f, &p.base, q, Component::F1, axes.0, axes.1)?);
        Ok(ResidualReport::new(id, lhs, rhs, point_spec(p)))
    })
}

/// Fact 5 of the complex setting: the mixed compositions vanish. Both values
/// are packed as `first + second j`.
pub fn prop32_fact_5(f: &dyn Field, p: &FracProblem, q: Point4) -> Result<ResidualReport> {
    let f = c_part(f);
    let ctx = p.ctx();
    let o = p.alpha.orders;
    timed(|| {
        p.base.check_above(q)?;
        let j2 = ctx.field(&f, ctx.j_a2_terms(o[2], o[3], Component::F1, BiQuat::ONE));
        let first = ctx.field(&j2, FracContext::d_a1_terms(o[0], o[1])).eval(q)?;
        let j1 = ctx.field(&f, FracContext::j_a1_terms(o[0], o[1], Component::F1, BiQuat::ONE));
        let second = ctx.field(&j1, FracContext::d_a2_terms(o[2], o[3])).eval(q)?;
        let lhs = BiQuat::from_split(first.split().0, second.split().0);
        Ok(ResidualReport::new("prop32_fact_5", lhs, BiQuat::ZERO, point_spec(p)))
    })
}

/// Facts 6 and 7 of the complex setting: `2 d/dz_k` of the component operator
/// equals the z_k Laplacian of the averaged integral.
pub fn prop32_fact_laplace(f: &dyn Field, p: &FracProblem, pc: PointCheck, k: usize) -> Result<ResidualReport> {
    let f = c_part(f);
    let ctx = p.ctx();
    let o = p.alpha.orders;
    timed(|| {
        let d_field = FieldFn(|x: Point4| {
            if k == 1 {
                ctx.frac_d_a1(&f, x, o[0], o[1])
            } else {
                ctx.frac_d_a2(&f, x, o[2], o[3])
            }
        });
        let lhs = bc(dz(&d_field, k, pc.q, pc.h)?).scale_re(2.0);
        let ci_field = FieldFn(|x: Point4| ctx.cal_i(&f, x, &p.alpha));
        let rhs = if k == 1 {
            laplacian_z1(&ci_field, pc.q, pc.h)?
        } else {
            laplacian_z2(&ci_field, pc.q, pc.h)?
        };
        let id = if k == 1 { "prop32_fact_6" } else { "prop32_fact_7" };
        Ok(ResidualReport::new(id, lhs, rhs, point_spec(p)).note(format!("h={}", pc.h)))
    })
}

/// Fact 8 of the complex setting: the block compositions against their
/// displays, packed as `block1 + block2 j`. The notes carry the mixed
/// compositions (displayed as zero) and the conjugate blocks.
pub fn prop32_fact_8(f: &dyn Field, p: &FracProblem, q: Point4, variant: LastTermVariant) -> Result<ResidualReport> {
    let f = c_part(f);
    let ctx = p.ctx();
    let (a, b) = (p.alpha.orders, p.beta.orders);
    timed(|| {
        p.base.check_above(q)?;
        let compose = |outer: Vec<crate::fueter::AxisTerm>, inner: Vec<crate::fueter::AxisTerm>| -> Result<BiQuat> {
            let inner_field: AxisOperatorField<'_> = ctx.field(&f, inner);
            ctx.field(&inner_field, outer).eval(q)
        };
        let d1 = |o: [FracOrder; 2]| FracContext::d_a1_terms(o[0], o[1]);
        let d2 = |o: [FracOrder; 2]| FracContext::d_a2_terms(o[0], o[1]);
        let conj1 = |o: [FracOrder; 2]| {
            vec![
                crate::fueter::AxisTerm::new(0, crate::fueter::AxisOp::Derivative(o[0].value())),
                crate::fueter::AxisTerm::new(1, crate::fueter::AxisOp::Derivative(o[1].value()))
                    .left(-BiQuat::real(Quaternion::I)),
            ]
        };
        let conj2 = |o: [FracOrder; 2]| {
            vec![
                crate::fueter::AxisTerm::new(2, crate::fueter::AxisOp::Derivative(o[0].value())),
                crate::fueter::AxisTerm::new(3, crate::fueter::AxisOp::Derivative(o[1].value()))
                    .left(-BiQuat::real(Quaternion::I)),
            ]
        };
        let (a1, a2, b1, b2) = ([a[0], a[1]], [a[2], a[3]], [b[0], b[1]], [b[2], b[3]]);
        let it1 = compose(d1(a1), d1(b1))?;
        let it2 = compose(d2(a2), d2(b2))?;
        let disp1 = ctx.compose_block(&f, q, &p.alpha, &p.beta, 1, false, variant)?;
        let disp2 = ctx.compose_block(&f, q, &p.alpha, &p.beta, 2, false, variant)?;
        let cross = compose(d1(a1), d2(b2))?.norm().hypot(compose(d2(a2), d1(b1))?.norm());
        let c1 = compose(conj1(a1), d1(b1))? - ctx.compose_block(&f, q, &p.alpha, &p.beta, 1, true, variant)?;
        let c2 = compose(conj2(a2), d2(b2))? - ctx.compose_block(&f, q, &p.alpha, &p.beta, 2, true, variant)?;
        let lhs = BiQuat::from_split(it1.split().0, it2.split().0);
        let rhs = BiQuat::from_split(disp1.split().0, disp2.split().0);
        Ok(ResidualReport::new("prop32_fact_8", lhs, rhs, point_spec(p))
            .note(format!("{variant:?}"))
            .note(format!("mixed compositions {cross:.3e}"))
            .note(format!("conjugate block residuals {:.3e} {:.3e}", c1.norm(), c2.norm())))
    })
}

// ---------------------------------------------------------------------------
// Refinement

/// Runs `run` on every grid of the ladder and fills in empirical orders
/// `log(r_prev / r) / log(N / N_prev)`.
pub fn convergence_study<F>(run: F, ladder: &[QuadratureSpec]) -> Result<Vec<ResidualReport>>
where
    F: Fn(&QuadratureSpec) -> Result<ResidualReport>,
{
    if ladder.len() < 3 {
        return Err(Error::InvalidSpec(format!(
            "a refinement ladder needs at least 3 grids, got {}",
            ladder.len()
        )));
    }
    let mut out = ladder.iter().map(&run).collect::<Result<Vec<_>>>()?;
    attach_orders(&mut out);
    Ok(out)
}

/// Fills in `log(r_prev / r) / log(N / N_prev)` along a sequence of reports
/// of one identity on increasing grids; the first report gets none.
pub fn attach_orders(reports: &mut [ResidualReport]) {
    for i in 1..reports.len() {
        let (r0, n0) = (reports[i - 1].abs_residual, reports[i - 1].grid.volume_nodes as f64);
        let rep = &mut reports[i];
        let (r1, n1) = (rep.abs_residual, rep.grid.volume_nodes as f64);
        if r0 > 0.0 && r1 > 0.0 && n1 != n0 {
            rep.order_estimate = Some((r0 / r1).ln() / (n1 / n0).ln());
        } else {
            rep.order_estimate = None;
            *rep = std::mem::take(rep).note("order undefined");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstField, Poly4};
    use crate::geometry::Rule;

    fn problem(n: usize) -> FracProblem {
        let rect = Rect4::new([0.0; 4], [1.0; 4]).unwrap();
        FracProblem {
            base: BasePoint::new([0.7, 0.65, 0.75, 0.7], rect).unwrap(),
            alpha: FracOrder4::real([0.5; 4]).unwrap(),
            beta: FracOrder4::real([0.4; 4]).unwrap(),
            s: StructuralSet::new(0.3),
            spec: QuadratureSpec::uniform(n).with_frac_nodes(24),
            conv: KernelConvention::Reproducing,
        }
    }

    #[test]
    fn report_self_consistency() {
        let r = ResidualReport::new("x", BiQuat::ONE, BiQuat::ZERO, QuadratureSpec::default());
        assert!(r.is_consistent());
        assert_eq!(r.rel_residual, 1.0);
        let z = ResidualReport::new("x", BiQuat::ZERO, BiQuat::ZERO, QuadratureSpec::default());
        assert_eq!(z.rel_residual, 0.0);
    }

    #[test]
    fn stokes_linear_example() {
        let r = Rect4::unit();
        let x0 = Poly4::monomial(BiQuat::ONE, [1, 0, 0, 0]);
        let one = ConstField(BiQuat::ONE);
        let rep = stokes_classical(&x0, &one, &r, &StructuralSet::new(0.0), &QuadratureSpec::uniform(16)).unwrap();
        assert!((rep.lhs - BiQuat::ONE).norm() < 1e-6 && (rep.rhs - BiQuat::ONE).norm() < 1e-6);
        let c = ConstField(BiQuat::real(Quaternion::new(1.0, 2.0, 3.0, 4.0)));
        let rep = stokes_classical(&c, &c, &r, &StructuralSet::new(0.0), &QuadratureSpec::uniform(4)).unwrap();
        assert!(rep.lhs.norm() < 1e-14 && rep.rhs == BiQuat::ZERO);
    }

    #[test]
    fn n_correction_of_one() {
        let p = problem(4);
        let q = [0.8, 0.9, 0.6, 0.5];
        let v = n_correction(&ConstField(BiQuat::ONE), &p.base, q, &p.alpha).unwrap();
        let pi = std::f64::consts::PI;
        let mut want = 0.0;
        for l in 0..4 {
            let others: f64 = (0..4).filter(|&m| m != l).map(|m| 1.0 / (pi.sqrt() * q[m].sqrt())).sum();
            want += 2.0 * q[l].sqrt() / pi.sqrt() * others;
        }
        assert!((v - BiQuat::scalar(Cx::new(want, 0.0))).norm() < 1e-12);
        assert_eq!(n_correction(&ConstField(BiQuat::ZERO), &p.base, q, &p.alpha).unwrap(), BiQuat::ZERO);
    }

    #[test]
    fn zero_fields_give_zero() {
        let p = problem(3);
        let z = ConstField(BiQuat::ZERO);
        for rep in [
            stokes_fractional(&z, &z, &p).unwrap(),
            bp_fractional(&z, &z, [0.8, 0.8, 0.8, 0.8], &p).unwrap(),
            bp_complex(&z, &z, [0.8, 0.8, 0.8, 0.8], &p).unwrap(),
        ] {
            assert_eq!(rep.abs_residual, 0.0, "{}", rep.identity_id);
        }
    }

    #[test]
    fn diagonal_paths_agree_exactly() {
        let p = problem(3);
        let f = Poly4::monomial(BiQuat::ONE, [1, 0, 0, 0]);
        let g = ConstField(BiQuat::ONE);
        let d = bp_fractional_diag(&f, &g, &p).unwrap();
        let gen = bp_fractional(&f, &g, p.base.xi, &p).unwrap();
        assert_eq!(d.lhs, gen.lhs);
        assert_eq!(d.rhs, gen.rhs);
        assert_eq!(d.rhs, bp_fractional_diag_rhs(&f, &g, &p).unwrap());
    }

    #[test]
    fn exterior_points_need_two_coordinates_above() {
        let p = problem(3);
        assert_eq!(p.branch([1.2, 1.3, 0.5, 0.5]).unwrap(), Branch::Exterior);
        assert!(p.branch([1.2, 0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn ladder_orders() {
        let f = crate::field::ExpField { coeff: BiQuat::ONE, rate: [0.7, -0.4, 0.5, 0.3] };
        let g = Poly4::monomial(BiQuat::real(Quaternion::J), [0, 1, 0, 1]);
        let r = Rect4::unit();
        let s = StructuralSet::new(0.9);
        let ladder: Vec<_> = [4, 8, 16].iter().map(|&n| QuadratureSpec::uniform(n).with_rule(Rule::Midpoint)).collect();
        let reps = convergence_study(|sp| stokes_classical(&f, &g, &r, &s, sp), &ladder).unwrap();
        let o = reps[2].order_estimate.unwrap();
        assert!(o > 1.9, "{o}");
        assert!(convergence_study(|sp| stokes_classical(&f, &g, &r, &s, sp), &ladder[..2]).is_err());
        let z = crate::field::ConstField(BiQuat::ZERO);
        let reps = convergence_study(|sp| stokes_classical(&z, &z, &r, &s, sp), &ladder).unwrap();
        assert!(reps.iter().all(|r| r.abs_residual == 0.0));
        assert!(reps[1].order_estimate.is_none() && reps[1].notes.contains("order undefined"));
    }
}
