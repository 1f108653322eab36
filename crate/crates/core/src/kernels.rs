//! The Cauchy kernel of the theta-Fueter operator, its fractional analogues,
//! the Teodorescu transform, and a volume integral for kernels with a point
//! singularity.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::frac1d::{left_deriv_raw, FracOrder, Func, DEFAULT_FRAC_NODES};
use crate::fueter::{BasePoint, FracOrder4};
use crate::geometry::{box_integral, Point4, Rect4, Rule};
use crate::quadrature::pairwise_sum;
use crate::quat::{BiQuat, CPoint2, Cx, Quaternion, StructuralSet};

const TWO_PI2: f64 = 2.0 * PI * PI;

/// Phase in front of the z2 part of the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KernelConvention {
    /// `conj(w_theta) / (2 pi^2 |w|^4)`, the fundamental solution of the
    /// operator: phase `i e^{i theta}`.
    #[default]
    Reproducing,
    /// Phase `i e^{-i theta}` exactly as displayed. Agrees with the other
    /// convention when sin(theta) = 0.
    AsPrinted,
}

impl KernelConvention {
    pub fn phase(self, s: &StructuralSet) -> Cx {
        match self {
            KernelConvention::Reproducing => s.omega(),
            KernelConvention::AsPrinted => Cx::new(s.theta.sin(), s.theta.cos()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelEval {
    pub value: BiQuat,
    /// `|xi - q|`.
    pub distance: f64,
    /// The exclusion rule refused the point and the value was set to zero.
    pub delta_clipped: bool,
}

fn diff(xi: Point4, q: Point4) -> Point4 {
    std::array::from_fn(|k| xi[k] - q[k])
}

fn norm4(u: Point4) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Kernel as a function of the difference `w = xi - q`.
pub fn cauchy_kernel_w(w: Point4, s: &StructuralSet, conv: KernelConvention) -> Result<Quaternion> {
    let r = norm4(w);
    if !(r > 1e-150) {
        return Err(Error::SingularPoint(r));
    }
    let z1 = Cx::new(w[0], -w[1]);
    let z2 = conv.phase(s) * Cx::new(w[2], -w[3]);
    let r4 = r * r * r * r;
    Ok(Quaternion::from_split(z1, -z2).scale(1.0 / (TWO_PI2 * r4)))
}

pub fn cauchy_kernel_at(xi: Point4, q: Point4, s: &StructuralSet, conv: KernelConvention) -> Result<Quaternion> {
    cauchy_kernel_w(diff(xi, q), s, conv)
}

/// `K_theta(xi - q)` in the reproducing convention.
pub fn cauchy_kernel(xi: CPoint2, q: CPoint2, s: &StructuralSet) -> Result<Quaternion> {
    cauchy_kernel_at(xi.coords(), q.coords(), s, KernelConvention::Reproducing)
}

/// `(u_{2p} - i u_{2p+1}) / |u|^4` for u = tau - q, and its partials in q.
#[derive(Clone, Copy, Debug)]
struct Rational {
    pair: usize,
}

impl Rational {
    fn value(&self, u: Point4) -> Cx {
        let s = u.iter().map(|x| x * x).sum::<f64>();
        Cx::new(u[2 * self.pair], -u[2 * self.pair + 1]) / (s * s)
    }

    /// Partial in u_m; the partial in q_m is its negative.
    fn du(&self, u: Point4, m: usize) -> Cx {
        let s = u.iter().map(|x| x * x).sum::<f64>();
        let c = Cx::new(u[2 * self.pair], -u[2 * self.pair + 1]);
        let delta = if m == 2 * self.pair {
            Cx::new(1.0, 0.0)
        } else if m == 2 * self.pair + 1 {
            Cx::new(0.0, -1.0)
        } else {
            Cx::new(0.0, 0.0)
        };
        delta / (s * s) - c * (4.0 * u[m] / (s * s * s))
    }
}

fn ci(z: Cx) -> BiQuat {
    BiQuat::real(Quaternion::from_ci(z))
}

/// The fractional kernels built from RL derivatives in the coordinates of q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracKernel {
    pub base: BasePoint,
    pub s: StructuralSet,
    pub conv: KernelConvention,
    pub nodes: usize,
    pub exclusion_delta: f64,
}

impl FracKernel {
    pub fn new(base: BasePoint, s: StructuralSet) -> Self {
        FracKernel {
            base,
            s,
            conv: KernelConvention::Reproducing,
            nodes: DEFAULT_FRAC_NODES,
            exclusion_delta: 0.0,
        }
    }

    pub fn with_convention(mut self, conv: KernelConvention) -> Self {
        self.conv = conv;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.exclusion_delta = delta;
        self
    }

    /// Distance from tau to the segment swept by q when coordinate `axis`
    /// runs over [a_axis, q_axis].
    pub fn segment_distance(&self, tau: Point4, q: Point4, axis: usize) -> f64 {
        let lo = self.base.a()[axis];
        let mut d2 = 0.0;
        for m in 0..4 {
            let d = if m == axis {
                if tau[m] < lo {
                    lo - tau[m]
                } else if tau[m] > q[m] {
                    tau[m] - q[m]
                } else {
                    0.0
                }
            } else {
                tau[m] - q[m]
            };
            d2 += d * d;
        }
        d2.sqrt()
    }

    fn check_segment(&self, tau: Point4, q: Point4, axis: usize) -> Result<()> {
        let d = self.segment_distance(tau, q, axis);
        if d < self.exclusion_delta || !(d > 1e-150) {
            return Err(Error::SingularSegment { axis, distance: d });
        }
        Ok(())
    }

    /// `D^alpha` in q_axis of the rational part `pair`, other q coordinates fixed.
    fn deriv_along(&self, tau: Point4, q: Point4, pair: usize, axis: usize, alpha: FracOrder) -> Result<BiQuat> {
        self.check_segment(tau, q, axis)?;
        let r = Rational { pair };
        let at = move |t: f64| {
            let mut p = q;
            p[axis] = t;
            diff(tau, p)
        };
        let line = Func::new(move |t| ci(r.value(at(t)))).with_deriv(move |t| ci(-r.du(at(t), axis)));
        left_deriv_raw(&line, self.base.a()[axis], alpha.value(), q[axis], self.nodes)
            .map_err(|e| e.at(format!("kernel derivative along axis {axis}")))
    }

    pub fn k01(&self, tau: Point4, q: Point4, a0: FracOrder, a1: FracOrder) -> Result<BiQuat> {
        self.base.check_above(q)?;
        let v = self.deriv_along(tau, q, 0, 0, a0)? + self.deriv_along(tau, q, 0, 1, a1)?;
        Ok(v.scale_re(1.0 / TWO_PI2))
    }

    pub fn k23(&self, tau: Point4, q: Point4, a2: FracOrder, a3: FracOrder) -> Result<BiQuat> {
        self.base.check_above(q)?;
        let v = self.deriv_along(tau, q, 1, 2, a2)? + self.deriv_along(tau, q, 1, 3, a3)?;
        Ok(ci(self.conv.phase(&self.s)) * v.scale_re(-1.0 / TWO_PI2))
    }

    /// `K01 + K23 j`.
    pub fn eval(&self, tau: Point4, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        let o = alpha.orders;
        let j = BiQuat::real(Quaternion::J);
        Ok(self.k01(tau, q, o[0], o[1])? + self.k23(tau, q, o[2], o[3])? * j)
    }

    /// Like [`FracKernel::eval`], but a refused segment yields a zero value
    /// flagged as clipped instead of an error.
    pub fn eval_clipped(&self, tau: Point4, q: Point4, alpha: &FracOrder4) -> Result<KernelEval> {
        let distance = norm4(diff(tau, q));
        match self.eval(tau, q, alpha) {
            Ok(value) => Ok(KernelEval {
                value,
                distance,
                delta_clipped: false,
            }),
            Err(e) if matches!(e.root(), Error::SingularSegment { .. }) => Ok(KernelEval {
                value: BiQuat::ZERO,
                distance,
                delta_clipped: true,
            }),
            Err(e) => Err(e),
        }
    }
}

pub fn frac_kernel_k01(
    tau: CPoint2,
    q: CPoint2,
    base: BasePoint,
    a0: FracOrder,
    a1: FracOrder,
    s: StructuralSet,
) -> Result<BiQuat> {
    FracKernel::new(base, s).k01(tau.coords(), q.coords(), a0, a1)
}

pub fn frac_kernel_k23(
    tau: CPoint2,
    q: CPoint2,
    base: BasePoint,
    a2: FracOrder,
    a3: FracOrder,
    s: StructuralSet,
) -> Result<BiQuat> {
    FracKernel::new(base, s).k23(tau.coords(), q.coords(), a2, a3)
}

/// `int_r h(tau) dtau` for h with an integrable singularity at `q`.
///
/// The sup-norm cube of half-width l = inner distance of q is split into
/// eight pyramids with apex q, in which `tau - q = l t (s_1, .., +-1, .., s_3)`
/// and the Jacobian is `l^4 t^3`; the cube of half-width `delta` around q is
/// excised by integrating t over [delta / l, 1]. The rest of r is covered by
/// at most 80 boxes with the tensor rule.
pub fn singular_volume_integral<H>(h: &H, r: &Rect4, q: Point4, n: usize, delta: f64) -> Result<BiQuat>
where
    H: Fn(Point4) -> Result<BiQuat> + Sync,
{
    if !r.contains(q) {
        return Err(Error::InvalidPoint(format!("singular point {q:?} is not interior")));
    }
    let l = r.inner_distance(q);
    if !(delta >= 0.0 && delta < l) {
        return Err(Error::Parameter(format!(
            "exclusion delta {delta} must lie in [0, {l}) for this point"
        )));
    }
    let mut parts = Vec::with_capacity(88);
    let t0 = delta / l;
    for axis in 0..4 {
        for sign in [-1.0, 1.0] {
            let g = |p: Point4| -> Result<BiQuat> {
                // p = (t, s1, s2, s3)
                let t = p[0];
                let mut tau = q;
                let mut k = 1;
                for m in 0..4 {
                    if m == axis {
                        tau[m] += sign * l * t;
                    } else {
                        tau[m] += l * t * p[k];
                        k += 1;
                    }
                }
                Ok(h(tau)?.scale_re(l.powi(4) * t * t * t))
            };
            parts.push(box_integral(&g, [t0, -1.0, -1.0, -1.0], [1.0, 1.0, 1.0, 1.0], n, Rule::GaussLegendre)?);
        }
    }
    let cuts: [[f64; 4]; 4] = std::array::from_fn(|m| [r.lo[m], q[m] - l, q[m] + l, r.hi[m]]);
    for idx in 0..81usize {
        let sel = [idx % 3, (idx / 3) % 3, (idx / 9) % 3, idx / 27];
        if sel == [1, 1, 1, 1] {
            continue;
        }
        let lo: Point4 = std::array::from_fn(|m| cuts[m][sel[m]]);
        let hi: Point4 = std::array::from_fn(|m| cuts[m][sel[m] + 1]);
        if (0..4).any(|m| !(hi[m] - lo[m] > 1e-14 * (r.hi[m] - r.lo[m]))) {
            continue;
        }
        parts.push(box_integral(h, lo, hi, n, Rule::GaussLegendre)?);
    }
    Ok(pairwise_sum(&parts))
}

/// `int_r K_theta(tau - q) f(tau) dtau` with the delta-cube around q excised.
pub fn teodorescu(
    f: &dyn Field,
    r: &Rect4,
    q: Point4,
    s: &StructuralSet,
    n: usize,
    delta: f64,
    conv: KernelConvention,
) -> Result<BiQuat> {
    let h = |tau: Point4| -> Result<BiQuat> { Ok(BiQuat::real(cauchy_kernel_at(tau, q, s, conv)?) * f.eval(tau)?) };
    singular_volume_integral(&h, r, q, n, delta)
}
