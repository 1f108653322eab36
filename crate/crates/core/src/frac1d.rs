//! Riemann-Liouville integrals and derivatives of complex order on real intervals.
//!
//! Functions may advertise a decomposition `f(t) = sum_k (t - a)^{g_k} h_k(t)`
//! with smooth `h_k` ([`Func1D::power_terms`]); the operators then integrate
//! the endpoint factor exactly through beta-type product rules. Integrals and
//! derivatives of such functions are themselves decomposed, so compositions
//! like `D^a I^a f` stay accurate.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamma::{gamma, rgamma};
use crate::quadrature::{beta_integral, rpow, singular_rule};
use crate::quat::{BiQuat, Cx};

/// Validation band for Re(alpha).
pub const ORDER_EPS: f64 = 1e-6;
pub const DEFAULT_FRAC_NODES: usize = 64;

/// Complex order alpha with eps <= Re(alpha) <= 1 - eps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracOrder {
    alpha: Cx,
}

impl FracOrder {
    pub fn new(alpha: Cx) -> Result<Self> {
        let (lo, hi) = (ORDER_EPS, 1.0 - ORDER_EPS);
        if !(alpha.re >= lo && alpha.re <= hi) || !alpha.im.is_finite() {
            return Err(Error::OrderOutOfRange { re: alpha.re, lo, hi });
        }
        Ok(FracOrder { alpha })
    }

    pub fn real(alpha: f64) -> Result<Self> {
        FracOrder::new(Cx::new(alpha, 0.0))
    }

    pub fn value(self) -> Cx {
        self.alpha
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn tol(&self) -> f64 {
        1e-12 * self.len().max(self.a.abs()).max(self.b.abs()).max(1.0)
    }

    fn reflect(&self, t: f64) -> f64 {
        self.a + self.b - t
    }
}

/// One piece `(t - origin)^gamma h(t)` of a decomposed function.
pub struct PowerTerm<'a> {
    pub gamma: Cx,
    pub regular: Arc<dyn Func1D + 'a>,
}

/// A function of one real variable with values in H(C(I)).
pub trait Func1D: Send + Sync {
    fn eval(&self, t: f64) -> Result<BiQuat>;

    /// Exact derivative, if known.
    fn deriv(&self, _t: f64) -> Option<Result<BiQuat>> {
        None
    }

    /// `(origin, terms)` with `f(t) = sum (t - origin)^gamma_k h_k(t)`.
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        None
    }
}

impl<T: Func1D + ?Sized> Func1D for &T {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        (**self).eval(t)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        (**self).deriv(t)
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        (**self).power_terms()
    }
}

impl<T: Func1D + ?Sized> Func1D for Arc<T> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        (**self).eval(t)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        (**self).deriv(t)
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        (**self).power_terms()
    }
}

impl<T: Func1D + ?Sized> Func1D for Box<T> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        (**self).eval(t)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        (**self).deriv(t)
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        (**self).power_terms()
    }
}

/// Exact derivative when available, otherwise a central difference.
pub fn derivative<F: Func1D + ?Sized>(f: &F, t: f64) -> Result<BiQuat> {
    if let Some(d) = f.deriv(t) {
        return d;
    }
    let h = 1e-5 * t.abs().max(1.0);
    let fp = f.eval(t + h)?;
    let fm = f.eval(t - h)?;
    let d = (fp - fm).scale_re(0.5 / h);
    if !d.is_finite() {
        return Err(Error::MissingDerivative(format!(
            "finite-difference fallback is not finite at t = {t}"
        )));
    }
    Ok(d)
}

type BoxedFn = Box<dyn Fn(f64) -> BiQuat + Send + Sync>;

/// Closure-backed function with an optional exact derivative.
pub struct Func {
    f: BoxedFn,
    d: Option<BoxedFn>,
}

impl Func {
    pub fn new(f: impl Fn(f64) -> BiQuat + Send + Sync + 'static) -> Self {
        Func {
            f: Box::new(f),
            d: None,
        }
    }

    pub fn scalar(f: impl Fn(f64) -> Cx + Send + Sync + 'static) -> Self {
        Func::new(move |t| BiQuat::scalar(f(t)))
    }

    pub fn with_deriv(mut self, d: impl Fn(f64) -> BiQuat + Send + Sync + 'static) -> Self {
        self.d = Some(Box::new(d));
        self
    }

    pub fn with_scalar_deriv(self, d: impl Fn(f64) -> Cx + Send + Sync + 'static) -> Self {
        self.with_deriv(move |t| BiQuat::scalar(d(t)))
    }
}

impl Func1D for Func {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        Ok((self.f)(t))
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        self.d.as_ref().map(|d| Ok(d(t)))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Const1D(pub BiQuat);

impl Func1D for Const1D {
    fn eval(&self, _t: f64) -> Result<BiQuat> {
        Ok(self.0)
    }
    fn deriv(&self, _t: f64) -> Option<Result<BiQuat>> {
        Some(Ok(BiQuat::ZERO))
    }
}

/// `coeff * (t - origin)^exponent`.
#[derive(Clone, Copy, Debug)]
pub struct Power1D {
    pub origin: f64,
    pub exponent: Cx,
    pub coeff: BiQuat,
}

impl Power1D {
    pub fn new(origin: f64, exponent: Cx) -> Self {
        Power1D {
            origin,
            exponent,
            coeff: BiQuat::ONE,
        }
    }
}

impl Func1D for Power1D {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        Ok(self.coeff.scale(rpow(t - self.origin, self.exponent)))
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        let e = self.exponent;
        Some(Ok(self.coeff.scale(e * rpow(t - self.origin, e - 1.0))))
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        Some((
            self.origin,
            vec![PowerTerm {
                gamma: self.exponent,
                regular: Arc::new(Const1D(self.coeff)),
            }],
        ))
    }
}

/// Hides any power decomposition; the operators then see a plain function.
pub struct Plain<F>(pub F);

impl<F: Func1D> Func1D for Plain<F> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        self.0.eval(t)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        self.0.deriv(t)
    }
}

/// `t -> f(a + b - t)`.
pub struct Reflected<F> {
    pub f: F,
    pub a: f64,
    pub b: f64,
}

impl<F: Func1D> Reflected<F> {
    pub fn new(f: F, iv: Interval) -> Self {
        Reflected { f, a: iv.a, b: iv.b }
    }
}

fn same_point(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-13 * x.abs().max(y.abs()).max(1.0)
}

impl<F: Func1D> Func1D for Reflected<F> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        self.f.eval(self.a + self.b - t)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        Some(derivative(&self.f, self.a + self.b - t).map(|d| -d))
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        let (origin, terms) = self.f.power_terms()?;
        // (b - t)^g under t -> a + b - t becomes (t - a)^g
        let new_origin = if same_point(origin, self.b) {
            self.a
        } else if same_point(origin, self.a) {
            self.b
        } else {
            return None;
        };
        let (a, b) = (self.a, self.b);
        Some((
            new_origin,
            terms
                .into_iter()
                .map(|t| PowerTerm {
                    gamma: t.gamma,
                    regular: Arc::new(Reflected {
                        f: t.regular,
                        a,
                        b,
                    }) as Arc<dyn Func1D + '_>,
                })
                .collect(),
        ))
    }
}

/// `t -> left * f(t) * right`.
pub struct Scaled<F> {
    pub f: F,
    pub left: BiQuat,
    pub right: BiQuat,
}

impl<F: Func1D> Func1D for Scaled<F> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        Ok(self.left * self.f.eval(t)? * self.right)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        Some(derivative(&self.f, t).map(|d| self.left * d * self.right))
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        let (origin, terms) = self.f.power_terms()?;
        let (left, right) = (self.left, self.right);
        Some((
            origin,
            terms
                .into_iter()
                .map(|t| PowerTerm {
                    gamma: t.gamma,
                    regular: Arc::new(Scaled {
                        f: t.regular,
                        left,
                        right,
                    }) as Arc<dyn Func1D + '_>,
                })
                .collect(),
        ))
    }
}

/// Sum of functions; decompositions are merged when their origins agree.
pub struct Sum1D<'a> {
    pub parts: Vec<Box<dyn Func1D + 'a>>,
}

impl Func1D for Sum1D<'_> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        let mut acc = BiQuat::ZERO;
        for p in &self.parts {
            acc += p.eval(t)?;
        }
        Ok(acc)
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        let mut acc = BiQuat::ZERO;
        for p in &self.parts {
            match derivative(p, t) {
                Ok(d) => acc += d,
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(acc))
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        let mut origin: Option<f64> = None;
        let mut out = Vec::new();
        let mut plain = Vec::new();
        for p in &self.parts {
            match p.power_terms() {
                Some((o, terms)) => {
                    if let Some(prev) = origin {
                        if !same_point(prev, o) {
                            return None;
                        }
                    }
                    origin = Some(o);
                    out.extend(terms);
                }
                None => plain.push(p),
            }
        }
        let origin = origin?;
        for p in plain {
            out.push(PowerTerm {
                gamma: Cx::new(0.0, 0.0),
                regular: Arc::new(&**p) as Arc<dyn Func1D + '_>,
            });
        }
        Some((origin, out))
    }
}

/// `x -> f'(x)`, exact when available.
pub struct Derivative<F>(pub F);

impl<F: Func1D> Func1D for Derivative<F> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        derivative(&self.0, t)
    }
}

/// `x -> scale * int_0^1 s^{p-1} (1-s)^{q-1} h(a + (x-a) s) ds`.
///
/// The regular part produced by integrating or differentiating a power term.
struct BetaRegular<'a> {
    h: Arc<dyn Func1D + 'a>,
    a: f64,
    p: Cx,
    q: Cx,
    scale: Cx,
    nodes: usize,
}

impl Func1D for BetaRegular<'_> {
    fn eval(&self, x: f64) -> Result<BiQuat> {
        let l = x - self.a;
        let v = beta_integral(self.p, self.q, self.nodes, |s| self.h.eval(self.a + l * s))?;
        Ok(v.scale(self.scale))
    }
    fn deriv(&self, x: f64) -> Option<Result<BiQuat>> {
        let l = x - self.a;
        Some(
            beta_integral(self.p + 1.0, self.q, self.nodes, |s| {
                derivative(&*self.h, self.a + l * s)
            })
            .map(|v| v.scale(self.scale)),
        )
    }
}

/// Decomposition of f relative to `a`; a plain function is the single term g = 0.
fn terms_at<'a, F: Func1D + ?Sized>(f: &'a F, a: f64) -> Vec<PowerTerm<'a>> {
    if let Some((origin, terms)) = f.power_terms() {
        if same_point(origin, a) {
            return terms;
        }
    }
    vec![PowerTerm {
        gamma: Cx::new(0.0, 0.0),
        regular: Arc::new(f) as Arc<dyn Func1D + 'a>,
    }]
}

fn decomposed<F: Func1D + ?Sized>(f: &F, a: f64) -> bool {
    matches!(f.power_terms(), Some((o, _)) if same_point(o, a))
}

/// `(1/Gamma(alpha)) int_a^x f(t) (x-t)^{alpha-1} dt` for any Re(alpha) > 0.
pub fn left_integral_raw<F: Func1D + ?Sized>(
    f: &F,
    a: f64,
    alpha: Cx,
    x: f64,
    nodes: usize,
) -> Result<BiQuat> {
    let l = x - a;
    if l < 0.0 {
        return Err(Error::PointOutOfRange { x, a, b: f64::INFINITY });
    }
    if l == 0.0 {
        return Ok(BiQuat::ZERO);
    }
    let rg = rgamma(alpha);
    if decomposed(f, a) {
        let mut acc = BiQuat::ZERO;
        for t in terms_at(f, a) {
            let j = beta_integral(t.gamma + 1.0, alpha, nodes, |s| t.regular.eval(a + l * s))?;
            acc += j.scale(rpow(l, alpha + t.gamma) * rg);
        }
        return Ok(acc);
    }
    let rule = singular_rule(nodes, alpha)?;
    let v = rule.apply(|u| f.eval(x - l * u))?;
    Ok(v.scale(rpow(l, alpha) * rg))
}

/// Left RL derivative of order alpha (0 < Re alpha < 1) at x > a.
pub fn left_deriv_raw<F: Func1D + ?Sized>(
    f: &F,
    a: f64,
    alpha: Cx,
    x: f64,
    nodes: usize,
) -> Result<BiQuat> {
    let l = x - a;
    if !(l > 0.0) {
        return Err(Error::PointOutOfRange { x, a, b: f64::INFINITY });
    }
    let one_m = 1.0 - alpha;
    let rg = rgamma(one_m);
    if decomposed(f, a) {
        let mut acc = BiQuat::ZERO;
        for t in terms_at(f, a) {
            let g = t.gamma;
            if !(g.re > -1.0) {
                return Err(Error::Parameter(format!(
                    "endpoint exponent {g} is not integrable"
                )));
            }
            let h = &t.regular;
            let j = beta_integral(g + 1.0, one_m, nodes, |s| h.eval(a + l * s))?;
            let jp = beta_integral(g + 2.0, one_m, nodes, |s| derivative(&**h, a + l * s))?;
            acc += j.scale((one_m + g) * rpow(l, g - alpha) * rg);
            acc += jp.scale(rpow(l, one_m + g) * rg);
        }
        return Ok(acc);
    }
    let fa = f.eval(a)?;
    let rule = singular_rule(nodes, one_m)?;
    let tail = rule.apply(|u| derivative(f, x - l * u))?;
    Ok(fa.scale(rpow(l, -alpha) * rg) + tail.scale(rpow(l, one_m) * rg))
}

/// `x -> I^alpha_{a+} f (x)` as a decomposed function.
pub struct LeftIntegral<F> {
    pub f: F,
    pub a: f64,
    pub alpha: Cx,
    pub nodes: usize,
}

impl<F: Func1D> Func1D for LeftIntegral<F> {
    fn eval(&self, x: f64) -> Result<BiQuat> {
        left_integral_raw(&self.f, self.a, self.alpha, x, self.nodes)
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        let rg = rgamma(self.alpha);
        let terms = terms_at(&self.f, self.a)
            .into_iter()
            .map(|t| PowerTerm {
                gamma: t.gamma + self.alpha,
                regular: Arc::new(BetaRegular {
                    h: t.regular,
                    a: self.a,
                    p: t.gamma + 1.0,
                    q: self.alpha,
                    scale: rg,
                    nodes: self.nodes,
                }) as Arc<dyn Func1D + '_>,
            })
            .collect();
        Some((self.a, terms))
    }
}

/// `x -> D^alpha_{a+} f (x)` as a decomposed function.
pub struct LeftDerivative<F> {
    pub f: F,
    pub a: f64,
    pub alpha: Cx,
    pub nodes: usize,
}

impl<F: Func1D> Func1D for LeftDerivative<F> {
    fn eval(&self, x: f64) -> Result<BiQuat> {
        left_deriv_raw(&self.f, self.a, self.alpha, x, self.nodes)
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        let one_m = 1.0 - self.alpha;
        let rg = rgamma(one_m);
        let a = self.a;
        let mut out: Vec<PowerTerm<'_>> = Vec::new();
        if decomposed(&self.f, a) {
            for t in terms_at(&self.f, a) {
                let g = t.gamma;
                out.push(PowerTerm {
                    gamma: g - self.alpha,
                    regular: Arc::new(BetaRegular {
                        h: t.regular.clone(),
                        a,
                        p: g + 1.0,
                        q: one_m,
                        scale: (one_m + g) * rg,
                        nodes: self.nodes,
                    }),
                });
                out.push(PowerTerm {
                    gamma: g + one_m,
                    regular: Arc::new(BetaRegular {
                        h: Arc::new(Derivative(t.regular)),
                        a,
                        p: g + 2.0,
                        q: one_m,
                        scale: rg,
                        nodes: self.nodes,
                    }),
                });
            }
        } else {
            let fa = self.f.eval(a).ok()?;
            out.push(PowerTerm {
                gamma: -self.alpha,
                regular: Arc::new(Const1D(fa.scale(rg))),
            });
            out.push(PowerTerm {
                gamma: one_m,
                regular: Arc::new(BetaRegular {
                    h: Arc::new(Derivative(&self.f)),
                    a,
                    p: Cx::new(1.0, 0.0),
                    q: one_m,
                    scale: rg,
                    nodes: self.nodes,
                }),
            });
        }
        Some((a, out))
    }
}

fn check_left(iv: &Interval, x: f64) -> Result<()> {
    if !(x > iv.a) || x > iv.b + iv.tol() {
        return Err(Error::PointOutOfRange { x, a: iv.a, b: iv.b });
    }
    Ok(())
}

fn check_right(iv: &Interval, x: f64) -> Result<()> {
    if !(x < iv.b) || x < iv.a - iv.tol() {
        return Err(Error::PointOutOfRange { x, a: iv.a, b: iv.b });
    }
    Ok(())
}

/// RL operators with a fixed node count per call.
#[derive(Clone, Copy, Debug)]
pub struct RlOperator {
    pub nodes: usize,
}

impl Default for RlOperator {
    fn default() -> Self {
        RlOperator {
            nodes: DEFAULT_FRAC_NODES,
        }
    }
}

impl RlOperator {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::TooFewNodes(nodes));
        }
        Ok(RlOperator { nodes })
    }

    pub fn integral_left<F: Func1D + ?Sized>(
        &self,
        f: &F,
        iv: Interval,
        alpha: FracOrder,
        x: f64,
    ) -> Result<BiQuat> {
        check_left(&iv, x)?;
        left_integral_raw(f, iv.a, alpha.value(), x, self.nodes)
    }

    pub fn integral_right<F: Func1D + ?Sized>(
        &self,
        f: &F,
        iv: Interval,
        alpha: FracOrder,
        x: f64,
    ) -> Result<BiQuat> {
        check_right(&iv, x)?;
        let g = Reflected::new(f, iv);
        left_integral_raw(&g, iv.a, alpha.value(), iv.reflect(x), self.nodes)
    }

    pub fn deriv_left<F: Func1D + ?Sized>(
        &self,
        f: &F,
        iv: Interval,
        alpha: FracOrder,
        x: f64,
    ) -> Result<BiQuat> {
        check_left(&iv, x)?;
        left_deriv_raw(f, iv.a, alpha.value(), x, self.nodes)
    }

    /// `-d/dx I^{1-alpha}_{b-}`, evaluated through the reflection t -> a + b - t.
    pub fn deriv_right<F: Func1D + ?Sized>(
        &self,
        f: &F,
        iv: Interval,
        alpha: FracOrder,
        x: f64,
    ) -> Result<BiQuat> {
        check_right(&iv, x)?;
        let g = Reflected::new(f, iv);
        left_deriv_raw(&g, iv.a, alpha.value(), iv.reflect(x), self.nodes)
    }
}

pub fn rl_integral_left<F: Func1D + ?Sized>(f: &F, iv: Interval, alpha: FracOrder, x: f64) -> Result<BiQuat> {
    RlOperator::default().integral_left(f, iv, alpha, x)
}

pub fn rl_integral_right<F: Func1D + ?Sized>(f: &F, iv: Interval, alpha: FracOrder, x: f64) -> Result<BiQuat> {
    RlOperator::default().integral_right(f, iv, alpha, x)
}

pub fn rl_deriv_left<F: Func1D + ?Sized>(f: &F, iv: Interval, alpha: FracOrder, x: f64) -> Result<BiQuat> {
    RlOperator::default().deriv_left(f, iv, alpha, x)
}

pub fn rl_deriv_right<F: Func1D + ?Sized>(f: &F, iv: Interval, alpha: FracOrder, x: f64) -> Result<BiQuat> {
    RlOperator::default().deriv_right(f, iv, alpha, x)
}

/// `x -> I^alpha_{a+} f (x)` over an interval, as a function.
pub fn left_integral_fn<F: Func1D>(f: F, iv: Interval, alpha: FracOrder, nodes: usize) -> LeftIntegral<F> {
    LeftIntegral {
        f,
        a: iv.a,
        alpha: alpha.value(),
        nodes,
    }
}

/// `x -> I^alpha_{b-} f (x)`, built as reflect . left integral . reflect.
pub fn right_integral_fn<F: Func1D>(
    f: F,
    iv: Interval,
    alpha: FracOrder,
    nodes: usize,
) -> Reflected<LeftIntegral<Reflected<F>>> {
    Reflected::new(left_integral_fn(Reflected::new(f, iv), iv, alpha, nodes), iv)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    IntLeft,
    IntRight,
    DerivLeft,
    DerivRight,
}

/// Exact RL image of (t-a)^{beta-1} (left kinds) or (b-t)^{beta-1} (right kinds).
pub fn rl_power_oracle(iv: Interval, beta: Cx, alpha: FracOrder, kind: Kind, x: f64) -> Result<Cx> {
    if !(beta.re > 0.0) {
        return Err(Error::Parameter(format!("power oracle needs Re(beta) > 0, got {beta}")));
    }
    let base = match kind {
        Kind::IntLeft | Kind::DerivLeft => {
            check_left(&iv, x)?;
            x - iv.a
        }
        Kind::IntRight | Kind::DerivRight => {
            check_right(&iv, x)?;
            iv.b - x
        }
    };
    let a = alpha.value();
    let gb = gamma(beta)?;
    Ok(match kind {
        Kind::IntLeft | Kind::IntRight => gb * rgamma(beta + a) * rpow(base, beta + a - 1.0),
        Kind::DerivLeft | Kind::DerivRight => gb * rgamma(beta - a) * rpow(base, beta - a - 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c0(v: BiQuat) -> Cx {
        v.coeffs()[0]
    }

    fn one() -> Const1D {
        Const1D(BiQuat::ONE)
    }

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn half() -> FracOrder {
        FracOrder::real(0.5).unwrap()
    }

    #[test]
    fn order_gate() {
        assert!(FracOrder::real(0.0).is_err());
        assert!(FracOrder::real(1.0).is_err());
        assert!(FracOrder::real(1.2).is_err());
        assert!(FracOrder::new(Cx::new(0.3, 5.0)).is_ok());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn constant_half_order() {
        let v = rl_integral_left(&one(), unit(), half(), 1.0).unwrap();
        assert!((c0(v) - 2.0 / PI.sqrt()).norm() < 1e-13);
        let d = rl_deriv_left(&one(), unit(), half(), 1.0).unwrap();
        assert!((c0(d) - 1.0 / PI.sqrt()).norm() < 1e-13);
        let r = rl_integral_right(&one(), unit(), half(), 0.0).unwrap();
        assert!((c0(r) - 2.0 / PI.sqrt()).norm() < 1e-13);
        let dr = rl_deriv_right(&one(), unit(), half(), 0.0).unwrap();
        assert!((c0(dr) - 1.0 / PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn identity_function() {
        let f = Func::scalar(|t| Cx::new(t, 0.0)).with_scalar_deriv(|_| Cx::new(1.0, 0.0));
        let v = rl_integral_left(&f, unit(), half(), 1.0).unwrap();
        assert!((c0(v) - 4.0 / (3.0 * PI.sqrt())).norm() < 1e-13);
        let d = rl_deriv_left(&f, unit(), half(), 1.0).unwrap();
        assert!((c0(d) - 2.0 / PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn zero_function() {
        let z = Const1D(BiQuat::ZERO);
        for x in [0.3, 1.0] {
            assert_eq!(rl_integral_left(&z, unit(), half(), x).unwrap(), BiQuat::ZERO);
            assert_eq!(rl_deriv_left(&z, unit(), half(), x).unwrap(), BiQuat::ZERO);
        }
        assert_eq!(rl_integral_right(&z, unit(), half(), 0.2).unwrap(), BiQuat::ZERO);
        assert_eq!(rl_deriv_right(&z, unit(), half(), 0.2).unwrap(), BiQuat::ZERO);
    }

    #[test]
    fn domain_errors() {
        assert!(rl_integral_left(&one(), unit(), half(), 0.0).is_err());
        assert!(rl_deriv_left(&one(), unit(), half(), -0.1).is_err());
        assert!(rl_integral_right(&one(), unit(), half(), 1.0).is_err());
        assert!(rl_deriv_right(&one(), unit(), half(), 1.5).is_err());
        assert!(RlOperator::new(1).is_err());
    }

    #[test]
    fn oracle_examples() {
        let o = rl_power_oracle(unit(), Cx::new(1.0, 0.0), half(), Kind::DerivLeft, 1.0).unwrap();
        assert!((o - 1.0 / PI.sqrt()).norm() < 1e-14);
        let o = rl_power_oracle(unit(), Cx::new(2.0, 0.0), half(), Kind::IntLeft, 1.0).unwrap();
        assert!((o - 4.0 / (3.0 * PI.sqrt())).norm() < 1e-14);
        assert!(rl_power_oracle(unit(), Cx::new(-1.0, 0.0), half(), Kind::IntLeft, 1.0).is_err());
    }

    #[test]
    fn fundamental_theorem_square() {
        let f = Func::scalar(|t| Cx::new(t * t, 0.0)).with_scalar_deriv(|t| Cx::new(2.0 * t, 0.0));
        let iv = unit();
        let alpha = FracOrder::new(Cx::new(0.3, 0.2)).unwrap();
        let g = left_integral_fn(&f, iv, alpha, DEFAULT_FRAC_NODES);
        let v = rl_deriv_left(&g, iv, alpha, 0.7).unwrap();
        assert!((c0(v) - 0.49).norm() < 1e-6);
        let f = Func::scalar(|t| Cx::new(t, 0.0)).with_scalar_deriv(|_| Cx::new(1.0, 0.0));
        let g = right_integral_fn(&f, iv, half(), DEFAULT_FRAC_NODES);
        let v = rl_deriv_right(&g, iv, half(), 0.25).unwrap();
        assert!((c0(v) - 0.25).norm() < 1e-6);
    }

    #[test]
    fn reflection_identity() {
        let f = Func::scalar(|t| Cx::new(t * t, 0.0)).with_scalar_deriv(|t| Cx::new(2.0 * t, 0.0));
        let iv = Interval::new(-0.5, 1.5).unwrap();
        let alpha = FracOrder::new(Cx::new(0.4, -0.3)).unwrap();
        let x = 0.37;
        let right = rl_integral_right(&f, iv, alpha, x).unwrap();
        let g = Func::scalar(|t| Cx::new((1.0 - t) * (1.0 - t), 0.0));
        let left = rl_integral_left(&g, iv, alpha, 1.0 - x).unwrap();
        assert!((right - left).norm() < 1e-9);
    }

    #[test]
    fn decomposed_and_plain_paths_agree() {
        let p = Power1D::new(0.0, Cx::new(2.0, 0.0));
        let alpha = FracOrder::new(Cx::new(0.3, 0.2)).unwrap();
        let a = rl_deriv_left(&p, unit(), alpha, 0.8).unwrap();
        let b = rl_deriv_left(&Plain(p), unit(), alpha, 0.8).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn quaternion_valued_linearity() {
        use crate::quat::Quaternion;
        let c = BiQuat::new(Quaternion::new(1.0, -2.0, 0.5, 3.0), Quaternion::new(0.0, 1.0, 0.0, -1.0));
        let f = Func::new(move |t| c.scale_re(t.exp())).with_deriv(move |t| c.scale_re(t.exp()));
        let g = Func::scalar(|t| Cx::new(t.exp(), 0.0)).with_scalar_deriv(|t| Cx::new(t.exp(), 0.0));
        let alpha = FracOrder::new(Cx::new(0.6, 0.1)).unwrap();
        let lhs = rl_deriv_left(&f, unit(), alpha, 0.6).unwrap();
        let rhs = c * rl_deriv_left(&g, unit(), alpha, 0.6).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
}
