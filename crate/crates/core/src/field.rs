//! Fields f: R^4 -> H(C(I)) with optional exact partials, and a few concrete
//! families (constants, polynomials in z1, conj z1, z2, conj z2, exponentials).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::frac1d::Func1D;
use crate::geometry::Point4;
use crate::quat::{BiQuat, Bicomplex, Quaternion};

pub trait Field: Send + Sync {
    fn eval(&self, x: Point4) -> Result<BiQuat>;

    /// Exact first partial along `axis`, if known.
    fn partial(&self, _axis: usize, _x: Point4) -> Option<Result<BiQuat>> {
        None
    }

    /// The function `t -> f(base with coordinate axis = t)`.
    ///
    /// Fields built from one-dimensional fractional operators override this
    /// to expose their endpoint decomposition.
    fn line(&self, base: Point4, axis: usize) -> Box<dyn Func1D + '_> {
        Box::new(AxisLine { f: self, base, axis })
    }
}

/// Step used when a field has no exact partial.
pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Exact partial when available, otherwise a central difference.
pub fn partial<F: Field + ?Sized>(f: &F, axis: usize, x: Point4) -> Result<BiQuat> {
    if let Some(p) = f.partial(axis, x) {
        return p;
    }
    let h = fd_step(x[axis]);
    let mut xp = x;
    let mut xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    Ok((f.eval(xp)? - f.eval(xm)?).scale_re(0.5 / h))
}

pub fn with_coord(mut x: Point4, axis: usize, t: f64) -> Point4 {
    x[axis] = t;
    x
}

/// Restriction of a field to a coordinate line.
pub struct AxisLine<'a, F: ?Sized> {
    pub f: &'a F,
    pub base: Point4,
    pub axis: usize,
}

impl<F: Field + ?Sized> Func1D for AxisLine<'_, F> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        self.f.eval(with_coord(self.base, self.axis, t))
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        self.f.partial(self.axis, with_coord(self.base, self.axis, t))
    }
}

impl<T: Field + ?Sized> Field for &T {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        (**self).eval(x)
    }
    fn partial(&self, axis: usize, x: Point4) -> Option<Result<BiQuat>> {
        (**self).partial(axis, x)
    }
    fn line(&self, base: Point4, axis: usize) -> Box<dyn Func1D + '_> {
        (**self).line(base, axis)
    }
}

impl<T: Field + ?Sized> Field for Box<T> {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        (**self).eval(x)
    }
    fn partial(&self, axis: usize, x: Point4) -> Option<Result<BiQuat>> {
        (**self).partial(axis, x)
    }
    fn line(&self, base: Point4, axis: usize) -> Box<dyn Func1D + '_> {
        (**self).line(base, axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstField(pub BiQuat);

impl Field for ConstField {
    fn eval(&self, _x: Point4) -> Result<BiQuat> {
        Ok(self.0)
    }
    fn partial(&self, _axis: usize, _x: Point4) -> Option<Result<BiQuat>> {
        Some(Ok(BiQuat::ZERO))
    }
}

/// `sum_e c_e x^e` with H(C(I)) coefficients on the left of real monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly4 {
    terms: BTreeMap<[u32; 4], BiQuat>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// (x_a + s i x_b)^p as a map exponent -> C(i) coefficient.
fn complex_linear_power(p: u32, a: usize, b: usize, s: f64) -> BTreeMap<[u32; 4], Complex64> {
    let mut out = BTreeMap::new();
    for k in 0..=p {
        let mut e = [0u32; 4];
        e[a] = p - k;
        e[b] = k;
        let c = Complex64::new(0.0, s).powu(k) * binomial(p, k);
        out.insert(e, c);
    }
    out
}

fn cmul(
    p: &BTreeMap<[u32; 4], Complex64>,
    q: &BTreeMap<[u32; 4], Complex64>,
) -> BTreeMap<[u32; 4], Complex64> {
    let mut out: BTreeMap<[u32; 4], Complex64> = BTreeMap::new();
    for (ea, ca) in p {
        for (eb, cb) in q {
            let e = std::array::from_fn(|k| ea[k] + eb[k]);
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out
}

impl Poly4 {
    pub fn zero() -> Self {
        Poly4::default()
    }

    pub fn constant(c: BiQuat) -> Self {
        Poly4::monomial(c, [0; 4])
    }

    /// `c * x0^e0 x1^e1 x2^e2 x3^e3`.
    pub fn monomial(c: BiQuat, e: [u32; 4]) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(e, c);
        Poly4 { terms }
    }

    /// `c * z1^p0 conj(z1)^p1 z2^p2 conj(z2)^p3` with z1 = x0 + i x1, z2 = x2 + i x3.
    pub fn z_monomial(c: BiQuat, p: [u32; 4]) -> Self {
        let factors = [
            complex_linear_power(p[0], 0, 1, 1.0),
            complex_linear_power(p[1], 0, 1, -1.0),
            complex_linear_power(p[2], 2, 3, 1.0),
            complex_linear_power(p[3], 2, 3, -1.0),
        ];
        let mut acc = BTreeMap::from([([0u32; 4], Complex64::new(1.0, 0.0))]);
        for f in &factors {
            acc = cmul(&acc, f);
        }
        let mut terms = BTreeMap::new();
        for (e, z) in acc {
            if z != Complex64::new(0.0, 0.0) {
                terms.insert(e, c * BiQuat::real(Quaternion::from_ci(z)));
            }
        }
        Poly4 { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &BiQuat)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly4) -> Poly4 {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(*e).or_default() += *c;
        }
        Poly4 { terms }
    }

    /// Product with coefficients multiplied in the order self * other.
    pub fn mul(&self, other: &Poly4) -> Poly4 {
        let mut terms: BTreeMap<[u32; 4], BiQuat> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = std::array::from_fn(|k| ea[k] + eb[k]);
                *terms.entry(e).or_default() += *ca * *cb;
            }
        }
        Poly4 { terms }
    }

    pub fn scale_left(&self, c: BiQuat) -> Poly4 {
        Poly4 {
            terms: self.terms.iter().map(|(e, v)| (*e, c * *v)).collect(),
        }
    }

    pub fn derivative(&self, axis: usize) -> Poly4 {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut d = *e;
                d[axis] -= 1;
                terms.insert(d, c.scale_re(e[axis] as f64));
            }
        }
        Poly4 { terms }
    }

    fn eval_at(&self, x: Point4) -> BiQuat {
        let mut acc = BiQuat::ZERO;
        for (e, c) in &self.terms {
            let m: f64 = (0..4).map(|k| x[k].powi(e[k] as i32)).product();
            acc += c.scale_re(m);
        }
        acc
    }
}

impl Field for Poly4 {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        Ok(self.eval_at(x))
    }
    fn partial(&self, axis: usize, x: Point4) -> Option<Result<BiQuat>> {
        let mut acc = BiQuat::ZERO;
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let m: f64 = (0..4)
                .map(|k| {
                    if k == axis {
                        e[k] as f64 * x[k].powi(e[k] as i32 - 1)
                    } else {
                        x[k].powi(e[k] as i32)
                    }
                })
                .product();
            acc += c.scale_re(m);
        }
        Some(Ok(acc))
    }
}

/// `coeff * exp(rate . x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpField {
    pub coeff: BiQuat,
    pub rate: Point4,
}

impl Field for ExpField {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        let s: f64 = (0..4).map(|k| self.rate[k] * x[k]).sum();
        Ok(self.coeff.scale_re(s.exp()))
    }
    fn partial(&self, axis: usize, x: Point4) -> Option<Result<BiQuat>> {
        let s: f64 = (0..4).map(|k| self.rate[k] * x[k]).sum();
        Some(Ok(self.coeff.scale_re(self.rate[axis] * s.exp())))
    }
}

type PointFn = Box<dyn Fn(Point4) -> BiQuat + Send + Sync>;
type PartialFn = Box<dyn Fn(usize, Point4) -> BiQuat + Send + Sync>;

/// Closure-backed field.
pub struct FnField {
    f: PointFn,
    d: Option<PartialFn>,
}

impl FnField {
    pub fn new(f: impl Fn(Point4) -> BiQuat + Send + Sync + 'static) -> Self {
        FnField {
            f: Box::new(f),
            d: None,
        }
    }

    pub fn with_partials(mut self, d: impl Fn(usize, Point4) -> BiQuat + Send + Sync + 'static) -> Self {
        self.d = Some(Box::new(d));
        self
    }
}

impl Field for FnField {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        Ok((self.f)(x))
    }
    fn partial(&self, axis: usize, x: Point4) -> Option<Result<BiQuat>> {
        self.d.as_ref().map(|d| Ok(d(axis, x)))
    }
}

/// Borrowing, fallible closure as a field.
pub struct FieldFn<F>(pub F);

impl<F: Fn(Point4) -> Result<BiQuat> + Send + Sync> Field for FieldFn<F> {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        (self.0)(x)
    }
}

/// Which C(i)-component of `f = f1 + f2 j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    F1,
    F2,
}

/// `x -> f1(x)` or `x -> f2(x)`, as an element of C(i)(C(I)) embedded in H(C(I)).
pub struct ComponentField<F> {
    pub f: F,
    pub which: Component,
}

fn pick(v: BiQuat, which: Component) -> BiQuat {
    let (f1, f2) = v.split();
    BiQuat::from(match which {
        Component::F1 => f1,
        Component::F2 => f2,
    })
}

impl<F: Field> Field for ComponentField<F> {
    fn eval(&self, x: Point4) -> Result<BiQuat> {
        Ok(pick(self.f.eval(x)?, self.which))
    }
    fn partial(&self, axis: usize, x: Point4) -> Option<Result<BiQuat>> {
        self.f.partial(axis, x).map(|r| r.map(|v| pick(v, self.which)))
    }
}

/// The C(i)(C(I)) part of a value (coefficients of 1 and i).
pub fn ci_part(v: BiQuat) -> Bicomplex {
    v.split().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Cx;

    #[test]
    fn z_monomial_matches_complex_arithmetic() {
        let p = Poly4::z_monomial(BiQuat::ONE, [2, 1, 1, 0]);
        let x = [0.3, -0.7, 1.1, 0.4];
        let z1 = Complex64::new(x[0], x[1]);
        let z2 = Complex64::new(x[2], x[3]);
        let want = z1 * z1 * z1.conj() * z2;
        let got = p.eval(x).unwrap();
        assert!((got - BiQuat::real(Quaternion::from_ci(want))).norm() < 1e-14);
    }

    #[test]
    fn exact_partials_match_differences() {
        let c = BiQuat::new(Quaternion::new(1.0, 2.0, -1.0, 0.5), Quaternion::new(0.0, 0.3, 0.0, -0.2));
        let p = Poly4::z_monomial(c, [1, 0, 2, 1]).add(&Poly4::monomial(BiQuat::ONE, [0, 3, 0, 1]));
        let e = ExpField {
            coeff: c,
            rate: [0.5, -1.0, 0.2, 0.1],
        };
        let x = [0.2, 0.5, -0.3, 0.8];
        for axis in 0..4 {
            let h = 1e-5;
            for f in [&p as &dyn Field, &e] {
                let fd = (f.eval(with_coord(x, axis, x[axis] + h)).unwrap()
                    - f.eval(with_coord(x, axis, x[axis] - h)).unwrap())
                .scale_re(0.5 / h);
                let ex = f.partial(axis, x).unwrap().unwrap();
                assert!((fd - ex).norm() < 1e-8, "axis {axis}");
            }
        }
    }

    #[test]
    fn product_keeps_coefficient_order() {
        let pi = Poly4::constant(BiQuat::real(Quaternion::I));
        let pj = Poly4::constant(BiQuat::real(Quaternion::J));
        let v = pi.mul(&pj).eval([0.0; 4]).unwrap();
        assert_eq!(v, BiQuat::real(Quaternion::K));
    }

    #[test]
    fn components() {
        let v = BiQuat::from_coeffs([Cx::new(1.0, 2.0), Cx::new(3.0, 0.0), Cx::new(-1.0, 0.5), Cx::new(0.0, 1.0)]);
        let f = ConstField(v);
        let f1 = ComponentField { f, which: Component::F1 }.eval([0.0; 4]).unwrap();
        let f2 = ComponentField { f, which: Component::F2 }.eval([0.0; 4]).unwrap();
        assert_eq!(f1 + f2 * BiQuat::real(Quaternion::J), v);
    }
}
