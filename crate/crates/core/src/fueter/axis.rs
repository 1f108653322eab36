//! Fields of the form `q -> sum_m L_m Op_m[P_m f o S_m](q_m) R_m`, where each
//! term applies a one-dimensional operator along one coordinate of q with the
//! remaining coordinates taken from the base point xi.

use crate::error::{Error, Result};
use crate::field::{Component, Field};
use crate::frac1d::{
    left_deriv_raw, left_integral_raw, Const1D, Func1D, LeftDerivative, LeftIntegral, PowerTerm,
    Scaled, Sum1D,
};
use crate::gamma::rgamma;
use crate::geometry::Point4;
use crate::quadrature::{rpow, singular_rule};
use crate::quat::{BiQuat, Cx};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisOp {
    /// Left RL integral of the given order.
    Integral(Cx),
    /// Left RL derivative of the given order.
    Derivative(Cx),
    /// `(1/e) int_a^x g(t) (x-t)^alpha / Gamma(alpha) dt` with e = x - a.
    Weighted(Cx),
}

/// Pointwise projection applied to f before the operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Proj {
    Full,
    /// `re * Re(f_c) + im * Im(f_c)` for the chosen component f_c, as a C(I) scalar.
    Part { comp: Component, re: f64, im: f64 },
}

impl Proj {
    pub fn apply(&self, v: BiQuat) -> BiQuat {
        match *self {
            Proj::Full => v,
            Proj::Part { comp, re, im } => {
                let (f1, f2) = v.split();
                let c = match comp {
                    Component::F1 => f1,
                    Component::F2 => f2,
                };
                BiQuat::scalar(c.re * re + c.im * im)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisTerm {
    pub axis: usize,
    pub op: AxisOp,
    pub proj: Proj,
    pub left: BiQuat,
    pub right: BiQuat,
}

impl AxisTerm {
    pub fn new(axis: usize, op: AxisOp) -> Self {
        AxisTerm {
            axis,
            op,
            proj: Proj::Full,
            left: BiQuat::ONE,
            right: BiQuat::ONE,
        }
    }

    pub fn proj(mut self, p: Proj) -> Self {
        self.proj = p;
        self
    }

    pub fn left(mut self, u: BiQuat) -> Self {
        self.left = u;
        self
    }

    pub fn right(mut self, u: BiQuat) -> Self {
        self.right = u;
        self
    }
}

/// Projection applied to a one-dimensional function, keeping its decomposition.
struct Projected<'a> {
    inner: Box<dyn Func1D + 'a>,
    proj: Proj,
}

impl Func1D for Projected<'_> {
    fn eval(&self, t: f64) -> Result<BiQuat> {
        Ok(self.proj.apply(self.inner.eval(t)?))
    }
    fn deriv(&self, t: f64) -> Option<Result<BiQuat>> {
        self.inner.deriv(t).map(|r| r.map(|v| self.proj.apply(v)))
    }
    fn power_terms(&self) -> Option<(f64, Vec<PowerTerm<'_>>)> {
        if self.proj == Proj::Full {
            return self.inner.power_terms();
        }
        let (origin, terms) = self.inner.power_terms()?;
        let proj = self.proj;
        Some((
            origin,
            terms
                .into_iter()
                .map(|t| PowerTerm {
                    gamma: t.gamma,
                    regular: std::sync::Arc::new(Projected {
                        inner: Box::new(t.regular),
                        proj,
                    }) as std::sync::Arc<dyn Func1D + '_>,
                })
                .collect(),
        ))
    }
}

/// `x -> (1/e) int_a^x g(t) (x-t)^alpha dt / Gamma(alpha)`.
fn weighted_raw<G: Func1D + ?Sized>(g: &G, a: f64, alpha: Cx, x: f64, nodes: usize) -> Result<BiQuat> {
    let e = x - a;
    if e < 0.0 {
        return Err(Error::PointOutOfRange { x, a, b: f64::INFINITY });
    }
    if e == 0.0 {
        return Ok(BiQuat::ZERO);
    }
    let rule = singular_rule(nodes, alpha + 1.0)?;
    let v = rule.apply(|u| g.eval(x - e * u))?;
    Ok(v.scale(rpow(e, alpha) * rgamma(alpha)))
}

struct WeightedFn<'a> {
    g: Box<dyn Func1D + 'a>,
    a: f64,
    alpha: Cx,
    nodes: usize,
}

impl Func1D for WeightedFn<'_> {
    fn eval(&self, x: f64) -> Result<BiQuat> {
        weighted_raw(&*self.g, self.a, self.alpha, x, self.nodes)
    }
}

struct Failing(Error);

impl Func1D for Failing {
    fn eval(&self, _t: f64) -> Result<BiQuat> {
        Err(self.0.clone())
    }
}

pub struct AxisOperatorField<'a> {
    pub f: &'a dyn Field,
    pub xi: Point4,
    pub a: Point4,
    pub terms: Vec<AxisTerm>,
    pub nodes: usize,
}

impl<'a> AxisOperatorField<'a> {
    pub fn new(f: &'a dyn Field, xi: Point4, a: Point4, terms: Vec<AxisTerm>, nodes: usize) -> Self {
        AxisOperatorField { f, xi, a, terms, nodes }
    }

    fn source_line(&self, axis: usize, proj: Proj) -> Projected<'a> {
        Projected {
            inner: self.f.line(self.xi, axis),
            proj,
        }
    }

    /// Value of one term at coordinate x of its axis.
    pub fn term_value(&self, t: &AxisTerm, x: f64) -> Result<BiQuat> {
        let g = self.source_line(t.axis, t.proj);
        let a = self.a[t.axis];
        let v = match t.op {
            AxisOp::Integral(alpha) => left_integral_raw(&g, a, alpha, x, self.nodes),
            AxisOp::Derivative(alpha) => left_deriv_raw(&g, a, alpha, x, self.nodes),
            AxisOp::Weighted(alpha) => weighted_raw(&g, a, alpha, x, self.nodes),
        }
        .map_err(|e| e.at(format!("axis {} at {x}", t.axis)))?;
        Ok(t.left * v * t.right)
    }

    pub fn term_values(&self, q: Point4) -> Result<Vec<BiQuat>> {
        self.terms.iter().map(|t| self.term_value(t, q[t.axis])).collect()
    }
}

impl Field for AxisOperatorField<'_> {
    fn eval(&self, q: Point4) -> Result<BiQuat> {
        let mut acc = BiQuat::ZERO;
        for t in &self.terms {
            acc += self.term_value(t, q[t.axis])?;
        }
        Ok(acc)
    }

    fn line(&self, base: Point4, axis: usize) -> Box<dyn Func1D + '_> {
        let mut parts: Vec<Box<dyn Func1D + '_>> = Vec::new();
        let mut fixed = BiQuat::ZERO;
        for t in &self.terms {
            if t.axis != axis {
                match self.term_value(t, base[t.axis]) {
                    Ok(v) => fixed += v,
                    Err(e) => return Box::new(Failing(e)),
                }
                continue;
            }
            let g = self.source_line(axis, t.proj);
            let a = self.a[axis];
            let nodes = self.nodes;
            let op: Box<dyn Func1D + '_> = match t.op {
                AxisOp::Integral(alpha) => Box::new(LeftIntegral { f: g, a, alpha, nodes }),
                AxisOp::Derivative(alpha) => Box::new(LeftDerivative { f: g, a, alpha, nodes }),
                AxisOp::Weighted(alpha) => Box::new(WeightedFn {
                    g: Box::new(g),
                    a,
                    alpha,
                    nodes,
                }),
            };
            parts.push(Box::new(Scaled {
                f: op,
                left: t.left,
                right: t.right,
            }));
        }
        parts.push(Box::new(Const1D(fixed)));
        Box::new(Sum1D { parts })
    }
}
