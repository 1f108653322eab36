//! Fractional theta-Fueter operators built from Riemann-Liouville operators
//! along the coordinates of q, the fractional antiderivatives, the averaged
//! integral over J_a^q, and the related Cauchy-Riemann residuals.

mod axis;
pub mod classical;

pub use axis::{AxisOp, AxisOperatorField, AxisTerm, Proj};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Component, ComponentField, Field};
use crate::frac1d::{left_deriv_raw, FracOrder, DEFAULT_FRAC_NODES};
use crate::gamma::rgamma;
use crate::geometry::{box_integral, Point4, Rect4, Rule};
use crate::quadrature::rpow;
use crate::quat::{BiQuat, Bicomplex, Cx, Quaternion, StructuralSet};

/// Order vector (alpha_0, ..., alpha_3), each entry gated like [`FracOrder`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracOrder4 {
    pub orders: [FracOrder; 4],
}

impl FracOrder4 {
    pub fn new(alpha: [Cx; 4]) -> Result<Self> {
        let mut orders = [FracOrder::real(0.5)?; 4];
        for (k, a) in alpha.iter().enumerate() {
            orders[k] = FracOrder::new(*a).map_err(|e| e.at(format!("alpha_{k}")))?;
        }
        Ok(FracOrder4 { orders })
    }

    pub fn real(alpha: [f64; 4]) -> Result<Self> {
        FracOrder4::new(alpha.map(|a| Cx::new(a, 0.0)))
    }

    pub fn uniform(alpha: Cx) -> Result<Self> {
        FracOrder4::new([alpha; 4])
    }

    pub fn values(&self) -> [Cx; 4] {
        self.orders.map(|o| o.value())
    }

    pub fn get(&self, k: usize) -> Cx {
        self.orders[k].value()
    }

    /// alpha + beta, requiring 0 < Re(alpha_l + beta_l) < 1.
    pub fn compose(&self, beta: &FracOrder4) -> Result<[Cx; 4]> {
        let mut out = [Cx::new(0.0, 0.0); 4];
        for axis in 0..4 {
            let g = self.get(axis) + beta.get(axis);
            if !(g.re > 0.0 && g.re < 1.0) {
                return Err(Error::CompositionGate { axis, re: g.re });
            }
            out[axis] = g;
        }
        Ok(out)
    }
}

/// The fixed point xi inside the box J_a^b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub xi: Point4,
    pub rect: Rect4,
}

impl BasePoint {
    pub fn new(xi: Point4, rect: Rect4) -> Result<Self> {
        if !rect.contains(xi) {
            return Err(Error::InvalidPoint(format!(
                "base point {xi:?} is not strictly inside the box"
            )));
        }
        Ok(BasePoint { xi, rect })
    }

    pub fn a(&self) -> Point4 {
        self.rect.lo
    }

    /// Edge lengths e_l = q_l - a_l of J_a^q.
    pub fn edges_to(&self, q: Point4) -> Point4 {
        std::array::from_fn(|k| q[k] - self.rect.lo[k])
    }

    /// q with coordinate `axis` kept and the others taken from xi.
    pub fn shift(&self, q: Point4, axis: usize) -> Point4 {
        let mut p = self.xi;
        p[axis] = q[axis];
        p
    }

    /// Like [`BasePoint::check_above`] but admits coordinates equal to a.
    pub fn check_at_or_above(&self, q: Point4) -> Result<()> {
        for k in 0..4 {
            if !(q[k] >= self.rect.lo[k]) {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {k} of q = {} is below a_{k} = {}",
                    q[k], self.rect.lo[k]
                )));
            }
        }
        Ok(())
    }

    pub fn check_above(&self, q: Point4) -> Result<()> {
        for k in 0..4 {
            if !(q[k] > self.rect.lo[k]) {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {k} of q = {} is not above a_{k} = {}",
                    q[k], self.rect.lo[k]
                )));
            }
        }
        Ok(())
    }
}

/// Which argument the last term of the composition display uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LastTermVariant {
    /// The axis-3 derivative evaluated at Im z1, as displayed.
    #[default]
    AsPrinted,
    /// The axis-3 derivative evaluated at Im z2.
    Consistent,
}

/// Shared parameters of the fractional operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracContext {
    pub base: BasePoint,
    pub s: StructuralSet,
    pub nodes: usize,
}

fn bq(q: Quaternion) -> BiQuat {
    BiQuat::real(q)
}

fn unit_i() -> BiQuat {
    bq(Quaternion::I)
}

fn unit_j() -> BiQuat {
    bq(Quaternion::J)
}

fn bicomplex_part(v: BiQuat) -> Bicomplex {
    v.split().0
}

impl FracContext {
    pub fn new(base: BasePoint, s: StructuralSet) -> Self {
        FracContext {
            base,
            s,
            nodes: DEFAULT_FRAC_NODES,
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn field<'a>(&self, f: &'a dyn Field, terms: Vec<AxisTerm>) -> AxisOperatorField<'a> {
        AxisOperatorField::new(f, self.base.xi, self.base.a(), terms, self.nodes)
    }

    fn deriv_terms(alpha: &FracOrder4, units: [(usize, BiQuat, BiQuat); 4]) -> Vec<AxisTerm> {
        units
            .iter()
            .map(|&(axis, l, r)| AxisTerm::new(axis, AxisOp::Derivative(alpha.get(axis))).left(l).right(r))
            .collect()
    }

    /// `D0 + i D1` on the z1 coordinates.
    pub fn d_a1_terms(a0: FracOrder, a1: FracOrder) -> Vec<AxisTerm> {
        vec![
            AxisTerm::new(0, AxisOp::Derivative(a0.value())),
            AxisTerm::new(1, AxisOp::Derivative(a1.value())).left(unit_i()),
        ]
    }

    /// `D2 + i D3` on the z2 coordinates.
    pub fn d_a2_terms(a2: FracOrder, a3: FracOrder) -> Vec<AxisTerm> {
        vec![
            AxisTerm::new(2, AxisOp::Derivative(a2.value())),
            AxisTerm::new(3, AxisOp::Derivative(a3.value())).left(unit_i()),
        ]
    }

    /// `D0 + D1 i` (right units).
    pub fn d_r_a1_terms(b0: FracOrder, b1: FracOrder) -> Vec<AxisTerm> {
        vec![
            AxisTerm::new(0, AxisOp::Derivative(b0.value())),
            AxisTerm::new(1, AxisOp::Derivative(b1.value())).right(unit_i()),
        ]
    }

    /// `D2 - D3 i` (right units).
    pub fn d_r_a2_terms(b2: FracOrder, b3: FracOrder) -> Vec<AxisTerm> {
        vec![
            AxisTerm::new(2, AxisOp::Derivative(b2.value())),
            AxisTerm::new(3, AxisOp::Derivative(b3.value())).right(-unit_i()),
        ]
    }

    pub fn fueter_terms(&self, alpha: &FracOrder4) -> Vec<AxisTerm> {
        let p = self.s.basis().map(bq);
        Self::deriv_terms(
            alpha,
            [(0, p[0], BiQuat::ONE), (1, p[1], BiQuat::ONE), (2, p[2], BiQuat::ONE), (3, p[3], BiQuat::ONE)],
        )
    }

    pub fn fueter_right_terms(&self, beta: &FracOrder4) -> Vec<AxisTerm> {
        let p = self.s.basis().map(bq);
        Self::deriv_terms(
            beta,
            [(0, BiQuat::ONE, p[0]), (1, BiQuat::ONE, p[1]), (2, BiQuat::ONE, p[2]), (3, BiQuat::ONE, p[3])],
        )
    }

    pub fn fueter_conj_terms(&self, alpha: &FracOrder4) -> Vec<AxisTerm> {
        let p = self.s.basis().map(bq);
        Self::deriv_terms(
            alpha,
            [(0, p[0], BiQuat::ONE), (1, -p[1], BiQuat::ONE), (2, -p[2], BiQuat::ONE), (3, -p[3], BiQuat::ONE)],
        )
    }

    /// Terms of the first fractional antiderivative acting on component `comp`.
    pub fn j_a1_terms(a0: FracOrder, a1: FracOrder, comp: Component, right: BiQuat) -> Vec<AxisTerm> {
        vec![
            AxisTerm::new(0, AxisOp::Integral(a0.value()))
                .proj(Proj::Part { comp, re: 1.0, im: 0.0 })
                .right(right),
            AxisTerm::new(1, AxisOp::Integral(a1.value()))
                .proj(Proj::Part { comp, re: 0.0, im: 1.0 })
                .right(right),
        ]
    }

    /// Terms of the second antiderivative, with the theta-dependent mixing of Re and Im.
    pub fn j_a2_terms(&self, a2: FracOrder, a3: FracOrder, comp: Component, right: BiQuat) -> Vec<AxisTerm> {
        let (s, c) = self.s.theta.sin_cos();
        vec![
            AxisTerm::new(2, AxisOp::Integral(a2.value()))
                .proj(Proj::Part { comp, re: -s, im: c })
                .right(right),
            AxisTerm::new(3, AxisOp::Integral(a3.value()))
                .proj(Proj::Part { comp, re: c, im: s })
                .right(right),
        ]
    }

    /// `J_a1[f1] + J_a2[f2] j`, as defined.
    pub fn j_terms(&self, alpha: &FracOrder4) -> Vec<AxisTerm> {
        self.j_terms_with(alpha, unit_j())
    }

    /// Same with `trailing` in place of the unit j after the second block.
    pub fn j_terms_with(&self, alpha: &FracOrder4, trailing: BiQuat) -> Vec<AxisTerm> {
        let o = alpha.orders;
        let mut t = Self::j_a1_terms(o[0], o[1], Component::F1, BiQuat::ONE);
        t.extend(self.j_a2_terms(o[2], o[3], Component::F2, trailing));
        t
    }

    pub fn cal_i_terms(alpha: &FracOrder4) -> Vec<AxisTerm> {
        (0..4).map(|k| AxisTerm::new(k, AxisOp::Weighted(alpha.get(k)))).collect()
    }

    fn eval_terms(&self, f: &dyn Field, q: Point4, terms: Vec<AxisTerm>) -> Result<BiQuat> {
        self.base.check_above(q)?;
        self.field(f, terms).eval(q)
    }

    pub fn frac_d_a1(&self, f: &dyn Field, q: Point4, a0: FracOrder, a1: FracOrder) -> Result<BiQuat> {
        self.eval_terms(f, q, Self::d_a1_terms(a0, a1))
    }

    pub fn frac_d_a2(&self, f: &dyn Field, q: Point4, a2: FracOrder, a3: FracOrder) -> Result<BiQuat> {
        self.eval_terms(f, q, Self::d_a2_terms(a2, a3))
    }

    pub fn frac_d_r_a1(&self, g: &dyn Field, q: Point4, b0: FracOrder, b1: FracOrder) -> Result<BiQuat> {
        self.eval_terms(g, q, Self::d_r_a1_terms(b0, b1))
    }

    pub fn frac_d_r_a2(&self, g: &dyn Field, q: Point4, b2: FracOrder, b3: FracOrder) -> Result<BiQuat> {
        self.eval_terms(g, q, Self::d_r_a2_terms(b2, b3))
    }

    pub fn frac_fueter_d(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        self.eval_terms(f, q, self.fueter_terms(alpha))
    }

    pub fn frac_fueter_d_right(&self, g: &dyn Field, q: Point4, beta: &FracOrder4) -> Result<BiQuat> {
        self.eval_terms(g, q, self.fueter_right_terms(beta))
    }

    pub fn frac_fueter_d_conj(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        self.eval_terms(f, q, self.fueter_conj_terms(alpha))
    }

    /// The operator recombined from the split f = f1 + f2 j:
    /// `(A1[f1] - w conj A2[f2]) + (A1[f2] + w conj A2[f1]) j`, w = i e^{i theta}.
    pub fn frac_fueter_d_split(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        let o = alpha.orders;
        let f1 = ComponentField { f, which: Component::F1 };
        let f2 = ComponentField { f, which: Component::F2 };
        let a1 = |g: &dyn Field| self.frac_d_a1(g, q, o[0], o[1]).map(bicomplex_part);
        let a2 = |g: &dyn Field| self.frac_d_a2(g, q, o[2], o[3]).map(bicomplex_part);
        let w = self.s.omega_bc();
        let first = a1(&f1)? - w * a2(&f2)?.conj_i();
        let second = a1(&f2)? + w * a2(&f1)?.conj_i();
        Ok(BiQuat::from_split(first, Bicomplex::ZERO) + BiQuat::from(second) * unit_j())
    }

    /// First antiderivative of a C(i)-valued g (its F1 part is used).
    pub fn frac_j_a1(&self, g: &dyn Field, q: Point4, a0: FracOrder, a1: FracOrder) -> Result<BiQuat> {
        self.eval_terms(g, q, Self::j_a1_terms(a0, a1, Component::F1, BiQuat::ONE))
    }

    pub fn frac_j_a2(&self, g: &dyn Field, q: Point4, a2: FracOrder, a3: FracOrder) -> Result<BiQuat> {
        self.eval_terms(g, q, self.j_a2_terms(a2, a3, Component::F1, BiQuat::ONE))
    }

    /// `J_a1[f1] + J_a2[f2] j`.
    pub fn frac_j(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        self.eval_terms(f, q, self.j_terms(alpha))
    }

    /// The averaged weighted integral over J_a^q, reduced to one dimension per axis.
    pub fn cal_i(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        self.eval_terms(f, q, Self::cal_i_terms(alpha))
    }

    /// The averaged integral on the closed box; a coordinate equal to a gives a
    /// zero contribution from that axis.
    pub fn cal_i_closed(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<BiQuat> {
        self.base.check_at_or_above(q)?;
        self.field(f, Self::cal_i_terms(alpha)).eval(q)
    }

    /// The same integral by direct 4-D tensor cubature over J_a^q.
    pub fn cal_i_cubature(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4, n: usize) -> Result<BiQuat> {
        let a = self.base.a();
        let r = Rect4::new(a, q)?;
        let al = alpha.values();
        let rg = al.map(rgamma);
        let integrand = |tau: Point4| -> Result<BiQuat> {
            let mut acc = BiQuat::ZERO;
            for k in 0..4 {
                let p = self.base.shift(tau, k);
                acc += f.eval(p)?.scale(rpow(q[k] - tau[k], al[k]) * rg[k]);
            }
            Ok(acc)
        };
        let v = box_integral(&integrand, r.lo, r.hi, n, Rule::GaussLegendre)?;
        Ok(v.scale_re(1.0 / r.measure()))
    }

    /// Display of the composition of two fractional operators.
    ///
    /// Signs (+, -, -, -), or all plus for the conjugate outer operator; the
    /// orders are alpha_l + beta_l.
    pub fn compose_dd(
        &self,
        f: &dyn Field,
        q: Point4,
        alpha: &FracOrder4,
        beta: &FracOrder4,
        conjugate: bool,
        variant: LastTermVariant,
    ) -> Result<BiQuat> {
        let signs = if conjugate { [1.0, 1.0, 1.0, 1.0] } else { [1.0, -1.0, -1.0, -1.0] };
        let v = self.compose_terms(f, q, alpha, beta, variant)?;
        Ok((0..4).fold(BiQuat::ZERO, |acc, k| acc + v[k].scale_re(signs[k])))
    }

    /// The four order-(alpha_l + beta_l) derivatives of the composition display.
    pub fn compose_terms(
        &self,
        f: &dyn Field,
        q: Point4,
        alpha: &FracOrder4,
        beta: &FracOrder4,
        variant: LastTermVariant,
    ) -> Result<[BiQuat; 4]> {
        let gamma = alpha.compose(beta)?;
        let a = self.base.a();
        let mut x = q;
        if variant == LastTermVariant::AsPrinted {
            x[3] = q[1];
        }
        let mut out = [BiQuat::ZERO; 4];
        for k in 0..4 {
            let line = f.line(self.base.xi, k);
            out[k] = left_deriv_raw(&line, a[k], gamma[k], x[k], self.nodes)
                .map_err(|e| e.at(format!("composition term {k}")))?;
        }
        Ok(out)
    }

    /// Block displays of the complex setting: block 1 gives `D^{g0} - D^{g1}`
    /// (or `+` when conjugate), block 2 gives `-D^{g2} - D^{g3}` (or `+ +`).
    #[allow(clippy::too_many_arguments)]
    pub fn compose_block(
        &self,
        f: &dyn Field,
        q: Point4,
        alpha: &FracOrder4,
        beta: &FracOrder4,
        block: usize,
        conjugate: bool,
        variant: LastTermVariant,
    ) -> Result<BiQuat> {
        let v = self.compose_terms(f, q, alpha, beta, variant)?;
        Ok(match (block, conjugate) {
            (1, false) => v[0] - v[1],
            (1, true) => v[0] + v[1],
            (_, false) => -v[2] - v[3],
            (_, true) => v[2] + v[3],
        })
    }

    /// `sum_l D^{alpha_l + beta_l}` along each coordinate (conjugate display).
    pub fn frac_laplacian(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4, beta: &FracOrder4) -> Result<BiQuat> {
        self.compose_dd(f, q, alpha, beta, true, LastTermVariant::Consistent)
    }

    /// The outer operator applied numerically to the inner one.
    pub fn compose_iterated(
        &self,
        f: &dyn Field,
        q: Point4,
        alpha: &FracOrder4,
        beta: &FracOrder4,
        conjugate: bool,
    ) -> Result<BiQuat> {
        self.base.check_above(q)?;
        let inner = self.field(f, self.fueter_terms(beta));
        let outer_terms = if conjugate { self.fueter_conj_terms(alpha) } else { self.fueter_terms(alpha) };
        self.field(&inner, outer_terms).eval(q)
    }

    /// Norm of the two defects of the fractional Cauchy-Riemann system.
    pub fn cr_residual_fractional(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<f64> {
        let o = alpha.orders;
        let f1 = ComponentField { f, which: Component::F1 };
        let f2 = ComponentField { f, which: Component::F2 };
        let a1 = |g: &dyn Field| self.frac_d_a1(g, q, o[0], o[1]).map(bicomplex_part);
        let a2 = |g: &dyn Field| self.frac_d_a2(g, q, o[2], o[3]).map(bicomplex_part);
        let w = self.s.omega_bc();
        let d1 = a1(&f1)? - w * a2(&f2)?.conj_i();
        let d2 = a2(&f1)? + w * a1(&f2)?.conj_i();
        Ok(d1.norm().hypot(d2.norm()))
    }

    /// The pair (D_a1[f], D_a2[f]) for C(i)-valued f.
    pub fn bold_d(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<(BiQuat, BiQuat)> {
        let o = alpha.orders;
        Ok((self.frac_d_a1(f, q, o[0], o[1])?, self.frac_d_a2(f, q, o[2], o[3])?))
    }

    pub fn bold_d_residual(&self, f: &dyn Field, q: Point4, alpha: &FracOrder4) -> Result<f64> {
        let (d1, d2) = self.bold_d(f, q, alpha)?;
        Ok(d1.norm().hypot(d2.norm()))
    }
}

/// Norm of the two defects of the classical system for f = f1 + f2 j.
pub fn cr_residual_classical(f: &dyn Field, q: Point4, s: &StructuralSet, h: f64) -> Result<f64> {
    use classical::dbar;
    let f1 = ComponentField { f, which: Component::F1 };
    let f2 = ComponentField { f, which: Component::F2 };
    let w = s.omega_bc();
    let d1 = dbar(&f1, 1, q, h)? - w * dbar(&f2, 2, q, h)?.conj_i();
    let d2 = dbar(&f1, 2, q, h)? + w * dbar(&f2, 1, q, h)?.conj_i();
    Ok(d1.norm().hypot(d2.norm()))
}

/// `sum_l e_l^{alpha_l} / ((alpha_l + 1) Gamma(alpha_l))`: the averaged integral of f = 1.
pub fn cal_i_of_one(base: &BasePoint, q: Point4, alpha: &FracOrder4) -> Cx {
    let e = base.edges_to(q);
    (0..4)
        .map(|k| {
            let a = alpha.get(k);
            rpow(e[k], a) * rgamma(a) / (a + 1.0)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ConstField, Poly4};
    use std::f64::consts::PI;

    fn ctx(theta: f64) -> FracContext {
        let rect = Rect4::new([0.0; 4], [1.5; 4]).unwrap();
        FracContext::new(BasePoint::new([1.0; 4], rect).unwrap(), StructuralSet::new(theta))
    }

    fn half() -> FracOrder {
        FracOrder::real(0.5).unwrap()
    }

    #[test]
    fn constant_examples() {
        let c = ctx(0.0);
        let one = ConstField(BiQuat::ONE);
        let q = [1.0; 4];
        let want = (BiQuat::ONE + unit_i()).scale_re(1.0 / PI.sqrt());
        assert!((c.frac_d_a1(&one, q, half(), half()).unwrap() - want).norm() < 1e-13);
        assert!((c.frac_d_a2(&one, q, half(), half()).unwrap() - want).norm() < 1e-13);
        let full = c.frac_fueter_d(&one, q, &FracOrder4::real([0.5; 4]).unwrap()).unwrap();
        let ij = bq(Quaternion::I * Quaternion::J);
        assert!((full - (want + ij * want)).norm() < 1e-13);
        let zero = ConstField(BiQuat::ZERO);
        assert_eq!(c.frac_d_a1(&zero, q, half(), half()).unwrap(), BiQuat::ZERO);
    }

    #[test]
    fn split_recombination_agrees() {
        let c = ctx(0.9);
        let coef = BiQuat::new(Quaternion::new(1.0, -0.5, 2.0, 0.3), Quaternion::new(0.2, 0.0, -0.7, 1.0));
        let f = Poly4::z_monomial(coef, [1, 1, 0, 1]).add(&Poly4::z_monomial(BiQuat::ONE, [0, 0, 2, 0]));
        let alpha = FracOrder4::new([Cx::new(0.3, 0.1), Cx::new(0.6, 0.0), Cx::new(0.45, -0.2), Cx::new(0.7, 0.05)]).unwrap();
        let q = [0.7, 1.2, 0.4, 1.1];
        let direct = c.frac_fueter_d(&f, q, &alpha).unwrap();
        let split = c.frac_fueter_d_split(&f, q, &alpha).unwrap();
        assert!((direct - split).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn cal_i_reductions_agree() {
        let c = ctx(0.4);
        let alpha = FracOrder4::new([Cx::new(0.3, 0.1), Cx::new(0.6, 0.0), Cx::new(0.45, -0.2), Cx::new(0.7, 0.05)]).unwrap();
        let q = [0.7, 1.2, 0.4, 1.1];
        let one = ConstField(BiQuat::ONE);
        let v = c.cal_i(&one, q, &alpha).unwrap();
        assert!((v - BiQuat::scalar(cal_i_of_one(&c.base, q, &alpha))).norm() < 1e-12);
        let f = Poly4::z_monomial(BiQuat::ONE, [1, 0, 1, 0]);
        let exact = c.cal_i(&f, q, &alpha).unwrap();
        let cub = c.cal_i_cubature(&f, q, &alpha, 24).unwrap();
        assert!((exact - cub).norm() < 1e-4 * exact.norm(), "{exact:?} vs {cub:?}");
    }

    #[test]
    fn composition_gate() {
        let c = ctx(0.0);
        let a = FracOrder4::real([0.6; 4]).unwrap();
        let err = c
            .compose_dd(&ConstField(BiQuat::ONE), [1.0; 4], &a, &a, false, LastTermVariant::AsPrinted)
            .unwrap_err();
        assert!(matches!(err, Error::CompositionGate { .. }));
    }

    #[test]
    fn classical_cr_of_holomorphic_pair() {
        let f = Poly4::z_monomial(BiQuat::ONE, [1, 0, 0, 0]).add(&Poly4::z_monomial(bq(Quaternion::J), [0, 0, 0, 1]));
        for theta in [0.0, 1.0, 4.0] {
            let r = cr_residual_classical(&f, [0.2, 0.3, 0.1, -0.4], &StructuralSet::new(theta), 1e-4).unwrap();
            assert!(r < 1e-9);
        }
    }
}
