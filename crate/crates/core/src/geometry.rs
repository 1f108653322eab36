//! The box J_a^b in R^4, its faces, the area form on coordinate faces, and
//! tensor-product cubature with deterministic reduction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, pairwise_sum};
use crate::quat::{BiQuat, CPoint2, Quaternion, StructuralSet};

pub type Point4 = [f64; 4];

/// Axis-aligned box with coordinates (Re z1, Im z1, Re z2, Im z2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect4 {
    pub lo: Point4,
    pub hi: Point4,
}

impl Rect4 {
    pub fn new(lo: Point4, hi: Point4) -> Result<Self> {
        for axis in 0..4 {
            if !(lo[axis].is_finite() && hi[axis].is_finite() && hi[axis] > lo[axis]) {
                return Err(Error::DegenerateRect {
                    axis,
                    lo: lo[axis],
                    hi: hi[axis],
                });
            }
        }
        Ok(Rect4 { lo, hi })
    }

    pub fn from_corners(a: CPoint2, b: CPoint2) -> Result<Self> {
        Rect4::new(a.coords(), b.coords())
    }

    pub fn unit() -> Self {
        Rect4 {
            lo: [0.0; 4],
            hi: [1.0; 4],
        }
    }

    pub fn edges(&self) -> Point4 {
        std::array::from_fn(|k| self.hi[k] - self.lo[k])
    }

    pub fn measure(&self) -> f64 {
        self.edges().iter().product()
    }

    pub fn min_edge(&self) -> f64 {
        self.edges().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self) -> Point4 {
        std::array::from_fn(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    pub fn contains(&self, x: Point4) -> bool {
        (0..4).all(|k| self.lo[k] < x[k] && x[k] < self.hi[k])
    }

    pub fn contains_closed(&self, x: Point4) -> bool {
        (0..4).all(|k| self.lo[k] <= x[k] && x[k] <= self.hi[k])
    }

    /// Sup-norm distance from an interior point to the boundary (0 outside).
    pub fn inner_distance(&self, x: Point4) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        (0..4)
            .map(|k| (x[k] - self.lo[k]).min(self.hi[k] - x[k]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from a point outside the closed box (0 inside).
    pub fn outer_distance(&self, x: Point4) -> f64 {
        (0..4)
            .map(|k| {
                let d = (self.lo[k] - x[k]).max(x[k] - self.hi[k]).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn faces(&self) -> [Face3; 8] {
        std::array::from_fn(|i| {
            let axis = i / 2;
            let side = if i % 2 == 0 { Side::Low } else { Side::High };
            Face3::new(*self, axis, side)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Low,
    High,
}

/// One of the eight 3-dimensional faces, with outward unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Face3 {
    pub fixed_axis: usize,
    pub side: Side,
    pub value: f64,
    pub rect: Rect4,
    pub outward_normal: Point4,
}

impl Face3 {
    fn new(rect: Rect4, axis: usize, side: Side) -> Self {
        let mut n = [0.0; 4];
        let (value, sign) = match side {
            Side::Low => (rect.lo[axis], -1.0),
            Side::High => (rect.hi[axis], 1.0),
        };
        n[axis] = sign;
        Face3 {
            fixed_axis: axis,
            side,
            value,
            rect,
            outward_normal: n,
        }
    }

    pub fn free_axes(&self) -> [usize; 3] {
        let mut out = [0; 3];
        let mut i = 0;
        for k in 0..4 {
            if k != self.fixed_axis {
                out[i] = k;
                i += 1;
            }
        }
        out
    }

    pub fn area(&self) -> f64 {
        let e = self.rect.edges();
        self.free_axes().iter().map(|&k| e[k]).product()
    }

    pub fn id(&self) -> String {
        let s = match self.side {
            Side::Low => "low",
            Side::High => "high",
        };
        format!("face(axis {}, {s})", self.fixed_axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    #[default]
    GaussLegendre,
    Midpoint,
}

/// 1-D nodes and weights of `rule` on [lo, hi].
pub fn rule_nodes(rule: Rule, n: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    Ok(match rule {
        Rule::GaussLegendre => gauss_legendre(n)?.on(lo, hi),
        Rule::Midpoint => {
            let h = (hi - lo) / n as f64;
            ((0..n).map(|i| lo + (i as f64 + 0.5) * h).collect(), vec![h; n])
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub volume_nodes: usize,
    pub boundary_nodes: usize,
    pub rule: Rule,
    pub frac_nodes: usize,
    pub exclusion_delta: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            volume_nodes: 8,
            boundary_nodes: 8,
            rule: Rule::GaussLegendre,
            frac_nodes: crate::frac1d::DEFAULT_FRAC_NODES,
            exclusion_delta: 0.0,
        }
    }
}

impl QuadratureSpec {
    /// Same node count on volume and boundary.
    pub fn uniform(n: usize) -> Self {
        QuadratureSpec {
            volume_nodes: n,
            boundary_nodes: n,
            ..Default::default()
        }
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.exclusion_delta = delta;
        self
    }

    pub fn with_frac_nodes(mut self, n: usize) -> Self {
        self.frac_nodes = n;
        self
    }

    pub fn validate(&self, r: &Rect4) -> Result<()> {
        for (name, n) in [
            ("volume_nodes", self.volume_nodes),
            ("boundary_nodes", self.boundary_nodes),
            ("frac_nodes", self.frac_nodes),
        ] {
            if n < 2 {
                return Err(Error::InvalidSpec(format!("{name} = {n} is below 2")));
            }
        }
        if !(self.exclusion_delta >= 0.0) || self.exclusion_delta >= 0.5 * r.min_edge() {
            return Err(Error::InvalidSpec(format!(
                "exclusion_delta = {} must lie in [0, {})",
                self.exclusion_delta,
                0.5 * r.min_edge()
            )));
        }
        Ok(())
    }
}

fn fmt_point(x: &Point4) -> String {
    format!("({:.6}, {:.6}, {:.6}, {:.6})", x[0], x[1], x[2], x[3])
}

/// Tensor-product cubature of `f` over the box `[lo, hi]` with `n` nodes per axis.
///
/// Node values are computed in parallel and reduced by a fixed pairwise tree.
pub fn box_integral<F>(f: &F, lo: Point4, hi: Point4, n: usize, rule: Rule) -> Result<BiQuat>
where
    F: Fn(Point4) -> Result<BiQuat> + Sync + ?Sized,
{
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..4)
        .map(|k| rule_nodes(rule, n, lo[k], hi[k]))
        .collect::<Result<_>>()?;
    let total = n * n * n * n;
    let values: Vec<Result<BiQuat>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let id = [idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n];
            let x: Point4 = std::array::from_fn(|k| axes[k].0[id[k]]);
            let w: f64 = (0..4).map(|k| axes[k].1[id[k]]).product();
            f(x).map(|v| v.scale_re(w)).map_err(|e| e.at(fmt_point(&x)))
        })
        .collect();
    let values: Vec<BiQuat> = values.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&values))
}

/// Integral of `f` over `r` with `spec.volume_nodes` per axis.
pub fn volume_integral<F>(f: &F, r: &Rect4, spec: &QuadratureSpec) -> Result<BiQuat>
where
    F: Fn(Point4) -> Result<BiQuat> + Sync + ?Sized,
{
    box_integral(f, r.lo, r.hi, spec.volume_nodes, spec.rule)
}

/// `nu_theta = sum_k n_k psi_k` for a unit coordinate normal.
pub fn sigma_theta(n: Point4, s: &StructuralSet) -> Result<Quaternion> {
    let nonzero: Vec<usize> = (0..4).filter(|&k| n[k] != 0.0).collect();
    if nonzero.len() != 1 || n[nonzero[0]].abs() != 1.0 {
        return Err(Error::NonCoordinateNormal(n));
    }
    Ok(s.combine(n))
}

/// Sum over the eight faces of the cubature of `h(x, face)`.
///
/// Faces are visited in a fixed order; each face is reduced pairwise.
pub fn boundary_sum<F>(h: &F, r: &Rect4, spec: &QuadratureSpec) -> Result<BiQuat>
where
    F: Fn(Point4, &Face3) -> Result<BiQuat> + Sync + ?Sized,
{
    let n = spec.boundary_nodes;
    let mut per_face = Vec::with_capacity(8);
    for face in r.faces() {
        let free = face.free_axes();
        let axes: Vec<(Vec<f64>, Vec<f64>)> = free
            .iter()
            .map(|&k| rule_nodes(spec.rule, n, r.lo[k], r.hi[k]))
            .collect::<Result<_>>()?;
        let values: Vec<Result<BiQuat>> = (0..n * n * n)
            .into_par_iter()
            .map(|idx| {
                let id = [idx / (n * n), (idx / n) % n, idx % n];
                let mut x = [0.0; 4];
                x[face.fixed_axis] = face.value;
                let mut w = 1.0;
                for (slot, &k) in free.iter().enumerate() {
                    x[k] = axes[slot].0[id[slot]];
                    w *= axes[slot].1[id[slot]];
                }
                h(x, &face)
                    .map(|v| v.scale_re(w))
                    .map_err(|e| e.at(format!("{} node {}", face.id(), fmt_point(&x))))
            })
            .collect();
        let values: Vec<BiQuat> = values.into_iter().collect::<Result<_>>()?;
        per_face.push(pairwise_sum(&values));
    }
    Ok(pairwise_sum(&per_face))
}

/// `sum over faces of int g_left(x) nu_theta g_right(x) dS`.
pub fn boundary_integral<L, R>(
    g_left: &L,
    g_right: &R,
    r: &Rect4,
    s: &StructuralSet,
    spec: &QuadratureSpec,
) -> Result<BiQuat>
where
    L: Fn(Point4) -> Result<BiQuat> + Sync + ?Sized,
    R: Fn(Point4) -> Result<BiQuat> + Sync + ?Sized,
{
    boundary_sum(
        &|x: Point4, face: &Face3| {
            let nu = BiQuat::real(sigma_theta(face.outward_normal, s)?);
            Ok(g_left(x)? * nu * g_right(x)?)
        },
        r,
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn one(_: Point4) -> Result<BiQuat> {
        Ok(BiQuat::ONE)
    }

    #[test]
    fn measure_examples() {
        assert_eq!(Rect4::unit().measure(), 1.0);
        let r = Rect4::from_corners(
            CPoint2::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            CPoint2::new(Complex64::new(2.0, 1.0), Complex64::new(1.0, 3.0)),
        )
        .unwrap();
        assert_eq!(r.measure(), 6.0);
        assert!(Rect4::new([0.0; 4], [0.0; 4]).is_err());
    }

    #[test]
    fn volume_examples() {
        let spec = QuadratureSpec::uniform(4);
        let r = Rect4::unit();
        let v = volume_integral(&one, &r, &spec).unwrap();
        assert!((v - BiQuat::ONE).norm() < 1e-14);
        let v = volume_integral(&|x: Point4| Ok(BiQuat::scalar(x[0].into())), &r, &spec).unwrap();
        assert!((v.q1.x0 - 0.5).abs() < 1e-14);
        // degree 7 per axis is exact with 4 nodes
        let v = volume_integral(
            &|x: Point4| Ok(BiQuat::scalar((x[0].powi(7) * x[3].powi(6)).into())),
            &r,
            &spec,
        )
        .unwrap();
        assert!((v.q1.x0 - 1.0 / 56.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_examples() {
        let s0 = StructuralSet::new(0.0);
        assert_eq!(sigma_theta([1.0, 0.0, 0.0, 0.0], &s0).unwrap(), Quaternion::ONE);
        let k = sigma_theta([0.0, 0.0, 1.0, 0.0], &s0).unwrap();
        assert!((k - Quaternion::K).norm() < 1e-15);
        let mj = sigma_theta([0.0, 0.0, 0.0, 1.0], &StructuralSet::new(std::f64::consts::PI)).unwrap();
        assert!((mj + Quaternion::J).norm() < 1e-15);
        assert!(sigma_theta([0.6, 0.8, 0.0, 0.0], &s0).is_err());
    }

    #[test]
    fn closed_surface_cancels() {
        let r = Rect4::new([0.0, -1.0, 0.5, 0.0], [2.0, 1.0, 1.0, 3.0]).unwrap();
        for theta in [0.0, 0.4, 2.0, 5.5] {
            let s = StructuralSet::new(theta);
            let v = boundary_integral(&one, &one, &r, &s, &QuadratureSpec::uniform(3)).unwrap();
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn divergence_of_x0() {
        let s = StructuralSet::new(1.1);
        let x0 = |x: Point4| Ok(BiQuat::scalar(x[0].into()));
        let v = boundary_integral(&one, &x0, &Rect4::unit(), &s, &QuadratureSpec::uniform(3)).unwrap();
        assert!((v.q1.x0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn errors_carry_location() {
        let bad = |x: Point4| {
            if x[0] > 0.5 {
                Err(Error::Parameter("boom".into()))
            } else {
                Ok(BiQuat::ONE)
            }
        };
        let err = volume_integral(&bad, &Rect4::unit(), &QuadratureSpec::uniform(2)).unwrap_err();
        assert!(matches!(err, Error::AtNode { .. }));
        assert_eq!(err.root(), &Error::Parameter("boom".into()));
    }
}
