//! The classical theta-Fueter operators by central differences, and Laplacians.

use crate::error::Result;
use crate::field::{partial, with_coord, Field};
use crate::geometry::Point4;
use crate::quat::{BiQuat, Bicomplex, StructuralSet};

/// Unit placement and sign pattern of a first-order Fueter-type operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FueterKind {
    /// `sum psi_k d_k`
    Left,
    /// `sum d_k psi_k`
    Right,
    /// `d_0 - sum_{k>0} psi_k d_k`
    LeftConj,
    /// `d_0 - sum_{k>0} d_k psi_k`
    RightConj,
}

/// Combine four partials with the structural set.
pub fn assemble(d: [BiQuat; 4], s: &StructuralSet, kind: FueterKind) -> BiQuat {
    let mut acc = d[0];
    for (k, dk) in d.iter().enumerate().skip(1) {
        let psi = BiQuat::real(s.psi(k));
        let term = match kind {
            FueterKind::Left | FueterKind::LeftConj => psi * *dk,
            FueterKind::Right | FueterKind::RightConj => *dk * psi,
        };
        match kind {
            FueterKind::Left | FueterKind::Right => acc += term,
            FueterKind::LeftConj | FueterKind::RightConj => acc = acc - term,
        }
    }
    acc
}

/// Central difference of step h along `axis`.
pub fn central<F: Field + ?Sized>(f: &F, axis: usize, q: Point4, h: f64) -> Result<BiQuat> {
    let fp = f.eval(with_coord(q, axis, q[axis] + h))?;
    let fm = f.eval(with_coord(q, axis, q[axis] - h))?;
    Ok((fp - fm).scale_re(0.5 / h))
}

fn fd_partials<F: Field + ?Sized>(f: &F, q: Point4, h: f64) -> Result<[BiQuat; 4]> {
    Ok([central(f, 0, q, h)?, central(f, 1, q, h)?, central(f, 2, q, h)?, central(f, 3, q, h)?])
}

/// `d/dx0 + i d/dx1 + i e^{i theta} j d/dx2 + e^{i theta} j d/dx3` by central differences.
pub fn classical_fueter_d<F: Field + ?Sized>(f: &F, q: Point4, s: &StructuralSet, h: f64) -> Result<BiQuat> {
    Ok(assemble(fd_partials(f, q, h)?, s, FueterKind::Left))
}

pub fn classical_fueter_d_kind<F: Field + ?Sized>(
    f: &F,
    q: Point4,
    s: &StructuralSet,
    h: f64,
    kind: FueterKind,
) -> Result<BiQuat> {
    Ok(assemble(fd_partials(f, q, h)?, s, kind))
}

/// Same operator from exact partials where the field supplies them.
pub fn fueter_d_exact<F: Field + ?Sized>(f: &F, q: Point4, s: &StructuralSet, kind: FueterKind) -> Result<BiQuat> {
    let d = [partial(f, 0, q)?, partial(f, 1, q)?, partial(f, 2, q)?, partial(f, 3, q)?];
    Ok(assemble(d, s, kind))
}

/// Fourth-order five-point second difference along `axis`.
pub fn second_difference<F: Field + ?Sized>(f: &F, axis: usize, q: Point4, h: f64) -> Result<BiQuat> {
    let at = |t: f64| f.eval(with_coord(q, axis, q[axis] + t));
    let v = at(-2.0 * h)?.scale_re(-1.0)
        + at(-h)?.scale_re(16.0)
        + at(0.0)?.scale_re(-30.0)
        + at(h)?.scale_re(16.0)
        + at(2.0 * h)?.scale_re(-1.0);
    Ok(v.scale_re(1.0 / (12.0 * h * h)))
}

pub fn laplacian_r4<F: Field + ?Sized>(f: &F, q: Point4, h: f64) -> Result<BiQuat> {
    let mut acc = BiQuat::ZERO;
    for axis in 0..4 {
        acc += second_difference(f, axis, q, h)?;
    }
    Ok(acc)
}

/// Laplacian in the real coordinates of z1.
pub fn laplacian_z1<F: Field + ?Sized>(f: &F, q: Point4, h: f64) -> Result<BiQuat> {
    Ok(second_difference(f, 0, q, h)? + second_difference(f, 1, q, h)?)
}

/// Laplacian in the real coordinates of z2.
pub fn laplacian_z2<F: Field + ?Sized>(f: &F, q: Point4, h: f64) -> Result<BiQuat> {
    Ok(second_difference(f, 2, q, h)? + second_difference(f, 3, q, h)?)
}

/// `d/d conj(z_k) = (d/dx + i d/dy)/2` on the C(i)(C(I)) part of f, k = 1, 2.
pub fn dbar<F: Field + ?Sized>(f: &F, k: usize, q: Point4, h: f64) -> Result<Bicomplex> {
    let (x, y) = (2 * (k - 1), 2 * (k - 1) + 1);
    let dx = central(f, x, q, h)?.split().0;
    let dy = central(f, y, q, h)?.split().0;
    Ok((dx + Bicomplex::I * dy) * crate::quat::Cx::new(0.5, 0.0))
}

/// `d/dz_k = (d/dx - i d/dy)/2` on the C(i)(C(I)) part of f.
pub fn dz<F: Field + ?Sized>(f: &F, k: usize, q: Point4, h: f64) -> Result<Bicomplex> {
    let (x, y) = (2 * (k - 1), 2 * (k - 1) + 1);
    let dx = central(f, x, q, h)?.split().0;
    let dy = central(f, y, q, h)?.split().0;
    Ok((dx - Bicomplex::I * dy) * crate::quat::Cx::new(0.5, 0.0))
}

/// A Fueter-type operator applied by central differences, as a field.
pub struct FdFueterField<F> {
    pub f: F,
    pub s: StructuralSet,
    pub h: f64,
    pub kind: FueterKind,
}

impl<F: Field> Field for FdFueterField<F> {
    fn eval(&self, q: Point4) -> Result<BiQuat> {
        classical_fueter_d_kind(&self.f, q, &self.s, self.h, self.kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly4;

    #[test]
    fn linear_and_holomorphic() {
        let s = StructuralSet::new(0.8);
        let q = [0.3, 0.2, -0.4, 0.9];
        let x0 = Poly4::monomial(BiQuat::ONE, [1, 0, 0, 0]);
        let v = classical_fueter_d(&x0, q, &s, 1e-3).unwrap();
        assert!((v - BiQuat::ONE).norm() < 1e-12);
        let z1 = Poly4::z_monomial(BiQuat::ONE, [1, 0, 0, 0]);
        assert!(classical_fueter_d(&z1, q, &s, 1e-3).unwrap().norm() < 1e-12);
        let z1sq = Poly4::z_monomial(BiQuat::ONE, [2, 0, 0, 0]);
        assert!(classical_fueter_d(&z1sq, q, &s, 1e-3).unwrap().norm() < 1e-9);
    }

    #[test]
    fn factorizes_laplacian() {
        let s = StructuralSet::new(1.3);
        let q = [0.3, 0.2, -0.4, 0.9];
        let f = Poly4::monomial(BiQuat::ONE, [2, 0, 0, 0]).add(&Poly4::monomial(BiQuat::ONE, [0, 2, 0, 0]));
        let h = 1e-3;
        let inner = FdFueterField {
            f: &f,
            s,
            h,
            kind: FueterKind::LeftConj,
        };
        let v = classical_fueter_d(&inner, q, &s, h).unwrap();
        let lap = laplacian_r4(&f, q, h).unwrap();
        assert!((v - lap).norm() < 1e-6);
        assert!((lap - BiQuat::scalar(4.0.into())).norm() < 1e-6);
    }
}
