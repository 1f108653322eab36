//! Real quaternions, complex quaternions and the theta-identification of C(i)^2 with H.
//!
//! Two imaginary units coexist here. The quaternionic `i` (with `j`, `k`) is
//! non-commutative; the scalar unit of [`Cx`] commutes with everything and is
//! written `I` in comments below.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar of C(I), the commuting complex unit.
pub type Cx = Complex64;

/// Long name for [`BiQuat`].
pub type BiComplexQuaternion = BiQuat;

pub const CX_ZERO: Cx = Cx::new(0.0, 0.0);
pub const CX_ONE: Cx = Cx::new(1.0, 0.0);

/// x0 + x1 i + x2 j + x3 k
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion { x0, x1, x2, x3 }
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Quaternion::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn scalar(x: f64) -> Self {
        Quaternion::new(x, 0.0, 0.0, 0.0)
    }

    /// The C(i) number `z` seen as the quaternion Re z + Im z i.
    pub fn from_ci(z: Complex64) -> Self {
        Quaternion::new(z.re, z.im, 0.0, 0.0)
    }

    /// `z1 + z2 j`.
    pub fn from_split(z1: Complex64, z2: Complex64) -> Self {
        Quaternion::new(z1.re, z1.im, z2.re, z2.im)
    }

    /// `(f1, f2)` with `self = f1 + f2 j`.
    pub fn split(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.x0, self.x1),
            Complex64::new(self.x2, self.x3),
        )
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().scale(1.0 / n))
    }

    pub fn max_abs(self) -> f64 {
        self.x0.abs().max(self.x1.abs()).max(self.x2.abs()).max(self.x3.abs())
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    let (a1, b1, c1, d1) = (p.x0, p.x1, p.x2, p.x3);
    let (a2, b2, c2, d2) = (q.x0, q.x1, q.x2, q.x3);
    Quaternion {
        x0: a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        x1: a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        x2: a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        x3: a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    }
}

pub fn quat_conj(q: Quaternion) -> Quaternion {
    q.conj()
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        quat_mul(self, o)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

/// Complex quaternion `q1 + I q2` with `I` commuting with i, j, k.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BiQuat {
    pub q1: Quaternion,
    pub q2: Quaternion,
}

impl BiQuat {
    pub const ZERO: BiQuat = BiQuat {
        q1: Quaternion::ZERO,
        q2: Quaternion::ZERO,
    };
    pub const ONE: BiQuat = BiQuat {
        q1: Quaternion::ONE,
        q2: Quaternion::ZERO,
    };

    pub const fn new(q1: Quaternion, q2: Quaternion) -> Self {
        BiQuat { q1, q2 }
    }

    pub fn real(q: Quaternion) -> Self {
        BiQuat::new(q, Quaternion::ZERO)
    }

    pub fn scalar(c: Cx) -> Self {
        BiQuat::new(Quaternion::scalar(c.re), Quaternion::scalar(c.im))
    }

    /// Coefficients c_k in C(I) of 1, i, j, k.
    pub fn coeffs(self) -> [Cx; 4] {
        [
            Cx::new(self.q1.x0, self.q2.x0),
            Cx::new(self.q1.x1, self.q2.x1),
            Cx::new(self.q1.x2, self.q2.x2),
            Cx::new(self.q1.x3, self.q2.x3),
        ]
    }

    pub fn from_coeffs(c: [Cx; 4]) -> Self {
        BiQuat::new(
            Quaternion::new(c[0].re, c[1].re, c[2].re, c[3].re),
            Quaternion::new(c[0].im, c[1].im, c[2].im, c[3].im),
        )
    }

    /// `self = f1 + f2 j` with f1 = c0 + c1 i, f2 = c2 + c3 i.
    pub fn split(self) -> (Bicomplex, Bicomplex) {
        let c = self.coeffs();
        (Bicomplex::new(c[0], c[1]), Bicomplex::new(c[2], c[3]))
    }

    pub fn from_split(f1: Bicomplex, f2: Bicomplex) -> Self {
        BiQuat::from_coeffs([f1.re, f1.im, f2.re, f2.im])
    }

    /// Quaternionic conjugation; the I-parts are left alone.
    pub fn conj(self) -> Self {
        BiQuat::new(self.q1.conj(), self.q2.conj())
    }

    /// Multiplication by a commuting scalar.
    pub fn scale(self, c: Cx) -> Self {
        BiQuat::new(
            self.q1.scale(c.re) - self.q2.scale(c.im),
            self.q2.scale(c.re) + self.q1.scale(c.im),
        )
    }

    pub fn scale_re(self, s: f64) -> Self {
        BiQuat::new(self.q1.scale(s), self.q2.scale(s))
    }

    /// Euclidean norm over the eight real parts.
    pub fn norm(self) -> f64 {
        (self.q1.norm_sqr() + self.q2.norm_sqr()).sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.q1.max_abs().max(self.q2.max_abs())
    }

    pub fn is_finite(self) -> bool {
        self.q1.to_array().iter().chain(self.q2.to_array().iter()).all(|v| v.is_finite())
    }

    pub fn left(self, q: Quaternion) -> Self {
        BiQuat::new(q * self.q1, q * self.q2)
    }

    pub fn right(self, q: Quaternion) -> Self {
        BiQuat::new(self.q1 * q, self.q2 * q)
    }
}

pub fn bc_mul(p: BiQuat, q: BiQuat) -> BiQuat {
    BiQuat::new(p.q1 * q.q1 - p.q2 * q.q2, p.q1 * q.q2 + p.q2 * q.q1)
}

pub fn bc_conj(p: BiQuat) -> BiQuat {
    p.conj()
}

impl Add for BiQuat {
    type Output = BiQuat;
    fn add(self, o: BiQuat) -> BiQuat {
        BiQuat::new(self.q1 + o.q1, self.q2 + o.q2)
    }
}

impl AddAssign for BiQuat {
    fn add_assign(&mut self, o: BiQuat) {
        *self = *self + o;
    }
}

impl Sub for BiQuat {
    type Output = BiQuat;
    fn sub(self, o: BiQuat) -> BiQuat {
        BiQuat::new(self.q1 - o.q1, self.q2 - o.q2)
    }
}

impl Neg for BiQuat {
    type Output = BiQuat;
    fn neg(self) -> BiQuat {
        BiQuat::new(-self.q1, -self.q2)
    }
}

impl Mul for BiQuat {
    type Output = BiQuat;
    fn mul(self, o: BiQuat) -> BiQuat {
        bc_mul(self, o)
    }
}

impl Mul<Cx> for BiQuat {
    type Output = BiQuat;
    fn mul(self, c: Cx) -> BiQuat {
        self.scale(c)
    }
}

impl Mul<BiQuat> for Cx {
    type Output = BiQuat;
    fn mul(self, b: BiQuat) -> BiQuat {
        b.scale(self)
    }
}

impl Mul<f64> for BiQuat {
    type Output = BiQuat;
    fn mul(self, s: f64) -> BiQuat {
        self.scale_re(s)
    }
}

impl From<Quaternion> for BiQuat {
    fn from(q: Quaternion) -> BiQuat {
        BiQuat::real(q)
    }
}

impl From<Bicomplex> for BiQuat {
    fn from(b: Bicomplex) -> BiQuat {
        BiQuat::from_coeffs([b.re, b.im, CX_ZERO, CX_ZERO])
    }
}

/// Element `re + i im` of C(i)(C(I)); commutative.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Bicomplex {
    pub re: Cx,
    pub im: Cx,
}

impl Bicomplex {
    pub const ZERO: Bicomplex = Bicomplex {
        re: CX_ZERO,
        im: CX_ZERO,
    };
    pub const ONE: Bicomplex = Bicomplex {
        re: CX_ONE,
        im: CX_ZERO,
    };
    /// The quaternionic unit i.
    pub const I: Bicomplex = Bicomplex {
        re: CX_ZERO,
        im: CX_ONE,
    };

    pub const fn new(re: Cx, im: Cx) -> Self {
        Bicomplex { re, im }
    }

    /// A C(i) number with real coefficients.
    pub fn from_ci(z: Complex64) -> Self {
        Bicomplex::new(Cx::new(z.re, 0.0), Cx::new(z.im, 0.0))
    }

    pub fn from_cx(c: Cx) -> Self {
        Bicomplex::new(c, CX_ZERO)
    }

    /// Conjugation of the quaternionic unit i only.
    pub fn conj_i(self) -> Self {
        Bicomplex::new(self.re, -self.im)
    }

    pub fn scale(self, c: Cx) -> Self {
        Bicomplex::new(self.re * c, self.im * c)
    }

    pub fn norm(self) -> f64 {
        (self.re.norm_sqr() + self.im.norm_sqr()).sqrt()
    }
}

impl Add for Bicomplex {
    type Output = Bicomplex;
    fn add(self, o: Bicomplex) -> Bicomplex {
        Bicomplex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Bicomplex {
    type Output = Bicomplex;
    fn sub(self, o: Bicomplex) -> Bicomplex {
        Bicomplex::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for Bicomplex {
    type Output = Bicomplex;
    fn neg(self) -> Bicomplex {
        Bicomplex::new(-self.re, -self.im)
    }
}

impl Mul for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, o: Bicomplex) -> Bicomplex {
        Bicomplex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Mul<Cx> for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, c: Cx) -> Bicomplex {
        self.scale(c)
    }
}

/// A point (z1, z2) of C(i)^2; coordinates x = (Re z1, Im z1, Re z2, Im z2).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CPoint2 {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl CPoint2 {
    pub const fn new(z1: Complex64, z2: Complex64) -> Self {
        CPoint2 { z1, z2 }
    }

    pub fn from_coords(x: [f64; 4]) -> Self {
        CPoint2::new(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))
    }

    pub fn coords(self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    /// `z1 + z2 j` with the standard units.
    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::from_array(self.coords())
    }

    pub fn from_quaternion(q: Quaternion) -> Self {
        CPoint2::from_coords(q.to_array())
    }
}

/// (z1, z2)(w1, w2) = (z1 w1 - conj(z2) w2, conj(z1) w2 + z2 w1).
pub fn theta_pair_mul(p: CPoint2, q: CPoint2) -> CPoint2 {
    CPoint2::new(
        p.z1 * q.z1 - p.z2.conj() * q.z2,
        p.z1.conj() * q.z2 + p.z2 * q.z1,
    )
}

/// (z1, z2) -> (conj z1, -z2).
pub fn pair_conj(p: CPoint2) -> CPoint2 {
    CPoint2::new(p.z1.conj(), -p.z2)
}

/// The structural set {1, i, i e^{i theta} j, e^{i theta} j}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructuralSet {
    pub theta: f64,
}

impl StructuralSet {
    pub fn new(theta: f64) -> Self {
        StructuralSet {
            theta: theta.rem_euclid(std::f64::consts::TAU),
        }
    }

    /// omega = i e^{i theta} as a C(i) number.
    pub fn omega(&self) -> Complex64 {
        Complex64::new(-self.theta.sin(), self.theta.cos())
    }

    pub fn omega_bc(&self) -> Bicomplex {
        Bicomplex::from_ci(self.omega())
    }

    /// e^{i theta}.
    pub fn phase(&self) -> Complex64 {
        Complex64::new(self.theta.cos(), self.theta.sin())
    }

    pub fn psi(&self, k: usize) -> Quaternion {
        let (s, c) = self.theta.sin_cos();
        match k {
            0 => Quaternion::ONE,
            1 => Quaternion::I,
            // i e^{i theta} j = cos(theta) k - sin(theta) j
            2 => Quaternion::new(0.0, 0.0, -s, c),
            3 => Quaternion::new(0.0, 0.0, c, s),
            _ => panic!("structural set index {k} out of range"),
        }
    }

    pub fn basis(&self) -> [Quaternion; 4] {
        [self.psi(0), self.psi(1), self.psi(2), self.psi(3)]
    }

    /// Sum of x_k psi_k.
    pub fn combine(&self, x: [f64; 4]) -> Quaternion {
        let b = self.basis();
        b[0].scale(x[0]) + b[1].scale(x[1]) + b[2].scale(x[2]) + b[3].scale(x[3])
    }
}

/// z1 + i e^{i theta} j z2 = z1 + omega conj(z2) j.
pub fn theta_embed(p: CPoint2, s: &StructuralSet) -> Quaternion {
    let w = s.omega() * p.z2.conj();
    Quaternion::from_split(p.z1, w)
}

/// Inverse of [`theta_embed`].
pub fn theta_unembed(q: Quaternion, s: &StructuralSet) -> CPoint2 {
    let (z1, w) = q.split();
    // w = omega conj(z2), |omega| = 1
    let z2 = (s.omega().conj() * w).conj();
    CPoint2::new(z1, z2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn unit_products() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * j, -i);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
        assert_eq!(i * i, -Quaternion::ONE);
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(q * Quaternion::ONE, q);
    }

    #[test]
    fn distributive_example() {
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let q = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(p * q, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn complex_scalar_through_j() {
        // a j = j conj(a)
        let a = Quaternion::from_ci(Complex64::new(2.0, 3.0));
        let lhs = a * Quaternion::J;
        let rhs = Quaternion::J * Quaternion::from_ci(Complex64::new(2.0, -3.0));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn embed_examples() {
        let one = CPoint2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let e2 = CPoint2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(close(theta_embed(one, &StructuralSet::new(0.0)), Quaternion::ONE, 0.0));
        assert!(close(theta_embed(e2, &StructuralSet::new(0.0)), Quaternion::K, 1e-16));
        let half_pi = StructuralSet::new(std::f64::consts::FRAC_PI_2);
        assert!(close(theta_embed(e2, &half_pi), -Quaternion::J, 1e-15));
    }

    #[test]
    fn embed_matches_coordinate_expansion() {
        let s = StructuralSet::new(0.7);
        let x = [0.3, -1.2, 0.8, 2.5];
        let q = theta_embed(CPoint2::from_coords(x), &s);
        assert!(close(q, s.combine(x), 1e-15));
        let back = theta_unembed(q, &s);
        assert!((back.z1 - Complex64::new(0.3, -1.2)).norm() < 1e-15);
        assert!((back.z2 - Complex64::new(0.8, 2.5)).norm() < 1e-15);
    }

    #[test]
    fn pair_examples() {
        let e2 = CPoint2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let p = theta_pair_mul(e2, e2);
        assert_eq!(p, CPoint2::new(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)));
        let c = pair_conj(CPoint2::new(Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)));
        assert_eq!(c, CPoint2::new(Complex64::new(1.0, -1.0), Complex64::new(-2.0, 0.0)));
        let n = theta_pair_mul(
            CPoint2::new(Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.5)),
            pair_conj(CPoint2::new(Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.5))),
        );
        assert!((n.z1 - Complex64::new(2.0 + 4.25, 0.0)).norm() < 1e-14);
        assert!(n.z2.norm() < 1e-14);
    }

    #[test]
    fn psi_is_orthonormal() {
        for &t in &[0.0, 0.7, 2.0, 5.5] {
            let s = StructuralSet::new(t);
            for m in 0..4 {
                for n in 0..4 {
                    let v = (s.psi(m) * s.psi(n).conj()).x0;
                    let d = if m == n { 1.0 } else { 0.0 };
                    assert!((v - d).abs() < 1e-14);
                }
            }
            assert!(close(s.psi(2) * Quaternion::I, s.psi(3), 1e-15));
        }
    }

    #[test]
    fn biquat_split_roundtrip() {
        let b = BiQuat::from_coeffs([
            Cx::new(1.0, 2.0),
            Cx::new(-3.0, 0.5),
            Cx::new(0.25, -1.0),
            Cx::new(4.0, 1.5),
        ]);
        let (f1, f2) = b.split();
        assert_eq!(BiQuat::from_split(f1, f2), b);
        // f2 j reconstructs the j, k part
        let jpart = BiQuat::from(f2) * BiQuat::real(Quaternion::J);
        assert_eq!(BiQuat::from(f1) + jpart, b);
    }

    #[test]
    fn bicomplex_matches_biquat() {
        let a = Bicomplex::new(Cx::new(1.0, -2.0), Cx::new(0.5, 3.0));
        let b = Bicomplex::new(Cx::new(-0.7, 0.1), Cx::new(2.0, -1.0));
        let lhs = BiQuat::from(a * b);
        let rhs = BiQuat::from(a) * BiQuat::from(b);
        assert!((lhs - rhs).max_abs() < 1e-15);
    }

    #[test]
    fn inverse_rejects_zero() {
        assert_eq!(Quaternion::ZERO.inverse(), Err(Error::ZeroDivisor));
        let q = Quaternion::new(1.0, -2.0, 0.5, 3.0);
        assert!(close(q * q.inverse().unwrap(), Quaternion::ONE, 1e-15));
    }
}
