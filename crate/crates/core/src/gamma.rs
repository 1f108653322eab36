//! Complex gamma function (Lanczos, g = 7, nine terms) with reflection.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quat::Cx;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const POLE_TOL: f64 = 1e-12;

fn pole_at(z: Cx) -> bool {
    z.re <= POLE_TOL && z.im.abs() <= POLE_TOL && (z.re - z.re.round()).abs() <= POLE_TOL
}

/// Lanczos sum for Re z >= 1/2.
fn lanczos(z: Cx) -> Cx {
    let z = z - 1.0;
    let mut x = Cx::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let ln = (z + 0.5) * t.ln() - t;
    (2.0 * PI).sqrt() * ln.exp() * x
}

/// Gamma(z); errors at nonpositive integers.
pub fn gamma(z: Cx) -> Result<Cx> {
    if pole_at(z) {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        let s = (PI * z).sin();
        Ok(PI / (s * lanczos(1.0 - z)))
    } else {
        Ok(lanczos(z))
    }
}

/// 1/Gamma(z), entire; zero at the poles of Gamma.
pub fn rgamma(z: Cx) -> Cx {
    if pole_at(z) {
        return Cx::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * lanczos(1.0 - z) / PI
    } else {
        1.0 / lanczos(z)
    }
}

pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Cx::new(x, 0.0)).map(|g| g.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Cx, b: Cx) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn factorial_values() {
        assert!(rel(gamma(Cx::new(5.0, 0.0)).unwrap(), Cx::new(24.0, 0.0)) < 1e-14);
        assert!(rel(gamma(Cx::new(1.0, 0.0)).unwrap(), Cx::new(1.0, 0.0)) < 1e-14);
        let sqrt_pi = PI.sqrt();
        assert!(rel(gamma(Cx::new(0.5, 0.0)).unwrap(), Cx::new(sqrt_pi, 0.0)) < 1e-14);
        assert!(rel(gamma(Cx::new(-0.5, 0.0)).unwrap(), Cx::new(-2.0 * sqrt_pi, 0.0)) < 1e-14);
    }

    #[test]
    fn poles() {
        for n in 0..5 {
            let z = Cx::new(-(n as f64), 0.0);
            assert!(matches!(gamma(z), Err(Error::GammaPole { .. })));
            assert_eq!(rgamma(z), Cx::new(0.0, 0.0));
        }
        assert!(gamma(Cx::new(-1.0, 1e-6)).is_ok());
    }

    #[test]
    fn reference_values() {
        // reference values, rounded to f64
        let cases = [
            (Cx::new(1.0, 1.0), Cx::new(0.498_015_668_118_356, -0.154_949_828_301_810_7)),
            (Cx::new(0.3, 0.2), Cx::new(1.980_358_172_823_442_5, -1.414_576_008_373_303_3)),
            (Cx::new(-2.5, 0.7), Cx::new(-0.159_818_716_362_932_93, -0.157_566_549_081_515_28)),
            (Cx::new(4.2, -3.1), Cx::new(-0.814_518_001_022_424_5, 2.256_459_340_233_244)),
        ];
        for (z, want) in cases {
            assert!(rel(gamma(z).unwrap(), want) < 1e-13, "z = {z}");
            assert!(rel(rgamma(z), 1.0 / want) < 1e-13, "z = {z}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Cx::new(0.7, 2.3);
        assert!(rel(gamma(z.conj()).unwrap(), gamma(z).unwrap().conj()) < 1e-15);
    }
}
