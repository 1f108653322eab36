//! Gauss-Legendre rules, product-integration rules for x^{c-1} weights, and
//! deterministic pairwise summation.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::Add;
use std::sync::{Arc, OnceLock};

use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::quat::{BiQuat, Cx};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> GaussLegendre {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_deriv(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to [lo, hi].
    pub fn on(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| w * half).collect();
        (x, w)
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// All of P_0..P_{n-1} at x.
fn legendre_all(n: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n > 1 {
        out.push(x);
    }
    for k in 2..n {
        let kf = k as f64;
        let v = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(v);
    }
}

fn gl_cache() -> &'static Mutex<HashMap<usize, Arc<GaussLegendre>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<Arc<GaussLegendre>> {
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    let mut cache = gl_cache().lock();
    Ok(cache
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::compute(n)))
        .clone())
}

/// Rule for `int_0^1 s^{c-1} g(s) ds ~ sum_i w_i g(s_i)` with complex c, Re c > 0.
///
/// Nodes are Gauss-Legendre on [0, 1]; the weights integrate the Legendre
/// interpolant of g against the exact moments of s^{c-1}.
#[derive(Debug, Clone)]
pub struct SingularRule {
    pub c: Cx,
    pub nodes: Vec<f64>,
    pub weights: Vec<Cx>,
}

impl SingularRule {
    fn compute(n: usize, c: Cx) -> Result<SingularRule> {
        let gl = gauss_legendre(n)?;
        let mut mu = Vec::with_capacity(n);
        mu.push(1.0 / c);
        for k in 1..n {
            let kf = k as f64;
            let prev = mu[k - 1];
            mu.push(prev * (c - kf) / (c + kf));
        }
        let mut p = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            legendre_all(n, *x, &mut p);
            let mut acc = Cx::new(0.0, 0.0);
            for k in 0..n {
                acc += (2.0 * k as f64 + 1.0) * p[k] * mu[k];
            }
            nodes.push(0.5 * (x + 1.0));
            weights.push(0.5 * w * acc);
        }
        Ok(SingularRule { c, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F>(&self, mut g: F) -> Result<BiQuat>
    where
        F: FnMut(f64) -> Result<BiQuat>,
    {
        let mut acc = BiQuat::ZERO;
        for (s, w) in self.nodes.iter().zip(&self.weights) {
            acc += g(*s)?.scale(*w);
        }
        Ok(acc)
    }
}

type RuleKey = (usize, u64, u64);

fn singular_cache() -> &'static Mutex<HashMap<RuleKey, Arc<SingularRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<SingularRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached [`SingularRule`] for exponent c (weight s^{c-1}).
pub fn singular_rule(n: usize, c: Cx) -> Result<Arc<SingularRule>> {
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    if !(c.re > 0.0) || !c.im.is_finite() {
        return Err(Error::Parameter(format!(
            "singular rule needs Re c > 0, got c = {c}"
        )));
    }
    let key = (n, c.re.to_bits(), c.im.to_bits());
    if let Some(r) = singular_cache().lock().get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(SingularRule::compute(n, c)?);
    singular_cache().lock().insert(key, rule.clone());
    Ok(rule)
}

/// b^z for real b >= 0 (principal branch); 0^z = 0 for Re z > 0.
pub fn rpow(b: f64, z: Cx) -> Cx {
    if b == 0.0 {
        return if z.re > 0.0 {
            Cx::new(0.0, 0.0)
        } else if z == Cx::new(0.0, 0.0) {
            Cx::new(1.0, 0.0)
        } else {
            Cx::new(f64::INFINITY, 0.0)
        };
    }
    (z * b.ln()).exp()
}

fn is_one(c: Cx) -> bool {
    (c.re - 1.0).abs() < 1e-15 && c.im.abs() < 1e-15
}

/// `int_0^1 s^{p-1} (1-s)^{q-1} g(s) ds` for Re p, Re q > 0.
///
/// With both endpoints singular the interval is split at 1/2 and each half
/// is handled by a product rule for its own endpoint.
pub fn beta_integral<F>(p: Cx, q: Cx, n: usize, mut g: F) -> Result<BiQuat>
where
    F: FnMut(f64) -> Result<BiQuat>,
{
    match (is_one(p), is_one(q)) {
        (_, true) => singular_rule(n, p)?.apply(g),
        (true, false) => singular_rule(n, q)?.apply(|u| g(1.0 - u)),
        (false, false) => {
            let left = singular_rule(n, p)?.apply(|u| {
                let s = 0.5 * u;
                Ok(g(s)?.scale(rpow(1.0 - s, q - 1.0)))
            })?;
            let right = singular_rule(n, q)?.apply(|v| {
                let s = 1.0 - 0.5 * v;
                Ok(g(s)?.scale(rpow(s, p - 1.0)))
            })?;
            Ok(left.scale(rpow(0.5, p)) + right.scale(rpow(0.5, q)))
        }
    }
}

/// Fixed-shape pairwise reduction; the result depends only on the order of
/// `xs`, never on how it was produced.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        let mut acc = T::default();
        for &x in xs {
            acc = acc + x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exactness() {
        let gl = gauss_legendre(8).unwrap();
        for m in 0..16 {
            let s: f64 = gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .map(|(x, w)| w * x.powi(m))
                .sum();
            let want = if m % 2 == 1 { 0.0 } else { 2.0 / (m as f64 + 1.0) };
            assert!((s - want).abs() < 1e-14, "m = {m}");
        }
        let wsum: f64 = gauss_legendre(97).unwrap().weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-13);
    }

    #[test]
    fn singular_moments() {
        for c in [Cx::new(0.5, 0.0), Cx::new(0.3, 0.2), Cx::new(0.25, -0.4), Cx::new(3.5, 0.0)] {
            let rule = singular_rule(24, c).unwrap();
            for m in 0..10 {
                let got = rule
                    .apply(|s| Ok(BiQuat::scalar(Cx::new(s.powi(m), 0.0))))
                    .unwrap()
                    .coeffs()[0];
                let want = 1.0 / (c + m as f64);
                assert!((got - want).norm() < 1e-13 * want.norm().max(1.0), "c={c} m={m}");
            }
        }
    }

    #[test]
    fn beta_function_values() {
        // B(p, q) = Gamma(p)Gamma(q)/Gamma(p+q)
        use crate::gamma::gamma;
        for (p, q) in [
            (Cx::new(0.5, 0.0), Cx::new(0.5, 0.0)),
            (Cx::new(1.3, 0.2), Cx::new(0.7, -0.2)),
            (Cx::new(1.0, 0.0), Cx::new(0.25, 0.0)),
            (Cx::new(0.4, 0.0), Cx::new(1.0, 0.0)),
        ] {
            let got = beta_integral(p, q, 48, |_| Ok(BiQuat::ONE)).unwrap().coeffs()[0];
            let want = gamma(p).unwrap() * gamma(q).unwrap() / gamma(p + q).unwrap();
            assert!((got - want).norm() < 1e-12 * want.norm(), "p={p} q={q}");
        }
    }

    #[test]
    fn pairwise_is_exact_on_small_integers() {
        let xs: Vec<f64> = (1..=1000).map(|v| v as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }
}
