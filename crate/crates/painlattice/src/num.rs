//! Multiprecision helpers shared by the numeric modules.
//!
//! Everything here is a thin layer over `rug` (MPFR/MPC). Values carry their
//! own precision; the convention throughout the crate is that the first
//! operand of an owned arithmetic chain fixes the working precision.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Working precision in bits.
pub type Prec = u32;

pub fn float(prec: Prec, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn cplx(prec: Prec, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn czero(prec: Prec) -> Complex {
    Complex::new(prec)
}

pub fn pi(prec: Prec) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// |z| as a `Float` at the precision of `z`.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn dist(a: &Complex, b: &Complex) -> Float {
    cabs(&Complex::with_val(a.prec().0, a - b))
}

/// Principal argument of `z`.
pub fn carg(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.arg_ref())
}

/// e^{iθ}·r at precision `prec`.
pub fn polar(prec: Prec, r: &Float, theta: &Float) -> Complex {
    let (s, c) = theta.clone().sin_cos(Float::new(prec));
    Complex::with_val(prec, (c * r.clone(), s * r.clone()))
}

/// Horner evaluation of a polynomial with complex coefficients
/// (ascending order: `coeffs[k]` multiplies `z^k`).
pub fn horner(coeffs: &[Complex], z: &Complex) -> Complex {
    let prec = z.prec().0;
    let mut acc = Complex::new(prec);
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

/// Simultaneous Horner evaluation of p and p'.
pub fn horner2(coeffs: &[Complex], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec().0;
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    for c in coeffs.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += c;
    }
    (p, dp)
}

/// Σ|c_k|·max(1,|z|)^k evaluated crudely as ‖p‖_∞·max(1,|z|)^deg; used to
/// normalize residuals.
pub fn residual_scale(coeffs: &[Complex], z: &Complex) -> Float {
    let prec = z.prec().0;
    let mut norm = Float::new(prec);
    for c in coeffs {
        let a = cabs(c);
        if a > norm {
            norm = a;
        }
    }
    let mut m = cabs(z);
    if m < 1u32 {
        m = float(prec, 1.0);
    }
    let deg = coeffs.len().saturating_sub(1) as u32;
    norm * m.pow(deg)
}

/// Gauss–Legendre rule on [-1, 1] at arbitrary precision.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from double-precision seeds.
    pub fn new(order: usize, prec: Prec) -> Self {
        assert!(order >= 2);
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        let n = order as u32;
        for i in 0..order {
            let seed = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut x = float(prec, seed);
            let mut dp = Float::new(prec);
            // Newton converges quadratically; 2 + log2(prec/50) extra sweeps.
            let iters = 6 + (prec / 48);
            for _ in 0..iters {
                let (p, d) = legendre2(n, &x);
                let step = p / &d;
                x -= &step;
                dp = d;
            }
            let one_minus = Float::with_val(prec, 1u32) - Float::with_val(prec, &x * &x);
            let w = Float::with_val(prec, 2u32) / (one_minus * dp.square());
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre2(n: u32, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut pkm1 = Float::with_val(prec, 1u32);
    let mut pk = x.clone();
    if n == 0 {
        return (pkm1, Float::new(prec));
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        let mut next = Float::with_val(prec, 2 * k + 1) * x;
        next *= &pk;
        next -= Float::with_val(prec, k) * &pkm1;
        next /= k + 1;
        pkm1 = pk;
        pk = next;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = Float::with_val(prec, n) * (Float::with_val(prec, x * &pk) - &pkm1);
    let den = Float::with_val(prec, x * x) - 1u32;
    (pk, num / den)
}

/// Unit-circle table e^{2πik/K}, cached per loop pass and shared between the
/// differentials evaluated on the same loop.
#[derive(Debug, Clone)]
pub struct CircleTable {
    pub cos: Vec<Float>,
    pub sin: Vec<Float>,
}

impl CircleTable {
    pub fn new(k: usize, prec: Prec) -> Self {
        let two_pi = pi(prec) * 2u32;
        let mut cos = Vec::with_capacity(k);
        let mut sin = Vec::with_capacity(k);
        for i in 0..k {
            let theta = two_pi.clone() * i as u32 / k as u32;
            let (s, c) = theta.sin_cos(Float::new(prec));
            cos.push(c);
            sin.push(s);
        }
        CircleTable { cos, sin }
    }
}

/// Least-squares straight-line fit of y against x; returns (slope, intercept,
/// R²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let prec = 128;
        let gl = GaussLegendre::new(12, prec);
        // ∫_{-1}^{1} x^k dx = 0 (odd) or 2/(k+1) (even); exact through k = 23.
        for k in 0..=23u32 {
            let mut acc = Float::new(prec);
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                acc += Float::with_val(prec, x.clone().pow(k)) * w;
            }
            let expect = if k % 2 == 1 {
                Float::new(prec)
            } else {
                Float::with_val(prec, 2u32) / (k + 1)
            };
            let err = Float::with_val(prec, &acc - &expect).abs();
            assert!(err < Float::with_val(prec, 1e-30), "k={k} err={err}");
        }
    }

    #[test]
    fn horner_matches_direct_evaluation() {
        let prec = 96;
        let coeffs: Vec<Complex> = [3.0, -2.0, 0.0, 1.0]
            .iter()
            .map(|&c| cplx(prec, c, 0.0))
            .collect();
        let z = cplx(prec, 1.5, -0.5);
        let (p, dp) = horner2(&coeffs, &z);
        // p = 3 - 2z + z^3, p' = -2 + 3z^2
        let z3 = Complex::with_val(prec, z.clone().pow(3u32));
        let expect_p = Complex::with_val(prec, 3.0) - Complex::with_val(prec, 2.0) * &z + z3;
        let expect_dp =
            Complex::with_val(prec, -2.0) + Complex::with_val(prec, 3.0) * z.clone().pow(2u32);
        assert!(dist(&p, &expect_p).to_f64() < 1e-25);
        assert!(dist(&dp, &expect_dp).to_f64() < 1e-25);
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [0.5, -1.5, -3.5, -5.5];
        let (m, b, r2) = linear_fit(&xs, &ys);
        assert!((m + 2.0).abs() < 1e-12);
        assert!((b - 2.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
