//! Wedge-contour integrals of quasi-polynomials p(x)·e^{2θ(x;t)},
//! θ = x³/3 + tx/2.
//!
//! The contours γ (∞₁ → ∞₃) and γ̃ (∞₃ → ∞₅) are realized as ray pairs
//! through the origin: the integrand is entire and decays in the wedge
//! directions e^{iπ/3}, e^{iπ}, e^{i5π/3}, so the straight rays are
//! homotopic to any wedge path. Vanishing is always measured relative to the
//! companion scale integral ∫|integrand||dz| — the raw integrals grow like
//! e^{cn} and absolute thresholds would be meaningless.

use crate::error::{Error, Result};
use crate::num::{cabs, horner, GaussLegendre, Prec};
use crate::roots::find_roots_complex;
use rug::ops::Pow;
use rug::{Complex, Float};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contour {
    /// ∞₁ → ∞₃
    Gamma,
    /// ∞₃ → ∞₅
    GammaTilde,
}

/// What to put under the integral sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WedgeMode {
    /// p(x)·x^k·e^{2θ}
    Moment(usize),
    /// p(x)²·e^{2θ}
    Squared,
}

/// Gauss–Legendre panel quadrature along the three decay rays, truncated
/// where e^{2Reθ} drops below the precision target.
#[derive(Debug, Clone)]
pub struct WedgeQuadrature {
    pub precision_bits: Prec,
    pub truncation_radius: Float,
    pub nodes_per_ray: usize,
    panels: usize,
    rule: GaussLegendre,
}

const GL_ORDER: usize = 24;

impl WedgeQuadrature {
    /// Build the quadrature for parameter t: truncate where
    /// 2Reθ < −(precision_bits + 32)·ln 2 on all three decay rays, with one
    /// automatic extension before giving up.
    pub fn new(t: &Complex, precision_bits: Prec, nodes_per_ray: usize) -> Result<Self> {
        let prec = precision_bits + 32;
        let target = (precision_bits as f64 + 32.0) * std::f64::consts::LN_2;
        // On a decay ray d (d³ = −1): 2Reθ(rd) = −2r³/3 + r·Re(td).
        let t_f = (t.real().to_f64(), t.imag().to_f64());
        let mut slope_max: f64 = 0.0;
        for k in [1.0f64, 3.0, 5.0] {
            let ang = k * std::f64::consts::PI / 3.0;
            let re_td = t_f.0 * ang.cos() - t_f.1 * ang.sin();
            slope_max = slope_max.max(re_td);
        }
        let mut r = (1.5 * target).cbrt();
        for _ in 0..6 {
            r = (1.5 * (target + slope_max.max(0.0) * r)).cbrt();
        }
        r *= 1.05;
        for attempt in 0..2 {
            if decay_ok(t, r, target, prec) {
                let panels = nodes_per_ray.div_ceil(GL_ORDER);
                let panels = panels.max(12);
                return Ok(WedgeQuadrature {
                    precision_bits,
                    truncation_radius: Float::with_val(prec, r),
                    nodes_per_ray: panels * GL_ORDER,
                    panels,
                    rule: GaussLegendre::new(GL_ORDER, prec),
                });
            }
            if attempt == 0 {
                r *= 1.3;
            }
        }
        Err(Error::WedgeDecay {
            radius: r,
            t: format!("{t}"),
        })
    }

    /// Same rule with twice the panels (refinement studies).
    pub fn refined(&self) -> Self {
        WedgeQuadrature {
            precision_bits: self.precision_bits,
            truncation_radius: self.truncation_radius.clone(),
            nodes_per_ray: self.nodes_per_ray * 2,
            panels: self.panels * 2,
            rule: self.rule.clone(),
        }
    }
}

fn decay_ok(t: &Complex, r: f64, target: f64, prec: Prec) -> bool {
    for k in [1u32, 3, 5] {
        let ang = Float::with_val(prec, k) * crate::num::pi(prec) / 3u32;
        let (s, c) = ang.sin_cos(Float::new(prec));
        let d = Complex::with_val(prec, (c, s));
        let z = Complex::with_val(prec, &d * Float::with_val(prec, r));
        let two_theta = two_theta_at(&z, t);
        if two_theta.real().to_f64() > -target {
            return false;
        }
    }
    true
}

fn two_theta_at(z: &Complex, t: &Complex) -> Complex {
    let prec = z.prec().0;
    let z2 = Complex::with_val(prec, z * z);
    let z3 = Complex::with_val(prec, &z2 * z);
    let mut out = Complex::with_val(prec, &z3 * Float::with_val(prec, 2u32));
    out /= 3u32;
    out += Complex::with_val(prec, t * z);
    out
}

fn ray_direction(k: u32, prec: Prec) -> Complex {
    let ang = Float::with_val(prec, k) * crate::num::pi(prec) / 3u32;
    let (s, c) = ang.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// ∫_0^{R·d} f(x) dx and ∫ |f||dx| along one ray, by Gauss–Legendre panels.
fn ray_integral(
    f: &impl Fn(&Complex) -> Complex,
    dir: &Complex,
    wq: &WedgeQuadrature,
) -> (Complex, Float) {
    let prec = dir.prec().0;
    let r = &wq.truncation_radius;
    let mut total = Complex::new(prec);
    let mut scale = Float::new(prec);
    for p in 0..wq.panels {
        let a = Float::with_val(prec, r * Float::with_val(prec, p as f64 / wq.panels as f64));
        let b = Float::with_val(prec, r * Float::with_val(prec, (p + 1) as f64 / wq.panels as f64));
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        let half = Float::with_val(prec, &b - &a) / 2u32;
        for (x, w) in wq.rule.nodes.iter().zip(&wq.rule.weights) {
            let rr = Float::with_val(prec, &mid + Float::with_val(prec, x * &half));
            let z = Complex::with_val(prec, dir * rr);
            let v = f(&z);
            let weight = Float::with_val(prec, w * &half);
            total += Complex::with_val(prec, &v * &weight);
            scale += Float::with_val(prec, cabs(&v) * weight);
        }
    }
    total *= dir;
    (total, scale)
}

/// Contour integral of the wedge integrand plus its companion scale integral
/// ∫|integrand||dz| over the same rays.
pub fn wedge_integral(
    p_coeffs: &[Complex],
    t: &Complex,
    mode: WedgeMode,
    contour: Contour,
    wq: &WedgeQuadrature,
) -> Result<(Complex, Float)> {
    let prec = wq.precision_bits + 32;
    let t_up = Complex::with_val(prec, t);
    let p_up: Vec<Complex> = p_coeffs.iter().map(|c| Complex::with_val(prec, c)).collect();
    let f = |z: &Complex| -> Complex {
        let pv = horner(&p_up, z);
        let base = match mode {
            WedgeMode::Squared => Complex::with_val(prec, &pv * &pv),
            WedgeMode::Moment(k) => {
                let zk = Complex::with_val(prec, z.clone().pow(k as u32));
                Complex::with_val(prec, &pv * &zk)
            }
        };
        let w = two_theta_at(z, &t_up).exp();
        Complex::with_val(prec, base * w)
    };
    let (from, to) = match contour {
        Contour::Gamma => (1u32, 3u32),
        Contour::GammaTilde => (3u32, 5u32),
    };
    let d_from = ray_direction(from, prec);
    let d_to = ray_direction(to, prec);
    let (v_from, s_from) = ray_integral(&f, &d_from, wq);
    let (v_to, s_to) = ray_integral(&f, &d_to, wq);
    // ∞_from → 0 → ∞_to
    let value = Complex::with_val(wq.precision_bits, &v_to - &v_from);
    let scale = Float::with_val(wq.precision_bits, &s_from + &s_to);
    Ok((value, scale))
}

/// σ₂/σ₁ of the scale-normalized 2×(n+1) moment matrix with rows
/// (∫_γ p x^k e^{2θ})_k and (∫_γ̃ p x^k e^{2θ})_k. A tiny ratio certifies a
/// nonzero weight pair (κ, κ̃) annihilating all n+1 moments, i.e. degenerate
/// orthogonality, without ever integrating the fragile 1/F² densities.
pub fn degeneracy_rank_check(
    p_coeffs: &[Complex],
    t: &Complex,
    wq: &WedgeQuadrature,
) -> Result<Float> {
    let prec = wq.precision_bits + 32;
    let out_prec = wq.precision_bits;
    let n = p_coeffs.len() - 1;
    let t_up = Complex::with_val(prec, t);
    let p_up: Vec<Complex> = p_coeffs.iter().map(|c| Complex::with_val(prec, c)).collect();

    // Per-ray moment vectors, sharing the p·e^{2θ} evaluation across k.
    let mut ray_moments: Vec<Vec<Complex>> = Vec::with_capacity(3);
    for kdir in [1u32, 3, 5] {
        let dir = ray_direction(kdir, prec);
        let mut moments = vec![Complex::new(prec); n + 1];
        let r = &wq.truncation_radius;
        for panel in 0..wq.panels {
            let a = Float::with_val(prec, r * Float::with_val(prec, panel as f64 / wq.panels as f64));
            let b = Float::with_val(
                prec,
                r * Float::with_val(prec, (panel + 1) as f64 / wq.panels as f64),
            );
            let mid = Float::with_val(prec, &a + &b) / 2u32;
            let half = Float::with_val(prec, &b - &a) / 2u32;
            for (x, w) in wq.rule.nodes.iter().zip(&wq.rule.weights) {
                let rr = Float::with_val(prec, &mid + Float::with_val(prec, x * &half));
                let z = Complex::with_val(prec, &dir * rr);
                let base = Complex::with_val(prec, horner(&p_up, &z) * two_theta_at(&z, &t_up).exp());
                let weight = Float::with_val(prec, w * &half);
                let mut term = Complex::with_val(prec, base * weight);
                for m in moments.iter_mut() {
                    *m += &term;
                    term *= &z;
                }
            }
        }
        for m in moments.iter_mut() {
            *m *= &dir;
        }
        ray_moments.push(moments);
    }
    let row = |to: usize, from: usize| -> Vec<Complex> {
        (0..=n)
            .map(|k| Complex::with_val(prec, &ray_moments[to][k] - &ray_moments[from][k]))
            .collect()
    };
    let gamma_row = row(1, 0); // ray π minus ray π/3
    let tilde_row = row(2, 1); // ray 5π/3 minus ray π

    let norm = |row: &[Complex]| -> Float {
        let mut acc = Float::new(prec);
        for c in row {
            acc += Float::with_val(prec, c.norm_ref());
        }
        acc.sqrt()
    };
    let n1 = norm(&gamma_row);
    let n2 = norm(&tilde_row);
    if n1.is_zero() || n2.is_zero() {
        return Err(Error::ZeroMomentMatrix);
    }
    // Gram matrix of the normalized rows; singular values from its
    // eigenvalues (2×2 hermitian).
    let mut g11 = Float::new(prec);
    let mut g22 = Float::new(prec);
    let mut g12 = Complex::new(prec);
    for (a, b) in gamma_row.iter().zip(&tilde_row) {
        let an = Complex::with_val(prec, a / &n1);
        let bn = Complex::with_val(prec, b / &n2);
        g11 += Float::with_val(prec, an.norm_ref());
        g22 += Float::with_val(prec, bn.norm_ref());
        g12 += Complex::with_val(prec, &an * Complex::with_val(prec, bn.conj_ref()));
    }
    let tr = Float::with_val(prec, &g11 + &g22);
    let det = Float::with_val(prec, &g11 * &g22)
        - Float::with_val(prec, g12.norm_ref());
    let half_tr = Float::with_val(prec, &tr / Float::with_val(prec, 2u32));
    let mut disc = Float::with_val(prec, &half_tr * &half_tr) - &det;
    if disc < 0u32 {
        disc = Float::new(prec);
    }
    let root = disc.sqrt();
    let l1 = Float::with_val(prec, &half_tr + &root);
    let mut l2 = Float::with_val(prec, &half_tr - &root);
    if l2 < 0u32 {
        l2 = Float::new(prec);
    }
    Ok(Float::with_val(out_prec, (l2 / l1).sqrt()))
}

/// Max deviation of the roots of p from the Fekete equilibrium
/// θ′(x_j) = Σ_{k≠j} 1/(x_k − x_j), θ′(x) = x² + t/2.
pub fn fekete_check(p_coeffs: &[Complex], t: &Complex, precision_bits: Prec) -> Result<Float> {
    let prec = precision_bits;
    if p_coeffs.len() <= 1 {
        return Ok(Float::new(prec));
    }
    let set = find_roots_complex(p_coeffs, precision_bits)?;
    let roots = &set.roots;
    let mut worst = Float::new(prec);
    for (j, xj) in roots.iter().enumerate() {
        let mut lhs = Complex::with_val(prec, xj * xj);
        lhs += Complex::with_val(prec, t / Float::with_val(prec, 2u32));
        let mut rhs = Complex::new(prec);
        for (k, xk) in roots.iter().enumerate() {
            if k != j {
                let d = Complex::with_val(prec, xk - xj);
                rhs += d.recip();
            }
        }
        let err = cabs(&Complex::with_val(prec, &lhs - &rhs));
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}
