//! Simultaneous multiprecision root finding: Aberth–Ehrlich sweeps with
//! deterministic initial guesses, Newton polishing at doubled precision, and
//! simplicity certification.

use crate::error::{Error, Result};
use crate::exact::ExactPoly;
use crate::num::{cabs, cplx, dist, horner2, polar, residual_scale, Prec};
use rug::ops::Pow;
use rug::{Complex, Float};

/// All roots of one polynomial with residuals and the precision they were
/// certified at.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex>,
    /// |P(r)| / (‖P‖·max(1,|r|)^deg) per root.
    pub residuals: Vec<Float>,
    pub precision_bits: Prec,
}

impl RootSet {
    /// JSON export: roots as [re, im] decimal-string pairs plus residuals.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "precision_bits": self.precision_bits,
            "roots": self
                .roots
                .iter()
                .map(|z| vec![
                    z.real().to_string_radix(10, None),
                    z.imag().to_string_radix(10, None),
                ])
                .collect::<Vec<_>>(),
            "residuals": self
                .residuals
                .iter()
                .map(|r| format!("{:.6e}", r.to_f64()))
                .collect::<Vec<_>>(),
        })
    }

    pub fn max_residual(&self) -> Float {
        let prec = self.precision_bits;
        let mut m = Float::new(prec);
        for r in &self.residuals {
            if *r > m {
                m = r.clone();
            }
        }
        m
    }

    pub fn min_pairwise_distance(&self) -> Float {
        let prec = self.precision_bits;
        let mut m = Float::with_val(prec, f64::INFINITY);
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                let d = dist(&self.roots[i], &self.roots[j]);
                if d < m {
                    m = d;
                }
            }
        }
        m
    }
}

/// Find all roots of an exact polynomial.
pub fn find_roots(p: &ExactPoly, precision_bits: Prec) -> Result<RootSet> {
    assert!(p.degree() >= 1, "nonconstant polynomial required");
    assert!(precision_bits >= 64);
    let work = precision_bits + 64;
    let coeffs = p.to_complex_coeffs(work);
    let polish = p.to_complex_coeffs(2 * precision_bits);
    let set = find_roots_inner(&coeffs, &polish, precision_bits)?;
    certify_simple(&set)?;
    Ok(set)
}

/// Find all roots of a polynomial given by complex coefficients (ascending).
pub fn find_roots_complex(coeffs: &[Complex], precision_bits: Prec) -> Result<RootSet> {
    let set = find_roots_complex_uncertified(coeffs, precision_bits)?;
    certify_simple(&set)?;
    Ok(set)
}

/// Same as [`find_roots_complex`] but without the simplicity certificate;
/// callers with their own degeneracy semantics (turning points) use this.
pub fn find_roots_complex_uncertified(
    coeffs: &[Complex],
    precision_bits: Prec,
) -> Result<RootSet> {
    let work = precision_bits + 64;
    let up: Vec<Complex> = coeffs
        .iter()
        .map(|c| Complex::with_val(work, c))
        .collect();
    let polish: Vec<Complex> = coeffs
        .iter()
        .map(|c| Complex::with_val(2 * precision_bits, c))
        .collect();
    find_roots_inner(&up, &polish, precision_bits)
}

fn certify_simple(set: &RootSet) -> Result<()> {
    let precision_bits = set.precision_bits;
    let sep = Float::with_val(precision_bits, 2u32).pow(-(precision_bits as i32) / 4);
    let min_dist = set.min_pairwise_distance();
    if set.roots.len() > 1 && min_dist <= sep {
        return Err(Error::RootsNotSimple {
            distance: format!("{:.3e}", min_dist.to_f64()),
        });
    }
    Ok(())
}

fn find_roots_inner(
    coeffs: &[Complex],
    polish_coeffs: &[Complex],
    precision_bits: Prec,
) -> Result<RootSet> {
    let work = coeffs[0].prec().0;
    // Strip exact zero roots (both polynomial families have at most a simple
    // zero at the origin, which the circle guess handles poorly).
    let mut zero_roots = 0usize;
    let mut lo = 0usize;
    while lo < coeffs.len() - 1 && coeffs[lo].is_zero() {
        zero_roots += 1;
        lo += 1;
    }
    let reduced = &coeffs[lo..];
    let deg = reduced.len() - 1;

    let mut roots: Vec<Complex> = Vec::with_capacity(deg + zero_roots);
    for _ in 0..zero_roots {
        roots.push(Complex::new(work));
    }
    if deg > 0 {
        let guesses = initial_guesses(reduced, work);
        let converged = aberth_sweeps(reduced, guesses, work);
        roots.extend(converged);
    }

    // Newton polish at doubled precision against the full polynomial.
    let polish_prec = polish_coeffs[0].prec().0;
    let mut residuals = Vec::with_capacity(roots.len());
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let mut z = Complex::with_val(polish_prec, &r);
        for _ in 0..4 {
            let (p, dp) = horner2(polish_coeffs, &z);
            if dp.is_zero() {
                break;
            }
            z -= p / dp;
        }
        let (p, _) = horner2(polish_coeffs, &z);
        let scale = residual_scale(polish_coeffs, &z);
        let res = Float::with_val(precision_bits, cabs(&p) / scale);
        residuals.push(res);
        out.push(Complex::with_val(precision_bits, &z));
    }

    let set = RootSet {
        roots: out,
        residuals,
        precision_bits,
    };
    let target = Float::with_val(precision_bits, 2u32).pow(-(precision_bits as i32) / 2);
    let failing: Vec<usize> = set
        .residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r >= target)
        .map(|(i, _)| i)
        .collect();
    if !failing.is_empty() {
        let worst = set.max_residual();
        return Err(Error::RootConvergence {
            failing: failing.len(),
            total: set.roots.len(),
            worst: format!("{:.3e} (indices {:?})", worst.to_f64(), failing),
        });
    }
    Ok(set)
}

/// Deterministic initial guesses on perturbed circles whose radii come from
/// the upper convex hull of (k, ln|a_k|) — the Newton-polygon layout. Each
/// hull edge of horizontal extent m contributes m guesses at the radius
/// given by its slope, which matches the asymptotic distribution of root
/// moduli and keeps the Jacobi sweeps from spending hundreds of iterations
/// untangling a single circle at degree ~200.
fn initial_guesses(coeffs: &[Complex], work: Prec) -> Vec<Complex> {
    let deg = coeffs.len() - 1;
    // ln|a_k| at low precision; absent coefficients stay out of the hull.
    let log_abs: Vec<Option<f64>> = coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                None
            } else {
                Some(Float::with_val(64, cabs(c).ln_ref()).to_f64())
            }
        })
        .collect();
    // Upper convex hull from k = 0 to k = deg.
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for (k, h) in log_abs.iter().enumerate() {
        let Some(h) = *h else { continue };
        while hull.len() >= 2 {
            let (k1, h1) = hull[hull.len() - 2];
            let (k2, h2) = hull[hull.len() - 1];
            // Drop k2 when it lies below the chord k1 → k.
            let cross = (k2 as f64 - k1 as f64) * (h - h1) - (k as f64 - k1 as f64) * (h2 - h1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((k, h));
    }
    let two_pi = crate::num::pi(work) * 2u32;
    let mut out = Vec::with_capacity(deg);
    let mut jitter_state = 0x9e3779b97f4a7c15u64;
    let mut jitter = || {
        jitter_state = jitter_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (jitter_state >> 11) as f64 / (1u64 << 53) as f64
    };
    for w in hull.windows(2) {
        let (k1, h1) = w[0];
        let (k2, h2) = w[1];
        let m = k2 - k1;
        let r = ((h1 - h2) / m as f64).exp();
        let radius = Float::with_val(work, if r.is_finite() && r > 0.0 { r } else { 1.0 });
        for i in 0..m {
            // A golden-angle offset per annulus plus per-point jitter breaks
            // the rotational symmetry of the target root sets, which
            // otherwise stalls the sweep.
            let theta = two_pi.clone()
                * ((i as f64 + 0.371 + 0.61803398875 * k1 as f64 + 0.02 * jitter()) / m as f64);
            out.push(polar(work, &radius, &theta));
        }
    }
    // Degenerate hull (all but one coefficient zero after stripping):
    // fall back to the unit circle.
    while out.len() < deg {
        let theta = two_pi.clone() * (out.len() as f64 + 0.371) / deg as f64;
        out.push(polar(work, &Float::with_val(work, 1u32), &theta));
    }
    out.truncate(deg);
    out
}

/// Horner value, derivative, and the running bound Σ|a_k||z|^k that sets the
/// evaluation-noise floor used by the stopping criterion.
fn horner2_with_bound(coeffs: &[Complex], z: &Complex) -> (Complex, Complex, Float) {
    let prec = z.prec().0;
    let az = cabs(z);
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    let mut bound = Float::new(prec);
    for c in coeffs.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += c;
        bound *= &az;
        bound += cabs(c);
    }
    (p, dp, bound)
}

fn aberth_sweeps(coeffs: &[Complex], mut z: Vec<Complex>, work: Prec) -> Vec<Complex> {
    let deg = z.len();
    let tol = Float::with_val(work, 2u32).pow(-(work as i32) + 8);
    // A root cannot improve once |P(z)| sits at the Horner rounding floor.
    let noise = Float::with_val(work, 2u32).pow(-(work as i32) + 6);
    let max_sweeps = 128 + 2 * deg as u32;
    let mut frozen = vec![false; deg];
    for _ in 0..max_sweeps {
        let mut next = Vec::with_capacity(deg);
        let mut max_step = Float::new(work);
        let mut all_frozen = true;
        for i in 0..deg {
            if frozen[i] {
                next.push(z[i].clone());
                continue;
            }
            let (p, dp, bound) = horner2_with_bound(coeffs, &z[i]);
            if p.is_zero() || cabs(&p) <= Float::with_val(work, &bound * &noise) {
                frozen[i] = true;
                next.push(z[i].clone());
                continue;
            }
            all_frozen = false;
            let w = if dp.is_zero() {
                // Fall back to a nudge; the jittered guesses make this rare.
                cplx(work, 1e-3, 1e-3)
            } else {
                Complex::with_val(work, &p / &dp)
            };
            let mut sum = Complex::new(work);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = Complex::with_val(work, &z[i] - zj);
                    sum += d.recip();
                }
            }
            let denom = Complex::with_val(work, 1u32) - Complex::with_val(work, &w * &sum);
            let step = if denom.is_zero() {
                w.clone()
            } else {
                Complex::with_val(work, &w / &denom)
            };
            let zi = Complex::with_val(work, &z[i] - &step);
            let mut rel = cabs(&step);
            let m = cabs(&zi);
            if m > 1u32 {
                rel /= m;
            }
            if rel > max_step {
                max_step = rel;
            }
            next.push(zi);
        }
        z = next;
        if all_frozen || max_step < tol {
            break;
        }
    }
    z
}

/// Roots of the quartic potential Q(z; s, E) = z⁴ + sz² + 2z + E: the four
/// turning points. Near-degenerate pairs are rejected, signalling a point on
/// or near the elliptic-region boundary.
pub fn quartic_roots(s: &Complex, e: &Complex, precision_bits: Prec) -> Result<[Complex; 4]> {
    let prec = precision_bits;
    let coeffs = [
        Complex::with_val(prec, e),
        cplx(prec, 2.0, 0.0),
        Complex::with_val(prec, s),
        Complex::new(prec),
        cplx(prec, 1.0, 0.0),
    ];
    let set = find_roots_complex_uncertified(&coeffs, precision_bits)?;
    let thresh = Float::with_val(prec, 2u32).pow(-(precision_bits as i32) / 4);
    let min_dist = set.min_pairwise_distance();
    if min_dist <= thresh {
        return Err(Error::DegenerateTurningPoints {
            distance: format!("{:.3e}", min_dist.to_f64()),
        });
    }
    let mut it = set.roots.into_iter();
    Ok([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::vy_polynomials;
    use crate::num::float;
    use rug::Rational;

    fn close(a: &Complex, b: &Complex, tol: f64) -> bool {
        dist(a, b).to_f64() < tol
    }

    #[test]
    fn monomial_root() {
        let p = ExactPoly::from_i64(&[0, 1]);
        let set = find_roots(&p, 128).unwrap();
        assert_eq!(set.roots.len(), 1);
        assert!(cabs(&set.roots[0]).to_f64() < 1e-30);
    }

    #[test]
    fn vy2_roots_are_cube_roots_of_minus_four() {
        let p = ExactPoly::from_i64(&[4, 0, 0, 1]);
        let set = find_roots(&p, 192).unwrap();
        assert_eq!(set.roots.len(), 3);
        let r = 4f64.powf(1.0 / 3.0);
        let prec = 192;
        let expected = [
            cplx(prec, -r, 0.0),
            cplx(
                prec,
                r * (std::f64::consts::PI / 3.0).cos(),
                r * (std::f64::consts::PI / 3.0).sin(),
            ),
            cplx(
                prec,
                r * (std::f64::consts::PI / 3.0).cos(),
                -r * (std::f64::consts::PI / 3.0).sin(),
            ),
        ];
        for e in &expected {
            assert!(
                set.roots.iter().any(|z| close(z, e, 1e-12)),
                "missing root near {e}"
            );
        }
    }

    #[test]
    fn disc2_roots_include_minus_three_halves() {
        let p = ExactPoly::new(vec![
            Rational::from((27, 8)),
            Rational::new(),
            Rational::new(),
            Rational::from(1),
        ]);
        let set = find_roots(&p, 192).unwrap();
        let target = cplx(192, -1.5, 0.0);
        assert!(set.roots.iter().any(|z| close(z, &target, 1e-40)));
    }

    #[test]
    fn residuals_meet_certificate_at_256_bits() {
        let ys = vy_polynomials(8).unwrap();
        let set = find_roots(&ys[8], 256).unwrap();
        assert_eq!(set.roots.len(), 36);
        let bound = float(256, 2.0).pow(-128i32);
        assert!(set.max_residual() < bound);
    }

    #[test]
    fn sum_of_roots_matches_trace() {
        let ys = vy_polynomials(6).unwrap();
        let set = find_roots(&ys[6], 192).unwrap();
        let mut sum = Complex::new(192);
        for r in &set.roots {
            sum += r;
        }
        // Y_6 is monic of degree 21 with zero t^20 coefficient.
        assert!(cabs(&sum).to_f64() < 1e-40);
        // And a case with a nonzero subleading coefficient:
        // (t+1)(t+2)(t+3) has root sum −6.
        let p = ExactPoly::from_i64(&[6, 11, 6, 1]);
        let set = find_roots(&p, 128).unwrap();
        let mut sum = Complex::new(128);
        for r in &set.roots {
            sum += r;
        }
        assert!(dist(&sum, &cplx(128, -6.0, 0.0)).to_f64() < 1e-30);
    }

    #[test]
    fn vy_root_set_is_invariant_under_rotation() {
        let ys = vy_polynomials(5).unwrap();
        let set = find_roots(&ys[5], 192).unwrap();
        // e^{2πi/3} = (−1/2, √3/2) at full precision
        let rot = Complex::with_val(
            192,
            (
                Float::with_val(192, -0.5),
                Float::with_val(192, 3u32).sqrt() / 2u32,
            ),
        );
        for z in &set.roots {
            let zr = Complex::with_val(192, z * &rot);
            assert!(
                set.roots.iter().any(|w| close(w, &zr, 1e-40)),
                "rotation image missing for {z}"
            );
        }
    }

    #[test]
    fn quartic_at_origin() {
        let s = cplx(192, 0.0, 0.0);
        let e = cplx(192, 0.0, 0.0);
        let roots = quartic_roots(&s, &e, 192).unwrap();
        let r = 2f64.powf(1.0 / 3.0);
        let expected = [
            cplx(192, 0.0, 0.0),
            cplx(192, -r, 0.0),
            cplx(
                192,
                r * (std::f64::consts::PI / 3.0).cos(),
                r * (std::f64::consts::PI / 3.0).sin(),
            ),
            cplx(
                192,
                r * (std::f64::consts::PI / 3.0).cos(),
                -r * (std::f64::consts::PI / 3.0).sin(),
            ),
        ];
        for e in &expected {
            assert!(roots.iter().any(|z| close(z, e, 1e-12)));
        }
    }

    #[test]
    fn quartic_degenerate_is_rejected() {
        // On the discriminant locus: s = 0, 16E³ = 27. The f64 seed is only
        // 1e-16 accurate; Newton steps on disc(E) = 16E³ − 27 put E on the
        // locus so the roots collide to ~1e-30.
        let e_val = (27f64 / 16.0).powf(1.0 / 3.0);
        let s = cplx(256, 0.0, 0.0);
        let mut ev = Float::with_val(256, e_val);
        for _ in 0..4 {
            let f = ev.clone().pow(3u32) * 16u32 - 27u32;
            let df = ev.clone().square() * 48u32;
            ev -= f / df;
        }
        let e = Complex::with_val(256, (ev, Float::new(256)));
        match quartic_roots(&s, &e, 256) {
            Err(Error::DegenerateTurningPoints { .. }) => {}
            other => panic!("expected DegenerateTurningPoints, got {other:?}"),
        }
        let _ = e;
    }

    #[test]
    fn root_set_serializes_to_decimal_strings() {
        let p = ExactPoly::from_i64(&[4, 0, 0, 1]);
        let set = find_roots(&p, 128).unwrap();
        let doc = set.to_json();
        assert_eq!(doc["precision_bits"], 128);
        assert_eq!(doc["roots"].as_array().unwrap().len(), 3);
        assert_eq!(doc["residuals"].as_array().unwrap().len(), 3);
        let first = doc["roots"][0][0].as_str().unwrap();
        assert!(first.contains(|c: char| c.is_ascii_digit()));
    }

    #[test]
    fn quartic_conjugate_symmetry() {
        let s = cplx(160, 0.3, 0.1);
        let e = cplx(160, -0.2, 0.25);
        let sc = cplx(160, 0.3, -0.1);
        let ec = cplx(160, -0.2, -0.25);
        let roots = quartic_roots(&s, &e, 160).unwrap();
        let conj_roots = quartic_roots(&sc, &ec, 160).unwrap();
        for z in &roots {
            let zc = Complex::with_val(160, z.conj_ref());
            assert!(conj_roots.iter().any(|w| close(w, &zc, 1e-35)));
        }
    }
}
