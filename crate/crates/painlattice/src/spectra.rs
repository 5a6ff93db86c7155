//! Lattice points with attached spectral data.
//!
//! The Painlevé side: each zero a of Y_n is a pole of the rational solution
//! u_n with residue −1; the Laurent coefficient b at order (t−a)³ fixes the
//! limiting potential through Λ = 7a²/36 + 10b.
//!
//! The oscillator side: each zero t of D_n carries a double eigenvalue λ of
//! the banded operator; the eigen-polynomial p is the quasi-polynomial factor
//! of the eigenfunction, and Λ = λ + t²/4.

use crate::cache::PolyCache;
use crate::error::{Error, Result};
use crate::exact::ExactPoly;
use crate::num::{cabs, carg, dist, Prec};
use crate::roots::{find_roots, find_roots_complex_uncertified};
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

/// One pole of the rational Painlevé-II solution (residue −1) with its
/// Laurent data and WKB scaling.
#[derive(Debug, Clone)]
pub struct JMPoint {
    pub n: usize,
    /// Zero of Y_n.
    pub a: Complex,
    /// Laurent coefficient of (t−a)³ in the expansion of u_n at a.
    pub b: Complex,
    /// Λ = 7a²/36 + 10b.
    pub lambda_big: Complex,
    /// ħ = 1/(n + 1/2).
    pub hbar: Float,
    pub s: Complex,
    pub e: Complex,
}

/// One zero of the spectral discriminant with its double eigenvalue and
/// eigen-polynomial.
#[derive(Debug, Clone)]
pub struct STPoint {
    pub n: usize,
    /// Zero of D_n.
    pub t: Complex,
    /// Midpoint of the split eigenvalue pair of the characteristic polynomial.
    pub lambda_double: Complex,
    /// Λ = λ + t²/4.
    pub lambda_big: Complex,
    /// Monic eigen-polynomial coefficients, ascending, degree exactly n.
    pub p_coeffs: Vec<Complex>,
    /// ħ = 1/(n + 1).
    pub hbar: Float,
    pub s: Complex,
    pub e: Complex,
}

/// x^{2/3} and x^{4/3} for positive real x.
fn frac_pow(x: &Float, num: u32, den: u32) -> Float {
    let prec = x.prec();
    let e = Float::with_val(prec, num) / den;
    let ln = x.clone().ln();
    (ln * e).exp()
}

/// det(M_n(t) − λI) for complex t, as ascending coefficients in λ. Same
/// banded minor recursion as the exact variant.
pub fn char_poly_complex(n: usize, t: &Complex, prec: Prec) -> Vec<Complex> {
    let mul_minus_lambda = |p: &[Complex]| -> Vec<Complex> {
        let mut out = vec![Complex::new(prec)];
        out.extend(p.iter().map(|c| Complex::with_val(prec, -c.clone())));
        out
    };
    let add_scaled = |a: &mut Vec<Complex>, b: &[Complex], c: &Complex| {
        if a.len() < b.len() {
            a.resize(b.len(), Complex::new(prec));
        }
        for (i, x) in b.iter().enumerate() {
            a[i] += Complex::with_val(prec, x * c);
        }
    };
    let u = |i: i64| Float::with_val(prec, -2 * (n as i64 - i));
    let mut d_km3: Vec<Complex> = vec![];
    let mut d_km2 = vec![Complex::with_val(prec, 1u32)];
    let mut d_km1 = vec![Complex::new(prec), Complex::with_val(prec, -1i32)];
    if n == 0 {
        return d_km1;
    }
    for k in 2..=(n as i64 + 1) {
        let mut d = mul_minus_lambda(&d_km1);
        // −u_{k−2}·l_{k−1} with l_i = i·t
        let factor = Float::with_val(prec, -(k - 1)) * u(k - 2);
        let c2 = Complex::with_val(prec, t * factor);
        add_scaled(&mut d, &d_km2, &c2);
        if k >= 3 {
            let w = Float::with_val(prec, (k - 1) * (k - 2));
            let c3 = Complex::with_val(prec, u(k - 2) * u(k - 3) * w);
            add_scaled(&mut d, &d_km3, &c3);
        }
        d_km3 = std::mem::replace(&mut d_km2, std::mem::replace(&mut d_km1, d));
    }
    d_km1
}

/// Monic eigen-polynomial of degree n for eigenvalue λ at parameter t,
/// through the downward coefficient recurrence of
/// p″ + (2x² + t)p′ − 2nxp = λp. Equivalent to the null vector of the
/// transposed spectral matrix shifted by λ (the matrix rows are images of
/// basis monomials, so coefficient vectors transform by the transpose).
pub fn eigen_poly(n: usize, t: &Complex, lambda: &Complex, prec: Prec) -> Vec<Complex> {
    let mut c = vec![Complex::new(prec); n + 3];
    c[n] = Complex::with_val(prec, 1u32);
    for j in (1..=n).rev() {
        // coefficient of x^j: (j+2)(j+1)c_{j+2} + t(j+1)c_{j+1} − 2(n−j+1)c_{j−1} = λc_j
        let mut num = Complex::with_val(
            prec,
            &c[j + 2] * Float::with_val(prec, ((j + 2) * (j + 1)) as u32),
        );
        num += Complex::with_val(prec, t * &c[j + 1]) * Float::with_val(prec, (j + 1) as u32);
        num -= Complex::with_val(prec, lambda * &c[j]);
        c[j - 1] = num / Float::with_val(prec, 2 * (n - j + 1) as u32);
    }
    c.truncate(n + 1);
    c
}

/// Relative coefficient-wise residual of p″ + (2x² + t)p′ − 2nxp − λp.
pub fn ode_residual(n: usize, t: &Complex, lambda: &Complex, p: &[Complex]) -> Float {
    let prec = t.prec().0;
    let deg = p.len() - 1;
    let mut res = vec![Complex::new(prec); deg + 2];
    for (k, c) in p.iter().enumerate() {
        // p″ term
        if k >= 2 {
            res[k - 2] += Complex::with_val(prec, c * Float::with_val(prec, (k * (k - 1)) as u32));
        }
        // (2x² + t) p′
        if k >= 1 {
            res[k + 1] += Complex::with_val(prec, c * Float::with_val(prec, 2 * k as u32));
            res[k - 1] += Complex::with_val(prec, c * t) * Float::with_val(prec, k as u32);
        }
        // −2nx p
        res[k + 1] -= Complex::with_val(prec, c * Float::with_val(prec, 2 * n as u32));
        // −λ p
        res[k] -= Complex::with_val(prec, c * lambda);
    }
    let mut scale = Float::with_val(prec, 1u32);
    for c in p {
        let a = cabs(c);
        if a > scale {
            scale = a;
        }
    }
    let mut worst = Float::new(prec);
    for r in &res {
        let a = cabs(r);
        if a > worst {
            worst = a;
        }
    }
    worst / scale
}

/// The Laurent coefficient b of (t−a)³ in the regular part of u_n at a
/// residue −1 pole a (a zero of Y_n), by truncated series arithmetic on the
/// exact polynomial data evaluated at a.
///
/// Validates the two forced Taylor coefficients on the way: order 1 must be
/// a/6 and order 2 must be −(n−1)/4.
pub fn b_coefficient(
    n: usize,
    a: &Complex,
    y_nm1: &ExactPoly,
    y_n: &ExactPoly,
    precision_bits: Prec,
) -> Result<Complex> {
    let work = precision_bits + 64;
    let a_work = Complex::with_val(work, a);
    // Taylor coefficients P^{(k)}(a)/k! of both polynomials.
    let taylor = |p: &ExactPoly, orders: usize| -> Vec<Complex> {
        let mut out = Vec::with_capacity(orders + 1);
        let mut d = p.clone();
        let mut fact = Rational::from(1);
        for k in 0..=orders {
            if k > 0 {
                fact *= Rational::from(k as u64);
                d = d.derivative();
            }
            let v = d.eval_complex(&a_work);
            out.push(Complex::with_val(work, v / Complex::with_val(work, &fact)));
        }
        out
    };
    let av = taylor(y_nm1, 4);
    let bv = taylor(y_n, 5);

    let tol = Float::with_val(work, 2u32).pow(-(precision_bits as i32) / 3);
    let mut a_scale = cabs(&a_work);
    if a_scale < 1u32 {
        a_scale = Float::with_val(work, 1u32);
    }
    let a_scale2 = a_scale.clone().square();

    // a must be a zero of Y_n (relative to the local coefficient scale).
    let b1_abs = cabs(&bv[1]);
    if cabs(&bv[0]) > Float::with_val(work, &tol * &b1_abs) * &a_scale {
        return Err(Error::LaurentValidation {
            detail: format!("Y_n(a) not negligible: |Y_n(a)| = {:.3e}", cabs(&bv[0]).to_f64()),
        });
    }

    // u + 1/(t−a) = Y′_{n−1}/Y_{n−1} − g′/g with Y_n(a+ε) = ε·g(ε).
    let series_div = |num: &[Complex], den: &[Complex], k: usize| -> Vec<Complex> {
        let mut out: Vec<Complex> = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut v = num[i].clone();
            for (j, o) in out.iter().enumerate() {
                v -= Complex::with_val(work, o * &den[i - j]);
            }
            out.push(v / &den[0]);
        }
        out
    };
    let a_deriv: Vec<Complex> = (0..4)
        .map(|k| Complex::with_val(work, &av[k + 1] * Float::with_val(work, (k + 1) as u32)))
        .collect();
    let log_deriv_num = series_div(&a_deriv, &av[..4], 3);
    let g: Vec<Complex> = bv[1..=5].to_vec();
    let gp: Vec<Complex> = (0..4)
        .map(|k| Complex::with_val(work, &g[k + 1] * Float::with_val(work, (k + 1) as u32)))
        .collect();
    let s_series = series_div(&gp, &g[..4], 3);
    let h: Vec<Complex> = (0..4)
        .map(|k| Complex::with_val(work, &log_deriv_num[k] - &s_series[k]))
        .collect();

    // Forced coefficients: h0 = 0, h1 = a/6, h2 = −(n−1)/4.
    let c1_target = Complex::with_val(work, &a_work / Float::with_val(work, 6u32));
    let c2_target = Complex::with_val(work, Float::with_val(work, -((n as i32) - 1)) / 4u32);
    let checks = [
        (cabs(&h[0]), "order 0"),
        (dist(&h[1], &c1_target), "order 1 (a/6)"),
        (dist(&h[2], &c2_target), "order 2 (−(n−1)/4)"),
    ];
    let n_scale = Float::with_val(work, (n * n) as u32 + 1);
    for (err, what) in checks {
        if err > Float::with_val(work, &tol * &a_scale2) * &n_scale {
            return Err(Error::LaurentValidation {
                detail: format!("{what} coefficient off by {:.3e}", err.to_f64()),
            });
        }
    }
    Ok(Complex::with_val(precision_bits, &h[3]))
}

/// All residue −1 pole points of u_n with Laurent data and WKB scaling,
/// sorted by angle then modulus.
pub fn jm_points(n: usize, precision_bits: Prec, cache: &PolyCache) -> Result<Vec<JMPoint>> {
    assert!(n >= 1);
    let family = cache.vy_family(n)?;
    let root_set = find_roots(&family[n], precision_bits)?;
    let hbar = Float::with_val(precision_bits, Rational::from((2u64, 2 * n as u64 + 1)));
    let h23 = frac_pow(&hbar, 2, 3);
    let h43 = frac_pow(&hbar, 4, 3);
    let mut points = Vec::with_capacity(root_set.roots.len());
    for a in &root_set.roots {
        let b = b_coefficient(n, a, &family[n - 1], &family[n], precision_bits)?;
        // Λ = 7a²/36 + 10b
        let mut lambda_big = Complex::with_val(precision_bits, a * a) * 7u32;
        lambda_big /= 36u32;
        lambda_big += Complex::with_val(precision_bits, &b * Float::with_val(precision_bits, 10));
        let s = Complex::with_val(precision_bits, a * &h23);
        let e = Complex::with_val(precision_bits, &lambda_big * &h43);
        points.push(JMPoint {
            n,
            a: a.clone(),
            b,
            lambda_big,
            hbar: hbar.clone(),
            s,
            e,
        });
    }
    sort_by_angle(&mut points, |p| &p.a);
    Ok(points)
}

/// All repeated-eigenvalue points of the ES spectrum at parameter n, sorted
/// by angle then modulus.
pub fn st_points(n: usize, precision_bits: Prec, cache: &PolyCache) -> Result<Vec<STPoint>> {
    assert!(n >= 1);
    let dn = cache.disc_poly(n)?;
    let root_set = find_roots(&dn, precision_bits)?;
    let hbar = Float::with_val(precision_bits, Rational::from((1u64, n as u64 + 1)));
    let h23 = frac_pow(&hbar, 2, 3);
    let h43 = frac_pow(&hbar, 4, 3);
    let mut points = Vec::with_capacity(root_set.roots.len());
    for t in &root_set.roots {
        let (lambda, p_coeffs) = double_eigenvalue(n, t, precision_bits)?;
        let mut lambda_big = Complex::with_val(precision_bits, t * t);
        lambda_big /= 4u32;
        lambda_big += &lambda;
        let s = Complex::with_val(precision_bits, t * &h23);
        let e = Complex::with_val(precision_bits, &lambda_big * &h43);
        points.push(STPoint {
            n,
            t: t.clone(),
            lambda_double: lambda,
            lambda_big,
            p_coeffs,
            hbar: hbar.clone(),
            s,
            e,
        });
    }
    sort_by_angle(&mut points, |p| &p.t);
    Ok(points)
}

/// Locate the split eigenvalue pair of C_n(t, ·) and return its midpoint and
/// the monic eigen-polynomial. Retries once at doubled precision when the
/// cluster is not well separated.
fn double_eigenvalue(
    n: usize,
    t: &Complex,
    precision_bits: Prec,
) -> Result<(Complex, Vec<Complex>)> {
    for attempt in 0..2 {
        let prec = precision_bits << attempt;
        let work = prec + 64;
        let t_work = Complex::with_val(work, t);
        let cp = char_poly_complex(n, &t_work, work);
        let eigs = find_roots_complex_uncertified(&cp, prec)?;
        match cluster_pair(&eigs.roots) {
            Ok((i, j)) => {
                let mut lambda = Complex::with_val(prec, &eigs.roots[i] + &eigs.roots[j]);
                lambda /= 2u32;
                let p = eigen_poly(n, &Complex::with_val(work, t), &Complex::with_val(work, &lambda), work);
                let p: Vec<Complex> = p.iter().map(|c| Complex::with_val(precision_bits, c)).collect();
                return Ok((Complex::with_val(precision_bits, &lambda), p));
            }
            Err(ratio) if attempt == 0 => {
                let _ = ratio;
                continue;
            }
            Err(ratio) => {
                return Err(Error::AmbiguousCluster {
                    t: format!("{:.6e}", cabs(&t_work).to_f64()),
                    ratio,
                });
            }
        }
    }
    unreachable!()
}

/// Find the unique closest pair among eigenvalues; accept only when its gap
/// is a thousandth of the next smallest gap.
fn cluster_pair(eigs: &[Complex]) -> std::result::Result<(usize, usize), f64> {
    let mut best = (f64::INFINITY, 0usize, 0usize);
    let mut second = f64::INFINITY;
    for i in 0..eigs.len() {
        for j in i + 1..eigs.len() {
            let d = dist(&eigs[i], &eigs[j]).to_f64();
            if d < best.0 {
                second = best.0;
                best = (d, i, j);
            } else if d < second {
                second = d;
            }
        }
    }
    let ratio = best.0 / second;
    if ratio < 1e-3 {
        Ok((best.1, best.2))
    } else {
        Err(ratio)
    }
}

fn sort_by_angle<T>(points: &mut [T], loc: impl Fn(&T) -> &Complex) {
    points.sort_by(|x, y| {
        let (ax, ay) = (carg(loc(x)), carg(loc(y)));
        ax.partial_cmp(&ay)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                cabs(loc(x))
                    .partial_cmp(&cabs(loc(y)))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
}
