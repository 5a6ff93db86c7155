//! Exact-WKB quantization at the lattice points.
//!
//! Both families quantize truncated Voros symbols 2v_{j0}, with
//! v_{j0} = ħ⁻¹ I_j + ħ S1_j on the three cut cycles:
//!
//! * Painlevé side (ħ⁻¹ = n + ½): 2v_{j0} ≈ −iπ(2k_j + 1) with k_j ≥ 0 and
//!   k₁+k₂+k₃ = n−1.
//! * Oscillator side (ħ⁻¹ = n + 1): 2v_{j0} = ln ξ_j − 2iπ(m_j + 1) where
//!   the ξ targets are −1/(1+τ), −1−1/τ, τ and m₁+m₂+m₃ = n−1.
//!
//! Everything stays in the log domain: the Fock–Goncharov parameters have
//! magnitude e^{O(n)} and only their logs mod 2πi are computable objects.
//! Integer extraction never enforces the sum rule; it is recorded as an
//! independent pass/fail so labeling permutations and precision failures
//! stay visible.

use crate::elliptic::{pair_period, Differential, EllipticData, PeriodConfig, RegionClass};
use crate::error::Result;
use crate::num::{cabs, pi};
use crate::spectra::{JMPoint, STPoint};
use rug::{Complex, Float};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Jm,
    St,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Jm => "JM",
            Kind::St => "ST",
        }
    }
}

/// Extracted quantization integers and residuals for one lattice point.
#[derive(Debug, Clone)]
pub struct QuantRecord {
    pub kind: Kind,
    pub n: usize,
    /// The unscaled location (pole a or discriminant zero t).
    pub location: Complex,
    pub integers: [i64; 3],
    /// Distance to the quantized target in the log coordinate, per cycle.
    pub residuals: [Complex; 3],
    /// All residuals within the π/2 capture window and integers admissible.
    pub quantized: bool,
    /// Whether the extracted integers sum to n − 1 (recorded, never forced).
    pub sum_rule_ok: bool,
    /// Log-domain mismatch of the repeated-eigenvalue identity (ST only).
    pub twoeigs_error: Option<f64>,
    pub region: RegionClass,
    pub include_s1: bool,
}

impl QuantRecord {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| cabs(r).to_f64())
            .fold(0.0, f64::max)
    }
}

/// The three principal-branch log targets ln(−1/(1+τ)), ln(−1−1/τ), ln τ.
/// For Im τ > 0 they sum to 2πi.
pub fn log_targets(tau: &Complex) -> [Complex; 3] {
    let prec = tau.prec().0;
    let one = Complex::with_val(prec, 1u32);
    let mut t1 = Complex::with_val(prec, &one + tau);
    t1 = Complex::with_val(prec, -t1.recip());
    let mut t2 = Complex::with_val(prec, tau.clone().recip());
    t2 += &one;
    t2 = Complex::with_val(prec, -t2);
    [t1.ln(), t2.ln(), Complex::with_val(prec, tau.clone().ln())]
}

/// Quantize a Painlevé pole point against odd multiples of iπ.
pub fn quantize_jm(
    pt: &JMPoint,
    ed: &EllipticData,
    include_s1: bool,
    region: RegionClass,
) -> QuantRecord {
    let prec = pt.a.prec().0;
    let n = pt.n;
    let pi_v = pi(prec);
    let mut integers = [0i64; 3];
    let mut residuals = [
        Complex::new(prec),
        Complex::new(prec),
        Complex::new(prec),
    ];
    let mut quantized = true;
    for j in 0..3 {
        // 2v = (2n+1) I_j + (4/(2n+1)) S1_j
        let mut v = Complex::with_val(prec, &ed.cut_i[j] * Float::with_val(prec, (2 * n + 1) as u32));
        if include_s1 {
            let corr = Float::with_val(prec, 4u32) / Float::with_val(prec, (2 * n + 1) as u32);
            v += Complex::with_val(prec, &ed.s1[j] * corr);
        }
        // nearest −iπ(2k+1): 2k+1 ≈ −Im(v)/π
        let q = Float::with_val(prec, v.imag().clone() / &pi_v);
        let k = ((-q.to_f64() - 1.0) / 2.0).round() as i64;
        let target = Complex::with_val(
            prec,
            (Float::new(prec), Float::with_val(prec, -(2 * k + 1)) * &pi_v),
        );
        let r = Complex::with_val(prec, &v - &target);
        if k < 0 || cabs(&r).to_f64() >= std::f64::consts::FRAC_PI_2 {
            quantized = false;
        }
        integers[j] = k;
        residuals[j] = r;
    }
    let sum_rule_ok = integers.iter().sum::<i64>() == n as i64 - 1;
    QuantRecord {
        kind: Kind::Jm,
        n,
        location: pt.a.clone(),
        integers,
        residuals,
        quantized,
        sum_rule_ok,
        twoeigs_error: None,
        region,
        include_s1,
    }
}

/// Quantize a discriminant-lattice point against the τ-parametrized targets.
pub fn quantize_st(
    pt: &STPoint,
    ed: &EllipticData,
    include_s1: bool,
    region: RegionClass,
) -> QuantRecord {
    let prec = pt.t.prec().0;
    let n = pt.n;
    let pi_v = pi(prec);
    let two_pi = Float::with_val(prec, &pi_v * Float::with_val(prec, 2u32));
    let targets = log_targets(&ed.tau_mod);
    let mut integers = [0i64; 3];
    let mut residuals = [
        Complex::new(prec),
        Complex::new(prec),
        Complex::new(prec),
    ];
    let mut quantized = true;
    for j in 0..3 {
        // 2v = 2(n+1) I_j + (2/(n+1)) S1_j
        let mut v =
            Complex::with_val(prec, &ed.cut_i[j] * Float::with_val(prec, 2 * (n + 1) as u32));
        if include_s1 {
            let corr = Float::with_val(prec, 2u32) / Float::with_val(prec, (n + 1) as u32);
            v += Complex::with_val(prec, &ed.s1[j] * corr);
        }
        let l = Complex::with_val(prec, &v - &targets[j]);
        // nearest −2iπ(m+1): m+1 ≈ −Im(L)/(2π)
        let q = Float::with_val(prec, l.imag().clone() / &two_pi);
        let m = (-q.to_f64() - 1.0).round() as i64;
        let target = Complex::with_val(
            prec,
            (Float::new(prec), Float::with_val(prec, -(m + 1)) * &two_pi),
        );
        let r = Complex::with_val(prec, &l - &target);
        if cabs(&r).to_f64() >= std::f64::consts::FRAC_PI_2 {
            quantized = false;
        }
        integers[j] = m;
        residuals[j] = r;
    }
    let sum_rule_ok = integers.iter().sum::<i64>() == n as i64 - 1;
    QuantRecord {
        kind: Kind::St,
        n,
        location: pt.t.clone(),
        integers,
        residuals,
        quantized,
        sum_rule_ok,
        twoeigs_error: None,
        region,
        include_s1,
    }
}

/// Log-domain mismatch of the repeated-eigenvalue identity
/// exp[(2/ħ)∫_{τ₁}^{τ₂}√Q] = τ + O(ħ): computes the pair-cycle period of
/// {τ₁, τ₂} (leading plus subleading), subtracts ln τ and reduces mod 2πi to
/// (−π, π]; the returned |δ| is the relative mismatch proxy.
pub fn check_2eigs(pt: &STPoint, ed: &EllipticData, cfg: &PeriodConfig) -> Result<Float> {
    let prec = cfg.precision_bits;
    let n = pt.n;
    let raw = pair_period(&ed.s, &ed.e, &ed.taus, 1, 2, Differential::SqrtQ, cfg)?;
    // The pair probe lands on an arbitrary sheet; homology pins the sign
    // through J₁₂ − I₃ ∈ iπℤ (J₁₂(0,0) = 2πi/3 against I₃(0,0) = −iπ/3).
    let pi_v = pi(prec);
    let int_defect = |j12: &Complex| -> f64 {
        let d = Complex::with_val(prec, j12 - &ed.cut_i[2]);
        let q = Float::with_val(prec, d.imag() / &pi_v).to_f64();
        (q - q.round()).abs() + d.real().to_f64().abs()
    };
    let neg = Complex::with_val(prec, -raw.clone());
    let (j12, flip) = if int_defect(&raw) <= int_defect(&neg) {
        (raw, false)
    } else {
        (neg, true)
    };
    let mut s12 = pair_period(&ed.s, &ed.e, &ed.taus, 1, 2, Differential::S1, cfg)?;
    if flip {
        s12 = Complex::with_val(prec, -s12);
    }
    let mut delta = Complex::with_val(prec, &j12 * Float::with_val(prec, 2 * (n + 1) as u32));
    delta += Complex::with_val(
        prec,
        &s12 * (Float::with_val(prec, 2u32) / Float::with_val(prec, (n + 1) as u32)),
    );
    delta -= Complex::with_val(prec, ed.tau_mod.clone().ln());
    Ok(cabs(&reduce_mod_2pi_i(&delta)))
}

/// Shift by multiples of 2πi until the imaginary part lies in (−π, π].
pub fn reduce_mod_2pi_i(z: &Complex) -> Complex {
    let prec = z.prec().0;
    let pi_v = pi(prec);
    let two_pi = Float::with_val(prec, &pi_v * Float::with_val(prec, 2u32));
    let mut shifted = Float::with_val(prec, z.imag() + &pi_v);
    shifted /= &two_pi;
    let k = shifted.floor();
    let mut out = Complex::with_val(prec, z);
    let mut corr = Complex::with_val(prec, (Float::new(prec), Float::with_val(prec, &k * &two_pi)));
    corr = -corr;
    out += corr;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cache::PolyCache;
    use crate::num::{cplx, dist};
    use crate::spectra::{jm_points, st_points};

    fn setup(prec: crate::num::Prec) -> (tempfile::TempDir, PolyCache, PeriodConfig) {
        let dir = tempfile::tempdir().unwrap();
        let cache = PolyCache::new(dir.path()).unwrap();
        (dir, cache, PeriodConfig::with_precision(prec))
    }

    #[test]
    fn log_targets_sum_to_two_pi_i() {
        let prec = 192;
        for (re, im) in [(-0.5, 0.75f64.sqrt()), (0.3, 0.8), (-0.2, 1.4)] {
            let tau = cplx(prec, re, im);
            let ts = log_targets(&tau);
            let mut sum = Complex::new(prec);
            for t in &ts {
                sum += t;
            }
            let want = Complex::with_val(prec, (Float::new(prec), pi(prec) * 2u32));
            assert!(dist(&sum, &want).to_f64() < 1e-40, "tau = {tau}");
        }
    }

    #[test]
    fn jm_n1_quantizes_to_zero_triple() {
        let (_d, cache, cfg) = setup(192);
        let pts = jm_points(1, 192, &cache).unwrap();
        let ed = EllipticData::compute(&pts[0].s, &pts[0].e, &cfg).unwrap();
        let rec = quantize_jm(&pts[0], &ed, true, RegionClass::Inside);
        assert_eq!(rec.integers, [0, 0, 0]);
        assert!(rec.sum_rule_ok);
        assert!(rec.quantized);
        assert!(rec.max_residual() < 1e-6);
    }

    #[test]
    fn jm_n2_sum_rule_and_s1_improvement() {
        let (_d, cache, cfg) = setup(192);
        let pts = jm_points(2, 192, &cache).unwrap();
        assert_eq!(pts.len(), 3);
        for pt in &pts {
            let ed = EllipticData::compute(&pt.s, &pt.e, &cfg).unwrap();
            let with = quantize_jm(pt, &ed, true, RegionClass::Inside);
            let without = quantize_jm(pt, &ed, false, RegionClass::Inside);
            assert!(with.sum_rule_ok, "sum rule at {:?}", with.integers);
            assert!(with.quantized);
            assert!(
                with.max_residual() < without.max_residual(),
                "S1 did not improve: {} vs {}",
                with.max_residual(),
                without.max_residual()
            );
            assert!(with.max_residual() < 0.05 * std::f64::consts::PI);
        }
    }

    #[test]
    fn st_n2_sum_rule() {
        let (_d, cache, cfg) = setup(192);
        let pts = st_points(2, 192, &cache).unwrap();
        assert_eq!(pts.len(), 3);
        for pt in &pts {
            let ed = EllipticData::compute(&pt.s, &pt.e, &cfg).unwrap();
            let rec = quantize_st(pt, &ed, true, RegionClass::Inside);
            assert_eq!(rec.integers.iter().sum::<i64>(), 1, "{:?}", rec.integers);
            assert!(rec.quantized);
        }
    }

    #[test]
    fn st_n4_origin_gives_ones_triple() {
        let (_d, cache, cfg) = setup(192);
        let pts = st_points(4, 192, &cache).unwrap();
        let origin_pt = pts
            .iter()
            .min_by(|a, b| cabs(&a.t).partial_cmp(&cabs(&b.t)).unwrap())
            .unwrap();
        let ed = EllipticData::compute(&origin_pt.s, &origin_pt.e, &cfg).unwrap();
        let rec = quantize_st(origin_pt, &ed, true, RegionClass::Inside);
        assert_eq!(rec.integers, [1, 1, 1]);
        assert!(rec.sum_rule_ok);
    }

    #[test]
    fn twoeigs_small_at_origin_anchor() {
        let (_d, cache, cfg) = setup(192);
        let pts = st_points(4, 192, &cache).unwrap();
        let origin_pt = pts
            .iter()
            .min_by(|a, b| cabs(&a.t).partial_cmp(&cabs(&b.t)).unwrap())
            .unwrap();
        let ed = EllipticData::compute(&origin_pt.s, &origin_pt.e, &cfg).unwrap();
        let err = check_2eigs(origin_pt, &ed, &cfg).unwrap();
        assert!(err.to_f64() < 1e-30, "2eigs mismatch {err}");
    }

    #[test]
    fn twoeigs_order_hbar_off_anchor() {
        let (_d, cache, cfg) = setup(192);
        let pts = st_points(2, 192, &cache).unwrap();
        for pt in &pts {
            let ed = EllipticData::compute(&pt.s, &pt.e, &cfg).unwrap();
            let err = check_2eigs(pt, &ed, &cfg).unwrap().to_f64();
            assert!(err < 0.05, "2eigs mismatch {err} at n=2");
        }
    }
}
