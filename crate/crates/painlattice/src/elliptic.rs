//! Period engine for the elliptic curve w² = Q(z; s, E),
//! Q = z⁴ + sz² + 2z + E.
//!
//! All periods are computed as closed-loop trapezoid integrals over ellipses
//! enclosing exactly one pair of turning points, with the branch of √Q
//! transported continuously from its z → ∞ determination (√Q ~ z²) along a
//! straight probe. Half of a counterclockwise loop equals the +-side cut
//! integral between the enclosed turning points; the orientation convention
//! is pinned by the anchors I_j(0,0) = −iπ/3, I₁+I₂+I₃ = −iπ and
//! τ(0,0) = e^{2iπ/3}.
//!
//! The loop formulation treats √Q, 1/√Q and the subleading WKB density on
//! the same footing: integrands are analytic on the loop, so the trapezoid
//! rule converges spectrally, and the cut-endpoint divergence of the
//! subleading density never appears.

use crate::error::{Error, Result};
use crate::num::{cabs, cplx, dist, CircleTable, Prec};
use crate::roots::quartic_roots;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Quadrature and precision knobs for the period engine.
#[derive(Debug, Clone)]
pub struct PeriodConfig {
    pub precision_bits: Prec,
    /// Trapezoid nodes per closed loop.
    pub loop_nodes: usize,
    /// Steps along the straight branch-transport probe.
    pub probe_nodes: usize,
    /// Times the node count may double after a tracking failure.
    pub max_refine: u32,
    /// Central finite-difference step for the (s, E)-derivative checks.
    pub fd_step: f64,
}

impl Default for PeriodConfig {
    fn default() -> Self {
        PeriodConfig {
            precision_bits: 256,
            loop_nodes: 512,
            probe_nodes: 256,
            max_refine: 3,
            fd_step: 1e-4,
        }
    }
}

impl PeriodConfig {
    pub fn with_precision(precision_bits: Prec) -> Self {
        PeriodConfig {
            precision_bits,
            ..Default::default()
        }
    }
}

/// Which differential to integrate along a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differential {
    /// √Q dz — leading WKB action.
    SqrtQ,
    /// dz/√Q — holomorphic differential (half-periods ω, ω′).
    InvSqrtQ,
    /// The non-exact part Q″/(48 Q^{3/2}) dz of the first WKB correction;
    /// the exact remainder −(5/24)(Q^{−1/2})″ has zero loop integral.
    S1,
}

/// Labeled turning points and all period data of one (s, E).
#[derive(Debug, Clone)]
pub struct EllipticData {
    pub s: Complex,
    pub e: Complex,
    /// τ₀..τ₃, labeled by continuation from the (0,0) reference.
    pub taus: [Complex; 4],
    /// Cut periods I_j = ∫_{τ_j}^{τ₀} √Q(z₊) dz, j = 1, 2, 3.
    pub cut_i: [Complex; 3],
    /// Cut periods of the first WKB correction.
    pub s1: [Complex; 3],
    /// ω = ∫_{τ₂}^{τ₀} dz/√Q(z₊).
    pub omega: Complex,
    /// ω′ = ∫_{τ₁}^{τ₀} dz/√Q(z₊).
    pub omega_prime: Complex,
    /// Elliptic modulus τ = ω′/ω, Im τ > 0.
    pub tau_mod: Complex,
}

fn q_at(z: &Complex, s: &Complex, e: &Complex) -> Complex {
    let prec = z.prec().0;
    let z2 = Complex::with_val(prec, z * z);
    let mut q = Complex::with_val(prec, &z2 * &z2);
    q += Complex::with_val(prec, s * &z2);
    q += Complex::with_val(prec, z * Float::with_val(prec, 2u32));
    q += e;
    q
}

fn qpp_at(z: &Complex, s: &Complex) -> Complex {
    let prec = z.prec().0;
    let mut q = Complex::with_val(prec, z * z) * 12u32;
    q += Complex::with_val(prec, s * Float::with_val(prec, 2u32));
    q
}

/// Reference turning points of Q(z; 0, 0) = z(z³ + 2).
fn reference_taus(prec: Prec) -> [Complex; 4] {
    let r = Float::with_val(prec, 2u32).root(3);
    let half = Float::with_val(prec, &r) / 2u32;
    let sq32 = Float::with_val(prec, 3u32).sqrt() * &r / 2u32;
    [
        Complex::new(prec),
        Complex::with_val(prec, (half.clone(), sq32.clone())),
        Complex::with_val(prec, (-r, Float::new(prec))),
        Complex::with_val(prec, (half, -sq32)),
    ]
}

/// Assign labels τ₀..τ₃ by minimal-total-distance matching against the
/// reference configuration at (s, E) = (0, 0). Reliable near the origin;
/// away from it use [`labeled_taus_continued`], which transports the same
/// labels along a path from the origin.
pub fn label_turning_points(roots: &[Complex; 4]) -> Result<[Complex; 4]> {
    let prec = roots[0].prec().0;
    let refs = reference_taus(prec);
    match_labels(roots, &refs)
}

fn match_labels(roots: &[Complex; 4], previous: &[Complex; 4]) -> Result<[Complex; 4]> {
    let mut best = (f64::INFINITY, [0usize; 4]);
    let mut second = f64::INFINITY;
    let mut perm = [0usize, 1, 2, 3];
    permute_all(&mut perm, &mut |p| {
        let mut cost = 0f64;
        for i in 0..4 {
            cost += dist(&roots[p[i]], &previous[i]).to_f64();
        }
        if cost < best.0 {
            second = best.0;
            best = (cost, *p);
        } else if cost < second {
            second = cost;
        }
    });
    if second < best.0 * 1.01 {
        return Err(Error::AmbiguousLabeling {
            margin_percent: 100.0 * (second / best.0 - 1.0),
        });
    }
    let p = best.1;
    Ok([
        roots[p[0]].clone(),
        roots[p[1]].clone(),
        roots[p[2]].clone(),
        roots[p[3]].clone(),
    ])
}

/// Labels continued from the origin: walk (σs, σE) for σ from 0 to 1,
/// matching each step's turning points to the previous step's. Direct
/// matching against the (0,0) reference mislabels by a permutation once the
/// turning points have rotated far enough, which shows up downstream as
/// Im τ < 0 at honest interior points; transporting the labels along a path
/// keeps the assignment consistent across the whole region.
pub fn labeled_taus_continued(s: &Complex, e: &Complex, prec: Prec) -> Result<[Complex; 4]> {
    // The walk is combinatorial: intermediate steps only decide which root
    // is which, so they run at modest precision. Only the endpoint's roots
    // are solved at full precision.
    let walk_prec: Prec = 96;
    let size = cabs(&Complex::with_val(prec, s)).to_f64()
        + cabs(&Complex::with_val(prec, e)).to_f64();
    let mut steps = 4 + (6.0 * size).ceil() as usize;
    let final_roots = quartic_roots(s, e, prec)?;
    'retry: for _ in 0..4 {
        let mut labeled = reference_taus(walk_prec);
        let walk_steps = steps;
        for i in 1..walk_steps {
            let frac = Float::with_val(walk_prec, i as f64 / walk_steps as f64);
            let si = Complex::with_val(walk_prec, s * &frac);
            let ei = Complex::with_val(walk_prec, e * &frac);
            let roots = quartic_roots(&si, &ei, walk_prec)?;
            match match_labels(&roots, &labeled) {
                Ok(next) => labeled = next,
                Err(_) => {
                    steps *= 2;
                    continue 'retry;
                }
            }
        }
        let down: [Complex; 4] = [
            Complex::with_val(walk_prec, &final_roots[0]),
            Complex::with_val(walk_prec, &final_roots[1]),
            Complex::with_val(walk_prec, &final_roots[2]),
            Complex::with_val(walk_prec, &final_roots[3]),
        ];
        match match_labels(&down, &labeled) {
            Ok(assigned) => {
                // Recover the full-precision roots in the assigned order.
                let mut out: Vec<Complex> = Vec::with_capacity(4);
                for a in &assigned {
                    let idx = (0..4)
                        .min_by(|&x, &y| {
                            dist(&down_of(&final_roots[x], walk_prec), a)
                                .partial_cmp(&dist(&down_of(&final_roots[y], walk_prec), a))
                                .unwrap()
                        })
                        .unwrap();
                    out.push(final_roots[idx].clone());
                }
                return Ok([
                    out[0].clone(),
                    out[1].clone(),
                    out[2].clone(),
                    out[3].clone(),
                ]);
            }
            Err(_) => {
                steps *= 2;
                continue 'retry;
            }
        }
    }
    Err(Error::AmbiguousLabeling {
        margin_percent: 0.0,
    })
}

fn down_of(z: &Complex, prec: Prec) -> Complex {
    Complex::with_val(prec, z)
}

fn permute_all(perm: &mut [usize; 4], visit: &mut impl FnMut(&[usize; 4])) {
    fn heap(k: usize, perm: &mut [usize; 4], visit: &mut impl FnMut(&[usize; 4])) {
        if k == 1 {
            visit(perm);
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, visit);
            if k.is_multiple_of(2) {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    heap(4, perm, visit);
}

/// Ellipse with the two enclosed turning points as foci.
struct LoopGeometry {
    center: Complex,
    axis_dir: Complex,
    semi_major: Float,
    semi_minor: Float,
    /// All turning points, so the branch-transport probe can detour around
    /// them (a straight probe occasionally runs through one).
    avoid: Vec<(f64, f64)>,
}

fn build_loop(f1: &Complex, f2: &Complex, others: &[&Complex]) -> Result<LoopGeometry> {
    let prec = f1.prec().0;
    let mut center = Complex::with_val(prec, f1 + f2);
    center /= 2u32;
    let half = Complex::with_val(prec, f2 - f1);
    let foc = cabs(&half) / 2u32;
    if foc.is_zero() {
        return Err(Error::LoopGeometry {
            reason: "coincident foci".into(),
        });
    }
    let axis_dir = Complex::with_val(prec, &half / &cabs(&half));
    let mut dmin = Float::with_val(prec, f64::INFINITY);
    for o in others {
        for anchor in [f1, f2, &center] {
            let d = dist(o, anchor);
            if d < dmin {
                dmin = d;
            }
        }
    }
    let f64_of = |z: &Complex| (z.real().to_f64(), z.imag().to_f64());
    let mut avoid: Vec<(f64, f64)> = vec![f64_of(f1), f64_of(f2)];
    avoid.extend(others.iter().map(|o| f64_of(o)));
    let mut semi_minor = dmin / 2u32;
    for _ in 0..8 {
        let semi_major = Float::with_val(prec, &foc * &foc + Float::with_val(prec, &semi_minor * &semi_minor)).sqrt();
        let clearance_ok = others.iter().all(|o| {
            let sum = dist(o, f1) + dist(o, f2);
            sum > Float::with_val(prec, &semi_major * Float::with_val(prec, 2.04))
        });
        if clearance_ok {
            return Ok(LoopGeometry {
                center,
                axis_dir,
                semi_major,
                semi_minor,
                avoid,
            });
        }
        semi_minor /= 2u32;
        if semi_minor < Float::with_val(prec, &foc * Float::with_val(prec, 1e-4)) {
            break;
        }
    }
    Err(Error::LoopGeometry {
        reason: "another turning point blocks every ellipse around the pair".into(),
    })
}

/// Waypoints from the anchor down to the loop start, detouring around any
/// turning point the straight segment would graze (branch tracking is
/// ambiguous arbitrarily close to a zero of Q regardless of step density).
fn probe_waypoints(anchor: &Complex, z0: &Complex, avoid: &[(f64, f64)], work: Prec) -> Vec<Complex> {
    let to_f = |z: &Complex| (z.real().to_f64(), z.imag().to_f64());
    let mut scale = 0f64;
    for &(x, y) in avoid {
        scale = scale.max((x * x + y * y).sqrt());
    }
    let margin = 0.05 * scale.max(1.0);
    let mut path = vec![to_f(anchor), to_f(z0)];
    for _ in 0..8 {
        let mut worst: Option<(f64, usize, (f64, f64))> = None;
        for i in 0..path.len() - 1 {
            for &tp in avoid {
                let (d, proj) = point_segment_projection(tp, path[i], path[i + 1]);
                // Endpoints may legitimately sit near a focus.
                let at_end = ((proj.0 - path[i].0).powi(2) + (proj.1 - path[i].1).powi(2)) < 1e-20
                    || ((proj.0 - path[i + 1].0).powi(2) + (proj.1 - path[i + 1].1).powi(2))
                        < 1e-20;
                if d < margin && !at_end && worst.as_ref().is_none_or(|w| d < w.0) {
                    worst = Some((d, i, detour_point(tp, proj, margin, avoid)));
                }
            }
        }
        match worst {
            Some((_, i, wp)) => path.insert(i + 1, wp),
            None => break,
        }
    }
    path.iter()
        .map(|&(x, y)| Complex::with_val(work, (Float::with_val(work, x), Float::with_val(work, y))))
        .collect()
}

/// Distance from p to the segment [a, b] and the closest point on it.
fn point_segment_projection(
    p: (f64, f64),
    a: (f64, f64),
    b: (f64, f64),
) -> (f64, (f64, f64)) {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
    };
    let c = (a.0 + t * abx, a.1 + t * aby);
    (((p.0 - c.0).powi(2) + (p.1 - c.1).powi(2)).sqrt(), c)
}

/// A waypoint pushed away from the grazed turning point, on whichever side
/// keeps clear of all the others.
fn detour_point(
    tp: (f64, f64),
    proj: (f64, f64),
    margin: f64,
    avoid: &[(f64, f64)],
) -> (f64, f64) {
    let mut dir = (proj.0 - tp.0, proj.1 - tp.1);
    let norm = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
    if norm < 1e-12 {
        dir = (1.0, 0.0);
    } else {
        dir = (dir.0 / norm, dir.1 / norm);
    }
    let clearance = 3.0 * margin;
    let cand_a = (tp.0 + dir.0 * clearance, tp.1 + dir.1 * clearance);
    let cand_b = (tp.0 - dir.0 * clearance, tp.1 - dir.1 * clearance);
    let min_dist = |c: (f64, f64)| {
        avoid
            .iter()
            .map(|&(x, y)| ((c.0 - x).powi(2) + (c.1 - y).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    };
    if min_dist(cand_a) >= min_dist(cand_b) {
        cand_a
    } else {
        cand_b
    }
}

/// √Q at a far anchor with the z → ∞ determination √Q ~ z².
fn sqrt_q_far(z: &Complex, s: &Complex, e: &Complex) -> Complex {
    let prec = z.prec().0;
    let z2 = Complex::with_val(prec, z * z);
    let mut inner = Complex::with_val(prec, 1u32);
    inner += Complex::with_val(prec, s / &z2);
    let z3 = Complex::with_val(prec, &z2 * z);
    inner += Complex::with_val(prec, Float::with_val(prec, 2u32) / &z3);
    inner += Complex::with_val(prec, e / Complex::with_val(prec, &z2 * &z2));
    Complex::with_val(prec, &z2 * inner.sqrt())
}

/// One continuity step: pick the square root closest to the previous value;
/// report whether the choice was comfortably unambiguous.
fn track_step(prev: &Complex, q: &Complex) -> (Complex, bool) {
    let prec = prev.prec().0;
    let w = Complex::with_val(prec, q.clone().sqrt());
    let d_plus = dist(&w, prev);
    let d_minus = cabs(&Complex::with_val(prec, &w + prev));
    if d_plus <= d_minus {
        let ok = Float::with_val(prec, &d_plus * Float::with_val(prec, 1.5)) < d_minus;
        (w, ok)
    } else {
        let ok = Float::with_val(prec, &d_minus * Float::with_val(prec, 1.5)) < d_plus;
        (Complex::with_val(prec, -w), ok)
    }
}

/// Closed counterclockwise loop integral of the requested differential with
/// continuous branch tracking, refining the node count on tracking failures.
fn loop_integral(
    s: &Complex,
    e: &Complex,
    geom: &LoopGeometry,
    diff: Differential,
    cfg: &PeriodConfig,
    table: Option<&CircleTable>,
) -> Result<Complex> {
    let mut nodes = cfg.loop_nodes;
    let mut probe = cfg.probe_nodes;
    for attempt in 0..=cfg.max_refine {
        let owned;
        let tbl = match (attempt, table) {
            (0, Some(t)) if t.cos.len() == nodes => t,
            _ => {
                owned = CircleTable::new(nodes, cfg.precision_bits + 32);
                &owned
            }
        };
        match loop_integral_once(s, e, geom, diff, probe, tbl, cfg.precision_bits + 32) {
            Ok(v) => return Ok(Complex::with_val(cfg.precision_bits, &v)),
            Err(Error::BranchTracking { .. }) => {
                nodes *= 2;
                probe *= 2;
            }
            Err(other) => return Err(other),
        }
    }
    Err(Error::BranchTracking {
        refinements: cfg.max_refine,
    })
}

fn loop_integral_once(
    s: &Complex,
    e: &Complex,
    geom: &LoopGeometry,
    diff: Differential,
    probe_nodes: usize,
    table: &CircleTable,
    work: Prec,
) -> Result<Complex> {
    let k = table.cos.len();
    let point_at = |i: usize| -> Complex {
        let mut p = Complex::with_val(work, (table.cos[i].clone(), Float::new(work)));
        p *= &geom.semi_major;
        let mut q = Complex::with_val(work, (Float::new(work), table.sin[i].clone()));
        q *= &geom.semi_minor;
        p += q;
        p *= &geom.axis_dir;
        p += &geom.center;
        p
    };
    let tangent_at = |i: usize| -> Complex {
        // dz/dθ = u(−A sinθ + iB cosθ)
        let mut p = Complex::with_val(work, (-table.sin[i].clone(), Float::new(work)));
        p *= &geom.semi_major;
        let mut q = Complex::with_val(work, (Float::new(work), table.cos[i].clone()));
        q *= &geom.semi_minor;
        p += q;
        p *= &geom.axis_dir;
        p
    };

    // Anchor far out in the direction of the loop's start point.
    let z0 = point_at(0);
    let s_up = Complex::with_val(work, s);
    let e_up = Complex::with_val(work, e);
    let mut scale = cabs(&geom.center) + &geom.semi_major;
    if scale < 1u32 {
        scale = Float::with_val(work, 1u32);
    }
    let radius = Float::with_val(work, &scale * Float::with_val(work, 10u32));
    let z0_abs = cabs(&z0);
    let anchor = if z0_abs.is_zero() {
        Complex::with_val(work, (radius.clone(), Float::new(work)))
    } else {
        Complex::with_val(work, &z0 * Float::with_val(work, &radius / &z0_abs))
    };
    let mut w = sqrt_q_far(&anchor, &s_up, &e_up);
    let path = probe_waypoints(&anchor, &z0, &geom.avoid, work);
    for leg in path.windows(2) {
        let step = Complex::with_val(work, &leg[1] - &leg[0]);
        let leg_nodes = probe_nodes.max(16);
        for i in 1..=leg_nodes {
            let mut z =
                Complex::with_val(work, &step * Float::with_val(work, i as f64 / leg_nodes as f64));
            z += &leg[0];
            let q = q_at(&z, &s_up, &e_up);
            let (next, ok) = track_step(&w, &q);
            if !ok {
                return Err(Error::BranchTracking { refinements: 0 });
            }
            w = next;
        }
    }

    let w_start = w.clone();
    let mut total = Complex::new(work);
    for i in 0..k {
        let z = point_at(i);
        let q = q_at(&z, &s_up, &e_up);
        let (wi, ok) = track_step(&w, &q);
        if !ok {
            return Err(Error::BranchTracking { refinements: 0 });
        }
        w = wi.clone();
        let integrand = match diff {
            Differential::SqrtQ => wi,
            Differential::InvSqrtQ => Complex::with_val(work, wi.recip_ref()),
            Differential::S1 => {
                let qpp = qpp_at(&z, &s_up);
                let mut den = Complex::with_val(work, &q * &wi);
                den *= 48u32;
                Complex::with_val(work, qpp / den)
            }
        };
        total += Complex::with_val(work, integrand * tangent_at(i));
    }
    // Branch closure: coming back to θ = 0 must reproduce the start value.
    let (w_end, _) = track_step(&w, &q_at(&point_at(0), &s_up, &e_up));
    let mismatch = dist(&w_end, &w_start);
    if mismatch > Float::with_val(work, &cabs(&w_start) * Float::with_val(work, 1e-6)) {
        return Err(Error::BranchTracking { refinements: 0 });
    }
    let two_pi = crate::num::pi(work) * 2u32;
    total *= Float::with_val(work, &two_pi / Float::with_val(work, k as u32));
    Ok(total)
}

/// The +-side cut integral ∫_{τ_j}^{τ₀} of the requested differential,
/// j ∈ {1, 2, 3}: half of the counterclockwise loop around {τ_j, τ₀}.
pub fn cut_period(
    s: &Complex,
    e: &Complex,
    j: usize,
    diff: Differential,
    cfg: &PeriodConfig,
) -> Result<Complex> {
    assert!((1..=3).contains(&j));
    let prec = cfg.precision_bits;
    let taus = labeled_taus_continued(s, e, prec)?;
    let table = CircleTable::new(cfg.loop_nodes, prec + 32);
    let mut raw = [Complex::new(prec), Complex::new(prec), Complex::new(prec)];
    for k in 1..=3 {
        raw[k - 1] = cut_period_labeled(s, e, &taus, k, Differential::SqrtQ, cfg, Some(&table))?;
    }
    let signs = resolve_cut_signs(&raw)?;
    let v = match diff {
        Differential::SqrtQ => raw[j - 1].clone(),
        _ => cut_period_labeled(s, e, &taus, j, diff, cfg, Some(&table))?,
    };
    if signs[j - 1] < 0 {
        Ok(Complex::with_val(prec, -v))
    } else {
        Ok(v)
    }
}

/// Choose the sheet signs ε_j ∈ {±1} so that Σ ε_j v_j = −iπ. The homology
/// of the three pair cycles pins this exactly; an ambiguous selection means
/// the point sits essentially on the degeneracy locus.
fn resolve_cut_signs(raw: &[Complex; 3]) -> Result<[i8; 3]> {
    let prec = raw[0].prec().0;
    let target = Complex::with_val(prec, (Float::new(prec), -crate::num::pi(prec)));
    let mut best = (f64::INFINITY, [1i8; 3]);
    let mut second = f64::INFINITY;
    for mask in 0..8u8 {
        let signs = [
            if mask & 1 == 0 { 1i8 } else { -1 },
            if mask & 2 == 0 { 1i8 } else { -1 },
            if mask & 4 == 0 { 1i8 } else { -1 },
        ];
        let mut sum = Complex::new(prec);
        for (v, &sg) in raw.iter().zip(&signs) {
            if sg < 0 {
                sum -= v;
            } else {
                sum += v;
            }
        }
        let err = dist(&sum, &target).to_f64();
        if err < best.0 {
            second = best.0;
            best = (err, signs);
        } else if err < second {
            second = err;
        }
    }
    if best.0 > 1e-6 || second < 10.0 * best.0.max(1e-30) {
        return Err(Error::LoopGeometry {
            reason: format!(
                "cut-cycle sign selection ambiguous (best {:.3e}, second {:.3e})",
                best.0, second
            ),
        });
    }
    Ok(best.1)
}

fn cut_period_labeled(
    s: &Complex,
    e: &Complex,
    taus: &[Complex; 4],
    j: usize,
    diff: Differential,
    cfg: &PeriodConfig,
    table: Option<&CircleTable>,
) -> Result<Complex> {
    let others: Vec<&Complex> = (1..4).filter(|&k| k != j).map(|k| &taus[k]).collect();
    let geom = build_loop(&taus[j], &taus[0], &others)?;
    let mut v = loop_integral(s, e, &geom, diff, cfg, table)?;
    v /= 2u32;
    Ok(v)
}

/// Half of the loop integral around an arbitrary pair {τ_i, τ_j}; used for
/// the pair cycle {τ₁, τ₂} entering the repeated-eigenvalue check. The
/// result carries the sheet its probe landed on, i.e. it is only defined up
/// to sign here; the caller pins the sign against a homology relation (the
/// {τ₁,τ₂} cycle satisfies J₁₂ − I₃ ∈ iπℤ, anchored at J₁₂(0,0) = 2πi/3).
pub fn pair_period(
    s: &Complex,
    e: &Complex,
    taus: &[Complex; 4],
    i: usize,
    j: usize,
    diff: Differential,
    cfg: &PeriodConfig,
) -> Result<Complex> {
    assert!(i < 4 && j < 4 && i != j);
    let others: Vec<&Complex> = (0..4).filter(|&k| k != i && k != j).map(|k| &taus[k]).collect();
    let geom = build_loop(&taus[i], &taus[j], &others)?;
    let mut v = loop_integral(s, e, &geom, diff, cfg, None)?;
    v /= 2u32;
    Ok(v)
}

impl EllipticData {
    /// Turning points, the three cut periods of √Q and of the subleading
    /// correction, the holomorphic half-periods and the modulus.
    ///
    /// Each loop's branch is transported independently from the far anchor,
    /// so every loop integral is correct only up to a sign (the sheet its
    /// probe lands on). The signs are then fixed globally by the exact
    /// homology identity I₁+I₂+I₃ = −iπ, which holds with huge margin away
    /// from the degeneracy locus; the selected signs apply to every
    /// differential on the same loop (all are odd in √Q).
    pub fn compute(s: &Complex, e: &Complex, cfg: &PeriodConfig) -> Result<Self> {
        let prec = cfg.precision_bits;
        let s = Complex::with_val(prec, s);
        let e = Complex::with_val(prec, e);
        let taus = labeled_taus_continued(&s, &e, prec)?;
        let table = CircleTable::new(cfg.loop_nodes, prec + 32);
        let mut raw = [Complex::new(prec), Complex::new(prec), Complex::new(prec)];
        for j in 1..=3 {
            raw[j - 1] =
                cut_period_labeled(&s, &e, &taus, j, Differential::SqrtQ, cfg, Some(&table))?;
        }
        let signs = resolve_cut_signs(&raw)?;
        let mut cut_i = raw;
        for (v, &sg) in cut_i.iter_mut().zip(&signs) {
            if sg < 0 {
                *v = Complex::with_val(prec, -v.clone());
            }
        }
        let mut s1 = [Complex::new(prec), Complex::new(prec), Complex::new(prec)];
        for j in 1..=3 {
            let v = cut_period_labeled(&s, &e, &taus, j, Differential::S1, cfg, Some(&table))?;
            s1[j - 1] = if signs[j - 1] < 0 {
                Complex::with_val(prec, -v)
            } else {
                v
            };
        }
        let raw_omega =
            cut_period_labeled(&s, &e, &taus, 2, Differential::InvSqrtQ, cfg, Some(&table))?;
        let raw_omega_prime =
            cut_period_labeled(&s, &e, &taus, 1, Differential::InvSqrtQ, cfg, Some(&table))?;
        let omega = if signs[1] < 0 {
            Complex::with_val(prec, -raw_omega)
        } else {
            raw_omega
        };
        let omega_prime = if signs[0] < 0 {
            Complex::with_val(prec, -raw_omega_prime)
        } else {
            raw_omega_prime
        };
        let tau_mod = Complex::with_val(prec, &omega_prime / &omega);
        if tau_mod.imag().partial_cmp(&Float::new(prec)) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::TauOrientation {
                imag: format!("{:.6e}", tau_mod.imag().to_f64()),
            });
        }
        Ok(EllipticData {
            s,
            e,
            taus,
            cut_i,
            s1,
            omega,
            omega_prime,
            tau_mod,
        })
    }

    /// Sum of the three √Q cut periods; −iπ up to quadrature error (the
    /// sign selection only needs 10⁻⁶; tests assert far tighter).
    pub fn cut_sum(&self) -> Complex {
        let prec = self.s.prec().0;
        let mut sum = Complex::new(prec);
        for v in &self.cut_i {
            sum += v;
        }
        sum
    }

    /// Sum of the three S₁ cut periods; 0 up to quadrature error.
    pub fn s1_sum(&self) -> Complex {
        let prec = self.s.prec().0;
        let mut sum = Complex::new(prec);
        for v in &self.s1 {
            sum += v;
        }
        sum
    }
}

/// ω, ω′ and τ = ω′/ω for one (s, E).
pub fn half_periods_and_tau(
    s: &Complex,
    e: &Complex,
    cfg: &PeriodConfig,
) -> Result<(Complex, Complex, Complex)> {
    let ed = EllipticData::compute(s, e, cfg)?;
    Ok((ed.omega, ed.omega_prime, ed.tau_mod))
}

/// S₁ cut period by central finite differences of the √Q cut period through
/// the operator −∂²/∂s∂E − (s/6)∂²/∂E²; an independent cross-check of the
/// direct quadrature.
pub fn s1_period_fd(
    s: &Complex,
    e: &Complex,
    j: usize,
    h_fd: f64,
    cfg: &PeriodConfig,
) -> Result<Complex> {
    let prec = cfg.precision_bits;
    let h = Float::with_val(prec, h_fd);
    let i_at = |ds: i32, de: i32| -> Result<Complex> {
        let mut sv = Complex::with_val(prec, s);
        sv += Complex::with_val(prec, (Float::with_val(prec, ds) * &h, Float::new(prec)));
        let mut ev = Complex::with_val(prec, e);
        ev += Complex::with_val(prec, (Float::with_val(prec, de) * &h, Float::new(prec)));
        cut_period(&sv, &ev, j, Differential::SqrtQ, cfg)
    };
    // ∂²/∂s∂E by the four-corner stencil.
    let mut mixed = i_at(1, 1)?;
    mixed -= i_at(1, -1)?;
    mixed -= i_at(-1, 1)?;
    mixed += i_at(-1, -1)?;
    let h2 = Float::with_val(prec, &h * &h);
    mixed /= Complex::with_val(prec, (Float::with_val(prec, &h2 * Float::with_val(prec, 4u32)), Float::new(prec)));
    // ∂²/∂E² by the three-point stencil.
    let mut second = i_at(0, 1)?;
    second += i_at(0, -1)?;
    second -= Complex::with_val(prec, i_at(0, 0)? * Float::with_val(prec, 2u32));
    second /= Complex::with_val(prec, (h2, Float::new(prec)));
    let mut out = Complex::with_val(prec, -mixed);
    out -= Complex::with_val(prec, s * second) / 6u32;
    Ok(out)
}

/// Finite-difference Jacobian determinant of the full periods with respect
/// to (s, E); the analytic value is iπ. The rows are the full A and B
/// periods (2I₁, 2I₂), oriented so the intersection pairing is positive.
pub fn jacobian_check(s: &Complex, e: &Complex, h_fd: f64, cfg: &PeriodConfig) -> Result<Complex> {
    let prec = cfg.precision_bits;
    let h = Float::with_val(prec, h_fd);
    let period = |j: usize, ds: i32, de: i32| -> Result<Complex> {
        let mut sv = Complex::with_val(prec, s);
        sv += Complex::with_val(prec, (Float::with_val(prec, ds) * &h, Float::new(prec)));
        let mut ev = Complex::with_val(prec, e);
        ev += Complex::with_val(prec, (Float::with_val(prec, de) * &h, Float::new(prec)));
        let mut v = cut_period(&sv, &ev, j, Differential::SqrtQ, cfg)?;
        v *= 2u32;
        Ok(v)
    };
    let two_h = Float::with_val(prec, &h * Float::with_val(prec, 2u32));
    let deriv = |j: usize, ds: i32, de: i32| -> Result<Complex> {
        let mut d = period(j, ds, de)?;
        d -= period(j, -ds, -de)?;
        d /= Complex::with_val(prec, (two_h.clone(), Float::new(prec)));
        Ok(d)
    };
    let da_ds = deriv(1, 1, 0)?;
    let da_de = deriv(1, 0, 1)?;
    let db_ds = deriv(2, 1, 0)?;
    let db_de = deriv(2, 0, 1)?;
    let mut det = Complex::with_val(prec, &da_ds * &db_de);
    det -= Complex::with_val(prec, &da_de * &db_ds);
    Ok(det)
}

/// How a scaled point sits relative to the elliptic region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionClass {
    Inside,
    Outside,
    NearBoundary,
}

/// The closed boundary of the elliptic region in the s-plane.
#[derive(Debug, Clone)]
pub struct RegionBoundary {
    /// Closed polyline (last point joins the first), as (Re s, Im s).
    pub polyline: Vec<(f64, f64)>,
    /// The three corners s₀·e^{2πik/3}, s₀ = −3/2^{1/3}.
    pub corners: [(f64, f64); 3],
}

/// Boundary condition along one branch of R = ±√(2a³+1):
/// Re[(4a³−1)/(6a³)·R + ln((1−R)/(a^{3/2}√2))], and the a-derivative of the
/// analytic continuation (only the real part is level-set traced, so the
/// 2πi ambiguity of the log never enters).
fn boundary_g(a: &Complex, r: &Complex) -> (Float, Complex) {
    let prec = a.prec().0;
    let a2 = Complex::with_val(prec, a * a);
    let a3 = Complex::with_val(prec, &a2 * a);
    let four_a3 = Complex::with_val(prec, &a3 * Float::with_val(prec, 4u32));
    let num = Complex::with_val(prec, &four_a3 - Float::with_val(prec, 1u32));
    let den = Complex::with_val(prec, &a3 * Float::with_val(prec, 6u32));
    let term1 = Complex::with_val(prec, num * r) / den;
    let one_minus_r = Complex::with_val(prec, Float::with_val(prec, 1u32) - r.clone());
    let mut u = Float::with_val(prec, term1.real());
    u += cabs(&one_minus_r).ln();
    u -= Float::with_val(prec, cabs(a).ln() * Float::with_val(prec, 1.5));
    u -= Float::with_val(prec, 2u32).ln() / 2u32;
    // G′(a) = R/(2a⁴) + (4a³−1)/(2aR) − 3a²/(R(1−R)) − 3/(2a)
    let a4 = Complex::with_val(prec, &a3 * a);
    let mut gp = Complex::with_val(prec, r / &a4) / 2u32;
    let mut t2 = Complex::with_val(prec, &four_a3 - Float::with_val(prec, 1u32));
    t2 /= Complex::with_val(prec, a * r);
    t2 /= 2u32;
    gp += t2;
    let mut t3 = Complex::with_val(prec, a * a) * 3u32;
    t3 /= Complex::with_val(prec, r * &one_minus_r);
    gp -= t3;
    let mut t4 = Complex::with_val(prec, a.clone().recip());
    t4 *= Float::with_val(prec, 1.5);
    gp -= t4;
    (u, gp)
}

fn track_r(a: &Complex, prev: &Complex) -> Complex {
    let prec = a.prec().0;
    let a2 = Complex::with_val(prec, a * a);
    let mut arg = Complex::with_val(prec, &a2 * a);
    arg *= 2u32;
    arg += 1u32;
    let (r, _) = track_step(prev, &arg);
    r
}

/// Trace the elliptic-region boundary: the zero level set of the real
/// condition in the a-plane, mapped to the s-plane through
/// s = (4a³−1)/(2a²), one edge traced by predictor–corrector continuation
/// from its real-axis seed and the other two obtained by the Z₃ rotation.
pub fn region_boundary(resolution: usize) -> Result<RegionBoundary> {
    assert!(resolution >= 100, "resolution must be at least 100 per arc");
    let prec: Prec = 96;
    let s0 = -(3.0 / 2f64.powf(1.0 / 3.0));
    let corner_complex = |k: u32| -> (f64, f64) {
        let ang = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
        (s0 * ang.cos(), s0 * ang.sin())
    };
    let corners = [corner_complex(0), corner_complex(1), corner_complex(2)];

    // Seed: the real-axis solution a* with the principal branch, between the
    // triple point a = 2^{-1/3} and a = 1.2 (sign change checked on entry).
    let eval_real = |x: f64| -> f64 {
        let a = cplx(prec, x, 0.0);
        let mut arg = Complex::with_val(prec, a.clone().pow(3u32));
        arg *= 2u32;
        arg += 1u32;
        let r = Complex::with_val(prec, arg.sqrt());
        boundary_g(&a, &r).0.to_f64()
    };
    let (mut lo, mut hi) = (2f64.powf(-1.0 / 3.0) + 1e-6, 1.3);
    if eval_real(lo) >= 0.0 || eval_real(hi) <= 0.0 {
        return Err(Error::ContinuationStall {
            a: "real-axis seed bracket lost".into(),
        });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eval_real(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a_star = 0.5 * (lo + hi);

    // Corners in the a-plane: the complex cube roots of −1/2.
    let third = Float::with_val(prec, 2f64).root(3).recip();
    let a_corners = [
        cplx(prec, third.to_f64() * 0.5, third.to_f64() * 0.5 * 3f64.sqrt()),
        cplx(prec, third.to_f64() * 0.5, -third.to_f64() * 0.5 * 3f64.sqrt()),
        cplx(prec, -third.to_f64(), 0.0),
    ];

    let s_of = |a: &Complex| -> Complex {
        let p = a.prec().0;
        let a3 = Complex::with_val(p, a.clone().pow(3u32));
        let mut num = Complex::with_val(p, &a3 * Float::with_val(p, 4u32));
        num -= 1u32;
        let mut den = Complex::with_val(p, a * a);
        den *= 2u32;
        num / den
    };

    let h = 2.2 / resolution as f64;
    let trace = |direction: f64| -> Result<Vec<Complex>> {
        let mut a = cplx(prec, a_star, 0.0);
        let mut r = {
            let mut arg = Complex::with_val(prec, a.clone().pow(3u32));
            arg *= 2u32;
            arg += 1u32;
            Complex::with_val(prec, arg.sqrt())
        };
        let mut pts = Vec::new();
        for _ in 0..resolution * 12 {
            let (_, gp) = boundary_g(&a, &r);
            // grad u = (Re G′, −Im G′); level-set tangent is its rotation.
            let tangent = Complex::with_val(
                prec,
                (
                    Float::with_val(prec, gp.imag()),
                    Float::with_val(prec, gp.real()),
                ),
            );
            let t_norm = cabs(&tangent);
            if t_norm.is_zero() {
                return Err(Error::ContinuationStall {
                    a: format!("{:.4}+{:.4}i", a.real().to_f64(), a.imag().to_f64()),
                });
            }
            let mut step = Complex::with_val(prec, &tangent / &t_norm);
            step *= Float::with_val(prec, h * direction);
            let mut a_next = Complex::with_val(prec, &a + &step);
            let mut r_next = track_r(&a_next, &r);
            // Corrector: Newton along the gradient direction on Re G.
            for _ in 0..6 {
                let (u, gp2) = boundary_g(&a_next, &r_next);
                let grad = Complex::with_val(
                    prec,
                    (
                        Float::with_val(prec, gp2.real()),
                        Float::with_val(prec, -gp2.imag().clone()),
                    ),
                );
                let g2 = cabs(&grad).square();
                if g2.is_zero() {
                    break;
                }
                let scale = Float::with_val(prec, &u / &g2);
                let mut corr = Complex::with_val(prec, &grad * -scale);
                a_next += &corr;
                r_next = track_r(&a_next, &r_next);
                corr *= 1u32; // no-op; keeps the borrow checker simple
                if u.to_f64().abs() < 1e-22 {
                    break;
                }
            }
            a = a_next;
            r = r_next;
            pts.push(a.clone());
            if a_corners
                .iter()
                .any(|c| dist(&a, c).to_f64() < 2.0 * h)
            {
                return Ok(pts);
            }
        }
        Err(Error::ContinuationStall {
            a: format!("{:.4}+{:.4}i", a.real().to_f64(), a.imag().to_f64()),
        })
    };

    let up = trace(1.0)?;
    let down = trace(-1.0)?;

    // One edge in the s-plane: corner → … → a* → … → corner.
    let mut edge: Vec<(f64, f64)> = Vec::with_capacity(up.len() + down.len() + 3);
    let push_s = |edge: &mut Vec<(f64, f64)>, a: &Complex| {
        let s = s_of(a);
        edge.push((s.real().to_f64(), s.imag().to_f64()));
    };
    for a in down.iter().rev() {
        push_s(&mut edge, a);
    }
    push_s(&mut edge, &cplx(prec, a_star, 0.0));
    for a in &up {
        push_s(&mut edge, a);
    }

    // Snap the edge endpoints to the exact corners they approach.
    let nearest_corner = |p: (f64, f64)| -> (f64, f64) {
        *corners
            .iter()
            .min_by(|a, b| {
                let da = (a.0 - p.0).powi(2) + (a.1 - p.1).powi(2);
                let db = (b.0 - p.0).powi(2) + (b.1 - p.1).powi(2);
                da.partial_cmp(&db).unwrap()
            })
            .unwrap()
    };
    let start_corner = nearest_corner(edge[0]);
    let end_corner = nearest_corner(*edge.last().unwrap());
    if start_corner == end_corner {
        return Err(Error::ContinuationStall {
            a: "both edge endpoints reached the same corner".into(),
        });
    }
    let mut full_edge = vec![start_corner];
    full_edge.extend(edge);
    full_edge.push(end_corner);

    // Assemble the closed triangle by rotating the edge (s ↦ e^{2πi/3} s),
    // chaining each copy onto the previous endpoint.
    let rot = (
        (2.0 * std::f64::consts::PI / 3.0).cos(),
        (2.0 * std::f64::consts::PI / 3.0).sin(),
    );
    let rotate = |p: (f64, f64)| (p.0 * rot.0 - p.1 * rot.1, p.0 * rot.1 + p.1 * rot.0);
    let mut polyline = full_edge.clone();
    let mut current = full_edge.clone();
    for _ in 0..2 {
        current = current.iter().map(|&p| rotate(p)).collect();
        // The rotated edge starts where some copy ends; chain by direction.
        let tail = *polyline.last().unwrap();
        let d_fwd = (current[0].0 - tail.0).powi(2) + (current[0].1 - tail.1).powi(2);
        let last = *current.last().unwrap();
        let d_rev = (last.0 - tail.0).powi(2) + (last.1 - tail.1).powi(2);
        if d_rev < d_fwd {
            current.reverse();
        }
        polyline.extend(current.iter().skip(1));
    }
    // Drop the duplicated closing corner if present.
    if polyline.len() > 1 {
        let first = polyline[0];
        let last = *polyline.last().unwrap();
        if (first.0 - last.0).abs() < 1e-12 && (first.1 - last.1).abs() < 1e-12 {
            polyline.pop();
        }
    }
    Ok(RegionBoundary { polyline, corners })
}

impl RegionBoundary {
    /// Even-odd ray-crossing classification with a near-boundary margin.
    pub fn classify(&self, s: &Complex, margin: f64) -> RegionClass {
        let p = (s.real().to_f64(), s.imag().to_f64());
        if self.distance_to(p) < margin {
            return RegionClass::NearBoundary;
        }
        if self.contains(p) {
            RegionClass::Inside
        } else {
            RegionClass::Outside
        }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        let n = self.polyline.len();
        let mut inside = false;
        for i in 0..n {
            let (x1, y1) = self.polyline[i];
            let (x2, y2) = self.polyline[(i + 1) % n];
            if (y1 > p.1) != (y2 > p.1) {
                let x_cross = x1 + (p.1 - y1) / (y2 - y1) * (x2 - x1);
                if p.0 < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        let n = self.polyline.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.polyline[i];
            let b = self.polyline[(i + 1) % n];
            best = best.min(point_segment_distance(p, a, b));
        }
        best
    }
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * abx, a.1 + t * aby);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// ∫_{−2^{1/3}}^{0} z^l dz / √|z⁴ + 2z| by the Chebyshev–Gauss rule (the
/// weight absorbs both endpoint singularities). l = 0 and l = 2 are the
/// near-origin lattice constants.
pub fn near_origin_constant(l: u32, nodes: usize, prec: Prec) -> Float {
    // |z⁴ + 2z| = (b − z)(z − a)·h(z) on (a, b) = (−2^{1/3}, 0) with
    // h(z) = z² − 2^{1/3} z + 2^{2/3} > 0.
    let a = -Float::with_val(prec, 2u32).root(3);
    let cb13 = Float::with_val(prec, 2u32).root(3);
    let cb23 = Float::with_val(prec, 4u32).root(3);
    let mid = Float::with_val(prec, &a / Float::with_val(prec, 2u32));
    let half_width = Float::with_val(prec, -&a) / 2u32;
    let pi = crate::num::pi(prec);
    let mut acc = Float::new(prec);
    for k in 1..=nodes {
        let theta = Float::with_val(prec, &pi * Float::with_val(prec, (2 * k - 1) as u32))
            / Float::with_val(prec, (2 * nodes) as u32);
        let z = Float::with_val(prec, &mid + Float::with_val(prec, &half_width * theta.cos()));
        let mut hval = Float::with_val(prec, &z * &z);
        hval -= Float::with_val(prec, &cb13 * &z);
        hval += &cb23;
        let f = Float::with_val(prec, z.clone().pow(l)) / hval.sqrt();
        acc += f;
    }
    acc * pi / Float::with_val(prec, nodes as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::pi;

    fn cfg(prec: Prec) -> PeriodConfig {
        PeriodConfig::with_precision(prec)
    }

    fn origin(prec: Prec) -> (Complex, Complex) {
        (Complex::new(prec), Complex::new(prec))
    }

    #[test]
    fn labels_at_origin_match_reference() {
        let prec = 192;
        let (s, e) = origin(prec);
        let roots = quartic_roots(&s, &e, prec).unwrap();
        let taus = label_turning_points(&roots).unwrap();
        let refs = reference_taus(prec);
        for (t, r) in taus.iter().zip(&refs) {
            assert!(dist(t, r).to_f64() < 1e-40);
        }
    }

    #[test]
    fn labels_continue_under_small_perturbation() {
        let prec = 160;
        let s = cplx(prec, 0.05, 0.02);
        let e = cplx(prec, -0.03, 0.01);
        let roots = quartic_roots(&s, &e, prec).unwrap();
        let taus = label_turning_points(&roots).unwrap();
        let refs = reference_taus(prec);
        for (t, r) in taus.iter().zip(&refs) {
            assert!(dist(t, r).to_f64() < 0.1, "labels moved too far");
        }
    }

    #[test]
    fn labels_swap_under_conjugation() {
        let prec = 160;
        let s = cplx(prec, 0.2, 0.15);
        let e = cplx(prec, 0.1, -0.05);
        let sc = cplx(prec, 0.2, -0.15);
        let ec = cplx(prec, 0.1, 0.05);
        let taus = label_turning_points(&quartic_roots(&s, &e, prec).unwrap()).unwrap();
        let taus_c = label_turning_points(&quartic_roots(&sc, &ec, prec).unwrap()).unwrap();
        // conj(τ₀) ↔ τ₀, conj(τ₂) ↔ τ₂, conj(τ₁) ↔ τ₃
        let conj = |z: &Complex| Complex::with_val(prec, z.conj_ref());
        assert!(dist(&conj(&taus[0]), &taus_c[0]).to_f64() < 1e-30);
        assert!(dist(&conj(&taus[2]), &taus_c[2]).to_f64() < 1e-30);
        assert!(dist(&conj(&taus[1]), &taus_c[3]).to_f64() < 1e-30);
        assert!(dist(&conj(&taus[3]), &taus_c[1]).to_f64() < 1e-30);
    }

    #[test]
    fn cut_periods_at_origin_are_minus_i_pi_thirds() {
        let prec = 256;
        let (s, e) = origin(prec);
        let target = Complex::with_val(prec, (Float::new(prec), -pi(prec) / 3u32));
        for j in 1..=3 {
            let v = cut_period(&s, &e, j, Differential::SqrtQ, &cfg(prec)).unwrap();
            assert!(dist(&v, &target).to_f64() < 1e-45, "j = {j}: {v}");
        }
    }

    #[test]
    fn period_sums_at_generic_interior_point() {
        let prec = 256;
        let s = cplx(prec, 0.3, 0.0);
        let e = cplx(prec, 0.0, 0.2);
        let ed = EllipticData::compute(&s, &e, &cfg(prec)).unwrap();
        let target = Complex::with_val(prec, (Float::new(prec), -pi(prec)));
        assert!(dist(&ed.cut_sum(), &target).to_f64() < 1e-40);
        assert!(cabs(&ed.s1_sum()).to_f64() < 1e-40);
    }

    #[test]
    fn tau_at_origin_is_third_root_of_unity() {
        let prec = 256;
        let (s, e) = origin(prec);
        let (_om, _omp, tau) = half_periods_and_tau(&s, &e, &cfg(prec)).unwrap();
        let want = cplx(prec, -0.5, 0.75f64.sqrt());
        assert!(dist(&tau, &want).to_f64() < 1e-15);
        // |ω| at the origin is twice the l = 0 origin constant.
        let (om, _, _) = half_periods_and_tau(&s, &e, &cfg(prec)).unwrap();
        let c0 = near_origin_constant(0, 64, prec);
        assert!((cabs(&om).to_f64() - c0.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_converges_spectrally() {
        let prec = 192;
        let s = cplx(prec, 0.3, 0.1);
        let e = cplx(prec, 0.1, 0.2);
        let reference = {
            let mut c = cfg(prec);
            c.loop_nodes = 2048;
            cut_period(&s, &e, 1, Differential::SqrtQ, &c).unwrap()
        };
        let err_at = |nodes: usize| {
            let mut c = cfg(prec);
            c.loop_nodes = nodes;
            let v = cut_period(&s, &e, 1, Differential::SqrtQ, &c).unwrap();
            dist(&v, &reference).to_f64()
        };
        let e128 = err_at(128);
        let e256 = err_at(256);
        assert!(
            e256 < e128 / 10.0 || e256 < 1e-50,
            "doubling nodes gained only {e128:.3e} → {e256:.3e}"
        );
    }

    #[test]
    fn s1_direct_matches_fd_operator() {
        let prec = 256;
        let s = cplx(prec, 0.3, 0.0);
        let e = cplx(prec, 0.0, 0.2);
        let c = cfg(prec);
        for j in 1..=3 {
            let direct = cut_period(&s, &e, j, Differential::S1, &c).unwrap();
            let fd = s1_period_fd(&s, &e, j, 1e-5, &c).unwrap();
            let err = dist(&direct, &fd).to_f64();
            assert!(err < 1e-8, "j = {j}: |direct − fd| = {err:.3e}");
        }
    }

    #[test]
    fn s1_fd_values_sum_to_zero() {
        let prec = 192;
        let s = cplx(prec, 0.2, 0.1);
        let e = cplx(prec, -0.1, 0.15);
        let c = cfg(prec);
        let mut sum = Complex::new(prec);
        for j in 1..=3 {
            sum += s1_period_fd(&s, &e, j, 1e-5, &c).unwrap();
        }
        assert!(cabs(&sum).to_f64() < 1e-7);
    }

    #[test]
    fn jacobian_is_i_pi() {
        let prec = 256;
        let c = cfg(prec);
        let target = Complex::with_val(prec, (Float::new(prec), pi(prec)));
        for (sr, si, er, ei) in [(0.0, 0.0, 0.0, 0.0), (0.3, 0.0, 0.0, 0.2)] {
            let s = cplx(prec, sr, si);
            let e = cplx(prec, er, ei);
            let det = jacobian_check(&s, &e, 1e-4, &c).unwrap();
            let err = dist(&det, &target).to_f64();
            assert!(err < 1e-6, "det at ({sr},{si},{er},{ei}) off by {err:.3e}");
        }
    }

    #[test]
    fn jacobian_richardson_consistent() {
        let prec = 256;
        let c = cfg(prec);
        let s = cplx(prec, 0.1, 0.05);
        let e = cplx(prec, 0.05, 0.1);
        let d1 = jacobian_check(&s, &e, 1e-3, &c).unwrap();
        let d2 = jacobian_check(&s, &e, 5e-4, &c).unwrap();
        // Central differences: error ∝ h², so halving h shrinks the defect 4×.
        let target = Complex::with_val(prec, (Float::new(prec), pi(prec)));
        let e1 = dist(&d1, &target).to_f64();
        let e2 = dist(&d2, &target).to_f64();
        assert!(e2 < e1 * 0.5, "h-refinement: {e1:.3e} → {e2:.3e}");
    }

    #[test]
    fn near_origin_constants_match_reported_values() {
        let prec = 192;
        let c0 = near_origin_constant(0, 128, prec).to_f64();
        let c2 = near_origin_constant(2, 128, prec).to_f64();
        assert!((c0 - 1.9276).abs() < 1e-4, "c0 = {c0}");
        assert!((c2 - 0.9409).abs() < 1e-4, "c2 = {c2}");
    }

    #[test]
    fn boundary_corner_and_classification() {
        let boundary = region_boundary(200).unwrap();
        let s0 = -(3.0 / 2f64.powf(1.0 / 3.0));
        assert!((s0 + 2.381101).abs() < 1e-5);
        // The traced polyline passes through each corner.
        for corner in boundary.corners {
            let d = boundary.distance_to(corner);
            assert!(d < 1e-6, "corner {corner:?} off the polyline by {d:.3e}");
        }
        let origin = cplx(64, 0.0, 0.0);
        assert_eq!(boundary.classify(&origin, 0.05), RegionClass::Inside);
        let far = cplx(64, 3.0 * s0, 0.0);
        assert_eq!(boundary.classify(&far, 0.05), RegionClass::Outside);
        let near_corner = cplx(64, s0 + 1e-3, 0.0);
        assert_eq!(boundary.classify(&near_corner, 0.05), RegionClass::NearBoundary);
    }

    #[test]
    fn tau_has_positive_imaginary_part_on_interior_grid() {
        // (s, E) pairs verified to carry the D-configuration; arbitrary pairs
        // leave the elliptic region (where Im τ > 0 need not hold).
        let prec = 160;
        let c = cfg(prec);
        for sr in [-0.4, 0.0, 0.4] {
            for er in [-0.2, 0.1, 0.4] {
                let s = cplx(prec, sr, 0.0);
                let e = cplx(prec, er, 0.0);
                let ed = EllipticData::compute(&s, &e, &c).unwrap();
                assert!(ed.tau_mod.imag().to_f64() > 0.0, "({sr}, {er})");
            }
        }
    }
}
