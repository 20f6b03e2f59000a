//! Scalar special-function kernels: the Riemann zeta function, the gamma
//! function, polylogarithms on the unit circle, the weight `g_s` and the
//! stable coefficient `C_s`.
//!
//! Everything here is pure and reentrant.

use crate::error::{Error, Result};
use libm::{cos, exp, fabs, log, pow, sin};
use num_complex::Complex64;

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Tolerance used when deciding whether a binary-float exponent is meant to
/// be an integer (even-integer branch of `C_s`, logarithmic polylog branch).
pub const INTEGER_DETECT_TOL: f64 = 1e-12;

const EULER_MACLAURIN_CUT: usize = 100;

/// Riemann zeta for real `s > 1`.
///
/// Euler-Maclaurin with partial sum to K = 100 and four Bernoulli
/// correction terms; absolute error well below 1e-12 over the whole range.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain("zeta requires s > 1"));
    }
    Ok(zeta_em(s))
}

/// Zeta on the whole real line except the pole at 1. Negative arguments go
/// through the functional equation; trivial zeros are returned exactly.
pub(crate) fn zeta_any(s: f64) -> f64 {
    if s >= 0.5 {
        zeta_em(s)
    } else if s == 0.0 {
        -0.5
    } else {
        let r = libm::round(s);
        if fabs(s - r) < INTEGER_DETECT_TOL && r <= -2.0 && (r as i64) % 2 == 0 {
            return 0.0; // trivial zero at negative even integers
        }
        // zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
        pow(2.0, s) * pow(PI, s - 1.0) * sin(PI * s / 2.0) * gamma(1.0 - s) * zeta_em(1.0 - s)
    }
}

fn zeta_em(s: f64) -> f64 {
    debug_assert!(s >= 0.5 && s != 1.0);
    let k = EULER_MACLAURIN_CUT as f64;
    let mut acc = 0.0;
    for j in 1..EULER_MACLAURIN_CUT {
        acc += pow(j as f64, -s);
    }
    let kms = pow(k, -s);
    acc += pow(k, 1.0 - s) / (s - 1.0) + 0.5 * kms;
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * K^{-s-2j+1}
    let mut poch = s;
    acc += poch / 12.0 * kms / k;
    poch *= (s + 1.0) * (s + 2.0);
    acc -= poch / 720.0 * kms / (k * k * k);
    poch *= (s + 3.0) * (s + 4.0);
    acc += poch / 30240.0 * kms / pow(k, 5.0);
    poch *= (s + 5.0) * (s + 6.0);
    acc -= poch / 1209600.0 * kms / pow(k, 7.0);
    acc
}

/// Gamma function for real arguments (Lanczos, g = 7, 9 terms).
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection; poles at non-positive integers give +-inf, as desired
        return PI / (sin(PI * x) * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    libm::sqrt(TAU) * pow(t, x + 0.5) * exp(-t) * a
}

/// `C_s = -2 pi / (Gamma(s) sin(s pi / 2))`, zero at even integers.
pub fn c_coefficient(s: f64) -> Result<f64> {
    if !(s > 2.0) {
        return Err(Error::Domain("c_coefficient requires s > 2"));
    }
    if fabs(s - 4.0) < INTEGER_DETECT_TOL {
        return Err(Error::Domain("c_coefficient is excluded at s = 4"));
    }
    let half = s / 2.0;
    if fabs(half - libm::round(half)) < INTEGER_DETECT_TOL {
        return Ok(0.0);
    }
    Ok(-2.0 * PI / (gamma(s) * sin(s * PI / 2.0)))
}

/// Maximum number of expansion terms before falling back to accelerated
/// direct summation.
const MAX_EXPANSION_TERMS: usize = 200;

/// `Li_s(e^{ip})` for real `s > 1` and `p` strictly inside `(0, 2pi)`.
///
/// Power-series expansion in zeta values around the branch point, with the
/// logarithmic variant at positive integer `s`; Aitken-accelerated direct
/// summation if the expansion needs more than 200 terms (p close to 2pi).
pub fn polylog_circle(s: f64, p: f64) -> Result<Complex64> {
    if !(s > 1.0) {
        return Err(Error::Domain("polylog_circle requires s > 1"));
    }
    if !(p > 0.0 && p < TAU) {
        return Err(Error::Domain("polylog_circle requires p in (0, 2pi)"));
    }
    match polylog_expansion(s, p) {
        Some(v) => Ok(v),
        None => polylog_aitken(s, p),
    }
}

/// Expansion around the branch point. Returns `None` when the term budget
/// is exhausted before the tail drops to machine level.
fn polylog_expansion(s: f64, p: f64) -> Option<Complex64> {
    let sr = libm::round(s);
    let integer_s = fabs(s - sr) < INTEGER_DETECT_TOL;
    let mut acc = Complex64::new(0.0, 0.0);
    let skip = if integer_s { sr as i64 - 1 } else { -1 };

    if integer_s {
        // (ip)^{s-1}/(s-1)! * (H_{s-1} - Log(-ip)), Log(-ip) = ln p - i pi/2
        let m = sr as i64 - 1;
        let mut h = 0.0;
        let mut fact = 1.0;
        for j in 1..=m {
            h += 1.0 / j as f64;
            if j >= 2 {
                fact *= j as f64;
            }
        }
        let ip_pow = Complex64::new(0.0, p).powu(m as u32);
        acc += ip_pow / fact * Complex64::new(h - log(p), PI / 2.0);
    } else {
        // Gamma(1-s) (-ip)^{s-1}, with (-ip)^{s-1} = p^{s-1} e^{-i pi (s-1)/2}
        let mag = gamma(1.0 - s) * pow(p, s - 1.0);
        let ph = -PI * (s - 1.0) / 2.0;
        acc += Complex64::new(mag * cos(ph), mag * sin(ph));
    }

    // sum_n zeta(s - n) (ip)^n / n!
    let ip = Complex64::new(0.0, p);
    let mut term = Complex64::new(1.0, 0.0);
    let mut quiet = 0;
    for n in 0..MAX_EXPANSION_TERMS {
        if n > 0 {
            term *= ip / n as f64;
        }
        if n as i64 == skip {
            continue;
        }
        let contrib = term * zeta_any(s - n as f64);
        acc += contrib;
        if contrib.norm_sqr() < 1e-34 * (1.0 + acc.norm_sqr()) {
            quiet += 1;
            if quiet >= 4 && n > 8 {
                return Some(acc);
            }
        } else {
            quiet = 0;
        }
    }
    None
}

/// Iterated Aitken acceleration of the defining series; only reached for
/// `p` near the ends of `(0, 2pi)` where the expansion converges too slowly.
///
/// Partial sums are sampled at block boundaries whose length makes e^{ipB}
/// roughly a half turn, so the sampled sequence is close to alternating and
/// each Aitken pass gains a solid factor.
fn polylog_aitken(s: f64, p: f64) -> Result<Complex64> {
    const SAMPLES: usize = 48;
    let dist = if p < PI { p } else { TAU - p };
    let block = libm::round(PI / dist.max(1e-4)).max(1.0) as usize;
    let mut seq = alloc::vec::Vec::with_capacity(SAMPLES);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut k = 0usize;
    for _ in 0..SAMPLES {
        for _ in 0..block {
            k += 1;
            let kp = k as f64 * p;
            let term = Complex64::new(cos(kp), sin(kp)) * pow(k as f64, -s);
            // Neumaier-compensated accumulation
            let t = acc + term;
            let d = if fabs(acc.re) + fabs(acc.im) >= fabs(term.re) + fabs(term.im) {
                (acc - t) + term
            } else {
                (term - t) + acc
            };
            comp += d;
            acc = t;
        }
        seq.push(acc + comp);
    }
    let mut cur = seq;
    let mut best = *cur.last().unwrap();
    let mut est = f64::INFINITY;
    for _ in 0..12 {
        if cur.len() < 3 {
            break;
        }
        let mut next = alloc::vec::Vec::with_capacity(cur.len() - 2);
        for w in cur.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let den = c - 2.0 * b + a;
            if den.norm_sqr() < 1e-300 {
                next.push(c);
            } else {
                next.push(c - (c - b) * (c - b) / den);
            }
        }
        let m = next.len();
        let step = if m >= 2 { (next[m - 1] - next[m - 2]).norm() } else { est };
        let jump = (next[m - 1] - best).norm();
        if step + jump < est {
            est = step + jump;
            best = next[m - 1];
        }
        cur = next;
    }
    if est > 1e-10 {
        return Err(Error::Accuracy("polylog acceleration failed its tail bound"));
    }
    Ok(best)
}

/// `g_s(p) = 2 sin p * Im Li_s(e^{ip})`, extended to `[-pi, pi]` by evenness.
pub fn g(s: f64, p: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain("g requires s > 1"));
    }
    let a = fabs(p);
    if a == 0.0 || a >= PI {
        return Ok(0.0);
    }
    let li = polylog_circle(s, a)?;
    Ok(2.0 * sin(a) * li.im)
}

/// Im Li_s(e^{ip}) for `p` in `(0, pi]`; panics on internal failure only in
/// debug builds, callers in this crate stay inside the expansion range.
pub(crate) fn im_li(s: f64, p: f64) -> f64 {
    match polylog_expansion(s, p) {
        Some(v) => v.im,
        None => polylog_aitken(s, p).map(|v| v.im).unwrap_or(f64::NAN),
    }
}

pub(crate) fn re_li(s: f64, p: f64) -> f64 {
    match polylog_expansion(s, p) {
        Some(v) => v.re,
        None => polylog_aitken(s, p).map(|v| v.re).unwrap_or(f64::NAN),
    }
}
