//! Fourier symbols of the k-path operators: `lambda_k`, the Mellin symbol
//! `lambda_mellin` (infinite series or truncated), uniform-mesh sampling,
//! and the shared axis-table machinery that makes tensor-grid evaluation
//! O(1) per node pair.
//!
//! The off-diagonal closed form divides by `cos p - cos q`; close to the
//! diagonal the quotient cancels catastrophically, so evaluation switches
//! to the diagonal formula at the midpoint. The denominator itself is
//! always formed as `-2 sin((p+q)/2) sin((p-q)/2)`, which has no
//! cancellation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::{self, g, im_li, re_li, zeta, PI};
use libm::{cos, fabs, pow, sin};

/// Relative scale for the off-diagonal/diagonal branch switch.
const BRANCH_REL: f64 = 1e-7;
/// Distance from the midpoint to pi below which the corner value is used.
const PI_GUARD: f64 = 1e-5;

/// Truncation of the Mellin series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Infinite,
    AtOrder(u32),
}

/// Diffusion-generator choice: exponent `s` plus truncation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSpec {
    s: f64,
    truncation: Truncation,
}

impl SymbolSpec {
    pub fn new(s: f64, truncation: Truncation) -> Result<Self> {
        if !(s > 2.0) {
            return Err(Error::Domain("symbol requires s > 2"));
        }
        if let Truncation::AtOrder(0) = truncation {
            return Err(Error::Domain("truncation order must be >= 1"));
        }
        Ok(SymbolSpec { s, truncation })
    }

    pub fn infinite(s: f64) -> Result<Self> {
        Self::new(s, Truncation::Infinite)
    }

    pub fn truncated(s: f64, n: u32) -> Result<Self> {
        Self::new(s, Truncation::AtOrder(n))
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Scaling order of the dominant small-frequency term: `s - 2` for the
    /// infinite transform with `2 < s < 4`, otherwise `2`. Truncations are
    /// always quadratic. Excluded at `s = 4` for the infinite transform.
    pub fn alpha(&self) -> Result<f64> {
        match self.truncation {
            Truncation::AtOrder(_) => Ok(2.0),
            Truncation::Infinite => {
                if fabs(self.s - 4.0) < special::INTEGER_DETECT_TOL {
                    Err(Error::Domain("alpha is undefined at s = 4"))
                } else if self.s < 4.0 {
                    Ok(self.s - 2.0)
                } else {
                    Ok(2.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Branch {
    Origin,
    Corner,
    Diagonal(f64),
    OffDiag(f64),
}

/// Classify `(|p|, |q|)` and produce the stable denominator when off the
/// diagonal.
fn classify(a: f64, b: f64) -> Branch {
    if a == 0.0 && b == 0.0 {
        return Branch::Origin;
    }
    let dc = -2.0 * sin(0.5 * (a + b)) * sin(0.5 * (a - b));
    let da = PI - a;
    let db = PI - b;
    let scale = (a * a + b * b).min(da * da + db * db).min(1.0);
    if fabs(dc) <= BRANCH_REL * scale {
        let m = 0.5 * (a + b);
        if m == 0.0 {
            Branch::Origin
        } else if PI - m < PI_GUARD {
            Branch::Corner
        } else {
            Branch::Diagonal(m)
        }
    } else {
        Branch::OffDiag(dc)
    }
}

/// Symbol of the single k-path operator, `0 <= lambda_k <= 8k`.
pub fn lambda_k(k: u32, p: f64, q: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("lambda_k requires k >= 1"));
    }
    if !(p.is_finite() && q.is_finite()) || fabs(p) > PI + 1e-12 || fabs(q) > PI + 1e-12 {
        return Err(Error::Domain("lambda_k requires p, q in [-pi, pi]"));
    }
    let (a, b) = (fabs(p).min(PI), fabs(q).min(PI));
    let kf = k as f64;
    Ok(match classify(a, b) {
        Branch::Origin => 0.0,
        Branch::Corner => {
            if k % 2 == 0 {
                0.0
            } else {
                8.0 * kf
            }
        }
        Branch::Diagonal(m) => 4.0 * kf - 2.0 * cos(m) / sin(m) * sin(kf * m) - 2.0 * kf * cos(kf * m),
        Branch::OffDiag(dc) => 4.0 * kf + 2.0 * (sin(a) * sin(kf * a) - sin(b) * sin(kf * b)) / dc,
    })
}

/// Truncated axis sums `sum_{k<=N} sin(k p)/k^s`, `sum_{k<=N} cos(k p) k^{1-s}`.
fn truncated_axis_sums(s: f64, n: u32, p: f64) -> (f64, f64) {
    let (mut im, mut re1) = (0.0, 0.0);
    let rot_c = cos(p);
    let rot_s = sin(p);
    let (mut zc, mut zs) = (1.0, 0.0);
    for k in 1..=n {
        let (nc, ns) = (zc * rot_c - zs * rot_s, zc * rot_s + zs * rot_c);
        zc = nc;
        zs = ns;
        if k % 1024 == 0 {
            let kp = k as f64 * p;
            zc = cos(kp);
            zs = sin(kp);
        }
        let w = pow(k as f64, -s);
        im += zs * w;
        re1 += zc * w * k as f64;
    }
    (im, re1)
}

/// Per-mesh tables that make symbol evaluation O(1) per `(i, j)` pair.
///
/// `nodes` must be nonnegative angles `<= pi`, sorted ascending.
pub struct AxisTables {
    s: f64,
    truncation: Truncation,
    /// 4 * (zeta(s-1) or its partial sum)
    four_z: f64,
    /// symbol value at (pi, pi)
    corner: f64,
    pub nodes: Vec<f64>,
    cosv: Vec<f64>,
    gv: Vec<f64>,
    imli: Vec<f64>,
    reli: Vec<f64>,
}

impl AxisTables {
    pub fn build(spec: &SymbolSpec, nodes: &[f64]) -> Result<Self> {
        let s = spec.s;
        let mut cosv = Vec::with_capacity(nodes.len());
        let mut gv = Vec::with_capacity(nodes.len());
        let mut imli = Vec::with_capacity(nodes.len());
        let mut reli = Vec::with_capacity(nodes.len());
        let (four_z, corner) = match spec.truncation {
            Truncation::Infinite => {
                let z = zeta(s - 1.0)?;
                (4.0 * z, 4.0 * (2.0 - pow(2.0, 2.0 - s)) * z)
            }
            Truncation::AtOrder(n) => {
                let mut zp = 0.0;
                let mut corner = 0.0;
                for k in 1..=n {
                    let w = pow(k as f64, 1.0 - s);
                    zp += w;
                    if k % 2 == 1 {
                        corner += 8.0 * w;
                    }
                }
                (4.0 * zp, corner)
            }
        };
        for &p in nodes {
            if !(0.0..=PI + 1e-12).contains(&p) {
                return Err(Error::Domain("axis nodes must lie in [0, pi]"));
            }
            let p = p.min(PI);
            cosv.push(cos(p));
            if p == 0.0 {
                gv.push(0.0);
                imli.push(0.0);
                reli.push(four_z / 4.0);
                continue;
            }
            let (im, re1) = match spec.truncation {
                Truncation::Infinite => (im_li(s, p), re_li(s - 1.0, p)),
                Truncation::AtOrder(n) => truncated_axis_sums(s, n, p),
            };
            if !(im.is_finite() && re1.is_finite()) {
                return Err(Error::Accuracy("polylog table evaluation failed"));
            }
            imli.push(im);
            reli.push(re1);
            gv.push(2.0 * sin(p) * im);
        }
        Ok(AxisTables {
            s,
            truncation: spec.truncation,
            four_z,
            corner,
            nodes: nodes.to_vec(),
            cosv,
            gv,
            imli,
            reli,
        })
    }

    /// Diagonal-formula value at angle `m` (not a table node).
    fn diagonal_at(&self, m: f64) -> f64 {
        let (im, re1) = match self.truncation {
            Truncation::Infinite => (im_li(self.s, m), re_li(self.s - 1.0, m)),
            Truncation::AtOrder(n) => truncated_axis_sums(self.s, n, m),
        };
        self.four_z - 2.0 * cos(m) / sin(m) * im - 2.0 * re1
    }

    /// Symbol value for the node pair `(i, j)`.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        let a = self.nodes[i];
        let b = self.nodes[j];
        match classify(a, b) {
            Branch::Origin => 0.0,
            Branch::Corner => self.corner,
            Branch::Diagonal(m) => {
                // exact node hit: use the tabulated axis values
                if a == b {
                    self.four_z - 2.0 * self.cosv[i] / sin(a) * self.imli[i] - 2.0 * self.reli[i]
                } else {
                    self.diagonal_at(m)
                }
            }
            Branch::OffDiag(dc) => self.four_z + (self.gv[i] - self.gv[j]) / dc,
        }
    }
}

/// Scalar Mellin symbol. Off-diagonal/diagonal branch agreement is
/// self-checked in a narrow band just outside the switch.
pub fn lambda_mellin(spec: &SymbolSpec, p: f64, q: f64) -> Result<f64> {
    if !(p.is_finite() && q.is_finite()) || fabs(p) > PI + 1e-12 || fabs(q) > PI + 1e-12 {
        return Err(Error::Domain("lambda_mellin requires p, q in [-pi, pi]"));
    }
    let (a, b) = (fabs(p).min(PI), fabs(q).min(PI));
    let s = spec.s;
    let val = match spec.truncation {
        Truncation::Infinite => match classify(a, b) {
            Branch::Origin => 0.0,
            Branch::Corner => 4.0 * (2.0 - pow(2.0, 2.0 - s)) * zeta(s - 1.0)?,
            Branch::Diagonal(m) => diagonal_infinite(s, m)?,
            Branch::OffDiag(dc) => {
                let v = 4.0 * zeta(s - 1.0)? + (g(s, a)? - g(s, b)?) / dc;
                // self-check just outside the switch, where the quotient is
                // at its most cancellation-prone
                let da = PI - a;
                let db = PI - b;
                let scale = (a * a + b * b).min(da * da + db * db).min(1.0);
                if fabs(dc) <= 10.0 * BRANCH_REL * scale {
                    let m = 0.5 * (a + b);
                    let dv = if PI - m < PI_GUARD {
                        4.0 * (2.0 - pow(2.0, 2.0 - s)) * zeta(s - 1.0)?
                    } else if m > 0.0 {
                        diagonal_infinite(s, m)?
                    } else {
                        0.0
                    };
                    if fabs(v - dv) > 1e-7 {
                        return Err(Error::Accuracy("symbol branch consistency exceeded 1e-7"));
                    }
                }
                v
            }
        },
        Truncation::AtOrder(n) => {
            let mut acc = 0.0;
            for k in 1..=n {
                acc += pow(k as f64, -s) * lambda_k(k, a, b)?;
            }
            acc
        }
    };
    Ok(val)
}

fn diagonal_infinite(s: f64, m: f64) -> Result<f64> {
    let z = zeta(s - 1.0)?;
    let im = im_li(s, m);
    let re1 = re_li(s - 1.0, m);
    if !(im.is_finite() && re1.is_finite()) {
        return Err(Error::Accuracy("polylog evaluation failed on the diagonal"));
    }
    Ok(4.0 * z - 2.0 * cos(m) / sin(m) * im - 2.0 * re1)
}

/// Samples of the symbol on the uniform mesh `p_i = -pi + 2 pi i / n`.
#[derive(Debug, Clone)]
pub struct GridField {
    n: usize,
    samples: Vec<f64>,
}

impl GridField {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node(&self, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.n as f64
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.samples[i * self.n + j]
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn max_sample(&self) -> f64 {
        self.samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_sample(&self) -> f64 {
        self.samples.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Sample `lambda_mellin` on the n x n uniform mesh. Evenness holds exactly
/// by construction (quarter evaluation plus mirroring).
pub fn symbol_grid(spec: &SymbolSpec, n: usize) -> Result<GridField> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::Domain("grid size must be even and >= 8"));
    }
    let half = n / 2;
    let quarter_nodes: Vec<f64> = (0..=half).map(|a| 2.0 * PI * a as f64 / n as f64).collect();
    let tables = AxisTables::build(spec, &quarter_nodes)?;
    let mut quarter = Vec::with_capacity((half + 1) * (half + 1));
    for a in 0..=half {
        for b in 0..=half {
            // symmetric in (a, b): evaluate once, mirror below
            if b < a {
                quarter.push(quarter[b * (half + 1) + a]);
            } else {
                quarter.push(tables.value(a, b));
            }
        }
    }
    let mut samples = Vec::with_capacity(n * n);
    for i in 0..n {
        let a = i.abs_diff(half);
        for j in 0..n {
            let b = j.abs_diff(half);
            samples.push(quarter[a * (half + 1) + b]);
        }
    }
    let gf = GridField { n, samples };
    if gf.min_sample() < -1e-12 {
        return Err(Error::Accuracy("negative symbol sample below -1e-12"));
    }
    Ok(gf)
}
