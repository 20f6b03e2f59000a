//! Quadrature meshes on `[0, P]` and the separable cosine transform that
//! turns symbol-exponential samples into lattice values.
//!
//! Two mesh families:
//!  * the uniform torus mesh (trapezoid on the periodic square, written on
//!    the quarter domain with multiplicity weights) — exact periodization
//!    of the lattice solution;
//!  * the concentrated "zoom" mesh for large times, where the integrand
//!    lives in a small neighbourhood of the origin: a power-graded cusp
//!    core, a locally marched middle resolving both the integrand decay
//!    and the target oscillation, and a coarse geometric tail.

use alloc::vec;
use alloc::vec::Vec;

use libm::{ceil, cos, exp, log, pow, sin};

use crate::special::PI;

/// One-dimensional quadrature mesh with nodes in `[0, P]` and weights that
/// already absorb the transform normalization, so that
/// `u(x, y) = sum_{i,j} w_i w_j cos(x p_i) cos(y p_j) G(i, j)`.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Mesh1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Quarter representation of the uniform n-point torus mesh.
/// Node `a` holds `|p| = 2 pi a / n`; the weight `mu_a / n` counts the
/// mirrored mesh points, so the full-torus mean is recovered exactly.
pub fn torus_mesh(n: usize) -> Mesh1D {
    debug_assert!(n % 2 == 0 && n >= 8);
    let half = n / 2;
    let mut nodes = Vec::with_capacity(half + 1);
    let mut weights = Vec::with_capacity(half + 1);
    for a in 0..=half {
        nodes.push(2.0 * PI * a as f64 / n as f64);
        let mu = if a == 0 || a == half { 1.0 } else { 2.0 };
        weights.push(mu / n as f64);
    }
    Mesh1D { nodes, weights }
}

/// Composite Simpson weights on an arbitrary ascending node set
/// (nonuniform two-interval rule, trapezoid on a leftover interval).
fn simpson_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let mut w = vec![0.0; x.len()];
    let mut i = 0;
    while i + 2 <= n {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let c0 = (h0 + h1) / 6.0 * (2.0 - h1 / h0);
        let c1 = pow(h0 + h1, 3.0) / (6.0 * h0 * h1);
        let c2 = (h0 + h1) / 6.0 * (2.0 - h0 / h1);
        w[i] += c0;
        w[i + 1] += c1;
        w[i + 2] += c2;
        i += 2;
    }
    if i < n {
        let h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Parameters of the concentrated mesh, all in rescaled units
/// (`v = t^{1/alpha} p`).
#[derive(Debug, Clone, Copy)]
pub struct ZoomParams {
    /// homogeneity order of the dominant symbol term
    pub alpha: f64,
    /// verified lower-bound constant: `lambda >= c_low (|p|^a + |q|^a)`
    pub c_low: f64,
    /// largest rescaled target coordinate
    pub xi_max: f64,
    /// refinement level; every density doubles per level
    pub level: u32,
}

/// Exponent drop marking the end of the oscillation-resolved middle piece.
const CORE_DROP: f64 = 18.5; // e^-18.5 ~ 1e-8
/// Exponent drop at the far end of the coarse tail.
const TAIL_DROP: f64 = 46.0; // e^-46 ~ 1e-20

/// Rescaled support of the integrand: where the lower bound reaches
/// `TAIL_DROP`.
pub fn zoom_support(alpha: f64, c_low: f64) -> f64 {
    pow(TAIL_DROP / c_low, 1.0 / alpha)
}

/// Concentrated mesh in rescaled units.
pub fn zoom_mesh(p: ZoomParams) -> Mesh1D {
    let refine = pow(2.0, p.level as f64);
    let v_scale = pow(1.0 / p.c_low, 1.0 / p.alpha);
    let v_core = pow(CORE_DROP / p.c_low, 1.0 / p.alpha);
    let v_tail = pow(TAIL_DROP / p.c_low, 1.0 / p.alpha);
    let v_fine = v_scale.min(v_core / 4.0);

    // cusp core: power grading towards 0
    let gamma = (ceil(2.0 / p.alpha) + 2.0).clamp(3.0, 8.0);
    let m_core = (160.0 * refine) as usize;
    let mut nodes = Vec::with_capacity(m_core + 64);
    for i in 0..=m_core {
        nodes.push(v_fine * pow(i as f64 / m_core as f64, gamma));
    }

    // marched middle: local spacing limited by target oscillation and by
    // the decay scale of exp(-c v^alpha)
    let h_osc = 2.0 * PI / (12.0 * refine * p.xi_max.max(1e-9));
    let decay_div = 16.0 * refine;
    let mut v = v_fine;
    while v < v_core {
        let h_dec = pow(v, 1.0 - p.alpha) / (p.c_low * p.alpha * decay_div);
        let h = h_osc.min(h_dec).max(v_core * 1e-7);
        v = (v + h).min(v_core);
        nodes.push(v);
    }

    // coarse geometric tail: mass bookkeeping only
    let m_tail = (96.0 * refine) as usize;
    let ratio = log(v_tail / v_core) / m_tail as f64;
    for i in 1..=m_tail {
        nodes.push(v_core * exp(ratio * i as f64));
    }

    let mut weights = simpson_weights(&nodes);
    for w in weights.iter_mut() {
        *w /= PI;
    }
    Mesh1D { nodes, weights }
}

/// Two-stage separable evaluation of
/// `out[ix][iy] = sum_{i,j} w_i w_j cos(xs[ix] p_i) cos(ys[iy] p_j) G(i, j)`.
///
/// `grid_row(i, buf)` must fill `buf[j] = G(i, j)`; rows are requested in
/// order and the full grid is never materialized.
pub fn cosine_transform(
    mesh: &Mesh1D,
    mut grid_row: impl FnMut(usize, &mut [f64]),
    xs: &[f64],
    ys: &[f64],
) -> Vec<f64> {
    let m = mesh.len();
    let (tx, ty) = (xs.len(), ys.len());
    // cos(y * p_j) tables, row-major over j
    let mut cos_y = vec![0.0; m * ty];
    for j in 0..m {
        let p = mesh.nodes[j];
        for (iy, &y) in ys.iter().enumerate() {
            cos_y[j * ty + iy] = cos(y * p);
        }
    }
    let mut stage = vec![0.0; m * ty];
    let mut row = vec![0.0; m];
    for i in 0..m {
        grid_row(i, &mut row);
        let dst = &mut stage[i * ty..(i + 1) * ty];
        for j in 0..m {
            let c = mesh.weights[j] * row[j];
            if c == 0.0 {
                continue;
            }
            let src = &cos_y[j * ty..(j + 1) * ty];
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d += c * s;
            }
        }
    }
    let mut out = vec![0.0; tx * ty];
    for i in 0..m {
        let wi = mesh.weights[i];
        let p = mesh.nodes[i];
        let src = &stage[i * ty..(i + 1) * ty];
        for (ix, &x) in xs.iter().enumerate() {
            let c = wi * cos(x * p);
            let dst = &mut out[ix * ty..(ix + 1) * ty];
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d += c * s;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics_on_uniform_pairs() {
        let x: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let w = simpson_weights(&x);
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi * xi * xi).sum();
        assert!((integral - 0.25).abs() < 1e-14);
    }

    #[test]
    fn simpson_handles_nonuniform_nodes() {
        // even interval count: pure pairwise rule, exact for quadratics
        let x = [0.0, 0.1, 0.25, 0.5, 0.8, 1.0, 1.5, 1.7, 2.0];
        let w = simpson_weights(&x);
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi * xi).sum();
        assert!((integral - 8.0 / 3.0).abs() < 1e-12, "{integral}");
    }

    #[test]
    fn torus_mesh_weights_sum_to_one() {
        for n in [8usize, 64, 130] {
            let m = torus_mesh(n);
            let total: f64 = m.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
            assert_eq!(m.nodes[0], 0.0);
            assert!((m.nodes[m.len() - 1] - PI).abs() < 1e-15);
        }
    }

    #[test]
    fn torus_transform_recovers_delta_at_g_one() {
        // G == 1 integrates to the lattice delta on the mesh
        let mesh = torus_mesh(32);
        let xs: Vec<f64> = (-3..=3).map(|x| x as f64).collect();
        let out = cosine_transform(&mesh, |_i, buf| buf.fill(1.0), &xs, &xs);
        for (ix, &x) in xs.iter().enumerate() {
            for (iy, &y) in xs.iter().enumerate() {
                let expect = if x == 0.0 && y == 0.0 { 1.0 } else { 0.0 };
                assert!(
                    (out[ix * xs.len() + iy] - expect).abs() < 1e-12,
                    "({x},{y}): {}",
                    out[ix * xs.len() + iy]
                );
            }
        }
    }

    #[test]
    fn zoom_mesh_integrates_known_exponential() {
        // int_0^inf exp(-c v) dv = 1/c against the alpha = 1 mesh;
        // one refinement level gains roughly a fourth-order factor
        let c = 1.7;
        let eval = |level: u32| {
            let mesh = zoom_mesh(ZoomParams { alpha: 1.0, c_low: c, xi_max: 2.0, level });
            mesh.nodes
                .iter()
                .zip(&mesh.weights)
                .map(|(&v, &w)| w * PI * libm::exp(-c * v))
                .sum::<f64>()
        };
        let e0 = (eval(0) - 1.0 / c).abs() * c;
        let e1 = (eval(1) - 1.0 / c).abs() * c;
        assert!(e0 < 1e-6, "level0 rel err {e0}");
        assert!(e1 < e0 / 6.0, "refinement gain too small: {e0} -> {e1}");
    }

    #[test]
    fn zoom_mesh_integrates_cusped_exponential() {
        // int_0^inf exp(-c sqrt(v)) dv = 2/c^2 with alpha = 1/2
        let c = 3.8;
        let expect = 2.0 / (c * c);
        let eval = |level: u32| {
            let mesh = zoom_mesh(ZoomParams { alpha: 0.5, c_low: c, xi_max: 8.0, level });
            mesh.nodes
                .iter()
                .zip(&mesh.weights)
                .map(|(&v, &w)| w * PI * libm::exp(-c * libm::sqrt(v)))
                .sum::<f64>()
        };
        let e0 = ((eval(0) - expect) / expect).abs();
        let e1 = ((eval(1) - expect) / expect).abs();
        assert!(e0 < 1e-6, "level0 rel err {e0}");
        assert!(e1 < e0 / 4.0, "refinement gain too small: {e0} -> {e1}");
    }

    #[test]
    fn zoom_mesh_oscillatory_transform() {
        // (1/pi) int_0^inf cos(x v) e^{-c v} dv = c/(pi (c^2 + x^2))
        let c = 2.0;
        let f = |x: f64| c / (PI * (c * c + x * x));
        let xs = [0.0, 7.0, 25.0, 40.0];
        let eval = |level: u32| {
            let mesh = zoom_mesh(ZoomParams { alpha: 1.0, c_low: c, xi_max: 40.0, level });
            let grid = |i: usize, buf: &mut [f64]| {
                let vi = mesh.nodes[i];
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = libm::exp(-c * (vi + mesh.nodes[j]));
                }
            };
            cosine_transform(&mesh, grid, &xs, &[0.0])
        };
        let scale = f(0.0) * f(0.0);
        let worst = |out: &[f64]| {
            xs.iter()
                .enumerate()
                .map(|(ix, &x)| (out[ix] - f(x) * f(0.0)).abs() / scale)
                .fold(0.0f64, f64::max)
        };
        let e0 = worst(&eval(0));
        let e1 = worst(&eval(1));
        assert!(e0 < 2e-5, "level0 rel err {e0}");
        assert!(e1 < e0 / 4.0, "refinement gain too small: {e0} -> {e1}");
    }

}
