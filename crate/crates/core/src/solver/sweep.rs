//! Factored linearly implicit increments.
//!
//! Chemical:  `(I - dt (D2 dxx - alpha)) (I - dt D2 dyy) dv = dt Rv(u, v)`
//! Density:   `(I - dt Jx) (I - dt Jy) du = dt Ru(u, v + dv)`
//!
//! `Jx`, `Jy` are the exact Jacobians of the x and y flux divergences with
//! respect to u (v frozen), and `Jx` also carries the growth derivative
//! `mu (ubar - 2u)`. Every column of a flux Jacobian sums to zero, so the
//! increments preserve total mass whenever the residual does.

use rayon::prelude::*;

use crate::grid::Grid;
use crate::linalg::thomas;
use crate::model::ModelParams;

use super::operators::{residual_u, residual_v};
use super::Trial;

/// Rows per rayon task in the x sweeps.
const ROW_CHUNK: usize = 16;

#[derive(Debug, Clone)]
pub(crate) struct Workspace {
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    v_new: Vec<f64>,
    lo: Vec<f64>,
    di: Vec<f64>,
    up: Vec<f64>,
}

impl Workspace {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.len();
        Workspace {
            du: vec![0.0; n],
            dv: vec![0.0; n],
            v_new: vec![0.0; n],
            lo: vec![0.0; n],
            di: vec![0.0; n],
            up: vec![0.0; n],
        }
    }

    /// Fills `du`, `dv` with the increments of one step from `(u, v)`.
    pub fn increments(&mut self, p: &ModelParams, grid: &Grid, u: &[f64], v: &[f64], dt: f64) -> Trial {
        residual_v(p, grid, u, v, &mut self.dv);
        self.dv.iter_mut().for_each(|x| *x *= dt);
        chemical_sweeps(p, grid, dt, &mut self.dv);
        for ((w, &a), &b) in self.v_new.iter_mut().zip(v).zip(&self.dv) {
            *w = a + b;
        }

        residual_u(p, grid, u, &self.v_new, &mut self.du);
        self.du.iter_mut().for_each(|x| *x *= dt);
        density_x_sweep(p, grid, dt, u, &self.v_new, &mut self.du);
        if grid.is_2d() {
            density_y_coefficients(p, grid, dt, u, &self.v_new, &mut self.lo, &mut self.di, &mut self.up);
            batched_thomas(grid.nx(), &self.lo, &self.di, &mut self.up, &mut self.du);
        }

        let mut finite = true;
        let mut max_du = 0.0f64;
        let mut max_dv = 0.0f64;
        for (&a, &b) in self.du.iter().zip(&self.dv) {
            finite &= a.is_finite() && b.is_finite();
            max_du = max_du.max(a.abs());
            max_dv = max_dv.max(b.abs());
        }
        Trial { dt, finite, max_du, max_dv }
    }
}

/// Constant-coefficient x then y solves for the chemical increment.
fn chemical_sweeps(p: &ModelParams, grid: &Grid, dt: f64, rhs: &mut [f64]) {
    let nx = grid.nx();
    let rx = dt * p.d2() / (grid.dx() * grid.dx());
    let base = 1.0 + dt * p.alpha();
    let (lo, di, up) = const_tridiag(nx, base, rx);
    rhs.par_chunks_mut(nx * ROW_CHUNK).for_each_init(
        || vec![0.0; nx],
        |scratch, rows| {
            for row in rows.chunks_exact_mut(nx) {
                thomas(&lo, &di, &up, row, scratch);
            }
        },
    );
    if grid.is_2d() {
        let ny = grid.ny();
        let ry = dt * p.d2() / (grid.dy() * grid.dy());
        let (lo, di, up) = const_tridiag(ny, 1.0, ry);
        // forward elimination factors shared by every column
        let mut cp = vec![0.0; ny];
        let mut inv = vec![0.0; ny];
        inv[0] = 1.0 / di[0];
        for j in 1..ny {
            cp[j] = up[j - 1] * inv[j - 1];
            inv[j] = 1.0 / (di[j] - lo[j] * cp[j]);
        }
        for i in 0..nx {
            rhs[i] *= inv[0];
        }
        for j in 1..ny {
            let (prev, cur) = rhs[(j - 1) * nx..(j + 1) * nx].split_at_mut(nx);
            let (l, s) = (lo[j], inv[j]);
            for (c, pv) in cur.iter_mut().zip(prev.iter()) {
                *c = (*c - l * pv) * s;
            }
        }
        for j in (0..ny - 1).rev() {
            let (cur, next) = rhs[j * nx..(j + 2) * nx].split_at_mut(nx);
            let f = cp[j + 1];
            for (c, nv) in cur.iter_mut().zip(next.iter()) {
                *c -= f * nv;
            }
        }
    }
}

/// `I - dt k dxx` with zero-flux ends plus `base - 1` on the diagonal.
fn const_tridiag(n: usize, base: f64, r: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let lo = vec![-r; n];
    let up = vec![-r; n];
    let mut di = vec![base + 2.0 * r; n];
    di[0] = base + r;
    di[n - 1] = base + r;
    (lo, di, up)
}

/// Solves `(I - dt Jx) w = rhs` row by row, in place.
fn density_x_sweep(p: &ModelParams, grid: &Grid, dt: f64, u: &[f64], v: &[f64], rhs: &mut [f64]) {
    let nx = grid.nx();
    let r = dt * p.d1() / (grid.dx() * grid.dx());
    let kc = dt * p.chi() / (2.0 * grid.dx() * grid.dx());
    let (mu, ubar) = (p.mu(), p.ubar());
    let phi = p.sensitivity();
    rhs.par_chunks_mut(nx * ROW_CHUNK)
        .enumerate()
        .for_each_init(
            || vec![0.0; 4 * nx],
            |buf, (chunk, rows)| {
                let (lo, rest) = buf.split_at_mut(nx);
                let (di, rest) = rest.split_at_mut(nx);
                let (up, scratch) = rest.split_at_mut(nx);
                for (k, row) in rows.chunks_exact_mut(nx).enumerate() {
                    let off = (chunk * ROW_CHUNK + k) * nx;
                    let u = &u[off..off + nx];
                    let v = &v[off..off + nx];
                    for i in 0..nx {
                        di[i] = 1.0 - dt * mu * (ubar - 2.0 * u[i]);
                        lo[i] = 0.0;
                        up[i] = 0.0;
                    }
                    for i in 0..nx - 1 {
                        let k = kc * phi.du(0.5 * (u[i] + u[i + 1]), 0.5 * (v[i] + v[i + 1])) * (v[i + 1] - v[i]);
                        di[i] += r + k;
                        up[i] -= r - k;
                        lo[i + 1] -= r + k;
                        di[i + 1] += r - k;
                    }
                    thomas(lo, di, up, row, scratch);
                }
            },
        );
}

/// Coefficients of `I - dt Jy`; row j of each array holds the entries that
/// multiply `w[j-1]`, `w[j]`, `w[j+1]` for every column.
#[allow(clippy::too_many_arguments)]
fn density_y_coefficients(
    p: &ModelParams,
    grid: &Grid,
    dt: f64,
    u: &[f64],
    v: &[f64],
    lo: &mut [f64],
    di: &mut [f64],
    up: &mut [f64],
) {
    let nx = grid.nx();
    let r = dt * p.d1() / (grid.dy() * grid.dy());
    let kc = dt * p.chi() / (2.0 * grid.dy() * grid.dy());
    let phi = p.sensitivity();
    di.iter_mut().for_each(|x| *x = 1.0);
    lo.iter_mut().for_each(|x| *x = 0.0);
    up.iter_mut().for_each(|x| *x = 0.0);
    for j in 0..grid.ny() - 1 {
        for a in j * nx..(j + 1) * nx {
            let b = a + nx;
            let k = kc * phi.du(0.5 * (u[a] + u[b]), 0.5 * (v[a] + v[b])) * (v[b] - v[a]);
            di[a] += r + k;
            up[a] -= r - k;
            lo[b] -= r + k;
            di[b] += r - k;
        }
    }
}

/// Thomas algorithm down every column at once. `up` is overwritten with the
/// elimination factors.
fn batched_thomas(nx: usize, lo: &[f64], di: &[f64], up: &mut [f64], rhs: &mut [f64]) {
    let ny = rhs.len() / nx;
    for i in 0..nx {
        let s = 1.0 / di[i];
        up[i] *= s;
        rhs[i] *= s;
    }
    for j in 1..ny {
        let (pu, cu) = up[(j - 1) * nx..(j + 1) * nx].split_at_mut(nx);
        let (pr, cr) = rhs[(j - 1) * nx..(j + 1) * nx].split_at_mut(nx);
        let l = &lo[j * nx..(j + 1) * nx];
        let d = &di[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let s = 1.0 / (d[i] - l[i] * pu[i]);
            cu[i] *= s;
            cr[i] = (cr[i] - l[i] * pr[i]) * s;
        }
    }
    for j in (0..ny - 1).rev() {
        let c = &up[j * nx..(j + 1) * nx];
        let (cr, nr) = rhs[j * nx..(j + 2) * nx].split_at_mut(nx);
        for i in 0..nx {
            cr[i] -= c[i] * nr[i];
        }
    }
}
