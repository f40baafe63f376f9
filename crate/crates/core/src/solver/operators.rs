//! Discrete right-hand sides shared by the stepper and the residual.

use crate::grid::Grid;
use crate::model::ModelParams;

use super::FieldState;

/// Zero-flux five-point (three-point in 1D) Laplacian.
pub fn laplacian(grid: &Grid, f: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let nx = grid.nx();
    let ix2 = 1.0 / (grid.dx() * grid.dx());
    for row in f.chunks_exact(nx).zip(out.chunks_exact_mut(nx)) {
        let (f, o) = row;
        for i in 0..nx - 1 {
            let flux = (f[i + 1] - f[i]) * ix2;
            o[i] += flux;
            o[i + 1] -= flux;
        }
    }
    if grid.is_2d() {
        let iy2 = 1.0 / (grid.dy() * grid.dy());
        for j in 0..grid.ny() - 1 {
            let (a, b) = (j * nx, (j + 1) * nx);
            for i in 0..nx {
                let flux = (f[b + i] - f[a + i]) * iy2;
                out[a + i] += flux;
                out[b + i] -= flux;
            }
        }
    }
}

/// `D2 lap v - alpha v + f(u)`.
pub fn residual_v(p: &ModelParams, grid: &Grid, u: &[f64], v: &[f64], out: &mut [f64]) {
    laplacian(grid, v, out);
    let (d2, alpha, f) = (p.d2(), p.alpha(), p.kinetics());
    for ((o, &ui), &vi) in out.iter_mut().zip(u).zip(v) {
        *o = d2 * *o - alpha * vi + f.eval(ui);
    }
}

/// `div(D1 grad u - chi phi grad v) + mu u (ubar - u)`.
pub fn residual_u(p: &ModelParams, grid: &Grid, u: &[f64], v: &[f64], out: &mut [f64]) {
    let (mu, ubar) = (p.mu(), p.ubar());
    for (o, &ui) in out.iter_mut().zip(u) {
        *o = mu * ui * (ubar - ui);
    }
    let (d1, chi, phi) = (p.d1(), p.chi(), p.sensitivity());
    let nx = grid.nx();
    let idx = 1.0 / grid.dx();
    for j in 0..grid.ny() {
        let r = j * nx;
        for a in r..r + nx - 1 {
            let b = a + 1;
            let gu = (u[b] - u[a]) * idx;
            let gv = (v[b] - v[a]) * idx;
            let s = phi.eval(0.5 * (u[a] + u[b]), 0.5 * (v[a] + v[b]));
            let flux = (d1 * gu - chi * s * gv) * idx;
            out[a] += flux;
            out[b] -= flux;
        }
    }
    if grid.is_2d() {
        let idy = 1.0 / grid.dy();
        for j in 0..grid.ny() - 1 {
            let r = j * nx;
            for a in r..r + nx {
                let b = a + nx;
                let gu = (u[b] - u[a]) * idy;
                let gv = (v[b] - v[a]) * idy;
                let s = phi.eval(0.5 * (u[a] + u[b]), 0.5 * (v[a] + v[b]));
                let flux = (d1 * gu - chi * s * gv) * idy;
                out[a] += flux;
                out[b] -= flux;
            }
        }
    }
}

/// Max-norm of both stationary residuals.
pub fn steady_residual(state: &FieldState, p: &ModelParams, grid: &Grid) -> f64 {
    let mut r = vec![0.0; grid.len()];
    residual_u(p, grid, &state.u, &state.v, &mut r);
    let ru = crate::linalg::max_abs(&r);
    residual_v(p, grid, &state.u, &state.v, &mut r);
    ru.max(crate::linalg::max_abs(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{sample_mode, Domain, Mode};

    #[test]
    fn laplacian_of_discrete_cosine() {
        let d = Domain::square(1.0).unwrap();
        let g = Grid::new(d, 20, 16).unwrap();
        let mode = Mode::new(d, 3, 2).unwrap();
        let f = sample_mode(&g, &mode).unwrap();
        let mut out = vec![0.0; g.len()];
        laplacian(&g, &f, &mut out);
        // cell-centred cosines are exact eigenvectors of the discrete operator
        let sx = (3.0 * std::f64::consts::PI * g.dx() / 2.0).sin();
        let sy = (2.0 * std::f64::consts::PI * g.dy() / 2.0).sin();
        let lam = 4.0 * sx * sx / (g.dx() * g.dx()) + 4.0 * sy * sy / (g.dy() * g.dy());
        for (o, x) in out.iter().zip(&f) {
            assert!((o + lam * x).abs() < 1e-10);
        }
    }

    #[test]
    fn residual_vanishes_at_rest() {
        let p = ModelParams::new(2.0, 0.5, 7.0, 3.0, 2.0, 0.5, crate::model::Sensitivity::Linear, crate::model::Kinetics::affine_linear(1.5).unwrap()).unwrap();
        let g = Grid::uniform(Domain::square(2.0).unwrap(), 10).unwrap();
        let s = FieldState::homogeneous(&p, &g);
        assert_eq!(steady_residual(&s, &p, &g), 0.0);
    }
}
