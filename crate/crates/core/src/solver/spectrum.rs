//! Full discrete cosine decomposition of a cell field.

use std::f64::consts::PI;

use crate::grid::Grid;

/// Coefficients of a field on every cell-centred cosine `(m, n)` with
/// `m < nx`, `n < ny`, using the same normalization as `project`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineSpectrum {
    nx: usize,
    ny: usize,
    coeffs: Vec<f64>,
}

/// `basis[m * n + i] = a_m cos(m pi x_i / l) * h`.
fn axis_basis(n: usize, l: f64) -> Vec<f64> {
    let h = l / n as f64;
    let mut b = Vec::with_capacity(n * n);
    for m in 0..n {
        let a = if m == 0 { (1.0 / l).sqrt() } else { (2.0 / l).sqrt() };
        let k = m as f64 * PI / l;
        b.extend((0..n).map(|i| a * (k * (i as f64 + 0.5) * h).cos() * h));
    }
    b
}

impl CosineSpectrum {
    pub fn new(grid: &Grid, field: &[f64]) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        assert_eq!(field.len(), nx * ny, "field does not match grid");
        let bx = axis_basis(nx, grid.domain().lx());
        // x transform of every row
        let mut rows = vec![0.0; nx * ny];
        for j in 0..ny {
            let f = &field[j * nx..(j + 1) * nx];
            for m in 0..nx {
                let b = &bx[m * nx..(m + 1) * nx];
                rows[j * nx + m] = f.iter().zip(b).map(|(p, q)| p * q).sum();
            }
        }
        let coeffs = match grid.domain().ly() {
            None => rows,
            Some(ly) => {
                let by = axis_basis(ny, ly);
                let mut out = vec![0.0; nx * ny];
                for n in 0..ny {
                    let dst = &mut out[n * nx..(n + 1) * nx];
                    for j in 0..ny {
                        let w = by[n * ny + j];
                        for (d, r) in dst.iter_mut().zip(&rows[j * nx..(j + 1) * nx]) {
                            *d += w * r;
                        }
                    }
                }
                out
            }
        };
        CosineSpectrum { nx, ny, coeffs }
    }

    pub fn coefficient(&self, m: usize, n: usize) -> f64 {
        self.coeffs[n * self.nx + m]
    }

    /// Sum of squared coefficients over every nonzero mode.
    pub fn nonzero_energy(&self) -> f64 {
        self.coeffs.iter().skip(1).map(|c| c * c).sum()
    }

    /// Nonzero mode with the largest squared coefficient, ties to the
    /// lexicographically smallest `(m, n)`.
    pub fn dominant(&self) -> Option<((usize, usize), f64)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for n in 0..self.ny {
            for m in 0..self.nx {
                if (m, n) == (0, 0) {
                    continue;
                }
                let e = self.coefficient(m, n).powi(2);
                let better = match best {
                    None => true,
                    Some(((bm, bn), be)) => e > be || (e == be && (m, n) < (bm, bn)),
                };
                if better {
                    best = Some(((m, n), e));
                }
            }
        }
        best
    }
}
