//! Cell-centred grids over a [`Domain`].

use thiserror::Error;

use crate::eigenbasis::{Domain, DomainKind};

/// Fewest cells allowed along any axis.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("{axis} needs at least {MIN_CELLS} cells (got {got})")]
    TooFewCells { axis: &'static str, got: usize },
    #[error("an interval grid has ny = 1 (got {0})")]
    IntervalRows(usize),
}

/// Uniform cell-centred grid; `ny == 1` on an interval. Cell `(i, j)` is
/// stored at `j * nx + i` with centre `((i + 1/2) dx, (j + 1/2) dy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    domain: Domain,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid {
    /// On an interval `ny` must be 1.
    pub fn new(domain: Domain, nx: usize, ny: usize) -> Result<Self, GridError> {
        if nx < MIN_CELLS {
            return Err(GridError::TooFewCells { axis: "nx", got: nx });
        }
        let dx = domain.lx() / nx as f64;
        match domain.ly() {
            None => {
                if ny != 1 {
                    return Err(GridError::IntervalRows(ny));
                }
                Ok(Grid { domain, nx, ny: 1, dx, dy: 1.0 })
            }
            Some(ly) => {
                if ny < MIN_CELLS {
                    return Err(GridError::TooFewCells { axis: "ny", got: ny });
                }
                Ok(Grid { domain, nx, ny, dx, dy: ly / ny as f64 })
            }
        }
    }

    /// `n` cells per axis, or `n` cells on an interval.
    pub fn uniform(domain: Domain, n: usize) -> Result<Self, GridError> {
        match domain.kind() {
            DomainKind::Interval => Self::new(domain, n, 1),
            DomainKind::Rectangle => Self::new(domain, n, n),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    /// Row spacing; 1 on an interval so that `cell_volume` is `dx`.
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn is_2d(&self) -> bool {
        self.domain.kind() == DomainKind::Rectangle
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }
    /// Smallest spacing actually used by the stencil.
    pub fn min_spacing(&self) -> f64 {
        if self.is_2d() { self.dx.min(self.dy) } else { self.dx }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }
    /// Row centre; 0 on an interval.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        if self.is_2d() { (j as f64 + 0.5) * self.dy } else { 0.0 }
    }

    /// Evaluates `f(x, y)` at every cell centre.
    pub fn sample(&self, mut f: impl FnMut(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            let y = self.y(j);
            for i in 0..self.nx {
                out.push(f(self.x(i), y));
            }
        }
        out
    }

    /// Midpoint-rule integral of a cell field.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        field.iter().sum::<f64>() * self.cell_volume()
    }

    /// Cell of the given flat index as `(i, j)`.
    pub fn cell(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }
}
