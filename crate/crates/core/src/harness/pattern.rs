//! Spike detection on a cell field.

use crate::grid::Grid;

/// Fraction of `max - mean` a peak must rise above the mean.
pub const PEAK_PROMINENCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

fn neighbours(grid: &Grid, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    (-1isize..=1)
        .flat_map(|dj| (-1isize..=1).map(move |di| (di, dj)))
        .filter(|&d| d != (0, 0))
        .map(move |(di, dj)| (i as isize + di, j as isize + dj))
        .filter(move |&(a, b)| a >= 0 && b >= 0 && a < nx && b < ny)
        .map(|(a, b)| (a as usize, b as usize))
}

/// Local maxima over the 8-neighbourhood (2 in 1D) that exceed
/// `mean + 0.1 (max - mean)`. A plateau of equal maxima counts once, at its
/// first cell in storage order. Sorted by value, largest first.
pub fn local_maxima(grid: &Grid, field: &[f64]) -> Vec<Peak> {
    let n = field.len() as f64;
    let mean = field.iter().sum::<f64>() / n;
    let max = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = mean + PEAK_PROMINENCE * (max - mean);
    let candidate = |k: usize| -> bool {
        let (i, j) = grid.cell(k);
        field[k] > floor && neighbours(grid, i, j).all(|(a, b)| field[grid.index(a, b)] <= field[k])
    };
    let is_candidate: Vec<bool> = (0..field.len()).map(candidate).collect();
    let mut seen = vec![false; field.len()];
    let mut peaks = Vec::new();
    for k in 0..field.len() {
        if !is_candidate[k] || seen[k] {
            continue;
        }
        // flood the plateau so it is reported once
        let mut stack = vec![k];
        seen[k] = true;
        while let Some(c) = stack.pop() {
            let (i, j) = grid.cell(c);
            for (a, b) in neighbours(grid, i, j) {
                let q = grid.index(a, b);
                if is_candidate[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        let (i, j) = grid.cell(k);
        peaks.push(Peak { i, j, x: grid.x(i), y: grid.y(j), value: field[k] });
    }
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value));
    peaks
}

/// True if `peak` lies within one cell of the point `(x, y)`.
pub fn near(grid: &Grid, peak: &Peak, x: f64, y: f64) -> bool {
    let tol = 1.0 + 1e-9;
    (peak.x - x).abs() <= tol * grid.dx() && (!grid.is_2d() || (peak.y - y).abs() <= tol * grid.dy())
}
