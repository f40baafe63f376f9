//! Field CSV and PGM heatmap writers.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::grid::Grid;

use super::HarnessError;

/// Time label used in file names: the shortest decimal that round-trips.
pub fn time_label(t: f64) -> String {
    format!("{t}")
}

/// `x,y,u,v` rows (or `x,u,v` in 1D) in storage order.
pub fn field_csv(grid: &Grid, u: &[f64], v: &[f64]) -> String {
    let mut s = String::with_capacity(grid.len() * 64);
    s.push_str(if grid.is_2d() { "x,y,u,v\n" } else { "x,u,v\n" });
    for (k, (a, b)) in u.iter().zip(v).enumerate() {
        let (i, j) = grid.cell(k);
        if grid.is_2d() {
            s.push_str(&format!("{},{},{a},{b}\n", grid.x(i), grid.y(j)));
        } else {
            s.push_str(&format!("{},{a},{b}\n", grid.x(i)));
        }
    }
    s
}

/// Binary greymap of `field` scaled linearly from its min (0) to max (255);
/// the first image row is the top of the domain. Returns the bytes and the
/// `(min, max)` used.
pub fn pgm(grid: &Grid, field: &[f64]) -> (Vec<u8>, f64, f64) {
    let (lo, hi) = field
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", grid.nx(), grid.ny()).into_bytes();
    for j in (0..grid.ny()).rev() {
        for i in 0..grid.nx() {
            let x = field[grid.index(i, j)];
            let g = if span > 0.0 { ((x - lo) / span * 255.0).round() } else { 0.0 };
            out.push(g.clamp(0.0, 255.0) as u8);
        }
    }
    (out, lo, hi)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(HarnessError::io(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(HarnessError::io(path))
}

/// Writes `<stem>.pgm` and its `<stem>.range.txt` sidecar; returns both paths.
pub fn write_heatmap(dir: &Path, stem: &str, grid: &Grid, field: &[f64]) -> Result<[PathBuf; 2], HarnessError> {
    let (bytes, lo, hi) = pgm(grid, field);
    let image = dir.join(format!("{stem}.pgm"));
    let range = dir.join(format!("{stem}.range.txt"));
    write_file(&image, &bytes)?;
    write_file(&range, format!("{lo} {hi}\n").as_bytes())?;
    Ok([image, range])
}
