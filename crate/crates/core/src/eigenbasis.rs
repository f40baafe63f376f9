//! Neumann Laplacian eigenpairs on intervals and rectangles.
//!
//! Modes are products of cosines, `Phi = c cos(m pi x / Lx) cos(n pi y / Ly)`,
//! normalized to unit L2 norm. Index `n` is always zero on an interval.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("domain length {name} must be positive and finite (got {value})")]
    BadLength { name: &'static str, value: f64 },
    #[error("mode indices ({m}, {n}) are invalid for {domain}")]
    BadIndices { m: usize, n: usize, domain: Domain },
    #[error("point {point:?} lies outside {domain}")]
    OutsideDomain { point: Vec<f64>, domain: Domain },
    #[error("field has {got} values but the grid has {expected} cells")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("grid domain {grid} does not match mode domain {mode}")]
    DomainMismatch { grid: Domain, mode: Domain },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Interval,
    Rectangle,
}

/// `(0, lx)` or `(0, lx) x (0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    lx: f64,
    ly: Option<f64>,
}

fn check_length(name: &'static str, value: f64) -> Result<f64, EigenError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(EigenError::BadLength { name, value })
    }
}

impl Domain {
    pub fn interval(l: f64) -> Result<Self, EigenError> {
        Ok(Domain {
            lx: check_length("lx", l)?,
            ly: None,
        })
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self, EigenError> {
        Ok(Domain {
            lx: check_length("lx", lx)?,
            ly: Some(check_length("ly", ly)?),
        })
    }

    pub fn square(l: f64) -> Result<Self, EigenError> {
        Self::rectangle(l, l)
    }

    pub fn kind(&self) -> DomainKind {
        match self.ly {
            None => DomainKind::Interval,
            Some(_) => DomainKind::Rectangle,
        }
    }

    pub fn dim(&self) -> usize {
        match self.ly {
            None => 1,
            Some(_) => 2,
        }
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> Option<f64> {
        self.ly
    }

    /// Length or area.
    pub fn measure(&self) -> f64 {
        self.lx * self.ly.unwrap_or(1.0)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        let inside = |x: f64, l: f64| (0.0..=l).contains(&x);
        match (self.ly, point) {
            (None, [x]) => inside(*x, self.lx),
            (Some(ly), [x, y]) => inside(*x, self.lx) && inside(*y, ly),
            _ => false,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ly {
            None => write!(f, "interval (0, {})", self.lx),
            Some(ly) => write!(f, "rectangle (0, {}) x (0, {})", self.lx, ly),
        }
    }
}

/// Normalization factor of `cos(k pi x / l)` on `(0, l)`.
#[inline]
fn axis_norm(k: usize, l: f64) -> f64 {
    if k == 0 {
        (1.0 / l).sqrt()
    } else {
        (2.0 / l).sqrt()
    }
}

#[inline]
fn axis_wavenumber(k: usize, l: f64) -> f64 {
    k as f64 * PI / l
}

/// A normalized Neumann eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    domain: Domain,
    m: usize,
    n: usize,
    lambda: f64,
    norm_const: f64,
    multiplicity: usize,
}

impl Mode {
    /// Builds mode `(m, n)`; on an interval `n` must be zero.
    pub fn new(domain: Domain, m: usize, n: usize) -> Result<Self, EigenError> {
        let bad = (m == 0 && n == 0) || (domain.kind() == DomainKind::Interval && n != 0);
        if bad {
            return Err(EigenError::BadIndices { m, n, domain });
        }
        let (lambda, norm_const) = match domain.ly {
            None => (axis_wavenumber(m, domain.lx).powi(2), axis_norm(m, domain.lx)),
            Some(ly) => (
                axis_wavenumber(m, domain.lx).powi(2) + axis_wavenumber(n, ly).powi(2),
                axis_norm(m, domain.lx) * axis_norm(n, ly),
            ),
        };
        Ok(Mode {
            domain,
            m,
            n,
            lambda,
            norm_const,
            multiplicity: 1,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn indices(&self) -> (usize, usize) {
        (self.m, self.n)
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Number of index tuples sharing this eigenvalue. Only meaningful for
    /// modes produced by [`enumerate_modes`]; a bare [`Mode::new`] reports 1.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn is_degenerate(&self) -> bool {
        self.multiplicity > 1
    }

    /// True when the mode varies along one axis only.
    pub fn is_one_dimensional(&self) -> bool {
        self.m == 0 || self.n == 0
    }

    /// Unchecked evaluation at `(x, y)`; `y` is ignored on an interval.
    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let cx = (axis_wavenumber(self.m, self.domain.lx) * x).cos();
        match self.domain.ly {
            None => self.norm_const * cx,
            Some(ly) => self.norm_const * cx * (axis_wavenumber(self.n, ly) * y).cos(),
        }
    }

    /// Unchecked gradient at `(x, y)`; the second component is zero in 1D.
    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let kx = axis_wavenumber(self.m, self.domain.lx);
        match self.domain.ly {
            None => [-self.norm_const * kx * (kx * x).sin(), 0.0],
            Some(ly) => {
                let ky = axis_wavenumber(self.n, ly);
                let (sx, cx) = (kx * x).sin_cos();
                let (sy, cy) = (ky * y).sin_cos();
                [
                    -self.norm_const * kx * sx * cy,
                    -self.norm_const * ky * cx * sy,
                ]
            }
        }
    }

    fn cmp_order(&self, other: &Mode) -> Ordering {
        self.lambda
            .total_cmp(&other.lambda)
            .then((self.m, self.n).cmp(&(other.m, other.n)))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.domain.kind() {
            DomainKind::Interval => write!(f, "mode {}", self.m),
            DomainKind::Rectangle => write!(f, "mode ({}, {})", self.m, self.n),
        }
    }
}

/// Relative tolerance under which two eigenvalues count as equal.
pub const EIGENVALUE_TIE_TOL: f64 = 1e-12;

fn same_eigenvalue(a: f64, b: f64) -> bool {
    (a - b).abs() <= EIGENVALUE_TIE_TOL * a.abs().max(b.abs())
}

/// Every mode with `0 < lambda <= lambda_max`, sorted by eigenvalue with ties
/// ordered lexicographically on `(m, n)`.
pub fn enumerate_modes(domain: Domain, lambda_max: f64) -> Vec<Mode> {
    if !(lambda_max > 0.0) {
        return Vec::new();
    }
    let reach = |l: f64| {
        let k = (lambda_max.sqrt() * l / PI).floor();
        if k.is_finite() { k as usize } else { 0 }
    };
    let max_m = reach(domain.lx);
    let max_n = domain.ly.map_or(0, reach);
    let mut modes = Vec::new();
    for m in 0..=max_m {
        for n in 0..=max_n {
            if m == 0 && n == 0 {
                continue;
            }
            let mode = Mode::new(domain, m, n).expect("indices checked");
            // tolerate the eigenvalue formula rounding just above the bound
            if mode.lambda <= lambda_max * (1.0 + EIGENVALUE_TIE_TOL) {
                modes.push(mode);
            }
        }
    }
    modes.sort_by(Mode::cmp_order);

    let mut start = 0;
    while start < modes.len() {
        let mut end = start + 1;
        while end < modes.len() && same_eigenvalue(modes[start].lambda, modes[end].lambda) {
            end += 1;
        }
        let group = &mut modes[start..end];
        group.sort_by_key(|m| (m.m, m.n));
        for mode in group {
            mode.multiplicity = end - start;
        }
        start = end;
    }
    modes
}

/// Normalized eigenfunction value at a point inside the closed domain.
pub fn eval_mode(mode: &Mode, point: &[f64]) -> Result<f64, EigenError> {
    if !mode.domain.contains(point) {
        return Err(EigenError::OutsideDomain {
            point: point.to_vec(),
            domain: mode.domain,
        });
    }
    Ok(mode.value(point[0], point.get(1).copied().unwrap_or(0.0)))
}

/// Integrals of a mode consumed by the branch analytics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMoments {
    /// integral of Phi^3
    pub i3: f64,
    /// integral of Phi^4
    pub i4: f64,
    /// integral of Phi |grad Phi|^2
    pub i_grad: f64,
}

impl ModeMoments {
    pub fn scaled_i4(self, c: f64) -> Self {
        ModeMoments { i4: c * self.i4, ..self }
    }
}

/// Closed-form moments.
///
/// Along an axis with index k >= 1, the integrals of cos^3 and of cos sin^2
/// over whole half periods vanish, so both `i3` and `i_grad` are zero for
/// every nonconstant mode; `i4` factorizes into `3L/8` (k >= 1) or `L`
/// (k = 0) per axis.
pub fn moments(mode: &Mode) -> ModeMoments {
    let quartic = |k: usize, l: f64| {
        let a4 = axis_norm(k, l).powi(4);
        if k == 0 { a4 * l } else { a4 * 3.0 * l / 8.0 }
    };
    let i4 = match mode.domain.ly {
        None => quartic(mode.m, mode.domain.lx),
        Some(ly) => quartic(mode.m, mode.domain.lx) * quartic(mode.n, ly),
    };
    let out = ModeMoments { i3: 0.0, i4, i_grad: 0.0 };
    debug_assert!((out.i_grad - 0.5 * mode.lambda * out.i3).abs() <= 1e-8);
    out
}

/// Moments plus the squared norm, evaluated by composite midpoint quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub norm2: f64,
    pub moments: ModeMoments,
}

/// Composite midpoint quadrature with 64 points per unit of the largest
/// index on each axis. Midpoint sums of trigonometric polynomials of degree
/// below the point count are exact, so this reproduces the closed forms to
/// round-off.
pub fn quadrature_moments(mode: &Mode) -> QuadratureMoments {
    let nodes = |k: usize, l: f64| -> (usize, f64) {
        let n = 64 * k.max(1);
        (n, l / n as f64)
    };
    let (nx, hx) = nodes(mode.m, mode.domain.lx);
    let (ny, hy) = match mode.domain.ly {
        None => (1, 1.0),
        Some(ly) => nodes(mode.n, ly),
    };
    let (mut s2, mut s3, mut s4, mut sg) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..ny {
        let y = (j as f64 + 0.5) * hy;
        for i in 0..nx {
            let x = (i as f64 + 0.5) * hx;
            let p = mode.value(x, y);
            let [gx, gy] = mode.gradient(x, y);
            let p2 = p * p;
            s2 += p2;
            s3 += p2 * p;
            s4 += p2 * p2;
            sg += p * (gx * gx + gy * gy);
        }
    }
    let w = hx * hy;
    QuadratureMoments {
        norm2: s2 * w,
        moments: ModeMoments {
            i3: s3 * w,
            i4: s4 * w,
            i_grad: sg * w,
        },
    }
}

/// Samples a mode at the cell centres of `grid`, row-major with x fastest.
pub fn sample_mode(grid: &Grid, mode: &Mode) -> Result<Vec<f64>, EigenError> {
    check_grid(grid, mode)?;
    let kx = axis_wavenumber(mode.m, mode.domain.lx);
    let cx: Vec<f64> = (0..grid.nx()).map(|i| (kx * grid.x(i)).cos()).collect();
    let cy: Vec<f64> = match mode.domain.ly {
        None => vec![1.0],
        Some(ly) => {
            let ky = axis_wavenumber(mode.n, ly);
            (0..grid.ny()).map(|j| (ky * grid.y(j)).cos()).collect()
        }
    };
    let mut out = Vec::with_capacity(grid.len());
    for &fy in &cy {
        out.extend(cx.iter().map(|&fx| mode.norm_const * fx * fy));
    }
    Ok(out)
}

fn check_grid(grid: &Grid, mode: &Mode) -> Result<(), EigenError> {
    if grid.domain() != mode.domain {
        return Err(EigenError::DomainMismatch {
            grid: grid.domain(),
            mode: mode.domain,
        });
    }
    Ok(())
}

/// Midpoint-rule inner product of a cell-centred field with a mode.
pub fn project(field: &[f64], grid: &Grid, mode: &Mode) -> Result<f64, EigenError> {
    if field.len() != grid.len() {
        return Err(EigenError::ShapeMismatch {
            expected: grid.len(),
            got: field.len(),
        });
    }
    let phi = sample_mode(grid, mode)?;
    let dot: f64 = field.iter().zip(&phi).map(|(a, b)| a * b).sum();
    Ok(dot * grid.cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn interval_spectrum() {
        let d = Domain::interval(PI).unwrap();
        let modes = enumerate_modes(d, 5.0);
        let got: Vec<_> = modes.iter().map(|m| (m.m(), m.lambda())).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0, 1);
        assert_relative_eq!(got[0].1, 1.0, epsilon = 1e-14);
        assert_eq!(got[1].0, 2);
        assert_relative_eq!(got[1].1, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn square_spectrum_with_ties() {
        let d = Domain::square(1.0).unwrap();
        let modes = enumerate_modes(d, 2.0 * PI * PI);
        let idx: Vec<_> = modes.iter().map(|m| m.indices()).collect();
        assert_eq!(idx, vec![(0, 1), (1, 0), (1, 1)]);
        assert_eq!(modes[0].multiplicity(), 2);
        assert_eq!(modes[1].multiplicity(), 2);
        assert_eq!(modes[2].multiplicity(), 1);
        assert_relative_eq!(modes[2].lambda(), 2.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn nothing_below_first_eigenvalue() {
        assert!(enumerate_modes(Domain::interval(PI).unwrap(), 0.5).is_empty());
        assert!(enumerate_modes(Domain::square(1.0).unwrap(), 9.0).is_empty());
        assert!(enumerate_modes(Domain::square(1.0).unwrap(), -1.0).is_empty());
    }

    #[test]
    fn point_values() {
        let m1 = Mode::new(Domain::interval(PI).unwrap(), 1, 0).unwrap();
        assert_relative_eq!(eval_mode(&m1, &[0.0]).unwrap(), (2.0 / PI).sqrt(), epsilon = 1e-15);
        assert!(eval_mode(&m1, &[PI / 2.0]).unwrap().abs() < 1e-15);
        let sq = Mode::new(Domain::square(1.0).unwrap(), 1, 1).unwrap();
        assert_relative_eq!(eval_mode(&sq, &[0.0, 0.0]).unwrap(), 2.0, epsilon = 1e-15);
        assert!(eval_mode(&sq, &[0.5, 0.3]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn outside_domain_is_an_error() {
        let m1 = Mode::new(Domain::interval(1.0).unwrap(), 1, 0).unwrap();
        assert!(matches!(eval_mode(&m1, &[1.5]), Err(EigenError::OutsideDomain { .. })));
        assert!(eval_mode(&m1, &[0.5, 0.5]).is_err());
        assert!(eval_mode(&m1, &[1.0]).is_ok());
    }

    #[test]
    fn invalid_indices() {
        let d = Domain::interval(1.0).unwrap();
        assert!(Mode::new(d, 0, 0).is_err());
        assert!(Mode::new(d, 1, 1).is_err());
        assert!(Domain::rectangle(1.0, 0.0).is_err());
        assert!(Domain::interval(f64::INFINITY).is_err());
    }

    #[test]
    fn closed_form_quartic_moments() {
        let sq = Mode::new(Domain::square(1.0).unwrap(), 1, 1).unwrap();
        assert_relative_eq!(moments(&sq).i4, 2.25, epsilon = 1e-13);
        let m1 = Mode::new(Domain::interval(PI).unwrap(), 1, 0).unwrap();
        assert_relative_eq!(moments(&m1).i4, 1.5 / PI, epsilon = 1e-15);
        assert_eq!(moments(&sq).i3, 0.0);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let d = Domain::rectangle(1.3, 0.7).unwrap();
        for mode in enumerate_modes(d, 300.0) {
            let q = quadrature_moments(&mode);
            let c = moments(&mode);
            assert!((q.norm2 - 1.0).abs() <= 1e-12, "{mode}: {}", q.norm2);
            assert!(q.moments.i3.abs() <= 1e-10, "{mode}");
            assert!((q.moments.i_grad - 0.5 * mode.lambda() * q.moments.i3).abs() <= 1e-8);
            assert_relative_eq!(q.moments.i4, c.i4, max_relative = 1e-12);
        }
    }

    #[test]
    fn project_sampled_combinations() {
        let d = Domain::square(1.0).unwrap();
        let g = Grid::new(d, 32, 32).unwrap();
        let j = Mode::new(d, 2, 1).unwrap();
        let k = Mode::new(d, 0, 3).unwrap();
        let pj = sample_mode(&g, &j).unwrap();
        let pk = sample_mode(&g, &k).unwrap();
        let f: Vec<f64> = pj.iter().zip(&pk).map(|(a, b)| 3.0 * a + 5.0 * b).collect();
        assert_relative_eq!(project(&f, &g, &k).unwrap(), 5.0, epsilon = 1e-12);
        assert_relative_eq!(project(&pk, &g, &k).unwrap(), 1.0, epsilon = 1e-12);
        let c = vec![7.5; g.len()];
        assert!(project(&c, &g, &j).unwrap().abs() < 1e-12);
    }

    #[test]
    fn project_shape_errors() {
        let d = Domain::square(1.0).unwrap();
        let g = Grid::new(d, 16, 16).unwrap();
        let k = Mode::new(d, 1, 0).unwrap();
        assert!(matches!(
            project(&[1.0; 10], &g, &k),
            Err(EigenError::ShapeMismatch { expected: 256, got: 10 })
        ));
        let other = Mode::new(Domain::square(2.0).unwrap(), 1, 0).unwrap();
        assert!(matches!(
            project(&vec![0.0; 256], &g, &other),
            Err(EigenError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn discrete_orthonormality_on_square() {
        let d = Domain::square(1.0).unwrap();
        let modes = enumerate_modes(d, 120.0);
        let max_idx = modes.iter().map(|m| m.m().max(m.n())).max().unwrap();
        let n = 4 * max_idx;
        let g = Grid::new(d, n, n).unwrap();
        for a in &modes {
            let fa = sample_mode(&g, a).unwrap();
            for b in &modes {
                let p = project(&fa, &g, b).unwrap();
                let want = if a.indices() == b.indices() { 1.0 } else { 0.0 };
                assert!((p - want).abs() <= 1e-12, "{a} vs {b}: {p}");
            }
        }
    }

    proptest! {
        #[test]
        fn enumeration_is_sorted_and_bounded(lx in 0.2f64..6.0, ly in 0.2f64..6.0, lmax in 1.0f64..400.0) {
            let d = Domain::rectangle(lx, ly).unwrap();
            let modes = enumerate_modes(d, lmax);
            for w in modes.windows(2) {
                prop_assert!(w[0].lambda() <= w[1].lambda());
            }
            for m in &modes {
                prop_assert!(m.lambda() > 0.0 && m.lambda() <= lmax * (1.0 + 1e-12));
                prop_assert!(m.multiplicity() >= 1);
            }
            // brute-force count
            let mut count = 0;
            for m in 0..60usize {
                for n in 0..60usize {
                    if (m, n) != (0, 0) && Mode::new(d, m, n).unwrap().lambda() <= lmax {
                        count += 1;
                    }
                }
            }
            prop_assert_eq!(modes.len(), count);
        }

        #[test]
        fn sampled_mode_has_unit_projection(m in 0usize..6, n in 0usize..6, lx in 0.5f64..3.0, ly in 0.5f64..3.0) {
            prop_assume!((m, n) != (0, 0));
            let d = Domain::rectangle(lx, ly).unwrap();
            let mode = Mode::new(d, m, n).unwrap();
            let g = Grid::new(d, 24, 24).unwrap();
            let f = sample_mode(&g, &mode).unwrap();
            prop_assert!((project(&f, &g, &mode).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
