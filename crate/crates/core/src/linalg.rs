//! Small dense solves and the tridiagonal (Thomas) algorithm.

pub type Mat4 = [[f64; 4]; 4];
pub type Vec4 = [f64; 4];

/// Gaussian elimination with partial pivoting. `None` when a pivot is
/// exactly zero.
pub fn solve4(a: &Mat4, b: &Vec4) -> Option<Vec4> {
    let mut m = *a;
    let mut x = *b;
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("nonempty range");
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for row in (0..4).rev() {
        let mut s = x[row];
        for k in row + 1..4 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

pub fn mat_vec4(a: &Mat4, x: &Vec4) -> Vec4 {
    let mut y = [0.0; 4];
    for (yi, row) in y.iter_mut().zip(a) {
        *yi = row.iter().zip(x).map(|(p, q)| p * q).sum();
    }
    y
}

fn norm1(a: &Mat4) -> f64 {
    (0..4)
        .map(|c| (0..4).map(|r| a[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number `|A| |A^-1|`, infinite when singular.
pub fn condition4(a: &Mat4) -> f64 {
    let mut inv = [[0.0; 4]; 4];
    for c in 0..4 {
        let mut e = [0.0; 4];
        e[c] = 1.0;
        match solve4(a, &e) {
            Some(col) => {
                for r in 0..4 {
                    inv[r][c] = col[r];
                }
            }
            None => return f64::INFINITY,
        }
    }
    norm1(a) * norm1(&inv)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves a tridiagonal system in place.
///
/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`;
/// `lower[0]` and `upper[n-1]` are ignored. `scratch` must hold `n` values.
/// No pivoting: the caller guarantees nonzero pivots.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = rhs.len();
    debug_assert!(lower.len() >= n && diag.len() >= n && upper.len() >= n && scratch.len() >= n);
    if n == 0 {
        return;
    }
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solves_permuted_system() {
        let a = [
            [0.0, 2.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 3.0, 0.0],
            [0.0, 1.0, 0.0, 4.0],
        ];
        let x = [1.0, -2.0, 0.5, 3.0];
        let b = mat_vec4(&a, &x);
        let got = solve4(&a, &b).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).abs() < 1e-14);
        }
        assert!(condition4(&a).is_finite());
    }

    #[test]
    fn singular_matrix() {
        let a = [[1.0, 2.0, 0.0, 0.0], [2.0, 4.0, 0.0, 0.0], [0.0; 4], [0.0, 0.0, 0.0, 1.0]];
        assert!(solve4(&a, &[1.0; 4]).is_none());
        assert_eq!(condition4(&a), f64::INFINITY);
    }

    #[test]
    fn identity_condition() {
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        assert_eq!(condition4(&a), 1.0);
    }

    proptest! {
        #[test]
        fn thomas_inverts_dominant_systems(
            n in 1usize..40,
            seed in proptest::collection::vec(-1.0f64..1.0, 160),
        ) {
            let lower: Vec<f64> = (0..n).map(|i| seed[i]).collect();
            let upper: Vec<f64> = (0..n).map(|i| seed[40 + i]).collect();
            let diag: Vec<f64> = (0..n).map(|i| 2.5 + seed[80 + i]).collect();
            let x: Vec<f64> = (0..n).map(|i| seed[120 + i]).collect();
            let mut b: Vec<f64> = (0..n)
                .map(|i| {
                    let mut s = diag[i] * x[i];
                    if i > 0 { s += lower[i] * x[i - 1]; }
                    if i + 1 < n { s += upper[i] * x[i + 1]; }
                    s
                })
                .collect();
            let mut scratch = vec![0.0; n];
            thomas(&lower, &diag, &upper, &mut b, &mut scratch);
            for (g, w) in b.iter().zip(&x) {
                prop_assert!((g - w).abs() < 1e-12);
            }
        }
    }
}
