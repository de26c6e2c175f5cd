//! Small dense linear algebra: cyclic Jacobi eigensolver for symmetric
//! matrices and an LU solve with partial pivoting. The matrices handled
//! here are tiny (interaction matrices and reduced Hessians, dimension
//! m(N+1) at most a few dozen), so O(n^3) dense routines are the right tool.

/// Eigen-decomposition of a symmetric matrix.
pub struct SymEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

fn off_norm(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[i][j] * a[i][j];
        }
    }
    (2.0 * s).sqrt()
}

fn frobenius(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal norm is below
/// `1e-13 * max(1, ||A||_F)`.
pub fn sym_eigen(matrix: &[Vec<f64>]) -> SymEigen {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let tol = 1e-13 * frobenius(&a).max(1.0);
    let mut sweeps = 0;
    while off_norm(&a) > tol && sweeps < 100 {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    SymEigen { values, vectors }
}

/// Solve `A x = b` by LU with partial pivoting. Returns `None` if the
/// matrix is singular to working precision.
pub fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x: Vec<f64> = b.to_vec();
    let scale = frobenius(a).max(1.0);
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?;
        if piv_val < 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            m[r][col] = 0.0;
            for c in (col + 1)..n {
                m[r][c] -= f * m[col][c];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for c in (col + 1)..n {
            s -= m[col][c] * x[c];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| dot(row, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Characteristic-polynomial oracle for symmetric 2x2 and 3x3 matrices.
    fn eig_oracle(a: &[Vec<f64>]) -> Vec<f64> {
        match a.len() {
            1 => vec![a[0][0]],
            2 => {
                let tr = a[0][0] + a[1][1];
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let d = (tr * tr / 4.0 - det).max(0.0).sqrt();
                vec![tr / 2.0 - d, tr / 2.0 + d]
            }
            3 => {
                // Trigonometric solution for the symmetric cubic.
                let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
                let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
                let p2 = (a[0][0] - q).powi(2)
                    + (a[1][1] - q).powi(2)
                    + (a[2][2] - q).powi(2)
                    + 2.0 * p1;
                let p = (p2 / 6.0).sqrt();
                if p < 1e-300 {
                    return vec![q, q, q];
                }
                let mut b = vec![vec![0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
                    }
                }
                let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                    - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                    + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
                let r = (det_b / 2.0).clamp(-1.0, 1.0);
                let phi = r.acos() / 3.0;
                let e1 = q + 2.0 * p * phi.cos();
                let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
                let e2 = 3.0 * q - e1 - e3;
                let mut v = vec![e1, e2, e3];
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
            _ => panic!("oracle only covers n <= 3"),
        }
    }

    #[test]
    fn jacobi_matches_characteristic_polynomial_oracle() {
        // Deterministic pseudo-random symmetric matrices.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for n in [2usize, 3] {
            for _ in 0..40 {
                let mut a = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in i..n {
                        let x = next();
                        a[i][j] = x;
                        a[j][i] = x;
                    }
                }
                let got = sym_eigen(&a);
                let want = eig_oracle(&a);
                for (g, w) in got.values.iter().zip(&want) {
                    assert_abs_diff_eq!(g, w, epsilon = 1e-10);
                }
                // residual of the eigenpairs
                for (k, lam) in got.values.iter().enumerate() {
                    let av = mat_vec(&a, &got.vectors[k]);
                    for (i, ai) in av.iter().enumerate() {
                        assert_abs_diff_eq!(*ai, lam * got.vectors[k][i], epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn lu_solves_and_flags_singular() {
        let a = vec![
            vec![2.0, 1.0, -1.0],
            vec![-3.0, -1.0, 2.0],
            vec![-2.0, 1.0, 2.0],
        ];
        let x = lu_solve(&a, &[8.0, -11.0, -3.0]).unwrap();
        for (got, want) in x.iter().zip(&[2.0, 3.0, -1.0]) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
        let sing = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(lu_solve(&sing, &[1.0, 2.0]).is_none());
    }
}
