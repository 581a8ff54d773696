//! Dense determinants and Pfaffians with pivoting, and the Pfaffian
//! derivative used by the extreme-eigenvalue densities.

use nalgebra::DMatrix;
use thiserror::Error;

pub type SquareMatrix = DMatrix<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("Pfaffian needs an even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix is not antisymmetric (relative deviation {0:e})")]
    NotAntisymmetric(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is singular")]
    Singular,
}

fn check_square(a: &SquareMatrix) -> Result<usize, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    Ok(a.nrows())
}

/// Sign and natural log of |det A|, by LU with partial pivoting.
/// A singular matrix gives (0, -inf).
pub fn det_sign_log(a: &SquareMatrix) -> Result<(f64, f64), LinalgError> {
    let n = check_square(a)?;
    let mut m = a.clone();
    let mut sign = 1.0;
    let mut logabs = 0.0;
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if pv == 0.0 {
            return Ok((0.0, f64::NEG_INFINITY));
        }
        if p != k {
            m.swap_rows(p, k);
            sign = -sign;
        }
        let d = m[(k, k)];
        if d < 0.0 {
            sign = -sign;
        }
        logabs += d.abs().ln();
        for i in k + 1..n {
            let factor = m[(i, k)] / d;
            if factor != 0.0 {
                for j in k + 1..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= factor * v;
                }
            }
        }
    }
    Ok((sign, logabs))
}

/// Determinant by LU with partial pivoting; the empty matrix has det 1.
pub fn det(a: &SquareMatrix) -> Result<f64, LinalgError> {
    let n = check_square(a)?;
    let mut m = a.clone();
    let mut acc = 1.0;
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if pv == 0.0 {
            return Ok(0.0);
        }
        if p != k {
            m.swap_rows(p, k);
            acc = -acc;
        }
        let d = m[(k, k)];
        acc *= d;
        for i in k + 1..n {
            let factor = m[(i, k)] / d;
            if factor != 0.0 {
                for j in k + 1..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= factor * v;
                }
            }
        }
    }
    Ok(acc)
}

/// Returns (A − Aᵀ)/2 after checking that A is antisymmetric up to rounding
/// (relative deviation below 1e-12 of the largest entry).
pub fn antisymmetrize(a: &SquareMatrix) -> Result<SquareMatrix, LinalgError> {
    let n = check_square(a)?;
    let scale = a.amax();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            dev = dev.max((a[(i, j)] + a[(j, i)]).abs());
        }
    }
    if scale > 0.0 && dev > 1e-12 * scale {
        return Err(LinalgError::NotAntisymmetric(dev / scale));
    }
    Ok((a - a.transpose()) * 0.5)
}

fn pfaffian_unchecked(mut m: SquareMatrix) -> f64 {
    let n = m.nrows();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (kp, pv) = (k + 1..n)
            .map(|i| (i, m[(i, k)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty pivot range");
        if pv == 0.0 {
            return 0.0;
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| m[(k, j)] / piv).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| m[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    m[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Pfaffian of an even-dimensional antisymmetric matrix by Parlett–Reid
/// elimination with pivoting; Pf([[0, a], [−a, 0]]) = a.
pub fn pfaffian(a: &SquareMatrix) -> Result<f64, LinalgError> {
    let m = antisymmetrize(a)?;
    if m.nrows() % 2 == 1 {
        return Err(LinalgError::OddDimension(m.nrows()));
    }
    Ok(pfaffian_unchecked(m))
}

fn minor_without(a: &SquareMatrix, p: usize, q: usize) -> SquareMatrix {
    let keep: Vec<usize> = (0..a.nrows()).filter(|&i| i != p && i != q).collect();
    SquareMatrix::from_fn(keep.len(), keep.len(), |i, j| a[(keep[i], keep[j])])
}

/// d Pf(A) along the antisymmetric direction dA.
///
/// Uses the expansion ∂Pf/∂a_ij = (−1)^(i+j+1) Pf(A with rows and columns
/// i, j removed), which stays valid when A is singular.
pub fn pfaffian_derivative(a: &SquareMatrix, da: &SquareMatrix) -> Result<f64, LinalgError> {
    let m = antisymmetrize(a)?;
    let dm = antisymmetrize(da)?;
    let n = m.nrows();
    if dm.nrows() != n {
        return Err(LinalgError::NotSquare { rows: dm.nrows(), cols: n });
    }
    if n % 2 == 1 {
        return Err(LinalgError::OddDimension(n));
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if dm[(i, j)] == 0.0 {
                continue;
            }
            let sign = if (i + j) % 2 == 0 { -1.0 } else { 1.0 };
            acc += sign * pfaffian_unchecked(minor_without(&m, i, j)) * dm[(i, j)];
        }
    }
    Ok(acc)
}

/// d Pf(A) = ½ Pf(A) tr(A⁻¹ dA), valid only for invertible A.
pub fn pfaffian_derivative_trace(a: &SquareMatrix, da: &SquareMatrix) -> Result<f64, LinalgError> {
    let pf = pfaffian(a)?;
    let inv = a.clone().try_inverse().ok_or(LinalgError::Singular)?;
    Ok(0.5 * pf * (inv * da).trace())
}
