//! Complex Gaussian, Wishart and Haar-unitary building blocks.

use nalgebra::{Cholesky, Complex, DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex<f64>>;

fn normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sd * z
}

/// n×m matrix with density ∝ exp(−tr G G†): real and imaginary parts of
/// every entry are independent N(0, ½).
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMatrix {
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n, m, |_, _| Complex::new(normal(rng, sd), normal(rng, sd)))
}

/// Haar-distributed unitary matrix: QR of a square Ginibre matrix with the
/// phases of R's diagonal moved into Q.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = sample_ginibre(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Hermitian n×n matrix with density ∝ exp(−tr D⁻² H²) for D = diag(d):
/// diagonal variance d_j²/2, off-diagonal real and imaginary parts with
/// variance d_j² d_k² / (2(d_j² + d_k²)).
pub fn sample_gaussian_hermitian<R: Rng + ?Sized>(d: &[f64], rng: &mut R) -> CMatrix {
    let n = d.len();
    let mut h = CMatrix::zeros(n, n);
    for j in 0..n {
        h[(j, j)] = Complex::new(normal(rng, d[j] * std::f64::consts::FRAC_1_SQRT_2), 0.0);
        for k in j + 1..n {
            let (a, b) = (d[j] * d[j], d[k] * d[k]);
            let sd = (a * b / (2.0 * (a + b))).sqrt();
            let z = Complex::new(normal(rng, sd), normal(rng, sd));
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
        }
    }
    h
}

/// Σ^{1/2} G G† Σ^{1/2} with G an n×m Ginibre matrix and Σ = diag(sigma)
/// (the identity when `sigma` is empty).
pub fn sample_wishart<R: Rng + ?Sized>(n: usize, m: usize, sigma: &[f64], rng: &mut R) -> CMatrix {
    let mut g = sample_ginibre(n, m, rng);
    if !sigma.is_empty() {
        for i in 0..n {
            let s = sigma[i].sqrt();
            g.row_mut(i).iter_mut().for_each(|z| *z *= s);
        }
    }
    &g * g.adjoint()
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitize(h)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of B⁻¹A for Hermitian A and positive-definite B,
/// via the Cholesky factor B = L L†.
pub fn generalized_eigenvalues(a: &CMatrix, b: &CMatrix) -> Option<Vec<f64>> {
    let l = Cholesky::new(hermitize(b))?.l();
    let x = l.solve_lower_triangular(a)?;
    let m = l.solve_lower_triangular(&x.adjoint())?;
    Some(hermitian_eigenvalues(&m))
}

/// Cayley image −i(1 − U)(1 + U)⁻¹ of a unitary matrix, which is Hermitian.
pub fn cayley_hermitian(u: &CMatrix) -> Option<CMatrix> {
    let n = u.nrows();
    let id = CMatrix::identity(n, n);
    let plus = &id + u;
    let minus = &id - u;
    // X (1+U) = (1−U)  ⇔  (1+U)ᵀ Xᵀ = (1−U)ᵀ; U commutes with (1+U)⁻¹ so
    // the left solve gives the same matrix.
    let x = plus.lu().solve(&minus)?;
    Some(x * Complex::new(0.0, -1.0))
}

/// ln |det(1 + U)|.
pub fn ln_abs_det_one_plus(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let m = CMatrix::identity(n, n) + u;
    m.lu().determinant().norm().ln()
}

/// A unitary step exp-like in a random Hermitian direction: the Cayley
/// transform (1 + iεA/2)(1 − iεA/2)⁻¹ of a standard GUE matrix A. The step
/// and its inverse are equally likely, so the proposal is symmetric.
pub fn random_unitary_step<R: Rng + ?Sized>(n: usize, eps: f64, rng: &mut R) -> CMatrix {
    let ones = vec![1.0; n];
    let a = sample_gaussian_hermitian(&ones, rng);
    let id = CMatrix::identity(n, n);
    let half = a * Complex::new(0.0, 0.5 * eps);
    let num = &id + &half;
    let den = &id - &half;
    den.lu().solve(&num).expect("I − iεA/2 is invertible for Hermitian A")
}
