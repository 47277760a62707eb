//! Small dense linear-algebra helpers used by both backends.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Wraps `nalgebra`'s symmetric eigensolver; the input is symmetrized first
/// so that accumulated floating-point asymmetry cannot leak in.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen: matrix must be square");
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Exponential of a general complex matrix by scaling and squaring.
///
/// Intended for the anti-Hermitian generators of the optical unitaries
/// (squeezing, displacement, beam-splitter blocks), whose norms stay modest
/// after scaling.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm: matrix must be square");
    let norm = m
        .row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.map(|z| z / 2f64.powi(squarings as i32));
    // Taylor series of the scaled matrix; ~20 terms reach machine precision
    // once the scaled norm is below 1/2.
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=24 {
        term = (&term * &scaled).map(|z| z / k as f64);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn inv_sqrt_hermitian(m: &DMatrix<C64>, min_eig: f64) -> Option<DMatrix<C64>> {
    let (values, vectors) = hermitian_eigen(m);
    if values.iter().any(|&v| v < min_eig) {
        return None;
    }
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        vectors[(i, j)] / C64::from(values[j].sqrt())
    });
    Some(&scaled * vectors.adjoint())
}

/// Square root of a Hermitian positive-semidefinite matrix, clamping small
/// negative eigenvalues to zero.
pub fn sqrt_hermitian_psd(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(m);
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        vectors[(i, j)] * C64::from(values[j].max(0.0).sqrt())
    });
    &scaled * vectors.adjoint()
}

/// ln(n!).
pub fn ln_factorial(n: usize) -> f64 {
    // Exact accumulation is plenty accurate for the n ≲ 300 used here.
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Poisson tail mass P(X > n_max) for mean `lambda`.
pub fn poisson_tail(lambda: f64, n_max: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let mut cdf = 0.0;
    let mut ln_term = -lambda; // ln of e^{-λ} λ^0 / 0!
    for n in 0..=n_max {
        if n > 0 {
            ln_term += lambda.ln() - (n as f64).ln();
        }
        cdf += ln_term.exp();
    }
    (1.0 - cdf).max(0.0)
}

/// Hermite-function value ⟨x|n⟩ = π^{-1/4} H_n(x) e^{-x²/2} / sqrt(2^n n!)
/// for the quadrature convention X = (a + a†)/√2.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let weight = (-0.5 * x * x).exp() * std::f64::consts::PI.powf(-0.25);
    // Recurrence on the normalized functions h_n = H_n/sqrt(2^n n!) directly,
    // which avoids overflow of the raw Hermite polynomials.
    let mut prev = weight; // n = 0
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * x * weight; // n = 1
    for k in 2..=n {
        let next = ((2.0 / k as f64).sqrt() * x) * cur
            - (((k - 1) as f64) / k as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal eigenbranches of a Hermitian matrix with eigenvalues above
/// `weight_tol`, largest first. Used to decompose low-rank density operators.
pub fn dominant_branches(m: &DMatrix<C64>, weight_tol: f64) -> Vec<(f64, DVector<C64>)> {
    let (values, vectors) = hermitian_eigen(m);
    let mut out: Vec<(f64, DVector<C64>)> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > weight_tol)
        .map(|(i, &v)| (v, vectors.column(i).into_owned()))
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}
