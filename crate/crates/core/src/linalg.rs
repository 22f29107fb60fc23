//! Dense complex matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Complex product through four real products, which take the optimized
/// real kernel.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "dimension mismatch in product");
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    CMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    })
}

/// `a * s` for a sparse `s`, in `O(rows * nnz)`.
pub fn mul_sparse(a: &CMatrix, s: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), s.nrows(), "dimension mismatch in product");
    let mut out = CMatrix::zeros(a.nrows(), s.ncols());
    for j in 0..s.ncols() {
        for l in 0..s.nrows() {
            let v = s[(l, j)];
            if v != Complex64::new(0.0, 0.0) {
                out.column_mut(j)
                    .axpy(v, &a.column(l), Complex64::new(1.0, 0.0));
            }
        }
    }
    out
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(a, b) - mul(b, a)
}

/// Induced 1-norm (max column sum).
pub fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry modulus over the leading `window x window` block.
pub fn max_abs_window(a: &CMatrix, window: usize) -> f64 {
    let w = window.min(a.nrows()).min(a.ncols());
    let mut m = 0.0f64;
    for j in 0..w {
        for i in 0..w {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Largest off-diagonal modulus over the leading `window x window` block.
pub fn max_offdiag_window(a: &CMatrix, window: usize) -> f64 {
    let w = window.min(a.nrows()).min(a.ncols());
    let mut m = 0.0f64;
    for j in 0..w {
        for i in 0..w {
            if i != j {
                m = m.max(a[(i, j)].norm());
            }
        }
    }
    m
}

/// `max |a - b|` over the leading block.
pub fn max_diff_window(a: &CMatrix, b: &CMatrix, window: usize) -> f64 {
    max_abs_window(&(a - b), window)
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// Taylor series is summed until the next term no longer changes the sum at
/// double precision, and the result is squared `s` times.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(0.5f64.powi(squarings as i32));

    let mut sum = identity(n);
    let mut term = identity(n);
    for j in 1..=40 {
        term = mul(&term, &scaled);
        term.unscale_mut(j as f64);
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&sum) * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Exponential of a sparse nilpotent matrix by its finite power series.
pub fn expm_nilpotent(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut sum = identity(n);
    let mut term = identity(n);
    for j in 1..=n {
        term = mul_sparse(&term, a);
        term.unscale_mut(j as f64);
        if term.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            break;
        }
        sum += &term;
    }
    sum
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn matvec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), v.len());
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum())
        .collect()
}
