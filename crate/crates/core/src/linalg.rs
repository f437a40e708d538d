//! Dense linear-algebra helpers shared by the solvers.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest |A + A^T| entry.
pub fn antisymmetry_residual(a: MatRef<'_, f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] + a[(j, i)]).abs());
        }
    }
    worst
}

/// Pfaffian of a real antisymmetric matrix by Householder tridiagonalization.
///
/// Each reflection P = I - 2vv^T acts on the trailing block and contributes
/// det P = -1; the tridiagonal remainder's Pfaffian is the product of its
/// (2k, 2k+1) entries.
pub fn pfaffian(a: MatRef<'_, f64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Precondition(format!(
            "pfaffian of a {}x{} matrix",
            n,
            a.ncols()
        )));
    }
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(a[(i, j)].abs()));
    let residual = antisymmetry_residual(a);
    if residual > 1e-10 * scale.max(1.0) {
        return Err(Error::NotAntisymmetric { residual });
    }
    if n == 0 {
        return Ok(1.0);
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }

    // Row-major working copy.
    let mut m: Vec<f64> = (0..n * n).map(|idx| a[(idx / n, idx % n)]).collect();
    let mut pf = 1.0f64;
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    let mut k = 0;
    while k + 1 < n {
        let s = k + 1;
        let len = n - s;
        // Column k below the diagonal, read from row k (m[k][i] = -m[i][k]).
        let x0 = -m[k * n + s];
        let tail: f64 = (s + 1..n).map(|i| m[k * n + i] * m[k * n + i]).sum();
        let alpha;
        if tail == 0.0 {
            alpha = x0;
        } else {
            let norm = (x0 * x0 + tail).sqrt();
            alpha = if x0 > 0.0 { -norm } else { norm };
            v[0] = x0 - alpha;
            for i in 1..len {
                v[i] = -m[k * n + s + i];
            }
            let vnorm = v[..len].iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut v[..len] {
                *x /= vnorm;
            }
            // Trailing block B <- B + v w^T - w v^T with w = 2 B v.
            for i in 0..len {
                let row = &m[(s + i) * n + s..(s + i) * n + n];
                w[i] = 2.0 * row.iter().zip(&v[..len]).map(|(b, x)| b * x).sum::<f64>();
            }
            for i in 0..len {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut m[(s + i) * n + s..(s + i) * n + n];
                for (j, b) in row.iter_mut().enumerate() {
                    *b += vi * w[j] - wi * v[j];
                }
            }
            pf = -pf;
        }
        // Tridiagonal entry (k, k+1) is -alpha.
        pf *= -alpha;
        if pf == 0.0 {
            return Ok(0.0);
        }
        // Eliminated entries of row/column k are never read again.
        k += 2;
    }
    Ok(pf)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigh(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let values: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, eig.U().to_owned()))
}

pub fn hermitian_eigvals(m: &Mat<C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

pub fn symmetric_eigh(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let values: Vec<f64> = eig.S().column_vector().iter().copied().collect();
    Ok((values, eig.U().to_owned()))
}

/// Eigen-decomposition of `i A` for real antisymmetric `A`. Eigenvalues come
/// in +/- pairs; returned ascending.
pub fn antisymmetric_eigh(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let n = a.nrows();
    let h = Mat::<C64>::from_fn(n, n, |i, j| C64::new(0.0, a[(i, j)]));
    hermitian_eigh(&h)
}

/// Minimizes a unimodal `f` on `[a, b]`; returns `(x, f(x))`.
pub fn golden_section(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
