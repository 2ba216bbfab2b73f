//! Small dense linear algebra: complex Hermitian eigensolver (cyclic Jacobi),
//! Kronecker products, and tiny real solves used by the fitting code.
//!
//! Matrices here are at most 256×256 (eight qubits), so an O(n³) Jacobi sweep
//! with guaranteed accuracy beats pulling in an external LAPACK binding.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix alias used throughout the crate.
pub type CMat = Array2<Complex64>;

pub fn identity(dim: usize) -> CMat {
    Array2::from_diag_elem(dim, Complex64::new(1.0, 0.0))
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    let n = a.nrows();
    if n != a.ncols() {
        return false;
    }
    for i in 0..n {
        for j in i..n {
            if (a[[i, j]] - a[[j, i]].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

fn off_diag_norm(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[[i, j]].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of a unitary matrix, i.e. `a · v_k = λ_k · v_k`.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidParameter(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if !is_hermitian(a, 1e-9 * (1.0 + frob_norm(a))) {
        return Err(Error::NotHermitian(
            "eigensolver input has a non-Hermitian part".into(),
        ));
    }
    let mut m = a.clone();
    let mut v = identity(n);
    let scale = frob_norm(&m).max(f64::MIN_POSITIVE);
    let target = 1e-14 * scale;
    let mut converged = false;
    for _sweep in 0..100 {
        if off_diag_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                let absb = apq.norm();
                // Rotating a negligible element is pure churn, and its
                // arg() is numerical junk that would smuggle an arbitrary
                // phase into the eigenvector columns.
                if absb <= 1e-18 * scale {
                    continue;
                }
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                // Phase out the off-diagonal element, then a real rotation.
                let phi = apq.arg();
                let tau = (aqq - app) / (2.0 * absb);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let eip = Complex64::from_polar(1.0, phi);
                let wpp = eip * c;
                let wpq = eip * s;
                let wqp = Complex64::new(-s, 0.0);
                let wqq = Complex64::new(c, 0.0);
                // m ← W† m W, v ← v W (W differs from identity only on p,q).
                for k in 0..n {
                    let rp = m[[p, k]];
                    let rq = m[[q, k]];
                    m[[p, k]] = wpp.conj() * rp + wqp.conj() * rq;
                    m[[q, k]] = wpq.conj() * rp + wqq.conj() * rq;
                }
                for k in 0..n {
                    let cp = m[[k, p]];
                    let cq = m[[k, q]];
                    m[[k, p]] = cp * wpp + cq * wqp;
                    m[[k, q]] = cp * wpq + cq * wqq;
                    let vp = v[[k, p]];
                    let vq = v[[k, q]];
                    v[[k, p]] = vp * wpp + vq * wqp;
                    v[[k, q]] = vp * wpq + vq * wqq;
                }
            }
        }
    }
    if !converged && off_diag_norm(&m) > target {
        return Err(Error::Numerical(
            "Jacobi eigensolver failed to converge".into(),
        ));
    }
    // Canonical per-column phase (largest entry real positive): makes the
    // output deterministic and keeps real-symmetric inputs on real vectors.
    for k in 0..n {
        let mut pivot = Complex64::default();
        for r in 0..n {
            if v[[r, k]].norm_sqr() > pivot.norm_sqr() {
                pivot = v[[r, k]];
            }
        }
        if pivot.norm() > 0.0 {
            let correction = (pivot / pivot.norm()).conj();
            for r in 0..n {
                v[[r, k]] *= correction;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| evals[i].total_cmp(&evals[j]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut sorted_vecs = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vecs[[r, col]] = v[[r, i]];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}

pub fn frob_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a real symmetric matrix (ascending eigenvalues).
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let c = a.mapv(|x| Complex64::new(x, 0.0));
    let (vals, vecs) = hermitian_eigen(&c)?;
    Ok((vals, vecs.mapv(|z| z.re)))
}

/// Solve `a x = b` for a small real system by Gaussian elimination with
/// partial pivoting.
pub fn solve_real(a: &Array2<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::InvalidParameter(format!(
            "solve needs square system, got {}x{} with rhs {}",
            n,
            a.ncols(),
            b.len()
        )));
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut aug = Array2::<f64>::zeros((n, n + 1));
    for i in 0..n {
        for j in 0..n {
            aug[[i, j]] = a[[i, j]];
        }
        aug[[i, n]] = b[i];
    }
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if aug[[r, col]].abs() > aug[[piv, col]].abs() {
                piv = r;
            }
        }
        if aug[[piv, col]].abs() < 1e-13 * scale {
            return Err(Error::Numerical(format!(
                "singular linear system (pivot {:.3e} at column {col})",
                aug[[piv, col]]
            )));
        }
        if piv != col {
            for j in 0..=n {
                aug.swap([col, j], [piv, j]);
            }
        }
        for r in (col + 1)..n {
            let f = aug[[r, col]] / aug[[col, col]];
            for j in col..=n {
                aug[[r, j]] -= f * aug[[col, j]];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = aug[[i, n]];
        for j in (i + 1)..n {
            s -= aug[[i, j]] * x[j];
        }
        x[i] = s / aug[[i, i]];
    }
    Ok(x)
}

/// Inverse of a small real matrix (used for fit covariances).
pub fn invert_real(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let mut out = Array2::<f64>::zeros((n, n));
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_real(a, &e)?;
        for r in 0..n {
            out[[r, col]] = x[r];
        }
    }
    Ok(out)
}
