//! Small dense symmetric-matrix helpers.
//!
//! The regressor dimension `p` is small in every use here (rarely above
//! ten), so matrices are flat row-major slices and factorizations are
//! written directly: a Cholesky factorization for the well-conditioned
//! positive-definite case, with a pivoted Gauss-Jordan fallback, plus a
//! Jacobi eigenvalue sweep for definiteness checks.

/// 1-norm (maximum absolute column sum) of a row-major `n x n` matrix.
pub fn norm1(a: &[f64], n: usize) -> f64 {
    let mut best = 0.0f64;
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            s += a[i * n + j].abs();
        }
        if s > best {
            best = s;
        }
    }
    best
}

/// In-place lower Cholesky factor of a symmetric matrix. Returns false if
/// a pivot is not strictly positive.
fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let ljj = d.sqrt();
        a[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / ljj;
        }
    }
    true
}

/// Inverse from a lower Cholesky factor: `A^{-1} = L^{-T} L^{-1}`.
fn invert_from_cholesky(l: &[f64], n: usize, inv: &mut [f64]) {
    // M = L^{-1}, lower triangular, built column by column.
    let mut m = vec![0.0f64; n * n];
    for j in 0..n {
        m[j * n + j] = 1.0 / l[j * n + j];
        for i in (j + 1)..n {
            let mut s = 0.0;
            for k in j..i {
                s += l[i * n + k] * m[k * n + j];
            }
            m[i * n + j] = -s / l[i * n + i];
        }
    }
    // inv = M' M (symmetric).
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for k in j.max(i)..n {
                s += m[k * n + i] * m[k * n + j];
            }
            inv[i * n + j] = s;
            inv[j * n + i] = s;
        }
    }
}

/// Gauss-Jordan inverse with partial pivoting. Returns false on an exactly
/// zero pivot; near-singular input is left to the caller's condition check.
fn gauss_jordan_invert(a: &mut [f64], n: usize, inv: &mut [f64]) -> bool {
    inv.fill(0.0);
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in (col + 1)..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let d = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f != 0.0 {
                for k in 0..n {
                    a[r * n + k] -= f * a[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    true
}

/// Invert the symmetric matrix `a` into `inv`, returning the 1-norm
/// condition estimate `‖A‖₁‖A⁻¹‖₁`. `work` must have length `n * n`.
/// Returns `None` when no factorization succeeds.
pub fn invert_sym_with_cond(
    a: &[f64],
    n: usize,
    inv: &mut [f64],
    work: &mut [f64],
) -> Option<f64> {
    debug_assert_eq!(a.len(), n * n);
    work.copy_from_slice(a);
    if cholesky_in_place(work, n) {
        invert_from_cholesky(work, n, inv);
    } else {
        work.copy_from_slice(a);
        if !gauss_jordan_invert(work, n, inv) {
            return None;
        }
    }
    let cond = norm1(a, n) * norm1(inv, n);
    if cond.is_finite() {
        Some(cond)
    } else {
        None
    }
}

/// `out = A x` for row-major `n x n` A.
pub fn mat_vec(a: &[f64], x: &[f64], n: usize, out: &mut [f64]) {
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += a[i * n + j] * x[j];
        }
        out[i] = s;
    }
}

/// `C = A B` for row-major `n x n` matrices.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    c
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
pub fn sym_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    // Inputs are symmetric only up to rounding; average the halves first.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    let scale = norm1(&m, n).max(1.0);
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j].abs();
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}
