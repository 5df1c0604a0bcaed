//! Eigenvalues of small Hermitian matrices.
//!
//! An `n × n` Hermitian `A + iB` is embedded as the real symmetric
//! `[[A, -B], [B, A]]`, whose spectrum is that of the original with every
//! eigenvalue doubled. The real matrix is diagonalised with cyclic Jacobi
//! rotations.

use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a real symmetric matrix (row-major, `n × n`), descending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Eigenvalues of an `n × n` Hermitian matrix (row-major), descending.
pub fn hermitian_eigenvalues(h: &[Complex64], n: usize) -> Vec<f64> {
    assert_eq!(h.len(), n * n);
    let m = 2 * n;
    let mut real = vec![0.0; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = h[r * n + c];
            real[r * m + c] = z.re;
            real[(r + n) * m + c + n] = z.re;
            real[r * m + c + n] = -z.im;
            real[(r + n) * m + c] = z.im;
        }
    }
    symmetric_eigenvalues(real, m)
        .into_iter()
        .step_by(2)
        .collect()
}
