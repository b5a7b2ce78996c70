//! Dense cyclic Jacobi eigensolver, used only as an oracle for the
//! tridiagonal path. It shares no code with the bisection solver.

use super::{fix_sign, residual_norm, EigenPair, Spectrum};
use crate::error::{Error, Result};
use crate::model::TridiagonalOperator;

pub const ORACLE_MAX_DIM: usize = 1000;
const MAX_SWEEPS: usize = 30;
const OFF_TOL: f64 = 1e-13;

/// Full spectrum (ascending, with eigenvectors) by cyclic Jacobi rotations.
pub fn dense_oracle_spectrum(op: &TridiagonalOperator) -> Result<Spectrum> {
    let n = op.dim();
    if n > ORACLE_MAX_DIM {
        return Err(Error::OracleSize { n, limit: ORACLE_MAX_DIM });
    }
    let mut a = op.to_dense();
    let (values, v) = cyclic_jacobi(&mut a, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let pairs = order
        .into_iter()
        .enumerate()
        .map(|(index, col)| {
            let mut vector: Vec<f64> = (0..n).map(|row| v[row * n + col]).collect();
            fix_sign(&mut vector);
            let residual = residual_norm(op, &vector, values[col]);
            EigenPair {
                index,
                value: values[col],
                bracket: None,
                vector: Some(vector),
                residual: Some(residual),
            }
        })
        .collect();
    Ok(Spectrum::new(pairs))
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += a[p * n + q] * a[p * n + q];
        }
    }
    (2.0 * s).sqrt()
}

/// Diagonalizes the row-major symmetric matrix `a` in place. Returns the
/// eigenvalues and the row-major matrix whose columns are eigenvectors.
fn cyclic_jacobi(a: &mut [f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_TOL * frob;

    let mut off = off_norm(a, n);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::OracleConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // rotation angle zeroing a[p][q]; t = tan θ, smaller root
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + theta.mul_add(theta, 1.0).sqrt())
                } else {
                    apq / (aqq - app)
                };
                let c = 1.0 / t.mul_add(t, 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        off = off_norm(a, n);
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, v))
}
