//! Restarted GMRES for dense complex systems.

use num_complex::Complex64;

use crate::error::{QdsmError, Result};

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    /// Target relative residual ‖b − Ax‖/‖b‖.
    pub tol: f64,
    pub restart: usize,
    pub max_iterations: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            restart: 60,
            max_iterations: 3000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// True relative residual of `x`, recomputed from `apply`.
    pub residual: f64,
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn true_residual(apply: &impl Fn(&[Complex64], &mut [Complex64]), b: &[Complex64], x: &[Complex64], r: &mut [Complex64]) -> f64 {
    apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm2(r)
}

/// Solves `A x = b` where `apply(v, out)` writes `A v` into `out`.
///
/// Restart cycles continue until the recomputed residual meets `tol` or the
/// iteration budget runs out, in which case a [`QdsmError::Solver`] carries
/// the last residual.
pub fn gmres(
    apply: impl Fn(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    options: GmresOptions,
) -> Result<GmresOutcome> {
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            x: vec![zero; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let m = options.restart.max(1).min(n.max(1));
    let mut x = vec![zero; n];
    let mut r = b.to_vec();
    let mut beta = bnorm;
    let mut iterations = 0;
    let mut w = vec![zero; n];

    loop {
        if beta / bnorm <= options.tol {
            return Ok(GmresOutcome {
                x,
                iterations,
                residual: beta / bnorm,
            });
        }
        if iterations >= options.max_iterations {
            return Err(QdsmError::Solver {
                iterations,
                residual: beta / bnorm,
            });
        }

        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut h = vec![vec![zero; m]; m + 1];
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![zero; m];
        let mut g = vec![zero; m + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut steps = 0;

        for j in 0..m {
            apply(&basis[j], &mut w);
            for (i, v) in basis.iter().enumerate() {
                let hij = inner(v, &w);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let hnext = norm2(&w);
            h[j + 1][j] = Complex64::new(hnext, 0.0);

            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i].conj() * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let (a, bb) = (h[j][j], h[j + 1][j]);
            let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = zero;
            } else if a.norm() == 0.0 {
                cs[j] = 0.0;
                sn[j] = bb.conj() / bb.norm();
            } else {
                cs[j] = a.norm() / denom;
                sn[j] = (a / a.norm()) * bb.conj() / denom;
            }
            h[j][j] = cs[j] * a + sn[j] * bb;
            h[j + 1][j] = zero;
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];

            steps = j + 1;
            iterations += 1;
            if g[j + 1].norm() / bnorm <= options.tol * 0.1 || hnext == 0.0 || iterations >= options.max_iterations {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }

        let mut y = vec![zero; steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for k in i + 1..steps {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[k]) {
                *xi += yk * vi;
            }
        }
        beta = true_residual(&apply, b, &x, &mut r);
    }
}
