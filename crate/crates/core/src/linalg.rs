//! Small dense-structured solvers: tridiagonal (Thomas), banded LU without
//! pivoting for diagonally dominant Jacobians, and Jacobi-preconditioned CG
//! for matrix-free SPD operators.

use crate::error::{Error, Result};

/// Solves a tridiagonal system. `lower[0]` and `upper[n-1]` are ignored.
pub fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::LinearSolve("zero pivot in tridiagonal solve".into()));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for k in 1..n {
        denom = diag[k] - lower[k] * c[k - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::LinearSolve(format!("zero pivot at row {k}")));
        }
        c[k] = if k + 1 < n { upper[k] / denom } else { 0.0 };
        d[k] = (rhs[k] - lower[k] * d[k - 1]) / denom;
    }
    let mut x = d;
    for k in (0..n - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Ok(x)
}

/// Square banded matrix with equal lower and upper bandwidth.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    // Row-major band storage: entry (r, c) at r * width + (c + bw - r).
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedMatrix {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, r: usize, c: usize) -> usize {
        debug_assert!(r.abs_diff(c) <= self.bw, "entry ({r},{c}) outside band {}", self.bw);
        r * (2 * self.bw + 1) + (c + self.bw - r)
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        let s = self.slot(r, c);
        self.data[s] += v;
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r.abs_diff(c) > self.bw {
            0.0
        } else {
            self.data[self.slot(r, c)]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.bw);
                let hi = (r + self.bw).min(self.n - 1);
                (lo..=hi).map(|c| self.get(r, c) * x[c]).sum()
            })
            .collect()
    }

    /// In-place LU without pivoting, then solve. Intended for column
    /// diagonally dominant matrices.
    pub fn solve(mut self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let bw = self.bw;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::LinearSolve(format!("zero pivot at row {k} in banded LU")));
            }
            let hi = (k + bw).min(n - 1);
            for r in k + 1..=hi {
                let s = self.slot(r, k);
                let factor = self.data[s] / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.data[s] = factor;
                for c in k + 1..=hi {
                    let src = self.data[self.slot(k, c)];
                    let dst = self.slot(r, c);
                    self.data[dst] -= factor * src;
                }
                x[r] -= factor * x[k];
            }
        }
        for k in (0..n).rev() {
            let hi = (k + bw).min(n - 1);
            let acc = (k + 1..=hi).fold(x[k], |acc, c| acc - self.data[self.slot(k, c)] * x[c]);
            x[k] = acc / self.data[self.slot(k, k)];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("non-finite solution in banded LU".into()));
        }
        Ok(x)
    }
}

/// Outcome of a CG solve.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for `A x = b`, `A` SPD (or
/// SPSD with `b` in its range). Stops when `‖r‖₂ ≤ tol · ‖b‖₂` or
/// `‖r‖₂ ≤ abs_tol`.
pub fn pcg<F>(apply: F, diag: &[f64], b: &[f64], x0: Vec<f64>, tol: f64, abs_tol: f64, max_iter: usize) -> Result<CgSolution>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut x = x0;
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let bnorm = norm2(b);
    let target = (tol * bnorm).max(abs_tol);
    let mut rnorm = norm2(&r);
    if rnorm <= target {
        return Ok(CgSolution {
            x,
            iterations: 0,
            residual: rnorm,
        });
    }
    let precond = |v: &[f64], out: &mut [f64]| {
        for k in 0..n {
            out[k] = if diag[k] != 0.0 { v[k] / diag[k] } else { v[k] };
        }
    };
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            if rnorm <= target.max(1e-300) {
                break;
            }
            return Err(Error::LinearSolve(format!("CG breakdown (pAp = {pap:e}) at iteration {it}")));
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        rnorm = norm2(&r);
        if rnorm <= target {
            return Ok(CgSolution {
                x,
                iterations: it,
                residual: rnorm,
            });
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    if rnorm <= target {
        return Ok(CgSolution {
            x,
            iterations: max_iter,
            residual: rnorm,
        });
    }
    Err(Error::LinearSolve(format!(
        "CG did not converge in {max_iter} iterations (residual {rnorm:e}, target {target:e})"
    )))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
