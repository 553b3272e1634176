//! Dense complex linear algebra at desk scale.
//!
//! The dimensions in this crate stay in the tens-to-hundreds, so the
//! Hermitian eigenproblem is solved with a cyclic Jacobi iteration: it is
//! deterministic, accurate to machine precision for these sizes, and keeps
//! the crate free of native BLAS/LAPACK linkage.

use ndarray::Array2;
use rand::Rng;

use crate::{error::CoreError, C64};

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Hermitian part (A + A†)/2.
pub fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let ad = dagger(a);
    (a + &ad).mapv(|z| z * 0.5)
}

/// Largest entrywise modulus.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Frobenius norm.
pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// max |A − A†|, the Hermiticity defect.
pub fn herm_defect(a: &Array2<C64>) -> f64 {
    let ad = dagger(a);
    max_abs(&(a - &ad))
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

/// Kronecker product, first factor slowest.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Trace out the last factor of a bipartite matrix on C^{d_sys} ⊗ C^{d_anc}.
pub fn partial_trace_last(rho: &Array2<C64>, d_sys: usize, d_anc: usize) -> Array2<C64> {
    debug_assert_eq!(rho.nrows(), d_sys * d_anc);
    let mut out = Array2::zeros((d_sys, d_sys));
    for i in 0..d_sys {
        for j in 0..d_sys {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..d_anc {
                acc += rho[[i * d_anc + m, j * d_anc + m]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns, so that A = V diag(λ) V†. The input must be Hermitian; only the
/// Hermitian part of round-off asymmetries is seen by the iteration.
pub fn eigh(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>), CoreError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(CoreError::Numerical(format!(
            "eigh needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let mut m = a.clone();
    let mut v: Array2<C64> = Array2::eye(n);
    if n <= 1 {
        let vals = (0..n).map(|i| m[[i, i]].re).collect();
        return Ok((vals, v));
    }

    let scale = frobenius(&m).max(1.0);
    let tol = 1e-15 * scale;
    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let off = off_diagonal_norm(&m);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let mag = apq.norm();
                if mag <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / mag;
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // u = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] acting on columns (p, q)
                let u_pq = C64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;
                let cc = C64::new(c, 0.0);
                for i in 0..n {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = cc * mip + u_qp * miq;
                    m[[i, q]] = u_pq * mip + u_qq * miq;
                }
                for j in 0..n {
                    let mpj = m[[p, j]];
                    let mqj = m[[q, j]];
                    m[[p, j]] = cc.conj() * mpj + u_qp.conj() * mqj;
                    m[[q, j]] = u_pq.conj() * mpj + u_qq.conj() * mqj;
                }
                m[[p, q]] = C64::new(0.0, 0.0);
                m[[q, p]] = C64::new(0.0, 0.0);
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = cc * vip + u_qp * viq;
                    v[[i, q]] = u_pq * vip + u_qq * viq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > tol * 10.0 {
        return Err(CoreError::Numerical(
            "Jacobi eigensolver failed to converge".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].re.partial_cmp(&m[[j, j]].re).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[[i, i]].re).collect();
    let mut vecs = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vecs[[i, new_col]] = v[[i, old_col]];
        }
    }
    Ok((vals, vecs))
}

fn off_diagonal_norm(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[[i, j]].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &Array2<C64>) -> Result<Vec<f64>, CoreError> {
    eigh(a).map(|(vals, _)| vals)
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigval_hermitized(a: &Array2<C64>) -> Result<f64, CoreError> {
    let vals = eigvalsh(&hermitize(a))?;
    Ok(vals.first().copied().unwrap_or(0.0))
}

/// Trace distance ½‖ρ₁ − ρ₂‖₁ between two Hermitian matrices.
pub fn trace_distance(a: &Array2<C64>, b: &Array2<C64>) -> Result<f64, CoreError> {
    let diff = hermitize(&(a - b));
    let vals = eigvalsh(&diff)?;
    Ok(0.5 * vals.iter().map(|x| x.abs()).sum::<f64>())
}

/// exp(i·scale·H) for Hermitian H, via eigendecomposition.
pub fn unitary_exp_i(h: &Array2<C64>, scale: f64) -> Result<Array2<C64>, CoreError> {
    let (vals, vecs) = eigh(h)?;
    let n = h.nrows();
    let mut scaled = vecs.clone();
    for (j, lam) in vals.iter().enumerate() {
        let ph = C64::new(0.0, scale * lam).exp();
        for i in 0..n {
            scaled[[i, j]] *= ph;
        }
    }
    Ok(scaled.dot(&dagger(&vecs)))
}

/// Random matrix with entries uniform in the unit square of the complex plane.
pub fn random_complex<R: Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random Hermitian matrix, entries O(1).
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    hermitize(&random_complex(n, rng))
}

/// Random full-rank density matrix G G† / tr(G G†).
pub fn random_density<R: Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    let g = random_complex(n, rng);
    let gg = g.dot(&dagger(&g));
    let tr: C64 = gg.diag().sum();
    gg.mapv(|z| z / tr.re)
}
