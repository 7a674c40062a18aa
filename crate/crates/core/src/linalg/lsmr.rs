//! LSMR: Golub–Kahan bidiagonalization applied to the normal equations,
//! producing monotonically decreasing ‖Aᵀr‖. Started from zero it converges to
//! the minimal-norm least-squares solution.

use crate::error::{Error, Result};
use crate::linalg::vector::{axpy, norm2};
use crate::linalg::SparseMatrix;
use crate::Scalar;

#[derive(Debug, Clone)]
pub struct LsmrOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub normal_residual_history: Vec<f64>,
}

/// Stable Givens rotation `(c, s, r)` with `c a + s b = r`.
fn sym_ortho<T: Scalar>(a: T, b: T) -> (T, T, T) {
    if b == T::zero() {
        let c = if a == T::zero() { T::one() } else { a.signum() };
        return (c, T::zero(), a.abs());
    }
    if a == T::zero() {
        return (T::zero(), b.signum(), b.abs());
    }
    if b.abs() > a.abs() {
        let tau = a / b;
        let s = b.signum() / (T::one() + tau * tau).sqrt();
        (s * tau, s, b / s)
    } else {
        let tau = b / a;
        let c = a.signum() / (T::one() + tau * tau).sqrt();
        (c, c * tau, a / c)
    }
}

/// Solves `min ‖A x − b‖₂` with relative tolerance `tol` on both the
/// residual and the normal residual, stopping at `max_iter`.
pub fn lsmr<T: Scalar>(a: &SparseMatrix<T>, b: &[T], tol: T, max_iter: usize) -> Result<LsmrOutcome<T>> {
    let (m, n) = (a.n_rows(), a.n_cols());
    let mut x = vec![T::zero(); n];
    let mut history = Vec::new();

    let mut u = b.to_vec();
    let mut beta = norm2(&u);
    if beta > T::zero() {
        u.iter_mut().for_each(|v| *v = *v / beta);
    }
    let mut v = a.tr_mul_vec(&u);
    let mut alpha = norm2(&v);
    if alpha > T::zero() {
        v.iter_mut().for_each(|e| *e = *e / alpha);
    }
    if beta == T::zero() || alpha == T::zero() {
        return Ok(LsmrOutcome { x, iterations: 0, normal_residual_history: vec![0.0] });
    }

    let normb = beta;
    let mut zetabar = alpha * beta;
    let mut alphabar = alpha;
    let mut rho = T::one();
    let mut rhobar = T::one();
    let mut cbar = T::one();
    let mut sbar = T::zero();
    let mut h = v.clone();
    let mut hbar = vec![T::zero(); n];

    let mut betadd = beta;
    let mut betad = T::zero();
    let mut rhodold = T::one();
    let mut tautildeold = T::zero();
    let mut thetatilde = T::zero();
    let mut zeta = T::zero();
    let mut d = T::zero();
    let mut norm_a2 = alpha * alpha;

    let mut av = vec![T::zero(); m];
    let mut atu = vec![T::zero(); n];
    let ctol = T::zero();
    let eps = T::epsilon();

    for it in 1..=max_iter {
        a.mul_vec_into(&v, &mut av);
        for (ui, &avi) in u.iter_mut().zip(&av) {
            *ui = avi - alpha * *ui;
        }
        beta = norm2(&u);
        if beta > T::zero() {
            u.iter_mut().for_each(|e| *e = *e / beta);
            a.tr_mul_vec_into(&u, &mut atu);
            for (vi, &ai) in v.iter_mut().zip(&atu) {
                *vi = ai - beta * *vi;
            }
            alpha = norm2(&v);
            if alpha > T::zero() {
                v.iter_mut().for_each(|e| *e = *e / alpha);
            }
        }

        // undamped problem: the first rotation is the identity
        let (chat, shat, alphahat) = (T::one(), T::zero(), alphabar);

        let rhoold = rho;
        let (c, s, rho_new) = sym_ortho(alphahat, beta);
        rho = rho_new;
        let thetanew = s * alpha;
        alphabar = c * alpha;

        let rhobarold = rhobar;
        let zetaold = zeta;
        let thetabar = sbar * rho;
        let rhotemp = cbar * rho;
        let (cb, sb, rb) = sym_ortho(rhotemp, thetanew);
        cbar = cb;
        sbar = sb;
        rhobar = rb;
        zeta = cbar * zetabar;
        zetabar = -sbar * zetabar;

        let f = thetabar * rho / (rhoold * rhobarold);
        for (hb, &hi) in hbar.iter_mut().zip(&h) {
            *hb = hi - f * *hb;
        }
        axpy(zeta / (rho * rhobar), &hbar, &mut x);
        let g = thetanew / rho;
        for (hi, &vi) in h.iter_mut().zip(&v) {
            *hi = vi - g * *hi;
        }

        // residual norm estimate
        let betaacute = chat * betadd;
        let betacheck = -shat * betadd;
        let betahat = c * betaacute;
        betadd = -s * betaacute;
        let thetatildeold = thetatilde;
        let (ctildeold, stildeold, rhotildeold) = sym_ortho(rhodold, thetabar);
        thetatilde = stildeold * rhobar;
        rhodold = ctildeold * rhobar;
        betad = -stildeold * betad + ctildeold * betahat;
        tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold;
        let taud = (zeta - thetatilde * tautildeold) / rhodold;
        d = d + betacheck * betacheck;
        let normr = (d + (betad - taud) * (betad - taud) + betadd * betadd).sqrt();

        norm_a2 = norm_a2 + beta * beta;
        let norm_a = norm_a2.sqrt();
        norm_a2 = norm_a2 + alpha * alpha;

        let normar = zetabar.abs();
        let normx = norm2(&x);
        history.push(normar.as_f64());

        let test1 = normr / normb;
        let test2 = if normr > T::zero() { normar / (norm_a * normr) } else { T::zero() };
        let test3 = T::one() / (norm_a * T::one().max(normx)) * ctol;
        let t1 = test1 / (T::one() + norm_a * normx / normb);
        let rtol = tol + tol * norm_a * normx / normb;

        let converged = test1 <= rtol
            || test2 <= tol
            || T::one() + t1 <= T::one()
            || T::one() + test2 <= T::one()
            || (ctol > T::zero() && T::one() + test3 <= T::one())
            || normar <= eps * norm_a * norm_a * normx.max(eps);
        if converged || beta == T::zero() || alpha == T::zero() {
            return Ok(LsmrOutcome { x, iterations: it, normal_residual_history: history });
        }
    }
    Err(Error::LeastSquares { iterations: max_iter, residual_history: history })
}
