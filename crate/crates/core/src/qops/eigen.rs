//! Hermitian eigenvalues via cyclic Jacobi rotations.
//!
//! Only eigenvalues are ever needed here (positivity floors and trace
//! distances), so eigenvectors are not accumulated.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qops::matrix::ComplexMatrix;
use crate::scalar::{check_tol, lit, Scalar};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues<T: Scalar>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let dev = m.hermiticity_deviation();
    if dev > check_tol::<T>() {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    let dim = m.dim();
    if dim == 1 {
        return Ok(vec![m.get(0, 0).re]);
    }

    // Work on the exactly-Hermitian part so tiny input asymmetries cannot
    // produce complex rotations with spurious imaginary leftovers.
    let mut a = m.plus(&m.dagger()).scaled(lit(0.5));

    let scale = {
        let s = a.max_abs_entry();
        if s > T::one() {
            s
        } else {
            T::one()
        }
    };
    let stop = T::epsilon() * scale * T::from_usize(dim).unwrap();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..dim {
            for q in (p + 1)..dim {
                let n = a.get(p, q).norm();
                if n > off {
                    off = n;
                }
            }
        }
        if off <= stop {
            let mut eigs: Vec<T> = (0..dim).map(|i| a.get(i, i).re).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
            return Ok(eigs);
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                rotate(&mut a, p, q, stop);
            }
        }
    }
    Err(Error::EigenNoConvergence)
}

/// One complex Jacobi rotation zeroing the (p, q) entry.
fn rotate<T: Scalar>(a: &mut ComplexMatrix<T>, p: usize, q: usize, skip_below: T) {
    let z = a.get(p, q);
    let zn = z.norm();
    if zn <= skip_below {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    // Phase factor e^{iφ} of the off-diagonal entry, then a real rotation on
    // the phase-stripped 2x2 block.
    let phase = Complex::new(z.re / zn, z.im / zn);
    let tau = (aqq - app) / (zn + zn);
    let t = {
        let root = (tau * tau + T::one()).sqrt();
        if tau >= T::zero() {
            T::one() / (tau + root)
        } else {
            -T::one() / (-tau + root)
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    // Unitary J with block [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]; apply A ← J†AJ.
    let dim = a.dim();
    let phase_conj = phase.conj();
    for k in 0..dim {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk.scale(c) - (phase * aqk).scale(s));
        a.set(q, k, apk.scale(s) + (phase * aqk).scale(c));
    }
    for k in 0..dim {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp.scale(c) - (phase_conj * akq).scale(s));
        a.set(k, q, akp.scale(s) + (phase_conj * akq).scale(c));
    }
    // Clean the rotated pair exactly.
    a.set(p, q, Complex::new(T::zero(), T::zero()));
    a.set(q, p, Complex::new(T::zero(), T::zero()));
    let new_pp = a.get(p, p);
    let new_qq = a.get(q, q);
    a.set(p, p, Complex::new(new_pp.re, T::zero()));
    a.set(q, q, Complex::new(new_qq.re, T::zero()));
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Scalar>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Trace distance T(A, B) = ½‖A − B‖₁ for Hermitian operators.
pub fn trace_distance<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let eigs = hermitian_eigenvalues(&a.minus(b))?;
    Ok(eigs.into_iter().map(|l| l.abs()).sum::<T>() * lit(0.5))
}
