//! Dense square complex matrices and the gate constructors used by the
//! purification circuits.
//!
//! Convention used everywhere in this crate: the leftmost tensor factor is
//! qubit 0 and maps to the most significant bit of a basis index.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Hard cap on register width; every scenario in this crate fits in 11 qubits.
pub const MAX_QUBITS: usize = 12;

/// A dense square matrix with complex entries, stored row-major.
#[derive(Debug, Clone)]
pub struct ComplexMatrix<T: Scalar> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Builds a matrix from real-valued rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Complex::new(lit(v), T::zero()));
            }
        }
        m
    }

    /// Builds a matrix from complex entries given as (re, im) pairs.
    pub fn from_complex_rows(rows: &[&[(f64, f64)]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "rows must form a square matrix");
            for (j, &(re, im)) in row.iter().enumerate() {
                m.set(i, j, Complex::new(lit(re), lit(im)));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add_assign_entry(&mut self, row: usize, col: usize, value: Complex<T>) {
        self.data[row * self.dim + col] = self.data[row * self.dim + col] + value;
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..dim {
                    out.add_assign_entry(i, j, a * rhs.get(k, j));
                }
            }
        }
        out
    }

    /// Entry-wise sum.
    pub fn plus(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "addition dimension mismatch");
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o = *o + *r;
        }
        out
    }

    /// Entry-wise difference.
    pub fn minus(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "subtraction dimension mismatch");
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o = *o - *r;
        }
        out
    }

    /// Scales every entry by a real factor.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = Complex::new(v.re * factor, v.im * factor);
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            t = t + self.get(i, i);
        }
        t
    }

    /// `tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex<T> {
        assert_eq!(self.dim, rhs.dim, "trace_product dimension mismatch");
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            for j in 0..self.dim {
                t = t + self.get(i, j) * rhs.get(j, i);
            }
        }
        t
    }

    /// Kronecker product; `self` is the more significant factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        let mut out = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for k in 0..rhs.dim {
                    for l in 0..rhs.dim {
                        out.set(i * rhs.dim + k, j * rhs.dim + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs_entry(&self) -> T {
        self.data
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    /// Largest entry-wise distance to another matrix.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!(self.dim, rhs.dim, "comparison dimension mismatch");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }

    /// Entry-wise equality within an absolute tolerance.
    pub fn approx_eq(&self, rhs: &Self, tol: T) -> bool {
        self.dim == rhs.dim && self.max_abs_diff(rhs) <= tol
    }

    /// Largest deviation from `A = A†`.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Largest entry of `U†U - I`.
    pub fn unitarity_deviation(&self) -> T {
        self.dagger()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        if self.dim.is_power_of_two() {
            Some(self.dim.trailing_zeros() as usize)
        } else {
            None
        }
    }
}

#[inline]
fn bit_of(index: usize, qubit: usize, n_qubits: usize) -> usize {
    (index >> (n_qubits - 1 - qubit)) & 1
}

#[inline]
fn bit_mask(qubit: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

impl<T: Scalar> ComplexMatrix<T> {
    fn require_qubits(&self, qubits: &[usize]) -> Result<usize> {
        let n = self.n_qubits().ok_or_else(|| {
            Error::DimensionMismatch(format!("dimension {} is not a power of two", self.dim))
        })?;
        for &q in qubits {
            if q >= n {
                return Err(Error::InvalidQubitIndex {
                    index: q,
                    n_qubits: n,
                });
            }
        }
        Ok(n)
    }

    /// Partial trace over all qubits not listed in `keep`. The output qubit
    /// order follows the order of `keep`, allowing reorderings.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.require_qubits(keep)?;
        let mut seen = vec![false; n];
        for &q in keep {
            if seen[q] {
                return Err(Error::InvalidParameter(format!(
                    "duplicate qubit index {q} in keep list"
                )));
            }
            seen[q] = true;
        }
        let traced_mask = (0..n)
            .filter(|q| !seen[*q])
            .fold(0usize, |m, q| m | bit_mask(q, n));
        let out_dim = 1 << keep.len();
        let mut out = Self::zeros(out_dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (i & traced_mask) != (j & traced_mask) {
                    continue;
                }
                let v = self.get(i, j);
                if v.norm_sqr() == T::zero() {
                    continue;
                }
                let mut ik = 0usize;
                let mut jk = 0usize;
                for &q in keep {
                    ik = (ik << 1) | bit_of(i, q, n);
                    jk = (jk << 1) | bit_of(j, q, n);
                }
                out.add_assign_entry(ik, jk, v);
            }
        }
        Ok(out)
    }

    /// Conjugation `U M U†` by a two-qubit gate `u4` embedded at positions
    /// (`a`, `b`), with `a` the more significant factor of `u4`. Costs
    /// O(4^n) rather than a full-dimension matrix product.
    pub fn conjugate_two_qubit(&self, u4: &Self, a: usize, b: usize) -> Result<Self> {
        assert_eq!(u4.dim, 4, "embedded gate must be 4x4");
        let n = self.require_qubits(&[a, b])?;
        if a == b {
            return Err(Error::InvalidParameter(
                "two-qubit gate needs distinct qubits".into(),
            ));
        }
        let ma = bit_mask(a, n);
        let mb = bit_mask(b, n);
        let dim = self.dim;

        // left multiply: tmp = U · self
        let mut tmp = Self::zeros(dim);
        for i in 0..dim {
            let col4 = (bit_of(i, a, n) << 1) | bit_of(i, b, n);
            let base = i & !ma & !mb;
            for ra in 0..2 {
                for rb in 0..2 {
                    let amp = u4.get((ra << 1) | rb, col4);
                    if amp.norm_sqr() == T::zero() {
                        continue;
                    }
                    let i2 = base | if ra == 1 { ma } else { 0 } | if rb == 1 { mb } else { 0 };
                    for j in 0..dim {
                        let v = self.get(i, j);
                        if v.norm_sqr() != T::zero() {
                            tmp.add_assign_entry(i2, j, amp * v);
                        }
                    }
                }
            }
        }

        // right multiply: out = tmp · U†
        let mut out = Self::zeros(dim);
        for j in 0..dim {
            let col4 = (bit_of(j, a, n) << 1) | bit_of(j, b, n);
            let base = j & !ma & !mb;
            for ra in 0..2 {
                for rb in 0..2 {
                    let amp = u4.get((ra << 1) | rb, col4).conj();
                    if amp.norm_sqr() == T::zero() {
                        continue;
                    }
                    let j2 = base | if ra == 1 { ma } else { 0 } | if rb == 1 { mb } else { 0 };
                    for i in 0..dim {
                        let v = tmp.get(i, j);
                        if v.norm_sqr() != T::zero() {
                            out.add_assign_entry(i, j2, v * amp);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Embeds a two-qubit operator at positions (`a`, `b`) of an `n`-qubit
    /// register, acting as identity elsewhere.
    pub fn embed_two_qubit_op(op4: &Self, n_qubits: usize, a: usize, b: usize) -> Result<Self> {
        assert_eq!(op4.dim, 4, "embedded operator must be 4x4");
        if a == b || a >= n_qubits || b >= n_qubits {
            return Err(Error::InvalidQubitIndex {
                index: a.max(b),
                n_qubits,
            });
        }
        let dim = 1 << n_qubits;
        let rest_mask = !(bit_mask(a, n_qubits) | bit_mask(b, n_qubits)) & (dim - 1);
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            let r4 = (bit_of(i, a, n_qubits) << 1) | bit_of(i, b, n_qubits);
            for j in 0..dim {
                if (i & rest_mask) != (j & rest_mask) {
                    continue;
                }
                let c4 = (bit_of(j, a, n_qubits) << 1) | bit_of(j, b, n_qubits);
                out.set(i, j, op4.get(r4, c4));
            }
        }
        Ok(out)
    }

    /// Replaces qubits (`a`, `b`) of a reduced operator with the maximally
    /// mixed pair: output = `reduced ⊗ I/2 ⊗ I/2` with the mixed factors at
    /// positions `a` and `b`. `reduced` must act on the remaining qubits in
    /// ascending order.
    pub fn insert_mixed_pair(reduced: &Self, n_qubits: usize, a: usize, b: usize) -> Result<Self> {
        if a == b || a >= n_qubits || b >= n_qubits {
            return Err(Error::InvalidQubitIndex {
                index: a.max(b),
                n_qubits,
            });
        }
        let rest: Vec<usize> = (0..n_qubits).filter(|q| *q != a && *q != b).collect();
        assert_eq!(reduced.dim, 1 << rest.len(), "reduced operator dimension");
        let dim = 1 << n_qubits;
        let quarter = lit::<T>(0.25);
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                if bit_of(i, a, n_qubits) != bit_of(j, a, n_qubits)
                    || bit_of(i, b, n_qubits) != bit_of(j, b, n_qubits)
                {
                    continue;
                }
                let mut ik = 0usize;
                let mut jk = 0usize;
                for &q in &rest {
                    ik = (ik << 1) | bit_of(i, q, n_qubits);
                    jk = (jk << 1) | bit_of(j, q, n_qubits);
                }
                out.set(i, j, reduced.get(ik, jk).scale(quarter));
            }
        }
        Ok(out)
    }

    /// Right-multiplies by a diagonal single-qubit effect `diag(e0, e1)`
    /// embedded on `qubit`: column scaling, used for post-selection weights.
    pub fn weight_by_diagonal_effect(&self, qubit: usize, e0: T, e1: T) -> Result<Self> {
        let n = self.require_qubits(&[qubit])?;
        let mut out = self.clone();
        for j in 0..self.dim {
            let w = if bit_of(j, qubit, n) == 1 { e1 } else { e0 };
            for i in 0..self.dim {
                let v = out.get(i, j);
                out.set(i, j, Complex::new(v.re * w, v.im * w));
            }
        }
        Ok(out)
    }
}

/// Standard single- and two-qubit operators.
pub mod gates {
    use super::ComplexMatrix;
    use crate::scalar::Scalar;

    pub fn pauli_x<T: Scalar>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn pauli_z<T: Scalar>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn hadamard<T: Scalar>() -> ComplexMatrix<T> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]])
    }

    /// Projector |k⟩⟨k| on a single qubit.
    pub fn basis_projector<T: Scalar>(k: usize) -> ComplexMatrix<T> {
        assert!(k < 2);
        let mut m = ComplexMatrix::zeros(2);
        m.set(k, k, num_complex::Complex::new(T::one(), T::zero()));
        m
    }

    /// The standard CNOT with the first (more significant) qubit as control.
    pub fn cnot<T: Scalar>() -> ComplexMatrix<T> {
        collective_cnot(1)
    }

    /// Controlled flip of all `n_targets` target qubits:
    /// |0⟩⟨0| ⊗ I^{⊗n} + |1⟩⟨1| ⊗ X^{⊗n}, control first.
    pub fn collective_cnot<T: Scalar>(n_targets: usize) -> ComplexMatrix<T> {
        assert!(n_targets >= 1, "collective CNOT needs at least one target");
        let n_qubits = n_targets + 1;
        assert!(n_qubits <= super::MAX_QUBITS, "register exceeds qubit cap");
        let dim = 1usize << n_qubits;
        let control = 1usize << n_targets;
        let flip = control - 1;
        let mut m = ComplexMatrix::zeros(dim);
        for col in 0..dim {
            let row = if col & control != 0 { col ^ flip } else { col };
            m.set(row, col, num_complex::Complex::new(T::one(), T::zero()));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn kron_of_identities() {
        let i2 = M::identity(2);
        assert!(i2.kron(&i2).approx_eq(&M::identity(4), 0.0));
    }

    #[test]
    fn kron_projector_with_x_is_controlled_block() {
        let block = basis_projector::<f64>(0).kron(&pauli_x());
        // upper-left block is X, rest zero
        let mut expected = M::zeros(4);
        expected.set(0, 1, num_complex::Complex::new(1.0, 0.0));
        expected.set(1, 0, num_complex::Complex::new(1.0, 0.0));
        assert!(block.approx_eq(&expected, 0.0));
    }

    #[test]
    fn kron_zz_parity_on_01() {
        let zz = pauli_z::<f64>().kron(&pauli_z());
        // |01⟩ is basis index 1
        assert_eq!(zz.get(1, 1).re, -1.0);
    }

    #[test]
    fn collective_cnot_matches_definition() {
        let v = collective_cnot::<f64>(1);
        let expected = M::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert!(v.approx_eq(&expected, 0.0));

        // V₃ |100⟩ = |111⟩
        let v3 = collective_cnot::<f64>(2);
        assert_eq!(v3.get(0b111, 0b100).re, 1.0);
    }

    #[test]
    fn collective_cnot_is_unitary_involution() {
        for n in 1..=4 {
            let v = collective_cnot::<f64>(n);
            assert!(v.unitarity_deviation() < 1e-10);
            let sq = v.matmul(&v);
            assert!(sq.approx_eq(&M::identity(v.dim()), 1e-12));
        }
    }

    #[test]
    fn collective_equals_pairwise_product() {
        for n in 1..=4usize {
            let collective = collective_cnot::<f64>(n);
            let dim = 1 << (n + 1);
            let mut product = M::identity(dim);
            for i in 1..=n {
                let embedded = M::embed_two_qubit_op(&cnot(), n + 1, 0, i).unwrap();
                product = embedded.matmul(&product);
            }
            assert!(collective.max_abs_diff(&product) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        // ρ ⊗ σ traced over the second factor gives ρ·tr(σ)
        let rho = M::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]);
        let sigma = M::from_real_rows(&[&[0.4, 0.0], &[0.0, 0.6]]);
        let joint = rho.kron(&sigma);
        let reduced = joint.partial_trace(&[0]).unwrap();
        assert!(reduced.approx_eq(&rho, 1e-14));
        let reduced2 = joint.partial_trace(&[1]).unwrap();
        assert!(reduced2.approx_eq(&sigma, 1e-14));
    }

    #[test]
    fn partial_trace_over_everything_is_trace() {
        let rho = M::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]);
        let all = rho.partial_trace(&[]).unwrap();
        assert_eq!(all.dim(), 1);
        assert!((all.get(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_duplicates() {
        let rho = M::identity(4).scaled(0.25);
        assert!(rho.partial_trace(&[0, 0]).is_err());
        assert!(rho.partial_trace(&[2]).is_err());
    }

    #[test]
    fn conjugate_two_qubit_matches_full_embedding() {
        let rho = {
            // arbitrary Hermitian 3-qubit operator
            let mut m = M::zeros(8);
            for i in 0..8 {
                for j in 0..8 {
                    let re = ((i * 7 + j * 3) % 11) as f64 / 11.0;
                    let im = if i == j {
                        0.0
                    } else {
                        ((i + 2 * j) % 5) as f64 / 7.0
                    };
                    m.set(
                        i,
                        j,
                        num_complex::Complex::new(re, if i < j { im } else { -im }),
                    );
                }
            }
            m.plus(&m.dagger()).scaled(0.5)
        };
        for (a, b) in [(0usize, 2usize), (2, 0), (1, 2)] {
            let fast = rho.conjugate_two_qubit(&cnot(), a, b).unwrap();
            let full = M::embed_two_qubit_op(&cnot(), 3, a, b).unwrap();
            let slow = full.matmul(&rho).matmul(&full.dagger());
            assert!(fast.approx_eq(&slow, 1e-13));
        }
    }

    #[test]
    fn weight_by_diagonal_effect_scales_columns() {
        let rho = M::identity(4).scaled(0.25);
        let weighted = rho.weight_by_diagonal_effect(1, 0.9, 0.1).unwrap();
        assert!((weighted.get(0, 0).re - 0.225).abs() < 1e-15);
        assert!((weighted.get(1, 1).re - 0.025).abs() < 1e-15);
    }
}
