//! Dense complex matrix algebra and tensor-factor bookkeeping.
//!
//! Everything in the crate runs on operators of dimension at most 128,
//! so the routines here favor determinism and clarity over asymptotic
//! speed: row-major `Vec<Complex64>` storage, explicit index loops for
//! the tensor reshuffles, and a cyclic Jacobi eigensolver for Hermitian
//! matrices.
//!
//! Partial transposition follows the convention that transposes the
//! ket/bra indices of party A jointly: on basis elements,
//! `|ij><kl|` maps to `|kj><il|` with `i`, `k` indexing party A.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result, TOL};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square matrix of complex entries, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from rows of `(re, im)` pairs; rows must be square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "expected {dim} entries per row for a {dim}x{dim} matrix"
            )));
        }
        Ok(ComplexMatrix {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.entries[r * self.dim + c] = v;
    }

    #[inline]
    pub fn add_assign_at(&mut self, r: usize, c: usize, v: C64) {
        self.entries[r * self.dim + c] += v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += a * other.entries[k * n + c];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |r, c| self.get(c, r).conj())
    }

    /// Conjugation `U M U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.mul(self).mul(&u.dagger())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Hilbert-Schmidt inner product `Tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation from Hermiticity, `max |M[r][c] - conj(M[c][r])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev <= tol {
            Ok(())
        } else {
            Err(Error::NotHermitian { max_dev: dev, tol })
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for r in 0..n {
            let mut acc = ZERO;
            for c in 0..n {
                acc += self.entries[r * n + c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Rank-one projector `|v><v|` of a (not necessarily normalized) vector.
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, |r, c| v[r] * v[c].conj())
    }
}

/// Kronecker product: `result[(i*db+k)][(j*db+l)] = a[i][j] * b[k][l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors.
pub fn vec_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Row-major strides for a multi-index over `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn checked_perm(perm: &[usize], len: usize) -> Result<()> {
    if perm.len() != len {
        return Err(Error::InvalidPermutation(format!(
            "permutation has length {}, expected {}",
            perm.len(),
            len
        )));
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "indices must be a permutation of 0..{len}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Reorders the tensor factors of a vector: factor `t` of the output is
/// factor `perm[t]` of the input.
pub fn permute_vec(amps: &[C64], dims: &[usize], perm: &[usize]) -> Result<Vec<C64>> {
    checked_perm(perm, dims.len())?;
    let total: usize = dims.iter().product();
    assert_eq!(amps.len(), total, "amplitude count mismatch");
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let mut out = vec![ZERO; total];
    for (new_idx, slot) in out.iter_mut().enumerate() {
        let mut old_idx = 0;
        let mut rem = new_idx;
        for t in 0..perm.len() {
            let digit = rem / new_strides[t];
            rem %= new_strides[t];
            old_idx += digit * old_strides[perm[t]];
        }
        *slot = amps[old_idx];
    }
    Ok(out)
}

/// Operator acting with explicit tensor-factor structure and a bipartition.
///
/// `factor_dims` lists the subsystem dimensions in order; the first
/// `cut` factors belong to party A, the rest to party B.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteOperator {
    pub matrix: ComplexMatrix,
    pub factor_dims: Vec<usize>,
    pub cut: usize,
}

impl BipartiteOperator {
    pub fn new(matrix: ComplexMatrix, factor_dims: Vec<usize>, cut: usize) -> Result<Self> {
        let prod: usize = factor_dims.iter().product();
        if prod != matrix.dim() {
            return Err(Error::Dimension(format!(
                "factor dims {:?} have product {}, but matrix dimension is {}",
                factor_dims,
                prod,
                matrix.dim()
            )));
        }
        if cut == 0 || cut >= factor_dims.len() {
            return Err(Error::Dimension(format!(
                "cut {} must split {} factors into two nonempty parties",
                cut,
                factor_dims.len()
            )));
        }
        Ok(BipartiteOperator {
            matrix,
            factor_dims,
            cut,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn dim_a(&self) -> usize {
        self.factor_dims[..self.cut].iter().product()
    }

    pub fn dim_b(&self) -> usize {
        self.factor_dims[self.cut..].iter().product()
    }
}

/// Partial transpose over party A (all factors before the cut, jointly).
///
/// Satisfies the basis-element rule `|ij><kl| -> |kj><il|` and is an
/// involution; trace and Hermiticity are preserved.
pub fn partial_transpose(m: &BipartiteOperator) -> BipartiteOperator {
    let da = m.dim_a();
    let db = m.dim_b();
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for ra in 0..da {
        for rb in 0..db {
            for ca in 0..da {
                for cb in 0..db {
                    // out[(ra,rb)][(ca,cb)] = in[(ca,rb)][(ra,cb)]
                    out.set(
                        ra * db + rb,
                        ca * db + cb,
                        m.matrix.get(ca * db + rb, ra * db + cb),
                    );
                }
            }
        }
    }
    BipartiteOperator {
        matrix: out,
        factor_dims: m.factor_dims.clone(),
        cut: m.cut,
    }
}

/// Conjugates by the unitary that reorders tensor factors: factor `t` of
/// the output is factor `perm[t]` of the input. The numeric cut position
/// is kept; party membership follows position.
pub fn permute_subsystems(m: &BipartiteOperator, perm: &[usize]) -> Result<BipartiteOperator> {
    checked_perm(perm, m.factor_dims.len())?;
    let dims = &m.factor_dims;
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    let n = m.dim();
    let map = |new_idx: usize| -> usize {
        let mut old_idx = 0;
        let mut rem = new_idx;
        for t in 0..perm.len() {
            let digit = rem / new_strides[t];
            rem %= new_strides[t];
            old_idx += digit * old_strides[perm[t]];
        }
        old_idx
    };
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        let or = map(r);
        for c in 0..n {
            out.set(r, c, m.matrix.get(or, map(c)));
        }
    }
    BipartiteOperator::new(out, new_dims, m.cut)
}

/// Embeds `op` (with factors `op_dims`) so that it acts on the listed
/// `slots` of a space with factors `full_dims`, and as identity elsewhere.
pub fn embed(
    op: &ComplexMatrix,
    op_dims: &[usize],
    slots: &[usize],
    full_dims: &[usize],
) -> Result<ComplexMatrix> {
    if slots.len() != op_dims.len() {
        return Err(Error::Dimension(format!(
            "{} slots given for an operator with {} factors",
            slots.len(),
            op_dims.len()
        )));
    }
    for (t, &s) in slots.iter().enumerate() {
        if s >= full_dims.len() || full_dims[s] != op_dims[t] {
            return Err(Error::Dimension(format!(
                "slot {s} incompatible with operator factor {t}"
            )));
        }
    }
    let rest: Vec<usize> = (0..full_dims.len()).filter(|i| !slots.contains(i)).collect();
    let rest_dim: usize = rest.iter().map(|&i| full_dims[i]).product();
    // Build op (x) I on the ordering [slots..., rest...], then permute home.
    let big = kron(op, &ComplexMatrix::identity(rest_dim));
    let mut built_order: Vec<usize> = slots.to_vec();
    built_order.extend(&rest);
    // perm[t] = position of full factor t in the built ordering.
    let mut perm = vec![0usize; full_dims.len()];
    for (pos, &factor) in built_order.iter().enumerate() {
        perm[factor] = pos;
    }
    let built_dims: Vec<usize> = built_order.iter().map(|&i| full_dims[i]).collect();
    let tmp = BipartiteOperator {
        matrix: big,
        factor_dims: built_dims,
        cut: 1, // placeholder; permute_subsystems only uses the dims
    };
    Ok(permute_subsystems(&tmp, &perm)?.matrix)
}

/// Partial trace keeping the listed factors (in their given order).
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != m.dim() {
        return Err(Error::Dimension(format!(
            "dims {:?} do not match matrix dimension {}",
            dims,
            m.dim()
        )));
    }
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::Dimension(format!("keep index {k} out of range")));
        }
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();
    let st = strides(dims);
    let keep_strides = strides(&keep.iter().map(|&i| dims[i]).collect::<Vec<_>>());
    let traced_strides = strides(&traced.iter().map(|&i| dims[i]).collect::<Vec<_>>());
    let expand = |kidx: usize, tidx: usize| -> usize {
        let mut full = 0;
        let mut rem = kidx;
        for (t, &f) in keep.iter().enumerate() {
            let digit = rem / keep_strides[t];
            rem %= keep_strides[t];
            full += digit * st[f];
        }
        let mut rem = tidx;
        for (t, &f) in traced.iter().enumerate() {
            let digit = rem / traced_strides[t];
            rem %= traced_strides[t];
            full += digit * st[f];
        }
        full
    };
    let mut out = ComplexMatrix::zeros(keep_dim);
    for r in 0..keep_dim {
        for c in 0..keep_dim {
            let mut acc = ZERO;
            for t in 0..traced_dim {
                acc += m.get(expand(r, t), expand(c, t));
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Contracts `<bra|` (living on `slots`, in that order) against `amps`,
/// returning the unnormalized amplitudes on the remaining factors.
pub fn partial_inner(
    amps: &[C64],
    dims: &[usize],
    slots: &[usize],
    bra: &[C64],
) -> Result<(Vec<C64>, Vec<usize>)> {
    let slot_dim: usize = slots.iter().map(|&s| dims[s]).product();
    if bra.len() != slot_dim {
        return Err(Error::Dimension(format!(
            "bra has {} amplitudes, slots span dimension {}",
            bra.len(),
            slot_dim
        )));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !slots.contains(i)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
    let rest_dim: usize = rest_dims.iter().product();
    let st = strides(dims);
    let slot_strides = strides(&slots.iter().map(|&s| dims[s]).collect::<Vec<_>>());
    let rest_strides = strides(&rest_dims);
    let mut out = vec![ZERO; rest_dim];
    for (ridx, slot_out) in out.iter_mut().enumerate() {
        let mut base = 0;
        let mut rem = ridx;
        for (t, &f) in rest.iter().enumerate() {
            let digit = rem / rest_strides[t];
            rem %= rest_strides[t];
            base += digit * st[f];
        }
        let mut acc = ZERO;
        for sidx in 0..slot_dim {
            let mut full = base;
            let mut rem = sidx;
            for (t, &f) in slots.iter().enumerate() {
                let digit = rem / slot_strides[t];
                rem %= slot_strides[t];
                full += digit * st[f];
            }
            acc += bra[sidx].conj() * amps[full];
        }
        *slot_out = acc;
    }
    Ok((out, rest_dims))
}

/// Applies a small unitary on the listed factor `slots` of a state.
pub fn apply_on_factors(
    amps: &[C64],
    dims: &[usize],
    slots: &[usize],
    op: &ComplexMatrix,
) -> Result<Vec<C64>> {
    let slot_dims: Vec<usize> = slots.iter().map(|&s| dims[s]).collect();
    let slot_dim: usize = slot_dims.iter().product();
    if op.dim() != slot_dim {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match slots spanning {}",
            op.dim(),
            slot_dim
        )));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !slots.contains(i)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
    let rest_dim: usize = rest_dims.iter().product::<usize>().max(1);
    let st = strides(dims);
    let slot_strides = strides(&slot_dims);
    let rest_strides = strides(&rest_dims);
    let full_index = |sidx: usize, ridx: usize| -> usize {
        let mut full = 0;
        let mut rem = sidx;
        for (t, &f) in slots.iter().enumerate() {
            let digit = rem / slot_strides[t];
            rem %= slot_strides[t];
            full += digit * st[f];
        }
        let mut rem = ridx;
        for (t, &f) in rest.iter().enumerate() {
            let digit = rem / rest_strides[t];
            rem %= rest_strides[t];
            full += digit * st[f];
        }
        full
    };
    let mut out = vec![ZERO; amps.len()];
    for ridx in 0..rest_dim {
        for srow in 0..slot_dim {
            let mut acc = ZERO;
            for scol in 0..slot_dim {
                let v = op.get(srow, scol);
                if v != ZERO {
                    acc += v * amps[full_index(scol, ridx)];
                }
            }
            out[full_index(srow, ridx)] = acc;
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Real eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Rebuilds `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |r, c| {
            (0..n)
                .map(|k| v.get(r, k) * self.eigenvalues[k] * v.get(c, k).conj())
                .sum()
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Rejects inputs whose Hermiticity deviation exceeds the working
/// tolerance; the strictly upper part of the symmetrized input drives
/// the rotations, so tiny asymmetries cannot leak into the result.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    m.require_hermitian(TOL.hermiticity)?;
    let n = m.dim();
    // Symmetrize to kill round-off level asymmetry.
    let mut a = ComplexMatrix::from_fn(n, |r, c| (m.get(r, c) + m.get(c, r).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = scale * 1e-15;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for r in 0..n {
            for c in (r + 1)..n {
                off += a.get(r, c).norm_sqr();
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = a.get(p, q);
                let abs = z.norm();
                if abs <= target / (n as f64 * n as f64) {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let u = z / abs; // unit phase of the pivot
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let su = s * u;
                let su_conj = s * u.conj();
                // Column update A <- A J with J = [[c, s*u], [-s*conj(u), c]] on (p,q).
                for r in 0..n {
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, arp * c - arq * su_conj);
                    a.set(r, q, arp * su + arq * c);
                }
                // Row update A <- J^dagger A.
                for col in 0..n {
                    let apc = a.get(p, col);
                    let aqc = a.get(q, col);
                    a.set(p, col, apc * c - aqc * su);
                    a.set(q, col, apc * su_conj + aqc * c);
                }
                a.set(p, q, ZERO);
                a.set(q, p, ZERO);
                a.set(p, p, C64::new(a.get(p, p).re, 0.0));
                a.set(q, q, C64::new(a.get(q, q).re, 0.0));
                // Accumulate eigenvectors V <- V J.
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, vrp * c - vrq * su_conj);
                    v.set(r, q, vrp * su + vrq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |r, c| v.get(r, order[c]));
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Positive semidefiniteness to within `tol`: smallest eigenvalue >= -tol.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(eig_hermitian(m)?.min_eigenvalue() >= -tol)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.min_eigenvalue())
}

// --- JSON exchange format ---------------------------------------------------

fn entries_to_json(entries: &[C64], dim: usize) -> Vec<Vec<[f64; 2]>> {
    (0..dim)
        .map(|r| (0..dim).map(|c| [entries[r * dim + c].re, entries[r * dim + c].im]).collect())
        .collect()
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            dim: usize,
            entries: Vec<Vec<[f64; 2]>>,
        }
        Repr {
            dim: self.dim,
            entries: entries_to_json(&self.entries, self.dim),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            entries: Vec<Vec<[f64; 2]>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.entries.len() != repr.dim || repr.entries.iter().any(|r| r.len() != repr.dim) {
            return Err(D::Error::custom("entries array is not dim x dim"));
        }
        Ok(ComplexMatrix {
            dim: repr.dim,
            entries: repr
                .entries
                .iter()
                .flatten()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        })
    }
}

impl Serialize for BipartiteOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dim: usize,
            entries: Vec<Vec<[f64; 2]>>,
            factor_dims: &'a [usize],
            cut: usize,
        }
        Repr {
            dim: self.matrix.dim,
            entries: entries_to_json(&self.matrix.entries, self.matrix.dim),
            factor_dims: &self.factor_dims,
            cut: self.cut,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BipartiteOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            entries: Vec<Vec<[f64; 2]>>,
            factor_dims: Vec<usize>,
            cut: usize,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.entries.len() != repr.dim || repr.entries.iter().any(|r| r.len() != repr.dim) {
            return Err(D::Error::custom("entries array is not dim x dim"));
        }
        let matrix = ComplexMatrix {
            dim: repr.dim,
            entries: repr
                .entries
                .iter()
                .flatten()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
        };
        BipartiteOperator::new(matrix, repr.factor_dims, repr.cut).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        raw.add(&raw.dagger()).scale(C64::new(0.5, 0.0))
    }

    fn sigma2() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap()
    }

    #[test]
    fn kron_identity_case() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_flip_tensor_is_antidiagonal() {
        let m = kron(&sigma2(), &sigma2());
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r + c == 3 { ONE } else { ZERO };
                assert_eq!(m.get(r, c), expect);
            }
        }
    }

    #[test]
    fn kron_dimension_arithmetic() {
        let a = ComplexMatrix::zeros(2);
        let b = ComplexMatrix::zeros(8);
        assert_eq!(kron(&a, &b).dim(), 16);
    }

    #[test]
    fn kron_trace_multiplicative_and_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_hermitian(2, &mut rng);
            let b = random_hermitian(3, &mut rng);
            let c = random_hermitian(2, &mut rng);
            let tr = kron(&a, &b).trace() - a.trace() * b.trace();
            assert!(tr.norm() <= 1e-12, "trace multiplicativity failed: {tr}");
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            assert!(left.max_abs_diff(&right) <= 1e-12);
        }
    }

    /// Independent index-loop oracle for the partial transpose rule
    /// |ij><kl| -> |kj><il|.
    fn pt_oracle(m: &BipartiteOperator) -> ComplexMatrix {
        let da = m.dim_a();
        let db = m.dim_b();
        let mut out = ComplexMatrix::zeros(m.dim());
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        let v = m.matrix.get(i * db + j, k * db + l);
                        // contributes v * |kj><il|
                        out.add_assign_at(k * db + j, i * db + l, v);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn partial_transpose_matches_oracle_on_basis_elements() {
        for &(da, db) in &[(2usize, 2usize), (4, 4)] {
            let n = da * db;
            for r in 0..n {
                for c in 0..n {
                    let mut m = ComplexMatrix::zeros(n);
                    m.set(r, c, ONE);
                    let op = BipartiteOperator::new(m, vec![da, db], 1).unwrap();
                    let got = partial_transpose(&op);
                    assert_eq!(got.matrix, pt_oracle(&op), "basis element ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn partial_transpose_basis_rule_01_10() {
        // |01><10| on 2x2 -> |11><00|
        let mut m = ComplexMatrix::zeros(4);
        m.set(1, 2, ONE);
        let op = BipartiteOperator::new(m, vec![2, 2], 1).unwrap();
        let pt = partial_transpose(&op);
        for r in 0..4 {
            for c in 0..4 {
                let expect = if (r, c) == (3, 0) { ONE } else { ZERO };
                assert_eq!(pt.matrix.get(r, c), expect);
            }
        }
    }

    #[test]
    fn partial_transpose_involution_trace_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let m = random_hermitian(8, &mut rng);
            let op = BipartiteOperator::new(m.clone(), vec![2, 2, 2], 2).unwrap();
            let pt = partial_transpose(&op);
            assert!((pt.matrix.trace() - m.trace()).norm() <= 1e-12);
            assert!(pt.matrix.is_hermitian(1e-12));
            let back = partial_transpose(&pt);
            assert!(back.matrix.max_abs_diff(&m) <= 1e-15);
        }
    }

    #[test]
    fn permute_relabels_basis_states() {
        // swap on two qubits: |01><01| -> |10><10|
        let mut m = ComplexMatrix::zeros(4);
        m.set(1, 1, ONE);
        let op = BipartiteOperator::new(m, vec![2, 2], 1).unwrap();
        let swapped = permute_subsystems(&op, &[1, 0]).unwrap();
        assert_eq!(swapped.matrix.get(2, 2), ONE);
        assert_eq!(swapped.matrix.get(1, 1), ZERO);
    }

    #[test]
    fn permute_preserves_spectrum_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = random_hermitian(16, &mut rng);
        let op = BipartiteOperator::new(m.clone(), vec![2, 2, 2, 2], 2).unwrap();
        let perm = [2usize, 0, 3, 1];
        let shuffled = permute_subsystems(&op, &perm).unwrap();
        assert!((shuffled.matrix.trace() - m.trace()).norm() <= 1e-12);
        let ev_a = eig_hermitian(&m).unwrap().eigenvalues;
        let ev_b = eig_hermitian(&shuffled.matrix).unwrap().eigenvalues;
        for (x, y) in ev_a.iter().zip(&ev_b) {
            assert!((x - y).abs() <= 1e-10);
        }
        // inverse permutation restores the original
        let mut inv = [0usize; 4];
        for (t, &p) in perm.iter().enumerate() {
            inv[p] = t;
        }
        let back = permute_subsystems(&shuffled, &inv).unwrap();
        assert!(back.matrix.max_abs_diff(&m) <= 1e-15);
    }

    #[test]
    fn permute_rejects_bad_input() {
        let op = BipartiteOperator::new(ComplexMatrix::identity(4), vec![2, 2], 1).unwrap();
        assert!(permute_subsystems(&op, &[0]).is_err());
        assert!(permute_subsystems(&op, &[0, 0]).is_err());
    }

    #[test]
    fn eig_identity_and_diag() {
        let spec = eig_hermitian(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(spec.eigenvalues, vec![1.0; 4]);
        let d = ComplexMatrix::from_rows(&[
            vec![C64::new(3.0, 0.0), ZERO],
            vec![ZERO, C64::new(1.0, 0.0)],
        ])
        .unwrap();
        let spec = eig_hermitian(&d).unwrap();
        assert_eq!(spec.eigenvalues, vec![3.0, 1.0]);
    }

    #[test]
    fn eig_reconstructs_and_sums_to_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 5, 16, 33] {
            let m = random_hermitian(n, &mut rng);
            let spec = eig_hermitian(&m).unwrap();
            assert!(spec.reconstruct().max_abs_diff(&m) <= 1e-10, "n={n}");
            let sum: f64 = spec.eigenvalues.iter().sum();
            assert!((sum - m.trace().re).abs() <= 1e-10);
            // columns orthonormal
            let v = &spec.eigenvectors;
            let gram = v.dagger().mul(v);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-12);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, ONE);
        assert!(matches!(
            eig_hermitian(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&ComplexMatrix::identity(3), 1e-9).unwrap());
        assert!(is_psd(&ComplexMatrix::zeros(3), 1e-9).unwrap());
        let neg = ComplexMatrix::identity(2).scale(C64::new(-1.0, 0.0));
        assert!(!is_psd(&neg, 1e-9).unwrap());
    }

    #[test]
    fn partial_trace_of_kron_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let ab = kron(&a, &b);
        let ta = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(ta.max_abs_diff(&a.scale(b.trace())) <= 1e-12);
        let tb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(tb.max_abs_diff(&b.scale(a.trace())) <= 1e-12);
    }

    #[test]
    fn embed_acts_on_chosen_slots() {
        let s2 = sigma2();
        // flip on slot 1 of three qubits: |000> -> |010>
        let full = embed(&s2, &[2], &[1], &[2, 2, 2]).unwrap();
        let mut input = vec![ZERO; 8];
        input[0] = ONE;
        let out = full.apply(&input);
        assert_eq!(out[2], ONE);
        assert_eq!(out.iter().filter(|z| **z != ZERO).count(), 1);
    }

    #[test]
    fn partial_inner_extracts_rest_factor() {
        // state |0>|phi> with phi = (0.6, 0.8)
        let phi = [C64::new(0.6, 0.0), C64::new(0.8, 0.0)];
        let amps = vec_kron(&[ONE, ZERO], &phi);
        let (rest, dims) = partial_inner(&amps, &[2, 2], &[0], &[ONE, ZERO]).unwrap();
        assert_eq!(dims, vec![2]);
        assert!((rest[0] - phi[0]).norm() <= 1e-15);
        assert!((rest[1] - phi[1]).norm() <= 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let op = BipartiteOperator::new(
            ComplexMatrix::from_fn(4, |r, c| C64::new(r as f64, c as f64)),
            vec![2, 2],
            1,
        )
        .unwrap();
        let text = serde_json::to_string(&op).unwrap();
        assert!(text.contains("\"factor_dims\":[2,2]"));
        let back: BipartiteOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
    }
}
