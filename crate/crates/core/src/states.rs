//! State and unitary constructors, in one fixed set of conventions.
//!
//! Pauli ordering: `sigma_0 = I`, `sigma_1 = diag(1,-1)` (the diagonal
//! one comes first), `sigma_2 = [[0,1],[1,0]]`, `sigma_3 = [[0,-i],[i,0]]`.
//! All index arithmetic in the Bell-diagonal algebra depends on this
//! ordering, so it is used verbatim everywhere even though it differs
//! from the common x/y/z convention.
//!
//! Bell states are `|Psi_i> = (I (x) sigma_i)(|00> + |11>)/sqrt(2)`.
//! The global phase of `|Psi_3>` is fixed by that definition:
//! `(i|01> - i|10>)/sqrt(2)`, i.e. the literal `sigma_3` action with no
//! renormalization of the phase. With this choice the symmetry actions
//! below hold vector-exactly, including the one explicit sign in the
//! `U` action.
//!
//! The four ququad-ququad states pair Bell states across two qubit
//! pairs. Their natural construction order is (A0 B0)(A1 B1); the
//! canonical layout used by the whole crate is A0, A1, B0, B1 with the
//! bipartition cut after A1, so the constructors reshuffle explicitly.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{
    self, kron, partial_trace, permute_vec, vec_kron, BipartiteOperator, ComplexMatrix, C64, ONE,
    ZERO,
};
use crate::{Error, Result, TOL};

/// Index into the fixed Pauli ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const ALL: [PauliIndex; 4] = [PauliIndex(0), PauliIndex(1), PauliIndex(2), PauliIndex(3)];

    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(PauliIndex(value))
        } else {
            Err(Error::OutOfRange(format!(
                "Pauli index must be in 0..=3, got {value}"
            )))
        }
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }
}

/// The 2x2 Pauli matrix for the given index.
pub fn pauli(i: PauliIndex) -> ComplexMatrix {
    let i_c = C64::new(0.0, 1.0);
    let rows = match i.0 {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ONE, ZERO], [ZERO, -ONE]],
        2 => [[ZERO, ONE], [ONE, ZERO]],
        _ => [[ZERO, -i_c], [i_c, ZERO]],
    };
    ComplexMatrix::from_fn(2, |r, c| rows[r][c])
}

/// Pure state with explicit tensor-factor structure and bipartition.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
    pub factor_dims: Vec<usize>,
    pub cut: usize,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>, factor_dims: Vec<usize>, cut: usize) -> Result<Self> {
        let prod: usize = factor_dims.iter().product();
        if prod != amplitudes.len() {
            return Err(Error::Dimension(format!(
                "factor dims {:?} have product {}, but there are {} amplitudes",
                factor_dims,
                prod,
                amplitudes.len()
            )));
        }
        if cut == 0 || cut >= factor_dims.len() {
            return Err(Error::Dimension(format!(
                "cut {} must split {} factors into two nonempty parties",
                cut,
                factor_dims.len()
            )));
        }
        let state = StateVector {
            amplitudes,
            factor_dims,
            cut,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > TOL.unit_norm {
            return Err(Error::OutOfRange(format!(
                "state vector norm {norm} deviates from 1 beyond {:.1e}",
                TOL.unit_norm
            )));
        }
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "state dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Density operator `|psi><psi|` with the same factor structure.
    pub fn projector(&self) -> BipartiteOperator {
        BipartiteOperator::new(
            ComplexMatrix::projector(&self.amplitudes),
            self.factor_dims.clone(),
            self.cut,
        )
        .expect("projector inherits a valid layout")
    }

    /// Tensor product of two bipartite states that keeps the A|B cut:
    /// the A factors of `other` are appended after the A factors of
    /// `self`, and likewise on the B side.
    pub fn tensor(&self, other: &Self) -> Self {
        let raw = vec_kron(&self.amplitudes, &other.amplitudes);
        // built order: [selfA, selfB, otherA, otherB]
        let (sa, sb) = (self.cut, self.factor_dims.len() - self.cut);
        let (oa, ob) = (other.cut, other.factor_dims.len() - other.cut);
        let mut built_dims = self.factor_dims.clone();
        built_dims.extend(&other.factor_dims);
        let mut perm = Vec::with_capacity(sa + sb + oa + ob);
        perm.extend(0..sa); // self A
        perm.extend(sa + sb..sa + sb + oa); // other A
        perm.extend(sa..sa + sb); // self B
        perm.extend(sa + sb + oa..sa + sb + oa + ob); // other B
        let amplitudes = permute_vec(&raw, &built_dims, &perm).expect("valid permutation");
        let factor_dims: Vec<usize> = perm.iter().map(|&p| built_dims[p]).collect();
        StateVector {
            amplitudes,
            factor_dims,
            cut: sa + oa,
        }
    }

    /// Reduced density operator of party A.
    pub fn reduced_a(&self) -> Result<ComplexMatrix> {
        let proj = ComplexMatrix::projector(&self.amplitudes);
        let keep: Vec<usize> = (0..self.cut).collect();
        partial_trace(&proj, &self.factor_dims, &keep)
    }

    /// Schmidt coefficients across the A|B cut.
    pub fn schmidt(&self) -> Result<SchmidtVector> {
        let reduced = self.reduced_a()?;
        let mut eigs = linalg::eig_hermitian(&reduced)?.eigenvalues;
        for e in &mut eigs {
            *e = e.max(0.0);
        }
        SchmidtVector::new(eigs)
    }
}

/// Nonincreasing nonnegative coefficients summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtVector {
    coefficients: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::OutOfRange("empty Schmidt vector".into()));
        }
        for w in coefficients.windows(2) {
            if w[1] > w[0] + TOL.exact {
                return Err(Error::OutOfRange(
                    "Schmidt coefficients must be sorted descending".into(),
                ));
            }
        }
        if coefficients.iter().any(|&c| c < -TOL.exact) {
            return Err(Error::OutOfRange(
                "Schmidt coefficients must be nonnegative".into(),
            ));
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > TOL.unit_norm {
            return Err(Error::OutOfRange(format!(
                "Schmidt coefficients sum to {sum}, expected 1"
            )));
        }
        Ok(SchmidtVector { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

/// `|Psi_i> = (I (x) sigma_i)(|00> + |11>)/sqrt(2)` on a 2x2 system.
pub fn bell_state(i: PauliIndex) -> StateVector {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [
        C64::new(inv_sqrt2, 0.0),
        ZERO,
        ZERO,
        C64::new(inv_sqrt2, 0.0),
    ];
    let op = kron(&ComplexMatrix::identity(2), &pauli(i));
    StateVector::new(op.apply(&plus), vec![2, 2], 1).expect("Bell states are unit vectors")
}

/// Bell projector `Psi_i` as a 4x4 operator.
pub fn bell_projector(i: PauliIndex) -> BipartiteOperator {
    bell_state(i).projector()
}

/// Which Bell state sits on each qubit pair of `|chi_i>`: slot 0 carries
/// `Psi_i` itself, slot 1 carries `Psi_0` for i = 0 and `Psi_1` otherwise.
pub const CHI_PAIRS: [(u8, u8); 4] = [(0, 0), (1, 1), (2, 1), (3, 1)];

/// Permutation taking the construction order (A0 B0)(A1 B1) to the
/// canonical layout A0 A1 B0 B1.
pub const CHI_RESHUFFLE: [usize; 4] = [0, 2, 1, 3];

/// The i-th ququad-ququad state in the canonical A0 A1 B0 B1 layout.
pub fn chi_state(i: usize) -> Result<StateVector> {
    let (a, b) = match CHI_PAIRS.get(i) {
        Some(&(a, b)) => (PauliIndex(a), PauliIndex(b)),
        None => {
            return Err(Error::OutOfRange(format!(
                "chi index must be in 0..=3, got {i}"
            )))
        }
    };
    let slot0 = bell_state(a);
    let slot1 = bell_state(b);
    // Built on [A0, B0, A1, B1]; reshuffle to [A0, A1, B0, B1].
    let raw = vec_kron(&slot0.amplitudes, &slot1.amplitudes);
    let amplitudes = permute_vec(&raw, &[2, 2, 2, 2], &CHI_RESHUFFLE)?;
    StateVector::new(amplitudes, vec![2, 2, 2, 2], 2)
}

/// All four `chi` states.
pub fn chi_family() -> Vec<StateVector> {
    (0..4).map(|i| chi_state(i).expect("valid index")).collect()
}

/// `|Phi> = sum_j |j>|j>/sqrt(d)` on a d x d system.
pub fn max_entangled(d: usize) -> Result<StateVector> {
    if d == 0 {
        return Err(Error::OutOfRange("dimension must be positive".into()));
    }
    if d == 1 {
        // Degenerate case: the scalar 1 on a 1x1 pair of factors.
        return StateVector::new(vec![ONE], vec![1, 1], 1);
    }
    let inv = 1.0 / (d as f64).sqrt();
    let mut amplitudes = vec![ZERO; d * d];
    for j in 0..d {
        amplitudes[j * d + j] = C64::new(inv, 0.0);
    }
    StateVector::new(amplitudes, vec![d, d], 1)
}

/// `sqrt(1-p)|00> + sqrt(p)|11>` on a 2x2 system.
pub fn two_term_state(p: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!(
            "two-term weight must be in [0,1], got {p}"
        )));
    }
    let amplitudes = vec![
        C64::new((1.0 - p).sqrt(), 0.0),
        ZERO,
        ZERO,
        C64::new(p.sqrt(), 0.0),
    ];
    StateVector::new(amplitudes, vec![2, 2], 1)
}

/// The named local symmetry unitaries of the chi family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymmetryUnitary {
    /// Cycles `chi_1 -> chi_2 -> chi_3 -> chi_1` and fixes `chi_0`; acts on A0 (x) B0.
    W,
    /// Fixes `chi_0`, `chi_1`; maps `chi_2 -> chi_3` and `chi_3 -> -chi_2`; acts on A0 (x) B0.
    U,
    /// Phase pair `diag(1, e^{-i theta}) (x) diag(1, e^{i theta})` on A1 (x) B1; fixes every `chi_i`.
    V(f64),
    /// `sigma_j (x) sigma_j` on either qubit pair; fixes every `chi_i` up to sign.
    PauliPair(PauliIndex),
}

/// The 4x4 unitary for the named symmetry, as an operator on one qubit
/// pair (first factor on the A side, second on the B side).
pub fn symmetry_unitary(name: SymmetryUnitary) -> BipartiteOperator {
    let i_c = C64::new(0.0, 1.0);
    let matrix = match name {
        SymmetryUnitary::W => {
            let left = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) | (1, 0) => -i_c,
                (0, 1) => ONE,
                _ => -ONE,
            });
            let right = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) | (1, 0) => i_c,
                (0, 1) => ONE,
                _ => -ONE,
            });
            kron(&left, &right).scale(C64::new(0.5, 0.0))
        }
        SymmetryUnitary::U => {
            let left = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) => ONE,
                (1, 1) => -i_c,
                _ => ZERO,
            });
            let right = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) => ONE,
                (1, 1) => i_c,
                _ => ZERO,
            });
            kron(&left, &right)
        }
        SymmetryUnitary::V(theta) => {
            let left = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) => ONE,
                (1, 1) => C64::from_polar(1.0, -theta),
                _ => ZERO,
            });
            let right = ComplexMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) => ONE,
                (1, 1) => C64::from_polar(1.0, theta),
                _ => ZERO,
            });
            kron(&left, &right)
        }
        SymmetryUnitary::PauliPair(j) => kron(&pauli(j), &pauli(j)),
    };
    BipartiteOperator::new(matrix, vec![2, 2], 1).expect("4x4 pair unitary")
}

/// Qubit-pair slot of the chi space: (A0, B0) or (A1, B1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSlot {
    Zero,
    One,
}

impl PairSlot {
    /// Positions of (A_j, B_j) in the canonical A0 A1 B0 B1 layout.
    pub fn factor_positions(self) -> [usize; 2] {
        match self {
            PairSlot::Zero => [0, 2],
            PairSlot::One => [1, 3],
        }
    }
}

/// Lifts a qubit-pair unitary to the full 16-dimensional chi space,
/// acting on the chosen pair slot.
pub fn lift_pair_unitary(op: &BipartiteOperator, slot: PairSlot) -> Result<BipartiteOperator> {
    if op.dim() != 4 {
        return Err(Error::Dimension(format!(
            "pair unitary must be 4x4, got {}",
            op.dim()
        )));
    }
    let full = linalg::embed(
        &op.matrix,
        &[2, 2],
        &slot.factor_positions(),
        &[2, 2, 2, 2],
    )?;
    BipartiteOperator::new(full, vec![2, 2, 2, 2], 2)
}

/// Applies a (lifted) unitary to a state of matching dimension.
pub fn apply_unitary(op: &BipartiteOperator, state: &StateVector) -> Result<StateVector> {
    if op.dim() != state.dim() {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match state dimension {}",
            op.dim(),
            state.dim()
        )));
    }
    StateVector::new(
        op.matrix.apply(&state.amplitudes),
        state.factor_dims.clone(),
        state.cut,
    )
}

/// Global phase `p` such that `u|source> = p|target>`, if the action is
/// exactly a phase within `tol`.
pub fn action_phase(
    u: &BipartiteOperator,
    source: &StateVector,
    target: &StateVector,
    tol: f64,
) -> Option<Complex64> {
    let moved = u.matrix.apply(&source.amplitudes);
    let phase: C64 = target
        .amplitudes
        .iter()
        .zip(&moved)
        .map(|(t, m)| t.conj() * m)
        .sum();
    if (phase.norm() - 1.0).abs() > tol {
        return None;
    }
    let residual: f64 = moved
        .iter()
        .zip(&target.amplitudes)
        .map(|(m, t)| (m - t * phase).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (residual <= tol).then_some(phase)
}

/// Lifted `sigma_j (x) sigma_j` twirl set for one pair slot.
pub fn pauli_pair_unitaries(slot: PairSlot) -> Vec<BipartiteOperator> {
    PauliIndex::ALL
        .iter()
        .map(|&j| {
            lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::PauliPair(j)), slot)
                .expect("lift of a 4x4 unitary")
        })
        .collect()
}

/// Sign table entry of the pair-Pauli symmetry: applying
/// `sigma_j (x) sigma_j` on the given slot to `|chi_i>` yields `sign * |chi_i>`.
pub fn pauli_pair_sign(i: usize, j: PauliIndex, slot: PairSlot) -> Result<f64> {
    let chi = chi_state(i)?;
    let u = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::PauliPair(j)), slot)?;
    let phase = action_phase(&u, &chi, &chi, 1e-12).ok_or_else(|| {
        Error::Verdict(format!(
            "pair Pauli {j:?} on slot {slot:?} does not preserve chi_{i} up to phase"
        ))
    })?;
    if (phase.im).abs() > 1e-12 || (phase.re.abs() - 1.0).abs() > 1e-12 {
        return Err(Error::Verdict(format!(
            "pair Pauli action phase {phase} is not a sign"
        )));
    }
    Ok(phase.re.signum())
}

// States use the matrix JSON shape with an `amplitudes` field.
impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dim: usize,
            amplitudes: Vec<[f64; 2]>,
            factor_dims: &'a [usize],
            cut: usize,
        }
        Repr {
            dim: self.dim(),
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
            factor_dims: &self.factor_dims,
            cut: self.cut,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            amplitudes: Vec<[f64; 2]>,
            factor_dims: Vec<usize>,
            cut: usize,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.amplitudes.len() != repr.dim {
            return Err(D::Error::custom("amplitude count does not match dim"));
        }
        StateVector::new(
            repr.amplitudes
                .iter()
                .map(|&[re, im]| C64::new(re, im))
                .collect(),
            repr.factor_dims,
            repr.cut,
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_transpose;

    #[test]
    fn bell_state_amplitudes() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi0 = bell_state(PauliIndex(0));
        assert!((psi0.amplitudes[0].re - s).abs() <= 1e-15);
        assert!((psi0.amplitudes[3].re - s).abs() <= 1e-15);
        let psi1 = bell_state(PauliIndex(1));
        assert!((psi1.amplitudes[0].re - s).abs() <= 1e-15);
        assert!((psi1.amplitudes[3].re + s).abs() <= 1e-15);
        let psi3 = bell_state(PauliIndex(3));
        assert!((psi3.amplitudes[1] - C64::new(0.0, s)).norm() <= 1e-15);
        assert!((psi3.amplitudes[2] - C64::new(0.0, -s)).norm() <= 1e-15);
    }

    #[test]
    fn bell_states_orthonormal() {
        for i in PauliIndex::ALL {
            for j in PauliIndex::ALL {
                let expect = if i == j { 1.0 } else { 0.0 };
                let ip = bell_state(i).inner(&bell_state(j));
                assert!((ip - C64::new(expect, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn chi_states_orthonormal_and_maximally_entangled() {
        let family = chi_family();
        for (i, a) in family.iter().enumerate() {
            for (j, b) in family.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - C64::new(expect, 0.0)).norm() <= 1e-12);
            }
            // Independent partial-trace oracle: reduced state on A is I/4.
            let reduced = a.reduced_a().unwrap();
            let quarter = ComplexMatrix::identity(4).scale(C64::new(0.25, 0.0));
            assert!(reduced.max_abs_diff(&quarter) <= 1e-12, "chi_{i}");
        }
    }

    #[test]
    fn chi_zero_is_reshuffled_double_bell() {
        let psi0 = bell_state(PauliIndex(0));
        let raw = vec_kron(&psi0.amplitudes, &psi0.amplitudes);
        let reshuffled = permute_vec(&raw, &[2, 2, 2, 2], &CHI_RESHUFFLE).unwrap();
        let chi0 = chi_state(0).unwrap();
        for (a, b) in reshuffled.iter().zip(&chi0.amplitudes) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn chi_two_uses_psi2_psi1() {
        let raw = vec_kron(
            &bell_state(PauliIndex(2)).amplitudes,
            &bell_state(PauliIndex(1)).amplitudes,
        );
        let expected = permute_vec(&raw, &[2, 2, 2, 2], &CHI_RESHUFFLE).unwrap();
        let chi2 = chi_state(2).unwrap();
        for (a, b) in expected.iter().zip(&chi2.amplitudes) {
            assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn max_entangled_basics() {
        assert_eq!(max_entangled(1).unwrap().amplitudes, vec![ONE]);
        let phi2 = max_entangled(2).unwrap();
        let psi0 = bell_state(PauliIndex(0));
        assert!((phi2.inner(&psi0).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn max_entangled_pt_eigenvalue_bound() {
        for d in 2..=4usize {
            let phi = max_entangled(d).unwrap();
            let pt = partial_transpose(&phi.projector());
            let spec = linalg::eig_hermitian(&pt.matrix).unwrap();
            assert!(
                (spec.max_eigenvalue() - 1.0 / d as f64).abs() <= 1e-12,
                "d={d}"
            );
        }
    }

    #[test]
    fn two_term_schmidt_coefficients() {
        let s = two_term_state(0.3).unwrap().schmidt().unwrap();
        assert!((s.coefficients()[0] - 0.7).abs() <= 1e-12);
        assert!((s.coefficients()[1] - 0.3).abs() <= 1e-12);
        let zero = two_term_state(0.0).unwrap();
        assert_eq!(zero.amplitudes[0], ONE);
        let half = two_term_state(0.5).unwrap();
        assert!((half.inner(&bell_state(PauliIndex(0))).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tensor_keeps_the_cut() {
        let chi = chi_state(2).unwrap();
        let alpha = two_term_state(0.25).unwrap();
        let joint = chi.tensor(&alpha);
        assert_eq!(joint.factor_dims, vec![2, 2, 2, 2, 2, 2]);
        assert_eq!(joint.cut, 3);
        let reduced = joint.reduced_a().unwrap();
        assert!((reduced.trace().re - 1.0).abs() < 1e-12);
        // Schmidt coefficients multiply across the product.
        let sc = joint.schmidt().unwrap();
        assert!((sc.coefficients()[0] - 0.75 / 4.0).abs() <= 1e-12);
    }

    #[test]
    fn symmetry_unitaries_are_unitary() {
        for u in [
            SymmetryUnitary::W,
            SymmetryUnitary::U,
            SymmetryUnitary::V(0.7),
            SymmetryUnitary::PauliPair(PauliIndex(3)),
        ] {
            let m = symmetry_unitary(u).matrix;
            let gram = m.dagger().mul(&m);
            assert!(
                gram.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-12,
                "{u:?}"
            );
        }
    }

    #[test]
    fn w_cycles_chi_states() {
        let w = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::W), PairSlot::Zero).unwrap();
        let chi = chi_family();
        for (src, dst) in [(0usize, 0usize), (1, 2), (2, 3), (3, 1)] {
            let phase = action_phase(&w, &chi[src], &chi[dst], 1e-12)
                .unwrap_or_else(|| panic!("W does not map chi_{src} to chi_{dst}"));
            assert!(
                (phase - ONE).norm() <= 1e-12,
                "phase for {src}->{dst}: {phase}"
            );
        }
    }

    #[test]
    fn u_swaps_chi_2_3_with_sign() {
        let u = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::U), PairSlot::Zero).unwrap();
        let chi = chi_family();
        for fixed in [0usize, 1] {
            let phase = action_phase(&u, &chi[fixed], &chi[fixed], 1e-12).unwrap();
            assert!((phase - ONE).norm() <= 1e-12);
        }
        let phase23 = action_phase(&u, &chi[2], &chi[3], 1e-12).unwrap();
        assert!((phase23 - ONE).norm() <= 1e-12);
        let phase32 = action_phase(&u, &chi[3], &chi[2], 1e-12).unwrap();
        assert!((phase32 + ONE).norm() <= 1e-12, "expected the explicit sign");
    }

    #[test]
    fn v_fixes_all_chi_states() {
        let v =
            lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::V(0.7)), PairSlot::One).unwrap();
        for chi in chi_family() {
            let phase = action_phase(&v, &chi, &chi, 1e-12).unwrap();
            assert!((phase - ONE).norm() <= 1e-12);
        }
    }

    #[test]
    fn pauli_pair_sign_table_is_stable() {
        // Frozen sign table: rows are chi_i, columns sigma_0..sigma_3.
        let expect_slot0 = [
            [1.0, 1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, 1.0],
            [1.0, -1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0, -1.0],
        ];
        let expect_slot1 = [
            [1.0, 1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0, 1.0],
        ];
        for i in 0..4 {
            for j in PauliIndex::ALL {
                let s0 = pauli_pair_sign(i, j, PairSlot::Zero).unwrap();
                let s1 = pauli_pair_sign(i, j, PairSlot::One).unwrap();
                assert_eq!(
                    s0,
                    expect_slot0[i][j.value()],
                    "slot0 chi_{i} sigma_{}",
                    j.value()
                );
                assert_eq!(
                    s1,
                    expect_slot1[i][j.value()],
                    "slot1 chi_{i} sigma_{}",
                    j.value()
                );
            }
        }
    }
}
