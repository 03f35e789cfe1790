//! Bell-diagonal algebra and the symmetrization of four-outcome POVMs
//! on the ququad-ququad space.
//!
//! The twirl over `sigma_j (x) sigma_j` pairs projects any 4x4 operator
//! onto the span of the Bell projectors. On Bell-diagonal operators the
//! partial transpose acts coefficientwise: with this crate's sigma
//! ordering and the `|Psi_3>` phase fixed in [`crate::states`], the
//! entrywise partial-transpose oracle resolves the coefficient pairing
//! to `mu_i = Tr(M)/2 - nu_{3-i}` (the index reflection `i <-> 3-i`,
//! not a shift mod 4). The positivity criterion
//! `M, M^Gamma >= 0  iff  0 <= 2 nu_i <= Tr(M)` is insensitive to the
//! pairing and holds either way.
//!
//! [`symmetrize_povm`] averages a POVM over the full invariance group
//! of the chi family: pair-Pauli twirls on both qubit-pair slots, the
//! phase pairs `V(theta)` (a four-point average, exact because every
//! matrix entry picks up a phase `e^{ik theta}` with `|k| <= 2`), and
//! the six-element group generated by `W` and `U` together with the
//! outcome relabeling they induce. Each stage is a convex combination
//! of POVMs with the same uniform-prior success probability, so the
//! pipeline preserves it exactly, and the average over a closed group
//! makes the result invariant under every generator simultaneously.

mod infeasibility;

pub use infeasibility::{analytic_infeasibility, CoefficientLedger, ProofStep, ProofTrace};

use serde::{Deserialize, Serialize};

use crate::linalg::{
    self, partial_transpose, permute_subsystems, BipartiteOperator, ComplexMatrix, C64,
};
use crate::states::{
    bell_projector, bell_state, chi_family, lift_pair_unitary, pauli_pair_unitaries,
    symmetry_unitary, PairSlot, PauliIndex, StateVector, SymmetryUnitary,
};
use crate::{Error, Result, TOL};

/// Four real coefficients of an operator diagonal in the Bell basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal {
    pub nu: [f64; 4],
}

impl BellDiagonal {
    pub fn new(nu: [f64; 4]) -> Self {
        BellDiagonal { nu }
    }

    pub fn trace(&self) -> f64 {
        self.nu.iter().sum()
    }

    /// `sum_i nu_i Psi_i` as a 4x4 operator on one qubit pair.
    pub fn reconstruct(&self) -> BipartiteOperator {
        let mut m = ComplexMatrix::zeros(4);
        for (i, &v) in self.nu.iter().enumerate() {
            let p = bell_projector(PauliIndex::new(i as u8).expect("index 0..=3"));
            m = m.add(&p.matrix.scale(C64::new(v, 0.0)));
        }
        BipartiteOperator::new(m, vec![2, 2], 1).expect("4x4 layout")
    }

    /// PSD as coefficients: all `nu_i >= -tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.nu.iter().all(|&v| v >= -tol)
    }

    /// The joint criterion for `M >= 0` and `M^Gamma >= 0`:
    /// `0 <= 2 nu_i <= Tr(M)` for every i.
    pub fn is_psd_and_ppt(&self, tol: f64) -> bool {
        let tr = self.trace();
        self.nu.iter().all(|&v| v >= -tol && 2.0 * v <= tr + tol)
    }

    pub fn max_abs_diff(&self, other: &BellDiagonal) -> f64 {
        self.nu
            .iter()
            .zip(&other.nu)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Bell-basis diagonal of a 4x4 Hermitian operator:
/// `nu_i = <Psi_i| m |Psi_i>`.
///
/// The average `(1/4) sum_i (sigma_i (x) sigma_i) m (sigma_i (x) sigma_i)`
/// equals `sum_i nu_i Psi_i`; see [`pauli_twirl_average`] for the
/// explicit conjugation sum.
pub fn pauli_twirl(m: &BipartiteOperator) -> Result<BellDiagonal> {
    if m.dim() != 4 {
        return Err(Error::Dimension(format!(
            "pauli_twirl expects a 4x4 qubit-pair operator, got dim {}",
            m.dim()
        )));
    }
    m.matrix.require_hermitian(TOL.hermiticity)?;
    let mut nu = [0.0; 4];
    for (i, slot) in nu.iter_mut().enumerate() {
        let psi = bell_state(PauliIndex::new(i as u8)?);
        let applied = m.matrix.apply(&psi.amplitudes);
        let val: C64 = psi
            .amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum();
        *slot = val.re;
    }
    Ok(BellDiagonal::new(nu))
}

/// The explicit four-term conjugation average
/// `(1/4) sum_i (sigma_i (x) sigma_i) m (sigma_i (x) sigma_i)`.
pub fn pauli_twirl_average(m: &ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(4);
    for i in PauliIndex::ALL {
        let u = symmetry_unitary(SymmetryUnitary::PauliPair(i)).matrix;
        acc = acc.add(&m.conjugate_by(&u));
    }
    acc.scale(C64::new(0.25, 0.0))
}

/// Partial-transpose action on Bell-diagonal coefficients:
/// `mu_i = Tr(M)/2 - nu_{3-i}`.
///
/// The index pairing `i <-> 3-i` is the one the entrywise partial
/// transpose actually produces under this crate's conventions; it is
/// cross-checked against [`partial_transpose`] in the tests.
pub fn bell_pt_coeffs(nu: &BellDiagonal) -> BellDiagonal {
    let half_tr = nu.trace() / 2.0;
    let mut mu = [0.0; 4];
    for (i, slot) in mu.iter_mut().enumerate() {
        *slot = half_tr - nu.nu[3 - i];
    }
    BellDiagonal::new(mu)
}

/// Ordered list of Hermitian measurement operators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Povm {
    pub elements: Vec<BipartiteOperator>,
}

impl Povm {
    /// Shape checks only; validity and PPT flags are computed on demand.
    pub fn new(elements: Vec<BipartiteOperator>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no outcomes".into()));
        }
        let dims = elements[0].factor_dims.clone();
        let cut = elements[0].cut;
        for (i, e) in elements.iter().enumerate() {
            if e.factor_dims != dims || e.cut != cut {
                return Err(Error::InvalidPovm(format!(
                    "element {i} has a different tensor layout"
                )));
            }
            e.matrix
                .require_hermitian(TOL.hermiticity)
                .map_err(|err| Error::InvalidPovm(format!("element {i}: {err}")))?;
        }
        Ok(Povm { elements })
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Elements sum to identity and are PSD, within the given tolerances.
    pub fn validate(&self, sum_tol: f64, psd_tol: f64) -> Result<()> {
        let n = self.dim();
        let mut sum = ComplexMatrix::zeros(n);
        for e in &self.elements {
            sum = sum.add(&e.matrix);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(n));
        if dev > sum_tol {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:.3e} (tolerance {sum_tol:.1e})"
            )));
        }
        for (i, e) in self.elements.iter().enumerate() {
            let min = linalg::min_eigenvalue(&e.matrix)?;
            if min < -psd_tol {
                return Err(Error::InvalidPovm(format!(
                    "element {i} has eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate(TOL.povm_sum, TOL.psd).is_ok()
    }

    /// Per-element flag: partial transpose PSD within `tol`.
    pub fn ppt_flags(&self, tol: f64) -> Result<Vec<bool>> {
        self.elements
            .iter()
            .map(|e| linalg::is_psd(&partial_transpose(e).matrix, tol))
            .collect()
    }

    pub fn is_ppt(&self) -> bool {
        matches!(self.ppt_flags(TOL.psd), Ok(flags) if flags.iter().all(|&f| f))
    }

    /// `sum_i p_i <psi_i| E_i |psi_i>` for pure states.
    pub fn success_probability(&self, witnesses: &[StateVector], priors: &[f64]) -> f64 {
        assert_eq!(witnesses.len(), self.n_outcomes(), "outcome count mismatch");
        assert_eq!(priors.len(), self.n_outcomes(), "prior count mismatch");
        self.elements
            .iter()
            .zip(witnesses)
            .zip(priors)
            .map(|((e, psi), p)| {
                let applied = e.matrix.apply(&psi.amplitudes);
                let val: C64 = psi
                    .amplitudes
                    .iter()
                    .zip(&applied)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                p * val.re
            })
            .sum()
    }
}

/// One symmetry of the chi family lifted to the 16-dimensional space,
/// together with the outcome relabeling it induces.
struct GroupElement {
    unitary: ComplexMatrix,
    /// `tau[i] = j` when the unitary maps `chi_i` onto `chi_j` (up to phase).
    tau: [usize; 4],
}

fn outcome_permutation(u: &ComplexMatrix, chi: &[StateVector]) -> Result<[usize; 4]> {
    let mut tau = [usize::MAX; 4];
    for (i, src) in chi.iter().enumerate() {
        let moved = u.apply(&src.amplitudes);
        for (j, dst) in chi.iter().enumerate() {
            let overlap: C64 = dst
                .amplitudes
                .iter()
                .zip(&moved)
                .map(|(a, b)| a.conj() * b)
                .sum();
            if (overlap.norm() - 1.0).abs() <= 1e-10 {
                tau[i] = j;
                break;
            }
        }
        if tau[i] == usize::MAX {
            return Err(Error::Verdict(format!(
                "unitary does not permute the chi family (chi_{i} has no image)"
            )));
        }
    }
    let mut seen = [false; 4];
    for &j in &tau {
        if seen[j] {
            return Err(Error::Verdict("outcome relabeling is not a bijection".into()));
        }
        seen[j] = true;
    }
    Ok(tau)
}

/// `(1/|G|) sum_g U_g E_{tau_g^{-1}(i)} U_g^dagger` for each outcome i.
fn group_average(elements: &[ComplexMatrix], group: &[GroupElement]) -> Vec<ComplexMatrix> {
    let n = elements[0].dim();
    let k = elements.len();
    let mut out = vec![ComplexMatrix::zeros(n); k];
    for g in group {
        let mut inv = [0usize; 4];
        for (i, &j) in g.tau.iter().enumerate() {
            inv[j] = i;
        }
        for (i, acc) in out.iter_mut().enumerate() {
            let moved = elements[inv[i]].conjugate_by(&g.unitary);
            *acc = acc.add(&moved);
        }
    }
    let scale = C64::new(1.0 / group.len() as f64, 0.0);
    out.into_iter().map(|m| m.scale(scale)).collect()
}

fn identity_tau() -> [usize; 4] {
    [0, 1, 2, 3]
}

fn pauli_stage(slot: PairSlot) -> Vec<GroupElement> {
    pauli_pair_unitaries(slot)
        .into_iter()
        .map(|u| GroupElement {
            unitary: u.matrix,
            tau: identity_tau(),
        })
        .collect()
}

fn v_stage() -> Vec<GroupElement> {
    // Four-point average; kills every phase e^{ik theta} with k not a
    // multiple of 4, and conjugation only produces |k| <= 2.
    [0.0, 0.5, 1.0, 1.5]
        .iter()
        .map(|&t| {
            let v = lift_pair_unitary(
                &symmetry_unitary(SymmetryUnitary::V(t * std::f64::consts::PI)),
                PairSlot::One,
            )
            .expect("lift V");
            GroupElement {
                unitary: v.matrix,
                tau: identity_tau(),
            }
        })
        .collect()
}

fn wu_stage(chi: &[StateVector]) -> Result<Vec<GroupElement>> {
    let w = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::W), PairSlot::Zero)?.matrix;
    let u = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::U), PairSlot::Zero)?.matrix;
    let w2 = w.mul(&w);
    let unitaries = vec![
        ComplexMatrix::identity(16),
        w.clone(),
        w2.clone(),
        u.clone(),
        w.mul(&u),
        w2.mul(&u),
    ];
    unitaries
        .into_iter()
        .map(|unitary| {
            let tau = outcome_permutation(&unitary, chi)?;
            Ok(GroupElement { unitary, tau })
        })
        .collect()
}

/// Residual of the symmetric-form equations on a four-outcome POVM:
/// `N_1 = U N_1 U^dag`, `N_{i+1} = W N_i W^dag` for i = 1, 2, and
/// elementwise invariance under `V(theta)` and under the pair Paulis
/// on both slots.
pub fn symmetric_form_residual(povm: &Povm) -> Result<f64> {
    if povm.n_outcomes() != 4 || povm.dim() != 16 {
        return Err(Error::Dimension(
            "symmetric form is defined for 4 outcomes on the 16-dimensional chi space".into(),
        ));
    }
    let w = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::W), PairSlot::Zero)?.matrix;
    let u = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::U), PairSlot::Zero)?.matrix;
    let e = &povm.elements;
    let mut res: f64 = 0.0;
    res = res.max(e[1].matrix.conjugate_by(&u).max_abs_diff(&e[1].matrix));
    res = res.max(e[1].matrix.conjugate_by(&w).max_abs_diff(&e[2].matrix));
    res = res.max(e[2].matrix.conjugate_by(&w).max_abs_diff(&e[3].matrix));
    // Generic theta probes the whole V orbit.
    let v = lift_pair_unitary(&symmetry_unitary(SymmetryUnitary::V(0.7)), PairSlot::One)?.matrix;
    for el in e {
        res = res.max(el.matrix.conjugate_by(&v).max_abs_diff(&el.matrix));
    }
    for slot in [PairSlot::Zero, PairSlot::One] {
        for p in pauli_pair_unitaries(slot) {
            for el in e {
                res = res.max(el.matrix.conjugate_by(&p.matrix).max_abs_diff(&el.matrix));
            }
        }
    }
    Ok(res)
}

/// Group-averages a four-outcome POVM on the chi space into the fully
/// symmetric form, preserving validity, PPT-ness of every element, and
/// the uniform-prior success probability.
pub fn symmetrize_povm(c: &Povm) -> Result<Povm> {
    if c.n_outcomes() != 4 || c.dim() != 16 {
        return Err(Error::InvalidPovm(
            "symmetrization expects 4 outcomes on the 16-dimensional chi space".into(),
        ));
    }
    c.validate(TOL.povm_sum, TOL.psd)
        .map_err(|e| Error::InvalidPovm(format!("input contract: {e}")))?;
    let chi = chi_family();
    let priors = [0.25; 4];
    let success_in = c.success_probability(&chi, &priors);
    let input_ppt = c.is_ppt();

    let mut elements: Vec<ComplexMatrix> =
        c.elements.iter().map(|e| e.matrix.clone()).collect();
    let stages: Vec<Vec<GroupElement>> = vec![
        pauli_stage(PairSlot::Zero),
        pauli_stage(PairSlot::One),
        v_stage(),
        wu_stage(&chi)?,
    ];
    for stage in &stages {
        elements = group_average(&elements, stage);
    }

    let out = Povm::new(
        elements
            .into_iter()
            .map(|m| BipartiteOperator::new(m, vec![2, 2, 2, 2], 2))
            .collect::<Result<Vec<_>>>()?,
    )?;

    out.validate(TOL.povm_sum, TOL.psd)
        .expect("group averaging preserves POVM validity");
    let res = symmetric_form_residual(&out)?;
    assert!(
        res <= TOL.symmetry,
        "symmetrized POVM violates the invariance equations: residual {res:.3e}"
    );
    let success_out = out.success_probability(&chi, &priors);
    assert!(
        (success_out - success_in).abs() <= TOL.symmetry,
        "symmetrization changed the success probability: {success_in} -> {success_out}"
    );
    if input_ppt {
        assert!(out.is_ppt(), "symmetrization must preserve PPT elements");
    }
    Ok(out)
}

/// Bell-diagonal blocks of a symmetric POVM element, read off in the
/// (A1 B1)(A0 B0) ordering: `P` on the outer |00>/|11> diagonal, `R` on
/// the outer |01>/|10> diagonal, `T` on the outer |00><11| corners.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetricBlocks {
    pub p: BellDiagonal,
    pub r: BellDiagonal,
    pub t: BellDiagonal,
}

/// Permutation from the canonical layout A0 A1 B0 B1 to the block
/// layout A1 B1 A0 B0 (outer pair first).
const BLOCK_ORDER: [usize; 4] = [1, 3, 0, 2];

fn block_of(m: &ComplexMatrix, x: usize, y: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |r, c| m.get(x * 4 + r, y * 4 + c))
}

/// Extracts the `P`, `R`, `T` blocks of a symmetric element, asserting
/// the displayed sparsity pattern and Bell-diagonality of each block.
pub fn block_decompose(n: &BipartiteOperator) -> Result<SymmetricBlocks> {
    if n.dim() != 16 || n.factor_dims != vec![2, 2, 2, 2] {
        return Err(Error::Dimension(
            "block decomposition expects a four-qubit operator".into(),
        ));
    }
    let reordered = permute_subsystems(n, &BLOCK_ORDER)?;
    let m = &reordered.matrix;
    let tol = TOL.block_pattern;

    // Off-pattern entries must vanish.
    let on_pattern = |x: usize, y: usize| {
        x == y || (x, y) == (0, 3) || (x, y) == (3, 0)
    };
    for x in 0..4 {
        for y in 0..4 {
            if on_pattern(x, y) {
                continue;
            }
            for r in 0..4 {
                for c in 0..4 {
                    let v = m.get(x * 4 + r, y * 4 + c).norm();
                    if v > tol {
                        return Err(Error::StructureViolation {
                            row: x * 4 + r,
                            col: y * 4 + c,
                            value: v,
                            tol,
                        });
                    }
                }
            }
        }
    }

    let p0 = block_of(m, 0, 0);
    let p3 = block_of(m, 3, 3);
    let r1 = block_of(m, 1, 1);
    let r2 = block_of(m, 2, 2);
    let t03 = block_of(m, 0, 3);
    let t30 = block_of(m, 3, 0);
    for (label, a, b) in [("P", &p0, &p3), ("R", &r1, &r2), ("T", &t03, &t30)] {
        let dev = a.max_abs_diff(b);
        if dev > tol {
            return Err(Error::InvalidPovm(format!(
                "paired {label} blocks differ by {dev:.3e}"
            )));
        }
    }

    let extract = |label: &str, block: &ComplexMatrix| -> Result<BellDiagonal> {
        let op = BipartiteOperator::new(block.clone(), vec![2, 2], 1)?;
        let nu = pauli_twirl(&op)?;
        let dev = nu.reconstruct().matrix.max_abs_diff(block);
        if dev > tol {
            Err(Error::InvalidPovm(format!(
                "{label} block is not Bell diagonal (residual {dev:.3e})"
            )))
        } else {
            Ok(nu)
        }
    };
    Ok(SymmetricBlocks {
        p: extract("P", &p0)?,
        r: extract("R", &r1)?,
        t: extract("T", &t03)?,
    })
}

/// Rebuilds the 16-dimensional element from its blocks, in the
/// canonical A0 A1 B0 B1 layout.
pub fn reassemble_blocks(blocks: &SymmetricBlocks) -> Result<BipartiteOperator> {
    let p = blocks.p.reconstruct().matrix;
    let r = blocks.r.reconstruct().matrix;
    let t = blocks.t.reconstruct().matrix;
    let mut m = ComplexMatrix::zeros(16);
    let mut put = |x: usize, y: usize, b: &ComplexMatrix| {
        for rr in 0..4 {
            for cc in 0..4 {
                m.set(x * 4 + rr, y * 4 + cc, b.get(rr, cc));
            }
        }
    };
    put(0, 0, &p);
    put(3, 3, &p);
    put(1, 1, &r);
    put(2, 2, &r);
    put(0, 3, &t);
    put(3, 0, &t);
    let block_layout = BipartiteOperator::new(m, vec![2, 2, 2, 2], 2)?;
    // Invert BLOCK_ORDER to return to the canonical layout.
    let mut inv = [0usize; 4];
    for (i, &p) in BLOCK_ORDER.iter().enumerate() {
        inv[p] = i;
    }
    permute_subsystems(&block_layout, &inv)
}

/// Deterministic pseudo-random valid POVM on the chi space.
pub fn random_povm(n_outcomes: usize, rng: &mut impl rand::Rng) -> Povm {
    let dim = 16;
    let raw: Vec<ComplexMatrix> = (0..n_outcomes)
        .map(|_| {
            let g = ComplexMatrix::from_fn(dim, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            g.mul(&g.dagger())
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim);
    for m in &raw {
        total = total.add(m);
    }
    // total^{-1/2} via the spectral decomposition; total is PD almost surely.
    let spec = linalg::eig_hermitian(&total).expect("Gram sum is Hermitian");
    let n = dim;
    let v = &spec.eigenvectors;
    let inv_sqrt = ComplexMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|k| v.get(r, k) * (1.0 / spec.eigenvalues[k].sqrt()) * v.get(c, k).conj())
            .sum()
    });
    let elements = raw
        .into_iter()
        .map(|m| {
            let e = inv_sqrt.mul(&m).mul(&inv_sqrt);
            // Symmetrize away round-off.
            let e = e.add(&e.dagger()).scale(C64::new(0.5, 0.0));
            BipartiteOperator::new(e, vec![2, 2, 2, 2], 2).expect("chi-space layout")
        })
        .collect();
    Povm::new(elements).expect("normalized Gram construction is a POVM")
}

/// Deterministic pseudo-random PPT POVM on the chi space: a random POVM
/// mixed towards the uniform POVM just enough to certify every partial
/// transpose PSD (eigenvalue concavity gives the rigorous mixing weight).
pub fn random_ppt_povm(n_outcomes: usize, rng: &mut impl rand::Rng) -> Povm {
    let povm = random_povm(n_outcomes, rng);
    let dim = povm.dim();
    let uniform_weight = 1.0 / n_outcomes as f64;
    let mut worst: f64 = 0.0;
    for e in &povm.elements {
        let min = linalg::min_eigenvalue(&partial_transpose(e).matrix)
            .expect("PT of Hermitian is Hermitian");
        worst = worst.min(min);
    }
    // lambda_min((1-s) E^G + s I/n) >= (1-s) lambda_min(E^G) + s/n.
    let s = if worst >= 0.0 {
        0.0
    } else {
        let margin = 1e-6;
        (-worst + margin) / (-worst + uniform_weight)
    };
    let elements = povm
        .elements
        .iter()
        .map(|e| {
            let mixed = e
                .matrix
                .scale(C64::new(1.0 - s, 0.0))
                .add(&ComplexMatrix::identity(dim).scale(C64::new(s * uniform_weight, 0.0)));
            BipartiteOperator::new(mixed, e.factor_dims.clone(), e.cut).expect("same layout")
        })
        .collect();
    let out = Povm::new(elements).expect("mixing preserves the POVM structure");
    debug_assert!(out.is_ppt());
    out
}
