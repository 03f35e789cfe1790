//! Semidefinite programming for optimal PPT discrimination.
//!
//! Problems are stated over complex Hermitian blocks with matrix-valued
//! equality constraints, then compiled onto a real symmetric core: a
//! Hermitian `Z = X + iY` embeds as `[[X, -Y], [Y, X]]`, which doubles
//! dimensions, preserves the spectrum, and turns `Re<A, Z>` into half
//! the real inner product. Both the objective and the constraint data
//! carry the compensating factor, so values and dual multipliers read
//! naturally at the complex level.
//!
//! The discrimination builder models the partial-transpose constraint
//! `E_i^Gamma >= 0` as a separate PSD block tied to `E_i` by exact
//! entrywise equalities. Results come back with two independently
//! checkable sides: the returned POVM is a feasible lower bound (up to
//! its reported residuals), and a repaired dual certificate `(Y, Q_i)`
//! with `Q_i >= 0`, `Y >= p_i rho_i + Q_i^Gamma` proves the upper bound
//! `Tr Y` against every PPT POVM — a check that needs nothing from the
//! solver that produced it.

pub mod instances;
pub mod reduce;
pub mod solver;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, partial_transpose, BipartiteOperator, ComplexMatrix, C64, ONE};
use crate::states::{max_entangled, StateVector};
use crate::symmetry::Povm;
use crate::{Error, Result, TOL};

pub use solver::{IpmOptions, SolveStatus};
use solver::{ConstraintRow, RealSdp, SparseSym, SymMat};

/// One Hermitian PSD variable block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSpec {
    pub label: String,
    pub dim: usize,
}

/// Tensor layout needed to take a partial transpose of a block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtSpec {
    pub factor_dims: Vec<usize>,
    pub cut: usize,
}

/// `scale * X_block` or `scale * X_block^Gamma` as a constraint term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixMap {
    pub block: usize,
    pub scale: f64,
    pub pt: Option<PtSpec>,
}

/// `sum_t map_t(X) = target` (target Hermitian).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixConstraint {
    pub terms: Vec<MatrixMap>,
    pub target: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Objective {
    pub maximize: bool,
    /// `(block, coefficient)` pairs; value is `sum Re<coeff, X_block>`.
    pub terms: Vec<(usize, ComplexMatrix)>,
}

/// SDP over Hermitian blocks with linear equality constraints.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpProblem {
    pub blocks: Vec<BlockSpec>,
    pub constraints: Vec<MatrixConstraint>,
    pub objective: Objective,
}

#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Objective value of the primal iterate, in the problem's sense.
    pub primal_value: f64,
    pub dual_value: f64,
    /// Complementarity of the final iterate.
    pub duality_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub primal_blocks: Vec<ComplexMatrix>,
    /// One Hermitian multiplier per matrix constraint.
    pub constraint_multipliers: Vec<ComplexMatrix>,
    /// Dual slack per block; PSD at optimality.
    pub dual_slacks: Vec<ComplexMatrix>,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        for (ci, con) in self.constraints.iter().enumerate() {
            let d = con.target.dim();
            for term in &con.terms {
                let Some(block) = self.blocks.get(term.block) else {
                    return Err(Error::Dimension(format!(
                        "constraint {ci} references unknown block {}",
                        term.block
                    )));
                };
                if block.dim != d {
                    return Err(Error::Dimension(format!(
                        "constraint {ci}: block `{}` has dim {}, target has dim {d}",
                        block.label, block.dim
                    )));
                }
                if let Some(pt) = &term.pt {
                    let prod: usize = pt.factor_dims.iter().product();
                    if prod != block.dim {
                        return Err(Error::Dimension(format!(
                            "constraint {ci}: partial-transpose layout does not match block `{}`",
                            block.label
                        )));
                    }
                }
            }
            con.target.require_hermitian(TOL.hermiticity)?;
        }
        for (b, coeff) in &self.objective.terms {
            let Some(block) = self.blocks.get(*b) else {
                return Err(Error::Dimension(format!(
                    "objective references unknown block {b}"
                )));
            };
            if coeff.dim() != block.dim {
                return Err(Error::Dimension(
                    "objective coefficient dimension mismatch".into(),
                ));
            }
            coeff.require_hermitian(TOL.hermiticity)?;
        }
        Ok(())
    }
}

// --- complex <-> real embedding ----------------------------------------------

/// `[[X, -Y], [Y, X]] / 2` for Hermitian `Z = X + iY`; the half makes
/// real and complex inner products agree without extra bookkeeping.
fn embed_half(z: &ComplexMatrix) -> SymMat {
    let d = z.dim();
    let mut m = SymMat::zeros(2 * d);
    for r in 0..d {
        for c in 0..d {
            let v = z.get(r, c);
            m.set(r, c, 0.5 * v.re);
            m.set(d + r, d + c, 0.5 * v.re);
            m.set(r, d + c, -0.5 * v.im);
            m.set(d + r, c, 0.5 * v.im);
        }
    }
    m
}

fn embed_half_sparse(z: &ComplexMatrix) -> SparseSym {
    let d = z.dim();
    let mut out = SparseSym::default();
    for r in 0..d {
        let vr = z.get(r, r);
        out.push(r, r, 0.5 * vr.re);
        out.push(d + r, d + r, 0.5 * vr.re);
        for c in (r + 1)..d {
            let v = z.get(r, c);
            if v.re != 0.0 {
                out.push(r, c, 0.5 * v.re);
                out.push(d + r, d + c, 0.5 * v.re);
            }
            if v.im != 0.0 {
                out.push(r, d + c, -0.5 * v.im);
                out.push(c, d + r, 0.5 * v.im);
            }
        }
    }
    out
}

/// Reads the complex matrix back out of the embedding, averaging over
/// the embedding symmetry.
fn unembed(m: &SymMat) -> ComplexMatrix {
    let d = m.n / 2;
    ComplexMatrix::from_fn(d, |r, c| {
        let re = 0.5 * (m.get(r, c) + m.get(d + r, d + c));
        let im = 0.5 * (m.get(d + r, c) - m.get(r, d + c));
        C64::new(re, im)
    })
}

/// Hermitian basis elements of a `d x d` space, sparse, unnormalized:
/// `E_rr`, then `E_rc + E_cr` and `i E_rc - i E_cr` for `r < c`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in r..d {
            if r == c {
                let mut m = ComplexMatrix::zeros(d);
                m.set(r, r, ONE);
                out.push(m);
            } else {
                let mut re = ComplexMatrix::zeros(d);
                re.set(r, c, ONE);
                re.set(c, r, ONE);
                out.push(re);
                let mut im = ComplexMatrix::zeros(d);
                im.set(r, c, C64::new(0.0, 1.0));
                im.set(c, r, C64::new(0.0, -1.0));
                out.push(im);
            }
        }
    }
    out
}

fn apply_map(term: &MatrixMap, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mapped = match &term.pt {
        None => m.clone(),
        Some(spec) => {
            let op = BipartiteOperator::new(m.clone(), spec.factor_dims.clone(), spec.cut)?;
            partial_transpose(&op).matrix
        }
    };
    Ok(mapped.scale(C64::new(term.scale, 0.0)))
}

struct Compiled {
    real: RealSdp,
    /// For each matrix constraint: its basis and scalar row range.
    constraint_rows: Vec<(Vec<ComplexMatrix>, std::ops::Range<usize>)>,
    sign: f64,
}

fn compile(problem: &SdpProblem) -> Result<Compiled> {
    problem.validate()?;
    let sign = if problem.objective.maximize { -1.0 } else { 1.0 };
    let mut c: Vec<SymMat> = problem
        .blocks
        .iter()
        .map(|b| SymMat::zeros(2 * b.dim))
        .collect();
    for (b, coeff) in &problem.objective.terms {
        c[*b].add_scaled(&embed_half(coeff), sign);
    }
    let mut rows = Vec::new();
    let mut b_vec = Vec::new();
    let mut constraint_rows = Vec::new();
    for con in &problem.constraints {
        let d = con.target.dim();
        let basis = hermitian_basis(d);
        let start = rows.len();
        for basis_elem in &basis {
            let mut row = ConstraintRow::default();
            for term in &con.terms {
                // <B, scale X^G> = <scale B^G, X>: the partial transpose
                // is self-adjoint for the Hilbert-Schmidt inner product.
                let adj = apply_map(term, basis_elem)?;
                row.terms.push((term.block, embed_half_sparse(&adj)));
            }
            rows.push(row);
            b_vec.push(basis_elem.hs_inner(&con.target).re);
        }
        constraint_rows.push((basis, start..rows.len()));
    }
    Ok(Compiled {
        real: RealSdp {
            block_dims: problem.blocks.iter().map(|b| 2 * b.dim).collect(),
            c,
            rows,
            b: b_vec,
        },
        constraint_rows,
        sign,
    })
}

/// Solves the problem with the interior-point core and reads the complex
/// solution back out.
pub fn solve(problem: &SdpProblem, opts: &IpmOptions) -> Result<SdpSolution> {
    let compiled = compile(problem)?;
    let real_sol = solver::solve_real_sdp(&compiled.real, opts);
    let primal_blocks: Vec<ComplexMatrix> = real_sol.x.iter().map(unembed).collect();
    let dual_slacks: Vec<ComplexMatrix> = real_sol
        .s
        .iter()
        .map(|s| {
            // The solver slack embeds S_complex / 2.
            let mut t = s.clone();
            t.scale_in_place(2.0);
            unembed(&t)
        })
        .collect();
    let constraint_multipliers: Vec<ComplexMatrix> = compiled
        .constraint_rows
        .iter()
        .map(|(basis, range)| {
            let d = basis[0].dim();
            let mut acc = ComplexMatrix::zeros(d);
            for (basis_elem, k) in basis.iter().zip(range.clone()) {
                acc = acc.add(&basis_elem.scale(C64::new(real_sol.y[k], 0.0)));
            }
            acc
        })
        .collect();
    let primal_value = compiled.sign * real_sol.primal_obj;
    let dual_value = compiled.sign * real_sol.dual_obj;
    Ok(SdpSolution {
        status: real_sol.status,
        primal_value,
        dual_value,
        duality_gap: real_sol.gap,
        primal_residual: real_sol.primal_residual,
        dual_residual: real_sol.dual_residual,
        iterations: real_sol.iterations,
        primal_blocks,
        constraint_multipliers,
        dual_slacks,
    })
}

// --- discrimination instances --------------------------------------------------

/// States to discriminate, with prior probabilities.
#[derive(Clone, Debug)]
pub struct DiscriminationInstance {
    pub states: Vec<BipartiteOperator>,
    pub priors: Vec<f64>,
    /// Pure-state witnesses when available.
    pub vectors: Option<Vec<StateVector>>,
}

impl DiscriminationInstance {
    pub fn from_states(vectors: Vec<StateVector>, priors: Vec<f64>) -> Result<Self> {
        if vectors.is_empty() || vectors.len() != priors.len() {
            return Err(Error::Dimension(
                "need one prior per state, at least one state".into(),
            ));
        }
        let dim = vectors[0].dim();
        let layout = (vectors[0].factor_dims.clone(), vectors[0].cut);
        for v in &vectors {
            if v.dim() != dim || (v.factor_dims.clone(), v.cut) != layout {
                return Err(Error::Dimension(
                    "all states must share one tensor layout".into(),
                ));
            }
        }
        if priors.iter().any(|&p| p < 0.0) {
            return Err(Error::OutOfRange("priors must be nonnegative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > TOL.unit_norm {
            return Err(Error::OutOfRange(format!(
                "priors sum to {total}, expected 1"
            )));
        }
        let states = vectors.iter().map(|v| v.projector()).collect();
        Ok(DiscriminationInstance {
            states,
            priors,
            vectors: Some(vectors),
        })
    }

    pub fn uniform(vectors: Vec<StateVector>) -> Result<Self> {
        let n = vectors.len();
        Self::from_states(vectors, vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn n_outcomes(&self) -> usize {
        self.states.len()
    }

    pub(crate) fn pt_spec(&self) -> PtSpec {
        PtSpec {
            factor_dims: self.states[0].factor_dims.clone(),
            cut: self.states[0].cut,
        }
    }
}

/// Builds the PPT discrimination SDP: maximize `sum_i p_i Tr(E_i rho_i)`
/// over POVMs whose elements and their partial transposes are PSD. The
/// transposes live in their own blocks `F_i = E_i^Gamma`, linked by
/// entrywise equalities.
pub fn build_ppt_discrimination(instance: &DiscriminationInstance) -> Result<SdpProblem> {
    let n = instance.n_outcomes();
    let d = instance.dim();
    let pt = instance.pt_spec();
    let mut blocks = Vec::with_capacity(2 * n);
    for i in 0..n {
        blocks.push(BlockSpec {
            label: format!("E{i}"),
            dim: d,
        });
    }
    for i in 0..n {
        blocks.push(BlockSpec {
            label: format!("F{i}"),
            dim: d,
        });
    }
    let mut constraints = Vec::with_capacity(n + 1);
    constraints.push(MatrixConstraint {
        terms: (0..n)
            .map(|i| MatrixMap {
                block: i,
                scale: 1.0,
                pt: None,
            })
            .collect(),
        target: ComplexMatrix::identity(d),
    });
    for i in 0..n {
        constraints.push(MatrixConstraint {
            terms: vec![
                MatrixMap {
                    block: i,
                    scale: 1.0,
                    pt: Some(pt.clone()),
                },
                MatrixMap {
                    block: n + i,
                    scale: -1.0,
                    pt: None,
                },
            ],
            target: ComplexMatrix::zeros(d),
        });
    }
    let objective = Objective {
        maximize: true,
        terms: instance
            .states
            .iter()
            .zip(&instance.priors)
            .enumerate()
            .map(|(i, (rho, p))| (i, rho.matrix.scale(C64::new(*p, 0.0))))
            .collect(),
    };
    Ok(SdpProblem {
        blocks,
        constraints,
        objective,
    })
}

/// Outcome of checking an upper-bound certificate: `Q_i >= 0` together
/// with `Y >= p_i rho_i + Q_i^Gamma` implies, for every PPT POVM,
/// `sum_i p_i Tr(E_i rho_i) <= Tr(Y)`.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub trace_y: f64,
    /// Most negative eigenvalue among the `Q_i`.
    pub q_min_eig: f64,
    /// Most negative eigenvalue among the slacks `Y - p_i rho_i - Q_i^Gamma`.
    pub slack_min_eig: f64,
    /// Identity shift folded into the certified bound to absorb the
    /// residual negativity above.
    pub repair: f64,
    pub certified_upper: f64,
}

/// Checks a dual certificate from scratch (eigensolver only) and returns
/// the rigorous upper bound it proves.
pub fn verify_upper_bound(
    instance: &DiscriminationInstance,
    y: &ComplexMatrix,
    q: &[ComplexMatrix],
) -> Result<CertificateReport> {
    let d = instance.dim();
    if q.len() != instance.n_outcomes() || y.dim() != d {
        return Err(Error::Dimension("certificate shape mismatch".into()));
    }
    let pt = instance.pt_spec();
    let mut q_min: f64 = f64::INFINITY;
    let mut slack_min: f64 = f64::INFINITY;
    for (i, qi) in q.iter().enumerate() {
        q_min = q_min.min(linalg::min_eigenvalue(qi)?);
        let qi_pt = partial_transpose(&BipartiteOperator::new(
            qi.clone(),
            pt.factor_dims.clone(),
            pt.cut,
        )?)
        .matrix;
        let slack = y
            .sub(
                &instance.states[i]
                    .matrix
                    .scale(C64::new(instance.priors[i], 0.0)),
            )
            .sub(&qi_pt);
        slack_min = slack_min.min(linalg::min_eigenvalue(&slack)?);
    }
    let repair = (-slack_min).max(0.0) + (-q_min).max(0.0);
    let trace_y = y.trace().re;
    Ok(CertificateReport {
        trace_y,
        q_min_eig: q_min,
        slack_min_eig: slack_min,
        repair,
        certified_upper: trace_y + d as f64 * repair,
    })
}

/// Outcome of a certified discrimination solve.
#[derive(Clone, Debug, Serialize)]
pub struct DiscriminationResult {
    /// `sum_i p_i Tr(E_i rho_i)` achieved by the returned POVM.
    pub value: f64,
    /// Independent dual bound: no PPT POVM exceeds this.
    pub certified_upper: f64,
    pub solver_status: SolveStatus,
    pub solver_gap: f64,
    pub iterations: usize,
    /// POVM feasibility residuals of the returned primal.
    pub sum_residual: f64,
    pub min_eig: f64,
    pub min_eig_pt: f64,
    pub certificate: CertificateReport,
    #[serde(skip)]
    pub povm: Povm,
}

impl DiscriminationResult {
    /// Certified perfectly distinguishable within `tol`: the returned
    /// POVM reaches `1 - tol` with honest feasibility residuals.
    pub fn certifies_perfect(&self, tol: f64) -> bool {
        self.value >= 1.0 - tol
            && self.sum_residual <= 1e-6
            && self.min_eig >= -1e-6
            && self.min_eig_pt >= -1e-6
    }

    /// The certificate proves success cannot exceed `1 - margin`.
    pub fn certifies_imperfect(&self, margin: f64) -> bool {
        self.certified_upper < 1.0 - margin
    }
}

pub(crate) fn assemble_result(
    instance: &DiscriminationInstance,
    elements: Vec<ComplexMatrix>,
    y: ComplexMatrix,
    q: Vec<ComplexMatrix>,
    status: SolveStatus,
    gap: f64,
    iterations: usize,
) -> Result<DiscriminationResult> {
    let layout = instance.states[0].clone();
    let povm = Povm::new(
        elements
            .into_iter()
            .map(|m| {
                let herm = m.add(&m.dagger()).scale(C64::new(0.5, 0.0));
                BipartiteOperator::new(herm, layout.factor_dims.clone(), layout.cut)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let d = instance.dim();
    let mut sum = ComplexMatrix::zeros(d);
    let mut min_eig_val: f64 = f64::INFINITY;
    let mut min_eig_pt: f64 = f64::INFINITY;
    let mut value = 0.0;
    for (i, e) in povm.elements.iter().enumerate() {
        sum = sum.add(&e.matrix);
        min_eig_val = min_eig_val.min(linalg::min_eigenvalue(&e.matrix)?);
        min_eig_pt = min_eig_pt.min(linalg::min_eigenvalue(&partial_transpose(e).matrix)?);
        value += instance.priors[i] * e.matrix.hs_inner(&instance.states[i].matrix).re;
    }
    let sum_residual = sum.max_abs_diff(&ComplexMatrix::identity(d));
    let certificate = verify_upper_bound(instance, &y, &q)?;
    Ok(DiscriminationResult {
        value,
        certified_upper: certificate.certified_upper,
        solver_status: status,
        solver_gap: gap,
        iterations,
        sum_residual,
        min_eig: min_eig_val,
        min_eig_pt,
        certificate,
        povm,
    })
}

/// Certified optimal PPT discrimination, solved directly on the full
/// space.
pub fn optimal_ppt_success(
    instance: &DiscriminationInstance,
    opts: &IpmOptions,
) -> Result<DiscriminationResult> {
    let problem = build_ppt_discrimination(instance)?;
    let sol = solve(&problem, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!(
            "interior-point iteration stopped after {} iterations with residuals p={:.2e} d={:.2e}",
            sol.iterations, sol.primal_residual, sol.dual_residual
        )));
    }
    let n = instance.n_outcomes();
    let elements = sol.primal_blocks[..n].to_vec();
    // Multiplier of the completeness constraint gives -Y; the linking
    // multipliers give the Q_i (PSD as the F-block dual slacks).
    let y = sol.constraint_multipliers[0].scale(C64::new(-1.0, 0.0));
    let q: Vec<ComplexMatrix> = (0..n)
        .map(|i| sol.constraint_multipliers[1 + i].clone())
        .collect();
    assemble_result(
        instance,
        elements,
        y,
        q,
        sol.status,
        sol.duality_gap,
        sol.iterations,
    )
}

// --- trace bound ---------------------------------------------------------------

/// Report of the trace bound check on an operator fixing the maximally
/// entangled state.
#[derive(Clone, Debug, Serialize)]
pub struct TraceBoundReport {
    pub d: usize,
    pub trace: f64,
    pub min_eig: f64,
    pub min_eig_pt: f64,
    pub fixes_phi_residual: f64,
    /// All three preconditions hold within 1e-9.
    pub applicable: bool,
    /// `Tr(E) >= d - 1e-9`; only claimed when applicable.
    pub bound_satisfied: Option<bool>,
}

/// Checks `Tr(E) >= d` for `E, E^Gamma >= 0` with `E |Phi> = |Phi>`.
pub fn trace_bound_check(e: &BipartiteOperator, d: usize) -> Result<TraceBoundReport> {
    if e.dim() != d * d {
        return Err(Error::Dimension(format!(
            "operator dim {} is not {d}x{d}",
            e.dim()
        )));
    }
    e.matrix.require_hermitian(TOL.hermiticity)?;
    let tol = TOL.psd;
    let min_eig_val = linalg::min_eigenvalue(&e.matrix)?;
    let min_eig_pt = linalg::min_eigenvalue(&partial_transpose(e).matrix)?;
    let phi = max_entangled(d)?;
    let applied = e.matrix.apply(&phi.amplitudes);
    let fixes_phi_residual = applied
        .iter()
        .zip(&phi.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let applicable = min_eig_val >= -tol && min_eig_pt >= -tol && fixes_phi_residual <= tol;
    let trace = e.matrix.trace().re;
    Ok(TraceBoundReport {
        d,
        trace,
        min_eig: min_eig_val,
        min_eig_pt,
        fixes_phi_residual,
        applicable,
        bound_satisfied: applicable.then(|| trace >= d as f64 - 1e-9),
    })
}

// --- threshold sweep -------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdPoint {
    pub lambda0: f64,
    pub value: f64,
    pub certified_upper: f64,
    /// Certified perfectly distinguishable within 1e-5.
    pub perfect: bool,
    /// Certified strictly below 1 - 1e-3.
    pub imperfect: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdSweep {
    pub points: Vec<ThresholdPoint>,
    /// (largest perfect lambda0, smallest imperfect lambda0).
    pub crossing_bracket: Option<(f64, f64)>,
}

/// Solves the three-Bell-states-with-resource instance on a grid of
/// largest Schmidt coefficients and brackets where perfect PPT
/// discrimination stops being possible.
pub fn threshold_sweep(lambda0_grid: &[f64], opts: &IpmOptions) -> Result<ThresholdSweep> {
    use rayon::prelude::*;
    for &l in lambda0_grid {
        if !(0.5..=1.0).contains(&l) {
            return Err(Error::OutOfRange(format!(
                "lambda0 grid values must lie in [1/2, 1], got {l}"
            )));
        }
    }
    let mut grid = lambda0_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    let points: Result<Vec<ThresholdPoint>> = grid
        .par_iter()
        .map(|&lambda0| {
            let instance = instances::threshold_instance(lambda0)?;
            let spec = reduce::TwirlSpec {
                pairs: vec![(0, 2)],
            };
            let result = reduce::optimal_ppt_success_twirled(&instance, &spec, opts)?;
            Ok(ThresholdPoint {
                lambda0,
                value: result.value,
                certified_upper: result.certified_upper,
                perfect: result.certifies_perfect(1e-5),
                imperfect: result.certifies_imperfect(1e-3),
            })
        })
        .collect();
    let points = points?;
    let last_perfect = points
        .iter()
        .filter(|p| p.perfect)
        .map(|p| p.lambda0)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.max(l))));
    let first_imperfect = points
        .iter()
        .filter(|p| p.imperfect)
        .map(|p| p.lambda0)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.min(l))));
    let crossing_bracket = match (last_perfect, first_imperfect) {
        (Some(a), Some(b)) if a < b => Some((a, b)),
        _ => None,
    };
    Ok(ThresholdSweep {
        points,
        crossing_bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, PauliIndex};

    #[test]
    fn embedding_round_trips_and_matches_inner_products() {
        let z = ComplexMatrix::from_fn(3, |r, c| {
            if r == c {
                C64::new(r as f64 + 1.0, 0.0)
            } else {
                C64::new(
                    0.3 * (r as f64 - c as f64),
                    0.1 * (r + c) as f64 * if r < c { 1.0 } else { -1.0 },
                )
            }
        });
        let z = z.add(&z.dagger()).scale(C64::new(0.5, 0.0));
        let e = embed_half(&z);
        for r in 0..6 {
            for c in 0..6 {
                assert!((e.get(r, c) - e.get(c, r)).abs() <= 1e-15, "symmetry");
            }
        }
        let mut doubled = e.clone();
        doubled.scale_in_place(2.0);
        let back = unembed(&doubled);
        assert!(back.max_abs_diff(&z) <= 1e-15);
        // <2*M(A)/2, M(B)/2> = Re<A, B>
        let w = ComplexMatrix::identity(3);
        let ew = embed_half(&w);
        assert!((doubled.dot(&ew) - z.hs_inner(&w).re).abs() <= 1e-12);
    }

    #[test]
    fn sparse_embedding_agrees_with_dense() {
        let z = ComplexMatrix::from_fn(4, |r, c| {
            C64::new((r * 4 + c) as f64 * 0.1, (r as f64 - c as f64) * 0.2)
        });
        let z = z.add(&z.dagger()).scale(C64::new(0.5, 0.0));
        let dense = embed_half(&z);
        let sparse = embed_half_sparse(&z);
        let mut m = SymMat::zeros(8);
        for r in 0..8 {
            for c in 0..8 {
                m.set(r, c, ((r * 31 + c * 17) % 13) as f64 / 13.0);
            }
        }
        m.symmetrize();
        let sparse_dot: f64 = sparse
            .entries
            .iter()
            .map(|&(r, c, v)| {
                if r == c {
                    v * m.get(r, c)
                } else {
                    2.0 * v * m.get(r, c)
                }
            })
            .sum();
        assert!((sparse_dot - dense.dot(&m)).abs() <= 1e-12);
    }

    #[test]
    fn projector_objective_without_pt() {
        // max Tr(E Psi0) s.t. E + F = I: optimum 1.
        let psi0 = bell_state(PauliIndex::new(0).unwrap()).projector();
        let problem = SdpProblem {
            blocks: vec![
                BlockSpec {
                    label: "E".into(),
                    dim: 4,
                },
                BlockSpec {
                    label: "F".into(),
                    dim: 4,
                },
            ],
            constraints: vec![MatrixConstraint {
                terms: vec![
                    MatrixMap {
                        block: 0,
                        scale: 1.0,
                        pt: None,
                    },
                    MatrixMap {
                        block: 1,
                        scale: 1.0,
                        pt: None,
                    },
                ],
                target: ComplexMatrix::identity(4),
            }],
            objective: Objective {
                maximize: true,
                terms: vec![(0, psi0.matrix.clone())],
            },
        };
        let sol = solve(&problem, &IpmOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(
            (sol.primal_value - 1.0).abs() <= 1e-6,
            "{}",
            sol.primal_value
        );
        assert!((sol.dual_value - 1.0).abs() <= 1e-6);
        // For a maximization, the dual bounds from above.
        assert!(sol.primal_value <= sol.dual_value + 1e-9);
    }

    #[test]
    fn two_bell_states_are_ppt_distinguishable() {
        let states = vec![
            bell_state(PauliIndex::new(0).unwrap()),
            bell_state(PauliIndex::new(1).unwrap()),
        ];
        let instance = DiscriminationInstance::uniform(states).unwrap();
        let result = optimal_ppt_success(&instance, &IpmOptions::default()).unwrap();
        assert!((result.value - 1.0).abs() <= 1e-6, "value {}", result.value);
        assert!(result.certified_upper >= 1.0 - 1e-6);
        assert!(result.sum_residual <= 1e-7);
        assert!(result.min_eig >= -1e-7 && result.min_eig_pt >= -1e-7);
    }

    #[test]
    fn four_bell_states_cap_at_one_half() {
        let states: Vec<StateVector> = (0..4)
            .map(|i| bell_state(PauliIndex::new(i).unwrap()))
            .collect();
        let instance = DiscriminationInstance::uniform(states).unwrap();
        let result = optimal_ppt_success(&instance, &IpmOptions::default()).unwrap();
        // Frozen value: the trace bound caps success at d/k = 1/2, and
        // measuring both sides in the standard basis achieves it.
        assert!((result.value - 0.5).abs() <= 1e-6, "value {}", result.value);
        assert!(result.certified_upper <= 0.5 + 1e-6);
        assert!(result.certified_upper >= result.value - 1e-9);
    }

    #[test]
    fn trace_bound_examples() {
        let id = BipartiteOperator::new(ComplexMatrix::identity(4), vec![2, 2], 1).unwrap();
        let report = trace_bound_check(&id, 2).unwrap();
        assert!(report.applicable);
        assert_eq!(report.bound_satisfied, Some(true));
        assert!((report.trace - 4.0).abs() <= 1e-12);

        // E = Psi0 + Psi1 + Psi2: PPT, fixes Phi, trace 3 >= 2.
        let sum3 = {
            let mut m = ComplexMatrix::zeros(4);
            for i in 0..3u8 {
                m = m.add(&bell_state(PauliIndex::new(i).unwrap()).projector().matrix);
            }
            BipartiteOperator::new(m, vec![2, 2], 1).unwrap()
        };
        let report = trace_bound_check(&sum3, 2).unwrap();
        assert!(report.applicable, "{report:?}");
        assert_eq!(report.bound_satisfied, Some(true));
        assert!((report.trace - 3.0).abs() <= 1e-12);

        // E = Psi0 alone: not PPT, bound not applicable, trace 1 < 2.
        let psi0 = bell_state(PauliIndex::new(0).unwrap()).projector();
        let report = trace_bound_check(&psi0, 2).unwrap();
        assert!(!report.applicable);
        assert!(report.min_eig_pt < -0.4);
        assert_eq!(report.bound_satisfied, None);
        assert!(report.trace < 2.0);
    }
}
