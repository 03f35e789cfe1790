//! Pair-Pauli twirl reduction for discrimination SDPs.
//!
//! Twirling a POVM element over `sigma (x) sigma` on a qubit pair
//! projects it onto operators block-diagonal in that pair's Bell basis.
//! When every state of an instance is invariant under the twirl on a
//! set of disjoint (A-side, B-side) qubit pairs — which holds for all
//! the Bell-built families here — an optimal PPT POVM can be taken
//! twirled without loss: the twirl is an average over local unitaries
//! that fix every state and every prior, so it preserves feasibility,
//! the partial-transpose condition, and the objective.
//!
//! A twirled element decomposes as `sum_J PsiProj_J (x) X_J` over Bell
//! multi-indices `J`, and its partial transpose stays block diagonal in
//! the same decomposition (`Psi_j^Gamma = I/2 - Psi_{3-j}` is again
//! Bell diagonal). The reduced SDP therefore has one small block per
//! multi-index instead of one full-space block, which is what makes the
//! 64-dimensional instances cheap.
//!
//! Correctness does not rest on the reduction: the reduced solution is
//! lifted back to the full space, where the POVM residuals and the dual
//! certificate are re-verified on the original instance.

use crate::linalg::{strides, ComplexMatrix, C64, ZERO};
use crate::states::bell_state;
use crate::symmetry::{bell_pt_coeffs, BellDiagonal};
use crate::{Error, Result};

use super::{
    assemble_result, solve, BlockSpec, DiscriminationInstance, DiscriminationResult, IpmOptions,
    MatrixConstraint, MatrixMap, Objective, PtSpec, SdpProblem, SolveStatus,
};

/// Which qubit pairs to twirl: `(a_position, b_position)` factor indices
/// into the instance's tensor layout, A side first.
#[derive(Clone, Debug)]
pub struct TwirlSpec {
    pub pairs: Vec<(usize, usize)>,
}

struct Reduction {
    n_out: usize,
    n_j: usize,
    rest_dim: usize,
    rest_pt: Option<PtSpec>,
    /// Basis vector for (multi-index J, rest index r), full dimension.
    basis: Vec<Vec<C64>>,
    /// Bell-coefficient partial-transpose matrix, `c[j][m]`.
    pt_coeffs: [[f64; 4]; 4],
    /// Reduced states: `rho_blocks[i][J]` on the rest space.
    rho_blocks: Vec<Vec<ComplexMatrix>>,
}

impl Reduction {
    fn vec_index(&self, j: usize, r: usize) -> usize {
        j * self.rest_dim + r
    }

    /// `sum_{r,r'} B[r][r'] |v_{J,r}><v_{J,r'}|`.
    fn lift_block(&self, j: usize, block: &ComplexMatrix, out: &mut ComplexMatrix) {
        for r in 0..self.rest_dim {
            let vr = &self.basis[self.vec_index(j, r)];
            for rp in 0..self.rest_dim {
                let v = block.get(r, rp);
                if v == ZERO {
                    continue;
                }
                let vrp = &self.basis[self.vec_index(j, rp)];
                for (row, &a) in vr.iter().enumerate() {
                    if a == ZERO {
                        continue;
                    }
                    let va = v * a;
                    for (col, &b) in vrp.iter().enumerate() {
                        if b == ZERO {
                            continue;
                        }
                        out.add_assign_at(row, col, va * b.conj());
                    }
                }
            }
        }
    }

    fn lift_sum(&self, blocks: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(dim);
        for (j, block) in blocks.iter().enumerate() {
            self.lift_block(j, block, &mut out);
        }
        out
    }
}

fn build_reduction(instance: &DiscriminationInstance, spec: &TwirlSpec) -> Result<Reduction> {
    let dims = instance.states[0].factor_dims.clone();
    let cut = instance.states[0].cut;
    let n = instance.dim();
    let s = spec.pairs.len();
    if s == 0 {
        return Err(Error::OutOfRange("twirl needs at least one pair".into()));
    }
    let mut used = vec![false; dims.len()];
    for &(a, b) in &spec.pairs {
        for &p in &[a, b] {
            if p >= dims.len() || dims[p] != 2 {
                return Err(Error::Dimension(format!(
                    "twirl position {p} is not a qubit factor"
                )));
            }
            if used[p] {
                return Err(Error::Dimension(format!(
                    "twirl position {p} listed twice"
                )));
            }
            used[p] = true;
        }
        if a >= cut || b < cut {
            return Err(Error::Dimension(format!(
                "pair ({a},{b}) must have the first factor on party A and the second on party B"
            )));
        }
    }
    let rest_positions: Vec<usize> = (0..dims.len()).filter(|&p| !used[p]).collect();
    let rest_dims: Vec<usize> = rest_positions.iter().map(|&p| dims[p]).collect();
    let rest_dim: usize = rest_dims.iter().product::<usize>().max(1);
    let rest_a = rest_positions.iter().filter(|&&p| p < cut).count();
    let rest_pt = if rest_positions.is_empty() {
        None
    } else if rest_a == 0 || rest_a == rest_positions.len() {
        return Err(Error::Dimension(
            "untwirled factors must include both parties (or none)".into(),
        ));
    } else {
        Some(PtSpec {
            factor_dims: rest_dims.clone(),
            cut: rest_a,
        })
    };

    // Basis vectors |Psi_J> (x) |r>, in the instance's own factor order.
    let n_j = 4usize.pow(s as u32);
    let full_strides = strides(&dims);
    let rest_strides = strides(&rest_dims);
    let bell: Vec<Vec<C64>> = (0..4)
        .map(|i| bell_state(crate::states::PauliIndex::new(i as u8).unwrap()).amplitudes)
        .collect();
    let mut basis = Vec::with_capacity(n_j * rest_dim);
    for j_multi in 0..n_j {
        let j_digits: Vec<usize> = {
            let mut rem = j_multi;
            let mut d = vec![0usize; s];
            for t in (0..s).rev() {
                d[t] = rem % 4;
                rem /= 4;
            }
            d
        };
        for r in 0..rest_dim {
            let mut v = vec![ZERO; n];
            // enumerate pair sub-indices
            for pair_idx in 0..(1usize << (2 * s)) {
                let mut amp = C64::new(1.0, 0.0);
                let mut full = 0usize;
                for (t, &(a, b)) in spec.pairs.iter().enumerate() {
                    let sub = (pair_idx >> (2 * t)) & 0b11;
                    let (xa, yb) = (sub >> 1, sub & 1);
                    amp *= bell[j_digits[t]][xa * 2 + yb];
                    full += xa * full_strides[a] + yb * full_strides[b];
                }
                if amp == ZERO {
                    continue;
                }
                let mut rem = r;
                for (t, &p) in rest_positions.iter().enumerate() {
                    let digit = rem / rest_strides[t];
                    rem %= rest_strides[t];
                    full += digit * full_strides[p];
                }
                v[full] += amp;
            }
            basis.push(v);
        }
    }

    // Reduced state blocks and the invariance check.
    let mut rho_blocks = Vec::with_capacity(instance.n_outcomes());
    for (si, rho) in instance.states.iter().enumerate() {
        let mut blocks = Vec::with_capacity(n_j);
        for j in 0..n_j {
            let mut block = ComplexMatrix::zeros(rest_dim);
            let applied: Vec<Vec<C64>> = (0..rest_dim)
                .map(|rp| rho.matrix.apply(&basis[j * rest_dim + rp]))
                .collect();
            for r in 0..rest_dim {
                for rp in 0..rest_dim {
                    let val: C64 = basis[j * rest_dim + r]
                        .iter()
                        .zip(&applied[rp])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    block.set(r, rp, val);
                }
            }
            blocks.push(block);
        }
        let reduction_probe = Reduction {
            n_out: instance.n_outcomes(),
            n_j,
            rest_dim,
            rest_pt: rest_pt.clone(),
            basis: basis.clone(),
            pt_coeffs: [[0.0; 4]; 4],
            rho_blocks: Vec::new(),
        };
        let recon = reduction_probe.lift_sum(&blocks, n);
        let dev = recon.max_abs_diff(&rho.matrix);
        if dev > 1e-12 {
            return Err(Error::OutOfRange(format!(
                "state {si} is not invariant under the requested pair twirl (residual {dev:.3e})"
            )));
        }
        rho_blocks.push(blocks);
    }

    // c[j][m]: coefficient of Psi_m in Psi_j^Gamma, from the verified
    // Bell-coefficient formula.
    let mut pt_coeffs = [[0.0; 4]; 4];
    for (j, row) in pt_coeffs.iter_mut().enumerate() {
        let mut unit = [0.0; 4];
        unit[j] = 1.0;
        *row = bell_pt_coeffs(&BellDiagonal::new(unit)).nu;
    }

    Ok(Reduction {
        n_out: instance.n_outcomes(),
        n_j,
        rest_dim,
        rest_pt,
        basis,
        pt_coeffs,
        rho_blocks,
    })
}

fn digits4(mut v: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0usize; len];
    for t in (0..len).rev() {
        d[t] = v % 4;
        v /= 4;
    }
    d
}

fn reduced_problem(instance: &DiscriminationInstance, red: &Reduction) -> SdpProblem {
    let n_out = red.n_out;
    let n_j = red.n_j;
    let rd = red.rest_dim;
    let s = (red.n_j as f64).log(4.0).round() as usize;
    let x_id = |i: usize, j: usize| i * n_j + j;
    let y_id = |i: usize, m: usize| n_out * n_j + i * n_j + m;

    let mut blocks = Vec::with_capacity(2 * n_out * n_j);
    for i in 0..n_out {
        for j in 0..n_j {
            blocks.push(BlockSpec {
                label: format!("X{i}_{j}"),
                dim: rd,
            });
        }
    }
    for i in 0..n_out {
        for m in 0..n_j {
            blocks.push(BlockSpec {
                label: format!("Y{i}_{m}"),
                dim: rd,
            });
        }
    }

    let mut constraints = Vec::new();
    // Completeness per Bell multi-index.
    for j in 0..n_j {
        constraints.push(MatrixConstraint {
            terms: (0..n_out)
                .map(|i| MatrixMap {
                    block: x_id(i, j),
                    scale: 1.0,
                    pt: None,
                })
                .collect(),
            target: ComplexMatrix::identity(rd),
        });
    }
    // Partial-transpose links: Y_{i,M} = sum_J prod_t c[j_t][m_t] * X_{i,J}^Gamma_rest.
    for i in 0..n_out {
        for m in 0..n_j {
            let m_digits = digits4(m, s);
            let mut terms = Vec::with_capacity(n_j + 1);
            for j in 0..n_j {
                let j_digits = digits4(j, s);
                let coeff: f64 = j_digits
                    .iter()
                    .zip(&m_digits)
                    .map(|(&jt, &mt)| red.pt_coeffs[jt][mt])
                    .product();
                if coeff == 0.0 {
                    continue;
                }
                terms.push(MatrixMap {
                    block: x_id(i, j),
                    scale: coeff,
                    pt: red.rest_pt.clone(),
                });
            }
            terms.push(MatrixMap {
                block: y_id(i, m),
                scale: -1.0,
                pt: None,
            });
            constraints.push(MatrixConstraint {
                terms,
                target: ComplexMatrix::zeros(rd),
            });
        }
    }

    let objective = Objective {
        maximize: true,
        terms: (0..n_out)
            .flat_map(|i| {
                let p = instance.priors[i];
                red.rho_blocks[i]
                    .iter()
                    .enumerate()
                    .map(move |(j, block)| (x_id(i, j), block.scale(C64::new(p, 0.0))))
                    .collect::<Vec<_>>()
            })
            .collect(),
    };

    SdpProblem {
        blocks,
        constraints,
        objective,
    }
}

/// Certified optimal PPT discrimination through the pair-twirl
/// reduction. The reduced solution is lifted to the full space and the
/// certificate re-verified on the original instance, so the reduction
/// itself never has to be trusted.
pub fn optimal_ppt_success_twirled(
    instance: &DiscriminationInstance,
    spec: &TwirlSpec,
    opts: &IpmOptions,
) -> Result<DiscriminationResult> {
    let red = build_reduction(instance, spec)?;
    let problem = reduced_problem(instance, &red);
    let sol = solve(&problem, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!(
            "interior-point iteration stopped after {} iterations with residuals p={:.2e} d={:.2e}",
            sol.iterations, sol.primal_residual, sol.dual_residual
        )));
    }
    let n = instance.dim();
    let n_out = red.n_out;
    let n_j = red.n_j;
    // Lift the POVM.
    let elements: Vec<ComplexMatrix> = (0..n_out)
        .map(|i| red.lift_sum(&sol.primal_blocks[i * n_j..(i + 1) * n_j], n))
        .collect();
    // Lift the dual: completeness multipliers per J assemble -Y; the
    // link multipliers per (i, M) assemble Q_i.
    let y = red
        .lift_sum(&sol.constraint_multipliers[..n_j], n)
        .scale(C64::new(-1.0, 0.0));
    let q: Vec<ComplexMatrix> = (0..n_out)
        .map(|i| {
            let start = n_j + i * n_j;
            red.lift_sum(&sol.constraint_multipliers[start..start + n_j], n)
        })
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::instances;

    #[test]
    fn chi_reduction_reproduces_the_states() {
        let instance = instances::chi_instance();
        let spec = TwirlSpec {
            pairs: vec![(0, 2), (1, 3)],
        };
        let red = build_reduction(&instance, &spec).unwrap();
        assert_eq!(red.rest_dim, 1);
        assert_eq!(red.n_j, 16);
        // chi_i reduces to a single unit coefficient at its Bell pair.
        for (i, blocks) in red.rho_blocks.iter().enumerate() {
            let (a, b) = crate::states::CHI_PAIRS[i];
            for (j, block) in blocks.iter().enumerate() {
                let expect = if j == (a as usize) * 4 + (b as usize) {
                    1.0
                } else {
                    0.0
                };
                assert!(
                    (block.get(0, 0).re - expect).abs() <= 1e-12,
                    "chi_{i} block {j}"
                );
            }
        }
    }

    #[test]
    fn twirl_rejects_non_invariant_instances() {
        // A computational-basis product state is not pair-twirl invariant.
        let zero = crate::states::two_term_state(0.0).unwrap();
        let one = crate::states::two_term_state(1.0).unwrap();
        let instance = DiscriminationInstance::uniform(vec![zero, one]).unwrap();
        let spec = TwirlSpec {
            pairs: vec![(0, 1)],
        };
        assert!(build_reduction(&instance, &spec).is_err());
    }

    #[test]
    fn reduced_chi_solve_is_certified() {
        let instance = instances::chi_instance();
        let spec = TwirlSpec {
            pairs: vec![(0, 2), (1, 3)],
        };
        let result =
            optimal_ppt_success_twirled(&instance, &spec, &IpmOptions::default()).unwrap();
        // The chi family is not perfectly PPT distinguishable.
        assert!(result.certified_upper < 1.0 - 1e-3, "{result:?}");
        assert!(result.value <= result.certified_upper + 1e-9);
        assert!(result.sum_residual <= 1e-7);
        assert!(result.min_eig >= -1e-7 && result.min_eig_pt >= -1e-7);
    }
}
