//! Named discrimination instances and deterministic random generators
//! used by the experiments.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{BipartiteOperator, ComplexMatrix, C64, ZERO};
use crate::states::{bell_state, chi_family, max_entangled, two_term_state, PauliIndex, StateVector};
use crate::{Error, Result};

use super::DiscriminationInstance;

/// The four ququad-ququad states with uniform priors.
pub fn chi_instance() -> DiscriminationInstance {
    DiscriminationInstance::uniform(chi_family()).expect("chi family is a valid instance")
}

/// The chi family, each tensored with `sqrt(1-p)|00> + sqrt(p)|11>` on
/// an extra qubit pair; uniform priors.
pub fn chi_with_two_term(p: f64) -> Result<DiscriminationInstance> {
    let extra = two_term_state(p)?;
    DiscriminationInstance::uniform(chi_family().iter().map(|c| c.tensor(&extra)).collect())
}

/// Three Bell states (indices 1..=3) with the resource
/// `sqrt(lambda0)|00> + sqrt(1-lambda0)|11>` attached; uniform priors.
pub fn threshold_instance(lambda0: f64) -> Result<DiscriminationInstance> {
    if !(0.5..=1.0).contains(&lambda0) {
        return Err(Error::OutOfRange(format!(
            "lambda0 must lie in [1/2, 1], got {lambda0}"
        )));
    }
    let alpha = two_term_state(1.0 - lambda0)?;
    let states: Vec<StateVector> = (1..4)
        .map(|i| bell_state(PauliIndex::new(i).unwrap()).tensor(&alpha))
        .collect();
    DiscriminationInstance::uniform(states)
}

/// The first `k` Bell states with uniform priors.
pub fn bell_instance(k: usize) -> Result<DiscriminationInstance> {
    if !(1..=4).contains(&k) {
        return Err(Error::OutOfRange(format!(
            "Bell instance needs 1..=4 states, got {k}"
        )));
    }
    DiscriminationInstance::uniform(
        (0..k)
            .map(|i| bell_state(PauliIndex::new(i as u8).unwrap()))
            .collect(),
    )
}

fn weyl_unitary(d: usize, a: usize, b: usize) -> ComplexMatrix {
    // X^a Z^b with X the cyclic shift and Z the clock.
    ComplexMatrix::from_fn(d, |r, c| {
        if r == (c + a) % d {
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (b * c) as f64 / d as f64)
        } else {
            ZERO
        }
    })
}

/// Haar-flavored unitary from Gram-Schmidt on a Gaussian matrix.
fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for i in 0..d {
        for j in 0..i {
            let proj: C64 = cols[j]
                .iter()
                .zip(&cols[i])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for k in 0..d {
                let adjust = proj * cols[j][k];
                cols[i][k] -= adjust;
            }
        }
        let norm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[i] {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(d, |r, c| cols[c][r])
}

/// `k` pairwise-orthogonal maximally entangled states in `d (x) d`:
/// random distinct Weyl labels conjugated by a random local basis
/// change (which preserves both orthogonality and maximal entanglement).
pub fn random_orthogonal_mes(d: usize, k: usize, rng: &mut impl Rng) -> Result<Vec<StateVector>> {
    if k > d * d {
        return Err(Error::OutOfRange(format!(
            "at most {} orthogonal maximally entangled states exist in {d}x{d}",
            d * d
        )));
    }
    let mut labels: Vec<(usize, usize)> = (0..d * d).map(|t| (t / d, t % d)).collect();
    // Fisher-Yates prefix.
    for i in 0..k {
        let j = rng.gen_range(i..labels.len());
        labels.swap(i, j);
    }
    let v = random_unitary(d, rng);
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    labels[..k]
        .iter()
        .map(|&(a, b)| {
            let u = v.mul(&weyl_unitary(d, a, b)).mul(&v.dagger());
            // (U (x) I)|Phi> has amplitudes U[r][j]/sqrt(d) at |r j>.
            let mut amps = vec![ZERO; d * d];
            for r in 0..d {
                for j in 0..d {
                    amps[r * d + j] = u.get(r, j) * inv_sqrt_d;
                }
            }
            StateVector::new(amps, vec![d, d], 1)
        })
        .collect()
}

/// Random operator `E` with `E >= 0`, `E^Gamma >= 0`, and `E|Phi> = |Phi>`:
/// a random PSD bump on the complement of `Phi`, mixed just enough
/// toward a reference PPT point (eigenvalue concavity makes the mixing
/// weight rigorous), then rotated by a random `V (x) conj(V)`, which
/// fixes `Phi` and preserves both positivity conditions.
pub fn random_ppt_fixing_phi(d: usize, rng: &mut impl Rng) -> Result<BipartiteOperator> {
    let phi = max_entangled(d)?;
    let phi_proj = phi.projector().matrix;
    let n = d * d;
    let comp = ComplexMatrix::identity(n).sub(&phi_proj);
    let g = ComplexMatrix::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let scale = rng.gen_range(0.05..1.5) / n as f64;
    let bump = comp
        .mul(&g.mul(&g.dagger()))
        .mul(&comp)
        .scale(C64::new(scale, 0.0));
    let e_raw = phi_proj.add(&bump);
    let e_raw = e_raw.add(&e_raw.dagger()).scale(C64::new(0.5, 0.0));

    // Reference PPT point fixing Phi: Phi + c0 (I - Phi).
    let c0 = 0.6;
    let reference = phi_proj.add(&comp.scale(C64::new(c0, 0.0)));
    let as_op = |m: ComplexMatrix| BipartiteOperator::new(m, vec![d, d], 1);

    let pt_min = crate::linalg::min_eigenvalue(
        &crate::linalg::partial_transpose(&as_op(e_raw.clone())?).matrix,
    )?;
    let mixed = if pt_min >= 0.0 {
        e_raw
    } else {
        let ref_pt_min = crate::linalg::min_eigenvalue(
            &crate::linalg::partial_transpose(&as_op(reference.clone())?).matrix,
        )?;
        // lambda_min((1-s)E + s Ref)^G >= (1-s) pt_min + s ref_pt_min = margin.
        let margin = 1e-6;
        let s = (-pt_min + margin) / (-pt_min + ref_pt_min);
        e_raw
            .scale(C64::new(1.0 - s, 0.0))
            .add(&reference.scale(C64::new(s, 0.0)))
    };

    // Random local rotation V (x) conj(V).
    let v = random_unitary(d, rng);
    let v_conj = ComplexMatrix::from_fn(d, |r, c| v.get(r, c).conj());
    let local = crate::linalg::kron(&v, &v_conj);
    let rotated = mixed.conjugate_by(&local);
    let rotated = rotated.add(&rotated.dagger()).scale(C64::new(0.5, 0.0));
    as_op(rotated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_eigenvalue, partial_transpose};
    use crate::sdp::trace_bound_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weyl_labels_give_orthogonal_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2usize, 3] {
            let states = random_orthogonal_mes(d, d + 1, &mut rng).unwrap();
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (a.inner(b).norm() - expect).abs() <= 1e-10,
                        "d={d} pair ({i},{j})"
                    );
                }
                // Maximally entangled: reduced state is I/d.
                let reduced = a.reduced_a().unwrap();
                let target = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
                assert!(reduced.max_abs_diff(&target) <= 1e-10);
            }
        }
    }

    #[test]
    fn random_ppt_operators_satisfy_preconditions_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3] {
            for _ in 0..20 {
                let e = random_ppt_fixing_phi(d, &mut rng).unwrap();
                assert!(min_eigenvalue(&e.matrix).unwrap() >= -1e-10);
                assert!(min_eigenvalue(&partial_transpose(&e).matrix).unwrap() >= -1e-10);
                let report = trace_bound_check(&e, d).unwrap();
                assert!(report.applicable, "{report:?}");
                assert_eq!(report.bound_satisfied, Some(true));
            }
        }
    }

    #[test]
    fn threshold_instance_layout() {
        let inst = threshold_instance(0.7).unwrap();
        assert_eq!(inst.n_outcomes(), 3);
        assert_eq!(inst.dim(), 16);
        assert_eq!(inst.states[0].factor_dims, vec![2, 2, 2, 2]);
        assert_eq!(inst.states[0].cut, 2);
        // The attached resource has Schmidt coefficients (0.7, 0.3).
        let sc = inst.vectors.as_ref().unwrap()[0].schmidt().unwrap();
        assert!((sc.coefficients()[0] - 0.35).abs() <= 1e-12);
    }
}
