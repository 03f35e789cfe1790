//! Acceptance suite: one test per headline criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them).
//!
//! Every tolerance is pinned in the assertions below. Randomized checks
//! run from fixed seeds, so the suite is deterministic end to end.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pptdisc::linalg::{self, partial_transpose};
use pptdisc::protocols;
use pptdisc::sdp::{self, instances, reduce::TwirlSpec, DiscriminationInstance, IpmOptions};
use pptdisc::states::chi_family;
use pptdisc::symmetry::{
    analytic_infeasibility, bell_pt_coeffs, random_ppt_povm, symmetric_form_residual,
    symmetrize_povm, BellDiagonal,
};

fn tight_opts() -> IpmOptions {
    IpmOptions {
        gap_tol: 1e-9,
        ..Default::default()
    }
}

#[test]
fn criterion_1_bell_coefficient_partial_transpose() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_formula_dev: f64 = 0.0;
    for _ in 0..10_000 {
        let nu = BellDiagonal::new([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ]);
        // Formula against entrywise partial transpose.
        let direct = partial_transpose(&nu.reconstruct()).matrix;
        let formula = bell_pt_coeffs(&nu).reconstruct().matrix;
        max_formula_dev = max_formula_dev.max(direct.max_abs_diff(&formula));
        assert!(
            max_formula_dev <= 1e-12,
            "PT coefficient formula deviates by {max_formula_dev:.3e}"
        );
        // Criterion against eigenvalue checks, with one shared tolerance.
        let m = nu.reconstruct();
        let psd = linalg::is_psd(&m.matrix, 1e-12).unwrap();
        let ppt = linalg::is_psd(&partial_transpose(&m).matrix, 1e-12).unwrap();
        assert_eq!(
            nu.is_psd_and_ppt(1e-12),
            psd && ppt,
            "criterion mismatch at nu = {:?}",
            nu.nu
        );
    }
    println!(
        "criterion 1: PASS — 10^4 tuples, formula within {max_formula_dev:.2e}, criterion exact ({:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_2_trace_bound_and_too_many_entangled_states() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut min_margin = f64::INFINITY;
    for d in [2usize, 3, 4] {
        for trial in 0..1000 {
            let e = instances::random_ppt_fixing_phi(d, &mut rng).unwrap();
            let report = sdp::trace_bound_check(&e, d).unwrap();
            assert!(
                report.applicable,
                "d={d} trial {trial}: preconditions missed ({report:?})"
            );
            assert_eq!(
                report.bound_satisfied,
                Some(true),
                "d={d} trial {trial}: Tr(E) = {} < d - 1e-9",
                report.trace
            );
            min_margin = min_margin.min(report.trace - d as f64);
        }
    }
    let mut certified = Vec::new();
    for d in [2usize, 3] {
        for _ in 0..2 {
            let states = instances::random_orthogonal_mes(d, d + 1, &mut rng).unwrap();
            let instance = DiscriminationInstance::uniform(states).unwrap();
            let result = sdp::optimal_ppt_success(&instance, &IpmOptions::default()).unwrap();
            assert!(
                result.certified_upper < 1.0 - 1e-3,
                "d={d}: certified upper {} not below 1 - 1e-3",
                result.certified_upper
            );
            certified.push((d, result.certified_upper));
        }
    }
    println!(
        "criterion 2: PASS — 3000 trace-bound operators (min margin {min_margin:.3e}), \
         certified p* {:?} ({:.2?})",
        certified,
        start.elapsed()
    );
}

#[test]
fn criterion_3_quadruple_sdp_route() {
    let start = Instant::now();
    let instance = instances::chi_instance();
    let result = sdp::optimal_ppt_success(&instance, &tight_opts()).unwrap();
    assert!(
        result.certified_upper <= 1.0 - 1e-3,
        "certified upper {} not below 1 - 1e-3",
        result.certified_upper
    );
    assert!(
        result.solver_gap <= 1e-7,
        "duality gap {} above 1e-7",
        result.solver_gap
    );
    // Independently verified dual certificate: the verifier only uses
    // eigenvalue checks on the original instance.
    assert!(
        result.certificate.q_min_eig >= -1e-9 && result.certificate.slack_min_eig >= -1e-9,
        "certificate needed repair: {:?}",
        result.certificate
    );
    assert!(result.certified_upper >= result.value - 1e-9);
    // Golden value, established by this artifact's own certified solves
    // (both the direct and the twirl-reduced route land on 7/8).
    assert!(
        (result.value - 0.875).abs() <= 1e-6,
        "optimum {} is not 7/8",
        result.value
    );
    let reduced = sdp::reduce::optimal_ppt_success_twirled(
        &instance,
        &TwirlSpec {
            pairs: vec![(0, 2), (1, 3)],
        },
        &tight_opts(),
    )
    .unwrap();
    assert!((reduced.value - result.value).abs() <= 1e-6);
    println!(
        "criterion 3: PASS — p*(S) = {:.9}, certified upper {:.9}, gap {:.2e} ({:.2?})",
        result.value,
        result.certified_upper,
        result.solver_gap,
        start.elapsed()
    );
}

#[test]
fn criterion_4_quadruple_analytic_route() {
    let start = Instant::now();
    let trace = analytic_infeasibility();
    for step in &trace.steps {
        assert_ne!(step.verdict, "FAILED", "exact step failed: {}", step.claim);
    }
    assert!(trace.contradiction_reached);
    let ledger = trace
        .forced_coefficients
        .clone()
        .expect("coefficients pinned");
    assert_eq!(
        (ledger.a0.as_str(), ledger.a1.as_str(), ledger.a2.as_str()),
        ("1/6", "1/2", "1/6"),
        "forced coefficients are not (1/6, 1/2, 1/6)"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let chi = chi_family();
    let priors = [0.25; 4];
    let mut max_success_drift: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    for _ in 0..100 {
        let povm = random_ppt_povm(4, &mut rng);
        let before = povm.success_probability(&chi, &priors);
        let symmetric = symmetrize_povm(&povm).unwrap();
        let after = symmetric.success_probability(&chi, &priors);
        max_success_drift = max_success_drift.max((before - after).abs());
        max_residual = max_residual.max(symmetric_form_residual(&symmetric).unwrap());
        assert!(max_success_drift <= 1e-9, "success drifted by {max_success_drift:.3e}");
        assert!(max_residual <= 1e-9, "invariance residual {max_residual:.3e}");
    }
    println!(
        "criterion 4: PASS — contradiction at (1/6, 1/2, 1/6); 100 POVMs symmetrized, \
         max success drift {max_success_drift:.2e}, max invariance residual {max_residual:.2e} ({:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_5_catalysis() {
    let start = Instant::now();
    let mut cases = 0;
    for input in 0..4 {
        let report = protocols::catalysis_discriminate(input).unwrap();
        assert_eq!(report.branch_count, 4, "input {input}");
        for leaf in report.tree.leaves() {
            assert_eq!(
                leaf.classification,
                vec![input],
                "input {input}: leaf classified {:?}",
                leaf.classification
            );
            assert!(
                (leaf.residual_fidelity - 1.0).abs() <= 1e-10,
                "input {input}: residual fidelity {}",
                leaf.residual_fidelity
            );
            cases += 1;
        }
    }
    assert_eq!(cases, 16);
    println!(
        "criterion 5: PASS — 16/16 branches classify exactly with the catalyst intact ({:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_6_multi_copy() {
    let start = Instant::now();
    assert_eq!(protocols::min_copies(0.3).unwrap(), 2);
    for msg in 0..16usize {
        let digits = [msg % 4, (msg / 4) % 4];
        let report = protocols::multi_copy_protocol(&digits, 0.3).unwrap();
        assert!(report.zero_error, "message {digits:?} misdecoded");
        assert_eq!(report.leaf_count, 16);
        assert!(report.conversion_certified);
    }
    for k in 1..=50u32 {
        let delta = 0.5 * k as f64 / 50.0;
        assert_eq!(
            protocols::min_copies(delta).unwrap(),
            protocols::least_copies_by_majorization(delta).unwrap(),
            "formula and majorization disagree at delta = {delta}"
        );
    }
    println!(
        "criterion 6: PASS — 16/16 two-copy messages decoded, copy formula matches \
         majorization on 50 grid points ({:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_7_perturbation_lemma() {
    use rayon::prelude::*;
    let start = Instant::now();
    // The recorded q = p*(S), re-established here with a tight gap.
    let base = sdp::reduce::optimal_ppt_success_twirled(
        &instances::chi_instance(),
        &TwirlSpec {
            pairs: vec![(0, 2), (1, 3)],
        },
        &tight_opts(),
    )
    .unwrap();
    let q = base.certified_upper;
    assert!((q - 0.875).abs() <= 1e-6, "recorded q = {q}");
    let headroom = (1.0 - q) * (1.0 - q);
    let eps_grid: Vec<f64> = (1..=20).map(|j| headroom * j as f64 / 21.0).collect();
    let results: Vec<(f64, f64)> = eps_grid
        .par_iter()
        .map(|&eps| {
            let r = protocols::one_shot_discrimination(eps, &IpmOptions::default()).unwrap();
            (eps, r.certified_upper)
        })
        .collect();
    for &(eps, upper) in &results {
        let (bound, indistinguishable) = protocols::lemma_perturbation_bound(q, eps).unwrap();
        assert!(indistinguishable, "eps = {eps} left the lemma's range");
        assert!(
            upper <= bound + 1e-6,
            "eps = {eps}: certified {upper} above q + sqrt(eps) = {bound}"
        );
        assert!(
            upper < 1.0 - 1e-4,
            "eps = {eps}: certified {upper} not strictly below 1 - 1e-4"
        );
    }
    let max_upper = results.iter().map(|&(_, u)| u).fold(0.0f64, f64::max);
    println!(
        "criterion 7: PASS — 20 perturbations of strength < (1-q)^2 stay below q + sqrt(eps); \
         largest certified value {max_upper:.6} ({:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_8_resource_threshold() {
    let start = Instant::now();
    let mut grid: Vec<f64> = (0..7).map(|k| 0.50 + 0.05 * k as f64).collect();
    grid.push(2.0 / 3.0);
    let sweep = sdp::threshold_sweep(&grid, &IpmOptions::default()).unwrap();
    for p in &sweep.points {
        if p.lambda0 <= 2.0 / 3.0 + 1e-12 {
            assert!(
                p.value >= 1.0 - 1e-5 && p.certified_upper >= 1.0 - 1e-5,
                "lambda0 = {}: p* = {} not 1 within 1e-5",
                p.lambda0,
                p.value
            );
            assert!(p.perfect, "lambda0 = {} not certified perfect", p.lambda0);
        }
        if p.lambda0 >= 0.70 - 1e-12 {
            assert!(
                p.certified_upper < 1.0 - 1e-3,
                "lambda0 = {}: certified upper {} not below 1 - 1e-3",
                p.lambda0,
                p.certified_upper
            );
        }
    }
    let (lo, hi) = sweep.crossing_bracket.expect("crossing must be bracketed");
    assert!(
        lo >= 0.66 - 1e-9 && hi <= 0.70 + 1e-9,
        "crossing bracket ({lo}, {hi}) escapes [0.66, 0.70]"
    );
    println!(
        "criterion 8: PASS — perfect through 2/3, imperfect from 0.70, crossing in ({lo:.4}, {hi:.4}) ({:.2?})",
        start.elapsed()
    );
}

/// The channel criterion, as stated: one-shot p* < 1 and two-shot exact
/// decoding of all 16 messages, both at delta = 0.3.
///
/// The two-shot half holds and is verified below. The one-shot half is
/// certifiably false at delta = 0.3: the solver returns an explicit PPT
/// POVM achieving success 1.000000000 (feasibility residuals ~1e-14,
/// eigenvalue floors ~1e-10) together with a matching dual bound, so
/// p*(S (x) beta(0.3)) = 1 exactly. The perturbation lemma only
/// protects delta < (1-q)^2 = 1/64 ~ 0.0156; certified solves bracket
/// the actual crossover in (0.12, 0.14), while two-shot decoding needs
/// (1-delta)^2 <= 1/2, i.e. delta >= 0.2929. No delta satisfies both
/// halves. The one-shot statement that does hold — for an attachment
/// weak enough that the family stays indistinguishable — is verified
/// here at delta = 0.01 before the as-stated clause is asserted and
/// honestly fails.
#[test]
fn criterion_9_channel() {
    let start = Instant::now();
    // Two-shot half at delta = 0.3: all 16 messages, zero error.
    let spec = protocols::ChannelSpec::new(0.3).unwrap();
    let two_shot = protocols::channel_experiment(&spec, 2).unwrap();
    match &two_shot.verdict {
        protocols::ChannelVerdict::MultiShot {
            messages,
            decoded,
            all_exact,
            bits,
        } => {
            assert_eq!(*messages, 16);
            assert_eq!(*decoded, 16);
            assert!(*all_exact);
            assert_eq!(*bits, 4);
        }
        other => panic!("expected a multi-shot verdict, got {other:?}"),
    }

    // The one-shot obstruction that does hold: an attachment inside
    // the lemma's range keeps the output family indistinguishable.
    let weak = protocols::ChannelSpec::new(0.01).unwrap();
    let one_shot_weak = protocols::channel_experiment(&weak, 1).unwrap();
    let weak_upper = match &one_shot_weak.verdict {
        protocols::ChannelVerdict::OneShot {
            certified_upper,
            below_two_bits,
            ..
        } => {
            assert!(
                *below_two_bits,
                "delta = 0.01 should be certifiably imperfect"
            );
            *certified_upper
        }
        other => panic!("expected a one-shot verdict, got {other:?}"),
    };

    // As stated: one-shot p* < 1 at delta = 0.3.
    let one_shot = protocols::channel_experiment(&spec, 1).unwrap();
    let (value, upper) = match &one_shot.verdict {
        protocols::ChannelVerdict::OneShot {
            optimal_success,
            certified_upper,
            ..
        } => (*optimal_success, *certified_upper),
        other => panic!("expected a one-shot verdict, got {other:?}"),
    };
    println!(
        "criterion 9: two-shot 16/16 exact at delta=0.3; one-shot certified < 1 at delta=0.01 \
         (upper {weak_upper:.6}); as-stated one-shot at delta=0.3 gives p* = {value:.9} ({:.2?})",
        start.elapsed()
    );
    assert!(
        upper < 1.0 - 1e-6,
        "criterion 9: FAIL — the as-stated one-shot clause is impossible: at delta = 0.3 a \
         verified PPT POVM achieves {value:.9} (certified upper {upper:.9}), so p* = 1. The \
         attachment is only guaranteed to keep the family indistinguishable for \
         delta < (1-q)^2 = 1/64; certified solves place the crossover in (0.12, 0.14), and \
         two-shot decoding needs delta >= 1 - 2^(-1/2) = 0.2929. The two requirements have \
         empty intersection; the weak-attachment statement passes above."
    );
}
