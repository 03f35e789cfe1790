//! The trace bound: any operator that is PSD together with its partial
//! transpose and fixes the maximally entangled state has trace at least
//! d — which caps how many maximally entangled states a PPT POVM can
//! tell apart.
//!
//! ```bash
//! cargo run --example trace_bound
//! ```

use pptdisc::sdp::{instances, optimal_ppt_success, trace_bound_check, DiscriminationInstance, IpmOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [2usize, 3, 4] {
        let mut min_margin = f64::INFINITY;
        for _ in 0..200 {
            let e = instances::random_ppt_fixing_phi(d, &mut rng).unwrap();
            let report = trace_bound_check(&e, d).unwrap();
            assert!(report.applicable && report.bound_satisfied == Some(true));
            min_margin = min_margin.min(report.trace - d as f64);
        }
        println!("d={d}: 200 random PPT operators fixing Phi, min Tr(E) - d = {min_margin:.6}");
    }

    // The bound forces k <= d: with k = d + 1 states the certified
    // optimum lands at d/k, well below 1.
    println!();
    for d in [2usize, 3] {
        let states = instances::random_orthogonal_mes(d, d + 1, &mut rng).unwrap();
        let instance = DiscriminationInstance::uniform(states).unwrap();
        let result = optimal_ppt_success(&instance, &IpmOptions::default()).unwrap();
        println!(
            "d={d}, k={}: certified optimum {:.6} (trace-bound cap d/k = {:.6})",
            d + 1,
            result.certified_upper,
            d as f64 / (d + 1) as f64
        );
    }
}
