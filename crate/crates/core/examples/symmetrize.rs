//! Group-averaging a POVM into the symmetric form: invariance under the
//! pair Paulis, the phase family V(theta), and the W/U relabelings,
//! with the uniform-prior success probability preserved exactly.
//!
//! ```bash
//! cargo run --example symmetrize
//! ```

use pptdisc::states::chi_family;
use pptdisc::symmetry::{
    block_decompose, random_ppt_povm, symmetric_form_residual, symmetrize_povm,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chi = chi_family();
    let priors = [0.25; 4];

    let povm = random_ppt_povm(4, &mut rng);
    let before = povm.success_probability(&chi, &priors);
    println!("random PPT POVM, success before: {before:.12}");

    let symmetric = symmetrize_povm(&povm).unwrap();
    let after = symmetric.success_probability(&chi, &priors);
    println!("after symmetrization:            {after:.12}");
    println!(
        "invariance residual: {:.3e}, still PPT: {}",
        symmetric_form_residual(&symmetric).unwrap(),
        symmetric.is_ppt()
    );

    // The symmetric form is block structured: Bell-diagonal P, R, T
    // blocks in the (A1 B1)(A0 B0) ordering.
    println!("\nBell-diagonal blocks per element:");
    for (i, element) in symmetric.elements.iter().enumerate() {
        let blocks = block_decompose(element).unwrap();
        println!(
            "  N_{i}: P = {:?}\n        R = {:?}\n        T = {:?}",
            round4(blocks.p.nu),
            round4(blocks.r.nu),
            round4(blocks.t.nu)
        );
    }
}

fn round4(v: [f64; 4]) -> [f64; 4] {
    v.map(|x| (x * 1e4).round() / 1e4)
}
