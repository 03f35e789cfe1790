//! Partial transpose conventions and the Bell-coefficient shortcut.
//!
//! ```bash
//! cargo run --example partial_transpose
//! ```

use pptdisc::linalg::{eig_hermitian, partial_transpose};
use pptdisc::states::{bell_projector, PauliIndex};
use pptdisc::symmetry::{bell_pt_coeffs, BellDiagonal};

fn main() {
    // The partial transpose of a Bell projector flips exactly one
    // eigenvalue negative, which is what blocks PPT measurements from
    // treating entangled projectors as measurement elements.
    for i in 0..4u8 {
        let psi = bell_projector(PauliIndex::new(i).unwrap());
        let pt = partial_transpose(&psi);
        let eigs = eig_hermitian(&pt.matrix).unwrap().eigenvalues;
        println!(
            "Psi_{i}^Gamma eigenvalues: {:?}",
            eigs.iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>()
        );
    }

    // On Bell-diagonal operators the partial transpose acts on the four
    // coefficients alone: mu_i = Tr(M)/2 - nu_{3-i}.
    let nu = BellDiagonal::new([0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
    let mu = bell_pt_coeffs(&nu);
    println!("\nnu = {:?}", nu.nu);
    println!("mu = {:?} (coefficients of M^Gamma)", mu.nu);

    // And positivity of both M and M^Gamma collapses to a pair of
    // linear inequalities on the coefficients: 0 <= 2 nu_i <= Tr(M).
    println!(
        "M and M^Gamma PSD by the coefficient criterion: {}",
        nu.is_psd_and_ppt(1e-12)
    );
    let bell_alone = BellDiagonal::new([1.0, 0.0, 0.0, 0.0]);
    println!(
        "a lone Bell projector passes the same test:     {}",
        bell_alone.is_psd_and_ppt(1e-12)
    );
}
