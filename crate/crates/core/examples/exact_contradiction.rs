//! The exact-rational route to indistinguishability: assuming a
//! symmetric PPT POVM distinguishes the quadruple, the coefficients are
//! forced to a single point, where completeness would need the identity
//! to dominate (4/3)(Psi_0 + Psi_1 + Psi_2). Every step is checked in
//! rational arithmetic; no tolerances anywhere.
//!
//! ```bash
//! cargo run --example exact_contradiction
//! ```

use pptdisc::symmetry::analytic_infeasibility;

fn main() {
    let trace = analytic_infeasibility();
    for (i, step) in trace.steps.iter().enumerate() {
        println!("step {i}: [{}] {}", step.verdict, step.claim);
        for input in &step.inputs {
            println!("         {} = {}", input.name, input.value);
        }
    }
    println!();
    if let Some(ledger) = &trace.forced_coefficients {
        println!(
            "forced coefficients: a0 = {}, a1 = {}, a2 = {}, b0 = {}, b1 = {}, b2 = {}",
            ledger.a0, ledger.a1, ledger.a2, ledger.b0, ledger.b1, ledger.b2
        );
    }
    println!("contradiction reached: {}", trace.contradiction_reached);
}
