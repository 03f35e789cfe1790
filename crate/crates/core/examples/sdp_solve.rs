//! The solver's file interface: dump a discrimination SDP in the JSON
//! schema the `sdp-solve` subcommand reads, reload it, solve, and
//! inspect both sides of the certificate.
//!
//! ```bash
//! cargo run --example sdp_solve
//! ```

use pptdisc::sdp::{build_ppt_discrimination, instances, solve, IpmOptions, SdpProblem};

fn main() {
    // All four Bell states under PPT measurements: the trace bound caps
    // the success probability at d/k = 1/2, and the standard-basis
    // measurement achieves it, so the solver should land on 1/2 with
    // matching dual value.
    let instance = instances::bell_instance(4).unwrap();
    let problem = build_ppt_discrimination(&instance).unwrap();

    // The same JSON the CLI consumes: pptdisc sdp-solve --in problem.json
    let text = serde_json::to_string_pretty(&problem).unwrap();
    let path = std::env::temp_dir().join("pptdisc_example_problem.json");
    std::fs::write(&path, &text).unwrap();
    println!(
        "problem with {} blocks and {} matrix constraints written to {}",
        problem.blocks.len(),
        problem.constraints.len(),
        path.display()
    );

    let reloaded: SdpProblem = serde_json::from_str(&text).unwrap();
    let solution = solve(&reloaded, &IpmOptions::default()).unwrap();
    println!(
        "status {:?}: primal {:.9}, dual {:.9}, gap {:.2e}, iterations {}",
        solution.status,
        solution.primal_value,
        solution.dual_value,
        solution.duality_gap,
        solution.iterations
    );
    println!("(four Bell states cap at 1/2 under PPT measurements)");
}
