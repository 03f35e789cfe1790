//! Entanglement catalysis: one Bell pair lets the two parties identify
//! any of the four states locally, and the pair is returned intact —
//! every branch enumerated, nothing sampled.
//!
//! ```bash
//! cargo run --example catalysis
//! ```

use pptdisc::protocols::{catalysis_discriminate, BranchNode};

fn main() {
    for input in 0..4 {
        let report = catalysis_discriminate(input).unwrap();
        println!("prepared chi_{input}:");
        if let BranchNode::Measurement { label, outcomes } = &report.tree.root {
            println!("  {label}");
            for branch in outcomes {
                let leaves: Vec<String> = collect_leaves(branch.next.as_deref());
                println!(
                    "    outcome {} (p = {}): {}",
                    branch.outcome,
                    branch.exact_probability.as_deref().unwrap_or("?"),
                    leaves.join(", ")
                );
            }
        }
        println!(
            "  zero error: {}, catalyst fidelity: {:.12}\n",
            report.zero_error, report.min_residual_fidelity
        );
    }
}

fn collect_leaves(node: Option<&BranchNode>) -> Vec<String> {
    match node {
        None => vec![],
        Some(BranchNode::Leaf(leaf)) => vec![format!(
            "classified {:?} (fidelity {:.6})",
            leaf.classification, leaf.residual_fidelity
        )],
        Some(BranchNode::Measurement { outcomes, .. }) => outcomes
            .iter()
            .filter(|b| b.probability > 0.0)
            .flat_map(|b| {
                collect_leaves(b.next.as_deref())
                    .into_iter()
                    .map(move |s| format!("readout {} -> {s}", b.outcome))
            })
            .collect(),
    }
}
