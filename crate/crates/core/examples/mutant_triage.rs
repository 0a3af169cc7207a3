//! Classify every catalog mutant on the probe suite.
//!
//! cargo run --example mutant_triage

use metamorph::recognizer::{classify_mutant, default_probes, Mutant};

fn main() {
    let probes = default_probes();
    for &m in Mutant::ALL {
        let d = m.descriptor();
        let class = format!("{:?}", classify_mutant(m, &probes));
        let (operator, component) = (format!("{:?}", d.operator), format!("{:?}", d.component));
        println!(
            "{:<10} {operator:<20} {component:<10} {class:<12} {}",
            d.id, d.description
        );
    }
}
