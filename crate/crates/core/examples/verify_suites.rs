//! Run two property suites with small bounds and print their summaries.
//!
//! cargo run --release --example verify_suites

use rwb::harness::corpus::corpus;
use rwb::harness::{VerifyConfig, Workbench};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = VerifyConfig {
        seed: 7,
        max_size: 4,
        stages: 3,
        model_size: 3,
        corpus_bound: 3,
        hom_bound: 2,
        diagrams: 20,
        samples: 20,
        ..VerifyConfig::default()
    };
    let bench = Workbench::new(config, corpus());
    let suites = bench.run("stone,colimit")?;
    for s in &suites {
        println!("{}", s.summary_line());
    }
    assert!(suites.iter().all(|s| s.passed));
    Ok(())
}
