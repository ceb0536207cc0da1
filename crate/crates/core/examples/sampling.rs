//! Exact autoregressive sampling and Metropolis sampling, each checked
//! against the enumerated distribution.
//!
//! ```bash
//! cargo run --release --example sampling
//! ```

use nqs_overlap::ansatz::{init_random, init_random_with, AnsatzKind, ArnnInit, Nqs};
use nqs_overlap::configspace::RandomStream;
use nqs_overlap::oracle::exact_probabilities;
use nqs_overlap::sampling::{sample, sample_metropolis_chains, ChainSettings, SampleBatch};

fn total_variation(batch: &SampleBatch, probs: &[f64]) -> f64 {
    let mut counts = vec![0usize; probs.len()];
    for c in batch.configurations() {
        counts[c.pack() as usize] += 1;
    }
    let n = batch.len() as f64;
    0.5 * counts.iter().zip(probs).map(|(&k, &p)| (k as f64 / n - p).abs()).sum::<f64>()
}

fn main() -> nqs_overlap::Result<()> {
    let settings = ChainSettings::default();
    let arnn = init_random_with(AnsatzKind::Arnn, 8, 1, ArnnInit::Symmetric)?;
    let rbm = init_random(AnsatzKind::Rbm, 8, 1)?;
    for (name, state) in [("arnn", &arnn as &dyn Nqs), ("rbm", &rbm)] {
        let probs = exact_probabilities(state)?;
        // `sample` picks the exact sampler whenever the state allows it
        let batch = sample(state, 100_000, &settings, &mut RandomStream::new(2))?;
        println!(
            "{name}: {:?} sampler, TV distance {:.4}, acceptance {:?}",
            batch.provenance(),
            total_variation(&batch, &probs),
            batch.acceptance_rate()
        );
    }

    // independent chains on their own substreams
    let chains = sample_metropolis_chains(&rbm, 25_000, 4, &settings, &RandomStream::new(3))?;
    let probs = exact_probabilities(&rbm)?;
    println!(
        "rbm, 4 chains: {} samples, TV distance {:.4}",
        chains.len(),
        total_variation(&chains, &probs)
    );
    Ok(())
}
