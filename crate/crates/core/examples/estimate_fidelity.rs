//! Fidelity and overlap estimates next to the exact values and the
//! Chebyshev radii.
//!
//! ```bash
//! cargo run --release --example estimate_fidelity
//! ```

use nqs_overlap::ansatz::{AnsatzKind, ArnnInit};
use nqs_overlap::bench::calibrate_state_pair;
use nqs_overlap::bounds::{epsilon_normalized, epsilon_prime};
use nqs_overlap::configspace::RandomStream;
use nqs_overlap::estimator::{estimate_general, estimate_normalized};
use nqs_overlap::sampling::ChainSettings;

fn main() -> nqs_overlap::Result<()> {
    let (n, delta) = (16384usize, 0.32);
    let settings = ChainSettings::default();

    // normalized ARNN: one batch from |phi|^2, overlap = Y1
    let pair = calibrate_state_pair(AnsatzKind::Arnn, ArnnInit::Symmetric, 10, 0.6, (0.0, 1.0), 11)?;
    let r = estimate_normalized(&pair.psi, &pair.phi, n, &settings, &mut RandomStream::new(1))?;
    let eps = epsilon_normalized(pair.fidelity(), n as u64, delta)?;
    println!("arnn  F = {:.5}  F_hat = {:.5}", pair.fidelity(), r.fidelity);
    println!(
        "      |Y1 - <phi|psi>| = {:.2e}  (radius {eps:.2e} at delta = {delta})",
        (r.overlap.value - pair.exact.overlap).norm()
    );

    // unnormalized RBM: two batches, norms cancel in Re(Y1 Y2)
    let pair = calibrate_state_pair(AnsatzKind::Rbm, ArnnInit::Symmetric, 10, 0.6, (0.0, 1.0), 11)?;
    let r = estimate_general(&pair.psi, &pair.phi, n / 2, n / 2, &settings, &RandomStream::new(2))?;
    let eps = epsilon_prime(pair.fidelity(), n as u64, delta)?;
    println!("rbm   F = {:.5}  F_hat = {:.5}  Im(Y1 Y2) = {:+.1e}", pair.fidelity(), r.fidelity, r.fidelity_residual);
    println!(
        "      |F_hat - F| = {:.2e}  (radius {eps:.2e}), acceptance {:.2?}",
        (r.fidelity - pair.fidelity()).abs(),
        r.acceptance_rates
    );
    Ok(())
}
