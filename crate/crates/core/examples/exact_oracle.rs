//! Exact reference values for a pair of states by full enumeration.
//!
//! ```bash
//! cargo run --example exact_oracle
//! ```

use nqs_overlap::ansatz::{AnsatzKind, ArnnInit};
use nqs_overlap::bench::generate_state_pair;

fn main() -> nqs_overlap::Result<()> {
    for kind in [AnsatzKind::Arnn, AnsatzKind::Rbm] {
        println!("{kind}, L = 10");
        for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let pair = generate_state_pair(kind, ArnnInit::Symmetric, 10, t, 7)?;
            let e = pair.exact;
            // Var Z = (N_psi / N_phi)(1 - F) holds for any pair
            let predicted = e.norm_ratio() * (1.0 - e.fidelity);
            println!(
                "  t = {t:3.1}  F = {:.6}  <phi|psi> = {:+.4}{:+.4}i  ln N_psi = {:+.3}  Var Z = {:.6e} (predicted {:.6e})",
                e.fidelity, e.overlap.re, e.overlap.im, e.log_norm_psi, e.var_z, predicted
            );
        }
    }
    Ok(())
}
