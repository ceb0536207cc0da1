//! Saving a random ansatz to a parameter file and loading it back.
//!
//! ```bash
//! cargo run --example parameter_files
//! ```

use nqs_overlap::ansatz::io::{load, save};
use nqs_overlap::ansatz::{init_random, AnsatzKind, Nqs};
use nqs_overlap::configspace::SpinConfiguration;

fn main() -> nqs_overlap::Result<()> {
    let dir = std::env::temp_dir();
    for kind in [AnsatzKind::Rbm, AnsatzKind::Arnn] {
        let ansatz = init_random(kind, 12, 42)?;
        let path = dir.join(format!("{kind}-L12.params"));
        save(&path, &ansatz, Some(42))?;
        let (loaded, header) = load(&path)?;
        let s = SpinConfiguration::all_up(12)?;
        println!(
            "{kind}: {} parameters, hidden {}, depth {}, seed {:?}; log psi(all up) = {:.6} (saved {:.6}) -> {}",
            header.count,
            header.hidden,
            header.depth,
            header.seed,
            loaded.log_amplitude(&s),
            ansatz.log_amplitude(&s),
            path.display()
        );
        assert_eq!(loaded, ansatz);
    }
    Ok(())
}
