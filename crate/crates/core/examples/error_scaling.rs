//! Mean fidelity error against the sample count at fixed fidelity, with a
//! log-log fit of the slope.
//!
//! ```bash
//! cargo run --release --example error_scaling
//! ```

use nqs_overlap::ansatz::AnsatzKind;
use nqs_overlap::bench::{run_scaling_experiment, ExperimentSpec};

fn main() -> nqs_overlap::Result<()> {
    let spec = ExperimentSpec {
        sites: 10,
        repetitions: 40,
        pairs: 4,
        sample_grid: (8..=14).map(|k| 1usize << k).collect(),
        ..ExperimentSpec::mid_fidelity(AnsatzKind::Arnn)
    };
    let (_, _, result) = run_scaling_experiment(&spec)?;
    for row in &result.rows {
        println!(
            "n = {:>6}  mean |F_hat - F| = {:.3e} ± {:.1e}  bound {:.3e}",
            row.samples, row.mean_abs_fidelity_error, row.standard_error, row.fidelity_bound
        );
    }
    if let Some(fit) = result.fit {
        println!("slope {:.3} (1/sqrt(n) gives -0.5)", fit.slope);
    }
    Ok(())
}
