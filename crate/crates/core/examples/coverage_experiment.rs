//! A small coverage experiment: calibrated pairs across the fidelity range,
//! repeated estimates, and per-bin failure rates against the bounds.
//! Writes the full JSON record next to the printed table. The top bin holds
//! the F = 1 pair (identical states), whose error is exactly zero.
//!
//! ```bash
//! cargo run --release --example coverage_experiment
//! ```

use nqs_overlap::ansatz::AnsatzKind;
use nqs_overlap::bench::emit::{emit, ExperimentOutput, ExperimentResult, Format};
use nqs_overlap::bench::{run_bound_experiment, ExperimentSpec};

fn main() -> nqs_overlap::Result<()> {
    let spec = ExperimentSpec {
        sites: 10,
        samples: 4096,
        repetitions: 50,
        pairs: 8,
        bin_count: 10,
        ..ExperimentSpec::new(AnsatzKind::Rbm)
    };
    let (pairs, records, result) = run_bound_experiment(&spec)?;
    println!("{:>11} {:>6} {:>12} {:>12} {:>8}", "bin", "count", "mean |err|", "eps'", "fail");
    for row in &result.rows {
        let (rate, err, curve) = row.coverage(result.mode);
        println!(
            "[{:.1}, {:.1}) {:>6} {:>12.3e} {:>12.3e} {:>8.2}",
            row.bin_lower, row.bin_upper, row.count, err, curve, rate
        );
    }
    let path = std::env::temp_dir().join("coverage_experiment.json");
    let output = ExperimentOutput {
        spec,
        pairs,
        records,
        result: ExperimentResult::Bounds(result),
    };
    emit(&output, &path, Format::Json)?;
    println!("full output: {}", path.display());
    Ok(())
}
