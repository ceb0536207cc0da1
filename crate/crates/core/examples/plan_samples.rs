//! How many samples does a target precision need, and what do the bounds
//! promise at a given budget?
//!
//! ```bash
//! cargo run --example plan_samples
//! ```

use nqs_overlap::bounds::{median_delta_window, required_samples_normalized, BoundReport};

fn main() -> nqs_overlap::Result<()> {
    let (n, delta) = (1u64 << 16, 0.32);
    println!("bounds at n = {n}, delta = {delta}");
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "F", "eps", "eps'", "d_alpha", "median", "cheb<med");
    for k in 0..=10 {
        let f = k as f64 / 10.0;
        let r = BoundReport::new(f, n, delta)?;
        println!(
            "{f:>5.1} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10}",
            r.epsilon, r.epsilon_prime, r.delta_alpha, r.median_epsilon, r.chebyshev_tighter
        );
    }

    // one-sided radius 0.01 with 90% confidence
    let needed = required_samples_normalized(0.01, 0.1)?;
    println!("\nnormalized states, |Y1 - <phi|psi>| < 0.01 w.p. 0.9: n >= {needed}");

    let (lo, hi) = median_delta_window(0.25)?;
    println!("Chebyshev beats median of means for every F once delta is in [{lo:.5}, {hi:.4}]");
    Ok(())
}
