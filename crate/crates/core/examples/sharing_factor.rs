//! Sharing factors from the De Bruijn table and the stage selection rules.

use polar_sched::kernels::{sharing_factor, sharing_factor_debruijn, sharing_factor_naive};
use polar_sched::schedule::{
    per_bit_subschedule, select_gamma, select_gamma_parity, select_gamma_prior,
};

fn main() -> polar_sched::Result<()> {
    for i in [2u64, 3, 5, 9, 17, 1 << 20, (1 << 31) + 1, 1 << 32] {
        let fast = sharing_factor_debruijn(i)?.get();
        let slow = sharing_factor_naive(i, 32)?.get();
        println!("i = {i:>10}  z = {fast:>2}  (shift loop {slow})");
    }

    let n = 4;
    println!("\nper-bit sub-schedules, N = {}", 1 << n);
    for i in 1..=1u64 << n {
        let z = sharing_factor(i, n)?;
        let ops: Vec<String> = per_bit_subschedule(i, n)?
            .iter()
            .map(|e| e.to_string())
            .collect();
        let agree = (0..=z.get().min(n - 1)).all(|k| {
            let op = select_gamma(i, k, z).ok();
            op == Some(select_gamma_prior(i, k)) && op == Some(select_gamma_parity(i, k))
        });
        println!(
            "u{i:<3} z={}  {:<20} rules agree: {agree}",
            z.get(),
            ops.join(" ")
        );
    }
    Ok(())
}
