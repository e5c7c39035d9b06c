//! Bits of storage needed to produce the schedule, offline vs online.

use polar_sched::schedule::{memory_bits, Storage};

fn main() -> polar_sched::Result<()> {
    println!("{:>3} {:>12} {:>14} {:>8}", "n", "N", "offline", "online");
    for n in [3, 5, 8, 10, 12, 16, 20, 24, 32] {
        println!(
            "{n:>3} {:>12} {:>14} {:>8}",
            1u64 << n,
            memory_bits(n, Storage::Offline)?,
            memory_bits(n, Storage::Online)?
        );
    }
    Ok(())
}
