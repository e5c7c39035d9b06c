//! Partial sums of a decoded prefix: p/q composition against the closed-form index sets.

use polar_sched::dependency::{d_set, eval_h};

fn main() -> polar_sched::Result<()> {
    let prefix = [1u8, 0, 1, 1, 0, 1, 1, 1];
    println!("prefix {prefix:?}");
    for k in 1..=3 {
        for j in 1..=1u64 << k {
            let h = eval_h(j, k, &prefix)?;
            let sets: Vec<String> = (1..=h.len() as u64)
                .map(|a| d_set(j, k, a).map(|s| format!("{:?}", s.indices())))
                .collect::<Result<_, _>>()?;
            println!("h[{j},{k}] = {:?}  from {}", h.as_slice(), sets.join(" "));
        }
    }
    Ok(())
}
