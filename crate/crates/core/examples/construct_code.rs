//! Builds a code from the Bhattacharyya recursion and writes its JSON spec.

use polar_sched::channel::{bhattacharyya_params, construct_bhattacharyya};

fn main() -> polar_sched::Result<()> {
    let (n, k, z0) = (4, 8, 0.5);
    for (i, b) in bhattacharyya_params(n, z0)?.iter().enumerate() {
        println!("bit {:>2}: z = {:.6}", i + 1, b.z());
    }
    let mut spec = construct_bhattacharyya(n, k, z0)?;
    spec.set_frozen(1, 1)?;
    println!("{}", spec.to_json()?);
    Ok(())
}
