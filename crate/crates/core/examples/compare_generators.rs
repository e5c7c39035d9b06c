//! Online, tree and recursive schedule generators side by side.

use std::time::Instant;

use polar_sched::schedule::{first_difference, Method};

fn main() -> polar_sched::Result<()> {
    for n in [4, 8, 12, 16, 20] {
        let mut line = format!("n={n:>2}");
        let mut reference = None;
        for method in Method::ALL {
            let start = Instant::now();
            let s = method.generate(n)?;
            line += &format!(
                "  {} {:>8.2} ms",
                method.name(),
                start.elapsed().as_secs_f64() * 1e3
            );
            match &reference {
                None => reference = Some(s),
                Some(r) => {
                    if let Some(m) = first_difference(r, &s) {
                        println!("mismatch at cc {}: {:?} vs {:?}", m.cc, m.left, m.right);
                    }
                }
            }
        }
        let len = reference.map_or(0, |s| s.len());
        println!("{line}  ({len} entries)");
    }
    Ok(())
}
