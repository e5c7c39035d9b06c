//! Prints the N = 8 decoding schedule with the sharing factor of each bit.

use polar_sched::kernels::sharing_factor;
use polar_sched::schedule::OnlineSchedule;

fn main() -> polar_sched::Result<()> {
    let n = 3;
    println!(" cc  entry  decision");
    for (cc, step) in OnlineSchedule::new(n)?.enumerate() {
        let mark = match step.emit {
            Some(i) => format!("u{i}  (z = {})", sharing_factor(i, n)?.get()),
            None => String::new(),
        };
        println!("{:>3}  {:<6} {mark}", cc + 1, step.entry.to_string());
    }
    Ok(())
}
