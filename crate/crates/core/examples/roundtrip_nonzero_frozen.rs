//! Noiseless encode/decode with frozen bits that are not all zero.

use polar_sched::channel::frame_rng;
use polar_sched::codec::{bits_to_hex, decode_sc, encode, noiseless_llrs, random_spec, Domain};
use rand::Rng;

fn main() -> polar_sched::Result<()> {
    let n = 10;
    let trials = 200;
    for t in 0..trials {
        let mut rng = frame_rng(42, t);
        let spec = random_spec(n, &mut rng, true)?;
        let msg: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
        let x = encode(&spec, &msg)?;
        let u = decode_sc(&spec, &noiseless_llrs(&x), Domain::LlrExact)?;
        if u != spec.assemble(&msg)? {
            println!("trial {t}: mismatch, message {}", bits_to_hex(&msg));
            std::process::exit(1);
        }
        if t < 3 {
            let ones = spec.frozen_values().values().filter(|&&b| b == 1).count();
            println!(
                "trial {t}: K = {}, {ones} frozen ones, codeword {}",
                spec.k(),
                bits_to_hex(&x)
            );
        }
    }
    println!("{trials} frames recovered exactly");
    Ok(())
}
