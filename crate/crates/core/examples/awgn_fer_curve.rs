//! FER/BER of a rate-1/2 code over AWGN, written as CSV.

use polar_sched::channel::construct_bhattacharyya;
use polar_sched::codec::Domain;
use polar_sched::sim::{simulate, write_csv, SimConfig};

fn main() -> polar_sched::Result<()> {
    let n = 10;
    let spec = construct_bhattacharyya(n, 1 << (n - 1), 0.5)?;
    let config = SimConfig {
        points: ["awgn:1", "awgn:1.5", "awgn:2", "awgn:2.5", "awgn:3"]
            .iter()
            .map(|p| p.parse())
            .collect::<Result<_, _>>()?,
        frames: 2000,
        seed: 1,
        domain: Domain::LlrMinSum,
        max_frame_errors: Some(100),
    };
    let rows = simulate(&spec, &config)?;
    write_csv(&mut std::io::stdout(), &rows, true)
}
