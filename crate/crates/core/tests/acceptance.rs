//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::fmt::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use polar_sched::channel::construct_bhattacharyya;
use polar_sched::codec::{decode_sc, encode, noiseless_llrs, random_spec, Domain};
use polar_sched::dependency::{
    verify_closed_form, verify_stage_sharing, STAGE_SHARING_SOFT_TOLERANCE,
};
use polar_sched::kernels::{
    llr_f_exact, llr_f_minsum, sharing_factor, sharing_factor_debruijn, sharing_factor_naive, Llr,
};
use polar_sched::schedule::{memory_bits, Method, Storage};
use polar_sched::sim::{simulate, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_polar-sched");
const N8_SCHEDULE: &str = include_str!("fixtures/schedule_n3.txt");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(
        elapsed <= Duration::from_secs(limit_s),
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()),
    )
}

fn n8_schedule() -> Outcome {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args(["schedule", "--n", "3", "--method", "online"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(out.status.success(), format!("exit status {}", out.status))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    check(text == N8_SCHEDULE, format!("schedule differs:\n{text}"))?;
    let marks: Vec<usize> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| l.contains("->"))
        .map(|(cc, _)| cc + 1)
        .collect();
    check(
        marks == [4, 5, 7, 8, 11, 12, 14, 15],
        format!("decisions at {marks:?}"),
    )?;
    within(elapsed, 1)?;
    Ok(format!("15 entries, decisions at {marks:?}"))
}

fn generators() -> Outcome {
    let start = Instant::now();
    for n in 1..=10u32 {
        let online = Method::Online.generate(n).map_err(|e| e.to_string())?;
        check(
            online.len() == (2 << n) - 1,
            format!("n={n}: length {}", online.len()),
        )?;
        for m in [Method::Tree, Method::Recursive] {
            let other = m.generate(n).map_err(|e| e.to_string())?;
            check(other == online, format!("n={n}: online != {}", m.name()))?;
        }
    }
    within(start.elapsed(), 10)?;
    Ok("n = 1..10 identical, length 2N-1".into())
}

fn zfactor() -> Outcome {
    let start = Instant::now();
    for i in 2..=1u64 << 20 {
        let (a, b) = (sharing_factor_debruijn(i), sharing_factor_naive(i, 32));
        check(a.ok() == b.ok(), format!("i={i}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10_000 {
        let i = rng.random_range(2..=1u64 << 32);
        let (a, b) = (sharing_factor_debruijn(i), sharing_factor_naive(i, 32));
        check(a.ok() == b.ok(), format!("i={i}"))?;
    }
    for n in 1..=32 {
        let z = sharing_factor(1, n).map_err(|e| e.to_string())?.get();
        check(z == n, format!("z_1 = {z} for n={n}"))?;
    }
    within(start.elapsed(), 30)?;
    Ok("2..2^20 exhaustive, 10^4 random up to 2^32, z_1 = n".into())
}

fn memory() -> Outcome {
    for n in 1..=32u32 {
        let len = 1u64 << n;
        let oracle = (2 * len - 1) * (f64::from(2 * n + 1)).log2().ceil() as u64;
        let offline = memory_bits(n, Storage::Offline).map_err(|e| e.to_string())?;
        let online = memory_bits(n, Storage::Online).map_err(|e| e.to_string())?;
        check(
            offline == oracle,
            format!("n={n}: offline {offline}, expected {oracle}"),
        )?;
        check(online == 160, format!("n={n}: online {online}"))?;
    }
    let at = |n| memory_bits(n, Storage::Offline).unwrap();
    check(at(3) == 45 && at(10) == 10235, "n=3 / n=10 values")?;
    check(at(20) == 2_097_151 * 6, "n=20 value")?;
    Ok("offline 45 (n=3), 10235 (n=10), online 160".into())
}

fn closed_form() -> Outcome {
    let start = Instant::now();
    let r = verify_closed_form(5, 2).map_err(|e| e.to_string())?;
    check(r.passed, format!("{:?}", r.counterexample))?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{} prefixes, {} elements",
        r.prefixes, r.elements_checked
    ))
}

fn stage_sharing() -> Outcome {
    let start = Instant::now();
    let r = verify_stage_sharing(6, 50, 6).map_err(|e| e.to_string())?;
    check(r.passed, format!("{:?}", r.counterexample))?;
    check(
        r.max_relative_soft_error <= STAGE_SHARING_SOFT_TOLERANCE,
        format!("soft error {}", r.max_relative_soft_error),
    )?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{} frames, {} bits, max relative soft error {:e}",
        r.frames, r.bits_checked, r.max_relative_soft_error
    ))
}

fn roundtrip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut nonzero = 0;
    for t in 0..1000 {
        let spec = random_spec(10, &mut rng, true).map_err(|e| e.to_string())?;
        nonzero += usize::from(spec.frozen_values().values().any(|&b| b == 1));
        let msg: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
        let x = encode(&spec, &msg).map_err(|e| e.to_string())?;
        let u =
            decode_sc(&spec, &noiseless_llrs(&x), Domain::LlrMinSum).map_err(|e| e.to_string())?;
        check(u == spec.assemble(&msg).unwrap(), format!("trial {t}"))?;
    }
    check(
        nonzero == 1000,
        format!("only {nonzero} specs had a nonzero frozen bit"),
    )?;
    within(start.elapsed(), 60)?;
    Ok("1000/1000 at n=10 with nonzero frozen bits".into())
}

fn minsum_relation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100_000 {
        let a = Llr::new(rng.random_range(-10.0..=10.0)).unwrap();
        let b = Llr::new(rng.random_range(-10.0..=10.0)).unwrap();
        let exact = llr_f_exact(a, b).get();
        let ms = llr_f_minsum(a, b).get();
        if exact != 0.0 && ms != 0.0 {
            check(
                exact.signum() == ms.signum(),
                format!("sign at ({}, {})", a.get(), b.get()),
            )?;
        }
        check(
            exact.abs() <= ms.abs(),
            format!("magnitude at ({}, {})", a.get(), b.get()),
        )?;
    }
    Ok("10^5 pairs".into())
}

fn domain_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in 0..200 {
        let n = 1 + t % 6;
        let spec = random_spec(n, &mut rng, true).map_err(|e| e.to_string())?;
        let llr: Vec<f64> = (0..1 << n)
            .map(|_| rng.random_range(-20.0..=20.0))
            .collect();
        let lr: Vec<f64> = llr.iter().map(|v| v.exp()).collect();
        let a = decode_sc(&spec, &lr, Domain::Lr).map_err(|e| format!("frame {t}: {e}"))?;
        let b = decode_sc(&spec, &llr, Domain::LlrExact).map_err(|e| format!("frame {t}: {e}"))?;
        check(a == b, format!("frame {t} (n={n})"))?;
    }
    Ok("200 frames, n = 1..6".into())
}

fn fer_sanity() -> Outcome {
    let start = Instant::now();
    let spec = construct_bhattacharyya(10, 512, 0.5).map_err(|e| e.to_string())?;
    let config = SimConfig {
        points: ["awgn:1", "awgn:2", "awgn:3"]
            .iter()
            .map(|p| p.parse().unwrap())
            .collect(),
        frames: 2000,
        seed: 10,
        domain: Domain::LlrMinSum,
        max_frame_errors: Some(100),
    };
    let rows = simulate(&spec, &config).map_err(|e| e.to_string())?;
    let mut detail = String::new();
    for r in &rows {
        let _ = write!(
            detail,
            "{} FER {:.3e} ({}/{}); ",
            r.param, r.fer, r.frame_err, r.frames
        );
        check(
            r.frames == 2000 || r.frame_err == 100,
            format!("{} stopped early", r.param),
        )?;
    }
    check(
        rows.windows(2).all(|w| w[1].fer < w[0].fer),
        format!("not strictly decreasing: {detail}"),
    )?;
    within(start.elapsed(), 300)?;
    Ok(detail.trim_end_matches("; ").to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec_path = dir.path().join("spec.json");
    let spec = construct_bhattacharyya(8, 128, 0.5).map_err(|e| e.to_string())?;
    std::fs::write(&spec_path, spec.to_json().unwrap()).map_err(|e| e.to_string())?;
    let max = std::thread::available_parallelism()
        .map_or(8, |n| n.get())
        .max(4);
    let run = |threads: usize| -> Result<Vec<u8>, String> {
        let out = Command::new(BIN)
            .env("POLAR_SCHED_THREADS", threads.to_string())
            .args(["simulate", "--spec"])
            .arg(&spec_path)
            .args([
                "--channel",
                "awgn:1",
                "--channel",
                "awgn:2",
                "--channel",
                "bsc:0.04",
            ])
            .args(["--frames", "1500", "--seed", "11"])
            .output()
            .map_err(|e| e.to_string())?;
        check(
            out.status.success(),
            String::from_utf8_lossy(&out.stderr).to_string(),
        )?;
        Ok(out.stdout)
    };
    let first = run(max)?;
    let second = run(max)?;
    let single = run(1)?;
    check(first == second, "two runs at full parallelism differ")?;
    check(first == single, "full parallelism differs from one worker")?;
    Ok(format!(
        "{} bytes identical across 2 runs at {max} workers and 1 run at 1 worker",
        first.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("N = 8 schedule", n8_schedule),
        ("generator equivalence", generators),
        ("sharing-factor oracle", zfactor),
        ("memory accounting", memory),
        ("partial-sum closed form", closed_form),
        ("stage sharing", stage_sharing),
        ("round trip with nonzero frozen bits", roundtrip),
        ("min-sum / exact relation", minsum_relation),
        ("LR / LLR domain equivalence", domain_equivalence),
        ("FER sanity", fer_sanity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (idx, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", idx + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", idx + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
