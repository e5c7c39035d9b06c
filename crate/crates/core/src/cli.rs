//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check or round trip failed, 2 bad usage or
//! unusable input.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{construct_bhattacharyya, frame_rng, ChannelPoint};
use crate::codec::{self, bits_to_hex, encode, noiseless_llrs, CodeSpec, Domain, ScDecoder};
use crate::dependency::{self, DEFAULT_VERIFY_SEED, MAX_VERIFY_LOG2_LEN, STAGE_SHARING_TRIALS};
use crate::error::{Error, Result};
use crate::kernels::{self, MAX_LOG2_LEN};
use crate::schedule::format::{write_steps, Format};
use crate::schedule::{
    first_difference, generate_online, memory_bits, Method, OnlineSchedule, Op, Schedule,
    ScheduleEntry, Storage, MAX_OFFLINE_LOG2_LEN,
};
use crate::sim::{self, SimConfig, DEFAULT_MAX_FRAME_ERRORS};

/// Environment variable capping the number of simulation workers.
pub const THREADS_ENV: &str = "POLAR_SCHED_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "polar-sched",
    version,
    about = "Polar SC decoding schedules and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Online,
    Tree,
    Recursive,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Online => Method::Online,
            MethodArg::Tree => Method::Tree,
            MethodArg::Recursive => Method::Recursive,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Lr,
    LlrExact,
    LlrMinsum,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Domain {
        match d {
            DomainArg::Lr => Domain::Lr,
            DomainArg::LlrExact => Domain::LlrExact,
            DomainArg::LlrMinsum => Domain::LlrMinSum,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FrozenArg {
    /// Random frozen values, at least one of them 1.
    Random,
    Ones,
    Zeros,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the decoding schedule for N = 2^n.
    Schedule {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_LOG2_LEN as i64))]
        n: u32,
        #[arg(long, value_enum, default_value = "online")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Check that the online, tree and recursive generators agree.
    ScheduleCompare {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_OFFLINE_LOG2_LEN as i64))]
        n: u32,
        /// Corrupt the online schedule at this clock cycle.
        #[arg(long, hide = true)]
        inject_fault: Option<usize>,
    },
    /// Check the table-based sharing factor against a shift loop.
    Zfactor {
        /// Upper end of the check range.
        #[arg(long, default_value_t = 1u64 << 32)]
        check_upto: u64,
        /// Random samples above 2^20.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print z_i for these indices.
        #[arg(long = "index")]
        indices: Vec<u64>,
        /// Code length exponent used for i = 1.
        #[arg(long, default_value_t = MAX_LOG2_LEN)]
        n: u32,
    },
    /// Schedule storage of the offline generators and the online generator.
    Memory {
        #[arg(long, required = true, value_parser = clap::value_parser!(u32).range(1..=MAX_LOG2_LEN as i64))]
        n: Vec<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Brute-force checks of the partial-sum closed form and stage sharing.
    VerifyDeps {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_VERIFY_LOG2_LEN as i64))]
        n_max: u32,
        #[arg(long, default_value_t = STAGE_SHARING_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_VERIFY_SEED)]
        seed: u64,
    },
    /// Build a code spec from the Bhattacharyya recursion of an erasure channel.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=codec::MAX_CODE_LOG2_LEN as i64))]
        n: u32,
        #[arg(long)]
        k: usize,
        /// Erasure probability of the design channel.
        #[arg(long, default_value_t = 0.5)]
        z0: f64,
        /// Set frozen bits, as `index=bit`.
        #[arg(long = "frozen", value_parser = parse_frozen)]
        frozen: Vec<(usize, u8)>,
        /// Set every frozen bit to 1.
        #[arg(long, conflicts_with = "frozen")]
        frozen_ones: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Monte-Carlo BER/FER over one or more operating points.
    ///
    /// Channels are `bsc:<p>` or `awgn:<Eb/N0 dB>`. For AWGN the noise
    /// variance is sigma^2 = 1 / (2 R 10^(Eb/N0 / 10)) with R = K/N.
    /// Output columns: param,frames,bit_err,frame_err,ber,fer,seconds,seed.
    /// The seconds column is filled only with --timing.
    Simulate {
        /// Code spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Operating point; repeat for several.
        #[arg(long = "channel", required = true)]
        channels: Vec<String>,
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        frames: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "llr-minsum")]
        domain: DomainArg,
        /// Stop a point after this many frame errors; 0 disables.
        #[arg(long, default_value_t = DEFAULT_MAX_FRAME_ERRORS)]
        max_errors: u64,
        #[arg(long)]
        json: bool,
        /// Record wall-clock seconds per point (output no longer reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Noiseless encode/decode of random codes with nonzero frozen bits.
    Roundtrip {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=codec::MAX_CODE_LOG2_LEN as i64))]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        frozen: FrozenArg,
        #[arg(long, value_enum, default_value = "llr-minsum")]
        domain: DomainArg,
    },
}

fn parse_frozen(s: &str) -> std::result::Result<(usize, u8), String> {
    let (idx, bit) = s.split_once('=').ok_or("expected index=bit")?;
    let idx = idx.parse().map_err(|_| format!("bad index {idx:?}"))?;
    match bit {
        "0" => Ok((idx, 0)),
        "1" => Ok((idx, 1)),
        _ => Err(format!("bad bit {bit:?}")),
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Parses `args` (program name first) and runs the command, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let mut io = Io { out, err };
    let result = dispatch(cli.command, &mut io);
    let _ = io.out.flush();
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32> {
    match command {
        Command::Schedule { n, method, format } => cmd_schedule(io, n, method.into(), format),
        Command::ScheduleCompare { n, inject_fault } => cmd_schedule_compare(io, n, inject_fault),
        Command::Zfactor {
            check_upto,
            samples,
            seed,
            indices,
            n,
        } => cmd_zfactor(io, check_upto, samples, seed, &indices, n),
        Command::Memory { n, json } => cmd_memory(io, &n, json),
        Command::VerifyDeps {
            n_max,
            trials,
            seed,
        } => cmd_verify(io, n_max, trials, seed),
        Command::Construct {
            n,
            k,
            z0,
            frozen,
            frozen_ones,
            output,
        } => cmd_construct(io, n, k, z0, &frozen, frozen_ones, output),
        Command::Simulate {
            spec,
            channels,
            frames,
            seed,
            domain,
            max_errors,
            json,
            timing,
            output,
        } => {
            let points = channels
                .iter()
                .map(|c| c.parse())
                .collect::<Result<Vec<ChannelPoint>>>()?;
            let config = SimConfig {
                points,
                frames,
                seed,
                domain: domain.into(),
                max_frame_errors: (max_errors > 0).then_some(max_errors),
            };
            cmd_simulate(io, &spec, &config, json, timing, output)
        }
        Command::Roundtrip {
            n,
            trials,
            seed,
            frozen,
            domain,
        } => cmd_roundtrip(io, n, trials, seed, frozen, domain.into()),
    }
}

fn cmd_schedule(io: &mut Io<'_>, n: u32, method: Method, format: FormatArg) -> Result<i32> {
    let format = match format {
        FormatArg::Text => Format::Text,
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let mut out = std::io::BufWriter::new(&mut *io.out);
    match method {
        Method::Online => write_steps(&mut out, OnlineSchedule::new(n)?, format)?,
        _ if n > MAX_OFFLINE_LOG2_LEN => {
            return Err(Error::InvalidParameter(format!(
            "the {} generator stores the whole schedule; n is limited to {MAX_OFFLINE_LOG2_LEN}",
            method.name()
        )))
        }
        _ => write_steps(
            &mut out,
            method.generate(n)?.steps().iter().copied(),
            format,
        )?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn inject_fault(schedule: &Schedule, cc: usize) -> Result<Schedule> {
    if cc == 0 || cc > schedule.len() {
        return Err(Error::InvalidParameter(format!(
            "fault position {cc} outside 1..={}",
            schedule.len()
        )));
    }
    let mut entries: Vec<ScheduleEntry> = schedule.entries().collect();
    let e = entries[cc - 1];
    entries[cc - 1] = match (e.op(), e.log_len()) {
        (Op::G, l) => ScheduleEntry::new(Op::F, l)?,
        (Op::F, 0) => ScheduleEntry::new(Op::F, 1)?,
        (Op::F, l) => ScheduleEntry::new(Op::G, l)?,
    };
    Ok(Schedule::from_entries(schedule.n(), entries))
}

fn cmd_schedule_compare(io: &mut Io<'_>, n: u32, fault: Option<usize>) -> Result<i32> {
    let mut online = generate_online(n)?;
    if let Some(cc) = fault {
        online = inject_fault(&online, cc)?;
    }
    let expected_len = (2usize << n) - 1;
    let mut ok = online.len() == expected_len;
    if !ok {
        writeln!(
            io.out,
            "online schedule has {} entries, expected {expected_len}",
            online.len()
        )?;
    }
    for method in [Method::Tree, Method::Recursive] {
        let other = method.generate(n)?;
        if let Some(m) = first_difference(&online, &other) {
            ok = false;
            writeln!(
                io.out,
                "online and {} differ first at clock cycle {}: {} vs {}",
                method.name(),
                m.cc,
                m.left.as_deref().unwrap_or("(end)"),
                m.right.as_deref().unwrap_or("(end)")
            )?;
        }
    }
    if ok {
        writeln!(
            io.out,
            "online = tree = recursive: {} entries",
            online.len()
        )?;
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_FAIL)
    }
}

/// Largest value covered by the exhaustive part of the sharing-factor check.
pub const ZFACTOR_SWEEP_MAX: u64 = 1 << 20;

fn cmd_zfactor(
    io: &mut Io<'_>,
    check_upto: u64,
    samples: u64,
    seed: u64,
    indices: &[u64],
    n: u32,
) -> Result<i32> {
    let top = 1u64 << 32;
    if !(2..=top).contains(&check_upto) {
        return Err(Error::InvalidParameter(format!(
            "--check-upto {check_upto} outside 2..={top}"
        )));
    }
    let compare = |i: u64| -> Result<Option<(u64, u32, u32)>> {
        let fast = kernels::sharing_factor_debruijn(i)?.get();
        let slow = kernels::sharing_factor_naive(i, MAX_LOG2_LEN)?.get();
        Ok((fast != slow).then_some((i, fast, slow)))
    };
    let mut failure = None;
    let sweep_end = check_upto.min(ZFACTOR_SWEEP_MAX);
    for i in 2..=sweep_end {
        if let Some(f) = compare(i)? {
            failure = Some(f);
            break;
        }
    }
    writeln!(
        io.out,
        "exhaustive 2..={sweep_end}: {} values",
        sweep_end - 1
    )?;
    let mut drawn = 0;
    if failure.is_none() && check_upto > ZFACTOR_SWEEP_MAX {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let i = rng.random_range(ZFACTOR_SWEEP_MAX + 1..=check_upto);
            drawn += 1;
            if let Some(f) = compare(i)? {
                failure = Some(f);
                break;
            }
        }
        writeln!(
            io.out,
            "random {drawn} samples in ({ZFACTOR_SWEEP_MAX}, {check_upto}]"
        )?;
    }
    writeln!(io.out, "i=1: z=n, taken by the caller without the table")?;
    for &i in indices {
        match kernels::sharing_factor(i, n) {
            Ok(z) => writeln!(io.out, "z({i}) = {}", z.get())?,
            Err(e) => writeln!(io.err, "z({i}): {e}")?,
        }
    }
    match failure {
        None => {
            writeln!(io.out, "pass")?;
            Ok(EXIT_OK)
        }
        Some((i, fast, slow)) => {
            writeln!(io.out, "FAIL at i={i}: table {fast}, shift loop {slow}")?;
            Ok(EXIT_FAIL)
        }
    }
}

#[derive(Serialize)]
struct MemoryRow {
    n: u32,
    len: u64,
    offline_bits: u64,
    online_bits: u64,
}

fn cmd_memory(io: &mut Io<'_>, ns: &[u32], json: bool) -> Result<i32> {
    let rows = ns
        .iter()
        .map(|&n| {
            Ok(MemoryRow {
                n,
                len: 1u64 << n,
                offline_bits: memory_bits(n, Storage::Offline)?,
                online_bits: memory_bits(n, Storage::Online)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if json {
        serde_json::to_writer_pretty(&mut *io.out, &rows)?;
        writeln!(io.out)?;
    } else {
        writeln!(
            io.out,
            "{:>3} {:>12} {:>14} {:>12}",
            "n", "N", "offline_bits", "online_bits"
        )?;
        for r in rows {
            writeln!(
                io.out,
                "{:>3} {:>12} {:>14} {:>12}",
                r.n, r.len, r.offline_bits, r.online_bits
            )?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    closed_form: dependency::ClosedFormReport,
    stage_sharing: dependency::StageSharingReport,
    sharing_law: dependency::LawReport,
    h_constancy: dependency::LawReport,
}

fn cmd_verify(io: &mut Io<'_>, n_max: u32, trials: usize, seed: u64) -> Result<i32> {
    let report = VerifyReport {
        closed_form: dependency::verify_closed_form(n_max, seed)?,
        stage_sharing: dependency::verify_stage_sharing(n_max, trials, seed)?,
        sharing_law: dependency::verify_sharing_law(n_max, seed)?,
        h_constancy: dependency::verify_h_constancy(n_max, seed)?,
        passed: false,
    };
    let passed = report.closed_form.passed
        && report.stage_sharing.passed
        && report.sharing_law.passed
        && report.h_constancy.passed;
    let report = VerifyReport { passed, ..report };
    serde_json::to_writer_pretty(&mut *io.out, &report)?;
    writeln!(io.out)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_construct(
    io: &mut Io<'_>,
    n: u32,
    k: usize,
    z0: f64,
    frozen: &[(usize, u8)],
    frozen_ones: bool,
    output: Option<PathBuf>,
) -> Result<i32> {
    let mut spec = construct_bhattacharyya(n, k, z0)?;
    if frozen_ones {
        for idx in spec.frozen_values().into_keys() {
            spec.set_frozen(idx, 1)?;
        }
    }
    for &(idx, bit) in frozen {
        spec.set_frozen(idx, bit)?;
    }
    let text = spec.to_json()?;
    match output {
        Some(path) => fs::write(path, text + "\n")?,
        None => writeln!(io.out, "{text}")?,
    }
    Ok(EXIT_OK)
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("{THREADS_ENV}={v:?} is not a positive integer"))
            }),
        Err(_) => Ok(None),
    }
}

fn cmd_simulate(
    io: &mut Io<'_>,
    spec_path: &PathBuf,
    config: &SimConfig,
    json: bool,
    timing: bool,
    output: Option<PathBuf>,
) -> Result<i32> {
    let text = fs::read_to_string(spec_path)?;
    let spec = CodeSpec::from_json(&text)?;
    let rows = sim::simulate_with_threads(&spec, config, threads_from_env()?)?;
    let mut buf = Vec::new();
    if json {
        sim::write_json(&mut buf, &rows, timing)?;
    } else {
        sim::write_csv(&mut buf, &rows, timing)?;
    }
    match output {
        Some(path) => fs::write(path, &buf)?,
        None => io.out.write_all(&buf)?,
    }
    if timing {
        for r in &rows {
            writeln!(io.err, "{}: {:.3} s", r.param, r.seconds.unwrap_or(0.0))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_roundtrip(
    io: &mut Io<'_>,
    n: u32,
    trials: u64,
    seed: u64,
    frozen: FrozenArg,
    domain: Domain,
) -> Result<i32> {
    let mut decoder = ScDecoder::new(n, domain)?;
    for t in 0..trials {
        let mut rng = frame_rng(seed, t);
        let mut spec = codec::random_spec(n, &mut rng, matches!(frozen, FrozenArg::Random))?;
        let fill = match frozen {
            FrozenArg::Random => None,
            FrozenArg::Ones => Some(1),
            FrozenArg::Zeros => Some(0),
        };
        if let Some(bit) = fill {
            for idx in spec.frozen_values().into_keys() {
                spec.set_frozen(idx, bit)?;
            }
        }
        let msg: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
        let llr = noiseless_llrs(&encode(&spec, &msg)?);
        let soft: Vec<f64> = match domain {
            Domain::Lr => llr.iter().map(|v| v.exp()).collect(),
            _ => llr,
        };
        let u = decoder.decode(&spec, &soft)?;
        if u != spec.assemble(&msg)? {
            writeln!(
                io.out,
                "trial {t} failed (seed {seed}, stream {t}): info {} decoded {}",
                bits_to_hex(&msg),
                bits_to_hex(&spec.extract(&u))
            )?;
            return Ok(EXIT_FAIL);
        }
    }
    writeln!(
        io.out,
        "roundtrip n={n}: {trials}/{trials} trials recovered u exactly"
    )?;
    Ok(EXIT_OK)
}
