//! Monte-Carlo BER/FER estimation.
//!
//! Frame `t` of every operating point draws its message and noise from
//! [`frame_rng`]`(seed, t)`. Frames run in parallel batches and are tallied in
//! frame order, so the result does not depend on the number of workers.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{channel_llrs, frame_rng, transmit_with, ChannelPoint};
use crate::codec::{encode, CodeSpec, Domain, ScDecoder};
use crate::error::Result;

/// Frames decoded per parallel batch.
pub const BATCH_FRAMES: u64 = 256;

/// Default number of frame errors after which a point stops early.
pub const DEFAULT_MAX_FRAME_ERRORS: u64 = 100;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub points: Vec<ChannelPoint>,
    /// Frames per point unless stopped early.
    pub frames: u64,
    pub seed: u64,
    pub domain: Domain,
    /// Stop a point at the frame that produces this many frame errors.
    pub max_frame_errors: Option<u64>,
}

/// One operating point of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub param: String,
    pub frames: u64,
    pub bit_err: u64,
    pub frame_err: u64,
    pub ber: f64,
    pub fer: f64,
    pub seconds: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    bit_err: u64,
}

fn run_frame(
    spec: &CodeSpec,
    point: ChannelPoint,
    config: &SimConfig,
    decoder: &mut ScDecoder,
    index: u64,
) -> Result<FrameOutcome> {
    let rate = spec.k() as f64 / spec.len() as f64;
    let model = point.model(rate)?;
    let mut rng = frame_rng(config.seed, index);
    let msg: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2)).collect();
    let x = encode(spec, &msg)?;
    let llr = channel_llrs(&transmit_with(&x, model, &mut rng), model);
    let soft: Vec<f64> = match config.domain {
        Domain::Lr => llr.iter().map(|v| v.exp()).collect(),
        _ => llr,
    };
    let u = decoder.decode(spec, &soft)?;
    let bit_err = spec
        .extract(&u)
        .iter()
        .zip(&msg)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(FrameOutcome { bit_err })
}

fn run_point(spec: &CodeSpec, point: ChannelPoint, config: &SimConfig) -> Result<SimRow> {
    let start = Instant::now();
    let mut row = SimRow {
        param: point.to_string(),
        frames: 0,
        bit_err: 0,
        frame_err: 0,
        ber: 0.0,
        fer: 0.0,
        seconds: None,
        seed: config.seed,
    };
    let limit = config.max_frame_errors.unwrap_or(u64::MAX);
    let mut next = 0;
    'batches: while next < config.frames {
        let end = (next + BATCH_FRAMES).min(config.frames);
        let outcomes: Vec<FrameOutcome> = (next..end)
            .into_par_iter()
            .map_init(
                || ScDecoder::new(spec.n(), config.domain),
                |decoder, t| match decoder {
                    Ok(d) => run_frame(spec, point, config, d, t),
                    Err(e) => Err(crate::Error::InvalidParameter(e.to_string())),
                },
            )
            .collect::<Result<_>>()?;
        for o in outcomes {
            row.frames += 1;
            row.bit_err += o.bit_err;
            if o.bit_err > 0 {
                row.frame_err += 1;
                if row.frame_err >= limit {
                    break 'batches;
                }
            }
        }
        next = end;
    }
    row.fer = if row.frames > 0 {
        row.frame_err as f64 / row.frames as f64
    } else {
        0.0
    };
    let bits = row.frames * spec.k() as u64;
    row.ber = if bits > 0 {
        row.bit_err as f64 / bits as f64
    } else {
        0.0
    };
    row.seconds = Some(start.elapsed().as_secs_f64());
    Ok(row)
}

/// Runs every operating point on the current rayon pool.
pub fn simulate(spec: &CodeSpec, config: &SimConfig) -> Result<Vec<SimRow>> {
    config
        .points
        .iter()
        .map(|&p| run_point(spec, p, config))
        .collect()
}

/// [`simulate`] on a dedicated pool of `threads` workers (all cores if `None`).
pub fn simulate_with_threads(
    spec: &CodeSpec,
    config: &SimConfig,
    threads: Option<usize>,
) -> Result<Vec<SimRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
    pool.install(|| simulate(spec, config))
}

pub const CSV_HEADER: &str = "param,frames,bit_err,frame_err,ber,fer,seconds,seed";

/// Writes rows as CSV. `seconds` is left empty unless `timing` is set, which
/// keeps the output reproducible byte for byte.
pub fn write_csv<W: Write>(out: &mut W, rows: &[SimRow], timing: bool) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let seconds = match (timing, r.seconds) {
            (true, Some(s)) => format!("{s:.3}"),
            _ => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{:e},{:e},{},{}",
            r.param, r.frames, r.bit_err, r.frame_err, r.ber, r.fer, seconds, r.seed
        )?;
    }
    Ok(())
}

/// JSON array mirroring the CSV columns; `seconds` is `null` unless `timing` is set.
pub fn write_json<W: Write>(out: &mut W, rows: &[SimRow], timing: bool) -> Result<()> {
    let rows: Vec<SimRow> = rows
        .iter()
        .cloned()
        .map(|mut r| {
            if !timing {
                r.seconds = None;
            }
            r
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &rows)?;
    writeln!(out)?;
    Ok(())
}
