//! Channel models, demapping to LLRs, and code construction.
//!
//! BPSK maps bit 0 to `+1` and bit 1 to `-1`. BSC outputs are the received
//! bits as `0.0` / `1.0`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::codec::CodeSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Binary symmetric channel with crossover probability `p` in `(0, 0.5)`.
    Bsc { p: f64 },
    /// BPSK over additive white Gaussian noise with standard deviation `sigma`.
    Awgn { sigma: f64 },
}

impl ChannelModel {
    pub fn bsc(p: f64) -> Result<Self> {
        if p > 0.0 && p < 0.5 {
            Ok(ChannelModel::Bsc { p })
        } else {
            Err(Error::InvalidChannel(format!(
                "crossover probability {p} outside (0, 0.5)"
            )))
        }
    }

    pub fn awgn(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma > 0.0 {
            Ok(ChannelModel::Awgn { sigma })
        } else {
            Err(Error::InvalidChannel(format!(
                "noise deviation {sigma} must be positive"
            )))
        }
    }

    /// AWGN at `ebn0_db` for a code of rate `rate`: `σ² = 1 / (2·R·10^(Eb/N0 / 10))`.
    pub fn awgn_from_ebn0(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidChannel(format!(
                "code rate {rate} outside (0, 1]"
            )));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        ChannelModel::awgn((1.0 / (2.0 * rate * ebn0)).sqrt())
    }
}

/// Sends `codeword` through the channel using `rng`.
pub fn transmit_with<R: Rng + ?Sized>(
    codeword: &[u8],
    model: ChannelModel,
    rng: &mut R,
) -> Vec<f64> {
    match model {
        ChannelModel::Bsc { p } => codeword
            .iter()
            .map(|&b| f64::from((b & 1) ^ u8::from(rng.random_bool(p))))
            .collect(),
        ChannelModel::Awgn { sigma } => codeword
            .iter()
            .map(|&b| {
                let x = if b & 1 == 0 { 1.0 } else { -1.0 };
                let noise: f64 = rng.sample(StandardNormal);
                x + sigma * noise
            })
            .collect(),
    }
}

/// [`transmit_with`] on a generator seeded from `seed`.
pub fn transmit(codeword: &[u8], model: ChannelModel, seed: u64) -> Vec<f64> {
    transmit_with(codeword, model, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random stream for frame `index` under `master_seed`. Streams of distinct
/// frames never overlap.
pub fn frame_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// LLR of one received symbol.
pub fn channel_llr(y: f64, model: ChannelModel) -> f64 {
    match model {
        ChannelModel::Bsc { p } => {
            let mag = ((1.0 - p) / p).ln();
            if y < 0.5 {
                mag
            } else {
                -mag
            }
        }
        ChannelModel::Awgn { sigma } => 2.0 * y / (sigma * sigma),
    }
}

pub fn channel_llrs(received: &[f64], model: ChannelModel) -> Vec<f64> {
    received.iter().map(|&y| channel_llr(y, model)).collect()
}

/// A channel as written on the command line: `bsc:<p>` or `awgn:<Eb/N0 in dB>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelPoint {
    Bsc(f64),
    AwgnEbN0(f64),
}

impl ChannelPoint {
    /// The model for a code of rate `rate`.
    pub fn model(self, rate: f64) -> Result<ChannelModel> {
        match self {
            ChannelPoint::Bsc(p) => ChannelModel::bsc(p),
            ChannelPoint::AwgnEbN0(db) => ChannelModel::awgn_from_ebn0(db, rate),
        }
    }
}

impl fmt::Display for ChannelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelPoint::Bsc(p) => write!(f, "bsc:{p}"),
            ChannelPoint::AwgnEbN0(db) => write!(f, "awgn:{db}"),
        }
    }
}

impl FromStr for ChannelPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.split_once(':').ok_or_else(|| {
            Error::InvalidChannel(format!("expected bsc:<p> or awgn:<dB>, got {s:?}"))
        })?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::InvalidChannel(format!("bad number in {s:?}")))?;
        match kind {
            "bsc" => ChannelModel::bsc(value).map(|_| ChannelPoint::Bsc(value)),
            "awgn" if value.is_finite() => Ok(ChannelPoint::AwgnEbN0(value)),
            "awgn" => Err(Error::InvalidChannel(format!("bad Eb/N0 in {s:?}"))),
            _ => Err(Error::InvalidChannel(format!(
                "unknown channel kind {kind:?}"
            ))),
        }
    }
}

/// Bhattacharyya parameter `z` of one bit channel, held as `ln z` and
/// `ln(1 - z)` so both ends of `(0, 1)` keep their resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bhattacharyya {
    pub ln_z: f64,
    pub ln_one_minus_z: f64,
}

impl Bhattacharyya {
    pub fn new(z: f64) -> Result<Self> {
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "design parameter {z} outside (0, 1)"
            )));
        }
        Ok(Bhattacharyya {
            ln_z: z.ln(),
            ln_one_minus_z: (-z).ln_1p(),
        })
    }

    pub fn z(self) -> f64 {
        self.ln_z.exp()
    }

    /// `2z - z²`, the parameter of the worse child: `1 - z` squares.
    pub fn minus(self) -> Self {
        let ln_one_minus_z = 2.0 * self.ln_one_minus_z;
        let ln_z = if ln_one_minus_z < -LN_2 {
            (-ln_one_minus_z.exp()).ln_1p()
        } else {
            self.ln_z + self.ln_one_minus_z.exp().ln_1p()
        };
        Bhattacharyya {
            ln_z,
            ln_one_minus_z,
        }
    }

    /// `z²`, the parameter of the better child.
    pub fn plus(self) -> Self {
        let ln_z = 2.0 * self.ln_z;
        let ln_one_minus_z = if ln_z < -LN_2 {
            (-ln_z.exp()).ln_1p()
        } else {
            self.ln_one_minus_z + self.ln_z.exp().ln_1p()
        };
        Bhattacharyya {
            ln_z,
            ln_one_minus_z,
        }
    }

    /// Orders by `z`.
    pub fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        // partial_cmp: -0.0 and 0.0 both mean z rounded to 1
        let by = |x: f64, y: f64| x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal);
        by(self.ln_z, other.ln_z).then(by(other.ln_one_minus_z, self.ln_one_minus_z))
    }
}

/// Parameters of all `2^n` bit channels grown from an erasure channel with
/// parameter `z0`: bit `2i - 1` takes the minus branch and bit `2i` the plus
/// branch of parent `i`.
pub fn bhattacharyya_params(n: u32, z0: f64) -> Result<Vec<Bhattacharyya>> {
    if n > crate::codec::MAX_CODE_LOG2_LEN {
        return Err(Error::LengthExponent {
            n,
            min: 0,
            max: crate::codec::MAX_CODE_LOG2_LEN,
        });
    }
    let mut params = vec![Bhattacharyya::new(z0)?];
    for _ in 0..n {
        params = params.iter().flat_map(|b| [b.minus(), b.plus()]).collect();
    }
    Ok(params)
}

/// Picks the `k` bit channels with the smallest Bhattacharyya parameter as
/// the information set (ties go to the larger index). Frozen bits are zero.
pub fn construct_bhattacharyya(n: u32, k: usize, z0: f64) -> Result<CodeSpec> {
    let params = bhattacharyya_params(n, z0)?;
    if k == 0 || k > params.len() {
        return Err(Error::InvalidParameter(format!(
            "K = {k} outside 1..={}",
            params.len()
        )));
    }
    CodeSpec::with_zero_frozen(n, select_smallest(&params, k))
}

fn select_smallest(params: &[Bhattacharyya], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=params.len()).collect();
    order.sort_by(|&a, &b| params[a - 1].total_cmp(&params[b - 1]).then(b.cmp(&a)));
    order.truncate(k);
    order.sort_unstable();
    order
}
