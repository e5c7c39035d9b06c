//! Polar encoder and schedule-driven SC decoder.
//!
//! Index conventions follow the channel-combining recursion
//! `W_N(y | u) = W_{N/2}(y_first | u_odd ⊕ u_even) · W_{N/2}(y_second | u_even)`,
//! so the encoder is `x = (encode(u_odd ⊕ u_even), encode(u_even))` and the
//! decoder's branch `j` at depth `k` covers channel outputs
//! `(j-1)·N/2^k + 1 ..= j·N/2^k`.
//!
//! Soft memory is one buffer per depth `k`, holding the `2^k` values of the
//! stage of length `N/2^k`; depth `n` is the channel buffer. Partial sums are
//! kept per depth as `2^k` bits: for every branch, the last element of the
//! partial-sum vector over the most recent odd-numbered block of `2^k`
//! decisions. That element is exactly the bit `g` consumes at that depth.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, raw, Llr, Lr};
use crate::schedule::{OnlineSchedule, Op, Step};

/// Largest code length exponent the encoder and decoder allocate for.
pub const MAX_CODE_LOG2_LEN: u32 = 24;

/// Arithmetic used for the soft values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// Likelihood ratios with `f` / `g`.
    Lr,
    /// Log-likelihood ratios with exact boxplus `F` and `G`.
    LlrExact,
    /// Log-likelihood ratios with min-sum `F` and `G`.
    LlrMinSum,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Lr, Domain::LlrExact, Domain::LlrMinSum];

    pub fn name(self) -> &'static str {
        match self {
            Domain::Lr => "lr",
            Domain::LlrExact => "llr-exact",
            Domain::LlrMinSum => "llr-minsum",
        }
    }

    /// Validates channel soft values for this domain. LLRs are saturated to
    /// `±LLR_LIMIT`; LRs must be positive and finite.
    pub fn prepare_channel(self, channel: &[f64]) -> Result<Vec<f64>> {
        channel
            .iter()
            .map(|&v| match self {
                Domain::Lr => Lr::new(v).map(Lr::get),
                Domain::LlrExact | Domain::LlrMinSum => Llr::new(v)
                    .and_then(|l| Llr::saturating(l.get()))
                    .map(Llr::get),
            })
            .collect()
    }

    pub(crate) fn f(self, a: f64, b: f64) -> f64 {
        match self {
            Domain::Lr => raw::lr_f(a, b),
            Domain::LlrExact => raw::llr_f_exact(a, b),
            Domain::LlrMinSum => raw::llr_f_minsum(a, b),
        }
    }

    pub(crate) fn g(self, a: f64, b: f64, s: u8) -> f64 {
        match self {
            Domain::Lr => raw::lr_g(a, b, s),
            Domain::LlrExact | Domain::LlrMinSum => raw::llr_g(a, b, s),
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Domain::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown domain {s:?}")))
    }
}

/// Bit decision on a soft value; ties decide 0.
pub fn hard_decision(soft: f64, domain: Domain) -> u8 {
    match domain {
        Domain::Lr => kernels::hard_decision_lr(soft),
        Domain::LlrExact | Domain::LlrMinSum => kernels::hard_decision_llr(soft),
    }
}

/// A polar code `(N, K, A, u_{A^c})`. Frozen values may be nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: u32,
    info_set: Vec<usize>,
    // index 0..N; None for information positions
    frozen: Vec<Option<u8>>,
}

impl CodeSpec {
    /// `info_set` holds 1-based indices; `frozen_values` must cover exactly the
    /// complement.
    pub fn new(n: u32, info_set: Vec<usize>, frozen_values: &BTreeMap<usize, u8>) -> Result<Self> {
        let mut spec = CodeSpec::with_zero_frozen(n, info_set)?;
        for (&idx, &bit) in frozen_values {
            spec.set_frozen(idx, bit)?;
        }
        let missing = spec.frozen.len() - spec.info_set.len() - frozen_values.len();
        if missing != 0 {
            return Err(Error::InvalidSpec(format!(
                "{missing} frozen positions have no value"
            )));
        }
        Ok(spec)
    }

    /// All frozen bits set to zero.
    pub fn with_zero_frozen(n: u32, mut info_set: Vec<usize>) -> Result<Self> {
        if !(1..=MAX_CODE_LOG2_LEN).contains(&n) {
            return Err(Error::LengthExponent {
                n,
                min: 1,
                max: MAX_CODE_LOG2_LEN,
            });
        }
        let len = 1usize << n;
        info_set.sort_unstable();
        if info_set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("duplicate information index".into()));
        }
        if let Some(&bad) = info_set.iter().find(|&&i| i == 0 || i > len) {
            return Err(Error::InvalidSpec(format!(
                "information index {bad} outside 1..={len}"
            )));
        }
        let mut frozen = vec![Some(0u8); len];
        for &i in &info_set {
            frozen[i - 1] = None;
        }
        Ok(CodeSpec {
            n,
            info_set,
            frozen,
        })
    }

    /// Sets the value of frozen position `index` (1-based).
    pub fn set_frozen(&mut self, index: usize, bit: u8) -> Result<()> {
        if bit > 1 {
            return Err(Error::InvalidSpec(format!(
                "frozen value {bit} is not a bit"
            )));
        }
        match self.frozen.get_mut(index.wrapping_sub(1)) {
            Some(Some(v)) => {
                *v = bit;
                Ok(())
            }
            Some(None) => Err(Error::InvalidSpec(format!(
                "index {index} is an information position"
            ))),
            None => Err(Error::InvalidSpec(format!(
                "frozen index {index} outside 1..={}",
                self.frozen.len()
            ))),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    /// Frozen value at 1-based `index`, or `None` for an information position.
    pub fn frozen_value(&self, index: usize) -> Option<u8> {
        self.frozen.get(index.wrapping_sub(1)).copied().flatten()
    }

    pub fn frozen_values(&self) -> BTreeMap<usize, u8> {
        self.frozen
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|b| (i + 1, b)))
            .collect()
    }

    /// `u_1^N` with `info_bits` on `A` and the frozen values elsewhere.
    pub fn assemble(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: info_bits.len(),
            });
        }
        let mut u: Vec<u8> = self.frozen.iter().map(|v| v.unwrap_or(0)).collect();
        for (&pos, &bit) in self.info_set.iter().zip(info_bits) {
            u[pos - 1] = bit & 1;
        }
        Ok(u)
    }

    /// Information bits of `u_1^N`, in `A` order.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        self.info_set.iter().map(|&p| u[p - 1]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CodeSpecFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeSpecFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// On-disk form: `{"n": .., "K": .., "info_set": [..], "frozen": {"index": bit}}`.
///
/// Frozen positions absent from `frozen` default to zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeSpecFile {
    pub n: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub info_set: Vec<usize>,
    #[serde(default)]
    pub frozen: BTreeMap<String, u8>,
}

impl From<&CodeSpec> for CodeSpecFile {
    fn from(spec: &CodeSpec) -> Self {
        CodeSpecFile {
            n: spec.n,
            k: spec.k(),
            info_set: spec.info_set.clone(),
            frozen: spec
                .frozen_values()
                .into_iter()
                .map(|(i, b)| (i.to_string(), b))
                .collect(),
        }
    }
}

impl TryFrom<CodeSpecFile> for CodeSpec {
    type Error = Error;

    fn try_from(file: CodeSpecFile) -> Result<Self> {
        if file.k != file.info_set.len() {
            return Err(Error::InvalidSpec(format!(
                "K = {} but info_set has {} entries",
                file.k,
                file.info_set.len()
            )));
        }
        let mut spec = CodeSpec::with_zero_frozen(file.n, file.info_set)?;
        for (key, bit) in file.frozen {
            let idx: usize = key
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad frozen index {key:?}")))?;
            spec.set_frozen(idx, bit)?;
        }
        Ok(spec)
    }
}

/// Random information set (each position with probability 1/2) and random
/// frozen values. With `nonzero_frozen`, at least one frozen bit is 1
/// whenever a frozen position exists.
pub fn random_spec<R: Rng + ?Sized>(n: u32, rng: &mut R, nonzero_frozen: bool) -> Result<CodeSpec> {
    let len = 1usize << n;
    let info: Vec<usize> = (1..=len).filter(|_| rng.random::<bool>()).collect();
    let mut spec = CodeSpec::with_zero_frozen(n, info)?;
    let frozen: Vec<usize> = (1..=len)
        .filter(|&i| spec.frozen_value(i).is_some())
        .collect();
    for &i in &frozen {
        spec.set_frozen(i, rng.random_range(0..2))?;
    }
    if nonzero_frozen
        && !frozen.is_empty()
        && frozen.iter().all(|&i| spec.frozen_value(i) == Some(0))
    {
        let pick = frozen[rng.random_range(0..frozen.len())];
        spec.set_frozen(pick, 1)?;
    }
    Ok(spec)
}

/// The length-`N` transform: identity for `N = 1`, otherwise
/// `(transform(u_odd ⊕ u_even), transform(u_even))`. Linear over GF(2).
pub fn polar_transform(u: &[u8]) -> Vec<u8> {
    assert!(u.len().is_power_of_two(), "length must be a power of two");
    if u.len() == 1 {
        return vec![u[0] & 1];
    }
    let mixed: Vec<u8> = u.chunks_exact(2).map(|p| (p[0] ^ p[1]) & 1).collect();
    let even: Vec<u8> = u.chunks_exact(2).map(|p| p[1] & 1).collect();
    let mut x = polar_transform(&mixed);
    x.extend(polar_transform(&even));
    x
}

/// Encodes `K` information bits into an `N`-bit codeword.
pub fn encode(spec: &CodeSpec, info_bits: &[u8]) -> Result<Vec<u8>> {
    Ok(polar_transform(&spec.assemble(info_bits)?))
}

/// Soft and partial-sum memory of one SC decoder.
#[derive(Debug, Clone)]
pub struct DecoderState {
    n: u32,
    // soft[k]: 2^k values of the stage with length N/2^k; soft[n] holds the channel
    soft: Vec<Vec<f64>>,
    // partial[k], k < n: 2^k bits, one per branch
    partial: Vec<Vec<u8>>,
    // 1-based block index stored in partial[k], 0 when empty
    partial_block: Vec<u64>,
    carry: Vec<u8>,
    next: Vec<u8>,
    decisions: Vec<u8>,
}

impl DecoderState {
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=MAX_CODE_LOG2_LEN).contains(&n) {
            return Err(Error::LengthExponent {
                n,
                min: 1,
                max: MAX_CODE_LOG2_LEN,
            });
        }
        let len = 1usize << n;
        Ok(DecoderState {
            n,
            soft: (0..=n).map(|k| vec![0.0; 1 << k]).collect(),
            partial: (0..n).map(|k| vec![0; 1 << k]).collect(),
            partial_block: vec![0; n as usize],
            carry: Vec::with_capacity(len),
            next: Vec::with_capacity(len),
            decisions: Vec::with_capacity(len),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Clears decisions and partial sums for a new frame.
    pub fn reset(&mut self) {
        self.decisions.clear();
        self.partial_block.iter_mut().for_each(|b| *b = 0);
        self.partial.iter_mut().for_each(|p| p.fill(0));
    }

    /// Soft values at depth `k` (stage length `N/2^k`).
    pub fn soft(&self, k: u32) -> &[f64] {
        &self.soft[k as usize]
    }

    /// Stored partial sums at depth `k < n`: entry `j - 1` is the last element
    /// of `h_{j,k}` over the decisions up to the end of block
    /// [`partial_block(k)`](Self::partial_block).
    pub fn partial_sums(&self, k: u32) -> &[u8] {
        &self.partial[k as usize]
    }

    /// Index (1-based, always odd) of the block of `2^k` decisions whose
    /// partial sums are stored at depth `k`, if any.
    pub fn partial_block(&self, k: u32) -> Option<u64> {
        match self.partial_block[k as usize] {
            0 => None,
            b => Some(b),
        }
    }

    pub fn decisions(&self) -> &[u8] {
        &self.decisions
    }

    /// Records decision `bit` for index `i` and refreshes the partial sums.
    ///
    /// Completing an odd-numbered block of `2^k` decisions stores its sums at
    /// depth `k`; completing an even-numbered one combines it with the stored
    /// odd block into the sums of the enclosing block at depth `k + 1`.
    pub fn update_partial_sums(&mut self, i: u64, bit: u8) -> Result<()> {
        let expected = self.decisions.len() as u64 + 1;
        if i != expected {
            return Err(Error::InvalidParameter(format!(
                "decision for bit {i} while bit {expected} is pending"
            )));
        }
        let bit = bit & 1;
        self.decisions.push(bit);
        self.carry.clear();
        self.carry.push(bit);
        let mut block = i;
        for k in 0..self.n as usize {
            if block % 2 == 1 {
                self.partial[k].copy_from_slice(&self.carry);
                self.partial_block[k] = block;
                return Ok(());
            }
            debug_assert_eq!(self.partial_block[k], block - 1);
            self.next.clear();
            for (&left, &right) in self.partial[k].iter().zip(&self.carry) {
                self.next.push(left ^ right);
                self.next.push(right);
            }
            std::mem::swap(&mut self.carry, &mut self.next);
            block /= 2;
        }
        Ok(())
    }

    fn run_entry(&mut self, domain: Domain, op: Op, log_len: u32, channel: &[f64]) -> Result<()> {
        let k = (self.n - log_len) as usize;
        if log_len == 0 {
            self.soft[k].copy_from_slice(channel);
            return Ok(());
        }
        let (upper, lower) = self.soft.split_at_mut(k + 1);
        let out = &mut upper[k];
        let input = &lower[0];
        match (domain, op) {
            (Domain::Lr, Op::F) => apply_f(out, input, raw::lr_f),
            (Domain::LlrExact, Op::F) => apply_f(out, input, raw::llr_f_exact),
            (Domain::LlrMinSum, Op::F) => apply_f(out, input, raw::llr_f_minsum),
            (Domain::Lr, Op::G) => apply_g(out, input, &self.partial[k], raw::lr_g),
            (_, Op::G) => apply_g(out, input, &self.partial[k], raw::llr_g),
        }
        if domain == Domain::Lr && !out.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::LrOverflow);
        }
        Ok(())
    }
}

#[inline]
fn apply_f(out: &mut [f64], input: &[f64], f: impl Fn(f64, f64) -> f64) {
    for (o, pair) in out.iter_mut().zip(input.chunks_exact(2)) {
        *o = f(pair[0], pair[1]);
    }
}

#[inline]
fn apply_g(out: &mut [f64], input: &[f64], sums: &[u8], g: impl Fn(f64, f64, u8) -> f64) {
    for ((o, pair), &s) in out.iter_mut().zip(input.chunks_exact(2)).zip(sums) {
        *o = g(pair[0], pair[1], s);
    }
}

/// Hooks into a running decode.
pub trait DecodeObserver {
    /// Called after each schedule entry executes.
    fn entry(&mut self, _step: &Step) {}

    /// Called after bit `i` is decided and the partial sums are updated.
    fn decision(&mut self, _i: u64, _soft: f64, _bit: u8, _state: &DecoderState) {}
}

impl DecodeObserver for () {}

/// SC decoder executing the online schedule entry by entry.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    domain: Domain,
    state: DecoderState,
    channel: Vec<f64>,
}

impl ScDecoder {
    pub fn new(n: u32, domain: Domain) -> Result<Self> {
        Ok(ScDecoder {
            domain,
            state: DecoderState::new(n)?,
            channel: Vec::new(),
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn state(&self) -> &DecoderState {
        &self.state
    }

    /// Decodes one frame and returns `û_1^N`.
    pub fn decode(&mut self, spec: &CodeSpec, channel: &[f64]) -> Result<Vec<u8>> {
        self.decode_observed(spec, channel, &mut ())
    }

    pub fn decode_observed<O: DecodeObserver + ?Sized>(
        &mut self,
        spec: &CodeSpec,
        channel: &[f64],
        observer: &mut O,
    ) -> Result<Vec<u8>> {
        let n = self.state.n;
        if spec.n() != n {
            return Err(Error::InvalidParameter(format!(
                "decoder built for n={n}, spec has n={}",
                spec.n()
            )));
        }
        if channel.len() != spec.len() {
            return Err(Error::LengthMismatch {
                expected: spec.len(),
                got: channel.len(),
            });
        }
        self.channel = self.domain.prepare_channel(channel)?;
        self.state.reset();
        for step in OnlineSchedule::new(n)? {
            let entry = step.entry;
            self.state
                .run_entry(self.domain, entry.op(), entry.log_len(), &self.channel)?;
            observer.entry(&step);
            if let Some(i) = step.emit {
                let soft = self.state.soft[0][0];
                let bit = spec
                    .frozen_value(i as usize)
                    .unwrap_or_else(|| hard_decision(soft, self.domain));
                self.state.update_partial_sums(i, bit)?;
                observer.decision(i, soft, bit, &self.state);
            }
        }
        Ok(self.state.decisions.clone())
    }
}

/// One-shot decode of `û_1^N`.
pub fn decode_sc(spec: &CodeSpec, channel: &[f64], domain: Domain) -> Result<Vec<u8>> {
    ScDecoder::new(spec.n(), domain)?.decode(spec, channel)
}

/// Packs bits into hex digits, first bit as the most significant bit of the
/// first digit; the last digit is zero-padded.
pub fn bits_to_hex(bits: &[u8]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u32, |acc, (t, &b)| acc | u32::from(b & 1) << (3 - t));
            char::from_digit(v, 16).unwrap_or('0')
        })
        .collect()
}

/// Inverse of [`bits_to_hex`] for a known bit count.
pub fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<u8>> {
    if hex.len() != len.div_ceil(4) {
        return Err(Error::LengthMismatch {
            expected: len.div_ceil(4),
            got: hex.len(),
        });
    }
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for ch in hex.chars() {
        let v = ch
            .to_digit(16)
            .ok_or_else(|| Error::InvalidParameter(format!("bad hex digit {ch:?}")))?;
        bits.extend((0..4).map(|t| ((v >> (3 - t)) & 1) as u8));
    }
    if bits[len..].iter().any(|&b| b != 0) {
        return Err(Error::InvalidParameter("nonzero padding bits".into()));
    }
    bits.truncate(len);
    Ok(bits)
}

/// Saturated noiseless channel LLRs for a codeword: `+LLR_LIMIT` for 0, `-LLR_LIMIT` for 1.
pub fn noiseless_llrs(codeword: &[u8]) -> Vec<f64> {
    codeword
        .iter()
        .map(|&b| {
            if b & 1 == 0 {
                kernels::LLR_LIMIT
            } else {
                -kernels::LLR_LIMIT
            }
        })
        .collect()
}
