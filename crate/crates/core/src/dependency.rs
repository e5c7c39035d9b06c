//! Partial-sum algebra and brute-force checks of the stage-sharing results.
//!
//! `p` and `q` map the decoded prefix of a length-`L` node to the prefixes of
//! its two length-`L/2` children. Composing them along the path to branch `j`
//! at depth `k` gives `h_{j,k}`, whose elements are XORs of decoded bits over
//! the index sets returned by [`d_set`].
//!
//! The `verify_*` functions never panic on a failed check; they return a
//! report carrying the first counterexample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codec::{random_spec, CodeSpec, DecodeObserver, DecoderState, Domain, ScDecoder};
use crate::error::{Error, Result};
use crate::kernels::sharing_factor;
use crate::schedule::Step;

/// Largest `n` accepted by the exhaustive checks.
pub const MAX_VERIFY_LOG2_LEN: u32 = 6;

/// Random prefixes drawn per prefix length in [`verify_closed_form`].
pub const CLOSED_FORM_RANDOM_PREFIXES: usize = 100;

/// Random frames per code length in [`verify_stage_sharing`].
pub const STAGE_SHARING_TRIALS: usize = 50;

/// Relative tolerance on stage-N soft values in [`verify_stage_sharing`].
pub const STAGE_SHARING_SOFT_TOLERANCE: f64 = 1e-9;

/// Seed used when the caller does not supply one.
pub const DEFAULT_VERIFY_SEED: u64 = 0x5eed;

/// `u_odd ⊕ u_even` over the longest even-length prefix.
pub fn op_p(prefix: &[u8]) -> Vec<u8> {
    prefix.chunks_exact(2).map(|c| c[0] ^ c[1]).collect()
}

/// Even-position elements (1-based) of the prefix.
pub fn op_q(prefix: &[u8]) -> Vec<u8> {
    prefix.chunks_exact(2).map(|c| c[1]).collect()
}

/// The vector `h_{j,k}(prefix)`, of length `⌊len/2^k⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PartialSumVector(Vec<u8>);

impl PartialSumVector {
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl std::ops::Deref for PartialSumVector {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

fn check_branch(j: u64, k: u32) -> Result<()> {
    if k > 32 {
        return Err(Error::LengthExponent {
            n: k,
            min: 0,
            max: 32,
        });
    }
    let max = 1u64 << k;
    if j == 0 || j > max {
        return Err(Error::IndexOutOfRange { index: j, max });
    }
    Ok(())
}

/// Applies `θ_1` first and `θ_k` last, where `θ_a` is `q` if bit `k - a` of
/// `j - 1` (counting from the least significant) is set, `p` otherwise.
pub fn eval_h(j: u64, k: u32, prefix: &[u8]) -> Result<PartialSumVector> {
    check_branch(j, k)?;
    let path = j - 1;
    let mut v = prefix.to_vec();
    for a in 1..=k {
        v = if (path >> (k - a)) & 1 == 1 {
            op_q(&v)
        } else {
            op_p(&v)
        };
    }
    Ok(PartialSumVector(v))
}

/// Decoded-bit indices (1-based, ascending) whose XOR is one partial-sum element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XorSet {
    indices: Vec<u64>,
}

impl XorSet {
    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// XOR of the prefix bits at these indices.
    pub fn xor_over(&self, prefix: &[u8]) -> Result<u8> {
        self.indices.iter().try_fold(0u8, |acc, &d| {
            prefix
                .get(d as usize - 1)
                .map(|&b| acc ^ (b & 1))
                .ok_or(Error::IndexOutOfRange {
                    index: d,
                    max: prefix.len() as u64,
                })
        })
    }
}

/// Index set of element `a` of `h_{j,k}`: `(a-1)·2^k + 1 + c` for every
/// `k`-bit `c` containing the bits of `j - 1` read in reverse order.
pub fn d_set(j: u64, k: u32, a: u64) -> Result<XorSet> {
    check_branch(j, k)?;
    if k > 20 {
        return Err(Error::InvalidParameter(format!(
            "depth {k} would enumerate too many indices"
        )));
    }
    if a == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            max: u64::MAX,
        });
    }
    let base = (a - 1)
        .checked_mul(1 << k)
        .ok_or_else(|| Error::InvalidParameter(format!("element {a} too large")))?
        + 1;
    let fixed = if k == 0 {
        0
    } else {
        (j - 1).reverse_bits() >> (64 - k)
    };
    let free = ((1u64 << k) - 1) & !fixed;
    let mut indices = Vec::with_capacity(1 << free.count_ones());
    let mut sub = free;
    loop {
        indices.push(base + (fixed | sub));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    indices.reverse();
    Ok(XorSet { indices })
}

/// First disagreement found by [`verify_closed_form`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormCounterexample {
    pub prefix: String,
    pub j: u64,
    pub k: u32,
    pub a: u64,
    pub h_len: usize,
    pub expected_len: usize,
    pub from_h: Option<u8>,
    pub from_d_set: Option<u8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    pub n_max: u32,
    pub prefixes: u64,
    pub elements_checked: u64,
    pub passed: bool,
    pub counterexample: Option<ClosedFormCounterexample>,
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| if b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Checks every element of `h_{j,k}` against [`d_set`] for every prefix
/// length up to `2^n_max`, using unit vectors, the all-ones vector and
/// [`CLOSED_FORM_RANDOM_PREFIXES`] random vectors per length.
pub fn verify_closed_form(n_max: u32, seed: u64) -> Result<ClosedFormReport> {
    verify_closed_form_with(n_max, seed, d_set)
}

/// [`verify_closed_form`] against a caller-supplied index-set function.
pub fn verify_closed_form_with<F>(n_max: u32, seed: u64, closed_form: F) -> Result<ClosedFormReport>
where
    F: Fn(u64, u32, u64) -> Result<XorSet>,
{
    check_verify_n(n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ClosedFormReport {
        n_max,
        prefixes: 0,
        elements_checked: 0,
        passed: true,
        counterexample: None,
    };
    for len in 1..=1usize << n_max {
        let mut prefixes: Vec<Vec<u8>> = (0..len)
            .map(|d| (0..len).map(|t| u8::from(t == d)).collect())
            .collect();
        prefixes.push(vec![1; len]);
        prefixes.extend(
            (0..CLOSED_FORM_RANDOM_PREFIXES)
                .map(|_| (0..len).map(|_| rng.random_range(0..2)).collect()),
        );
        for prefix in &prefixes {
            report.prefixes += 1;
            for k in 1..=n_max {
                for j in 1..=1u64 << k {
                    if let Some(cx) = closed_form_case(prefix, j, k, &closed_form, &mut report)? {
                        report.passed = false;
                        report.counterexample = Some(cx);
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn closed_form_case<F>(
    prefix: &[u8],
    j: u64,
    k: u32,
    closed_form: &F,
    report: &mut ClosedFormReport,
) -> Result<Option<ClosedFormCounterexample>>
where
    F: Fn(u64, u32, u64) -> Result<XorSet>,
{
    let h = eval_h(j, k, prefix)?;
    let expected_len = prefix.len() >> k;
    let cx = |a: u64, from_h, from_d_set| ClosedFormCounterexample {
        prefix: bits_string(prefix),
        j,
        k,
        a,
        h_len: h.len(),
        expected_len,
        from_h,
        from_d_set,
    };
    if h.len() != expected_len {
        return Ok(Some(cx(0, None, None)));
    }
    for (idx, &v) in h.iter().enumerate() {
        let a = idx as u64 + 1;
        report.elements_checked += 1;
        let closed = closed_form(j, k, a)
            .ok()
            .and_then(|s| s.xor_over(prefix).ok());
        if closed != Some(v) {
            return Ok(Some(cx(a, Some(v), closed)));
        }
    }
    Ok(None)
}

fn check_verify_n(n_max: u32) -> Result<()> {
    if !(1..=MAX_VERIFY_LOG2_LEN).contains(&n_max) {
        return Err(Error::LengthExponent {
            n: n_max,
            min: 1,
            max: MAX_VERIFY_LOG2_LEN,
        });
    }
    Ok(())
}

/// SC decoding by the plain recursion: every soft value of every bit is
/// rebuilt from the channel, with partial sums obtained through `p` / `q`.
/// Returns the decisions and the stage-N soft value of each bit.
pub fn recompute_decode(
    spec: &CodeSpec,
    channel: &[f64],
    domain: Domain,
) -> Result<(Vec<u8>, Vec<f64>)> {
    if channel.len() != spec.len() {
        return Err(Error::LengthMismatch {
            expected: spec.len(),
            got: channel.len(),
        });
    }
    let channel = domain.prepare_channel(channel)?;
    let mut decisions = Vec::with_capacity(channel.len());
    let mut soft = Vec::with_capacity(channel.len());
    for i in 1..=channel.len() {
        let v = recompute_node(domain, &channel, i, &decisions);
        if domain == Domain::Lr && !(v.is_finite() && v > 0.0) {
            return Err(Error::LrOverflow);
        }
        let bit = spec
            .frozen_value(i)
            .unwrap_or_else(|| crate::codec::hard_decision(v, domain));
        decisions.push(bit);
        soft.push(v);
    }
    Ok((decisions, soft))
}

fn recompute_node(domain: Domain, y: &[f64], i: usize, prefix: &[u8]) -> f64 {
    if y.len() == 1 {
        return y[0];
    }
    let (first, second) = y.split_at(y.len() / 2);
    let child = i.div_ceil(2);
    let a = recompute_node(domain, first, child, &op_p(prefix));
    let b = recompute_node(domain, second, child, &op_q(prefix));
    if i % 2 == 1 {
        domain.f(a, b)
    } else {
        domain.g(a, b, prefix[i - 2])
    }
}

/// First disagreement found by [`verify_stage_sharing`].
#[derive(Debug, Clone, Serialize)]
pub struct StageSharingCounterexample {
    pub n: u32,
    pub trial: usize,
    pub domain: Domain,
    pub bit: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageSharingReport {
    pub n_max: u32,
    pub trials_per_n: usize,
    pub frames: u64,
    pub bits_checked: u64,
    pub max_relative_soft_error: f64,
    pub passed: bool,
    pub counterexample: Option<StageSharingCounterexample>,
}

/// Records, per decided bit, the stage lengths activated since the previous decision.
#[derive(Debug, Default)]
struct ActivationLog {
    current: Vec<u64>,
    per_bit: Vec<Vec<u64>>,
    soft: Vec<f64>,
}

impl DecodeObserver for ActivationLog {
    fn entry(&mut self, step: &Step) {
        self.current.push(step.entry.stage_len());
    }

    fn decision(&mut self, _i: u64, soft: f64, _bit: u8, _state: &DecoderState) {
        self.per_bit.push(std::mem::take(&mut self.current));
        self.soft.push(soft);
    }
}

fn relative_error(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}

/// Runs the schedule-driven decoder and [`recompute_decode`] on the same
/// random frames in every domain, for each `n` in `1..=n_max`.
///
/// Channel LLRs are uniform in `[-8, 8]` (LR inputs are their exponentials),
/// which keeps every LR within range for `n <= 6`.
pub fn verify_stage_sharing(n_max: u32, trials: usize, seed: u64) -> Result<StageSharingReport> {
    check_verify_n(n_max)?;
    let mut report = StageSharingReport {
        n_max,
        trials_per_n: trials,
        frames: 0,
        bits_checked: 0,
        max_relative_soft_error: 0.0,
        passed: true,
        counterexample: None,
    };
    for n in 1..=n_max {
        let len = 1u64 << n;
        let expected: Vec<Vec<u64>> = (1..=len)
            .map(|i| {
                let z = sharing_factor(i, n).map(|z| z.get()).unwrap_or(0);
                (n - z..=n).map(|e| 1u64 << e).collect()
            })
            .collect();
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::from(n) << 32 | trial as u64);
            let spec = random_spec(n, &mut rng, true)?;
            let llrs: Vec<f64> = (0..len).map(|_| rng.random_range(-8.0..=8.0)).collect();
            for domain in Domain::ALL {
                let channel: Vec<f64> = match domain {
                    Domain::Lr => llrs.iter().map(|v| v.exp()).collect(),
                    _ => llrs.clone(),
                };
                report.frames += 1;
                let fail = |bit: u64, reason: String| StageSharingCounterexample {
                    n,
                    trial,
                    domain,
                    bit,
                    reason,
                };
                let mut log = ActivationLog::default();
                let shared = ScDecoder::new(n, domain)?.decode_observed(&spec, &channel, &mut log);
                let full = recompute_decode(&spec, &channel, domain);
                let (shared, (full, full_soft)) = match (shared, full) {
                    (Ok(s), Ok(f)) => (s, f),
                    (s, f) => {
                        let reason = format!(
                            "decoder error: sharing {:?}, recompute {:?}",
                            s.err(),
                            f.err()
                        );
                        report.passed = false;
                        report.counterexample = Some(fail(0, reason));
                        return Ok(report);
                    }
                };
                for i in 0..len as usize {
                    report.bits_checked += 1;
                    let bit = i as u64 + 1;
                    let err = relative_error(log.soft[i], full_soft[i]);
                    report.max_relative_soft_error = report.max_relative_soft_error.max(err);
                    let reason = if shared[i] != full[i] {
                        Some(format!("decision {} vs recompute {}", shared[i], full[i]))
                    } else if err.is_nan() || err > STAGE_SHARING_SOFT_TOLERANCE {
                        Some(format!(
                            "soft value {} vs recompute {} (relative error {err:e})",
                            log.soft[i], full_soft[i]
                        ))
                    } else if log.per_bit[i] != expected[i] {
                        Some(format!(
                            "activated stages {:?}, expected {:?}",
                            log.per_bit[i], expected[i]
                        ))
                    } else {
                        None
                    };
                    if let Some(reason) = reason {
                        report.passed = false;
                        report.counterexample = Some(fail(bit, reason));
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Outcome of a law checked over many cases.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: &'static str,
    pub n_max: u32,
    pub cases: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl LawReport {
    fn new(law: &'static str, n_max: u32) -> Self {
        LawReport {
            law,
            n_max,
            cases: 0,
            passed: true,
            counterexample: None,
        }
    }

    fn fail(mut self, why: String) -> Self {
        self.passed = false;
        self.counterexample = Some(why);
        self
    }
}

fn h_group(i: u64, k: u32, prefix: &[u8]) -> Result<(u64, Vec<PartialSumVector>)> {
    let hs = (1..=1u64 << k)
        .map(|j| eval_h(j, k, &prefix[..i as usize - 1]))
        .collect::<Result<_>>()?;
    Ok((i.div_ceil(1 << k), hs))
}

/// Bits `i - 1` and `i` read the same depth-`k` node group (same
/// `⌈i/2^k⌉` and same `h_{j,k}` inputs) exactly when `2^k` does not divide
/// `i - 1`. Checked for every `n <= n_max` over random decoded prefixes.
pub fn verify_sharing_law(n_max: u32, seed: u64) -> Result<LawReport> {
    check_verify_n(n_max)?;
    let mut report = LawReport::new("sharing", n_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=n_max {
        let len = 1u64 << n;
        for _ in 0..8 {
            let u: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            for i in 2..=len {
                for k in 1..=n {
                    report.cases += 1;
                    let same = h_group(i, k, &u)? == h_group(i - 1, k, &u)?;
                    let expect_same = (i - 1) % (1 << k) != 0;
                    if same != expect_same {
                        let why = format!(
                            "n={n} i={i} k={k} prefix={}: shared={same}",
                            bits_string(&u)
                        );
                        return Ok(report.fail(why));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `h_{j,k}(û_1^{i-1})` equals `h_{j,k}(û_1^{(m-1)·2^k})` for every `i` in
/// `((m-1)·2^k, m·2^k]`.
pub fn verify_h_constancy(n_max: u32, seed: u64) -> Result<LawReport> {
    check_verify_n(n_max)?;
    let mut report = LawReport::new("h-constancy", n_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=n_max {
        let len = 1usize << n;
        for _ in 0..8 {
            let u: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            for k in 1..=n {
                let block = 1usize << k;
                for m in 1..=len / block {
                    let start = (m - 1) * block;
                    for j in 1..=block as u64 {
                        let base = eval_h(j, k, &u[..start])?;
                        for i in start + 1..=start + block {
                            report.cases += 1;
                            if eval_h(j, k, &u[..i - 1])? != base {
                                let why = format!(
                                    "n={n} k={k} j={j} m={m} i={i} prefix={}",
                                    bits_string(&u)
                                );
                                return Ok(report.fail(why));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    #[test]
    fn p_and_q_examples() {
        assert_eq!(op_p(&[1, 0, 1]), vec![1]);
        assert_eq!(op_p(&[0, 0, 0, 0]), vec![0, 0]);
        assert_eq!(op_p(&[1, 1, 0, 1]), vec![0, 1]);
        assert_eq!(op_q(&[1, 0, 1]), vec![0]);
        assert_eq!(op_q(&[]), Vec::<u8>::new());
        assert_eq!(op_q(&[1, 1, 0, 1]), vec![1, 1]);
    }

    #[test]
    fn eval_h_examples() {
        let u = [1, 1, 0, 1, 0, 1, 1, 1];
        assert_eq!(eval_h(1, 1, &u).unwrap().as_slice(), op_p(&u));
        assert_eq!(eval_h(2, 1, &u).unwrap().as_slice(), op_q(&u));
        assert_eq!(eval_h(4, 2, &[1, 1, 0, 1]).unwrap().as_slice(), &[1]);
        // depth 0 is the identity
        assert_eq!(eval_h(1, 0, &u).unwrap().as_slice(), &u);
        assert!(eval_h(0, 1, &u).is_err());
        assert!(eval_h(5, 2, &u).is_err());
    }

    #[test]
    fn eval_h_applies_first_selector_first() {
        // j - 1 = 0b10: q on the full prefix, then p
        let u = [1, 0, 0, 0];
        assert_eq!(eval_h(3, 2, &u).unwrap().as_slice(), op_p(&op_q(&u)));
        assert_eq!(eval_h(3, 2, &u).unwrap().as_slice(), &[0]);
        let u = [0, 1, 0, 0];
        assert_eq!(eval_h(3, 2, &u).unwrap().as_slice(), &[1]);
    }

    #[test]
    fn d_set_examples() {
        for a in 1..=5 {
            assert_eq!(d_set(1, 1, a).unwrap().indices(), &[2 * a - 1, 2 * a]);
            assert_eq!(d_set(2, 1, a).unwrap().indices(), &[2 * a]);
        }
        assert_eq!(d_set(3, 2, 1).unwrap().indices(), &[2, 4]);
        assert_eq!(d_set(2, 2, 1).unwrap().indices(), &[3, 4]);
        assert_eq!(d_set(1, 2, 2).unwrap().indices(), &[5, 6, 7, 8]);
        assert_eq!(d_set(4, 2, 1).unwrap().indices(), &[4]);
        assert!(d_set(0, 1, 1).is_err());
        assert!(d_set(3, 1, 1).is_err());
        assert!(d_set(1, 1, 0).is_err());
    }

    #[test]
    fn d_set_agrees_with_eval_h_on_unit_vectors() {
        // element a of h_{j,k}(e_d) is 1 iff d is in D_{j,k,a}
        for k in 1..=4 {
            let len = 4usize << k;
            for j in 1..=1u64 << k {
                for d in 1..=len {
                    let e: Vec<u8> = (1..=len).map(|t| u8::from(t == d)).collect();
                    let h = eval_h(j, k, &e).unwrap();
                    for (idx, &v) in h.iter().enumerate() {
                        let set = d_set(j, k, idx as u64 + 1).unwrap();
                        assert_eq!(v == 1, set.indices().contains(&(d as u64)));
                    }
                }
            }
        }
    }

    #[test]
    fn xor_over_checks_range() {
        let s = d_set(1, 1, 2).unwrap();
        assert_eq!(s.xor_over(&[0, 0, 1, 0]).unwrap(), 1);
        assert!(s.xor_over(&[0, 0, 1]).is_err());
    }

    #[test]
    fn closed_form_single_case() {
        let v = eval_h(1, 1, &[1, 0]).unwrap();
        assert_eq!(v.as_slice(), &[1]);
        assert_eq!(d_set(1, 1, 1).unwrap().xor_over(&[1, 0]).unwrap(), 1);
    }

    #[test]
    fn closed_form_passes() {
        let r = verify_closed_form(3, 1).unwrap();
        assert!(r.passed, "{:?}", r.counterexample);
        assert!(r.elements_checked > 5_000);
    }

    #[test]
    fn closed_form_catches_off_by_one() {
        let mutated = |j, k, a| {
            d_set(j, k, a).map(|s| XorSet {
                indices: s.indices.iter().map(|d| d + 1).collect(),
            })
        };
        let r = verify_closed_form_with(3, 1, mutated).unwrap();
        assert!(!r.passed);
        let cx = r.counterexample.unwrap();
        assert!(cx.from_h != cx.from_d_set);
    }

    #[test]
    fn closed_form_catches_unreversed_bits() {
        // reading j - 1 in natural bit order instead of reversed
        let mutated = |j: u64, k: u32, a: u64| {
            let base = (a - 1) * (1 << k) + 1;
            let fixed = j - 1;
            let free = ((1u64 << k) - 1) & !fixed;
            let indices = (0..1u64 << k)
                .filter(|c| c & !free == fixed)
                .map(|c| base + c)
                .collect();
            Ok(XorSet { indices })
        };
        assert!(!verify_closed_form_with(2, 1, mutated).unwrap().passed);
    }

    #[test]
    fn verify_rejects_large_n() {
        assert!(verify_closed_form(7, 0).is_err());
        assert!(verify_stage_sharing(0, 1, 0).is_err());
        assert!(verify_sharing_law(7, 0).is_err());
    }

    #[test]
    fn stage_sharing_passes_small() {
        let r = verify_stage_sharing(4, 10, 3).unwrap();
        assert!(r.passed, "{:?}", r.counterexample);
        assert_eq!(r.frames, 4 * 10 * 3);
        assert!(r.max_relative_soft_error <= STAGE_SHARING_SOFT_TOLERANCE);
    }

    #[test]
    fn activation_sets_for_n3() {
        let spec = CodeSpec::with_zero_frozen(3, vec![4, 6, 7, 8]).unwrap();
        let mut log = ActivationLog::default();
        ScDecoder::new(3, Domain::LlrMinSum)
            .unwrap()
            .decode_observed(&spec, &[1.0; 8], &mut log)
            .unwrap();
        assert_eq!(log.per_bit[0], vec![1, 2, 4, 8]);
        assert_eq!(log.per_bit[3], vec![8]);
        assert_eq!(log.per_bit[4], vec![2, 4, 8]);
        assert_eq!(log.per_bit[2], vec![4, 8]);
    }

    #[test]
    fn recompute_matches_hand_trace() {
        let spec = CodeSpec::with_zero_frozen(1, vec![2]).unwrap();
        let (u, soft) = recompute_decode(&spec, &[3.0, 3.0], Domain::LlrMinSum).unwrap();
        assert_eq!(u, vec![0, 0]);
        assert_eq!(soft, vec![3.0, 6.0]);
    }

    #[test]
    fn laws_hold() {
        let r = verify_sharing_law(5, 2).unwrap();
        assert!(r.passed, "{:?}", r.counterexample);
        let r = verify_h_constancy(5, 2).unwrap();
        assert!(r.passed, "{:?}", r.counterexample);
    }

    proptest! {
        #[test]
        fn h_length_law(seed in any::<u64>(), len in 0usize..=64, k in 0u32..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
            let j = rng.random_range(1..=1u64 << k);
            prop_assert_eq!(eval_h(j, k, &u).unwrap().len(), len >> k);
        }

        #[test]
        fn d_set_shape(k in 0u32..=8, j_seed in any::<u64>(), a in 1u64..1000) {
            let j = j_seed % (1 << k) + 1;
            let s = d_set(j, k, a).unwrap();
            let zeros = k - (j - 1).count_ones();
            prop_assert_eq!(s.len(), 1usize << zeros);
            let lo = (a - 1) << k;
            prop_assert!(s.indices().iter().all(|&d| d > lo && d <= a << k));
            prop_assert!(s.indices().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
