//! Update functions of the SC recursion and the sharing-factor computation.
//!
//! Three soft-value flavours are supported: likelihood ratios ([`Lr`]) with
//! the `f`/`g` pair, and log-likelihood ratios ([`Llr`]) with either the exact
//! boxplus `F` or its min-sum approximation, both paired with `G`.
//!
//! All functions are pure.

use crate::error::{Error, Result};

/// Magnitude at which channel LLRs are saturated before they enter a decoder.
pub const LLR_LIMIT: f64 = 40.0;

/// Largest supported code length exponent; the De Bruijn table is 32 bits wide.
pub const MAX_LOG2_LEN: u32 = 32;

/// A likelihood ratio `W(y|0) / W(y|1)`; strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lr(f64);

impl Lr {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Lr(value))
        } else {
            Err(Error::InvalidLr(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A natural-log likelihood ratio; always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Llr(f64);

impl Llr {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Llr(value))
        } else {
            Err(Error::InvalidLlr(value))
        }
    }

    /// Clamps to `[-LLR_LIMIT, LLR_LIMIT]`. Infinities saturate, NaN is rejected.
    pub fn saturating(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::InvalidLlr(value));
        }
        Ok(Llr(value.clamp(-LLR_LIMIT, LLR_LIMIT)))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Number of stages that must be recomputed before bit `i`, minus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SharingFactor(u32);

impl SharingFactor {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl From<SharingFactor> for u32 {
    fn from(z: SharingFactor) -> u32 {
        z.0
    }
}

/// `f(a, b) = (a·b + 1) / (a + b)`.
pub fn lr_f(a: Lr, b: Lr) -> Lr {
    Lr(raw::lr_f(a.0, b.0))
}

/// `g(a, b, s) = a^(1-2s) · b`. Fails if the product leaves the finite positive range.
pub fn lr_g(a: Lr, b: Lr, s: u8) -> Result<Lr> {
    let v = raw::lr_g(a.0, b.0, s);
    if v.is_finite() && v > 0.0 {
        Ok(Lr(v))
    } else {
        Err(Error::LrOverflow)
    }
}

/// Exact boxplus `F(a, b) = 2·artanh(tanh(a/2)·tanh(b/2))`.
pub fn llr_f_exact(a: Llr, b: Llr) -> Llr {
    Llr(raw::llr_f_exact(a.0, b.0))
}

/// `G(a, b, s) = (-1)^s·a + b`.
pub fn llr_g(a: Llr, b: Llr, s: u8) -> Llr {
    Llr(raw::llr_g(a.0, b.0, s))
}

/// Min-sum approximation `sgn(a)·sgn(b)·min(|a|, |b|)`.
pub fn llr_f_minsum(a: Llr, b: Llr) -> Llr {
    Llr(raw::llr_f_minsum(a.0, b.0))
}

/// Unchecked `f64` forms used on the decoder hot path.
pub(crate) mod raw {
    #[inline]
    pub fn lr_f(a: f64, b: f64) -> f64 {
        let prod = a * b;
        let sum = a + b;
        if prod.is_finite() && sum.is_finite() {
            (prod + 1.0) / sum
        } else {
            // Divide through by the larger argument so nothing overflows.
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            (lo + 1.0 / hi) / (1.0 + lo / hi)
        }
    }

    #[inline]
    pub fn lr_g(a: f64, b: f64, s: u8) -> f64 {
        if s & 1 == 0 {
            a * b
        } else {
            b / a
        }
    }

    #[inline]
    pub fn llr_g(a: f64, b: f64, s: u8) -> f64 {
        if s & 1 == 0 {
            b + a
        } else {
            b - a
        }
    }

    #[inline]
    pub fn llr_f_minsum(a: f64, b: f64) -> f64 {
        let mag = a.abs().min(b.abs());
        if (a < 0.0) != (b < 0.0) {
            -mag
        } else {
            mag
        }
    }

    /// Smaller input magnitude above which the log-domain identity is used.
    const LOG_FORM_THRESHOLD: f64 = 1.0;

    pub fn llr_f_exact(a: f64, b: f64) -> f64 {
        let (x, y) = (a.abs(), b.abs());
        let min = x.min(y);
        let mag = if min > LOG_FORM_THRESHOLD {
            // ln((1 + e^(x+y)) / (e^x + e^y)) rewritten around min(x, y)
            let corr = (-(x - y).abs()).exp().ln_1p() - (-(x + y)).exp().ln_1p();
            min - corr
        } else {
            // tanh saturates to 1 for the larger input; it cannot overflow here
            2.0 * ((0.5 * x).tanh() * (0.5 * y).tanh()).atanh()
        };
        // rounding in either form can land a hair above the true bound
        let mag = mag.min(min);
        if (a < 0.0) != (b < 0.0) {
            -mag
        } else {
            mag
        }
    }
}

/// Lookup table of the 32-bit De Bruijn trailing-zero count.
pub const DEBRUIJN_TABLE: [u8; 32] = [
    0, 1, 28, 2, 29, 14, 24, 3, 30, 22, 20, 15, 25, 17, 4, 8, 31, 27, 13, 23, 21, 19, 16, 7, 26,
    12, 18, 6, 11, 5, 10, 9,
];

/// De Bruijn multiplier matching [`DEBRUIJN_TABLE`].
pub const DEBRUIJN_MULTIPLIER: u32 = 0x077C_B531;

/// Bits needed to hold one [`DEBRUIJN_TABLE`] entry (values are below 32).
pub const DEBRUIJN_ENTRY_BITS: u32 = 5;

/// Reference sharing factor: `n` for `i = 1`, otherwise the trailing zeros of
/// `i - 1` counted one shift at a time.
pub fn sharing_factor_naive(i: u64, n: u32) -> Result<SharingFactor> {
    if n > MAX_LOG2_LEN {
        return Err(Error::LengthExponent {
            n,
            min: 0,
            max: MAX_LOG2_LEN,
        });
    }
    let max = 1u64 << n;
    if i == 0 || i > max {
        return Err(Error::IndexOutOfRange { index: i, max });
    }
    if i == 1 {
        return Ok(SharingFactor(n));
    }
    let mut v = i - 1;
    let mut z = 0;
    while v & 1 == 0 {
        v >>= 1;
        z += 1;
    }
    Ok(SharingFactor(z))
}

/// Constant-time sharing factor for `2 <= i <= 2^32` using a multiply and a
/// 32-entry table. `i = 1` is the caller's job (its factor is `n`).
pub fn sharing_factor_debruijn(i: u64) -> Result<SharingFactor> {
    if !(2..=1u64 << 32).contains(&i) {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: 1u64 << 32,
        });
    }
    Ok(SharingFactor(debruijn_tz((i - 1) as u32)))
}

/// Sharing factor for any `1 <= i <= 2^n`, taking the table path for `i >= 2`.
pub fn sharing_factor(i: u64, n: u32) -> Result<SharingFactor> {
    if n > MAX_LOG2_LEN {
        return Err(Error::LengthExponent {
            n,
            min: 0,
            max: MAX_LOG2_LEN,
        });
    }
    let max = 1u64 << n;
    match i {
        1 => Ok(SharingFactor(n)),
        _ if i <= max => sharing_factor_debruijn(i),
        _ => Err(Error::IndexOutOfRange { index: i, max }),
    }
}

#[inline]
pub(crate) fn debruijn_tz(v: u32) -> u32 {
    let lowest = v & v.wrapping_neg();
    DEBRUIJN_TABLE[(lowest.wrapping_mul(DEBRUIJN_MULTIPLIER) >> 27) as usize] as u32
}

/// Decision rule on a likelihood ratio: `>= 1` decides 0.
pub fn hard_decision_lr(v: f64) -> u8 {
    if v >= 1.0 {
        0
    } else {
        1
    }
}

/// Decision rule on a log-likelihood ratio: `>= 0` decides 0.
pub fn hard_decision_llr(v: f64) -> u8 {
    if v >= 0.0 {
        0
    } else {
        1
    }
}
