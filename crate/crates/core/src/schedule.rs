//! SC decoding schedules.
//!
//! A schedule is the ordered list of `f_L` / `g_L` stage operations an SC
//! decoder executes, `2N - 1` of them for a length-`N` code. Three generators
//! produce the same sequence:
//!
//! * [`OnlineSchedule`] derives every entry on the fly from the current bit
//!   index and its sharing factor, holding only a few integers of state;
//! * [`generate_tree`] walks a materialised scheduling tree depth-first;
//! * [`generate_recursive`] builds the list by repeated doubling.
//!
//! The last two store the whole schedule, which is what [`memory_bits`]
//! accounts for.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, SharingFactor, DEBRUIJN_ENTRY_BITS, DEBRUIJN_TABLE, MAX_LOG2_LEN};

pub mod format;

/// Largest `n` the materialising generators accept.
pub const MAX_OFFLINE_LOG2_LEN: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    F,
    G,
}

/// One stage operation: `op` applied at stage length `2^log_len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScheduleEntry {
    op: Op,
    log_len: u8,
}

impl ScheduleEntry {
    /// `g_1` does not exist: the length-1 stage only loads channel values.
    pub fn new(op: Op, log_len: u32) -> Result<Self> {
        if log_len > MAX_LOG2_LEN {
            return Err(Error::InvalidParameter(format!(
                "stage length 2^{log_len} too large"
            )));
        }
        if op == Op::G && log_len == 0 {
            return Err(Error::InvalidParameter("g1 is not a valid entry".into()));
        }
        Ok(ScheduleEntry {
            op,
            log_len: log_len as u8,
        })
    }

    pub(crate) fn f(log_len: u32) -> Self {
        ScheduleEntry {
            op: Op::F,
            log_len: log_len as u8,
        }
    }

    pub(crate) fn g(log_len: u32) -> Self {
        debug_assert!(log_len > 0);
        ScheduleEntry {
            op: Op::G,
            log_len: log_len as u8,
        }
    }

    pub fn op(self) -> Op {
        self.op
    }

    pub fn log_len(self) -> u32 {
        self.log_len as u32
    }

    pub fn stage_len(self) -> u64 {
        1u64 << self.log_len
    }
}

impl fmt::Display for ScheduleEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.op {
            Op::F => 'f',
            Op::G => 'g',
        };
        write!(f, "{c}{}", self.stage_len())
    }
}

impl FromStr for ScheduleEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad schedule entry {s:?}"));
        let op = match s.as_bytes().first() {
            Some(b'f') => Op::F,
            Some(b'g') => Op::G,
            _ => return Err(bad()),
        };
        let len: u64 = s[1..].parse().map_err(|_| bad())?;
        if !len.is_power_of_two() {
            return Err(bad());
        }
        ScheduleEntry::new(op, len.trailing_zeros())
    }
}

/// An entry plus the bit index (1-based) decided right after it, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub entry: ScheduleEntry,
    pub emit: Option<u64>,
}

/// A fully materialised schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    n: u32,
    steps: Vec<Step>,
}

impl Schedule {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn entries(&self) -> impl Iterator<Item = ScheduleEntry> + '_ {
        self.steps.iter().map(|s| s.entry)
    }

    pub fn emit_marks(&self) -> impl Iterator<Item = Option<u64>> + '_ {
        self.steps.iter().map(|s| s.emit)
    }

    /// Builds a schedule from bare entries, numbering stage-`N` entries as the
    /// decisions `1, 2, ...` in order.
    pub fn from_entries(n: u32, entries: impl IntoIterator<Item = ScheduleEntry>) -> Self {
        let mut next_bit = 0u64;
        let steps = entries
            .into_iter()
            .map(|entry| {
                let emit = (entry.log_len() == n).then(|| {
                    next_bit += 1;
                    next_bit
                });
                Step { entry, emit }
            })
            .collect();
        Schedule { n, steps }
    }

    /// Assembles a schedule from explicit steps, checking the structural
    /// invariants (length `2N - 1`, `N` decisions numbered in order on the
    /// stage-`N` entries).
    pub fn from_steps(n: u32, steps: Vec<Step>) -> Result<Self> {
        check_n(n, MAX_OFFLINE_LOG2_LEN)?;
        let expected = (2usize << n) - 1;
        if steps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: steps.len(),
            });
        }
        let mut next_bit = 0u64;
        for (cc, step) in steps.iter().enumerate() {
            let at_top = step.entry.log_len() == n;
            match step.emit {
                Some(bit) if at_top && bit == next_bit + 1 => next_bit = bit,
                None if !at_top => {}
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "bad emit mark at cc {}",
                        cc + 1
                    )))
                }
            }
        }
        Ok(Schedule { n, steps })
    }
}

fn check_n(n: u32, max: u32) -> Result<()> {
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::LengthExponent { n, min: 1, max })
    }
}

/// `g` at stage exponent `k` iff `i != 1` and `k == z_i`; `k > z_i` is a shared stage.
pub fn select_gamma(i: u64, k: u32, z: SharingFactor) -> Result<Op> {
    let z = z.get();
    if k > z {
        return Err(Error::StageShared { k, z });
    }
    Ok(if i != 1 && k == z { Op::G } else { Op::F })
}

/// Bitmask selection rule: `g` at stage exponent `k` iff bit `k` of `i - 1` is set.
pub fn select_gamma_prior(i: u64, k: u32) -> Op {
    debug_assert!(i >= 1);
    if k < 64 && (i - 1) & (1u64 << k) != 0 {
        Op::G
    } else {
        Op::F
    }
}

/// Parity rule: `g` iff `ceil(i / 2^k)` is even.
pub fn select_gamma_parity(i: u64, k: u32) -> Op {
    let m = (i + (1u64 << k) - 1) >> k;
    if m.is_multiple_of(2) {
        Op::G
    } else {
        Op::F
    }
}

/// The entries executed before deciding bit `i`:
/// `[f_1, f_2, ..., f_N]` for `i = 1`, else `[g_{N/2^z}, f_{N/2^(z-1)}, ..., f_N]`.
pub fn per_bit_subschedule(i: u64, n: u32) -> Result<Vec<ScheduleEntry>> {
    check_n(n, MAX_LOG2_LEN)?;
    let z = kernels::sharing_factor(i, n)?;
    (0..=z.get())
        .rev()
        .map(|k| Ok(ScheduleEntry::new(select_gamma(i, k, z)?, n - k).expect("n <= 32")))
        .collect()
}

/// Streaming generator of the schedule; each call to `next` costs O(1).
///
/// State is the current bit `i`, its sharing factor and the stage exponent of
/// the next entry. Nothing about earlier or later entries is kept.
#[derive(Debug, Clone)]
pub struct OnlineSchedule {
    n: u32,
    bit: u64,
    z: u32,
    // stage exponent of the next entry for `bit`; None once `bit` is emitted
    k: Option<u32>,
}

impl OnlineSchedule {
    pub fn new(n: u32) -> Result<Self> {
        check_n(n, MAX_LOG2_LEN)?;
        Ok(OnlineSchedule {
            n,
            bit: 1,
            z: n,
            k: Some(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

impl Iterator for OnlineSchedule {
    type Item = Step;

    fn next(&mut self) -> Option<Step> {
        let k = match self.k {
            Some(k) => k,
            None => {
                if self.bit == 1u64 << self.n {
                    return None;
                }
                self.bit += 1;
                self.z = kernels::debruijn_tz((self.bit - 1) as u32);
                self.z
            }
        };
        let entry = if self.bit != 1 && k == self.z {
            ScheduleEntry::g(self.n - k)
        } else {
            ScheduleEntry::f(self.n - k)
        };
        let emit = if k == 0 {
            self.k = None;
            Some(self.bit)
        } else {
            self.k = Some(k - 1);
            None
        };
        Some(Step { entry, emit })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let total = (2u128 << self.n) - 1;
        let done = consumed_before(self.n, self.bit, self.z, self.k);
        let left = (total - done) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for OnlineSchedule {}

// Entries produced before the current position.
fn consumed_before(n: u32, bit: u64, z: u32, k: Option<u32>) -> u128 {
    // bit 1 takes n + 1 entries, bit i >= 2 takes tz(i - 1) + 1, and
    // sum_{v=1}^{m} tz(v) = m - popcount(m)
    let full = if bit == 1 {
        0u128
    } else {
        let m = (bit - 2) as u128; // v ranges 1..=bit-2
        let tz_sum = m - (m.count_ones() as u128);
        (n as u128 + 1) + m + tz_sum
    };
    let within = match k {
        Some(k) => (z - k) as u128,
        None => z as u128 + 1,
    };
    full + within
}

/// Batch form of [`OnlineSchedule`].
pub fn generate_online(n: u32) -> Result<Schedule> {
    check_n(n, MAX_OFFLINE_LOG2_LEN)?;
    Ok(Schedule {
        n,
        steps: OnlineSchedule::new(n)?.collect(),
    })
}

/// Depth-first traversal of the scheduling tree.
///
/// The root is `f_1`; every node at stage length `L < N` has children
/// `f_{2L}` (visited first) and `g_{2L}`. The leaves are the `N` stage-`N`
/// nodes, one per decided bit.
pub fn generate_tree(n: u32) -> Result<Schedule> {
    check_n(n, MAX_OFFLINE_LOG2_LEN)?;
    let tree = SchedulingTree::build(n);
    Ok(Schedule::from_entries(n, tree.preorder()))
}

struct TreeNode {
    entry: ScheduleEntry,
    children: Option<[usize; 2]>,
}

/// Arena-allocated scheduling tree.
struct SchedulingTree {
    nodes: Vec<TreeNode>,
}

impl SchedulingTree {
    fn build(n: u32) -> Self {
        let mut nodes = Vec::with_capacity((2usize << n) - 1);
        nodes.push(TreeNode {
            entry: ScheduleEntry::f(0),
            children: None,
        });
        // breadth-first growth, one level per stage length
        let mut level = vec![0usize];
        for log_len in 1..=n {
            let mut next = Vec::with_capacity(level.len() * 2);
            for parent in level {
                let left = nodes.len();
                nodes.push(TreeNode {
                    entry: ScheduleEntry::f(log_len),
                    children: None,
                });
                nodes.push(TreeNode {
                    entry: ScheduleEntry::g(log_len),
                    children: None,
                });
                nodes[parent].children = Some([left, left + 1]);
                next.extend([left, left + 1]);
            }
            level = next;
        }
        SchedulingTree { nodes }
    }

    fn preorder(&self) -> Vec<ScheduleEntry> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            out.push(node.entry);
            if let Some([left, right]) = node.children {
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }
}

/// Recursive construction: starting from an empty list, for `s = n` down to 1
/// replace the list `DS` by `[f_{2^s}, DS, g_{2^s}, DS]`, then prepend `f_1`.
pub fn generate_recursive(n: u32) -> Result<Schedule> {
    check_n(n, MAX_OFFLINE_LOG2_LEN)?;
    let mut ds: Vec<ScheduleEntry> = Vec::new();
    for s in (1..=n).rev() {
        let mut next = Vec::with_capacity(2 * ds.len() + 2);
        next.push(ScheduleEntry::f(s));
        next.extend_from_slice(&ds);
        next.push(ScheduleEntry::g(s));
        next.extend_from_slice(&ds);
        ds = next;
    }
    ds.insert(0, ScheduleEntry::f(0));
    Ok(Schedule::from_entries(n, ds))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Online,
    Tree,
    Recursive,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Online, Method::Tree, Method::Recursive];

    pub fn generate(self, n: u32) -> Result<Schedule> {
        match self {
            Method::Online => generate_online(n),
            Method::Tree => generate_tree(n),
            Method::Recursive => generate_recursive(n),
        }
    }

    pub fn storage(self) -> Storage {
        match self {
            Method::Online => Storage::Online,
            Method::Tree | Method::Recursive => Storage::Offline,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Online => "online",
            Method::Tree => "tree",
            Method::Recursive => "recursive",
        }
    }
}

/// Where a generator keeps its schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Storage {
    /// Whole schedule stored, one code word per entry.
    Offline,
    /// Only the sharing-factor lookup table is stored.
    Online,
}

/// Storage in bits needed to produce the schedule for `N = 2^n`.
///
/// Offline: `(2N - 1)·ceil(log2(2n + 1))`, as there are `2n + 1` distinct
/// entries. Online: the De Bruijn table, 32 entries of 5 bits.
pub fn memory_bits(n: u32, storage: Storage) -> Result<u64> {
    check_n(n, MAX_LOG2_LEN)?;
    Ok(match storage {
        Storage::Offline => {
            let entries = (2u64 << n) - 1;
            let distinct = 2 * n as u64 + 1;
            let width = distinct.next_power_of_two().trailing_zeros() as u64;
            entries * width
        }
        Storage::Online => DEBRUIJN_TABLE.len() as u64 * DEBRUIJN_ENTRY_BITS as u64,
    })
}

/// Position and contents of the first disagreement between two schedules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// 1-based clock cycle.
    pub cc: usize,
    pub left: Option<String>,
    pub right: Option<String>,
}

/// Compares two schedules entry-for-entry, including emit marks.
pub fn first_difference(a: &Schedule, b: &Schedule) -> Option<Mismatch> {
    let show = |s: &Step| match s.emit {
        Some(bit) => format!("{} -> u{bit}", s.entry),
        None => s.entry.to_string(),
    };
    let len = a.len().max(b.len());
    (0..len).find_map(|idx| {
        let (l, r) = (a.steps.get(idx), b.steps.get(idx));
        (l != r).then(|| Mismatch {
            cc: idx + 1,
            left: l.map(show),
            right: r.map(show),
        })
    })
}
