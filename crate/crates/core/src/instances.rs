//! Problem instances, the instance text format, the seeded generator and the
//! release-sorted starting sequence.
//!
//! Jobs are addressed by zero-based index internally. The text format and every
//! human-facing output use one-based job ids (line `i` of an instance file is
//! job `i`).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Signed integer time. Waits may be negative (idle before a queue leader).
pub type Time = i64;

/// Release window of the default distribution, inclusive.
pub const RELEASE_RANGE: (Time, Time) = (0, 200);
/// Processing-time window of the default distribution, inclusive.
pub const PROCESSING_RANGE: (Time, Time) = (1, 50);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input: expected a job count")]
    Empty,
    #[error("line {line}: expected {expected} integer(s), found {found:?}")]
    Malformed {
        line: usize,
        expected: usize,
        found: String,
    },
    #[error("line {line}: `{token}` is not an integer")]
    NotAnInteger { line: usize, token: String },
    #[error("line {line}: job count must be at least 1")]
    ZeroJobs { line: usize },
    #[error("declared {declared} jobs but found {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("line {line}: processing time {value} is below 1")]
    NonPositiveProcessing { line: usize, value: Time },
    #[error("line {line}: release time {value} is negative")]
    NegativeRelease { line: usize, value: Time },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("an instance needs at least one job")]
    Empty,
    #[error("release and processing lists differ in length ({releases} vs {processing})")]
    LengthMismatch { releases: usize, processing: usize },
    #[error("job {job}: processing time {value} is below 1")]
    NonPositiveProcessing { job: usize, value: Time },
    #[error("job {job}: release time {value} is negative")]
    NegativeRelease { job: usize, value: Time },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("sequence has {found} entries, instance has {expected} jobs")]
    WrongLength { expected: usize, found: usize },
    #[error("job index {0} is out of range")]
    OutOfRange(usize),
    #[error("job index {0} appears twice")]
    Duplicate(usize),
}

/// `n` jobs with integer release and processing times.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    release: Vec<Time>,
    processing: Vec<Time>,
}

impl Instance {
    pub fn new(release: Vec<Time>, processing: Vec<Time>) -> Result<Self, InstanceError> {
        if release.len() != processing.len() {
            return Err(InstanceError::LengthMismatch {
                releases: release.len(),
                processing: processing.len(),
            });
        }
        if release.is_empty() {
            return Err(InstanceError::Empty);
        }
        for (job, (&r, &p)) in release.iter().zip(&processing).enumerate() {
            if p < 1 {
                return Err(InstanceError::NonPositiveProcessing { job: job + 1, value: p });
            }
            if r < 0 {
                return Err(InstanceError::NegativeRelease { job: job + 1, value: r });
            }
        }
        Ok(Self { release, processing })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.release.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.release.is_empty()
    }

    #[inline]
    pub fn release(&self, job: usize) -> Time {
        self.release[job]
    }

    #[inline]
    pub fn processing(&self, job: usize) -> Time {
        self.processing[job]
    }

    pub fn releases(&self) -> &[Time] {
        &self.release
    }

    pub fn processing_times(&self) -> &[Time] {
        &self.processing
    }

    pub fn total_processing(&self) -> Time {
        self.processing.iter().sum()
    }

    /// Keeps the jobs whose indices are listed, in that order.
    pub fn subset(&self, jobs: &[usize]) -> Result<Self, InstanceError> {
        Self::new(
            jobs.iter().map(|&j| self.release[j]).collect(),
            jobs.iter().map(|&j| self.processing[j]).collect(),
        )
    }

    /// Canonical text: job count, then one `r p` line per job, LF endings, no comments.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(8 * (self.len() + 1));
        out.push_str(&format!("{}\n", self.len()));
        for (r, p) in self.release.iter().zip(&self.processing) {
            out.push_str(&format!("{r} {p}\n"));
        }
        out
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl std::str::FromStr for Instance {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_instance(s)
    }
}

fn parse_int(line: usize, token: &str) -> Result<Time, ParseError> {
    token.parse::<Time>().map_err(|_| ParseError::NotAnInteger {
        line,
        token: token.to_string(),
    })
}

/// Parses the instance text format. Lines starting with `#` and blank lines
/// are ignored; line numbers in errors are one-based and refer to the input.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (count_line, count_text) = lines.next().ok_or(ParseError::Empty)?;
    let tokens: Vec<&str> = count_text.split_whitespace().collect();
    if tokens.len() != 1 {
        return Err(ParseError::Malformed {
            line: count_line,
            expected: 1,
            found: count_text.to_string(),
        });
    }
    let declared = parse_int(count_line, tokens[0])?;
    if declared < 1 {
        return Err(ParseError::ZeroJobs { line: count_line });
    }
    let declared = declared as usize;

    let mut release = Vec::with_capacity(declared);
    let mut processing = Vec::with_capacity(declared);
    for (line, content) in lines {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(ParseError::Malformed {
                line,
                expected: 2,
                found: content.to_string(),
            });
        }
        let r = parse_int(line, tokens[0])?;
        let p = parse_int(line, tokens[1])?;
        if r < 0 {
            return Err(ParseError::NegativeRelease { line, value: r });
        }
        if p < 1 {
            return Err(ParseError::NonPositiveProcessing { line, value: p });
        }
        release.push(r);
        processing.push(p);
    }
    if release.len() != declared {
        return Err(ParseError::CountMismatch {
            declared,
            found: release.len(),
        });
    }
    Ok(Instance { release, processing })
}

pub fn serialize_instance(inst: &Instance) -> String {
    inst.to_text()
}

/// SplitMix64. The generator is pinned so that a `(n, seed)` pair names the
/// same instance on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[lo, hi]` by 128-bit multiply-shift
    /// (`lo + (x * span) >> 64`).
    pub fn uniform_inclusive(&mut self, lo: Time, hi: Time) -> Time {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u128 + 1;
        let x = self.next_u64() as u128;
        lo + ((x * span) >> 64) as Time
    }
}

/// Mixes a base seed with stream coordinates into an independent seed.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut rng = SplitMix64::new(base ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    let a = rng.next_u64();
    SplitMix64::new(a ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)).next_u64()
}

/// Default distribution: for each job in id order draw `r ~ U{0..200}` then
/// `p ~ U{1..50}` from one SplitMix64 stream seeded with `seed`.
pub fn generate_instance(n: usize, seed: u64) -> Instance {
    assert!(n >= 1, "generate_instance needs n >= 1");
    let mut rng = SplitMix64::new(seed);
    let mut release = Vec::with_capacity(n);
    let mut processing = Vec::with_capacity(n);
    for _ in 0..n {
        release.push(rng.uniform_inclusive(RELEASE_RANGE.0, RELEASE_RANGE.1));
        processing.push(rng.uniform_inclusive(PROCESSING_RANGE.0, PROCESSING_RANGE.1));
    }
    Instance { release, processing }
}

/// A processing order. `order[k]` is the job at position `k` (both zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sequence {
    order: Vec<usize>,
    iteration: u64,
}

impl Sequence {
    /// Validates that `order` is a permutation of `0..n`.
    pub fn new(order: Vec<usize>, n: usize) -> Result<Self, SequenceError> {
        if order.len() != n {
            return Err(SequenceError::WrongLength {
                expected: n,
                found: order.len(),
            });
        }
        let mut seen = vec![false; n];
        for &job in &order {
            if job >= n {
                return Err(SequenceError::OutOfRange(job));
            }
            if std::mem::replace(&mut seen[job], true) {
                return Err(SequenceError::Duplicate(job));
            }
        }
        Ok(Self { order, iteration: 0 })
    }

    /// Builds from one-based job ids.
    pub fn from_job_ids(ids: &[usize], n: usize) -> Result<Self, SequenceError> {
        let order = ids
            .iter()
            .map(|&id| id.checked_sub(1).ok_or(SequenceError::OutOfRange(0)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(order, n)
    }

    pub(crate) fn from_order_unchecked(order: Vec<usize>, iteration: u64) -> Self {
        Self { order, iteration }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            iteration: 0,
        }
    }

    #[inline]
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn job_at(&self, position: usize) -> usize {
        self.order[position]
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn with_iteration(mut self, iteration: u64) -> Self {
        self.iteration = iteration;
        self
    }

    /// One-based job ids in processing order.
    pub fn job_ids(&self) -> Vec<usize> {
        self.order.iter().map(|j| j + 1).collect()
    }

    /// `position_of()[job]` is the position of `job`.
    pub fn position_of(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (k, &job) in self.order.iter().enumerate() {
            pos[job] = k;
        }
        pos
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }
}

/// Release-sorted start, ties broken by processing time and then job index.
pub fn initial_sequence(inst: &Instance) -> Sequence {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by_key(|&j| (inst.release(j), inst.processing(j), j));
    Sequence { order, iteration: 0 }
}

/// The five-job instance used throughout the docs and tests
/// (`r = 0 3 7 20 24`, `p = 5 3 4 5 6`).
pub fn reference_instance() -> Instance {
    Instance::new(vec![0, 3, 7, 20, 24], vec![5, 3, 4, 5, 6]).expect("valid reference instance")
}
