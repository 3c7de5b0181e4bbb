//! The two segment rules used by the driver.
//!
//! Both operate on a contiguous block of positions and judge a change by the
//! exact objective of that block at its realised entry time, i.e. after the
//! block's inflowing increase (`P_I`) or decrease (`P_D`) has been applied.
//! The baseline entry (before the flow) is kept as well: the bottleneck rule
//! locates its bottleneck on baseline waits and the SPT certificate is stated
//! on them.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instances::{Instance, Sequence, Time};
use crate::timeline::{segment_makespan, segment_objective, segment_profile, WaitingProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentRole {
    /// Ahead of the move, left as is.
    Unchanged,
    /// Receives a decreasing flow.
    Decreasing,
    /// Receives an increasing flow.
    Increasing,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule expects a {expected:?} segment, got {found:?}")]
    WrongRole { expected: SegmentRole, found: SegmentRole },
    #[error("increasing flow must be nonnegative, got {0}")]
    NegativeIncreasingFlow(Time),
    #[error("segment {start}..{end} does not fit a sequence of {len}")]
    BadRange { start: usize, end: usize, len: usize },
}

/// A block of positions and the flow entering it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentContext {
    /// First position of the block.
    pub start: usize,
    /// One past the last position.
    pub end: usize,
    pub role: SegmentRole,
    /// `f_I` for an increasing segment, `f_D` for a decreasing one.
    pub flow_in: Time,
    /// Completion time of the predecessor before the flow is applied; `None`
    /// when the block opens the sequence.
    pub entry_time: Option<Time>,
}

impl SegmentContext {
    /// Context for `range` of `seq`, deriving the baseline entry from the
    /// realised predecessor completion and the flow.
    pub fn in_sequence(inst: &Instance, seq: &Sequence, range: Range<usize>, role: SegmentRole, flow_in: Time) -> Self {
        let realised = if range.start == 0 {
            None
        } else {
            segment_makespan(inst, &seq.order()[..range.start], None)
        };
        let entry_time = realised.map(|c| match role {
            SegmentRole::Increasing => c - flow_in,
            SegmentRole::Decreasing => c + flow_in,
            SegmentRole::Unchanged => c,
        });
        Self {
            start: range.start,
            end: range.end,
            role,
            flow_in,
            entry_time,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Entry time once the flow has been applied.
    pub fn realised_entry(&self) -> Option<Time> {
        self.entry_time.map(|e| match self.role {
            SegmentRole::Increasing => e + self.flow_in,
            SegmentRole::Decreasing => e - self.flow_in,
            SegmentRole::Unchanged => e,
        })
    }

    fn check(&self, seq: &Sequence, expected: SegmentRole) -> Result<(), RuleError> {
        if self.role != expected {
            return Err(RuleError::WrongRole {
                expected,
                found: self.role,
            });
        }
        if self.start > self.end || self.end > seq.len() {
            return Err(RuleError::BadRange {
                start: self.start,
                end: self.end,
                len: seq.len(),
            });
        }
        Ok(())
    }
}

/// Swaps adjacent jobs inside an increasing segment while the left one is
/// longer and the swap strictly lowers the realised segment objective.
/// Returns the new sequence and the change of the realised segment objective.
pub fn adjacent_exchange(ctx: &SegmentContext, inst: &Instance, seq: &Sequence) -> Result<(Sequence, Time), RuleError> {
    ctx.check(seq, SegmentRole::Increasing)?;
    if ctx.flow_in < 0 {
        return Err(RuleError::NegativeIncreasingFlow(ctx.flow_in));
    }
    let mut order = seq.order().to_vec();
    let entry = ctx.realised_entry();
    let segment = &mut order[ctx.start..ctx.end];
    let before = segment_objective(inst, segment, entry);
    let mut current = before;
    loop {
        let mut swapped = false;
        for j in 0..segment.len().saturating_sub(1) {
            if inst.processing(segment[j]) <= inst.processing(segment[j + 1]) {
                continue;
            }
            segment.swap(j, j + 1);
            let candidate = segment_objective(inst, segment, entry);
            if candidate < current {
                current = candidate;
                swapped = true;
            } else {
                segment.swap(j, j + 1);
            }
        }
        if !swapped {
            break;
        }
    }
    Ok((Sequence::from_order_unchecked(order, seq.iteration()), current - before))
}

/// Segment jobs re-sorted by processing time (ties by release, then index),
/// evaluated at the baseline entry.
pub fn spt_segment_profile(ctx: &SegmentContext, inst: &Instance, seq: &Sequence) -> WaitingProfile {
    let mut jobs = seq.order()[ctx.start..ctx.end].to_vec();
    jobs.sort_by_key(|&j| (inst.processing(j), inst.release(j), j));
    segment_profile(inst, &jobs, ctx.entry_time)
}

/// The increasing flow closes every idle gap of the SPT-sorted segment:
/// `f_I + sum min(0, w) >= 0`. When it holds, SPT order is optimal for the
/// segment.
pub fn certify_global(ctx: &SegmentContext, sorted_profile: &WaitingProfile) -> bool {
    ctx.flow_in + sorted_profile.negative_sum() >= 0
}

/// Pulls a later positive-wait job in front of the first position whose
/// baseline wait falls short of the decreasing flow, when that strictly
/// lowers the realised segment objective. Among qualifying jobs the largest
/// improvement wins, then the shorter job, then the earlier position. When no
/// job qualifies the flow is capped at the bottleneck's wait and the search
/// moves past it.
pub fn bottleneck_breakthrough(
    ctx: &SegmentContext,
    inst: &Instance,
    seq: &Sequence,
) -> Result<(Sequence, Time), RuleError> {
    ctx.check(seq, SegmentRole::Decreasing)?;
    let mut order = seq.order().to_vec();
    if ctx.flow_in < 0 || ctx.len() < 2 {
        return Ok((Sequence::from_order_unchecked(order, seq.iteration()), 0));
    }
    let realised = ctx.realised_entry();
    let baseline = ctx.entry_time;
    let segment = &mut order[ctx.start..ctx.end];
    let len = segment.len();
    let before = segment_objective(inst, segment, realised);
    let mut current = before;
    let mut threshold = ctx.flow_in;
    let mut cursor = 0;
    let mut scratch = Vec::with_capacity(len);

    loop {
        let base = segment_profile(inst, segment, baseline);
        let w = &base.waits;
        if w[cursor..].iter().all(|&x| x >= threshold) {
            break;
        }
        let Some(bottleneck) = (cursor..len - 1).find(|&l| w[l] < threshold) else {
            break;
        };

        // (cost, processing, position) of the best pull-back so far
        let mut best: Option<(Time, Time, usize)> = None;
        let mut crossed: Time = 0;
        for g in bottleneck + 1..len {
            let prev = g - 1;
            crossed += w[prev].min(0) - inst.processing(segment[prev]);
            if w[g] <= 0 {
                continue;
            }
            let new_wait = if bottleneck == 0 && baseline.is_none() {
                0
            } else {
                crossed + w[g]
            };
            if new_wait <= w[bottleneck] {
                continue;
            }
            scratch.clear();
            scratch.extend_from_slice(&segment[..bottleneck]);
            scratch.push(segment[g]);
            scratch.extend_from_slice(&segment[bottleneck..g]);
            scratch.extend_from_slice(&segment[g + 1..]);
            let cost = segment_objective(inst, &scratch, realised) - current;
            if cost >= 0 {
                continue;
            }
            let key = (cost, inst.processing(segment[g]), g);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }

        match best {
            Some((cost, _, g)) => {
                segment[bottleneck..=g].rotate_right(1);
                current += cost;
            }
            None => {
                threshold = w[bottleneck].max(0);
                cursor = bottleneck + 1;
                if cursor + 1 >= len {
                    break;
                }
            }
        }
    }
    Ok((Sequence::from_order_unchecked(order, seq.iteration()), current - before))
}
