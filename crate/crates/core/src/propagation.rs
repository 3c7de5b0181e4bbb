//! Flow propagation: how a change of one job's signed wait travels down the
//! queue.
//!
//! A decrease `d` at position `k` reaches position `k + 1` as `0` when
//! `w_k <= 0` (a leader absorbs it) and as `min(d, w_k)` otherwise. An
//! increase `d` passes unchanged over a positive wait and shrinks to
//! `max(0, d + w_k)` over a leader's idle gap. The value transmitted to
//! `k + 1` is also exactly the change of `max(0, w_k)`, so a trace carries
//! one extra sentinel slot past the last position for the last job's own
//! contribution.

use serde::{Deserialize, Serialize};

use crate::instances::Time;
use crate::timeline::WaitingProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowKind {
    Decrease,
    Increase,
}

/// Magnitudes transmitted to positions `origin..=n` (`n` is the sentinel).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub kind: FlowKind,
    pub origin: usize,
    pub values: Vec<Time>,
    profile_fingerprint: u64,
}

impl FlowTrace {
    /// Value at an absolute position in `origin..=n`.
    #[inline]
    pub fn at(&self, position: usize) -> Time {
        self.values[position - self.origin]
    }

    /// Sentinel position (`n`).
    pub fn end(&self) -> usize {
        self.origin + self.values.len() - 1
    }

    /// True when the trace was built from `profile` as it is now.
    pub fn is_current_for(&self, profile: &WaitingProfile) -> bool {
        self.profile_fingerprint == profile.fingerprint()
    }

    /// Sum of values transmitted past the origin, `values[origin+1..=n]`.
    pub fn transmitted(&self) -> Time {
        self.values.iter().skip(1).sum()
    }
}

fn trace(
    profile: &WaitingProfile,
    origin: usize,
    delta: Time,
    kind: FlowKind,
    step: impl Fn(Time, Time) -> Time,
) -> FlowTrace {
    let n = profile.len();
    assert!(origin < n, "origin {origin} outside a profile of {n} positions");
    assert!(delta >= 0, "flow magnitude must be nonnegative, got {delta}");
    let mut values = Vec::with_capacity(n - origin + 1);
    let mut current = delta;
    values.push(current);
    for k in origin..n {
        current = step(current, profile.waits[k]);
        values.push(current);
    }
    FlowTrace {
        kind,
        origin,
        values,
        profile_fingerprint: profile.fingerprint(),
    }
}

/// Decreasing flow seeded with `delta` at `origin`.
pub fn propagate_decrease(profile: &WaitingProfile, origin: usize, delta: Time) -> FlowTrace {
    trace(profile, origin, delta, FlowKind::Decrease, |d, w| {
        if w <= 0 {
            0
        } else {
            d.min(w)
        }
    })
}

/// Increasing flow seeded with `delta` at `origin`.
pub fn propagate_increase(profile: &WaitingProfile, origin: usize, delta: Time) -> FlowTrace {
    trace(profile, origin, delta, FlowKind::Increase, |d, w| {
        if w > 0 {
            d
        } else {
            (d + w).max(0)
        }
    })
}

/// Change of the total waiting time once the flow is realised.
///
/// The trace must come from the profile that is still current; that is only
/// checked in debug builds through [`objective_delta_checked`].
pub fn objective_delta(trace: &FlowTrace) -> Time {
    match trace.kind {
        FlowKind::Increase => trace.transmitted(),
        FlowKind::Decrease => -trace.transmitted(),
    }
}

pub fn objective_delta_checked(trace: &FlowTrace, profile: &WaitingProfile) -> Time {
    debug_assert!(
        trace.is_current_for(profile),
        "flow trace applied to a profile it was not computed from"
    );
    objective_delta(trace)
}

/// Signed injection: positive runs the increasing flow, negative the
/// decreasing flow of `-delta`, zero contributes nothing. Returns the
/// objective change over positions `origin..n`.
pub fn signed_flow_delta(profile: &WaitingProfile, origin: usize, delta: Time) -> Time {
    if origin >= profile.len() || delta == 0 {
        return 0;
    }
    if delta > 0 {
        objective_delta(&propagate_increase(profile, origin, delta))
    } else {
        objective_delta(&propagate_decrease(profile, origin, -delta))
    }
}
