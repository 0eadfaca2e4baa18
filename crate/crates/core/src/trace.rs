//! Node-switch traces: parsing, folding epochs into group elements,
//! evolving configurations and generating synthetic churn.
//!
//! A trace file is JSON lines. The first line is a header
//! `{"n":…,"r":…,"initial":[…]}`, every following line one event
//! `{"epoch":…,"seq":…,"node":…,"from":…,"to":…}`.
//!
//! A node moving from pool `i` to pool `j` contributes the transposition
//! `(i j)` to that node's pool map for the epoch; nodes without events keep
//! the identity.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Configuration, GroupParams, PoolPermutation, PoolUpdate};

/// One node leaving `from_pool` for `to_pool`. `from_pool == to_pool` is a
/// legal no-op switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchEvent {
    pub epoch: u64,
    pub seq: u64,
    pub node: usize,
    #[serde(rename = "from")]
    pub from_pool: usize,
    #[serde(rename = "to")]
    pub to_pool: usize,
}

impl SwitchEvent {
    fn key(&self) -> (u64, u64) {
        (self.epoch, self.seq)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    n: usize,
    r: usize,
    initial: Vec<usize>,
}

/// A validated trace: events sorted by `(epoch, seq)` and consistent with
/// the configuration they are replayed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    params: GroupParams,
    initial: Configuration,
    events: Vec<SwitchEvent>,
}

impl Trace {
    pub fn new(initial: Configuration, events: Vec<SwitchEvent>) -> Result<Self> {
        let params = initial.params();
        let mut state = initial.clone();
        let mut last: Option<(u64, u64)> = None;
        for (i, ev) in events.iter().enumerate() {
            check_ranges(params, i, ev)?;
            if last.is_some_and(|k| k >= ev.key()) {
                return Err(Error::InvariantViolation {
                    event: i,
                    message: "(epoch, seq) is not strictly increasing".into(),
                });
            }
            last = Some(ev.key());
            let actual = state.pool_of(ev.node);
            if actual != ev.from_pool {
                return Err(Error::SourceMismatch {
                    event: i,
                    node: ev.node,
                    claimed: ev.from_pool,
                    actual,
                });
            }
            state.set_pool(ev.node, ev.to_pool);
        }
        Ok(Self {
            params,
            initial,
            events,
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn initial(&self) -> &Configuration {
        &self.initial
    }

    pub fn events(&self) -> &[SwitchEvent] {
        &self.events
    }

    /// Epochs `0..=last event epoch`; a trace without events spans one empty
    /// epoch.
    pub fn epoch_count(&self) -> u64 {
        self.events.last().map_or(1, |ev| ev.epoch + 1)
    }

    /// Events of one epoch, in `seq` order.
    pub fn epoch_events(&self, epoch: u64) -> &[SwitchEvent] {
        let start = self.events.partition_point(|ev| ev.epoch < epoch);
        let end = self.events.partition_point(|ev| ev.epoch <= epoch);
        &self.events[start..end]
    }

    /// Undoes the trace: events in reverse order with `from` and `to`
    /// swapped, starting from this trace's final configuration. Epochs are
    /// mirrored and `seq` renumbered so that the result is again sorted.
    pub fn inverse(&self) -> Trace {
        let last_epoch = self.events.last().map_or(0, |ev| ev.epoch);
        let mut events: Vec<SwitchEvent> = Vec::with_capacity(self.events.len());
        for ev in self.events.iter().rev() {
            let epoch = last_epoch - ev.epoch;
            let seq = match events.last() {
                Some(prev) if prev.epoch == epoch => prev.seq + 1,
                _ => 0,
            };
            events.push(SwitchEvent {
                epoch,
                seq,
                node: ev.node,
                from_pool: ev.to_pool,
                to_pool: ev.from_pool,
            });
        }
        let initial = replay(self).pop().expect("replay yields at least one configuration");
        Trace::new(initial, events).expect("inverse of a valid trace is valid")
    }

    /// Serializes to the JSON-lines format, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = Header {
            n: self.params.node_count(),
            r: self.params.pool_count(),
            initial: self.initial.assignment().to_vec(),
        };
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        for ev in &self.events {
            out.push_str(&serde_json::to_string(ev).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(self.to_jsonl().as_bytes())
    }
}

fn check_ranges(params: GroupParams, i: usize, ev: &SwitchEvent) -> Result<()> {
    if ev.node >= params.node_count() {
        return Err(Error::InvariantViolation {
            event: i,
            message: format!("node {} out of range for {} nodes", ev.node, params.node_count()),
        });
    }
    for pool in [ev.from_pool, ev.to_pool] {
        if pool >= params.pool_count() {
            return Err(Error::InvariantViolation {
                event: i,
                message: format!("pool {pool} out of range for {} pools", params.pool_count()),
            });
        }
    }
    Ok(())
}

/// Parses and validates a JSON-lines trace.
pub fn parse_trace<R: BufRead>(reader: R) -> Result<Trace> {
    let mut lines = reader.lines();
    let malformed = |line: usize, message: String| Error::MalformedLine { line, message };

    let header_line = match lines.next() {
        Some(line) => line.map_err(|e| malformed(1, e.to_string()))?,
        None => return Err(malformed(1, "missing header".into())),
    };
    let header: Header = serde_json::from_str(&header_line).map_err(|e| malformed(1, e.to_string()))?;
    let params = GroupParams::new(header.n, header.r).map_err(|e| malformed(1, e.to_string()))?;
    let initial = Configuration::new(params, header.initial).map_err(|e| malformed(1, e.to_string()))?;

    let mut events = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| malformed(lineno, e.to_string()))?;
        let ev: SwitchEvent = serde_json::from_str(&line).map_err(|e| malformed(lineno, e.to_string()))?;
        events.push(ev);
    }
    Trace::new(initial, events)
}

/// Folds one epoch's events into a single group element.
pub fn fold_epoch(params: GroupParams, events: &[SwitchEvent]) -> Result<PoolUpdate> {
    let r = params.pool_count();
    let mut per_node = vec![PoolPermutation::identity(r); params.node_count()];
    for (i, ev) in events.iter().enumerate() {
        check_ranges(params, i, ev)?;
        if i > 0 {
            let prev = &events[i - 1];
            if prev.epoch != ev.epoch {
                return Err(Error::InvariantViolation {
                    event: i,
                    message: "events span more than one epoch".into(),
                });
            }
            if prev.seq >= ev.seq {
                return Err(Error::InvariantViolation {
                    event: i,
                    message: "seq is not strictly increasing".into(),
                });
            }
        }
        if ev.from_pool != ev.to_pool {
            let swap = PoolPermutation::transposition(r, ev.from_pool, ev.to_pool);
            per_node[ev.node] = per_node[ev.node].then(&swap);
        }
    }
    PoolUpdate::new(params, per_node)
}

/// One folded update per epoch, for at least `min_epochs` epochs.
pub fn fold_trace_epochs(trace: &Trace, min_epochs: u64) -> Vec<PoolUpdate> {
    let epochs = trace.epoch_count().max(min_epochs);
    (0..epochs)
        .map(|e| fold_epoch(trace.params, trace.epoch_events(e)).expect("validated trace folds"))
        .collect()
}

pub fn fold_trace(trace: &Trace) -> Vec<PoolUpdate> {
    fold_trace_epochs(trace, 0)
}

/// Configuration after each epoch, obtained by applying the folded updates.
pub fn evolve(trace: &Trace) -> Vec<Configuration> {
    evolve_epochs(trace, 0)
}

pub fn evolve_epochs(trace: &Trace, min_epochs: u64) -> Vec<Configuration> {
    let mut state = trace.initial.clone();
    fold_trace_epochs(trace, min_epochs)
        .into_iter()
        .map(|u| {
            state = u.apply(&state).expect("same params");
            state.clone()
        })
        .collect()
}

/// Event-by-event replay, reporting the configuration at every epoch
/// boundary. Independent of the group structure.
pub fn replay(trace: &Trace) -> Vec<Configuration> {
    let mut state = trace.initial.clone();
    let mut out = Vec::new();
    for epoch in 0..trace.epoch_count() {
        for ev in trace.epoch_events(epoch) {
            state.set_pool(ev.node, ev.to_pool);
        }
        out.push(state.clone());
    }
    out
}

/// Prefix products `u_0 ★ ⋯ ★ u_t`.
pub fn cumulative(updates: &[PoolUpdate]) -> Result<Vec<PoolUpdate>> {
    let mut out: Vec<PoolUpdate> = Vec::with_capacity(updates.len());
    for u in updates {
        let next = match out.last() {
            Some(acc) => acc.compose(u)?,
            None => u.clone(),
        };
        out.push(next);
    }
    Ok(out)
}

/// Epochs at which the cumulative product is the identity.
pub fn detect_identity_closure(updates: &[PoolUpdate]) -> Result<Vec<usize>> {
    Ok(cumulative(updates)?
        .iter()
        .enumerate()
        .filter(|(_, u)| u.is_identity())
        .map(|(t, _)| t)
        .collect())
}

/// Seeded churn: every epoch each node independently switches, with
/// probability `churn`, to a uniformly chosen different pool. The initial
/// configuration is drawn uniformly from the same stream.
pub fn generate_random_trace(params: GroupParams, epochs: u64, churn: f64, seed: u64) -> Result<Trace> {
    if !(0.0..=1.0).contains(&churn) {
        return Err(Error::InvalidProbability(churn));
    }
    let r = params.pool_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment: Vec<usize> = (0..params.node_count()).map(|_| rng.gen_range(0..r)).collect();
    let initial = Configuration::new(params, assignment)?;
    let mut state = initial.clone();
    let mut events = Vec::new();
    for epoch in 0..epochs {
        let mut seq = 0;
        for node in 0..params.node_count() {
            if r < 2 || !rng.gen_bool(churn) {
                continue;
            }
            let from_pool = state.pool_of(node);
            let k = rng.gen_range(0..r - 1);
            let to_pool = if k >= from_pool { k + 1 } else { k };
            events.push(SwitchEvent {
                epoch,
                seq,
                node,
                from_pool,
                to_pool,
            });
            state.set_pool(node, to_pool);
            seq += 1;
        }
    }
    Trace::new(initial, events)
}

/// A cumulative update as of the end of one epoch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SnapshotWire", into = "SnapshotWire")]
pub struct Snapshot {
    pub update: PoolUpdate,
    pub cumulative_epoch: u64,
}

#[derive(Serialize, Deserialize)]
struct SnapshotWire {
    n: usize,
    r: usize,
    perms: Vec<Vec<usize>>,
    cumulative_epoch: u64,
}

impl TryFrom<SnapshotWire> for Snapshot {
    type Error = Error;

    fn try_from(w: SnapshotWire) -> Result<Self> {
        let update = PoolUpdate::from_mappings(GroupParams::new(w.n, w.r)?, w.perms)?;
        Ok(Snapshot {
            update,
            cumulative_epoch: w.cumulative_epoch,
        })
    }
}

impl From<Snapshot> for SnapshotWire {
    fn from(s: Snapshot) -> Self {
        let params = s.update.params();
        SnapshotWire {
            n: params.node_count(),
            r: params.pool_count(),
            perms: s.update.per_node().iter().map(|p| p.mapping().to_vec()).collect(),
            cumulative_epoch: s.cumulative_epoch,
        }
    }
}

/// Cumulative snapshots for every epoch of `updates`.
pub fn snapshots(updates: &[PoolUpdate]) -> Result<Vec<Snapshot>> {
    Ok(cumulative(updates)?
        .into_iter()
        .enumerate()
        .map(|(t, update)| Snapshot {
            update,
            cumulative_epoch: t as u64,
        })
        .collect())
}
