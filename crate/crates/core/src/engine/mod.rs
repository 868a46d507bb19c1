//! Event-driven simulation of the collapsed branching process.
//!
//! Every branching-process node `u` belonging to collapsed vertex `v`
//! produces offspring at rate `eta_v * h(t - t_v) * f(k_u)`, divided by `M_v`
//! under [`BatchRate::Divided`], where `k_u` is the number of offspring `u`
//! already has. Nodes are assigned to batches
//! in order of arrival; a batch of `M_v` nodes is one vertex of the network
//! and all its members share `eta_v` and the birth time `t_v` of its first
//! member.
//!
//! Clocks are sampled exactly by inverting the integrated intensity at a
//! unit-exponential draw. A node's rate only changes when the node itself
//! fires, so each node owns exactly one live queue entry and a firing node
//! simply draws a fresh clock.

mod record;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};

pub use record::{CollapsedVertex, EdgeEvent, GrowthRecord, Provenance};

use crate::error::{Error, Result};
use crate::model::{AgingSpec, BatchRate, ModelConfig, PrefAttachSpec};
use crate::seed::{attempt_seed, SimRng};

/// Default time cap for models without aging (in rate-1 time units).
pub const DEFAULT_TIME_CAP_NO_AGING: f64 = 1e7;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 1000;

/// A node of the uncollapsed branching process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtbpNode {
    pub id: u32,
    pub batch_id: u32,
    /// Number of offspring produced so far.
    pub indegree: u32,
    pub next_event_time: f64,
}

/// Samples the next firing time of `node` after `now` by time-rescaling.
///
/// Solves `(eta f(k) s) [H(t' - t_v) - H(now - t_v)] = draw`, where `s` is
/// the batch share (`1` or `1 / M`, see [`BatchRate`]). Returns
/// `+inf` when the remaining integrated intensity is below `draw`, which
/// only happens with aging.
pub fn next_offspring_time(
    node: &CtbpNode,
    owner: &CollapsedVertex,
    aging: &AgingSpec,
    pa: &PrefAttachSpec,
    batch_rate: BatchRate,
    now: f64,
    draw: f64,
) -> f64 {
    let fitness = owner.fitness.unwrap_or(1.0);
    let share = batch_rate.share(owner.out_target.unwrap_or(1));
    let rate = fitness * pa.value(node.indegree as u64) * share;
    clock_time(aging, rate, owner.birth_time, now, draw)
}

fn clock_time(aging: &AgingSpec, rate: f64, birth: f64, now: f64, draw: f64) -> f64 {
    if !(rate > 0.0) {
        return f64::INFINITY;
    }
    let mass = draw / rate;
    let t = match aging {
        AgingSpec::None => now + mass,
        AgingSpec::Lognormal { .. } => {
            let age = (now - birth).max(0.0);
            let remaining = aging.remaining(age);
            if mass >= remaining {
                return f64::INFINITY;
            }
            let reached = aging.cumulative(age) + mass;
            let new_age = if reached <= 0.5 {
                aging.inverse_cumulative(reached)
            } else {
                aging.inverse_remaining(remaining - mass)
            };
            birth + new_age
        }
    };
    if t > now {
        t
    } else {
        now.next_up()
    }
}

/// One clock draw, reported to a [`SimObserver`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockSample {
    pub node: u32,
    pub batch: u32,
    /// Birth time of the batch, used as the aging reference.
    pub birth_reference: f64,
    pub now: f64,
    pub indegree: u32,
    pub rate_factor: f64,
    pub draw: f64,
    pub next_time: f64,
}

/// Instrumentation hooks for [`simulate_observed`].
pub trait SimObserver {
    fn on_clock(&mut self, _sample: &ClockSample) {}
    fn on_fire(&mut self, _time: f64, _parent: u32, _child: u32, _child_batch: u32) {}
}

pub struct NoObserver;

impl SimObserver for NoObserver {}

#[derive(Debug, Clone, PartialEq)]
pub enum SimOutcome {
    Survived(GrowthRecord),
    Extinct {
        time_of_death: f64,
        vertices_reached: usize,
        /// Set when the time cap stopped the run rather than a dead queue.
        capped: bool,
    },
}

impl SimOutcome {
    pub fn survived(self) -> Option<GrowthRecord> {
        match self {
            SimOutcome::Survived(r) => Some(r),
            SimOutcome::Extinct { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    time: f64,
    node: u32,
}

impl Eq for Pending {}

impl Ord for Pending {
    // min-heap on (time, node)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

pub fn default_time_cap(config: &ModelConfig) -> f64 {
    if config.aging().has_aging() {
        f64::INFINITY
    } else {
        DEFAULT_TIME_CAP_NO_AGING
    }
}

/// Runs one simulation until `target_size` collapsed vertices have been
/// opened or every clock is infinite.
pub fn simulate<R: Rng + ?Sized>(
    config: &ModelConfig,
    target_size: usize,
    rng: &mut R,
    time_cap: Option<f64>,
) -> SimOutcome {
    simulate_observed(config, target_size, rng, time_cap, &mut NoObserver)
}

pub fn simulate_observed<R: Rng + ?Sized, O: SimObserver>(
    config: &ModelConfig,
    target_size: usize,
    rng: &mut R,
    time_cap: Option<f64>,
    observer: &mut O,
) -> SimOutcome {
    assert!(target_size >= 1, "target size must be positive");
    let time_cap = time_cap.unwrap_or_else(|| default_time_cap(config));
    let aging = *config.aging();
    let pa = *config.pa();
    let batch_rate = config.batch_rate();

    let mut vertices: Vec<CollapsedVertex> = Vec::with_capacity(target_size);
    let mut edges: Vec<EdgeEvent> = Vec::new();
    let mut node_batch: Vec<u32> = Vec::new();
    let mut node_indeg: Vec<u32> = Vec::new();
    let mut queue: BinaryHeap<Pending> = BinaryHeap::new();

    let open_batch = |vertices: &mut Vec<CollapsedVertex>, rng: &mut R, t: f64| {
        let fitness = config.draw_fitness(rng);
        let m = config.draw_outdeg(rng);
        vertices.push(CollapsedVertex {
            birth_time: t,
            fitness: Some(fitness),
            out_target: Some(m),
            members_born: 1,
        });
    };

    let schedule = |node: u32,
                        now: f64,
                        vertices: &[CollapsedVertex],
                        node_batch: &[u32],
                        node_indeg: &[u32],
                        queue: &mut BinaryHeap<Pending>,
                        rng: &mut R,
                        observer: &mut O| {
        let batch = node_batch[node as usize];
        let v = &vertices[batch as usize];
        let k = node_indeg[node as usize];
        let draw = unit_exponential(rng);
        let rate = v.fitness.unwrap_or(1.0) * pa.value(k as u64) * batch_rate.share(v.out_target.unwrap_or(1));
        let next = clock_time(&aging, rate, v.birth_time, now, draw);
        observer.on_clock(&ClockSample {
            node,
            batch,
            birth_reference: v.birth_time,
            now,
            indegree: k,
            rate_factor: rate,
            draw,
            next_time: next,
        });
        if next.is_finite() {
            queue.push(Pending { time: next, node });
        }
    };

    open_batch(&mut vertices, rng, 0.0);
    node_batch.push(0);
    node_indeg.push(0);
    if target_size == 1 {
        return SimOutcome::Survived(GrowthRecord::synthetic(vertices, edges, 0.0));
    }
    schedule(0, 0.0, &vertices, &node_batch, &node_indeg, &mut queue, rng, observer);

    let mut now = 0.0;
    while let Some(Pending { time, node: parent }) = queue.pop() {
        if time > time_cap {
            return SimOutcome::Extinct {
                time_of_death: now,
                vertices_reached: vertices.len(),
                capped: true,
            };
        }
        now = time;
        let child = node_batch.len() as u32;
        let open = vertices.len() - 1;
        let opened_new = {
            let v = &vertices[open];
            v.members_born >= v.out_target.unwrap_or(1)
        };
        let child_batch = if opened_new {
            open_batch(&mut vertices, rng, now);
            open + 1
        } else {
            vertices[open].members_born += 1;
            open
        } as u32;
        node_batch.push(child_batch);
        node_indeg.push(0);
        let parent_batch = node_batch[parent as usize];
        edges.push(EdgeEvent {
            time: now,
            source: child_batch,
            target: parent_batch,
        });
        observer.on_fire(now, parent, child, child_batch);
        if opened_new && vertices.len() == target_size {
            return SimOutcome::Survived(GrowthRecord::synthetic(vertices, edges, now));
        }
        node_indeg[parent as usize] += 1;
        schedule(parent, now, &vertices, &node_batch, &node_indeg, &mut queue, rng, observer);
        schedule(child, now, &vertices, &node_batch, &node_indeg, &mut queue, rng, observer);
    }
    SimOutcome::Extinct {
        time_of_death: now,
        vertices_reached: vertices.len(),
        capped: false,
    }
}

/// Successful result of [`simulate_with_retries`].
#[derive(Debug, Clone, PartialEq)]
pub struct RetryResult {
    pub record: GrowthRecord,
    pub attempts_used: u32,
    pub seed: u64,
}

/// Repeats [`simulate`] with per-attempt sub-seeds derived from
/// `(master_seed, class code, config_index, attempt)` and returns the first
/// surviving run.
pub fn simulate_with_retries(
    config: &ModelConfig,
    target_size: usize,
    max_attempts: u32,
    master_seed: u64,
    config_index: u64,
) -> Result<RetryResult> {
    if max_attempts == 0 {
        return Err(Error::invalid("max_attempts must be at least 1"));
    }
    if target_size == 0 {
        return Err(Error::invalid("target size must be positive"));
    }
    for attempt in 0..max_attempts {
        let seed = attempt_seed(master_seed, config.class().code(), config_index, attempt);
        let mut rng = SimRng::seed_from_u64(seed);
        if let SimOutcome::Survived(mut record) = simulate(config, target_size, &mut rng, None) {
            record.provenance = Provenance::Synthetic {
                config: config.to_json(),
                seed,
                attempts: attempt + 1,
            };
            return Ok(RetryResult {
                record,
                attempts_used: attempt + 1,
                seed,
            });
        }
    }
    Err(Error::AllExtinct {
        attempts: max_attempts,
    })
}
