//! Path simulators for random walks, compound renewal, compound Poisson
//! and Levy processes, exposed as a stream of jump epochs.

mod segment;
mod simulator;
mod spec;

pub use segment::{
    bridge_hit_probability, bridge_max_from_uniform, first_passage_max_cdf, strip_probability,
    BrownianSegment, LinearSegment, Segment,
};
pub use simulator::{
    run_until, simulate_many, simulate_replicate, Caps, MaxSample, PathEvent, PathState,
    RunOptions, DEFAULT_MAX_JUMPS,
};
pub use spec::{spacing_tail_ratios, ProcessKind, ProcessSpec};
