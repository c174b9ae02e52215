//! Behavior graphs and discrete-time simulation.

mod behavior;
mod engine;
mod timeline;
mod trace;

pub use behavior::{
    derive_behavior, has_flow_path, BehaviorEdge, BehaviorGraph, BehaviorJoin, EdgeSupport,
};
pub use engine::{simulate, SimError, SimOutcome, Simulator};
pub use timeline::{timeline, Timeline, TimelineRow};
pub use trace::{EventTrace, Negation, Span, Trace};
