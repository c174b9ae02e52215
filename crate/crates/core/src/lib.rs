//! Thinging machine models: a text format, static checks, existence and
//! subsistence classification, and a discrete-time event simulator.
//!
//! ```
//! use tmkit::{parse_model, simulate, Scenario};
//!
//! let bundle = parse_model(r#"
//! model "walk" {
//!   thimac Me { action create  action release  action transfer }
//!   flow Me.create -> Me.release
//! }
//! events {
//!   event Born region { Me.create }
//!   event Leaves region { Me.create, Me.release, Me.create -> Me.release }
//! }
//! behavior { Born -> Leaves }
//! "#).unwrap();
//! let run = simulate(&bundle, &Scenario::named("default")).unwrap();
//! assert_eq!(run.trace.event("Leaves").unwrap().spans[0].start(), 1);
//! ```

pub mod analyze;
pub mod batch;
pub mod bundle;
pub mod cli;
pub mod diag;
pub mod export;
pub mod fixtures;
pub mod model;
pub mod parse;
pub mod region;
pub mod sim;

pub use analyze::{
    check_bundle, check_exclusivity, check_region_mappable, classify_at, classify_elements,
    validate_static, Mappability, OntClass,
};
pub use bundle::{EventDef, EventKind, ModelBundle, NegativeEventDef, Scenario};
pub use diag::{Code, Diagnostic, Severity};
pub use export::{export_dot, DotView};
pub use model::{ActionKind, ArrowKind, ElementId, ModelBuilder, StaticModel};
pub use parse::{parse_model, serialize_model};
pub use region::{make_region, merge_regions, Region, RegionError};
pub use sim::{derive_behavior, simulate, timeline, SimError, SimOutcome, Trace};
