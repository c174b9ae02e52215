//! Graphviz output.

mod dot;

pub use dot::{export_dot, DotView, ExportError};
