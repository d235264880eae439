//! Text formats, Graphviz export and JSON reports.

pub mod dot;
pub mod json;
pub mod text;

pub use dot::{render_dot, render_dot_system};
pub use text::{parse_cfsm, parse_gt, render_cfsm, render_gt, ParseError};
