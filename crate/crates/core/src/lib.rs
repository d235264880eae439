//! Global types of message-passing protocols as automata over arrows.

pub mod automata;
pub mod cli;
pub mod complement;
pub mod formats;
pub mod gtype;
pub mod oracle;
pub mod realisability;
pub mod semantics;
pub mod trace;
