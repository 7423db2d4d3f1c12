//! Command-line shell for the register pushdown model checker: text
//! formats for systems, acceptors, and configurations, plus the command
//! implementations behind the `rpmc` binary.

pub mod commands;
pub mod format;
