//! Library half of the `dfi` command-line tool: problem and report
//! documents, command implementations and table rendering.

pub mod commands;
pub mod document;
pub mod report;
pub mod table;
