//! File formats, reports and the command-line front end for `bcj-core`.

pub mod commands;
pub mod error;
pub mod formats;
pub mod verify;
