//! HTTP gateway over the media graph and text store, plus the bench runner
//! and operator commands.

pub mod api;
pub mod bench;
pub mod cli;
