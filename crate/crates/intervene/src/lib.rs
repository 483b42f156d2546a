//! Std companion to `intervene-core`: edge-list, BIF, PKG and LP formats,
//! bundled benchmark networks, experiment grids and the HTTP advisor.

pub mod bench;
pub mod fixtures;
pub mod formats;
pub mod service;
