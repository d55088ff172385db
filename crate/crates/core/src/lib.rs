//! Analytics over activity logs of geolocated pages.
//!
//! The crate loads pages, posts, likes and comments ([`ingest`]), labels
//! users as occasional, habitual or polarized ([`classify`]), computes
//! per-page statistics and empirical distributions ([`stats`]), builds the
//! pages-reshares and pages-common-users co-occurrence networks from their
//! bipartite forms ([`graph`]) and extracts their disparity-filter
//! backbones ([`backbone`]). [`pipeline`] wires the stages together behind
//! the `pagegraph` command-line tool.

pub mod backbone;
pub mod classify;
pub mod exec;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod stats;
pub mod synth;

pub use exec::Execution;
