//! File formats, parallel drivers, the SDP solver bridge and the run pipeline
//! around [`rotsys_core`].

pub mod cache;
pub mod formats;
pub mod parallel;
pub mod pipeline;
pub mod sdpa;
pub mod stats;
