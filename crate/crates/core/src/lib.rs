//! Media-based modulation (MBM) signal sets built from MAP-index coding with
//! shortened Reed-Solomon codes and a multilevel squaring construction, with
//! exact distance/rank analysis, union bounds and Monte-Carlo link
//! simulation.

pub mod channel_sim;
pub mod error;
pub mod experiment;
pub mod gf2m;
pub mod linalg;
pub mod link_analysis;
pub mod map_index_code;
pub mod signal_set;
pub mod squaring;

pub use error::{Error, Result};
