//! Batch front-end: a declarative config describing family, dilation,
//! functional, function, domain and checks, executed into report files.

pub mod config;
pub mod presets;
pub mod run;

pub use config::{ConfigError, RunConfig};
