//! File formats, backends, persistence, the HTTP service and the CLI around
//! `tidss-core`.

pub mod app;
pub mod backend;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod jobs;
pub mod reproduce;
pub mod service;

pub use app::App;
pub use config::AppConfig;
pub use error::{Error, Result};
