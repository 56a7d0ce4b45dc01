#![allow(dead_code)]

use std::path::{Path, PathBuf};

use tidss::config::{AppConfig, BackendConfig, BackendKind};
use tidss::App;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Fixture configuration with its data directory moved into `data_dir`.
pub fn config(data_dir: &Path) -> AppConfig {
    let mut config = AppConfig::load(&fixtures().join("config.json")).unwrap();
    config.data_dir = data_dir.to_path_buf();
    config
}

pub fn app(data_dir: &Path) -> App {
    App::new(config(data_dir)).unwrap()
}

/// The fixture mock with a script served before its rules.
pub fn scripted_app(data_dir: &Path, script: Vec<tidss_core::synthesis::MockReply>) -> App {
    let mut config = config(data_dir);
    let mut backend: BackendConfig = config.backends[0].clone();
    if let BackendKind::Mock { script: s, .. } = &mut backend.kind {
        *s = script;
    }
    config.backends = vec![backend];
    App::new(config).unwrap()
}
