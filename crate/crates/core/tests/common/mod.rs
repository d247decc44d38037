#![allow(dead_code)]

pub mod alignment_oracle;
pub mod perturb;
pub mod spans_oracle;

use std::path::PathBuf;

use tablediff::manifest::DatasetManifest;
use tablediff::mw_client::{ClientConfig, MwClient};
use tablediff::schema_align::HeaderMapping;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture_cache() -> PathBuf {
    repo_root().join("fixtures/cache")
}

pub fn offline_client_at(cache: PathBuf) -> MwClient {
    let mut config = ClientConfig::new(cache);
    config.offline = true;
    MwClient::new(config).unwrap()
}

pub fn offline_client() -> MwClient {
    offline_client_at(fixture_cache())
}

pub fn manifest(name: &str) -> DatasetManifest {
    DatasetManifest::load(&repo_root().join("datasets").join(name)).unwrap()
}

pub fn mapping() -> HeaderMapping {
    HeaderMapping::load(&repo_root().join("mappings/geography.json")).unwrap()
}

/// Copies the fixture cache into a temporary directory.
pub fn cache_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixture_cache(), dir.path());
    dir
}

fn copy_dir(from: &std::path::Path, to: &std::path::Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}
