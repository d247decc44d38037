//! Dataset manifests: which article families to analyze, in which
//! languages, with which settings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mw_client::ArticleRef;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid manifest: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LanguageSelection {
    /// The literal string `"all"`: every edition the seed links to.
    All(AllMarker),
    Listed(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllMarker {
    All,
}

impl LanguageSelection {
    pub fn all() -> Self {
        LanguageSelection::All(AllMarker::All)
    }
}

impl Default for LanguageSelection {
    fn default() -> Self {
        LanguageSelection::all()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyOverrides {
    /// Main table per language.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub main_table_index: BTreeMap<String, usize>,
    /// Entity column per language, per table index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub column_hint: BTreeMap<String, BTreeMap<usize, usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub id: String,
    pub seed: ArticleRef,
    #[serde(default)]
    pub languages: LanguageSelection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: FamilyOverrides,
}

fn is_default<T: Default + PartialEq>(value: &T) -> bool {
    *value == T::default()
}

/// Analysis settings a manifest may carry. Command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub languages: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub staleness_days: Option<i64>,
    /// Relative to the manifest file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub header_map: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_tables: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_tokens: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    #[serde(default)]
    pub families: Vec<FamilySpec>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub settings: ManifestSettings,
}

fn valid_language(code: &str) -> bool {
    ArticleRef::new(code, "x").is_ok()
}

impl DatasetManifest {
    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let manifest: DatasetManifest = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Loads a manifest and resolves its relative paths against the
    /// manifest's directory.
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut manifest = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut manifest.settings.header_map,
            &mut manifest.settings.cache_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        let mut ids = BTreeSet::new();
        for family in &self.families {
            if family.id.trim().is_empty() {
                return Err(ManifestError::Invalid("empty family id".into()));
            }
            if !family
                .id
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
            {
                return Err(ManifestError::Invalid(format!(
                    "family id {:?} may only contain letters, digits, '_', '-' and '.'",
                    family.id
                )));
            }
            if !ids.insert(family.id.as_str()) {
                return Err(ManifestError::Invalid(format!(
                    "duplicate family id {:?}",
                    family.id
                )));
            }
            if let LanguageSelection::Listed(list) = &family.languages {
                if let Some(bad) = list.iter().find(|l| !valid_language(l)) {
                    return Err(ManifestError::Invalid(format!(
                        "family {:?}: invalid language code {bad:?}",
                        family.id
                    )));
                }
            }
            let override_langs = family
                .overrides
                .main_table_index
                .keys()
                .chain(family.overrides.column_hint.keys());
            for l in override_langs {
                if !valid_language(l) {
                    return Err(ManifestError::Invalid(format!(
                        "family {:?}: invalid override language {l:?}",
                        family.id
                    )));
                }
            }
        }
        if let Some(bad) = self
            .settings
            .languages
            .iter()
            .flatten()
            .find(|l| !valid_language(l))
        {
            return Err(ManifestError::Invalid(format!(
                "invalid language code {bad:?}"
            )));
        }
        if let Some(tol) = self.settings.rel_tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(ManifestError::Invalid(format!(
                    "rel_tol must be a non-negative number, got {tol}"
                )));
            }
        }
        if self.settings.staleness_days.is_some_and(|d| d < 0) {
            return Err(ManifestError::Invalid(
                "staleness_days must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_listed_and_all() {
        let m = DatasetManifest::from_json(
            r#"{"families": [
                {"id": "a", "seed": {"language": "en", "title": "Seven Summits"}, "languages": ["en", "de"]},
                {"id": "b", "seed": {"language": "en", "title": "Alps"}, "languages": "all",
                 "overrides": {"main_table_index": {"de": 2}, "column_hint": {"en": {"0": 1}}}},
                {"id": "c", "seed": {"language": "en", "title": "K2"}}
            ]}"#,
        )
        .unwrap();
        assert_eq!(
            m.families[0].languages,
            LanguageSelection::Listed(vec!["en".into(), "de".into()])
        );
        assert_eq!(m.families[1].languages, LanguageSelection::all());
        assert_eq!(m.families[1].overrides.column_hint["en"][&0], 1);
        assert_eq!(m.families[2].languages, LanguageSelection::all());
        let round = serde_json::to_string(&m).unwrap();
        assert_eq!(DatasetManifest::from_json(&round).unwrap(), m);
    }

    #[test]
    fn empty_manifest_is_valid() {
        assert!(DatasetManifest::from_json("{}")
            .unwrap()
            .families
            .is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"families": [{"id": "a", "seed": {"language": "en", "title": "X"}}, {"id": "a", "seed": {"language": "en", "title": "Y"}}]}"#,
            r#"{"families": [{"id": "a", "seed": {"language": "EN!", "title": "X"}}]}"#,
            r#"{"families": [{"id": "a", "seed": {"language": "en", "title": "X"}, "languages": ["en", "D E"]}]}"#,
            r#"{"families": [{"id": "a/b", "seed": {"language": "en", "title": "X"}}]}"#,
            r#"{"families": [{"id": "a", "seed": {"language": "en", "title": "X"}, "overrides": {"main_table_index": {"de": -1}}}]}"#,
            r#"{"settings": {"rel_tol": -0.5}}"#,
            r#"{"famlies": []}"#,
            "not json",
        ] {
            assert!(DatasetManifest::from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn relative_paths_resolve_against_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, r#"{"settings": {"header_map": "maps/geo.json"}}"#).unwrap();
        let m = DatasetManifest::load(&path).unwrap();
        assert_eq!(
            m.settings.header_map.unwrap(),
            dir.path().join("maps/geo.json")
        );
    }
}
