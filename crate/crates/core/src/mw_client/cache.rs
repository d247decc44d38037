use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ArticleRef, ClientError, PageDocument, Qid};

/// Everything except ASCII alphanumerics and `-._~` is escaped.
const TITLE_ENCODE: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

pub fn encode_title(title: &str) -> String {
    utf8_percent_encode(title, TITLE_ENCODE).to_string()
}

type QidMap = BTreeMap<String, BTreeMap<String, Option<Qid>>>;

/// File-backed cache. Writes go through a temporary file and a rename so a
/// reader never sees a partial file.
pub struct Cache {
    root: PathBuf,
    qids: Mutex<Option<QidMap>>,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache {
            root: root.into(),
            qids: Mutex::new(None),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn page_path(&self, article: &ArticleRef) -> PathBuf {
        self.root
            .join("pages")
            .join(&article.language)
            .join(format!("{}.json", encode_title(&article.title)))
    }

    pub fn langlinks_path(&self, article: &ArticleRef) -> PathBuf {
        self.root
            .join("langlinks")
            .join(&article.language)
            .join(format!("{}.json", encode_title(&article.title)))
    }

    pub fn qids_path(&self) -> PathBuf {
        self.root.join("qids.json")
    }

    pub fn load_page(&self, article: &ArticleRef) -> Result<Option<PageDocument>, ClientError> {
        read_json(&self.page_path(article))
    }

    pub fn store_page(&self, doc: &PageDocument) -> Result<(), ClientError> {
        write_json_atomic(&self.page_path(&doc.article), doc)
    }

    pub fn load_langlinks(
        &self,
        article: &ArticleRef,
    ) -> Result<Option<Vec<ArticleRef>>, ClientError> {
        read_json(&self.langlinks_path(article))
    }

    pub fn store_langlinks(
        &self,
        article: &ArticleRef,
        editions: &[ArticleRef],
    ) -> Result<(), ClientError> {
        write_json_atomic(&self.langlinks_path(article), &editions)
    }

    /// Cached QID lookup: `None` when the title was never resolved,
    /// `Some(None)` when it was resolved to "no item".
    pub fn lookup_qid(
        &self,
        language: &str,
        title: &str,
    ) -> Result<Option<Option<Qid>>, ClientError> {
        let mut guard = self.qids.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(read_json(&self.qids_path())?.unwrap_or_default());
        }
        Ok(guard
            .as_ref()
            .and_then(|m| m.get(language))
            .and_then(|m| m.get(title))
            .copied())
    }

    /// Merges resolved titles into `qids.json`, re-reading the file first so
    /// entries written by other processes are kept.
    pub fn merge_qids(
        &self,
        language: &str,
        resolved: &BTreeMap<String, Option<Qid>>,
    ) -> Result<(), ClientError> {
        if resolved.is_empty() {
            return Ok(());
        }
        let mut guard = self.qids.lock().unwrap_or_else(|p| p.into_inner());
        let mut on_disk: QidMap = read_json(&self.qids_path())?.unwrap_or_default();
        let entry = on_disk.entry(language.to_string()).or_default();
        for (title, qid) in resolved {
            entry.insert(title.clone(), *qid);
        }
        write_json_atomic(&self.qids_path(), &on_disk)?;
        *guard = Some(on_disk);
        Ok(())
    }
}

fn io_err(path: &Path, source: io::Error) -> ClientError {
    ClientError::CacheIo {
        path: path.display().to_string(),
        source,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<Option<T>, ClientError> {
    match fs::read(path) {
        Ok(bytes) => serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|e| io_err(path, io::Error::new(io::ErrorKind::InvalidData, e))),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_err(path, e)),
    }
}

fn write_json_atomic<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ClientError> {
    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| io_err(path, io::Error::new(io::ErrorKind::InvalidData, e)))?;
    bytes.push(b'\n');
    let tmp = parent.join(format!(
        ".{}.{}.{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("cache"),
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, &bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}
