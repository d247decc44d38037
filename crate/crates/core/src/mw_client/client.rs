use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::thread;
use std::time::Duration;

use chrono::{DateTime, Utc};
use log::{debug, warn};
use serde_json::Value;
use url::Url;

use super::cache::Cache;
use super::rate_limit::TokenBucket;
use super::transport::{HttpTransport, Transport};
use super::types::is_language_code;
use super::{ArticleRef, ClientError, PageDocument, Qid};

/// `pageprops` accepts at most 50 titles per request for ordinary clients.
pub const MAX_TITLES_PER_BATCH: usize = 50;

pub const DEFAULT_USER_AGENT: &str = concat!(
    "tablediff/",
    env!("CARGO_PKG_VERSION"),
    " (cross-language Wikipedia table comparison; read-only batch client)"
);

const CACHE_DIR_ENV: &str = "TABLEDIFF_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CachePolicy {
    PreferCache,
    Refresh,
    OfflineOnly,
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub cache_dir: PathBuf,
    /// Never touch the network; cache misses become errors.
    pub offline: bool,
    /// Ignore cached pages and language links.
    pub refresh: bool,
    pub requests_per_second: f64,
    pub user_agent: String,
    /// API endpoint with a `{lang}` placeholder.
    pub api_url_template: String,
    pub max_retries: u32,
    pub retry_backoff: Duration,
    pub timeout: Duration,
}

impl ClientConfig {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        ClientConfig {
            cache_dir: cache_dir.into(),
            offline: false,
            refresh: false,
            requests_per_second: 5.0,
            user_agent: DEFAULT_USER_AGENT.to_string(),
            api_url_template: "https://{lang}.wikipedia.org/w/api.php".to_string(),
            max_retries: 1,
            retry_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(60),
        }
    }

    /// `$TABLEDIFF_CACHE_DIR`, falling back to `.tablediff-cache` in the
    /// working directory.
    pub fn default_cache_dir() -> PathBuf {
        std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".tablediff-cache"))
    }

    fn policy(&self) -> CachePolicy {
        if self.offline {
            CachePolicy::OfflineOnly
        } else if self.refresh {
            CachePolicy::Refresh
        } else {
            CachePolicy::PreferCache
        }
    }
}

/// Resolves wiki page titles to Wikidata items, in batches.
pub trait QidResolver: Sync {
    fn resolve_qids(
        &self,
        language: &str,
        titles: &[String],
    ) -> Result<BTreeMap<String, Option<Qid>>, ClientError>;
}

/// Rate-limited, cached MediaWiki client. Safe to share between threads.
pub struct MwClient {
    config: ClientConfig,
    transport: Box<dyn Transport>,
    limiter: TokenBucket,
    cache: Cache,
}

impl MwClient {
    pub fn new(config: ClientConfig) -> Result<Self, ClientError> {
        let transport = HttpTransport::new(&config.user_agent, config.timeout)
            .map_err(|e| ClientError::Network(e.to_string()))?;
        Ok(Self::with_transport(config, Box::new(transport)))
    }

    pub fn with_transport(config: ClientConfig, transport: Box<dyn Transport>) -> Self {
        MwClient {
            limiter: TokenBucket::new(config.requests_per_second),
            cache: Cache::new(config.cache_dir.clone()),
            transport,
            config,
        }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    /// Policy derived from the client configuration (offline, refresh or
    /// prefer-cache).
    pub fn default_policy(&self) -> CachePolicy {
        self.config.policy()
    }

    /// Rendered HTML of the latest revision. An offline client always
    /// behaves as [`CachePolicy::OfflineOnly`].
    pub fn fetch_page(
        &self,
        article: &ArticleRef,
        policy: CachePolicy,
    ) -> Result<PageDocument, ClientError> {
        let policy = if self.config.offline {
            CachePolicy::OfflineOnly
        } else {
            policy
        };
        if policy != CachePolicy::Refresh {
            if let Some(doc) = self.cache.load_page(article)? {
                return Ok(doc);
            }
        }
        if policy == CachePolicy::OfflineOnly {
            return Err(ClientError::CacheMiss(format!("page {article}")));
        }
        let doc = self.download_page(article)?;
        self.cache.store_page(&doc)?;
        Ok(doc)
    }

    fn download_page(&self, article: &ArticleRef) -> Result<PageDocument, ClientError> {
        let lang = &article.language;
        let info = self.api_get(
            lang,
            &[
                ("action", "query"),
                ("prop", "revisions"),
                ("rvprop", "ids|timestamp"),
                ("redirects", "1"),
                ("titles", &article.title),
            ],
        )?;
        if let Some(code) = api_error_code(&info) {
            return Err(page_error(article, &code));
        }
        let page =
            first_page(&info).ok_or_else(|| ClientError::Api("query returned no pages".into()))?;
        if page_is_missing(page) {
            return Err(ClientError::PageMissing(article.clone()));
        }
        let revision = &page["revisions"][0];
        let revid = revision["revid"]
            .as_u64()
            .ok_or_else(|| ClientError::Api(format!("no revision id for {article}")))?;
        let revision_timestamp = parse_timestamp(&revision["timestamp"])?;

        let revid_param = revid.to_string();
        let parsed = self.api_get(
            lang,
            &[
                ("action", "parse"),
                ("prop", "text|revid"),
                ("oldid", &revid_param),
                ("disableeditsection", "1"),
                ("disablelimitreport", "1"),
            ],
        )?;
        if let Some(code) = api_error_code(&parsed) {
            return Err(page_error(article, &code));
        }
        let html = parsed["parse"]["text"]
            .as_str()
            .ok_or_else(|| ClientError::Api(format!("parse response for {article} has no text")))?
            .to_string();
        if html.is_empty() {
            return Err(ClientError::Api(format!("empty html for {article}")));
        }
        let revision_id = parsed["parse"]["revid"].as_u64().unwrap_or(revid);
        let fetched_at = Utc::now().max(revision_timestamp);
        Ok(PageDocument {
            article: article.clone(),
            html,
            revision_id,
            revision_timestamp,
            fetched_at,
        })
    }

    /// All language editions of an article, the queried one included, sorted
    /// by language code.
    pub fn list_language_versions(
        &self,
        article: &ArticleRef,
    ) -> Result<Vec<ArticleRef>, ClientError> {
        let policy = self.config.policy();
        if policy != CachePolicy::Refresh {
            if let Some(editions) = self.cache.load_langlinks(article)? {
                return Ok(editions);
            }
        }
        if policy == CachePolicy::OfflineOnly {
            return Err(ClientError::CacheMiss(format!(
                "language links of {article}"
            )));
        }

        let mut links = Vec::new();
        let mut continuation: Vec<(String, String)> = Vec::new();
        loop {
            let mut params: Vec<(&str, &str)> = vec![
                ("action", "query"),
                ("prop", "langlinks"),
                ("lllimit", "max"),
                ("redirects", "1"),
                ("titles", &article.title),
            ];
            params.extend(continuation.iter().map(|(k, v)| (k.as_str(), v.as_str())));
            let response = self.api_get(&article.language, &params)?;
            if let Some(code) = api_error_code(&response) {
                return Err(page_error(article, &code));
            }
            let page = first_page(&response)
                .ok_or_else(|| ClientError::Api("query returned no pages".into()))?;
            if page_is_missing(page) {
                return Err(ClientError::PageMissing(article.clone()));
            }
            if let Some(entries) = page["langlinks"].as_array() {
                for entry in entries {
                    if let (Some(lang), Some(title)) =
                        (entry["lang"].as_str(), entry["title"].as_str())
                    {
                        links.push((lang.to_string(), title.to_string()));
                    }
                }
            }
            match response.get("continue").and_then(Value::as_object) {
                Some(cont) => {
                    continuation = cont
                        .iter()
                        .filter_map(|(k, v)| v.as_str().map(|v| (k.clone(), v.to_string())))
                        .collect();
                }
                None => break,
            }
        }

        let editions = collect_editions(article, links);
        self.cache.store_langlinks(article, &editions)?;
        Ok(editions)
    }

    /// Wikidata item bound to a page, or `None` if the page or its item does
    /// not exist.
    pub fn resolve_qid(&self, language: &str, title: &str) -> Result<Option<Qid>, ClientError> {
        let titles = [title.to_string()];
        Ok(self
            .resolve_qids(language, &titles)?
            .remove(title)
            .flatten())
    }

    fn query_pageprops(
        &self,
        language: &str,
        titles: &[String],
    ) -> Result<BTreeMap<String, Option<Qid>>, ClientError> {
        let joined = titles.join("|");
        let response = self.api_get(
            language,
            &[
                ("action", "query"),
                ("prop", "pageprops"),
                ("ppprop", "wikibase_item"),
                ("redirects", "1"),
                ("titles", &joined),
            ],
        )?;
        if let Some(code) = api_error_code(&response) {
            return Err(ClientError::Api(format!("pageprops query failed: {code}")));
        }
        let query = &response["query"];
        let hops = |key: &str| -> HashMap<String, String> {
            query[key]
                .as_array()
                .map(|entries| {
                    entries
                        .iter()
                        .filter_map(|e| {
                            Some((
                                e["from"].as_str()?.to_string(),
                                e["to"].as_str()?.to_string(),
                            ))
                        })
                        .collect()
                })
                .unwrap_or_default()
        };
        let normalized = hops("normalized");
        let redirects = hops("redirects");
        let mut by_title: HashMap<&str, Option<Qid>> = HashMap::new();
        if let Some(pages) = query["pages"].as_array() {
            for page in pages {
                let Some(title) = page["title"].as_str() else {
                    continue;
                };
                let qid = if page_is_missing(page) {
                    None
                } else {
                    page["pageprops"]["wikibase_item"]
                        .as_str()
                        .and_then(|s| s.parse().ok())
                };
                by_title.insert(title, qid);
            }
        }

        let mut out = BTreeMap::new();
        for title in titles {
            let mut current = normalized
                .get(title)
                .cloned()
                .unwrap_or_else(|| title.clone());
            for _ in 0..8 {
                match redirects.get(&current) {
                    Some(next) if *next != current => current = next.clone(),
                    _ => break,
                }
            }
            out.insert(
                title.clone(),
                by_title.get(current.as_str()).copied().flatten(),
            );
        }
        Ok(out)
    }

    fn api_get(&self, language: &str, params: &[(&str, &str)]) -> Result<Value, ClientError> {
        if !is_language_code(language) {
            return Err(ClientError::Api(format!(
                "invalid language code {language:?}"
            )));
        }
        let base = self.config.api_url_template.replace("{lang}", language);
        let mut url =
            Url::parse(&base).map_err(|e| ClientError::Api(format!("bad API url {base}: {e}")))?;
        {
            let mut query = url.query_pairs_mut();
            query
                .append_pair("format", "json")
                .append_pair("formatversion", "2");
            for (k, v) in params {
                query.append_pair(k, v);
            }
        }

        let mut last_error = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                let delay = self.config.retry_backoff * 2u32.saturating_pow(attempt - 1);
                debug!("retrying {url} in {delay:?}");
                thread::sleep(delay);
            }
            self.limiter.acquire();
            match self.transport.get(&url) {
                Ok(response) if (200..300).contains(&response.status) => {
                    return serde_json::from_str(&response.body)
                        .map_err(|e| ClientError::Api(format!("invalid JSON from {url}: {e}")));
                }
                Ok(response) if response.status == 429 || response.status >= 500 => {
                    last_error = format!("HTTP {} from {url}", response.status);
                    warn!("{last_error}");
                }
                Ok(response) => {
                    return Err(ClientError::Network(format!(
                        "HTTP {} from {url}",
                        response.status
                    )));
                }
                Err(e) => {
                    last_error = format!("{e} ({url})");
                    warn!("{last_error}");
                }
            }
        }
        Err(ClientError::Network(last_error))
    }
}

impl QidResolver for MwClient {
    /// Cached lookups first; the remaining titles go out in batches of at
    /// most [`MAX_TITLES_PER_BATCH`]. Redirects are followed by the API.
    fn resolve_qids(
        &self,
        language: &str,
        titles: &[String],
    ) -> Result<BTreeMap<String, Option<Qid>>, ClientError> {
        let mut out = BTreeMap::new();
        let mut pending: Vec<String> = Vec::new();
        for title in titles {
            if out.contains_key(title) || pending.contains(title) {
                continue;
            }
            // '|' separates titles in the API and cannot occur in a real title.
            if title.trim().is_empty() || title.contains('|') {
                out.insert(title.clone(), None);
                continue;
            }
            match self.cache.lookup_qid(language, title)? {
                Some(hit) => {
                    out.insert(title.clone(), hit);
                }
                None => pending.push(title.clone()),
            }
        }
        if pending.is_empty() {
            return Ok(out);
        }
        if self.config.offline {
            return Err(ClientError::CacheMiss(format!(
                "item ids for {} title(s) in {language}, e.g. {:?}",
                pending.len(),
                pending[0]
            )));
        }
        for chunk in pending.chunks(MAX_TITLES_PER_BATCH) {
            let resolved = self.query_pageprops(language, chunk)?;
            self.cache.merge_qids(language, &resolved)?;
            out.extend(resolved);
        }
        Ok(out)
    }
}

fn collect_editions(article: &ArticleRef, links: Vec<(String, String)>) -> Vec<ArticleRef> {
    let mut by_language: BTreeMap<String, ArticleRef> = BTreeMap::new();
    by_language.insert(article.language.clone(), article.clone());
    for (lang, title) in links {
        match ArticleRef::new(lang, title) {
            Ok(edition) => {
                by_language
                    .entry(edition.language.clone())
                    .or_insert(edition);
            }
            Err(e) => debug!("skipping language link: {e}"),
        }
    }
    by_language.into_values().collect()
}

fn api_error_code(response: &Value) -> Option<String> {
    response
        .get("error")
        .map(|e| e["code"].as_str().unwrap_or("unknown").to_string())
}

fn page_error(article: &ArticleRef, code: &str) -> ClientError {
    match code {
        "missingtitle" | "nosuchrevid" | "nosuchpageid" | "invalidtitle" => {
            ClientError::PageMissing(article.clone())
        }
        _ => ClientError::Api(format!("{article}: API error {code}")),
    }
}

fn first_page(response: &Value) -> Option<&Value> {
    response["query"]["pages"]
        .as_array()
        .and_then(|pages| pages.first())
}

fn page_is_missing(page: &Value) -> bool {
    page.get("missing")
        .is_some_and(|v| v.as_bool() != Some(false))
        || page.get("invalid").is_some()
}

fn parse_timestamp(value: &Value) -> Result<DateTime<Utc>, ClientError> {
    let raw = value
        .as_str()
        .ok_or_else(|| ClientError::Api("revision has no timestamp".into()))?;
    DateTime::parse_from_rfc3339(raw)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| ClientError::Api(format!("bad timestamp {raw:?}: {e}")))
}
