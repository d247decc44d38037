//! Client for the MediaWiki Action API and the Wikidata page properties it
//! exposes, backed by an on-disk cache that doubles as the offline fixture
//! format.
//!
//! Cache layout under the cache root:
//!
//! ```text
//! pages/{lang}/{encoded title}.json      serialized PageDocument
//! langlinks/{lang}/{encoded title}.json  language editions of one article
//! qids.json                              { lang: { title: "Q123" | null } }
//! ```

mod cache;
mod client;
mod rate_limit;
mod references;
mod transport;
mod types;

pub use cache::{encode_title, Cache};
pub use client::{
    CachePolicy, ClientConfig, MwClient, QidResolver, DEFAULT_USER_AGENT, MAX_TITLES_PER_BATCH,
};
pub use rate_limit::TokenBucket;
pub use references::{count_references, ReferenceError};
pub use transport::{HttpResponse, HttpTransport, Transport, TransportError};
pub use types::{ArticleRef, InvalidInput, PageDocument, Qid};

use thiserror::Error;

/// Errors raised by [`MwClient`].
#[derive(Debug, Error)]
pub enum ClientError {
    /// The title does not exist in that language edition. This is a coverage
    /// gap, not a failed run.
    #[error("page {0} does not exist")]
    PageMissing(ArticleRef),
    #[error("network error: {0}")]
    Network(String),
    /// Offline mode and no cached snapshot.
    #[error("no cached copy of {0}")]
    CacheMiss(String),
    #[error("cache I/O error at {path}: {source}")]
    CacheIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unexpected API response: {0}")]
    Api(String),
}

impl ClientError {
    pub fn is_page_missing(&self) -> bool {
        matches!(self, ClientError::PageMissing(_))
    }
}
