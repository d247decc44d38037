use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct InvalidInput(pub String);

/// One language edition of one article.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawArticleRef")]
pub struct ArticleRef {
    pub language: String,
    pub title: String,
}

#[derive(Deserialize)]
struct RawArticleRef {
    language: String,
    title: String,
}

impl TryFrom<RawArticleRef> for ArticleRef {
    type Error = InvalidInput;

    fn try_from(raw: RawArticleRef) -> Result<Self, Self::Error> {
        ArticleRef::new(raw.language, raw.title)
    }
}

impl ArticleRef {
    pub fn new(
        language: impl Into<String>,
        title: impl Into<String>,
    ) -> Result<Self, InvalidInput> {
        let language = language.into();
        let title = title.into();
        if !is_language_code(&language) {
            return Err(InvalidInput(format!("invalid language code {language:?}")));
        }
        if title.trim().is_empty() {
            return Err(InvalidInput("empty page title".into()));
        }
        Ok(ArticleRef { language, title })
    }
}

/// Lowercase ASCII letters, digits and hyphens (`en`, `zh`, `zh-yue`, `be-tarask`).
pub(crate) fn is_language_code(code: &str) -> bool {
    !code.is_empty()
        && code.starts_with(|c: char| c.is_ascii_lowercase())
        && code
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
}

impl fmt::Display for ArticleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.language, self.title)
    }
}

/// Rendered HTML of the latest revision of a page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageDocument {
    pub article: ArticleRef,
    pub html: String,
    pub revision_id: u64,
    pub revision_timestamp: DateTime<Utc>,
    pub fetched_at: DateTime<Utc>,
}

impl PageDocument {
    pub fn validate(&self) -> Result<(), InvalidInput> {
        if self.html.is_empty() {
            return Err(InvalidInput(format!("{}: empty html", self.article)));
        }
        if self.revision_timestamp > self.fetched_at {
            return Err(InvalidInput(format!(
                "{}: revision timestamp is after fetch time",
                self.article
            )));
        }
        Ok(())
    }
}

/// Wikidata item identifier such as `Q513`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qid(u64);

impl Qid {
    pub fn new(number: u64) -> Result<Self, InvalidInput> {
        if number == 0 {
            return Err(InvalidInput("Q0 is not a valid item id".into()));
        }
        Ok(Qid(number))
    }

    pub fn number(self) -> u64 {
        self.0
    }
}

impl FromStr for Qid {
    type Err = InvalidInput;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix('Q')
            .ok_or_else(|| InvalidInput(format!("{s:?} does not start with Q")))?;
        if digits.is_empty()
            || digits.starts_with('0')
            || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(InvalidInput(format!("{s:?} is not a valid item id")));
        }
        let number = digits
            .parse()
            .map_err(|_| InvalidInput(format!("{s:?} is out of range")))?;
        Qid::new(number)
    }
}

impl fmt::Display for Qid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.0)
    }
}

impl Serialize for Qid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
