use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::TokenBag;

/// One bag of words per entity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CorpusJson", into = "CorpusJson")]
pub struct Corpus {
    documents: BTreeMap<String, TokenBag>,
}

#[derive(Serialize, Deserialize)]
struct CorpusJson {
    documents: BTreeMap<String, TokenBag>,
}

impl TryFrom<CorpusJson> for Corpus {
    type Error = Error;

    fn try_from(value: CorpusJson) -> Result<Self> {
        let mut corpus = Corpus::new();
        for (id, bag) in value.documents {
            corpus.insert(id, bag)?;
        }
        Ok(corpus)
    }
}

impl From<Corpus> for CorpusJson {
    fn from(c: Corpus) -> Self {
        CorpusJson {
            documents: c.documents,
        }
    }
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a document. Zero counts are dropped.
    pub fn insert(&mut self, id: impl Into<String>, bag: TokenBag) -> Result<()> {
        let id = id.into();
        crate::model::validate_identifier(&id)?;
        for token in bag.keys() {
            if token.is_empty() || token.chars().any(char::is_whitespace) {
                return Err(Error::InvalidModel(format!(
                    "document `{id}` has invalid token {token:?}"
                )));
            }
        }
        self.documents
            .insert(id, bag.into_iter().filter(|(_, n)| *n > 0).collect());
        Ok(())
    }

    pub fn from_documents<I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, TokenBag)>,
        S: Into<String>,
    {
        let mut c = Corpus::new();
        for (id, bag) in docs {
            c.insert(id, bag)?;
        }
        Ok(c)
    }

    pub fn remove(&mut self, id: &str) -> Option<TokenBag> {
        self.documents.remove(id)
    }

    pub fn documents(&self) -> &BTreeMap<String, TokenBag> {
        &self.documents
    }

    pub fn document(&self, id: &str) -> Option<&TokenBag> {
        self.documents.get(id)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Sorted distinct tokens.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.documents
            .values()
            .flat_map(|bag| bag.keys().map(String::as_str))
            .collect()
    }

    pub fn total_tokens(&self) -> u64 {
        self.documents
            .values()
            .flat_map(|bag| bag.values())
            .map(|&n| u64::from(n))
            .sum()
    }

    /// Copy with document ids rewritten; unmapped ids are kept.
    pub fn renamed(&self, rename: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = Corpus::new();
        for (id, bag) in &self.documents {
            let new = rename.get(id).cloned().unwrap_or_else(|| id.clone());
            if c.documents.contains_key(&new) {
                return Err(Error::InvalidModel(format!("document id collision on `{new}`")));
            }
            c.insert(new, bag.clone())?;
        }
        Ok(c)
    }
}
