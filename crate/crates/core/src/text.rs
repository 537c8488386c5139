//! Source text to bag-of-words: comment handling, identifier splitting,
//! stop words and stemming.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// General English stop words.
pub const ENGLISH_STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few",
    "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers",
    "herself", "him", "himself", "his", "how", "if", "in", "into", "is", "it", "its", "itself",
    "just", "me", "more", "most", "must", "my", "myself", "no", "nor", "not", "now", "of", "off",
    "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
    "shall", "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
    "too", "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves",
];

/// Words of the Apache License 2.0 file header, minus general stop words and
/// a few generic terms ("file", "work", "use") that are common in code.
pub const APACHE_LICENSE_LEXICON: &[&str] = &[
    "licensed", "license", "licenses", "apache", "software", "foundation", "asf", "contributor",
    "agreements", "notice", "distributed", "additional", "information", "regarding",
    "copyright", "ownership", "compliance", "obtain", "copy", "http", "https", "www", "org",
    "unless", "required", "applicable", "law", "agreed", "writing", "basis", "warranties",
    "conditions", "kind", "either", "express", "implied", "specific", "language", "governing",
    "permissions", "limitations",
];

/// Minimum number of lexicon hits for a leading comment to count as a
/// license header.
pub const LICENSE_HEADER_MIN_HITS: usize = 5;

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Porter-family English stem of a lowercase token.
pub fn stem(token: &str) -> String {
    stemmer().stem(token).into_owned()
}

/// Stop words grouped by origin. All entries are lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StopWordSet {
    pub general: BTreeSet<String>,
    pub domain_specific: BTreeSet<String>,
    /// Derived automatically, e.g. from the system name.
    pub auto: BTreeSet<String>,
}

impl StopWordSet {
    pub fn english() -> Self {
        StopWordSet {
            general: ENGLISH_STOP_WORDS.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.general.contains(token) || self.domain_specific.contains(token) || self.auto.contains(token)
    }

    pub fn add_domain_words<I, S>(&mut self, words: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.domain_specific
            .extend(words.into_iter().map(|w| w.as_ref().to_lowercase()));
    }

    /// Auto tokens plus their stems, for matching against stemmed topic words.
    pub fn auto_forms(&self) -> BTreeSet<String> {
        self.auto
            .iter()
            .flat_map(|w| [w.clone(), stem(w)])
            .collect()
    }
}

/// Builds a stop-word set from a general list, an optional domain file
/// (whitespace separated words, `#` starts a comment) and an optional system
/// name whose tokens become auto stop words.
pub fn build_stopword_set<S: AsRef<str>>(
    general: &[S],
    domain_file: Option<&Path>,
    system_name: Option<&str>,
) -> Result<StopWordSet> {
    if general.is_empty() {
        return Err(Error::Config("general stop-word list is empty".into()));
    }
    let mut set = StopWordSet {
        general: general.iter().map(|w| w.as_ref().to_lowercase()).collect(),
        ..Default::default()
    };
    if let Some(path) = domain_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read stop-word file {}: {e}", path.display())))?;
        set.add_domain_words(parse_word_list(&text));
    }
    if let Some(name) = system_name {
        set.auto = split_identifiers(name)
            .into_iter()
            .map(|t| t.to_lowercase())
            .filter(|t| keep_token(t))
            .collect();
    }
    Ok(set)
}

pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::to_lowercase)
        .collect()
}

/// Lexicon lookup that accepts both raw and stemmed forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LicenseLexicon {
    words: BTreeSet<String>,
}

impl LicenseLexicon {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        LicenseLexicon {
            words: words
                .into_iter()
                .flat_map(|w| {
                    let w = w.as_ref().to_lowercase();
                    let s = stem(&w);
                    [w, s]
                })
                .collect(),
        }
    }

    pub fn apache() -> Self {
        Self::new(APACHE_LICENSE_LEXICON)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }
}

impl Default for LicenseLexicon {
    fn default() -> Self {
        Self::apache()
    }
}

/// Comment conventions, chosen from the file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommentSyntax {
    /// `//` and `/* */`, double-quoted strings.
    CStyle,
    /// `#` line comments.
    Hash,
}

impl CommentSyntax {
    pub fn for_extension(ext: &str) -> Self {
        match ext {
            "py" | "sh" | "rb" | "pl" | "r" | "R" | "yaml" | "yml" | "toml" | "cmake" => CommentSyntax::Hash,
            _ => CommentSyntax::CStyle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SegmentKind {
    Code,
    Comment,
}

/// Splits text into alternating code and comment byte ranges.
fn segments(text: &str, syntax: CommentSyntax) -> Vec<(SegmentKind, std::ops::Range<usize>)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    let push = |kind, range: std::ops::Range<usize>, out: &mut Vec<_>| {
        if !range.is_empty() {
            out.push((kind, range));
        }
    };
    while i < bytes.len() {
        match (syntax, bytes[i]) {
            (_, b'"') => {
                // string literal; comments inside are code
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 1).min(bytes.len());
            }
            (CommentSyntax::CStyle, b'/') if bytes.get(i + 1) == Some(&b'/') => {
                push(SegmentKind::Code, start..i, &mut out);
                let end = text[i..].find('\n').map_or(bytes.len(), |n| i + n);
                push(SegmentKind::Comment, i..end, &mut out);
                start = end;
                i = end;
            }
            (CommentSyntax::CStyle, b'/') if bytes.get(i + 1) == Some(&b'*') => {
                push(SegmentKind::Code, start..i, &mut out);
                let end = text[i + 2..].find("*/").map_or(bytes.len(), |n| i + 2 + n + 2);
                push(SegmentKind::Comment, i..end, &mut out);
                start = end;
                i = end;
            }
            (CommentSyntax::Hash, b'#') => {
                push(SegmentKind::Code, start..i, &mut out);
                let end = text[i..].find('\n').map_or(bytes.len(), |n| i + n);
                push(SegmentKind::Comment, i..end, &mut out);
                start = end;
                i = end;
            }
            _ => i += 1,
        }
    }
    push(SegmentKind::Code, start..bytes.len(), &mut out);
    out
}

/// Byte ranges of every comment, delimiters included.
pub fn comment_ranges(text: &str, syntax: CommentSyntax) -> Vec<std::ops::Range<usize>> {
    segments(text, syntax)
        .into_iter()
        .filter(|(kind, _)| *kind == SegmentKind::Comment)
        .map(|(_, range)| range)
        .collect()
}

/// Replaces every comment with a single space.
pub fn strip_comments(text: &str, syntax: CommentSyntax) -> String {
    let mut out = String::with_capacity(text.len());
    for (kind, range) in segments(text, syntax) {
        match kind {
            SegmentKind::Code => out.push_str(&text[range]),
            SegmentKind::Comment => out.push(' '),
        }
    }
    out
}

/// Drops the leading comment block (consecutive comments separated only by
/// whitespace) when it contains at least [`LICENSE_HEADER_MIN_HITS`] license
/// lexicon tokens. Returns the text unchanged otherwise.
pub fn strip_license_header(text: &str, syntax: CommentSyntax, lexicon: &LicenseLexicon) -> String {
    let segs = segments(text, syntax);
    let mut end = 0;
    let mut saw_comment = false;
    for (kind, range) in &segs {
        match kind {
            SegmentKind::Comment => {
                saw_comment = true;
                end = range.end;
            }
            SegmentKind::Code if text[range.clone()].trim().is_empty() => {}
            SegmentKind::Code => break,
        }
    }
    if !saw_comment {
        return text.to_string();
    }
    let hits = split_identifiers(&text[..end])
        .into_iter()
        .filter(|t| lexicon.contains(&t.to_lowercase()))
        .count();
    if hits >= LICENSE_HEADER_MIN_HITS {
        text[end..].trim_start_matches(['\r', '\n']).to_string()
    } else {
        text.to_string()
    }
}

/// Splits on non-alphanumerics and camelCase boundaries; case is preserved.
///
/// `XMLParser` splits as `XML`, `Parser`; digits stay with the preceding
/// letters (`utf8Decoder` gives `utf8`, `Decoder`).
pub fn split_identifiers(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for word in text.split(|c: char| !c.is_alphanumeric()) {
        if word.is_empty() {
            continue;
        }
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        let mut start = 0;
        for k in 1..chars.len() {
            let (pos, c) = chars[k];
            let prev = chars[k - 1].1;
            let next = chars.get(k + 1).map(|&(_, n)| n);
            let boundary = c.is_uppercase()
                && (prev.is_lowercase()
                    || prev.is_ascii_digit()
                    || (prev.is_uppercase() && next.is_some_and(char::is_lowercase)));
            if boundary {
                out.push(&word[start..pos]);
                start = pos;
            }
        }
        out.push(&word[start..]);
    }
    out
}

fn keep_token(t: &str) -> bool {
    t.chars().count() >= 2 && !t.chars().all(|c| c.is_ascii_digit())
}

/// Options for [`tokenize_document`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TokenizeOptions {
    pub stem: bool,
    pub strip_comments: bool,
    pub strip_license_header: bool,
    pub syntax: CommentSyntax,
}

impl Default for TokenizeOptions {
    fn default() -> Self {
        TokenizeOptions {
            stem: true,
            strip_comments: false,
            strip_license_header: false,
            syntax: CommentSyntax::CStyle,
        }
    }
}

pub type TokenBag = BTreeMap<String, u32>;

/// Text to token multiset: optional comment and license stripping, identifier
/// splitting, lowercasing, length and digit filtering, stop-word removal and
/// optional stemming.
pub fn tokenize_document(text: &str, stops: &StopWordSet, options: &TokenizeOptions) -> TokenBag {
    tokenize_with_lexicon(text, stops, options, &LicenseLexicon::apache())
}

pub fn tokenize_with_lexicon(
    text: &str,
    stops: &StopWordSet,
    options: &TokenizeOptions,
    lexicon: &LicenseLexicon,
) -> TokenBag {
    let mut text = std::borrow::Cow::Borrowed(text);
    if options.strip_license_header {
        text = strip_license_header(&text, options.syntax, lexicon).into();
    }
    if options.strip_comments {
        text = strip_comments(&text, options.syntax).into();
    }
    let mut bag = TokenBag::new();
    for raw in split_identifiers(&text) {
        let token = raw.to_lowercase();
        if !keep_token(&token) || stops.contains(&token) {
            continue;
        }
        let token = if options.stem { stem(&token) } else { token };
        if token.is_empty() {
            continue;
        }
        *bag.entry(token).or_insert(0) += 1;
    }
    bag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bag(words: &[&str]) -> TokenBag {
        let mut b = TokenBag::new();
        for w in words {
            *b.entry(w.to_string()).or_insert(0) += 1;
        }
        b
    }

    fn no_stem() -> TokenizeOptions {
        TokenizeOptions {
            stem: false,
            ..Default::default()
        }
    }

    #[test]
    fn camel_case_split() {
        let got = tokenize_document("FileSystemReader", &StopWordSet::default(), &no_stem());
        assert_eq!(got, bag(&["file", "system", "reader"]));
        assert_eq!(split_identifiers("XMLParser utf8Decoder Http2Client"), [
            "XML", "Parser", "utf8", "Decoder", "Http2", "Client"
        ]);
    }

    #[test]
    fn stemmed_tokens() {
        let got = tokenize_document(
            "apache software configuration",
            &StopWordSet::default(),
            &TokenizeOptions::default(),
        );
        assert_eq!(got, bag(&["apach", "softwar", "configur"]));
    }

    #[test]
    fn stop_words_removed_before_stemming() {
        let mut stops = StopWordSet::default();
        stops.general.insert("the".into());
        let got = tokenize_document("the Data", &stops, &no_stem());
        assert_eq!(got, bag(&["data"]));
    }

    #[test]
    fn short_and_numeric_tokens_dropped() {
        let got = tokenize_document("a x1 42 qe 2019", &StopWordSet::default(), &no_stem());
        assert_eq!(got, bag(&["x1", "qe"]));
    }

    #[test]
    fn comment_stripping_respects_strings() {
        let src = "int a = 1; // trailing note\n/* block\n text */ String s = \"// not comment\";";
        let out = strip_comments(src, CommentSyntax::CStyle);
        assert!(!out.contains("trailing"));
        assert!(!out.contains("block"));
        assert!(out.contains("\"// not comment\""));
        let py = "x = 1  # note\ny = '#'";
        assert!(!strip_comments(py, CommentSyntax::Hash).contains("note"));
    }

    #[test]
    fn comment_only_edit_invisible_when_stripping() {
        let opts = TokenizeOptions {
            strip_comments: true,
            ..Default::default()
        };
        let stops = StopWordSet::english();
        let a = tokenize_document("class Foo { // handles the buffer\n int size; }", &stops, &opts);
        let b = tokenize_document("class Foo { // handles the bufver\n int size; }", &stops, &opts);
        assert_eq!(a, b);
    }

    const HEADER: &str = "/*\n * Licensed to the Apache Software Foundation (ASF) under one\n * or more contributor license agreements.  See the NOTICE file\n */\n";

    #[test]
    fn license_header_stripped_only_when_lexicon_matches() {
        let lex = LicenseLexicon::apache();
        let src = format!("{HEADER}package org.foo;\n/* licensed apache software */ class A {{}}");
        let out = strip_license_header(&src, CommentSyntax::CStyle, &lex);
        assert!(out.starts_with("package org.foo;"));
        assert!(out.contains("licensed apache software"));

        let plain = "/* Reads buffers from disk. */\nclass A {}";
        assert_eq!(strip_license_header(plain, CommentSyntax::CStyle, &lex), plain);
        let no_comment = "class A {}";
        assert_eq!(strip_license_header(no_comment, CommentSyntax::CStyle, &lex), no_comment);
    }

    #[test]
    fn lexicon_matches_stems() {
        let lex = LicenseLexicon::apache();
        for w in ["apach", "softwar", "notic", "foundat", "agre", "licensed", "inform"] {
            assert!(lex.contains(w), "{w}");
        }
        assert!(!lex.contains("buffer"));
    }

    #[test]
    fn system_name_becomes_auto_stop_words() {
        let set = build_stopword_set(&["the"], None, Some("Apache Chukwa")).unwrap();
        assert_eq!(set.auto, ["apache", "chukwa"].iter().map(|s| s.to_string()).collect());
        let none = build_stopword_set(&["the"], None, None).unwrap();
        assert!(none.auto.is_empty());
        assert!(build_stopword_set::<&str>(&[], None, None).is_err());
    }

    #[test]
    fn domain_file_loaded() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stops.txt");
        std::fs::write(&path, "data\ncode # common in every system\n").unwrap();
        let set = build_stopword_set(&["the"], Some(&path), None).unwrap();
        assert_eq!(set.domain_specific, ["code", "data"].iter().map(|s| s.to_string()).collect());
        let missing = build_stopword_set(&["the"], Some(&dir.path().join("nope")), None);
        assert!(matches!(missing, Err(Error::Config(_))));
    }
}
