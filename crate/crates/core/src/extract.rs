//! Lexical fact extraction: entities from files, dependencies from import
//! statements and qualified references, one bag-of-words document per file.
//!
//! There is no parser and no type resolution. A reference becomes an edge
//! only when it resolves to an entity of the scanned system (closed world);
//! everything else is recorded as an external reference.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::{package_of, DependencyGraph, Entity, EntitySet};
use crate::text::{strip_comments, tokenize_with_lexicon, CommentSyntax, LicenseLexicon, StopWordSet, TokenizeOptions};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ExtractOptions {
    /// File extensions without the dot.
    pub extensions: Vec<String>,
    pub strip_comments: bool,
    pub strip_license_header: bool,
    pub stem: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            extensions: vec!["java".into()],
            strip_comments: false,
            strip_license_header: false,
            stem: true,
        }
    }
}

/// Source files keyed by `/`-separated path relative to the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSystem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<PathBuf>,
    pub files: BTreeMap<String, String>,
}

impl SourceSystem {
    pub fn from_files<I, P, T>(files: I) -> Self
    where
        I: IntoIterator<Item = (P, T)>,
        P: Into<String>,
        T: Into<String>,
    {
        SourceSystem {
            root: None,
            files: files.into_iter().map(|(p, t)| (p.into(), t.into())).collect(),
        }
    }

    /// Reads every file under `root` whose extension is in `extensions`.
    /// Unreadable files are skipped and reported as warnings.
    pub fn read(root: &Path, extensions: &[String]) -> Result<(Self, Vec<String>)> {
        if !root.is_dir() {
            return Err(Error::io(
                root,
                std::io::Error::new(std::io::ErrorKind::NotFound, "not a readable directory"),
            ));
        }
        let mut files = BTreeMap::new();
        let mut warnings = Vec::new();
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = match entry {
                Ok(e) => e,
                Err(e) => {
                    warnings.push(format!("skipped: {e}"));
                    continue;
                }
            };
            let path = entry.path();
            if !entry.file_type().is_file() {
                continue;
            }
            let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
            if !extensions.iter().any(|x| x == ext) {
                continue;
            }
            let rel = path
                .strip_prefix(root)
                .expect("walkdir yields paths under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            match std::fs::read(path).map(String::from_utf8) {
                Ok(Ok(text)) => {
                    files.insert(rel, text);
                }
                Ok(Err(_)) => warnings.push(format!("skipped {rel}: not valid UTF-8")),
                Err(e) => warnings.push(format!("skipped {rel}: {e}")),
            }
        }
        Ok((
            SourceSystem {
                root: Some(root.to_path_buf()),
                files,
            },
            warnings,
        ))
    }

    fn label(&self) -> PathBuf {
        self.root.clone().unwrap_or_else(|| PathBuf::from("<memory>"))
    }
}

/// Result of scanning a source system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Extraction {
    pub entities: EntitySet,
    pub graph: DependencyGraph,
    pub corpus: Corpus,
    /// Per entity, referenced names that did not resolve inside the system.
    pub external_references: BTreeMap<String, BTreeSet<String>>,
    pub warnings: Vec<String>,
}

fn extension_of(path: &str) -> &str {
    let name = path.rsplit('/').next().unwrap_or(path);
    name.rfind('.').map_or("", |i| &name[i + 1..])
}

fn file_stem(path: &str) -> &str {
    let name = path.rsplit('/').next().unwrap_or(path);
    name.rfind('.').map_or(name, |i| &name[..i])
}

fn sanitize_segment(seg: &str) -> String {
    let s: String = seg
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' || c == '$' || c == '-' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "_".into()
    } else {
        s
    }
}

fn path_derived_id(path: &str) -> String {
    let without_ext = match path.rfind('.') {
        Some(i) if !path[i..].contains('/') => &path[..i],
        _ => path,
    };
    without_ext
        .split('/')
        .filter(|s| !s.is_empty())
        .map(sanitize_segment)
        .collect::<Vec<_>>()
        .join(".")
}

fn dotted_name(s: &str) -> Option<String> {
    let name: String = s
        .chars()
        .take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '$' | '.' | '*'))
        .collect();
    let name = name.trim_end_matches('.');
    (!name.is_empty() && !name.starts_with('.')).then(|| name.to_string())
}

fn package_declaration(code: &str) -> Option<String> {
    code.lines().find_map(|line| {
        let rest = line.trim().strip_prefix("package")?;
        if !rest.starts_with(char::is_whitespace) {
            return None;
        }
        dotted_name(rest.trim_start()).filter(|n| !n.contains('*'))
    })
}

/// Targets named by `import` / `from ... import` statements.
fn import_targets(code: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in code.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("import") {
            if !rest.starts_with(char::is_whitespace) {
                continue;
            }
            let rest = rest.trim_start();
            let rest = rest.strip_prefix("static").filter(|r| r.starts_with(char::is_whitespace)).map_or(rest, str::trim_start);
            for part in rest.split(',') {
                if let Some(n) = dotted_name(part.trim()) {
                    out.push(n);
                }
            }
        } else if let Some(rest) = line.strip_prefix("from") {
            if !rest.starts_with(char::is_whitespace) {
                continue;
            }
            let mut parts = rest.split_whitespace();
            let (Some(module), Some("import")) = (parts.next(), parts.next()) else {
                continue;
            };
            let Some(module) = dotted_name(module) else { continue };
            out.push(module.clone());
            for name in parts.flat_map(|p| p.split(',')).filter_map(|p| dotted_name(p.trim())) {
                if name != "as" {
                    out.push(format!("{module}.{name}"));
                }
            }
        }
    }
    out
}

/// Dotted identifier chains (`a.b.C`) and plain identifiers in code.
fn identifier_chains(code: &str) -> Vec<&str> {
    let is_start = |c: char| c.is_alphabetic() || c == '_' || c == '$';
    let is_part = |c: char| c.is_alphanumeric() || c == '_' || c == '$';
    let mut out = Vec::new();
    let mut iter = code.char_indices().peekable();
    while let Some((start, c)) = iter.next() {
        if !is_start(c) {
            continue;
        }
        let mut end = start + c.len_utf8();
        while let Some(&(i, c)) = iter.peek() {
            let dot_continues = c == '.'
                && code[i + 1..].chars().next().is_some_and(is_start);
            if is_part(c) || dot_continues {
                end = i + c.len_utf8();
                iter.next();
            } else {
                break;
            }
        }
        out.push(&code[start..end]);
    }
    out
}

struct Resolver<'a> {
    ids: HashSet<&'a str>,
    by_package: HashMap<&'a str, Vec<&'a str>>,
    by_simple_name: HashMap<(&'a str, &'a str), &'a str>,
}

impl<'a> Resolver<'a> {
    fn new(entities: &'a EntitySet) -> Self {
        let mut by_package: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut by_simple_name = HashMap::new();
        for e in entities.iter() {
            by_package.entry(e.package.as_str()).or_default().push(e.id.as_str());
            by_simple_name.insert((e.package.as_str(), crate::model::simple_name(&e.id)), e.id.as_str());
        }
        Resolver {
            ids: entities.ids().collect(),
            by_package,
            by_simple_name,
        }
    }

    /// Longest dot-prefix of `name` that is a known entity id.
    fn longest_prefix(&self, name: &str) -> Option<&'a str> {
        let mut candidate = name;
        loop {
            if let Some(id) = self.ids.get(candidate) {
                return Some(id);
            }
            candidate = &candidate[..candidate.rfind('.')?];
        }
    }

    fn resolve_import(&self, target: &str) -> Vec<&'a str> {
        if let Some(pkg) = target.strip_suffix(".*") {
            return self.by_package.get(pkg).cloned().unwrap_or_default();
        }
        self.longest_prefix(target).into_iter().collect()
    }
}

/// Scans an in-memory source system. Files are processed in path order, so
/// the result does not depend on how they were collected.
pub fn extract(system: &SourceSystem, options: &ExtractOptions, stops: &StopWordSet) -> Result<Extraction> {
    let lexicon = LicenseLexicon::apache();
    let mut warnings = Vec::new();
    let mut entities = EntitySet::new();
    // (entity id, path, comment-free code, syntax)
    let mut units: Vec<(String, &str, String, CommentSyntax)> = Vec::new();

    for (path, text) in &system.files {
        let ext = extension_of(path);
        if !options.extensions.iter().any(|x| x == ext) {
            continue;
        }
        let syntax = CommentSyntax::for_extension(ext);
        let code = strip_comments(text, syntax);
        let mut id = match package_declaration(&code) {
            Some(pkg) => format!("{pkg}.{}", sanitize_segment(file_stem(path))),
            None => path_derived_id(path),
        };
        if entities.contains(&id) {
            let fallback = path_derived_id(path);
            warnings.push(format!("{path}: entity id `{id}` already taken, using `{fallback}`"));
            id = fallback;
            if entities.contains(&id) {
                warnings.push(format!("skipped {path}: duplicate entity id `{id}`"));
                continue;
            }
        }
        entities.insert(Entity::new(id.clone())?.with_source_path(path.clone()))?;
        units.push((id, path, code, syntax));
    }
    if entities.is_empty() {
        return Err(Error::EmptySystem(system.label()));
    }

    let resolver = Resolver::new(&entities);
    let mut graph = DependencyGraph::new();
    let mut external_references: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut corpus = Corpus::new();

    for (id, path, code, syntax) in &units {
        graph.add_node(id.clone())?;
        let package = package_of(id);
        for target in import_targets(code) {
            let resolved = resolver.resolve_import(&target);
            if resolved.is_empty() {
                external_references.entry(id.clone()).or_default().insert(target);
            }
            for t in resolved {
                graph.add_edge(id.clone(), t)?;
            }
        }
        for chain in identifier_chains(code) {
            if chain.contains('.') {
                if let Some(t) = resolver.longest_prefix(chain) {
                    graph.add_edge(id.clone(), t)?;
                    continue;
                }
            }
            let first = chain.split('.').next().unwrap_or(chain);
            if let Some(t) = resolver.by_simple_name.get(&(package, first)) {
                graph.add_edge(id.clone(), *t)?;
            }
        }
        let tokenize = TokenizeOptions {
            stem: options.stem,
            strip_comments: options.strip_comments,
            strip_license_header: options.strip_license_header,
            syntax: *syntax,
        };
        let bag = tokenize_with_lexicon(&system.files[*path], stops, &tokenize, &lexicon);
        corpus.insert(id.clone(), bag)?;
    }

    Ok(Extraction {
        entities,
        graph,
        corpus,
        external_references,
        warnings,
    })
}

/// Reads a directory tree and extracts facts from it.
pub fn scan_source_tree(root: &Path, options: &ExtractOptions, stops: &StopWordSet) -> Result<Extraction> {
    let (system, mut warnings) = SourceSystem::read(root, &options.extensions)?;
    let mut extraction = extract(&system, options, stops)?;
    warnings.append(&mut extraction.warnings);
    extraction.warnings = warnings;
    Ok(extraction)
}
