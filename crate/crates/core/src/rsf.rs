//! Rigi Standard Format fact files, restricted to two verbs:
//! `depends <source> <target>` for dependency graphs and
//! `contain <cluster> <entity>` for architectures.
//!
//! Any run of whitespace separates fields on input; output always uses a
//! single space and LF line endings.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Architecture, DependencyGraph};

fn facts<'a>(text: &'a str, verb: &'static str) -> impl Iterator<Item = Result<(usize, &'a str, &'a str)>> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(move |(i, line)| {
            let line_no = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [v, a, b] if *v == verb => Ok((line_no, *a, *b)),
                [v, ..] if *v != verb => Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `{verb}` fact, found verb `{v}`"),
                }),
                _ => Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `{verb} <a> <b>`, found {} field(s)", fields.len()),
                }),
            }
        })
}

/// Parses `depends` facts. Duplicates collapse and self-loops are dropped;
/// empty input yields an empty graph.
pub fn parse_deps_rsf(text: &str) -> Result<DependencyGraph> {
    let mut graph = DependencyGraph::new();
    for fact in facts(text, "depends") {
        let (line, source, target) = fact?;
        graph.add_edge(source, target).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    Ok(graph)
}

/// Parses `contain` facts into an architecture. An entity listed under two
/// clusters is a partition violation.
pub fn parse_arch_rsf(text: &str) -> Result<Architecture> {
    let mut assignment = Vec::new();
    for fact in facts(text, "contain") {
        let (_, cluster, entity) = fact?;
        assignment.push((entity, cluster));
    }
    Architecture::from_assignment(assignment)
}

/// Canonical `contain` listing sorted by (cluster, entity).
pub fn serialize_arch(arch: &Architecture) -> String {
    let mut out = String::new();
    for (cluster, members) in arch.clusters() {
        for entity in members {
            writeln!(out, "contain {cluster} {entity}").expect("write to string");
        }
    }
    out
}

/// Canonical `depends` listing sorted by (source, target). Isolated nodes
/// cannot be expressed and are lost.
pub fn serialize_deps(graph: &DependencyGraph) -> String {
    let mut out = String::new();
    for (s, t) in graph.edges() {
        writeln!(out, "depends {s} {t}").expect("write to string");
    }
    out
}
