//! Entities, dependency graphs and architectures (partitions of entities
//! into named clusters).
//!
//! All types are plain values. An [`Architecture`] can only be built through
//! constructors that check the partition invariant, so every instance in the
//! program is a valid partition.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Package of a dot-qualified name: everything before the last dot, or the
/// empty string for a root-level name.
pub fn package_of(id: &str) -> &str {
    id.rfind('.').map_or("", |i| &id[..i])
}

/// Last segment of a dot-qualified name.
pub fn simple_name(id: &str) -> &str {
    id.rfind('.').map_or(id, |i| &id[i + 1..])
}

/// An implementation unit, normally one source file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub package: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_path: Option<String>,
}

impl Entity {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        validate_identifier(&id)?;
        let package = package_of(&id).to_string();
        Ok(Entity {
            id,
            package,
            source_path: None,
        })
    }

    pub fn with_source_path(mut self, path: impl Into<String>) -> Self {
        self.source_path = Some(path.into());
        self
    }
}

pub(crate) fn validate_identifier(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::InvalidModel("empty identifier".into()));
    }
    if id.chars().any(char::is_whitespace) {
        return Err(Error::InvalidModel(format!(
            "identifier `{id}` contains whitespace"
        )));
    }
    Ok(())
}

/// Entities keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySet {
    entities: BTreeMap<String, Entity>,
}

impl EntitySet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entity; a second entity with the same id is rejected.
    pub fn insert(&mut self, entity: Entity) -> Result<()> {
        if self.entities.contains_key(&entity.id) {
            return Err(Error::InvalidModel(format!(
                "duplicate entity id `{}`",
                entity.id
            )));
        }
        self.entities.insert(entity.id.clone(), entity);
        Ok(())
    }

    pub fn from_ids<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = Self::new();
        for id in ids {
            set.insert(Entity::new(id)?)?;
        }
        Ok(set)
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entities.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Entities in id order.
    pub fn iter(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entities.keys().map(String::as_str)
    }
}

/// Directed "depends" facts over entity ids. Self-loops are dropped and
/// duplicate edges collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    nodes: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

impl DependencyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<String>) -> Result<()> {
        let id = id.into();
        validate_identifier(&id)?;
        self.nodes.insert(id);
        Ok(())
    }

    pub fn add_edge(&mut self, source: impl Into<String>, target: impl Into<String>) -> Result<()> {
        let (source, target) = (source.into(), target.into());
        self.add_node(source.clone())?;
        self.add_node(target.clone())?;
        if source != target {
            self.edges.insert((source, target));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains(id)
    }

    /// Outgoing neighbours of every node (nodes without edges map to an
    /// empty set).
    pub fn successors(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut out: BTreeMap<&str, BTreeSet<&str>> =
            self.nodes.iter().map(|n| (n.as_str(), BTreeSet::new())).collect();
        for (s, t) in &self.edges {
            out.get_mut(s.as_str()).expect("edge endpoint").insert(t.as_str());
        }
        out
    }

    pub fn predecessors(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut out: BTreeMap<&str, BTreeSet<&str>> =
            self.nodes.iter().map(|n| (n.as_str(), BTreeSet::new())).collect();
        for (s, t) in &self.edges {
            out.get_mut(t.as_str()).expect("edge endpoint").insert(s.as_str());
        }
        out
    }

    /// Entity set derived from the graph nodes.
    pub fn entities(&self) -> EntitySet {
        let mut set = EntitySet::new();
        for n in &self.nodes {
            set.insert(Entity::new(n.clone()).expect("validated node id"))
                .expect("unique node id");
        }
        set
    }

    /// Copy of the graph with node ids rewritten through `rename`; ids not in
    /// the map are kept.
    pub fn renamed(&self, rename: &BTreeMap<String, String>) -> Result<Self> {
        let map = |id: &String| rename.get(id).cloned().unwrap_or_else(|| id.clone());
        let mut g = DependencyGraph::new();
        for n in &self.nodes {
            g.add_node(map(n))?;
        }
        for (s, t) in &self.edges {
            g.add_edge(map(s), map(t))?;
        }
        Ok(g)
    }
}

/// A partition of entities into named, non-empty clusters.
///
/// Cluster names are labels only; all similarity metrics compare clusters by
/// content.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ArchitectureJson", into = "ArchitectureJson")]
pub struct Architecture {
    clusters: BTreeMap<String, BTreeSet<String>>,
    owner: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ArchitectureJson {
    clusters: BTreeMap<String, BTreeSet<String>>,
}

impl TryFrom<ArchitectureJson> for Architecture {
    type Error = Error;

    fn try_from(value: ArchitectureJson) -> Result<Self> {
        Architecture::from_clusters(value.clusters)
    }
}

impl From<Architecture> for ArchitectureJson {
    fn from(a: Architecture) -> Self {
        ArchitectureJson {
            clusters: a.clusters,
        }
    }
}

impl Architecture {
    /// The null architecture: no clusters, no entities.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_clusters<I, N, M, E>(clusters: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, M)>,
        N: Into<String>,
        M: IntoIterator<Item = E>,
        E: Into<String>,
    {
        let mut builder = ArchitectureBuilder::default();
        for (name, members) in clusters {
            let name = name.into();
            let mut any = false;
            for e in members {
                builder.insert(&name, e)?;
                any = true;
            }
            if !any {
                return Err(Error::InvalidModel(format!("cluster `{name}` is empty")));
            }
        }
        Ok(builder.build())
    }

    /// Builds an architecture from an entity → cluster assignment.
    pub fn from_assignment<I, E, N>(assignment: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, N)>,
        E: Into<String>,
        N: Into<String>,
    {
        let mut builder = ArchitectureBuilder::default();
        for (e, n) in assignment {
            builder.insert(&n.into(), e)?;
        }
        Ok(builder.build())
    }

    pub fn clusters(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.clusters
    }

    pub fn cluster(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.clusters.get(name)
    }

    pub fn cluster_of(&self, entity: &str) -> Option<&str> {
        self.owner.get(entity).map(String::as_str)
    }

    pub fn contains_entity(&self, entity: &str) -> bool {
        self.owner.contains_key(entity)
    }

    /// Entity universe in sorted order.
    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.owner.keys().map(String::as_str)
    }

    pub fn entity_set(&self) -> BTreeSet<&str> {
        self.owner.keys().map(String::as_str).collect()
    }

    pub fn entity_count(&self) -> usize {
        self.owner.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster contents with names erased, in canonical order. Two
    /// architectures are equal up to renaming iff these are equal.
    pub fn canonical_partition(&self) -> BTreeSet<BTreeSet<String>> {
        self.clusters.values().cloned().collect()
    }

    pub fn same_partition(&self, other: &Architecture) -> bool {
        self.canonical_partition() == other.canonical_partition()
    }

    /// Copy with entity ids rewritten through `rename`; unmapped ids are
    /// kept. Fails if two entities collapse onto the same id.
    pub fn renamed_entities(&self, rename: &BTreeMap<String, String>) -> Result<Self> {
        Architecture::from_assignment(self.owner.iter().map(|(e, c)| {
            (
                rename.get(e).cloned().unwrap_or_else(|| e.clone()),
                c.clone(),
            )
        }))
    }

    /// Copy with every cluster renamed by `f`. Fails if two names collide.
    pub fn renamed_clusters(&self, mut f: impl FnMut(&str) -> String) -> Result<Self> {
        let mut clusters = BTreeMap::new();
        for (name, members) in &self.clusters {
            let new = f(name);
            if clusters.insert(new.clone(), members.clone()).is_some() {
                return Err(Error::InvalidModel(format!("duplicate cluster name `{new}`")));
            }
        }
        Architecture::from_clusters(clusters)
    }

    /// Restriction to the given entities; clusters that become empty are
    /// dropped.
    pub fn restricted_to(&self, keep: &BTreeSet<&str>) -> Self {
        Architecture::from_assignment(
            self.owner
                .iter()
                .filter(|(e, _)| keep.contains(e.as_str()))
                .map(|(e, c)| (e.clone(), c.clone())),
        )
        .expect("restriction of a partition is a partition")
    }
}

#[derive(Default)]
struct ArchitectureBuilder {
    clusters: BTreeMap<String, BTreeSet<String>>,
    owner: BTreeMap<String, String>,
}

impl ArchitectureBuilder {
    fn insert(&mut self, cluster: &str, entity: impl Into<String>) -> Result<()> {
        let entity = entity.into();
        validate_identifier(cluster)?;
        validate_identifier(&entity)?;
        if let Some(prev) = self.owner.get(&entity) {
            if prev == cluster {
                return Ok(());
            }
            let (first, second) = if prev.as_str() < cluster {
                (prev.clone(), cluster.to_string())
            } else {
                (cluster.to_string(), prev.clone())
            };
            return Err(Error::PartitionViolation {
                entity,
                first,
                second,
            });
        }
        self.owner.insert(entity.clone(), cluster.to_string());
        self.clusters
            .entry(cluster.to_string())
            .or_default()
            .insert(entity);
        Ok(())
    }

    fn build(self) -> Architecture {
        Architecture {
            clusters: self.clusters,
            owner: self.owner,
        }
    }
}

/// Operation counts of a minimal transformation between two architectures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TransformOps {
    pub add_c: usize,
    pub rem_c: usize,
    pub add_e: usize,
    pub rem_e: usize,
    pub mov_e: usize,
}

impl TransformOps {
    pub fn total(&self) -> usize {
        self.add_c + self.rem_c + self.add_e + self.rem_e + self.mov_e
    }

    /// The same transformation read in the opposite direction.
    pub fn reversed(&self) -> Self {
        TransformOps {
            add_c: self.rem_c,
            rem_c: self.add_c,
            add_e: self.rem_e,
            rem_e: self.add_e,
            mov_e: self.mov_e,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn package_is_longest_dot_prefix() {
        let e = Entity::new("org.foo.Bar").unwrap();
        assert_eq!(e.package, "org.foo");
        assert_eq!(Entity::new("Bar").unwrap().package, "");
        assert_eq!(simple_name("org.foo.Bar"), "Bar");
    }

    #[test]
    fn rejects_bad_identifiers() {
        assert!(Entity::new("").is_err());
        assert!(Entity::new("a b").is_err());
        let mut set = EntitySet::from_ids(["a"]).unwrap();
        assert!(set.insert(Entity::new("a").unwrap()).is_err());
    }

    #[test]
    fn graph_drops_self_loops_and_duplicates() {
        let mut g = DependencyGraph::new();
        g.add_edge("a", "b").unwrap();
        g.add_edge("a", "b").unwrap();
        g.add_edge("c", "c").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
        assert!(g.successors()["c"].is_empty());
        assert_eq!(g.predecessors()["b"].iter().copied().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn partition_violation_names_entity() {
        let err = Architecture::from_clusters([("C", vec!["a"]), ("D", vec!["a"])]).unwrap_err();
        match err {
            Error::PartitionViolation { entity, .. } => assert_eq!(entity, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_cluster_rejected() {
        let err = Architecture::from_clusters([("C", Vec::<String>::new())]);
        assert!(err.is_err());
    }

    #[test]
    fn json_mirror_is_sorted_and_validated() {
        let a = Architecture::from_clusters([("C", vec!["b", "a"])]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"clusters":{"C":["a","b"]}}"#);
        let back: Architecture = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"clusters":{"C":["a"],"D":["a"]}}"#;
        assert!(serde_json::from_str::<Architecture>(bad).is_err());
    }

    #[test]
    fn rename_invariance_of_partition() {
        let a = Architecture::from_clusters([("X", vec!["a", "b"]), ("Y", vec!["c"])]).unwrap();
        let b = a.renamed_clusters(|n| format!("{n}.renamed")).unwrap();
        assert!(a.same_partition(&b));
        assert_eq!(b.cluster_of("c"), Some("Y.renamed"));
    }
}
