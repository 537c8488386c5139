//! Package-structure view: one cluster per package.

use crate::error::{Error, Result};
use crate::model::{Architecture, EntitySet};

/// Cluster name for entities declared outside any package.
pub const DEFAULT_PACKAGE_CLUSTER: &str = "<default>";

pub fn recover_pkg(entities: &EntitySet) -> Result<Architecture> {
    if entities.is_empty() {
        return Err(Error::UndefinedInput("no entities to recover".into()));
    }
    Architecture::from_assignment(entities.iter().map(|e| {
        let cluster = if e.package.is_empty() {
            DEFAULT_PACKAGE_CLUSTER
        } else {
            e.package.as_str()
        };
        (e.id.clone(), cluster)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_cluster_per_package() {
        let e = EntitySet::from_ids(["org.foo.A", "org.foo.B", "org.bar.C"]).unwrap();
        let a = recover_pkg(&e).unwrap();
        let expected = Architecture::from_clusters([
            ("org.foo", vec!["org.foo.A", "org.foo.B"]),
            ("org.bar", vec!["org.bar.C"]),
        ])
        .unwrap();
        assert_eq!(a, expected);
    }

    #[test]
    fn root_entity_goes_to_default_cluster() {
        let a = recover_pkg(&EntitySet::from_ids(["X"]).unwrap()).unwrap();
        assert_eq!(a.cluster_of("X"), Some(DEFAULT_PACKAGE_CLUSTER));
    }

    #[test]
    fn deterministic_and_rejects_empty() {
        let e = EntitySet::from_ids(["p.A", "q.B", "p.C"]).unwrap();
        assert_eq!(recover_pkg(&e).unwrap(), recover_pkg(&e).unwrap());
        assert!(recover_pkg(&EntitySet::new()).is_err());
    }
}
