//! JSON persistence for hierarchies, fitted models, constraint sets and
//! planted ground-truth trees.
//!
//! Documents are versioned and re-validated on load; floats serialize with
//! full round-trip precision, so save -> load -> save is byte-identical.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusteringConfig, ConstraintSet, MergeLog};
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchyNode, NodeId};
use crate::models::NodeModelSet;

const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: NodeId,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    leaf_class: Option<String>,
    member_classes: Vec<String>,
    depth: usize,
    merge_distance: f64,
}

impl NodeRecord {
    fn from_node(node: &HierarchyNode) -> Self {
        NodeRecord {
            id: node.id,
            parent: node.parent,
            children: node.children.map(|(l, r)| vec![l, r]).unwrap_or_default(),
            leaf_class: node.leaf_class.clone(),
            member_classes: node.member_classes.iter().cloned().collect(),
            depth: node.depth,
            merge_distance: node.merge_distance,
        }
    }

    fn into_node(self) -> Result<HierarchyNode> {
        let children = match self.children.as_slice() {
            [] => None,
            [l, r] => Some((*l, *r)),
            other => {
                return Err(Error::InvalidHierarchy(vec![format!(
                    "node {}: internal node with {} child(ren)",
                    self.id,
                    other.len()
                )]))
            }
        };
        Ok(HierarchyNode {
            id: self.id,
            parent: self.parent,
            children,
            leaf_class: self.leaf_class,
            member_classes: self.member_classes.into_iter().collect(),
            depth: self.depth,
            merge_distance: self.merge_distance,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    dimension: usize,
    root_id: NodeId,
    nodes: Vec<NodeRecord>,
    clustering: ClusteringConfig,
    merge_log: MergeLog,
    models: Option<NodeModelSet>,
}

/// A hierarchy with its provenance (clustering config + merge log) and,
/// once trained, the fitted per-node models.
#[derive(Clone, Debug, PartialEq)]
pub struct SavedModel {
    pub dimension: usize,
    pub hierarchy: Hierarchy,
    pub clustering: ClusteringConfig,
    pub merge_log: MergeLog,
    pub models: Option<NodeModelSet>,
}

fn check_version(value: &serde_json::Value) -> Result<()> {
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::invalid_argument("document has no schema_version"))?;
    if found != SCHEMA_VERSION as u64 {
        return Err(Error::SchemaVersion {
            expected: SCHEMA_VERSION,
            found: found as u32,
        });
    }
    Ok(())
}

fn write_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Persist a hierarchy (and any fitted models) to JSON. The hierarchy must
/// be valid.
pub fn save_hierarchy(path: impl AsRef<Path>, model: &SavedModel) -> Result<()> {
    let violations = model.hierarchy.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidHierarchy(violations));
    }
    let file = ModelFile {
        schema_version: SCHEMA_VERSION,
        dimension: model.dimension,
        root_id: model.hierarchy.root_id(),
        nodes: model.hierarchy.nodes().map(NodeRecord::from_node).collect(),
        clustering: model.clustering,
        merge_log: model.merge_log.clone(),
        models: model.models.clone(),
    };
    write_pretty(path.as_ref(), &file)
}

/// Load and fully re-validate a persisted hierarchy.
pub fn load_hierarchy(path: impl AsRef<Path>) -> Result<SavedModel> {
    let text = fs::read_to_string(path.as_ref())?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    check_version(&value)?;
    let file: ModelFile = serde_json::from_value(value)?;
    let nodes = file
        .nodes
        .into_iter()
        .map(NodeRecord::into_node)
        .collect::<Result<Vec<_>>>()?;
    let hierarchy = Hierarchy::from_nodes(nodes, file.root_id)?;
    if let Some(models) = &file.models {
        let violations = models.validate_against(&hierarchy);
        if !violations.is_empty() {
            return Err(Error::InvalidHierarchy(violations));
        }
        for stats in models.stats.values() {
            if stats.centroid.dim() != file.dimension {
                return Err(Error::InvalidHierarchy(vec![format!(
                    "node {}: centroid dimension {} != dataset dimension {}",
                    stats.node_id,
                    stats.centroid.dim(),
                    file.dimension
                )]));
            }
        }
    }
    Ok(SavedModel {
        dimension: file.dimension,
        hierarchy,
        clustering: file.clustering,
        merge_log: file.merge_log,
        models: file.models,
    })
}

#[derive(Serialize, Deserialize)]
struct TruthFile {
    schema_version: u32,
    unseen_classes: Vec<String>,
    root_id: NodeId,
    nodes: Vec<NodeRecord>,
}

/// Persist a planted ground-truth tree and its unseen class set.
pub fn save_truth(
    path: impl AsRef<Path>,
    planted: &Hierarchy,
    unseen_classes: &BTreeSet<String>,
) -> Result<()> {
    let file = TruthFile {
        schema_version: SCHEMA_VERSION,
        unseen_classes: unseen_classes.iter().cloned().collect(),
        root_id: planted.root_id(),
        nodes: planted.nodes().map(NodeRecord::from_node).collect(),
    };
    write_pretty(path.as_ref(), &file)
}

pub fn load_truth(path: impl AsRef<Path>) -> Result<(Hierarchy, BTreeSet<String>)> {
    let text = fs::read_to_string(path.as_ref())?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    check_version(&value)?;
    let file: TruthFile = serde_json::from_value(value)?;
    let nodes = file
        .nodes
        .into_iter()
        .map(NodeRecord::into_node)
        .collect::<Result<Vec<_>>>()?;
    let hierarchy = Hierarchy::from_nodes(nodes, file.root_id)?;
    Ok((hierarchy, file.unseen_classes.into_iter().collect()))
}

/// Constraint files are plain JSON:
/// `{"cannot_link": [["a","b"], ...], "must_link": [...]}`.
pub fn load_constraints(path: impl AsRef<Path>) -> Result<ConstraintSet> {
    let text = fs::read_to_string(path.as_ref())?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_constraints(path: impl AsRef<Path>, constraints: &ConstraintSet) -> Result<()> {
    write_pretty(path.as_ref(), constraints)
}
