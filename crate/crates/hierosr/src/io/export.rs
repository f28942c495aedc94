//! DOT and Newick tree export.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::hierarchy::{Hierarchy, NodeId};

/// Render the hierarchy as a DOT digraph: leaves labeled with their class,
/// internal nodes with a member summary and merge distance. Optional
/// annotations (e.g. CC values) are appended to node labels.
pub fn export_dot(
    hierarchy: &Hierarchy,
    annotations: Option<&BTreeMap<NodeId, String>>,
) -> String {
    let mut out = String::from("digraph hierarchy {\n");
    out.push_str("  node [shape=box];\n");
    for node in hierarchy.nodes() {
        let mut label = match &node.leaf_class {
            Some(class) => class.clone(),
            None => format!(
                "{}\\nd={:.4}",
                member_summary(&node.member_classes),
                node.merge_distance
            ),
        };
        if let Some(note) = annotations.and_then(|a| a.get(&node.id)) {
            label.push_str("\\n");
            label.push_str(note);
        }
        writeln!(out, "  n{} [label=\"{}\"];", node.id, escape_dot(&label)).unwrap();
    }
    for node in hierarchy.nodes() {
        if let Some((left, right)) = node.children {
            writeln!(out, "  n{} -> n{};", node.id, left).unwrap();
            writeln!(out, "  n{} -> n{};", node.id, right).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn member_summary(members: &std::collections::BTreeSet<String>) -> String {
    let shown: Vec<&str> = members.iter().take(4).map(|s| s.as_str()).collect();
    if members.len() <= 4 {
        format!("{{{}}}", shown.join(","))
    } else {
        format!("{{{},... {} classes}}", shown.join(","), members.len())
    }
}

fn escape_dot(label: &str) -> String {
    label.replace('"', "\\\"")
}

/// Render the hierarchy in Newick format, leaf-labeled, with each node's
/// merge distance as its branch length (0 for leaves).
pub fn export_newick(hierarchy: &Hierarchy) -> String {
    let mut out = String::new();
    write_newick(hierarchy, hierarchy.root_id(), &mut out);
    out.push(';');
    out.push('\n');
    out
}

fn write_newick(hierarchy: &Hierarchy, id: NodeId, out: &mut String) {
    let node = hierarchy.node(id).expect("valid id");
    match node.children {
        None => {
            let class = node.leaf_class.as_deref().expect("leaf has class");
            out.push_str(&quote_newick(class));
        }
        Some((left, right)) => {
            out.push('(');
            write_newick(hierarchy, left, out);
            out.push(',');
            write_newick(hierarchy, right, out);
            out.push(')');
        }
    }
    write!(out, ":{}", node.merge_distance).unwrap();
}

fn quote_newick(label: &str) -> String {
    let plain = label
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}
