//! The class hierarchy: a rooted full binary tree whose leaves are the known
//! classes, plus the tree-distance queries the metrics are built on.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// One node of a [`Hierarchy`]. Leaves carry a class label; internal nodes
/// carry the merge distance at which their two children were joined.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    /// `None` for leaves, `(left, right)` for internal nodes.
    pub children: Option<(NodeId, NodeId)>,
    pub leaf_class: Option<String>,
    pub member_classes: BTreeSet<String>,
    /// Root has depth 0.
    pub depth: usize,
    /// 0 for leaves.
    pub merge_distance: f64,
}

impl HierarchyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// One agglomerative merge: the two active roots joined and the cluster
/// distance at which they were joined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergeStep {
    pub left: NodeId,
    pub right: NodeId,
    pub distance: f64,
}

/// Rooted full binary tree over the known classes.
///
/// Node ids are stable: leaves take `0..n` in lexicographic class-label
/// order, internal nodes take `n..2n-1` in merge order, so the root is
/// always `2n-2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy {
    nodes: Vec<HierarchyNode>,
    root_id: NodeId,
    class_to_leaf: BTreeMap<String, NodeId>,
}

impl Hierarchy {
    /// Build a hierarchy from its leaf labels and a bottom-up merge sequence.
    ///
    /// Leaves are numbered `0..n` in lexicographic label order; the i-th
    /// merge creates node `n + i` from two previously unmerged nodes. Child
    /// order is normalized so the left child holds the lexicographically
    /// smallest member class.
    pub fn from_merge_sequence(leaf_labels: &[String], merges: &[MergeStep]) -> Result<Self> {
        if leaf_labels.is_empty() {
            return Err(Error::invalid_argument("hierarchy needs at least one class"));
        }
        let mut labels: Vec<String> = leaf_labels.to_vec();
        labels.sort();
        labels.dedup();
        if labels.len() != leaf_labels.len() {
            return Err(Error::invalid_argument("duplicate leaf labels"));
        }
        let n = labels.len();
        if merges.len() != n - 1 {
            return Err(Error::invalid_argument(format!(
                "{n} leaves require {} merges, got {}",
                n - 1,
                merges.len()
            )));
        }

        let mut nodes: Vec<HierarchyNode> = labels
            .iter()
            .enumerate()
            .map(|(id, label)| HierarchyNode {
                id,
                parent: None,
                children: None,
                leaf_class: Some(label.clone()),
                member_classes: BTreeSet::from([label.clone()]),
                depth: 0,
                merge_distance: 0.0,
            })
            .collect();

        for step in merges {
            let id = nodes.len();
            for child in [step.left, step.right] {
                if child >= id {
                    return Err(Error::invalid_argument(format!(
                        "merge references unknown node {child}"
                    )));
                }
                if nodes[child].parent.is_some() {
                    return Err(Error::invalid_argument(format!(
                        "node {child} merged twice"
                    )));
                }
            }
            if step.left == step.right {
                return Err(Error::invalid_argument("merge of a node with itself"));
            }
            if !step.distance.is_finite() || step.distance < 0.0 {
                return Err(Error::invalid_argument(format!(
                    "merge distance must be finite and >= 0, got {}",
                    step.distance
                )));
            }
            let (left, right) = order_children(&nodes, step.left, step.right);
            let member_classes: BTreeSet<String> = nodes[left]
                .member_classes
                .union(&nodes[right].member_classes)
                .cloned()
                .collect();
            nodes[left].parent = Some(id);
            nodes[right].parent = Some(id);
            nodes.push(HierarchyNode {
                id,
                parent: None,
                children: Some((left, right)),
                leaf_class: None,
                member_classes,
                depth: 0,
                merge_distance: step.distance,
            });
        }

        let root_id = nodes.len() - 1;
        assign_depths(&mut nodes, root_id);
        Self::from_nodes(nodes, root_id)
    }

    /// Assemble a hierarchy from explicit nodes, validating every invariant.
    pub fn from_nodes(nodes: Vec<HierarchyNode>, root_id: NodeId) -> Result<Self> {
        let mut class_to_leaf = BTreeMap::new();
        for node in &nodes {
            if let Some(class) = &node.leaf_class {
                class_to_leaf.insert(class.clone(), node.id);
            }
        }
        let hierarchy = Hierarchy {
            nodes,
            root_id,
            class_to_leaf,
        };
        let violations = hierarchy.validate();
        if violations.is_empty() {
            Ok(hierarchy)
        } else {
            Err(Error::InvalidHierarchy(violations))
        }
    }

    pub fn root_id(&self) -> NodeId {
        self.root_id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Result<&HierarchyNode> {
        self.nodes
            .get(id)
            .ok_or_else(|| Error::invalid_argument(format!("unknown node id {id}")))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &HierarchyNode> {
        self.nodes.iter()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &HierarchyNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Known classes, i.e. the leaf labels.
    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.class_to_leaf.keys().map(|s| s.as_str())
    }

    pub fn leaf_for_class(&self, class: &str) -> Option<NodeId> {
        self.class_to_leaf.get(class).copied()
    }

    pub fn class_to_leaf(&self) -> &BTreeMap<String, NodeId> {
        &self.class_to_leaf
    }

    /// Number of edges on the unique undirected path between two nodes.
    pub fn tree_distance(&self, a: NodeId, b: NodeId) -> Result<usize> {
        let (mut x, mut y) = (self.node(a)?, self.node(b)?);
        let mut dist = 0;
        while x.depth > y.depth {
            x = &self.nodes[x.parent.expect("non-root has parent")];
            dist += 1;
        }
        while y.depth > x.depth {
            y = &self.nodes[y.parent.expect("non-root has parent")];
            dist += 1;
        }
        while x.id != y.id {
            x = &self.nodes[x.parent.expect("nodes at equal depth below root")];
            y = &self.nodes[y.parent.expect("nodes at equal depth below root")];
            dist += 2;
        }
        Ok(dist)
    }

    /// Maximum tree distance from `t` to any node (the eccentricity of `t`).
    pub fn max_tree_distance(&self, t: NodeId) -> Result<usize> {
        Ok(self.distances_from(t)?.into_iter().max().unwrap_or(0))
    }

    /// BFS distances from `t` to every node, indexed by node id.
    pub fn distances_from(&self, t: NodeId) -> Result<Vec<usize>> {
        self.node(t)?;
        let mut dist = vec![usize::MAX; self.nodes.len()];
        let mut queue = VecDeque::from([t]);
        dist[t] = 0;
        while let Some(id) = queue.pop_front() {
            let node = &self.nodes[id];
            let mut neighbours = Vec::with_capacity(3);
            if let Some(p) = node.parent {
                neighbours.push(p);
            }
            if let Some((l, r)) = node.children {
                neighbours.push(l);
                neighbours.push(r);
            }
            for nb in neighbours {
                if dist[nb] == usize::MAX {
                    dist[nb] = dist[id] + 1;
                    queue.push_back(nb);
                }
            }
        }
        Ok(dist)
    }

    /// Node ids from the root down to `t`, inclusive.
    pub fn path_from_root(&self, t: NodeId) -> Result<Vec<NodeId>> {
        self.node(t)?;
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    pub fn is_ancestor_or_self(&self, ancestor: NodeId, node: NodeId) -> Result<bool> {
        self.node(ancestor)?;
        self.node(node)?;
        let mut cur = node;
        loop {
            if cur == ancestor {
                return Ok(true);
            }
            match self.nodes[cur].parent {
                Some(p) => cur = p,
                None => return Ok(false),
            }
        }
    }

    /// Check every structural invariant; an empty list means the tree is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.nodes.is_empty() {
            violations.push("hierarchy has no nodes".to_string());
            return violations;
        }
        for (index, node) in self.nodes.iter().enumerate() {
            if node.id != index {
                violations.push(format!("node at index {index} has id {}", node.id));
            }
        }
        match self.nodes.get(self.root_id) {
            None => {
                violations.push(format!("root id {} out of range", self.root_id));
                return violations;
            }
            Some(root) => {
                if root.parent.is_some() {
                    violations.push(format!("root {} has a parent", self.root_id));
                }
                if root.depth != 0 {
                    violations.push(format!("root depth {} != 0", root.depth));
                }
            }
        }

        for node in &self.nodes {
            let id = node.id;
            match (node.children, &node.leaf_class) {
                (None, None) => {
                    violations.push(format!("node {id}: leaf without leaf_class"))
                }
                (Some(_), Some(class)) => violations.push(format!(
                    "node {id}: internal node with leaf_class {class}"
                )),
                (None, Some(class)) => {
                    if node.member_classes.len() != 1
                        || !node.member_classes.contains(class)
                    {
                        violations.push(format!(
                            "node {id}: leaf member_classes must equal {{{class}}}"
                        ));
                    }
                }
                (Some((left, right)), None) => {
                    if left == right {
                        violations.push(format!("node {id}: identical children"));
                    }
                    for child in [left, right] {
                        match self.nodes.get(child) {
                            None => violations
                                .push(format!("node {id}: unknown child {child}")),
                            Some(c) => {
                                if c.parent != Some(id) {
                                    violations.push(format!(
                                        "node {child}: parent link does not point to {id}"
                                    ));
                                }
                                if c.depth != node.depth + 1 {
                                    violations.push(format!(
                                        "node {child}: depth {} != parent depth {} + 1",
                                        c.depth, node.depth
                                    ));
                                }
                            }
                        }
                    }
                    if let (Some(l), Some(r)) =
                        (self.nodes.get(left), self.nodes.get(right))
                    {
                        if !l.member_classes.is_disjoint(&r.member_classes) {
                            violations.push(format!(
                                "node {id}: children share member classes"
                            ));
                        }
                        let union: BTreeSet<String> = l
                            .member_classes
                            .union(&r.member_classes)
                            .cloned()
                            .collect();
                        if union != node.member_classes {
                            violations.push(format!(
                                "node {id}: member_classes is not the union of its children's"
                            ));
                        }
                    }
                }
            }
            if !node.merge_distance.is_finite() || node.merge_distance < 0.0 {
                violations.push(format!(
                    "node {id}: merge_distance {} invalid",
                    node.merge_distance
                ));
            }
            if node.is_leaf() && node.merge_distance != 0.0 {
                violations.push(format!("node {id}: leaf with nonzero merge_distance"));
            }
            if let Some(p) = node.parent {
                match self.nodes.get(p) {
                    None => violations.push(format!("node {id}: unknown parent {p}")),
                    Some(parent) => {
                        let linked = parent
                            .children
                            .map(|(l, r)| l == id || r == id)
                            .unwrap_or(false);
                        if !linked {
                            violations.push(format!(
                                "node {id}: parent {p} does not list it as a child"
                            ));
                        }
                    }
                }
            }
        }

        // Connectivity: every node reachable from the root.
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([self.root_id]);
        seen[self.root_id] = true;
        let mut reached = 0usize;
        while let Some(id) = queue.pop_front() {
            reached += 1;
            if let Some((l, r)) = self.nodes[id].children {
                for child in [l, r] {
                    if child < seen.len() && !seen[child] {
                        seen[child] = true;
                        queue.push_back(child);
                    }
                }
            }
        }
        if reached != self.nodes.len() {
            violations.push(format!(
                "only {reached} of {} nodes reachable from root",
                self.nodes.len()
            ));
        }

        // Leaves biject with classes; node count follows from full-binariness.
        let leaf_classes: BTreeSet<&String> =
            self.leaves().filter_map(|n| n.leaf_class.as_ref()).collect();
        let leaf_count = self.leaves().count();
        if leaf_classes.len() != leaf_count {
            violations.push("duplicate leaf classes".to_string());
        }
        if self.nodes.len() != 2 * leaf_count.max(1) - 1 {
            violations.push(format!(
                "node count {} != 2*{leaf_count}-1",
                self.nodes.len()
            ));
        }
        if let Some(root) = self.nodes.get(self.root_id) {
            if root.member_classes.len() != leaf_count {
                violations.push("root member_classes do not cover all leaves".to_string());
            }
        }
        for (class, id) in &self.class_to_leaf {
            let ok = self
                .nodes
                .get(*id)
                .map(|n| n.leaf_class.as_deref() == Some(class.as_str()))
                .unwrap_or(false);
            if !ok {
                violations.push(format!("class_to_leaf entry {class} -> {id} is stale"));
            }
        }
        if self.class_to_leaf.len() != leaf_count {
            violations.push("class_to_leaf does not cover every leaf".to_string());
        }

        violations
    }

    /// Rooted Robinson-Foulds distance: the symmetric difference between the
    /// two trees' sets of non-trivial clades. Both trees must share one leaf
    /// label set; 0 means identical topology.
    pub fn robinson_foulds(&self, other: &Hierarchy) -> Result<usize> {
        let mine: BTreeSet<&str> = self.classes().collect();
        let theirs: BTreeSet<&str> = other.classes().collect();
        if mine != theirs {
            return Err(Error::invalid_argument(
                "Robinson-Foulds requires identical leaf label sets",
            ));
        }
        let a = nontrivial_clades(self);
        let b = nontrivial_clades(other);
        Ok(a.symmetric_difference(&b).count())
    }

    /// Restriction of the tree to a subset of its classes: drop the other
    /// leaves and splice out the internal nodes left with a single child.
    pub fn restrict_to_classes(&self, keep: &BTreeSet<String>) -> Result<Hierarchy> {
        if keep.is_empty() {
            return Err(Error::invalid_argument("cannot restrict to zero classes"));
        }
        for class in keep {
            if !self.class_to_leaf.contains_key(class) {
                return Err(Error::invalid_argument(format!(
                    "unknown class {class} in restriction"
                )));
            }
        }
        enum Reduced {
            Leaf(String),
            Internal(Box<Reduced>, Box<Reduced>, f64),
        }
        fn reduce(h: &Hierarchy, id: NodeId, keep: &BTreeSet<String>) -> Option<Reduced> {
            let node = &h.nodes[id];
            match node.children {
                None => {
                    let class = node.leaf_class.as_ref().expect("leaf has class");
                    keep.contains(class).then(|| Reduced::Leaf(class.clone()))
                }
                Some((l, r)) => match (reduce(h, l, keep), reduce(h, r, keep)) {
                    (Some(a), Some(b)) => Some(Reduced::Internal(
                        Box::new(a),
                        Box::new(b),
                        node.merge_distance,
                    )),
                    (Some(a), None) => Some(a),
                    (None, Some(b)) => Some(b),
                    (None, None) => None,
                },
            }
        }
        fn collect_merges(
            reduced: &Reduced,
            leaf_ids: &BTreeMap<String, NodeId>,
            next_id: &mut NodeId,
            merges: &mut Vec<MergeStep>,
        ) -> NodeId {
            match reduced {
                Reduced::Leaf(class) => leaf_ids[class],
                Reduced::Internal(l, r, dist) => {
                    let left = collect_merges(l, leaf_ids, next_id, merges);
                    let right = collect_merges(r, leaf_ids, next_id, merges);
                    let id = *next_id;
                    *next_id += 1;
                    merges.push(MergeStep {
                        left,
                        right,
                        distance: *dist,
                    });
                    id
                }
            }
        }

        let reduced = reduce(self, self.root_id, keep).expect("keep set is nonempty");
        let labels: Vec<String> = keep.iter().cloned().collect();
        let leaf_ids: BTreeMap<String, NodeId> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut merges = Vec::new();
        let mut next_id = labels.len();
        collect_merges(&reduced, &leaf_ids, &mut next_id, &mut merges);
        Hierarchy::from_merge_sequence(&labels, &merges)
    }
}

/// Left child is the one whose smallest member class sorts first.
fn order_children(nodes: &[HierarchyNode], a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    let min_a = nodes[a].member_classes.iter().next();
    let min_b = nodes[b].member_classes.iter().next();
    if min_a <= min_b {
        (a, b)
    } else {
        (b, a)
    }
}

fn assign_depths(nodes: &mut [HierarchyNode], root_id: NodeId) {
    let mut queue = VecDeque::from([(root_id, 0usize)]);
    while let Some((id, depth)) = queue.pop_front() {
        nodes[id].depth = depth;
        if let Some((l, r)) = nodes[id].children {
            queue.push_back((l, depth + 1));
            queue.push_back((r, depth + 1));
        }
    }
}

fn nontrivial_clades(h: &Hierarchy) -> BTreeSet<BTreeSet<&str>> {
    h.nodes()
        .filter(|n| !n.is_leaf() && n.id != h.root_id())
        .map(|n| n.member_classes.iter().map(|s| s.as_str()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// The 4-class reference tree: leaves A=0, B=1, C=2, D=3,
    /// N1=4 over {A,B}, N2=5 over {C,D}, root=6.
    pub(crate) fn reference_tree() -> Hierarchy {
        Hierarchy::from_merge_sequence(
            &labels(&["A", "B", "C", "D"]),
            &[
                MergeStep { left: 0, right: 1, distance: 1.0 },
                MergeStep { left: 2, right: 3, distance: 1.0 },
                MergeStep { left: 4, right: 5, distance: 14.0 },
            ],
        )
        .unwrap()
    }

    /// Random full binary tree over `n` zero-padded class labels.
    fn random_tree(n: usize, seed: u64) -> Hierarchy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<String> = (0..n).map(|i| format!("c{i:02}")).collect();
        let mut active: Vec<NodeId> = (0..n).collect();
        let mut merges = Vec::new();
        let mut next = n;
        let mut dist = 0.0;
        while active.len() > 1 {
            let i = rng.random_range(0..active.len());
            let a = active.swap_remove(i);
            let j = rng.random_range(0..active.len());
            let b = active.swap_remove(j);
            dist += rng.random_range(0.0..1.0);
            merges.push(MergeStep { left: a, right: b, distance: dist });
            active.push(next);
            next += 1;
        }
        Hierarchy::from_merge_sequence(&labels, &merges).unwrap()
    }

    #[test]
    fn reference_tree_distances() {
        let h = reference_tree();
        assert_eq!(h.tree_distance(0, 0).unwrap(), 0);
        assert_eq!(h.tree_distance(0, 1).unwrap(), 2);
        assert_eq!(h.tree_distance(0, 3).unwrap(), 4);
        assert_eq!(h.tree_distance(3, 0).unwrap(), 4);
        assert!(h.tree_distance(0, 99).is_err());
    }

    #[test]
    fn reference_tree_eccentricities() {
        let h = reference_tree();
        assert_eq!(h.max_tree_distance(6).unwrap(), 2);
        assert_eq!(h.max_tree_distance(0).unwrap(), 4);
        assert!(h.max_tree_distance(7).is_err());
    }

    #[test]
    fn single_node_tree() {
        let h = Hierarchy::from_merge_sequence(&labels(&["only"]), &[]).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.max_tree_distance(0).unwrap(), 0);
        assert!(h.validate().is_empty());
    }

    #[test]
    fn validate_reports_broken_invariants() {
        let h = reference_tree();
        assert!(h.validate().is_empty());

        // Internal node with one child: detach leaf B's parent link.
        let mut broken = h.clone();
        broken.nodes[4].children = Some((0, 0));
        assert!(broken.validate().iter().any(|v| v.contains("node 4")));

        // Member sets not a union.
        let mut broken = h.clone();
        broken.nodes[6].member_classes.remove("A");
        assert!(broken
            .validate()
            .iter()
            .any(|v| v.contains("union") || v.contains("member_classes")));
    }

    #[test]
    fn children_ordered_by_smallest_member_label() {
        // Merge (right-heavy input order) still puts the smaller label left.
        let h = Hierarchy::from_merge_sequence(
            &labels(&["a", "b"]),
            &[MergeStep { left: 1, right: 0, distance: 0.5 }],
        )
        .unwrap();
        assert_eq!(h.node(2).unwrap().children, Some((0, 1)));
    }

    #[test]
    fn depth_lca_identity_on_reference_tree() {
        let h = reference_tree();
        // d(a,b) = depth(a) + depth(b) - 2*depth(lca)
        assert_eq!(h.tree_distance(0, 5).unwrap(), 3); // A -> N1 -> R -> N2
        assert_eq!(h.tree_distance(4, 5).unwrap(), 2);
        assert_eq!(h.tree_distance(6, 3).unwrap(), 2);
    }

    #[test]
    fn restriction_splices_unary_nodes() {
        let h = reference_tree();
        let keep: BTreeSet<String> = ["A", "C", "D"].iter().map(|s| s.to_string()).collect();
        let r = h.restrict_to_classes(&keep).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.validate().is_empty());
        // A hangs directly off the root now.
        let root = r.node(r.root_id()).unwrap();
        let (l, _) = root.children.unwrap();
        assert_eq!(r.node(l).unwrap().leaf_class.as_deref(), Some("A"));
    }

    #[test]
    fn robinson_foulds_zero_for_identical_topologies() {
        let a = reference_tree();
        // Same topology, different merge distances.
        let b = Hierarchy::from_merge_sequence(
            &labels(&["A", "B", "C", "D"]),
            &[
                MergeStep { left: 2, right: 3, distance: 9.0 },
                MergeStep { left: 0, right: 1, distance: 2.0 },
                MergeStep { left: 4, right: 5, distance: 10.0 },
            ],
        )
        .unwrap();
        assert_eq!(a.robinson_foulds(&b).unwrap(), 0);

        // Different topology: ((A,C),(B,D)).
        let c = Hierarchy::from_merge_sequence(
            &labels(&["A", "B", "C", "D"]),
            &[
                MergeStep { left: 0, right: 2, distance: 1.0 },
                MergeStep { left: 1, right: 3, distance: 1.0 },
                MergeStep { left: 4, right: 5, distance: 2.0 },
            ],
        )
        .unwrap();
        assert_eq!(a.robinson_foulds(&c).unwrap(), 4);
    }

    /// BFS oracle used to cross-check the lockstep-walk implementation.
    fn bfs_distance(h: &Hierarchy, a: NodeId, b: NodeId) -> usize {
        h.distances_from(a).unwrap()[b]
    }

    proptest! {
        #[test]
        fn tree_distance_is_a_metric(n in 1usize..8, seed in any::<u64>()) {
            let h = random_tree(n, seed);
            prop_assert!(h.validate().is_empty());
            prop_assert_eq!(h.len(), 2 * n - 1);
            let ids: Vec<NodeId> = (0..h.len()).collect();
            for &a in &ids {
                prop_assert_eq!(h.tree_distance(a, a).unwrap(), 0);
                for &b in &ids {
                    let d_ab = h.tree_distance(a, b).unwrap();
                    prop_assert_eq!(d_ab, h.tree_distance(b, a).unwrap());
                    prop_assert_eq!(d_ab, bfs_distance(&h, a, b));
                    if a != b {
                        prop_assert!(d_ab > 0);
                    }
                    for &c in &ids {
                        let d_ac = h.tree_distance(a, c).unwrap();
                        let d_cb = h.tree_distance(c, b).unwrap();
                        prop_assert!(d_ab <= d_ac + d_cb);
                    }
                }
            }
        }

        #[test]
        fn distance_equals_depth_formula(n in 1usize..8, seed in any::<u64>()) {
            let h = random_tree(n, seed);
            for a in 0..h.len() {
                let path_a = h.path_from_root(a).unwrap();
                for b in 0..h.len() {
                    let path_b = h.path_from_root(b).unwrap();
                    let lca = path_a
                        .iter()
                        .zip(&path_b)
                        .take_while(|(x, y)| x == y)
                        .count()
                        - 1;
                    let lca_depth = h.node(path_a[lca]).unwrap().depth;
                    let expect = h.node(a).unwrap().depth + h.node(b).unwrap().depth
                        - 2 * lca_depth;
                    prop_assert_eq!(h.tree_distance(a, b).unwrap(), expect);
                }
            }
        }
    }
}
