//! Graph-of-groups decompositions, truncated Bass-Serre trees, cylinders
//! and the tree of cylinders, plus the conformal-dimension and attainment
//! decision procedures over tagged inputs.
//!
//! Commensurability of two-ended stabilizers is declared, never computed:
//! tree edges carry opaque axis labels produced from the input's axis rules,
//! and the cylinder partition only consumes the induced equivalence relation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary / non-elementary classification of a vertex or edge group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroupKind {
    Finite { order: u64 },
    TwoEnded,
    NonElementary,
}

/// Tag carried by each vertex and edge group of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTag {
    pub kind: GroupKind,
    /// Conformal dimension of the boundary; required iff `NonElementary`.
    pub confdim: Option<f64>,
    pub attains_confdim: bool,
    pub virtually_fuchsian: bool,
}

impl GroupTag {
    pub fn finite(order: u64) -> Self {
        GroupTag {
            kind: GroupKind::Finite { order },
            confdim: None,
            attains_confdim: false,
            virtually_fuchsian: false,
        }
    }

    pub fn two_ended() -> Self {
        GroupTag {
            kind: GroupKind::TwoEnded,
            confdim: None,
            attains_confdim: false,
            virtually_fuchsian: false,
        }
    }

    pub fn non_elementary(confdim: f64) -> Self {
        GroupTag {
            kind: GroupKind::NonElementary,
            confdim: Some(confdim),
            attains_confdim: false,
            virtually_fuchsian: false,
        }
    }

    pub fn is_elementary(&self) -> bool {
        !matches!(self.kind, GroupKind::NonElementary)
    }

    fn validate(&self, id: &str) -> Result<()> {
        match self.kind {
            GroupKind::Finite { order } => {
                if order == 0 {
                    return Err(Error::InvalidGraph(format!("`{id}`: group order 0")));
                }
                if self.confdim.is_some() {
                    return Err(Error::InvalidGraph(format!(
                        "`{id}`: finite tag carries a confdim"
                    )));
                }
            }
            GroupKind::TwoEnded => {
                if self.confdim.is_some() {
                    return Err(Error::InvalidGraph(format!(
                        "`{id}`: two-ended tag carries a confdim"
                    )));
                }
            }
            GroupKind::NonElementary => {
                let cd = self.confdim.ok_or_else(|| {
                    Error::InvalidGraph(format!("`{id}`: non-elementary tag without confdim"))
                })?;
                if !(cd >= 1.0) {
                    return Err(Error::InvalidGraph(format!(
                        "`{id}`: non-elementary confdim {cd} < 1"
                    )));
                }
                if self.virtually_fuchsian && cd != 1.0 {
                    return Err(Error::InvalidGraph(format!(
                        "`{id}`: virtually Fuchsian tag requires confdim 1, got {cd}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Inclusion index of an edge group in an endpoint vertex group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InclusionIndex {
    Finite(u64),
    Infinite,
}

impl InclusionIndex {
    fn as_finite(&self) -> Option<u64> {
        match self {
            InclusionIndex::Finite(k) => Some(*k),
            InclusionIndex::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GogEdge {
    pub id: String,
    /// Endpoints; may coincide (loop).
    pub from: String,
    pub to: String,
    pub tag: GroupTag,
    pub index_from: InclusionIndex,
    pub index_to: InclusionIndex,
}

/// Rule declaring that at tree vertices over `vertex`, incident tree edges
/// over `edge` fall into runs of `multiplicity` consecutive slots (parent
/// edge first, then children in creation order) whose stabilizers share one
/// commensurability class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisRule {
    pub vertex: String,
    pub edge: String,
    pub multiplicity: u64,
}

/// A finite connected graph decorated with vertex/edge group tags and
/// inclusion indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphOfGroups {
    pub vertices: Vec<(String, GroupTag)>,
    pub edges: Vec<GogEdge>,
    #[serde(default)]
    pub axis_rules: Vec<AxisRule>,
}

impl GraphOfGroups {
    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut ids = BTreeSet::new();
        for (id, tag) in &self.vertices {
            if !ids.insert(id.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate vertex id `{id}`")));
            }
            tag.validate(id)?;
        }
        let mut eids = BTreeSet::new();
        for e in &self.edges {
            if !eids.insert(e.id.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate edge id `{}`", e.id)));
            }
            e.tag.validate(&e.id)?;
            if !e.tag.is_elementary() {
                return Err(Error::NonElementaryEdge(e.id.clone()));
            }
            for (end, idx) in [(&e.from, e.index_from), (&e.to, e.index_to)] {
                let tag = self
                    .vertex_tag(end)
                    .ok_or_else(|| Error::UnknownVertex(end.clone()))?;
                match (&tag.kind, idx) {
                    // An index into a finite group must be positive and divide
                    // its order; an infinite index is impossible there.
                    (GroupKind::Finite { order }, InclusionIndex::Finite(k)) => {
                        if k == 0 || order % k != 0 {
                            return Err(Error::InvalidGraph(format!(
                                "edge `{}`: index {k} does not divide order {order} at `{end}`",
                                e.id
                            )));
                        }
                    }
                    (GroupKind::Finite { .. }, InclusionIndex::Infinite) => {
                        return Err(Error::InvalidGraph(format!(
                            "edge `{}`: infinite index into finite group `{end}`",
                            e.id
                        )));
                    }
                    (_, InclusionIndex::Finite(0)) => {
                        return Err(Error::InvalidGraph(format!(
                            "edge `{}`: zero index at `{end}`",
                            e.id
                        )));
                    }
                    _ => {}
                }
            }
        }
        if !self.is_connected() {
            return Err(Error::InvalidGraph("underlying graph not connected".into()));
        }
        Ok(())
    }

    pub fn vertex_tag(&self, id: &str) -> Option<&GroupTag> {
        self.vertices.iter().find(|(v, _)| v == id).map(|(_, t)| t)
    }

    fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|(v, _)| v == id)
    }

    fn is_connected(&self) -> bool {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![self.vertices[0].0.as_str()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            for e in &self.edges {
                if e.from == v {
                    stack.push(&e.to);
                }
                if e.to == v {
                    stack.push(&e.from);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Oriented edge slots incident to `v`: (edge index, leaves via `from`).
    /// A loop at `v` contributes both orientations.
    fn incident(&self, v: &str) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push((i, true));
            }
            if e.to == v {
                out.push((i, false));
            }
        }
        out
    }
}

/// A vertex of a truncated Bass-Serre tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeVertex {
    /// Orbit: index into the graph-of-groups vertex list.
    pub orbit: usize,
    /// Root-to-vertex edge-choice string; empty at the root.
    pub coset: String,
    pub parent: Option<usize>,
    pub depth: u32,
    /// True when the branching cap removed children here.
    pub pruned: bool,
}

/// An edge of a truncated Bass-Serre tree, keyed by its child endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    /// Orbit: index into the graph-of-groups edge list.
    pub orbit: usize,
    pub child: usize,
    /// Opaque token for the commensurability class of the edge stabilizer.
    pub axis: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BassSerreTruncation {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
}

impl BassSerreTruncation {
    pub fn edge_of_child(&self, child: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.child == child)
    }

    /// Tree edges incident to vertex `v`: parent edge first, then child
    /// edges in creation order.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(i) = self.edge_of_child(v) {
            out.push(i);
        }
        for (i, e) in self.edges.iter().enumerate() {
            if self.vertices[e.child].parent == Some(v) {
                out.push(i);
            }
        }
        out
    }

    fn parent_of_edge(&self, ei: usize) -> usize {
        self.vertices[self.edges[ei].child]
            .parent
            .expect("every tree edge has a parent endpoint")
    }
}

/// Expand the Bass-Serre tree of `gog` around `base` out to `depth`.
///
/// At a tree vertex over gog-vertex `v`, the tree edges over an oriented
/// gog-edge slot number the inclusion index of the edge group at that end;
/// the edge towards the parent consumes one slot of its own orbit.  An
/// infinite index (and any finite one beyond `branching_cap`) is truncated
/// to `branching_cap` child slots and the vertex is flagged `pruned`.
/// Expansion is breadth-first and fully deterministic; coset tokens record
/// the root-to-vertex edge choices.
pub fn expand_bass_serre(
    gog: &GraphOfGroups,
    base: &str,
    depth: u32,
    branching_cap: u64,
) -> Result<BassSerreTruncation> {
    gog.validate()?;
    if branching_cap == 0 {
        return Err(Error::ZeroBranchingCap);
    }
    let base_idx = gog
        .vertex_index(base)
        .ok_or_else(|| Error::UnknownVertex(base.to_string()))?;

    let mut vertices = vec![TreeVertex {
        orbit: base_idx,
        coset: String::new(),
        parent: None,
        depth: 0,
        pruned: false,
    }];
    let mut edges: Vec<TreeEdge> = Vec::new();
    let mut frontier = vec![0usize];

    for _ in 0..depth {
        let mut next = Vec::new();
        for &v in &frontier {
            let vid = gog.vertices[vertices[v].orbit].0.clone();

            // Which oriented slot the parent edge occupies at v.  For a loop
            // both orientations match; deduct from the first one seen.
            let parent_slot: Option<(usize, Option<bool>)> =
                edges.iter().find(|e| e.child == v).map(|e| {
                    let ge = &gog.edges[e.orbit];
                    if ge.from == ge.to {
                        (e.orbit, None)
                    } else {
                        (e.orbit, Some(ge.from == vid))
                    }
                });
            let mut parent_deducted = false;
            let mut child_counter = 0u64;

            for (ei, via_from) in gog.incident(&vid) {
                let e = &gog.edges[ei];
                let index = if via_from { e.index_from } else { e.index_to };
                let mut avail = index.as_finite();
                if let Some((pe, orient)) = parent_slot {
                    if pe == ei && !parent_deducted && orient.map_or(true, |f| f == via_from) {
                        parent_deducted = true;
                        avail = avail.map(|k| k - 1);
                    }
                }
                let slots = match avail {
                    Some(k) => {
                        if k > branching_cap {
                            vertices[v].pruned = true;
                        }
                        k.min(branching_cap)
                    }
                    None => {
                        vertices[v].pruned = true;
                        branching_cap
                    }
                };
                for _ in 0..slots {
                    let other = if via_from { &e.to } else { &e.from };
                    let other_idx = gog.vertex_index(other).expect("validated endpoint");
                    let coset = format!("{}/{}:{}", vertices[v].coset, e.id, child_counter);
                    child_counter += 1;
                    vertices.push(TreeVertex {
                        orbit: other_idx,
                        coset,
                        parent: Some(v),
                        depth: vertices[v].depth + 1,
                        pruned: false,
                    });
                    let child = vertices.len() - 1;
                    edges.push(TreeEdge {
                        orbit: ei,
                        child,
                        axis: 0,
                    });
                    next.push(child);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    let mut tree = BassSerreTruncation { vertices, edges };
    assign_axes(gog, &mut tree);
    Ok(tree)
}

fn uf_find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn uf_union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (uf_find(parent, a), uf_find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Assign axis labels: union-find over tree edges, grouping edges declared
/// to share a stabilizer commensurability class, then one label per class
/// (numbered in first-appearance order, so labels are deterministic).
fn assign_axes(gog: &GraphOfGroups, tree: &mut BassSerreTruncation) {
    let n = tree.edges.len();
    let mut parent: Vec<usize> = (0..n).collect();

    for v in 0..tree.vertices.len() {
        let orbit = tree.vertices[v].orbit;
        let (vid, vtag) = &gog.vertices[orbit];
        let incident = tree.incident_edges(v);

        // A two-ended vertex group commensurates every finite-index edge
        // group inside it: all such incident edges share an axis.
        if matches!(vtag.kind, GroupKind::TwoEnded) {
            let finite: Vec<usize> = incident
                .iter()
                .copied()
                .filter(|&ei| {
                    let ge = &gog.edges[tree.edges[ei].orbit];
                    (ge.from == *vid && ge.index_from.as_finite().is_some())
                        || (ge.to == *vid && ge.index_to.as_finite().is_some())
                })
                .collect();
            for w in finite.windows(2) {
                uf_union(&mut parent, w[0], w[1]);
            }
        }

        // Declared rules: chunk this orbit's incident edges into runs of
        // `multiplicity` consecutive slots and union within each run.
        for rule in &gog.axis_rules {
            if &rule.vertex != vid || rule.multiplicity < 2 {
                continue;
            }
            let group: Vec<usize> = incident
                .iter()
                .copied()
                .filter(|&ei| gog.edges[tree.edges[ei].orbit].id == rule.edge)
                .collect();
            for chunk in group.chunks(rule.multiplicity as usize) {
                for w in chunk.windows(2) {
                    uf_union(&mut parent, w[0], w[1]);
                }
            }
        }
    }

    let mut labels: BTreeMap<usize, u32> = BTreeMap::new();
    for i in 0..n {
        let r = uf_find(&mut parent, i);
        let next = labels.len() as u32;
        tree.edges[i].axis = *labels.entry(r).or_insert(next);
    }
}

/// Partition of tree edges into cylinders (maximal same-axis classes).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylinderPartition {
    /// Cylinder id per tree edge.
    pub edge_cylinder: Vec<usize>,
    /// Edge indices per cylinder, each sorted ascending.
    pub cylinders: Vec<Vec<usize>>,
}

/// Group tree edges by axis label, checking each class is a subtree.
pub fn compute_cylinders(t: &BassSerreTruncation) -> Result<CylinderPartition> {
    let mut by_axis: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, e) in t.edges.iter().enumerate() {
        by_axis.entry(e.axis).or_default().push(i);
    }
    let mut edge_cylinder = vec![usize::MAX; t.edges.len()];
    let mut cylinders = Vec::new();
    for members in by_axis.into_values() {
        let cid = cylinders.len();
        for &e in &members {
            edge_cylinder[e] = cid;
        }
        if members.len() > 1 && !is_connected_in_tree(t, &members) {
            return Err(Error::InconsistentPartition(format!(
                "axis class {:?} is not connected in the tree",
                members
            )));
        }
        cylinders.push(members);
    }
    Ok(CylinderPartition {
        edge_cylinder,
        cylinders,
    })
}

fn is_connected_in_tree(t: &BassSerreTruncation, members: &[usize]) -> bool {
    let mut at_vertex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in members {
        at_vertex.entry(t.edges[e].child).or_default().push(e);
        at_vertex.entry(t.parent_of_edge(e)).or_default().push(e);
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![members[0]];
    while let Some(e) = stack.pop() {
        if !seen.insert(e) {
            continue;
        }
        for v in [t.edges[e].child, t.parent_of_edge(e)] {
            for &f in &at_vertex[&v] {
                stack.push(f);
            }
        }
    }
    seen.len() == members.len()
}

/// A vertex of the tree of cylinders.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CylTreeVertex {
    /// Surviving original vertex (in >= 2 cylinders, or non-elementary).
    Original { tree_vertex: usize, tag: GroupTag },
    /// A cylinder, carrying its axis label; its group is two-ended.
    Cylinder { cylinder: usize, axis: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeOfCylinders {
    pub vertices: Vec<CylTreeVertex>,
    /// Each edge joins an `Original` index (left) to a `Cylinder` index.
    pub edges: Vec<(usize, usize)>,
}

impl TreeOfCylinders {
    pub fn v0_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| matches!(v, CylTreeVertex::Original { .. }))
            .count()
    }

    pub fn v1_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| matches!(v, CylTreeVertex::Cylinder { .. }))
            .count()
    }

    pub fn is_bipartite(&self) -> bool {
        self.edges.iter().all(|&(a, b)| {
            matches!(self.vertices[a], CylTreeVertex::Original { .. })
                && matches!(self.vertices[b], CylTreeVertex::Cylinder { .. })
        })
    }

    /// Forest check: adding every edge to a union-find never closes a cycle.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        for &(a, b) in &self.edges {
            let (ra, rb) = (uf_find(&mut parent, a), uf_find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra.max(rb)] = ra.min(rb);
        }
        true
    }
}

/// Replace each cylinder by the cone on its boundary: keep the original
/// vertices lying in at least two cylinders (or with non-elementary group),
/// add one vertex per cylinder, and join each kept vertex to the cylinders
/// containing it.
pub fn tree_of_cylinders(
    gog: &GraphOfGroups,
    t: &BassSerreTruncation,
    part: &CylinderPartition,
) -> Result<TreeOfCylinders> {
    if part.edge_cylinder.len() != t.edges.len() {
        return Err(Error::InconsistentPartition(format!(
            "partition covers {} edges, tree has {}",
            part.edge_cylinder.len(),
            t.edges.len()
        )));
    }
    for (cid, members) in part.cylinders.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::InconsistentPartition(format!(
                "cylinder {cid} is empty"
            )));
        }
        for &e in members {
            if part.edge_cylinder.get(e).copied() != Some(cid) {
                return Err(Error::InconsistentPartition(format!(
                    "edge {e} not mapped back to cylinder {cid}"
                )));
            }
        }
    }

    // cylinders incident to each tree vertex
    let mut incident: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t.vertices.len()];
    for (ei, &cid) in part.edge_cylinder.iter().enumerate() {
        incident[t.edges[ei].child].insert(cid);
        incident[t.parent_of_edge(ei)].insert(cid);
    }

    let mut vertices: Vec<CylTreeVertex> = Vec::new();
    let mut v0_of_tree: BTreeMap<usize, usize> = BTreeMap::new();
    for (v, tv) in t.vertices.iter().enumerate() {
        let tag = gog.vertices[tv.orbit].1.clone();
        let non_elem = matches!(tag.kind, GroupKind::NonElementary);
        if incident[v].len() >= 2 || non_elem {
            v0_of_tree.insert(v, vertices.len());
            vertices.push(CylTreeVertex::Original {
                tree_vertex: v,
                tag,
            });
        }
    }
    let mut cyl_vertex: Vec<usize> = Vec::with_capacity(part.cylinders.len());
    for (cid, members) in part.cylinders.iter().enumerate() {
        cyl_vertex.push(vertices.len());
        vertices.push(CylTreeVertex::Cylinder {
            cylinder: cid,
            axis: t.edges[members[0]].axis,
        });
    }

    let mut edges = BTreeSet::new();
    for (ei, &cid) in part.edge_cylinder.iter().enumerate() {
        for v in [t.edges[ei].child, t.parent_of_edge(ei)] {
            if let Some(&v0) = v0_of_tree.get(&v) {
                edges.insert((v0, cyl_vertex[cid]));
            }
        }
    }

    let out = TreeOfCylinders {
        vertices,
        edges: edges.into_iter().collect(),
    };
    if !out.is_bipartite() {
        return Err(Error::InconsistentPartition("output not bipartite".into()));
    }
    if !out.is_forest() {
        return Err(Error::InconsistentPartition("output has a cycle".into()));
    }
    Ok(out)
}

/// Result of the conformal-dimension formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConfdimValue {
    /// Virtually free amalgam: conformal dimension 0.
    VirtuallyFree,
    Value(f64),
}

impl ConfdimValue {
    pub fn numeric(&self) -> f64 {
        match self {
            ConfdimValue::VirtuallyFree => 0.0,
            ConfdimValue::Value(v) => *v,
        }
    }
}

/// Conformal dimension of the amalgam from the tagged decomposition.
///
/// If some edge group is two-ended the value is max{1, vertex confdims};
/// if every edge group is finite it is the max over the infinite vertex
/// groups, with the empty maximum equal to 0.
pub fn confdim_formula(gog: &GraphOfGroups, virtually_free: bool) -> Result<ConfdimValue> {
    gog.validate()?;
    if virtually_free {
        return Ok(ConfdimValue::VirtuallyFree);
    }
    let any_two_ended_edge = gog
        .edges
        .iter()
        .any(|e| matches!(e.tag.kind, GroupKind::TwoEnded));
    if any_two_ended_edge {
        let m = gog
            .vertices
            .iter()
            .filter_map(|(_, t)| t.confdim)
            .fold(1.0f64, f64::max);
        Ok(ConfdimValue::Value(m))
    } else {
        let m = gog
            .vertices
            .iter()
            .filter(|(_, t)| !matches!(t.kind, GroupKind::Finite { .. }))
            .map(|(_, t)| t.confdim.unwrap_or(1.0))
            .fold(0.0f64, f64::max);
        Ok(ConfdimValue::Value(m))
    }
}

/// Declared properties of the whole amalgam used by the attainment decision.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WholeGroupFlags {
    pub two_ended: bool,
    pub virtually_cocompact_fuchsian: bool,
    /// Set when the amalgam is trivial: equal to this single vertex group.
    pub equals_single_vertex: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Attainment {
    /// Value 0, attained (two-ended whole group).
    Attained0,
    /// Value 1, attained (virtually cocompact Fuchsian whole group).
    Attained1,
    /// Value > 1 attained because the amalgam is a single vertex group that
    /// attains its own conformal dimension.
    AttainedByVertex(String),
    NotAttained,
}

/// Decide whether the conformal dimension of the amalgam is attained.
pub fn attainment_classification(
    gog: &GraphOfGroups,
    virtually_free: bool,
    flags: &WholeGroupFlags,
) -> Result<Attainment> {
    let value = confdim_formula(gog, virtually_free)?.numeric();
    if flags.two_ended
        && gog
            .vertices
            .iter()
            .any(|(_, t)| matches!(t.kind, GroupKind::NonElementary))
    {
        return Err(Error::InconsistentFlags(
            "two-ended whole group with a non-elementary vertex group".into(),
        ));
    }
    if value == 0.0 && flags.two_ended {
        return Ok(Attainment::Attained0);
    }
    if value == 1.0 && flags.virtually_cocompact_fuchsian {
        return Ok(Attainment::Attained1);
    }
    if let Some(vid) = &flags.equals_single_vertex {
        let tag = gog
            .vertex_tag(vid)
            .ok_or_else(|| Error::UnknownVertex(vid.clone()))?;
        if tag.attains_confdim && tag.confdim.map_or(false, |c| c > 1.0) {
            return Ok(Attainment::AttainedByVertex(vid.clone()));
        }
    }
    Ok(Attainment::NotAttained)
}
