//! Scale covers on separated nets, their nerves, and curve families.
//!
//! A cover at scale index n consists of the metric balls of radius a^{-n}
//! around a maximal a^{-n}-separated set of discretization nodes, chosen by
//! greedy farthest-point sampling seeded at x-.  The nerve connects covers
//! sets whose balls overlap (center distance < 2·radius).  Curve families
//! are resolved into endpoint constraints on cover sets for the modulus
//! solver's shortest-path oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{ModelSpace, OrderedF64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cover {
    /// Scale index n; set radius a^{-n}.
    pub n: i32,
    pub radius: f64,
    /// Center node ids in selection order (x- first).
    pub centers: Vec<usize>,
    /// Nerve adjacency over cover-set indices.
    pub nerve: Vec<Vec<usize>>,
    pub max_degree: usize,
}

/// Build the scale-n cover: maximal a^{-n}-separated net plus nerve.
pub fn build_cover(space: &ModelSpace, n: i32) -> Result<Cover> {
    let a = f64::from(space.tree.spec.scale_base);
    let radius = a.powi(-n);
    if radius < 4.0 * space.resolution {
        return Err(Error::ScaleBelowResolution {
            n,
            resolution: space.resolution,
        });
    }
    let centers = farthest_point_net(space, radius);
    let (nerve, max_degree) = build_nerve(space, &centers, radius);
    Ok(Cover {
        n,
        radius,
        centers,
        nerve,
        max_degree,
    })
}

/// Greedy farthest-point sampling: repeatedly add the node farthest from
/// the chosen set until that distance drops below `radius`.  The result is
/// `radius`-separated (selection distances are non-increasing) and covers
/// every node within `radius` (termination condition).
fn farthest_point_net(space: &ModelSpace, radius: f64) -> Vec<usize> {
    let nv = space.nodes.len();
    let mut d_near = vec![f64::INFINITY; nv];
    // lazy max-heap over (distance to nearest center, node)
    let mut far: BinaryHeap<(OrderedF64, usize)> = BinaryHeap::new();
    let mut centers = Vec::new();

    let add_center = |c: usize,
                          d_near: &mut Vec<f64>,
                          far: &mut BinaryHeap<(OrderedF64, usize)>| {
        // improvement-pruned Dijkstra: skip a node once the new center is no
        // closer than its current nearest center (triangle inequality makes
        // further improvements through it impossible)
        let mut heap: BinaryHeap<Reverse<(OrderedF64, usize)>> = BinaryHeap::new();
        let mut local: std::collections::HashMap<usize, f64> = Default::default();
        local.insert(c, 0.0);
        heap.push(Reverse((OrderedF64(0.0), c)));
        while let Some(Reverse((OrderedF64(d), u))) = heap.pop() {
            if local.get(&u).map_or(true, |&b| d > b) {
                continue;
            }
            if d >= d_near[u] {
                continue;
            }
            d_near[u] = d;
            far.push((OrderedF64(d), u));
            for &(v, w) in &space.adj[u] {
                let nd = d + w;
                if nd < d_near[v] && local.get(&v).map_or(true, |&b| nd < b) {
                    local.insert(v, nd);
                    heap.push(Reverse((OrderedF64(nd), v)));
                }
            }
        }
    };

    centers.push(space.x_minus);
    add_center(space.x_minus, &mut d_near, &mut far);
    while let Some((OrderedF64(d), u)) = far.pop() {
        if d != d_near[u] {
            continue; // stale entry
        }
        if d < radius {
            break;
        }
        centers.push(u);
        add_center(u, &mut d_near, &mut far);
    }
    centers
}

/// Nerve adjacency: cover sets overlap iff center distance < 2·radius,
/// found with one truncated Dijkstra per center.
fn build_nerve(space: &ModelSpace, centers: &[usize], radius: f64) -> (Vec<Vec<usize>>, usize) {
    let mut center_of_node = vec![usize::MAX; space.nodes.len()];
    for (i, &c) in centers.iter().enumerate() {
        center_of_node[c] = i;
    }
    let mut nerve = vec![Vec::new(); centers.len()];
    for (i, &c) in centers.iter().enumerate() {
        for (node, d) in space.dijkstra(&[(c, 0.0)], 2.0 * radius) {
            let j = center_of_node[node];
            if j != usize::MAX && j != i && d < 2.0 * radius {
                nerve[i].push(j);
            }
        }
        nerve[i].sort_unstable();
        nerve[i].dedup();
    }
    let max_degree = nerve.iter().map(Vec::len).max().unwrap_or(0);
    (nerve, max_degree)
}

/// Curve families on a cover.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CurveFamily {
    /// All curves joining x- to x+.
    JoinEnds,
    /// Curves whose endpoints are limit-set points at least `delta_prime`
    /// apart (the tame sub-family standing in for diameter-δ curves).
    EndpointSeparation { delta_prime: f64 },
    /// Explicit nerve paths (lists of cover-set indices).
    Explicit(Vec<Vec<usize>>),
}

/// One shortest-path constraint group: curves from `source` to any target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintGroup {
    pub source: usize,
    pub targets: Vec<usize>,
}

/// A family resolved against a concrete cover.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ResolvedFamily {
    /// Endpoint constraints: every nerve path from a source to one of its
    /// targets is a family member.
    Pairs(Vec<ConstraintGroup>),
    Explicit(Vec<Vec<usize>>),
}

impl ResolvedFamily {
    pub fn is_empty(&self) -> bool {
        match self {
            ResolvedFamily::Pairs(gs) => gs.iter().all(|g| g.targets.is_empty()),
            ResolvedFamily::Explicit(cs) => cs.is_empty(),
        }
    }
}

/// Resolve a family spec against a cover.
pub fn resolve_family(
    space: &ModelSpace,
    cover: &Cover,
    family: &CurveFamily,
) -> Result<ResolvedFamily> {
    let tree = &space.tree;
    match family {
        CurveFamily::JoinEnds => {
            let xm = space.nodes[space.x_minus].point;
            let xp = space.nodes[space.x_plus].point;
            let mut sources = Vec::new();
            let mut targets = Vec::new();
            for (i, &c) in cover.centers.iter().enumerate() {
                let p = space.nodes[c].point;
                if tree.distance(p, xm) <= cover.radius {
                    sources.push(i);
                }
                if tree.distance(p, xp) <= cover.radius {
                    targets.push(i);
                }
            }
            let groups = sources
                .into_iter()
                .map(|s| ConstraintGroup {
                    source: s,
                    targets: targets.clone(),
                })
                .collect();
            Ok(ResolvedFamily::Pairs(groups))
        }
        CurveFamily::EndpointSeparation { delta_prime } => {
            let dp = *delta_prime;
            if !(dp > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "endpoint separation {dp} must be positive"
                )));
            }
            if dp > 1.0 {
                // the space diameter is at least 1 (root circle); beyond
                // that, measure before rejecting
                let diam = tree.subtree_diameter_sampled(0, 2, 8);
                if dp > diam {
                    return Err(Error::InvalidSpec(format!(
                        "endpoint separation {dp} exceeds space diameter {diam}"
                    )));
                }
            }
            // truncation tree: vertices with limit-set diameter above the
            // threshold (ancestor-closed since scales shrink downward), plus
            // the root
            let in_t: Vec<bool> = tree
                .circles
                .iter()
                .enumerate()
                .map(|(i, c)| i == 0 || c.scale > dp)
                .collect();
            // endpoints: cover sets meeting some Λ_v with v in the
            // truncation tree
            let mut endpoints = Vec::new();
            for (i, &c) in cover.centers.iter().enumerate() {
                let p = space.nodes[c].point;
                let meets = in_t
                    .iter()
                    .enumerate()
                    .filter(|&(_, &t)| t)
                    .any(|(v, _)| tree.distance_to_circle(p, v) <= cover.radius);
                if meets {
                    endpoints.push(i);
                }
            }
            // qualifying pairs: endpoint centers at distance >= delta_prime;
            // each unordered pair appears in exactly one group
            let pts: Vec<_> = endpoints
                .iter()
                .map(|&i| space.nodes[cover.centers[i]].point)
                .collect();
            let mut groups = Vec::new();
            for (k, &e) in endpoints.iter().enumerate() {
                let targets: Vec<usize> = endpoints[(k + 1)..]
                    .iter()
                    .enumerate()
                    .filter(|&(off, _)| tree.distance(pts[k], pts[k + 1 + off]) >= dp)
                    .map(|(_, &e2)| e2)
                    .collect();
                if !targets.is_empty() {
                    groups.push(ConstraintGroup { source: e, targets });
                }
            }
            Ok(ResolvedFamily::Pairs(groups))
        }
        CurveFamily::Explicit(paths) => {
            for path in paths {
                for &s in path {
                    if s >= cover.centers.len() {
                        return Err(Error::ForeignCoverSet {
                            set: s,
                            len: cover.centers.len(),
                        });
                    }
                }
                for w in path.windows(2) {
                    if w[0] != w[1] && !cover.nerve[w[0]].contains(&w[1]) {
                        return Err(Error::InvalidSpec(format!(
                            "explicit path step {} -> {} is not a nerve edge",
                            w[0], w[1]
                        )));
                    }
                }
            }
            Ok(ResolvedFamily::Explicit(paths.clone()))
        }
    }
}
