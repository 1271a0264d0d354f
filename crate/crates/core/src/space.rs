//! Discretized circle-tree model spaces.
//!
//! A [`ModelSpace`] is a weighted graph sampled from a [`CircleTree`]: every
//! gluing point is a graph node (so identified pairs collapse to one node),
//! and each circle is filled with equispaced nodes until no arc gap exceeds
//! the resolution.  Shortest graph paths between nodes equal the exact
//! length-metric distances, because optimal paths only switch circles at
//! gluing points and run along arcs in between.
//!
//! The module also measures the metric-estimate suite (relative distances
//! of gluing pairs, limit-set diameter ratios and nesting, uniform
//! perfectness) and porosity of tagged subsets.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CircleTree, CircleTreeSpec, Point};

/// A graph node with its canonical point and any glued aliases.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    /// Point on the circle where the node was created.
    pub point: Point,
    /// The same physical point expressed on other circles (gluing).
    pub aliases: Vec<Point>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpace {
    pub tree: CircleTree,
    pub resolution: f64,
    pub nodes: Vec<Node>,
    /// Adjacency: (neighbor, arc length).
    pub adj: Vec<Vec<(usize, f64)>>,
    /// Node ids on each circle in arc-position order.
    pub circle_nodes: Vec<Vec<usize>>,
    pub x_minus: usize,
    pub x_plus: usize,
}

/// Build a discretization of the circle tree at `level`.
pub fn build_space(spec: &CircleTreeSpec, level: u32, resolution: f64) -> Result<ModelSpace> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidSpec(format!("resolution {resolution} <= 0")));
    }
    let a = f64::from(spec.scale_base);
    let max = a.powi(-(level as i32)) / 4.0;
    if resolution > max {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            level,
            max,
        });
    }
    let tree = CircleTree::build(spec, level)?;
    build_on_tree(tree, resolution)
}

fn build_on_tree(tree: CircleTree, resolution: f64) -> Result<ModelSpace> {
    let ncirc = tree.circles.len();
    let mut nodes: Vec<Node> = Vec::new();
    let mut adj: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut circle_nodes: Vec<Vec<usize>> = vec![Vec::new(); ncirc];
    // glue positions created on a circle, keyed by exact bit pattern
    let mut glue_lookup: HashMap<(usize, u64), usize> = HashMap::new();

    // Circles are in BFS order, so parents are processed before children and
    // the parent-side nodes of every gluing pair already exist.
    for c in 0..ncirc {
        let circ = tree.circles[c].circumference;
        // special positions: own gluing pair, children's gluing pairs on
        // this circle, and the distinguished pair on the root
        let mut special: Vec<f64> = Vec::new();
        if c == 0 {
            special.push(0.0);
            special.push(circ / 2.0);
        }
        if let Some(at) = &tree.circles[c].attachment {
            special.push(at.child_pos.0);
            special.push(at.child_pos.1);
        }
        for &k in &tree.circles[c].children {
            let at = tree.circles[k].attachment.as_ref().unwrap();
            special.push(at.parent_pos.0);
            special.push(at.parent_pos.1);
        }
        special.sort_by(|x, y| x.partial_cmp(y).unwrap());
        special.dedup();

        // fill every arc gap (including the wrap-around one) to resolution
        let mut positions: Vec<f64> = Vec::new();
        if special.is_empty() {
            special.push(0.0);
        }
        for i in 0..special.len() {
            let p = special[i];
            let q = if i + 1 < special.len() {
                special[i + 1]
            } else {
                special[0] + circ
            };
            positions.push(p);
            let gap = q - p;
            if gap > resolution {
                let extra = (gap / resolution).ceil() as usize - 1;
                for e in 1..=extra {
                    positions.push(p + gap * (e as f64) / ((extra + 1) as f64));
                }
            }
        }

        // create or alias a node per position
        let own_glue = tree.circles[c].attachment.as_ref().map(|at| {
            let parent = tree.circles[c].parent.unwrap();
            (
                (at.child_pos.0, glue_lookup[&(parent, at.parent_pos.0.to_bits())]),
                (at.child_pos.1, glue_lookup[&(parent, at.parent_pos.1.to_bits())]),
            )
        });
        for &pos in &positions {
            let aliased = own_glue.and_then(|((g0, n0), (g1, n1))| {
                if pos == g0 {
                    Some(n0)
                } else if pos == g1 {
                    Some(n1)
                } else {
                    None
                }
            });
            let id = match aliased {
                Some(n) => {
                    nodes[n].aliases.push(Point { circle: c, pos });
                    n
                }
                None => {
                    nodes.push(Node {
                        point: Point { circle: c, pos },
                        aliases: Vec::new(),
                    });
                    adj.push(Vec::new());
                    nodes.len() - 1
                }
            };
            circle_nodes[c].push(id);
            if special.binary_search_by(|s| s.partial_cmp(&pos).unwrap()).is_ok() {
                glue_lookup.insert((c, pos.to_bits()), id);
            }
        }

        // ring edges between consecutive positions
        let ring = &circle_nodes[c];
        let m = ring.len();
        for i in 0..m {
            let j = (i + 1) % m;
            let gap = if j == 0 {
                positions[0] + circ - positions[m - 1]
            } else {
                positions[j] - positions[i]
            };
            let (u, v) = (ring[i], ring[j]);
            if u != v {
                adj[u].push((v, gap));
                adj[v].push((u, gap));
            }
        }
    }

    let x_minus = glue_lookup[&(0, 0.0f64.to_bits())];
    let x_plus = glue_lookup[&(0, tree.circles[0].scale.to_bits())];
    Ok(ModelSpace {
        tree,
        resolution,
        nodes,
        adj,
        circle_nodes,
        x_minus,
        x_plus,
    })
}

/// Heap entry ordered by distance (min-heap via `Reverse`).
type HeapEntry = Reverse<(ordered_f64::OrderedF64, usize)>;

mod ordered_f64 {
    /// Total order wrapper for nonnegative finite distances.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct OrderedF64(pub f64);
    impl Eq for OrderedF64 {}
    impl PartialOrd for OrderedF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for OrderedF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.partial_cmp(&other.0).expect("finite distance")
        }
    }
}
pub use ordered_f64::OrderedF64;

impl ModelSpace {
    /// Multi-source Dijkstra truncated at `radius` (`f64::INFINITY` for a
    /// full sweep).  Returns (node, distance) pairs for all settled nodes.
    pub fn dijkstra(&self, sources: &[(usize, f64)], radius: f64) -> Vec<(usize, f64)> {
        let mut dist: HashMap<usize, f64> = HashMap::new();
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        for &(s, d0) in sources {
            if d0 <= radius && dist.get(&s).map_or(true, |&d| d0 < d) {
                dist.insert(s, d0);
                heap.push(Reverse((OrderedF64(d0), s)));
            }
        }
        let mut settled: Vec<(usize, f64)> = Vec::new();
        while let Some(Reverse((OrderedF64(d), u))) = heap.pop() {
            if dist.get(&u).map_or(true, |&best| d > best) {
                continue;
            }
            settled.push((u, d));
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd <= radius && dist.get(&v).map_or(true, |&best| nd < best) {
                    dist.insert(v, nd);
                    heap.push(Reverse((OrderedF64(nd), v)));
                }
            }
        }
        settled
    }

    /// Does the node lie in the limit set of `v` (the closed subtree)?
    pub fn node_in_subtree(&self, node: usize, v: usize) -> bool {
        let n = &self.nodes[node];
        std::iter::once(&n.point)
            .chain(n.aliases.iter())
            .any(|p| self.tree.is_ancestor(v, p.circle))
    }

    /// All node ids lying in the limit set of `v`.
    pub fn subtree_nodes(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        let mut seen = vec![false; self.nodes.len()];
        while let Some(c) = stack.pop() {
            for &id in &self.circle_nodes[c] {
                if !seen[id] {
                    seen[id] = true;
                    out.push(id);
                }
            }
            stack.extend(self.tree.circles[c].children.iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// Exact distance between two nodes via the analytic tree metric.
    pub fn node_distance(&self, u: usize, v: usize) -> f64 {
        self.tree.distance(self.nodes[u].point, self.nodes[v].point)
    }
}

/// d(U, V) / min(diam U, diam V) with the exact tree metric; `INFINITY`
/// when both sets are singletons (diameter 0) at positive distance.
pub fn relative_distance(tree: &CircleTree, u: &[Point], v: &[Point]) -> Result<f64> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut gap = f64::INFINITY;
    for &x in u {
        for &y in v {
            gap = gap.min(tree.distance(x, y));
        }
    }
    let diam = |s: &[Point]| {
        let mut d: f64 = 0.0;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                d = d.max(tree.distance(s[i], s[j]));
            }
        }
        d
    };
    let m = diam(u).min(diam(v));
    if gap == 0.0 {
        Ok(0.0)
    } else if m == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(gap / m)
    }
}

/// Measured analogs of the geometric constants of the construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricEstimates {
    /// Min relative distance over distinct gluing pairs (1/K1 analog).
    pub min_pair_relative_distance: f64,
    /// Max of diam U_{v->} / diam of v's gluing pair (K4 analog).
    pub max_outward_over_pair: f64,
    /// Max deviation |(D_w/D_v)·a^{Δlevel} − 1| over parent/child pairs.
    pub diameter_ratio_deviation: f64,
    /// Uniform-perfectness constant: max over samples of r / largest
    /// attained distance ≤ r.
    pub uniform_perfectness: f64,
    /// diam Λ_{e_v} ≤ diam Λ_v ≤ diam U_{v->} at every non-root vertex.
    pub nesting_ok: bool,
    /// Measured subtree (U_{v->}) diameters per circle.
    pub subtree_diameters: Vec<f64>,
}

/// Measure the metric-estimate suite on a built space.
pub fn metric_estimates_report(space: &ModelSpace) -> Result<MetricEstimates> {
    let tree = &space.tree;
    if tree.circles.len() < 2 || tree.level < 2 {
        return Err(Error::DegenerateSpace(
            "metric estimates need at least 2 gluing levels".into(),
        ));
    }

    // gluing pairs as 2-point sets on the child circle
    let pairs: Vec<(usize, [Point; 2], f64)> = tree
        .circles
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            c.attachment.as_ref().map(|at| {
                (
                    i,
                    [
                        Point {
                            circle: i,
                            pos: at.child_pos.0,
                        },
                        Point {
                            circle: i,
                            pos: at.child_pos.1,
                        },
                    ],
                    c.scale,
                )
            })
        })
        .collect();

    let mut min_rel = f64::INFINITY;
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let (_, pi, si) = &pairs[i];
            let (_, pj, sj) = &pairs[j];
            let mut gap = f64::INFINITY;
            for &x in pi {
                for &y in pj {
                    gap = gap.min(tree.distance(x, y));
                }
            }
            // pair diameter equals the copy scale exactly (antipodal pair)
            min_rel = min_rel.min(gap / si.min(*sj));
        }
    }

    let subtree_diams = tree.subtree_diameters();
    let mut max_out = 0.0f64;
    let mut nesting_ok = true;
    let mut ratio_dev = 0.0f64;
    let a = f64::from(tree.spec.scale_base);
    // measured limit-set (single circle) diameters
    let circle_diams: Vec<f64> = (0..tree.circles.len())
        .map(|i| tree.circle_diameter_sampled(i, 12))
        .collect();
    for (i, c) in tree.circles.iter().enumerate() {
        if c.attachment.is_none() {
            continue;
        }
        // pair diameter equals the copy scale exactly (antipodal pair)
        let pair_diam = c.scale;
        // U_{v->} is the closed subtree side of the pair
        max_out = max_out.max(subtree_diams[i] / pair_diam);
        // nesting diam Λ_{e_v} ≤ diam Λ_v ≤ diam U_{v->}
        if !(pair_diam <= circle_diams[i] + 1e-9 && circle_diams[i] <= subtree_diams[i] + 1e-9) {
            nesting_ok = false;
        }
        // diam Λ_v / diam Λ_root against a^{-level}
        let expected = a.powi(-(c.level as i32));
        ratio_dev = ratio_dev.max(((circle_diams[i] / circle_diams[0]) / expected - 1.0).abs());
    }

    // uniform perfectness over sampled centers and dyadic radii
    let samples = perfectness_samples(space);
    let mut uniform = 1.0f64;
    let diam_x = subtree_diams[0];
    for &s in &samples {
        let sweep = space.dijkstra(&[(s, 0.0)], f64::INFINITY);
        let mut radius = diam_x / 2.0;
        while radius > 4.0 * space.resolution {
            let attained = sweep
                .iter()
                .map(|&(_, d)| d)
                .filter(|&d| d <= radius)
                .fold(0.0f64, f64::max);
            if attained > 0.0 {
                uniform = uniform.max(radius / attained);
            }
            radius /= 2.0;
        }
    }

    Ok(MetricEstimates {
        min_pair_relative_distance: min_rel,
        max_outward_over_pair: max_out,
        diameter_ratio_deviation: ratio_dev,
        uniform_perfectness: uniform,
        nesting_ok,
        subtree_diameters: subtree_diams,
    })
}

fn perfectness_samples(space: &ModelSpace) -> Vec<usize> {
    let mut out = vec![space.x_minus, space.x_plus];
    // a few nodes per depth level, spread deterministically
    let n = space.nodes.len();
    for k in 1..=16 {
        out.push((k * n) / 17);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A subset of the space for porosity scans.
#[derive(Debug, Clone)]
pub enum Region {
    Points(Vec<Point>),
    /// The limit set Λ_v of a circle-tree vertex: the circle of `v`.
    LimitSet(usize),
}

impl Region {
    fn distance_to(&self, tree: &CircleTree, p: Point) -> f64 {
        match self {
            Region::Points(pts) => pts
                .iter()
                .map(|&q| tree.distance(p, q))
                .fold(f64::INFINITY, f64::min),
            Region::LimitSet(v) => tree.distance_to_circle(p, *v),
        }
    }

    fn sample(&self, tree: &CircleTree, cap: usize) -> Vec<Point> {
        match self {
            Region::Points(pts) => {
                let step = (pts.len() / cap).max(1);
                pts.iter().step_by(step).copied().collect()
            }
            Region::LimitSet(v) => {
                let circ = tree.circles[*v].circumference;
                (0..cap)
                    .map(|i| Point {
                        circle: *v,
                        pos: circ * (i as f64) / (cap as f64),
                    })
                    .collect()
            }
        }
    }
}

/// Largest porosity constant c validated at every sampled (y, r): some node
/// x has B(x, cr) inside B(y, r) and missing Y.  Returns 0 when no sample
/// admits an empty ball.
pub fn porosity_estimate(space: &ModelSpace, y: &Region, scales: &[f64]) -> Result<f64> {
    let tree = &space.tree;
    let ysample = y.sample(tree, 24);
    if ysample.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    for &r in scales {
        if r < 2.0 * space.resolution {
            return Err(Error::InvalidSpec(format!(
                "porosity scale {r} below resolution floor"
            )));
        }
    }
    let mut overall = f64::INFINITY;
    for &yc in &ysample {
        for &r in scales {
            // candidate centers: nodes within r of y (by exact metric,
            // scanned over all nodes lying within the ball's circles —
            // a full scan is fine at diagnostic sizes)
            let mut candidates: Vec<(f64, f64)> = Vec::new(); // (d(x,y), d(x,Y))
            for node in &space.nodes {
                let dxy = tree.distance(node.point, yc);
                if dxy <= r {
                    candidates.push((dxy, y.distance_to(tree, node.point)));
                }
            }
            // bisection on c: feasible iff some x has d(x,y) <= (1-c)r and
            // d(x,Y) >= c·r
            let feasible = |c: f64| {
                candidates
                    .iter()
                    .any(|&(dxy, dxx)| dxy <= (1.0 - c) * r && dxx >= c * r)
            };
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..10 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            overall = overall.min(lo);
        }
    }
    Ok(overall)
}

/// Structural self-similarity: the subtree hanging off any level-1 copy
/// matches the one-level-shallower build, circle for circle.
pub fn self_similarity_check(tree: &CircleTree) -> Result<bool> {
    if tree.level == 0 {
        return Ok(true);
    }
    let shallower = CircleTree::build(&tree.spec, tree.level - 1)?;
    let a = f64::from(tree.spec.scale_base);
    for &c in &tree.circles[0].children {
        if tree.circles[c].level != 1 {
            continue;
        }
        // per-relative-depth circle counts and scales must match
        let sub = collect_subtree(tree, c);
        if sub.len() != shallower.circles.len() {
            return Ok(false);
        }
        let mut counts_sub: HashMap<u32, usize> = HashMap::new();
        for &i in &sub {
            *counts_sub
                .entry(tree.circles[i].level - tree.circles[c].level)
                .or_default() += 1;
            let rel_scale = tree.circles[i].scale / tree.circles[c].scale;
            let lvl = tree.circles[i].level - tree.circles[c].level;
            if (rel_scale - a.powi(-(lvl as i32))).abs() > 1e-12 {
                return Ok(false);
            }
        }
        let mut counts_ref: HashMap<u32, usize> = HashMap::new();
        for cc in &shallower.circles {
            *counts_ref.entry(cc.level).or_default() += 1;
        }
        if counts_sub != counts_ref {
            return Ok(false);
        }
    }
    Ok(true)
}

fn collect_subtree(tree: &CircleTree, v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(c) = stack.pop() {
        out.push(c);
        stack.extend(tree.circles[c].children.iter().copied());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_space(level: u32) -> ModelSpace {
        let spec = CircleTreeSpec::toy(4);
        let res = 3.0f64.powi(-(level as i32)) / 4.0;
        build_space(&spec, level, res).unwrap()
    }

    #[test]
    fn level_0_is_a_cycle() {
        let spec = CircleTreeSpec::toy(4);
        let s = build_space(&spec, 0, 0.05).unwrap();
        assert_eq!(s.circle_nodes.len(), 1);
        // every node has exactly two neighbors
        assert!(s.adj.iter().all(|n| n.len() == 2));
        // graph distance x- to x+ equals 1 (diameter)
        let sweep = s.dijkstra(&[(s.x_minus, 0.0)], f64::INFINITY);
        let d = sweep
            .iter()
            .find(|&&(n, _)| n == s.x_plus)
            .map(|&(_, d)| d)
            .unwrap();
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn resolution_guard() {
        let spec = CircleTreeSpec::toy(4);
        assert!(matches!(
            build_space(&spec, 2, 0.2),
            Err(Error::ResolutionTooCoarse { .. })
        ));
    }

    #[test]
    fn gluing_pairs_are_shared_nodes() {
        let s = toy_space(1);
        // 12 gluing pairs: each identifies 2 circle positions into 1 node
        let mut glue_nodes = 0;
        for n in &s.nodes {
            if !n.aliases.is_empty() {
                glue_nodes += 1;
            }
        }
        assert_eq!(glue_nodes, 24);
        // graph connected: a full sweep reaches everything
        let sweep = s.dijkstra(&[(s.x_minus, 0.0)], f64::INFINITY);
        assert_eq!(sweep.len(), s.nodes.len());
    }

    #[test]
    fn graph_distance_matches_analytic_distance() {
        let s = toy_space(2);
        let sweep = s.dijkstra(&[(s.x_minus, 0.0)], f64::INFINITY);
        for &(n, d) in sweep.iter().step_by(97) {
            let exact = s.tree.distance(s.nodes[s.x_minus].point, s.nodes[n].point);
            assert!(
                (d - exact).abs() < 1e-9,
                "node {n}: graph {d} vs exact {exact}"
            );
        }
    }

    #[test]
    fn point_count_bound() {
        let s = toy_space(2);
        let bound = s.tree.total_length() / s.resolution + 2.0 * (s.tree.circles.len() as f64);
        assert!((s.nodes.len() as f64) <= bound + 4.0);
    }

    #[test]
    fn relative_distance_basics() {
        let tree = CircleTree::build(&CircleTreeSpec::toy(4), 0).unwrap();
        let u = vec![Point { circle: 0, pos: 0.0 }, Point { circle: 0, pos: 0.1 }];
        assert_eq!(relative_distance(&tree, &u, &u).unwrap(), 0.0);
        // antipodal singleton pairs of diameter 0.1, gap 0.4
        let v = vec![
            Point { circle: 0, pos: 0.5 },
            Point { circle: 0, pos: 0.6 },
        ];
        let rd = relative_distance(&tree, &u, &v).unwrap();
        assert!((rd - 4.0).abs() < 1e-12, "{rd}");
        // singletons at positive distance
        let s1 = vec![Point { circle: 0, pos: 0.0 }];
        let s2 = vec![Point { circle: 0, pos: 1.0 }];
        assert_eq!(relative_distance(&tree, &s1, &s2).unwrap(), f64::INFINITY);
        assert!(relative_distance(&tree, &[], &s2).is_err());
    }

    #[test]
    fn metric_estimates_toy_level_2() {
        let s = toy_space(2);
        let est = metric_estimates_report(&s).unwrap();
        assert!(est.min_pair_relative_distance > 0.0);
        assert!(est.min_pair_relative_distance.is_finite());
        assert!(est.nesting_ok);
        assert!(est.max_outward_over_pair >= 1.0);
        assert!(est.max_outward_over_pair.is_finite());
        assert!(est.diameter_ratio_deviation < 0.1);
        assert!(est.uniform_perfectness >= 1.0 && est.uniform_perfectness <= 4.0);
    }

    #[test]
    fn degenerate_space_rejected() {
        let spec = CircleTreeSpec::toy(4);
        let s = build_space(&spec, 0, 0.05).unwrap();
        assert!(matches!(
            metric_estimates_report(&s),
            Err(Error::DegenerateSpace(_))
        ));
    }

    #[test]
    fn porosity_single_point_on_circle() {
        let spec = CircleTreeSpec::toy(4);
        let s = build_space(&spec, 0, 0.01).unwrap();
        let y = Region::Points(vec![Point { circle: 0, pos: 0.0 }]);
        let c = porosity_estimate(&s, &y, &[0.5, 0.25]).unwrap();
        // a point at distance 2r/3 from y has B(x, r/3) inside B(y,r)\{y}
        assert!(c >= 1.0 / 3.0 - 0.05, "porosity {c}");
    }

    #[test]
    fn porosity_of_whole_space_is_zero() {
        let spec = CircleTreeSpec::toy(4);
        let s = build_space(&spec, 0, 0.01).unwrap();
        let all: Vec<Point> = s.nodes.iter().map(|n| n.point).collect();
        let c = porosity_estimate(&s, &Region::Points(all), &[0.5]).unwrap();
        assert!(c < 0.05, "porosity of the full space {c}");
    }

    #[test]
    fn porosity_of_copy_limit_set_is_positive() {
        let s = toy_space(2);
        let v = s.tree.circles[0].children[0];
        let scales = [1.0 / 3.0, 1.0 / 9.0];
        let c = porosity_estimate(&s, &Region::LimitSet(v), &scales).unwrap();
        assert!(c > 0.0, "copy limit set should be porous, got {c}");
    }

    #[test]
    fn self_similarity_structural() {
        let tree = CircleTree::build(&CircleTreeSpec::toy(4), 3).unwrap();
        assert!(self_similarity_check(&tree).unwrap());
    }
}
