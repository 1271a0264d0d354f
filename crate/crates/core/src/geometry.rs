//! Exact length-metric geometry of iterated circle gluings.
//!
//! A circle tree is a finite tree of circles: a root circle of diameter 1
//! (circumference 2) with rescaled copies glued on at pairs of points, each
//! copy meeting its parent in exactly one antipodal pair.  Because every
//! glued pair is antipodal on the copy, the detour through a copy between
//! its two gluing points is never shorter than the parent arc, so
//!
//! * the distance between two points on one circle is the arc distance, and
//! * the global distance factors through the circle tree: a point lifts to
//!   at most two (position, cost) states on each ancestor circle, and two
//!   points meet on their lowest common ancestor circle.
//!
//! This gives exact global distances in O(tree depth) without any graph
//! search, which the discretized layer ([`crate::space`]) uses as ground
//! truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction parameters for a circle tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleTreeSpec {
    /// Scale base `a`: copies at level offset j are scaled by a^{-j}.
    pub scale_base: u32,
    /// `copies_schedule[j-1]` copies at relative scale a^{-j} are glued to
    /// every circle (self-similar rule), for j = 1..=schedule length.
    pub copies_schedule: Vec<u32>,
    /// Maximum level the spec is intended for.
    pub max_level: u32,
}

impl CircleTreeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.scale_base < 2 {
            return Err(Error::InvalidSpec(format!(
                "scale base {} < 2",
                self.scale_base
            )));
        }
        Ok(())
    }

    /// The toy configuration: base 3, with 12 copies at relative scale 1/3
    /// and 36 copies at relative scale 1/9 glued to every circle.  The
    /// second schedule entry keeps gluing points dense at the smaller scale,
    /// which the porosity of limit sets depends on.
    pub fn toy(max_level: u32) -> Self {
        CircleTreeSpec {
            scale_base: 3,
            copies_schedule: vec![12, 36],
            max_level,
        }
    }
}

/// Where a circle is glued to its parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    /// Arc positions of the gluing pair on the parent circle.
    pub parent_pos: (f64, f64),
    /// Arc positions of the same pair on this circle (antipodal).
    pub child_pos: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub parent: Option<usize>,
    /// Depth in the circle tree (root = 0).  With a single-entry schedule
    /// this equals the gluing level; with longer schedules the level of a
    /// circle is the sum of the per-step scale offsets, tracked separately.
    pub depth: u32,
    /// Scale-offset level: log_a of 1/scale.  Root = 0.
    pub level: u32,
    /// Metric diameter of the circle alone (= scale factor; root = 1).
    pub scale: f64,
    /// Circumference (= 2 * scale).
    pub circumference: f64,
    pub attachment: Option<Attachment>,
    pub children: Vec<usize>,
}

/// A point given by its circle and arc coordinate in [0, circumference).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub circle: usize,
    pub pos: f64,
}

/// A finite circle tree built from a spec, in breadth-first circle order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleTree {
    pub spec: CircleTreeSpec,
    /// Levels actually built.
    pub level: u32,
    pub circles: Vec<Circle>,
}

fn wrap(pos: f64, circumference: f64) -> f64 {
    let r = pos % circumference;
    if r < 0.0 {
        r + circumference
    } else {
        r
    }
}

impl CircleTree {
    /// Build the tree out to `level` scale-offset levels.
    pub fn build(spec: &CircleTreeSpec, level: u32) -> Result<Self> {
        spec.validate()?;
        let mut circles = vec![Circle {
            parent: None,
            depth: 0,
            level: 0,
            scale: 1.0,
            circumference: 2.0,
            attachment: None,
            children: Vec::new(),
        }];
        let a = f64::from(spec.scale_base);
        let nsteps = spec.copies_schedule.len() as u32;
        let mut frontier = vec![0usize];
        while let Some(c) = frontier.pop() {
            let (c_level, c_depth, c_scale, c_circ) = {
                let cc = &circles[c];
                (cc.level, cc.depth, cc.scale, cc.circumference)
            };
            for j in 1..=nsteps {
                if c_level + j > level {
                    continue;
                }
                let count = spec.copies_schedule[(j - 1) as usize];
                let scale = c_scale * a.powi(-(j as i32));
                // Gluing centers are near-equispaced with a per-step phase
                // (keeps gluing points off the distinguished positions 0 and
                // scale) and a small per-index jitter: with exactly equal
                // spacing the pair half-width can be a multiple of the
                // spacing, making gluing points of distinct copies coincide.
                let phase = f64::from(j) / f64::from(nsteps + 1);
                for i in 0..count {
                    let jitter =
                        c_circ * f64::from(i) / (16.0 * f64::from(count) * f64::from(count));
                    let center = c_circ * (f64::from(i) + phase) / f64::from(count) + jitter;
                    let p0 = wrap(center - scale / 2.0, c_circ);
                    let p1 = wrap(center + scale / 2.0, c_circ);
                    let child = Circle {
                        parent: Some(c),
                        depth: c_depth + 1,
                        level: c_level + j,
                        scale,
                        circumference: 2.0 * scale,
                        // On the copy the pair sits at 0 and the antipode,
                        // which is at arc distance scale (= its diameter).
                        attachment: Some(Attachment {
                            parent_pos: (p0, p1),
                            child_pos: (0.0, scale),
                        }),
                        children: Vec::new(),
                    };
                    circles.push(child);
                    let id = circles.len() - 1;
                    circles[c].children.push(id);
                    frontier.push(id);
                }
            }
        }
        // breadth-first order: sort frontier processing gave DFS; rebuild in
        // BFS index order for stable downstream enumeration
        let tree = CircleTree {
            spec: spec.clone(),
            level,
            circles,
        };
        Ok(tree.reindex_bfs())
    }

    /// Reorder circles breadth-first (children in creation order) so circle
    /// indices are stable and level-sorted.
    fn reindex_bfs(self) -> Self {
        let n = self.circles.len();
        let mut order = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &k in &self.circles[c].children {
                queue.push_back(k);
            }
        }
        let mut new_index = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut circles: Vec<Circle> = order
            .iter()
            .map(|&old| self.circles[old].clone())
            .collect();
        for c in &mut circles {
            c.parent = c.parent.map(|p| new_index[p]);
            for k in &mut c.children {
                *k = new_index[*k];
            }
        }
        CircleTree {
            spec: self.spec,
            level: self.level,
            circles,
        }
    }

    /// The distinguished antipodal pair on the root circle.
    pub fn x_minus(&self) -> Point {
        Point {
            circle: 0,
            pos: 0.0,
        }
    }

    pub fn x_plus(&self) -> Point {
        Point {
            circle: 0,
            pos: 1.0,
        }
    }

    pub fn total_length(&self) -> f64 {
        self.circles.iter().map(|c| c.circumference).sum()
    }

    /// Arc distance between two positions on one circle (exact global
    /// distance for same-circle points: detours through copies are never
    /// shorter because glued pairs are antipodal on the copy).
    pub fn arc(&self, circle: usize, p: f64, q: f64) -> f64 {
        let circ = self.circles[circle].circumference;
        let d = (p - q).abs();
        d.min(circ - d)
    }

    /// Root-to-circle ancestor chain (root first, `circle` last).
    pub fn ancestors(&self, circle: usize) -> Vec<usize> {
        let mut chain = vec![circle];
        let mut c = circle;
        while let Some(p) = self.circles[c].parent {
            chain.push(p);
            c = p;
        }
        chain.reverse();
        chain
    }

    /// Lowest common ancestor of two circles.
    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.circles[a].depth > self.circles[b].depth {
            a = self.circles[a].parent.unwrap();
        }
        while self.circles[b].depth > self.circles[a].depth {
            b = self.circles[b].parent.unwrap();
        }
        while a != b {
            a = self.circles[a].parent.unwrap();
            b = self.circles[b].parent.unwrap();
        }
        a
    }

    /// Is `anc` an ancestor of (or equal to) `c`?
    pub fn is_ancestor(&self, anc: usize, c: usize) -> bool {
        self.lca(anc, c) == anc
    }

    /// Lift a point to (position, path cost) states on an ancestor circle.
    /// At most two states survive (one per gluing point crossed last).
    pub fn lift_states(&self, p: Point, target: usize) -> [(f64, f64); 2] {
        let mut circle = p.circle;
        let mut states = [(p.pos, 0.0), (p.pos, 0.0)];
        while circle != target {
            let cc = &self.circles[circle];
            let at = cc
                .attachment
                .as_ref()
                .expect("lift target must be an ancestor");
            let (g0, g1) = at.child_pos;
            let cost = |g: f64| {
                states
                    .iter()
                    .map(|&(pos, d)| d + self.arc(circle, pos, g))
                    .fold(f64::INFINITY, f64::min)
            };
            states = [(at.parent_pos.0, cost(g0)), (at.parent_pos.1, cost(g1))];
            circle = cc.parent.expect("non-root circle has a parent");
        }
        states
    }

    /// Exact global length-metric distance between two points.
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        let l = self.lca(p.circle, q.circle);
        let sp = self.lift_states(p, l);
        let sq = self.lift_states(q, l);
        let mut best = f64::INFINITY;
        for &(pp, dp) in &sp {
            for &(qq, dq) in &sq {
                best = best.min(dp + self.arc(l, pp, qq) + dq);
            }
        }
        best
    }

    /// Distance from a point to the subtree of circle `v` (all points on
    /// circles at or below `v`).  Zero inside; outside, the path must enter
    /// through `v`'s gluing pair, which itself belongs to the subtree.
    pub fn distance_to_subtree(&self, p: Point, v: usize) -> f64 {
        if self.is_ancestor(v, p.circle) {
            return 0.0;
        }
        match &self.circles[v].attachment {
            None => 0.0, // v is the root: the subtree is everything
            Some(at) => {
                let e0 = Point {
                    circle: v,
                    pos: at.child_pos.0,
                };
                let e1 = Point {
                    circle: v,
                    pos: at.child_pos.1,
                };
                self.distance(p, e0).min(self.distance(p, e1))
            }
        }
    }

    /// Distance from a point to the closed complement of `v`'s open subtree
    /// (everything outside, plus the gluing pair itself).
    pub fn distance_to_complement(&self, p: Point, v: usize) -> f64 {
        if !self.is_ancestor(v, p.circle) {
            return 0.0;
        }
        match &self.circles[v].attachment {
            None => f64::INFINITY, // root: the complement is empty
            Some(at) => {
                let e0 = Point {
                    circle: v,
                    pos: at.child_pos.0,
                };
                let e1 = Point {
                    circle: v,
                    pos: at.child_pos.1,
                };
                self.distance(p, e0).min(self.distance(p, e1))
            }
        }
    }

    /// Distance from a point to the circle of `v` (the limit set Λ_v of a
    /// single vertex, not including descendants).  A path from outside
    /// `v`'s subtree enters it through `v`'s gluing pair, which lies on the
    /// circle, so the distance is the lift cost (from below) or the pair
    /// distance (from outside).
    pub fn distance_to_circle(&self, p: Point, v: usize) -> f64 {
        if p.circle == v {
            return 0.0;
        }
        if self.is_ancestor(v, p.circle) {
            let states = self.lift_states(p, v);
            states[0].1.min(states[1].1)
        } else {
            self.distance_to_pair_or_zero(p, v)
        }
    }

    fn distance_to_pair_or_zero(&self, p: Point, v: usize) -> f64 {
        match &self.circles[v].attachment {
            None => 0.0, // root with p outside its subtree cannot happen
            Some(at) => {
                let e0 = Point {
                    circle: v,
                    pos: at.child_pos.0,
                };
                let e1 = Point {
                    circle: v,
                    pos: at.child_pos.1,
                };
                self.distance(p, e0).min(self.distance(p, e1))
            }
        }
    }

    /// The point of circle `v` nearest to `p`.
    pub fn nearest_circle_point(&self, p: Point, v: usize) -> Point {
        if p.circle == v {
            return p;
        }
        if self.is_ancestor(v, p.circle) {
            let states = self.lift_states(p, v);
            let (pos, _) = if states[0].1 <= states[1].1 {
                states[0]
            } else {
                states[1]
            };
            Point { circle: v, pos }
        } else {
            match &self.circles[v].attachment {
                None => p,
                Some(at) => {
                    let e0 = Point {
                        circle: v,
                        pos: at.child_pos.0,
                    };
                    let e1 = Point {
                        circle: v,
                        pos: at.child_pos.1,
                    };
                    if self.distance(p, e0) <= self.distance(p, e1) {
                        e0
                    } else {
                        e1
                    }
                }
            }
        }
    }

    /// Measured ambient diameter of circle `v` alone from equispaced
    /// samples (should equal the scale: detours never beat arcs).
    pub fn circle_diameter_sampled(&self, v: usize, per_circle: usize) -> f64 {
        let circ = self.circles[v].circumference;
        let pts: Vec<Point> = (0..per_circle)
            .map(|i| Point {
                circle: v,
                pos: circ * (i as f64) / (per_circle as f64),
            })
            .collect();
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.max(self.distance(pts[i], pts[j]));
            }
        }
        best
    }

    /// Distance from a point to `v`'s gluing pair with its parent.
    pub fn distance_to_pair(&self, p: Point, v: usize) -> f64 {
        match &self.circles[v].attachment {
            None => f64::INFINITY,
            Some(at) => {
                let e0 = Point {
                    circle: v,
                    pos: at.child_pos.0,
                };
                let e1 = Point {
                    circle: v,
                    pos: at.child_pos.1,
                };
                self.distance(p, e0).min(self.distance(p, e1))
            }
        }
    }

    /// The point of `v`'s subtree nearest to `p`: `p` itself inside, else
    /// the nearer gluing point of `v`.
    pub fn nearest_subtree_point(&self, p: Point, v: usize) -> Point {
        if self.is_ancestor(v, p.circle) {
            return p;
        }
        match &self.circles[v].attachment {
            None => p,
            Some(at) => {
                let e0 = Point {
                    circle: v,
                    pos: at.child_pos.0,
                };
                let e1 = Point {
                    circle: v,
                    pos: at.child_pos.1,
                };
                if self.distance(p, e0) <= self.distance(p, e1) {
                    e0
                } else {
                    e1
                }
            }
        }
    }

    /// Deterministic sample of points in `v`'s subtree: equispaced points on
    /// every circle at most `depth_below` levels under `v`, plus all gluing
    /// points in that window.
    pub fn sample_subtree(&self, v: usize, depth_below: u32, per_circle: usize) -> Vec<Point> {
        let vd = self.circles[v].depth;
        let mut pts = Vec::new();
        let mut stack = vec![v];
        while let Some(c) = stack.pop() {
            let cc = &self.circles[c];
            if cc.depth > vd + depth_below {
                continue;
            }
            for i in 0..per_circle {
                pts.push(Point {
                    circle: c,
                    pos: cc.circumference * (i as f64) / (per_circle as f64),
                });
            }
            if let Some(at) = &cc.attachment {
                pts.push(Point {
                    circle: c,
                    pos: at.child_pos.0,
                });
                pts.push(Point {
                    circle: c,
                    pos: at.child_pos.1,
                });
            }
            stack.extend(cc.children.iter().copied());
        }
        pts
    }

    /// Measured diameter of `v`'s subtree from the deterministic sample.
    /// Contributions from circles deeper than `depth_below` levels under `v`
    /// are geometrically small (≤ scale(v)·a^{-depth_below}/2 per endpoint).
    pub fn subtree_diameter_sampled(&self, v: usize, depth_below: u32, per_circle: usize) -> f64 {
        let pts = self.sample_subtree(v, depth_below, per_circle);
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.max(self.distance(pts[i], pts[j]));
            }
        }
        best
    }

    /// Measured subtree diameters for every circle.  Circles at equal
    /// scale-offset level have isometric subtrees up to scale (the schedule
    /// is self-similar and the remaining level budget is `level - c.level`),
    /// so one representative per level is measured and the rest rescaled.
    pub fn subtree_diameters(&self) -> Vec<f64> {
        let mut rep: Vec<Option<(f64, f64)>> = vec![None; (self.level + 1) as usize];
        for (i, c) in self.circles.iter().enumerate() {
            let slot = c.level as usize;
            if rep[slot].is_none() {
                let d = self.subtree_diameter_sampled(i, 2, 8);
                rep[slot] = Some((c.scale, d));
            }
        }
        self.circles
            .iter()
            .map(|c| {
                let (rs, rd) = rep[c.level as usize].expect("representative measured");
                rd * c.scale / rs
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn level_0_is_a_bare_circle() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 0).unwrap();
        assert_eq!(t.circles.len(), 1);
        assert!(close(t.total_length(), 2.0, 1e-12));
        assert!(close(t.distance(t.x_minus(), t.x_plus()), 1.0, 1e-12));
    }

    #[test]
    fn level_1_toy_counts_and_length() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 1).unwrap();
        assert_eq!(t.circles.len(), 13);
        // 2 + 12 * (2/3) = 10
        assert!(close(t.total_length(), 10.0, 1e-9));
        for c in &t.circles[1..] {
            assert!(close(c.scale, 1.0 / 3.0, 1e-12));
            let at = c.attachment.as_ref().unwrap();
            // pair separation on the parent equals the copy's diameter
            assert!(close(t.arc(0, at.parent_pos.0, at.parent_pos.1), c.scale, 1e-12));
            // and is antipodal on the copy
            let child_arc = t.arc(1, at.child_pos.0, at.child_pos.1);
            assert!(close(child_arc, c.scale, 1e-12));
        }
    }

    #[test]
    fn empty_schedule_matches_level_0() {
        let spec = CircleTreeSpec {
            scale_base: 3,
            copies_schedule: vec![0],
            max_level: 1,
        };
        let t = CircleTree::build(&spec, 1).unwrap();
        assert_eq!(t.circles.len(), 1);
    }

    #[test]
    fn glue_points_avoid_distinguished_points() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        for c in &t.circles[1..] {
            if c.parent != Some(0) {
                continue;
            }
            let at = c.attachment.as_ref().unwrap();
            for g in [at.parent_pos.0, at.parent_pos.1] {
                assert!(t.arc(0, g, 0.0) > 1e-6, "gluing point at x-");
                assert!(t.arc(0, g, 1.0) > 1e-6, "gluing point at x+");
            }
        }
    }

    #[test]
    fn identified_pair_has_distance_zero_across_circles() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        let c = 1usize;
        let at = t.circles[c].attachment.clone().unwrap();
        let on_child = Point {
            circle: c,
            pos: at.child_pos.0,
        };
        let on_parent = Point {
            circle: 0,
            pos: at.parent_pos.0,
        };
        assert!(close(t.distance(on_child, on_parent), 0.0, 1e-12));
    }

    #[test]
    fn distance_axioms_on_sampled_points() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        let pts = t.sample_subtree(0, 2, 3);
        let step = pts.len() / 12;
        let sel: Vec<Point> = pts.iter().step_by(step.max(1)).copied().collect();
        for &p in &sel {
            assert!(close(t.distance(p, p), 0.0, 1e-12));
            for &q in &sel {
                let d1 = t.distance(p, q);
                let d2 = t.distance(q, p);
                assert!(close(d1, d2, 1e-12), "symmetry");
                for &r in &sel {
                    assert!(
                        t.distance(p, r) <= d1 + t.distance(q, r) + 1e-9,
                        "triangle inequality"
                    );
                }
            }
        }
    }

    #[test]
    fn subtree_is_rescaled_copy() {
        // distances inside a level-1 copy of the level-2 tree match the
        // level-1 tree scaled by 1/3
        let t2 = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        let t1 = CircleTree::build(&CircleTreeSpec::toy(4), 1).unwrap();
        let copy = 1usize; // a level-1 circle of t2 (BFS order)
        assert_eq!(t2.circles[copy].depth, 1);
        let kids2: &[usize] = &t2.circles[copy].children;
        let kids1: &[usize] = &t1.circles[0].children;
        assert_eq!(kids2.len(), kids1.len());
        // matching sample: position u on circle k-th child
        for (&k2, &k1) in kids2.iter().zip(kids1).take(4) {
            for u in [0.1, 0.4] {
                let p2 = Point {
                    circle: k2,
                    pos: u * t2.circles[k2].circumference,
                };
                let p1 = Point {
                    circle: k1,
                    pos: u * t1.circles[k1].circumference,
                };
                let q2 = Point {
                    circle: copy,
                    pos: 0.25 * t2.circles[copy].circumference,
                };
                let q1 = Point {
                    circle: 0,
                    pos: 0.25 * t1.circles[0].circumference,
                };
                let d2 = t2.distance(p2, q2);
                let d1 = t1.distance(p1, q1);
                assert!(close(d2, d1 / 3.0, 1e-12), "{d2} vs {d1}/3");
            }
        }
    }

    #[test]
    fn subtree_distance_and_complement_are_consistent() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        let v = 1usize;
        let inside = Point {
            circle: v,
            pos: 0.3,
        };
        let outside = t.x_plus();
        assert_eq!(t.distance_to_subtree(inside, v), 0.0);
        assert!(t.distance_to_subtree(outside, v) > 0.0);
        assert_eq!(t.distance_to_complement(outside, v), 0.0);
        assert!(t.distance_to_complement(inside, v) >= 0.0);
        // nearest subtree point of an outside point is a gluing point
        let near = t.nearest_subtree_point(outside, v);
        assert_eq!(near.circle, v);
        assert!(close(
            t.distance(outside, near),
            t.distance_to_subtree(outside, v),
            1e-12
        ));
    }

    #[test]
    fn subtree_diameters_scale_with_depth() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 3).unwrap();
        let diams = t.subtree_diameters();
        // root diameter at least the bare-circle diameter
        assert!(diams[0] >= 1.0);
        for (i, c) in t.circles.iter().enumerate() {
            if c.level == 1 {
                let ratio = diams[i] / diams[0];
                // a^{-1} up to truncation of the deeper copy
                assert!(
                    (ratio - 1.0 / 3.0).abs() < 0.05,
                    "level-1 diameter ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn bfs_reindex_orders_by_depth() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 3).unwrap();
        for w in t.circles.windows(2) {
            assert!(w[0].depth <= w[1].depth);
        }
        for (i, c) in t.circles.iter().enumerate() {
            if let Some(p) = c.parent {
                assert!(p < i);
            }
        }
    }

    #[test]
    fn toy_level_4_size() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 4).unwrap();
        // per-level circle counts M_l = 12 M_{l-1} + 36 M_{l-2}:
        // 1, 12, 180, 2592, 37584
        assert_eq!(t.circles.len(), 1 + 12 + 180 + 2592 + 37584);
        // total length 2 * sum M_l 3^{-l} = 2 * (1 + 4 + 20 + 96 + 464)
        assert!(close(t.total_length(), 1170.0, 1e-6));
    }

    #[test]
    fn gluing_pairs_are_pairwise_disjoint() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        // collect all gluing positions per parent circle; none may coincide
        let mut per_parent: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
        for c in &t.circles[1..] {
            if let Some(at) = &c.attachment {
                let p = c.parent.unwrap();
                per_parent.entry(p).or_default().push(at.parent_pos.0);
                per_parent.entry(p).or_default().push(at.parent_pos.1);
            }
        }
        for (p, mut ps) in per_parent {
            ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in ps.windows(2) {
                assert!(
                    w[1] - w[0] > 1e-9 * t.circles[p].circumference,
                    "coincident gluing points on circle {p}"
                );
            }
        }
    }

    #[test]
    fn circle_distance_helpers() {
        let t = CircleTree::build(&CircleTreeSpec::toy(4), 2).unwrap();
        let v = 1usize; // level-1 copy
        let inside = Point { circle: v, pos: 0.3 };
        assert_eq!(t.distance_to_circle(inside, v), 0.0);
        // from the root: distance to the circle equals lift-state minimum
        let far = t.x_plus();
        let d = t.distance_to_circle(far, v);
        assert!(d > 0.0);
        let near = t.nearest_circle_point(far, v);
        assert_eq!(near.circle, v);
        assert!(close(t.distance(far, near), d, 1e-12));
        // from inside a child of v: nearest circle-v point is the lift
        let k = t.circles[v].children[0];
        let deep = Point { circle: k, pos: 0.2 * t.circles[k].circumference };
        let d2 = t.distance_to_circle(deep, v);
        let near2 = t.nearest_circle_point(deep, v);
        assert!(close(t.distance(deep, near2), d2, 1e-12));
        // circle diameter equals the scale (detours never beat arcs)
        let cd = t.circle_diameter_sampled(v, 16);
        assert!(close(cd, t.circles[v].scale, 1e-9), "{cd}");
    }
}
