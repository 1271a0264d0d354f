//! The explicit product weight on cover sets, its verification
//! (max-norm decay, admissibility, volume boundedness), parameter
//! calibration, and the simplified one-circle recursion.
//!
//! The weight of a cover set A at scale n is
//!   ρ_n(A) = E1 · a^{−n} · Π_v ρ_v^n(A),
//! where only the circles v on the tree path from the root to the
//! projection π(A) contribute factors ≠ 1.  Each factor either passes
//! through (near the complement side, or at too-small arithmetic scale)
//! or stretches by E3·D_v·(diam h_v W / diam W)/f_v(W), where f_v turns
//! geometric distance scales from the parent gluing pair into arithmetic
//! ones.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cover::{Cover, CurveFamily, resolve_family};
use crate::error::{Error, Result};
use crate::geometry::{CircleTree, Point};
use crate::modulus::{admissibility_check, Admissibility, WeightFunction, vol_p};
use crate::space::ModelSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    /// Scale base of the cover hierarchy.
    pub a: u32,
    /// Diameter threshold of the target curve family.
    pub delta: f64,
    /// Truncation threshold; curves are pinned to limit sets above it.
    pub delta_prime: f64,
    /// Global normalization.
    pub e1: f64,
    /// Complement-proximity guard radius, in units of a^{-n}.
    pub e2: f64,
    /// Stretch-factor gain.
    pub e3: f64,
    /// Volume exponent.
    pub p: f64,
    /// Regularity exponent of the vertex model spaces (circles: 1).
    pub q_v: f64,
    /// Bi-Hölder exponent of the vertex model maps (identity rescale: 1).
    pub tau: f64,
    /// Bi-Hölder multiplicative constant (identity rescale: 1).
    pub lambda: f64,
}

impl WeightParams {
    pub fn validate(&self) -> Result<()> {
        if self.a < 2 {
            return Err(Error::BadWeightParams(format!("base a = {} < 2", self.a)));
        }
        if !(self.p > self.q_v.max(1.0)) {
            return Err(Error::BadWeightParams(format!(
                "p = {} must exceed max(q_v, 1) = {}",
                self.p,
                self.q_v.max(1.0)
            )));
        }
        if !(self.delta_prime > 0.0 && self.delta_prime <= self.delta) {
            return Err(Error::BadWeightParams(format!(
                "delta' = {} not in (0, delta = {}]",
                self.delta_prime, self.delta
            )));
        }
        for (name, v) in [("E1", self.e1), ("E2", self.e2), ("E3", self.e3)] {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::BadWeightParams(format!("{name} = {v} < 1")));
            }
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) || !(self.lambda >= 1.0) {
            return Err(Error::BadWeightParams(format!(
                "bi-Hoelder constants tau = {}, lambda = {} out of range",
                self.tau, self.lambda
            )));
        }
        Ok(())
    }

    /// Defaults for the base-3 circle-tree model.
    pub fn toy(p: f64) -> Self {
        WeightParams {
            a: 3,
            delta: 1.4,
            delta_prime: 0.35,
            e1: 1.0,
            e2: 3.0,
            e3: 1.0,
            p,
            q_v: 1.0,
            tau: 1.0,
            lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexContext {
    /// Diameter of the vertex circle.
    pub d_v: f64,
    /// Arithmetic scale count: images of scale-n sets live in balls of
    /// radius below a^{-m_v}/2.
    pub m_v: i64,
    /// Membership in the truncation tree of large circles.
    pub in_truncation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextTable {
    pub n: i32,
    pub vertices: Vec<VertexContext>,
}

/// Per-vertex data for scale n: m_v and truncation membership.
pub fn compute_context(tree: &CircleTree, params: &WeightParams, n: i32) -> Result<ContextTable> {
    let a = f64::from(params.a);
    let vertices = tree
        .circles
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m_v = (params.tau * (f64::from(n) + c.scale.log(a))
                - (2.0 * params.lambda).log(a))
            .floor()
            .max(0.0) as i64;
            VertexContext {
                d_v: c.scale,
                m_v,
                // circles shrink strictly down the tree, so the convex hull
                // of the root plus all large circles is exactly that set
                in_truncation: i == 0 || c.scale > params.delta_prime,
            }
        })
        .collect();
    Ok(ContextTable { n, vertices })
}

/// Geometric-to-arithmetic scale transform, on distances already rescaled
/// to the unit-diameter model circle.
pub fn f_value(m_v: i64, in_truncation: bool, a: f64, scaled_dist: f64) -> f64 {
    if in_truncation || scaled_dist <= a.powi(-(m_v as i32)) {
        1.0
    } else {
        m_v as f64 * scaled_dist
    }
}

/// Tree projection of a ball of radius `radius` centered at `center`: the
/// vertex closest to the root among all circles the ball meets.
///
/// Every met circle off the center's ancestor chain forces the branching
/// ancestor to be met as well, so the closest-to-root met vertex is the
/// highest met ancestor of the center's own circle.
pub fn tree_projection(tree: &CircleTree, center: Point, radius: f64) -> usize {
    let chain = tree.ancestors(center.circle);
    for &u in &chain {
        if tree.distance_to_circle(center, u) <= radius {
            return u;
        }
    }
    center.circle
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FactorBranch {
    /// d(A, complement side of v) ≤ E2·a^{-n}: pass through.
    NearComplement,
    /// m_v ≤ 1: arithmetic scale too coarse to stretch.
    SmallScale,
    /// Stretch by (diam h_v W / diam W) · E3·D_v / f_v(W).
    Stretch {
        f: f64,
        diam_w: f64,
        diam_hw: f64,
        /// W is the ball slot at the projection vertex (true) or the
        /// gluing pair toward the projection (false).
        ball: bool,
    },
}

impl FactorBranch {
    /// Single-letter code for tabular export.
    pub fn code(&self) -> &'static str {
        match self {
            FactorBranch::NearComplement => "U",
            FactorBranch::SmallScale => "M",
            FactorBranch::Stretch { ball: true, .. } => "B",
            FactorBranch::Stretch { ball: false, .. } => "E",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub vertex: usize,
    pub value: f64,
    pub branch: FactorBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetWeight {
    pub set: usize,
    pub projection: usize,
    pub value: f64,
    /// Factors along the root-to-projection path, in path order; all other
    /// vertices contribute 1 (their slot is empty).
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaperWeight {
    pub n: i32,
    pub params: WeightParams,
    pub weights: WeightFunction,
    pub sets: Vec<SetWeight>,
    pub context: ContextTable,
    /// Measured projection-quality constant: bounds a^{-n}/D_{π(A)} and
    /// d(center A, Λ_{π(A)})/a^{-n} over all sets.
    pub k7: f64,
}

/// Recompute ρ_n(A) from the stored factor list.
pub fn replay_value(pw: &PaperWeight, set: usize) -> f64 {
    let sw = &pw.sets[set];
    let a = f64::from(pw.params.a);
    let mut v = pw.params.e1 * a.powi(-pw.n);
    for f in &sw.factors {
        v *= f.value;
    }
    v
}

/// Arc distance between two point sets on the same circle.
fn arc_set_distance(tree: &CircleTree, circle: usize, xs: &[f64], ys: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for &x in xs {
        for &y in ys {
            best = best.min(tree.arc(circle, x, y));
        }
    }
    best
}

/// Build the product weight for one cover.
pub fn build_paper_weight(
    space: &ModelSpace,
    cover: &Cover,
    params: &WeightParams,
) -> Result<PaperWeight> {
    if params.a != space.tree.spec.scale_base {
        return Err(Error::CoverSpaceMismatch(format!(
            "params base {} vs space base {}",
            params.a, space.tree.spec.scale_base
        )));
    }
    let tree = &space.tree;
    let n = cover.n;
    let a = f64::from(params.a);
    let r = cover.radius;
    let ctx = compute_context(tree, params, n)?;
    let mut sets = Vec::with_capacity(cover.centers.len());
    let mut values = Vec::with_capacity(cover.centers.len());
    let mut k7: f64 = 1.0;
    for (si, &node) in cover.centers.iter().enumerate() {
        let center = space.nodes[node].point;
        let pi = tree_projection(tree, center, r);
        k7 = k7.max(r / tree.circles[pi].scale);
        k7 = k7.max(tree.distance_to_circle(center, pi) / r);
        let path = tree.ancestors(pi); // root first, π(A) last
        let mut factors = Vec::with_capacity(path.len());
        for (step, &v) in path.iter().enumerate() {
            let vc = &ctx.vertices[v];
            // complement-proximity guard (undefined at the root, where
            // there is no complement side)
            if v != 0 {
                let d_comp = (tree.distance_to_complement(center, v) - r).max(0.0);
                if d_comp <= params.e2 * r {
                    factors.push(Factor {
                        vertex: v,
                        value: 1.0,
                        branch: FactorBranch::NearComplement,
                    });
                    continue;
                }
            }
            if vc.m_v <= 1 {
                factors.push(Factor {
                    vertex: v,
                    value: 1.0,
                    branch: FactorBranch::SmallScale,
                });
                continue;
            }
            // slot contents: the gluing pair toward the projection for
            // interior path vertices, a radius-a^{-n} ball at the
            // projection vertex itself
            let (diam_w, scaled_dist, ball) = if step + 1 < path.len() {
                let child = path[step + 1];
                let at = tree.circles[child].attachment.as_ref().unwrap();
                let diam_w = tree.circles[child].scale;
                let d = if vc.in_truncation {
                    0.0 // f is 1 regardless; skip the pair lookup
                } else {
                    let ev = tree.circles[v].attachment.as_ref().unwrap();
                    arc_set_distance(
                        tree,
                        v,
                        &[at.parent_pos.0, at.parent_pos.1],
                        &[ev.child_pos.0, ev.child_pos.1],
                    ) / vc.d_v
                };
                (diam_w, d, false)
            } else {
                let q = tree.nearest_circle_point(center, v);
                let diam_w = (2.0 * r).min(vc.d_v);
                let d = if vc.in_truncation {
                    0.0
                } else {
                    let ev = tree.circles[v].attachment.as_ref().unwrap();
                    let d_pair =
                        arc_set_distance(tree, v, &[q.pos], &[ev.child_pos.0, ev.child_pos.1]);
                    (d_pair - r).max(0.0) / vc.d_v
                };
                (diam_w, d, true)
            };
            let diam_hw = diam_w / vc.d_v;
            let f = f_value(vc.m_v, vc.in_truncation, a, scaled_dist);
            let value = (diam_hw / diam_w) * params.e3 * vc.d_v / f;
            factors.push(Factor {
                vertex: v,
                value,
                branch: FactorBranch::Stretch {
                    f,
                    diam_w,
                    diam_hw,
                    ball,
                },
            });
        }
        let mut value = params.e1 * a.powi(-n);
        for f in &factors {
            value *= f.value;
        }
        sets.push(SetWeight {
            set: si,
            projection: pi,
            value,
            factors,
        });
        values.push(value);
    }
    Ok(PaperWeight {
        n,
        params: params.clone(),
        weights: WeightFunction::new(values)?,
        sets,
        context: ctx,
        k7,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxBoundRow {
    pub n: i32,
    pub sup: f64,
    pub n_sup: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxBoundReport {
    pub rows: Vec<MaxBoundRow>,
    /// max/min of the n·‖ρ_n‖∞ sequence.
    pub ratio: f64,
    /// The sequence stays within a factor 10 band (reported, not asserted).
    pub bounded: bool,
}

/// Tabulate ‖ρ_n‖∞ decay over a range of scales.
pub fn verify_max_bound(weights: &[&PaperWeight]) -> Result<MaxBoundReport> {
    if weights.len() < 3 {
        return Err(Error::TooFewScales(3));
    }
    let rows: Vec<MaxBoundRow> = weights
        .iter()
        .map(|w| {
            let sup = w.weights.sup_norm();
            MaxBoundRow {
                n: w.n,
                sup,
                n_sup: f64::from(w.n) * sup,
            }
        })
        .collect();
    let hi = rows.iter().map(|r| r.n_sup).fold(f64::NEG_INFINITY, f64::max);
    let lo = rows.iter().map(|r| r.n_sup).fold(f64::INFINITY, f64::min);
    let ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok(MaxBoundReport {
        rows,
        ratio,
        bounded: ratio <= 10.0,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub result: Admissibility,
    /// Factor provenance along the witness path when violated.
    pub witness_provenance: Vec<SetWeight>,
}

/// Check the weight against the endpoint-separated curve family.
pub fn verify_admissibility(
    space: &ModelSpace,
    cover: &Cover,
    pw: &PaperWeight,
    delta_prime: f64,
) -> Result<AdmissibilityReport> {
    let family = resolve_family(space, cover, &CurveFamily::EndpointSeparation { delta_prime })?;
    let result = admissibility_check(cover, &family, &pw.weights)?;
    let witness_provenance = match &result {
        Admissibility::Violated { witness, .. } => {
            witness.iter().map(|&s| pw.sets[s].clone()).collect()
        }
        Admissibility::Admissible { .. } => vec![],
    };
    Ok(AdmissibilityReport {
        result,
        witness_provenance,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeDiagnostics {
    pub vol_p: f64,
    /// Per-vertex partial volume V_n(v) over sets projecting into v's
    /// subtree, weighted by the factors from v downward.
    pub v_n: Vec<f64>,
    /// V_n(v₀) must equal Vol_p; relative discrepancy of the two sums.
    pub identity_rel_err: f64,
    /// sup of V_n(v)/D_v^p over non-truncation vertices at relative scale
    /// index t = n − level(v).
    pub v_hat: BTreeMap<i64, f64>,
}

pub fn volume_diagnostics(tree: &CircleTree, pw: &PaperWeight) -> Result<VolumeDiagnostics> {
    let p = pw.params.p;
    let a = f64::from(pw.params.a);
    let outer = (pw.params.e1 * a.powi(-pw.n)).powf(p);
    let mut v_n = vec![0.0f64; tree.circles.len()];
    for sw in &pw.sets {
        // suffix products of factor^p from the projection back to the root
        let mut prod = 1.0f64;
        for f in sw.factors.iter().rev() {
            prod *= f.value.powf(p);
            v_n[f.vertex] += outer * prod;
        }
        if sw.factors.is_empty() {
            v_n[0] += outer;
        }
    }
    let vol = vol_p(&pw.weights, p)?;
    let identity_rel_err = (vol - v_n[0]).abs() / vol.max(1e-300);
    let mut v_hat: BTreeMap<i64, f64> = BTreeMap::new();
    for (v, c) in tree.circles.iter().enumerate() {
        if pw.context.vertices[v].in_truncation {
            continue;
        }
        let t = (f64::from(pw.n) + c.scale.log(a)).floor() as i64;
        let val = v_n[v] / c.scale.powf(p);
        let e = v_hat.entry(t).or_insert(0.0);
        *e = e.max(val);
    }
    Ok(VolumeDiagnostics {
        vol_p: vol,
        v_n,
        identity_rel_err,
        v_hat,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub params: WeightParams,
    pub k7: f64,
    /// max over the training scales of Vol_p under the chosen params.
    pub max_vol: f64,
    /// min ℓ_ρ per training scale under the chosen params.
    pub min_lengths: Vec<f64>,
}

/// Choose (E2, E3, E1) on a training range of covers: E2 from the measured
/// projection constant, E3 over a small grid, E1 as the exact linear
/// rescale making the worst scale admissible with a small margin.
pub fn calibrate(space: &ModelSpace, covers: &[Cover], base: &WeightParams) -> Result<Calibration> {
    if covers.is_empty() {
        return Err(Error::InvalidSpec("no training covers".into()));
    }
    // K7 is geometric: measure it once with the base parameters
    let probe = build_paper_weight(space, &covers[0], base)?;
    let k7 = probe.k7;
    let e2 = (k7 + 2.0).max(1.0);
    let margin = 1.01;
    let mut best: Option<Calibration> = None;
    for e3 in [1.0, 2.0, 4.0, 8.0] {
        let mut params = base.clone();
        params.e2 = e2;
        params.e3 = e3;
        params.e1 = 1.0;
        let mut min_len = f64::INFINITY;
        let mut raw: Vec<(f64, f64)> = Vec::new(); // (min length, vol at E1 = 1)
        for cover in covers {
            let pw = build_paper_weight(space, cover, &params)?;
            let rep = verify_admissibility(space, cover, &pw, params.delta_prime)?;
            let len = match rep.result {
                Admissibility::Admissible { min_length, .. } => min_length,
                Admissibility::Violated { length, .. } => length,
            };
            min_len = min_len.min(len);
            raw.push((len, vol_p(&pw.weights, params.p)?));
        }
        if !(min_len > 0.0) || !min_len.is_finite() {
            continue;
        }
        // ℓ_ρ is linear in E1, so this makes every scale admissible
        params.e1 = (margin / min_len).max(1.0);
        let scale = params.e1;
        let max_vol = raw
            .iter()
            .map(|(_, v)| v * scale.powf(params.p))
            .fold(0.0, f64::max);
        let min_lengths = raw.iter().map(|(l, _)| l * scale).collect();
        let cand = Calibration {
            params,
            k7,
            max_vol,
            min_lengths,
        };
        if best.as_ref().map_or(true, |b| cand.max_vol < b.max_vol) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| {
        Error::InvalidSpec("calibration failed: no parameter choice gave positive lengths".into())
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToyRecursion {
    /// Volume sequence a_0..a_depth.
    pub values: Vec<f64>,
    /// Smallest C' with a_n ≤ (C'/n^{p−1})·max{a_0..a_{n−1}} on the range.
    pub c_prime: f64,
}

/// Volume recursion of the simplified one-circle model: geometric annuli
/// around the two marked points are mapped to arithmetic annuli of width
/// 1/(2n), and glued copies recurse with scale factor 1/(3^{j−i} n).
pub fn toy_recursion(p: f64, depth: usize) -> Result<ToyRecursion> {
    if !(p > 1.0) {
        return Err(Error::BadExponent(p, "p > 1"));
    }
    if depth < 2 {
        return Err(Error::TooFewScales(2));
    }
    // copy density: 12·3^{j-1} copies of relative size 3^{-j} around a
    // circumference-2 circle; an annulus pair at scale 3^{-i} holds the
    // fraction (2/3)·3^{-i} of them
    let copy_count = |j_minus_i: i32| (8.0 / 3.0) * 3.0f64.powi(j_minus_i);
    let mut a_seq = vec![1.0f64];
    for n in 1..=depth {
        let nf = n as f64;
        let mut a_n = 0.0;
        for i in 0..n {
            // four boundary arcs of the annulus pair at scale 3^{-i}, each
            // covered by 3^{n-i-1} sets sharing image width 1/(2n)
            let c_i = 3.0f64.powi((n - i - 1) as i32);
            a_n += 4.0 * c_i.powf(1.0 - p) * (1.0 / (2.0 * nf)).powf(p);
            for j in (i + 1)..=n {
                let copies = copy_count((j - i) as i32);
                let scale = 1.0 / (3.0f64.powi((j - i) as i32) * nf);
                a_n += copies * scale.powf(p) * a_seq[n - j];
            }
        }
        a_seq.push(a_n);
    }
    let mut c_prime: f64 = 0.0;
    let mut running_max = a_seq[0];
    for n in 1..=depth {
        let nf = n as f64;
        c_prime = c_prime.max(a_seq[n] * nf.powf(p - 1.0) / running_max);
        running_max = running_max.max(a_seq[n]);
    }
    Ok(ToyRecursion {
        values: a_seq,
        c_prime,
    })
}
