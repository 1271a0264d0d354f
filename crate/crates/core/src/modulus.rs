//! Combinatorial p-modulus of curve families on cover nerves.
//!
//! The solver uses constraint generation: keep a small active list of
//! curves, minimize the p-volume subject to their length constraints (via
//! projected gradient ascent on the dual), then ask a node-weighted
//! shortest-path oracle for violated curves and repeat.  A dense solver
//! over explicit curve lists serves as a validation oracle.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cover::{Cover, ResolvedFamily};
use crate::error::{Error, Result};
use crate::space::OrderedF64;

/// A weight on the sets of a cover: `values[i]` weights cover set i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub values: Vec<f64>,
}

impl WeightFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "weight value {v} is not a finite nonnegative real"
                )));
            }
        }
        Ok(WeightFunction { values })
    }

    pub fn constant(value: f64, num_sets: usize) -> Result<Self> {
        WeightFunction::new(vec![value; num_sets])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// ℓ_ρ of a nerve path: sum of ρ over the *distinct* sets the path touches.
pub fn rho_length(rho: &WeightFunction, path: &[usize]) -> Result<f64> {
    let mut seen: Vec<usize> = path.to_vec();
    seen.sort_unstable();
    seen.dedup();
    let mut total = 0.0;
    for s in seen {
        let v = rho
            .values
            .get(s)
            .ok_or(Error::ForeignCoverSet {
                set: s,
                len: rho.values.len(),
            })?;
        total += v;
    }
    Ok(total)
}

/// p-volume Σ ρ(A)^p.
pub fn vol_p(rho: &WeightFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p, "p >= 1"));
    }
    Ok(rho.values.iter().map(|v| v.powf(p)).sum())
}

/// Result of checking admissibility of a weight against a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Admissibility {
    Admissible {
        /// Minimum ℓ_ρ over the family (infinity when every constraint
        /// group is disconnected or the family is empty).
        min_length: f64,
        /// Constraint groups with no connecting path, treated as
        /// vacuously satisfied.
        vacuous_groups: usize,
    },
    Violated { witness: Vec<usize>, length: f64 },
}

/// Exact family minimum via node-weighted Dijkstra per constraint group.
///
/// The family minimum over all curves equals the minimum over simple nerve
/// paths: any curve's set of touched cover sets contains a simple
/// source-target path, whose ℓ_ρ is no larger.
pub fn admissibility_check(
    cover: &Cover,
    family: &ResolvedFamily,
    rho: &WeightFunction,
) -> Result<Admissibility> {
    if rho.values.len() != cover.centers.len() {
        return Err(Error::CoverSpaceMismatch(format!(
            "weight on {} sets, cover has {}",
            rho.values.len(),
            cover.centers.len()
        )));
    }
    let outcome = family_oracle(cover, family, rho, 1.0)?;
    match outcome.global {
        // tiny slack so boundary cases (ℓ = 1 up to summation roundoff)
        // count as admissible
        Some((len, witness)) if len < 1.0 - 1e-12 => Ok(Admissibility::Violated {
            witness,
            length: len,
        }),
        Some((len, _)) => Ok(Admissibility::Admissible {
            min_length: len,
            vacuous_groups: outcome.vacuous,
        }),
        None => Ok(Admissibility::Admissible {
            min_length: f64::INFINITY,
            vacuous_groups: outcome.vacuous,
        }),
    }
}

struct OracleOutcome {
    /// Global minimum (length, witness path) over the family.
    global: Option<(f64, Vec<usize>)>,
    vacuous: usize,
    /// One minimizing witness per constraint group with minimum below the
    /// threshold.
    violated: Vec<(f64, Vec<usize>)>,
}

fn family_oracle(
    cover: &Cover,
    family: &ResolvedFamily,
    rho: &WeightFunction,
    threshold: f64,
) -> Result<OracleOutcome> {
    let mut global: Option<(f64, Vec<usize>)> = None;
    let mut vacuous = 0usize;
    let mut violated = Vec::new();
    let mut consider = |len: f64, path: Vec<usize>, violated: &mut Vec<(f64, Vec<usize>)>| {
        if len < threshold {
            violated.push((len, path.clone()));
        }
        if global.as_ref().map_or(true, |(g, _)| len < *g) {
            global = Some((len, path));
        }
    };
    match family {
        ResolvedFamily::Explicit(paths) => {
            for path in paths {
                let len = rho_length(rho, path)?;
                consider(len, path.clone(), &mut violated);
            }
        }
        ResolvedFamily::Pairs(groups) => {
            for g in groups {
                if g.targets.is_empty() {
                    vacuous += 1;
                    continue;
                }
                match node_weighted_shortest(cover, rho, g.source, &g.targets) {
                    Some((len, path)) => consider(len, path, &mut violated),
                    None => vacuous += 1,
                }
            }
        }
    }
    Ok(OracleOutcome {
        global,
        vacuous,
        violated,
    })
}

/// Node-weighted Dijkstra over the nerve from `source` to the nearest
/// target; path cost counts each visited set once (simple paths).
fn node_weighted_shortest(
    cover: &Cover,
    rho: &WeightFunction,
    source: usize,
    targets: &[usize],
) -> Option<(f64, Vec<usize>)> {
    let nv = cover.centers.len();
    let mut dist = vec![f64::INFINITY; nv];
    let mut parent = vec![usize::MAX; nv];
    let mut heap: BinaryHeap<Reverse<(OrderedF64, usize)>> = BinaryHeap::new();
    dist[source] = rho.values[source];
    heap.push(Reverse((OrderedF64(dist[source]), source)));
    let mut is_target = vec![false; nv];
    for &t in targets {
        is_target[t] = true;
    }
    let mut best: Option<usize> = None;
    while let Some(Reverse((OrderedF64(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if is_target[u] {
            best = Some(u);
            break;
        }
        for &v in &cover.nerve[u] {
            let nd = d + rho.values[v];
            // strict improvement keeps parents deterministic under the
            // fixed neighbor iteration order
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = u;
                heap.push(Reverse((OrderedF64(nd), v)));
            }
        }
    }
    let end = best?;
    let mut path = vec![end];
    let mut cur = end;
    while parent[cur] != usize::MAX {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    Some((dist[end], path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationCapped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusSolution {
    /// Vol_p of the returned admissible weights (upper certificate).
    pub value: f64,
    pub weights: WeightFunction,
    /// Curves with ℓ_ρ within tol of 1 (the binding constraints).
    pub active_curves: Vec<Vec<usize>>,
    pub iterations: usize,
    pub status: SolveStatus,
    /// [dual lower bound, feasible upper bound] bracketing the true value.
    pub certificate: (f64, f64),
    /// Minimum ℓ_ρ over the family for the returned weights.
    pub min_length: f64,
    pub vacuous_groups: usize,
}

struct InnerSolution {
    rho: Vec<f64>,
    lambda: Vec<f64>,
    /// Dual value g(λ): lower bound on the subproblem optimum.
    lower: f64,
}

/// Minimize Σρ^p subject to ℓ_ρ(γ) ≥ 1 over the given curves, by projected
/// gradient ascent on the dual
///   g(λ) = Σλ − (p−1) Σ_A (s_A/p)^q,   s_A = Σ_{γ∋A} λ_γ,  q = p/(p−1),
/// with the primal readout ρ_A = (s_A/p)^{1/(p−1)} and Armijo backtracking.
/// Power with an integer fast path; the inner solver evaluates x^e on every
/// curve–set incidence per sweep, and the common exponents (p ∈ {1.5, 2}) are
/// small integers after the dual reparametrization.
#[derive(Clone, Copy)]
struct FastPow {
    e: f64,
    i: Option<i32>,
}

impl FastPow {
    fn new(e: f64) -> Self {
        let i = if e.fract() == 0.0 && e.abs() <= 8.0 {
            Some(e as i32)
        } else {
            None
        };
        FastPow { e, i }
    }

    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self.i {
            Some(i) => x.powi(i),
            None => x.powf(self.e),
        }
    }
}

fn dual_solve(
    curves: &[Vec<usize>],
    num_sets: usize,
    p: f64,
    rel_gap: f64,
    max_sweeps: usize,
    warm: Option<Vec<f64>>,
) -> InnerSolution {
    let q = p / (p - 1.0);
    let inv_pm1 = 1.0 / (p - 1.0);
    let pow_q = FastPow::new(q);
    let pow_len = FastPow::new(inv_pm1);
    let pow_h = FastPow::new(inv_pm1 - 1.0);
    let pow_p = FastPow::new(p);
    let m = curves.len();
    let mut lambda = warm.unwrap_or_default();
    lambda.truncate(m);
    // seed new multipliers at the single-constraint optimum p·k^{1−p}
    while lambda.len() < m {
        let k = curves[lambda.len()].len().max(1) as f64;
        lambda.push(p * k.powf(1.0 - p));
    }

    // s_A = Σ_{γ∋A} λ_γ, maintained incrementally across coordinate updates
    let mut s = vec![0.0f64; num_sets];
    for (g, curve) in curves.iter().enumerate() {
        if lambda[g] > 0.0 {
            for &a in curve {
                s[a] += lambda[g];
            }
        }
    }
    let rho_of = |s_a: f64| if s_a > 0.0 { pow_len.apply(s_a / p) } else { 0.0 };

    // length and curvature of ℓ_γ as a function of this curve's own multiplier
    let curve_len_h = |curve: &[usize], s: &[f64]| -> (f64, f64) {
        let mut len = 0.0;
        let mut h = 0.0;
        for &a in curve {
            if s[a] > 0.0 {
                let base = s[a] / p;
                len += pow_len.apply(base);
                h += pow_h.apply(base);
            }
        }
        (len, h / (p * (p - 1.0)))
    };

    let mut g_val;
    let mut sweeps = 0usize;
    loop {
        // refresh s from scratch so incremental float drift cannot accumulate
        s.iter_mut().for_each(|v| *v = 0.0);
        for (g, curve) in curves.iter().enumerate() {
            if lambda[g] > 0.0 {
                for &a in curve {
                    s[a] += lambda[g];
                }
            }
        }
        // duality-gap check: dual value vs the rescaled-feasible primal value
        let mut dual_sum = 0.0;
        for &sa in &s {
            if sa > 0.0 {
                dual_sum += pow_q.apply(sa / p);
            }
        }
        g_val = lambda.iter().sum::<f64>() - (p - 1.0) * dual_sum;
        let mut min_len = f64::INFINITY;
        for curve in curves {
            let len: f64 = curve.iter().map(|&a| rho_of(s[a])).sum();
            min_len = min_len.min(len);
        }
        if min_len > 0.0 {
            let scale = 1.0 / min_len;
            let upper: f64 = s.iter().map(|&sa| pow_p.apply(rho_of(sa) * scale)).sum();
            if upper - g_val <= rel_gap * upper.max(1e-300) {
                break;
            }
        }
        if sweeps >= max_sweeps {
            break;
        }
        sweeps += 1;

        // one Gauss–Seidel sweep: maximize the (concave) dual in each λ_γ
        // exactly via safeguarded Newton on φ′(λ_γ) = 1 − ℓ_γ(λ_γ), which is
        // strictly decreasing in λ_γ
        for (g, curve) in curves.iter().enumerate() {
            let mut lam = lambda[g];
            let mut lo = 0.0f64;
            let mut hi = f64::INFINITY;
            for _ in 0..30 {
                let (len, h) = curve_len_h(curve, &s);
                let grad = 1.0 - len;
                if grad.abs() <= 1e-13 {
                    break;
                }
                if grad > 0.0 {
                    lo = lam;
                } else {
                    hi = lam;
                }
                if grad < 0.0 && lam == 0.0 {
                    break; // constraint slack even with λ_γ = 0
                }
                let mut cand = if h.is_finite() && h > 0.0 {
                    lam + grad / h
                } else {
                    f64::NEG_INFINITY // flat curvature: fall back to bracketing
                };
                if !(cand > lo && cand < hi) {
                    cand = if hi.is_finite() {
                        0.5 * (lo + hi)
                    } else {
                        // root not yet bracketed above: double outward
                        (2.0 * lam).max(lam + 1.0)
                    };
                }
                cand = cand.max(0.0);
                let delta = cand - lam;
                if delta == 0.0 {
                    break;
                }
                for &a in curve {
                    s[a] += delta;
                }
                lam = cand;
            }
            lambda[g] = lam;
        }
    }
    let rho: Vec<f64> = s.iter().map(|&sa| rho_of(sa)).collect();
    InnerSolution {
        rho,
        lambda,
        lower: g_val,
    }
}

fn validate_solver_args(p: f64, tol: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::BadExponent(p, "p > 1"));
    }
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::BadTolerance(tol));
    }
    Ok(())
}

fn normalize_curve(path: &[usize], num_sets: usize) -> Result<Vec<usize>> {
    let mut c: Vec<usize> = path.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.is_empty() {
        return Err(Error::InvalidSpec(
            "curve touching no cover sets makes the family modulus infinite".into(),
        ));
    }
    if let Some(&s) = c.last() {
        if s >= num_sets {
            return Err(Error::ForeignCoverSet { set: s, len: num_sets });
        }
    }
    Ok(c)
}

/// Compute Mod_p of a resolved family on a cover by constraint generation.
pub fn solve_modulus(
    cover: &Cover,
    family: &ResolvedFamily,
    p: f64,
    tol: f64,
    max_iters: usize,
) -> Result<ModulusSolution> {
    validate_solver_args(p, tol)?;
    let num_sets = cover.centers.len();
    let zero = |vacuous| {
        Ok(ModulusSolution {
            value: 0.0,
            weights: WeightFunction {
                values: vec![0.0; num_sets],
            },
            active_curves: vec![],
            iterations: 0,
            status: SolveStatus::Converged,
            certificate: (0.0, 0.0),
            min_length: f64::INFINITY,
            vacuous_groups: vacuous,
        })
    };
    if family.is_empty() {
        return zero(0);
    }
    // seed the active list with minimum-cardinality curves (uniform weight)
    let uniform = WeightFunction::constant(1.0, num_sets)?;
    let seed = family_oracle(cover, family, &uniform, f64::INFINITY)?;
    let Some(_) = seed.global else {
        return zero(seed.vacuous);
    };
    let mut active: Vec<Vec<usize>> = Vec::new();
    let mut members: HashSet<Vec<usize>> = HashSet::new();
    let push_active = |active: &mut Vec<Vec<usize>>,
                       members: &mut HashSet<Vec<usize>>,
                       path: &[usize]|
     -> Result<bool> {
        let c = normalize_curve(path, num_sets)?;
        if members.contains(&c) {
            Ok(false)
        } else {
            members.insert(c.clone());
            active.push(c);
            Ok(true)
        }
    };
    for (_, path) in &seed.violated {
        push_active(&mut active, &mut members, path)?;
    }

    let inner_gap = (tol / 10.0).min(1e-3);
    let mut warm: Option<Vec<f64>> = None;
    let mut rho = vec![0.0; num_sets];
    let mut lower = 0.0;
    let mut status = SolveStatus::IterationCapped;
    let mut iterations = 0usize;
    let mut min_len = 0.0f64;
    let mut vacuous = seed.vacuous;
    // loose inner gap while the active set is still being discovered;
    // tightened as the family minimum approaches admissibility
    let mut gap_now = 0.05f64;
    let mut last_gap = f64::INFINITY;
    for _ in 0..max_iters.max(1) {
        iterations += 1;
        last_gap = gap_now.max(inner_gap);
        let inner = dual_solve(&active, num_sets, p, last_gap, 2_000, warm.take());
        rho = inner.rho;
        lower = inner.lower;
        warm = Some(inner.lambda);
        let w = WeightFunction { values: rho.clone() };
        let outcome = family_oracle(cover, family, &w, 1.0 - tol / 2.0)?;
        vacuous = outcome.vacuous;
        min_len = outcome.global.as_ref().map_or(f64::INFINITY, |(l, _)| *l);
        if min_len >= 1.0 - tol {
            // admissible; accept only once the duality gap is also closed,
            // otherwise re-solve the same active set at a tighter gap
            let upper: f64 = rho.iter().map(|&r| (r / min_len).powf(p)).sum();
            if upper - lower <= tol * upper || gap_now <= inner_gap {
                status = SolveStatus::Converged;
                break;
            }
            gap_now = (gap_now * 0.1).max(inner_gap);
            continue;
        }
        gap_now = (0.3 * (1.0 - min_len)).clamp(inner_gap, 0.05);
        let mut added = false;
        for (_, path) in &outcome.violated {
            added |= push_active(&mut active, &mut members, path)?;
        }
        // drop constraints that are slack with margin and carry no
        // multiplier; the oracle re-adds them if they ever bind again
        if let Some(wm) = warm.as_mut() {
            let solved = wm.len(); // curves the inner solve has seen
            let keep: Vec<bool> = active
                .iter()
                .enumerate()
                .map(|(g, c)| {
                    g >= solved || wm[g] > 0.0 || {
                        let len: f64 = c.iter().map(|&a| rho[a]).sum();
                        len < 1.05
                    }
                })
                .collect();
            if keep.iter().any(|k| !k) {
                let mut new_active = Vec::with_capacity(active.len());
                let mut new_warm = Vec::with_capacity(wm.len());
                for (g, c) in active.drain(..).enumerate() {
                    if keep[g] {
                        if g < solved {
                            new_warm.push(wm[g]);
                        }
                        new_active.push(c);
                    } else {
                        members.remove(&c);
                    }
                }
                active = new_active;
                *wm = new_warm;
            }
        }
        if !added {
            // no new cuts: ρ/min ℓ is admissible for the whole family, so a
            // closed certified gap ends the solve even if the unrescaled ρ
            // is not yet within tol of feasibility
            if min_len > 0.0 {
                let upper: f64 = rho.iter().map(|&r| (r / min_len).powf(p)).sum();
                if upper.is_finite() && upper - lower <= tol * upper {
                    status = SolveStatus::Converged;
                    break;
                }
            }
            if gap_now > inner_gap {
                // nothing new to cut, but the inner solve was loose: tighten
                // and re-solve the same active set
                gap_now = (gap_now * 0.1).max(inner_gap);
                continue;
            }
            // oracle found nothing new at full precision: accept the
            // certificate we have
            break;
        }
        // jump-start the next inner solve: scaling λ by (1/min ℓ)^{p−1}
        // scales ρ by 1/min ℓ, putting the family minimum near 1; clamped so
        // an overshoot stays within a few coordinate-Newton corrections
        if min_len > 0.0 && min_len < 1.0 {
            if let Some(wm) = warm.as_mut() {
                let c = (1.0 / min_len).powf(p - 1.0).min(4.0);
                for l in wm.iter_mut() {
                    *l *= c;
                }
            }
        }
    }
    // the last inner solve before convergence may have run at a loose gap;
    // re-tighten the dual on the final active set for a sharp lower bound
    // (any λ ≥ 0 certifies, so ρ — already validated by the oracle — is kept)
    if !active.is_empty() && last_gap > inner_gap {
        let polish = dual_solve(&active, num_sets, p, inner_gap, 2_000, warm.take());
        lower = lower.max(polish.lower);
    }

    // rescale to exact admissibility (ℓ is linear in ρ)
    if min_len.is_finite() && min_len > 0.0 {
        for r in rho.iter_mut() {
            *r /= min_len;
        }
        min_len = 1.0;
    }
    let weights = WeightFunction { values: rho };
    let value = vol_p(&weights, p)?;
    let active_curves: Vec<Vec<usize>> = active
        .iter()
        .filter(|c| {
            let len: f64 = c.iter().map(|&a| weights.values[a]).sum();
            (len - 1.0).abs() <= tol
        })
        .cloned()
        .collect();
    Ok(ModulusSolution {
        value,
        weights,
        active_curves,
        iterations,
        status,
        certificate: (lower.max(0.0), value),
        min_length: min_len,
        vacuous_groups: vacuous,
    })
}

/// Dense validation oracle: solve with every listed curve as a constraint.
pub fn brute_force_modulus(curves: &[Vec<usize>], num_sets: usize, p: f64, tol: f64) -> Result<f64> {
    validate_solver_args(p, tol)?;
    let mut norm: Vec<Vec<usize>> = Vec::new();
    for c in curves {
        let nc = normalize_curve(c, num_sets)?;
        if !norm.contains(&nc) {
            norm.push(nc);
        }
    }
    let incidences: usize = norm.iter().map(Vec::len).sum();
    if incidences > 2_000 {
        return Err(Error::InstanceTooLarge(incidences));
    }
    if norm.is_empty() {
        return Ok(0.0);
    }
    let inner = dual_solve(&norm, num_sets, p, tol / 10.0, 50_000, None);
    let min_len = norm
        .iter()
        .map(|c| c.iter().map(|&a| inner.rho[a]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    if !(min_len > 0.0) {
        return Ok(0.0);
    }
    Ok(inner.rho.iter().map(|r| (r / min_len).powf(p)).sum())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModCell {
    pub p: f64,
    pub n: i32,
    pub value: f64,
    pub iterations: usize,
    pub certificate: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub p: f64,
    /// Slope of the least-squares fit of ln(value) against n.
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Slope negative beyond twice its standard error.
    pub certified_decay: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PcEstimate {
    /// Smallest grid p with certified decay, with its fit residual.
    AtGrid { p: f64, residual_rms: f64 },
    /// No grid p shows certified decay; never extrapolated beyond the grid.
    AboveGrid { max_p: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalExponentReport {
    pub cells: Vec<ModCell>,
    pub fits: Vec<DecayFit>,
    pub p_c: PcEstimate,
}

/// Tabulate Mod_p over a (p, n) grid, fit per-p decay of ln Mod against n,
/// and report the smallest p with certified decay.  `solve_cell` computes
/// the modulus for one (p, n) cell.
pub fn critical_exponent_estimate(
    mut solve_cell: impl FnMut(f64, i32) -> Result<ModulusSolution>,
    p_grid: &[f64],
    n_range: &[i32],
) -> Result<CriticalExponentReport> {
    if n_range.len() < 3 {
        return Err(Error::TooFewScales(3));
    }
    if p_grid.is_empty() {
        return Err(Error::InvalidSpec("empty p grid".into()));
    }
    let mut cells = Vec::new();
    let mut fits = Vec::new();
    for &p in p_grid {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &n in n_range {
            let sol = solve_cell(p, n)?;
            cells.push(ModCell {
                p,
                n,
                value: sol.value,
                iterations: sol.iterations,
                certificate: sol.certificate,
            });
            xs.push(f64::from(n));
            ys.push(sol.value.max(1e-300).ln());
        }
        let k = xs.len() as f64;
        let xbar = xs.iter().sum::<f64>() / k;
        let ybar = ys.iter().sum::<f64>() / k;
        let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
        let sxy: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xbar) * (y - ybar))
            .sum();
        let slope = sxy / sxx;
        let intercept = ybar - slope * xbar;
        let residual_rms = (xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
            .sum::<f64>()
            / k)
            .sqrt();
        let stderr = if k > 2.0 {
            (residual_rms * residual_rms * k / (k - 2.0) / sxx).sqrt()
        } else {
            f64::INFINITY
        };
        let certified_decay = slope < 0.0 && slope + 2.0 * stderr < -1e-6;
        fits.push(DecayFit {
            p,
            slope,
            intercept,
            residual_rms,
            certified_decay,
        });
    }
    let p_c = fits
        .iter()
        .filter(|f| f.certified_decay)
        .min_by(|a, b| a.p.partial_cmp(&b.p).unwrap())
        .map(|f| PcEstimate::AtGrid {
            p: f.p,
            residual_rms: f.residual_rms,
        })
        .unwrap_or(PcEstimate::AboveGrid {
            max_p: p_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        });
    Ok(CriticalExponentReport { cells, fits, p_c })
}
