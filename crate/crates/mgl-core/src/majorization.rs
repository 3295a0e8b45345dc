//! Weak-majorization predicates, extreme-point bodies, and confinement
//! oracles.
//!
//! For a non-negative vector x, the body W(x) collects every non-negative y
//! whose descending partial sums are dominated by those of x. Mirsky's
//! identity says W(x) equals the convex hull of the "deleted permutations"
//! E(x) = {(δ₁ x_{σ(1)}, …, δ_m x_{σ(m)}) : δ_i ∈ {0,1}, σ a permutation}.
//! This module provides both descriptions, an agreement check between them,
//! and two sampled oracles: a monotone convex bound (symmetric strictly
//! convex monotone F attains its maximum over W(x) only at rearrangements
//! of x) and a region confinement check (W(x) stays inside the squared
//! stability region whenever x lies in a symmetric convex subset of it,
//! with entry-sum rigidity on boundary points whose largest entry
//! exceeds 1).

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::region::{self, RegionVerdict};
use crate::spectrum::SquaredSpectrum;

/// Partial-sum comparisons tolerate this much excess.
pub const MAJORIZATION_TOL: f64 = 1e-12;
/// Hull membership is decided as linear feasibility to this tolerance.
pub const HULL_TOL: f64 = 1e-9;
/// Two vectors count as rearrangements when their sorted forms differ by
/// at most this much per entry.
pub const REARRANGEMENT_TOL: f64 = 1e-10;
/// Enumeration guard: extreme sets are built only for m ≤ 8.
pub const MAX_ENUMERATION_DIM: usize = 8;

fn check_nonneg(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidInput(format!("{what} must not be empty")));
    }
    for &x in v {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidInput(format!(
                "{what} entries must be finite and ≥ 0, got {x}"
            )));
        }
    }
    Ok(())
}

fn sorted_descending(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    s
}

/// True iff the first k descending partial sums of `y` are dominated by
/// those of `x` for k = 1, …, l, with tolerance [`MAJORIZATION_TOL`].
pub fn weakly_majorized(y: &[f64], x: &[f64], l: usize) -> Result<bool> {
    if y.len() != x.len() {
        return Err(Error::Dimension(format!(
            "weak majorization compares equal lengths, got {} and {}",
            y.len(),
            x.len()
        )));
    }
    check_nonneg(y, "left vector")?;
    check_nonneg(x, "right vector")?;
    if l == 0 || l > x.len() {
        return Err(Error::InvalidInput(format!(
            "prefix depth must satisfy 1 ≤ l ≤ {}, got {l}",
            x.len()
        )));
    }
    let ys = sorted_descending(y);
    let xs = sorted_descending(x);
    let mut sy = 0.0;
    let mut sx = 0.0;
    for k in 0..l {
        sy += ys[k];
        sx += xs[k];
        if sy > sx + MAJORIZATION_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff y ≥ 0 entrywise and y is weakly majorized by x at full depth.
pub fn body_contains(x: &[f64], y: &[f64]) -> Result<bool> {
    if y.len() != x.len() {
        return Err(Error::Dimension(format!(
            "body membership compares equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if y.iter().any(|&v| !v.is_finite() || v < -MAJORIZATION_TOL) {
        return Ok(false);
    }
    let y_clamped: Vec<f64> = y.iter().map(|&v| v.max(0.0)).collect();
    weakly_majorized(&y_clamped, x, x.len())
}

/// The deduplicated set of deleted permutations of a source vector.
#[derive(Clone, Debug)]
pub struct ExtremeSet {
    pub points: Vec<Vec<f64>>,
    pub source: Vec<f64>,
}

/// Enumerates all (δ₁ x_{σ(1)}, …, δ_m x_{σ(m)}) with δ_i ∈ {0,1} and σ a
/// permutation, deduplicated exactly (the entries are copied bit-for-bit,
/// never recomputed). Guarded to m ≤ [`MAX_ENUMERATION_DIM`].
pub fn extreme_points(x: &[f64]) -> Result<ExtremeSet> {
    check_nonneg(x, "source vector")?;
    let m = x.len();
    if m > MAX_ENUMERATION_DIM {
        return Err(Error::SizeGuard(format!(
            "extreme set enumeration supports m ≤ {MAX_ENUMERATION_DIM}, got {m}"
        )));
    }
    // Positions are filled left to right with either 0 or one unused source
    // entry; choosing each distinct value once per position avoids the
    // factorial blowup from permuting equal entries.
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut current = vec![0.0_f64; m];
    let mut used = vec![false; m];
    let source = sorted_descending(x);

    fn recurse(
        pos: usize,
        source: &[f64],
        used: &mut [bool],
        current: &mut [f64],
        seen: &mut BTreeSet<Vec<u64>>,
        points: &mut Vec<Vec<f64>>,
    ) {
        if pos == current.len() {
            let key: Vec<u64> = current.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                points.push(current.to_vec());
            }
            return;
        }
        current[pos] = 0.0;
        recurse(pos + 1, source, used, current, seen, points);
        let mut prev = f64::NAN;
        for i in 0..source.len() {
            if used[i] || source[i] == prev || source[i] == 0.0 {
                continue;
            }
            prev = source[i];
            used[i] = true;
            current[pos] = source[i];
            recurse(pos + 1, source, used, current, seen, points);
            used[i] = false;
        }
    }

    recurse(0, &source, &mut used, &mut current, &mut seen, &mut points);
    Ok(ExtremeSet { points, source })
}

/// True iff `y` is a convex combination of the extreme points of the body
/// of `x`, decided by phase-one simplex feasibility with [`HULL_TOL`].
pub fn hull_contains(x: &[f64], y: &[f64]) -> Result<bool> {
    if y.len() != x.len() {
        return Err(Error::Dimension(format!(
            "hull membership compares equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let vertices = extreme_points(x)?;
    let scale = 1.0_f64.max(sorted_descending(x)[0]);
    Ok(convex_combination_feasible(
        &vertices.points,
        y,
        HULL_TOL * scale,
    ))
}

/// Phase-one simplex: is `target` = Σ w_v · v with w ≥ 0, Σ w = 1?
///
/// Minimizes the sum of artificial variables for the system
/// [vertices; 1ᵀ]·w + s = [target; 1]; feasible iff the optimum is ≤ tol.
/// Bland's rule guards against cycling.
fn convex_combination_feasible(vertices: &[Vec<f64>], target: &[f64], tol: f64) -> bool {
    let m = target.len();
    let rows = m + 1;
    let cols = vertices.len() + rows;

    // Tableau layout: one row per constraint plus the objective row at the
    // end; one column per vertex weight, per artificial, plus RHS.
    let width = cols + 1;
    let mut t = vec![0.0_f64; (rows + 1) * width];
    let idx = |r: usize, c: usize| r * width + c;

    for (j, v) in vertices.iter().enumerate() {
        for r in 0..m {
            t[idx(r, j)] = v[r];
        }
        t[idx(m, j)] = 1.0;
    }
    for r in 0..m {
        t[idx(r, cols)] = target[r];
    }
    t[idx(m, cols)] = 1.0;

    // Flip rows with negative RHS so the artificial basis is feasible.
    for r in 0..rows {
        if t[idx(r, cols)] < 0.0 {
            for c in 0..=cols {
                t[idx(r, c)] = -t[idx(r, c)];
            }
        }
        t[idx(r, vertices.len() + r)] = 1.0;
    }

    // Objective: minimize Σ artificials. Express as maximizing −Σ s_r; the
    // objective row holds reduced costs with the artificial basis priced out.
    for c in 0..=cols {
        let mut z = 0.0;
        for r in 0..rows {
            z += t[idx(r, c)];
        }
        let is_artificial = (vertices.len()..cols).contains(&c);
        t[idx(rows, c)] = z - if is_artificial { 1.0 } else { 0.0 };
    }

    let mut basis: Vec<usize> = (vertices.len()..cols).collect();
    let pivot_eps = 1e-11;
    let max_iters = 50 * (rows + vertices.len());

    for _ in 0..max_iters {
        // Bland's rule: smallest-index column with positive reduced cost.
        let mut entering = None;
        for c in 0..cols {
            if t[idx(rows, c)] > pivot_eps {
                entering = Some(c);
                break;
            }
        }
        let Some(e) = entering else { break };

        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for r in 0..rows {
            let a = t[idx(r, e)];
            if a > pivot_eps {
                let ratio = t[idx(r, cols)] / a;
                if ratio < best_ratio - 1e-15
                    || (ratio < best_ratio + 1e-15
                        && leaving.map_or(true, |l| basis[r] < basis[l]))
                {
                    best_ratio = ratio;
                    leaving = Some(r);
                }
            }
        }
        let Some(l) = leaving else { break };

        let pivot = t[idx(l, e)];
        for c in 0..=cols {
            t[idx(l, c)] /= pivot;
        }
        for r in 0..=rows {
            if r != l {
                let factor = t[idx(r, e)];
                if factor != 0.0 {
                    for c in 0..=cols {
                        t[idx(r, c)] -= factor * t[idx(l, c)];
                    }
                }
            }
        }
        basis[l] = e;
    }

    let mut artificial_sum = 0.0;
    for r in 0..rows {
        if basis[r] >= vertices.len() {
            artificial_sum += t[idx(r, cols)];
        }
    }
    artificial_sum <= tol
}

/// How a body agreement run draws its samples.
#[derive(Clone, Debug)]
pub enum SampleSpec {
    /// Regular lattice with the given step over [0, hi]^m.
    Grid { step: f64, hi: f64 },
    /// Uniform draws from [0, hi]^m with a fixed seed.
    Random { count: usize, hi: f64, seed: u64 },
}

/// Outcome of comparing partial-sum membership against hull membership.
#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub samples: usize,
    /// Samples where the two verdicts differ and the partial-sum margin is
    /// larger than the hull tolerance band; expected zero.
    pub disagreements: usize,
    /// Samples where the verdicts differ but the point sits within the hull
    /// tolerance band of the body boundary; these are excused.
    pub within_band: usize,
    /// Smallest absolute partial-sum margin seen among disagreements.
    pub worst_margin: f64,
}

/// Signed distance proxy for body membership: the minimum over prefix depths
/// of (partial sum of x) − (partial sum of y), and over entries of y_i.
fn body_margin(x: &[f64], y: &[f64]) -> f64 {
    let xs = sorted_descending(x);
    let ys = sorted_descending(y);
    let mut margin = f64::INFINITY;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for k in 0..xs.len() {
        sx += xs[k];
        sy += ys[k];
        margin = margin.min(sx - sy);
    }
    for &v in y {
        margin = margin.min(v);
    }
    margin
}

/// Compares partial-sum membership with hull membership over a sample set.
/// Disagreements are excused only within the hull tolerance band of the
/// body boundary.
pub fn body_hull_agreement(x: &[f64], spec: &SampleSpec) -> Result<AgreementReport> {
    check_nonneg(x, "source vector")?;
    let m = x.len();
    match spec {
        SampleSpec::Grid { .. } if m > 3 => {
            return Err(Error::SizeGuard(format!(
                "grid agreement mode supports m ≤ 3, got {m}"
            )));
        }
        SampleSpec::Random { .. } if m > 6 => {
            return Err(Error::SizeGuard(format!(
                "random agreement mode supports m ≤ 6, got {m}"
            )));
        }
        _ => {}
    }

    let samples: Vec<Vec<f64>> = match *spec {
        SampleSpec::Grid { step, hi } => {
            if step <= 0.0 || hi < 0.0 {
                return Err(Error::InvalidInput(
                    "grid sampling needs step > 0 and hi ≥ 0".into(),
                ));
            }
            let steps = (hi / step).floor() as usize + 1;
            let total = steps.pow(m as u32);
            (0..total)
                .map(|mut flat| {
                    let mut y = vec![0.0; m];
                    for slot in y.iter_mut() {
                        *slot = (flat % steps) as f64 * step;
                        flat /= steps;
                    }
                    y
                })
                .collect()
        }
        SampleSpec::Random { count, hi, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| (0..m).map(|_| rng.random_range(0.0..=hi)).collect())
                .collect()
        }
    };

    let vertices = extreme_points(x)?;
    let scale = 1.0_f64.max(sorted_descending(x)[0]);
    let verdicts = exec::map_slice(&samples, |y| {
        let by_sums = body_contains(x, y).expect("validated inputs");
        let by_hull = convex_combination_feasible(&vertices.points, y, HULL_TOL * scale);
        (by_sums, by_hull, body_margin(x, y))
    });

    let mut report = AgreementReport {
        samples: samples.len(),
        disagreements: 0,
        within_band: 0,
        worst_margin: f64::INFINITY,
    };
    for (by_sums, by_hull, margin) in verdicts {
        if by_sums != by_hull {
            if margin.abs() <= HULL_TOL * scale {
                report.within_band += 1;
            } else {
                report.disagreements += 1;
                report.worst_margin = report.worst_margin.min(margin.abs());
            }
        }
    }
    Ok(report)
}

/// Draws points of W(x): rejection samples from the bounding box, scaled
/// extreme points, and exact rearrangements of x. The mix keeps boundary
/// cases represented, which pure rejection would almost never hit.
pub fn sample_body(x: &[f64], count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_nonneg(x, "source vector")?;
    let m = x.len();
    let hi = sorted_descending(x)[0];
    let vertices = extreme_points(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);

    // Exact vertices first (they include every rearrangement of x).
    for v in vertices.points.iter() {
        if out.len() >= count / 4 {
            break;
        }
        out.push(v.clone());
    }
    // Scaled vertices stay inside by convexity (0 is a vertex).
    while out.len() < count / 2 {
        let v = &vertices.points[rng.random_range(0..vertices.points.len())];
        let u: f64 = rng.random_range(0.0..=1.0);
        out.push(v.iter().map(|c| c * u).collect());
    }
    // Rejection samples fill the interior.
    if hi > 0.0 {
        let mut attempts = 0usize;
        let cap = count * 400;
        while out.len() < count && attempts < cap {
            attempts += 1;
            let y: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..=hi)).collect();
            if body_contains(x, &y)? {
                out.push(y);
            }
        }
    }
    // Convex mixes of earlier accepted points round out the budget in case
    // rejection was starved (high m makes the body a thin corner of the box).
    while out.len() < count {
        if out.is_empty() {
            out.push(vec![0.0; m]);
            continue;
        }
        let a = out[rng.random_range(0..out.len())].clone();
        let b = out[rng.random_range(0..out.len())].clone();
        let u: f64 = rng.random_range(0.0..=1.0);
        out.push(
            a.iter()
                .zip(&b)
                .map(|(p, q)| u * p + (1.0 - u) * q)
                .collect(),
        );
    }
    Ok(out)
}

/// Report of a sampled maximum-principle check for a symmetric strictly
/// convex monotone function over a majorization body.
#[derive(Clone, Debug, Serialize)]
pub struct MonotoneBoundReport {
    pub samples: usize,
    /// max over samples of F(y) − F(x); positive values beyond the
    /// tolerance are violations.
    pub worst_excess: f64,
    pub violations: usize,
    /// Samples achieving F(y) ≥ F(x) − equality window.
    pub equality_cases: usize,
    /// Equality cases that are not rearrangements of x; expected zero.
    pub equality_mismatches: usize,
}

fn is_rearrangement(x: &[f64], y: &[f64]) -> bool {
    let xs = sorted_descending(x);
    let ys = sorted_descending(y);
    xs.iter()
        .zip(&ys)
        .all(|(a, b)| (a - b).abs() <= REARRANGEMENT_TOL)
}

/// Checks F(y) ≤ F(x) + tolerance for sampled y ∈ W(x), where F must be
/// symmetric, strictly convex, and monotone on a domain D ⊇ W(x) certified
/// by the caller. `domain` guards each sample; a sample outside D is an
/// error, not a violation. Near-equality cases must be rearrangements of x.
pub fn monotone_convex_bound_check<F, D>(
    f: F,
    domain: D,
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<MonotoneBoundReport>
where
    F: Fn(&[f64]) -> f64,
    D: Fn(&[f64]) -> bool,
{
    check_nonneg(x, "source vector")?;
    if !domain(x) {
        return Err(Error::Domain(
            "source vector lies outside the certified domain".into(),
        ));
    }
    let fx = f(x);
    let equality_window = 1e-10 * fx.abs().max(1.0);
    let mut report = MonotoneBoundReport {
        samples: 0,
        worst_excess: f64::NEG_INFINITY,
        violations: 0,
        equality_cases: 0,
        equality_mismatches: 0,
    };
    for y in sample_body(x, samples, seed)? {
        if !domain(&y) {
            return Err(Error::Domain(format!(
                "sampled point {y:?} escapes the certified domain"
            )));
        }
        let fy = f(&y);
        let excess = fy - fx;
        report.samples += 1;
        report.worst_excess = report.worst_excess.max(excess);
        if excess > MAJORIZATION_TOL {
            report.violations += 1;
        }
        if fy >= fx - equality_window {
            report.equality_cases += 1;
            if !is_rearrangement(x, &y) {
                report.equality_mismatches += 1;
            }
        }
    }
    Ok(report)
}

/// Report of a sampled confinement check of W(x) inside the squared
/// stability region.
#[derive(Clone, Debug, Serialize)]
pub struct ConfinementReport {
    pub samples: usize,
    /// Sampled points of W(x) outside the squared stability region beyond
    /// tolerance; expected zero.
    pub escapes: usize,
    pub min_region_margin: f64,
    /// Points within the band of the boundary face carrying a largest
    /// entry above one.
    pub boundary_hits: usize,
    /// max over boundary hits of |Σy − Σx|; the entry-sum rigidity bound.
    pub worst_sum_gap: f64,
}

/// Residual band within which a point counts as lying on the boundary face.
const BOUNDARY_SEARCH_BAND: f64 = 1e-9;

/// Verifies that sampled points of W(x) stay in the squared stability
/// region, given x inside a symmetric convex subset of it described by
/// `subset`. Points landing on the boundary face with largest entry above
/// one (the tested points are the samples, x itself, and sum-preserving
/// contractions of the top two entries of x) must keep the entry sum of x.
pub fn confinement_check<C>(
    subset: C,
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ConfinementReport>
where
    C: Fn(&SquaredSpectrum) -> RegionVerdict,
{
    check_nonneg(x, "source vector")?;
    let x_spec = SquaredSpectrum::new(x.to_vec())?;
    if !subset(&x_spec).member {
        return Err(Error::Domain(
            "source vector lies outside the stated convex subset".into(),
        ));
    }
    let sum_x: f64 = x.iter().sum();
    let mut report = ConfinementReport {
        samples: 0,
        escapes: 0,
        min_region_margin: f64::INFINITY,
        boundary_hits: 0,
        worst_sum_gap: 0.0,
    };

    let mut drawn = sample_body(x, samples, seed)?;
    drawn.push(x.to_vec());
    let xs = sorted_descending(x);
    if xs.len() >= 2 && xs[0] > 1.0 {
        for tau in [0.25, 0.5, 0.75] {
            let mut z = xs.clone();
            let shift = tau * (xs[0] - xs[1]) / 2.0;
            z[0] -= shift;
            z[1] += shift;
            drawn.push(z);
        }
    }
    for y in &drawn {
        let spec = SquaredSpectrum::new(y.clone())?;
        let verdict = region::squared_stable(&spec);
        report.samples += 1;
        report.min_region_margin = report.min_region_margin.min(verdict.margin);
        if !verdict.member {
            report.escapes += 1;
            continue;
        }
        if let Some(residual) = gap_face_residual(spec.values()) {
            if residual.abs() <= BOUNDARY_SEARCH_BAND {
                let sum_hit: f64 = y.iter().sum();
                report.boundary_hits += 1;
                report.worst_sum_gap = report.worst_sum_gap.max((sum_hit - sum_x).abs());
            }
        }
    }
    Ok(report)
}

/// Residual proximity to the piece of the stability boundary carrying a
/// largest entry above one: (m−1) minus the inverse-gap sum, which vanishes
/// exactly on that face and is positive inside the region. The raw
/// membership margin is useless for this purpose: near the corner
/// (1, 1, a₃, …) it degenerates quadratically, so the band admits points
/// whose largest entry exceeds one by only ~√band while they sit far from
/// any boundary piece with a genuinely large entry. The pairwise product
/// face itself cannot carry such points inside W(x): a₁a₂ = 1 with a₁ > 1
/// forces a₁ + a₂ > 2, which weak majorization under x rules out.
fn gap_face_residual(sorted: &[f64]) -> Option<f64> {
    if sorted.len() < 2 || sorted[0] <= 1.0 || sorted[1] >= 1.0 {
        return None;
    }
    let gap_sum: f64 = sorted.iter().map(|&v| 1.0 / (1.0 - v)).sum();
    Some((sorted.len() - 1) as f64 - gap_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_majorization_examples() {
        assert!(weakly_majorized(&[1.0, 1.0, 0.0], &[2.0, 0.0, 0.0], 3).unwrap());
        assert!(!weakly_majorized(&[1.5, 0.4], &[1.4, 1.0], 1).unwrap());
        assert!(weakly_majorized(&[1.0, 0.8, 0.2], &[1.2, 0.8, 0.0], 3).unwrap());
        assert!(weakly_majorized(&[0.9, 0.1], &[0.9, 0.1], 2).unwrap());
        assert!(weakly_majorized(&[1.0], &[1.0, 0.0], 1).is_err());
        assert!(weakly_majorized(&[1.0, 0.0], &[1.0, 0.0], 3).is_err());
    }

    #[test]
    fn extreme_points_of_zero_vector_collapse() {
        let e = extreme_points(&[0.0, 0.0]).unwrap();
        assert_eq!(e.points.len(), 1);
        assert_eq!(e.points[0], vec![0.0, 0.0]);
    }

    #[test]
    fn extreme_points_of_two_distinct_values() {
        let e = extreme_points(&[2.0, 1.0]).unwrap();
        assert_eq!(e.points.len(), 7);
        let expect = [
            [2.0, 1.0],
            [1.0, 2.0],
            [2.0, 0.0],
            [0.0, 2.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [0.0, 0.0],
        ];
        for p in expect {
            assert!(e.points.contains(&p.to_vec()), "missing {p:?}");
        }
    }

    #[test]
    fn extreme_points_of_all_ones_are_binary_vectors() {
        let e = extreme_points(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(e.points.len(), 8);
    }

    #[test]
    fn enumeration_guard_triggers() {
        assert!(extreme_points(&[1.0; 9]).is_err());
    }

    #[test]
    fn hull_membership_examples() {
        assert!(hull_contains(&[2.0, 1.0], &[2.0, 1.0]).unwrap());
        assert!(hull_contains(&[2.0, 1.0], &[1.5, 1.5]).unwrap());
        assert!(!hull_contains(&[2.0, 1.0], &[1.9, 1.2]).unwrap());
        assert!(hull_contains(&[2.0, 1.0], &[0.0, 0.0]).unwrap());
        assert!(!hull_contains(&[2.0, 1.0], &[2.05, 0.0]).unwrap());
    }

    #[test]
    fn body_membership_examples() {
        assert!(body_contains(&[2.0, 1.0], &[0.0, 0.0]).unwrap());
        assert!(body_contains(&[2.0, 1.0], &[1.5, 1.5]).unwrap());
        assert!(!body_contains(&[2.0, 1.0], &[2.1, 0.0]).unwrap());
        assert!(!body_contains(&[2.0, 1.0], &[-0.5, 0.5]).unwrap());
    }

    #[test]
    fn agreement_on_small_grid() {
        let report = body_hull_agreement(
            &[2.0, 1.0],
            &SampleSpec::Grid {
                step: 0.25,
                hi: 2.2,
            },
        )
        .unwrap();
        assert_eq!(report.disagreements, 0, "{report:?}");
    }

    #[test]
    fn agreement_on_random_triples() {
        let report = body_hull_agreement(
            &[1.0, 1.0, 1.0],
            &SampleSpec::Random {
                count: 500,
                hi: 1.3,
                seed: 7,
            },
        )
        .unwrap();
        assert_eq!(report.disagreements, 0, "{report:?}");
    }

    #[test]
    fn monotone_bound_with_exponential_sum() {
        let f = |y: &[f64]| y.iter().map(|v| v.exp()).sum::<f64>();
        let report =
            monotone_convex_bound_check(f, |_| true, &[0.5, 0.5], 2000, 11).unwrap();
        assert_eq!(report.violations, 0, "{report:?}");
        assert_eq!(report.equality_mismatches, 0, "{report:?}");
        assert!(report.equality_cases > 0);
    }

    #[test]
    fn monotone_bound_rejects_domain_escape() {
        let f = |y: &[f64]| y.iter().sum::<f64>();
        // Domain that excludes part of the body.
        let result = monotone_convex_bound_check(
            f,
            |y: &[f64]| y.iter().all(|&v| v < 0.4),
            &[0.5, 0.3],
            100,
            3,
        );
        assert!(result.is_err());
    }

    #[test]
    fn confinement_inside_sum_cap() {
        let report =
            confinement_check(region::sum_cap, &[1.0, 1.0, 0.5], 1000, 17).unwrap();
        assert_eq!(report.escapes, 0, "{report:?}");
    }

    #[test]
    fn confinement_boundary_hits_keep_entry_sum() {
        let report =
            confinement_check(region::sum_cap, &[1.2, 0.8, 0.5], 1000, 23).unwrap();
        assert_eq!(report.escapes, 0, "{report:?}");
        assert!(report.boundary_hits > 0, "{report:?}");
        assert!(report.worst_sum_gap <= 1e-9, "{report:?}");
    }

    #[test]
    fn two_entry_bodies_never_reach_the_large_entry_face() {
        let report = confinement_check(region::sum_cap, &[1.6, 0.4], 1000, 23).unwrap();
        assert_eq!(report.escapes, 0, "{report:?}");
        assert_eq!(report.boundary_hits, 0, "{report:?}");
    }

    #[test]
    fn confinement_rejects_source_outside_subset() {
        assert!(confinement_check(region::sum_cap, &[3.0, 0.1], 10, 1).is_err());
    }

    #[test]
    fn monotone_closure_of_body() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = [1.3, 0.8, 0.2];
        for y in sample_body(&x, 200, 9).unwrap() {
            let z: Vec<f64> = y
                .iter()
                .map(|&v| v * rng.random_range(0.0..=1.0))
                .collect();
            assert!(body_contains(&x, &z).unwrap());
        }
    }
}
