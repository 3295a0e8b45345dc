//! Geodesic homotopies between grid maps.
//!
//! Two maps with the same boundary values are joined per node by the
//! unique geodesic, giving a family {f_t} sampled at a fixed list of
//! times. The trace records every intermediate map, its squared singular
//! spectra, and the variation field V = df_t/dt from the closed-form
//! geodesic derivative rather than time differencing.
//!
//! On non-positively curved targets the partial sums of squared singular
//! values are convex in t, so on any sub-interval they sit below the
//! linear interpolant of their endpoint values. [`partial_sum_domination`]
//! measures the worst excess against that chord, [`fk_convexity`] checks
//! the frozen-frame energy sums directly, and [`confinement_check`] tests
//! whether endpoint membership in a convex region pins the whole trace
//! inside the stable region.

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{GridDomain, GridMap};
use crate::manifold::ModelManifold;
use crate::region::{self, RegionVerdict};
use crate::spectrum::SquaredSpectrum;
use crate::svd;

/// Largest boundary discrepancy tolerated between homotopy endpoints.
pub const BOUNDARY_MATCH_TOL: f64 = 1e-10;
/// Default time resolution of a trace.
pub const DEFAULT_T_SAMPLES: usize = 33;

/// Uniform sample times covering [0, 1] inclusive.
pub fn uniform_t_samples(count: usize) -> Vec<f64> {
    assert!(count >= 2, "a homotopy needs at least its two endpoints");
    (0..count)
        .map(|k| k as f64 / (count - 1) as f64)
        .collect()
}

/// A geodesic homotopy sampled in time.
///
/// Construction goes through [`build_homotopy`], which is the only way to
/// guarantee the invariants: endpoint maps reproduce `f0` and `f1`,
/// per-node speed is constant in t, and boundary nodes never move.
#[derive(Clone, Debug)]
pub struct HomotopyTrace {
    f0: GridMap,
    f1: GridMap,
    t_samples: Vec<f64>,
    maps: Vec<GridMap>,
    spectra: Vec<Vec<Option<SquaredSpectrum>>>,
    velocities: Vec<Vec<f64>>,
}

impl HomotopyTrace {
    pub fn f0(&self) -> &GridMap {
        &self.f0
    }

    pub fn f1(&self) -> &GridMap {
        &self.f1
    }

    pub fn domain(&self) -> &GridDomain {
        self.f0.domain()
    }

    pub fn manifold(&self) -> &ModelManifold {
        self.f0.manifold()
    }

    pub fn t_samples(&self) -> &[f64] {
        &self.t_samples
    }

    pub fn sample_count(&self) -> usize {
        self.t_samples.len()
    }

    pub fn map_at(&self, sample: usize) -> &GridMap {
        &self.maps[sample]
    }

    /// Squared spectrum at a sample and node; `None` on inactive nodes.
    pub fn spectrum_at(&self, sample: usize, i: usize, j: usize) -> Option<&SquaredSpectrum> {
        self.spectra[sample][self.domain().index(i, j)].as_ref()
    }

    /// Variation field at a sample and node, tangent at the node's value.
    /// Exactly zero on boundary and inactive nodes.
    pub fn velocity_at(&self, sample: usize, i: usize, j: usize) -> &[f64] {
        let stride = self.manifold().ambient_dim();
        let idx = self.domain().index(i, j) * stride;
        &self.velocities[sample][idx..idx + stride]
    }

    /// Index of a sample time, matched to 1e-12.
    pub fn sample_index(&self, t: f64) -> Result<usize> {
        self.t_samples
            .iter()
            .position(|s| (s - t).abs() < 1e-12)
            .ok_or_else(|| {
                Error::InvalidInput(format!("t = {t} is not one of the trace sample times"))
            })
    }
}

/// The chord through two squared spectra, evaluated on [t1, t2].
#[derive(Clone, Debug)]
pub struct InterpolantMu {
    pub t1: f64,
    pub t2: f64,
    pub a1: SquaredSpectrum,
    pub a2: SquaredSpectrum,
}

impl InterpolantMu {
    pub fn new(t1: f64, t2: f64, a1: SquaredSpectrum, a2: SquaredSpectrum) -> Result<Self> {
        if !(t1 < t2) {
            return Err(Error::InvalidInput(
                "interpolation interval must have t1 < t2".into(),
            ));
        }
        if a1.len() != a2.len() {
            return Err(Error::Dimension(
                "interpolation endpoints must have equal length".into(),
            ));
        }
        Ok(InterpolantMu { t1, t2, a1, a2 })
    }

    /// μ(t) entrywise; equals the endpoints at t1 and t2 and stays
    /// non-negative in between.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let span = self.t2 - self.t1;
        let w1 = (self.t2 - t) / span;
        let w2 = (t - self.t1) / span;
        self.a1
            .values()
            .iter()
            .zip(self.a2.values())
            .map(|(x, y)| w1 * x + w2 * y)
            .collect()
    }
}

/// Builds the sampled geodesic homotopy between two maps with matching
/// domain, target, and boundary values.
pub fn build_homotopy(f0: &GridMap, f1: &GridMap, t_samples: &[f64]) -> Result<HomotopyTrace> {
    if f0.domain() != f1.domain() {
        return Err(Error::InvalidInput(
            "homotopy endpoints live on different grids".into(),
        ));
    }
    if f0.manifold() != f1.manifold() {
        return Err(Error::InvalidInput(
            "homotopy endpoints map into different targets".into(),
        ));
    }
    if t_samples.len() < 2
        || t_samples.first() != Some(&0.0)
        || t_samples.last() != Some(&1.0)
        || t_samples.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidInput(
            "t samples must increase strictly from 0 to 1".into(),
        ));
    }

    let domain = f0.domain().clone();
    let manifold = *f0.manifold();
    let stride = manifold.ambient_dim();
    let mut boundary_gap = 0.0_f64;
    for (i, j) in domain.boundary_nodes() {
        boundary_gap = boundary_gap.max(manifold.distance(f0.value(i, j), f1.value(i, j)));
    }
    if boundary_gap > BOUNDARY_MATCH_TOL {
        return Err(Error::InvalidInput(format!(
            "boundary values disagree by {boundary_gap:.3e}, beyond {BOUNDARY_MATCH_TOL:.0e}"
        )));
    }

    let mut maps = Vec::with_capacity(t_samples.len());
    let mut spectra = Vec::with_capacity(t_samples.len());
    let mut velocities = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let per_node: Vec<(Vec<f64>, Vec<f64>)> = exec::map_indexed(domain.len(), |idx| {
            let (i, j) = domain.node(idx);
            if !domain.is_active(i, j) {
                return (vec![0.0; stride], vec![0.0; stride]);
            }
            let p = f0.value(i, j);
            let q = f1.value(i, j);
            let point = manifold.geodesic(p, q, t);
            let velocity = if domain.is_boundary(i, j) {
                vec![0.0; stride]
            } else {
                manifold.geodesic_velocity(p, q, t)
            };
            (point, velocity)
        });
        let mut values = vec![0.0; domain.len() * stride];
        let mut vel = vec![0.0; domain.len() * stride];
        for (idx, (point, velocity)) in per_node.into_iter().enumerate() {
            values[idx * stride..(idx + 1) * stride].copy_from_slice(&point);
            vel[idx * stride..(idx + 1) * stride].copy_from_slice(&velocity);
        }
        let map = GridMap::new(domain.clone(), manifold, values)?;
        let spec: Vec<Result<Option<SquaredSpectrum>>> = exec::map_indexed(domain.len(), |idx| {
            let (i, j) = domain.node(idx);
            if !domain.is_active(i, j) {
                return Ok(None);
            }
            Ok(Some(map.singular_spectrum(i, j)?.squared()))
        });
        let spec: Vec<Option<SquaredSpectrum>> =
            spec.into_iter().collect::<Result<Vec<_>>>()?;
        maps.push(map);
        spectra.push(spec);
        velocities.push(vel);
    }

    Ok(HomotopyTrace {
        f0: f0.clone(),
        f1: f1.clone(),
        t_samples: t_samples.to_vec(),
        maps,
        spectra,
        velocities,
    })
}

/// Worst chord excess of leading partial sums over a sub-interval.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DominationReport {
    pub l: usize,
    pub t1: f64,
    pub t2: f64,
    /// Node/sample pairs examined.
    pub samples_checked: usize,
    /// max over nodes and samples of Σ_{i≤l} λᵢ²(t) − Σ_{i≤l} μᵢ(t);
    /// non-positive means the chord dominates everywhere.
    pub worst_excess: f64,
    pub worst_node: (usize, usize),
    pub worst_t: f64,
    /// Largest squared singular value seen, for scaling tolerances.
    pub max_spectrum: f64,
}

/// Checks Σ_{i≤l} λᵢ²(t) against the per-node chord between the spectra at
/// t1 and t2, over every sample in [t1, t2].
pub fn partial_sum_domination(
    trace: &HomotopyTrace,
    l: usize,
    t1: f64,
    t2: f64,
) -> Result<DominationReport> {
    if l == 0 || l > 2 {
        return Err(Error::InvalidInput(
            "partial sum length must be 1 or 2 on a planar domain".into(),
        ));
    }
    let k1 = trace.sample_index(t1)?;
    let k2 = trace.sample_index(t2)?;
    if k1 >= k2 {
        return Err(Error::InvalidInput("need t1 < t2".into()));
    }

    struct NodeWorst {
        excess: f64,
        t: f64,
        node: (usize, usize),
        max_spectrum: f64,
        checked: usize,
    }

    let domain = trace.domain();
    let per_node: Vec<Option<NodeWorst>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        let a1 = trace.spectrum_at(k1, i, j)?;
        let a2 = trace.spectrum_at(k2, i, j)?;
        let span = t2 - t1;
        let mut worst = NodeWorst {
            excess: f64::NEG_INFINITY,
            t: t1,
            node: (i, j),
            max_spectrum: 0.0,
            checked: 0,
        };
        for k in k1..=k2 {
            let t = trace.t_samples[k];
            let lam = trace.spectrum_at(k, i, j)?;
            let w1 = (t2 - t) / span;
            let w2 = (t - t1) / span;
            let mut sum_lam = 0.0;
            let mut sum_mu = 0.0;
            for idx in 0..l {
                sum_lam += lam.values()[idx];
                sum_mu += w1 * a1.values()[idx] + w2 * a2.values()[idx];
            }
            worst.max_spectrum = worst.max_spectrum.max(lam.values()[0]);
            worst.checked += 1;
            let excess = sum_lam - sum_mu;
            if excess > worst.excess {
                worst.excess = excess;
                worst.t = t;
            }
        }
        Some(worst)
    });

    let mut report = DominationReport {
        l,
        t1,
        t2,
        samples_checked: 0,
        worst_excess: f64::NEG_INFINITY,
        worst_node: (0, 0),
        worst_t: t1,
        max_spectrum: 0.0,
    };
    for w in per_node.into_iter().flatten() {
        report.samples_checked += w.checked;
        report.max_spectrum = report.max_spectrum.max(w.max_spectrum);
        if w.excess > report.worst_excess {
            report.worst_excess = w.excess;
            report.worst_node = w.node;
            report.worst_t = w.t;
        }
    }
    Ok(report)
}

/// Minimum centered second difference of the frozen-frame energy sums.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConvexityReport {
    pub k: usize,
    /// Smallest second difference of F_k over all nodes and interior
    /// samples; convexity predicts ≥ 0 up to discretization noise.
    pub min_second_difference: f64,
    pub worst_node: (usize, usize),
    pub worst_t: f64,
    /// Largest F_k value, for scaling tolerances.
    pub max_fk: f64,
}

/// Evaluates F_k(t) = Σ_{i≤k} |df_t(aᵢ)|² per node, with the domain frame
/// {aᵢ} frozen to the singular directions at the midpoint sample, and
/// reports the least centered second difference in t.
pub fn fk_convexity(trace: &HomotopyTrace, k: usize) -> Result<ConvexityReport> {
    if k == 0 || k > 2 {
        return Err(Error::InvalidInput(
            "energy sum length must be 1 or 2 on a planar domain".into(),
        ));
    }
    if trace.sample_count() < 3 {
        return Err(Error::InvalidInput(
            "second differences need at least three samples".into(),
        ));
    }
    let mid = trace.sample_count() / 2;
    let domain = trace.domain();
    let times = trace.t_samples();

    struct NodeResult {
        min_dd: f64,
        t: f64,
        node: (usize, usize),
        max_fk: f64,
    }

    let per_node: Vec<Result<Option<NodeResult>>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return Ok(None);
        }
        let frozen = svd::full_svd(&trace.map_at(mid).jacobian(i, j)?.matrix)?;
        let axes: Vec<&[f64]> = frozen.right.iter().take(k).map(|a| a.as_slice()).collect();

        let fk: Vec<f64> = (0..trace.sample_count())
            .map(|s| {
                let jac = trace.map_at(s).jacobian(i, j)?;
                let mut total = 0.0;
                for a in &axes {
                    let mut sq = 0.0;
                    for row in 0..jac.matrix.nrows() {
                        let ja = jac.matrix[(row, 0)] * a[0] + jac.matrix[(row, 1)] * a[1];
                        sq += ja * ja;
                    }
                    total += sq;
                }
                Ok(total)
            })
            .collect::<Result<Vec<f64>>>()?;

        let mut out = NodeResult {
            min_dd: f64::INFINITY,
            t: times[mid],
            node: (i, j),
            max_fk: fk.iter().cloned().fold(0.0, f64::max),
        };
        for s in 1..fk.len() - 1 {
            let (ta, tb, tc) = (times[s - 1], times[s], times[s + 1]);
            let slope_right = (fk[s + 1] - fk[s]) / (tc - tb);
            let slope_left = (fk[s] - fk[s - 1]) / (tb - ta);
            let dd = 2.0 * (slope_right - slope_left) / (tc - ta);
            if dd < out.min_dd {
                out.min_dd = dd;
                out.t = tb;
            }
        }
        Ok(Some(out))
    });

    let mut report = ConvexityReport {
        k,
        min_second_difference: f64::INFINITY,
        worst_node: (0, 0),
        worst_t: times[mid],
        max_fk: 0.0,
    };
    for r in per_node {
        if let Some(r) = r? {
            report.max_fk = report.max_fk.max(r.max_fk);
            if r.min_dd < report.min_second_difference {
                report.min_second_difference = r.min_dd;
                report.worst_node = r.node;
                report.worst_t = r.t;
            }
        }
    }
    Ok(report)
}

/// Aggregate status of a confinement check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfinementStatus {
    /// Every node with both endpoint spectra in the given region kept its
    /// whole trace inside the stable region.
    Confined,
    /// Some hypothesis-satisfying node left the stable region.
    Violated,
    /// No node satisfied the endpoint hypothesis; nothing to claim.
    HypothesisUnmet,
}

/// Outcome of [`confinement_check`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConfinementSummary {
    pub status: ConfinementStatus,
    /// Active nodes examined.
    pub nodes_checked: usize,
    /// Nodes whose endpoint spectra both lie in the given region.
    pub hypothesis_nodes: usize,
    /// Node/sample pairs outside the stable region among hypothesis nodes.
    pub violation_count: usize,
    /// Smallest stable-region margin over hypothesis nodes and samples.
    pub worst_margin: f64,
    pub worst_node: (usize, usize),
    pub worst_t: f64,
    /// Hypothesis nodes that touch the stable-region boundary at an
    /// interior sample with leading squared singular value above 1; in
    /// the equality case these force a parallel variation field.
    pub degenerate_nodes: Vec<(usize, usize)>,
}

/// Tests whether endpoint membership in a convex sub-region pins every
/// intermediate spectrum inside the stable region. Nodes whose endpoints
/// leave the sub-region are skipped; they make no claim either way.
pub fn confinement_check<C>(trace: &HomotopyTrace, region: C) -> Result<ConfinementSummary>
where
    C: Fn(&SquaredSpectrum) -> RegionVerdict + Sync + Send,
{
    let domain = trace.domain();
    let last = trace.sample_count() - 1;

    struct NodeOutcome {
        node: (usize, usize),
        hypothesis: bool,
        violations: usize,
        worst_margin: f64,
        worst_t: f64,
        degenerate: bool,
    }

    let per_node: Vec<Option<NodeOutcome>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        let s0 = trace.spectrum_at(0, i, j)?;
        let s1 = trace.spectrum_at(last, i, j)?;
        let mut out = NodeOutcome {
            node: (i, j),
            hypothesis: region(s0).member && region(s1).member,
            violations: 0,
            worst_margin: f64::INFINITY,
            worst_t: 0.0,
            degenerate: false,
        };
        if !out.hypothesis {
            return Some(out);
        }
        for s in 0..trace.sample_count() {
            let spec = trace.spectrum_at(s, i, j)?;
            let verdict = region::squared_stable(spec);
            if !verdict.member {
                out.violations += 1;
            }
            if verdict.margin < out.worst_margin {
                out.worst_margin = verdict.margin;
                out.worst_t = trace.t_samples[s];
            }
            if s > 0 && s < last && verdict.on_boundary && spec.values()[0] > 1.0 {
                out.degenerate = true;
            }
        }
        Some(out)
    });

    let mut summary = ConfinementSummary {
        status: ConfinementStatus::HypothesisUnmet,
        nodes_checked: 0,
        hypothesis_nodes: 0,
        violation_count: 0,
        worst_margin: f64::INFINITY,
        worst_node: (0, 0),
        worst_t: 0.0,
        degenerate_nodes: Vec::new(),
    };
    for out in per_node.into_iter().flatten() {
        summary.nodes_checked += 1;
        if !out.hypothesis {
            continue;
        }
        summary.hypothesis_nodes += 1;
        summary.violation_count += out.violations;
        if out.worst_margin < summary.worst_margin {
            summary.worst_margin = out.worst_margin;
            summary.worst_node = out.node;
            summary.worst_t = out.worst_t;
        }
        if out.degenerate {
            summary.degenerate_nodes.push(out.node);
        }
    }
    summary.status = if summary.hypothesis_nodes == 0 {
        ConfinementStatus::HypothesisUnmet
    } else if summary.violation_count == 0 {
        ConfinementStatus::Confined
    } else {
        ConfinementStatus::Violated
    };
    Ok(summary)
}
