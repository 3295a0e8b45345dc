//! Deterministic text serialization of traces, solver outcomes, and
//! variation profiles.
//!
//! Every float is printed with `{:e}`, which emits the shortest decimal
//! that parses back to the identical f64 (never more than 17 significant
//! digits). CSV output uses '.' decimals, ',' separators, '\n' line ends,
//! and a mandatory header row, so fixed inputs produce byte-identical
//! files on every platform.

use crate::error::{Error, Result};
use crate::grid::{map_to_json, GridMap, RegionField};
use crate::homotopy::{HomotopyTrace, InterpolantMu};
use crate::solver::{SolveOutcome, UniquenessReport};
use crate::variation::{AreaSample, VariationReport};

/// Shortest round-trip decimal form of one value.
pub fn float_field(x: f64) -> String {
    format!("{x:e}")
}

fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

/// CSV of per-node squared spectra along a trace: one row per active node
/// and sample, with partial sums and the chord interpolant's partial sums
/// between the endpoint spectra.
pub fn trace_csv(trace: &HomotopyTrace) -> Result<String> {
    let domain = trace.domain();
    let width = trace
        .spectrum_at(0, 0, 0)
        .map(|s| s.len())
        .or_else(|| {
            (0..domain.len())
                .map(|idx| domain.node(idx))
                .find(|&(i, j)| domain.is_active(i, j))
                .and_then(|(i, j)| trace.spectrum_at(0, i, j).map(|s| s.len()))
        })
        .ok_or_else(|| Error::InvalidInput("trace has no active nodes".into()))?;

    let mut header = vec!["node_i".to_string(), "node_j".to_string(), "t".to_string()];
    for l in 1..=width {
        header.push(format!("lambda_sq_{l}"));
    }
    for l in 1..=width {
        header.push(format!("partial_sum_{l}"));
    }
    for l in 1..=width {
        header.push(format!("mu_partial_{l}"));
    }
    let mut out = String::new();
    push_row(&mut out, &header);

    let last = trace.sample_count() - 1;
    for idx in 0..domain.len() {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            continue;
        }
        let mu = InterpolantMu::new(
            0.0,
            1.0,
            trace.spectrum_at(0, i, j).expect("active node").clone(),
            trace.spectrum_at(last, i, j).expect("active node").clone(),
        )?;
        for (s, &t) in trace.t_samples().iter().enumerate() {
            let spec = trace.spectrum_at(s, i, j).expect("active node");
            let mut fields = vec![i.to_string(), j.to_string(), float_field(t)];
            for &v in spec.values() {
                fields.push(float_field(v));
            }
            let mut acc = 0.0;
            for &v in spec.values() {
                acc += v;
                fields.push(float_field(acc));
            }
            let envelope = mu.eval(t);
            let mut acc = 0.0;
            for &v in &envelope {
                acc += v;
                fields.push(float_field(acc));
            }
            push_row(&mut out, &fields);
        }
    }
    Ok(out)
}

/// CSV of A(t) and its derivatives with the five-term breakdown. Endpoint
/// samples carry no second-derivative data; those fields stay empty.
pub fn variation_csv(samples: &[AreaSample], reports: &[VariationReport]) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        &[
            "t", "area", "dA", "d2A_analytic", "d2A_fd", "term_i", "term_ii", "term_iii",
            "term_iv", "term_v",
        ]
        .map(String::from),
    );
    for sample in samples {
        let report = reports.iter().find(|r| (r.t - sample.t).abs() < 1e-12);
        let mut fields = vec![
            float_field(sample.t),
            float_field(sample.area),
            float_field(sample.first_derivative),
        ];
        match (sample.second_analytic, sample.second_fd, report) {
            (Some(analytic), Some(fd), Some(r)) => {
                fields.push(float_field(analytic));
                fields.push(float_field(fd));
                for term in [r.term_i, r.term_ii, r.term_iii, r.term_iv, r.term_v] {
                    fields.push(float_field(term));
                }
            }
            _ => fields.extend(std::iter::repeat_n(String::new(), 7)),
        }
        push_row(&mut out, &fields);
    }
    out
}

/// CSV of per-node region verdicts with the squared spectrum and margin.
pub fn region_field_csv(map: &GridMap, field: &RegionField) -> Result<String> {
    let domain = map.domain();
    let width = map.manifold().dim().min(2);
    let mut header = vec!["node_i".to_string(), "node_j".to_string()];
    for l in 1..=width {
        header.push(format!("lambda_sq_{l}"));
    }
    header.extend(["member", "on_boundary", "margin"].map(String::from));
    let mut out = String::new();
    push_row(&mut out, &header);

    for idx in 0..domain.len() {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            continue;
        }
        let verdict = field.verdicts[idx]
            .as_ref()
            .ok_or_else(|| Error::Internal("active node without a verdict".into()))?;
        let squared = map.singular_spectrum(i, j)?.squared();
        let mut fields = vec![i.to_string(), j.to_string()];
        for &v in squared.values() {
            fields.push(float_field(v));
        }
        fields.push(verdict.member.to_string());
        fields.push(verdict.on_boundary.to_string());
        fields.push(float_field(verdict.margin));
        push_row(&mut out, &fields);
    }
    Ok(out)
}

fn map_value(map: &GridMap) -> Result<serde_json::Value> {
    serde_json::from_str(&map_to_json(map))
        .map_err(|e| Error::Internal(format!("map serialization round trip failed: {e}")))
}

/// Solve outcome as JSON, embedding the final map in the map file format.
pub fn solve_outcome_json(outcome: &SolveOutcome) -> Result<String> {
    let value = serde_json::json!({
        "converged": outcome.converged,
        "iterations": outcome.iterations,
        "final_residual": outcome.final_residual,
        "volume_history": outcome.volume_history,
        "map": map_value(&outcome.map)?,
    });
    serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Internal(format!("json encoding failed: {e}")))
}

/// Uniqueness experiment verdict as JSON. Per-run maps are summarized by
/// their convergence data; pairwise distance and region margins carry the
/// conclusion.
pub fn uniqueness_json(report: &UniquenessReport) -> Result<String> {
    let runs: Vec<serde_json::Value> = report
        .runs
        .iter()
        .map(|run| {
            serde_json::json!({
                "converged": run.converged,
                "iterations": run.iterations,
                "final_residual": run.final_residual,
                "graph_volume": run.volume_history.last(),
            })
        })
        .collect();
    let value = serde_json::json!({
        "conclusion": report.verdict,
        "in_region": report.in_region,
        "min_margin": report.min_margin,
        "max_pair_distance": report.max_pair_distance,
        "distance_tol": report.distance_tol,
        "runs": runs,
    });
    serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Internal(format!("json encoding failed: {e}")))
}

/// Any serializable report as pretty JSON.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("json encoding failed: {e}")))
}
