//! First and second variation of the graph volume along a homotopy.
//!
//! For each sampled time the volume A(t) of the graph of f_t satisfies
//! closed-form derivative identities in terms of the singular data of the
//! Jacobian and the covariant derivatives of the variation field V. The
//! second derivative splits into five integrated terms: two quadratic
//! forms in the diagonal and off-diagonal entries of the p-matrix, a sum
//! of squares over the complementary target frame, a geodesic diagnostic
//! that vanishes analytically, and a curvature quadratic. Their signs,
//! under the singular-value region hypotheses, are the engine behind the
//! uniqueness statement this crate exercises.
//!
//! Every integral here uses the same node quadrature as
//! [`GridMap::graph_volume`]: trapezoid weights times the local volume
//! density, reduced by an ordered pairwise sum so results are independent
//! of thread count.

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::GridMap;
use crate::homotopy::HomotopyTrace;
use crate::region;
use crate::svd;

/// Per-node inner products p_{iα} = ⟨∇_{df_t(aᵢ)}V, b_α⟩.
///
/// Rows follow the domain singular directions aᵢ, columns the target
/// frame: singular vectors b₁..b_r completed to an orthonormal basis by
/// deterministic Gram–Schmidt.
#[derive(Clone, Debug)]
pub struct PMatrix {
    /// 2 rows, target-dimension columns.
    pub entries: Vec<Vec<f64>>,
    /// Rank of the Jacobian at the node; sums in the variation terms run
    /// over i ≤ rank.
    pub rank: usize,
}

impl PMatrix {
    pub fn frobenius_sq(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|row| row.iter())
            .map(|x| x * x)
            .sum()
    }
}

/// Aggregate region verdicts for the spectra at one sample time.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpectraSummary {
    pub nodes: usize,
    /// Every λ²(t) lies in the closed stable region.
    pub all_in_stable_region: bool,
    pub min_stable_margin: f64,
    /// Every singular vector λ(t) lies in the closed singular-value
    /// region, the hypothesis under which the diagonal term is a square.
    pub all_in_singular_region: bool,
    /// Every pairwise product λᵢλⱼ is at most 1, the hypothesis for the
    /// off-diagonal term.
    pub all_pairwise_products_bounded: bool,
    pub max_lambda_sq: f64,
}

/// The five-term decomposition of d²A/dt² at one sample time.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VariationReport {
    pub t: f64,
    /// Diagonal p-entries quadratic form.
    pub term_i: f64,
    /// Off-diagonal p-entries quadratic form.
    pub term_ii: f64,
    /// Squares over the complementary target directions.
    pub term_iii: f64,
    /// Geodesic diagnostic ⟨∇_{bᵢ}∇_V V, bᵢ⟩: analytically zero, kept as
    /// a literal evaluation to expose discretization error.
    pub term_iv: f64,
    /// Curvature quadratic; vanishes for flat targets, non-negative for
    /// non-positively curved ones.
    pub term_v: f64,
    /// Sum of the five terms, the analytic d²A/dt².
    pub total: f64,
    /// Centered second difference of A(t) from the neighboring samples.
    pub fd_total: f64,
    pub spectra_summary: SpectraSummary,
}

/// A(t) and its derivatives at one sample.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AreaSample {
    pub t: f64,
    pub area: f64,
    /// Analytic dA/dt from the first variation identity.
    pub first_derivative: f64,
    /// Five-term total; absent at the endpoint samples.
    pub second_analytic: Option<f64>,
    /// Centered second difference of A; absent at the endpoint samples.
    pub second_fd: Option<f64>,
}

/// Outcome of the sign checks on one variation report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SignReport {
    pub tol: f64,
    /// `None` when the region hypothesis for the term is unmet, so no
    /// claim is made either way.
    pub term_i_ok: Option<bool>,
    pub term_ii_ok: Option<bool>,
    /// Unconditional: the term is a quadrature of squares.
    pub term_iii_ok: bool,
    pub term_v_ok: bool,
    pub total_ok: Option<bool>,
}

/// Stencil variants for covariant differencing along a grid axis. The
/// one-sided modes force a direction on nodes where both would work,
/// which only the stencil-order tests need.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) enum StencilMode {
    Auto,
    Forward,
    Backward,
}

/// Covariant derivative of a tangent field along one grid axis at (i, j):
/// neighbors are parallel-transported to the center before differencing,
/// with the same second-order one-sided fallbacks as the Jacobian.
pub(crate) fn axis_covariant_derivative<F>(
    map: &GridMap,
    field: &F,
    i: usize,
    j: usize,
    axis: usize,
    mode: StencilMode,
) -> Result<Vec<f64>>
where
    F: Fn(usize, usize) -> Vec<f64>,
{
    let domain = map.domain();
    let manifold = map.manifold();
    let center = map.value(i, j);
    let h = if axis == 0 { domain.hx() } else { domain.hy() };

    let shift = |step: isize| -> Option<(usize, usize)> {
        let (di, dj) = if axis == 0 { (step, 0) } else { (0, step) };
        let ii = i as isize + di;
        let jj = j as isize + dj;
        if ii < 0 || jj < 0 {
            return None;
        }
        let (ii, jj) = (ii as usize, jj as usize);
        if domain.is_active(ii, jj) {
            Some((ii, jj))
        } else {
            None
        }
    };
    let pulled = |at: (usize, usize)| -> Vec<f64> {
        manifold.transport(map.value(at.0, at.1), center, &field(at.0, at.1))
    };
    let missing = |dir: &str| {
        Error::InvalidInput(format!(
            "node ({i},{j}) lacks a {dir} stencil along axis {axis}"
        ))
    };

    let use_forward = match mode {
        StencilMode::Forward => true,
        StencilMode::Backward => false,
        StencilMode::Auto => match (shift(-1), shift(1)) {
            (Some(m1), Some(p1)) => {
                let vp = pulled(p1);
                let vm = pulled(m1);
                let out: Vec<f64> = vp
                    .iter()
                    .zip(&vm)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect();
                return Ok(manifold.project_tangent(center, &out));
            }
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (None, None) => return Err(missing("usable")),
        },
    };

    let v0 = field(i, j);
    let out: Vec<f64> = if use_forward {
        let p1 = shift(1).ok_or_else(|| missing("forward"))?;
        let p2 = shift(2).ok_or_else(|| missing("forward"))?;
        let v1 = pulled(p1);
        let v2 = pulled(p2);
        v0.iter()
            .zip(v1.iter().zip(&v2))
            .map(|(a, (b, c))| (-3.0 * a + 4.0 * b - c) / (2.0 * h))
            .collect()
    } else {
        let m1 = shift(-1).ok_or_else(|| missing("backward"))?;
        let m2 = shift(-2).ok_or_else(|| missing("backward"))?;
        let v1 = pulled(m1);
        let v2 = pulled(m2);
        v0.iter()
            .zip(v1.iter().zip(&v2))
            .map(|(a, (b, c))| (3.0 * a - 4.0 * b + c) / (2.0 * h))
            .collect()
    };
    Ok(map.manifold().project_tangent(center, &out))
}

/// Singular data and quadrature weight of one node at one sample.
struct NodeData {
    value: Vec<f64>,
    frame: Vec<Vec<f64>>,
    /// Two singular values, descending, zero-padded.
    lambda: Vec<f64>,
    rank: usize,
    /// Right singular vectors, domain coordinates.
    a: Vec<Vec<f64>>,
    /// Completed left singular basis, target frame coordinates.
    b: Vec<Vec<f64>>,
    /// Trapezoid weight times local volume density.
    weight: f64,
}

fn node_data(map: &GridMap, i: usize, j: usize) -> Result<NodeData> {
    let jac = map.jacobian(i, j)?;
    let decomposition = svd::full_svd(&jac.matrix)?;
    let mut lambda = decomposition.singular.clone();
    lambda.resize(2, 0.0);
    let value = map.value(i, j).to_vec();
    let frame = map.manifold().frame(&value);
    let weight = map.domain().quadrature_weight(i, j) * map.volume_density(i, j)?;
    Ok(NodeData {
        value,
        frame,
        lambda,
        rank: decomposition.rank.min(2),
        a: decomposition.right,
        b: decomposition.left,
        weight,
    })
}

/// ∇_{df_t(aᵢ)} of a tangent field at one node, ambient coordinates, one
/// vector per singular direction.
fn directional_derivatives<F>(
    map: &GridMap,
    data: &NodeData,
    field: &F,
    i: usize,
    j: usize,
) -> Result<[Vec<f64>; 2]>
where
    F: Fn(usize, usize) -> Vec<f64>,
{
    let dx = axis_covariant_derivative(map, field, i, j, 0, StencilMode::Auto)?;
    let dy = axis_covariant_derivative(map, field, i, j, 1, StencilMode::Auto)?;
    let combine = |a: &[f64]| -> Vec<f64> {
        dx.iter()
            .zip(&dy)
            .map(|(x, y)| a[0] * x + a[1] * y)
            .collect()
    };
    Ok([combine(&data.a[0]), combine(&data.a[1])])
}

/// Covariant derivatives ∇_{df_t(aᵢ)}V per node at one sample time, in
/// ambient coordinates; `None` on inactive nodes. The directions aᵢ are
/// the singular directions of the Jacobian at that node and time.
pub fn covariant_derivative_field(
    trace: &HomotopyTrace,
    t: f64,
) -> Result<Vec<Option<[Vec<f64>; 2]>>> {
    let s = trace.sample_index(t)?;
    let map = trace.map_at(s);
    let domain = trace.domain();
    let results: Vec<Result<Option<[Vec<f64>; 2]>>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return Ok(None);
        }
        let data = node_data(map, i, j)?;
        let field = |a: usize, b: usize| trace.velocity_at(s, a, b).to_vec();
        Ok(Some(directional_derivatives(map, &data, &field, i, j)?))
    });
    results.into_iter().collect()
}

fn p_from_derivatives(map: &GridMap, data: &NodeData, grad: &[Vec<f64>; 2]) -> PMatrix {
    let n = map.manifold().dim();
    let mut entries = vec![vec![0.0; n]; 2];
    for (row, g) in grad.iter().enumerate() {
        let coords = map
            .manifold()
            .to_frame_coords(&data.value, &data.frame, g);
        for alpha in 0..n {
            entries[row][alpha] = coords.iter().zip(&data.b[alpha]).map(|(x, y)| x * y).sum();
        }
    }
    PMatrix {
        entries,
        rank: data.rank,
    }
}

/// p-matrices per node at one sample time; `None` on inactive nodes.
pub fn p_matrix(trace: &HomotopyTrace, t: f64) -> Result<Vec<Option<PMatrix>>> {
    let s = trace.sample_index(t)?;
    let map = trace.map_at(s);
    let domain = trace.domain();
    let results: Vec<Result<Option<PMatrix>>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return Ok(None);
        }
        let data = node_data(map, i, j)?;
        let field = |a: usize, b: usize| trace.velocity_at(s, a, b).to_vec();
        let grad = directional_derivatives(map, &data, &field, i, j)?;
        Ok(Some(p_from_derivatives(map, &data, &grad)))
    });
    results.into_iter().collect()
}

/// The three p-quadratic integrands from one node's singular data:
/// diagonal form, off-diagonal form, and complementary squares.
pub(crate) fn p_quadratic_terms(lambda: &[f64], rank: usize, p: &[Vec<f64>]) -> [f64; 3] {
    let n = p.first().map(|row| row.len()).unwrap_or(0);
    let mut diagonal = 0.0;
    for i in 0..rank {
        let d = 1.0 + lambda[i] * lambda[i];
        diagonal += p[i][i] * p[i][i] / (d * d);
    }
    for i in 0..rank {
        for j in 0..rank {
            if i == j {
                continue;
            }
            let di = 1.0 + lambda[i] * lambda[i];
            let dj = 1.0 + lambda[j] * lambda[j];
            diagonal += lambda[i] * lambda[j] * p[i][i] * p[j][j] / (di * dj);
        }
    }

    let mut off_diagonal = 0.0;
    for i in 0..rank {
        for j in (i + 1)..rank {
            let di = 1.0 + lambda[i] * lambda[i];
            let dj = 1.0 + lambda[j] * lambda[j];
            off_diagonal += (p[i][j] * p[i][j] + p[j][i] * p[j][i]
                - 2.0 * lambda[i] * lambda[j] * p[i][j] * p[j][i])
                / (di * dj);
        }
    }

    let mut complementary = 0.0;
    for i in 0..rank {
        let d = 1.0 + lambda[i] * lambda[i];
        for alpha in rank..n {
            complementary += p[i][alpha] * p[i][alpha] / d;
        }
    }
    [diagonal, off_diagonal, complementary]
}

fn quadrature_area(map: &GridMap) -> Result<f64> {
    let domain = map.domain();
    let cells: Vec<Result<f64>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return Ok(0.0);
        }
        let w = domain.quadrature_weight(i, j);
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * map.volume_density(i, j)?)
    });
    let cells = cells.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(exec::pairwise_sum(&cells))
}

/// Weights of the three-point second-derivative rule on possibly
/// non-uniform abscissae.
fn second_difference_weights(ta: f64, tb: f64, tc: f64) -> (f64, f64, f64) {
    let wa = 2.0 / ((tb - ta) * (tc - ta));
    let wb = -2.0 / ((tc - tb) * (tb - ta));
    let wc = 2.0 / ((tc - tb) * (tc - ta));
    (wa, wb, wc)
}

/// The geodesic acceleration field ∇_V V at sample `s`, one ambient vector
/// per node: a tangent-projected second time difference of the node path.
fn acceleration_field(trace: &HomotopyTrace, s: usize) -> Vec<Vec<f64>> {
    let domain = trace.domain();
    let manifold = trace.manifold();
    let stride = manifold.ambient_dim();
    let times = trace.t_samples();
    let (wa, wb, wc) = second_difference_weights(times[s - 1], times[s], times[s + 1]);
    exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return vec![0.0; stride];
        }
        let pa = trace.map_at(s - 1).value(i, j);
        let pb = trace.map_at(s).value(i, j);
        let pc = trace.map_at(s + 1).value(i, j);
        let raw: Vec<f64> = (0..stride)
            .map(|c| wa * pa[c] + wb * pb[c] + wc * pc[c])
            .collect();
        manifold.project_tangent(pb, &raw)
    })
}

fn spectra_summary(trace: &HomotopyTrace, s: usize) -> SpectraSummary {
    let domain = trace.domain();
    let mut summary = SpectraSummary {
        nodes: 0,
        all_in_stable_region: true,
        min_stable_margin: f64::INFINITY,
        all_in_singular_region: true,
        all_pairwise_products_bounded: true,
        max_lambda_sq: 0.0,
    };
    for j in 0..domain.ny() {
        for i in 0..domain.nx() {
            if !domain.is_active(i, j) {
                continue;
            }
            let spec = trace.spectrum_at(s, i, j).expect("active node spectrum");
            summary.nodes += 1;
            let stable = region::squared_stable(spec);
            summary.all_in_stable_region &= stable.member;
            summary.min_stable_margin = summary.min_stable_margin.min(stable.margin);
            summary.all_in_singular_region &= region::stable_region(&spec.sqrt(), true).member;
            let v = spec.values();
            if v.len() >= 2 {
                summary.all_pairwise_products_bounded &= v[0] * v[1] <= 1.0 + 1e-12;
            }
            summary.max_lambda_sq = summary.max_lambda_sq.max(v[0]);
        }
    }
    summary
}

fn variation_terms_at_sample(trace: &HomotopyTrace, s: usize) -> Result<VariationReport> {
    if s == 0 || s + 1 == trace.sample_count() {
        return Err(Error::InvalidInput(
            "the second variation needs an interior sample with both neighbors".into(),
        ));
    }
    let map = trace.map_at(s);
    let domain = trace.domain();
    let manifold = trace.manifold();
    let accel = acceleration_field(trace, s);

    struct NodeTerms {
        t1: f64,
        t2: f64,
        t3: f64,
        t4: f64,
        t5: f64,
    }

    let per_node: Vec<Result<NodeTerms>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return Ok(NodeTerms {
                t1: 0.0,
                t2: 0.0,
                t3: 0.0,
                t4: 0.0,
                t5: 0.0,
            });
        }
        let data = node_data(map, i, j)?;
        let velocity = |a: usize, b: usize| trace.velocity_at(s, a, b).to_vec();
        let grad = directional_derivatives(map, &data, &velocity, i, j)?;
        let p = p_from_derivatives(map, &data, &grad);
        let [diagonal, off_diagonal, complementary] =
            p_quadratic_terms(&data.lambda, p.rank, &p.entries);

        let accel_view = |a: usize, b: usize| accel[domain.index(a, b)].clone();
        let accel_grad = directional_derivatives(map, &data, &accel_view, i, j)?;
        let mut geodesic_diag = 0.0;
        let mut curvature = 0.0;
        let v_ambient = trace.velocity_at(s, i, j);
        for i_dir in 0..p.rank {
            let li = data.lambda[i_dir];
            let b_ambient = manifold.from_frame_coords(&data.frame, &data.b[i_dir]);
            let coords =
                manifold.to_frame_coords(&data.value, &data.frame, &accel_grad[i_dir]);
            let along_b: f64 = coords.iter().zip(&data.b[i_dir]).map(|(x, y)| x * y).sum();
            geodesic_diag += li / (1.0 + li * li) * along_b;
            curvature += li * li / (1.0 + li * li)
                * manifold.curvature_quadratic(&data.value, &b_ambient, v_ambient);
        }

        Ok(NodeTerms {
            t1: data.weight * diagonal,
            t2: data.weight * off_diagonal,
            t3: data.weight * complementary,
            t4: data.weight * geodesic_diag,
            t5: data.weight * curvature,
        })
    });
    let per_node = per_node.into_iter().collect::<Result<Vec<NodeTerms>>>()?;

    let collect = |pick: &dyn Fn(&NodeTerms) -> f64| -> f64 {
        let xs: Vec<f64> = per_node.iter().map(pick).collect();
        exec::pairwise_sum(&xs)
    };
    let term_i = collect(&|n| n.t1);
    let term_ii = collect(&|n| n.t2);
    let term_iii = collect(&|n| n.t3);
    let term_iv = collect(&|n| n.t4);
    let term_v = collect(&|n| n.t5);

    let times = trace.t_samples();
    let (wa, wb, wc) = second_difference_weights(times[s - 1], times[s], times[s + 1]);
    let fd_total = wa * quadrature_area(trace.map_at(s - 1))?
        + wb * quadrature_area(trace.map_at(s))?
        + wc * quadrature_area(trace.map_at(s + 1))?;

    Ok(VariationReport {
        t: times[s],
        term_i,
        term_ii,
        term_iii,
        term_iv,
        term_v,
        total: term_i + term_ii + term_iii + term_iv + term_v,
        fd_total,
        spectra_summary: spectra_summary(trace, s),
    })
}

/// Evaluates the five-term decomposition of d²A/dt² at an interior sample
/// time, alongside the finite-difference cross-check.
pub fn second_variation_terms(trace: &HomotopyTrace, t: f64) -> Result<VariationReport> {
    variation_terms_at_sample(trace, trace.sample_index(t)?)
}

/// First variation integrand at one sample: Σᵢ λᵢ pᵢᵢ/(1+λᵢ²) integrated
/// with the graph-volume quadrature.
fn first_derivative_at_sample(trace: &HomotopyTrace, s: usize) -> Result<f64> {
    let map = trace.map_at(s);
    let domain = trace.domain();
    let per_node: Vec<Result<f64>> = exec::map_indexed(domain.len(), |idx| {
        let (i, j) = domain.node(idx);
        if !domain.is_active(i, j) {
            return Ok(0.0);
        }
        let data = node_data(map, i, j)?;
        let velocity = |a: usize, b: usize| trace.velocity_at(s, a, b).to_vec();
        let grad = directional_derivatives(map, &data, &velocity, i, j)?;
        let p = p_from_derivatives(map, &data, &grad);
        let mut integrand = 0.0;
        for i_dir in 0..p.rank {
            let li = data.lambda[i_dir];
            integrand += li * p.entries[i_dir][i_dir] / (1.0 + li * li);
        }
        Ok(data.weight * integrand)
    });
    let per_node = per_node.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(exec::pairwise_sum(&per_node))
}

/// A(t), dA/dt, and both versions of d²A/dt² at every sample of the trace.
pub fn area_derivatives(trace: &HomotopyTrace) -> Result<Vec<AreaSample>> {
    if trace.sample_count() < 5 {
        return Err(Error::InvalidInput(
            "area derivatives need at least five samples".into(),
        ));
    }
    let times = trace.t_samples().to_vec();
    let areas: Vec<f64> = (0..times.len())
        .map(|s| quadrature_area(trace.map_at(s)))
        .collect::<Result<Vec<f64>>>()?;

    let mut out = Vec::with_capacity(times.len());
    for (s, &t) in times.iter().enumerate() {
        let first_derivative = first_derivative_at_sample(trace, s)?;
        let (second_analytic, second_fd) = if s == 0 || s + 1 == times.len() {
            (None, None)
        } else {
            let report = variation_terms_at_sample(trace, s)?;
            let (wa, wb, wc) = second_difference_weights(times[s - 1], t, times[s + 1]);
            let fd = wa * areas[s - 1] + wb * areas[s] + wc * areas[s + 1];
            (Some(report.total), Some(fd))
        };
        out.push(AreaSample {
            t,
            area: areas[s],
            first_derivative,
            second_analytic,
            second_fd,
        });
    }
    Ok(out)
}

/// Applies the sign conditions to one report. Checks whose region
/// hypothesis fails are reported as `None` rather than asserted.
pub fn sign_report(report: &VariationReport, tol: f64) -> SignReport {
    let summary = &report.spectra_summary;
    SignReport {
        tol,
        term_i_ok: summary
            .all_in_singular_region
            .then(|| report.term_i >= -tol),
        term_ii_ok: summary
            .all_pairwise_products_bounded
            .then(|| report.term_ii >= -tol),
        term_iii_ok: report.term_iii >= 0.0,
        term_v_ok: report.term_v >= -tol,
        total_ok: summary
            .all_in_stable_region
            .then(|| report.total >= -tol),
    }
}
