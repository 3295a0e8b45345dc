//! Dirichlet solvers for discrete minimal maps.
//!
//! Euclidean targets: Picard iteration on the divergence-form system. The
//! outer loop freezes the coefficient tensor √g·g^{ij} from the current
//! iterate; inner red-black SOR sweeps relax each component of the
//! resulting linear equation. The residual that drives convergence is the
//! fully nonlinear [`GridMap::ms_residual`], built from the same stencil.
//!
//! Hyperbolic targets: Riemannian gradient descent on the graph volume.
//! Per-node gradients come from central differences of the local volume in
//! tangent frame coordinates; updates go through the exponential map with
//! Armijo backtracking, so the volume history never increases.
//!
//! Non-convergence is data: solvers report it in [`SolveOutcome`] instead
//! of erroring, so callers can still inspect the partial result.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::{DivergenceStencil, GridDomain, GridMap, MapData, MetricCoeff};
use crate::region::RegionVerdict;
use crate::spectrum::SquaredSpectrum;

/// Node-movement threshold that ends harmonic-extension iterations.
const EXTENSION_TOL: f64 = 1e-11;
/// Sweep cap for harmonic extension.
const EXTENSION_MAX_SWEEPS: usize = 50_000;
/// Step size for tangent-space central differences of the volume.
const VOLUME_FD_STEP: f64 = 1e-5;
/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Smallest line-search step before giving up.
const MIN_LINE_STEP: f64 = 1e-13;

/// Knobs for both solver families.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Outer iterations (coefficient refreshes or descent steps).
    pub max_outer: usize,
    /// Linear relaxation sweeps per outer iteration (Euclidean mode).
    pub inner_sweeps: usize,
    /// SOR relaxation factor in (0, 2).
    pub sor_omega: f64,
    /// Convergence threshold: max-norm of the nonlinear residual
    /// (Euclidean) or of the volume gradient (hyperbolic).
    pub tol_residual: f64,
    /// Blend factor in (0, 1] for outer coefficient updates; 1 replaces
    /// them outright, smaller values damp steep data.
    pub damping: f64,
    /// Seed for the perturbed initialization of uniqueness runs.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_outer: 200,
            inner_sweeps: 50,
            sor_omega: 1.5,
            tol_residual: 1e-8,
            damping: 1.0,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return Err(Error::InvalidInput(
                "SOR relaxation factor must lie in (0, 2)".into(),
            ));
        }
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidInput("residual tolerance must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput("damping must lie in (0, 1]".into()));
        }
        if self.max_outer == 0 || self.inner_sweeps == 0 {
            return Err(Error::InvalidInput(
                "iteration counts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one solve, converged or not.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub map: GridMap,
    pub converged: bool,
    /// Outer iterations actually performed.
    pub iterations: usize,
    /// Max-norm of the residual (or gradient) at exit.
    pub final_residual: f64,
    /// Graph volume after each outer iteration.
    pub volume_history: Vec<f64>,
}

/// Extends boundary data to the whole grid: discrete harmonic interior for
/// Euclidean targets, iterated geodesic averaging for hyperbolic ones.
/// Interior values present in `data` are ignored; the extension is a pure
/// function of the boundary.
pub fn harmonic_extension(data: &MapData) -> Result<GridMap> {
    if !data.covers_boundary() {
        return Err(Error::InvalidInput(
            "boundary data is incomplete: some boundary nodes are null".into(),
        ));
    }
    let domain = data.domain.clone();
    let manifold = data.manifold;
    let stride = manifold.ambient_dim();

    // Seed interior nodes with the Euclidean average of the boundary
    // values, projected back onto the target.
    let boundary = domain.boundary_nodes();
    let mut mean = vec![0.0; stride];
    for &(i, j) in &boundary {
        let v = data.values[domain.index(i, j)]
            .as_ref()
            .expect("boundary coverage checked above");
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= boundary.len() as f64;
    }
    let seed_point = manifold.project_point(&mean);

    let mut values = vec![0.0; domain.len() * stride];
    for j in 0..domain.ny() {
        for i in 0..domain.nx() {
            if !domain.is_active(i, j) {
                continue;
            }
            let idx = domain.index(i, j);
            let v = if domain.is_boundary(i, j) {
                data.values[idx].as_ref().expect("boundary covered").clone()
            } else {
                seed_point.clone()
            };
            values[idx * stride..(idx + 1) * stride].copy_from_slice(&v);
        }
    }

    if manifold.is_euclidean() {
        // Identity coefficients turn the divergence stencil into the
        // 5-point Laplacian; relax until the iterate stops moving.
        let coeffs = vec![
            MetricCoeff {
                xx: 1.0,
                xy: 0.0,
                yy: 1.0
            };
            domain.len()
        ];
        let mut scale = 1.0_f64;
        for v in values.iter() {
            scale = scale.max(v.abs());
        }
        for _ in 0..EXTENSION_MAX_SWEEPS {
            let moved = relaxation_sweep(&domain, &coeffs, &mut values, stride, 1.8);
            if moved < EXTENSION_TOL * scale {
                break;
            }
        }
    } else {
        for _ in 0..EXTENSION_MAX_SWEEPS {
            let moved = geodesic_mean_sweep(&domain, &manifold, &mut values);
            if moved < EXTENSION_TOL {
                break;
            }
        }
    }
    GridMap::new(domain, manifold, values)
}

/// One red-black SOR pass over all interior nodes and components; returns
/// the largest absolute value change.
fn relaxation_sweep(
    domain: &GridDomain,
    coeffs: &[MetricCoeff],
    values: &mut [f64],
    stride: usize,
    omega: f64,
) -> f64 {
    let stencil = DivergenceStencil { domain, coeffs };
    let mut moved = 0.0_f64;
    for color in 0..2usize {
        let snapshot = values.to_vec();
        let updates: Vec<Option<Vec<f64>>> = exec::map_indexed(domain.len(), |idx| {
            let (i, j) = domain.node(idx);
            if (i + j) % 2 != color
                || !domain.is_interior(i, j)
                || !domain.has_full_neighborhood(i, j)
            {
                return None;
            }
            let diag = stencil.diagonal(i, j);
            let mut out = Vec::with_capacity(stride);
            for alpha in 0..stride {
                let u = |a: usize, b: usize| snapshot[domain.index(a, b) * stride + alpha];
                let r = stencil.apply(&u, i, j);
                out.push(snapshot[idx * stride + alpha] - omega * r / diag);
            }
            Some(out)
        });
        for (idx, upd) in updates.into_iter().enumerate() {
            if let Some(new_vals) = upd {
                for (alpha, nv) in new_vals.into_iter().enumerate() {
                    let slot = &mut values[idx * stride + alpha];
                    moved = moved.max((nv - *slot).abs());
                    *slot = nv;
                }
            }
        }
    }
    moved
}

/// One red-black pass of geodesic averaging: each interior node moves to
/// the exponential of the mean logarithm of its four neighbors. Returns
/// the largest geodesic movement.
fn geodesic_mean_sweep(
    domain: &GridDomain,
    manifold: &crate::manifold::ModelManifold,
    values: &mut [f64],
) -> f64 {
    let stride = manifold.ambient_dim();
    let mut moved = 0.0_f64;
    for color in 0..2usize {
        let snapshot = values.to_vec();
        let updates: Vec<Option<Vec<f64>>> = exec::map_indexed(domain.len(), |idx| {
            let (i, j) = domain.node(idx);
            if (i + j) % 2 != color || !domain.is_interior(i, j) {
                return None;
            }
            let at = |a: usize, b: usize| -> &[f64] {
                let k = domain.index(a, b) * stride;
                &snapshot[k..k + stride]
            };
            let p = at(i, j);
            let mut mean = vec![0.0; stride];
            for (a, b) in [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)] {
                let w = manifold.log(p, at(a, b));
                for (m, x) in mean.iter_mut().zip(&w) {
                    *m += 0.25 * x;
                }
            }
            Some(manifold.exp(p, &mean))
        });
        for (idx, upd) in updates.into_iter().enumerate() {
            if let Some(nv) = upd {
                let slot = &mut values[idx * stride..(idx + 1) * stride];
                moved = moved.max(manifold.distance(slot, &nv));
                slot.copy_from_slice(&nv);
            }
        }
    }
    moved
}

/// Picard/SOR solve of the minimal surface system for Euclidean targets.
///
/// Boundary data is taken from `init`'s boundary nodes and never touched.
pub fn solve_euclidean(init: &GridMap, opts: &SolverOptions) -> Result<SolveOutcome> {
    opts.validate()?;
    if !init.manifold().is_euclidean() {
        return Err(Error::InvalidInput(
            "the Picard solver needs a euclidean target".into(),
        ));
    }
    let domain = init.domain().clone();
    let manifold = *init.manifold();
    let stride = manifold.ambient_dim();

    let mut map = init.clone();
    let mut coeffs = map.metric_coefficients()?;
    let mut residual_history: Vec<f64> = Vec::new();
    let mut volume_history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut final_residual = f64::INFINITY;
    let mut iterations = 0;

    for outer in 0..opts.max_outer {
        iterations = outer + 1;
        let fresh = map.metric_coefficients()?;
        if opts.damping < 1.0 && outer > 0 {
            for (c, f) in coeffs.iter_mut().zip(&fresh) {
                c.xx += opts.damping * (f.xx - c.xx);
                c.xy += opts.damping * (f.xy - c.xy);
                c.yy += opts.damping * (f.yy - c.yy);
            }
        } else {
            coeffs = fresh;
        }

        let mut values = map.values_flat().to_vec();
        for _ in 0..opts.inner_sweeps {
            relaxation_sweep(&domain, &coeffs, &mut values, stride, opts.sor_omega);
        }
        map = GridMap::new(domain.clone(), manifold, values)?;

        let residual = map
            .ms_residual()?
            .into_iter()
            .fold(0.0_f64, f64::max);
        residual_history.push(residual);
        volume_history.push(map.graph_volume()?);
        final_residual = residual;

        if residual <= opts.tol_residual {
            converged = true;
            break;
        }
        if outer >= 20 && residual > 10.0 * residual_history[outer - 20] {
            break;
        }
    }

    Ok(SolveOutcome {
        map,
        converged,
        iterations,
        final_residual,
        volume_history,
    })
}

/// Gradient contribution of one interior node: frame-coordinate gradient,
/// the ambient descent direction (diagonally preconditioned), and the
/// expected decrease rate ⟨grad, −dir⟩.
struct NodeGradient {
    i: usize,
    j: usize,
    grad_inf: f64,
    direction: Vec<f64>,
    decrease: f64,
}

fn node_volume_gradient(map: &GridMap, i: usize, j: usize) -> Result<NodeGradient> {
    let domain = map.domain();
    let manifold = map.manifold();
    let p = map.value(i, j).to_vec();
    let frame = manifold.frame(&p);

    // Only densities on the axis cross of radius 2 around (i, j) can react
    // to this node's value (stencils reach two nodes along an axis, and
    // every log is based at the node it differentiates).
    let mut affected: Vec<(usize, usize, f64)> = Vec::with_capacity(9);
    for (di, dj) in [
        (0i32, 0i32),
        (-1, 0),
        (1, 0),
        (0, -1),
        (0, 1),
        (-2, 0),
        (2, 0),
        (0, -2),
        (0, 2),
    ] {
        let a = i as i32 + di;
        let b = j as i32 + dj;
        if a < 0 || b < 0 {
            continue;
        }
        let (a, b) = (a as usize, b as usize);
        if map.domain().is_active(a, b) {
            let w = domain.quadrature_weight(a, b);
            if w > 0.0 {
                affected.push((a, b, w));
            }
        }
    }

    let mut scratch = map.clone();
    let local = |m: &GridMap| -> Result<f64> {
        let mut e = 0.0;
        for &(a, b, w) in &affected {
            e += w * m.volume_density(a, b)?;
        }
        Ok(e)
    };

    let e0 = local(map)?;
    let n = manifold.dim();
    let mut grad = vec![0.0; n];
    let mut diag = vec![0.0; n];
    for alpha in 0..n {
        let dir: Vec<f64> = frame[alpha].iter().map(|x| x * VOLUME_FD_STEP).collect();
        let plus = manifold.exp(&p, &dir);
        scratch.set_value(i, j, &plus);
        let ep = local(&scratch)?;
        let neg: Vec<f64> = dir.iter().map(|x| -x).collect();
        let minus = manifold.exp(&p, &neg);
        scratch.set_value(i, j, &minus);
        let em = local(&scratch)?;
        scratch.set_value(i, j, &p);
        grad[alpha] = (ep - em) / (2.0 * VOLUME_FD_STEP);
        diag[alpha] = (ep - 2.0 * e0 + em) / (VOLUME_FD_STEP * VOLUME_FD_STEP);
    }

    let diag_floor = 1e-6;
    let mut direction = vec![0.0; manifold.ambient_dim()];
    let mut decrease = 0.0;
    let mut grad_inf = 0.0_f64;
    for alpha in 0..n {
        grad_inf = grad_inf.max(grad[alpha].abs());
        let step = -grad[alpha] / diag[alpha].max(diag_floor);
        decrease += -grad[alpha] * step;
        for (d, f) in direction.iter_mut().zip(&frame[alpha]) {
            *d += step * f;
        }
    }
    Ok(NodeGradient {
        i,
        j,
        grad_inf,
        direction,
        decrease,
    })
}

/// Volume-descent solve for hyperbolic targets.
pub fn solve_hyperbolic(init: &GridMap, opts: &SolverOptions) -> Result<SolveOutcome> {
    opts.validate()?;
    if init.manifold().is_euclidean() {
        return Err(Error::InvalidInput(
            "the volume-descent solver needs a hyperbolic target".into(),
        ));
    }
    let manifold = *init.manifold();
    let interior = init.domain().interior_nodes();

    let mut map = init.clone();
    let mut volume = map.graph_volume()?;
    let mut volume_history = vec![volume];
    let mut converged = false;
    let mut final_residual = f64::INFINITY;
    let mut iterations = 0;
    let mut step = 1.0_f64;

    for outer in 0..opts.max_outer {
        iterations = outer + 1;
        let grads: Vec<Result<NodeGradient>> =
            exec::map_slice(&interior, |&(i, j)| node_volume_gradient(&map, i, j));
        let mut nodes = Vec::with_capacity(grads.len());
        let mut grad_inf = 0.0_f64;
        let mut decrease = 0.0;
        for g in grads {
            let g = g?;
            grad_inf = grad_inf.max(g.grad_inf);
            decrease += g.decrease;
            nodes.push(g);
        }
        final_residual = grad_inf;
        if grad_inf <= opts.tol_residual {
            converged = true;
            break;
        }

        let mut accepted = false;
        while step >= MIN_LINE_STEP {
            let mut candidate = map.clone();
            for g in &nodes {
                let p = map.value(g.i, g.j);
                let scaled: Vec<f64> = g.direction.iter().map(|d| d * step).collect();
                candidate.set_value(g.i, g.j, &manifold.exp(p, &scaled));
            }
            let cand_volume = candidate.graph_volume()?;
            if cand_volume <= volume - ARMIJO_C1 * step * decrease {
                map = candidate;
                volume = cand_volume;
                volume_history.push(volume);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (step * 2.0).min(1.0);
    }

    Ok(SolveOutcome {
        map,
        converged,
        iterations,
        final_residual,
        volume_history,
    })
}

/// Dispatches on the target kind.
pub fn solve(init: &GridMap, opts: &SolverOptions) -> Result<SolveOutcome> {
    if init.manifold().is_euclidean() {
        solve_euclidean(init, opts)
    } else {
        solve_hyperbolic(init, opts)
    }
}

/// Adds a seeded smooth interior bump to a map: a product-sine profile,
/// zero on the boundary, pointing in a random but fixed tangent direction,
/// with amplitude `relative` times the boundary data scale.
pub fn perturbed_init(base: &GridMap, seed: u64, relative: f64) -> GridMap {
    let domain = base.domain().clone();
    let manifold = *base.manifold();
    let n = manifold.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in coeffs.iter_mut() {
            *c /= norm;
        }
    }

    let boundary = domain.boundary_nodes();
    let reference = base.value(boundary[0].0, boundary[0].1).to_vec();
    let mut scale = 0.0_f64;
    for &(i, j) in &boundary {
        scale = scale.max(manifold.distance(&reference, base.value(i, j)));
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    let amplitude = relative * scale;

    let mut out = base.clone();
    let pi = std::f64::consts::PI;
    for (i, j) in domain.interior_nodes() {
        let profile = (pi * i as f64 / (domain.nx() - 1) as f64).sin()
            * (pi * j as f64 / (domain.ny() - 1) as f64).sin();
        let p = base.value(i, j);
        let frame = manifold.frame(p);
        let mut v = vec![0.0; manifold.ambient_dim()];
        for (c, f) in coeffs.iter().zip(&frame) {
            for (vi, fi) in v.iter_mut().zip(f) {
                *vi += amplitude * profile * c * fi;
            }
        }
        out.set_value(i, j, &manifold.exp(p, &v));
    }
    out
}

/// Three-valued conclusion of a uniqueness experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    /// All runs converged, all spectra in region, maps agree within tol.
    Unique,
    /// Spectra leave the region: the uniqueness statement does not apply.
    TheoremSilent,
    /// A run failed to converge, or the data resolves nothing.
    Inconclusive,
}

/// Outcome of solving one boundary problem from several initializations.
#[derive(Debug)]
pub struct UniquenessReport {
    pub runs: Vec<SolveOutcome>,
    /// Per run: did every node's λ² land in the chosen region?
    pub in_region: Vec<bool>,
    /// Smallest region margin seen over all runs and nodes.
    pub min_margin: f64,
    /// Largest sup-distance between any two converged maps.
    pub max_pair_distance: f64,
    pub distance_tol: f64,
    pub verdict: UniquenessVerdict,
}

/// Solves the same Dirichlet data from a harmonic and a perturbed start,
/// checks the region hypothesis on both solutions, and reports whether
/// the results corroborate uniqueness.
pub fn uniqueness_experiment<F>(
    boundary: &MapData,
    region: F,
    opts: &SolverOptions,
    distance_tol: f64,
) -> Result<UniquenessReport>
where
    F: Fn(&SquaredSpectrum) -> RegionVerdict + Sync + Send,
{
    let base = harmonic_extension(boundary)?;
    let bumped = perturbed_init(&base, opts.seed, 0.1);
    let runs = vec![solve(&base, opts)?, solve(&bumped, opts)?];

    let mut in_region = Vec::with_capacity(runs.len());
    let mut min_margin = f64::INFINITY;
    for run in &runs {
        let field = run.map.region_field(&region)?;
        in_region.push(field.all_member);
        min_margin = min_margin.min(field.min_margin);
    }

    let mut max_pair_distance = 0.0_f64;
    for a in 0..runs.len() {
        for b in (a + 1)..runs.len() {
            max_pair_distance = max_pair_distance.max(runs[a].map.sup_distance(&runs[b].map)?);
        }
    }

    let all_converged = runs.iter().all(|r| r.converged);
    let all_in = in_region.iter().all(|&b| b);
    let verdict = if !all_converged {
        UniquenessVerdict::Inconclusive
    } else if !all_in {
        UniquenessVerdict::TheoremSilent
    } else if max_pair_distance <= distance_tol {
        UniquenessVerdict::Unique
    } else {
        UniquenessVerdict::Inconclusive
    };

    Ok(UniquenessReport {
        runs,
        in_region,
        min_margin,
        max_pair_distance,
        distance_tol,
        verdict,
    })
}
