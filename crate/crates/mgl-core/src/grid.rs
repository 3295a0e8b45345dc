//! Rectangular grids and discrete maps into a model target.
//!
//! A map is stored as one coordinate vector per node, node-major with
//! stride `ambient_dim`. Nodes are addressed as (i, j) with i along x and
//! j along y; the flat index is `j·nx + i`, matching the row-major layout
//! of the JSON map format.
//!
//! Jacobians are taken intrinsically: target-side differences go through
//! the logarithm at the center value and are read in the orthonormal frame
//! there, so the columns live in honest tangent coordinates regardless of
//! the target model.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::manifold::{ManifoldSpec, ModelManifold};
use crate::region::RegionVerdict;
use crate::spectrum::{Spectrum, SquaredSpectrum};
use crate::svd;

/// A rectangular node lattice with spacings and an optional activity mask.
///
/// Deactivated nodes carry no values; a node is a boundary node when it is
/// active and either sits on the lattice edge or touches an inactive
/// 4-neighbor. Interior nodes always have four active neighbors.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    mask: Option<Vec<bool>>,
}

impl GridDomain {
    pub fn new(nx: usize, ny: usize, hx: f64, hy: f64) -> Result<Self> {
        Self::build(nx, ny, hx, hy, None)
    }

    /// Domain with explicit node activity; `mask` is row-major of length
    /// nx·ny.
    pub fn with_mask(nx: usize, ny: usize, hx: f64, hy: f64, mask: Vec<bool>) -> Result<Self> {
        Self::build(nx, ny, hx, hy, Some(mask))
    }

    fn build(nx: usize, ny: usize, hx: f64, hy: f64, mask: Option<Vec<bool>>) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidInput(
                "grids need at least 3 nodes per side".into(),
            ));
        }
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::InvalidInput("grid spacings must be positive".into()));
        }
        if let Some(m) = &mask {
            if m.len() != nx * ny {
                return Err(Error::Dimension(format!(
                    "mask has {} entries, grid has {}",
                    m.len(),
                    nx * ny
                )));
            }
        }
        Ok(GridDomain {
            nx,
            ny,
            hx,
            hy,
            mask,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    /// Total node count nx·ny, active or not.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    pub fn node(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    /// Physical coordinates of a node: (i·hx, j·hy).
    pub fn position(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        if i >= self.nx || j >= self.ny {
            return false;
        }
        match &self.mask {
            None => true,
            Some(m) => m[self.index(i, j)],
        }
    }

    /// Active node on the lattice edge or next to an inactive node.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        if !self.is_active(i, j) {
            return false;
        }
        if i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1 {
            return true;
        }
        !(self.is_active(i - 1, j)
            && self.is_active(i + 1, j)
            && self.is_active(i, j - 1)
            && self.is_active(i, j + 1))
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.is_active(i, j) && !self.is_boundary(i, j)
    }

    /// True when the full 3×3 neighborhood of (i, j) is active; the
    /// conservative divergence stencil needs the diagonal neighbors too.
    pub fn has_full_neighborhood(&self, i: usize, j: usize) -> bool {
        if i == 0 || j == 0 || i + 1 >= self.nx || j + 1 >= self.ny {
            return false;
        }
        (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|b| self.is_active(a, b)))
    }

    /// Trapezoidal quadrature weight of one node: hx·hy/4 for every
    /// complete active cell touching it. Summing weight·density over nodes
    /// reproduces [`GridMap::graph_volume`] exactly.
    pub fn quadrature_weight(&self, i: usize, j: usize) -> f64 {
        let complete = |a: usize, b: usize| -> bool {
            a + 1 < self.nx
                && b + 1 < self.ny
                && self.is_active(a, b)
                && self.is_active(a + 1, b)
                && self.is_active(a, b + 1)
                && self.is_active(a + 1, b + 1)
        };
        let mut cells = 0;
        for da in 0..2usize {
            for db in 0..2usize {
                if i + da >= 1 && j + db >= 1 && complete(i + da - 1, j + db - 1) {
                    cells += 1;
                }
            }
        }
        0.25 * self.hx * self.hy * cells as f64
    }

    pub fn active_count(&self) -> usize {
        match &self.mask {
            None => self.len(),
            Some(m) => m.iter().filter(|&&b| b).count(),
        }
    }

    pub fn boundary_nodes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.is_boundary(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn interior_nodes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.is_interior(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A grid of target-space values: a discrete map from the domain into the
/// model manifold.
#[derive(Clone, Debug)]
pub struct GridMap {
    domain: GridDomain,
    manifold: ModelManifold,
    values: Vec<f64>,
}

impl GridMap {
    /// Wraps a node-major coordinate buffer; every active node's value must
    /// satisfy the target constraint.
    pub fn new(domain: GridDomain, manifold: ModelManifold, values: Vec<f64>) -> Result<Self> {
        let stride = manifold.ambient_dim();
        if values.len() != domain.len() * stride {
            return Err(Error::Dimension(format!(
                "value buffer has {} floats, grid needs {}",
                values.len(),
                domain.len() * stride
            )));
        }
        let map = GridMap {
            domain,
            manifold,
            values,
        };
        for j in 0..map.domain.ny {
            for i in 0..map.domain.nx {
                if map.domain.is_active(i, j) {
                    map.manifold.check_point(map.value(i, j)).map_err(|e| {
                        Error::InvalidInput(format!("node ({i},{j}): {e}"))
                    })?;
                }
            }
        }
        Ok(map)
    }

    pub fn constant(domain: GridDomain, manifold: ModelManifold, point: &[f64]) -> Result<Self> {
        manifold.check_point(point)?;
        let mut values = Vec::with_capacity(domain.len() * manifold.ambient_dim());
        for _ in 0..domain.len() {
            values.extend_from_slice(point);
        }
        GridMap::new(domain, manifold, values)
    }

    /// Builds a map by evaluating `f` at every node's physical position.
    pub fn from_fn<F>(domain: GridDomain, manifold: ModelManifold, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let stride = manifold.ambient_dim();
        let mut values = vec![0.0; domain.len() * stride];
        for j in 0..domain.ny {
            for i in 0..domain.nx {
                let (x, y) = domain.position(i, j);
                let p = f(x, y);
                if p.len() != stride {
                    return Err(Error::Dimension(format!(
                        "map function returned {} coordinates, target needs {stride}",
                        p.len()
                    )));
                }
                let idx = domain.index(i, j) * stride;
                values[idx..idx + stride].copy_from_slice(&p);
            }
        }
        GridMap::new(domain, manifold, values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn value(&self, i: usize, j: usize) -> &[f64] {
        let stride = self.manifold.ambient_dim();
        let idx = self.domain.index(i, j) * stride;
        &self.values[idx..idx + stride]
    }

    /// Overwrites one node value; the caller is responsible for keeping
    /// Dirichlet boundary data intact during solves.
    pub fn set_value(&mut self, i: usize, j: usize, point: &[f64]) {
        let stride = self.manifold.ambient_dim();
        assert_eq!(point.len(), stride, "coordinate count mismatch");
        let idx = self.domain.index(i, j) * stride;
        self.values[idx..idx + stride].copy_from_slice(point);
    }

    pub fn values_flat(&self) -> &[f64] {
        &self.values
    }

    /// Largest geodesic distance between corresponding active node values.
    pub fn sup_distance(&self, other: &GridMap) -> Result<f64> {
        if self.domain != other.domain {
            return Err(Error::Dimension("maps live on different grids".into()));
        }
        if self.manifold.spec() != other.manifold.spec() {
            return Err(Error::Dimension("maps have different targets".into()));
        }
        let mut worst = 0.0_f64;
        for j in 0..self.domain.ny {
            for i in 0..self.domain.nx {
                if self.domain.is_active(i, j) {
                    worst = worst.max(self.manifold.distance(self.value(i, j), other.value(i, j)));
                }
            }
        }
        Ok(worst)
    }

    /// Jacobian at an active node: n rows (target frame coordinates at the
    /// node value), 2 columns (x and y directions). Interior nodes use
    /// central differences; edge nodes fall back to one-sided stencils of
    /// the same second order.
    pub fn jacobian(&self, i: usize, j: usize) -> Result<NodeJacobian> {
        if !self.domain.is_active(i, j) {
            return Err(Error::InvalidInput(format!("node ({i},{j}) is inactive")));
        }
        let center = self.value(i, j);
        let frame = self.manifold.frame(center);
        let n = self.manifold.dim();
        let mut matrix = DMatrix::<f64>::zeros(n, 2);

        let log_coords = |ii: usize, jj: usize| -> Vec<f64> {
            let w = self.manifold.log(center, self.value(ii, jj));
            self.manifold.to_frame_coords(center, &frame, &w)
        };

        for (axis, h) in [(0usize, self.domain.hx), (1usize, self.domain.hy)] {
            let shift = |step: isize| -> Option<(usize, usize)> {
                let (di, dj) = if axis == 0 { (step, 0) } else { (0, step) };
                let ii = i as isize + di;
                let jj = j as isize + dj;
                if ii < 0 || jj < 0 {
                    return None;
                }
                let (ii, jj) = (ii as usize, jj as usize);
                if self.domain.is_active(ii, jj) {
                    Some((ii, jj))
                } else {
                    None
                }
            };

            let col: Vec<f64> = match (shift(-1), shift(1)) {
                (Some(m1), Some(p1)) => {
                    let wm = log_coords(m1.0, m1.1);
                    let wp = log_coords(p1.0, p1.1);
                    wp.iter().zip(&wm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
                }
                (None, Some(p1)) => {
                    let p2 = shift(2).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "node ({i},{j}) lacks a one-sided stencil along axis {axis}"
                        ))
                    })?;
                    let w1 = log_coords(p1.0, p1.1);
                    let w2 = log_coords(p2.0, p2.1);
                    w1.iter()
                        .zip(&w2)
                        .map(|(a, b)| (4.0 * a - b) / (2.0 * h))
                        .collect()
                }
                (Some(m1), None) => {
                    let m2 = shift(-2).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "node ({i},{j}) lacks a one-sided stencil along axis {axis}"
                        ))
                    })?;
                    let w1 = log_coords(m1.0, m1.1);
                    let w2 = log_coords(m2.0, m2.1);
                    w1.iter()
                        .zip(&w2)
                        .map(|(a, b)| (-4.0 * a + b) / (2.0 * h))
                        .collect()
                }
                (None, None) => {
                    return Err(Error::InvalidInput(format!(
                        "node ({i},{j}) has no active neighbors along axis {axis}"
                    )))
                }
            };
            for (r, v) in col.iter().enumerate() {
                matrix[(r, axis)] = *v;
            }
        }
        Ok(NodeJacobian { matrix })
    }

    /// Descending singular values of the node Jacobian, zero-padded to the
    /// domain dimension 2.
    pub fn singular_spectrum(&self, i: usize, j: usize) -> Result<Spectrum> {
        let jac = self.jacobian(i, j)?;
        let decomposition = svd::full_svd(&jac.matrix)?;
        let mut sv = decomposition.singular;
        sv.resize(2, 0.0);
        Spectrum::new(sv)
    }

    /// Pullback metric g = I + JᵀJ on the 2-dimensional domain.
    pub fn induced_metric(&self, i: usize, j: usize) -> Result<[[f64; 2]; 2]> {
        let jac = self.jacobian(i, j)?.matrix;
        let mut g = [[0.0_f64; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for r in 0..jac.nrows() {
                    s += jac[(r, a)] * jac[(r, b)];
                }
                g[a][b] = s + if a == b { 1.0 } else { 0.0 };
            }
        }
        Ok(g)
    }

    /// √det g at one node.
    pub fn volume_density(&self, i: usize, j: usize) -> Result<f64> {
        let g = self.induced_metric(i, j)?;
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if det <= 0.0 {
            return Err(Error::Internal(format!(
                "induced metric lost positivity at ({i},{j}): det = {det:.3e}"
            )));
        }
        Ok(det.sqrt())
    }

    /// Area of the graph: trapezoidal quadrature of √det g over complete
    /// active cells (each cell weighs its four corners equally).
    pub fn graph_volume(&self) -> Result<f64> {
        let field = self.volume_density_field()?;
        let mut cells = Vec::with_capacity((self.domain.nx - 1) * (self.domain.ny - 1));
        for j in 0..self.domain.ny - 1 {
            for i in 0..self.domain.nx - 1 {
                let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
                if corners.iter().all(|&(a, b)| self.domain.is_active(a, b)) {
                    let s: f64 = corners
                        .iter()
                        .map(|&(a, b)| field[self.domain.index(a, b)])
                        .sum();
                    cells.push(s * 0.25 * self.domain.hx * self.domain.hy);
                }
            }
        }
        Ok(exec::pairwise_sum(&cells))
    }

    /// Per-node √det g; inactive nodes hold 0.
    pub fn volume_density_field(&self) -> Result<Vec<f64>> {
        let results = exec::map_indexed(self.domain.len(), |idx| {
            let (i, j) = self.domain.node(idx);
            if self.domain.is_active(i, j) {
                self.volume_density(i, j)
            } else {
                Ok(0.0)
            }
        });
        results.into_iter().collect()
    }

    /// Applies a region predicate to λ²(df) at every active node.
    pub fn region_field<F>(&self, predicate: F) -> Result<RegionField>
    where
        F: Fn(&SquaredSpectrum) -> RegionVerdict + Sync + Send,
    {
        let verdicts: Vec<Option<Result<RegionVerdict>>> =
            exec::map_indexed(self.domain.len(), |idx| {
                let (i, j) = self.domain.node(idx);
                if !self.domain.is_active(i, j) {
                    return None;
                }
                Some(
                    self.singular_spectrum(i, j)
                        .map(|s| predicate(&s.squared())),
                )
            });
        let mut out = Vec::with_capacity(verdicts.len());
        let mut all_member = true;
        let mut min_margin = f64::INFINITY;
        for v in verdicts {
            match v {
                None => out.push(None),
                Some(r) => {
                    let verdict = r?;
                    all_member &= verdict.member;
                    min_margin = min_margin.min(verdict.margin);
                    out.push(Some(verdict));
                }
            }
        }
        Ok(RegionField {
            verdicts: out,
            all_member,
            min_margin,
        })
    }

    /// Per-node residual of the divergence-form minimal surface system for
    /// Euclidean targets: the Euclidean norm over components of
    /// Σ ∂_i(√g g^{ij} ∂_j f^α). Defined on nodes with a full 3×3 active
    /// neighborhood; elsewhere 0.
    pub fn ms_residual(&self) -> Result<Vec<f64>> {
        if !self.manifold.is_euclidean() {
            return Err(Error::InvalidInput(
                "the divergence-form residual needs a euclidean target; \
                 use the area-gradient norm for curved ones"
                    .into(),
            ));
        }
        let coeffs = self.metric_coefficients()?;
        let stencil = DivergenceStencil {
            domain: &self.domain,
            coeffs: &coeffs,
        };
        let n = self.manifold.dim();
        let field = exec::map_indexed(self.domain.len(), |idx| {
            let (i, j) = self.domain.node(idx);
            if !self.domain.has_full_neighborhood(i, j) {
                return 0.0;
            }
            let mut sq = 0.0;
            for alpha in 0..n {
                let u = |a: usize, b: usize| self.value(a, b)[alpha];
                let r = stencil.apply(&u, i, j);
                sq += r * r;
            }
            sq.sqrt()
        });
        Ok(field)
    }

    /// Per-node coefficient tensor √g·g^{ij} (symmetric 2×2); inactive
    /// nodes hold zeros.
    pub(crate) fn metric_coefficients(&self) -> Result<Vec<MetricCoeff>> {
        let results = exec::map_indexed(self.domain.len(), |idx| {
            let (i, j) = self.domain.node(idx);
            if !self.domain.is_active(i, j) {
                return Ok(MetricCoeff::default());
            }
            let g = self.induced_metric(i, j)?;
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if det <= 0.0 {
                return Err(Error::Internal(format!(
                    "induced metric lost positivity at ({i},{j})"
                )));
            }
            let s = det.sqrt();
            Ok(MetricCoeff {
                xx: s * g[1][1] / det,
                xy: -s * g[0][1] / det,
                yy: s * g[0][0] / det,
            })
        });
        results.into_iter().collect()
    }
}

/// Jacobian at a node: target frame coordinates by domain axes.
#[derive(Clone, Debug)]
pub struct NodeJacobian {
    pub matrix: DMatrix<f64>,
}

/// Region verdicts over a whole map with membership aggregates.
#[derive(Clone, Debug)]
pub struct RegionField {
    /// One verdict per node, `None` on inactive nodes.
    pub verdicts: Vec<Option<RegionVerdict>>,
    /// True when every active node is a member.
    pub all_member: bool,
    /// Smallest margin over active nodes; +∞ for empty aggregates.
    pub min_margin: f64,
}

/// √g·g^{ij} at one node.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct MetricCoeff {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

/// Conservative 9-point discretization of Σ ∂_i(c^{ij} ∂_j u) with the
/// coefficient tensor averaged onto half nodes. Both the residual and the
/// solver's relaxation share this stencil, so a converged fixed point of
/// one is a zero of the other. The scalar field `u` is passed as a lookup
/// closure so callers can point it at map values or raw sweep buffers.
pub(crate) struct DivergenceStencil<'a> {
    pub(crate) domain: &'a GridDomain,
    pub(crate) coeffs: &'a [MetricCoeff],
}

impl DivergenceStencil<'_> {
    /// Residual at an interior node with a full 3×3 neighborhood.
    pub(crate) fn apply<U>(&self, u: &U, i: usize, j: usize) -> f64
    where
        U: Fn(usize, usize) -> f64,
    {
        let d = self.domain;
        let (hx, hy) = (d.hx, d.hy);
        let c = |a: usize, b: usize| self.coeffs[d.index(a, b)];
        let cc = c(i, j);

        let ce = mean2(cc, c(i + 1, j));
        let cw = mean2(cc, c(i - 1, j));
        let cn = mean2(cc, c(i, j + 1));
        let cs = mean2(cc, c(i, j - 1));

        let uy = |a: usize, b: usize| (u(a, b + 1) - u(a, b - 1)) / (2.0 * hy);
        let ux = |a: usize, b: usize| (u(a + 1, b) - u(a - 1, b)) / (2.0 * hx);

        let fx_e =
            ce.xx * (u(i + 1, j) - u(i, j)) / hx + ce.xy * 0.5 * (uy(i, j) + uy(i + 1, j));
        let fx_w =
            cw.xx * (u(i, j) - u(i - 1, j)) / hx + cw.xy * 0.5 * (uy(i, j) + uy(i - 1, j));
        let fy_n =
            cn.yy * (u(i, j + 1) - u(i, j)) / hy + cn.xy * 0.5 * (ux(i, j) + ux(i, j + 1));
        let fy_s =
            cs.yy * (u(i, j) - u(i, j - 1)) / hy + cs.xy * 0.5 * (ux(i, j) + ux(i, j - 1));

        (fx_e - fx_w) / hx + (fy_n - fy_s) / hy
    }

    /// ∂(residual)/∂u(i,j): strictly negative for a positive definite
    /// coefficient tensor.
    pub(crate) fn diagonal(&self, i: usize, j: usize) -> f64 {
        let d = self.domain;
        let (hx, hy) = (d.hx, d.hy);
        let c = |a: usize, b: usize| self.coeffs[d.index(a, b)];
        let cc = c(i, j);
        let ce = mean2(cc, c(i + 1, j));
        let cw = mean2(cc, c(i - 1, j));
        let cn = mean2(cc, c(i, j + 1));
        let cs = mean2(cc, c(i, j - 1));
        -(ce.xx + cw.xx) / (hx * hx) - (cn.yy + cs.yy) / (hy * hy)
    }
}

fn mean2(a: MetricCoeff, b: MetricCoeff) -> MetricCoeff {
    MetricCoeff {
        xx: 0.5 * (a.xx + b.xx),
        xy: 0.5 * (a.xy + b.xy),
        yy: 0.5 * (a.yy + b.yy),
    }
}

/// On-disk map format: grid geometry, target description, and row-major
/// per-node coordinate arrays. `null` entries mark nodes without data,
/// which is how boundary-only files express "interior unknown".
#[derive(Serialize, Deserialize)]
struct MapFile {
    grid: GridFile,
    target: ManifoldSpec,
    values: Vec<Option<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mask: Option<Vec<bool>>,
}

/// Parsed map file: possibly partial node data over a validated domain.
pub struct MapData {
    pub domain: GridDomain,
    pub manifold: ModelManifold,
    /// Per-node coordinates; `None` where the file had `null`.
    pub values: Vec<Option<Vec<f64>>>,
}

impl MapData {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        let domain = match file.grid.mask {
            Some(mask) => {
                GridDomain::with_mask(file.grid.nx, file.grid.ny, file.grid.hx, file.grid.hy, mask)?
            }
            None => GridDomain::new(file.grid.nx, file.grid.ny, file.grid.hx, file.grid.hy)?,
        };
        let manifold = ModelManifold::new(file.target)?;
        if file.values.len() != domain.len() {
            return Err(Error::Dimension(format!(
                "file has {} value entries, grid has {} nodes",
                file.values.len(),
                domain.len()
            )));
        }
        for (idx, v) in file.values.iter().enumerate() {
            if let Some(coords) = v {
                let (i, j) = domain.node(idx);
                if !domain.is_active(i, j) {
                    return Err(Error::InvalidInput(format!(
                        "node ({i},{j}) is masked out but carries a value"
                    )));
                }
                manifold
                    .check_point(coords)
                    .map_err(|e| Error::InvalidInput(format!("node ({i},{j}): {e}")))?;
            }
        }
        Ok(MapData {
            domain,
            manifold,
            values: file.values,
        })
    }

    /// True when every active node carries a value.
    pub fn is_complete(&self) -> bool {
        self.values.iter().enumerate().all(|(idx, v)| {
            let (i, j) = self.domain.node(idx);
            !self.domain.is_active(i, j) || v.is_some()
        })
    }

    /// True when at least every boundary node carries a value.
    pub fn covers_boundary(&self) -> bool {
        self.values.iter().enumerate().all(|(idx, v)| {
            let (i, j) = self.domain.node(idx);
            !self.domain.is_boundary(i, j) || v.is_some()
        })
    }

    /// Converts fully specified data into a map.
    pub fn into_map(self) -> Result<GridMap> {
        if !self.is_complete() {
            return Err(Error::InvalidInput(
                "map file leaves active nodes null; boundary-only files \
                 need an extension step first"
                    .into(),
            ));
        }
        let stride = self.manifold.ambient_dim();
        let mut flat = vec![0.0; self.domain.len() * stride];
        for (idx, v) in self.values.iter().enumerate() {
            if let Some(coords) = v {
                if coords.len() != stride {
                    let (i, j) = self.domain.node(idx);
                    return Err(Error::Dimension(format!(
                        "node ({i},{j}) has {} coordinates, target needs {stride}",
                        coords.len()
                    )));
                }
                flat[idx * stride..(idx + 1) * stride].copy_from_slice(coords);
            }
        }
        GridMap::new(self.domain, self.manifold, flat)
    }
}

/// Serializes a full map.
pub fn map_to_json(map: &GridMap) -> String {
    map_to_json_impl(map, false)
}

/// Serializes only boundary values, interior entries `null`.
pub fn boundary_to_json(map: &GridMap) -> String {
    map_to_json_impl(map, true)
}

fn map_to_json_impl(map: &GridMap, boundary_only: bool) -> String {
    let domain = map.domain();
    let mut values = Vec::with_capacity(domain.len());
    for idx in 0..domain.len() {
        let (i, j) = domain.node(idx);
        let keep = domain.is_active(i, j) && (!boundary_only || domain.is_boundary(i, j));
        values.push(if keep {
            Some(map.value(i, j).to_vec())
        } else {
            None
        });
    }
    let file = MapFile {
        grid: GridFile {
            nx: domain.nx(),
            ny: domain.ny(),
            hx: domain.hx(),
            hy: domain.hy(),
            mask: None,
        },
        target: map.manifold().spec(),
        values,
    };
    serde_json::to_string_pretty(&file).expect("map serialization cannot fail")
}
