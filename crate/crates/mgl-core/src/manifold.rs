//! Closed-form geometry of the target spaces: Euclidean space and
//! hyperbolic space of constant curvature −κ.
//!
//! Hyperbolic targets use the hyperboloid model: points live on the sheet
//! ⟨x,x⟩ = −1/κ, x₀ > 0 of the Minkowski form ⟨x,y⟩ = −x₀y₀ + Σ x_i y_i in
//! n+1 ambient coordinates.
//!
//! Exponential map, logarithm, parallel transport, and distance are routed
//! through the sheet apex with point reflections (the transvections of the
//! hyperboloid). A reflection is linear and preserves the Minkowski form
//! exactly, and at the apex the closed forms involve plain Euclidean norms
//! with no cancellation, so long geodesics keep full precision. The naive
//! cosh/sinh formulas evaluated directly at a far-out base point lose
//! accuracy like cosh²(distance)·ε through the final renormalization; the
//! reflected route stays near the representable resolution of the inputs.
//!
//! Points and tangents are plain coordinate slices in the ambient chart
//! (length n for Euclidean targets, n+1 for hyperbolic ones); tangents are
//! always given together with their base point. Slice lengths are a
//! programming contract and panic when violated; numerical validity is
//! checked by [`ModelManifold::check_point`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the hyperboloid constraint and tangency checks.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Below this geodesic parameter, series guards replace sinh/cosh ratios.
const SMALL_PARAM: f64 = 1e-8;

/// Which model space a map takes values in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Euclidean,
    Hyperbolic,
}

/// Serialized description of a target space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSpec {
    pub kind: TargetKind,
    /// Intrinsic dimension n ≥ 1.
    pub dim: usize,
    /// Sectional curvature: 0 for Euclidean, −κ < 0 for hyperbolic.
    pub curvature: f64,
}

impl ManifoldSpec {
    pub fn euclidean(dim: usize) -> Self {
        ManifoldSpec {
            kind: TargetKind::Euclidean,
            dim,
            curvature: 0.0,
        }
    }

    /// Hyperbolic space of curvature −κ; `kappa` must be positive.
    pub fn hyperbolic(dim: usize, kappa: f64) -> Self {
        ManifoldSpec {
            kind: TargetKind::Hyperbolic,
            dim,
            curvature: -kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("target dimension must be ≥ 1".into()));
        }
        match self.kind {
            TargetKind::Euclidean if self.curvature != 0.0 => Err(Error::InvalidInput(
                "euclidean targets require curvature = 0".into(),
            )),
            TargetKind::Hyperbolic if !(self.curvature < 0.0 && self.curvature.is_finite()) => {
                Err(Error::InvalidInput(
                    "hyperbolic targets require finite curvature < 0".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// A target space with closed-form geometric primitives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelManifold {
    spec: ManifoldSpec,
}

impl ModelManifold {
    pub fn new(spec: ManifoldSpec) -> Result<Self> {
        spec.validate()?;
        Ok(ModelManifold { spec })
    }

    pub fn euclidean(dim: usize) -> Self {
        ModelManifold {
            spec: ManifoldSpec::euclidean(dim),
        }
    }

    pub fn hyperbolic(dim: usize, kappa: f64) -> Self {
        Self::new(ManifoldSpec::hyperbolic(dim, kappa)).expect("positive kappa")
    }

    pub fn spec(&self) -> ManifoldSpec {
        self.spec
    }

    /// Intrinsic dimension n.
    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    /// Length of coordinate vectors: n for Euclidean, n+1 for hyperbolic.
    pub fn ambient_dim(&self) -> usize {
        match self.spec.kind {
            TargetKind::Euclidean => self.spec.dim,
            TargetKind::Hyperbolic => self.spec.dim + 1,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        self.spec.kind == TargetKind::Euclidean
    }

    fn kappa(&self) -> f64 {
        -self.spec.curvature
    }

    /// Minkowski form for hyperbolic targets, Euclidean dot otherwise.
    pub fn ambient_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.ambient_dim());
        debug_assert_eq!(y.len(), self.ambient_dim());
        match self.spec.kind {
            TargetKind::Euclidean => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            TargetKind::Hyperbolic => {
                let spatial: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
                spatial - x[0] * y[0]
            }
        }
    }

    /// Riemannian metric on tangent vectors at `p` (the ambient form
    /// restricted to the tangent space, where it is positive definite).
    pub fn inner(&self, _p: &[f64], u: &[f64], v: &[f64]) -> f64 {
        self.ambient_inner(u, v)
    }

    pub fn norm(&self, p: &[f64], v: &[f64]) -> f64 {
        self.inner(p, v, v).max(0.0).sqrt()
    }

    /// Verifies the point constraint: on the hyperboloid sheet with
    /// positive first coordinate, within [`CONSTRAINT_TOL`].
    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.ambient_dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, target needs {}",
                p.len(),
                self.ambient_dim()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("point coordinates must be finite".into()));
        }
        if let TargetKind::Hyperbolic = self.spec.kind {
            let k = self.kappa();
            let residual = self.ambient_inner(p, p) + 1.0 / k;
            let scale = (1.0 / k).max(1.0);
            if residual.abs() > CONSTRAINT_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "point violates the hyperboloid constraint by {residual:.3e}"
                )));
            }
            if p[0] <= 0.0 {
                return Err(Error::InvalidInput(
                    "hyperboloid points need a positive first coordinate".into(),
                ));
            }
        }
        Ok(())
    }

    /// Rescales onto the hyperboloid sheet; identity for Euclidean targets.
    pub fn project_point(&self, p: &[f64]) -> Vec<f64> {
        match self.spec.kind {
            TargetKind::Euclidean => p.to_vec(),
            TargetKind::Hyperbolic => {
                let s = -self.ambient_inner(p, p);
                debug_assert!(s > 0.0 && p[0] > 0.0, "projection needs a timelike point");
                let factor = 1.0 / (self.kappa() * s).sqrt();
                p.iter().map(|v| v * factor).collect()
            }
        }
    }

    /// Removes the normal component so that ⟨p, v⟩ = 0; identity for
    /// Euclidean targets.
    pub fn project_tangent(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        match self.spec.kind {
            TargetKind::Euclidean => v.to_vec(),
            TargetKind::Hyperbolic => {
                let c = self.kappa() * self.ambient_inner(p, v);
                v.iter().zip(p).map(|(vi, pi)| vi + c * pi).collect()
            }
        }
    }

    /// The natural base point: the origin for Euclidean targets, the sheet
    /// apex (1/√κ, 0, …, 0) for hyperbolic ones.
    pub fn base_point(&self) -> Vec<f64> {
        match self.spec.kind {
            TargetKind::Euclidean => vec![0.0; self.dim()],
            TargetKind::Hyperbolic => {
                let mut p = vec![0.0; self.dim() + 1];
                p[0] = 1.0 / self.kappa().sqrt();
                p
            }
        }
    }

    /// Point reflection of `x` through the sheet point `m` (the geodesic
    /// symmetry); linear and exactly form-preserving.
    fn reflect(&self, m: &[f64], x: &[f64]) -> Vec<f64> {
        let c = 2.0 * self.kappa() * self.ambient_inner(x, m);
        x.iter().zip(m).map(|(xi, mi)| -xi - c * mi).collect()
    }

    /// Point reflection through the apex: negates spatial coordinates.
    fn apex_flip(x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        out[0] = x[0];
        for (o, v) in out[1..].iter_mut().zip(&x[1..]) {
            *o = -*v;
        }
        out
    }

    /// Geodesic midpoint of the apex and `p`; reflecting through it and
    /// then through the apex moves the apex to `p`.
    fn apex_midpoint(&self, p: &[f64]) -> Vec<f64> {
        let mut sum = p.to_vec();
        sum[0] += 1.0 / self.kappa().sqrt();
        self.project_point(&sum)
    }

    /// Point reached by the unit-time geodesic with initial velocity `v`.
    pub fn exp(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        match self.spec.kind {
            TargetKind::Euclidean => p.iter().zip(v).map(|(a, b)| a + b).collect(),
            TargetKind::Hyperbolic => {
                let k = self.kappa();
                let m = self.apex_midpoint(p);
                let mut va = Self::apex_flip(&self.reflect(&m, v));
                va[0] = 0.0;
                let u = k.sqrt() * va[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                if u < SMALL_PARAM {
                    // proj(p + v) matches the geodesic through third order.
                    let out: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + b).collect();
                    return self.project_point(&out);
                }
                let (ch, shu) = (u.cosh(), u.sinh() / u);
                let mut outa: Vec<f64> = va.iter().map(|x| shu * x).collect();
                outa[0] = ch / k.sqrt();
                let out = self.reflect(&m, &Self::apex_flip(&outa));
                self.project_point(&out)
            }
        }
    }

    /// Initial velocity of the unit-time geodesic from `p` to `q`;
    /// `exp(p, log(p, q)) = q` and `|log(p, q)| = distance(p, q)`.
    pub fn log(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        match self.spec.kind {
            TargetKind::Euclidean => q.iter().zip(p).map(|(a, b)| a - b).collect(),
            TargetKind::Hyperbolic => {
                let k = self.kappa();
                let m = self.apex_midpoint(p);
                let qa = Self::apex_flip(&self.reflect(&m, q));
                let spat = qa[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                let y = k.sqrt() * spat;
                if y == 0.0 {
                    return vec![0.0; p.len()];
                }
                // The scale asinh(y)/y is well conditioned at every
                // separation; near zero use its series.
                let scale = if y < SMALL_PARAM {
                    1.0 - y * y / 6.0
                } else {
                    y.asinh() / y
                };
                let mut va: Vec<f64> = qa.iter().map(|x| scale * x).collect();
                va[0] = 0.0;
                let v = self.reflect(&m, &Self::apex_flip(&va));
                self.project_tangent(p, &v)
            }
        }
    }

    /// Geodesic distance.
    pub fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        match self.spec.kind {
            TargetKind::Euclidean => p
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            TargetKind::Hyperbolic => {
                let k = self.kappa();
                let m = self.apex_midpoint(p);
                let qa = Self::apex_flip(&self.reflect(&m, q));
                let spat = qa[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                (k.sqrt() * spat).asinh() / k.sqrt()
            }
        }
    }

    /// Constant-speed geodesic through `p` (t=0) and `q` (t=1); values of t
    /// outside [0,1] extrapolate along the same geodesic.
    pub fn geodesic(&self, p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
        if t == 0.0 {
            return p.to_vec();
        }
        if t == 1.0 {
            return q.to_vec();
        }
        let w = self.log(p, q);
        let scaled: Vec<f64> = w.iter().map(|wi| wi * t).collect();
        self.exp(p, &scaled)
    }

    /// Velocity of t ↦ geodesic(p, q, t) at parameter `t`: the initial
    /// velocity parallel-transported along the geodesic.
    pub fn geodesic_velocity(&self, p: &[f64], q: &[f64], t: f64) -> Vec<f64> {
        let w = self.log(p, q);
        if self.is_euclidean() {
            return w;
        }
        let gt = self.geodesic(p, q, t);
        self.transport(p, &gt, &w)
    }

    /// Parallel transport of `v` from `p` to `q` along the connecting
    /// geodesic; preserves inner products.
    pub fn transport(&self, p: &[f64], q: &[f64], v: &[f64]) -> Vec<f64> {
        match self.spec.kind {
            TargetKind::Euclidean => v.to_vec(),
            TargetKind::Hyperbolic => {
                // Transvection along p→q: reflect through p, then through
                // the midpoint. On tangents at p the first leg is −v, so
                // the whole map is v ↦ v + 2κ⟨v,m⟩m.
                let sum: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
                let m = self.project_point(&sum);
                let c = 2.0 * self.kappa() * self.ambient_inner(v, &m);
                let out: Vec<f64> = v.iter().zip(&m).map(|(vi, mi)| vi + c * mi).collect();
                self.project_tangent(q, &out)
            }
        }
    }

    /// The sectional curvature quadratic ⟨R(X,V)X,V⟩ at `p`: zero for flat
    /// targets, κ·(|X|²|V|² − ⟨X,V⟩²) ≥ 0 for curvature −κ.
    pub fn curvature_quadratic(&self, p: &[f64], x: &[f64], v: &[f64]) -> f64 {
        match self.spec.kind {
            TargetKind::Euclidean => 0.0,
            TargetKind::Hyperbolic => {
                let xx = self.inner(p, x, x);
                let vv = self.inner(p, v, v);
                let xv = self.inner(p, x, v);
                self.kappa() * (xx * vv - xv * xv)
            }
        }
    }

    /// Deterministic orthonormal tangent frame at `p`: the standard apex
    /// frame transported to `p`, with one Gram–Schmidt polish pass.
    pub fn frame(&self, p: &[f64]) -> Vec<Vec<f64>> {
        match self.spec.kind {
            TargetKind::Euclidean => (0..self.dim())
                .map(|i| {
                    let mut e = vec![0.0; self.dim()];
                    e[i] = 1.0;
                    e
                })
                .collect(),
            TargetKind::Hyperbolic => {
                let n = self.dim();
                let a = self.base_point();
                let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
                for i in 1..=n {
                    let mut e = vec![0.0; n + 1];
                    e[i] = 1.0;
                    let mut v = self.transport(&a, p, &e);
                    for f in &frame {
                        let c = self.inner(p, &v, f);
                        for (vi, fi) in v.iter_mut().zip(f) {
                            *vi -= c * fi;
                        }
                    }
                    let nv = self.norm(p, &v);
                    debug_assert!(nv > 1e-13, "frame vector degenerated");
                    for vi in v.iter_mut() {
                        *vi /= nv;
                    }
                    frame.push(v);
                }
                frame
            }
        }
    }

    /// Coordinates of a tangent vector in the frame returned by
    /// [`ModelManifold::frame`].
    pub fn to_frame_coords(&self, p: &[f64], frame: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        frame.iter().map(|f| self.inner(p, v, f)).collect()
    }

    /// Ambient components of a tangent vector given in frame coordinates.
    pub fn from_frame_coords(&self, frame: &[Vec<f64>], coords: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.ambient_dim()];
        for (c, f) in coords.iter().zip(frame) {
            for (vi, fi) in v.iter_mut().zip(f) {
                *vi += c * fi;
            }
        }
        v
    }
}
