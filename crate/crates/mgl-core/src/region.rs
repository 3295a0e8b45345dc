//! Membership, boundary, and bound computations for singular-value regions.
//!
//! Two families of regions appear. On raw spectra λ there is the stability
//! region (pairwise products below one together with a positive product-sum
//! expression) and its closure. On squared spectra a = λ² there are:
//!
//! * the squared stability region: a_i a_j ≤ 1 for i ≠ j and
//!   ∏(1−a_i) + Σ_i (1−a₁)⋯a_i⋯(1−a_m) ≥ 0, which is exactly the squared
//!   image of the closed stability region;
//! * the sum-cap polyhedron: Σ a_i ≤ 3 − 1/(m−1) and a_i + a_j ≤ 2;
//! * the slope-cap region: ∏(1+a_i)^{1/2} ≤ μ(m) and a_i + a_j ≤ 2, with
//!   threshold μ(m) = √3·(2 − 1/(m−1))^{1/2}.
//!
//! All verdicts carry a signed margin: the minimum slack over the defining
//! inequalities, each normalized to "expression ≥ 0" form. Inputs are
//! auto-sorted descending by the spectrum constructors; every region is
//! symmetric so this loses nothing.

use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, SquaredSpectrum};

/// Absolute slack tolerance deciding membership and boundary status.
/// The defining expressions are low-degree polynomials of exact user
/// numbers, so double precision leaves a comfortable gap to 1e-12.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Membership verdict for one spectrum against one region.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RegionVerdict {
    pub member: bool,
    /// True only for members whose margin vanishes within [`BOUNDARY_TOL`].
    /// Always false for the open stability region, which contains none of
    /// its boundary.
    pub on_boundary: bool,
    /// Minimum slack over the defining inequalities; +∞ for vacuous cases
    /// (m = 1, where every region degenerates to [0,∞)).
    pub margin: f64,
}

impl RegionVerdict {
    fn closed_from_margin(margin: f64) -> Self {
        let member = margin >= -BOUNDARY_TOL;
        RegionVerdict {
            member,
            on_boundary: member && margin <= BOUNDARY_TOL,
            margin,
        }
    }

    fn open_from_margin(margin: f64) -> Self {
        RegionVerdict {
            member: margin > BOUNDARY_TOL,
            on_boundary: false,
            margin,
        }
    }

    fn vacuous() -> Self {
        RegionVerdict {
            member: true,
            on_boundary: false,
            margin: f64::INFINITY,
        }
    }
}

/// Minimum over i < j of 1 − a_i a_j. Returns +∞ when m = 1.
fn min_pairwise_product_slack(a: &[f64]) -> f64 {
    let mut slack = f64::INFINITY;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            slack = slack.min(1.0 - a[i] * a[j]);
        }
    }
    slack
}

/// Minimum over i < j of 2 − (a_i + a_j). Returns +∞ when m = 1.
fn min_pairwise_sum_slack(a: &[f64]) -> f64 {
    let mut slack = f64::INFINITY;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            slack = slack.min(2.0 - (a[i] + a[j]));
        }
    }
    slack
}

/// Evaluates ∏(1−a_i) + Σ_i (1−a₁)⋯a_i⋯(1−a_m): the product over all
/// entries of (1−a_j), plus, for each i, the same product with the i-th
/// factor replaced by a_i. Constant 1 when m = 1.
fn product_sum_expression(a: &[f64]) -> f64 {
    let mut total: f64 = a.iter().map(|ai| 1.0 - ai).product();
    for i in 0..a.len() {
        let mut term = a[i];
        for (j, aj) in a.iter().enumerate() {
            if j != i {
                term *= 1.0 - aj;
            }
        }
        total += term;
    }
    total
}

/// Stability region on raw spectra: x_i x_j < 1 for all i ≠ j and the
/// product-sum expression of the squares is positive. `closed` switches to
/// the non-strict inequalities. For m = 1 both conditions are vacuous and
/// the verdict is a member with margin +∞.
pub fn stable_region(lambda: &Spectrum, closed: bool) -> RegionVerdict {
    if lambda.len() == 1 {
        return RegionVerdict::vacuous();
    }
    let x = lambda.values();
    let squares: Vec<f64> = x.iter().map(|v| v * v).collect();
    let margin = min_pairwise_product_slack(x).min(product_sum_expression(&squares));
    if closed {
        RegionVerdict::closed_from_margin(margin)
    } else {
        RegionVerdict::open_from_margin(margin)
    }
}

/// Squared stability region: a_i a_j ≤ 1 for all i ≠ j and the product-sum
/// expression is ≥ 0. For m = 1 the expression is the constant 1 and the
/// verdict is a member with margin +∞.
pub fn squared_stable(a: &SquaredSpectrum) -> RegionVerdict {
    if a.len() == 1 {
        return RegionVerdict::vacuous();
    }
    let v = a.values();
    let margin = min_pairwise_product_slack(v).min(product_sum_expression(v));
    RegionVerdict::closed_from_margin(margin)
}

/// True iff `a` sits on the boundary of the squared stability region: the
/// maximum pairwise product equals 1 or the product-sum expression equals 0,
/// within [`BOUNDARY_TOL`]. Rejects non-members.
pub fn squared_stable_boundary(a: &SquaredSpectrum) -> Result<bool> {
    let verdict = squared_stable(a);
    if !verdict.member {
        return Err(Error::Domain(format!(
            "boundary test requires membership in the squared stability region (margin {})",
            verdict.margin
        )));
    }
    Ok(verdict.on_boundary)
}

/// Sum of inverse gaps to one: Σ 1/(1−y_i) for entries y_i ∈ [0, 1).
pub fn inverse_gap_sum(y: &[f64]) -> Result<f64> {
    for &v in y {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "inverse gap sum requires entries in [0,1), got {v}"
            )));
        }
    }
    Ok(y.iter().map(|v| 1.0 / (1.0 - v)).sum())
}

/// Reformulated membership test for the squared stability region in the case
/// a₁ > 1 > a₂ ≥ … ≥ a_m: membership holds iff a₁ a₂ ≤ 1 and
/// 1/(1−a₁) + Σ_{i≥2} 1/(1−a_i) ≤ m − 1. Agrees with [`squared_stable`]
/// everywhere on this domain.
pub fn squared_stable_via_gap_sum(a: &SquaredSpectrum) -> Result<bool> {
    let v = a.values();
    if v.len() < 2 || v[0] <= 1.0 || v[1] >= 1.0 {
        return Err(Error::Domain(
            "gap-sum form requires a₁ > 1 and a_i < 1 for i ≥ 2".into(),
        ));
    }
    if v[0] * v[1] > 1.0 + BOUNDARY_TOL {
        return Ok(false);
    }
    let total = 1.0 / (1.0 - v[0]) + inverse_gap_sum(&v[1..])?;
    Ok(total <= (v.len() - 1) as f64 + BOUNDARY_TOL)
}

/// Slope threshold μ(m) = √3·(2 − 1/(m−1))^{1/2}, strictly increasing in m
/// with limit √6.
pub fn slope_cap_threshold(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!(
            "slope cap threshold needs m ≥ 2, got {m}"
        )));
    }
    Ok(3.0_f64.sqrt() * (2.0 - 1.0 / (m as f64 - 1.0)).sqrt())
}

/// Sum-cap polyhedron: Σ a_i ≤ 3 − 1/(m−1) and a_i + a_j ≤ 2 for i < j.
/// Convex and symmetric. It nests inside the squared stability region for
/// m ≤ 3 but not beyond: from m = 4 on, vertices like
/// (1+t, 1−t, (m−2)/(m−1), 0, …) with t ≤ 1/(m−1) satisfy both cap
/// inequalities while their inverse-gap sum reaches 2m−4 > m−1.
/// For m = 1 the verdict is a member with margin +∞.
pub fn sum_cap(a: &SquaredSpectrum) -> RegionVerdict {
    if a.len() == 1 {
        return RegionVerdict::vacuous();
    }
    let v = a.values();
    let m = v.len() as f64;
    let sum_slack = (3.0 - 1.0 / (m - 1.0)) - v.iter().sum::<f64>();
    let margin = sum_slack.min(min_pairwise_sum_slack(v));
    RegionVerdict::closed_from_margin(margin)
}

/// Slope-cap region: ∏(1+a_i)^{1/2} ≤ μ(m) and a_i + a_j ≤ 2 for i < j.
/// Contained in the sum-cap polyhedron for m ≥ 3; see
/// [`slope_cap_in_scope`] for the m = 2 caveat. For m = 1 the verdict is a
/// member with margin +∞.
pub fn slope_cap(a: &SquaredSpectrum) -> RegionVerdict {
    if a.len() == 1 {
        return RegionVerdict::vacuous();
    }
    let mu = slope_cap_threshold(a.len()).expect("m ≥ 2 here");
    let margin = (mu - a.slope()).min(min_pairwise_sum_slack(a.values()));
    RegionVerdict::closed_from_margin(margin)
}

/// The slope-cap uniqueness argument is stated for m ≥ 3; the m = 2 region
/// is still well defined and evaluated, but callers should surface an
/// out-of-scope flag when this returns false.
pub fn slope_cap_in_scope(m: usize) -> bool {
    m >= 3
}

/// Consistency oracle: membership of λ in the closed stability region must
/// coincide with membership of λ² in the squared stability region.
pub fn squared_equivalence(lambda: &Spectrum) -> bool {
    stable_region(lambda, true).member == squared_stable(&lambda.squared()).member
}
