//! End-to-end acceptance checks at desk scale. Each test prints a single
//! verdict line so a full run doubles as a checklist:
//! `cargo test --test acceptance -- --nocapture`.

use std::sync::OnceLock;

use mgl_core::grid::{boundary_to_json, GridDomain, GridMap, MapData};
use mgl_core::homotopy::{self, build_homotopy, uniform_t_samples, HomotopyTrace};
use mgl_core::majorization::{self, SampleSpec};
use mgl_core::manifold::ModelManifold;
use mgl_core::region;
use mgl_core::solver::{self, SolverOptions, UniquenessVerdict};
use mgl_core::variation;
use mgl_core::{Spectrum, SquaredSpectrum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn chacha(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn verdict_line(index: usize, label: &str, pass: bool, detail: &str) {
    let status = if pass { "pass" } else { "FAIL" };
    println!("[{index:02}] {label}: {status} ({detail})");
}

fn unit_square(n: usize) -> GridDomain {
    let h = 1.0 / (n - 1) as f64;
    GridDomain::new(n, n, h, h).unwrap()
}

#[test]
fn squared_and_unsquared_stability_membership_agree() {
    let mut rng = chacha(101);
    let mut checked = 0usize;
    let mut disagreements = 0usize;
    for m in 2..=5 {
        for _ in 0..100_000 {
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..3.0)).collect();
            let lambda = Spectrum::new(v).unwrap();
            let direct = region::stable_region(&lambda, true);
            let squared = region::squared_stable(&lambda.squared());
            checked += 1;
            if direct.member != squared.member
                && direct.margin.abs().min(squared.margin.abs()) > 1e-10
            {
                disagreements += 1;
            }
        }
    }
    let pass = disagreements == 0;
    verdict_line(
        1,
        "squared vs unsquared membership",
        pass,
        &format!("{checked} samples, {disagreements} disagreements"),
    );
    assert!(pass);
}

#[test]
fn cap_region_nesting_splits_at_dimension_four() {
    let mut rng = chacha(102);
    let mut slope_members = 0usize;
    let mut sum_members = 0usize;
    let mut slope_chain_violations = 0usize;
    let mut sum_cap_leaks = [0usize; 7];
    let mut oracle_mismatches = 0usize;
    for m in 3..=6usize {
        for _ in 0..100_000 {
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.5)).collect();
            let a = SquaredSpectrum::new(v).unwrap();
            let in_slope = region::slope_cap(&a).member;
            let in_sum = region::sum_cap(&a).member;
            let in_stable = region::squared_stable(&a).member;
            if in_slope {
                slope_members += 1;
                if !in_sum || !in_stable {
                    slope_chain_violations += 1;
                }
            }
            if in_sum {
                sum_members += 1;
                if !in_stable {
                    sum_cap_leaks[m] += 1;
                    let vals = a.values();
                    let gap_form_agrees = vals[0] > 1.0
                        && vals[1] < 1.0
                        && !region::squared_stable_via_gap_sum(&a).unwrap();
                    if !gap_form_agrees {
                        oracle_mismatches += 1;
                    }
                }
            }
        }
    }

    let mut pinned_ok = true;
    for m in 4..=6usize {
        let mut v = vec![0.0; m];
        v[0] = 1.125;
        v[1] = 0.875;
        v[2] = (m as f64 - 2.0) / (m as f64 - 1.0) - 0.01;
        let a = SquaredSpectrum::new(v).unwrap();
        pinned_ok &= region::sum_cap(&a).member
            && !region::squared_stable(&a).member
            && !region::squared_stable_via_gap_sum(&a).unwrap();
    }

    let pass = slope_chain_violations == 0
        && sum_cap_leaks[3] == 0
        && (4..=6).all(|m| sum_cap_leaks[m] > 0)
        && oracle_mismatches == 0
        && pinned_ok
        && slope_members > 1_000
        && sum_members > 1_000;
    verdict_line(
        2,
        "cap nesting: slope cap ⊆ sum cap ∩ stability; sum cap nests only for m ≤ 3",
        pass,
        &format!(
            "{slope_members} slope-cap members with {slope_chain_violations} violations; sum-cap leaks by m: {:?}, gap-form mismatches {oracle_mismatches}",
            &sum_cap_leaks[3..=6]
        ),
    );
    assert!(pass);
}

#[test]
fn slope_thresholds_match_closed_forms_and_increase() {
    let mu2 = region::slope_cap_threshold(2).unwrap();
    let mu3 = region::slope_cap_threshold(3).unwrap();
    let closed_forms = (mu2 - 3.0_f64.sqrt()).abs() <= 1e-12 && (mu3 - 4.5_f64.sqrt()).abs() <= 1e-12;
    let mut increasing = true;
    let mut bounded = true;
    let mut prev = 0.0;
    for m in 2..=60 {
        let mu = region::slope_cap_threshold(m).unwrap();
        increasing &= mu > prev;
        bounded &= mu < 6.0_f64.sqrt();
        prev = mu;
    }
    let approaches_limit = prev > 6.0_f64.sqrt() - 0.05;
    let pass = closed_forms && increasing && bounded && approaches_limit;
    verdict_line(
        3,
        "slope thresholds",
        pass,
        &format!("mu_2 = {mu2:.12}, mu_3 = {mu3:.12}, mu_60 = {prev:.12}"),
    );
    assert!(pass);
}

#[test]
fn slope_root_three_implies_pair_sums_and_slope_cap_membership() {
    let mut rng = chacha(104);
    let target = 3.0_f64.sqrt();
    let log_budget = 3.0_f64.ln();
    let mut accepted = 0usize;
    let mut violations = 0usize;
    for m in 2..=6usize {
        for _ in 0..20_000 {
            let total = rng.random_range(0.0..log_budget);
            let mut cuts: Vec<f64> = (0..m - 1).map(|_| rng.random_range(0.0..1.0)).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.push(1.0);
            let mut v = Vec::with_capacity(m);
            let mut prev = 0.0;
            for &c in &cuts {
                v.push(((c - prev) * total).exp_m1());
                prev = c;
            }
            let a = SquaredSpectrum::new(v).unwrap();
            assert!(a.slope() <= target + 1e-12);
            accepted += 1;
            let vals = a.values();
            for i in 0..m {
                for j in (i + 1)..m {
                    if vals[i] + vals[j] > 2.0 + 1e-12 {
                        violations += 1;
                    }
                }
            }
            if !region::slope_cap(&a).member {
                violations += 1;
            }
        }
    }
    let pass = violations == 0 && accepted >= 100_000;
    verdict_line(
        4,
        "slope ≤ √3 criterion",
        pass,
        &format!("{accepted} in-cap samples, {violations} violations"),
    );
    assert!(pass);
}

#[test]
fn partial_sum_body_matches_the_permutation_hull() {
    let mut rng = chacha(105);
    let mut samples = 0usize;
    let mut disagreements = 0usize;
    for (m, step) in [(2usize, 0.05), (3usize, 0.1)] {
        for _ in 0..5 {
            let x: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.5)).collect();
            let hi = x.iter().cloned().fold(0.0, f64::max) + 0.2;
            let report =
                majorization::body_hull_agreement(&x, &SampleSpec::Grid { step, hi }).unwrap();
            samples += report.samples;
            disagreements += report.disagreements;
        }
    }
    let pass = disagreements == 0;
    verdict_line(
        5,
        "partial-sum body vs hull",
        pass,
        &format!("{samples} lattice points, {disagreements} disagreements"),
    );
    assert!(pass);
}

#[test]
fn inverse_gap_sum_is_maximal_at_the_source_vector() {
    let mut rng = chacha(106);
    let gap_sum = |v: &[f64]| v.iter().map(|t| 1.0 / (1.0 - t)).sum::<f64>();
    let in_unit_box = |v: &[f64]| v.iter().all(|t| (0.0..1.0).contains(t));
    let mut samples = 0usize;
    let mut violations = 0usize;
    let mut mismatches = 0usize;
    for m in [2usize, 3, 4] {
        for k in 0..5 {
            let x: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..0.95)).collect();
            let report = majorization::monotone_convex_bound_check(
                gap_sum,
                in_unit_box,
                &x,
                2_000,
                200 + k,
            )
            .unwrap();
            samples += report.samples;
            violations += report.violations;
            mismatches += report.equality_mismatches;
        }
    }
    let pass = violations == 0 && mismatches == 0 && samples >= 10_000;
    verdict_line(
        6,
        "gap-sum maximum principle",
        pass,
        &format!("{samples} sampled points, {violations} violations, {mismatches} equality mismatches"),
    );
    assert!(pass);
}

#[test]
fn majorization_body_stays_confined_with_rigid_boundary_sums() {
    let mut samples = 0usize;
    let mut escapes = 0usize;
    let mut hits = 0usize;
    let mut worst_gap = 0.0_f64;
    for (x, seed) in [
        (vec![1.4, 0.4], 301u64),
        (vec![1.6, 0.4], 302u64),
        (vec![1.3, 0.5, 0.3], 303u64),
        (vec![1.2, 0.8, 0.5], 304u64),
    ] {
        let report = majorization::confinement_check(region::sum_cap, &x, 5_000, seed).unwrap();
        samples += report.samples;
        escapes += report.escapes;
        hits += report.boundary_hits;
        worst_gap = worst_gap.max(report.worst_sum_gap);
    }
    let pass = escapes == 0 && hits > 0 && worst_gap <= 1e-6;
    verdict_line(
        7,
        "body confinement and boundary sum rigidity",
        pass,
        &format!(
            "{samples} samples, {escapes} escapes, {hits} boundary hits, worst sum gap {worst_gap:.3e}"
        ),
    );
    assert!(pass);
}

fn random_hyperbolic_pair(seed: u64, n: usize) -> (GridMap, GridMap) {
    let manifold = ModelManifold::hyperbolic(3, 1.0);
    let base = manifold.base_point();
    let frame = manifold.frame(&base);
    let mut rng = chacha(seed);
    let c: Vec<f64> = (0..8).map(|_| rng.random_range(-0.4..0.4)).collect();
    let f0 = GridMap::from_fn(unit_square(n), manifold, |x, y| {
        let coords = [
            c[0] * x + c[1] * y + c[2] * x * y,
            c[3] * x + c[4] * y + c[5] * y * y,
            c[6] * x * y + c[7] * x * x,
        ];
        let v = manifold.from_frame_coords(&frame, &coords);
        manifold.exp(&base, &v)
    })
    .unwrap();
    let f1 = solver::perturbed_init(&f0, seed ^ 0xabcd, 0.25);
    (f0, f1)
}

fn hyperbolic_batch() -> &'static [HomotopyTrace] {
    static BATCH: OnceLock<Vec<HomotopyTrace>> = OnceLock::new();
    BATCH.get_or_init(|| {
        (0..50)
            .map(|k| {
                let (f0, f1) = random_hyperbolic_pair(400 + k, 17);
                build_homotopy(&f0, &f1, &uniform_t_samples(33)).unwrap()
            })
            .collect()
    })
}

fn random_euclidean_pair(seed: u64, n: usize, amp: f64) -> (GridMap, GridMap) {
    let mut rng = chacha(seed);
    let c: Vec<f64> = (0..4).map(|_| rng.random_range(-0.5..0.5)).collect();
    let f0 = GridMap::from_fn(unit_square(n), ModelManifold::euclidean(2), |x, y| {
        vec![c[0] * x + c[1] * y, c[2] * x + c[3] * y]
    })
    .unwrap();
    let mut f1 = f0.clone();
    for (i, j) in f0.domain().interior_nodes() {
        let (x, y) = f0.domain().position(i, j);
        let bump = amp * (PI * x).sin() * (PI * y).sin();
        let p = f0.value(i, j).to_vec();
        f1.set_value(i, j, &[p[0] + bump, p[1] - 0.6 * bump]);
    }
    (f0, f1)
}

#[test]
fn partial_spectrum_sums_stay_below_the_chord_interpolant() {
    let mut worst_rel = 0.0_f64;
    for trace in hyperbolic_batch() {
        for l in [1usize, 2] {
            let report = homotopy::partial_sum_domination(trace, l, 0.0, 1.0).unwrap();
            let rel = report.worst_excess / report.max_spectrum.max(1e-300);
            worst_rel = worst_rel.max(rel);
        }
    }

    let mut worst_oracle_gap = 0.0_f64;
    for k in 0..10 {
        let (f0, f1) = random_euclidean_pair(500 + k, 17, 0.2);
        let trace = build_homotopy(&f0, &f1, &uniform_t_samples(33)).unwrap();
        let domain = trace.domain().clone();
        let h = domain.hx();
        for (s, _) in trace.t_samples().iter().enumerate() {
            let map = trace.map_at(s);
            for (i, j) in domain.interior_nodes() {
                let col = |di: usize, dj: usize, si: usize, sj: usize, c: usize| {
                    (map.value(i + di, j + dj)[c] - map.value(i - si, j - sj)[c]) / (2.0 * h)
                };
                let jx = [col(1, 0, 1, 0, 0), col(1, 0, 1, 0, 1)];
                let jy = [col(0, 1, 0, 1, 0), col(0, 1, 0, 1, 1)];
                let g11 = jx[0] * jx[0] + jx[1] * jx[1];
                let g22 = jy[0] * jy[0] + jy[1] * jy[1];
                let g12 = jx[0] * jy[0] + jx[1] * jy[1];
                let tr = g11 + g22;
                let disc = ((g11 - g22) * (g11 - g22) + 4.0 * g12 * g12).sqrt();
                let expected = [(tr + disc) / 2.0, (tr - disc) / 2.0];
                let got = trace.spectrum_at(s, i, j).unwrap().values();
                worst_oracle_gap = worst_oracle_gap
                    .max((got[0] - expected[0]).abs())
                    .max((got[1] - expected[1]).abs());
            }
        }
    }

    let pass = worst_rel <= 1e-6 && worst_oracle_gap <= 1e-8;
    verdict_line(
        8,
        "chord domination of partial sums",
        pass,
        &format!(
            "50 curved pairs, worst relative excess {worst_rel:.3e}; flat spectra oracle gap {worst_oracle_gap:.3e}"
        ),
    );
    assert!(pass);
}

#[test]
fn frame_frozen_energy_sums_are_convex_in_time() {
    let mut worst = f64::INFINITY;
    let mut scale = 0.0_f64;
    for trace in hyperbolic_batch() {
        for k in [1usize, 2] {
            let report = homotopy::fk_convexity(trace, k).unwrap();
            worst = worst.min(report.min_second_difference);
            scale = scale.max(report.max_fk);
        }
    }
    let pass = worst >= -1e-5 * scale;
    verdict_line(
        9,
        "energy sum convexity",
        pass,
        &format!("min second difference {worst:.3e}, max F_k {scale:.3e}"),
    );
    assert!(pass);
}

fn graded_t_samples(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let u = k as f64 / (count - 1) as f64;
            u + 0.3 * u * (1.0 - u) * (1.0 - 2.0 * u)
        })
        .collect()
}

#[test]
fn variation_terms_match_finite_differences_at_second_order() {
    let probe = |n: usize, samples: usize| {
        let manifold = ModelManifold::hyperbolic(2, 1.0);
        let base = manifold.base_point();
        let frame = manifold.frame(&base);
        let f0 = GridMap::from_fn(unit_square(n), manifold, |x, y| {
            let v = manifold
                .from_frame_coords(&frame, &[0.5 * x - 0.1 * y * y, 0.4 * y + 0.2 * x]);
            manifold.exp(&base, &v)
        })
        .unwrap();
        let f1 = solver::perturbed_init(&f0, 77, 0.3);
        let trace = build_homotopy(&f0, &f1, &graded_t_samples(samples)).unwrap();
        let t = trace.t_samples()[samples / 4];
        variation::second_variation_terms(&trace, t).unwrap()
    };
    let coarse = probe(17, 33);
    let fine = probe(33, 65);

    let rel_coarse = (coarse.total - coarse.fd_total).abs() / coarse.fd_total.abs().max(1e-12);
    let rel_fine = (fine.total - fine.fd_total).abs() / fine.fd_total.abs().max(1e-12);
    let order = ((coarse.total - coarse.fd_total).abs()
        / (fine.total - fine.fd_total).abs().max(1e-300))
    .log2();
    let iv_shrinks = fine.term_iv.abs() < coarse.term_iv.abs();
    let signs = coarse.term_v >= -1e-12
        && fine.term_v >= -1e-12
        && coarse.term_iii >= 0.0
        && fine.term_iii >= 0.0;

    let pass = rel_coarse <= 1e-3 && rel_fine <= 1e-3 && order >= 1.8 && iv_shrinks && signs;
    verdict_line(
        10,
        "second-variation decomposition vs finite differences",
        pass,
        &format!(
            "rel gaps {rel_coarse:.3e}/{rel_fine:.3e}, order {order:.2}, term iv {:.3e}→{:.3e}",
            coarse.term_iv.abs(),
            fine.term_iv.abs()
        ),
    );
    assert!(pass);
}

#[test]
fn in_region_homotopies_have_nonnegative_second_variation() {
    let mut confined_instances = 0usize;
    let mut worst_ratio = f64::INFINITY;
    let mut checked = 0usize;

    let mut instances: Vec<(GridMap, GridMap)> = Vec::new();
    for k in 0..10 {
        instances.push(random_euclidean_pair(700 + k, 9, 0.12));
    }
    for k in 0..10 {
        let manifold = ModelManifold::hyperbolic(2, 1.0);
        let base = manifold.base_point();
        let frame = manifold.frame(&base);
        let mut rng = chacha(800 + k);
        let c: Vec<f64> = (0..4).map(|_| rng.random_range(-0.4..0.4)).collect();
        let f0 = GridMap::from_fn(unit_square(9), manifold, |x, y| {
            let v = manifold
                .from_frame_coords(&frame, &[c[0] * x + c[1] * y, c[2] * x + c[3] * y]);
            manifold.exp(&base, &v)
        })
        .unwrap();
        let f1 = solver::perturbed_init(&f0, 900 + k, 0.15);
        instances.push((f0, f1));
    }

    for (f0, f1) in &instances {
        let trace = build_homotopy(f0, f1, &uniform_t_samples(9)).unwrap();
        let summary = homotopy::confinement_check(&trace, region::squared_stable).unwrap();
        let fully_confined = summary.status == homotopy::ConfinementStatus::Confined
            && summary.hypothesis_nodes == summary.nodes_checked;
        if !fully_confined {
            continue;
        }
        confined_instances += 1;
        for &t in &trace.t_samples()[1..8] {
            let report = variation::second_variation_terms(&trace, t).unwrap();
            let area = trace
                .map_at(trace.sample_index(t).unwrap())
                .graph_volume()
                .unwrap();
            worst_ratio = worst_ratio.min(report.total / area);
            checked += 1;
        }
    }

    let pass = confined_instances >= 15 && worst_ratio >= -1e-8;
    verdict_line(
        11,
        "second variation sign inside the stability region",
        pass,
        &format!(
            "{confined_instances} confined instances, {checked} interior samples, min total/A {worst_ratio:.3e}"
        ),
    );
    assert!(pass);
}

#[test]
fn solver_recovers_affine_data_and_converges_on_sine_data() {
    let affine = GridMap::from_fn(unit_square(17), ModelManifold::euclidean(2), |x, y| {
        vec![0.7 * x - 0.2 * y + 0.1, 0.3 * x + 0.5 * y - 0.4]
    })
    .unwrap();
    let data = MapData::from_json(&boundary_to_json(&affine)).unwrap();
    let init = solver::harmonic_extension(&data).unwrap();
    let opts = SolverOptions {
        tol_residual: 1e-11,
        ..Default::default()
    };
    let run = solver::solve(&init, &opts).unwrap();
    let recovery = run.map.sup_distance(&affine).unwrap();

    let sine = GridMap::from_fn(unit_square(33), ModelManifold::euclidean(2), |x, y| {
        vec![
            0.5 * x + 0.3 * (PI * x).sin() * (PI * y).sin(),
            0.6 * y - 0.1 * x,
        ]
    })
    .unwrap();
    let sine_data = MapData::from_json(&boundary_to_json(&sine)).unwrap();
    let sine_init = solver::harmonic_extension(&sine_data).unwrap();
    let sine_run = solver::solve(&sine_init, &SolverOptions::default()).unwrap();

    let pass = run.converged
        && run.final_residual <= 1e-10
        && recovery <= 1e-8
        && sine_run.converged
        && sine_run.final_residual <= 1e-8;
    verdict_line(
        12,
        "solver on affine and sine boundary data",
        pass,
        &format!(
            "affine residual {:.3e}, recovery {recovery:.3e}; sine residual {:.3e}",
            run.final_residual, sine_run.final_residual
        ),
    );
    assert!(pass);
}

#[test]
fn gentle_boundaries_yield_a_unique_solution_verdict() {
    let boundary = GridMap::from_fn(unit_square(17), ModelManifold::euclidean(2), |x, y| {
        vec![
            0.8 * x - 0.2 * y + 0.1 * (PI * x).sin() * (PI * y).sin(),
            0.3 * x + 0.7 * y,
        ]
    })
    .unwrap();
    let data = MapData::from_json(&boundary_to_json(&boundary)).unwrap();
    let report = solver::uniqueness_experiment(
        &data,
        region::slope_cap,
        &SolverOptions::default(),
        1e-6,
    )
    .unwrap();
    let pass = report.verdict == UniquenessVerdict::Unique
        && report.max_pair_distance < 1e-6
        && report.in_region.iter().all(|&b| b);
    verdict_line(
        13,
        "uniqueness experiment on slope-bounded data",
        pass,
        &format!(
            "distance {:.3e}, min margin {:.3e}",
            report.max_pair_distance, report.min_margin
        ),
    );
    assert!(pass);
}
