use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

use coopemit::dynamics::{amplitudes_at, decompose_initial, evolve, uniform_times};
use coopemit::geometry::{collinear_config, equilateral_config};
use coopemit::kernels::{kernel_d, kernel_p};
use coopemit::modes::{
    build_coupling_matrix, eigenmodes, eigenmodes_analytic, eigenmodes_numeric, equilateral_closed_form,
};
use coopemit::reproduce::prepare;
use coopemit::scenario::{parse_scenario, InitialSpec, Scenario};
use coopemit::spectrum::{quadrature_total_spectrum, total_spectrum};
use coopemit::{AtomConfig, Complex64, DetuningGrid, InitialState, ModeSet, ModelParams};

fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn config_strategy() -> impl Strategy<Value = AtomConfig> {
    (
        prop::array::uniform3(prop::array::uniform3(-1.0f64..1.0)),
        0.0f64..PI,
        0.0f64..TAU,
    )
        .prop_filter_map("atoms too close", |(positions, theta, phi)| {
            let close = (0..3).any(|a| {
                (a + 1..3).any(|b| {
                    let d: f64 = (0..3)
                        .map(|k| (positions[a][k] - positions[b][k]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    d < 0.02
                })
            });
            if close {
                return None;
            }
            AtomConfig::with_normalized_dipole(positions.to_vec(), unit(theta, phi), 1e-12).ok()
        })
}

fn modes_of(cfg: &AtomConfig) -> ModeSet {
    eigenmodes(&build_coupling_matrix(cfg, &ModelParams::default()).unwrap()).unwrap()
}

fn scale(modes: &ModeSet) -> f64 {
    modes.eigenvalues().iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn same_multiset(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|za| {
        let best = (0..b.len())
            .filter(|&k| !used[k])
            .min_by(|&i, &j| (za - b[i]).norm().total_cmp(&(za - b[j]).norm()));
        match best {
            Some(k) if (za - b[k]).norm() <= tol => {
                used[k] = true;
                true
            }
            _ => false,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_d_bounded_and_folded(x in 0.0f64..5.0, eta in 0.0f64..PI) {
        let d = kernel_d(x, eta).unwrap();
        prop_assert!(d.abs() <= 1.0 + 1e-15);
        prop_assert!((d - kernel_d(x, PI - eta).unwrap()).abs() <= 1e-15);
        if x > 0.0 {
            let p = kernel_p(x, eta).unwrap();
            prop_assert!((p - kernel_p(x, PI - eta).unwrap()).abs() <= 1e-13 * p.abs().max(1.0));
        }
    }

    #[test]
    fn rigid_motion_invariance(cfg in config_strategy(), axis in prop::array::uniform3(-1.0f64..1.0),
                               angle in 0.0f64..TAU, shift in prop::array::uniform3(-5.0f64..5.0)) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(Vector3::from(axis)), angle);
        let apply = |p: &[f64; 3]| {
            let v = rot * Vector3::from(*p);
            [v.x, v.y, v.z]
        };
        let positions = cfg.positions().iter().map(|p| {
            let v = apply(p);
            [v[0] + shift[0], v[1] + shift[1], v[2] + shift[2]]
        }).collect();
        let moved = AtomConfig::with_normalized_dipole(positions, apply(&cfg.dipole()), 1e-12).unwrap();
        let (a, b) = (modes_of(&cfg), modes_of(&moved));
        prop_assert!(same_multiset(a.eigenvalues(), b.eigenvalues(), 1e-10 * scale(&a)));
    }

    #[test]
    fn permutation_covariance(cfg in config_strategy(), order in Just([0usize, 1, 2]).prop_shuffle()) {
        let a = modes_of(&cfg);
        let b = modes_of(&cfg.permuted(&order).unwrap());
        prop_assert!(same_multiset(a.eigenvalues(), b.eigenvalues(), 1e-10 * scale(&a)));
        if !a.is_degenerate() {
            for m in 0..3 {
                let k = (0..3).min_by(|&i, &j| {
                    (a.eigenvalues()[m] - b.eigenvalues()[i]).norm().total_cmp(&(a.eigenvalues()[m] - b.eigenvalues()[j]).norm())
                }).unwrap();
                let (va, vb) = (a.eigenvector(m), b.eigenvector(k));
                // bilinear normalization fixes each vector up to sign
                let err = |s: f64| (0..3).map(|i| (vb[i] - s * va[order[i]]).norm()).fold(0.0, f64::max);
                prop_assert!(err(1.0).min(err(-1.0)) <= 1e-8, "mode {m}: {va} vs {vb}");
            }
        }
    }

    #[test]
    fn symmetric_function_identities(cfg in config_strategy()) {
        let matrix = build_coupling_matrix(&cfg, &ModelParams::default()).unwrap();
        let modes = eigenmodes_analytic(&matrix).unwrap();
        let l = modes.eigenvalues();
        let g = |i, j| matrix.get(i, j);
        let minors = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1)
            + g(0, 0) * g(2, 2) - g(0, 2) * g(0, 2)
            + g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2);
        let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2))
            - g(0, 1) * (g(0, 1) * g(2, 2) - g(1, 2) * g(0, 2))
            + g(0, 2) * (g(0, 1) * g(1, 2) - g(1, 1) * g(0, 2));
        let e2 = l[0] * l[1] + l[0] * l[2] + l[1] * l[2];
        let e3 = l[0] * l[1] * l[2];
        let s = matrix.norm();
        prop_assert!((e2 - minors).norm() <= 1e-10 * s * s);
        prop_assert!((e3 - det).norm() <= 1e-10 * s * s * s);
        let trace: Complex64 = l.iter().sum();
        prop_assert!((trace - 3.0 * matrix.gamma0()).norm() <= 1e-12 * s.max(1.0));
    }

    #[test]
    fn analytic_matches_numeric(cfg in config_strategy()) {
        let matrix = build_coupling_matrix(&cfg, &ModelParams::default()).unwrap();
        let a = eigenmodes_analytic(&matrix).unwrap();
        let n = eigenmodes_numeric(&matrix).unwrap();
        prop_assert!(same_multiset(a.eigenvalues(), n.eigenvalues(), 1e-10 * scale(&a)));
        prop_assert!(a.rates().iter().all(|&r| r >= -1e-10));
    }

    #[test]
    fn eigen_residuals(cfg in config_strategy()) {
        let matrix = build_coupling_matrix(&cfg, &ModelParams::default()).unwrap();
        let modes = eigenmodes(&matrix).unwrap();
        for m in 0..3 {
            let b = modes.eigenvector(m);
            let r = matrix.apply(&b) - &b * modes.eigenvalues()[m];
            prop_assert!(r.norm() <= 1e-10 * matrix.norm() * b.norm());
        }
    }

    #[test]
    fn semigroup_and_monotone_survival(cfg in config_strategy(), t1 in 0.0f64..3.0, t2 in 0.0f64..3.0, k in 0usize..3) {
        let state = InitialState::excited(3, k).unwrap();
        let (modes, decomp) = prepare(&cfg, &ModelParams::default(), &state).unwrap();
        let mid = InitialState::unnormalized(amplitudes_at(&modes, &decomp, t1).iter().copied().collect());
        let restarted = amplitudes_at(&modes, &decompose_initial(&modes, &mid).unwrap(), t2);
        prop_assert!((restarted - amplitudes_at(&modes, &decomp, t1 + t2)).camax() <= 1e-10);

        let traj = evolve(&modes, &decomp, &uniform_times(10.0, 400).unwrap()).unwrap();
        prop_assert!((traj.survival[0] - 1.0).abs() <= 1e-12);
        for w in traj.survival.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn spectrum_relabeling_invariance(cfg in config_strategy(), order in Just([0usize, 1, 2]).prop_shuffle(), k in 0usize..3) {
        let grid = DetuningGrid::uniform(-10.0, 10.0, 201).unwrap();
        let params = ModelParams::default();
        let spectrum = |cfg: &AtomConfig, k: usize| {
            let (modes, decomp) = prepare(cfg, &params, &InitialState::excited(3, k).unwrap()).unwrap();
            total_spectrum(cfg, &modes, &decomp, &grid).unwrap()
        };
        let a = spectrum(&cfg, order[k]);
        let b = spectrum(&cfg.permuted(&order).unwrap(), k);
        let max = a.max();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-10 * max);
        }
    }

    #[test]
    fn scenario_round_trip(cfg in config_strategy(), gamma in 0.1f64..5.0, delta in -3.0f64..3.0,
                           initial in prop_oneof![(1usize..=3).prop_map(InitialSpec::Excited), Just(InitialSpec::Dicke)]) {
        let mut scenario = Scenario::new(cfg);
        scenario.params = ModelParams::new(gamma, delta).unwrap();
        scenario.initial = initial;
        scenario.direction = Some([0.3, 1.2]);
        let back = parse_scenario(&scenario.to_json().to_string()).unwrap();
        prop_assert_eq!(back, scenario);
    }
}

#[test]
fn small_x_p_asymptote() {
    for eta in [0.0, PI / 4.0, FRAC_PI_2] {
        let x: f64 = 1e-4;
        let limit = 1.5 * (1.0 - 3.0 * eta.cos().powi(2)) / TAU.powi(3);
        let got = x.powi(3) * kernel_p(x, eta).unwrap();
        assert!(((got - limit) / limit).abs() <= 1e-6, "eta {eta}: {got} vs {limit}");
    }
    // sign of the near-field shift: repulsive broadside, attractive end-fire
    assert!(kernel_p(0.05, FRAC_PI_2).unwrap() > 0.0);
    assert!(kernel_p(0.05, 0.0).unwrap() < 0.0);
}

#[test]
fn oscillation_envelope_largest_broadside() {
    // largest |D|, |P| over one wavelength starting at x
    let envelope =
        |f: &dyn Fn(f64) -> f64, x: f64| (0..=1000).map(|j| f(x + j as f64 * 1e-3).abs()).fold(0.0, f64::max);
    for x in [0.5, 0.6, 0.8, 1.0, 2.0, 4.0] {
        for (name, f) in [
            ("D", kernel_d as fn(f64, f64) -> coopemit::Result<f64>),
            ("P", kernel_p),
        ] {
            let broadside = envelope(&|y| f(y, FRAC_PI_2).unwrap(), x);
            for k in 0..8 {
                let eta = k as f64 * FRAC_PI_2 / 8.0;
                let other = envelope(&|y| f(y, eta).unwrap(), x);
                assert!(
                    other <= broadside,
                    "{name} at x = {x}, eta = {eta}: {other} > {broadside}"
                );
            }
        }
    }
}

#[test]
fn equilateral_analytic_matches_closed_form() {
    let params = ModelParams::default();
    for side in [0.01, 0.07, 0.1, 0.2, 0.5, 1.3] {
        let modes =
            eigenmodes_analytic(&build_coupling_matrix(&equilateral_config(side).unwrap(), &params).unwrap()).unwrap();
        let r = equilateral_closed_form(side, &params).unwrap();
        let pick = |rate: f64| {
            modes
                .eigenvalues()
                .iter()
                .copied()
                .min_by(|a, b| (2.0 * a.re - rate).abs().total_cmp(&(2.0 * b.re - rate).abs()))
                .unwrap()
        };
        let (a, b) = (pick(r.gamma_a), pick(r.gamma_b));
        assert!(
            (2.0 * a.re - r.gamma_a).abs() <= 1e-12 && (a.im - r.delta_a).abs() <= 1e-12 * r.delta_a.abs().max(1.0)
        );
        assert!(
            (2.0 * b.re - r.gamma_b).abs() <= 1e-12 && (b.im - r.delta_b).abs() <= 1e-12 * r.delta_b.abs().max(1.0)
        );
    }
}

#[test]
fn asymmetric_line_has_no_dicke_mode() {
    let modes = modes_of(&collinear_config(0.1, 0.2, FRAC_PI_2).unwrap());
    for m in 0..3 {
        let b = modes.eigenvector(m);
        let sum: Complex64 = b.iter().sum();
        let cos = sum.norm() / (3.0f64.sqrt() * b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        assert!(cos < 0.999, "mode {m} is nearly symmetric: {cos}");
    }
}

#[test]
fn quadrature_converges_monotonically() {
    let cfg = collinear_config(0.7, 1.9, 0.3).unwrap();
    let grid = DetuningGrid::uniform(-15.0, 15.0, 601).unwrap();
    let (modes, decomp) = prepare(&cfg, &ModelParams::default(), &InitialState::excited(3, 0).unwrap()).unwrap();
    let closed = total_spectrum(&cfg, &modes, &decomp, &grid).unwrap();
    let deviations: Vec<f64> = (6..=30)
        .step_by(2)
        .map(|order| {
            let q = quadrature_total_spectrum(&cfg, &modes, &decomp, &grid, order).unwrap();
            closed
                .values
                .iter()
                .zip(&q.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / closed.max()
        })
        .collect();
    // decreasing until rounding noise takes over
    for w in deviations.windows(2) {
        assert!(w[1] <= w[0] || w[0] <= 1e-13, "{deviations:?}");
    }
    assert!(
        deviations[0] > 1e-4 && *deviations.last().unwrap() <= 1e-13,
        "{deviations:?}"
    );
}

#[test]
fn zero_state_gives_zero_spectrum() {
    let cfg = equilateral_config(0.1).unwrap();
    let grid = DetuningGrid::uniform(-5.0, 5.0, 51).unwrap();
    let zero = InitialState::unnormalized(vec![Complex64::new(0.0, 0.0); 3]);
    let (modes, decomp) = prepare(&cfg, &ModelParams::default(), &zero).unwrap();
    let closed = total_spectrum(&cfg, &modes, &decomp, &grid).unwrap();
    let quad = quadrature_total_spectrum(&cfg, &modes, &decomp, &grid, 8).unwrap();
    assert!(closed.values.iter().chain(&quad.values).all(|&v| v == 0.0));
}

#[test]
fn small_triangle_keeps_both_lines_on_figure_grid() {
    let series = coopemit::reproduce::figure_spectrum(
        &equilateral_config(0.07).unwrap(),
        &InitialState::excited(3, 0).unwrap(),
    )
    .unwrap();
    let peaks = coopemit::spectrum::find_peaks(&series);
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    let widest = peaks
        .iter()
        .max_by(|a, b| a.fwhm.unwrap().total_cmp(&b.fwhm.unwrap()))
        .unwrap();
    let p = kernel_p(0.07, FRAC_PI_2).unwrap();
    assert!(widest.position > 0.0 && (widest.position - p).abs() < 0.05, "{peaks:?}");
}
