//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cavmag::dispersive::{
    effective_hamiltonian, magnon_magnon_coupling, validity_margin, ValidityMargin,
};
use cavmag::formfactor::{
    coupling_phase, form_factor, sample_volume, FieldMap, FieldPoint, SampleRegion,
};
use cavmag::gauge::{loop_phases, rotate_mode};
use cavmag::inout::{s21_closed_form, s21_general, transmission_map, ProbeGrid};
use cavmag::model::{
    build_hamiltonian, two_sphere_system, Coupling, CouplingGraph, Mode, SystemParams,
};
use cavmag::spectrum::{diagonalize, minimum_gap, sweep_spectrum, SweepParameter, SweepSpec};

fn report(id: u32, name: &str, detail: &str) {
    println!("criterion {id:02} {name}: PASS ({detail})");
}

fn reference_params(theta: f64) -> SystemParams {
    // omega_{c,0} = 4 GHz, omega_{c,1} = 6 GHz, g0 = g1 = 0.03 * 5 GHz
    SystemParams {
        omega_c: 5.0,
        delta_c: 1.0,
        omega_m: 5.0,
        delta_m: 0.0,
        g0: 0.15,
        g1: 0.15,
        theta,
        ..SystemParams::default()
    }
}

fn polaritons(params: &SystemParams) -> cavmag::spectrum::PolaritonSet {
    diagonalize(&build_hamiltonian(&two_sphere_system(params).unwrap()).unwrap()).unwrap()
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Strict local maxima of |S21| along the probe axis of one map row.
fn row_peaks(probe: &[f64], mags: &[f64]) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    for i in 1..mags.len() - 1 {
        if mags[i] > mags[i - 1] && mags[i] > mags[i + 1] {
            peaks.push((probe[i], mags[i]));
        }
    }
    peaks
}

#[test]
fn criterion_01_crossing_versus_anticrossing() {
    let clock = Instant::now();
    let cross = polaritons(&reference_params(0.0));
    let gap0 = cross.frequencies[2] - cross.frequencies[1];
    assert!(gap0 < 1e-9, "theta=0 middle gap {gap0} should vanish");

    let repel = polaritons(&reference_params(PI));
    let gap_pi = repel.frequencies[2] - repel.frequencies[1];
    let bound = 0.8 * 2.0 * (0.15_f64.powi(2) + 0.15_f64.powi(2)) / 1.0;
    assert!(gap_pi > bound, "theta=pi middle gap {gap_pi} <= {bound}");

    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    report(
        1,
        "crossing-vs-anticrossing",
        &format!("theta0 gap {gap0:.2e} GHz, theta_pi gap {gap_pi:.4} GHz, {elapsed:?}"),
    );
}

#[test]
fn criterion_02_dispersive_gap_magnitude() {
    let clock = Instant::now();
    let params = SystemParams {
        g0: 0.05,
        g1: 0.05,
        theta: PI,
        ..reference_params(PI)
    };
    let sweep = SweepSpec::new(SweepParameter::DeltaM, -0.2, 0.2, 401).unwrap();
    let table = sweep_spectrum(&params, &sweep).unwrap();
    let found = minimum_gap(&table, 1, 2).unwrap();
    let predicted = 2.0 * magnon_magnon_coupling(&params).unwrap().norm();
    assert!((predicted - 0.010).abs() < 1e-15);
    let rel = (found.gap - predicted).abs() / predicted;
    assert!(
        rel < 0.05,
        "gap {} vs 2|G_pi| {predicted}: {rel:.3}",
        found.gap
    );
    assert!(
        found.parameter.abs() < 1e-3,
        "minimum at delta_m = {}",
        found.parameter
    );
    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    report(
        2,
        "dispersive-gap-magnitude",
        &format!(
            "min gap {:.6} GHz at delta_m {:.2e}, 2|G_pi| = {predicted:.3} GHz, rel err {rel:.4}",
            found.gap, found.parameter
        ),
    );
}

#[test]
fn criterion_03_minimum_gap_location() {
    let params = SystemParams {
        g0: 0.04,
        g1: 0.06,
        theta: 0.0,
        ..reference_params(0.0)
    };
    let sweep = SweepSpec::new(SweepParameter::DeltaM, -0.05, 0.05, 101).unwrap();
    let table = sweep_spectrum(&params, &sweep).unwrap();
    let found = minimum_gap(&table, 1, 2).unwrap();
    assert!(
        found.parameter.abs() <= 1e-3,
        "minimal gap at delta_m = {}",
        found.parameter
    );
    let at_min = polaritons(&SystemParams {
        delta_m: found.parameter,
        ..params
    });
    let center = 0.5 * (at_min.frequencies[1] + at_min.frequencies[2]);
    let shifted = 5.0 + (0.04_f64.powi(2) - 0.06_f64.powi(2)) / 1.0;
    assert!((shifted - 4.9980).abs() < 1e-12);
    assert!(
        (center - shifted).abs() <= 1e-3,
        "gap centered at {center}, expected {shifted}"
    );
    report(
        3,
        "minimum-gap-location",
        &format!(
            "delta_m* = {:.2e}, center {center:.6} GHz vs omega_c' = {shifted:.4} GHz",
            found.parameter
        ),
    );
}

#[test]
fn criterion_04_dark_mode_brightness() {
    let sweep = SweepSpec::new(SweepParameter::OmegaM, 3.4, 6.6, 601).unwrap();
    let mut worst_dark: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    for i in 0..sweep.steps {
        let p = sweep.apply(&reference_params(0.0), i);
        let pols = polaritons(&p);
        let dark: Vec<usize> = (0..4).filter(|&mu| pols.brightness[mu] < 1e-10).collect();
        assert_eq!(
            dark.len(),
            1,
            "row {i} (omega_m = {}): brightness {:?}",
            sweep.value(i),
            pols.brightness
        );
        let mu = dark[0];
        worst_dark = worst_dark.max(pols.brightness[mu]);
        let v2 = pols.vectors[(2, mu)];
        let v3 = pols.vectors[(3, mu)];
        let mismatch = (v2 + v3).norm();
        worst_pair = worst_pair.max(mismatch);
        assert!(mismatch < 1e-10, "row {i}: v2 = {v2}, v3 = {v3}");
    }
    for i in 0..sweep.steps {
        let p = sweep.apply(&reference_params(PI), i);
        let pols = polaritons(&p);
        assert!(
            pols.brightness.iter().all(|&b| b > 1e-4),
            "theta=pi row {i}: brightness {:?}",
            pols.brightness
        );
    }
    report(
        4,
        "dark-mode-brightness",
        &format!(
            "601 rows: one dark branch each (max weight {worst_dark:.1e}), max |v2+v3| {worst_pair:.1e}; theta=pi all bright"
        ),
    );
}

#[test]
fn criterion_05_transmission_dark_line() {
    let clock = Instant::now();
    let sweep = SweepSpec::new(SweepParameter::OmegaM, 3.4, 6.6, 601).unwrap();
    let grid = ProbeGrid::uniform(3.4, 6.6, 601, sweep).unwrap();
    let map0 = transmission_map(&reference_params(0.0), &grid).unwrap();
    let map_pi = transmission_map(&reference_params(PI), &grid).unwrap();
    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "maps took {elapsed:?}");

    let window = 2.0 * (0.001 + 0.005); // 2 (kappa + gamma)

    // theta = 0 at omega_m = 5: the dark eigenfrequency is exactly omega_m
    let row = 300;
    assert!((map0.sweep_values[row] - 5.0).abs() < 1e-12);
    let mags0: Vec<f64> = map0.s21[row].iter().map(|z| z.norm()).collect();
    let peaks0 = row_peaks(&map0.probe_ghz, &mags0);
    assert!(!peaks0.is_empty());
    let dark_freq = 5.0;
    assert!(
        peaks0.iter().all(|&(w, _)| (w - dark_freq).abs() > window),
        "peak within {window} GHz of the dark branch: {peaks0:?}"
    );
    let dark_value = s21_closed_form(&reference_params(0.0), dark_freq)
        .unwrap()
        .norm();
    let smallest_peak = peaks0.iter().map(|&(_, m)| m).fold(f64::INFINITY, f64::min);
    assert!(
        dark_value < 0.1 * smallest_peak,
        "dark |S21| {dark_value} vs smallest bright peak {smallest_peak}"
    );

    // theta = pi: every polariton frequency hosts a local maximum
    let pols = polaritons(&reference_params(PI));
    let mags_pi: Vec<f64> = map_pi.s21[row].iter().map(|z| z.norm()).collect();
    let peaks_pi = row_peaks(&map_pi.probe_ghz, &mags_pi);
    for &freq in &pols.frequencies {
        let hit = peaks_pi.iter().any(|&(w, _)| (w - freq).abs() <= window);
        assert!(
            hit,
            "no |S21| maximum within {window} GHz of {freq} GHz: {peaks_pi:?}"
        );
    }
    report(
        5,
        "transmission-dark-line",
        &format!(
            "dark |S21| {dark_value:.2e} vs smallest bright peak {smallest_peak:.3}; theta=pi peaks at all 4 branches; 2x601x601 maps in {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_06_symmetry_breaking_illumination() {
    let dark_params = reference_params(0.0);
    let baseline = s21_closed_form(&dark_params, 5.0).unwrap().norm();

    let lit_params = SystemParams {
        delta_m: 0.05,
        ..dark_params
    };
    let pols = polaritons(&lit_params);
    let (formerly_dark, _) = pols
        .brightness
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let center = pols.frequencies[formerly_dark];
    let mut peak: f64 = 0.0;
    for i in 0..=2000 {
        let w = center - 0.012 + 0.024 * i as f64 / 2000.0;
        peak = peak.max(s21_closed_form(&lit_params, w).unwrap().norm());
    }
    assert!(
        peak > 10.0 * baseline,
        "peak {peak:.3e} vs 10x dark baseline {:.3e}",
        10.0 * baseline
    );
    report(
        6,
        "symmetry-breaking-illumination",
        &format!(
            "delta_m = 0.05: peak {peak:.3e} at branch {center:.4} GHz, {:.0}x the delta_m = 0 value {baseline:.3e}",
            peak / baseline
        ),
    );
}

#[test]
fn criterion_07_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97ed);
    let mut worst: f64 = 0.0;
    for draw in 0..1000 {
        let params = SystemParams {
            omega_c: rng.random_range(4.0..6.0),
            delta_c: rng.random_range(0.2..1.5),
            omega_m: rng.random_range(4.0..6.0),
            delta_m: rng.random_range(0.0..0.4),
            g0: rng.random_range(0.0..0.25),
            g1: rng.random_range(0.0..0.25),
            theta: rng.random_range(0.0..TAU),
            kappa: rng.random_range(1e-4..5e-3),
            gamma_a: [rng.random_range(1e-3..1e-2), rng.random_range(1e-3..1e-2)],
            gamma_b: [rng.random_range(1e-3..1e-2), rng.random_range(1e-3..1e-2)],
        };
        let graph = two_sphere_system(&params).unwrap();
        let probe = rng.random_range(3.0..7.0);
        let closed = s21_closed_form(&params, probe).unwrap();
        let general = s21_general(&graph, "a", "b", probe).unwrap();
        let scale = closed.norm().max(general.norm()).max(1e-300);
        let rel = (closed - general).norm() / scale;
        assert!(rel < 1e-10, "draw {draw}: rel {rel:.2e} at probe {probe}");
        worst = worst.max(rel);
    }
    report(
        7,
        "oracle-equivalence",
        &format!("1000 draws, worst closed-vs-general relative deviation {worst:.2e}"),
    );
}

fn random_graph(rng: &mut ChaCha8Rng) -> CouplingGraph {
    let n = rng.random_range(3..=7);
    let modes: Vec<Mode> = (0..n)
        .map(|i| {
            let id = format!("v{i}");
            let freq = rng.random_range(4.0..6.0);
            let cavity = i == 0 || rng.random_bool(0.5);
            let mut mode = if cavity {
                Mode::cavity(id, freq)
            } else {
                Mode::magnon(id, freq)
            };
            mode.intrinsic_loss = 1e-3;
            if cavity {
                mode.bath_couplings
                    .insert("a".into(), rng.random_range(1e-3..1e-2));
                mode.bath_couplings
                    .insert("b".into(), rng.random_range(1e-3..1e-2));
            }
            mode
        })
        .collect();

    let mut pairs = std::collections::BTreeSet::new();
    let mut couplings = Vec::new();
    let add_edge = |a: usize,
                    b: usize,
                    pairs: &mut std::collections::BTreeSet<(usize, usize)>,
                    couplings: &mut Vec<Coupling>,
                    rng: &mut ChaCha8Rng| {
        let key = (a.min(b), a.max(b));
        if a != b && pairs.insert(key) {
            couplings.push(Coupling::new(
                format!("v{a}"),
                format!("v{b}"),
                rng.random_range(0.01..0.3),
                rng.random_range(0.0..TAU),
            ));
        }
    };
    for i in 1..n {
        let j = rng.random_range(0..i);
        add_edge(j, i, &mut pairs, &mut couplings, rng);
    }
    for _ in 0..rng.random_range(0..3) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        add_edge(a, b, &mut pairs, &mut couplings, rng);
    }
    CouplingGraph::new(modes, couplings).unwrap()
}

#[test]
fn criterion_08_gauge_invariance_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a06e);
    let mut worst_eig: f64 = 0.0;
    let mut worst_loop: f64 = 0.0;
    let mut worst_s21: f64 = 0.0;
    for _ in 0..100 {
        let graph = random_graph(&mut rng);
        let base_eigs = diagonalize(&build_hamiltonian(&graph).unwrap())
            .unwrap()
            .frequencies;
        let base_loops = loop_phases(&graph);
        let probes = [4.3, 5.0, 5.7];
        let base_s21: Vec<Complex64> = probes
            .iter()
            .map(|&w| s21_general(&graph, "a", "b", w).unwrap())
            .collect();

        // arbitrary rotations on every mode: spectrum and loop phases
        let mut rotated = graph.clone();
        for mode in graph.modes() {
            rotated = rotate_mode(&rotated, &mode.id, rng.random_range(0.0..TAU)).unwrap();
        }
        let eigs = diagonalize(&build_hamiltonian(&rotated).unwrap())
            .unwrap()
            .frequencies;
        for (a, b) in base_eigs.iter().zip(&eigs) {
            let d = (a - b).abs();
            assert!(d < 1e-12, "eigenvalue drift {d:.2e}");
            worst_eig = worst_eig.max(d);
        }
        let loops = loop_phases(&rotated);
        assert_eq!(base_loops.len(), loops.len());
        for (a, b) in base_loops.iter().zip(&loops) {
            assert_eq!(a.cycle, b.cycle);
            let d = angular_distance(a.theta, b.theta);
            assert!(d < 1e-12, "loop phase drift {d:.2e}");
            worst_loop = worst_loop.max(d);
        }

        // magnon-only rotations: |S21| untouched
        let mut magnon_rotated = graph.clone();
        for mode in graph.modes() {
            if mode.kind == cavmag::ModeKind::Magnon {
                magnon_rotated =
                    rotate_mode(&magnon_rotated, &mode.id, rng.random_range(0.0..TAU)).unwrap();
            }
        }
        for (&w, base) in probes.iter().zip(&base_s21) {
            let s = s21_general(&magnon_rotated, "a", "b", w).unwrap();
            let d = (s.norm() - base.norm()).abs();
            assert!(d < 1e-12, "|S21| drift {d:.2e}");
            worst_s21 = worst_s21.max(d);
        }
    }
    report(
        8,
        "gauge-invariance-suite",
        &format!(
            "100 graphs: eigenvalue drift <= {worst_eig:.1e}, loop-phase drift <= {worst_loop:.1e}, |S21| drift <= {worst_s21:.1e}"
        ),
    );
}

#[test]
fn criterion_09_schrieffer_wolff_accuracy() {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for theta in [0.0, PI / 2.0, PI] {
        for delta_m in [0.0, 0.02, 0.05] {
            for (g0, g1) in [(0.03, 0.03), (0.04, 0.04), (0.03, 0.045)] {
                let params = SystemParams {
                    g0,
                    g1,
                    theta,
                    delta_m,
                    ..reference_params(theta)
                };
                let margin = match validity_margin(&params) {
                    ValidityMargin::Finite(m) => m,
                    ValidityMargin::Singular { .. } => panic!("unexpected singularity"),
                };
                assert!(
                    margin <= 0.05,
                    "margin {margin} outside the dispersive regime"
                );
                let eff = effective_hamiltonian(&params).unwrap();
                let approx = eff.magnon_eigenvalues();
                let exact = polaritons(&params);
                let mid = [exact.frequencies[1], exact.frequencies[2]];
                for (a, b) in approx.iter().zip(mid) {
                    let d = (a - b).abs();
                    assert!(
                        d < 5e-4,
                        "theta={theta} dm={delta_m} g=({g0},{g1}): eff {a} vs exact {b}"
                    );
                    worst = worst.max(d);
                }
                checked += 1;
            }
        }
    }
    report(
        9,
        "schrieffer-wolff-accuracy",
        &format!("{checked} parameter sets, worst middle-branch deviation {worst:.2e} GHz"),
    );
}

fn uniform_grid_64(h: [Complex64; 3]) -> FieldMap {
    let n = 64;
    let step = 1.0 / n as f64;
    let vol = step * step * step;
    let mut points = Vec::with_capacity(n * n * n);
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                points.push(FieldPoint {
                    position: [
                        (ix as f64 + 0.5) * step,
                        (iy as f64 + 0.5) * step,
                        (iz as f64 + 0.5) * step,
                    ],
                    h,
                    cell_volume: vol,
                });
            }
        }
    }
    FieldMap::new(points).unwrap()
}

#[test]
fn criterion_10_form_factor_analytics() {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let region = SampleRegion::new([0.5, 0.5, 0.5], 0.25).unwrap();

    let x_field = uniform_grid_64([one, zero, zero]);
    let eta = form_factor(&x_field, &region).unwrap();
    let vm = sample_volume(&x_field, &region).unwrap();
    let vc = x_field.total_volume();
    let expect = (vm / vc).sqrt();
    assert!(
        (eta - expect).abs() < 1e-6,
        "eta {eta} vs sqrt(V_m/V_c) {expect}"
    );
    assert_eq!(coupling_phase(&x_field, &region).unwrap(), 0.0);

    let y_field = uniform_grid_64([zero, one, zero]);
    assert_eq!(coupling_phase(&y_field, &region).unwrap(), PI / 2.0);

    let minus_x = uniform_grid_64([-one, zero, zero]);
    assert_eq!(coupling_phase(&minus_x, &region).unwrap(), PI);

    let eta_flipped = form_factor(&minus_x, &region).unwrap();
    assert!((eta - eta_flipped).abs() < 1e-15);
    let shift = angular_distance(
        coupling_phase(&minus_x, &region).unwrap(),
        coupling_phase(&x_field, &region).unwrap() + PI,
    );
    assert!(shift < 1e-15);

    report(
        10,
        "form-factor-analytics",
        &format!(
            "64^3 grid: eta {eta:.6e} = sqrt(V_m/V_c) within {:.1e}; phases 0, pi/2, pi exact; sign flip shifts phi by pi",
            (eta - expect).abs()
        ),
    );
}
