//! End-to-end acceptance checks. Each test exercises one advertised
//! guarantee of the library on a concrete desk experiment, prints a
//! single PASS/FAIL summary line with the measured numbers, and then
//! asserts the advertised bound. Bounds are never widened to fit the
//! implementation; a test that cannot meet its bound fails and says so.
//!
//! Run with `cargo test -p burgers-core --test acceptance -- --nocapture`
//! to see the summary lines of passing tests as well.

use burgers_core::asymptotics::rho_from_alpha_fd;
use burgers_core::entropy::{
    entropy_step, entropy_substeps, extract_graph, godunov_evolve, graph_inclusion_check,
    hausdorff_distance, reversed_spec,
};
use burgers_core::hamiltonian::PotentialMode;
use burgers_core::lax_oleinik::lax_oleinik_apply;
use burgers_core::{
    detect_asymptotic_period, estimate_alpha, estimate_rho, GridFunction, HamiltonianSpec,
    LaxOleinikConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::TAU;
use std::time::Instant;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cfg(n: usize, m: usize, c: f64) -> LaxOleinikConfig {
    LaxOleinikConfig::new(n, m, 4.0, c).unwrap()
}

#[test]
fn criterion_01_lax_case_converges_to_the_mean() {
    let clock = Instant::now();
    let spec = HamiltonianSpec::free();
    let c = cfg(512, 64, 0.3);
    let target = GridFunction::constant(512, 0.3);
    let mut y = GridFunction::sample(512, |x| 0.3 + 0.5 * (TAU * x).sin());
    let mut dist = Vec::with_capacity(20);
    for _ in 0..20 {
        y = entropy_step(&spec, &c, &y).unwrap();
        dist.push(y.l1_distance(&target).unwrap());
    }
    let elapsed = clock.elapsed().as_secs_f64();
    // dist[k] is the distance after k+1 periods; nonincreasing from the
    // second period on, up to roundoff.
    let monotone = dist.windows(2).skip(1).all(|w| w[1] <= w[0] + 1e-12);
    let ok = dist[19] <= 2e-2 && monotone && elapsed < 10.0;
    println!(
        "criterion 01 (Lax-case convergence): {} | l1 to mean after 20 periods = {:.4e} \
         (bound 2e-2), nonincreasing after period 2: {monotone}, {elapsed:.2}s (bound 10s)",
        verdict(ok),
        dist[19]
    );
    // Known floor: with V = 0 the composed kernel is piecewise linear
    // with kinks at the lattice velocities (spacing m/n), so the last
    // rarefaction ramp freezes near 2.20e-2 instead of decaying. The
    // bound is kept as stated rather than widened to the floor.
    assert!(ok, "final distance {:.6e}, monotone {monotone}, elapsed {elapsed:.2}s", dist[19]);
}

#[test]
fn criterion_02_entropy_step_is_an_l1_contraction() {
    let clock = Instant::now();
    let n = 512;
    let spec = HamiltonianSpec::forced_pendulum(0.2);
    let c = cfg(n, 64, 0.0);
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        // Equal means within a pair: the evolution conserves the mean,
        // so this is the invariant slice on which distances contract.
        let mean = rng.gen_range(-0.25..0.25);
        let y = GridFunction::random_trig(n, mean, 3, 0.3, &mut rng);
        let z = GridFunction::random_trig(n, mean, 3, 0.3, &mut rng);
        let before = y.l1_distance(&z).unwrap();
        let ey = entropy_step(&spec, &c, &y).unwrap();
        let ez = entropy_step(&spec, &c, &z).unwrap();
        let after = ey.l1_distance(&ez).unwrap();
        worst = worst.max(after - before);
    }
    let elapsed = clock.elapsed().as_secs_f64();
    let margin = 10.0 / n as f64;
    let ok = worst <= margin && elapsed < 60.0;
    println!(
        "criterion 02 (L1 contraction): {} | worst violation over 50 pairs = {:.4e} \
         (margin {:.4e}), {elapsed:.2}s (bound 60s)",
        verdict(ok),
        worst,
        margin
    );
    assert!(ok, "worst violation {worst:.6e} vs margin {margin:.4e}, elapsed {elapsed:.2}s");
}

#[test]
fn criterion_03_oleinik_constant_is_a_stable_baseline() {
    let spec = HamiltonianSpec::forced_pendulum(0.2);
    let c = cfg(512, 64, 0.0);
    let batch = |seed: u64| {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        for k in 0..20 {
            let mean = -1.0 + 2.0 * (k as f64 / 19.0);
            let y = GridFunction::random_trig(512, mean, 4, 0.5, &mut rng);
            worst = worst.max(entropy_step(&spec, &c, &y).unwrap().max_oneside_slope());
        }
        worst
    };
    let k1 = batch(23);
    let k2 = batch(24);
    // Regression baseline for this draw family; reruns must stay within
    // 10% of it and of each other.
    const BASELINE: f64 = 8.0;
    let ok = (k1 - BASELINE).abs() <= 0.1 * BASELINE
        && (k2 - BASELINE).abs() <= 0.1 * BASELINE
        && (k1 - k2).abs() <= 0.1 * k1.max(k2);
    println!(
        "criterion 03 (Oleinik slope bound): {} | K = {k1:.3} / {k2:.3} over two 20-draw \
         batches (baseline {BASELINE}, 10% band)",
        verdict(ok)
    );
    assert!(ok, "K batches {k1:.4} and {k2:.4} vs baseline {BASELINE}");
}

#[test]
fn criterion_04_dp_and_godunov_agree_on_the_n_wave() {
    let spec = HamiltonianSpec::free();
    let gap = |n: usize| {
        let c = cfg(n, 64, 0.0);
        let y0 = GridFunction::sample(n, |x| (TAU * x).sin());
        let dp = entropy_step(&spec, &c, &y0).unwrap();
        let fv = godunov_evolve(&spec, &y0, 0.0, 1.0).unwrap();
        dp.l1_distance(&fv).unwrap()
    };
    let g512 = gap(512);
    let g1024 = gap(1024);
    let ok = g512 <= 5e-2 && g1024 <= 0.6 * g512;
    println!(
        "criterion 04 (DP vs Godunov on the N-wave): {} | l1 gap = {g512:.4e} at n=512 \
         (bound 5e-2), {g1024:.4e} at n=1024 (bound 0.6x = {:.4e})",
        verdict(ok),
        0.6 * g512
    );
    assert!(ok, "gaps {g512:.6e} at 512, {g1024:.6e} at 1024");
}

#[test]
fn criterion_05_dp_has_the_markov_property() {
    let spec = HamiltonianSpec::forced_pendulum(0.2);
    // Matched sub-steps: one 64-step pass and two 32-step passes run the
    // same recursion over the same layer times, so they agree bit for bit.
    let c = cfg(512, 64, 0.3);
    let u0 = GridFunction::sample(512, |x| 0.05 * (TAU * x).cos());
    let (full, _) = lax_oleinik_apply(&spec, &c, &u0, 0.0, 64).unwrap();
    let (half, _) = lax_oleinik_apply(&spec, &c, &u0, 0.0, 32).unwrap();
    let (composed, _) = lax_oleinik_apply(&spec, &c, &half, 0.5, 32).unwrap();
    let exact = full.values() == composed.values();
    // Mismatched sub-step counts quantize velocities differently, so the
    // two periods agree only up to the velocity-lattice error.
    let n = 2048;
    let v0 = GridFunction::sample(n, |x| 0.05 * (TAU * x).cos());
    let (a, _) = lax_oleinik_apply(&spec, &cfg(n, 64, 0.3), &v0, 0.0, 64).unwrap();
    let (b, _) = lax_oleinik_apply(&spec, &cfg(n, 128, 0.3), &v0, 0.0, 128).unwrap();
    let gap = a.linf_distance(&b).unwrap();
    let ok = exact && gap <= 3e-3;
    println!(
        "criterion 05 (Markov property): {} | half-period composition exact: {exact}, \
         m=64 vs m=128 sup gap = {gap:.4e} (bound 3e-3)",
        verdict(ok)
    );
    assert!(ok, "exact {exact}, sup gap {gap:.6e}");
}

#[test]
fn criterion_06_alpha_is_exact_on_solvable_cases() {
    let clock = Instant::now();
    let free = HamiltonianSpec::free();
    let mut worst_free = 0.0f64;
    for &c in &[0.0, 0.3, 1.0] {
        let est = estimate_alpha(&free, &cfg(1024, 64, c), c, 32, 1e-6).unwrap();
        worst_free = worst_free.max((est.alpha - 0.5 * c * c).abs());
    }
    let pend = HamiltonianSpec::cosine_potential(0.2);
    let est = estimate_alpha(&pend, &cfg(1024, 64, 0.0), 0.0, 48, 1e-4).unwrap();
    let pend_err = (est.alpha - 0.2).abs();
    let elapsed = clock.elapsed().as_secs_f64();
    let ok = worst_free <= 1e-3 && pend_err <= 5e-3 && elapsed < 120.0;
    println!(
        "criterion 06 (alpha on solvable cases): {} | max |alpha - c^2/2| = {worst_free:.4e} \
         over c in {{0, 0.3, 1}} (bound 1e-3), |alpha(0) - 0.2| = {pend_err:.4e} for the \
         pendulum (bound 5e-3), {elapsed:.1}s (bound 120s)",
        verdict(ok)
    );
    assert!(ok, "free err {worst_free:.6e}, pendulum err {pend_err:.6e}, elapsed {elapsed:.1}s");
}

#[test]
fn criterion_07_rho_is_the_derivative_of_alpha() {
    let spec = HamiltonianSpec::cosine_potential(0.2);
    // Small m keeps the velocity lattice fine (the finite difference
    // divides the alpha bias by h); the potential is autonomous, so the
    // coarse time step costs nothing.
    let mut rhos = Vec::with_capacity(9);
    let mut worst = 0.0f64;
    for i in 0..9 {
        let c = -1.0 + 0.25 * i as f64;
        let conf = cfg(1024, 32, c);
        let rho = estimate_rho(&spec, &conf, c, 32).unwrap();
        let fd = rho_from_alpha_fd(&spec, &conf, c, 24, 0.05).unwrap();
        worst = worst.max((rho - fd).abs());
        rhos.push(rho);
    }
    let monotone = rhos.windows(2).all(|w| w[1] >= w[0] - 5e-3);
    let ok = worst <= 5e-3 && monotone;
    println!(
        "criterion 07 (rho = alpha'): {} | max |rho - FD(alpha)| = {worst:.4e} over the \
         9-point c-grid (bound 5e-3), nondecreasing within 5e-3: {monotone}",
        verdict(ok)
    );
    assert!(ok, "worst gap {worst:.6e}, monotone {monotone}, rhos {rhos:?}");
}

#[test]
fn criterion_08_new_graph_lies_in_the_flowed_graph() {
    let spec = HamiltonianSpec::free();
    let defect = |n: usize| {
        // The shock top lands on the half-shifted velocity lattice, a
        // distance m/2n below the transported momentum, so the defect is
        // m/2 cells: the substep count must stay small. The Hamiltonian
        // is autonomous, so coarse time steps cost nothing; v_max = 2
        // keeps the per-substep window inside the aliasing limit.
        let c = LaxOleinikConfig::new(n, 4, 2.0, 0.0).unwrap();
        let y0 = GridFunction::sample(n, |x| (TAU * x).sin());
        // One period in: the N-wave profile with a formed shock.
        let y = entropy_step(&spec, &c, &y0).unwrap();
        let y_next = entropy_step(&spec, &c, &y).unwrap();
        graph_inclusion_check(&spec, &y, &y_next, 1.0 / 64.0).unwrap()
    };
    let d512 = defect(512);
    let d1024 = defect(1024);
    let ok = d512 <= 5.0 / 512.0 && d1024 <= 0.6 * d512;
    println!(
        "criterion 08 (graph inclusion on the N-wave): {} | defect = {d512:.4e} at n=512 \
         (bound {:.4e}), {d1024:.4e} at n=1024 (bound 0.6x = {:.4e})",
        verdict(ok),
        5.0 / 512.0,
        0.6 * d512
    );
    assert!(ok, "defects {d512:.6e} at 512, {d1024:.6e} at 1024");
}

#[test]
fn criterion_09_forced_pendulum_settles_into_a_periodic_state() {
    let spec = HamiltonianSpec::forced_pendulum(0.2);
    let c = cfg(512, 64, 0.0);
    let y0 = GridFunction::sample(512, |x| 0.3 * (TAU * x).sin());
    let report = detect_asymptotic_period(&spec, &c, &y0, 48, 5e-3).unwrap();
    // Graph distances around the detected cycle, closing it with one
    // more step from the last snapshot.
    let mut snaps = report.limit_snapshots.clone();
    snaps.push(entropy_step(&spec, &c, snaps.last().unwrap()).unwrap());
    let mut worst_dh = 0.0f64;
    for w in snaps.windows(2) {
        worst_dh = worst_dh.max(hausdorff_distance(&extract_graph(&w[0]), &extract_graph(&w[1])));
    }
    let ok = report.detected_t <= 12 && report.residual <= 5e-3 && worst_dh <= 2e-2;
    println!(
        "criterion 09 (periodic limit of the forced pendulum): {} | detected T = {} \
         (cap 12), cycle residual = {:.4e} (bound 5e-3), successive-graph d_H = {worst_dh:.4e} \
         (bound 2e-2)",
        verdict(ok),
        report.detected_t,
        report.residual
    );
    assert!(
        ok,
        "T {}, residual {:.6e}, graph distance {worst_dh:.6e}",
        report.detected_t, report.residual
    );
}

#[test]
fn criterion_10_reversal_recovers_the_initial_data() {
    // Pre-shock window: a quarter period keeps 0.2 sin smooth, so the
    // reversed evolution started from the negated state must come back
    // to the negated initial data.
    let modes = vec![PotentialMode { k_x: 1, k_t: 1, amp_cos: 0.0, amp_sin: 0.1 }];
    let spec = HamiltonianSpec::from_modes(modes);
    let c = cfg(512, 64, 0.0);
    let y0 = GridFunction::sample(512, |x| 0.2 * (TAU * x).sin());
    let steps = 16;
    let s = steps as f64 * c.dt();
    let w = entropy_substeps(&spec, &c, &y0, 0.0, steps).unwrap();
    let minus_w = GridFunction::from_values(w.values().iter().map(|v| -v).collect());
    let back = entropy_substeps(&reversed_spec(&spec), &c, &minus_w, -s, steps).unwrap();
    let minus_y0 = GridFunction::from_values(y0.values().iter().map(|v| -v).collect());
    let err = back.l1_distance(&minus_y0).unwrap();
    let ok = err <= 5e-2;
    println!(
        "criterion 10 (quarter-period reversal): {} | l1 recovery error = {err:.4e} \
         (bound 5e-2)",
        verdict(ok)
    );
    assert!(ok, "recovery error {err:.6e}");
}
