//! Acceptance suite: the release gate for the simulator. Each test covers
//! one numbered criterion and prints a single PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use lhvsim::p1::{choi_pm_from_ent, match_table, p1_weight, pm_empirical, P1Params};
use lhvsim::prtq::{prtq_equivalence_report, BlochVector};
use lhvsim::qmath::Basis;
use lhvsim::sampling::{
    calibrate_scale, random_basis, random_pure_state, random_unitary, RngStream,
};
use lhvsim::scenarios::{
    cglmp_deterministic_maximum, cglmp_quantum_joints, cglmp_setup, cglmp_study, cglmp_value,
    delta_sweep, phi_study, randomized_study, tvd, P1Protocol, Protocol, PrtqRejectionProtocol,
    Scenario, StudyConfig,
};
use lhvsim::stats::{linear_slope, ks_uniform_p_value};

fn check(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] {criterion}: {status} ({detail})");
    assert!(pass, "{criterion}: {detail}");
}

fn study(d: usize, n: usize, n_ini: usize, seed: u64, scenario: Scenario) -> lhvsim::StudyReport {
    let protocol = P1Protocol::with_defaults(d);
    let cfg = StudyConfig {
        d,
        n_setups: n,
        n_ini,
        seed,
        shared_pool: false,
    };
    randomized_study(&protocol, scenario, &cfg).unwrap()
}

#[test]
fn criterion_01_d2_exactness_and_convergence() {
    let t0 = Instant::now();
    let report = study(2, 20, 40_000, 101, Scenario::Pm);
    let mean = report.mean_delta;

    // TVD against N_out over two decades; exactness means pure sampling
    // noise, hence a -1/2 power law
    let mut log_n = Vec::new();
    let mut log_delta = Vec::new();
    for (i, &(n_setups, n_ini)) in [(20usize, 4_000usize), (20, 40_000), (10, 400_000)]
        .iter()
        .enumerate()
    {
        let r = study(2, n_setups, n_ini, 110 + i as u64, Scenario::Pm);
        let mean_n_out = r.total_n_out() as f64 / n_setups as f64;
        log_n.push(mean_n_out.ln());
        log_delta.push(r.mean_delta.ln());
    }
    let slope = linear_slope(&log_n, &log_delta);
    let elapsed = t0.elapsed().as_secs_f64();

    check(
        "criterion 01 d=2 exactness",
        mean < 0.01 && (slope + 0.5).abs() <= 0.1 && elapsed < 120.0,
        &format!("mean delta {mean:.5}, slope {slope:.3}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_02_d2_acceptance_ratio() {
    let report = study(2, 20, 40_000, 201, Scenario::Pm);
    let ratio = report.mean_accept_ratio();
    check(
        "criterion 02 d=2 acceptance ratio",
        (ratio - 0.5).abs() <= 0.005,
        &format!("ratio {ratio:.4} with M_2 = 0.5"),
    );
}

#[test]
fn criterion_03_prtq_equivalences() {
    let mut rng = RngStream::new(301, 0);
    let x = BlochVector::random(&mut rng);
    let y = BlochVector::random(&mut rng);
    let eq = prtq_equivalence_report(&x, &y, 100_000, &mut rng);

    // P1 at d=2 against the rejection-method reference on one shared setup
    let mut input = RngStream::new(301, 1);
    let state = random_pure_state(2, &mut input).unwrap();
    let meas = random_basis(2, &mut input).unwrap();
    let n_ini = 400_000;
    let p1 = P1Protocol::with_defaults(2)
        .run_pm_setup(
            &state,
            &meas,
            n_ini,
            &mut RngStream::new(301, 2),
            &mut RngStream::new(301, 3),
        )
        .unwrap();
    let pr = PrtqRejectionProtocol
        .run_pm_setup(
            &state,
            &meas,
            n_ini,
            &mut RngStream::new(301, 4),
            &mut RngStream::new(301, 5),
        )
        .unwrap();
    let cross = tvd(&p1.probs().unwrap(), &pr.probs().unwrap());
    check(
        "criterion 03 prtq equivalences",
        eq.tvd < 0.01 && cross < 0.01,
        &format!("choice-vs-rejection TVD {:.5}, p1-vs-rejection TVD {cross:.5}", eq.tvd),
    );
}

#[test]
fn criterion_04_d3_randomized() {
    let t0 = Instant::now();
    let pm = study(3, 20, 50_000, 401, Scenario::Pm);
    let ent = study(3, 20, 50_000, 402, Scenario::Ent);
    let elapsed = t0.elapsed().as_secs_f64();
    let in_band = |x: f64| (0.005..=0.03).contains(&x);
    check(
        "criterion 04 d=3 randomized",
        in_band(pm.mean_delta) && in_band(ent.mean_delta) && elapsed < 600.0,
        &format!(
            "pm delta {:.5}, ent delta {:.5}, {elapsed:.1}s",
            pm.mean_delta, ent.mean_delta
        ),
    );
}

#[test]
fn criterion_05_cutoff_optimality() {
    let cutoffs = [10.0 / 24.0, 11.0 / 24.0, 0.5, 13.0 / 24.0];
    let cfg = StudyConfig {
        d: 3,
        n_setups: 10,
        n_ini: 40_000,
        seed: 501,
        shared_pool: false,
    };
    let rows = delta_sweep(&cutoffs, P1Params::defaults(3), &cfg).unwrap();
    let d = |i: usize| rows[i].mean_delta;
    check(
        "criterion 05 cutoff optimality",
        d(2) < d(1) && d(1) < d(0) && d(2) < d(3) && (0.005..=0.03).contains(&d(2)),
        &format!(
            "delta(10/24) {:.4}, delta(11/24) {:.4}, delta(1/2) {:.4}, delta(13/24) {:.4}",
            d(0), d(1), d(2), d(3)
        ),
    );
}

#[test]
fn criterion_06_cglmp() {
    let setup = cglmp_setup().unwrap();
    let i3_quantum = cglmp_value(&cglmp_quantum_joints(&setup).unwrap());
    let report = cglmp_study(&P1Protocol::with_defaults(3), 200_000, 601).unwrap();
    let classical = cglmp_deterministic_maximum();
    check(
        "criterion 06 cglmp",
        (i3_quantum - 2.87).abs() <= 0.005
            && (2.85..=3.10).contains(&report.i3_simulated)
            && (0.008..=0.025).contains(&report.mean_delta)
            && classical <= 2.0 + 1e-12,
        &format!(
            "I3 quantum {i3_quantum:.4}, simulated {:.4}, delta {:.4}, classical max {classical:.4}",
            report.i3_simulated, report.mean_delta
        ),
    );
}

#[test]
fn criterion_07_phi_grid() {
    let report = phi_study(&P1Protocol::with_defaults(3), 11, 100_000, 701).unwrap();
    let mut worst_b1 = 0.0_f64;
    let mut worst_b3 = 0.0_f64;
    for p in &report.points {
        worst_b1 = worst_b1.max((p.probs[0] - p.phi.cos().powi(2)).abs());
        worst_b3 = worst_b3.max(p.probs[2]);
    }
    check(
        "criterion 07 phi grid",
        worst_b1 < 0.05 && worst_b3 <= 0.03 && (0.008..=0.03).contains(&report.mean_delta),
        &format!(
            "max |P(b=1) - cos^2 phi| {worst_b1:.4}, max P(b=3) {worst_b3:.4}, mean delta {:.4}",
            report.mean_delta
        ),
    );
}

#[test]
fn criterion_08_scale_calibration() {
    let mut pass = true;
    let mut details = Vec::new();
    for (d, n) in [(2usize, 100_000usize), (3, 200_000), (4, 400_000)] {
        let params = P1Params::defaults(d);
        let meas = Basis::computational(d);
        let mut rng = RngStream::new(801 + d as u64, 0);
        let report = calibrate_scale(
            |rng| p1_weight(&match_table(&random_basis(d, rng).unwrap(), &meas), &params),
            params.scale,
            10.0,
            n,
            &mut rng,
        )
        .unwrap();
        pass &= (report.ratio - 10.0).abs() <= 0.5;
        details.push(format!("d={d} ratio {:.3}", report.ratio));
    }
    check(
        "criterion 08 scale calibration",
        pass,
        &details.join(", "),
    );
}

#[test]
fn criterion_09_d4_and_monotonicity() {
    let d4 = study(4, 10, 150_000, 901, Scenario::Pm);
    // matched N_out ~ 1e4 per setup across dimensions
    let d2 = study(2, 10, 20_000, 902, Scenario::Pm);
    let d3 = study(3, 10, 50_000, 903, Scenario::Pm);
    check(
        "criterion 09 d=4 and monotonicity",
        (0.01..=0.05).contains(&d4.mean_delta)
            && d2.mean_delta < d3.mean_delta
            && d3.mean_delta < d4.mean_delta,
        &format!(
            "delta d=2 {:.4}, d=3 {:.4}, d=4 {:.4}",
            d2.mean_delta, d3.mean_delta, d4.mean_delta
        ),
    );
}

#[test]
fn criterion_10_choi_consistency() {
    let mut pass = true;
    let mut details = Vec::new();
    for (d, n_ent, n_pm) in [(2usize, 60_000usize, 100_000usize), (3, 200_000, 250_000)] {
        let params = P1Params::defaults(d);
        let mut input = RngStream::new(1001 + d as u64, 0);
        let state = random_pure_state(d, &mut input).unwrap();
        let meas = random_basis(d, &mut input).unwrap();
        let choi =
            choi_pm_from_ent(&state, &meas, &params, n_ent, &mut RngStream::new(1001 + d as u64, 1))
                .unwrap();
        let (direct, _) = pm_empirical(
            &state,
            &meas,
            &params,
            n_pm,
            &mut RngStream::new(1001 + d as u64, 2),
            &mut RngStream::new(1001 + d as u64, 3),
        )
        .unwrap();
        let dist = tvd(&choi.conditional, &direct);
        pass &= dist < 0.04 && choi.conditioned_samples >= 10_000;
        details.push(format!(
            "d={d} TVD {dist:.4} at {} conditioned samples",
            choi.conditioned_samples
        ));
    }
    check("criterion 10 choi consistency", pass, &details.join(", "));
}

#[test]
fn criterion_11_haar_sampler() {
    let mut pass = true;
    let mut details = Vec::new();
    let n = 10_000usize;
    for d in [2usize, 3, 4] {
        let mut rng = RngStream::new(1101, d as u64);
        let mut sums = vec![0.0_f64; d * d];
        let mut worst_residual = 0.0_f64;
        let mut overlaps = Vec::with_capacity(n);
        for _ in 0..n {
            let u = random_unitary(d, &mut rng).unwrap();
            worst_residual = worst_residual.max(u.unitarity_residual());
            for i in 0..d {
                for j in 0..d {
                    sums[i * d + j] += u.entry(i, j).norm_sqr();
                }
            }
            overlaps.push(u.entry(0, 0).norm_sqr());
        }
        pass &= worst_residual < 1e-10;
        // |U_ij|^2 ~ Beta(1, d-1): mean 1/d, variance (d-1)/(d^2 (d+1))
        let sigma = ((d as f64 - 1.0) / ((d * d) as f64 * (d as f64 + 1.0)) / n as f64).sqrt();
        let worst_mean_dev = sums
            .iter()
            .map(|s| (s / n as f64 - 1.0 / d as f64).abs())
            .fold(0.0_f64, f64::max);
        pass &= worst_mean_dev <= 3.0 * sigma;
        details.push(format!(
            "d={d} residual {worst_residual:.2e}, mean dev {:.2}sigma",
            worst_mean_dev / sigma
        ));
        if d == 2 {
            // |<lambda|0>|^2 is uniform on [0,1] for Haar qubit bases
            let p = ks_uniform_p_value(&overlaps);
            pass &= p > 0.01;
            details.push(format!("d=2 KS p {p:.3}"));
        }
    }
    check("criterion 11 haar sampler", pass, &details.join(", "));
}
