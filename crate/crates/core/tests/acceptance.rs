//! End-to-end acceptance checks. Each test prints one `criterion N: PASS|FAIL`
//! line with the measured quantities, then asserts.

use std::f64::consts::PI;

use qmix::dynamics::{Observable, TRACE_DRIFT_TOL};
use qmix::model::{build_generalized_dicke, CONVERGENCE_FOCK_CUTOFF};
use qmix::perturbation::{
    effective_coupling_perturbative, j3_closed_form, j4_rabi_closed_form, j4_tc_closed_form, DEFAULT_EPSILON,
};
use qmix::qecc::{ecc_suite, random_logical, repetition_encode, Implementation, RegisterState};
use qmix::scenarios::*;
use qmix::spectrum::{diagonalize, find_anticrossing, sweep_levels, AnticrossingOptions};
use qmix::{BareLabel, Execution, HamiltonianKind, QubitParams, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn label(s: &str) -> BareLabel {
    BareLabel::parse(s).unwrap()
}

fn j3_config(lambda: f64, omega3: f64, omega_c: f64, theta: f64) -> SystemConfig {
    SystemConfig::new(
        vec![
            QubitParams::new(omega3 / 2.0, lambda, theta),
            QubitParams::new(omega3 / 2.0, lambda, theta),
            QubitParams::new(omega3, lambda, theta),
        ],
        omega_c,
    )
    .with_cutoff(6)
}

fn j3_enumerated(config: &SystemConfig) -> f64 {
    effective_coupling_perturbative(
        config,
        HamiltonianKind::GeneralizedDicke,
        &label("gge0"),
        &label("eeg0"),
        4,
        DEFAULT_EPSILON,
    )
    .unwrap()
    .total
}

fn four_config(omegas: [f64; 4], lambda: f64, omega_c: f64) -> SystemConfig {
    SystemConfig::new(omegas.iter().map(|&w| QubitParams::new(w, lambda, 0.0)).collect(), omega_c).with_cutoff(6)
}

fn j4_enumerated(config: &SystemConfig, kind: HamiltonianKind) -> (usize, f64) {
    let r = effective_coupling_perturbative(config, kind, &label("eegg0"), &label("ggee0"), 4, DEFAULT_EPSILON).unwrap();
    (r.path_count(), r.total)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_01_path_counts() {
    let three = effective_coupling_perturbative(
        &three_qubit_config(1.0),
        HamiltonianKind::GeneralizedDicke,
        &label("gge0"),
        &label("eeg0"),
        4,
        DEFAULT_EPSILON,
    )
    .unwrap()
    .path_count();
    let (tc, _) = j4_enumerated(&four_config([4.0, 1.0, 3.0, 2.0], 0.1, 6.0), HamiltonianKind::TavisCummings);
    report(1, three == 48 && tc == 8, format!("3QM paths {three}, TC 4QM paths {tc}"));
}

#[test]
fn criterion_02_closed_form_zero() {
    let (lambda, w3, theta) = (0.05, 1.0, PI / 6.0);
    let zero = 7f64.sqrt() / 2.0 * w3;
    let at_zero = j3_closed_form(lambda, w3, zero, theta).unwrap();
    let scale = j3_closed_form(lambda, w3, 1.25, theta).unwrap().abs();
    let below = j3_enumerated(&j3_config(lambda, w3, zero - 1e-3 * w3, theta));
    let above = j3_enumerated(&j3_config(lambda, w3, zero + 1e-3 * w3, theta));
    let pass = at_zero.abs() < 1e-12 * scale && below * above < 0.0;
    report(2, pass, format!("closed form at sqrt(7)/2: {at_zero:.3e}; enumerator {below:.3e} -> {above:.3e}"));
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (b - r * (b - a), a + r * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            (x2, f2) = (x1, f1);
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            (x1, f1) = (x2, f2);
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    (a + b) / 2.0
}

#[test]
fn criterion_03_theta_optimum() {
    let closed = golden_max(|t| j3_closed_form(0.05, 1.0, 1.25, t).unwrap().abs(), 0.05, 1.5, 1e-7);
    let enumerated = golden_max(|t| j3_enumerated(&j3_config(0.05, 1.0, 1.25, t)).abs(), 0.05, 1.5, 1e-7);
    let pass = (closed - PI / 6.0).abs() < 1e-4 && (enumerated - PI / 6.0).abs() < 1e-4;
    report(3, pass, format!("argmax closed form {closed:.7}, enumerator {enumerated:.7}, pi/6 = {:.7}", PI / 6.0));
}

#[test]
fn criterion_04_oracle_equivalence() {
    let mut worst: f64 = 0.0;
    for (lambda, w3, wc, theta) in [(0.1, 1.0, 1.25, PI / 6.0), (0.03, 1.3, 0.9, 0.4), (0.07, 0.8, 2.1, 1.1)] {
        let d = rel(j3_enumerated(&j3_config(lambda, w3, wc, theta)), j3_closed_form(lambda, w3, wc, theta).unwrap());
        worst = worst.max(d);
    }
    let points = [([4.0, 1.2, 3.0, 2.0], 6.0), ([0.9, 1.7, 1.1, 1.3], 2.6), ([2.0, 0.7, 1.5, 1.0], 0.35)];
    for (omegas, wc) in points {
        let config = four_config(omegas, 0.1, wc);
        let (_, tc) = j4_enumerated(&config, HamiltonianKind::TavisCummings);
        worst = worst.max(rel(tc, j4_tc_closed_form([0.1; 4], omegas, wc).unwrap()));
        let (_, rabi) = j4_enumerated(&config, HamiltonianKind::GeneralizedDicke);
        worst = worst.max(rel(rabi, j4_rabi_closed_form([0.1; 4], omegas, wc).unwrap()));
    }
    report(4, worst <= 1e-10, format!("worst relative deviation {worst:.2e} over 9 comparisons"));
}

#[test]
fn criterion_05_tc_cancellation() {
    let lambda = 0.1;
    let (_, tc) = j4_enumerated(&four_config([4.0, 1.0, 3.0, 2.0], lambda, 6.0), HamiltonianKind::TavisCummings);
    let big_lambda = lambda.powi(4);
    let search = type_one_search();
    let rabi = locate(&four_qubit_config(0.25), &search, &AnticrossingOptions::default()).unwrap();
    let tc_options = AnticrossingOptions { kind: HamiltonianKind::TavisCummings, tolerance: 1e-12, ..Default::default() };
    let tc_gap = locate(&four_qubit_config(0.25), &search, &tc_options).unwrap();
    let pass = tc.abs() < 1e-12 * big_lambda
        && (3e-4..3e-3).contains(&rabi.splitting)
        && tc_gap.splitting < 1e-10;
    report(
        5,
        pass,
        format!(
            "TC order-4 sum {tc:.2e}; Rabi type-I splitting {:.4e} at omega1 = {:.6}; TC min gap {:.2e}",
            rabi.splitting, rabi.location, tc_gap.splitting
        ),
    );
}

#[test]
fn criterion_06_perturbation_vs_diagonalization() {
    let mut details = Vec::new();
    let mut pass = true;
    for lambda in [0.05, 0.10] {
        let config = equal_coupling_config(lambda);
        let j = j3_enumerated(&config.clone().with_cutoff(8));
        let (a, b) = three_qubit_pair().labels().unwrap();
        let r = find_anticrossing(&config, "qubits[2].omega", (0.95, 1.03), (&a, &b), &AnticrossingOptions::default())
            .unwrap();
        let d = rel(2.0 * j.abs(), r.splitting);
        pass &= d < 0.10;
        details.push(format!("lambda {lambda}: 2|J| {:.4e} vs splitting {:.4e} ({:.1}%)", 2.0 * j.abs(), r.splitting, 100.0 * d));
    }
    report(6, pass, details.join("; "));
}

#[test]
fn criterion_07_anticrossing_locations() {
    let options = AnticrossingOptions::default();
    let three = locate(&three_qubit_config(1.0), &three_qubit_search(), &options).unwrap();
    let two = locate(&type_two_config(TYPE_TWO_OMEGA1), &type_two_search(), &options).unwrap();
    let d3 = (three.location - 1.0).abs();
    let d2 = (two.location - TYPE_TWO_OMEGA1).abs();
    report(
        7,
        d3 < 0.01 && d2 < 0.005,
        format!(
            "3QM minimum at omega3 = {:.6} (|diff| {d3:.4} vs 0.01); type-II at omega1 = {:.6} (|diff| {d2:.4} vs 0.005)",
            three.location, two.location
        ),
    );
}

#[test]
fn criterion_08_dissipative_dynamics() {
    let (report_ac, outcome) =
        locate_and_evolve(&three_qubit_config(1.0), &three_qubit_search(), three_qubit_observables(), true, 1.0, 801)
            .unwrap();
    let j = report_ac.coupling();
    let series = &outcome.series;
    let expected = PI / (2.0 * j);
    let (t_peak, _) = series.first_peak("exc_q1", 0.5).expect("transfer peak");
    let a = rel(t_peak, expected);
    let photons = series.trace("photons").unwrap().iter().cloned().fold(f64::MIN, f64::max);
    let quarter = PI / (4.0 * j);
    let exc = series.trace("exc_q1").unwrap();
    let corr = series.trace("corr_q1_2").unwrap();
    let c = series
        .times
        .iter()
        .zip(exc.iter().zip(corr))
        .filter(|(t, _)| **t <= quarter * (1.0 + 1e-12))
        .map(|(_, (x, y))| (x - y).abs())
        .fold(0.0, f64::max);
    let (pa, pb, pc) = (a <= 0.05, (0.75e-2..=2.25e-2).contains(&photons), c < 0.05);
    report(
        8,
        pa && pb && pc,
        format!(
            "(a) first peak t = {t_peak:.1} vs pi/2J = {expected:.1} ({:+.1}%) {}; (b) max <a+a> = {photons:.3e} {}; (c) max |corr - exc| = {c:.3} {}",
            100.0 * (t_peak / expected - 1.0),
            if pa { "ok" } else { "out" },
            if pb { "ok" } else { "out" },
            if pc { "ok" } else { "out" },
        ),
    );
}

#[test]
fn criterion_09_ghz_generation() {
    let mut details = Vec::new();
    let mut pass = true;
    let cases = [
        ("3QM", three_qubit_config(1.0), three_qubit_search()),
        ("type-I 4QM", four_qubit_config(0.25), type_one_search()),
    ];
    for (name, config, search) in cases {
        let (a, b) = search.2.labels().unwrap();
        let (_, outcome) =
            locate_and_evolve(&config, &search, vec![Observable::Ghz(a.clone(), b.clone())], false, 0.25, 101).unwrap();
        let f = *outcome.series.trace(&Observable::Ghz(a, b).name()).unwrap().last().unwrap();
        pass &= f > 0.99;
        details.push(format!("{name} fidelity {f:.6} at pi/4J"));
    }
    report(9, pass, details.join("; "));
}

#[test]
fn criterion_10_error_correction() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for _ in 0..10 {
        let (a, b) = random_logical(&mut rng);
        for r in ecc_suite(a, b).unwrap() {
            worst = worst.max((r.fidelity - 1.0).abs());
            rows += 1;
        }
    }
    let mut rep: f64 = 0.0;
    for _ in 0..20 {
        let (a, b) = random_logical(&mut rng);
        let (encoded, _) = repetition_encode(&RegisterState::logical(a, b, 3).unwrap(), 3, Implementation::Mix).unwrap();
        for (k, z) in encoded.amplitudes().iter().enumerate() {
            let expect = match k {
                0 => a,
                0b0111 => b,
                _ => num_complex::Complex64::new(0.0, 0.0),
            };
            rep = rep.max((z - expect).norm());
        }
    }
    report(
        10,
        worst < 1e-10 && rep < 1e-14,
        format!("{rows} ECC runs, worst |F - 1| {worst:.1e}; repetition identity max deviation {rep:.1e} over 20 states"),
    );
}

#[test]
fn criterion_11_numerical_hygiene() {
    let options = AnticrossingOptions::default();
    let mut spectral: f64 = 0.0;
    let mut splitting: f64 = 0.0;
    let cases = [
        (three_qubit_config(1.0), three_qubit_search()),
        (four_qubit_config(0.25), type_one_search()),
        (type_two_config(TYPE_TWO_OMEGA1), type_two_search()),
    ];
    for (config, search) in &cases {
        let low = locate(config, search, &options).unwrap();
        let fine = config.clone().with_cutoff(CONVERGENCE_FOCK_CUTOFF);
        let high = locate(&fine, search, &options).unwrap();
        splitting = splitting.max(rel(high.splitting, low.splitting));
        let at = config.with_parameter(&low.parameter, low.location).unwrap();
        let e8 = diagonalize(&build_generalized_dicke(&at).unwrap()).unwrap();
        let e12 =
            diagonalize(&build_generalized_dicke(&at.clone().with_cutoff(CONVERGENCE_FOCK_CUTOFF)).unwrap()).unwrap();
        // every level whose dominant bare component is photon-free
        for k in 1..e8.len().min(20) {
            if e8.label(k).photons == 0 {
                spectral = spectral.max(rel(e12.energies()[k], e8.energies()[k]));
            }
        }
    }

    let (_, lossy) =
        locate_and_evolve(&three_qubit_config(1.0), &three_qubit_search(), three_qubit_observables(), true, 0.5, 201)
            .unwrap();
    let drift = lossy.max_trace_drift;

    let config = three_qubit_config(1.0);
    let grid: Vec<f64> = (0..41).map(|k| 0.9 + 0.005 * k as f64).collect();
    let sweep = |exec| sweep_levels(&config, HamiltonianKind::GeneralizedDicke, "qubits[2].omega", &grid, 6, exec).unwrap().to_csv();
    let csv_equal = sweep(Execution::Parallel) == sweep(Execution::Parallel) && sweep(Execution::Sequential) == sweep(Execution::Parallel);
    let dyn_csv = |_: ()| {
        locate_and_evolve(&config, &three_qubit_search(), three_qubit_observables(), false, 0.1, 51).unwrap().1.series.to_csv()
    };
    let dyn_equal = dyn_csv(()) == dyn_csv(());

    let pass = spectral < 1e-6 && splitting < 1e-6 && drift < TRACE_DRIFT_TOL && csv_equal && dyn_equal;
    report(
        11,
        pass,
        format!(
            "cutoff 8 -> 12: levels {spectral:.1e}, splittings {splitting:.1e}; trace drift {drift:.1e}; CSV byte-identical: sweep {csv_equal}, dynamics {dyn_equal}"
        ),
    );
}
