//! Property tests for the invariants of every module. Expected values come
//! from direct formulas in this file, never from the crate's own helpers.

use std::f64::consts::PI;

use eigenfilter::amplification::{
    amplify, estimated_count, grover_round, AmplifyOptions, FilterPipeline,
};
use eigenfilter::filter::{
    apply_inverse_phase_estimation_with, filter_projector, momentum_overlap, FilterSpec,
};
use eigenfilter::hamiltonians::{
    build_model, classical_energy, IsingParams, ModelSpec, NormalizedHamiltonian,
    DEFAULT_WINDOW_MARGIN,
};
use eigenfilter::jordan::{jordan_decompose, run_naive_demo};
use eigenfilter::qma::{apply_forward_switch_circuit, g_filter_curve, switch_layout};
use eigenfilter::quantum::{
    expectation_value, measure_projector, random_state, spectral_decompose, HermitianOperator,
    Projector, ProjectorOp, RegisterLayout, StateVector,
};
use eigenfilter::thermal::{estimate_dos_with, DosOptions};
use eigenfilter::{RngStream, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn circular(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `⟨φ|μ⟩` as the plain geometric sum `2^{-k} Σ_j e^{2πij(φ−μ)}`.
fn overlap_sum(phi: f64, mu: f64, k: usize) -> C64 {
    let size = 1usize << k;
    let total: C64 = (0..size)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 * (phi - mu)))
        .sum();
    total / size as f64
}

fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
    let mut rng = RngStream::from_seed(seed);
    let a = eigenfilter::quantum::random_amplitudes(d * d, &mut rng);
    let m = DMatrix::from_row_slice(d, d, &a);
    HermitianOperator::new((&m + m.adjoint()) * C64::new(0.5, 0.0), "random").unwrap()
}

/// Eigenvalues of a Hermitian matrix above `floor`, ascending.
fn nonzero_eigenvalues(m: DMatrix<C64>, floor: f64) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .filter(|x| *x > floor)
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_round_trip(d in 1usize..=32, seed in any::<u64>()) {
        let h = random_hermitian(d, seed);
        let s = spectral_decompose(&h).unwrap();
        prop_assert!(max_abs(&(s.reconstruct() - h.matrix())) < 1e-10);
        prop_assert!(s.orthonormality_defect() < 1e-10);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn random_projectors_are_idempotent(d in 1usize..=32, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let rank = (frac * d as f64).round() as usize;
        let p = Projector::random(d, rank, &mut RngStream::from_seed(seed)).unwrap();
        let m = p.matrix();
        prop_assert!(max_abs(&(m * m - m)) < 1e-10);
        prop_assert!(max_abs(&(m.adjoint() - m)) < 1e-10);
        prop_assert_eq!(p.rank(), rank);
    }

    #[test]
    fn measurement_frequency_within_four_sigma(rank in 1usize..8, seed in any::<u64>()) {
        let layout = RegisterLayout::system_only(3).unwrap();
        let state = random_state(layout, seed);
        let p = Projector::random(8, rank, &mut RngStream::from_seed(seed ^ 1)).unwrap();
        let exact = p.weight(state.amplitudes());
        let shots = 2000;
        let mut rng = RngStream::from_seed(seed ^ 2);
        let hits = (0..shots)
            .filter(|_| measure_projector(&state, &p, &mut rng).unwrap().outcome)
            .count();
        let freq = hits as f64 / shots as f64;
        let sigma = (exact * (1.0 - exact) / shots as f64).sqrt();
        // A hair of slack for probabilities pinned at 0 or 1.
        prop_assert!((freq - exact).abs() <= 4.0 * sigma + 1e-12, "{} vs {}", freq, exact);
    }

    #[test]
    fn classical_diagonal_matches_configurations(
        n in 1usize..=4,
        j in prop::collection::vec(-2.0f64..2.0, 6),
        h in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let mut pairs = Vec::new();
        let mut it = j.iter();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push(((a, b), *it.next().unwrap()));
            }
        }
        let params = IsingParams::new(n, pairs, h[..n].to_vec()).unwrap();
        let op = build_model(&ModelSpec::ClassicalIsing(params.clone())).unwrap();
        let mut direct: Vec<f64> = (0..1usize << n)
            .map(|x| {
                let cfg: Vec<bool> = (0..n).map(|i| (x >> i) & 1 == 1).collect();
                classical_energy(&params, &cfg).unwrap()
            })
            .collect();
        let mut diag: Vec<f64> = (0..1usize << n).map(|i| op.matrix()[(i, i)].re).collect();
        direct.sort_by(f64::total_cmp);
        diag.sort_by(f64::total_cmp);
        for (a, b) in direct.iter().zip(&diag) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_spectrum_stays_in_window(n in 1usize..=4, seed in any::<u64>()) {
        let op = build_model(&ModelSpec::RandomTwoLocal { n: n.max(2), seed }).unwrap();
        let h = NormalizedHamiltonian::new(&op, DEFAULT_WINDOW_MARGIN).unwrap();
        for &e in h.spectrum.eigenvalues() {
            prop_assert!((DEFAULT_WINDOW_MARGIN - 1e-12..=1.0 - DEFAULT_WINDOW_MARGIN + 1e-12).contains(&e));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn momentum_overlap_matches_geometric_sum(phi in 0.0f64..1.0, mu in 0.0f64..1.0, k in 1usize..=10) {
        prop_assert!((momentum_overlap(phi, mu, k) - overlap_sum(phi, mu, k)).norm() < 1e-9);
    }

    #[test]
    fn momentum_upper_bound(phi in 0.0f64..1.0, mu in 0.0f64..1.0, k in 1usize..=12) {
        let d = circular(phi, mu);
        prop_assume!(d > 0.0);
        let bound = 1.0 / (2f64.powi(k as i32 + 1) * d);
        prop_assert!(momentum_overlap(phi, mu, k).norm() <= bound + 1e-12);
    }

    #[test]
    fn momentum_lower_bound(mu in 0.0f64..1.0, t in -1.0f64..=1.0, k in 1usize..=10, eta in 1usize..=16) {
        let radius = 2f64.powi(-(k as i32)) / (2.0 * PI * (eta as f64).sqrt());
        let phi = mu + t * radius;
        prop_assert!(momentum_overlap(phi, mu, k).norm().powi(eta as i32) >= 0.5 - 1e-9);
    }

    #[test]
    fn momentum_peak_at_center(mu in 0.0f64..1.0, phi in 0.0f64..1.0, k in 1usize..=10) {
        prop_assert!(momentum_overlap(phi, mu, k).norm() <= momentum_overlap(mu, mu, k).norm() + 1e-12);
        // Half maximum is reached within 2^{-k} of the center.
        let half = mu + 2f64.powi(-(k as i32));
        prop_assert!(momentum_overlap(half, mu, k).norm() < 0.5);
    }

    #[test]
    fn grover_rotation_law(q in 0.001f64..0.999, m in 0usize..12) {
        let layout = RegisterLayout::system_only(1).unwrap();
        let phi = StateVector::from_amplitudes(
            layout,
            vec![C64::new(q.sqrt(), 0.0), C64::new(0.0, (1.0 - q).sqrt())],
        ).unwrap();
        let target = Projector::diagonal(2, |i| i == 0);
        let mut psi = phi.amplitudes().to_vec();
        for _ in 0..m {
            grover_round(&mut psi, phi.amplitudes(), &target);
        }
        let expected = ((2 * m + 1) as f64 * q.sqrt().asin()).sin().powi(2);
        prop_assert!((psi[0].norm_sqr() - expected).abs() < 1e-9);
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn count_estimate_is_clipped(q in 0.0f64..=1.0, n in 1usize..4096) {
        let m = estimated_count(q, n);
        prop_assert!((0.0..=n as f64).contains(&m));
        prop_assert!((m - (2.0 * n as f64 * q).min(n as f64)).abs() < 1e-12);
    }

    #[test]
    fn switch_filter_profile_is_unimodal(mu in 0.2f64..=0.8, half in 1usize..=10) {
        let k = 2 * half + 1;
        let ps: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
        let g = g_filter_curve(mu, k, &ps).unwrap();
        let top = (0..g.len()).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        prop_assert!((ps[top] - mu).abs() <= 1.0 / k as f64, "peak {} for mu {}", ps[top], mu);
        prop_assert!(g[..=top].windows(2).all(|w| w[1] >= w[0] - 1e-15));
        prop_assert!(g[top..].windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverse_phase_estimation_is_unitary_and_matches_closed_form(
        seed in any::<u64>(),
        mu in 0.125f64..0.875,
        k in 1usize..=4,
        eta in 1usize..=3,
    ) {
        let op = build_model(&ModelSpec::RandomTwoLocal { n: 2, seed }).unwrap();
        let h = NormalizedHamiltonian::new(&op, DEFAULT_WINDOW_MARGIN).unwrap();
        let psi = random_state(RegisterLayout::system_only(2).unwrap(), seed ^ 7);
        let spec = FilterSpec::new(mu, 0.1, k, eta).unwrap();
        let out = apply_inverse_phase_estimation_with(&h.spectrum, &psi, &spec).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        // The clean-ancilla block is Σ_a α_a ⟨φ_a|μ⟩^η |a⟩.
        let zero = &out.amplitudes()[..4];
        let mut expected = vec![C64::new(0.0, 0.0); 4];
        for a in 0..4 {
            let v = h.spectrum.eigenvector(a);
            let alpha: C64 = v.iter().zip(psi.amplitudes()).map(|(x, y)| x.conj() * y).sum();
            let damp = overlap_sum(h.spectrum.eigenvalues()[a], mu, k).powu(eta as u32);
            for i in 0..4 {
                expected[i] += v[i] * alpha * damp;
            }
        }
        for (a, b) in zero.iter().zip(&expected) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn filtered_outputs_are_pure_and_in_band(seed in any::<u64>(), step in 0usize..131) {
        let op = build_model(&ModelSpec::RandomTwoLocal { n: 2, seed }).unwrap();
        let pipeline = FilterPipeline::new(&op, 0.25).unwrap();
        let grid = pipeline.mu_grid();
        let mu = grid[step % grid.len()];
        let out = pipeline.run(mu, &RngStream::from_seed(seed ^ 3)).unwrap();
        let n = 4.0f64;
        prop_assert!(out.report.estimated_count.unwrap() <= n);
        if let Some(state) = &out.state {
            let q = filter_projector(state.layout());
            let a = state.amplitudes();
            let leak: f64 = a.iter().zip(q.project(a)).map(|(x, p)| (x - p).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(leak < 1e-9);
            let e = out.report.output_energy_normalized.unwrap();
            prop_assert!(e >= mu - 0.25 && e <= mu + 0.25, "energy {} at mu {}", e, mu);
            // Reported energy agrees with a direct expectation value on the register.
            let reg = StateVector::normalized(
                RegisterLayout::system_only(2).unwrap(),
                state.ancilla_zero_slice().to_vec(),
            ).unwrap();
            let direct = expectation_value(&reg, &pipeline.hamiltonian.operator).unwrap();
            prop_assert!((direct - e).abs() < 1e-9);
        }
    }

    #[test]
    fn abort_soundness_near_an_eigenvalue(seed in any::<u64>(), level in 0usize..8, t in -1.0f64..=1.0) {
        let op = build_model(&ModelSpec::RandomTwoLocal { n: 3, seed }).unwrap();
        let mut pipeline = FilterPipeline::new(&op, 0.25).unwrap();
        pipeline.options.max_retries = 0;
        let spec = pipeline.spec();
        let phi = pipeline.hamiltonian.spectrum.eigenvalues()[level];
        let mu = (phi + t * spec.resolution()).clamp(1e-6, 1.0 - 1e-6);
        let rng = RngStream::from_seed(seed ^ 5);
        // Weight of the input state on the eigenspace of φ, drawn the same way
        // as the pipeline draws it.
        let psi = random_state_from_pipeline(&rng, 3);
        let weight: f64 = (0..8)
            .filter(|&a| (pipeline.hamiltonian.spectrum.eigenvalues()[a] - phi).abs() < 1e-10)
            .map(|a| {
                let v = pipeline.hamiltonian.spectrum.eigenvector(a);
                v.iter().zip(psi.amplitudes()).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
            })
            .sum();
        prop_assume!(weight >= 1.0 / 32.0);
        let out = pipeline.run(mu, &rng).unwrap();
        prop_assert!(!out.report.aborted);
    }

    #[test]
    fn jordan_shared_spectrum_and_reconstruction(
        d in 2usize..=24,
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::from_seed(seed);
        let q = Projector::random(d, ((a * d as f64).round() as usize).max(1), &mut rng).unwrap();
        let r = Projector::random(d, ((b * d as f64).round() as usize).max(1), &mut rng).unwrap();
        let (qm, rm) = (q.matrix(), r.matrix());
        let qrq = nonzero_eigenvalues(qm * rm * qm, 1e-9);
        let rqr = nonzero_eigenvalues(rm * qm * rm, 1e-9);
        prop_assert_eq!(qrq.len(), rqr.len());
        for (x, y) in qrq.iter().zip(&rqr) {
            prop_assert!((x - y).abs() < 1e-8);
        }
        let j = jordan_decompose(&q, &r).unwrap();
        prop_assert!(max_abs(&(j.rebuild_q() - qm)) < 1e-8);
        prop_assert!(max_abs(&(j.rebuild_r() - rm)) < 1e-8);
        for block in &j.blocks {
            prop_assert!(block.residuals(&q, &r).max() < 1e-8);
        }
        let mut ours: Vec<f64> = j.q_side_spectrum().into_iter().filter(|p| *p > 1e-9).collect();
        ours.sort_by(f64::total_cmp);
        prop_assert_eq!(ours.len(), qrq.len());
        for (x, y) in ours.iter().zip(&qrq) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn switch_amplitudes_follow_closed_form(
        d in 2usize..=8,
        seed in any::<u64>(),
        half in 0usize..=3,
    ) {
        let k = 2 * half + 1;
        let n = d.next_power_of_two().trailing_zeros() as usize;
        let dim = 1usize << n;
        let mut rng = RngStream::from_seed(seed);
        let q = Projector::random(dim, (dim / 2).max(1), &mut rng).unwrap();
        let r = Projector::random(dim, (dim / 2).max(1), &mut rng).unwrap();
        let j = jordan_decompose(&q, &r).unwrap();
        let layout = switch_layout(n, 0, k).unwrap();
        for block in j.blocks.iter().filter(|b| !b.borderline) {
            let mut amps = vec![C64::new(0.0, 0.0); layout.dim()];
            amps[..dim].copy_from_slice(block.q1.as_slice());
            apply_forward_switch_circuit(&q, &r, &mut amps, layout).unwrap();
            for label in 0..1usize << k {
                let target = if (label >> (k - 1)) & 1 == 1 { &block.r1 } else { &block.r0 };
                let amp: C64 = (0..dim).map(|i| target[i].conj() * amps[label * dim + i]).sum();
                let expected = closed_form(block.p, label, k);
                prop_assert!((amp - C64::new(expected, 0.0)).norm() < 1e-9, "label {} k {}", label, k);
            }
        }
    }

    #[test]
    fn naive_failure_law(seed in any::<u64>(), bits in 2usize..=4, threshold in 0.15f64..0.6) {
        let op = build_model(&ModelSpec::RandomTwoLocal { n: 2, seed }).unwrap();
        let report = run_naive_demo(&op, threshold, bits, seed).unwrap();
        let num: f64 = report.weights.iter().zip(&report.acceptance).map(|(w, p)| w * p * p).sum();
        let den: f64 = report.weights.iter().zip(&report.acceptance).map(|(w, p)| w * p).sum();
        prop_assert!((report.residual_overlap - num / den).abs() < 1e-8);
        // Fourier-readout acceptance of each eigenphase, from the Fejér kernel.
        let size = 1usize << bits;
        for (phi, p) in report.phases.iter().zip(&report.acceptance) {
            let want: f64 = (0..size)
                .filter(|&y| (y as f64) / (size as f64) < threshold)
                .map(|y| overlap_sum(*phi, y as f64 / size as f64, bits).norm_sqr())
                .sum();
            prop_assert!((p - want).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn density_estimate_bounds(seed in any::<u64>()) {
        let op = build_model(&ModelSpec::RandomTwoLocal { n: 2, seed }).unwrap();
        let pipeline = FilterPipeline::new(&op, 0.25).unwrap();
        let dos = estimate_dos_with(&pipeline, seed, &DosOptions::default()).unwrap();
        let radius = pipeline.spec().resolution();
        for (mu, m) in dos.grid.iter().zip(&dos.estimated) {
            prop_assert!(*m <= dos.dim as f64);
            let in_band = pipeline
                .hamiltonian
                .spectrum
                .eigenvalues()
                .iter()
                .filter(|e| (*e - mu).abs() <= radius)
                .count() as f64;
            prop_assert!(*m >= in_band / 2.0 - 1.0, "m̂ {} with {} in band at {}", m, in_band, mu);
        }
    }

    #[test]
    fn commuting_witness_matches_plain_grover(seed in any::<u64>()) {
        use eigenfilter::qma::{prepare_witness, VerifierCircuit};
        let v = VerifierCircuit::identity_fixture();
        let out = prepare_witness(&v, 1.0, 0.1, seed, 8).unwrap();
        let qr = Projector::new(v.q_projector().matrix() * v.r_projector().unwrap().matrix()).unwrap();
        // Same input state and measurement stream as the witness preparation.
        let root = RngStream::from_seed(seed);
        let mut rest = eigenfilter::quantum::random_amplitudes(2, &mut root.split(0));
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[1] = rest.remove(0);
        amps[3] = rest.remove(0);
        let psi = StateVector::normalized(v.register_layout(), amps).unwrap();
        let options = AmplifyOptions { count_scale: Some(4), ..AmplifyOptions::default() };
        let (_, plain) = amplify(&psi, &qr, &options, &mut root.split(1)).unwrap();
        prop_assert_eq!(out.report.amplification.succeeded, plain.succeeded);
        prop_assert!((out.report.amplification.success_probability - plain.success_probability).abs() < 1e-6);
    }
}

fn random_state_from_pipeline(rng: &RngStream, n: usize) -> StateVector {
    eigenfilter::quantum::random_state_from(
        RegisterLayout::system_only(n).unwrap(),
        &mut rng.split(0),
    )
}

/// `(√p)^{k−s}(√(1−p))^{s}(−1)^ℓ` with `s` counted from an accepted start and
/// `ℓ` the number of adjacent `00` pairs. Bit `t` of `label` is measurement
/// `t + 1`.
fn closed_form(p: f64, label: usize, k: usize) -> f64 {
    let bit = |t: usize| (label >> t) & 1 == 1;
    let mut prev = true;
    let mut s = 0;
    let mut zero_pairs = 0;
    for t in 0..k {
        if bit(t) != prev {
            s += 1;
        }
        if t > 0 && !bit(t) && !bit(t - 1) {
            zero_pairs += 1;
        }
        prev = bit(t);
    }
    let sign = if zero_pairs % 2 == 0 { 1.0 } else { -1.0 };
    sign * p.sqrt().powi((k - s) as i32) * (1.0 - p).sqrt().powi(s as i32)
}
