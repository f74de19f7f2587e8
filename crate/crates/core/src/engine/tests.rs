use super::*;
use crate::linalg::{kron, pauli, unitary_from_hamiltonian};
use crate::qstate::tests::random_state;
use crate::qstate::trace_distance;
use std::f64::consts::PI;

fn h_half() -> ComplexMatrix {
    pauli::z().scale_re(0.5)
}

fn pswap_stream(state: DensityMatrix, theta: f64) -> AncillaStreamSpec {
    AncillaStreamSpec::resource(h_half(), state, Interaction::PartialSwap { theta })
}

fn memory_cfg(mode: AaMode, p: f64, lambda: f64, n: usize) -> CollisionConfig {
    let init = DensityMatrix::from_bloch([0.6, -0.3, 0.5]).unwrap();
    let anc = DensityMatrix::basis(2, 0).unwrap();
    let mut cfg = CollisionConfig::new(h_half(), init, vec![pswap_stream(anc, PI / 5.0)], 0.3, n);
    cfg.aa_mode = mode;
    cfg.aa_swap_prob = p;
    cfg.erasure_lambda = lambda;
    cfg.rng_seed = 11;
    cfg
}

#[test]
fn partial_swap_matches_hamiltonian_route() {
    let (theta, tau) = (0.37, 0.8);
    let anc = thermal_state_half(1.3);
    let a = CollisionConfig::new(h_half(), anc.clone(), vec![pswap_stream(anc.clone(), theta)], tau, 1);
    let v = pauli::swap(2).scale_re(-1.0);
    let stream = AncillaStreamSpec::thermal(
        h_half(),
        1.3,
        StreamRole::Bath,
        Interaction::Hamiltonian { v, g: theta / tau },
    )
    .unwrap();
    let b = CollisionConfig::new(h_half(), anc, vec![stream], tau, 1);
    let ua = collision_unitary(&a, 0).unwrap();
    let ub = collision_unitary(&b, 0).unwrap();
    assert!(ua.max_abs_diff(&ub) < 1e-12);
}

fn thermal_state_half(beta: f64) -> DensityMatrix {
    crate::qstate::thermal_state(&h_half(), beta).unwrap()
}

#[test]
fn zero_coupling_factorizes() {
    let hs = pauli::x().scale_re(0.7);
    let he = h_half();
    let v = kron(&pauli::x(), &pauli::x());
    let stream = AncillaStreamSpec::thermal(he.clone(), 1.0, StreamRole::Bath, Interaction::Hamiltonian { v, g: 0.0 }).unwrap();
    let cfg = CollisionConfig::new(hs.clone(), DensityMatrix::maximally_mixed(2), vec![stream], 0.9, 1);
    let u = collision_unitary(&cfg, 0).unwrap();
    let expect = kron(
        &unitary_from_hamiltonian(&hs, 0.9).unwrap(),
        &unitary_from_hamiltonian(&he, 0.9).unwrap(),
    );
    assert!(u.max_abs_diff(&expect) < 1e-12);
}

#[test]
fn full_swap_hands_over_ancilla_state() {
    let init = DensityMatrix::from_bloch([0.2, 0.1, -0.9]).unwrap();
    let anc = DensityMatrix::basis(2, 0).unwrap();
    let cfg = CollisionConfig::new(h_half(), init, vec![pswap_stream(anc.clone(), PI / 2.0)], 0.4, 1);
    let t = run(&cfg).unwrap();
    let last = t.snapshots.unwrap().pop().unwrap();
    assert!(trace_distance(&last, &anc).unwrap() < 1e-12);
}

#[test]
fn single_collision_channel_is_cptp() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = &kron(&pauli::x(), &pauli::x()) + &kron(&pauli::y(), &pauli::z());
    let stream = AncillaStreamSpec::thermal(pauli::z(), 0.7, StreamRole::Bath, Interaction::Hamiltonian { v, g: 1.1 }).unwrap();
    let cfg = CollisionConfig::new(pauli::x(), DensityMatrix::maximally_mixed(2), vec![stream], 0.6, 1);
    let ch = SystemChannel::new(&cfg, 0).unwrap();
    for _ in 0..100 {
        let rho = random_state(&mut rng, 2);
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(out.matrix().hermiticity_defect() < 1e-12);
        assert!(out.eigenvalues()[0] > -1e-12);
        assert!(DensityMatrix::new(out.into_matrix()).is_ok());
    }
}

#[test]
fn swap_with_mixed_ancillas_is_unital() {
    let mm = DensityMatrix::maximally_mixed(2);
    let cfg = CollisionConfig::new(h_half(), mm.clone(), vec![pswap_stream(mm.clone(), 0.9)], 0.5, 1);
    let out = SystemChannel::new(&cfg, 0).unwrap().apply(&mm).unwrap();
    assert!(out.matrix().max_abs_diff(mm.matrix()) < 1e-14);
}

#[test]
fn memoryless_run_is_a_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let init = random_state(&mut rng, 2);
    let v = kron(&pauli::x(), &pauli::x());
    let stream = AncillaStreamSpec::thermal(h_half(), 1.0, StreamRole::Bath, Interaction::Hamiltonian { v, g: 1.0 }).unwrap();
    let cfg = CollisionConfig::new(h_half(), init.clone(), vec![stream], 0.5, 12);
    let snaps = run(&cfg).unwrap().snapshots.unwrap();
    let ch = SystemChannel::new(&cfg, 0).unwrap();
    let mut rho = init;
    for snap in snaps.iter().skip(1) {
        rho = ch.apply(&rho).unwrap();
        assert!(rho.matrix().max_abs_diff(snap.matrix()) < 1e-13);
    }
}

#[test]
fn same_seed_reproduces_records() {
    let cfg = memory_cfg(AaMode::Incoherent, 0.5, 0.8, 20);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.records, b.records);
}

#[test]
fn windowed_matches_full_backend() {
    for (mode, p, lambda) in [
        (AaMode::Coherent, 1.0, 1.0),
        (AaMode::Coherent, 0.4, 0.7),
        (AaMode::Incoherent, 0.5, 0.6),
        (AaMode::Off, 0.0, 0.5),
    ] {
        let mut cfg = memory_cfg(mode, p, lambda, 6);
        let w = run(&cfg).unwrap();
        cfg.backend = Backend::Full;
        let f = run(&cfg).unwrap();
        for (a, b) in w.snapshots.unwrap().iter().zip(f.snapshots.unwrap().iter()) {
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12, "{mode:?}");
        }
        for (a, b) in w.records.iter().zip(&f.records) {
            for (x, y) in [
                (a.heat, b.heat),
                (a.work, b.work),
                (a.s_sys_before, b.s_sys_before),
                (a.s_sys_after, b.s_sys_after),
                (a.s_anc_after, b.s_anc_after),
                (a.mutual_info, b.mutual_info),
            ] {
                assert!((x - y).abs() < 1e-10, "{mode:?} step {}", a.step);
            }
        }
    }
}

#[test]
fn joint_history_has_growing_factorization() {
    let cfg = memory_cfg(AaMode::Coherent, 0.5, 1.0, 4);
    let (_, joints) = run_with_joint_history(&cfg).unwrap();
    assert_eq!(joints.len(), 5);
    for (s, j) in joints.iter().enumerate() {
        assert_eq!(j.dim(), joint_factorization(&cfg, s).unwrap().total_dim());
    }
}

#[test]
fn full_backend_respects_cap() {
    let mut cfg = memory_cfg(AaMode::Off, 0.0, 1.0, 12);
    cfg.backend = Backend::Full;
    assert!(matches!(run(&cfg), Err(Error::CapExceeded { factors: 13, cap: 10, .. })));
}

#[test]
fn validation_rejects_bad_configs() {
    let mut cfg = memory_cfg(AaMode::Coherent, 0.5, 1.0, 3);
    cfg.aa_swap_prob = 1.5;
    assert!(matches!(Engine::new(cfg), Err(Error::Config(_))));

    let mut cfg = memory_cfg(AaMode::Off, 0.0, 1.0, 3);
    cfg.tau = 0.0;
    assert!(Engine::new(cfg).is_err());

    let bath = AncillaStreamSpec::thermal(h_half(), 1.0, StreamRole::Bath, Interaction::PartialSwap { theta: 0.3 }).unwrap();
    let mut cfg = CollisionConfig::new(h_half(), DensityMatrix::maximally_mixed(2), vec![bath.clone()], 0.3, 3);
    cfg.aa_mode = AaMode::Coherent;
    assert!(Engine::new(cfg).is_err());

    let mut wrong = bath;
    wrong.init_state = DensityMatrix::basis(2, 1).unwrap();
    let cfg = CollisionConfig::new(h_half(), DensityMatrix::maximally_mixed(2), vec![wrong], 0.3, 3);
    assert!(Engine::new(cfg).is_err());
}

#[test]
fn paired_runs_share_the_channel() {
    let cfg = memory_cfg(AaMode::Incoherent, 0.5, 1.0, 10);
    let a = DensityMatrix::basis(2, 0).unwrap();
    let b = DensityMatrix::basis(2, 1).unwrap();
    let (ta, tb) = run_paired(&cfg, &a, &b).unwrap();
    for (ra, rb) in ta.records.iter().zip(&tb.records) {
        assert_eq!(ra.d_pair, rb.d_pair);
        assert!(ra.d_pair.unwrap() >= 0.0);
    }
    // a fully swapped window forgets the initial state
    let mut c = cfg.clone();
    c.aa_mode = AaMode::Off;
    c.streams[0].interaction = Interaction::PartialSwap { theta: PI / 2.0 };
    let (ta, _) = run_paired(&c, &a, &b).unwrap();
    assert!(ta.records[0].d_pair.unwrap() < 1e-12);
}

#[test]
fn erasure_keeps_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = HilbertFactorization::new(vec![2, 2, 2]).unwrap();
    let rho = random_state(&mut rng, 8);
    let out = erase_correlations(&rho, &f, 0.3).unwrap();
    for keep in [[0usize].as_slice(), &[1, 2]] {
        let a = rho.partial_trace(&f, keep).unwrap();
        let b = out.partial_trace(&f, keep).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-14);
    }
    let full = erase_correlations(&rho, &f, 0.0).unwrap();
    assert!(mutual_information(&full, &f, &[0], crate::qstate::LogBase::E).unwrap().abs() < 1e-12);
}
