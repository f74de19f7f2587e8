use super::*;
use crate::engine::{AaMode, AncillaStreamSpec, Interaction};
use crate::linalg::{kron, pauli, ComplexMatrix};
use std::f64::consts::PI;

fn hq() -> ComplexMatrix {
    pauli::z().scale_re(0.5)
}

fn memory_cfg(mode: AaMode, p: f64, n: usize) -> CollisionConfig {
    let anc = DensityMatrix::basis(2, 0).unwrap();
    let stream = AncillaStreamSpec::resource(hq(), anc, Interaction::PartialSwap { theta: PI / 6.0 });
    let mut cfg = CollisionConfig::new(hq(), DensityMatrix::maximally_mixed(2), vec![stream], 0.3, n);
    cfg.aa_mode = mode;
    cfg.aa_swap_prob = p;
    cfg.rng_seed = 7;
    cfg
}

fn series(v: &[f64]) -> DistinguishabilitySeries {
    DistinguishabilitySeries { metric: Metric::Trace, values: v.to_vec() }
}

fn z_pair() -> (DensityMatrix, DensityMatrix) {
    (DensityMatrix::basis(2, 0).unwrap(), DensityMatrix::basis(2, 1).unwrap())
}

#[test]
fn blp_measure_examples() {
    assert_eq!(blp_measure(&series(&[0.9, 0.5, 0.5, 0.1])), 0.0);
    assert!((blp_measure(&series(&[0.5, 0.3, 0.4, 0.2])) - 0.1).abs() < 1e-15);
    assert_eq!(blp_measure(&series(&[0.5, 0.5 + 1e-11])), 0.0);
}

#[test]
fn identical_states_stay_indistinguishable() {
    let cfg = memory_cfg(AaMode::Coherent, 1.0, 10);
    let a = DensityMatrix::from_bloch([0.1, 0.2, 0.3]).unwrap();
    let (ta, tb) = run_paired(&cfg, &a, &a).unwrap();
    for m in [Metric::Trace, Metric::JensenShannon] {
        assert!(distinguishability_series(&ta, &tb, m).unwrap().values.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn grid_shapes() {
    let g = bloch_grid(1);
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].r, [0.0, 0.0, 1.0]);
    assert_eq!(bloch_grid(DEFAULT_GRID).len(), 1 + 11 * 24);
    for p in bloch_grid(5) {
        let n: f64 = p.r.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-14 && p.r[2] > 0.0);
    }
}

#[test]
fn memoryless_series_never_revive() {
    let cfg = memory_cfg(AaMode::Off, 0.0, 12);
    for m in [Metric::Trace, Metric::JensenShannon] {
        for p in bloch_grid(3) {
            let s = pair_series(&cfg, &p, m).unwrap();
            assert!(s.values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            assert!(s.values.iter().all(|&v| (-1e-10..=1.0 + 1e-10).contains(&v)));
        }
        assert_eq!(blp_optimize_pairs(&cfg, m, 3).unwrap().1, 0.0);
    }
}

#[test]
fn full_memory_revives() {
    for mode in [AaMode::Coherent, AaMode::Incoherent] {
        let cfg = memory_cfg(mode, 1.0, 12);
        let (a, b) = z_pair();
        let (ta, tb) = run_paired(&cfg, &a, &b).unwrap();
        let s = distinguishability_series(&ta, &tb, Metric::Trace).unwrap();
        let dip = (1..s.values.len() - 1).find(|&n| s.values[n] < s.values[n - 1] && s.values[n] < s.values[n + 1]);
        assert!(dip.is_some(), "{mode:?}: {:?}", s.values);
        let at_z = blp_measure(&s);
        let (_, best) = blp_optimize_pairs(&cfg, Metric::Trace, 4).unwrap();
        assert!(best >= at_z && at_z > 0.0);
    }
}

#[test]
fn optimizer_rejects_non_qubits() {
    let h3 = ComplexMatrix::from_real_diag(&[0.0, 1.0, 2.0]);
    let stream = AncillaStreamSpec::resource(h3.clone(), DensityMatrix::basis(3, 0).unwrap(), Interaction::PartialSwap { theta: 0.3 });
    let cfg = CollisionConfig::new(h3, DensityMatrix::maximally_mixed(3), vec![stream], 0.3, 3);
    assert!(matches!(blp_optimize_pairs(&cfg, Metric::Trace, 2), Err(Error::Unsupported(_))));
}

#[test]
fn bound_holds_for_every_pair_of_steps() {
    let (a, b) = (DensityMatrix::from_bloch([0.6, 0.0, 0.8]).unwrap(), DensityMatrix::from_bloch([-0.6, 0.0, -0.8]).unwrap());
    for (mode, p) in [(AaMode::Coherent, 1.0), (AaMode::Incoherent, 0.5), (AaMode::Coherent, 0.6)] {
        let cfg = memory_cfg(mode, p, 6);
        for metric in [Metric::Trace, Metric::JensenShannon] {
            let mut c = cfg.clone();
            c.metric = metric;
            let an = BoundAnalysis::new(&c, &a, &b).unwrap();
            let reports = an.all_reports();
            assert_eq!(reports.len(), 7 * 8 / 2);
            assert!(reports.iter().all(|r| r.slack >= -1e-9), "{mode:?} {metric:?}");
            if p == 1.0 {
                assert!(reports.iter().any(|r| r.lhs > 1e-4));
            }
        }
    }
}

#[test]
fn equal_steps_give_zero_revival() {
    let cfg = memory_cfg(AaMode::Coherent, 1.0, 4);
    let (a, b) = z_pair();
    let r = revival_bound_report(&cfg, &a, &b, 2, 2).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(r.slack >= 0.0);
    assert!(revival_bound_report(&cfg, &a, &b, 3, 2).is_err());
    let mut big = memory_cfg(AaMode::Coherent, 1.0, 12);
    big.metric = Metric::Trace;
    assert!(matches!(revival_bound_report(&big, &a, &b, 0, 1), Err(Error::CapExceeded { .. })));
}

#[test]
fn uncoupled_units_carry_no_precursors() {
    let anc = DensityMatrix::basis(2, 0).unwrap();
    let v = kron(&pauli::x(), &pauli::x());
    let stream = AncillaStreamSpec::resource(hq(), anc, Interaction::Hamiltonian { v, g: 0.0 });
    let mut cfg = CollisionConfig::new(hq(), DensityMatrix::maximally_mixed(2), vec![stream], 0.3, 5);
    cfg.aa_mode = AaMode::Coherent;
    cfg.aa_swap_prob = 0.5;
    let (a, b) = z_pair();
    for p in precursor_series(&cfg, &a, &b).unwrap() {
        assert!(p.env.abs() < 1e-12 && p.corr_rho.abs() < 1e-12 && p.corr_sigma.abs() < 1e-12);
    }
}

#[test]
fn correlations_without_revivals() {
    let cfg = memory_cfg(AaMode::Off, 0.0, 6);
    let (a, b) = (DensityMatrix::from_bloch([0.6, 0.0, 0.8]).unwrap(), DensityMatrix::from_bloch([-0.6, 0.0, -0.8]).unwrap());
    let an = BoundAnalysis::new(&cfg, &a, &b).unwrap();
    assert!(an.precursors.iter().skip(1).all(|p| p.corr_rho > 1e-3));
    assert!(an.all_reports().iter().all(|r| r.lhs <= 1e-12));
    assert!(an.dominant_revival().is_none());
}

#[test]
fn precursors_precede_the_first_revival() {
    let cfg = memory_cfg(AaMode::Coherent, 1.0, 8);
    let (a, b) = z_pair();
    let an = BoundAnalysis::new(&cfg, &a, &b).unwrap();
    let first = (1..an.system.len()).find(|&n| an.system[n] - an.system[n - 1] > REVIVAL_THRESHOLD).unwrap();
    let (s, t) = an.dominant_revival().unwrap();
    assert!(s < t);
    assert!(an.report(s, t).unwrap().slack >= -1e-9);
    assert!(an.precursors[..first].iter().any(|p| p.env > 0.0 || p.corr_rho > 0.0 || p.corr_sigma > 0.0));
}

#[test]
fn correlation_distance_is_finite_on_sparse_joint_states() {
    let cfg = memory_cfg(AaMode::Coherent, 0.6, 6);
    let mut ca = cfg.clone();
    ca.system_init = DensityMatrix::from_bloch([0.6, 0.0, 0.8]).unwrap();
    let (_, joints) = run_with_joint_history(&ca).unwrap();
    let f = joint_factorization(&cfg, 6).unwrap();
    let env: Vec<usize> = (1..f.len()).collect();
    let rho = &joints[6];
    let prod = rho.partial_trace(&f, &[0]).unwrap().kron(&rho.partial_trace(&f, &env).unwrap());
    let d = crate::qstate::trace_distance(rho, &prod).unwrap();
    assert!(d.is_finite() && d > 1e-3 && d <= 1.0);
    assert!(crate::qstate::js_distance(rho, &prod).unwrap().is_finite());
}
