use std::f64::consts::PI;

use lg_core::analytics::{correlator, lg_quantity, CorrelatorEstimate};
use lg_core::compiler::{compile, Circuit, GateKind};
use lg_core::noise::{apply_noise, invasive_o2, Channel, NoiseModel};
use lg_core::oracle::{brute_force_correlators, exact_program, superoperator_o3, theta_sweep};
use lg_core::protocols::{
    build_protocol, run_plan, Basis, ExperimentPlan, GatesetMode, ProtocolId, Role, SYSTEM_QUBIT,
};
use lg_core::qsim::{completeness_deviation, gates};
use lg_core::DEVICE_THETA;
use proptest::prelude::*;

fn device(id: ProtocolId) -> lg_core::protocols::ProtocolCircuit {
    build_protocol(id, DEVICE_THETA, GatesetMode::Device).unwrap()
}

/// Time-ordered product of the single-qubit gates on the system qubit,
/// CNOTs skipped.
fn system_product(c: &Circuit) -> lg_core::Matrix2 {
    let ms: Vec<_> = c
        .gates_on(SYSTEM_QUBIT)
        .iter()
        .filter_map(|g| g.kind.matrix())
        .collect();
    gates::sequence(&ms)
}

#[test]
fn single_measurement_protocols_are_subsets_of_f() {
    let f = device(ProtocolId::F);
    let f_compiled = compile(&f.circuit);
    for id in [ProtocolId::B, ProtocolId::C, ProtocolId::D, ProtocolId::E] {
        let x = device(id);
        let compiled = compile(&x.circuit);
        assert_eq!(compiled.n_slots(), f_compiled.n_slots(), "{id}");
        assert_eq!(x.sites.len(), 1);
        let site = x.sites[0];
        let in_f = f.site(site.role).unwrap();
        assert_eq!(site.ancilla, in_f.ancilla, "{id}");
        assert_eq!(site.copy_slot, in_f.copy_slot, "{id}");
        assert_eq!(
            compiled.gates_on(site.ancilla),
            f_compiled.gates_on(site.ancilla),
            "{id}"
        );
        // with every copy removed, the system qubit only sees the preparation
        let d = gates::phase_distance(&system_product(&compiled), &system_product(&f_compiled));
        assert!(d < 1e-12, "{id}: {d}");
    }
}

#[test]
fn deferred_measurement_is_sound_on_diagonal_states() {
    let ideal = NoiseModel::ideal();
    for theta in [0.0, PI] {
        let a = brute_force_correlators(
            &build_protocol(ProtocolId::A, theta, GatesetMode::Ideal).unwrap(),
            &ideal,
        )
        .unwrap();
        for id in [ProtocolId::B, ProtocolId::D] {
            let x = brute_force_correlators(
                &build_protocol(id, theta, GatesetMode::Ideal).unwrap(),
                &ideal,
            )
            .unwrap();
            let diff = (a.marginal_one(SYSTEM_QUBIT) - x.marginal_one(SYSTEM_QUBIT)).abs();
            assert!(diff < 1e-10, "{id} at {theta}: {diff}");
        }
    }
}

#[test]
fn o3_marginal_of_f_matches_superoperator() {
    let bases = [Basis::Z, Basis::Theta, Basis::Z, Basis::Theta];
    for theta in [DEVICE_THETA, 0.3, 1.9, -2.4] {
        let mode = if theta == DEVICE_THETA {
            GatesetMode::Device
        } else {
            GatesetMode::Ideal
        };
        let f = brute_force_correlators(
            &build_protocol(ProtocolId::F, theta, mode).unwrap(),
            &NoiseModel::ideal(),
        )
        .unwrap();
        let o3 = 2.0 * f.marginal_one(SYSTEM_QUBIT) - 1.0;
        assert!((o3 - superoperator_o3(theta, &bases)).abs() < 1e-10);
        assert!((o3 - theta.cos().powi(5)).abs() < 1e-10);
    }
}

fn c_a(model: &NoiseModel) -> f64 {
    brute_force_correlators(&device(ProtocolId::A), model)
        .unwrap()
        .correlator(Role::O1, Role::O3)
        .unwrap()
}

#[test]
fn depolarizing_and_readout_never_sharpen_c_a() {
    let grid = [0.0, 0.01, 0.05, 0.1, 0.2, 0.4];
    let knobs: [fn(f64) -> NoiseModel; 3] = [
        |p| NoiseModel {
            p1: p,
            ..NoiseModel::ideal()
        },
        |p| NoiseModel {
            p2: p,
            ..NoiseModel::ideal()
        },
        |p| NoiseModel {
            eps_ro: p,
            ..NoiseModel::ideal()
        },
    ];
    for knob in knobs {
        let values: Vec<f64> = grid.iter().map(|&p| c_a(&knob(p)).abs()).collect();
        for w in values.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{values:?}");
        }
    }
    // readout flips push every bit towards a coin toss
    let half = NoiseModel {
        eps_ro: 0.5,
        ..NoiseModel::ideal()
    };
    assert!(c_a(&half).abs() < 1e-12);
}

/// Damping relaxes the system qubit to |0⟩, which reads −1; at θ = −3π/4 the
/// ideal ⟨O1O3⟩_a is already negative, so damping makes it larger in size.
#[test]
fn idle_damping_drives_o3_towards_minus_one() {
    let grid = [0.0, 0.002, 0.01, 0.05, 0.2];
    let values: Vec<f64> = grid
        .iter()
        .map(|&g| {
            c_a(&NoiseModel {
                gamma_idle: g,
                ..NoiseModel::ideal()
            })
        })
        .collect();
    for w in values.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{values:?}");
    }
    assert!(values.last().unwrap() + 1.0 < 0.05);
}

#[test]
fn sampled_correlators_converge_to_exact_values() {
    let noise = NoiseModel {
        p1: 0.005,
        p2: 0.02,
        eps_ro: 0.01,
        gamma_idle: 0.002,
        kick: None,
    };
    let plan = ExperimentPlan {
        base_seed: 2024,
        noise,
        ..ExperimentPlan::default()
    };
    let result = run_plan(&plan).unwrap();
    for id in ProtocolId::ALL {
        let exact = brute_force_correlators(&device(id), &noise).unwrap();
        let mut pairs = vec![(Role::O1, Role::O3)];
        if id == ProtocolId::F {
            pairs.extend([(Role::O1, Role::O2), (Role::O2, Role::O3)]);
        }
        for pair in pairs {
            let est = correlator(result.tables(id), pair).unwrap();
            let want = exact.correlator(pair.0, pair.1).unwrap();
            assert!(
                (est.mean - want).abs() <= 5.0 * est.stderr + 1e-12,
                "{id} {pair:?}: {est:?} vs {want}"
            );
        }
        for t in result.tables(id) {
            let c = lg_core::analytics::table_correlator(t, (Role::O1, Role::O3)).unwrap();
            assert!((-1.0..=1.0).contains(&c));
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let plan = ExperimentPlan {
        shots: 512,
        repetitions: 3,
        base_seed: 99,
        ..ExperimentPlan::default()
    };
    assert_eq!(run_plan(&plan).unwrap(), run_plan(&plan).unwrap());
    let other = ExperimentPlan {
        base_seed: 100,
        ..plan.clone()
    };
    assert_ne!(
        run_plan(&plan).unwrap().tables,
        run_plan(&other).unwrap().tables
    );
}

#[test]
fn zero_kick_is_invisible() {
    let p = exact_program(
        DEVICE_THETA,
        GatesetMode::Device,
        &invasive_o2(&NoiseModel::ideal(), 0.0),
    )
    .unwrap();
    assert!(p.eps[0] < 1e-12);
    assert!(p.eps_total < 1e-12);
}

fn est(mean: f64, stderr: f64) -> CorrelatorEstimate {
    CorrelatorEstimate {
        mean,
        stderr,
        n_reps: 10,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn any_kick_is_detected(kappa in 1e-3f64..=PI, negative: bool) {
        let kappa = if negative { -kappa } else { kappa };
        let p = exact_program(DEVICE_THETA, GatesetMode::Device, &invasive_o2(&NoiseModel::ideal(), kappa)).unwrap();
        prop_assert!(p.eps[0] > 0.0);
        let expected = DEVICE_THETA.cos().abs() * (1.0 - kappa.cos());
        prop_assert!((p.eps[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn noisy_channels_are_trace_preserving(
        p1 in 0.0f64..=1.0,
        gamma in 0.0f64..=1.0,
        id_idx in 0usize..6,
    ) {
        let model = NoiseModel { p1, p2: p1, gamma_idle: gamma, ..NoiseModel::ideal() };
        let pc = device(ProtocolId::ALL[id_idx]);
        let program = apply_noise(&pc.circuit, &pc.sites, &model).unwrap();
        for op in &program.ops {
            match &op.channel {
                Channel::Kraus { operators, .. } => {
                    prop_assert!(completeness_deviation(operators) < 1e-12);
                }
                Channel::PauliMixture2 { terms, .. } => {
                    let total: f64 = terms.iter().map(|t| t.0).sum();
                    prop_assert!((total - 1.0).abs() < 1e-12);
                    prop_assert!(terms.iter().all(|t| t.0 >= 0.0));
                }
                _ => {}
            }
        }
        let dist = program.final_distribution().unwrap();
        prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(dist.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn oracle_routes_agree(theta in -PI..=PI) {
        let row = &theta_sweep(&[theta]).unwrap().rows[0];
        prop_assert!(row.max_disagreement() < 1e-10);
    }

    #[test]
    fn sampled_c_a_tracks_cos_theta(theta in -PI..=PI, seed: u64) {
        let plan = ExperimentPlan {
            theta,
            mode: GatesetMode::Ideal,
            shots: 8192,
            repetitions: 10,
            base_seed: seed,
            ..ExperimentPlan::default()
        };
        let result = run_plan(&plan).unwrap();
        let e = correlator(result.tables(ProtocolId::A), (Role::O1, Role::O3)).unwrap();
        // stderr can vanish for deterministic outcomes, so floor it at the
        // binomial value of the pooled shots
        let floor = (1.0 - theta.cos().powi(2)).max(0.0).sqrt() / (81920f64).sqrt();
        prop_assert!((e.mean - theta.cos()).abs() <= 5.0 * e.stderr.max(floor) + 1e-12);
    }

    #[test]
    fn lg_is_symmetric_and_affine(
        a in -1.0f64..=1.0, b in -1.0f64..=1.0, c in -1.0f64..=1.0, t in -1.0f64..=1.0,
    ) {
        let v = |x: f64, y: f64, z: f64| lg_quantity(&est(x, 0.01), &est(y, 0.02), &est(z, 0.03)).value;
        let base = v(a, b, c);
        prop_assert!((base - v(b, c, a)).abs() < 1e-12);
        prop_assert!((base - v(c, a, b)).abs() < 1e-12);
        prop_assert!((base - v(b, a, c)).abs() < 1e-12);
        prop_assert!((v(a + t, b, c) - base - t).abs() < 1e-12);
    }
}

#[test]
fn kinds_on_the_system_qubit_are_device_kinds() {
    for id in ProtocolId::ALL {
        for g in device(id).circuit.gates() {
            assert!(GateKind::DEVICE.contains(&g.kind));
        }
    }
}
