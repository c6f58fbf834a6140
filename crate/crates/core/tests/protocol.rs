use qpolar::polar::PolarCodeSpec;
use qpolar::protocol::{ExecutionMode, ProjectionMethod, Protocol, ProtocolConfig};
use qpolar::qsim::{fidelity, QuantumState, QubitSource, StateVector, FIDELITY_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn protocol(n_exp: u32, frozen: Vec<usize>, p: f64, seed: u64, mode: ExecutionMode) -> Protocol {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = QubitSource::random_basis(p, &mut rng).unwrap();
    Protocol::new(ProtocolConfig::new(PolarCodeSpec::with_frozen(n_exp, frozen).unwrap(), source, mode)).unwrap()
}

// Haar-random superposition of the correctable eigenstrings, in the source's frame.
fn correctable_superposition(proto: &Protocol, seed: u64) -> QuantumState<f64> {
    let n = proto.config().code.n();
    let support: Vec<usize> = proto.correctable_set().unwrap().patterns().iter().map(|x| x.to_index() as usize).collect();
    let mut psi = StateVector::haar_random(n, &support, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    psi.apply_all(&proto.config().source.u_rho_dagger()).unwrap();
    QuantumState::pure(psi)
}

#[test]
fn correctable_superpositions_round_trip() {
    for (n_exp, frozen) in [(2, vec![1, 3]), (3, vec![1, 2, 3, 5]), (3, vec![1, 2, 3, 4, 5, 6])] {
        let proto = protocol(n_exp, frozen, 0.1, 7, ExecutionMode::QuantumPure);
        for seed in 0..5 {
            let input = correctable_superposition(&proto, seed);
            let enc = proto.alice_encode(&input).unwrap();
            assert!((enc.flag.success - 1.0).abs() < 1e-12);
            let compressed = enc.compressed.unwrap();
            assert!(matches!(compressed, QuantumState::Pure { .. }));
            assert_eq!(compressed.n_qubits(), proto.qubits_sent());
            let out = proto.bob_decode(&compressed).unwrap();
            assert!(fidelity(&input, &out).unwrap() >= 1.0 - FIDELITY_TOL);
        }
    }
}

#[test]
fn lifted_projection_matches_direct_on_pure_inputs() {
    let direct = protocol(3, vec![1, 2, 3, 5], 0.15, 3, ExecutionMode::QuantumPure);
    let lifted = Protocol::new(direct.config().clone().with_projection(ProjectionMethod::Lifted)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let all: Vec<usize> = (0..256).collect();
    for _ in 0..5 {
        let input = QuantumState::pure(StateVector::haar_random(8, &all, &mut rng).unwrap());
        let a = direct.alice_encode(&input).unwrap();
        let b = lifted.alice_encode(&input).unwrap();
        assert!((a.flag.success - b.flag.success).abs() < 1e-12);
        let f = fidelity(&a.compressed.unwrap(), &b.compressed.unwrap()).unwrap();
        assert!(f >= 1.0 - FIDELITY_TOL);
    }
}

#[test]
fn tracing_without_reset_decoheres_superpositions() {
    // three of the four correctable patterns carry nonzero information bits
    let proto = protocol(2, vec![1, 2], 0.1, 5, ExecutionMode::QuantumPure);
    let mut cfg = proto.config().clone();
    cfg.literal_trace = true;
    let literal = Protocol::new(cfg).unwrap();
    let input = correctable_superposition(&proto, 1);
    let out = literal.bob_decode(&literal.alice_encode(&input).unwrap().compressed.unwrap()).unwrap();
    let f = fidelity(&input, &out).unwrap();
    assert!(f < 0.99, "{f}");
    // a single correctable eigenstring survives either way
    let x = proto.correctable_set().unwrap().patterns()[1].to_index() as usize;
    let mut psi = StateVector::basis(4, x).unwrap();
    psi.apply_all(&proto.config().source.u_rho_dagger()).unwrap();
    let basis = QuantumState::pure(psi);
    let out = literal.bob_decode(&literal.alice_encode(&basis).unwrap().compressed.unwrap()).unwrap();
    assert!(fidelity(&basis, &out).unwrap() >= 1.0 - FIDELITY_TOL);
}

#[test]
fn exact_mode_success_and_fidelity() {
    let proto = protocol(3, vec![1, 2, 3, 5], 0.08, 9, ExecutionMode::QuantumExact);
    let out = proto.run(0, 0).unwrap();
    assert!((out.success_prob - proto.success_probability_exact().unwrap()).abs() < 1e-12);
    assert!(out.fidelity.unwrap() >= 1.0 - FIDELITY_TOL);
    assert_eq!(out.qubits_sent, 4);
}

#[test]
fn success_is_basis_independent() {
    let a = protocol(2, vec![1, 3], 0.2, 1, ExecutionMode::QuantumExact).run(0, 0).unwrap();
    let b = protocol(2, vec![1, 3], 0.2, 2, ExecutionMode::QuantumExact).run(0, 0).unwrap();
    assert!((a.success_prob - b.success_prob).abs() < 1e-12);
}

#[test]
fn sampled_modes_agree_with_exact() {
    let exact = protocol(3, vec![1, 2, 3, 5], 0.1, 4, ExecutionMode::QuantumExact).success_probability_exact().unwrap();
    for mode in [ExecutionMode::QuantumPure, ExecutionMode::ClassicalFast] {
        let out = protocol(3, vec![1, 2, 3, 5], 0.1, 4, mode).run(20_000, 99).unwrap();
        let se = out.stderr.unwrap();
        assert!((out.success_prob - exact).abs() <= 4.0 * se + 1e-12, "{mode:?}: {} vs {exact}", out.success_prob);
        if mode == ExecutionMode::QuantumPure {
            assert!(out.fidelity.unwrap() >= 1.0 - FIDELITY_TOL);
        }
    }
}

#[test]
fn wrong_register_sizes_are_rejected() {
    let proto = protocol(2, vec![1, 3], 0.1, 1, ExecutionMode::QuantumPure);
    let three = QuantumState::pure(StateVector::basis(3, 0).unwrap());
    assert!(proto.alice_encode(&three).is_err());
    assert!(proto.bob_decode(&three).is_err());
}
