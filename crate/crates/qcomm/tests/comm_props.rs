use proptest::prelude::*;
use qcomm::comm::{DistributedState, Party, Register, Session, Topology, TopologyKind};
use qcomm::linalg::{basis, completion_with_first_column, random_unit_vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn party() -> impl Strategy<Value = Party> {
    prop_oneof![Just(Party::Alice), Just(Party::Bob), Just(Party::Referee), (0usize..4).prop_map(Party::Player),]
}

fn kind() -> impl Strategy<Value = TopologyKind> {
    prop_oneof![
        Just(TopologyKind::OneWayAliceToBob),
        Just(TopologyKind::OneWayBobToAlice),
        Just(TopologyKind::TwoWay),
        Just(TopologyKind::Smp),
        Just(TopologyKind::Coordinator),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ledger_only_holds_allowed_messages(
        kind in kind(),
        sends in prop::collection::vec((party(), party(), 1usize..8, any::<bool>()), 0..40),
    ) {
        let count = match kind {
            TopologyKind::Smp | TopologyKind::Coordinator => 3,
            _ => 2,
        };
        let topology = Topology::new(kind, count).unwrap();
        let mut session = Session::new(topology);
        for (from, to, size, quantum) in sends {
            let result = if quantum {
                session.send_quantum(from, to, size)
            } else {
                session.send_classical(from, to, size)
            };
            prop_assert_eq!(result.is_ok(), topology.allows(from, to));
        }
        for m in session.ledger.messages() {
            prop_assert!(topology.allows(m.sender, m.receiver));
            prop_assert!(m.qubit_count == 0 || m.bit_count == 0);
        }
        if kind == TopologyKind::OneWayAliceToBob {
            prop_assert!(!session.ledger.has_direction(Party::Bob, Party::Alice));
        }
        if kind == TopologyKind::OneWayBobToAlice {
            prop_assert!(!session.ledger.has_direction(Party::Alice, Party::Bob));
        }
    }

    #[test]
    fn rounds_count_speaker_changes(speakers in prop::collection::vec(any::<bool>(), 1..30)) {
        let mut session = Session::new(Topology::two_party(TopologyKind::TwoWay));
        for &alice in &speakers {
            let (from, to) = if alice { (Party::Alice, Party::Bob) } else { (Party::Bob, Party::Alice) };
            session.send_quantum(from, to, 1).unwrap();
        }
        let changes = speakers.windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert_eq!(session.ledger.totals().rounds, changes + 1);
        prop_assert_eq!(session.ledger.totals().qubits_sent, speakers.len());
    }

    #[test]
    fn shuttled_unitary_matches_local_product(seed: u64, dim in 2usize..6, trips in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reg = |name: &str, owner| Register { name: name.into(), dim, owner };
        let psi = random_unit_vector(&mut rng, dim);
        let mut state = DistributedState::product(vec![
            (reg("a", Party::Bob), psi.clone()),
            (reg("b", Party::Bob), basis(dim, 0)),
        ]).unwrap();
        let mut session = Session::new(Topology::two_party(TopologyKind::TwoWay));
        let mut expected = psi.kronecker(&basis(dim, 0));
        for _ in 0..trips {
            let u = completion_with_first_column(&random_unit_vector(&mut rng, dim * dim));
            state.remote_apply(&mut session, Party::Alice, &u, &["a", "b"]).unwrap();
            expected = &u * expected;
        }
        prop_assert!((state.amplitudes() - &expected).norm() <= 1e-12);
        let width = 2 * qcomm::linalg::qubits_for(dim);
        prop_assert_eq!(session.ledger.totals().qubits_sent, 2 * trips * width);
        prop_assert_eq!(state.owner("a").unwrap(), Party::Bob);
    }
}
