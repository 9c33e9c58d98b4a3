use proptest::prelude::*;
use qcomm_cli::report::{parse_ledger_csv, rows_to_csv};
use qcomm_cli::run::Row;

fn row() -> impl Strategy<Value = Row> {
    (
        ("[a-z0-9-]{1,12}", "[a-z, \"-]{0,16}", 0usize..1 << 20, 0usize..64),
        (1.0f64..1e6, 0.0f64..=1.0, 0usize..1 << 30, 0usize..1 << 30, 0usize..1000),
        (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, any::<u64>(), "[a-z-]{1,20}"),
        (
            1e-12f64..1.0,
            0.0f64..=1.0,
            0usize..1000,
            proptest::option::of(0usize..1 << 20),
            proptest::option::of(0usize..5000),
            any::<bool>(),
        ),
    )
        .prop_map(|(a, b, c, d)| Row {
            protocol: a.0,
            topology: a.1,
            n: a.2,
            r: a.3,
            kappa: b.0,
            gamma: b.1,
            qubits_sent: b.2,
            bits_sent: b.3,
            rounds: b.4,
            success_prob: c.0,
            fidelity: c.1,
            tv_distance: c.2,
            seed: c.3,
            instance: c.4,
            eps: d.0,
            final_success_prob: d.1,
            iterations: d.2,
            oracle_uses: d.3,
            degree: d.4,
            failed: d.5,
        })
}

proptest! {
    #[test]
    fn ledger_csv_round_trips(rows in proptest::collection::vec(row(), 0..6)) {
        let text = rows_to_csv(&rows).unwrap();
        prop_assert_eq!(parse_ledger_csv(&text).unwrap(), rows);
    }

    #[test]
    fn parser_never_panics(text in "[a-z0-9,.\n\"-]{0,200}") {
        let _ = parse_ledger_csv(&text);
    }
}
