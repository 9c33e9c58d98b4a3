#![no_main]

use libfuzzer_sys::fuzz_target;
use qcomm_cli::report::{parse_ledger_csv, rows_to_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_ledger_csv(text) {
        let again = parse_ledger_csv(&rows_to_csv(&rows).expect("rows serialize")).expect("written ledger parses");
        assert_eq!(again.len(), rows.len());
    }
});
