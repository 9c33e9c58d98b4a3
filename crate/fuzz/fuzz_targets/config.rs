#![no_main]

use libfuzzer_sys::fuzz_target;
use qcomm_cli::config::{Overrides, Settings};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(layer) = Overrides::from_toml(text) {
        let _ = Settings::resolve(layer);
    }
});
