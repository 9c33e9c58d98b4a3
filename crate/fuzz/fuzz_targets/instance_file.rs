#![no_main]

use libfuzzer_sys::fuzz_target;
use qcomm::instances::{from_toml, to_toml};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = from_toml(text) {
        // Anything the loader accepts must survive a save and reload.
        let saved = to_toml(&inst).expect("accepted instance serializes");
        from_toml(&saved).expect("saved instance reloads");
    }
});
