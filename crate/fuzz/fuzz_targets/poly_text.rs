#![no_main]

use libfuzzer_sys::fuzz_target;
use qcomm::qsvt::ChebyshevPoly;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(poly) = ChebyshevPoly::from_text(text) {
        let again = ChebyshevPoly::from_text(&poly.to_text()).expect("printed polynomial parses");
        assert_eq!(again.to_text(), poly.to_text());
    }
});
