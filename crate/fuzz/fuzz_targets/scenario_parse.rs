//! The scenario parser must never panic, whatever bytes it is fed: every
//! malformed input has to surface as a structured parse error instead.
#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let _ = matchrace::parse_scenario(&text);
});
