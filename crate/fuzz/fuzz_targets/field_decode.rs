//! The field-artifact decoder must never panic or over-allocate on
//! attacker-controlled bytes, and anything it does accept must re-encode to
//! a byte stream it accepts again (the format is canonical).
#![no_main]

use libfuzzer_sys::fuzz_target;
use matchrace::FieldArtifact;

fuzz_target!(|data: &[u8]| {
    if let Ok(artifact) = FieldArtifact::decode(data) {
        let bytes = artifact.encode();
        let again = FieldArtifact::decode(&bytes).expect("canonical re-decode");
        assert_eq!(artifact, again);
    }
});
