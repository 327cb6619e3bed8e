#![no_main]

use iemgof::io::parse_null_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_null_spec(text) {
        assert_eq!(parse_null_spec(&spec.to_string()).unwrap(), spec);
    }
});
