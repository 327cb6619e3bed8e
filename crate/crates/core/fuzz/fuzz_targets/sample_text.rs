#![no_main]

use iemgof::io::{parse_sample_lines, parse_sample_text};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((values, lines)) = parse_sample_lines(text) {
        assert_eq!(values.len(), lines.len());
        assert!(values.iter().all(|v| v.is_finite()));
        assert_eq!(parse_sample_text(text).unwrap(), values);
    } else {
        assert!(parse_sample_text(text).is_err());
    }
});
