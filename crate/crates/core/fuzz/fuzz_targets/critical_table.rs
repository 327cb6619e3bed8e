#![no_main]

use iemgof::io::{parse_critical_table, write_critical_table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_critical_table(text) {
        let mut out = Vec::new();
        write_critical_table(&rows, &mut out).unwrap();
        let again = parse_critical_table(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(rows.len(), again.len());
    }
});
