#![no_main]

use iemgof::mcharness::PowerStudyConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = PowerStudyConfig::from_toml_str(text) {
        // Accepted studies must resolve their families and alternatives without panicking.
        for study in &config.study {
            let _ = study.specs();
            for &v in study.grid.iter().take(4) {
                let _ = study.alternative_at(v);
            }
        }
    }
});
