use std::fs;
use std::path::PathBuf;

use iemgof::io::*;
use iemgof::mcharness::PowerStudyConfig;
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "{dir:?}");
    files.iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

fn sample_invariants(text: &str) {
    match parse_sample_lines(text) {
        Ok((values, lines)) => {
            assert_eq!(values.len(), lines.len());
            assert!(values.iter().all(|v| v.is_finite()));
            assert!(lines.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(parse_sample_text(text).unwrap(), values);
        }
        Err(_) => assert!(parse_sample_text(text).is_err()),
    }
}

fn table_invariants(text: &str) {
    if let Ok(rows) = parse_critical_table(text) {
        let mut out = Vec::new();
        write_critical_table(&rows, &mut out).unwrap();
        let again = parse_critical_table(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(rows.len(), again.len());
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(a.critical_value.to_bits(), b.critical_value.to_bits());
        }
    }
}

fn null_invariants(text: &str) {
    if let Ok(spec) = parse_null_spec(text) {
        assert_eq!(parse_null_spec(&spec.to_string()).unwrap(), spec);
    }
}

#[test]
fn sample_seeds() {
    for text in corpus("sample_text") {
        sample_invariants(&text);
        assert!(parse_sample_text(&text).is_ok());
    }
}

#[test]
fn power_config_seeds() {
    for text in corpus("power_config") {
        let config = PowerStudyConfig::from_toml_str(&text).unwrap();
        for study in &config.study {
            assert!(!study.specs().unwrap().is_empty());
        }
    }
}

#[test]
fn critical_table_seeds() {
    for text in corpus("critical_table") {
        assert!(!parse_critical_table(&text).unwrap().is_empty());
        table_invariants(&text);
    }
}

#[test]
fn null_spec_seeds() {
    for text in corpus("null_spec") {
        let parsed = parse_null_spec(&text);
        // The usage placeholder is a syntax seed, not a valid spec.
        assert_eq!(parsed.is_ok(), !text.contains("MU"), "{text}");
        null_invariants(&text);
    }
}

proptest! {
    #[test]
    fn sample_parser_total(text in "([ \t]*(-?[0-9.eE+]{0,8}|nan|inf|#x)[ \t]*\n?){0,8}") {
        sample_invariants(&text);
    }

    #[test]
    fn null_spec_parser_total(text in "(uniform|normal)?[ (]{0,2}[-0-9.e, ]{0,12}\\)?") {
        null_invariants(&text);
    }

    #[test]
    fn table_parser_total(row in "[a-z-]{0,6},[0-9]{0,2},(true|false|x),[0-9.e-]{0,6},[0-9.e-]{0,6},[a-z]{0,4},[0-9.e-]{0,6}") {
        table_invariants(&format!("{}\n{row}\n", CRITICAL_HEADER.join(",")));
    }

    #[test]
    fn config_parser_total(text in "\\[\\[study\\]\\]\n(name|family|m|n|seed|grid|vary) = (\"[a-z]{0,4}\"|[0-9]{1,3}|\\[[0-9., ]{0,6}\\])\n{0,1}") {
        let _ = PowerStudyConfig::from_toml_str(&text);
    }
}
