#![no_main]

use libfuzzer_sys::fuzz_target;
use nlhk_cli::config::parse_table;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((knots, values)) = parse_table(text) {
        assert_eq!(knots.len(), values.len());
        assert!(!knots.is_empty());
    }
});
