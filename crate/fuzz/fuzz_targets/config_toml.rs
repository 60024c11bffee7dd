#![no_main]

use libfuzzer_sys::fuzz_target;
use nlhk_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml_str(text) {
        // Anything accepted must survive a round trip unchanged.
        let again = cfg.to_toml_string().expect("serialize accepted config");
        let back = RunConfig::from_toml_str(&again).expect("reparse serialized config");
        assert_eq!(back, cfg);
    }
});
