#![no_main]

use libfuzzer_sys::fuzz_target;
use ppcr5::scenario::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = ScenarioConfig::parse(text) {
            // anything the parser accepts must already be valid
            config.validate().expect("parsed config validates");
        }
    }
});
