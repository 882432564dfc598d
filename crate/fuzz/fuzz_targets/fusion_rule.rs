#![no_main]

use libfuzzer_sys::fuzz_target;
use ppcr5::distributed::FusionRule;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(rule) = text.parse::<FusionRule>() {
            assert_eq!(rule.name().parse::<FusionRule>().unwrap(), rule);
        }
    }
});
