#![no_main]

use libfuzzer_sys::fuzz_target;

// Arguments are NUL-separated; parsing only, nothing is executed.
fuzz_target!(|data: &[u8]| {
    let args = std::iter::once("ppcr5".to_string())
        .chain(data.split(|b| *b == 0).map(|a| String::from_utf8_lossy(a).into_owned()));
    let _ = ppcr5::cli::parse_args(args);
});
