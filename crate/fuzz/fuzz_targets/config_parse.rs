//! Fuzz the config front-end: the full parse-and-validate path (sections,
//! presets, expressions, domain and functional construction) must either
//! produce a validated run description or a line-tagged error — never a
//! panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let _ = hk_cli::RunConfig::parse(src);
});
