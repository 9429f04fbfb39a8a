//! Fuzz the prefix-grammar expression parser. Parsing arbitrary input must
//! never panic, and anything it accepts must round-trip through the
//! canonical printer.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(expr) = hk_core::expr::parse_expr(src) {
        let printed = expr.to_string();
        let back = hk_core::expr::parse_expr(&printed).expect("printed form re-parses");
        assert_eq!(expr, back, "canonical form round-trips");
    }
    let _ = hk_core::expr::parse_vector(src);
});
