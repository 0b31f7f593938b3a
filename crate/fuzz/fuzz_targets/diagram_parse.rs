#![no_main]

use libfuzzer_sys::fuzz_target;
use paramdp::diagram::parse;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(expr) = parse(text) {
            // Printing must produce text that parses back to the same tree.
            let again = parse(&expr.to_string()).expect("printed diagram parses");
            assert_eq!(again, expr);
        }
    }
});
