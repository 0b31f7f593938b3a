#![no_main]

use libfuzzer_sys::fuzz_target;
use paramdp::formula::Formula;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(f) = Formula::parse(text) {
            let _ = Formula::parse(&f.to_string()).expect("printed formula parses");
        }
    }
});
