#![no_main]

use libfuzzer_sys::fuzz_target;
use paramdp::bundle::Bundle;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = Bundle::from_json(text);
    }
});
