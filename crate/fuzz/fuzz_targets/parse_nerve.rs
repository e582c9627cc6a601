#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let src = String::from_utf8_lossy(data);
    if let Ok(nerve) = bigon::cech::parse_nerve(&src) {
        let _ = nerve.validate();
    }
});
