#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(e) = bigon::expr::parse(src) {
        let printed = e.to_string();
        bigon::expr::parse(&printed).expect("printed expressions parse");
        let _ = e.eval(&[0.5; 9]);
        let _ = e.differentiate(0);
    }
});
