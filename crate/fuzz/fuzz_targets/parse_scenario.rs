#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 16 * 1024 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = bigon::scenario::parse_scenario(src) {
        bigon::scenario::parse_scenario(&scenario.to_toml()).expect("serialized scenarios load");
    }
});
