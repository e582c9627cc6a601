#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&shape, rest)) = data.split_first() else {
        return;
    };
    let degree = (shape & 0b11) as usize;
    let dim = 1 + ((shape >> 2) & 0b111) as usize;
    let algebra_dim = 1 + (shape >> 5) as usize;
    let key = String::from_utf8_lossy(rest);
    if let Ok((a, mu)) = bigon::form::parse_key(&key, degree, dim, algebra_dim) {
        assert!(a < algebra_dim);
        assert_eq!(mu.len(), degree);
        assert!(mu.windows(2).all(|w| w[0] < w[1]) && mu.iter().all(|&m| m < dim));
    }
});
