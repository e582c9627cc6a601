use std::path::PathBuf;

use bigon::{cech, expr, form, scenario};
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| std::fs::read(p).unwrap())
        .collect()
}

fn expr_target(data: &[u8]) {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(e) = expr::parse(src) {
        let printed = e.to_string();
        expr::parse(&printed).unwrap_or_else(|err| panic!("{printed:?} does not reparse: {err}"));
        let _ = e.eval(&[0.5; 9]);
        let _ = e.differentiate(0);
    }
}

fn scenario_target(data: &[u8]) {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sc) = scenario::parse_scenario(src) {
        scenario::parse_scenario(&sc.to_toml()).expect("serialized scenarios load");
    }
}

fn nerve_target(data: &[u8]) {
    if let Ok(nerve) = cech::parse_nerve(&String::from_utf8_lossy(data)) {
        let _ = nerve.validate();
    }
}

fn key_target(data: &[u8]) {
    let Some((&shape, rest)) = data.split_first() else {
        return;
    };
    let degree = (shape & 0b11) as usize;
    let dim = 1 + ((shape >> 2) & 0b111) as usize;
    let algebra_dim = 1 + (shape >> 5) as usize;
    if let Ok((a, mu)) = form::parse_key(&String::from_utf8_lossy(rest), degree, dim, algebra_dim) {
        assert!(a < algebra_dim);
        assert_eq!(mu.len(), degree);
        assert!(mu.windows(2).all(|w| w[0] < w[1]) && mu.iter().all(|&m| m < dim));
    }
}

type Target = (&'static str, fn(&[u8]));

const TARGETS: [Target; 4] = [
    ("parse_expr", expr_target),
    ("parse_scenario", scenario_target),
    ("parse_nerve", nerve_target),
    ("parse_form_key", key_target),
];

#[test]
fn corpus_replays_cleanly() {
    for (name, run) in TARGETS {
        let seeds = corpus(name);
        assert!(!seeds.is_empty(), "{name} has no seeds");
        for seed in seeds {
            run(&seed);
        }
    }
}

#[derive(Clone, Debug)]
enum Edit {
    Flip(usize, u8),
    Insert(usize, u8),
    Delete(usize),
    Splice(usize, usize),
}

fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        (any::<usize>(), any::<u8>()).prop_map(|(i, b)| Edit::Flip(i, b)),
        (
            any::<usize>(),
            prop::sample::select(b"()[]{}=,.\"'#\n-+*/^0123456789eEsxtpi".to_vec())
        )
            .prop_map(|(i, b)| Edit::Insert(i, b)),
        any::<usize>().prop_map(Edit::Delete),
        (any::<usize>(), any::<usize>()).prop_map(|(i, j)| Edit::Splice(i, j)),
    ]
}

fn mutate(mut data: Vec<u8>, edits: &[Edit]) -> Vec<u8> {
    for e in edits {
        let n = data.len().max(1);
        match *e {
            Edit::Flip(i, b) if !data.is_empty() => data[i % n] ^= b,
            Edit::Insert(i, b) => data.insert(i % (data.len() + 1), b),
            Edit::Delete(i) if !data.is_empty() => {
                data.remove(i % n);
            }
            Edit::Splice(i, j) if !data.is_empty() => {
                let (a, b) = (i % n, j % n);
                let (lo, hi) = (a.min(b), a.max(b));
                let chunk = data[lo..hi].to_vec();
                data.splice(hi..hi, chunk);
            }
            _ => {}
        }
    }
    data
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn mutated_seeds_never_panic(target in 0..TARGETS.len(), pick in any::<usize>(), edits in prop::collection::vec(edit(), 0..8)) {
        let (name, run) = TARGETS[target];
        let seeds = corpus(name);
        let data = mutate(seeds[pick % seeds.len()].clone(), &edits);
        run(&data);
    }

    #[test]
    fn random_bytes_never_panic(target in 0..TARGETS.len(), data in prop::collection::vec(any::<u8>(), 0..256)) {
        (TARGETS[target].1)(&data);
    }
}
