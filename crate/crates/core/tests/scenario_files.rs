use std::path::PathBuf;

use bigon::scenario::{load_scenario, parse_scenario, run, Command, Options};

fn scenario_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    files.sort();
    files
}

#[test]
fn shipped_scenarios_round_trip() {
    let files = scenario_files();
    assert!(files.len() >= 10);
    for path in files {
        let first = load_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_scenario(&first.to_toml()).unwrap();
        assert_eq!(first, again, "{}", path.display());
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/transitions.scn");
    let sc = load_scenario(&path).unwrap();
    let opts = Options {
        seed: Some(7),
        ..Options::default()
    };
    let a = run(Command::Transitions, &sc, &opts).unwrap().to_json();
    let b = run(Command::Transitions, &sc, &opts).unwrap().to_json();
    assert_eq!(a, b);
    let c = run(
        Command::Transitions,
        &sc,
        &Options {
            seed: Some(8),
            ..opts
        },
    )
    .unwrap()
    .to_json();
    assert_ne!(a, c);
}

#[test]
fn resolution_errors_name_every_problem() {
    let text = r#"
crossed_module = "IDENTITY(SU2)"
dim = 2

[[charts]]
id = "U"
A = { "4,1" = "x1" }

[[charts]]
id = "U"

[[transitions]]
from = "U"
to = "Z"

[bigons]
loop = { vertical = ["loop", "loop"] }

[converge]
op = "volume"
grids = [8]
"#;
    let err = parse_scenario(text).unwrap_err().to_string();
    for needle in [
        "chart `U`",
        "declared twice",
        "unknown chart `Z`",
        "refers to itself",
        "op must be",
        "two grids",
    ] {
        assert!(err.contains(needle), "missing `{needle}` in:\n{err}");
    }
}

#[test]
fn overrides_take_precedence() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/abelian_square.scn");
    let sc = load_scenario(&path).unwrap();
    let r = run(
        Command::HolonomySurface,
        &sc,
        &Options {
            grid: Some(64),
            ..Options::default()
        },
    )
    .unwrap();
    assert_eq!(r.grid, Some(64));
    assert_eq!(r.seed, 42);
}
