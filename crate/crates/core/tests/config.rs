use std::path::PathBuf;

use dslab_core::config::{canonical_hash, parse_config, parse_config_str, ConfigError, ScenarioKind};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn quick() -> String {
    std::fs::read_to_string(configs_dir().join("quick_beam_splitter.toml")).unwrap()
}

#[test]
fn shipped_configs_parse() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let c = parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(c.hash.len(), 64);
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

#[test]
fn minimal_beam_splitter_is_fully_populated() {
    let c = parse_config_str(&quick()).unwrap();
    assert_eq!(c.config.scenario, ScenarioKind::BeamSplitter);
    let p = c.config.beam_splitter.as_ref().unwrap();
    assert_eq!(p.mass, 20.0);
    assert_eq!(p.substeps, 4);
    assert!(p.grid.periodic);
    assert_eq!(p.barrier.on, None);
    assert_eq!(c.seed(), 7);
}

#[test]
fn misspelled_key_is_named_with_its_path() {
    let text = quick().replace("sigma = 2.0", "sigmaa = 2.0");
    match parse_config_str(&text) {
        Err(ConfigError::Key { path, message }) => {
            assert!(path.starts_with("beam_splitter.packet"), "{path}");
            assert!(message.contains("sigmaa"), "{message}");
        }
        other => panic!("expected a key error, got {other:?}"),
    }
}

#[test]
fn missing_physics_parameter_is_an_error() {
    let text = quick().replace("mass = 20.0\n", "");
    let e = parse_config_str(&text).unwrap_err();
    assert!(e.to_string().contains("mass"), "{e}");
}

#[test]
fn comments_and_layout_do_not_change_the_hash() {
    let a = quick();
    let b = format!("# another comment\n{}", a.replace("seed = 7", "seed   =   7 # inline"));
    let c = a.replace("mass = 20.0\ndt = 0.1", "dt = 0.10\nmass = 2e1");
    let h = canonical_hash(&a).unwrap();
    assert_eq!(h, canonical_hash(&b).unwrap());
    assert_eq!(h, canonical_hash(&c).unwrap());
    assert_ne!(h, canonical_hash(&a.replace("mass = 20.0", "mass = 21.0")).unwrap());
}

#[test]
fn seed_override_keeps_the_hash() {
    let c = parse_config_str(&quick()).unwrap();
    let o = c.clone().with_seed(Some(99));
    assert_eq!(o.seed(), 99);
    assert_eq!(o.meta().config_hash, c.meta().config_hash);
    assert_eq!(o.meta().seed, 99);
}

#[test]
fn unresolved_dispersion_is_rejected() {
    let e = parse_config_str(&quick().replace("k0 = 2.0", "k0 = 30.0")).unwrap_err();
    assert!(matches!(e, ConfigError::Invalid(_)), "{e}");
    let e = parse_config_str(&quick().replace("dt = 0.1", "dt = 20.0")).unwrap_err();
    assert!(e.to_string().contains("dispersion"), "{e}");
}

#[test]
fn scenario_needs_its_section() {
    let text = quick().replace("scenario = \"beam_splitter\"", "scenario = \"epr\"");
    assert!(matches!(parse_config_str(&text), Err(ConfigError::MissingSection { .. })));
}

#[test]
fn cauchy_surface_after_switch_on_is_rejected() {
    let text = std::fs::read_to_string(configs_dir().join("cauchy.toml")).unwrap();
    let e = parse_config_str(&text.replace("t_in = 30.0", "t_in = 75.0")).unwrap_err();
    assert!(e.to_string().contains("not before the interaction"), "{e}");
}

#[test]
fn malformed_toml_is_a_syntax_error() {
    assert!(matches!(parse_config_str("run_id = "), Err(ConfigError::Syntax(_))));
}
