use dirode_cli::{parse_config, ConfigError, Problem};
use proptest::prelude::*;

const KEYS: &[&str] = &[
    "problem", "out", "seed", "nx", "ny", "dt", "steps", "scheme", "order", "sampling", "corrections", "tolerance", "nu",
    "diffusivity", "d0", "beta", "growth", "noise", "wind_mode", "every", "preset", "re", "max_steps", "threshold",
    "psi_iterations", "lower", "upper", "samples", "trials", "speed", "t_end", "ladder",
];

#[derive(Debug, Clone)]
enum Mutation {
    Delete(usize),
    Insert(usize, char),
    Replace(usize, char),
    Swap(usize),
    Case(usize),
}

fn mutate(key: &str, m: &Mutation) -> String {
    let mut c: Vec<char> = key.chars().collect();
    let n = c.len();
    match *m {
        Mutation::Delete(i) => {
            c.remove(i % n);
        }
        Mutation::Insert(i, ch) => c.insert(i % (n + 1), ch),
        Mutation::Replace(i, ch) => c[i % n] = ch,
        Mutation::Swap(i) => c.swap(i % (n - 1), i % (n - 1) + 1),
        Mutation::Case(i) => c[i % n] = c[i % n].to_ascii_uppercase(),
    }
    c.into_iter().collect()
}

fn mutation() -> impl Strategy<Value = Mutation> {
    let ch = prop::char::range('_', 'z');
    prop_oneof![
        any::<usize>().prop_map(Mutation::Delete),
        (any::<usize>(), ch.clone()).prop_map(|(i, c)| Mutation::Insert(i, c)),
        (any::<usize>(), ch).prop_map(|(i, c)| Mutation::Replace(i, c)),
        any::<usize>().prop_map(Mutation::Swap),
        any::<usize>().prop_map(Mutation::Case),
    ]
}

proptest! {
    #[test]
    fn misspelled_keys_fail_loudly(k in 0..KEYS.len(), m in mutation()) {
        let key = mutate(KEYS[k], &m);
        prop_assume!(!KEYS.contains(&key.as_str()));
        let text = format!(r#"{{"problem":"burgers","{key}":1}}"#);
        match parse_config(&text) {
            Err(ConfigError::Parse { message, .. }) => prop_assert!(message.contains(&key), "{message}"),
            other => prop_assert!(false, "accepted `{key}`: {other:?}"),
        }
    }
}

#[test]
fn empty_document_requires_a_problem() {
    let cfg = parse_config("").unwrap();
    let err = cfg.resolve().unwrap_err();
    assert_eq!(err.to_string(), "problem required");
}

#[test]
fn burgers_document_is_valid() {
    let cfg = parse_config(r#"{"problem":"burgers","nu":0.005,"nx":201,"dt":0.001}"#).unwrap();
    let r = cfg.resolve().unwrap();
    assert_eq!(r.problem, Some(Problem::Burgers));
    assert_eq!((r.nx, r.dt, r.nu), (Some(201), Some(0.001), Some(0.005)));
}

#[test]
fn unknown_key_is_rejected() {
    assert!(matches!(
        parse_config(r#"{"problem":"burgers","unknown_key":1}"#),
        Err(ConfigError::Parse { .. })
    ));
}

#[test]
fn parse_errors_carry_position() {
    match parse_config("{\n  \"problem\": \"burgers\",\n  \"nx\": ,\n}") {
        Err(ConfigError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 9)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn validation_names_the_key() {
    for (text, key) in [
        (r#"{"problem":"burgers","nx":2}"#, "nx"),
        (r#"{"problem":"burgers","dt":-1}"#, "dt"),
        (r#"{"problem":"burgers","scheme":"rk4"}"#, "scheme"),
        (r#"{"problem":"navier-stokes","preset":"cavity"}"#, "preset"),
        (r#"{"problem":"stochastic","lower":0.9,"upper":0.1}"#, "lower"),
        (r#"{"problem":"split-order","ladder":"dt:0.3,0.2,0.1"}"#, "ladder"),
        (r#"{"problem":"diffuse1d","scheme":"explicit","order":2}"#, "scheme"),
        (r#"{"problem":"stability-check","nx":11}"#, "nx"),
    ] {
        match parse_config(text).unwrap().resolve() {
            Err(ConfigError::Validation { key: k, .. }) => assert_eq!(k, key, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn resolved_config_round_trips_through_json() {
    for p in ["burgers", "diffuse1d", "particles2d", "navier-stokes", "stochastic", "stability-check", "split-order"] {
        let r = parse_config(&format!(r#"{{"problem":"{p}"}}"#)).unwrap().resolve().unwrap();
        let again = parse_config(&r.to_json()).unwrap();
        assert_eq!(again, r, "{p}");
        assert_eq!(again.resolve().unwrap(), r, "{p}");
    }
}
