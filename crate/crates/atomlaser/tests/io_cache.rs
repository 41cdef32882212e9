mod common;

use std::fs;
use std::path::PathBuf;

use atomlaser::config::Config;
use atomlaser::io::*;
use common::*;

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("io-tests").join(name);
    let _ = fs::remove_dir_all(&d);
    d
}

fn small() -> Config {
    let mut cfg = Config::default();
    cfg.set("n_points", "64").unwrap();
    cfg.set("n_atoms", "200").unwrap();
    cfg
}

#[test]
fn round_trip_is_exact() {
    let dir = scratch("round-trip");
    let trap = trap10();
    save_hfb(&dir, "k", trap).unwrap();
    let back = load_hfb(&dir, "k").unwrap().unwrap();
    assert_eq!(&back, trap);
}

#[test]
fn missing_entry_is_none() {
    let dir = scratch("missing");
    assert!(load_hfb(&dir, "absent").unwrap().is_none());
}

#[test]
fn truncated_binary_is_a_format_error() {
    let dir = scratch("truncated");
    save_hfb(&dir, "k", trap10()).unwrap();
    let bin = dir.join("hfb-k.bin");
    let bytes = fs::read(&bin).unwrap();
    fs::write(&bin, &bytes[..bytes.len() - 8]).unwrap();
    assert!(matches!(load_hfb(&dir, "k"), Err(IoError::Format { .. })));
}

#[test]
fn key_tracks_solution_inputs_only() {
    let base = Config::default();
    let k0 = hfb_cache_key(&base, 10.0);
    assert_eq!(k0, hfb_cache_key(&Config::default(), 10.0));
    assert_ne!(k0, hfb_cache_key(&base, 10.5));
    for (key, value) in [
        ("n_atoms", "999"),
        ("interaction_tt", "0.01"),
        ("interaction_tf", "0.02"),
        ("extent", "33"),
        ("n_points", "256"),
        ("mixing", "0.2"),
        ("e_cut", "17"),
        ("scf_tol", "1e-5"),
        ("scf_max_iter", "7"),
        ("gpe_dtau", "0.003"),
        ("gpe_tol", "1e-7"),
    ] {
        let mut cfg = base.clone();
        cfg.set(key, value).unwrap();
        assert_ne!(hfb_cache_key(&cfg, 10.0), k0, "{key}");
    }
    for (key, value) in [("coupling_amplitude", "0.7"), ("kick", "2"), ("time", "3"), ("t_max", "50")] {
        let mut cfg = base.clone();
        cfg.set(key, value).unwrap();
        assert_eq!(hfb_cache_key(&cfg, 10.0), k0, "{key}");
    }
}

#[test]
fn solve_cached_reports_hits() {
    let dir = scratch("hits");
    let cfg = small();
    let (a, hit) = solve_cached(&cfg, 2.0, Some(&dir)).unwrap();
    assert!(!hit);
    let (b, hit) = solve_cached(&cfg, 2.0, Some(&dir)).unwrap();
    assert!(hit);
    assert_eq!(a, b);
    let (_, hit) = solve_cached(&cfg, 2.0, None).unwrap();
    assert!(!hit);
}

#[test]
fn csv_rendering() {
    let mut csv = Csv::new(&["a", "b", "c"]);
    csv.push_nums(&[0.0, -0.0, 1.5]);
    csv.push(vec![Cell::from("x"), Cell::from(None), Cell::from(Some(-2.0e-7))]);
    assert_eq!(csv.render(), "a,b,c\n0,0,1.50000000000000e0\nx,,-2.00000000000000e-7\n");
    assert_eq!(format_value(123456.789), "1.23456789000000e5");
}

#[test]
#[should_panic(expected = "row width")]
fn csv_rejects_short_rows() {
    Csv::new(&["a", "b"]).push_nums(&[1.0]);
}
