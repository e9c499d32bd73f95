mod common;

use std::collections::BTreeMap;

use common::{grid, random_field};
use ndgs_core::harness::field_io::{load_header, read_field, read_header, save_field, write_field, FieldIoError, HEADER_BYTES};
use ndgs_core::harness::report::{emit_report, read_csv, write_csv, CheckRecord, CriterionRecord, NamedFit, ReportInput};
use ndgs_core::harness::{fit_decay_window, fit_rate, run_sweep, Component, StartMode, SweepConfig};
use ndgs_core::{Complex64 as C, GridSpec, SpectralContext, SpinorField, SweepRecord};
use proptest::prelude::*;

fn field() -> SpinorField {
    let g = GridSpec::new(8, 3.0, 1.5, 12.0, 2.7, 0.5).unwrap();
    random_field(&SpectralContext::new(g), 17)
}

fn bytes_of(u: &SpinorField) -> Vec<u8> {
    let mut out = Vec::new();
    write_field(&mut out, u).unwrap();
    out
}

#[test]
fn file_layout_is_little_endian_component_major() {
    let u = field();
    let g = *u.grid();
    let b = bytes_of(&u);
    assert_eq!(&b[..4], b"NDGS");
    assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 8);
    let f = |k: usize| f64::from_le_bytes(b[12 + 8 * k..20 + 8 * k].try_into().unwrap());
    assert_eq!([f(0), f(1), f(2), f(3), f(4)], [3.0, 1.5, 12.0, 2.7, 0.5]);
    assert_eq!(b.len(), HEADER_BYTES + 16 * 4 * g.nodes());
    // component 2 at node (1, 0, 0)
    let at = HEADER_BYTES + 16 * (2 * g.nodes() + g.index(1, 0, 0));
    let re = f64::from_le_bytes(b[at..at + 8].try_into().unwrap());
    let im = f64::from_le_bytes(b[at + 8..at + 16].try_into().unwrap());
    assert_eq!(C::new(re, im), u.at(g.index(1, 0, 0))[2]);
}

#[test]
fn corrupt_files_are_rejected() {
    let mut b = bytes_of(&field());
    assert!(matches!(read_field(&b[..b.len() - 1]), Err(FieldIoError::TruncatedPayload(_))));
    assert!(matches!(read_field(&b[..HEADER_BYTES]), Err(FieldIoError::TruncatedPayload(_))));
    assert!(matches!(read_field(&b[..10]), Err(FieldIoError::TruncatedPayload(_))));
    b[4] = 2;
    assert!(matches!(read_field(b.as_slice()), Err(FieldIoError::VersionMismatch { found: 2, expected: 1 })));
    b[0] = b'X';
    assert!(matches!(read_field(b.as_slice()), Err(FieldIoError::BadMagic(_))));
}

#[test]
fn header_is_readable_without_payload() {
    let u = field();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.ndgs");
    std::fs::write(&path, &bytes_of(&u)[..HEADER_BYTES]).unwrap();
    assert_eq!(load_header(&path).unwrap(), *u.grid());
    assert_eq!(read_header(bytes_of(&u).as_slice()).unwrap(), *u.grid());
}

fn sample_records() -> Vec<SweepRecord> {
    [8.0, 16.0, 32.0, 64.0]
        .iter()
        .map(|&c: &f64| {
            let mut v = [0.0; 17];
            v[0] = c;
            for (k, x) in v.iter_mut().enumerate().skip(1) {
                *x = (k as f64 + 0.1) / c.powf(0.5 + 0.1 * k as f64);
            }
            SweepRecord::from_values(v)
        })
        .collect()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/ndgs-report-1.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn report_json(input: ReportInput) -> serde_json::Value {
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_report(&sample_records(), input, dir.path()).unwrap();
    let back = read_csv(std::fs::File::open(&paths.csv).unwrap()).unwrap();
    assert_eq!(back, sample_records());
    serde_json::from_str(&std::fs::read_to_string(&paths.json).unwrap()).unwrap()
}

#[test]
fn reports_validate_against_the_shipped_schema() {
    let v = schema();
    let dir = tempfile::tempdir().unwrap();
    let field_path = dir.path().join("u.ndgs");
    save_field(&field(), &field_path).unwrap();
    let recs = sample_records();
    let full = ReportInput {
        fits: vec![NamedFit {
            name: "g".into(),
            fit: fit_rate(&recs.iter().map(|r| (r.c, r.g_norm_s0)).collect::<Vec<_>>()).unwrap(),
        }],
        tolerances: BTreeMap::from([("outer_gradient".into(), 1e-7)]),
        criteria: vec![CriterionRecord {
            id: 5,
            name: "sweep".into(),
            passed: false,
            checks: vec![
                CheckRecord { name: "slope".into(), value: -1.0, condition: "∈ [-1.3, -0.7]".into(), passed: true },
                CheckRecord { name: "step".into(), value: f64::NAN, condition: "succeeds".into(), passed: false },
            ],
        }],
        settings: serde_json::json!({"n": 48, "c": [8, 16, 32, 64]}),
        field_files: vec![field_path],
    };
    let doc = report_json(full);
    assert_eq!(doc["status"], "fail");
    assert!(v.is_valid(&doc), "{:?}", v.iter_errors(&doc).map(|e| e.to_string()).collect::<Vec<_>>());

    let empty = report_json(ReportInput { settings: serde_json::json!({}), ..Default::default() });
    assert_eq!(empty["status"], "incomplete");
    assert_eq!(empty["fits"], serde_json::json!([]));
    assert!(v.is_valid(&empty));

    let mut bad = empty.clone();
    bad["status"] = "ok".into();
    assert!(!v.is_valid(&bad));
    let mut bad = empty;
    bad["schema"] = "ndgs-report/2".into();
    assert!(!v.is_valid(&bad));
}

#[test]
fn decay_of_pure_exponential_is_window_independent() {
    let g = grid(48, 10.0, 1.0);
    let u = SpinorField::from_fn(g, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        [C::new((-2.0 * r).exp(), 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]
    });
    for (lo, hi) in [(0.2, 0.5), (0.2, 0.65), (0.2, 0.8)] {
        let fit = fit_decay_window(&u, Component::Upper, lo, hi).unwrap();
        assert!((fit.delta - 2.0).abs() <= 0.04, "{lo}-{hi}: {}", fit.delta);
    }
}

#[test]
fn warm_and_cold_sweeps_agree() {
    let cfg = SweepConfig {
        n: 32,
        c_list: vec![8.0, 16.0, 32.0],
        ..SweepConfig::default()
    };
    let warm = run_sweep(&cfg).unwrap();
    let cold = run_sweep(&SweepConfig { start: StartMode::Cold, ..cfg.clone() }).unwrap();
    assert!(warm.failures.is_empty() && cold.failures.is_empty());
    for ((a, b), rec) in warm.states.iter().zip(&cold.states).zip(&warm.records) {
        let ctx = SpectralContext::new(*a.grid());
        let mut bb = b.clone();
        bb.align_phase(a);
        assert!(ctx.sobolev_norm(&bb.sub(a), 0.5) <= 1e-4, "c = {}", rec.c);
    }

    // The computed tail sits between κ and the literal fit of a pure A e^{−κr}/r tail, and closes on the latter
    // as the window moves outward, where the nonlinear core no longer contributes.
    let kappa = warm.model.kappa;
    let last = warm.states.last().unwrap();
    let g = *last.grid();
    let yukawa = SpinorField::from_fn(g, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().max(1e-3);
        [C::new((-kappa * r).exp() / r, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]
    });
    let gaps: Vec<f64> = [(0.2, 0.6), (0.2, 0.8), (0.3, 0.8), (0.4, 0.8)]
        .iter()
        .map(|&(lo, hi)| {
            let d = fit_decay_window(last, Component::Upper, lo, hi).unwrap().delta;
            let y = fit_decay_window(&yukawa, Component::Upper, lo, hi).unwrap().delta;
            assert!(kappa < d && d < y, "{lo}-{hi}: {d} vs {y}, κ = {kappa}");
            y - d
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(rows in prop::collection::vec(prop::array::uniform17(finite()), 1..5)) {
        let records: Vec<SweepRecord> = rows.into_iter().map(SweepRecord::from_values).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &records).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        for (a, b) in records.iter().zip(&back) {
            prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn power_laws_are_fitted_exactly(a in 1e-3f64..1e3, k in -4.0f64..2.0, c0 in 1.0f64..10.0, n in 3usize..7) {
        let pairs: Vec<(f64, f64)> = (0..n).map(|i| {
            let c = c0 * 2f64.powi(i as i32);
            (c, a * c.powf(k))
        }).collect();
        let fit = fit_rate(&pairs).unwrap();
        prop_assert!((fit.slope - k).abs() <= 1e-10);
        prop_assert!((fit.intercept - a.ln()).abs() <= 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-10 || k == 0.0);
        prop_assert_eq!(fit_rate(&pairs).unwrap(), fit);
    }
}
