use teichscan::{csv, curve_json, report, surface_json, ExitCode};
use teichscan_core::config::Config;
use teichscan_core::curves::{FlatCurve, Segment};
use teichscan_core::estimators::Kind;
use teichscan_core::experiments::ensemble::ensemble;
use teichscan_core::experiments::{quasiconvexity, scan_with, ScanResult};
use teichscan_core::flow::flow_surface;
use teichscan_core::math::barycentric;
use teichscan_core::surface::builders::{flat_torus, slit_tori};
use teichscan_core::surface::FlatSurface;
use teichscan_core::PlanarVector;

fn surfaces() -> Vec<FlatSurface> {
    let mut out = vec![flat_torus(1.0, 1.0).unwrap(), slit_tori(0.1).unwrap().surface];
    out.extend(ensemble(5, 3, 12).unwrap().into_iter().map(|i| i.surface));
    let flowed: Vec<FlatSurface> = out.iter().map(|s| flow_surface(s, 0.3712).unwrap()).collect();
    out.extend(flowed);
    out
}

#[test]
fn surface_round_trip_is_lossless() {
    for s in surfaces() {
        let text = surface_json::to_json(&s);
        assert!(text.contains(surface_json::SURFACE_SCHEMA));
        let back = surface_json::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(surface_json::to_json(&back), text);
    }
}

#[test]
fn curve_round_trip_is_lossless() {
    let s = flat_torus(1.0, 1.0).unwrap();
    let start = barycentric(&s.corners(0), PlanarVector::new(0.6, 0.1 / 3.0));
    let seg = Segment { tri: 0, start, vector: PlanarVector::new(1.0, 1.0 / 7.0) };
    let doc = curve_json::CurveDoc::chain(vec![seg], 0.3);
    let back = curve_json::from_json(&curve_json::to_json(&doc)).unwrap();
    assert_eq!(back, doc);
    let cyl = curve_json::CurveDoc::cylinder(2, 0.25, 1.0);
    assert_eq!(curve_json::from_json(&curve_json::to_json(&cyl)).unwrap(), cyl);
    let c = FlatCurve::trajectory(seg, 0.3);
    assert_eq!(curve_json::CurveDoc::of(&c).unwrap(), doc);
}

fn sample_scan() -> ScanResult {
    let st = slit_tori(0.1).unwrap();
    let c = FlatCurve::trajectory(st.alpha, 1.0);
    let grid: Vec<f64> = (0..8).map(|i| -1.0 + 0.3 * i as f64).collect();
    scan_with(&st.surface, &c, &grid, &Config::default()).unwrap()
}

#[test]
fn scan_json_round_trip_is_lossless() {
    let scan = sample_scan();
    let text = report::to_json(report::SCAN_SCHEMA, &scan);
    let back: ScanResult = report::from_json(report::SCAN_SCHEMA, &text).unwrap();
    assert_eq!(back, scan);
}

#[test]
fn nan_values_survive_json() {
    let mut scan = sample_scan();
    scan.rows[1].ext = f64::NAN;
    scan.rows[1].flags.push(teichscan_core::experiments::RowFlag::Budget);
    let text = report::to_json(report::SCAN_SCHEMA, &scan);
    let back: ScanResult = report::from_json(report::SCAN_SCHEMA, &text).unwrap();
    assert!(back.rows[1].ext.is_nan());
    assert_eq!(report::to_json(report::SCAN_SCHEMA, &back), text);
}

#[test]
fn csv_round_trip_keeps_values() {
    let scan = sample_scan();
    let text = csv::to_csv(&scan, Kind::Ext);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: teichscan-scan-csv/1"));
    assert_eq!(lines.next(), Some(csv::HEADER));
    let rows = csv::from_csv(&text).unwrap();
    assert_eq!(rows.len(), scan.rows.len());
    for (a, b) in rows.iter().zip(&scan.rows) {
        assert_eq!(
            (a.t, a.flat_length, a.h, a.v, a.ext, a.hyp, a.ext_lower, a.hyp_lower),
            (b.t, b.flat_length, b.h, b.v, b.ext, b.hyp, b.ext_lower, b.hyp_lower)
        );
        let class = b.class_ext.as_ref().unwrap();
        assert_eq!(a.case, Some(class.case.number(Kind::Ext)));
        assert_eq!(a.dominance, class.dominance);
    }
    let back = csv::scan_from_csv(&text, 5.0).unwrap();
    assert_eq!(quasiconvexity(&back).unwrap(), quasiconvexity(&scan).unwrap());
}

#[test]
fn unknown_versions_are_rejected() {
    let s = flat_torus(1.0, 1.0).unwrap();
    let text = surface_json::to_json(&s);
    for bad in ["teichscan-surface/2", "teichscan-curve/1", "surface/1"] {
        let e = surface_json::from_json(&text.replace(surface_json::SURFACE_SCHEMA, bad)).unwrap_err();
        assert_eq!(e.code, ExitCode::Config);
    }
    let no_schema = text.replace("\"schema\": \"teichscan-surface/1\",", "");
    assert!(surface_json::from_json(&no_schema).is_err());

    let doc = curve_json::CurveDoc::cylinder(0, 0.5, 1.0);
    let ct = curve_json::to_json(&doc);
    assert!(curve_json::from_json(&ct.replace(curve_json::CURVE_SCHEMA, "teichscan-curve/9")).is_err());

    let scan = sample_scan();
    let st = report::to_json(report::SCAN_SCHEMA, &scan);
    assert!(report::from_json::<ScanResult>(report::SCAN_SCHEMA, &st.replace("teichscan-scan/1", "teichscan-scan/0")).is_err());

    let cv = csv::to_csv(&scan, Kind::Hyp);
    assert!(csv::from_csv(&cv.replace("teichscan-scan-csv/1", "teichscan-scan-csv/2")).is_err());
    assert!(csv::from_csv(cv.split_once('\n').unwrap().1).is_err());
}

#[test]
fn broken_surfaces_are_rejected_on_load() {
    let s = flat_torus(1.0, 1.0).unwrap();
    let mut doc = surface_json::SurfaceDoc::of(&s);
    doc.gluings.pop();
    let text = serde_json::to_string(&doc).unwrap();
    assert!(surface_json::from_json(&text).is_err());
}
