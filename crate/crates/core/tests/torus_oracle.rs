use teichscan_core::config::Config;
use teichscan_core::experiments::ensemble::torus_instance;
use teichscan_core::experiments::scan_with;
use teichscan_core::flow::make_scan;

/// On a flat torus the extremal length of a closed geodesic is ℓ²/area.
fn exact_ext(h: f64, v: f64, t: f64) -> f64 {
    (h * t.exp()).powi(2) + (v * (-t).exp()).powi(2)
}

#[test]
fn ext_estimate_within_factor_eight_of_exact() {
    let grid: Vec<f64> = make_scan(-1.0, 1.0, 0.1).unwrap().into_iter().map(|t| t.t()).collect();
    let cfg = Config::default();
    let mut worst: f64 = 1.0;
    for a in [1.0, 0.5, 0.25] {
        let (inst, _) = torus_instance(a).unwrap();
        let hv = [(a, 0.0), (0.0, 1.0 / a), (a, 1.0 / a)];
        for ((name, c), (h, v)) in inst.curves.iter().zip(hv) {
            let scan = scan_with(&inst.surface, c, &grid, &cfg).unwrap();
            for r in &scan.rows {
                assert!(r.is_clean(), "a={a} {name} t={}: {:?}", r.t, r.flags);
                let want = exact_ext(h, v, r.t) / inst.surface.area();
                let q = (r.ext / want).max(want / r.ext);
                assert!(q <= 8.0, "a={a} {name} t={}: estimate {} exact {want}", r.t, r.ext);
                worst = worst.max(q);
            }
        }
    }
    eprintln!("worst ratio {worst}");
}
