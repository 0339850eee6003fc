use proptest::prelude::*;
use teichscan_core::curves::{flat_length, hv_lengths, FlatCurve, Segment};
use teichscan_core::experiments::ensemble::ensemble;
use teichscan_core::flow::{flow_surface, flowed_length, make_scan, rotate_quarter};
use teichscan_core::math::barycentric;
use teichscan_core::surface::builders::{flat_torus, slit_tori, square_tiled};
use teichscan_core::surface::FlatSurface;
use teichscan_core::PlanarVector;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn close_surfaces(a: &FlatSurface, b: &FlatSurface, tol: f64) {
    assert_eq!(a.num_triangles(), b.num_triangles());
    assert_eq!(a.gluing_pairs(), b.gluing_pairs());
    for (x, y) in a.triangles().iter().zip(b.triangles()) {
        for (p, q) in x.iter().zip(y) {
            let scale = p.norm().max(q.norm());
            assert!((*p - *q).norm() <= tol * scale, "{p:?} vs {q:?}");
        }
    }
}

fn surfaces() -> Vec<FlatSurface> {
    let mut out = vec![
        flat_torus(1.0, 1.0).unwrap(),
        flat_torus(0.25, 4.0).unwrap(),
        slit_tori(0.1).unwrap().surface,
        square_tiled(&[1, 2, 0], &[0, 1, 2]).unwrap(),
    ];
    out.extend(ensemble(3, 3, 12).unwrap().into_iter().map(|i| i.surface));
    out
}

#[test]
fn identity_at_zero() {
    for s in surfaces() {
        assert_eq!(flow_surface(&s, 0.0).unwrap(), s);
    }
}

#[test]
fn quarter_turn_conjugates_the_flow() {
    for s in surfaces() {
        let a = rotate_quarter(&flow_surface(&s, 0.7).unwrap()).unwrap();
        let b = flow_surface(&rotate_quarter(&s).unwrap(), -0.7).unwrap();
        close_surfaces(&a, &b, 1e-12);
    }
}

#[test]
fn horizontal_curves_scale_by_e_t() {
    let s = flat_torus(1.0, 1.0).unwrap();
    let start = barycentric(&s.corners(0), PlanarVector::new(0.6, 0.3));
    let c = FlatCurve::trajectory(Segment { tri: 0, start, vector: PlanarVector::new(1.0, 0.0) }, 1.0);
    for t in make_scan(-3.0, 3.0, 0.25).unwrap() {
        let t = t.t();
        let st = flow_surface(&s, t).unwrap();
        let l = flat_length(&st, &c.flowed(t)).unwrap();
        assert!(rel(l, t.exp()) <= 1e-12, "t={t}: {l}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition(a in -4.0f64..4.0, b in -4.0f64..4.0, k in 0usize..7) {
        let s = &surfaces()[k];
        let ab = flow_surface(&flow_surface(s, a).unwrap(), b).unwrap();
        let direct = flow_surface(s, a + b).unwrap();
        close_surfaces(&ab, &direct, 1e-12);
    }

    #[test]
    fn area_is_invariant(t in -6.0f64..6.0, k in 0usize..7) {
        let s = &surfaces()[k];
        let st = flow_surface(s, t).unwrap();
        prop_assert!(rel(st.area(), s.area()) <= 1e-12);
        prop_assert!(st.validate().is_empty());
    }

    #[test]
    fn flowed_length_per_segment(h in -5.0f64..5.0, v in -5.0f64..5.0, t in -4.0f64..4.0) {
        prop_assume!(h.hypot(v) > 1e-3);
        let want = ((h * t.exp()).powi(2) + (v * (-t).exp()).powi(2)).sqrt();
        prop_assert!(rel(flowed_length(h, v, t), want) <= 1e-12);
    }

    #[test]
    fn flowed_curves_on_the_torus(p in -3i32..=3, q in -3i32..=3, t in -3.0f64..3.0) {
        prop_assume!((p, q) != (0, 0));
        let s = flat_torus(1.0, 1.0).unwrap();
        let start = barycentric(&s.corners(0), PlanarVector::new(0.6137, 0.2712));
        let c = FlatCurve::trajectory(Segment { tri: 0, start, vector: PlanarVector::new(p as f64, q as f64) }, 1.0);
        let st = flow_surface(&s, t).unwrap();
        let ct = c.flowed(t);
        let (h, v) = hv_lengths(&s, &c).unwrap();
        let (ht, vt) = hv_lengths(&st, &ct).unwrap();
        prop_assert!(rel(ht, h * t.exp()) <= 1e-12);
        prop_assert!(rel(vt, v * (-t).exp()) <= 1e-12 || (v == 0.0 && vt == 0.0));
        prop_assert!(rel(flat_length(&st, &ct).unwrap(), flowed_length(p as f64, q as f64, t)) <= 1e-12);
    }
}
