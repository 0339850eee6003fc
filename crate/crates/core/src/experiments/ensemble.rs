//! Seeded families of square-tiled surfaces with a few closed leaves on
//! each, and the rectangular tori used as an exact reference.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{FlatCurve, Segment};
use crate::error::{Error, Result};
use crate::math::{barycentric, PlanarVector};
use crate::surface::builders::{flat_torus, square_tiled};
use crate::surface::FlatSurface;

#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub surface: FlatSurface,
    pub curves: Vec<(String, FlatCurve)>,
}

/// Length of the orbit of square 0 under `step`.
fn orbit(step: impl Fn(usize) -> usize) -> usize {
    let mut j = step(0);
    let mut n = 1;
    while j != 0 {
        j = step(j);
        n += 1;
    }
    n
}

/// The surface with its horizontal, vertical and diagonal closed leaves
/// through the point `(0.3, 0.6)` of square 0.
pub fn square_tiled_instance(horiz: &[usize], vert: &[usize]) -> Result<Instance> {
    let s = square_tiled(horiz, vert)?;
    // above the diagonal of square 0
    let start = barycentric(&s.corners(1), PlanarVector::new(0.3, 0.6));
    let leaf = |v: PlanarVector| FlatCurve::trajectory(Segment { tri: 1, start, vector: v }, 1.0);
    let nh = orbit(|j| horiz[j]) as f64;
    let nv = orbit(|j| vert[j]) as f64;
    let nd = orbit(|j| horiz[vert[j]]) as f64;
    Ok(Instance {
        label: format!("st{}:{horiz:?}/{vert:?}", horiz.len()),
        surface: s,
        curves: alloc::vec![
            ("horizontal".into(), leaf(PlanarVector::new(nh, 0.0))),
            ("vertical".into(), leaf(PlanarVector::new(0.0, nv))),
            ("diagonal".into(), leaf(PlanarVector::new(nd, nd))),
        ],
    })
}

/// `size` surfaces: the unit torus, then connected square-tiled surfaces
/// with `2..=max_squares` squares drawn from `seed`.
pub fn ensemble(seed: u64, size: usize, max_squares: usize) -> Result<Vec<Instance>> {
    if max_squares < 2 && size > 1 {
        return Err(Error::Invalid(format!("need at least 2 squares for a random surface, got {max_squares}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(size);
    if size > 0 {
        out.push(square_tiled_instance(&[0], &[0])?);
    }
    while out.len() < size {
        let n = rng.random_range(2..=max_squares);
        let mut h: Vec<usize> = (0..n).collect();
        let mut v: Vec<usize> = (0..n).collect();
        h.shuffle(&mut rng);
        v.shuffle(&mut rng);
        match square_tiled_instance(&h, &v) {
            Ok(inst) => out.push(inst),
            Err(Error::Disconnected(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The `a × 1/a` torus with its closed curves of slopes (1,0), (0,1) and (1,1).
pub fn torus_instance(a: f64) -> Result<(Instance, Vec<f64>)> {
    let s = flat_torus(a, 1.0 / a)?;
    let start = barycentric(&s.corners(0), PlanarVector::new(0.6 * a, 0.3 / a));
    let leaf = |v: PlanarVector| FlatCurve::trajectory(Segment { tri: 0, start, vector: v }, 1.0);
    let vs = [PlanarVector::new(a, 0.0), PlanarVector::new(0.0, 1.0 / a), PlanarVector::new(a, 1.0 / a)];
    let exact = vs.iter().map(|v| v.norm_sq()).collect();
    let names = ["(1,0)", "(0,1)", "(1,1)"];
    Ok((
        Instance {
            label: format!("torus a={a}"),
            surface: s,
            curves: names.iter().zip(vs).map(|(n, v)| (String::from(*n), leaf(v))).collect(),
        },
        exact,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{flat_length, is_geodesic};

    #[test]
    fn ensemble_is_deterministic_and_closed() {
        let a = ensemble(7, 5, 12).unwrap();
        let b = ensemble(7, 5, 12).unwrap();
        assert_eq!(a.len(), 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            for (_, c) in &x.curves {
                let chain = c.path(&x.surface).unwrap();
                assert!(is_geodesic(&x.surface, &chain).unwrap().geodesic);
                assert!(flat_length(&x.surface, c).unwrap() >= 1.0);
            }
        }
        assert_eq!(a[0].surface.num_triangles(), 2);
    }
}
