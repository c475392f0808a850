//! Zeros of spinor components and their orders.
//!
//! Candidates are local minima of `|π_s ψ|` on the grid. Each is refined by
//! a real Newton iteration on the component in a frame fixed at the
//! candidate, and its order is the absolute winding number of the
//! component on a small circle around the refined point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Chart, ChartedSphere, SphereGrid};
use crate::spinor::{Frame, Slot, TwistedSpinorField};

type C = Complex64;

/// Below this maximum magnitude a component counts as identically zero.
pub const IDENTICALLY_ZERO: f64 = 1e-12;
/// Refined points must be this small relative to the component maximum.
pub const ZERO_THRESHOLD: f64 = 1e-5;
pub const NEWTON_TOL: f64 = 1e-8;
pub const WINDING_SAMPLES: usize = 256;
const NEWTON_MAX_ITER: usize = 100;
const DEDUP_CHORDAL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlotPrediction {
    pub total: i64,
    /// A negative total forces the component to vanish identically.
    pub forced_zero: bool,
}

/// Predicted total zero orders of the slots `1+, 0+, 1−, 0−`.
pub fn predict_totals(g_m: i64, g_n: i64, deg: i64) -> [SlotPrediction; 4] {
    let n = g_m - 1 - deg * (2 * g_n - 2);
    let m = g_m - 1 + deg * (2 * g_n - 2);
    [n, m, m, n].map(|total| SlotPrediction {
        total,
        forced_zero: total < 0,
    })
}

/// Winding number of `f` around a circle.
///
/// A closed sum of principal-branch phase steps is always a multiple of
/// `2π`, so the certificate also requires every step to stay below `π/2`;
/// larger steps mean the contour is undersampled or passes near a zero.
pub fn winding_number<F>(f: F, center: C, radius: f64, samples: usize) -> Result<i32>
where
    F: Fn(C) -> Result<C>,
{
    let mut prev: Option<C> = None;
    let mut first = C::new(0.0, 0.0);
    let mut total = 0.0;
    let mut coarse = false;
    for k in 0..=samples {
        let v = if k == samples {
            first
        } else {
            let p = center + C::from_polar(radius, 2.0 * PI * k as f64 / samples as f64);
            let v = f(p)?;
            if !(v.norm() > 1e-10) {
                return Err(Error::ZeroOnContour);
            }
            if k == 0 {
                first = v;
            }
            v
        };
        if let Some(p) = prev {
            let step = (v / p).arg();
            coarse |= step.abs() > 0.5 * PI;
            total += step;
        }
        prev = Some(v);
    }
    let w = total / (2.0 * PI);
    let r = w.round();
    if coarse || (w - r).abs() > 0.1 {
        return Err(Error::NonIntegralWinding(w));
    }
    Ok(r as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroRecord {
    pub chart: usize,
    pub z: [f64; 2],
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCensusReport {
    pub slot: Slot,
    pub zeros: Vec<ZeroRecord>,
    pub total: u32,
    pub predicted: Option<i64>,
    pub identically_zero: bool,
}

/// Component value in a fixed frame.
fn component(field: &TwistedSpinorField, slot: Slot, frame: Frame, z: C) -> Result<C> {
    let e = &field.components(frame)[slot.index()];
    if e.is_zero() {
        return Ok(C::new(0.0, 0.0));
    }
    e.value(z)
}

/// Newton iteration for `g(z) = 0` using both Wirtinger derivatives.
fn refine(field: &TwistedSpinorField, slot: Slot, frame: Frame, z0: C) -> Option<C> {
    let e = &field.components(frame)[slot.index()];
    let mut z = z0;
    for _ in 0..NEWTON_MAX_ITER {
        let j = e.jet(z).ok()?;
        if j.value.norm() == 0.0 {
            return Some(z);
        }
        let gx = j.d_x();
        let gy = j.d_y();
        let det = gx.re * gy.im - gy.re * gx.im;
        if det.abs() < 1e-300 || !det.is_finite() {
            return Some(z);
        }
        let dx = -(gy.im * j.value.re - gy.re * j.value.im) / det;
        let dy = -(-gx.im * j.value.re + gx.re * j.value.im) / det;
        let step = C::new(dx, dy);
        z += step;
        if !z.is_finite() || z.norm() > 2.5 {
            return None;
        }
        if step.norm() < NEWTON_TOL * z.norm().max(1.0) {
            return Some(z);
        }
    }
    Some(z)
}

/// Point on the unit sphere for chart coordinates.
fn sphere_point(chart: Chart, z: C) -> [f64; 3] {
    let z = match chart {
        Chart::North => z,
        Chart::South if z.norm() == 0.0 => return [0.0, 0.0, -1.0],
        Chart::South => z.inv(),
    };
    let s = z.norm_sqr();
    [2.0 * z.re / (1.0 + s), 2.0 * z.im / (1.0 + s), (1.0 - s) / (1.0 + s)]
}

fn chordal(a: (Chart, C), b: (Chart, C)) -> f64 {
    let p = sphere_point(a.0, a.1);
    let q = sphere_point(b.0, b.1);
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

/// Representative with `|z| ≤ 1`; the north chart wins on the unit circle.
fn canonical(chart: Chart, z: C) -> (Chart, C) {
    if z.norm() > 1.0 {
        (chart.other(), z.inv())
    } else if z.norm() == 1.0 && chart == Chart::South {
        (Chart::North, z.inv())
    } else {
        (chart, z)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn census(
    field: &TwistedSpinorField,
    slot: Slot,
    target: &ChartedSphere,
    grid: &SphereGrid,
    refine_radius: f64,
) -> Result<ZeroCensusReport> {
    let predicted = field.map().degree().map(|d| predict_totals(0, 0, d as i64)[slot.index()].total);
    let empty = |identically_zero| ZeroCensusReport {
        slot,
        zeros: Vec::new(),
        total: 0,
        predicted,
        identically_zero,
    };
    if field.slot_is_zero(slot) {
        return Ok(empty(true));
    }
    let mags: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|n| {
            field
                .slot_norms(target, n.chart, n.z)
                .map(|v| v[slot.index()])
                .unwrap_or(f64::NAN)
        })
        .collect();
    let max = mags.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    if max <= IDENTICALLY_ZERO {
        return Ok(empty(true));
    }

    let (nr, na) = (grid.n_radial, grid.n_angular);
    let mut candidates = Vec::new();
    for node in grid.nodes() {
        let v = mags[node.index];
        if !v.is_finite() {
            continue;
        }
        let (i, j) = grid.polar_index(node);
        let mut neighbours = vec![
            grid.node_at(node.chart, i, (j + 1) % na).index,
            grid.node_at(node.chart, i, (j + na - 1) % na).index,
        ];
        if i + 1 < nr {
            neighbours.push(grid.node_at(node.chart, i + 1, j).index);
        }
        if i > 0 {
            neighbours.push(grid.node_at(node.chart, i - 1, j).index);
        } else {
            neighbours.push(grid.node_at(node.chart, 0, (j + na / 2) % na).index);
        }
        if neighbours.iter().all(|&k| !(mags[k] < v)) {
            candidates.push((node.chart, node.z));
        }
    }

    let mut found: Vec<(Chart, C)> = Vec::new();
    for (chart, z0) in candidates {
        let frame = field.frame_at(chart, z0);
        let Some(z) = refine(field, slot, frame, z0) else {
            continue;
        };
        let (cc, cz) = canonical(chart, z);
        let Ok(norms) = field.slot_norms(target, cc, cz) else {
            continue;
        };
        if norms[slot.index()] > ZERO_THRESHOLD * max {
            continue;
        }
        if found.iter().all(|&f| chordal(f, (cc, cz)) > DEDUP_CHORDAL) {
            found.push((cc, cz));
        }
    }
    found.sort_by(|a, b| {
        (a.0, a.1.re, a.1.im)
            .partial_cmp(&(b.0, b.1.re, b.1.im))
            .expect("finite coordinates")
    });
    for (k, a) in found.iter().enumerate() {
        for b in &found[k + 1..] {
            if chordal(*a, *b) < 2.0 * refine_radius {
                return Err(Error::UnresolvedCluster(a.1, b.1));
            }
        }
    }

    let mut zeros = Vec::new();
    for (chart, z) in found {
        let frame = field.frame_at(chart, z);
        let w = winding_number(
            |p| component(field, slot, frame, p),
            z,
            refine_radius,
            WINDING_SAMPLES,
        )?;
        if w != 0 {
            zeros.push(ZeroRecord {
                chart: chart.index(),
                z: [z.re, z.im],
                order: w.unsigned_abs(),
            });
        }
    }
    let total = zeros.iter().map(|z| z.order).sum();
    Ok(ZeroCensusReport {
        slot,
        zeros,
        total,
        predicted,
        identically_zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::build_pair;
    use crate::map::{Orientation, SphereMap};
    use crate::rational::RationalFunction;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn predictions() {
        let p = predict_totals(0, 0, 2);
        assert_eq!(p.map(|s| s.total), [3, -5, -5, 3]);
        assert_eq!(p.map(|s| s.forced_zero), [false, true, true, false]);
        assert!(predict_totals(0, 0, 0).iter().all(|s| s.total == -1 && s.forced_zero));
        for d in -3..=3 {
            assert!(predict_totals(1, 1, d).iter().all(|s| s.total == 0));
        }
    }

    #[test]
    fn winding_examples() {
        let o = c(0.0, 0.0);
        assert_eq!(winding_number(|z| Ok(z), o, 1.0, 256).unwrap(), 1);
        assert_eq!(winding_number(|z| Ok(z * z * z), o, 1.0, 256).unwrap(), 3);
        let dressed = |z: C| Ok((z - 0.3) * (z + 0.3) * (z.norm_sqr()).exp());
        assert_eq!(winding_number(dressed, o, 1.0, 256).unwrap(), 2);
        assert_eq!(winding_number(|z| Ok(z.conj()), o, 1.0, 256).unwrap(), -1);
        assert!(matches!(winding_number(|z| Ok(z - 1.0), o, 1.0, 256), Err(Error::ZeroOnContour)));
        assert!(matches!(
            winding_number(|z| Ok(z.powi(40)), o, 1.0, 64),
            Err(Error::NonIntegralWinding(_))
        ));
    }

    proptest! {
        #[test]
        fn winding_stable_under_sampling_and_radius(
            re in -0.5f64..0.5, im in -0.5f64..0.5, scale in 0.8f64..1.2, k in 1i32..4,
        ) {
            let a = c(re, im);
            let f = |z: C| Ok((z - a).powi(k) * (z + 3.0));
            let base = winding_number(f, a, 0.1, 256).unwrap();
            prop_assert_eq!(base, k);
            prop_assert_eq!(winding_number(f, a, 0.1, 512).unwrap(), base);
            prop_assert_eq!(winding_number(f, a, 0.1 * scale, 256).unwrap(), base);
        }
    }

    #[test]
    fn census_of_power_maps() {
        let m = ChartedSphere::round();
        let grid = SphereGrid::new(&m, 24, 24).unwrap();
        for d in 1..=3 {
            let map = SphereMap::rational(RationalFunction::monomial(c(1.0, 0.0), d), Orientation::Holomorphic);
            let pair = build_pair(&m, &m, &map, &RationalFunction::zero(), &RationalFunction::constant(c(1.0, 0.0))).unwrap();
            let r = census(&pair.field, Slot::OnePlus, &m, &grid, 0.05).unwrap();
            assert_eq!(r.total as i32, 2 * d - 1, "{r:?}");
            assert_eq!(r.predicted, Some(2 * d as i64 - 1));
            for s in [Slot::ZeroPlus, Slot::OneMinus] {
                assert!(census(&pair.field, s, &m, &grid, 0.05).unwrap().identically_zero);
            }
        }
    }

    #[test]
    fn zeros_off_the_axes_and_in_the_overlap() {
        let m = ChartedSphere::round();
        let grid = SphereGrid::new(&m, 24, 24).unwrap();
        // u₂ with zeros at 0.4 + 0.2i and on the unit circle, φ = z²
        let a = c(0.4, 0.2);
        let b = C::from_polar(1.0, 0.7);
        let u2 = RationalFunction::polynomial(vec![a * b, -(a + b), c(1.0, 0.0)]);
        let map = SphereMap::rational(RationalFunction::monomial(c(1.0, 0.0), 2), Orientation::Holomorphic);
        let pair = build_pair(&m, &m, &map, &RationalFunction::zero(), &u2).unwrap();
        let r = census(&pair.field, Slot::OnePlus, &m, &grid, 0.05).unwrap();
        // zeros of u₂ R' = 2z u₂ plus the pole order mismatch at ∞
        assert_eq!(r.total, 3, "{r:?}");
        let on_circle: Vec<_> = r.zeros.iter().filter(|z| (C::new(z.z[0], z.z[1]).norm() - 1.0).abs() < 1e-6).collect();
        assert_eq!(on_circle.len(), 1);
        assert_eq!(on_circle[0].chart, 0);
    }

    #[test]
    fn census_report_json() {
        let r = ZeroCensusReport {
            slot: Slot::OnePlus,
            zeros: vec![ZeroRecord { chart: 0, z: [0.0, 0.0], order: 1 }],
            total: 1,
            predicted: Some(1),
            identically_zero: false,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"slot":"1+","zeros":[{"chart":0,"z":[0.0,0.0],"order":1}],"total":1,"predicted":1,"identically_zero":false}"#
        );
    }
}
