//! Spinor frames, Clifford multiplication and twisted spinor fields along a map.
//!
//! On a chart with metric `λ|dz|²` the orthonormal frame is
//! `e₁ = λ^{-1/2}∂_x`, `e₂ = λ^{-1/2}∂_y` and the spinor frame is the pair
//! `(ψ⁺, ψ⁻)` with `ψ⁻ = e₁·ψ⁺`. A section of `ΣM ⊗ φ⁻¹TN^ℂ` has four
//! components, one per [`Slot`], against `ψ^± ⊗ ∂_w` and `ψ^± ⊗ ∂_w̄`.
//!
//! Across charts `z̃ = 1/z` the frame `(e₁, e₂)` rotates; the spin lift is
//! fixed as `ψ⁺ = (iz/|z|) ψ̃⁺`, `ψ⁻ = (−i z̄/|z|) ψ̃⁻` (north in terms of
//! south). The target frame changes by `∂_w = −w̃² ∂_w̃`.

use std::fmt;
use std::io::Write;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Chart, ChartedSphere, SphereGrid};
use crate::jet::ComplexJet2;
use crate::map::SphereMap;
use crate::rational::RationalFunction;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Chirality and target type of a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    #[serde(rename = "1+")]
    OnePlus,
    #[serde(rename = "0+")]
    ZeroPlus,
    #[serde(rename = "1-")]
    OneMinus,
    #[serde(rename = "0-")]
    ZeroMinus,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::OnePlus, Slot::ZeroPlus, Slot::OneMinus, Slot::ZeroMinus];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_plus(self) -> bool {
        matches!(self, Slot::OnePlus | Slot::ZeroPlus)
    }

    /// Type one pairs with `∂_w`, type zero with `∂_w̄`.
    pub fn is_type_one(self) -> bool {
        matches!(self, Slot::OnePlus | Slot::OneMinus)
    }

    /// Slot receiving the Dirac image: chirality flips, type is kept.
    pub fn dirac_image(self) -> Slot {
        match self {
            Slot::OnePlus => Slot::OneMinus,
            Slot::OneMinus => Slot::OnePlus,
            Slot::ZeroPlus => Slot::ZeroMinus,
            Slot::ZeroMinus => Slot::ZeroPlus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Slot::OnePlus => "1+",
            Slot::ZeroPlus => "0+",
            Slot::OneMinus => "1-",
            Slot::ZeroMinus => "0-",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Slot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1+" => Ok(Slot::OnePlus),
            "0+" => Ok(Slot::ZeroPlus),
            "1-" | "1−" => Ok(Slot::OneMinus),
            "0-" | "0−" => Ok(Slot::ZeroMinus),
            _ => Err(Error::Config(format!("unknown slot {s:?}"))),
        }
    }
}

/// `plus·ψ⁺ + minus·ψ⁻` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SpinorValue {
    pub plus: C,
    pub minus: C,
}

impl SpinorValue {
    pub fn new(plus: C, minus: C) -> Self {
        Self { plus, minus }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }
}

impl Add for SpinorValue {
    type Output = SpinorValue;
    fn add(self, o: SpinorValue) -> SpinorValue {
        SpinorValue::new(self.plus + o.plus, self.minus + o.minus)
    }
}

impl Mul<C> for SpinorValue {
    type Output = SpinorValue;
    fn mul(self, c: C) -> SpinorValue {
        SpinorValue::new(self.plus * c, self.minus * c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TangentDirection {
    E1,
    E2,
    Dz,
    Dzbar,
}

/// Clifford action on the frame span.
#[derive(Clone, Copy, Debug, Default)]
pub struct CliffordTable;

impl CliffordTable {
    pub fn e1(s: SpinorValue) -> SpinorValue {
        SpinorValue::new(-s.minus, s.plus)
    }

    pub fn e2(s: SpinorValue) -> SpinorValue {
        SpinorValue::new(I * s.minus, I * s.plus)
    }

    /// `∂_z = ½λ^{1/2}(e₁ − i e₂)`, `∂_z̄ = ½λ^{1/2}(e₁ + i e₂)`.
    pub fn apply(x: TangentDirection, s: SpinorValue, lambda: f64) -> SpinorValue {
        let half = 0.5 * lambda.sqrt();
        match x {
            TangentDirection::E1 => Self::e1(s),
            TangentDirection::E2 => Self::e2(s),
            TangentDirection::Dz => (Self::e1(s) + Self::e2(s) * (-I)) * C::from(half),
            TangentDirection::Dzbar => (Self::e1(s) + Self::e2(s) * I) * C::from(half),
        }
    }

    /// Hermitian product in the orthonormal frame, linear in the first slot.
    pub fn inner(a: SpinorValue, b: SpinorValue) -> C {
        a.plus * b.plus.conj() + a.minus * b.minus.conj()
    }
}

pub fn clifford_apply(x: TangentDirection, s: SpinorValue, lambda: f64) -> SpinorValue {
    CliffordTable::apply(x, s, lambda)
}

/// Domain chart together with the target chart used for `∂_w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    pub chart: Chart,
    pub target: Chart,
}

impl Frame {
    pub const ALL: [Frame; 4] = [
        Frame::new(Chart::North, Chart::North),
        Frame::new(Chart::North, Chart::South),
        Frame::new(Chart::South, Chart::North),
        Frame::new(Chart::South, Chart::South),
    ];

    pub const fn new(chart: Chart, target: Chart) -> Self {
        Self { chart, target }
    }

    fn index(self) -> usize {
        2 * self.chart.index() + self.target.index()
    }
}

/// Phases applied to plus and minus components when the domain chart
/// changes, as functions of the new chart variable `ζ`.
fn domain_phases(to_chart: Chart, zeta: C) -> (C, C) {
    let r = zeta.norm();
    match to_chart {
        Chart::South => (I * zeta.conj() / r, -I * zeta / r),
        Chart::North => (-I * zeta.conj() / r, I * zeta / r),
    }
}

fn domain_phase_exprs(to_chart: Chart) -> (Expr, Expr) {
    let inv_abs = Expr::abs_sq_var().powf(-0.5);
    let (p, m) = match to_chart {
        Chart::South => (I, -I),
        Chart::North => (-I, I),
    };
    (
        Expr::var().conj() * inv_abs.clone() * p,
        Expr::var() * inv_abs * m,
    )
}

fn inversion() -> Expr {
    Expr::rational(RationalFunction::monomial(C::new(1.0, 0.0), -1))
}

/// Components in the other domain chart, same target chart.
fn change_domain(comps: &[Expr; 4], from_chart: Chart) -> [Expr; 4] {
    let (p, m) = domain_phase_exprs(from_chart.other());
    let inv = inversion();
    std::array::from_fn(|i| {
        let c = &comps[i];
        if c.is_zero() {
            return Expr::zero();
        }
        let phase = if Slot::ALL[i].is_plus() { &p } else { &m };
        c.clone().compose(inv.clone()) * phase.clone()
    })
}

/// Components against the other target chart, same domain chart.
fn change_target(comps: &[Expr; 4], map: &SphereMap, chart: Chart, to_target: Chart) -> [Expr; 4] {
    let w_new = map.local(chart, to_target).clone();
    let one = w_new.clone() * w_new.clone() * C::from(-1.0);
    let zero = w_new.clone().conj() * w_new.conj() * C::from(-1.0);
    std::array::from_fn(|i| {
        let c = &comps[i];
        if c.is_zero() {
            return Expr::zero();
        }
        let f = if Slot::ALL[i].is_type_one() { &one } else { &zero };
        c.clone() * f.clone()
    })
}

/// Numeric component change at a point: from `from` at `z` to the frame with
/// the other domain chart and the same target chart, at `1/z`.
pub fn transition_values(values: [C; 4], z: C, from_chart: Chart) -> Result<[C; 4]> {
    let r = z.norm();
    if !(0.5..=2.0).contains(&r) {
        return Err(Error::OutsideOverlap(z));
    }
    let (p, m) = domain_phases(from_chart.other(), z.inv());
    Ok(std::array::from_fn(|i| {
        values[i] * if Slot::ALL[i].is_plus() { p } else { m }
    }))
}

/// Numeric change of target chart given the new target coordinate `w_new`.
pub fn retarget_values(values: [C; 4], w_new: C) -> [C; 4] {
    std::array::from_fn(|i| {
        let f = if Slot::ALL[i].is_type_one() {
            -w_new * w_new
        } else {
            -(w_new * w_new).conj()
        };
        values[i] * f
    })
}

/// A section of `ΣM ⊗ φ⁻¹TN^ℂ` with closed-form components in each of the
/// four frames.
#[derive(Clone, Debug)]
pub struct TwistedSpinorField {
    map: SphereMap,
    reps: [[Expr; 4]; 4],
}

impl TwistedSpinorField {
    /// Components given in one frame; the other frames are derived through
    /// the transition rules.
    pub fn new(map: SphereMap, frame: Frame, comps: [Expr; 4]) -> Self {
        let other_t = frame.target.other();
        let other_c = frame.chart.other();
        let same_chart_other_target = change_target(&comps, &map, frame.chart, other_t);
        let other_chart_same_target = change_domain(&comps, frame.chart);
        let other_both = change_target(&other_chart_same_target, &map, other_c, other_t);
        let mut reps: [[Expr; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        reps[frame.index()] = comps;
        reps[Frame::new(frame.chart, other_t).index()] = same_chart_other_target;
        reps[Frame::new(other_c, frame.target).index()] = other_chart_same_target;
        reps[Frame::new(other_c, other_t).index()] = other_both;
        Self { map, reps }
    }

    /// Components supplied independently in every frame, in the order of
    /// [`Frame::ALL`].
    pub fn from_all_frames(map: SphereMap, reps: [[Expr; 4]; 4]) -> Self {
        Self { map, reps }
    }

    pub fn zero(map: SphereMap) -> Self {
        Self {
            map,
            reps: std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero())),
        }
    }

    pub fn map(&self) -> &SphereMap {
        &self.map
    }

    pub fn components(&self, frame: Frame) -> &[Expr; 4] {
        &self.reps[frame.index()]
    }

    /// Structurally zero in every frame.
    pub fn is_zero(&self) -> bool {
        self.reps.iter().all(|r| r.iter().all(Expr::is_zero))
    }

    pub fn slot_is_zero(&self, slot: Slot) -> bool {
        self.reps.iter().all(|r| r[slot.index()].is_zero())
    }

    pub fn project(&self, slot: Slot) -> Self {
        let reps = std::array::from_fn(|f| {
            std::array::from_fn(|i| {
                if i == slot.index() {
                    self.reps[f][i].clone()
                } else {
                    Expr::zero()
                }
            })
        });
        Self {
            map: self.map.clone(),
            reps,
        }
    }

    /// Frame-wise sum; both fields must live over the same map.
    pub fn add(&self, other: &Self) -> Self {
        let reps = std::array::from_fn(|f| {
            std::array::from_fn(|i| self.reps[f][i].clone() + other.reps[f][i].clone())
        });
        Self {
            map: self.map.clone(),
            reps,
        }
    }

    pub fn scale(&self, c: C) -> Self {
        let reps = std::array::from_fn(|f| std::array::from_fn(|i| self.reps[f][i].clone() * c));
        Self {
            map: self.map.clone(),
            reps,
        }
    }

    /// Adds `delta` to one slot in the north frame and rederives the rest.
    pub fn perturbed(&self, slot: Slot, delta: Expr) -> Self {
        let frame = Frame::new(Chart::North, Chart::North);
        let mut comps = self.reps[frame.index()].clone();
        comps[slot.index()] = comps[slot.index()].clone() + delta;
        Self::new(self.map.clone(), frame, comps)
    }

    pub fn frame_at(&self, chart: Chart, z: C) -> Frame {
        Frame::new(chart, self.map.choose_target(chart, z))
    }

    pub fn jets(&self, frame: Frame, z: C) -> Result<[ComplexJet2; 4]> {
        let reps = &self.reps[frame.index()];
        let mut out = [ComplexJet2::zero(); 4];
        for (o, e) in out.iter_mut().zip(reps) {
            if !e.is_zero() {
                *o = e.jet(z)?;
            }
        }
        Ok(out)
    }

    pub fn values(&self, frame: Frame, z: C) -> Result<[C; 4]> {
        let reps = &self.reps[frame.index()];
        let mut out = [C::new(0.0, 0.0); 4];
        for (o, e) in out.iter_mut().zip(reps) {
            if !e.is_zero() {
                *o = e.value(z)?;
            }
        }
        Ok(out)
    }

    /// Components in the natural frame at the point.
    pub fn values_at(&self, chart: Chart, z: C) -> Result<(Frame, [C; 4])> {
        let frame = self.frame_at(chart, z);
        Ok((frame, self.values(frame, z)?))
    }

    /// `ρ/2` at the image point in the given frame.
    fn target_scale(&self, target: &ChartedSphere, frame: Frame, z: C) -> Result<f64> {
        let w = self.map.local(frame.chart, frame.target).value(z)?;
        Ok(0.5 * target.lambda(frame.target, w)?)
    }

    /// Frame-independent norms `|π_s ψ|` of the four slots.
    pub fn slot_norms(&self, target: &ChartedSphere, chart: Chart, z: C) -> Result<[f64; 4]> {
        let (frame, v) = self.values_at(chart, z)?;
        let s = self.target_scale(target, frame, z)?.sqrt();
        Ok(v.map(|c| c.norm() * s))
    }

    pub fn norm_sqr(&self, target: &ChartedSphere, chart: Chart, z: C) -> Result<f64> {
        Ok(self.slot_norms(target, chart, z)?.iter().map(|n| n * n).sum())
    }

    /// Evaluates in `from` at `z` and returns the components in the other
    /// domain chart (same target chart) at `1/z`.
    pub fn component_transition(&self, from: Frame, z: C) -> Result<(C, [C; 4])> {
        if !(0.5..=2.0).contains(&z.norm()) {
            return Err(Error::OutsideOverlap(z));
        }
        let v = self.values(from, z)?;
        Ok((z.inv(), transition_values(v, z, from.chart)?))
    }

    /// One row per node and slot: `chart, z_re, z_im, slot, value_re, value_im`.
    pub fn write_csv<W: Write>(&self, writer: W, grid: &SphereGrid) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["chart", "z_re", "z_im", "slot", "value_re", "value_im"])?;
        for node in grid.nodes() {
            let (_, v) = self.values_at(node.chart, node.z)?;
            for slot in Slot::ALL {
                let c = v[slot.index()];
                w.serialize((
                    node.chart.index(),
                    node.z.re,
                    node.z.im,
                    slot.label(),
                    c.re,
                    c.im,
                ))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Untwisted spinor `A ψ⁺ + B ψ⁻` in one chart.
#[derive(Clone, Debug)]
pub struct SpinorCoefficients {
    pub plus: Expr,
    pub minus: Expr,
}

/// `Ψ = ū₁ λ^{1/4} ψ⁺ + u₂ λ^{1/4} ψ⁻`.
#[derive(Clone, Debug)]
pub struct TwistorSpinor {
    pub u1: RationalFunction,
    pub u2: RationalFunction,
    pub domain: ChartedSphere,
}

impl TwistorSpinor {
    pub fn new(u1: RationalFunction, u2: RationalFunction, domain: ChartedSphere) -> Self {
        Self { u1, u2, domain }
    }

    /// `(u₁, u₂)` as seen in the given chart.
    pub fn local_pair(&self, chart: Chart) -> (RationalFunction, RationalFunction) {
        match chart {
            Chart::North => (self.u1.clone(), self.u2.clone()),
            Chart::South => (
                self.u1.twistor_chart_transform(),
                self.u2.twistor_chart_transform(),
            ),
        }
    }

    pub fn coefficients(&self, chart: Chart) -> SpinorCoefficients {
        let (u1, u2) = self.local_pair(chart);
        let q = self.domain.factor(chart).clone().powf(0.25);
        SpinorCoefficients {
            plus: Expr::rational(u1).conj() * q.clone(),
            minus: Expr::rational(u2) * q,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Orientation;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    const P: SpinorValue = SpinorValue { plus: C::new(1.0, 0.0), minus: C::new(0.0, 0.0) };
    const M: SpinorValue = SpinorValue { plus: C::new(0.0, 0.0), minus: C::new(1.0, 0.0) };

    #[test]
    fn clifford_examples() {
        assert_eq!(CliffordTable::e1(P), M);
        let s = SpinorValue::new(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(CliffordTable::e2(s), s * I);
        let lam = 0.36;
        let dzb = clifford_apply(TangentDirection::Dzbar, P, lam);
        assert!(dzb.norm_sqr() < 1e-30);
        let dz = clifford_apply(TangentDirection::Dz, P, lam);
        assert!((dz.minus - c(0.6, 0.0)).norm() < 1e-15 && dz.plus.norm() < 1e-15);
        assert!(clifford_apply(TangentDirection::Dz, M, lam).norm_sqr() < 1e-30);
        let dzb = clifford_apply(TangentDirection::Dzbar, M, lam);
        assert!((dzb.plus + c(0.6, 0.0)).norm() < 1e-15 && dzb.minus.norm() < 1e-15);
    }

    #[test]
    fn clifford_relations_and_chirality() {
        let s = SpinorValue::new(c(0.3, -1.2), c(2.0, 0.7));
        let e = [CliffordTable::e1 as fn(_) -> _, CliffordTable::e2];
        for a in 0..2 {
            for b in 0..2 {
                let anti = e[a](e[b](s)) + e[b](e[a](s));
                let expect = if a == b { s * C::from(-2.0) } else { SpinorValue::default() };
                assert!((anti.plus - expect.plus).norm() < 1e-15);
                assert!((anti.minus - expect.minus).norm() < 1e-15);
            }
        }
        assert_eq!(CliffordTable::e1(CliffordTable::e2(P)) * I, P);
        assert_eq!(CliffordTable::e1(CliffordTable::e2(M)) * I, M * C::from(-1.0));
        assert_eq!(CliffordTable::inner(P, M), c(0.0, 0.0));
    }

    #[test]
    fn skew_adjoint() {
        let a = SpinorValue::new(c(0.3, -1.2), c(2.0, 0.7));
        let b = SpinorValue::new(c(-0.5, 0.1), c(0.4, 1.1));
        for f in [CliffordTable::e1 as fn(_) -> _, CliffordTable::e2] {
            let lhs = CliffordTable::inner(f(a), b);
            let rhs = -CliffordTable::inner(a, f(b));
            assert!((lhs - rhs).norm() < 1e-15);
        }
    }

    fn sample_field() -> TwistedSpinorField {
        let map = SphereMap::rational(
            RationalFunction::polynomial(vec![c(0.2, 0.0), c(1.0, 0.5), c(0.3, 0.0)]),
            Orientation::Holomorphic,
        );
        let q = Expr::rational(RationalFunction::polynomial(vec![c(1.0, 0.0), c(1.0, 0.0)]))
            * (Expr::real(1.0) + Expr::abs_sq_var()).powf(-1.5);
        let comps = [
            q.clone(),
            q.clone().conj() * c(0.0, 1.0),
            Expr::var().conj() * q.clone(),
            Expr::zero(),
        ];
        TwistedSpinorField::new(map, Frame::new(Chart::North, Chart::North), comps)
    }

    #[test]
    fn norms_agree_across_frames() {
        let n = ChartedSphere::round();
        let f = sample_field();
        for &z in &[c(0.7, 0.3), c(-1.2, 0.9), c(0.0, 1.0)] {
            let mut norms = Vec::new();
            for frame in Frame::ALL {
                let zz = if frame.chart == Chart::North { z } else { z.inv() };
                let v = f.values(frame, zz).unwrap();
                let w = f.map().local(frame.chart, frame.target).value(zz).unwrap();
                let s = 0.5 * n.lambda(frame.target, w).unwrap();
                let per_slot: Vec<f64> = v.iter().map(|c| c.norm() * s.sqrt()).collect();
                norms.push(per_slot);
            }
            for other in &norms[1..] {
                for (a, b) in norms[0].iter().zip(other) {
                    assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn numeric_transition_matches_derived_frame() {
        let f = sample_field();
        let z = c(0.8, -0.6);
        let from = Frame::new(Chart::North, Chart::North);
        let (zt, v) = f.component_transition(from, z).unwrap();
        let direct = f.values(Frame::new(Chart::South, Chart::North), zt).unwrap();
        for (a, b) in v.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(f.component_transition(from, c(0.1, 0.0)), Err(Error::OutsideOverlap(_))));
        let zero = TwistedSpinorField::zero(SphereMap::identity());
        let (_, v) = zero.component_transition(from, z).unwrap();
        assert!(v.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn projections() {
        let f = sample_field();
        let z = c(0.4, 0.2);
        let frame = Frame::new(Chart::South, Chart::South);
        let whole = f.values(frame, z).unwrap();
        let mut sum = [c(0.0, 0.0); 4];
        for slot in Slot::ALL {
            let p = f.project(slot);
            let pp = p.project(slot);
            let v = p.values(frame, z).unwrap();
            assert_eq!(v, pp.values(frame, z).unwrap());
            for (i, x) in v.iter().enumerate() {
                if i != slot.index() {
                    assert_eq!(*x, c(0.0, 0.0));
                }
                sum[i] += x;
            }
        }
        assert_eq!(sum, whole);
        assert!(f.project(Slot::ZeroMinus).is_zero());
    }

    #[test]
    fn csv_layout() {
        let m = ChartedSphere::round();
        let grid = SphereGrid::new(&m, 2, 3).unwrap();
        let mut buf = Vec::new();
        sample_field().write_csv(&mut buf, &grid).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "chart,z_re,z_im,slot,value_re,value_im");
        assert_eq!(lines.count(), grid.len() * 4);
    }

    #[test]
    fn twistor_chart_consistency() {
        let m = ChartedSphere::round();
        let u1 = RationalFunction::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let u2 = RationalFunction::new(vec![c(1.0, 0.0)], vec![c(-0.3, 0.0), c(1.0, 0.0)]).unwrap();
        let t = TwistorSpinor::new(u1, u2, m);
        let z = c(0.9, 0.8);
        let north = t.coefficients(Chart::North);
        let south = t.coefficients(Chart::South);
        let vals = [north.plus.value(z).unwrap(), north.minus.value(z).unwrap(), c(0.0, 0.0), c(0.0, 0.0)];
        // pack as slots 1+ / 1- so the plus/minus phases apply
        let packed = [vals[0], c(0.0, 0.0), vals[1], c(0.0, 0.0)];
        let moved = transition_values(packed, z, Chart::North).unwrap();
        assert!((moved[0] - south.plus.value(z.inv()).unwrap()).norm() < 1e-12);
        assert!((moved[2] - south.minus.value(z.inv()).unwrap()).norm() < 1e-12);
    }
}
