//! Dirac-harmonic pairs from a map and two meromorphic functions.
//!
//! For holomorphic `w = R(z)` and `Ψ = ū₁λ^{1/4}ψ⁺ + u₂λ^{1/4}ψ⁻`, the field
//! `ψ = e_α·Ψ ⊗ φ_*e_α` has components
//!
//! ```text
//! c₁⁺ = −2 λ^{-1/4} u₂ R'      c₀⁻ = 2 λ^{-1/4} conj(u₁ R')
//! ```
//!
//! and for antiholomorphic `w = conj(R(z))`
//!
//! ```text
//! c₀⁺ = −2 λ^{-1/4} u₂ R'      c₁⁻ = 2 λ^{-1/4} conj(u₁ R')
//! ```
//!
//! The same formulas hold in every frame with `u` replaced by its chart
//! representative and `R` by the local representative of the map.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Chart, ChartedSphere};
use crate::map::{Orientation, SphereMap};
use crate::operators::SingularPoint;
use crate::rational::{RationalFunction, SpherePoint};
use crate::spinor::{Frame, Slot, TwistedSpinorField};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Location of a pole: `[re, im]` or the string `"infinity"`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PoleLocation {
    Finite([f64; 2]),
    Infinity(&'static str),
}

impl PoleLocation {
    fn of(p: SpherePoint) -> Self {
        match p {
            SpherePoint::Finite(z) => PoleLocation::Finite([z.re, z.im]),
            SpherePoint::Infinity => PoleLocation::Infinity("infinity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleCheck {
    pub function: &'static str,
    pub location: PoleLocation,
    pub pole_order: u32,
    /// Vanishing order of `|dφ|` at the pole.
    pub branch_order: u32,
    pub required: u32,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub poles: Vec<PoleCheck>,
    pub verdict: Verdict,
}

impl AdmissibilityReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn offending(&self) -> impl Iterator<Item = &PoleCheck> {
        self.poles.iter().filter(|p| p.verdict == Verdict::Reject)
    }
}

/// Checks the pole conditions: a finite pole of order `k` needs `|dφ|` to
/// vanish to order at least `k`; a pole of order `k ≥ 2` at ∞ needs order
/// at least `k − 1`.
pub fn check_admissibility(
    map: &SphereMap,
    u1: &RationalFunction,
    u2: &RationalFunction,
) -> Result<AdmissibilityReport> {
    if map.is_constant() {
        return Err(Error::ConstantMap);
    }
    if map.rational_data().is_none() {
        return Err(Error::DegenerateMap("admissibility needs a rational map".into()));
    }
    let mut poles = Vec::new();
    for (name, u) in [("u1", u1), ("u2", u2)] {
        if u.is_zero() {
            continue;
        }
        for (z0, k) in u.poles() {
            let p = SpherePoint::Finite(z0);
            let b = map.branch_order(p)?;
            poles.push(check(name, p, k, b, k));
        }
        let at_inf = u.degree_at_infinity()?;
        if at_inf < 0 {
            let k = (-at_inf) as u32;
            let b = map.branch_order(SpherePoint::Infinity)?;
            let required = if k >= 2 { k - 1 } else { 0 };
            poles.push(check(name, SpherePoint::Infinity, k, b, required));
        }
    }
    let verdict = if poles.iter().all(|p| p.verdict == Verdict::Accept) {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(AdmissibilityReport { poles, verdict })
}

fn check(function: &'static str, p: SpherePoint, k: u32, branch: u32, required: u32) -> PoleCheck {
    PoleCheck {
        function,
        location: PoleLocation::of(p),
        pole_order: k,
        branch_order: branch,
        required,
        verdict: if branch >= required {
            Verdict::Accept
        } else {
            Verdict::Reject
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Structure {
        u1: RationalFunction,
        u2: RationalFunction,
    },
    /// A harmonic map with the zero spinor.
    TrivialHarmonic,
    /// A constant map; only the zero spinor survives.
    ConstantMap,
}

#[derive(Clone, Debug)]
pub struct DiracHarmonicPair {
    pub domain: ChartedSphere,
    pub target: ChartedSphere,
    pub map: SphereMap,
    pub field: TwistedSpinorField,
    pub provenance: Provenance,
    pub singular_points: Vec<SingularPoint>,
}

fn canonical_point(p: SpherePoint) -> SingularPoint {
    match p {
        SpherePoint::Infinity => SingularPoint {
            chart: Chart::South,
            z: C::new(0.0, 0.0),
        },
        SpherePoint::Finite(z) if z.norm() <= 1.0 => SingularPoint {
            chart: Chart::North,
            z,
        },
        SpherePoint::Finite(z) => SingularPoint {
            chart: Chart::South,
            z: z.inv(),
        },
    }
}

fn pole_points(u: &RationalFunction) -> Vec<SingularPoint> {
    if u.is_zero() {
        return Vec::new();
    }
    let mut out: Vec<_> = u
        .poles()
        .into_iter()
        .map(|(z, _)| canonical_point(SpherePoint::Finite(z)))
        .collect();
    if u.degree_at_infinity().map(|d| d < 0).unwrap_or(false) {
        out.push(canonical_point(SpherePoint::Infinity));
    }
    out
}

/// Builds the pair for `(φ, u₁, u₂)`. A constant map yields the zero
/// spinor whatever `u₁`, `u₂` are.
pub fn build_pair(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    map: &SphereMap,
    u1: &RationalFunction,
    u2: &RationalFunction,
) -> Result<DiracHarmonicPair> {
    if map.is_constant() {
        return Ok(DiracHarmonicPair {
            domain: domain.clone(),
            target: target.clone(),
            map: map.clone(),
            field: TwistedSpinorField::zero(map.clone()),
            provenance: Provenance::ConstantMap,
            singular_points: Vec::new(),
        });
    }
    let report = check_admissibility(map, u1, u2)?;
    if !report.accepted() {
        return Err(Error::Inadmissible(Box::new(report)));
    }
    let (_, orientation) = map.rational_data().expect("checked rational");
    let reps = Frame::ALL.map(|frame| {
        let (lu1, lu2) = match frame.chart {
            Chart::North => (u1.clone(), u2.clone()),
            Chart::South => (u1.twistor_chart_transform(), u2.twistor_chart_transform()),
        };
        let local = map
            .local_rational(frame.chart, frame.target)
            .expect("non-constant rational map has all local representatives");
        let d = local.derivative();
        let q = domain.factor(frame.chart).clone().powf(-0.25);
        let first = q.clone() * Expr::rational(lu2.mul(&d)) * C::from(-2.0);
        let second = q * Expr::rational(lu1.mul(&d)).conj() * C::from(2.0);
        let mut comps: [Expr; 4] = std::array::from_fn(|_| Expr::zero());
        let (a, b) = match orientation {
            Orientation::Holomorphic => (Slot::OnePlus, Slot::ZeroMinus),
            Orientation::Antiholomorphic => (Slot::ZeroPlus, Slot::OneMinus),
        };
        comps[a.index()] = first;
        comps[b.index()] = second;
        comps
    });
    let mut singular = pole_points(u1);
    for p in pole_points(u2) {
        if !singular.contains(&p) {
            singular.push(p);
        }
    }
    Ok(DiracHarmonicPair {
        domain: domain.clone(),
        target: target.clone(),
        map: map.clone(),
        field: TwistedSpinorField::from_all_frames(map.clone(), reps),
        provenance: Provenance::Structure {
            u1: u1.clone(),
            u2: u2.clone(),
        },
        singular_points: singular,
    })
}

/// `(φ, 0)` for a harmonic map `φ`.
pub fn build_trivial(domain: &ChartedSphere, target: &ChartedSphere, map: &SphereMap) -> Result<DiracHarmonicPair> {
    if map.rational_data().is_none() {
        return Err(Error::DegenerateMap("trivial pairs need a rational map".into()));
    }
    Ok(DiracHarmonicPair {
        domain: domain.clone(),
        target: target.clone(),
        map: map.clone(),
        field: TwistedSpinorField::zero(map.clone()),
        provenance: if map.is_constant() {
            Provenance::ConstantMap
        } else {
            Provenance::TrivialHarmonic
        },
        singular_points: Vec::new(),
    })
}

/// A constant map with a prescribed field, which must vanish.
pub fn build_constant_map_pair(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    w0: C,
    field: Option<&TwistedSpinorField>,
) -> Result<DiracHarmonicPair> {
    let map = SphereMap::constant(w0);
    if let Some(f) = field {
        if !f.is_zero() {
            return Err(Error::ConstantMapWithNonzeroSpinor);
        }
    }
    build_trivial(domain, target, &map)
}

/// Whether every Dirac-harmonic pair in this topological setting has a
/// harmonic map component: `g_M = 0` or `|g_M − 1| < |deg|·|2g_N − 2|`.
pub fn harmonicity_forced(g_m: i64, g_n: i64, deg: i64) -> bool {
    g_m == 0 || (g_m - 1).abs() < deg.abs() * (2 * g_n - 2).abs()
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularRecord {
    pub chart: usize,
    pub z: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct MapDescription {
    pub orientation: Option<Orientation>,
    pub rational: Option<RationalFunction>,
    pub degree: Option<i32>,
}

/// Machine-readable summary of a pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairDescription {
    pub map: MapDescription,
    pub provenance: Provenance,
    /// Slots whose components vanish identically by construction.
    pub vanishing_slots: Vec<Slot>,
    pub singular_points: Vec<SingularRecord>,
}

impl DiracHarmonicPair {
    pub fn describe(&self) -> PairDescription {
        let rd = self.map.rational_data();
        PairDescription {
            map: MapDescription {
                orientation: rd.map(|(_, o)| o),
                rational: rd.map(|(f, _)| f.clone()),
                degree: self.map.degree(),
            },
            provenance: self.provenance.clone(),
            vanishing_slots: Slot::ALL
                .into_iter()
                .filter(|s| self.field.slot_is_zero(*s))
                .collect(),
            singular_points: self
                .singular_points
                .iter()
                .map(|p| SingularRecord {
                    chart: p.chart.index(),
                    z: [p.z.re, p.z.im],
                })
                .collect(),
        }
    }
}
