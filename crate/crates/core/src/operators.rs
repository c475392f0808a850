//! Differential operators along a map and identity-defect evaluators.
//!
//! Everything is evaluated pointwise from jets. With `L = log λ`,
//! `Γ = ∂_w log ρ` and the spin connection `∇_{∂z}ψ^± = ∓¼ L_z ψ^±`,
//! `∇_{∂z̄}ψ^± = ±¼ L_z̄ ψ^±`, the Dirac operator
//! `D = (2/λ)(∂_z·∇_{∂z̄} + ∂_z̄·∇_{∂z})` acts slotwise as
//!
//! ```text
//! 1+ → 1−   2λ^{-1/2}( ∂_z̄c + ¼L_z̄ c + Γ w_z̄ c )
//! 0+ → 0−   2λ^{-1/2}( ∂_z̄c + ¼L_z̄ c + Γ̄ conj(w_z) c )
//! 1− → 1+  −2λ^{-1/2}( ∂_z c + ¼L_z c + Γ w_z c )
//! 0− → 0+  −2λ^{-1/2}( ∂_z c + ¼L_z c + Γ̄ conj(w_z̄) c )
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Chart, ChartedSphere, GridNode, SphereGrid};
use crate::jet::ComplexJet2;
use crate::map::SphereMap;
use crate::spinor::{CliffordTable, Frame, Slot, SpinorCoefficients, SpinorValue, TwistedSpinorField};

type C = Complex64;

/// Default radius around singular points inside which nodes are skipped.
pub const EXCLUSION_RADIUS: f64 = 1e-2;

/// Fraction of excluded nodes above which verification fails.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;

/// Default magnitude above which a spinor is reported as unbounded.
pub const SPINOR_BOUND: f64 = 1e6;

/// Domain and target data at a point, in a fixed frame.
#[derive(Clone, Copy, Debug)]
pub struct LocalGeometry {
    pub frame: Frame,
    pub z: C,
    pub lambda: f64,
    /// `∂_z log λ`; the `z̄` derivative is its conjugate.
    pub dlog_lambda: C,
    pub k_domain: f64,
    pub w: ComplexJet2,
    pub rho: f64,
    /// `∂_w log ρ` at `w(z)`.
    pub gamma: C,
    pub k_target: f64,
}

impl LocalGeometry {
    pub fn at(
        domain: &ChartedSphere,
        target: &ChartedSphere,
        map: &SphereMap,
        frame: Frame,
        z: C,
    ) -> Result<Self> {
        let lambda = domain.lambda(frame.chart, z)?;
        let log_l = domain.factor(frame.chart).clone().ln().jet(z)?;
        let w = map.local(frame.chart, frame.target).jet(z)?;
        let rho = target.lambda(frame.target, w.value)?;
        let log_r = target.factor(frame.target).clone().ln().jet(w.value)?;
        Ok(Self {
            frame,
            z,
            lambda,
            dlog_lambda: log_l.d_z,
            k_domain: -2.0 / lambda * log_l.d_zzbar.re,
            w,
            rho,
            gamma: log_r.d_z,
            k_target: -2.0 / rho * log_r.d_zzbar.re,
        })
    }

    /// Geometry in the frame that [`SphereMap::choose_target`] picks.
    pub fn natural(
        domain: &ChartedSphere,
        target: &ChartedSphere,
        map: &SphereMap,
        chart: Chart,
        z: C,
    ) -> Result<Self> {
        let frame = Frame::new(chart, map.choose_target(chart, z));
        Self::at(domain, target, map, frame, z)
    }

    /// Converts frame components to orthonormal-frame magnitudes.
    pub fn component_scale(&self) -> f64 {
        (0.5 * self.rho).sqrt()
    }

    /// `J = (ρ/λ)(|w_z|² − |w_z̄|²)`.
    pub fn jacobian(&self) -> f64 {
        self.rho / self.lambda * (self.w.d_z.norm_sqr() - self.w.d_zbar.norm_sqr())
    }

    /// `|dφ|² = 2(ρ/λ)(|w_z|² + |w_z̄|²)`.
    pub fn energy_density(&self) -> f64 {
        2.0 * self.rho / self.lambda * (self.w.d_z.norm_sqr() + self.w.d_zbar.norm_sqr())
    }
}

/// Dirac output components from the component jets.
pub fn dirac_components(g: &LocalGeometry, c: &[ComplexJet2; 4]) -> [C; 4] {
    let s = 2.0 / g.lambda.sqrt();
    let lz = 0.25 * g.dlog_lambda;
    let lzb = lz.conj();
    let w = &g.w;
    let [c1p, c0p, c1m, c0m] = c;
    let mut out = [C::new(0.0, 0.0); 4];
    out[Slot::OneMinus.index()] = s * (c1p.d_zbar + (lzb + g.gamma * w.d_zbar) * c1p.value);
    out[Slot::ZeroMinus.index()] =
        s * (c0p.d_zbar + (lzb + g.gamma.conj() * w.d_z.conj()) * c0p.value);
    out[Slot::OnePlus.index()] = -s * (c1m.d_z + (lz + g.gamma * w.d_z) * c1m.value);
    out[Slot::ZeroPlus.index()] =
        -s * (c0m.d_z + (lz + g.gamma.conj() * w.d_zbar.conj()) * c0m.value);
    out
}

/// `∂_w` coefficient of the tension field.
pub fn tension_coefficient(g: &LocalGeometry) -> C {
    4.0 / g.lambda * (g.w.d_zzbar + g.gamma * g.w.d_z * g.w.d_zbar)
}

/// A complexified target vector `dw ∂_w + dwbar ∂_w̄`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TargetVector {
    pub dw: C,
    pub dwbar: C,
    /// Target factor at the image point.
    pub rho: f64,
}

impl TargetVector {
    /// Hermitian norm; `√ρ |dw|` for real vectors.
    pub fn norm(&self) -> f64 {
        (0.5 * self.rho * (self.dw.norm_sqr() + self.dwbar.norm_sqr())).sqrt()
    }

    /// Deviation from being real, `|dwbar − conj(dw)|`.
    pub fn reality_defect(&self) -> f64 {
        (self.dwbar - self.dw.conj()).norm()
    }

    pub fn sub(&self, other: &TargetVector) -> TargetVector {
        TargetVector {
            dw: self.dw - other.dw,
            dwbar: self.dwbar - other.dwbar,
            rho: self.rho,
        }
    }
}

/// Right-hand side of the map equation built from spinor component values.
///
/// `V = −Σ_α s_α R(∂_w̄, ∂_w) φ_*e_α` with `s_α = ⟨ψ¹, e_α·ψ¹⟩ − ⟨ψ², e_α·ψ²⟩`,
/// where `ψ¹`, `ψ²` are the spinor parts on `∂_w` and `∂_w̄`, and
/// `R(∂_w̄, ∂_w)(p∂_w + q∂_w̄) = (Kρ/2)(p∂_w − q∂_w̄)`.
pub fn coupling_vector(g: &LocalGeometry, values: &[C; 4]) -> TargetVector {
    let psi1 = SpinorValue::new(values[Slot::OnePlus.index()], values[Slot::OneMinus.index()]);
    let psi2 = SpinorValue::new(values[Slot::ZeroPlus.index()], values[Slot::ZeroMinus.index()]);
    let e = [CliffordTable::e1 as fn(SpinorValue) -> SpinorValue, CliffordTable::e2];
    let inv_sqrt = 1.0 / g.lambda.sqrt();
    // e₁(w), e₂(w) and the same for w̄
    let p = [g.w.d_x() * inv_sqrt, g.w.d_y() * inv_sqrt];
    let wbar = g.w.conj();
    let q = [wbar.d_x() * inv_sqrt, wbar.d_y() * inv_sqrt];
    let k = 0.5 * g.k_target * g.rho;
    let mut dw = C::new(0.0, 0.0);
    let mut dwbar = C::new(0.0, 0.0);
    for a in 0..2 {
        let s = CliffordTable::inner(psi1, e[a](psi1)) - CliffordTable::inner(psi2, e[a](psi2));
        dw -= s * k * p[a];
        dwbar += s * k * q[a];
    }
    TargetVector {
        dw,
        dwbar,
        rho: g.rho,
    }
}

/// Output of the Dirac operator in the frame it was evaluated in.
#[derive(Clone, Copy, Debug)]
pub struct DiracOutput {
    pub frame: Frame,
    pub values: [C; 4],
    /// `(ρ/2)^{1/2}`, turning components into orthonormal coefficients.
    pub scale: f64,
}

impl DiracOutput {
    pub fn norm(&self) -> f64 {
        self.scale * self.values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn dirac_apply(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    field: &TwistedSpinorField,
    z: C,
    chart: Chart,
) -> Result<DiracOutput> {
    let g = LocalGeometry::natural(domain, target, field.map(), chart, z)?;
    let jets = field.jets(g.frame, z)?;
    Ok(DiracOutput {
        frame: g.frame,
        values: dirac_components(&g, &jets),
        scale: g.component_scale(),
    })
}

pub fn tension_field(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    map: &SphereMap,
    z: C,
    chart: Chart,
) -> Result<TargetVector> {
    let g = LocalGeometry::natural(domain, target, map, chart, z)?;
    let t = tension_coefficient(&g);
    Ok(TargetVector {
        dw: t,
        dwbar: t.conj(),
        rho: g.rho,
    })
}

pub fn curvature_coupling(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    field: &TwistedSpinorField,
    z: C,
    chart: Chart,
) -> Result<TargetVector> {
    let g = LocalGeometry::natural(domain, target, field.map(), chart, z)?;
    let v = field.values(g.frame, z)?;
    Ok(coupling_vector(&g, &v))
}

/// Largest value of a residual and the node attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WorstNode {
    pub node: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridShape {
    pub n_radial: usize,
    pub n_angular: usize,
    pub nodes: usize,
}

impl GridShape {
    pub fn of(grid: &SphereGrid) -> Self {
        Self {
            n_radial: grid.n_radial,
            n_angular: grid.n_angular,
            nodes: grid.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ELResidualReport {
    pub max_dirac_residual: f64,
    pub max_tension_residual: f64,
    pub max_coupling_residual: f64,
    /// Largest `|ψ|` over the evaluated nodes.
    pub field_scale: f64,
    /// `max_dirac_residual / field_scale`, zero for the zero field.
    pub relative_dirac_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    pub excluded_nodes: usize,
    pub grid: GridShape,
    pub worst_dirac: WorstNode,
    pub worst_tension: WorstNode,
    pub worst_coupling: WorstNode,
}

/// A point excluded from verification, in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub chart: Chart,
    pub z: C,
}

impl SingularPoint {
    /// Whether `(chart, z)` lies within `radius` of the point, measured in
    /// whichever chart contains both comfortably.
    pub fn near(&self, chart: Chart, z: C, radius: f64) -> bool {
        if chart == self.chart {
            return (z - self.z).norm() < radius;
        }
        if z.norm() < 0.5 || self.z.norm() < 0.5 {
            return false;
        }
        (z.inv() - self.z).norm() < radius
    }
}

struct NodeResiduals {
    dirac: f64,
    tension: f64,
    coupling: f64,
    psi: f64,
}

fn node_residuals(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    field: &TwistedSpinorField,
    node: &GridNode,
) -> Result<NodeResiduals> {
    let g = LocalGeometry::natural(domain, target, field.map(), node.chart, node.z)?;
    let jets = field.jets(g.frame, node.z)?;
    let values = jets.map(|j| j.value);
    let scale = g.component_scale();
    let out = dirac_components(&g, &jets);
    let dirac = scale * out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let t = tension_coefficient(&g);
    let tension = TargetVector {
        dw: t,
        dwbar: t.conj(),
        rho: g.rho,
    };
    let coupling = tension.sub(&coupling_vector(&g, &values)).norm();
    let psi = scale * values.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = NodeResiduals {
        dirac,
        tension: tension.norm(),
        coupling,
        psi,
    };
    if [r.dirac, r.tension, r.coupling, r.psi].iter().all(|v| v.is_finite()) {
        Ok(r)
    } else {
        Err(Error::NonFiniteSample(node.index))
    }
}

fn worst(samples: &[(usize, f64)]) -> WorstNode {
    let mut best = WorstNode { node: 0, value: 0.0 };
    for &(node, value) in samples {
        // strict comparison keeps the lowest index on ties
        if value > best.value {
            best = WorstNode { node, value };
        }
    }
    best
}

/// Maxima of the Euler–Lagrange residuals over the grid.
pub fn el_verify(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    field: &TwistedSpinorField,
    singular: &[SingularPoint],
    grid: &SphereGrid,
) -> Result<ELResidualReport> {
    let results: Vec<Option<NodeResiduals>> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            if singular
                .iter()
                .any(|s| s.near(node.chart, node.z, EXCLUSION_RADIUS))
            {
                return None;
            }
            node_residuals(domain, target, field, node).ok()
        })
        .collect();
    let excluded = results.iter().filter(|r| r.is_none()).count();
    if excluded as f64 > MAX_EXCLUDED_FRACTION * grid.len() as f64 {
        return Err(Error::TooManyExclusions {
            excluded,
            total: grid.len(),
        });
    }
    let pick = |f: fn(&NodeResiduals) -> f64| -> Vec<(usize, f64)> {
        results
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|r| (i, f(r))))
            .collect()
    };
    let worst_dirac = worst(&pick(|r| r.dirac));
    let worst_tension = worst(&pick(|r| r.tension));
    let worst_coupling = worst(&pick(|r| r.coupling));
    let field_scale = worst(&pick(|r| r.psi)).value;
    let relative = if field_scale > 0.0 {
        worst_dirac.value / field_scale
    } else {
        0.0
    };
    Ok(ELResidualReport {
        max_dirac_residual: worst_dirac.value,
        max_tension_residual: worst_tension.value,
        max_coupling_residual: worst_coupling.value,
        field_scale,
        relative_dirac_residual: relative,
        energy: None,
        excluded_nodes: excluded,
        grid: GridShape::of(grid),
        worst_dirac,
        worst_tension,
        worst_coupling,
    })
}

/// Right side of the Bochner formula for `log |π_slot ψ|`.
pub fn bochner_rhs(slot: Slot, g: &LocalGeometry) -> f64 {
    let kj = g.k_target * g.jacobian();
    let sign = match slot {
        Slot::OnePlus | Slot::ZeroMinus => -1.0,
        Slot::ZeroPlus | Slot::OneMinus => 1.0,
    };
    0.5 * g.k_domain + sign * kj
}

/// Threshold below which a component is treated as vanishing.
pub const BOCHNER_ZERO_FLOOR: f64 = 1e-6;

/// Laplacian of `log |π_slot ψ|` from a five-point stencil along each real
/// coordinate, minus the slot's curvature term.
#[allow(clippy::too_many_arguments)]
pub fn bochner_defect(
    slot: Slot,
    field: &TwistedSpinorField,
    domain: &ChartedSphere,
    target: &ChartedSphere,
    z: C,
    chart: Chart,
    h: f64,
) -> Result<f64> {
    let map = field.map();
    let g = LocalGeometry::natural(domain, target, map, chart, z)?;
    let frame = g.frame;
    let log_norm = |p: C| -> Result<f64> {
        let c = field.values(frame, p)?[slot.index()];
        let w = map.local(frame.chart, frame.target).value(p)?;
        let n = c.norm() * (0.5 * target.lambda(frame.target, w)?).sqrt();
        if n <= BOCHNER_ZERO_FLOOR {
            return Err(Error::TooCloseToZeroSet(p));
        }
        Ok(n.ln())
    };
    let mut sum = -60.0 * log_norm(z)?;
    for dir in [C::new(h, 0.0), C::new(0.0, h)] {
        for (k, w) in [(1.0, 16.0), (2.0, -1.0)] {
            sum += w * (log_norm(z + dir * k)? + log_norm(z - dir * k)?);
        }
    }
    let laplacian = sum / (12.0 * h * h * g.lambda);
    Ok(laplacian - bochner_rhs(slot, &g))
}

/// Norm of the twistor defect `∇_vΨ + ½ v·∂̸Ψ` for `v` given by its
/// orthonormal-frame components `v = v₁e₁ + v₂e₂`, packed as `v₁ + i v₂`.
///
/// For `Ψ = Aψ⁺ + Bψ⁻` the defect along `∂_z` is `(∂_zA − ¼L_zA)ψ⁺` and
/// along `∂_z̄` it is `(∂_z̄B − ¼L_z̄B)ψ⁻`.
pub fn twistor_residual(
    domain: &ChartedSphere,
    spinor: &SpinorCoefficients,
    v: C,
    z: C,
    chart: Chart,
) -> Result<f64> {
    let lambda = domain.lambda(chart, z)?;
    let lz = domain.factor(chart).clone().ln().jet(z)?.d_z;
    let a = spinor.plus.jet(z)?;
    let b = spinor.minus.jet(z)?;
    let t_z = a.d_z - 0.25 * lz * a.value;
    let t_zb = b.d_zbar - 0.25 * lz.conj() * b.value;
    let coef = v / lambda.sqrt();
    Ok(((coef * t_z).norm_sqr() + (coef.conj() * t_zb).norm_sqr()).sqrt())
}

/// `∫ |dφ|² + |ψ|⁴` by grid quadrature.
pub fn energy(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    field: &TwistedSpinorField,
    grid: &SphereGrid,
    bound: f64,
) -> Result<f64> {
    grid.integrate(|node| {
        let g = LocalGeometry::natural(domain, target, field.map(), node.chart, node.z)?;
        let v = field.values(g.frame, node.z)?;
        let psi_sq = 0.5 * g.rho * v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let psi = psi_sq.sqrt();
        if !(psi <= bound) {
            return Err(Error::UnboundedSpinor {
                node: node.index,
                value: psi,
                bound,
            });
        }
        Ok(g.energy_density() + psi_sq * psi_sq)
    })
}

/// `∫ ⟨a, b⟩` for fields over the same map, pairing slotwise with `ρ/2`.
pub fn l2_pairing<F, G>(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    map: &SphereMap,
    grid: &SphereGrid,
    a: F,
    b: G,
) -> Result<C>
where
    F: Fn(Frame, C) -> Result<[C; 4]> + Sync,
    G: Fn(Frame, C) -> Result<[C; 4]> + Sync,
{
    let parts: Vec<Result<C>> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let g = LocalGeometry::natural(domain, target, map, node.chart, node.z)?;
            let x = a(g.frame, node.z)?;
            let y = b(g.frame, node.z)?;
            let s: C = x.iter().zip(&y).map(|(p, q)| p * q.conj()).sum();
            Ok(s * (0.5 * g.rho * node.weight))
        })
        .collect();
    let mut total = C::new(0.0, 0.0);
    for p in parts {
        total += p?;
    }
    Ok(total)
}

/// Dirac outputs of a field in a prescribed frame.
pub fn dirac_in_frame(
    domain: &ChartedSphere,
    target: &ChartedSphere,
    field: &TwistedSpinorField,
    frame: Frame,
    z: C,
) -> Result<[C; 4]> {
    let g = LocalGeometry::at(domain, target, field.map(), frame, z)?;
    Ok(dirac_components(&g, &field.jets(frame, z)?))
}
