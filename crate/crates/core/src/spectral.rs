//! Near-kernel of the discretized Dirac operator and joint residual descent.

use std::io::Write;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Chart, ChartedSphere, SphereGrid};
use crate::jet::ComplexJet2;
use crate::map::{Orientation, SphereMap};
use crate::operators::{coupling_vector, dirac_components, tension_coefficient, LocalGeometry};
use crate::rational::RationalFunction;
use crate::spinor::{Frame, Slot, TwistedSpinorField};

type C = Complex64;

/// Default spectral gap certificate.
pub const DEFAULT_GAP: f64 = 1e3;
/// Coefficients of a search parameter vector must stay within this box.
pub const PARAMETER_BOX: f64 = 1e3;
/// Minimum singular value of the sampled basis.
pub const BASIS_INDEPENDENCE: f64 = 1e-8;
/// Elements whose modulus grows faster than `|ζ|^{-1/2}` at ∞ are dropped.
pub const REGULARITY_EXPONENT: f64 = -0.5;

#[derive(Clone, Debug)]
pub struct AnsatzElement {
    pub label: String,
    pub slot: Slot,
    /// Component in the north frame pair.
    pub profile: Expr,
}

#[derive(Clone, Debug)]
pub struct AnsatzSpace {
    pub elements: Vec<AnsatzElement>,
    /// Estimated growth exponent at ∞, filled by [`AnsatzSpace::filter_regular`].
    pub exponents: Vec<f64>,
    pub regular: Vec<bool>,
}

/// `s = z̄/(1+|z|²)`, used to build elements that are not in the kernel.
fn s_factor() -> Expr {
    Expr::var().conj().div(Expr::real(1.0) + Expr::abs_sq_var())
}

/// `t = z/(1+|z|²)`.
fn t_factor() -> Expr {
    Expr::var().div(Expr::real(1.0) + Expr::abs_sq_var())
}

fn z_pow(j: usize) -> Expr {
    Expr::rational(RationalFunction::monomial(C::new(1.0, 0.0), j as i32))
}

impl AnsatzSpace {
    pub fn new(elements: Vec<AnsatzElement>) -> Self {
        let n = elements.len();
        Self {
            elements,
            exponents: vec![f64::INFINITY; n],
            regular: vec![true; n],
        }
    }

    /// `λ^{-1/4} z^j` for `j ≤ max_degree`, optionally followed by the
    /// elements `λ^{-1/4} z^j s`. Slot `0−` uses the conjugates.
    pub fn monomials(domain: &ChartedSphere, slot: Slot, max_degree: usize, with_probes: bool) -> Self {
        let q = domain.factor(Chart::North).clone().powf(-0.25);
        let conj = matches!(slot, Slot::ZeroMinus | Slot::ZeroPlus);
        let fix = |e: Expr| if conj { e.conj() } else { e };
        let mut elements = Vec::new();
        for j in 0..=max_degree {
            elements.push(AnsatzElement {
                label: format!("z^{j}"),
                slot,
                profile: q.clone() * fix(z_pow(j)),
            });
        }
        if with_probes {
            for j in 0..=max_degree {
                elements.push(AnsatzElement {
                    label: format!("z^{j} s"),
                    slot,
                    profile: q.clone() * fix(z_pow(j) * s_factor()),
                });
            }
        }
        Self::new(elements)
    }

    /// Elements spread over all four slots, used by the joint search.
    pub fn joint_default(domain: &ChartedSphere) -> Self {
        let q = domain.factor(Chart::North).clone().powf(-0.25);
        let mut elements = Vec::new();
        let mut push = |slot: Slot, label: String, e: Expr| {
            elements.push(AnsatzElement {
                label,
                slot,
                profile: q.clone() * e,
            })
        };
        for (slot, conj) in [(Slot::OnePlus, false), (Slot::ZeroMinus, true)] {
            let fix = |e: Expr| if conj { e.conj() } else { e };
            for j in 0..=1 {
                push(slot, format!("{slot}:z^{j}"), fix(z_pow(j)));
            }
            for j in 0..=2 {
                push(slot, format!("{slot}:z^{j} s"), fix(z_pow(j) * s_factor()));
            }
        }
        for (slot, conj) in [(Slot::OneMinus, false), (Slot::ZeroPlus, true)] {
            let fix = |e: Expr| if conj { e.conj() } else { e };
            for j in 0..=2 {
                push(slot, format!("{slot}:z^{j} t"), fix(z_pow(j) * t_factor()));
            }
        }
        Self::new(elements)
    }

    pub fn field(&self, map: &SphereMap, k: usize) -> TwistedSpinorField {
        let e = &self.elements[k];
        let mut comps: [Expr; 4] = std::array::from_fn(|_| Expr::zero());
        comps[e.slot.index()] = e.profile.clone();
        TwistedSpinorField::new(map.clone(), Frame::new(Chart::North, Chart::North), comps)
    }

    /// Estimates the growth exponent of each element at ∞ from its norm at
    /// `|ζ| = 10⁻³` and `10⁻⁴` on three rays, and keeps elements whose
    /// exponent exceeds [`REGULARITY_EXPONENT`].
    pub fn filter_regular(&mut self, map: &SphereMap, target: &ChartedSphere) {
        for k in 0..self.elements.len() {
            let field = self.field(map, k);
            let slot = self.elements[k].slot;
            let mut worst = f64::INFINITY;
            for theta in [0.3, 2.4, 4.4] {
                let norm = |r: f64| {
                    field
                        .slot_norms(target, Chart::South, C::from_polar(r, theta))
                        .map(|v| v[slot.index()])
                        .unwrap_or(f64::INFINITY)
                };
                let (a, b) = (norm(1e-3), norm(1e-4));
                let e = if a == 0.0 && b == 0.0 {
                    f64::INFINITY
                } else {
                    (b / a).ln() / 0.1f64.ln()
                };
                worst = worst.min(if e.is_nan() { f64::NEG_INFINITY } else { e });
            }
            self.exponents[k] = worst;
            self.regular[k] = worst > REGULARITY_EXPONENT;
        }
    }

    pub fn active(&self) -> Vec<usize> {
        (0..self.elements.len()).filter(|&k| self.regular[k]).collect()
    }
}

/// Columns are the Dirac images of the active elements, sampled at every
/// node in orthonormal coordinates and weighted by `√(node area)`; each
/// node contributes the real and imaginary parts of the four outputs.
pub fn assemble_dirac_matrix(
    space: &AnsatzSpace,
    domain: &ChartedSphere,
    target: &ChartedSphere,
    map: &SphereMap,
    grid: &SphereGrid,
) -> Result<DMatrix<f64>> {
    let active = space.active();
    let fields: Vec<_> = active.iter().map(|&k| space.field(map, k)).collect();
    let rows = 8 * grid.len();
    if fields.is_empty() {
        return Ok(DMatrix::zeros(rows, 0));
    }
    let blocks: Vec<Result<(Vec<f64>, Vec<f64>)>> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let g = LocalGeometry::natural(domain, target, map, node.chart, node.z)?;
            let w = node.weight.sqrt() * g.component_scale();
            let mut dirac = Vec::with_capacity(8 * fields.len());
            let mut sample = Vec::with_capacity(8 * fields.len());
            for f in &fields {
                let jets = f.jets(g.frame, node.z)?;
                let out = dirac_components(&g, &jets);
                for k in 0..4 {
                    dirac.extend([w * out[k].re, w * out[k].im]);
                    sample.extend([w * jets[k].value.re, w * jets[k].value.im]);
                }
            }
            Ok((dirac, sample))
        })
        .collect();
    let n = fields.len();
    let mut a = DMatrix::zeros(rows, n);
    let mut s = DMatrix::zeros(rows, n);
    for (i, b) in blocks.into_iter().enumerate() {
        let (d, v) = b?;
        for col in 0..n {
            for r in 0..8 {
                a[(8 * i + r, col)] = d[8 * col + r];
                s[(8 * i + r, col)] = v[8 * col + r];
            }
        }
    }
    let sv = s.singular_values();
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smin > BASIS_INDEPENDENCE) {
        return Err(Error::SingularBasis(smin));
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelReport {
    pub singular_values: Vec<f64>,
    pub dimension: usize,
    /// `None` when there is nothing to separate (empty or zero matrix).
    pub gap_ratio: Option<f64>,
}

/// Splits the singular values at the largest certified gap.
pub fn near_kernel(matrix: &DMatrix<f64>, gap: f64) -> Result<KernelReport> {
    let n = matrix.ncols();
    if n == 0 {
        return Ok(KernelReport {
            singular_values: Vec::new(),
            dimension: 0,
            gap_ratio: None,
        });
    }
    let mut sv: Vec<f64> = matrix.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    let smax = sv[0];
    if smax == 0.0 {
        return Ok(KernelReport {
            singular_values: sv,
            dimension: n,
            gap_ratio: None,
        });
    }
    let floor = f64::EPSILON * smax * matrix.nrows().max(n) as f64;
    // keep = number of retained singular values; the rest form the kernel
    let mut best = (0.0, 0);
    for keep in 1..=sv.len() {
        let below = if keep < sv.len() { sv[keep].max(floor) } else { floor };
        let ratio = sv[keep - 1] / below;
        if ratio > best.0 {
            best = (ratio, keep);
        }
    }
    if best.0 < gap {
        return Err(Error::NoSpectralGap {
            required: gap,
            best: best.0,
        });
    }
    Ok(KernelReport {
        singular_values: sv,
        dimension: n - best.1,
        gap_ratio: Some(best.0),
    })
}

/// Kernel report for `φ = z^d` between round spheres, slot `1+`, with the
/// monomial basis up to `2d` plus probe elements.
pub fn kernel_for_degree(degree: u32, grid_size: usize, gap: f64) -> Result<KernelReport> {
    let m = ChartedSphere::round();
    let grid = SphereGrid::new(&m, grid_size, grid_size)?;
    let map = SphereMap::rational(
        RationalFunction::monomial(C::new(1.0, 0.0), degree as i32),
        Orientation::Holomorphic,
    );
    let mut space = AnsatzSpace::monomials(&m, Slot::OnePlus, 2 * degree as usize, true);
    space.filter_regular(&map, &m);
    let a = assemble_dirac_matrix(&space, &m, &m, &map, &grid)?;
    near_kernel(&a, gap)
}

// ---------------------------------------------------------------------------
// joint residual

/// Parameters: `p0, p1, q1, ε` (complex) for
/// `w = (p0 + p1 z)/(1 + q1 z) + ε z̄`, then one complex coefficient per
/// ansatz element; complex entries are stored as consecutive real pairs.
pub const MAP_PARAMS: usize = 8;

struct NodeCache {
    geom: LocalGeometry,
    weight: f64,
    jets: Vec<[ComplexJet2; 4]>,
}

struct MapCache {
    key: Vec<f64>,
    nodes: Vec<NodeCache>,
}

pub struct SearchProblem {
    pub domain: ChartedSphere,
    pub target: ChartedSphere,
    pub grid: SphereGrid,
    pub space: AnsatzSpace,
    /// Which real parameters the descent may move.
    pub free: Vec<bool>,
    /// Element jets at each node in the north-target frame, which does not
    /// depend on the map.
    base: Vec<Vec<[ComplexJet2; 4]>>,
    cache: Mutex<Option<Arc<MapCache>>>,
}

/// Component jets after switching to the south target chart, where `w` is
/// the jet of the map in that chart.
fn retarget_jets(jets: &[ComplexJet2; 4], w: &ComplexJet2) -> [ComplexJet2; 4] {
    let one = -(*w * *w);
    let zero = one.conj();
    std::array::from_fn(|i| jets[i] * if Slot::ALL[i].is_type_one() { one } else { zero })
}

impl SearchProblem {
    pub fn new(domain: ChartedSphere, target: ChartedSphere, grid: SphereGrid, space: AnsatzSpace) -> Result<Self> {
        let n = MAP_PARAMS + 2 * space.elements.len();
        let id = SphereMap::identity();
        let fields: Vec<_> = (0..space.elements.len()).map(|k| space.field(&id, k)).collect();
        let base = grid
            .nodes()
            .par_iter()
            .map(|node| {
                fields
                    .iter()
                    .map(|f| f.jets(Frame::new(node.chart, Chart::North), node.z))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            target,
            grid,
            space,
            free: vec![true; n],
            base,
            cache: Mutex::new(None),
        })
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn fix_map(&mut self) {
        self.free[..MAP_PARAMS].iter_mut().for_each(|f| *f = false);
    }

    /// Freezes the `z̄` weight `ε` together with `p1`, so the weight cannot
    /// be diluted by rescaling the holomorphic part.
    pub fn fix_antiholomorphic_weight(&mut self) {
        for i in [2, 3, 6, 7] {
            self.free[i] = false;
        }
    }

    pub fn map_for(theta: &[f64]) -> Result<SphereMap> {
        let c = |k: usize| C::new(theta[2 * k], theta[2 * k + 1]);
        let (p0, p1, q1, eps) = (c(0), c(1), c(2), c(3));
        let rat = RationalFunction::new(vec![p0, p1], vec![C::new(1.0, 0.0), q1])?;
        let w = Expr::rational(rat) + Expr::var().conj() * eps;
        Ok(SphereMap::general(w))
    }

    fn check_box(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.len() {
            return Err(Error::Config(format!(
                "parameter vector has length {}, expected {}",
                theta.len(),
                self.len()
            )));
        }
        for (index, &value) in theta.iter().enumerate() {
            if !(value.abs() <= PARAMETER_BOX) {
                return Err(Error::ParameterOutOfBox { index, value });
            }
        }
        Ok(())
    }

    fn map_cache(&self, theta: &[f64]) -> Result<Arc<MapCache>> {
        let key = theta[..MAP_PARAMS].to_vec();
        if let Some(c) = self.cache.lock().expect("cache lock").as_ref() {
            if c.key == key {
                return Ok(c.clone());
            }
        }
        let map = Self::map_for(theta)?;
        let nodes: Vec<Result<NodeCache>> = self
            .grid
            .nodes()
            .par_iter()
            .zip(&self.base)
            .map(|(node, base)| {
                let geom = LocalGeometry::natural(&self.domain, &self.target, &map, node.chart, node.z)
                    .map_err(|e| Error::DegenerateMap(format!("node {}: {e}", node.index)))?;
                let jets = match geom.frame.target {
                    Chart::North => base.clone(),
                    Chart::South => base.iter().map(|j| retarget_jets(j, &geom.w)).collect(),
                };
                Ok(NodeCache {
                    geom,
                    weight: node.weight,
                    jets,
                })
            })
            .collect();
        let cache = Arc::new(MapCache {
            key,
            nodes: nodes.into_iter().collect::<Result<_>>()?,
        });
        *self.cache.lock().expect("cache lock") = Some(cache.clone());
        Ok(cache)
    }

    /// Weighted residual samples whose squared sum is the joint residual.
    pub fn residual_vector(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_box(theta)?;
        let cache = self.map_cache(theta)?;
        let coeffs: Vec<C> = (0..self.space.elements.len())
            .map(|k| C::new(theta[MAP_PARAMS + 2 * k], theta[MAP_PARAMS + 2 * k + 1]))
            .collect();
        let parts: Vec<[f64; 12]> = cache
            .nodes
            .par_iter()
            .map(|n| {
                let mut comps = [ComplexJet2::zero(); 4];
                for (a, jets) in coeffs.iter().zip(&n.jets) {
                    if *a == C::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..4 {
                        comps[k] += jets[k] * *a;
                    }
                }
                let g = &n.geom;
                let s = n.weight.sqrt() * g.component_scale();
                let out = dirac_components(g, &comps);
                let t = tension_coefficient(g);
                let v = coupling_vector(g, &comps.map(|j| j.value));
                let dw = t - v.dw;
                let dwbar = t.conj() - v.dwbar;
                let mut r = [0.0; 12];
                for k in 0..4 {
                    r[2 * k] = s * out[k].re;
                    r[2 * k + 1] = s * out[k].im;
                }
                r[8] = s * dw.re;
                r[9] = s * dw.im;
                r[10] = s * dwbar.re;
                r[11] = s * dwbar.im;
                r
            })
            .collect();
        let flat: Vec<f64> = parts.into_iter().flatten().collect();
        if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i / 12));
        }
        Ok(flat)
    }

    /// `∫ |D̸ψ|² + |τ(φ) − V|²`.
    pub fn joint_residual(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.residual_vector(theta)?.iter().map(|r| r * r).sum())
    }

    /// Central-difference Jacobian of the residual vector with respect to
    /// the free parameters.
    pub fn jacobian(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        let free: Vec<usize> = (0..self.len()).filter(|&i| self.free[i]).collect();
        let base = self.residual_vector(theta)?;
        let mut j = DMatrix::zeros(base.len(), free.len());
        let mut t = theta.to_vec();
        for (col, &i) in free.iter().enumerate() {
            let h = 1e-6 * theta[i].abs().max(1.0);
            // one-sided at the edge of the box
            let (up, down) = if theta[i] + h > PARAMETER_BOX {
                (0.0, h)
            } else if theta[i] - h < -PARAMETER_BOX {
                (h, 0.0)
            } else {
                (h, h)
            };
            let mut eval = |d: f64| -> Result<Vec<f64>> {
                if d == 0.0 {
                    return Ok(base.clone());
                }
                t[i] = theta[i] + d;
                let r = self.residual_vector(&t);
                t[i] = theta[i];
                r
            };
            let plus = eval(up)?;
            let minus = eval(-down)?;
            for r in 0..base.len() {
                j[(r, col)] = (plus[r] - minus[r]) / (up + down);
            }
        }
        Ok(j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub residual: f64,
    pub step_norm: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentResult {
    pub theta: Vec<f64>,
    pub residual: f64,
    pub initial_residual: f64,
    pub iterations: usize,
    pub accepted_steps: usize,
    pub converged: bool,
    pub budget_exhausted: bool,
    pub trace: Vec<TraceRow>,
}

/// Residual at which the descent stops.
pub const DESCENT_TOL: f64 = 1e-14;
const INITIAL_STEP: f64 = 1e-2;
const MIN_STEP: f64 = 1e-12;

/// Damped Gauss–Newton: the minimal-norm Gauss–Newton direction is scaled
/// by a step factor that starts at `1e-2`, doubles after an accepted step
/// (up to one) and halves after a rejected one.
pub fn descend(problem: &SearchProblem, theta0: &[f64], budget: usize) -> Result<DescentResult> {
    let mut theta = theta0.to_vec();
    let mut f = problem.joint_residual(&theta)?;
    if !f.is_finite() {
        return Err(Error::NonFiniteSample(0));
    }
    let initial = f;
    let free: Vec<usize> = (0..problem.len()).filter(|&i| problem.free[i]).collect();
    let mut alpha = INITIAL_STEP;
    let mut trace = Vec::new();
    let mut direction: Option<Vec<f64>> = None;
    let mut accepted_steps = 0;
    let mut iterations = 0;
    let mut converged = f <= DESCENT_TOL;
    while !converged && iterations < budget && alpha >= MIN_STEP {
        iterations += 1;
        if direction.is_none() {
            let j = problem.jacobian(&theta)?;
            let r = DVector::from_vec(problem.residual_vector(&theta)?);
            let svd = j.svd(true, true);
            let smax = svd.singular_values.max();
            let delta = svd
                .solve(&(-r), 1e-12 * smax.max(f64::MIN_POSITIVE))
                .map_err(|e| Error::Config(e.to_string()))?;
            let mut full = vec![0.0; problem.len()];
            for (k, &i) in free.iter().enumerate() {
                full[i] = delta[k];
            }
            direction = Some(full);
        }
        let d = direction.as_ref().expect("direction computed");
        let trial: Vec<f64> = theta.iter().zip(d).map(|(t, s)| t + alpha * s).collect();
        let step_norm = alpha * d.iter().map(|s| s * s).sum::<f64>().sqrt();
        let ft = match problem.joint_residual(&trial) {
            Ok(v) if v.is_finite() => v,
            Ok(_) | Err(Error::ParameterOutOfBox { .. }) | Err(Error::DegenerateMap(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let accepted = ft < f;
        if accepted {
            theta = trial;
            f = ft;
            accepted_steps += 1;
            alpha = (2.0 * alpha).min(1.0);
            direction = None;
            converged = f <= DESCENT_TOL;
        } else {
            alpha *= 0.5;
        }
        trace.push(TraceRow {
            iteration: iterations,
            residual: if accepted { ft } else { f },
            step_norm,
            accepted,
        });
    }
    Ok(DescentResult {
        theta,
        residual: f,
        initial_residual: initial,
        iterations,
        accepted_steps,
        converged,
        budget_exhausted: !converged && iterations >= budget,
        trace,
    })
}

/// Descent trace as CSV: `iteration, residual, step_norm, accepted`.
pub fn write_trace_csv<W: Write>(writer: W, trace: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in trace {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parameters of the golden pair `φ = z`, `c₁⁺ = −2λ^{-1/4}` in the
/// default joint ansatz.
pub fn golden_theta(space: &AnsatzSpace) -> Vec<f64> {
    let mut theta = vec![0.0; MAP_PARAMS + 2 * space.elements.len()];
    theta[2] = 1.0; // p1
    let k = space
        .elements
        .iter()
        .position(|e| e.slot == Slot::OnePlus && e.label.ends_with("z^0"))
        .expect("constant 1+ element");
    theta[MAP_PARAMS + 2 * k] = -2.0;
    theta
}
