//! The 2-sphere as two stereographic charts `z` and `z̃ = 1/z` carrying a
//! conformal metric `λ|dz|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::{poly_degree, poly_trim, RationalFunction};

/// Chart of the sphere: `North` uses `z`, `South` uses `z̃ = 1/z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    North,
    South,
}

impl Chart {
    pub const BOTH: [Chart; 2] = [Chart::North, Chart::South];

    pub fn index(self) -> usize {
        match self {
            Chart::North => 0,
            Chart::South => 1,
        }
    }

    pub fn other(self) -> Chart {
        match self {
            Chart::North => Chart::South,
            Chart::South => Chart::North,
        }
    }

    pub fn from_index(i: usize) -> Chart {
        if i == 0 {
            Chart::North
        } else {
            Chart::South
        }
    }
}

/// `z ↦ 1/z`. Involutive.
pub fn transition_point(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::OriginHasNoImage);
    }
    Ok(z.inv())
}

/// Metric input: the round family `4c/(c+|z|²)²` or a quotient
/// `P(|z|²)/Q(|z|²)` of polynomials in `s = |z|²` (ascending coefficients).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricSpec {
    Round {
        c: f64,
    },
    Conformal {
        lambda_num: Vec<[f64; 2]>,
        lambda_den: Vec<[f64; 2]>,
    },
}

impl MetricSpec {
    pub fn round() -> Self {
        MetricSpec::Round { c: 1.0 }
    }
}

/// A conformal metric on the sphere, one closed-form factor per chart.
#[derive(Clone, Debug)]
pub struct ChartedSphere {
    factors: [Expr; 2],
    limit_constant: f64,
    global: bool,
}

impl ChartedSphere {
    pub fn round() -> Self {
        Self::from_spec(&MetricSpec::round()).expect("round metric is valid")
    }

    pub fn from_spec(spec: &MetricSpec) -> Result<Self> {
        let (p, q) = match spec {
            MetricSpec::Round { c } => {
                if !(*c > 0.0) || !c.is_finite() {
                    return Err(Error::Config(format!("round metric needs c > 0, got {c}")));
                }
                (
                    vec![Complex64::new(4.0 * c, 0.0)],
                    vec![(c * c).into(), (2.0 * c).into(), 1.0.into()],
                )
            }
            MetricSpec::Conformal {
                lambda_num,
                lambda_den,
            } => (
                lambda_num.iter().map(|[a, b]| Complex64::new(*a, *b)).collect(),
                lambda_den.iter().map(|[a, b]| Complex64::new(*a, *b)).collect(),
            ),
        };
        Self::from_polynomials_in_abs_sq(p, q)
    }

    /// `λ = P(s)/Q(s)` with `s = |z|²`; requires `deg Q = deg P + 2` so that
    /// `λ|z|⁴` tends to a positive constant at ∞.
    pub fn from_polynomials_in_abs_sq(p: Vec<Complex64>, q: Vec<Complex64>) -> Result<Self> {
        let p = poly_trim(p);
        let q = poly_trim(q);
        let (Some(dp), Some(dq)) = (poly_degree(&p), poly_degree(&q)) else {
            return Err(Error::IncompatibleMetric("zero numerator or denominator".into()));
        };
        if dq != dp + 2 {
            return Err(Error::IncompatibleMetric(format!(
                "need deg(den) = deg(num) + 2, got {dq} and {dp}"
            )));
        }
        let limit = p[dp] / q[dq];
        if limit.re <= 0.0 || limit.im.abs() > 1e-12 * limit.re {
            return Err(Error::IncompatibleMetric(format!(
                "lambda |z|^4 tends to {limit}, not a positive constant"
            )));
        }
        let north = RationalFunction::new(p.clone(), q.clone())?;
        // λ̃(z̃) = λ(1/z̃)|z̃|⁻⁴ = s̃^{n−2}P(1/s̃) / s̃^{n}Q(1/s̃)
        let mut pr = p.clone();
        pr.resize(dq - 1, Complex64::new(0.0, 0.0));
        pr.reverse();
        let mut qr = q.clone();
        qr.reverse();
        let south = RationalFunction::new(pr, qr)?;
        let sphere = Self {
            factors: [
                Expr::rational_of(north, Expr::abs_sq_var()),
                Expr::rational_of(south, Expr::abs_sq_var()),
            ],
            limit_constant: limit.re,
            global: true,
        };
        sphere.check_positive()?;
        Ok(sphere)
    }

    /// A factor valid on a single chart only (both chart slots share it).
    /// Used for local checks such as flat factors.
    pub fn single_chart(factor: Expr) -> Self {
        Self {
            factors: [factor.clone(), factor],
            limit_constant: f64::NAN,
            global: false,
        }
    }

    pub fn is_global(&self) -> bool {
        self.global
    }

    /// `c = lim λ(z)|z|⁴`.
    pub fn limit_constant(&self) -> f64 {
        self.limit_constant
    }

    pub fn factor(&self, chart: Chart) -> &Expr {
        &self.factors[chart.index()]
    }

    /// Rejects factors that are not positive on the closed unit disk of
    /// either chart (checked on a polar sample).
    fn check_positive(&self) -> Result<()> {
        for chart in Chart::BOTH {
            for i in 0..=32 {
                let r = i as f64 / 32.0;
                for j in 0..16 {
                    let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 16.0);
                    self.lambda(chart, z)?;
                }
            }
        }
        Ok(())
    }

    pub fn lambda(&self, chart: Chart, z: Complex64) -> Result<f64> {
        let v = self.factor(chart).value(z).map_err(|_| Error::NonPositiveMetric(z))?;
        if !(v.re > 0.0) || v.im.abs() > 1e-9 * v.re || !v.re.is_finite() {
            return Err(Error::NonPositiveMetric(z));
        }
        Ok(v.re)
    }

    /// `K = −(2/λ) ∂_z∂_z̄ log λ`.
    pub fn gauss_curvature(&self, chart: Chart, z: Complex64) -> Result<f64> {
        let lam = self.lambda(chart, z)?;
        let log = self
            .factor(chart)
            .clone()
            .ln()
            .jet(z)
            .map_err(|_| Error::NonPositiveMetric(z))?;
        Ok(-2.0 / lam * log.d_zzbar.re)
    }
}

/// One quadrature node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridNode {
    pub index: usize,
    pub chart: Chart,
    pub z: Complex64,
    /// `r Δr Δθ · λ(z)`: the metric area carried by the node.
    pub weight: f64,
}

/// Polar midpoint nodes filling the closed unit disk of each chart.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub n_radial: usize,
    pub n_angular: usize,
    nodes: Vec<GridNode>,
}

impl SphereGrid {
    pub fn new(sphere: &ChartedSphere, n_radial: usize, n_angular: usize) -> Result<Self> {
        if n_radial == 0 || n_angular == 0 {
            return Err(Error::Config("grid dimensions must be positive".into()));
        }
        let dr = 1.0 / n_radial as f64;
        let dt = 2.0 * PI / n_angular as f64;
        let mut nodes = Vec::with_capacity(2 * n_radial * n_angular);
        for chart in Chart::BOTH {
            for i in 0..n_radial {
                let r = (i as f64 + 0.5) * dr;
                for j in 0..n_angular {
                    // stagger the south chart by half a cell so the two node sets differ
                    let shift = if chart == Chart::South { 0.5 } else { 0.0 };
                    let t = (j as f64 + 0.5 + shift) * dt;
                    let z = Complex64::from_polar(r, t);
                    let lam = sphere.lambda(chart, z)?;
                    nodes.push(GridNode {
                        index: nodes.len(),
                        chart,
                        z,
                        weight: r * dr * dt * lam,
                    });
                }
            }
        }
        Ok(Self {
            n_radial,
            n_angular,
            nodes,
        })
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spacing between neighbouring rings.
    pub fn radial_step(&self) -> f64 {
        1.0 / self.n_radial as f64
    }

    /// Polar grid indices `(ring, spoke)` of a node within its chart.
    pub fn polar_index(&self, node: &GridNode) -> (usize, usize) {
        let local = node.index % (self.n_radial * self.n_angular);
        (local / self.n_angular, local % self.n_angular)
    }

    pub fn node_at(&self, chart: Chart, ring: usize, spoke: usize) -> &GridNode {
        &self.nodes[chart.index() * self.n_radial * self.n_angular + ring * self.n_angular + spoke]
    }

    /// Area-weighted sum of `integrand` over both charts.
    pub fn integrate<F>(&self, integrand: F) -> Result<f64>
    where
        F: Fn(&GridNode) -> Result<f64> + Sync,
    {
        let samples: Vec<Result<f64>> = self
            .nodes
            .par_iter()
            .map(|n| {
                let v = integrand(n)?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample(n.index));
                }
                Ok(v * n.weight)
            })
            .collect();
        let mut total = 0.0;
        for s in samples {
            total += s?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn round_curvature_is_one() {
        let s = ChartedSphere::round();
        for z in [c(0.0, 0.0), c(0.3, -0.2), c(0.9, 0.4)] {
            for chart in Chart::BOTH {
                assert!((s.gauss_curvature(chart, z).unwrap() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn round_family_with_c_two() {
        // oracle: λ = 4c/(c+s)², ∂∂̄ log λ = −2c/(c+s)², K = (2(c+s)²/4c)(2c/(c+s)²) = 1
        let s = ChartedSphere::from_spec(&MetricSpec::Round { c: 2.0 }).unwrap();
        assert!((s.gauss_curvature(Chart::North, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-13);
        assert!((s.lambda(Chart::North, c(0.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((s.limit_constant() - 8.0).abs() < 1e-15);
    }

    #[test]
    fn flat_factor_has_zero_curvature() {
        let s = ChartedSphere::single_chart(Expr::real(4.0));
        assert_eq!(s.gauss_curvature(Chart::North, c(0.2, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn chart_compatibility() {
        let s = ChartedSphere::from_spec(&MetricSpec::Conformal {
            lambda_num: vec![[3.0, 0.0], [1.0, 0.0]],
            lambda_den: vec![[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [1.0, 0.0]],
        })
        .unwrap();
        for z in [c(0.8, 0.3), c(-1.2, 0.5), c(0.1, -1.6)] {
            let zt = transition_point(z).unwrap();
            let a = s.lambda(Chart::North, z).unwrap() * z.norm_sqr().powi(2);
            let b = s.lambda(Chart::South, zt).unwrap();
            assert!((a - b).abs() <= 1e-10 * b);
            let k0 = s.gauss_curvature(Chart::North, z).unwrap();
            let k1 = s.gauss_curvature(Chart::South, zt).unwrap();
            assert!((k0 - k1).abs() <= 1e-9 * k0.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_metrics() {
        // vanishes on |z| = 1/2
        let bad = MetricSpec::Conformal {
            lambda_num: vec![[-0.25, 0.0], [1.0, 0.0]],
            lambda_den: vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
        };
        assert!(matches!(ChartedSphere::from_spec(&bad), Err(Error::NonPositiveMetric(_))));
        let wrong_decay = MetricSpec::Conformal {
            lambda_num: vec![[1.0, 0.0]],
            lambda_den: vec![[1.0, 0.0], [1.0, 0.0]],
        };
        assert!(matches!(
            ChartedSphere::from_spec(&wrong_decay),
            Err(Error::IncompatibleMetric(_))
        ));
        assert!(ChartedSphere::from_spec(&MetricSpec::Round { c: -1.0 }).is_err());
    }

    #[test]
    fn transition() {
        assert_eq!(transition_point(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert_eq!(transition_point(c(0.0, 1.0)).unwrap(), c(0.0, -1.0));
        let z = c(1.0, 1.0);
        let back = transition_point(transition_point(z).unwrap()).unwrap();
        assert!((back - z).norm() < 1e-15);
        assert!(matches!(transition_point(c(0.0, 0.0)), Err(Error::OriginHasNoImage)));
    }

    #[test]
    fn area_and_convergence() {
        let s = ChartedSphere::round();
        let area = |n| SphereGrid::new(&s, n, n).unwrap().integrate(|_| Ok(1.0)).unwrap();
        let a32 = area(32);
        let a64 = area(64);
        assert!((a64 - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
        let e32 = (a32 - 4.0 * PI).abs();
        let e64 = (a64 - 4.0 * PI).abs();
        assert!(e32 / e64 >= 3.0, "ratio {}", e32 / e64);
        let zero = SphereGrid::new(&s, 16, 16).unwrap().integrate(|_| Ok(0.0)).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn nonfinite_sample_is_reported() {
        let s = ChartedSphere::round();
        let g = SphereGrid::new(&s, 8, 8).unwrap();
        let r = g.integrate(|n| Ok(if n.index == 5 { f64::NAN } else { 1.0 }));
        assert!(matches!(r, Err(Error::NonFiniteSample(5))));
    }

    #[test]
    fn metric_json() {
        let m: MetricSpec = serde_json::from_str(r#"{"type":"round","c":1.0}"#).unwrap();
        assert_eq!(m, MetricSpec::round());
        assert!(serde_json::from_str::<MetricSpec>(r#"{"type":"round","c":1.0,"x":2}"#).is_err());
    }
}
