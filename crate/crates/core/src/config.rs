//! Run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartedSphere, MetricSpec, SphereGrid};
use crate::map::{Orientation, SphereMap};
use crate::rational::RationalFunction;
use crate::spinor::Slot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub orientation: Orientation,
    pub rational: RationalFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_radial: usize,
    pub n_angular: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative Dirac residual and absolute map-equation residual.
    pub dirac: f64,
    pub bochner: f64,
    /// Relative error allowed for quadrature identities such as energies.
    pub quadrature: f64,
}

/// Adds `amplitude · λ^{-1/4} z̄` to one slot of the constructed field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    #[serde(default = "default_slot")]
    pub slot: Slot,
    pub amplitude: f64,
}

fn default_slot() -> Slot {
    Slot::OnePlus
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    /// Fixed weight `ε` of the `z̄` term; zero starts from the holomorphic family.
    #[serde(default)]
    pub antiholomorphic_weight: f64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Size of the random spinor perturbation of the starting point.
    #[serde(default = "default_spinor_noise")]
    pub spinor_noise: f64,
}

fn default_budget() -> usize {
    500
}

fn default_spinor_noise() -> f64 {
    1e-3
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            antiholomorphic_weight: 0.0,
            budget: default_budget(),
            spinor_noise: default_spinor_noise(),
        }
    }
}

fn zero_rational() -> RationalFunction {
    RationalFunction::zero()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "metric_M")]
    pub metric_m: MetricSpec,
    #[serde(rename = "metric_N")]
    pub metric_n: MetricSpec,
    pub map: MapSpec,
    #[serde(default = "zero_rational")]
    pub u1: RationalFunction,
    #[serde(default = "zero_rational")]
    pub u2: RationalFunction,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpec>,
}

pub const MIN_GRID: usize = 8;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [("dirac", t.dirac), ("bochner", t.bochner), ("quadrature", t.quadrature)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.grid.n_radial < MIN_GRID || self.grid.n_angular < MIN_GRID {
            return Err(Error::Config(format!(
                "grid sizes must be at least {MIN_GRID}, got {}x{}",
                self.grid.n_radial, self.grid.n_angular
            )));
        }
        if let Some(p) = &self.perturbation {
            if !p.amplitude.is_finite() {
                return Err(Error::Config("perturbation amplitude must be finite".into()));
            }
        }
        if let Some(s) = &self.search {
            if !(s.antiholomorphic_weight.is_finite() && s.spinor_noise.is_finite() && s.spinor_noise >= 0.0) {
                return Err(Error::Config("search parameters must be finite".into()));
            }
        }
        Ok(())
    }

    /// Sets both grid dimensions to `n`.
    pub fn override_grid(&mut self, n: usize) -> Result<()> {
        self.grid = GridSpec {
            n_radial: n,
            n_angular: n,
        };
        self.validate()
    }

    pub fn domain(&self) -> Result<ChartedSphere> {
        ChartedSphere::from_spec(&self.metric_m)
    }

    pub fn target(&self) -> Result<ChartedSphere> {
        ChartedSphere::from_spec(&self.metric_n)
    }

    pub fn sphere_map(&self) -> SphereMap {
        SphereMap::rational(self.map.rational.clone(), self.map.orientation)
    }

    pub fn sphere_grid(&self, domain: &ChartedSphere) -> Result<SphereGrid> {
        SphereGrid::new(domain, self.grid.n_radial, self.grid.n_angular)
    }

    /// Round spheres, `φ = z^degree`, `u₁ = 0`, `u₂ = 1`.
    pub fn golden(degree: i32) -> Self {
        Self {
            metric_m: MetricSpec::round(),
            metric_n: MetricSpec::round(),
            map: MapSpec {
                orientation: Orientation::Holomorphic,
                rational: RationalFunction::monomial(num_complex::Complex64::new(1.0, 0.0), degree),
            },
            u1: RationalFunction::zero(),
            u2: RationalFunction::monomial(num_complex::Complex64::new(1.0, 0.0), 0),
            grid: GridSpec {
                n_radial: 64,
                n_angular: 64,
            },
            tolerances: Tolerances {
                dirac: 1e-9,
                bochner: 1e-3,
                quadrature: 1e-2,
            },
            seed: 0,
            perturbation: None,
            search: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"{
        "metric_M": {"type": "round", "c": 1.0},
        "metric_N": {"type": "round", "c": 1.0},
        "map": {"orientation": "holo", "rational": {"num": [[0,0],[1,0]], "den": [[1,0]]}},
        "u1": {"num": [[0,0]], "den": [[1,0]]},
        "u2": {"num": [[1,0]], "den": [[1,0]]},
        "grid": {"n_radial": 64, "n_angular": 64},
        "tolerances": {"dirac": 1e-9, "bochner": 1e-3, "quadrature": 1e-2},
        "seed": 7
    }"#;

    #[test]
    fn parses_golden() {
        let cfg = RunConfig::from_json(GOLDEN).unwrap();
        assert_eq!(cfg.seed, 7);
        let mut expected = RunConfig::golden(1);
        expected.seed = 7;
        assert_eq!(cfg, expected);
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = GOLDEN.replace("\"seed\": 7", "\"seed\": 7, \"colour\": 1");
        assert!(matches!(RunConfig::from_json(&unknown), Err(Error::Json(_))));
        let small = GOLDEN.replace("\"n_radial\": 64", "\"n_radial\": 4");
        assert!(matches!(RunConfig::from_json(&small), Err(Error::Config(_))));
        let neg = GOLDEN.replace("\"bochner\": 1e-3", "\"bochner\": -1");
        assert!(matches!(RunConfig::from_json(&neg), Err(Error::Config(_))));
        assert!(RunConfig::from_json(&GOLDEN[..40]).is_err());
    }

    #[test]
    fn grid_override() {
        let mut cfg = RunConfig::golden(1);
        cfg.override_grid(20).unwrap();
        assert_eq!(cfg.grid, GridSpec { n_radial: 20, n_angular: 20 });
        assert!(cfg.override_grid(3).is_err());
    }
}
