//! Maps between the two charted spheres, in local coordinates.
//!
//! A map is stored as four closed-form local representatives `w(z)`, one per
//! (domain chart, target chart) pair. Antiholomorphic maps are the complex
//! conjugate of a rational function, flagged by [`Orientation`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::Chart;
use crate::rational::{RationalFunction, SpherePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "holo")]
    Holomorphic,
    #[serde(rename = "anti")]
    Antiholomorphic,
}

#[derive(Clone, Debug)]
enum MapKind {
    Rational {
        f: RationalFunction,
        orientation: Orientation,
        /// local rational representatives, `[domain][target]`
        locals: [[Option<RationalFunction>; 2]; 2],
    },
    General,
}

#[derive(Clone, Debug)]
pub struct SphereMap {
    kind: MapKind,
    exprs: [[Expr; 2]; 2],
}

fn reciprocal_expr(e: &Expr) -> Expr {
    Expr::real(1.0).div(e.clone())
}

impl SphereMap {
    /// `w = f(z)` (holomorphic) or `w = conj(f(z))` (antiholomorphic).
    pub fn rational(f: RationalFunction, orientation: Orientation) -> Self {
        let north = f.clone();
        let south = f.invert_argument();
        let recip = |g: &RationalFunction| g.reciprocal().ok();
        let locals = [
            [Some(north.clone()), recip(&north)],
            [Some(south.clone()), recip(&south)],
        ];
        let to_expr = |g: &Option<RationalFunction>, fallback: &RationalFunction| {
            let e = match g {
                Some(g) => Expr::rational(g.clone()),
                // reciprocal of the zero function: never selected, fails if evaluated
                None => reciprocal_expr(&Expr::rational(fallback.clone())),
            };
            match orientation {
                Orientation::Holomorphic => e,
                Orientation::Antiholomorphic => e.conj(),
            }
        };
        let exprs = [
            [to_expr(&locals[0][0], &north), to_expr(&locals[0][1], &north)],
            [to_expr(&locals[1][0], &south), to_expr(&locals[1][1], &south)],
        ];
        Self {
            kind: MapKind::Rational {
                f,
                orientation,
                locals,
            },
            exprs,
        }
    }

    pub fn identity() -> Self {
        Self::rational(RationalFunction::identity(), Orientation::Holomorphic)
    }

    pub fn constant(w0: Complex64) -> Self {
        Self::rational(RationalFunction::constant(w0), Orientation::Holomorphic)
    }

    /// A map given by an arbitrary expression `w(z, z̄)` in the north charts.
    pub fn general(w: Expr) -> Self {
        let inv = Expr::rational(RationalFunction::monomial(Complex64::new(1.0, 0.0), -1));
        let south = w.clone().compose(inv);
        let exprs = [
            [w.clone(), reciprocal_expr(&w)],
            [south.clone(), reciprocal_expr(&south)],
        ];
        Self {
            kind: MapKind::General,
            exprs,
        }
    }

    /// Local representative in the given charts.
    pub fn local(&self, chart: Chart, target: Chart) -> &Expr {
        &self.exprs[chart.index()][target.index()]
    }

    /// Local rational representative (before any conjugation).
    pub fn local_rational(&self, chart: Chart, target: Chart) -> Option<&RationalFunction> {
        match &self.kind {
            MapKind::Rational { locals, .. } => locals[chart.index()][target.index()].as_ref(),
            MapKind::General => None,
        }
    }

    pub fn rational_data(&self) -> Option<(&RationalFunction, Orientation)> {
        match &self.kind {
            MapKind::Rational { f, orientation, .. } => Some((f, *orientation)),
            MapKind::General => None,
        }
    }

    pub fn orientation(&self) -> Option<Orientation> {
        self.rational_data().map(|(_, o)| o)
    }

    pub fn is_constant(&self) -> bool {
        matches!(&self.kind, MapKind::Rational { f, .. } if f.is_constant())
    }

    /// Degree signed by orientation; `None` for general maps.
    pub fn degree(&self) -> Option<i32> {
        self.rational_data().map(|(f, o)| {
            let d = f.map_degree() as i32;
            match o {
                Orientation::Holomorphic => d,
                Orientation::Antiholomorphic => -d,
            }
        })
    }

    /// Target chart in which `w(z)` has modulus at most one.
    pub fn choose_target(&self, chart: Chart, z: Complex64) -> Chart {
        match self.local(chart, Chart::North).value(z) {
            Ok(w) if w.norm() <= 1.0 => Chart::North,
            _ => Chart::South,
        }
    }

    /// Vanishing order of `|dφ|` at a point (zero for regular points).
    pub fn branch_order(&self, p: SpherePoint) -> Result<u32> {
        let (chart, z0) = match p {
            SpherePoint::Finite(z) => (Chart::North, z),
            SpherePoint::Infinity => (Chart::South, Complex64::new(0.0, 0.0)),
        };
        if self.is_constant() {
            return Err(Error::ConstantMap);
        }
        let pick = |target: Chart| self.local_rational(chart, target);
        let north = pick(Chart::North).ok_or_else(|| {
            Error::DegenerateMap("branch order needs a rational map".into())
        })?;
        let local = if north.eval(z0).is_ok() {
            north
        } else {
            pick(Chart::South).ok_or(Error::ConstantMap)?
        };
        let order = local.derivative().zero_pole_order(SpherePoint::Finite(z0))?;
        Ok(order.max(0) as u32)
    }
}
