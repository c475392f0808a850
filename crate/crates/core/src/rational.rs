//! Complex polynomials and rational functions on the Riemann sphere.
//!
//! Coefficients are stored in ascending degree order. A [`RationalFunction`]
//! is kept reduced (no shared roots between numerator and denominator) with
//! a monic denominator.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jet::ComplexJet2;

/// Two roots are considered the same when closer than this (relative to
/// `max(1, |r|)`). Used when cancelling common factors.
pub const ROOT_MATCH_TOL: f64 = 1e-9;

/// Radius used to group numerically split copies of a multiple root.
/// Companion eigenvalues of an `m`-fold root scatter by roughly `ε^{1/m}`.
pub const ROOT_CLUSTER_TOL: f64 = 1e-6;

/// Relative size below which a Taylor coefficient counts as zero.
const ORDER_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of `ℂ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

// ---------------------------------------------------------------------------
// polynomial helpers

fn max_abs(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Drops negligible leading coefficients.
pub fn poly_trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
    let scale = max_abs(&p);
    while let Some(last) = p.last() {
        if last.norm() <= 1e-13 * scale || *last == ZERO {
            p.pop();
        } else {
            break;
        }
    }
    p
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub fn poly_degree(p: &[Complex64]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

/// `p(x)`, `p'(x)`, `p''(x)` by a three-row Horner scheme.
pub fn poly_eval_derivs(p: &[Complex64], x: Complex64) -> (Complex64, Complex64, Complex64) {
    let mut v = ZERO;
    let mut d1 = ZERO;
    let mut d2 = ZERO;
    for &c in p.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + c;
    }
    (v, d1, d2)
}

pub fn poly_eval(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
}

/// `Σ |c_k| |x|^k`, the natural scale for judging `|p(x)|` small.
fn poly_abs_scale(p: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(ZERO) + b.get(i).copied().unwrap_or(ZERO))
        .collect()
}

pub fn poly_derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Coefficients of `z^n p(1/z)`, with `p` padded to length `n + 1`.
fn poly_reverse(p: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut padded = p.to_vec();
    padded.resize(n + 1, ZERO);
    padded.reverse();
    padded
}

/// Synthetic division by `(z − r)`, remainder discarded.
fn poly_deflate(p: &[Complex64], r: Complex64) -> Vec<Complex64> {
    let n = p.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut q = vec![ZERO; n - 1];
    let mut acc = ZERO;
    for k in (1..n).rev() {
        acc = acc * r + p[k];
        q[k - 1] = acc;
    }
    q
}

/// Taylor coefficients of `p` about `x0`, i.e. `p(x0 + t)` in powers of `t`.
fn poly_taylor_shift(p: &[Complex64], x0: Complex64) -> Vec<Complex64> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            let next = c[k + 1];
            c[k] += x0 * next;
        }
    }
    c
}

/// Multiplicity of `x0` as a root of `p`.
fn poly_order_at(p: &[Complex64], x0: Complex64) -> usize {
    let t = poly_taylor_shift(p, x0);
    let scale = max_abs(&t);
    t.iter()
        .take_while(|c| c.norm() <= ORDER_TOL * scale)
        .count()
}

/// Roots as eigenvalues of the companion matrix of the monic polynomial.
pub fn poly_roots(p: &[Complex64]) -> Vec<Complex64> {
    let p = poly_trim(p.to_vec());
    let Some(n) = poly_degree(&p) else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    // exact roots at the origin first; they are common and deserve to stay exact
    let zeros_at_origin = p.iter().take_while(|c| **c == ZERO).count();
    let rest = &p[zeros_at_origin..];
    let m = rest.len() - 1;
    let mut roots = vec![ZERO; zeros_at_origin];
    if m == 0 {
        return roots;
    }
    let lead = rest[m];
    let mut comp = DMatrix::<Complex64>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..m {
        comp[(i, m - 1)] = -rest[i] / lead;
    }
    if m == 1 {
        roots.push(comp[(0, 0)]);
        return roots;
    }
    let eig = comp
        .clone()
        .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
        .and_then(|s| s.eigenvalues())
        .map(|v| v.iter().copied().collect::<Vec<_>>())
        .unwrap_or_else(|| aberth_roots(rest));
    roots.extend(eig);
    roots
}

const SCHUR_MAX_ITER: usize = 2000;

/// Simultaneous Aberth–Ehrlich iteration; used when the Schur iteration of
/// the companion matrix stalls, which can happen for repeated roots.
fn aberth_roots(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let dp = poly_derivative(p);
    // starting points on a circle of Cauchy-bound radius
    let lead = p[n].norm();
    let radius = 1.0 + p[..n].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let f = poly_eval(p, z[i]);
            if f == ZERO {
                continue;
            }
            let ratio = f / poly_eval(&dp, z[i]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// Groups roots closer than [`ROOT_CLUSTER_TOL`] into `(centroid, multiplicity)`.
pub fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        let tol = ROOT_CLUSTER_TOL * r.norm().max(1.0);
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - r).norm() <= tol)
        {
            Some((c, members)) => {
                members.push(r);
                *c = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((r, vec![r])),
        }
    }
    clusters
        .into_iter()
        .map(|(c, m)| (c, m.len()))
        .collect()
}

// ---------------------------------------------------------------------------

/// Reduced ratio of complex polynomials with a monic denominator.
#[derive(Clone, PartialEq)]
pub struct RationalFunction {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
}

impl RationalFunction {
    /// Builds `num/den`, cancelling shared roots and normalising the
    /// leading denominator coefficient to one.
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let mut num = poly_trim(num);
        let mut den = poly_trim(den);
        if den.is_empty() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_empty() {
            return Ok(Self::zero());
        }
        if den.len() > 1 && num.len() > 1 {
            let num_roots = cluster_roots(&poly_roots(&num));
            let den_roots = cluster_roots(&poly_roots(&den));
            for &(rn, mn) in &num_roots {
                let tol = ROOT_MATCH_TOL * rn.norm().max(1.0);
                if let Some(&(rd, md)) = den_roots.iter().find(|(rd, _)| (*rd - rn).norm() <= tol) {
                    let r = if rn == ZERO || rd == ZERO { ZERO } else { 0.5 * (rn + rd) };
                    for _ in 0..mn.min(md) {
                        num = poly_deflate(&num, r);
                        den = poly_deflate(&den, r);
                    }
                }
            }
            num = poly_trim(num);
            den = poly_trim(den);
        }
        let lead = *den.last().expect("non-empty denominator");
        num.iter_mut().for_each(|c| *c /= lead);
        den.iter_mut().for_each(|c| *c /= lead);
        Ok(Self { num, den })
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs, vec![ONE]).expect("unit denominator")
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn zero() -> Self {
        Self {
            num: Vec::new(),
            den: vec![ONE],
        }
    }

    /// `c · z^k` for any integer `k`.
    pub fn monomial(c: Complex64, k: i32) -> Self {
        let mut p = vec![ZERO; k.unsigned_abs() as usize + 1];
        let last = p.len() - 1;
        if k >= 0 {
            p[last] = c;
            Self::polynomial(p)
        } else {
            p[last] = ONE;
            Self::new(vec![c], p).expect("monomial denominator")
        }
    }

    pub fn identity() -> Self {
        Self::monomial(ONE, 1)
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.num
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.num.len() <= 1 && self.den.len() == 1
    }

    /// `deg(den) − deg(num)`: the zero order at ∞ (negative means a pole).
    pub fn degree_at_infinity(&self) -> Result<i32> {
        if self.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        Ok(self.den.len() as i32 - self.num.len() as i32)
    }

    /// Algebraic degree of the induced map of the sphere.
    pub fn map_degree(&self) -> usize {
        if self.is_constant() {
            0
        } else {
            (self.num.len().max(self.den.len())) - 1
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_derivs(z)?.0)
    }

    /// `f(z)`, `f'(z)`, `f''(z)`.
    pub fn eval_derivs(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let (p, p1, p2) = poly_eval_derivs(&self.num, z);
        let (q, q1, q2) = poly_eval_derivs(&self.den, z);
        if q.norm() <= 1e-14 * poly_abs_scale(&self.den, z) || !q.is_finite() {
            return Err(Error::PoleAt(z));
        }
        let qi = q.inv();
        let f = p * qi;
        let w = p1 * q - p * q1;
        let f1 = w * qi * qi;
        let f2 = (p2 * q - p * q2) * qi * qi - 2.0 * q1 * w * qi * qi * qi;
        Ok((f, f1, f2))
    }

    /// Applies `f` to the jet `arg`, i.e. the jet of `f ∘ g`.
    pub fn apply(&self, arg: &ComplexJet2) -> Result<ComplexJet2> {
        let (f0, f1, f2) = self.eval_derivs(arg.value)?;
        Ok(arg.compose_holomorphic(f0, f1, f2))
    }

    /// Exact value and Wirtinger derivatives of `f` at `z`. The `z̄`
    /// derivatives vanish since `f` is holomorphic.
    pub fn jet_eval(&self, z: Complex64) -> Result<ComplexJet2> {
        self.apply(&ComplexJet2::variable(z))
    }

    /// Signed order at `p`: positive for a zero, negative for a pole.
    pub fn zero_pole_order(&self, p: SpherePoint) -> Result<i32> {
        if self.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        match p {
            SpherePoint::Infinity => self.degree_at_infinity(),
            SpherePoint::Finite(z0) => {
                Ok(poly_order_at(&self.num, z0) as i32 - poly_order_at(&self.den, z0) as i32)
            }
        }
    }

    /// Finite poles with their orders.
    pub fn poles(&self) -> Vec<(Complex64, u32)> {
        cluster_roots(&poly_roots(&self.den))
            .into_iter()
            .map(|(r, m)| (r, m as u32))
            .collect()
    }

    /// Finite zeros with their orders.
    pub fn zeros(&self) -> Vec<(Complex64, u32)> {
        cluster_roots(&poly_roots(&self.num))
            .into_iter()
            .map(|(r, m)| (r, m as u32))
            .collect()
    }

    pub fn derivative(&self) -> Self {
        // (p/q)' = (p'q − pq')/q²
        let p1q = poly_mul(&poly_derivative(&self.num), &self.den);
        let pq1 = poly_mul(&self.num, &poly_derivative(&self.den));
        let neg: Vec<_> = pq1.iter().map(|c| -c).collect();
        Self::new(poly_add(&p1q, &neg), poly_mul(&self.den, &self.den))
            .expect("square of a nonzero denominator")
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(poly_mul(&self.num, &other.num), poly_mul(&self.den, &other.den))
            .expect("product of nonzero denominators")
    }

    pub fn add(&self, other: &Self) -> Self {
        let a = poly_mul(&self.num, &other.den);
        let b = poly_mul(&other.num, &self.den);
        Self::new(poly_add(&a, &b), poly_mul(&self.den, &other.den))
            .expect("product of nonzero denominators")
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.num.iter().map(|x| x * c).collect(), self.den.clone())
            .expect("denominator unchanged")
    }

    /// `1/f`.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `f(1/z)` as a rational function of `z`.
    pub fn invert_argument(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.num.len().max(self.den.len()) - 1;
        Self::new(poly_reverse(&self.num, n), poly_reverse(&self.den, n))
            .expect("reversed nonzero denominator")
    }

    /// The representative of `f` in the chart `z̃ = 1/z`, as seen by the
    /// coefficient of a twistor spinor: `z̃ ↦ −i z̃ f(1/z̃)`.
    pub fn twistor_chart_transform(&self) -> Self {
        self.invert_argument()
            .mul(&Self::monomial(-Complex64::i(), 1))
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction {{ num: {:?}, den: {:?} }}", self.num, self.den)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalRepr {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
}

fn to_pairs(p: &[Complex64]) -> Vec<[f64; 2]> {
    p.iter().map(|c| [c.re, c.im]).collect()
}

fn from_pairs(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: to_pairs(&self.num),
            den: to_pairs(&self.den),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        RationalFunction::new(from_pairs(&r.num), from_pairs(&r.den))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    #[test]
    fn repeated_roots_cancel() {
        let a = c(0.2, 0.1);
        let sq = poly_mul(&[a, ONE], &[a, ONE]);
        let f = RationalFunction::new(poly_mul(&sq, &[-ONE, ONE]), poly_mul(&sq, &[c(2.0, 0.0), ONE])).unwrap();
        assert_eq!(f.denominator().len(), 2);
        assert!((f.eval(c(0.5, 0.5)).unwrap() - (c(-0.5, 0.5) / c(2.5, 0.5))).norm() < 1e-12);
        let roots = aberth_roots(&poly_mul(&sq, &[-ONE, ONE]));
        let clusters = cluster_roots(&roots);
        assert!(clusters.iter().any(|(r, m)| *m == 2 && (*r + a).norm() < 1e-6));
    }

    #[test]
    fn square_at_one() {
        let f = RationalFunction::monomial(ONE, 2);
        let j = f.jet_eval(r(1.0)).unwrap();
        assert_eq!(j.value, r(1.0));
        assert_eq!(j.d_z, r(2.0));
        assert_eq!(j.d_zz, r(2.0));
        assert_eq!(j.d_zbar, ZERO);
        assert_eq!(j.d_zzbar, ZERO);
        assert_eq!(j.d_zbarzbar, ZERO);
    }

    #[test]
    fn reciprocal_at_two() {
        let f = RationalFunction::monomial(ONE, -1);
        let j = f.jet_eval(r(2.0)).unwrap();
        assert!((j.value - r(0.5)).norm() < 1e-15);
        assert!((j.d_z - r(-0.25)).norm() < 1e-15);
        assert!((j.d_zz - r(0.25)).norm() < 1e-15);
    }

    #[test]
    fn mobius_at_i() {
        // quotient-rule oracle: value (i−1)/(i+1) = i, derivative 2/(i+1)² = −i
        let f = RationalFunction::new(vec![r(-1.0), ONE], vec![ONE, ONE]).unwrap();
        let z = Complex64::i();
        let j = f.jet_eval(z).unwrap();
        let value = (z - 1.0) / (z + 1.0);
        let d = 2.0 / ((z + 1.0) * (z + 1.0));
        assert!((value - c(0.0, 1.0)).norm() < 1e-15);
        assert!((j.value - value).norm() < 1e-15);
        assert!((j.d_z - d).norm() < 1e-15);
        assert!((j.d_z - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let f = RationalFunction::monomial(ONE, -1);
        assert!(matches!(f.jet_eval(ZERO), Err(Error::PoleAt(_))));
    }

    #[test]
    fn orders() {
        // z²/(z−1)
        let f = RationalFunction::new(vec![ZERO, ZERO, ONE], vec![r(-1.0), ONE]).unwrap();
        assert_eq!(f.zero_pole_order(SpherePoint::Finite(ZERO)).unwrap(), 2);
        assert_eq!(f.zero_pole_order(SpherePoint::Finite(ONE)).unwrap(), -1);
        assert_eq!(f.zero_pole_order(SpherePoint::Infinity).unwrap(), -1);
        assert_eq!(f.zero_pole_order(SpherePoint::Finite(r(3.0))).unwrap(), 0);

        let one = RationalFunction::constant(ONE);
        assert_eq!(one.zero_pole_order(SpherePoint::Finite(r(0.7))).unwrap(), 0);
        assert_eq!(one.zero_pole_order(SpherePoint::Infinity).unwrap(), 0);

        // (z²+1)/z⁴ at ∞: 4 − 2
        let g = RationalFunction::new(vec![ONE, ZERO, ONE], vec![ZERO, ZERO, ZERO, ZERO, ONE]).unwrap();
        assert_eq!(g.zero_pole_order(SpherePoint::Infinity).unwrap(), 2);
        assert!(matches!(
            RationalFunction::zero().zero_pole_order(SpherePoint::Infinity),
            Err(Error::IdenticallyZero)
        ));
    }

    #[test]
    fn reduction_cancels_common_roots() {
        // (z−2)(z+1) / ((z−2) z)  →  (z+1)/z
        let num = poly_mul(&[r(-2.0), ONE], &[ONE, ONE]);
        let den = poly_mul(&[r(-2.0), ONE], &[ZERO, ONE]);
        let f = RationalFunction::new(num, den).unwrap();
        assert_eq!(f.denominator().len(), 2);
        assert_eq!(f.numerator().len(), 2);
        assert!((f.denominator()[1] - ONE).norm() < 1e-15);
        assert!((f.eval(r(3.0)).unwrap() - r(4.0 / 3.0)).norm() < 1e-14);

        // 2z · (1/z) reduces to the constant 2
        let p = RationalFunction::monomial(r(2.0), 1).mul(&RationalFunction::monomial(ONE, -1));
        assert!(p.is_constant());
        assert!((p.eval(ZERO).unwrap() - r(2.0)).norm() < 1e-15);
    }

    #[test]
    fn double_roots_are_grouped() {
        let den = poly_mul(&[r(-1.0), ONE], &[r(-1.0), ONE]);
        let f = RationalFunction::new(vec![ONE], den).unwrap();
        let poles = f.poles();
        assert_eq!(poles.len(), 1);
        assert_eq!(poles[0].1, 2);
        assert!((poles[0].0 - ONE).norm() < 1e-9);
        assert_eq!(f.zero_pole_order(SpherePoint::Finite(poles[0].0)).unwrap(), -2);
    }

    #[test]
    fn invert_argument_and_twistor_transform() {
        let f = RationalFunction::new(vec![r(1.0), r(2.0)], vec![r(3.0), ONE]).unwrap();
        let g = f.invert_argument();
        let z = c(0.3, 0.4);
        assert!((g.eval(z).unwrap() - f.eval(z.inv()).unwrap()).norm() < 1e-14);
        // u = 1/z has a simple pole at 0; its transform −iz̃·u(1/z̃) = −iz̃² vanishes to order 2
        let u = RationalFunction::monomial(ONE, -1).twistor_chart_transform();
        assert_eq!(u.zero_pole_order(SpherePoint::Finite(ZERO)).unwrap(), 2);
        // u = z² (pole of order 2 at ∞) becomes −i/z̃, a simple pole
        let u = RationalFunction::monomial(ONE, 2).twistor_chart_transform();
        assert_eq!(u.zero_pole_order(SpherePoint::Finite(ZERO)).unwrap(), -1);
    }

    #[test]
    fn derivative_matches_jet() {
        let f = RationalFunction::new(vec![r(1.0), c(0.0, 2.0), ONE], vec![r(2.0), r(-1.0), ONE]).unwrap();
        let d = f.derivative();
        let z = c(0.2, -0.9);
        assert!((d.eval(z).unwrap() - f.jet_eval(z).unwrap().d_z).norm() < 1e-13);
    }

    #[test]
    fn json_shape() {
        let f = RationalFunction::new(vec![ZERO, ONE], vec![ONE]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"num":[[0.0,0.0],[1.0,0.0]],"den":[[1.0,0.0]]}"#);
        let back: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<RationalFunction>(r#"{"num":[[1,0]],"den":[]}"#).is_err());
    }

    #[test]
    fn roots_of_quadratic() {
        let mut roots = poly_roots(&[ONE, ZERO, ONE]);
        roots.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((roots[0] + Complex64::i()).norm() < 1e-14);
        assert!((roots[1] - Complex64::i()).norm() < 1e-14);
    }
}
