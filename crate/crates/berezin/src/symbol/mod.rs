//! Classical phase-space observables as complex polynomials.
//!
//! The normal form is a finite coefficient map in the commuting pair
//! (z, z̄) with z = (q + ip)/√2; the (q, p) picture is a view obtained by
//! substitution. Restricting symbols to polynomials is what makes the
//! quadrature downstream exact rather than approximate.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

mod parser;

pub use parser::{parse, ParseError};

/// Total-degree cap; guards parser-driven blowup and keeps evaluation sane.
pub const MAX_DEGREE: u32 = 512;

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("polynomial degree exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooLarge,

    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),
}

/// A point of the flat phase space, stored as z = (q + ip)/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub z: C64,
}

impl PhasePoint {
    pub fn from_z(z: C64) -> Self {
        Self { z }
    }

    pub fn from_qp(q: f64, p: f64) -> Self {
        Self {
            z: C64::new(q, p) / C64::new(std::f64::consts::SQRT_2, 0.0),
        }
    }

    pub fn q(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.z.re
    }

    pub fn p(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.z.im
    }
}

/// Polynomial symbol in normal form: a coefficient map (j, k) ↦ c for
/// monomials zʲ z̄ᵏ, with exact-zero coefficients pruned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolExpr {
    terms: BTreeMap<(u32, u32), C64>,
}

fn is_zero(c: C64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

impl SymbolExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut terms = BTreeMap::new();
        if !is_zero(c) {
            terms.insert((0, 0), c);
        }
        Self { terms }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// Monomial c · zʲ z̄ᵏ.
    pub fn monomial(j: u32, k: u32, c: C64) -> Self {
        let mut terms = BTreeMap::new();
        if !is_zero(c) {
            terms.insert((j, k), c);
        }
        Self { terms }
    }

    pub fn z() -> Self {
        Self::monomial(1, 0, C64::new(1.0, 0.0))
    }

    pub fn zbar() -> Self {
        Self::monomial(0, 1, C64::new(1.0, 0.0))
    }

    /// q = (z + z̄)/√2.
    pub fn q() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::monomial(1, 0, s).add(&Self::monomial(0, 1, s))
    }

    /// p = (z − z̄)/(i√2) = −i(z − z̄)/√2.
    pub fn p() -> Self {
        let s = C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
        Self::monomial(1, 0, s).add(&Self::monomial(0, 1, -s))
    }

    /// qᵐ pⁿ expanded into the (z, z̄) normal form.
    pub fn qp_monomial(m: u32, n: u32) -> Result<Self, SymbolError> {
        Self::q().pow(m)?.mul(&Self::p().pow(n)?)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, j: u32, k: u32) -> C64 {
        self.terms
            .get(&(j, k))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial is a constant (degree 0).
    pub fn as_constant(&self) -> Option<C64> {
        match self.terms.len() {
            0 => Some(C64::new(0.0, 0.0)),
            1 => self.terms.get(&(0, 0)).copied(),
            _ => None,
        }
    }

    /// Largest total degree j + k.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(j, k)| j + k).max().unwrap_or(0)
    }

    /// Largest |j − k| across monomials: the angular bandwidth of the
    /// symbol under z ↦ e^{iθ}z, needed to size angular quadrature.
    pub fn max_angular_offset(&self) -> u32 {
        self.terms
            .keys()
            .map(|&(j, k)| j.abs_diff(k))
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&key, &c) in &other.terms {
            let entry = terms.entry(key).or_insert(C64::new(0.0, 0.0));
            *entry += c;
            if is_zero(*entry) {
                terms.remove(&key);
            }
        }
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, -c)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        if is_zero(c) {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, &v)| (k, c * v)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SymbolError> {
        let mut terms: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (&(j1, k1), &c1) in &self.terms {
            for (&(j2, k2), &c2) in &other.terms {
                let j = j1.checked_add(j2).ok_or(SymbolError::DegreeTooLarge)?;
                let k = k1.checked_add(k2).ok_or(SymbolError::DegreeTooLarge)?;
                if j.saturating_add(k) > MAX_DEGREE {
                    return Err(SymbolError::DegreeTooLarge);
                }
                let entry = terms.entry((j, k)).or_insert(C64::new(0.0, 0.0));
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !is_zero(*c));
        Ok(Self { terms })
    }

    pub fn pow(&self, n: u32) -> Result<Self, SymbolError> {
        if self.degree().saturating_mul(n) > MAX_DEGREE {
            return Err(SymbolError::DegreeTooLarge);
        }
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|(&(j, k), &c)| c * z.powu(j) * zb.powu(k))
            .sum()
    }

    pub fn eval_qp(&self, q: f64, p: f64) -> C64 {
        self.eval(PhasePoint::from_qp(q, p).z)
    }

    /// Complex conjugate of the symbol as a function: c_{jk} ↦ conj(c_{kj}).
    pub fn conjugate(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(j, k), &c)| ((k, j), c.conj()))
                .collect(),
        }
    }

    /// Real-valuedness test: f is real iff c_{jk} = conj(c_{kj}) for all
    /// monomials, checked within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(&(j, k), &c)| {
            (c - self.coefficient(k, j).conj()).norm() <= tol
        })
    }

    /// Substitution z ↦ s·z, z̄ ↦ s·z̄ for real s.
    pub fn substitute_scale(&self, s: f64) -> Self {
        let mut terms = BTreeMap::new();
        for (&(j, k), &c) in &self.terms {
            let scaled = c * s.powi((j + k) as i32);
            if !is_zero(scaled) {
                terms.insert((j, k), scaled);
            }
        }
        Self { terms }
    }

    /// Restores ħ-dependence through z ↦ z/√ħ.
    pub fn scale_hbar(&self, hbar: f64) -> Result<Self, SymbolError> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(SymbolError::InvalidHbar(hbar));
        }
        Ok(self.substitute_scale(1.0 / hbar.sqrt()))
    }

    /// ∂f/∂z.
    pub fn d_dz(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (&(j, k), &c) in &self.terms {
            if j > 0 {
                terms.insert((j - 1, k), c * j as f64);
            }
        }
        Self { terms }
    }

    /// ∂f/∂z̄.
    pub fn d_dzbar(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (&(j, k), &c) in &self.terms {
            if k > 0 {
                terms.insert((j, k - 1), c * k as f64);
            }
        }
        Self { terms }
    }

    /// Coefficient map of the (q, p) view: (m, n) ↦ coefficient of qᵐ pⁿ.
    ///
    /// Obtained by substituting z = (q + ip)/√2 and collecting; exact up to
    /// floating-point rounding of the √2 factors.
    pub fn qp_coefficients(&self) -> BTreeMap<(u32, u32), C64> {
        // work polynomial over the (q, p) monomial basis
        let mul_qp = |a: &BTreeMap<(u32, u32), C64>, b: &BTreeMap<(u32, u32), C64>| {
            let mut out: BTreeMap<(u32, u32), C64> = BTreeMap::new();
            for (&(m1, n1), &c1) in a {
                for (&(m2, n2), &c2) in b {
                    *out.entry((m1 + m2, n1 + n2)).or_insert(C64::new(0.0, 0.0)) += c1 * c2;
                }
            }
            out
        };
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        // z = s(q + ip), z̄ = s(q − ip)
        let z_poly: BTreeMap<(u32, u32), C64> =
            [((1, 0), s), ((0, 1), s * C64::new(0.0, 1.0))].into();
        let zbar_poly: BTreeMap<(u32, u32), C64> =
            [((1, 0), s), ((0, 1), s * C64::new(0.0, -1.0))].into();

        let mut total: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (&(j, k), &c) in &self.terms {
            let mut term: BTreeMap<(u32, u32), C64> = [((0, 0), c)].into();
            for _ in 0..j {
                term = mul_qp(&term, &z_poly);
            }
            for _ in 0..k {
                term = mul_qp(&term, &zbar_poly);
            }
            for (key, v) in term {
                *total.entry(key).or_insert(C64::new(0.0, 0.0)) += v;
            }
        }
        total.retain(|_, c| !is_zero(*c));
        total
    }

    /// JSON coefficient map {"j,k": [re, im]} with deterministic key order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (&(j, k), &c) in &self.terms {
            map.insert(format!("{j},{k}"), serde_json::json!([c.re, c.im]));
        }
        serde_json::Value::Object(map)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        let obj = value.as_object().ok_or("expected a JSON object")?;
        let mut terms = BTreeMap::new();
        for (key, entry) in obj {
            let (j_str, k_str) = key
                .split_once(',')
                .ok_or_else(|| format!("bad monomial key {key:?}: expected \"j,k\""))?;
            let j: u32 = j_str
                .trim()
                .parse()
                .map_err(|_| format!("bad z power in key {key:?}"))?;
            let k: u32 = k_str
                .trim()
                .parse()
                .map_err(|_| format!("bad zbar power in key {key:?}"))?;
            if j.saturating_add(k) > MAX_DEGREE {
                return Err(format!("monomial {key:?} exceeds degree cap {MAX_DEGREE}"));
            }
            let pair = entry
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| format!("coefficient of {key:?} must be [re, im]"))?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| format!("non-numeric real part for {key:?}"))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| format!("non-numeric imaginary part for {key:?}"))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(format!("non-finite coefficient for {key:?}"));
            }
            let c = C64::new(re, im);
            if !is_zero(c) {
                terms.insert((j, k), c);
            }
        }
        Ok(Self { terms })
    }
}

/// Canonical Poisson bracket {f, g} = ∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q, computed
/// in the z-representation as i(∂f/∂z̄ ∂g/∂z − ∂f/∂z ∂g/∂z̄).
pub fn poisson_bracket(f: &SymbolExpr, g: &SymbolExpr) -> Result<SymbolExpr, SymbolError> {
    let i = C64::new(0.0, 1.0);
    let lhs = f.d_dzbar().mul(&g.d_dz())?;
    let rhs = f.d_dz().mul(&g.d_dzbar())?;
    Ok(lhs.sub(&rhs).scale(i))
}

fn write_coefficient(out: &mut fmt::Formatter<'_>, c: C64) -> fmt::Result {
    if c.im == 0.0 {
        write!(out, "({})", c.re)
    } else if c.im < 0.0 || c.im.is_sign_negative() {
        write!(out, "({}-{}i)", c.re, -c.im)
    } else {
        write!(out, "({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for SymbolExpr {
    /// Prints the normal form in a shape the parser accepts; print→parse
    /// is the identity on normal forms.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "(0)");
        }
        for (idx, (&(j, k), &c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(out, " + ")?;
            }
            write_coefficient(out, c)?;
            match j {
                0 => {}
                1 => write!(out, "*z")?,
                _ => write!(out, "*z^{j}")?,
            }
            match k {
                0 => {}
                1 => write!(out, "*zbar")?,
                _ => write!(out, "*zbar^{k}")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for SymbolExpr {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        parse(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn phase_point_round_trip() {
        for (q, p) in [(0.0, 0.0), (1.5, -0.25), (-3.0, 7.125)] {
            let pt = PhasePoint::from_qp(q, p);
            assert_abs_diff_eq!(pt.q(), q, epsilon = 1e-15);
            assert_abs_diff_eq!(pt.p(), p, epsilon = 1e-15);
        }
    }

    #[test]
    fn z_zbar_at_point_is_norm_squared() {
        let f = SymbolExpr::z().mul(&SymbolExpr::zbar()).unwrap();
        let v = f.eval(C64::new(1.0, 1.0));
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn qp_and_z_evaluations_agree() {
        let f = SymbolExpr::qp_monomial(2, 3).unwrap();
        for (q, p) in [(0.3, -1.2), (2.0, 0.5), (-0.7, -0.7)] {
            let via_z = f.eval_qp(q, p);
            let direct = q.powi(2) * p.powi(3);
            assert!((via_z - C64::new(direct, 0.0)).norm() < 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn kinetic_identity() {
        // (q² + p²)/2 = z z̄
        let f = SymbolExpr::qp_monomial(2, 0)
            .unwrap()
            .add(&SymbolExpr::qp_monomial(0, 2).unwrap())
            .scale(C64::new(0.5, 0.0));
        let g = SymbolExpr::z().mul(&SymbolExpr::zbar()).unwrap();
        let diff = f.sub(&g);
        for (_, c) in diff.terms() {
            assert!(c.norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_bracket() {
        let b = poisson_bracket(&SymbolExpr::q(), &SymbolExpr::p()).unwrap();
        let c = b.as_constant().expect("bracket of q, p is constant");
        assert_abs_diff_eq!(c.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bracket_of_squares() {
        // {q², p²} = 4qp
        let f = SymbolExpr::qp_monomial(2, 0).unwrap();
        let g = SymbolExpr::qp_monomial(0, 2).unwrap();
        let b = poisson_bracket(&f, &g).unwrap();
        let expected = SymbolExpr::qp_monomial(1, 1).unwrap().scale(C64::new(4.0, 0.0));
        for pt in [C64::new(0.4, 0.9), C64::new(-1.0, 0.3)] {
            assert!((b.eval(pt) - expected.eval(pt)).norm() < 1e-12);
        }
    }

    #[test]
    fn bracket_with_self_vanishes_exactly() {
        let f = SymbolExpr::qp_monomial(3, 1).unwrap();
        let b = poisson_bracket(&f, &f).unwrap();
        assert!(b.is_empty());
    }

    #[test]
    fn hbar_scaling_of_quadratic() {
        let f = SymbolExpr::z().mul(&SymbolExpr::zbar()).unwrap();
        let scaled = f.scale_hbar(4.0).unwrap();
        assert_abs_diff_eq!(scaled.coefficient(1, 1).re, 0.25, epsilon = 1e-16);
        // constants are unchanged for any ħ
        let one = SymbolExpr::one().scale_hbar(0.3).unwrap();
        assert_eq!(one.coefficient(0, 0), C64::new(1.0, 0.0));
    }

    #[test]
    fn hbar_scaling_is_degree_homogeneous() {
        let f = SymbolExpr::qp_monomial(2, 0).unwrap();
        let z = C64::new(1.0, 0.0);
        let base = f.eval(z);
        let scaled = f.scale_hbar(0.25).unwrap().eval(z);
        assert!((scaled - base * 4.0).norm() < 1e-12 * base.norm());
    }

    #[test]
    fn realness_detection() {
        assert!(SymbolExpr::qp_monomial(1, 1).unwrap().is_real(1e-15));
        assert!(!SymbolExpr::z().is_real(1e-15));
        // |z|² is real, z² is not
        assert!(SymbolExpr::z()
            .mul(&SymbolExpr::zbar())
            .unwrap()
            .is_real(1e-15));
        assert!(!SymbolExpr::z().pow(2).unwrap().is_real(1e-15));
    }

    #[test]
    fn conjugate_squares_to_identity() {
        let f = SymbolExpr::monomial(2, 1, C64::new(0.5, -1.5));
        assert_eq!(f.conjugate().conjugate(), f);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let z = SymbolExpr::z();
        let big = z.pow(256).unwrap();
        assert!(matches!(big.mul(&big.mul(&big).unwrap()), Err(SymbolError::DegreeTooLarge)));
        assert!(matches!(z.pow(513), Err(SymbolError::DegreeTooLarge)));
    }

    #[test]
    fn json_round_trip() {
        let f = SymbolExpr::qp_monomial(1, 2)
            .unwrap()
            .add(&SymbolExpr::constant(C64::new(-0.25, 3.0)));
        let back = SymbolExpr::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn json_rejects_bad_keys() {
        let v = serde_json::json!({"1;2": [1.0, 0.0]});
        assert!(SymbolExpr::from_json(&v).is_err());
        let v = serde_json::json!({"1,2": [1.0]});
        assert!(SymbolExpr::from_json(&v).is_err());
        let v = serde_json::json!({"600,600": [1.0, 0.0]});
        assert!(SymbolExpr::from_json(&v).is_err());
    }
}
