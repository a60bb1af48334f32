//! Phase-space quadrature for integrals (1/π) ∫_ℂ g(z, z̄) e^{−|z|²} d²z.
//!
//! The rule factorizes in polar coordinates u = r², θ: Gauss–Laguerre of
//! order R in u against the weight e^{−u}, and T uniform angular nodes.
//! For polynomial integrands of the (z, z̄) monomial class the rule is
//! exact whenever the radial degree fits 2R−1 and no angular frequency
//! aliases the T-point lattice, so every downstream approximation error is
//! attributable to Fock truncation, not to integration.
//!
//! Gauss–Laguerre nodes come from Golub–Welsch eigenvalues polished by
//! Newton iteration, with weights from the analytic formula
//! w = x / ((R+1) L_{R+1}(x))² evaluated through e^{−x/2}-scaled Laguerre
//! functions. The eigenvector route alone loses the tiny weights of the
//! outer nodes, which the high Fock moments then amplify catastrophically.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("radial order must be at least 2, got {0}")]
    RadialOrderTooSmall(usize),

    #[error("angular count must be at least 1, got {0}")]
    AngularCountTooSmall(usize),

    #[error(
        "quadrature cannot integrate the requested class exactly: needs radial degree {needed_radial} \
         (have {have_radial}) and angular bandwidth {needed_angular} (have {have_angular})"
    )]
    ExactnessNotMet {
        needed_radial: u32,
        have_radial: u32,
        needed_angular: u32,
        have_angular: u32,
    },
}

/// Scaled Laguerre functions ℓ_k(x) = L_k(x) e^{−x/2}; returns (ℓ_n, ℓ_{n−1}).
/// The scaling keeps the recurrence within f64 range on the whole node span.
fn scaled_laguerre(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0f64;
    let mut curr = (-0.5 * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * curr - kf * prev) / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    (curr, prev)
}

/// Gauss–Laguerre rule of order `n` for ∫₀^∞ f(u) e^{−u} du, nodes ascending.
pub(crate) fn gauss_laguerre(n: usize) -> Vec<(f64, f64)> {
    // Jacobi matrix of the Laguerre recurrence: diag 2i+1, off-diag i+1
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = (2 * i + 1) as f64;
        if i + 1 < n {
            let b = (i + 1) as f64;
            jac[(i, i + 1)] = b;
            jac[(i + 1, i)] = b;
        }
    }
    let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("Laguerre nodes are finite"));

    let nf = n as f64;
    nodes
        .into_iter()
        .map(|mut x| {
            // Newton polish of L_n(x) = 0 using L_n'(x) = n(L_n − L_{n−1})/x
            for _ in 0..4 {
                let (ln, ln_prev) = scaled_laguerre(n, x);
                let deriv = nf * (ln - ln_prev) / x - 0.5 * ln;
                let dx = ln / deriv;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs() {
                    break;
                }
            }
            // w = x / ((n+1) L_{n+1}(x))², with L² = ℓ² e^{x}
            let (lnp1, _) = scaled_laguerre(n + 1, x);
            let w = x * (-x).exp() / ((nf + 1.0) * lnp1).powi(2);
            (x, w)
        })
        .collect()
}

/// Gauss–Legendre rule of order `n` on [−1, 1], nodes ascending. Used for
/// integrals over bounded phase-space regions, where the Laguerre support
/// does not apply. Legendre weights have no dynamic-range problem, so the
/// plain Golub–Welsch eigenvector route is accurate here.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        let k = (i + 1) as f64;
        let b = k / (4.0 * k * k - 1.0).sqrt();
        jac[(i, i + 1)] = b;
        jac[(i + 1, i)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, 2.0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("Legendre nodes are finite"));
    pairs
}

/// Polar product rule for the Gaussian measure (1/π) e^{−|z|²} d²z.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureScheme {
    radial: Vec<(f64, f64)>,
    angular: usize,
}

impl QuadratureScheme {
    pub fn new(radial_order: usize, angular_count: usize) -> Result<Self, QuadratureError> {
        if radial_order < 2 {
            return Err(QuadratureError::RadialOrderTooSmall(radial_order));
        }
        if angular_count < 1 {
            return Err(QuadratureError::AngularCountTooSmall(angular_count));
        }
        Ok(Self {
            radial: gauss_laguerre(radial_order),
            angular: angular_count,
        })
    }

    /// Default sizing for a Fock cutoff D: R = 2D, T = 4D + 1, which covers
    /// every matrix element of symbols up to degree 2D.
    pub fn default_for_cutoff(cutoff: usize) -> Self {
        Self::new(2 * cutoff, 4 * cutoff + 1).expect("default sizing is valid for any cutoff ≥ 2")
    }

    pub fn radial_order(&self) -> usize {
        self.radial.len()
    }

    pub fn angular_count(&self) -> usize {
        self.angular
    }

    /// Radial Gauss–Laguerre pairs (u, w) in ascending u.
    pub fn radial_nodes(&self) -> &[(f64, f64)] {
        &self.radial
    }

    /// Angular nodes θ_t = 2πt/T.
    pub fn angular_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let t_total = self.angular as f64;
        (0..self.angular).map(move |t| 2.0 * std::f64::consts::PI * t as f64 / t_total)
    }

    /// Nodes z with weights W for the Gaussian-free convention:
    /// Σ W·g(z, z̄) ≈ (1/π) ∫ g(z, z̄) e^{−|z|²} d²z.
    ///
    /// Iteration order is radial-major and fixed; summing in this order is
    /// the determinism contract shared by every quantization map.
    pub fn gaussian_nodes(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        let t_total = self.angular as f64;
        self.radial.iter().flat_map(move |&(u, w)| {
            let r = u.sqrt();
            let node_weight = w / t_total;
            (0..self.angular).map(move |t| {
                let theta = 2.0 * std::f64::consts::PI * t as f64 / t_total;
                (C64::from_polar(r, theta), node_weight)
            })
        })
    }

    /// Exactness test for the monomial class z^a z̄^b with a + b up to
    /// `total_degree` and |a − b| up to `angular_offset`.
    pub fn covers(&self, total_degree: u32, angular_offset: u32) -> bool {
        let radial_capacity = 2 * self.radial.len() as u32 - 1;
        let needed_radial = total_degree.div_ceil(2);
        needed_radial <= radial_capacity && angular_offset < self.angular as u32
    }

    /// Builds the [`QuadratureError::ExactnessNotMet`] report for a class
    /// the rule cannot integrate exactly.
    pub fn exactness_error(&self, total_degree: u32, angular_offset: u32) -> QuadratureError {
        QuadratureError::ExactnessNotMet {
            needed_radial: total_degree.div_ceil(2),
            have_radial: 2 * self.radial.len() as u32 - 1,
            needed_angular: angular_offset,
            have_angular: self.angular as u32 - 1,
        }
    }

    /// Deviation of the normalized moment
    /// (1/π) ∫ (zʲ/√j!)(z̄ᵏ/√k!) e^{−|z|²} d²z from δ_{jk}.
    pub fn moment_defect(&self, j: u32, k: u32) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        let t_total = self.angular as f64;
        for &(u, w) in &self.radial {
            // angular average of e^{i(j−k)θ} over the T-point lattice
            let mut ang = C64::new(0.0, 0.0);
            for t in 0..self.angular {
                let theta = 2.0 * std::f64::consts::PI * t as f64 / t_total;
                ang += C64::from_polar(1.0, theta * (j as f64 - k as f64));
            }
            // radial factor u^{(j+k)/2} / √(j!k!) built multiplicatively
            let r = u.sqrt();
            let mut radial = 1.0f64;
            for m in 1..=j {
                radial *= r / (m as f64).sqrt();
            }
            for m in 1..=k {
                radial *= r / (m as f64).sqrt();
            }
            acc += ang * (w * radial / t_total);
        }
        let expected = if j == k { 1.0 } else { 0.0 };
        (acc - C64::new(expected, 0.0)).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_order_nodes_match_closed_form() {
        // order 2: nodes 2 ∓ √2, weights (2 ± √2)/4
        let rule = gauss_laguerre(2);
        let s = 2.0f64.sqrt();
        assert!((rule[0].0 - (2.0 - s)).abs() < 1e-14);
        assert!((rule[1].0 - (2.0 + s)).abs() < 1e-14);
        assert!((rule[0].1 - (2.0 + s) / 4.0).abs() < 1e-14);
        assert!((rule[1].1 - (2.0 - s) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn laguerre_moments_are_exact_through_2r_minus_1() {
        for order in [16usize, 64] {
            let rule = gauss_laguerre(order);
            // ∫ u^k e^{-u} du = k!, checked in normalized form
            for k in (0..2 * order).step_by(7) {
                let mut acc = 0.0f64;
                for &(u, w) in &rule {
                    let mut term = w;
                    for m in 1..=k {
                        term *= u / m as f64;
                    }
                    acc += term;
                }
                assert!(
                    (acc - 1.0).abs() < 1e-12,
                    "order {order}, moment {k}: {:.3e}",
                    (acc - 1.0).abs()
                );
            }
        }
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = gauss_legendre(8);
        // ∫_{-1}^{1} x^6 dx = 2/7
        let acc: f64 = rule.iter().map(|&(x, w)| w * x.powi(6)).sum();
        assert!((acc - 2.0 / 7.0).abs() < 1e-14);
        let total: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn normalized_moments_match_kronecker_delta() {
        let quad = QuadratureScheme::new(16, 33).unwrap();
        for j in 0..=12u32 {
            for k in 0..=12u32 {
                if j + k > 31 || j.abs_diff(k) >= 33 {
                    continue;
                }
                let defect = quad.moment_defect(j, k);
                assert!(defect < 1e-12, "moment ({j},{k}) defect {defect:.3e}");
            }
        }
    }

    #[test]
    fn angular_aliasing_is_detected_by_covers() {
        let quad = QuadratureScheme::new(8, 5).unwrap();
        assert!(quad.covers(10, 4));
        assert!(!quad.covers(10, 5));
        assert!(!quad.covers(40, 2));
        // frequency equal to T aliases to the DC term: defect is order one
        assert!(quad.moment_defect(5, 0) > 1e-3);
    }

    #[test]
    fn default_sizing_covers_quantization_class() {
        let quad = QuadratureScheme::default_for_cutoff(32);
        assert_eq!(quad.radial_order(), 64);
        assert_eq!(quad.angular_count(), 129);
        // matrix elements of a degree-4 symbol at D = 32
        assert!(quad.covers(2 * 31 + 4, 31 + 4));
    }

    #[test]
    fn invalid_orders_are_rejected() {
        assert!(matches!(
            QuadratureScheme::new(1, 9),
            Err(QuadratureError::RadialOrderTooSmall(1))
        ));
        assert!(matches!(
            QuadratureScheme::new(4, 0),
            Err(QuadratureError::AngularCountTooSmall(0))
        ));
    }

    #[test]
    fn gaussian_nodes_resolve_unity() {
        let quad = QuadratureScheme::new(12, 9).unwrap();
        let total: f64 = quad.gaussian_nodes().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
