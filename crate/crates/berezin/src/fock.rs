//! Truncated Fock-space operators and coherent states.
//!
//! The basis is |0⟩ … |D−1⟩ for a cutoff D ≥ 2. Identities of the infinite
//! oscillator algebra survive truncation only on leading sub-blocks; every
//! approximate construction here exposes a computable tail bound instead of
//! a fixed tolerance, so the caller can decide whether a given (z, D) pair
//! is adequate.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{expm, ComplexMatrix, Ket, LinalgError};

#[derive(Debug, Error)]
pub enum FockError {
    #[error("Fock cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),

    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),

    #[error("oscillator parameters must be positive and finite: mass {mass}, frequency {frequency}")]
    InvalidOscillator { mass: f64, frequency: f64 },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Basis cutoff and ħ for a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockParams {
    cutoff: usize,
    hbar: f64,
}

impl FockParams {
    pub fn new(cutoff: usize, hbar: f64) -> Result<Self, FockError> {
        if cutoff < 2 {
            return Err(FockError::CutoffTooSmall(cutoff));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(FockError::InvalidHbar(hbar));
        }
        Ok(Self { cutoff, hbar })
    }

    /// Cutoff D with the default ħ = 1.
    pub fn with_cutoff(cutoff: usize) -> Result<Self, FockError> {
        Self::new(cutoff, 1.0)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Mass m and angular frequency ω of the harmonic oscillator
/// H = P²/2m + ½mω²Q².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    mass: f64,
    frequency: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, frequency: f64) -> Result<Self, FockError> {
        if !(mass > 0.0 && mass.is_finite() && frequency > 0.0 && frequency.is_finite()) {
            return Err(FockError::InvalidOscillator { mass, frequency });
        }
        Ok(Self { mass, frequency })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Fundamental quantum length Q₀ = (ħ / 2mω)^½.
    pub fn quantum_length(&self, hbar: f64) -> f64 {
        (hbar / (2.0 * self.mass * self.frequency)).sqrt()
    }
}

/// Annihilation operator: a[n−1, n] = √n.
pub fn annihilation(params: &FockParams) -> ComplexMatrix {
    let d = params.cutoff();
    let mut a = ComplexMatrix::zeros(d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Creation operator a† = adjoint of [`annihilation`].
pub fn creation(params: &FockParams) -> ComplexMatrix {
    annihilation(params).adjoint()
}

/// Number operator a†a = diag(0, 1, …, D−1).
pub fn number_op(params: &FockParams) -> ComplexMatrix {
    let d = params.cutoff();
    ComplexMatrix::from_fn(d, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Position operator Q = √ħ (a + a†)/√2.
///
/// With the companion [`momentum_op`], [Q, P] = iħ on rows/cols 0 … D−2;
/// the corner entry is a truncation artifact.
pub fn position_op(params: &FockParams) -> ComplexMatrix {
    let d = params.cutoff();
    let s = (params.hbar() / 2.0).sqrt();
    let mut q = ComplexMatrix::zeros(d);
    for n in 1..d {
        let v = C64::new(s * (n as f64).sqrt(), 0.0);
        q[(n - 1, n)] = v;
        q[(n, n - 1)] = v;
    }
    q
}

/// Momentum operator P = √ħ (a − a†)/(i√2).
pub fn momentum_op(params: &FockParams) -> ComplexMatrix {
    let d = params.cutoff();
    let s = (params.hbar() / 2.0).sqrt();
    let mut p = ComplexMatrix::zeros(d);
    for n in 1..d {
        let v = (n as f64).sqrt() * s;
        // (a − a†)/i : upper off-diagonal −i·√n·s... a/(i) = −i a
        p[(n - 1, n)] = C64::new(0.0, -v);
        p[(n, n - 1)] = C64::new(0.0, v);
    }
    p
}

/// Truncation diagnostics for a coherent state |z⟩ at cutoff D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentTail {
    /// 1 − ⟨z|z⟩ on the truncated space: e^{−|z|²} Σ_{n≥D} |z|^{2n}/n!,
    /// evaluated through the complementary partial sum.
    pub norm_deficit: f64,
    /// ‖a|z⟩ − z|z⟩‖ on the truncated space: |z|·|c_{D−1}|, the exact
    /// residual of the eigenvector property.
    pub eigen_residual: f64,
}

/// Computable tail bounds for the coherent state |z⟩ truncated at `cutoff`.
pub fn coherent_tail(z: C64, cutoff: usize) -> CoherentTail {
    let x = z.norm_sqr();
    // partial sum of e^{-x} x^n / n! for n < D
    let mut term = (-x).exp();
    let mut mass = term;
    for n in 1..cutoff {
        term *= x / n as f64;
        mass += term;
    }
    // term now holds e^{-x} x^{D-1}/(D-1)! = |c_{D-1}|²
    CoherentTail {
        norm_deficit: (1.0 - mass).max(0.0),
        eigen_residual: x.sqrt() * term.max(0.0).sqrt(),
    }
}

/// Truncated canonical coherent state with amplitudes e^{−|z|²/2} zⁿ/√n!.
///
/// The amplitudes are not renormalized: ⟨z|z⟩ = 1 − norm_deficit, with the
/// deficit available from [`coherent_tail`]. Adequate truncation means
/// |z|² ≲ D.
pub fn coherent_ket(z: C64, params: &FockParams) -> Ket {
    let d = params.cutoff();
    let mut amps = Vec::with_capacity(d);
    let mut c = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    amps.push(c);
    for n in 1..d {
        c = c * z / C64::new((n as f64).sqrt(), 0.0);
        amps.push(c);
    }
    Ket::from_amplitudes(amps)
}

/// Displacement operator D(z) = exp(z a† − z̄ a).
///
/// The generator is exactly anti-Hermitian on the truncated space, so the
/// result is unitary up to the accuracy of the matrix exponential.
pub fn displacement(z: C64, params: &FockParams) -> ComplexMatrix {
    let adag = creation(params);
    let a = annihilation(params);
    let gen = adag.scale(z).sub(&a.scale(z.conj()));
    expm(&gen)
}

/// Standard deviations of Q and P in the state |z⟩ and their product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub delta_q: f64,
    pub delta_p: f64,
    pub product: f64,
}

/// Uncertainty product on a coherent state; equals ħ/2 up to truncation.
pub fn heisenberg_saturation(z: C64, params: &FockParams) -> Saturation {
    let psi = coherent_ket(z, params);
    let q = position_op(params);
    let p = momentum_op(params);
    let var = |op: &ComplexMatrix| -> f64 {
        let op_psi = op.apply(&psi);
        let mean = psi.inner(&op_psi).re;
        let mean_sq = op_psi.norm_sqr(); // ⟨ψ|A²|ψ⟩ for Hermitian A
        mean_sq - mean * mean
    };
    let dq = var(&q).max(0.0).sqrt();
    let dp = var(&p).max(0.0).sqrt();
    Saturation {
        delta_q: dq,
        delta_p: dp,
        product: dq * dp,
    }
}

/// Heisenberg-picture expectation ⟨z| Q(t) |z⟩ for the harmonic oscillator
/// H = ħω(a†a + ½), with the physical position Q = (ħ/2mω)^½ (a + a†).
///
/// Matches 2 Q₀|z| cos(ωt − arg z) up to truncation.
pub fn evolve_expectation(
    z: C64,
    t_grid: &[f64],
    osc: &OscillatorParams,
    params: &FockParams,
) -> Vec<f64> {
    let d = params.cutoff();
    let omega = osc.frequency();
    let q0 = osc.quantum_length(params.hbar());
    let psi0 = coherent_ket(z, params);
    t_grid
        .iter()
        .map(|&t| {
            // phases e^{-iω(n+1/2)t}; the ground-state phase cancels in the
            // expectation value but is kept for clarity
            let amps: Vec<C64> = (0..d)
                .map(|n| psi0.amplitude(n) * (C64::new(0.0, -omega * (n as f64 + 0.5) * t)).exp())
                .collect();
            // ⟨ψ| (a + a†) |ψ⟩ = 2 Re Σ conj(c_n) √(n+1) c_{n+1}
            let mut acc = C64::new(0.0, 0.0);
            for n in 0..d - 1 {
                acc += amps[n].conj() * amps[n + 1] * ((n + 1) as f64).sqrt();
            }
            q0 * 2.0 * acc.re
        })
        .collect()
}

/// Ascending spectrum of a Hermitian observable; rejects non-Hermitian input.
pub fn eigen_spectrum(a: &ComplexMatrix) -> Result<Vec<f64>, FockError> {
    Ok(a.hermitian_eigenvalues(1e-10)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(d: usize) -> FockParams {
        FockParams::with_cutoff(d).unwrap()
    }

    #[test]
    fn cutoff_below_two_is_rejected() {
        assert!(matches!(
            FockParams::with_cutoff(1),
            Err(FockError::CutoffTooSmall(1))
        ));
    }

    #[test]
    fn annihilation_d2() {
        let a = annihilation(&params(2));
        assert_eq!(a[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(a[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 0)], C64::new(0.0, 0.0));
        assert_eq!(a[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn annihilation_d3_has_sqrt2() {
        let a = annihilation(&params(3));
        assert_abs_diff_eq!(a[(1, 2)].re, 2.0f64.sqrt(), epsilon = 1e-16);
    }

    #[test]
    fn ladder_commutator_diagonal() {
        // analytic values 1, …, 1, −(D−1); numerically the √n·√n products
        // round at the ulp level
        let p = params(6);
        let a = annihilation(&p);
        let comm = a.commutator(&a.adjoint());
        for n in 0..5 {
            assert!((comm[(n, n)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((comm[(5, 5)] - C64::new(-5.0, 0.0)).norm() < 1e-14);
        // strictly off-diagonal entries vanish identically
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(comm[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn position_d2_matches_ladder_formula() {
        let q = position_op(&params(2));
        let v = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(q[(0, 1)].re, v, epsilon = 1e-15);
        assert_abs_diff_eq!(q[(1, 0)].re, v, epsilon = 1e-15);
    }

    #[test]
    fn position_and_momentum_are_exactly_hermitian() {
        let p = params(8);
        assert_eq!(position_op(&p).hermiticity_defect(), 0.0);
        assert_eq!(momentum_op(&p).hermiticity_defect(), 0.0);
    }

    #[test]
    fn ground_state_energy() {
        for hbar in [1.0, 2.0] {
            let p = FockParams::new(16, hbar).unwrap();
            let q = position_op(&p);
            let pm = momentum_op(&p);
            let h = q.mul(&q).add(&pm.mul(&pm));
            let vac = Ket::basis(16, 0);
            let e0 = vac.inner(&h.apply(&vac));
            assert_abs_diff_eq!(e0.re, hbar, epsilon = 1e-14);
            assert_abs_diff_eq!(e0.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn canonical_commutator_on_interior_block() {
        for hbar in [1.0, 0.5] {
            let p = FockParams::new(12, hbar).unwrap();
            let comm = position_op(&p).commutator(&momentum_op(&p));
            let expected = ComplexMatrix::identity(11).scale(C64::new(0.0, hbar));
            assert!(comm.leading_block(11).max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn coherent_vacuum() {
        let ket = coherent_ket(C64::new(0.0, 0.0), &params(5));
        assert_eq!(ket.amplitude(0), C64::new(1.0, 0.0));
        for n in 1..5 {
            assert_eq!(ket.amplitude(n), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn coherent_norm_deficit_matches_partial_sum() {
        let p = params(32);
        let z = C64::new(1.2, -0.7);
        let ket = coherent_ket(z, &p);
        let tail = coherent_tail(z, 32);
        assert_abs_diff_eq!(1.0 - ket.norm_sqr(), tail.norm_deficit, epsilon = 1e-14);
    }

    #[test]
    fn eigenvector_residual_matches_tail_formula() {
        let p = params(32);
        let z = C64::new(1.0, 0.0);
        let ket = coherent_ket(z, &p);
        let residual = annihilation(&p).apply(&ket).sub(&ket.scale(z)).norm();
        let predicted = coherent_tail(z, 32).eigen_residual;
        assert_abs_diff_eq!(residual, predicted, epsilon = 1e-15);
    }

    #[test]
    fn coherent_overlap_matches_gaussian_formula() {
        let p = params(64);
        let pts = [
            C64::new(0.3, -1.1),
            C64::new(2.0, 0.0),
            C64::new(-0.5, 1.7),
            C64::new(1.3, 1.3),
        ];
        for &z in &pts {
            for &w in &pts {
                let got = coherent_ket(z, &p).inner(&coherent_ket(w, &p));
                let expected =
                    (z.conj() * w - 0.5 * z.norm_sqr() - 0.5 * w.norm_sqr()).exp();
                assert!((got - expected).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement(C64::new(0.0, 0.0), &params(8));
        assert!(d.max_abs_diff(&ComplexMatrix::identity(8)) == 0.0);
    }

    #[test]
    fn displacement_builds_coherent_state() {
        let p = params(32);
        let z = C64::new(0.5, 0.0);
        let from_exp = displacement(z, &p).apply(&Ket::basis(32, 0));
        let analytic = coherent_ket(z, &p);
        let tail = coherent_tail(z, 32);
        // the analytic tail is far below roundoff here; the floating-point
        // floor of the exponential dominates
        let bound = 2.0 * tail.norm_deficit.sqrt() + 1e-12;
        assert!(from_exp.sub(&analytic).norm() < bound);
    }

    #[test]
    fn displacement_is_unitary() {
        let p = params(64);
        let z = C64::from_polar(1.0, 0.9);
        let d = displacement(z, &p);
        let defect = d
            .adjoint()
            .mul(&d)
            .max_abs_diff(&ComplexMatrix::identity(64));
        assert!(defect < 1e-10, "unitarity defect {defect:.3e}");
    }

    #[test]
    fn saturation_at_vacuum() {
        let s = heisenberg_saturation(C64::new(0.0, 0.0), &params(32));
        assert_abs_diff_eq!(s.product, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.delta_q, 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn saturation_is_displacement_invariant() {
        let s = heisenberg_saturation(C64::new(1.0, 1.0), &params(64));
        assert_abs_diff_eq!(s.product, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn saturation_scales_linearly_in_hbar() {
        let p = FockParams::new(48, 2.0).unwrap();
        let s = heisenberg_saturation(C64::new(0.4, -0.2), &p);
        assert_abs_diff_eq!(s.product, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn spectrum_of_number_operator() {
        let vals = eigen_spectrum(&number_op(&params(5))).unwrap();
        for (n, v) in vals.iter().enumerate() {
            assert_abs_diff_eq!(*v, n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectrum_invariant_under_displacement_conjugation() {
        let p = params(24);
        let n_op = number_op(&p);
        let u = displacement(C64::new(0.3, 0.0), &p);
        let conjugated = u.mul(&n_op).mul(&u.adjoint());
        let original = eigen_spectrum(&n_op).unwrap();
        let rotated = conjugated.hermitian_eigenvalues(1e-8).unwrap();
        for (a, b) in original.iter().zip(&rotated) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn trajectory_t0_amplitude() {
        let p = params(48);
        let osc = OscillatorParams::new(1.0, 1.0).unwrap();
        let z = C64::new(0.8, 0.0);
        let vals = evolve_expectation(z, &[0.0], &osc, &p);
        let expected = 2.0 * osc.quantum_length(1.0) * z.norm();
        assert_abs_diff_eq!(vals[0], expected, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_trajectory_is_zero() {
        let p = params(16);
        let osc = OscillatorParams::new(2.0, 0.7).unwrap();
        let grid: Vec<f64> = (0..20).map(|k| 0.3 * k as f64).collect();
        for v in evolve_expectation(C64::new(0.0, 0.0), &grid, &osc, &p) {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn trajectory_matches_classical_cosine() {
        let p = params(48);
        let osc = OscillatorParams::new(1.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..200)
            .map(|k| 4.0 * std::f64::consts::PI * k as f64 / 199.0)
            .collect();
        let vals = evolve_expectation(C64::new(1.0, 0.0), &grid, &osc, &p);
        let mut worst = 0.0f64;
        for (v, t) in vals.iter().zip(&grid) {
            worst = worst.max((v - 2.0f64.sqrt() * t.cos()).abs());
        }
        assert!(worst < 1e-8, "max deviation {worst:.3e}");
    }

    #[test]
    fn trajectory_phase_and_frequency() {
        // nontrivial m, ω, ħ and complex z exercise Q₀ and φ = arg z
        let p = FockParams::new(64, 0.5).unwrap();
        let osc = OscillatorParams::new(1.7, 2.3).unwrap();
        let z = C64::from_polar(1.1, 0.6);
        let grid: Vec<f64> = (0..50).map(|k| 0.07 * k as f64).collect();
        let vals = evolve_expectation(z, &grid, &osc, &p);
        let q0 = osc.quantum_length(0.5);
        for (v, t) in vals.iter().zip(&grid) {
            let reference = 2.0 * q0 * z.norm() * (osc.frequency() * t - 0.6).cos();
            assert!((v - reference).abs() < 1e-8);
        }
    }
}
