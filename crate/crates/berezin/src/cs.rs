//! Coherent-state (anti-Wick) quantization on the truncated Fock space.
//!
//! The map sends a polynomial symbol f to
//! A_f = (1/π) ∫ f(√ħ z, √ħ z̄) |z⟩⟨z| d²z, evaluated by the exact polar
//! quadrature of [`crate::quad`]. ħ enters through the symbol scaling
//! z ↦ √ħ z, which reproduces [A_q, A_p] = iħ and the Berezin shift
//! |z|² ↦ |z|² + ħ.
//!
//! Matrix elements are accumulated from weight-folded Bargmann vectors
//! v_n = √W zⁿ/√n!; folding √W into the recursion keeps the per-node
//! magnitudes bounded for every node of the Laguerre rule.

use num_complex::Complex64 as C64;

use crate::fock::{self, FockParams, OscillatorParams};
use crate::linalg::ComplexMatrix;
use crate::quad::{QuadratureError, QuadratureScheme};
use crate::symbol::SymbolExpr;

/// Tail tolerance above which a coherent label is reported as inadequate
/// for the chosen cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

fn coverage_check(
    f: &SymbolExpr,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<(), QuadratureError> {
    let band = params.cutoff() as u32 - 1;
    let total = f.degree() + 2 * band;
    let angular = f.max_angular_offset() + band;
    if quad.covers(total, angular) {
        Ok(())
    } else {
        Err(quad.exactness_error(total, angular))
    }
}

/// Anti-Wick quantization A_f of a polynomial symbol.
///
/// Fails when the quadrature cannot cover deg f + 2(D−1) exactly; with the
/// default sizing R = 2D, T = 4D+1 this admits symbols up to degree ≈ 2D.
pub fn quantize_cs(
    f: &SymbolExpr,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<ComplexMatrix, QuadratureError> {
    let fs = f.substitute_scale(params.hbar().sqrt());
    coverage_check(&fs, params, quad)?;
    let d = params.cutoff();
    let mut acc = ComplexMatrix::zeros(d);
    let mut v = vec![C64::new(0.0, 0.0); d];
    for (z, w) in quad.gaussian_nodes() {
        let fval = fs.eval(z);
        v[0] = C64::new(w.sqrt(), 0.0);
        for n in 1..d {
            v[n] = v[n - 1] * z / (n as f64).sqrt();
        }
        for m in 0..d {
            let row = fval * v[m];
            for n in 0..d {
                acc[(m, n)] += row * v[n].conj();
            }
        }
    }
    Ok(acc)
}

/// Lower symbol ⟨z|A|z⟩ together with the truncation deficit of the
/// coherent label used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerSymbol {
    pub value: C64,
    /// Norm deficit 1 − ⟨ζ|ζ⟩ of the truncated label ζ = z/√ħ.
    pub norm_deficit: f64,
}

/// Berezin lower symbol of an operator at the phase-space point z.
///
/// The coherent label is ζ = z/√ħ, matching the symbol-scaling convention
/// of [`quantize_cs`]; at ħ = 1 this is the plain ⟨z|A|z⟩.
pub fn lower_symbol(a: &ComplexMatrix, z: C64, params: &FockParams) -> LowerSymbol {
    let zeta = z / C64::new(params.hbar().sqrt(), 0.0);
    let ket = fock::coherent_ket(zeta, params);
    LowerSymbol {
        value: ket.inner(&a.apply(&ket)),
        norm_deficit: fock::coherent_tail(zeta, params.cutoff()).norm_deficit,
    }
}

/// Weak-sense matrix element (1/π) ∫ f ⟨ψ₁|z⟩⟨z|ψ₂⟩ d²z by quadrature.
///
/// Equals ⟨ψ₁| A_f |ψ₂⟩ for the same quadrature, but is accumulated as a
/// scalar without forming the operator.
pub fn weak_matrix_element(
    psi1: &crate::linalg::Ket,
    f: &SymbolExpr,
    psi2: &crate::linalg::Ket,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<C64, QuadratureError> {
    assert_eq!(psi1.dim(), params.cutoff(), "ψ₁ dimension must match cutoff");
    assert_eq!(psi2.dim(), params.cutoff(), "ψ₂ dimension must match cutoff");
    let fs = f.substitute_scale(params.hbar().sqrt());
    coverage_check(&fs, params, quad)?;
    let d = params.cutoff();
    let mut acc = C64::new(0.0, 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d];
    for (z, w) in quad.gaussian_nodes() {
        v[0] = C64::new(w.sqrt(), 0.0);
        for n in 1..d {
            v[n] = v[n - 1] * z / (n as f64).sqrt();
        }
        // ⟨ψ₁|z̃⟩ and ⟨z̃|ψ₂⟩ against the folded Bargmann vector
        let mut left = C64::new(0.0, 0.0);
        let mut right = C64::new(0.0, 0.0);
        for n in 0..d {
            left += psi1.amplitude(n).conj() * v[n];
            right += v[n].conj() * psi2.amplitude(n);
        }
        acc += fs.eval(z) * left * right;
    }
    Ok(acc)
}

/// One point of a semiclassical scan at a given ħ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalPoint {
    pub hbar: f64,
    /// Scaled phase-space point w = z/√ħ.
    pub w: C64,
    /// Lower symbol ⟨w|A_f|w⟩.
    pub lower: C64,
    /// Classical reference f(w, w̄).
    pub reference: C64,
    pub abs_error: f64,
    /// |lower − f(w)| / |f(w)|; absent where f(w) = 0.
    pub rel_error: Option<f64>,
    /// Coherent-label norm deficit at this w; the scan point is only
    /// meaningful when this is small.
    pub norm_deficit: f64,
    pub adequate: bool,
}

/// Semiclassical limit scan: for each ħ the lower symbol of A_f at the
/// rescaled point w = z/√ħ is compared against f(w). The relative error
/// decreases in 1/ħ for nonconstant f; for f = |z|² it is exactly ħ/|z|².
pub fn semiclassical_scan(
    f: &SymbolExpr,
    z: C64,
    hbars: &[f64],
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<Vec<SemiclassicalPoint>, QuadratureError> {
    let a = quantize_cs(f, params, quad)?;
    let points = hbars
        .iter()
        .map(|&hbar| {
            let w = z / C64::new(hbar.sqrt(), 0.0);
            let ket = fock::coherent_ket(w, params);
            let lower = ket.inner(&a.apply(&ket));
            let reference = f.eval(w);
            let abs_error = (lower - reference).norm();
            let rel_error = if reference.norm() > 0.0 {
                Some(abs_error / reference.norm())
            } else {
                None
            };
            let norm_deficit = fock::coherent_tail(w, params.cutoff()).norm_deficit;
            SemiclassicalPoint {
                hbar,
                w,
                lower,
                reference,
                abs_error,
                rel_error,
                norm_deficit,
                adequate: norm_deficit <= DEFAULT_TAIL_TOL,
            }
        })
        .collect();
    Ok(points)
}

/// Deviation of the quantum trajectory from the classical cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCheck {
    pub max_deviation: f64,
    pub expectation: Vec<f64>,
    pub reference: Vec<f64>,
}

/// Checks ⟨z|Q(t)|z⟩ against 2Q₀|z| cos(ωt − arg z) over a time grid.
pub fn trajectory_check(
    z: C64,
    osc: &OscillatorParams,
    params: &FockParams,
    t_grid: &[f64],
) -> TrajectoryCheck {
    let expectation = fock::evolve_expectation(z, t_grid, osc, params);
    let amplitude = 2.0 * osc.quantum_length(params.hbar()) * z.norm();
    let phase = z.arg();
    let reference: Vec<f64> = t_grid
        .iter()
        .map(|&t| amplitude * (osc.frequency() * t - phase).cos())
        .collect();
    let max_deviation = expectation
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    TrajectoryCheck {
        max_deviation,
        expectation,
        reference,
    }
}
