//! Prime quantization: the reproducing-kernel picture of the coherent-state
//! subspace, localization operators over phase-space regions, and the
//! asymptotic Dirac correspondence.
//!
//! The canonical kernel K(z, w) = exp(z̄w − |z|²/2 − |w|²/2) is the overlap
//! of coherent states; the evaluation maps E_z it reproduces give the
//! quantization prescription Q(f) = (1/π) ∫ f E*_z E_z d²z, which coincides
//! with the anti-Wick map of [`crate::cs`]. The two modules deliberately
//! accumulate through different normalizations — true coherent amplitudes
//! with re-exponentiated weights here, weight-folded Bargmann vectors
//! there — so their agreement is a genuine cross-check and not a tautology.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::FockParams;
use crate::linalg::ComplexMatrix;
use crate::quad::{gauss_legendre, QuadratureError, QuadratureScheme};
use crate::symbol::{poisson_bracket, SymbolExpr, SymbolError};

#[derive(Debug, Error)]
pub enum PrimeError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error(transparent)]
    Region(#[from] RegionError),

    #[error(transparent)]
    Symbol(#[from] SymbolError),

    #[error(
        "symbols of combined degree {degree_sum} leave no interior block at cutoff {cutoff}"
    )]
    BlockTooSmall { cutoff: usize, degree_sum: u32 },
}

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("bad region spec {text:?}: {message}")]
    Spec { text: String, message: String },

    #[error("invalid region parameters: {0}")]
    Params(String),
}

/// Canonical reproducing kernel of the coherent-state subspace.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReproducingKernel;

impl ReproducingKernel {
    /// K(z, w) = exp(z̄w − |z|²/2 − |w|²/2).
    pub fn eval(&self, z: C64, w: C64) -> C64 {
        (z.conj() * w - C64::new(0.5 * z.norm_sqr() + 0.5 * w.norm_sqr(), 0.0)).exp()
    }

    /// Gram matrix K(z_i, z_j) on a finite point set; positive semidefinite
    /// for any choice of points.
    pub fn gram(&self, points: &[C64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(points.len(), |i, j| self.eval(points[i], points[j]))
    }
}

/// K(z, w) = exp(z̄w − |z|²/2 − |w|²/2).
pub fn kernel_eval(z: C64, w: C64) -> C64 {
    ReproducingKernel.eval(z, w)
}

/// Borel region of the flat phase space, restricted to a parametric family
/// that quadrature can handle: disks, annuli, angular sectors, and the full
/// plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BorelRegion {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Sector { from: f64, to: f64 },
    FullPlane,
}

impl BorelRegion {
    pub fn disk(radius: f64) -> Result<Self, RegionError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(RegionError::Params(format!(
                "disk radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self::Disk { radius })
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self, RegionError> {
        if !(inner >= 0.0 && inner.is_finite() && outer.is_finite() && outer > inner) {
            return Err(RegionError::Params(format!(
                "annulus needs 0 ≤ inner < outer < ∞, got inner={inner}, outer={outer}"
            )));
        }
        Ok(Self::Annulus { inner, outer })
    }

    pub fn sector(from: f64, to: f64) -> Result<Self, RegionError> {
        let span = to - from;
        if !(from.is_finite() && to.is_finite() && span > 0.0) {
            return Err(RegionError::Params(format!(
                "sector needs finite angles with from < to, got from={from}, to={to}"
            )));
        }
        if span > 2.0 * std::f64::consts::PI + 1e-12 {
            return Err(RegionError::Params(format!(
                "sector span {span} exceeds 2π and would overlap itself"
            )));
        }
        Ok(Self::Sector { from, to })
    }

    /// Parses the CLI region syntax:
    /// `disk:r=R`, `annulus:rin=A,rout=B`, `sector:from=A,to=B`, `plane`.
    pub fn parse(text: &str) -> Result<Self, RegionError> {
        let spec_err = |message: &str| RegionError::Spec {
            text: text.to_string(),
            message: message.to_string(),
        };
        let trimmed = text.trim();
        let (kind, args) = match trimmed.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (trimmed, ""),
        };
        let mut params = std::collections::BTreeMap::new();
        if !args.is_empty() {
            for pair in args.split(',') {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| spec_err("expected key=value parameters"))?;
                let parsed: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| spec_err(&format!("bad numeric value for {}", key.trim())))?;
                params.insert(key.trim().to_string(), parsed);
            }
        }
        let take = |params: &mut std::collections::BTreeMap<String, f64>,
                    key: &str|
         -> Result<f64, RegionError> {
            params
                .remove(key)
                .ok_or_else(|| spec_err(&format!("missing parameter {key}")))
        };
        let region = match kind {
            "disk" => Self::disk(take(&mut params, "r")?)?,
            "annulus" => {
                let inner = take(&mut params, "rin")?;
                let outer = take(&mut params, "rout")?;
                Self::annulus(inner, outer)?
            }
            "sector" => {
                let from = take(&mut params, "from")?;
                let to = take(&mut params, "to")?;
                Self::sector(from, to)?
            }
            "plane" => Self::FullPlane,
            other => return Err(spec_err(&format!("unknown region kind {other:?}"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(spec_err(&format!("unexpected parameter {extra}")));
        }
        Ok(region)
    }

    /// Region-adapted quadrature nodes (z, W) in the Gaussian-free
    /// convention of [`QuadratureScheme::gaussian_nodes`], restricted to the
    /// region. Bounded radial ranges use Gauss–Legendre in u = r² with the
    /// Gaussian evaluated explicitly; sectors keep the Laguerre radial rule
    /// and put Gauss–Legendre on the angle.
    fn nodes(&self, quad: &QuadratureScheme) -> Vec<(C64, f64)> {
        let two_pi = 2.0 * std::f64::consts::PI;
        match *self {
            BorelRegion::FullPlane => quad.gaussian_nodes().collect(),
            BorelRegion::Disk { radius } => radial_legendre_nodes(0.0, radius * radius, quad),
            BorelRegion::Annulus { inner, outer } => {
                radial_legendre_nodes(inner * inner, outer * outer, quad)
            }
            BorelRegion::Sector { from, to } => {
                let angular = gauss_legendre(quad.angular_count());
                let half_span = 0.5 * (to - from);
                let mid = 0.5 * (from + to);
                let mut nodes = Vec::new();
                for &(u, w) in quad.radial_nodes() {
                    let r = u.sqrt();
                    for &(x, nu) in &angular {
                        let theta = mid + half_span * x;
                        let weight = w * nu * half_span / two_pi;
                        nodes.push((C64::from_polar(r, theta), weight));
                    }
                }
                nodes
            }
        }
    }
}

/// Gauss–Legendre radial nodes on u ∈ [u_lo, u_hi] with uniform angles.
fn radial_legendre_nodes(u_lo: f64, u_hi: f64, quad: &QuadratureScheme) -> Vec<(C64, f64)> {
    let radial = gauss_legendre(quad.radial_order());
    let t_total = quad.angular_count() as f64;
    let half_span = 0.5 * (u_hi - u_lo);
    let mid = 0.5 * (u_hi + u_lo);
    let mut nodes = Vec::new();
    for &(x, mu) in &radial {
        let u = mid + half_span * x;
        let r = u.sqrt();
        let weight = mu * half_span * (-u).exp() / t_total;
        for t in 0..quad.angular_count() {
            let theta = two_pi_fraction(t, quad.angular_count());
            nodes.push((C64::from_polar(r, theta), weight));
        }
    }
    nodes
}

fn two_pi_fraction(t: usize, total: usize) -> f64 {
    2.0 * std::f64::consts::PI * t as f64 / total as f64
}

/// Localization operator a_K(Δ) = (1/π) ∫_Δ |z⟩⟨z| d²z.
///
/// Positive semidefinite, bounded by the identity, additive over disjoint
/// regions, and equal to the identity on the full plane.
pub fn localization_operator(
    region: &BorelRegion,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<ComplexMatrix, PrimeError> {
    localization_weighted(&SymbolExpr::one(), region, params, quad)
}

/// Region-restricted quantization (1/π) ∫_Δ f(√ħ z) |z⟩⟨z| d²z; with
/// f ≡ 1 this is [`localization_operator`], with Δ the full plane it is
/// [`prime_quantize`].
pub fn localization_weighted(
    f: &SymbolExpr,
    region: &BorelRegion,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<ComplexMatrix, PrimeError> {
    let fs = f.substitute_scale(params.hbar().sqrt());
    let band = params.cutoff() as u32 - 1;
    // exactness applies to whichever factor of the product rule is still
    // the exact one on this region
    let (check_radial, check_angular) = match region {
        BorelRegion::FullPlane => (true, true),
        BorelRegion::Disk { .. } | BorelRegion::Annulus { .. } => (false, true),
        BorelRegion::Sector { .. } => (true, false),
    };
    let total = fs.degree() + 2 * band;
    let angular = fs.max_angular_offset() + band;
    let radial_ok = !check_radial || quad.covers(total, 0);
    let angular_ok = !check_angular || quad.covers(0, angular);
    if !(radial_ok && angular_ok) {
        return Err(PrimeError::Quadrature(
            quad.exactness_error(total, angular),
        ));
    }

    let d = params.cutoff();
    let mut acc = ComplexMatrix::zeros(d);
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for (z, w) in region.nodes(quad) {
        if w == 0.0 {
            continue;
        }
        // true coherent amplitudes e_n(z) = ⟨z|n⟩ = e^{−|z|²/2} z̄ⁿ/√n!
        let zbar = z.conj();
        amps[0] = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
        for n in 1..d {
            amps[n] = amps[n - 1] * zbar / (n as f64).sqrt();
        }
        let coeff = C64::new(w * z.norm_sqr().exp(), 0.0) * fs.eval(z);
        for m in 0..d {
            let lead = coeff * amps[m].conj();
            for n in 0..d {
                acc[(m, n)] += lead * amps[n];
            }
        }
    }
    Ok(acc)
}

/// Prime quantization Q(f) = (1/π) ∫ f(√ħ z) E*_z E_z d²z in the
/// evaluation-map picture. Coincides with [`crate::cs::quantize_cs`] for
/// the canonical kernel.
pub fn prime_quantize(
    f: &SymbolExpr,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<ComplexMatrix, PrimeError> {
    let fs = f.substitute_scale(params.hbar().sqrt());
    let band = params.cutoff() as u32 - 1;
    let total = fs.degree() + 2 * band;
    let angular = fs.max_angular_offset() + band;
    if !quad.covers(total, angular) {
        return Err(PrimeError::Quadrature(
            quad.exactness_error(total, angular),
        ));
    }

    let d = params.cutoff();
    let t_total = quad.angular_count() as f64;
    let mut acc = ComplexMatrix::zeros(d);
    let mut evals = vec![C64::new(0.0, 0.0); d];
    for &(u, w) in quad.radial_nodes() {
        if w == 0.0 {
            continue;
        }
        // Laguerre weight with the Gaussian re-included: w e^{u}, assembled
        // in log space so neither factor overflows alone
        let node_weight = (w.ln() + u).exp() / t_total;
        let r = u.sqrt();
        let gauss_half = (-0.5 * u).exp();
        for t in 0..quad.angular_count() {
            let z = C64::from_polar(r, two_pi_fraction(t, quad.angular_count()));
            let zbar = z.conj();
            evals[0] = C64::new(gauss_half, 0.0);
            for n in 1..d {
                evals[n] = evals[n - 1] * zbar / (n as f64).sqrt();
            }
            let coeff = C64::new(node_weight, 0.0) * fs.eval(z);
            for m in 0..d {
                let lead = coeff * evals[m].conj();
                for n in 0..d {
                    acc[(m, n)] += lead * evals[n];
                }
            }
        }
    }
    Ok(acc)
}

/// Dirac-correspondence residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracResidual {
    /// Operator norm of [Q(f), Q(g)] − iħ Q({f, g}) on the interior block.
    pub residual_norm: f64,
    /// Size of the interior block the residual was measured on.
    pub block: usize,
}

/// Measures ‖[Q(f), Q(g)] − iħ Q({f, g})‖ on the interior block
/// D − (deg f + deg g), where truncated operator products are still exact.
///
/// Exact (up to quadrature roundoff) for symbols of degree ≤ 2; the first
/// genuine defect appears at cubics and scales homogeneously in ħ.
pub fn dirac_residual(
    f: &SymbolExpr,
    g: &SymbolExpr,
    hbar: f64,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<DiracResidual, PrimeError> {
    let scaled = FockParams::new(params.cutoff(), hbar)
        .expect("cutoff already validated; hbar validated here");
    let degree_sum = f.degree() + g.degree();
    let cutoff = params.cutoff();
    if (cutoff as u32) < degree_sum + 2 {
        return Err(PrimeError::BlockTooSmall { cutoff, degree_sum });
    }
    let block = cutoff - degree_sum as usize;

    let qf = prime_quantize(f, &scaled, quad)?;
    let qg = prime_quantize(g, &scaled, quad)?;
    let bracket = poisson_bracket(f, g)?;
    let q_bracket = prime_quantize(&bracket, &scaled, quad)?;

    let residual = qf
        .commutator(&qg)
        .sub(&q_bracket.scale(C64::new(0.0, hbar)))
        .leading_block(block);
    Ok(DiracResidual {
        residual_norm: residual.spectral_norm(),
        block,
    })
}
