//! Regular N-fold unit-vector frames in the Euclidean plane and their
//! quantization of functions on N points.
//!
//! The arms |θ_n⟩ = (cos 2πn/N, sin 2πn/N) with weight 2/N resolve the 2×2
//! identity for every N ≥ 3; the N = 5 case is the pedagogical "quantum
//! angle" model. N ∈ {1, 2} fail the resolution identity and are rejected.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, Ket};
use crate::symbol;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error(
        "a regular {0}-fold frame cannot resolve the identity: Σ cos(4πn/N) vanishes only for N ≥ 3"
    )]
    TooFewArms(usize),

    #[error("symbol has {symbol_len} values but the frame has {frame_len} arms")]
    LengthMismatch { symbol_len: usize, frame_len: usize },

    #[error("operator must be 2×2, got dimension {0}")]
    NotPlanar(usize),

    #[error("arm index {index} out of range for a {arms}-fold frame")]
    IndexOutOfRange { index: usize, arms: usize },

    #[error("bad finite symbol value at entry {index}: {message}")]
    BadValue { index: usize, message: String },
}

/// Regular N-fold polygon frame: unit vectors at angles 2πn/N, weight 2/N.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonFrame {
    vectors: Vec<Ket>,
}

impl PolygonFrame {
    pub fn new(arms: usize) -> Result<Self, FrameError> {
        if arms < 3 {
            return Err(FrameError::TooFewArms(arms));
        }
        let vectors = (0..arms)
            .map(|n| {
                let theta = 2.0 * std::f64::consts::PI * n as f64 / arms as f64;
                Ket::from_amplitudes(vec![
                    C64::new(theta.cos(), 0.0),
                    C64::new(theta.sin(), 0.0),
                ])
            })
            .collect();
        Ok(Self { vectors })
    }

    pub fn arm_count(&self) -> usize {
        self.vectors.len()
    }

    /// Uniform frame weight 2/N.
    pub fn weight(&self) -> f64 {
        2.0 / self.arm_count() as f64
    }

    pub fn angle(&self, n: usize) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 / self.arm_count() as f64
    }

    pub fn vector(&self, n: usize) -> Result<&Ket, FrameError> {
        self.vectors.get(n).ok_or(FrameError::IndexOutOfRange {
            index: n,
            arms: self.arm_count(),
        })
    }

    /// Projector P_n = |θ_n⟩⟨θ_n|.
    pub fn projector(&self, n: usize) -> Result<ComplexMatrix, FrameError> {
        Ok(self.vector(n)?.projector())
    }

    /// Largest entrywise deviation of (2/N) Σ_n P_n from the identity.
    pub fn resolution_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2);
        for ket in &self.vectors {
            sum = sum.add(&ket.projector());
        }
        sum.scale(C64::new(self.weight(), 0.0))
            .max_abs_diff(&ComplexMatrix::identity(2))
    }
}

/// Function on the N arm labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSymbol {
    values: Vec<C64>,
}

impl FiniteSymbol {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values }
    }

    /// Parses a comma-separated list of constant expressions, e.g.
    /// `"1,0.5,(1+2i),0,0"`. Each entry goes through the symbol grammar and
    /// must reduce to a constant.
    pub fn parse_list(text: &str) -> Result<Self, FrameError> {
        let mut values = Vec::new();
        for (index, entry) in text.split(',').enumerate() {
            let expr = symbol::parse(entry).map_err(|e| FrameError::BadValue {
                index,
                message: e.to_string(),
            })?;
            let value = expr.as_constant().ok_or_else(|| FrameError::BadValue {
                index,
                message: "entry is not a constant".to_string(),
            })?;
            values.push(value);
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, n: usize) -> C64 {
        self.values[n]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Cyclic shift f(· − k), the symbol-side image of frame rotation.
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.values.len();
        Self {
            values: (0..n).map(|m| self.values[(m + n - k % n) % n]).collect(),
        }
    }
}

/// Plane rotation R(θ) ∈ SO(2) as a 2×2 matrix.
pub fn rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = C64::new(c, 0.0);
    m[(0, 1)] = C64::new(-s, 0.0);
    m[(1, 0)] = C64::new(s, 0.0);
    m[(1, 1)] = C64::new(c, 0.0);
    m
}

/// Frame quantization A_f = (2/N) Σ_n f(n) |θ_n⟩⟨θ_n|.
pub fn quantize_finite(
    f: &FiniteSymbol,
    frame: &PolygonFrame,
) -> Result<ComplexMatrix, FrameError> {
    if f.len() != frame.arm_count() {
        return Err(FrameError::LengthMismatch {
            symbol_len: f.len(),
            frame_len: frame.arm_count(),
        });
    }
    let mut acc = ComplexMatrix::zeros(2);
    for n in 0..frame.arm_count() {
        let coeff = C64::new(frame.weight(), 0.0) * f.value(n);
        acc = acc.add(&frame.projector(n)?.scale(coeff));
    }
    Ok(acc)
}

/// Lower symbol f̌(n) = ⟨θ_n| A |θ_n⟩.
pub fn lower_symbol_finite(
    a: &ComplexMatrix,
    frame: &PolygonFrame,
) -> Result<FiniteSymbol, FrameError> {
    if a.dim() != 2 {
        return Err(FrameError::NotPlanar(a.dim()));
    }
    let values = (0..frame.arm_count())
        .map(|n| {
            let v = frame.vector(n).expect("index in range");
            v.inner(&a.apply(v))
        })
        .collect();
    Ok(FiniteSymbol::new(values))
}

/// Closed-form lower symbol of A_f: the cos² convolution
/// f̌(n) = (2/N) Σ_m f(m) cos²(2π(n−m)/N).
pub fn lower_symbol_convolution(
    f: &FiniteSymbol,
    frame: &PolygonFrame,
) -> Result<FiniteSymbol, FrameError> {
    let arms = frame.arm_count();
    if f.len() != arms {
        return Err(FrameError::LengthMismatch {
            symbol_len: f.len(),
            frame_len: arms,
        });
    }
    let values = (0..arms)
        .map(|n| {
            (0..arms)
                .map(|m| {
                    let delta =
                        2.0 * std::f64::consts::PI * (n as f64 - m as f64) / arms as f64;
                    f.value(m) * (frame.weight() * delta.cos().powi(2))
                })
                .sum()
        })
        .collect();
    Ok(FiniteSymbol::new(values))
}

/// Overlap probability tr(P_{n₀} P_n) = cos²(2π(n₀−n)/N).
pub fn overlap_prob(n0: usize, n: usize, frame: &PolygonFrame) -> Result<f64, FrameError> {
    let p0 = frame.projector(n0)?;
    let pn = frame.projector(n)?;
    Ok(p0.mul(&pn).trace().re)
}

/// The commutative quantization from the orthonormal-basis frame:
/// (f(0), f(1)) ↦ diag(f(0), f(1)).
pub fn diagonal_quantization(f0: C64, f1: C64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[f0, f1])
}
