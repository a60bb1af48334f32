//! Quantization against finite operator-valued measures.
//!
//! A measure here is a finite list of atoms (label, weight, operator) whose
//! weighted sum resolves the identity; continuous families enter through
//! their quadrature discretizations. The general map A_f = Σ w f(x) M(x)
//! reproduces both the finite-frame and the coherent-state quantizations
//! from the corresponding measures, which is the unification the rest of
//! the crate is checked against.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{self, FockParams};
use crate::frame::PolygonFrame;
use crate::io::OperatorJson;
use crate::linalg::{ComplexMatrix, Ket};
use crate::quad::QuadratureScheme;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("measure has no atoms")]
    Empty,

    #[error("atom {index} is invalid: {reason}")]
    AtomInvalid { index: usize, reason: String },

    #[error("measure dimension {measure_dim} does not match value count or operand dimension {other}")]
    DimensionMismatch { measure_dim: usize, other: usize },

    #[error(
        "measure does not resolve the identity: max deviation {deviation:.3e} exceeds tolerance {tolerance:.3e} (pass quantize_general_unchecked to override)"
    )]
    ResolutionFailed { deviation: f64, tolerance: f64 },

    #[error("failed to read measure file: {0}")]
    Io(#[from] std::io::Error),

    #[error("measure file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("measure file is malformed: {0}")]
    Schema(String),
}

/// Validation flags for a measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureFlags {
    /// Require every atom operator to be positive semidefinite.
    pub require_positive: bool,
    /// Require every atom operator to have unit trace (density matrices).
    pub require_unit_trace: bool,
    /// Tolerance for the resolution-of-identity check.
    pub resolution_tol: f64,
}

impl Default for MeasureFlags {
    fn default() -> Self {
        Self {
            require_positive: true,
            require_unit_trace: false,
            resolution_tol: 1e-10,
        }
    }
}

/// One atom of an operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureAtom {
    pub label: String,
    pub weight: f64,
    pub op: ComplexMatrix,
}

/// Finite operator-valued measure with validated atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorValuedMeasure {
    dim: usize,
    atoms: Vec<MeasureAtom>,
    flags: MeasureFlags,
}

impl OperatorValuedMeasure {
    /// Validates the atoms against the flags: positive finite weights,
    /// common dimension, positivity and unit trace where required. The
    /// resolution of identity is checked separately and on demand.
    pub fn new(atoms: Vec<MeasureAtom>, flags: MeasureFlags) -> Result<Self, MeasureError> {
        let dim = atoms.first().map(|a| a.op.dim()).ok_or(MeasureError::Empty)?;
        for (index, atom) in atoms.iter().enumerate() {
            let fail = |reason: String| MeasureError::AtomInvalid { index, reason };
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(fail(format!(
                    "weight must be positive and finite, got {}",
                    atom.weight
                )));
            }
            if atom.op.dim() != dim {
                return Err(fail(format!(
                    "operator dimension {} differs from measure dimension {dim}",
                    atom.op.dim()
                )));
            }
            if flags.require_positive {
                let scale = atom.op.max_abs().max(1.0);
                let eigs = atom
                    .op
                    .hermitian_eigenvalues(1e-8)
                    .map_err(|e| fail(format!("positivity requires a Hermitian operator: {e}")))?;
                if eigs[0] < -1e-10 * scale {
                    return Err(fail(format!(
                        "operator is not positive semidefinite: min eigenvalue {:.3e}",
                        eigs[0]
                    )));
                }
            }
            if flags.require_unit_trace {
                let trace = atom.op.trace();
                if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
                    return Err(fail(format!("trace {trace} is not 1 within 1e-10")));
                }
            }
        }
        Ok(Self { dim, atoms, flags })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[MeasureAtom] {
        &self.atoms
    }

    pub fn flags(&self) -> MeasureFlags {
        self.flags
    }

    /// Weighted operator sum Σ w·M.
    fn total(&self) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(self.dim);
        for atom in &self.atoms {
            sum = sum.add(&atom.op.scale(C64::new(atom.weight, 0.0)));
        }
        sum
    }
}

/// Deviation report for the resolution of identity Σ w·M = I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionReport {
    pub max_entry_deviation: f64,
    pub spectral_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks Σ w·M = I and reports entrywise and spectral deviations against
/// the measure's declared tolerance.
pub fn check_resolution(measure: &OperatorValuedMeasure) -> ResolutionReport {
    let deviation = measure.total().sub(&ComplexMatrix::identity(measure.dim()));
    let max_entry = deviation.max_abs();
    let spectral = deviation.spectral_norm();
    let tolerance = measure.flags().resolution_tol;
    ResolutionReport {
        max_entry_deviation: max_entry,
        spectral_deviation: spectral,
        tolerance,
        passed: max_entry <= tolerance,
    }
}

/// General integral quantization A_f = Σ w f(x) M(x).
///
/// Gated on the resolution check; use [`quantize_general_unchecked`] to
/// quantize against a measure that deliberately fails it.
pub fn quantize_general(
    values: &[C64],
    measure: &OperatorValuedMeasure,
) -> Result<ComplexMatrix, MeasureError> {
    let report = check_resolution(measure);
    if !report.passed {
        return Err(MeasureError::ResolutionFailed {
            deviation: report.max_entry_deviation,
            tolerance: report.tolerance,
        });
    }
    quantize_general_unchecked(values, measure)
}

/// [`quantize_general`] without the resolution gate; linearity and
/// A_1 = Σ w·M are all that survives for unresolved or non-positive
/// measures.
pub fn quantize_general_unchecked(
    values: &[C64],
    measure: &OperatorValuedMeasure,
) -> Result<ComplexMatrix, MeasureError> {
    if values.len() != measure.atoms().len() {
        return Err(MeasureError::DimensionMismatch {
            measure_dim: measure.atoms().len(),
            other: values.len(),
        });
    }
    let mut acc = ComplexMatrix::zeros(measure.dim());
    for (atom, &value) in measure.atoms().iter().zip(values) {
        let coeff = C64::new(atom.weight, 0.0) * value;
        acc = acc.add(&atom.op.scale(coeff));
    }
    Ok(acc)
}

/// Sesquilinear form B_f(ψ₁, ψ₂) = Σ w f(x) ⟨ψ₁|M(x)|ψ₂⟩, the weak-sense
/// reading of the quantization integral.
pub fn sesquilinear_form(
    psi1: &Ket,
    values: &[C64],
    psi2: &Ket,
    measure: &OperatorValuedMeasure,
) -> Result<C64, MeasureError> {
    if values.len() != measure.atoms().len() {
        return Err(MeasureError::DimensionMismatch {
            measure_dim: measure.atoms().len(),
            other: values.len(),
        });
    }
    if psi1.dim() != measure.dim() || psi2.dim() != measure.dim() {
        return Err(MeasureError::DimensionMismatch {
            measure_dim: measure.dim(),
            other: psi1.dim().max(psi2.dim()),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (atom, &value) in measure.atoms().iter().zip(values) {
        let element = psi1.inner(&atom.op.apply(psi2));
        acc += C64::new(atom.weight, 0.0) * value * element;
    }
    Ok(acc)
}

/// The N-fold polygon frame as an operator-valued measure: labels 0…N−1,
/// weight 2/N, atom operators the arm projectors.
pub fn polygon_measure(frame: &PolygonFrame) -> OperatorValuedMeasure {
    let atoms = (0..frame.arm_count())
        .map(|n| MeasureAtom {
            label: n.to_string(),
            weight: frame.weight(),
            op: frame.projector(n).expect("index in range"),
        })
        .collect();
    OperatorValuedMeasure::new(atoms, MeasureFlags::default())
        .expect("polygon atoms are valid projectors")
}

/// Discretization of the coherent-state family as a measure: one atom per
/// quadrature node, with the truncated projector |z⟩⟨z| and the Laguerre
/// weight re-exponentiated against the projector's Gaussian.
///
/// Labels carry the node's phase-space point. The atoms are positive but
/// not unit-trace: far outside the adequate disk the truncated projector
/// loses its mass, while the resolution of identity still holds exactly by
/// quadrature.
pub fn coherent_measure(
    params: &FockParams,
    quad: &QuadratureScheme,
) -> OperatorValuedMeasure {
    let t_total = quad.angular_count() as f64;
    let mut atoms = Vec::new();
    for &(u, w) in quad.radial_nodes() {
        if w == 0.0 {
            continue;
        }
        let weight = (w.ln() + u).exp() / t_total;
        let r = u.sqrt();
        for t in 0..quad.angular_count() {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / t_total;
            let z = C64::from_polar(r, theta);
            let ket = fock::coherent_ket(z, params);
            atoms.push(MeasureAtom {
                label: format!("z={}", C64::from_polar(r, theta)),
                weight,
                op: ket.projector(),
            });
        }
    }
    let flags = MeasureFlags {
        require_positive: true,
        require_unit_trace: false,
        resolution_tol: 1e-10,
    };
    OperatorValuedMeasure::new(atoms, flags).expect("coherent atoms are valid projectors")
}

/// Evaluates a symbol at the phase-space labels of [`coherent_measure`],
/// in atom order.
pub fn coherent_measure_values(
    f: &crate::symbol::SymbolExpr,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Vec<C64> {
    let fs = f.substitute_scale(params.hbar().sqrt());
    let t_total = quad.angular_count() as f64;
    let mut values = Vec::new();
    for &(u, w) in quad.radial_nodes() {
        if w == 0.0 {
            continue;
        }
        let r = u.sqrt();
        for t in 0..quad.angular_count() {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / t_total;
            values.push(fs.eval(C64::from_polar(r, theta)));
        }
    }
    values
}

#[derive(Debug, Serialize, Deserialize)]
struct AtomJson {
    label: String,
    weight: f64,
    op: OperatorJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasureJson {
    dim: usize,
    atoms: Vec<AtomJson>,
    flags: MeasureFlags,
}

/// Serializes a measure into the JSON schema
/// `{"dim", "atoms": [{"label", "weight", "op"}], "flags"}`.
pub fn measure_to_json(measure: &OperatorValuedMeasure) -> String {
    let doc = MeasureJson {
        dim: measure.dim(),
        atoms: measure
            .atoms()
            .iter()
            .map(|a| AtomJson {
                label: a.label.clone(),
                weight: a.weight,
                op: OperatorJson::from_matrix(&a.op),
            })
            .collect(),
        flags: measure.flags(),
    };
    serde_json::to_string_pretty(&doc).expect("measure serialization is infallible")
}

/// Parses and validates a measure from its JSON text; errors name the
/// offending atom where applicable.
pub fn measure_from_json(text: &str) -> Result<OperatorValuedMeasure, MeasureError> {
    let doc: MeasureJson = serde_json::from_str(text)?;
    let mut atoms = Vec::with_capacity(doc.atoms.len());
    for (index, atom) in doc.atoms.into_iter().enumerate() {
        let op = atom
            .op
            .to_matrix()
            .map_err(|e| MeasureError::AtomInvalid {
                index,
                reason: e.to_string(),
            })?;
        if op.dim() != doc.dim {
            return Err(MeasureError::AtomInvalid {
                index,
                reason: format!("operator dimension {} differs from header dim {}", op.dim(), doc.dim),
            });
        }
        atoms.push(MeasureAtom {
            label: atom.label,
            weight: atom.weight,
            op,
        });
    }
    if atoms.is_empty() {
        return Err(MeasureError::Schema("measure has no atoms".to_string()));
    }
    OperatorValuedMeasure::new(atoms, doc.flags)
}

pub fn save_measure(
    measure: &OperatorValuedMeasure,
    path: impl AsRef<std::path::Path>,
) -> Result<(), MeasureError> {
    std::fs::write(path, measure_to_json(measure))?;
    Ok(())
}

pub fn load_measure(
    path: impl AsRef<std::path::Path>,
) -> Result<OperatorValuedMeasure, MeasureError> {
    let text = std::fs::read_to_string(path)?;
    measure_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{quantize_finite, FiniteSymbol};
    use crate::symbol;

    fn identity_atom_measure() -> OperatorValuedMeasure {
        OperatorValuedMeasure::new(
            vec![MeasureAtom {
                label: "all".into(),
                weight: 1.0,
                op: ComplexMatrix::identity(3),
            }],
            MeasureFlags::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_identity_atom_resolves() {
        let report = check_resolution(&identity_atom_measure());
        assert_eq!(report.max_entry_deviation, 0.0);
        assert!(report.passed);
    }

    #[test]
    fn polygon_measure_resolves() {
        let frame = PolygonFrame::new(5).unwrap();
        let report = check_resolution(&polygon_measure(&frame));
        assert!(report.max_entry_deviation <= 1e-14);
        assert!(report.passed);
    }

    #[test]
    fn coherent_measure_resolves() {
        let params = FockParams::with_cutoff(16).unwrap();
        let quad = QuadratureScheme::default_for_cutoff(16);
        let report = check_resolution(&coherent_measure(&params, &quad));
        assert!(
            report.max_entry_deviation <= 1e-10,
            "deviation {:.3e}",
            report.max_entry_deviation
        );
    }

    #[test]
    fn unit_values_reproduce_identity() {
        let frame = PolygonFrame::new(7).unwrap();
        let m = polygon_measure(&frame);
        let ones = vec![C64::new(1.0, 0.0); 7];
        let a = quantize_general(&ones, &m).unwrap();
        assert!(a.max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-14);
    }

    #[test]
    fn polygon_measure_reproduces_finite_quantization_exactly() {
        let frame = PolygonFrame::new(5).unwrap();
        let m = polygon_measure(&frame);
        let f = FiniteSymbol::new(vec![
            C64::new(0.3, 1.0),
            C64::new(-2.0, 0.0),
            C64::new(0.0, 0.5),
            C64::new(1.25, -1.25),
            C64::new(4.0, 0.0),
        ]);
        let via_measure = quantize_general(f.values(), &m).unwrap();
        let via_frame = quantize_finite(&f, &frame).unwrap();
        assert_eq!(via_measure.max_abs_diff(&via_frame), 0.0);
    }

    #[test]
    fn coherent_measure_reproduces_cs_quantization() {
        let params = FockParams::with_cutoff(12).unwrap();
        let quad = QuadratureScheme::default_for_cutoff(12);
        let f = symbol::parse("z*zbar + 0.5*q").unwrap();
        let m = coherent_measure(&params, &quad);
        let values = coherent_measure_values(&f, &params, &quad);
        let via_measure = quantize_general(&values, &m).unwrap();
        let via_cs = crate::cs::quantize_cs(&f, &params, &quad).unwrap();
        let diff = via_measure.max_abs_diff(&via_cs);
        assert!(diff <= 1e-10, "reduction defect {diff:.3e}");
    }

    #[test]
    fn value_count_mismatch_is_rejected() {
        let m = identity_atom_measure();
        let err = quantize_general(&[C64::new(1.0, 0.0); 2], &m).unwrap_err();
        assert!(matches!(err, MeasureError::DimensionMismatch { .. }));
    }

    #[test]
    fn perturbed_measure_fails_resolution_but_can_be_overridden() {
        let frame = PolygonFrame::new(5).unwrap();
        let mut atoms: Vec<MeasureAtom> = polygon_measure(&frame).atoms().to_vec();
        atoms[2].weight *= 1.5;
        let m = OperatorValuedMeasure::new(atoms, MeasureFlags::default()).unwrap();
        let report = check_resolution(&m);
        assert!(!report.passed);
        assert!(report.max_entry_deviation > 1e-3);
        let ones = vec![C64::new(1.0, 0.0); 5];
        assert!(matches!(
            quantize_general(&ones, &m),
            Err(MeasureError::ResolutionFailed { .. })
        ));
        assert!(quantize_general_unchecked(&ones, &m).is_ok());
    }

    #[test]
    fn sesquilinear_form_against_operator_sandwich() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let frame = PolygonFrame::new(6).unwrap();
        let m = polygon_measure(&frame);
        for _ in 0..10 {
            let values: Vec<C64> = (0..6)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let psi1 = Ket::from_amplitudes(vec![
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            let psi2 = Ket::from_amplitudes(vec![
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            let form = sesquilinear_form(&psi1, &values, &psi2, &m).unwrap();
            let sandwich = psi1.inner(
                &quantize_general(&values, &m).unwrap().apply(&psi2),
            );
            assert!((form - sandwich).norm() <= 1e-12 * sandwich.norm().max(1.0));
        }
    }

    #[test]
    fn sesquilinear_form_of_unity_is_the_inner_product() {
        let frame = PolygonFrame::new(4).unwrap();
        let m = polygon_measure(&frame);
        let ones = vec![C64::new(1.0, 0.0); 4];
        let psi1 = Ket::from_amplitudes(vec![C64::new(0.6, 0.3), C64::new(-0.2, 0.7)]);
        let psi2 = Ket::from_amplitudes(vec![C64::new(0.1, -0.4), C64::new(0.9, 0.0)]);
        let form = sesquilinear_form(&psi1, &ones, &psi2, &m).unwrap();
        assert!((form - psi1.inner(&psi2)).norm() <= 1e-14);
    }

    #[test]
    fn hermitian_case_gives_real_diagonal_form() {
        let frame = PolygonFrame::new(5).unwrap();
        let m = polygon_measure(&frame);
        let values: Vec<C64> = [0.5, -1.0, 2.0, 0.0, 3.5]
            .iter()
            .map(|&v| C64::new(v, 0.0))
            .collect();
        let raw = Ket::from_amplitudes(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25)]);
        let psi = raw.scale(C64::new(1.0 / raw.norm(), 0.0));
        let form = sesquilinear_form(&psi, &values, &psi, &m).unwrap();
        assert!(form.im.abs() <= 1e-14);
    }

    #[test]
    fn json_round_trip_is_bitwise_on_numeric_fields() {
        let frame = PolygonFrame::new(5).unwrap();
        let m = polygon_measure(&frame);
        let text = measure_to_json(&m);
        let back = measure_from_json(&text).unwrap();
        assert_eq!(m, back);
        // and a second serialization is byte-identical
        assert_eq!(text, measure_to_json(&back));
    }

    #[test]
    fn malformed_atoms_are_reported_by_index() {
        let frame = PolygonFrame::new(4).unwrap();
        let mut doc: serde_json::Value =
            serde_json::from_str(&measure_to_json(&polygon_measure(&frame))).unwrap();
        doc["atoms"][2]["weight"] = serde_json::json!(-0.5);
        let err = measure_from_json(&doc.to_string()).unwrap_err();
        match err {
            MeasureError::AtomInvalid { index, .. } => assert_eq!(index, 2),
            other => panic!("unexpected error {other}"),
        }
        // operator dims must agree with the header
        let mut doc: serde_json::Value =
            serde_json::from_str(&measure_to_json(&polygon_measure(&frame))).unwrap();
        doc["dim"] = serde_json::json!(3);
        let err = measure_from_json(&doc.to_string()).unwrap_err();
        assert!(matches!(err, MeasureError::AtomInvalid { index: 0, .. }));
    }

    #[test]
    fn negative_operators_require_the_permissive_flag() {
        let negative = ComplexMatrix::diagonal(&[C64::new(-1.0, 0.0), C64::new(2.0, 0.0)]);
        let atom = MeasureAtom {
            label: "neg".into(),
            weight: 1.0,
            op: negative,
        };
        let strict = OperatorValuedMeasure::new(vec![atom.clone()], MeasureFlags::default());
        assert!(matches!(strict, Err(MeasureError::AtomInvalid { .. })));

        let permissive = MeasureFlags {
            require_positive: false,
            ..MeasureFlags::default()
        };
        // the measure loads; only linearity and A_1 = Σ wM are claimed
        let m = OperatorValuedMeasure::new(vec![atom], permissive).unwrap();
        let a = quantize_general_unchecked(&[C64::new(1.0, 0.0)], &m).unwrap();
        assert_eq!(a.max_abs_diff(&m.total()), 0.0);
        let doubled = quantize_general_unchecked(&[C64::new(2.0, 0.0)], &m).unwrap();
        assert_eq!(doubled.max_abs_diff(&a.scale(C64::new(2.0, 0.0))), 0.0);
    }

    #[test]
    fn unit_trace_flag_accepts_densities_and_rejects_projectile_sums() {
        let frame = PolygonFrame::new(5).unwrap();
        let flags = MeasureFlags {
            require_unit_trace: true,
            ..MeasureFlags::default()
        };
        // arm projectors are rank-one densities: unit trace holds
        let atoms: Vec<MeasureAtom> = polygon_measure(&frame).atoms().to_vec();
        assert!(OperatorValuedMeasure::new(atoms, flags).is_ok());
        // a doubled projector is not a density
        let bad = MeasureAtom {
            label: "2P".into(),
            weight: 0.5,
            op: frame.projector(0).unwrap().scale(C64::new(2.0, 0.0)),
        };
        assert!(matches!(
            OperatorValuedMeasure::new(vec![bad], flags),
            Err(MeasureError::AtomInvalid { .. })
        ));
    }
}
