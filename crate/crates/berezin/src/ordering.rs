//! Operator-ordering schemes for classical monomials qᵐ pⁿ.
//!
//! The map qᵐpⁿ ↦ F(Q, P) is ambiguous once m, n ≥ 1; this module builds
//! the candidates and compares them against each other and against the
//! anti-Wick map. Comparisons are restricted to interior blocks of size
//! D − (m + n), where products of truncated ladder operators are still
//! exact.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::cs::quantize_cs;
use crate::fock::{annihilation, creation, momentum_op, position_op, FockParams};
use crate::linalg::ComplexMatrix;
use crate::quad::{QuadratureError, QuadratureScheme};
use crate::symbol::SymbolExpr;

#[derive(Debug, Error)]
pub enum OrderingError {
    #[error(
        "monomial q^{m} p^{n} needs an interior block of at least 2 at cutoff {cutoff}"
    )]
    BlockTooSmall { m: u32, n: u32, cutoff: usize },

    #[error(
        "the nested symmetrization is only defined for monomials with a single q factor, got q^{m} p^{n}"
    )]
    NestedUndefined { m: u32, n: u32 },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Ordering prescriptions for mixed monomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingScheme {
    /// Equal-weight average over all (m+n)!/(m!n!) interleavings.
    WeylSymmetric,
    /// ½ (Qᵐ Pⁿ + Pⁿ Qᵐ).
    SplitSymmetric,
    /// (1/(n+1)) Σ_k Pᵏ Q Pⁿ⁻ᵏ; defined for monomials with one q factor.
    NestedSymmetric,
    /// Annihilators left of creators after the z-substitution.
    Antinormal,
}

impl OrderingScheme {
    pub const ALL: [OrderingScheme; 4] = [
        OrderingScheme::WeylSymmetric,
        OrderingScheme::SplitSymmetric,
        OrderingScheme::NestedSymmetric,
        OrderingScheme::Antinormal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OrderingScheme::WeylSymmetric => "weyl_symmetric",
            OrderingScheme::SplitSymmetric => "split_symmetric",
            OrderingScheme::NestedSymmetric => "nested_symmetric",
            OrderingScheme::Antinormal => "antinormal",
        }
    }
}

fn matrix_power(base: &ComplexMatrix, n: u32) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(base.dim());
    for _ in 0..n {
        out = out.mul(base);
    }
    out
}

/// Uniform average over all interleavings of m Q-factors and n P-factors,
/// by the recursion W(m,n) = (m·Q·W(m−1,n) + n·P·W(m,n−1)) / (m+n).
fn weyl_average(
    m: u32,
    n: u32,
    q: &ComplexMatrix,
    p: &ComplexMatrix,
    memo: &mut BTreeMap<(u32, u32), ComplexMatrix>,
) -> ComplexMatrix {
    if let Some(hit) = memo.get(&(m, n)) {
        return hit.clone();
    }
    let result = if m == 0 && n == 0 {
        ComplexMatrix::identity(q.dim())
    } else {
        let total = (m + n) as f64;
        let mut acc = ComplexMatrix::zeros(q.dim());
        if m > 0 {
            let rest = weyl_average(m - 1, n, q, p, memo);
            acc = acc.add(&q.mul(&rest).scale(C64::new(m as f64 / total, 0.0)));
        }
        if n > 0 {
            let rest = weyl_average(m, n - 1, q, p, memo);
            acc = acc.add(&p.mul(&rest).scale(C64::new(n as f64 / total, 0.0)));
        }
        acc
    };
    memo.insert((m, n), result.clone());
    result
}

/// Builds the operator for qᵐ pⁿ under the chosen ordering scheme.
pub fn order_monomial(
    m: u32,
    n: u32,
    scheme: OrderingScheme,
    params: &FockParams,
) -> Result<ComplexMatrix, OrderingError> {
    let cutoff = params.cutoff();
    if (cutoff as u32) < m + n + 2 {
        return Err(OrderingError::BlockTooSmall { m, n, cutoff });
    }
    let q = position_op(params);
    let p = momentum_op(params);
    match scheme {
        OrderingScheme::WeylSymmetric => {
            let mut memo = BTreeMap::new();
            Ok(weyl_average(m, n, &q, &p, &mut memo))
        }
        OrderingScheme::SplitSymmetric => {
            let qm = matrix_power(&q, m);
            let pn = matrix_power(&p, n);
            Ok(qm.mul(&pn).add(&pn.mul(&qm)).scale(C64::new(0.5, 0.0)))
        }
        OrderingScheme::NestedSymmetric => {
            if m == 0 {
                return Ok(matrix_power(&p, n));
            }
            if n == 0 {
                return Ok(matrix_power(&q, m));
            }
            if m != 1 {
                return Err(OrderingError::NestedUndefined { m, n });
            }
            let mut acc = ComplexMatrix::zeros(cutoff);
            for k in 0..=n {
                let term = matrix_power(&p, k).mul(&q).mul(&matrix_power(&p, n - k));
                acc = acc.add(&term);
            }
            Ok(acc.scale(C64::new(1.0 / (n as f64 + 1.0), 0.0)))
        }
        OrderingScheme::Antinormal => {
            // classical substitution q^m p^n = Σ c_{jk} z^j z̄^k, each
            // monomial mapped to ħ^{(j+k)/2} a^j (a†)^k
            let expanded = SymbolExpr::qp_monomial(m, n)
                .expect("monomial degree already bounded by the cutoff")
                .substitute_scale(params.hbar().sqrt());
            let a = annihilation(params);
            let adag = creation(params);
            let mut acc = ComplexMatrix::zeros(cutoff);
            for (&(j, k), &c) in expanded.terms() {
                let term = matrix_power(&a, j).mul(&matrix_power(&adag, k));
                acc = acc.add(&term.scale(c));
            }
            Ok(acc)
        }
    }
}

/// Termwise ordering quantization of a polynomial through its (q, p)
/// coefficient view.
pub fn quantize_polynomial(
    f: &SymbolExpr,
    scheme: OrderingScheme,
    params: &FockParams,
) -> Result<ComplexMatrix, OrderingError> {
    let mut acc = ComplexMatrix::zeros(params.cutoff());
    for (&(m, n), &c) in f.qp_coefficients().iter() {
        acc = acc.add(&order_monomial(m, n, scheme, params)?.scale(c));
    }
    Ok(acc)
}

/// One scheme's entry in an ordering comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeEntry {
    pub scheme: String,
    /// Ascending spectrum on the comparison block; absent when the operator
    /// is not Hermitian there.
    pub spectrum: Option<Vec<f64>>,
    /// Set when the scheme is undefined for this symbol.
    pub skipped: Option<String>,
}

/// Pairwise max-entry difference between two quantization routes on the
/// comparison block.
#[derive(Debug, Clone, Serialize)]
pub struct PairDifference {
    pub left: String,
    pub right: String,
    pub max_abs_diff: f64,
}

/// Machine-readable ordering comparison for one symbol.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub symbol: String,
    pub cutoff: usize,
    pub block: usize,
    pub schemes: Vec<SchemeEntry>,
    pub differences: Vec<PairDifference>,
}

/// Quantizes `f` under every scheme plus the coherent-state map and reports
/// pairwise distances and spectra on the shared interior block.
pub fn compare_orderings(
    f: &SymbolExpr,
    params: &FockParams,
    quad: &QuadratureScheme,
) -> Result<OrderingReport, OrderingError> {
    let cutoff = params.cutoff();
    let degree = f.degree() as usize;
    if cutoff < degree + 2 {
        return Err(OrderingError::BlockTooSmall {
            m: f.degree(),
            n: 0,
            cutoff,
        });
    }
    let block = cutoff - degree;

    let mut operators: Vec<(String, Option<ComplexMatrix>, Option<String>)> = Vec::new();
    for scheme in OrderingScheme::ALL {
        match quantize_polynomial(f, scheme, params) {
            Ok(op) => operators.push((scheme.name().to_string(), Some(op), None)),
            Err(err @ OrderingError::NestedUndefined { .. }) => {
                operators.push((scheme.name().to_string(), None, Some(err.to_string())))
            }
            Err(err) => return Err(err),
        }
    }
    operators.push((
        "coherent_state".to_string(),
        Some(quantize_cs(f, params, quad)?),
        None,
    ));

    let schemes = operators
        .iter()
        .map(|(name, op, skipped)| SchemeEntry {
            scheme: name.clone(),
            spectrum: op.as_ref().and_then(|op| {
                op.leading_block(block).hermitian_eigenvalues(1e-8).ok()
            }),
            skipped: skipped.clone(),
        })
        .collect();

    let mut differences = Vec::new();
    for i in 0..operators.len() {
        for j in i + 1..operators.len() {
            if let (Some(a), Some(b)) = (&operators[i].1, &operators[j].1) {
                differences.push(PairDifference {
                    left: operators[i].0.clone(),
                    right: operators[j].0.clone(),
                    max_abs_diff: a.leading_block(block).max_abs_diff(&b.leading_block(block)),
                });
            }
        }
    }

    Ok(OrderingReport {
        symbol: f.to_string(),
        cutoff,
        block,
        schemes,
        differences,
    })
}
