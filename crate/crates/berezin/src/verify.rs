//! Built-in verification suites.
//!
//! Each suite pins one identity of the toolkit with its tolerance fixed in
//! code: frame resolutions, the anti-normal signature, Berezin shifts, the
//! Dirac correspondence, measure reductions, and the rest. The CLI `verify`
//! mode and the acceptance test target both run these; randomness is
//! seeded, so repeated runs produce identical reports.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cs;
use crate::fock::{self, FockParams, OscillatorParams};
use crate::frame::{self, FiniteSymbol, PolygonFrame};
use crate::linalg::ComplexMatrix;
use crate::measure;
use crate::ordering::{self, OrderingScheme};
use crate::prime::{self, BorelRegion};
use crate::quad::QuadratureScheme;
use crate::symbol::{self, SymbolExpr};

/// Outcome of one verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u32, name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id,
            name,
            passed,
            detail,
        }
    }
}

pub const CRITERION_COUNT: u32 = 13;

/// Runs one suite by its 1-based id; panics on ids outside 1..=13.
pub fn run_criterion(id: u32) -> CriterionResult {
    match id {
        1 => frame_resolution(),
        2 => lower_symbol_convolution(),
        3 => overlap_law(),
        4 => cs_unit_quantization(),
        5 => antinormal_signature(),
        6 => canonical_pair(),
        7 => berezin_shift(),
        8 => trajectory(),
        9 => heisenberg_saturation(),
        10 => prime_cs_unification(),
        11 => dirac_correspondence(),
        12 => ordering_equivalence(),
        13 => measure_reductions(),
        other => panic!("criterion id {other} out of range 1..={CRITERION_COUNT}"),
    }
}

/// Runs every suite in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERION_COUNT).map(run_criterion).collect()
}

/// Renders the fixed-format report table, one line per criterion.
pub fn format_report(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "criterion {:>2} {} {:<24} {}\n",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        out.push_str(&format!("all {} criteria passed\n", results.len()));
    } else {
        out.push_str(&format!("{failed} of {} criteria failed\n", results.len()));
    }
    out
}

fn rng_for(id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xB39E_2100 + id)
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn frame_resolution() -> CriterionResult {
    let mut worst = 0.0f64;
    let mut pass = true;
    for n in 3..=64 {
        let defect = PolygonFrame::new(n)
            .expect("N ≥ 3 is valid")
            .resolution_defect();
        worst = worst.max(defect);
        if defect > 1e-14 {
            pass = false;
        }
    }
    let rejects_two = PolygonFrame::new(2).is_err();
    pass &= rejects_two;
    CriterionResult::new(
        1,
        "finite-frame resolution",
        pass,
        format!(
            "max defect {worst:.3e} over N = 3..=64 (tol 1e-14); N = 2 rejected: {rejects_two}"
        ),
    )
}

fn lower_symbol_convolution() -> CriterionResult {
    let frame = PolygonFrame::new(5).expect("five-fold frame");
    let mut rng = rng_for(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = FiniteSymbol::new((0..5).map(|_| random_c64(&mut rng)).collect());
        let sandwich = frame::lower_symbol_finite(
            &frame::quantize_finite(&f, &frame).expect("lengths match"),
            &frame,
        )
        .expect("planar");
        let convolution = frame::lower_symbol_convolution(&f, &frame).expect("lengths match");
        for n in 0..5 {
            worst = worst.max((sandwich.value(n) - convolution.value(n)).norm());
        }
    }
    CriterionResult::new(
        2,
        "lower-symbol convolution",
        worst <= 1e-14,
        format!("max |sandwich − cos² convolution| = {worst:.3e} over 20 random symbols (tol 1e-14)"),
    )
}

fn overlap_law() -> CriterionResult {
    let frame = PolygonFrame::new(5).expect("five-fold frame");
    let mut worst = 0.0f64;
    for n0 in 0..5 {
        for n in 0..5 {
            let got = frame::overlap_prob(n0, n, &frame).expect("indices valid");
            let expected = (2.0 * std::f64::consts::PI * (n0 as f64 - n as f64) / 5.0)
                .cos()
                .powi(2);
            worst = worst.max((got - expected).abs());
        }
    }
    let adjacent = frame::overlap_prob(0, 1, &frame).expect("indices valid");
    let frozen_dev = (adjacent - 0.0954915).abs();
    let pass = worst <= 1e-14 && frozen_dev <= 5e-8;
    CriterionResult::new(
        3,
        "overlap law",
        pass,
        format!(
            "max |tr(P P) − cos²| = {worst:.3e} (tol 1e-14); adjacent arms {adjacent:.7} vs 0.0954915"
        ),
    )
}

fn cs_unit_quantization() -> CriterionResult {
    let params = FockParams::with_cutoff(32).expect("D = 32");
    let quad = QuadratureScheme::default_for_cutoff(32);
    let a = cs::quantize_cs(&SymbolExpr::one(), &params, &quad).expect("covered");
    let defect = a.max_abs_diff(&ComplexMatrix::identity(32));
    CriterionResult::new(
        4,
        "CS unit quantization",
        defect <= 1e-12,
        format!("|A_1 − I| = {defect:.3e} at D = 32 (tol 1e-12)"),
    )
}

fn antinormal_signature() -> CriterionResult {
    let d = 32;
    let params = FockParams::with_cutoff(d).expect("D = 32");
    let quad = QuadratureScheme::default_for_cutoff(d);
    let a_op = fock::annihilation(&params);
    let adag = fock::creation(&params);
    let mut worst = 0.0f64;
    for k in 0..=4u32 {
        for j in 0..=4u32 {
            let f = SymbolExpr::monomial(k, j, C64::new(1.0, 0.0));
            let quantized = cs::quantize_cs(&f, &params, &quad).expect("covered");
            let mut ladder = ComplexMatrix::identity(d);
            for _ in 0..k {
                ladder = a_op.mul(&ladder);
            }
            for _ in 0..j {
                ladder = ladder.mul(&adag);
            }
            let block = d - j.max(k) as usize;
            worst = worst.max(
                quantized
                    .leading_block(block)
                    .max_abs_diff(&ladder.leading_block(block)),
            );
        }
    }
    // the |z|² case lands on diag(n+1) in particular
    let number = cs::quantize_cs(
        &symbol::parse("z*zbar").expect("grammar"),
        &params,
        &quad,
    )
    .expect("covered");
    let shifted = ComplexMatrix::from_fn(d, |i, j| {
        if i == j {
            C64::new(i as f64 + 1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let number_defect = number.max_abs_diff(&shifted);
    let pass = worst <= 1e-10 && number_defect <= 1e-10;
    CriterionResult::new(
        5,
        "anti-normal signature",
        pass,
        format!(
            "max |A - a^k a†^j| = {worst:.3e} for j,k ≤ 4 (tol 1e-10); |A_zz̄ − diag(n+1)| = {number_defect:.3e}"
        ),
    )
}

fn canonical_pair() -> CriterionResult {
    let d = 32;
    let quad = QuadratureScheme::default_for_cutoff(d);
    let mut worst = 0.0f64;
    for hbar in [1.0, 0.5] {
        let params = FockParams::new(d, hbar).expect("valid hbar");
        let aq = cs::quantize_cs(&SymbolExpr::q(), &params, &quad).expect("covered");
        let ap = cs::quantize_cs(&SymbolExpr::p(), &params, &quad).expect("covered");
        let comm = aq.commutator(&ap).leading_block(d - 1);
        let expected = ComplexMatrix::identity(d - 1).scale(C64::new(0.0, hbar));
        worst = worst.max(comm.max_abs_diff(&expected));
    }
    CriterionResult::new(
        6,
        "canonical pair",
        worst <= 1e-10,
        format!("max |[A_q, A_p] − iħI| = {worst:.3e} for ħ ∈ {{1, ½}} (tol 1e-10)"),
    )
}

fn berezin_shift() -> CriterionResult {
    let d = 64;
    let params = FockParams::with_cutoff(d).expect("D = 64");
    let quad = QuadratureScheme::default_for_cutoff(d);
    let f = symbol::parse("z*zbar").expect("grammar");
    let a = cs::quantize_cs(&f, &params, &quad).expect("covered");
    let mut worst_shift = 0.0f64;
    for i in 0..50 {
        let r = 2.0 * (i + 1) as f64 / 50.0;
        let theta = 2.0 * std::f64::consts::PI * i as f64 / 50.0;
        let z = C64::from_polar(r, theta);
        let lower = cs::lower_symbol(&a, z, &params).value;
        worst_shift = worst_shift.max((lower - C64::new(z.norm_sqr() + 1.0, 0.0)).norm());
    }

    let z_scan = C64::new(1.0, 1.0);
    let scan = cs::semiclassical_scan(&f, z_scan, &[1.0, 0.5, 0.25], &params, &quad)
        .expect("covered");
    let mut worst_rel = 0.0f64;
    for pt in &scan {
        let predicted = pt.hbar / z_scan.norm_sqr();
        let got = pt.rel_error.expect("reference nonzero");
        worst_rel = worst_rel.max((got - predicted).abs() / predicted);
    }
    let pass = worst_shift <= 1e-8 && worst_rel <= 0.01;
    CriterionResult::new(
        7,
        "Berezin shift",
        pass,
        format!(
            "max |⟨z|A|z⟩ − (|z|²+ħ)| = {worst_shift:.3e} on 50 points (tol 1e-8); semiclassical error off by {worst_rel:.3e} relative (tol 1e-2)"
        ),
    )
}

fn trajectory() -> CriterionResult {
    let params = FockParams::with_cutoff(48).expect("D = 48");
    let osc = OscillatorParams::new(1.0, 1.0).expect("unit oscillator");
    let grid: Vec<f64> = (0..100)
        .map(|k| 4.0 * std::f64::consts::PI * k as f64 / 99.0)
        .collect();
    let check = cs::trajectory_check(C64::new(1.0, 0.0), &osc, &params, &grid);
    CriterionResult::new(
        8,
        "classical trajectory",
        check.max_deviation <= 1e-8,
        format!(
            "max |⟨Q(t)⟩ − √2 cos t| = {:.3e} over 100 points, D = 48 (tol 1e-8)",
            check.max_deviation
        ),
    )
}

fn heisenberg_saturation() -> CriterionResult {
    let params = FockParams::with_cutoff(64).expect("D = 64");
    let mut rng = rng_for(9);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let r = 2.0 * rng.gen_range(0.0f64..1.0).sqrt();
        let theta = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        let z = C64::from_polar(r, theta);
        let sat = fock::heisenberg_saturation(z, &params);
        worst = worst.max((sat.product - 0.5).abs());
    }
    CriterionResult::new(
        9,
        "Heisenberg saturation",
        worst <= 1e-8,
        format!("max |ΔQ·ΔP − ħ/2| = {worst:.3e} on 10 random z, |z| ≤ 2 (tol 1e-8)"),
    )
}

fn prime_cs_unification() -> CriterionResult {
    let d = 16;
    let params = FockParams::with_cutoff(d).expect("D = 16");
    let quad = QuadratureScheme::default_for_cutoff(d);
    let mut rng = rng_for(10);
    let mut worst_map = 0.0f64;
    for _ in 0..20 {
        let mut f = SymbolExpr::zero();
        for j in 0..=4u32 {
            for k in 0..=(4 - j) {
                f = f.add(&SymbolExpr::monomial(j, k, random_c64(&mut rng)));
            }
        }
        let via_prime = prime::prime_quantize(&f, &params, &quad).expect("covered");
        let via_cs = cs::quantize_cs(&f, &params, &quad).expect("covered");
        worst_map = worst_map.max(via_prime.max_abs_diff(&via_cs));
    }

    // localization diagonals against the incomplete-gamma closed form
    let mut worst_loc = 0.0f64;
    for r in [0.5f64, 1.0, 2.0] {
        let region = BorelRegion::disk(r).expect("valid disk");
        let a = prime::localization_operator(&region, &params, &quad).expect("covered");
        let x = r * r;
        for n in 0..=8usize {
            // P(n+1, x) = 1 − e^{−x} Σ_{k≤n} x^k/k!
            let mut term = (-x).exp();
            let mut sum = term;
            for k in 1..=n {
                term *= x / k as f64;
                sum += term;
            }
            let expected = 1.0 - sum;
            worst_loc = worst_loc.max((a[(n, n)] - C64::new(expected, 0.0)).norm());
        }
    }
    let pass = worst_map <= 1e-12 && worst_loc <= 1e-10;
    CriterionResult::new(
        10,
        "prime/CS unification",
        pass,
        format!(
            "max |prime − CS| = {worst_map:.3e} on 20 random deg ≤ 4 polynomials (tol 1e-12); localization vs incomplete gamma {worst_loc:.3e} (tol 1e-10)"
        ),
    )
}

fn dirac_correspondence() -> CriterionResult {
    let d = 32;
    let params = FockParams::with_cutoff(d).expect("D = 32");
    let quad = QuadratureScheme::default_for_cutoff(d);
    let q = SymbolExpr::q();
    let p = SymbolExpr::p();
    let q2 = symbol::parse("q^2").expect("grammar");
    let p2 = symbol::parse("p^2").expect("grammar");
    let res_linear = prime::dirac_residual(&q, &p, 1.0, &params, &quad)
        .expect("block fits")
        .residual_norm;
    let res_quadratic = prime::dirac_residual(&q2, &p2, 1.0, &params, &quad)
        .expect("block fits")
        .residual_norm;

    let q3 = symbol::parse("q^3").expect("grammar");
    let p3 = symbol::parse("p^3").expect("grammar");
    let hbars = [1.0f64, 0.5, 0.25];
    let residuals: Vec<f64> = hbars
        .iter()
        .map(|&h| {
            prime::dirac_residual(&q3, &p3, h, &params, &quad)
                .expect("block fits")
                .residual_norm
        })
        .collect();
    // least-squares slope of ln(residual) against ln(ħ)
    let xs: Vec<f64> = hbars.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xbar).powi(2)).sum::<f64>();

    let pass = res_linear <= 1e-10 && res_quadratic <= 1e-10 && slope >= 2.0 - 0.1;
    CriterionResult::new(
        11,
        "Dirac correspondence",
        pass,
        format!(
            "residuals: (q,p) {res_linear:.3e}, (q²,p²) {res_quadratic:.3e} (tol 1e-10); (q³,p³) ħ-exponent {slope:.3} (≥ 1.9)"
        ),
    )
}

fn ordering_equivalence() -> CriterionResult {
    let d = 16;
    let params = FockParams::with_cutoff(d).expect("D = 16");
    let quad = QuadratureScheme::default_for_cutoff(d);
    let q_op = fock::position_op(&params);
    let p_op = fock::momentum_op(&params);
    let block = d - 3;

    let pqp = p_op.mul(&q_op).mul(&p_op).leading_block(block);
    let qp2 = q_op.mul(&p_op).mul(&p_op);
    let p2q = p_op.mul(&p_op).mul(&q_op);
    let half = qp2.add(&p2q).scale(C64::new(0.5, 0.0)).leading_block(block);
    let quarter = qp2
        .add(&p_op.mul(&q_op).mul(&p_op).scale(C64::new(2.0, 0.0)))
        .add(&p2q)
        .scale(C64::new(0.25, 0.0))
        .leading_block(block);
    let weyl = ordering::order_monomial(1, 2, OrderingScheme::WeylSymmetric, &params)
        .expect("block fits")
        .leading_block(block);
    let worst_sym = [
        half.max_abs_diff(&pqp),
        quarter.max_abs_diff(&pqp),
        weyl.max_abs_diff(&pqp),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);

    let f = symbol::parse("q*p^2").expect("grammar");
    let anti = ordering::quantize_polynomial(&f, OrderingScheme::Antinormal, &params)
        .expect("block fits");
    let via_cs = cs::quantize_cs(&f, &params, &quad).expect("covered");
    let anti_defect = anti
        .leading_block(block)
        .max_abs_diff(&via_cs.leading_block(block));

    let pass = worst_sym <= 1e-12 && anti_defect <= 1e-10;
    CriterionResult::new(
        12,
        "ordering equivalence",
        pass,
        format!(
            "symmetrizations vs PQP: {worst_sym:.3e} (tol 1e-12); antinormal vs CS: {anti_defect:.3e} (tol 1e-10)"
        ),
    )
}

fn measure_reductions() -> CriterionResult {
    // polygon measure: exact reproduction through the JSON export
    let frame = PolygonFrame::new(5).expect("five-fold frame");
    let polygon = measure::polygon_measure(&frame);
    let polygon_json = measure::measure_to_json(&polygon);
    let polygon_back = measure::measure_from_json(&polygon_json).expect("round trip");
    let mut rng = rng_for(13);
    let f = FiniteSymbol::new((0..5).map(|_| random_c64(&mut rng)).collect());
    let via_measure =
        measure::quantize_general(f.values(), &polygon_back).expect("resolved");
    let via_frame = frame::quantize_finite(&f, &frame).expect("lengths match");
    let finite_defect = via_measure.max_abs_diff(&via_frame);
    let polygon_resolution = measure::check_resolution(&polygon_back);

    // coherent measure: reproduction of the CS map within 1e-10
    let d = 12;
    let params = FockParams::with_cutoff(d).expect("D = 12");
    let quad = QuadratureScheme::default_for_cutoff(d);
    let coherent = measure::coherent_measure(&params, &quad);
    let coherent_back =
        measure::measure_from_json(&measure::measure_to_json(&coherent)).expect("round trip");
    let g = symbol::parse("z*zbar + 0.5*q").expect("grammar");
    let values = measure::coherent_measure_values(&g, &params, &quad);
    let from_measure = measure::quantize_general(&values, &coherent_back).expect("resolved");
    let from_cs = cs::quantize_cs(&g, &params, &quad).expect("covered");
    let cs_defect = from_measure.max_abs_diff(&from_cs);
    let coherent_resolution = measure::check_resolution(&coherent_back);

    // a deliberately perturbed measure must fail with a reported deviation
    let mut atoms = polygon.atoms().to_vec();
    atoms[0].weight *= 1.25;
    let perturbed = measure::OperatorValuedMeasure::new(atoms, polygon.flags())
        .expect("atoms remain valid");
    let perturbed_report = measure::check_resolution(&perturbed);

    let pass = finite_defect == 0.0
        && cs_defect <= 1e-10
        && polygon_resolution.passed
        && coherent_resolution.passed
        && !perturbed_report.passed
        && perturbed_report.max_entry_deviation > 0.0;
    CriterionResult::new(
        13,
        "general-measure reductions",
        pass,
        format!(
            "finite reduction defect {finite_defect:.3e} (exact); CS reduction defect {cs_defect:.3e} (tol 1e-10); perturbed measure deviation {:.3e} correctly rejected",
            perturbed_report.max_entry_deviation
        ),
    )
}
