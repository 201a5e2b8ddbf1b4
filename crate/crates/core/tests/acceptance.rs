//! Acceptance criteria, one printed PASS/FAIL line each. Exits non-zero if
//! any criterion fails or exceeds its time budget.

use std::process::ExitCode;
use std::time::Instant;

use lslab_core::poly::{build_m_recurrence, IntegerPolynomial};
use lslab_core::sturm;
use lslab_core::verify;
use lslab_core::{LabError, Result};
use rug::Rational;

const PREC: u32 = 256;

struct Criterion {
    id: u32,
    title: &'static str,
    budget_secs: f64,
    run: fn() -> Result<String>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LabError::Invariant(msg()))
    }
}

fn c1_ratio() -> Result<String> {
    verify::ratio_check(1000, 930, PREC)
}

fn c2_polynomials() -> Result<String> {
    let expected = [
        IntegerPolynomial::from_i64(&[0, 2]),
        IntegerPolynomial::from_i64(&[0, 4, 24]),
        IntegerPolynomial::from_i64(&[0, 8, 192, 720]),
    ];
    for (i, e) in expected.iter().enumerate() {
        let got = build_m_recurrence(i + 1)?;
        ensure(&got == e, || format!("M_{} = {got}", i + 1))?;
    }
    Ok("M_1, M_2, M_3 exact".into())
}

fn c3_cross_formula() -> Result<String> {
    let a = verify::cross_formula_legendre(30)?;
    let b = verify::cross_formula_chebyshev(30)?;
    Ok(format!("gamma=1: {a}; gamma=1/2: {b}"))
}

fn c4_connection() -> Result<String> {
    let a = verify::connection_numbers(20)?;
    let b = verify::connection_polynomials(40)?;
    Ok(format!("numbers {a}; polynomials {b}"))
}

fn c5_roots() -> Result<String> {
    for n in 1..=30 {
        let cert = sturm::certify_roots(n)?;
        ensure(cert.isolating_intervals.len() == n - 1, || format!("n={n}: interval count"))?;
        let quarter = Rational::from((-1, 4));
        for (lo, hi) in &cert.isolating_intervals {
            ensure(*lo >= quarter && *hi <= 0, || format!("n={n}: interval outside (-1/4, 0)"))?;
        }
        let expected = if n % 2 == 0 { 1 } else { -1 };
        ensure(cert.sign_at_quarter == expected, || format!("n={n}: sign at -1/4"))?;
    }
    Ok("1 <= n <= 30 certified".into())
}

fn c6_unimodality() -> Result<String> {
    verify::unimodality(300)
}

fn c7_eisenstein() -> Result<String> {
    verify::eisenstein_representation(50, PREC)
}

fn c8_saddle() -> Result<String> {
    verify::saddle_expansion(400, 0.05, PREC)
}

fn c9_lemma41() -> Result<String> {
    verify::moment_decay_check(
        &[100, 200, 400],
        verify::VARIANCE_RESIDUAL_CEILING,
        verify::VARIANCE_RESIDUAL_SLACK,
        PREC,
    )
}

fn c10_theorem42() -> Result<String> {
    verify::local_residual_check(100, 400, 0.05, PREC)
}

fn c11_theorem43() -> Result<String> {
    let ks = verify::ks_check(100, 400, PREC)?;
    let mass = verify::mass_decay_check(&[50, 100, 200], PREC)?;
    Ok(format!("{ks}; {mass}"))
}

fn c12_edgeworth() -> Result<String> {
    verify::brute_force_check(12, PREC)?;
    verify::two_path_check(&[5, 10, 20, 50], 6, PREC)?;
    verify::sharpening_check(200, PREC)
}

fn c13_gamma_zero() -> Result<String> {
    verify::gamma_zero(40)
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "paper ratio {1000,930}_1/A(1000,930) in [1.0438485, 1.0438495]", budget_secs: 60.0, run: c1_ratio },
        Criterion { id: 2, title: "generating polynomials M_1..M_3", budget_secs: 1.0, run: c2_polynomials },
        Criterion { id: 3, title: "cross-formula equality n<=30", budget_secs: 10.0, run: c3_cross_formula },
        Criterion { id: 4, title: "connection formulas k<=20, polynomial form k<=40", budget_secs: 60.0, run: c4_connection },
        Criterion { id: 5, title: "Sturm root certificates 1<=n<=30", budget_secs: 120.0, run: c5_roots },
        Criterion { id: 6, title: "unimodality 3<=n<=300", budget_secs: 60.0, run: c6_unimodality },
        Criterion { id: 7, title: "Eisenstein representation within tail bound, n<=50", budget_secs: 60.0, run: c7_eisenstein },
        Criterion { id: 8, title: "saddle expansion within 5% at n=400", budget_secs: 120.0, run: c8_saddle },
        Criterion { id: 9, title: "mean/variance residual decay", budget_secs: 300.0, run: c9_lemma41 },
        Criterion { id: 10, title: "local approximation residual decay", budget_secs: 300.0, run: c10_theorem42 },
        Criterion { id: 11, title: "KS distance and total-mass decay", budget_secs: 300.0, run: c11_theorem43 },
        Criterion { id: 12, title: "Edgeworth engine", budget_secs: 120.0, run: c12_edgeworth },
        Criterion { id: 13, title: "gamma=0 shift identity n<=40", budget_secs: 5.0, run: c13_gamma_zero },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok(d) if secs <= c.budget_secs => (true, d),
            Ok(d) => (false, format!("{d}; took {secs:.2}s, budget {}s", c.budget_secs)),
            Err(e) => (false, e.to_string()),
        };
        if !ok {
            failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {tag} {} ({secs:.2}s) {detail}", c.id, c.title);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
