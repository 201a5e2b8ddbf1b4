use lslab_core::edgeworth::{self, BernoulliArray};
use lslab_core::export::{read_jsonl, triangle_from_records, write_jsonl};
use lslab_core::formulas::js_explicit;
use lslab_core::poly::{build_m_recurrence, classify_unimodal, IntegerPolynomial, UnimodalMode};
use lslab_core::sturm::{count_real_roots, sturm_chain};
use lslab_core::triangle::StirlingTriangle;
use lslab_core::verify::brute_force_distribution;
use lslab_core::{clt, GammaParam};
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

fn gamma_strategy() -> impl Strategy<Value = GammaParam> {
    (1i64..40, 1i64..8).prop_map(|(p, q)| GammaParam::from_ratio(p, q).unwrap())
}

fn prob_strategy(max_len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0u32..=12, 1u32..=12), 1..=max_len).prop_map(|v| {
        v.into_iter()
            .map(|(a, b)| Rational::from((a.min(b), b)))
            .collect()
    })
}

/// Integer generating polynomial `prod (a s + (d - a))` of an array `a/d`.
fn integer_pgf(ps: &[Rational]) -> IntegerPolynomial {
    ps.iter().fold(IntegerPolynomial::one(), |acc, p| {
        let (a, d) = (p.numer().clone(), p.denom().clone());
        let factor = IntegerPolynomial::new(vec![Integer::from(&d - &a), a]);
        &acc * &factor
    })
}

/// Coefficients of `P_m` with `d^m/dx^m exp(-x^2/2) = P_m(x) exp(-x^2/2)`.
fn rodrigues(m: usize) -> Vec<i64> {
    let mut p = vec![1i64];
    for _ in 0..m {
        // (P' - x P)
        let mut next = vec![0i64; p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            if k > 0 {
                next[k - 1] += k as i64 * c;
            }
            next[k + 1] -= c;
        }
        p = next;
    }
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    p.into_iter().map(|c| sign * c).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recurrence_matches_explicit(g in gamma_strategy(), n in 0usize..12, j in 0usize..12) {
        let t = StirlingTriangle::build(g.clone(), n).unwrap();
        let expected = t.get(n, j).unwrap();
        prop_assert_eq!(js_explicit(n, j, &g).unwrap(), expected);
    }

    #[test]
    fn distribution_matches_enumeration(ps in prob_strategy(10)) {
        let arr = BernoulliArray::new(ps).unwrap();
        let d = edgeworth::distribution(&arr);
        prop_assert_eq!(d.iter().sum::<Rational>(), Rational::from(1));
        prop_assert_eq!(d, brute_force_distribution(&arr));
    }

    #[test]
    fn cumulant_paths_agree_exactly(ps in prob_strategy(8)) {
        let arr = BernoulliArray::new(ps.clone()).unwrap();
        let direct = edgeworth::array_cumulants(&arr, 5);
        let via_pgf = edgeworth::exact_cumulants_from_polynomial(&integer_pgf(&ps), 5).unwrap();
        prop_assert_eq!(direct, via_pgf);
    }

    #[test]
    fn hermite_matches_rodrigues(m in 0usize..=6, x in -5.0f64..5.0) {
        let coeffs = rodrigues(m);
        let direct: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + *c as f64);
        let rec = edgeworth::hermite(m, &Float::with_val(128, x)).to_f64();
        prop_assert!((direct - rec).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn jsonl_round_trip(g in gamma_strategy(), n_max in 0usize..14) {
        let t = StirlingTriangle::build(g.clone(), n_max).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&t, &mut buf).unwrap();
        let back = triangle_from_records(g, &read_jsonl(buf.as_slice()).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn m_polynomials_are_real_rooted(n in 1usize..24) {
        let m = build_m_recurrence(n).unwrap();
        prop_assert_eq!(count_real_roots(&sturm_chain(&m)), n);
    }

    #[test]
    fn unimodal_classification(up in 1usize..8, down in 1usize..8, plateau: bool) {
        let mut seq: Vec<Integer> = (0..up).map(|k| Integer::from(k as u32 * 3 + 1)).collect();
        let top = Integer::from((up * 3 + down * 2) as u32 + 10);
        seq.push(top.clone());
        if plateau {
            seq.push(top);
        }
        seq.extend((0..down).rev().map(|k| Integer::from(k as u32 * 2 + 1)));
        let expected = if plateau { UnimodalMode::Plateau(up, up + 1) } else { UnimodalMode::Peak(up) };
        prop_assert_eq!(classify_unimodal(&seq), Ok(expected));
        let mut broken = seq.clone();
        broken.push(Integer::from(1000));
        prop_assert!(classify_unimodal(&broken).is_err());
    }

    #[test]
    fn normal_cdf_monotone(a in -12.0f64..12.0, b in -12.0f64..12.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fl = clt::normal_cdf(&Float::with_val(128, lo), 128);
        let fh = clt::normal_cdf(&Float::with_val(128, hi), 128);
        prop_assert!(fl <= fh);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let t = StirlingTriangle::build(GammaParam::legendre(), 150).unwrap();
            let r = clt::theorem42_residual(120, 256).unwrap();
            let ks = clt::ks_grid_distance(120, 256).unwrap();
            (t, r.argmax_j, r.max_residual, ks)
        })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
    assert_eq!(a.3, b.3);
}
