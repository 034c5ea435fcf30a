//! Acceptance suite: one test per criterion, each ending with an explicit
//! pass line (run with `--nocapture` to see them). Arithmetic is exact over
//! finite fields, so every comparison below is exact equality.
//!
//! The parameter grid is {degenerate, non-degenerate} x {n = 2, 3} x
//! {kappa = (0), kappa = (0, 1)} with (p, e) = (2, 2) and (3, 3) degenerate,
//! (3, 2) and (2, 3) (the latter realized in GF(4)) non-degenerate —
//! sixteen instances in all.

use std::process::Command;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cyclohecke::gf::{frobenius_period, minimal_extension_degree, FieldCtx, Polynomial};
use cyclohecke::hecke::{AlgebraElement, AlgebraParams, Flavor};
use cyclohecke::idempotents::{
    closed_auto_exponents, e_closed, verify_idempotent_system, SpectralData,
};
use cyclohecke::periodicity::{verify_periodicity, CaseTag};
use cyclohecke::regrep::RegularRep;

fn params(flavor: Flavor, p: u64, e: u64, n: usize, kappa: &[u64]) -> AlgebraParams {
    AlgebraParams::from_characteristics(flavor, p, Some(e), n, kappa).unwrap()
}

fn grid() -> Vec<AlgebraParams> {
    let mut out = Vec::new();
    for (flavor, p, e) in [
        (Flavor::Degenerate, 2, 2),
        (Flavor::Degenerate, 3, 3),
        (Flavor::NonDegenerate, 3, 2),
        (Flavor::NonDegenerate, 2, 3),
    ] {
        for n in [2usize, 3] {
            for kappa in [vec![0u64], vec![0, 1]] {
                out.push(params(flavor, p, e, n, &kappa));
            }
        }
    }
    out
}

fn label(params: &AlgebraParams) -> String {
    format!(
        "{} p={} e={} n={} kappa={:?}",
        params.flavor(),
        params.p(),
        params.e(),
        params.n(),
        params.kappa()
    )
}

#[test]
fn criterion_1_relation_soundness() {
    for set in grid() {
        let start = Instant::now();
        let rep = RegularRep::build(&set, None).unwrap();
        let report = rep.relation_check();
        assert!(
            report.all_pass(),
            "{}: failed relations {:?}",
            label(&set),
            report.failures()
        );
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs() < 30,
            "{}: relation check took {elapsed:?}",
            label(&set)
        );
    }
    println!(
        "ACCEPTANCE 1: PASS — defining and cyclotomic relations hold in all 16 parameter sets"
    );
}

#[test]
fn criterion_2_dimension_and_homomorphism() {
    for set in grid() {
        let expected = {
            let ell = set.ell() as u64;
            let mut d = 1u64;
            for _ in 0..set.n() {
                d *= ell;
            }
            for m in 1..=set.n() as u64 {
                d *= m;
            }
            d
        };
        let basis = set.basis();
        assert_eq!(basis.len() as u64, expected, "{}", label(&set));

        let rep = RegularRep::build(&set, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let a = AlgebraElement::monomial(&set, basis[rng.random_range(0..basis.len())].clone());
            let b = AlgebraElement::monomial(&set, basis[rng.random_range(0..basis.len())].clone());
            assert_eq!(
                rep.to_matrix(&(&a * &b)),
                rep.to_matrix(&a).mat_mul(&rep.to_matrix(&b)),
                "{}: product homomorphism",
                label(&set)
            );
        }
    }
    println!(
        "ACCEPTANCE 2: PASS — dim = l^n n! and 20 random products map homomorphically per set"
    );
}

#[test]
fn criterion_3_idempotent_system() {
    for set in grid() {
        let rep = RegularRep::build(&set, None).unwrap();
        let spectral = SpectralData::compute(&rep);
        let pairs = spectral.support_pairs();
        assert!(!pairs.is_empty(), "{}: empty support", label(&set));
        for (a, (seq_a, pa)) in pairs.iter().enumerate() {
            assert_eq!(
                pa.mat_mul(pa),
                *pa,
                "{}: e{:?} idempotent",
                label(&set),
                seq_a
            );
            for (seq_b, pb) in pairs.iter().skip(a + 1) {
                assert!(
                    pa.mat_mul(pb).is_zero() && pb.mat_mul(pa).is_zero(),
                    "{}: e{:?} e{:?} orthogonal",
                    label(&set),
                    seq_a,
                    seq_b
                );
            }
        }
        assert!(spectral.is_complete(&rep), "{}: sum e(i) = 1", label(&set));
    }
    println!("ACCEPTANCE 3: PASS — spectral idempotents are idempotent, orthogonal, and complete in all sets");
}

#[test]
fn criterion_4_formula_equivalence() {
    let start = Instant::now();
    for set in grid() {
        let rep = RegularRep::build(&set, None).unwrap();
        let report = verify_idempotent_system(&rep).unwrap();
        assert!(report.orthogonal && report.complete, "{}", label(&set));
        for verdict in &report.sequences {
            assert!(
                verdict.constructions_equal,
                "{}: constructions disagree at {:?}",
                label(&set),
                verdict.sequence
            );
            assert!(verdict.idempotent, "{}", label(&set));
        }
        // Stability in s: s_r = l_r + 1 gives the same elements.
        let spectral = SpectralData::compute(&rep);
        let auto = closed_auto_exponents(&rep, &spectral).unwrap();
        let bumped: Vec<u32> = auto.iter().map(|&s| s + 1).collect();
        for (seq, proj) in spectral.support_pairs() {
            let spec_elem = rep.from_action_on_one(proj);
            assert_eq!(
                e_closed(&set, seq, &bumped).unwrap(),
                spec_elem,
                "{}: stability at {:?}",
                label(&set),
                seq
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 4 took {elapsed:?}");
    println!(
        "ACCEPTANCE 4: PASS — closed(auto) = interpolation(N = D) = spectral on every supported sequence, stable in s ({elapsed:?} total)"
    );
}

#[test]
fn criterion_5_degenerate_periodicity() {
    let mut sets: Vec<AlgebraParams> = grid().into_iter().filter(|s| s.is_degenerate()).collect();
    sets.push(params(Flavor::Degenerate, 2, 2, 4, &[0])); // D = 24
    for set in sets {
        let rep = RegularRep::build(&set, None).unwrap();
        let spectral = SpectralData::compute(&rep);
        let reports = verify_periodicity(&rep).unwrap();
        for report in &reports {
            assert!(
                report.verdict,
                "{}: strand {} report {:?}",
                label(&set),
                report.r,
                report
            );
            assert_eq!(
                (report.n_observed, report.d_observed),
                (report.n_predicted, report.d_predicted),
                "{}: brute force vs prediction at r = {}",
                label(&set),
                report.r
            );
            // The headline closed form p^{l_r}(p-1) is the minimal period
            // exactly when a supported residue of full multiplicative order
            // p-1 attains the global nilpotency exponent at this strand.
            // Brute force (the ground truth above) pins the deviations in
            // this grid to precisely: strand 1 with p = 3, where the
            // strand-1 spectrum is the kappa residues {0} or {0,1} and the
            // sequence settles with period 1; and strand 4 of the n = 4
            // instance, where the zero-residue block carries the deepest
            // nilpotency and only delays the sequence (d = 2, not 4).
            let deviation_expected =
                (set.p() == 3 && report.r == 1) || (set.p() == 2 && set.n() == 4 && report.r == 4);
            assert_eq!(
                !report.closed_form_agrees,
                deviation_expected,
                "{}: closed-form agreement at r = {}",
                label(&set),
                report.r
            );

            // Lemma-level biconditional, both sides, at s = l_r - 1 and l_r.
            let p = set.p();
            let xr = rep.gen_x_matrix(report.r);
            let y = spectral.y_matrix(&rep, report.r);
            let l = report.l_r;
            assert!(y.pow(p.pow(l)).is_zero());
            assert_eq!(xr.pow(p.pow(l + 1)), xr.pow(p.pow(l)));
            if l >= 1 {
                assert!(!y.pow(p.pow(l - 1)).is_zero());
                assert_ne!(xr.pow(p.pow(l)), xr.pow(p.pow(l - 1)));
            }
            // x_r^{d_r} = 1 whenever no supported sequence has i_r = 0.
            if report.case_tag == CaseTag::DegenerateNoZeroResidue {
                assert!(xr.pow(report.d_observed).is_identity());
            }
        }
    }
    println!(
        "ACCEPTANCE 5: PASS — degenerate periods match brute force (incl. n = 4, D = 24) with both biconditional directions checked; the p^l(p-1) closed form deviates exactly where its implicit hypothesis fails (p = 3 strand 1; n = 4 strand 4), as recorded per strand"
    );
}

#[test]
fn criterion_6_non_degenerate_periodicity() {
    for set in grid().into_iter().filter(|s| !s.is_degenerate()) {
        let rep = RegularRep::build(&set, None).unwrap();
        let reports = verify_periodicity(&rep).unwrap();
        let kappa_all_zero = set.kappa().iter().all(|&c| c == 0);
        for report in &reports {
            assert!(report.verdict, "{}: {:?}", label(&set), report);
            assert_eq!(report.n_observed, 0, "{}", label(&set));
            let p = set.p();
            let e = set.e();
            let xr = rep.gen_x_matrix(report.r);
            assert!(
                xr.pow(e * p.pow(report.l_r)).is_identity(),
                "{}: X^(e p^l) = 1 at r = {}",
                label(&set),
                report.r
            );
            if report.l_r >= 1 {
                assert!(
                    !xr.pow(e * p.pow(report.l_r - 1)).is_identity(),
                    "{}: minimality at r = {}",
                    label(&set),
                    report.r
                );
            }
            let expected_d = if report.r == 1 && kappa_all_zero {
                p.pow(report.l_r)
            } else {
                e * p.pow(report.l_r)
            };
            assert_eq!(
                report.d_observed,
                expected_d,
                "{}: branch formula at r = {}",
                label(&set),
                report.r
            );
            assert!(report.closed_form_agrees, "{}", label(&set));
        }
    }
    // Worked micro-case: q = 2 in GF(3), kappa = (0), n = 2 gives d_2 = 6.
    let b = params(Flavor::NonDegenerate, 3, 2, 2, &[0]);
    let rep = RegularRep::build(&b, None).unwrap();
    let reports = verify_periodicity(&rep).unwrap();
    assert_eq!(reports[1].d_observed, 6);
    assert_eq!(reports[1].n_observed, 0);
    println!("ACCEPTANCE 6: PASS — non-degenerate periods are e*p^l (or p^l on the all-zero branch) with exact minimality");
}

#[test]
fn criterion_7_arithmetic_lemma_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);

    // Frobenius additivity: 500 instances.
    let fields: Vec<FieldCtx> = [(2u64, 1usize), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)]
        .iter()
        .map(|&(p, k)| FieldCtx::new(p, k).unwrap())
        .collect();
    for _ in 0..500 {
        let f = &fields[rng.random_range(0..fields.len())];
        let a = f.element_from_index(rng.random_range(0..f.order()));
        let b = f.element_from_index(rng.random_range(0..f.order()));
        let q = f.p().pow(rng.random_range(0..4u32));
        assert_eq!((&a - &b).pow(q), &a.pow(q) - &b.pow(q));
    }

    // Geometric sums: 500 instances over coprime (p, e) pairs.
    let pairs = [(3u64, 2u64), (2, 3), (5, 4), (7, 3), (3, 4), (5, 8)];
    for _ in 0..500 {
        let (p, e) = pairs[rng.random_range(0..pairs.len())];
        let k = minimal_extension_degree(p, e).unwrap();
        let f = FieldCtx::new(p, k).unwrap();
        let q = f.element_of_order(e).unwrap();
        let exp = rng.random_range(0..4 * e);
        let mut sum = f.zero();
        for j in 0..e {
            sum = &sum + &q.pow(j * exp);
        }
        if exp % e == 0 {
            assert_eq!(sum, f.from_u64(e));
            assert!(!sum.is_zero(), "gcd(e, p) = 1 keeps e invertible");
        } else {
            assert!(sum.is_zero());
        }
    }

    // Interpolation polynomial identity, coefficientwise: 500 instances.
    for _ in 0..500 {
        let (p, e) = pairs[rng.random_range(0..pairs.len())];
        let k = minimal_extension_degree(p, e).unwrap();
        let f = FieldCtx::new(p, k).unwrap();
        let q = f.element_of_order(e).unwrap();
        let coprime: Vec<u64> = (1..e).filter(|s| gcd(*s, e) == 1).collect();
        let s = coprime[rng.random_range(0..coprime.len())];
        let r = q.pow(s);
        let i_r = rng.random_range(0..e);
        let ri = r.pow(i_r);
        let x = Polynomial::x(&f);
        let mut lhs = Polynomial::one(&f);
        for j in (0..e).filter(|&j| j != i_r) {
            let denom_inv = (&ri - &r.pow(j)).inv().unwrap();
            let num = &Polynomial::constant(ri.clone()) - &x;
            lhs = &lhs * &(&Polynomial::one(&f) - &num.scale(&denom_inv));
        }
        let e_inv = f.from_u64(e).inv().unwrap();
        let ri_inv = ri.inv().unwrap();
        let rhs = Polynomial::from_coeffs(&f, (0..e).map(|m| &e_inv * &ri_inv.pow(m)).collect());
        assert_eq!(lhs, rhs, "p={p} e={e} s={s} i_r={i_r}");
    }

    // gcd(e, p) = 1 and the Frobenius period exists: 500 instances.
    for _ in 0..500 {
        let (p, e) = pairs[rng.random_range(0..pairs.len())];
        assert_eq!(gcd(e, p), 1);
        let l = frobenius_period(p, e).unwrap();
        assert!(l >= 1);
        let mut pw = 1u64;
        for _ in 0..l {
            pw = pw * (p % e) % e;
        }
        assert_eq!(pw, 1, "p^l = 1 mod e");
    }

    // Power-difference factorization x^k - x^{k + p^t(p-1)} =
    // f(x) (i - x)^{p^t}: 500 instances by exact polynomial arithmetic.
    for _ in 0..500 {
        let p = [2u64, 3, 5][rng.random_range(0..3)];
        let f = FieldCtx::new(p, 1).unwrap();
        let x = Polynomial::x(&f);
        let i = rng.random_range(1..p);
        let t = rng.random_range(0..if p == 2 { 4u32 } else { 2 });
        let k = rng.random_range(0..4u64);
        let iel = f.from_u64(i);
        let pt = p.pow(t);
        let lhs = &x.pow(k) - &x.pow(k + pt * (p - 1));
        let i_inv = iel.inv().unwrap();
        let mut series = Polynomial::zero(&f);
        for m in 0..p - 1 {
            series = &series + &x.pow(pt * m).scale(&i_inv.pow(m));
        }
        let fpoly = &x.pow(k).scale(&i_inv) * &series;
        let linear = Polynomial::from_coeffs(&f, vec![iel, -&f.one()]);
        assert_eq!(lhs, &fpoly * &linear.pow(pt));
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "criterion 7 took {elapsed:?}");
    println!("ACCEPTANCE 7: PASS — 5 x 500 randomized lemma instances, all exact ({elapsed:?})");
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[test]
fn criterion_8_benchmark_gate() {
    // cmd_bench on (degenerate, p = 2, n = 3, l = 2; D = 48) through the
    // real binary: the three constructions must agree before any timing is
    // reported, and the closed formula's operation profile is recorded.
    let out = Command::new(env!("CARGO_BIN_EXE_cyclohecke"))
        .args([
            "--flavor", "deg", "--p", "2", "--n", "3", "--kappa", "0,1", "bench",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["dim"], serde_json::json!(48));
    assert_eq!(json["all_pass"], serde_json::json!(true));

    let stats = &json["closed_formula_stats"];
    assert_eq!(stats["matrix_inversions"], serde_json::json!(0));
    let muls = stats["element_muls"].as_u64().unwrap();
    let bound = stats["mul_bound"].as_u64().unwrap();
    assert!(muls <= bound, "measured {muls} within bound {bound}");
    // The bound itself has the O(n * max(p, e) * log exponent) shape.
    let n = 3u64;
    let p = 2u64;
    assert!(
        bound <= n * (2 * 64 + p + 2) + n,
        "bound {bound} is O(n p log)"
    );

    let timings = &json["timings_ns"];
    for key in ["spectral", "interpolation", "closed"] {
        assert!(timings[key].as_u64().is_some(), "timing {key} present");
    }
    println!(
        "ACCEPTANCE 8: PASS — bench agrees across constructions; closed formula: {muls} element muls (bound {bound}), 0 matrix inversions; timings_ns = {{spectral: {}, interpolation: {}, closed: {}}}",
        timings["spectral"], timings["interpolation"], timings["closed"]
    );
}
