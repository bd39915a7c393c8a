//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with its runtime;
//! a criterion that exceeds its time budget fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use modiag::blowup::{verify_blowup, BlowupContext};
use modiag::bundle::{
    select_segre_convention, top_bound_check, verify_bundle_coefficients, verify_fibration_curve,
    verify_fibration_surface, FibrationCase, SegreConvention,
};
use modiag::cycles::{symmetrize, FormalSum, OmegaBarKey, Pattern, Slot, Sym};
use modiag::diagonal::{verify_sommalt, verify_stability};
use modiag::double_cover::{combine, nu_orbits, solve_double_cover, verify_outcome, NuList, PhiTable};
use modiag::exact::binom::binom;
use modiag::exact::matrix::{solve_exact, RationalMatrix};
use modiag::exact::poly::{combcomb_check, IntPolynomial};
use modiag::exact::rational::parse_rational;
use modiag::homology::{torsion_by_enumeration, torsion_decision};
use modiag::product::{verify_kunneth, ProductContext};
use modiag::{Certificate, Rational};

type Check = Result<(), String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Check);

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn frac(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn modiag_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_modiag"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

const TABLE_M3: [[i64; 9]; 11] = [
    [-6, -2, 2, -2, 0, -2, 4, -2, 8],
    [3, -4, -8, 0, -4, 4, -6, 4, -8],
    [0, 2, 2, -4, 0, -4, -4, -4, 0],
    [0, 1, 2, 0, -2, -4, 0, -4, -4],
    [0, 0, 0, 2, 1, 1, 2, 1, 0],
    [0, 0, 0, 1, 2, 3, 2, 3, 4],
    [0, 0, 0, 1, 1, 0, 0, 0, 0],
    [0, 1, 0, -4, -2, 0, 0, 0, 0],
    [1, -4, 0, 4, -4, 0, -2, 0, 0],
    [-6, 2, -2, -2, 8, -2, 4, -2, 0],
    [12, 8, 8, 8, 4, 8, 4, 8, 4],
];
const TABLE_ROWS: [&str; 11] = [
    "(3,1,1)", "(2,2,1)", "(1,3,1)", "(1,2,2)", "(0,4,1)", "(0,3,2)", "(0,5,0)", "(1,4,0)", "(2,3,0)", "(3,2,0)",
    "(4,1,0)",
];
const TABLE_COLUMNS: [&str; 9] = [
    "(a,a)",
    "(a,x1)",
    "(a,i(x1))",
    "(x1,x1)",
    "(x1,x2)",
    "(x1,i(x1))",
    "(x1,i(x2))",
    "(i(x1),i(x1))",
    "(i(x1),i(x2))",
];

fn factorial(n: usize) -> Rational {
    (1..=n as i64).map(int).product()
}

/// `Gamma^q` in symmetrized coordinates, computed here rather than by the library.
fn gamma_oracle(q: usize) -> FormalSum<OmegaBarKey> {
    (0..q)
        .map(|r| {
            let sign = if r % 2 == 0 { int(1) } else { int(-1) };
            (OmegaBarKey::new(r, q - r, 0).unwrap(), sign / (factorial(r) * factorial(q - r)))
        })
        .collect()
}

/// `Phi_nu(Xi_m)` from raw slot words, each weighted `(-2)^r / 2` (a word and its conjugate
/// describe the same cycle).
fn phi_oracle(m: usize, nu: &[Slot]) -> FormalSum<OmegaBarKey> {
    let mut out = FormalSum::zero();
    for code in 0..3usize.pow(m as u32) {
        let mut c = code;
        let word: Vec<u8> = (0..m)
            .map(|_| {
                let d = (c % 3) as u8;
                c /= 3;
                d
            })
            .collect();
        if word.iter().all(|&d| d == 0) {
            continue;
        }
        let r = word.iter().filter(|&&d| d == 0).count() as u32;
        let mut full = word.clone();
        for s in nu {
            full.push(match *s {
                Slot::Base => 0,
                Slot::Source(j) => word[j - 1],
                Slot::ConjSource(j) => [0, 2, 1][word[j - 1] as usize],
            });
        }
        let n = |d| full.iter().filter(|&&x| x == d).count();
        if let Some(k) = OmegaBarKey::new(n(0), n(1), n(2)) {
            out.add_term(k, Rational::from_integer((-2i64).pow(r).into()) / int(2));
        }
    }
    out
}

fn criterion_1() -> Check {
    let csv = modiag_cli(&["doublecover", "table", "--m", "3"])?;
    let mut lines = csv.lines();
    let header = lines.next().ok_or("empty table")?;
    let expected_header = std::iter::once("class".to_string())
        .chain(TABLE_COLUMNS.iter().map(|c| format!("\"{c}\"")))
        .collect::<Vec<_>>()
        .join(",");
    ensure(header == expected_header, || format!("header {header}"))?;
    let mut count = 0;
    for (i, line) in lines.enumerate() {
        let (label, rest) = line.rsplit_once("\",").ok_or_else(|| format!("row {line}"))?;
        ensure(label.trim_start_matches('"') == TABLE_ROWS[i], || format!("row label {label}"))?;
        let values: Vec<i64> = rest.split(',').map(|v| v.parse().unwrap()).collect();
        for (j, v) in values.iter().enumerate() {
            ensure(*v == TABLE_M3[i][j], || {
                format!("{} at {}: got {v}, want {}", TABLE_ROWS[i], TABLE_COLUMNS[j], TABLE_M3[i][j])
            })?;
            count += 1;
        }
    }
    ensure(count == 99, || format!("{count} entries"))
}

fn criterion_2() -> Check {
    let o = nu_orbits(2);
    let lhs = combine(2, &[(o[0].clone(), int(-2)), (o[1].clone(), int(2)), (o[2].clone(), int(-1))])
        .map_err(|e| e.to_string())?;
    let printed: FormalSum<OmegaBarKey> = [("(0,3,0)", 2), ("(1,2,0)", -6), ("(2,1,0)", 6)]
        .iter()
        .map(|(k, c)| (k.parse().unwrap(), int(*c)))
        .collect();
    ensure(lhs == printed, || format!("combination is {lhs}"))?;
    ensure(lhs == gamma_oracle(3).scale(&int(12)), || "not 12 Gamma^3".into())
}

fn criterion_3() -> Check {
    let table = PhiTable::build(3).map_err(|e| e.to_string())?;
    let a = RationalMatrix::from_rows(table.entries[..6].to_vec()).map_err(|e| e.to_string())?;
    let Certificate::Solution {
        nullspace, free_columns, ..
    } = solve_exact(&a, &vec![Rational::zero(); 6]).map_err(|e| e.to_string())?
    else {
        return Err("homogeneous system reported infeasible".into());
    };
    ensure(free_columns == [5, 6, 7, 8], || format!("free columns {free_columns:?}"))?;
    let printed = [[-8, -2, -8, -8], [14, 8, 14, 20], [-6, -6, -6, -12], [1, -2, 1, 4], [-5, -2, -5, -8]];
    for (f, v) in nullspace.iter().enumerate() {
        for i in 0..5 {
            ensure(v[i] == frac(printed[i][f], 3), || {
                format!("lambda_{} coefficient of lambda_{}: {}", i + 1, f + 6, v[i])
            })?;
        }
    }
    let combo = |lambda: &[Rational]| {
        let pairs: Vec<_> = table.columns.iter().cloned().zip(lambda.iter().cloned()).collect();
        combine(3, &pairs).map_err(|e| e.to_string())
    };
    // Several members with lambda_6 + ... + lambda_9 = -3.
    for free in [[-3, 0, 0, 0], [-1, -1, -1, 0], [0, 0, 0, -3], [2, -4, 1, -2]] {
        let mut lambda = vec![Rational::zero(); 9];
        for (v, c) in nullspace.iter().zip(free) {
            for (l, x) in lambda.iter_mut().zip(v) {
                *l += int(c) * x;
            }
        }
        let got = combo(&lambda)?;
        ensure(got == gamma_oracle(5).scale(&int(480)), || format!("free {free:?}: {got}"))?;
    }
    let outcome = solve_double_cover(3).map_err(|e| e.to_string())?;
    ensure(outcome.is_solution(), || "solver found no solution".into())?;
    ensure(verify_outcome(3, &outcome).map_err(|e| e.to_string())?, || "solver family fails re-check".into())
}

fn criterion_4() -> Check {
    let text = modiag_cli(&["--no-timing", "doublecover", "solve", "--m", "4"])?;
    let rep: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let details = &rep["details"];
    let names: Vec<String> = details["columns"]
        .as_array()
        .ok_or("no columns")?
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    let orbits = nu_orbits(4);
    let lookup = |name: &str| -> Result<NuList, String> {
        orbits.iter().find(|o| o.to_string() == name).cloned().ok_or(format!("unknown column {name}"))
    };
    let rat = |v: &Value| parse_rational(v.as_str().unwrap()).map_err(|e| e.to_string());
    let gamma = gamma_oracle(7);
    match rep["status"].as_str() {
        Some("verified") => {
            let lambdas: Vec<Rational> =
                details["lambdas"].as_array().unwrap().iter().map(rat).collect::<Result<_, _>>()?;
            let scale = rat(&details["scale"])?;
            ensure(!scale.is_zero(), || "zero scale".into())?;
            let mut total = FormalSum::zero();
            for (name, l) in names.iter().zip(&lambdas) {
                total.add_scaled(&phi_oracle(4, lookup(name)?.slots()), l);
            }
            let residual = &total - &gamma.scale(&scale);
            ensure(residual.is_zero(), || format!("residual {residual}"))?;
            for v in details["nullspace"].as_array().unwrap() {
                let mut total = FormalSum::zero();
                for (name, x) in names.iter().zip(v.as_array().unwrap()) {
                    total.add_scaled(&phi_oracle(4, lookup(name)?.slots()), &rat(x)?);
                }
                ensure(total.is_zero(), || "nullspace vector not in kernel".into())?;
            }
            println!("    m=4: solution over {} lists, cleared scale {}", names.len(), details["integer_scale"]);
            Ok(())
        }
        Some("infeasible") => {
            let rows: Vec<OmegaBarKey> = details["rows"]
                .as_array()
                .unwrap()
                .iter()
                .map(|k| k.as_str().unwrap().parse().unwrap())
                .collect();
            let y: Vec<Rational> = details["functional"].as_array().unwrap().iter().map(rat).collect::<Result<_, _>>()?;
            let eval = |f: &FormalSum<OmegaBarKey>| -> Rational {
                f.iter()
                    .map(|(k, c)| rows.iter().position(|r| r == k).map_or(Rational::zero(), |i| &y[i] * c))
                    .sum()
            };
            for name in &names {
                ensure(eval(&phi_oracle(4, lookup(name)?.slots())).is_zero(), || format!("functional misses {name}"))?;
            }
            ensure(!eval(&gamma).is_zero(), || "functional vanishes on Gamma^7".into())?;
            println!("    m=4: infeasible over {} lists", names.len());
            Ok(())
        }
        other => Err(format!("status {other:?}")),
    }
}

fn criterion_5() -> Check {
    let ctxs = ProductContext::all_up_to(9);
    for ctx in &ctxs {
        let rep = verify_kunneth(ctx);
        ensure(rep.holds, || {
            format!(
                "m={} n={}: failures {:?}, closed-form mismatches {:?}",
                ctx.m, ctx.n, rep.failures, rep.closed_form_mismatches
            )
        })?;
    }
    ensure(ctxs.len() == 16, || format!("{} contexts", ctxs.len()))
}

fn criterion_6() -> Check {
    for m in 2..=6 {
        for s in 0..=4 {
            let rep = verify_stability(m, s).map_err(|e| e.to_string())?;
            ensure(rep.holds, || format!("m={m} s={s}: {rep:?}"))?;
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    for ctx in BlowupContext::all_up_to(7) {
        let rep = verify_blowup(&ctx);
        ensure(rep.holds && rep.top_bound_holds, || format!("n={} e={}: {:?}", ctx.n, ctx.e, rep.failures))?;
    }
    Ok(())
}

fn criterion_8() -> Check {
    ensure(select_segre_convention(4, 3, 2) == Some(SegreConvention::InverseChern), || {
        "Segre convention not uniquely determined".into()
    })?;
    for n in 2..=4 {
        for r in 1..=3 {
            for d in 0..=2 {
                let rep = verify_bundle_coefficients(n, r, d, SegreConvention::InverseChern);
                ensure(rep.holds, || format!("n={n} r={r} dimY={d}: {:?}", rep.mismatches))?;
            }
        }
    }
    for m in 2..=5 {
        for r in 1..=3 {
            for defect in 1..=2 {
                let rep = top_bound_check(m, r, defect);
                ensure(rep.bound_holds && rep.equality_characterization_holds, || format!("{rep:?}"))?;
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    for m in 2..=4 {
        for ambient in m..=7 {
            let rep = verify_sommalt(m, ambient).map_err(|e| e.to_string())?;
            ensure(rep.membership.is_solution(), || format!("sommalt m={m} N={ambient}"))?;
        }
        for r in 1..=3 {
            let rep = verify_fibration_curve(m, r).map_err(|e| e.to_string())?;
            ensure(rep.holds, || format!("curve m={m} r={r}"))?;
        }
    }
    for m in 3..=4 {
        for r in 1..=2 {
            for case in [FibrationCase::SurfaceGammaMMinus1, FibrationCase::SurfacePointMultiple] {
                let rep = verify_fibration_surface(m, r, case).map_err(|e| e.to_string())?;
                ensure(rep.holds, || format!("surface {case:?} m={m} r={r}"))?;
            }
        }
    }
    Ok(())
}

fn criterion_10() -> Check {
    for n in 1..=4 {
        for d in 0..=n {
            for m in 1..=2 * n + 3 {
                let dec = torsion_decision(m, n, d).map_err(|e| e.to_string())?;
                ensure(dec.torsion == (m > n + d), || format!("m={m} n={n} d={d}"))?;
                ensure(torsion_by_enumeration(m, n, d) == dec.torsion, || format!("enumeration m={m} n={n} d={d}"))?;
                if n < m && m <= n + d {
                    let w = dec.witness_profile.as_ref().ok_or("missing witness")?;
                    let e = m - n;
                    ensure(w.t() == 2 * e && w.total() == 2 * n && w.0.len() == m, || format!("witness {w:?}"))?;
                }
            }
        }
    }
    Ok(())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=7).prop_map(|(p, q)| frac(p, q))
}

fn pattern_sum() -> impl Strategy<Value = FormalSum<Pattern>> {
    let sym = prop_oneof![Just(Sym::Base), Just(Sym::Var), Just(Sym::VarConj)];
    let pat = prop::collection::vec(sym, 4).prop_filter_map("zero pattern", Pattern::new);
    prop::collection::vec((pat, rational()), 0..6).prop_map(FormalSum::from_terms)
}

fn criterion_11() -> Check {
    for u in -20i64..=20 {
        for k in 1..=20 {
            ensure(binom(u, k) == binom(u - 1, k) + binom(u - 1, k - 1), || format!("Pascal u={u} k={k}"))?;
        }
    }
    for n in 1..=12u32 {
        for deg in 0..n as usize {
            let ok = combcomb_check(n, &IntPolynomial::monomial(deg)).map_err(|e| e.to_string())?;
            ensure(ok, || format!("alternating sum n={n} x^{deg}"))?;
        }
    }
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(pattern_sum(), pattern_sum(), pattern_sum(), rational(), rational()), |(a, b, c, x, y)| {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert!((&a - &a.clone()).is_zero());
            prop_assert_eq!(a.scale(&(&x + &y)), &a.scale(&x) + &a.scale(&y));
            prop_assert_eq!((&a + &b).scale(&x), &a.scale(&x) + &b.scale(&x));
            prop_assert_eq!(a.scale(&Rational::one()), a.clone());
            Ok(())
        })
        .map_err(|e| format!("formal sum laws: {e}"))?;
    runner
        .run(&(pattern_sum(), Just((0..4usize).collect::<Vec<_>>()).prop_shuffle()), |(a, perm)| {
            let moved: FormalSum<Pattern> = a.iter().map(|(p, c)| (p.permuted(&perm).unwrap(), c.clone())).collect();
            prop_assert_eq!(symmetrize(&a), symmetrize(&moved));
            Ok(())
        })
        .map_err(|e| format!("symmetrize invariance: {e}"))?;
    let matrix = prop::collection::vec(prop::collection::vec(rational(), 4), 1..7);
    runner
        .run(&(matrix, prop::collection::vec(rational(), 7)), |(rows, seed)| {
            let a = RationalMatrix::from_rows(rows.clone()).unwrap();
            let b = seed[..rows.len()].to_vec();
            let cert = solve_exact(&a, &b).unwrap();
            prop_assert!(cert.verify(&a, &b));
            let inside = a.mul_vec(&seed[..4]).unwrap();
            let cert = solve_exact(&a, &inside).unwrap();
            prop_assert!(cert.is_solution() && cert.verify(&a, &inside));
            Ok(())
        })
        .map_err(|e| format!("solver round trip: {e}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 coordinate table reproduction", 1, criterion_1),
        ("2 m=2 double cover", 1, criterion_2),
        ("3 m=3 double cover", 5, criterion_3),
        ("4 m=4 search", 60, criterion_4),
        ("5 Kunneth identity", 60, criterion_5),
        ("6 stability", 30, criterion_6),
        ("7 blow-up identity", 60, criterion_7),
        ("8 bundle coefficients", 30, criterion_8),
        ("9 fibration vanishing", 120, criterion_9),
        ("10 homology threshold", 5, criterion_10),
        ("11 property suites", 30, criterion_11),
    ];
    let mut failed = Vec::new();
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|_| {
            ensure(elapsed < Duration::from_secs(budget), || format!("took {elapsed:?}, budget {budget} s"))
        });
        match result {
            Ok(()) => println!("PASS criterion {name} ({} ms)", elapsed.as_millis()),
            Err(e) => {
                println!("FAIL criterion {name} ({} ms): {e}", elapsed.as_millis());
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
