use modiag::cycles::{FormalSum, OmegaBarKey, Pattern, Slot, Sym};
use modiag::double_cover::{
    combine, gamma_omega, nu_orbits, solve_double_cover, verify_outcome, DoubleCoverOutcome, NuList, PhiTable,
};
use modiag::exact::matrix::{solve_exact, RationalMatrix};
use modiag::exact::rational::{frac, int};
use modiag::Rational;
use num_traits::Zero;

/// Coordinates of `Phi_nu(Xi_3)` for the nine canonical lists, rows in table order.
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

/// Independent expansion: raw words (no conjugation canonical form), each counted by
/// `(-2)^r / 2` since a word and its conjugate name the same cycle.
fn phi_oracle(m: usize, nu: &[Slot]) -> FormalSum<OmegaBarKey> {
    let mut out = FormalSum::zero();
    let total = 3usize.pow(m as u32);
    for code in 0..total {
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
        let conj = |d: u8| if d == 0 { 0 } else { 3 - d };
        let mut full = word.clone();
        for s in nu {
            full.push(match *s {
                Slot::Base => 0,
                Slot::Source(j) => word[j - 1],
                Slot::ConjSource(j) => conj(word[j - 1]),
            });
        }
        let n = |d| full.iter().filter(|&&x| x == d).count();
        if let Some(k) = OmegaBarKey::new(n(0), n(1), n(2)) {
            out.add_term(k, Rational::from_integer((-2i64).pow(r).into()) / int(2));
        }
    }
    out
}

#[test]
fn table_m3_matches_fixture() {
    let table = PhiTable::build(3).unwrap();
    let expected: Vec<Vec<Rational>> = TABLE_M3.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
    assert_eq!(table.entries, expected);
}

#[test]
fn phi_matches_oracle() {
    for m in 2..=4 {
        let pairs: Vec<_> = nu_orbits(m).into_iter().map(|nu| (nu, int(1))).collect();
        for (nu, one) in &pairs {
            let engine = combine(m, &[(nu.clone(), one.clone())]).unwrap();
            assert_eq!(engine, phi_oracle(m, nu.slots()), "m={m} nu={nu}");
        }
    }
}

#[test]
fn phi_depends_only_on_orbit() {
    let raw = [
        vec![Slot::Source(3), Slot::ConjSource(1)],
        vec![Slot::ConjSource(2), Slot::Source(1)],
        vec![Slot::Source(2), Slot::ConjSource(3)],
    ];
    let canonical = NuList::new(3, raw[0].clone()).unwrap();
    let engine = combine(3, &[(canonical.clone(), int(1))]).unwrap();
    for slots in &raw {
        assert_eq!(NuList::new(3, slots.clone()).unwrap(), canonical);
        assert_eq!(phi_oracle(3, slots), engine);
    }
}

#[test]
fn m2_combination_is_twelve_gamma() {
    let o = nu_orbits(2);
    let lhs = combine(2, &[(o[0].clone(), int(-2)), (o[1].clone(), int(2)), (o[2].clone(), int(-1))]).unwrap();
    let expected: FormalSum<OmegaBarKey> = [("(0,3,0)", 2), ("(1,2,0)", -6), ("(2,1,0)", 6)]
        .iter()
        .map(|(k, c)| (k.parse().unwrap(), int(*c)))
        .collect();
    assert_eq!(lhs, expected);
    assert_eq!(lhs, gamma_omega(3).scale(&int(12)));
}

#[test]
fn m3_relations_from_first_six_rows() {
    let table = PhiTable::build(3).unwrap();
    let a = RationalMatrix::from_rows(table.entries[..6].to_vec()).unwrap();
    let cert = solve_exact(&a, &vec![Rational::zero(); 6]).unwrap();
    let modiag::Certificate::Solution {
        nullspace, free_columns, ..
    } = cert
    else {
        panic!("homogeneous system");
    };
    assert_eq!(free_columns, vec![5, 6, 7, 8]);
    // lambda_1..lambda_5 in terms of lambda_6..lambda_9, times 3.
    let printed = [
        [-8, -2, -8, -8],
        [14, 8, 14, 20],
        [-6, -6, -6, -12],
        [1, -2, 1, 4],
        [-5, -2, -5, -8],
    ];
    for (f, v) in nullspace.iter().enumerate() {
        for i in 0..5 {
            assert_eq!(v[i], frac(printed[i][f], 3), "lambda_{} coefficient of lambda_{}", i + 1, f + 6);
        }
    }
    // Every member of the family lands on -(4/3) S * 5! Gamma^5.
    let gamma5 = gamma_omega(5).scale(&int(120));
    for v in &nullspace {
        let pairs: Vec<_> = table.columns.iter().cloned().zip(v.iter().cloned()).collect();
        assert_eq!(combine(3, &pairs).unwrap(), gamma5.scale(&frac(-4, 3)));
    }
    let free = [int(-1), int(-1), int(-1), int(0)];
    let mut lambda = vec![Rational::zero(); 9];
    for (v, c) in nullspace.iter().zip(&free) {
        for (l, x) in lambda.iter_mut().zip(v) {
            *l += c * x;
        }
    }
    assert!(lambda.iter().all(|l| l.denom() == &1.into()));
    let pairs: Vec<_> = table.columns.iter().cloned().zip(lambda).collect();
    assert_eq!(combine(3, &pairs).unwrap(), gamma_omega(5).scale(&int(480)));
}

#[test]
fn m3_solver_family() {
    let outcome = solve_double_cover(3).unwrap();
    assert!(verify_outcome(3, &outcome).unwrap());
    let DoubleCoverOutcome::Solution(sol) = outcome else {
        panic!("m=3 must be solvable");
    };
    let s: Rational = sol.lambdas[5..].iter().sum();
    assert_eq!(s, frac(-1, 160));
    for v in &sol.nullspace {
        assert!(v[5..].iter().sum::<Rational>().is_zero());
    }
}

#[test]
fn m4_outcome_is_certified() {
    let outcome = solve_double_cover(4).unwrap();
    assert!(verify_outcome(4, &outcome).unwrap());
}

#[test]
fn xi_pattern_rule() {
    let x = modiag::double_cover::xi(4);
    for (p, c) in x.terms.iter() {
        assert_eq!(p.slots().iter().find(|s| **s != Sym::Base), Some(&Sym::Var));
        assert_eq!(*c, Rational::from_integer((-2i64).pow(p.base_count() as u32).into()));
    }
    assert_eq!(x.terms.len(), (3usize.pow(4) - 1) / 2);
    let _: Option<Pattern> = Pattern::new(vec![Sym::Base; 4]);
}
