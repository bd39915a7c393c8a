use modiag::cycles::{push_forward, symmetrize, Assignment, FormalSum, Pattern, Slot, Sym};
use modiag::exact::binom::binom;
use modiag::exact::matrix::{solve_exact, RationalMatrix};
use modiag::exact::poly::{combcomb_check, IntPolynomial};
use modiag::exact::span::{membership, to_sparse, verify_membership};
use modiag::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn sym() -> impl Strategy<Value = Sym> {
    prop_oneof![Just(Sym::Base), Just(Sym::Var), Just(Sym::VarConj)]
}

fn pattern(len: usize) -> impl Strategy<Value = Pattern> {
    prop::collection::vec(sym(), len)
        .prop_filter_map("all-basepoint word", Pattern::new)
}

fn pattern_sum(len: usize) -> impl Strategy<Value = FormalSum<Pattern>> {
    prop::collection::vec((pattern(len), rational()), 0..6).prop_map(FormalSum::from_terms)
}

fn slot(sources: usize) -> impl Strategy<Value = Slot> {
    prop_oneof![
        Just(Slot::Base),
        (1..=sources).prop_map(Slot::Source),
        (1..=sources).prop_map(Slot::ConjSource),
    ]
}

proptest! {
    #[test]
    fn pascal_rule(u in -20i64..=20, k in 1i64..=20) {
        prop_assert_eq!(binom(u, k), binom(u - 1, k) + binom(u - 1, k - 1));
    }

    #[test]
    fn formal_sum_laws(a in pattern_sum(3), b in pattern_sum(3), c in pattern_sum(3), x in rational(), y in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert!((&a - &a.clone()).is_zero());
        prop_assert_eq!(&a + &FormalSum::zero(), a.clone());
        prop_assert_eq!((&a + &b).scale(&x), &a.scale(&x) + &b.scale(&x));
        prop_assert_eq!(a.scale(&(&x + &y)), &a.scale(&x) + &a.scale(&y));
        prop_assert_eq!(a.scale(&x).scale(&y), a.scale(&(&x * &y)));
        prop_assert!(a.iter().all(|(_, q)| q != &Rational::from_integer(0.into())));
    }

    #[test]
    fn symmetrize_is_permutation_invariant(p in pattern(5), perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
        let moved = p.permuted(&perm).expect("same nonzero slots");
        prop_assert_eq!(symmetrize(&FormalSum::basis(p)), symmetrize(&FormalSum::basis(moved)));
    }

    #[test]
    fn push_forward_is_linear(a in pattern_sum(2), b in pattern_sum(2), x in rational(), slots in prop::collection::vec(slot(2), 1..5)) {
        let asg = Assignment::new(2, slots).unwrap();
        let lhs = push_forward(&(&a + &b.scale(&x)), &asg).unwrap();
        let rhs = &push_forward(&a, &asg).unwrap() + &push_forward(&b, &asg).unwrap().scale(&x);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn solver_round_trip(rows in prop::collection::vec(prop::collection::vec(rational(), 4), 1..6), b_seed in prop::collection::vec(rational(), 6)) {
        let a = RationalMatrix::from_rows(rows.clone()).unwrap();
        let b: Vec<Rational> = b_seed[..rows.len()].to_vec();
        let cert = solve_exact(&a, &b).unwrap();
        prop_assert!(cert.verify(&a, &b));
        // A target built inside the column span is always solvable.
        let x: Vec<Rational> = b_seed[..4].to_vec();
        let inside = a.mul_vec(&x).unwrap();
        let cert = solve_exact(&a, &inside).unwrap();
        prop_assert!(cert.is_solution());
        prop_assert!(cert.verify(&a, &inside));
    }

    #[test]
    fn membership_round_trip(gens in prop::collection::vec(prop::collection::vec(rational(), 5), 1..5), target in prop::collection::vec(rational(), 5)) {
        let cert = membership(&target, &gens).unwrap();
        let sparse: Vec<_> = gens.iter().map(|g| to_sparse(g)).collect();
        prop_assert!(verify_membership(&cert, &to_sparse(&target), &sparse, 5));
    }
}

#[test]
fn combcomb_all_monomials() {
    for n in 1..=12u32 {
        for deg in 0..n as usize {
            assert!(combcomb_check(n, &IntPolynomial::monomial(deg)).unwrap(), "n={n} deg={deg}");
        }
        assert!(combcomb_check(n, &IntPolynomial::monomial(n as usize)).is_err());
    }
}

#[test]
fn pascal_exhaustive() {
    for u in -20i64..=20 {
        for k in 1i64..=25 {
            assert_eq!(binom(u, k), binom(u - 1, k) + binom(u - 1, k - 1));
        }
        assert_eq!(binom(u, 0), BigInt::from(1));
        assert_eq!(binom(u, -1), BigInt::from(0));
    }
}
