use borel_schur::combinatorics::{enumerate_lambda1, LatticePoint, MultiIndex};
use borel_schur::field::{Field, PrimeField, Rationals};
use borel_schur::kostant::{monomials_up_to_height, AlgebraElement, Kostant, PBWMonomial};
use borel_schur::linalg::{kernel, rank, Pivoting};
use borel_schur::schur_oracle::{rho, rho_generator, tau_elementary, TensorOperator};
use borel_schur::skew_category::{Element, TruncatedAlgebra};
use proptest::prelude::*;
use std::sync::OnceLock;

fn kostant3() -> &'static Kostant {
    static K: OnceLock<Kostant> = OnceLock::new();
    K.get_or_init(|| Kostant::new(3))
}

fn monos3() -> &'static [PBWMonomial] {
    static M: OnceLock<Vec<PBWMonomial>> = OnceLock::new();
    M.get_or_init(|| monomials_up_to_height(3, 3))
}

fn same<F: Field>(a: &TensorOperator<F::Elem>, b: &TensorOperator<F::Elem>, f: &F) -> bool {
    let mut d = a.clone();
    d.add_scaled(b, &f.neg(&f.one()), f);
    d.is_zero()
}

fn rho_element<F: Field>(x: &AlgebraElement<F>, r: usize, f: &F) -> TensorOperator<F::Elem> {
    let mut op = TensorOperator::zero(x.n(), r).unwrap();
    for (m, c) in x.terms() {
        op.add_scaled(&rho(m, r, f).unwrap(), c, f);
    }
    op
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kostant_product_is_associative(a in 0..60usize, b in 0..60usize, c in 0..60usize) {
        let k = kostant3();
        let f = Rationals;
        let ms = monos3();
        let (x, y, z) = (
            AlgebraElement::monomial(ms[a % ms.len()].clone(), &f),
            AlgebraElement::monomial(ms[b % ms.len()].clone(), &f),
            AlgebraElement::monomial(ms[c % ms.len()].clone(), &f),
        );
        let left = k.multiply(&k.multiply(&x, &y, &f).unwrap(), &z, &f).unwrap();
        let right = k.multiply(&x, &k.multiply(&y, &z, &f).unwrap(), &f).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kostant_products_are_integral_and_graded(a in 0..60usize, b in 0..60usize) {
        let k = kostant3();
        let ms = monos3();
        let (x, y) = (&ms[a % ms.len()], &ms[b % ms.len()]);
        let prod = k.product_integral(x, y).unwrap();
        let deg = &x.degree() + &y.degree();
        for (m, _) in prod.iter() {
            prop_assert_eq!(m.degree(), deg.clone());
        }
    }

    #[test]
    fn rho_is_multiplicative(a in 0..60usize, b in 0..60usize, p in prop::sample::select(vec![2u64, 3])) {
        let k = kostant3();
        let f = PrimeField::new(p).unwrap();
        let ms = monos3();
        let (x, y) = (&ms[a % ms.len()], &ms[b % ms.len()]);
        let prod = k.multiply_monomials(x, y, &f).unwrap();
        let lhs = rho_element(&prod, 3, &f);
        let rhs = rho(x, 3, &f).unwrap().compose(&rho(y, 3, &f).unwrap(), &f);
        prop_assert!(same(&lhs, &rhs, &f));
    }

    #[test]
    fn elementary_unipotent_is_divided_power_exponential(
        pair in prop::sample::select(vec![(1usize, 2usize), (1, 3), (2, 3)]),
        c in 0i64..7,
        r in 1usize..4,
        p in prop::sample::select(vec![0u64, 2, 5]),
    ) {
        fn check<F: Field>(f: F, i: usize, j: usize, c: i64, r: usize) -> bool {
            let cc = f.from_i64(c);
            let tau = tau_elementary(3, r, i, j, &cc, &f).unwrap();
            let mut sum = TensorOperator::zero(3, r).unwrap();
            let mut power = f.one();
            for k in 0..=r as u32 {
                sum.add_scaled(&rho_generator(3, r, i, j, k, &f).unwrap(), &power, &f);
                power = f.mul(&power, &cc);
            }
            same(&tau, &sum, &f)
        }
        let (i, j) = pair;
        let ok = if p == 0 { check(Rationals, i, j, c, r) } else { check(PrimeField::new(p).unwrap(), i, j, c, r) };
        prop_assert!(ok);
    }

    #[test]
    fn rho_commutes_with_place_permutations(a in 0..60usize, perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let f = PrimeField::new(3).unwrap();
        let ms = monos3();
        let op = rho(&ms[a % ms.len()], 3, &f).unwrap();
        for col in MultiIndex::all(3, 3) {
            for (row, c) in op.apply_basis(col.to_linear()) {
                let row_p = MultiIndex::from_linear(3, 3, row).permuted(&perm);
                prop_assert_eq!(op.entry(row_p.to_linear(), col.permuted(&perm).to_linear(), &f), c);
            }
        }
    }

    #[test]
    fn rank_ignores_pivoting(seed in any::<u64>(), rows in prop::collection::vec(prop::collection::vec(0u64..5, 6), 1..8)) {
        let f = PrimeField::new(5).unwrap();
        let r0 = rank(&f, 6, &rows);
        let k0 = kernel(&f, 6, &rows, Pivoting::FirstNonzero).len();
        let k1 = kernel(&f, 6, &rows, Pivoting::Shuffled(seed)).len();
        prop_assert_eq!(k0, k1);
        prop_assert_eq!(k0 + r0, rows.len());
    }
}

fn check_reduction_is_algebra_map<F: Field>(k: &Kostant, r: u64, f: F) {
    let n = k.n();
    let big = TruncatedAlgebra::truncate_convex(k, &enumerate_lambda1(n, r as i64), f.clone()).unwrap();
    let small = TruncatedAlgebra::composition_algebra(k, r, f.clone()).unwrap();
    for i in 0..big.dim() {
        let x = Element::basis(i, &f);
        let rx = big.reduce_to_composition_algebra(&x, &small);
        for j in 0..big.dim() {
            let y = Element::basis(j, &f);
            let lhs = big.reduce_to_composition_algebra(&big.multiply(&x, &y), &small);
            let rhs = small.multiply(&rx, &big.reduce_to_composition_algebra(&y, &small));
            assert_eq!(lhs, rhs, "n {n} r {r}: basis {i} · {j}");
        }
    }
    assert_eq!(big.reduce_to_composition_algebra(&big.unit(), &small), small.unit());
}

#[test]
fn reduction_to_composition_algebra_is_multiplicative() {
    check_reduction_is_algebra_map(&Kostant::new(2), 3, Rationals);
    check_reduction_is_algebra_map(&Kostant::new(2), 3, PrimeField::new(2).unwrap());
    check_reduction_is_algebra_map(kostant3(), 2, Rationals);
    check_reduction_is_algebra_map(kostant3(), 2, PrimeField::new(2).unwrap());
    check_reduction_is_algebra_map(kostant3(), 3, PrimeField::new(3).unwrap());
}

#[test]
fn two_idempotent_fails_where_a_divided_square_vanishes() {
    let k = Kostant::new(2);
    let mid = LatticePoint(vec![1, 1]);
    let y = enumerate_lambda1(2, 2);
    let a2 = TruncatedAlgebra::truncate_convex(&k, &y, PrimeField::new(2).unwrap()).unwrap();
    let c2 = a2.check_two_idempotent(&a2.point_idempotent(std::slice::from_ref(&mid))).unwrap();
    assert_eq!((c2.dim_aea, c2.dim_tensor, c2.holds), (3, 4, false));
    let a0 = TruncatedAlgebra::truncate_convex(&k, &y, Rationals).unwrap();
    let c0 = a0.check_two_idempotent(&a0.point_idempotent(std::slice::from_ref(&mid))).unwrap();
    assert_eq!((c0.dim_aea, c0.dim_tensor, c0.holds), (4, 4, true));
}
