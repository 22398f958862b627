use proptest::prelude::*;
use realpos::algebra::{self, GenMode};
use realpos::gen;
use realpos::{ComplexMatrix, MatrixAlgebra, Tolerances};

fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::unit(n, i, j)
}

fn worked_algebras() -> Vec<MatrixAlgebra> {
    vec![
        MatrixAlgebra::from_span(2, &[e(2, 0, 0), e(2, 0, 1)], "span(E11,E12)").unwrap(),
        MatrixAlgebra::upper_triangular(2),
        MatrixAlgebra::from_span(2, &[e(2, 0, 1)], "span(E12)").unwrap(),
    ]
}

#[test]
fn amplification_commutes_with_a_h() {
    let tol = Tolerances::default();
    for a in worked_algebras() {
        for k in [2, 3] {
            let lhs = algebra::a_h(&algebra::amplify(&a, k).unwrap(), 50, 0, &tol).algebra;
            let rhs = algebra::amplify(&algebra::a_h(&a, 50, 0, &tol).algebra, k).unwrap();
            assert!(lhs.mutual_residual(&rhs) <= 1e-6, "{} k = {k}", a.label);
            assert_eq!(lhs.dim(), rhs.dim());
        }
    }
}

#[test]
fn worked_a_h_values() {
    let tol = Tolerances::default();
    let [span, upper, nil]: [MatrixAlgebra; 3] = worked_algebras().try_into().unwrap();
    // span{E11, E12}: q = E11, A_H = span{E11}
    let r = algebra::a_h(&span, 50, 0, &tol);
    assert!(r.q.dist(&e(2, 0, 0)) < 1e-12);
    assert_eq!(r.algebra.dim(), 1);
    assert!(r.algebra.residual(&e(2, 0, 0)) < 1e-12);
    // upper triangular: unital, q = I, A_H = A
    let r = algebra::a_h(&upper, 50, 0, &tol);
    assert!(r.q.dist(&ComplexMatrix::identity(2)) < 1e-12);
    assert!(r.algebra.mutual_residual(&upper) < 1e-12);
    // span{E12}: no accretive elements besides 0
    let r = algebra::a_h(&nil, 50, 0, &tol);
    assert!(r.q.max_abs() < 1e-12);
    assert_eq!(r.algebra.dim(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generate_is_idempotent(seed in any::<u64>(), n in 2usize..=5, count in 1usize..=2) {
        let mut r = gen::rng(seed, 10);
        let gens: Vec<ComplexMatrix> = (0..count).map(|_| gen::gaussian(n, &mut r)).collect();
        let a = algebra::generate_algebra(&gens, GenMode::Algebra, false).unwrap();
        let again = algebra::generate_algebra(&a.basis, GenMode::Algebra, false).unwrap();
        prop_assert!(a.mutual_residual(&again) <= 1e-8);
    }

    #[test]
    fn oa_of_accretive_set_is_unital(seed in any::<u64>(), n in 1usize..=6, count in 1usize..=3) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 11);
        let gens: Vec<ComplexMatrix> = (0..count).map(|_| gen::gen_accretive(n, &mut r).unwrap()).collect();
        let a = algebra::generate_algebra(&gens, GenMode::Algebra, false).unwrap();
        prop_assert!(algebra::identity_of(&a, &tol).is_some());
    }

    #[test]
    fn a_h_is_a_fixed_point(seed in any::<u64>(), n in 2usize..=4, kind in 0usize..4) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 12);
        let a = match kind {
            0 => MatrixAlgebra::upper_triangular(n),
            1 => {
                // nonunital: strictly upper triangular plus E11
                let mut els = vec![e(n, 0, 0)];
                els.extend((0..n).flat_map(|i| (i + 1..n).map(move |j| e(n, i, j))));
                algebra::generate_algebra(&els, GenMode::Algebra, false).unwrap()
            }
            2 => algebra::oa(&gen::gen_accretive(n, &mut r).unwrap()),
            _ => algebra::generate_algebra(&[gen::gaussian(n, &mut r)], GenMode::Algebra, false).unwrap(),
        };
        let first = algebra::a_h(&a, 20, seed, &tol);
        let second = algebra::a_h(&first.algebra, 20, seed, &tol);
        prop_assert!(second.q.dist(&first.q) <= 1e-8);
        prop_assert!(second.algebra.mutual_residual(&first.algebra) <= 1e-8);
    }
}
