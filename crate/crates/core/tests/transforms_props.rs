use proptest::prelude::*;
use realpos::algebra::{self, MatrixAlgebra};
use realpos::cones;
use realpos::gen;
use realpos::linalg;
use realpos::transforms::{cayley, f_inverse, f_transform, f_transform_via_cayley};
use realpos::{ComplexMatrix, Tolerances};

/// Random accretive element of the algebra: a random element shifted by a
/// multiple of the identity, which every test algebra here contains.
fn accretive_in(a: &MatrixAlgebra, seed: u64) -> ComplexMatrix {
    let mut r = gen::rng(seed, 50);
    let m = a.random_element(&mut r);
    let shift = (-linalg::min_real_eig(&m)).max(0.0) + 0.1;
    &m + &ComplexMatrix::identity(a.ambient_dim).scale_re(shift)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn inverse_transform_is_accretive(seed in any::<u64>(), n in 1usize..=8) {
        let tol = Tolerances::default();
        let t = gen::gen_half_f(n, &mut gen::rng(seed, 51)).unwrap();
        prop_assert!(t.op_norm() < 1.0);
        let x = f_inverse(&t).unwrap();
        prop_assert!(cones::is_accretive(&x, &tol).margin >= -tol.psd_slack);
        // 2 Re(T(I − T)⁻¹) = (I − T*)⁻¹ (T + T* − 2T*T) (I − T)⁻¹
        let id = ComplexMatrix::identity(n);
        let inv = linalg::inverse(&(&id - &t)).unwrap();
        let middle = &(&t + &t.adjoint()) - &(&t.adjoint() * &t).scale_re(2.0);
        let rhs = &inv.adjoint() * &middle * &inv;
        let lhs = (&t * &inv).real_part().scale_re(2.0);
        prop_assert!(lhs.dist(&rhs) <= 1e-9 * (1.0 + lhs.op_norm()));
        prop_assert!(linalg::min_real_eig(&rhs) >= -tol.psd_slack);
    }

    #[test]
    fn forward_transform_roundtrips(seed in any::<u64>(), n in 1usize..=8) {
        let tol = Tolerances::default();
        let x = gen::gen_accretive(n, &mut gen::rng(seed, 52)).unwrap();
        let t = f_transform(&x).unwrap();
        prop_assert!(t.op_norm() < 1.0);
        prop_assert!(cones::f_membership(&t, &tol).in_half_f);
        prop_assert!(t.dist(&f_transform_via_cayley(&x).unwrap()) <= 1e-10);
        prop_assert!(cayley(&x).unwrap().op_norm() <= 1.0 + tol.eq_tol);
        prop_assert!(f_inverse(&t).unwrap().dist(&x) <= 1e-8 * (1.0 + x.op_norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_stay_in_the_algebra(seed in any::<u64>(), n in 1usize..=6, kind in 0usize..3) {
        let (a, x) = match kind {
            0 => {
                let a = MatrixAlgebra::upper_triangular(n);
                let x = accretive_in(&a, seed);
                (a, x)
            }
            1 => {
                let a = MatrixAlgebra::diagonal(n);
                let x = accretive_in(&a, seed);
                (a, x)
            }
            _ => {
                let x = gen::gen_accretive(n, &mut gen::rng(seed, 53)).unwrap();
                (algebra::oa(&x), x)
            }
        };
        let unitized = algebra::unitize(&a);
        prop_assert!(unitized.residual(&cayley(&x).unwrap()) <= 1e-7);
        prop_assert!(a.residual(&f_transform(&x).unwrap()) <= 1e-7);
    }
}

#[test]
fn margins_degrade_along_scalar_ray() {
    let tol = Tolerances::default();
    let gaps: Vec<(f64, f64)> = [1.0, 10.0, 100.0, 1000.0]
        .iter()
        .map(|&t| {
            let f = f_transform(&ComplexMatrix::identity(3).scale_re(t)).unwrap();
            (1.0 - f.op_norm(), cones::f_membership(&f, &tol).half_f_gap)
        })
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1].0 < w[0].0 && w[1].1 < w[0].1, "{gaps:?}");
    }
    assert!(gaps.iter().all(|&(norm_gap, half_gap)| norm_gap > 0.0 && half_gap >= 0.0));
}
