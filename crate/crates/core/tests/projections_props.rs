use proptest::prelude::*;
use realpos::cones;
use realpos::gen;
use realpos::interp::instances;
use realpos::linalg;
use realpos::powers::{self, root_series};
use realpos::projections::{self, ProjMethod, ProjStatus};
use realpos::{c, ComplexMatrix, Tolerances, C64};

/// `W (y ⊕ 0) W*` with `y` sectorial of half-angle `rho`.
fn singular_sectorial(n: usize, rho: f64, seed: u64) -> ComplexMatrix {
    let mut r = gen::rng(seed, 80);
    let rank = 1 + (seed as usize) % n;
    let y = gen::gen_sectorial(rank, rho, &mut r).unwrap();
    let core = if rank == n { y } else { ComplexMatrix::direct_sum(&y, &ComplexMatrix::zeros(n - rank)) };
    let w = gen::unitary(n, &mut r);
    &w * &core * w.adjoint()
}

/// Normal element of `½𝔉` with eigenvalues on the disk `|z − ½| ≤ ½`,
/// including 0 and 1.
fn normal_half_f(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = gen::rng(seed, 81);
    let d: Vec<C64> = (0..n)
        .map(|k| match k % 3 {
            0 => c(1.0, 0.0),
            1 => c(0.0, 0.0),
            _ => {
                let z = gen::complex_normal(&mut r).unscale(4.0);
                c(0.5, 0.0) + z * (0.45 / z.norm()).min(1.0)
            }
        })
        .collect();
    let u = gen::unitary(n, &mut r);
    &u * &ComplexMatrix::diag(&d) * u.adjoint()
}

fn kernel_vectors(h: &ComplexMatrix, cut: f64) -> Vec<Vec<C64>> {
    let e = linalg::herm_eig(h);
    (0..h.n()).filter(|&k| e.values[k] <= cut).map(|k| e.vector(k)).collect()
}

fn norm_of(v: &[C64]) -> f64 {
    linalg::vec_norm(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn support_is_root_invariant(seed in any::<u64>(), n in 1usize..=8, singular in any::<bool>()) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 82);
        let x = if singular { gen::gen_accretive_singular(n, &mut r).unwrap() } else { gen::gen_accretive(n, &mut r).unwrap() };
        let root = powers::power(&x, 0.5, &tol).unwrap().value;
        let sx = projections::support_projection(&x, ProjMethod::Iterative, &tol).unwrap();
        let sr = projections::support_projection(&root, ProjMethod::Iterative, &tol).unwrap();
        prop_assert!(sx.proj.dist(&sr.proj) <= 1e-6);
        if sx.status == ProjStatus::Converged {
            prop_assert!(linalg::projection_defect(&sx.proj) <= 1e-8);
        }
    }

    #[test]
    fn peak_is_root_invariant(seed in any::<u64>(), n in 1usize..=8) {
        let tol = Tolerances::default();
        let x = gen::gen_half_f_norm_one(n, &mut gen::rng(seed, 83)).unwrap();
        let root = root_series(&x, 2, 200, &tol).unwrap().value;
        let ux = projections::peak_projection(&x, ProjMethod::Iterative, &tol).unwrap().proj;
        let ur = projections::peak_projection(&root, ProjMethod::Iterative, &tol).unwrap().proj;
        prop_assert!(ux.dist(&ur) <= 1e-6);
        prop_assert!(projections::is_peak_for(&x, &ux, &tol).unwrap());
    }

    #[test]
    fn dyadic_roots_approach_support(seed in any::<u64>(), n in 1usize..=6, k in 1u32..=6) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 84);
        let x = if seed % 2 == 0 || n == 1 {
            gen::gen_half_f(n, &mut r).unwrap()
        } else {
            let w = gen::unitary(n, &mut r);
            let y = gen::gen_half_f(n - n / 2, &mut r).unwrap();
            &w * &ComplexMatrix::direct_sum(&y, &ComplexMatrix::zeros(n / 2)) * w.adjoint()
        };
        let s = projections::support_oracle(&x);
        let y = powers::power(&x, 0.5f64.powi(k as i32), &tol).unwrap().value;
        let gap = &s - &y.real_part();
        let diff = &y - &s;
        for _ in 0..8 {
            let z = gen::unit_vector(n, &mut r);
            let lhs = norm_of(&diff.matvec(&z)).powi(2);
            let rhs = linalg::vdot(&z, &gap.matvec(&z)).re;
            prop_assert!(lhs <= rhs + tol.psd_slack, "{lhs:e} > {rhs:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn real_part_kernel_is_kernel(seed in any::<u64>(), n in 1usize..=8, rho in 0.05f64..1.5) {
        let tol = Tolerances::default();
        let x = singular_sectorial(n, rho, seed);
        prop_assume!(cones::sector_angle(&x, &tol).is_some_and(|a| a < std::f64::consts::FRAC_PI_2 - 0.01));
        let s = projections::support_oracle(&x);
        let h = &x + &x.adjoint();
        for v in kernel_vectors(&h, 1e-12) {
            prop_assume!(linalg::vdot(&v, &h.matvec(&v)).re <= 1e-12);
            prop_assert!(norm_of(&x.matvec(&v)) <= 1e-5);
            prop_assert!(norm_of(&s.matvec(&v)) <= 1e-5);
        }
        for m in [2u32, 3, 4] {
            let root = powers::power(&x, 1.0 / m as f64, &tol).unwrap().value;
            for v in kernel_vectors(&root.real_part(), 1e-12) {
                prop_assert!(norm_of(&s.matvec(&v)) <= 1e-5, "m = {m}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn roots_of_strictly_real_positive_elements(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 85);
        let a = instances::unital_algebra(6, &mut r).unwrap();
        let m = a.random_element(&mut r);
        let lift = (0.05 - linalg::min_real_eig(&m)).max(0.0);
        let x = &m + &ComplexMatrix::identity(a.ambient_dim).scale_re(lift);
        prop_assert!(cones::is_strictly_real_positive(&a, &x, &tol).unwrap());
        for k in [2u32, 3, 4] {
            let root = powers::power(&x, 1.0 / k as f64, &tol).unwrap().value;
            prop_assert!(cones::is_strictly_real_positive(&a, &root, &tol).unwrap(), "k = {k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn quartic_identity_is_contractive(seed in any::<u64>(), n in 1usize..=8) {
        let tol = Tolerances::default();
        let x = gen::gen_half_f(n, &mut gen::rng(seed, 86)).unwrap();
        let id = ComplexMatrix::identity(n);
        let m = &id - &(&x - &(&x * &x)).scale_re(4.0);
        prop_assert!(m.op_norm() <= 1.0 + tol.eq_tol);
        let square = (&id - &x.scale_re(2.0)).powi(2);
        prop_assert!(m.dist(&square) <= 1e-12);
    }

    #[test]
    fn normal_strict_urysohn_support(seed in any::<u64>(), n in 1usize..=8) {
        let tol = Tolerances::default();
        let x = normal_half_f(n, seed);
        let id = ComplexMatrix::identity(n);
        let s = projections::support_projection(&x, ProjMethod::Iterative, &tol).unwrap().proj;
        let u = projections::peak_projection(&x, ProjMethod::Iterative, &tol).unwrap().proj;
        let prod = &x * &(&id - &x);
        // rounding noise around a zero product is not a kernel signal
        let prod = if prod.op_norm() <= 1e-12 { ComplexMatrix::zeros(n) } else { projections::support_oracle(&prod) };
        prop_assert!(prod.dist(&(&s * &(&id - &u))) <= 1e-6);
        prop_assert!(prod.dist(&projections::meet(&s, &(&id - &u)).unwrap()) <= 1e-6);
    }

    #[test]
    fn join_and_meet_bound_their_arguments(seed in any::<u64>(), n in 1usize..=6) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 87);
        let p = projections::support_oracle(&gen::gen_accretive_singular(n, &mut r).unwrap());
        let q = projections::support_oracle(&gen::gen_accretive_singular(n, &mut r).unwrap());
        let j = projections::join(&p, &q).unwrap();
        let m = projections::meet(&p, &q).unwrap();
        for e in [&j, &m] {
            prop_assert!(linalg::projection_defect(e) <= 1e-8);
        }
        for e in [&p, &q] {
            prop_assert!(linalg::min_real_eig(&(&j - e)) >= -tol.psd_slack);
            prop_assert!(linalg::min_real_eig(&(e - &m)) >= -tol.psd_slack);
        }
    }

    #[test]
    fn peak_projection_is_minimal(seed in any::<u64>(), n in 2usize..=6) {
        let tol = Tolerances::default();
        let x = gen::gen_half_f_norm_one(n, &mut gen::rng(seed, 88)).unwrap();
        let u = projections::peak_projection(&x, ProjMethod::Oracle, &tol).unwrap().proj;
        prop_assert!(projections::is_peak_for(&x, &u, &tol).unwrap());
        // drop one direction of u: no longer peaks
        let range = linalg::projection_range(&u);
        if range.len() >= 2 {
            let smaller = linalg::projection_onto(&range[1..], n);
            let fixes = (&smaller * &x).dist(&smaller) <= tol.eq_tol;
            prop_assert!(!fixes || !projections::is_peak_for(&x, &smaller, &tol).unwrap());
        }
    }

    #[test]
    fn hereditary_subalgebra_of_accretive_element(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut r = gen::rng(seed, 89);
        let a = instances::unital_algebra(5, &mut r).unwrap();
        let m = a.random_element(&mut r);
        let lift = (-linalg::min_real_eig(&m)).max(0.0);
        let x = &m + &ComplexMatrix::identity(a.ambient_dim).scale_re(lift);
        let out = projections::hsa_and_ideal(&a, &x, &tol).unwrap();
        prop_assert!(out.hereditary_residual <= 1e-7);
        prop_assert!(out.support_residual <= 1e-7);
    }
}
