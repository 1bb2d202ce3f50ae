use apair_core::estimates::commbound_check;
use apair_core::funcalc::bounded_transform;
use apair_core::pairs::Factorization;
use apair_core::random::{random_matrix, random_odd_self_adjoint, random_space, trial_rng};
use apair_core::{
    graded_commutator, graded_tensor, GradedMatrix, OddSelfAdjoint, Parity, ScalarFunction, Spectrum, TGrid,
};
use proptest::prelude::*;

fn parity(bit: bool) -> Parity {
    if bit {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn sign(a: Parity, b: Parity) -> f64 {
    a.koszul(b)
}

fn close(a: &GradedMatrix, b: &GradedMatrix, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

fn named_functions() -> Vec<ScalarFunction> {
    vec![
        ScalarFunction::Gauss0,
        ScalarFunction::Gauss1,
        ScalarFunction::ResolventPlus,
        ScalarFunction::ResolventMinus,
        ScalarFunction::Cayley,
        ScalarFunction::G,
        ScalarFunction::BoundedTransform { n: 3.0 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graded_antisymmetry(seed in any::<u64>(), dim in 2usize..9, pa in any::<bool>(), pb in any::<bool>()) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let (pa, pb) = (parity(pa), parity(pb));
        let a = random_matrix(&mut rng, &space, Some(pa));
        let b = random_matrix(&mut rng, &space, Some(pb));
        let ab = graded_commutator(&a, &b).unwrap();
        let ba = graded_commutator(&b, &a).unwrap();
        prop_assert!(close(&ab, &ba.scale(-sign(pa, pb)), 1e-12));
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>(), dim in 2usize..9, bits in any::<[bool; 3]>()) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let (pa, pb, pc) = (parity(bits[0]), parity(bits[1]), parity(bits[2]));
        let a = random_matrix(&mut rng, &space, Some(pa));
        let b = random_matrix(&mut rng, &space, Some(pb));
        let c = random_matrix(&mut rng, &space, Some(pc));
        let lhs = graded_commutator(&a, &(&b * &c)).unwrap();
        let rhs = &(&graded_commutator(&a, &b).unwrap() * &c)
            + &(&b * &graded_commutator(&a, &c).unwrap()).scale(sign(pa, pb));
        prop_assert!(close(&lhs, &rhs, 1e-11));
    }

    #[test]
    fn koszul_multiplicativity(seed in any::<u64>(), m in 1usize..5, n in 1usize..5, bits in any::<[bool; 4]>()) {
        let mut rng = trial_rng(seed, 0);
        let s1 = random_space(&mut rng, m);
        let s2 = random_space(&mut rng, n);
        let [pa, pb, pc, pd] = bits.map(parity);
        let a = random_matrix(&mut rng, &s1, Some(pa));
        let c = random_matrix(&mut rng, &s1, Some(pc));
        let b = random_matrix(&mut rng, &s2, Some(pb));
        let d = random_matrix(&mut rng, &s2, Some(pd));
        let lhs = &graded_tensor(&a, &b) * &graded_tensor(&c, &d);
        let rhs = graded_tensor(&(&a * &c), &(&b * &d)).scale(sign(pb, pc));
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn parity_decomposition_is_idempotent(seed in any::<u64>(), dim in 1usize..10) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let m = random_matrix(&mut rng, &space, None);
        let (e, o) = m.parity_decompose();
        prop_assert_eq!(&(&e + &o), &m);
        prop_assert_eq!(&e.even_part(), &e);
        prop_assert_eq!(&o.odd_part(), &o);
        prop_assert!(e.odd_part().max_abs() == 0.0 && o.even_part().max_abs() == 0.0);
        prop_assert!(close(&e, &(&m + &m.conjugate_by_grading()).scale(0.5), 1e-15));
    }

    #[test]
    fn calculus_is_multiplicative_and_contractive(seed in any::<u64>(), dim in 2usize..9, i in 0usize..7, j in 0usize..7) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let d = random_odd_self_adjoint(&mut rng, &space);
        let spec = Spectrum::of(&d);
        let fs = named_functions();
        let (f, g) = (&fs[i], &fs[j]);
        let lhs = &spec.apply(f) * &spec.apply(g);
        prop_assert!(close(&lhs, &spec.apply(&f.product(g)), 1e-12));
        let sup = f.sup_norm().unwrap();
        prop_assert!(spec.apply(f).operator_norm() <= sup * (1.0 + 1e-12));
    }

    #[test]
    fn calculus_respects_grading(seed in any::<u64>(), dim in 2usize..9, i in 0usize..7) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let d = random_odd_self_adjoint(&mut rng, &space);
        let f = &named_functions()[i];
        let fd = Spectrum::of(&d).apply(f);
        // γ f(D) γ = f(γDγ) = f(-D)
        let reflected = Spectrum::of(&d.neg()).apply(f);
        prop_assert!(close(&fd.conjugate_by_grading(), &reflected, 1e-12));
        if let Some(p) = f.parity() {
            prop_assert_eq!(fd.homogeneous_parity(1e-12), Some(p));
        }
    }

    #[test]
    fn bounded_transform_norm(seed in any::<u64>(), dim in 2usize..9, n in 0.1f64..50.0) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let d = random_odd_self_adjoint(&mut rng, &space);
        let dn = bounded_transform(&d, n).unwrap();
        prop_assert!(dn.operator_norm() <= n / 2.0 * (1.0 + 1e-12));
        prop_assert!(dn.operator_norm() <= d.operator_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn commutator_bound(seed in any::<u64>(), dim in 2usize..9) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let d = random_odd_self_adjoint(&mut rng, &space);
        let d2 = random_odd_self_adjoint(&mut rng, &space);
        let grid = TGrid::geometric(1.0, 100.0, 4).unwrap();
        let certs = commbound_check(&d, &d2, &[0.5, 1.0, 2.0, 4.0, 8.0, 16.0], &grid).unwrap();
        prop_assert!(certs.iter().all(|c| c.pass));
    }

    #[test]
    fn koszul_lifts_factorize_exactly(seed in any::<u64>(), dim in 2usize..5, t in 0.3f64..30.0) {
        let mut rng = trial_rng(seed, 0);
        let space = random_space(&mut rng, dim);
        let d = random_odd_self_adjoint(&mut rng, &space);
        let d2 = random_odd_self_adjoint(&mut rng, &space);
        let id = GradedMatrix::identity(&space);
        let l = OddSelfAdjoint::new(graded_tensor(&d, &id)).unwrap();
        let r = OddSelfAdjoint::new(graded_tensor(&id, &d2)).unwrap();
        let (even, odd) = Factorization::new(&l, &r).unwrap().at(t).unwrap();
        prop_assert!(even <= 1e-12 && odd <= 1e-12, "{} {}", even, odd);
    }
}
