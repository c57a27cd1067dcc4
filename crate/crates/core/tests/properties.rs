//! Invariants checked on generated inputs.

use cohesive_core::cohesive::check_cohesive;
use cohesive_core::hom::{compose, cone, is_homotopy_equivalence, null_homotopy_solve};
use cohesive_core::linalg::{rank_kernel_image, solve_linear};
use cohesive_core::models::{chevalley_eilenberg, nc_torus_dga, nc_trace, NcTorusData};
use cohesive_core::random::{self, curved_dga, flat_modules, lie_algebra};
use cohesive_core::schema::{emit_model, ModelFile, ModelParts};
use cohesive_core::{AElement, BasisKey, CohesiveModule, Flavor, Scalar, SparseMatrix};
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::Arc;

fn cyclotomic() -> impl Strategy<Value = Scalar> {
    (prop::sample::select(vec![1u32, 3, 4, 6, 12]), prop::collection::vec((-4i64..=4, 1i64..=3), 12)).prop_map(
        |(n, cs)| {
            let coeffs = cs.into_iter().take(n as usize).map(|(p, q)| BigRational::new(p.into(), q.into())).collect();
            Scalar::from_coeffs(n, coeffs)
        },
    )
}

fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-2i64..=2, c), r).prop_map(|rows| {
            SparseMatrix::from_dense(rows.into_iter().map(|row| row.into_iter().map(Scalar::from_int).collect()).collect())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalars_form_a_field(a in cyclotomic(), b in cyclotomic(), c in cyclotomic()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn scalar_text_round_trips(a in cyclotomic()) {
        prop_assert_eq!(Scalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn rank_nullity_and_solutions(m in small_matrix(), x in prop::collection::vec(-3i64..=3, 6)) {
        let r = rank_kernel_image(&m);
        prop_assert_eq!(r.rank + r.kernel.len(), m.cols());
        for v in &r.kernel {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Scalar::is_zero));
        }
        let x: Vec<Scalar> = x.into_iter().take(m.cols()).map(Scalar::from_int).collect();
        let b = m.mul_vec(&x).unwrap();
        let y = solve_linear(&m, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&y).unwrap(), b);
    }

    #[test]
    fn generated_modules_are_cohesive_and_d_squares_to_zero(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let d = curved_dga(&mut rng);
        let a = d.algebra();
        prop_assert!(a.validate().passed());
        let ms: Vec<Arc<CohesiveModule>> =
            flat_modules(&mut rng, &d.flat).unwrap().iter().map(|m| Arc::new(d.transport(m).unwrap())).collect();
        for m in &ms {
            prop_assert!(check_cohesive(m).passed());
        }
        let (e, f) = (&ms[3], &ms[2]);
        let hc = cohesive_core::hom::hom_complex(e, f).unwrap();
        for k in hc.complex.degrees() {
            for phi in hc.basis(k) {
                prop_assert!(phi.differential().differential().is_zero());
            }
        }
    }

    #[test]
    fn equivalence_criterion_matches_cone(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = Arc::new(chevalley_eilenberg(&lie_algebra(&mut rng)));
        let ms: Vec<Arc<CohesiveModule>> = flat_modules(&mut rng, &a).unwrap().into_iter().map(Arc::new).collect();
        let phi = random::closed_morphism(&mut rng, &ms[0], &ms[2]).unwrap();
        let c = cone(&phi).unwrap();
        prop_assert_eq!(is_homotopy_equivalence(&phi).unwrap(), null_homotopy_solve(&c.cone).unwrap().is_some());
        prop_assert!(c.inclusion.is_closed());
        // The triangle's homotopy witnesses that inclusion∘φ is null.
        let composite = compose(&c.inclusion, &phi).unwrap();
        prop_assert!(c.homotopy.differential().sub(&composite).unwrap().is_zero());
    }

    #[test]
    fn torus_trace_is_a_trace(
        x in prop::collection::vec((-3i64..=3, -3i64..=3, -2i64..=2), 1..4),
        y in prop::collection::vec((-3i64..=3, -3i64..=3, -2i64..=2), 1..4),
    ) {
        let data = NcTorusData::rank_two(BigRational::new(1.into(), 3.into()), false);
        let a = nc_torus_dga(&data, Flavor::DeRham, None).unwrap();
        let build = |terms: &[(i64, i64, i64)]| {
            let mut e = AElement::zero();
            for &(m, n, c) in terms {
                e.add_term(BasisKey::nc(vec![m, n], 0), &Scalar::from_int(c));
            }
            e
        };
        let (x, y) = (build(&x), build(&y));
        prop_assert_eq!(nc_trace(&a, &a.multiply(&x, &y)).unwrap(), nc_trace(&a, &a.multiply(&y, &x)).unwrap());
    }

    #[test]
    fn emitted_models_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = chevalley_eilenberg(&lie_algebra(&mut rng));
        let file = emit_model(&a, &ModelParts::default());
        let text = file.to_json();
        let parsed = ModelFile::from_json(&text).unwrap();
        prop_assert_eq!(parsed.to_json(), text);
        prop_assert_eq!(&*parsed.build().unwrap().algebra, &a);
    }
}
