use homfam::families::schema::ParameterDocument;
use homfam::families::NormalizerStrategy;
use homfam::random::{random_group_element, random_point};
use homfam::verify::invariance_residual;
use homfam::{Classical, FamilySpec, FamilyTag, NaturalParameter, Point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, Continuous, Weibull};

fn closed_form_families() -> Vec<FamilySpec> {
    FamilyTag::defaults()
        .into_iter()
        .map(|t| FamilySpec::new(t).unwrap())
        .filter(|s| s.normalizer == NormalizerStrategy::ClosedForm)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_density_is_invariant_under_the_group(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in closed_form_families() {
            let theta = s.example_parameters()[which].clone();
            let points: Vec<Point> = (0..10).map(|_| random_point(&mut rng, &s.space())).collect();
            let g = random_group_element(&mut rng, &s.pair());
            let r = invariance_residual(&s, &theta, &g, &points).unwrap();
            prop_assert!(r.residual <= 1e-10, "{}: {}", s.name(), r.residual);
        }
    }

    #[test]
    fn bernoulli_probabilities_sum_to_one(theta in -30.0f64..30.0) {
        let s = FamilySpec::new(FamilyTag::Bernoulli).unwrap();
        let t = NaturalParameter::new(vec![theta], vec![]);
        let p: f64 = [Point::Sign(1), Point::Sign(-1)]
            .iter()
            .map(|x| s.log_density(&t, x).unwrap().exp())
            .sum();
        prop_assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_with_half_integer_shape_is_chi_squared(dof in 1u32..12, x in 0.01f64..40.0) {
        let s = FamilySpec::new(FamilyTag::GammaLambda { lambda: 1.0 }).unwrap();
        let t = s.from_classical(&Classical::GammaLambda { k: dof as f64 / 2.0, theta: 2.0 }).unwrap();
        let got = s.lebesgue_log_density(&t, &Point::Positive(x)).unwrap();
        let want = ChiSquared::new(dof as f64).unwrap().ln_pdf(x);
        prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn unit_shape_is_weibull(lambda in 0.2f64..5.0, scale in 0.2f64..5.0, x in 0.05f64..10.0) {
        let s = FamilySpec::new(FamilyTag::GammaLambda { lambda }).unwrap();
        let t = s.from_classical(&Classical::GammaLambda { k: 1.0, theta: scale }).unwrap();
        let got = s.lebesgue_log_density(&t, &Point::Positive(x)).unwrap();
        let want = Weibull::new(lambda, scale).unwrap().ln_pdf(x);
        prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn classical_round_trip(which in 0usize..3) {
        for t in FamilyTag::defaults() {
            let s = FamilySpec::new(t).unwrap();
            let theta = s.canonical_gauge(&s.example_parameters()[which]);
            if let Ok(c) = s.to_classical(&theta) {
                let back = s.from_classical(&c).unwrap();
                for (a, b) in theta.flat().iter().zip(back.flat()) {
                    prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{}", s.name());
                }
            }
        }
    }

    #[test]
    fn parameter_documents_round_trip(sigma in 0.05f64..20.0, mu in -50.0f64..50.0, k in 0.1f64..30.0, scale in 0.05f64..20.0) {
        let normal = FamilySpec::new(FamilyTag::Normal).unwrap();
        let gamma = FamilySpec::new(FamilyTag::GammaLambda { lambda: 1.0 }).unwrap();
        let cases = [
            (normal.clone(), Classical::Normal { sigma, mu }),
            (gamma.clone(), Classical::GammaLambda { k, theta: scale }),
        ];
        for (s, c) in cases {
            let theta = s.from_classical(&c).unwrap();
            for doc in [ParameterDocument::classical(&s, &c).unwrap(), ParameterDocument::natural(&s, &theta).unwrap()] {
                let text = doc.to_json_string().unwrap();
                let parsed = ParameterDocument::from_json_str(&text).unwrap();
                prop_assert_eq!(&parsed, &doc);
                let (s2, theta2) = parsed.resolve().unwrap();
                prop_assert_eq!(s2.tag, s.tag);
                for (a, b) in theta.flat().iter().zip(theta2.flat()) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }
    }
}

#[test]
fn samples_depend_only_on_the_seed() {
    for t in FamilyTag::defaults() {
        let s = FamilySpec::new(t).unwrap();
        let theta = s.example_parameters()[1].clone();
        let a = homfam::families::sample(&s, &theta, 200, 11).unwrap();
        let b = homfam::families::sample(&s, &theta, 200, 11).unwrap();
        let c = homfam::families::sample(&s, &theta, 200, 12).unwrap();
        assert_eq!(a, b, "{}", s.name());
        assert_ne!(a, c, "{}", s.name());
        for x in &a {
            x.validate(&s.space()).unwrap();
        }
    }
}
