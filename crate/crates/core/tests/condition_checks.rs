mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use resonance_core::conditions::*;
use resonance_core::nonlinearity::{builtin::*, BoundSampleSpec};
use resonance_core::NonlinearityModel;

fn ll_instances() -> Vec<(NonlinearityModel, Condition)> {
    vec![
        (arctan(1.0), Condition::LL1),
        (arctan(-1.0), Condition::LL2),
        (arctan_minus_gauss(1.0, 2.5), Condition::LL1),
    ]
}

fn sr_instances() -> Vec<(NonlinearityModel, Condition)> {
    vec![(strong_res(1.0), Condition::SR1), (strong_res(-4.0), Condition::SR2)]
}

#[test]
fn landesman_lazer_integral_for_arctan() {
    let s = common::heat(32, 2);
    let v = check_landesman_lazer(&arctan(1.0), &s.es, 2, &s.grid, 2).unwrap();
    assert!(v.establishes(Condition::LL1));
    let want = (2.0 * PI).sqrt();
    assert!((v.min_value - want).abs() <= 0.01 * want);
}

#[test]
fn analytic_conditions_imply_geometric_ones() {
    let s = common::heat(32, 2);
    let spec = BoundSampleSpec::for_length(PI);
    let mut verdicts = Vec::new();
    for (model, expect) in ll_instances() {
        verdicts.push((check_landesman_lazer(&model, &s.es, 2, &s.grid, 2).unwrap(), model, expect));
    }
    for (model, expect) in sr_instances() {
        verdicts.push((check_strong_resonance(&model, &s.es, &s.grid, &spec).unwrap(), model, expect));
    }
    for (v, model, expect) in verdicts {
        assert!(v.establishes(expect), "{}: {}", model.name, v.label());
        let nb = s.neighborhood(&model);
        assert_eq!(nb.condition, expect.implied_geometric(), "{}", model.name);
        for ball in [nb.r_q, 2.0 * nb.r_q] {
            let g = check_g_direct(&model, &s.es, &s.d, &s.grid, common::ALPHA, ball, 4.0 * nb.r_p, &GSampleSpec::default())
                .unwrap();
            assert!(g.establishes(expect.implied_geometric()), "{} ball {ball}: {}", model.name, g.label());
            assert!(g.margin() > 0.0);
        }
    }
}

#[test]
fn missing_metadata_is_reported() {
    let s = common::heat(8, 2);
    let spec = BoundSampleSpec::for_length(PI);
    assert!(matches!(
        check_strong_resonance(&arctan(1.0), &s.es, &s.grid, &spec),
        Err(resonance_core::Error::InsufficientMetadata(_))
    ));
    assert!(matches!(
        check_landesman_lazer(&const_kernel(2, PI), &s.es, 2, &s.grid, 2),
        Err(resonance_core::Error::InsufficientMetadata(_))
    ));
}

#[test]
fn constant_kernel_source_has_no_neighborhood() {
    let s = common::heat(16, 2);
    let search = RadiusSearch {
        cap: 1e3,
        ..Default::default()
    };
    let r = build_isolating_neighborhood(&const_kernel(2, PI), &s.es, &s.d, &s.cb, &s.grid, &search);
    assert!(matches!(r, Err(resonance_core::Error::ConditionNotVerified(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn g_check_is_deterministic(seed in any::<u64>()) {
        let s = common::heat(16, 2);
        let spec = GSampleSpec { ball_samples: 8, radii: 4, directions: 2, seed };
        let model = arctan_minus_gauss(1.0, 2.5);
        let a = check_g_direct(&model, &s.es, &s.d, &s.grid, common::ALPHA, 20.0, 3.0, &spec).unwrap();
        let b = check_g_direct(&model, &s.es, &s.d, &s.grid, common::ALPHA, 20.0, 3.0, &spec).unwrap();
        prop_assert_eq!(a.witnesses, b.witnesses);
        prop_assert_eq!(a.min_value.to_bits(), b.min_value.to_bits());
    }

    #[test]
    fn larger_radius_keeps_a_held_verdict(seed in 0u64..1000, factor in 1.0f64..20.0) {
        let s = common::heat(16, 2);
        let spec = GSampleSpec { ball_samples: 16, radii: 8, directions: 2, seed };
        for model in [arctan(1.0), strong_res(-4.0)] {
            let nb = s.neighborhood(&model);
            let r = 2.0 * nb.r_p;
            let base = check_g_direct(&model, &s.es, &s.d, &s.grid, common::ALPHA, nb.r_q, r, &spec).unwrap();
            if base.holds && base.margin() > 0.0 {
                let big = check_g_direct(&model, &s.es, &s.d, &s.grid, common::ALPHA, nb.r_q, r * factor, &spec).unwrap();
                prop_assert!(big.holds);
                prop_assert_eq!(big.condition, base.condition);
            }
        }
    }
}
