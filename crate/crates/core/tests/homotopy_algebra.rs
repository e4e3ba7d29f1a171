use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance_core::homotopy::{equal, smash, wedge};
use resonance_core::HomotopyType;

fn random_type(rng: &mut ChaCha8Rng) -> HomotopyType {
    let n = rng.random_range(0..4);
    HomotopyType::from_dims((0..n).map(|_| rng.random_range(0..6)).collect())
}

#[test]
fn ten_thousand_random_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let zero = HomotopyType::Zero;
    let s0 = HomotopyType::sphere(0);
    for _ in 0..10_000 {
        let (a, b, c) = (random_type(&mut rng), random_type(&mut rng), random_type(&mut rng));
        assert_eq!(wedge(&a, &b), wedge(&b, &a));
        assert_eq!(smash(&a, &b), smash(&b, &a));
        assert_eq!(wedge(&wedge(&a, &b), &c), wedge(&a, &wedge(&b, &c)));
        assert_eq!(smash(&smash(&a, &b), &c), smash(&a, &smash(&b, &c)));
        assert_eq!(smash(&a, &wedge(&b, &c)), wedge(&smash(&a, &b), &smash(&a, &c)));
        assert_eq!(wedge(&a, &zero), a);
        assert_eq!(smash(&a, &s0), a);
        assert_eq!(smash(&a, &zero), zero);
    }
}

fn arb_type() -> impl Strategy<Value = HomotopyType> {
    prop::collection::vec(0u32..8, 0..5).prop_map(HomotopyType::from_dims)
}

proptest! {
    #[test]
    fn normalization_is_canonical(mut dims in prop::collection::vec(0u32..8, 0..6)) {
        let h = HomotopyType::from_dims(dims.clone());
        dims.reverse();
        prop_assert_eq!(HomotopyType::from_dims(dims), h.clone());
        let text = h.to_string();
        prop_assert_eq!(text.parse::<HomotopyType>().unwrap(), h);
    }

    #[test]
    fn equal_is_an_equivalence(a in arb_type(), b in arb_type(), c in arb_type()) {
        prop_assert!(equal(&a, &a));
        prop_assert_eq!(equal(&a, &b), equal(&b, &a));
        if equal(&a, &b) && equal(&b, &c) {
            prop_assert!(equal(&a, &c));
        }
        prop_assert_eq!(equal(&a, &b), a == b);
    }

    #[test]
    fn spheres_smash_by_adding(p in 0u32..50, q in 0u32..50) {
        prop_assert_eq!(smash(&HomotopyType::sphere(p), &HomotopyType::sphere(q)), HomotopyType::sphere(p + q));
    }
}
