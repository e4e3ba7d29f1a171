mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use resonance_core::nonlinearity::builtin::*;
use resonance_core::orbit::drift_slope;
use resonance_core::semiflow::{homotopy_field, IntegratorConfig, Scheme, Semiflow};
use resonance_core::spectral::{project, shifted_semigroup_apply, Part};
use resonance_core::SpectralState;

fn cfg(step_h: f64, t_end: f64) -> IntegratorConfig {
    IntegratorConfig {
        step_h,
        t_end,
        save_stride: 1,
        ..Default::default()
    }
}

fn state(n: usize, scale: f64) -> impl Strategy<Value = SpectralState> {
    prop::collection::vec(-scale..scale, n).prop_map(SpectralState)
}

#[test]
fn drift_law_on_constant_kernel_source() {
    let s = common::heat(32, 2);
    let f = const_kernel(2, PI);
    let flow = Semiflow::new(&f, &s.es, &s.d, &s.grid, 4.0).unwrap();
    let traj = flow.integrate(&s.es.zero_state(), &cfg(1e-3, 20.0)).unwrap();
    let slope = drift_slope(&traj, 1, 0.0, 20.0);
    assert!((slope - 1.0).abs() <= 1e-6, "{slope}");
}

#[test]
fn kernel_modes_are_fixed_under_the_linear_flow() {
    let s = common::heat(8, 2);
    let f = zero();
    let flow = Semiflow::new(&f, &s.es, &s.d, &s.grid, 4.0).unwrap();
    let u0 = s.es.mode_state(1).scaled(3.5);
    for scheme in [Scheme::Etd1, Scheme::Etd2] {
        let traj = flow.integrate(&u0, &IntegratorConfig { scheme, ..cfg(0.1, 10.0) }).unwrap();
        assert!(traj.states.iter().all(|u| *u == u0));
    }
}

#[test]
fn linear_part_is_integrated_exactly() {
    let s = common::heat(8, 2);
    let f = zero();
    let flow = Semiflow::new(&f, &s.es, &s.d, &s.grid, 4.0).unwrap();
    let u0 = SpectralState(vec![0.1, 1.0, 2.0, -1.0, 0.5, 0.0, 0.3, -0.2]);
    let traj = flow.integrate(&u0, &cfg(0.05, 1.0)).unwrap();
    let exact = shifted_semigroup_apply(&u0, 1.0, 4.0, &s.es).unwrap();
    assert!(traj.last_state().max_abs_diff(&exact) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discrete_semigroup(u0 in state(12, 3.0), n_steps in 1usize..60) {
        let s = common::heat(12, 2);
        let f = arctan_minus_gauss(1.0, 2.5);
        let flow = Semiflow::new(&f, &s.es, &s.d, &s.grid, 4.0).unwrap();
        let h = 1e-2;
        let t = n_steps as f64 * h;
        let whole = flow.integrate(&u0, &cfg(h, 2.0 * t)).unwrap();
        let half = flow.integrate(&u0, &cfg(h, t)).unwrap();
        let twice = flow.integrate(half.last_state(), &cfg(h, t)).unwrap();
        prop_assert!(whole.last_state().max_abs_diff(twice.last_state()) <= 10.0 * h * h * h);
    }

    #[test]
    fn homotopy_field_is_bounded(u in state(12, 50.0), sh in 0.0f64..=1.0) {
        let s = common::heat(12, 2);
        for f in [arctan(1.0), strong_res(-4.0), arctan_minus_gauss(1.0, 2.5)] {
            let g = homotopy_field(&f, &s.d, sh, &u, &s.es, &s.grid).unwrap();
            prop_assert!(g.norm() <= f.bound_m * PI.sqrt() * (1.0 + 1e-9));
            let p = project(&g, &s.d, Part::P).unwrap();
            let q = project(&g, &s.d, Part::Q).unwrap();
            if sh == 0.0 {
                prop_assert_eq!(q.norm(), 0.0);
            }
            prop_assert!(p.norm() <= f.bound_m * PI.sqrt() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn product_structure_at_s_zero(c in -3.0f64..3.0, q in state(8, 1.0)) {
        let s = common::heat(8, 2);
        let f = arctan_minus_gauss(1.0, 2.5);
        let flow = Semiflow::new(&f, &s.es, &s.d, &s.grid, 4.0).unwrap().with_homotopy(0.0).unwrap();
        let x0 = s.es.mode_state(1).scaled(c);
        let y0 = project(&q, &s.d, Part::Q).unwrap();
        let u0 = &x0 + &y0;
        let t_end = 0.5;
        let full = flow.integrate(&u0, &cfg(5e-5, t_end)).unwrap();
        let kernel = flow.integrate_kernel_flow(&x0, &cfg(1e-3, t_end)).unwrap();
        let linear = shifted_semigroup_apply(&y0, t_end, 4.0, &s.es).unwrap();
        let expected = kernel.last_state() + &linear;
        prop_assert!(full.last_state().max_abs_diff(&expected) < 1e-9,
            "{}", full.last_state().max_abs_diff(&expected));
    }
}
