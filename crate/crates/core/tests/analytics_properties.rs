use cpamm_core::analytics::{
    hold_value_relative, il_brute_force, impermanent_loss, relative_evolution_collected, relative_evolution_compounded,
    GrowthParams, PriceScenario,
};
use cpamm_core::{FeeModel, PoolState, ProviderId};
use proptest::prelude::*;

fn delta() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

fn lambda(dx: f64, dy: f64) -> f64 {
    impermanent_loss(&PriceScenario::from_deltas(dx, dy).unwrap())
        .unwrap()
        .lambda
}

proptest! {
    #[test]
    fn loss_is_non_positive_and_symmetric(dx in delta(), dy in delta()) {
        let l = lambda(dx, dy);
        prop_assert!(l <= 0.0);
        prop_assert!(l > -1.0);
        prop_assert_eq!(l, lambda(dy, dx));
    }

    #[test]
    fn no_loss_on_equal_moves(d in delta()) {
        prop_assert_eq!(lambda(d, d), 0.0);
    }

    #[test]
    fn loss_is_scale_invariant(dx in delta(), dy in delta(), c in delta()) {
        prop_assert!((lambda(c * dx, c * dy) - lambda(dx, dy)).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_matches_arbitrage_replay(
        dx in delta(), dy in delta(), px in delta(), py in delta(), liquidity in 1.0f64..1e6,
    ) {
        let scenario = PriceScenario::new(px, py, dx, dy).unwrap();
        let x = liquidity * (py / px).sqrt();
        let y = liquidity / (py / px).sqrt();
        let pool = PoolState::create(x, y, 0.003, FeeModel::CollectSeparately, ProviderId::from("lp")).unwrap();
        let closed = impermanent_loss(&scenario).unwrap();
        let replay = il_brute_force(&scenario, &pool).unwrap();
        prop_assert!(((1.0 + closed.lambda) - (1.0 + replay.lambda)).abs() <= 1e-9 * (1.0 + closed.lambda));
        prop_assert!((closed.v_held - replay.v_held).abs() <= 1e-12 * closed.v_held);
    }

    #[test]
    fn collecting_dominates_compounding(dx in delta(), dy in delta(), alpha in 0.0f64..2.0, t in 0.0f64..10.0) {
        let s = PriceScenario::from_deltas(dx, dy).unwrap();
        let g = GrowthParams::new(alpha, t).unwrap();
        let compounded = relative_evolution_compounded(&s, &g).unwrap();
        let collected = relative_evolution_collected(&s, &g).unwrap();
        prop_assert!(collected >= compounded * (1.0 - 1e-15));
        // The gap is alpha t (sqrt(dx) - sqrt(dy))^2 / 2.
        let gap = alpha * t * (dx.sqrt() - dy.sqrt()).powi(2) / 2.0;
        prop_assert!((collected - compounded - gap).abs() <= 1e-12 * collected.max(1.0));
    }

    #[test]
    fn evolution_without_growth_is_pooled_value(dx in delta(), dy in delta()) {
        let s = PriceScenario::from_deltas(dx, dy).unwrap();
        let idle = GrowthParams::new(0.0, 1.0).unwrap();
        let il = impermanent_loss(&s).unwrap();
        let hold = hold_value_relative(&s).unwrap();
        let pooled = relative_evolution_compounded(&s, &idle).unwrap();
        prop_assert!((pooled - (1.0 + il.lambda) * hold).abs() <= 1e-12 * pooled.max(1.0));
        prop_assert!((pooled - (dx * dy).sqrt()).abs() <= 1e-15 * pooled.max(1.0));
    }
}
