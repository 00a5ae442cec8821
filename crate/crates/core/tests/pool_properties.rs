use cpamm_core::exact_oracle::RationalPool;
use cpamm_core::{reserves_from_rate_liquidity, Direction, FeeModel, PoolState, ProviderId, Rational, Scalar, Spread};
use num_bigint::BigInt;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn lp() -> ProviderId {
    ProviderId::from("lp")
}

fn float_pool(x: f64, y: f64) -> PoolState<f64> {
    PoolState::create(x, y, 0.0, FeeModel::AutoCompound, lp()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::YforX), Just(Direction::XforY)]
}

fn reserve() -> impl Strategy<Value = f64> {
    (-3.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (1i64..=1_000_000, 1i64..=1_000_000).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #[test]
    fn float_swap_preserves_product(x in reserve(), y in reserve(), frac in -6.0f64..2.0, dir in direction()) {
        let mut pool = float_pool(x, y);
        let input = match dir { Direction::YforX => y, Direction::XforY => x };
        let before = x * y;
        pool.execute_swap(dir, &(input * 10f64.powf(frac)), &Spread::Unbounded).unwrap();
        prop_assert!(rel(pool.reserve_x() * pool.reserve_y(), before) <= 1e-12);
    }

    #[test]
    fn rational_swap_preserves_product(x in small_rational(), y in small_rational(), n in small_rational(), dir in direction()) {
        let mut pool = PoolState::create(x.clone(), y.clone(), q(0, 1), FeeModel::AutoCompound, lp()).unwrap();
        pool.execute_swap(dir, &n, &Spread::Unbounded).unwrap();
        prop_assert_eq!(pool.reserve_x() * pool.reserve_y(), &x * &y);
    }

    #[test]
    fn rate_update_law(x in reserve(), y in reserve(), frac in -4.0f64..1.0) {
        let mut pool = float_pool(x, y);
        let r = pool.rate();
        pool.execute_swap(Direction::YforX, &(y * 10f64.powf(frac)), &Spread::Unbounded).unwrap();
        let expected = r * (y / pool.reserve_y()).powi(2);
        prop_assert!(rel(pool.rate(), expected) <= 1e-12);
    }

    #[test]
    fn rate_update_law_exact(x in small_rational(), y in small_rational(), n in small_rational()) {
        let mut pool = PoolState::create(x, y.clone(), q(0, 1), FeeModel::CollectSeparately, lp()).unwrap();
        let r = pool.rate();
        pool.execute_swap(Direction::XforY, &n, &Spread::Unbounded).unwrap();
        // X-for-Y mirror: r' = r (x'/x)^2 = r (y/y')^2 as well.
        let ratio = &y / pool.reserve_y();
        prop_assert_eq!(pool.rate(), r * &ratio * &ratio);
    }

    #[test]
    fn splitting_matches_oracle(
        x in small_rational(),
        y in small_rational(),
        parts in prop::collection::vec((1i64..=1000, 1i64..=100), 1..20),
        dir in direction(),
    ) {
        let parts: Vec<Rational> = parts.into_iter().map(|(n, d)| q(n, d)).collect();
        let total: Rational = parts.iter().cloned().sum();
        let oracle = RationalPool::new(x.clone(), y.clone());
        let single = oracle.oracle_swap(dir, &total).1;
        prop_assert_eq!(&oracle.oracle_split_sum(dir, &parts), &single);

        let mut pool = PoolState::create(x, y, q(0, 1), FeeModel::AutoCompound, lp()).unwrap();
        let mut engine_sum = q(0, 1);
        for part in &parts {
            engine_sum += pool.execute_swap(dir, part, &Spread::Unbounded).unwrap().amount_out;
        }
        prop_assert_eq!(engine_sum, single);
    }

    #[test]
    fn float_engine_agrees_with_oracle(x in small_rational(), y in small_rational(), n in small_rational(), dir in direction()) {
        let oracle = RationalPool::new(x.clone(), y.clone()).oracle_swap(dir, &n);
        let mut pool = float_pool(x.to_f64(), y.to_f64());
        let m = pool.execute_swap(dir, &n.to_f64(), &Spread::Unbounded).unwrap().amount_out;
        prop_assert!(rel(m, oracle.1.to_f64()) <= 1e-12);
        prop_assert!(rel(*pool.reserve_x(), oracle.0.reserve_x.to_f64()) <= 1e-12);
        prop_assert!(rel(*pool.reserve_y(), oracle.0.reserve_y.to_f64()) <= 1e-12);
    }

    #[test]
    fn spread_cap_is_exact(x in reserve(), y in reserve(), sigma in 0.001f64..0.999, dir in direction()) {
        let sigma = match dir { Direction::YforX => sigma, Direction::XforY => sigma * 10.0 };
        let mut pool = float_pool(x, y);
        let r = pool.rate();
        let cap = pool.max_input_for_spread(dir, &sigma).unwrap();
        pool.execute_swap(dir, &cap, &Spread::Max(sigma)).unwrap();
        let measured = ((pool.rate() - r) / r).abs();
        prop_assert!(rel(measured, sigma) <= 1e-9);
    }

    #[test]
    fn realized_rate_law(x in reserve(), y in reserve(), frac in -6.0f64..2.0) {
        let pool = float_pool(x, y);
        let n = y * 10f64.powf(frac);
        let quote = pool.quote(Direction::YforX, &n, &Spread::Unbounded).unwrap();
        prop_assert!(rel(quote.realized_rate, x / (y + n)) <= 1e-12);
        prop_assert!(rel(quote.realized_rate, quote.amount_out / quote.capped_in) <= 1e-12);
        prop_assert!(quote.amount_out < x);
    }

    #[test]
    fn quote_and_execute_agree(
        x in reserve(), y in reserve(), frac in -4.0f64..1.0, fee in 0.0f64..0.05,
        sigma in prop::option::of(0.0f64..0.9), dir in direction(), separate in any::<bool>(),
    ) {
        let model = if separate { FeeModel::CollectSeparately } else { FeeModel::AutoCompound };
        let mut pool = PoolState::create(x, y, fee, model, lp()).unwrap();
        let spread = sigma.map_or(Spread::Unbounded, Spread::Max);
        let n = x.min(y) * 10f64.powf(frac);
        let quote = pool.quote(dir, &n, &spread).unwrap();
        let receipt = pool.execute_swap(dir, &n, &spread).unwrap();
        prop_assert_eq!(&quote, &receipt);
        prop_assert!(receipt.capped_in <= receipt.requested_in);
        match model {
            FeeModel::AutoCompound => prop_assert!(pool.reserve_x() * pool.reserve_y() >= x * y * (1.0 - 1e-12)),
            FeeModel::CollectSeparately => prop_assert!(rel(pool.reserve_x() * pool.reserve_y(), x * y) <= 1e-12),
        }
    }

    #[test]
    fn output_is_concave_in_input(x in reserve(), y in reserve(), a in -4.0f64..1.0, b in -4.0f64..1.0) {
        let pool = float_pool(x, y);
        let (n1, n2) = (y * 10f64.powf(a), y * 10f64.powf(b));
        let out = |n: f64| pool.quote(Direction::YforX, &n, &Spread::Unbounded).unwrap().amount_out;
        prop_assert!(out(n1 + n2) > out(n1.max(n2)));
        prop_assert!(out(n1) + out(n2) >= out(n1 + n2) * (1.0 - 1e-14));
    }

    #[test]
    fn reconstruction_round_trip(x in reserve(), y in reserve()) {
        let pool = float_pool(x, y);
        let (rx, ry) = reserves_from_rate_liquidity(&pool.rate(), &pool.liquidity()).unwrap();
        prop_assert!(rel(rx, x) <= 1e-12);
        prop_assert!(rel(ry, y) <= 1e-12);
    }

    #[test]
    fn shares_track_ledger(deposits in prop::collection::vec((1i64..1000, 0usize..4), 1..10), burn in 1i64..100) {
        // Exact backend: the share ledger sums to total_shares exactly.
        let mut pool = PoolState::create(q(400, 1), q(100, 1), q(3, 1000), FeeModel::CollectSeparately, lp()).unwrap();
        let names = ["a", "b", "c", "d"];
        for (amount, who) in &deposits {
            let dx = q(*amount, 1);
            let dy = &dx / pool.rate();
            pool.add_liquidity(names[*who].into(), dx, dy).unwrap();
            pool.execute_swap(Direction::YforX, &q(*amount, 7), &Spread::Unbounded).unwrap();
        }
        let shares = pool.position(&lp()).unwrap().shares;
        pool.remove_liquidity(&lp(), shares * q(burn, 100)).unwrap();
        let sum: Rational = pool.positions().map(|p| p.shares.clone()).sum();
        prop_assert_eq!(&sum, pool.total_shares());
    }
}

#[test]
fn splitting_into_hundred_parts_is_exact() {
    let pool = RationalPool::new(q(123_457, 10), q(987_654, 321));
    let parts: Vec<Rational> = (1..=100).map(|i| q(i, 3)).collect();
    let total: Rational = parts.iter().cloned().sum();
    assert_eq!(
        pool.oracle_split_sum(Direction::YforX, &parts),
        pool.oracle_swap(Direction::YforX, &total).1
    );
}
