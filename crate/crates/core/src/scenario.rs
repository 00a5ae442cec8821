//! Scripted replays: trades, market moves answered by an idealized
//! arbitrageur, fee collection and portfolio snapshots.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analytics::ARBITRAGE_TOLERANCE;
use crate::pool::{Direction, FeeModel, PoolError, PoolState, ProviderId, SideLedger, Spread};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("initial pool: {0}")]
    Setup(PoolError),
    #[error("initial prices must be strictly positive")]
    NonPositivePrice,
    #[error("initial pool rate does not match the market rate")]
    ArbitrageViolation,
    #[error("event {index}: {reason}")]
    InvalidEvent { index: usize, reason: &'static str },
    #[error("event {index}: {source}")]
    Event { index: usize, source: PoolError },
    #[error("measurement window must have positive length")]
    EmptyWindow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolSetup<N> {
    pub x0: N,
    pub y0: N,
    pub fee_rate: N,
    pub fee_model: FeeModel,
    pub provider: ProviderId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event<N> {
    Trade {
        direction: Direction,
        amount: N,
        spread: Spread<N>,
    },
    /// Market prices move by the given factors; the arbitrageur then trades
    /// the pool back to the market rate.
    PriceMove {
        delta_x: N,
        delta_y: N,
    },
    CollectFees {
        provider: ProviderId,
    },
    Snapshot {
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedEvent<N> {
    /// Years since the start of the scenario.
    pub t: f64,
    pub event: Event<N>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioScript<N> {
    pub pool: PoolSetup<N>,
    pub price_x0: N,
    pub price_y0: N,
    /// Applied in list order; timestamps must be non-decreasing.
    pub events: Vec<TimedEvent<N>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSnapshot<N> {
    pub label: String,
    pub t: f64,
    pub reserve_x: N,
    pub reserve_y: N,
    pub liquidity: N,
    pub side_ledger: SideLedger<N>,
    pub fees_generated: SideLedger<N>,
    pub fees_collected: SideLedger<N>,
    pub price_x: N,
    pub price_y: N,
    /// Reserves valued at current market prices.
    pub value_pooled: N,
    /// Initial reserves valued at current market prices.
    pub value_held: N,
    /// `value_pooled / value_held - 1`.
    pub lambda_realized: N,
}

/// Replay state. Exposed so callers can step through a script.
#[derive(Debug, Clone)]
pub struct Replay<N> {
    pool: PoolState<N>,
    initial: (N, N),
    price_x: N,
    price_y: N,
    t: f64,
}

impl<N: Scalar> Replay<N> {
    pub fn new(script: &ScenarioScript<N>) -> Result<Self, ScenarioError> {
        let setup = &script.pool;
        let pool = PoolState::create(
            setup.x0.clone(),
            setup.y0.clone(),
            setup.fee_rate.clone(),
            setup.fee_model,
            setup.provider.clone(),
        )
        .map_err(ScenarioError::Setup)?;
        if !script.price_x0.is_positive() || !script.price_y0.is_positive() {
            return Err(ScenarioError::NonPositivePrice);
        }
        let market = script.price_y0.clone() / script.price_x0.clone();
        if !pool.rate().approx_eq_rel(&market, ARBITRAGE_TOLERANCE) {
            return Err(ScenarioError::ArbitrageViolation);
        }
        Ok(Replay {
            pool,
            initial: (setup.x0.clone(), setup.y0.clone()),
            price_x: script.price_x0.clone(),
            price_y: script.price_y0.clone(),
            t: 0.0,
        })
    }

    pub fn pool(&self) -> &PoolState<N> {
        &self.pool
    }

    pub fn prices(&self) -> (&N, &N) {
        (&self.price_x, &self.price_y)
    }

    pub fn market_rate(&self) -> N {
        self.price_y.clone() / self.price_x.clone()
    }

    /// Applies one event. Returns the snapshot for [`Event::Snapshot`].
    pub fn apply(
        &mut self,
        index: usize,
        timed: &TimedEvent<N>,
    ) -> Result<Option<PortfolioSnapshot<N>>, ScenarioError> {
        let invalid = |reason| ScenarioError::InvalidEvent { index, reason };
        if !(timed.t >= self.t && timed.t.is_finite()) {
            return Err(invalid("timestamps must be finite and non-decreasing"));
        }
        self.t = timed.t;
        let on_pool = |source| ScenarioError::Event { index, source };
        match &timed.event {
            Event::Trade {
                direction,
                amount,
                spread,
            } => {
                if !amount.is_positive() {
                    return Err(invalid("trade amount must be positive"));
                }
                self.pool.execute_swap(*direction, amount, spread).map_err(on_pool)?;
            }
            Event::PriceMove { delta_x, delta_y } => {
                if !delta_x.is_positive() || !delta_y.is_positive() {
                    return Err(invalid("price deltas must be positive"));
                }
                self.price_x = self.price_x.clone() * delta_x.clone();
                self.price_y = self.price_y.clone() * delta_y.clone();
                let target = self.market_rate();
                self.pool.arbitrage_to_rate(&target).map_err(on_pool)?;
            }
            Event::CollectFees { provider } => {
                self.pool.collect_fees(provider).map_err(on_pool)?;
            }
            Event::Snapshot { label } => return Ok(Some(self.snapshot(label.clone()))),
        }
        Ok(None)
    }

    pub fn snapshot(&self, label: String) -> PortfolioSnapshot<N> {
        let value_pooled =
            self.price_x.clone() * self.pool.reserve_x().clone() + self.price_y.clone() * self.pool.reserve_y().clone();
        let value_held = self.price_x.clone() * self.initial.0.clone() + self.price_y.clone() * self.initial.1.clone();
        PortfolioSnapshot {
            label,
            t: self.t,
            reserve_x: self.pool.reserve_x().clone(),
            reserve_y: self.pool.reserve_y().clone(),
            liquidity: self.pool.liquidity(),
            side_ledger: self.pool.side_ledger().clone(),
            fees_generated: self.pool.fees_generated().clone(),
            fees_collected: self.pool.fees_collected().clone(),
            price_x: self.price_x.clone(),
            price_y: self.price_y.clone(),
            lambda_realized: value_pooled.clone() / value_held.clone() - N::one(),
            value_pooled,
            value_held,
        }
    }
}

/// Replays `script`, returning an `initial` snapshot, one per
/// [`Event::Snapshot`], and a `final` snapshot if events follow the last
/// explicit one.
pub fn run_scenario<N: Scalar>(script: &ScenarioScript<N>) -> Result<Vec<PortfolioSnapshot<N>>, ScenarioError> {
    let mut replay = Replay::new(script)?;
    let mut snapshots = alloc::vec![replay.snapshot("initial".into())];
    let mut dirty = false;
    for (index, timed) in script.events.iter().enumerate() {
        match replay.apply(index, timed)? {
            Some(snap) => {
                snapshots.push(snap);
                dirty = false;
            }
            None => dirty = true,
        }
    }
    if dirty {
        snapshots.push(replay.snapshot("final".into()));
    }
    Ok(snapshots)
}

/// Aggregate fee yield over `[start, end]` years, as yearly liquidity growth.
///
/// The window opens after every event stamped before `start` and closes after
/// every event stamped at or before `end`.
///
/// * AutoCompound: `(L(end) - L(start)) / (L(start) * (end - start))`.
/// * CollectSeparately: the fees charged in the window, valued at market
///   prices and converted to liquidity units through
///   `L = V / (2 sqrt(p_x p_y))`, over the same denominator.
pub fn measure_effective_alpha<N: Scalar>(
    script: &ScenarioScript<N>,
    start: f64,
    end: f64,
) -> Result<f64, ScenarioError> {
    if start.is_nan() || end.is_nan() || end <= start {
        return Err(ScenarioError::EmptyWindow);
    }
    let mut replay = Replay::new(script)?;
    let mut opening: Option<(N, SideLedger<N>)> = None;
    for (index, timed) in script.events.iter().enumerate() {
        if timed.t > end {
            break;
        }
        if opening.is_none() && timed.t >= start {
            opening = Some((replay.pool().liquidity(), replay.pool().fees_generated().clone()));
        }
        replay.apply(index, timed)?;
    }
    let (l_start, fees_start) =
        opening.unwrap_or_else(|| (replay.pool().liquidity(), replay.pool().fees_generated().clone()));
    let span = end - start;
    let growth = match replay.pool().fee_model() {
        FeeModel::AutoCompound => (replay.pool().liquidity() - l_start.clone()).to_f64(),
        FeeModel::CollectSeparately => {
            let fees = replay.pool().fees_generated();
            let fx = (fees.fees_x.clone() - fees_start.fees_x).to_f64();
            let fy = (fees.fees_y.clone() - fees_start.fees_y).to_f64();
            let (px, py) = (replay.price_x.to_f64(), replay.price_y.to_f64());
            (px * fx + py * fy) / (2.0 * libm::sqrt(px * py))
        }
    };
    Ok(growth / (l_start.to_f64() * span))
}
