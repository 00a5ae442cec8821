//! Closed-form liquidity-provider analytics.
//!
//! Everything here is a pure function of relative price changes
//! `delta = p' / p` and, for fee accrual, a linear liquidity growth rate.
//! Portfolio values are expressed relative to an initial value of 1.

use crate::pool::{PoolError, PoolState};
use crate::scalar::Scalar;

/// Tolerance on the arbitrage condition `x / y = p_y / p_x`.
pub const ARBITRAGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("relative price changes must be strictly positive")]
    NonPositiveDelta,
    #[error("prices must be strictly positive")]
    NonPositivePrice,
    #[error("growth rate and elapsed time must be non-negative")]
    NegativeGrowth,
    #[error("pool rate does not match the market rate")]
    ArbitrageViolation,
    #[error(transparent)]
    Pool(#[from] PoolError),
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

/// Market prices before a move and the relative change of each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceScenario {
    pub price_x0: f64,
    pub price_y0: f64,
    pub delta_x: f64,
    pub delta_y: f64,
}

impl PriceScenario {
    pub fn new(price_x0: f64, price_y0: f64, delta_x: f64, delta_y: f64) -> Result<Self, AnalyticsError> {
        if !positive(price_x0) || !positive(price_y0) {
            return Err(AnalyticsError::NonPositivePrice);
        }
        if !positive(delta_x) || !positive(delta_y) {
            return Err(AnalyticsError::NonPositiveDelta);
        }
        Ok(PriceScenario {
            price_x0,
            price_y0,
            delta_x,
            delta_y,
        })
    }

    /// Unit initial prices.
    pub fn from_deltas(delta_x: f64, delta_y: f64) -> Result<Self, AnalyticsError> {
        Self::new(1.0, 1.0, delta_x, delta_y)
    }

    /// Only Y moves, by `delta`.
    pub fn one_coin(delta: f64) -> Result<Self, AnalyticsError> {
        Self::from_deltas(1.0, delta)
    }

    pub fn price_x1(&self) -> f64 {
        self.delta_x * self.price_x0
    }

    pub fn price_y1(&self) -> f64 {
        self.delta_y * self.price_y0
    }

    fn validate(&self) -> Result<(), AnalyticsError> {
        Self::new(self.price_x0, self.price_y0, self.delta_x, self.delta_y).map(|_| ())
    }
}

/// Pooled versus held portfolio after a price move, relative to the initial
/// portfolio value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlReport {
    pub v_pooled: f64,
    pub v_held: f64,
    /// `(v_pooled - v_held) / v_held`, in `(-1, 0]`.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    /// Liquidity growth from fees, as a fraction per year.
    pub alpha: f64,
    /// Years elapsed.
    pub t: f64,
}

impl GrowthParams {
    pub fn new(alpha: f64, t: f64) -> Result<Self, AnalyticsError> {
        if !(alpha >= 0.0 && t >= 0.0 && alpha.is_finite() && t.is_finite()) {
            return Err(AnalyticsError::NegativeGrowth);
        }
        Ok(GrowthParams { alpha, t })
    }

    fn growth(&self) -> Result<f64, AnalyticsError> {
        Self::new(self.alpha, self.t).map(|g| g.alpha * g.t)
    }
}

/// Impermanent loss `2 sqrt(dx dy) / (dx + dy) - 1`.
///
/// Evaluated as `-(sqrt(dx) - sqrt(dy))^2 / (dx + dy)`, which is the same
/// quantity but is never positive in floating point and is exactly zero when
/// `dx == dy`.
///
/// The two portfolio values are derived separately: the held bundle from
/// `x p_x (dx + dy)` and the pooled bundle from the post-arbitrage reserves
/// `x' = sqrt(dy / dx) x`, `y' = x y / x'`.
pub fn impermanent_loss(scenario: &PriceScenario) -> Result<IlReport, AnalyticsError> {
    scenario.validate()?;
    let (dx, dy) = (scenario.delta_x, scenario.delta_y);
    let gap = libm::sqrt(dx) - libm::sqrt(dy);
    let lambda = 0.0 - gap * gap / (dx + dy);

    // Unit initial value split evenly between the two tokens.
    let x = 0.5 / scenario.price_x0;
    let y = 0.5 / scenario.price_y0;
    let v_held = x * scenario.price_x0 * (dx + dy);
    let x1 = libm::sqrt(dy / dx) * x;
    let y1 = x * y / x1;
    let v_pooled = x1 * scenario.price_x1() + y1 * scenario.price_y1();
    Ok(IlReport {
        v_pooled,
        v_held,
        lambda,
    })
}

/// Impermanent loss measured mechanically: an arbitrage trade moves a copy of
/// `pool` to the new market rate, then both portfolios are valued at the new
/// prices. `pool` must sit at the initial market rate.
pub fn il_brute_force(scenario: &PriceScenario, pool: &PoolState<f64>) -> Result<IlReport, AnalyticsError> {
    scenario.validate()?;
    let market_rate = scenario.price_y0 / scenario.price_x0;
    if !pool.rate().approx_eq_rel(&market_rate, ARBITRAGE_TOLERANCE) {
        return Err(AnalyticsError::ArbitrageViolation);
    }
    let (x, y) = (*pool.reserve_x(), *pool.reserve_y());
    let initial = x * scenario.price_x0 + y * scenario.price_y0;
    let (px1, py1) = (scenario.price_x1(), scenario.price_y1());

    let mut moved = pool.clone();
    if scenario.delta_x != scenario.delta_y {
        moved.arbitrage_to_rate(&(py1 / px1))?;
    }
    let v_held = (x * px1 + y * py1) / initial;
    let v_pooled = (moved.reserve_x() * px1 + moved.reserve_y() * py1) / initial;
    Ok(IlReport {
        v_pooled,
        v_held,
        lambda: (v_pooled - v_held) / v_held,
    })
}

/// Portfolio value relative to its start when fees are reinvested into the
/// pool: `sqrt(dx dy) (1 + alpha t)`.
pub fn relative_evolution_compounded(scenario: &PriceScenario, growth: &GrowthParams) -> Result<f64, AnalyticsError> {
    scenario.validate()?;
    let g = growth.growth()?;
    Ok(libm::sqrt(scenario.delta_x * scenario.delta_y) * (1.0 + g))
}

/// Portfolio value relative to its start when fees are kept outside the pool:
/// `sqrt(dx dy) + alpha t (dx + dy) / 2`.
pub fn relative_evolution_collected(scenario: &PriceScenario, growth: &GrowthParams) -> Result<f64, AnalyticsError> {
    scenario.validate()?;
    let g = growth.growth()?;
    let (dx, dy) = (scenario.delta_x, scenario.delta_y);
    Ok(libm::sqrt(dx * dy) + g * (dx + dy) / 2.0)
}

/// Value of simply holding the initial bundle: `(dx + dy) / 2`.
pub fn hold_value_relative(scenario: &PriceScenario) -> Result<f64, AnalyticsError> {
    scenario.validate()?;
    Ok((scenario.delta_x + scenario.delta_y) / 2.0)
}
