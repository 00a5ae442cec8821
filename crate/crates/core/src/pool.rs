//! Constant-product pool: state, quoting, spread-capped swaps, liquidity
//! provision and the two fee-custody models.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use crate::scalar::Scalar;

/// Relative tolerance on the deposit ratio in [`PoolState::add_liquidity`].
pub const DEPOSIT_RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoolError {
    #[error("reserves must be strictly positive")]
    NonPositiveReserve,
    #[error("fee rate must lie in [0, 1)")]
    InvalidFee,
    #[error("exchange rate must be strictly positive")]
    InvalidRate,
    #[error("inputs must be strictly positive")]
    NonPositiveInput,
    #[error("trade amount must be strictly positive")]
    NonPositiveAmount,
    #[error("prices must be strictly positive")]
    NonPositivePrice,
    #[error("spread is outside the valid domain for this direction")]
    SpreadOutOfRange,
    #[error("deposit ratio does not match the pool rate")]
    RateMismatch,
    #[error("provider does not own enough shares")]
    InsufficientShares,
    #[error("unknown liquidity provider `{0}`")]
    UnknownProvider(String),
    #[error("pool is empty; create a new pool")]
    EmptyPool,
    #[error("trade would drain the output reserve")]
    PoolDrained,
}

/// Trade direction, named by what the trader sends and receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Send Y, receive X. Lowers the pool rate `x / y`.
    YforX,
    /// Send X, receive Y. Raises the pool rate.
    XforY,
}

/// Maximum relative rate movement a trader accepts.
#[derive(Debug, Clone, PartialEq)]
pub enum Spread<N> {
    /// No cap. Stands in for the `sigma -> 1` limit on Y-for-X trades.
    Unbounded,
    Max(N),
}

/// Where trading fees go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeeModel {
    /// Fees are added to the reserves and grow every provider's position.
    AutoCompound,
    /// Fees accrue in a side ledger outside the reserves.
    CollectSeparately,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideLedger<N> {
    pub fees_x: N,
    pub fees_y: N,
}

impl<N: Scalar> SideLedger<N> {
    fn zero() -> Self {
        SideLedger {
            fees_x: N::zero(),
            fees_y: N::zero(),
        }
    }

    fn credit(&mut self, direction: Direction, amount: N) {
        match direction {
            Direction::YforX => self.fees_y = self.fees_y.clone() + amount,
            Direction::XforY => self.fees_x = self.fees_x.clone() + amount,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProviderId(String);

impl ProviderId {
    pub fn new(id: impl Into<String>) -> Self {
        ProviderId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ProviderId {
    fn from(id: &str) -> Self {
        ProviderId::new(id)
    }
}

impl fmt::Display for ProviderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A provider's stake in the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct LpPosition<N> {
    pub provider: ProviderId,
    pub shares: N,
    pub deposited_x: N,
    pub deposited_y: N,
    /// Side-ledger fees settled to this position but not yet collected.
    pub owed_x: N,
    pub owed_y: N,
    growth_checkpoint_x: N,
    growth_checkpoint_y: N,
}

impl<N: Scalar> LpPosition<N> {
    fn empty(provider: ProviderId, growth: &(N, N)) -> Self {
        LpPosition {
            provider,
            shares: N::zero(),
            deposited_x: N::zero(),
            deposited_y: N::zero(),
            owed_x: N::zero(),
            owed_y: N::zero(),
            growth_checkpoint_x: growth.0.clone(),
            growth_checkpoint_y: growth.1.clone(),
        }
    }

    fn settle(&mut self, growth: &(N, N)) {
        let gx = growth.0.clone() - self.growth_checkpoint_x.clone();
        let gy = growth.1.clone() - self.growth_checkpoint_y.clone();
        self.owed_x = self.owed_x.clone() + self.shares.clone() * gx;
        self.owed_y = self.owed_y.clone() + self.shares.clone() * gy;
        self.growth_checkpoint_x = growth.0.clone();
        self.growth_checkpoint_y = growth.1.clone();
    }
}

/// Result of pricing a trade. Quantities are in the input token unless noted.
///
/// `capped_in` is the gross amount taken from the trader (fee included);
/// `net_in = capped_in - fee_paid` is what enters the constant-product curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapQuote<N> {
    pub direction: Direction,
    pub requested_in: N,
    pub capped_in: N,
    pub net_in: N,
    /// Output token.
    pub amount_out: N,
    /// `amount_out / capped_in`; the marginal rate when nothing is traded.
    pub realized_rate: N,
    /// Relative pool-rate movement caused by `net_in`.
    pub spread_applied: N,
    pub fee_paid: N,
}

/// An executed swap is described by the quote it was executed at.
pub type SwapReceipt<N> = SwapQuote<N>;

/// Constant-product pool over tokens X and Y.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolState<N> {
    reserve_x: N,
    reserve_y: N,
    positions: BTreeMap<ProviderId, LpPosition<N>>,
    total_shares: N,
    fee_rate: N,
    fee_model: FeeModel,
    side_ledger: SideLedger<N>,
    /// Cumulative side-ledger fees per share, (x, y).
    fee_growth: (N, N),
    fees_generated: SideLedger<N>,
    fees_collected: SideLedger<N>,
}

impl<N: Scalar> PoolState<N> {
    /// Opens a pool. The first provider receives `sqrt(x0 * y0)` shares.
    pub fn create(x0: N, y0: N, fee_rate: N, fee_model: FeeModel, provider: ProviderId) -> Result<Self, PoolError> {
        if !x0.is_positive() || !y0.is_positive() {
            return Err(PoolError::NonPositiveReserve);
        }
        if fee_rate < N::zero() || fee_rate >= N::one() {
            return Err(PoolError::InvalidFee);
        }
        let shares = (x0.clone() * y0.clone()).sqrt();
        let growth = (N::zero(), N::zero());
        let mut position = LpPosition::empty(provider.clone(), &growth);
        position.shares = shares.clone();
        position.deposited_x = x0.clone();
        position.deposited_y = y0.clone();
        let mut positions = BTreeMap::new();
        positions.insert(provider, position);
        Ok(PoolState {
            reserve_x: x0,
            reserve_y: y0,
            positions,
            total_shares: shares,
            fee_rate,
            fee_model,
            side_ledger: SideLedger::zero(),
            fee_growth: growth,
            fees_generated: SideLedger::zero(),
            fees_collected: SideLedger::zero(),
        })
    }

    pub fn reserve_x(&self) -> &N {
        &self.reserve_x
    }

    pub fn reserve_y(&self) -> &N {
        &self.reserve_y
    }

    pub fn total_shares(&self) -> &N {
        &self.total_shares
    }

    pub fn fee_rate(&self) -> &N {
        &self.fee_rate
    }

    pub fn fee_model(&self) -> FeeModel {
        self.fee_model
    }

    /// Uncollected fees held outside the reserves. Always zero under
    /// [`FeeModel::AutoCompound`].
    pub fn side_ledger(&self) -> &SideLedger<N> {
        &self.side_ledger
    }

    /// Every fee ever charged, regardless of custody.
    pub fn fees_generated(&self) -> &SideLedger<N> {
        &self.fees_generated
    }

    /// Side-ledger fees paid out to providers.
    pub fn fees_collected(&self) -> &SideLedger<N> {
        &self.fees_collected
    }

    pub fn position(&self, provider: &ProviderId) -> Option<LpPosition<N>> {
        self.positions.get(provider).map(|p| {
            let mut p = p.clone();
            p.settle(&self.fee_growth);
            p
        })
    }

    pub fn positions(&self) -> impl Iterator<Item = &LpPosition<N>> {
        self.positions.values()
    }

    /// `true` once every share has been withdrawn. An empty pool is terminal.
    pub fn is_empty(&self) -> bool {
        self.reserve_x.is_zero() && self.reserve_y.is_zero()
    }

    fn ensure_active(&self) -> Result<(), PoolError> {
        if self.is_empty() {
            Err(PoolError::EmptyPool)
        } else {
            Ok(())
        }
    }

    /// `L = sqrt(x * y)`.
    pub fn liquidity(&self) -> N {
        (self.reserve_x.clone() * self.reserve_y.clone()).sqrt()
    }

    /// Pool exchange rate `r = x / y`: units of X per unit of Y.
    pub fn rate(&self) -> N {
        self.reserve_x.clone() / self.reserve_y.clone()
    }

    /// `V = p_x * x + p_y * y`.
    pub fn value(&self, price_x: &N, price_y: &N) -> Result<N, PoolError> {
        if !price_x.is_positive() || !price_y.is_positive() {
            return Err(PoolError::NonPositivePrice);
        }
        Ok(price_x.clone() * self.reserve_x.clone() + price_y.clone() * self.reserve_y.clone())
    }

    fn reserves_for(&self, direction: Direction) -> (&N, &N) {
        match direction {
            Direction::YforX => (&self.reserve_y, &self.reserve_x),
            Direction::XforY => (&self.reserve_x, &self.reserve_y),
        }
    }

    /// Largest net input that moves the pool rate by exactly `sigma`.
    ///
    /// Y-for-X: `y * (1 / sqrt(1 - sigma) - 1)` for `sigma` in `[0, 1)`.
    /// X-for-Y: `x * (sqrt(1 + sigma) - 1)` for `sigma >= 0`.
    pub fn max_input_for_spread(&self, direction: Direction, sigma: &N) -> Result<N, PoolError> {
        self.ensure_active()?;
        validate_sigma(direction, sigma)?;
        Ok(match direction {
            Direction::YforX => {
                let root = (N::one() - sigma.clone()).sqrt();
                self.reserve_y.clone() * (N::one() / root - N::one())
            }
            Direction::XforY => {
                let root = (N::one() + sigma.clone()).sqrt();
                self.reserve_x.clone() * (root - N::one())
            }
        })
    }

    /// Prices a trade of `amount` input tokens without touching the pool.
    pub fn quote(&self, direction: Direction, amount: &N, spread: &Spread<N>) -> Result<SwapQuote<N>, PoolError> {
        self.quote_with_fee(direction, amount, spread, &self.fee_rate)
    }

    fn quote_with_fee(
        &self,
        direction: Direction,
        amount: &N,
        spread: &Spread<N>,
        fee_rate: &N,
    ) -> Result<SwapQuote<N>, PoolError> {
        self.ensure_active()?;
        if !amount.is_positive() {
            return Err(PoolError::NonPositiveAmount);
        }
        let cap = match spread {
            Spread::Unbounded => None,
            Spread::Max(sigma) => Some(self.max_input_for_spread(direction, sigma)?),
        };

        let (charged, net, fee) = if fee_rate.is_zero() {
            match cap {
                Some(q) if *amount > q => (q.clone(), q, N::zero()),
                _ => (amount.clone(), amount.clone(), N::zero()),
            }
        } else {
            let full_fee = fee_rate.clone() * amount.clone();
            let full_net = amount.clone() - full_fee.clone();
            match cap {
                Some(q) if full_net > q => {
                    let charged = q.clone() / (N::one() - fee_rate.clone());
                    let fee = charged.clone() - q.clone();
                    (charged, q, fee)
                }
                _ => (amount.clone(), full_net, full_fee),
            }
        };

        let (reserve_in, reserve_out) = self.reserves_for(direction);
        if net.is_zero() {
            let marginal = reserve_out.clone() / reserve_in.clone() * (N::one() - fee_rate.clone());
            return Ok(SwapQuote {
                direction,
                requested_in: amount.clone(),
                capped_in: charged,
                net_in: net,
                amount_out: N::zero(),
                realized_rate: marginal,
                spread_applied: N::zero(),
                fee_paid: fee,
            });
        }

        let grown_in = reserve_in.clone() + net.clone();
        let amount_out = reserve_out.clone() * net.clone() / grown_in.clone();
        // Only rounding can push the output to the whole reserve.
        if !N::is_exact() && amount_out >= *reserve_out {
            return Err(PoolError::PoolDrained);
        }
        let spread_applied = match direction {
            Direction::YforX => {
                let ratio = reserve_in.clone() / grown_in;
                N::one() - ratio.clone() * ratio
            }
            Direction::XforY => {
                let ratio = grown_in / reserve_in.clone();
                ratio.clone() * ratio - N::one()
            }
        };
        Ok(SwapQuote {
            direction,
            requested_in: amount.clone(),
            realized_rate: amount_out.clone() / charged.clone(),
            capped_in: charged,
            net_in: net,
            amount_out,
            spread_applied,
            fee_paid: fee,
        })
    }

    /// Executes a trade and returns the quote it settled at.
    ///
    /// The constant-product step uses the net input. The fee then either joins
    /// the input reserve or the side ledger, depending on the fee model.
    pub fn execute_swap(
        &mut self,
        direction: Direction,
        amount: &N,
        spread: &Spread<N>,
    ) -> Result<SwapReceipt<N>, PoolError> {
        let fee_rate = self.fee_rate.clone();
        let receipt = self.quote_with_fee(direction, amount, spread, &fee_rate)?;
        self.settle_swap(&receipt);
        Ok(receipt)
    }

    fn settle_swap(&mut self, receipt: &SwapQuote<N>) {
        if receipt.net_in.is_zero() && receipt.fee_paid.is_zero() {
            return;
        }
        let (reserve_in, reserve_out) = match receipt.direction {
            Direction::YforX => (&mut self.reserve_y, &mut self.reserve_x),
            Direction::XforY => (&mut self.reserve_x, &mut self.reserve_y),
        };
        if !receipt.net_in.is_zero() {
            let grown_in = reserve_in.clone() + receipt.net_in.clone();
            *reserve_out = if N::is_exact() {
                reserve_out.clone() - receipt.amount_out.clone()
            } else {
                // Keeps the float product within a few ulps for large trades.
                reserve_out.clone() * reserve_in.clone() / grown_in.clone()
            };
            *reserve_in = grown_in;
        }
        if receipt.fee_paid.is_zero() {
            return;
        }
        let fee = receipt.fee_paid.clone();
        self.fees_generated.credit(receipt.direction, fee.clone());
        match self.fee_model {
            FeeModel::AutoCompound => *reserve_in = reserve_in.clone() + fee,
            FeeModel::CollectSeparately => {
                let per_share = fee.clone() / self.total_shares.clone();
                match receipt.direction {
                    Direction::YforX => self.fee_growth.1 = self.fee_growth.1.clone() + per_share,
                    Direction::XforY => self.fee_growth.0 = self.fee_growth.0.clone() + per_share,
                }
                self.side_ledger.credit(receipt.direction, fee);
            }
        }
    }

    /// Fee-exempt trade that moves the pool rate to `target_rate`, as an
    /// idealized arbitrageur would. The input size follows from
    /// `x' = L * sqrt(r')`, `y' = L / sqrt(r')`. Returns `None` when the pool
    /// already sits at the target.
    pub fn arbitrage_to_rate(&mut self, target_rate: &N) -> Result<Option<SwapReceipt<N>>, PoolError> {
        self.ensure_active()?;
        if !target_rate.is_positive() {
            return Err(PoolError::InvalidRate);
        }
        let current = self.rate();
        if current == *target_rate {
            return Ok(None);
        }
        let (x_target, y_target) = reserves_from_rate_liquidity(target_rate, &self.liquidity())?;
        let (direction, amount) = if *target_rate < current {
            (Direction::YforX, y_target - self.reserve_y.clone())
        } else {
            (Direction::XforY, x_target - self.reserve_x.clone())
        };
        if !amount.is_positive() {
            // Target indistinguishable from the current rate at this precision.
            return Ok(None);
        }
        let receipt = self.quote_with_fee(direction, &amount, &Spread::Unbounded, &N::zero())?;
        self.settle_swap(&receipt);
        Ok(Some(receipt))
    }

    /// Deposits `dx` and `dy` in the current pool ratio. Mints
    /// `total_shares * dx / x` shares.
    pub fn add_liquidity(&mut self, provider: ProviderId, dx: N, dy: N) -> Result<LpPosition<N>, PoolError> {
        self.ensure_active()?;
        if !dx.is_positive() || !dy.is_positive() {
            return Err(PoolError::NonPositiveInput);
        }
        let deposit_rate = dx.clone() / dy.clone();
        if !deposit_rate.approx_eq_rel(&self.rate(), DEPOSIT_RATIO_TOLERANCE) {
            return Err(PoolError::RateMismatch);
        }
        let minted = self.total_shares.clone() * dx.clone() / self.reserve_x.clone();
        let growth = self.fee_growth.clone();
        let position = self
            .positions
            .entry(provider.clone())
            .or_insert_with(|| LpPosition::empty(provider, &growth));
        position.settle(&growth);
        position.shares = position.shares.clone() + minted.clone();
        position.deposited_x = position.deposited_x.clone() + dx.clone();
        position.deposited_y = position.deposited_y.clone() + dy.clone();
        let snapshot = position.clone();
        self.total_shares = self.total_shares.clone() + minted;
        self.reserve_x = self.reserve_x.clone() + dx;
        self.reserve_y = self.reserve_y.clone() + dy;
        Ok(snapshot)
    }

    /// Burns `shares` and pays out the proportional slice of both reserves.
    /// Withdrawing the last share empties the pool.
    pub fn remove_liquidity(&mut self, provider: &ProviderId, shares: N) -> Result<(N, N), PoolError> {
        self.ensure_active()?;
        if !shares.is_positive() {
            return Err(PoolError::NonPositiveAmount);
        }
        let growth = self.fee_growth.clone();
        let position = self
            .positions
            .get_mut(provider)
            .ok_or_else(|| PoolError::UnknownProvider(String::from(provider.as_str())))?;
        if position.shares < shares {
            return Err(PoolError::InsufficientShares);
        }
        position.settle(&growth);
        position.shares = position.shares.clone() - shares.clone();
        let drop_entry = position.shares.is_zero() && position.owed_x.is_zero() && position.owed_y.is_zero();
        if drop_entry {
            self.positions.remove(provider);
        }

        let (dx, dy) = if shares == self.total_shares {
            (self.reserve_x.clone(), self.reserve_y.clone())
        } else {
            let fraction = shares.clone() / self.total_shares.clone();
            (
                self.reserve_x.clone() * fraction.clone(),
                self.reserve_y.clone() * fraction,
            )
        };
        self.total_shares = self.total_shares.clone() - shares;
        self.reserve_x = self.reserve_x.clone() - dx.clone();
        self.reserve_y = self.reserve_y.clone() - dy.clone();
        if self.total_shares.is_zero() {
            self.reserve_x = N::zero();
            self.reserve_y = N::zero();
        }
        Ok((dx, dy))
    }

    /// Pays a provider its share of the side ledger. Always `(0, 0)` under
    /// [`FeeModel::AutoCompound`].
    pub fn collect_fees(&mut self, provider: &ProviderId) -> Result<(N, N), PoolError> {
        let growth = self.fee_growth.clone();
        let position = self
            .positions
            .get_mut(provider)
            .ok_or_else(|| PoolError::UnknownProvider(String::from(provider.as_str())))?;
        position.settle(&growth);
        let paid = (
            core::mem::replace(&mut position.owed_x, N::zero()),
            core::mem::replace(&mut position.owed_y, N::zero()),
        );
        if position.shares.is_zero() {
            self.positions.remove(provider);
        }
        self.side_ledger.fees_x = self.side_ledger.fees_x.clone() - paid.0.clone();
        self.side_ledger.fees_y = self.side_ledger.fees_y.clone() - paid.1.clone();
        self.fees_collected.fees_x = self.fees_collected.fees_x.clone() + paid.0.clone();
        self.fees_collected.fees_y = self.fees_collected.fees_y.clone() + paid.1.clone();
        Ok(paid)
    }
}

fn validate_sigma<N: Scalar>(direction: Direction, sigma: &N) -> Result<(), PoolError> {
    let ok = match direction {
        Direction::YforX => *sigma >= N::zero() && *sigma < N::one(),
        Direction::XforY => *sigma >= N::zero() && sigma.to_f64().is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(PoolError::SpreadOutOfRange)
    }
}

/// Reserves for a given rate and liquidity: `x = L * sqrt(r)`, `y = L / sqrt(r)`.
pub fn reserves_from_rate_liquidity<N: Scalar>(rate: &N, liquidity: &N) -> Result<(N, N), PoolError> {
    if !rate.is_positive() {
        return Err(PoolError::InvalidRate);
    }
    if *liquidity < N::zero() {
        return Err(PoolError::NonPositiveInput);
    }
    let root = rate.sqrt();
    Ok((liquidity.clone() * root.clone(), liquidity.clone() / root))
}

/// Reserves and liquidity of a pool worth `value` at market prices, assuming
/// the pool rate equals the market rate: `x = V / 2p_x`, `y = V / 2p_y`,
/// `L = V / (2 sqrt(p_x p_y))`.
pub fn reserves_from_value<N: Scalar>(value: &N, price_x: &N, price_y: &N) -> Result<(N, N, N), PoolError> {
    if !value.is_positive() || !price_x.is_positive() || !price_y.is_positive() {
        return Err(PoolError::NonPositiveInput);
    }
    let half = value.clone() / N::two();
    let x = half.clone() / price_x.clone();
    let y = half.clone() / price_y.clone();
    let liquidity = half / (price_x.clone() * price_y.clone()).sqrt();
    Ok((x, y, liquidity))
}
