//! Deterministic constant-product market maker engine and liquidity-provider
//! analytics.
//!
//! * [`pool`]: reserves, spread-capped swaps, share accounting, fee custody.
//! * [`analytics`]: closed-form impermanent loss and portfolio evolution.
//! * [`compounding`]: mixed compounding / non-compounding population ROI.
//! * [`scenario`]: scripted replays with an idealized arbitrageur.
//! * [`exact_oracle`]: exact-rational reference swaps for property tests.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytics;
pub mod compounding;
#[cfg(feature = "rational")]
pub mod exact_oracle;
pub mod ode;
pub mod pool;
pub mod root;
pub mod scalar;
pub mod scenario;

pub use pool::{
    reserves_from_rate_liquidity, reserves_from_value, Direction, FeeModel, LpPosition, PoolError, PoolState,
    ProviderId, SideLedger, Spread, SwapQuote, SwapReceipt,
};
pub use scalar::Scalar;

/// Arbitrary-precision rational used by the exact backend.
#[cfg(feature = "rational")]
pub type Rational = num_rational::BigRational;
