//! Exact-rational reference implementation of fee-free, uncapped swaps.
//!
//! Kept deliberately separate from [`crate::pool`]: it evaluates the swap
//! equation in its textbook form `m = out * n / (in + n)` and updates the
//! output reserve by subtraction, so agreement with the engine is a real
//! cross-check rather than the same arithmetic run twice.

use num_traits::Zero;

use crate::pool::Direction;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPool {
    pub reserve_x: Rational,
    pub reserve_y: Rational,
}

impl RationalPool {
    pub fn new(reserve_x: Rational, reserve_y: Rational) -> Self {
        RationalPool { reserve_x, reserve_y }
    }

    pub fn product(&self) -> Rational {
        &self.reserve_x * &self.reserve_y
    }

    /// Swaps `amount` input tokens with no spread cap and no fee.
    pub fn oracle_swap(&self, direction: Direction, amount: &Rational) -> (RationalPool, Rational) {
        let (input, output) = match direction {
            Direction::YforX => (&self.reserve_y, &self.reserve_x),
            Direction::XforY => (&self.reserve_x, &self.reserve_y),
        };
        let out = output * amount / (input + amount);
        let new_input = input + amount;
        let new_output = output - &out;
        let next = match direction {
            Direction::YforX => RationalPool::new(new_output, new_input),
            Direction::XforY => RationalPool::new(new_input, new_output),
        };
        (next, out)
    }

    /// Total output of executing `parts` one after another.
    pub fn oracle_split_sum(&self, direction: Direction, parts: &[Rational]) -> Rational {
        let mut pool = self.clone();
        let mut total = Rational::zero();
        for part in parts {
            let (next, out) = pool.oracle_swap(direction, part);
            total += out;
            pool = next;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(n: i64) -> Rational {
        q(n, 1)
    }

    #[test]
    fn swap_examples() {
        let pool = RationalPool::new(int(100), int(100));
        let (next, m) = pool.oracle_swap(Direction::YforX, &int(100));
        assert_eq!(m, int(50));
        assert_eq!(next.product(), pool.product());

        let pool = RationalPool::new(int(3), int(7));
        let (next, m) = pool.oracle_swap(Direction::YforX, &int(2));
        assert_eq!(m, q(2, 3));
        assert_eq!(next.product(), int(21));
    }

    #[test]
    fn tiny_trade_executes_at_spot() {
        let pool = RationalPool::new(int(100), int(100));
        let n = q(1, 1_000_000_000);
        let (_, m) = pool.oracle_swap(Direction::XforY, &n);
        let rate = m / n;
        assert!(int(1) - rate < q(1, 100_000_000));
    }

    #[test]
    fn split_examples() {
        let pool = RationalPool::new(int(100), int(100));
        assert_eq!(pool.oracle_split_sum(Direction::YforX, &[int(50), int(50)]), int(50));
        let pool = RationalPool::new(int(3), int(7));
        assert_eq!(pool.oracle_split_sum(Direction::YforX, &[int(1), int(1)]), q(2, 3));
        let n = q(17, 5);
        assert_eq!(
            pool.oracle_split_sum(Direction::XforY, core::slice::from_ref(&n)),
            pool.oracle_swap(Direction::XforY, &n).1
        );
    }
}
