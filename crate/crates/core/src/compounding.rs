//! Return on investment when part of the providers recompound their fees.
//!
//! The pool generates fees at the constant rate `alpha * L0` (linear growth).
//! Compounders own liquidity `L_c`, non-compounders a fixed `L_nc`, and fees
//! are shared pro rata to liquidity:
//!
//! ```text
//! dL_c/dt  = alpha L0 L_c  / (L_c + L_nc)
//! df_nc/dt = alpha L0 L_nc / (L_c + L_nc)
//! ```
//!
//! Both equations are integrated so that fee conservation
//! `(L_c(t) - L_c(0)) + f_nc(t) = alpha L0 t` is an independent check on the
//! integrator rather than a definition.

use alloc::vec::Vec;

use crate::ode;
use crate::root::{self, RootError};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Relative tolerance of the implicit-equation solve.
pub const IMPLICIT_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("integration step must be strictly positive")]
    InvalidStep,
    #[error("compounding fraction must lie in {0}")]
    InvalidFraction(&'static str),
    #[error("initial liquidity must be strictly positive")]
    InvalidLiquidity,
    #[error("growth rate and horizon must be non-negative")]
    InvalidGrowth,
    #[error("implicit solve failed: {0}")]
    NoConvergence(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiParams {
    /// `L0`, total pool liquidity at `t = 0`.
    pub l_total0: f64,
    /// `L_c(0) / L0`.
    pub frac_compounding: f64,
    /// Yearly liquidity growth from fees.
    pub alpha: f64,
    /// Years to simulate.
    pub horizon: f64,
    /// Integration step in years.
    pub step: f64,
}

impl RoiParams {
    /// `L0 = 1` and the default step.
    pub fn new(frac_compounding: f64, alpha: f64, horizon: f64) -> Result<Self, SimError> {
        RoiParams {
            l_total0: 1.0,
            frac_compounding,
            alpha,
            horizon,
            step: DEFAULT_STEP,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, SimError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(SimError::InvalidStep);
        }
        if !(0.0..=1.0).contains(&self.frac_compounding) {
            return Err(SimError::InvalidFraction("[0, 1]"));
        }
        if !(self.l_total0 > 0.0 && self.l_total0.is_finite()) {
            return Err(SimError::InvalidLiquidity);
        }
        let non_negative = |v: f64| v >= 0.0 && v.is_finite();
        if !non_negative(self.alpha) || !non_negative(self.horizon) {
            return Err(SimError::InvalidGrowth);
        }
        Ok(self)
    }

    pub fn l_c0(&self) -> f64 {
        self.frac_compounding * self.l_total0
    }

    /// Constant liquidity of the non-compounders.
    pub fn l_nc(&self) -> f64 {
        (1.0 - self.frac_compounding) * self.l_total0
    }

    /// Fees generated by the whole pool up to `t`.
    pub fn total_fees(&self, t: f64) -> f64 {
        self.alpha * self.l_total0 * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiSample {
    pub t: f64,
    pub l_c: f64,
    /// `L_c(t) / L_c(0)`.
    pub rho_c: f64,
    /// `1 + f_nc(t) / L_nc`.
    pub rho_nc: f64,
    /// Fees accrued by the non-compounders.
    pub fees_nc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoiTrajectory {
    pub samples: Vec<RoiSample>,
}

impl RoiTrajectory {
    pub fn last(&self) -> &RoiSample {
        // A trajectory always holds the t = 0 sample.
        self.samples.last().expect("trajectory has at least one sample")
    }
}

/// Integrates the population dynamics with fixed-step RK4 and records every
/// step.
///
/// With `frac_compounding` equal to 0 or 1 one population is empty and the
/// analytic solution is used. The empty population's ROI is then reported as
/// its limit for an infinitesimal stake: `exp(alpha t)` for a lone compounder
/// among non-compounders, `1 + ln(1 + alpha t)` for a lone non-compounder
/// among compounders.
pub fn integrate_lc(params: &RoiParams) -> Result<RoiTrajectory, SimError> {
    let p = params.validated()?;
    let rate = p.alpha * p.l_total0;
    let (l_c0, l_nc) = (p.l_c0(), p.l_nc());
    let mut samples = Vec::new();

    if p.frac_compounding == 1.0 || p.frac_compounding == 0.0 {
        for t in ode::time_grid(p.horizon, p.step) {
            let g = p.alpha * t;
            samples.push(if p.frac_compounding == 1.0 {
                RoiSample {
                    t,
                    l_c: l_c0 + rate * t,
                    rho_c: 1.0 + g,
                    rho_nc: 1.0 + libm::log1p(g),
                    fees_nc: 0.0,
                }
            } else {
                RoiSample {
                    t,
                    l_c: 0.0,
                    rho_c: libm::exp(g),
                    rho_nc: 1.0 + g,
                    fees_nc: rate * t,
                }
            });
        }
        return Ok(RoiTrajectory { samples });
    }

    let rhs = |_t: f64, y: &[f64; 2]| {
        let total = y[0] + l_nc;
        [rate * y[0] / total, rate * l_nc / total]
    };
    ode::integrate(rhs, [l_c0, 0.0], p.horizon, p.step, |t, y| {
        samples.push(RoiSample {
            t,
            l_c: y[0],
            rho_c: y[0] / l_c0,
            rho_nc: 1.0 + y[1] / l_nc,
            fees_nc: y[1],
        });
    });
    Ok(RoiTrajectory { samples })
}

/// Solves `L - L_c(0) + L_nc ln(L / L_c(0)) = alpha L0 t` for `L = L_c(t)`.
///
/// This is the separated-variables integral of the compounder equation. The
/// left side is strictly increasing in `L`, and the root lies in
/// `[L_c(0), L_c(0) + alpha L0 t]`.
pub fn lc_implicit_solve(params: &RoiParams, t: f64) -> Result<f64, SimError> {
    let p = params.validated()?;
    if p.frac_compounding <= 0.0 {
        return Err(SimError::InvalidFraction("(0, 1]"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(SimError::InvalidGrowth);
    }
    let (l_c0, l_nc) = (p.l_c0(), p.l_nc());
    let fees = p.total_fees(t);
    if fees == 0.0 {
        return Ok(l_c0);
    }
    if l_nc == 0.0 {
        return Ok(l_c0 + fees);
    }
    let g = |l: f64| (l - l_c0) + l_nc * libm::log(l / l_c0) - fees;
    let dg = |l: f64| 1.0 + l_nc / l;
    Ok(root::newton_bisect(
        g,
        dg,
        l_c0,
        l_c0 + fees,
        IMPLICIT_RTOL,
        root::DEFAULT_MAX_ITER,
    )?)
}

/// `(rho_c(t), rho_nc(t))` from an RK4 run up to `t`.
pub fn roi_pair(params: &RoiParams, t: f64) -> Result<(f64, f64), SimError> {
    let run = RoiParams { horizon: t, ..*params };
    let trajectory = integrate_lc(&run)?;
    let last = trajectory.last();
    Ok((last.rho_c, last.rho_nc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn all_compounding_grows_linearly() {
        let p = RoiParams {
            l_total0: 3.0,
            ..RoiParams::new(1.0, 0.2, 1.0).unwrap()
        };
        let s = *integrate_lc(&p).unwrap().last();
        assert!(rel(s.l_c, 3.6) < 1e-15);
        assert!(rel(s.rho_c, 1.2) < 1e-15);
        assert!(rel(lc_implicit_solve(&p, 1.0).unwrap(), 3.6) < 1e-15);
    }

    #[test]
    fn no_compounding_goes_to_side_ledger() {
        let p = RoiParams::new(0.0, 0.2, 1.0).unwrap();
        let (rho_c, rho_nc) = roi_pair(&p, 1.0).unwrap();
        assert!(rel(rho_nc, 1.2) < 1e-15);
        assert!(rel(rho_c, libm::exp(0.2)) < 1e-15);
        assert_eq!(lc_implicit_solve(&p, 1.0), Err(SimError::InvalidFraction("(0, 1]")));
    }

    #[test]
    fn ninety_nine_percent_compounding() {
        let p = RoiParams::new(0.99, 0.2, 1.0).unwrap();
        let (rho_c, rho_nc) = roi_pair(&p, 1.0).unwrap();
        assert!(((rho_c - 1.0) * 100.0 - 20.02).abs() < 0.01);
        assert!(((rho_nc - 1.0) * 100.0 - 18.20).abs() < 0.05);
        let implicit = lc_implicit_solve(&p, 1.0).unwrap();
        // Bisection oracle with an independently coded residual.
        let oracle = root::bisect(|l| l - 0.99 + 0.01 * libm::log(l / 0.99) - 0.2, 0.5, 2.0, 1e-15, 500).unwrap();
        assert!(rel(implicit, oracle) < 1e-13);
        assert!((implicit - 1.18817).abs() < 1e-5);
        assert!(rel(rho_c * 0.99, implicit) < 1e-8);
    }

    #[test]
    fn zero_time_and_zero_growth() {
        let p = RoiParams::new(0.7, 0.2, 1.0).unwrap();
        assert_eq!(lc_implicit_solve(&p, 0.0).unwrap(), 0.7);
        let idle = RoiParams::new(0.4, 0.0, 3.0).unwrap();
        assert_eq!(roi_pair(&idle, 3.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn half_split_orders_roi() {
        let p = RoiParams::new(0.5, 0.2, 1.0).unwrap();
        let s = *integrate_lc(&p).unwrap().last();
        assert!(s.rho_c > 1.2 && 1.2 > s.rho_nc);
        // compounder gains plus non-compounder fees account for every fee
        let gained = (s.rho_c - 1.0) * 0.5 + (s.rho_nc - 1.0) * 0.5;
        assert!(rel(gained, 0.2) < 1e-12);
    }

    #[test]
    fn trajectory_shape() {
        let p = RoiParams {
            step: 0.01,
            ..RoiParams::new(0.3, 0.5, 2.0).unwrap()
        };
        let tr = integrate_lc(&p).unwrap();
        assert_eq!(tr.samples.len(), 201);
        assert_eq!(tr.samples[0].rho_c, 1.0);
        assert_eq!(tr.samples[0].rho_nc, 1.0);
        for w in tr.samples.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].l_c >= w[0].l_c);
            assert!(w[1].fees_nc >= w[0].fees_nc);
        }
    }

    #[test]
    fn rejects_invalid_params() {
        let base = RoiParams::new(0.5, 0.2, 1.0).unwrap();
        assert_eq!(
            integrate_lc(&RoiParams { step: 0.0, ..base }),
            Err(SimError::InvalidStep)
        );
        assert_eq!(
            integrate_lc(&RoiParams {
                frac_compounding: 1.5,
                ..base
            }),
            Err(SimError::InvalidFraction("[0, 1]"))
        );
        assert_eq!(
            integrate_lc(&RoiParams { alpha: -1.0, ..base }),
            Err(SimError::InvalidGrowth)
        );
        assert_eq!(
            integrate_lc(&RoiParams { l_total0: 0.0, ..base }),
            Err(SimError::InvalidLiquidity)
        );
    }
}
