//! Plot data for the liquidity-provider figures, one CSV table per figure.
//!
//! Price-change axes are in percent: a change of `c` percent is the relative
//! move `delta = 1 + c / 100` of token Y while X stays put. Every other column
//! is also in percent.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use cpamm_core::analytics::{
    hold_value_relative, impermanent_loss, relative_evolution_collected, relative_evolution_compounded, AnalyticsError,
    GrowthParams, PriceScenario,
};
use cpamm_core::compounding::{roi_pair, RoiParams, SimError, DEFAULT_STEP};

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error("grid needs at least 2 samples")]
    TooFewSamples,
    #[error("grid bounds must be finite with min < max")]
    BadBounds,
    #[error("grid leaves the figure's domain: {0}")]
    Domain(&'static str),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv output failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    IlOneCoin,
    PortfolioOneCoin,
    FeeModelComparison,
    RoiComparison,
    CorrectedFeeModelComparison,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::IlOneCoin,
        FigureId::PortfolioOneCoin,
        FigureId::FeeModelComparison,
        FigureId::RoiComparison,
        FigureId::CorrectedFeeModelComparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::IlOneCoin => "il_one_coin",
            FigureId::PortfolioOneCoin => "portfolio_one_coin",
            FigureId::FeeModelComparison => "fee_model_comparison",
            FigureId::RoiComparison => "roi_comparison",
            FigureId::CorrectedFeeModelComparison => "corrected_fee_model_comparison",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            FigureId::IlOneCoin => &["price_change_pct", "impermanent_loss_pct"],
            FigureId::PortfolioOneCoin => &["price_change_pct", "providing_liquidity", "not_investing"],
            FigureId::FeeModelComparison => &["price_change_pct", "not_investing", "uniswap_v2", "beaker"],
            FigureId::RoiComparison => &["t_years", "compounding", "not_compounding"],
            FigureId::CorrectedFeeModelComparison => {
                &["price_change_pct", "not_investing", "compounding", "not_compounding"]
            }
        }
    }

    pub fn default_grid(self) -> Grid {
        let (min, max, samples) = match self {
            FigureId::IlOneCoin => (0.0, 300.0, 301),
            FigureId::PortfolioOneCoin => (-99.0, 200.0, 300),
            FigureId::FeeModelComparison => (-99.0, 300.0, 400),
            FigureId::RoiComparison => (0.0, 1.0, 101),
            FigureId::CorrectedFeeModelComparison => (-99.0, 150.0, 250),
        };
        Grid { min, max, samples }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.replace('-', "_");
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == normalized)
            .ok_or_else(|| {
                let names: Vec<_> = FigureId::ALL.iter().map(|id| id.name()).collect();
                format!("unknown figure `{s}`; expected one of {}", names.join(", "))
            })
    }
}

/// Evenly spaced sample points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Grid {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.max - self.min;
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(move |i| {
            if i + 1 == self.samples {
                self.max
            } else {
                self.min + span * (i as f64) / last
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureParams {
    /// Yearly liquidity growth.
    pub alpha: f64,
    /// Years elapsed, for the price-change figures.
    pub t: f64,
    pub frac_compounding: f64,
    pub step: f64,
    /// One-year ROI of compounders, in percent, for the corrected comparison.
    pub compounding_roi_pct: f64,
    /// One-year ROI of non-compounders, in percent.
    pub not_compounding_roi_pct: f64,
}

impl Default for FigureParams {
    fn default() -> Self {
        FigureParams {
            alpha: 0.2,
            t: 1.0,
            frac_compounding: 0.99,
            step: DEFAULT_STEP,
            compounding_roi_pct: 20.02,
            not_compounding_roi_pct: 18.2,
        }
    }
}

impl FigureParams {
    /// Replaces the two ROI figures with simulated values for
    /// `frac_compounding`, `alpha` and `t`.
    pub fn with_simulated_roi(self) -> Result<Self, FigureError> {
        let roi = self.roi_params(self.t)?;
        let (rho_c, rho_nc) = roi_pair(&roi, self.t)?;
        Ok(FigureParams {
            compounding_roi_pct: (rho_c - 1.0) * 100.0,
            not_compounding_roi_pct: (rho_nc - 1.0) * 100.0,
            ..self
        })
    }

    fn roi_params(&self, horizon: f64) -> Result<RoiParams, SimError> {
        RoiParams {
            step: self.step,
            ..RoiParams::new(self.frac_compounding, self.alpha, horizon)?
        }
        .validated()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub figure: FigureId,
    pub grid: Grid,
    pub params: FigureParams,
}

impl FigureSpec {
    pub fn new(figure: FigureId) -> Self {
        FigureSpec {
            figure,
            grid: figure.default_grid(),
            params: FigureParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), FigureError> {
        let g = &self.grid;
        if g.samples < 2 {
            return Err(FigureError::TooFewSamples);
        }
        if !(g.min.is_finite() && g.max.is_finite() && g.min < g.max) {
            return Err(FigureError::BadBounds);
        }
        match self.figure {
            FigureId::RoiComparison if g.min < 0.0 => Err(FigureError::Domain("time must be non-negative")),
            FigureId::RoiComparison => Ok(()),
            _ if g.min <= -100.0 => Err(FigureError::Domain("price change must exceed -100%")),
            _ => Ok(()),
        }
    }
}

/// A figure's data, rows in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Header line, then one line per row. Floats use the shortest
    /// representation that round-trips, so output is reproducible.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FigureError> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|v| v.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn one_coin(pct: f64) -> Result<PriceScenario, AnalyticsError> {
    PriceScenario::one_coin(1.0 + pct / 100.0)
}

pub fn emit_figure(spec: &FigureSpec) -> Result<Table, FigureError> {
    spec.validate()?;
    let p = &spec.params;
    let mut rows = Vec::with_capacity(spec.grid.samples);
    for x in spec.grid.points() {
        let row = match spec.figure {
            FigureId::IlOneCoin => {
                let il = impermanent_loss(&one_coin(x)?)?;
                vec![x, il.lambda * 100.0]
            }
            FigureId::PortfolioOneCoin => {
                let s = one_coin(x)?;
                let pooled = relative_evolution_compounded(&s, &GrowthParams::new(0.0, 0.0)?)?;
                vec![x, pooled * 100.0, hold_value_relative(&s)? * 100.0]
            }
            FigureId::FeeModelComparison => {
                let s = one_coin(x)?;
                let g = GrowthParams::new(p.alpha, p.t)?;
                vec![
                    x,
                    hold_value_relative(&s)? * 100.0,
                    relative_evolution_compounded(&s, &g)? * 100.0,
                    relative_evolution_collected(&s, &g)? * 100.0,
                ]
            }
            FigureId::RoiComparison => {
                let (rho_c, rho_nc) = roi_pair(&p.roi_params(x)?, x)?;
                vec![x, (rho_c - 1.0) * 100.0, (rho_nc - 1.0) * 100.0]
            }
            FigureId::CorrectedFeeModelComparison => {
                // One year of growth at the realized ROI of each population.
                let s = one_coin(x)?;
                let compounding = GrowthParams::new(p.compounding_roi_pct / 100.0, 1.0)?;
                let collecting = GrowthParams::new(p.not_compounding_roi_pct / 100.0, 1.0)?;
                vec![
                    x,
                    hold_value_relative(&s)? * 100.0,
                    relative_evolution_compounded(&s, &compounding)? * 100.0,
                    relative_evolution_collected(&s, &collecting)? * 100.0,
                ]
            }
        };
        rows.push(row);
    }
    Ok(Table {
        columns: spec.figure.columns().to_vec(),
        rows,
    })
}
