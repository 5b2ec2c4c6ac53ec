//! Distributed panel updating versus joint inference on grids.
//!
//! Each panel holds a density over its own parameter block and updates it
//! on its own statistics. [`compose_product`] combines the block posteriors
//! as if they were independent; [`joint_oracle`] performs grid Bayes over
//! all blocks at once. When the likelihood splits into per-block factors the
//! two agree, which [`separability_check_symbolic`] and
//! [`separability_check_numeric`] test from either side.

use core::fmt;

mod density;
mod factors;
mod joint;
mod model;
mod separability;
mod table;

pub use density::{
    xlogy, BetaParams, BlockGrid, DirichletParams, GridDensity, DEFAULT_RESOLUTION, NORMALIZATION_TOLERANCE,
};
pub use factors::{separability_check_symbolic, Factor, FactorSpec, LogFactor, Separability};
pub use joint::{compose_product, divergence, functional_expectation, joint_oracle, Divergence, JointGridPosterior};
pub use model::{
    dirichlet_update, panel_update_conjugate, panel_update_grid, LogLikelihood, PanelModel, PanelPosterior,
    PanelStatistic, Payload, Prior, SampleModel,
};
pub use separability::{separability_check_numeric, NumericOptions, NumericSeparability, Witness};
pub use table::{compare_table, distributed_from_factors, TableComparison, TwoByTwo};

/// Upper bound on the number of cells of any grid.
pub const MAX_CELLS: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PanelError {
    InvalidPrior(&'static str),
    InvalidCounts,
    InvalidGrid(&'static str),
    DegenerateLikelihood,
    ShapeMismatch(&'static str),
    NonFiniteLogLikelihood,
    ScopeOutOfRange { factor: usize, block: usize },
    ForeignStatistic,
}

impl fmt::Display for PanelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PanelError::InvalidPrior(why) => write!(f, "invalid prior: {why}"),
            PanelError::InvalidCounts => f.write_str("invalid counts: successes exceed trials"),
            PanelError::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            PanelError::DegenerateLikelihood => f.write_str("likelihood vanishes on every grid point"),
            PanelError::ShapeMismatch(why) => write!(f, "shape mismatch: {why}"),
            PanelError::NonFiniteLogLikelihood => f.write_str("log-likelihood is not finite at a tested point"),
            PanelError::ScopeOutOfRange { factor, block } => {
                write!(f, "factor {factor} refers to block {block}, which does not exist")
            }
            PanelError::ForeignStatistic => f.write_str("statistic belongs to a different panel"),
        }
    }
}

impl core::error::Error for PanelError {}
