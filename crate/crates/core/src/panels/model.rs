use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::density::{normalize_log, xlogy, BetaParams, BlockGrid, DirichletParams, GridDensity};
use super::PanelError;

/// Sufficient statistic reported by one panel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Binomial { successes: u64, trials: u64 },
    Counts(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanelStatistic {
    panel: usize,
    /// Covariate context; `None` is the single default context and maps
    /// to coordinate 0 of the block.
    context: Option<usize>,
    payload: Payload,
}

impl PanelStatistic {
    pub fn binomial(panel: usize, successes: u64, trials: u64) -> Result<PanelStatistic, PanelError> {
        PanelStatistic::new(panel, None, Payload::Binomial { successes, trials })
    }

    pub fn counts(panel: usize, counts: Vec<u64>) -> Result<PanelStatistic, PanelError> {
        PanelStatistic::new(panel, None, Payload::Counts(counts))
    }

    pub fn new(panel: usize, context: Option<usize>, payload: Payload) -> Result<PanelStatistic, PanelError> {
        if let Payload::Binomial { successes, trials } = payload {
            if successes > trials {
                return Err(PanelError::InvalidCounts);
            }
        }
        Ok(PanelStatistic { panel, context, payload })
    }

    pub fn panel(&self) -> usize {
        self.panel
    }

    pub fn context(&self) -> Option<usize> {
        self.context
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    fn coordinate(&self) -> usize {
        self.context.unwrap_or(0)
    }
}

/// Log-likelihood of a block point given the statistics it has consumed.
pub type LogLikelihood = Arc<dyn Fn(&[f64], &[PanelStatistic]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum SampleModel {
    /// `θ[c]` is the success probability in context `c`.
    Bernoulli,
    /// The block is a probability vector over categories.
    Categorical,
    Custom(LogLikelihood),
}

impl fmt::Debug for SampleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleModel::Bernoulli => f.write_str("Bernoulli"),
            SampleModel::Categorical => f.write_str("Categorical"),
            SampleModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl SampleModel {
    pub fn log_likelihood(&self, point: &[f64], stats: &[PanelStatistic]) -> Result<f64, PanelError> {
        match self {
            SampleModel::Custom(ll) => Ok(ll(point, stats)),
            SampleModel::Bernoulli => stats
                .iter()
                .map(|s| match s.payload {
                    Payload::Binomial { successes, trials } => {
                        let p = *point.get(s.coordinate()).ok_or(PanelError::ShapeMismatch(
                            "context index outside the parameter block",
                        ))?;
                        Ok(xlogy(successes as f64, p) + xlogy((trials - successes) as f64, 1.0 - p))
                    }
                    Payload::Counts(_) => Err(PanelError::ShapeMismatch("bernoulli model given category counts")),
                })
                .sum(),
            SampleModel::Categorical => stats
                .iter()
                .map(|s| match &s.payload {
                    Payload::Counts(n) if n.len() == point.len() => {
                        Ok(n.iter().zip(point).map(|(k, p)| xlogy(*k as f64, *p)).sum::<f64>())
                    }
                    _ => Err(PanelError::ShapeMismatch("categorical model needs one count per category")),
                })
                .sum(),
        }
    }
}

/// A panel's prior or posterior over its parameter block.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    Beta(BetaParams),
    Dirichlet(DirichletParams),
    Grid(GridDensity),
}

impl Prior {
    /// Evaluates the density on `grid`. A grid prior only accepts its own
    /// grid.
    pub fn on_grid(&self, grid: &BlockGrid) -> Result<GridDensity, PanelError> {
        match self {
            Prior::Beta(b) => GridDensity::from_beta(b, grid.clone()),
            Prior::Dirichlet(d) => GridDensity::from_dirichlet(d, grid.clone()),
            Prior::Grid(g) if g.grid() == grid => Ok(g.clone()),
            Prior::Grid(_) => Err(PanelError::ShapeMismatch("grid prior evaluated on a different grid")),
        }
    }

    /// Closed-form or grid mean of one coordinate.
    pub fn mean(&self, coord: usize) -> f64 {
        match self {
            Prior::Beta(b) => b.mean(),
            Prior::Dirichlet(d) => d.mean()[coord],
            Prior::Grid(g) => g.mean(coord),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PanelModel {
    pub panel: usize,
    pub prior: Prior,
    pub sample: SampleModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelPosterior {
    pub panel: usize,
    pub epoch: u64,
    pub consumed: Vec<PanelStatistic>,
    pub density: Prior,
}

impl PanelPosterior {
    pub fn density(&self, grid: &BlockGrid) -> Result<GridDensity, PanelError> {
        self.density.on_grid(grid)
    }
}

impl PanelModel {
    fn own(&self, stats: &[PanelStatistic]) -> Result<(), PanelError> {
        if stats.iter().any(|s| s.panel != self.panel) {
            Err(PanelError::ForeignStatistic)
        } else {
            Ok(())
        }
    }

    /// Updates autonomously on this panel's statistics, in closed form when
    /// the prior is conjugate to the sample model and on the prior's grid
    /// otherwise.
    pub fn update(&self, stats: &[PanelStatistic], epoch: u64) -> Result<PanelPosterior, PanelError> {
        self.own(stats)?;
        let density = match (&self.prior, &self.sample) {
            (Prior::Beta(b), SampleModel::Bernoulli) => {
                let mut post = *b;
                for s in stats {
                    let Payload::Binomial { successes, trials } = s.payload else {
                        return Err(PanelError::ShapeMismatch("bernoulli model given category counts"));
                    };
                    if s.coordinate() != 0 {
                        return Err(PanelError::ShapeMismatch("context index outside the parameter block"));
                    }
                    post = panel_update_conjugate(post, successes, trials)?;
                }
                Prior::Beta(post)
            }
            (Prior::Dirichlet(d), SampleModel::Categorical) => {
                let mut post = d.clone();
                for s in stats {
                    let Payload::Counts(n) = &s.payload else {
                        return Err(PanelError::ShapeMismatch("categorical model needs one count per category"));
                    };
                    post = dirichlet_update(&post, n)?;
                }
                Prior::Dirichlet(post)
            }
            (Prior::Grid(g), sample) => Prior::Grid(grid_update(g, sample, stats)?),
            _ => {
                return Err(PanelError::ShapeMismatch(
                    "non-conjugate model needs a grid prior or an explicit grid",
                ))
            }
        };
        Ok(PanelPosterior {
            panel: self.panel,
            epoch,
            consumed: stats.to_vec(),
            density,
        })
    }

    /// Updates on `grid` regardless of conjugacy.
    pub fn update_on_grid(
        &self,
        grid: &BlockGrid,
        stats: &[PanelStatistic],
        epoch: u64,
    ) -> Result<PanelPosterior, PanelError> {
        self.own(stats)?;
        let prior = self.prior.on_grid(grid)?;
        Ok(PanelPosterior {
            panel: self.panel,
            epoch,
            consumed: stats.to_vec(),
            density: Prior::Grid(grid_update(&prior, &self.sample, stats)?),
        })
    }
}

fn grid_update(prior: &GridDensity, sample: &SampleModel, stats: &[PanelStatistic]) -> Result<GridDensity, PanelError> {
    let lls = prior
        .grid()
        .points()
        .map(|p| sample.log_likelihood(p, stats))
        .collect::<Result<Vec<f64>, _>>()?;
    reweight(prior, &lls)
}

pub fn panel_update_conjugate(prior: BetaParams, successes: u64, trials: u64) -> Result<BetaParams, PanelError> {
    if successes > trials {
        return Err(PanelError::InvalidCounts);
    }
    BetaParams::new(
        prior.alpha() + successes as f64,
        prior.beta() + (trials - successes) as f64,
    )
}

pub fn dirichlet_update(prior: &DirichletParams, counts: &[u64]) -> Result<DirichletParams, PanelError> {
    if counts.len() != prior.categories() {
        return Err(PanelError::ShapeMismatch("one count per category"));
    }
    DirichletParams::new(prior.alpha().iter().zip(counts).map(|(a, n)| a + *n as f64).collect())
}

/// Pointwise prior times likelihood on the prior's grid, renormalized.
pub fn panel_update_grid(prior: &GridDensity, loglik: impl Fn(&[f64]) -> f64) -> Result<GridDensity, PanelError> {
    let lls: Vec<f64> = prior.grid().points().map(loglik).collect();
    reweight(prior, &lls)
}

fn reweight(prior: &GridDensity, lls: &[f64]) -> Result<GridDensity, PanelError> {
    let logs: Vec<f64> = prior
        .weights()
        .iter()
        .zip(lls)
        .map(|(w, l)| if *w == 0.0 { f64::NEG_INFINITY } else { libm::log(*w) + l })
        .collect();
    if lls.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(PanelError::NonFiniteLogLikelihood);
    }
    let weights = normalize_log(&logs)?;
    GridDensity::new(prior.grid().clone(), weights)
}
