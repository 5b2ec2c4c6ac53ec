use alloc::vec::Vec;

use super::density::{BetaParams, BlockGrid, DirichletParams, GridDensity};
use super::factors::{Factor, FactorSpec};
use super::joint::{compose_product, joint_oracle, JointGridPosterior};
use super::model::{dirichlet_update, panel_update_conjugate};
use super::PanelError;

/// Counts of a 2×2 experiment, `cells[y1][y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoByTwo {
    pub cells: [[u64; 2]; 2],
}

impl TwoByTwo {
    pub fn new(cells: [[u64; 2]; 2]) -> TwoByTwo {
        TwoByTwo { cells }
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    /// `(successes, trials)` for `Y1`.
    pub fn row_margin(&self) -> (u64, u64) {
        (self.cells[1][0] + self.cells[1][1], self.total())
    }

    /// `(successes, trials)` for `Y2`.
    pub fn column_margin(&self) -> (u64, u64) {
        (self.cells[0][1] + self.cells[1][1], self.total())
    }

    /// `(count of Y1 Y2 = 1, total)`.
    pub fn joint_cell(&self) -> (u64, u64) {
        (self.cells[1][1], self.total())
    }

    /// Sample odds ratio, `None` when a cell is empty.
    pub fn odds_ratio(&self) -> Option<f64> {
        let [[a, b], [c, d]] = self.cells;
        (b > 0 && c > 0 && a > 0 && d > 0).then(|| (a * d) as f64 / (b * c) as f64)
    }

    /// Cells in the order `00, 01, 10, 11`.
    pub fn flat(&self) -> [u64; 4] {
        let [[a, b], [c, d]] = self.cells;
        [a, b, c, d]
    }

    /// Margins plus a fixed log-linear interaction `ψ`.
    pub fn dependent_model(&self, psi: f64) -> Result<FactorSpec, PanelError> {
        let (x1, n) = self.row_margin();
        let (x2, _) = self.column_margin();
        let (n11, _) = self.joint_cell();
        FactorSpec::new(
            2,
            alloc::vec![
                Factor::bernoulli(0, 0, x1, n)?,
                Factor::bernoulli(1, 0, x2, n)?,
                Factor::loglinear_interaction(0, 1, psi, n11, n)?,
            ],
        )
    }
}

/// Outcomes of reading one 2×2 experiment three ways.
#[derive(Debug, Clone, PartialEq)]
pub struct TableComparison {
    /// `E[θ1] E[θ2]` from autonomous conjugate margin updates.
    pub distributed_closed_form: f64,
    /// The same expectation on the composed grid posterior.
    pub distributed_grid: f64,
    /// Posterior mean of `P(Y1 Y2 = 1)` from the joint cell count.
    pub joint_cell_mean: f64,
    pub ratio: f64,
    pub distributed: JointGridPosterior,
    /// Grid Bayes under the margins-plus-interaction model.
    pub dependent: JointGridPosterior,
}

/// Compares the distributed reading of a 2×2 table with the joint ones.
///
/// Margins use `margin_prior`, the joint cell count uses a Dirichlet on the
/// four cells whose marginal on cell 11 is `cell_prior`, and the dependent
/// model uses a flat prior on both margins with interaction `psi`.
pub fn compare_table(
    table: &TwoByTwo,
    margin_prior: BetaParams,
    cell_prior: BetaParams,
    psi: f64,
    resolution: usize,
) -> Result<TableComparison, PanelError> {
    let (x1, n) = table.row_margin();
    let (x2, _) = table.column_margin();
    let p1 = panel_update_conjugate(margin_prior, x1, n)?;
    let p2 = panel_update_conjugate(margin_prior, x2, n)?;
    let distributed_closed_form = p1.mean() * p2.mean();

    let grid = BlockGrid::unit_interval(resolution)?;
    let d1 = GridDensity::from_beta(&p1, grid.clone())?;
    let d2 = GridDensity::from_beta(&p2, grid.clone())?;
    let distributed = compose_product(&[d1, d2])?;
    let distributed_grid = distributed.expectation(|p| p[0][0] * p[1][0]);

    // Splitting β over the other three cells keeps cell 11 at Beta(α, β).
    let rest = cell_prior.beta() / 3.0;
    let cells = DirichletParams::new(alloc::vec![rest, rest, rest, cell_prior.alpha()])?;
    let post = dirichlet_update(&cells, &table.flat())?;
    let joint_cell_mean = post.mean()[3];

    let flat = GridDensity::uniform(grid);
    let spec = table.dependent_model(psi)?;
    let dependent = joint_oracle(&[flat.clone(), flat], |p| spec.log_likelihood(p))?;

    Ok(TableComparison {
        distributed_closed_form,
        distributed_grid,
        joint_cell_mean,
        ratio: distributed_closed_form / joint_cell_mean,
        distributed,
        dependent,
    })
}

/// Autonomous grid updates of each block on its own factors, composed.
pub fn distributed_from_factors(priors: &[GridDensity], spec: &FactorSpec) -> Result<JointGridPosterior, PanelError> {
    if priors.len() != spec.blocks() {
        return Err(PanelError::ShapeMismatch("one prior per block"));
    }
    let posts = priors
        .iter()
        .enumerate()
        .map(|(b, prior)| super::panel_update_grid(prior, |p| spec.autonomous_log_likelihood(b, p)))
        .collect::<Result<Vec<_>, _>>()?;
    compose_product(&posts)
}
