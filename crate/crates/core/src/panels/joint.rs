use alloc::vec::Vec;

use super::density::{normalize_in_place, BlockGrid, GridDensity};
use super::{PanelError, MAX_CELLS};

/// A normalized weight array over the product of per-block grids, stored
/// row-major with the last block varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGridPosterior {
    blocks: Vec<BlockGrid>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    pub max_abs: f64,
    pub total_variation: f64,
}

fn cell_count(blocks: &[BlockGrid]) -> Result<usize, PanelError> {
    if blocks.is_empty() {
        return Err(PanelError::ShapeMismatch("at least one block is required"));
    }
    blocks
        .iter()
        .try_fold(1usize, |n, g| n.checked_mul(g.len()))
        .filter(|n| *n <= MAX_CELLS)
        .ok_or(PanelError::ShapeMismatch("product grid too large"))
}

/// Visits every cell in storage order with the per-block indices.
fn for_each_cell(shape: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = shape.iter().product();
    let mut idx = alloc::vec![0usize; shape.len()];
    for cell in 0..total {
        f(cell, &idx);
        for d in (0..shape.len()).rev() {
            idx[d] += 1;
            if idx[d] < shape[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn prior_product(densities: &[GridDensity]) -> Result<(Vec<BlockGrid>, Vec<f64>), PanelError> {
    let blocks: Vec<BlockGrid> = densities.iter().map(|d| d.grid().clone()).collect();
    let n = cell_count(&blocks)?;
    let shape: Vec<usize> = blocks.iter().map(BlockGrid::len).collect();
    let mut weights = Vec::with_capacity(n);
    for_each_cell(&shape, |_, idx| {
        weights.push(densities.iter().zip(idx).map(|(d, &k)| d.weights()[k]).product());
    });
    Ok((blocks, weights))
}

impl JointGridPosterior {
    pub fn blocks(&self) -> &[BlockGrid] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn shape(&self) -> Vec<usize> {
        self.blocks.iter().map(BlockGrid::len).collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Calls `f` with the block points and weight of every cell.
    pub fn visit(&self, mut f: impl FnMut(&[&[f64]], f64)) {
        let mut point: Vec<&[f64]> = self.blocks.iter().map(|g| g.point(0)).collect();
        for_each_cell(&self.shape(), |cell, idx| {
            for (d, &k) in idx.iter().enumerate() {
                point[d] = self.blocks[d].point(k);
            }
            f(&point, self.weights[cell]);
        });
    }

    pub fn expectation(&self, g: impl Fn(&[&[f64]]) -> f64) -> f64 {
        let mut acc = 0.0;
        self.visit(|p, w| acc += g(p) * w);
        acc
    }

    pub fn marginal(&self, block: usize) -> Result<GridDensity, PanelError> {
        let grid = self
            .blocks
            .get(block)
            .ok_or(PanelError::ShapeMismatch("no such block"))?;
        let mut weights = alloc::vec![0.0; grid.len()];
        for_each_cell(&self.shape(), |cell, idx| weights[idx[block]] += self.weights[cell]);
        GridDensity::new(grid.clone(), weights)
    }
}

/// The distributed posterior: outer product of independent block
/// densities.
pub fn compose_product(blocks: &[GridDensity]) -> Result<JointGridPosterior, PanelError> {
    // Inputs are normalized, so the outer product is too; renormalizing
    // would only perturb the marginals.
    let (blocks, weights) = prior_product(blocks)?;
    Ok(JointGridPosterior { blocks, weights })
}

/// Exact grid Bayes over all blocks jointly: product prior times
/// `exp(loglik)`, renormalized. `loglik` receives one point per block.
pub fn joint_oracle(
    priors: &[GridDensity],
    loglik: impl Fn(&[&[f64]]) -> f64,
) -> Result<JointGridPosterior, PanelError> {
    let (blocks, prior) = prior_product(priors)?;
    let mut lls = Vec::with_capacity(prior.len());
    let scratch = JointGridPosterior {
        blocks,
        weights: prior,
    };
    scratch.visit(|p, _| lls.push(loglik(p)));
    let JointGridPosterior { blocks, weights: prior } = scratch;
    if lls.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(PanelError::NonFiniteLogLikelihood);
    }
    let max = lls
        .iter()
        .zip(&prior)
        .filter(|(_, w)| **w > 0.0)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(PanelError::DegenerateLikelihood);
    }
    let mut weights: Vec<f64> = prior.iter().zip(&lls).map(|(w, l)| w * libm::exp(l - max)).collect();
    normalize_in_place(&mut weights)?;
    Ok(JointGridPosterior { blocks, weights })
}

pub fn divergence(p: &JointGridPosterior, q: &JointGridPosterior) -> Result<Divergence, PanelError> {
    if p.blocks != q.blocks {
        return Err(PanelError::ShapeMismatch("posteriors live on different grids"));
    }
    let mut max_abs: f64 = 0.0;
    let mut l1 = 0.0;
    for (a, b) in p.weights.iter().zip(&q.weights) {
        let d = libm::fabs(a - b);
        max_abs = max_abs.max(d);
        l1 += d;
    }
    Ok(Divergence {
        max_abs,
        total_variation: 0.5 * l1,
    })
}

pub fn functional_expectation(post: &JointGridPosterior, g: impl Fn(&[&[f64]]) -> f64) -> f64 {
    post.expectation(g)
}
