use alloc::vec::Vec;

use super::PanelError;

/// Tolerance on the total mass of a stored grid density.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Default number of points per axis.
pub const DEFAULT_RESOLUTION: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<BetaParams, PanelError> {
        if alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0 {
            Ok(BetaParams { alpha, beta })
        } else {
            Err(PanelError::InvalidPrior("beta parameters must be finite and positive"))
        }
    }

    pub fn uniform() -> BetaParams {
        BetaParams { alpha: 1.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }

    /// Log density up to the normalizing constant.
    pub fn ln_kernel(&self, x: f64) -> f64 {
        xlogy(self.alpha - 1.0, x) + xlogy(self.beta - 1.0, 1.0 - x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<DirichletParams, PanelError> {
        if alpha.len() < 2 {
            return Err(PanelError::InvalidPrior("a dirichlet needs at least two categories"));
        }
        if alpha.iter().all(|a| a.is_finite() && *a > 0.0) {
            Ok(DirichletParams { alpha })
        } else {
            Err(PanelError::InvalidPrior("dirichlet weights must be finite and positive"))
        }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn categories(&self) -> usize {
        self.alpha.len()
    }

    pub fn mean(&self) -> Vec<f64> {
        let total: f64 = self.alpha.iter().sum();
        self.alpha.iter().map(|a| a / total).collect()
    }

    pub fn ln_kernel(&self, x: &[f64]) -> f64 {
        self.alpha.iter().zip(x).map(|(a, p)| xlogy(a - 1.0, *p)).sum()
    }
}

/// `a * ln(b)` with the convention `0 * ln(0) = 0`.
pub fn xlogy(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * libm::log(b)
    }
}

/// A finite set of points in one parameter block, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    dim: usize,
    coords: Vec<f64>,
}

impl BlockGrid {
    pub fn from_points(dim: usize, coords: Vec<f64>) -> Result<BlockGrid, PanelError> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(PanelError::InvalidGrid("coordinates do not form whole points"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(PanelError::InvalidGrid("coordinates must be finite"));
        }
        Ok(BlockGrid { dim, coords })
    }

    /// `n` cell midpoints `(k + 0.5) / n` of the unit interval.
    pub fn unit_interval(n: usize) -> Result<BlockGrid, PanelError> {
        BlockGrid::unit_cube(1, n)
    }

    /// The product of `dim` midpoint axes, last coordinate varying fastest.
    pub fn unit_cube(dim: usize, n: usize) -> Result<BlockGrid, PanelError> {
        if n == 0 || dim == 0 {
            return Err(PanelError::InvalidGrid("a grid needs at least one point per axis"));
        }
        let total = n
            .checked_pow(dim as u32)
            .filter(|t| *t <= super::MAX_CELLS)
            .ok_or(PanelError::InvalidGrid("grid too large"))?;
        let axis: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
        let mut coords = Vec::with_capacity(total * dim);
        let mut idx = alloc::vec![0usize; dim];
        for _ in 0..total {
            coords.extend(idx.iter().map(|&k| axis[k]));
            for d in (0..dim).rev() {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
        Ok(BlockGrid { dim, coords })
    }

    /// Interior lattice points of the probability simplex: every
    /// composition of `resolution` into `categories` positive parts,
    /// divided by `resolution`, in lexicographic order.
    pub fn simplex(categories: usize, resolution: usize) -> Result<BlockGrid, PanelError> {
        if categories < 2 || resolution < categories {
            return Err(PanelError::InvalidGrid("simplex resolution must be at least the number of categories"));
        }
        let mut coords = Vec::new();
        let mut parts = alloc::vec![0usize; categories];
        fn fill(k: usize, left: usize, parts: &mut [usize], r: usize, out: &mut Vec<f64>) -> Result<(), PanelError> {
            let rest = parts.len() - k - 1;
            if rest == 0 {
                parts[k] = left;
                if out.len() / parts.len() >= super::MAX_CELLS {
                    return Err(PanelError::InvalidGrid("grid too large"));
                }
                out.extend(parts.iter().map(|&c| c as f64 / r as f64));
                return Ok(());
            }
            for c in 1..=left - rest {
                parts[k] = c;
                fill(k + 1, left - c, parts, r, out)?;
            }
            Ok(())
        }
        fill(0, resolution, &mut parts, resolution, &mut coords)?;
        Ok(BlockGrid { dim: categories, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn points(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }
}

/// Normalized non-negative weights over a [`BlockGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    grid: BlockGrid,
    weights: Vec<f64>,
}

impl GridDensity {
    pub fn new(grid: BlockGrid, weights: Vec<f64>) -> Result<GridDensity, PanelError> {
        if weights.len() != grid.len() {
            return Err(PanelError::ShapeMismatch("one weight per grid point"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(PanelError::InvalidPrior("grid weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if libm::fabs(total - 1.0) > NORMALIZATION_TOLERANCE {
            return Err(PanelError::InvalidPrior("grid weights must sum to one"));
        }
        Ok(GridDensity { grid, weights })
    }

    /// Builds a density from unnormalized log weights.
    pub fn from_log_weights(grid: BlockGrid, log_weights: &[f64]) -> Result<GridDensity, PanelError> {
        let weights = normalize_log(log_weights)?;
        Ok(GridDensity { grid, weights })
    }

    pub fn uniform(grid: BlockGrid) -> GridDensity {
        let w = 1.0 / grid.len() as f64;
        let weights = alloc::vec![w; grid.len()];
        GridDensity { grid, weights }
    }

    /// Discretizes a Beta prior, independently on every coordinate.
    pub fn from_beta(beta: &BetaParams, grid: BlockGrid) -> Result<GridDensity, PanelError> {
        if grid.points().flatten().any(|x| *x <= 0.0 || *x >= 1.0) {
            return Err(PanelError::InvalidGrid("beta grids must lie inside (0, 1)"));
        }
        let logs: Vec<f64> = grid.points().map(|p| p.iter().map(|x| beta.ln_kernel(*x)).sum()).collect();
        GridDensity::from_log_weights(grid, &logs)
    }

    pub fn from_dirichlet(dir: &DirichletParams, grid: BlockGrid) -> Result<GridDensity, PanelError> {
        if grid.dim() != dir.categories() {
            return Err(PanelError::ShapeMismatch("grid dimension differs from the number of categories"));
        }
        if grid.points().flatten().any(|x| *x <= 0.0) {
            return Err(PanelError::InvalidGrid("dirichlet grids must lie in the open simplex"));
        }
        let logs: Vec<f64> = grid.points().map(|p| dir.ln_kernel(p)).collect();
        GridDensity::from_log_weights(grid, &logs)
    }

    pub fn grid(&self) -> &BlockGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expectation(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.grid.points().zip(&self.weights).map(|(p, w)| g(p) * w).sum()
    }

    pub fn mean(&self, coord: usize) -> f64 {
        self.expectation(|p| p[coord])
    }

    pub fn variance(&self, coord: usize) -> f64 {
        let m = self.mean(coord);
        self.expectation(|p| (p[coord] - m) * (p[coord] - m))
    }
}

/// Exponentiates and normalizes log weights, guarding against overflow.
pub(crate) fn normalize_log(log_weights: &[f64]) -> Result<Vec<f64>, PanelError> {
    if log_weights.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(PanelError::NonFiniteLogLikelihood);
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(PanelError::DegenerateLikelihood);
    }
    let mut weights: Vec<f64> = log_weights.iter().map(|l| libm::exp(l - max)).collect();
    normalize_in_place(&mut weights)?;
    Ok(weights)
}

pub(crate) fn normalize_in_place(weights: &mut [f64]) -> Result<(), PanelError> {
    let total: f64 = weights.iter().sum();
    if total.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) || !total.is_finite() {
        return Err(PanelError::DegenerateLikelihood);
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_moments() {
        let b = BetaParams::new(51.0, 51.0).unwrap();
        assert_eq!(b.mean(), 0.5);
        assert!((b.variance() - 51.0 * 51.0 / (102.0 * 102.0 * 103.0)).abs() < 1e-18);
        assert!(BetaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn midpoint_axis() {
        let g = BlockGrid::unit_interval(101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g.point(50), &[0.5]);
        assert_eq!(g.point(0), &[0.5 / 101.0]);
        let cube = BlockGrid::unit_cube(2, 3).unwrap();
        assert_eq!(cube.len(), 9);
        assert_eq!(cube.point(1), &[0.5 / 3.0, 1.5 / 3.0]);
    }

    #[test]
    fn simplex_lattice() {
        let g = BlockGrid::simplex(3, 5).unwrap();
        // Compositions of 5 into 3 positive parts: C(4, 2).
        assert_eq!(g.len(), 6);
        for p in g.points() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(p.iter().all(|x| *x > 0.0));
        }
        assert!(BlockGrid::simplex(3, 2).is_err());
    }

    #[test]
    fn density_validation() {
        let g = BlockGrid::unit_interval(2).unwrap();
        assert!(GridDensity::new(g.clone(), alloc::vec![0.5, 0.5]).is_ok());
        assert!(GridDensity::new(g.clone(), alloc::vec![0.6, 0.5]).is_err());
        assert!(GridDensity::new(g.clone(), alloc::vec![1.5, -0.5]).is_err());
        assert!(GridDensity::new(g, alloc::vec![1.0]).is_err());
    }

    #[test]
    fn discretized_beta_matches_moments() {
        let b = BetaParams::new(51.0, 51.0).unwrap();
        let d = GridDensity::from_beta(&b, BlockGrid::unit_interval(1001).unwrap()).unwrap();
        assert!((d.mean(0) - b.mean()).abs() < 1e-12);
        assert!((d.variance(0) - b.variance()).abs() < 1e-9);
    }

    #[test]
    fn discretized_dirichlet_mean() {
        let dir = DirichletParams::new(alloc::vec![2.0, 3.0, 5.0]).unwrap();
        let d = GridDensity::from_dirichlet(&dir, BlockGrid::simplex(3, 120).unwrap()).unwrap();
        let m = dir.mean();
        for (k, want) in m.iter().enumerate() {
            assert!((d.mean(k) - want).abs() < 5e-3, "{k}: {} vs {want}", d.mean(k));
        }
    }

    #[test]
    fn all_minus_infinity_is_degenerate() {
        assert_eq!(
            normalize_log(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            Err(PanelError::DegenerateLikelihood)
        );
        assert_eq!(normalize_log(&[0.0, f64::NAN]), Err(PanelError::NonFiniteLogLikelihood));
    }
}
