use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::density::xlogy;
use super::PanelError;

/// A log-factor over the blocks in its scope. The evaluator receives one
/// point per scope entry, in scope order.
pub type LogFactor = Arc<dyn Fn(&[&[f64]]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Factor {
    label: String,
    scope: Vec<usize>,
    log_factor: LogFactor,
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Factor")
            .field("label", &self.label)
            .field("scope", &self.scope)
            .finish_non_exhaustive()
    }
}

impl Factor {
    pub fn new(label: impl Into<String>, mut scope: Vec<usize>, log_factor: LogFactor) -> Factor {
        scope.sort_unstable();
        scope.dedup();
        Factor {
            label: label.into(),
            scope,
            log_factor,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn eval(&self, point: &[&[f64]]) -> f64 {
        (self.log_factor)(point)
    }

    pub fn constant(value: f64) -> Factor {
        Factor::new("constant", Vec::new(), Arc::new(move |_| value))
    }

    /// Binomial kernel on coordinate `coord` of `block`.
    pub fn bernoulli(block: usize, coord: usize, successes: u64, trials: u64) -> Result<Factor, PanelError> {
        if successes > trials {
            return Err(PanelError::InvalidCounts);
        }
        let (s, f) = (successes as f64, (trials - successes) as f64);
        Ok(Factor::new(
            "bernoulli",
            alloc::vec![block],
            Arc::new(move |p| xlogy(s, p[0][coord]) + xlogy(f, 1.0 - p[0][coord])),
        ))
    }

    pub fn categorical(block: usize, counts: Vec<u64>) -> Factor {
        Factor::new(
            "categorical",
            alloc::vec![block],
            Arc::new(move |p| counts.iter().zip(p[0]).map(|(n, q)| xlogy(*n as f64, *q)).sum()),
        )
    }

    /// Interaction term of a 2×2 table whose cell probabilities are
    /// `θ_i^y1 (1-θ_i)^(1-y1) θ_j^y2 (1-θ_j)^(1-y2) ψ^(y1 y2) / Z`:
    /// `n11 ln ψ - n ln(1 + θ_i θ_j (ψ - 1))`.
    pub fn loglinear_interaction(i: usize, j: usize, psi: f64, n11: u64, n: u64) -> Result<Factor, PanelError> {
        if !(psi.is_finite() && psi > 0.0) {
            return Err(PanelError::InvalidPrior("interaction must be finite and positive"));
        }
        if n11 > n {
            return Err(PanelError::InvalidCounts);
        }
        let (n11, n) = (n11 as f64, n as f64);
        let ln_psi = libm::log(psi);
        Ok(Factor::new(
            "loglinear-interaction",
            alloc::vec![i, j],
            Arc::new(move |p| n11 * ln_psi - n * libm::log1p(p[0][0] * p[1][0] * (psi - 1.0))),
        ))
    }

    /// `λ θ_i θ_j` on the first coordinates.
    pub fn bilinear(i: usize, j: usize, lambda: f64) -> Factor {
        Factor::new(
            "bilinear",
            alloc::vec![i, j],
            Arc::new(move |p| lambda * p[0][0] * p[1][0]),
        )
    }
}

/// A likelihood written as a sum of log-factors over `blocks` parameter
/// blocks.
#[derive(Debug, Clone)]
pub struct FactorSpec {
    blocks: usize,
    factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separability {
    /// `partition[i]` lists the factors touching only block `i`. Factors
    /// with empty scope are constants and belong to no block.
    Separable { partition: Vec<Vec<usize>> },
    /// Indices of the factors that couple two or more blocks.
    NotSeparable { offending: Vec<usize> },
}

impl FactorSpec {
    pub fn new(blocks: usize, factors: Vec<Factor>) -> Result<FactorSpec, PanelError> {
        for (k, f) in factors.iter().enumerate() {
            if let Some(&b) = f.scope.iter().find(|&&b| b >= blocks) {
                return Err(PanelError::ScopeOutOfRange { factor: k, block: b });
            }
        }
        Ok(FactorSpec { blocks, factors })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Sum of every factor at a full point (one entry per block).
    pub fn log_likelihood(&self, point: &[&[f64]]) -> f64 {
        let mut scoped: Vec<&[f64]> = Vec::new();
        self.factors
            .iter()
            .map(|f| {
                scoped.clear();
                scoped.extend(f.scope.iter().map(|&b| point[b]));
                f.eval(&scoped)
            })
            .sum()
    }

    /// The part of the likelihood panel `block` can evaluate on its own:
    /// every factor whose scope is exactly that block.
    pub fn autonomous_log_likelihood(&self, block: usize, point: &[f64]) -> f64 {
        self.factors
            .iter()
            .filter(|f| f.scope == [block])
            .map(|f| f.eval(&[point]))
            .sum()
    }
}

pub fn separability_check_symbolic(spec: &FactorSpec) -> Separability {
    let offending: Vec<usize> = spec
        .factors
        .iter()
        .enumerate()
        .filter(|(_, f)| f.scope.len() > 1)
        .map(|(k, _)| k)
        .collect();
    if !offending.is_empty() {
        return Separability::NotSeparable { offending };
    }
    let mut partition = alloc::vec![Vec::new(); spec.blocks];
    for (k, f) in spec.factors.iter().enumerate() {
        if let [b] = f.scope[..] {
            partition[b].push(k);
        }
    }
    Separability::Separable { partition }
}
