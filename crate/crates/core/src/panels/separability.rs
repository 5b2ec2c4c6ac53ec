//! Numeric test for additive separability of a log-likelihood.
//!
//! A function `ll(u, v)` splits as `f(u) + g(v)` exactly when every
//! four-point interaction `ll(u,v) + ll(u',v') - ll(u,v') - ll(u',v)`
//! vanishes. For each pair of blocks the quadruples are drawn from a Halton
//! sequence over grid indices, shifted by a seeded random rotation; blocks
//! outside the pair are held at a point drawn from the same sequence.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::density::BlockGrid;
use super::PanelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub samples_per_pair: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            samples_per_pair: 256,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

/// The quadruple with the largest interaction residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub blocks: (usize, usize),
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    pub v: Vec<f64>,
    pub v_prime: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumericSeparability {
    Separable { max_residual: f64, quadruples: usize },
    NotSeparable { witness: Witness, quadruples: usize },
}

impl NumericSeparability {
    pub fn is_separable(&self) -> bool {
        matches!(self, NumericSeparability::Separable { .. })
    }

    pub fn max_residual(&self) -> f64 {
        match self {
            NumericSeparability::Separable { max_residual, .. } => *max_residual,
            NumericSeparability::NotSeparable { witness, .. } => libm::fabs(witness.residual),
        }
    }
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let b = base as f64;
    let mut scale = 1.0 / b;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * scale;
        k /= base;
        scale /= b;
    }
    out
}

fn primes(n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|p| *p * *p <= c).all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn pick(x: f64, len: usize) -> usize {
    ((x * len as f64) as usize).min(len - 1)
}

/// Checks every block pair of `loglik` over `grids`.
pub fn separability_check_numeric(
    loglik: impl Fn(&[&[f64]]) -> f64,
    grids: &[BlockGrid],
    options: NumericOptions,
) -> Result<NumericSeparability, PanelError> {
    let m = grids.len();
    if grids.iter().any(BlockGrid::is_empty) {
        return Err(PanelError::ShapeMismatch("empty grid"));
    }
    let dims = 4 + m.saturating_sub(2);
    let bases = primes(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let mut best: Option<Witness> = None;
    let mut quadruples = 0;
    let mut point: Vec<&[f64]> = grids.iter().map(|g| g.point(0)).collect();
    let eval = |point: &[&[f64]]| {
        let v = loglik(point);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(PanelError::NonFiniteLogLikelihood)
        }
    };
    for i in 0..m {
        for j in i + 1..m {
            let shift: Vec<f64> = (0..dims).map(|_| unit_f64(&mut rng)).collect();
            let others: Vec<usize> = (0..m).filter(|&k| k != i && k != j).collect();
            let (gi, gj) = (&grids[i], &grids[j]);
            for s in 0..options.samples_per_pair {
                let h: Vec<f64> = bases
                    .iter()
                    .zip(&shift)
                    .map(|(&b, r)| {
                        let x = radical_inverse(s as u64 + 1, b) + r;
                        x - libm::floor(x)
                    })
                    .collect();
                let (a, mut a2) = (pick(h[0], gi.len()), pick(h[1], gi.len()));
                let (b, mut b2) = (pick(h[2], gj.len()), pick(h[3], gj.len()));
                if a2 == a && gi.len() > 1 {
                    a2 = (a + 1) % gi.len();
                }
                if b2 == b && gj.len() > 1 {
                    b2 = (b + 1) % gj.len();
                }
                for (slot, &k) in others.iter().enumerate() {
                    point[k] = grids[k].point(pick(h[4 + slot], grids[k].len()));
                }
                let mut at = |x: usize, y: usize| {
                    point[i] = gi.point(x);
                    point[j] = gj.point(y);
                    eval(&point)
                };
                let residual = at(a, b)? + at(a2, b2)? - at(a, b2)? - at(a2, b)?;
                quadruples += 1;
                if best.as_ref().is_none_or(|w| libm::fabs(residual) > libm::fabs(w.residual)) {
                    best = Some(Witness {
                        blocks: (i, j),
                        u: gi.point(a).to_vec(),
                        u_prime: gi.point(a2).to_vec(),
                        v: gj.point(b).to_vec(),
                        v_prime: gj.point(b2).to_vec(),
                        residual,
                    });
                }
            }
        }
    }
    Ok(match best {
        Some(w) if libm::fabs(w.residual) > options.tolerance => NumericSeparability::NotSeparable {
            witness: w,
            quadruples,
        },
        Some(w) => NumericSeparability::Separable {
            max_residual: libm::fabs(w.residual),
            quadruples,
        },
        None => NumericSeparability::Separable {
            max_residual: 0.0,
            quadruples: 0,
        },
    })
}
