//! Exact joint distributions over a handful of binary variables.

#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

pub fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

fn compress(x: u64, mask: u64) -> usize {
    let mut out = 0usize;
    let mut k = 0;
    for bit in 0..64 {
        if mask >> bit & 1 == 1 {
            out |= ((x >> bit & 1) as usize) << k;
            k += 1;
        }
    }
    out
}

/// A probability table over `n` binary variables, indexed by assignment
/// bitmask.
pub struct Dist {
    pub n: usize,
    pub p: Vec<f64>,
}

pub enum Term {
    /// Positive random table over the variables in the mask.
    Table(u64, Vec<f64>),
    /// `x_target = f(x_scope)`.
    Function { target: usize, scope: u64, table: Vec<bool> },
}

impl Term {
    pub fn random_table(rng: &mut ChaCha8Rng, scope: u64) -> Term {
        let size = 1usize << scope.count_ones();
        Term::Table(scope, (0..size).map(|_| uniform(rng, 0.05, 1.0)).collect())
    }

    pub fn random_function(rng: &mut ChaCha8Rng, target: usize, scope: u64) -> Term {
        let size = 1usize << scope.count_ones();
        Term::Function {
            target,
            scope,
            table: (0..size).map(|_| rng.next_u64() & 1 == 1).collect(),
        }
    }

    fn eval(&self, x: u64) -> f64 {
        match self {
            Term::Table(mask, t) => t[compress(x, *mask)],
            Term::Function { target, scope, table } => {
                let want = table[compress(x, *scope)];
                if (x >> target & 1 == 1) == want {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl Dist {
    pub fn from_terms(n: usize, terms: &[Term]) -> Dist {
        let mut p: Vec<f64> = (0..1u64 << n).map(|x| terms.iter().map(|t| t.eval(x)).product()).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        Dist { n, p }
    }

    fn marginal(&self, mask: u64) -> Vec<f64> {
        let mut m = vec![0.0; 1 << self.n];
        for (x, v) in self.p.iter().enumerate() {
            m[x & mask as usize] += v;
        }
        m
    }

    /// `max |P(abc) P(c) - P(ac) P(bc)|` over all assignments; zero exactly
    /// when `a ⫫ b | c`.
    pub fn ci_error(&self, a: u64, b: u64, c: u64) -> f64 {
        let (abc, ac, bc) = (a | b | c, a | c, b | c);
        let (m_abc, m_ac, m_bc, m_c) = (self.marginal(abc), self.marginal(ac), self.marginal(bc), self.marginal(c));
        (0..1usize << self.n)
            .map(|x| {
                let x = x as u64;
                (m_abc[(x & abc) as usize] * m_c[(x & c) as usize] - m_ac[(x & ac) as usize] * m_bc[(x & bc) as usize])
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}
