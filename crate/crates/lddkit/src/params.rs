//! Shared run parameters: randomness, self-checking level and default precisions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{ceil_log2_u, min_q, q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Randomness {
    Det,
    Rand(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum SelfCheck {
    Off,
    #[default]
    Fast,
    Full,
}

/// Source of fair coins for randomized branches.
pub trait Coins {
    fn flip(&mut self) -> bool;
}

pub struct RngCoins(ChaCha8Rng);

impl RngCoins {
    pub fn new(seed: u64) -> RngCoins {
        RngCoins(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Coins for RngCoins {
    fn flip(&mut self) -> bool {
        self.0.gen()
    }
}

/// A fixed coin string, for exhaustive enumeration. Reads past the end return false
/// and are counted, so callers can tell whether the string was long enough.
#[derive(Debug, Clone, Default)]
pub struct FixedCoins {
    pub bits: Vec<bool>,
    pub used: usize,
}

impl FixedCoins {
    pub fn new(bits: Vec<bool>) -> FixedCoins {
        FixedCoins { bits, used: 0 }
    }
    pub fn from_mask(mask: u64, len: usize) -> FixedCoins {
        FixedCoins::new((0..len).map(|k| (mask >> k) & 1 == 1).collect())
    }
}

impl Coins for FixedCoins {
    fn flip(&mut self) -> bool {
        let b = self.bits.get(self.used).copied().unwrap_or(false);
        self.used += 1;
        b
    }
}

/// Branch selection: derandomized potentials or coins.
pub enum Choice<'a> {
    Det,
    Rand(&'a mut dyn Coins),
}

impl<'a> Choice<'a> {
    pub fn is_det(&self) -> bool {
        matches!(self, Choice::Det)
    }
    pub fn reborrow(&mut self) -> Choice<'_> {
        match self {
            Choice::Det => Choice::Det,
            Choice::Rand(c) => Choice::Rand(&mut **c),
        }
    }
}

fn log_n(n: usize) -> i64 {
    ceil_log2_u(n.max(4) as u64) as i64
}

/// 1 / ceil(log2 max(n,4))
pub fn eps_log(n: usize) -> Q {
    q(1, log_n(n))
}

/// 1 / ceil(log2 max(n,4))^2
pub fn eps_log2(n: usize) -> Q {
    let l = log_n(n);
    q(1, l * l)
}

/// Blur needs eps in [0, 1/10].
pub fn eps_blur(n: usize) -> Q {
    min_q(&q(1, 10), &eps_log(n))
}

/// Steroids precision, also capped at 1/10 so the blur calls inside stay in range.
pub fn eps_steroids(n: usize) -> Q {
    min_q(&q(1, 10), &eps_log2(n))
}
