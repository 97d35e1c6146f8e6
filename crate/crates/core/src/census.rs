//! Sphere censuses by abelianized image.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::lattice::LatticeVector;
use crate::words::Alphabet;

/// A free group of rank k or a surface group of genus k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupId {
    Free { rank: usize },
    Surface { genus: usize },
}

impl GroupId {
    /// Rank of the abelianization: k for F_k, 2k for S_k.
    pub fn abelian_rank(self) -> usize {
        match self {
            GroupId::Free { rank } => rank,
            GroupId::Surface { genus } => 2 * genus,
        }
    }

    pub fn alphabet(self) -> Alphabet {
        match self {
            GroupId::Free { rank } => Alphabet::Free { rank },
            GroupId::Surface { genus } => Alphabet::Surface { genus },
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Free { rank } => write!(f, "F{rank}"),
            GroupId::Surface { genus } => write!(f, "S{genus}"),
        }
    }
}

/// Elements of one sphere, tallied by abelianization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereCensus {
    pub group: GroupId,
    pub n: usize,
    pub total: BigUint,
    /// Only nonzero entries are stored.
    pub ab_counts: BTreeMap<LatticeVector, BigUint>,
}

impl SphereCensus {
    pub fn count(&self, alpha: &LatticeVector) -> BigUint {
        self.ab_counts.get(alpha).cloned().unwrap_or_default()
    }

    pub fn visible_count(&self) -> BigUint {
        self.ab_counts.iter().filter(|(v, _)| v.is_visible()).map(|(_, c)| c).sum()
    }

    /// Visible elements over sphere size; 0 for the trivial sphere.
    pub fn visible_fraction(&self) -> f64 {
        if self.n == 0 || self.total.is_zero() {
            return 0.0;
        }
        ratio(&self.visible_count(), &self.total)
    }

    /// Checks count conservation, inversion symmetry and the parity support law.
    pub fn check_invariants(&self) -> Result<(), String> {
        let sum: BigUint = self.ab_counts.values().sum();
        if sum != self.total {
            return Err(format!("{} n={}: Σ ab_counts {} ≠ total {}", self.group, self.n, sum, self.total));
        }
        for (alpha, c) in &self.ab_counts {
            if alpha.rank() != self.group.abelian_rank() {
                return Err(format!("vector {alpha} has wrong rank"));
            }
            let l1 = alpha.l1();
            if l1 > self.n as u64 || (l1 + self.n as u64) % 2 == 1 {
                return Err(format!("{} n={}: support outside parity ball at {alpha}", self.group, self.n));
            }
            if self.count(&-alpha) != *c {
                return Err(format!("{} n={}: asymmetric at {alpha}", self.group, self.n));
            }
        }
        Ok(())
    }
}

/// a / b as f64 for arbitrarily large integers.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().saturating_sub(1000);
    let (a, b) = (a >> shift, b >> shift);
    a.to_f64().unwrap_or(f64::NAN) / b.to_f64().unwrap_or(f64::NAN)
}
