//! Interchangeable counting engines, registered by name and chosen at run time.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::census::{GroupId, SphereCensus};
use crate::error::{Error, Result};
use crate::freegrp::{abelian_census_free, enumerate_census_free};
use crate::lattice::{gcd_census, visible_count_mobius, Norm};
use crate::numtheory::GcdClass;
use crate::surfgrp::{sphere_enumerate, sphere_enumerate_oracle, EnumerationOptions, DEFAULT_MEMORY_BUDGET};

/// Counts lattice points of a ball whose coordinate gcd is exactly t.
pub trait VisibleCounter: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn count(&self, rank: usize, norm: Norm, radius: u64, t: u64) -> Result<BigUint>;
}

/// Produces sphere censuses of a group for n = 0..=n_max.
pub trait CensusEngine: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn supports(&self, group: GroupId) -> bool;
    fn run(&self, group: GroupId, n_max: usize, opts: &EngineOptions) -> Result<Vec<SphereCensus>>;
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub checkpoint: Option<PathBuf>,
    pub memory_budget: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { checkpoint: None, memory_budget: DEFAULT_MEMORY_BUDGET }
    }
}

struct BruteCounter;

impl VisibleCounter for BruteCounter {
    fn name(&self) -> &'static str {
        "brute"
    }
    fn description(&self) -> &'static str {
        "enumerate the ball and tally gcd classes"
    }
    fn count(&self, rank: usize, norm: Norm, radius: u64, t: u64) -> Result<BigUint> {
        if t == 0 {
            return Err(Error::arg("t must be positive"));
        }
        Ok(BigUint::from(gcd_census(rank, norm, radius)?.count(GcdClass::Finite(t))))
    }
}

struct MobiusCounter;

impl VisibleCounter for MobiusCounter {
    fn name(&self) -> &'static str {
        "mobius"
    }
    fn description(&self) -> &'static str {
        "Möbius inversion over closed-form ball counts (l1, linf)"
    }
    fn count(&self, rank: usize, norm: Norm, radius: u64, t: u64) -> Result<BigUint> {
        let c = visible_count_mobius(rank, norm, radius, t)?;
        c.to_biguint().ok_or_else(|| Error::arg("negative count"))
    }
}

fn require(engine: &dyn CensusEngine, group: GroupId) -> Result<()> {
    if engine.supports(group) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("engine {} does not handle {group}", engine.name())))
    }
}

struct FreeDp;

impl CensusEngine for FreeDp {
    fn name(&self) -> &'static str {
        "free-dp"
    }
    fn description(&self) -> &'static str {
        "dynamic programming over (abelianization, last letter)"
    }
    fn supports(&self, group: GroupId) -> bool {
        matches!(group, GroupId::Free { .. })
    }
    fn run(&self, group: GroupId, n_max: usize, _: &EngineOptions) -> Result<Vec<SphereCensus>> {
        require(self, group)?;
        abelian_census_free(group.abelian_rank(), n_max)
    }
}

struct FreeEnumerate;

impl CensusEngine for FreeEnumerate {
    fn name(&self) -> &'static str {
        "free-enumerate"
    }
    fn description(&self) -> &'static str {
        "list every reduced word"
    }
    fn supports(&self, group: GroupId) -> bool {
        matches!(group, GroupId::Free { .. })
    }
    fn run(&self, group: GroupId, n_max: usize, _: &EngineOptions) -> Result<Vec<SphereCensus>> {
        require(self, group)?;
        enumerate_census_free(group.abelian_rank(), n_max)
    }
}

struct SurfaceNormalForm;

impl CensusEngine for SurfaceNormalForm {
    fn name(&self) -> &'static str {
        "surface-normal-form"
    }
    fn description(&self) -> &'static str {
        "breadth-first search over canonical geodesics"
    }
    fn supports(&self, group: GroupId) -> bool {
        matches!(group, GroupId::Surface { .. })
    }
    fn run(&self, group: GroupId, n_max: usize, opts: &EngineOptions) -> Result<Vec<SphereCensus>> {
        require(self, group)?;
        let GroupId::Surface { genus } = group else { unreachable!() };
        let e = EnumerationOptions { checkpoint: opts.checkpoint.clone(), memory_budget: opts.memory_budget };
        sphere_enumerate(genus, n_max, &e)
    }
}

struct SurfaceOracle;

impl CensusEngine for SurfaceOracle {
    fn name(&self) -> &'static str {
        "surface-oracle"
    }
    fn description(&self) -> &'static str {
        "breadth-first search deduplicated by the word problem"
    }
    fn supports(&self, group: GroupId) -> bool {
        matches!(group, GroupId::Surface { .. })
    }
    fn run(&self, group: GroupId, n_max: usize, opts: &EngineOptions) -> Result<Vec<SphereCensus>> {
        require(self, group)?;
        let GroupId::Surface { genus } = group else { unreachable!() };
        if opts.checkpoint.is_some() {
            return Err(Error::Unsupported("surface-oracle does not checkpoint".into()));
        }
        // Word storage is roughly 40 bytes per element of the last two spheres.
        let est = crate::freegrp::sphere_size_free(2 * genus, n_max).to_f64().unwrap_or(f64::INFINITY) * 40.0;
        if est > opts.memory_budget as f64 {
            return Err(Error::Resource(format!(
                "surface-oracle to n = {n_max} may exceed the memory budget; use surface-normal-form"
            )));
        }
        sphere_enumerate_oracle(genus, n_max)
    }
}

pub struct Registry {
    counters: BTreeMap<&'static str, Box<dyn VisibleCounter>>,
    engines: BTreeMap<&'static str, Box<dyn CensusEngine>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register_counter(Box::new(BruteCounter));
        r.register_counter(Box::new(MobiusCounter));
        r.register_engine(Box::new(FreeDp));
        r.register_engine(Box::new(FreeEnumerate));
        r.register_engine(Box::new(SurfaceNormalForm));
        r.register_engine(Box::new(SurfaceOracle));
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { counters: BTreeMap::new(), engines: BTreeMap::new() }
    }

    /// Replaces any counter already registered under the same name.
    pub fn register_counter(&mut self, c: Box<dyn VisibleCounter>) {
        self.counters.insert(c.name(), c);
    }

    pub fn register_engine(&mut self, e: Box<dyn CensusEngine>) {
        self.engines.insert(e.name(), e);
    }

    pub fn counter(&self, name: &str) -> Result<&dyn VisibleCounter> {
        self.counters.get(name).map(|c| c.as_ref()).ok_or_else(|| {
            Error::arg(format!("unknown counter {name:?}; known: {}", self.counter_names().join(", ")))
        })
    }

    pub fn engine(&self, name: &str) -> Result<&dyn CensusEngine> {
        self.engines.get(name).map(|e| e.as_ref()).ok_or_else(|| {
            Error::arg(format!("unknown engine {name:?}; known: {}", self.engine_names().join(", ")))
        })
    }

    pub fn counter_names(&self) -> Vec<&'static str> {
        self.counters.keys().copied().collect()
    }

    pub fn engine_names(&self) -> Vec<&'static str> {
        self.engines.keys().copied().collect()
    }

    pub fn default_engine(group: GroupId) -> &'static str {
        match group {
            GroupId::Free { .. } => "free-dp",
            GroupId::Surface { .. } => "surface-normal-form",
        }
    }

    pub fn census(&self, method: Option<&str>, group: GroupId, n_max: usize, opts: &EngineOptions) -> Result<Vec<SphereCensus>> {
        let engine = self.engine(method.unwrap_or(Self::default_engine(group)))?;
        require(engine, group)?;
        engine.run(group, n_max, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_registered() {
        let r = Registry::default();
        assert_eq!(r.counter_names(), vec!["brute", "mobius"]);
        assert_eq!(r.engine_names(), vec!["free-dp", "free-enumerate", "surface-normal-form", "surface-oracle"]);
        assert!(r.counter("nope").is_err());
        assert!(r.engine("nope").is_err());
    }

    #[test]
    fn counters_agree() {
        let r = Registry::default();
        for norm in [Norm::L1, Norm::Linf] {
            for t in 1..=3 {
                let a = r.counter("brute").unwrap().count(2, norm, 17, t).unwrap();
                let b = r.counter("mobius").unwrap().count(2, norm, 17, t).unwrap();
                assert_eq!(a, b);
            }
        }
        assert!(matches!(r.counter("mobius").unwrap().count(2, Norm::L2, 5, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn engines_agree() {
        let r = Registry::default();
        let o = EngineOptions::default();
        let f = GroupId::Free { rank: 2 };
        assert_eq!(r.census(None, f, 6, &o).unwrap(), r.census(Some("free-enumerate"), f, 6, &o).unwrap());
        let s = GroupId::Surface { genus: 2 };
        assert_eq!(r.census(None, s, 4, &o).unwrap(), r.census(Some("surface-oracle"), s, 4, &o).unwrap());
        assert!(matches!(r.census(Some("free-dp"), s, 3, &o), Err(Error::Unsupported(_))));
    }
}
