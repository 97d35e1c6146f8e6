//! Exact sphere censuses of free groups.
//!
//! Layer n of the dynamic program holds, for each abelianization vector v and
//! last letter x, the number of reduced words of length n ending in x with
//! image v. Layer n+1 is pulled from layer n:
//!
//! ```text
//! next[v][x] = Σ_{y ≠ x⁻¹} prev[v − e(x)][y]
//! ```

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use crate::census::{ratio, GroupId, SphereCensus};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::words::{reduced_words, Letter};

/// Cap on DP cells: (2·n_max + 1)^k · 2k.
pub const STATE_BUDGET: u128 = 100_000_000;

/// 1 for n = 0, else 2k(2k−1)^{n−1}.
pub fn sphere_size_free(k: usize, n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    BigUint::from(2 * k) * Pow::pow(BigUint::from(2 * k - 1), n - 1)
}

trait Count: Clone + Zero + Send + Sync + for<'a> Add<&'a Self, Output = Self> + for<'a> Sub<&'a Self, Output = Self> {
    fn unit() -> Self;
    fn into_big(self) -> BigUint;
}

impl Count for u128 {
    fn unit() -> Self {
        1
    }

    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Count for BigUint {
    fn unit() -> Self {
        BigUint::one()
    }

    fn into_big(self) -> BigUint {
        self
    }
}

struct Grid {
    k: usize,
    radius: usize,
    side: usize,
    cells: usize,
}

impl Grid {
    fn new(k: usize, radius: usize) -> Self {
        let side = 2 * radius + 1;
        Grid { k, radius, side, cells: side.pow(k as u32) }
    }

    fn decode(&self, mut idx: usize) -> Vec<i64> {
        let mut v = vec![0i64; self.k];
        for c in v.iter_mut() {
            *c = (idx % self.side) as i64 - self.radius as i64;
            idx /= self.side;
        }
        v
    }

    fn stride(&self, axis: usize) -> usize {
        self.side.pow(axis as u32)
    }
}

/// Sphere censuses of F_k for n = 0..=n_max.
pub fn abelian_census_free(k: usize, n_max: usize) -> Result<Vec<SphereCensus>> {
    if k < 2 {
        return Err(Error::arg("free group rank must be at least 2"));
    }
    let states = (2 * n_max as u128 + 1)
        .checked_pow(k as u32)
        .and_then(|c| c.checked_mul(2 * k as u128));
    if !matches!(states, Some(s) if s <= STATE_BUDGET) {
        return Err(Error::resource(format!(
            "F{k} up to n={n_max} needs more than {STATE_BUDGET} DP states; lower --max-n"
        )));
    }
    if sphere_size_free(k, n_max).bits() < 127 {
        Ok(run_dp::<u128>(k, n_max))
    } else {
        Ok(run_dp::<BigUint>(k, n_max))
    }
}

fn run_dp<T: Count>(k: usize, n_max: usize) -> Vec<SphereCensus> {
    let group = GroupId::Free { rank: k };
    let letters = 2 * k;
    let grid = Grid::new(k, n_max.max(1));
    let origin = grid.cells / 2;
    let mut out = vec![SphereCensus {
        group,
        n: 0,
        total: BigUint::one(),
        ab_counts: BTreeMap::from([(LatticeVector::zero(k), BigUint::one())]),
    }];
    if n_max == 0 {
        return out;
    }

    // Offset of v − e(x) from v, for each letter x.
    let back: Vec<isize> = (0..letters as u8)
        .map(|c| {
            let l = Letter::from_code(c);
            let s = grid.stride(l.generator()) as isize;
            if l.is_inverse() { s } else { -s }
        })
        .collect();

    let mut layer = vec![T::zero(); grid.cells * letters];
    for (x, &off) in back.iter().enumerate() {
        let v = (origin as isize - off) as usize;
        layer[v * letters + x] = T::unit();
    }
    out.push(layer_census(&grid, group, 1, &layer, letters));

    for n in 2..=n_max {
        let prev = &layer;
        let mut next = vec![T::zero(); grid.cells * letters];
        next.par_chunks_mut(letters).enumerate().for_each(|(v, slot)| {
            let coords = grid.decode(v);
            let l1: u64 = coords.iter().map(|c| c.unsigned_abs()).sum();
            if l1 > n as u64 || (l1 + n as u64) % 2 == 1 {
                return;
            }
            for (x, cell) in slot.iter_mut().enumerate() {
                let l = Letter::from_code(x as u8);
                let g = l.generator();
                // v − e(x) must stay on the grid.
                let c = coords[g] + if l.is_inverse() { 1 } else { -1 };
                if c.unsigned_abs() as usize > grid.radius {
                    continue;
                }
                let u = (v as isize + back[x]) as usize;
                let row = &prev[u * letters..(u + 1) * letters];
                let inv = x ^ 1;
                let sum = row.iter().fold(T::zero(), |acc, y| acc + y);
                *cell = sum - &row[inv];
            }
        });
        layer = next;
        out.push(layer_census(&grid, group, n, &layer, letters));
    }
    out
}

fn layer_census<T: Count>(grid: &Grid, group: GroupId, n: usize, layer: &[T], letters: usize) -> SphereCensus {
    let mut ab_counts = BTreeMap::new();
    let mut total = BigUint::zero();
    for (v, row) in layer.chunks(letters).enumerate() {
        let c = row.iter().fold(T::zero(), |acc, y| acc + y).into_big();
        if !c.is_zero() {
            total += &c;
            ab_counts.insert(LatticeVector(grid.decode(v)), c);
        }
    }
    SphereCensus { group, n, total, ab_counts }
}

/// Census of F_k spheres by listing every reduced word; the oracle for the DP.
pub fn enumerate_census_free(k: usize, n_max: usize) -> Result<Vec<SphereCensus>> {
    if k < 2 {
        return Err(Error::arg("free group rank must be at least 2"));
    }
    if sphere_size_free(k, n_max) > BigUint::from(20_000_000u32) {
        return Err(Error::resource("exhaustive free-group enumeration limited to 2·10⁷ words per sphere"));
    }
    Ok((0..=n_max)
        .map(|n| {
            let mut ab_counts: BTreeMap<LatticeVector, BigUint> = BTreeMap::new();
            let words = reduced_words(k, n);
            for w in &words {
                *ab_counts.entry(w.abelianize(k)).or_default() += 1u32;
            }
            SphereCensus { group: GroupId::Free { rank: k }, n, total: BigUint::from(words.len()), ab_counts }
        })
        .collect())
}

/// Fraction of visible elements on the sphere (0 on the trivial sphere).
pub fn visible_fraction(census: &SphereCensus) -> f64 {
    census.visible_fraction()
}

fn check_consecutive(prev: &SphereCensus, cur: &SphereCensus) -> Result<()> {
    if prev.group != cur.group {
        return Err(Error::arg("censuses come from different groups"));
    }
    if prev.n + 1 != cur.n {
        return Err(Error::arg(format!("radii {} and {} are not consecutive", prev.n, cur.n)));
    }
    Ok(())
}

/// ½(visible fraction at n−1 + visible fraction at n).
pub fn annular_estimate(prev: &SphereCensus, cur: &SphereCensus) -> Result<f64> {
    check_consecutive(prev, cur)?;
    Ok(0.5 * (prev.visible_fraction() + cur.visible_fraction()))
}

/// Distribution on abelianization vectors averaging two adjacent spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPn {
    pub n: usize,
    /// Keyed by the raw vector α; the support point is α/√n.
    pub weights: BTreeMap<LatticeVector, f64>,
}

impl EmpiricalPn {
    pub fn total_weight(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn weight(&self, alpha: &LatticeVector) -> f64 {
        self.weights.get(alpha).copied().unwrap_or(0.0)
    }

    /// Support points scaled by 1/√n.
    pub fn scaled_support(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        let s = (self.n as f64).sqrt();
        self.weights
            .iter()
            .map(move |(a, &w)| (a.coords().iter().map(|&x| x as f64 / s).collect(), w))
    }
}

pub fn empirical_pn(prev: &SphereCensus, cur: &SphereCensus) -> Result<EmpiricalPn> {
    check_consecutive(prev, cur)?;
    if prev.total.is_zero() || cur.total.is_zero() {
        return Err(Error::arg("empirical p_n needs nonempty spheres"));
    }
    let mut weights: BTreeMap<LatticeVector, f64> = BTreeMap::new();
    for census in [prev, cur] {
        for (alpha, c) in &census.ab_counts {
            *weights.entry(alpha.clone()).or_default() += 0.5 * ratio(c, &census.total);
        }
    }
    Ok(EmpiricalPn { n: cur.n, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::zeta;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector(c.to_vec())
    }

    #[test]
    fn sphere_sizes() {
        assert_eq!(sphere_size_free(2, 0), BigUint::one());
        assert_eq!(sphere_size_free(2, 1), BigUint::from(4u32));
        assert_eq!(sphere_size_free(2, 2), BigUint::from(12u32));
        assert_eq!(sphere_size_free(2, 3), BigUint::from(36u32));
    }

    #[test]
    fn small_censuses() {
        let c = abelian_census_free(2, 3).unwrap();
        let n1 = &c[1];
        for a in [v(&[1, 0]), v(&[-1, 0]), v(&[0, 1]), v(&[0, -1])] {
            assert_eq!(n1.count(&a), BigUint::one());
        }
        let n2 = &c[2];
        assert_eq!(n2.count(&v(&[1, 1])), BigUint::from(2u32));
        assert_eq!(n2.count(&v(&[2, 0])), BigUint::one());
        assert_eq!(n2.visible_count(), BigUint::from(8u32));
        assert_eq!(c[3].total, BigUint::from(36u32));
        assert!((visible_fraction(n2) - 8.0 / 12.0).abs() < 1e-15);
        assert_eq!(visible_fraction(n1), 1.0);
        assert_eq!(visible_fraction(&c[0]), 0.0);
    }

    #[test]
    fn dp_matches_exhaustive_enumeration() {
        for k in 2..=3 {
            let n_max = if k == 2 { 8 } else { 6 };
            let dp = abelian_census_free(k, n_max).unwrap();
            let brute = enumerate_census_free(k, n_max).unwrap();
            assert_eq!(dp, brute, "k={k}");
        }
    }

    #[test]
    fn censuses_satisfy_invariants() {
        for (k, n_max) in [(2, 30), (3, 12), (4, 6)] {
            for c in abelian_census_free(k, n_max).unwrap() {
                c.check_invariants().unwrap();
                assert_eq!(c.total, sphere_size_free(k, c.n));
            }
        }
    }

    #[test]
    fn big_integer_path_agrees_with_u128() {
        let small = run_dp::<u128>(2, 20);
        let big = run_dp::<BigUint>(2, 20);
        assert_eq!(small, big);
        // 2^127 is passed around n = 80 for k = 2.
        let c = abelian_census_free(2, 81).unwrap();
        assert_eq!(c[81].total, sphere_size_free(2, 81));
        c[81].check_invariants().unwrap();
    }

    #[test]
    fn annular_examples() {
        let c = abelian_census_free(2, 2).unwrap();
        assert!((annular_estimate(&c[1], &c[2]).unwrap() - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-15);
        assert_eq!(annular_estimate(&c[0], &c[1]).unwrap(), 0.5);
        assert!(annular_estimate(&c[0], &c[2]).is_err());
    }

    #[test]
    fn annular_estimate_near_limit_at_sixty() {
        let c = abelian_census_free(2, 60).unwrap();
        let a = annular_estimate(&c[59], &c[60]).unwrap();
        assert!((a - 1.0 / zeta(2, 1e-12).unwrap()).abs() < 0.03, "annular {a}");
    }

    #[test]
    fn pn_examples() {
        let c = abelian_census_free(2, 2).unwrap();
        let p1 = empirical_pn(&c[0], &c[1]).unwrap();
        assert_eq!(p1.weight(&v(&[0, 0])), 0.5);
        for a in [v(&[1, 0]), v(&[-1, 0]), v(&[0, 1]), v(&[0, -1])] {
            assert_eq!(p1.weight(&a), 0.125);
        }
        let p2 = empirical_pn(&c[1], &c[2]).unwrap();
        assert!((p2.total_weight() - 1.0).abs() < 1e-12);
        for (a, w) in &p2.weights {
            assert_eq!(p2.weight(&-a), *w);
        }
        assert!(empirical_pn(&c[0], &c[2]).is_err());
        let c40 = abelian_census_free(2, 40).unwrap();
        let p = empirical_pn(&c40[39], &c40[40]).unwrap();
        assert!((p.total_weight() - 1.0).abs() < 1e-12);
        assert_eq!(p.scaled_support().count(), p.weights.len());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(abelian_census_free(6, 40), Err(Error::Resource(_))));
        assert!(matches!(abelian_census_free(1, 4), Err(Error::Argument(_))));
    }
}
