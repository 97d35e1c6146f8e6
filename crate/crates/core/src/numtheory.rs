//! Möbius function, gcd classes and ζ(r).

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// μ(1..=limit) from a linear sieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTable {
    // values[0] is unused padding so that values[n] = μ(n).
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    /// μ(n) for 1 ≤ n ≤ limit.
    ///
    /// Panics when n is 0 or beyond the sieve limit.
    pub fn mu(&self, n: usize) -> i8 {
        assert!(n >= 1 && n <= self.limit(), "μ({n}) outside sieve range");
        self.values[n]
    }

    /// μ(1), μ(2), ..., μ(limit).
    pub fn values(&self) -> &[i8] {
        &self.values[1..]
    }
}

pub fn mobius_sieve(limit: usize) -> Result<MobiusTable> {
    if limit == 0 {
        return Err(Error::arg("Möbius sieve limit must be at least 1"));
    }
    let mut values = vec![0i8; limit + 1];
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    values[1] = 1;
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            values[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > limit {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                values[m] = 0;
                break;
            }
            values[m] = -values[i];
        }
    }
    Ok(MobiusTable { values })
}

/// The gcd of a lattice vector: a positive integer, or infinity for the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GcdClass {
    Finite(u64),
    Infinity,
}

impl GcdClass {
    /// Maps the raw gcd value to a class; gcd 0 only arises from all-zero input.
    pub fn from_raw(g: u64) -> Self {
        if g == 0 {
            GcdClass::Infinity
        } else {
            GcdClass::Finite(g)
        }
    }

    pub fn is_visible(self) -> bool {
        self == GcdClass::Finite(1)
    }

    /// Divisibility extended to infinity: every class divides infinity and
    /// infinity divides only itself.
    pub fn divides(self, other: GcdClass) -> bool {
        match (self, other) {
            (_, GcdClass::Infinity) => true,
            (GcdClass::Infinity, GcdClass::Finite(_)) => false,
            (GcdClass::Finite(a), GcdClass::Finite(b)) => b % a == 0,
        }
    }
}

impl Ord for GcdClass {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GcdClass::Finite(a), GcdClass::Finite(b)) => a.cmp(b),
            (GcdClass::Finite(_), GcdClass::Infinity) => Ordering::Less,
            (GcdClass::Infinity, GcdClass::Finite(_)) => Ordering::Greater,
            (GcdClass::Infinity, GcdClass::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for GcdClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GcdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GcdClass::Finite(g) => write!(f, "{g}"),
            GcdClass::Infinity => f.write_str("inf"),
        }
    }
}

/// gcd of the absolute values of the coordinates.
pub fn gcd_vec(v: &[i64]) -> Result<GcdClass> {
    if v.is_empty() {
        return Err(Error::arg("gcd of an empty tuple"));
    }
    Ok(GcdClass::from_raw(raw_gcd(v)))
}

pub(crate) fn raw_gcd(v: &[i64]) -> u64 {
    v.iter()
        .fold(0u64, |g, &x| if g == 1 { 1 } else { g.gcd(&x.unsigned_abs()) })
}

/// ζ(r) to within `precision`.
///
/// Even r ≤ 6 use the closed forms. Other r sum the series to N and add the
/// Euler–Maclaurin tail N^{1−r}/(r−1) − N^{−r}/2, whose remainder is below
/// r·N^{−r−1}/12; N is the smallest value pushing that bound under half the
/// requested precision.
pub fn zeta(r: u32, precision: f64) -> Result<f64> {
    if r < 2 {
        return Err(Error::arg(format!("ζ({r}) diverges; need r ≥ 2")));
    }
    if !(precision > 0.0 && precision <= 1e-6) {
        return Err(Error::arg(format!(
            "ζ precision must lie in (0, 1e-6], got {precision}"
        )));
    }
    match r {
        2 => return Ok(PI.powi(2) / 6.0),
        4 => return Ok(PI.powi(4) / 90.0),
        6 => return Ok(PI.powi(6) / 945.0),
        _ => {}
    }
    let rf = f64::from(r);
    let remainder = |n: f64| rf / 12.0 * n.powf(-(rf + 1.0));
    let mut n = ((rf / (6.0 * precision)).powf(1.0 / (rf + 1.0))).ceil().max(1.0);
    while remainder(n) >= precision / 2.0 {
        n += 1.0;
    }
    let n = n as u64;
    // Smallest terms first.
    let partial: f64 = (1..=n).rev().map(|m| (m as f64).powf(-rf)).sum();
    let nf = n as f64;
    Ok(partial + nf.powf(1.0 - rf) / (rf - 1.0) - 0.5 * nf.powf(-rf))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
