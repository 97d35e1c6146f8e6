//! Exact counting of ℤ^r points by gcd class and parity.
//!
//! Brute-force routes enumerate one closed orthant and weight each point by
//! 2^(number of nonzero coordinates); every quantity counted here (norms,
//! gcd, parity of the l1 norm) is invariant under coordinate sign flips.
//! Möbius routes use homogeneity of the l1 and l∞ norms instead.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numtheory::{binomial, mobius_sieve, raw_gcd, GcdClass};

/// Cap on brute-force enumeration work, in lattice cells.
pub const CELL_BUDGET: u128 = 1_000_000_000;

/// A point of ℤ^r.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, axis: usize, sign: i64) -> Self {
        let mut v = vec![0; rank];
        v[axis] = sign;
        LatticeVector(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).sum()
    }

    pub fn linf(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn l2sq(&self) -> u128 {
        self.0.iter().map(|&x| (x as i128 * x as i128) as u128).sum()
    }

    /// Parity of the l1 norm, which equals the parity of the coordinate sum.
    pub fn l1_parity(&self) -> u8 {
        (self.l1() % 2) as u8
    }

    pub fn gcd_class(&self) -> GcdClass {
        GcdClass::from_raw(raw_gcd(&self.0))
    }

    pub fn is_visible(&self) -> bool {
        raw_gcd(&self.0) == 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;

    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;

    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.rank(), rhs.rank());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;

    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        self + &(-rhs)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Which l_p norm bounds the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    /// Exact test of ‖x‖_p ≤ n.
    pub fn contains(self, v: &LatticeVector, n: u64) -> bool {
        match self {
            Norm::L1 => v.l1() <= n,
            Norm::L2 => v.l2sq() <= u128::from(n) * u128::from(n),
            Norm::Linf => v.linf() <= n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" | "l-inf" => Ok(Norm::Linf),
            other => Err(Error::arg(format!("unknown norm {other:?}"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Number of lattice points in the closed ball of radius `radius`.
pub fn ball_count(rank: usize, norm: Norm, radius: u64) -> Result<BigUint> {
    if rank == 0 {
        return Err(Error::arg("rank must be at least 1"));
    }
    match norm {
        Norm::Linf => Ok(BigUint::from(2 * radius + 1).pow(rank as u32)),
        Norm::L1 => Ok(l1_ball_closed_form(rank as u64, radius)),
        Norm::L2 => {
            check_budget(rank, radius)?;
            Ok(BigUint::from(enumerate_ball(rank, Norm::L2, radius).total()))
        }
    }
}

fn l1_ball_closed_form(rank: u64, radius: u64) -> BigUint {
    (0..=rank.min(radius))
        .map(|i| (BigUint::one() << i) * binomial(rank, i) * binomial(radius, i))
        .sum()
}

fn check_budget(rank: usize, radius: u64) -> Result<()> {
    let cells = (2 * u128::from(radius) + 1)
        .checked_pow(rank as u32)
        .and_then(|c| c.checked_mul(rank as u128));
    match cells {
        Some(c) if c <= CELL_BUDGET => Ok(()),
        _ => Err(Error::resource(format!(
            "enumerating the rank-{rank} ball of radius {radius} exceeds {CELL_BUDGET} cells; \
             use the Möbius counter (l1/linf) instead"
        ))),
    }
}

/// Raw tallies from one pass over a ball: `by_gcd[g]` counts points with raw
/// gcd g (index 0 holds the origin).
#[derive(Debug, Clone, Default)]
struct BallTally {
    by_gcd: Vec<u64>,
    even_visible: u64,
}

impl BallTally {
    fn new(radius: u64) -> Self {
        BallTally { by_gcd: vec![0; radius as usize + 1], even_visible: 0 }
    }

    fn total(&self) -> u64 {
        self.by_gcd.iter().sum()
    }

    fn merge(mut self, other: BallTally) -> BallTally {
        for (a, b) in self.by_gcd.iter_mut().zip(other.by_gcd) {
            *a += b;
        }
        self.even_visible += other.even_visible;
        self
    }
}

/// Walks coordinates 1.. of the non-negative orthant below a fixed first coordinate.
struct OrthantWalk {
    rank: usize,
    norm: Norm,
    radius: u64,
}

impl OrthantWalk {
    fn visit(&self, tally: &mut BallTally, depth: usize, g: u64, l1: u64, l2: u128, weight: u64) {
        let n = self.radius;
        let max_x = match self.norm {
            Norm::Linf => n,
            Norm::L1 => n - l1,
            Norm::L2 => isqrt(u128::from(n) * u128::from(n) - l2),
        };
        if depth + 1 == self.rank {
            for x in 0..=max_x {
                let w = if x == 0 { weight } else { 2 * weight };
                let gx = if g == 1 { 1 } else { g.gcd(&x) };
                tally.by_gcd[gx as usize] += w;
                if gx == 1 && (l1 + x).is_multiple_of(2) {
                    tally.even_visible += w;
                }
            }
            return;
        }
        for x in 0..=max_x {
            let w = if x == 0 { weight } else { 2 * weight };
            let gx = if g == 1 { 1 } else { g.gcd(&x) };
            let x2 = u128::from(x) * u128::from(x);
            self.visit(tally, depth + 1, gx, l1 + x, l2 + x2, w);
        }
    }
}

fn isqrt(v: u128) -> u64 {
    let mut r = (v as f64).sqrt() as u128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r as u64
}

fn enumerate_ball(rank: usize, norm: Norm, radius: u64) -> BallTally {
    let walk = OrthantWalk { rank, norm, radius };
    (0..=radius)
        .into_par_iter()
        .map(|x| {
            let mut tally = BallTally::new(radius);
            let w = if x == 0 { 1 } else { 2 };
            let x2 = u128::from(x) * u128::from(x);
            if norm == Norm::L2 && x2 > u128::from(radius) * u128::from(radius) {
                return tally;
            }
            if rank == 1 {
                tally.by_gcd[x as usize] += w;
                return tally;
            }
            walk.visit(&mut tally, 1, x, x, x2, w);
            tally
        })
        .reduce(|| BallTally::new(radius), BallTally::merge)
}

/// Exact counts of ball points per gcd class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdCensus {
    pub rank: usize,
    pub norm: Norm,
    pub radius: u64,
    /// Only nonzero classes are stored.
    pub counts: BTreeMap<GcdClass, u64>,
}

impl GcdCensus {
    pub fn count(&self, class: GcdClass) -> u64 {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn visible(&self) -> u64 {
        self.count(GcdClass::Finite(1))
    }
}

pub fn gcd_census(rank: usize, norm: Norm, radius: u64) -> Result<GcdCensus> {
    if rank < 2 {
        return Err(Error::arg("gcd census needs rank ≥ 2"));
    }
    check_budget(rank, radius)?;
    let tally = enumerate_ball(rank, norm, radius);
    let counts = tally
        .by_gcd
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(g, &c)| (GcdClass::from_raw(g as u64), c))
        .collect();
    Ok(GcdCensus { rank, norm, radius, counts })
}

/// Number of t-visible points in the ball, by Möbius inversion over
/// dilations: Σ_{d ≤ n/t} μ(d)·(ball(⌊n/(td)⌋) − 1).
pub fn visible_count_mobius(rank: usize, norm: Norm, radius: u64, t: u64) -> Result<BigInt> {
    if rank < 2 {
        return Err(Error::arg("Möbius count needs rank ≥ 2"));
    }
    if t == 0 {
        return Err(Error::arg("t must be a positive integer"));
    }
    if norm == Norm::L2 {
        return Err(Error::Unsupported(
            "l2 balls have no integer-radius dilation identity; use the brute counter".into(),
        ));
    }
    let top = radius / t;
    if top == 0 {
        return Ok(BigInt::zero());
    }
    let mu = mobius_sieve(top as usize)?;
    let mut acc = BigInt::zero();
    for d in 1..=top {
        let m = mu.mu(d as usize);
        if m == 0 {
            continue;
        }
        let inner = BigInt::from(ball_count(rank, norm, radius / (t * d))?) - 1;
        if m > 0 {
            acc += inner;
        } else {
            acc -= inner;
        }
    }
    Ok(acc)
}

/// Count of visible ball points with even l1 norm.
pub fn even_visible_count(rank: usize, norm: Norm, radius: u64) -> Result<u64> {
    if rank < 2 {
        return Err(Error::arg("rank must be at least 2"));
    }
    check_budget(rank, radius)?;
    Ok(enumerate_ball(rank, norm, radius).even_visible)
}

pub fn even_visible_fraction(rank: usize, norm: Norm, radius: u64) -> Result<f64> {
    let even = even_visible_count(rank, norm, radius)?;
    let ball = ball_count(rank, norm, radius)?;
    Ok(even as f64 / ball.to_f64().unwrap_or(f64::INFINITY))
}

/// Even-l1 visible count by Möbius inversion (l1 and l∞ only).
///
/// For odd d, d·y has the l1 parity of y; for even d every multiple has even
/// l1 norm. So the count is Σ_d μ(d)·(E(⌊n/d⌋) − 1) with E the even-norm ball
/// count for odd d and the full ball count for even d.
pub fn even_visible_count_mobius(rank: usize, norm: Norm, radius: u64) -> Result<BigInt> {
    if rank < 2 {
        return Err(Error::arg("rank must be at least 2"));
    }
    if norm == Norm::L2 {
        return Err(Error::Unsupported("l2 balls have no dilation identity".into()));
    }
    if radius == 0 {
        return Ok(BigInt::zero());
    }
    let even_ball = even_ball_counts(rank, norm, radius);
    let mu = mobius_sieve(radius as usize)?;
    let mut acc = BigInt::zero();
    for d in 1..=radius {
        let m = mu.mu(d as usize);
        if m == 0 {
            continue;
        }
        let m_rad = radius / d;
        let base = if d % 2 == 1 {
            even_ball[m_rad as usize].clone()
        } else {
            ball_count(rank, norm, m_rad)?
        };
        let inner = BigInt::from(base) - 1;
        if m > 0 {
            acc += inner;
        } else {
            acc -= inner;
        }
    }
    Ok(acc)
}

/// even_ball[m] = points of even l1 norm in the ball of radius m, m = 0..=radius.
fn even_ball_counts(rank: usize, norm: Norm, radius: u64) -> Vec<BigUint> {
    match norm {
        Norm::Linf => (0..=radius)
            .map(|m| {
                // Σ_{x∈[−m,m]} (−1)^x = (−1)^m, so the signed count is (−1)^{m·r}.
                let cube = BigUint::from(2 * m + 1).pow(rank as u32);
                if (m * rank as u64).is_multiple_of(2) {
                    (cube + 1u32) >> 1
                } else {
                    (cube - 1u32) >> 1
                }
            })
            .collect(),
        Norm::L1 => {
            let mut out = Vec::with_capacity(radius as usize + 1);
            let mut acc = BigUint::zero();
            let mut prev = BigUint::zero();
            for m in 0..=radius {
                let ball = l1_ball_closed_form(rank as u64, m);
                if m % 2 == 0 {
                    acc += &ball - &prev;
                }
                prev = ball;
                out.push(acc.clone());
            }
            out
        }
        Norm::L2 => unreachable!("filtered by caller"),
    }
}

/// Visible points of [0,n]^k classified by their number of odd coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCensus {
    pub n: u64,
    pub rank: usize,
    /// `table[i]` = visible points with exactly i odd coordinates, i = 0..=k.
    pub table: Vec<u64>,
    /// Visible points with even coordinate sum.
    pub u1ev: u64,
}

impl ParityCensus {
    pub fn visible_total(&self) -> u64 {
        self.table.iter().sum()
    }

    /// Count for one fixed choice of which i coordinates are odd.
    pub fn pattern_count(&self, odd: usize) -> f64 {
        let c = binomial(self.rank as u64, odd as u64).to_f64().unwrap_or(f64::NAN);
        self.table[odd] as f64 / c
    }

    /// max over 1 ≤ i ≤ k of |pattern(i) / pattern(k) − 1|.
    pub fn max_pattern_deviation(&self) -> f64 {
        let all_odd = self.pattern_count(self.rank);
        (1..=self.rank)
            .map(|i| (self.pattern_count(i) / all_odd - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn from_table(n: u64, rank: usize, table: Vec<u64>) -> Self {
        let u1ev = table.iter().enumerate().filter(|(i, _)| i % 2 == 0).map(|(_, &c)| c).sum();
        ParityCensus { n, rank, table, u1ev }
    }
}

pub fn parity_census(rank: usize, n: u64) -> Result<ParityCensus> {
    if rank < 2 {
        return Err(Error::arg("parity census needs k ≥ 2"));
    }
    let cells = (u128::from(n) + 1).checked_pow(rank as u32);
    if !matches!(cells, Some(c) if c <= CELL_BUDGET) {
        return Err(Error::resource(format!(
            "[0,{n}]^{rank} exceeds {CELL_BUDGET} cells; use parity_census_mobius"
        )));
    }

    fn walk(rank: usize, n: u64, depth: usize, g: u64, odd: usize, table: &mut [u64]) {
        for x in 0..=n {
            let gx = if g == 1 { 1 } else { g.gcd(&x) };
            let o = odd + (x % 2) as usize;
            if depth + 1 == rank {
                if gx == 1 {
                    table[o] += 1;
                }
            } else {
                walk(rank, n, depth + 1, gx, o, table);
            }
        }
    }

    let table = (0..=n)
        .into_par_iter()
        .map(|x| {
            let mut t = vec![0u64; rank + 1];
            walk(rank, n, 1, x, (x % 2) as usize, &mut t);
            t
        })
        .reduce(
            || vec![0u64; rank + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(ParityCensus::from_table(n, rank, table))
}

/// Parity census by Möbius inversion over odd dilations.
///
/// A point with an odd coordinate has odd gcd, and dividing by an odd d keeps
/// every coordinate's parity, so
/// table[i] = C(k,i) Σ_{d odd} μ(d) O(⌊n/d⌋)^i E(⌊n/d⌋)^{k−i}
/// where O(m), E(m) count the odd and even integers in [0,m].
pub fn parity_census_mobius(rank: usize, n: u64) -> Result<ParityCensus> {
    if rank < 2 {
        return Err(Error::arg("parity census needs k ≥ 2"));
    }
    let fits = (u128::from(n) + 1).checked_pow(rank as u32).is_some_and(|c| c < u128::from(u64::MAX));
    if !fits {
        return Err(Error::resource("parity census counts would overflow 64 bits"));
    }
    let mut table = vec![0u64; rank + 1];
    if n == 0 {
        return Ok(ParityCensus::from_table(n, rank, table));
    }
    let mu = mobius_sieve(n as usize)?;
    for (i, slot) in table.iter_mut().enumerate().skip(1) {
        let mut acc = 0i128;
        for d in (1..=n).step_by(2) {
            let m = mu.mu(d as usize);
            if m == 0 {
                continue;
            }
            let q = n / d;
            let odd = i128::from(q.div_ceil(2));
            let even = i128::from(q / 2 + 1);
            acc += i128::from(m) * odd.pow(i as u32) * even.pow((rank - i) as u32);
        }
        let c = binomial(rank as u64, i as u64).to_i128().expect("small binomial");
        *slot = u64::try_from(acc * c).expect("non-negative count");
    }
    Ok(ParityCensus::from_table(n, rank, table))
}

/// Which gcd class a measured set consists of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisibilityClass {
    /// Points with coordinate gcd exactly this value.
    pub gcd: u64,
}

impl VisibilityClass {
    pub const VISIBLE: VisibilityClass = VisibilityClass { gcd: 1 };

    pub fn t_visible(t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::arg("t-visibility needs t ≥ 1"));
        }
        Ok(VisibilityClass { gcd: t })
    }
}

/// A nice bounded open region of ℝ^r with rational parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaSpec {
    /// Open box Π (lo_i, hi_i).
    Box { lo: Vec<Rational64>, hi: Vec<Rational64> },
    /// Open Euclidean ball.
    Ball { center: Vec<Rational64>, radius: Rational64 },
}

impl OmegaSpec {
    pub fn unit_box(rank: usize) -> Self {
        OmegaSpec::Box { lo: vec![Rational64::zero(); rank], hi: vec![Rational64::one(); rank] }
    }

    pub fn rank(&self) -> usize {
        match self {
            OmegaSpec::Box { lo, .. } => lo.len(),
            OmegaSpec::Ball { center, .. } => center.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            OmegaSpec::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::arg("box needs one (lo, hi) pair per axis"));
                }
                if lo.iter().zip(hi).any(|(a, b)| a >= b) {
                    return Err(Error::arg("box axis with lo ≥ hi is empty"));
                }
            }
            OmegaSpec::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::arg("ball needs a center"));
                }
                if !radius.is_positive() {
                    return Err(Error::arg("ball radius must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        let f = |q: &Rational64| *q.numer() as f64 / *q.denom() as f64;
        match self {
            OmegaSpec::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| f(b) - f(a)).product(),
            OmegaSpec::Ball { center, radius } => {
                unit_ball_volume(center.len()) * f(radius).powi(center.len() as i32)
            }
        }
    }
}

impl FromStr for OmegaSpec {
    type Err = Error;

    /// `box:LO..HI,LO..HI,...` or `ball:C1,C2,...@R`; numbers are integers or `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_q = |t: &str| -> Result<Rational64> {
            let t = t.trim();
            if t.contains("inf") {
                return Err(Error::arg("Ω must be bounded"));
            }
            t.parse::<Rational64>().map_err(|_| Error::arg(format!("bad rational {t:?}")))
        };
        let omega = if let Some(rest) = s.strip_prefix("box:") {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for axis in rest.split(',') {
                let (a, b) = axis
                    .split_once("..")
                    .ok_or_else(|| Error::arg(format!("box axis {axis:?} is not LO..HI")))?;
                lo.push(parse_q(a)?);
                hi.push(parse_q(b)?);
            }
            OmegaSpec::Box { lo, hi }
        } else if let Some(rest) = s.strip_prefix("ball:") {
            let (c, r) =
                rest.split_once('@').ok_or_else(|| Error::arg("ball spec is C1,C2,...@R"))?;
            let center = c.split(',').map(parse_q).collect::<Result<Vec<_>>>()?;
            OmegaSpec::Ball { center, radius: parse_q(r)? }
        } else {
            return Err(Error::arg(format!("unknown region {s:?}; expected box:... or ball:...")));
        };
        omega.validate()?;
        Ok(omega)
    }
}

fn unit_ball_volume(rank: usize) -> f64 {
    match rank {
        0 => 1.0,
        1 => 2.0,
        r => 2.0 * std::f64::consts::PI / r as f64 * unit_ball_volume(r - 2),
    }
}

/// μ_{t,S}(Ω) = #(S ∩ tΩ) / t^r.
pub fn measure_ratio(
    class: VisibilityClass,
    omega: &OmegaSpec,
    rank: usize,
    scale: Rational64,
) -> Result<f64> {
    let count = measure_count(class, omega, rank, scale)?;
    let t = *scale.numer() as f64 / *scale.denom() as f64;
    Ok(count as f64 / t.powi(rank as i32))
}

/// #(S ∩ tΩ) by enumeration of the bounding box.
pub fn measure_count(
    class: VisibilityClass,
    omega: &OmegaSpec,
    rank: usize,
    scale: Rational64,
) -> Result<u64> {
    omega.validate()?;
    if omega.rank() != rank {
        return Err(Error::arg(format!("Ω has dimension {} but rank is {rank}", omega.rank())));
    }
    if !scale.is_positive() {
        return Err(Error::arg("scale t must be positive"));
    }
    if class.gcd == 0 {
        return Err(Error::arg("t-visibility needs t ≥ 1"));
    }
    let sq = |q: Rational64| Ratio128::from(q);
    let t = sq(scale);
    // Integers strictly inside (a, b).
    let open_range = |a: Ratio128, b: Ratio128| -> (i64, i64) {
        (a.floor_i64() + 1, b.ceil_i64() - 1)
    };
    let ranges: Vec<(i64, i64)> = match omega {
        OmegaSpec::Box { lo, hi } => lo
            .iter()
            .zip(hi)
            .map(|(a, b)| open_range(sq(*a).mul(t), sq(*b).mul(t)))
            .collect(),
        OmegaSpec::Ball { center, radius } => center
            .iter()
            .map(|c| {
                let tc = sq(*c).mul(t);
                let tr = sq(*radius).mul(t);
                open_range(tc.sub(tr), tc.add(tr))
            })
            .collect(),
    };
    let mut cells: u128 = 1;
    for &(a, b) in &ranges {
        if b < a {
            return Ok(0);
        }
        cells = cells.saturating_mul((b - a + 1) as u128);
    }
    if cells.saturating_mul(rank as u128) > CELL_BUDGET {
        return Err(Error::resource(format!("tΩ spans {cells} cells, above the enumeration budget")));
    }

    // Ball membership over a common denominator: Σ (D x_i − C_i)² < R².
    let ball = match omega {
        OmegaSpec::Ball { center, radius } => {
            let tcs: Vec<Ratio128> = center.iter().map(|c| sq(*c).mul(t)).collect();
            let tr = sq(*radius).mul(t);
            let den = tcs.iter().fold(tr.den, |acc, q| acc.lcm(&q.den));
            let cs: Vec<i128> = tcs.iter().map(|q| q.num * (den / q.den)).collect();
            let r = tr.num * (den / tr.den);
            Some((den, cs, r * r))
        }
        OmegaSpec::Box { .. } => None,
    };

    let target = class.gcd;
    let (first_lo, first_hi) = ranges[0];
    let total = (first_lo..=first_hi)
        .into_par_iter()
        .map(|x0| {
            let mut count = 0u64;
            let mut point = vec![0i64; rank];
            point[0] = x0;
            fill(&ranges, 1, &mut point, &mut |p| {
                if let Some((den, cs, r2)) = &ball {
                    let d2: i128 = p.iter().zip(cs).map(|(&x, c)| (i128::from(x) * den - c).pow(2)).sum();
                    if d2 >= *r2 {
                        return;
                    }
                }
                if raw_gcd(p) == target {
                    count += 1;
                }
            });
            count
        })
        .sum();
    Ok(total)
}

fn fill(ranges: &[(i64, i64)], depth: usize, point: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if depth == ranges.len() {
        f(point);
        return;
    }
    for x in ranges[depth].0..=ranges[depth].1 {
        point[depth] = x;
        fill(ranges, depth + 1, point, f);
    }
}

/// Small exact rational over i128 for scaled region bounds.
#[derive(Debug, Clone, Copy)]
struct Ratio128 {
    num: i128,
    den: i128,
}

impl From<Rational64> for Ratio128 {
    fn from(q: Rational64) -> Self {
        Ratio128 { num: i128::from(*q.numer()), den: i128::from(*q.denom()) }
    }
}

impl Ratio128 {
    fn norm(num: i128, den: i128) -> Self {
        let g = num.gcd(&den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ratio128 { num: s * num / g, den: s * den / g }
    }

    fn mul(self, o: Self) -> Self {
        Self::norm(self.num * o.num, self.den * o.den)
    }

    fn add(self, o: Self) -> Self {
        Self::norm(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn sub(self, o: Self) -> Self {
        self.add(Ratio128 { num: -o.num, den: o.den })
    }

    fn floor_i64(self) -> i64 {
        self.num.div_euclid(self.den) as i64
    }

    fn ceil_i64(self) -> i64 {
        -((-self.num).div_euclid(self.den)) as i64
    }
}
