//! Limit densities, mapping ratios and the homogeneous-equation decider.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::census::{ratio, GroupId, SphereCensus};
use crate::error::{Error, Result};
use crate::lattice::{gcd_census, LatticeVector, Norm};
use crate::numtheory::{zeta, GcdClass};
use crate::words::GroupWord;

/// Limits of visible fractions on even spheres, odd spheres and annuli for a
/// group with abelianization ℤ^r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaLimits {
    pub r: u32,
    pub even: f64,
    pub odd: f64,
    pub annular: f64,
}

impl BetaLimits {
    /// The even limit for parity 0, the odd one for parity 1.
    pub fn for_parity(&self, parity: usize) -> f64 {
        if parity.is_multiple_of(2) {
            self.even
        } else {
            self.odd
        }
    }
}

pub fn beta_limits(r: u32) -> Result<BetaLimits> {
    if r < 2 {
        return Err(Error::arg(format!("β limits need rank ≥ 2, got {r}")));
    }
    let z = zeta(r, 1e-12)?;
    let p = 2f64.powi(r as i32);
    Ok(BetaLimits {
        r,
        even: (p - 2.0) / ((p - 1.0) * z),
        odd: p / ((p - 1.0) * z),
        annular: 1.0 / z,
    })
}

fn rational_to_f64(q: &BigRational) -> f64 {
    let v = ratio(q.numer().magnitude(), q.denom().magnitude());
    if q.is_negative() {
        -v
    } else {
        v
    }
}

/// v ∈ ℤ^k is an image of u ∈ ℤ^n under some homomorphism iff gcd(u) | gcd(v),
/// where the zero vector has gcd ∞.
fn is_image(u: GcdClass, v: GcdClass) -> bool {
    u.divides(v)
}

/// Exact fraction of pairs (u, v) in B_n(s) × B_k(t) with v a homomorphic image of u.
pub fn mapping_ratio_lattice(rank_n: usize, rank_k: usize, norm: Norm, s: u64, t: u64) -> Result<BigRational> {
    let cu = gcd_census(rank_n, norm, s)?;
    let cv = gcd_census(rank_k, norm, t)?;
    let mut hits = BigUint::zero();
    for (&g, &a) in &cu.counts {
        let b: u64 = cv.counts.iter().filter(|(&h, _)| is_image(g, h)).map(|(_, &c)| c).sum();
        hits += BigUint::from(a) * BigUint::from(b);
    }
    let total = BigUint::from(cu.total()) * BigUint::from(cv.total());
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(total)))
}

/// (1/ζ(n), 1 − (1/ζ(k))(1 − 1/ζ(n))): limits bracketing the lattice mapping ratio.
pub fn mapping_ratio_bounds_lattice(rank_n: u32, rank_k: u32) -> Result<(f64, f64)> {
    if rank_n < 2 || rank_k < 2 {
        return Err(Error::arg("mapping-ratio bounds need both ranks ≥ 2"));
    }
    let a = 1.0 / zeta(rank_n, 1e-12)?;
    let b = 1.0 / zeta(rank_k, 1e-12)?;
    Ok((a, 1.0 - b * (1.0 - a)))
}

/// Finite-size bounds on the fraction of pairs (f, g) of sphere elements with g
/// a homomorphic image of f. Visible f maps onto anything; invisible f can only
/// reach invisible g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingBounds {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl MappingBounds {
    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.lower), rational_to_f64(&self.upper))
    }
}

fn visible_rational(c: &SphereCensus) -> BigRational {
    if c.total.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(c.visible_count()), BigInt::from(c.total.clone()))
}

pub fn spherical_mapping_bounds(census_f: &SphereCensus, census_g: &SphereCensus) -> MappingBounds {
    let vf = visible_rational(census_f);
    let vg = visible_rational(census_g);
    let upper = BigRational::one() - vg * (BigRational::one() - &vf);
    MappingBounds { lower: vf, upper }
}

/// The limits of [`spherical_mapping_bounds`] when s has parity `parity_s` in a
/// group of abelian rank `rank_f` and t has parity `parity_t` in rank `rank_g`.
pub fn spherical_bound_limits(rank_f: u32, parity_s: usize, rank_g: u32, parity_t: usize) -> Result<(f64, f64)> {
    let bf = beta_limits(rank_f)?.for_parity(parity_s);
    let bg = beta_limits(rank_g)?.for_parity(parity_t);
    Ok((bf, 1.0 - bg * (1.0 - bf)))
}

/// Bounds on the fraction of solvable equations z = w with z a reduced word of
/// length s in the variables and w of length t in the target.
pub fn equation_ratio_bounds(census_z: &SphereCensus, census_w: &SphereCensus) -> Result<MappingBounds> {
    if !matches!(census_z.group, GroupId::Free { .. }) {
        return Err(Error::arg("left-hand sides must come from a free-group census"));
    }
    Ok(spherical_mapping_bounds(census_z, census_w))
}

/// z(X₁, …, X_n) = w.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationInstance {
    pub variables: usize,
    pub z: GroupWord,
    pub w_ab: LatticeVector,
    pub w_is_identity: bool,
}

impl EquationInstance {
    pub fn exponent_sums(&self) -> LatticeVector {
        self.z.abelianize(self.variables)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Solvable,
    Unsolvable,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solvable => "SOLVABLE",
            Verdict::Unsolvable => "UNSOLVABLE",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

fn verdict_from_classes(gz: GcdClass, gw: GcdClass, w_is_identity: bool) -> Verdict {
    if w_is_identity || gz.is_visible() {
        Verdict::Solvable
    } else if !gz.divides(gw) {
        Verdict::Unsolvable
    } else {
        Verdict::Unknown
    }
}

pub fn decide_homogeneous(eq: &EquationInstance) -> Verdict {
    verdict_from_classes(eq.exponent_sums().gcd_class(), eq.w_ab.gcd_class(), eq.w_is_identity)
}

/// Minimal (p, q) with a·p + b·q = gcd(a, b) ≥ 0: least |p| + |q|, then p ≥ 0,
/// then the larger p.
fn bezout_pair(a: i64, b: i64) -> (i64, i64) {
    if a == 0 && b == 0 {
        return (0, 0);
    }
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i64, 0i64, 0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    let g = r0;
    let (da, db) = (a / g, b / g);
    // Solutions are (s0 + k·db, t0 − k·da).
    let mut ks = vec![0i64];
    for (num, den) in [(-s0, db), (t0, da)] {
        if den != 0 {
            let c = num.div_euclid(den);
            ks.extend([c - 1, c, c + 1, c + 2]);
        }
    }
    ks.into_iter()
        .map(|k| (s0 + k * db, t0 - k * da))
        .min_by_key(|&(p, q)| (p.abs() + q.abs(), p < 0, -p))
        .expect("candidate list is nonempty")
}

/// Coefficients p with Σ vᵢpᵢ = gcd(v), folded pairwise from the left.
pub fn bezout_coefficients(v: &[i64]) -> Vec<i64> {
    let mut coeffs = vec![0i64; v.len()];
    let mut g = 0i64;
    for (i, &x) in v.iter().enumerate() {
        let (p, q) = bezout_pair(g, x);
        for c in &mut coeffs[..i] {
            *c *= p;
        }
        coeffs[i] = q;
        g = g * p + x * q;
    }
    coeffs
}

/// For a SOLVABLE instance with visible exponent sums, images Xᵢ ↦ w^{pᵢ}.
/// None when gcd(v(z)) ≠ 1.
pub fn bezout_witness(eq: &EquationInstance, w: &GroupWord) -> Option<Vec<GroupWord>> {
    let v = eq.exponent_sums();
    if !v.is_visible() {
        return None;
    }
    Some(bezout_coefficients(v.coords()).into_iter().map(|p| w.pow(p)).collect())
}

/// z with each variable Xᵢ replaced by images[i], freely reduced.
pub fn substitute(z: &GroupWord, images: &[GroupWord]) -> GroupWord {
    let mut out = GroupWord::empty();
    for l in z.letters() {
        let img = &images[l.generator()];
        let piece = if l.is_inverse() { img.inverse() } else { img.clone() };
        out = out.mul_reduced(&piece);
    }
    out
}

/// Number of pairs (z, w) from two sphere censuses receiving each verdict.
pub fn verdict_counts(census_z: &SphereCensus, census_w: &SphereCensus) -> BTreeMap<Verdict, BigUint> {
    let by_gcd = |c: &SphereCensus| {
        let mut m: BTreeMap<GcdClass, BigUint> = BTreeMap::new();
        for (alpha, n) in &c.ab_counts {
            *m.entry(alpha.gcd_class()).or_default() += n;
        }
        m
    };
    let zs = by_gcd(census_z);
    let ws = by_gcd(census_w);
    // Spheres of positive radius never contain the identity.
    let w_is_identity = census_w.n == 0;
    let mut out: BTreeMap<Verdict, BigUint> =
        [Verdict::Solvable, Verdict::Unsolvable, Verdict::Unknown].into_iter().map(|v| (v, BigUint::zero())).collect();
    for (&gz, a) in &zs {
        for (&gw, b) in &ws {
            *out.get_mut(&verdict_from_classes(gz, gw, w_is_identity)).unwrap() += a * b;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegrp::{abelian_census_free, enumerate_census_free};
    use crate::lattice::LatticeVector;
    use crate::numtheory::gcd_vec;
    use crate::words::Alphabet;
    use num_traits::ToPrimitive;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn beta_examples() {
        let b = beta_limits(2).unwrap();
        // Reference values from 30-digit evaluations of ζ.
        assert!(close(b.even, 0.405284734569351, 1e-12) && close(b.odd, 0.810569469138702, 1e-12));
        assert!(close(b.annular, 0.607927101854027, 1e-12));
        let b = beta_limits(4).unwrap();
        assert!(close(b.even, 0.862342509393484, 1e-12) && close(b.odd, 0.985534296449696, 1e-12));
        for r in 2..=12 {
            let b = beta_limits(r).unwrap();
            assert!(close(0.5 * (b.even + b.odd), b.annular, 1e-12));
        }
        assert!(beta_limits(1).is_err());
    }

    fn ball(rank: usize, norm: Norm, n: u64) -> Vec<LatticeVector> {
        let n = n as i64;
        let mut pts = vec![vec![]];
        for _ in 0..rank {
            pts = pts.into_iter().flat_map(|p: Vec<i64>| (-n..=n).map(move |x| [p.clone(), vec![x]].concat())).collect();
        }
        pts.into_iter().map(LatticeVector).filter(|v| norm.contains(v, n as u64)).collect()
    }

    fn pair_loop(rank_n: usize, rank_k: usize, norm: Norm, s: u64, t: u64) -> BigRational {
        let us = ball(rank_n, norm, s);
        let vs = ball(rank_k, norm, t);
        let hits = us
            .iter()
            .flat_map(|u| vs.iter().map(move |v| (u, v)))
            .filter(|(u, v)| gcd_vec(u.coords()).unwrap().divides(gcd_vec(v.coords()).unwrap()))
            .count();
        BigRational::new(BigInt::from(hits), BigInt::from(us.len() * vs.len()))
    }

    #[test]
    fn lattice_ratio_examples() {
        let r = mapping_ratio_lattice(2, 2, Norm::Linf, 1, 1).unwrap();
        assert_eq!(r, BigRational::new(73.into(), 81.into()));
        assert_eq!(mapping_ratio_lattice(2, 2, Norm::Linf, 0, 0).unwrap(), BigRational::one());
    }

    #[test]
    fn lattice_ratio_matches_pair_loop() {
        for norm in [Norm::Linf, Norm::L1] {
            for s in 0..=10 {
                assert_eq!(mapping_ratio_lattice(2, 2, norm, s, s).unwrap(), pair_loop(2, 2, norm, s, s), "{norm} {s}");
            }
        }
        assert_eq!(mapping_ratio_lattice(3, 2, Norm::Linf, 2, 3).unwrap(), pair_loop(3, 2, Norm::Linf, 2, 3));
    }

    #[test]
    fn lattice_bounds() {
        let (lo, hi) = mapping_ratio_bounds_lattice(2, 2).unwrap();
        assert!(close(lo, 0.607927101854027, 1e-12) && close(hi, 0.761648259314609, 1e-12));
        let (lo, hi) = mapping_ratio_bounds_lattice(3, 2).unwrap();
        assert!(close(lo, 0.831907372580707, 1e-12) && close(hi, 0.897811936169961, 1e-12));
        for n in 2..8 {
            for k in 2..8 {
                let (lo, hi) = mapping_ratio_bounds_lattice(n, k).unwrap();
                assert!(lo < hi);
            }
        }
        assert!(mapping_ratio_bounds_lattice(1, 2).is_err());
    }

    #[test]
    fn spherical_examples() {
        let c = enumerate_census_free(2, 2).unwrap();
        let b = spherical_mapping_bounds(&c[2], &c[2]);
        assert_eq!(b.lower, BigRational::new(2.into(), 3.into()));
        assert_eq!(b.upper, BigRational::new(7.into(), 9.into()));
        let b = equation_ratio_bounds(&c[1], &c[2]).unwrap();
        assert_eq!((b.lower.clone(), b.upper.clone()), (BigRational::one(), BigRational::one()));
        assert_eq!(b.to_f64(), (1.0, 1.0));
        let (lo, hi) = spherical_bound_limits(2, 0, 2, 0).unwrap();
        assert!(close(lo, 0.405284734569351, 1e-12) && close(hi, 0.758970981505598, 1e-12));
        let (lo, hi) = spherical_bound_limits(4, 0, 4, 0).unwrap();
        assert!(close(lo, 0.862342509393484, 1e-12) && close(hi, 0.881292094113567, 1e-12));
    }

    #[test]
    fn bounds_are_ordered_probabilities() {
        let c = abelian_census_free(2, 30).unwrap();
        for f in &c {
            for g in &c {
                let (lo, hi) = spherical_mapping_bounds(f, g).to_f64();
                assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi);
            }
        }
    }

    #[test]
    fn decider_examples() {
        let x = Alphabet::Variables { count: 2 };
        let eq = |z: &str, w_ab: Vec<i64>, id: bool| EquationInstance {
            variables: 2,
            z: x.parse(z).unwrap(),
            w_ab: LatticeVector(w_ab),
            w_is_identity: id,
        };
        assert_eq!(decide_homogeneous(&eq("x1", vec![0, 0], false)), Verdict::Solvable);
        assert_eq!(decide_homogeneous(&eq("x1", vec![3, 0], false)), Verdict::Solvable);
        assert_eq!(decide_homogeneous(&eq("x1 x1 x2 x2", vec![1, 0], false)), Verdict::Unsolvable);
        assert_eq!(decide_homogeneous(&eq("x1 x2 X1 X2", vec![0, 0], false)), Verdict::Unknown);
        assert_eq!(decide_homogeneous(&eq("x1 x2 X1 X2", vec![1, 0], false)), Verdict::Unsolvable);
        assert_eq!(decide_homogeneous(&eq("x1 x1", vec![2, 4], false)), Verdict::Unknown);
        assert_eq!(decide_homogeneous(&eq("x1 x1", vec![0, 0], true)), Verdict::Solvable);
    }

    #[test]
    fn bezout_rules() {
        assert_eq!(bezout_pair(3, 5), (2, -1));
        assert_eq!(bezout_pair(1, 1), (1, 0));
        assert_eq!(bezout_pair(-1, 0), (-1, 0));
        assert_eq!(bezout_pair(0, 7), (0, 1));
        assert_eq!(bezout_pair(2, -3), (-1, -1));
        for v in [vec![6, 10, 15], vec![1, -1], vec![0, 3, -2], vec![4, 9, 0, -7]] {
            let p = bezout_coefficients(&v);
            let g = gcd_vec(&v).unwrap();
            let s: i64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
            assert_eq!(GcdClass::Finite(s as u64), g);
        }
    }

    #[test]
    fn bezout_pair_is_minimal() {
        for a in -12i64..=12 {
            for b in -12i64..=12 {
                if a == 0 && b == 0 {
                    continue;
                }
                let (p, q) = bezout_pair(a, b);
                let g = gcd_vec(&[a, b]).unwrap();
                assert_eq!(GcdClass::Finite((a * p + b * q) as u64), g);
                for p2 in -30i64..=30 {
                    for q2 in -30i64..=30 {
                        if a * p2 + b * q2 == a * p + b * q {
                            assert!(p.abs() + q.abs() <= p2.abs() + q2.abs());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn verdict_counts_partition_pairs() {
        let c = enumerate_census_free(2, 3).unwrap();
        for z in &c {
            for w in &c {
                let counts = verdict_counts(z, w);
                let total: BigUint = counts.values().sum();
                assert_eq!(total, &z.total * &w.total);
            }
        }
        let counts = verdict_counts(&c[1], &c[3]);
        assert_eq!(counts[&Verdict::Solvable].to_u64().unwrap(), 4 * 36);
    }
}
