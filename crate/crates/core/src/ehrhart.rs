//! Ehrhart polynomials and δ-vectors from exact lattice-point counts.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::{binomial, format_rat, int_to_rat, rat, to_i64, Poly, Rat, TruncSeries};
use crate::polytope::LatticePolytope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EhrhartProfile {
    pub d: usize,
    /// `f(0), …, f(d)`, plus any further counts used for validation.
    pub counts: Vec<u64>,
    pub poly: Poly,
    pub delta: Vec<i64>,
    /// Largest index with nonzero δ.
    pub ell: usize,
    /// Smallest `r >= 1` such that `rP` has interior lattice points.
    pub r: Option<usize>,
}

/// `δ_i = Σ_j (−1)^j C(d+1, j) f(i−j)` for `i = 0..len`.
pub fn delta_from_counts(d: usize, counts: &[u64]) -> Vec<BigInt> {
    (0..counts.len())
        .map(|i| {
            (0..=i.min(d + 1)).fold(BigInt::zero(), |acc, j| {
                let term = binomial(d as u64 + 1, j as u64) * BigInt::from(counts[i - j]);
                if j % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
        .collect()
}

/// Interpolating polynomial through `(m, values[m])` via Newton forward
/// differences.
pub fn interpolate(values: &[u64]) -> Poly {
    let mut diffs: Vec<BigInt> = values.iter().map(|&v| BigInt::from(v)).collect();
    let mut out = Poly::zero();
    // falling factorial m(m-1)…(m-k+1)/k!
    let mut basis = Poly::one();
    for k in 0..values.len() {
        out = &out + &basis.scale(&int_to_rat(&diffs[0]));
        let step = Poly::new(vec![rat(-(k as i64)), rat(1)]).scale(&Rat::new(BigInt::one(), BigInt::from(k + 1)));
        basis = &basis * &step;
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

/// Profile from counts `f(0..)` (at least `d + 1` of them). Counts beyond
/// `f(d)` must be reproduced by the interpolated polynomial.
pub fn profile_from_counts(d: usize, counts: &[u64], r: Option<usize>) -> Result<EhrhartProfile> {
    if counts.len() < d + 1 {
        return Err(Error::Input(format!("need f(0..={d}), got {} counts", counts.len())));
    }
    if counts[0] != 1 {
        return Err(Error::NotEhrhartConsistent(format!("f(0) = {}, expected 1", counts[0])));
    }
    let poly = interpolate(&counts[..=d]);
    for (m, &c) in counts.iter().enumerate().skip(d + 1) {
        if poly.eval(&rat(m as i64)) != rat(c as i64) {
            return Err(Error::NotEhrhartConsistent(format!(
                "f({m}) = {c} is not a value of the degree-{d} interpolant"
            )));
        }
    }
    if poly.degree().unwrap_or(0) != d {
        return Err(Error::NotEhrhartConsistent(format!(
            "interpolant has degree {:?}, expected {d}",
            poly.degree()
        )));
    }
    let big = delta_from_counts(d, &counts[..=d]);
    if let Some((i, v)) = big.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::NotEhrhartConsistent(format!("δ_{i} = {v} is negative")));
    }
    // Σ δ_i = d! · leading coefficient
    let total: BigInt = big.iter().sum();
    let factorial: BigInt = (1..=d as u64).map(BigInt::from).product();
    if int_to_rat(&total) != poly.leading() * int_to_rat(&factorial) {
        return Err(Error::NotEhrhartConsistent(format!(
            "Σδ = {total} but d!·lead = {}",
            format_rat(&(poly.leading() * int_to_rat(&factorial)))
        )));
    }
    let delta = big.iter().map(to_i64).collect::<Result<Vec<i64>>>()?;
    let ell = delta.iter().rposition(|&x| x != 0).unwrap_or(0);
    if let Some(r) = r {
        if ell + r != d + 1 {
            return Err(Error::NotEhrhartConsistent(format!(
                "ℓ = {ell} but r = {r} (expected ℓ = d + 1 − r)"
            )));
        }
    }
    Ok(EhrhartProfile {
        d,
        counts: counts.to_vec(),
        poly,
        delta,
        ell,
        r,
    })
}

/// Profile from a counter `(m, interior) ↦ #points`. `r` is found by
/// direct interior counts; it is at most `d + 1`.
pub fn profile<F>(d: usize, mut counter: F) -> Result<EhrhartProfile>
where
    F: FnMut(u64, bool) -> Result<u64>,
{
    let counts = (0..=d as u64).map(|m| counter(m, false)).collect::<Result<Vec<u64>>>()?;
    let mut r = None;
    for m in 1..=d as u64 + 1 {
        if counter(m, true)? > 0 {
            r = Some(m as usize);
            break;
        }
    }
    if r.is_none() {
        return Err(Error::NotEhrhartConsistent(format!(
            "no interior lattice point in {}P",
            d + 1
        )));
    }
    profile_from_counts(d, &counts, r)
}

pub fn polytope_profile(p: &LatticePolytope) -> Result<EhrhartProfile> {
    profile(p.dim(), |m, interior| p.count_points(m, interior))
}

impl EhrhartProfile {
    pub fn delta_poly(&self) -> Poly {
        Poly::from_ints(&self.delta)
    }

    /// `δ(t)/(1−t)^{d+1}` mod `t^{order+1}`.
    pub fn generating_function(&self, order: usize) -> Result<TruncSeries> {
        let mut inv = TruncSeries::geometric(order);
        let g = TruncSeries::geometric(order);
        for _ in 0..self.d {
            inv = inv.mul(&g)?;
        }
        TruncSeries::from_poly(&self.delta_poly(), order).mul(&inv)
    }

    pub fn eval(&self, m: i64) -> Rat {
        self.poly.eval(&rat(m))
    }

    pub fn unimodality(&self) -> UnimodalityReport {
        check_unimodality(&self.delta, self.d)
    }

    pub fn is_symmetric(&self) -> bool {
        check_symmetry(&self.delta)
    }

    pub fn to_json(&self) -> ProfileJson {
        let u = self.unimodality();
        ProfileJson {
            counts: self.counts.clone(),
            poly: (0..=self.d).map(|i| format_rat(&self.poly.coeff(i))).collect(),
            delta: self.delta.clone(),
            ell: self.ell,
            r: self.r,
            symmetric: self.is_symmetric(),
            unimodal: u.unimodal,
            descents: u.descents,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileJson {
    pub counts: Vec<u64>,
    pub poly: Vec<String>,
    pub delta: Vec<i64>,
    pub ell: usize,
    pub r: Option<usize>,
    pub symmetric: bool,
    pub unimodal: bool,
    pub descents: Vec<usize>,
}

/// `δ_i = δ_{d−i}` for all `i`, with `d = len − 1`.
pub fn check_symmetry(delta: &[i64]) -> bool {
    delta.iter().eq(delta.iter().rev())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnimodalityReport {
    pub unimodal: bool,
    pub descents: Vec<usize>,
    pub weak_ineq_holds: bool,
}

/// Unimodality up to the middle of the support, descent positions, and
/// `δ_0 <= δ_1 <= δ_j` for `2 <= j <= ⌊d/2⌋`.
pub fn check_unimodality(delta: &[i64], d: usize) -> UnimodalityReport {
    let ell = delta.iter().rposition(|&x| x != 0).unwrap_or(0);
    let descents: Vec<usize> = (1..=ell / 2).filter(|&i| delta[i - 1] > delta[i]).collect();
    let at = |i: usize| delta.get(i).copied().unwrap_or(0);
    let weak_ineq_holds = at(0) <= at(1) && (2..=d / 2).all(|j| at(1) <= at(j));
    UnimodalityReport {
        unimodal: descents.is_empty(),
        descents,
        weak_ineq_holds,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocityRow {
    pub m: u64,
    /// `f(−m)`.
    pub value_at_neg: Rat,
    pub interior: u64,
    pub ok: bool,
    /// `f(m−1) = (−1)^d f(−m)`, checked only for reflexive inputs.
    pub reflexive_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocityReport {
    pub rows: Vec<ReciprocityRow>,
}

impl ReciprocityReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.ok && r.reflexive_ok != Some(false))
    }
}

/// Compares `f(−m)` with `(−1)^d ·` the interior count of `mP` for
/// `m = 1..=m_max`.
pub fn reciprocity_check_with<F>(
    profile: &EhrhartProfile,
    mut interior: F,
    m_max: u64,
    reflexive: bool,
) -> Result<ReciprocityReport>
where
    F: FnMut(u64) -> Result<u64>,
{
    let sign = if profile.d.is_multiple_of(2) { rat(1) } else { rat(-1) };
    let mut rows = Vec::new();
    for m in 1..=m_max {
        let mi = m as i64;
        let value_at_neg = profile.eval(-mi);
        let count = interior(m)?;
        let ok = &sign * &value_at_neg == rat(count as i64);
        let reflexive_ok = reflexive.then(|| profile.eval(mi - 1) == &sign * &value_at_neg);
        rows.push(ReciprocityRow {
            m,
            value_at_neg,
            interior: count,
            ok,
            reflexive_ok,
        });
    }
    Ok(ReciprocityReport { rows })
}

pub fn reciprocity_check(p: &LatticePolytope, m_max: u64) -> Result<ReciprocityReport> {
    let prof = polytope_profile(p)?;
    let reflexive = p.is_reflexive().reflexive;
    reciprocity_check_with(&prof, |m| p.count_points(m, true), m_max, reflexive)
}
