use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{format_rat, rat, Rat};
use crate::error::{Error, Result};

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(format_rat).collect();
        write!(f, "Poly[{}]", parts.join(", "))
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Poly::new(coeffs.iter().cloned().map(Rat::from_integer).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::from_ints(&[1])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Rat::zero(); k + 1];
        c[k] = Rat::one();
        Poly { coeffs: c }
    }

    /// `(1 - t)^n`.
    pub fn one_minus_t_pow(n: usize) -> Self {
        (0..n).fold(Poly::one(), |acc, _| &acc * &Poly::from_ints(&[1, -1]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Poly { coeffs: c }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Integer coefficient list, if all coefficients are integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        super::to_integers(&self.coeffs)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

/// Power series truncated after `t^order`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    order: usize,
    coeffs: Vec<Rat>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(format_rat).collect();
        write!(f, "[{}] + O(t^{})", parts.join(", "), self.order + 1)
    }
}

impl TruncSeries {
    /// Pads with zeros or drops terms beyond `order`.
    pub fn new(order: usize, mut coeffs: Vec<Rat>) -> Self {
        coeffs.resize(order + 1, Rat::zero());
        TruncSeries { order, coeffs }
    }

    pub fn from_ints(order: usize, coeffs: &[i64]) -> Self {
        TruncSeries::new(order, coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        TruncSeries::new(order, p.coeffs().to_vec())
    }

    /// `1 / (1 - t)`.
    pub fn geometric(order: usize) -> Self {
        TruncSeries::new(order, vec![Rat::one(); order + 1])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    fn check(&self, other: &TruncSeries) -> Result<()> {
        if self.order != other.order {
            return Err(Error::TruncationMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        let n = self.order + 1;
        let mut c = vec![Rat::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Ok(TruncSeries {
            order: self.order,
            coeffs: c,
        })
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        Ok(TruncSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<TruncSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::Input("series with zero constant term has no inverse".into()));
        }
        let c0 = self.coeffs[0].recip();
        let mut inv = vec![Rat::zero(); self.order + 1];
        inv[0] = c0.clone();
        for k in 1..=self.order {
            let s: Rat = (1..=k).map(|j| &self.coeffs[j] * &inv[k - j]).sum();
            inv[k] = -(s * &c0);
        }
        Ok(TruncSeries {
            order: self.order,
            coeffs: inv,
        })
    }

    /// Index of the first coefficient where the two series differ.
    pub fn first_difference(&self, other: &TruncSeries) -> Result<Option<usize>> {
        self.check(other)?;
        Ok((0..=self.order).find(|&i| self.coeffs[i] != other.coeffs[i]))
    }
}
