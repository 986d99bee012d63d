//! Lattice-point enumeration in dilates of a full-dimensional polytope.
//!
//! Points are visited in lattice coordinates, so every lattice looks like
//! `Z^d` here. For each `k` the hull of the projection onto the first `k`
//! coordinates is precomputed; scanning coordinate `k` then only covers
//! the exact integer range allowed by that projection. Every visited
//! prefix is therefore a lattice point of a projection of the dilate,
//! instead of a point of the bounding box.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::dd::extreme_rays;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Ineq {
    /// Coefficients on coordinates `0..=k`.
    coef: Vec<i64>,
    rhs: i64,
}

#[derive(Clone, Debug)]
pub(crate) struct Enumerator {
    dim: usize,
    levels: Vec<Vec<Ineq>>,
}

impl Enumerator {
    /// Enumerator for `m · conv(points)`; the points must affinely span
    /// `Q^d`.
    pub fn new(points: &[Vec<BigInt>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut levels = Vec::with_capacity(dim);
        for k in 1..=dim {
            let mut proj: Vec<Vec<BigInt>> = points.iter().map(|p| p[..k].to_vec()).collect();
            proj.sort();
            proj.dedup();
            let rows: Vec<Vec<BigInt>> = proj
                .iter()
                .map(|p| {
                    let mut r = p.clone();
                    r.push(BigInt::from(1));
                    r
                })
                .collect();
            let rays = extreme_rays(&rows).ok_or(Error::NotFullDimensional {
                affine_dim: k - 1,
                dim,
            })?;
            let mut level = Vec::with_capacity(rays.len());
            for ray in rays {
                // ray (a, c): a·x + c >= 0, i.e. -a·x <= c
                let coef = ray.dir[..k]
                    .iter()
                    .map(|a| (-a).to_i64())
                    .collect::<Option<Vec<i64>>>();
                let rhs = ray.dir[k].to_i64();
                match (coef, rhs) {
                    (Some(coef), Some(rhs)) => level.push(Ineq { coef, rhs }),
                    _ => return Err(Error::Overflow("facet coefficients exceed 64 bits".into())),
                }
            }
            levels.push(level);
        }
        Ok(Enumerator { dim, levels })
    }

    /// Integer range of coordinate `k` given the prefix.
    fn range(&self, k: usize, prefix: &[i64], scale: i64, strict: bool) -> Option<(i64, i64)> {
        let mut lo = i128::MIN;
        let mut hi = i128::MAX;
        let last = k + 1 == self.dim;
        for ineq in &self.levels[k] {
            let s: i128 = ineq.coef[..k]
                .iter()
                .zip(prefix)
                .map(|(&a, &x)| a as i128 * x as i128)
                .sum();
            let mut bound = scale as i128 * ineq.rhs as i128 - s;
            if strict && last {
                bound -= 1;
            }
            let c = ineq.coef[k] as i128;
            match c.cmp(&0) {
                std::cmp::Ordering::Greater => hi = hi.min(bound.div_euclid(c)),
                std::cmp::Ordering::Less => lo = lo.max(-(bound.div_euclid(-c))),
                std::cmp::Ordering::Equal => {
                    if bound < 0 {
                        return None;
                    }
                }
            }
        }
        if lo > hi || lo == i128::MIN || hi == i128::MAX {
            return None;
        }
        Some((lo as i64, hi as i64))
    }

    fn walk<F: FnMut(&[i64])>(&self, k: usize, prefix: &mut Vec<i64>, scale: i64, strict: bool, f: &mut F) {
        let Some((lo, hi)) = self.range(k, prefix, scale, strict) else {
            return;
        };
        for x in lo..=hi {
            prefix.push(x);
            if k + 1 == self.dim {
                f(prefix);
            } else {
                self.walk(k + 1, prefix, scale, strict, f);
            }
            prefix.pop();
        }
    }

    /// Visits every lattice point of `scale · P` (of its interior when
    /// `strict`), sequentially and in lexicographic order.
    #[cfg(test)]
    pub fn for_each<F: FnMut(&[i64])>(&self, scale: i64, strict: bool, mut f: F) {
        let mut prefix = Vec::with_capacity(self.dim);
        self.walk(0, &mut prefix, scale, strict, &mut f);
    }

    /// Parallel fold over the points of `scale · P`, split into slabs by
    /// the first coordinate. The result does not depend on scheduling as
    /// long as `combine` is associative and commutative.
    pub fn par_fold<T, I, F, C>(&self, scale: i64, strict: bool, init: I, fold: F, combine: C) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut T, &[i64]) + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        let Some((lo, hi)) = self.range(0, &[], scale, strict) else {
            return init();
        };
        (lo..=hi)
            .into_par_iter()
            .map(|x| {
                let mut acc = init();
                let mut prefix = vec![x];
                if self.dim == 1 {
                    fold(&mut acc, &prefix);
                } else {
                    self.walk(1, &mut prefix, scale, strict, &mut |p: &[i64]| fold(&mut acc, p));
                }
                acc
            })
            .reduce(&init, &combine)
    }

    pub fn count(&self, scale: i64, strict: bool) -> u64 {
        self.par_fold(scale, strict, || 0u64, |c, _| *c += 1, |a, b| a + b)
    }
}
