//! Double description: extreme rays of `{y : a_i · y >= 0}`.
//!
//! Everything is exact integer arithmetic. Adjacency of rays is decided
//! combinatorially from their zero sets, so degenerate inputs (many
//! constraints through one ray) need no perturbation.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exactmath::{clear_denominators, dot_int, primitive, Mat};

/// Fixed-size bitset over constraint indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_superset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == *b)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len() * 64).filter(|&i| self.contains(i))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Ray {
    pub dir: Vec<BigInt>,
    /// Constraints with `a_i · dir = 0`.
    pub tight: BitSet,
}

/// Extreme rays of the pointed cone `{y : rows[i] · y >= 0}`.
///
/// Returns `None` when the rows do not have full column rank (the cone
/// contains a line). An empty result means the cone is `{0}`.
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>]) -> Option<Vec<Ray>> {
    let dim = rows.first()?.len();
    let n = rows.len();
    let basis = independent_rows(rows, dim)?;

    let a_b = Mat::from_rows(basis.iter().map(|&i| rows[i].clone()).collect()).to_rat();
    let inv = a_b.inverse()?;
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let (dir, _) = clear_denominators(&inv.col(j));
            let mut tight = BitSet::new(n);
            for (k, &row) in basis.iter().enumerate() {
                if k != j {
                    tight.insert(row);
                }
            }
            Ray {
                dir: primitive(&dir),
                tight,
            }
        })
        .collect();

    let mut in_basis = vec![false; n];
    for &i in &basis {
        in_basis[i] = true;
    }
    for (i, row) in rows.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.dir)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();

        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].tight.intersect(&rays[q].tight);
                if common.len() + 2 < dim {
                    continue;
                }
                let blocked = (0..rays.len())
                    .any(|r| r != p && r != q && rays[r].tight.is_superset(&common));
                if blocked {
                    continue;
                }
                let vp = &values[p];
                let vq = -&values[q];
                let dir: Vec<BigInt> = rays[q]
                    .dir
                    .iter()
                    .zip(&rays[p].dir)
                    .map(|(x, y)| vp * x + &vq * y)
                    .collect();
                let mut tight = common;
                tight.insert(i);
                created.push(Ray {
                    dir: primitive(&dir),
                    tight,
                });
            }
        }

        let mut next = Vec::with_capacity(rays.len() + created.len());
        for (k, mut ray) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                ray.tight.insert(i);
            }
            next.push(ray);
        }
        next.extend(created);
        rays = next;
    }
    Some(rays)
}

/// Greedy choice of `dim` linearly independent rows.
fn independent_rows(rows: &[Vec<BigInt>], dim: usize) -> Option<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::with_capacity(dim);
    let mut echelon: Vec<Vec<BigInt>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let mut candidate = echelon.clone();
        candidate.push(row.clone());
        if Mat::from_rows(candidate.clone()).rank() == candidate.len() {
            echelon = candidate;
            chosen.push(i);
        }
    }
    (chosen.len() == dim).then_some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn sorted_dirs(rays: &[Ray]) -> Vec<Vec<BigInt>> {
        let mut d: Vec<_> = rays.iter().map(|r| r.dir.clone()).collect();
        d.sort();
        d
    }

    #[test]
    fn square_cone_facets() {
        // homogenised square [0,1]^2: facets of the cone over it
        let r = rows(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let rays = extreme_rays(&r).unwrap();
        assert_eq!(
            sorted_dirs(&rays),
            rows(&[&[-1, 0, 1], &[0, -1, 1], &[0, 1, 0], &[1, 0, 0]])
        );
        for ray in &rays {
            assert_eq!(ray.tight.len(), 2);
        }
    }

    #[test]
    fn degenerate_apex() {
        // square pyramid: four facets meet at the apex
        let r = rows(&[
            &[1, 1, 0, 1],
            &[1, -1, 0, 1],
            &[-1, 1, 0, 1],
            &[-1, -1, 0, 1],
            &[0, 0, 1, 1],
        ]);
        let rays = extreme_rays(&r).unwrap();
        assert_eq!(rays.len(), 5);
        let apex_facets = rays.iter().filter(|ray| ray.tight.contains(4)).count();
        assert_eq!(apex_facets, 4);
    }

    #[test]
    fn line_is_rejected() {
        assert!(extreme_rays(&rows(&[&[1, 0], &[-1, 0]])).is_none());
    }

    #[test]
    fn cone_collapses_to_zero() {
        let rays = extreme_rays(&rows(&[&[1, 0], &[0, 1], &[-1, -1]])).unwrap();
        assert!(rays.is_empty());
    }
}
