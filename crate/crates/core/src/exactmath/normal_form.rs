//! Hermite and Smith normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{floor_div, Mat};

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Unimodular 2x2 step `[x, y, s, t]` sending `(a, b)` to `(g, 0)`.
fn elimination_step(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    if !a.is_zero() && b.is_multiple_of(a) {
        return [BigInt::one(), BigInt::zero(), -(b / a), BigInt::one()];
    }
    let (g, x, y) = ext_gcd(a, b);
    [x, y, -(b / &g), a / &g]
}

/// Replaces columns `(p, q)` by `(x·p + y·q, s·p + t·q)`.
fn combine_cols(m: &mut Mat<BigInt>, p: usize, q: usize, coef: [&BigInt; 4]) {
    let [x, y, s, t] = coef;
    for i in 0..m.rows() {
        let a = m[(i, p)].clone();
        let b = m[(i, q)].clone();
        m[(i, p)] = x * &a + y * &b;
        m[(i, q)] = s * &a + t * &b;
    }
}

fn combine_rows(m: &mut Mat<BigInt>, p: usize, q: usize, coef: [&BigInt; 4]) {
    let [x, y, s, t] = coef;
    for j in 0..m.cols() {
        let a = m[(p, j)].clone();
        let b = m[(q, j)].clone();
        m[(p, j)] = x * &a + y * &b;
        m[(q, j)] = s * &a + t * &b;
    }
}

/// Column-style Hermite normal form: returns `(H, U)` with `H = A·U`,
/// `U` unimodular.
///
/// `H` is in lower column echelon form. Each pivot is positive, and in a
/// pivot's row every entry to the left of the pivot lies in `[0, pivot)`.
/// Zero columns come last. The form is unique for a given column lattice,
/// so two lattices are equal exactly when their HNFs are.
pub fn hnf(a: &Mat<BigInt>) -> (Mat<BigInt>, Mat<BigInt>) {
    let n = a.cols();
    let mut h = a.clone();
    let mut u = Mat::identity(n);
    let mut pc = 0;
    for i in 0..h.rows() {
        if pc == n {
            break;
        }
        for j in pc + 1..n {
            if h[(i, j)].is_zero() {
                continue;
            }
            let [x, y, s, t] = elimination_step(&h[(i, pc)], &h[(i, j)]);
            combine_cols(&mut h, pc, j, [&x, &y, &s, &t]);
            combine_cols(&mut u, pc, j, [&x, &y, &s, &t]);
        }
        if h[(i, pc)].is_zero() {
            continue;
        }
        if h[(i, pc)].is_negative() {
            negate_col(&mut h, pc);
            negate_col(&mut u, pc);
        }
        let pivot = h[(i, pc)].clone();
        for j in 0..pc {
            let q = floor_div(&h[(i, j)], &pivot);
            if !q.is_zero() {
                sub_col_multiple(&mut h, j, pc, &q);
                sub_col_multiple(&mut u, j, pc, &q);
            }
        }
        pc += 1;
    }
    (h, u)
}

fn negate_col(m: &mut Mat<BigInt>, j: usize) {
    for i in 0..m.rows() {
        m[(i, j)] = -m[(i, j)].clone();
    }
}

/// col_j -= q · col_p
fn sub_col_multiple(m: &mut Mat<BigInt>, j: usize, p: usize, q: &BigInt) {
    for i in 0..m.rows() {
        let d = q * &m[(i, p)];
        m[(i, j)] -= d;
    }
}

/// Smith normal form `S = U·A·W` with `U`, `W` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub s: Mat<BigInt>,
    pub u: Mat<BigInt>,
    pub w: Mat<BigInt>,
}

impl Snf {
    /// Nonzero invariant factors `s_1 | s_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }
}

pub fn snf(a: &Mat<BigInt>) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = Mat::identity(m);
    let mut w = Mat::identity(n);
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if s[(i, j)].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        s.swap_rows(t, bi);
        u.swap_rows(t, bi);
        s.swap_cols(t, bj);
        w.swap_cols(t, bj);

        loop {
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let [x, y, p, q] = elimination_step(&s[(t, t)], &s[(i, t)]);
                combine_rows(&mut s, t, i, [&x, &y, &p, &q]);
                combine_rows(&mut u, t, i, [&x, &y, &p, &q]);
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let [x, y, p, q] = elimination_step(&s[(t, t)], &s[(t, j)]);
                combine_cols(&mut s, t, j, [&x, &y, &p, &q]);
                combine_cols(&mut w, t, j, [&x, &y, &p, &q]);
            }
            if (t + 1..m).any(|i| !s[(i, t)].is_zero()) {
                continue;
            }
            // enforce divisibility of the trailing block by the pivot
            let pivot = s[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    let zero = BigInt::zero();
                    combine_rows(&mut s, t, i, [&one, &one, &zero, &one]);
                    combine_rows(&mut u, t, i, [&one, &one, &zero, &one]);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            for j in 0..n {
                s[(t, j)] = -s[(t, j)].clone();
            }
            for j in 0..m {
                u[(t, j)] = -u[(t, j)].clone();
            }
        }
    }
    Snf { s, u, w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn imat(rows: &[Vec<i64>]) -> Mat<BigInt> {
        Mat::from_i64_rows(rows)
    }

    fn is_lower_hnf(h: &Mat<BigInt>) -> bool {
        let mut last_row: Option<usize> = None;
        for j in 0..h.cols() {
            let Some(r) = (0..h.rows()).find(|&i| !h[(i, j)].is_zero()) else {
                return (j..h.cols()).all(|k| (0..h.rows()).all(|i| h[(i, k)].is_zero()));
            };
            if last_row.is_some_and(|lr| r <= lr) || !h[(r, j)].is_positive() {
                return false;
            }
            if (0..j).any(|k| h[(r, k)].is_negative() || h[(r, k)] >= h[(r, j)]) {
                return false;
            }
            last_row = Some(r);
        }
        true
    }

    #[test]
    fn identity_is_fixed() {
        let i = Mat::<BigInt>::identity(2);
        let (h, u) = hnf(&i);
        assert_eq!(h, i);
        assert_eq!(u, i);
    }

    #[test]
    fn small_hnf_keeps_determinant() {
        let a = imat(&[vec![2, 1], vec![0, 1]]);
        let (h, u) = hnf(&a);
        assert!(is_lower_hnf(&h));
        assert_eq!(&a * &u, h);
        assert_eq!(h.det().abs(), BigInt::from(2));
        assert_eq!(u.det().abs(), BigInt::one());
        // column lattice membership sampled on a grid
        let ar = a.to_rat();
        let hr = h.to_rat();
        for x in -3..=3 {
            for y in -3..=3 {
                let v = vec![super::super::rat(x), super::super::rat(y)];
                let in_a = ar.solve(&v).unique().unwrap().iter().all(|c| c.is_integer());
                let in_h = hr.solve(&v).unique().unwrap().iter().all(|c| c.is_integer());
                assert_eq!(in_a, in_h, "membership differs at ({x},{y})");
            }
        }
    }

    #[test]
    fn index_of_superlattice_generated_by_f() {
        // 3·(Z^6 + Z f) with f = (1,...,1)/3 is generated by 3 e_i and (1,...,1)
        let mut cols: Vec<Vec<BigInt>> = (0..6)
            .map(|i| (0..6).map(|k| BigInt::from(if k == i { 3 } else { 0 })).collect())
            .collect();
        cols.push(vec![BigInt::one(); 6]);
        let (h, _) = hnf(&Mat::from_cols(6, &cols));
        let basis = h.truncate_cols(6);
        assert!(h.col(6).iter().all(Zero::is_zero));
        // |det(3·basis)| = 3^6 / index
        assert_eq!(basis.det().abs(), BigInt::from(3i64.pow(6) / 3));
        // oracle: the cosets f, 2f, 3f mod Z^6 are distinct until 3f lies in Z^6
        let cosets: std::collections::BTreeSet<Vec<i64>> =
            (1..=3).map(|k| vec![(k % 3) as i64; 6]).collect();
        assert_eq!(cosets.len(), 3);
    }

    #[test]
    fn zero_matrix_hnf_is_zero() {
        let z = Mat::<BigInt>::zeros(3, 2);
        assert!(hnf(&z).0.is_zero());
    }

    #[test]
    fn snf_of_known_matrix() {
        let a = imat(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let f = snf(&a);
        assert_eq!(&(&f.u * &a) * &f.w, f.s);
        assert_eq!(
            f.invariant_factors(),
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }

    proptest! {
        #[test]
        fn hnf_is_canonical_and_idempotent(entries in proptest::collection::vec(-6i64..7, 12)) {
            let a = Mat::from_rows(entries.chunks(4).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
            let (h, u) = hnf(&a);
            prop_assert!(is_lower_hnf(&h));
            prop_assert_eq!(&a * &u, h.clone());
            prop_assert_eq!(u.det().abs(), BigInt::one());
            let (h2, _) = hnf(&h);
            prop_assert_eq!(h2, h);
        }

        #[test]
        fn snf_is_diagonal_with_divisibility(entries in proptest::collection::vec(-6i64..7, 12)) {
            let a = Mat::from_rows(entries.chunks(3).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
            let f = snf(&a);
            prop_assert_eq!(&(&f.u * &a) * &f.w, f.s.clone());
            prop_assert_eq!(f.u.det().abs(), BigInt::one());
            prop_assert_eq!(f.w.det().abs(), BigInt::one());
            for i in 0..f.s.rows() {
                for j in 0..f.s.cols() {
                    if i != j { prop_assert!(f.s[(i, j)].is_zero()); }
                }
            }
            let inv = f.invariant_factors();
            prop_assert!(inv.iter().all(|x| x.is_positive()));
            for w in inv.windows(2) { prop_assert!(w[1].is_multiple_of(&w[0])); }
        }
    }
}
