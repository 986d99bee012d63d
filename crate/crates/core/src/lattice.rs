//! Full-rank lattices in `Q^d` and their points.
//!
//! A lattice is stored as `(1/q)·G·Z^d` with `G` the column HNF of the
//! scaled generators and `q` the smallest denominator that makes `q·L`
//! integral. Both are canonical, so structural equality is lattice
//! equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{
    dot_rat, format_vec, gcd_all, hnf, int_to_rat, to_integers, Mat, Rat, Solution,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    gens: Mat<BigInt>,
    denom: BigInt,
    basis: Mat<Rat>,
    basis_inv: Mat<Rat>,
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lattice")
            .field("dim", &self.dim)
            .field("denom", &self.denom.to_string())
            .field("gens", &self.gens)
            .finish()
    }
}

/// A point of a lattice, in ambient and lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LPoint {
    pub ambient: Vec<Rat>,
    pub coords: Vec<BigInt>,
}

impl Lattice {
    /// The lattice spanned by `vectors`; more than `d` vectors are allowed.
    pub fn from_generators(vectors: &[Vec<Rat>]) -> Result<Lattice> {
        let dim = vectors.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Input("lattice needs at least one nonempty generator".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        let q = crate::exactmath::common_denominator(vectors.iter().flatten());
        let qr = int_to_rat(&q);
        let cols: Vec<Vec<BigInt>> = vectors
            .iter()
            .map(|v| v.iter().map(|x| (x * &qr).to_integer()).collect())
            .collect();
        let (h, _) = hnf(&Mat::from_cols(dim, &cols));
        let rank = (0..h.cols()).filter(|&j| !h.col(j).iter().all(Zero::is_zero)).count();
        if rank < dim {
            return Err(Error::NotFullRank { rank, dim });
        }
        Ok(Self::from_hnf(h.truncate_cols(dim), q))
    }

    /// `Z^d`.
    pub fn standard(dim: usize) -> Lattice {
        Self::from_hnf(Mat::identity(dim), BigInt::one())
    }

    fn from_hnf(gens: Mat<BigInt>, q: BigInt) -> Lattice {
        let g = q.gcd(&gcd_all(gens.to_rows().iter().flatten()));
        let (gens, denom) = if g.is_one() {
            (gens, q)
        } else {
            let scaled = Mat::from_rows(
                gens.to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(|x| x / &g).collect())
                    .collect(),
            );
            (scaled, &q / &g)
        };
        let dim = gens.rows();
        let qr = int_to_rat(&denom);
        let basis = Mat::from_rows(
            gens.to_rows()
                .into_iter()
                .map(|r| r.iter().map(|x| int_to_rat(x) / &qr).collect())
                .collect(),
        );
        let basis_inv = basis.inverse().expect("lattice basis is nonsingular");
        Lattice {
            dim,
            gens,
            denom,
            basis,
            basis_inv,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical basis vectors (columns of the basis matrix).
    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        self.basis.to_cols()
    }

    pub fn basis(&self) -> &Mat<Rat> {
        &self.basis
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    pub fn generator_matrix(&self) -> &Mat<BigInt> {
        &self.gens
    }

    /// Volume of a fundamental domain, `|det B|`.
    pub fn covolume(&self) -> Rat {
        self.basis.det().abs()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    /// Rational coordinates of `v` in the canonical basis.
    pub fn rational_coords(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        self.check_dim(v.len())?;
        Ok(self.basis_inv.mul_vec(v))
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.to_lattice_coords(v).is_ok()
    }

    pub fn to_lattice_coords(&self, v: &[Rat]) -> Result<Vec<BigInt>> {
        let c = self.rational_coords(v)?;
        to_integers(&c).ok_or_else(|| Error::NotInLattice {
            point: format_vec(v),
        })
    }

    pub fn from_lattice_coords(&self, c: &[BigInt]) -> Vec<Rat> {
        let c: Vec<Rat> = c.iter().map(int_to_rat).collect();
        self.basis.mul_vec(&c)
    }

    pub fn point(&self, v: &[Rat]) -> Result<LPoint> {
        Ok(LPoint {
            coords: self.to_lattice_coords(v)?,
            ambient: v.to_vec(),
        })
    }

    pub fn point_from_coords(&self, c: &[BigInt]) -> LPoint {
        LPoint {
            ambient: self.from_lattice_coords(c),
            coords: c.to_vec(),
        }
    }

    /// `M = {u : <u, v> ∈ Z for all v ∈ L}`.
    pub fn dual(&self) -> Lattice {
        let inv_t = self.basis_inv.transpose();
        Lattice::from_generators(&inv_t.to_cols()).expect("dual of a full-rank lattice is full rank")
    }

    /// Ambient vector `u` of the dual space with `<u, b_j> = w_j` for the
    /// canonical basis vectors `b_j`.
    pub fn dual_ambient(&self, w: &[BigInt]) -> Vec<Rat> {
        let w: Vec<Rat> = w.iter().map(int_to_rat).collect();
        self.dual_ambient_rational(&w)
    }

    /// [`Lattice::dual_ambient`] for rational pairings.
    pub fn dual_ambient_rational(&self, w: &[Rat]) -> Vec<Rat> {
        self.basis_inv.transpose().mul_vec(w)
    }

    /// Inverse of [`Lattice::dual_ambient`]: the pairings `<u, b_j>`.
    pub fn dual_pairings(&self, u: &[Rat]) -> Vec<Rat> {
        self.basis.transpose().mul_vec(u)
    }

    /// Lattice obtained by mapping through an invertible rational matrix.
    pub fn transform(&self, map: &Mat<Rat>) -> Result<Lattice> {
        let images: Vec<Vec<Rat>> = self
            .basis_vectors()
            .iter()
            .map(|b| map.mul_vec(b))
            .collect();
        Lattice::from_generators(&images)
    }

    /// Index `[self : sub]` when `sub ⊆ self`, `None` otherwise.
    pub fn index_of(&self, sub: &Lattice) -> Option<BigInt> {
        if sub
            .basis_vectors()
            .iter()
            .any(|b| !self.contains(b))
        {
            return None;
        }
        let ratio = sub.covolume() / self.covolume();
        Some(ratio.to_integer())
    }

    /// Solves `B c = v` exactly; used where `v` must be checked rather than
    /// assumed to lie in the lattice.
    pub fn solve_coords(&self, v: &[Rat]) -> Solution {
        self.basis.solve(v)
    }
}

/// `<u, v>` for rational vectors.
pub fn pairing(u: &[Rat], v: &[Rat]) -> Rat {
    dot_rat(u, v)
}

/// Whether the lattice coordinates of `p` have gcd one.
pub fn is_primitive(p: &LPoint) -> bool {
    gcd_all(&p.coords).is_one()
}

/// `p / gcd(coords)`, with the gcd returned.
pub fn primitivize(lattice: &Lattice, p: &LPoint) -> (LPoint, BigInt) {
    let g = gcd_all(&p.coords).abs();
    if g.is_zero() || g.is_one() {
        return (p.clone(), g);
    }
    let coords: Vec<BigInt> = p.coords.iter().map(|c| c / &g).collect();
    (lattice.point_from_coords(&coords), g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{frac, rat};
    use proptest::prelude::*;

    fn unit(d: usize, i: usize) -> Vec<Rat> {
        (0..d).map(|k| rat((k == i) as i64)).collect()
    }

    fn example_lattice(d: usize, m: i64) -> Lattice {
        let mut gens: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
        gens.push(vec![frac(1, m); d]);
        Lattice::from_generators(&gens).unwrap()
    }

    #[test]
    fn standard_basis_gives_integer_lattice() {
        let gens: Vec<Vec<Rat>> = (0..4).map(|i| unit(4, i)).collect();
        let l = Lattice::from_generators(&gens).unwrap();
        assert_eq!(l, Lattice::standard(4));
        assert_eq!(l.index_of(&l), Some(BigInt::one()));
    }

    #[test]
    fn superlattice_indices() {
        let l = example_lattice(6, 3);
        assert_eq!(l.covolume(), frac(1, 3));
        assert_eq!(l.index_of(&Lattice::standard(6)), Some(BigInt::from(3)));
        let l2 = example_lattice(4, 2);
        assert_eq!(l2.index_of(&Lattice::standard(4)), Some(BigInt::from(2)));
    }

    #[test]
    fn rank_deficient_generators_rejected() {
        let gens = vec![vec![rat(1), rat(0)], vec![rat(2), rat(0)]];
        assert_eq!(
            Lattice::from_generators(&gens),
            Err(Error::NotFullRank { rank: 1, dim: 2 })
        );
    }

    #[test]
    fn membership() {
        let l = example_lattice(6, 3);
        let z6 = Lattice::standard(6);
        let f = vec![frac(1, 3); 6];
        assert!(l.contains(&vec![rat(0); 6]));
        assert!(z6.contains(&vec![rat(0); 6]));
        assert!(l.contains(&f));
        assert!(!z6.contains(&f));
        let mut half = vec![rat(0); 6];
        half[0] = frac(1, 2);
        assert!(!l.contains(&half));
        // coordinates of f are integral in its own lattice
        let c = l.to_lattice_coords(&f).unwrap();
        assert_eq!(l.from_lattice_coords(&c), f);
    }

    #[test]
    fn dual_of_superlattice() {
        let l = example_lattice(6, 3);
        let m = l.dual();
        assert_eq!(m.dual(), l);
        assert_eq!(Lattice::standard(3).dual(), Lattice::standard(3));
        // oracle: {u ∈ Z^6 : sum u ≡ 0 mod 3}
        let mut gens: Vec<Vec<Rat>> = (0..5)
            .map(|i| {
                let mut v = vec![rat(0); 6];
                v[i] = rat(1);
                v[i + 1] = rat(-1);
                v
            })
            .collect();
        let mut three = vec![rat(0); 6];
        three[0] = rat(3);
        gens.push(three);
        assert_eq!(m, Lattice::from_generators(&gens).unwrap());
    }

    #[test]
    fn basis_vectors_map_to_units() {
        let l = example_lattice(4, 2);
        for (i, b) in l.basis_vectors().iter().enumerate() {
            let c = l.to_lattice_coords(b).unwrap();
            let expected: Vec<BigInt> = (0..4).map(|k| BigInt::from((k == i) as i64)).collect();
            assert_eq!(c, expected);
        }
    }

    fn rat_vec(d: usize) -> impl Strategy<Value = Vec<Rat>> {
        proptest::collection::vec((-6i64..7, 1i64..4), d)
            .prop_map(|v| v.into_iter().map(|(p, q)| frac(p, q)).collect())
    }

    proptest! {
        #[test]
        fn generator_order_is_irrelevant(mut gens in proptest::collection::vec(rat_vec(3), 3..6), seed in 0usize..100) {
            let Ok(l) = Lattice::from_generators(&gens) else { return Ok(()) };
            let k = gens.len();
            gens.rotate_left(seed % k);
            gens.swap(0, (seed / 7) % k);
            prop_assert_eq!(Lattice::from_generators(&gens).unwrap(), l);
        }

        #[test]
        fn coordinates_round_trip(coords in proptest::collection::vec(-20i64..20, 6)) {
            let l = example_lattice(6, 3);
            let c: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
            let v = l.from_lattice_coords(&c);
            prop_assert!(l.contains(&v));
            prop_assert_eq!(l.to_lattice_coords(&v).unwrap(), c);
        }

        #[test]
        fn dual_pairs_integrally(a in proptest::collection::vec(-9i64..10, 6), b in proptest::collection::vec(-9i64..10, 6)) {
            let l = example_lattice(6, 3);
            let m = l.dual();
            let ca: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
            let cb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
            let u = m.from_lattice_coords(&ca);
            let v = l.from_lattice_coords(&cb);
            prop_assert!(pairing(&u, &v).is_integer());
        }
    }
}
