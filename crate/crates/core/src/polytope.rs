//! Lattice polytopes: exact facet enumeration, lattice-point counting,
//! polarity and reflexivity.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dd::extreme_rays;
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::exactmath::{
    clear_denominators, format_rat, format_vec, gcd_all, int_to_rat, Mat, Rat,
};
use crate::lattice::{LPoint, Lattice};

/// Facet inequality `<u, x> <= rhs`.
///
/// `normal` holds the pairings of `u` with the lattice basis, so it is an
/// integer vector in dual-lattice coordinates, and it is primitive. For a
/// lattice polytope `rhs` is an integer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Facet {
    pub normal: Vec<BigInt>,
    pub rhs: Rat,
    /// Indices of the polytope vertices lying on the facet.
    pub vertices: Vec<usize>,
}

impl fmt::Debug for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n: Vec<String> = self.normal.iter().map(|x| x.to_string()).collect();
        write!(f, "<({}), x> <= {} on {:?}", n.join(", "), format_rat(&self.rhs), self.vertices)
    }
}

/// Output of the rational hull: which inputs are vertices, and facets.
struct RationalHull {
    vertex_indices: Vec<usize>,
    facets: Vec<Facet>,
}

/// Hull of points given in lattice coordinates (rational allowed).
fn rational_hull(coords: &[Vec<Rat>]) -> Result<RationalHull> {
    let dim = coords.first().map_or(0, Vec::len);
    let rows: Vec<Vec<BigInt>> = coords
        .iter()
        .map(|c| {
            let (mut ints, q) = clear_denominators(c);
            ints.push(q);
            ints
        })
        .collect();
    let rank = Mat::from_rows(rows.clone()).rank();
    if rank < dim + 1 {
        return Err(Error::NotFullDimensional {
            affine_dim: rank.saturating_sub(1),
            dim,
        });
    }
    let rays = extreme_rays(&rows).ok_or_else(|| Error::Internal("hull cone is not pointed".into()))?;

    let mut vertex_indices = Vec::new();
    for i in 0..coords.len() {
        let tight: Vec<Vec<BigInt>> = rays
            .iter()
            .filter(|r| r.tight.contains(i))
            .map(|r| r.dir[..dim].to_vec())
            .collect();
        if !tight.is_empty() && Mat::from_rows(tight).rank() == dim {
            vertex_indices.push(i);
        }
    }
    let position: std::collections::HashMap<usize, usize> = vertex_indices
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, k))
        .collect();

    let mut facets: Vec<Facet> = rays
        .iter()
        .map(|r| {
            let a = &r.dir[..dim];
            let g = gcd_all(a);
            let normal: Vec<BigInt> = a.iter().map(|x| -(x / &g)).collect();
            let rhs = Rat::new(r.dir[dim].clone(), g);
            let vertices = r.tight.iter().filter_map(|i| position.get(&i).copied()).collect();
            Facet {
                normal,
                rhs,
                vertices,
            }
        })
        .collect();
    facets.sort_by(|a, b| a.normal.cmp(&b.normal));
    Ok(RationalHull {
        vertex_indices,
        facets,
    })
}

/// A full-dimensional lattice polytope with its facet description.
#[derive(Clone)]
pub struct LatticePolytope {
    lattice: Lattice,
    vertices: Vec<LPoint>,
    facets: Vec<Facet>,
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vertices.iter().map(|p| format_vec(&p.ambient)).collect();
        f.debug_struct("LatticePolytope")
            .field("dim", &self.dim())
            .field("vertices", &v)
            .field("facets", &self.facets.len())
            .finish()
    }
}

impl PartialEq for LatticePolytope {
    /// Same lattice and same vertex set.
    fn eq(&self, other: &Self) -> bool {
        let mut a: Vec<_> = self.vertices.iter().map(|p| &p.ambient).collect();
        let mut b: Vec<_> = other.vertices.iter().map(|p| &p.ambient).collect();
        a.sort();
        b.sort();
        self.lattice == other.lattice && a == b
    }
}

impl LatticePolytope {
    /// Convex hull of lattice points; redundant points are dropped.
    pub fn hull(lattice: &Lattice, points: &[Vec<Rat>]) -> Result<LatticePolytope> {
        let mut lpoints = Vec::with_capacity(points.len());
        for p in points {
            lpoints.push(lattice.point(p)?);
        }
        lpoints.sort();
        lpoints.dedup();
        let coords: Vec<Vec<Rat>> = lpoints
            .iter()
            .map(|p| p.coords.iter().map(int_to_rat).collect())
            .collect();
        let hull = rational_hull(&coords)?;
        // restore caller order for the surviving vertices
        let mut order: Vec<(usize, LPoint)> = hull
            .vertex_indices
            .iter()
            .map(|&i| {
                let pos = points.iter().position(|p| *p == lpoints[i].ambient).unwrap_or(usize::MAX);
                (pos, lpoints[i].clone())
            })
            .collect();
        order.sort_by_key(|(pos, _)| *pos);
        let remap: Vec<usize> = hull
            .vertex_indices
            .iter()
            .map(|&i| order.iter().position(|(_, p)| *p == lpoints[i]).expect("vertex present"))
            .collect();
        let facets = hull
            .facets
            .into_iter()
            .map(|mut f| {
                f.vertices = f.vertices.iter().map(|&k| remap[k]).collect();
                f.vertices.sort_unstable();
                f
            })
            .collect();
        Ok(LatticePolytope {
            lattice: lattice.clone(),
            vertices: order.into_iter().map(|(_, p)| p).collect(),
            facets,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn vertices(&self) -> &[LPoint] {
        &self.vertices
    }

    pub fn vertex_ambient(&self) -> Vec<Vec<Rat>> {
        self.vertices.iter().map(|p| p.ambient.clone()).collect()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Ambient normal vector `u` of a facet.
    pub fn facet_ambient_normal(&self, facet: &Facet) -> Vec<Rat> {
        self.lattice.dual_ambient(&facet.normal)
    }

    pub fn origin_in_interior(&self) -> bool {
        self.facets.iter().all(|f| f.rhs.is_positive())
    }

    fn enumerator(&self) -> Result<Enumerator> {
        let coords: Vec<Vec<BigInt>> = self.vertices.iter().map(|p| p.coords.clone()).collect();
        Enumerator::new(&coords)
    }

    /// Number of lattice points in `m·P`, or in its interior.
    pub fn count_points(&self, m: u64, interior: bool) -> Result<u64> {
        if interior && m == 0 {
            return Err(Error::Input("interior count needs m >= 1".into()));
        }
        let m = i64::try_from(m).map_err(|_| Error::Overflow("dilation factor".into()))?;
        Ok(self.enumerator()?.count(m, interior))
    }

    /// Counts for `m = 0..=max_m` (interior counts start at `m = 1`).
    pub fn counts(&self, max_m: u64, interior: bool) -> Result<Vec<u64>> {
        let e = self.enumerator()?;
        let start = u64::from(interior);
        (start..=max_m)
            .map(|m| {
                let m = i64::try_from(m).map_err(|_| Error::Overflow("dilation factor".into()))?;
                Ok(e.count(m, interior))
            })
            .collect()
    }

    /// Membership of a rational point (lattice or not) in `P`.
    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        let c = self.lattice.rational_coords(v)?;
        Ok(self.facets.iter().all(|f| {
            let lhs: Rat = f.normal.iter().zip(&c).map(|(a, x)| int_to_rat(a) * x).sum();
            lhs <= f.rhs
        }))
    }

    /// `P° = {u : <u, v> <= 1 for all v ∈ P}` over the dual lattice.
    pub fn polar(&self) -> Result<LatticePolytope> {
        if !self.origin_in_interior() {
            return Err(Error::OriginNotInterior);
        }
        let dual = self.lattice.dual();
        let mut verts = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            let u: Vec<Rat> = self
                .facet_ambient_normal(f)
                .into_iter()
                .map(|x| x / &f.rhs)
                .collect();
            if !dual.contains(&u) {
                return Err(Error::PolarNotLattice {
                    vertex: format_vec(&u),
                });
            }
            verts.push(u);
        }
        LatticePolytope::hull(&dual, &verts)
    }

    pub fn is_reflexive(&self) -> ReflexivityReport {
        reflexivity(&self.lattice, &self.vertex_ambient())
    }
}

/// Why a point set fails to be a reflexive polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReflexivityViolation {
    /// A vertex is not a lattice point: `witness` is a dual-lattice vector
    /// whose pairing with it is not an integer.
    VertexNotInLattice { vertex: Vec<Rat>, witness: Vec<Rat> },
    /// A facet does not separate the origin strictly (`rhs <= 0`).
    OriginNotInterior { normal: Vec<Rat>, rhs: Rat },
    /// The facet scaled to `<u, x> <= 1` has `u` outside the dual lattice.
    NormalNotInDual { normal: Vec<Rat> },
}

impl fmt::Display for ReflexivityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VertexNotInLattice { vertex, witness } => write!(
                f,
                "vertex {} is not in the lattice: pairing with dual vector {} is {}",
                format_vec(vertex),
                format_vec(witness),
                format_rat(&crate::lattice::pairing(witness, vertex))
            ),
            Self::OriginNotInterior { normal, rhs } => write!(
                f,
                "origin not interior: facet <{}, x> <= {}",
                format_vec(normal),
                format_rat(rhs)
            ),
            Self::NormalNotInDual { normal } => write!(
                f,
                "facet <{}, x> <= 1 has normal outside the dual lattice",
                format_vec(normal)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflexivityReport {
    pub reflexive: bool,
    pub violations: Vec<ReflexivityViolation>,
}

/// Reflexivity of `conv(points)` with respect to `lattice`. The points
/// need not be lattice points; that is reported as a violation.
pub fn reflexivity(lattice: &Lattice, points: &[Vec<Rat>]) -> ReflexivityReport {
    let mut violations = Vec::new();
    for p in points {
        let Ok(c) = lattice.rational_coords(p) else { continue };
        if let Some(j) = c.iter().position(|x| !x.is_integer()) {
            let mut e = vec![BigInt::zero(); lattice.dim()];
            e[j] = BigInt::one();
            violations.push(ReflexivityViolation::VertexNotInLattice {
                vertex: p.clone(),
                witness: lattice.dual_ambient(&e),
            });
        }
    }
    let coords: Vec<Vec<Rat>> = match points
        .iter()
        .map(|p| lattice.rational_coords(p))
        .collect::<Result<Vec<_>>>()
    {
        Ok(c) => c,
        Err(_) => {
            return ReflexivityReport {
                reflexive: false,
                violations,
            }
        }
    };
    let Ok(hull) = rational_hull(&coords) else {
        return ReflexivityReport {
            reflexive: false,
            violations: vec![ReflexivityViolation::OriginNotInterior {
                normal: vec![Rat::zero(); lattice.dim()],
                rhs: Rat::zero(),
            }],
        };
    };
    for f in &hull.facets {
        let u = lattice.dual_ambient(&f.normal);
        if !f.rhs.is_positive() {
            violations.push(ReflexivityViolation::OriginNotInterior {
                normal: u,
                rhs: f.rhs.clone(),
            });
            continue;
        }
        // normal is primitive in M, so u/rhs ∈ M iff rhs = 1/k; for a
        // lattice polytope this means rhs = 1
        if !(f.rhs.recip()).is_integer() || !f.rhs.numer().is_one() {
            let scaled: Vec<Rat> = u.iter().map(|x| x / &f.rhs).collect();
            violations.push(ReflexivityViolation::NormalNotInDual { normal: scaled });
        }
    }
    ReflexivityReport {
        reflexive: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{frac, rat};

    pub(crate) fn unit(d: usize, i: usize) -> Vec<Rat> {
        (0..d).map(|k| rat((k == i) as i64)).collect()
    }

    fn cube(d: usize) -> Vec<Vec<Rat>> {
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| rat(if mask >> i & 1 == 1 { 1 } else { -1 }))
                    .collect()
            })
            .collect()
    }

    fn example_p() -> (Lattice, Vec<Vec<Rat>>) {
        let mut gens: Vec<Vec<Rat>> = (0..6).map(|i| unit(6, i)).collect();
        let f = vec![frac(1, 3); 6];
        gens.push(f.clone());
        let lattice = Lattice::from_generators(&gens).unwrap();
        let mut verts: Vec<Vec<Rat>> = (0..6).map(|i| unit(6, i)).collect();
        verts.extend((0..6).map(|i| unit(6, i).iter().zip(&f).map(|(a, b)| a - b).collect()));
        (lattice, verts)
    }

    #[test]
    fn simplex_and_cube_facets() {
        for d in 1..=4 {
            let mut pts = vec![vec![rat(0); d]];
            pts.extend((0..d).map(|i| unit(d, i)));
            let p = LatticePolytope::hull(&Lattice::standard(d), &pts).unwrap();
            assert_eq!(p.facets().len(), d + 1);
            assert_eq!(p.vertices().len(), d + 1);

            let c = LatticePolytope::hull(&Lattice::standard(d), &cube(d)).unwrap();
            assert_eq!(c.facets().len(), 2 * d);
            for f in c.facets() {
                assert_eq!(f.rhs, rat(1));
                assert_eq!(f.normal.iter().filter(|x| !x.is_zero()).count(), 1);
                assert_eq!(f.vertices.len(), 1 << (d - 1));
            }
        }
    }

    #[test]
    fn redundant_points_dropped() {
        let mut pts = cube(2);
        pts.push(vec![rat(0), rat(0)]);
        pts.push(vec![rat(1), rat(0)]);
        pts.push(vec![rat(1), rat(1)]);
        let p = LatticePolytope::hull(&Lattice::standard(2), &pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn flat_point_sets_rejected() {
        let pts = vec![vec![rat(0), rat(0)], vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        assert!(matches!(
            LatticePolytope::hull(&Lattice::standard(2), &pts),
            Err(Error::NotFullDimensional { affine_dim: 1, dim: 2 })
        ));
        let off = vec![vec![frac(1, 2), rat(0)], vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        assert!(matches!(
            LatticePolytope::hull(&Lattice::standard(2), &off),
            Err(Error::NotInLattice { .. })
        ));
    }

    #[test]
    fn example_polytope_counts() {
        let (lattice, verts) = example_p();
        let p = LatticePolytope::hull(&lattice, &verts).unwrap();
        assert_eq!(p.vertices().len(), 12);
        assert!(p.origin_in_interior());
        assert_eq!(p.count_points(0, false).unwrap(), 1);
        assert_eq!(p.count_points(1, false).unwrap(), 13);
        assert_eq!(p.count_points(2, false).unwrap(), 78);
        assert_eq!(p.count_points(3, false).unwrap(), 314);
        assert_eq!(p.count_points(1, true).unwrap(), 1);
    }

    #[test]
    fn square_counts_and_interior() {
        let p = LatticePolytope::hull(&Lattice::standard(2), &cube(2)).unwrap();
        for m in 0..6u64 {
            assert_eq!(p.count_points(m, false).unwrap(), (2 * m + 1).pow(2));
        }
        for m in 1..6u64 {
            assert_eq!(p.count_points(m, true).unwrap(), (2 * m - 1).pow(2));
        }
        assert!(p.count_points(0, true).is_err());
    }

    #[test]
    fn reflexive_examples() {
        for d in 1..=4 {
            let c = LatticePolytope::hull(&Lattice::standard(d), &cube(d)).unwrap();
            assert!(c.is_reflexive().reflexive);
        }
        let (lattice, verts) = example_p();
        assert!(reflexivity(&lattice, &verts).reflexive);

        // same vertices over Z^6: e_i - f is off the lattice, witnessed by
        // a coordinate functional with pairing 2/3
        let report = reflexivity(&Lattice::standard(6), &verts);
        assert!(!report.reflexive);
        let witnesses: Vec<_> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                ReflexivityViolation::VertexNotInLattice { vertex, witness } => {
                    Some(crate::lattice::pairing(witness, vertex))
                }
                _ => None,
            })
            .collect();
        assert_eq!(witnesses.len(), 6);
        assert!(witnesses.iter().all(|x| !x.is_integer()));

        // and the polar, a lattice polytope of Z^6, has facet normals
        // e_i - f outside Z^6
        let p = LatticePolytope::hull(&lattice, &verts).unwrap();
        let polar_verts = p.polar().unwrap().vertex_ambient();
        let report = reflexivity(&Lattice::standard(6), &polar_verts);
        assert!(!report.reflexive);
        let bad: Vec<_> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                ReflexivityViolation::NormalNotInDual { normal } => Some(normal.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(bad.len(), 6);
        for u in &bad {
            assert!(verts.contains(u));
        }
    }

    #[test]
    fn unit_simplex_not_reflexive() {
        let pts = vec![vec![rat(0), rat(0)], unit(2, 0), unit(2, 1)];
        let p = LatticePolytope::hull(&Lattice::standard(2), &pts).unwrap();
        let report = p.is_reflexive();
        assert!(!report.reflexive);
        assert!(report
            .violations
            .iter()
            .all(|v| matches!(v, ReflexivityViolation::OriginNotInterior { .. })));
        assert_eq!(report.violations.len(), 2);
        assert_eq!(p.polar(), Err(Error::OriginNotInterior));
    }

    #[test]
    fn polar_of_cube_is_cross_polytope() {
        for d in 1..=4 {
            let c = LatticePolytope::hull(&Lattice::standard(d), &cube(d)).unwrap();
            let polar = c.polar().unwrap();
            let mut expected: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
            expected.extend((0..d).map(|i| unit(d, i).iter().map(|x| -x).collect()));
            let cross = LatticePolytope::hull(&Lattice::standard(d), &expected).unwrap();
            assert_eq!(polar, cross);
            assert_eq!(polar.polar().unwrap(), c);
            assert_eq!(polar.facets().len(), c.vertices().len());
        }
    }

    #[test]
    fn polar_of_example_polytope() {
        let (lattice, verts) = example_p();
        let p = LatticePolytope::hull(&lattice, &verts).unwrap();
        let polar = p.polar().unwrap();
        assert_eq!(polar.facets().len(), 12);
        assert_eq!(polar.vertices().len(), p.facets().len());
        assert_eq!(polar.polar().unwrap(), p);
    }
}
