//! Complete fans, the support function Ψ_K of a Gorenstein fan, and
//! Ehrhart counting for the region `Q = {Ψ_K <= 1}`.
//!
//! Rays and points are handled in lattice coordinates and linear forms in
//! dual-lattice coordinates, so pairings are plain integer dot products.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dd::extreme_rays;
use crate::ehrhart::{profile_from_counts, EhrhartProfile};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::exactmath::{dot_int, format_vec, int_to_rat, to_i64_vec, Mat, Rat, Solution};
use crate::lattice::{primitivize, LPoint, Lattice};
use crate::polytope::LatticePolytope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    /// Sorted ray indices.
    pub rays: Vec<usize>,
    /// Inward facet normals `n` (dual coordinates): the cone is
    /// `{x : n·x >= 0}`.
    pub normals: Vec<Vec<BigInt>>,
    /// Rays of the cone on each facet, aligned with `normals`.
    pub facet_rays: Vec<Vec<usize>>,
}

impl Cone {
    pub fn contains(&self, coords: &[BigInt]) -> bool {
        self.normals.iter().all(|n| !dot_int(n, coords).is_negative())
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.normals.len()
    }
}

/// A validated complete fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    lattice: Lattice,
    rays: Vec<LPoint>,
    cones: Vec<Cone>,
}

/// Facet structure of `cone(rays)` for ray coordinates `rays`, with the
/// checks that it is full-dimensional, strongly convex and that every
/// listed ray is extreme.
fn cone_structure(index: usize, ids: &[usize], coords: &[&Vec<BigInt>], dim: usize) -> Result<Cone> {
    let rows: Vec<Vec<BigInt>> = coords.iter().map(|c| (*c).clone()).collect();
    let rays = extreme_rays(&rows)
        .ok_or_else(|| Error::InvalidFan(format!("cone {index} is not full-dimensional")))?;
    let normals: Vec<Vec<BigInt>> = rays.iter().map(|r| r.dir.clone()).collect();
    if normals.is_empty() || Mat::from_rows(normals.clone()).rank() < dim {
        return Err(Error::InvalidFan(format!("cone {index} is not strongly convex")));
    }
    for (k, c) in coords.iter().enumerate() {
        let tight: Vec<Vec<BigInt>> = normals
            .iter()
            .filter(|n| dot_int(n, c).is_zero())
            .cloned()
            .collect();
        let rank = if tight.is_empty() { 0 } else { Mat::from_rows(tight).rank() };
        if rank + 1 != dim {
            return Err(Error::InvalidFan(format!(
                "ray {} is not an extreme ray of cone {index}",
                ids[k]
            )));
        }
    }
    let mut facets: Vec<(Vec<BigInt>, Vec<usize>)> = normals
        .into_iter()
        .map(|n| {
            let on: Vec<usize> = ids
                .iter()
                .zip(coords)
                .filter(|(_, c)| dot_int(&n, c).is_zero())
                .map(|(&i, _)| i)
                .collect();
            (n, on)
        })
        .collect();
    facets.sort();
    let (normals, facet_rays) = facets.into_iter().unzip();
    Ok(Cone {
        rays: ids.to_vec(),
        normals,
        facet_rays,
    })
}

impl Fan {
    /// Builds and validates a fan from ray generators (ambient coordinates)
    /// and maximal cones given by ray indices.
    pub fn new(lattice: &Lattice, rays: &[Vec<Rat>], max_cones: &[Vec<usize>]) -> Result<Fan> {
        let dim = lattice.dim();
        let mut points = Vec::with_capacity(rays.len());
        for (i, r) in rays.iter().enumerate() {
            let p = lattice.point(r)?;
            let (prim, g) = primitivize(lattice, &p);
            if g.is_zero() {
                return Err(Error::InvalidFan(format!("ray {i} is zero")));
            }
            if !g.is_one() {
                log::warn!(
                    "ray {i} = {} is not primitive; using {}",
                    format_vec(r),
                    format_vec(&prim.ambient)
                );
            }
            points.push(prim);
        }
        let distinct: BTreeSet<&LPoint> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::InvalidFan("repeated ray generator".into()));
        }
        if max_cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }

        let mut cones = Vec::with_capacity(max_cones.len());
        for (k, ids) in max_cones.iter().enumerate() {
            let mut ids = ids.clone();
            ids.sort_unstable();
            ids.dedup();
            if let Some(&bad) = ids.iter().find(|&&i| i >= points.len()) {
                return Err(Error::InvalidFan(format!("cone {k} uses unknown ray {bad}")));
            }
            let coords: Vec<&Vec<BigInt>> = ids.iter().map(|&i| &points[i].coords).collect();
            cones.push(cone_structure(k, &ids, &coords, dim)?);
        }
        let fan = Fan {
            lattice: lattice.clone(),
            rays: points,
            cones,
        };
        fan.check_intersections()?;
        fan.check_complete()?;
        Ok(fan)
    }

    /// Every pair of maximal cones meets in a common face.
    fn check_intersections(&self) -> Result<()> {
        for a in 0..self.cones.len() {
            for b in a + 1..self.cones.len() {
                let (s, t) = (&self.cones[a], &self.cones[b]);
                let rows: Vec<Vec<BigInt>> = s.normals.iter().chain(&t.normals).cloned().collect();
                let meet = extreme_rays(&rows)
                    .ok_or_else(|| Error::Internal("cone intersection contains a line".into()))?;
                let common: BTreeSet<usize> = s.rays.iter().filter(|r| t.rays.contains(r)).copied().collect();
                let mut generators = BTreeSet::new();
                for ray in &meet {
                    let id = common.iter().copied().find(|&i| self.rays[i].coords == ray.dir);
                    match id {
                        Some(i) => {
                            generators.insert(i);
                        }
                        None => {
                            return Err(Error::InvalidFan(format!(
                                "cones {a} and {b} overlap beyond a common face"
                            )))
                        }
                    }
                }
                for cone in [s, t] {
                    if face_closure(cone, &generators, &self.rays) != generators {
                        return Err(Error::InvalidFan(format!(
                            "cones {a} and {b} do not meet in a common face"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Each facet of a maximal cone lies in exactly two maximal cones, and
    /// the adjacency graph of maximal cones is connected.
    fn check_complete(&self) -> Result<()> {
        let mut owners: BTreeMap<&Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (k, c) in self.cones.iter().enumerate() {
            for f in &c.facet_rays {
                owners.entry(f).or_default().push(k);
            }
        }
        let mut adj = vec![Vec::new(); self.cones.len()];
        for (face, ks) in &owners {
            if ks.len() != 2 {
                return Err(Error::InvalidFan(format!(
                    "facet with rays {face:?} lies in {} maximal cones (expected 2)",
                    ks.len()
                )));
            }
            adj[ks[0]].push(ks[1]);
            adj[ks[1]].push(ks[0]);
        }
        let mut seen = vec![false; self.cones.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(k) = stack.pop() {
            for &j in &adj[k] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidFan("maximal cones are not connected through facets".into()));
        }
        Ok(())
    }

    /// Fan over the faces of a reflexive polytope.
    pub fn face_fan(p: &LatticePolytope) -> Result<Fan> {
        let report = p.is_reflexive();
        if !report.reflexive {
            let reasons: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            return Err(Error::NotReflexive {
                reason: reasons.join("; "),
            });
        }
        let cones: Vec<Vec<usize>> = p.facets().iter().map(|f| f.vertices.clone()).collect();
        Fan::new(p.lattice(), &p.vertex_ambient(), &cones)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn rays(&self) -> &[LPoint] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(Cone::is_simplicial)
    }

    /// First maximal cone containing the point.
    pub fn locate(&self, coords: &[BigInt]) -> Option<usize> {
        self.cones.iter().position(|c| c.contains(coords))
    }
}

/// Rays of the smallest face of `cone` containing `gens`.
fn face_closure(cone: &Cone, gens: &BTreeSet<usize>, rays: &[LPoint]) -> BTreeSet<usize> {
    let active: Vec<&Vec<BigInt>> = cone
        .normals
        .iter()
        .filter(|n| gens.iter().all(|&g| dot_int(n, &rays[g].coords).is_zero()))
        .collect();
    cone.rays
        .iter()
        .copied()
        .filter(|&r| active.iter().all(|n| dot_int(n, &rays[r].coords).is_zero()))
        .collect()
}

/// Support function Ψ_K: on maximal cone `σ` it is the linear form with
/// dual coordinates `w[σ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiK {
    w: Vec<Vec<BigInt>>,
}

impl PsiK {
    /// Solves `<u_σ, v_i> = 1` over the rays of every maximal cone.
    pub fn compute(fan: &Fan) -> Result<PsiK> {
        let mut w = Vec::with_capacity(fan.cones.len());
        for (k, cone) in fan.cones.iter().enumerate() {
            let rows: Vec<Vec<BigInt>> = cone.rays.iter().map(|&i| fan.rays[i].coords.clone()).collect();
            let ones = vec![Rat::one(); rows.len()];
            let sol = match Mat::from_rows(rows).to_rat().solve(&ones) {
                Solution::Unique(x) => x,
                Solution::Inconsistent => return Err(Error::NoSupportFunction { cone: k }),
                Solution::Underdetermined => {
                    return Err(Error::Internal(format!("cone {k} is not full-dimensional")))
                }
            };
            if sol.iter().any(|x| !x.is_integer()) {
                return Err(Error::NonIntegralSupport {
                    cone: k,
                    u: format_vec(&fan.lattice.dual_ambient_rational(&sol)),
                });
            }
            w.push(sol.iter().map(|x| x.to_integer()).collect());
        }
        Ok(PsiK { w })
    }

    /// Support data taken as given; for tests that need an invalid Ψ_K.
    pub fn from_dual_coords_unchecked(w: Vec<Vec<BigInt>>) -> PsiK {
        PsiK { w }
    }

    pub fn dual_coords(&self) -> &[Vec<BigInt>] {
        &self.w
    }

    /// `u_σ` in ambient coordinates.
    pub fn ambient(&self, fan: &Fan, cone: usize) -> Vec<Rat> {
        fan.lattice.dual_ambient(&self.w[cone])
    }

    /// Ψ_K at a lattice point given in lattice coordinates.
    pub fn value_coords(&self, fan: &Fan, coords: &[BigInt]) -> Result<BigInt> {
        let k = fan
            .locate(coords)
            .ok_or_else(|| Error::Internal("point lies in no maximal cone".into()))?;
        Ok(dot_int(&self.w[k], coords))
    }

    pub fn value(&self, fan: &Fan, v: &LPoint) -> Result<BigInt> {
        self.value_coords(fan, &v.coords)
    }

    /// Ψ_K at an arbitrary rational point.
    pub fn value_rational(&self, fan: &Fan, v: &[Rat]) -> Result<Rat> {
        let c = fan.lattice.rational_coords(v)?;
        let denom = crate::exactmath::common_denominator(&c);
        let scaled: Vec<BigInt> = c.iter().map(|x| (x * int_to_rat(&denom)).to_integer()).collect();
        Ok(int_to_rat(&self.value_coords(fan, &scaled)?) / int_to_rat(&denom))
    }
}

/// Integer data for the enumeration hot loop.
struct FastPsi {
    normals: Vec<Vec<Vec<i64>>>,
    w: Vec<Vec<i64>>,
}

impl FastPsi {
    fn new(fan: &Fan, psi: &PsiK) -> Result<Self> {
        let normals = fan
            .cones
            .iter()
            .map(|c| c.normals.iter().map(|n| to_i64_vec(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let w = psi.w.iter().map(|x| to_i64_vec(x)).collect::<Result<Vec<_>>>()?;
        Ok(FastPsi { normals, w })
    }

    fn value(&self, x: &[i64]) -> Option<i64> {
        let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };
        let k = self
            .normals
            .iter()
            .position(|ns| ns.iter().all(|n| dot(n, x) >= 0))?;
        Some(dot(&self.w[k], x))
    }
}

/// `hist[k] = #{v ∈ N : Ψ_K(v) = k}` for `k = 0..=max`.
pub fn psi_histogram(fan: &Fan, psi: &PsiK, max: u64) -> Result<Vec<u64>> {
    let mut hull: Vec<Vec<BigInt>> = fan.rays.iter().map(|r| r.coords.clone()).collect();
    hull.push(vec![BigInt::zero(); fan.dim()]);
    let e = Enumerator::new(&hull)?;
    let fast = FastPsi::new(fan, psi)?;
    let scale = i64::try_from(max).map_err(|_| Error::Overflow("truncation order".into()))?;
    let len = max as usize + 1;
    let (hist, located) = e.par_fold(
        scale,
        false,
        || (vec![0u64; len], true),
        |(h, ok), x| match fast.value(x) {
            Some(v) if (0..=scale).contains(&v) => h[v as usize] += 1,
            Some(_) => {}
            None => *ok = false,
        },
        |(mut a, oa), (b, ob)| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            (a, oa && ob)
        },
    );
    if !located {
        return Err(Error::Internal("a lattice point lies in no maximal cone".into()));
    }
    Ok(hist)
}

/// `#{v : Ψ_K(v) <= m}`, or `#{v : Ψ_K(v) <= m − 1}` for the interior of
/// `mQ`.
pub fn count_q(fan: &Fan, psi: &PsiK, m: u64, interior: bool) -> Result<u64> {
    if interior && m == 0 {
        return Ok(0);
    }
    let hist = psi_histogram(fan, psi, m)?;
    let top = if interior { m - 1 } else { m } as usize;
    Ok(hist[..=top].iter().sum())
}

/// Ehrhart profile of `Q` from lattice-point counts; δ must be symmetric.
pub fn delta_q_enumerative(fan: &Fan, psi: &PsiK) -> Result<EhrhartProfile> {
    let d = fan.dim();
    let hist = psi_histogram(fan, psi, d as u64)?;
    let counts: Vec<u64> = hist
        .iter()
        .scan(0u64, |acc, &h| {
            *acc += h;
            Some(*acc)
        })
        .collect();
    // the origin is the only point with Ψ = 0, so r = 1
    let prof = profile_from_counts(d, &counts, Some(1))?;
    if !prof.is_symmetric() {
        return Err(Error::NotEhrhartConsistent(format!(
            "δ = {:?} is not symmetric",
            prof.delta
        )));
    }
    Ok(prof)
}
