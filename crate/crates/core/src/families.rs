//! The reflexive family with non-unimodal δ-vectors, and seeded random
//! Gorenstein fans built from transformed reflexive polytopes.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactmath::{frac, rat, Mat, Rat};
use crate::fan::Fan;
use crate::lattice::Lattice;
use crate::polytope::LatticePolytope;

#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub m: usize,
    pub lattice: Lattice,
    pub polytope: LatticePolytope,
    pub expected_delta: Vec<i64>,
}

fn unit(d: usize, i: usize) -> Vec<Rat> {
    (0..d).map(|k| rat((k == i) as i64)).collect()
}

/// `f = (1/m, …, 1/m) ∈ Q^{2m}`.
fn family_f(m: usize) -> Vec<Rat> {
    vec![frac(1, m as i64); 2 * m]
}

/// Vertices `e_1, …, e_{2m}, e_1 − f, …, e_{2m} − f` in this order.
pub fn family_vertices(m: usize) -> Vec<Vec<Rat>> {
    let d = 2 * m;
    let f = family_f(m);
    let mut verts: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
    verts.extend((0..d).map(|i| unit(d, i).iter().zip(&f).map(|(a, b)| a - b).collect()));
    verts
}

/// The lattice `Z^{2m} + Z·f`.
pub fn family_lattice(m: usize) -> Lattice {
    let d = 2 * m;
    let mut gens: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
    gens.push(family_f(m));
    Lattice::from_generators(&gens).expect("contains Z^d")
}

/// Closed form: `1, 2m, 2m+2, 2m, …, 2m+2, 2m, 1` of length `2m + 1`.
pub fn family_expected_delta(m: usize) -> Vec<i64> {
    let d = 2 * m;
    let m = m as i64;
    (0..=d)
        .map(|i| match i {
            0 => 1,
            i if i == d => 1,
            i if i % 2 == 1 => 2 * m,
            _ => 2 * m + 2,
        })
        .collect()
}

pub fn hibi_counterexample(m: usize) -> Result<FamilyInstance> {
    if m == 0 {
        return Err(Error::Input("family parameter m must be positive".into()));
    }
    let lattice = family_lattice(m);
    let polytope = LatticePolytope::hull(&lattice, &family_vertices(m))?;
    Ok(FamilyInstance {
        m,
        lattice,
        polytope,
        expected_delta: family_expected_delta(m),
    })
}

/// `e_1, …, e_{2m−1}` first, then `e_{2m}` and the `e_i − f`.
pub fn pulling_order_for_family(m: usize) -> Vec<Vec<Rat>> {
    family_vertices(m)
}

/// Which seed polytope a random instance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Seed {
    Cube,
    CrossPolytope,
    Simplex,
    SimplexPolar,
    Product(usize),
}

fn cube(d: usize) -> Vec<Vec<Rat>> {
    (0..1usize << d)
        .map(|mask| (0..d).map(|i| rat(if mask >> i & 1 == 1 { 1 } else { -1 })).collect())
        .collect()
}

fn cross(d: usize) -> Vec<Vec<Rat>> {
    let mut v: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
    v.extend((0..d).map(|i| unit(d, i).iter().map(|x| -x).collect()));
    v
}

/// `conv(e_1, …, e_d, −e_1 − … − e_d)`.
fn simplex(d: usize) -> Vec<Vec<Rat>> {
    let mut v: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
    v.push(vec![rat(-1); d]);
    v
}

/// Polar of [`simplex`]: vertices `(d+1)e_i − (1, …, 1)` and `−(1, …, 1)`.
fn simplex_polar(d: usize) -> Vec<Vec<Rat>> {
    let mut v: Vec<Vec<Rat>> = (0..d)
        .map(|i| (0..d).map(|k| rat(if k == i { d as i64 } else { -1 })).collect())
        .collect();
    v.push(vec![rat(-1); d]);
    v
}

fn product(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    a.iter()
        .flat_map(|p| b.iter().map(move |q| p.iter().chain(q).cloned().collect()))
        .collect()
}

/// Seeds available in dimension `d`.
pub fn catalog(d: usize) -> Vec<Seed> {
    let mut out = vec![Seed::Cube, Seed::CrossPolytope, Seed::Simplex];
    if d >= 2 {
        out.push(Seed::SimplexPolar);
        out.extend((1..d).map(Seed::Product));
    }
    out
}

/// Vertices of a catalog seed; `Product(k)` is the simplex of dimension
/// `k` times the cross-polytope of dimension `d − k`.
pub fn seed_vertices(seed: Seed, d: usize) -> Vec<Vec<Rat>> {
    match seed {
        Seed::Cube => cube(d),
        Seed::CrossPolytope => cross(d),
        Seed::Simplex => simplex(d),
        Seed::SimplexPolar => simplex_polar(d),
        Seed::Product(k) => product(&simplex(k), &cross(d - k)),
    }
}

/// Random unimodular matrix: a product of elementary row operations with
/// small multipliers, sign changes and a permutation.
pub fn random_unimodular(d: usize, rng: &mut impl Rng) -> Mat<Rat> {
    let mut m = Mat::<Rat>::identity(d);
    if d >= 2 {
        for _ in 0..2 * d {
            let i = rng.gen_range(0..d);
            let mut j = rng.gen_range(0..d - 1);
            if j >= i {
                j += 1;
            }
            let k = rng.gen_range(-1i64..=1);
            if k.is_zero() {
                continue;
            }
            let row_j = m.row(j).to_vec();
            for (c, x) in row_j.iter().enumerate() {
                m[(i, c)] += x * rat(k);
            }
        }
    }
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let rows: Vec<Vec<Rat>> = perm
        .iter()
        .map(|&p| {
            let sign = if rng.gen_bool(0.5) { rat(1) } else { rat(-1) };
            m.row(p).iter().map(|x| x * &sign).collect()
        })
        .collect();
    Mat::from_rows(rows)
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: Seed,
    pub polytope: LatticePolytope,
    pub fan: Fan,
}

/// A reflexive polytope from the catalog under a random unimodular map,
/// and its face fan. The same `(d, seed)` always gives the same result.
pub fn random_gorenstein_instance(d: usize, seed: u64) -> Result<RandomInstance> {
    if !(1..=4).contains(&d) {
        return Err(Error::Input(format!("random instances need 1 <= d <= 4, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = catalog(d);
    let which = *choices.choose(&mut rng).expect("catalog is nonempty");
    let u = random_unimodular(d, &mut rng);
    let verts: Vec<Vec<Rat>> = seed_vertices(which, d).iter().map(|v| u.mul_vec(v)).collect();
    let polytope = LatticePolytope::hull(&Lattice::standard(d), &verts)?;
    let fan = Fan::face_fan(&polytope)?;
    Ok(RandomInstance {
        seed: which,
        polytope,
        fan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ehrhart::polytope_profile;
    use crate::fan::PsiK;
    use num_traits::Signed;

    #[test]
    fn closed_form_patterns() {
        assert_eq!(family_expected_delta(1), vec![1, 2, 1]);
        assert_eq!(family_expected_delta(2), vec![1, 4, 6, 4, 1]);
        assert_eq!(family_expected_delta(3), vec![1, 6, 8, 6, 8, 6, 1]);
        assert_eq!(family_expected_delta(4), vec![1, 8, 10, 8, 10, 8, 10, 8, 1]);
    }

    #[test]
    fn small_family_members_by_enumeration() {
        for m in 1..=3 {
            let inst = hibi_counterexample(m).unwrap();
            assert!(inst.polytope.is_reflexive().reflexive);
            assert_eq!(inst.polytope.vertices().len(), 4 * m);
            let prof = polytope_profile(&inst.polytope).unwrap();
            assert_eq!(prof.delta, inst.expected_delta, "m = {m}");
        }
    }

    #[test]
    fn m1_is_a_quadrilateral() {
        // e1, e2, e1 − f = −e2, e2 − f = −e1 with f = e1 + e2
        let inst = hibi_counterexample(1).unwrap();
        let mut v = inst.polytope.vertex_ambient();
        v.sort();
        let mut expected = vec![
            vec![rat(1), rat(0)],
            vec![rat(0), rat(1)],
            vec![rat(0), rat(-1)],
            vec![rat(-1), rat(0)],
        ];
        expected.sort();
        assert_eq!(v, expected);
    }

    #[test]
    fn catalog_seeds_are_reflexive() {
        for d in 1..=4 {
            for s in catalog(d) {
                let p = LatticePolytope::hull(&Lattice::standard(d), &seed_vertices(s, d)).unwrap();
                assert!(p.is_reflexive().reflexive, "{s:?} in dimension {d}");
            }
        }
    }

    #[test]
    fn random_instances_are_deterministic_and_gorenstein() {
        for d in 1..=4 {
            for seed in 0..6 {
                let a = random_gorenstein_instance(d, seed).unwrap();
                let b = random_gorenstein_instance(d, seed).unwrap();
                assert_eq!(a.fan, b.fan);
                assert!(a.polytope.is_reflexive().reflexive);
                PsiK::compute(&a.fan).unwrap();
                let u = random_unimodular(d, &mut ChaCha8Rng::seed_from_u64(seed));
                assert_eq!(u.det().abs(), rat(1));
            }
        }
    }

    #[test]
    fn triangle_seed_delta() {
        let p = LatticePolytope::hull(&Lattice::standard(2), &seed_vertices(Seed::Simplex, 2)).unwrap();
        assert_eq!(polytope_profile(&p).unwrap().delta, vec![1, 1, 1]);
    }
}
