//! δ_Q from a boundary triangulation of Q: the h-vector of the
//! triangulation plus shifted star h-vectors weighted by Box points.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dd::extreme_rays;
use crate::ehrhart::delta_from_counts;
use crate::error::{Error, Result};
use crate::exactmath::{
    dot_int, format_rat, format_vec, int_to_rat, snf, to_i64, to_i64_vec, Mat, Poly, Rat, TruncSeries,
};
use crate::fan::{psi_histogram, Fan, PsiK};
use crate::lattice::LPoint;

/// Simplicial complex on `∂Q` refining the cells `conv(rays of σ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTriangulation {
    dim: usize,
    vertices: Vec<LPoint>,
    /// Sorted vertex sets of size `dim`.
    facets: Vec<Vec<usize>>,
    /// Maximal cone triangulated by each facet.
    cell_of: Vec<usize>,
    /// All faces, the empty face first, ordered by size then lexicographically.
    faces: Vec<Vec<usize>>,
    face_index: HashMap<Vec<usize>, usize>,
}

fn rank_of(points: &[&Vec<BigInt>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    Mat::from_rows(points.iter().map(|p| (*p).clone()).collect()).rank()
}

struct Puller<'a> {
    coords: &'a [Vec<BigInt>],
    memo: HashMap<Vec<usize>, Vec<Vec<usize>>>,
}

impl Puller<'_> {
    /// Pulling triangulation of the face with point set `set` (sorted, so
    /// its first element is the first point in the pulling order).
    /// `normals` are the facet normals of the enclosing maximal cone.
    fn pull(&mut self, set: &[usize], normals: &[Vec<BigInt>]) -> Vec<Vec<usize>> {
        if let Some(done) = self.memo.get(set) {
            return done.clone();
        }
        let pts: Vec<&Vec<BigInt>> = set.iter().map(|&i| &self.coords[i]).collect();
        let rank = rank_of(&pts);
        let out = if set.len() == rank {
            vec![set.to_vec()]
        } else {
            let apex = set[0];
            let mut subfaces: Vec<Vec<usize>> = Vec::new();
            for n in normals {
                let sub: Vec<usize> = set
                    .iter()
                    .copied()
                    .filter(|&i| dot_int(n, &self.coords[i]).is_zero())
                    .collect();
                if sub.contains(&apex) || subfaces.contains(&sub) {
                    continue;
                }
                let sub_pts: Vec<&Vec<BigInt>> = sub.iter().map(|&i| &self.coords[i]).collect();
                if rank_of(&sub_pts) + 1 == rank {
                    subfaces.push(sub);
                }
            }
            let mut simplices = Vec::new();
            for sub in subfaces {
                for mut s in self.pull(&sub, normals) {
                    s.push(apex);
                    s.sort_unstable();
                    simplices.push(s);
                }
            }
            simplices
        };
        self.memo.insert(set.to_vec(), out.clone());
        out
    }
}

impl BoundaryTriangulation {
    /// Pulling triangulation for the given vertex order, by default the
    /// ray generators in fan order. Every vertex must satisfy Ψ_K = 1 and
    /// every ray generator must appear.
    pub fn pulling(fan: &Fan, psi: &PsiK, order: Option<&[Vec<Rat>]>) -> Result<BoundaryTriangulation> {
        let lattice = fan.lattice();
        let vertices: Vec<LPoint> = match order {
            None => fan.rays().to_vec(),
            Some(pts) => pts.iter().map(|p| lattice.point(p)).collect::<Result<_>>()?,
        };
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(&v.coords) {
                return Err(Error::InvalidTriangulation(format!(
                    "vertex {} listed twice",
                    format_vec(&v.ambient)
                )));
            }
            let value = psi.value(fan, v)?;
            if !value.is_one() {
                return Err(Error::InvalidTriangulation(format!(
                    "vertex {} has Ψ = {value}, not on the boundary of Q",
                    format_vec(&v.ambient)
                )));
            }
        }
        for r in fan.rays() {
            if !seen.contains(&r.coords) {
                return Err(Error::InvalidTriangulation(format!(
                    "ray generator {} missing from the vertex order",
                    format_vec(&r.ambient)
                )));
            }
        }
        let coords: Vec<Vec<BigInt>> = vertices.iter().map(|v| v.coords.clone()).collect();
        let mut puller = Puller {
            coords: &coords,
            memo: HashMap::new(),
        };
        let mut facets = Vec::new();
        let mut cell_of = Vec::new();
        for (k, cone) in fan.cones().iter().enumerate() {
            let cell: Vec<usize> = (0..coords.len()).filter(|&i| cone.contains(&coords[i])).collect();
            let simplices = puller.pull(&cell, &cone.normals);
            if simplices.is_empty() {
                return Err(Error::Internal(format!("cell {k} left untriangulated")));
            }
            for s in simplices {
                facets.push(s);
                cell_of.push(k);
            }
        }
        let t = Self::from_facets(fan.dim(), vertices, facets, cell_of)?;
        Ok(t)
    }

    fn from_facets(
        dim: usize,
        vertices: Vec<LPoint>,
        facets: Vec<Vec<usize>>,
        cell_of: Vec<usize>,
    ) -> Result<BoundaryTriangulation> {
        for f in &facets {
            let pts: Vec<&Vec<BigInt>> = f.iter().map(|&i| &vertices[i].coords).collect();
            if f.len() != dim || rank_of(&pts) != dim {
                return Err(Error::Internal(format!("facet {f:?} is not a (d−1)-simplex")));
            }
        }
        let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut all: HashSet<Vec<usize>> = HashSet::new();
        for f in &facets {
            for skip in 0..f.len() {
                let mut r = f.clone();
                r.remove(skip);
                *ridges.entry(r).or_default() += 1;
            }
            for mask in 0u32..1 << f.len() {
                let face: Vec<usize> = (0..f.len()).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                all.insert(face);
            }
        }
        if dim >= 2 {
            if let Some((r, n)) = ridges.iter().find(|(_, &n)| n != 2) {
                return Err(Error::Internal(format!("ridge {r:?} lies in {n} facets")));
            }
        } else if !facets.is_empty() {
            // in dimension 1 the boundary is a set of points
            if facets.len() != vertices.len() {
                return Err(Error::Internal("boundary points are not all vertices".into()));
            }
        }
        let mut faces: Vec<Vec<usize>> = all.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let face_index = faces.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        Ok(BoundaryTriangulation {
            dim,
            vertices,
            facets,
            cell_of,
            faces,
            face_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[LPoint] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn cell_of(&self) -> &[usize] {
        &self.cell_of
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        self.face_index.contains_key(&f)
    }

    /// Facets with vertices in ambient coordinates.
    pub fn facet_points(&self) -> Vec<Vec<Vec<Rat>>> {
        self.facets
            .iter()
            .map(|f| f.iter().map(|&i| self.vertices[i].ambient.clone()).collect())
            .collect()
    }

    /// `h_{Δ_F}(t) = Σ_{G ⊇ F} t^{|G|−|F|} (1−t)^{d−|G|}`; the empty face
    /// gives the h-vector of the triangulation.
    pub fn star_h_vector(&self, face: &[usize]) -> Result<Poly> {
        let mut f = face.to_vec();
        f.sort_unstable();
        if !self.face_index.contains_key(&f) {
            return Err(Error::UnknownFace(f));
        }
        let d = self.dim;
        let mut by_size = vec![0i64; d + 1];
        for g in &self.faces {
            if f.iter().all(|v| g.binary_search(v).is_ok()) {
                by_size[g.len()] += 1;
            }
        }
        let mut h = Poly::zero();
        for (size, &n) in by_size.iter().enumerate().skip(f.len()) {
            if n == 0 {
                continue;
            }
            let term = &Poly::monomial(size - f.len()) * &Poly::one_minus_t_pow(d - size);
            h = &h + &term.scale(&Rat::from_integer(n.into()));
        }
        if h.coeffs().iter().any(|c| c.is_negative()) {
            return Err(Error::Internal(format!("star h-vector of {f:?} has a negative entry")));
        }
        Ok(h)
    }

    pub fn h_vector(&self) -> Result<Vec<i64>> {
        poly_to_vec(&self.star_h_vector(&[])?, self.dim)
    }

    /// Lattice points `Σ a_i v_i` with `0 < a_i < 1` over the vertices of
    /// a face, found through a Smith form of the vertex matrix.
    pub fn box_points(&self, face: &[usize]) -> Result<Vec<BoxPoint>> {
        let mut f = face.to_vec();
        f.sort_unstable();
        if f.is_empty() || !self.face_index.contains_key(&f) {
            return Err(Error::UnknownFace(f));
        }
        let d = self.dim;
        let k = f.len();
        let cols: Vec<Vec<BigInt>> = f.iter().map(|&i| self.vertices[i].coords.clone()).collect();
        let v = Mat::from_cols(d, &cols);
        let form = snf(&v);
        let s: Vec<BigInt> = form.invariant_factors();
        if s.len() != k {
            return Err(Error::Internal(format!("face {f:?} has dependent vertices")));
        }
        let total: BigInt = s.iter().product();
        if total.is_one() {
            return Ok(Vec::new());
        }
        let s_small = to_i64_vec(&s)?;
        let w = form.w.to_rat();
        let mut out = Vec::new();
        let mut digits = vec![0i64; k];
        loop {
            let b: Vec<Rat> = digits
                .iter()
                .zip(&s_small)
                .map(|(&x, &q)| Rat::new(x.into(), q.into()))
                .collect();
            let a: Vec<Rat> = w.mul_vec(&b).iter().map(|x| x - x.floor()).collect();
            if a.iter().all(|x| !x.is_zero()) {
                let shift: Rat = a.iter().sum();
                if !shift.is_integer() {
                    return Err(Error::Internal(format!(
                        "Box point of face {f:?} has fractional shift {}",
                        format_rat(&shift)
                    )));
                }
                let coords: Vec<BigInt> = (0..d)
                    .map(|r| {
                        let x: Rat = (0..k).map(|c| int_to_rat(&cols[c][r]) * &a[c]).sum();
                        x.to_integer()
                    })
                    .collect();
                let ambient: Vec<Rat> = (0..d)
                    .map(|r| f.iter().zip(&a).map(|(&i, c)| &self.vertices[i].ambient[r] * c).sum())
                    .collect();
                out.push(BoxPoint {
                    face: f.clone(),
                    point: LPoint { ambient, coords },
                    coefficients: a,
                    shift: to_i64(&shift.to_integer())? as usize,
                });
            }
            // odometer over Π Z/s_i
            let mut pos = 0;
            while pos < k {
                digits[pos] += 1;
                if digits[pos] < s_small[pos] {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
        out.sort_by(|x, y| x.point.coords.cmp(&y.point.coords));
        Ok(out)
    }

    /// All Box points over all nonempty faces.
    pub fn all_box_points(&self) -> Result<Vec<BoxPoint>> {
        let per_face: Vec<Result<Vec<BoxPoint>>> = self.faces[1..]
            .par_iter()
            .map(|f| self.box_points(f))
            .collect();
        let mut out = Vec::new();
        for r in per_face {
            out.extend(r?);
        }
        Ok(out)
    }

    /// `δ = h_T + Σ_{F, v ∈ Box(F)} t^{shift(v)} h_{Δ_F}`.
    pub fn delta_from_triangulation(&self) -> Result<Vec<i64>> {
        Ok(self.delta_with_boxes()?.0)
    }

    fn delta_with_boxes(&self) -> Result<(Vec<i64>, Vec<i64>, Vec<BoxPoint>)> {
        let h_t = self.star_h_vector(&[])?;
        let boxes = self.all_box_points()?;
        let mut by_face: BTreeMap<&Vec<usize>, Vec<usize>> = BTreeMap::new();
        for b in &boxes {
            by_face.entry(&b.face).or_default().push(b.shift);
        }
        let mut delta = h_t.clone();
        for (face, shifts) in by_face {
            let h = self.star_h_vector(face)?;
            for s in shifts {
                delta = &delta + &h.shift(s);
            }
        }
        let d = poly_to_vec(&delta, self.dim)?;
        Ok((d, poly_to_vec(&h_t, self.dim)?, boxes))
    }
}

fn poly_to_vec(p: &Poly, d: usize) -> Result<Vec<i64>> {
    if p.degree().is_some_and(|deg| deg > d) {
        return Err(Error::Internal(format!("polynomial {p:?} has degree above {d}")));
    }
    let ints = p
        .to_integers()
        .ok_or_else(|| Error::Internal(format!("polynomial {p:?} is not integral")))?;
    let mut out = vec![0i64; d + 1];
    for (i, c) in ints.iter().enumerate() {
        out[i] = to_i64(c)?;
        if out[i] < 0 {
            return Err(Error::Internal(format!("negative coefficient in {p:?}")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxPoint {
    pub face: Vec<usize>,
    pub point: LPoint,
    /// Coefficients on the face vertices, each in `(0, 1)`.
    pub coefficients: Vec<Rat>,
    pub shift: usize,
}

/// Result of one identity check: `first_difference` is the lowest
/// coefficient index where the two sides disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub pass: bool,
    pub first_difference: Option<usize>,
}

impl IdentityCheck {
    fn from_difference(first_difference: Option<usize>) -> Self {
        IdentityCheck {
            pass: first_difference.is_none(),
            first_difference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub truncation: usize,
    /// `(1 − t) F_Q ≡ Σ_v t^{Ψ(v)}`, with `F_Q` counted from the cells of
    /// Q alone.
    pub lattice_sum: IdentityCheck,
    /// `(1 − t)^d Σ_v t^{Ψ(v)} ≡` the triangulation formula for δ.
    pub second_proof: IdentityCheck,
    /// δ from Ehrhart counts equals the triangulation formula.
    pub enumerative_match: IdentityCheck,
    pub symmetry: IdentityCheck,
    pub delta_enumerative: Vec<i64>,
    pub delta_triangulation: Vec<i64>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.lattice_sum.pass && self.second_proof.pass && self.enumerative_match.pass && self.symmetry.pass
    }
}

/// Smallest `m` with `x ∈ m · conv(0, rays of σ)` for some maximal cone,
/// computed from the cell hulls only.
struct CellGauge {
    /// Per cell: inequalities `a·x <= b·m`.
    cells: Vec<Vec<(Vec<i64>, i64)>>,
}

impl CellGauge {
    fn new(fan: &Fan) -> Result<Self> {
        let d = fan.dim();
        let mut cells = Vec::with_capacity(fan.cones().len());
        for cone in fan.cones() {
            let mut rows: Vec<Vec<BigInt>> = cone
                .rays
                .iter()
                .map(|&i| {
                    let mut r = fan.rays()[i].coords.clone();
                    r.push(BigInt::one());
                    r
                })
                .collect();
            let mut origin = vec![BigInt::zero(); d];
            origin.push(BigInt::one());
            rows.push(origin);
            let rays =
                extreme_rays(&rows).ok_or_else(|| Error::Internal("degenerate cell of Q".into()))?;
            let mut ineqs = Vec::with_capacity(rays.len());
            for r in rays {
                // (a, c) ⋅ (x, 1) >= 0, i.e. −a·x <= c
                let a: Vec<BigInt> = r.dir[..d].iter().map(|x| -x).collect();
                ineqs.push((to_i64_vec(&a)?, to_i64(&r.dir[d])?));
            }
            cells.push(ineqs);
        }
        Ok(CellGauge { cells })
    }

    fn value(&self, x: &[i64]) -> Option<i64> {
        let mut best: Option<i64> = None;
        'cell: for ineqs in &self.cells {
            let mut m = 0i64;
            for (a, b) in ineqs {
                let s: i64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                if *b == 0 {
                    if s > 0 {
                        continue 'cell;
                    }
                } else {
                    m = m.max(s.div_euclid(*b) + i64::from(s.rem_euclid(*b) != 0));
                }
            }
            best = Some(best.map_or(m, |v| v.min(m)));
        }
        best
    }
}

/// `#{x ∈ N : gauge(x) = k}` for `k = 0..=max`.
fn gauge_histogram(fan: &Fan, max: usize) -> Result<Vec<u64>> {
    let mut hull: Vec<Vec<BigInt>> = fan.rays().iter().map(|r| r.coords.clone()).collect();
    hull.push(vec![BigInt::zero(); fan.dim()]);
    let e = crate::enumerate::Enumerator::new(&hull)?;
    let gauge = CellGauge::new(fan)?;
    let (hist, ok) = e.par_fold(
        max as i64,
        false,
        || (vec![0u64; max + 1], true),
        |(h, ok), x| match gauge.value(x) {
            Some(v) if v <= max as i64 => h[v as usize] += 1,
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
    if !ok {
        return Err(Error::Internal("a lattice point lies in no cell of Q".into()));
    }
    Ok(hist)
}

fn series_from_counts(order: usize, counts: &[u64]) -> TruncSeries {
    TruncSeries::new(order, counts.iter().map(|&c| Rat::from_integer(c.into())).collect())
}

/// Checks the lattice-sum, second-proof, enumerative and symmetry
/// identities modulo `t^{truncation+1}`.
pub fn verify_identities(
    fan: &Fan,
    psi: &PsiK,
    tri: &BoundaryTriangulation,
    truncation: usize,
) -> Result<IdentityReport> {
    let d = fan.dim();
    if truncation < d {
        return Err(Error::Input(format!("truncation {truncation} is below the dimension {d}")));
    }
    let psi_hist = psi_histogram(fan, psi, truncation as u64)?;
    let lattice_sum = series_from_counts(truncation, &psi_hist);

    let gauge_hist = gauge_histogram(fan, truncation)?;
    let f_q: Vec<u64> = gauge_hist
        .iter()
        .scan(0u64, |acc, &h| {
            *acc += h;
            Some(*acc)
        })
        .collect();
    let one_minus_t = TruncSeries::from_poly(&Poly::one_minus_t_pow(1), truncation);
    let lhs = one_minus_t.mul(&series_from_counts(truncation, &f_q))?;
    let check_i = IdentityCheck::from_difference(lhs.first_difference(&lattice_sum)?);

    let delta_t = tri.delta_from_triangulation()?;
    let mut weighted = lattice_sum.clone();
    for _ in 0..d {
        weighted = one_minus_t.mul(&weighted)?;
    }
    let delta_series = TruncSeries::from_poly(&Poly::from_ints(&delta_t), truncation);
    let check_ii = IdentityCheck::from_difference(weighted.first_difference(&delta_series)?);

    let psi_counts: Vec<u64> = psi_hist
        .iter()
        .take(d + 1)
        .scan(0u64, |acc, &h| {
            *acc += h;
            Some(*acc)
        })
        .collect();
    let delta_e: Vec<i64> = delta_from_counts(d, &psi_counts)
        .iter()
        .map(to_i64)
        .collect::<Result<_>>()?;
    let check_iii =
        IdentityCheck::from_difference((0..=d).find(|&i| delta_e.get(i) != delta_t.get(i)));
    let check_iv = IdentityCheck::from_difference((0..=d).find(|&i| delta_t[i] != delta_t[d - i]));
    Ok(IdentityReport {
        truncation,
        lattice_sum: check_i,
        second_proof: check_ii,
        enumerative_match: check_iii,
        symmetry: check_iv,
        delta_enumerative: delta_e,
        delta_triangulation: delta_t,
    })
}

/// Triangulation formula agrees across the pulling triangulations for
/// all the given orders.
pub fn triangulation_independence_check(fan: &Fan, psi: &PsiK, orders: &[Vec<Vec<Rat>>]) -> Result<bool> {
    let mut first: Option<Vec<i64>> = None;
    for order in orders {
        let t = BoundaryTriangulation::pulling(fan, psi, Some(order))?;
        let delta = t.delta_from_triangulation()?;
        match &first {
            None => first = Some(delta),
            Some(f) if *f != delta => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoxJson {
    pub face: Vec<usize>,
    pub point: Vec<String>,
    pub shift: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityFlags {
    pub lattice_sum: bool,
    pub second_proof: bool,
    pub enumerative_match: bool,
    pub symmetry: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StringyReport {
    #[serde(rename = "h_T")]
    pub h_t: Vec<i64>,
    pub facets: usize,
    pub boxes: Vec<BoxJson>,
    pub delta: Vec<i64>,
    pub identities: IdentityFlags,
    pub first_difference: BTreeMap<String, usize>,
}

pub fn stringy_report(
    fan: &Fan,
    psi: &PsiK,
    tri: &BoundaryTriangulation,
    truncation: usize,
) -> Result<StringyReport> {
    let (delta, h_t, boxes) = tri.delta_with_boxes()?;
    let ids = verify_identities(fan, psi, tri, truncation)?;
    let mut first_difference = BTreeMap::new();
    for (name, c) in [
        ("lattice_sum", &ids.lattice_sum),
        ("second_proof", &ids.second_proof),
        ("enumerative_match", &ids.enumerative_match),
        ("symmetry", &ids.symmetry),
    ] {
        if let Some(i) = c.first_difference {
            first_difference.insert(name.to_string(), i);
        }
    }
    Ok(StringyReport {
        h_t,
        facets: tri.facets().len(),
        boxes: boxes
            .iter()
            .map(|b| BoxJson {
                face: b.face.clone(),
                point: b.point.ambient.iter().map(format_rat).collect(),
                shift: b.shift,
            })
            .collect(),
        delta,
        identities: IdentityFlags {
            lattice_sum: ids.lattice_sum.pass,
            second_proof: ids.second_proof.pass,
            enumerative_match: ids.enumerative_match.pass,
            symmetry: ids.symmetry.pass,
        },
        first_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{frac, rat};
    use crate::fan::delta_q_enumerative;
    use crate::lattice::Lattice;
    use crate::polytope::LatticePolytope;

    fn ivecs(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter().map(|p| p.iter().map(|&x| rat(x)).collect()).collect()
    }

    fn unit(d: usize, i: usize) -> Vec<Rat> {
        (0..d).map(|k| rat((k == i) as i64)).collect()
    }

    fn family(m: usize) -> LatticePolytope {
        let d = 2 * m;
        let f = vec![frac(1, m as i64); d];
        let mut gens: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
        gens.push(f.clone());
        let lattice = Lattice::from_generators(&gens).unwrap();
        let mut verts: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
        verts.extend((0..d).map(|i| unit(d, i).iter().zip(&f).map(|(a, b)| a - b).collect()));
        LatticePolytope::hull(&lattice, &verts).unwrap()
    }

    fn family_order(m: usize) -> Vec<Vec<Rat>> {
        let d = 2 * m;
        let f = vec![frac(1, m as i64); d];
        let mut order: Vec<Vec<Rat>> = (0..d).map(|i| unit(d, i)).collect();
        order.extend((0..d).map(|i| unit(d, i).iter().zip(&f).map(|(a, b)| a - b).collect()));
        order
    }

    /// Box points of a face by scanning the bounding box of the closed
    /// parallelepiped and solving for coefficients.
    fn box_oracle(t: &BoundaryTriangulation, face: &[usize]) -> Vec<Vec<BigInt>> {
        let d = t.dim();
        let cols: Vec<Vec<BigInt>> = face.iter().map(|&i| t.vertices()[i].coords.clone()).collect();
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for r in 0..d {
            for c in &cols {
                let x = to_i64(&c[r]).unwrap();
                if x < 0 {
                    lo[r] += x;
                } else {
                    hi[r] += x;
                }
            }
        }
        let m = Mat::from_cols(d, &cols).to_rat();
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            let v: Vec<Rat> = x.iter().map(|&c| rat(c)).collect();
            if let crate::exactmath::Solution::Unique(a) = m.solve(&v) {
                if a.iter().all(|c| c > &rat(0) && c < &rat(1)) {
                    out.push(x.iter().map(|&c| BigInt::from(c)).collect());
                }
            }
            let mut p = 0;
            while p < d {
                x[p] += 1;
                if x[p] <= hi[p] {
                    break;
                }
                x[p] = lo[p];
                p += 1;
            }
            if p == d {
                break;
            }
        }
        out.sort();
        out
    }

    #[test]
    fn projective_line() {
        let fan = Fan::new(&Lattice::standard(1), &ivecs(&[&[1], &[-1]]), &[vec![0], vec![1]]).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, None).unwrap();
        assert_eq!(t.facets().len(), 2);
        assert_eq!(t.h_vector().unwrap(), vec![1, 1]);
        let r = verify_identities(&fan, &psi, &t, 4).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.delta_triangulation, vec![1, 1]);
    }

    #[test]
    fn simplicial_cells_are_kept() {
        let cross = LatticePolytope::hull(
            &Lattice::standard(3),
            &ivecs(&[&[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]]),
        )
        .unwrap();
        let fan = Fan::face_fan(&cross).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, None).unwrap();
        let mut cells: Vec<Vec<usize>> = fan.cones().iter().map(|c| c.rays.clone()).collect();
        let mut facets = t.facets().to_vec();
        cells.sort();
        facets.sort();
        assert_eq!(cells, facets);
        assert_eq!(t.delta_from_triangulation().unwrap(), t.h_vector().unwrap());
        assert_eq!(t.h_vector().unwrap(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn cube_triangulation() {
        let cube: Vec<Vec<Rat>> = (0..8)
            .map(|mask: i32| (0..3).map(|i| rat(if mask >> i & 1 == 1 { 1 } else { -1 })).collect())
            .collect();
        let p = LatticePolytope::hull(&Lattice::standard(3), &cube).unwrap();
        let fan = Fan::face_fan(&p).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, None).unwrap();
        assert_eq!(t.facets().len(), 12);
        let h = t.h_vector().unwrap();
        assert_eq!(h.iter().sum::<i64>(), 12);
        let r = verify_identities(&fan, &psi, &t, 6).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert_eq!(r.delta_triangulation, delta_q_enumerative(&fan, &psi).unwrap().delta);
        let mut reversed = fan.rays().iter().map(|r| r.ambient.clone()).collect::<Vec<_>>();
        reversed.reverse();
        let forward = fan.rays().iter().map(|r| r.ambient.clone()).collect::<Vec<_>>();
        assert!(triangulation_independence_check(&fan, &psi, &[forward, reversed]).unwrap());
    }

    #[test]
    fn family_bookkeeping() {
        for m in 1..=3usize {
            let p = family(m);
            let fan = Fan::face_fan(&p).unwrap();
            let psi = PsiK::compute(&fan).unwrap();
            let t = BoundaryTriangulation::pulling(&fan, &psi, Some(&family_order(m))).unwrap();
            assert_eq!(t.facets().len(), 4 * m * m - 2 * m + 2, "m = {m}");
            let d = 2 * m;
            let mut h_t = vec![2 * m as i64; d + 1];
            h_t[0] = 1;
            h_t[d] = 1;
            assert_eq!(t.h_vector().unwrap(), h_t);
        }
    }

    #[test]
    fn family_boxes_and_delta() {
        let m = 3usize;
        let d = 2 * m;
        let p = family(m);
        let fan = Fan::face_fan(&p).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, Some(&family_order(m))).unwrap();
        let plus: Vec<usize> = (0..d).collect();
        let minus: Vec<usize> = (d..2 * d).collect();
        for (face, sign) in [(&plus, 1), (&minus, -1)] {
            let b = t.box_points(face).unwrap();
            let mut got: Vec<(Vec<Rat>, usize)> = b.iter().map(|x| (x.point.ambient.clone(), x.shift)).collect();
            got.sort();
            let mut expected: Vec<(Vec<Rat>, usize)> = (1..m as i64)
                .map(|k| (vec![frac(sign * k, m as i64); d], 2 * k as usize))
                .collect();
            expected.sort();
            assert_eq!(got, expected);
            for x in &b {
                assert_eq!(psi.value(&fan, &x.point).unwrap(), BigInt::from(x.shift));
            }
        }
        assert_eq!(t.delta_from_triangulation().unwrap(), vec![1, 6, 8, 6, 8, 6, 1]);
        let r = verify_identities(&fan, &psi, &t, d + 3).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn box_points_match_bounding_box_scan() {
        let p = family(2);
        let fan = Fan::face_fan(&p).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, Some(&family_order(2))).unwrap();
        let mut nonempty = 0;
        for face in &t.faces()[1..] {
            let fast: Vec<Vec<BigInt>> = t.box_points(face).unwrap().into_iter().map(|b| b.point.coords).collect();
            assert_eq!(fast, box_oracle(&t, face), "face {face:?}");
            nonempty += usize::from(!fast.is_empty());
        }
        assert!(nonempty >= 2);
    }

    #[test]
    fn star_vectors() {
        let p = family(2);
        let fan = Fan::face_fan(&p).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, Some(&family_order(2))).unwrap();
        for f in t.facets() {
            assert_eq!(t.star_h_vector(f).unwrap(), Poly::one());
        }
        let h = t.h_vector().unwrap();
        assert_eq!((h[0], h[4]), (1, 1));
        assert_eq!(h.iter().sum::<i64>() as usize, t.facets().len());
        assert!(matches!(t.star_h_vector(&[0, 0, 99]), Err(Error::UnknownFace(_))));
    }

    #[test]
    fn corrupted_support_breaks_lattice_sum() {
        let p = family(2);
        let fan = Fan::face_fan(&p).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let t = BoundaryTriangulation::pulling(&fan, &psi, None).unwrap();
        let mut w = psi.dual_coords().to_vec();
        for x in w[0].iter_mut() {
            *x *= 2;
        }
        let bad = PsiK::from_dual_coords_unchecked(w);
        let r = verify_identities(&fan, &bad, &t, 7).unwrap();
        assert!(!r.lattice_sum.pass);
        assert_eq!(r.lattice_sum.first_difference, Some(1));
    }

    #[test]
    fn off_boundary_vertex_rejected() {
        let fan = Fan::new(&Lattice::standard(1), &ivecs(&[&[1], &[-1]]), &[vec![0], vec![1]]).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let order = ivecs(&[&[1], &[-1], &[2]]);
        assert!(matches!(
            BoundaryTriangulation::pulling(&fan, &psi, Some(&order)),
            Err(Error::InvalidTriangulation(_))
        ));
        let missing = ivecs(&[&[1]]);
        assert!(matches!(
            BoundaryTriangulation::pulling(&fan, &psi, Some(&missing)),
            Err(Error::InvalidTriangulation(_))
        ));
    }

    #[test]
    fn extra_boundary_vertex() {
        // the square with edge midpoints as additional vertices
        let sq = LatticePolytope::hull(&Lattice::standard(2), &ivecs(&[&[-1, -1], &[1, -1], &[-1, 1], &[1, 1]])).unwrap();
        let fan = Fan::face_fan(&sq).unwrap();
        let psi = PsiK::compute(&fan).unwrap();
        let mut order: Vec<Vec<Rat>> = ivecs(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]);
        order.extend(fan.rays().iter().map(|r| r.ambient.clone()));
        let t = BoundaryTriangulation::pulling(&fan, &psi, Some(&order)).unwrap();
        assert_eq!(t.facets().len(), 8);
        assert_eq!(t.h_vector().unwrap(), vec![1, 6, 1]);
        assert_eq!(t.delta_from_triangulation().unwrap(), vec![1, 6, 1]);
    }
}
