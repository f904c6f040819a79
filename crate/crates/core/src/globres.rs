//! Global resolutions of toric sheaves given by compressed representations on the maximal cones.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{complement_section, kernel, limit_of_edges, Limit, Matrix, Scalar, Subspace};
use crate::grmod::{
    certificate_points, lcm_lattice_of, local_index, unzip_levels, verify_resolution, zip_lattice,
    CertPoint, Entry, GradedModule, GradedResolution, MonomialPresentation, Presentation,
    ScalarRepr,
};
use crate::poset::Preorder;
use crate::posrep::{check_exact, free_resolution, PosetRep};
use crate::reflexive::{ConeCheck, LevelSummary};
use crate::toricfan::{ConeContext, Fan};
use crate::zbar::{anchor_in, canonical_sort, componentwise_order, ThresholdGrid, ZVec, Zbar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepMapFile {
    pub from: usize,
    pub to: usize,
    pub matrix: Vec<Vec<ScalarRepr>>,
}

/// The module of one maximal cone: a presentation over its semigroup ring (compressed onto the
/// lcm-lattice), or an admissible poset in ray coordinates with a representation on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeModuleFile {
    pub cone: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<MonomialPresentation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poset: Vec<ZVec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<RepMapFile>,
}

/// Isomorphism from the localization of `cones[0]` to that of `cones[1]` over `face`, at a
/// degree in the face's ray coordinates. It is transported to the whole grid cell of the degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingFile {
    pub cones: [usize; 2],
    pub face: usize,
    pub degree: Vec<i64>,
    pub matrix: Vec<Vec<ScalarRepr>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftEntry {
    pub element: Vec<i64>,
    pub lift: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTable {
    pub cone: usize,
    pub entries: Vec<LiftEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaFamilyFile {
    pub fan: Fan,
    pub cones: Vec<ConeModuleFile>,
    #[serde(default)]
    pub gluing: Vec<GluingFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lifts: Vec<LiftTable>,
}

fn parse_matrix<F: Scalar>(
    rows: &[Vec<ScalarRepr>],
    nrows: usize,
    ncols: usize,
) -> Result<Matrix<F>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!(
            "expected a {nrows}x{ncols} matrix"
        )));
    }
    let vals = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(ScalarRepr::to_scalar)
                .collect::<Result<Vec<F>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if nrows == 0 {
        return Ok(Matrix::zeros(0, ncols));
    }
    Matrix::from_rows(vals, ncols)
}

fn leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// `E^σ` in ray-pairing coordinates, read off a representation of an admissible poset.
#[derive(Clone, Debug)]
pub struct ConeModule<F: Scalar> {
    pub cone: usize,
    pub ctx: ConeContext,
    pub elements: Vec<ZVec>,
    pub rep: PosetRep<F>,
    grid: ThresholdGrid,
}

impl<F: Scalar> ConeModule<F> {
    pub fn new(
        cone: usize,
        ctx: ConeContext,
        mut elements: Vec<ZVec>,
        mut rep: PosetRep<F>,
    ) -> Result<Self> {
        let r = ctx.num_rays();
        if elements.iter().any(|e| e.rank() != r) {
            return Err(Error::DimensionMismatch(format!(
                "poset of cone {cone} needs {r} coordinates"
            )));
        }
        let distinct: BTreeSet<&ZVec> = elements.iter().collect();
        if distinct.len() != elements.len() {
            return Err(Error::InvalidOrder(format!(
                "poset of cone {cone} repeats an element"
            )));
        }
        if let Some(b) = elements.iter().position(ZVec::is_bottom) {
            if rep.dim(b) != 0 {
                return Err(Error::InvalidModule(format!(
                    "cone {cone}: the bottom element carries a nonzero space"
                )));
            }
        } else {
            elements.push(ZVec::bottom(r));
            let n = elements.len();
            let mut maps = rep.generating_maps();
            let shape = componentwise_order(&elements);
            let mut dims = rep.dims().to_vec();
            dims.push(0);
            for y in 0..n - 1 {
                if shape.leq(n - 1, y) {
                    maps.insert((n - 1, y), Matrix::zeros(dims[y], 0));
                }
            }
            rep = PosetRep::new(shape, dims, maps)?;
        }
        let grid = ThresholdGrid::from_elements(r, &elements);
        for c in grid.cells() {
            anchor_in(&elements, &grid.representative(&c))?;
        }
        Ok(ConeModule {
            cone,
            ctx,
            elements,
            rep,
            grid,
        })
    }

    fn from_file(fan: &Fan, f: &ConeModuleFile) -> Result<Self> {
        if f.cone >= fan.cones.len() {
            return Err(Error::InvalidFamily(format!("unknown cone {}", f.cone)));
        }
        let ctx = fan.context(f.cone);
        if let Some(p) = &f.presentation {
            let pres = Presentation::<F>::from_file_on_cone(p, &ctx)?;
            let (_, lattice) = lcm_lattice_of(&pres)?;
            let z = zip_lattice(&pres, &lattice.elements)?;
            return Self::new(f.cone, ctx, z.elements.clone(), z.rep.clone());
        }
        let elements = f.poset.clone();
        if f.dims.len() != elements.len() {
            return Err(Error::DimensionMismatch(format!(
                "cone {}: {} dimensions for {} elements",
                f.cone,
                f.dims.len(),
                elements.len()
            )));
        }
        let shape = componentwise_order(&elements);
        let mut maps = BTreeMap::new();
        for m in &f.maps {
            if m.from >= elements.len() || m.to >= elements.len() {
                return Err(Error::InvalidModule(format!(
                    "cone {}: map between unknown elements",
                    f.cone
                )));
            }
            maps.insert(
                (m.from, m.to),
                parse_matrix(&m.matrix, f.dims[m.to], f.dims[m.from])?,
            );
        }
        for (x, y) in shape.generating_pairs() {
            if let std::collections::btree_map::Entry::Vacant(e) = maps.entry((x, y)) {
                if f.dims[x] != 0 && f.dims[y] != 0 {
                    return Err(Error::InvalidModule(format!(
                        "cone {}: missing map from {} to {}",
                        f.cone, elements[x], elements[y]
                    )));
                }
                e.insert(Matrix::zeros(f.dims[y], f.dims[x]));
            }
        }
        let rep = PosetRep::new(shape, f.dims.clone(), maps)?;
        Self::new(f.cone, ctx, elements, rep)
    }

    /// Per coordinate, a value at or above every threshold.
    fn beyond(&self) -> Vec<i64> {
        self.grid
            .thresholds
            .iter()
            .map(|t| t.last().copied().unwrap_or(0))
            .collect()
    }

    /// The point of `Z^{σ(1)}` carrying the localization at a face: `q` on the face positions,
    /// past every threshold elsewhere (and at least `floor`).
    fn localized_point(&self, positions: &[usize], q: &[i64], floor: Option<&[i64]>) -> Vec<i64> {
        let mut p = self.beyond();
        if let Some(f) = floor {
            for (a, b) in p.iter_mut().zip(f) {
                *a = (*a).max(*b);
            }
        }
        for (k, &i) in positions.iter().enumerate() {
            p[i] = q[k];
        }
        p
    }
}

impl<F: Scalar> GradedModule<F> for ConeModule<F> {
    fn rank(&self) -> usize {
        self.ctx.num_rays()
    }

    fn dim_at(&self, m: &[i64]) -> Result<usize> {
        Ok(self.rep.dim(anchor_in(&self.elements, m)?))
    }

    fn map(&self, m: &[i64], m2: &[i64]) -> Result<Matrix<F>> {
        if !leq(m, m2) {
            return Err(Error::InvalidOrder(format!("{m:?} is not below {m2:?}")));
        }
        let a = anchor_in(&self.elements, m)?;
        let b = anchor_in(&self.elements, m2)?;
        Ok(self.rep.map(a, b).clone())
    }

    fn grid(&self) -> ThresholdGrid {
        self.grid.clone()
    }
}

/// Modules on the maximal cones of a fan with isomorphisms between their localizations.
#[derive(Clone, Debug)]
pub struct DeltaFamily<F: Scalar> {
    pub fan: Fan,
    pub modules: BTreeMap<usize, ConeModule<F>>,
    gluing: BTreeMap<(usize, usize, usize), Vec<(Vec<i64>, Matrix<F>)>>,
    pub lifts: Vec<LiftTable>,
    face_order: Preorder,
}

impl<F: Scalar> DeltaFamily<F> {
    pub fn from_file(file: &DeltaFamilyFile) -> Result<Self> {
        let fan = file.fan.clone();
        let maximal = fan.maximal_cones();
        let mut modules = BTreeMap::new();
        for c in &file.cones {
            if !maximal.contains(&c.cone) {
                return Err(Error::InvalidFamily(format!(
                    "cone {} is not maximal",
                    c.cone
                )));
            }
            if !fan.context(c.cone).is_full_dimensional() {
                return Err(Error::Unsupported(format!(
                    "maximal cone {} is not full-dimensional",
                    c.cone
                )));
            }
            if modules
                .insert(c.cone, ConeModule::from_file(&fan, c)?)
                .is_some()
            {
                return Err(Error::InvalidFamily(format!(
                    "cone {} is given twice",
                    c.cone
                )));
            }
        }
        if let Some(s) = maximal.iter().find(|s| !modules.contains_key(s)) {
            return Err(Error::InvalidFamily(format!(
                "no module for maximal cone {s}"
            )));
        }
        let face_order = fan.face_order();
        let mut fam = DeltaFamily {
            fan,
            modules,
            gluing: BTreeMap::new(),
            lifts: file.lifts.clone(),
            face_order,
        };
        for g in &file.gluing {
            let [a, b] = g.cones;
            if !fam.modules.contains_key(&a) || !fam.modules.contains_key(&b) || a == b {
                return Err(Error::InvalidFamily(format!(
                    "gluing between unknown cones {a}, {b}"
                )));
            }
            if !fam.is_face(g.face, a) || !fam.is_face(g.face, b) {
                return Err(Error::InvalidFamily(format!(
                    "cone {} is not a common face of {a} and {b}",
                    g.face
                )));
            }
            let da = fam.localized_dim(a, g.face, &g.degree)?;
            let db = fam.localized_dim(b, g.face, &g.degree)?;
            let m = parse_matrix::<F>(&g.matrix, db, da)?;
            let (key, m) = if a < b {
                ((a, b, g.face), m)
            } else {
                let inv = m.inverse().map_err(|_| {
                    Error::Gluing(format!("gluing {a}->{b} over {} is not invertible", g.face))
                })?;
                ((b, a, g.face), inv)
            };
            fam.gluing
                .entry(key)
                .or_default()
                .push((g.degree.clone(), m));
        }
        Ok(fam)
    }

    fn is_face(&self, tau: usize, sigma: usize) -> bool {
        self.face_order.leq(tau, sigma)
    }

    /// Maximal cones containing `τ`, in increasing order.
    pub fn containing(&self, tau: usize) -> Vec<usize> {
        self.modules
            .keys()
            .copied()
            .filter(|&s| self.is_face(tau, s))
            .collect()
    }

    fn positions(&self, sigma: usize, tau: usize) -> Result<Vec<usize>> {
        self.fan.localization_projection(sigma, tau)
    }

    fn localized_anchor(&self, sigma: usize, tau: usize, q: &[i64]) -> Result<usize> {
        let m = &self.modules[&sigma];
        let pos = self.positions(sigma, tau)?;
        if q.len() != pos.len() {
            return Err(Error::DimensionMismatch(format!(
                "degree {q:?} for face {tau}"
            )));
        }
        anchor_in(&m.elements, &m.localized_point(&pos, q, None))
    }

    fn localized_dim(&self, sigma: usize, tau: usize, q: &[i64]) -> Result<usize> {
        Ok(self.modules[&sigma]
            .rep
            .dim(self.localized_anchor(sigma, tau, q)?))
    }

    /// The structure map `E^{σ→τ}_q → E^{σ→τ}_{q'}`.
    fn localized_map(&self, sigma: usize, tau: usize, q: &[i64], q2: &[i64]) -> Result<Matrix<F>> {
        let a = self.localized_anchor(sigma, tau, q)?;
        let b = self.localized_anchor(sigma, tau, q2)?;
        Ok(self.modules[&sigma].rep.map(a, b).clone())
    }

    fn face_grid(&self, cones: &[usize], tau: usize) -> Result<ThresholdGrid> {
        let r = self.fan.cone(tau).rays.len();
        let mut t = vec![Vec::new(); r];
        for &s in cones {
            let pos = self.positions(s, tau)?;
            let g = ThresholdGrid::from_elements(
                r,
                &self.modules[&s]
                    .elements
                    .iter()
                    .map(|e| e.project(&pos))
                    .collect::<Vec<_>>(),
            );
            for (a, b) in t.iter_mut().zip(g.thresholds) {
                a.extend(b);
            }
        }
        Ok(ThresholdGrid::new(t))
    }

    /// The gluing isomorphism `E^{a→τ}_q → E^{b→τ}_q`; the identity where none is given and the
    /// dimensions agree.
    pub fn glue(&self, a: usize, b: usize, tau: usize, q: &[i64]) -> Result<Matrix<F>> {
        if a == b {
            return Ok(Matrix::identity(self.localized_dim(a, tau, q)?));
        }
        if a > b {
            return self.glue(b, a, tau, q)?.inverse().map_err(|_| {
                Error::Gluing(format!(
                    "gluing {b}->{a} over {tau} at {q:?} is not invertible"
                ))
            });
        }
        let grid = self.face_grid(&[a, b], tau)?;
        let cell = grid.cell_of(q);
        let given = self
            .gluing
            .get(&(a, b, tau))
            .and_then(|v| v.iter().find(|(d, _)| grid.cell_of(d) == cell));
        let Some((q0, m)) = given else {
            let (da, db) = (
                self.localized_dim(a, tau, q)?,
                self.localized_dim(b, tau, q)?,
            );
            if da != db {
                return Err(Error::Gluing(format!(
                    "cones {a} and {b} have localizations of dimensions {da} and {db} over {tau} at {q:?}"
                )));
            }
            return Ok(Matrix::identity(da));
        };
        // transport through the meet, where both structure maps are isomorphisms
        let r: Vec<i64> = q.iter().zip(q0).map(|(x, y)| *x.min(y)).collect();
        let inv = |m: Matrix<F>| {
            m.inverse().map_err(|_| {
                Error::Gluing(format!(
                    "structure map inside a cell over {tau} is singular"
                ))
            })
        };
        let phi_r = inv(self.localized_map(b, tau, &r, q0)?)?
            .mul(m)
            .mul(&self.localized_map(a, tau, &r, q0)?);
        Ok(self
            .localized_map(b, tau, &r, q)?
            .mul(&phi_r)
            .mul(&inv(self.localized_map(a, tau, &r, q)?)?))
    }

    /// Non-maximal cones that are faces of at least one maximal cone.
    fn faces(&self) -> Vec<usize> {
        (0..self.fan.cones.len())
            .filter(|t| !self.modules.contains_key(t) && !self.containing(*t).is_empty())
            .collect()
    }

    /// Common faces of two maximal cones (including non-maximal proper faces only).
    fn common_faces(&self, a: usize, b: usize) -> Vec<usize> {
        self.faces()
            .into_iter()
            .filter(|&t| self.is_face(t, a) && self.is_face(t, b))
            .collect()
    }

    pub fn default_margin(&self) -> i64 {
        self.modules
            .values()
            .map(|m| 2 * m.ctx.step_bound() + 1)
            .max()
            .unwrap_or(3)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub valid: bool,
    pub errors: Vec<String>,
}

/// Checks the gluing data: invertibility and naturality on every cell of each common face,
/// agreement with the gluing over smaller faces, and the cocycle condition.
pub fn validate_delta_family<F: Scalar>(fam: &DeltaFamily<F>) -> DeltaReport {
    let mut errors = Vec::new();
    let cones: Vec<usize> = fam.modules.keys().copied().collect();
    let mut note = |r: Result<()>| {
        if let Err(e) = r {
            errors.push(e.to_string());
        }
    };
    for (i, &a) in cones.iter().enumerate() {
        for &b in &cones[i + 1..] {
            for tau in fam.common_faces(a, b) {
                note(check_pair(fam, a, b, tau));
            }
        }
    }
    for (i, &a) in cones.iter().enumerate() {
        for (j, &b) in cones.iter().enumerate().skip(i + 1) {
            for &c in &cones[j + 1..] {
                for tau in fam.common_faces(a, b) {
                    if fam.is_face(tau, c) {
                        note(check_cocycle(fam, a, b, c, tau));
                    }
                }
            }
        }
    }
    DeltaReport {
        valid: errors.is_empty(),
        errors,
    }
}

fn check_pair<F: Scalar>(fam: &DeltaFamily<F>, a: usize, b: usize, tau: usize) -> Result<()> {
    let grid = fam.face_grid(&[a, b], tau)?;
    let mut phis = BTreeMap::new();
    for cell in grid.cells() {
        let q = grid.representative(&cell);
        let phi = fam.glue(a, b, tau, &q)?;
        if !phi.is_invertible() {
            return Err(Error::Gluing(format!(
                "gluing {a}->{b} over {tau} at {q:?} is not invertible"
            )));
        }
        phis.insert(cell, (q, phi));
    }
    for (cell, (q, phi)) in &phis {
        for i in 0..cell.len() {
            let mut next = cell.clone();
            next[i] += 1;
            let Some((q2, phi2)) = phis.get(&next) else {
                continue;
            };
            let lhs = phi2.mul(&fam.localized_map(a, tau, q, q2)?);
            let rhs = fam.localized_map(b, tau, q, q2)?.mul(phi);
            if lhs != rhs {
                return Err(Error::NotNatural(format!(
                    "gluing {a}->{b} over {tau} between {q:?} and {q2:?}"
                )));
            }
        }
    }
    if let Some(given) = fam.gluing.get(&(a, b, tau)) {
        for (q, m) in given {
            if fam.glue(a, b, tau, q)? != *m {
                return Err(Error::Gluing(format!(
                    "two gluings {a}->{b} over {tau} disagree in the cell of {q:?}"
                )));
            }
        }
    }
    let (pa, pb) = (fam.modules[&a].beyond(), fam.modules[&b].beyond());
    let pos_ta = fam.positions(a, tau)?;
    for eta in fam.common_faces(a, b) {
        if eta == tau || !fam.is_face(eta, tau) {
            continue;
        }
        let pos = fam.positions(tau, eta)?;
        let sub = fam.face_grid(&[a, b], eta)?;
        for cell in sub.cells() {
            let r = sub.representative(&cell);
            let mut q: Vec<i64> = pos_ta
                .iter()
                .zip(fam.positions(b, tau)?)
                .map(|(&i, j)| pa[i].max(pb[j]))
                .collect();
            for (k, &i) in pos.iter().enumerate() {
                q[i] = r[k];
            }
            if fam.glue(a, b, eta, &r)? != fam.glue(a, b, tau, &q)? {
                return Err(Error::Gluing(format!(
                    "gluing {a}->{b} over {eta} at {r:?} differs from its localization from face {tau}"
                )));
            }
        }
    }
    Ok(())
}

fn check_cocycle<F: Scalar>(
    fam: &DeltaFamily<F>,
    a: usize,
    b: usize,
    c: usize,
    tau: usize,
) -> Result<()> {
    let grid = fam.face_grid(&[a, b, c], tau)?;
    for cell in grid.cells() {
        let q = grid.representative(&cell);
        let direct = fam.glue(a, c, tau, &q)?;
        let via = fam.glue(b, c, tau, &q)?.mul(&fam.glue(a, b, tau, &q)?);
        if direct != via {
            return Err(Error::Gluing(format!(
                "cocycle condition fails for {a}, {b}, {c} over {tau} at {q:?}"
            )));
        }
    }
    Ok(())
}

/// The refined posets: per ray the values occurring in any projection, per maximal cone the
/// realized cells of the product of its ray chains together with the original poset, per face
/// the union of the projections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub rays: BTreeMap<usize, Vec<Zbar>>,
    /// Including elements with `-∞` coordinates.
    pub full: BTreeMap<usize, Vec<ZVec>>,
    /// Finite elements and the bottom.
    pub cones: BTreeMap<usize, Vec<ZVec>>,
    /// `(σ, τ)` pairs whose projection differs from the face's refined poset.
    pub mismatches: Vec<(usize, usize)>,
}

fn finite_view(full: &[ZVec], rank: usize) -> Vec<ZVec> {
    let mut out: Vec<ZVec> = full.iter().filter(|e| e.is_finite()).cloned().collect();
    if rank > 0 {
        out.push(ZVec::bottom(rank));
    }
    out.dedup();
    canonical_sort(&mut out);
    out.dedup();
    out
}

pub fn refine<F: Scalar>(fam: &DeltaFamily<F>, margin: i64) -> Result<Refinement> {
    let mut rays: BTreeMap<usize, BTreeSet<Zbar>> = BTreeMap::new();
    for (&s, m) in &fam.modules {
        for (k, &r) in m.ctx.ray_ids.iter().enumerate() {
            let set = rays.entry(r).or_default();
            set.insert(Zbar::NegInf);
            set.extend(m.elements.iter().map(|e| e.0[k]));
        }
        let _ = s;
    }
    let mut full: BTreeMap<usize, Vec<ZVec>> = BTreeMap::new();
    for (&s, m) in &fam.modules {
        let thresholds: Vec<Vec<i64>> = m
            .ctx
            .ray_ids
            .iter()
            .map(|r| rays[r].iter().filter_map(|z| z.finite()).collect())
            .collect();
        let grid = ThresholdGrid::new(thresholds);
        let mut set: BTreeSet<ZVec> = m.elements.iter().cloned().collect();
        for p in certificate_points(&grid, &m.ctx, margin)? {
            set.insert(grid.lower_corner(&grid.cell_of(&p)));
        }
        set.insert(ZVec::bottom(m.ctx.num_rays()));
        let mut v: Vec<ZVec> = set.into_iter().collect();
        canonical_sort(&mut v);
        full.insert(s, v);
    }
    let mut mismatches = Vec::new();
    for tau in fam.faces() {
        let mut union = BTreeSet::new();
        let mut each = Vec::new();
        for s in fam.containing(tau) {
            let pos = fam.positions(s, tau)?;
            let proj: BTreeSet<ZVec> = full[&s].iter().map(|e| e.project(&pos)).collect();
            union.extend(proj.iter().cloned());
            each.push((s, proj));
        }
        for (s, proj) in each {
            if proj != union {
                mismatches.push((s, tau));
            }
        }
        let mut v: Vec<ZVec> = union.into_iter().collect();
        canonical_sort(&mut v);
        full.insert(tau, v);
    }
    let cones = full
        .iter()
        .map(|(&c, v)| (c, finite_view(v, fam.fan.cone(c).rays.len())))
        .collect();
    Ok(Refinement {
        rays: rays
            .into_iter()
            .map(|(r, s)| (r, s.into_iter().collect()))
            .collect(),
        full,
        cones,
        mismatches,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftRule {
    /// `n` on the rays of the cone, the largest refined value on the others.
    General,
    /// Tables given with the family, one per maximal cone.
    Explicit,
}

/// `λ_σ` for every cone: finite elements of the refined poset and their lifts to `Z^{Δ(1)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub cones: BTreeMap<usize, Vec<(Vec<i64>, Vec<i64>)>>,
}

impl Lift {
    pub fn image(&self) -> BTreeSet<Vec<i64>> {
        self.cones
            .values()
            .flatten()
            .map(|(_, l)| l.clone())
            .collect()
    }
}

fn lift_maximal<F: Scalar>(
    fam: &DeltaFamily<F>,
    refinement: &Refinement,
    rule: LiftRule,
) -> Result<BTreeMap<usize, Vec<(Vec<i64>, Vec<i64>)>>> {
    let nrays = fam.fan.rays.len();
    let top: Vec<i64> = (0..nrays)
        .map(|r| {
            refinement
                .rays
                .get(&r)
                .and_then(|v| v.iter().filter_map(|z| z.finite()).max())
                .unwrap_or(0)
        })
        .collect();
    let mut out = BTreeMap::new();
    for (&s, m) in &fam.modules {
        let table = match rule {
            LiftRule::General => None,
            LiftRule::Explicit => Some(fam.lifts.iter().find(|t| t.cone == s)),
        };
        let mut pairs = Vec::new();
        for e in &refinement.cones[&s] {
            let Some(n) = e.to_ints() else { continue };
            let lift = match table {
                None => {
                    let mut l = top.clone();
                    for (k, &r) in m.ctx.ray_ids.iter().enumerate() {
                        l[r] = n[k];
                    }
                    l
                }
                Some(t) => t
                    .ok_or_else(|| Error::LiftAxiom(format!("no lift table for cone {s}")))?
                    .entries
                    .iter()
                    .find(|x| x.element == n)
                    .map(|x| x.lift.clone())
                    .ok_or_else(|| {
                        Error::LiftAxiom(format!("no lift given for {e} on cone {s}"))
                    })?,
            };
            if lift.len() != nrays {
                return Err(Error::LiftAxiom(format!(
                    "lift of {e} on cone {s} needs {nrays} entries"
                )));
            }
            pairs.push((n, lift));
        }
        out.insert(s, pairs);
    }
    Ok(out)
}

/// Lifts of the maximal cones by the given rule, and of every face by the lcm over the cones
/// containing it. Checks injectivity, monotonicity and that the lift projects back.
pub fn build_lift<F: Scalar>(
    fam: &DeltaFamily<F>,
    refinement: &Refinement,
    rule: LiftRule,
) -> Result<Lift> {
    let mut cones = lift_maximal(fam, refinement, rule)?;
    for tau in fam.faces() {
        let mut pairs = Vec::new();
        for e in &refinement.cones[&tau] {
            let Some(n) = e.to_ints() else { continue };
            let mut acc: Option<Vec<i64>> = None;
            for s in fam.containing(tau) {
                let pos = fam.positions(s, tau)?;
                for (x, l) in &cones[&s] {
                    if pos.iter().map(|&i| x[i]).eq(n.iter().copied()) {
                        acc = Some(match acc {
                            None => l.clone(),
                            Some(a) => a.iter().zip(l).map(|(u, v)| *u.max(v)).collect(),
                        });
                    }
                }
            }
            let l =
                acc.ok_or_else(|| Error::LiftAxiom(format!("{e} on face {tau} has no preimage")))?;
            pairs.push((n, l));
        }
        cones.insert(tau, pairs);
    }
    for (&c, pairs) in &cones {
        let ids = &fam.fan.cone(c).rays;
        for (i, (n, l)) in pairs.iter().enumerate() {
            if !ids.iter().map(|&r| l[r]).eq(n.iter().copied()) {
                return Err(Error::LiftAxiom(format!(
                    "lift {l:?} of {n:?} on cone {c} does not project back"
                )));
            }
            for (n2, l2) in &pairs[i + 1..] {
                if l == l2 {
                    return Err(Error::LiftAxiom(format!(
                        "lift on cone {c} is not injective at {l:?}"
                    )));
                }
                if (leq(n, n2) && !leq(l, l2)) || (leq(n2, n) && !leq(l2, l)) {
                    return Err(Error::LiftAxiom(format!(
                        "lift on cone {c} does not preserve {n:?}, {n2:?}"
                    )));
                }
            }
        }
    }
    Ok(Lift { cones })
}

/// The joint limit defining `EÊ_n`: lattice points of every maximal cone above `π_σ(n)` in a
/// common box, localized values on the faces, and the gluing between them.
struct GlobalLimit<F: Scalar> {
    keys: Vec<(usize, Vec<i64>)>,
    index: BTreeMap<(usize, Vec<i64>), usize>,
    limit: Limit<F>,
}

impl<F: Scalar> GlobalLimit<F> {
    fn dim(&self) -> usize {
        self.limit.dim()
    }

    fn projection(&self, cone: usize, p: &[i64]) -> Option<&Matrix<F>> {
        self.index
            .get(&(cone, p.to_vec()))
            .map(|&i| &self.limit.projections[i])
    }

    /// Projections onto the listed nodes, stacked.
    fn stacked(&self, keys: &[(usize, Vec<i64>)], cols: usize) -> Result<Matrix<F>> {
        let mut out = Matrix::zeros(0, cols);
        for (c, p) in keys {
            let m = self.projection(*c, p).ok_or_else(|| {
                Error::WindowTooLarge(format!("node {p:?} of cone {c} lies outside the box"))
            })?;
            out = out.vstack(m)?;
        }
        Ok(out)
    }

    /// The restriction to a limit taken further up, in its coordinates.
    fn restrict_to(&self, other: &GlobalLimit<F>) -> Result<Matrix<F>> {
        let s = self.stacked(&other.keys, self.dim())?;
        let t = other.stacked(&other.keys, other.dim())?;
        t.solve(&s)
            .ok_or_else(|| Error::NotFunctorial("restriction leaves the smaller limit".into()))
    }
}

struct GlobalBuilder<'a, F: Scalar> {
    fam: &'a DeltaFamily<F>,
    /// Upper corner of the box of each maximal cone.
    top: BTreeMap<usize, Vec<i64>>,
    faces: Vec<(usize, Vec<usize>)>,
}

impl<'a, F: Scalar> GlobalBuilder<'a, F> {
    fn new(fam: &'a DeltaFamily<F>, points: &[Vec<i64>], margin: i64) -> Self {
        let mut top = BTreeMap::new();
        for (&s, m) in &fam.modules {
            let mut t: Vec<i64> = m.beyond().iter().map(|b| b + margin).collect();
            for p in points {
                for (k, &r) in m.ctx.ray_ids.iter().enumerate() {
                    t[k] = t[k].max(p[r] + margin);
                }
            }
            top.insert(s, t);
        }
        let faces = fam
            .faces()
            .into_iter()
            .map(|t| (t, fam.containing(t)))
            .collect();
        GlobalBuilder { fam, top, faces }
    }

    fn limit_at(&self, n: &[i64]) -> Result<GlobalLimit<F>> {
        let fam = self.fam;
        let mut keys: Vec<(usize, Vec<i64>)> = Vec::new();
        let mut dims = Vec::new();
        let mut edges: Vec<(usize, usize, Matrix<F>)> = Vec::new();
        let mut index: BTreeMap<(usize, Vec<i64>), usize> = BTreeMap::new();
        let mut boxes: BTreeMap<usize, Vec<Vec<i64>>> = BTreeMap::new();
        for (&s, m) in &fam.modules {
            let lo: Vec<i64> = m.ctx.ray_ids.iter().map(|&r| n[r]).collect();
            let pts: Vec<Vec<i64>> = m
                .ctx
                .points_in_box(&lo, &self.top[&s])?
                .into_iter()
                .map(|(_, p)| p)
                .collect();
            let first = keys.len();
            for p in &pts {
                index.insert((s, p.clone()), keys.len());
                keys.push((s, p.clone()));
                dims.push(m.dim_at(p)?);
            }
            let order = Preorder::from_fn(pts.len(), |a, b| leq(&pts[a], &pts[b]))?;
            for (a, b) in order.generating_pairs() {
                edges.push((first + a, first + b, m.map(&pts[a], &pts[b])?));
            }
            boxes.insert(s, pts);
        }
        for (tau, above) in &self.faces {
            let reference = above[0];
            let mut qs: BTreeSet<Vec<i64>> = BTreeSet::new();
            for &s in above {
                let pos = fam.positions(s, *tau)?;
                qs.extend(
                    boxes[&s]
                        .iter()
                        .map(|p| pos.iter().map(|&i| p[i]).collect::<Vec<i64>>()),
                );
            }
            let qs: Vec<Vec<i64>> = qs.into_iter().collect();
            let first = keys.len();
            for q in &qs {
                index.insert((*tau, q.clone()), keys.len());
                keys.push((*tau, q.clone()));
                dims.push(fam.localized_dim(reference, *tau, q)?);
            }
            let order = Preorder::from_fn(qs.len(), |a, b| leq(&qs[a], &qs[b]))?;
            for (a, b) in order.generating_pairs() {
                edges.push((
                    first + a,
                    first + b,
                    fam.localized_map(reference, *tau, &qs[a], &qs[b])?,
                ));
            }
            for &s in above {
                let m = &fam.modules[&s];
                let pos = fam.positions(s, *tau)?;
                for p in &boxes[&s] {
                    let q: Vec<i64> = pos.iter().map(|&i| p[i]).collect();
                    let target = m.localized_point(&pos, &q, Some(p));
                    let local = m.map(p, &target)?;
                    let glued = fam.glue(s, reference, *tau, &q)?.mul(&local);
                    edges.push((index[&(s, p.clone())], index[&(*tau, q)], glued));
                }
            }
        }
        let refs: Vec<(usize, usize, &Matrix<F>)> =
            edges.iter().map(|(a, b, m)| (*a, *b, m)).collect();
        Ok(GlobalLimit {
            keys,
            index,
            limit: limit_of_edges(&dims, &refs),
        })
    }

    /// Projection of `EÊ_n` onto `EE^σ_{π_σ n}`, the limit over the nodes of cone `σ` alone.
    fn cone_projection(&self, g: &GlobalLimit<F>, cone: usize) -> Result<Matrix<F>> {
        let fam = self.fam;
        let own: Vec<usize> = (0..g.keys.len()).filter(|&i| g.keys[i].0 == cone).collect();
        let pts: Vec<Vec<i64>> = own.iter().map(|&i| g.keys[i].1.clone()).collect();
        let (dims, maps): (Vec<usize>, Vec<(usize, usize, Matrix<F>)>) =
            if let Some(m) = fam.modules.get(&cone) {
                let dims = pts
                    .iter()
                    .map(|p| m.dim_at(p))
                    .collect::<Result<Vec<_>>>()?;
                let order = Preorder::from_fn(pts.len(), |a, b| leq(&pts[a], &pts[b]))?;
                let maps = order
                    .generating_pairs()
                    .into_iter()
                    .map(|(a, b)| Ok((a, b, m.map(&pts[a], &pts[b])?)))
                    .collect::<Result<Vec<_>>>()?;
                (dims, maps)
            } else {
                let reference = fam.containing(cone)[0];
                let dims = pts
                    .iter()
                    .map(|q| fam.localized_dim(reference, cone, q))
                    .collect::<Result<Vec<_>>>()?;
                let order = Preorder::from_fn(pts.len(), |a, b| leq(&pts[a], &pts[b]))?;
                let maps = order
                    .generating_pairs()
                    .into_iter()
                    .map(|(a, b)| Ok((a, b, fam.localized_map(reference, cone, &pts[a], &pts[b])?)))
                    .collect::<Result<Vec<_>>>()?;
                (dims, maps)
            };
        let refs: Vec<(usize, usize, &Matrix<F>)> =
            maps.iter().map(|(a, b, m)| (*a, *b, m)).collect();
        let local = limit_of_edges(&dims, &refs);
        let keys: Vec<(usize, Vec<i64>)> = pts.iter().map(|p| (cone, p.clone())).collect();
        let s = g.stacked(&keys, g.dim())?;
        let mut t = Matrix::zeros(0, local.dim());
        for p in &local.projections {
            t = t.vstack(p)?;
        }
        t.solve(&s).ok_or_else(|| {
            Error::NotFunctorial(format!("projection onto cone {cone} leaves its limit"))
        })
    }
}

/// `dim EÊ_n` for a degree `n ∈ Z^{Δ(1)}`.
pub fn ehat_dim<F: Scalar>(fam: &DeltaFamily<F>, n: &[i64], margin: Option<i64>) -> Result<usize> {
    if n.len() != fam.fan.rays.len() {
        return Err(Error::DimensionMismatch(format!(
            "degree needs {} entries",
            fam.fan.rays.len()
        )));
    }
    let m = margin.unwrap_or_else(|| fam.default_margin());
    Ok(GlobalBuilder::new(fam, &[n.to_vec()], m).limit_at(n)?.dim())
}

/// A global resolution by sums of `O(D_n)`, `D_n = -Σ n_ρ D_ρ`, with per-cone certificates.
#[derive(Clone, Debug)]
pub struct GlobalResolution<F: Scalar> {
    pub refinement: Refinement,
    pub lift: Lift,
    /// The lifted poset, bottom first.
    pub poset: Vec<ZVec>,
    pub dims: Vec<usize>,
    pub levels: Vec<Vec<Vec<i64>>>,
    pub differentials: Vec<Vec<Entry<F>>>,
    pub cones: Vec<ConeCheck<F>>,
}

impl<F: Scalar> GlobalResolution<F> {
    pub fn length(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn summary(&self) -> Vec<Vec<LevelSummary>> {
        crate::reflexive::summarize(&self.levels)
    }
}

/// The smallest-dimensional subspace mapping onto each target: sums of the complement sections
/// column by column, or all section columns when that sum falls short.
fn surjecting_subspace<F: Scalar>(dim: usize, targets: &[Matrix<F>]) -> Result<Subspace<F>> {
    let full = Subspace::full(dim);
    let mut sections = Vec::new();
    for t in targets {
        sections.push(complement_section(&kernel(t), &full)?);
    }
    let width = sections.iter().map(Matrix::cols).max().unwrap_or(0);
    let mut summed = Vec::new();
    for i in 0..width {
        let mut v = vec![F::zero(); dim];
        for s in sections.iter().filter(|s| s.cols() > i) {
            for (a, b) in v.iter_mut().zip(s.column(i)) {
                *a = a.add(&b);
            }
        }
        summed.push(v);
    }
    let w = Subspace::from_vectors(&summed, dim)?;
    let onto = |w: &Subspace<F>| {
        targets
            .iter()
            .all(|t| t.mul(&w.basis_columns()).rank() == t.rank())
    };
    if onto(&w) {
        return Ok(w);
    }
    let all: Vec<Vec<F>> = sections
        .iter()
        .flat_map(|s| (0..s.cols()).map(|i| s.column(i)))
        .collect();
    Subspace::from_vectors(&all, dim)
}

pub fn global_resolution<F: Scalar>(
    fam: &DeltaFamily<F>,
    rule: LiftRule,
    margin: Option<i64>,
) -> Result<GlobalResolution<F>> {
    let margin = margin.unwrap_or_else(|| fam.default_margin());
    let refinement = refine(fam, margin)?;
    let lift = build_lift(fam, &refinement, rule)?;
    let points: Vec<Vec<i64>> = lift.image().into_iter().collect();
    let builder = GlobalBuilder::new(fam, &points, margin);
    let limits = points
        .iter()
        .map(|p| builder.limit_at(p))
        .collect::<Result<Vec<_>>>()?;

    // E' at every lifted point, and the surjectivity of the lift onto EE^σ_n
    let mut generated: Vec<Subspace<F>> = Vec::new();
    for (y, g) in points.iter().zip(&limits) {
        let mut targets = Vec::new();
        for (&c, pairs) in &lift.cones {
            for (n, l) in pairs {
                if l != y {
                    continue;
                }
                let proj = builder.cone_projection(g, c)?;
                let original = fam.modules.get(&c).is_some_and(|m| {
                    m.elements
                        .iter()
                        .any(|e| e.to_ints().as_deref() == Some(n.as_slice()))
                });
                if original && !proj.is_surjective() {
                    return Err(Error::LiftAxiom(format!(
                        "the lift {y:?} of {n:?} on cone {c} does not surject onto its extension"
                    )));
                }
                targets.push(proj);
            }
        }
        generated.push(surjecting_subspace(g.dim(), &targets)?);
    }

    // values of the generated submodule on the lifted poset
    let k = points.len();
    let mut restrictions: BTreeMap<(usize, usize), Matrix<F>> = BTreeMap::new();
    for a in 0..k {
        for b in 0..k {
            if a != b && leq(&points[a], &points[b]) {
                restrictions.insert((a, b), limits[a].restrict_to(&limits[b])?);
            }
        }
    }
    let mut values: Vec<Subspace<F>> = Vec::new();
    for b in 0..k {
        let mut v = generated[b].clone();
        for a in 0..k {
            if let Some(r) = restrictions.get(&(a, b)) {
                v = v.join(&generated[a].image_under(r)?)?;
            }
        }
        values.push(v);
    }
    let nrays = fam.fan.rays.len();
    let mut poset: Vec<ZVec> = vec![ZVec::bottom(nrays)];
    poset.extend(points.iter().map(|p| ZVec::from_ints(p)));
    let shape = componentwise_order(&poset);
    let mut dims = vec![0];
    dims.extend(values.iter().map(Subspace::dim));
    let mut maps = BTreeMap::new();
    for (x, y) in shape.generating_pairs() {
        let m = if x == 0 {
            Matrix::zeros(dims[y], 0)
        } else {
            let r = &restrictions[&(x - 1, y - 1)];
            values[y - 1]
                .coordinate_matrix(&r.mul(&values[x - 1].basis_columns()))
                .ok_or_else(|| Error::NotFunctorial("generated values are not preserved".into()))?
        };
        maps.insert((x, y), m);
    }
    let rep = PosetRep::new(shape, dims.clone(), maps)?;
    let r = free_resolution(&rep)?;
    check_exact(&r)?;
    let (levels, differentials) = unzip_levels(&r, &poset)?;

    let mut cones = Vec::new();
    for (&s, module) in &fam.modules {
        let ids = &module.ctx.ray_ids;
        let project = |d: &Vec<i64>| -> Vec<i64> { ids.iter().map(|&r| d[r]).collect() };
        let local_levels: Vec<Vec<Vec<i64>>> = levels
            .iter()
            .map(|l| l.iter().map(project).collect())
            .collect();
        let local_diffs = differentials
            .iter()
            .map(|d| {
                d.iter()
                    .map(|e| Entry {
                        row: e.row,
                        col: e.col,
                        coeff: e.coeff.clone(),
                        exponent: project(&e.exponent),
                    })
                    .collect()
            })
            .collect();
        let mut t = module.grid().thresholds;
        for l in &local_levels {
            for d in l {
                for (a, v) in t.iter_mut().zip(d) {
                    a.push(*v);
                }
            }
        }
        let mut certificate = Vec::new();
        for p in certificate_points(&ThresholdGrid::new(t), &module.ctx, margin)? {
            let dim = module.dim_at(&p)?;
            let mut cols = Vec::new();
            if let Some(level) = local_levels.first() {
                for (g, d) in level.iter().enumerate() {
                    if !leq(d, &p) {
                        continue;
                    }
                    let (x, j) = local_index(&r, 0, g);
                    let u = values[x - 1]
                        .basis_columns()
                        .apply(&r.augmentation.components[x].column(j));
                    let lim = &limits[x - 1];
                    let node = lim
                        .keys
                        .iter()
                        .filter(|(c, q)| *c == s && leq(q, &p))
                        .map(|(_, q)| q.clone())
                        .max_by(|a, b| a.iter().sum::<i64>().cmp(&b.iter().sum::<i64>()))
                        .ok_or_else(|| {
                            Error::WindowTooLarge(format!(
                                "no node below {p:?} for generator {g} on cone {s}"
                            ))
                        })?;
                    let proj = lim.projection(s, &node).expect("node of the box");
                    cols.push(module.map(&node, &p)?.apply(&proj.apply(&u)));
                }
            }
            certificate.push(CertPoint {
                augmentation: Matrix::from_columns(&cols, dim)?,
                degree: p,
            });
        }
        let resolution = GradedResolution {
            rank: module.ctx.num_rays(),
            levels: local_levels,
            differentials: local_diffs,
            certificate,
        };
        verify_resolution(module, &resolution)?;
        cones.push(ConeCheck {
            cone: s,
            resolution,
        });
    }
    Ok(GlobalResolution {
        refinement,
        lift,
        poset,
        dims,
        levels,
        differentials,
        cones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Q;
    use crate::toricfan::p1xp1;

    /// A skyscraper with one-dimensional stalks at the fixed points of two maximal cones.
    pub(crate) fn skyscraper(first: [i64; 2], second: [i64; 2], lifts: &str) -> DeltaFamilyFile {
        let fan = serde_json::to_string(&p1xp1()).unwrap();
        let point = |c: usize, m: [i64; 2], gens: [[i64; 2]; 2]| {
            format!(
                r#"{{"cone":{c},"presentation":{{"vars":2,"generators":[[{},{}]],"relations":[
                   {{"row":0,"col":0,"coeff":1,"exponent":[{},{}]}},
                   {{"row":1,"col":0,"coeff":1,"exponent":[{},{}]}}]}}}}"#,
                m[0], m[1], gens[0][0], gens[0][1], gens[1][0], gens[1][1]
            )
        };
        let zero = |c: usize| format!(r#"{{"cone":{c},"poset":[["-inf","-inf"]],"dims":[0]}}"#);
        let text = format!(
            r#"{{"fan":{fan},"cones":[{},{},{},{}],"lifts":{lifts}}}"#,
            point(5, first, [[1, 0], [0, 1]]),
            point(6, second, [[0, 1], [-1, 0]]),
            zero(7),
            zero(8)
        );
        serde_json::from_str(&text).unwrap()
    }

    fn table(cone: usize, entries: &[([i64; 2], [i64; 4])]) -> String {
        let e: Vec<String> = entries
            .iter()
            .map(|(n, l)| format!(r#"{{"element":{n:?},"lift":{l:?}}}"#))
            .collect();
        format!(r#"{{"cone":{cone},"entries":[{}]}}"#, e.join(","))
    }

    fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        v.sort();
        v
    }

    pub(crate) fn diagonal_lifts() -> String {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for x in 1..=2 {
            for y in 1..=2 {
                a.push(([x, y], [x, y, x, 0]));
                b.push(([x, y], [y, x, y, 0]));
            }
        }
        format!("[{},{}]", table(5, &a), table(6, &b))
    }

    #[test]
    fn refinement_of_shifted_stalks() {
        let fam = DeltaFamily::<Q>::from_file(&skyscraper([1, 1], [-1, 1], "[]")).unwrap();
        let r = refine(&fam, 3).unwrap();
        let fin = |v: &[i64]| ZVec::from_ints(v);
        assert_eq!(
            r.cones[&5],
            vec![
                ZVec::bottom(2),
                fin(&[1, 1]),
                fin(&[1, 2]),
                fin(&[2, 1]),
                fin(&[2, 2])
            ]
        );
        assert_eq!(r.cones[&2], vec![ZVec::bottom(1), fin(&[1]), fin(&[2])]);
        assert!(r.mismatches.is_empty());
        assert!(validate_delta_family(&fam).valid);
    }

    #[test]
    fn ehat_is_two_dimensional_at_the_shared_degree() {
        let fam = DeltaFamily::<Q>::from_file(&skyscraper([1, 1], [-1, 1], "[]")).unwrap();
        assert_eq!(ehat_dim(&fam, &[1, 1, 1, 0], None).unwrap(), 2);
        assert_eq!(ehat_dim(&fam, &[2, 1, 2, 0], None).unwrap(), 0);
        assert_eq!(ehat_dim(&fam, &[1, 1, 2, 0], None).unwrap(), 1);
    }

    #[test]
    fn diagonal_lift_resolution() {
        let fam =
            DeltaFamily::<Q>::from_file(&skyscraper([1, 1], [-1, 1], &diagonal_lifts())).unwrap();
        let r = global_resolution(&fam, LiftRule::Explicit, None).unwrap();
        assert_eq!(r.levels[0], vec![vec![1, 1, 1, 0]]);
        assert_eq!(
            sorted(r.levels[1].clone()),
            vec![vec![1, 2, 1, 0], vec![2, 1, 2, 0]]
        );
        assert_eq!(r.levels[2], vec![vec![2, 2, 2, 0]]);
        assert_eq!(r.cones.len(), 4);
    }

    #[test]
    fn separated_stalks_resolve_as_two_koszul_complexes() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for x in 0..=1 {
            for y in 0..=3 {
                a.push(([x, y], [x, y, 2, 0]));
            }
        }
        for y in 0..=3 {
            for z in 2..=3 {
                b.push(([y, z], [0, y, z, 0]));
            }
        }
        let lifts = format!("[{},{}]", table(5, &a), table(6, &b));
        let fam = DeltaFamily::<Q>::from_file(&skyscraper([0, 0], [-2, 2], &lifts)).unwrap();
        let r = global_resolution(&fam, LiftRule::Explicit, None).unwrap();
        assert_eq!(
            sorted(r.levels[0].clone()),
            vec![vec![0, 0, 2, 0], vec![0, 2, 2, 0]]
        );
        assert_eq!(
            sorted(r.levels[1].clone()),
            vec![
                vec![0, 1, 2, 0],
                vec![0, 2, 3, 0],
                vec![0, 3, 2, 0],
                vec![1, 0, 2, 0]
            ]
        );
        assert_eq!(
            sorted(r.levels[2].clone()),
            vec![vec![0, 3, 3, 0], vec![1, 1, 2, 0]]
        );
    }

    #[test]
    fn general_lift_is_certified() {
        let fam = DeltaFamily::<Q>::from_file(&skyscraper([1, 1], [-1, 1], "[]")).unwrap();
        let r = global_resolution(&fam, LiftRule::General, None).unwrap();
        assert!(!r.levels.is_empty());
        assert_eq!(r.cones.len(), 4);
    }

    #[test]
    fn zero_gluing_is_rejected() {
        let fam = p1xp1();
        let text = format!(
            r#"{{"fan":{},"cones":[
              {{"cone":5,"poset":[[0,0]],"dims":[1]}},{{"cone":6,"poset":[[0,0]],"dims":[1]}},
              {{"cone":7,"poset":[[0,0]],"dims":[1]}},{{"cone":8,"poset":[[0,0]],"dims":[1]}}],
              "gluing":[{{"cones":[5,6],"face":2,"degree":[0],"matrix":[[0]]}}]}}"#,
            serde_json::to_string(&fam).unwrap()
        );
        let f: DeltaFamilyFile = serde_json::from_str(&text).unwrap();
        let d = DeltaFamily::<Q>::from_file(&f).unwrap();
        assert!(!validate_delta_family(&d).valid);
        let mut ok = f.clone();
        ok.gluing.clear();
        let d = DeltaFamily::<Q>::from_file(&ok).unwrap();
        assert!(validate_delta_family(&d).valid);
        // the structure sheaf: Cox ring degrees n ≥ 0
        assert_eq!(ehat_dim(&d, &[0, 0, 0, 0], None).unwrap(), 1);
        assert_eq!(ehat_dim(&d, &[1, 0, 2, 0], None).unwrap(), 1);
        assert_eq!(ehat_dim(&d, &[-1, 0, 0, 0], None).unwrap(), 0);
    }
}
