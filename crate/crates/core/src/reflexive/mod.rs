//! Reflexive modules given by full filtrations, their subspace arrangements and resolutions.

mod global;
mod model;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use global::{
    global_reflexive_resolution, reflexive_lift, summarize, ConeCheck, GlobalReflexiveResolution,
    LevelSummary,
};
pub use model::{
    reflexive_model_export, verify_model, FlagSpec, ModelFile, ModelSubspace, ReflexiveModel,
};

use crate::error::{Error, Result};
use crate::exactla::{kernel, Matrix, Scalar, Subspace};
use crate::grmod::{
    certificate_points, resolve_zipped, GradedModule, GradedResolution, ScalarRepr, ZippedModule,
};
use crate::poset::{is_contraction, Preorder};
use crate::posrep::{from_subspaces, PosetRep};
use crate::toricfan::ConeContext;
use crate::zbar::{componentwise_order, ThresholdGrid, ZVec, Zbar};

/// A full filtration `E(i)` of the ambient space, stored by its jumps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration<F: Scalar> {
    jumps: Vec<(i64, Subspace<F>)>,
}

impl<F: Scalar> Filtration<F> {
    /// Indices must increase strictly, subspaces must grow strictly and end at the ambient space.
    pub fn new(ambient: usize, jumps: Vec<(i64, Subspace<F>)>) -> Result<Self> {
        let Some((_, last)) = jumps.last() else {
            return Err(Error::InvalidModule("filtration has no jumps".into()));
        };
        if last.dim() != ambient {
            return Err(Error::InvalidModule("filtration is not full".into()));
        }
        for w in jumps.windows(2) {
            let ((i, a), (j, b)) = (&w[0], &w[1]);
            if i >= j {
                return Err(Error::InvalidModule(format!(
                    "jump indices {i}, {j} do not increase"
                )));
            }
            if !a.is_subspace_of(b) || a.dim() == b.dim() {
                return Err(Error::InvalidModule(format!(
                    "subspaces at jumps {i} and {j} do not increase strictly"
                )));
            }
        }
        if jumps.iter().any(|(_, w)| w.ambient() != ambient) {
            return Err(Error::DimensionMismatch("filtration ambient".into()));
        }
        if jumps[0].1.dim() == 0 {
            return Err(Error::InvalidModule(
                "a jump to the zero space is not a jump".into(),
            ));
        }
        Ok(Filtration { jumps })
    }

    pub fn ambient(&self) -> usize {
        self.jumps[0].1.ambient()
    }

    pub fn jumps(&self) -> &[(i64, Subspace<F>)] {
        &self.jumps
    }

    pub fn indices(&self) -> Vec<i64> {
        self.jumps.iter().map(|(i, _)| *i).collect()
    }

    pub fn value(&self, i: i64) -> Subspace<F> {
        let k = self.jumps.partition_point(|(j, _)| *j <= i);
        match k {
            0 => Subspace::zero(self.ambient()),
            _ => self.jumps[k - 1].1.clone(),
        }
    }

    /// `min { i : W ⊆ E(i) }`, `-inf` for `W = 0`.
    pub fn kappa(&self, w: &Subspace<F>) -> Zbar {
        if w.dim() == 0 {
            return Zbar::NegInf;
        }
        let k = self.jumps.partition_point(|(_, s)| !w.is_subspace_of(s));
        Zbar::Fin(self.jumps[k].0)
    }
}

/// Filtrations of one ambient space, one per ray of a fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtrations<F: Scalar> {
    pub ambient: usize,
    pub by_ray: BTreeMap<usize, Filtration<F>>,
}

/// On-disk form: `{ambient_dim, rays: {ray: [[jump_index, basis rows], ...]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationFile {
    pub ambient_dim: usize,
    pub rays: BTreeMap<String, Vec<(i64, Vec<Vec<ScalarRepr>>)>>,
}

pub(crate) fn parse_rows<F: Scalar>(
    rows: &[Vec<ScalarRepr>],
    ambient: usize,
) -> Result<Subspace<F>> {
    let vectors = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(ScalarRepr::to_scalar)
                .collect::<Result<Vec<F>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if vectors.iter().any(|v| v.len() != ambient) {
        return Err(Error::DimensionMismatch(format!(
            "basis vectors must have {ambient} entries"
        )));
    }
    Subspace::from_vectors(&vectors, ambient)
}

pub(crate) fn rows_of<F: Scalar>(w: &Subspace<F>) -> Vec<Vec<ScalarRepr>> {
    w.basis_rows()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(ScalarRepr::from_scalar).collect())
        .collect()
}

impl<F: Scalar> Filtrations<F> {
    pub fn from_file(file: &FiltrationFile) -> Result<Self> {
        let mut by_ray = BTreeMap::new();
        for (key, jumps) in &file.rays {
            let ray: usize = key
                .parse()
                .map_err(|_| Error::Parse(format!("ray key {key:?} is not an index")))?;
            let parsed = jumps
                .iter()
                .map(|(i, rows)| Ok((*i, parse_rows(rows, file.ambient_dim)?)))
                .collect::<Result<Vec<_>>>()?;
            by_ray.insert(ray, Filtration::new(file.ambient_dim, parsed)?);
        }
        Ok(Filtrations {
            ambient: file.ambient_dim,
            by_ray,
        })
    }

    pub fn to_file(&self) -> FiltrationFile {
        FiltrationFile {
            ambient_dim: self.ambient,
            rays: self
                .by_ray
                .iter()
                .map(|(r, f)| {
                    (
                        r.to_string(),
                        f.jumps.iter().map(|(i, w)| (*i, rows_of(w))).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn get(&self, ray: usize) -> Result<&Filtration<F>> {
        self.by_ray
            .get(&ray)
            .ok_or_else(|| Error::InvalidModule(format!("no filtration for ray {ray}")))
    }

    /// The module `E^σ` over the cone's semigroup ring.
    pub fn on_cone(&self, ctx: &ConeContext) -> Result<ReflexiveModule<F>> {
        let filts = ctx
            .ray_ids
            .iter()
            .map(|&r| self.get(r).cloned())
            .collect::<Result<Vec<_>>>()?;
        ReflexiveModule::new(self.ambient, filts, ctx.clone())
    }

    /// `(κ_ρ(W))` over the given rays.
    pub fn kappa(&self, rays: &[usize], w: &Subspace<F>) -> Result<ZVec> {
        rays.iter()
            .map(|&r| Ok(self.get(r)?.kappa(w)))
            .collect::<Result<Vec<_>>>()
            .map(ZVec)
    }
}

/// `E^σ_m = ⋂_ρ E^ρ(⟨m, n(ρ)⟩)`, evaluated in ray-pairing coordinates.
#[derive(Clone, Debug)]
pub struct ReflexiveModule<F: Scalar> {
    pub ambient: usize,
    pub filtrations: Vec<Filtration<F>>,
    pub ctx: ConeContext,
}

impl<F: Scalar> ReflexiveModule<F> {
    pub fn new(ambient: usize, filtrations: Vec<Filtration<F>>, ctx: ConeContext) -> Result<Self> {
        if filtrations.len() != ctx.num_rays() {
            return Err(Error::DimensionMismatch(format!(
                "{} filtrations for {} rays",
                filtrations.len(),
                ctx.num_rays()
            )));
        }
        if filtrations.iter().any(|f| f.ambient() != ambient) {
            return Err(Error::DimensionMismatch("filtration ambient".into()));
        }
        Ok(ReflexiveModule {
            ambient,
            filtrations,
            ctx,
        })
    }

    pub fn value(&self, p: &[i64]) -> Result<Subspace<F>> {
        if p.len() != self.filtrations.len() {
            return Err(Error::DimensionMismatch(format!(
                "degree needs {} entries",
                self.filtrations.len()
            )));
        }
        let mut w = Subspace::full(self.ambient);
        for (f, &i) in self.filtrations.iter().zip(p) {
            w = w.meet(&f.value(i))?;
        }
        Ok(w)
    }

    /// The value at a lattice point of `M`.
    pub fn eval_sigma(&self, m: &[i64]) -> Result<Subspace<F>> {
        self.value(&self.ctx.pairing(m))
    }

    pub fn kappa(&self, w: &Subspace<F>) -> ZVec {
        ZVec(self.filtrations.iter().map(|f| f.kappa(w)).collect())
    }
}

impl<F: Scalar> GradedModule<F> for ReflexiveModule<F> {
    fn rank(&self) -> usize {
        self.filtrations.len()
    }

    fn dim_at(&self, m: &[i64]) -> Result<usize> {
        Ok(self.value(m)?.dim())
    }

    fn map(&self, m: &[i64], m2: &[i64]) -> Result<Matrix<F>> {
        let (a, b) = (self.value(m)?, self.value(m2)?);
        b.coordinate_matrix(&a.basis_columns())
            .ok_or_else(|| Error::InvalidOrder(format!("{m:?} is not below {m2:?}")))
    }

    fn grid(&self) -> ThresholdGrid {
        ThresholdGrid::new(self.filtrations.iter().map(Filtration::indices).collect())
    }
}

/// A subspace arrangement on anchors in `Z̄^r`, ordered by inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement<F: Scalar> {
    pub ambient: usize,
    pub elements: Vec<ZVec>,
    pub spaces: Vec<Subspace<F>>,
    /// A degree realizing each element, when one was found in the search window.
    pub witnesses: Vec<Option<Vec<i64>>>,
}

impl<F: Scalar> Arrangement<F> {
    /// Sorts the elements (bottom first) and checks that inclusion agrees with the anchor order.
    pub fn new(
        ambient: usize,
        elements: Vec<ZVec>,
        spaces: Vec<Subspace<F>>,
        witnesses: Vec<Option<Vec<i64>>>,
    ) -> Result<Self> {
        let mut idx: Vec<usize> = (0..elements.len()).collect();
        idx.sort_by(|&a, &b| {
            elements[b]
                .is_bottom()
                .cmp(&elements[a].is_bottom())
                .then_with(|| elements[a].cmp(&elements[b]))
        });
        let arr = Arrangement {
            ambient,
            elements: idx.iter().map(|&i| elements[i].clone()).collect(),
            spaces: idx.iter().map(|&i| spaces[i].clone()).collect(),
            witnesses: idx.iter().map(|&i| witnesses[i].clone()).collect(),
        };
        arr.check_key_lemma()?;
        Ok(arr)
    }

    fn check_key_lemma(&self) -> Result<()> {
        for (a, (x, u)) in self.elements.iter().zip(&self.spaces).enumerate() {
            for (b, (y, v)) in self.elements.iter().zip(&self.spaces).enumerate() {
                if a != b && (x == y || u == v) {
                    return Err(Error::InvalidModule(format!(
                        "{x} and {y} repeat an anchor or a subspace"
                    )));
                }
                if x.le(y) != u.is_subspace_of(v) {
                    return Err(Error::InvalidModule(format!(
                        "inclusion of the subspaces at {x} and {y} disagrees with their anchors"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> Preorder {
        componentwise_order(&self.elements)
    }

    pub fn rep(&self) -> Result<PosetRep<F>> {
        from_subspaces(&self.order(), &self.spaces)
    }

    pub fn index_of(&self, w: &Subspace<F>) -> Option<usize> {
        self.spaces.iter().position(|s| s == w)
    }

    /// The element whose subspace is `E_p`.
    pub fn anchor_at(&self, module: &ReflexiveModule<F>, p: &[i64]) -> Result<usize> {
        let w = module.value(p)?;
        self.index_of(&w).ok_or_else(|| {
            Error::InvalidModule(format!(
                "value at {} is not in the arrangement",
                ZVec::from_ints(p)
            ))
        })
    }
}

/// Default window margin for a cone.
pub fn default_margin(ctx: &ConeContext) -> i64 {
    2 * ctx.step_bound() + 1
}

pub(crate) fn sample_points<F: Scalar>(
    module: &ReflexiveModule<F>,
    extra: &[ZVec],
    margin: i64,
) -> Result<Vec<Vec<i64>>> {
    let mut t = module.grid().thresholds;
    for (a, b) in t
        .iter_mut()
        .zip(ThresholdGrid::from_elements(module.rank(), extra).thresholds)
    {
        a.extend(b);
    }
    certificate_points(&ThresholdGrid::new(t), &module.ctx, margin)
}

/// The distinct values `E^σ_m` found on the window, anchored by `κ`, together with `0̂ ↦ 0`.
pub fn canonical_poset<F: Scalar>(
    module: &ReflexiveModule<F>,
    margin: i64,
) -> Result<Arrangement<F>> {
    let mut spaces: Vec<Subspace<F>> = vec![Subspace::zero(module.ambient)];
    let mut witnesses: Vec<Option<Vec<i64>>> = vec![None];
    for p in sample_points(module, &[], margin)? {
        let w = module.value(&p)?;
        match spaces.iter().position(|s| *s == w) {
            Some(i) => {
                if witnesses[i].is_none() {
                    witnesses[i] = Some(p);
                }
            }
            None => {
                spaces.push(w);
                witnesses.push(Some(p));
            }
        }
    }
    let elements = spaces.iter().map(|w| module.kappa(w)).collect();
    Arrangement::new(module.ambient, elements, spaces, witnesses)
}

/// Adds all intersections of the arrangement's subspaces, anchored by `κ`.
pub fn intersection_closure<F: Scalar>(
    module: &ReflexiveModule<F>,
    arr: &Arrangement<F>,
) -> Result<Arrangement<F>> {
    let mut spaces = arr.spaces.clone();
    let mut witnesses = arr.witnesses.clone();
    let mut i = 0;
    while i < spaces.len() {
        for j in 0..i {
            let w = spaces[i].meet(&spaces[j])?;
            if !spaces.contains(&w) {
                spaces.push(w);
                witnesses.push(None);
            }
        }
        i += 1;
    }
    let elements = spaces.iter().map(|w| module.kappa(w)).collect();
    Arrangement::new(arr.ambient, elements, spaces, witnesses)
}

/// The arrangement as a compressed form of the module it came from.
pub struct ArrangementZip<'a, F: Scalar> {
    module: &'a ReflexiveModule<F>,
    arr: &'a Arrangement<F>,
    rep: PosetRep<F>,
}

impl<'a, F: Scalar> ArrangementZip<'a, F> {
    pub fn new(module: &'a ReflexiveModule<F>, arr: &'a Arrangement<F>) -> Result<Self> {
        Ok(ArrangementZip {
            module,
            arr,
            rep: arr.rep()?,
        })
    }
}

impl<F: Scalar> ZippedModule<F> for ArrangementZip<'_, F> {
    fn module(&self) -> &dyn GradedModule<F> {
        self.module
    }

    fn elements(&self) -> &[ZVec] {
        &self.arr.elements
    }

    fn rep(&self) -> &PosetRep<F> {
        &self.rep
    }

    fn project(&self, x: usize, p: &[i64]) -> Result<Matrix<F>> {
        self.module
            .value(p)?
            .coordinate_matrix(&self.arr.spaces[x].basis_columns())
            .ok_or_else(|| {
                Error::NotSubspace(format!(
                    "value at {} does not lie in the module at {}",
                    self.arr.elements[x],
                    ZVec::from_ints(p)
                ))
            })
    }
}

/// Resolves the module through an arrangement that is admissible for it. The certificate is
/// checked on every cell of the combined grid.
pub fn arrangement_resolution<F: Scalar>(
    module: &ReflexiveModule<F>,
    arr: &Arrangement<F>,
    margin: i64,
) -> Result<GradedResolution<F>> {
    let zip = ArrangementZip::new(module, arr)?;
    let points = sample_points(module, &arr.elements, margin)?;
    for p in &points {
        let a = crate::zbar::anchor_in(&arr.elements, p)?;
        if module.value(p)? != arr.spaces[a] {
            return Err(Error::Completion {
                anchor: arr.elements[a].to_string(),
                degree: ZVec::from_ints(p).to_string(),
            });
        }
    }
    resolve_zipped(&zip, &points)
}

/// One step of the syzygy chain: the canonical poset of the current module, the generator
/// degrees of its cover, and whether the next canonical poset is a contraction of this one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyzygyStep {
    pub poset: Vec<ZVec>,
    pub generators: Vec<Vec<i64>>,
    pub contraction: Option<bool>,
}

const MAX_LEVELS: usize = 64;

fn free_cover<F: Scalar>(arr: &Arrangement<F>) -> Result<(Vec<Vec<i64>>, Matrix<F>)> {
    let order = arr.order();
    let mut degrees = Vec::new();
    let mut cols = Vec::new();
    for x in 0..arr.elements.len() {
        let Some(n) = arr.elements[x].to_ints() else {
            continue;
        };
        let mut below = Subspace::zero(arr.ambient);
        for y in 0..arr.elements.len() {
            if y != x && order.leq(y, x) {
                below = below.join(&arr.spaces[y])?;
            }
        }
        let section = crate::exactla::complement_section(&below, &arr.spaces[x])?;
        for j in 0..section.cols() {
            degrees.push(n.clone());
            cols.push(section.column(j));
        }
    }
    Ok((degrees, Matrix::from_columns(&cols, arr.ambient)?))
}

/// The kernel `K` of the cover with its filtrations `K^ρ(i) = F^ρ(i) ∩ K`.
fn kernel_module<F: Scalar>(
    module: &ReflexiveModule<F>,
    degrees: &[Vec<i64>],
    phi: &Matrix<F>,
) -> Result<Option<ReflexiveModule<F>>> {
    let k = kernel(phi);
    if k.dim() == 0 {
        return Ok(None);
    }
    let g = degrees.len();
    let mut filts = Vec::new();
    for r in 0..module.rank() {
        let mut idx: Vec<i64> = degrees.iter().map(|d| d[r]).collect();
        idx.sort_unstable();
        idx.dedup();
        let mut jumps: Vec<(i64, Subspace<F>)> = Vec::new();
        for i in idx {
            let basis: Vec<Vec<F>> = (0..g)
                .filter(|&c| degrees[c][r] <= i)
                .map(|c| {
                    (0..g)
                        .map(|j| if j == c { F::one() } else { F::zero() })
                        .collect()
                })
                .collect();
            let f = Subspace::from_vectors(&basis, g)?;
            let meet = f.meet(&k)?;
            let coords = k
                .coordinate_matrix(&meet.basis_columns())
                .expect("the meet lies in the kernel");
            let w = Subspace::from_column_span(&coords);
            let grew = jumps
                .last()
                .map_or(w.dim() > 0, |(_, prev)| w.dim() > prev.dim());
            if grew {
                jumps.push((i, w));
            }
        }
        filts.push(Filtration::new(k.dim(), jumps)?);
    }
    Ok(Some(ReflexiveModule::new(
        k.dim(),
        filts,
        module.ctx.clone(),
    )?))
}

/// Iterates cover and kernel on canonical posets, checking at each step that the next canonical
/// poset is a contraction of the current one via `A_E(m) ↦ A_K(m)`.
pub fn syzygy_chain<F: Scalar>(
    module: &ReflexiveModule<F>,
    margin: i64,
) -> Result<Vec<SyzygyStep>> {
    let mut steps = Vec::new();
    let mut current = module.clone();
    let mut arr = canonical_poset(&current, margin)?;
    for _ in 0..MAX_LEVELS {
        let (degrees, phi) = free_cover(&arr)?;
        let next = kernel_module(&current, &degrees, &phi)?;
        let mut step = SyzygyStep {
            poset: arr.elements.clone(),
            generators: degrees,
            contraction: None,
        };
        let Some(next) = next else {
            steps.push(step);
            return Ok(steps);
        };
        let next_arr = canonical_poset(&next, margin)?;
        step.contraction = Some(retraction(&current, &arr, &next, &next_arr, margin)?.is_some());
        steps.push(step);
        current = next;
        arr = next_arr;
    }
    Err(Error::Unsupported(format!(
        "syzygy chain longer than {MAX_LEVELS} steps"
    )))
}

/// The map `A_E(m) ↦ A_K(m)` when it is well defined on the window and a contraction.
fn retraction<F: Scalar>(
    e: &ReflexiveModule<F>,
    pe: &Arrangement<F>,
    k: &ReflexiveModule<F>,
    pk: &Arrangement<F>,
    margin: i64,
) -> Result<Option<Vec<usize>>> {
    let mut f: Vec<Option<usize>> = vec![None; pe.elements.len()];
    f[0] = Some(0);
    let mut extra = pe.elements.clone();
    extra.extend(pk.elements.iter().cloned());
    let mut points = sample_points(e, &extra, margin)?;
    points.extend(pe.witnesses.iter().flatten().cloned());
    for p in &points {
        let (a, b) = (pe.anchor_at(e, p)?, pk.anchor_at(k, p)?);
        match f[a] {
            Some(c) if c != b => return Ok(None),
            _ => f[a] = Some(b),
        }
    }
    let Some(f) = f.into_iter().collect::<Option<Vec<usize>>>() else {
        return Ok(None);
    };
    Ok(is_contraction(&pe.order(), &pk.order(), &f).then_some(f))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactla::Q;

    pub(crate) fn sub(rows: &[&[i64]]) -> Subspace<Q> {
        let v: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Q::new(x, 1)).collect())
            .collect();
        Subspace::from_vectors(&v, 3).unwrap()
    }

    /// Two planes in general position in `k^3`, on the cone with rays (2,-1), (0,1).
    pub(crate) fn two_planes() -> ReflexiveModule<Q> {
        let e1 = sub(&[&[1, 0, 0], &[0, 1, 0]]);
        let e2 = sub(&[&[0, 1, 0], &[0, 0, 1]]);
        let full = Subspace::full(3);
        let f1 = Filtration::new(3, vec![(0, e1), (1, full.clone())]).unwrap();
        let f2 = Filtration::new(3, vec![(1, e2), (2, full)]).unwrap();
        ReflexiveModule::new(
            3,
            vec![f1, f2],
            ConeContext::new(2, vec![vec![2, -1], vec![0, 1]]),
        )
        .unwrap()
    }

    fn zv(v: &[i64]) -> ZVec {
        ZVec::from_ints(v)
    }

    #[test]
    fn evaluation() {
        let e = two_planes();
        assert_eq!(e.eval_sigma(&[5, 5]).unwrap().dim(), 3);
        assert_eq!(e.eval_sigma(&[-3, 0]).unwrap().dim(), 0);
        // pairings (2,0): below the second filtration's first jump
        assert_eq!(e.eval_sigma(&[1, 0]).unwrap().dim(), 0);
        assert_eq!(
            e.eval_sigma(&[1, 2]).unwrap(),
            sub(&[&[1, 0, 0], &[0, 1, 0]])
        );
        assert_eq!(e.value(&[0, 1]).unwrap(), sub(&[&[0, 1, 0]]));
    }

    #[test]
    fn non_full_filtration_rejected() {
        let e1 = sub(&[&[1, 0, 0]]);
        assert!(matches!(
            Filtration::new(3, vec![(0, e1)]),
            Err(Error::InvalidModule(_))
        ));
    }

    #[test]
    fn canonical_poset_of_two_planes() {
        let e = two_planes();
        let p = canonical_poset(&e, default_margin(&e.ctx)).unwrap();
        assert_eq!(
            p.elements,
            vec![ZVec::bottom(2), zv(&[0, 2]), zv(&[1, 1]), zv(&[1, 2])]
        );
        let r = arrangement_resolution(&e, &p, default_margin(&e.ctx)).unwrap();
        assert_eq!(
            r.levels,
            vec![
                vec![vec![0, 2], vec![0, 2], vec![1, 1], vec![1, 1]],
                vec![vec![1, 2]]
            ]
        );
    }

    #[test]
    fn intersection_closure_splits() {
        let e = two_planes();
        let m = default_margin(&e.ctx);
        let p = intersection_closure(&e, &canonical_poset(&e, m).unwrap()).unwrap();
        assert_eq!(
            p.elements,
            vec![
                ZVec::bottom(2),
                zv(&[0, 1]),
                zv(&[0, 2]),
                zv(&[1, 1]),
                zv(&[1, 2])
            ]
        );
        assert_eq!(p.spaces[1], sub(&[&[0, 1, 0]]));
        assert!(p.witnesses[1].is_none());
        let r = arrangement_resolution(&e, &p, m).unwrap();
        assert_eq!(r.levels, vec![vec![vec![0, 1], vec![0, 2], vec![1, 1]]]);
        assert!(r.differentials.is_empty());
    }

    #[test]
    fn syzygy_chain_contracts() {
        let e = two_planes();
        let chain = syzygy_chain(&e, default_margin(&e.ctx)).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0].contraction, Some(true));
        assert_eq!(chain[1].poset, vec![ZVec::bottom(2), zv(&[1, 2])]);
        assert_eq!(chain[1].generators, vec![vec![1, 2]]);
    }

    #[test]
    fn rank_one_is_free() {
        let full = Subspace::<Q>::full(1);
        let f = |i| Filtration::new(1, vec![(i, full.clone())]).unwrap();
        let e = ReflexiveModule::new(
            1,
            vec![f(2), f(-1)],
            ConeContext::new(2, vec![vec![1, 0], vec![0, 1]]),
        )
        .unwrap();
        let p = canonical_poset(&e, 3).unwrap();
        assert_eq!(p.elements, vec![ZVec::bottom(2), zv(&[2, -1])]);
        let r = arrangement_resolution(&e, &p, 3).unwrap();
        assert_eq!(r.levels, vec![vec![vec![2, -1]]]);
    }

    #[test]
    fn file_round_trip() {
        let e = two_planes();
        let f = Filtrations {
            ambient: 3,
            by_ray: e.filtrations.iter().cloned().enumerate().collect(),
        };
        let file = f.to_file();
        let text = serde_json::to_string(&file).unwrap();
        let back: FiltrationFile = serde_json::from_str(&text).unwrap();
        assert_eq!(Filtrations::<Q>::from_file(&back).unwrap(), f);
    }
}
