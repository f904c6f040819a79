use std::collections::BTreeMap;

use super::resolution::ZippedModule;
use super::GradedModule;
use crate::error::{Error, Result};
use crate::exactla::{complement_section, kernel, limit_of_edges, Limit, Matrix, Scalar, Subspace};
use crate::poset::Preorder;
use crate::posrep::PosetRep;
use crate::toricfan::ConeContext;
use crate::zbar::{anchor_in, componentwise_order, ThresholdGrid, ZVec};

/// How far past the last threshold inverse limits are truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LimitWindow {
    pub margin: i64,
}

impl LimitWindow {
    /// Twice the lattice spacing of the cone plus one.
    pub fn for_cone(ctx: &ConeContext) -> Self {
        LimitWindow {
            margin: 2 * ctx.step_bound() + 1,
        }
    }

    /// Upper corner: the largest threshold per coordinate plus the margin.
    pub fn upper(&self, grid: &ThresholdGrid) -> Vec<i64> {
        grid.thresholds
            .iter()
            .map(|t| t.last().copied().unwrap_or(0) + self.margin)
            .collect()
    }
}

/// `lim E_p` over the lattice points `p` of a box, ordered componentwise.
#[derive(Clone, Debug)]
pub struct BoxLimit<F: Scalar> {
    pub nodes: Vec<Vec<i64>>,
    index: BTreeMap<Vec<i64>, usize>,
    pub limit: Limit<F>,
}

impl<F: Scalar> BoxLimit<F> {
    pub fn dim(&self) -> usize {
        self.limit.dim()
    }

    pub fn node(&self, p: &[i64]) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Projection of the limit onto `E_p`.
    pub fn projection(&self, p: &[i64]) -> Result<&Matrix<F>> {
        self.node(p)
            .map(|i| &self.limit.projections[i])
            .ok_or_else(|| {
                Error::WindowTooLarge(format!("degree {p:?} lies outside the limit box"))
            })
    }

    /// Restriction to a limit over a sub-box, in that limit's coordinates.
    pub fn restrict_to(&self, other: &BoxLimit<F>) -> Result<Matrix<F>> {
        let mut stacked: Option<Matrix<F>> = None;
        let mut target: Option<Matrix<F>> = None;
        for (j, p) in other.nodes.iter().enumerate() {
            let a = self.projection(p)?;
            let b = &other.limit.projections[j];
            stacked = Some(match stacked {
                None => a.clone(),
                Some(s) => s.vstack(a)?,
            });
            target = Some(match target {
                None => b.clone(),
                Some(t) => t.vstack(b)?,
            });
        }
        match (stacked, target) {
            (Some(s), Some(t)) => t
                .solve(&s)
                .ok_or_else(|| Error::NotFunctorial("restriction leaves the smaller limit".into())),
            _ => Ok(Matrix::zeros(other.dim(), self.dim())),
        }
    }
}

/// The limit of `E` over lattice points with pairing in `[lo, hi]`.
pub fn box_limit<F: Scalar>(
    e: &dyn GradedModule<F>,
    ctx: &ConeContext,
    lo: &[i64],
    hi: &[i64],
) -> Result<BoxLimit<F>> {
    let nodes: Vec<Vec<i64>> = ctx
        .points_in_box(lo, hi)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let order = Preorder::from_fn(nodes.len(), |a, b| {
        nodes[a].iter().zip(&nodes[b]).all(|(x, y)| x <= y)
    })?;
    let dims = nodes
        .iter()
        .map(|p| e.dim_at(p))
        .collect::<Result<Vec<_>>>()?;
    let pairs = order.generating_pairs();
    let maps = pairs
        .iter()
        .map(|&(a, b)| e.map(&nodes[a], &nodes[b]))
        .collect::<Result<Vec<_>>>()?;
    let edges: Vec<_> = pairs
        .iter()
        .zip(&maps)
        .map(|(&(a, b), m)| (a, b, m))
        .collect();
    let limit = limit_of_edges(&dims, &edges);
    let index = nodes
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    Ok(BoxLimit {
        nodes,
        index,
        limit,
    })
}

fn merged_grid<F: Scalar>(e: &dyn GradedModule<F>, elements: &[ZVec]) -> ThresholdGrid {
    let mut t = e.grid().thresholds;
    for (a, b) in t
        .iter_mut()
        .zip(ThresholdGrid::from_elements(e.rank(), elements).thresholds)
    {
        a.extend(b);
    }
    ThresholdGrid::new(t)
}

/// A module over `k[σ_M]` compressed onto an admissible poset through anchor completions.
pub struct CompletedModule<'a, F: Scalar> {
    module: &'a dyn GradedModule<F>,
    pub elements: Vec<ZVec>,
    pub rep: PosetRep<F>,
    limits: Vec<Option<BoxLimit<F>>>,
    /// Basis of each completion inside its limit.
    pub values: Vec<Matrix<F>>,
    /// Elements whose anchor region contains no sampled lattice point.
    pub filled: Vec<usize>,
    pub upper: Vec<i64>,
}

impl<F: Scalar> CompletedModule<'_, F> {
    /// `lim E_p` over `p ≥ n` for element `x`.
    pub fn limit(&self, x: usize) -> Option<&BoxLimit<F>> {
        self.limits[x].as_ref()
    }
}

impl<F: Scalar> ZippedModule<F> for CompletedModule<'_, F> {
    fn module(&self) -> &dyn GradedModule<F> {
        self.module
    }

    fn elements(&self) -> &[ZVec] {
        &self.elements
    }

    fn rep(&self) -> &PosetRep<F> {
        &self.rep
    }

    fn project(&self, x: usize, p: &[i64]) -> Result<Matrix<F>> {
        match &self.limits[x] {
            Some(l) => Ok(l.projection(p)?.mul(&self.values[x])),
            None => Ok(Matrix::zeros(self.module.dim_at(p)?, 0)),
        }
    }
}

/// A subspace `W` of the columns of `c` on which every listed projection is an isomorphism.
///
/// Tries the locus where all projections agree first, then a complement of the first
/// projection's kernel.
fn choose_completion<F: Scalar>(c: &Matrix<F>, projections: &[Matrix<F>]) -> Option<Matrix<F>> {
    let d = projections[0].rows();
    if d == 0 {
        return Some(Matrix::zeros(c.rows(), 0));
    }
    let restricted: Vec<Matrix<F>> = projections.iter().map(|p| p.mul(c)).collect();
    let works =
        |w: &Matrix<F>| w.cols() == d && restricted.iter().all(|p| p.mul(w).is_invertible());
    let mut diff: Option<Matrix<F>> = None;
    for p in &restricted[1..] {
        let delta = p.try_add(&restricted[0].scale(&F::one().neg())).ok()?;
        diff = Some(match diff {
            None => delta,
            Some(m) => m.vstack(&delta).ok()?,
        });
    }
    let diagonal = match diff {
        Some(m) => kernel(&m).basis_columns(),
        None => Matrix::identity(c.cols()),
    };
    if works(&diagonal) {
        return Some(c.mul(&diagonal));
    }
    let k = kernel(&restricted[0]);
    let s = complement_section(&k, &Subspace::full(c.cols())).ok()?;
    works(&s).then(|| c.mul(&s))
}

/// Compresses `E` onto the given poset: at each element `n` the completion is a subspace of
/// `lim_{p ≥ n} E_p` mapping isomorphically to `E_p` on its anchor region and compatibly into
/// the completions above it. Elements with an empty region take the compatible part of the limit.
pub fn anchor_completion<'a, F: Scalar>(
    e: &'a dyn GradedModule<F>,
    ctx: &ConeContext,
    elements: &[ZVec],
    window: LimitWindow,
) -> Result<CompletedModule<'a, F>> {
    let n = elements.len();
    let grid = merged_grid(e, elements);
    let upper = window.upper(&grid);
    let points = super::resolution::certificate_points(&grid, ctx, window.margin)?;
    let mut region: Vec<Vec<Vec<i64>>> = vec![Vec::new(); n];
    for p in &points {
        region[anchor_in(elements, p)?].push(p.clone());
    }
    let ints: Vec<Option<Vec<i64>>> = elements.iter().map(ZVec::to_ints).collect();
    let mut order: Vec<usize> = (0..n).filter(|&x| ints[x].is_some()).collect();
    order
        .sort_by_key(|&x| std::cmp::Reverse(ints[x].as_ref().map_or(0, |v| v.iter().sum::<i64>())));

    let mut limits: Vec<Option<BoxLimit<F>>> = (0..n).map(|_| None).collect();
    let mut values: Vec<Matrix<F>> = (0..n).map(|_| Matrix::zeros(0, 0)).collect();
    let mut filled = Vec::new();
    for &x in &order {
        let lo = ints[x].as_ref().expect("finite element");
        let hi: Vec<i64> = upper.iter().zip(lo).map(|(u, l)| *u.max(l)).collect();
        let lim = box_limit(e, ctx, lo, &hi)?;
        let mut compatible = Subspace::full(lim.dim());
        for &y in &order {
            if y == x || !elements[x].le(&elements[y]) {
                continue;
            }
            let upper_lim = limits[y].as_ref().expect("processed before");
            let r = lim.restrict_to(upper_lim)?;
            let w = Subspace::from_column_span(&values[y]);
            compatible = compatible.meet(&w.preimage_under(&r)?)?;
        }
        let c = compatible.basis_columns();
        let value = if region[x].is_empty() {
            filled.push(x);
            c
        } else {
            let dims = region[x]
                .iter()
                .map(|p| e.dim_at(p))
                .collect::<Result<Vec<_>>>()?;
            let projections = region[x]
                .iter()
                .map(|p| lim.projection(p).cloned())
                .collect::<Result<Vec<_>>>()?;
            let mismatch = || Error::Completion {
                anchor: elements[x].to_string(),
                degree: ZVec::from_ints(&region[x][0]).to_string(),
            };
            if dims.iter().any(|&d| d != dims[0]) {
                return Err(mismatch());
            }
            choose_completion(&c, &projections).ok_or_else(mismatch)?
        };
        values[x] = value;
        limits[x] = Some(lim);
    }

    let shape = componentwise_order(elements);
    let dims: Vec<usize> = (0..n)
        .map(|x| {
            if ints[x].is_some() {
                values[x].cols()
            } else {
                0
            }
        })
        .collect();
    let mut maps = BTreeMap::new();
    for (x, y) in shape.generating_pairs() {
        let m = match (&limits[x], &limits[y]) {
            (Some(lx), Some(ly)) => {
                let moved = lx.restrict_to(ly)?.mul(&values[x]);
                values[y].solve(&moved).ok_or_else(|| {
                    Error::NotFunctorial(format!(
                        "completion at {} does not map into the one at {}",
                        elements[x], elements[y]
                    ))
                })?
            }
            _ => Matrix::zeros(dims[y], dims[x]),
        };
        maps.insert((x, y), m);
    }
    Ok(CompletedModule {
        module: e,
        elements: elements.to_vec(),
        rep: PosetRep::new(shape, dims, maps)?,
        limits,
        values,
        filled,
        upper,
    })
}

/// Compresses `E` onto the poset through anchor completions and resolves it. The certificate
/// covers every cell of the grid of the module and the poset.
pub fn affine_resolution<F: Scalar>(
    e: &dyn GradedModule<F>,
    ctx: &ConeContext,
    elements: &[ZVec],
    window: LimitWindow,
) -> Result<super::GradedResolution<F>> {
    let z = anchor_completion(e, ctx, elements, window)?;
    let points =
        super::resolution::certificate_points(&merged_grid(e, elements), ctx, window.margin)?;
    super::resolution::resolve_zipped(&z, &points)
}

/// The extension module `EE_n = lim_{p ≥ n} E_p`, truncated to a window.
pub struct ExtensionModule<'a, F: Scalar> {
    module: &'a dyn GradedModule<F>,
    ctx: ConeContext,
    upper: Vec<i64>,
    window: LimitWindow,
}

/// `EE` for a module in ray-pairing coordinates.
pub fn extension_ee<'a, F: Scalar>(
    e: &'a dyn GradedModule<F>,
    ctx: &ConeContext,
    window: LimitWindow,
) -> ExtensionModule<'a, F> {
    ExtensionModule {
        module: e,
        ctx: ctx.clone(),
        upper: window.upper(&e.grid()),
        window,
    }
}

impl<F: Scalar> ExtensionModule<'_, F> {
    fn top(&self, n: &[i64]) -> Vec<i64> {
        self.upper
            .iter()
            .zip(n)
            .map(|(u, v)| *u.max(&(v + self.window.margin)))
            .collect()
    }

    pub fn limit_at(&self, n: &[i64]) -> Result<BoxLimit<F>> {
        box_limit(self.module, &self.ctx, n, &self.top(n))
    }
}

impl<F: Scalar> GradedModule<F> for ExtensionModule<'_, F> {
    fn rank(&self) -> usize {
        self.module.rank()
    }

    fn dim_at(&self, n: &[i64]) -> Result<usize> {
        Ok(self.limit_at(n)?.dim())
    }

    fn map(&self, n: &[i64], n2: &[i64]) -> Result<Matrix<F>> {
        if !n.iter().zip(n2).all(|(a, b)| a <= b) {
            return Err(Error::InvalidOrder(format!("{n:?} is not below {n2:?}")));
        }
        let hi = self.top(n2);
        let a = box_limit(self.module, &self.ctx, n, &hi)?;
        let b = box_limit(self.module, &self.ctx, n2, &hi)?;
        a.restrict_to(&b)
    }

    fn grid(&self) -> ThresholdGrid {
        self.module.grid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Q;
    use crate::grmod::{resolve_zipped, MonomialPresentation, Presentation};
    use crate::zbar::Zbar;

    fn cone() -> ConeContext {
        ConeContext::new(2, vec![vec![2, -1], vec![0, 1]])
    }

    /// `k` on `(p,0)` and on `(0,1) + p(1,2)`, identity maps between nonzero degrees.
    pub(crate) fn two_chains() -> MonomialPresentation {
        serde_json::from_str(
            r#"{"vars":2,"generators":[[0,0],[0,1]],"relations":[
                {"row":0,"col":0,"coeff":1,"exponent":[1,1]},
                {"row":1,"col":0,"coeff":1,"exponent":[1,2]},
                {"row":2,"col":1,"coeff":1,"exponent":[1,0]},
                {"row":3,"col":1,"coeff":1,"exponent":[1,1]}]}"#,
        )
        .unwrap()
    }

    fn zv(v: &[Option<i64>]) -> ZVec {
        ZVec(
            v.iter()
                .map(|x| x.map_or(Zbar::NegInf, Zbar::Fin))
                .collect(),
        )
    }

    #[test]
    fn two_chains_support() {
        let t = Presentation::<Q>::from_file_on_cone(&two_chains(), &cone()).unwrap();
        let c = cone();
        for (m, d) in [
            ([0, 0], 1),
            ([3, 0], 1),
            ([1, 3], 1),
            ([0, 1], 1),
            ([1, 1], 0),
            ([1, 2], 0),
        ] {
            assert_eq!(t.dim_at(&c.pairing(&m)).unwrap(), d, "at {m:?}");
        }
    }

    #[test]
    fn fiber_product_completion() {
        let c = cone();
        let t = Presentation::<Q>::from_file_on_cone(&two_chains(), &c).unwrap();
        let p2 = vec![
            ZVec::bottom(2),
            zv(&[Some(-1), Some(0)]),
            zv(&[Some(0), Some(1)]),
        ];
        let z = anchor_completion(&t, &c, &p2, LimitWindow::for_cone(&c)).unwrap();
        assert_eq!(z.limit(1).unwrap().dim(), 2);
        assert_eq!(z.rep.dims(), &[0, 1, 0]);
        let pts = crate::grmod::certificate_points(
            &merged_grid(&t, &p2),
            &c,
            LimitWindow::for_cone(&c).margin,
        )
        .unwrap();
        let r = resolve_zipped(&z, &pts).unwrap();
        assert_eq!(r.levels, vec![vec![vec![-1, 0]], vec![vec![0, 1]]]);
    }

    #[test]
    fn split_completion() {
        let c = cone();
        let t = Presentation::<Q>::from_file_on_cone(&two_chains(), &c).unwrap();
        let p1 = vec![
            ZVec::bottom(2),
            zv(&[Some(-1), Some(1)]),
            zv(&[Some(0), Some(0)]),
            zv(&[Some(0), Some(1)]),
        ];
        let w = LimitWindow::for_cone(&c);
        let z = anchor_completion(&t, &c, &p1, w).unwrap();
        assert_eq!(z.rep.dims(), &[0, 1, 1, 0]);
        let pts = crate::grmod::certificate_points(&merged_grid(&t, &p1), &c, w.margin).unwrap();
        let r = resolve_zipped(&z, &pts).unwrap();
        // two rank-one summands map onto a torsion module, so the kernel has rank two
        assert_eq!(
            r.levels,
            vec![vec![vec![-1, 1], vec![0, 0]], vec![vec![0, 1], vec![0, 1]]]
        );
    }

    #[test]
    fn extension_of_rank_one_reflexive() {
        let c = cone();
        let s = Presentation::<Q>::free(2, vec![vec![0, 0]]);
        let ee = extension_ee(&s, &c, LimitWindow::for_cone(&c));
        assert_eq!(ee.dim_at(&[0, 0]).unwrap(), 1);
        assert_eq!(ee.dim_at(&[-1, 0]).unwrap(), 0);
        assert_eq!(ee.dim_at(&[1, 3]).unwrap(), 1);
    }
}
