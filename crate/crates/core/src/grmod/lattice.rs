use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::resolution::{certificate_points, resolve_zipped, GradedResolution, ZippedModule};
use super::GradedModule;
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Scalar};
use crate::posrep::PosetRep;
use crate::toricfan::ConeContext;
use crate::zbar::{anchor_in, canonical_sort, lcm_closure, LcmLattice, ThresholdGrid, ZVec};

/// The initial elements of every degree in one grid cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialSet {
    pub cell: Vec<usize>,
    /// Lower corner of the cell, `-inf` where it is unbounded below.
    pub corner: ZVec,
    pub representative: Vec<i64>,
    pub elements: Vec<ZVec>,
}

struct CellDims {
    grid: ThresholdGrid,
    dims: BTreeMap<Vec<usize>, usize>,
}

impl CellDims {
    fn new<F: Scalar>(e: &dyn GradedModule<F>, grid: ThresholdGrid) -> Result<Self> {
        let mut dims = BTreeMap::new();
        for c in grid.cells() {
            let d = e.dim_at(&grid.representative(&c))?;
            dims.insert(c, d);
        }
        Ok(CellDims { grid, dims })
    }
}

fn cells_between(lo: &[usize], hi: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p| {
                (*a..=*b).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    out
}

fn initial_at<F: Scalar>(e: &dyn GradedModule<F>, cd: &CellDims, n: &[i64]) -> Result<Vec<ZVec>> {
    let grid = &cd.grid;
    let cn = grid.cell_of(n);
    let dn = e.dim_at(n)?;
    let zero = vec![0; cn.len()];
    let mut corners = Vec::new();
    for c in cells_between(&zero, &cn) {
        if cells_between(&c, &cn).iter().any(|b| cd.dims[b] != dn) {
            continue;
        }
        let q: Vec<i64> = grid
            .representative(&c)
            .iter()
            .zip(n)
            .map(|(a, b)| *a.min(b))
            .collect();
        if !e.map(&q, n)?.is_invertible() {
            continue;
        }
        let corner = grid.lower_corner(&c);
        if dn > 0 && !corner.is_finite() {
            return Err(Error::NotFinitelyGenerated(format!(
                "nonzero values persist below {} towards -inf",
                ZVec::from_ints(n)
            )));
        }
        corners.push(corner);
    }
    let mut minimal: Vec<ZVec> = corners
        .iter()
        .filter(|a| !corners.iter().any(|b| b != *a && b.le(a)))
        .cloned()
        .collect();
    canonical_sort(&mut minimal);
    Ok(minimal)
}

/// `I_E` on every cell of the module's grid.
pub fn initial_sets<F: Scalar>(e: &dyn GradedModule<F>) -> Result<Vec<InitialSet>> {
    let cd = CellDims::new(e, e.grid())?;
    let mut out = Vec::new();
    for c in cd.grid.cells() {
        let rep = cd.grid.representative(&c);
        let elements = initial_at(e, &cd, &rep)?;
        // a second point of the same cell must give the same answer
        let probe: Vec<i64> = c
            .iter()
            .enumerate()
            .map(|(i, &j)| match cd.grid.interval(i, j) {
                (Some(lo), Some(hi)) => (lo + 1).min(hi - 1),
                (Some(lo), None) => lo + 1,
                (None, _) => rep[i] - 1,
            })
            .collect();
        if initial_at(e, &cd, &probe)? != elements {
            return Err(Error::NotFinitelyGenerated(format!(
                "initial elements change inside the cell of {}",
                ZVec::from_ints(&rep)
            )));
        }
        out.push(InitialSet {
            corner: cd.grid.lower_corner(&c),
            cell: c,
            representative: rep,
            elements,
        });
    }
    Ok(out)
}

/// The lcm-lattice generated by all initial elements.
pub fn lcm_lattice_of<F: Scalar>(e: &dyn GradedModule<F>) -> Result<(Vec<InitialSet>, LcmLattice)> {
    let sets = initial_sets(e)?;
    let mut all: Vec<ZVec> = sets.iter().flat_map(|s| s.elements.clone()).collect();
    if all.is_empty() {
        all.push(ZVec::bottom(e.rank()));
    }
    let lattice = lcm_closure(&all)?;
    Ok((sets, lattice))
}

/// A module together with its restriction to a finite set of degrees.
pub struct LatticeZip<'a, F: Scalar> {
    module: &'a dyn GradedModule<F>,
    pub elements: Vec<ZVec>,
    pub rep: PosetRep<F>,
}

impl<F: Scalar> ZippedModule<F> for LatticeZip<'_, F> {
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
        match self.elements[x].to_ints() {
            Some(n) => self.module.map(&n, p),
            None => Ok(Matrix::zeros(self.module.dim_at(p)?, 0)),
        }
    }
}

fn combined_grid<F: Scalar>(e: &dyn GradedModule<F>, elements: &[ZVec]) -> ThresholdGrid {
    let mut t = e.grid().thresholds;
    let extra = ThresholdGrid::from_elements(e.rank(), elements);
    for (a, b) in t.iter_mut().zip(extra.thresholds) {
        a.extend(b);
    }
    ThresholdGrid::new(t)
}

/// Restriction of `E` to the given degrees (`0` at infinitary ones), after checking that every
/// degree has a unique anchor whose value maps isomorphically onto it.
pub fn zip_lattice<'a, F: Scalar>(
    e: &'a dyn GradedModule<F>,
    elements: &[ZVec],
) -> Result<LatticeZip<'a, F>> {
    let grid = combined_grid(e, elements);
    for c in grid.cells() {
        let m = grid.representative(&c);
        let a = anchor_in(elements, &m)?;
        let ok = match elements[a].to_ints() {
            Some(n) => e.map(&n, &m)?.is_invertible(),
            None => e.dim_at(&m)? == 0,
        };
        if !ok {
            return Err(Error::Completion {
                anchor: elements[a].to_string(),
                degree: ZVec::from_ints(&m).to_string(),
            });
        }
    }
    let shape = crate::zbar::componentwise_order(elements);
    let ints: Vec<Option<Vec<i64>>> = elements.iter().map(ZVec::to_ints).collect();
    let dims = ints
        .iter()
        .map(|n| n.as_ref().map_or(Ok(0), |n| e.dim_at(n)))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = BTreeMap::new();
    for (x, y) in shape.generating_pairs() {
        let m = match (&ints[x], &ints[y]) {
            (Some(a), Some(b)) => e.map(a, b)?,
            _ => Matrix::zeros(dims[y], dims[x]),
        };
        maps.insert((x, y), m);
    }
    Ok(LatticeZip {
        module: e,
        elements: elements.to_vec(),
        rep: PosetRep::new(shape, dims, maps)?,
    })
}

/// A minimal free resolution over the polynomial ring with the data it was built from.
#[derive(Clone, Debug)]
pub struct MinimalResolution<F: Scalar> {
    pub initial: Vec<InitialSet>,
    pub lattice: LcmLattice,
    pub resolution: GradedResolution<F>,
}

/// Resolves `E` over `S` through its lcm-lattice; the result carries a verified certificate.
pub fn minimal_free_resolution<F: Scalar>(e: &dyn GradedModule<F>) -> Result<MinimalResolution<F>> {
    let (initial, lattice) = lcm_lattice_of(e)?;
    let z = zip_lattice(e, &lattice.elements)?;
    let grid = combined_grid(e, &lattice.elements);
    let ctx = ConeContext::new(e.rank(), identity_rows(e.rank()));
    let points = certificate_points(&grid, &ctx, 0)?;
    let resolution = resolve_zipped(&z, &points)?;
    if let Some(entry) = resolution.unit_entry() {
        return Err(Error::Certificate(format!(
            "resolution is not minimal: unit entry at ({}, {})",
            entry.0, entry.1
        )));
    }
    Ok(MinimalResolution {
        initial,
        lattice,
        resolution,
    })
}

pub(crate) fn identity_rows(r: usize) -> Vec<Vec<i64>> {
    (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Q;
    use crate::grmod::{MonomialPresentation, Presentation};
    use crate::zbar::Zbar;

    fn fat_point() -> Presentation<Q> {
        let p: MonomialPresentation = serde_json::from_str(
            r#"{"vars":2,"generators":[[0,0]],"relations":[
                {"row":0,"col":0,"coeff":1,"exponent":[2,0]},
                {"row":1,"col":0,"coeff":1,"exponent":[1,1]},
                {"row":2,"col":0,"coeff":1,"exponent":[0,2]}]}"#,
        )
        .unwrap();
        Presentation::from_file(&p).unwrap()
    }

    fn zv(v: &[Option<i64>]) -> ZVec {
        ZVec(
            v.iter()
                .map(|x| x.map_or(Zbar::NegInf, Zbar::Fin))
                .collect(),
        )
    }

    #[test]
    fn fat_point_initial_sets() {
        let t = fat_point();
        let sets = initial_sets(&t).unwrap();
        let at = |m: &[i64]| {
            let cd = CellDims::new(&t, t.grid()).unwrap();
            initial_at(&t, &cd, m).unwrap()
        };
        assert_eq!(at(&[1, 0]), vec![zv(&[Some(0), Some(0)])]);
        assert_eq!(at(&[1, 1]), vec![zv(&[Some(1), Some(1)])]);
        assert_eq!(at(&[5, 0]), vec![zv(&[Some(2), None])]);
        assert_eq!(
            at(&[3, 3]),
            vec![
                zv(&[None, Some(2)]),
                zv(&[Some(1), Some(1)]),
                zv(&[Some(2), None])
            ]
        );
        assert_eq!(at(&[-1, 4]), vec![ZVec::bottom(2)]);
        assert_eq!(sets.len(), 16);
    }

    #[test]
    fn fat_point_lattice_and_betti() {
        let t = fat_point();
        let r = minimal_free_resolution(&t).unwrap();
        assert_eq!(r.lattice.elements.len(), 8);
        let betti: Vec<usize> = r.resolution.levels.iter().map(Vec::len).collect();
        assert_eq!(betti, vec![1, 3, 2]);
    }

    #[test]
    fn free_module_has_length_zero() {
        let s = Presentation::<Q>::free(2, vec![vec![1, 2]]);
        let r = minimal_free_resolution(&s).unwrap();
        assert_eq!(r.resolution.levels, vec![vec![vec![1, 2]]]);
        assert!(r.resolution.differentials.is_empty());
    }
}
