//! Representations of finite preorders and their free resolutions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{complement_section, kernel, FiniteDiagram, Matrix, Scalar, Subspace};
use crate::poset::Preorder;

/// A representation of a finite preorder.
pub type PosetRep<F> = FiniteDiagram<F>;

/// A direct sum of free representations `⊕ (F^x)^{m_x}`, listed by element with multiplicity.
///
/// Generators are ordered by element id, then copy index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeRepSpec {
    pub terms: Vec<(usize, usize)>,
}

impl FreeRepSpec {
    pub fn from_multiplicities(mults: &BTreeMap<usize, usize>) -> Self {
        FreeRepSpec {
            terms: mults
                .iter()
                .filter(|(_, &m)| m > 0)
                .map(|(&x, &m)| (x, m))
                .collect(),
        }
    }

    /// Element carrying each generator.
    pub fn generators(&self) -> Vec<usize> {
        self.terms
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat_n(x, m))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.terms.iter().map(|&(_, m)| m).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        self.terms.iter().copied().collect()
    }
}

/// Indices of generators of `spec` alive at `y`.
pub fn generators_at(shape: &Preorder, spec: &FreeRepSpec, y: usize) -> Vec<usize> {
    spec.generators()
        .into_iter()
        .enumerate()
        .filter(|&(_, x)| shape.leq(x, y))
        .map(|(g, _)| g)
        .collect()
}

/// The free representation described by `spec`: at `y` the span of generators at elements `≤ y`.
pub fn free_rep<F: Scalar>(shape: &Preorder, spec: &FreeRepSpec) -> PosetRep<F> {
    let n = shape.len();
    let alive: Vec<Vec<usize>> = (0..n).map(|y| generators_at(shape, spec, y)).collect();
    let dims = alive.iter().map(Vec::len).collect();
    let mut maps = BTreeMap::new();
    for (x, y) in shape.generating_pairs() {
        let mut m = Matrix::zeros(alive[y].len(), alive[x].len());
        for (j, g) in alive[x].iter().enumerate() {
            let i = alive[y]
                .iter()
                .position(|h| h == g)
                .expect("generators persist upwards");
            m.set(i, j, F::one());
        }
        maps.insert((x, y), m);
    }
    PosetRep::new(shape.clone(), dims, maps).expect("free representations are functorial")
}

/// The representation of subspaces of one ambient space, with inclusions as maps.
pub fn from_subspaces<F: Scalar>(shape: &Preorder, spaces: &[Subspace<F>]) -> Result<PosetRep<F>> {
    if spaces.len() != shape.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} subspaces for {} elements",
            spaces.len(),
            shape.len()
        )));
    }
    let dims = spaces.iter().map(Subspace::dim).collect();
    let mut maps = BTreeMap::new();
    for (x, y) in shape.generating_pairs() {
        let m = spaces[y]
            .coordinate_matrix(&spaces[x].basis_columns())
            .ok_or_else(|| {
                Error::NotFunctorial(format!(
                    "subspace at {x} is not contained in the one at {y}"
                ))
            })?;
        maps.insert((x, y), m);
    }
    PosetRep::new(shape.clone(), dims, maps)
}

/// A morphism of representations, one matrix per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMorphism<F: Scalar> {
    pub components: Vec<Matrix<F>>,
}

impl<F: Scalar> RepMorphism<F> {
    /// `self ∘ other`.
    pub fn after(&self, other: &Self) -> Self {
        RepMorphism {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Matrix::is_zero)
    }

    /// Checks shapes and commutation with the structure maps.
    pub fn check_natural(&self, source: &PosetRep<F>, target: &PosetRep<F>) -> Result<()> {
        let n = source.len();
        if self.components.len() != n || target.len() != n {
            return Err(Error::NotNatural(
                "component count differs from poset size".into(),
            ));
        }
        for (x, c) in self.components.iter().enumerate() {
            if c.rows() != target.dim(x) || c.cols() != source.dim(x) {
                return Err(Error::NotNatural(format!(
                    "component at {x} has the wrong shape"
                )));
            }
        }
        for (x, y) in source.shape().generating_pairs() {
            let lhs = target.map(x, y).mul(&self.components[x]);
            let rhs = self.components[y].mul(source.map(x, y));
            if lhs != rhs {
                return Err(Error::NotNatural(format!(
                    "square at ({x},{y}) does not commute"
                )));
            }
        }
        Ok(())
    }
}

/// `E_{<x}`: the sum of images of all `E(y, x)` with `y < x`.
pub fn lower_image<F: Scalar>(e: &PosetRep<F>, x: usize) -> Subspace<F> {
    let shape = e.shape();
    let mut acc = Subspace::zero(e.dim(x));
    for y in 0..shape.len() {
        if shape.lt(y, x) {
            let img = Subspace::from_column_span(e.map(y, x));
            acc = acc.join(&img).expect("same ambient");
        }
    }
    acc
}

/// `dim E_x − dim E_{<x}`.
pub fn free_dimension<F: Scalar>(e: &PosetRep<F>, x: usize) -> usize {
    e.dim(x) - lower_image(e, x).dim()
}

/// A surjection from a free representation: generators at each element (one per `≶`-class)
/// spanning a complement of `E_{<x}`.
pub struct Cover<F: Scalar> {
    pub spec: FreeRepSpec,
    pub free: PosetRep<F>,
    pub map: RepMorphism<F>,
}

pub fn cover<F: Scalar>(e: &PosetRep<F>) -> Cover<F> {
    let shape = e.shape();
    let (class_of, classes) = shape.classes();
    let mut mults = BTreeMap::new();
    let mut sections: BTreeMap<usize, Matrix<F>> = BTreeMap::new();
    for x in 0..shape.len() {
        if classes[class_of[x]][0] != x {
            continue;
        }
        let low = lower_image(e, x);
        let s = complement_section(&low, &Subspace::full(e.dim(x))).expect("E_<x lies in E_x");
        if s.cols() > 0 {
            mults.insert(x, s.cols());
            sections.insert(x, s);
        }
    }
    let spec = FreeRepSpec::from_multiplicities(&mults);
    let free = free_rep::<F>(shape, &spec);
    // generator columns in generator order
    let mut gen_cols: Vec<(usize, Vec<F>)> = Vec::new();
    for (&x, s) in &sections {
        for c in 0..s.cols() {
            gen_cols.push((x, s.column(c)));
        }
    }
    let components = (0..shape.len())
        .map(|y| {
            let alive = generators_at(shape, &spec, y);
            let cols: Vec<Vec<F>> = alive
                .iter()
                .map(|&g| {
                    let (x, v) = &gen_cols[g];
                    e.map(*x, y).apply(v)
                })
                .collect();
            Matrix::from_columns(&cols, e.dim(y)).expect("columns live in E_y")
        })
        .collect();
    Cover {
        spec,
        free,
        map: RepMorphism { components },
    }
}

/// Kernel of a morphism together with its inclusion into the source.
pub fn kernel_rep<F: Scalar>(
    phi: &RepMorphism<F>,
    source: &PosetRep<F>,
) -> (PosetRep<F>, RepMorphism<F>) {
    let shape = source.shape();
    let kers: Vec<Subspace<F>> = phi.components.iter().map(kernel).collect();
    let incl: Vec<Matrix<F>> = kers.iter().map(Subspace::basis_columns).collect();
    let dims = kers.iter().map(Subspace::dim).collect();
    let mut maps = BTreeMap::new();
    for (x, y) in shape.generating_pairs() {
        let pushed = source.map(x, y).mul(&incl[x]);
        let m = kers[y]
            .coordinate_matrix(&pushed)
            .expect("kernels are preserved by a natural map");
        maps.insert((x, y), m);
    }
    let k = PosetRep::new(shape.clone(), dims, maps).expect("kernel of a natural map");
    (k, RepMorphism { components: incl })
}

/// A finite free resolution `… → F_1 → F_0 → E → 0`.
#[derive(Clone, Debug)]
pub struct RepResolution<F: Scalar> {
    pub target: PosetRep<F>,
    pub levels: Vec<FreeRepSpec>,
    /// `F_0 → E`.
    pub augmentation: RepMorphism<F>,
    /// `differentials[i]: F_{i+1} → F_i`.
    pub differentials: Vec<RepMorphism<F>>,
}

impl<F: Scalar> RepResolution<F> {
    pub fn shape(&self) -> &Preorder {
        self.target.shape()
    }

    pub fn free(&self, level: usize) -> PosetRep<F> {
        free_rep(self.shape(), &self.levels[level])
    }

    /// Length of the resolution (index of the last nonzero level); 0 for the empty resolution.
    pub fn length(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn betti(&self) -> Vec<usize> {
        self.levels.iter().map(FreeRepSpec::rank).collect()
    }
}

/// Upper bound on resolution steps before giving up.
pub const MAX_LEVELS: usize = 64;

/// Iterates cover and kernel until the kernel vanishes.
pub fn free_resolution<F: Scalar>(e: &PosetRep<F>) -> Result<RepResolution<F>> {
    let mut levels = Vec::new();
    let mut differentials = Vec::new();
    let c0 = cover(e);
    if c0.spec.is_zero() {
        return Ok(RepResolution {
            target: e.clone(),
            levels,
            augmentation: RepMorphism {
                components: (0..e.len()).map(|y| Matrix::zeros(e.dim(y), 0)).collect(),
            },
            differentials,
        });
    }
    let augmentation = c0.map.clone();
    let (mut k, mut incl) = kernel_rep(&c0.map, &c0.free);
    levels.push(c0.spec);
    while !k.is_zero() {
        if levels.len() > MAX_LEVELS {
            return Err(Error::Certificate(format!(
                "resolution did not terminate within {MAX_LEVELS} steps"
            )));
        }
        let c = cover(&k);
        differentials.push(incl.after(&c.map));
        let (k2, incl2) = kernel_rep(&c.map, &c.free);
        levels.push(c.spec);
        k = k2;
        incl = incl2;
    }
    Ok(RepResolution {
        target: e.clone(),
        levels,
        augmentation,
        differentials,
    })
}

/// Verifies naturality, `d ∘ d = 0` and exactness at every element.
pub fn check_exact<F: Scalar>(r: &RepResolution<F>) -> Result<()> {
    let shape = r.shape();
    let frees: Vec<PosetRep<F>> = (0..r.levels.len()).map(|i| r.free(i)).collect();
    if r.differentials.len() + 1 != r.levels.len().max(1) {
        return Err(Error::Certificate(
            "differential count does not match levels".into(),
        ));
    }
    if frees.is_empty() {
        return if r.target.is_zero() {
            Ok(())
        } else {
            Err(Error::Certificate(
                "empty resolution of a nonzero representation".into(),
            ))
        };
    }
    r.augmentation
        .check_natural(&frees[0], &r.target)
        .map_err(|e| Error::Certificate(format!("augmentation: {e}")))?;
    for (i, d) in r.differentials.iter().enumerate() {
        d.check_natural(&frees[i + 1], &frees[i])
            .map_err(|e| Error::Certificate(format!("differential {}: {e}", i + 1)))?;
    }
    for y in 0..shape.len() {
        let aug = &r.augmentation.components[y];
        if aug.rank() != r.target.dim(y) {
            return Err(Error::Certificate(format!(
                "augmentation not surjective at {y}"
            )));
        }
        let mut prev_kernel = kernel(aug);
        for (i, d) in r.differentials.iter().enumerate() {
            let img = Subspace::from_column_span(&d.components[y]);
            if img != prev_kernel {
                return Err(Error::Certificate(format!(
                    "not exact at level {i}, element {y}"
                )));
            }
            prev_kernel = kernel(&d.components[y]);
        }
        if prev_kernel.dim() != 0 {
            return Err(Error::Certificate(format!(
                "last map not injective at element {y}"
            )));
        }
    }
    Ok(())
}

/// `f*E` for `f: P → Q`: `(f*E)_x = E_{f(x)}`.
pub fn pullback<F: Scalar>(source: &Preorder, f: &[usize], e: &PosetRep<F>) -> Result<PosetRep<F>> {
    if !crate::poset::is_order_preserving(source, e.shape(), f) {
        return Err(Error::NotContraction("map is not order preserving".into()));
    }
    let dims = f.iter().map(|&v| e.dim(v)).collect();
    let maps = source
        .generating_pairs()
        .into_iter()
        .map(|(x, y)| ((x, y), e.map(f[x], f[y]).clone()))
        .collect();
    PosetRep::new(source.clone(), dims, maps)
}
