use std::collections::{BTreeMap, VecDeque};

use super::matrix::Matrix;
use super::scalar::Scalar;
use super::subspace::{kernel, quotient_projection, Subspace};
use crate::error::{Error, Result};
use crate::poset::Preorder;

/// A functor from a finite preorder to finite-dimensional vector spaces.
///
/// Maps are stored for every pair `x ≤ y`, including identities on the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDiagram<F: Scalar> {
    shape: Preorder,
    dims: Vec<usize>,
    maps: BTreeMap<(usize, usize), Matrix<F>>,
}

impl<F: Scalar> FiniteDiagram<F> {
    /// Takes maps for any generating set of pairs, fills in the rest by composition and checks
    /// functoriality.
    pub fn new(
        shape: Preorder,
        dims: Vec<usize>,
        given: BTreeMap<(usize, usize), Matrix<F>>,
    ) -> Result<Self> {
        let n = shape.len();
        if dims.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} dimensions for {n} elements",
                dims.len()
            )));
        }
        for (&(x, y), m) in &given {
            if x >= n || y >= n || !shape.leq(x, y) {
                return Err(Error::NotFunctorial(format!(
                    "map given for non-relation ({x},{y})"
                )));
            }
            if m.rows() != dims[y] || m.cols() != dims[x] {
                return Err(Error::DimensionMismatch(format!(
                    "map ({x},{y}) is {}x{} but should be {}x{}",
                    m.rows(),
                    m.cols(),
                    dims[y],
                    dims[x]
                )));
            }
        }
        let mut maps = given.clone();
        for x in 0..n {
            maps.entry((x, x))
                .or_insert_with(|| Matrix::identity(dims[x]));
            // breadth-first composition from x along given edges
            let mut seen = vec![false; n];
            seen[x] = true;
            let mut queue = VecDeque::from([x]);
            while let Some(y) = queue.pop_front() {
                let to_y = maps[&(x, y)].clone();
                for (&(_, b), m) in given.range((y, 0)..(y + 1, 0)) {
                    if seen[b] {
                        continue;
                    }
                    seen[b] = true;
                    maps.entry((x, b)).or_insert_with(|| m.mul(&to_y));
                    queue.push_back(b);
                }
            }
            for y in 0..n {
                if shape.leq(x, y) && !maps.contains_key(&(x, y)) {
                    if dims[x] == 0 || dims[y] == 0 {
                        maps.insert((x, y), Matrix::zeros(dims[y], dims[x]));
                    } else {
                        return Err(Error::NotFunctorial(format!(
                            "no map determined for relation ({x},{y})"
                        )));
                    }
                }
            }
        }
        let d = FiniteDiagram { shape, dims, maps };
        d.check_functorial()?;
        Ok(d)
    }

    /// Zero-dimensional everywhere.
    pub fn zero(shape: Preorder) -> Self {
        let n = shape.len();
        Self::new(shape, vec![0; n], BTreeMap::new()).expect("zero diagram")
    }

    fn check_functorial(&self) -> Result<()> {
        let n = self.shape.len();
        for x in 0..n {
            if !self.maps[&(x, x)].is_identity() {
                return Err(Error::NotFunctorial(format!(
                    "map ({x},{x}) is not the identity"
                )));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !self.shape.leq(x, y) || x == y {
                    continue;
                }
                for z in 0..n {
                    if z == y || !self.shape.leq(y, z) {
                        continue;
                    }
                    if self.maps[&(y, z)].mul(&self.maps[&(x, y)]) != self.maps[&(x, z)] {
                        return Err(Error::NotFunctorial(format!(
                            "maps along {x} <= {y} <= {z} do not compose"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> &Preorder {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The map for `x ≤ y`; panics otherwise.
    pub fn map(&self, x: usize, y: usize) -> &Matrix<F> {
        self.maps
            .get(&(x, y))
            .unwrap_or_else(|| panic!("no relation {x} <= {y}"))
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Maps on a generating set of pairs; enough to rebuild the diagram with [`FiniteDiagram::new`].
    pub fn generating_maps(&self) -> BTreeMap<(usize, usize), Matrix<F>> {
        self.shape
            .generating_pairs()
            .into_iter()
            .map(|(x, y)| ((x, y), self.maps[&(x, y)].clone()))
            .collect()
    }

    /// Restriction to the listed elements.
    pub fn restrict(&self, elements: &[usize]) -> Self {
        let shape = self.shape.restrict(elements);
        let dims = elements.iter().map(|&e| self.dims[e]).collect();
        let mut maps = BTreeMap::new();
        for (i, &a) in elements.iter().enumerate() {
            for (j, &b) in elements.iter().enumerate() {
                if self.shape.leq(a, b) {
                    maps.insert((i, j), self.maps[&(a, b)].clone());
                }
            }
        }
        FiniteDiagram { shape, dims, maps }
    }

    /// Builds a diagram from all maps without recomputation; checks functoriality.
    pub fn from_all_maps(
        shape: Preorder,
        dims: Vec<usize>,
        maps: BTreeMap<(usize, usize), Matrix<F>>,
    ) -> Result<Self> {
        Self::new(shape, dims, maps)
    }
}

/// A limit cone: the limit as a subspace of `⊕ E_x` with its projections.
#[derive(Clone, Debug)]
pub struct Limit<F: Scalar> {
    /// `(Σ dims) x d` matrix whose columns span the limit inside the product.
    pub basis: Matrix<F>,
    /// Projection onto each vertex, `dims[x] x d`.
    pub projections: Vec<Matrix<F>>,
}

impl<F: Scalar> Limit<F> {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// A colimit cocone.
#[derive(Clone, Debug)]
pub struct Colimit<F: Scalar> {
    pub dim: usize,
    /// Injection of each vertex, `dim x dims[x]`.
    pub injections: Vec<Matrix<F>>,
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    for &d in dims {
        off.push(acc);
        acc += d;
    }
    off.push(acc);
    off
}

/// Limit of vertices `dims` subject to `e_y = m * e_x` for each edge `(x, y, m)`.
pub fn limit_of_edges<F: Scalar>(dims: &[usize], edges: &[(usize, usize, &Matrix<F>)]) -> Limit<F> {
    let off = offsets(dims);
    let total = off[dims.len()];
    let rows: usize = edges.iter().map(|(_, y, _)| dims[*y]).sum();
    let mut c = Matrix::zeros(rows, total);
    let mut r0 = 0;
    for &(x, y, m) in edges {
        c.set_block(r0, off[x], m);
        for i in 0..dims[y] {
            let v = c.get(r0 + i, off[y] + i).sub(&F::one());
            c.set(r0 + i, off[y] + i, v);
        }
        r0 += dims[y];
    }
    let basis = kernel(&c).basis_columns();
    let projections = (0..dims.len())
        .map(|x| basis.block(off[x], 0, dims[x], basis.cols()))
        .collect();
    Limit { basis, projections }
}

/// Colimit of vertices `dims` with `ι_y ∘ m = ι_x` for each edge `(x, y, m)`.
pub fn colimit_of_edges<F: Scalar>(
    dims: &[usize],
    edges: &[(usize, usize, &Matrix<F>)],
) -> Colimit<F> {
    let off = offsets(dims);
    let total = off[dims.len()];
    let mut rel = Vec::new();
    for &(x, y, m) in edges {
        for j in 0..dims[x] {
            let mut v = vec![F::zero(); total];
            for i in 0..dims[y] {
                v[off[y] + i] = m.get(i, j).clone();
            }
            v[off[x] + j] = v[off[x] + j].sub(&F::one());
            rel.push(v);
        }
    }
    let r = Subspace::from_vectors(&rel, total).expect("relation vectors have total length");
    let p = quotient_projection(&r, &Subspace::full(total)).expect("relations lie in the product");
    let injections = (0..dims.len())
        .map(|x| p.block(0, off[x], p.rows(), dims[x]))
        .collect();
    Colimit {
        dim: p.rows(),
        injections,
    }
}

/// Limit of a finite diagram.
pub fn finite_limit<F: Scalar>(d: &FiniteDiagram<F>) -> Limit<F> {
    let pairs = d.shape().generating_pairs();
    let edges: Vec<_> = pairs.iter().map(|&(x, y)| (x, y, d.map(x, y))).collect();
    limit_of_edges(d.dims(), &edges)
}

/// Colimit of a finite diagram.
pub fn finite_colimit<F: Scalar>(d: &FiniteDiagram<F>) -> Colimit<F> {
    let pairs = d.shape().generating_pairs();
    let edges: Vec<_> = pairs.iter().map(|&(x, y)| (x, y, d.map(x, y))).collect();
    colimit_of_edges(d.dims(), &edges)
}
