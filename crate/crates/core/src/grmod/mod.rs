//! Fine-graded modules: degreewise evaluation, compression onto anchor posets, resolutions.

mod affine;
mod lattice;
mod resolution;
mod tensor;

pub use affine::{
    affine_resolution, anchor_completion, box_limit, extension_ee, BoxLimit, CompletedModule,
    ExtensionModule, LimitWindow,
};
pub use lattice::{
    initial_sets, lcm_lattice_of, minimal_free_resolution, zip_lattice, InitialSet, LatticeZip,
    MinimalResolution,
};
pub use resolution::{
    certificate_points, local_index, resolve_zipped, unzip_levels, verify_resolution, CertFile,
    CertPoint, Entry, EntryFile, GradedResolution, ResolutionFile, ZippedModule,
};
pub use tensor::{tensor_diagnostic, TensorReport, TorsionWitness, DEFAULT_WINDOW_CAP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{complement_section, quotient_projection, Matrix, Scalar, Subspace};
use crate::toricfan::ConeContext;
use crate::zbar::ThresholdGrid;

/// A module graded by `Z^k`, given by its values and structure maps at integer points.
///
/// Implementations must be constant on the cells of [`GradedModule::grid`]: for `m ≤ m'` in one
/// cell the structure map is an isomorphism.
pub trait GradedModule<F: Scalar> {
    fn rank(&self) -> usize;
    fn dim_at(&self, m: &[i64]) -> Result<usize>;
    /// The structure map `E_m → E_{m'}`; requires `m ≤ m'` componentwise.
    fn map(&self, m: &[i64], m2: &[i64]) -> Result<Matrix<F>>;
    fn grid(&self) -> ThresholdGrid;
}

/// A scalar written as an integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Int(i64),
    Str(String),
}

impl ScalarRepr {
    pub fn to_scalar<F: Scalar>(&self) -> Result<F> {
        match self {
            ScalarRepr::Int(v) => Ok(F::from_i64(*v)),
            ScalarRepr::Str(s) => {
                F::parse(s).ok_or_else(|| Error::Parse(format!("invalid scalar {s:?}")))
            }
        }
    }

    pub fn from_scalar<F: Scalar>(v: &F) -> Self {
        ScalarRepr::Str(v.to_string())
    }
}

/// Number of variables, either as a count or as a list of names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Vars {
    Count(usize),
    Names(Vec<String>),
}

impl Vars {
    pub fn count(&self) -> usize {
        match self {
            Vars::Count(n) => *n,
            Vars::Names(v) => v.len(),
        }
    }
}

/// One nonzero entry of a relation: `coeff · x^exponent` times generator `col` in relation `row`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub row: usize,
    pub col: usize,
    pub coeff: ScalarRepr,
    pub exponent: Vec<i64>,
}

/// A fine-graded module `coker(⊕ S(-b_i) → ⊕ S(-a_j))` in the file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialPresentation {
    pub vars: Vars,
    pub generators: Vec<Vec<i64>>,
    #[serde(default)]
    pub relations: Vec<RelationEntry>,
}

/// A presented module ready for evaluation, graded by ray pairings (the identity for `S`).
#[derive(Clone, Debug)]
pub struct Presentation<F: Scalar> {
    rank: usize,
    gens: Vec<Vec<i64>>,
    rel_degrees: Vec<Vec<i64>>,
    rel_vectors: Vec<Vec<F>>,
}

struct PointValue<F: Scalar> {
    alive: Vec<usize>,
    section: Matrix<F>,
    projection: Matrix<F>,
}

fn leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl<F: Scalar> Presentation<F> {
    pub fn from_file(p: &MonomialPresentation) -> Result<Self> {
        Self::build(p, None)
    }

    /// A module over `k[σ_M]`: degrees are read in `M` and stored through the ray pairing.
    pub fn from_file_on_cone(p: &MonomialPresentation, cone: &ConeContext) -> Result<Self> {
        Self::build(p, Some(cone))
    }

    fn build(p: &MonomialPresentation, cone: Option<&ConeContext>) -> Result<Self> {
        let rank = p.vars.count();
        if let Some(c) = cone {
            if c.rank != rank {
                return Err(Error::InvalidModule(format!(
                    "{rank} variables for a cone in a lattice of rank {}",
                    c.rank
                )));
            }
        }
        let embed = |v: &[i64]| match cone {
            Some(c) => c.pairing(v),
            None => v.to_vec(),
        };
        for (j, g) in p.generators.iter().enumerate() {
            if g.len() != rank {
                return Err(Error::InvalidModule(format!(
                    "generator {j} has degree of length {} instead of {rank}",
                    g.len()
                )));
            }
        }
        let nrows = p.relations.iter().map(|e| e.row + 1).max().unwrap_or(0);
        let mut rel_degrees: Vec<Option<Vec<i64>>> = vec![None; nrows];
        let mut rel_vectors = vec![vec![F::zero(); p.generators.len()]; nrows];
        for e in &p.relations {
            if e.col >= p.generators.len() {
                return Err(Error::InvalidModule(format!(
                    "relation entry refers to missing generator {}",
                    e.col
                )));
            }
            if e.exponent.len() != rank || embed(&e.exponent).iter().any(|&x| x < 0) {
                return Err(Error::InvalidModule(format!(
                    "relation {} has an invalid exponent {:?}",
                    e.row, e.exponent
                )));
            }
            let deg: Vec<i64> = p.generators[e.col]
                .iter()
                .zip(&e.exponent)
                .map(|(a, b)| a + b)
                .collect();
            match &rel_degrees[e.row] {
                Some(d) if *d != deg => {
                    return Err(Error::InvalidModule(format!(
                        "relation {} is not homogeneous",
                        e.row
                    )))
                }
                _ => rel_degrees[e.row] = Some(deg),
            }
            let c: F = e.coeff.to_scalar()?;
            rel_vectors[e.row][e.col] = rel_vectors[e.row][e.col].add(&c);
        }
        let rel_degrees = rel_degrees
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| Error::InvalidModule(format!("relation {i} is empty"))))
            .collect::<Result<_>>()?;
        let rel_degrees: Vec<Vec<i64>> = rel_degrees;
        Ok(Presentation {
            rank: cone.map_or(rank, ConeContext::num_rays),
            gens: p.generators.iter().map(|g| embed(g)).collect(),
            rel_degrees: rel_degrees.iter().map(|d| embed(d)).collect(),
            rel_vectors,
        })
    }

    /// The free module `⊕ S(-a_j)`.
    pub fn free(rank: usize, gens: Vec<Vec<i64>>) -> Self {
        Presentation {
            rank,
            gens,
            rel_degrees: Vec::new(),
            rel_vectors: Vec::new(),
        }
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.gens
    }

    fn value(&self, m: &[i64]) -> Result<PointValue<F>> {
        if m.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "degree of length {} for a module of rank {}",
                m.len(),
                self.rank
            )));
        }
        let alive: Vec<usize> = (0..self.gens.len())
            .filter(|&j| leq(&self.gens[j], m))
            .collect();
        let rels: Vec<Vec<F>> = (0..self.rel_degrees.len())
            .filter(|&i| leq(&self.rel_degrees[i], m))
            .map(|i| {
                alive
                    .iter()
                    .map(|&j| self.rel_vectors[i][j].clone())
                    .collect()
            })
            .collect();
        let r = Subspace::from_vectors(&rels, alive.len())?;
        let full = Subspace::full(alive.len());
        Ok(PointValue {
            section: complement_section(&r, &full)?,
            projection: quotient_projection(&r, &full)?,
            alive,
        })
    }

    /// Lifts coordinates in `E_m` to coefficients on the generators alive at `m`.
    pub fn lift_at(&self, m: &[i64], v: &[F]) -> Result<Vec<(usize, F)>> {
        let pv = self.value(m)?;
        let w = pv.section.apply(v);
        Ok(pv
            .alive
            .iter()
            .zip(w)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&j, c)| (j, c))
            .collect())
    }
}

impl<F: Scalar> GradedModule<F> for Presentation<F> {
    fn rank(&self) -> usize {
        self.rank
    }

    fn dim_at(&self, m: &[i64]) -> Result<usize> {
        Ok(self.value(m)?.section.cols())
    }

    fn map(&self, m: &[i64], m2: &[i64]) -> Result<Matrix<F>> {
        if !leq(m, m2) {
            return Err(Error::InvalidOrder(format!("{m:?} is not below {m2:?}")));
        }
        let a = self.value(m)?;
        let b = self.value(m2)?;
        let mut incl = Matrix::zeros(b.alive.len(), a.alive.len());
        for (c, j) in a.alive.iter().enumerate() {
            let r = b
                .alive
                .iter()
                .position(|x| x == j)
                .expect("alive generators persist");
            incl.set(r, c, F::one());
        }
        Ok(b.projection.mul(&incl).mul(&a.section))
    }

    fn grid(&self) -> ThresholdGrid {
        let mut t = vec![Vec::new(); self.rank];
        for d in self.gens.iter().chain(&self.rel_degrees) {
            for (i, &v) in d.iter().enumerate() {
                t[i].push(v);
            }
        }
        ThresholdGrid::new(t)
    }
}

/// Whether the structure map `E_m → E_{m'}` is an isomorphism.
pub fn is_iso<F: Scalar>(e: &dyn GradedModule<F>, m: &[i64], m2: &[i64]) -> Result<bool> {
    Ok(e.map(m, m2)?.is_invertible())
}
