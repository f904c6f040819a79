use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GradedModule, ScalarRepr};
use crate::error::{Error, Result};
use crate::exactla::{kernel, Matrix, Scalar, Subspace};
use crate::posrep::{check_exact, free_resolution, generators_at, PosetRep, RepResolution};
use crate::toricfan::ConeContext;
use crate::zbar::{ThresholdGrid, ZVec};

/// A representation on finitely many degrees whose unzipping is a known graded module.
pub trait ZippedModule<F: Scalar> {
    fn module(&self) -> &dyn GradedModule<F>;
    fn elements(&self) -> &[ZVec];
    fn rep(&self) -> &PosetRep<F>;
    /// The map from the value at element `x` into `E_p`, for a degree `p` above it.
    fn project(&self, x: usize, p: &[i64]) -> Result<Matrix<F>>;
}

/// One nonzero entry `coeff · x^exponent` of a differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry<F: Scalar> {
    /// Generator index in the target level.
    pub row: usize,
    /// Generator index in the source level.
    pub col: usize,
    pub coeff: F,
    pub exponent: Vec<i64>,
}

/// The augmentation evaluated at one degree: columns are the level-0 generators alive there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertPoint<F: Scalar> {
    pub degree: Vec<i64>,
    pub augmentation: Matrix<F>,
}

/// A free resolution `… → ⊕ S(-n) → ⊕ S(-n) → E → 0` in the ray-pairing grading, with the
/// augmentation recorded at finitely many degrees for independent verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedResolution<F: Scalar> {
    pub rank: usize,
    /// Generator degrees of each level.
    pub levels: Vec<Vec<Vec<i64>>>,
    /// `differentials[i]` maps level `i + 1` to level `i`.
    pub differentials: Vec<Vec<Entry<F>>>,
    pub certificate: Vec<CertPoint<F>>,
}

fn leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl<F: Scalar> GradedResolution<F> {
    pub fn betti(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn length(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// First entry with a zero exponent, as `(differential index, entry index)`.
    pub fn unit_entry(&self) -> Option<(usize, usize)> {
        self.differentials.iter().enumerate().find_map(|(i, d)| {
            d.iter()
                .position(|e| e.exponent.iter().all(|&v| v == 0))
                .map(|j| (i, j))
        })
    }

    fn alive(&self, level: usize, p: &[i64]) -> Vec<usize> {
        (0..self.levels[level].len())
            .filter(|&g| leq(&self.levels[level][g], p))
            .collect()
    }

    /// The differential `level + 1 → level` at degree `p`.
    pub fn differential_at(&self, level: usize, p: &[i64]) -> Matrix<F> {
        let rows = self.alive(level, p);
        let cols = self.alive(level + 1, p);
        let mut m: Matrix<F> = Matrix::zeros(rows.len(), cols.len());
        for e in &self.differentials[level] {
            if let (Some(i), Some(j)) = (
                rows.iter().position(|&g| g == e.row),
                cols.iter().position(|&g| g == e.col),
            ) {
                m.set(i, j, m.get(i, j).add(&e.coeff));
            }
        }
        m
    }

    /// Serializable form with scalars written as strings.
    pub fn to_file(&self) -> ResolutionFile {
        ResolutionFile {
            rank: self.rank,
            levels: self.levels.clone(),
            differentials: self
                .differentials
                .iter()
                .map(|d| {
                    d.iter()
                        .map(|e| EntryFile {
                            row: e.row,
                            col: e.col,
                            coeff: ScalarRepr::from_scalar(&e.coeff),
                            exponent: e.exponent.clone(),
                        })
                        .collect()
                })
                .collect(),
            certificate: self
                .certificate
                .iter()
                .map(|c| CertFile {
                    degree: c.degree.clone(),
                    augmentation: c
                        .augmentation
                        .to_rows()
                        .iter()
                        .map(|r| r.iter().map(ScalarRepr::from_scalar).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(f: &ResolutionFile) -> Result<Self> {
        let mut differentials = Vec::new();
        for (i, d) in f.differentials.iter().enumerate() {
            let (Some(tgt), Some(src)) = (f.levels.get(i), f.levels.get(i + 1)) else {
                return Err(Error::Parse(format!("differential {i} has no levels")));
            };
            let mut entries = Vec::new();
            for e in d {
                if e.row >= tgt.len() || e.col >= src.len() {
                    return Err(Error::Parse(format!(
                        "entry ({}, {}) of differential {i} out of range",
                        e.row, e.col
                    )));
                }
                entries.push(Entry {
                    row: e.row,
                    col: e.col,
                    coeff: e.coeff.to_scalar()?,
                    exponent: e.exponent.clone(),
                });
            }
            differentials.push(entries);
        }
        let mut certificate = Vec::new();
        for c in &f.certificate {
            let rows = c
                .augmentation
                .iter()
                .map(|r| {
                    r.iter()
                        .map(ScalarRepr::to_scalar)
                        .collect::<Result<Vec<F>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let ncols = f
                .levels
                .first()
                .map_or(0, |l| l.iter().filter(|g| leq(g, &c.degree)).count());
            certificate.push(CertPoint {
                degree: c.degree.clone(),
                augmentation: Matrix::from_rows(rows, ncols)?,
            });
        }
        Ok(GradedResolution {
            rank: f.rank,
            levels: f.levels.clone(),
            differentials,
            certificate,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryFile {
    pub row: usize,
    pub col: usize,
    pub coeff: ScalarRepr,
    pub exponent: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertFile {
    pub degree: Vec<i64>,
    pub augmentation: Vec<Vec<ScalarRepr>>,
}

/// File form of [`GradedResolution`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionFile {
    pub rank: usize,
    pub levels: Vec<Vec<Vec<i64>>>,
    pub differentials: Vec<Vec<EntryFile>>,
    pub certificate: Vec<CertFile>,
}

/// Degrees at which exactness is certified: in every grid cell, the minimal lattice points of
/// the cell found within `margin` of its lower corner.
///
/// Cells unbounded below are sampled just under their first threshold.
pub fn certificate_points(
    grid: &ThresholdGrid,
    ctx: &ConeContext,
    margin: i64,
) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for c in grid.cells() {
        let mut lo = Vec::with_capacity(c.len());
        let mut hi = Vec::with_capacity(c.len());
        for (i, &j) in c.iter().enumerate() {
            let (a, b) = grid.interval(i, j);
            let l = match (a, b) {
                (Some(a), _) => a,
                (None, Some(b)) => b - 1 - margin,
                (None, None) => 0,
            };
            let h = match b {
                Some(b) => (b - 1).min(l + margin),
                None => l + margin,
            };
            lo.push(l);
            hi.push(h);
        }
        let pts: Vec<Vec<i64>> = ctx
            .points_in_box(&lo, &hi)?
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        for p in &pts {
            if !pts.iter().any(|q| q != p && leq(q, p)) {
                out.push(p.clone());
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Generator degrees and monomial entries of a resolution of a representation on the given
/// degrees. Generators keep the order of the representation resolution.
pub fn unzip_levels<F: Scalar>(
    r: &RepResolution<F>,
    elements: &[ZVec],
) -> Result<(Vec<Vec<Vec<i64>>>, Vec<Vec<Entry<F>>>)> {
    let shape = r.shape();
    let degree_of = |x: usize| {
        elements[x]
            .to_ints()
            .ok_or_else(|| Error::InfiniteDegree(elements[x].to_string()))
    };
    let levels: Vec<Vec<Vec<i64>>> = r
        .levels
        .iter()
        .map(|spec| spec.generators().into_iter().map(degree_of).collect())
        .collect::<Result<_>>()?;
    let mut differentials = Vec::new();
    for (i, d) in r.differentials.iter().enumerate() {
        let mut entries = Vec::new();
        for g in 0..levels[i + 1].len() {
            let (x, j) = local_index(r, i + 1, g);
            let rows = generators_at(shape, &r.levels[i], x);
            let m = &d.components[x];
            for (a, &h) in rows.iter().enumerate() {
                let c = m.get(a, j);
                if !c.is_zero() {
                    entries.push(Entry {
                        row: h,
                        col: g,
                        coeff: c.clone(),
                        exponent: levels[i + 1][g]
                            .iter()
                            .zip(&levels[i][h])
                            .map(|(u, v)| u - v)
                            .collect(),
                    });
                }
            }
        }
        entries.sort_by_key(|e| (e.col, e.row));
        differentials.push(entries);
    }
    Ok((levels, differentials))
}

/// Element carrying generator `g` of `level`, and the generator's position among those alive there.
pub fn local_index<F: Scalar>(r: &RepResolution<F>, level: usize, g: usize) -> (usize, usize) {
    let spec = &r.levels[level];
    let x = spec.generators()[g];
    let alive = generators_at(r.shape(), spec, x);
    (
        x,
        alive
            .iter()
            .position(|&h| h == g)
            .expect("generator alive at itself"),
    )
}

/// Resolves the representation, unzips it and records the augmentation at the given degrees.
/// The result is verified against the module before it is returned.
pub fn resolve_zipped<F: Scalar>(
    z: &dyn ZippedModule<F>,
    points: &[Vec<i64>],
) -> Result<GradedResolution<F>> {
    let r = free_resolution(z.rep())?;
    check_exact(&r)?;
    let (levels, differentials) = unzip_levels(&r, z.elements())?;
    let mut certificate = Vec::new();
    for p in points {
        let dim = z.module().dim_at(p)?;
        let mut cols = Vec::new();
        if !levels.is_empty() {
            for g in 0..levels[0].len() {
                if !leq(&levels[0][g], p) {
                    continue;
                }
                let (x, j) = local_index(&r, 0, g);
                let v = r.augmentation.components[x].column(j);
                cols.push(z.project(x, p)?.apply(&v));
            }
        }
        certificate.push(CertPoint {
            degree: p.clone(),
            augmentation: Matrix::from_columns(&cols, dim)?,
        });
    }
    let res = GradedResolution {
        rank: z.module().rank(),
        levels,
        differentials,
        certificate,
    };
    verify_resolution(z.module(), &res)?;
    Ok(res)
}

/// Checks a resolution against the module degreewise: the complex is exact and surjects onto
/// `E_p` at each certificate degree, and the augmentation is natural between them.
pub fn verify_resolution<F: Scalar>(
    e: &dyn GradedModule<F>,
    res: &GradedResolution<F>,
) -> Result<()> {
    let fail = |msg: String| Err(Error::Certificate(msg));
    if res.differentials.len() + 1 != res.levels.len().max(1) {
        return fail("differential count does not match the number of levels".into());
    }
    for (i, d) in res.differentials.iter().enumerate() {
        for ent in d {
            let (src, tgt) = (&res.levels[i + 1][ent.col], &res.levels[i][ent.row]);
            let expected: Vec<i64> = src.iter().zip(tgt).map(|(a, b)| a - b).collect();
            if ent.exponent != expected || !leq(tgt, src) {
                return fail(format!(
                    "entry ({}, {}) of differential {} has exponent {:?}, expected nonnegative {:?}",
                    ent.row, ent.col, i, ent.exponent, expected
                ));
            }
        }
    }
    let mut by_degree: BTreeMap<&[i64], &CertPoint<F>> = BTreeMap::new();
    for c in &res.certificate {
        by_degree.insert(&c.degree, c);
    }
    for c in &res.certificate {
        let p = &c.degree;
        let dim = e.dim_at(p)?;
        let aug = &c.augmentation;
        if res.levels.is_empty() {
            if dim != 0 {
                return fail(format!("empty resolution but E is nonzero at {p:?}"));
            }
            continue;
        }
        let n0 = res.alive(0, p).len();
        if aug.rows() != dim || aug.cols() != n0 {
            return fail(format!("augmentation at {p:?} has the wrong shape"));
        }
        if aug.rank() != dim {
            return fail(format!("augmentation is not surjective at {p:?}"));
        }
        let mut prev = kernel(aug);
        for i in 0..res.differentials.len() {
            let d = res.differential_at(i, p);
            if Subspace::from_column_span(&d) != prev {
                return fail(format!("not exact at level {i} in degree {p:?}"));
            }
            prev = kernel(&d);
        }
        if prev.dim() != 0 {
            return fail(format!("last differential is not injective at {p:?}"));
        }
    }
    for a in &res.certificate {
        for b in &res.certificate {
            if a.degree == b.degree || !leq(&a.degree, &b.degree) || res.levels.is_empty() {
                continue;
            }
            let alive_a = res.alive(0, &a.degree);
            let alive_b = res.alive(0, &b.degree);
            let mut incl = Matrix::zeros(alive_b.len(), alive_a.len());
            for (j, g) in alive_a.iter().enumerate() {
                let i = alive_b.iter().position(|h| h == g).expect("alive upwards");
                incl.set(i, j, F::one());
            }
            let lhs = e.map(&a.degree, &b.degree)?.mul(&a.augmentation);
            let rhs = b.augmentation.mul(&incl);
            if lhs != rhs {
                return fail(format!(
                    "augmentation is not natural between {:?} and {:?}",
                    a.degree, b.degree
                ));
            }
        }
    }
    Ok(())
}
