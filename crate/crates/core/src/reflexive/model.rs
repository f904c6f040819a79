use serde::{Deserialize, Serialize};

use super::parse_rows;
use crate::error::{Error, Result};
use crate::exactla::{Scalar, Subspace};
use crate::grmod::ScalarRepr;
use crate::zbar::ThresholdGrid;

/// A member of the arrangement with the vectors it contributes beyond its proper subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSubspace {
    pub basis: Vec<Vec<ScalarRepr>>,
    #[serde(default)]
    pub vectors: Vec<Vec<ScalarRepr>>,
}

/// A flag `E_1 ⊊ … ⊊ E_n = V` given by subspace indices, with strictly increasing integers `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSpec {
    pub members: Vec<usize>,
    pub k: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub ambient_dim: usize,
    pub subspaces: Vec<ModelSubspace>,
    pub flags: Vec<FlagSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub r: usize,
    pub c: usize,
    pub coeff: ScalarRepr,
    pub exponent: Vec<i64>,
}

/// The shift table and the monomial matrix `M̄` of a reflexive model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexiveModel {
    /// `k_W` for every subspace, in input order.
    pub shifts: Vec<Vec<i64>>,
    pub k_min: Vec<i64>,
    pub rows: usize,
    pub cols: usize,
    /// Degree `k_W` of each column.
    pub column_degrees: Vec<Vec<i64>>,
    /// Subspace each column belongs to.
    pub column_owner: Vec<usize>,
    pub entries: Vec<ModelEntry>,
}

struct Parsed<F: Scalar> {
    spaces: Vec<Subspace<F>>,
    vectors: Vec<Vec<Vec<F>>>,
    flags: Vec<FlagSpec>,
    ambient: usize,
}

fn invalid(msg: String) -> Error {
    Error::InvalidModule(msg)
}

fn parse<F: Scalar>(file: &ModelFile) -> Result<Parsed<F>> {
    let n = file.ambient_dim;
    let spaces = file
        .subspaces
        .iter()
        .map(|s| parse_rows::<F>(&s.basis, n))
        .collect::<Result<Vec<_>>>()?;
    let vectors = file
        .subspaces
        .iter()
        .map(|s| {
            parse_rows::<F>(&s.vectors, n)?;
            s.vectors
                .iter()
                .map(|r| {
                    r.iter()
                        .map(ScalarRepr::to_scalar)
                        .collect::<Result<Vec<F>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for (a, u) in spaces.iter().enumerate() {
        if spaces[..a].contains(u) {
            return Err(invalid(format!("subspace {a} is listed twice")));
        }
    }
    let full = Subspace::full(n);
    for (i, f) in file.flags.iter().enumerate() {
        if f.members.is_empty() || f.members.len() != f.k.len() {
            return Err(invalid(format!("flag {i} needs one integer per member")));
        }
        if f.members.iter().any(|&m| m >= spaces.len()) {
            return Err(invalid(format!("flag {i} refers to an unknown subspace")));
        }
        if f.k.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("integers of flag {i} do not increase")));
        }
        let chain: Vec<&Subspace<F>> = f.members.iter().map(|&m| &spaces[m]).collect();
        if chain
            .windows(2)
            .any(|w| !w[0].is_subspace_of(w[1]) || w[0] == w[1])
        {
            return Err(invalid(format!("flag {i} is not strictly increasing")));
        }
        if *chain[chain.len() - 1] != full || chain[0].dim() == 0 {
            return Err(invalid(format!(
                "flag {i} must run from a nonzero subspace to the ambient space"
            )));
        }
    }
    Ok(Parsed {
        spaces,
        vectors,
        flags: file.flags.clone(),
        ambient: n,
    })
}

fn check_arrangement<F: Scalar>(p: &Parsed<F>) -> Result<()> {
    let known = |w: &Subspace<F>| w.dim() == 0 || p.spaces.contains(w);
    for a in &p.spaces {
        for b in &p.spaces {
            if !known(&a.meet(b)?) {
                return Err(invalid(
                    "the arrangement is not closed under intersection".into(),
                ));
            }
        }
    }
    // intersections of flag members
    let mut generated: Vec<Subspace<F>> = vec![Subspace::full(p.ambient)];
    for f in &p.flags {
        for &m in &f.members {
            if !generated.contains(&p.spaces[m]) {
                generated.push(p.spaces[m].clone());
            }
        }
    }
    let mut i = 0;
    while i < generated.len() {
        for j in 0..i {
            let w = generated[i].meet(&generated[j])?;
            if !generated.contains(&w) {
                generated.push(w);
            }
        }
        i += 1;
    }
    for (a, w) in p.spaces.iter().enumerate() {
        if w.dim() > 0 && !generated.contains(w) {
            return Err(invalid(format!("the flags do not generate subspace {a}")));
        }
    }
    for (a, w) in p.spaces.iter().enumerate() {
        let mut below = Subspace::zero(p.ambient);
        for u in &p.spaces {
            if u != w && u.is_subspace_of(w) {
                below = below.join(u)?;
            }
        }
        let own = Subspace::from_vectors(&p.vectors[a], p.ambient)?;
        if !own.is_subspace_of(w) {
            return Err(invalid(format!("vectors of subspace {a} leave it")));
        }
        let need = w.dim() - below.dim();
        if p.vectors[a].len() != need || below.join(&own)? != *w {
            return Err(invalid(format!(
                "subspace {a} needs exactly {need} vectors completing its proper subspaces"
            )));
        }
    }
    Ok(())
}

fn shift<F: Scalar>(p: &Parsed<F>, w: &Subspace<F>) -> Vec<i64> {
    p.flags
        .iter()
        .map(|f| {
            f.members
                .iter()
                .zip(&f.k)
                .filter(|(m, _)| w.is_subspace_of(&p.spaces[**m]))
                .map(|(_, k)| *k)
                .min()
                .expect("flags end at the ambient space")
        })
        .collect()
}

/// `k_W`, `k_min` and the monomial matrix with entries `v^W_r · x^(k_W - k_min)`.
pub fn reflexive_model_export<F: Scalar>(file: &ModelFile) -> Result<ReflexiveModel> {
    let p = parse::<F>(file)?;
    check_arrangement(&p)?;
    let shifts: Vec<Vec<i64>> = p.spaces.iter().map(|w| shift(&p, w)).collect();
    let k_min: Vec<i64> = p.flags.iter().map(|f| f.k[0]).collect();
    let mut column_degrees = Vec::new();
    let mut column_owner = Vec::new();
    let mut entries = Vec::new();
    for (a, vs) in p.vectors.iter().enumerate() {
        for v in vs {
            let c = column_degrees.len();
            let exponent: Vec<i64> = shifts[a].iter().zip(&k_min).map(|(x, y)| x - y).collect();
            for (r, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    entries.push(ModelEntry {
                        r,
                        c,
                        coeff: ScalarRepr::from_scalar(x),
                        exponent: exponent.clone(),
                    });
                }
            }
            column_degrees.push(shifts[a].clone());
            column_owner.push(a);
        }
    }
    Ok(ReflexiveModel {
        shifts,
        k_min,
        rows: p.ambient,
        cols: column_degrees.len(),
        column_degrees,
        column_owner,
        entries,
    })
}

/// Checks degreewise that the image of `M̄` is the module `⋂_i E^i(d_i)` of the flags, on every
/// cell of the grid of flag integers.
pub fn verify_model<F: Scalar>(file: &ModelFile, model: &ReflexiveModel) -> Result<()> {
    let p = parse::<F>(file)?;
    let grid = ThresholdGrid::new(p.flags.iter().map(|f| f.k.clone()).collect());
    let mut columns: Vec<Vec<F>> = vec![vec![F::zero(); model.rows]; model.cols];
    for e in &model.entries {
        columns[e.c][e.r] = e.coeff.to_scalar()?;
    }
    for cell in grid.cells() {
        let d = grid.representative(&cell);
        let mut expected = Subspace::full(p.ambient);
        for (f, &t) in p.flags.iter().zip(&d) {
            let j = f.k.partition_point(|&k| k <= t);
            let value = match j {
                0 => Subspace::zero(p.ambient),
                _ => p.spaces[f.members[j - 1]].clone(),
            };
            expected = expected.meet(&value)?;
        }
        let alive: Vec<Vec<F>> = (0..model.cols)
            .filter(|&c| model.column_degrees[c].iter().zip(&d).all(|(a, b)| a <= b))
            .map(|c| columns[c].clone())
            .collect();
        let image = Subspace::from_vectors(&alive, p.ambient)?;
        if image != expected {
            return Err(Error::Certificate(format!(
                "image of the model differs from the flag module at {d:?}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Q;

    fn closed_planes() -> ModelFile {
        serde_json::from_str(
            r#"{"ambient_dim":3,
                "subspaces":[
                  {"basis":[[0,1,0]],"vectors":[[0,1,0]]},
                  {"basis":[[1,0,0],[0,1,0]],"vectors":[[1,0,0]]},
                  {"basis":[[0,1,0],[0,0,1]],"vectors":[[0,0,1]]},
                  {"basis":[[1,0,0],[0,1,0],[0,0,1]],"vectors":[]}],
                "flags":[{"members":[1,3],"k":[0,1]},{"members":[2,3],"k":[1,2]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn closed_planes_model() {
        let f = closed_planes();
        let m = reflexive_model_export::<Q>(&f).unwrap();
        assert_eq!(m.column_degrees, vec![vec![0, 1], vec![0, 2], vec![1, 1]]);
        assert_eq!(m.k_min, vec![0, 1]);
        let exps: Vec<Vec<i64>> = m.entries.iter().map(|e| e.exponent.clone()).collect();
        assert_eq!(exps, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        verify_model::<Q>(&f, &m).unwrap();
    }

    #[test]
    fn ambient_only() {
        let f: ModelFile = serde_json::from_str(
            r#"{"ambient_dim":2,"subspaces":[{"basis":[[1,0],[0,1]],"vectors":[[1,0],[0,1]]}],
                "flags":[{"members":[0],"k":[3]}]}"#,
        )
        .unwrap();
        let m = reflexive_model_export::<Q>(&f).unwrap();
        assert_eq!(m.shifts, vec![vec![3]]);
        assert_eq!(m.column_degrees, vec![vec![3], vec![3]]);
        assert!(m.entries.iter().all(|e| e.exponent == vec![0]));
        verify_model::<Q>(&f, &m).unwrap();
    }

    #[test]
    fn redundant_vectors_rejected() {
        let mut f = closed_planes();
        f.subspaces[3].vectors = vec![vec![
            ScalarRepr::Int(1),
            ScalarRepr::Int(1),
            ScalarRepr::Int(1),
        ]];
        assert!(matches!(
            reflexive_model_export::<Q>(&f),
            Err(Error::InvalidModule(_))
        ));
    }

    #[test]
    fn flags_must_generate() {
        let mut f = closed_planes();
        f.flags.pop();
        assert!(matches!(
            reflexive_model_export::<Q>(&f),
            Err(Error::InvalidModule(_))
        ));
    }
}
