use serde::{Deserialize, Serialize};

use super::{canonical_poset, sample_points, Arrangement, Filtrations};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Scalar, Subspace};
use crate::grmod::{
    local_index, unzip_levels, verify_resolution, CertPoint, Entry, GradedResolution,
};
use crate::posrep::{check_exact, free_resolution};
use crate::toricfan::Fan;
use crate::zbar::ZVec;

/// `λ_σ(n)`: `n` on the rays of `σ`, `min { i : E^σ_n ⊆ E^ρ(i) }` on the others.
/// The value of the lifted divisor must reproduce `E^σ_n`.
pub fn reflexive_lift<F: Scalar>(
    filts: &Filtrations<F>,
    fan: &Fan,
    sigma: usize,
    n: &ZVec,
) -> Result<ZVec> {
    let ctx = fan.context(sigma);
    if n.rank() != ctx.num_rays() {
        return Err(Error::DimensionMismatch(format!(
            "anchor needs {} entries",
            ctx.num_rays()
        )));
    }
    let Some(ints) = n.to_ints() else {
        return Ok(ZVec::bottom(fan.rays.len()));
    };
    let w = filts.on_cone(&ctx)?.value(&ints)?;
    let all: Vec<usize> = (0..fan.rays.len()).collect();
    let mut lift = filts.kappa(&all, &w)?;
    for (k, &r) in ctx.ray_ids.iter().enumerate() {
        lift.0[r] = n.0[k];
    }
    let back = lifted_value(filts, &lift)?;
    if back != w {
        return Err(Error::LiftAxiom(format!(
            "the lift {lift} of {n} does not reproduce its value"
        )));
    }
    Ok(lift)
}

fn lifted_value<F: Scalar>(filts: &Filtrations<F>, lift: &ZVec) -> Result<Subspace<F>> {
    let mut w = Subspace::full(filts.ambient);
    for (r, z) in lift.0.iter().enumerate() {
        match z.finite() {
            Some(i) => w = w.meet(&filts.get(r)?.value(i))?,
            None => return Ok(Subspace::zero(filts.ambient)),
        }
    }
    Ok(w)
}

/// The restriction of a global resolution to one maximal cone, verified against `E^σ`.
#[derive(Clone, Debug)]
pub struct ConeCheck<F: Scalar> {
    pub cone: usize,
    pub resolution: GradedResolution<F>,
}

/// A resolution by sums of `O(D_n)` in divisor coordinates, with per-cone certificates.
#[derive(Clone, Debug)]
pub struct GlobalReflexiveResolution<F: Scalar> {
    /// The union of the canonical arrangements, anchored by lifted divisor vectors.
    pub poset: Vec<ZVec>,
    pub levels: Vec<Vec<Vec<i64>>>,
    pub differentials: Vec<Vec<Entry<F>>>,
    pub cones: Vec<ConeCheck<F>>,
}

/// Summary in divisor form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub divisor: Vec<i64>,
    pub mult: usize,
}

impl<F: Scalar> GlobalReflexiveResolution<F> {
    pub fn length(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn summary(&self) -> Vec<Vec<LevelSummary>> {
        summarize(&self.levels)
    }
}

/// Generator degrees of each level with multiplicities, in order of first appearance.
pub fn summarize(levels: &[Vec<Vec<i64>>]) -> Vec<Vec<LevelSummary>> {
    levels
        .iter()
        .map(|level| {
            let mut out: Vec<LevelSummary> = Vec::new();
            for d in level {
                match out.iter_mut().find(|s| &s.divisor == d) {
                    Some(s) => s.mult += 1,
                    None => out.push(LevelSummary {
                        divisor: d.clone(),
                        mult: 1,
                    }),
                }
            }
            out
        })
        .collect()
}

/// Resolves the reflexive sheaf through the union of the canonical arrangements of its maximal
/// cones. Every maximal cone must be full-dimensional.
pub fn global_reflexive_resolution<F: Scalar>(
    filts: &Filtrations<F>,
    fan: &Fan,
    margin: Option<i64>,
) -> Result<GlobalReflexiveResolution<F>> {
    let all: Vec<usize> = (0..fan.rays.len()).collect();
    let mut spaces: Vec<Subspace<F>> = vec![Subspace::zero(filts.ambient)];
    let maximal = fan.maximal_cones();
    for &s in &maximal {
        let ctx = fan.context(s);
        if !ctx.is_full_dimensional() {
            return Err(Error::Unsupported(format!(
                "maximal cone {s} is not full-dimensional"
            )));
        }
        let module = filts.on_cone(&ctx)?;
        let m = margin.unwrap_or_else(|| super::default_margin(&ctx));
        for w in canonical_poset(&module, m)?.spaces {
            if !spaces.contains(&w) {
                spaces.push(w);
            }
        }
    }
    let elements = spaces
        .iter()
        .map(|w| filts.kappa(&all, w))
        .collect::<Result<Vec<_>>>()?;
    let witnesses = vec![None; spaces.len()];
    let arr = Arrangement::new(filts.ambient, elements, spaces, witnesses)?;
    let r = free_resolution(&arr.rep()?)?;
    check_exact(&r)?;
    let (levels, differentials) = unzip_levels(&r, &arr.elements)?;

    let mut cones = Vec::new();
    for &s in &maximal {
        let ctx = fan.context(s);
        let module = filts.on_cone(&ctx)?;
        let m = margin.unwrap_or_else(|| super::default_margin(&ctx));
        let project = |d: &Vec<i64>| -> Vec<i64> { ctx.ray_ids.iter().map(|&r| d[r]).collect() };
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
        let projected: Vec<ZVec> = arr
            .elements
            .iter()
            .map(|e| e.project(&ctx.ray_ids))
            .collect();
        let mut certificate = Vec::new();
        for p in sample_points(&module, &projected, m)? {
            let value = module.value(&p)?;
            let mut cols = Vec::new();
            if let Some(level) = local_levels.first() {
                for (g, d) in level.iter().enumerate() {
                    if !d.iter().zip(&p).all(|(a, b)| a <= b) {
                        continue;
                    }
                    let (x, j) = local_index(&r, 0, g);
                    let v = arr.spaces[x]
                        .basis_columns()
                        .apply(&r.augmentation.components[x].column(j));
                    cols.push(value.coordinates(&v).ok_or_else(|| {
                        Error::Certificate(format!(
                            "generator {g} does not land in the value at {}",
                            ZVec::from_ints(&p)
                        ))
                    })?);
                }
            }
            certificate.push(CertPoint {
                augmentation: Matrix::from_columns(&cols, value.dim())?,
                degree: p,
            });
        }
        let resolution = GradedResolution {
            rank: ctx.num_rays(),
            levels: local_levels,
            differentials: local_diffs,
            certificate,
        };
        verify_resolution(&module, &resolution)?;
        cones.push(ConeCheck {
            cone: s,
            resolution,
        });
    }
    Ok(GlobalReflexiveResolution {
        poset: arr.elements,
        levels,
        differentials,
        cones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Q;
    use crate::reflexive::Filtration;
    use crate::toricfan::p1xp1;
    use std::collections::BTreeMap;

    fn line(v: &[i64]) -> Subspace<Q> {
        Subspace::from_vectors(&[v.iter().map(|&x| Q::new(x, 1)).collect()], 2).unwrap()
    }

    /// Rank two on P1 x P1 with a line jump on every ray: (1,0), (0,1), (1,1), (1,0).
    fn generic_lines() -> Filtrations<Q> {
        let lines = [line(&[1, 0]), line(&[0, 1]), line(&[1, 1]), line(&[1, 0])];
        let by_ray: BTreeMap<usize, Filtration<Q>> = lines
            .into_iter()
            .enumerate()
            .map(|(r, l)| {
                (
                    r,
                    Filtration::new(2, vec![(0, l), (1, Subspace::full(2))]).unwrap(),
                )
            })
            .collect();
        Filtrations { ambient: 2, by_ray }
    }

    fn split(divisors: &[[i64; 4]]) -> Filtrations<Q> {
        let mut by_ray = BTreeMap::new();
        for r in 0..4 {
            let (a, b) = (divisors[0][r], divisors[1][r]);
            let jumps = match a.cmp(&b) {
                std::cmp::Ordering::Equal => vec![(a, Subspace::full(2))],
                std::cmp::Ordering::Less => vec![(a, line(&[1, 0])), (b, Subspace::full(2))],
                std::cmp::Ordering::Greater => vec![(b, line(&[0, 1])), (a, Subspace::full(2))],
            };
            by_ray.insert(r, Filtration::new(2, jumps).unwrap());
        }
        Filtrations { ambient: 2, by_ray }
    }

    #[test]
    fn direct_sum_has_length_zero() {
        let f = split(&[[0, 1, 0, 2], [1, 0, 1, 0]]);
        let r = global_reflexive_resolution(&f, &p1xp1(), None).unwrap();
        assert_eq!(r.length(), 0);
        let mut level = r.levels[0].clone();
        level.sort();
        assert_eq!(level, vec![vec![0, 1, 0, 2], vec![1, 0, 1, 0]]);
        assert_eq!(r.cones.len(), 4);
    }

    #[test]
    fn generic_lines_are_certified() {
        let r = global_reflexive_resolution(&generic_lines(), &p1xp1(), None).unwrap();
        // lines (1,0), (0,1), (1,1) lifted by the jump index of every ray containing them
        let mut level0 = r.levels[0].clone();
        level0.sort();
        assert_eq!(
            level0,
            vec![vec![0, 1, 1, 0], vec![1, 0, 1, 1], vec![1, 1, 0, 1]]
        );
        assert_eq!(r.levels[1], vec![vec![1, 1, 1, 1]]);
        for c in &r.cones {
            assert!(!c.resolution.certificate.is_empty());
        }
    }

    #[test]
    fn lift_reproduces_value() {
        let f = generic_lines();
        let fan = p1xp1();
        let s = fan.maximal_cones()[0];
        let ctx = fan.context(s);
        let module = f.on_cone(&ctx).unwrap();
        for n in canonical_poset(&module, 3).unwrap().elements {
            let l = reflexive_lift(&f, &fan, s, &n).unwrap();
            assert_eq!(l.project(&ctx.ray_ids), n);
        }
    }
}
