use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toricfan::ConeContext;

/// Degreewise dimensions of `S_(n1) ⊗ S_(n2)` over `k[σ_M]` on a box of degrees in `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorReport {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    /// Nonzero dimensions, by degree.
    pub dims: BTreeMap<String, usize>,
    /// Degrees from which multiplication by some semigroup generator is not injective.
    pub torsion: Vec<TorsionWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionWitness {
    pub degree: Vec<i64>,
    pub generator: Vec<i64>,
    pub source_dim: usize,
    pub image_dim: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

struct Degree {
    pairs: Vec<Vec<i64>>,
    class: Vec<usize>,
    count: usize,
}

/// Pairs `(m1, m - m1)` in `P_{n1} × P_{n2}`, grouped by the identifications
/// `(m1, m2) ~ (m1 - g, m2 + g)` for semigroup generators `g`.
fn degree_classes(
    ctx: &ConeContext,
    n1: &[i64],
    n2: &[i64],
    gens: &[Vec<i64>],
    m: &[i64],
) -> Result<Degree> {
    let pm = ctx.pairing(m);
    let hi = sub(&pm, n2);
    let pairs: Vec<Vec<i64>> = ctx
        .points_in_box(n1, &hi)?
        .into_iter()
        .map(|(m1, _)| m1)
        .collect();
    let index: BTreeMap<&Vec<i64>, usize> = pairs.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    for (i, m1) in pairs.iter().enumerate() {
        for g in gens {
            let shifted = sub(m1, g);
            if let Some(&j) = index.get(&shifted) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut roots = BTreeMap::new();
    let mut class = Vec::with_capacity(pairs.len());
    for i in 0..pairs.len() {
        let r = find(&mut parent, i);
        let next = roots.len();
        class.push(*roots.entry(r).or_insert(next));
    }
    Ok(Degree {
        count: roots.len(),
        pairs,
        class,
    })
}

/// Default cap on the number of degrees in a diagnostic window.
pub const DEFAULT_WINDOW_CAP: usize = 100_000;

/// Dimensions of `S_(n1) ⊗ S_(n2)` at every `m` with `lo ≤ m ≤ hi`, and the degrees where a
/// step map `m → m + g` fails to be injective.
pub fn tensor_diagnostic(
    ctx: &ConeContext,
    n1: &[i64],
    n2: &[i64],
    gens: &[Vec<i64>],
    lo: &[i64],
    hi: &[i64],
    cap: usize,
) -> Result<TensorReport> {
    let k = ctx.num_rays();
    if n1.len() != k || n2.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "shifts must have {k} entries"
        )));
    }
    if lo.len() != ctx.rank || hi.len() != ctx.rank {
        return Err(Error::DimensionMismatch(format!(
            "window corners must have {} entries",
            ctx.rank
        )));
    }
    if gens.is_empty()
        || gens
            .iter()
            .any(|g| g.len() != ctx.rank || ctx.pairing(g).iter().any(|&v| v < 0))
    {
        return Err(Error::InvalidFan(
            "semigroup generators must lie in the dual cone".into(),
        ));
    }
    let count: f64 = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| ((b - a + 1).max(0)) as f64)
        .product();
    if count > cap as f64 {
        return Err(Error::WindowTooLarge(format!(
            "{count} degrees exceed the cap of {cap}"
        )));
    }
    let mut degrees = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        degrees = degrees
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (*a..=*b).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let mut dims = BTreeMap::new();
    let mut torsion = Vec::new();
    for m in &degrees {
        let here = degree_classes(ctx, n1, n2, gens, m)?;
        if here.count == 0 {
            continue;
        }
        dims.insert(crate::zbar::ZVec::from_ints(m).to_string(), here.count);
        for g in gens {
            let target = add(m, g);
            let there = degree_classes(ctx, n1, n2, gens, &target)?;
            let index: BTreeMap<&Vec<i64>, usize> = there
                .pairs
                .iter()
                .enumerate()
                .map(|(i, p)| (p, i))
                .collect();
            // (m1, m2) ↦ (m1, m2 + g)
            let mut images: Vec<usize> =
                here.pairs.iter().map(|m1| there.class[index[m1]]).collect();
            let mut per_class = vec![usize::MAX; here.count];
            for (i, &c) in here.class.iter().enumerate() {
                per_class[c] = images[i];
            }
            images = per_class;
            images.sort_unstable();
            images.dedup();
            if images.len() < here.count {
                torsion.push(TorsionWitness {
                    degree: m.clone(),
                    generator: g.clone(),
                    source_dim: here.count,
                    image_dim: images.len(),
                });
            }
        }
    }
    Ok(TensorReport {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        dims,
        torsion,
    })
}
