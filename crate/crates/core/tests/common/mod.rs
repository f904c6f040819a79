//! Shared fixtures, random generators and reference computations for the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use toricres::exactla::{complement_section, quotient_projection, Matrix, Scalar, Subspace, Q};
use toricres::grmod::MonomialPresentation;
use toricres::poset::Preorder;
use toricres::posrep::PosetRep;
use toricres::reflexive::Filtration;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

pub fn read<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(data(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

pub fn sorted_levels(levels: &[Vec<Vec<i64>>]) -> Vec<Vec<Vec<i64>>> {
    levels.iter().map(|l| sorted(l)).collect()
}

/// Rank over the rationals by plain Gaussian elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() / pivot.clone();
                for j in c..cols {
                    let d = m[r][j].clone() * f.clone();
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

fn lcm_of(gens: &[Vec<i64>], subset: &[usize], r: usize) -> Vec<i64> {
    let mut out = vec![0; r];
    for &g in subset {
        for (a, b) in out.iter_mut().zip(&gens[g]) {
            *a = (*a).max(*b);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// Minimal generators of the ideal generated by the given exponent vectors.
pub fn minimal_generators(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let set: BTreeSet<Vec<i64>> = gens.iter().cloned().collect();
    set.iter()
        .filter(|g| {
            !set.iter()
                .any(|h| h != *g && h.iter().zip(g.iter()).all(|(a, b)| a <= b))
        })
        .cloned()
        .collect()
}

/// Graded Betti numbers of `S/I` from the Taylor complex tensored with the residue field:
/// in degree `a`, the subsets with lcm `a` and the boundary terms that keep the lcm.
pub fn taylor_betti(gens: &[Vec<i64>], r: usize) -> Vec<BTreeMap<Vec<i64>, usize>> {
    let gens = minimal_generators(gens);
    let s = gens.len();
    if gens.iter().any(|g| g.iter().all(|&x| x == 0)) {
        return Vec::new();
    }
    let by_size: Vec<Vec<Vec<usize>>> = (0..=s).map(|k| subsets(s, k)).collect();
    let degrees: BTreeSet<Vec<i64>> = by_size
        .iter()
        .flatten()
        .map(|f| lcm_of(&gens, f, r))
        .collect();
    let mut out: Vec<BTreeMap<Vec<i64>, usize>> = vec![BTreeMap::new(); s + 1];
    for a in &degrees {
        let cells: Vec<Vec<Vec<usize>>> = by_size
            .iter()
            .map(|fs| {
                fs.iter()
                    .filter(|f| lcm_of(&gens, f, r) == *a)
                    .cloned()
                    .collect()
            })
            .collect();
        // boundary from size k to size k-1
        let boundary_rank = |k: usize| -> usize {
            if k == 0 || cells[k].is_empty() || cells[k - 1].is_empty() {
                return 0;
            }
            let rows: Vec<Vec<i64>> = cells[k - 1]
                .iter()
                .map(|t| {
                    cells[k]
                        .iter()
                        .map(|f| match f.iter().position(|x| !t.contains(x)) {
                            Some(p)
                                if f.len() == t.len() + 1 && t.iter().all(|x| f.contains(x)) =>
                            {
                                if p % 2 == 0 {
                                    1
                                } else {
                                    -1
                                }
                            }
                            _ => 0,
                        })
                        .collect()
                })
                .collect();
            rank(&rows)
        };
        for k in 0..=s {
            let b =
                cells[k].len() - boundary_rank(k) - if k < s { boundary_rank(k + 1) } else { 0 };
            if b > 0 {
                out[k].insert(a.clone(), b);
            }
        }
    }
    while out.last().is_some_and(BTreeMap::is_empty) {
        out.pop();
    }
    out
}

/// `S/I` in the presentation format.
pub fn quotient_ring(gens: &[Vec<i64>]) -> MonomialPresentation {
    let r = gens.first().map_or(2, Vec::len);
    let relations: Vec<serde_json::Value> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| serde_json::json!({"row": i, "col": 0, "coeff": 1, "exponent": g}))
        .collect();
    serde_json::from_value(serde_json::json!({
        "vars": r, "generators": [vec![0; r]], "relations": relations
    }))
    .unwrap()
}

pub fn level_counts(levels: &[Vec<Vec<i64>>]) -> Vec<BTreeMap<Vec<i64>, usize>> {
    levels
        .iter()
        .map(|l| {
            let mut m = BTreeMap::new();
            for d in l {
                *m.entry(d.clone()).or_insert(0) += 1;
            }
            m
        })
        .collect()
}

fn pairing(m: &[i64], rays: &[Vec<i64>]) -> Vec<i64> {
    rays.iter()
        .map(|r| r.iter().zip(m).map(|(a, b)| a * b).sum())
        .collect()
}

fn in_shift(m: &[i64], n: &[i64], rays: &[Vec<i64>]) -> bool {
    pairing(m, rays).iter().zip(n).all(|(a, b)| a >= b)
}

/// `dim (S_(n1) ⊗ S_(n2))_m` over the semigroup ring, by linear algebra on all pairs `(a, b)` with
/// `a + b = m` modulo `(a + g) ⊗ b - a ⊗ (b + g)`. Pairs are searched in the box of radius `radius`;
/// the search panics if a pair touches its boundary.
pub fn tensor_dim_brute(
    rays: &[Vec<i64>],
    n1: &[i64],
    n2: &[i64],
    gens: &[Vec<i64>],
    m: &[i64],
    radius: i64,
) -> usize {
    let mut pairs: Vec<Vec<i64>> = Vec::new();
    for x in -radius..=radius {
        for y in -radius..=radius {
            let a = vec![x, y];
            let b = vec![m[0] - x, m[1] - y];
            if in_shift(&a, n1, rays) && in_shift(&b, n2, rays) {
                assert!(
                    x.abs() < radius && y.abs() < radius,
                    "search box too small at {m:?}"
                );
                pairs.push(a);
            }
        }
    }
    let index: BTreeMap<&Vec<i64>, usize> = pairs.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut relations = Vec::new();
    for a in &pairs {
        for g in gens {
            // a ⊗ b with b = m - a, and b = g + b' for b' in the second shift
            let shifted = vec![a[0] + g[0], a[1] + g[1]];
            let b2 = vec![m[0] - shifted[0], m[1] - shifted[1]];
            if in_shift(&b2, n2, rays) {
                let mut row = vec![0; pairs.len()];
                row[index[a]] -= 1;
                row[index[&shifted]] += 1;
                relations.push(row);
            }
        }
    }
    pairs.len()
        - if relations.is_empty() {
            0
        } else {
            rank(&relations)
        }
}

// ---------------------------------------------------------------- random data

pub fn small_vec(r: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(lo..=hi, r)
}

/// Nonzero exponent vectors generating a monomial ideal in `r` variables.
pub fn monomial_ideal() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..=3).prop_flat_map(|r| {
        prop::collection::vec(
            small_vec(r, 0, 3).prop_filter("nonzero", |v| v.iter().any(|&x| x > 0)),
            1..=4,
        )
    })
}

/// A fine-graded module over `k[x_1..x_r]` with up to three generators and three relations.
pub fn presentation() -> impl Strategy<Value = MonomialPresentation> {
    (2usize..=3)
        .prop_flat_map(|r| {
            (
                Just(r),
                prop::collection::vec(small_vec(r, 0, 2), 1..=3),
                prop::collection::vec((small_vec(r, 0, 3), prop::collection::vec(-2i64..=2, 3)), 0..=3),
            )
        })
        .prop_map(|(r, gens, rels)| {
            let mut entries = Vec::new();
            let mut row = 0;
            for (d, coeffs) in &rels {
                let before = entries.len();
                for (j, g) in gens.iter().enumerate() {
                    if coeffs[j] != 0 && g.iter().zip(d).all(|(a, b)| a <= b) {
                        let e: Vec<i64> = d.iter().zip(g).map(|(a, b)| a - b).collect();
                        entries.push(serde_json::json!({"row": row, "col": j, "coeff": coeffs[j], "exponent": e}));
                    }
                }
                row += usize::from(entries.len() > before);
            }
            serde_json::from_value(serde_json::json!({"vars": r, "generators": gens, "relations": entries}))
                .unwrap()
        })
}

/// A random finite poset with at most `max` elements, from random edges `i → j` with `i < j`.
pub fn poset(max: usize) -> impl Strategy<Value = Preorder> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| bits[i * n + j])
                .collect();
            Preorder::from_pairs(n, &pairs).unwrap()
        })
    })
}

pub fn vectors(d: usize, count: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(small_vec(d, -1, 1), count)
}

fn span(vs: &[Vec<i64>], d: usize) -> Subspace<Q> {
    let v: Vec<Vec<Q>> = vs
        .iter()
        .map(|r| r.iter().map(|&x| Q::from_i64(x)).collect())
        .collect();
    Subspace::from_vectors(&v, d).unwrap()
}

/// `E_x = W_x / U_x` for increasing families `U ⊆ W` built from vectors attached to elements:
/// `W_x` is spanned by the `w`-vectors of all `y ≤ x`, `U_x` by the `u`-vectors of those `y`.
pub fn subquotient(
    shape: &Preorder,
    d: usize,
    w: &[Vec<Vec<i64>>],
    u: &[Vec<Vec<i64>>],
) -> PosetRep<Q> {
    let n = shape.len();
    let below = |x: usize, src: &[Vec<Vec<i64>>]| -> Vec<Vec<i64>> {
        (0..n)
            .filter(|&y| shape.leq(y, x))
            .flat_map(|y| src[y].clone())
            .collect()
    };
    let ws: Vec<Subspace<Q>> = (0..n)
        .map(|x| {
            let mut all = below(x, w);
            all.extend(below(x, u));
            span(&all, d)
        })
        .collect();
    let us: Vec<Subspace<Q>> = (0..n).map(|x| span(&below(x, u), d)).collect();
    let sections: Vec<Matrix<Q>> = (0..n)
        .map(|x| complement_section(&us[x], &ws[x]).unwrap())
        .collect();
    let projections: Vec<Matrix<Q>> = (0..n)
        .map(|x| quotient_projection(&us[x], &ws[x]).unwrap())
        .collect();
    let dims: Vec<usize> = sections.iter().map(Matrix::cols).collect();
    let maps = shape
        .generating_pairs()
        .into_iter()
        .map(|(x, y)| ((x, y), projections[y].mul(&sections[x])))
        .collect();
    PosetRep::new(shape.clone(), dims, maps).unwrap()
}

/// Spanning vectors of `W_x` and `U_x` for each element.
pub type VectorData = (Vec<Vec<Vec<i64>>>, Vec<Vec<Vec<i64>>>);

/// Vectors for [`subquotient`]: per element, up to two `w`-vectors and at most one `u`-vector.
pub fn subquotient_data(n: usize, d: usize) -> impl Strategy<Value = VectorData> {
    (
        prop::collection::vec((0usize..=2).prop_flat_map(move |k| vectors(d, k)), n),
        prop::collection::vec((0usize..=1).prop_flat_map(move |k| vectors(d, k)), n),
    )
}

/// A full filtration of `k^d`: a strictly increasing chain of spans of prefixes of random vectors,
/// at strictly increasing indices starting in `[-1, 1]`.
pub fn filtration(d: usize) -> impl Strategy<Value = Filtration<Q>> {
    (vectors(d, d), -1i64..=1, prop::collection::vec(1i64..=2, d)).prop_map(
        move |(vs, start, gaps)| {
            let mut jumps: Vec<(i64, Subspace<Q>)> = Vec::new();
            let mut index = start;
            for k in 1..=d {
                let s = span(&vs[..k], d);
                if s.dim() > jumps.last().map_or(0, |(_, w)| w.dim()) {
                    jumps.push((index, s));
                    index += gaps[k - 1];
                }
            }
            let full = Subspace::full(d);
            if jumps.last().is_none_or(|(_, w)| *w != full) {
                jumps.push((index, full));
            }
            Filtration::new(d, jumps).unwrap()
        },
    )
}

/// Ambient dimension and one filtration per ray.
pub type Filtered = (usize, Vec<Filtration<Q>>);

pub fn filtrations(rays: usize) -> impl Strategy<Value = Filtered> {
    (1usize..=3).prop_flat_map(move |d| (Just(d), prop::collection::vec(filtration(d), rays)))
}

pub fn q(x: i64) -> Q {
    Q::from_i64(x)
}

pub fn one() -> BigRational {
    BigRational::one()
}
