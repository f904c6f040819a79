//! The engine against reference computations that share no code with it.

mod common;

use common::*;
use proptest::prelude::*;
use toricres::exactla::Q;
use toricres::grmod::{
    minimal_free_resolution, tensor_diagnostic, MonomialPresentation, Presentation,
};
use toricres::toricfan::ConeContext;
use toricres::zbar::ZVec;

fn resolve_levels(p: &MonomialPresentation) -> Vec<Vec<Vec<i64>>> {
    let e = Presentation::<Q>::from_file(p).unwrap();
    minimal_free_resolution(&e).unwrap().resolution.levels
}

fn brute_dims(
    rays: &[Vec<i64>],
    n1: &[i64],
    n2: &[i64],
    gens: &[Vec<i64>],
    lo: &[i64],
    hi: &[i64],
) -> std::collections::BTreeMap<String, usize> {
    let mut out = std::collections::BTreeMap::new();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            let d = tensor_dim_brute(rays, n1, n2, gens, &[x, y], 24);
            if d > 0 {
                out.insert(ZVec::from_ints(&[x, y]).to_string(), d);
            }
        }
    }
    out
}

const WEDGE: [[i64; 2]; 2] = [[2, -1], [0, 1]];
const WEDGE_GENS: [[i64; 2]; 3] = [[1, 0], [1, 1], [1, 2]];

fn wedge_rays() -> Vec<Vec<i64>> {
    WEDGE.iter().map(|r| r.to_vec()).collect()
}

fn wedge_gens() -> Vec<Vec<i64>> {
    WEDGE_GENS.iter().map(|r| r.to_vec()).collect()
}

#[test]
fn fat_point_matches_taylor() {
    let gens = vec![vec![2, 0], vec![1, 1], vec![0, 2]];
    let levels = resolve_levels(&read("fat_point.json"));
    assert_eq!(level_counts(&levels), taylor_betti(&gens, 2));
    assert_eq!(
        levels.iter().map(Vec::len).collect::<Vec<_>>(),
        vec![1, 3, 2]
    );
}

#[test]
fn ideal_of_a_point_is_resolved_by_koszul() {
    let levels = resolve_levels(&read("koszul_ideal.json"));
    assert_eq!(
        sorted_levels(&levels),
        vec![vec![vec![0, 1], vec![1, 0]], vec![vec![1, 1]]]
    );
}

#[test]
fn polynomial_ring_is_free() {
    let levels = resolve_levels(&read("polynomial_ring.json"));
    assert_eq!(levels.len(), 1);
}

#[test]
fn tensor_pathology_matches_brute_force() {
    let (lo, hi) = ([-1, -1], [4, 6]);
    let ctx = ConeContext::new(2, wedge_rays());
    let r = tensor_diagnostic(&ctx, &[-1, 0], &[1, 0], &wedge_gens(), &lo, &hi, 10_000).unwrap();
    assert_eq!(
        r.dims,
        brute_dims(&wedge_rays(), &[-1, 0], &[1, 0], &wedge_gens(), &lo, &hi)
    );
    assert_eq!(r.dims.get("(1,1)"), Some(&2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monomial_ideals_match_taylor(gens in monomial_ideal()) {
        let r = gens[0].len();
        let levels = resolve_levels(&quotient_ring(&gens));
        prop_assert_eq!(level_counts(&levels), taylor_betti(&gens, r));
    }

    #[test]
    fn wedge_tensors_match_brute_force(n1 in small_vec(2, -2, 2), n2 in small_vec(2, -2, 2)) {
        let (lo, hi) = ([-2, -3], [3, 4]);
        let ctx = ConeContext::new(2, wedge_rays());
        let r = tensor_diagnostic(&ctx, &n1, &n2, &wedge_gens(), &lo, &hi, 10_000).unwrap();
        prop_assert_eq!(r.dims, brute_dims(&wedge_rays(), &n1, &n2, &wedge_gens(), &lo, &hi));
    }

    #[test]
    fn smooth_tensors_are_shifted_rings(n1 in small_vec(2, -2, 2), n2 in small_vec(2, -2, 2)) {
        let (lo, hi) = ([-3, -3], [5, 5]);
        let ctx = ConeContext::new(2, vec![vec![1, 0], vec![0, 1]]);
        let gens = vec![vec![1, 0], vec![0, 1]];
        let r = tensor_diagnostic(&ctx, &n1, &n2, &gens, &lo, &hi, 10_000).unwrap();
        prop_assert!(r.torsion.is_empty());
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                let expected = usize::from(x >= n1[0] + n2[0] && y >= n1[1] + n2[1]);
                let got = r.dims.get(&ZVec::from_ints(&[x, y]).to_string()).copied().unwrap_or(0);
                prop_assert_eq!(got, expected, "degree ({}, {})", x, y);
            }
        }
    }
}
