//! Randomized invariants; each check returns `Err` with a reason on a counterexample.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use toricres::exactla::{Scalar, Subspace, Q};
use toricres::globres::ConeModule;
use toricres::grmod::{
    affine_resolution, extension_ee, lcm_lattice_of, minimal_free_resolution, verify_resolution,
    zip_lattice, Entry, GradedModule, GradedResolution, LimitWindow, MonomialPresentation,
    Presentation,
};
use toricres::poset::{hooking, Preorder};
use toricres::posrep::{check_exact, free_resolution, pullback, PosetRep};
use toricres::reflexive::{
    arrangement_resolution, canonical_poset, default_margin, intersection_closure, reflexive_lift,
    syzygy_chain, Filtration, Filtrations, ReflexiveModule,
};
use toricres::toricfan::{p1xp1, ConeContext};
use toricres::zbar::{anchor_in, lcm_closure, ThresholdGrid, ZVec};
use toricres::Error;

use super::{
    filtrations, poset, presentation, small_vec, subquotient, subquotient_data, Filtered,
    VectorData,
};

pub const CASES: u32 = 200;

type Check = Result<(), TestCaseError>;

fn fail<T>(msg: String) -> Result<T, TestCaseError> {
    Err(TestCaseError::fail(msg))
}

fn engine<T>(r: toricres::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn identity_cone(r: usize) -> ConeContext {
    ConeContext::new(
        r,
        (0..r)
            .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
            .collect(),
    )
}

/// The cone with rays (2,-1), (0,1), whose dual semigroup is generated by (1,0), (1,1), (1,2).
pub fn wedge() -> ConeContext {
    ConeContext::new(2, vec![vec![2, -1], vec![0, 1]])
}

fn lattice_of(gens: &[Vec<i64>]) -> Vec<ZVec> {
    let g: Vec<ZVec> = gens.iter().map(|v| ZVec::from_ints(v)).collect();
    lcm_closure(&g).expect("equal ranks").elements
}

pub fn composes_to_zero<F: Scalar>(d: &[Vec<Entry<F>>]) -> bool {
    d.windows(2).all(|w| {
        let mut acc: std::collections::BTreeMap<(usize, usize, Vec<i64>), F> = Default::default();
        for b in &w[1] {
            for a in w[0].iter().filter(|a| a.col == b.row) {
                let e: Vec<i64> = a
                    .exponent
                    .iter()
                    .zip(&b.exponent)
                    .map(|(x, y)| x + y)
                    .collect();
                let slot = acc.entry((a.row, b.col, e)).or_insert_with(F::zero);
                *slot = slot.add(&a.coeff.mul(&b.coeff));
            }
        }
        acc.values().all(Scalar::is_zero)
    })
}

// ------------------------------------------------------------------ (a) zip / unzip

/// Lattice generators plus vector data for a representation on the lattice.
pub fn lattice_rep() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, usize, VectorData)> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(r, d)| {
            (
                Just(r),
                prop::collection::vec(small_vec(r, 0, 3), 1..=3),
                Just(d),
            )
        })
        .prop_flat_map(|(r, gens, d)| {
            let n = lattice_of(&gens).len();
            (Just(r), Just(gens), Just(d), subquotient_data(n, d))
        })
}

/// `zip(unzip(F)) = F` for a representation on an lcm-lattice.
pub fn zip_after_unzip(r: usize, gens: &[Vec<i64>], d: usize, data: &VectorData) -> Check {
    let elements = lattice_of(gens);
    let (mut w, mut u) = data.clone();
    let bottom = elements
        .iter()
        .position(ZVec::is_bottom)
        .expect("lattice has a bottom");
    w[bottom].clear();
    u[bottom].clear();
    let shape = toricres::zbar::componentwise_order(&elements);
    let rep = subquotient(&shape, d, &w, &u);
    let unzipped = engine(ConeModule::new(
        0,
        identity_cone(r),
        elements.clone(),
        rep.clone(),
    ))?;
    let z = engine(zip_lattice(&unzipped, &elements))?;
    if z.rep != rep {
        return fail(format!("zip(unzip) differs on {elements:?}"));
    }
    Ok(())
}

fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for (&a, &b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p| {
                (a..=b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// `unzip(zip(E)) ≅ E` through the maps from anchors: they are isomorphisms and commute with the
/// structure maps of both modules.
pub fn unzip_after_zip(p: &MonomialPresentation) -> Check {
    let e = engine(Presentation::<Q>::from_file(p))?;
    let (_, lattice) = engine(lcm_lattice_of(&e))?;
    let z = engine(zip_lattice(&e, &lattice.elements))?;
    let r = e.rank();
    let u = engine(ConeModule::new(
        0,
        identity_cone(r),
        z.elements.clone(),
        z.rep.clone(),
    ))?;
    let hi: Vec<i64> = (0..r)
        .map(|i| {
            lattice
                .elements
                .iter()
                .filter_map(|x| x.0[i].finite())
                .max()
                .unwrap_or(0)
                + 1
        })
        .collect();
    let lo = vec![-1; r];
    let to_anchor = |m: &[i64]| -> Result<Option<Vec<i64>>, TestCaseError> {
        Ok(lattice.elements[engine(anchor_in(&lattice.elements, m))?].to_ints())
    };
    for m in box_points(&lo, &hi) {
        let dim = engine(e.dim_at(&m))?;
        if engine(u.dim_at(&m))? != dim {
            return fail(format!("dimensions differ at {m:?}"));
        }
        let Some(a) = to_anchor(&m)? else {
            if dim != 0 {
                return fail(format!("bottom anchor at nonzero degree {m:?}"));
            }
            continue;
        };
        let iso = engine(e.map(&a, &m))?;
        if !iso.is_invertible() {
            return fail(format!("anchor map not invertible at {m:?}"));
        }
        for i in 0..r {
            let mut m2 = m.clone();
            m2[i] += 1;
            let a2 = to_anchor(&m2)?.expect("anchors grow");
            let lhs = engine(e.map(&m, &m2))?.mul(&iso);
            let rhs = engine(e.map(&a2, &m2))?.mul(&engine(u.map(&m, &m2))?);
            if lhs != rhs {
                return fail(format!("square from {m:?} to {m2:?} does not commute"));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ (b) certificates

fn recheck<F: Scalar>(e: &dyn GradedModule<F>, res: &GradedResolution<F>) -> Check {
    let back = engine(GradedResolution::<F>::from_file(&res.to_file()))?;
    engine(verify_resolution(e, &back))?;
    if !composes_to_zero(&res.differentials) {
        return fail("differentials do not compose to zero".into());
    }
    Ok(())
}

pub fn polynomial_certificate(p: &MonomialPresentation) -> Check {
    let e = engine(Presentation::<Q>::from_file(p))?;
    let r = engine(minimal_free_resolution(&e))?;
    if r.resolution.unit_entry().is_some() {
        return fail("unit entry in a minimal resolution".into());
    }
    recheck(&e, &r.resolution)
}

/// A module over the semigroup ring of [`wedge`]: generators in `M`, homogeneous relations.
pub fn wedge_presentation() -> impl Strategy<Value = MonomialPresentation> {
    (
        prop::collection::vec(small_vec(2, -1, 1), 1..=2),
        prop::collection::vec((small_vec(2, -1, 3), prop::collection::vec(-2i64..=2, 2)), 0..=3),
    )
        .prop_map(|(gens, rels)| {
            let ctx = wedge();
            let mut entries = Vec::new();
            let mut row = 0;
            for (d, coeffs) in &rels {
                let before = entries.len();
                for (j, g) in gens.iter().enumerate() {
                    let e: Vec<i64> = d.iter().zip(g).map(|(a, b)| a - b).collect();
                    if coeffs[j] != 0 && ctx.pairing(&e).iter().all(|&v| v >= 0) {
                        entries.push(serde_json::json!({"row": row, "col": j, "coeff": coeffs[j], "exponent": e}));
                    }
                }
                row += usize::from(entries.len() > before);
            }
            serde_json::from_value(serde_json::json!({"vars": 2, "generators": gens, "relations": entries}))
                .unwrap()
        })
}

/// Resolutions over the semigroup ring through the lcm-lattice. Inputs whose lcm-lattice is not
/// admissible are rejected by the engine; anything it emits must verify.
pub fn affine_certificate(p: &MonomialPresentation) -> Check {
    let ctx = wedge();
    let e = engine(Presentation::<Q>::from_file_on_cone(p, &ctx))?;
    let (_, lattice) = engine(lcm_lattice_of(&e))?;
    match affine_resolution(&e, &ctx, &lattice.elements, LimitWindow::for_cone(&ctx)) {
        Ok(res) => recheck(&e, &res),
        Err(Error::Completion { .. } | Error::Admissibility { .. }) => Ok(()),
        Err(other) => fail(other.to_string()),
    }
}

pub fn reflexive_module(d: usize, f: &[Filtration<Q>]) -> ReflexiveModule<Q> {
    ReflexiveModule::new(d, f.to_vec(), wedge()).expect("two filtrations")
}

pub fn reflexive_certificate(d: usize, f: &[Filtration<Q>]) -> Check {
    let e = reflexive_module(d, f);
    let m = default_margin(&e.ctx);
    let canonical = engine(canonical_poset(&e, m))?;
    let closed = engine(intersection_closure(&e, &canonical))?;
    for arr in [&canonical, &closed] {
        let res = engine(arrangement_resolution(&e, arr, m))?;
        recheck(&e, &res)?;
    }
    Ok(())
}

pub fn global_reflexive_certificate(d: usize, f: &[Filtration<Q>]) -> Check {
    let filts = Filtrations {
        ambient: d,
        by_ray: f.iter().cloned().enumerate().collect(),
    };
    let fan = p1xp1();
    let r = engine(toricres::reflexive::global_reflexive_resolution(
        &filts, &fan, None,
    ))?;
    if !composes_to_zero(&r.differentials) {
        return fail("global differentials do not compose to zero".into());
    }
    for c in &r.cones {
        let module = engine(filts.on_cone(&fan.context(c.cone)))?;
        recheck(&module, &c.resolution)?;
    }
    Ok(())
}

// ------------------------------------------------------------------ (c) pullback along contractions

/// A contraction `Q × R → Q` (R has a least element), with the elements of the product shuffled.
pub fn contraction_case() -> impl Strategy<Value = (Preorder, Preorder, Vec<usize>, usize)> {
    (poset(4), 1usize..=3, any::<bool>(), 1usize..=3)
        .prop_filter("at most eight elements", |(q, r, _, _)| q.len() * r <= 8)
        .prop_flat_map(|(q, r, vee, d)| {
            let factor = if vee && r == 3 {
                Preorder::from_pairs(3, &[(0, 1), (0, 2)]).unwrap()
            } else {
                Preorder::chain(r)
            };
            let n = q.len() * r;
            (
                Just(q),
                Just(factor),
                Just(d),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        })
        .prop_map(|(q, factor, d, perm)| {
            let (nq, nr) = (q.len(), factor.len());
            // element perm[i] of the product is the pair (i / nr, i % nr)
            let mut pair = vec![(0, 0); nq * nr];
            for (i, &p) in perm.iter().enumerate() {
                pair[p] = (i / nr, i % nr);
            }
            let product = Preorder::from_fn(nq * nr, |a, b| {
                q.leq(pair[a].0, pair[b].0) && factor.leq(pair[a].1, pair[b].1)
            })
            .unwrap();
            let f: Vec<usize> = pair.iter().map(|p| p.0).collect();
            (product, q, f, d)
        })
}

/// Resolving the pullback gives the pullback of the resolution: the generators of `f*F^y` sit at
/// the hooking `h(y)`, level by level.
pub fn pullback_commutes(
    source: &Preorder,
    target: &Preorder,
    f: &[usize],
    e: &PosetRep<Q>,
) -> Check {
    let h = engine(hooking(source, target, f))?;
    let pulled = engine(pullback(source, f, e))?;
    let down = engine(free_resolution(&pulled))?;
    engine(check_exact(&down))?;
    let up = engine(free_resolution(e))?;
    engine(check_exact(&up))?;
    if down.levels.len() != up.levels.len() {
        return fail(format!(
            "lengths {} and {}",
            down.levels.len(),
            up.levels.len()
        ));
    }
    for (a, b) in down.levels.iter().zip(&up.levels) {
        let mut expected: Vec<usize> = b.generators().into_iter().map(|y| h[y]).collect();
        let mut got = a.generators();
        expected.sort_unstable();
        got.sort_unstable();
        if got != expected {
            return fail(format!("generators {got:?}, expected {expected:?}"));
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ (d) anchors

pub fn anchor_case() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>)> {
    (1usize..=4).prop_flat_map(|r| {
        (
            prop::collection::vec(small_vec(r, -2, 3), 1..=3),
            small_vec(r, -3, 5),
            small_vec(r, 0, 3),
        )
    })
}

pub fn anchors_behave(gens: &[Vec<i64>], m: &[i64], step: &[i64]) -> Check {
    let l = lattice_of(gens);
    let a = engine(anchor_in(&l, m))?;
    if let Some(n) = l[a].to_ints() {
        if engine(anchor_in(&l, &n))? != a {
            return fail(format!("anchor of {} is not itself", l[a]));
        }
    }
    let m2: Vec<i64> = m.iter().zip(step).map(|(x, y)| x + y).collect();
    let a2 = engine(anchor_in(&l, &m2))?;
    if !l[a].le(&l[a2]) {
        return fail(format!("anchors {} and {} are not monotone", l[a], l[a2]));
    }
    let grid = ThresholdGrid::from_elements(m.len(), &l);
    let rep = grid.representative(&grid.cell_of(m));
    if engine(anchor_in(&l, &rep))? != a {
        return fail(format!("anchor not constant on the cell of {m:?}"));
    }
    Ok(())
}

// ------------------------------------------------------------------ (e) EE of filtrations

pub fn ee_case() -> impl Strategy<Value = (Filtered, Vec<i64>, Vec<i64>)> {
    (filtrations(2), small_vec(2, -2, 4), small_vec(2, 0, 2))
}

pub fn ee_is_intersection(d: usize, f: &[Filtration<Q>], n: &[i64], step: &[i64]) -> Check {
    let e = reflexive_module(d, f);
    let ctx = wedge();
    let ee = extension_ee(&e, &ctx, LimitWindow::for_cone(&ctx));
    let value = engine(e.value(n))?;
    if engine(ee.dim_at(n))? != value.dim() {
        return fail(format!("EE has the wrong dimension at {n:?}"));
    }
    let n2: Vec<i64> = n.iter().zip(step).map(|(a, b)| a + b).collect();
    if engine(ee.map(n, &n2))?.rank() != value.dim() {
        return fail(format!("EE map from {n:?} is not injective"));
    }
    Ok(())
}

// ------------------------------------------------------------------ (f) first-syzygy contraction

pub fn syzygy_contracts(d: usize, f: &[Filtration<Q>]) -> Check {
    let e = reflexive_module(d, f);
    let chain = engine(syzygy_chain(&e, default_margin(&e.ctx)))?;
    for (i, step) in chain.iter().enumerate() {
        if step.contraction == Some(false) {
            return fail(format!("anchor map at step {i} is not a contraction"));
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ (g) lift identity

pub fn lift_case() -> impl Strategy<Value = (Filtered, Vec<i64>)> {
    (filtrations(4), small_vec(2, -1, 3))
}

/// `EÊ_{λ_σ(n)} = E^σ_n` on every maximal cone of `P¹ × P¹`, with `EÊ_ν = ⋂_ρ E^ρ(ν_ρ)`.
pub fn lift_identity(d: usize, f: &[Filtration<Q>], n: &[i64]) -> Check {
    let filts = Filtrations {
        ambient: d,
        by_ray: f.iter().cloned().enumerate().collect(),
    };
    let fan = p1xp1();
    for s in fan.maximal_cones() {
        let ctx = fan.context(s);
        let target = engine(engine(filts.on_cone(&ctx))?.value(n))?;
        let lift = engine(reflexive_lift(&filts, &fan, s, &ZVec::from_ints(n)))?;
        if lift.project(&ctx.ray_ids) != ZVec::from_ints(n) {
            return fail(format!("lift {lift} does not project to {n:?}"));
        }
        let mut w = Subspace::<Q>::full(d);
        for (r, z) in lift.0.iter().enumerate() {
            w = match z.finite() {
                Some(i) => engine(w.meet(&f[r].value(i)))?,
                None => Subspace::zero(d),
            };
        }
        if w != target {
            return fail(format!("value at the lift {lift} differs on cone {s}"));
        }
    }
    Ok(())
}

pub fn all_strategies_compile() {
    let _ = presentation();
}
