//! Fans, cone pairings and the gluing of anchor posets over a fan.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{kernel, Matrix, Scalar, Q};
use crate::poset::{GluingSystem, Preorder};
use crate::zbar::{componentwise_order, ZVec};

/// Default coefficient bound for the supporting-functional search.
pub const DEFAULT_FACE_BOUND: i64 = 64;

/// Upper limit on lattice points examined by a single search.
pub const SEARCH_CAP: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub rays: Vec<usize>,
    #[serde(default)]
    pub faces: Vec<usize>,
}

/// A fan given by primitive ray generators and cones listing their rays and faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    #[serde(rename = "N_rank")]
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<ConeSpec>,
    #[serde(default)]
    pub semigroup_gens: BTreeMap<usize, Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanReport {
    pub valid: bool,
    pub errors: Vec<String>,
    /// `(cone, face)` pairs for which no supporting functional was found within the bound.
    pub unverified_faces: Vec<(usize, usize)>,
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Fan {
    pub fn cone(&self, c: usize) -> &ConeSpec {
        &self.cones[c]
    }

    pub fn zero_cone(&self) -> Option<usize> {
        self.cones.iter().position(|c| c.rays.is_empty())
    }

    /// `τ` is a face of `σ` (reflexive), following the declared face lists transitively.
    pub fn face_order(&self) -> Preorder {
        let mut pairs = Vec::new();
        for (s, c) in self.cones.iter().enumerate() {
            for &t in &c.faces {
                if t < self.cones.len() {
                    pairs.push((t, s));
                }
            }
        }
        Preorder::from_pairs(self.cones.len(), &pairs).expect("face indices checked")
    }

    /// Cones that are not a proper face of another cone.
    pub fn maximal_cones(&self) -> Vec<usize> {
        let order = self.face_order();
        (0..self.cones.len())
            .filter(|&s| !(0..self.cones.len()).any(|t| t != s && order.leq(s, t)))
            .collect()
    }

    pub fn context(&self, c: usize) -> ConeContext {
        let ids = self.cones[c].rays.clone();
        ConeContext {
            rank: self.rank,
            rays: ids.iter().map(|&r| self.rays[r].clone()).collect(),
            ray_ids: ids,
        }
    }

    /// Positions of `τ`'s rays inside `σ`'s ray list.
    pub fn localization_projection(&self, sigma: usize, tau: usize) -> Result<Vec<usize>> {
        let s = &self.cones[sigma].rays;
        self.cones[tau]
            .rays
            .iter()
            .map(|r| {
                s.iter().position(|x| x == r).ok_or_else(|| {
                    Error::InvalidFan(format!(
                        "ray {r} of cone {tau} is not a ray of cone {sigma}"
                    ))
                })
            })
            .collect()
    }
}

/// Checks primitivity, duplicates, the zero cone and every declared face.
pub fn validate_fan(fan: &Fan, bound: i64) -> FanReport {
    let mut errors = Vec::new();
    let mut unverified = Vec::new();
    for (i, r) in fan.rays.iter().enumerate() {
        if r.len() != fan.rank {
            errors.push(format!(
                "ray {i} has length {} instead of {}",
                r.len(),
                fan.rank
            ));
        } else if gcd_all(r) != 1 {
            errors.push(format!("ray {i} is not primitive"));
        }
        for (j, s) in fan.rays.iter().enumerate().skip(i + 1) {
            if r == s {
                errors.push(format!("rays {i} and {j} coincide"));
            }
        }
    }
    if fan.zero_cone().is_none() {
        errors.push("the zero cone is missing".into());
    }
    for (c, cone) in fan.cones.iter().enumerate() {
        let mut sorted = cone.rays.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cone.rays.len() {
            errors.push(format!("cone {c} repeats a ray"));
        }
        if cone.rays.iter().any(|&r| r >= fan.rays.len()) {
            errors.push(format!("cone {c} refers to a missing ray"));
        }
        for &t in &cone.faces {
            if t >= fan.cones.len() {
                errors.push(format!("cone {c} lists missing face {t}"));
            }
        }
    }
    if errors.is_empty() {
        for (c, cone) in fan.cones.iter().enumerate() {
            for &t in &cone.faces {
                let face = &fan.cones[t];
                if !face.rays.iter().all(|r| cone.rays.contains(r)) {
                    errors.push(format!("face {t} of cone {c} has a ray outside the cone"));
                    continue;
                }
                let ctx = fan.context(c);
                let inside: Vec<usize> = face
                    .rays
                    .iter()
                    .map(|r| cone.rays.iter().position(|x| x == r).expect("checked"))
                    .collect();
                match ctx.supporting_functional(&inside, bound) {
                    Ok(Some(_)) => {}
                    Ok(None) | Err(_) => unverified.push((c, t)),
                }
            }
        }
        for (s, gens) in &fan.semigroup_gens {
            if *s >= fan.cones.len() {
                errors.push(format!("semigroup generators for missing cone {s}"));
                continue;
            }
            let ctx = fan.context(*s);
            for g in gens {
                if g.len() != fan.rank || ctx.pairing(g).iter().any(|&v| v < 0) {
                    errors.push(format!(
                        "semigroup generator {g:?} is not in the dual cone of {s}"
                    ));
                }
            }
        }
    }
    FanReport {
        valid: errors.is_empty(),
        errors,
        unverified_faces: unverified,
    }
}

/// A cone seen through its rays: `m ↦ (⟨m, n(ρ)⟩)_ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeContext {
    pub rank: usize,
    pub ray_ids: Vec<usize>,
    pub rays: Vec<Vec<i64>>,
}

impl ConeContext {
    pub fn new(rank: usize, rays: Vec<Vec<i64>>) -> Self {
        let ray_ids = (0..rays.len()).collect();
        ConeContext {
            rank,
            ray_ids,
            rays,
        }
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn pairing(&self, m: &[i64]) -> Vec<i64> {
        self.rays.iter().map(|r| dot(m, r)).collect()
    }

    /// `m ≤_σ m'`.
    pub fn leq(&self, m: &[i64], m2: &[i64]) -> bool {
        let d: Vec<i64> = m2.iter().zip(m).map(|(a, b)| a - b).collect();
        self.pairing(&d).iter().all(|&v| v >= 0)
    }

    fn pairing_matrix(&self) -> Matrix<Q> {
        Matrix::from_i64_rows(&self.rays, self.rank).expect("rays have rank entries")
    }

    /// Whether the pairing is injective (the cone spans the lattice).
    pub fn is_full_dimensional(&self) -> bool {
        self.pairing_matrix().rank() == self.rank
    }

    /// Some `m` with pairing zero on the listed rays and positive on the others, coefficients
    /// bounded by `bound` in an integral basis of the annihilator.
    pub fn supporting_functional(&self, face: &[usize], bound: i64) -> Result<Option<Vec<i64>>> {
        let rows: Vec<Vec<i64>> = face.iter().map(|&i| self.rays[i].clone()).collect();
        let basis = integral_kernel_basis(&rows, self.rank);
        let k = basis.len();
        let others: Vec<usize> = (0..self.rays.len()).filter(|i| !face.contains(i)).collect();
        if others.is_empty() {
            return Ok(Some(vec![0; self.rank]));
        }
        if k == 0 {
            return Ok(None);
        }
        let mut b = bound;
        while b > 1 && ((2 * b + 1) as f64).powi(k as i32) > SEARCH_CAP as f64 {
            b /= 2;
        }
        let mut coeffs = vec![-b; k];
        loop {
            let m: Vec<i64> = (0..self.rank)
                .map(|j| basis.iter().zip(&coeffs).map(|(v, c)| v[j] * c).sum())
                .collect();
            if others.iter().all(|&i| dot(&m, &self.rays[i]) > 0) {
                return Ok(Some(m));
            }
            let mut i = 0;
            loop {
                if i == k {
                    return Ok(None);
                }
                if coeffs[i] < b {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = -b;
                i += 1;
            }
        }
    }

    /// Lattice points `m` whose pairing lies in the box `lo ≤ p ≤ hi`, with their pairings,
    /// sorted by pairing. Requires a full-dimensional cone.
    pub fn points_in_box(&self, lo: &[i64], hi: &[i64]) -> Result<Vec<(Vec<i64>, Vec<i64>)>> {
        let r = self.pairing_matrix();
        let (_, piv) = r.transpose().rref();
        if piv.len() < self.rank {
            return Err(Error::Unsupported(
                "lattice points of a cone that does not span the lattice".into(),
            ));
        }
        let sub = r.select_rows(&piv);
        let inv = sub.inverse()?;
        let lens: Vec<i64> = piv.iter().map(|&i| (hi[i] - lo[i] + 1).max(0)).collect();
        let total: f64 = lens.iter().map(|&l| l as f64).product();
        if total > SEARCH_CAP as f64 {
            return Err(Error::WindowTooLarge(format!("{total} candidate points")));
        }
        let mut out = Vec::new();
        if lens.contains(&0) {
            return Ok(out);
        }
        let mut cur: Vec<i64> = piv.iter().map(|&i| lo[i]).collect();
        loop {
            let p: Vec<Q> = cur.iter().map(|&v| Q::from_i64(v)).collect();
            let m = inv.apply(&p);
            if m.iter().all(|q| q.0.is_integer()) {
                let m: Vec<i64> = m
                    .iter()
                    .map(|q| q.0.to_integer().try_into().expect("small coordinates"))
                    .collect();
                let full = self.pairing(&m);
                if full.iter().zip(lo).all(|(a, b)| a >= b)
                    && full.iter().zip(hi).all(|(a, b)| a <= b)
                {
                    out.push((m, full));
                }
            }
            let mut i = 0;
            loop {
                if i == cur.len() {
                    out.sort_by(|a, b| a.1.cmp(&b.1));
                    return Ok(out);
                }
                if cur[i] < hi[piv[i]] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[piv[i]];
                i += 1;
            }
        }
    }

    /// Largest absolute pairing of a standard basis vector; lattice points of the image occur
    /// with at most this spacing along each coordinate direction.
    pub fn step_bound(&self) -> i64 {
        self.rays
            .iter()
            .flat_map(|r| r.iter().map(|v| v.abs()))
            .max()
            .unwrap_or(1)
            .max(1)
    }
}

/// Integral vectors spanning the rational kernel of the rows.
fn integral_kernel_basis(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let m = Matrix::<Q>::from_i64_rows(rows, n).expect("rows of length n");
    let k = kernel(&m);
    (0..k.dim())
        .map(|i| {
            let v = k.basis_rows().row(i);
            let den = v
                .iter()
                .fold(num_bigint::BigInt::from(1), |acc, q| acc.lcm(q.0.denom()));
            let ints: Vec<i64> = v
                .iter()
                .map(|q| {
                    let x = &q.0 * num_rational::BigRational::from_integer(den.clone());
                    x.to_integer().try_into().expect("small kernel vector")
                })
                .collect();
            let g = gcd_all(&ints).max(1);
            ints.into_iter().map(|x| x / g).collect()
        })
        .collect()
}

/// The gluing system of per-cone anchor posets over the face order of the fan.
///
/// `posets[c]` lists elements of `Z̄^{σ(1)}` for cone `c`; the localization towards a face
/// compares projections, and the contraction sends an element to its projection, which must
/// belong to the face's poset.
pub fn fan_gluing_system(fan: &Fan, posets: &[Vec<ZVec>]) -> Result<GluingSystem> {
    if posets.len() != fan.cones.len() {
        return Err(Error::InvalidFan(format!(
            "{} posets for {} cones",
            posets.len(),
            fan.cones.len()
        )));
    }
    let index = fan.face_order();
    let orders: Vec<Preorder> = posets.iter().map(|p| componentwise_order(p)).collect();
    let mut localizations = BTreeMap::new();
    let mut contractions = BTreeMap::new();
    for s in 0..fan.cones.len() {
        for t in 0..fan.cones.len() {
            if s == t || !index.leq(t, s) {
                continue;
            }
            let proj = fan.localization_projection(s, t)?;
            let images: Vec<ZVec> = posets[s].iter().map(|x| x.project(&proj)).collect();
            let loc = Preorder::from_fn(images.len(), |a, b| images[a].le(&images[b]))?;
            let l: Vec<usize> = images
                .iter()
                .map(|im| {
                    posets[t].iter().position(|y| y == im).ok_or_else(|| {
                        Error::InvalidFan(format!(
                            "projection {im} of an element of cone {s} is missing from cone {t}"
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            localizations.insert((s, t), loc);
            contractions.insert((s, t), l);
        }
    }
    Ok(GluingSystem {
        index,
        posets: orders,
        localizations,
        contractions,
    })
}

/// The fan of `P¹ × P¹`: rays `e1, e2, -e1, -e2`, maximal cones `{1,2},{2,3},{3,4},{4,1}`.
pub fn p1xp1() -> Fan {
    let rays = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
    let mut cones = vec![ConeSpec {
        rays: vec![],
        faces: vec![],
    }];
    for r in 0..4 {
        cones.push(ConeSpec {
            rays: vec![r],
            faces: vec![0],
        });
    }
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        let mut rs = vec![a, b];
        rs.sort_unstable();
        cones.push(ConeSpec {
            rays: rs,
            faces: vec![0, 1 + a, 1 + b],
        });
    }
    Fan {
        rank: 2,
        rays,
        cones,
        semigroup_gens: BTreeMap::new(),
    }
}
