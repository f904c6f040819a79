//! Integer vectors extended by `-∞`, lcm-lattices, anchors and threshold grids.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poset::Preorder;

/// An element of `Z ∪ {-∞}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Zbar {
    NegInf,
    Fin(i64),
}

impl Zbar {
    pub fn is_finite(self) -> bool {
        matches!(self, Zbar::Fin(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Zbar::Fin(v) => Some(v),
            Zbar::NegInf => None,
        }
    }
}

impl fmt::Display for Zbar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Zbar::NegInf => write!(f, "-inf"),
            Zbar::Fin(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Zbar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Zbar::NegInf => s.serialize_str("-inf"),
            Zbar::Fin(v) => s.serialize_i64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Zbar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Zbar;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or \"-inf\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Zbar, E> {
                Ok(Zbar::Fin(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Zbar, E> {
                i64::try_from(v).map(Zbar::Fin).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Zbar, E> {
                if v == "-inf" {
                    Ok(Zbar::NegInf)
                } else {
                    v.parse().map(Zbar::Fin).map_err(E::custom)
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A vector in `Z̄^r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZVec(pub Vec<Zbar>);

impl ZVec {
    pub fn bottom(r: usize) -> Self {
        ZVec(vec![Zbar::NegInf; r])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        ZVec(v.iter().map(|&x| Zbar::Fin(x)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// All coordinates finite.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    pub fn is_bottom(&self) -> bool {
        self.0.iter().all(|z| !z.is_finite())
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|z| z.finite()).collect()
    }

    /// Componentwise `≤`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `≤` against a finite point.
    pub fn le_point(&self, m: &[i64]) -> bool {
        self.0.len() == m.len() && self.0.iter().zip(m).all(|(a, &b)| *a <= Zbar::Fin(b))
    }

    /// Componentwise maximum.
    pub fn lcm(&self, other: &Self) -> Self {
        ZVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Coordinates at the given positions.
    pub fn project(&self, coords: &[usize]) -> Self {
        ZVec(coords.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for ZVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

/// Componentwise order on a list of vectors.
pub fn componentwise_order(elements: &[ZVec]) -> Preorder {
    Preorder::from_fn(elements.len(), |a, b| elements[a].le(&elements[b]))
        .expect("componentwise order is a preorder")
}

/// Sorted with the bottom element first, then lexicographically.
pub fn canonical_sort(elements: &mut Vec<ZVec>) {
    elements.sort_by(|a, b| b.is_bottom().cmp(&a.is_bottom()).then_with(|| a.cmp(b)));
    elements.dedup();
}

/// The finite members of the lcm-closure of a set of vectors, together with `0̂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcmLattice {
    pub rank: usize,
    pub elements: Vec<ZVec>,
}

impl LcmLattice {
    pub fn order(&self) -> Preorder {
        componentwise_order(&self.elements)
    }

    pub fn index_of(&self, v: &ZVec) -> Option<usize> {
        self.elements.iter().position(|e| e == v)
    }
}

pub fn lcm_closure(generators: &[ZVec]) -> Result<LcmLattice> {
    let rank = generators.first().map(ZVec::rank).unwrap_or(0);
    if generators.iter().any(|g| g.rank() != rank) {
        return Err(Error::DimensionMismatch(
            "generators of different ranks".into(),
        ));
    }
    let mut set: BTreeSet<ZVec> = generators.iter().cloned().collect();
    let mut frontier: Vec<ZVec> = set.iter().cloned().collect();
    while !frontier.is_empty() {
        let current: Vec<ZVec> = set.iter().cloned().collect();
        let mut next = Vec::new();
        for a in &frontier {
            for b in &current {
                let c = a.lcm(b);
                if !set.contains(&c) {
                    next.push(c);
                }
            }
        }
        for c in &next {
            set.insert(c.clone());
        }
        next.sort();
        next.dedup();
        frontier = next;
    }
    let mut elements: Vec<ZVec> = set.into_iter().filter(ZVec::is_finite).collect();
    elements.push(ZVec::bottom(rank));
    canonical_sort(&mut elements);
    Ok(LcmLattice { rank, elements })
}

/// Index of the unique maximal element of `elements` lying below the finite point `m`.
pub fn anchor_in(elements: &[ZVec], m: &[i64]) -> Result<usize> {
    let below: Vec<usize> = (0..elements.len())
        .filter(|&i| elements[i].le_point(m))
        .collect();
    let maximal: Vec<usize> = below
        .iter()
        .copied()
        .filter(|&i| {
            !below
                .iter()
                .any(|&j| j != i && elements[i].le(&elements[j]) && elements[i] != elements[j])
        })
        .collect();
    match maximal.as_slice() {
        [a] => Ok(*a),
        [] => Err(Error::Admissibility {
            degree: ZVec::from_ints(m).to_string(),
            first: "none".into(),
            second: "none".into(),
        }),
        [a, b, ..] => Err(Error::Admissibility {
            degree: ZVec::from_ints(m).to_string(),
            first: elements[*a].to_string(),
            second: elements[*b].to_string(),
        }),
    }
}

/// Per-coordinate sorted thresholds splitting `Z^r` into boxes on which data is constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub thresholds: Vec<Vec<i64>>,
}

impl ThresholdGrid {
    pub fn new(mut thresholds: Vec<Vec<i64>>) -> Self {
        for t in &mut thresholds {
            t.sort_unstable();
            t.dedup();
        }
        ThresholdGrid { thresholds }
    }

    /// Thresholds from the finite coordinates of the given vectors.
    pub fn from_elements(rank: usize, elements: &[ZVec]) -> Self {
        let mut t = vec![Vec::new(); rank];
        for e in elements {
            for (i, z) in e.0.iter().enumerate() {
                if let Zbar::Fin(v) = z {
                    t[i].push(*v);
                }
            }
        }
        Self::new(t)
    }

    pub fn rank(&self) -> usize {
        self.thresholds.len()
    }

    pub fn cell_count(&self) -> usize {
        self.thresholds.iter().map(|t| t.len() + 1).product()
    }

    /// All cells as index tuples, in lexicographic order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for t in &self.thresholds {
            let mut next = Vec::with_capacity(out.len() * (t.len() + 1));
            for prefix in &out {
                for j in 0..=t.len() {
                    let mut c = prefix.clone();
                    c.push(j);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Half-open interval `[lo, hi)` of cell index `j` in coordinate `i`; `None` means unbounded.
    pub fn interval(&self, i: usize, j: usize) -> (Option<i64>, Option<i64>) {
        let t = &self.thresholds[i];
        let lo = if j == 0 { None } else { Some(t[j - 1]) };
        let hi = t.get(j).copied();
        (lo, hi)
    }

    /// One point per cell: the lower corner, or one below the first threshold for the bottom cell.
    pub fn representative(&self, cell: &[usize]) -> Vec<i64> {
        cell.iter()
            .enumerate()
            .map(|(i, &j)| match self.interval(i, j) {
                (Some(lo), _) => lo,
                (None, Some(hi)) => hi - 1,
                (None, None) => 0,
            })
            .collect()
    }

    pub fn cell_of(&self, m: &[i64]) -> Vec<usize> {
        m.iter()
            .zip(&self.thresholds)
            .map(|(&v, t)| t.iter().filter(|&&x| x <= v).count())
            .collect()
    }

    pub fn contains(&self, cell: &[usize], m: &[i64]) -> bool {
        self.cell_of(m) == cell
    }

    /// Lower corner with `-∞` in coordinates whose interval is unbounded below.
    pub fn lower_corner(&self, cell: &[usize]) -> ZVec {
        ZVec(
            cell.iter()
                .enumerate()
                .map(|(i, &j)| match self.interval(i, j).0 {
                    Some(lo) => Zbar::Fin(lo),
                    None => Zbar::NegInf,
                })
                .collect(),
        )
    }

    /// Largest absolute threshold value.
    pub fn max_abs(&self) -> i64 {
        self.thresholds
            .iter()
            .flatten()
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }
}
