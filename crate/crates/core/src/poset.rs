//! Finite preorders, quotients, localizations, contractions and gluing systems.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reflexive, transitive relation on `0..n`, stored densely.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Preorder {
    n: usize,
    rel: Vec<bool>,
}

impl Preorder {
    /// Builds the relation from a predicate and checks reflexivity and transitivity.
    pub fn from_fn(n: usize, mut leq: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut rel = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                rel[x * n + y] = leq(x, y);
            }
        }
        let p = Preorder { n, rel };
        p.check()?;
        Ok(p)
    }

    /// Reflexive-transitive closure of the given pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut rel = vec![false; n * n];
        for x in 0..n {
            rel[x * n + x] = true;
        }
        for &(x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::InvalidOrder(format!(
                    "pair ({x},{y}) outside 0..{n}"
                )));
            }
            rel[x * n + y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i * n + k] {
                    for j in 0..n {
                        if rel[k * n + j] {
                            rel[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Ok(Preorder { n, rel })
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_pairs(n, &[]).expect("empty pair list")
    }

    pub fn chain(n: usize) -> Self {
        Self::from_fn(n, |x, y| x <= y).expect("chain is a total order")
    }

    fn check(&self) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            if !self.leq(x, x) {
                return Err(Error::InvalidOrder(format!("not reflexive at {x}")));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !self.leq(x, y) {
                    continue;
                }
                for z in 0..n {
                    if self.leq(y, z) && !self.leq(x, z) {
                        return Err(Error::InvalidOrder(format!(
                            "not transitive: {x} <= {y} <= {z}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.rel[x * self.n + y]
    }

    /// `x ≤ y` and not `y ≤ x`.
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && !self.leq(y, x)
    }

    /// `x ≶ y`.
    pub fn equiv(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && self.leq(y, x)
    }

    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.leq(x, y)).collect()
    }

    pub fn down_set(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.leq(y, x)).collect()
    }

    pub fn is_partial_order(&self) -> bool {
        (0..self.n).all(|x| (0..self.n).all(|y| x == y || !self.equiv(x, y)))
    }

    /// Minimal elements of `subset` (elements with nothing strictly below them in `subset`).
    pub fn minimal_in(&self, subset: &[usize]) -> Vec<usize> {
        subset
            .iter()
            .copied()
            .filter(|&x| !subset.iter().any(|&y| self.lt(y, x)))
            .collect()
    }

    pub fn maximal_in(&self, subset: &[usize]) -> Vec<usize> {
        subset
            .iter()
            .copied()
            .filter(|&x| !subset.iter().any(|&y| self.lt(x, y)))
            .collect()
    }

    /// Pairs `x ≠ y` with `x ≤ y` that generate the relation: strict covers between classes plus
    /// all pairs inside a class.
    pub fn generating_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x == y || !self.leq(x, y) {
                    continue;
                }
                if self.equiv(x, y) {
                    out.push((x, y));
                    continue;
                }
                let covered = (0..n).any(|z| self.lt(x, z) && self.lt(z, y));
                if !covered {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Equivalence classes of `≶`, ordered by smallest member; returns (class of each element, classes).
    pub fn classes(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut class_of = vec![usize::MAX; self.n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (x..self.n).filter(|&y| self.equiv(x, y)).collect();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members);
        }
        (class_of, classes)
    }

    /// The poset of `≶`-classes and the projection onto it.
    pub fn quotient_by_equiv(&self) -> (Preorder, Vec<usize>) {
        let (class_of, classes) = self.classes();
        let q = Preorder::from_fn(classes.len(), |a, b| self.leq(classes[a][0], classes[b][0]))
            .expect("quotient of a preorder is a preorder");
        debug_assert!(q.is_partial_order());
        (q, class_of)
    }

    /// Restriction to the listed elements, in the listed order.
    pub fn restrict(&self, elements: &[usize]) -> Preorder {
        Preorder::from_fn(elements.len(), |a, b| self.leq(elements[a], elements[b]))
            .expect("restriction of a preorder")
    }
}

/// Whether `loc` is a localization of `base`: `≤ ⊆ ≤'` and every `x ≤' y` has some `w ≶' y`
/// with `x ≤ w`.
pub fn is_localization(base: &Preorder, loc: &Preorder) -> bool {
    if base.len() != loc.len() {
        return false;
    }
    let n = base.len();
    for x in 0..n {
        for y in 0..n {
            if base.leq(x, y) && !loc.leq(x, y) {
                return false;
            }
            if loc.leq(x, y) && !(0..n).any(|w| loc.equiv(w, y) && base.leq(x, w)) {
                return false;
            }
        }
    }
    true
}

pub fn is_order_preserving(source: &Preorder, target: &Preorder, f: &[usize]) -> bool {
    f.len() == source.len()
        && f.iter().all(|&v| v < target.len())
        && (0..source.len())
            .all(|x| (0..source.len()).all(|y| !source.leq(x, y) || target.leq(f[x], f[y])))
}

fn sorted_unique(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Whether `f` is a contraction between posets: images of principal up-sets are principal and
/// preimages of principal up-sets are principal.
pub fn is_contraction(source: &Preorder, target: &Preorder, f: &[usize]) -> bool {
    contraction_failure(source, target, f).is_none()
}

fn contraction_failure(source: &Preorder, target: &Preorder, f: &[usize]) -> Option<String> {
    if !is_order_preserving(source, target, f) {
        return Some("map is not order preserving".into());
    }
    for x in 0..source.len() {
        let img = sorted_unique(source.up_set(x).into_iter().map(|z| f[z]).collect());
        if img != target.up_set(f[x]) {
            return Some(format!("image of the up-set of {x} is not principal"));
        }
    }
    for y in 0..target.len() {
        if principal_preimage(source, target, f, y).is_none() {
            return Some(format!("preimage of the up-set of {y} is not principal"));
        }
    }
    None
}

fn principal_preimage(
    source: &Preorder,
    target: &Preorder,
    f: &[usize],
    y: usize,
) -> Option<usize> {
    let pre: Vec<usize> = (0..source.len()).filter(|&z| target.leq(y, f[z])).collect();
    pre.iter().copied().find(|&x| source.up_set(x) == pre)
}

/// The hooking `h` of a contraction: `f⁻¹(U(y)) = U(h(y))`.
pub fn hooking(source: &Preorder, target: &Preorder, f: &[usize]) -> Result<Vec<usize>> {
    if let Some(why) = contraction_failure(source, target, f) {
        return Err(Error::NotContraction(why));
    }
    Ok((0..target.len())
        .map(|y| principal_preimage(source, target, f, y).expect("contraction"))
        .collect())
}

/// Posets glued over an index poset.
#[derive(Clone, Debug)]
pub struct GluingSystem {
    /// The index poset `A`; `β ≤ α` in it means `β` sits below `α`.
    pub index: Preorder,
    pub posets: Vec<Preorder>,
    /// Localization of `posets[α]` towards `β`, keyed by `(α, β)` with `β < α`.
    pub localizations: BTreeMap<(usize, usize), Preorder>,
    /// Maps elements of `posets[α]` to representatives in `posets[β]`, keyed by `(α, β)`.
    pub contractions: BTreeMap<(usize, usize), Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingReport {
    pub valid: bool,
    pub failures: Vec<String>,
}

impl GluingSystem {
    fn contraction_rep(&self, a: usize, b: usize, x: usize) -> Option<usize> {
        if a == b {
            Some(x)
        } else {
            self.contractions
                .get(&(a, b))
                .and_then(|f| f.get(x).copied())
        }
    }

    /// Checks localizations, contractions on the quotients, and the composition condition on
    /// every chain `γ < β < α`.
    pub fn validate(&self) -> GluingReport {
        let mut failures = Vec::new();
        let a_len = self.index.len();
        if self.posets.len() != a_len {
            failures.push(format!(
                "{} posets given for an index of size {a_len}",
                self.posets.len()
            ));
            return GluingReport {
                valid: false,
                failures,
            };
        }
        for a in 0..a_len {
            for b in 0..a_len {
                if a == b || !self.index.leq(b, a) {
                    continue;
                }
                if let Some(why) = self.check_pair(a, b) {
                    failures.push(format!("pair ({a},{b}): {why}"));
                }
            }
        }
        if failures.is_empty() {
            for a in 0..a_len {
                for b in 0..a_len {
                    for c in 0..a_len {
                        if a == b || b == c || !self.index.leq(b, a) || !self.index.leq(c, b) {
                            continue;
                        }
                        if let Some(x) = self.chain_failure(a, b, c) {
                            failures.push(format!(
                                "chain ({c},{b},{a}): compositions differ at element {x}"
                            ));
                        }
                    }
                }
            }
        }
        GluingReport {
            valid: failures.is_empty(),
            failures,
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Option<String> {
        let pa = &self.posets[a];
        let pb = &self.posets[b];
        let Some(loc) = self.localizations.get(&(a, b)) else {
            return Some("missing localization".into());
        };
        if !is_localization(pa, loc) {
            return Some("not a localization".into());
        }
        let Some(l) = self.contractions.get(&(a, b)) else {
            return Some("missing contraction".into());
        };
        if l.len() != pa.len() || l.iter().any(|&v| v >= pb.len()) {
            return Some("contraction has the wrong shape".into());
        }
        let (src_q, src_cls) = loc.quotient_by_equiv();
        let (tgt_q, tgt_cls) = pb.quotient_by_equiv();
        let mut induced = vec![usize::MAX; src_q.len()];
        for x in 0..pa.len() {
            let c = src_cls[x];
            let v = tgt_cls[l[x]];
            if induced[c] == usize::MAX {
                induced[c] = v;
            } else if induced[c] != v {
                return Some(format!("contraction is not constant on the class of {x}"));
            }
        }
        contraction_failure(&src_q, &tgt_q, &induced)
    }

    fn chain_failure(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        let pc = &self.posets[c];
        for x in 0..self.posets[a].len() {
            let via_b = self
                .contraction_rep(a, b, x)
                .and_then(|y| self.contraction_rep(b, c, y));
            let direct = self.contraction_rep(a, c, x);
            match (via_b, direct) {
                (Some(u), Some(v)) if pc.equiv(u, v) => {}
                _ => return Some(x),
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn up_sets() {
        let c = Preorder::chain(3);
        assert_eq!(c.up_set(1), vec![1, 2]);
        assert_eq!(c.up_set(2), vec![2]);
        assert_eq!(Preorder::discrete(3).up_set(1), vec![1]);
    }

    #[test]
    fn quotient_of_cycle_below_top() {
        let p = Preorder::from_pairs(4, &[(0, 1), (1, 0), (0, 3), (2, 3)]).unwrap();
        let (q, cls) = p.quotient_by_equiv();
        assert_eq!(q.len(), 3);
        assert!(q.is_partial_order());
        assert_eq!(cls[0], cls[1]);
        let cyc = Preorder::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(cyc.quotient_by_equiv().0.len(), 1);
    }

    #[test]
    fn localization_examples() {
        let p = Preorder::from_pairs(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(is_localization(&p, &p));
        let total = Preorder::from_fn(3, |_, _| true).unwrap();
        assert!(is_localization(&p, &total));
        let p2 = Preorder::discrete(2);
        let bad2 = Preorder::from_pairs(2, &[(0, 1)]).unwrap();
        assert!(!is_localization(&p2, &bad2));
    }

    #[test]
    fn chain_collapse_is_contraction() {
        let src = Preorder::chain(3);
        let tgt = Preorder::chain(2);
        let f = vec![0, 1, 1];
        assert!(is_contraction(&src, &tgt, &f));
        assert_eq!(hooking(&src, &tgt, &f).unwrap(), vec![0, 1]);
        assert_eq!(hooking(&src, &src, &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn antichain_onto_point_is_not_contraction() {
        let src = Preorder::discrete(2);
        let tgt = Preorder::discrete(1);
        assert!(!is_contraction(&src, &tgt, &[0, 0]));
        assert!(matches!(
            hooking(&src, &tgt, &[0, 0]),
            Err(Error::NotContraction(_))
        ));
    }

    #[test]
    fn single_index_gluing_is_valid() {
        let g = GluingSystem {
            index: Preorder::discrete(1),
            posets: vec![Preorder::chain(2)],
            localizations: BTreeMap::new(),
            contractions: BTreeMap::new(),
        };
        assert!(g.validate().valid);
    }
}
