//! Finite preorders viewed as Alexandrov spaces.
//!
//! The open sets of a preorder are its downsets. Subsets of a carrier are
//! fixed-width bit vectors ([`Subset`]), bit `i` standing for element `i`, so
//! every algebra built on top of a preorder shares one representation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hierarchy::Hierarchy;
use crate::hsets::{Id, Universe};
use crate::{Error, Result};

/// A subset of a carrier with at most [`MAX_CARRIER`] elements.
pub type Subset = u64;

pub const MAX_CARRIER: usize = 64;

/// Largest carrier for which [`FinitePreorder::all_downsets`] will run.
pub const DOWNSET_CAP: usize = 20;

/// Largest carrier accepted by [`poset_iso`].
pub const ISO_CAP: usize = 16;

/// Iterate over the members of a subset in increasing order.
pub fn members(s: Subset) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub fn singleton(i: usize) -> Subset {
    1 << i
}

pub fn contains(s: Subset, i: usize) -> bool {
    s >> i & 1 == 1
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// Mask of the first `n` elements.
pub fn full(n: usize) -> Subset {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A finite reflexive and transitive relation.
///
/// `down[b]` holds every `a` with `a ≤ b`; `up[a]` every `b` with `a ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePreorder {
    size: usize,
    down: Vec<Subset>,
    up: Vec<Subset>,
}

impl FinitePreorder {
    /// Build from a `≤` predicate, checking reflexivity and transitivity.
    pub fn from_fn(size: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        if size > MAX_CARRIER {
            return Err(Error::SizeCap { size, cap: MAX_CARRIER });
        }
        let down = (0..size)
            .map(|b| (0..size).filter(|&a| leq(a, b)).fold(0, |acc, a| acc | singleton(a)))
            .collect();
        Self::from_down_sets(down)
    }

    /// Build from principal downsets, checking the preorder axioms.
    pub fn from_down_sets(down: Vec<Subset>) -> Result<Self> {
        let size = down.len();
        if size > MAX_CARRIER {
            return Err(Error::SizeCap { size, cap: MAX_CARRIER });
        }
        for (b, &d) in down.iter().enumerate() {
            if !is_subset(d, full(size)) {
                return Err(Error::NotPreorder(format!("row {b} mentions elements outside the carrier")));
            }
            if !contains(d, b) {
                return Err(Error::NotPreorder(format!("{b} ≤ {b} fails")));
            }
            for a in members(d) {
                if !is_subset(down[a], d) {
                    return Err(Error::NotPreorder(format!("{a} ≤ {b} but ↓{a} ⊄ ↓{b}")));
                }
            }
        }
        let mut up = vec![0; size];
        for (b, &d) in down.iter().enumerate() {
            for a in members(d) {
                up[a] |= singleton(b);
            }
        }
        Ok(Self { size, down, up })
    }

    /// Reflexive-transitive closure of the given `a ≤ b` pairs.
    pub fn closure(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if size > MAX_CARRIER {
            return Err(Error::SizeCap { size, cap: MAX_CARRIER });
        }
        let mut down: Vec<Subset> = (0..size).map(singleton).collect();
        for &(a, b) in pairs {
            if a >= size || b >= size {
                return Err(Error::Invalid(format!("pair ({a}, {b}) outside carrier of size {size}")));
            }
            down[b] |= singleton(a);
        }
        // Warshall on bit rows.
        for k in 0..size {
            for b in 0..size {
                if contains(down[b], k) {
                    down[b] |= down[k];
                }
            }
        }
        Self::from_down_sets(down)
    }

    /// `n` pairwise incomparable elements.
    pub fn discrete(n: usize) -> Self {
        Self::from_fn(n, |a, b| a == b).expect("discrete order")
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_fn(n, |a, b| a <= b).expect("chain order")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        contains(self.down[b], a)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) && !self.leq(b, a)
    }

    /// The principal downset `↓a`.
    pub fn down(&self, a: usize) -> Subset {
        self.down[a]
    }

    /// The principal upset `↑a`.
    pub fn up(&self, a: usize) -> Subset {
        self.up[a]
    }

    pub fn carrier(&self) -> Subset {
        full(self.size)
    }

    pub fn is_poset(&self) -> bool {
        (0..self.size).all(|a| self.down[a] & self.up[a] == singleton(a))
    }

    /// Finite carriers have no infinite descending sequences through distinct
    /// elements, so well-foundedness of a finite order reduces to being a
    /// poset: a preorder with `x ≤ y ≤ x`, `x ≠ y` yields `x > y > x > …`
    /// in its non-antisymmetric reading and is reported as not well-founded.
    pub fn is_wellfounded(&self) -> bool {
        self.is_poset()
    }

    pub fn opposite(&self) -> Self {
        Self { size: self.size, down: self.up.clone(), up: self.down.clone() }
    }

    /// Pointwise product; element `(i, j)` sits at index `i * other.size() + j`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let m = other.size;
        Self::from_fn(self.size * m, |x, y| {
            self.leq(x / m, y / m) && other.leq(x % m, y % m)
        })
    }

    /// The sub-preorder on `elements`, re-indexed in the order given.
    pub fn restrict(&self, elements: &[usize]) -> Self {
        Self::from_fn(elements.len(), |a, b| self.leq(elements[a], elements[b]))
            .expect("restriction of a preorder is a preorder")
    }

    pub fn down_closure(&self, s: Subset) -> Subset {
        members(s).fold(0, |acc, i| acc | self.down[i])
    }

    pub fn up_closure(&self, s: Subset) -> Subset {
        members(s).fold(0, |acc, i| acc | self.up[i])
    }

    pub fn is_downset(&self, s: Subset) -> bool {
        self.down_closure(s) == s
    }

    pub fn is_upset(&self, s: Subset) -> bool {
        self.up_closure(s) == s
    }

    /// Every downset (open set) exactly once, in increasing bit order.
    pub fn all_downsets(&self) -> Result<Vec<Subset>> {
        if self.size > DOWNSET_CAP {
            return Err(Error::SizeCap { size: self.size, cap: DOWNSET_CAP });
        }
        // Equivalent elements share their principal downset and must be
        // taken together, so the search runs over equivalence classes in a
        // linear extension order.
        let mut classes: Vec<(Subset, Subset)> = Vec::new();
        for a in self.linear_extension() {
            let d = self.down[a];
            match classes.iter_mut().find(|(cd, _)| *cd == d) {
                Some((_, members)) => *members |= singleton(a),
                None => classes.push((d, singleton(a))),
            }
        }
        let mut out = Vec::new();
        fn walk(classes: &[(Subset, Subset)], k: usize, current: Subset, out: &mut Vec<Subset>) {
            if k == classes.len() {
                out.push(current);
                return;
            }
            walk(classes, k + 1, current, out);
            let (d, m) = classes[k];
            if is_subset(d & !m, current) {
                walk(classes, k + 1, current | m, out);
            }
        }
        walk(&classes, 0, 0, &mut out);
        out.sort_unstable();
        Ok(out)
    }

    /// Elements sorted so that strictly smaller elements come first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&a| (self.down[a].count_ones(), a));
        order
    }

    /// Covering pairs `(a, b)` of the strict order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.size {
            for a in 0..self.size {
                if self.lt(a, b) && !(0..self.size).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_json(&self) -> PreorderJson {
        let mut relation = String::with_capacity(self.size * self.size);
        for a in 0..self.size {
            for b in 0..self.size {
                relation.push(if self.leq(a, b) { '1' } else { '0' });
            }
        }
        PreorderJson { size: self.size, relation }
    }

    pub fn from_json(json: &PreorderJson) -> Result<Self> {
        let n = json.size;
        let bits: Vec<char> = json.relation.chars().collect();
        if bits.len() != n * n || bits.iter().any(|&c| c != '0' && c != '1') {
            return Err(Error::Invalid(format!(
                "relation must be {} characters of 0/1, got {:?}",
                n * n,
                json.relation
            )));
        }
        Self::from_fn(n, |a, b| bits[a * n + b] == '1')
    }

    /// Hasse diagram in DOT; edges point from lower to upper covers.
    pub fn to_dot(&self, labels: Option<&[String]>) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for a in 0..self.size {
            let label = labels.map_or_else(|| a.to_string(), |l| l[a].clone());
            let _ = writeln!(out, "  n{a} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for (a, b) in self.covers() {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }

    /// Relation bits under the relabelling `perm` (new index ↦ old index).
    fn code_under(&self, perm: &[usize]) -> u64 {
        let n = self.size;
        let mut code = 0u64;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq(perm[i], perm[j]) {
                    code |= 1 << (i * n + j);
                }
            }
        }
        code
    }

    /// The least relation code over all relabellings, with a witness
    /// relabelling. Only used for carriers of at most 8 elements.
    fn canonical(&self) -> (u64, Vec<usize>) {
        assert!(self.size <= 8, "canonical codes are limited to 8 elements");
        (0..self.size)
            .permutations(self.size)
            .map(|perm| (self.code_under(&perm), perm))
            .min()
            .unwrap_or((0, Vec::new()))
    }

    fn canonical_form(&self) -> (u64, Self) {
        let (code, perm) = self.canonical();
        (code, self.restrict(&perm))
    }
}

/// JSON form: `relation` is the row-major `size × size` matrix of `a ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreorderJson {
    pub size: usize,
    pub relation: String,
}

/// The Sierpiński space `0 < 1`.
pub fn sierpinski() -> FinitePreorder {
    FinitePreorder::chain(2)
}

/// An order isomorphism `P → Q` (as a table over `P`), the lexicographically
/// least one when several exist.
pub fn poset_iso(p: &FinitePreorder, q: &FinitePreorder) -> Result<Option<Vec<usize>>> {
    if p.size > ISO_CAP {
        return Err(Error::SizeCap { size: p.size, cap: ISO_CAP });
    }
    if p.size != q.size {
        return Ok(None);
    }
    let sig = |o: &FinitePreorder, a: usize| (o.down[a].count_ones(), o.up[a].count_ones());
    let mut ps: Vec<_> = (0..p.size).map(|a| sig(p, a)).collect();
    let mut qs: Vec<_> = (0..q.size).map(|a| sig(q, a)).collect();
    let (p_sig, q_sig) = (ps.clone(), qs.clone());
    ps.sort_unstable();
    qs.sort_unstable();
    if ps != qs {
        return Ok(None);
    }

    fn extend(
        p: &FinitePreorder,
        q: &FinitePreorder,
        p_sig: &[(u32, u32)],
        q_sig: &[(u32, u32)],
        table: &mut Vec<usize>,
        used: Subset,
    ) -> bool {
        let x = table.len();
        if x == p.size {
            return true;
        }
        for v in 0..q.size {
            if contains(used, v) || p_sig[x] != q_sig[v] {
                continue;
            }
            let consistent = table.iter().enumerate().all(|(a, &fa)| {
                p.leq(a, x) == q.leq(fa, v) && p.leq(x, a) == q.leq(v, fa)
            });
            if consistent {
                table.push(v);
                if extend(p, q, p_sig, q_sig, table, used | singleton(v)) {
                    return true;
                }
                table.pop();
            }
        }
        false
    }

    let mut table = Vec::with_capacity(p.size);
    Ok(extend(p, q, &p_sig, &q_sig, &mut table, 0).then_some(table))
}

/// Largest carrier for exhaustive poset enumeration.
pub const POSET_ENUM_CAP: usize = 5;

/// Largest carrier for exhaustive preorder enumeration.
pub const PREORDER_ENUM_CAP: usize = 4;

/// One representative per isomorphism class of `n`-element posets.
///
/// Every finite poset has a natural labelling (`a < b ⇒ a < b` as indices),
/// so the search runs over transitive strict upper-triangular relations and
/// keeps the canonical form of each.
pub fn enumerate_posets(n: usize) -> Result<Vec<FinitePreorder>> {
    if n > POSET_ENUM_CAP {
        return Err(Error::SizeCap { size: n, cap: POSET_ENUM_CAP });
    }
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut classes = BTreeMap::new();
    for mask in 0u64..(1 << pairs.len()) {
        let chosen: Vec<(usize, usize)> =
            members(mask).map(|k| pairs[k]).collect();
        let p = FinitePreorder::closure(n, &chosen).expect("small carrier");
        // Skip relations that are not already transitive; their closure is
        // reached from another mask.
        let strict_count = (0..n).map(|b| p.down[b].count_ones() - 1).sum::<u32>();
        if strict_count as usize != chosen.len() {
            continue;
        }
        let (code, canon) = p.canonical_form();
        classes.entry(code).or_insert(canon);
    }
    Ok(classes.into_values().collect())
}

/// Every preorder on the labelled carrier `{0, …, n-1}`.
pub fn labeled_preorders(n: usize) -> Result<Vec<FinitePreorder>> {
    if n > PREORDER_ENUM_CAP {
        return Err(Error::SizeCap { size: n, cap: PREORDER_ENUM_CAP });
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).cartesian_product(0..n).filter(|(a, b)| a != b).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let leq = |a: usize, b: usize| {
            a == b || pairs.iter().position(|&pr| pr == (a, b)).is_some_and(|k| contains(mask, k))
        };
        if let Ok(p) = FinitePreorder::from_fn(n, leq) {
            out.push(p);
        }
    }
    Ok(out)
}

/// One representative per isomorphism class of `n`-element preorders.
pub fn enumerate_preorders(n: usize) -> Result<Vec<FinitePreorder>> {
    let mut classes = BTreeMap::new();
    for p in labeled_preorders(n)? {
        let (code, canon) = p.canonical_form();
        classes.entry(code).or_insert(canon);
    }
    Ok(classes.into_values().collect())
}

/// A random poset: a random DAG on a natural labelling, closed, then
/// shuffled.
pub fn random_poset(n: usize, edge_prob: f64, rng: &mut impl Rng) -> FinitePreorder {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(edge_prob) {
                pairs.push((a, b));
            }
        }
    }
    let p = FinitePreorder::closure(n, &pairs).expect("random poset within cap");
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    p.restrict(&perm)
}

/// A random preorder: a random relation, reflexive-transitively closed.
pub fn random_preorder(n: usize, edge_prob: f64, rng: &mut impl Rng) -> FinitePreorder {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(edge_prob) {
                pairs.push((a, b));
            }
        }
    }
    FinitePreorder::closure(n, &pairs).expect("random preorder within cap")
}

/// A hierarchy stage as a concrete poset; element `i` is `ids[i]`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub ids: Vec<Id>,
    pub poset: FinitePreorder,
}

impl Stage {
    pub fn index_of(&self, id: Id) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }
}

/// Carrier `levels[alpha]`, ordered by the restriction of `≤` from `u`.
pub fn materialize(h: &Hierarchy, alpha: usize, u: &Universe) -> Result<Stage> {
    let ids = h
        .level(alpha)
        .ok_or_else(|| Error::Invalid(format!("stage {alpha} has not been built")))?
        .to_vec();
    let poset = FinitePreorder::from_fn(ids.len(), |a, b| u.le(ids[a], ids[b]))?;
    Ok(Stage { ids, poset })
}
