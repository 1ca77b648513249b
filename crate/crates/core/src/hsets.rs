//! Interned hereditary sets over a finite base poset.
//!
//! A [`Universe`] is an append-only table of canonical nodes. A node is either
//! an atom (an opaque element of the base poset) or a set given by its sorted,
//! duplicate-free list of child ids, so structural equality is id equality.
//!
//! The strict order is membership in the transitive closure: `x < y` iff
//! `x ∈ x₁ ∈ … ∈ y`. Atoms have no members; between atoms the base poset's
//! strict order applies, and a set is never below an atom. With an empty base
//! the universe holds only genuine hereditary sets (von Neumann ordinals and
//! friends).

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::order::FinitePreorder;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Id(pub u32);

impl Id {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite poset of labelled atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoset {
    labels: Vec<String>,
    order: FinitePreorder,
}

impl BasePoset {
    /// Labels must be non-empty and free of whitespace; `order` must be a
    /// partial order on the labels' indices.
    pub fn new(labels: Vec<String>, order: FinitePreorder) -> Result<Self> {
        if labels.len() != order.size() {
            return Err(Error::Invalid(format!(
                "{} labels for an order on {} elements",
                labels.len(),
                order.size()
            )));
        }
        if !order.is_poset() {
            return Err(Error::NotPoset("base order is not antisymmetric".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(Error::Invalid(format!("bad atom label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::Invalid(format!("duplicate atom label {l:?}")));
            }
        }
        Ok(Self { labels, order })
    }

    pub fn empty() -> Self {
        Self { labels: Vec::new(), order: FinitePreorder::discrete(0) }
    }

    /// Pairwise incomparable atoms.
    pub fn antichain<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        Self::new(labels, FinitePreorder::discrete(n))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn order(&self) -> &FinitePreorder {
        &self.order
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.order.lt(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// Index into the base poset.
    Atom(usize),
    /// Strictly increasing child ids.
    Set(Vec<Id>),
}

/// Append-only intern table of hereditary sets.
///
/// Each node's transitive closure is computed once, when it is interned
/// (children always precede parents), and kept sorted; that cache backs
/// [`Universe::lt`]. [`Universe::lt_recursive`] recomputes the order from
/// the membership structure alone.
#[derive(Clone, Debug)]
pub struct Universe {
    base: BasePoset,
    nodes: Vec<Node>,
    table: HashMap<Node, Id>,
    closure: Vec<Vec<Id>>,
}

impl Universe {
    /// A universe whose first ids are the atoms of `base`, in label order.
    pub fn new(base: BasePoset) -> Self {
        let mut u = Self { base, nodes: Vec::new(), table: HashMap::new(), closure: Vec::new() };
        for a in 0..u.base.len() {
            let below: Vec<Id> =
                (0..u.base.len()).filter(|&b| u.base.lt(b, a)).map(|b| Id(b as u32)).collect();
            u.push(Node::Atom(a), below);
        }
        u
    }

    /// A universe of pure sets (no atoms).
    pub fn pure() -> Self {
        Self::new(BasePoset::empty())
    }

    pub fn base(&self) -> &BasePoset {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: Id) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn node(&self, id: Id) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = Id> {
        (0..self.nodes.len() as u32).map(Id)
    }

    /// The id of the atom with the given label.
    pub fn atom(&self, label: &str) -> Option<Id> {
        self.base.labels.iter().position(|l| l == label).map(|i| Id(i as u32))
    }

    pub fn is_atom(&self, id: Id) -> bool {
        matches!(self.node(id), Node::Atom(_))
    }

    /// Members of a set; empty for atoms.
    pub fn children(&self, id: Id) -> &[Id] {
        match self.node(id) {
            Node::Atom(_) => &[],
            Node::Set(ch) => ch,
        }
    }

    fn push(&mut self, node: Node, closure: Vec<Id>) -> Id {
        let id = Id(self.nodes.len() as u32);
        self.table.insert(node.clone(), id);
        self.nodes.push(node);
        self.closure.push(closure);
        id
    }

    /// Intern the set with exactly these members (order and repeats ignored).
    pub fn intern(&mut self, children: &[Id]) -> Result<Id> {
        if let Some(&bad) = children.iter().find(|c| !self.contains(**c)) {
            return Err(Error::UnknownId(bad));
        }
        let mut ch = children.to_vec();
        ch.sort_unstable();
        ch.dedup();
        let node = Node::Set(ch);
        if let Some(&id) = self.table.get(&node) {
            return Ok(id);
        }
        let Node::Set(ch) = &node else { unreachable!() };
        let mut tc: Vec<Id> = ch.clone();
        for &c in ch {
            tc.extend_from_slice(&self.closure[c.index()]);
        }
        tc.sort_unstable();
        tc.dedup();
        Ok(self.push(node, tc))
    }

    /// Look up an already interned set without adding it.
    pub fn find(&self, children: &[Id]) -> Option<Id> {
        let mut ch = children.to_vec();
        ch.sort_unstable();
        ch.dedup();
        self.table.get(&Node::Set(ch)).copied()
    }

    pub fn empty_set(&mut self) -> Id {
        self.intern(&[]).expect("no children")
    }

    /// The von Neumann ordinal `k = {0, …, k-1}`.
    pub fn ordinal(&mut self, k: usize) -> Id {
        let mut members = Vec::with_capacity(k);
        for _ in 0..=k {
            let next = self.intern(&members).expect("members are interned");
            members.push(next);
        }
        members[k]
    }

    /// The transitive closure, sorted by id. For an atom this is the set of
    /// strictly smaller atoms.
    pub fn transitive_closure(&self, id: Id) -> &[Id] {
        &self.closure[id.index()]
    }

    /// `x < y`: `x` lies in the transitive closure of `y`.
    pub fn lt(&self, x: Id, y: Id) -> bool {
        self.closure[y.index()].binary_search(&x).is_ok()
    }

    pub fn le(&self, x: Id, y: Id) -> bool {
        x == y || self.lt(x, y)
    }

    /// The same order computed from scratch: for a set `y`, `x < y` iff
    /// `x ≤ z` for some member `z`; between atoms the base order decides; a
    /// set is never below an atom.
    pub fn lt_recursive(&self, x: Id, y: Id) -> bool {
        match (self.node(x), self.node(y)) {
            (Node::Atom(a), Node::Atom(b)) => self.base.lt(*a, *b),
            (Node::Set(_), Node::Atom(_)) => false,
            (_, Node::Set(ch)) => ch.iter().any(|&z| z == x || self.lt_recursive(x, z)),
        }
    }

    pub fn is_antichain(&self, s: &[Id]) -> bool {
        s.iter().all(|&a| s.iter().all(|&b| !self.lt(a, b)))
    }

    /// An antichain with at least two distinct elements.
    pub fn is_nontrivial_antichain(&self, s: &[Id]) -> bool {
        let mut d = s.to_vec();
        d.sort_unstable();
        d.dedup();
        d.len() >= 2 && self.is_antichain(&d)
    }

    pub fn is_chain(&self, s: &[Id]) -> bool {
        s.iter().all(|&a| s.iter().all(|&b| self.le(a, b) || self.le(b, a)))
    }

    /// `M` together with the transitive closures of its elements, sorted.
    pub fn default_scope(&self, m: &[Id]) -> Vec<Id> {
        let mut scope = m.to_vec();
        for &x in m {
            scope.extend_from_slice(self.transitive_closure(x));
        }
        scope.sort_unstable();
        scope.dedup();
        scope
    }

    /// Convexity of `m` relative to a finite scope: no `q ∈ scope \ m` lies
    /// between two elements of `m`. Convexity inside the whole universe of
    /// sets is not decidable from finite data, so callers pick the scope;
    /// [`Universe::default_scope`] is the usual choice.
    pub fn is_convex(&self, m: &[Id], scope: &[Id]) -> Result<bool> {
        if let Some(&x) = m.iter().find(|x| !scope.contains(x)) {
            return Err(Error::Hypothesis(format!("element {x} of M is outside the scope")));
        }
        Ok(scope.iter().filter(|q| !m.contains(q)).all(|&q| {
            !(m.iter().any(|&p| self.le(p, q)) && m.iter().any(|&r| self.le(q, r)))
        }))
    }

    /// `M ∩ ↓m` is a chain for every `m ∈ M`.
    pub fn chain_hypothesis(&self, m: &[Id]) -> bool {
        m.iter().all(|&top| {
            let below: Vec<Id> = m.iter().copied().filter(|&x| self.le(x, top)).collect();
            self.is_chain(&below)
        })
    }

    /// Human-readable rendering: atoms by label, sets in braces.
    pub fn render(&self, id: Id) -> String {
        match self.node(id) {
            Node::Atom(a) => self.base.labels[*a].clone(),
            Node::Set(ch) => {
                let mut inner: Vec<String> = ch.iter().map(|&c| self.render(c)).collect();
                inner.sort();
                format!("{{{}}}", inner.join(","))
            }
        }
    }

    /// Line-oriented dump, one element per line in id order:
    ///
    /// ```text
    /// 0 := atom m0
    /// 1 := atom m1 > 0
    /// 2 := { 0, 1 }
    /// 3 := { }
    /// ```
    ///
    /// An atom line lists, after `>`, every atom strictly below it.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Atom(a) => {
                    let _ = write!(out, "{i} := atom {}", self.base.labels[*a]);
                    let below = &self.closure[i];
                    if !below.is_empty() {
                        let list: Vec<String> = below.iter().map(Id::to_string).collect();
                        let _ = write!(out, " > {}", list.join(", "));
                    }
                    out.push('\n');
                }
                Node::Set(ch) if ch.is_empty() => {
                    let _ = writeln!(out, "{i} := {{ }}");
                }
                Node::Set(ch) => {
                    let list: Vec<String> = ch.iter().map(Id::to_string).collect();
                    let _ = writeln!(out, "{i} := {{ {} }}", list.join(", "));
                }
            }
        }
        out
    }

    /// Inverse of [`Universe::dump`]. Ids must be `0, 1, 2, …` with all atoms
    /// first; set lines must already be canonical so that dumping the result
    /// reproduces the input byte for byte.
    pub fn load(text: &str) -> Result<Self> {
        enum Line {
            Atom(String, Vec<usize>),
            Set(Vec<Id>),
        }
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut parsed = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let (id, rest) = raw.split_once(" := ").ok_or_else(|| perr(line_no, "missing ' := '"))?;
            let id: usize = id.parse().map_err(|_| perr(line_no, "bad id"))?;
            if id != parsed.len() {
                return Err(perr(line_no, "ids must be 0, 1, 2, … in order"));
            }
            if let Some(atom) = rest.strip_prefix("atom ") {
                let (label, below) = match atom.split_once(" > ") {
                    Some((l, b)) => {
                        let ids = b
                            .split(", ")
                            .map(|t| t.parse::<usize>().map_err(|_| perr(line_no, "bad atom id")))
                            .collect::<Result<Vec<_>>>()?;
                        (l, ids)
                    }
                    None => (atom, Vec::new()),
                };
                parsed.push(Line::Atom(label.to_string(), below));
            } else if rest == "{ }" {
                parsed.push(Line::Set(Vec::new()));
            } else {
                let inner = rest
                    .strip_prefix("{ ")
                    .and_then(|r| r.strip_suffix(" }"))
                    .ok_or_else(|| perr(line_no, "expected 'atom <label>' or '{ … }'"))?;
                let ch = inner
                    .split(", ")
                    .map(|t| t.parse::<u32>().map(Id).map_err(|_| perr(line_no, "bad child id")))
                    .collect::<Result<Vec<_>>>()?;
                if ch.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(perr(line_no, "children must be strictly increasing"));
                }
                if ch.iter().any(|c| c.index() >= id) {
                    return Err(perr(line_no, "children must precede their parent"));
                }
                parsed.push(Line::Set(ch));
            }
        }

        let n_atoms = parsed.iter().take_while(|l| matches!(l, Line::Atom(..))).count();
        if parsed[n_atoms..].iter().any(|l| matches!(l, Line::Atom(..))) {
            return Err(perr(n_atoms + 1, "atoms must precede all sets"));
        }
        let mut labels = Vec::with_capacity(n_atoms);
        let mut pairs = Vec::new();
        for (a, line) in parsed[..n_atoms].iter().enumerate() {
            let Line::Atom(label, below) = line else { unreachable!() };
            labels.push(label.clone());
            for &b in below {
                if b >= n_atoms {
                    return Err(perr(a + 1, "atom order refers to a non-atom"));
                }
                pairs.push((b, a));
            }
        }
        let order = FinitePreorder::closure(n_atoms, &pairs)?;
        let base = BasePoset::new(labels, order)?;
        let mut u = Universe::new(base);
        for (ln, line) in parsed.iter().enumerate().skip(n_atoms) {
            let Line::Set(ch) = line else { unreachable!() };
            let id = u.intern(ch)?;
            if id.index() != ln {
                return Err(perr(ln + 1, "duplicate element"));
            }
        }
        // The atom lines must list the full strict order, not a generating
        // subset, for the dump to reproduce them.
        let again = u.dump();
        if let Some((k, _)) = again.lines().zip(text.lines()).enumerate().find(|(_, (a, b))| a != b) {
            return Err(perr(k + 1, "line is not in canonical form"));
        }
        Ok(u)
    }
}

/// The four base elements `m₀ = {{0}}`, `mᵢ = {m₀, i}` (`i = 1, 2, 3`) built
/// from von Neumann ordinals in a pure universe.
pub fn concrete_product_base(u: &mut Universe) -> [Id; 4] {
    let zero = u.ordinal(0);
    let singleton_zero = u.intern(&[zero]).expect("interned");
    let m0 = u.intern(&[singleton_zero]).expect("interned");
    let mut out = [m0; 4];
    for (i, slot) in out.iter_mut().enumerate().skip(1) {
        let ord = u.ordinal(i);
        *slot = u.intern(&[m0, ord]).expect("interned");
    }
    out
}

/// The same base as opaque atoms `m0 < m1, m2, m3`.
pub fn abstract_product_base() -> (Universe, [Id; 4]) {
    let order = FinitePreorder::closure(4, &[(0, 1), (0, 2), (0, 3)]).expect("small order");
    let base = BasePoset::new(["m0", "m1", "m2", "m3"].map(String::from).to_vec(), order)
        .expect("valid base");
    let u = Universe::new(base);
    (u, [Id(0), Id(1), Id(2), Id(3)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_extensional() {
        let mut u = Universe::pure();
        let e = u.empty_set();
        assert_eq!(u.empty_set(), e);
        let one = u.intern(&[e]).unwrap();
        let two = u.intern(&[e, one]).unwrap();
        assert_eq!(u.intern(&[one, e, one]).unwrap(), two);
        assert_eq!(u.ordinal(2), two);
        assert!(matches!(u.intern(&[Id(99)]), Err(Error::UnknownId(Id(99)))));
    }

    #[test]
    fn construction_order_does_not_matter() {
        let mut a = Universe::pure();
        let mut b = Universe::pure();
        let ba = concrete_product_base(&mut a);
        // Build the ordinals in reverse order of use first.
        b.ordinal(3);
        let bb = concrete_product_base(&mut b);
        for i in 0..4 {
            assert_eq!(a.render(ba[i]), b.render(bb[i]));
        }
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.lt(ba[i], ba[j]), b.lt(bb[i], bb[j]));
            }
        }
    }

    #[test]
    fn concrete_base_order_facts() {
        let mut u = Universe::pure();
        let m = concrete_product_base(&mut u);
        assert_ne!(m[1], m[2]);
        for i in 1..4 {
            assert!(u.lt(m[0], m[i]));
        }
        assert!(!u.lt(m[1], m[2]) && !u.lt(m[2], m[1]));
        assert!(u.is_antichain(&m[1..]));
        assert!(!u.is_antichain(&[m[0], m[1]]));
        assert!(u.is_chain(&[m[0], m[1]]));
        assert!(!u.is_chain(&[m[1], m[2]]));
        let scope = u.default_scope(&m);
        assert!(u.is_convex(&m, &scope).unwrap());
        assert!(u.chain_hypothesis(&m));

        let zero = u.ordinal(0);
        let three = u.ordinal(3);
        assert!(u.lt(zero, three));
        assert!(!u.lt(m[0], m[0]));
    }

    #[test]
    fn transitive_closure_examples() {
        let mut u = Universe::pure();
        let e = u.empty_set();
        assert!(u.transitive_closure(e).is_empty());
        let m = concrete_product_base(&mut u);
        let one = u.ordinal(1);
        // m0 = {{0}} = {1}: closure {1, 0}.
        assert_eq!(u.transitive_closure(m[0]), &[e, one]);
        assert!(u.transitive_closure(m[1]).contains(&m[0]));
        assert!(!u.transitive_closure(m[1]).contains(&m[2]));
    }

    #[test]
    fn convexity_and_chain_hypothesis() {
        let mut u = Universe::pure();
        let ords: Vec<Id> = (0..3).map(|k| u.ordinal(k)).collect();
        assert!(!u.is_convex(&[ords[0], ords[2]], &ords).unwrap());
        assert!(u.is_convex(&[ords[1]], &ords).unwrap());
        assert!(u.is_convex(&[ords[0], ords[1]], &[ords[0]]).is_err());

        let m = concrete_product_base(&mut u);
        let d12 = u.intern(&[m[1], m[2]]).unwrap();
        let mut bigger = m.to_vec();
        bigger.push(d12);
        assert!(!u.chain_hypothesis(&bigger));
        assert!(u.chain_hypothesis(&m[1..]));
    }

    #[test]
    fn atoms_order_and_sets() {
        let (mut u, m) = abstract_product_base();
        assert!(u.lt(m[0], m[1]));
        assert!(!u.lt(m[1], m[2]));
        let d = u.intern(&[m[1], m[2]]).unwrap();
        assert!(u.lt(m[0], d));
        assert!(!u.lt(d, m[3]));
        assert!(u.lt_recursive(m[0], d));
        assert_eq!(u.transitive_closure(m[1]), &[m[0]]);
    }

    #[test]
    fn trivial_antichains() {
        let (u, m) = abstract_product_base();
        assert!(u.is_antichain(&[]));
        assert!(!u.is_nontrivial_antichain(&[]));
        assert!(u.is_antichain(&[m[2]]));
        assert!(!u.is_nontrivial_antichain(&[m[2], m[2]]));
        assert!(u.is_nontrivial_antichain(&[m[2], m[3]]));
        assert!(u.is_chain(&[]));
    }

    #[test]
    fn dump_round_trip() {
        let (mut u, m) = abstract_product_base();
        let e = u.empty_set();
        let d = u.intern(&[m[1], m[2]]).unwrap();
        u.intern(&[d, m[3], e]).unwrap();
        let text = u.dump();
        assert!(text.starts_with("0 := atom m0\n1 := atom m1 > 0\n"));
        assert!(text.contains("4 := { }\n"));
        let back = Universe::load(&text).unwrap();
        assert_eq!(back.dump(), text);
    }

    #[test]
    fn load_rejects_non_canonical_input() {
        assert!(Universe::load("0 := { }\n1 := { }\n").is_err());
        assert!(Universe::load("0 := { }\n2 := { 0 }\n").is_err());
        assert!(Universe::load("0 := { }\n1 := { 0 }\n2 := { 1, 0 }\n").is_err());
        assert!(Universe::load("0 := { 1 }\n").is_err());
        // An atom line that lists only a generating subset of the order.
        let partial = "0 := atom a\n1 := atom b > 0\n2 := atom c > 1\n";
        assert!(Universe::load(partial).is_err());
    }
}
