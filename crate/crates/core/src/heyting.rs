//! Finite Heyting algebras of downsets.
//!
//! `O(P)` is the lattice of downsets of a finite preorder under union and
//! intersection. An open map `f: P → Q` induces the complete Heyting
//! morphism `f⁻¹[-]: O(Q) → O(P)`, and for a poset the join-irreducible
//! elements of `O(P)` are the principal downsets, which recovers `P`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{self, is_monotone, PointMap};
use crate::order::{contains, is_subset, members, poset_iso, FinitePreorder, PreorderJson, Subset};
use crate::{Error, Result};

/// Cap on algebra size for the family-wise join/meet check.
pub const FAMILY_CHECK_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct DownsetAlgebra {
    base: FinitePreorder,
    elements: Vec<Subset>,
    index: HashMap<Subset, usize>,
}

impl DownsetAlgebra {
    pub fn new(base: FinitePreorder) -> Result<Self> {
        let elements = base.all_downsets()?;
        let index = elements.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self { base, elements, index })
    }

    /// Represent a finite distributive lattice, given as a poset, by the
    /// downsets of its join-irreducibles. Returns the algebra and, for each
    /// lattice element, the index of its image.
    pub fn from_lattice(lattice: &FinitePreorder) -> Result<(Self, Vec<usize>)> {
        let n = lattice.size();
        if !lattice.is_poset() {
            return Err(Error::NotPoset("lattice order".into()));
        }
        // Least upper bounds must exist; a finite poset with all binary joins
        // and a bottom is a lattice.
        let has_bottom = n > 0 && (0..n).any(|b| (0..n).all(|x| lattice.leq(b, x)));
        let joins = (0..n).all(|a| {
            (0..n).all(|b| {
                let common = lattice.up(a) & lattice.up(b);
                members(common).any(|c| is_subset(common, lattice.up(c)))
            })
        });
        if !has_bottom || !joins {
            return Err(Error::Invalid("not a lattice".into()));
        }
        let lower_covers = |x: usize| {
            (0..n)
                .filter(|&y| lattice.lt(y, x) && !(0..n).any(|z| lattice.lt(y, z) && lattice.lt(z, x)))
                .count()
        };
        let jis: Vec<usize> = (0..n).filter(|&x| lower_covers(x) == 1).collect();
        let algebra = Self::new(lattice.restrict(&jis))?;
        let code = |x: usize| {
            jis.iter()
                .enumerate()
                .filter(|(_, &j)| lattice.leq(j, x))
                .fold(0, |acc, (k, _)| acc | (1 << k))
        };
        let rep: Vec<usize> = (0..n)
            .map(|x| algebra.index_of(code(x)).expect("codes are downsets"))
            .collect();
        let bijective = rep.iter().collect::<BTreeSet<_>>().len() == n && n == algebra.len();
        let embedding = (0..n).all(|x| {
            (0..n).all(|y| lattice.leq(x, y) == is_subset(code(x), code(y)))
        });
        if !bijective || !embedding {
            return Err(Error::Invalid("lattice is not distributive".into()));
        }
        Ok((algebra, rep))
    }

    pub fn base(&self) -> &FinitePreorder {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in increasing bit order.
    pub fn elements(&self) -> &[Subset] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> Subset {
        self.elements[i]
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.index.contains_key(&s)
    }

    pub fn bottom(&self) -> Subset {
        0
    }

    pub fn top(&self) -> Subset {
        self.base.carrier()
    }

    /// `a → b = {p : ↓p ∩ a ⊆ b}`.
    pub fn implies(&self, a: Subset, b: Subset) -> Subset {
        (0..self.base.size())
            .filter(|&p| is_subset(self.base.down(p) & a, b))
            .fold(0, |acc, p| acc | (1 << p))
    }

    /// The largest downset `x` with `a ∩ x ⊆ b`, found by scanning every
    /// element; `None` if the solutions have no greatest element.
    pub fn implies_brute(&self, a: Subset, b: Subset) -> Option<Subset> {
        let solutions: Vec<Subset> =
            self.elements.iter().copied().filter(|&x| is_subset(a & x, b)).collect();
        solutions
            .iter()
            .copied()
            .find(|&m| solutions.iter().all(|&x| is_subset(x, m)))
    }

    pub fn neg(&self, a: Subset) -> Subset {
        self.implies(a, 0)
    }

    /// Elements that are not the join of the elements strictly below them,
    /// as a poset under inclusion, together with the elements themselves.
    pub fn join_irreducibles(&self) -> (FinitePreorder, Vec<Subset>) {
        let jis: Vec<Subset> = self
            .elements
            .iter()
            .copied()
            .filter(|&e| {
                let below = self
                    .elements
                    .iter()
                    .filter(|&&f| f != e && is_subset(f, e))
                    .fold(0, |acc, &f| acc | f);
                below != e
            })
            .collect();
        let poset = FinitePreorder::from_fn(jis.len(), |a, b| is_subset(jis[a], jis[b]))
            .expect("inclusion is a partial order");
        (poset, jis)
    }

    pub fn to_json(&self) -> AlgebraJson {
        let n = self.base.size();
        AlgebraJson {
            base: self.base.to_json(),
            downsets: self
                .elements
                .iter()
                .map(|&s| (0..n).map(|i| if contains(s, i) { '1' } else { '0' }).collect())
                .collect(),
        }
    }
}

/// JSON dump of an algebra: base preorder and each downset as a bit string
/// (`'1'` at position `i` iff element `i` is a member).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub base: PreorderJson,
    pub downsets: Vec<String>,
}

/// A map between algebras as a table of element indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HaMorphism {
    pub table: Vec<usize>,
}

impl HaMorphism {
    pub fn apply(&self, dom: &DownsetAlgebra, cod: &DownsetAlgebra, a: Subset) -> Subset {
        cod.element(self.table[dom.index_of(a).expect("element of the domain")])
    }
}

/// Preservation of `⊥`, `⊤`, binary joins, binary meets and `→`. For finite
/// algebras this is the same as being a complete Heyting morphism.
pub fn is_cha_morphism(dom: &DownsetAlgebra, cod: &DownsetAlgebra, table: &[usize]) -> bool {
    if table.len() != dom.len() || table.iter().any(|&t| t >= cod.len()) {
        return false;
    }
    let phi = |a: Subset| cod.element(table[dom.index_of(a).expect("domain element")]);
    if phi(dom.bottom()) != cod.bottom() || phi(dom.top()) != cod.top() {
        return false;
    }
    dom.elements().iter().all(|&a| {
        dom.elements().iter().all(|&b| {
            phi(a | b) == phi(a) | phi(b)
                && phi(a & b) == phi(a) & phi(b)
                && phi(dom.implies(a, b)) == cod.implies(phi(a), phi(b))
        })
    })
}

/// Preservation of the join and meet of every family of elements, the empty
/// family included.
pub fn preserves_all_families(dom: &DownsetAlgebra, cod: &DownsetAlgebra, table: &[usize]) -> Result<bool> {
    if dom.len() > FAMILY_CHECK_CAP {
        return Err(Error::SizeCap { size: dom.len(), cap: FAMILY_CHECK_CAP });
    }
    let phi = |a: Subset| cod.element(table[dom.index_of(a).expect("domain element")]);
    for family in 0u64..(1 << dom.len()) {
        let elems: Vec<Subset> = members(family).map(|i| dom.element(i)).collect();
        let join = elems.iter().fold(0, |acc, &e| acc | e);
        let meet = elems.iter().fold(dom.top(), |acc, &e| acc & e);
        let img_join = elems.iter().fold(0, |acc, &e| acc | phi(e));
        let img_meet = elems.iter().fold(cod.top(), |acc, &e| acc & phi(e));
        if phi(join) != img_join || phi(meet) != img_meet {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MorphismRejection {
    #[error("map is not monotone; preimage of downset {0:#b} is not a downset")]
    NotContinuous(Subset),
    #[error("preimage does not preserve {a:#b} → {b:#b}")]
    ImplicationNotPreserved { a: Subset, b: Subset },
    #[error("map is not open")]
    NotOpen,
}

/// `O(f) = f⁻¹[-]: O(Q) → O(P)` for an open map `f: P → Q`.
pub fn open_map_morphism(
    f: &PointMap,
    op: &DownsetAlgebra,
    oq: &DownsetAlgebra,
) -> std::result::Result<HaMorphism, MorphismRejection> {
    let (p, q) = (op.base(), oq.base());
    let pre = |s: Subset| f.preimage(s);
    if !is_monotone(p, q, f) {
        let bad = oq.elements().iter().copied().find(|&s| !op.contains(pre(s)));
        return Err(MorphismRejection::NotContinuous(bad.unwrap_or(0)));
    }
    let table: Vec<usize> = oq
        .elements()
        .iter()
        .map(|&s| op.index_of(pre(s)).expect("monotone preimages are downsets"))
        .collect();
    if !maps::is_open_v2(p, q, f) {
        for &a in oq.elements() {
            for &b in oq.elements() {
                if pre(oq.implies(a, b)) != op.implies(pre(a), pre(b)) {
                    return Err(MorphismRejection::ImplicationNotPreserved { a, b });
                }
            }
        }
        return Err(MorphismRejection::NotOpen);
    }
    debug_assert!(is_cha_morphism(oq, op, &table));
    Ok(HaMorphism { table })
}

/// Every complete Heyting morphism `dom → cod`.
///
/// A join-preserving map is determined by its values on join-irreducibles,
/// so candidates are generated from assignments on the join-irreducibles of
/// `dom`, extended by joins, and each is then checked against the full
/// definition.
pub fn enumerate_cha_morphisms(dom: &DownsetAlgebra, cod: &DownsetAlgebra) -> Vec<HaMorphism> {
    let (_, jis) = dom.join_irreducibles();
    let k = jis.len();
    let m = cod.len();
    let mut out = BTreeSet::new();
    let total = (m as u128).pow(k as u32);
    for code in 0..total {
        let mut rest = code;
        let values: Vec<Subset> = (0..k)
            .map(|_| {
                let v = cod.element((rest % m as u128) as usize);
                rest /= m as u128;
                v
            })
            .collect();
        let table: Option<Vec<usize>> = dom
            .elements()
            .iter()
            .map(|&a| {
                let img = jis
                    .iter()
                    .zip(&values)
                    .filter(|(&j, _)| is_subset(j, a))
                    .fold(0, |acc, (_, &v)| acc | v);
                cod.index_of(img)
            })
            .collect();
        if let Some(table) = table {
            if is_cha_morphism(dom, cod, &table) {
                out.insert(HaMorphism { table });
            }
        }
    }
    out.into_iter().collect()
}

/// `L(O(P)) ≅ P`: the join-irreducibles of `O(P)` are exactly the principal
/// downsets and, ordered by inclusion, form a copy of `P`.
pub fn verify_adjunction_unit(p: &FinitePreorder) -> Result<bool> {
    let algebra = DownsetAlgebra::new(p.clone())?;
    let (l, jis) = algebra.join_irreducibles();
    let principal: BTreeSet<Subset> = (0..p.size()).map(|x| p.down(x)).collect();
    let found: BTreeSet<Subset> = jis.iter().copied().collect();
    Ok(found == principal && poset_iso(&l, p)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullnessReport {
    pub open_maps: usize,
    pub morphisms: usize,
    /// Distinct open maps give distinct morphisms.
    pub faithful: bool,
    /// Every morphism is the preimage map of some open map.
    pub full: bool,
}

impl FullnessReport {
    pub fn passed(&self) -> bool {
        self.faithful && self.full && self.open_maps == self.morphisms
    }
}

/// Match open maps `P → Q` against complete Heyting morphisms `O(Q) → O(P)`.
pub fn fullness_check(p: &FinitePreorder, q: &FinitePreorder) -> Result<FullnessReport> {
    let op = DownsetAlgebra::new(p.clone())?;
    let oq = DownsetAlgebra::new(q.clone())?;
    let opens = maps::enumerate_open_maps(p, q, maps::DEFAULT_SEARCH_BUDGET)?.maps;
    let morphisms: BTreeSet<HaMorphism> = enumerate_cha_morphisms(&oq, &op).into_iter().collect();
    let mut images = BTreeSet::new();
    for f in &opens {
        let m = open_map_morphism(f, &op, &oq)
            .map_err(|e| Error::Hypothesis(format!("open map rejected: {e}")))?;
        images.insert(m);
    }
    Ok(FullnessReport {
        open_maps: opens.len(),
        morphisms: morphisms.len(),
        faithful: images.len() == opens.len(),
        full: images == morphisms,
    })
}
