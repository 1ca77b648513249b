//! Kripke frames, p-morphisms and complex algebras.
//!
//! A frame is a finite set with an arbitrary relation `R`. A p-morphism
//! `f: (X, R) → (Y, S)` satisfies `f[R[x]] = S[f(x)]`. A preorder `P` sits
//! inside frames as `P^op` (`x R y` iff `y ≤ x`), which turns open maps into
//! p-morphisms. The complex algebra `℘(F)` is the powerset with
//! `◇U = R⁻¹[U]`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::maps::{all_functions, is_open_v2, PointMap};
use crate::order::{contains, full, is_subset, members, singleton, FinitePreorder, Subset, MAX_CARRIER};
use crate::{Error, Result};

/// Largest frame for which [`all_frames`] enumerates every relation.
pub const FRAME_ENUM_CAP: usize = 4;

/// Largest carrier for exhaustive upset and element scans.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KripkeFrame {
    size: usize,
    succ: Vec<Subset>,
}

impl KripkeFrame {
    /// `succ[x] = R[x]`.
    pub fn new(succ: Vec<Subset>) -> Result<Self> {
        let size = succ.len();
        if size > MAX_CARRIER {
            return Err(Error::SizeCap { size, cap: MAX_CARRIER });
        }
        if succ.iter().any(|&s| !is_subset(s, full(size))) {
            return Err(Error::Invalid("successor set outside the carrier".into()));
        }
        Ok(Self { size, succ })
    }

    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= size || *b >= size) {
            return Err(Error::Invalid(format!("pair ({a}, {b}) outside carrier of size {size}")));
        }
        let mut succ = vec![0; size];
        for &(a, b) in pairs {
            succ[a] |= singleton(b);
        }
        Self::new(succ)
    }

    /// Frame with relation bit `x * n + y` of `code` meaning `x R y`.
    pub fn from_code(n: usize, code: u64) -> Self {
        let succ = (0..n).map(|x| (code >> (x * n)) & full(n)).collect();
        Self { size: n, succ }
    }

    /// The frame of `P^op`: `x R y` iff `y ≤ x`, so `R[x] = ↓x`.
    pub fn of_opposite(p: &FinitePreorder) -> Self {
        Self { size: p.size(), succ: (0..p.size()).map(|x| p.down(x)).collect() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        contains(self.succ[x], y)
    }

    pub fn successors(&self, x: usize) -> Subset {
        self.succ[x]
    }

    /// `R⁻¹(y) = {x : x R y}`.
    pub fn predecessors(&self, y: usize) -> Subset {
        (0..self.size).filter(|&x| self.related(x, y)).fold(0, |acc, x| acc | singleton(x))
    }

    /// `R⁻¹[U]`.
    pub fn pre_image(&self, u: Subset) -> Subset {
        (0..self.size).filter(|&x| self.succ[x] & u != 0).fold(0, |acc, x| acc | singleton(x))
    }

    pub fn is_reflexive_on(&self, u: Subset) -> bool {
        members(u).all(|x| self.related(x, x))
    }

    pub fn is_transitive_on(&self, u: Subset) -> bool {
        members(u).all(|x| {
            let r = self.succ[x] & u;
            members(r).all(|y| is_subset(self.succ[y] & u, r))
        })
    }

    pub fn is_preorder(&self) -> bool {
        let all = full(self.size);
        self.is_reflexive_on(all) && self.is_transitive_on(all)
    }

    /// `U` is closed under `R`-successors.
    pub fn is_r_upset(&self, u: Subset) -> bool {
        members(u).all(|x| is_subset(self.succ[x], u))
    }

    /// States reachable from `x` in zero or more steps.
    pub fn reach(&self, x: usize) -> Subset {
        let mut seen = singleton(x);
        let mut frontier = seen;
        while frontier != 0 {
            let next = members(frontier).fold(0, |acc, y| acc | self.succ[y]) & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    pub fn to_json(&self) -> FrameJson {
        let mut relation = String::with_capacity(self.size * self.size);
        for x in 0..self.size {
            for y in 0..self.size {
                relation.push(if self.related(x, y) { '1' } else { '0' });
            }
        }
        FrameJson { size: self.size, relation }
    }

    pub fn from_json(json: &FrameJson) -> Result<Self> {
        let n = json.size;
        let bits: Vec<char> = json.relation.chars().collect();
        if bits.len() != n * n || bits.iter().any(|&c| c != '0' && c != '1') {
            return Err(Error::Invalid(format!("relation must be {} characters of 0/1", n * n)));
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| bits[x * n + y] == '1')
            .collect();
        Self::from_pairs(n, &pairs)
    }

    /// Directed graph in DOT, one edge per related pair.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph frame {\n");
        for x in 0..self.size {
            let _ = writeln!(out, "  s{x} [label=\"{x}\"];");
        }
        for x in 0..self.size {
            for y in members(self.succ[x]) {
                let _ = writeln!(out, "  s{x} -> s{y};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// JSON form: row-major relation bits, `'1'` at `x * size + y` iff `x R y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameJson {
    pub size: usize,
    pub relation: String,
}

/// Every frame on `n` labelled states.
pub fn all_frames(n: usize) -> Result<impl Iterator<Item = KripkeFrame>> {
    if n > FRAME_ENUM_CAP {
        return Err(Error::SizeCap { size: n, cap: FRAME_ENUM_CAP });
    }
    Ok((0u64..1 << (n * n)).map(move |code| KripkeFrame::from_code(n, code)))
}

pub fn random_frame(n: usize, edge_prob: f64, rng: &mut impl Rng) -> KripkeFrame {
    let succ = (0..n)
        .map(|_| (0..n).filter(|_| rng.gen_bool(edge_prob)).fold(0, |acc, y| acc | singleton(y)))
        .collect();
    KripkeFrame::new(succ).expect("within cap")
}

/// `f[R[x]] = S[f(x)]` for every `x`.
pub fn is_pmorphism(f: &PointMap, from: &KripkeFrame, to: &KripkeFrame) -> bool {
    (0..from.size).all(|x| f.image(from.successors(x)) == to.successors(f.apply(x)))
}

/// `f⁻¹[S⁻¹(y)] = R⁻¹[f⁻¹(y)]` for every `y`.
pub fn is_pmorphism_preimage(f: &PointMap, from: &KripkeFrame, to: &KripkeFrame) -> bool {
    (0..to.size).all(|y| f.preimage(to.predecessors(y)) == from.pre_image(f.preimage(singleton(y))))
}

/// Every p-morphism `from → to`, by scanning all functions.
pub fn enumerate_pmorphisms(from: &KripkeFrame, to: &KripkeFrame) -> Vec<PointMap> {
    all_functions(from.size, to.size).filter(|f| is_pmorphism(f, from, to)).collect()
}

/// A frame isomorphism, the lexicographically least one.
pub fn frame_iso(a: &KripkeFrame, b: &KripkeFrame) -> Option<Vec<usize>> {
    if a.size != b.size {
        return None;
    }
    fn extend(a: &KripkeFrame, b: &KripkeFrame, table: &mut Vec<usize>, used: Subset) -> bool {
        let x = table.len();
        if x == a.size {
            return true;
        }
        for v in 0..b.size {
            if contains(used, v)
                || a.related(x, x) != b.related(v, v)
                || a.succ[x].count_ones() != b.succ[v].count_ones()
            {
                continue;
            }
            let ok = table
                .iter()
                .enumerate()
                .all(|(y, &fy)| a.related(x, y) == b.related(v, fy) && a.related(y, x) == b.related(fy, v));
            if ok {
                table.push(v);
                if extend(a, b, table, used | singleton(v)) {
                    return true;
                }
                table.pop();
            }
        }
        false
    }
    let mut table = Vec::with_capacity(a.size);
    extend(a, b, &mut table, 0).then_some(table)
}

/// Every `R`-upset, by scanning all subsets.
pub fn r_upsets(f: &KripkeFrame) -> Result<Vec<Subset>> {
    if f.size > EXHAUSTIVE_CAP {
        return Err(Error::SizeCap { size: f.size, cap: EXHAUSTIVE_CAP });
    }
    Ok((0..=full(f.size)).filter(|&u| f.is_r_upset(u)).collect())
}

/// The largest `R`-upset on which `R` is a preorder, with that preorder
/// reversed: `y ≤ y'` iff `y' R y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coreflection {
    pub states: Vec<usize>,
    pub order: FinitePreorder,
}

impl Coreflection {
    pub fn mask(&self) -> Subset {
        self.states.iter().fold(0, |acc, &x| acc | singleton(x))
    }
}

fn coreflection_from_mask(f: &KripkeFrame, y: Subset) -> Coreflection {
    let states: Vec<usize> = members(y).collect();
    let order = FinitePreorder::from_fn(states.len(), |a, b| f.related(states[b], states[a]))
        .expect("R restricted to Y is a preorder");
    Coreflection { states, order }
}

/// Union of all `R`-upsets on which `R` restricts to a preorder, computed by
/// enumerating every `R`-upset.
pub fn coreflect(f: &KripkeFrame) -> Result<Coreflection> {
    let good = r_upsets(f)?
        .into_iter()
        .filter(|&u| f.is_reflexive_on(u) && f.is_transitive_on(u));
    let y = good.fold(0, |acc, u| acc | u);
    Ok(coreflection_from_mask(f, y))
}

/// The same set via principal upsets: `x ∈ Y` iff `R` is a preorder on the
/// states reachable from `x`. Runs on frames of any size.
pub fn coreflect_fast(f: &KripkeFrame) -> Coreflection {
    let y = (0..f.size)
        .filter(|&x| {
            let r = f.reach(x);
            f.is_reflexive_on(r) && f.is_transitive_on(r)
        })
        .fold(0, |acc, x| acc | singleton(x));
    coreflection_from_mask(f, y)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreflectionReport {
    pub pmorphisms: usize,
    /// P-morphisms whose image lies in `Y`.
    pub inside: usize,
    /// P-morphisms with exactly one factorization `P → ℛ(F)`, which is open.
    pub unique_factorizations: usize,
    /// `Y` is an `R`-upset and a preorder, and contains every such upset.
    pub largest: bool,
}

impl CoreflectionReport {
    pub fn passed(&self) -> bool {
        self.largest && self.inside == self.pmorphisms && self.unique_factorizations == self.pmorphisms
    }
}

/// Every p-morphism `P^op → F` lands in `Y` and factors uniquely through the
/// inclusion of `ℛ(F)^op`, via an open map `P → ℛ(F)`.
pub fn verify_coreflection(f: &KripkeFrame, p: &FinitePreorder) -> Result<CoreflectionReport> {
    let c = coreflect(f)?;
    let y = c.mask();
    let upsets = r_upsets(f)?;
    let largest = f.is_r_upset(y)
        && f.is_reflexive_on(y)
        && f.is_transitive_on(y)
        && upsets
            .iter()
            .filter(|&&u| f.is_reflexive_on(u) && f.is_transitive_on(u))
            .all(|&u| is_subset(u, y));
    let pop = KripkeFrame::of_opposite(p);
    let pms = enumerate_pmorphisms(&pop, f);
    let mut inside = 0;
    let mut unique = 0;
    for g in &pms {
        if !is_subset(g.image(full(p.size())), y) {
            continue;
        }
        inside += 1;
        let factorizations: Vec<PointMap> = all_functions(p.size(), c.states.len())
            .filter(|h| (0..p.size()).all(|x| c.states[h.apply(x)] == g.apply(x)))
            .collect();
        if factorizations.len() == 1 && is_open_v2(p, &c.order, &factorizations[0]) {
            unique += 1;
        }
    }
    Ok(CoreflectionReport { pmorphisms: pms.len(), inside, unique_factorizations: unique, largest })
}

/// A finite Boolean algebra with operator on the powerset of `atoms`.
///
/// Only `◇` of each atom is stored; `◇` of any element is the union over its
/// atoms, so `◇` is completely additive and `◇⊥ = ⊥` by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBao {
    atoms: usize,
    diamond: Vec<Subset>,
}

impl FiniteBao {
    pub fn new(diamond: Vec<Subset>) -> Result<Self> {
        let atoms = diamond.len();
        if atoms > MAX_CARRIER {
            return Err(Error::SizeCap { size: atoms, cap: MAX_CARRIER });
        }
        if diamond.iter().any(|&d| !is_subset(d, full(atoms))) {
            return Err(Error::Invalid("diamond row outside the carrier".into()));
        }
        Ok(Self { atoms, diamond })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn top(&self) -> Subset {
        full(self.atoms)
    }

    pub fn neg(&self, a: Subset) -> Subset {
        !a & self.top()
    }

    pub fn diamond(&self, a: Subset) -> Subset {
        members(a).fold(0, |acc, i| acc | self.diamond[i])
    }

    /// `□a = ¬◇¬a`.
    pub fn boxed(&self, a: Subset) -> Subset {
        self.neg(self.diamond(self.neg(a)))
    }

    fn check_exhaustive(&self) -> Result<()> {
        if self.atoms > EXHAUSTIVE_CAP {
            return Err(Error::SizeCap { size: self.atoms, cap: EXHAUSTIVE_CAP });
        }
        Ok(())
    }

    /// `a ≤ ◇a` and `◇◇a ≤ ◇a` for every element.
    pub fn is_closure_algebra(&self) -> Result<bool> {
        self.check_exhaustive()?;
        Ok((0..=self.top()).all(|a| {
            let d = self.diamond(a);
            is_subset(a, d) && is_subset(self.diamond(d), d)
        }))
    }

    /// The same axioms checked on atoms only, which suffices because `◇` is
    /// additive.
    pub fn is_closure_algebra_on_atoms(&self) -> bool {
        (0..self.atoms).all(|i| {
            let d = self.diamond[i];
            contains(d, i) && is_subset(self.diamond(d), d)
        })
    }

    /// Count pairs `(a, b)` with `□a ∧ ◇b ≰ ◇(a ∧ b)`; always zero in a BAO.
    pub fn box_diamond_failures(&self) -> Result<u64> {
        self.check_exhaustive()?;
        let n = self.top() as usize + 1;
        let dia: Vec<Subset> = (0..n as Subset).map(|a| self.diamond(a)).collect();
        let top = self.top();
        let mut failures = 0;
        for a in 0..n {
            let bx = !dia[!a & top as usize] & top;
            for b in 0..n {
                if !is_subset(bx & dia[b], dia[a & b]) {
                    failures += 1;
                }
            }
        }
        Ok(failures)
    }

    /// The frame dual to this algebra: `S = {a : a ≤ □a}`, `s = ⋁S`, states
    /// the atoms below `s`, and `x R y` iff `x ≤ s ∧ ◇y`.
    pub fn dual_frame(&self) -> Result<BaoDual> {
        self.check_exhaustive()?;
        let s = (0..=self.top())
            .filter(|&a| is_subset(a, self.boxed(a)))
            .fold(0, |acc, a| acc | a);
        let s_in_family = is_subset(s, self.boxed(s));
        let atoms: Vec<usize> = members(s).collect();
        let succ: Vec<Subset> = atoms
            .iter()
            .map(|&x| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, &y)| contains(s & self.diamond[y], x))
                    .fold(0, |acc, (k, _)| acc | singleton(k))
            })
            .collect();
        Ok(BaoDual { s, s_in_family, atoms, frame: KripkeFrame::new(succ)? })
    }

    pub fn to_json(&self) -> BaoJson {
        BaoJson {
            atoms: self.atoms,
            diamond: self
                .diamond
                .iter()
                .map(|&d| (0..self.atoms).map(|i| if contains(d, i) { '1' } else { '0' }).collect())
                .collect(),
        }
    }
}

/// JSON form: `diamond[i]` is the bit string of `◇{i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaoJson {
    pub atoms: usize,
    pub diamond: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaoDual {
    /// Join of all `a` with `a ≤ □a`.
    pub s: Subset,
    /// `s ≤ □s`.
    pub s_in_family: bool,
    /// Atoms below `s`; frame state `k` is atom `atoms[k]`.
    pub atoms: Vec<usize>,
    pub frame: KripkeFrame,
}

/// `℘(F)`: the powerset of the states with `◇U = R⁻¹[U]`.
pub fn complex_algebra(f: &KripkeFrame) -> FiniteBao {
    FiniteBao { atoms: f.size, diamond: (0..f.size).map(|y| f.predecessors(y)).collect() }
}

/// `R` is a preorder exactly when `℘(F)` is a closure algebra.
pub fn closure_iff_preorder(f: &KripkeFrame) -> Result<bool> {
    Ok(f.is_preorder() == complex_algebra(f).is_closure_algebra()?)
}

/// `L(℘(F)) ≅ F`, with the top element as `s`.
pub fn verify_bao_adjunction(f: &KripkeFrame) -> Result<bool> {
    let dual = complex_algebra(f).dual_frame()?;
    Ok(dual.s_in_family && dual.s == full(f.size) && frame_iso(&dual.frame, f).is_some())
}

/// A Boolean homomorphism between powerset algebras that commutes with `◇`,
/// checked on every element. `phi` maps elements of `dom` to elements of
/// `cod`.
pub fn is_bao_morphism(dom: &FiniteBao, cod: &FiniteBao, phi: &dyn Fn(Subset) -> Subset) -> Result<bool> {
    dom.check_exhaustive()?;
    if phi(0) != 0 || phi(dom.top()) != cod.top() {
        return Ok(false);
    }
    Ok((0..=dom.top()).all(|a| {
        phi(dom.neg(a)) == cod.neg(phi(a))
            && phi(dom.diamond(a)) == cod.diamond(phi(a))
            && (0..=dom.top()).all(|b| phi(a | b) == phi(a) | phi(b))
    }))
}

/// Complete BAO morphisms `℘(G) → ℘(F)`. Complete Boolean homomorphisms
/// between finite powersets are preimage maps, so candidates are the
/// preimages of all functions `F → G`; each is checked against the
/// definition. Returns the inducing functions.
pub fn enumerate_bao_morphisms(f: &KripkeFrame, g: &KripkeFrame) -> Result<Vec<PointMap>> {
    let (pf, pg) = (complex_algebra(f), complex_algebra(g));
    let mut out = Vec::new();
    for h in all_functions(f.size, g.size) {
        if is_bao_morphism(&pg, &pf, &|a| h.preimage(a))? {
            out.push(h);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowersetFullness {
    pub pmorphisms: usize,
    pub bao_morphisms: usize,
    pub matched: bool,
}

/// P-morphisms `F → G` against complete BAO morphisms `℘(G) → ℘(F)`.
pub fn powerset_fullness(f: &KripkeFrame, g: &KripkeFrame) -> Result<PowersetFullness> {
    let pms: BTreeSet<PointMap> = enumerate_pmorphisms(f, g).into_iter().collect();
    let morphisms: BTreeSet<PointMap> = enumerate_bao_morphisms(f, g)?.into_iter().collect();
    Ok(PowersetFullness { pmorphisms: pms.len(), bao_morphisms: morphisms.len(), matched: pms == morphisms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::sierpinski;

    #[test]
    fn pmorphism_examples() {
        let f = KripkeFrame::from_pairs(2, &[(0, 0), (0, 1), (1, 1)]).unwrap();
        let id = PointMap::identity(2);
        assert!(is_pmorphism(&id, &f, &f));
        // Constant map from a reflexive frame onto an irreflexive point.
        let point = KripkeFrame::from_pairs(1, &[]).unwrap();
        let c = PointMap::constant(2, 0);
        assert!(!is_pmorphism(&c, &f, &point));
        assert!(!is_pmorphism_preimage(&c, &f, &point));
    }

    #[test]
    fn coreflect_examples() {
        let p = KripkeFrame::of_opposite(&sierpinski());
        assert_eq!(coreflect(&p).unwrap().states, vec![0, 1]);
        let point = KripkeFrame::from_pairs(1, &[]).unwrap();
        assert!(coreflect(&point).unwrap().states.is_empty());
        // a → b, b → b with a irreflexive: upsets ∅, {b}, {a, b}.
        let f = KripkeFrame::from_pairs(2, &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(r_upsets(&f).unwrap(), vec![0b00, 0b10, 0b11]);
        let c = coreflect(&f).unwrap();
        assert_eq!(c.states, vec![1]);
        assert_eq!(c, coreflect_fast(&f));
        let report = verify_coreflection(&f, &FinitePreorder::discrete(2)).unwrap();
        assert!(report.passed());
        assert!(report.pmorphisms > 0);
    }

    #[test]
    fn coreflection_of_empty_preorder_part() {
        let point = KripkeFrame::from_pairs(1, &[]).unwrap();
        let r = verify_coreflection(&point, &sierpinski()).unwrap();
        assert_eq!(r.pmorphisms, 0);
        assert!(r.passed());
    }

    #[test]
    fn complex_algebra_examples() {
        let empty = KripkeFrame::from_pairs(3, &[]).unwrap();
        let a = complex_algebra(&empty);
        assert!((0..8).all(|u| a.diamond(u) == 0));
        let s = KripkeFrame::of_opposite(&sierpinski());
        assert_eq!(complex_algebra(&s).diamond(0b01), 0b11);
    }

    #[test]
    fn closure_algebra_examples() {
        let pre = KripkeFrame::of_opposite(&FinitePreorder::chain(3));
        assert!(complex_algebra(&pre).is_closure_algebra().unwrap());
        let point = KripkeFrame::from_pairs(1, &[]).unwrap();
        let a = complex_algebra(&point);
        assert!(!is_subset(1, a.diamond(1)));
        assert!(!a.is_closure_algebra().unwrap());
        // Reflexive but not transitive.
        let f = KripkeFrame::from_pairs(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)]).unwrap();
        let a = complex_algebra(&f);
        assert!(!a.is_closure_algebra().unwrap());
        assert!(!is_subset(a.diamond(a.diamond(0b100)), a.diamond(0b100)));
        assert!(closure_iff_preorder(&f).unwrap());
    }

    #[test]
    fn box_diamond_trivial_cases() {
        let f = KripkeFrame::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
        let a = complex_algebra(&f);
        assert_eq!(a.boxed(a.top()), a.top());
        assert_eq!(a.box_diamond_failures().unwrap(), 0);
    }

    #[test]
    fn dual_frame_examples() {
        let f = KripkeFrame::from_pairs(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        assert!(verify_bao_adjunction(&f).unwrap());
        let identity = FiniteBao::new(vec![0b001, 0b010, 0b100]).unwrap();
        let dual = identity.dual_frame().unwrap();
        assert_eq!(dual.s, 0b111);
        assert_eq!(dual.frame, KripkeFrame::from_pairs(3, &[(0, 0), (1, 1), (2, 2)]).unwrap());
        let zero = FiniteBao::new(vec![]).unwrap();
        assert_eq!(zero.dual_frame().unwrap().frame.size(), 0);
    }

    #[test]
    fn frame_json_round_trip() {
        let f = KripkeFrame::from_pairs(2, &[(0, 1)]).unwrap();
        let j = f.to_json();
        assert_eq!(j.relation, "0100");
        assert_eq!(KripkeFrame::from_json(&j).unwrap(), f);
        assert!(f.to_dot().contains("s0 -> s1;"));
        let b = complex_algebra(&f).to_json();
        assert_eq!(b.diamond, vec!["00", "10"]);
    }
}
