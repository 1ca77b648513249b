//! Open maps between finite preorders.
//!
//! With downsets as opens, a function `f: P → Q` is open iff it is monotone
//! and sends downsets to downsets, iff `f[↓p] = ↓f(p)` for all `p`, iff
//! `f⁻¹[↑q] = ↑f⁻¹(q)` for all `q`. All three readings are implemented
//! separately so they can be checked against each other.

use serde::Serialize;

use crate::hierarchy::Hierarchy;
use crate::hsets::{Id, Universe};
use crate::order::{self, contains, members, singleton, FinitePreorder, Stage, Subset};
use crate::{Error, Result};

/// Default cap on candidate assignments examined by one search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

/// A total function between finite carriers, `table[p] = f(p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PointMap {
    pub table: Vec<usize>,
}

impl PointMap {
    pub fn new(table: Vec<usize>) -> Self {
        Self { table }
    }

    pub fn identity(n: usize) -> Self {
        Self { table: (0..n).collect() }
    }

    pub fn constant(n: usize, value: usize) -> Self {
        Self { table: vec![value; n] }
    }

    pub fn apply(&self, p: usize) -> usize {
        self.table[p]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `self` after `first`: `x ↦ self(first(x))`.
    pub fn after(&self, first: &PointMap) -> PointMap {
        PointMap { table: first.table.iter().map(|&y| self.table[y]).collect() }
    }

    pub fn image(&self, s: Subset) -> Subset {
        members(s).fold(0, |acc, p| acc | singleton(self.table[p]))
    }

    pub fn preimage(&self, s: Subset) -> Subset {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &q)| contains(s, q))
            .fold(0, |acc, (p, _)| acc | singleton(p))
    }

    pub fn is_injective_on(&self, s: Subset) -> bool {
        self.image(s).count_ones() == s.count_ones()
    }

    pub fn is_injective(&self) -> bool {
        self.is_injective_on(order::full(self.table.len()))
    }

    /// Whether the table is a total function `P → Q`.
    pub fn fits(&self, p: &FinitePreorder, q: &FinitePreorder) -> bool {
        self.table.len() == p.size() && self.table.iter().all(|&v| v < q.size())
    }
}

pub fn is_monotone(p: &FinitePreorder, q: &FinitePreorder, f: &PointMap) -> bool {
    (0..p.size()).all(|b| members(p.down(b)).all(|a| q.leq(f.apply(a), f.apply(b))))
}

/// Definition-level openness: `f` is monotone and the image of every downset
/// of `P` is a downset of `Q`.
pub fn is_open_v1(p: &FinitePreorder, q: &FinitePreorder, f: &PointMap) -> bool {
    if !is_monotone(p, q, f) {
        return false;
    }
    let opens = p.all_downsets().expect("carrier within the downset cap");
    opens.into_iter().all(|u| q.is_downset(f.image(u)))
}

/// `f[↓p] = ↓f(p)` for every `p`.
pub fn is_open_v2(p: &FinitePreorder, q: &FinitePreorder, f: &PointMap) -> bool {
    (0..p.size()).all(|x| f.image(p.down(x)) == q.down(f.apply(x)))
}

/// `f⁻¹[↑q] = ↑f⁻¹(q)` for every `q`.
pub fn is_open_v3(p: &FinitePreorder, q: &FinitePreorder, f: &PointMap) -> bool {
    (0..q.size()).all(|y| f.preimage(q.up(y)) == p.up_closure(f.preimage(singleton(y))))
}

/// Outcome of an exhaustive map search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSearch {
    pub maps: Vec<PointMap>,
    pub candidates_examined: u64,
}

/// Every open map `P → Q` satisfying `allowed(p, f(p))` for all `p`, sorted by
/// table.
///
/// Assignments follow a linear extension of `P`. A partial map is cut as soon
/// as it breaks monotonicity, and `f[↓x] = ↓f(x)` is checked for each `x` at
/// the moment its whole downset has been assigned, so every leaf reached is
/// open.
pub fn enumerate_open_maps_where(
    p: &FinitePreorder,
    q: &FinitePreorder,
    allowed: &dyn Fn(usize, usize) -> bool,
    budget: u64,
) -> Result<MapSearch> {
    let order = p.linear_extension();
    let mut position = vec![0; p.size()];
    for (k, &x) in order.iter().enumerate() {
        position[x] = k;
    }
    // ready[k]: elements whose downset is fully assigned once order[k] is.
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); p.size()];
    for x in 0..p.size() {
        let last = members(p.down(x)).map(|a| position[a]).max().expect("x ≤ x");
        ready[last].push(x);
    }

    struct Search<'a> {
        p: &'a FinitePreorder,
        q: &'a FinitePreorder,
        allowed: &'a dyn Fn(usize, usize) -> bool,
        order: Vec<usize>,
        ready: Vec<Vec<usize>>,
        table: Vec<usize>,
        assigned: Subset,
        examined: u64,
        budget: u64,
        out: Vec<PointMap>,
    }

    impl Search<'_> {
        fn run(&mut self, k: usize) -> Result<()> {
            if k == self.order.len() {
                self.out.push(PointMap { table: self.table.clone() });
                return Ok(());
            }
            let x = self.order[k];
            for v in 0..self.q.size() {
                self.examined += 1;
                if self.examined > self.budget {
                    return Err(Error::SearchBudget { limit: self.budget });
                }
                if !(self.allowed)(x, v) {
                    continue;
                }
                let monotone = members(self.assigned).all(|a| {
                    let fa = self.table[a];
                    (!self.p.leq(a, x) || self.q.leq(fa, v)) && (!self.p.leq(x, a) || self.q.leq(v, fa))
                });
                if !monotone {
                    continue;
                }
                self.table[x] = v;
                self.assigned |= singleton(x);
                let open_so_far = self.ready[k].iter().all(|&z| {
                    let img = members(self.p.down(z)).fold(0, |acc, a| acc | singleton(self.table[a]));
                    img == self.q.down(self.table[z])
                });
                if open_so_far {
                    self.run(k + 1)?;
                }
                self.assigned &= !singleton(x);
            }
            Ok(())
        }
    }

    let mut s = Search {
        p,
        q,
        allowed,
        order,
        ready,
        table: vec![0; p.size()],
        assigned: 0,
        examined: 0,
        budget,
        out: Vec::new(),
    };
    s.run(0)?;
    s.out.sort();
    Ok(MapSearch { maps: s.out, candidates_examined: s.examined })
}

pub fn enumerate_open_maps(p: &FinitePreorder, q: &FinitePreorder, budget: u64) -> Result<MapSearch> {
    enumerate_open_maps_where(p, q, &|_, _| true, budget)
}

/// Every function `P → Q` as a table, in lexicographic order.
pub fn all_functions(n: usize, m: usize) -> impl Iterator<Item = PointMap> {
    let total = if n == 0 { 1 } else if m == 0 { 0 } else { m.pow(n as u32) };
    (0..total).map(move |mut code| {
        let mut table = vec![0; n];
        for slot in table.iter_mut().rev() {
            *slot = code % m.max(1);
            code /= m.max(1);
        }
        PointMap { table }
    })
}

/// `f_i` on a stage of the hierarchy over `M = {m0, m1, m2, m3}`: `0` at `m0`
/// and `m_i`, `1` everywhere else.
pub fn product_test_map(i: usize, base: &[Id; 4], stage: &Stage) -> PointMap {
    assert!(i == 1 || i == 2, "test maps are indexed by 1 and 2");
    PointMap {
        table: stage
            .ids
            .iter()
            .map(|&x| usize::from(!(x == base[0] || x == base[i])))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityReport {
    pub stage_size: usize,
    pub target_size: usize,
    pub open_maps: usize,
    pub injective_on_base: usize,
    /// Maps injective on the base but not on the whole stage.
    pub violations: usize,
    pub witnesses: Vec<PointMap>,
    pub candidates_examined: u64,
}

/// For every open map `stage → target` injective on `base`, check that it is
/// injective on the whole stage.
pub fn injectivity_experiment(
    stage: &Stage,
    base: &[Id],
    target: &FinitePreorder,
    budget: u64,
) -> Result<InjectivityReport> {
    let base_mask = base
        .iter()
        .map(|&id| {
            stage
                .index_of(id)
                .ok_or_else(|| Error::Hypothesis(format!("base element {id} not in the stage")))
        })
        .try_fold(0, |acc, i| i.map(|i| acc | singleton(i)))?;
    let search = enumerate_open_maps(&stage.poset, target, budget)?;
    let mut report = InjectivityReport {
        stage_size: stage.ids.len(),
        target_size: target.size(),
        open_maps: search.maps.len(),
        injective_on_base: 0,
        violations: 0,
        witnesses: Vec::new(),
        candidates_examined: search.candidates_examined,
    };
    for f in search.maps {
        if f.is_injective_on(base_mask) {
            report.injective_on_base += 1;
            if !f.is_injective() {
                report.violations += 1;
                if report.witnesses.len() < 5 {
                    report.witnesses.push(f);
                }
            }
        }
    }
    Ok(report)
}

/// All open `f: Q → P` with `p1 ∘ f = f1` and `p2 ∘ f = f2`.
#[allow(clippy::too_many_arguments)]
pub fn mediating_search(
    dom: &FinitePreorder,
    f1: &PointMap,
    f2: &PointMap,
    target: &FinitePreorder,
    p1: &PointMap,
    p2: &PointMap,
    budget: u64,
) -> Result<MapSearch> {
    let allowed = |x: usize, v: usize| p1.apply(v) == f1.apply(x) && p2.apply(v) == f2.apply(x);
    enumerate_open_maps_where(dom, target, &allowed, budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Exhaustive search found no mediating open map at this stage.
    EmptyMediatingSet,
    /// Mediating maps existed at every earlier stage and were all injective,
    /// so `|P|` bounds the stage size; this stage exceeds `|P|`.
    CardinalityBound,
    /// A mediating map that is injective on the base but not on the stage.
    /// Never expected; signals a broken invariant.
    InjectivityViolation,
    /// No refutation within the stages searched.
    Unrefuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageAttempt {
    pub stage: usize,
    pub stage_size: usize,
    pub candidates_examined: u64,
    pub mediating_found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionVerdict {
    /// Stage at which the certificate was issued (last stage tried if
    /// unrefuted).
    pub stage: usize,
    pub certificate_kind: CertificateKind,
    pub candidates_examined: u64,
    pub mediating_found: usize,
    pub attempts: Vec<StageAttempt>,
}

impl ObstructionVerdict {
    pub fn refuted(&self) -> bool {
        matches!(
            self.certificate_kind,
            CertificateKind::EmptyMediatingSet | CertificateKind::CardinalityBound
        )
    }
}

fn verdict(
    stage: usize,
    kind: CertificateKind,
    mediating: usize,
    attempts: Vec<StageAttempt>,
    total: u64,
) -> ObstructionVerdict {
    ObstructionVerdict { stage, certificate_kind: kind, candidates_examined: total, mediating_found: mediating, attempts }
}

/// Try to refute `(P, p1, p2)` as a product of Sierpiński with itself.
///
/// For `α = 1..=max_stage` the two test maps on `S_α(M)` must factor through
/// `P`. The first stage with no mediating open map is a certificate. A stage
/// larger than `P`, reached after earlier stages produced only injective
/// mediating maps, is a certificate without search: mediating maps are
/// injective on the base and hence injective.
#[allow(clippy::too_many_arguments)]
pub fn product_obstruction(
    target: &FinitePreorder,
    p1: &PointMap,
    p2: &PointMap,
    h: &Hierarchy,
    base: &[Id; 4],
    max_stage: usize,
    u: &Universe,
    budget: u64,
) -> Result<ObstructionVerdict> {
    let s = order::sierpinski();
    for pi in [p1, p2] {
        if !pi.fits(target, &s) || !is_open_v2(target, &s, pi) {
            return Err(Error::Hypothesis("projections must be open maps P → Sierpiński".into()));
        }
    }
    if h.depth() < max_stage {
        return Err(Error::Invalid(format!(
            "hierarchy has depth {} but stage {max_stage} was requested",
            h.depth()
        )));
    }
    let mut attempts: Vec<StageAttempt> = Vec::new();
    let mut total: u64 = 0;
    for alpha in 1..=max_stage {
        let stage = order::materialize(h, alpha, u)?;
        if alpha > 1 && stage.ids.len() > target.size() && !attempts.is_empty() {
            attempts.push(StageAttempt {
                stage: alpha,
                stage_size: stage.ids.len(),
                candidates_examined: 0,
                mediating_found: 0,
            });
            return Ok(verdict(alpha, CertificateKind::CardinalityBound, 0, attempts, total));
        }
        let f1 = product_test_map(1, base, &stage);
        let f2 = product_test_map(2, base, &stage);
        let found = mediating_search(&stage.poset, &f1, &f2, target, p1, p2, budget)?;
        total += found.candidates_examined;
        attempts.push(StageAttempt {
            stage: alpha,
            stage_size: stage.ids.len(),
            candidates_examined: found.candidates_examined,
            mediating_found: found.maps.len(),
        });
        if found.maps.is_empty() {
            return Ok(verdict(alpha, CertificateKind::EmptyMediatingSet, 0, attempts, total));
        }
        if found.maps.iter().any(|f| !f.is_injective()) {
            let n = found.maps.len();
            return Ok(verdict(alpha, CertificateKind::InjectivityViolation, n, attempts, total));
        }
    }
    let last = attempts.last().map_or(0, |a| a.mediating_found);
    Ok(verdict(max_stage, CertificateKind::Unrefuted, last, attempts, total))
}

/// Every pair `(p1, p2)` of open maps `P → Sierpiński`.
pub fn projection_pairs(target: &FinitePreorder) -> Result<Vec<(PointMap, PointMap)>> {
    let opens = enumerate_open_maps(target, &order::sierpinski(), DEFAULT_SEARCH_BUDGET)?.maps;
    let mut out = Vec::new();
    for a in &opens {
        for b in &opens {
            out.push((a.clone(), b.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::DEFAULT_BUDGET;
    use crate::hsets::abstract_product_base;
    use crate::order::sierpinski;

    fn brute_open_maps(p: &FinitePreorder, q: &FinitePreorder) -> Vec<PointMap> {
        all_functions(p.size(), q.size()).filter(|f| is_open_v1(p, q, f)).collect()
    }

    #[test]
    fn openness_of_simple_maps() {
        let s = sierpinski();
        let id = PointMap::identity(2);
        assert!(is_open_v1(&s, &s, &id) && is_open_v2(&s, &s, &id) && is_open_v3(&s, &s, &id));
        let p = FinitePreorder::closure(3, &[(0, 1), (0, 2)]).unwrap();
        let bottom = PointMap::constant(3, 0);
        assert!(is_open_v1(&p, &s, &bottom) && is_open_v2(&p, &s, &bottom));
        let top = PointMap::constant(3, 1);
        assert!(!is_open_v1(&p, &s, &top) && !is_open_v2(&p, &s, &top) && !is_open_v3(&p, &s, &top));
    }

    #[test]
    fn enumeration_examples() {
        let s = sierpinski();
        let ss = enumerate_open_maps(&s, &s, 1000).unwrap().maps;
        assert_eq!(ss, vec![PointMap::new(vec![0, 0]), PointMap::new(vec![0, 1])]);
        let two = FinitePreorder::discrete(2);
        let maps = enumerate_open_maps(&two, &s, 1000).unwrap().maps;
        assert_eq!(maps, vec![PointMap::new(vec![0, 0])]);
        let one = FinitePreorder::discrete(1);
        assert_eq!(enumerate_open_maps(&s, &one, 1000).unwrap().maps.len(), 1);
        assert!(matches!(enumerate_open_maps(&s, &s, 1), Err(Error::SearchBudget { .. })));
    }

    #[test]
    fn pruned_enumeration_matches_brute_force() {
        let posets: Vec<FinitePreorder> =
            (1..=3).flat_map(|n| crate::order::enumerate_preorders(n).unwrap()).collect();
        for p in &posets {
            for q in &posets {
                let fast = enumerate_open_maps(p, q, u64::MAX).unwrap().maps;
                assert_eq!(fast, brute_open_maps(p, q));
            }
        }
    }

    #[test]
    fn composition_stays_open() {
        let s = sierpinski();
        let c = FinitePreorder::chain(3);
        for f in enumerate_open_maps(&c, &c, u64::MAX).unwrap().maps {
            for g in enumerate_open_maps(&c, &s, u64::MAX).unwrap().maps {
                assert!(is_open_v2(&c, &s, &g.after(&f)));
            }
        }
    }

    #[test]
    fn test_maps_on_product_base() {
        let (mut u, m) = abstract_product_base();
        let h = Hierarchy::build(&m, 2, DEFAULT_BUDGET, &mut u).unwrap();
        let s = sierpinski();
        let stage0 = order::materialize(&h, 0, &u).unwrap();
        let f1 = product_test_map(1, &m, &stage0);
        assert_eq!(f1.table, vec![0, 0, 1, 1]);
        let f2 = product_test_map(2, &m, &stage0);
        let pairs: Vec<(usize, usize)> = (0..4).map(|i| (f1.apply(i), f2.apply(i))).collect();
        assert_eq!(pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);

        let stage2 = order::materialize(&h, 2, &u).unwrap();
        for i in [1, 2] {
            let f = product_test_map(i, &m, &stage2);
            assert!(is_open_v2(&stage2.poset, &s, &f) && is_open_v3(&stage2.poset, &s, &f));
        }
    }

    #[test]
    fn no_mediating_maps_at_stage_zero_or_one() {
        let (mut u, m) = abstract_product_base();
        let h = Hierarchy::build(&m, 1, DEFAULT_BUDGET, &mut u).unwrap();
        let s = sierpinski();
        let sq = s.product(&s).unwrap();
        let p1 = PointMap::new(vec![0, 0, 1, 1]);
        let p2 = PointMap::new(vec![0, 1, 0, 1]);

        let stage0 = order::materialize(&h, 0, &u).unwrap();
        let (f1, f2) = (product_test_map(1, &m, &stage0), product_test_map(2, &m, &stage0));
        // Oracle: filter all 4^4 functions directly.
        let brute: Vec<PointMap> = all_functions(4, 4)
            .filter(|f| {
                is_open_v1(&stage0.poset, &sq, f)
                    && (0..4).all(|x| p1.apply(f.apply(x)) == f1.apply(x) && p2.apply(f.apply(x)) == f2.apply(x))
            })
            .collect();
        // The pairing sends m3 to the top, but ↓m3 has two elements.
        assert!(brute.is_empty());
        let found = mediating_search(&stage0.poset, &f1, &f2, &sq, &p1, &p2, u64::MAX).unwrap();
        assert_eq!(found.maps, brute);

        let v = product_obstruction(&sq, &p1, &p2, &h, &m, 1, &u, u64::MAX).unwrap();
        assert_eq!((v.stage, v.certificate_kind), (1, CertificateKind::EmptyMediatingSet));
    }

    #[test]
    fn singleton_target_is_refuted() {
        let (mut u, m) = abstract_product_base();
        let h = Hierarchy::build(&m, 1, DEFAULT_BUDGET, &mut u).unwrap();
        let one = FinitePreorder::discrete(1);
        let pairs = projection_pairs(&one).unwrap();
        assert_eq!(pairs.len(), 1);
        let (p1, p2) = &pairs[0];
        let v = product_obstruction(&one, p1, p2, &h, &m, 1, &u, u64::MAX).unwrap();
        assert!(v.refuted());
    }

    #[test]
    fn injectivity_on_stage_one_into_itself() {
        let (mut u, m) = abstract_product_base();
        let h = Hierarchy::build(&m, 1, DEFAULT_BUDGET, &mut u).unwrap();
        let stage = order::materialize(&h, 1, &u).unwrap();
        let r = injectivity_experiment(&stage, &m, &stage.poset, u64::MAX).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.injective_on_base >= 1);

        let one = FinitePreorder::discrete(1);
        let r = injectivity_experiment(&stage, &m, &one, u64::MAX).unwrap();
        assert_eq!((r.injective_on_base, r.violations), (0, 0));
    }
}
