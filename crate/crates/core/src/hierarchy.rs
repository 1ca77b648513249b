//! Finite stages of the hierarchy of hereditary nontrivial antichains.
//!
//! `S_0(M) = M` and `S_{α+1}(M) = S_α(M) ∪ {x : x a nontrivial antichain of
//! S_α(M)}`. Level sizes grow combinatorially, so every build carries a
//! per-level element budget and fails loudly when it is exceeded.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::hsets::{Id, Universe};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    base: Vec<Id>,
    levels: Vec<Vec<Id>>,
    budget: usize,
}

/// Nontrivial antichains of `elems` in lexicographic DFS order: each
/// antichain is listed by increasing position in `elems` and emitted before
/// its extensions. Stops with `Err(limit)` once more than `limit` antichains
/// have been produced.
pub fn enumerate_nontrivial_antichains(
    elems: &[Id],
    u: &Universe,
    limit: Option<usize>,
) -> std::result::Result<Vec<Vec<Id>>, usize> {
    let n = elems.len();
    let words = n.div_ceil(64);
    // Row i: positions j > i that are incomparable with i.
    let mut free: Vec<Vec<u64>> = vec![vec![0; words]; n];
    for i in 0..n {
        for j in i + 1..n {
            if !u.lt(elems[i], elems[j]) && !u.lt(elems[j], elems[i]) && elems[i] != elems[j] {
                free[i][j / 64] |= 1 << (j % 64);
            }
        }
    }

    struct Search<'a> {
        elems: &'a [Id],
        free: &'a [Vec<u64>],
        limit: Option<usize>,
        out: Vec<Vec<Id>>,
        current: Vec<Id>,
    }

    impl Search<'_> {
        fn extend(&mut self, cand: &[u64]) -> bool {
            for (w, &word) in cand.iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    let j = w * 64 + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    self.current.push(self.elems[j]);
                    self.out.push(self.current.clone());
                    if self.limit.is_some_and(|l| self.out.len() > l) {
                        return false;
                    }
                    let next: Vec<u64> =
                        cand.iter().zip(&self.free[j]).map(|(a, b)| a & b).collect();
                    if next.iter().any(|&x| x != 0) && !self.extend(&next) {
                        return false;
                    }
                    self.current.pop();
                }
            }
            true
        }
    }

    let mut s = Search { elems, free: &free, limit, out: Vec::new(), current: Vec::new() };
    for i in 0..n {
        s.current.push(elems[i]);
        let ok = s.extend(&free[i]);
        s.current.pop();
        if !ok {
            return Err(limit.unwrap_or(usize::MAX));
        }
    }
    Ok(s.out)
}

impl Hierarchy {
    /// Build stages `0..=n` over the base `m`. Levels list the previous level
    /// first, then new elements in enumeration order.
    pub fn build(m: &[Id], n: usize, budget: usize, u: &mut Universe) -> Result<Self> {
        if let Some(&bad) = m.iter().find(|x| !u.contains(**x)) {
            return Err(Error::UnknownId(bad));
        }
        let mut base = m.to_vec();
        base.dedup();
        let mut h = Hierarchy { base: base.clone(), levels: vec![base], budget };
        if h.levels[0].len() > budget {
            return Err(Error::BudgetExhausted { stage: 0, limit: budget, partial: None });
        }
        for _ in 0..n {
            h.extend_one(u)?;
        }
        Ok(h)
    }

    /// Add one more stage.
    pub fn extend_one(&mut self, u: &mut Universe) -> Result<()> {
        let stage = self.levels.len();
        let top = self.levels.last().expect("at least one level");
        let exhausted = || Error::BudgetExhausted {
            stage,
            limit: self.budget,
            partial: Some(Box::new(self.clone())),
        };
        let found = enumerate_nontrivial_antichains(top, u, Some(self.budget))
            .map_err(|_| exhausted())?;
        let mut present: HashSet<Id> = top.iter().copied().collect();
        let mut next = top.clone();
        for ac in found {
            let id = u.intern(&ac)?;
            if present.insert(id) {
                next.push(id);
                if next.len() > self.budget {
                    return Err(exhausted());
                }
            }
        }
        self.levels.push(next);
        Ok(())
    }

    /// Assemble a hierarchy from explicit levels without checking it; used
    /// for imports and for negative-control fixtures.
    pub fn from_parts(base: Vec<Id>, levels: Vec<Vec<Id>>, budget: usize) -> Self {
        Self { base, levels, budget }
    }

    pub fn base(&self) -> &[Id] {
        &self.base
    }

    pub fn levels(&self) -> &[Vec<Id>] {
        &self.levels
    }

    pub fn level(&self, alpha: usize) -> Option<&[Id]> {
        self.levels.get(alpha).map(Vec::as_slice)
    }

    /// Index of the top stage.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn top(&self) -> &[Id] {
        self.levels.last().expect("at least one level")
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `|S_{α+1} \ S_α|` for each computed `α`.
    pub fn growth_stats(&self) -> Vec<usize> {
        self.levels.windows(2).map(|w| difference(&w[1], &w[0]).len()).collect()
    }

    /// The new elements of stage `alpha` (all of `M` at stage 0).
    pub fn fresh(&self, alpha: usize) -> Vec<Id> {
        match alpha {
            0 => self.levels[0].clone(),
            _ => difference(&self.levels[alpha], &self.levels[alpha - 1]),
        }
    }

    pub fn to_json(&self, u: &Universe) -> HierarchyJson {
        HierarchyJson {
            schema: 1,
            base: self.base.clone(),
            levels: self.levels.clone(),
            budget: self.budget,
            universe: u.dump(),
        }
    }

    pub fn from_json(json: &HierarchyJson) -> Result<(Self, Universe)> {
        let u = Universe::load(&json.universe)?;
        for id in json.levels.iter().flatten().chain(&json.base) {
            if !u.contains(*id) {
                return Err(Error::UnknownId(*id));
            }
        }
        Ok((Self::from_parts(json.base.clone(), json.levels.clone(), json.budget), u))
    }

    /// Hasse diagram of stage `alpha` in DOT, nodes labelled by structure.
    pub fn to_dot(&self, alpha: usize, u: &Universe) -> Result<String> {
        let stage = crate::order::materialize(self, alpha, u)?;
        let labels: Vec<String> = stage.ids.iter().map(|&id| u.render(id)).collect();
        Ok(stage.poset.to_dot(Some(&labels)))
    }
}

fn difference(a: &[Id], b: &[Id]) -> Vec<Id> {
    let bs: HashSet<Id> = b.iter().copied().collect();
    a.iter().copied().filter(|x| !bs.contains(x)).collect()
}

fn includes(big: &[Id], small: &[Id]) -> bool {
    let bs: HashSet<Id> = big.iter().copied().collect();
    small.iter().all(|x| bs.contains(x))
}

/// Hierarchy export: base ids, per-level id arrays and the universe dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyJson {
    pub schema: u32,
    pub base: Vec<Id>,
    pub levels: Vec<Vec<Id>>,
    pub budget: usize,
    pub universe: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageCheck {
    pub stage: usize,
    /// `levels[stage]` is a downset of the top level.
    pub downset: bool,
    /// `levels[stage] \ levels[stage-1]` is an antichain (`None` at stage 0).
    pub fresh_antichain: Option<bool>,
    /// Every new element of the stage has a member that is new at the
    /// previous stage (`None` at stages 0 and 1).
    pub freshness: Option<bool>,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub checks: Vec<StageCheck>,
}

impl StageReport {
    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn violations(&self) -> usize {
        self.checks
            .iter()
            .map(|c| {
                usize::from(!c.downset)
                    + usize::from(c.fresh_antichain == Some(false))
                    + usize::from(c.freshness == Some(false))
            })
            .sum()
    }
}

/// Check that each stage is a downset of the top stage, that each level
/// difference is an antichain and that new elements are fresh.
pub fn verify_stage_properties(h: &Hierarchy, u: &Universe) -> StageReport {
    let top = h.top();
    let mut checks = Vec::new();
    for alpha in 0..=h.depth() {
        let level = &h.levels[alpha];
        let set: HashSet<Id> = level.iter().copied().collect();
        let mut witness = None;
        let mut downset = true;
        'outer: for &x in level {
            for &y in top {
                if u.lt(y, x) && !set.contains(&y) {
                    downset = false;
                    witness = Some(format!(
                        "{} < {} but only the latter is in stage {alpha}",
                        u.render(y),
                        u.render(x)
                    ));
                    break 'outer;
                }
            }
        }
        let fresh_antichain = (alpha > 0).then(|| u.is_antichain(&h.fresh(alpha)));
        if fresh_antichain == Some(false) && witness.is_none() {
            witness = Some(format!("stage {alpha} difference is not an antichain"));
        }
        let freshness = (alpha > 1).then(|| {
            let prev_fresh: HashSet<Id> = h.fresh(alpha - 1).into_iter().collect();
            h.fresh(alpha)
                .iter()
                .all(|&x| u.children(x).iter().any(|c| prev_fresh.contains(c)))
        });
        if freshness == Some(false) && witness.is_none() {
            witness = Some(format!("stage {alpha} has an element built only from older data"));
        }
        checks.push(StageCheck { stage: alpha, downset, fresh_antichain, freshness, witness });
    }
    StageReport { checks }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    /// Per stage `α ≤ n`: `S_α(M) = S_n(M) ∩ S_α(M')`. Empty when the
    /// hypotheses (`M ⊆ M'`, both antichains) do not hold.
    pub restriction: Vec<bool>,
    /// Least `c0` with `M ⊆ S_{c0}(M')`, if any `c0 ≤ n`.
    pub base_stage: Option<usize>,
    /// Least offset `c ≤ n` with `S_α(M) ⊆ S_{α+c}(M')` for all `α ≤ n`.
    pub offset: Option<usize>,
}

impl RestrictionReport {
    pub fn passed(&self) -> bool {
        self.restriction.iter().all(|&b| b) && (self.base_stage.is_none() || self.offset.is_some())
    }
}

/// Check the restriction identity `S_α(M) = S(M) ∩ S_α(M')` (for antichains
/// `M ⊆ M'`) and the containment `S(M) ⊆ S(M')` stage by stage (when `M`
/// lies in some stage of `M'`), both at finite depth `n`.
pub fn verify_restriction(
    m: &[Id],
    m_prime: &[Id],
    n: usize,
    budget: usize,
    u: &mut Universe,
) -> Result<RestrictionReport> {
    let sub = includes(m_prime, m);
    let antichains = u.is_antichain(m) && u.is_antichain(m_prime);
    let hm = Hierarchy::build(m, n, budget, u)?;

    let mut restriction = Vec::new();
    if sub && antichains {
        let hp = Hierarchy::build(m_prime, n, budget, u)?;
        let top_m: HashSet<Id> = hm.top().iter().copied().collect();
        for alpha in 0..=n {
            let mut lhs: Vec<Id> = hm.levels[alpha].clone();
            let mut rhs: Vec<Id> =
                hp.levels[alpha].iter().copied().filter(|x| top_m.contains(x)).collect();
            lhs.sort_unstable();
            rhs.sort_unstable();
            restriction.push(lhs == rhs);
        }
    }

    let mut hp = Hierarchy::build(m_prime, 0, budget, u)?;
    let mut base_stage = None;
    for c0 in 0..=n {
        if c0 > 0 {
            hp.extend_one(u)?;
        }
        if includes(&hp.levels[c0], m) {
            base_stage = Some(c0);
            break;
        }
    }
    if base_stage.is_none() && !(sub && antichains) {
        return Err(Error::Hypothesis(
            "M is neither a sub-antichain of M' nor contained in a stage of S(M')".into(),
        ));
    }
    let mut offset = None;
    if base_stage.is_some() {
        for c in 0..=n {
            while hp.depth() < n + c {
                hp.extend_one(u)?;
            }
            if (0..=n).all(|alpha| includes(&hp.levels[alpha + c], &hm.levels[alpha])) {
                offset = Some(c);
                break;
            }
        }
    }
    Ok(RestrictionReport { restriction, base_stage, offset })
}

/// `{x, m'}`, after checking that `M ∪ {m'}` is an antichain with `m' ∉ M`,
/// that `x` lies in the top stage of `h` (a hierarchy over `M`), and that the
/// pair is a nontrivial antichain.
pub fn pair_with(h: &Hierarchy, x: Id, m_prime: Id, u: &mut Universe) -> Result<Id> {
    check_pair_hypotheses(h, m_prime, u)?;
    if !h.top().contains(&x) {
        return Err(Error::Hypothesis(format!("{} is not in the top stage", u.render(x))));
    }
    let pair = [x, m_prime];
    if !u.is_nontrivial_antichain(&pair) {
        return Err(Error::Hypothesis(format!(
            "{{{}, {}}} is not a nontrivial antichain",
            u.render(x),
            u.render(m_prime)
        )));
    }
    u.intern(&pair)
}

/// `{{x, m'} : x ∈ A}`, verified to be an antichain.
pub fn fan(h: &Hierarchy, a: &[Id], m_prime: Id, u: &mut Universe) -> Result<Vec<Id>> {
    let mut out = Vec::with_capacity(a.len());
    for &x in a {
        out.push(pair_with(h, x, m_prime, u)?);
    }
    if !u.is_antichain(&out) {
        return Err(Error::Hypothesis("fan is not an antichain".into()));
    }
    Ok(out)
}

fn check_pair_hypotheses(h: &Hierarchy, m_prime: Id, u: &Universe) -> Result<()> {
    if h.base().contains(&m_prime) {
        return Err(Error::Hypothesis(format!("{} already belongs to M", u.render(m_prime))));
    }
    let mut extended = h.base().to_vec();
    extended.push(m_prime);
    if !u.is_antichain(&extended) {
        return Err(Error::Hypothesis("M ∪ {m'} is not an antichain".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanStage {
    pub depth: usize,
    /// `|S_depth(M')|`.
    pub source_size: usize,
    /// Size of the fan against the triple, equal to `source_size`.
    pub fan_size: usize,
    pub is_antichain: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthWitness {
    /// `|S_{α+1}(M3) \ S_α(M3)|` for each computed `α`.
    pub growth: Vec<usize>,
    pub fans: Vec<FanStage>,
}

impl GrowthWitness {
    pub fn passed(&self) -> bool {
        self.growth.iter().all(|&g| g >= 3)
            && self.fans.iter().all(|f| f.is_antichain && f.fan_size >= 3)
    }
}

/// Finite reflection of unbounded growth over a 3-antichain `{m1, m2, m3}`:
/// level growth of `S(M3)` up to `depth`, and for each `d ≤ depth` the fan
/// `{{x, {m1,m2,m3}} : x ∈ S_d(M')}` with `M'` the three doubletons.
pub fn growth_witness(
    m3: [Id; 3],
    depth: usize,
    budget: usize,
    u: &mut Universe,
) -> Result<GrowthWitness> {
    if !u.is_nontrivial_antichain(&m3) || m3[0] == m3[2] {
        return Err(Error::Hypothesis("M3 must be a 3-element antichain".into()));
    }
    let h = Hierarchy::build(&m3, depth, budget, u)?;
    let growth = h.growth_stats();

    let doubletons = [
        u.intern(&[m3[0], m3[1]])?,
        u.intern(&[m3[1], m3[2]])?,
        u.intern(&[m3[2], m3[0]])?,
    ];
    let triple = u.intern(&m3)?;
    let mut fans = Vec::new();
    let mut hp = Hierarchy::build(&doubletons, 0, budget, u)?;
    for d in 0..=depth {
        if d > 0 {
            hp.extend_one(u)?;
        }
        let source = hp.top().to_vec();
        let f = fan(&hp, &source, triple, u)?;
        fans.push(FanStage {
            depth: d,
            source_size: source.len(),
            fan_size: f.len(),
            is_antichain: u.is_antichain(&f),
        });
    }
    Ok(GrowthWitness { growth, fans })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsets::{abstract_product_base, BasePoset};

    fn antichain3() -> (Universe, [Id; 3]) {
        let u = Universe::new(BasePoset::antichain(["m1", "m2", "m3"]).unwrap());
        (u, [Id(0), Id(1), Id(2)])
    }

    #[test]
    fn antichain_enumeration_examples() {
        let (u, m) = antichain3();
        let found = enumerate_nontrivial_antichains(&m, &u, None).unwrap();
        assert_eq!(found.len(), 4);
        assert!(found.contains(&vec![m[0], m[1], m[2]]));

        let (u, m) = abstract_product_base();
        let found = enumerate_nontrivial_antichains(&m, &u, None).unwrap();
        assert_eq!(
            found,
            vec![vec![m[1], m[2]], vec![m[1], m[2], m[3]], vec![m[1], m[3]], vec![m[2], m[3]]]
        );

        let mut u = Universe::pure();
        let chain: Vec<Id> = (0..3).map(|k| u.ordinal(k)).collect();
        assert!(enumerate_nontrivial_antichains(&chain, &u, None).unwrap().is_empty());
        assert!(enumerate_nontrivial_antichains(&m, &abstract_product_base().0, Some(2)).is_err());
    }

    #[test]
    fn antichain_enumeration_matches_subset_filter() {
        // Oracle: every subset of size ≥ 2 of S_1 over a 3-antichain, filtered.
        let (mut u, m) = antichain3();
        let h = Hierarchy::build(&m, 1, DEFAULT_BUDGET, &mut u).unwrap();
        let top = h.top().to_vec();
        let mut brute = Vec::new();
        for mask in 0u32..(1 << top.len()) {
            let s: Vec<Id> = (0..top.len()).filter(|i| mask >> i & 1 == 1).map(|i| top[i]).collect();
            if s.len() >= 2 && u.is_antichain(&s) {
                brute.push(s);
            }
        }
        let mut found = enumerate_nontrivial_antichains(&top, &u, None).unwrap();
        brute.sort();
        found.sort();
        assert_eq!(found, brute);
        assert_eq!(found.len(), 18);
    }

    #[test]
    fn build_small_stages() {
        let (mut u, m) = abstract_product_base();
        let h0 = Hierarchy::build(&m, 0, DEFAULT_BUDGET, &mut u).unwrap();
        assert_eq!(h0.levels(), &[m.to_vec()]);
        let h = Hierarchy::build(&m, 2, DEFAULT_BUDGET, &mut u).unwrap();
        assert_eq!(h.level(1).unwrap().len(), 8);
        assert_eq!(h.growth_stats(), vec![4, 14]);
    }

    #[test]
    fn budget_exhaustion_reports_partial_result() {
        let (mut u, m) = abstract_product_base();
        match Hierarchy::build(&m, 2, 10, &mut u) {
            Err(Error::BudgetExhausted { stage, limit, partial }) => {
                assert_eq!((stage, limit), (2, 10));
                assert_eq!(partial.unwrap().depth(), 1);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn stage_properties_and_negative_control() {
        let (mut u, m) = abstract_product_base();
        let h = Hierarchy::build(&m, 2, DEFAULT_BUDGET, &mut u).unwrap();
        let report = verify_stage_properties(&h, &u);
        assert!(report.passed(), "{report:?}");

        let single = Hierarchy::build(&m, 0, DEFAULT_BUDGET, &mut u).unwrap();
        assert!(verify_stage_properties(&single, &u).passed());

        let mut levels = h.levels().to_vec();
        levels[1].retain(|&x| x != m[0]);
        let broken = Hierarchy::from_parts(h.base().to_vec(), levels, h.budget());
        let report = verify_stage_properties(&broken, &u);
        assert!(!report.checks[1].downset);
        assert!(!report.passed());
    }

    #[test]
    fn restriction_examples() {
        let (mut u, m) = antichain3();
        let r = verify_restriction(&m[..2], &m, 2, DEFAULT_BUDGET, &mut u).unwrap();
        assert_eq!(r.restriction, vec![true; 3]);
        assert!(r.passed());

        let r = verify_restriction(&m, &m, 1, DEFAULT_BUDGET, &mut u).unwrap();
        assert_eq!(r.offset, Some(0));

        let d12 = u.intern(&[m[0], m[1]]).unwrap();
        let d23 = u.intern(&[m[1], m[2]]).unwrap();
        let r = verify_restriction(&[d12, d23], &m, 1, DEFAULT_BUDGET, &mut u).unwrap();
        assert!(r.restriction.is_empty());
        assert_eq!(r.base_stage, Some(1));
        assert_eq!(r.offset, Some(1));
    }

    #[test]
    fn pairs_and_fans() {
        let (mut u, m) = antichain3();
        let h = Hierarchy::build(&m[..2], 1, DEFAULT_BUDGET, &mut u).unwrap();
        let d12 = u.find(&[m[0], m[1]]).unwrap();
        let p = pair_with(&h, d12, m[2], &mut u).unwrap();
        assert!(u.is_nontrivial_antichain(u.children(p)));

        let a = h.top().to_vec();
        let f = fan(&h, &a, m[2], &mut u).unwrap();
        assert_eq!(f.len(), a.len());
        assert!(u.is_antichain(&f));

        let h1 = Hierarchy::build(&m[..1], 0, DEFAULT_BUDGET, &mut u).unwrap();
        assert!(matches!(pair_with(&h1, m[0], m[0], &mut u), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn growth_witness_small_depth() {
        let (mut u, m) = antichain3();
        let w = growth_witness(m, 2, DEFAULT_BUDGET, &mut u).unwrap();
        assert_eq!(w.growth, vec![4, 14]);
        assert_eq!(w.fans[0].fan_size, 3);
        assert_eq!(w.fans[1].fan_size, 7);
        assert!(w.passed());
    }

    #[test]
    fn json_round_trip_rebuilds_same_levels() {
        let (mut u, m) = abstract_product_base();
        let h = Hierarchy::build(&m, 2, DEFAULT_BUDGET, &mut u).unwrap();
        let json = serde_json::to_string(&h.to_json(&u)).unwrap();
        let (back, mut v) = Hierarchy::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, h);
        let rebuilt = Hierarchy::build(back.base(), 2, DEFAULT_BUDGET, &mut v).unwrap();
        assert_eq!(rebuilt.levels(), h.levels());
    }
}
