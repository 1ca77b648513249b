//! Exhaustive verification suites.
//!
//! Each suite runs a family of checks over every small instance (and a seeded
//! sample where exhaustion is out of reach) and returns a [`SuiteReport`]
//! with case and violation counts. Reports contain no timing data, so equal
//! configurations give equal reports.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::heyting::{fullness_check, verify_adjunction_unit, DownsetAlgebra};
use crate::hierarchy::{
    fan, growth_witness, pair_with, verify_restriction, verify_stage_properties, Hierarchy, DEFAULT_BUDGET,
};
use crate::hsets::{abstract_product_base, BasePoset};
use crate::kripke::{
    all_frames, closure_iff_preorder, complex_algebra, coreflect, coreflect_fast, is_pmorphism, powerset_fullness,
    random_frame, verify_bao_adjunction, verify_coreflection, KripkeFrame,
};
use crate::maps::{
    all_functions, injectivity_experiment, is_monotone, is_open_v1, is_open_v2, is_open_v3, product_obstruction,
    projection_pairs, ObstructionVerdict, PointMap, DEFAULT_SEARCH_BUDGET,
};
use crate::order::{
    enumerate_posets, enumerate_preorders, is_subset, labeled_preorders, materialize, poset_iso, random_preorder,
    sierpinski, singleton, FinitePreorder, PreorderJson,
};
use crate::{Error, Id, Result, Universe};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_SAMPLES: usize = 10_000;
const MAX_WITNESSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma23,
    Lemma24,
    Lemma31,
    Lemma32,
    Thm26,
    Coreflect,
    Duality,
    Bao,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lemma23,
        Suite::Lemma24,
        Suite::Lemma31,
        Suite::Lemma32,
        Suite::Thm26,
        Suite::Coreflect,
        Suite::Duality,
        Suite::Bao,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma23 => "lemma23",
            Suite::Lemma24 => "lemma24",
            Suite::Lemma31 => "lemma31",
            Suite::Lemma32 => "lemma32",
            Suite::Thm26 => "thm26",
            Suite::Coreflect => "coreflect",
            Suite::Duality => "duality",
            Suite::Bao => "bao",
        }
    }

    /// Hierarchy depth used when none is given.
    pub fn default_depth(self) -> usize {
        match self {
            Suite::Lemma32 => 1,
            Suite::Thm26 => 3,
            _ => 2,
        }
    }

    /// Size bound for preorders and posets when none is given.
    pub fn default_max_size(self) -> usize {
        match self {
            Suite::Lemma32 => 5,
            Suite::Duality => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub depth: usize,
    pub budget: usize,
    pub search_budget: u64,
    pub seed: u64,
    pub max_size: usize,
    pub states: usize,
    pub samples: usize,
}

impl SuiteConfig {
    pub fn for_suite(suite: Suite) -> Self {
        Self {
            depth: suite.default_depth(),
            budget: DEFAULT_BUDGET,
            search_budget: DEFAULT_SEARCH_BUDGET,
            seed: DEFAULT_SEED,
            max_size: suite.default_max_size(),
            states: 3,
            samples: DEFAULT_SAMPLES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: u64,
    pub violations: u64,
    pub witnesses: Vec<String>,
    pub details: Value,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    violations: u64,
    witnesses: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    fn finish(self, suite: Suite, details: Value) -> SuiteReport {
        SuiteReport { suite, cases: self.cases, violations: self.violations, witnesses: self.witnesses, details }
    }
}

pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Lemma23 => lemma23(cfg),
        Suite::Lemma24 => lemma24(cfg),
        Suite::Lemma31 => lemma31(cfg),
        Suite::Lemma32 => lemma32(cfg),
        Suite::Thm26 => thm26(cfg),
        Suite::Coreflect => coreflect_suite(cfg),
        Suite::Duality => duality(cfg),
        Suite::Bao => bao(cfg),
    }
}

/// A universe over the antichain `{m1, m2, m3}` and its atoms.
pub fn antichain3_base() -> (Universe, [Id; 3]) {
    let u = Universe::new(BasePoset::antichain(["m1", "m2", "m3"]).expect("valid labels"));
    (u, [Id(0), Id(1), Id(2)])
}

fn seeded(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

fn lemma23(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut growth = serde_json::Map::new();

    let (mut u, m) = abstract_product_base();
    let h = Hierarchy::build(&m, cfg.depth, cfg.budget, &mut u)?;
    stage_checks(&mut t, "thm33", &h, &u);
    growth.insert("thm33".into(), json!(h.growth_stats()));
    let r = verify_restriction(&m[1..3], &m[1..], cfg.depth, cfg.budget, &mut u)?;
    t.check(r.passed(), || format!("thm33: restriction {{m1,m2}} ⊆ {{m1,m2,m3}} failed: {r:?}"));
    negative_controls(&mut t, "thm33", &h, &u);

    let (mut u, m) = antichain3_base();
    let h = Hierarchy::build(&m, cfg.depth, cfg.budget, &mut u)?;
    stage_checks(&mut t, "antichain3", &h, &u);
    growth.insert("antichain3".into(), json!(h.growth_stats()));
    for sub in [&m[..2], &m[1..], &m[..1], &m[..]] {
        let r = verify_restriction(sub, &m, cfg.depth, cfg.budget, &mut u)?;
        t.check(r.passed(), || format!("antichain3: restriction to {} atoms failed: {r:?}", sub.len()));
    }
    let doubletons = [u.intern(&[m[0], m[1]])?, u.intern(&[m[1], m[2]])?];
    let r = verify_restriction(&doubletons, &m, cfg.depth, cfg.budget, &mut u)?;
    t.check(r.passed() && r.base_stage == Some(1), || format!("antichain3: doubleton containment failed: {r:?}"));
    negative_controls(&mut t, "antichain3", &h, &u);

    Ok(t.finish(Suite::Lemma23, json!({ "depth": cfg.depth, "growth": growth })))
}

fn stage_checks(t: &mut Tally, label: &str, h: &Hierarchy, u: &Universe) {
    let report = verify_stage_properties(h, u);
    for c in &report.checks {
        let ok = c.downset && c.fresh_antichain != Some(false) && c.freshness != Some(false);
        t.check(ok, || format!("{label}: stage {}: {}", c.stage, c.witness.clone().unwrap_or_default()));
    }
}

/// Corrupted hierarchies must be rejected; a control that passes counts as a
/// violation.
fn negative_controls(t: &mut Tally, label: &str, h: &Hierarchy, u: &Universe) {
    if h.depth() < 1 {
        return;
    }
    let mut levels = h.levels().to_vec();
    let dropped = h.base()[0];
    levels[1].retain(|&x| x != dropped);
    let broken = Hierarchy::from_parts(h.base().to_vec(), levels, h.budget());
    t.check(!verify_stage_properties(&broken, u).passed(), || {
        format!("{label}: stage 1 missing a base element passed the stage checks")
    });

    if h.depth() >= 2 {
        let mut levels = h.levels().to_vec();
        // Move a stage-1 set up into stage 2 only.
        if let Some(x) = h.fresh(1).first().copied() {
            levels[1].retain(|&y| y != x);
            let broken = Hierarchy::from_parts(h.base().to_vec(), levels, h.budget());
            t.check(!verify_stage_properties(&broken, u).passed(), || {
                format!("{label}: hierarchy with a displaced stage-1 set passed the stage checks")
            });
        }
    }
}

fn lemma24(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let (mut u, m) = antichain3_base();
    let mut fans = Vec::new();
    for (sub, extra) in [(&m[..2], m[2]), (&m[1..], m[0]), (&m[..1], m[1])] {
        let mut h = Hierarchy::build(sub, 0, cfg.budget, &mut u)?;
        for d in 0..=cfg.depth {
            if d > 0 {
                h.extend_one(&mut u)?;
            }
            let source = h.top().to_vec();
            let pairs_ok = source
                .iter()
                .all(|&x| pair_with(&h, x, extra, &mut u).is_ok_and(|p| u.is_nontrivial_antichain(u.children(p))));
            t.check(pairs_ok, || format!("pair with {} failed at depth {d}", u.render(extra)));
            let f = fan(&h, &source, extra, &mut u);
            let ok = f.as_ref().is_ok_and(|f| f.len() == source.len() && u.is_antichain(f));
            t.check(ok, || format!("fan against {} at depth {d}: {f:?}", u.render(extra)));
            fans.push(json!({ "base_size": sub.len(), "depth": d, "fan_size": source.len() }));
        }
        // Hypothesis controls: m' already in M must be rejected.
        t.check(pair_with(&h, sub[0], sub[0], &mut u).is_err(), || "pair with a base element was accepted".into());
    }
    let w = growth_witness(m, cfg.depth, cfg.budget, &mut u)?;
    for fs in &w.fans {
        t.check(fs.is_antichain && fs.fan_size == fs.source_size && fs.fan_size >= 3, || {
            format!("doubleton fan at depth {}: {fs:?}", fs.depth)
        });
    }
    Ok(t.finish(Suite::Lemma24, json!({ "depth": cfg.depth, "fans": fans, "doubleton_fans": w.fans })))
}

fn thm26(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let (mut u, m) = antichain3_base();
    let w = growth_witness(m, cfg.depth, cfg.budget, &mut u)?;
    for (alpha, &g) in w.growth.iter().enumerate() {
        t.check(g >= 3, || format!("|S_{} \\ S_{alpha}| = {g} < 3", alpha + 1));
    }
    if let Some(&g) = w.growth.first() {
        t.check(g == 4, || format!("level-1 difference is {g}, expected 4"));
    }
    for fs in &w.fans {
        t.check(fs.is_antichain && fs.fan_size >= 3, || format!("fan at depth {}: {fs:?}", fs.depth));
    }
    Ok(t.finish(Suite::Thm26, json!({ "depth": cfg.depth, "budget": cfg.budget, "growth": w.growth, "fans": w.fans })))
}

/// The three openness conditions agree on monotone maps.
fn lemma31(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let exhaustive_size = cfg.max_size.min(3);
    let preorders: Vec<FinitePreorder> = (0..=exhaustive_size)
        .map(labeled_preorders)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut monotone = 0u64;
    let mut open = 0u64;
    for p in &preorders {
        for q in &preorders {
            for f in all_functions(p.size(), q.size()) {
                if !is_monotone(p, q, &f) {
                    continue;
                }
                monotone += 1;
                let v = [is_open_v1(p, q, &f), is_open_v2(p, q, &f), is_open_v3(p, q, &f)];
                open += u64::from(v[0]);
                t.check(v[0] == v[1] && v[1] == v[2], || disagreement(p, q, &f, v));
            }
        }
    }

    let mut rng = seeded(cfg, 31);
    let mut sampled_open = 0u64;
    for _ in 0..cfg.samples {
        let n = rng.gen_range(4..=5);
        let m = rng.gen_range(4..=5);
        let p = random_preorder(n, rng.gen_range(0.1..0.6), &mut rng);
        let q = random_preorder(m, rng.gen_range(0.1..0.6), &mut rng);
        let f = loop {
            let f = PointMap::new((0..n).map(|_| rng.gen_range(0..m)).collect());
            if is_monotone(&p, &q, &f) {
                break f;
            }
        };
        let v = [is_open_v1(&p, &q, &f), is_open_v2(&p, &q, &f), is_open_v3(&p, &q, &f)];
        sampled_open += u64::from(v[0]);
        t.check(v[0] == v[1] && v[1] == v[2], || disagreement(&p, &q, &f, v));
    }
    Ok(t.finish(
        Suite::Lemma31,
        json!({
            "exhaustive_max_size": exhaustive_size,
            "preorders": preorders.len(),
            "monotone_maps": monotone,
            "open_maps": open,
            "samples": cfg.samples,
            "sample_sizes": [4, 5],
            "sampled_open": sampled_open,
            "seed": cfg.seed,
        }),
    ))
}

fn disagreement(p: &FinitePreorder, q: &FinitePreorder, f: &PointMap, v: [bool; 3]) -> String {
    format!(
        "P={} Q={} f={:?}: definition={} image={} preimage={}",
        p.to_json().relation,
        q.to_json().relation,
        f.table,
        v[0],
        v[1],
        v[2]
    )
}

fn lemma32(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let (mut u, m) = abstract_product_base();
    let h = Hierarchy::build(&m, cfg.depth, cfg.budget, &mut u)?;
    let stage = materialize(&h, cfg.depth, &u)?;
    let mut per_size = Vec::new();
    for n in 1..=cfg.max_size {
        let (mut opens, mut injective_on_base, mut examined) = (0, 0, 0);
        for p in enumerate_posets(n)? {
            let r = injectivity_experiment(&stage, &m, &p, cfg.search_budget)?;
            opens += r.open_maps;
            injective_on_base += r.injective_on_base;
            examined += r.candidates_examined;
            t.check(r.violations == 0, || {
                format!("P={}: {} maps injective on M but not on the stage, e.g. {:?}", p.to_json().relation, r.violations, r.witnesses)
            });
        }
        per_size.push(json!({
            "size": n,
            "open_maps": opens,
            "injective_on_base": injective_on_base,
            "candidates_examined": examined,
        }));
    }
    // Small targets admit no map injective on M, so also map into the stage
    // itself and into the stage with an isolated point added.
    let k = stage.ids.len();
    let plus_point = FinitePreorder::from_fn(k + 1, |a, b| a == b || (a < k && b < k && stage.poset.leq(a, b)))?;
    let mut larger = Vec::new();
    for (name, target) in [("stage", &stage.poset), ("stage_plus_point", &plus_point)] {
        let r = injectivity_experiment(&stage, &m, target, cfg.search_budget)?;
        t.check(r.violations == 0 && r.injective_on_base > 0, || {
            format!("{name}: {} of {} maps injective on M fail injectivity", r.violations, r.injective_on_base)
        });
        larger.push(json!({ "target": name, "open_maps": r.open_maps, "injective_on_base": r.injective_on_base }));
    }
    Ok(t.finish(
        Suite::Lemma32,
        json!({ "stage": cfg.depth, "stage_size": k, "per_size": per_size, "larger_targets": larger }),
    ))
}

fn coreflect_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let preorders: Vec<FinitePreorder> = (1..=cfg.max_size.min(3))
        .map(enumerate_preorders)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut frames = 0u64;
    let mut pmorphisms = 0u64;
    for n in 0..=cfg.states {
        for f in all_frames(n)? {
            frames += 1;
            let slow = coreflect(&f)?;
            t.check(slow == coreflect_fast(&f), || format!("fast coreflection differs on {}", f.to_json().relation));
            for p in &preorders {
                let r = verify_coreflection(&f, p)?;
                pmorphisms += r.pmorphisms as u64;
                t.check(r.passed(), || {
                    format!("F={} P={}: {r:?}", f.to_json().relation, p.to_json().relation)
                });
            }
        }
    }

    // Open maps between preorders are p-morphisms between their opposites.
    let bridge: Vec<FinitePreorder> = (1..=cfg.states.min(4))
        .map(enumerate_preorders)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut bridge_maps = 0u64;
    for p in &bridge {
        let fp = KripkeFrame::of_opposite(p);
        for q in &bridge {
            let fq = KripkeFrame::of_opposite(q);
            for g in all_functions(p.size(), q.size()) {
                bridge_maps += 1;
                let (open, pm) = (is_open_v1(p, q, &g), is_pmorphism(&g, &fp, &fq));
                t.check(open == pm, || {
                    format!("P={} Q={} f={:?}: open={open} p-morphism={pm}", p.to_json().relation, q.to_json().relation, g.table)
                });
            }
        }
    }
    Ok(t.finish(
        Suite::Coreflect,
        json!({
            "states": cfg.states,
            "frames": frames,
            "preorders": preorders.len(),
            "pmorphisms": pmorphisms,
            "bridge_preorders": bridge.len(),
            "bridge_maps": bridge_maps,
        }),
    ))
}

fn duality(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let posets: Vec<FinitePreorder> = (0..=cfg.max_size)
        .map(enumerate_posets)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut residuals = 0u64;
    for p in &posets {
        let name = p.to_json().relation;
        t.check(verify_adjunction_unit(p)?, || format!("L(O(P)) is not P for P={name}"));

        let algebra = DownsetAlgebra::new(p.clone())?;
        if p.size() <= 4 {
            for &a in algebra.elements() {
                for &b in algebra.elements() {
                    residuals += 1;
                    let closed = algebra.implies(a, b);
                    t.check(algebra.implies_brute(a, b) == Some(closed), || {
                        format!("P={name}: {a:b} → {b:b} closed form {closed:b}")
                    });
                }
            }
        }

        // Birkhoff: the inclusion order on O(P) is represented back by P.
        let el = algebra.elements();
        let lattice = FinitePreorder::from_fn(el.len(), |a, b| is_subset(el[a], el[b]))?;
        let ok = DownsetAlgebra::from_lattice(&lattice)
            .and_then(|(back, _)| poset_iso(back.base(), p))
            .is_ok_and(|iso| iso.is_some());
        t.check(ok, || format!("Birkhoff representation of O(P) is not P for P={name}"));
    }

    let s = DownsetAlgebra::new(sierpinski())?;
    let not_not = s.neg(s.neg(singleton(0)));
    t.check(not_not == s.top(), || format!("¬¬{{0}} = {not_not:b} in O(Sierpiński)"));

    let small: Vec<&FinitePreorder> = posets.iter().filter(|p| p.size() <= 3).collect();
    let mut pairs = 0u64;
    for p in &small {
        for q in &small {
            pairs += 1;
            let r = fullness_check(p, q)?;
            t.check(r.passed(), || format!("P={} Q={}: {r:?}", p.to_json().relation, q.to_json().relation));
        }
    }
    Ok(t.finish(
        Suite::Duality,
        json!({
            "max_size": cfg.max_size,
            "posets": posets.len(),
            "residual_pairs": residuals,
            "fullness_pairs": pairs,
        }),
    ))
}

fn bao(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut t = Tally::default();
    let mut frames = 0u64;
    for n in 0..=cfg.states {
        for f in all_frames(n)? {
            frames += 1;
            let name = f.to_json().relation;
            t.check(closure_iff_preorder(&f)?, || format!("closure algebra test disagrees with preorder on {name}"));
            let a = complex_algebra(&f);
            t.check(a.is_closure_algebra()? == a.is_closure_algebra_on_atoms(), || {
                format!("atom reduction disagrees on {name}")
            });
            t.check(verify_bao_adjunction(&f)?, || format!("L(℘(F)) is not F for F={name}"));
        }
    }

    let mut rng = seeded(cfg, 5);
    let mut sampled_preorders = 0u64;
    for _ in 0..cfg.samples {
        let f = random_frame(5, rng.gen_range(0.2..0.9), &mut rng);
        sampled_preorders += u64::from(f.is_preorder());
        t.check(closure_iff_preorder(&f)?, || format!("closure algebra test disagrees on {}", f.to_json().relation));
    }

    let mut algebras = 0u64;
    for n in 0..=4 {
        for f in all_frames(n)? {
            algebras += 1;
            let a = complex_algebra(&f);
            let failures = a.box_diamond_failures()?;
            t.check(failures == 0, || format!("□a ∧ ◇b ≰ ◇(a ∧ b) in {failures} pairs of {:?}", a.to_json()));
        }
    }

    let small: Vec<KripkeFrame> =
        (0..=cfg.states.min(2)).map(all_frames).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let mut fullness_pairs = 0u64;
    for f in &small {
        for g in &small {
            fullness_pairs += 1;
            let r = powerset_fullness(f, g)?;
            t.check(r.matched, || format!("F={} G={}: {r:?}", f.to_json().relation, g.to_json().relation));
        }
    }
    Ok(t.finish(
        Suite::Bao,
        json!({
            "states": cfg.states,
            "frames": frames,
            "samples": cfg.samples,
            "sample_states": 5,
            "sampled_preorders": sampled_preorders,
            "seed": cfg.seed,
            "box_diamond_algebras": algebras,
            "fullness_pairs": fullness_pairs,
        }),
    ))
}

/// Named small posets accepted by the obstruction driver.
pub fn named_poset(name: &str) -> Result<FinitePreorder> {
    let s = sierpinski();
    match name {
        "singleton" => Ok(FinitePreorder::discrete(1)),
        "sierpinski" => Ok(s),
        "product2x2" => s.product(&s),
        "chain3" => Ok(FinitePreorder::chain(3)),
        "discrete2" => Ok(FinitePreorder::discrete(2)),
        _ => Err(Error::Invalid(format!(
            "unknown poset {name:?}; expected singleton, sierpinski, product2x2, chain3 or discrete2"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionCase {
    pub poset: PreorderJson,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub verdict: ObstructionVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub depth: usize,
    pub cases: usize,
    pub refuted: usize,
    /// Highest certificate stage among refuted cases.
    pub max_certificate_stage: usize,
    pub results: Vec<ObstructionCase>,
}

impl ObstructionReport {
    pub fn all_refuted(&self) -> bool {
        self.refuted == self.cases
    }
}

/// Run the product obstruction for every pair of open maps `P → Sierpiński`
/// on each poset, against stages `1..=depth` over the four-point base.
pub fn obstruct(posets: &[FinitePreorder], depth: usize, budget: usize, search_budget: u64) -> Result<ObstructionReport> {
    if depth == 0 {
        return Err(Error::Invalid("obstruction needs depth at least 1".into()));
    }
    if let Some(p) = posets.iter().find(|p| !p.is_poset()) {
        return Err(Error::NotPoset(p.to_json().relation));
    }
    let (mut u, m) = abstract_product_base();
    let h = Hierarchy::build(&m, depth, budget, &mut u)?;
    let mut results = Vec::new();
    for p in posets {
        for (p1, p2) in projection_pairs(p)? {
            let verdict = product_obstruction(p, &p1, &p2, &h, &m, depth, &u, search_budget)?;
            results.push(ObstructionCase { poset: p.to_json(), p1: p1.table, p2: p2.table, verdict });
        }
    }
    let refuted: Vec<&ObstructionCase> = results.iter().filter(|c| c.verdict.refuted()).collect();
    Ok(ObstructionReport {
        depth,
        cases: results.len(),
        refuted: refuted.len(),
        max_certificate_stage: refuted.iter().map(|c| c.verdict.stage).max().unwrap_or(0),
        results,
    })
}

/// Iso classes of posets with `1..=n` elements.
pub fn posets_up_to(n: usize) -> Result<Vec<FinitePreorder>> {
    Ok((1..=n).map(enumerate_posets).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(suite: Suite) -> SuiteConfig {
        SuiteConfig { samples: 200, ..SuiteConfig::for_suite(suite) }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma99".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in [Suite::Lemma23, Suite::Lemma24, Suite::Lemma31, Suite::Duality] {
            let r = run(s, &SuiteConfig { max_size: 3, ..quick(s) }).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn negative_controls_count_as_cases() {
        let r = run(Suite::Lemma23, &quick(Suite::Lemma23)).unwrap();
        // Two stage checks per base and depth, restriction checks, controls.
        assert!(r.cases >= 2 * 3 + 6 + 4, "{}", r.cases);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SuiteConfig { states: 2, ..quick(Suite::Bao) };
        let a = serde_json::to_string(&run(Suite::Bao, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run(Suite::Bao, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn obstruction_on_named_posets() {
        let r = obstruct(&[named_poset("product2x2").unwrap()], 2, DEFAULT_BUDGET, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(r.all_refuted());
        let identity = r.results.iter().find(|c| c.p1 == [0, 0, 1, 1] && c.p2 == [0, 1, 0, 1]).unwrap();
        assert_eq!(identity.verdict.stage, 1);
        assert!(named_poset("nope").is_err());
        assert!(obstruct(&[FinitePreorder::closure(2, &[(0, 1), (1, 0)]).unwrap()], 1, 10, 10).is_err());
    }
}
