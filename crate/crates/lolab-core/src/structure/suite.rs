//! Runs the recolouring lemmas and the structure results over every
//! polymorphism up to a small arity and over hand-built families above it.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dictating_variables, kneser_check, verify_structure_theorem, Conformance};
use crate::error::{Error, Result};
use crate::families::{reconfig_walk, saturated_projection, BlockFamily};
use crate::minors::{apply_minor, MinorMap};
use crate::polymorph::{for_each_polymorphism, projection, Filter, PolyChecker};
use crate::recolour::{
    enumerate_pure_saturations, has_small_2set, is_saturated, is_static, is_static_by_recolouring, lo3,
    minimal_2sets, saturate, static_sets, t_union, two_recolourable, Pick, Policy, PureSaturations,
};
use crate::sets::{submasks, PolyTable};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LemmaId {
    /// Static iff part of a boolean partition.
    Static,
    /// 2-sets pairwise intersect, and 2-recolourable iff meeting every 2-set.
    TwoSet,
    UpwardsClosure,
    Complementarity,
    /// Saturations exist; pure ones from arity 7 without small 2-sets.
    Lift,
    /// For saturated tables: static iff meeting `T_f`.
    BooleanRecolouring,
    /// 2-sets split into two boolean sets are of exactly one type.
    Type,
    /// Sets recoloured on the way to a pure saturation.
    UniqueSaturation,
    Kneser,
    /// Unique dictating variable at arity at most 6.
    SmallArity,
    /// Unique dictating variable shared by all pure saturations, arity 7 and up.
    Structure,
    /// No disjoint static 1-sets and a singleton static 1-set when `[n]` is
    /// covered by 4-element 2-sets.
    MinimalCounterexample,
    NonUnique,
    HittingSet,
    SaturationCommutes,
}

impl LemmaId {
    pub const ALL: [LemmaId; 15] = [
        LemmaId::Static,
        LemmaId::TwoSet,
        LemmaId::UpwardsClosure,
        LemmaId::Complementarity,
        LemmaId::Lift,
        LemmaId::BooleanRecolouring,
        LemmaId::Type,
        LemmaId::UniqueSaturation,
        LemmaId::Kneser,
        LemmaId::SmallArity,
        LemmaId::Structure,
        LemmaId::MinimalCounterexample,
        LemmaId::NonUnique,
        LemmaId::HittingSet,
        LemmaId::SaturationCommutes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Static => "static",
            LemmaId::TwoSet => "two-set",
            LemmaId::UpwardsClosure => "upwards-closure",
            LemmaId::Complementarity => "complementarity",
            LemmaId::Lift => "lift",
            LemmaId::BooleanRecolouring => "boolean-recolouring",
            LemmaId::Type => "type",
            LemmaId::UniqueSaturation => "unique-saturation",
            LemmaId::Kneser => "kneser",
            LemmaId::SmallArity => "small-arity",
            LemmaId::Structure => "structure",
            LemmaId::MinimalCounterexample => "minimal-counterexample",
            LemmaId::NonUnique => "non-unique",
            LemmaId::HittingSet => "hitting-set",
            LemmaId::SaturationCommutes => "saturation-commutes",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub arity: usize,
    pub instances: u64,
    pub violations: u64,
    pub first_counterexample: Option<PolyTable>,
    /// `false` if a search feeding this lemma ran out of budget.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Exhaustive part covers arities `1..=max_arity`, at most 4.
    pub max_arity: usize,
    /// Node budget for each exhaustive enumeration.
    pub budget: u64,
    /// Node budget for each pure-saturation search on a family member.
    pub pure_budget: u64,
    pub seed: u64,
    /// Random reconfiguration walks started from each family member.
    pub walks: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { max_arity: 4, budget: u64::MAX, pure_budget: 20_000, seed: 0x10_23, walks: 2 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    /// Sorted by lemma, then arity.
    pub reports: Vec<LemmaReport>,
}

impl SuiteReport {
    pub fn violations(&self) -> u64 {
        self.reports.iter().map(|r| r.violations).sum()
    }

    pub fn complete(&self) -> bool {
        self.reports.iter().all(|r| r.complete)
    }

    pub fn get(&self, lemma: LemmaId, arity: usize) -> Option<&LemmaReport> {
        self.reports.iter().find(|r| r.lemma == lemma && r.arity == arity)
    }

    /// Instances and violations of one lemma summed over arities.
    pub fn totals(&self, lemma: LemmaId) -> (u64, u64) {
        self.reports.iter().filter(|r| r.lemma == lemma).fold((0, 0), |(i, v), r| (i + r.instances, v + r.violations))
    }
}

#[derive(Default)]
struct Tally {
    entries: BTreeMap<(LemmaId, usize), LemmaReport>,
}

impl Tally {
    fn entry(&mut self, lemma: LemmaId, arity: usize) -> &mut LemmaReport {
        self.entries.entry((lemma, arity)).or_insert(LemmaReport {
            lemma,
            arity,
            instances: 0,
            violations: 0,
            first_counterexample: None,
            complete: true,
        })
    }

    fn record(&mut self, lemma: LemmaId, f: &PolyTable, ok: bool) {
        let e = self.entry(lemma, f.arity());
        e.instances += 1;
        if !ok {
            e.violations += 1;
            if e.first_counterexample.is_none() {
                e.first_counterexample = Some(f.clone());
            }
        }
    }

    fn incomplete(&mut self, lemma: LemmaId, arity: usize) {
        self.entry(lemma, arity).complete = false;
    }
}

/// Lemma checks that apply to every polymorphism of `(LO_2, LO_3)`.
struct General<'a> {
    checker: PolyChecker<'a>,
}

impl General<'_> {
    fn run(&self, f: &PolyTable, tally: &mut Tally) -> Result<()> {
        let n = f.arity();
        let full = f.full_mask();
        let size = full + 1;
        let twos: Vec<usize> = f.sets_with_value(2).collect();

        tally.record(LemmaId::Kneser, f, kneser_check(f));

        // static, both characterisations
        for x in (0..size).filter(|&x| f.is_boolean(x)) {
            let s = f.mask(x);
            tally.record(LemmaId::Static, f, is_static(f, s)? == is_static_by_recolouring(f, s)?);
        }

        // 2-sets: intersecting family, empty set excluded, recolourability equivalence
        let intersecting = f[0] != 2 && twos.iter().all(|&a| twos.iter().all(|&b| a & b != 0));
        tally.record(LemmaId::TwoSet, f, intersecting);
        for x in (0..size).filter(|&x| f.is_boolean(x)) {
            let by_lemma = two_recolourable(f, f.mask(x))?;
            tally.record(LemmaId::TwoSet, f, by_lemma == self.checker.holds_with(f, x, 2)?);
        }

        // boolean supersets of 2-sets are 2-recolourable
        let mut contains = vec![false; size];
        for m in 0..size {
            contains[m] = f[m] == 2 || (0..n).any(|b| m >> b & 1 == 1 && contains[m ^ 1 << b]);
            if contains[m] && f.is_boolean(m) {
                tally.record(LemmaId::UpwardsClosure, f, self.checker.holds_with(f, m, 2)?);
            }
        }

        // complementary boolean pairs of the upward closure
        let mut closed = f.clone();
        for m in (0..size).filter(|&m| contains[m]) {
            closed = closed.with_value(m, 2)?;
        }
        tally.record(LemmaId::UpwardsClosure, f, self.checker.holds(&closed)?);
        for x in 1..=full / 2 {
            let y = full ^ x;
            if closed.is_boolean(x) && closed.is_boolean(y) {
                let both = self.checker.holds_with(&closed, x, 2)? && self.checker.holds_with(&closed, y, 2)?;
                tally.record(LemmaId::Complementarity, f, both);
            }
        }

        // saturation under two policies, then static sets of the result
        let no_small = !has_small_2set(f);
        for policy in [Policy::DeterministicLarge, Policy::Choices(vec![Pick::Lower; size])] {
            let r = saturate(f, &policy)?;
            let mut ok = is_saturated(&r.result) && r.replay(f)?;
            if policy == Policy::DeterministicLarge && n >= 7 && no_small {
                ok &= r.pure;
            }
            tally.record(LemmaId::Lift, f, ok);
            let g = &r.result;
            let t = t_union(g).index();
            let flags = static_sets(g)?;
            for x in (0..size).filter(|&x| g.is_boolean(x)) {
                tally.record(LemmaId::BooleanRecolouring, f, flags[x] == (x & t != 0));
            }
        }

        // types of 2-sets split into two boolean sets
        for &t in &twos {
            let (mut zero_one, mut zero_zero, mut one_one) = (false, false, false);
            for a in submasks(t) {
                let b = t ^ a;
                if a > b || !f.is_boolean(a) || !f.is_boolean(b) {
                    continue;
                }
                match f[a] + f[b] {
                    0 => zero_zero = true,
                    1 => zero_one = true,
                    _ => one_one = true,
                }
            }
            if zero_one || zero_zero || one_one {
                tally.record(LemmaId::Type, f, !one_one && !(zero_one && zero_zero));
            }
        }

        if no_small && n <= 6 {
            tally.record(LemmaId::SmallArity, f, dictating_variables(f)?.len() == 1);
        }

        if no_small && covered_by_four_sets(f) {
            let flags = static_sets(f)?;
            // the empty set is a static 1-set whenever f(∅) = 1 and is disjoint
            // from everything, so only non-empty sets count
            let ones: Vec<usize> = (1..size).filter(|&x| flags[x] && f[x] == 1).collect();
            let disjoint = ones.iter().any(|&a| ones.iter().any(|&b| a & b == 0));
            let singleton = ones.iter().any(|&a| a.count_ones() == 1);
            tally.record(LemmaId::MinimalCounterexample, f, !disjoint && singleton);
        }
        Ok(())
    }
}

/// `[n]` is the union of the 4-element 2-sets.
fn covered_by_four_sets(f: &PolyTable) -> bool {
    let cover = f.sets_with_value(2).filter(|m| m.count_ones() == 4).fold(0, |acc, m| acc | m);
    cover == f.full_mask()
}

fn iverson(t: usize, s: usize) -> u8 {
    (s >> (t - 1) & 1) as u8
}

/// Checks that need the pure saturations of an arity >= 7 table.
fn run_high_arity(f: &PolyTable, pure: &PureSaturations, budget: u64, tally: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = f.arity();
    let size = f.full_mask() + 1;
    if !pure.complete {
        for lemma in [LemmaId::UniqueSaturation, LemmaId::Structure, LemmaId::HittingSet] {
            tally.incomplete(lemma, n);
        }
    }
    let verdict = verify_structure_theorem(f, budget)?;
    match verdict.conformance {
        Conformance::Unknown => tally.incomplete(LemmaId::Structure, n),
        Conformance::HypothesisUnmet => {}
        c => tally.record(LemmaId::Structure, f, c == Conformance::Conforms),
    }

    // recoloured sets on the way to each pure saturation
    let mut contains = vec![false; size];
    for m in 0..size {
        contains[m] = f[m] == 2 || (0..n).any(|b| m >> b & 1 == 1 && contains[m ^ 1 << b]);
    }
    let forced = |x: usize| x.count_ones() as usize + 3 >= n || contains[x];
    for g in &pure.tables {
        let ok = (0..size).filter(|&x| f.is_boolean(x) && forced(x)).all(|x| g[x] != f[x]);
        tally.record(LemmaId::UniqueSaturation, f, ok);
    }
    if pure.complete && pure.tables.len() == 1 {
        let g = &pure.tables[0];
        let ok = (0..size).filter(|&x| f.is_boolean(x) && g[x] != f[x]).all(forced);
        tally.record(LemmaId::UniqueSaturation, f, ok);
    }

    let Some(first) = pure.tables.first() else { return Ok(()) };
    let d = dictating_variables(first)?;
    if d.len() != 1 {
        // reported through the structure check
        return Ok(());
    }
    let t = d.elements().next().expect("singleton");

    if pure.tables.len() >= 2 {
        let bad: Vec<usize> = (1..size).filter(|&s| f.is_boolean(s) && f[s] != iverson(t, s)).collect();
        let ok = !bad.iter().any(|&a| bad.iter().any(|&b| a & b == 0));
        tally.record(LemmaId::NonUnique, f, ok);
    }

    if pure.complete && pure.tables.len() == 1 {
        let tg = t_union(first).index();
        let xs: Vec<usize> = (0..size).filter(|&x| f[x] == 1 && iverson(t, x) == 1).collect();
        let ys: Vec<usize> = (0..size).filter(|&y| f[y] == 1 && y & tg != 0).collect();
        let ok = xs.iter().all(|&x| ys.iter().all(|&y| x & y != 0));
        tally.record(LemmaId::HittingSet, f, ok);

        for _ in 0..6 {
            let pi = commuting_map(rng, n)?;
            check_commutes(f, t, &pi, budget, tally)?;
        }
    }
    Ok(())
}

/// Random maps into arities 7..=n: permutations half the time.
fn commuting_map(rng: &mut ChaCha8Rng, n: usize) -> Result<MinorMap> {
    if rng.random_bool(0.5) {
        let mut image: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            image.swap(i, rng.random_range(0..=i));
        }
        return MinorMap::new(n, image);
    }
    let m = rng.random_range(7.min(n)..=n);
    let mut image: Vec<usize> = (1..=m).collect();
    image.extend((m..n).map(|_| rng.random_range(1..=m)));
    for i in (1..n).rev() {
        image.swap(i, rng.random_range(0..=i));
    }
    MinorMap::new(m, image)
}

fn check_commutes(f: &PolyTable, t: usize, pi: &MinorMap, budget: u64, tally: &mut Tally) -> Result<()> {
    let m = pi.target();
    let minor = apply_minor(f, pi)?;
    if m < 7 || has_small_2set(&minor) {
        return Ok(());
    }
    let pure = enumerate_pure_saturations(&minor, budget)?;
    if !pure.complete || pure.tables.len() != 1 {
        return Ok(());
    }
    let g = &pure.tables[0];
    if minimal_2sets(g).iter().any(|s| s.len() + 3 >= m) {
        return Ok(());
    }
    let d = dictating_variables(g)?;
    let ok = d.len() == 1 && d.elements().next() == Some(pi.apply(t));
    tally.record(LemmaId::SaturationCommutes, f, ok);
    Ok(())
}

/// Family members of arity 7 and up, deduplicated, in a fixed order.
pub fn suite_families(seed: u64, walks: usize) -> Result<Vec<PolyTable>> {
    let mut base = Vec::new();
    for (n, t) in [(7, 1), (7, 4), (8, 2), (9, 9)] {
        base.push(projection(n, t)?);
    }
    for (n, t) in [(7, 3), (8, 1), (8, 6), (9, 5)] {
        base.push(saturated_projection(n, t)?);
    }
    let blocks = [
        BlockFamily::EXAMPLE,
        BlockFamily { outside: 0, block: 7, dictator: 1 },
        BlockFamily { outside: 1, block: 7, dictator: 1 },
        BlockFamily { outside: 1, block: 7, dictator: 5 },
        BlockFamily { outside: 2, block: 7, dictator: 2 },
        BlockFamily { outside: 0, block: 9, dictator: 4 },
        BlockFamily { outside: 1, block: 9, dictator: 1 },
    ];
    for fam in blocks {
        base.push(fam.f()?);
        base.push(fam.g()?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for f in &base {
        for w in 0..=walks {
            let t = if w == 0 { f.clone() } else { reconfig_walk(f, 6, &mut rng)? };
            if seen.insert(t.clone()) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Runs every check and merges the tallies by lemma and arity.
pub fn lemma_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if config.max_arity > 4 {
        return Err(Error::ArityOutOfRange(config.max_arity));
    }
    let lo3 = lo3();
    let mut tally = Tally::default();
    for n in 1..=config.max_arity {
        let general = General { checker: PolyChecker::new(n, &lo3)? };
        let mut tables = Vec::new();
        let stats = for_each_polymorphism(n, &lo3, Filter::All, config.budget, |v| tables.push(v.to_vec()))?;
        for values in tables {
            general.run(&PolyTable::new(n, 3, values)?, &mut tally)?;
        }
        if !stats.complete {
            for lemma in LemmaId::ALL {
                tally.incomplete(lemma, n);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let families = suite_families(config.seed, config.walks)?;
    let mut checkers: BTreeMap<usize, PolyChecker> = BTreeMap::new();
    for f in &families {
        let n = f.arity();
        let checker = match checkers.entry(n) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(PolyChecker::new(n, &lo3)?),
        };
        let general = General { checker: checker.clone() };
        general.run(f, &mut tally)?;
        if !has_small_2set(f) {
            let pure = enumerate_pure_saturations(f, config.pure_budget)?;
            run_high_arity(f, &pure, config.pure_budget, &mut tally, &mut rng)?;
        }
    }
    Ok(SuiteReport { reports: tally.entries.into_values().collect() })
}
