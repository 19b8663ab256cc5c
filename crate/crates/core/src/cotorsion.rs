//! Cotorsion pairs relative to an exact structure, approximations found by
//! exhaustive search, and the resolving/coresolving predicates.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{
    extends, inj_generate, inj_objects, lifts, maximal_structure, proj_generate, proj_objects, ExactStructure,
    Membership, ObjectClass,
};
use crate::ffmat::{space_size, CoefficientIter};
use crate::relative::{closed_under_extensions, closed_under_kernels_of_deflations, closed_under_cokernels_of_inflations, ExtTable};
use crate::repcat::{hom_basis, hom_elements, kernel_in_basis, lift_through, extend_along, Morphism};
use crate::exact::hom_orbit_reps;
use crate::universe::Universe;

/// Largest solution space enumerated when testing minimality.
pub const MAX_ENDO_SOLUTIONS: u64 = 1 << 20;

/// Three-valued conjunction: any `false` wins, then any unknown.
pub fn tri_and(items: impl IntoIterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for v in items {
        match v {
            Some(false) => return Some(false),
            None => unknown = true,
            Some(true) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

/// A pair of core classes with `a^⊥ = b` and `^⊥b = a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CotorsionPair {
    pub a: ObjectClass,
    pub b: ObjectClass,
}

impl CotorsionPair {
    /// Checks both perp equalities, then closure of both halves under
    /// extensions wherever that is decidable.
    pub fn new(u: &Universe, d: &ExactStructure, a: ObjectClass, b: ObjectClass) -> Result<Self> {
        let t = ExtTable::new(u, d);
        if t.perp_right(&a) != b || t.perp_left(&b) != a {
            return Err(Error::Usage(format!("({}, {}) is not a cotorsion pair", a.format(u), b.format(u))));
        }
        let pair = CotorsionPair { a, b };
        let ca = closed_under_extensions(u, d, &|i| pair.a_membership(u, &t, i));
        let cb = closed_under_extensions(u, d, &|i| pair.b_membership(u, &t, i));
        assert!(ca.failures.is_empty() && cb.failures.is_empty(), "perp classes must be extension closed");
        Ok(pair)
    }

    pub fn a_membership(&self, u: &Universe, t: &ExtTable, i: usize) -> Membership {
        t.perp_left_membership(u, &self.b, i)
    }

    pub fn b_membership(&self, u: &Universe, t: &ExtTable, i: usize) -> Membership {
        t.perp_right_membership(u, &self.a, i)
    }

    pub fn format(&self, u: &Universe) -> String {
        format!("({}, {})", self.a.format(u), self.b.format(u))
    }

    /// The pair order: `self ≤ other` iff `self.a ⊇ other.a`.
    pub fn leq(&self, other: &CotorsionPair) -> bool {
        other.a.is_subset(&self.a)
    }
}

/// `(^⊥a, (^⊥a)^⊥)`.
pub fn pair_generated(u: &Universe, d: &ExactStructure, a: &ObjectClass) -> CotorsionPair {
    let t = ExtTable::new(u, d);
    let left = t.perp_left(a);
    let right = t.perp_right(&left);
    CotorsionPair::new(u, d, left, right).expect("double perp yields a cotorsion pair")
}

/// `(^⊥(a^⊥), a^⊥)`.
pub fn pair_cogenerated(u: &Universe, d: &ExactStructure, a: &ObjectClass) -> CotorsionPair {
    let t = ExtTable::new(u, d);
    let right = t.perp_right(a);
    let left = t.perp_left(&right);
    CotorsionPair::new(u, d, left, right).expect("double perp yields a cotorsion pair")
}

pub fn is_cotorsion_pair(u: &Universe, d: &ExactStructure, a: &ObjectClass, b: &ObjectClass) -> bool {
    let t = ExtTable::new(u, d);
    t.perp_right(a) == *b && t.perp_left(b) == *a
}

/// Result of an "enough injectives/projectives" search over core objects:
/// one witnessing orbit per object, and objects with none inside the bound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Enough {
    pub witnesses: Vec<(usize, usize)>,
    pub missing: Vec<usize>,
}

impl Enough {
    pub fn holds(&self) -> Option<bool> {
        self.missing.is_empty().then_some(true)
    }

    pub fn witness(&self, x: usize) -> Option<usize> {
        self.witnesses.iter().find(|w| w.0 == x).map(|w| w.1)
    }
}

/// For each core `X`, a `d`-conflation `X >-> B ->> A` with `B` in `b`, `A` in `a`.
pub fn enough_injectives(u: &Universe, d: &ExactStructure, pair: &CotorsionPair) -> Enough {
    let t = ExtTable::new(u, d);
    let mut out = Enough::default();
    for x in 0..u.core_len() {
        let found = u.orbits_with_x(x).iter().copied().find(|&c| {
            let cc = u.conflation(c);
            d.contains(c)
                && pair.b_membership(u, &t, cc.y) == Membership::In
                && pair.a_membership(u, &t, cc.z) == Membership::In
        });
        match found {
            Some(c) => out.witnesses.push((x, c)),
            None => out.missing.push(x),
        }
    }
    out
}

/// For each core `X`, a `d`-conflation `B >-> A ->> X` with `B` in `b`, `A` in `a`.
pub fn enough_projectives(u: &Universe, d: &ExactStructure, pair: &CotorsionPair) -> Enough {
    let t = ExtTable::new(u, d);
    let mut out = Enough::default();
    for x in 0..u.core_len() {
        let found = u.orbits_with_z(x).iter().copied().find(|&c| {
            let cc = u.conflation(c);
            d.contains(c)
                && pair.a_membership(u, &t, cc.y) == Membership::In
                && pair.b_membership(u, &t, cc.x) == Membership::In
        });
        match found {
            Some(c) => out.witnesses.push((x, c)),
            None => out.missing.push(x),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxKind {
    Precover,
    Cover,
    Preenvelope,
    Envelope,
}

impl ApproxKind {
    fn envelope_side(self) -> bool {
        matches!(self, ApproxKind::Preenvelope | ApproxKind::Envelope)
    }

    fn minimal(self) -> bool {
        matches!(self, ApproxKind::Cover | ApproxKind::Envelope)
    }
}

impl fmt::Display for ApproxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ApproxKind::Precover => "precover",
            ApproxKind::Cover => "cover",
            ApproxKind::Preenvelope => "preenvelope",
            ApproxKind::Envelope => "envelope",
        };
        f.write_str(s)
    }
}

/// A (pre)cover `f: Y ->> X` or (pre)envelope `f: X >-> Y` by a class.
/// `orbit` is the conflation carrying `f`, absent for absolute searches.
#[derive(Debug, Clone)]
pub struct ApproxWitness {
    pub kind: ApproxKind,
    pub object: usize,
    pub middle: usize,
    pub orbit: Option<usize>,
    pub map: Morphism,
}

fn class_indecomposables(u: &Universe, class: &ObjectClass) -> Vec<usize> {
    let mut out: Vec<usize> = class.iter().flat_map(|i| u.decomposition(i).iter().copied()).collect();
    out.sort();
    out.dedup();
    out
}

/// `y` lies in `add(class)`, given the sorted indecomposable summands of the class.
fn in_add(u: &Universe, indec: &[usize], y: usize) -> bool {
    u.decomposition(y).iter().all(|k| indec.binary_search(k).is_ok())
}

/// Factorization half: every map from (resp. to) a class member factors
/// through `map`. Checked by rank, over indecomposables of the class.
fn approximates(u: &Universe, indec: &[usize], map: &Morphism, envelope: bool) -> bool {
    indec.iter().all(|&k| if envelope { extends(u.object(k), map) } else { lifts(u.object(k), map) })
}

/// Minimality half: every `g` in `End(Y)` with `f∘g = f` (resp. `g∘f = f`)
/// is invertible. Solutions form `id + K`; all of `K` is enumerated.
fn minimal(map: &Morphism, envelope: bool) -> Result<bool> {
    let y = if envelope { map.target() } else { map.source() };
    let basis = hom_basis(y, y)?;
    let k = if envelope {
        kernel_in_basis(y, y, &basis, |h| h.compose(map))
    } else {
        kernel_in_basis(y, y, &basis, |h| map.compose(h))
    };
    let field = y.field();
    if space_size(field, k.len()) > MAX_ENDO_SOLUTIONS {
        return Err(Error::Limit(format!("{} endomorphism solutions", space_size(field, k.len()))));
    }
    let id = Morphism::identity(y);
    Ok(CoefficientIter::new(field, k.len()).all(|c| id.add(&Morphism::linear_combination(y, y, &k, &c)).is_iso()))
}

/// Relative approximation of core object `x` by `class`: scans the `d`-orbits
/// ending (or starting) at `x` with middle in `add(class)`, in canonical
/// order, and returns the first that qualifies.
pub fn approximation(
    u: &Universe,
    d: &ExactStructure,
    class: &ObjectClass,
    x: usize,
    kind: ApproxKind,
) -> Result<Option<ApproxWitness>> {
    let envelope = kind.envelope_side();
    let indec = class_indecomposables(u, class);
    let orbits = if envelope { u.orbits_with_x(x) } else { u.orbits_with_z(x) };
    for &c in orbits {
        let cc = u.conflation(c);
        if !d.contains(c) || !in_add(u, &indec, cc.y) {
            continue;
        }
        let map = if envelope { &cc.inflation } else { &cc.deflation };
        if !approximates(u, &indec, map, envelope) {
            continue;
        }
        if kind.minimal() && !minimal(map, envelope)? {
            continue;
        }
        return Ok(Some(ApproxWitness { kind, object: x, middle: cc.y, orbit: Some(c), map: map.clone() }));
    }
    Ok(None)
}

pub fn precover(u: &Universe, d: &ExactStructure, a: &ObjectClass, x: usize) -> Result<Option<ApproxWitness>> {
    approximation(u, d, a, x, ApproxKind::Precover)
}

pub fn cover(u: &Universe, d: &ExactStructure, a: &ObjectClass, x: usize) -> Result<Option<ApproxWitness>> {
    approximation(u, d, a, x, ApproxKind::Cover)
}

pub fn preenvelope(u: &Universe, d: &ExactStructure, b: &ObjectClass, x: usize) -> Result<Option<ApproxWitness>> {
    approximation(u, d, b, x, ApproxKind::Preenvelope)
}

pub fn envelope(u: &Universe, d: &ExactStructure, b: &ObjectClass, x: usize) -> Result<Option<ApproxWitness>> {
    approximation(u, d, b, x, ApproxKind::Envelope)
}

/// Absolute approximation: any morphism between `x` and a stored object of
/// `add(class)`, not necessarily a conflation. Maps are scanned up to the
/// automorphisms of the middle object.
pub fn absolute_approximation(
    u: &Universe,
    class: &ObjectClass,
    x: usize,
    kind: ApproxKind,
) -> Result<Option<ApproxWitness>> {
    let envelope = kind.envelope_side();
    let indec = class_indecomposables(u, class);
    for y in (0..u.len()).filter(|&y| in_add(u, &indec, y)) {
        let reps = if envelope { hom_orbit_reps(u, x, y, false) } else { hom_orbit_reps(u, y, x, true) };
        for map in reps {
            if !approximates(u, &indec, &map, envelope) {
                continue;
            }
            if kind.minimal() && !minimal(&map, envelope)? {
                continue;
            }
            return Ok(Some(ApproxWitness { kind, object: x, middle: y, orbit: None, map }));
        }
    }
    Ok(None)
}

impl ApproxWitness {
    /// Re-checks the witness from its matrices alone: epi/mono shape, the
    /// middle in `add(class)`, factorization of every basis morphism by an
    /// explicit solve, and for minimal kinds invertibility of every
    /// endomorphism fixing the map, by brute enumeration of `End(Y)`.
    pub fn verify(&self, u: &Universe, d: Option<&ExactStructure>, class: &ObjectClass) -> bool {
        let envelope = self.kind.envelope_side();
        let y = u.object(self.middle);
        let (src, tgt) = (self.map.source(), self.map.target());
        let shape_ok = if envelope { tgt == y && src == u.object(self.object) } else { src == y && tgt == u.object(self.object) };
        let indec = class_indecomposables(u, class);
        if !shape_ok || !in_add(u, &indec, self.middle) {
            return false;
        }
        if let (Some(d), Some(c)) = (d, self.orbit) {
            let Ok(found) = (if envelope { u.orbit_of(&self.map) } else { u.orbit_of_deflation(&self.map) }) else {
                return false;
            };
            if found != c || !d.contains(c) {
                return false;
            }
        }
        for k in indec {
            let m = u.object(k);
            let ok = if envelope {
                hom_basis(src, m).expect("same category").iter().all(|h| extend_along(h, &self.map).is_some())
            } else {
                hom_basis(m, tgt).expect("same category").iter().all(|h| lift_through(h, &self.map).is_some())
            };
            if !ok {
                return false;
            }
        }
        if self.kind.minimal() {
            let Ok(ends) = hom_elements(y, y) else { return false };
            return ends.iter().all(|g| {
                let fixes = if envelope { g.compose(&self.map) == self.map } else { self.map.compose(g) == self.map };
                !fixes || g.is_iso()
            });
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perfection {
    Yes,
    No,
    /// Some object has no approximation inside the bound.
    Unknown,
}

impl fmt::Display for Perfection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Perfection::Yes => "yes",
            Perfection::No => "no",
            Perfection::Unknown => "unknown-within-bound",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PerfectionReport {
    pub verdict: Perfection,
    pub covers: Vec<ApproxWitness>,
    pub envelopes: Vec<ApproxWitness>,
    pub missing_covers: Vec<usize>,
    pub missing_envelopes: Vec<usize>,
}

/// Covers by `a` and envelopes by `b` for every core object. A precover
/// inside the bound always contains a cover as a summand, so a missing
/// approximation means the search ran out of room, never a refutation.
pub fn is_perfect(u: &Universe, d: &ExactStructure, pair: &CotorsionPair) -> Result<PerfectionReport> {
    let mut rep = PerfectionReport {
        verdict: Perfection::Yes,
        covers: Vec::new(),
        envelopes: Vec::new(),
        missing_covers: Vec::new(),
        missing_envelopes: Vec::new(),
    };
    for x in 0..u.core_len() {
        match cover(u, d, &pair.a, x)? {
            Some(w) => rep.covers.push(w),
            None if precover(u, d, &pair.a, x)?.is_some() => rep.verdict = Perfection::No,
            None => rep.missing_covers.push(x),
        }
        match envelope(u, d, &pair.b, x)? {
            Some(w) => rep.envelopes.push(w),
            None if preenvelope(u, d, &pair.b, x)?.is_some() => rep.verdict = Perfection::No,
            None => rep.missing_envelopes.push(x),
        }
    }
    if rep.verdict == Perfection::Yes && !(rep.missing_covers.is_empty() && rep.missing_envelopes.is_empty()) {
        rep.verdict = Perfection::Unknown;
    }
    Ok(rep)
}

/// Contains the `d`-projectives, closed under `d`-extensions and under
/// kernels of `d`-deflations between members.
pub fn is_resolving(u: &Universe, d: &ExactStructure, core: &ObjectClass, m: &dyn Fn(usize) -> Membership) -> Option<bool> {
    tri_and([
        Some(proj_objects(u, d).is_subset(core)),
        closed_under_extensions(u, d, m).verdict(),
        closed_under_kernels_of_deflations(u, d, m).verdict(),
    ])
}

/// Dual of [`is_resolving`].
pub fn is_coresolving(u: &Universe, d: &ExactStructure, core: &ObjectClass, m: &dyn Fn(usize) -> Membership) -> Option<bool> {
    tri_and([
        Some(inj_objects(u, d).is_subset(core)),
        closed_under_extensions(u, d, m).verdict(),
        closed_under_cokernels_of_inflations(u, d, m).verdict(),
    ])
}

/// One half of the comparison between relative and absolute approximation:
/// `m` is relatively enveloping (covering) iff it is absolutely enveloping
/// (covering) and contains the relative injectives (projectives).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonHalf {
    pub relative: Option<bool>,
    pub absolute: Option<bool>,
    pub contains_special: bool,
    /// Objects where the relative and absolute answers disagree in the way
    /// uniqueness of minimal approximations forbids.
    pub conflicts: Vec<usize>,
}

impl ComparisonHalf {
    pub fn right_side(&self) -> Option<bool> {
        if !self.contains_special {
            Some(false)
        } else {
            self.absolute
        }
    }

    /// `None` when either side is undecided within the bound.
    pub fn agree(&self) -> Option<bool> {
        Some(self.relative? == self.right_side()?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvCoverReport {
    pub enveloping: Option<ComparisonHalf>,
    pub covering: Option<ComparisonHalf>,
}

fn compare_half(u: &Universe, d: &ExactStructure, m: &ObjectClass, envelope_side: bool) -> Result<ComparisonHalf> {
    let (rel_kind, special) = if envelope_side {
        (ApproxKind::Envelope, inj_objects(u, d))
    } else {
        (ApproxKind::Cover, proj_objects(u, d))
    };
    let mut relative = Vec::new();
    let mut absolute = Vec::new();
    let mut conflicts = Vec::new();
    for x in 0..u.core_len() {
        let rel = approximation(u, d, m, x, rel_kind)?;
        let abs = absolute_approximation(u, m, x, rel_kind)?;
        // A relative minimal approximation is an absolute one; those are
        // unique up to isomorphism, so the absolute one decides.
        let rel_verdict = match (&rel, &abs) {
            (Some(_), _) => Some(true),
            (None, Some(w)) => {
                let carried = if envelope_side {
                    w.map.is_mono() && u.orbit_of(&w.map).map(|c| d.contains(c)).unwrap_or(false)
                } else {
                    w.map.is_epi() && u.orbit_of_deflation(&w.map).map(|c| d.contains(c)).unwrap_or(false)
                };
                if carried {
                    conflicts.push(x);
                }
                Some(false)
            }
            (None, None) => None,
        };
        if rel.is_some() && abs.is_none() {
            conflicts.push(x);
        }
        relative.push(rel_verdict);
        absolute.push(abs.is_some().then_some(true));
    }
    Ok(ComparisonHalf {
        relative: tri_and(relative),
        absolute: tri_and(absolute),
        contains_special: special.is_subset(&ObjectClass::new(class_indecomposables_closure(u, m))),
        conflicts,
    })
}

/// Core objects of `add(m)`.
fn class_indecomposables_closure(u: &Universe, m: &ObjectClass) -> Vec<usize> {
    let indec = class_indecomposables(u, m);
    (0..u.core_len()).filter(|&y| in_add(u, &indec, y)).collect()
}

/// Compares relative and absolute enveloping (when `d` is injectively
/// generated) and covering (when projectively generated). Errors with a
/// usage error when `d` is neither.
pub fn env_cover_comparison(u: &Universe, d: &ExactStructure, m: &ObjectClass) -> Result<EnvCoverReport> {
    let max = maximal_structure(u);
    let inj_gen = inj_generate(u, &max, &inj_objects(u, d).indecomposables(u)) == *d;
    let proj_gen = proj_generate(u, &max, &proj_objects(u, d).indecomposables(u)) == *d;
    if !inj_gen && !proj_gen {
        return Err(Error::Usage("base structure is neither injectively nor projectively generated".into()));
    }
    Ok(EnvCoverReport {
        enveloping: if inj_gen { Some(compare_half(u, d, m, true)?) } else { None },
        covering: if proj_gen { Some(compare_half(u, d, m, false)?) } else { None },
    })
}
