//! Exhaustive checks of the structural laws relating relative divisibility,
//! flatness, cotorsion pairs and approximations, with witness reporting and
//! deliberate engine mutations that must be caught.
//!
//! Universal statements quantify over stored configurations. Existential
//! statements are settled by a stored witness; when none is found the
//! statement is undecided and the configuration is skipped.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cotorsion::{is_coresolving, is_perfect, is_resolving, pair_generated, CotorsionPair, Enough, Perfection};
use crate::error::{Error, Result};
use crate::exact::{is_injective, is_projective, inj_objects, proj_objects, ExactStructure, MapRecord, Membership, ObjectClass};
use crate::ffmat::{space_size, CoefficientIter, Matrix};
use crate::galois::Galois;
use crate::relative::{
    closed_under_biproducts, closed_under_deflations, closed_under_extensions, closed_under_inflations,
    div_memberships, div_objects, div_rel_membership, div_rel_membership_by, flat_memberships, flat_objects,
    flat_rel_membership, flat_rel_membership_by, ClosureCheck, ExtTable,
};
use crate::repcat::{hom_basis, Morphism};
use crate::universe::Universe;

/// Largest twist space enumerated when searching for a diagram.
const MAX_TWISTS: u64 = 1 << 16;

/// A deliberate defect in one checker. Each must surface as a violation on
/// the two-vertex fixture, showing the checker is not vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Divisibility and flatness are read against the structure with its
    /// first nonsplit orbit removed.
    DiagramCorruptStructure,
    /// Statement (ii) of the cotorsion criterion forgets that the middle
    /// term must be projective.
    CohcotDropProjective,
    /// Same defect in the coherence criterion.
    CohDropProjective,
    /// Same defect in the resolving criterion.
    ResolvingDropProjective,
    /// The conflation out of `X` no longer needs an injective middle.
    SesDropInjective,
    /// The cokernel in statement (iv) no longer needs to lie in the class.
    CovenvDropCokernelClass,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::DiagramCorruptStructure,
        Mutation::CohcotDropProjective,
        Mutation::CohDropProjective,
        Mutation::ResolvingDropProjective,
        Mutation::SesDropInjective,
        Mutation::CovenvDropCokernelClass,
    ];

    /// The law whose checker this mutation targets.
    pub fn law(self) -> Law {
        match self {
            Mutation::DiagramCorruptStructure => Law::Diagram,
            Mutation::CohcotDropProjective => Law::Cohcot,
            Mutation::CohDropProjective => Law::Coh,
            Mutation::ResolvingDropProjective => Law::Resolving,
            Mutation::SesDropInjective => Law::Ses,
            Mutation::CovenvDropCokernelClass => Law::Covenv,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mutation::DiagramCorruptStructure => "diagram-corrupt-structure",
            Mutation::CohcotDropProjective => "cohcot-drop-projective",
            Mutation::CohDropProjective => "coh-drop-projective",
            Mutation::ResolvingDropProjective => "resolving-drop-projective",
            Mutation::SesDropInjective => "ses-drop-injective",
            Mutation::CovenvDropCokernelClass => "covenv-drop-cokernel-class",
        }
    }
}

impl FromStr for Mutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown mutation {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Diagram,
    Cohcot,
    Coh,
    Resolving,
    Ses,
    Covenv,
    ClosureDivFlat,
    ClosureBiproducts,
    ClosureEverything,
    ClosureGenerators,
    ClosureRelExtensions,
    ClosureRelBiproducts,
}

impl Law {
    pub const ALL: [Law; 12] = [
        Law::Diagram,
        Law::Cohcot,
        Law::Coh,
        Law::Resolving,
        Law::Ses,
        Law::Covenv,
        Law::ClosureDivFlat,
        Law::ClosureBiproducts,
        Law::ClosureEverything,
        Law::ClosureGenerators,
        Law::ClosureRelExtensions,
        Law::ClosureRelBiproducts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Diagram => "diagram",
            Law::Cohcot => "cohcot",
            Law::Coh => "coh",
            Law::Resolving => "resolving",
            Law::Ses => "ses",
            Law::Covenv => "covenv",
            Law::ClosureDivFlat => "closure-div-flat",
            Law::ClosureBiproducts => "closure-biproducts",
            Law::ClosureEverything => "closure-everything",
            Law::ClosureGenerators => "closure-generators",
            Law::ClosureRelExtensions => "closure-rel-extensions",
            Law::ClosureRelBiproducts => "closure-rel-biproducts",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Law::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| Error::Usage(format!("unknown law {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Checked,
    Skipped,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawViolation {
    pub key: String,
    pub description: String,
    pub maps: Vec<MapRecord>,
}

/// Result of one law over its whole configuration space. Every
/// configuration is either checked or skipped; violations are a subset of
/// the checked ones.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub law: Law,
    pub mutation: Option<Mutation>,
    pub universe: String,
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<LawViolation>,
    /// Hypotheses that failed verification, making whole families vacuous.
    pub unmet: Vec<String>,
    /// Outcome per configuration key, for comparisons across bounds.
    #[serde(skip)]
    pub outcomes: BTreeMap<String, Outcome>,
}

impl LawReport {
    fn new(law: Law, u: &Universe, mutation: Option<Mutation>) -> Self {
        LawReport {
            law,
            mutation,
            universe: u.hash()[..16].to_string(),
            checked: 0,
            skipped: 0,
            violations: Vec::new(),
            unmet: Vec::new(),
            outcomes: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, key: String, outcome: Outcome, violation: impl FnOnce() -> (String, Vec<MapRecord>)) {
        match outcome {
            Outcome::Skipped => self.skipped += 1,
            Outcome::Checked => self.checked += 1,
            Outcome::Violated => {
                self.checked += 1;
                let (description, maps) = violation();
                self.violations.push(LawViolation { key: key.clone(), description, maps });
            }
        }
        let slot = self.outcomes.entry(key).or_insert(outcome);
        *slot = (*slot).max(outcome);
    }

    /// Skipped configurations among `keys`; keys never enumerated here count
    /// as skipped.
    pub fn skipped_among<'a>(&self, keys: impl IntoIterator<Item = &'a String>) -> usize {
        keys.into_iter().filter(|k| self.outcomes.get(*k).is_none_or(|o| *o == Outcome::Skipped)).count()
    }
}

fn tri(m: Membership) -> Option<bool> {
    match m {
        Membership::In => Some(true),
        Membership::Out => Some(false),
        Membership::Unknown => None,
    }
}

/// Outcome of "hypotheses imply conclusion", given a lazily computed
/// answer to whether the configuration is realised at all.
fn implication(hyps: &[Option<bool>], concl: Option<bool>, realised: impl FnOnce() -> Option<bool>) -> Outcome {
    if hyps.contains(&Some(false)) || concl == Some(true) {
        return Outcome::Checked;
    }
    let holds = !hyps.contains(&None);
    match (holds, concl, realised()) {
        (_, _, Some(false)) => Outcome::Checked,
        (true, Some(false), Some(true)) => Outcome::Violated,
        _ => Outcome::Skipped,
    }
}

/// Outcome of "all statements are equivalent".
fn equivalence(values: &[Option<bool>]) -> Outcome {
    let known: Vec<bool> = values.iter().flatten().copied().collect();
    if known.windows(2).any(|w| w[0] != w[1]) {
        Outcome::Violated
    } else if known.len() < values.len() {
        Outcome::Skipped
    } else {
        Outcome::Checked
    }
}

fn show(values: &[Option<bool>]) -> String {
    let cells: Vec<&str> = values
        .iter()
        .map(|v| match v {
            Some(true) => "true",
            Some(false) => "false",
            None => "undecided",
        })
        .collect();
    format!("[{}]", cells.join(", "))
}

fn labels(u: &Universe, ids: &[usize]) -> String {
    let mut l: Vec<&str> = ids.iter().map(|&i| u.label(i)).collect();
    l.sort();
    format!("{{{}}}", l.join(","))
}

/// The smallest generating subset, by size and then by labels; stable
/// across bounds for the fixtures, whose indecomposables all carry names.
fn min_generator(u: &Universe, gens: &[Vec<usize>]) -> String {
    gens.iter().map(|g| (g.len(), labels(u, g))).min().map(|(_, l)| l).unwrap_or_default()
}

fn orbit_key(u: &Universe, c: usize) -> String {
    let cc = u.conflation(c);
    let rank = u.orbits_with_x(cc.x).iter().filter(|&&o| {
        let oc = u.conflation(o);
        oc.y == cc.y && oc.z == cc.z && o < c
    });
    format!("{}>{}>{}#{}", u.label(cc.x), u.label(cc.y), u.label(cc.z), rank.count())
}

/// One element of DPEx or DIEx with its generating subsets and the
/// divisible and flat memberships of every stored object.
#[derive(Debug, Clone)]
pub struct StructureInfo {
    pub e: ExactStructure,
    pub key: String,
    pub proj_gens: Vec<Vec<usize>>,
    pub inj_gens: Vec<Vec<usize>>,
    pub div: Vec<Membership>,
    pub flat: Vec<Membership>,
}

#[derive(Debug, Clone)]
pub struct PairInfo {
    pub pair: CotorsionPair,
    pub key: String,
    pub a: Vec<Membership>,
    pub b: Vec<Membership>,
}

/// Everything the laws share over a fixed ambient structure `d`.
pub struct LawContext<'a> {
    pub u: &'a Universe,
    pub d: &'a ExactStructure,
    pub ext: ExtTable,
    pub galois: Galois,
    pub structures: Vec<StructureInfo>,
    pub pairs: Vec<PairInfo>,
    pub proj_d: Vec<Membership>,
    pub inj_d: Vec<Membership>,
    /// Witnesses for `(all, Inj(d))` and `(Proj(d), all)`.
    pub enough_inj: Enough,
    pub enough_proj: Enough,
}

fn special(u: &Universe, class: &ObjectClass, special: bool, i: usize) -> Membership {
    if !special {
        Membership::Out
    } else if u.is_core(i) {
        Membership::In
    } else {
        class.membership(u, i)
    }
}

impl<'a> LawContext<'a> {
    pub fn new(u: &'a Universe, d: &'a ExactStructure) -> Result<Self> {
        let galois = Galois::compute(u, d)?;
        let ext = ExtTable::new(u, d);
        let mut structures: Vec<StructureInfo> = Vec::new();
        for (poset, proj) in [(&galois.dpex, true), (&galois.diex, false)] {
            for (e, gens) in poset.elements.iter().zip(&poset.generators) {
                let k = match structures.iter().position(|s| s.e == *e) {
                    Some(k) => k,
                    None => {
                        let tag = if proj { "proj" } else { "inj" };
                        structures.push(StructureInfo {
                            e: e.clone(),
                            key: format!("{tag}{}", min_generator(u, gens)),
                            proj_gens: Vec::new(),
                            inj_gens: Vec::new(),
                            div: div_memberships(u, d, e),
                            flat: flat_memberships(u, d, e),
                        });
                        structures.len() - 1
                    }
                };
                if proj {
                    structures[k].proj_gens = gens.clone();
                } else {
                    structures[k].inj_gens = gens.clone();
                }
            }
        }
        let pairs = galois
            .dcot
            .elements
            .iter()
            .zip(&galois.dcot.generators)
            .map(|(p, gens)| {
                let key = gens
                    .iter()
                    .map(|g| {
                        let tag = if pair_generated(u, d, &ObjectClass::new(g.iter().copied())) == *p { "gen" } else { "cogen" };
                        (g.len(), tag, labels(u, g))
                    })
                    .min()
                    .map(|(_, t, l)| format!("{t}{l}"))
                    .unwrap_or_default();
                PairInfo {
                    pair: p.clone(),
                    key,
                    a: ext.perp_left_memberships(u, &p.b),
                    b: ext.perp_right_memberships(u, &p.a),
                }
            })
            .collect();
        let pd = proj_objects(u, d);
        let id = inj_objects(u, d);
        let proj_d = (0..u.len()).map(|i| special(u, &pd, is_projective(u, d, i), i)).collect();
        let inj_d = (0..u.len()).map(|i| special(u, &id, is_injective(u, d, i), i)).collect();
        let all = ObjectClass::all(u);
        let inj_pair = CotorsionPair { a: all.clone(), b: id };
        let proj_pair = CotorsionPair { a: pd, b: all };
        let enough_inj = crate::cotorsion::enough_injectives(u, d, &inj_pair);
        let enough_proj = crate::cotorsion::enough_projectives(u, d, &proj_pair);
        Ok(LawContext { u, d, ext, galois, structures, pairs, proj_d, inj_d, enough_inj, enough_proj })
    }

    fn ext0(&self, z: usize, x: usize) -> Option<bool> {
        self.ext.vanishes(z, x).ok()
    }

    fn d_orbits_from(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.u.orbits_with_x(x).iter().copied().filter(|&c| self.d.contains(c))
    }
}

/// Morphisms closing a gluing of two conflation pairs into the commutative
/// diagram with invertible ends.
#[derive(Debug, Clone)]
pub struct DiagramWitness {
    pub gamma: Morphism,
    pub alpha: Morphism,
    pub beta: Morphism,
    pub f: Morphism,
    pub g: Morphism,
    pub h: Morphism,
}

fn concat_flat(parts: &[Morphism]) -> Vec<u8> {
    parts.iter().flat_map(|m| m.flat()).collect()
}

/// Searches for `α ∈ Aut(X)`, `β ∈ Aut(V)`, a twist `γ ∈ Aut(Z)` and maps
/// `f, g, h` with `f i = i' α`, `d' f = g d`, `j' g = h j γ`, `p' h = β p`,
/// where the top row is `X >-i-> Y ->d->> Z >-j-> U ->p->> V` and the bottom
/// row `X >-> Y' ->> Z' >-> U' ->> V`. `Some(None)` means no such diagram
/// exists; `None` means the search space exceeded its cap.
pub fn find_diagram(u: &Universe, c1: usize, c2: usize, c1p: usize, c2p: usize) -> Result<Option<Option<DiagramWitness>>> {
    let (t1, t2, b1, b2) = (u.conflation(c1), u.conflation(c2), u.conflation(c1p), u.conflation(c2p));
    let field = u.field();
    let ob = |i: usize| u.object(i).clone();
    let (x, y, z, uu, v) = (ob(t1.x), ob(t1.y), ob(t1.z), ob(t2.y), ob(t2.z));
    let (yp, zp, up) = (ob(b1.y), ob(b1.z), ob(b2.y));
    let ba = hom_basis(&x, &x)?;
    let bb = hom_basis(&v, &v)?;
    let bf = hom_basis(&y, &yp)?;
    let bg = hom_basis(&z, &zp)?;
    let bh = hom_basis(&uu, &up)?;
    let zeros = [Morphism::zero(&x, &yp), Morphism::zero(&y, &zp), Morphism::zero(&z, &up), Morphism::zero(&uu, &v)];
    let eq = |slot: usize, m: Morphism| {
        let mut parts = zeros.clone();
        parts[slot] = m;
        concat_flat(&parts)
    };
    let rows = concat_flat(&zeros).len();
    let mut twists_seen = 0u64;
    for gamma in u.automorphisms(t1.z) {
        let j = t2.inflation.compose(gamma);
        let mut cols: Vec<Vec<u8>> = Vec::new();
        cols.extend(ba.iter().map(|a| eq(0, b1.inflation.compose(a).neg())));
        cols.extend(bb.iter().map(|b| eq(3, b.compose(&t2.deflation).neg())));
        for f in &bf {
            let mut parts = zeros.clone();
            parts[0] = f.compose(&t1.inflation);
            parts[1] = b1.deflation.compose(f);
            cols.push(concat_flat(&parts));
        }
        for g in &bg {
            let mut parts = zeros.clone();
            parts[1] = g.compose(&t1.deflation).neg();
            parts[2] = b2.inflation.compose(g);
            cols.push(concat_flat(&parts));
        }
        for h in &bh {
            let mut parts = zeros.clone();
            parts[2] = h.compose(&j).neg();
            parts[3] = b2.deflation.compose(h);
            cols.push(concat_flat(&parts));
        }
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            for (r, &val) in col.iter().enumerate() {
                m.set(r, c, val);
            }
        }
        let ends = ba.len() + bb.len();
        let kernel = m.kernel_basis();
        let mut proj = Matrix::zeros(field, kernel.len(), ends);
        for (r, k) in kernel.iter().enumerate() {
            for c in 0..ends {
                proj.set(r, c, k.get(c, 0));
            }
        }
        let rr = proj.rref();
        twists_seen = twists_seen.saturating_add(space_size(field, rr.rank));
        if twists_seen > MAX_TWISTS {
            return Ok(None);
        }
        for coeffs in CoefficientIter::new(field, rr.rank) {
            let mut w = vec![0u8; ends];
            for (r, &cf) in coeffs.iter().enumerate() {
                for (c, slot) in w.iter_mut().enumerate() {
                    *slot = field.add(*slot, field.mul(cf, rr.reduced.get(r, c)));
                }
            }
            let alpha = Morphism::linear_combination(&x, &x, &ba, &w[..ba.len()]);
            let beta = Morphism::linear_combination(&v, &v, &bb, &w[ba.len()..]);
            if !(alpha.is_iso() && beta.is_iso()) {
                continue;
            }
            let fixed = m.submatrix(0..rows, 0..ends);
            let rest = m.submatrix(0..rows, ends..cols.len());
            let rhs = fixed.matmul(&Matrix::column(field, &w)).neg();
            let sol = rest.solve_all(&rhs).expect("projection of a kernel vector extends");
            let s = sol.particular;
            let pick = |off: usize, n: usize| (0..n).map(|k| s.get(off + k, 0)).collect::<Vec<u8>>();
            let f = Morphism::linear_combination(&y, &yp, &bf, &pick(0, bf.len()));
            let g = Morphism::linear_combination(&z, &zp, &bg, &pick(bf.len(), bg.len()));
            let h = Morphism::linear_combination(&uu, &up, &bh, &pick(bf.len() + bg.len(), bh.len()));
            return Ok(Some(Some(DiagramWitness { gamma: gamma.clone(), alpha, beta, f, g, h })));
        }
    }
    Ok(Some(None))
}

/// Independent check that a witness commutes and has invertible ends.
pub fn diagram_commutes(u: &Universe, c1: usize, c2: usize, c1p: usize, c2p: usize, w: &DiagramWitness) -> bool {
    let (t1, t2, b1, b2) = (u.conflation(c1), u.conflation(c2), u.conflation(c1p), u.conflation(c2p));
    let j = t2.inflation.compose(&w.gamma);
    w.alpha.is_iso()
        && w.beta.is_iso()
        && w.gamma.is_iso()
        && w.f.compose(&t1.inflation) == b1.inflation.compose(&w.alpha)
        && b1.deflation.compose(&w.f) == w.g.compose(&t1.deflation)
        && b2.inflation.compose(&w.g) == w.h.compose(&j)
        && b2.deflation.compose(&w.h) == w.beta.compose(&t2.deflation)
}

type Row = (String, Outcome, Option<(String, Vec<MapRecord>)>);

fn flush(report: &mut LawReport, rows: Vec<Row>) {
    for (key, outcome, v) in rows {
        report.record(key, outcome, || v.unwrap_or_else(|| ("unreported violation".into(), Vec::new())));
    }
}

/// Part (1): `Ext(Z, X) = 0` and `Y'` divisible force `Z'` divisible.
/// Part (2): `Ext(V, Z') = 0` and `U` flat force `Z` flat. Both only for
/// gluings that close into a diagram.
pub fn law_diagram(ctx: &LawContext, mutation: Option<Mutation>) -> Result<LawReport> {
    let (u, d) = (ctx.u, ctx.d);
    let corrupt = mutation == Some(Mutation::DiagramCorruptStructure);
    let views: Vec<(Vec<Membership>, Vec<Membership>)> = ctx
        .structures
        .iter()
        .map(|s| match s.e.orbits().find(|&c| !u.conflation(c).split).filter(|_| corrupt) {
            Some(c) => {
                let bad = s.e.without(c);
                (div_memberships(u, d, &bad), flat_memberships(u, d, &bad))
            }
            None => (s.div.clone(), s.flat.clone()),
        })
        .collect();
    let top: Vec<usize> = d.orbits().collect();
    let chunks: Vec<Result<Vec<Row>>> = top
        .par_iter()
        .map(|&c1| {
            let mut rows = Vec::new();
            let t1 = u.conflation(c1);
            for c2 in ctx.d_orbits_from(t1.z) {
                let t2 = u.conflation(c2);
                for c1p in ctx.d_orbits_from(t1.x) {
                    let b1 = u.conflation(c1p);
                    for c2p in ctx.d_orbits_from(b1.z).filter(|&c| u.conflation(c).z == t2.z) {
                        let b2 = u.conflation(c2p);
                        let mut found: Option<Option<Option<DiagramWitness>>> = None;
                        let quad = [c1, c2, c1p, c2p].map(|c| orbit_key(u, c)).join("|");
                        for (s, (div, flat)) in ctx.structures.iter().zip(&views) {
                            let mut err = None;
                            let mut realised = || {
                                if found.is_none() {
                                    match find_diagram(u, c1, c2, c1p, c2p) {
                                        Ok(f) => found = Some(f),
                                        Err(e) => {
                                            err = Some(e);
                                            return None;
                                        }
                                    }
                                }
                                found.as_ref().and_then(|f| f.as_ref().map(|w| w.is_some()))
                            };
                            let first = implication(
                                &[ctx.ext0(t1.z, t1.x), tri(div[b1.y])],
                                tri(div[b1.z]),
                                &mut realised,
                            );
                            let second = implication(
                                &[ctx.ext0(t2.z, b1.z), tri(flat[t2.y])],
                                tri(flat[t1.z]),
                                &mut realised,
                            );
                            if let Some(e) = err {
                                return Err(e);
                            }
                            let outcome = first.max(second);
                            let v = (outcome == Outcome::Violated).then(|| {
                                let w = found.clone().flatten().flatten().expect("violations carry a diagram");
                                let part = if first == Outcome::Violated { 1 } else { 2 };
                                let desc = format!(
                                    "part ({part}) fails for {} over top {} then {}, bottom {} then {}",
                                    s.e.describe(u),
                                    orbit_key(u, c1),
                                    orbit_key(u, c2),
                                    orbit_key(u, c1p),
                                    orbit_key(u, c2p)
                                );
                                let maps = vec![
                                    MapRecord::new("i", &t1.inflation),
                                    MapRecord::new("d", &t1.deflation),
                                    MapRecord::new("j", &t2.inflation),
                                    MapRecord::new("p", &t2.deflation),
                                    MapRecord::new("i'", &b1.inflation),
                                    MapRecord::new("d'", &b1.deflation),
                                    MapRecord::new("j'", &b2.inflation),
                                    MapRecord::new("p'", &b2.deflation),
                                    MapRecord::new("alpha", &w.alpha),
                                    MapRecord::new("beta", &w.beta),
                                    MapRecord::new("gamma", &w.gamma),
                                ];
                                (desc, maps)
                            });
                            rows.push((format!("{}|{quad}", s.key), outcome, v));
                        }
                    }
                }
            }
            Ok(rows)
        })
        .collect();
    let mut report = LawReport::new(Law::Diagram, u, mutation);
    for chunk in chunks {
        flush(&mut report, chunk?);
    }
    Ok(report)
}

/// Running truth value of a universal statement: false as soon as one
/// decided instance fails, undecided if some instance could not be read.
#[derive(Default)]
struct Forall {
    failed: bool,
    undecided: bool,
}

impl Forall {
    fn add(&mut self, hyps: &[Option<bool>], concl: Option<bool>) {
        if hyps.contains(&Some(false)) || concl == Some(true) {
            return;
        }
        if hyps.contains(&None) || concl.is_none() {
            self.undecided = true;
        } else {
            self.failed = true;
        }
    }

    fn value(&self) -> Option<bool> {
        if self.failed {
            Some(false)
        } else if self.undecided {
            None
        } else {
            Some(true)
        }
    }
}

fn forall_d(ctx: &LawContext, mut each: impl FnMut(&crate::universe::CanonicalConflation, &mut Forall)) -> Option<bool> {
    let mut acc = Forall::default();
    for c in ctx.d.orbits() {
        each(ctx.u.conflation(c), &mut acc);
    }
    acc.value()
}

fn record_equivalence(report: &mut LawReport, key: String, values: &[Option<bool>], what: impl FnOnce() -> String) {
    report.record(key, equivalence(values), || (format!("{}: statements {}", what(), show(values)), Vec::new()));
}

fn has_enough(ctx: &LawContext, report: &mut LawReport) -> bool {
    let u = ctx.u;
    let mut ok = true;
    for (e, what) in [(&ctx.enough_inj, "injectives"), (&ctx.enough_proj, "projectives")] {
        if e.holds() != Some(true) {
            let missing: Vec<usize> = e.missing.clone();
            report.unmet.push(format!("not enough d-{what} within the bound for {}", labels(u, &missing)));
            ok = false;
        }
    }
    ok
}

fn literal(m: &[usize], i: usize) -> Option<bool> {
    Some(m.contains(&i))
}

/// For `e` generated by `M` and a cotorsion pair `(A, B)`: (i) `d`-conflations
/// `X >-> Y' ->> Z'` with `X` in `B` and `Y'` divisible have `Z'` divisible;
/// (ii) `d`-conflations `Z >-> U ->> V` with `V` in `M` and `U` projective
/// have `Z` in `A`. Dually on the injective side.
pub fn law_cohcot(ctx: &LawContext, mutation: Option<Mutation>) -> LawReport {
    let u = ctx.u;
    let mut report = LawReport::new(Law::Cohcot, u, mutation);
    if !has_enough(ctx, &mut report) {
        return report;
    }
    let drop = mutation == Some(Mutation::CohcotDropProjective);
    for p in &ctx.pairs {
        for s in &ctx.structures {
            for m in &s.proj_gens {
                let first = forall_d(ctx, |c, acc| acc.add(&[tri(p.b[c.x]), tri(s.div[c.y])], tri(s.div[c.z])));
                let second = forall_d(ctx, |c, acc| {
                    let proj = if drop { Some(true) } else { tri(ctx.proj_d[c.y]) };
                    acc.add(&[literal(m, c.z), proj], tri(p.a[c.x]))
                });
                let key = format!("P|{}|{}|{}", p.key, s.key, labels(u, m));
                record_equivalence(&mut report, key, &[first, second], || {
                    format!("pair {} with {} generated by {}", p.pair.format(u), s.e.describe(u), labels(u, m))
                });
            }
            for m in &s.inj_gens {
                let first = forall_d(ctx, |c, acc| acc.add(&[tri(p.a[c.z]), tri(s.flat[c.y])], tri(s.flat[c.x])));
                let second = forall_d(ctx, |c, acc| acc.add(&[literal(m, c.x), tri(ctx.inj_d[c.y])], tri(p.b[c.z])));
                let key = format!("I|{}|{}|{}", p.key, s.key, labels(u, m));
                record_equivalence(&mut report, key, &[first, second], || {
                    format!("pair {} with {} cogenerated by {}", p.pair.format(u), s.e.describe(u), labels(u, m))
                });
            }
        }
    }
    report
}

/// For `e` generated by `M`: (i) divisibles are closed under `d`-deflations;
/// (ii) `d`-conflations `Z >-> U ->> V` with `V` in `M` and `U` projective
/// have `Z` projective. Dually on the injective side.
pub fn law_coh(ctx: &LawContext, mutation: Option<Mutation>) -> LawReport {
    let u = ctx.u;
    let mut report = LawReport::new(Law::Coh, u, mutation);
    let drop = mutation == Some(Mutation::CohDropProjective);
    for s in &ctx.structures {
        for m in &s.proj_gens {
            let first = forall_d(ctx, |c, acc| acc.add(&[tri(s.div[c.y])], tri(s.div[c.z])));
            let second = forall_d(ctx, |c, acc| {
                let proj = if drop { Some(true) } else { tri(ctx.proj_d[c.y]) };
                acc.add(&[literal(m, c.z), proj], tri(ctx.proj_d[c.x]))
            });
            let key = format!("P|{}|{}", s.key, labels(u, m));
            record_equivalence(&mut report, key, &[first, second], || {
                format!("{} generated by {}", s.e.describe(u), labels(u, m))
            });
        }
        for m in &s.inj_gens {
            let first = forall_d(ctx, |c, acc| acc.add(&[tri(s.flat[c.y])], tri(s.flat[c.x])));
            let second = forall_d(ctx, |c, acc| acc.add(&[literal(m, c.x), tri(ctx.inj_d[c.y])], tri(ctx.inj_d[c.z])));
            let key = format!("I|{}|{}", s.key, labels(u, m));
            record_equivalence(&mut report, key, &[first, second], || {
                format!("{} cogenerated by {}", s.e.describe(u), labels(u, m))
            });
        }
    }
    report
}

/// For a cotorsion pair `(A, B)`, with `N` generating its image in DPEx and
/// `M` cogenerating its image in DIEx: (i) `B` is coresolving; (ii)
/// `d`-conflations `Z >-> U ->> V` with `V` in `N` and `U` projective have
/// `Z` in `A`; (iii) `A` is resolving; (iv) `d`-conflations `X >-> Y' ->> Z'`
/// with `X` in `M` and `Y'` injective have `Z'` in `B`.
pub fn law_resolving(ctx: &LawContext, mutation: Option<Mutation>) -> LawReport {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::Resolving, u, mutation);
    if !has_enough(ctx, &mut report) {
        return report;
    }
    let drop = mutation == Some(Mutation::ResolvingDropProjective);
    for (k, p) in ctx.pairs.iter().enumerate() {
        let gens = |poset: &crate::galois::StructurePoset, e: &ExactStructure| {
            poset.position(e).map(|i| poset.generators[i].clone()).unwrap_or_default()
        };
        let ns = gens(&ctx.galois.dpex, &ctx.galois.psi_tilde[k]);
        let ms = gens(&ctx.galois.diex, &ctx.galois.phi_tilde[k]);
        let coresolving = is_coresolving(u, d, &p.pair.b, &|i| p.b[i]);
        let resolving = is_resolving(u, d, &p.pair.a, &|i| p.a[i]);
        let second: Vec<Option<bool>> = ns
            .iter()
            .map(|n| {
                forall_d(ctx, |c, acc| {
                    let proj = if drop { Some(true) } else { tri(ctx.proj_d[c.y]) };
                    acc.add(&[literal(n, c.z), proj], tri(p.a[c.x]))
                })
            })
            .collect();
        let fourth: Vec<Option<bool>> = ms
            .iter()
            .map(|m| forall_d(ctx, |c, acc| acc.add(&[literal(m, c.x), tri(ctx.inj_d[c.y])], tri(p.b[c.z]))))
            .collect();
        for (n, ii) in ns.iter().zip(&second) {
            for (m, iv) in ms.iter().zip(&fourth) {
                let key = format!("{}|{}|{}", p.key, labels(u, n), labels(u, m));
                record_equivalence(&mut report, key, &[coresolving, *ii, resolving, *iv], || {
                    format!("pair {} with N = {}, M = {}", p.pair.format(u), labels(u, n), labels(u, m))
                });
            }
        }
    }
    report
}

/// For `e` in DPEx or DIEx and core `X` with a `d`-conflation `X >-> I ->> C`, `I`
/// injective: (i) `X` is divisible; (ii) some `e`-conflation out of `X` has
/// an injective middle; (iii) some `e`-conflation out of `X` has a divisible
/// middle; (iv) for each set `M` cogenerating `e`, every map `X -> M`
/// extends along `X >-> I`. Dually on the flat side.
pub fn law_ses(ctx: &LawContext, mutation: Option<Mutation>) -> LawReport {
    let u = ctx.u;
    let mut report = LawReport::new(Law::Ses, u, mutation);
    let drop = mutation == Some(Mutation::SesDropInjective);
    for s in &ctx.structures {
        for (side, other, witnesses) in [("P", &s.inj_gens, &ctx.enough_inj), ("I", &s.proj_gens, &ctx.enough_proj)] {
            let proj_side = side == "P";
            for x in 0..u.core_len() {
                let key = format!("{side}|{}|{}", s.key, u.label(x));
                let Some(c) = witnesses.witness(x) else {
                    report.record(key, Outcome::Skipped, || unreachable!());
                    continue;
                };
                let cc = u.conflation(c);
                let (member, orbits) = if proj_side {
                    (&s.div, u.orbits_with_x(x))
                } else {
                    (&s.flat, u.orbits_with_z(x))
                };
                let mut values = vec![tri(member[x])];
                let second = if drop {
                    orbits.iter().any(|&o| s.e.contains(o))
                } else {
                    s.e.contains(c)
                };
                values.push(Some(second));
                let found = orbits.iter().any(|&o| s.e.contains(o) && member[u.conflation(o).y] == Membership::In);
                values.push(found.then_some(true));
                for m in other {
                    let all = m.iter().all(|&k| {
                        if proj_side {
                            crate::exact::extends(u.object(k), &cc.inflation)
                        } else {
                            crate::exact::lifts(u.object(k), &cc.deflation)
                        }
                    });
                    values.push(Some(all));
                }
                report.record(key, equivalence(&values), || {
                    let desc = format!("{} at {}: statements {}", s.e.describe(u), u.label(x), show(&values));
                    (desc, vec![MapRecord::new("inflation", &cc.inflation), MapRecord::new("deflation", &cc.deflation)])
                });
            }
        }
    }
    report
}

/// For a perfect cotorsion pair `(A, B)` and `e = Φ̃(A, B)`, at each core
/// `X`: (i) `X` is `A`-divisible; (ii) the middle of the `B`-envelope of `X`
/// is `A`-divisible; (iii) some `e`-conflation `X >-> B ->> A` has `B` in `B`
/// and `A`-divisible, and `A` in `A`; (iv) some `e`-conflation
/// `X >-> Y ->> A` has `Y` `A`-divisible and `A` in `A`. Dually with
/// `e = Ψ̃(A, B)`, `B`-flatness and `A`-covers.
pub fn law_covenv(ctx: &LawContext, mutation: Option<Mutation>) -> Result<LawReport> {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::Covenv, u, mutation);
    let drop = mutation == Some(Mutation::CovenvDropCokernelClass);
    for (k, p) in ctx.pairs.iter().enumerate() {
        let perfect = is_perfect(u, d, &p.pair)?;
        if perfect.verdict == Perfection::No {
            report.unmet.push(format!("pair {} is not perfect", p.pair.format(u)));
            continue;
        }
        for side in ["env", "cov"] {
            let env = side == "env";
            let e = if env { &ctx.galois.phi_tilde[k] } else { &ctx.galois.psi_tilde[k] };
            if !e.leq(d) {
                report.unmet.push(format!("image of pair {} is not inside d", p.pair.format(u)));
                continue;
            }
            let rel: Vec<Membership> = (0..u.len())
                .map(|i| {
                    if env {
                        div_rel_membership_by(u, d, e, &p.a, i)
                    } else {
                        flat_rel_membership_by(u, d, e, &p.b, i)
                    }
                })
                .collect();
            for x in 0..u.core_len() {
                let key = format!("{side}|{}|{}", p.key, u.label(x));
                if perfect.verdict != Perfection::Yes {
                    report.record(key, Outcome::Skipped, || unreachable!());
                    continue;
                }
                let approx = if env { &perfect.envelopes } else { &perfect.covers };
                let middle = approx.iter().find(|w| w.object == x).map(|w| w.middle);
                let orbits = if env { u.orbits_with_x(x) } else { u.orbits_with_z(x) };
                // the far end of the conflation and the class it must lie in
                let (far_class, mid_class) = if env { (&p.a, &p.b) } else { (&p.b, &p.a) };
                let far = |c: &crate::universe::CanonicalConflation| if env { c.z } else { c.x };
                let exists = |need_mid: bool, need_far: bool| {
                    orbits
                        .iter()
                        .map(|&o| u.conflation(o))
                        .any(|c| {
                            e.contains(c.id)
                                && rel[c.y] == Membership::In
                                && (!need_mid || mid_class[c.y] == Membership::In)
                                && (!need_far || far_class[far(c)] == Membership::In)
                        })
                        .then_some(true)
                };
                let values = [tri(rel[x]), middle.and_then(|m| tri(rel[m])), exists(true, true), exists(false, !drop)];
                report.record(key, equivalence(&values), || {
                    (format!("pair {} at {} ({side}): statements {}", p.pair.format(u), u.label(x), show(&values)), Vec::new())
                });
            }
        }
    }
    Ok(report)
}

fn closure_outcome(check: &ClosureCheck) -> Outcome {
    match check.verdict() {
        Some(true) => Outcome::Checked,
        Some(false) => Outcome::Violated,
        None => Outcome::Skipped,
    }
}

fn record_closure(report: &mut LawReport, u: &Universe, key: String, what: &str, check: ClosureCheck) {
    let outcome = closure_outcome(&check);
    report.record(key, outcome, || {
        let maps = check
            .failures
            .iter()
            .filter(|&&c| c < u.conflations().len())
            .take(3)
            .flat_map(|&c| {
                let cc = u.conflation(c);
                [MapRecord::new("inflation", &cc.inflation), MapRecord::new("deflation", &cc.deflation)]
            })
            .collect();
        (format!("{what}: failing at {:?}", check.failures), maps)
    });
}

/// Divisibles are closed under `d`-extensions and `e`-inflations, flats
/// under `d`-extensions and `e`-deflations.
pub fn law_closure_div_flat(ctx: &LawContext) -> LawReport {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::ClosureDivFlat, u, None);
    for s in &ctx.structures {
        let div = |i: usize| s.div[i];
        let flat = |i: usize| s.flat[i];
        record_closure(&mut report, u, format!("{}|div-ext", s.key), "Div under d-extensions", closed_under_extensions(u, d, &div));
        record_closure(&mut report, u, format!("{}|div-infl", s.key), "Div under e-inflations", closed_under_inflations(u, &s.e, &div));
        record_closure(&mut report, u, format!("{}|flat-ext", s.key), "Flat under d-extensions", closed_under_extensions(u, d, &flat));
        record_closure(&mut report, u, format!("{}|flat-defl", s.key), "Flat under e-deflations", closed_under_deflations(u, &s.e, &flat));
    }
    report
}

/// Divisibles and flats are closed under finite biproducts.
pub fn law_closure_biproducts(ctx: &LawContext) -> LawReport {
    let u = ctx.u;
    let mut report = LawReport::new(Law::ClosureBiproducts, u, None);
    for s in &ctx.structures {
        record_closure(&mut report, u, format!("{}|div", s.key), "Div under biproducts", closed_under_biproducts(u, &|i| s.div[i]));
        record_closure(&mut report, u, format!("{}|flat", s.key), "Flat under biproducts", closed_under_biproducts(u, &|i| s.flat[i]));
    }
    report
}

/// Every object is divisible, or flat, exactly when `d ⊆ e`.
pub fn law_closure_everything(ctx: &LawContext) -> LawReport {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::ClosureEverything, u, None);
    let all = ObjectClass::all(u);
    for s in &ctx.structures {
        let inside = d.leq(&s.e);
        for (name, class) in [("div", div_objects(u, d, &s.e)), ("flat", flat_objects(u, d, &s.e))] {
            let values = [Some(class == all), Some(inside)];
            record_equivalence(&mut report, format!("{}|{name}", s.key), &values, || {
                format!("{name} of {} against d ⊆ e", s.e.describe(u))
            });
        }
    }
    report
}

/// For `e` generated by `M`, every object is divisible exactly when `M`
/// consists of projectives; dually for flats and injectives.
pub fn law_closure_generators(ctx: &LawContext) -> LawReport {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::ClosureGenerators, u, None);
    let all = ObjectClass::all(u);
    for s in &ctx.structures {
        for (side, gens, class, special) in [
            ("P", &s.proj_gens, div_objects(u, d, &s.e), &ctx.proj_d),
            ("I", &s.inj_gens, flat_objects(u, d, &s.e), &ctx.inj_d),
        ] {
            for m in gens {
                let values = [Some(class == all), Some(m.iter().all(|&k| special[k] == Membership::In))];
                record_equivalence(&mut report, format!("{side}|{}|{}", s.key, labels(u, m)), &values, || {
                    format!("{} with generators {}", s.e.describe(u), labels(u, m))
                });
            }
        }
    }
    report
}

/// Largest core for which every literal subset is swept.
const MAX_LITERAL_CORE: usize = 12;

fn literal_subsets(ctx: &LawContext, report: &mut LawReport) -> Vec<ObjectClass> {
    let n = ctx.u.core_len();
    if n > MAX_LITERAL_CORE {
        report.unmet.push(format!("{n} core objects exceed the subset sweep cap of {MAX_LITERAL_CORE}"));
        return Vec::new();
    }
    (0..1u32 << n).map(|mask| ObjectClass::new((0..n).filter(|k| mask >> k & 1 == 1))).collect()
}

fn literal_vec(u: &Universe, a: &ObjectClass) -> Vec<Membership> {
    (0..u.len()).map(|i| if a.contains(i) { Membership::In } else { Membership::Out }).collect()
}

/// For a class `A` closed under `e`-deflations, the `A`-divisibles are
/// closed under `d`-extensions; for `A` closed under `e`-inflations the
/// `A`-flats are.
pub fn law_closure_rel_extensions(ctx: &LawContext) -> LawReport {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::ClosureRelExtensions, u, None);
    let subsets = literal_subsets(ctx, &mut report);
    for s in &ctx.structures {
        for a in &subsets {
            let lit = literal_vec(u, a);
            for (name, hyp) in [
                ("div", closed_under_deflations(u, &s.e, &|i| lit[i]).verdict()),
                ("flat", closed_under_inflations(u, &s.e, &|i| lit[i]).verdict()),
            ] {
                let key = format!("{}|{name}|{}", s.key, a.format(u));
                if hyp == Some(false) {
                    report.record(key, Outcome::Checked, || unreachable!());
                    continue;
                }
                let rel: Vec<Membership> = (0..u.len())
                    .map(|i| if name == "div" { div_rel_membership(u, d, &s.e, a, i) } else { flat_rel_membership(u, d, &s.e, a, i) })
                    .collect();
                let check = closed_under_extensions(u, d, &|i| rel[i]);
                let mut outcome = closure_outcome(&check);
                if hyp.is_none() && outcome == Outcome::Violated {
                    outcome = Outcome::Skipped;
                }
                report.record(key, outcome, || {
                    (format!("{name} relative to {} in {}: failing at {:?}", a.format(u), s.e.describe(u), check.failures), Vec::new())
                });
            }
        }
    }
    report
}

/// `A`-divisibles and `A`-flats are closed under finite biproducts.
pub fn law_closure_rel_biproducts(ctx: &LawContext) -> LawReport {
    let (u, d) = (ctx.u, ctx.d);
    let mut report = LawReport::new(Law::ClosureRelBiproducts, u, None);
    let subsets = literal_subsets(ctx, &mut report);
    for s in &ctx.structures {
        for a in &subsets {
            for name in ["div", "flat"] {
                let rel: Vec<Membership> = (0..u.len())
                    .map(|i| if name == "div" { div_rel_membership(u, d, &s.e, a, i) } else { flat_rel_membership(u, d, &s.e, a, i) })
                    .collect();
                let key = format!("{}|{name}|{}", s.key, a.format(u));
                let what = format!("{name} relative to {} in {}", a.format(u), s.e.describe(u));
                record_closure(&mut report, u, key, &what, closed_under_biproducts(u, &|i| rel[i]));
            }
        }
    }
    report
}

/// Runs one law. Mutations aimed at other laws are ignored.
pub fn run_law(ctx: &LawContext, law: Law, mutation: Option<Mutation>) -> Result<LawReport> {
    let m = mutation.filter(|m| m.law() == law);
    Ok(match law {
        Law::Diagram => law_diagram(ctx, m)?,
        Law::Cohcot => law_cohcot(ctx, m),
        Law::Coh => law_coh(ctx, m),
        Law::Resolving => law_resolving(ctx, m),
        Law::Ses => law_ses(ctx, m),
        Law::Covenv => law_covenv(ctx, m)?,
        Law::ClosureDivFlat => law_closure_div_flat(ctx),
        Law::ClosureBiproducts => law_closure_biproducts(ctx),
        Law::ClosureEverything => law_closure_everything(ctx),
        Law::ClosureGenerators => law_closure_generators(ctx),
        Law::ClosureRelExtensions => law_closure_rel_extensions(ctx),
        Law::ClosureRelBiproducts => law_closure_rel_biproducts(ctx),
    })
}

/// Every law over every structure in DPEx and DIEx and every pair in DCot.
pub fn run_all(u: &Universe, d: &ExactStructure, mutation: Option<Mutation>) -> Result<Vec<LawReport>> {
    let ctx = LawContext::new(u, d)?;
    Law::ALL.iter().map(|&law| run_law(&ctx, law, mutation)).collect()
}
