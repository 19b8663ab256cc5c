//! Finite universes: every isomorphism class of representation up to a total
//! dimension bound, and every conflation between them up to isomorphism of
//! conflations.
//!
//! Objects are ordered by total dimension, then by dimension vector
//! (descending lexicographic, so `S1` precedes `S2`), then by first
//! appearance in the lexicographic enumeration of arrow matrices. The zero
//! object is always index 0.
//!
//! The *core* of a universe is the set of objects of total dimension at most
//! `bound / 2`. Any two core objects have all their extensions inside the
//! universe, so Ext questions between core objects are decidable; object
//! classes computed by [`crate::relative`] live on the core.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{AxiomRules, LiftTables};
use crate::ffmat::{space_size, CoefficientIter, FieldPrime, Matrix};
use crate::repcat::{
    biproduct, cokernel, find_iso, hom_elements, path_ranks, splits, Conflation, Morphism, Quiver, Rep,
    Representation,
};

pub const FILE_VERSION: u32 = 1;
pub const MAX_BOUND: usize = 6;
/// Refuse dimension vectors with more arrow-matrix tuples than this.
pub const MAX_TUPLES: u64 = 1 << 20;

/// A stored conflation orbit: representative `x >-> y ->> z` between stored
/// objects, with the deflation landing on the stored `z`.
#[derive(Debug, Clone)]
pub struct CanonicalConflation {
    pub id: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub inflation: Morphism,
    pub deflation: Morphism,
    pub split: bool,
}

impl CanonicalConflation {
    pub fn conflation(&self) -> Conflation {
        Conflation { inflation: self.inflation.clone(), deflation: self.deflation.clone() }
    }
}

#[derive(Debug)]
pub struct Universe {
    quiver: Arc<Quiver>,
    field: FieldPrime,
    bound: usize,
    objects: Vec<Rep>,
    labels: Vec<String>,
    decomposition: Vec<Vec<usize>>,
    indecomposables: Vec<usize>,
    sums: HashMap<(usize, usize), usize>,
    buckets: HashMap<(Vec<usize>, Vec<usize>), Vec<usize>>,
    auts: Vec<Vec<Morphism>>,
    aut_gens: Vec<Vec<Morphism>>,
    conflations: Vec<CanonicalConflation>,
    orbit_index: HashMap<(usize, usize, Vec<u8>), usize>,
    zero_orbit: Vec<usize>,
    iso_orbit: Vec<usize>,
    by_x: Vec<Vec<usize>>,
    by_y: Vec<Vec<usize>>,
    by_z: Vec<Vec<usize>>,
    lifting: OnceLock<LiftTables>,
    rules: OnceLock<AxiomRules>,
}

fn dim_vectors(n: usize, bound: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for d in 0..=left {
            cur.push(d);
            rec(n, left - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, bound, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| {
        let (sa, sb): (usize, usize) = (a.iter().sum(), b.iter().sum());
        sa.cmp(&sb).then_with(|| b.cmp(a))
    });
    out
}

fn invariant_key(x: &Representation) -> (Vec<usize>, Vec<usize>) {
    (x.dims().to_vec(), path_ranks(x))
}

/// Enumerates all iso classes with the given dimension vector, in order of
/// first appearance.
fn classes_with_dims(q: &Arc<Quiver>, field: FieldPrime, dims: &[usize]) -> Result<Vec<Rep>> {
    let shapes: Vec<(usize, usize)> = q.arrows().iter().map(|&(s, t)| (dims[t], dims[s])).collect();
    let n: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let count = space_size(field, n);
    if count > MAX_TUPLES {
        return Err(Error::Limit(format!(
            "dimension vector {dims:?} has {count} arrow-matrix tuples; at most {MAX_TUPLES} are enumerated"
        )));
    }
    let mut found: Vec<Rep> = Vec::new();
    let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for entries in CoefficientIter::new(field, n) {
        let mut off = 0;
        let maps = shapes
            .iter()
            .map(|&(r, c)| {
                let m = Matrix::from_rows(field, r, c, &entries[off..off + r * c]).expect("shape");
                off += r * c;
                m
            })
            .collect();
        let rep = Representation::new(q.clone(), field, dims.to_vec(), maps)?;
        let key = path_ranks(&rep);
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().any(|&k| find_iso(&found[k], &rep).is_some()) {
            continue;
        }
        bucket.push(found.len());
        found.push(rep);
    }
    Ok(found)
}

/// Units of `End(x)`, plus a small generating set chosen greedily in
/// enumeration order.
fn automorphism_group(x: &Rep) -> Result<(Vec<Morphism>, Vec<Morphism>)> {
    let units: Vec<Morphism> = hom_elements(x, x)?.into_iter().filter(Morphism::is_iso).collect();
    let id = Morphism::identity(x);
    let mut seen: HashSet<Vec<u8>> = HashSet::from([id.flat()]);
    let mut elems = vec![id];
    let mut gens: Vec<Morphism> = Vec::new();
    for u in &units {
        if elems.len() == units.len() {
            break;
        }
        if seen.contains(&u.flat()) {
            continue;
        }
        gens.push(u.clone());
        let mut k = 0;
        while k < elems.len() {
            for g in &gens {
                let h = g.compose(&elems[k]);
                if seen.insert(h.flat()) {
                    elems.push(h);
                }
            }
            k += 1;
        }
    }
    debug_assert_eq!(elems.len(), units.len());
    Ok((units, gens))
}

/// Orbits of the monomorphisms `x -> y` under `Aut(x) × Aut(y)`. Returns
/// each orbit's representative together with all its members.
fn mono_orbits(
    x: &Rep,
    y: &Rep,
    gens_x: &[Morphism],
    gens_y: &[Morphism],
) -> Result<Vec<(Morphism, Vec<Vec<u8>>)>> {
    let monos: Vec<Morphism> = hom_elements(x, y)?.into_iter().filter(Morphism::is_mono).collect();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out = Vec::new();
    for m in monos {
        if seen.contains(&m.flat()) {
            continue;
        }
        let members = orbit_members(&m, gens_x, gens_y, &mut seen);
        out.push((m, members));
    }
    Ok(out)
}

fn orbit_members(
    m: &Morphism,
    gens_x: &[Morphism],
    gens_y: &[Morphism],
    seen: &mut HashSet<Vec<u8>>,
) -> Vec<Vec<u8>> {
    seen.insert(m.flat());
    let mut queue = vec![m.clone()];
    let mut members = vec![m.flat()];
    while let Some(cur) = queue.pop() {
        let next = gens_y.iter().map(|b| b.compose(&cur)).chain(gens_x.iter().map(|a| cur.compose(a)));
        for h in next {
            let key = h.flat();
            if seen.insert(key.clone()) {
                members.push(key);
                queue.push(h);
            }
        }
    }
    members
}

fn dims_leq(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl Universe {
    /// Enumerates objects and conflation orbits.
    pub fn build(quiver: Quiver, field: FieldPrime, bound: usize) -> Result<Self> {
        if bound > MAX_BOUND {
            return Err(Error::Limit(format!("bound {bound} exceeds the supported maximum {MAX_BOUND}")));
        }
        let q = Arc::new(quiver);
        let vectors = dim_vectors(q.vertices(), bound);
        let per_dims: Vec<Vec<Rep>> =
            vectors.par_iter().map(|d| classes_with_dims(&q, field, d)).collect::<Result<_>>()?;
        let objects: Vec<Rep> = per_dims.into_iter().flatten().collect();
        Universe::from_objects(q, field, bound, objects, None)
    }

    /// Completes a universe from a full object list. When `reps` is given,
    /// conflation orbits are grown from those representatives (in order) and
    /// must cover every monomorphism exactly once.
    fn from_objects(
        q: Arc<Quiver>,
        field: FieldPrime,
        bound: usize,
        objects: Vec<Rep>,
        reps: Option<Vec<(usize, usize, Morphism)>>,
    ) -> Result<Self> {
        let mut buckets: HashMap<(Vec<usize>, Vec<usize>), Vec<usize>> = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            buckets.entry(invariant_key(o)).or_default().push(i);
        }
        let groups: Vec<(Vec<Morphism>, Vec<Morphism>)> =
            objects.par_iter().map(automorphism_group).collect::<Result<_>>()?;
        let (auts, aut_gens): (Vec<_>, Vec<_>) = groups.into_iter().unzip();
        let n = objects.len();
        let mut u = Universe {
            quiver: q,
            field,
            bound,
            objects,
            labels: Vec::new(),
            decomposition: Vec::new(),
            indecomposables: Vec::new(),
            sums: HashMap::new(),
            buckets,
            auts,
            aut_gens,
            conflations: Vec::new(),
            orbit_index: HashMap::new(),
            zero_orbit: vec![usize::MAX; n],
            iso_orbit: vec![usize::MAX; n],
            by_x: vec![Vec::new(); n],
            by_y: vec![Vec::new(); n],
            by_z: vec![Vec::new(); n],
            lifting: OnceLock::new(),
            rules: OnceLock::new(),
        };
        u.compute_sums()?;
        u.compute_labels();
        u.compute_conflations(reps)?;
        Ok(u)
    }

    fn compute_sums(&mut self) -> Result<()> {
        let n = self.objects.len();
        let pairs: Vec<(usize, usize)> = (1..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.objects[i].total_dim() + self.objects[j].total_dim() <= self.bound)
            .collect();
        let classes: Vec<usize> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let bp = biproduct(&self.quiver, self.field, &[self.objects[i].clone(), self.objects[j].clone()]);
                self.classify(&bp.object)
            })
            .collect::<Result<_>>()?;
        self.sums = pairs.into_iter().zip(classes).collect();
        let decomposable: HashSet<usize> = self.sums.values().copied().collect();
        self.indecomposables = (1..n).filter(|k| !decomposable.contains(k)).collect();
        let mut by_sum: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut keys: Vec<_> = self.sums.iter().map(|(&k, &v)| (k, v)).collect();
        keys.sort();
        for (k, v) in keys {
            by_sum.entry(v).or_insert(k);
        }
        let mut dec: Vec<Vec<usize>> = Vec::with_capacity(n);
        for k in 0..n {
            let d = if k == 0 {
                Vec::new()
            } else if let Some(&(i, j)) = by_sum.get(&k) {
                let mut v = [dec[i].clone(), dec[j].clone()].concat();
                v.sort();
                v
            } else {
                vec![k]
            };
            dec.push(d);
        }
        self.decomposition = dec;
        Ok(())
    }

    fn compute_labels(&mut self) {
        let q = &self.quiver;
        let mut base: HashMap<usize, String> = HashMap::new();
        for &k in &self.indecomposables {
            let o = &self.objects[k];
            let name = (0..q.vertices())
                .find(|&v| find_iso(o, &Representation::simple(q.clone(), self.field, v)).is_some())
                .map(|v| format!("S{}", v + 1))
                .or_else(|| {
                    (0..q.vertices())
                        .find(|&v| find_iso(o, &Representation::projective(q.clone(), self.field, v)).is_some())
                        .map(|v| format!("P{}", v + 1))
                })
                .or_else(|| {
                    (0..q.vertices())
                        .find(|&v| find_iso(o, &Representation::injective(q.clone(), self.field, v)).is_some())
                        .map(|v| format!("I{}", v + 1))
                })
                .unwrap_or_else(|| format!("M{k}"));
            base.insert(k, name);
        }
        self.labels = self
            .decomposition
            .iter()
            .map(|d| {
                if d.is_empty() {
                    return "0".to_string();
                }
                let mut parts = Vec::new();
                let mut i = 0;
                while i < d.len() {
                    let j = d[i..].iter().take_while(|&&e| e == d[i]).count();
                    let name = &base[&d[i]];
                    parts.push(if j == 1 { name.clone() } else { format!("{name}^{j}") });
                    i += j;
                }
                parts.join("+")
            })
            .collect();
    }

    fn compute_conflations(&mut self, reps: Option<Vec<(usize, usize, Morphism)>>) -> Result<()> {
        let n = self.objects.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| dims_leq(self.objects[x].dims(), self.objects[y].dims()))
            .filter(|&(x, y)| self.objects[x].dims() != self.objects[y].dims() || x == y)
            .collect();
        let given: Option<HashMap<(usize, usize), Vec<Morphism>>> = reps.map(|reps| {
            let mut g: HashMap<(usize, usize), Vec<Morphism>> = HashMap::new();
            for (x, y, m) in reps {
                g.entry((x, y)).or_default().push(m);
            }
            g
        });
        if let Some((x, y)) = given.iter().flat_map(|g| g.keys()).find(|k| !pairs.contains(k)) {
            return Err(Error::Corrupt(format!("conflation between objects {x} and {y} cannot exist")));
        }
        let per_pair: Vec<Vec<(Morphism, Vec<Vec<u8>>)>> = pairs
            .par_iter()
            .map(|&(x, y)| self.pair_orbits(x, y, given.as_ref().map(|g| g.get(&(x, y)).cloned().unwrap_or_default())))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for (&(x, y), orbits) in pairs.iter().zip(per_pair) {
            for (rep, members) in orbits {
                let id = out.len();
                let (c, q) = cokernel(&rep);
                let (z, iso) = self.classify_with_iso(&c)?;
                let deflation = iso.inverse().expect("iso").compose(&q);
                let split = splits(&Conflation { inflation: rep.clone(), deflation: deflation.clone() });
                if x == 0 {
                    self.zero_orbit[y] = id;
                } else if self.objects[x].dims() == self.objects[y].dims() {
                    self.iso_orbit[x] = id;
                } else {
                    for key in members {
                        if self.orbit_index.insert((x, y, key), id).is_some() {
                            return Err(Error::Corrupt(format!("conflation {id} duplicates an earlier orbit")));
                        }
                    }
                }
                self.by_x[x].push(id);
                self.by_y[y].push(id);
                self.by_z[z].push(id);
                out.push(CanonicalConflation { id, x, y, z, inflation: rep, deflation, split });
            }
        }
        self.conflations = out;
        Ok(())
    }

    /// Orbits for one pair. With `given`, the listed representatives must be
    /// pairwise inequivalent and exhaust the monomorphisms.
    fn pair_orbits(
        &self,
        x: usize,
        y: usize,
        given: Option<Vec<Morphism>>,
    ) -> Result<Vec<(Morphism, Vec<Vec<u8>>)>> {
        let (xo, yo) = (&self.objects[x], &self.objects[y]);
        let shortcut = if x == 0 {
            Some(Morphism::zero(xo, yo))
        } else if xo.dims() == yo.dims() {
            Some(Morphism::identity(xo))
        } else {
            None
        };
        let trivial = shortcut.is_some();
        let computed = match shortcut {
            Some(m) => vec![(m, Vec::new())],
            None => mono_orbits(xo, yo, &self.aut_gens[x], &self.aut_gens[y])?,
        };
        let Some(given) = given else { return Ok(computed) };
        if given.len() != computed.len() {
            return Err(Error::Corrupt(format!(
                "objects {x} -> {y}: file lists {} conflation orbits, enumeration finds {}",
                given.len(),
                computed.len()
            )));
        }
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for g in given {
            if !g.is_mono() {
                return Err(Error::Corrupt(format!("objects {x} -> {y}: stored inflation is not injective")));
            }
            if trivial {
                if !(x == 0 || g.is_iso()) {
                    return Err(Error::Corrupt(format!("objects {x} -> {y}: bad trivial orbit")));
                }
                out.push((g, Vec::new()));
                continue;
            }
            if seen.contains(&g.flat()) {
                return Err(Error::Corrupt(format!("objects {x} -> {y}: two stored conflations are isomorphic")));
            }
            let members = orbit_members(&g, &self.aut_gens[x], &self.aut_gens[y], &mut seen);
            out.push((g, members));
        }
        Ok(out)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }
    pub fn field(&self) -> FieldPrime {
        self.field
    }
    pub fn bound(&self) -> usize {
        self.bound
    }
    pub fn len(&self) -> usize {
        self.objects.len()
    }
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
    pub fn object(&self, i: usize) -> &Rep {
        &self.objects[i]
    }
    pub fn objects(&self) -> &[Rep] {
        &self.objects
    }
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }
    pub fn dim(&self, i: usize) -> usize {
        self.objects[i].total_dim()
    }

    /// Number of core objects; the core is the prefix `0..core_len()`.
    pub fn core_len(&self) -> usize {
        self.objects.iter().take_while(|o| 2 * o.total_dim() <= self.bound).count()
    }
    pub fn is_core(&self, i: usize) -> bool {
        2 * self.dim(i) <= self.bound
    }

    pub fn indecomposables(&self) -> &[usize] {
        &self.indecomposables
    }
    pub fn core_indecomposables(&self) -> Vec<usize> {
        self.indecomposables.iter().copied().filter(|&i| self.is_core(i)).collect()
    }
    /// Indecomposable summands with multiplicity, sorted.
    pub fn decomposition(&self, i: usize) -> &[usize] {
        &self.decomposition[i]
    }
    /// Class of `objects[i] ⊕ objects[j]` when it fits in the bound.
    pub fn sum(&self, i: usize, j: usize) -> Option<usize> {
        match (i, j) {
            (0, k) | (k, 0) => Some(k),
            _ => self.sums.get(&(i.min(j), i.max(j))).copied(),
        }
    }
    pub fn automorphisms(&self, i: usize) -> &[Morphism] {
        &self.auts[i]
    }
    pub fn automorphism_generators(&self, i: usize) -> &[Morphism] {
        &self.aut_gens[i]
    }

    pub fn conflations(&self) -> &[CanonicalConflation] {
        &self.conflations
    }
    pub fn conflation(&self, id: usize) -> &CanonicalConflation {
        &self.conflations[id]
    }
    pub fn orbits_with_x(&self, x: usize) -> &[usize] {
        &self.by_x[x]
    }
    pub fn orbits_with_y(&self, y: usize) -> &[usize] {
        &self.by_y[y]
    }
    pub fn orbits_with_z(&self, z: usize) -> &[usize] {
        &self.by_z[z]
    }

    /// Lifting/extension table for every stored object against every orbit.
    pub fn lifting(&self) -> &LiftTables {
        self.lifting.get_or_init(|| LiftTables::compute(self))
    }

    /// Closure rules behind the exact-structure axioms, computed once.
    pub fn axiom_rules(&self) -> &AxiomRules {
        self.rules.get_or_init(|| AxiomRules::compute(self))
    }

    /// Orbit of `0 >-> y ->> y`.
    pub fn zero_orbit(&self, y: usize) -> usize {
        self.zero_orbit[y]
    }

    /// Orbit of `x >-> x ->> 0`.
    pub fn iso_orbit(&self, x: usize) -> usize {
        self.iso_orbit[x]
    }

    /// Stored index of the class of `r`.
    pub fn classify(&self, r: &Rep) -> Result<usize> {
        self.classify_with_iso(r).map(|(i, _)| i)
    }

    /// Stored index together with an isomorphism `objects[i] -> r`.
    pub fn classify_with_iso(&self, r: &Rep) -> Result<(usize, Morphism)> {
        if r.quiver() != &self.quiver || r.field() != self.field {
            return Err(Error::Usage("representation belongs to a different category".into()));
        }
        if r.total_dim() > self.bound {
            return Err(Error::Boundary(format!("object of total dimension {} exceeds bound {}", r.total_dim(), self.bound)));
        }
        let cands = self.buckets.get(&invariant_key(r)).map(Vec::as_slice).unwrap_or(&[]);
        for &k in cands {
            if let Some(iso) = find_iso(&self.objects[k], r) {
                return Ok((k, iso));
            }
        }
        Err(Error::Corrupt("representation matches no stored class".into()))
    }

    /// Orbit of the conflation with the given inflation (any monomorphism
    /// between representations within the bound).
    pub fn orbit_of(&self, inflation: &Morphism) -> Result<usize> {
        if !inflation.is_mono() {
            return Err(Error::Usage("not an inflation".into()));
        }
        let (x, a) = self.classify_with_iso(inflation.source())?;
        let (y, b) = self.classify_with_iso(inflation.target())?;
        if x == 0 {
            return Ok(self.zero_orbit[y]);
        }
        if self.objects[x].dims() == self.objects[y].dims() {
            return Ok(self.iso_orbit[x]);
        }
        let moved = b.inverse().expect("iso").compose(inflation).compose(&a);
        self.orbit_index
            .get(&(x, y, moved.flat()))
            .copied()
            .ok_or_else(|| Error::Corrupt("monomorphism missing from the orbit index".into()))
    }

    /// Orbit of the conflation `ker d >-> Y ->> Z`.
    pub fn orbit_of_deflation(&self, deflation: &Morphism) -> Result<usize> {
        let c = Conflation::from_deflation(deflation.clone())?;
        self.orbit_of(&c.inflation)
    }

    /// Resolves `"3"`, `"S1"`, `"P1"`, `"I2"`, `"M7"`, `"S1^2+P1"` or `"0"`.
    pub fn resolve_name(&self, name: &str) -> Result<usize> {
        let name = name.trim();
        if let Ok(i) = name.parse::<usize>() {
            return (i < self.len()).then_some(i).ok_or_else(|| Error::Usage(format!("no object with id {i}")));
        }
        if let Some(i) = self.labels.iter().position(|l| l == name) {
            return Ok(i);
        }
        let mut acc = 0usize;
        for term in name.split('+') {
            let (base, mult) = match term.split_once('^') {
                Some((b, m)) => (b.trim(), m.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad multiplicity in {term:?}")))?),
                None => (term.trim(), 1),
            };
            let f = self.field;
            let q = &self.quiver;
            let vertex = |s: &str| -> Result<usize> {
                let v: usize = s.parse().map_err(|_| Error::Parse(format!("unknown object name {name:?}")))?;
                (1..=q.vertices()).contains(&v).then_some(v - 1).ok_or_else(|| Error::Usage(format!("no vertex {v}")))
            };
            let rep = if let Some(v) = base.strip_prefix('S') {
                Representation::simple(q.clone(), f, vertex(v)?)
            } else if let Some(v) = base.strip_prefix('P') {
                Representation::projective(q.clone(), f, vertex(v)?)
            } else if let Some(v) = base.strip_prefix('I') {
                Representation::injective(q.clone(), f, vertex(v)?)
            } else if let Some(k) = base.strip_prefix('M') {
                let k: usize = k.parse().map_err(|_| Error::Parse(format!("unknown object name {name:?}")))?;
                self.objects.get(k).cloned().ok_or_else(|| Error::Usage(format!("no object with id {k}")))?
            } else {
                return Err(Error::Parse(format!("unknown object name {name:?}")));
            };
            let k = self.classify(&rep)?;
            for _ in 0..mult {
                acc = self.sum(acc, k).ok_or_else(|| Error::Boundary(format!("{name} exceeds the bound")))?;
            }
        }
        Ok(acc)
    }

    pub fn to_file(&self) -> UniverseFile {
        UniverseFile {
            version: FILE_VERSION,
            quiver: QuiverFile {
                vertices: self.quiver.vertices(),
                arrows: self.quiver.arrows().iter().map(|&(s, t)| [s, t]).collect(),
            },
            prime: self.field.p(),
            bound: self.bound,
            objects: self
                .objects
                .iter()
                .enumerate()
                .map(|(id, o)| ObjectFile {
                    id,
                    dims: o.dims().to_vec(),
                    arrow_matrices: o.maps().iter().map(|m| m.data().to_vec()).collect(),
                })
                .collect(),
            conflations: self
                .conflations
                .iter()
                .map(|c| ConflationFile {
                    id: c.id,
                    x: c.x,
                    y: c.y,
                    z: c.z,
                    inflation_components: c.inflation.components().iter().map(|m| m.data().to_vec()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("serializable");
        s.push('\n');
        s
    }

    /// Content hash of the serialized universe.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Universe::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: UniverseFile = serde_json::from_str(text).map_err(|e| Error::Corrupt(e.to_string()))?;
        Universe::from_file(file)
    }

    /// Rebuilds a universe from its file form, validating every invariant:
    /// shapes and entries, zero object first, pairwise non-isomorphic
    /// objects, completeness against a fresh enumeration, and a conflation
    /// table that partitions all monomorphisms into isomorphism classes.
    pub fn from_file(file: UniverseFile) -> Result<Self> {
        if file.version != FILE_VERSION {
            return Err(Error::Corrupt(format!("unsupported universe file version {}", file.version)));
        }
        if file.bound > MAX_BOUND {
            return Err(Error::Corrupt(format!("bound {} exceeds the supported maximum", file.bound)));
        }
        let field = FieldPrime::new(file.prime).map_err(|e| Error::Corrupt(e.to_string()))?;
        let quiver = Quiver::new(file.quiver.vertices, file.quiver.arrows.iter().map(|a| (a[0], a[1])).collect())
            .map_err(|e| Error::Corrupt(e.to_string()))?;
        let q = Arc::new(quiver);
        let mut objects: Vec<Rep> = Vec::with_capacity(file.objects.len());
        for (i, o) in file.objects.iter().enumerate() {
            if o.id != i {
                return Err(Error::Corrupt(format!("object ids must be sequential; found {} at position {i}", o.id)));
            }
            if o.dims.len() != q.vertices() || o.arrow_matrices.len() != q.arrows().len() {
                return Err(Error::Corrupt(format!("object {i} does not match the quiver")));
            }
            if o.dims.iter().sum::<usize>() > file.bound {
                return Err(Error::Corrupt(format!("object {i} exceeds the bound")));
            }
            let maps = q
                .arrows()
                .iter()
                .zip(&o.arrow_matrices)
                .map(|(&(s, t), e)| Matrix::from_rows_strict(field, o.dims[t], o.dims[s], e))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Corrupt(format!("object {i}: {e}")))?;
            objects.push(Representation::new(q.clone(), field, o.dims.clone(), maps).map_err(|e| Error::Corrupt(e.to_string()))?);
        }
        if objects.first().is_none_or(|o| !o.is_zero()) {
            return Err(Error::Corrupt("object 0 must be the zero object".into()));
        }
        for i in 0..objects.len() {
            for j in 0..i {
                if find_iso(&objects[j], &objects[i]).is_some() {
                    return Err(Error::Corrupt(format!("objects {j} and {i} are isomorphic (duplicated class)")));
                }
            }
        }
        let fresh: usize = dim_vectors(q.vertices(), file.bound)
            .par_iter()
            .map(|d| classes_with_dims(&q, field, d).map(|v| v.len()))
            .sum::<Result<usize>>()?;
        if fresh != objects.len() {
            return Err(Error::Corrupt(format!(
                "file lists {} classes but the bound admits {fresh}",
                objects.len()
            )));
        }
        let mut reps = Vec::with_capacity(file.conflations.len());
        for (i, c) in file.conflations.iter().enumerate() {
            if c.id != i {
                return Err(Error::Corrupt(format!("conflation ids must be sequential; found {} at {i}", c.id)));
            }
            let (Some(x), Some(y)) = (objects.get(c.x), objects.get(c.y)) else {
                return Err(Error::Corrupt(format!("conflation {i} references a missing object")));
            };
            if c.inflation_components.len() != q.vertices() {
                return Err(Error::Corrupt(format!("conflation {i} has the wrong number of components")));
            }
            let comps = (0..q.vertices())
                .map(|v| Matrix::from_rows_strict(field, y.dims()[v], x.dims()[v], &c.inflation_components[v]))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Corrupt(format!("conflation {i}: {e}")))?;
            let m = Morphism::new(x.clone(), y.clone(), comps).map_err(|e| Error::Corrupt(format!("conflation {i}: {e}")))?;
            reps.push((c.x, c.y, m));
        }
        let u = Universe::from_objects(q, field, file.bound, objects, Some(reps))?;
        for (c, f) in u.conflations.iter().zip(&file.conflations) {
            if c.z != f.z {
                return Err(Error::Corrupt(format!("conflation {}: cokernel is object {}, file says {}", c.id, c.z, f.z)));
            }
        }
        let order_ok = u.conflations.iter().zip(&file.conflations).all(|(c, f)| (c.x, c.y) == (f.x, f.y));
        if !order_ok {
            return Err(Error::Corrupt("conflations are not in canonical order".into()));
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverFile {
    pub vertices: usize,
    pub arrows: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectFile {
    pub id: usize,
    pub dims: Vec<usize>,
    pub arrow_matrices: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflationFile {
    pub id: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub inflation_components: Vec<Vec<u8>>,
}

/// On-disk form. Matrices are row-major integer lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseFile {
    pub version: u32,
    pub quiver: QuiverFile,
    pub prime: u8,
    pub bound: usize,
    pub objects: Vec<ObjectFile>,
    pub conflations: Vec<ConflationFile>,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use std::sync::OnceLock;

    pub fn f2() -> FieldPrime {
        FieldPrime::new(2).unwrap()
    }

    pub fn u_a1() -> &'static Universe {
        static U: OnceLock<Universe> = OnceLock::new();
        U.get_or_init(|| Universe::build(Quiver::linear(1), f2(), 2).unwrap())
    }

    pub fn u_a2() -> &'static Universe {
        static U: OnceLock<Universe> = OnceLock::new();
        U.get_or_init(|| Universe::build(Quiver::linear(2), f2(), 4).unwrap())
    }

    pub fn u_a2_small() -> &'static Universe {
        static U: OnceLock<Universe> = OnceLock::new();
        U.get_or_init(|| Universe::build(Quiver::linear(2), f2(), 2).unwrap())
    }

    pub fn u_a3() -> &'static Universe {
        static U: OnceLock<Universe> = OnceLock::new();
        U.get_or_init(|| Universe::build(Quiver::linear(3), f2(), 3).unwrap())
    }

    pub fn idx(u: &Universe, name: &str) -> usize {
        u.resolve_name(name).unwrap()
    }

    #[allow(dead_code)]
    pub fn set(u: &Universe, names: &[&str]) -> Vec<usize> {
        let mut v: Vec<usize> = names.iter().map(|n| idx(u, n)).collect();
        v.sort();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::repcat::{hom_dim, Representation};

    /// Brute-force count of iso classes: bucket every arrow tuple by the
    /// orbit of the base-change group, computed by direct conjugation.
    fn brute_force_a2_classes(bound: usize) -> usize {
        let f = f2();
        let mut total = 0;
        for a in 0..=bound {
            for b in 0..=bound - a {
                // orbits of GL_b × GL_a acting on b×a matrices: classified by rank
                let mut ranks = HashSet::new();
                for e in CoefficientIter::new(f, a * b) {
                    ranks.insert(Matrix::from_rows(f, b, a, &e).unwrap().rank());
                }
                total += ranks.len();
            }
        }
        total
    }

    #[test]
    fn object_counts() {
        assert_eq!(u_a1().len(), 3);
        assert_eq!(u_a2_small().len(), 7);
        assert_eq!(u_a2_small().len(), brute_force_a2_classes(2));
        assert_eq!(u_a2().len(), brute_force_a2_classes(4));
        assert_eq!(u_a2().core_len(), 7);
        assert!(u_a2().object(0).is_zero());
        let labels: Vec<&str> = (0..7).map(|i| u_a2_small().label(i)).collect();
        assert_eq!(labels, ["0", "S1", "S2", "S1^2", "S1+S2", "P1", "S2^2"]);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let again = Universe::build(Quiver::linear(2), f2(), 4).unwrap();
        assert_eq!(again.to_json(), u_a2().to_json());
    }

    #[test]
    fn bound_refused() {
        assert!(matches!(Universe::build(Quiver::linear(2), f2(), 7), Err(Error::Limit(_))));
    }

    #[test]
    fn classify_examples() {
        let u = u_a2();
        let q = u.quiver().clone();
        assert_eq!(u.classify(&Representation::zero(q.clone(), f2())).unwrap(), 0);
        let s1 = Representation::simple(q.clone(), f2(), 0);
        let s2 = Representation::simple(q.clone(), f2(), 1);
        let bp = biproduct(&q, f2(), &[s1.clone(), s2.clone()]);
        assert_eq!(u.classify(&bp.object).unwrap(), idx(u, "S1+S2"));
        assert_ne!(idx(u, "S1+S2"), idx(u, "P1"));
        let (iota, _) = crate::repcat::fixtures::a2_ses();
        let iota = iota.rebased(&Representation::simple(q.clone(), f2(), 1), &Representation::projective(q.clone(), f2(), 0));
        assert_eq!(u.classify(&cokernel(&iota).0).unwrap(), idx(u, "S1"));
        let big = Representation::with_zero_maps(q, f2(), vec![5, 0]);
        assert!(matches!(u.classify(&big), Err(Error::Boundary(_))));
    }

    #[test]
    fn krull_schmidt() {
        for u in [u_a1(), u_a2(), u_a3()] {
            for &k in u.indecomposables() {
                // End(k) has no idempotents besides 0 and 1
                let o = u.object(k);
                let idem = hom_elements(o, o)
                    .unwrap()
                    .into_iter()
                    .filter(|e| e.compose(e) == *e && !e.is_zero() && *e != Morphism::identity(o))
                    .count();
                assert_eq!(idem, 0, "{} has a nontrivial idempotent", u.label(k));
            }
            for i in 0..u.len() {
                let parts: Vec<Rep> = u.decomposition(i).iter().map(|&k| u.object(k).clone()).collect();
                let bp = biproduct(u.quiver(), u.field(), &parts);
                assert!(find_iso(&bp.object, u.object(i)).is_some());
            }
        }
        // A2: S1, S2, P; A3: six interval modules
        assert_eq!(u_a2().indecomposables().len(), 3);
        assert_eq!(u_a3().indecomposables().len(), 6);
        assert_eq!(u_a1().indecomposables().len(), 1);
    }

    #[test]
    fn conflation_table_examples() {
        let u = u_a2();
        let nonsplit: Vec<&CanonicalConflation> = u.conflations().iter().filter(|c| !c.split).collect();
        // within the core-sized universe there is exactly one nonsplit orbit
        let small = u_a2_small();
        let ns: Vec<_> = small.conflations().iter().filter(|c| !c.split).collect();
        assert_eq!(ns.len(), 1);
        assert_eq!((ns[0].x, ns[0].y, ns[0].z), (idx(small, "S2"), idx(small, "P1"), idx(small, "S1")));
        assert_eq!(u.quiver().euler_form(&[1, 0], &[0, 1]), -1);
        assert!(!nonsplit.is_empty());
        for x in 0..u.len() {
            let zero_first = u.orbits_with_x(0).iter().any(|&c| u.conflation(c).y == x && u.conflation(c).z == x);
            let x_x_0 = u.orbits_with_x(x).iter().any(|&c| u.conflation(c).y == x && u.conflation(c).z == 0);
            assert!(zero_first && x_x_0);
        }
        for c in u.conflations() {
            let d: Vec<usize> = (0..2).map(|v| u.object(c.x).dims()[v] + u.object(c.z).dims()[v]).collect();
            assert_eq!(u.object(c.y).dims(), &d[..]);
            assert!(crate::repcat::is_conflation(&c.inflation, &c.deflation));
        }
    }

    #[test]
    fn orbits_partition_monomorphisms() {
        // every mono maps to exactly one orbit, and each orbit's inflation
        // maps back to itself; orbit sizes add to the mono count
        for u in [u_a2_small(), u_a3()] {
            for c in u.conflations() {
                assert_eq!(u.orbit_of(&c.inflation).unwrap(), c.id);
            }
            for x in 1..u.len() {
                for y in 0..u.len() {
                    let (xo, yo) = (u.object(x), u.object(y));
                    if !dims_leq(xo.dims(), yo.dims()) {
                        continue;
                    }
                    for m in hom_elements(xo, yo).unwrap().into_iter().filter(Morphism::is_mono) {
                        let o = u.orbit_of(&m).unwrap();
                        let c = u.conflation(o);
                        assert_eq!((c.x, c.y), (x, y));
                        // the orbit representative is conflation-isomorphic to m:
                        // some automorphism pair carries one to the other
                        let ok = u.automorphisms(y).iter().any(|b| {
                            u.automorphisms(x).iter().any(|a| b.compose(&c.inflation).compose(a) == m)
                        });
                        assert!(ok);
                    }
                }
            }
        }
    }

    #[test]
    fn nonsplit_count_matches_euler_oracle_in_a2() {
        // Ext^1(S1,S2) is 1-dimensional, so S1^a and S2^b extensions are
        // classified by the rank of a b×a matrix; count nonsplit orbits with
        // end terms S2^b, S1^a for a+b ≤ 4 and compare with rank counts.
        let u = u_a2();
        for a in 1..=3usize {
            for b in 1..=4 - a {
                let x = idx(u, &format!("S2^{b}").replace("^1", ""));
                let z = idx(u, &format!("S1^{a}").replace("^1", ""));
                let orbits = u.orbits_with_x(x).iter().filter(|&&c| u.conflation(c).z == z).count();
                assert_eq!(orbits, a.min(b) + 1, "S2^{b} -> ? -> S1^{a}");
                assert_eq!(hom_dim(u.object(z), u.object(x)), 0);
            }
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (name, u) in [("a1", u_a1()), ("a2", u_a2()), ("a3", u_a3())] {
            let p = dir.path().join(format!("{name}.json"));
            u.save(&p).unwrap();
            let v = Universe::load(&p).unwrap();
            assert_eq!(v.to_json(), u.to_json());
            assert_eq!(v.len(), u.len());
        }
    }

    #[test]
    fn load_rejects_corruption() {
        let text = u_a2_small().to_json();
        let mut file: UniverseFile = serde_json::from_str(&text).unwrap();
        let mut dup = file.clone();
        let copy = dup.objects[4].clone();
        dup.objects[5] = ObjectFile { id: 5, ..copy };
        assert!(matches!(Universe::from_file(dup), Err(Error::Corrupt(m)) if m.contains("isomorphic")));
        let mut bad_version = file.clone();
        bad_version.version = 99;
        assert!(Universe::from_file(bad_version).is_err());
        let mut missing = file.clone();
        missing.objects.pop();
        assert!(Universe::from_file(missing).is_err());
        let mut entry = file.clone();
        entry.objects[4].arrow_matrices[0][0] = 2;
        assert!(Universe::from_file(entry).is_err());
        let last = file.conflations.len() - 1;
        file.conflations.remove(last);
        assert!(Universe::from_file(file).is_err());
        assert!(Universe::from_json("{\"version\": 1}").is_err());
    }

    #[test]
    fn resolve_names() {
        let u = u_a2();
        assert_eq!(idx(u, "0"), 0);
        assert_eq!(idx(u, "P1"), idx(u, "I2"));
        assert_eq!(idx(u, "S2"), idx(u, "P2"));
        assert_eq!(idx(u, "S1+S1"), idx(u, "S1^2"));
        assert_eq!(idx(u, "P1^2"), u.sum(idx(u, "P1"), idx(u, "P1")).unwrap());
        assert!(u.resolve_name("X9").is_err());
        assert!(u.resolve_name("S1^5").is_err());
    }
}
