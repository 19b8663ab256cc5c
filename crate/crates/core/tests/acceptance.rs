//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use exactcat::cli::THREADS_ENV;
use exactcat::exact::{axioms_check, inj_generate, maximal_structure, proj_generate, split_structure, ObjectClass};
use exactcat::ffmat::FieldPrime;
use exactcat::galois::{check_bijection, check_galois, check_xu_characterization, Galois, Side};
use exactcat::laws::{run_all, run_law, LawContext, LawReport, Mutation};
use exactcat::relative::{div_objects, euler_ext_dim_oracle, ext_vanishes, flat_objects, perp_left, perp_right};
use exactcat::repcat::{hom_dim, Quiver};
use exactcat::universe::Universe;

struct Fixture {
    name: &'static str,
    quiver: &'static str,
    bound: usize,
    small: usize,
    u: Universe,
}

fn build(quiver: &str, bound: usize) -> Universe {
    Universe::build(Quiver::parse(quiver).unwrap(), FieldPrime::new(2).unwrap(), bound).unwrap()
}

fn fixtures() -> Vec<Fixture> {
    [("U_A1", "1", 2, 1), ("U_A2", "1->2", 4, 2), ("U_A3", "1->2,2->3", 3, 2)]
        .into_iter()
        .map(|(name, quiver, bound, small)| Fixture { name, quiver, bound, small, u: build(quiver, bound) })
        .collect()
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1u32 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect())
        .collect()
}

type Verdict = (bool, String);

fn axiom_suite(fx: &[Fixture]) -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for f in fx {
        let u = &f.u;
        let d = maximal_structure(u);
        let mut structures = vec![split_structure(u), d.clone()];
        for m in subsets(u.indecomposables()) {
            structures.push(proj_generate(u, &d, &m));
            structures.push(inj_generate(u, &d, &m));
        }
        for e in &structures {
            let r = axioms_check(u, e);
            checked += r.checked;
            if !r.passed() {
                bad.push(format!("{} {}", f.name, e.describe(u)));
            }
        }
    }
    (bad.is_empty(), format!("{checked} configurations, failing {bad:?}"))
}

/// dim Ext(Z, X) = dim Hom(Z, X) - <dim Z, dim X> for a hereditary algebra.
fn euler_oracle(u: &Universe, z: usize, x: usize) -> usize {
    let (zr, xr) = (u.object(z), u.object(x));
    let chi = u.quiver().euler_form(zr.dims(), xr.dims());
    usize::try_from(hom_dim(zr, xr) as i64 - chi).expect("Euler form bounded by Hom")
}

fn oracle_equivalence(fx: &[Fixture]) -> Verdict {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for f in fx {
        let u = &f.u;
        let d = maximal_structure(u);
        for z in 0..u.len() {
            for x in 0..u.len() {
                let Ok(v) = ext_vanishes(u, &d, z, x) else { continue };
                pairs += 1;
                let dim = euler_oracle(u, z, x);
                if v != (dim == 0) || dim != euler_ext_dim_oracle(u, z, x) {
                    bad.push(format!("{} Ext({}, {})", f.name, u.label(z), u.label(x)));
                }
            }
        }
    }
    let a2 = &fx[1].u;
    let (s1, s2) = (a2.resolve_name("S1").unwrap(), a2.resolve_name("S2").unwrap());
    let one = euler_oracle(a2, s1, s2);
    let ok = bad.is_empty() && one == 1;
    (ok, format!("{pairs} in-bound pairs, dim Ext(S1, S2) = {one}, mismatches {bad:?}"))
}

fn ext_sweep(fx: &[Fixture]) -> Verdict {
    let mut sets = 0;
    let mut bad = Vec::new();
    for f in fx {
        let u = &f.u;
        let d = maximal_structure(u);
        for m in subsets(&u.core_indecomposables()) {
            sets += 1;
            let class = ObjectClass::new(m.iter().copied());
            if div_objects(u, &d, &proj_generate(u, &d, &m)) != perp_right(u, &d, &class) {
                bad.push(format!("{} div {:?}", f.name, m));
            }
            if flat_objects(u, &d, &inj_generate(u, &d, &m)) != perp_left(u, &d, &class) {
                bad.push(format!("{} flat {:?}", f.name, m));
            }
        }
    }
    (bad.is_empty(), format!("{sets} generating sets, mismatches {bad:?}"))
}

fn galois_laws(fx: &[Fixture]) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for f in fx {
        let u = &f.u;
        let d = maximal_structure(u);
        let r = check_galois(u, &d).unwrap();
        let instances: usize = r.laws.iter().map(|l| l.checked).sum();
        ok &= r.passed();
        notes.push(format!("{} {} instances", f.name, instances));
        if f.name == "U_A2" {
            let sizes = (r.dpex.len(), r.diex.len(), r.dcot.len());
            ok &= sizes == (2, 2, 2);
            notes.push(format!("|DPEx|, |DIEx|, |DCot| = {sizes:?}"));
        }
    }
    (ok, notes.join(", "))
}

fn xu_bijection(fx: &[Fixture]) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for f in fx {
        let r = check_bijection(&f.u, &maximal_structure(&f.u)).unwrap();
        ok &= r.passed() && r.xu_dpex.len() == r.dcot && r.xu_diex.len() == r.dcot;
        if f.name == "U_A2" {
            ok &= r.dcot == 2;
        }
        notes.push(format!("{} count {}", f.name, r.dcot));
    }
    (ok, notes.join(", "))
}

fn law_suite(fx: &[Fixture]) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for f in fx {
        let big = run_all(&f.u, &maximal_structure(&f.u), None).unwrap();
        let small_u = build(f.quiver, f.small);
        let small = run_all(&small_u, &maximal_structure(&small_u), None).unwrap();
        let violations: usize = big.iter().map(|r| r.violations.len()).sum();
        let checked: usize = big.iter().map(|r| r.checked).sum();
        let skipped: usize = big.iter().map(|r| r.skipped).sum();
        let monotone = small.iter().zip(&big).all(|(s, b): (&LawReport, &LawReport)| b.skipped_among(s.outcomes.keys()) <= s.skipped);
        ok &= violations == 0 && monotone;
        notes.push(format!(
            "{} bound {}: {checked} checked, {skipped} skipped, {violations} violations, skips monotone from bound {}: {monotone}",
            f.name, f.bound, f.small
        ));
    }
    (ok, notes.join("; "))
}

fn extensions(fx: &[Fixture]) -> Verdict {
    let u = &fx[1].u;
    let d = maximal_structure(u);
    let g = Galois::compute(u, &d).unwrap();
    let (mut agree, mut undecided, mut disagree, mut no_cover) = (0, 0, 0, 0);
    for (poset, side) in [(&g.dpex, Side::Proj), (&g.diex, Side::Inj)] {
        for e in &poset.elements {
            let x = check_xu_characterization(u, &d, e, side).unwrap();
            if !x.precondition {
                no_cover += 1;
                continue;
            }
            match x.agree() {
                Some(true) => agree += 1,
                Some(false) => disagree += 1,
                None => undecided += 1,
            }
        }
    }
    (disagree == 0, format!("U_A2: {agree} agree, {undecided} undecided, {disagree} disagree, {no_cover} without approximations"))
}

fn mutations(fx: &[Fixture]) -> Verdict {
    let u = &fx[1].u;
    let d = maximal_structure(u);
    let ctx = LawContext::new(u, &d).unwrap();
    let counts: Vec<(Mutation, usize)> =
        Mutation::ALL.iter().map(|&m| (m, run_law(&ctx, m.law(), Some(m)).unwrap().violations.len())).collect();
    let ok = counts.iter().all(|c| c.1 > 0);
    let notes: Vec<String> = counts.iter().map(|(m, n)| format!("{} {n}", m.name())).collect();
    (ok, notes.join(", "))
}

fn determinism(fx: &[Fixture]) -> Verdict {
    let exe = env!("CARGO_BIN_EXE_exactcat");
    let dir = std::env::temp_dir().join(format!("exactcat-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut runs: Vec<Vec<u8>> = Vec::new();
    for (k, threads) in ["1", "4", "4"].iter().enumerate() {
        let mut bytes = Vec::new();
        for f in fx {
            let path = dir.join(format!("{}-{k}.univ", f.name));
            let p = path.to_str().unwrap();
            let bound = f.bound.to_string();
            let steps: [&[&str]; 4] = [
                &["universe", "--quiver", f.quiver, "--prime", "2", "--bound", &bound, "--out", p, "--format", "machine"],
                &["galois", "--universe", p, "--format", "machine"],
                &["laws", "run", "--universe", p, "--format", "machine"],
                &["laws", "run", "--universe", p],
            ];
            for args in steps {
                let o = Command::new(exe).args(args).env(THREADS_ENV, threads).output().unwrap();
                bytes.extend(o.status.code().unwrap_or(-1).to_le_bytes());
                bytes.extend(o.stdout);
            }
            let saved = std::fs::read(&path).unwrap();
            let reloaded = Universe::load(&path).unwrap();
            if reloaded.to_json().as_bytes() != saved.as_slice() || reloaded.to_json() != f.u.to_json() {
                bytes.extend(b"reload mismatch");
            }
            bytes.extend(saved);
        }
        runs.push(bytes);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    (same, format!("3 runs (threads 1, 4, 4), {} bytes each, identical: {same}", runs[0].len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let fx = fixtures();
    let criteria: [(&str, fn(&[Fixture]) -> Verdict); 9] = [
        ("axiom suite", axiom_suite),
        ("oracle equivalence", oracle_equivalence),
        ("Ext criterion sweep", ext_sweep),
        ("Galois laws", galois_laws),
        ("Xu bijection", xu_bijection),
        ("law suite", law_suite),
        ("approximation characterization", extensions),
        ("mutation sensitivity", mutations),
        ("determinism and persistence", determinism),
    ];
    let mut all = true;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check(&fx);
        all &= ok;
        println!("{} criterion {} ({name}): {detail} [{:.1?}]", if ok { "PASS" } else { "FAIL" }, k + 1, t.elapsed());
    }
    println!("total {:.1?}", start.elapsed());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
