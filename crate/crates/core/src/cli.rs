//! Command-line front end. Every command writes to the given sink and
//! returns an exit status: 0 on success, 1 when a checked law or axiom
//! fails, 2 on usage, parse or I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cotorsion::{enough_injectives, enough_projectives, is_perfect, pair_cogenerated, pair_generated, CotorsionPair};
use crate::error::{Error, Result};
use crate::exact::{axioms_check, inj_objects, parse_class_list, parse_structure, proj_objects, ExactStructure, ObjectClass};
use crate::ffmat::FieldPrime;
use crate::galois::{check_bijection, check_galois};
use crate::laws::{run_law, Law, LawContext, LawReport, Mutation};
use crate::relative::{div_objects_rel, flat_objects_rel, Restricted};
use crate::repcat::Quiver;
use crate::universe::Universe;

/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "EXACTCAT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "exactcat", version, about = "Exact structures on finite quiver representation categories")]
pub struct Cli {
    /// Output style: aligned text or JSON.
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate objects and conflation orbits up to a dimension bound and save them.
    Universe {
        /// Arrows `i->j`, comma separated; a bare number adds an isolated vertex.
        #[arg(long)]
        quiver: String,
        #[arg(long)]
        prime: u8,
        #[arg(long)]
        bound: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Describe an exact structure and check its axioms.
    Exact {
        #[arg(long)]
        universe: PathBuf,
        /// `split`, `max`, `proj_gen:<list>`, `inj_gen:<list>` or `meet(<e>,<e>)`.
        #[arg(long)]
        e: String,
    },
    /// Relatively divisible objects of `d` with respect to `e`.
    Div(ClassArgs),
    /// Relatively flat objects of `d` with respect to `e`.
    Flat(ClassArgs),
    /// The cotorsion pair generated or cogenerated by a class.
    Cotorsion {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long, default_value = "max")]
        d: String,
        /// Build `(^⊥a, (^⊥a)^⊥)`.
        #[arg(long, conflicts_with = "cogenerated", required_unless_present = "cogenerated")]
        generated: Option<String>,
        /// Build `(^⊥(a^⊥), a^⊥)`.
        #[arg(long)]
        cogenerated: Option<String>,
    },
    /// Posets DPEx, DIEx, DCot and the laws of both connections.
    Galois {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long, default_value = "max")]
        base: String,
    },
    /// The law suite.
    Laws {
        #[command(subcommand)]
        action: LawsAction,
    },
}

#[derive(Debug, clap::Args)]
pub struct ClassArgs {
    #[arg(long)]
    pub universe: PathBuf,
    #[arg(long, default_value = "max")]
    pub d: String,
    #[arg(long)]
    pub e: String,
    /// Restrict to conflations whose middle lies in this class.
    #[arg(long)]
    pub rel: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum LawsAction {
    /// Run laws over every enumerated structure and pair.
    Run {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long, default_value = "max")]
        base: String,
        /// Only these laws; repeatable. Defaults to all.
        #[arg(long = "law")]
        laws: Vec<String>,
        /// Inject a checker defect, to confirm it is caught.
        #[arg(long)]
        mutation: Option<String>,
    },
    /// List law and mutation names.
    List,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Universe { quiver, prime, bound, out: path } => cmd_universe(cli.format, out, quiver, *prime, *bound, path),
        Command::Exact { universe, e } => cmd_exact(cli.format, out, &Universe::load(universe)?, e),
        Command::Div(a) => cmd_class(cli.format, out, a, true),
        Command::Flat(a) => cmd_class(cli.format, out, a, false),
        Command::Cotorsion { universe, d, generated, cogenerated } => {
            let u = Universe::load(universe)?;
            let (list, gen) = match (generated, cogenerated) {
                (Some(g), _) => (g, true),
                (None, Some(c)) => (c, false),
                (None, None) => return Err(Error::Usage("one of --generated or --cogenerated is required".into())),
            };
            cmd_cotorsion(cli.format, out, &u, d, list, gen)
        }
        Command::Galois { universe, base } => cmd_galois(cli.format, out, &Universe::load(universe)?, base),
        Command::Laws { action: LawsAction::List } => {
            let names = LawNames {
                laws: Law::ALL.iter().map(|l| l.name()).collect(),
                mutations: Mutation::ALL.iter().map(|m| m.name()).collect(),
            };
            match cli.format {
                Format::Machine => emit(out, &names)?,
                Format::Human => {
                    writeln!(out, "laws: {}", names.laws.join(" "))?;
                    writeln!(out, "mutations: {}", names.mutations.join(" "))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Laws { action: LawsAction::Run { universe, base, laws, mutation } } => {
            let u = Universe::load(universe)?;
            let laws: Vec<Law> = if laws.is_empty() {
                Law::ALL.to_vec()
            } else {
                laws.iter().map(|l| l.parse()).collect::<Result<_>>()?
            };
            let mutation = mutation.as_deref().map(str::parse).transpose()?;
            cmd_laws(cli.format, out, &u, base, &laws, mutation)
        }
    }
}

#[derive(Serialize)]
struct LawNames {
    laws: Vec<&'static str>,
    mutations: Vec<&'static str>,
}

#[derive(Serialize)]
struct UniverseSummary<'a> {
    objects: usize,
    core: usize,
    indecomposables: usize,
    orbits: usize,
    nonsplit_orbits: usize,
    hash: String,
    labels: Vec<&'a str>,
}

fn cmd_universe(format: Format, out: &mut dyn Write, quiver: &str, prime: u8, bound: usize, path: &Path) -> Result<i32> {
    let q = Quiver::parse(quiver)?;
    let u = Universe::build(q, FieldPrime::new(prime)?, bound)?;
    u.save(path)?;
    let s = UniverseSummary {
        objects: u.len(),
        core: u.core_len(),
        indecomposables: u.indecomposables().len(),
        orbits: u.conflations().len(),
        nonsplit_orbits: u.conflations().iter().filter(|c| !c.split).count(),
        hash: u.hash(),
        labels: (0..u.len()).map(|i| u.label(i)).collect(),
    };
    match format {
        Format::Machine => emit(out, &s)?,
        Format::Human => {
            writeln!(out, "objects          {}", s.objects)?;
            writeln!(out, "core objects     {}", s.core)?;
            writeln!(out, "indecomposables  {}", s.indecomposables)?;
            writeln!(out, "orbits           {} ({} nonsplit)", s.orbits, s.nonsplit_orbits)?;
            writeln!(out, "hash             {}", s.hash)?;
            for i in 0..u.len() {
                writeln!(out, "  {i:>4}  {:<12} dim {}", u.label(i), u.dim(i))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn orbit_label(u: &Universe, c: usize) -> String {
    let cc = u.conflation(c);
    format!("{}: {} >-> {} ->> {}", c, u.label(cc.x), u.label(cc.y), u.label(cc.z))
}

#[derive(Serialize)]
struct ExactSummary {
    structure: String,
    orbits: Vec<usize>,
    nonsplit: Vec<String>,
    projectives: String,
    injectives: String,
    axioms: crate::exact::AxiomReport,
}

fn cmd_exact(format: Format, out: &mut dyn Write, u: &Universe, expr: &str) -> Result<i32> {
    let e = parse_structure(u, expr)?;
    let s = ExactSummary {
        structure: e.describe(u),
        orbits: e.orbits().collect(),
        nonsplit: e.orbits().filter(|&c| !u.conflation(c).split).map(|c| orbit_label(u, c)).collect(),
        projectives: proj_objects(u, &e).format(u),
        injectives: inj_objects(u, &e).format(u),
        axioms: axioms_check(u, &e),
    };
    let passed = s.axioms.passed();
    match format {
        Format::Machine => emit(out, &s)?,
        Format::Human => {
            writeln!(out, "structure    {}", s.structure)?;
            writeln!(out, "projectives  {}", s.projectives)?;
            writeln!(out, "injectives   {}", s.injectives)?;
            writeln!(out, "nonsplit orbits:")?;
            for l in &s.nonsplit {
                writeln!(out, "  {l}")?;
            }
            let a = &s.axioms;
            writeln!(
                out,
                "axioms       {} checked, {} skipped, {} violations, {} warnings",
                a.checked,
                a.skipped,
                a.violations.len(),
                a.warnings.len()
            )?;
            for v in &a.violations {
                writeln!(out, "  {:?}: premises {:?} force missing orbit {}", v.axiom, v.premises, v.missing)?;
            }
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct ClassSummary {
    kind: &'static str,
    d: String,
    e: String,
    relative_to: Option<String>,
    members: Vec<usize>,
    class: String,
    undetermined: String,
}

fn cmd_class(format: Format, out: &mut dyn Write, a: &ClassArgs, div: bool) -> Result<i32> {
    let u = Universe::load(&a.universe)?;
    let d = parse_structure(&u, &a.d)?;
    let e = parse_structure(&u, &a.e)?;
    let restricted: Restricted = match &a.rel {
        Some(list) => {
            let class = ObjectClass::new(parse_class_list(&u, list)?);
            if div {
                div_objects_rel(&u, &d, &e, &class)
            } else {
                flat_objects_rel(&u, &d, &e, &class)
            }
        }
        None => {
            let class = if div { crate::relative::div_objects(&u, &d, &e) } else { crate::relative::flat_objects(&u, &d, &e) };
            Restricted { class, undetermined: ObjectClass::empty() }
        }
    };
    let s = ClassSummary {
        kind: if div { "div" } else { "flat" },
        d: d.describe(&u),
        e: e.describe(&u),
        relative_to: a.rel.clone(),
        members: restricted.class.to_vec(),
        class: restricted.class.format(&u),
        undetermined: restricted.undetermined.format(&u),
    };
    match format {
        Format::Machine => emit(out, &s)?,
        Format::Human => {
            let name = if div { "Div" } else { "Flat" };
            match &s.relative_to {
                Some(r) => writeln!(out, "{name}({} - {} | {r}) = {}", a.d, a.e, s.class)?,
                None => writeln!(out, "{name}({} - {}) = {}", a.d, a.e, s.class)?,
            }
            if !restricted.undetermined.is_empty() {
                writeln!(out, "undetermined within the bound: {}", s.undetermined)?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Approx {
    object: String,
    middle: String,
    orbit: Option<usize>,
}

#[derive(Serialize)]
struct CotorsionSummary {
    a: String,
    b: String,
    perfect: String,
    covers: Vec<Approx>,
    envelopes: Vec<Approx>,
    missing_covers: Vec<String>,
    missing_envelopes: Vec<String>,
    enough_injectives: bool,
    enough_projectives: bool,
}

fn cmd_cotorsion(format: Format, out: &mut dyn Write, u: &Universe, d: &str, list: &str, generated: bool) -> Result<i32> {
    let d = parse_structure(u, d)?;
    let class = ObjectClass::new(parse_class_list(u, list)?);
    let pair: CotorsionPair = if generated { pair_generated(u, &d, &class) } else { pair_cogenerated(u, &d, &class) };
    let perf = is_perfect(u, &d, &pair)?;
    let approx = |ws: &[crate::cotorsion::ApproxWitness]| {
        ws.iter()
            .map(|w| Approx { object: u.label(w.object).to_string(), middle: u.label(w.middle).to_string(), orbit: w.orbit })
            .collect::<Vec<_>>()
    };
    let names = |xs: &[usize]| xs.iter().map(|&x| u.label(x).to_string()).collect::<Vec<_>>();
    let s = CotorsionSummary {
        a: pair.a.format(u),
        b: pair.b.format(u),
        perfect: perf.verdict.to_string(),
        covers: approx(&perf.covers),
        envelopes: approx(&perf.envelopes),
        missing_covers: names(&perf.missing_covers),
        missing_envelopes: names(&perf.missing_envelopes),
        enough_injectives: enough_injectives(u, &d, &pair).holds() == Some(true),
        enough_projectives: enough_projectives(u, &d, &pair).holds() == Some(true),
    };
    match format {
        Format::Machine => emit(out, &s)?,
        Format::Human => {
            writeln!(out, "A        {}", s.a)?;
            writeln!(out, "B        {}", s.b)?;
            writeln!(out, "perfect  {}", s.perfect)?;
            writeln!(out, "enough injectives {}, enough projectives {}", s.enough_injectives, s.enough_projectives)?;
            for c in &s.covers {
                writeln!(out, "  cover     {} ->> {}", c.middle, c.object)?;
            }
            for c in &s.envelopes {
                writeln!(out, "  envelope  {} >-> {}", c.object, c.middle)?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct GaloisSummary {
    base: String,
    dpex: Vec<String>,
    diex: Vec<String>,
    dcot: Vec<String>,
    report: crate::galois::GaloisReport,
    bijection: crate::galois::BijectionReport,
}

fn cmd_galois(format: Format, out: &mut dyn Write, u: &Universe, base: &str) -> Result<i32> {
    let d = parse_structure(u, base)?;
    let g = crate::galois::Galois::compute(u, &d)?;
    let describe = |es: &[ExactStructure]| es.iter().map(|e| e.describe(u)).collect::<Vec<_>>();
    let s = GaloisSummary {
        base: d.describe(u),
        dpex: describe(&g.dpex.elements),
        diex: describe(&g.diex.elements),
        dcot: g.dcot.elements.iter().map(|p| p.format(u)).collect(),
        report: check_galois(u, &d)?,
        bijection: check_bijection(u, &d)?,
    };
    let passed = s.report.passed() && s.bijection.passed();
    match format {
        Format::Machine => emit(out, &s)?,
        Format::Human => {
            writeln!(out, "base  {}", s.base)?;
            for (name, items, hasse) in [
                ("DPEx", &s.dpex, &s.report.dpex_hasse),
                ("DIEx", &s.diex, &s.report.diex_hasse),
                ("DCot", &s.dcot, &s.report.dcot_hasse),
            ] {
                writeln!(out, "|{name}| = {}", items.len())?;
                for (i, item) in items.iter().enumerate() {
                    writeln!(out, "  [{i}] {item}")?;
                }
                if !hasse.is_empty() {
                    let edges: Vec<String> = hasse.iter().map(|(a, b)| format!("{a}<{b}")).collect();
                    writeln!(out, "  covers {}", edges.join(" "))?;
                }
            }
            writeln!(out, "{:<44} {:>8} {:>8}", "law", "checked", "failed")?;
            for l in &s.report.laws {
                writeln!(out, "{:<44} {:>8} {:>8}", l.name, l.checked, l.failures.len())?;
                for f in &l.failures {
                    writeln!(out, "    {f}")?;
                }
            }
            let b = &s.bijection;
            writeln!(out, "Xu bijection: |DCot| = {}, |Xu-DPEx| = {}, |Xu-DIEx| = {}", b.dcot, b.xu_dpex.len(), b.xu_diex.len())?;
            for f in &b.failures {
                writeln!(out, "    {f}")?;
            }
            writeln!(out, "{}", if passed { "all laws pass" } else { "FAILED" })?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct LawsSummary {
    base: String,
    universe: String,
    passed: bool,
    reports: Vec<LawReport>,
}

fn cmd_laws(format: Format, out: &mut dyn Write, u: &Universe, base: &str, laws: &[Law], mutation: Option<Mutation>) -> Result<i32> {
    let d = parse_structure(u, base)?;
    let ctx = LawContext::new(u, &d)?;
    let reports = laws.iter().map(|&l| run_law(&ctx, l, mutation)).collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().all(LawReport::passed);
    let s = LawsSummary { base: d.describe(u), universe: u.hash(), passed, reports };
    match format {
        Format::Machine => emit(out, &s)?,
        Format::Human => {
            if let Some(m) = mutation {
                writeln!(out, "mutation {}", m.name())?;
            }
            writeln!(out, "{:<24} {:>9} {:>9} {:>11}", "law", "checked", "skipped", "violations")?;
            for r in &s.reports {
                writeln!(out, "{:<24} {:>9} {:>9} {:>11}", r.law.name(), r.checked, r.skipped, r.violations.len())?;
                for reason in &r.unmet {
                    writeln!(out, "    unmet: {reason}")?;
                }
            }
            for r in &s.reports {
                for v in r.violations.iter().take(5) {
                    writeln!(out, "{}: {} [{}]", r.law.name(), v.description, v.key)?;
                    for m in &v.maps {
                        writeln!(out, "    {} = {}", m.name, serde_json::to_string(&m.components)?)?;
                    }
                }
            }
            writeln!(out, "{}", if passed { "all laws pass" } else { "VIOLATIONS FOUND" })?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}
