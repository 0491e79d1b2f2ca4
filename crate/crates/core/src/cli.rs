//! Command-line front end: loads fixtures, runs computations and checks, and
//! writes a JSON report.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dgcat::{
    check_homotopy_category, check_nerve_of_inclusion, check_normalized_kernel, dg_fixtures, linear_dg_nerve, subset_label, Comparison,
    DGCategory, DGFixture, SSimplex,
};
use crate::doldkan::{check_monoidal_associativity, counit, gamma, monoidal_iso, normalize, unit, AugSimplicial, ChainComplex, ChainFixture};
use crate::exactcore::{Comb, Ring};
use crate::fixtures::{
    glued_naf, glued_simplex, linear_categories, quasi_categories, simplex_with_extra_face, standard_mutations, two_triangle_coskeleton,
    GLUED_HORN,
};
use crate::frobenius::{fill_inner_horn, fill_wedge, inverse_mu_naf, naf_on_quasicategory, simplex_family, transfer_naf_free, HornData, NaF, NaFFixture};
use crate::intervals::{alternating_sum, Partition};
use crate::report::{Report, WitnessEntry};
use crate::simplicial::{homotopy_category, FinCategory, SimplicialFixture, SimplicialSet};
use crate::templicial::{
    check_free_homotopy, check_underlying_homotopy, check_underlying_nerve, free_nerve_comparison, free_templicial, linear_homotopy_category,
    linear_nerve, random_chain, strong_monoidal_recognize, unique_horn_filling_check, LinearCategory, LinearCategoryFixture, Templicial,
    TemplicialFixture, USimplex,
};
use crate::tensorfrob::{check_kt, check_kt_graded, epsilon_phi, kernel_k, tensor_graded, tensor_t, GradedQuiver};
use crate::{Error, Result};

/// Largest truncation a job may request.
pub const MAX_DIM: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "templike", version, about = "Exact checks for templicial modules and their relatives")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Coefficient ring: Q, Z or Fp (e.g. F7).
    #[arg(long, global = true, default_value = "Q")]
    pub ring: String,
    /// Truncation dimension (at most 8).
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the axioms of a fixture (simplicial, templicial, naF, linear, chain or dg).
    Check { input: String },
    /// The linear nerve of a linear category.
    Nerve { input: String },
    /// The linear dg-nerve of a dg-category.
    DgNerve { input: String },
    /// Fill every inner horn `Λ^n_k` of a quasi-category in its free templicial module.
    FillHorn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        input: String,
    },
    /// Fill every wedge `W^n` of a simplicial set with a naF structure.
    FillWedge {
        #[arg(long)]
        n: usize,
        input: String,
    },
    /// Augmented Dold-Kan round trips on a chain complex (or seeded random ones).
    DoldKan {
        #[arg(long)]
        roundtrip: bool,
        input: Option<String>,
    },
    /// Homotopy category of a quasi-category, linear quasi-category or dg-category.
    HomotopyCat { input: String },
    /// Compare dg-nerve simplices with the templicial side on sampled families.
    Bridge {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        input: String,
    },
    /// Run every acceptance property, plus `check` on the given inputs.
    Suite { inputs: Vec<String> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Nerve { .. } => "nerve",
            Command::DgNerve { .. } => "dg-nerve",
            Command::FillHorn { .. } => "fill-horn",
            Command::FillWedge { .. } => "fill-wedge",
            Command::DoldKan { .. } => "dold-kan",
            Command::HomotopyCat { .. } => "homotopy-cat",
            Command::Bridge { .. } => "bridge",
            Command::Suite { .. } => "suite",
        }
    }
}

/// A loaded fixture.
#[derive(Clone, Debug)]
pub enum Input {
    Simplicial(SimplicialSet),
    Templicial(Templicial),
    NaF(NaF),
    Linear(LinearCategory),
    Chain(ChainComplex),
    DG(DGCategory),
}

impl Input {
    fn kind(&self) -> &'static str {
        match self {
            Input::Simplicial(_) => "simplicial",
            Input::Templicial(_) => "templicial",
            Input::NaF(_) => "naf",
            Input::Linear(_) => "linear",
            Input::Chain(_) => "chain",
            Input::DG(_) => "dg",
        }
    }
}

/// Reads `TEMPLIKE_SEED`, defaulting to 0.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var("TEMPLIKE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Parse(format!("TEMPLIKE_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Resolves `@name` to a built-in fixture, otherwise reads a JSON file.
pub fn load(input: &str, ring: Ring, dim: usize) -> Result<Input> {
    if let Some(name) = input.strip_prefix('@') {
        return builtin(name, ring, dim);
    }
    let text = std::fs::read_to_string(input).map_err(|e| Error::Parse(format!("cannot read {input}: {e}")))?;
    parse_fixture(&text, ring)
}

/// Parses a fixture, recognizing the schema by its distinctive keys.
pub fn parse_fixture(text: &str, ring: Ring) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let has = |k: &str| v.get(k).is_some();
    let de = |e: serde_json::Error| Error::Parse(e.to_string());
    if has("Z") {
        let fx: NaFFixture = serde_json::from_value(v).map_err(de)?;
        Ok(Input::NaF(NaF::from_fixture(&fx)?))
    } else if has("comult") {
        let fx: TemplicialFixture = serde_json::from_value(v).map_err(de)?;
        Ok(Input::Templicial(Templicial::from_fixture(&fx)?))
    } else if has("simplices") {
        let fx: SimplicialFixture = serde_json::from_value(v).map_err(de)?;
        let _ = ring;
        Ok(Input::Simplicial(SimplicialSet::from_fixture(&fx)?))
    } else if has("hom") {
        let fx: DGFixture = serde_json::from_value(v).map_err(de)?;
        Ok(Input::DG(DGCategory::from_fixture(&fx)?))
    } else if has("arrows") {
        let fx: LinearCategoryFixture = serde_json::from_value(v).map_err(de)?;
        Ok(Input::Linear(LinearCategory::from_fixture(&fx)?))
    } else if has("ranks") {
        let fx: ChainFixture = serde_json::from_value(v).map_err(de)?;
        Ok(Input::Chain(ChainComplex::from_fixture(&fx)?))
    } else {
        Err(Error::Parse("unrecognized fixture schema".into()))
    }
}

/// Names accepted after `@`.
pub const BUILTINS: &[&str] = &[
    "poset2",
    "idempotent",
    "span",
    "nerve-poset2",
    "simplex3",
    "cosk-two-triangles",
    "glued-simplex",
    "glued-naf",
    "extra-face",
    "contractible-loop",
    "interval",
    "homotopy",
    "square",
];

fn builtin(name: &str, ring: Ring, dim: usize) -> Result<Input> {
    if let Some((_, c)) = linear_categories(ring).into_iter().find(|(n, _)| *n == name) {
        return Ok(Input::Linear(c));
    }
    if let Some((_, y)) = quasi_categories(dim)?.into_iter().find(|(n, _)| *n == name) {
        return Ok(Input::Simplicial(y));
    }
    if let Some((_, c)) = dg_fixtures(ring, dim).into_iter().find(|(n, _)| *n == name) {
        return Ok(Input::DG(c));
    }
    match name {
        "glued-simplex" => Ok(Input::Simplicial(glued_simplex(dim)?)),
        "glued-naf" => Ok(Input::NaF(transfer_naf_free(&glued_naf(dim)?, ring))),
        "extra-face" => Ok(Input::Simplicial(simplex_with_extra_face(dim)?)),
        _ => Err(Error::Parse(format!("unknown built-in fixture @{name}; known: {}", BUILTINS.join(", ")))),
    }
}

/// Parses arguments, runs the command and writes the report. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let report = match seed_from_env() {
        Ok(seed) => run(&cli, seed),
        Err(e) => {
            let mut r = Report::new(cli.command.name(), 0, cli.ring.clone(), cli.dim.unwrap_or(0));
            r.error("environment", &e.to_string());
            r
        }
    };
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    report.exit_code()
}

/// Runs one job.
pub fn run(cli: &Cli, seed: u64) -> Report {
    let dim = cli.dim.unwrap_or(default_dim(&cli.command));
    let mut report = Report::new(cli.command.name(), seed, cli.ring.clone(), dim);
    let ring = match Ring::parse(&cli.ring) {
        Ok(r) => r,
        Err(e) => {
            report.error("job", &e.to_string());
            return report;
        }
    };
    if dim > MAX_DIM {
        report.error("job", &format!("truncation {dim} exceeds {MAX_DIM}"));
        return report;
    }
    report.ring = ring.to_string();
    let mut job = Job { ring, dim, seed, timings: cli.timings, report };
    if let Err(e) = job.dispatch(&cli.command) {
        match e {
            Error::Parse(_) => job.report.error("input", &e.to_string()),
            other => job.report.fail(WitnessEntry::message(cli.command.name(), &other.to_string())),
        }
    }
    job.report
}

fn default_dim(c: &Command) -> usize {
    match c {
        Command::FillHorn { n, .. } | Command::FillWedge { n, .. } => (*n).max(3),
        Command::Bridge { .. } => 3,
        _ => 4,
    }
}

struct Job {
    ring: Ring,
    dim: usize,
    seed: u64,
    timings: bool,
    report: Report,
}

impl Job {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Job) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        if self.timings {
            self.report.timings.insert(name.into(), start.elapsed().as_millis() as u64);
        }
        out
    }

    fn dispatch(&mut self, cmd: &Command) -> Result<()> {
        match cmd {
            Command::Check { input } => {
                let x = load(input, self.ring, self.dim)?;
                self.check_input("check", &x)
            }
            Command::Nerve { input } => match load(input, self.ring, self.dim)? {
                Input::Linear(c) => {
                    self.report.record("laws", c.check_laws().map_err(|e| crate::templicial::Witness::new(&e.to_string(), &[], "", &[])));
                    let x = linear_nerve(&c, self.dim);
                    self.report.record("nerve", x.check());
                    self.report.output = serde_json::to_value(x.to_fixture()).unwrap_or(Value::Null);
                    Ok(())
                }
                other => Err(Error::Parse(format!("nerve needs a linear category, got a {} fixture", other.kind()))),
            },
            Command::DgNerve { input } => match load(input, self.ring, self.dim)? {
                Input::DG(c) => {
                    self.report.record("dg-category", c.check());
                    let (sharp, t) = linear_dg_nerve(&c)?;
                    self.report.record("narrow-monoid", sharp.monoid.check());
                    self.report.record("frobenius", t.naf.check_frobenius());
                    if self.ring.is_field() {
                        self.report.record("normalized-kernel", check_normalized_kernel(&c)?);
                    }
                    self.report.output = serde_json::to_value(t.naf.to_fixture()).unwrap_or(Value::Null);
                    Ok(())
                }
                other => Err(Error::Parse(format!("dg-nerve needs a dg-category, got a {} fixture", other.kind()))),
            },
            Command::FillHorn { n, k, input } => {
                let y = self.simplicial(input)?;
                self.fill_horns(&y, *n, *k)
            }
            Command::FillWedge { n, input } => {
                let y = self.simplicial(input)?;
                self.fill_wedges(&y, *n)
            }
            Command::DoldKan { roundtrip, input } => {
                let complexes = match input {
                    Some(i) => match load(i, self.ring, self.dim)? {
                        Input::Chain(c) => vec![c],
                        other => return Err(Error::Parse(format!("dold-kan needs a chain complex, got a {} fixture", other.kind()))),
                    },
                    None => {
                        let mut rng = self.rng(8);
                        (0..5).map(|_| ChainComplex::random(self.ring, self.dim.min(4), 2, &mut rng)).collect()
                    }
                };
                self.dold_kan(&complexes, *roundtrip)
            }
            Command::HomotopyCat { input } => {
                let x = load(input, self.ring, self.dim)?;
                self.homotopy(&x)
            }
            Command::Bridge { n, samples, input } => match load(input, self.ring, self.dim)? {
                Input::DG(c) => self.bridge(&c, *n, *samples),
                other => Err(Error::Parse(format!("bridge needs a dg-category, got a {} fixture", other.kind()))),
            },
            Command::Suite { inputs } => {
                let mut loaded = Vec::new();
                for i in inputs {
                    loaded.push((i.clone(), load(i, self.ring, self.dim)?));
                }
                self.suite();
                for (name, x) in loaded {
                    self.check_input(&format!("input/{name}"), &x)?;
                }
                Ok(())
            }
        }
    }

    fn simplicial(&self, input: &str) -> Result<SimplicialSet> {
        match load(input, self.ring, self.dim)? {
            Input::Simplicial(y) => Ok(y),
            other => Err(Error::Parse(format!("expected a simplicial set, got a {} fixture", other.kind()))),
        }
    }

    fn check_input(&mut self, path: &str, x: &Input) -> Result<()> {
        let r = &mut self.report;
        match x {
            Input::Simplicial(y) => {
                r.record(&format!("{path}/identities"), y.check_identities().map_err(witness_of));
                let f = free_templicial(y, self.ring);
                r.record(&format!("{path}/free-templicial"), f.check());
                let dmax = y.dim.min(4);
                if y.is_quasi_category_up_to(dmax)? {
                    let z = naf_on_quasicategory(y)?;
                    r.record(&format!("{path}/naf-faces"), z.check_face_constraints());
                    r.record(&format!("{path}/naf"), z.check(self.ring));
                }
            }
            Input::Templicial(t) => {
                r.record(&format!("{path}/templicial"), t.check());
            }
            Input::NaF(z) => {
                r.record(&format!("{path}/templicial"), z.host.check());
                r.record(&format!("{path}/naf"), z.check_naf());
                r.record(&format!("{path}/frobenius"), z.check_frobenius());
            }
            Input::Linear(c) => {
                r.record(&format!("{path}/laws"), c.check_laws().map_err(witness_of));
                r.record(&format!("{path}/nerve"), linear_nerve(c, self.dim).check());
            }
            Input::Chain(c) => {
                r.record(&format!("{path}/complex"), c.check());
            }
            Input::DG(c) => {
                r.record(&format!("{path}/dg-category"), c.check());
            }
        }
        Ok(())
    }

    fn fill_horns(&mut self, y: &SimplicialSet, n: usize, k: usize) -> Result<()> {
        if !(0 < k && k < n && n <= y.dim) {
            return Err(Error::Parse(format!("no inner horn Λ^{n}_{k} at truncation {}", y.dim)));
        }
        let z = transfer_naf_free(&naf_on_quasicategory(y)?, self.ring);
        let x = &z.host;
        let mut fillers = Vec::new();
        for fam in y.horns(n, k) {
            let names: Vec<&str> = fam.iter().map(|&f| y.name(n - 1, f)).collect();
            let path = format!("horn/{}", names.join(";"));
            let h = HornData::from_simplices(y, n, k, &fam, self.ring);
            match fill_inner_horn(&z, &h) {
                Ok(s) => {
                    let audit = s.validate(x);
                    fillers.push(json!({ "faces": names, "filler": simplex_json(x, &s) }));
                    self.report.record(&path, audit);
                }
                Err(w) => self.report.record(&path, Err(w)),
            }
        }
        self.report.output = json!({ "n": n, "k": k, "fillers": fillers });
        Ok(())
    }

    fn fill_wedges(&mut self, y: &SimplicialSet, n: usize) -> Result<()> {
        if n < 2 || n > y.dim {
            return Err(Error::Parse(format!("no wedge W^{n} at truncation {}", y.dim)));
        }
        let z = transfer_naf_free(&crate::frobenius::naf_from_fillers(y)?, self.ring);
        let x = &z.host;
        let mut fillers = Vec::new();
        for front in 0..y.count(n - 1) {
            for back in (0..y.count(n - 1)).filter(|&b| y.face(n - 1, n - 1, b) == y.face(n - 1, 0, front)) {
                let f = simplex_family(y, n - 1, front, self.ring);
                let b = simplex_family(y, n - 1, back, self.ring);
                let mut w = USimplex { vertices: f.vertices.clone(), edges: Default::default() };
                w.vertices.push(*b.vertices.last().unwrap());
                for i in 0..=n {
                    for j in i + 1..=n {
                        if (i, j) != (0, n) {
                            let v = if i >= 1 { b.at(x, i - 1, j - 1) } else { f.at(x, i, j) };
                            w.edges.insert((i, j), v);
                        }
                    }
                }
                let path = format!("wedge/{};{}", y.name(n - 1, back), y.name(n - 1, front));
                match fill_wedge(&z, &w) {
                    Ok(s) => {
                        fillers.push(json!({ "faces": [y.name(n - 1, back), y.name(n - 1, front)], "filler": simplex_json(x, &s) }));
                        self.report.pass(&path);
                    }
                    Err(wit) => self.report.record(&path, Err(wit)),
                }
            }
        }
        self.report.output = json!({ "n": n, "fillers": fillers });
        Ok(())
    }

    fn dold_kan(&mut self, complexes: &[ChainComplex], roundtrip: bool) -> Result<()> {
        let mut out = Vec::new();
        for (i, c) in complexes.iter().enumerate() {
            let path = format!("complex{i}");
            self.report.record(&format!("{path}/complex"), c.check());
            let g = gamma(c)?;
            self.report.record(&format!("{path}/gamma"), g.module.check());
            let ranks: Vec<usize> = (-1..=g.module.top).map(|l| g.module.rank(l)).collect();
            out.push(json!({ "ranks": (0..=c.dim()).map(|n| c.rank(n)).collect::<Vec<_>>(), "gamma_ranks_from_minus_one": ranks }));
            if roundtrip {
                let n = normalize(&g.module)?;
                let e = counit(&g, &n);
                self.report.record(&format!("{path}/counit-chain-map"), e.check(&n.complex, c));
                self.report.expect(&format!("{path}/counit-iso"), e.is_iso(&n.complex, c)?, "N Γ(C) -> C is not invertible");
                let u = unit(&g.module, &n, &gamma(&n.complex)?)?;
                self.report.expect(&format!("{path}/unit-iso"), u.is_iso(&g.module, &gamma(&n.complex)?.module)?, "Γ N -> id is not invertible");
            }
        }
        self.report.output = json!({ "complexes": out });
        Ok(())
    }

    fn homotopy(&mut self, x: &Input) -> Result<()> {
        match x {
            Input::Simplicial(y) => {
                let (h, _) = homotopy_category(y)?;
                self.report.pass("homotopy-category");
                self.report.output = fin_category_json(&h);
            }
            Input::Templicial(t) => {
                let h = linear_homotopy_category(t)?;
                self.report.record("laws", h.category.check_laws().map_err(witness_of));
                self.report.output = serde_json::to_value(h.category.to_fixture()).unwrap_or(Value::Null);
            }
            Input::Linear(c) => {
                let h = linear_homotopy_category(&linear_nerve(c, self.dim.max(3)))?;
                self.report.record("laws", h.category.check_laws().map_err(witness_of));
                self.report.output = serde_json::to_value(h.category.to_fixture()).unwrap_or(Value::Null);
            }
            Input::DG(c) => {
                let h = c.h_zero()?;
                self.report.record("laws", h.category.check_laws().map_err(witness_of));
                self.report.output = serde_json::to_value(h.category.to_fixture()).unwrap_or(Value::Null);
            }
            other => return Err(Error::Parse(format!("no homotopy category for a {} fixture", other.kind()))),
        }
        Ok(())
    }

    fn bridge(&mut self, c: &DGCategory, n: usize, samples: usize) -> Result<()> {
        let cmp = Comparison::new(c)?;
        if n > cmp.sharp.monoid.dim() {
            return Err(Error::Parse(format!("n = {n} exceeds the nerve truncation {}", cmp.sharp.monoid.dim())));
        }
        let mut rng = self.rng(9 + n as u64);
        let mut first = Value::Null;
        for t in 0..samples {
            let s = SSimplex::random(&cmp.sharp.monoid, n, 2, &mut rng);
            if t == 0 {
                first = family_json(&cmp.to_dg(&s).a, &s.vertices);
            }
            self.report.record(&format!("sample{t}"), cmp.check_simplex(&s)?);
        }
        self.report.output = json!({ "n": n, "samples": samples, "first_dg_simplex": first });
        Ok(())
    }

    /// Every acceptance property on the built-in fixtures, over ℚ.
    fn suite(&mut self) {
        let steps: [(&str, fn(&mut Job) -> Result<()>); 9] = [
            ("c1-templicial-axioms", criterion_axioms),
            ("c2-nerve-recognition", criterion_recognition),
            ("c3-square-of-adjunctions", criterion_square),
            ("c4-naf-pipeline", criterion_naf),
            ("c5-horn-filling", criterion_horns),
            ("c6-partition-lemmas", criterion_partitions),
            ("c7-tensor-frobenius", criterion_tensor),
            ("c8-dold-kan", criterion_dold_kan),
            ("c9-dg-nerves", criterion_dg),
        ];
        for (name, step) in steps {
            let r = self.timed(name, step);
            if let Err(e) = r {
                self.report.fail(WitnessEntry::message(name, &e.to_string()));
            }
        }
    }
}

fn witness_of(e: Error) -> crate::templicial::Witness {
    crate::templicial::Witness::new(&e.to_string(), &[], "", &[])
}

fn comb_json(c: &Comb<usize>) -> Value {
    Value::Array(c.iter().map(|(k, v)| json!([k, v.to_string()])).collect())
}

fn simplex_json(x: &Templicial, s: &USimplex) -> Value {
    let vertices: Vec<&str> = s.vertices.iter().map(|&v| x.base[v].as_str()).collect();
    let mut edges = serde_json::Map::new();
    for (&(i, j), v) in &s.edges {
        let terms: Vec<Value> = v.iter().map(|(&g, c)| json!([x.label(j - i, g), c.to_string()])).collect();
        edges.insert(format!("{i},{j}"), Value::Array(terms));
    }
    json!({ "vertices": vertices, "edges": edges })
}

fn family_json(f: &crate::dgcat::SubsetFamily, vertices: &[usize]) -> Value {
    let mut m = serde_json::Map::new();
    for (&mask, v) in f {
        m.insert(subset_label(mask), comb_json(v));
    }
    json!({ "vertices": vertices, "family": m })
}

fn fin_category_json(h: &FinCategory) -> Value {
    let mut comp: Vec<(String, String, String)> = h
        .compose
        .iter()
        .map(|(&(f, g), &v)| (h.morphisms[f].0.clone(), h.morphisms[g].0.clone(), h.morphisms[v].0.clone()))
        .collect();
    comp.sort();
    json!({
        "objects": h.objects,
        "morphisms": h.morphisms.iter().map(|(n, a, b)| json!([n, h.objects[*a], h.objects[*b]])).collect::<Vec<_>>(),
        "compose": comp,
    })
}

fn criterion_axioms(job: &mut Job) -> Result<()> {
    for (name, c) in linear_categories(Ring::Q) {
        let x = linear_nerve(&c, 5);
        job.report.record(&format!("c1/{name}/nerve"), x.check());
        let muts = standard_mutations(&x);
        job.report.expect(&format!("c1/{name}/mutation-count"), muts.len() == 10, "fewer than 10 mutations available");
        for m in muts {
            let path = format!("c1/{name}/mutate-{}-g{}", m.cell.map_name(), m.generator);
            match m.apply(&x)?.check() {
                Ok(()) => job.report.fail(WitnessEntry::message(&path, "mutation not detected")),
                Err(w) => job.report.expect(&path, w.involved.contains(&m.cell.map_name()), &format!("witness does not name the mutated map: {w}")),
            }
        }
    }
    Ok(())
}

fn criterion_recognition(job: &mut Job) -> Result<()> {
    for (name, c) in linear_categories(Ring::Q) {
        let x = linear_nerve(&c, 5);
        match strong_monoidal_recognize(&x)? {
            Ok((c2, iso)) => {
                let ident: Vec<usize> = (0..c.arrows.len()).collect();
                job.report.expect(&format!("c2/{name}/category"), c.is_iso_via(&c2, &ident), "recognized category differs");
                job.report.record(&format!("c2/{name}/iso"), iso.check(&x, &linear_nerve(&c2, 5)));
            }
            Err(w) => job.report.fail(WitnessEntry::new(&format!("c2/{name}"), &w)),
        }
    }
    let y = free_templicial(&two_triangle_coskeleton(4)?, Ring::Q);
    job.report.expect("c2/cosk-two-triangles/rejected", strong_monoidal_recognize(&y)?.is_err(), "non-nerve accepted");
    job.report.expect("c2/cosk-two-triangles/not-unique-filling", !unique_horn_filling_check(&y)?, "non-nerve fills horns uniquely");
    Ok(())
}

fn criterion_square(job: &mut Job) -> Result<()> {
    let q = Ring::Q;
    for m in 1..=2 {
        let (x, y, f) = free_nerve_comparison(&FinCategory::poset(m), q, 4)?;
        job.report.record(&format!("c3/free-nerve/poset{m}/map"), f.check(&x, &y));
        job.report.expect(&format!("c3/free-nerve/poset{m}/iso"), f.is_iso(&x, &y)?, "not invertible");
    }
    let mut rng = job.rng(3);
    for (name, c) in linear_categories(q) {
        let x = linear_nerve(&c, 4);
        for n in 0..=4 {
            for t in 0..4 {
                let (vs, fs) = random_chain(&c, n, 3, &mut rng);
                job.report.record(&format!("c3/underlying-nerve/{name}/n{n}/s{t}"), check_underlying_nerve(&c, &x, &vs, &fs));
            }
        }
        job.report.record(&format!("c3/homotopy-underlying/{name}"), check_underlying_homotopy(&x, 20, &mut rng)?);
    }
    for (name, y) in quasi_categories(4)? {
        job.report.record(&format!("c3/free-homotopy/{name}"), check_free_homotopy(&y, q)?);
        let x = free_templicial(&y, q);
        job.report.record(&format!("c3/homotopy-underlying/free-{name}"), check_underlying_homotopy(&x, 20, &mut rng)?);
    }
    Ok(())
}

fn criterion_naf(job: &mut Job) -> Result<()> {
    let q = Ring::Q;
    for (name, y) in quasi_categories(4)? {
        let z = naf_on_quasicategory(&y)?;
        job.report.record(&format!("c4/{name}/faces"), z.check_face_constraints());
        job.report.record(&format!("c4/{name}/transfer"), transfer_naf_free(&z, q).check_naf());
    }
    let g = glued_simplex(4)?;
    let z = glued_naf(4)?;
    job.report.record("c4/glued/faces", z.check_face_constraints());
    job.report.record("c4/glued/naf", transfer_naf_free(&z, q).check_naf());
    job.report.expect("c4/glued/not-quasi-category", !g.is_quasi_category_up_to(3)?, "glued simplex fills all inner horns");
    let idx: Vec<usize> = GLUED_HORN.iter().map(|s| g.index_of(2, s).expect("glued triangle")).collect();
    let present = g.horns(3, 1).contains(&idx);
    job.report.expect("c4/glued/documented-horn", present && g.fillers(3, &[0, 2, 3], &idx).is_empty(), "documented horn missing or filled");
    let e = simplex_with_extra_face(4)?;
    job.report.expect("c4/extra-face/wedges", e.first_unliftable_wedge(4)?.is_none(), "a wedge does not lift");
    job.report.expect("c4/extra-face/horn", e.first_unfillable_inner_horn(3)?.is_some(), "all inner horns fill");
    Ok(())
}

fn criterion_horns(job: &mut Job) -> Result<()> {
    for (name, y) in quasi_categories(4)?.into_iter().take(2) {
        let z = transfer_naf_free(&naf_on_quasicategory(&y)?, Ring::Q);
        let mut count = 0;
        for n in 2..=4 {
            for k in 1..n {
                for fam in y.horns(n, k) {
                    let h = HornData::from_simplices(&y, n, k, &fam, Ring::Q);
                    if let Err(w) = fill_inner_horn(&z, &h) {
                        job.report.fail(WitnessEntry::new(&format!("c5/{name}/n{n}k{k}"), &w));
                    }
                    count += 1;
                }
            }
        }
        job.report.expect(&format!("c5/{name}/horns"), count > 0, "no horns enumerated");
    }
    Ok(())
}

fn criterion_partitions(job: &mut Job) -> Result<()> {
    for (name, c) in linear_categories(Ring::Q).into_iter().take(2) {
        let z = inverse_mu_naf(&linear_nerve(&c, 5))?;
        job.report.record(&format!("c6/nerve-{name}"), z.check_higher_compatibility(5));
    }
    let mut rng = job.rng(6);
    for t in 0..2 {
        let v = GradedQuiver::random(Ring::Q, 2, 5, 2, &mut rng);
        job.report.record(&format!("c6/tensor{t}"), tensor_graded(&v).naf.check_higher_compatibility(5));
    }
    let mut bad = None;
    'outer: for n in 0..=7 {
        let parts = Partition::enumerate(n);
        for i in &parts {
            for k in parts.iter().filter(|k| i.is_subset(k) && *k != i) {
                if alternating_sum(i, k) != 0 {
                    bad = Some(format!("n={n} I={} K={}", i.label(), k.label()));
                    break 'outer;
                }
            }
        }
    }
    job.report.expect("c6/alternating-sum", bad.is_none(), &bad.unwrap_or_default());
    Ok(())
}

fn criterion_tensor(job: &mut Job) -> Result<()> {
    let mut rng = job.rng(7);
    for t in 0..5 {
        let v = GradedQuiver::random(Ring::Q, 2, 3, 2, &mut rng);
        let ta = tensor_graded(&v);
        let eq = epsilon_phi(&ta.naf, false)?;
        job.report.record(&format!("c7/tensor{t}/epsilon-phi"), eq.check(&ta.naf));
        job.report.record(&format!("c7/tensor{t}/kernel"), check_kt_graded(&v)?);
    }
    for (name, c) in linear_categories(Ring::Q) {
        let x = inverse_mu_naf(&linear_nerve(&c, 3))?;
        let eq = epsilon_phi(&x, true)?;
        job.report.record(&format!("c7/nerve-{name}/epsilon-phi"), eq.check(&x));
        let (a, _) = kernel_k(&x)?;
        job.report.record(&format!("c7/nerve-{name}/monoid"), a.check());
        job.report.record(&format!("c7/nerve-{name}/kernel-of-tensor"), check_kt(&a)?);
        job.report.record(&format!("c7/nerve-{name}/tensor-frobenius"), tensor_t(&a).naf.check_frobenius());
    }
    Ok(())
}

fn criterion_dold_kan(job: &mut Job) -> Result<()> {
    let q = Ring::Q;
    let mut rng = job.rng(8);
    for t in 0..5 {
        let c = ChainComplex::random(q, 4, 2, &mut rng);
        let g = gamma(&c)?;
        let n = normalize(&g.module)?;
        let e = counit(&g, &n);
        job.report.record(&format!("c8/random{t}/counit"), e.check(&n.complex, &c));
        job.report.expect(&format!("c8/random{t}/counit-iso"), e.is_iso(&n.complex, &c)?, "N Γ(C) -> C is not invertible");
        let gn = gamma(&n.complex)?;
        let u = unit(&g.module, &n, &gn)?;
        job.report.record(&format!("c8/random{t}/unit"), u.check(&g.module, &gn.module));
        job.report.expect(&format!("c8/random{t}/unit-iso"), u.is_iso(&g.module, &gn.module)?, "Γ N -> id is not invertible");
    }
    for m in 0..=3 {
        let a = AugSimplicial::free_simplex(m, 3, q);
        let na = normalize(&a)?;
        let ga = gamma(&na.complex)?;
        let u = unit(&a, &na, &ga)?;
        job.report.record(&format!("c8/simplex{m}/unit"), u.check(&a, &ga.module));
        job.report.expect(&format!("c8/simplex{m}/unit-iso"), u.is_iso(&a, &ga.module)?, "Γ N -> id is not invertible");
        let e = counit(&ga, &normalize(&ga.module)?);
        let nga = normalize(&ga.module)?;
        job.report.expect(&format!("c8/simplex{m}/counit-iso"), e.is_iso(&nga.complex, &na.complex)?, "N Γ -> id is not invertible");
    }
    let a = AugSimplicial::free_simplex(1, 3, q);
    let b = AugSimplicial::free_simplex(0, 3, q);
    let j = a.join(&b);
    let (na, nb, nj) = (normalize(&a)?, normalize(&b)?, normalize(&j.module)?);
    let t = na.complex.tensor(&nb.complex);
    let mu = monoidal_iso(&j, &nj, &na, &nb, &t);
    job.report.record("c8/monoidal/chain-map", mu.check(&nj.complex, &t.complex));
    job.report.expect("c8/monoidal/iso", mu.is_iso(&nj.complex, &t.complex)?, "monoidal map is not invertible");
    job.report.record("c8/monoidal/associative", check_monoidal_associativity(&b, &a, &b)?);
    Ok(())
}

fn criterion_dg(job: &mut Job) -> Result<()> {
    let q = Ring::Q;
    for (name, c) in dg_fixtures(q, 2) {
        job.report.record(&format!("c9/{name}/normalized-kernel"), check_normalized_kernel(&c)?);
        job.report.record(&format!("c9/{name}/homotopy-category"), check_homotopy_category(&c)?);
    }
    for m in 1..=2 {
        let a = LinearCategory::free(&FinCategory::poset(m), q);
        job.report.record(&format!("c9/poset{m}/nerve-of-inclusion"), check_nerve_of_inclusion(&a, 3)?);
    }
    let mut rng = job.rng(9);
    for (name, c) in dg_fixtures(q, 3) {
        let cmp = Comparison::new(&c)?;
        for t in 0..50 {
            let s = SSimplex::random(&cmp.sharp.monoid, t % 5, 2, &mut rng);
            let r = cmp.check_simplex(&s)?;
            if let Err(w) = r {
                job.report.fail(WitnessEntry::new(&format!("c9/{name}/bridge/s{t}"), &w));
            }
        }
        job.report.pass(&format!("c9/{name}/bridge"));
    }
    Ok(())
}
