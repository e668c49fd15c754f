use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use cstarlab::covers::{compare, extend_by_shilov, join_with_certificates, verify_lattice, Cover, CoverRole};
use cstarlab::dilation::{delta_curve, is_maximal, semidirichlet_scaling_probe, t2_defect_word, t2_sarason_family};
use cstarlab::fdca::{enumerate_ideals, BlockElement};
use cstarlab::matcore::{ToleranceConfig, C64};
use cstarlab::opalg::{
    envelope, generate_algebra, is_boundary_ideal, is_dirichlet, is_semi_dirichlet, shilov_ideal, star_closure_dim,
    OperatorAlgebra,
};
use cstarlab::word::Word;

use crate::document::{parse_algebra, ParsedAlgebra, ParsedRepresentation};
use crate::error::{CliError, CliResult};
use crate::report::{num, short, Csv, Report};
use crate::scenario::{run_scenario, ScenarioSpec, SCENARIOS};

#[derive(Debug, Parser)]
#[command(name = "cstarlab", version, about = "Finite-dimensional operator algebras, C*-covers and dilations")]
pub struct Cli {
    /// Seed for every randomized search; overrides the document's seed.
    #[arg(long, global = true, env = "CSTARLAB_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operations on a single algebra document.
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
    /// Largest boundary ideal of the algebra's ambient block algebra.
    Shilov { file: PathBuf },
    /// C*-envelope of the algebra.
    Envelope { file: PathBuf },
    /// Boundary verdict for every ideal of the ambient.
    BoundaryIdeals { file: PathBuf },
    /// Comparisons and joins of covers given by two documents.
    Covers {
        #[command(subcommand)]
        action: CoversAction,
    },
    /// Adjoins the Shilov ideal and reports the extended algebra.
    ExtendShilov { file: PathBuf },
    /// Checks the lattice maps between ideals and covers.
    Lattice {
        #[command(subcommand)]
        action: LatticeAction,
    },
    /// Twist family of representations of the 2x2 upper triangulars.
    Twist {
        #[command(subcommand)]
        action: TwistAction,
    },
    /// Maximality of a representation via its dilations.
    Maximal {
        #[command(subcommand)]
        action: MaximalAction,
    },
    /// Semi-Dirichlet property of a representation and its rotation.
    Semidirichlet {
        #[command(subcommand)]
        action: SemidirichletAction,
    },
    /// Curated end-to-end scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum AlgebraAction {
    /// Validates the document and prints basic invariants.
    Check { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CoversAction {
    /// Order relation between the covers of two documents over the same
    /// generators; a document without `cover` stands for the ambient cover.
    Compare {
        first: PathBuf,
        second: PathBuf,
        /// Fail unless the relation has this name.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Smallest cover dominating both.
    Join { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum LatticeAction {
    /// Checks the maps between the cover lattices of A and A + I.
    Verify { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum TwistAction {
    /// Defect curve `z ↦ ||σ_z(x)||` along `[0, 1]·e^{iθ}` for the T2 family.
    Sweep {
        /// Mixing parameter of the family, in [0, 1].
        #[arg(long, default_value_t = 0.5)]
        mixing: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        /// Direction of the ray, in radians.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        /// Word in g0, g1, g2; defaults to the defect `g1* g1 + g1 g1* - 1`.
        #[arg(long)]
        word: Option<String>,
        /// Also verify complete contractivity of every twist on the grid.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MaximalAction {
    /// Maximality of the document's `representation`.
    Test {
        file: PathBuf,
        /// Fail unless the status is `maximal`, `not_maximal` or `unknown`.
        #[arg(long)]
        expect: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SemidirichletAction {
    /// Halves the corner of the document's upper triangular representation.
    Check {
        file: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioAction {
    /// Runs one scenario and checks its expected outcomes.
    Run {
        name: String,
        /// Scenario parameter `key=value`; lists are comma separated.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Names of the available scenarios.
    List,
}

/// Report plus the file its CSV should be written to.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub csv_path: Option<PathBuf>,
}

impl Outcome {
    fn new(report: Report) -> Self {
        Outcome { report, csv_path: None }
    }

    fn with_csv(report: Report, path: Option<PathBuf>) -> Self {
        Outcome { report, csv_path: path }
    }

    /// Writes the CSV if requested and returns the exit code.
    pub fn finish(&self) -> CliResult<i32> {
        if let (Some(path), Some(csv)) = (&self.csv_path, &self.report.csv) {
            fs::write(path, csv.render())?;
        }
        Ok(if self.report.passed() { 0 } else { 1 })
    }
}

fn load(path: &Path, seed: Option<u64>) -> CliResult<ParsedAlgebra> {
    let text = fs::read_to_string(path)?;
    let mut doc = parse_algebra(&text)?;
    if let Some(s) = seed {
        doc.tol.rng_seed = s;
    }
    Ok(doc)
}

fn algebra_of(doc: &ParsedAlgebra) -> CliResult<OperatorAlgebra> {
    Ok(generate_algebra(&doc.shape, &doc.generators, &doc.tol)?)
}

fn cover_of(base: &Arc<OperatorAlgebra>, doc: &ParsedAlgebra, tol: &ToleranceConfig) -> CliResult<Cover> {
    Ok(match &doc.cover {
        None => Cover::ambient(base.clone(), tol)?,
        Some((_, images)) => Cover::new(base.clone(), images.clone(), CoverRole::Custom, tol)?,
    })
}

fn representation(doc: &ParsedAlgebra) -> CliResult<&ParsedRepresentation> {
    let rep = doc
        .representation
        .as_ref()
        .ok_or_else(|| CliError::shape("representation", "this command needs a `representation` entry"))?;
    if rep.images.len() != doc.generators.len() {
        return Err(CliError::shape(
            "representation.images",
            format!("{} images for {} generators", rep.images.len(), doc.generators.len()),
        ));
    }
    Ok(rep)
}

fn same_generators(a: &ParsedAlgebra, b: &ParsedAlgebra) -> bool {
    a.shape == b.shape
        && a.generators.len() == b.generators.len()
        && a
            .generators
            .iter()
            .zip(&b.generators)
            .all(|(x, y)| x.max_abs_diff(y) <= a.tol.eps_eq)
}

fn shape_text(sizes: &[usize]) -> String {
    let parts: Vec<String> = sizes.iter().map(|n| format!("M{n}")).collect();
    parts.join(" ⊕ ")
}

/// Executes one parsed command line.
pub fn execute(cli: Cli) -> CliResult<Outcome> {
    let seed = cli.seed;
    match cli.command {
        Command::Algebra {
            action: AlgebraAction::Check { file },
        } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let mut r = Report::new("algebra check");
            r.line(format!("ambient = {}", shape_text(doc.shape.sizes())));
            r.line(format!("generators = {}", doc.names.join(", ")));
            r.line(format!("dim A = {}", a.dim()));
            r.line(format!("dim C*(A) = {}", star_closure_dim(&a, &doc.tol)));
            r.line(format!("self-adjoint: {}", a.is_self_adjoint(&doc.tol)));
            r.line(format!("Dirichlet: {}", is_dirichlet(&a, &doc.tol)));
            r.line(format!("semi-Dirichlet: {}", is_semi_dirichlet(&a, &doc.tol)));
            Ok(Outcome::new(r))
        }
        Command::Shilov { file } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let mut r = Report::new("shilov");
            r.line(format!("Shilov ideal = {}", shilov_ideal(&a, &doc.tol)?));
            Ok(Outcome::new(r))
        }
        Command::Envelope { file } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let env = envelope(&a, &doc.tol)?;
            let mut r = Report::new("envelope");
            r.line(format!("envelope = {}", shape_text(env.target().sizes())));
            for (name, g) in doc.names.iter().zip(env.generator_images()) {
                r.line(format!("{name} ↦ {}", element_text(g)));
            }
            Ok(Outcome::new(r))
        }
        Command::BoundaryIdeals { file } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let mut r = Report::new("boundary-ideals");
            for ideal in enumerate_ideals(&doc.shape)? {
                if ideal.is_full() {
                    continue;
                }
                let v = is_boundary_ideal(&a, &ideal, &doc.tol)?;
                let mut text = format!(
                    "{ideal}: {} (margin {}, levels {})",
                    if v.is_boundary { "boundary" } else { "not boundary" },
                    short(v.margin),
                    v.levels_checked
                );
                if let Some(w) = &v.witness {
                    text.push_str(&format!(
                        ", witness at level {} with norms {} > {}",
                        w.level,
                        short(w.kept_norm.max(w.deleted_norm)),
                        short(w.kept_norm.min(w.deleted_norm))
                    ));
                }
                r.line(text);
            }
            Ok(Outcome::new(r))
        }
        Command::Covers { action } => covers(action, seed),
        Command::ExtendShilov { file } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let ext = extend_by_shilov(&a, &doc.tol)?;
            let api = ext.extended();
            let mut r = Report::new("extend-shilov");
            r.line(format!("Shilov ideal I = {}", ext.ideal()));
            r.line(format!("dim A = {}, dim(A+I) = {}", a.dim(), api.dim()));
            r.line(format!("A ∩ I = 0: {}", api.dim() == a.dim() + ext.ideal().deleted_dim()));
            r.line(format!("Shilov ideal of A+I = {}", shilov_ideal(api, &doc.tol)?));
            Ok(Outcome::new(r))
        }
        Command::Lattice {
            action: LatticeAction::Verify { file },
        } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let report = verify_lattice(&a, &doc.tol)?;
            let mut r = Report::new("lattice verify");
            r.line(format!("Shilov ideal = {}, dim(A+I) = {}", report.shilov, report.extension_dim));
            for c in &report.checks {
                r.check(format!("{} ({})", c.name, c.relation), c.pass);
            }
            Ok(Outcome::new(r))
        }
        Command::Twist {
            action:
                TwistAction::Sweep {
                    mixing,
                    points,
                    angle,
                    word,
                    verify,
                    csv,
                },
        } => {
            if !(0.0..=1.0).contains(&mixing) {
                return Err(CliError::Param(format!("--mixing must lie in [0, 1], got {mixing}")));
            }
            if points < 2 {
                return Err(CliError::Param("--points must be at least 2".into()));
            }
            let mut tol = ToleranceConfig::default();
            if let Some(s) = seed {
                tol.rng_seed = s;
            }
            let family = t2_sarason_family(mixing, &tol)?;
            let w = match &word {
                Some(text) => Word::parse(text)?,
                None => t2_defect_word(),
            };
            let dir = C64::from_polar(1.0, angle);
            let grid: Vec<C64> = (0..points).map(|i| dir * (i as f64 / (points - 1) as f64)).collect();
            let curve = delta_curve(&family, &w, &grid, &tol)?;
            let mut table = Csv::new(&["z_re", "z_im", "delta"]);
            for (z, d) in &curve {
                table.push(vec![num(z.re), num(z.im), num(*d)]);
            }
            let mut r = Report::new("twist sweep");
            r.line(format!("word = {}", w.text()));
            r.line(format!(
                "delta(0) = {}, delta(end) = {}",
                short(curve[0].1),
                short(curve[curve.len() - 1].1)
            ));
            if verify {
                let mut worst = f64::NEG_INFINITY;
                for z in &grid {
                    worst = worst.max(family.twist(*z, &tol)?.contractivity_gap);
                }
                r.check(
                    format!("every twist completely contractive (largest gap {})", short(worst)),
                    worst <= tol.eps_norm,
                );
            }
            r.csv = Some(table);
            Ok(Outcome::with_csv(r, csv))
        }
        Command::Maximal {
            action: MaximalAction::Test { file, expect },
        } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let rep = representation(&doc)?;
            let v = is_maximal(&a, &rep.images, &doc.tol)?;
            let mut r = Report::new("maximal test");
            r.line(format!("status = {}", v.status));
            r.line(format!("evidence: {}", v.evidence));
            r.line(format!("free parameters = {}", v.free_parameters));
            if let Some(c) = &v.certificate {
                r.line(format!(
                    "dilation to dimension {} (compression error {:.1e}, reducing defect {})",
                    c.isometry.rows(),
                    c.compression_error,
                    short(c.reducing_defect)
                ));
            }
            if let Some(e) = expect {
                r.check(format!("status is {e}"), v.status.to_string() == e);
            }
            Ok(Outcome::new(r))
        }
        Command::Semidirichlet {
            action: SemidirichletAction::Check { file, csv },
        } => {
            let doc = load(&file, seed)?;
            let a = algebra_of(&doc)?;
            let rep = representation(&doc)?;
            let split = rep
                .split
                .ok_or_else(|| CliError::shape("representation.split", "the corner split is required"))?;
            let p = semidirichlet_scaling_probe(&a, &rep.images, split, &doc.tol)?;
            let mut r = Report::new("semidirichlet check");
            r.line(format!("A semi-Dirichlet: {}", is_semi_dirichlet(&a, &doc.tol)));
            r.line(format!("corner norm = {}", short(p.corner_norm)));
            r.line(format!("Φ semi-Dirichlet: {}", p.original));
            r.line(format!("Φ' semi-Dirichlet: {}", p.scaled));
            r.line(format!("Φ ⊕ Φ' semi-Dirichlet: {}", p.joint));
            r.line(format!("at least one of Φ, Φ' fails: {}", p.at_least_one_fails()));
            let mut table = Csv::new(&["scale", "semi_dirichlet"]);
            for (s, ok) in &p.family {
                table.push(vec![num(*s), u8::from(*ok).to_string()]);
            }
            r.csv = Some(table);
            Ok(Outcome::with_csv(r, csv))
        }
        Command::Scenario { action } => match action {
            ScenarioAction::List => {
                let mut r = Report::new("scenarios");
                for s in SCENARIOS {
                    r.line(s);
                }
                Ok(Outcome::new(r))
            }
            ScenarioAction::Run { name, params, csv } => {
                let spec = ScenarioSpec::new(&name).with_params(&params)?;
                let r = run_scenario(&spec, seed.unwrap_or(0))?;
                Ok(Outcome::with_csv(r, csv))
            }
        },
    }
}

fn covers(action: CoversAction, seed: Option<u64>) -> CliResult<Outcome> {
    let (first, second) = match &action {
        CoversAction::Compare { first, second, .. } | CoversAction::Join { first, second } => (first, second),
    };
    let d1 = load(first, seed)?;
    let d2 = load(second, seed)?;
    if !same_generators(&d1, &d2) {
        return Err(CliError::shape("generators", "the two documents describe different generators"));
    }
    let tol = d1.tol.clone();
    let base = Arc::new(algebra_of(&d1)?);
    let c1 = cover_of(&base, &d1, &tol)?;
    let c2 = cover_of(&base, &d2, &tol)?;
    match action {
        CoversAction::Compare { expect, .. } => {
            let o = compare(&c1, &c2, &tol)?;
            let mut r = Report::new("covers compare");
            r.line(format!(
                "first = {}, second = {}",
                shape_text(c1.target().sizes()),
                shape_text(c2.target().sizes())
            ));
            r.line(format!("relation = {}", o.relation));
            for (label, h) in [("first → second", &o.forward), ("second → first", &o.backward)] {
                if let Some(h) = h {
                    r.line(format!("{label}: morphism with multiplicities {:?}", h.multiplicity()));
                }
            }
            for (label, ob) in [("first → second", &o.forward_obstruction), ("second → first", &o.backward_obstruction)] {
                if let Some(ob) = ob {
                    r.line(format!(
                        "{label}: obstructed, {} has spectral value {} only in the codomain",
                        ob.word,
                        short(ob.missing_value)
                    ));
                }
            }
            if let Some(e) = expect {
                r.check(format!("relation is {e}"), o.relation.to_string() == e);
            }
            Ok(Outcome::new(r))
        }
        CoversAction::Join { .. } => {
            let (j, h1, h2) = join_with_certificates(&c1, &c2, &tol)?;
            let mut r = Report::new("covers join");
            r.line(format!("join = {}", shape_text(j.target().sizes())));
            r.line(format!("join → first: multiplicities {:?}", h1.multiplicity()));
            r.line(format!("join → second: multiplicities {:?}", h2.multiplicity()));
            Ok(Outcome::new(r))
        }
    }
}

fn element_text(x: &BlockElement) -> String {
    let blocks: Vec<String> = x
        .blocks()
        .iter()
        .map(|m| {
            let rows: Vec<String> = (0..m.rows())
                .map(|i| {
                    let entries: Vec<String> = (0..m.cols()).map(|j| complex_text(m.get(i, j))).collect();
                    format!("[{}]", entries.join(", "))
                })
                .collect();
            format!("[{}]", rows.join(", "))
        })
        .collect();
    blocks.join(" ⊕ ")
}

fn complex_text(z: C64) -> String {
    if z.im.abs() < 1e-12 {
        short(z.re)
    } else {
        format!("{}{}{}i", short(z.re), if z.im < 0.0 { "-" } else { "+" }, short(z.im.abs()))
    }
}
