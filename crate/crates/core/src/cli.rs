//! Command-line front-end. `run` parses arguments, writes the report and
//! returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adrep::{self, GroupConfig, Representation};
use crate::cosheaf::{
    self, ComplexDoc, CosheafDoc, IdempotentSystem, SimplicialComplex, SystemDoc, Verdict,
};
use crate::davis;
use crate::exactalg::Ring;
use crate::gcm::{self, catalog, Gcm, GcmDocument, RootDatum, Variant};
use crate::kmalg::{self, build_nplus_serre};
use crate::weyl::{self, RootKind};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "kmkit", version, about = "Kac-Moody root data, adjoint checks, buildings and cosheaf homology")]
struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, env = "KMKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker thread cap.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Validate or classify a generalised Cartan matrix.
    #[command(subcommand)]
    Gcm(GcmCmd),
    /// Positive real roots up to a height.
    Roots(WindowArgs),
    /// Graded dimensions and root multiplicities of the positive part.
    Mult(WindowArgs),
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Exponential identities in the adjoint representation.
    #[command(subcommand)]
    Adjoint(AdjointCmd),
    /// Whether the adjoint representation is over-restricted at a prime.
    Overrestricted(PrimeArgs),
    #[command(subcommand)]
    Group(GroupCmd),
    /// Davis complexes of Weyl-group balls and building balls.
    #[command(subcommand)]
    Davis(DavisCmd),
    #[command(subcommand)]
    Building(BuildingCmd),
    /// Homology of a simplicial complex or a cosheaf.
    Homology(HomologyArgs),
    /// Idempotent geodesic systems on trees.
    #[command(subcommand)]
    Geodesic(GeodesicCmd),
}

#[derive(Args, Debug, Serialize)]
struct GcmArg {
    /// GCM document (JSON) or a catalogue name such as `a2`.
    #[arg(long)]
    gcm: String,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GcmCmd {
    Validate(GcmArg),
    Classify(GcmArg),
}

#[derive(Args, Debug, Serialize)]
struct WindowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    gcm: GcmArg,
    #[arg(long)]
    height: i64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AlgebraCmd {
    /// Basis and structure constants of the truncated algebra.
    Dump {
        #[command(flatten)]
        #[serde(flatten)]
        window: WindowArgs,
        #[arg(long, default_value = "Z")]
        ring: String,
    },
}

#[derive(Args, Debug, Serialize)]
struct PrimeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    gcm: GcmArg,
    #[arg(long)]
    prime: u64,
    /// Extension degree of the coefficient field over F_p.
    #[arg(long, default_value_t = 1)]
    degree: u32,
    /// Height window; defaults to one past the highest root for finite types.
    #[arg(long)]
    height: Option<i64>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AdjointCmd {
    CheckEq1(PrimeArgs),
    CheckEq2(PrimeArgs),
    CheckInd(PrimeArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GroupCmd {
    /// Transport commutator relations to the Y-operators and test kernel words.
    Verify {
        #[command(flatten)]
        #[serde(flatten)]
        prime: PrimeArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DavisCmd {
    /// Davis complex of the Weyl-group ball of a given length.
    Coxeter {
        #[command(flatten)]
        #[serde(flatten)]
        gcm: GcmArg,
        #[arg(long)]
        length: usize,
        /// Keep only complete vertices.
        #[arg(long)]
        core: bool,
    },
    /// Davis realisation of a building ball.
    Ball {
        #[command(flatten)]
        #[serde(flatten)]
        ball: BallArgs,
        #[arg(long)]
        core: bool,
    },
}

#[derive(Args, Debug, Serialize)]
struct BallArgs {
    #[command(flatten)]
    #[serde(flatten)]
    gcm: GcmArg,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    radius: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BuildingCmd {
    Ball(BallArgs),
    Panels(BallArgs),
}

#[derive(Args, Debug, Serialize)]
struct HomologyArgs {
    /// Simplicial complex document; homology with trivial coefficients.
    #[arg(long, conflicts_with = "cosheaf", required_unless_present = "cosheaf")]
    complex: Option<PathBuf>,
    /// Cosheaf document.
    #[arg(long)]
    cosheaf: Option<PathBuf>,
    /// Coefficient ring; defaults to Z for complexes and to the document ring for cosheaves.
    #[arg(long)]
    ring: Option<String>,
    /// Rank of the constant coefficient module.
    #[arg(long, default_value_t = 1)]
    coeff_dim: usize,
}

#[derive(Args, Debug, Serialize)]
struct TreeArgs {
    /// Tree complex document.
    #[arg(long, conflicts_with = "vertices", required_unless_present = "vertices")]
    tree: Option<PathBuf>,
    /// Use a seeded random tree with this many vertices.
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value = "Q")]
    ring: String,
    /// Keep the idempotents diagonal instead of conjugating them.
    #[arg(long)]
    diagonal: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GeodesicCmd {
    Generate(TreeArgs),
    Validate {
        #[arg(long)]
        system: PathBuf,
    },
    /// Homology of the idempotent cosheaf; positive-degree homology is archived.
    Probe {
        #[arg(long, conflicts_with_all = ["tree", "vertices"])]
        system: Option<PathBuf>,
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Random trees; with `--count` each instance draws its size in 2..=N.
        #[arg(long)]
        vertices: Option<usize>,
        /// Coefficient dimension; with `--count` each instance draws it in 1..=D.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long)]
        diagonal: bool,
        /// Number of instances, seeded `seed, seed + 1, ...`.
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value = "counterexamples")]
        archive: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gcm(GcmCmd::Validate(_)) => "gcm validate",
            Command::Gcm(GcmCmd::Classify(_)) => "gcm classify",
            Command::Roots(_) => "roots",
            Command::Mult(_) => "mult",
            Command::Algebra(_) => "algebra dump",
            Command::Adjoint(AdjointCmd::CheckEq1(_)) => "adjoint check-eq1",
            Command::Adjoint(AdjointCmd::CheckEq2(_)) => "adjoint check-eq2",
            Command::Adjoint(AdjointCmd::CheckInd(_)) => "adjoint check-ind",
            Command::Overrestricted(_) => "overrestricted",
            Command::Group(_) => "group verify",
            Command::Davis(DavisCmd::Coxeter { .. }) => "davis coxeter",
            Command::Davis(DavisCmd::Ball { .. }) => "davis ball",
            Command::Building(BuildingCmd::Ball(_)) => "building ball",
            Command::Building(BuildingCmd::Panels(_)) => "building panels",
            Command::Homology(_) => "homology",
            Command::Geodesic(GeodesicCmd::Generate(_)) => "geodesic generate",
            Command::Geodesic(GeodesicCmd::Validate { .. }) => "geodesic validate",
            Command::Geodesic(GeodesicCmd::Probe { .. }) => "geodesic probe",
        }
    }
}

/// What a subcommand produced: the JSON result, an optional table, values
/// resolved on the way (rings, windows) and the exit code.
struct Outcome {
    result: Value,
    tsv: Option<String>,
    resolved: Vec<(&'static str, Value)>,
    code: i32,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, tsv: None, resolved: Vec::new(), code: 0 }
    }

    fn tsv(mut self, table: String) -> Self {
        self.tsv = Some(table);
        self
    }

    fn resolved(mut self, key: &'static str, v: Value) -> Self {
        self.resolved.push((key, v));
        self
    }

    fn violation_if(mut self, failed: bool) -> Self {
        if failed {
            self.code = 3;
        }
        self
    }
}

/// Runs the command line in `args` (program name first), writing the report
/// to `out` unless `--output` is given. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let mut config = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    // Unwrap the externally tagged enum nesting down to the argument object.
    while let Value::Object(m) = &config {
        if m.len() == 1 {
            let inner = m.values().next().cloned().unwrap();
            if inner.is_object() {
                config = inner;
                continue;
            }
        }
        break;
    }
    let mut config = match config {
        Value::Object(m) => m,
        _ => serde_json::Map::new(),
    };
    config.insert("seed".into(), json!(cli.seed));
    config.insert("format".into(), json!(cli.format));

    let name = cli.command.name();
    let outcome = dispatch(&cli);
    let (body, code) = match outcome {
        Ok(o) => {
            for (k, v) in o.resolved {
                config.insert(k.into(), v);
            }
            let text = match (cli.format, o.tsv) {
                (Format::Tsv, Some(t)) => format!("# schema=1 command={name}\n{t}"),
                (Format::Tsv, None) => {
                    let _ = writeln!(err, "no table for `{name}`; writing JSON");
                    envelope(name, &config, "result", o.result)
                }
                (Format::Json, _) => envelope(name, &config, "result", o.result),
            };
            (text, o.code)
        }
        Err(e) => {
            let _ = writeln!(err, "kmkit: {e}");
            let detail = match &e {
                Error::Gcm(g) => json!({"kind": "gcm", "axiom": format!("{:?}", g.axiom), "row": g.row, "col": g.col, "message": g.to_string()}),
                other => json!({"kind": error_kind(other), "message": other.to_string()}),
            };
            (envelope(name, &config, "error", detail), e.exit_code())
        }
    };
    let written = match &cli.output {
        Some(p) => fs::write(p, &body).map_err(|e| e.to_string()),
        None => out.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "kmkit: cannot write report: {e}");
        return 1;
    }
    code
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Invalid(_) => "invalid",
        Error::Gcm(_) => "gcm",
        Error::WindowExceeded(_) => "window-exceeded",
        Error::IntegralDefect(_) => "integral-defect",
        Error::Violation(_) => "violation",
        Error::Unsupported(_) => "unsupported",
    }
}

fn envelope(name: &str, config: &serde_json::Map<String, Value>, key: &str, v: Value) -> String {
    let doc = json!({"schema": 1, "command": name, "config": config, key: v});
    let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialises")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

/// Reads a document, accepting either the bare document or a report whose
/// `result` holds it.
fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bad = |e: serde_json::Error| Error::invalid(format!("{}: {e}", path.display()));
    let mut v: Value = serde_json::from_str(&read(path)?).map_err(bad)?;
    if v.get("command").is_some() {
        if let Some(r) = v.get_mut("result") {
            v = r.take();
        }
    }
    serde_json::from_value(v).map_err(bad)
}

fn load_gcm_doc(arg: &GcmArg) -> Result<GcmDocument> {
    let path = Path::new(&arg.gcm);
    if path.exists() {
        return GcmDocument::parse(&read(path)?);
    }
    let g = match arg.gcm.to_ascii_lowercase().as_str() {
        "a1" => catalog::a1(),
        "a2" => catalog::a2(),
        "a3" => catalog::a3(),
        "b2" => catalog::b2(),
        "g2" => catalog::g2(),
        "affine-a1" | "a1-affine" => catalog::affine_a1(),
        "generic33" => catalog::generic33(),
        _ => return Err(Error::invalid(format!("no such GCM file or catalogue entry: {}", arg.gcm))),
    };
    Ok(GcmDocument { matrix: g.rows(), variant: Variant::Minimal })
}

fn load_datum(arg: &GcmArg) -> Result<RootDatum> {
    load_gcm_doc(arg)?.datum()
}

fn parse_ring(s: &str) -> Result<Ring> {
    Ring::parse(s)
}

fn ring_value(r: &Ring) -> Value {
    json!({"name": r.to_string(), "descriptor": to_value(&r.descriptor())})
}

fn window_check(h: i64) -> Result<()> {
    if h < 1 {
        return Err(Error::invalid("height window must be positive"));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gcm(GcmCmd::Validate(a)) => {
            let doc = load_gcm_doc(a)?;
            match gcm::validate_gcm(&doc.matrix) {
                Ok(g) => Ok(Outcome::ok(json!({"valid": true, "n": g.n(), "variant": to_value(&doc.variant)}))),
                Err(e) => Err(Error::Gcm(e)),
            }
        }
        Command::Gcm(GcmCmd::Classify(a)) => {
            let g = load_gcm_doc(a)?.gcm()?;
            let r = gcm::classify(&g);
            Ok(Outcome::ok(json!({
                "n": g.n(),
                "determinant": g.determinant().to_string(),
                "finite_type": g.is_finite_type(),
                "classification": to_value(&r),
            })))
        }
        Command::Roots(w) => {
            window_check(w.height)?;
            let datum = load_datum(&w.gcm)?;
            let roots = weyl::enumerate_real_roots(&datum, w.height);
            let mut t = String::from("coords\theight\tcoroot\n");
            for r in &roots {
                let coroot = r.coroot.as_deref().map(join).unwrap_or_default();
                t.push_str(&format!("{}\t{}\t{}\n", join(&r.coords), r.height, coroot));
            }
            Ok(Outcome::ok(json!({"count": roots.len(), "roots": to_value(&roots)})).tsv(t))
        }
        Command::Mult(w) => {
            window_check(w.height)?;
            let doc = load_gcm_doc(&w.gcm)?;
            let g = doc.gcm()?;
            let datum = doc.datum()?;
            let real: std::collections::HashSet<Vec<i64>> =
                weyl::enumerate_real_roots(&datum, w.height).into_iter().map(|r| r.coords).collect();
            let np = build_nplus_serre(&g, w.height)?;
            let mut rows = Vec::new();
            let mut t = String::from("root\theight\tmult\tkind\n");
            for m in np.multiplicities() {
                let kind = if real.contains(&m.root) { RootKind::Real } else { RootKind::Imaginary };
                t.push_str(&format!("{}\t{}\t{}\t{}\n", join(&m.root), m.height, m.mult, kind_name(kind)));
                rows.push(json!({"root": m.root, "height": m.height, "mult": m.mult, "kind": to_value(&kind)}));
            }
            Ok(Outcome::ok(json!({
                "graded_dims": np.graded_dims(),
                "total_dim": np.total_dim(),
                "vanishing_height": np.vanishing_height(),
                "multiplicities": rows,
            }))
            .tsv(t))
        }
        Command::Algebra(AlgebraCmd::Dump { window, ring }) => {
            window_check(window.height)?;
            let ring = parse_ring(ring)?;
            let datum = load_datum(&window.gcm)?;
            let alg = kmalg::assemble_g(&datum, window.height, &ring)?;
            Ok(Outcome::ok(to_value(&alg.dump())).resolved("ring", ring_value(&ring)))
        }
        Command::Adjoint(cmd) => {
            let (a, which) = match cmd {
                AdjointCmd::CheckEq1(a) => (a, 1),
                AdjointCmd::CheckEq2(a) => (a, 2),
                AdjointCmd::CheckInd(a) => (a, 3),
            };
            let (rep, ring, h) = adjoint_rep(a)?;
            let report = match which {
                1 => adrep::sweep_eq1(&rep)?,
                2 => adrep::sweep_eq2(&rep)?,
                _ => adrep::sweep_induction(&rep)?,
            };
            let failed = report.cases_failed > 0;
            Ok(Outcome::ok(to_value(&report))
                .resolved("ring", ring_value(&ring))
                .resolved("height", json!(h))
                .violation_if(failed))
        }
        Command::Overrestricted(a) => {
            let (rep, ring, h) = adjoint_rep(a)?;
            let r = adrep::is_over_restricted(&rep, a.prime)?;
            Ok(Outcome::ok(to_value(&r)).resolved("ring", ring_value(&ring)).resolved("height", json!(h)))
        }
        Command::Group(GroupCmd::Verify { prime, samples }) => {
            let (rep, ring, h) = adjoint_rep(prime)?;
            let report = adrep::build_gv_and_verify(&rep, GroupConfig { samples: *samples, seed: cli.seed })?;
            let failed = report.cases_failed > 0;
            Ok(Outcome::ok(to_value(&report))
                .resolved("ring", ring_value(&ring))
                .resolved("height", json!(h))
                .violation_if(failed))
        }
        Command::Davis(DavisCmd::Coxeter { gcm, length, core }) => {
            let datum = load_datum(gcm)?;
            let d = davis::coxeter_davis_ball(&datum, *length)?;
            davis_outcome(if *core { d.core() } else { d })
        }
        Command::Davis(DavisCmd::Ball { ball, core }) => {
            let b = load_ball(ball)?;
            let d = davis::davis_realization_of_ball(&b);
            davis_outcome(if *core { d.core() } else { d })
        }
        Command::Building(BuildingCmd::Ball(a)) => {
            let b = load_ball(a)?;
            let complete = b.panels().filter(|p| p.complete).count();
            Ok(Outcome::ok(json!({
                "chambers": b.chambers.len(),
                "panels": b.panels().count(),
                "complete_panels": complete,
                "panel_adjacency": b.panel_adjacency().len(),
                "ball": to_value(&b),
            })))
        }
        Command::Building(BuildingCmd::Panels(a)) => {
            let datum = load_datum(&a.gcm)?;
            let b = davis::building_ball(&datum, a.q, a.radius)?;
            let panels: Vec<_> = b.panels().collect();
            let indices = (0..datum.n())
                .map(|s| davis::parabolic_index(&datum, a.q, s).map(|i| json!({"type": s + 1, "index": i})))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome::ok(json!({"panels": to_value(&panels), "parabolic_indices": indices})).tsv(b.panels_tsv()))
        }
        Command::Homology(a) => homology_cmd(a),
        Command::Geodesic(GeodesicCmd::Generate(a)) => {
            let ring = parse_ring(&a.ring)?;
            let tree = match (&a.tree, a.vertices) {
                (Some(p), _) => parse_json::<ComplexDoc>(p)?.build()?,
                (None, Some(n)) => cosheaf::random_tree(n, cli.seed),
                (None, None) => return Err(Error::invalid("give --tree or --vertices")),
            };
            let s = cosheaf::generate_geodesic_system(&tree, a.dim, &ring, cli.seed, !a.diagonal)?;
            Ok(Outcome::ok(to_value(&SystemDoc::from_system(&s))).resolved("ring", ring_value(&ring)))
        }
        Command::Geodesic(GeodesicCmd::Validate { system }) => {
            let s = parse_json::<SystemDoc>(system)?.build()?;
            let v = cosheaf::validate_geodesic_system(&s)?;
            let bad = !v.valid;
            Ok(Outcome::ok(to_value(&v)).resolved("ring", ring_value(s.ring())).violation_if(bad))
        }
        Command::Geodesic(GeodesicCmd::Probe { system, tree, vertices, dim, ring, diagonal, count, archive }) => {
            if let Some(p) = system {
                let s = parse_json::<SystemDoc>(p)?.build()?;
                let ring = s.ring().clone();
                return probe_many(vec![(cli.seed, s)], archive).map(|o| o.resolved("ring", ring_value(&ring)));
            }
            let ring = parse_ring(ring)?;
            let fixed = match tree {
                Some(p) => Some(parse_json::<ComplexDoc>(p)?.build()?),
                None => None,
            };
            if fixed.is_none() && vertices.is_none() {
                return Err(Error::invalid("give --system, --tree or --vertices"));
            }
            if *dim == 0 || *count == 0 {
                return Err(Error::invalid("--dim and --count must be positive"));
            }
            let mut systems = Vec::new();
            for i in 0..*count {
                let seed = cli.seed.wrapping_add(i);
                let (t, d) = match (&fixed, vertices) {
                    (Some(t), _) => (t.clone(), *dim),
                    (None, Some(n)) if *count == 1 => (cosheaf::random_tree(*n, seed), *dim),
                    (None, Some(n)) => {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let nv = rng.gen_range(2..=(*n).max(2));
                        let dd = rng.gen_range(1..=*dim);
                        (cosheaf::random_tree(nv, seed), dd)
                    }
                    (None, None) => unreachable!(),
                };
                systems.push((seed, cosheaf::generate_geodesic_system(&t, d, &ring, seed, !diagonal)?));
            }
            probe_many(systems, archive).map(|o| o.resolved("ring", ring_value(&ring)))
        }
    }
}

fn kind_name(k: RootKind) -> &'static str {
    match k {
        RootKind::Real => "real",
        RootKind::Imaginary => "imaginary",
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Adjoint representation over `F_{p^m}`; the window defaults to one past the
/// highest root height, where the truncation is exact in finite type.
fn adjoint_rep(a: &PrimeArgs) -> Result<(Representation, Ring, i64)> {
    if !crate::exactalg::is_prime(a.prime) {
        return Err(Error::invalid(format!("{} is not prime", a.prime)));
    }
    if a.degree == 0 {
        return Err(Error::invalid("--degree must be positive"));
    }
    let datum = load_datum(&a.gcm)?;
    let h = match a.height {
        Some(h) => {
            window_check(h)?;
            h
        }
        None => highest_root_height(&datum.gcm)?,
    };
    let ring = parse_ring(&format!("F{}^{}", a.prime, a.degree))?;
    let alg = kmalg::assemble_g(&datum, h, &ring)?;
    Ok((Representation::adjoint(&alg)?, ring, h))
}

fn highest_root_height(g: &Gcm) -> Result<i64> {
    if !g.is_finite_type() {
        return Err(Error::Unsupported("infinite type needs an explicit --height".into()));
    }
    let datum = gcm::build_root_datum(g, Variant::Minimal)?;
    // The highest root has height h - 1 and every Coxeter number h is below 30n.
    let bound = 30 * g.n() as i64 + 1;
    Ok(weyl::enumerate_real_roots(&datum, bound).iter().map(|r| r.height).max().unwrap_or(0) + 1)
}

fn load_ball(a: &BallArgs) -> Result<davis::BuildingBall> {
    let datum = load_datum(&a.gcm)?;
    davis::building_ball(&datum, a.q, a.radius)
}

fn davis_outcome(d: davis::DavisComplex) -> Result<Outcome> {
    let cx = &d.complex;
    let h = cosheaf::homology(&cosheaf::chain_complex(&cosheaf::trivial_cosheaf(cx, &Ring::Z, 1)))?;
    let result = json!({
        "f_vector": cx.f_vector(),
        "euler_characteristic": cx.euler_characteristic(),
        "connected": cx.is_connected(),
        "tree": cx.is_tree(),
        "homology": to_value(&h),
        "complex": d.to_json(),
    });
    Ok(Outcome::ok(result).tsv(d.to_tsv()))
}

fn homology_cmd(a: &HomologyArgs) -> Result<Outcome> {
    let (cc, ring, extra) = if let Some(p) = &a.cosheaf {
        let c = parse_json::<CosheafDoc>(p)?.build()?;
        let v = cosheaf::validate_cosheaf(&c);
        if !v.valid {
            return Ok(Outcome::ok(json!({"cosheaf": to_value(&v)})).violation_if(true));
        }
        let cc = cosheaf::chain_complex(&c);
        match &a.ring {
            Some(r) => {
                let ring = parse_ring(r)?;
                (cc.change_ring(&ring)?, ring, json!({"cosheaf": to_value(&v)}))
            }
            None => (cc, c.ring().clone(), json!({"cosheaf": to_value(&v)})),
        }
    } else {
        let p = a.complex.as_ref().ok_or_else(|| Error::invalid("give --complex or --cosheaf"))?;
        let cx: SimplicialComplex = parse_json::<ComplexDoc>(p)?.build()?;
        let ring = parse_ring(a.ring.as_deref().unwrap_or("Z"))?;
        let cc = cosheaf::chain_complex(&cosheaf::trivial_cosheaf(&cx, &ring, a.coeff_dim));
        let extra = json!({"f_vector": cx.f_vector(), "euler_characteristic": cx.euler_characteristic()});
        (cc, ring, extra)
    };
    let h = cosheaf::homology(&cc)?;
    let mut t = String::from("degree\trank\ttorsion\n");
    for d in &h.degrees {
        t.push_str(&format!("{}\t{}\t{}\n", d.degree, d.rank, d.torsion.join(",")));
    }
    let mut result = extra;
    result["squares_to_zero"] = json!(cc.squares_to_zero());
    result["homology"] = to_value(&h);
    Ok(Outcome::ok(result).tsv(t).resolved("ring", ring_value(&ring)))
}

/// Probes each system; counterexamples are written to the archive directory
/// byte-for-byte as system documents and the run ends with code 3.
fn probe_many(systems: Vec<(u64, IdempotentSystem)>, archive: &Path) -> Result<Outcome> {
    use rayon::prelude::*;
    let reports = systems
        .par_iter()
        .map(|(seed, s)| cosheaf::conjecture_probe(s).map(|r| (*seed, s.complex().n_vertices(), s.dim(), r)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut archived = Vec::new();
    let mut t = String::from("seed\tvertices\tdim\tverdict\tranks\n");
    for (seed, n, d, r) in &reports {
        let ranks: Vec<usize> = r.homology.degrees.iter().map(|x| x.rank).collect();
        let verdict = match r.verdict {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Counterexample => "COUNTEREXAMPLE",
        };
        t.push_str(&format!("{seed}\t{n}\t{d}\t{verdict}\t{}\n", ranks.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")));
        if let Some(sys) = &r.system {
            fs::create_dir_all(archive).map_err(|e| Error::invalid(format!("{}: {e}", archive.display())))?;
            let path = archive.join(format!("counterexample-seed{seed}.json"));
            let mut text = serde_json::to_string_pretty(sys).expect("system serialises");
            text.push('\n');
            fs::write(&path, text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
            archived.push(path.display().to_string());
        }
        rows.push(json!({"seed": seed, "vertices": n, "dim": d, "report": to_value(r)}));
    }
    let counterexamples = archived.len();
    let verdict = if counterexamples == 0 { "CONSISTENT" } else { "COUNTEREXAMPLE" };
    let result = if rows.len() == 1 {
        let mut only = rows.pop().unwrap();
        only["verdict"] = json!(verdict);
        only["archived"] = json!(archived);
        only
    } else {
        json!({"verdict": verdict, "instances": rows.len(), "counterexamples": counterexamples, "archived": archived, "runs": rows})
    };
    Ok(Outcome::ok(result).tsv(t).violation_if(counterexamples > 0))
}
