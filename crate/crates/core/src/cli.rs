//! Batch command-line front end: JSON in, JSON out, golden-file-friendly
//! formatting (sorted keys, floats at 12 significant digits).

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::actions::{
    automorphism_group, discreteness_witness, is_strongly_transitive_max_atlas,
    is_weyl_transitive, properness_certificate, verify_action, ActionError, ActionSpec,
};
use crate::building::Building;
use crate::constructions::{
    cayley_building, flag_building_from_incidence, graph_product_building, GraphProductSpec,
    IncidenceSpec,
};
use crate::coxeter::{CoxeterSystem, Word};
use crate::metric::{ComplexPoint, MZeroComplex, MetricError, DEFAULT_TOL};
use crate::realizations::{davis_realization, tits_realization, SimplicialComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    ViolationFound,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ViolationFound => 1,
            Status::Error => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ViolationFound => "violation-found",
            Status::Error => "error",
        }
    }
}

/// Outcome of one CLI invocation. `status == Error` iff the process exit
/// code is nonzero and not a violation verdict.
#[derive(Debug)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    fn ok(payload: Value) -> CommandResult {
        CommandResult { status: Status::Ok, payload, diagnostics: Vec::new() }
    }

    fn violation(payload: Value, diagnostics: Vec<String>) -> CommandResult {
        CommandResult { status: Status::ViolationFound, payload, diagnostics }
    }

    fn error(module: &str, message: impl std::fmt::Display) -> CommandResult {
        CommandResult {
            status: Status::Error,
            payload: json!({ "error": format!("{module}: {message}") }),
            diagnostics: vec![format!("{module}: {message}")],
        }
    }

    /// Rendered payload: compact JSON with sorted keys, or indented JSON in
    /// text mode. Floats are rounded to 12 significant digits first.
    pub fn rendered(&self, format: Format) -> String {
        let mut payload = self.payload.clone();
        round_floats(&mut payload);
        match format {
            Format::Json => serde_json::to_string(&payload).expect("payload serializes"),
            Format::Text => format!(
                "status: {}\n{}",
                self.status.label(),
                serde_json::to_string_pretty(&payload).expect("payload serializes")
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Realization {
    Tits,
    Davis,
}

#[derive(Parser)]
#[command(name = "buildings", about = "Coxeter groups, buildings, realizations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a Coxeter system; optionally reduce a word.
    Coxeter {
        /// Coxeter matrix JSON: {"rank": n, "m": [[...]]}.
        #[arg(long)]
        coxeter: PathBuf,
        /// Dot-separated generator word, e.g. 0.1.0 ("e" for the identity).
        #[arg(long)]
        word: Option<String>,
        /// Count the elements of length at most this bound.
        #[arg(long)]
        radius: Option<u32>,
    },
    /// Construct a building from exactly one generator spec.
    Build {
        /// Cayley building of a Coxeter matrix JSON.
        #[arg(long)]
        coxeter: Option<PathBuf>,
        /// Graph-product building: {"groups": [...], "gamma_edges": [...]}.
        #[arg(long)]
        product: Option<PathBuf>,
        /// Flag building: {"points": [...], "lines": [[...]]}.
        #[arg(long)]
        incidence: Option<PathBuf>,
        /// Gallery radius for infinite groups.
        #[arg(long, default_value_t = 0)]
        radius: u32,
    },
    /// Check the building axioms.
    Verify {
        #[arg(long)]
        building: PathBuf,
        /// Reduced-word length bound for the (B2) endpoint check.
        #[arg(long)]
        word_bound: Option<usize>,
    },
    /// Weyl distance between two chambers.
    Delta {
        #[arg(long)]
        building: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// The J-residue of a chamber, as a building.
    Residue {
        #[arg(long)]
        building: PathBuf,
        #[arg(long)]
        chamber: String,
        /// Dot-separated colors, e.g. 0.2.
        #[arg(long)]
        colors: String,
    },
    /// Enumerate the maximal atlas.
    Apartments {
        #[arg(long)]
        building: PathBuf,
    },
    /// Tits or Davis realization, as a simplicial complex.
    Realize {
        #[arg(long)]
        building: PathBuf,
        #[arg(long, value_enum)]
        realization: Realization,
    },
    /// Betti numbers of a realization.
    Homology {
        #[arg(long)]
        building: PathBuf,
        #[arg(long, value_enum)]
        realization: Realization,
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Intrinsic metric on a realization with regular unit shapes.
    Metric {
        #[arg(long)]
        building: PathBuf,
        #[arg(long, value_enum, default_value = "davis")]
        realization: Realization,
        /// Shape-table JSON overriding the unit-regular default.
        #[arg(long)]
        shapes: Option<PathBuf>,
        /// Vertex label of the source point.
        #[arg(long)]
        from: Option<String>,
        /// Vertex label of the target point.
        #[arg(long)]
        to: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Full color-preserving automorphism group.
    Aut {
        #[arg(long)]
        building: PathBuf,
    },
    /// Weyl and strong transitivity of an action (default: full Aut).
    Transitivity {
        #[arg(long)]
        building: PathBuf,
        /// Action JSON: {"building": <path or inline>, "generators": [...]}.
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// Properness: group certificate with --action, otherwise the metric
    /// local-finiteness check on a realization.
    Proper {
        #[arg(long)]
        building: Option<PathBuf>,
        #[arg(long)]
        action: Option<PathBuf>,
        /// Base chamber (with --action) or base vertex label (without).
        #[arg(long)]
        chamber: Option<String>,
        /// Group BFS word-length bound.
        #[arg(long, default_value_t = 64)]
        depth: usize,
        /// Ball radius for the metric check.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, value_enum, default_value = "davis")]
        realization: Realization,
    },
}

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes.
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            return CommandResult {
                status: if benign { Status::Ok } else { Status::Error },
                payload: Value::Null,
                diagnostics: vec![e.to_string()],
            };
        }
    };
    dispatch(cli.command)
}

/// Convenience entry point for `main`: prints the payload, sends diagnostics
/// to stderr, and returns the exit code.
pub fn run_and_print<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let format = if argv.iter().any(|a| a == "text") && argv.iter().any(|a| a == "--format") {
        Format::Text
    } else {
        Format::Json
    };
    let result = run(argv);
    if !result.payload.is_null() {
        // A closed pipe (e.g. `buildings ... | head`) is not an error.
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), "{}", result.rendered(format));
    }
    for line in &result.diagnostics {
        eprintln!("{line}");
    }
    result.status.exit_code()
}

fn dispatch(command: Command) -> CommandResult {
    match command {
        Command::Coxeter { coxeter, word, radius } => cmd_coxeter(&coxeter, word, radius),
        Command::Build { coxeter, product, incidence, radius } => {
            cmd_build(coxeter, product, incidence, radius)
        }
        Command::Verify { building, word_bound } => cmd_verify(&building, word_bound),
        Command::Delta { building, from, to } => cmd_delta(&building, &from, &to),
        Command::Residue { building, chamber, colors } => {
            cmd_residue(&building, &chamber, &colors)
        }
        Command::Apartments { building } => cmd_apartments(&building),
        Command::Realize { building, realization } => cmd_realize(&building, realization),
        Command::Homology { building, realization, max_dim } => {
            cmd_homology(&building, realization, max_dim)
        }
        Command::Metric { building, realization, shapes, from, to, tol } => {
            cmd_metric(&building, realization, shapes, from, to, tol)
        }
        Command::Aut { building } => cmd_aut(&building),
        Command::Transitivity { building, action } => cmd_transitivity(&building, action),
        Command::Proper { building, action, chamber, depth, radius, realization } => {
            cmd_proper(building, action, chamber, depth, radius, realization)
        }
    }
}

fn load_json(path: &Path) -> Result<Value, String> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    };
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_system(path: &Path) -> Result<CoxeterSystem, String> {
    #[derive(Deserialize)]
    struct MatrixJson {
        rank: usize,
        m: Vec<Vec<u32>>,
    }
    let value = load_json(path)?;
    let json: MatrixJson =
        serde_json::from_value(value).map_err(|e| format!("{}: {e}", path.display()))?;
    if json.m.len() != json.rank {
        return Err(format!("{}: rank does not match matrix size", path.display()));
    }
    CoxeterSystem::validate_matrix(json.m).map_err(|e| e.to_string())
}

fn load_building(path: &Path) -> Result<Building, String> {
    Building::from_json(&load_json(path)?).map_err(|e| e.to_string())
}

fn parse_word(text: &str) -> Result<Word, String> {
    if text == "e" {
        return Ok(Word(Vec::new()));
    }
    let letters: Result<Vec<u8>, _> = text.split('.').map(str::parse).collect();
    letters.map(Word).map_err(|e| format!("bad word {text:?}: {e}"))
}

fn cmd_coxeter(path: &Path, word: Option<String>, radius: Option<u32>) -> CommandResult {
    let system = match load_system(path) {
        Ok(s) => s,
        Err(e) => return CommandResult::error("coxeter", e),
    };
    let finite = system.is_finite();
    let mut payload = json!({ "rank": system.rank(), "finite": finite });
    let map = payload.as_object_mut().unwrap();
    if finite {
        match system.enumerate_all() {
            Ok(elements) => {
                map.insert("order".into(), json!(elements.len()));
            }
            Err(e) => return CommandResult::error("coxeter", e),
        }
    }
    if let Some(r) = radius {
        map.insert(
            "elements_up_to_radius".into(),
            json!(system.enumerate_elements(r as usize).len()),
        );
    }
    if let Some(text) = word {
        let word = match parse_word(&text) {
            Ok(w) => w,
            Err(e) => return CommandResult::error("coxeter", e),
        };
        match system.reduce(&word) {
            Ok(reduced) => {
                map.insert("length".into(), json!(reduced.0.len()));
                map.insert("reduced".into(), json!(reduced.0));
            }
            Err(e) => return CommandResult::error("coxeter", e),
        }
    }
    CommandResult::ok(payload)
}

fn cmd_build(
    coxeter: Option<PathBuf>,
    product: Option<PathBuf>,
    incidence: Option<PathBuf>,
    radius: u32,
) -> CommandResult {
    let sources = coxeter.iter().count() + product.iter().count() + incidence.iter().count();
    if sources != 1 {
        return CommandResult::error(
            "build",
            "exactly one of --coxeter, --product, --incidence is required",
        );
    }
    if let Some(path) = coxeter {
        let system = match load_system(&path) {
            Ok(s) => s,
            Err(e) => return CommandResult::error("build", e),
        };
        return match cayley_building(&system, radius) {
            Ok(b) => CommandResult::ok(b.to_json()),
            Err(e) => CommandResult::error("build", e),
        };
    }
    if let Some(path) = product {
        let spec: GraphProductSpec = match load_json(&path)
            .and_then(|v| serde_json::from_value(v).map_err(|e| e.to_string()))
        {
            Ok(s) => s,
            Err(e) => return CommandResult::error("build", e),
        };
        return match graph_product_building(&spec, radius) {
            Ok(b) => CommandResult::ok(b.to_json()),
            Err(e) => CommandResult::error("build", e),
        };
    }
    let path = incidence.unwrap();
    let spec: IncidenceSpec = match load_json(&path)
        .and_then(|v| serde_json::from_value(v).map_err(|e| e.to_string()))
    {
        Ok(s) => s,
        Err(e) => return CommandResult::error("build", e),
    };
    match flag_building_from_incidence(&spec) {
        Ok((b, _)) => CommandResult::ok(b.to_json()),
        Err(crate::constructions::ConstructionError::NotABuilding(detail)) => {
            CommandResult::violation(json!({ "axioms": "fail" }), vec![detail])
        }
        Err(e) => CommandResult::error("build", e),
    }
}

fn cmd_verify(path: &Path, word_bound: Option<usize>) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    let report = building.verify_axioms(word_bound);
    let payload = json!({
        "axioms": if report.is_empty() { "pass" } else { "fail" },
        "thin": building.is_thin(),
        "thick": building.is_thick(),
        "interior_only": report.interior_only,
        "word_bound": report.word_bound,
        "violations": report.violations.len(),
    });
    if report.is_empty() {
        CommandResult::ok(payload)
    } else {
        CommandResult::violation(
            payload,
            report.violations.iter().map(|v| v.to_string()).collect(),
        )
    }
}

fn cmd_delta(path: &Path, from: &str, to: &str) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    match building.weyl_distance(from, to) {
        Ok(word) => CommandResult::ok(json!({ "delta": word.0, "length": word.0.len() })),
        Err(e) => CommandResult::error("building", e),
    }
}

fn cmd_residue(path: &Path, chamber: &str, colors: &str) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    let colors = match parse_word(colors) {
        Ok(w) => w.0,
        Err(e) => return CommandResult::error("building", e),
    };
    match building.residue(chamber, &colors) {
        Ok(sub) => CommandResult::ok(sub.to_json()),
        Err(e) => CommandResult::error("building", e),
    }
}

fn cmd_apartments(path: &Path) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    match building.enumerate_apartments() {
        Ok(apartments) => CommandResult::ok(json!({
            "count": apartments.len(),
            "apartments": apartments.iter().map(|a| &a.chambers).collect::<Vec<_>>(),
        })),
        Err(e) => CommandResult::error("building", e),
    }
}

fn realize(building: &Building, which: Realization) -> Result<SimplicialComplex, String> {
    match which {
        Realization::Tits => tits_realization(building).map_err(|e| e.to_string()),
        Realization::Davis => davis_realization(building).map_err(|e| e.to_string()),
    }
}

fn cmd_realize(path: &Path, which: Realization) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    match realize(&building, which) {
        Ok(complex) => CommandResult::ok(complex.to_json()),
        Err(e) => CommandResult::error("realizations", e),
    }
}

fn cmd_homology(path: &Path, which: Realization, max_dim: Option<usize>) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    let complex = match realize(&building, which) {
        Ok(c) => c,
        Err(e) => return CommandResult::error("realizations", e),
    };
    let top = max_dim.or_else(|| complex.dimension()).unwrap_or(0);
    CommandResult::ok(json!({ "betti": complex.homology_ranks(top) }))
}

fn cmd_metric(
    path: &Path,
    which: Realization,
    shapes: Option<PathBuf>,
    from: Option<String>,
    to: Option<String>,
    tol: f64,
) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    let complex = match realize(&building, which) {
        Ok(c) => c,
        Err(e) => return CommandResult::error("realizations", e),
    };
    let mc = match shapes {
        Some(table) => match load_json(&table)
            .map_err(MetricError::BadShape)
            .and_then(|v| MZeroComplex::from_shape_table_json(complex, &v))
        {
            Ok(mc) => mc,
            Err(e) => return CommandResult::error("metric", e),
        },
        None => match MZeroComplex::regular(complex, 1.0) {
            Ok(mc) => mc,
            Err(e) => return CommandResult::error("metric", e),
        },
    };
    let mut payload = json!({ "separation": mc.vertex_separation() });
    if let (Some(from), Some(to)) = (from, to) {
        let endpoints = (
            mc.complex().vertex_index(&from),
            mc.complex().vertex_index(&to),
        );
        let (x, y) = match endpoints {
            (Ok(x), Ok(y)) => (ComplexPoint::vertex(x), ComplexPoint::vertex(y)),
            (Err(e), _) | (_, Err(e)) => return CommandResult::error("metric", e),
        };
        match mc.intrinsic_distance(&x, &y, tol) {
            Ok(d) => {
                payload.as_object_mut().unwrap().insert("distance".into(), json!(d));
            }
            Err(MetricError::ToleranceNotReached { best }) => {
                let map = payload.as_object_mut().unwrap();
                map.insert("distance_upper_bound".into(), json!(best));
                map.insert("converged".into(), json!(false));
                return CommandResult {
                    status: Status::Error,
                    payload,
                    diagnostics: vec!["metric: iteration cap hit".to_string()],
                };
            }
            Err(e) => return CommandResult::error("metric", e),
        }
    }
    CommandResult::ok(payload)
}

fn cmd_aut(path: &Path) -> CommandResult {
    let building = match load_building(path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    match automorphism_group(&building) {
        Ok(spec) => CommandResult::ok(json!({
            "order": spec.order_hint,
            "generators": spec.generators,
        })),
        Err(e) => CommandResult::error("actions", e),
    }
}

#[derive(Deserialize)]
struct ActionJson {
    building: Option<Value>,
    generators: Vec<Vec<usize>>,
}

/// Loads an action spec; the building comes from the inline value, a path
/// string relative to the action file, or the --building flag.
fn load_action(
    action_path: &Path,
    building_flag: Option<&Path>,
) -> Result<(Building, ActionSpec), String> {
    let value = load_json(action_path)?;
    let json: ActionJson =
        serde_json::from_value(value).map_err(|e| format!("{}: {e}", action_path.display()))?;
    let building = match (&json.building, building_flag) {
        (Some(Value::String(path)), _) => {
            let resolved = action_path
                .parent()
                .map(|dir| dir.join(path))
                .unwrap_or_else(|| PathBuf::from(path));
            load_building(&resolved)?
        }
        (Some(inline), _) => Building::from_json(inline).map_err(|e| e.to_string())?,
        (None, Some(path)) => load_building(path)?,
        (None, None) => return Err("action has no building and --building is missing".into()),
    };
    Ok((building, ActionSpec { generators: json.generators, order_hint: None }))
}

fn cmd_transitivity(building_path: &Path, action: Option<PathBuf>) -> CommandResult {
    let (building, spec) = match action {
        Some(action_path) => match load_action(&action_path, Some(building_path)) {
            Ok(pair) => pair,
            Err(e) => return CommandResult::error("actions", e),
        },
        None => {
            let building = match load_building(building_path) {
                Ok(b) => b,
                Err(e) => return CommandResult::error("building", e),
            };
            let spec = match automorphism_group(&building) {
                Ok(s) => s,
                Err(e) => return CommandResult::error("actions", e),
            };
            (building, spec)
        }
    };
    match verify_action(&building, &spec) {
        Ok(true) => {}
        Ok(false) => {
            return CommandResult::violation(
                json!({ "valid_action": false }),
                vec!["actions: a generator does not preserve the colored graph".to_string()],
            )
        }
        Err(e) => return CommandResult::error("actions", e),
    }
    let weyl = match is_weyl_transitive(&building, &spec) {
        Ok(r) => r,
        Err(e) => return CommandResult::error("actions", e),
    };
    let strong = match is_strongly_transitive_max_atlas(&building, &spec) {
        Ok(r) => Some(r.transitive),
        Err(ActionError::InfiniteW) => None,
        Err(e) => return CommandResult::error("actions", e),
    };
    let payload = json!({
        "valid_action": true,
        "weyl_transitive": weyl.transitive,
        "strongly_transitive": strong,
        "classes": weyl
            .classes
            .iter()
            .map(|c| json!({
                "delta": c.label,
                "pairs": c.set_size,
                "orbit_sizes": c.orbit_sizes,
            }))
            .collect::<Vec<_>>(),
    });
    if weyl.transitive && strong.unwrap_or(true) {
        CommandResult::ok(payload)
    } else {
        CommandResult::violation(payload, vec!["actions: action is not transitive".to_string()])
    }
}

fn cmd_proper(
    building: Option<PathBuf>,
    action: Option<PathBuf>,
    chamber: Option<String>,
    depth: usize,
    radius: f64,
    which: Realization,
) -> CommandResult {
    if let Some(action_path) = action {
        let (b, spec) = match load_action(&action_path, building.as_deref()) {
            Ok(pair) => pair,
            Err(e) => return CommandResult::error("actions", e),
        };
        let base = match chamber {
            Some(c) => c,
            None => match b.chambers().first() {
                Some(c) => c.clone(),
                None => return CommandResult::error("actions", "empty building"),
            },
        };
        let set = vec![base.clone()];
        let cert = match properness_certificate(&b, &spec, &set, &set, depth) {
            Ok(c) => c,
            Err(e) => return CommandResult::error("actions", e),
        };
        let witness = match discreteness_witness(&b, &spec, &set, 1.0, depth) {
            Ok(w) => w,
            Err(e) => return CommandResult::error("actions", e),
        };
        let discrete = witness.elements.is_empty();
        let payload = json!({
            "chamber": base,
            "depth": depth,
            "closed": cert.closed,
            "stabilizer_order": cert.elements.len(),
            "discrete": discrete,
        });
        return if discrete {
            CommandResult::ok(payload)
        } else {
            CommandResult::violation(
                payload,
                vec![format!(
                    "actions: {} nonidentity elements move the base chamber less than 1",
                    witness.elements.len()
                )],
            )
        };
    }
    let Some(building_path) = building else {
        return CommandResult::error("proper", "--building or --action is required");
    };
    let b = match load_building(&building_path) {
        Ok(b) => b,
        Err(e) => return CommandResult::error("building", e),
    };
    let complex = match realize(&b, which) {
        Ok(c) => c,
        Err(e) => return CommandResult::error("realizations", e),
    };
    let basepoint = match &chamber {
        Some(label) => match complex.vertex_index(label) {
            Ok(v) => v,
            Err(e) => return CommandResult::error("metric", e),
        },
        None => 0,
    };
    let mc = match MZeroComplex::regular(complex, 1.0) {
        Ok(mc) => mc,
        Err(e) => return CommandResult::error("metric", e),
    };
    match mc.check_properness(basepoint, radius) {
        Ok(report) => CommandResult::ok(json!({
            "locally_finite": report.locally_finite,
            "partial": report.partial,
            "chain_bound": report.chain_bound,
            "ball_facets": report.ball_facets.len(),
        })),
        Err(e) => CommandResult::error("metric", e),
    }
}

/// Round every number to 12 significant digits, in place.
fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(f, 12)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}
