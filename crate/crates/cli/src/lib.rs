//! Command-line front end: argument parsing, document loading and report
//! rendering. `run` is the whole program minus process I/O.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use locfin::digital::{self, DigitalCurve};
use locfin::distance::{parse_rational, Rational};
use locfin::distortion::{self, EdgesMode};
use locfin::doc::{self, CircuitDoc, MapDoc, SpaceRef};
use locfin::homotopy::{self, Circuit, SearchBounds};
use locfin::iso::{self, IsoPolicy, ZoomPolicy};
use locfin::npp::{self, PointMap};
use locfin::{fixtures, Error, MetricSpace, PointId};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "locfin", version, about = "Discrete topology and metric invariants of locally finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Leave out wall-clock timings so that reports are byte-reproducible.
    #[arg(long, global = true)]
    pub deterministic: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Path components under dN₁ links.
    Components(SpaceArg),
    /// Null-homotopy of a circuit, or homotopy between two circuits.
    HomotopySearch(HomotopyArgs),
    /// NPP-function, local isomorphism and isomorphism checks for a map.
    NppCheck(NppArgs),
    /// Canonical TS-graph of a graph-type space.
    SymbolicGraph(SpaceArg),
    /// Isoperimetric constants ι_k.
    Iso(IsoArgs),
    /// Zoom constants at a point, or ζ±, λ and local amenability over the interior.
    Zoom(ZoomArgs),
    /// Property SN evidence.
    Sn(SnArgs),
    /// ℓ_p-distortion lower bound.
    Distortion(DistortionArgs),
    /// Jordan decomposition of a digital curve.
    Jordan(JordanArgs),
    /// Emit a fixture document.
    GenerateFixture(FixtureArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SpaceArg {
    /// Space document path, or fixture:NAME[:key=value,...].
    #[arg(long)]
    pub space: String,
}

#[derive(Args, Debug, Serialize)]
pub struct HomotopyArgs {
    /// Overrides the space named inside the circuit document.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, alias = "curve")]
    pub circuit: String,
    /// Second circuit; when given, the two are compared.
    #[arg(long)]
    pub to: Option<String>,
    /// Row width and state budget.
    #[arg(long, value_parser = parse_bounds, default_value = "12,1000000")]
    pub bounds: (usize, usize),
    #[arg(long, default_value_t = 2)]
    pub max_block: usize,
    /// Also report the winding number around this integer point.
    #[arg(long, value_parser = parse_pair)]
    pub puncture: Option<(i64, i64)>,
}

#[derive(Args, Debug, Serialize)]
pub struct NppArgs {
    #[arg(long)]
    pub map: String,
    /// Domain; overrides the map document.
    #[arg(long)]
    pub space: Option<String>,
    /// Codomain; overrides the map document, defaults to the domain.
    #[arg(long)]
    pub codomain: Option<String>,
    /// Largest |A| in the subset identity f(dN_k(A)) = dN_k(f(A)).
    #[arg(long, default_value_t = 4)]
    pub max_subset: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct IsoArgs {
    #[arg(long)]
    pub space: String,
    /// A single k; otherwise every k up to --kmax.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub kmax: usize,
    #[arg(long)]
    pub max_subset: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Largest family enumerated exhaustively.
    #[arg(long, default_value_t = 1 << 24)]
    pub exhaustive_budget: u64,
    /// Allow subsets touching the window rim.
    #[arg(long)]
    pub include_rim: bool,
}

impl IsoArgs {
    fn policy(&self) -> IsoPolicy {
        IsoPolicy {
            max_size: self.max_subset,
            interior_only: !self.include_rim,
            exhaustive_budget: self.exhaustive_budget,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct ZoomArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub point: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub kmax: usize,
    #[arg(long, default_value_t = 64)]
    pub nmax: usize,
    #[arg(long, default_value = "1/4", value_parser = parse_rat)]
    #[serde(serialize_with = "ser_rat")]
    pub tolerance: Rational,
}

#[derive(Args, Debug, Serialize)]
pub struct SnArgs {
    #[command(flatten)]
    pub iso: IsoArgs,
    #[arg(long, default_value = "1", value_parser = parse_rat)]
    #[serde(serialize_with = "ser_rat")]
    pub threshold: Rational,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgesArg {
    All,
    Single,
}

#[derive(Args, Debug, Serialize)]
pub struct DistortionArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub edges_mode: EdgesArg,
    /// Take the supremum over path components instead of requiring one.
    #[arg(long)]
    pub components: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct JordanArgs {
    /// Curve document path, or fixture:NAME[:key=value,...].
    #[arg(long, alias = "circuit")]
    pub curve: String,
    #[arg(long, default_value_t = 1)]
    pub margin: i64,
    /// Write a PGM picture of the decomposition.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct FixtureArgs {
    pub name: String,
    /// key=value parameters.
    pub params: Vec<String>,
}

fn ser_rat<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&locfin::distance::fmt_rational(*r))
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_bounds(s: &str) -> Result<(usize, usize), String> {
    let (w, n) = s.split_once(',').ok_or("expected WIDTH,STATES")?;
    let w: usize = w.trim().parse().map_err(|_| "bad width")?;
    let n: usize = n.trim().parse().map_err(|_| "bad state budget")?;
    if w == 0 || n == 0 {
        return Err("bounds must be positive".into());
    }
    Ok((w, n))
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (x, y) = s.split_once(',').ok_or("expected X,Y")?;
    Ok((x.trim().parse().map_err(|_| "bad x")?, y.trim().parse().map_err(|_| "bad y")?))
}

/// Result of one invocation.
#[derive(Debug, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

/// Input failure: status 1 with a structured message.
#[derive(Debug)]
struct Failure {
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let dbg = format!("{e:?}");
        let end = dbg.find(['(', ' ', '{']).unwrap_or(dbg.len());
        Failure { kind: dbg[..end].to_string(), message: e.to_string() }
    }
}

impl Failure {
    fn io(path: &str, e: std::io::Error) -> Self {
        Failure { kind: "Io".into(), message: format!("{path}: {e}") }
    }

    fn json(path: &str, e: serde_json::Error) -> Self {
        Failure { kind: "Malformed".into(), message: format!("{path}: {e}") }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Inputs read so far, for the report digest.
#[derive(Default)]
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn record(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn read(&mut self, path: &Path) -> Res<Value> {
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|e| Failure::io(&shown, e))?;
        self.record(&shown, &bytes);
        serde_json::from_slice(&bytes).map_err(|e| Failure::json(&shown, e))
    }

    /// A fixture reference or a document path.
    fn value(&mut self, src: &str, curve: bool) -> Res<Value> {
        if let Some(rest) = src.strip_prefix("fixture:") {
            self.record("fixture", rest.as_bytes());
            let (name, params) = split_fixture(rest)?;
            return if curve {
                Ok(serde_json::to_value(fixtures::curve_by_name(name, &params)?).expect("serializable"))
            } else {
                Ok(doc::space_to_value(&fixtures::by_name(name, &params)?))
            };
        }
        self.read(Path::new(src))
    }

    fn space(&mut self, src: &str) -> Res<MetricSpace> {
        let v = self.value(src, false)?;
        Ok(doc::parse_space(&v)?)
    }

    /// Resolves a reference found inside a document at `base`.
    fn space_ref(&mut self, r: &SpaceRef, base: &Path) -> Res<MetricSpace> {
        match r {
            SpaceRef::Inline(v) => Ok(doc::parse_space(v)?),
            SpaceRef::Path(p) if p.starts_with("fixture:") => self.space(p),
            SpaceRef::Path(p) => {
                let full = base.parent().unwrap_or(Path::new(".")).join(p);
                self.space(&full.display().to_string())
            }
        }
    }
}

fn split_fixture(s: &str) -> Res<(&str, Vec<(String, String)>)> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let params = parse_params(rest.split(',').filter(|p| !p.is_empty()))?;
    Ok((name, params))
}

fn parse_params<'a>(items: impl Iterator<Item = &'a str>) -> Res<Vec<(String, String)>> {
    items
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::from(Error::Param(format!("expected key=value, got {p:?}"))))
        })
        .collect()
}

fn ids_json(v: &[PointId]) -> Value {
    json!(v.iter().map(|p| p.0).collect::<Vec<_>>())
}

/// Parses and runs one command line.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string().into_bytes();
            return if code == 0 {
                Output { code, stdout: text, stderr: Vec::new() }
            } else {
                Output { code, stdout: Vec::new(), stderr: text }
            };
        }
    };
    let started = Instant::now();
    let mut inputs = Inputs::default();
    let result = dispatch(&cli.command, &mut inputs);
    let body = match result {
        Err(f) => {
            let msg = json!({"error": {"kind": f.kind, "message": f.message}});
            return Output { code: 1, stdout: Vec::new(), stderr: format!("{msg}\n").into_bytes() };
        }
        Ok(Body::Document(v)) => v,
        Ok(Body::Report(result)) => {
            let (command, params) = match serde_json::to_value(&cli.command).expect("serializable") {
                Value::Object(m) => m.into_iter().next().expect("one command"),
                _ => unreachable!("commands serialize as maps"),
            };
            let mut report = json!({
                "command": command,
                "version": VERSION,
                "input_digest": inputs.digest(),
                "params": params,
                "result": result,
            });
            if !cli.deterministic {
                report["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
            }
            report
        }
    };
    let mut text = serde_json::to_string_pretty(&body).expect("serializable");
    text.push('\n');
    match &cli.out {
        None => Output { code: 0, stdout: text.into_bytes(), stderr: Vec::new() },
        Some(path) => match write_atomic(path, text.as_bytes()) {
            Ok(()) => Output::default(),
            Err(e) => {
                let msg = json!({"error": {"kind": "Io", "message": format!("{}: {e}", path.display())}});
                Output { code: 1, stdout: Vec::new(), stderr: format!("{msg}\n").into_bytes() }
            }
        },
    }
}

/// Writes through a temporary file in the target directory and renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

enum Body {
    Report(Value),
    /// Emitted as is (fixtures).
    Document(Value),
}

fn dispatch(cmd: &Command, inputs: &mut Inputs) -> Res<Body> {
    let report = match cmd {
        Command::Components(a) => {
            let s = inputs.space(&a.space)?;
            let comps = homotopy::path_components(&s);
            json!({
                "count": comps.len(),
                "components": comps.iter().map(|c| ids_json(c)).collect::<Vec<_>>(),
            })
        }
        Command::HomotopySearch(a) => homotopy_search(a, inputs)?,
        Command::NppCheck(a) => npp_check(a, inputs)?,
        Command::SymbolicGraph(a) => {
            let s = inputs.space(&a.space)?;
            let g = npp::symbolic_graph(&s)?;
            json!({"ts_graph": g})
        }
        Command::Iso(a) => {
            let s = inputs.space(&a.space)?;
            let policy = a.policy();
            match a.k {
                Some(k) => json!({"policy": policy, "report": iso::iota_k(&s, k, &policy)?}),
                None => json!({"policy": policy, "report": iso::iota_global(&s, a.kmax, &policy)?}),
            }
        }
        Command::Zoom(a) => {
            let s = inputs.space(&a.space)?;
            let policy = ZoomPolicy { kmax: a.kmax, nmax: a.nmax };
            match a.point {
                Some(x) => json!({"zoom": iso::zoom_constants(&s, PointId(x), policy)?}),
                None => json!({
                    "extremes": iso::zoom_extremes(&s, policy)?,
                    "local_amenability": iso::local_amenability(&s, policy, a.tolerance)?,
                }),
            }
        }
        Command::Sn(a) => {
            let s = inputs.space(&a.iso.space)?;
            let policy = a.iso.policy();
            json!({"policy": policy, "report": iso::property_sn(&s, a.iso.kmax, a.threshold, &policy)?})
        }
        Command::Distortion(a) => {
            let s = inputs.space(&a.space)?;
            let mode = match a.edges_mode {
                EdgesArg::All => EdgesMode::All,
                EdgesArg::Single => EdgesMode::Single,
            };
            if a.components {
                json!({"components": distortion::distortion_lower_bound_components(&s, a.p, mode)?})
            } else {
                json!({"bound": distortion::distortion_lower_bound(&s, a.p, mode)?})
            }
        }
        Command::Jordan(a) => jordan(a, inputs)?,
        Command::GenerateFixture(a) => {
            let params = parse_params(a.params.iter().map(String::as_str))?;
            let doc = match fixtures::by_name(&a.name, &params) {
                Ok(s) => doc::space_to_value(&s),
                Err(Error::UnknownFixture(_)) => serde_json::to_value(fixtures::curve_by_name(&a.name, &params)?).expect("serializable"),
                Err(e) => return Err(e.into()),
            };
            return Ok(Body::Document(doc));
        }
    };
    Ok(Body::Report(report))
}

fn load_circuit(src: &str, inputs: &mut Inputs, space_override: Option<&MetricSpace>) -> Res<(Option<MetricSpace>, CircuitDoc)> {
    let v = inputs.read(Path::new(src))?;
    let d: CircuitDoc = serde_json::from_value(v).map_err(|e| Failure::json(src, e))?;
    let own = match (space_override, &d.space) {
        (Some(_), _) => None,
        (None, Some(r)) => Some(inputs.space_ref(r, Path::new(src))?),
        (None, None) => return Err(Error::Malformed(format!("{src}: no space given")).into()),
    };
    Ok((own, d))
}

fn homotopy_search(a: &HomotopyArgs, inputs: &mut Inputs) -> Res<Value> {
    let given = a.space.as_deref().map(|s| inputs.space(s)).transpose()?;
    let (own, d) = load_circuit(&a.circuit, inputs, given.as_ref())?;
    let space = given.as_ref().or(own.as_ref()).expect("one space");
    let c = d.circuit(space)?;
    let bounds = SearchBounds { max_width: a.bounds.0, max_states: a.bounds.1, max_block: a.max_block };
    let winding = |c: &Circuit| -> Value {
        let mut w = json!({});
        if let Ok(n) = homotopy::winding_number_cycle(space, c) {
            w["cycle"] = json!(n);
        }
        if let Some(p) = a.puncture {
            match homotopy::winding_number_puncture(space, c, p) {
                Ok(n) => w["puncture"] = json!(n),
                Err(e) => w["puncture_error"] = json!(e.to_string()),
            }
        }
        w
    };
    match &a.to {
        None => {
            let out = homotopy::null_homotopy_search(space, &c, bounds)?;
            Ok(json!({"circuit": c, "bounds": bounds, "winding": winding(&c), "search": out}))
        }
        Some(other) => {
            let (_, d2) = load_circuit(other, inputs, Some(space))?;
            let c2 = d2.circuit(space)?;
            let (strategy, out) = homotopy::circuits_homotopic(space, &c, &c2, bounds)?;
            Ok(json!({
                "circuits": [c, c2],
                "bounds": bounds,
                "winding": [winding(&c), winding(&c2)],
                "strategy": strategy,
                "search": out,
            }))
        }
    }
}

fn npp_check(a: &NppArgs, inputs: &mut Inputs) -> Res<Value> {
    let v = inputs.read(Path::new(&a.map))?;
    let d: MapDoc = serde_json::from_value(v).map_err(|e| Failure::json(&a.map, e))?;
    let base = Path::new(&a.map);
    let domain = match (&a.space, &d.domain) {
        (Some(s), _) => inputs.space(s)?,
        (None, Some(r)) => inputs.space_ref(r, base)?,
        (None, None) => return Err(Error::Malformed("map has no domain".into()).into()),
    };
    let codomain = match (&a.codomain, &d.codomain) {
        (Some(s), _) => Some(inputs.space(s)?),
        (None, Some(r)) => Some(inputs.space_ref(r, base)?),
        (None, None) => None,
    };
    let codomain = codomain.as_ref().unwrap_or(&domain);
    let f: PointMap = d.map(&domain, codomain)?;
    let violation = npp::npp_violation(&f).map(|(x, y)| json!({"x": x, "y": y}));
    let bijective = f.is_bijective();
    let iso_witness = npp::isomorphism_witness(&f)?;
    let subset = if bijective && domain.len() <= 16 { npp::subset_identity_witness(&f, a.max_subset)? } else { None };
    Ok(json!({
        "npp_function": violation.is_none(),
        "npp_violation": violation,
        "bijective": bijective,
        "local_isomorphism": npp::local_isomorphism_witness(&f).is_none(),
        "local_isomorphism_witness": npp::local_isomorphism_witness(&f),
        "isomorphism": iso_witness.is_none(),
        "isomorphism_witness": iso_witness,
        "subset_identity_checked": bijective && domain.len() <= 16,
        "subset_identity_witness": subset,
    }))
}

fn jordan(a: &JordanArgs, inputs: &mut Inputs) -> Res<Value> {
    let v = inputs.value(&a.curve, true)?;
    let c: DigitalCurve = serde_json::from_value(v).map_err(|e| Failure::json(&a.curve, e))?;
    if a.margin < 1 {
        return Err(Error::Param("margin must be at least 1".into()).into());
    }
    let witness = digital::simplicity_witness(&c);
    let square = digital::contains_unit_square(&c);
    let mut out = json!({
        "points": c.len(),
        "simple": witness.is_none(),
        "simplicity_witness": witness,
        "unit_square": square,
        "constant": c.is_constant(),
    });
    match digital::jordan_decomposition(&c, a.margin) {
        Ok(d) => {
            let completion = digital::gamma_completion(&c, &d.interior)?;
            if let Some(p) = &a.pgm {
                write_atomic(p, digital::render_pgm(&c, &d).as_bytes()).map_err(|e| Failure::io(&p.display().to_string(), e))?;
            }
            out["components"] = json!(d.components);
            out["interior_size"] = json!(d.interior.len());
            out["exterior_size_in_box"] = json!(d.exterior.len());
            out["verified"] = json!(d.verified());
            out["completion"] = match completion {
                Ok(comp) => json!({"patterns": comp.patterns, "unlisted": comp.unlisted, "extremal": comp.extremal}),
                Err(f) => json!({"failure": f}),
            };
            out["decomposition"] = json!(d);
        }
        Err(e @ (Error::NotSimple(_) | Error::UnitSquare(..) | Error::ConstantCurve)) => {
            out["rejected"] = json!(e.to_string());
            out["components"] = json!(digital::component_count(&c, a.margin));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}
