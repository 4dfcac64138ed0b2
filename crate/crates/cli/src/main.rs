use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use patchwork::dlattice::{DistLattice, LatticeJson};
use patchwork::dot::{lattice_dot, nucleus_lattice_dot, poset_dot};
use patchwork::frame::NucleusLattice;
use patchwork::poset::{all_posets, PosetJson};
use patchwork::space::{space_report, FiniteSpace};
use patchwork::sweep::{self, SuiteReport};
use patchwork::tower::{threads, Tower, TowerJson};
use patchwork::vsheaf::{CubeJson, CubeVerdict};
use patchwork::FinitePoset;
use serde::de::DeserializeOwned;
use serde::Serialize;

const DEFAULT_SEED: u64 = 0x5EED;
const MAX_SWEEP_SIZE: usize = 6;
const MAX_DEPTH: usize = 6;

#[derive(Parser)]
#[command(name = "patchwork", version, about = "Finite models of stably compact spaces, checked exactly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone, Copy)]
struct Opts {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest poset size in sweeps
    #[arg(long, global = true, default_value_t = 5)]
    max_size: usize,
    /// Tower depth
    #[arg(long, global = true, default_value_t = 3)]
    depth: usize,
    /// Read and write posets with upward closed sets as the opens
    #[arg(long, global = true)]
    upset_opens: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Poset files and enumeration
    #[command(subcommand)]
    Poset(PosetCmd),
    /// Finite distributive lattices
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Nuclei of a finite frame
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Alexandrov spaces and their patch, dual and one-point constructions
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Towers of finite posets
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Cartesian cubes of vector spaces
    #[command(subcommand)]
    Cube(CubeCmd),
    /// Verification suites
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Hasse diagrams in DOT
    #[command(subcommand)]
    Render(RenderCmd),
}

#[derive(Subcommand)]
enum PosetCmd {
    /// Elements, covers and heights
    Show { file: PathBuf },
    /// Count posets up to isomorphism for each size up to --max-size
    Enumerate,
    /// Order embedding into the cube on the element set
    Embed { file: PathBuf },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Elements and join-irreducibles
    Show { file: PathBuf },
    /// Boolean algebra of the patch
    Booleanize { file: PathBuf },
    /// Order-dual lattice
    Dual { file: PathBuf },
    /// Free bounded distributive lattice on n generators
    Free { n: usize },
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Every nucleus, marked open, closed or Boolean
    Nuclei { file: PathBuf },
}

#[derive(Subcommand)]
enum SpaceCmd {
    Patch { file: PathBuf },
    Dual { file: PathBuf },
    Onepoint { file: PathBuf },
    /// Closed, saturated compact, elementary and patch-closed counts
    Report { file: PathBuf },
}

#[derive(Subcommand)]
enum TowerCmd {
    /// Compatible point sequences up to --depth
    Threads { file: PathBuf },
    Patch { file: PathBuf },
    Dual { file: PathBuf },
}

#[derive(Subcommand)]
enum CubeCmd {
    /// Direct and axis-by-axis cartesianness
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Birkhoff,
    Booleanization,
    HofmannMislove,
    Escardo,
    SecondIso,
    OnePoint,
    Cube,
    Recollement,
    K0Descent,
    Cosheaf,
    /// On a tower file, or on the built-in towers without one
    MainTheorem { file: Option<PathBuf> },
    Verdier,
    Nisnevich,
    Sierpinski,
}

#[derive(Subcommand)]
enum RenderCmd {
    Poset { file: PathBuf },
    Lattice { file: PathBuf },
    Nuclei { file: PathBuf },
}

/// Why a run stopped early: bad input (exit 2) or a failed check (exit 1).
enum Failure {
    Input(String),
    Check(String),
}

type Outcome = Result<String, Failure>;

fn input_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        if e.line() > 0 {
            Failure::Input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
        } else {
            input_err(path, e)
        }
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// The opposite poset translates between the two conventions for opens.
fn orient(p: FinitePoset, o: &Opts) -> FinitePoset {
    if o.upset_opens {
        p.opposite()
    } else {
        p
    }
}

fn load_poset(path: &Path, o: &Opts) -> Result<FinitePoset, Failure> {
    let json: PosetJson = read_json(path)?;
    let p = FinitePoset::from_json(&json).map_err(|e| input_err(path, e))?;
    Ok(orient(p, o))
}

fn load_lattice(path: &Path) -> Result<DistLattice, Failure> {
    let json: LatticeJson = read_json(path)?;
    DistLattice::from_json(&json).map_err(|e| input_err(path, e))
}

fn load_tower(path: &Path, o: &Opts) -> Result<Tower, Failure> {
    let json: TowerJson = read_json(path)?;
    let t = Tower::from_json(&json).map_err(|e| input_err(path, e))?;
    let t = if o.upset_opens { t.dual() } else { t };
    t.truncate(o.depth.min(t.depth())).map_err(|e| input_err(path, e))
}

fn poset_text(p: &FinitePoset) -> String {
    let mut out = String::new();
    writeln!(out, "elements {}", p.names().join(" ")).unwrap();
    let covers: Vec<String> = p.covers().iter().map(|&(a, b)| format!("{}<{}", p.name(a), p.name(b))).collect();
    writeln!(out, "covers   {}", covers.join(" ")).unwrap();
    out
}

fn emit_poset(p: &FinitePoset, o: &Opts) -> String {
    let p = orient(p.clone(), o);
    if o.json {
        to_json(&p.to_json())
    } else {
        poset_text(&p)
    }
}

fn emit_tower(t: &Tower, o: &Opts) -> String {
    let t = if o.upset_opens { t.dual() } else { t.clone() };
    if o.json {
        return to_json(&t.to_json());
    }
    let mut out = String::new();
    for (i, level) in t.levels().iter().enumerate() {
        writeln!(out, "level {i}").unwrap();
        for line in poset_text(level).lines() {
            writeln!(out, "  {line}").unwrap();
        }
    }
    out
}

fn lattice_text(l: &DistLattice) -> Result<String, Failure> {
    let mut out = String::new();
    let labels: Vec<String> = (0..l.len()).map(|i| l.label(i)).collect();
    writeln!(out, "size {}", l.len()).unwrap();
    writeln!(out, "elements {}", labels.join(" ")).unwrap();
    let j = l.join_irreducibles().map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(out, "join-irreducibles {}", j.names().join(" ")).unwrap();
    writeln!(out, "boolean {}", l.is_boolean()).unwrap();
    Ok(out)
}

fn emit_lattice(l: &DistLattice, o: &Opts) -> Outcome {
    if o.json {
        Ok(to_json(&l.to_json()))
    } else {
        lattice_text(l)
    }
}

fn emit_report(r: &SuiteReport, o: &Opts) -> Outcome {
    let text = if o.json {
        to_json(r)
    } else {
        format!(
            "suite {}\ncases {}\nfailures {}\n",
            r.suite,
            r.cases,
            r.failures.len()
        )
    };
    match r.failures.first() {
        None => Ok(text),
        Some(first) => {
            print!("{text}");
            Err(Failure::Check(format!("{} failed: {first}", r.suite)))
        }
    }
}

fn sweep_size(o: &Opts) -> Result<usize, Failure> {
    if o.max_size > MAX_SWEEP_SIZE {
        return Err(Failure::Input(format!(
            "--max-size {} is above the supported bound {MAX_SWEEP_SIZE}",
            o.max_size
        )));
    }
    Ok(o.max_size)
}

fn lib<T>(r: patchwork::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(e.to_string()))
}

fn poset_cmd(c: &PosetCmd, o: &Opts) -> Outcome {
    match c {
        PosetCmd::Show { file } => {
            let p = load_poset(file, o)?;
            if o.json {
                return Ok(emit_poset(&p, o));
            }
            let mut out = emit_poset(&p, o);
            let q = orient(p, o);
            let h = q.heights();
            let hs: Vec<String> = (0..q.len()).map(|i| format!("{}:{}", q.name(i), h[i])).collect();
            writeln!(out, "heights  {}", hs.join(" ")).unwrap();
            Ok(out)
        }
        PosetCmd::Enumerate => {
            let n = sweep_size(o)?;
            let counts: Vec<(usize, usize)> = (0..=n).map(|k| (k, all_posets(k).len())).collect();
            if o.json {
                return Ok(to_json(&counts));
            }
            Ok(counts.iter().map(|(k, c)| format!("{k} {c}\n")).collect())
        }
        PosetCmd::Embed { file } => {
            let p = load_poset(file, o)?;
            let m = lib(p.urysohn_cube_embedding())?;
            let pairs: Vec<(String, String)> = (0..p.len())
                .map(|i| (p.name(i).to_string(), m.dst().name(m.apply(i)).to_string()))
                .collect();
            if o.json {
                return Ok(to_json(&pairs));
            }
            Ok(pairs.iter().map(|(a, b)| format!("{a} ↦ {b}\n")).collect())
        }
    }
}

fn lattice_cmd(c: &LatticeCmd, o: &Opts) -> Outcome {
    match c {
        LatticeCmd::Show { file } => emit_lattice(&load_lattice(file)?, o),
        LatticeCmd::Booleanize { file } => emit_lattice(&lib(load_lattice(file)?.booleanize())?.0, o),
        LatticeCmd::Dual { file } => emit_lattice(&load_lattice(file)?.hochster_dual().0, o),
        LatticeCmd::Free { n } => emit_lattice(&lib(DistLattice::free_bounded(*n))?, o),
    }
}

#[derive(Serialize)]
struct NucleusRow {
    name: String,
    images: Vec<String>,
    open: Option<String>,
    closed: Option<String>,
    boolean: bool,
}

fn frame_cmd(c: &FrameCmd, o: &Opts) -> Outcome {
    let FrameCmd::Nuclei { file } = c;
    let f = load_lattice(file)?;
    let nl = lib(NucleusLattice::new(&f))?;
    let rows: Vec<NucleusRow> = nl
        .nuclei
        .iter()
        .zip(nl.labels())
        .map(|(n, name)| NucleusRow {
            name,
            images: n.table().iter().map(|&v| f.label(v)).collect(),
            open: n.as_open().map(|u| f.label(u)),
            closed: n.as_closed().map(|u| f.label(u)),
            boolean: n.is_boolean(),
        })
        .collect();
    if o.json {
        return Ok(to_json(&rows));
    }
    let mut out = String::new();
    let elements: Vec<String> = (0..f.len()).map(|i| f.label(i)).collect();
    writeln!(out, "frame {}", elements.join(" ")).unwrap();
    for r in &rows {
        let mut marks = Vec::new();
        if let Some(u) = &r.open {
            marks.push(format!("open {u}"));
        }
        if let Some(u) = &r.closed {
            marks.push(format!("closed {u}"));
        }
        if r.boolean {
            marks.push("boolean".to_string());
        }
        writeln!(out, "{} [{}] {}", r.name, r.images.join(" "), marks.join(", ")).unwrap();
    }
    let (lat, _) = lib(nl.as_lattice())?;
    writeln!(out, "nucleus lattice: {} elements", lat.len()).unwrap();
    Ok(out)
}

#[derive(Serialize)]
struct ReportJson {
    points: usize,
    opens: usize,
    closed: usize,
    saturated_compact: usize,
    elementary: usize,
    patch_closed: usize,
    patch_points: usize,
}

fn space_cmd(c: &SpaceCmd, o: &Opts) -> Outcome {
    match c {
        SpaceCmd::Patch { file } => Ok(emit_poset(FiniteSpace::new(load_poset(file, o)?).patch().carrier(), o)),
        SpaceCmd::Dual { file } => Ok(emit_poset(
            FiniteSpace::new(load_poset(file, o)?).de_groot_dual().carrier(),
            o,
        )),
        SpaceCmd::Onepoint { file } => {
            let (plus, _) = lib(FiniteSpace::new(load_poset(file, o)?).one_point())?;
            Ok(emit_poset(plus.carrier(), o))
        }
        SpaceCmd::Report { file } => {
            let r = space_report(&FiniteSpace::new(load_poset(file, o)?));
            if o.json {
                return Ok(to_json(&ReportJson {
                    points: r.points,
                    opens: r.opens,
                    closed: r.closed,
                    saturated_compact: r.saturated_compact,
                    elementary: r.elementary,
                    patch_closed: r.patch_closed,
                    patch_points: r.patch_points,
                }));
            }
            let mut out = String::new();
            for (k, v) in [
                ("points", r.points),
                ("opens", r.opens),
                ("closed", r.closed),
                ("saturated compact", r.saturated_compact),
                ("elementary", r.elementary),
                ("patch closed", r.patch_closed),
            ] {
                writeln!(out, "{k:<18} {v}").unwrap();
            }
            writeln!(out, "{:<18} discrete {}", "patch", r.patch_points).unwrap();
            Ok(out)
        }
    }
}

fn check_depth(o: &Opts) -> Result<(), Failure> {
    if o.depth > MAX_DEPTH {
        return Err(Failure::Input(format!(
            "--depth {} is above the supported bound {MAX_DEPTH}",
            o.depth
        )));
    }
    Ok(())
}

fn tower_cmd(c: &TowerCmd, o: &Opts) -> Outcome {
    check_depth(o)?;
    match c {
        TowerCmd::Threads { file } => {
            let t = load_tower(file, o)?;
            let d = t.depth();
            let ts = lib(threads(&t, d))?;
            let named: Vec<Vec<String>> = ts
                .threads
                .iter()
                .map(|th| th.iter().enumerate().map(|(i, &x)| t.level(i).name(x).to_string()).collect())
                .collect();
            if o.json {
                return Ok(to_json(&named));
            }
            let mut out = format!("depth {d}: {} threads\n", named.len());
            for th in &named {
                writeln!(out, "{}", th.join(" ← ")).unwrap();
            }
            Ok(out)
        }
        TowerCmd::Patch { file } => Ok(emit_tower(&load_tower(file, o)?.patch(), o)),
        TowerCmd::Dual { file } => Ok(emit_tower(&load_tower(file, o)?.dual(), o)),
    }
}

#[derive(Serialize)]
struct CubeReport {
    n: usize,
    direct: bool,
    recursive: Vec<bool>,
    agree: bool,
}

fn cube_cmd(c: &CubeCmd, o: &Opts) -> Outcome {
    let CubeCmd::Check { file } = c;
    let json: CubeJson = read_json(file)?;
    let cube = json.to_cube().map_err(|e| input_err(file, e))?;
    let v = lib(CubeVerdict::compute(&cube))?;
    let r = CubeReport {
        n: cube.n(),
        direct: v.direct,
        recursive: v.recursive.clone(),
        agree: v.agree(),
    };
    let text = if o.json {
        to_json(&r)
    } else {
        let axes: Vec<String> = r.recursive.iter().enumerate().map(|(i, b)| format!("{}:{b}", i + 1)).collect();
        format!(
            "n {}\ncartesian {}\nrecursive {}\n",
            r.n,
            r.direct,
            axes.join(" ")
        )
    };
    if r.agree {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure::Check("direct and recursive criteria disagree".into()))
    }
}

fn verify_cmd(c: &VerifyCmd, o: &Opts) -> Outcome {
    let n = sweep_size(o)?;
    check_depth(o)?;
    let report = match c {
        VerifyCmd::Birkhoff => sweep::birkhoff_sweep(n),
        VerifyCmd::Booleanization => sweep::booleanization_sweep(n),
        VerifyCmd::HofmannMislove => sweep::hofmann_mislove_sweep(n),
        VerifyCmd::Escardo => sweep::escardo_sweep(n),
        VerifyCmd::SecondIso => sweep::second_iso_sweep(n),
        VerifyCmd::OnePoint => sweep::one_point_sweep(n),
        VerifyCmd::Cube => sweep::cube_sweep(o.seed, 200, &[2, 3, 4], 4),
        VerifyCmd::Recollement => sweep::recollement_sweep(o.seed, 100, n),
        VerifyCmd::K0Descent => sweep::k0_descent_sweep(n),
        VerifyCmd::Cosheaf => sweep::cosheaf_sweep(n),
        VerifyCmd::MainTheorem { file: None } => sweep::main_theorem_sweep(n, o.depth),
        VerifyCmd::MainTheorem { file: Some(file) } => {
            let t = load_tower(file, o)?;
            let name = file.display().to_string();
            sweep::main_theorem_on(&t, &name, t.depth()).map(|(cases, failures)| SuiteReport {
                suite: "main-theorem".into(),
                cases,
                failures,
            })
        }
        VerifyCmd::Verdier => sweep::verdier_sweep(o.seed, n),
        VerifyCmd::Nisnevich => sweep::nisnevich_sweep(n),
        VerifyCmd::Sierpinski => sweep::sierpinski_suite(n),
    };
    emit_report(&lib(report)?, o)
}

fn render_cmd(c: &RenderCmd, o: &Opts) -> Outcome {
    match c {
        RenderCmd::Poset { file } => Ok(poset_dot(&orient(load_poset(file, o)?, o))),
        RenderCmd::Lattice { file } => Ok(lattice_dot(&load_lattice(file)?)),
        RenderCmd::Nuclei { file } => lib(nucleus_lattice_dot(&lib(NucleusLattice::new(&load_lattice(file)?))?)),
    }
}

fn run(cli: &Cli) -> Outcome {
    let o = &cli.opts;
    match &cli.command {
        Command::Poset(c) => poset_cmd(c, o),
        Command::Lattice(c) => lattice_cmd(c, o),
        Command::Frame(c) => frame_cmd(c, o),
        Command::Space(c) => space_cmd(c, o),
        Command::Tower(c) => tower_cmd(c, o),
        Command::Cube(c) => cube_cmd(c, o),
        Command::Verify(c) => verify_cmd(c, o),
        Command::Render(c) => render_cmd(c, o),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(msg)) => {
            eprintln!("failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
