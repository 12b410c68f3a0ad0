//! Command-line workbench for isospectral skew-pencil deformations.
//!
//! Reads pencils, deformation-family parameters, and lattices as JSON,
//! runs the library checks, and emits CSV or JSON with fully reproducible
//! bytes. Exit codes: 0 success (and verdicts matching `--expect`), 1 when a
//! verdict contradicts `--expect`, 2 for malformed input or domain errors.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nilspec::boundary::{
    holonomy_displacement, scal_extremes, scal_via_shape, BoundaryPoint,
};
use nilspec::equiv::{
    commutant_dimension, lattice_automorphisms, lattice_equivalence, LatticeBasis, VerdictState,
};
use nilspec::family::{dimension_bound, FamilyParams};
use nilspec::isospec::{pencil_isospectral, pencil_isospectral_exact, IsospecVerdict};
use nilspec::nilalg::{pencil_from_json_str, scal_ambient, ParsedPencil, SkewPencil};
use output::*;

/// Environment variable consulted for the seed when `--seed` is absent.
const SEED_ENV: &str = "NILSPEC_SEED";
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "nilspec",
    version,
    about = "Isospectral deformations of two-step nilpotent quotients: scans, checks, verdicts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on the explicit deformation family
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    /// Isospectrality checks between pencils
    Isospec {
        #[command(subcommand)]
        cmd: IsospecCmd,
    },
    /// Lattice-equivalence verdicts between pencils
    Equiv {
        #[command(subcommand)]
        cmd: EquivCmd,
    },
    /// Boundary scalar curvature
    Scal {
        #[command(subcommand)]
        cmd: ScalCmd,
    },
    /// Lattice computations
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Torus displacement of the horizontal geodesic lift over the great
    /// circle through two orthonormal directions
    Holonomy {
        /// Pencil JSON file
        pencil: PathBuf,
        /// First direction, comma-separated (length m)
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Second direction, comma-separated (length m)
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Commutant dimension of a pencil; 1 certifies the genericity
    /// hypothesis (finitely many center-fixing automorphisms)
    Genericity {
        /// Pencil JSON file
        pencil: PathBuf,
    },
    /// Lower bound on the dimension of generic isospectral families
    DimensionBound {
        /// Dimension of v
        #[arg(long)]
        m: u64,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Tabulate Ricci eigenvalues, scalar-curvature extremes, and
    /// isospectrality residuals along the deformation
    Scan(ScanArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Rotation triple a1,a2,a3 with 0 < a1 < a2 < a3
    #[arg(long)]
    a: String,
    /// Coupling triple b12,b13,b23
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    /// Number of grid samples (including both endpoints)
    #[arg(long, default_value_t = 65)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum IsospecCmd {
    /// Decide whether two pencils have identical spectra for every z
    Check(IsospecArgs),
}

#[derive(Args)]
struct IsospecArgs {
    /// First pencil JSON file
    a: PathBuf,
    /// Second pencil JSON file
    b: PathBuf,
    /// Residual tolerance for the sampled verdict
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Compare characteristic polynomials in exact rational arithmetic
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum)]
    expect: Option<ExpectIsospec>,
}

#[derive(Subcommand)]
enum EquivCmd {
    /// Decide lattice equivalence of two pencils
    Check(EquivArgs),
}

#[derive(Args)]
struct EquivArgs {
    /// First pencil JSON file
    a: PathBuf,
    /// Second pencil JSON file
    b: PathBuf,
    /// Lattice JSON file (defaults to the standard integer lattice)
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Seed for the conjugacy search (falls back to NILSPEC_SEED, then 42)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    expect: Option<ExpectEquiv>,
}

#[derive(Subcommand)]
enum ScalCmd {
    /// Extreme values of the boundary scalar curvature and where they occur
    Extremes {
        /// Pencil JSON file
        pencil: PathBuf,
    },
    /// Scalar curvature at a boundary point, by both routes
    At {
        /// Pencil JSON file
        pencil: PathBuf,
        /// Unit direction in v, comma-separated (length m)
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Torus coordinate, comma-separated (length k, default zero)
        #[arg(long, allow_hyphen_values = true)]
        zbar: Option<String>,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Enumerate the orthogonal automorphism group of a lattice
    Autos {
        /// Lattice JSON file
        lattice: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExpectIsospec {
    Isospectral,
    NotIsospectral,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExpectEquiv {
    Equivalent,
    Inequivalent,
    Undecided,
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<nilspec::Error> for Failure {
    fn from(e: nilspec::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Family { cmd: FamilyCmd::Scan(args) } => family_scan(args),
        Command::Isospec { cmd: IsospecCmd::Check(args) } => isospec_check(args),
        Command::Equiv { cmd: EquivCmd::Check(args) } => equiv_check(args),
        Command::Scal { cmd } => match cmd {
            ScalCmd::Extremes { pencil } => scal_extremes_cmd(pencil),
            ScalCmd::At { pencil, x, zbar } => scal_at_cmd(pencil, x, zbar),
        },
        Command::Lattice { cmd: LatticeCmd::Autos { lattice } } => lattice_autos(lattice),
        Command::Holonomy { pencil, x, y } => holonomy_cmd(pencil, x, y),
        Command::Genericity { pencil } => genericity_cmd(pencil),
        Command::DimensionBound { m } => {
            println!("{}", dimension_bound(m)?);
            Ok(0)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_pencil(path: &PathBuf) -> Result<ParsedPencil, Failure> {
    Ok(pencil_from_json_str(&read_file(path)?)?)
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("bad {what}: {t:?} is not a number")))
        })
        .collect()
}

fn parse_triple(s: &str, what: &str) -> Result<[f64; 3], Failure> {
    let v = parse_floats(s, what)?;
    v.try_into()
        .map_err(|_| Failure::input(format!("{what} must have exactly three components")))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| Failure::input(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn family_scan(args: ScanArgs) -> CliResult {
    if args.samples < 2 {
        return Err(Failure::input("--samples must be at least 2"));
    }
    let family = FamilyParams::new(
        parse_triple(&args.a, "--a")?,
        parse_triple(&args.b, "--b")?,
    )?;
    let base = family.pencil();
    let mut rows = Vec::with_capacity(args.samples);
    for u in family.interval().grid(args.samples) {
        let deformed = family.deform(u)?;
        let pencil = deformed.pencil();
        let eigs = nilspec::equiv::ric_spectrum_invariant(&pencil);
        let ext = scal_extremes(&pencil)?;
        let residual = pencil_isospectral(&base, &pencil, 1e-9)?.max_residual;
        rows.push((u, deformed.b(), eigs, scal_ambient(&pencil), ext.min, ext.max, residual));
    }

    match args.format {
        Format::Csv => {
            println!("u,b12,b13,b23,e1,e2,e3,e4,e5,e6,scal_ambient,scal_min,scal_max,isospec_residual");
            for (u, b, eigs, ambient, smin, smax, residual) in rows {
                let mut cols = vec![fmt_f64(u), fmt_f64(b[0]), fmt_f64(b[1]), fmt_f64(b[2])];
                cols.extend(eigs.iter().map(|&e| fmt_f64(e)));
                cols.push(fmt_f64(ambient));
                cols.push(fmt_f64(smin));
                cols.push(fmt_f64(smax));
                cols.push(fmt_f64(residual));
                println!("{}", cols.join(","));
            }
        }
        Format::Json => {
            let items: Vec<String> = rows
                .into_iter()
                .map(|(u, b, eigs, ambient, smin, smax, residual)| {
                    json_object(&[
                        ("u", json_f64(u)),
                        ("b12", json_f64(b[0])),
                        ("b13", json_f64(b[1])),
                        ("b23", json_f64(b[2])),
                        ("ric_eigs", json_vec(&eigs)),
                        ("scal_ambient", json_f64(ambient)),
                        ("scal_min", json_f64(smin)),
                        ("scal_max", json_f64(smax)),
                        ("isospec_residual", json_f64(residual)),
                    ])
                })
                .collect();
            println!("{}", json_object(&[("rows", json_array(items))]));
        }
    }
    Ok(0)
}

fn isospec_check(args: IsospecArgs) -> CliResult {
    let pa = load_pencil(&args.a)?;
    let pb = load_pencil(&args.b)?;
    let report = if args.exact {
        let ra = pa.exact.ok_or_else(|| {
            Failure::input(format!("{}: exact mode needs exactly skew rational entries", args.a.display()))
        })?;
        let rb = pb.exact.ok_or_else(|| {
            Failure::input(format!("{}: exact mode needs exactly skew rational entries", args.b.display()))
        })?;
        pencil_isospectral_exact(&ra, &rb)?
    } else {
        pencil_isospectral(&pa.pencil, &pb.pencil, args.tol)?
    };

    let verdict = match report.verdict {
        IsospecVerdict::Isospectral => "isospectral",
        IsospecVerdict::NotIsospectral => "not_isospectral",
    };
    let witness = match &report.witness_z {
        Some(z) => json_vec(z),
        None => "null".into(),
    };
    let mode = match report.mode {
        nilspec::isospec::SpectraMode::Sampled => "sampled",
        nilspec::isospec::SpectraMode::Exact => "exact",
    };
    println!(
        "{}",
        json_object(&[
            ("verdict", json_str(verdict)),
            ("max_residual", json_f64(report.max_residual)),
            ("witness_z", witness),
            ("mode", json_str(mode)),
        ])
    );

    let ok = match args.expect {
        None => true,
        Some(ExpectIsospec::Isospectral) => report.verdict == IsospecVerdict::Isospectral,
        Some(ExpectIsospec::NotIsospectral) => report.verdict == IsospecVerdict::NotIsospectral,
    };
    Ok(if ok { 0 } else { 1 })
}

fn equiv_check(args: EquivArgs) -> CliResult {
    let pa = load_pencil(&args.a)?.pencil;
    let pb = load_pencil(&args.b)?.pencil;
    let lattice = match &args.lattice {
        Some(path) => LatticeBasis::from_json_str(&read_file(path)?)?,
        None => LatticeBasis::standard(pa.k()),
    };
    let seed = resolve_seed(args.seed)?;
    let verdict = lattice_equivalence(&pa, &pb, &lattice, seed)?;

    let state = match verdict.state {
        VerdictState::Equivalent => "equivalent",
        VerdictState::Inequivalent => "inequivalent",
        VerdictState::Undecided => "undecided",
    };
    let certificate = match &verdict.certificate {
        Some(c) => json_object(&[("A", json_matrix(&c.a)), ("C", json_matrix(&c.c))]),
        None => "null".into(),
    };
    let witness = match &verdict.witness {
        Some(w) => json_object(&[
            ("name", json_str(&w.name)),
            ("value_a", json_vec(&w.value_a)),
            ("value_b", json_vec(&w.value_b)),
        ]),
        None => "null".into(),
    };
    let stats = json_object(&[
        ("candidates_examined", verdict.stats.candidates_examined.to_string()),
        ("excluded_by_invariants", verdict.stats.excluded_by_invariants.to_string()),
        ("searches_run", verdict.stats.searches_run.to_string()),
        ("restarts_used", verdict.stats.restarts_used.to_string()),
        ("best_residual", json_f64(verdict.stats.best_residual)),
    ]);
    println!(
        "{}",
        json_object(&[
            ("state", json_str(state)),
            ("certificate", certificate),
            ("witness", witness),
            ("stats", stats),
            ("seed", seed.to_string()),
        ])
    );

    let ok = match args.expect {
        None => true,
        Some(ExpectEquiv::Equivalent) => verdict.state == VerdictState::Equivalent,
        Some(ExpectEquiv::Inequivalent) => verdict.state == VerdictState::Inequivalent,
        Some(ExpectEquiv::Undecided) => verdict.state == VerdictState::Undecided,
    };
    Ok(if ok { 0 } else { 1 })
}

fn scal_extremes_cmd(pencil: PathBuf) -> CliResult {
    let p = load_pencil(&pencil)?.pencil;
    let ext = scal_extremes(&p)?;
    println!(
        "{}",
        json_object(&[
            ("min", json_f64(ext.min)),
            ("max", json_f64(ext.max)),
            ("argmin_x", json_vec(&ext.argmin_x)),
            ("argmax_x", json_vec(&ext.argmax_x)),
        ])
    );
    Ok(0)
}

fn scal_at_cmd(pencil: PathBuf, x: String, zbar: Option<String>) -> CliResult {
    let p = load_pencil(&pencil)?.pencil;
    let x = parse_floats(&x, "--x")?;
    let z = match zbar {
        Some(s) => parse_floats(&s, "--zbar")?,
        None => vec![0.0; p.k()],
    };
    let pt = BoundaryPoint::new(x, &z, &LatticeBasis::standard(p.k()))?;
    let report = scal_via_shape(&p, &pt)?;
    println!(
        "{}",
        json_object(&[
            ("scal_ricci", json_f64(report.scal_ricci)),
            ("scal_shape", json_f64(report.scal_shape)),
            ("ambient", json_f64(report.ambient)),
            ("ric_xx", json_f64(report.ric_xx)),
        ])
    );
    Ok(0)
}

fn lattice_autos(lattice: PathBuf) -> CliResult {
    let l = LatticeBasis::from_json_str(&read_file(&lattice)?)?;
    let autos = lattice_automorphisms(&l)?;
    let items: Vec<String> = autos.iter().map(json_matrix).collect();
    println!(
        "{}",
        json_object(&[
            ("count", autos.len().to_string()),
            ("elements", json_array(items)),
        ])
    );
    Ok(0)
}

fn holonomy_cmd(pencil: PathBuf, x: String, y: String) -> CliResult {
    let p = load_pencil(&pencil)?.pencil;
    let x = parse_floats(&x, "--x")?;
    let y = parse_floats(&y, "--y")?;
    let disp = holonomy_displacement(&p, &x, &y)?;
    let closes = disp.iter().all(|d| d.abs() <= 1e-12);
    println!(
        "{}",
        json_object(&[
            ("displacement", json_vec(&disp)),
            ("closes", closes.to_string()),
        ])
    );
    Ok(0)
}

fn genericity_cmd(pencil: PathBuf) -> CliResult {
    let p: SkewPencil = load_pencil(&pencil)?.pencil;
    let dim = commutant_dimension(&p);
    println!(
        "{}",
        json_object(&[
            ("commutant_dimension", dim.to_string()),
            ("finiteness_certified", (dim == 1).to_string()),
        ])
    );
    Ok(0)
}
