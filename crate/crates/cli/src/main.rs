//! `crystile`: command-line front end for crystallographic tilings.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crystile_core::construction::construct_tiling;
use crystile_core::group::{generic_point, orbit_in_ball, CrystalGroup};
use crystile_core::io::{group_from_json, isometry_from_json, matrix_to_json, tiling_from_json, vector_to_json, GroupJson, IsometryJson, TilingJson};
use crystile_core::presets::{preset, preset_names};
use crystile_core::rational::{format_rational, parse_rational, QVector, Rational};
use crystile_core::svg::{render_svg, Window};
use crystile_core::tiling::{automorphism_group, distance_upper_bound, ld_check, mld_check, translation_mld_check};
use crystile_core::voronoi::{delone_params, voronoi_tiling};
use crystile_core::{Error, Isometry, PeriodicTiling};

#[derive(Parser)]
#[command(name = "crystile", version, about = "Exact crystallographic tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TilingOut {
    /// Write the tiling JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG picture (planar tilings only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// SVG window in Cartesian coordinates.
    #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a group file and print the violation report.
    ValidateGroup { file: PathBuf },
    /// List the built-in groups, or print one of them.
    PresetList {
        #[arg(long)]
        group: Option<String>,
    },
    /// Orbit points of a group within a ball.
    Orbit {
        #[arg(long)]
        group: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        origin: Option<String>,
        #[arg(long, default_value = "4")]
        radius2: String,
    },
    /// Voronoi tiling of an orbit.
    Voronoi {
        #[arg(long)]
        group: String,
        /// Orbit base point; a generic point from `--seed` when omitted.
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: TilingOut,
    },
    /// Simple tiling whose automorphism group is exactly the given group.
    Construct {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: TilingOut,
    },
    /// Automorphism group of a tiling.
    Aut { tiling: PathBuf },
    /// Local derivability of the second tiling from the first along `--gamma`.
    Ld {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        gamma: Option<PathBuf>,
    },
    /// Mutual local derivability.
    Mld { first: PathBuf, second: PathBuf },
    /// Certified upper bound on the tiling distance.
    Distance {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        origin: Option<String>,
        /// Largest squared radius tried for patch agreement.
        #[arg(long)]
        radius2: Option<String>,
    },
    /// SVG picture of a planar tiling.
    Render {
        tiling: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
    },
}

enum Failure {
    Input(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::InvalidGroup(_)
            | Error::UnknownPreset(_)
            | Error::InvalidGram(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidTiling(_)
            | Error::DegeneratePolytope(_)
            | Error::NotAnIsometry(_)
            | Error::ZeroNormal => Failure::Input(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<Value, Failure>;

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_tiling(path: &Path) -> std::result::Result<PeriodicTiling, Failure> {
    tiling_from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// A preset name, or a path to a group file.
fn load_group(spec: &str) -> std::result::Result<CrystalGroup, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        return group_from_json(&read(path)?).map_err(|e| Failure::Input(format!("{spec}: {e}")));
    }
    Ok(preset(spec)?)
}

fn parse_point(s: &str, n: usize) -> std::result::Result<QVector, Failure> {
    let coords = s.split(',').map(|c| parse_rational(c.trim())).collect::<crystile_core::Result<Vec<Rational>>>()?;
    if coords.len() != n {
        return Err(Failure::Input(format!("point {s:?} has {} coordinates, expected {n}", coords.len())));
    }
    Ok(QVector::new(coords))
}

fn window(w: &Option<Vec<f64>>) -> std::result::Result<Window, Failure> {
    match w {
        None => Ok(Window::default()),
        Some(v) => Ok(Window::new(v[0], v[1], v[2], v[3])?),
    }
}

fn emit_tiling(t: &PeriodicTiling, out: &TilingOut) -> Outcome {
    let value = serde_json::to_value(TilingJson::from_tiling(t)).expect("tiling serializes");
    if let Some(svg) = &out.svg {
        write(svg, &render_svg(t, &window(&out.window)?)?)?;
    }
    match &out.out {
        Some(path) => {
            write(path, &(serde_json::to_string_pretty(&value).expect("json") + "\n"))?;
            Ok(json!({ "tiles_per_cell": t.cell_tiles().len(), "prototiles": t.prototiles().len(), "out": path.display().to_string() }))
        }
        None => Ok(value),
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::ValidateGroup { file } => {
            let text = read(&file)?;
            match group_from_json(&text) {
                Ok(g) => Ok(json!({ "valid": true, "name": g.name(), "order": g.order(), "violations": [] })),
                Err(Error::InvalidGroup(report)) => {
                    emit(&(serde_json::to_string_pretty(&json!({ "valid": false, "violations": report.violations })).expect("json") + "\n"));
                    Err(Failure::Input(format!("{}: invalid group\n{report}", file.display())))
                }
                Err(e) => Err(Failure::Input(format!("{}: {e}", file.display()))),
            }
        }
        Command::PresetList { group } => match group {
            None => Ok(json!(preset_names().collect::<Vec<_>>())),
            Some(name) => Ok(serde_json::to_value(GroupJson::from_group(&preset(&name)?)).expect("json")),
        },
        Command::Orbit { group, point, origin, radius2 } => {
            let g = load_group(&group)?;
            let x = parse_point(&point, g.dim())?;
            let center = match origin {
                Some(o) => parse_point(&o, g.dim())?,
                None => QVector::zeros(g.dim()),
            };
            let r2 = parse_rational(&radius2)?;
            let orbit = orbit_in_ball(&g, &x, &center, &r2);
            let sites: Vec<Value> = orbit.sites.iter().map(|s| json!(vector_to_json(s))).collect();
            Ok(json!({ "count": sites.len(), "sites": sites }))
        }
        Command::Voronoi { group, point, seed, out } => {
            let g = load_group(&group)?;
            let x = match point {
                Some(p) => parse_point(&p, g.dim())?,
                None => generic_point(&g, seed),
            };
            let cert = delone_params(&g, &x)?;
            eprintln!(
                "delone: min distance² {}, covering radius² {}",
                format_rational(&cert.min_sq_distance),
                format_rational(&cert.covering_sq_radius)
            );
            emit_tiling(&voronoi_tiling(&g, &x)?, &out)
        }
        Command::Construct { group, seed, out } => {
            let g = load_group(&group)?;
            emit_tiling(&construct_tiling(&g, seed)?, &out)
        }
        Command::Aut { tiling } => {
            let t = load_tiling(&tiling)?;
            let a = automorphism_group(&t);
            Ok(json!({
                "order": a.order(),
                "point_group": a.point_group().iter().map(matrix_to_json).collect::<Vec<_>>(),
                "lattice": matrix_to_json(a.basis()),
                "group": GroupJson::from_group(&a),
            }))
        }
        Command::Ld { first, second, gamma } => {
            let (t, t2) = (load_tiling(&first)?, load_tiling(&second)?);
            let g = match gamma {
                Some(p) => isometry_from_json(&read(&p)?)?,
                None => Isometry::identity(t.dim()),
            };
            let r = ld_check(&t, &t2, &g)?;
            Ok(json!({
                "holds": r.holds,
                "radius2": r.radius_sq.as_ref().map(format_rational),
                "radius": r.radius(),
            }))
        }
        Command::Mld { first, second } => {
            let (t, t2) = (load_tiling(&first)?, load_tiling(&second)?);
            let gamma = mld_check(&t, &t2).map(|g| IsometryJson::from_isometry(&g));
            Ok(json!({ "gamma": gamma, "translation_mld": translation_mld_check(&t, &t2) }))
        }
        Command::Distance { first, second, origin, radius2 } => {
            let (t, t2) = (load_tiling(&first)?, load_tiling(&second)?);
            let o = match origin {
                Some(o) => parse_point(&o, t.dim())?,
                None => QVector::zeros(t.dim()),
            };
            let r2 = radius2.as_deref().map(parse_rational).transpose()?;
            let b = distance_upper_bound(&o, &t, &t2, None, r2)?;
            Ok(json!({
                "upper": b.upper,
                "radius": b.witness.radius,
                "agreement_radius2": b.witness.agreement_sq.as_ref().map(format_rational),
                "phi": IsometryJson::from_isometry(&b.witness.phi),
                "psi": IsometryJson::from_isometry(&b.witness.psi),
            }))
        }
        Command::Render { tiling, svg, window: w } => {
            let t = load_tiling(&tiling)?;
            let text = render_svg(&t, &window(&w)?)?;
            match svg {
                Some(path) => {
                    write(&path, &text)?;
                    Ok(json!({ "paths": text.matches("<path ").count(), "out": path.display().to_string() }))
                }
                None => {
                    emit(&text);
                    Ok(Value::Null)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let render = matches!(&cli.command, Command::Render { svg: None, .. });
    match run(cli.command) {
        Ok(v) => {
            if !render {
                emit(&(serde_json::to_string_pretty(&v).expect("json") + "\n"));
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
