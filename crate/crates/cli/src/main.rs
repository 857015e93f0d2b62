use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quasitile::analysis::{analyze, paper_normalized_b, pattern_metrics, HyperPreset};
use quasitile::document::{Provenance, TilingDocument};
use quasitile::golden::parse_ratio;
use quasitile::grids::{active_segments, is_fibonacci_word, p4_dual_lines, reconstruct_ammann};
use quasitile::render::{plot_order_metric, render_svg, Overlays, RenderStyle};
use quasitile::tiling::{census, generate, p1_to_p4, p4_to_p1, Classifier, Tiling, MARGIN};
use quasitile::transforms::{deflate_p3, deflate_p4, inflate_p4, p3_tau2_direct, p3_tau_direct, p4_to_p3_tau, p4_to_p3_tau2};
use quasitile::windows::default_offset;
use quasitile::{Error, Family, GoldenNumber, PerpVector};

#[derive(Parser)]
#[command(name = "quasitile", version, about = "Exact P3/P4 rhombic tilings: generation, transforms, dual grids and hyperuniformity")]
struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; affects speed only.
    #[arg(long, global = true, env = "QUASITILE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    P3,
    P4,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::P3 => Family::P3,
            FamilyArg::P4 => Family::P4,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowsArg {
    /// The family's own acceptance domains.
    Standard,
    /// P3 at edge τ from the B₁, W₂, W₃, B₄ domains of a P4 lattice.
    P3Tau,
    /// P3 at edge τ² from the P₁, W₂, W₃, P₄ domains.
    P3Tau2,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeriveTarget {
    P1,
    P3Tau,
    P3Tau2,
}

#[derive(Subcommand)]
enum Command {
    /// Cut-and-project patch around a centre.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        scale_exp: u32,
        /// Perpendicular-space offset `a/b,c/d` in the skew basis.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<String>,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, value_enum, default_value = "standard")]
        windows: WindowsArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adds environment, colour and prototile labels; prints the census.
    Classify {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Subdivides every tile (edge length divided by τ).
    Deflate {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Groups tiles into tiles of edge τ (P4 only).
    Inflate {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Locally derived tiling, checked against direct generation.
    Derive {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: DeriveTarget,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dual grid of a P4 document, optionally with active segments and the
    /// Ammann grid.
    Grid {
        input: PathBuf,
        #[arg(long)]
        ammann: bool,
        #[arg(long)]
        active: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Number variance and the order metric B of a generated patch.
    Hyper {
        #[arg(long, default_value = "desk")]
        preset: String,
        #[arg(long, value_enum, default_value = "p4")]
        family: FamilyArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Fail with exit code 3 when B/√φ misses the published value.
        #[arg(long)]
        check: bool,
    },
    /// SVG of a document.
    Render {
        input: PathBuf,
        #[arg(long)]
        style: Option<PathBuf>,
        /// Comma-separated layers; overrides the style's overlays.
        #[arg(long, value_delimiter = ',')]
        layers: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summaries serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            if code == 3 {
                let dump = json!({
                    "error": e.to_string(),
                    "argv": std::env::args().collect::<Vec<_>>(),
                    "version": env!("CARGO_PKG_VERSION"),
                });
                eprintln!("diagnostic: {dump}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SingularOffset { .. } | Error::OnBoundary(_) => 2,
        Error::Consistency(_) | Error::Unclassifiable(_) => 3,
        _ => 1,
    }
}

fn run(cli: &Cli) -> quasitile::Result<Value> {
    match &cli.command {
        Command::Generate { family, radius, scale_exp, offset, center, windows, out } => {
            let off = match offset {
                Some(s) => parse_offset(s)?,
                None => default_offset(),
            };
            let c = parse_center(center)?;
            let fam: Family = (*family).into();
            let t = match windows {
                WindowsArg::Standard => generate(fam, *radius, *scale_exp, off, c)?,
                WindowsArg::P3Tau => p3_tau_direct(*radius, *scale_exp, off, c)?,
                WindowsArg::P3Tau2 => p3_tau2_direct(*radius, *scale_exp, off, c)?,
            };
            let mut p = Provenance::new("generate")
                .with("family", fam)
                .with("radius", radius)
                .with("scale_exp", scale_exp)
                .with("offset", offset.clone().unwrap_or_else(|| "default".into()))
                .with("center", center)
                .with("windows", windows.to_possible_value().unwrap().get_name());
            p.seed = Some(cli.seed);
            write_doc(out, &TilingDocument::from_tiling(&t, p))?;
            Ok(json!({ "family": t.family.to_string(), "vertices": t.vertices.len(), "faces": t.faces.len() }))
        }
        Command::Classify { input, out } => {
            let mut doc = read_doc(input)?;
            let t = doc.to_tiling()?;
            let a = Classifier::new(&t)?.annotate()?;
            doc.set_annotations(&a);
            doc.provenance.parameters.insert("classified".into(), "true".into());
            write_doc(out, &doc)?;
            let c = census(&t)?;
            let m = pattern_metrics(&t, None)?;
            Ok(json!({ "census": c, "metrics": m }))
        }
        Command::Deflate { input, out } => {
            let doc = read_doc(input)?;
            let t = doc.to_tiling()?;
            let d = match t.family {
                Family::P4 => deflate_p4(&t)?.tiling,
                Family::P3 => deflate_p3(&t)?,
            };
            transformed(out, &doc, &d, "deflate")
        }
        Command::Inflate { input, out } => {
            let doc = read_doc(input)?;
            let t = doc.to_tiling()?;
            if t.family != Family::P4 {
                return Err(Error::InvalidArgument("inflation is implemented for P4 documents".into()));
            }
            let d = inflate_p4(&t)?;
            transformed(out, &doc, &d, "inflate")
        }
        Command::Derive { input, to, out } => {
            let doc = read_doc(input)?;
            let t = doc.to_tiling()?;
            if t.family != Family::P4 {
                return Err(Error::InvalidArgument("derivations start from a P4 document".into()));
            }
            match to {
                DeriveTarget::P1 => {
                    let g = p4_to_p1(&t);
                    let back = p1_to_p4(&g)?;
                    let m = MARGIN + 3.0;
                    if back.interior_vertices(m) != t.interior_vertices(m) {
                        return Err(Error::Consistency("P1 graph does not rebuild the P4 patch".into()));
                    }
                    let v = json!({
                        "scale_exp": g.scale_exp,
                        "offset": g.offset,
                        "center": g.center,
                        "radius": g.radius,
                        "nodes": g.nodes,
                        "edges": g.edges,
                        "provenance": Provenance::new("derive").with("to", "p1"),
                    });
                    std::fs::write(out, serde_json::to_vec(&v)?)?;
                    Ok(json!({ "nodes": g.nodes.len(), "edges": g.edges.len(), "round_trip": true }))
                }
                DeriveTarget::P3Tau | DeriveTarget::P3Tau2 => {
                    let (d, direct) = if matches!(to, DeriveTarget::P3Tau) {
                        let d = p4_to_p3_tau(&t)?;
                        let direct = p3_tau_direct(d.radius, t.scale_exp, t.offset, t.center)?;
                        (d, direct)
                    } else {
                        let d = p4_to_p3_tau2(&t)?;
                        let direct = p3_tau2_direct(d.radius, t.scale_exp, t.offset, t.center)?;
                        (d, direct)
                    };
                    let (a, b) = (d.interior_vertices(MARGIN), direct.interior_vertices(MARGIN));
                    if a != b {
                        return Err(Error::Consistency(format!(
                            "derived P3 has {} interior vertices, direct window generation {}",
                            a.len(),
                            b.len()
                        )));
                    }
                    let mut s = transformed(out, &doc, &d, "derive")?;
                    s["matches_direct_generation"] = json!(true);
                    Ok(s)
                }
            }
        }
        Command::Grid { input, ammann, active, out } => {
            let mut doc = read_doc(input)?;
            let t = doc.to_tiling()?;
            let mut d = p4_dual_lines(&t)?;
            if *active {
                d = active_segments(&t, &d)?;
            }
            let a = if *ammann { Some(reconstruct_ammann(&d)?) } else { None };
            doc.set_grid(&d, a.as_ref());
            write_doc(out, &doc)?;
            let fams: Vec<Value> = d
                .families
                .iter()
                .map(|f| {
                    let mut gaps: Vec<_> = f.gaps.clone();
                    gaps.sort();
                    gaps.dedup();
                    json!({ "direction": f.direction, "lines": f.offsets.len(), "gaps": gaps, "pairs": f.pairs().len() })
                })
                .collect();
            let amm: Option<Vec<Value>> = a.as_ref().map(|a| {
                a.families
                    .iter()
                    .map(|f| json!({ "direction": f.direction, "lines": f.offsets.len(), "fibonacci": is_fibonacci_word(&f.gaps) }))
                    .collect()
            });
            Ok(json!({ "dual": fams, "switches": d.switches.len(), "ammann": amm }))
        }
        Command::Hyper { preset, family, out, csv, plot, check } => {
            let p = HyperPreset::by_name(preset)?;
            let fam: Family = (*family).into();
            let t = generate(fam, p.patch_radius, 0, default_offset(), [0.0, 0.0])?;
            let r = analyze(&t, &p, cli.seed)?;
            std::fs::write(out, serde_json::to_vec_pretty(&r.to_json())?)?;
            if let Some(c) = csv {
                std::fs::write(c, r.to_csv()?)?;
            }
            if let Some(pl) = plot {
                std::fs::write(pl, plot_order_metric(&r))?;
            }
            let nb = r.metrics.normalized_b.expect("fit present");
            let want = paper_normalized_b(fam);
            let ok = (nb - want).abs() <= p.tolerance;
            if *check && !ok {
                return Err(Error::Consistency(format!(
                    "B/sqrt(phi) = {nb:.4} misses {want} by more than {}",
                    p.tolerance
                )));
            }
            Ok(json!({
                "family": fam.to_string(),
                "preset": p.name,
                "B": r.fit.b,
                "C": r.fit.c,
                "normalized_B": nb,
                "published": want,
                "tolerance": p.tolerance,
                "within_tolerance": ok,
            }))
        }
        Command::Render { input, style, layers, out } => {
            let doc = read_doc(input)?;
            let mut st = match style {
                Some(p) => RenderStyle::from_json(&std::fs::read(p)?)?,
                None => RenderStyle::default(),
            };
            if let Some(l) = layers {
                st.overlays = Overlays::from_names(l)?;
            }
            let svg = render_svg(&doc, &st)?;
            std::fs::write(out, &svg)?;
            Ok(json!({ "bytes": svg.len() }))
        }
    }
}

fn transformed(out: &Path, src: &TilingDocument, t: &Tiling, step: &str) -> quasitile::Result<Value> {
    let mut p = Provenance::new(step).with("source", &src.provenance.generator);
    p.seed = src.provenance.seed;
    write_doc(out, &TilingDocument::from_tiling(t, p))?;
    Ok(json!({
        "family": t.family.to_string(),
        "scale_exp": t.scale_exp,
        "radius": t.radius,
        "vertices": t.vertices.len(),
        "faces": t.faces.len(),
    }))
}

fn read_doc(p: &Path) -> quasitile::Result<TilingDocument> {
    let bytes = std::fs::read(p).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
    TilingDocument::decode(&bytes).map_err(|e| Error::Document(format!("{}: {e}", p.display())))
}

fn write_doc(p: &Path, d: &TilingDocument) -> quasitile::Result<()> {
    std::fs::write(p, d.encode())?;
    Ok(())
}

fn parse_offset(s: &str) -> quasitile::Result<PerpVector> {
    let bad = |m: String| Error::InvalidArgument(format!("offset `{s}`: {m}"));
    let (a, b) = s.split_once(',').ok_or_else(|| bad("expected a/b,c/d".into()))?;
    let x = parse_ratio(a).map_err(bad)?;
    let y = parse_ratio(b).map_err(bad)?;
    Ok(PerpVector::new(GoldenNumber::rational(x), GoldenNumber::rational(y)))
}

fn parse_center(s: &str) -> quasitile::Result<[f64; 2]> {
    let bad = || Error::InvalidArgument(format!("center `{s}`: expected x,y"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = a.trim().parse().map_err(|_| bad())?;
    let y: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok([x, y])
}
