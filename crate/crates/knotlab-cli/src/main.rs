use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use knotlab::alexander::{alexander_from_braid, circle_root_report, determinant, odd_circle_root_obstruction};
use knotlab::apoly::{boundary_slopes_from_sides, edge_polynomial, newton_polygon, BivLaurentPoly};
use knotlab::braid::Braid;
use knotlab::diagram::{crowell_inequality_check, spanning_tree_count, DiagramRecord, ExceptionClass};
use knotlab::image_ops::fit_arc_lines;
use knotlab::laurent::{cyclotomic_product_test, IntLaurentPoly};
use knotlab::slopes::{check_slope, estimate_limit_slope, generate_cyclic_family, Slope};
use knotlab::tracer::{trace_image, TraceOptions};
use knotlab::KnotPresentation;
use knotlab_cli::report::{compare_golden, corpus_report, verdicts_csv, ReportOptions};
use knotlab_cli::table::{bundled_table_path, ingest_table, TableError};
use knotlab_cli::Classifier;
use serde_json::json;
use shearflow::certify::{run_pipeline, CertifyConfig};
use shearflow::HamiltonianField;

const EXIT_MISMATCH: u8 = 2;
const EXIT_SCHEMA: u8 = 3;

#[derive(Parser)]
#[command(name = "knotlab", version, about = "SU(2) pillowcase images, surgery slopes and knot-table obstructions")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace the pillowcase image of a knot group.
    Pillowcase {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
    },
    /// Test surgery slopes against a traced image, or list the cyclic slope family.
    Slopes {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Slopes `m/n` to test; may repeat.
        #[arg(long = "test")]
        tests: Vec<String>,
        #[arg(long)]
        family: bool,
        /// Family members `k` with `1 <= |k| <= range` are checked.
        #[arg(long, default_value_t = 20)]
        range: i64,
    },
    /// Alexander polynomial invariants.
    Alex {
        /// Polynomial text such as `t-1+t^-1`.
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        braid: Option<String>,
    },
    /// Newton polygon, boundary slopes and edge polynomials of an A-polynomial.
    Apoly {
        /// JSON array of `[m, l, c]` terms, or a path to a file holding one.
        poly: String,
    },
    /// Black graph, spanning trees and determinant bounds of an alternating diagram.
    Graph {
        #[arg(long)]
        pd: Option<String>,
        /// Signed Gauss code, e.g. `1,-2,3,-1,2,-3`, with crossing signs given by `--signs`.
        #[arg(long)]
        gauss: Option<String>,
        #[arg(long, default_value = "")]
        signs: String,
        #[arg(long, value_enum, default_value_t = ClassArg::Other)]
        class: ClassArg,
    },
    /// Build and certify a piecewise shearing isotopy for the Hamiltonian test field.
    Shear {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        kmax: i64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        equivariant: bool,
        #[arg(long)]
        r1: Option<f64>,
    },
    /// Classify knots of a table.
    Classify {
        #[command(flatten)]
        table: TableArgs,
        /// Only these knots; may repeat.
        #[arg(long)]
        knot: Vec<String>,
    },
    /// Classify a whole table and write a report directory.
    Corpus {
        #[command(flatten)]
        table: TableArgs,
        /// Restrict to these crossing numbers; may repeat.
        #[arg(long)]
        crossings: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace pillowcase images for knots with braids and write plot CSVs.
        #[arg(long)]
        plots: bool,
        #[arg(long, default_value_t = 128)]
        plot_resolution: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Torus2,
    Twist,
    Other,
}

#[derive(Args)]
struct KnotArgs {
    /// Presentation JSON file.
    #[arg(long)]
    knot: Option<PathBuf>,
    #[arg(long)]
    braid: Option<String>,
    /// `p:q`
    #[arg(long)]
    torus: Option<String>,
    /// `p/q`
    #[arg(long)]
    two_bridge: Option<String>,
}

#[derive(Args)]
struct TableArgs {
    /// CSV or JSON table; defaults to the bundled table.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    audit: bool,
    /// Golden `name,status` CSV; mismatches exit with status 2.
    #[arg(long)]
    golden: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Schema(String),
    Mismatch(usize),
    Other(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.to_string())
    }
}

fn split_pair(s: &str, sep: char) -> Result<(i64, i64), Failure> {
    let (a, b) = s.split_once(sep).ok_or_else(|| Failure::Other(format!("expected a{sep}b, got {s}")))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn presentation(k: &KnotArgs) -> Result<KnotPresentation, Failure> {
    if let Some(p) = &k.knot {
        return Ok(KnotPresentation::from_json(&std::fs::read_to_string(p)?)?);
    }
    if let Some(b) = &k.braid {
        return Ok(KnotPresentation::from_braid(&b.parse::<Braid>()?)?);
    }
    if let Some(t) = &k.torus {
        let (p, q) = split_pair(t, ':')?;
        return Ok(KnotPresentation::torus(p, q)?);
    }
    if let Some(t) = &k.two_bridge {
        let (p, q) = split_pair(t, '/')?;
        return Ok(KnotPresentation::two_bridge(p, q)?);
    }
    Err(Failure::Other("give one of --knot, --braid, --torus, --two-bridge".into()))
}

fn emit(format: Format, v: &serde_json::Value, csv: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{v}"),
        Format::Csv => print!("{}", csv()),
    }
}

fn load_table(t: &TableArgs) -> Result<Vec<knotlab_cli::KnotRecord>, Failure> {
    let path = t.table.clone().unwrap_or_else(bundled_table_path);
    ingest_table(&path).map_err(|e| match e {
        TableError::Io { .. } => Failure::Other(e.to_string()),
        _ => Failure::Schema(e.to_string()),
    })
}

fn check_golden(t: &TableArgs, verdicts: &[knotlab_cli::Verdict]) -> Result<(), Failure> {
    let Some(g) = &t.golden else { return Ok(()) };
    let text = std::fs::read_to_string(g)?;
    let mism = compare_golden(verdicts, &text)?;
    for m in &mism {
        eprintln!("mismatch {}: expected {}, got {}", m.name, m.expected, m.actual);
    }
    if mism.is_empty() { Ok(()) } else { Err(Failure::Mismatch(mism.len())) }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let fmt = cli.format;
    match cli.cmd {
        Cmd::Pillowcase { knot, resolution } => {
            let img = trace_image(&presentation(&knot)?, &TraceOptions::with_resolution(resolution))?;
            emit(fmt, &serde_json::to_value(&img)?, || img.to_csv());
        }
        Cmd::Slopes { knot, resolution, tests, family, range } => {
            let img = trace_image(&presentation(&knot)?, &TraceOptions::with_resolution(resolution))?;
            let mut certs = Vec::new();
            for t in &tests {
                certs.push(check_slope(&img, t.parse::<Slope>()?));
            }
            if family {
                let est = estimate_limit_slope(&img)?;
                let lines: Vec<_> = fit_arc_lines(&img, 1e-6).into_iter().filter(|l| !l.curved).collect();
                let pts: Vec<_> = img.isolated_points.iter().map(|p| p.point()).collect();
                let fam = generate_cyclic_family(est.r, &lines, &pts)?;
                if fmt == Format::Json {
                    println!("{}", json!({ "limit_slope": est, "family": fam }));
                }
                for k in (-range..=range).filter(|k| *k != 0 && !fam.excluded.contains(k)) {
                    certs.push(check_slope(&img, fam.member(k)));
                }
            }
            match fmt {
                Format::Json => {
                    for c in &certs {
                        println!("{}", serde_json::to_string(c)?);
                    }
                }
                Format::Csv => {
                    println!("slope,verdict,min_gap");
                    for c in &certs {
                        println!("{},{},{}", c.slope, serde_json::to_value(c.verdict)?.as_str().unwrap_or(""), c.min_gap);
                    }
                }
            }
        }
        Cmd::Alex { poly, braid } => {
            let p = match (poly, braid) {
                (Some(p), _) => IntLaurentPoly::parse(&p)?,
                (None, Some(b)) => alexander_from_braid(&b.parse::<Braid>()?)?,
                _ => return Err(Failure::Other("give --poly or --braid".into())),
            };
            let p = p.normalize()?;
            let rep = circle_root_report(&p)?;
            let obs = odd_circle_root_obstruction(&p)?;
            let det = determinant(&p);
            let v = json!({
                "alexander": p.to_string(),
                "determinant": det.to_string(),
                "cyclotomic_factors": rep.cyclotomic,
                "odd_root_obstruction": obs.obstructed,
                "witness": obs.witness,
            });
            emit(fmt, &v, || format!("alexander,determinant,odd_root_obstruction\n{p},{det},{}\n", obs.obstructed));
        }
        Cmd::Apoly { poly } => {
            let text = if std::path::Path::new(&poly).is_file() { std::fs::read_to_string(&poly)? } else { poly };
            let a = BivLaurentPoly::from_json(&text)?;
            let np = newton_polygon(&a)?;
            let slopes = boundary_slopes_from_sides(&np)?;
            let sides: Vec<_> = np
                .sides()
                .iter()
                .map(|s| {
                    let e = edge_polynomial(&a, s)?;
                    Ok(json!({ "start": s.start, "end": s.end, "edge_polynomial": e.format_var('z'), "cyclotomic_product": cyclotomic_product_test(&e) }))
                })
                .collect::<Result<_, knotlab::apoly::ApolyError>>()?;
            let v = json!({ "polynomial": a.to_string(), "vertices": np.vertices, "boundary_slopes": slopes, "sides": sides });
            emit(fmt, &v, || {
                let mut s = String::from("boundary_slope\n");
                for x in &slopes {
                    s.push_str(&format!("{x}\n"));
                }
                s
            });
        }
        Cmd::Graph { pd, gauss, signs, class } => {
            let d = match (pd, gauss) {
                (Some(p), _) => DiagramRecord::parse_pd(&p)?,
                (None, Some(g)) => DiagramRecord::parse_gauss(&g, &signs)?,
                _ => return Err(Failure::Other("give --pd or --gauss".into())),
            };
            let g = d.black_graph()?;
            let trees = spanning_tree_count(&g)?;
            let c = d.crossing_number() as i64;
            let class = match class {
                ClassArg::Torus2 => ExceptionClass::Torus2,
                ClassArg::Twist => ExceptionClass::Twist,
                ClassArg::Other => ExceptionClass::Other,
            };
            let det: i64 = trees.to_string().parse()?;
            let verdict = crowell_inequality_check(det, c, class);
            let v = json!({ "crossings": c, "black_graph": g, "spanning_trees": trees.to_string(), "crowell": verdict });
            emit(fmt, &v, || format!("crossings,spanning_trees,three_c_bound,two_c_bound\n{c},{trees},{},{}\n", verdict.three_c_bound, verdict.two_c_bound));
        }
        Cmd::Shear { n, k, kmax, grid, equivariant, r1 } => {
            let cfg = CertifyConfig { n, k, kmax, grid, equivariant, r1, ..Default::default() };
            let (report, _) = run_pipeline(&HamiltonianField::test_field(), &cfg)?;
            emit(fmt, &serde_json::to_value(&report)?, || {
                let mut s = String::from("t,freeze_c0,freeze_c1,fourier_c0,fourier_c1,splitting_c0,splitting_c1,total_c0,total_c1\n");
                for x in &report.slices {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        x.t, x.freeze.c0, x.freeze.c1(), x.fourier.c0, x.fourier.c1(), x.splitting.c0, x.splitting.c1(), x.total.c0, x.total.c1()
                    ));
                }
                s
            });
            if !report.violations.is_empty() {
                return Err(Failure::Other(format!("{} bound violations", report.violations.len())));
            }
        }
        Cmd::Classify { table, knot } => {
            let recs = load_table(&table)?;
            let c = Classifier::new(&recs).audit(table.audit);
            let sel: Vec<_> = recs.iter().filter(|r| knot.is_empty() || knot.contains(&r.name)).cloned().collect();
            let verdicts = c.classify_all(&sel);
            match fmt {
                Format::Json => {
                    for v in &verdicts {
                        println!("{}", serde_json::to_string(v)?);
                    }
                }
                Format::Csv => print!("{}", verdicts_csv(&verdicts)),
            }
            check_golden(&table, &verdicts)?;
        }
        Cmd::Corpus { table, crossings, out, plots, plot_resolution } => {
            let recs = load_table(&table)?;
            let opts = ReportOptions {
                audit: table.audit,
                plot_dir: plots.then(|| out.clone().unwrap_or_else(|| PathBuf::from(".")).join("plots")),
                plot_resolution,
                crossings,
            };
            let rep = corpus_report(&recs, &opts)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("verdicts.csv"), verdicts_csv(&rep.verdicts))?;
                std::fs::write(dir.join("verdicts.json"), serde_json::to_string_pretty(&rep.verdicts)?)?;
                std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&rep.summary)?)?;
            }
            emit(fmt, &serde_json::to_value(&rep.summary)?, || verdicts_csv(&rep.verdicts));
            check_golden(&table, &rep.verdicts)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Schema(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_SCHEMA)
        }
        Err(Failure::Mismatch(n)) => {
            eprintln!("{n} verdict mismatches against the golden file");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}
