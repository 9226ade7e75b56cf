//! `abundle` — command-line frontend for the algebra toolkit.
//!
//! Every subcommand wraps exactly one library operation: parse the input
//! documents, run the operation, print one report to stdout. Diagnostics
//! go to stderr. Exit codes: 0 success, 1 malformed input or usage,
//! 2 violated precondition, 3 an iteration that did not converge.
//!
//! Output is deterministic: identical inputs (and seeds, where a seed is
//! taken) produce byte-identical reports. Floats are printed with 17
//! significant digits so every document re-parses to the same bits.

use std::fs;
use std::io::Read as _;
use std::process::ExitCode;

use abundle::json::{self, format_f64};
use abundle::{
    catalog, classify_map, cocycle_defect, embed, gen_gh, gen_gh_canonical, gen_truncated,
    parallel_transport, project_to_variety, pullback, restrict, section_product,
    solve_differential_connection, solve_path_connection, try_isomorphism, validate_family,
    z2_dimension, AlgebraFamily, BaseGrid, BasePoint, ClassifyOptions, Error, Result,
    StructureConstants, DEFAULT_TOL,
};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "abundle",
    version,
    about = "Finite-dimensional algebras from structure constants: residuals, deformations, families, transport"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Associativity residual of a structure-constant tensor
    Check {
        /// Algebra document (path or - for stdin)
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Two-sided unit element, if one exists
    Unit {
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Emit a named generator as an algebra document
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Dimension, for the truncated and gh kinds
        #[arg(long)]
        n: Option<usize>,
        /// Parameter of the quadratic kind: x₂² = t·x₁
        #[arg(long)]
        t: Option<f64>,
        /// Explicit g values for the gh kind (comma-separated)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        g: Option<Vec<f64>>,
        /// Explicit h values for the gh kind (comma-separated)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<f64>>,
    },
    /// Basis-independent invariants of an associative point
    Signature {
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Search for an isomorphism certificate between two algebras
    Iso {
        a: String,
        b: String,
        /// RNG seed for the search starts (required: the search is randomized)
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        attempts: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Dimension of the cocycle space at an associative point
    Z2 {
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Coboundary defect of a bilinear cochain at an algebra point
    Cocycle {
        algebra: String,
        cochain: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Project a tensor onto the associative locus (exit 3 if it fails to converge)
    Project {
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        /// Restore the starting Frobenius norm after every step
        #[arg(long)]
        normalize: bool,
    },
    /// Embed into dimension n+1 by zero padding
    Embed { file: String },
    /// Restrict to the leading n−1 block; the discarded entries must vanish
    Restrict {
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Per-node associativity residuals of a family
    FamilyValidate {
        file: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Group the fibers of a family by invariant signature
    FamilyClassify {
        file: String,
        /// RNG seed for the strictness probe (required: the probe is randomized)
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        attempts: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Fiberwise product of two sections of a family
    SectionMul {
        family: String,
        left: String,
        right: String,
    },
    /// Pull a family back along a map of bases
    Pullback { family: String, map: String },
    /// Solve the connection equation δΓ = μ′ at one point or along the whole interval
    ConnectionSolve {
        family: String,
        /// Solve at this single base point instead of nodewise
        #[arg(long)]
        t: Option<f64>,
        /// Central-difference step for the single-point solve (default: grid spacing)
        #[arg(long)]
        h: Option<f64>,
    },
    /// Integrate parallel transport Φ′ = −Γ(t)Φ between two base points
    Transport {
        family: String,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        t1: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Connection document to integrate (default: solve one from the family)
        #[arg(long)]
        connection: Option<String>,
    },
    /// Map an operation over every node of a family
    Sweep {
        #[arg(long, value_enum)]
        op: SweepOp,
        family: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    /// Mod-n convolution rule α_ij^k = 1 iff k ≡ i+j (mod n)
    Truncated,
    /// Rank-one rule α_ij^k = g(k)h(i)h(j); canonical g(k)=k, h(j)=(−1)^j unless --g/--h given
    Gh,
    /// ℝ ⊕ ℝ in the idempotent basis
    Rr,
    /// ℝ[x]/(x² + 1)
    Complex,
    /// ℝ[x]/(x²)
    Dual,
    /// ℝ[x]/(x² − 1)
    Split,
    /// ℝ[x]/(x² − t), requires --t
    Quadratic,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepOp {
    ConnectionSolve,
    FamilyValidate,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            use std::io::Write;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(std::io::stdout(), "{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = write!(std::io::stderr(), "{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(match e {
                Error::Input(_) => 1,
                Error::Precondition(_) => 2,
            })
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::input(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {path}: {e}")))
    }
}

fn read_algebra_input(path: &str) -> Result<StructureConstants> {
    json::read_algebra(&read_input(path)?)
}

fn read_family_input(path: &str) -> Result<AlgebraFamily> {
    json::read_family(&read_input(path)?)
}

/// Writes one report line; a consumer that closed the pipe early (head,
/// a pager) ends the run quietly instead of panicking.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if out
        .write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .is_err()
    {
        std::process::exit(0);
    }
}

fn print_json<T: Serialize>(value: &T) {
    emit(&json::to_json_17(value));
}

#[derive(Serialize)]
struct CheckOut {
    n: usize,
    frobenius_norm: f64,
    max_abs: f64,
    associative: bool,
}

#[derive(Serialize)]
struct UnitOut {
    exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    e: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

#[derive(Serialize)]
struct IsoOut {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct Z2Out {
    n: usize,
    z2_dim: usize,
}

#[derive(Serialize)]
struct CocycleOut {
    defect: f64,
    cocycle: bool,
}

#[derive(Serialize)]
struct AlgebraOut {
    n: usize,
    alpha: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct ProjectOut {
    converged: bool,
    iterations: usize,
    final_residual: f64,
    step_norms: Vec<f64>,
    point: AlgebraOut,
}

#[derive(Serialize)]
struct PointSolveOut {
    t: f64,
    h: f64,
    gamma: Vec<Vec<f64>>,
    residual: f64,
}

#[derive(Serialize)]
struct ScalarRow {
    node: usize,
    t: f64,
    residual: f64,
}

#[derive(Serialize)]
struct PlanarRow {
    node: usize,
    u: f64,
    v: f64,
    residual: f64,
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Check { file, tol } => {
            let a = read_algebra_input(&file)?;
            let r = a.associator_residual();
            print_json(&CheckOut {
                n: a.n(),
                frobenius_norm: r.frobenius_norm,
                max_abs: r.max_abs,
                associative: r.max_abs <= tol,
            });
            Ok(0)
        }
        Cmd::Unit { file, tol } => {
            let a = read_algebra_input(&file)?;
            let out = match a.find_unit(tol) {
                Some(u) => UnitOut {
                    exists: true,
                    e: Some(u.e.iter().copied().collect()),
                    residual: Some(u.residual),
                },
                None => UnitOut {
                    exists: false,
                    e: None,
                    residual: None,
                },
            };
            print_json(&out);
            Ok(0)
        }
        Cmd::Gen { kind, n, t, g, h } => {
            let a = generate(kind, n, t, g, h)?;
            emit(&json::write_algebra(&a));
            Ok(0)
        }
        Cmd::Signature { file, tol } => {
            let a = read_algebra_input(&file)?;
            print_json(&a.iso_signature(tol)?);
            Ok(0)
        }
        Cmd::Iso {
            a,
            b,
            seed,
            attempts,
            tol,
        } => {
            let left = read_algebra_input(&a)?;
            let right = read_algebra_input(&b)?;
            let out = match try_isomorphism(&left, &right, attempts, tol, seed)? {
                Some(g) => IsoOut {
                    found: true,
                    g: Some(json::nested_matrix(&g)),
                },
                None => IsoOut { found: false, g: None },
            };
            print_json(&out);
            Ok(0)
        }
        Cmd::Z2 { file, tol } => {
            let a = read_algebra_input(&file)?;
            print_json(&Z2Out {
                n: a.n(),
                z2_dim: z2_dimension(&a, tol)?,
            });
            Ok(0)
        }
        Cmd::Cocycle {
            algebra,
            cochain,
            tol,
        } => {
            let a = read_algebra_input(&algebra)?;
            let f = json::read_cochain(&read_input(&cochain)?)?;
            let defect = cocycle_defect(&a, &f)?;
            print_json(&CocycleOut {
                defect,
                cocycle: defect <= tol,
            });
            Ok(0)
        }
        Cmd::Project {
            file,
            tol,
            max_iter,
            normalize,
        } => {
            let a = read_algebra_input(&file)?;
            let report = project_to_variety(&a, tol, max_iter, normalize)?;
            let converged = report.converged;
            print_json(&ProjectOut {
                converged,
                iterations: report.iterations,
                final_residual: report.final_residual,
                step_norms: report.step_norms,
                point: AlgebraOut {
                    n: report.point.n(),
                    alpha: json::nested_tensor(report.point.tensor()),
                },
            });
            Ok(if converged { 0 } else { 3 })
        }
        Cmd::Embed { file } => {
            let a = read_algebra_input(&file)?;
            emit(&json::write_algebra(&embed(&a)));
            Ok(0)
        }
        Cmd::Restrict { file, tol } => {
            let a = read_algebra_input(&file)?;
            emit(&json::write_algebra(&restrict(&a, tol)?));
            Ok(0)
        }
        Cmd::FamilyValidate { file, tol, format } => {
            let f = read_family_input(&file)?;
            let v = validate_family(&f, tol);
            match format {
                Format::Json => print_json(&v),
                Format::Csv => {
                    let mut lines = vec!["node,residual".to_string()];
                    for (i, r) in v.residuals.iter().enumerate() {
                        lines.push(format!("{},{}", i, format_f64(*r)));
                    }
                    emit(&lines.join("\n"));
                }
            }
            Ok(0)
        }
        Cmd::FamilyClassify {
            file,
            seed,
            attempts,
            tol,
            format,
        } => {
            let f = read_family_input(&file)?;
            let report = classify_map(&f, &ClassifyOptions { tol, attempts, seed })?;
            match format {
                Format::Json => print_json(&report),
                Format::Csv => {
                    let mut lines = vec![
                        "node,dim,commutative,unital,sig_pos,sig_neg,sig_zero,z2_dim,center_dim,cluster"
                            .to_string(),
                    ];
                    for (i, sig) in report.signatures.iter().enumerate() {
                        let (p, m, z) = sig.trace_form_signature;
                        lines.push(format!(
                            "{},{},{},{},{},{},{},{},{},{}",
                            i,
                            sig.dim,
                            sig.commutative,
                            sig.unital,
                            p,
                            m,
                            z,
                            sig.z2_dim,
                            sig.center_dim,
                            report.cluster_of_node[i]
                        ));
                    }
                    emit(&lines.join("\n"));
                }
            }
            Ok(0)
        }
        Cmd::SectionMul {
            family,
            left,
            right,
        } => {
            let f = read_family_input(&family)?;
            let s = json::read_section(&read_input(&left)?)?;
            let t = json::read_section(&read_input(&right)?)?;
            let product = section_product(&f, &s, &t)?;
            emit(&json::write_section(&product));
            Ok(0)
        }
        Cmd::Pullback { family, map } => {
            let f = read_family_input(&family)?;
            let (base, phi) = json::read_pullback_map(&read_input(&map)?)?;
            let pulled = pullback(&f, base, &phi)?;
            emit(&json::write_family(&pulled));
            Ok(0)
        }
        Cmd::ConnectionSolve { family, t, h } => {
            let f = read_family_input(&family)?;
            match t {
                Some(t) => {
                    let h = match h {
                        Some(h) => h,
                        None => interval_grid(&f)?.dt(),
                    };
                    let (gamma, residual) = solve_differential_connection(&f, t, h)?;
                    print_json(&PointSolveOut {
                        t,
                        h,
                        gamma: json::nested_matrix(&gamma),
                        residual,
                    });
                }
                None => {
                    if h.is_some() {
                        return Err(Error::input("--h only applies to a single-point solve (--t)"));
                    }
                    let c = solve_path_connection(&f)?;
                    emit(&json::write_connection(&c));
                }
            }
            Ok(0)
        }
        Cmd::Transport {
            family,
            t0,
            t1,
            steps,
            connection,
        } => {
            let f = read_family_input(&family)?;
            let conn = match connection {
                Some(path) => json::read_connection(&read_input(&path)?)?,
                None => solve_path_connection(&f)?,
            };
            let map = parallel_transport(&f, &conn, t0, t1, steps)?;
            emit(&json::write_transport(&map));
            Ok(0)
        }
        Cmd::Sweep {
            op,
            family,
            tol,
            format,
        } => {
            let f = read_family_input(&family)?;
            let residuals = match op {
                SweepOp::FamilyValidate => {
                    let _ = tol;
                    (0..f.base().node_count())
                        .into_par_iter()
                        .map(|i| f.node_algebra(i).associator_residual().max_abs)
                        .collect::<Vec<_>>()
                }
                SweepOp::ConnectionSolve => solve_path_connection(&f)?.residuals,
            };
            emit_sweep(&f, &residuals, format)?;
            Ok(0)
        }
    }
}

fn generate(
    kind: GenKind,
    n: Option<usize>,
    t: Option<f64>,
    g: Option<Vec<f64>>,
    h: Option<Vec<f64>>,
) -> Result<StructureConstants> {
    let need_n = |what: &str| {
        n.ok_or_else(|| Error::input(format!("--kind {what} requires --n")))
    };
    match kind {
        GenKind::Truncated => gen_truncated(need_n("truncated")?),
        GenKind::Gh => match (g, h) {
            (None, None) => gen_gh_canonical(need_n("gh")?),
            (Some(g), Some(h)) => {
                if let Some(n) = n {
                    if g.len() != n {
                        return Err(Error::input(format!(
                            "--g has {} values but --n is {}",
                            g.len(),
                            n
                        )));
                    }
                }
                gen_gh(&g, &h)
            }
            _ => Err(Error::input("--g and --h must be given together")),
        },
        GenKind::Rr => Ok(catalog::direct_sum_rr()),
        GenKind::Complex => Ok(catalog::complex_numbers()),
        GenKind::Dual => Ok(catalog::dual_numbers()),
        GenKind::Split => Ok(catalog::split_complex()),
        GenKind::Quadratic => Ok(catalog::quadratic_extension(t.ok_or_else(|| {
            Error::input("--kind quadratic requires --t")
        })?)),
    }
}

fn interval_grid(f: &AlgebraFamily) -> Result<&abundle::IntervalGrid> {
    match f.base() {
        BaseGrid::Interval(grid) => Ok(grid),
        other => Err(Error::input(format!(
            "this operation needs a family over an interval base, got {}",
            other.kind_name()
        ))),
    }
}

fn emit_sweep(f: &AlgebraFamily, residuals: &[f64], format: Format) -> Result<()> {
    let planar = f.base().dim() == 2;
    match format {
        Format::Csv => {
            let mut lines = vec![if planar {
                "node,u,v,residual".to_string()
            } else {
                "node,t,residual".to_string()
            }];
            for (i, r) in residuals.iter().enumerate() {
                match f.base().node_point(i)? {
                    BasePoint::Scalar(t) => {
                        lines.push(format!("{},{},{}", i, format_f64(t), format_f64(*r)))
                    }
                    BasePoint::Planar([u, v]) => lines.push(format!(
                        "{},{},{},{}",
                        i,
                        format_f64(u),
                        format_f64(v),
                        format_f64(*r)
                    )),
                }
            }
            emit(&lines.join("\n"));
        }
        Format::Json => {
            if planar {
                let rows = residuals
                    .iter()
                    .enumerate()
                    .map(|(i, r)| match f.base().node_point(i)? {
                        BasePoint::Planar([u, v]) => Ok(PlanarRow {
                            node: i,
                            u,
                            v,
                            residual: *r,
                        }),
                        BasePoint::Scalar(_) => {
                            Err(Error::input("planar base produced a scalar node"))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                print_json(&rows);
            } else {
                let rows = residuals
                    .iter()
                    .enumerate()
                    .map(|(i, r)| match f.base().node_point(i)? {
                        BasePoint::Scalar(t) => Ok(ScalarRow {
                            node: i,
                            t,
                            residual: *r,
                        }),
                        BasePoint::Planar(_) => {
                            Err(Error::input("scalar base produced a planar node"))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                print_json(&rows);
            }
        }
    }
    Ok(())
}
