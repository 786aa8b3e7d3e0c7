//! `brst` — compute Lie-algebra and gauge-part BRST cohomology in the
//! small algebra, exactly.

use brst::cohom::cohomology;
use brst::deriv::{build, OperatorId};
use brst::descent::{build_table, classify, transgress, DescentContext};
use brst::gca::{slice_size_capped, Element, GeneratorTable, SliceConstraints, VariableScheme};
use brst::hs::{crosscheck, decomposition, ModuleV};
use brst::liealg::{self, check_invariant_metric, LieAlgebraSpec, SemidirectSplit};
use brst::rational::{fmt_q, parse_q};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "brst",
    version,
    about = "Exact BRST / Lie-algebra cohomology in the small algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cache directory for expensive slice computations
    /// (default: $BRST_CACHE_DIR when set).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads for slice fan-out.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Progress notes on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    /// Refuse slices larger than this many monomials (exit 4).
    #[arg(long, global = true, default_value_t = 200_000)]
    max_slice_monomials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct AlgebraArgs {
    /// Builtin algebra: so3, so21, iso3, iso21, so21+so21, abelianN.
    #[arg(long)]
    algebra: Option<String>,
    /// JSON spec file with basis labels and structure constants.
    #[arg(long)]
    spec_file: Option<PathBuf>,
    /// Semidirect split as `K=0,1,2;J=3,4,5` (defaults to the builtin's).
    #[arg(long)]
    split: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check antisymmetry and the Jacobi identity component by component.
    Validate(AlgebraArgs),
    /// Killing metric and its rank.
    Killing(AlgebraArgs),
    /// Gauge cohomology of one graded slice.
    Cohomology {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Variable scheme: ce_ghost, small_fc, small_full, split_fc, split_full.
        #[arg(long, default_value = "split_fc")]
        scheme: String,
        /// Operator to take cohomology of.
        #[arg(long, default_value = "gamma_s")]
        operator: String,
        /// Total ghost number of the slice.
        #[arg(long)]
        ghost: u32,
        /// Curvature degree of the slice (required unless the scheme is ghosts-only).
        #[arg(long)]
        curv: Option<u32>,
    },
    /// Hochschild-Serre dimension table with the direct crosscheck.
    HsTable {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Coefficient module: trivial (V = R) or universal (V = S(G*)).
        #[arg(long, default_value = "universal")]
        module: String,
        #[arg(long, default_value_t = 4)]
        max_curv_degree: u32,
        /// Include representative strings.
        #[arg(long)]
        representatives: bool,
    },
    /// Descent-equation machinery.
    #[command(subcommand)]
    Descent(DescentCommand),
    /// Transgression ladder of the semisimple primitive.
    Transgress {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Bottom cocycle in element syntax (default: the primitive).
        #[arg(long)]
        bottom: Option<String>,
    },
    /// Deformed structure constants and invariant metric checks.
    DeformCheck {
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value = "0")]
        mu: String,
    },
    /// Print a named operator as its generator-image table.
    ShowOperator {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value = "split_fc")]
        scheme: String,
        #[arg(long, default_value = "gamma_s")]
        name: String,
    },
}

#[derive(Subcommand)]
enum DescentCommand {
    /// Classify the gauge cohomology and emit the ghost-by-depth table.
    Table {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 4)]
        max_curv_degree: u32,
        /// Default: twice the algebra dimension.
        #[arg(long)]
        max_ghost: Option<u32>,
    },
}

enum Failure {
    Parse(String),
    Validation(String),
    Resource(String),
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Resource(_) => 4,
            Failure::Internal(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Parse(_) => "parse",
            Failure::Validation(_) => "validation",
            Failure::Resource(_) => "resource",
            Failure::Internal(_) => "internal",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m)
            | Failure::Validation(m)
            | Failure::Resource(m)
            | Failure::Internal(m) => m,
        }
    }
}

fn internal<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Internal(e.to_string())
}

/// Precondition violations in the descent machinery are user input
/// problems, not engine faults.
fn descent_failure(e: brst::descent::DescentError) -> Failure {
    use brst::descent::DescentError;
    match e {
        DescentError::NotCocycle { .. }
        | DescentError::NotHomogeneous
        | DescentError::NotInSmallVariables
        | DescentError::NotInvariant
        | DescentError::NotInF1
        | DescentError::Unsupported(_) => Failure::Validation(e.to_string()),
        other => Failure::Internal(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(output) => {
            // tolerate a closed pipe (e.g. `brst ... | head`)
            use std::io::Write;
            let _ = std::io::stdout().write_all(output.as_bytes());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let err = serde_json::json!({
                "error": failure.message(),
                "kind": failure.kind(),
            });
            eprintln!("{err}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn resolve_algebra(
    args: &AlgebraArgs,
) -> Result<(LieAlgebraSpec, Option<SemidirectSplit>), Failure> {
    let alg = match (&args.algebra, &args.spec_file) {
        (Some(name), None) => liealg::builtin(name).map_err(|e| Failure::Parse(e.to_string()))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
            LieAlgebraSpec::from_json(&text).map_err(|e| Failure::Parse(e.to_string()))?
        }
        _ => {
            return Err(Failure::Parse(
                "exactly one of --algebra or --spec-file is required".into(),
            ))
        }
    };
    let split = match &args.split {
        Some(spec) => Some(parse_split(spec, &alg)?),
        None => args.algebra.as_deref().and_then(liealg::builtin_split),
    };
    Ok((alg, split))
}

fn parse_split(spec: &str, alg: &LieAlgebraSpec) -> Result<SemidirectSplit, Failure> {
    let mut subalg = None;
    let mut ideal = None;
    for part in spec.split(';') {
        let (key, vals) = part
            .split_once('=')
            .ok_or_else(|| Failure::Parse(format!("bad split component {part:?}")))?;
        let indices: Vec<usize> = if vals.trim().is_empty() {
            Vec::new()
        } else {
            vals.split(',')
                .map(|v| v.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Parse(format!("bad split index in {part:?}: {e}")))?
        };
        match key.trim() {
            "K" => subalg = Some(indices),
            "J" => ideal = Some(indices),
            other => return Err(Failure::Parse(format!("unknown split key {other:?}"))),
        }
    }
    let (subalg_indices, ideal_indices) = match (subalg, ideal) {
        (Some(k), Some(j)) => (k, j),
        _ => return Err(Failure::Parse("split needs both K=... and J=...".into())),
    };
    // the abelian flag is read off the declared brackets and then verified
    let abelian_ideal = ideal_indices.iter().all(|&a| {
        ideal_indices
            .iter()
            .all(|&b| a == b || alg.bracket(a, b).is_empty())
    });
    Ok(SemidirectSplit {
        subalg_indices,
        ideal_indices,
        abelian_ideal,
    })
}

fn need_split(split: Option<SemidirectSplit>) -> Result<SemidirectSplit, Failure> {
    split.ok_or_else(|| {
        Failure::Parse("this command needs a --split (or a builtin with one)".into())
    })
}

fn verified_split(alg: &LieAlgebraSpec, split: &SemidirectSplit) -> Result<(), Failure> {
    liealg::verify_semidirect(alg, split)
        .map(|_| ())
        .map_err(|e| Failure::Validation(e.to_string()))
}

fn guard_slices(
    table: &Arc<GeneratorTable>,
    slices: impl IntoIterator<Item = SliceConstraints>,
    cap: usize,
) -> Result<(), Failure> {
    for c in slices {
        match slice_size_capped(table, &c, cap).map_err(|e| Failure::Parse(e.to_string()))? {
            Some(_) => {}
            None => {
                return Err(Failure::Resource(format!(
                    "slice {c:?} exceeds the monomial cap {cap}"
                )))
            }
        }
    }
    Ok(())
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    cli.cache_dir
        .clone()
        .or_else(|| std::env::var_os("BRST_CACHE_DIR").map(PathBuf::from))
}

/// Runs `compute` through the content-addressed cache when one is
/// configured; cached and cold runs emit identical bytes.
fn with_cache(
    cli: &Cli,
    key_parts: &[&str],
    compute: impl FnOnce() -> Result<String, Failure>,
) -> Result<String, Failure> {
    let Some(dir) = cache_dir(cli) else {
        return compute();
    };
    let mut hasher = Sha256::new();
    hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
    for part in key_parts {
        hasher.update([0u8]);
        hasher.update(part.as_bytes());
    }
    let key = format!("{:x}", hasher.finalize());
    let path = dir.join(format!("{key}.out"));
    if let Ok(cached) = std::fs::read_to_string(&path) {
        if cli.verbose {
            eprintln!("cache hit: {}", path.display());
        }
        return Ok(cached);
    }
    let output = compute()?;
    if std::fs::create_dir_all(&dir).is_ok() {
        let tmp = dir.join(format!("{key}.tmp{}", std::process::id()));
        if std::fs::write(&tmp, &output).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
    Ok(output)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Validate(args) => {
            let (alg, _) = resolve_algebra(args)?;
            let report = alg.validate();
            if !report.is_valid() {
                return Err(Failure::Validation(format!(
                    "algebra {} is invalid: {report}",
                    alg.name
                )));
            }
            Ok(match cli.format {
                Format::Text => format!("{}: valid ({} generators)\n", alg.name, alg.dim()),
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({"algebra": alg.name, "valid": true, "dim": alg.dim()})
                ),
            })
        }
        Command::Killing(args) => {
            let (alg, _) = resolve_algebra(args)?;
            let k = alg.killing_form();
            let rank = k.rank();
            Ok(match cli.format {
                Format::Json => {
                    let matrix: Vec<Vec<String>> = k
                        .matrix
                        .iter()
                        .map(|r| r.iter().map(fmt_q).collect())
                        .collect();
                    format!(
                        "{}\n",
                        serde_json::json!({"algebra": alg.name, "killing": matrix, "rank": rank})
                    )
                }
                Format::Text => {
                    let mut out = format!("Killing metric of {} (rank {rank}):\n", alg.name);
                    for row in &k.matrix {
                        let cells: Vec<String> = row.iter().map(fmt_q).collect();
                        let _ = writeln!(out, "  [{}]", cells.join(", "));
                    }
                    out
                }
            })
        }
        Command::Cohomology {
            alg: args,
            scheme,
            operator,
            ghost,
            curv,
        } => {
            let (alg, split) = resolve_algebra(args)?;
            let scheme = VariableScheme::parse(scheme)
                .ok_or_else(|| Failure::Parse(format!("unknown scheme {scheme:?}")))?;
            let split = if scheme.is_split() {
                let s = need_split(split)?;
                verified_split(&alg, &s)?;
                Some(s)
            } else {
                None
            };
            let op = OperatorId::parse(operator)
                .ok_or_else(|| Failure::Parse(format!("unknown operator {operator:?}")))?;
            let key = [
                "cohomology",
                &alg.to_canonical_json(),
                &format!(
                    "{split:?}|{scheme:?}|{operator}|{ghost}|{curv:?}|{:?}",
                    cli.format
                ),
            ];
            let format = cli.format;
            let cap = cli.max_slice_monomials;
            with_cache(
                cli,
                &key.iter().map(|s| s.as_ref()).collect::<Vec<_>>(),
                move || {
                    let table = GeneratorTable::new(alg, scheme, split)
                        .map_err(|e| Failure::Parse(e.to_string()))?;
                    let d = build(&op, &table).map_err(|e| Failure::Parse(e.to_string()))?;
                    let slice = |g: u32| -> SliceConstraints {
                        let mut c = SliceConstraints::ghost(g);
                        if let Some(m) = curv {
                            c.curvature_count = Some(*m);
                        }
                        c
                    };
                    let prev = if *ghost > 0 {
                        Some(slice(ghost - 1))
                    } else {
                        None
                    };
                    guard_slices(
                        &table,
                        [slice(*ghost), slice(ghost + 1)]
                            .into_iter()
                            .chain(prev.clone()),
                        cap,
                    )?;
                    let h = cohomology(&d, prev.as_ref(), &slice(*ghost), &slice(ghost + 1))
                        .map_err(|e| Failure::Parse(e.to_string()))?;
                    Ok(match format {
                        Format::Json => format!("{}\n", h.to_json()),
                        Format::Text => {
                            let mut out = format!("dim = {}\n", h.dimension);
                            for r in &h.representatives {
                                let _ = writeln!(out, "  {r}");
                            }
                            out
                        }
                    })
                },
            )
        }
        Command::HsTable {
            alg: args,
            module,
            max_curv_degree,
            representatives,
        } => {
            let (alg, split) = resolve_algebra(args)?;
            let split = need_split(split)?;
            verified_split(&alg, &split)?;
            let module_v = ModuleV::parse(module)
                .ok_or_else(|| Failure::Parse(format!("unknown module {module:?}")))?;
            let key_owned = [
                "hs-table".to_string(),
                alg.to_canonical_json(),
                format!(
                    "{split:?}|{module}|{max_curv_degree}|{representatives}|{:?}",
                    cli.format
                ),
            ];
            let format = cli.format;
            let cap = cli.max_slice_monomials;
            let reps = *representatives;
            let max_curv = *max_curv_degree;
            with_cache(
                cli,
                &key_owned.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                move || {
                    let table = GeneratorTable::new(
                        alg.clone(),
                        VariableScheme::SplitFc,
                        Some(split.clone()),
                    )
                    .map_err(|e| Failure::Parse(e.to_string()))?;
                    let max_m = if module_v == ModuleV::Trivial {
                        0
                    } else {
                        max_curv
                    };
                    let slices = (0..=alg.dim() as u32)
                        .flat_map(|g| (0..=max_m).map(move |m| SliceConstraints::ghost_curv(g, m)));
                    guard_slices(&table, slices, cap)?;
                    let decomp =
                        decomposition(&alg, &split, module_v, max_curv).map_err(internal)?;
                    let report =
                        crosscheck(&alg, &split, module_v, max_curv, &decomp).map_err(internal)?;
                    let per_ghost: Vec<usize> = (0..=alg.dim() as u32)
                        .map(|g| report.dims_per_ghost().get(&g).copied().unwrap_or(0))
                        .collect();
                    Ok(match format {
                        Format::Json => {
                            let mut value = serde_json::json!({
                                "algebra": alg.name,
                                "module": module,
                                "max_curv_degree": max_curv,
                                "match": report.is_match(),
                                "dims_per_ghost": per_ghost,
                                "matrix": report.rows,
                            });
                            if reps {
                                let mut rep_map = serde_json::Map::new();
                                for (&(g, m), classes) in &decomp.assembled {
                                    let strings: Vec<String> =
                                        classes.iter().map(|c| c.product.to_string()).collect();
                                    rep_map
                                        .insert(format!("ghost {g}, degree {m}"), strings.into());
                                }
                                value["representatives"] = rep_map.into();
                            }
                            format!("{value}\n")
                        }
                        Format::Text => {
                            let mut out = format!(
                            "H(gamma_s) dimensions for {} (module {module}, degree <= {max_curv})\n",
                            alg.name
                        );
                            let _ = writeln!(
                                out,
                                "crosscheck direct == assembled: {}",
                                report.is_match()
                            );
                            let _ = write!(out, "ghost\\deg |");
                            for m in 0..=max_m {
                                let _ = write!(out, " {m:>4}");
                            }
                            let _ = writeln!(out);
                            for g in 0..=alg.dim() as u32 {
                                let _ = write!(out, "{g:>9} |");
                                for m in 0..=max_m {
                                    let dim = report
                                        .rows
                                        .iter()
                                        .find(|r| r.ghost == g && r.curv == m)
                                        .map(|r| r.direct)
                                        .unwrap_or(0);
                                    let _ = write!(out, " {dim:>4}");
                                }
                                let _ = writeln!(out);
                            }
                            // the invariant relative factor, rows indexed by
                            // the ideal ghost count
                            let _ = writeln!(out, "relative H(gamma_s1, [V (x) L(C)]^K):");
                            let _ = write!(out, "gh_C\\deg  |");
                            for m in 0..=max_m {
                                let _ = write!(out, " {m:>4}");
                            }
                            let _ = writeln!(out);
                            for k in 0..=decomp.relative.max_c {
                                let _ = write!(out, "{k:>9} |");
                                for m in 0..=max_m {
                                    let dim =
                                        decomp.relative.cohomology(k, m).map_or(0, |c| c.dimension);
                                    let _ = write!(out, " {dim:>4}");
                                }
                                let _ = writeln!(out);
                            }
                            if reps {
                                for (&(g, m), classes) in &decomp.assembled {
                                    for c in classes {
                                        let _ =
                                            writeln!(out, "ghost {g}, degree {m}: {}", c.product);
                                    }
                                }
                            }
                            out
                        }
                    })
                },
            )
        }
        Command::Descent(DescentCommand::Table {
            alg: args,
            max_curv_degree,
            max_ghost,
        }) => {
            let (alg, split) = resolve_algebra(args)?;
            let split = need_split(split)?;
            verified_split(&alg, &split)?;
            let max_ghost = max_ghost.unwrap_or(2 * alg.dim() as u32);
            let key_owned = [
                "descent-table".to_string(),
                alg.to_canonical_json(),
                format!("{split:?}|{max_curv_degree}|{max_ghost}|{:?}", cli.format),
            ];
            let format = cli.format;
            let cap = cli.max_slice_monomials;
            let max_curv = *max_curv_degree;
            with_cache(
                cli,
                &key_owned.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                move || {
                    let ctx = DescentContext::new(&alg, &split)
                        .map_err(|e| Failure::Parse(e.to_string()))?;
                    let dim = alg.dim() as u32;
                    let slices = (0..=dim.min(max_ghost)).flat_map(|g| {
                        (0..=max_curv).map(move |m| SliceConstraints::ghost_curv(g, m))
                    });
                    guard_slices(&ctx.fc, slices, cap)?;
                    let decomp = decomposition(&alg, &split, ModuleV::Universal, max_curv)
                        .map_err(internal)?;
                    let classification =
                        classify(&ctx, &decomp, max_curv, max_ghost).map_err(descent_failure)?;
                    let table =
                        build_table(&ctx, &classification, max_ghost).map_err(descent_failure)?;
                    Ok(match format {
                        Format::Json => format!("{}\n", table.to_json()),
                        Format::Text => table.to_text(),
                    })
                },
            )
        }
        Command::Transgress { alg: args, bottom } => {
            let (alg, split) = resolve_algebra(args)?;
            let split = need_split(split)?;
            verified_split(&alg, &split)?;
            let ctx =
                DescentContext::new(&alg, &split).map_err(|e| Failure::Parse(e.to_string()))?;
            let bottom = match bottom {
                Some(text) => {
                    Element::parse(&ctx.full, text).map_err(|e| Failure::Parse(e.to_string()))?
                }
                None => {
                    let sub = alg
                        .subalgebra(&split.subalg_indices, "K")
                        .map_err(|e| Failure::Validation(e.to_string()))?;
                    let prim = brst::hs::primitives(&sub, sub.dim() as u32)
                        .map_err(|e| Failure::Validation(e.to_string()))?;
                    match prim.primitives.len() {
                        1 => prim.primitives[0].1.remap(&ctx.full).map_err(internal)?,
                        n => {
                            return Err(Failure::Parse(format!(
                                "found {n} primitives; pass --bottom explicitly"
                            )))
                        }
                    }
                }
            };
            let chain =
                transgress(&ctx, &bottom).map_err(|e| Failure::Validation(e.to_string()))?;
            Ok(match cli.format {
                Format::Json => {
                    let rungs: Vec<String> = chain.rungs.iter().map(|r| r.to_string()).collect();
                    format!(
                        "{}\n",
                        serde_json::json!({
                            "bottom": chain.bottom.to_string(),
                            "rungs": rungs,
                            "obstruction": chain.obstruction.as_ref().map(|o| o.to_string()),
                        })
                    )
                }
                Format::Text => {
                    let mut out = format!("bottom: {}\n", chain.bottom);
                    for (i, r) in chain.rungs.iter().enumerate() {
                        let _ = writeln!(out, "rung {}: {}", i + 1, r);
                    }
                    match &chain.obstruction {
                        Some(o) => {
                            let _ = writeln!(out, "obstruction: {o}");
                        }
                        None => {
                            let _ = writeln!(out, "obstruction: none");
                        }
                    }
                    out
                }
            })
        }
        Command::DeformCheck { lambda, mu } => {
            let lambda = parse_q(lambda).map_err(Failure::Parse)?;
            let mu = parse_q(mu).map_err(Failure::Parse)?;
            let (alg, omega) = liealg::deform_iso21(&lambda, &mu);
            let report = alg.validate();
            let jacobi_valid = report.is_valid();
            let killing_rank = alg.killing_form().rank();
            let omega_invariant = matches!(check_invariant_metric(&alg, &omega), Ok(Ok(())));
            let omega_nondegenerate = omega.is_nondegenerate();
            Ok(match cli.format {
                Format::Json => {
                    let omega_matrix: Vec<Vec<String>> =
                        omega.matrix.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
                    format!(
                        "{}\n",
                        serde_json::json!({
                            "lambda": fmt_q(&lambda),
                            "mu": fmt_q(&mu),
                            "jacobi_valid": jacobi_valid,
                            "killing_rank": killing_rank,
                            "omega_invariant": omega_invariant,
                            "omega_nondegenerate": omega_nondegenerate,
                            "omega": omega_matrix,
                        })
                    )
                }
                Format::Text => format!(
                    "deformed iso21 at lambda={}, mu={}\n  jacobi_valid: {jacobi_valid}\n  killing_rank: {killing_rank}\n  omega_invariant: {omega_invariant}\n  omega_nondegenerate: {omega_nondegenerate}\n",
                    fmt_q(&lambda),
                    fmt_q(&mu),
                ),
            })
        }
        Command::ShowOperator {
            alg: args,
            scheme,
            name,
        } => {
            let (alg, split) = resolve_algebra(args)?;
            let scheme = VariableScheme::parse(scheme)
                .ok_or_else(|| Failure::Parse(format!("unknown scheme {scheme:?}")))?;
            let split = if scheme.is_split() {
                Some(need_split(split)?)
            } else {
                None
            };
            let op = OperatorId::parse(name)
                .ok_or_else(|| Failure::Parse(format!("unknown operator {name:?}")))?;
            let table = GeneratorTable::new(alg, scheme, split)
                .map_err(|e| Failure::Parse(e.to_string()))?;
            let d = build(&op, &table).map_err(|e| Failure::Parse(e.to_string()))?;
            Ok(format!("{d}"))
        }
    }
}
