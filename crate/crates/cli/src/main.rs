//! Command-line surface: list bundled blocks, run verification suites, and
//! emit computation artifacts.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/input error,
//! 3 truncation too small.

use blockcalc::blockdata::{builtin_block, builtin_names, from_path, partner_block, Block};
use blockcalc::blockvariety::{
    hecke_bs_multiplicities, multiplicity_dot, BlockVariety, CanonicalSet,
};
use blockcalc::gradedalg::{block_variety_algebra, component_maps, hilbert_identity};
use blockcalc::hecke::{
    check_braid, check_quadratic, klv, klv_csv, klv_pretty, translation_wall_identity,
    verify_duality, verify_klv, KlvTable,
};
use blockcalc::report::VerifyReport;
use blockcalc::Error;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "blockcalc", version, about = "Block combinatorics and graded sheaf calculus workbench")]
struct Cli {
    /// Directory with additional block files (also read from
    /// BLOCKCALC_DATA_DIR).
    #[arg(long, global = true, env = "BLOCKCALC_DATA_DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    Hecke,
    Duality,
    Variety,
    CrossOracle,
    All,
}

#[derive(Copy, Clone, ValueEnum)]
enum What {
    Klv,
    Variety,
    Decompose,
    Ext,
}

#[derive(Subcommand)]
enum Command {
    /// List bundled blocks and dual pairs.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites on a block or a dual pair.
    Verify {
        #[arg(long)]
        block: Option<String>,
        /// Verify the named block against its recorded dual partner.
        #[arg(long, conflicts_with = "block")]
        pair: Option<String>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Truncation window for graded checks.
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a computation artifact for a block.
    Compute {
        #[arg(long)]
        block: String,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TruncationTooSmall { .. } | Error::BadDegree(_) => 3,
        Error::UnknownBlock { .. }
        | Error::BlockFile(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidBlock { .. } => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::List { format, out } => cmd_list(format, out.as_deref()),
        Command::Verify {
            block,
            pair,
            suite,
            max_degree,
            format,
            out,
        } => {
            let (name, as_pair) = match (block, pair) {
                (Some(b), None) => (b, false),
                (None, Some(p)) => (p, true),
                _ => {
                    eprintln!("error: exactly one of --block or --pair is required");
                    return 2;
                }
            };
            cmd_verify(
                &cli.data_dir,
                &name,
                as_pair,
                suite,
                max_degree,
                format,
                out.as_deref(),
            )
        }
        Command::Compute {
            block,
            what,
            max_degree,
            format,
            out,
        } => cmd_compute(&cli.data_dir, &block, what, max_degree, format, out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load_block(data_dir: &Option<PathBuf>, name: &str) -> blockcalc::Result<Block> {
    if name.ends_with(".json") || name.contains('/') {
        return from_path(Path::new(name));
    }
    match builtin_block(name) {
        Ok(b) => Ok(b),
        Err(e) => {
            if let Some(dir) = data_dir {
                let candidate = dir.join(format!("{name}.json"));
                if candidate.exists() {
                    return from_path(&candidate);
                }
            }
            Err(e)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> blockcalc::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// list
// ---------------------------------------------------------------------------

fn cmd_list(format: Format, out: Option<&Path>) -> blockcalc::Result<i32> {
    let mut rows = Vec::new();
    for name in builtin_names() {
        let b = builtin_block(name)?;
        rows.push(serde_json::json!({
            "name": name,
            "params": b.num_params(),
            "rank": b.rank(),
            "equivariant": b.flags.equivariant,
            "quasisplit": b.flags.quasisplit,
            "adjoint": b.flags.adjoint,
            "dual_partner": b.duality_partner,
        }));
    }
    // Each dual pair once, keyed by the sorted name pair.
    let mut pairs: Vec<(String, String)> = Vec::new();
    for name in builtin_names() {
        let b = builtin_block(name)?;
        let (dual, _) = partner_block(&b)?;
        let mut key = vec![b.name.clone(), dual.name.clone()];
        key.sort();
        let key = (key[0].clone(), key[1].clone());
        if !pairs.contains(&key) {
            pairs.push(key);
        }
    }
    pairs.sort();
    let text = match format {
        Format::Json => {
            let doc = serde_json::json!({ "blocks": rows, "dual_pairs": pairs });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        _ => {
            let mut s = String::from("bundled blocks:\n");
            for r in &rows {
                s.push_str(&format!(
                    "  {} (params {}, rank {}{})\n",
                    r["name"].as_str().unwrap(),
                    r["params"],
                    r["rank"],
                    if r["equivariant"].as_bool().unwrap() {
                        ", equivariant"
                    } else {
                        ""
                    }
                ));
            }
            s.push_str("dual pairs:\n");
            for (a, b) in &pairs {
                s.push_str(&format!("  {a} <-> {b}\n"));
            }
            s
        }
    };
    emit(&text, out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn suite_hecke(b: &Block, rep: &mut VerifyReport) {
    rep.record("quadratic relations", check_quadratic(b).map(|_| "exact".into()));
    rep.record("braid relations", check_braid(b).map(|_| "exact".into()));
    rep.record(
        "klv self-duality and degree bounds",
        klv(b).and_then(|t| verify_klv(b, &t)).map(|_| "exact".into()),
    );
    rep.record(
        "translation wall identity",
        translation_wall_identity(b).and_then(|w| {
            if w.projector_identity && w.multiplicity_ok {
                Ok(format!(
                    "D^2 = {}*D; stabilizer order {}",
                    w.weyl_order, w.stabilizer_order
                ))
            } else {
                Err(Error::CountMismatch {
                    what: "translation wall identity".into(),
                    left: usize::from(w.projector_identity),
                    right: usize::from(w.multiplicity_ok),
                })
            }
        }),
    );
}

fn suite_duality(b: &Block, rep: &mut VerifyReport) {
    rep.record(
        "signed inverse identity",
        partner_block(b)
            .and_then(|(dual, bij)| verify_duality(b, &dual, &bij))
            .map(|_| "exact".into()),
    );
}

fn suite_variety(b: &Block, window: usize, rep: &mut VerifyReport) {
    rep.record(
        "coordinate ring hilbert identity",
        block_variety_algebra(b).and_then(|pres| {
            let (computed, expected) = hilbert_identity(&pres, window.max(20));
            if computed.agrees_with(&expected) {
                Ok(format!("agrees to degree {}", window.max(20)))
            } else {
                Err(Error::CountMismatch {
                    what: format!("hilbert identity ({computed} vs {expected})"),
                    left: 0,
                    right: 1,
                })
            }
        }),
    );
    rep.record(
        "component maps",
        component_maps(b, window).and_then(|r| {
            if r.all_surjective && r.jointly_injective {
                Ok(format!(
                    "{} components, {} maps, surjective and jointly injective to degree {}",
                    r.num_components, r.num_maps, r.injectivity_window
                ))
            } else {
                Err(Error::CountMismatch {
                    what: "component map exactness".into(),
                    left: usize::from(r.all_surjective),
                    right: usize::from(r.jointly_injective),
                })
            }
        }),
    );
    rep.record(
        "wall law",
        BlockVariety::new(b).and_then(|bv| {
            for &v in bv.components.clone().iter() {
                let m = bv.component_sheaf(v)?;
                for alpha in 0..b.rank() {
                    let cm = bv.wall_apply(alpha, &m)?;
                    let expected = m.hilbert(window).mul_one_plus_tk(2);
                    if !cm.hilbert(window).agrees_with(&expected) {
                        return Err(Error::CountMismatch {
                            what: format!("wall law at component {v}, root {alpha}"),
                            left: 0,
                            right: 1,
                        });
                    }
                }
            }
            Ok(format!("(1+t^2) law on all components to degree {window}"))
        }),
    );
}

fn canonical_with_oracle(b: &Block) -> blockcalc::Result<(BlockVariety, CanonicalSet)> {
    let bv = BlockVariety::new(b)?;
    let canon = bv.canonical_objects()?;
    Ok((bv, canon))
}

fn suite_cross_oracle(b: &Block, window: usize, rep: &mut VerifyReport) {
    let prepared = canonical_with_oracle(b);
    match prepared {
        Err(e) => {
            rep.record("canonical objects", Err(e));
        }
        Ok((bv, canon)) => {
            rep.record(
                "canonical objects",
                Ok(format!("{} objects, all parameters covered", canon.objects.len())),
            );
            rep.record(
                "bott-samelson vs hecke products",
                partner_block(b).and_then(|(dual, bij)| {
                    let table = klv(&dual)?;
                    for rec in &canon.records {
                        let hecke = hecke_bs_multiplicities(b, &dual, &table, &bij, rec)?;
                        if rec.mults != hecke {
                            return Err(Error::CountMismatch {
                                what: format!(
                                    "multiplicities for word {:?} (variety {:?}, hecke {:?})",
                                    rec.word, rec.mults, hecke
                                ),
                                left: 0,
                                right: 1,
                            });
                        }
                    }
                    Ok(format!("{} scheduled words agree", canon.records.len()))
                }),
            );
            // The pairing is degree-zero data; certify the graded dims and
            // composition closure on a small window to keep the suite fast.
            let ext_window = window.min(4);
            rep.record(
                "ext pairing",
                bv.ext_algebra(&canon, ext_window).and_then(|ext| {
                    let n = ext.labels.len();
                    let identity = (0..n).all(|i| {
                        (0..n).all(|j| ext.pairing[i][j] == usize::from(i == j))
                    });
                    if identity && ext.degree_zero_semisimple && ext.associative {
                        Ok(format!(
                            "identity pairing, semisimple degree zero (window {ext_window})"
                        ))
                    } else {
                        Err(Error::CountMismatch {
                            what: "ext pairing identity".into(),
                            left: usize::from(identity),
                            right: 1,
                        })
                    }
                }),
            );
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    data_dir: &Option<PathBuf>,
    name: &str,
    as_pair: bool,
    suite: Suite,
    max_degree: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> blockcalc::Result<i32> {
    let b = load_block(data_dir, name)?;
    let window = max_degree.unwrap_or(2 * b.max_length() + 4);
    let suite_name = match suite {
        Suite::Hecke => "hecke",
        Suite::Duality => "duality",
        Suite::Variety => "variety",
        Suite::CrossOracle => "cross-oracle",
        Suite::All => "all",
    };
    let mut rep = VerifyReport::new(&b.name, suite_name, window);
    if as_pair {
        // Pair mode verifies the duality suite in both directions.
        suite_duality(&b, &mut rep);
        let (dual, _) = partner_block(&b)?;
        suite_duality(&dual, &mut rep);
    } else {
        match suite {
            Suite::Hecke => suite_hecke(&b, &mut rep),
            Suite::Duality => suite_duality(&b, &mut rep),
            Suite::Variety => suite_variety(&b, window, &mut rep),
            Suite::CrossOracle => suite_cross_oracle(&b, window, &mut rep),
            Suite::All => {
                suite_hecke(&b, &mut rep);
                suite_duality(&b, &mut rep);
                suite_variety(&b, window, &mut rep);
                suite_cross_oracle(&b, window, &mut rep);
            }
        }
    }
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rep)?),
        _ => rep.render_text(),
    };
    emit(&text, out)?;
    Ok(if rep.passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

fn klv_json(b: &Block, t: &KlvTable) -> serde_json::Value {
    let params: Vec<&str> = b.params.iter().map(|p| p.id.as_str()).collect();
    let matrix: Vec<Vec<String>> = t
        .p
        .iter()
        .map(|row| row.iter().map(|q| q.to_string()).collect())
        .collect();
    serde_json::json!({ "block": b.name, "params": params, "matrix": matrix })
}

fn cmd_compute(
    data_dir: &Option<PathBuf>,
    name: &str,
    what: What,
    max_degree: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> blockcalc::Result<i32> {
    let b = load_block(data_dir, name)?;
    let default_window = 2 * b.max_length() + 4;
    let window = max_degree.unwrap_or(default_window);
    let text = match what {
        What::Klv => {
            let t = klv(&b)?;
            match format {
                Format::Csv => klv_csv(&b, &t),
                Format::Text => klv_pretty(&b, &t),
                Format::Dot => multiplicity_dot(&b, &t),
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&klv_json(&b, &t))?),
            }
        }
        What::Variety => {
            let pres = block_variety_algebra(&b)?;
            let maps = component_maps(&b, window)?;
            let hilb = pres.module.hilbert(window);
            match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "block": b.name,
                        "base_variable_degrees": pres.aprime_degrees,
                        "generator_degrees": pres.module.gens,
                        "rank": pres.module.rank(),
                        "hilbert": hilb.to_string(),
                        "components": maps,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&doc)?)
                }
                Format::Csv => {
                    let mut s = String::from("degree,dimension\n");
                    for d in 0..=window {
                        let basis =
                            blockcalc::gradedalg::graded_component_basis(&pres.module, d);
                        s.push_str(&format!("{d},{}\n", basis.len()));
                    }
                    s
                }
                _ => {
                    format!(
                        "block {}\nrank {} over base degrees {:?}\nHilbert series: {}\ncomponents: {} ({} maps), surjective: {}, jointly injective: {}\n",
                        b.name,
                        pres.module.rank(),
                        pres.aprime_degrees,
                        hilb,
                        maps.num_components,
                        maps.num_maps,
                        maps.all_surjective,
                        maps.jointly_injective
                    )
                }
            }
        }
        What::Decompose => {
            let (_, canon) = canonical_with_oracle(&b)?;
            match format {
                Format::Json => {
                    let objects: Vec<serde_json::Value> = canon
                        .objects
                        .iter()
                        .map(|o| {
                            serde_json::json!({
                                "param": o.id,
                                "dual_length": o.dual_length,
                                "rank": o.module.m.rank(),
                                "generator_degrees": o.module.m.gens,
                                "schedule": o.schedule,
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "block": b.name,
                        "objects": objects,
                        "bott_samelson_records": canon.records,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&doc)?)
                }
                _ => {
                    let mut s = format!("canonical objects of {}\n", b.name);
                    for o in &canon.objects {
                        s.push_str(&format!(
                            "  {} (dual length {}): rank {}, generator degrees {:?}\n",
                            o.id,
                            o.dual_length,
                            o.module.m.rank(),
                            o.module.m.gens
                        ));
                    }
                    s
                }
            }
        }
        What::Ext => {
            let needed = 2 * b.max_length() + 2;
            if window < needed {
                return Err(Error::TruncationTooSmall {
                    what: "ext algebra window".into(),
                    given: window,
                    needed,
                });
            }
            let (bv, canon) = canonical_with_oracle(&b)?;
            let ext = bv.ext_algebra(&canon, window)?;
            match format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&ext)?),
                _ => {
                    let mut s = format!(
                        "ext algebra of {} (window {})\nsemisimple degree zero: {}\nassociative on window: {}\n",
                        b.name, ext.window, ext.degree_zero_semisimple, ext.associative
                    );
                    for (i, li) in ext.labels.iter().enumerate() {
                        for (j, lj) in ext.labels.iter().enumerate() {
                            s.push_str(&format!(
                                "  Hom({li}, {lj}) dims by degree: {:?}\n",
                                ext.dims[i][j]
                            ));
                        }
                    }
                    s
                }
            }
        }
    };
    emit(&text, out)?;
    Ok(0)
}
