//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 mathematical failure or mismatch, 2 usage
//! error, 3 resource cap exceeded. Reports are emitted as JSON (the
//! contract) or as a human-readable text rendering of the same data.

use clap::{Args, Parser, Subcommand, ValueEnum};
use permrep::algebra::{check_filling_span, Algebra, SurgeryPlan};
use permrep::descriptor;
use permrep::error::Error;
use permrep::group::Subgroup;
use permrep::random::IdempotentSampler;
use permrep::regulator::{self, BigGroupConfig};
use permrep::relations::{self, WitnessOutcome};
use permrep::repmod::{canonical_pairing, embed_in_group_algebra, Character};
use permrep::scalar::Rat;
use permrep::suite::{self, SuiteConfig};
use permrep::surfaces::{self, RamificationData, Recovery};
use serde::Serialize;
use serde_json::{json, Value};

mod report;

use report::Report;

#[derive(Parser)]
#[command(
    name = "permrep",
    version,
    about = "Exact computations with permutation groups, group-algebra idempotents, \
             permutation-module relations and regulator constants"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Seed for every randomized search and pairing.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Output format. JSON output is byte-stable for a fixed configuration.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest group order that will be materialized.
    #[arg(long, global = true, default_value_t = permrep::group::DEFAULT_MAX_GROUP_ORDER)]
    max_group_order: u64,

    /// Largest group order for direct regulator evaluation.
    #[arg(long, global = true, default_value_t = regulator::DEFAULT_DIRECT_EVAL_CAP)]
    direct_eval_cap: u64,

    /// Samples per prime in the local witness search.
    #[arg(long, global = true, default_value_t = relations::DEFAULT_WITNESS_BUDGET)]
    witness_budget: u64,

    /// Trial-division bound for squarefree parts.
    #[arg(long, global = true, default_value_t = regulator::DEFAULT_FACTOR_BOUND)]
    factor_bound: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check the star decomposition Q\[G\] = Q\[G\]e + Q\[G\](1 - e*).
    IdempotentVerify {
        /// Group descriptor, e.g. `gl2(3)` or `aff8 * gl2(3)`.
        #[arg(long, required_unless_present = "algebra")]
        group: Option<String>,
        /// Idempotent source: `averaging:<sub>`, `conjugated:<sub>:<seed>`,
        /// `ideal:I3`, `ideal:I2`.
        #[arg(long, required_unless_present = "algebra")]
        source: Option<String>,
        /// Counterexample mode: run on a named structure-constant algebra
        /// (`split-quaternion`) at e = E11 instead of a group algebra.
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Regulator constants: the composite prime pipeline or an explicit
    /// relation/module pair.
    Regulator {
        /// Primes from {2,3,5,7}, comma separated, e.g. `2,3`.
        #[arg(long, conflicts_with_all = ["relation", "module"])]
        primes: Option<String>,
        /// Relation descriptor, e.g. `up - up' @ gl2(3)`.
        #[arg(long, requires = "module")]
        relation: Option<String>,
        /// Module descriptor, e.g. `I3` or `I3 + trivial`.
        #[arg(long)]
        module: Option<String>,
        /// Primes q for the local witness search, comma separated.
        #[arg(long)]
        q_list: Option<String>,
    },
    /// Verify a relation over Q and search local witnesses.
    Relation {
        /// Relation descriptor, e.g. `up - up' @ gl2(3)`.
        #[arg(long)]
        rel: String,
        /// Primes q, comma separated.
        #[arg(long)]
        q_list: Option<String>,
    },
    /// Extract the idempotent of a module, its winding numbers, and the
    /// homology ledger.
    SurgeryPlan {
        /// Group descriptor.
        #[arg(long)]
        group: String,
        /// Module descriptor: `I3`, `I2`, `trivial`, or a sum.
        #[arg(long)]
        module: String,
    },
    /// Surface character computations.
    Surface {
        #[command(subcommand)]
        mode: SurfaceMode,
    },
    /// Run the full verification suite and print one line per claim.
    Reproduce {
        /// Primes q for extra local checks of the {2,3} product relation.
        #[arg(long)]
        q_list: Option<String>,
    },
}

#[derive(Subcommand)]
enum SurfaceMode {
    /// Forward: the homology character of a branched cover.
    Char {
        #[arg(long)]
        group: String,
        /// Genus of the quotient surface.
        #[arg(long)]
        genus: usize,
        /// Stabilizer subgroup descriptor (repeatable), e.g.
        /// `gens:\[(1 2)\]`.
        #[arg(long = "stabilizer")]
        stabilizers: Vec<String>,
    },
    /// Inverse: recover genus and stabilizers from a character.
    Recover {
        #[arg(long)]
        group: String,
        /// JSON array of rational strings ordered by conjugacy class,
        /// e.g. `\["4","-4"\]`.
        #[arg(long)]
        chi: String,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => 2,
        Error::OrderCapExceeded { .. } | Error::FactorBoundExceeded { .. } => 3,
        _ => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    let code = run(&cli);
    std::process::exit(code);
}

fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok((report, ok)) => {
            report.emit(cli.config.format == Format::Json);
            i32::from(!ok)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[derive(Serialize)]
struct WitnessReport {
    q: u64,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    det_mod_q: Option<u64>,
    attempts: u64,
    /// The certifying integral equivariant map, row-major.
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<i64>>>,
}

fn run_witnesses(
    rel: &relations::Relation,
    q_list: &[u64],
    budget: u64,
    seed: u64,
) -> permrep::Result<Vec<WitnessReport>> {
    let mut out = Vec::new();
    for &q in q_list {
        let entry = match relations::zq_witness(rel, q, budget, seed)? {
            WitnessOutcome::Found(w) => WitnessReport {
                q,
                status: "witness found".into(),
                det_mod_q: Some(w.det_residue),
                attempts: w.attempts_used,
                matrix: Some(
                    (0..w.matrix.rows())
                        .map(|i| w.matrix.row(i).to_vec())
                        .collect(),
                ),
            },
            WitnessOutcome::Inconclusive { attempts } => WitnessReport {
                q,
                status: "inconclusive (not a refutation)".into(),
                det_mod_q: None,
                attempts,
                matrix: None,
            },
        };
        out.push(entry);
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> permrep::Result<(Report, bool)> {
    let cfg = &cli.config;
    match &cli.command {
        Command::IdempotentVerify {
            group,
            source,
            algebra,
        } => cmd_idempotent_verify(cfg, group.as_deref(), source.as_deref(), algebra.as_deref()),
        Command::Regulator {
            primes,
            relation,
            module,
            q_list,
        } => cmd_regulator(
            cfg,
            primes.as_deref(),
            relation.as_deref(),
            module.as_deref(),
            q_list.as_deref(),
        ),
        Command::Relation { rel, q_list } => cmd_relation(cfg, rel, q_list.as_deref()),
        Command::SurgeryPlan { group, module } => cmd_surgery_plan(cfg, group, module),
        Command::Surface { mode } => cmd_surface(cfg, mode),
        Command::Reproduce { q_list } => cmd_reproduce(cfg, q_list.as_deref()),
    }
}

fn report_for(cfg: &ConfigArgs, command: &str, result: Value) -> Report {
    Report::new(
        command,
        json!({
            "seed": cfg.seed,
            "max_group_order": cfg.max_group_order,
            "direct_eval_cap": cfg.direct_eval_cap,
            "witness_budget": cfg.witness_budget,
            "factor_bound": cfg.factor_bound,
        }),
        result,
    )
}

fn cmd_idempotent_verify(
    cfg: &ConfigArgs,
    group: Option<&str>,
    source: Option<&str>,
    algebra: Option<&str>,
) -> permrep::Result<(Report, bool)> {
    if let Some(name) = algebra {
        if name != "split-quaternion" {
            return Err(Error::Parse {
                input: name.into(),
                reason: "supported counterexample algebra: split-quaternion".into(),
            });
        }
        let a = Algebra::split_quaternion();
        let decomposition = a.check_star_decomposition(&a.basis(0))?;
        let ok = !decomposition.direct_sum && decomposition.dim_sum == 2;
        let result = json!({
            "algebra": a.name(),
            "idempotent": "E11",
            "decomposition": decomposition,
            "counterexample_confirmed": ok,
        });
        return Ok((report_for(cfg, "idempotent-verify", result), ok));
    }

    let group_text = group.expect("required by clap");
    let source_text = source.expect("required by clap");
    let g = descriptor::resolve_group(group_text, cfg.max_group_order)?;
    let a = Algebra::group_algebra(&g);
    let (e, source_desc) = resolve_idempotent_source(&a, source_text)?;
    let decomposition = a.check_star_decomposition(&e)?;
    let ok = decomposition.direct_sum;
    let result = json!({
        "group": g.name(),
        "group_order": g.order(),
        "source": source_desc,
        "idempotent": e.to_sparse_json(),
        "decomposition": decomposition,
    });
    Ok((report_for(cfg, "idempotent-verify", result), ok))
}

fn resolve_idempotent_source(
    algebra: &Algebra,
    text: &str,
) -> permrep::Result<(permrep::algebra::AlgebraElement, String)> {
    let group = algebra.group().expect("group algebra").clone();
    let parts: Vec<&str> = text.splitn(3, ':').collect();
    match parts.as_slice() {
        ["averaging", sub] => {
            let u = descriptor::resolve_subgroup(&group, sub)?;
            Ok((
                algebra.averaging_idempotent(&u)?,
                format!("averaging over {}", u.name()),
            ))
        }
        ["conjugated", sub, seed_text] => {
            let u = descriptor::resolve_subgroup(&group, sub)?;
            let conjugation_seed: u64 = seed_text.parse().map_err(|_| Error::Parse {
                input: text.into(),
                reason: "expected conjugated:<sub>:<seed>".into(),
            })?;
            let mut sampler = IdempotentSampler::new(&group, conjugation_seed);
            // draw until something other than the plain average appears
            let base = algebra.averaging_idempotent(&u)?;
            for _ in 0..64 {
                let e = sampler.next_idempotent();
                if e != base && !e.is_zero() {
                    return Ok((e, format!("seeded conjugate (seed {conjugation_seed})")));
                }
            }
            Ok((base, format!("averaging over {} (fallback)", u.name())))
        }
        ["ideal", name] => {
            let spec = descriptor::parse_module(name)?;
            let module = descriptor::resolve_module(&group, &spec)?;
            let ideal = embed_in_group_algebra(&module)?;
            Ok((
                algebra.idempotent_generating(&ideal)?,
                format!("idempotent generating the ideal of {}", module.label()),
            ))
        }
        _ => Err(Error::Parse {
            input: text.into(),
            reason: "expected averaging:<sub>, conjugated:<sub>:<seed>, or ideal:<module>".into(),
        }),
    }
}

fn cmd_regulator(
    cfg: &ConfigArgs,
    primes: Option<&str>,
    relation: Option<&str>,
    module: Option<&str>,
    q_list: Option<&str>,
) -> permrep::Result<(Report, bool)> {
    let q_list = q_list
        .map(descriptor::parse_primes)
        .transpose()?
        .unwrap_or_default();
    if let Some(primes_text) = primes {
        let primes = descriptor::parse_primes(primes_text)?;
        let config = BigGroupConfig {
            max_group_order: cfg.max_group_order,
            direct_eval_cap: cfg.direct_eval_cap,
            witness_budget: cfg.witness_budget,
            factor_bound: cfg.factor_bound,
            seed: cfg.seed,
            q_list,
        };
        let report = regulator::biggroup(&primes, &config)?;
        let ok = report.agree;
        let result = serde_json::to_value(&report).expect("serializable report");
        return Ok((report_for(cfg, "regulator", result), ok));
    }

    let (Some(rel_text), Some(module_text)) = (relation, module) else {
        return Err(Error::Parse {
            input: String::new(),
            reason: "pass either --primes or both --relation and --module".into(),
        });
    };
    let rel = descriptor::resolve_relation(rel_text, cfg.max_group_order)?;
    let spec = descriptor::parse_module(module_text)?;
    let module = descriptor::resolve_module(rel.group(), &spec)?;
    let pairing = canonical_pairing(&module, cfg.seed)?;
    let constant = regulator::regulator_constant(&rel, &module, &pairing, cfg.factor_bound)?;
    let witnesses = run_witnesses(&rel, &q_list, cfg.witness_budget, cfg.seed)?;
    let result = json!({
        "group": rel.group().name(),
        "relation": rel.describe(),
        "module": module.label(),
        "regulator_constant": constant,
        "pairing_seed": cfg.seed,
        "local_witnesses": witnesses,
    });
    Ok((report_for(cfg, "regulator", result), true))
}

fn cmd_relation(
    cfg: &ConfigArgs,
    rel_text: &str,
    q_list: Option<&str>,
) -> permrep::Result<(Report, bool)> {
    let rel = descriptor::resolve_relation(rel_text, cfg.max_group_order)?;
    let is_q = rel.is_q_relation();
    let q_list = q_list
        .map(descriptor::parse_primes)
        .transpose()?
        .unwrap_or_default();
    let witnesses = if is_q {
        run_witnesses(&rel, &q_list, cfg.witness_budget, cfg.seed)?
    } else {
        Vec::new()
    };
    let result = json!({
        "group": rel.group().name(),
        "relation": rel.describe(),
        "q_relation": is_q,
        "witness_search": if is_q { "performed" } else { "refused: not a Q-relation" },
        "local_witnesses": witnesses,
    });
    Ok((report_for(cfg, "relation", result), is_q))
}

fn cmd_surgery_plan(
    cfg: &ConfigArgs,
    group_text: &str,
    module_text: &str,
) -> permrep::Result<(Report, bool)> {
    let group = descriptor::resolve_group(group_text, cfg.max_group_order)?;
    let spec = descriptor::parse_module(module_text)?;
    let module = descriptor::resolve_module(&group, &spec)?;
    let algebra = Algebra::group_algebra(&group);
    let ideal = embed_in_group_algebra(&module)?;
    let e = algebra.idempotent_generating(&ideal)?;
    let plan = SurgeryPlan::new(&e)?;
    let span_full = check_filling_span(&e)?;
    let ok = span_full && plan.reconstructs_complement();
    let result = json!({
        "group": group.name(),
        "group_order": group.order(),
        "module": module.label(),
        "idempotent": e.to_sparse_json(),
        "denominator": plan.denominator.to_string(),
        "winding_numbers": plan
            .winding_numbers
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>(),
        "filling_span_full": span_full,
        "ledger": plan.ledger,
        "ledger_disclaimer": "algebraic bookkeeping only - no geometry computed",
        "note": plan.note,
    });
    Ok((report_for(cfg, "surgery-plan", result), ok))
}

fn cmd_surface(cfg: &ConfigArgs, mode: &SurfaceMode) -> permrep::Result<(Report, bool)> {
    match mode {
        SurfaceMode::Char {
            group,
            genus,
            stabilizers,
        } => {
            let g = descriptor::resolve_group(group, cfg.max_group_order)?;
            let subs = stabilizers
                .iter()
                .map(|s| descriptor::resolve_subgroup(&g, s))
                .collect::<permrep::Result<Vec<_>>>()?;
            let data = RamificationData::new(*genus, subs)?;
            let chi = surfaces::surface_character(&g, &data)?;
            let result = json!({
                "group": g.name(),
                "genus": genus,
                "stabilizer_orders": data
                    .stabilizers
                    .iter()
                    .map(Subgroup::order)
                    .collect::<Vec<_>>(),
                "character": chi,
            });
            Ok((report_for(cfg, "surface char", result), true))
        }
        SurfaceMode::Recover { group, chi } => {
            let g = descriptor::resolve_group(group, cfg.max_group_order)?;
            let values: Vec<String> = serde_json::from_str(chi).map_err(|e| Error::Parse {
                input: chi.clone(),
                reason: format!("expected a JSON array of rational strings: {e}"),
            })?;
            let parsed: Vec<Rat> = values
                .iter()
                .map(|v| {
                    v.parse::<Rat>().map_err(|_| Error::Parse {
                        input: v.clone(),
                        reason: "expected num/den".into(),
                    })
                })
                .collect::<permrep::Result<_>>()?;
            let character = Character::new(g.clone(), parsed)?;
            let (result, ok) = match surfaces::recover_ramification(&g, &character)? {
                Recovery::Realizable(data) => (
                    json!({
                        "group": g.name(),
                        "realizable": true,
                        "genus": data.quotient_genus,
                        "stabilizers": data
                            .stabilizers
                            .iter()
                            .map(|s| {
                                json!({
                                    "order": s.order(),
                                    "generator": s
                                        .members()
                                        .iter()
                                        .find(|&&m| g.element_order(m) == s.order())
                                        .map(|&m| g.element(m).to_string()),
                                })
                            })
                            .collect::<Vec<_>>(),
                    }),
                    true,
                ),
                Recovery::NotRealizable { reason } => (
                    json!({
                        "group": g.name(),
                        "realizable": false,
                        "reason": reason,
                    }),
                    false,
                ),
            };
            Ok((report_for(cfg, "surface recover", result), ok))
        }
    }
}

fn cmd_reproduce(cfg: &ConfigArgs, q_list: Option<&str>) -> permrep::Result<(Report, bool)> {
    let suite_cfg = SuiteConfig {
        seed: cfg.seed,
        max_group_order: cfg.max_group_order,
        direct_eval_cap: cfg.direct_eval_cap,
        witness_budget: cfg.witness_budget,
        factor_bound: cfg.factor_bound,
    };
    let mut outcomes = suite::run_all(&suite_cfg);

    if let Some(qs) = q_list {
        let q_list = descriptor::parse_primes(qs)?;
        let config = BigGroupConfig {
            max_group_order: cfg.max_group_order,
            direct_eval_cap: cfg.direct_eval_cap,
            witness_budget: cfg.witness_budget,
            factor_bound: cfg.factor_bound,
            seed: cfg.seed,
            q_list,
        };
        let report = regulator::biggroup(&[2, 3], &config)?;
        let all_found = report
            .local_checks
            .iter()
            .all(|c| c.status.starts_with("witness"));
        outcomes.push(suite::ClaimOutcome {
            id: "extra-local".into(),
            title: "local witnesses for the {2,3} product relation".into(),
            expected: "witness found for each requested q".into(),
            computed: serde_json::to_string(&report.local_checks).expect("serializable"),
            pass: all_found,
        });
    }

    let all_pass = outcomes.iter().all(|c| c.pass);

    // one table row per claim in the text rendering
    let mut table = String::new();
    for c in &outcomes {
        table.push_str(&format!(
            "{:<4} {:<11} | {}\n     expected: {}\n     computed: {}\n",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.title,
            c.expected,
            c.computed
        ));
    }
    table.push_str(&format!(
        "verdict: {}\nscope: geometric constructions are not computed; the suite verifies \
         the algebraic identities exactly\n",
        if all_pass {
            "all claims pass"
        } else {
            "FAILURES present"
        }
    ));

    let result = json!({
        "claims": outcomes,
        "all_pass": all_pass,
        "scope": "geometric constructions are not computed; the suite verifies the \
                  algebraic identities exactly",
    });
    Ok((
        report_for(cfg, "reproduce", result).with_text_override(table),
        all_pass,
    ))
}
