//! Command-line surface.
//!
//! Every operation of the library is reachable as a subcommand; `--format
//! json` emits the documented schemas, `--expect` turns a command into a
//! check (exit code 3 on verdict mismatch, so scripted reproductions can
//! distinguish "wrong answer" from "could not compute").

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cohomology::{sq_word, CohomologyClass, SteenrodWord};
use crate::derivations::{
    derive_embedding, derive_lemma_3_5, derive_nonimmersion_2, DerivationRecord, Engine,
};
use crate::dyadic::{nu_binom, Natural};
use crate::ext_a1::chart::ko_window;
use crate::fixtures::{verify_all, Fixtures};
use crate::lifting::{bo_lift_decision, LiftQuery};
use crate::mpt::analysis::{
    check_implication, forced_vanishing, kernel_trivial, variation_delta, variation_matrix,
};
use crate::mpt::parse::{parse_label, parse_relations, print_relations};
use crate::mpt::{Label, MptModel};
use crate::render::{chart_svg, chart_text};

/// Exit code for a verdict that differs from `--expect`.
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser)]
#[command(
    name = "obstructa",
    version,
    about = "Obstruction-theory calculator: 2-adic binomial arithmetic, Steenrod squares, ko-orders of stunted projective spectra, bo-lifting verdicts, Postnikov-tower indeterminacy, and end-to-end nonimmersion/embedding reproductions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in relation table: bsp_16n1, bspin_8n5_8n3 or bspin_8n5.
    #[arg(long, conflicts_with = "file")]
    fixture: Option<String>,
    /// Path to a relation file in the documented grammar.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self, fx: &Fixtures) -> Result<MptModel> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(parse_relations(&text)?);
        }
        let name = self.fixture.as_deref().unwrap_or("bsp_16n1");
        let name = if name.ends_with(".rel") {
            name.to_string()
        } else {
            format!("{name}.rel")
        };
        Ok(fx.model(&name)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// 2-adic valuation of a binomial coefficient C(m, k).
    NuBinom {
        m: Natural,
        k: Natural,
        #[arg(long)]
        expect: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate a word of Steenrod squares on a monomial of P^N.
    SqEval {
        /// Comma-separated exponents, leftmost applied last: "2,3" is Sq2 Sq3.
        #[arg(long)]
        word: String,
        /// The exponent j of the monomial x^j.
        #[arg(long)]
        monomial: u64,
        /// The N of P^N.
        #[arg(long)]
        truncation: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Stiefel-Whitney class w_i of multiple·xi over P^N.
    Sw {
        #[arg(long)]
        multiple: u64,
        #[arg(long)]
        i: u64,
        #[arg(long)]
        base_dim: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// nu(|ko_{4i-1}(P_m)|) from a minimal A(1)-resolution.
    KoOrder {
        #[arg(long)]
        i: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        expect: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Adams chart of ko ∧ P_m over a stem window.
    ExtChart {
        #[arg(long)]
        m: u32,
        /// Low stem of the window (default: m).
        #[arg(long)]
        lo: Option<u32>,
        /// High stem of the window (default: m + 10).
        #[arg(long)]
        hi: Option<u32>,
        /// Top displayed filtration.
        #[arg(long, default_value_t = 6)]
        filt_max: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decide whether p·H_k lifts to B^o(m).
    BoLift {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
        /// Expected verdict: "lifts" or "fails".
        #[arg(long)]
        expect: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Postnikov-tower operations on a relation table.
    #[command(subcommand)]
    Mpt(MptCmd),
    /// End-to-end theorem reproductions with provenance.
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
    /// Fixture management.
    #[command(subcommand)]
    Fixtures(FixturesCmd),
}

#[derive(Subcommand)]
enum MptCmd {
    /// Parse and validate a relation file; optionally print it normalized.
    Parse {
        #[command(flatten)]
        model: ModelArgs,
        /// Print the normalized file back out.
        #[arg(long)]
        print: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Delta of every stage-j invariant under one fiber variation.
    Vary {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        stage: u32,
        /// Fiber label, e.g. "k(b+4)@1" or "w(b+2)".
        #[arg(long)]
        fiber: String,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The full variation matrix of a stage.
    Matrix {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        stage: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Row-span implication check over the variation matrix.
    Implies {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        stage: u32,
        #[arg(long)]
        n: u64,
        /// Comma-separated labels that are all flipped.
        #[arg(long)]
        antecedent: String,
        /// Comma-separated labels, at least one of which must then flip.
        #[arg(long)]
        consequent: String,
        #[arg(long)]
        expect: Option<bool>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Linear independence of the variation rows of a stage.
    Kernel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        stage: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        expect: Option<bool>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Forced vanishing of a candidate pullback through a relation.
    Forced {
        #[command(flatten)]
        model: ModelArgs,
        /// The relation label, e.g. "k(b-1)@2".
        #[arg(long)]
        relation: String,
        /// The candidate source label, e.g. "k(b-2)@1".
        #[arg(long)]
        candidate: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        expect: Option<bool>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum ReproduceCmd {
    /// Nonimmersion of P^{16n+10} in R^{32n+11} (alpha(n) = 2).
    #[command(name = "thm1.1-2")]
    Thm112 {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Embedding of P^{8n+4} in R^{16n+1} (alpha(n) > 2).
    #[command(name = "thm1.2")]
    Thm12 {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// The geometric-dimension lemma behind the embedding.
    #[command(name = "lemma3.5")]
    Lemma35 {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum FixturesCmd {
    /// Re-check every fixture against engine recomputation.
    Verify {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn parse_labels(s: &str) -> Result<BTreeSet<Label>> {
    s.split(',')
        .map(|part| parse_label(part.trim()).map_err(|e| anyhow!("{e}")))
        .collect()
}

fn class_json(c: &CohomologyClass) -> serde_json::Value {
    serde_json::json!({
        "truncation": c.truncation(),
        "degrees": c.degrees().iter().collect::<Vec<_>>(),
        "text": c.to_string(),
    })
}

/// Outcome of a command: rendered output plus an optional expectation result.
struct Outcome {
    output: String,
    matched: Option<bool>,
}

impl Outcome {
    fn plain(output: String) -> Self {
        Outcome {
            output,
            matched: None,
        }
    }

    fn checked(output: String, matched: bool) -> Self {
        Outcome {
            output,
            matched: Some(matched),
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.cmd {
        Cmd::NuBinom {
            m,
            k,
            expect,
            format,
        } => {
            let v = nu_binom(&m, &k)?;
            let out = match format {
                Format::Json => {
                    serde_json::json!({"m": m.to_string(), "k": k.to_string(), "nu": v}).to_string()
                }
                _ => v.to_string(),
            };
            Ok(match expect {
                Some(e) => Outcome::checked(out, e == v),
                None => Outcome::plain(out),
            })
        }
        Cmd::SqEval {
            word,
            monomial,
            truncation,
            format,
        } => {
            let factors: Vec<u64> = word
                .split([',', ' '])
                .filter(|p| !p.is_empty())
                .map(|p| p.trim().parse().context("bad word entry"))
                .collect::<Result<_>>()?;
            let w = SteenrodWord(factors);
            let c = CohomologyClass::monomial(truncation, monomial);
            let out_class = sq_word(&w, &c);
            let out = match format {
                Format::Json => class_json(&out_class).to_string(),
                _ => out_class.to_string(),
            };
            Ok(Outcome::plain(out))
        }
        Cmd::Sw {
            multiple,
            i,
            base_dim,
            format,
        } => {
            let c = crate::cohomology::sw_class(
                &crate::cohomology::BundleData { multiple, base_dim },
                i,
            );
            let out = match format {
                Format::Json => class_json(&c).to_string(),
                _ => c.to_string(),
            };
            Ok(Outcome::plain(out))
        }
        Cmd::KoOrder {
            i,
            m,
            expect,
            format,
        } => {
            let engine = Engine::new()?;
            let v = engine.ko.ko_order(i, m)?;
            let out = match format {
                Format::Json => {
                    serde_json::json!({"i": i, "m": m, "stem": 4*i-1, "nu_order": v}).to_string()
                }
                _ => v.to_string(),
            };
            Ok(match expect {
                Some(e) => Outcome::checked(out, e == v),
                None => Outcome::plain(out),
            })
        }
        Cmd::ExtChart {
            m,
            lo,
            hi,
            filt_max,
            format,
        } => {
            let engine = Engine::new()?;
            let lo = lo.unwrap_or(m);
            let hi = hi.unwrap_or(m + 10);
            if hi < lo {
                bail!("empty stem window");
            }
            let (s_max, top) = ko_window(hi, m);
            let chart = engine
                .ko
                .stunted_chart(m, s_max.max(filt_max as usize + 1), top)?;
            let out = match format {
                Format::Json => chart.to_json().to_string(),
                Format::Svg => chart_svg(&chart, lo, hi, filt_max, &format!("ko chart of P_{m}")),
                Format::Text => chart_text(&chart, lo, hi, filt_max),
            };
            Ok(Outcome::plain(out))
        }
        Cmd::BoLift {
            p,
            k,
            m,
            expect,
            format,
        } => {
            let engine = Engine::new()?;
            let v = bo_lift_decision(LiftQuery { p, k, m }, &engine.ko)?;
            let out = match format {
                Format::Json => serde_json::to_string(&v)?,
                _ => {
                    let mut s = if v.lifts {
                        format!("{p}H_{k} lifts to B^o({m})")
                    } else {
                        format!("{p}H_{k} does not lift to B^o({m})")
                    };
                    if !v.dimension_ok {
                        s.push_str(&format!("; dimension clause fails ({m} < {})", 2 * k));
                    }
                    for f in &v.failures {
                        s.push_str(&format!(
                            "; fails at i={}: nu C({p},{}) = {} < {} = nu|ko_{}(P_{m})|",
                            f.i,
                            f.i,
                            f.nu_binom,
                            f.ko_order,
                            4 * f.i - 1
                        ));
                    }
                    s
                }
            };
            Ok(match expect.as_deref() {
                Some("lifts") => Outcome::checked(out, v.lifts),
                Some("fails") | Some("no-lift") => Outcome::checked(out, !v.lifts),
                Some(other) => bail!("--expect takes `lifts` or `fails`, got `{other}`"),
                None => Outcome::plain(out),
            })
        }
        Cmd::Mpt(sub) => dispatch_mpt(sub),
        Cmd::Reproduce(sub) => {
            let engine = Engine::new()?;
            let (record, format): (DerivationRecord, Format) = match sub {
                ReproduceCmd::Thm112 { n, format } => (derive_nonimmersion_2(&engine, n)?, format),
                ReproduceCmd::Thm12 { n, format } => (derive_embedding(&engine, n)?, format),
                ReproduceCmd::Lemma35 { n, format } => (derive_lemma_3_5(&engine, n)?, format),
            };
            let out = match format {
                Format::Json => record.to_json().to_string(),
                _ => record.to_text(),
            };
            Ok(Outcome::plain(out))
        }
        Cmd::Fixtures(FixturesCmd::Verify { format }) => {
            let engine = Engine::new()?;
            let items = verify_all(&engine.fixtures, &engine.ko);
            let all_ok = items.iter().all(|i| i.ok);
            let out = match format {
                Format::Json => serde_json::to_string(&items)?,
                _ => {
                    let mut s = String::new();
                    for item in &items {
                        s.push_str(&format!(
                            "{} {} [{}]: {}\n",
                            if item.ok { "PASS" } else { "FAIL" },
                            item.fixture,
                            item.check,
                            item.detail
                        ));
                    }
                    s.push_str(&format!(
                        "{}: {} checks\n",
                        if all_ok {
                            "all fixtures verified"
                        } else {
                            "FIXTURE VERIFICATION FAILED"
                        },
                        items.len()
                    ));
                    s
                }
            };
            Ok(Outcome::checked(out, all_ok))
        }
    }
}

fn dispatch_mpt(cmd: MptCmd) -> Result<Outcome> {
    let fx = Fixtures::load()?;
    match cmd {
        MptCmd::Parse {
            model,
            print,
            format,
        } => {
            let m = model.load(&fx)?;
            let out = match format {
                Format::Json => serde_json::to_string(&m)?,
                _ if print => print_relations(&m),
                _ => {
                    let counts: Vec<String> = m
                        .stages
                        .iter()
                        .map(|s| s.k_invariants.len().to_string())
                        .collect();
                    format!(
                        "valid tower: base {}, bundle {}xi, space P^({}); {} stage-0 classes, k-invariants per stage: {}",
                        m.base,
                        m.bundle,
                        m.space,
                        m.stage0.len(),
                        counts.join("+")
                    )
                }
            };
            Ok(Outcome::plain(out))
        }
        MptCmd::Vary {
            model,
            stage,
            fiber,
            n,
            format,
        } => {
            let m = model.load(&fx)?;
            let fiber = parse_label(&fiber)?;
            let deltas = variation_delta(&m, stage, &fiber, n)?;
            let out = match format {
                Format::Json => {
                    let entries: Vec<serde_json::Value> = deltas
                        .iter()
                        .map(|(l, c)| serde_json::json!({"invariant": l.to_string(), "delta": class_json(c)}))
                        .collect();
                    serde_json::json!({"stage": stage, "fiber": fiber.to_string(), "n": n, "deltas": entries}).to_string()
                }
                _ => {
                    let mut s = format!("varying through {fiber} at n = {n}:\n");
                    for (l, c) in &deltas {
                        s.push_str(&format!(
                            "  {l}: {} {}\n",
                            c,
                            if c.is_zero() { "" } else { "(flips)" }
                        ));
                    }
                    s
                }
            };
            Ok(Outcome::plain(out))
        }
        MptCmd::Matrix {
            model,
            stage,
            n,
            format,
        } => {
            let m = model.load(&fx)?;
            let matrix = variation_matrix(&m, stage, n)?;
            let out = match format {
                Format::Json => serde_json::to_string(&matrix)?,
                _ => {
                    let mut s = format!("stage-{stage} variation matrix at n = {n}:\n");
                    for row in &matrix.rows {
                        let flips: Vec<String> = row.flips.iter().map(|l| l.to_string()).collect();
                        s.push_str(&format!(
                            "  {} (fiber dim {}): {}\n",
                            row.fiber,
                            row.fiber_dim,
                            if flips.is_empty() {
                                "-".to_string()
                            } else {
                                flips.join(", ")
                            }
                        ));
                    }
                    s
                }
            };
            Ok(Outcome::plain(out))
        }
        MptCmd::Implies {
            model,
            stage,
            n,
            antecedent,
            consequent,
            expect,
            format,
        } => {
            let m = model.load(&fx)?;
            let matrix = variation_matrix(&m, stage, n)?;
            let ante = parse_labels(&antecedent)?;
            let cons = parse_labels(&consequent)?;
            let v = check_implication(&matrix, &ante, &cons)?;
            let out = match format {
                Format::Json => serde_json::json!({"holds": v}).to_string(),
                _ => v.to_string(),
            };
            Ok(match expect {
                Some(e) => Outcome::checked(out, e == v),
                None => Outcome::plain(out),
            })
        }
        MptCmd::Kernel {
            model,
            stage,
            n,
            expect,
            format,
        } => {
            let m = model.load(&fx)?;
            let matrix = variation_matrix(&m, stage, n)?;
            let v = kernel_trivial(&matrix);
            let out = match format {
                Format::Json => serde_json::json!({"trivial": v}).to_string(),
                _ => v.to_string(),
            };
            Ok(match expect {
                Some(e) => Outcome::checked(out, e == v),
                None => Outcome::plain(out),
            })
        }
        MptCmd::Forced {
            model,
            relation,
            candidate,
            n,
            expect,
            format,
        } => {
            let m = model.load(&fx)?;
            let v = forced_vanishing(&m, &parse_label(&relation)?, &parse_label(&candidate)?, n)?;
            let out = match format {
                Format::Json => serde_json::json!({"forced": v}).to_string(),
                _ => v.to_string(),
            };
            Ok(match expect {
                Some(e) => Outcome::checked(out, e == v),
                None => Outcome::plain(out),
            })
        }
    }
}

/// Run the CLI; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            if !outcome.output.ends_with('\n') {
                println!();
            }
            match outcome.matched {
                Some(false) => EXIT_MISMATCH,
                _ => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
