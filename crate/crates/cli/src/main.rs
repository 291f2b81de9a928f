mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use kroncover::certificate::{self, LemmaRegistry, VerifyMode, VerifyReport};
use kroncover::characters::ClassLabel;
use kroncover::config::{Caps, DEFAULT_ORACLE_CAP};
use kroncover::kronecker::{audit_growth, constant_audit, CoverPower, KroneckerOracle, Support};
use kroncover::measure;
use kroncover::partition::{finish_split, shared_dist_rows};
use kroncover::random::{self, Coupling, Measure, SamplerRegistry, RNG_ALGORITHM};
use kroncover::shape::ContinuousShape;
use kroncover::{Error, Partition, Result};

use output::{Format, Out, RunInfo};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Kronecker coefficients, tensor-power covering and positivity certificates
/// for symmetric groups.
#[derive(Debug, Parser)]
#[command(name = "kroncover", version)]
struct Cli {
    /// Largest n for which character tables are built.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: usize,

    /// Directory for cached character tables.
    #[arg(long, global = true, env = "KRONCOVER_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of trials (sampling) or pairs (pigeonhole).
    #[arg(long, global = true)]
    trials: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Dimension of the irreducible (hook length formula).
    Dim { p: Partition },
    /// Hook lengths, one row per line.
    Hooks { p: Partition },
    /// Conjugate partition.
    Conj { p: Partition },
    /// Horizontal sum: rows added.
    Hsum { a: Partition, b: Partition },
    /// Vertical sum: row multisets merged.
    Vsum { a: Partition, b: Partition },
    /// Blockwise distance between partitions of equal size.
    Dist { a: Partition, b: Partition },
    /// Number of distinct row lengths; with several arguments, the number shared by all.
    Distrows {
        #[arg(required = true)]
        ps: Vec<Partition>,
    },
    /// Split off r distinct rows as a staircase plus a remainder.
    StaircaseExtract {
        p: Partition,
        r: usize,
        /// Row lengths to extract, comma separated.
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
    },
    /// Blocks of k rows written as Rect(k*h, k) plus a remainder.
    Krect { p: Partition, k: usize },
    /// First row cut down to max(a_2, b_1).
    Hat { p: Partition },
    /// Greedy column split of the given part sizes.
    FinishSplit {
        #[arg(required = true)]
        parts: Vec<usize>,
    },
    /// Character value chi^l(rho).
    Char { l: Partition, rho: Partition },
    /// Full character table of S_n.
    Table { n: usize },
    /// Kronecker coefficient g(l, m, v).
    Kron { l: Partition, m: Partition, v: Partition },
    /// Extended Kronecker coefficient of two or more partitions.
    KronExt {
        #[arg(num_args = 2.., required = true)]
        ps: Vec<Partition>,
    },
    /// Support of l (x) m.
    Tensor { l: Partition, m: Partition },
    /// Support of the t-th tensor power.
    Power { l: Partition, t: usize },
    /// Whether the product of the given irreducibles contains every irreducible.
    Covers {
        #[arg(required = true)]
        factors: Vec<Partition>,
    },
    /// Whether l (x) l contains every irreducible.
    Saxl {
        /// Partition to test; omit with --all.
        l: Option<Partition>,
        /// List every covering partition of this n instead.
        #[arg(long)]
        all: Option<usize>,
    },
    /// Covering of the fourth tensor power of staircases.
    SaxlFourth {
        #[arg(long, default_value_t = 4)]
        r_max: usize,
    },
    /// Least t with l^(x)t covering.
    MinPower {
        l: Partition,
        #[arg(long, default_value_t = 64)]
        t_max: usize,
    },
    /// List registered certificate constructions.
    Lemmas,
    /// Build a positivity certificate.
    Certify {
        lemma: String,
        params: Vec<String>,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = VerifyMode::Full)]
        mode: VerifyMode,
    },
    /// Draw random partitions.
    Sample { measure: Measure, n: usize },
    /// DistRows statistics of random partitions.
    StatsDistrows {
        measure: Measure,
        n: usize,
        /// Also report the rescaled distance to the limit shape.
        #[arg(long)]
        shape: bool,
    },
    /// Frequency with which k random irreducibles have a covering product.
    ExpCoupledCover {
        measure: Measure,
        k: usize,
        n: usize,
        #[arg(long, default_value_t = Coupling::Independent)]
        coupling: Coupling,
    },
    /// Plancherel measure of a set of irreducibles of one S_n.
    Measure {
        #[arg(required = true)]
        members: Vec<Partition>,
    },
    /// Random pairs of supports with total measure above one must cover.
    Pigeonhole { n: usize },
    /// Tensoring with one irreducible never decreases measure (exhaustive).
    Monotonicity { n: usize },
    /// Uniform measure fails the pigeonhole principle on the affine group of F_p.
    AffineDemo { p: usize },
    /// Normalized covering exponent t_min ln dim / (n ln n) across n.
    ConstantAudit {
        #[arg(long, default_value_t = 5)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 64)]
        t_max: usize,
    },
}

enum Status {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } | Error::Overflow(_) => EXIT_RESOURCE,
        Error::Verification { .. } | Error::Inconsistency(_) => EXIT_VIOLATION,
        _ => EXIT_USAGE,
    }
}

fn strs<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn support_json(s: &Support) -> Value {
    json!(strs(s.sorted()))
}

fn rational_json(q: &num_rational::BigRational) -> Value {
    json!({ "exact": q.to_string(), "approx": q.to_f64() })
}

fn run(cli: &Cli) -> Result<Status> {
    let out = Out::new(cli.format);
    let mut oracle = KroneckerOracle::new(Caps::with_oracle(cli.cap));
    if let Some(dir) = &cli.cache_dir {
        oracle = oracle.with_cache_dir(dir);
    }
    let info = RunInfo {
        seed: cli.seed,
        trials: cli.trials,
        cap: cli.cap,
        threads: rayon::current_num_threads(),
        rng: RNG_ALGORITHM,
    };
    let trials = |default: usize| cli.trials.unwrap_or(default);

    match &cli.cmd {
        Cmd::Dim { p } => {
            let d = p.dimension();
            out.emit("dim", d.to_string(), json!({ "partition": p.to_string(), "dim": d.to_string() }));
        }
        Cmd::Hooks { p } => {
            let rows = p.hook_lengths().rows();
            let text = rows.iter().map(|r| strs(r).join(" ")).collect::<Vec<_>>().join("\n");
            out.emit("hooks", text, json!({ "partition": p.to_string(), "hooks": rows }));
        }
        Cmd::Conj { p } => {
            let c = p.conjugate();
            out.emit("conj", c.to_string(), json!({ "partition": p.to_string(), "conjugate": c.to_string() }));
        }
        Cmd::Hsum { a, b } => {
            let s = a.hsum(b);
            out.emit("hsum", s.to_string(), json!({ "result": s.to_string() }));
        }
        Cmd::Vsum { a, b } => {
            let s = a.vsum(b);
            out.emit("vsum", s.to_string(), json!({ "result": s.to_string() }));
        }
        Cmd::Dist { a, b } => {
            let d = a.blockwise_distance(b)?;
            out.emit("dist", d.to_string(), json!({ "distance": d }));
        }
        Cmd::Distrows { ps } => {
            let d = if ps.len() == 1 { ps[0].dist_rows() } else { shared_dist_rows(ps)? };
            out.emit("distrows", d.to_string(), json!({ "partitions": strs(ps), "distrows": d }));
        }
        Cmd::StaircaseExtract { p, r, rows } => {
            let (mu, nu) = p.staircase_decompose(*r, rows.as_deref())?;
            let stair = nu.hsum(&Partition::staircase(*r));
            out.emit(
                "staircase-extract",
                format!("mu {mu}\nnu {nu}\nextracted {stair}"),
                json!({ "mu": mu.to_string(), "nu": nu.to_string(), "extracted": stair.to_string() }),
            );
        }
        Cmd::Krect { p, k } => {
            let blocks = p.krect_decompose(*k)?;
            let text = blocks
                .iter()
                .map(|b| format!("h={} nu={} block={}", b.h, b.nu, b.block()))
                .collect::<Vec<_>>()
                .join("\n");
            let rec: Vec<Value> = blocks
                .iter()
                .map(|b| json!({ "h": b.h, "k": b.k, "nu": b.nu.to_string(), "block": b.block().to_string() }))
                .collect();
            out.emit("krect", text, json!({ "blocks": rec }));
        }
        Cmd::Hat { p } => {
            let (hat, m) = p.hat_decompose()?;
            out.emit("hat", format!("{hat} m={m}"), json!({ "hat": hat.to_string(), "m": m }));
        }
        Cmd::FinishSplit { parts } => {
            let ps = finish_split(parts)?;
            out.emit("finish-split", strs(&ps).join(" "), json!({ "parts": strs(&ps) }));
        }
        Cmd::Char { l, rho } => {
            let v = kroncover::characters::character(l, &ClassLabel::new(rho.clone()))?;
            out.emit("char", v.to_string(), json!({ "irrep": l.to_string(), "class": rho.to_string(), "value": v }));
        }
        Cmd::Table { n } => {
            let t = oracle.table(*n)?;
            let classes: Vec<String> = t.classes().iter().map(|c| c.cycle_type().to_string()).collect();
            match out.format() {
                Format::Table => {
                    println!("classes {}", classes.join(" "));
                    for (i, p) in t.irreps().iter().enumerate() {
                        println!("{p} {}", strs(t.row(i)).join(" "));
                    }
                }
                Format::Structured => {
                    let rows: Vec<&[i64]> = (0..t.len()).map(|i| t.row(i)).collect();
                    out.emit(
                        "table",
                        "",
                        json!({ "n": n, "irreps": strs(t.irreps()), "classes": classes, "values": rows }),
                    );
                }
            }
        }
        Cmd::Kron { l, m, v } => {
            let g = oracle.kronecker(l, m, v)?;
            out.emit("kron", g.to_string(), json!({ "partitions": strs([l, m, v]), "value": g.to_string() }));
        }
        Cmd::KronExt { ps } => {
            let g = oracle.extended_kronecker(ps)?;
            out.emit("kron-ext", g.to_string(), json!({ "partitions": strs(ps), "value": g.to_string() }));
        }
        Cmd::Tensor { l, m } => {
            let s = oracle.tensor_support(l, m)?;
            out.emit("tensor", s.to_string(), json!({ "support": support_json(&s), "size": s.len() }));
        }
        Cmd::Power { l, t } => {
            let s = oracle.power_support(l, *t)?;
            out.emit("power", s.to_string(), json!({ "support": support_json(&s), "size": s.len() }));
        }
        Cmd::Covers { factors } => {
            let supports: Vec<Support> = factors.iter().cloned().map(Support::singleton).collect();
            let c = oracle.covers(&oracle.product_support(&supports)?)?;
            out.emit("covers", c.to_string(), json!({ "factors": strs(factors), "covers": c }));
        }
        Cmd::Saxl { l, all } => match (l, all) {
            (Some(l), None) => {
                let c = oracle.saxl_check(l)?;
                out.emit("saxl", c.to_string(), json!({ "partition": l.to_string(), "covers": c }));
            }
            (None, Some(n)) => {
                let all = kroncover::characters::partitions_capped(*n, oracle.caps().enumeration)?;
                let mut hits = Vec::new();
                for p in all {
                    if oracle.saxl_check(&p)? {
                        hits.push(p);
                    }
                }
                out.emit("saxl-all", strs(&hits).join("\n"), json!({ "n": n, "covering": strs(&hits) }));
            }
            _ => return Err(Error::invalid("give either a partition or --all <n>")),
        },
        Cmd::SaxlFourth { r_max } => {
            let trend = measure::saxl_measure_trend(&oracle, *r_max)?;
            for (r, m2) in trend {
                let rho = Partition::staircase(r);
                let c = oracle.covers(&oracle.power_support(&rho, 4)?)?;
                out.emit(
                    "saxl-fourth",
                    format!("r={r} {rho} fourth_power_covers={c} square_measure={}", m2),
                    json!({ "r": r, "staircase": rho.to_string(), "covers": c, "square_measure": rational_json(&m2) }),
                );
            }
        }
        Cmd::MinPower { l, t_max } => {
            let cp = oracle.min_cover_power(l, *t_max)?;
            let rec = match &cp {
                CoverPower::Covers(t) => json!({ "covers": t }),
                CoverPower::Exceeds(t) => json!({ "exceeds": t }),
                CoverPower::Never { first_repeat, period, support } => json!({
                    "never": { "first_repeat": first_repeat, "period": period, "support": support_json(support) }
                }),
            };
            out.emit("min-power", cp.to_string(), json!({ "partition": l.to_string(), "result": rec }));
        }
        Cmd::Lemmas => {
            let reg = LemmaRegistry::default();
            for name in reg.names() {
                let usage = reg.get(name).map(|b| b.usage()).unwrap_or_default();
                out.emit("lemma", format!("{name} {usage}"), json!({ "name": name, "usage": usage }));
            }
        }
        Cmd::Certify { lemma, params, out: path } => {
            let cert = LemmaRegistry::default().build(lemma, params, &oracle)?;
            let text = certificate::serialize(&cert);
            let conclusion = cert.conclusion().to_string();
            match path {
                Some(path) => {
                    std::fs::write(path, &text).map_err(|source| Error::Io { path: path.clone(), source })?;
                    out.emit(
                        "certify",
                        format!("{conclusion} nodes={} written to {}", cert.node_count(), path.display()),
                        json!({ "lemma": lemma, "conclusion": conclusion, "nodes": cert.node_count(), "path": path }),
                    );
                }
                None => out.emit(
                    "certify",
                    text.trim_end(),
                    json!({ "lemma": lemma, "conclusion": conclusion, "certificate": text }),
                ),
            }
        }
        Cmd::Verify { file, mode } => {
            let text = std::fs::read_to_string(file).map_err(|source| Error::Io { path: file.clone(), source })?;
            let cert = certificate::deserialize(&text)?;
            let report = certificate::verify_certificate(&cert, *mode, &oracle)?;
            emit_verify(&out, &cert.conclusion().to_string(), &report);
        }
        Cmd::Sample { measure, n } => {
            let reg = SamplerRegistry::default();
            let sampler = reg.get(*measure)?;
            let count = trials(1);
            out.meta("sample", &info, json!({ "measure": measure.name(), "n": n }));
            for i in 0..count {
                let p = sampler.sample(*n, &mut random::trial_rng(cli.seed, i as u64))?;
                out.emit(
                    "sample",
                    p.to_string(),
                    json!({ "trial": i, "partition": p.to_string(), "distrows": p.dist_rows() }),
                );
            }
        }
        Cmd::StatsDistrows { measure, n, shape } => {
            let reg = SamplerRegistry::default();
            let limit = shape.then(|| match measure {
                Measure::Plancherel => ContinuousShape::lsvk(),
                Measure::Uniform => ContinuousShape::uniform_limit(),
            });
            let stats = random::distrows_experiment(reg.get(*measure)?, *n, trials(100), cli.seed, limit.as_ref())?;
            out.meta(
                "stats-distrows",
                &RunInfo { trials: Some(stats.trials), ..info.clone() },
                json!({ "measure": measure.name(), "n": n }),
            );
            let constant = match measure {
                Measure::Plancherel => random::alpha_closed_form(),
                Measure::Uniform => random::uniform_distrows_constant(),
            };
            let median = stats.median_shape_distance();
            let mut text = format!(
                "mean={:.4} variance={:.4} mean/sqrt(n)={:.5} constant={:.5}",
                stats.mean(),
                stats.variance(),
                stats.normalized_mean(),
                constant
            );
            if let Some(m) = median {
                text.push_str(&format!(" median_shape_distance={m:.5}"));
            }
            out.emit(
                "stats-distrows",
                text,
                json!({
                    "mean": stats.mean(),
                    "variance": stats.variance(),
                    "normalized_mean": stats.normalized_mean(),
                    "constant": constant,
                    "median_shape_distance": median,
                    "distrows": stats.dist_rows,
                }),
            );
        }
        Cmd::ExpCoupledCover { measure, k, n, coupling } => {
            let reg = SamplerRegistry::default();
            let exp =
                random::coupled_cover_experiment(reg.get(*measure)?, &oracle, *k, *n, trials(100), *coupling, cli.seed)?;
            out.meta(
                "exp-coupled-cover",
                &RunInfo { trials: Some(exp.trials), ..info.clone() },
                json!({ "measure": measure.name(), "k": k, "n": n, "coupling": coupling.to_string() }),
            );
            out.emit(
                "exp-coupled-cover",
                format!("covered {}/{} frequency={:.4}", exp.covered.iter().filter(|&&c| c).count(), exp.trials, exp.frequency()),
                json!({ "frequency": exp.frequency(), "covered": exp.covered }),
            );
        }
        Cmd::Measure { members } => {
            let n = members[0].size();
            let s = Support::new(n, members.clone())?;
            let m = measure::plancherel_measure(&s);
            out.emit("measure", format!("{m} ~ {:.6}", m.to_f64().unwrap_or(f64::NAN)), rational_json(&m));
        }
        Cmd::Pigeonhole { n } => {
            let pairs = trials(1000);
            let rep = measure::pigeonhole_sweep(&oracle, *n, pairs, cli.seed)?;
            out.meta("pigeonhole", &RunInfo { trials: Some(pairs), ..info.clone() }, json!({ "n": n }));
            for (v, w) in &rep.failures {
                out.emit("pigeonhole-failure", format!("FAIL V={v} W={w}"), json!({ "v": support_json(v), "w": support_json(w) }));
            }
            out.emit(
                "pigeonhole",
                format!("drawn={} applicable={} failures={}", rep.checked, rep.applicable, rep.failures.len()),
                json!({ "drawn": rep.checked, "applicable": rep.applicable, "failures": rep.failures.len() }),
            );
            if !rep.failures.is_empty() {
                return Ok(Status::Violation);
            }
        }
        Cmd::Monotonicity { n } => {
            let bad = measure::monotonicity_sweep(&oracle, *n)?;
            for (v, l) in &bad {
                out.emit("monotonicity-failure", format!("FAIL v={v} l={l}"), json!({ "v": v.to_string(), "l": l.to_string() }));
            }
            out.emit("monotonicity", format!("n={n} violations={}", bad.len()), json!({ "n": n, "violations": bad.len() }));
            if !bad.is_empty() {
                return Ok(Status::Violation);
            }
        }
        Cmd::AffineDemo { p } => {
            let rep = measure::affine_counterexample_demo(*p)?;
            let text = format!(
                "p={} |G|={} V=W={{{}}} product={{{}}} uniform_total={} plancherel_total={} covers={} uniform_pigeonhole_fails={}",
                rep.p,
                rep.p * (rep.p - 1),
                strs(&rep.v).join(","),
                strs(&rep.product).join(","),
                rep.uniform_total,
                rep.plancherel_total,
                rep.covers,
                rep.exhibits_failure()
            );
            out.emit(
                "affine-demo",
                text,
                json!({
                    "p": rep.p,
                    "v": strs(&rep.v),
                    "w": strs(&rep.w),
                    "product": strs(&rep.product),
                    "uniform_total": rational_json(&rep.uniform_total),
                    "plancherel_total": rational_json(&rep.plancherel_total),
                    "covers": rep.covers,
                    "exhibits_failure": rep.exhibits_failure(),
                }),
            );
        }
        Cmd::ConstantAudit { n_min, n_max, t_max } => {
            if n_min > n_max {
                return Err(Error::invalid("n_min must not exceed n_max"));
            }
            out.meta(
                "constant-audit",
                &info,
                json!({ "n_min": n_min, "n_max": n_max, "t_max": t_max }),
            );
            let mut rows = Vec::new();
            for n in *n_min..=*n_max {
                let row = constant_audit(&oracle, n, *t_max)?;
                out.emit(
                    "constant-audit-row",
                    format!("n={} ratio={:.5} argmax={} t_min={} uncovered={}", row.n, row.ratio, row.argmax, row.t_min, row.uncovered.len()),
                    json!({
                        "n": row.n,
                        "ratio": row.ratio,
                        "argmax": row.argmax.to_string(),
                        "t_min": row.t_min,
                        "uncovered": strs(&row.uncovered),
                    }),
                );
                rows.push(row);
            }
            let growth = audit_growth(&rows);
            let ok = growth <= 2.0;
            out.emit(
                "constant-audit",
                format!("growth={growth:.5} bounded={ok}"),
                json!({ "growth": growth, "bounded": ok }),
            );
            if !ok {
                return Ok(Status::Violation);
            }
        }
    }
    Ok(Status::Ok)
}

fn emit_verify(out: &Out, conclusion: &str, report: &VerifyReport) {
    for u in &report.unverified {
        out.emit(
            "unverified",
            format!("unverified leaf at {}: {}", VerifyReport::path_string(&u.path), u.relation),
            json!({ "path": u.path, "relation": u.relation.to_string() }),
        );
    }
    out.emit(
        "verify",
        format!(
            "ok {conclusion} mode={} nodes={} oracle_checks={} unverified={} root_checked={}",
            report.mode,
            report.nodes,
            report.oracle_checks,
            report.unverified.len(),
            report.root_checked
        ),
        json!({
            "ok": true,
            "conclusion": conclusion,
            "mode": report.mode.to_string(),
            "nodes": report.nodes,
            "oracle_checks": report.oracle_checks,
            "unverified": report.unverified.len(),
            "root_checked": report.root_checked,
        }),
    );
}
