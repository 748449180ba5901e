//! `nlocal` command-line front-end. Each verb reads one or more JSON
//! documents, calls into `nlocal_core` and writes one document.

use std::fs;
use std::io::{Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use nlocal_core::certify::bell_local_lp;
use nlocal_core::codec::{self, Document};
use nlocal_core::models::evaluate_triangle;
use nlocal_core::{
    born_evaluate, canonicalize, deterministic_ct, evaluate_nlocal, examples, expand_full,
    extract_model, factorization_check, mix, nlocal_search, nonsignaling_check, path_point, random,
    realize, relabel_hub, star_mix, uniform_ct, validate, CanonicalNLocalForm, CertReport,
    CorrelationTensor, Party, Scenario, SearchConfig, Tolerances,
};
use rand::Rng;

/// Exit status for a negative certificate.
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "nlocal",
    version,
    about = "Bilocal and n-local correlation tensors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Io {
    /// Input document, `-` for stdin.
    #[arg(long = "in", default_value = "-")]
    pub input: String,
    /// Output document, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a fixture tensor or a random instance.
    Gen {
        /// not-bilocal, shared-coin, uniform, deterministic, random-model or random-canonical.
        #[arg(long)]
        example: String,
        /// `o1,m1;o2,m2;...;oB,mB`, edges first and the hub last.
        #[arg(long, default_value = "2,2;2,2;2,2")]
        scenario: String,
        /// Hidden dimension per source, for random-model.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Strategy index per party (edges, then hub), for deterministic.
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output document, `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Evaluate a model, canonical form, expansion or realization to its tensor.
    Eval(Io),
    /// Canonical form of a model.
    Canon(Io),
    /// Full expansion over deterministic strategies.
    Expand(Io),
    /// Separable quantum realization of a model.
    Realize(Io),
    /// Born-rule tensor of a realization (models are realized first).
    Born(Io),
    /// Certify membership of a tensor: factorization, Bell LP, then witness search.
    Certify {
        #[command(flatten)]
        io: Io,
        /// Middle party: B (hub), A or C for tripartite tensors, or A1..An.
        #[arg(long, default_value = "B")]
        hub: String,
        /// Tolerance for every test. Defaults to 1e-9 for the factorization
        /// and LP tests and 1e-6 for the search.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop after the exact tests.
        #[arg(long)]
        no_search: bool,
    },
    /// Convex mixture of tensors.
    Mix {
        /// Input tensors; repeat the flag.
        #[arg(long = "in", required = true)]
        inputs: Vec<String>,
        /// One weight per input; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Point on the path between two models, through the uniform tensor.
    Path {
        /// Exactly two models.
        #[arg(long = "in", num_args = 2, required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Mix a model towards its sun on edge `edge`.
    Star {
        #[command(flatten)]
        io: Io,
        /// Edge index, starting at 1.
        #[arg(long, default_value_t = 1)]
        edge: usize,
        #[arg(long)]
        t: f64,
    },
}

/// Parses `o1,m1;o2,m2;...;oB,mB`.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let pairs = text
        .split(';')
        .map(|p| {
            let v: Vec<usize> = p
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("bad scenario entry {p:?}"))?;
            match v[..] {
                [o, m] => Ok((o, m)),
                _ => bail!("scenario entry {p:?} is not `outcomes,inputs`"),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let Some((&(ob, mb), edges)) = pairs.split_last() else {
        bail!("empty scenario");
    };
    let (o, m) = edges.iter().copied().unzip();
    Ok(Scenario::new(o, m, ob, mb)?)
}

/// `B` or `hub` is the hub; `A` and `C` name the edges of a tripartite
/// tensor; `A1..An` name edges in general.
pub fn parse_party(text: &str, edges: usize) -> Result<Party> {
    let p = match text {
        "B" | "b" | "hub" => Party::Hub,
        "A" | "a" if edges == 2 => Party::Edge(0),
        "C" | "c" if edges == 2 => Party::Edge(1),
        _ => {
            let i: usize = text
                .trim_start_matches(['A', 'a'])
                .parse()
                .map_err(|_| anyhow!("unknown party {text:?}"))?;
            if i == 0 || i > edges {
                bail!("party {text:?} outside 1..={edges}");
            }
            Party::Edge(i - 1)
        }
    };
    Ok(p)
}

struct Session<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Session<'_> {
    fn read(&mut self, path: &str) -> Result<Document> {
        let text = if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).context("reading stdin")?;
            s
        } else {
            fs::read_to_string(path).with_context(|| format!("reading {path}"))?
        };
        codec::from_str(&text).with_context(|| format!("parsing {path}"))
    }

    fn write(&mut self, path: &str, doc: Document) -> Result<()> {
        let mut text = codec::to_string(&doc)?;
        text.push('\n');
        if path == "-" {
            self.stdout.write_all(text.as_bytes())?;
            self.stdout.flush()?;
        } else {
            fs::write(path, text).with_context(|| format!("writing {path}"))?;
        }
        Ok(())
    }
}

fn to_canonical(doc: Document) -> Result<CanonicalNLocalForm> {
    Ok(match doc {
        Document::Nlocal(m) => canonicalize(&m)?,
        Document::Canonical(c) => c,
        Document::Realization(r) => canonicalize(&extract_model(&r)?)?,
        other => bail!(
            "cannot form a canonical model from a {} document",
            other.kind()
        ),
    })
}

fn generate(
    example: &str,
    scenario: &str,
    dims: Option<Vec<usize>>,
    strategies: Option<Vec<usize>>,
    seed: u64,
) -> Result<Document> {
    let mut rng = random::rng(seed);
    let s = || parse_scenario(scenario);
    Ok(match example {
        "not-bilocal" => examples::not_bilocal().into(),
        "shared-coin" => examples::shared_coin().into(),
        "uniform" => uniform_ct(&s()?).into(),
        "deterministic" => {
            let s = s()?;
            let picks = match strategies {
                Some(p) => p,
                None => s
                    .parties()
                    .map(|p| rng.random_range(0..s.strategy_count(p)))
                    .collect(),
            };
            deterministic_ct(&s, &picks)?.into()
        }
        "random-model" => {
            let s = s()?;
            let dims = dims.unwrap_or_else(|| vec![2; s.edges()]);
            random::model(&s, &dims, &mut rng)?.into()
        }
        "random-canonical" => random::canonical(&s()?, &mut rng)?.into(),
        other => bail!("unknown example {other:?}"),
    })
}

fn evaluate(doc: Document) -> Result<CorrelationTensor> {
    Ok(match doc {
        Document::Nlocal(m) => evaluate_nlocal(&m)?,
        Document::Triangle(m) => evaluate_triangle(&m)?,
        Document::Canonical(c) => c.evaluate()?,
        Document::Expansion(x) => x.tensor()?,
        Document::Realization(r) => born_evaluate(&r)?,
        other => bail!("cannot evaluate a {} document", other.kind()),
    })
}

/// Factorization, then the Bell LP, then the search. Stops at the first
/// negative certificate.
pub fn certify(
    t: &CorrelationTensor,
    hub: Party,
    tol: Option<f64>,
    cfg: &SearchConfig,
    search: bool,
) -> Result<CertReport> {
    let exact_tol = tol.unwrap_or(1e-9);
    let t = relabel_hub(t, hub)?;
    let diag = validate(&t, &Tolerances::default());
    if !diag.ok {
        bail!(
            "input is not a valid tensor (negativity {:e}, normalization error {:e})",
            diag.max_negativity,
            diag.max_normalization_error
        );
    }
    let mut details = Vec::new();
    if nonsignaling_check(&t, &Tolerances::with(exact_tol)).ok {
        let fact = factorization_check(&t, Party::Hub, exact_tol)?;
        info!("factorization: {} (defect {:e})", fact.verdict, fact.defect);
        if fact.verdict.is_negative() {
            return Ok(fact);
        }
        details.extend(fact.details);
    } else {
        info!("input signals; skipping the factorization test");
    }
    let mut lp = bell_local_lp(&t, exact_tol)?;
    info!("Bell LP: {} (defect {:e})", lp.verdict, lp.defect);
    if lp.verdict.is_negative() || !search {
        details.append(&mut lp.details);
        lp.details = details;
        return Ok(lp);
    }
    details.append(&mut lp.details);
    let mut rep = nlocal_search(&t, cfg)?;
    info!("search: {} (residual {:e})", rep.verdict, rep.defect);
    details.append(&mut rep.details);
    rep.details = details;
    Ok(rep)
}

fn execute(cmd: Command, io: &mut Session) -> Result<i32> {
    match cmd {
        Command::Gen {
            example,
            scenario,
            dims,
            strategies,
            seed,
            out,
        } => {
            info!("seed {seed}");
            let doc = generate(&example, &scenario, dims, strategies, seed)?;
            io.write(&out, doc)?;
        }
        Command::Eval(p) => {
            let t = evaluate(io.read(&p.input)?)?;
            io.write(&p.out, t.into())?;
        }
        Command::Canon(p) => {
            let c = to_canonical(io.read(&p.input)?)?;
            io.write(&p.out, c.into())?;
        }
        Command::Expand(p) => {
            let x = expand_full(&to_canonical(io.read(&p.input)?)?)?;
            io.write(&p.out, x.into())?;
        }
        Command::Realize(p) => {
            let r = realize(&to_canonical(io.read(&p.input)?)?)?;
            io.write(&p.out, r.into())?;
        }
        Command::Born(p) => {
            let r = match io.read(&p.input)? {
                Document::Realization(r) => r,
                other => realize(&to_canonical(other)?)?,
            };
            io.write(&p.out, born_evaluate(&r)?.into())?;
        }
        Command::Certify {
            io: p,
            hub,
            tol,
            restarts,
            seed,
            no_search,
        } => {
            let t = io.read(&p.input)?.into_tensor()?;
            let hub = parse_party(&hub, t.scenario().edges())?;
            let mut cfg = SearchConfig {
                restarts,
                seed,
                ..SearchConfig::default()
            };
            if let Some(tol) = tol {
                cfg.tol = tol;
            }
            info!("seed {seed}, tol {tol:?}, restarts {restarts}");
            let rep = certify(&t, hub, tol, &cfg, !no_search)?;
            let negative = rep.verdict.is_negative();
            eprintln!("{} (defect {:e})", rep.verdict, rep.defect);
            io.write(&p.out, rep.into())?;
            if negative {
                return Ok(EXIT_NEGATIVE);
            }
        }
        Command::Mix {
            inputs,
            weights,
            out,
        } => {
            let ts = inputs
                .iter()
                .map(|path| io.read(path)?.into_tensor().map_err(Into::into))
                .collect::<Result<Vec<_>>>()?;
            let w = weights.unwrap_or_else(|| vec![1.0 / ts.len() as f64; ts.len()]);
            if w.len() != ts.len() {
                bail!("{} weights for {} tensors", w.len(), ts.len());
            }
            let terms: Vec<(f64, &CorrelationTensor)> = w.into_iter().zip(&ts).collect();
            io.write(&out, mix(&terms)?.into())?;
        }
        Command::Path { inputs, t, out } => {
            let mp = io.read(&inputs[0])?.into_nlocal()?;
            let mq = io.read(&inputs[1])?.into_nlocal()?;
            io.write(&out, path_point(&mp, &mq, t)?.into())?;
        }
        Command::Star { io: p, edge, t } => {
            let m = io.read(&p.input)?.into_nlocal()?;
            if edge == 0 {
                bail!("edges are numbered from 1");
            }
            io.write(&p.out, star_mix(&m, edge - 1, t)?.into())?;
        }
    }
    Ok(0)
}

/// Runs one command line and returns the exit status. Errors are reported
/// on stderr.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    info!("nlocal {}", env!("CARGO_PKG_VERSION"));
    let mut session = Session { stdin, stdout };
    match execute(cli.command, &mut session) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
