use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use profilecode::address::{
    canonical_addresses, decode2, decode2_padded, encode2, encode2_padded, is_addressable,
    AddressBook, DEFAULT_BOOK_BUDGET,
};
use profilecode::assembly::{assemble, drop_reads, fragment, AssemblyParams, ReadBag};
use profilecode::enumeration::{
    bound_report, complete_debruijn_census, complete_debruijn_count, enumeration_budget,
    exact_count_small_n, lyndon_count, maurer_partial_count_lower, oracle_count,
    partial_debruijn_census, sweep_ell, sweep_n, upper_count_small_n, BoundReport, CSV_HEADER,
    DEFAULT_BIGCOUNT_BITS, POINTS_PER_DECADE,
};
use profilecode::prefix_code::{decode1, encode1, PrefixCodecParams};
use profilecode::profile::{is_complete_debruijn, is_partial_debruijn, profile, profiles_equal};
use profilecode::word::{class_representative, is_lyndon, min_period, root, root_conjugate};
use profilecode::{Error, Exec, Word};

#[derive(Parser)]
#[command(
    name = "profilecode",
    version,
    about = "Gram profiles, distinct-profile codes and read assembly"
)]
struct Cli {
    /// Read and write quaternary words as nucleotides (A=0, C=1, G=2, T=3).
    #[arg(long, global = true)]
    dna: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Run exhaustive searches and sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Words: periods, roots, conjugacy, Lyndon test, class representative.
    #[command(subcommand)]
    Word(WordCmd),
    /// Gram profiles of words.
    #[command(subcommand)]
    Profile(ProfileCmd),
    /// Exact and brute-force profile counts.
    #[command(subcommand)]
    Enumerate(EnumerateCmd),
    /// All bounds on the number of profiles at one parameter point.
    Bounds(Point),
    /// Rate curves as CSV.
    #[command(subcommand)]
    Rates(RatesCmd),
    /// Encode data words into distinct-profile words (ell <= n < 2 ell).
    Encode1(PrefixArgs),
    /// Decode distinct-profile words (ell <= n < 2 ell).
    Decode1(PrefixArgs),
    /// Encode data into an addressable codeword.
    Encode2(AddressArgs),
    /// Decode an addressable codeword.
    Decode2(AddressArgs),
    /// Addressable word checks.
    #[command(subcommand)]
    Addressable(AddressableCmd),
    /// All ell-grams of a word, one read per line.
    Fragment {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        word: String,
    },
    /// Drop reads uniformly at random from a read file.
    Channel {
        #[arg(long = "drop")]
        drop: usize,
        #[arg(long)]
        seed: u64,
        /// Alphabet used to parse reads (defaults to 10, which accepts any digit string).
        #[arg(long)]
        q: Option<u32>,
        reads: PathBuf,
    },
    /// Reassemble an addressable codeword from a read file.
    Assemble {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        a: usize,
        /// Number of blocks.
        #[arg(long = "M", visible_alias = "m")]
        blocks: usize,
        /// First block; defaults to the encoding of all-one data.
        #[arg(long)]
        first_block: Option<String>,
        /// Last block; defaults to the encoding of all-one data.
        #[arg(long)]
        last_block: Option<String>,
        reads: PathBuf,
    },
    /// De Bruijn checks, counts and censuses.
    #[command(subcommand)]
    Debruijn(DebruijnCmd),
}

#[derive(Args)]
struct Alphabet {
    #[arg(long)]
    q: Option<u32>,
}

#[derive(Args)]
struct Point {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    ell: u64,
}

#[derive(Args)]
struct Inputs {
    words: Vec<String>,
    /// File with one word per line; blank and `#` lines are skipped.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WordCmd {
    Period {
        #[command(flatten)]
        alphabet: Alphabet,
        word: String,
    },
    Root {
        #[command(flatten)]
        alphabet: Alphabet,
        word: String,
    },
    Conjugate {
        #[command(flatten)]
        alphabet: Alphabet,
        x: String,
        y: String,
    },
    Lyndon {
        #[command(flatten)]
        alphabet: Alphabet,
        word: String,
    },
    Class {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        word: String,
    },
}

#[derive(Subcommand)]
enum ProfileCmd {
    Compute {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        inputs: Inputs,
    },
    Equiv {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        x: String,
        y: String,
    },
    Support {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        word: String,
    },
}

#[derive(Subcommand)]
enum EnumerateCmd {
    /// Exact number of profiles for ell <= n < 2 ell.
    Exact(Point),
    /// Brute-force number of distinct profiles.
    Oracle {
        #[command(flatten)]
        point: Point,
        /// Maximum number of words to visit (default from PROFILECODE_ENUM_BUDGET).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Class-count upper bound for n >= 2 ell.
    Upper(Point),
    /// Number of Lyndon words of length r.
    Lyndon {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        r: u64,
    },
}

#[derive(Subcommand)]
enum RatesCmd {
    Sweep {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = POINTS_PER_DECADE)]
        per_decade: u32,
    },
    SweepEll {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        ell_min: u64,
        #[arg(long)]
        ell_max: u64,
        #[arg(long, default_value_t = POINTS_PER_DECADE)]
        per_decade: u32,
    },
}

#[derive(Args)]
struct PrefixArgs {
    #[command(flatten)]
    alphabet: Alphabet,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ell: usize,
    #[command(flatten)]
    inputs: Inputs,
}

#[derive(Args)]
struct AddressArgs {
    #[command(flatten)]
    alphabet: Alphabet,
    #[arg(long)]
    ell: usize,
    /// Address length; derived from the layout when --n is given.
    #[arg(long, required_unless_present = "n")]
    a: Option<usize>,
    /// Total length for the padded layout (blocks plus a zero tail).
    #[arg(long, conflicts_with = "a")]
    n: Option<usize>,
    #[command(flatten)]
    inputs: Inputs,
}

#[derive(Subcommand)]
enum AddressableCmd {
    Validate {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        a: usize,
        word: String,
    },
}

#[derive(Subcommand)]
enum DebruijnCmd {
    Check {
        #[command(flatten)]
        alphabet: Alphabet,
        #[arg(long)]
        ell: usize,
        word: String,
    },
    /// Number of complete de Bruijn words, (q!)^(q^(ell-1)).
    Count {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        ell: u64,
    },
    /// Brute-force census; partial words of length n, or complete words with --complete.
    Census {
        #[arg(long)]
        q: u32,
        #[arg(long, required_unless_present = "complete")]
        n: Option<u64>,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        complete: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
}

struct Ctx {
    dna: bool,
    format: Format,
    exec: Exec,
}

impl Ctx {
    fn q(&self, alphabet: &Alphabet) -> Result<u32> {
        match (self.dna, alphabet.q) {
            (true, None | Some(4)) => Ok(4),
            (true, Some(q)) => bail!("--dna needs q = 4, got {q}"),
            (false, Some(q)) => Ok(q),
            (false, None) => bail!("--q is required"),
        }
    }

    fn parse(&self, q: u32, text: &str) -> Result<Word> {
        let w = if self.dna {
            Word::parse_dna(text)?
        } else {
            Word::parse(q, text)?
        };
        Ok(w)
    }

    fn show(&self, w: &Word) -> String {
        match self.dna.then(|| w.to_dna_string()).flatten() {
            Some(s) => s,
            None => w.to_string(),
        }
    }

    fn words(&self, q: u32, inputs: &Inputs) -> Result<Vec<Word>> {
        let mut texts = inputs.words.clone();
        if let Some(path) = &inputs.input {
            texts.extend(content_lines(&read(path)?).map(str::to_string));
        }
        if texts.is_empty() {
            bail!("no words given");
        }
        texts.iter().map(|t| self.parse(q, t)).collect()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn json_line(v: Value) -> String {
    format!("{v}\n")
}

fn scalar(ctx: &Ctx, key: &str, value: impl ToString) -> String {
    let value = value.to_string();
    match ctx.format {
        Format::Json => json_line(json!({ key: value })),
        Format::Csv => format!("{key}\n{value}\n"),
        Format::Text => format!("{value}\n"),
    }
}

fn word_list(ctx: &Ctx, key: &str, words: &[Word]) -> String {
    let shown: Vec<String> = words.iter().map(|w| ctx.show(w)).collect();
    match ctx.format {
        Format::Json => json_line(json!({ key: shown })),
        Format::Csv => std::iter::once(key.to_string())
            .chain(shown)
            .map(|l| l + "\n")
            .collect(),
        Format::Text => shown.into_iter().map(|l| l + "\n").collect(),
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

fn report_json(r: &BoundReport) -> Value {
    json!({
        "q": r.q,
        "n": r.n,
        "ell": r.ell,
        "exact_rate": opt(r.exact_rate()),
        "addressable_rate": opt(r.addressable_rate()),
        "debruijn_rate": opt(r.debruijn_rate()),
        "simplified_rate": opt(r.simplified_rate()),
        "upper_rate": r.upper_rate(),
    })
}

fn reports(ctx: &Ctx, rows: &[BoundReport]) -> String {
    match ctx.format {
        Format::Json => json_line(Value::Array(rows.iter().map(report_json).collect())),
        _ => {
            let mut out = format!("{CSV_HEADER}\n");
            for r in rows {
                out.push_str(&r.csv_row());
                out.push('\n');
            }
            out
        }
    }
}

fn bounds_text(r: &BoundReport) -> String {
    let mut out = format!("q={} n={} ell={}\n", r.q, r.n, r.ell);
    let rows = [
        ("exact", r.exact_logq),
        ("addressable", r.addressable_logq),
        ("debruijn", r.debruijn_logq),
        ("simplified", r.simplified_logq),
        ("upper", Some(r.upper_logq)),
    ];
    for (name, v) in rows {
        match v {
            Some(v) => writeln!(out, "{name:<12} log_q={v:.6} rate={:.6}", v / r.n as f64),
            None => writeln!(out, "{name:<12} not applicable"),
        }
        .unwrap();
    }
    out
}

fn book(q: u32, a: usize, blocks: Option<usize>) -> Result<AddressBook> {
    let full = canonical_addresses(q, a, DEFAULT_BOOK_BUDGET)?;
    Ok(match blocks {
        Some(m) => full.first(m)?,
        None => full,
    })
}

fn blocks_from(len: usize, block: usize, what: &str) -> Result<usize> {
    if block == 0 || len == 0 || !len.is_multiple_of(block) {
        bail!("{what} length {len} is not a positive multiple of {block}");
    }
    Ok(len / block)
}

fn code(ctx: &Ctx, args: &AddressArgs, encoding: bool) -> Result<String> {
    let q = ctx.q(&args.alphabet)?;
    let ell = args.ell;
    let mut out = Vec::new();
    for w in ctx.words(q, &args.inputs)? {
        let result = match (args.n, args.a) {
            (Some(n), _) if encoding => encode2_padded(&w, q, n, ell)?,
            (Some(n), _) => {
                if w.len() != n {
                    bail!("word length {} differs from --n {n}", w.len());
                }
                decode2_padded(&w, ell)?
            }
            (None, Some(a)) => {
                if 2 * a > ell {
                    bail!("address length {a} needs 2a <= ell, got ell={ell}");
                }
                if encoding {
                    let m = blocks_from(w.len(), ell - a, "data")?;
                    encode2(&w, &book(q, a, Some(m))?, ell)?
                } else {
                    let m = blocks_from(w.len(), ell, "codeword")?;
                    decode2(&w, &book(q, a, Some(m))?, ell)?
                }
            }
            (None, None) => unreachable!("clap requires --a or --n"),
        };
        out.push(result);
    }
    Ok(word_list(
        ctx,
        if encoding { "codewords" } else { "data" },
        &out,
    ))
}

fn prefix(ctx: &Ctx, args: &PrefixArgs, encoding: bool) -> Result<String> {
    let q = ctx.q(&args.alphabet)?;
    let params = PrefixCodecParams::new(q, args.n, args.ell)?;
    let out = ctx
        .words(q, &args.inputs)?
        .iter()
        .map(|w| {
            if encoding {
                encode1(w, &params)
            } else {
                decode1(w, &params)
            }
        })
        .collect::<profilecode::Result<Vec<_>>>()?;
    Ok(word_list(
        ctx,
        if encoding { "codewords" } else { "data" },
        &out,
    ))
}

fn bag_text(ctx: &Ctx, header: &[String], bag: &ReadBag) -> String {
    let mut out: String = header.iter().map(|h| format!("# {h}\n")).collect();
    for r in bag.reads() {
        out.push_str(&ctx.show(r));
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Result<String> {
    let ctx = Ctx {
        dna: cli.dna,
        format: cli.format,
        exec: if cli.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
    };
    let out = match cli.command {
        Command::Word(cmd) => match cmd {
            WordCmd::Period { alphabet, word } => {
                let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
                scalar(&ctx, "min_period", min_period(&x))
            }
            WordCmd::Root { alphabet, word } => {
                let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
                word_list(&ctx, "root", &[root(&x)])
            }
            WordCmd::Conjugate { alphabet, x, y } => {
                let q = ctx.q(&alphabet)?;
                let (x, y) = (ctx.parse(q, &x)?, ctx.parse(q, &y)?);
                scalar(&ctx, "root_conjugate", root_conjugate(&x, &y)?)
            }
            WordCmd::Lyndon { alphabet, word } => {
                let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
                scalar(&ctx, "lyndon", is_lyndon(&x))
            }
            WordCmd::Class {
                alphabet,
                ell,
                word,
            } => {
                let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
                word_list(&ctx, "representative", &[class_representative(&x, ell)?])
            }
        },
        Command::Profile(cmd) => match cmd {
            ProfileCmd::Compute {
                alphabet,
                ell,
                inputs,
            } => {
                let q = ctx.q(&alphabet)?;
                let words = ctx.words(q, &inputs)?;
                let profiles = words
                    .iter()
                    .map(|x| profile(x, ell))
                    .collect::<profilecode::Result<Vec<_>>>()?;
                match ctx.format {
                    Format::Json => {
                        let items = words
                            .iter()
                            .zip(&profiles)
                            .map(|(x, p)| {
                                let counts: Map<String, Value> = p
                                    .iter()
                                    .map(|(g, c)| (ctx.show(&g), Value::from(c)))
                                    .collect();
                                json!({ "word": ctx.show(x), "ell": ell, "profile": counts })
                            })
                            .collect();
                        json_line(Value::Array(items))
                    }
                    Format::Csv => {
                        let mut out = String::from("word,gram,count\n");
                        for (x, p) in words.iter().zip(&profiles) {
                            for (g, c) in p.iter() {
                                writeln!(out, "{},{},{c}", ctx.show(x), ctx.show(&g)).unwrap();
                            }
                        }
                        out
                    }
                    Format::Text => profiles
                        .iter()
                        .map(|p| {
                            p.iter()
                                .map(|(g, c)| format!("{}:{c}\n", ctx.show(&g)))
                                .collect::<String>()
                        })
                        .collect::<Vec<_>>()
                        .join("\n"),
                }
            }
            ProfileCmd::Equiv {
                alphabet,
                ell,
                x,
                y,
            } => {
                let q = ctx.q(&alphabet)?;
                let (x, y) = (ctx.parse(q, &x)?, ctx.parse(q, &y)?);
                scalar(&ctx, "equivalent", profiles_equal(&x, &y, ell)?)
            }
            ProfileCmd::Support {
                alphabet,
                ell,
                word,
            } => {
                let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
                let grams: Vec<Word> = profile(&x, ell)?.support().into_iter().collect();
                word_list(&ctx, "support", &grams)
            }
        },
        Command::Enumerate(cmd) => match cmd {
            EnumerateCmd::Exact(p) => scalar(&ctx, "count", exact_count_small_n(p.q, p.n, p.ell)?),
            EnumerateCmd::Oracle { point: p, budget } => {
                let budget = budget.unwrap_or_else(enumeration_budget);
                scalar(
                    &ctx,
                    "count",
                    oracle_count(p.q, p.n, p.ell, budget, ctx.exec)?,
                )
            }
            EnumerateCmd::Upper(p) => scalar(&ctx, "upper", upper_count_small_n(p.q, p.n, p.ell)?),
            EnumerateCmd::Lyndon { q, r } => {
                if !(2..=profilecode::word::MAX_ALPHABET).contains(&q) {
                    return Err(Error::InvalidAlphabet(q).into());
                }
                if r == 0 {
                    bail!("Lyndon word length must be positive");
                }
                scalar(&ctx, "count", lyndon_count(q, r))
            }
        },
        Command::Bounds(p) => {
            let r = bound_report(p.q, p.n, p.ell)?;
            match ctx.format {
                Format::Text => bounds_text(&r),
                _ => reports(&ctx, &[r]),
            }
        }
        Command::Rates(cmd) => {
            let rows = match cmd {
                RatesCmd::Sweep {
                    q,
                    ell,
                    n_min,
                    n_max,
                    per_decade,
                } => sweep_n(q, ell, n_min, n_max, per_decade, ctx.exec)?,
                RatesCmd::SweepEll {
                    q,
                    n,
                    ell_min,
                    ell_max,
                    per_decade,
                } => sweep_ell(q, n, ell_min, ell_max, per_decade, ctx.exec)?,
            };
            reports(&ctx, &rows)
        }
        Command::Encode1(args) => prefix(&ctx, &args, true)?,
        Command::Decode1(args) => prefix(&ctx, &args, false)?,
        Command::Encode2(args) => code(&ctx, &args, true)?,
        Command::Decode2(args) => code(&ctx, &args, false)?,
        Command::Addressable(AddressableCmd::Validate {
            alphabet,
            ell,
            a,
            word,
        }) => {
            let q = ctx.q(&alphabet)?;
            let x = ctx.parse(q, &word)?;
            let m = blocks_from(x.len(), ell, "word")?;
            scalar(
                &ctx,
                "addressable",
                is_addressable(&x, &book(q, a, Some(m))?, ell)?,
            )
        }
        Command::Fragment {
            alphabet,
            ell,
            word,
        } => {
            let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
            bag_text(&ctx, &[], &fragment(&x, ell)?)
        }
        Command::Channel {
            drop,
            seed,
            q,
            reads,
        } => {
            let q = if ctx.dna { 4 } else { q.unwrap_or(10) };
            let bag = ReadBag::parse_lines(&read(&reads)?, |l| ctx.parse(q, l).map_err(to_parse))?;
            let kept = drop_reads(&bag, drop, seed)?;
            bag_text(
                &ctx,
                &[format!("seed: {seed}"), format!("dropped: {drop}")],
                &kept,
            )
        }
        Command::Assemble {
            alphabet,
            ell,
            a,
            blocks,
            first_block,
            last_block,
            reads,
        } => {
            let q = ctx.q(&alphabet)?;
            let book = book(q, a, Some(blocks))?;
            let params = match (first_block, last_block) {
                (None, None) => AssemblyParams::with_default_boundaries(book, ell)?,
                (Some(f), Some(l)) => {
                    AssemblyParams::new(book, ell, ctx.parse(q, &f)?, ctx.parse(q, &l)?)?
                }
                _ => bail!("give both --first-block and --last-block or neither"),
            };
            let bag = ReadBag::parse_lines(&read(&reads)?, |l| ctx.parse(q, l).map_err(to_parse))?;
            let x = assemble(&bag, &params)?;
            word_list(&ctx, "codeword", &[x])
        }
        Command::Debruijn(cmd) => match cmd {
            DebruijnCmd::Check {
                alphabet,
                ell,
                word,
            } => {
                let x = ctx.parse(ctx.q(&alphabet)?, &word)?;
                let partial = is_partial_debruijn(&x, ell)?;
                let complete = is_complete_debruijn(&x, ell)?;
                match ctx.format {
                    Format::Json => json_line(json!({ "partial": partial, "complete": complete })),
                    Format::Csv => format!("partial,complete\n{partial},{complete}\n"),
                    Format::Text => format!("partial {partial}\ncomplete {complete}\n"),
                }
            }
            DebruijnCmd::Count { q, ell } => scalar(
                &ctx,
                "count",
                complete_debruijn_count(q, ell, DEFAULT_BIGCOUNT_BITS)?,
            ),
            DebruijnCmd::Census {
                q,
                n,
                ell,
                complete,
                budget,
            } => {
                let budget = budget.unwrap_or_else(enumeration_budget);
                if complete {
                    scalar(
                        &ctx,
                        "census",
                        complete_debruijn_census(q, ell, budget, ctx.exec)?,
                    )
                } else {
                    let n = n.expect("clap requires --n without --complete");
                    let census = partial_debruijn_census(q, n, ell, budget, ctx.exec)?;
                    let lower = maurer_partial_count_lower(q, n, ell)?;
                    match ctx.format {
                        Format::Json => json_line(
                            json!({ "census": census, "maurer_lower": lower.to_string() }),
                        ),
                        Format::Csv => format!("census,maurer_lower\n{census},{lower}\n"),
                        Format::Text => format!("census {census}\nmaurer_lower {lower}\n"),
                    }
                }
            }
        },
    };
    Ok(out)
}

fn to_parse(e: anyhow::Error) -> Error {
    match e.downcast::<Error>() {
        Ok(e) => e,
        Err(e) => Error::Parse(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(fail @ Error::AssemblyFail(_)) => eprintln!("{fail}"),
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}
