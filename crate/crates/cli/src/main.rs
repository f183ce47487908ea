use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use tww_core::approx::{approximate_twinwidth, ApproxOutcome};
use tww_core::contraction::{exact_twinwidth, verify_sequence, DEFAULT_SIZE_GUARD};
use tww_core::divisions::{
    find_mt_division, grid_rank, is_rich_division, verify_rank_latin_division, LatinCheck,
    RichCheck,
};
use tww_core::folog::{apply_interpretation, parse_formula, parse_interpretation, Evaluator, Signature, DEFAULT_ATOM_BUDGET};
use tww_core::io;
use tww_core::patterns::{
    decode_f, decode_matching_to_graph, encode_graph_as_matching, enumerate_slice, f_matrix_eta, f_matrix_s,
    growth_formula, ClassSpec, EncodingEta, OrderedMatching, PatternSymbol, Permutation, DEFAULT_SLICE_GUARD,
};
use tww_core::OrderedMatrix;

#[derive(Parser)]
#[command(name = "tww", version, about = "Twin-width certificates and ordered pattern classes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Largest k with a rank-k k-division
    Gridrank {
        matrix: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
    },
    /// Exact twin-width with a witness sequence (small matrices only)
    TwwExact {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIZE_GUARD)]
        guard: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rich division or bounded contraction sequence
    TwwApprox {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a contraction sequence and report its profile
    VerifySeq { matrix: PathBuf, sequence: PathBuf },
    /// Check that a division is k-rich
    VerifyRich {
        matrix: PathBuf,
        division: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Check a rank-k Latin division witness
    VerifyLatin {
        matrix: PathBuf,
        witness: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Look for a k-division with a non-zero entry in every zone
    MtFind {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print F_s(σ) or F_η(σ)
    GenPattern {
        #[arg(long, conflicts_with = "eta", required_unless_present = "eta")]
        s: Option<String>,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        /// draw the first row at the bottom
        #[arg(long)]
        bottom_first: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover σ from F_s(σ) or F_η(σ)
    DecodePattern {
        matrix: PathBuf,
        #[arg(long, conflicts_with = "eta", required_unless_present = "eta")]
        s: Option<String>,
        #[arg(long)]
        eta: Option<String>,
    },
    /// List the n-vertex members of a class
    GenClass {
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SLICE_GUARD)]
        guard: usize,
    },
    /// Count the n-vertex members of a class
    Growth {
        spec: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SLICE_GUARD)]
        guard: usize,
    },
    /// Encode a graph as an ordered matching
    EncodeMatching { graph: PathBuf },
    /// Decode an ordered matching back to its graph
    DecodeMatching {
        matching: PathBuf,
        /// use the first-order decoder instead of the direct one
        #[arg(long)]
        fo: bool,
    },
    /// Evaluate a formula on a structure
    FoEval {
        structure: PathBuf,
        formula: String,
        /// free variable values, 1-based, as name=value
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
    /// Apply an interpretation to a structure
    FoInterp { structure: PathBuf, interpretation: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] tww_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: tww_core::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use tww_core::Error as E;
        match self {
            CliError::Core(E::ResourceLimit(_)) | CliError::Input { source: E::ResourceLimit(_), .. } => 3,
            CliError::Core(E::Internal(_)) => 4,
            _ => 2,
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> tww_core::Result<T>) -> Res<T> {
    parse(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_matrix(path: &Path) -> Res<OrderedMatrix> {
    load(path, io::parse_matrix)
}

fn emit(out: &Option<PathBuf>, text: &str, report: &mut String) -> Res<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            writeln!(report, "certificate={}", path.display()).unwrap();
        }
        None => report.push_str(text),
    }
    Ok(())
}

fn one_line(p: &Permutation) -> String {
    p.one_line().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn encoding(s: &Option<String>, eta: &Option<String>) -> Res<EncodingEta> {
    match (s, eta) {
        (Some(s), _) => Ok(EncodingEta::for_symbol(PatternSymbol::parse(s)?)),
        (None, Some(eta)) => Ok(EncodingEta::parse(eta)?),
        (None, None) => Err(CliError::Usage("give --s or --eta".into())),
    }
}

fn run(cmd: Cmd, report: &mut String) -> Res<()> {
    let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(report, "{k}={v}").unwrap();
    match cmd {
        Cmd::Gridrank { matrix, max_k } => {
            let m = load_matrix(&matrix)?;
            kv("gridrank", &grid_rank(&m, max_k));
        }
        Cmd::TwwExact { matrix, guard, out } => {
            let m = load_matrix(&matrix)?;
            let (value, seq) = exact_twinwidth(&m, guard)?;
            let profile = verify_sequence(&m, &seq)?;
            if profile.max_overlap + profile.max_error != value {
                return Err(tww_core::Error::Internal("witness profile does not match the value".into()).into());
            }
            kv("tww", &value);
            kv("overlap", &profile.max_overlap);
            kv("error", &profile.max_error);
            emit(&out, &io::serialize_sequence(&seq), report)?;
        }
        Cmd::TwwApprox { matrix, k, out } => {
            let m = load_matrix(&matrix)?;
            match approximate_twinwidth(&m, k)? {
                ApproxOutcome::Rich { division, level } => {
                    if is_rich_division(&m, &division, level)? != RichCheck::Rich {
                        return Err(tww_core::Error::Internal("rich certificate failed".into()).into());
                    }
                    kv("outcome", &"RICH");
                    kv("level", &level);
                    emit(&out, &io::serialize_division(&division), report)?;
                }
                ApproxOutcome::Sequence { sequence, claimed, .. } => {
                    let profile = verify_sequence(&m, &sequence)?;
                    kv("outcome", &"SEQ");
                    kv("overlap", &profile.max_overlap);
                    kv("error", &profile.max_error);
                    kv("claimed_overlap", &claimed.0);
                    kv("claimed_error", &claimed.1);
                    emit(&out, &io::serialize_sequence(&sequence), report)?;
                }
            }
        }
        Cmd::VerifySeq { matrix, sequence } => {
            let m = load_matrix(&matrix)?;
            let seq = load(&sequence, |t| io::parse_sequence(t, m.n_rows(), m.n_cols()));
            match seq.and_then(|s| Ok(verify_sequence(&m, &s)?)) {
                Ok(p) => {
                    kv("valid", &true);
                    kv("overlap", &p.max_overlap);
                    kv("error", &p.max_error);
                }
                Err(CliError::Core(tww_core::Error::CertificateInvalid { at, msg }))
                | Err(CliError::Input {
                    source: tww_core::Error::CertificateInvalid { at, msg },
                    ..
                }) => {
                    kv("valid", &false);
                    kv("at", &at);
                    kv("reason", &msg);
                }
                Err(e) => return Err(e),
            }
        }
        Cmd::VerifyRich { matrix, division, k } => {
            let m = load_matrix(&matrix)?;
            let d = load(&division, |t| io::parse_division(t, m.n_rows(), m.n_cols()))?;
            match is_rich_division(&m, &d, k)? {
                RichCheck::Rich => kv("rich", &true),
                RichCheck::Violation { side, part, removed } => {
                    kv("rich", &false);
                    kv("side", &side.letter());
                    kv("part", &(part + 1));
                    let removed: Vec<String> = removed.iter().map(|x| (x + 1).to_string()).collect();
                    kv("removed", &removed.join(" "));
                }
            }
        }
        Cmd::VerifyLatin { matrix, witness, k } => {
            let m = load_matrix(&matrix)?;
            let w = load(&witness, |t| io::parse_latin_witness(t, m.n_rows(), m.n_cols()))?;
            let cell = |(i, j): (usize, usize)| format!("{} {}", i + 1, j + 1);
            match verify_rank_latin_division(&m, &w, k) {
                Ok(LatinCheck::Valid) => kv("valid", &true),
                Ok(LatinCheck::WrongMember { cell: c }) => {
                    kv("valid", &false);
                    kv("cell", &cell(c));
                    kv("reason", &"zone is not the declared N_k member");
                }
                Ok(LatinCheck::CrossNotConstant { cell: c, other }) => {
                    kv("valid", &false);
                    kv("cell", &cell(c));
                    kv("other", &cell(other));
                    kv("reason", &"cross zone is not constant");
                }
                Err(tww_core::Error::CertificateInvalid { at, msg }) => {
                    kv("valid", &false);
                    kv("at", &at);
                    kv("reason", &msg);
                }
                Err(e) => return Err(e.into()),
            }
        }
        Cmd::MtFind { matrix, k, out } => {
            let m = load_matrix(&matrix)?;
            match find_mt_division(&m, k)? {
                Some(d) => {
                    if !mt_ok(&m, &d) {
                        return Err(tww_core::Error::Internal("division has an all-zero zone".into()).into());
                    }
                    kv("found", &true);
                    emit(&out, &io::serialize_division(&d), report)?;
                }
                None => kv("found", &false),
            }
        }
        Cmd::GenPattern {
            s,
            eta,
            sigma,
            bottom_first,
            out,
        } => {
            let sigma = Permutation::parse(&sigma)?;
            let m = match &s {
                Some(s) => f_matrix_s(PatternSymbol::parse(s)?, &sigma)?,
                None => f_matrix_eta(encoding(&s, &eta)?, &sigma)?,
            };
            let text = if bottom_first {
                io::render_bottom_first(&m)
            } else {
                io::serialize_matrix(&m)
            };
            emit(&out, &text, report)?;
        }
        Cmd::DecodePattern { matrix, s, eta } => {
            let m = load_matrix(&matrix)?;
            match decode_f(encoding(&s, &eta)?, &m) {
                Some(p) => {
                    kv("decoded", &true);
                    kv("sigma", &one_line(&p));
                }
                None => kv("decoded", &false),
            }
        }
        Cmd::GenClass { spec, n, guard } => {
            let graphs = enumerate_slice(ClassSpec::parse(&spec)?, n, guard)?;
            kv("count", &graphs.len());
            for (i, g) in graphs.iter().enumerate() {
                writeln!(report, "# graph {}", i + 1).unwrap();
                report.push_str(&io::serialize_graph(g));
            }
        }
        Cmd::Growth { spec, n, guard } => {
            let class = ClassSpec::parse(&spec)?;
            kv("count", &enumerate_slice(class, n, guard)?.len());
            if class
                == (ClassSpec::Matching {
                    s: PatternSymbol::Eq,
                    lambda: false,
                    rho: false,
                })
            {
                kv("formula", &growth_formula(n as u32));
            }
        }
        Cmd::EncodeMatching { graph } => {
            let g = load(&graph, io::parse_graph)?;
            let h = encode_graph_as_matching(&g);
            report.push_str(&io::serialize_graph(&h.to_graph()?));
        }
        Cmd::DecodeMatching { matching, fo } => {
            let h = load(&matching, io::parse_graph)?;
            let h = OrderedMatching::from_graph(&h)
                .ok_or_else(|| CliError::Usage(format!("{}: not an ordered matching", matching.display())))?;
            let g = if fo {
                Some(tww_core::folog::decode_matching_fo(&h)?)
            } else {
                decode_matching_to_graph(&h)
            };
            let g = g.ok_or_else(|| CliError::Usage(format!("{}: not a graph encoding", matching.display())))?;
            report.push_str(&io::serialize_graph(&g));
        }
        Cmd::FoEval {
            structure,
            formula,
            assign,
        } => {
            let s = load(&structure, io::parse_structure)?;
            let f = parse_formula(&formula, &Signature::of(&s))?;
            let mut vals = Vec::new();
            for a in &assign {
                let (name, v) = a
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--assign expects name=value, got {a:?}")))?;
                let v: usize = v
                    .parse()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| CliError::Usage(format!("bad element {v:?}")))?;
                vals.push((name.to_string(), v - 1));
            }
            let vals: Vec<(&str, usize)> = vals.iter().map(|(n, v)| (n.as_str(), *v)).collect();
            kv("value", &Evaluator::new(&s, &f, DEFAULT_ATOM_BUDGET)?.eval(&vals)?);
        }
        Cmd::FoInterp {
            structure,
            interpretation,
        } => {
            let s = load(&structure, io::parse_structure)?;
            let it = load(&interpretation, |t| parse_interpretation(t, &Signature::of(&s)))?;
            report.push_str(&io::serialize_structure(&apply_interpretation(&s, &it)?));
        }
    }
    Ok(())
}

fn mt_ok(m: &OrderedMatrix, d: &tww_core::divisions::Division) -> bool {
    d.row_parts().iter().all(|rows| {
        d.col_parts()
            .iter()
            .all(|cols| rows.clone().any(|i| cols.clone().any(|j| m.is_one(i, j))))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 1,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut report = String::new();
    match run(cli.cmd, &mut report) {
        Ok(()) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
