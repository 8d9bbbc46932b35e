//! Command-line front end: decide a manifold description, verify a
//! certificate against it, assemble double covers, and answer conjugacy
//! queries in free products of cyclic groups.
//!
//! Exit codes: 0 success; 2 unreadable or malformed input; 3 the input is
//! valid JSON but describes nothing the operation applies to; 4 internal
//! error; 5 certificate verification failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use loopcert::certify::{self, genword_to_nf, nf_to_genword};
use loopcert::covers::{
    annulus_cover, assemble_double_cover, orientation_double_cover, pants_cover, unfold_cover,
    CoverRecipe,
};
use loopcert::decide::{decide, explain, DecideError};
use loopcert::decomposition::{normalize_moebius, validate, DecompositionGraph, Summand};
use loopcert::docfmt;
use loopcert::freeprod::{are_conjugate, oracle_conjugate_search, NFWord};
use loopcert::presentations::GenWord;

#[derive(Parser)]
#[command(
    name = "loopcert",
    version,
    about = "Certified loop-product nontriviality decisions for closed 3-manifold descriptions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a manifold description and write its certificate.
    Classify {
        /// Manifold description document (JSON).
        spec: PathBuf,
        /// Where to write the certificate (default: the description path
        /// with its extension replaced by `cert.json`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the certificate JSON on stdout instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Replay a certificate against a manifold description.
    Verify {
        /// Manifold description document (JSON).
        spec: PathBuf,
        /// Certificate document (JSON).
        certificate: PathBuf,
        /// Print the outcome as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Assemble a double cover of the glued summand or one of its pieces.
    Cover {
        /// Manifold description document (JSON).
        spec: PathBuf,
        /// Cover recipe name.
        #[arg(long)]
        recipe: String,
        /// Piece index, for piece-level recipes.
        #[arg(long, default_value_t = 0)]
        piece: usize,
        /// Boundary slot covered with degree 2 by the pants recipe.
        #[arg(long, default_value_t = 0)]
        involution_slot: u32,
        /// Where to write the cover document (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide conjugacy of two words in a free product of cyclic groups.
    Oracle {
        /// Group syntax, e.g. `Z2*Z3` or `Z*Z5`; factor i is generator g<i>.
        group: String,
        /// First word, e.g. `g1^1.g2^-1` (use `1` for the identity).
        w1: String,
        /// Second word.
        w2: String,
        /// Cross-check against the bounded brute-force search.
        #[arg(long)]
        max_len: Option<usize>,
    },
}

enum Failure {
    /// Exit 2: the input cannot be read or parsed.
    Usage(String),
    /// Exit 3: well-formed input the operation does not apply to.
    NotApplicable(String),
    /// Exit 4: an internal invariant broke.
    Internal(String),
    /// Exit 5: the certificate does not check out (details on stdout).
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NotApplicable(_) => 3,
            Failure::Internal(_) => 4,
            Failure::Verification => 5,
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the reader closes the pipe (`loopcert ... | head`),
    // like other line-oriented tools, instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) | Failure::NotApplicable(msg) | Failure::Internal(msg) => {
                    eprintln!("error: {msg}");
                }
                Failure::Verification => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Classify { spec, out, json } => cmd_classify(&spec, out, json),
        Command::Verify {
            spec,
            certificate,
            json,
        } => cmd_verify(&spec, &certificate, json),
        Command::Cover {
            spec,
            recipe,
            piece,
            involution_slot,
            out,
        } => cmd_cover(&spec, &recipe, piece, involution_slot, out),
        Command::Oracle {
            group,
            w1,
            w2,
            max_len,
        } => cmd_oracle(&group, &w1, &w2, max_len),
    }
}

fn read_manifold(path: &Path) -> Result<loopcert::decomposition::ManifoldSpec, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let doc = docfmt::parse_spec(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(doc.manifold)
}

fn cmd_classify(spec_path: &Path, out: Option<PathBuf>, json: bool) -> Result<(), Failure> {
    let manifold = read_manifold(spec_path)?;
    let cert = decide(&manifold).map_err(|e| match e {
        DecideError::Invalid(_) => Failure::NotApplicable(e.to_string()),
        DecideError::Internal(_) => Failure::Internal(e.to_string()),
    })?;
    let text = docfmt::certificate_to_string(&cert);
    let out_path = out.unwrap_or_else(|| spec_path.with_extension("cert.json"));
    fs::write(&out_path, &text)
        .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", out_path.display())))?;
    if json {
        print!("{text}");
    } else {
        print!("{}", explain(&cert));
        println!("certificate: {}", out_path.display());
    }
    Ok(())
}

fn cmd_verify(spec_path: &Path, cert_path: &Path, json: bool) -> Result<(), Failure> {
    let manifold = read_manifold(spec_path)?;
    let cert_text = fs::read_to_string(cert_path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", cert_path.display())))?;
    let cert = docfmt::parse_certificate(&cert_text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", cert_path.display())))?;
    let outcome = certify::verify(&cert, &manifold);
    if json {
        let value = serde_json::json!({
            "passed": outcome.passed(),
            "checks": outcome.checks,
            "errors": outcome.errors,
        });
        print!("{}", docfmt::to_canonical_pretty(&value));
    } else {
        println!("verdict: {}", cert.verdict.label());
        for check in &outcome.checks {
            println!("ok: {check}");
        }
        for error in &outcome.errors {
            println!("error: {error}");
        }
        println!(
            "verification: {}",
            if outcome.passed() { "PASS" } else { "FAIL" }
        );
    }
    if outcome.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

/// The glued summand a cover recipe applies to, with one-sided solid tori
/// already rewritten.
fn glued_summand(
    manifold: &loopcert::decomposition::ManifoldSpec,
) -> Result<DecompositionGraph, Failure> {
    let graphs: Vec<&DecompositionGraph> = manifold
        .summands
        .iter()
        .filter_map(|s| match s {
            Summand::Irreducible { graph } => Some(graph),
            _ => None,
        })
        .collect();
    match graphs.as_slice() {
        [graph] => Ok(normalize_moebius(graph).0),
        _ => Err(Failure::NotApplicable(
            "cover recipes apply to a description with exactly one glued summand".into(),
        )),
    }
}

fn cmd_cover(
    spec_path: &Path,
    recipe_name: &str,
    piece: usize,
    involution_slot: u32,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let recipe = CoverRecipe::from_name(recipe_name).ok_or_else(|| {
        let names: Vec<&str> = CoverRecipe::ALL.iter().map(CoverRecipe::name).collect();
        Failure::Usage(format!(
            "unknown recipe `{recipe_name}`; expected one of: {}",
            names.join(", ")
        ))
    })?;
    let manifold = read_manifold(spec_path)?;
    if let Err(errors) = validate(&manifold) {
        let msgs: Vec<String> = errors.iter().map(ToString::to_string).collect();
        return Err(Failure::NotApplicable(format!(
            "invalid manifold description: {}",
            msgs.join("; ")
        )));
    }
    let graph = glued_summand(&manifold)?;

    let text = if recipe.is_piece_level() {
        let node = graph.pieces.get(piece).ok_or_else(|| {
            Failure::NotApplicable(format!(
                "piece {piece} out of range ({} pieces)",
                graph.pieces.len()
            ))
        })?;
        let seifert = node.as_seifert().ok_or_else(|| {
            Failure::NotApplicable(format!("piece {piece} is not fibered"))
        })?;
        let cover = match recipe {
            CoverRecipe::Orientation => orientation_double_cover(seifert),
            CoverRecipe::Pants => pants_cover(seifert, involution_slot),
            CoverRecipe::Unfold => unfold_cover(seifert),
            CoverRecipe::Annulus => annulus_cover(seifert),
            _ => unreachable!("piece-level recipes are the four above"),
        }
        .map_err(|e| Failure::NotApplicable(e.to_string()))?;
        docfmt::piece_cover_to_string(recipe, seifert, &cover)
    } else {
        let cover = assemble_double_cover(&graph, recipe)
            .map_err(|e| Failure::NotApplicable(e.to_string()))?;
        docfmt::graph_cover_to_string(&cover)
    };

    match out {
        Some(path) => {
            fs::write(&path, &text).map_err(|e| {
                Failure::Internal(format!("cannot write {}: {e}", path.display()))
            })?;
            println!("cover: {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_oracle(
    group_text: &str,
    w1: &str,
    w2: &str,
    max_len: Option<usize>,
) -> Result<(), Failure> {
    let group = docfmt::parse_group(group_text).map_err(|e| Failure::Usage(e.to_string()))?;
    let parse_word = |text: &str| -> Result<NFWord, Failure> {
        let gen = GenWord::from_str(text).map_err(|e| Failure::Usage(e.to_string()))?;
        genword_to_nf(&group, &gen).map_err(|e| Failure::Usage(e.to_string()))
    };
    let a = parse_word(w1)?;
    let b = parse_word(w2)?;
    let exact = are_conjugate(&a, &b).map_err(|e| Failure::Internal(e.to_string()))?;
    match &exact {
        Some(conjugator) => {
            println!("conjugate: yes");
            println!("conjugator: {}", nf_to_genword(conjugator));
        }
        None => println!("conjugate: no"),
    }
    if let Some(max_len) = max_len {
        let found = oracle_conjugate_search(&a, &b, max_len)
            .map_err(|e| Failure::Internal(e.to_string()))?;
        let agree = found.is_some() == exact.is_some();
        println!("search: {}", if agree { "agree" } else { "disagree" });
        if !agree {
            return Err(Failure::Internal(
                "exact decision and bounded search disagree".into(),
            ));
        }
    }
    Ok(())
}
