use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "eden", version, about = "Garden of Eden toolkit for subshifts and principal actions")]
pub struct Cli {
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report (or the survey TSV) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Add wall-clock time to JSON reports; off by default so reports are reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cellular automata between subshifts.
    #[command(subcommand)]
    Ca(CaCommand),
    /// Subshift summaries.
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Strong irreducibility, weak specification and independence.
    #[command(subcommand)]
    Spec(SpecCommand),
    /// Topological entropy of a one-dimensional subshift.
    Entropy(EntropyArgs),
    /// Principal algebraic actions of ℤ.
    #[command(subcommand)]
    Principal(PrincipalCommand),
}

#[derive(Subcommand, Debug)]
pub enum CaCommand {
    /// Surjectivity, pre-injectivity and injectivity with witnesses.
    Classify(ClassifyArgs),
    /// Classify every endomorphism with a given neighborhood.
    Survey(SurveyArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// `eca:<n>`, `linear:<coeffs>@<offset>%<m>`, or a rule file (needs --shift).
    pub rule: String,
    /// Domain subshift for a rule file: corpus name or path.
    #[arg(long)]
    pub shift: Option<String>,
    /// Codomain subshift; defaults to the domain.
    #[arg(long)]
    pub codomain: Option<String>,
    /// Largest box side for the bounded searches used in dimension two.
    #[arg(long)]
    pub bounded: Option<usize>,
    /// Seed for replaying an erasable pair in random surroundings.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SurveyArgs {
    /// Corpus name or subshift file.
    pub shift: String,
    /// Symmetric neighborhood `[-r, r]`.
    #[arg(long, conflicts_with = "neighborhood")]
    pub radius: Option<i64>,
    /// Neighborhood interval `lo..hi`.
    #[arg(long)]
    pub neighborhood: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum ShiftCommand {
    /// Kind, presentation size, word counts, gap and entropy.
    Info {
        shift: String,
        /// Word counts are listed up to this length.
        #[arg(long, default_value_t = 8)]
        words: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpecCommand {
    /// Strong-irreducibility gap with a certificate or failing pairs.
    Gap {
        shift: String,
        #[arg(long, default_value_t = 10)]
        max_gap: usize,
        /// Longest word the certificate may need.
        #[arg(long, default_value_t = 16)]
        max_len: usize,
    },
    /// Exhaustive weak-specification check for small box families.
    Wspec {
        shift: String,
        /// Metric scale, e.g. `0.25` or `2^-2`.
        #[arg(long, default_value = "1")]
        eps: String,
        /// Check this gap; without it the least gap up to --max-gap is searched.
        #[arg(long)]
        gap: Option<usize>,
        #[arg(long, default_value_t = 10)]
        max_gap: usize,
        #[arg(long, default_value_t = 5)]
        max_box_len: usize,
    },
    /// Independence density of a tuple of cylinders over a window.
    Independence {
        shift: String,
        /// Window `lo..hi` or a list of cells `0,2,4`.
        #[arg(long, default_value = "0..4")]
        window: String,
        /// Cylinder words at the origin, separated by `|`.
        #[arg(long, default_value = "0|1")]
        cylinders: String,
    },
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    pub shift: String,
    /// Transfer-matrix value (the default).
    #[arg(long, conflicts_with = "estimate")]
    pub exact: bool,
    /// Separated-set estimate at this n.
    #[arg(long)]
    pub estimate: Option<u64>,
    /// Scale for --estimate.
    #[arg(long, default_value = "1")]
    pub eps: String,
    /// Lower bound on h(SHIFT) − h(Z) for a proper subshift Z.
    #[arg(long, value_name = "Z")]
    pub below: Option<String>,
    /// Scale for --below; defaults to the largest admissible value.
    #[arg(long)]
    pub eta: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum PrincipalCommand {
    /// Invertibility in ℓ¹(ℤ), with roots and margin.
    Check {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// The fundamental homoclinic point `f⁻¹ mod 1`.
    Homoclinic {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value = "1e-9")]
        tol: String,
        /// Half-width of the reported range (at least what --tol needs).
        #[arg(long)]
        range: Option<u64>,
    },
    /// Glue target windows into one point within eps.
    Glue {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// JSON list of `{"lo": .., "hi": .., "combination": [[shift, coeff], ..]}`.
        targets: PathBuf,
        #[arg(long, default_value = "2^-6")]
        eps: String,
    },
}
