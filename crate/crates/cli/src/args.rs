use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tailtrace", version, about = "Singular value functions, majorisation and Dixmier-type traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decreasing rearrangement μ of an operator
    Mu(Common),
    /// Hardy–Littlewood or tail majorisation of --op by --op2
    Majorize(Common),
    /// I_h norm and membership
    Norm(Common),
    /// τ_ω estimate on a limit surrogate
    Trace(Common),
    /// Existence criteria for tail-respecting functionals
    Criteria(Common),
    /// The non-member example with h(t) = 2/(1+t)
    Counterexample(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Mu(c)
            | Command::Majorize(c)
            | Command::Norm(c)
            | Command::Trace(c)
            | Command::Criteria(c)
            | Command::Counterexample(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Hl,
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum At {
    Infinity,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// file:<path>, matrix:<path>, steps:v1,v2,..., mu:neg-hprime, random-psd:<n>
    #[arg(long)]
    pub op: Option<String>,
    /// Second operator, same syntax as --op
    #[arg(long)]
    pub op2: Option<String>,
    /// power:<alpha>, logrec, exp, papertail, table:<path>
    #[arg(long, default_value = "logrec")]
    pub weight: String,
    /// logcesaro[:t=..], pd[:t=..,a=..], bracket
    #[arg(long, default_value = "logcesaro")]
    pub surrogate: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for random-psd operators
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Decades covered by sampled profiles
    #[arg(long, default_value_t = 12)]
    pub grid_decades: u32,
    /// Convergence tolerance of the surrogate
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Hl)]
    pub mode: Mode,
    /// Limit point for trace and criteria
    #[arg(long, value_enum, default_value_t = At::Infinity)]
    pub at: At,
}
