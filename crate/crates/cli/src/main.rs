mod cmd;
mod desc;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use periodic_gf::verdict::{Class, DEFAULT_TAU};

#[derive(Parser)]
#[command(name = "pgf", version, about = "Periodic generalized functions and ultradistributions at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// `gevrey:<s>` or `file:<path>`.
    #[arg(long, default_value = "gevrey:1")]
    pub weights: String,
    #[arg(long, default_value = "roumieu", value_parser = parse_class)]
    pub class: Class,
    #[arg(long, default_value_t = 64)]
    pub nmax: usize,
    /// Coefficient range for truncations and sweeps.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Comma-separated `h` grid.
    #[arg(long)]
    pub h_grid: Option<String>,
    /// Comma-separated `λ` grid.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 1 on a negative verdict.
    #[arg(long)]
    pub assert: bool,
    /// Also write the growth table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_class(s: &str) -> Result<Class, String> {
    s.parse().map_err(|e: periodic_gf::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ClassifyMode {
    Moderate,
    Negligible,
    Regular,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ClassifyMethod {
    Full,
    Sup,
    Coef,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Demo {
    Schwartz,
}

#[derive(Subcommand)]
enum Command {
    /// Associated function values, (M.1)/(M.2) constants and the 2M(t) ≤ M(Ht) + log A check.
    Weights {
        #[arg(long)]
        gevrey: Option<f64>,
        /// Weight-spec file or a bare log M_p array.
        #[arg(long)]
        table: Option<String>,
        /// Points at which to report M(t).
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        t: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Moderate, negligible or regular verdict for a net.
    Classify {
        #[arg(long)]
        net: String,
        #[arg(long, value_enum, default_value = "moderate")]
        mode: ClassifyMode,
        #[arg(long, value_enum, default_value = "full")]
        method: ClassifyMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Coefficient rows of ι(f)_n for 0 ≤ n ≤ nmax.
    Embed {
        #[arg(long)]
        dist: String,
        #[arg(long, default_value = "dirichlet")]
        mollifier: String,
        #[command(flatten)]
        common: Common,
    },
    /// σ(fg) − ι(f)ι(g) and the embedding residual bound.
    Product {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "dirichlet")]
        mollifier: String,
        /// Allowed factor on (1+2πC)K.
        #[arg(long, default_value_t = 10.0)]
        slack: f64,
        #[command(flatten)]
        common: Common,
    },
    /// P(D) applied to a distribution or a net.
    Apply {
        /// `structure_beurling[:λ]`, `structure_roumieu`, `poly:a0,a1,…` or `file:<path>`.
        #[arg(long)]
        op: String,
        #[arg(long, conflicts_with = "net", required_unless_present = "net")]
        dist: Option<String>,
        #[arg(long)]
        net: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// f = P(D)g with g in a smaller class.
    Factorize {
        #[arg(long)]
        dist: String,
        /// Beurling parameter; without it the Roumieu form with r′ = k′ = j + 1 is used.
        #[arg(long)]
        lambda: Option<f64>,
        /// Class N_p of g; defaults to gevrey:<s+1> for Gevrey weights.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Regularity of ι(f) against the decay of f̂.
    Regularity {
        #[arg(long)]
        dist: String,
        #[arg(long, default_value = "dirichlet")]
        mollifier: String,
        #[command(flatten)]
        common: Common,
    },
    /// Demonstrations.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, common) = match cli.command {
        Command::Weights { gevrey, table, t, common } => (cmd::weights(gevrey, table.as_deref(), &t, &common), common),
        Command::Classify { net, mode, method, common } => (cmd::classify(&net, mode, method, &common), common),
        Command::Embed { dist, mollifier, common } => (cmd::embed_cmd(&dist, &mollifier, &common), common),
        Command::Product { f, g, mollifier, slack, common } => (cmd::product(&f, &g, &mollifier, slack, &common), common),
        Command::Apply { op, dist, net, common } => (cmd::apply(&op, dist.as_deref(), net.as_deref(), &common), common),
        Command::Factorize { dist, lambda, target, common } => (cmd::factorize(&dist, lambda, target.as_deref(), &common), common),
        Command::Regularity { dist, mollifier, common } => (cmd::regularity(&dist, &mollifier, &common), common),
        Command::Demo { which: Demo::Schwartz, common } => (cmd::demo_schwartz(&common), common),
    };
    match result.and_then(|r| cmd::emit(&r, &common)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
