//! `opalg`: build and validate groupoids, cocycles and Fell bundles, compute
//! norms and Wedderburn blocks, and run the verification suites.
//!
//! Exit codes: 0 success, 1 a suite failed, 2 invalid input, 3 internal
//! inconsistency.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opalg::{Error, NumericPolicy};

#[derive(Parser)]
#[command(
    name = "opalg",
    version,
    about = "Finite groupoid C*-algebras and their opposites"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Absolute tolerance for exact identities of scalar algebras.
    #[arg(long, global = true)]
    tol_exact: Option<f64>,
    /// Relative tolerance for norm equalities.
    #[arg(long, global = true)]
    tol_norm: Option<f64>,
    /// Master seed for sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random samples per suite.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Suppress summaries on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

impl Global {
    fn policy(&self) -> opalg::Result<NumericPolicy> {
        let mut p = NumericPolicy::default();
        if let Some(t) = self.tol_exact {
            p.exact_tol = t;
        }
        if let Some(t) = self.tol_norm {
            p.norm_tol = t;
        }
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if let Some(s) = self.samples {
            p.samples = s;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Clone)]
struct Out {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Groupoid files.
    #[command(subcommand)]
    Groupoid(GroupoidCmd),
    /// Haar systems.
    #[command(subcommand)]
    Haar(HaarCmd),
    /// Norms, regular representations and Wedderburn blocks.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// 2-cocycles with values in the N-th roots of unity.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Fell bundles.
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Verification suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum GroupoidCmd {
    /// Check the groupoid axioms (exit 2 on violations).
    Validate { file: PathBuf },
    #[command(subcommand)]
    Build(GroupoidBuild),
    /// Product of two groupoids.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// The opposite groupoid.
    Opposite {
        file: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum GroupoidBuild {
    /// Pair groupoid on n points.
    Pair {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Cyclic group of order n.
    Cyclic {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Group from a Cayley table file.
    Group {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Transformation groupoid of a group acting on a set.
    Action {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        act: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum HaarCmd {
    /// Attach counting measure.
    Counting {
        groupoid: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Attach w(g) = u(s(g)) from a unit-weight file.
    UnitWeights {
        groupoid: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// Check positivity and left invariance of the file's weights.
    Validate { groupoid: PathBuf },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// I-norm, reduced norm and full norm of a function (or of a section).
    Norms {
        #[arg(long)]
        groupoid: Option<PathBuf>,
        #[arg(long, required_unless_present = "section")]
        function: Option<PathBuf>,
        #[arg(long, requires = "section")]
        bundle: Option<PathBuf>,
        #[arg(long, requires = "bundle")]
        section: Option<PathBuf>,
    },
    /// Matrix of the regular representation at a unit.
    Rep {
        #[arg(long)]
        groupoid: Option<PathBuf>,
        #[arg(long)]
        function: PathBuf,
        /// Unit id.
        #[arg(long)]
        unit: String,
    },
    /// Block sizes of the C*-algebra.
    Wedderburn {
        #[arg(long)]
        groupoid: Option<PathBuf>,
        #[arg(long, conflicts_with = "bundle")]
        cocycle: Option<PathBuf>,
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct CocycleSource {
    /// Groupoid file; defaults to the cocycle file's "groupoid" reference.
    #[arg(long)]
    groupoid: Option<PathBuf>,
    /// Modulus; must agree with the file's "N" when both are present.
    #[arg(long = "N", alias = "n")]
    modulus: Option<u64>,
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Check normalization and the cocycle identity (exit 2 on violations).
    Validate {
        file: PathBuf,
        #[command(flatten)]
        src: CocycleSource,
    },
    /// The conjugate cocycle.
    Conjugate {
        file: PathBuf,
        #[command(flatten)]
        src: CocycleSource,
        #[command(flatten)]
        out: Out,
    },
    /// σᵒᵒ(g,h) = σ(h⁻¹,g⁻¹).
    Oo {
        file: PathBuf,
        #[command(flatten)]
        src: CocycleSource,
        #[command(flatten)]
        out: Out,
    },
    /// Decide whether two cocycles differ by a coboundary.
    Cohomologous {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        src: CocycleSource,
    },
}

#[derive(Subcommand)]
enum BundleCmd {
    /// Check the Fell bundle axioms (exit 2 on violations).
    Validate {
        file: PathBuf,
        #[arg(long)]
        groupoid: Option<PathBuf>,
    },
    #[command(subcommand)]
    Build(BundleBuild),
    /// The bundle 𝒜ᵒᵒ over the same groupoid.
    Oo {
        file: PathBuf,
        #[arg(long)]
        groupoid: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// The conjugate bundle.
    Conjugate {
        file: PathBuf,
        #[arg(long)]
        groupoid: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// The opposite bundle over the opposite groupoid.
    Opposite {
        file: PathBuf,
        #[arg(long)]
        groupoid: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum BundleBuild {
    /// Line bundle of a cocycle.
    Line {
        #[arg(long)]
        cocycle: PathBuf,
        #[command(flatten)]
        src: CocycleSource,
        #[command(flatten)]
        out: Out,
    },
    /// Bundle of a group action on a fiber algebra.
    Action {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        fiber: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Suite {
    T21,
    T3,
    Twist,
    Stab,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    #[arg(long)]
    groupoid: Option<PathBuf>,
    #[arg(long, conflicts_with = "cocycle")]
    bundle: Option<PathBuf>,
    #[arg(long)]
    cocycle: Option<PathBuf>,
    /// Size of the pair groupoid for the stabilization suite.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    out: Out,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::Inconsistency(_) | Error::NotCStar(_) => 3,
    }
}

fn configure_threads() -> opalg::Result<()> {
    let n = match std::env::var("OPALG_NUM_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("OPALG_NUM_THREADS={v:?} is not a count")))?,
        Err(_) => 0,
    };
    if n > 0 {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(cli.command, &cli.global));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
