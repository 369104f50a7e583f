use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use summa_core::scalar::{parse_rational, q_to_f64};
use summa_core::{Exponent, Q};

pub(crate) fn rational(s: &str) -> Result<Q, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

pub(crate) fn real(s: &str) -> Result<f64, String> {
    parse_rational(s).map(|x| q_to_f64(&x)).map_err(|e| e.to_string())
}

pub(crate) fn exponent(s: &str) -> Result<Exponent, String> {
    Exponent::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum NormsCmd {
    /// `‖f‖_p` of a real sequence.
    Lp {
        #[arg(long, value_parser = rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<Q>,
        #[arg(long, value_parser = exponent)]
        p: Exponent,
    },
    /// `‖fg‖₁ ≤ ‖f‖_p ‖g‖_q`; `q` defaults to the conjugate of `p`.
    Holder {
        #[arg(long, value_parser = rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        f: Vec<Q>,
        #[arg(long, value_parser = rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        g: Vec<Q>,
        #[arg(long, value_parser = exponent)]
        p: Exponent,
        #[arg(long, value_parser = exponent)]
        q: Option<Exponent>,
    },
    /// `‖f‖_r ≤ ‖f‖_p^t ‖f‖_q^{1−t}` for `p < r < q`.
    Interpolate {
        #[arg(long, value_parser = rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<Q>,
        #[arg(long, value_parser = exponent)]
        p: Exponent,
        #[arg(long, value_parser = exponent)]
        q: Exponent,
        #[arg(long, value_parser = exponent)]
        r: Exponent,
    },
    /// `(a+b)^p ≤ a^p + b^p` for `0 < p ≤ 1`.
    Subadd {
        #[arg(long, value_parser = rational)]
        a: Q,
        #[arg(long, value_parser = rational)]
        b: Q,
        #[arg(long, value_parser = exponent)]
        p: Exponent,
    },
}

/// A family read from JSON or built from a named generator.
#[derive(Clone, Debug, Args)]
pub struct FamilySource {
    /// JSON family: `{kind?, terms, norm?}` or `{generator, params, horizon}`.
    #[arg(long, conflicts_with = "family")]
    pub terms: Option<PathBuf>,
    /// Generator name: geometric, alternating-harmonic, harmonic, power, zero,
    /// vector-geometric, harmonic-basis.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub ratio: Option<Q>,
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub scale: Option<Q>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long = "family-p")]
    pub family_p: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
}

#[derive(Debug, Subcommand)]
pub enum SumsCmd {
    /// `sup ‖Σ_{j∈B} f_j‖` over finite `B`.
    Ynorm(FamilySource),
    /// `sup ‖Σ ε_j f_j‖` over signs.
    Znorm(FamilySource),
    /// Root-of-unity grid norm.
    Wnorm {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
    /// `Σ_{j∈B} f_j` for 1-based indices.
    Subset {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
    },
    /// Generalized Cauchy criterion at `ε`.
    Cauchy {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long, value_parser = rational)]
        eps: Q,
    },
    /// The unordered sum to within `ε`.
    Eval {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long, value_parser = rational)]
        eps: Q,
    },
    /// Compares the unordered sum with a permuted one.
    Rearrange {
        #[command(flatten)]
        source: FamilySource,
        /// 1-based permutation of `1..=n`.
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        #[arg(long, value_parser = rational)]
        eps: Q,
    },
    /// Uniform smallness of signed window sums.
    Uniform {
        #[command(flatten)]
        source: FamilySource,
        #[arg(long, value_parser = rational)]
        eps: Q,
        /// Sample sign patterns when exhaustive enumeration is too large.
        #[arg(long)]
        sample: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum MeasuresCmd {
    /// `|μ|(E)` over a partition of `E`.
    Tv {
        #[arg(long = "in")]
        input: PathBuf,
        /// Cells as `0,1;2` (0-based atoms); defaults to single atoms.
        #[arg(long)]
        cells: Option<String>,
        /// Defaults to every atom.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    /// `|μ(E⁺)| + |μ(E⁻)|`-type variation of a set.
    TwoSet {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
    },
    Jordan {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Hahn {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Density `dμ/dν`.
    Rn {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    Lebesgue {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// `dμ/d|μ|`.
    Polar {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// `|μ|(A △ B)`.
    Distance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DyadicCmd {
    /// Maximal function, level set and weak-type bounds.
    Maximal {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_parser = rational)]
        t: Q,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Moments of `Σ a_l r_l`.
    Khintchine {
        #[arg(long, value_parser = rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<Q>,
        #[arg(long, value_parser = exponent)]
        p: Exponent,
    },
    /// `E_l f` of a step function.
    Average {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: u32,
    },
    /// `(1/2π) ∫ |Σ c_j e^{i n_j θ}|^{2^k}`.
    Lacunary {
        #[arg(long, value_delimiter = ',', required = true)]
        freqs: Vec<u64>,
        #[arg(long, value_parser = rational, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<Q>,
        #[arg(long)]
        k: u32,
    },
    /// Orthonormality of the Walsh functions on `n` Rademacher factors.
    Walsh {
        #[arg(long)]
        n: u32,
    },
    /// Reduces open intervals `a:b` to a cover of multiplicity at most two.
    Covering {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        intervals: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MartCmd {
    Classify {
        #[arg(long)]
        seq: PathBuf,
    },
    /// Martingale plus predictable compensator.
    Doob {
        #[arg(long)]
        seq: PathBuf,
    },
    /// `t · μ{f* > t} ≤ sup_n ∫ ‖f_n‖`.
    Maximal {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = rational)]
        t: Q,
    },
    /// `∫ (f_n*)^p ≤ C_p ∫ f_n^p` for a nonnegative submartingale.
    DoobLp {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = rational)]
        p: Q,
    },
    /// Stops at the first passage above `t` and classifies the stopped sequence.
    Stop {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        t: Q,
    },
    OptionalStopping {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        t: Q,
    },
    /// Tail integrals `max_n ∫_{‖f_n‖>t} ‖f_n‖`.
    Integrability {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
        ts: Vec<Q>,
    },
    /// Increment-based type and cotype surrogates.
    Surrogates {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_parser = real, default_value = "2")]
        p: f64,
    },
    /// Named experiments: dirac_singular, unit_square, slln_average, doubling.
    Experiment {
        name: String,
        #[arg(long)]
        stages: Option<u32>,
        #[arg(long, value_parser = rational)]
        threshold: Option<Q>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PathCmd {
    Length {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Positive, negative and total variation of a scalar path.
    Variation {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Stieltjes {
        /// Piecewise polynomial such as `t^2` or `t <1/2; 1 - t`.
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = rational)]
        mesh: Q,
    },
    /// The vector measure of intervals such as `[0,1/2)`.
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "interval", required = true)]
        intervals: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConvexityCmd {
    /// Grid estimate of the modulus of convexity.
    Modulus {
        #[arg(long)]
        norm: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, value_parser = real, value_delimiter = ',', default_value = "0.5,1,1.5")]
        eps: Vec<f64>,
    },
    /// A segment on the unit sphere, if the grid finds one.
    Strict {
        #[arg(long)]
        norm: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long = "sphere-tol", value_parser = real, default_value = "1e-9")]
        sphere_tol: f64,
    },
    /// If `‖Σ t_j v_j‖ > 1 − η` then `Σ t_j ‖v_j − a‖ < ε`.
    Averaged {
        #[arg(long)]
        norm: String,
        /// Vectors as `1,0;0,1`.
        #[arg(long, allow_hyphen_values = true)]
        vectors: String,
        #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
        weights: Vec<Q>,
        #[arg(long, value_parser = real)]
        eps: f64,
        #[arg(long, value_parser = real)]
        eta: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Inequalities,
    Measures,
    Dyadic,
    Martingales,
    Paths,
    All,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(value_enum)]
    pub name: SuiteName,
    /// Test fixture: flips a sign inside one battery.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}
