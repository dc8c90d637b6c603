use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stabgeo::io::parse_character;
use stabgeo::lepotier::Convention;
use stabgeo::rational::{parse_rational, parse_rational_list, RationalExt};
use stabgeo::region::{BaseCoordinate, Lambda};
use stabgeo::{ChernCharacter, DivisorClass, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "stabgeo",
    version,
    about = "Geometric stability conditions on a surface: Le Potier brackets, membership, contraction paths"
)]
pub struct Cli {
    /// Grid step for outward rounding of real-valued diagnostics (default 2^-40).
    #[arg(long, global = true, value_parser = positive, default_value = "1/1099511627776")]
    pub precision: Rational,

    /// Emit CSV (header row, comma separated) instead of text.
    #[arg(long, global = true)]
    pub csv: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load and validate a surface file; print rank, signature and ample mode.
    Validate { file: PathBuf },
    /// Bracket Φ(H, D, β): closed-form upper bound, pointwise sup and window sups.
    Phi(PhiArgs),
    /// Three-valued membership of a point in the region Φ < α.
    Member(MemberArgs),
    /// Evaluate the central charge of a point on a Chern character.
    Charge(ChargeArgs),
    /// Sample and verify the contraction path of a point.
    Contract(ContractArgs),
    /// Sweep β over an interval at fixed (H, D) and emit CSV rows.
    Slice(SliceArgs),
    /// Count components of the sampled region for the pinch function 1/z.
    PinchDemo(PinchArgs),
}

#[derive(Args, Debug)]
pub struct SurfaceArg {
    /// Surface description (.json or .toml).
    #[arg(long)]
    pub surface: PathBuf,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Line-bundle coordinates range over [-N, N].
    #[arg(long = "box", value_name = "N", default_value_t = 5)]
    pub bound: i64,

    /// Largest rank of a declared stable character taken into account.
    #[arg(long, default_value_t = 8)]
    pub max_rank: i64,

    /// Strictly decreasing window half-widths; defaults to 1,1/2,1/4,1/8.
    #[arg(long, value_parser = grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,

    #[arg(long, value_enum, default_value_t = ConventionArg::Closed)]
    pub convention: ConventionArg,
}

#[derive(Args, Debug)]
pub struct PhiArgs {
    #[command(flatten)]
    pub surface: SurfaceArg,

    /// Ample class, comma-separated coordinates.
    #[arg(long = "H", value_parser = class, allow_hyphen_values = true)]
    pub h: DivisorClass,

    /// B-field class; zero when omitted.
    #[arg(long = "D", value_parser = class, allow_hyphen_values = true)]
    pub d: Option<DivisorClass>,

    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub beta: Rational,

    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug)]
pub struct MemberArgs {
    #[command(flatten)]
    pub surface: SurfaceArg,

    /// "lambda_re,lambda_im;H;D;beta;alpha"
    #[arg(long, value_parser = point, allow_hyphen_values = true)]
    pub point: PointSpec,

    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug)]
pub struct ChargeArgs {
    #[command(flatten)]
    pub surface: SurfaceArg,

    /// "lambda_re,lambda_im;H;D;beta;alpha"
    #[arg(long, value_parser = point, allow_hyphen_values = true)]
    pub point: PointSpec,

    /// "r;c1;ch2" or {"rank": r, "c1": [..], "ch2": q}
    #[arg(long, value_parser = character, allow_hyphen_values = true)]
    pub character: ChernCharacter,
}

#[derive(Args, Debug)]
pub struct ContractArgs {
    #[command(flatten)]
    pub surface: SurfaceArg,

    /// "lambda_re,lambda_im;H;D;beta;alpha"
    #[arg(long, value_parser = point, allow_hyphen_values = true)]
    pub point: PointSpec,

    /// Samples per phase.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,

    /// Base coordinate "lambda_re,lambda_im;H;D;beta"; defaults to (0, H0, 0, 0).
    #[arg(long, value_parser = base, allow_hyphen_values = true)]
    pub base: Option<BaseCoordinate>,

    /// Sample the path even when α does not exceed the upper bound.
    #[arg(long)]
    pub allow_uncertified: bool,
}

#[derive(Args, Debug)]
pub struct SliceArgs {
    #[command(flatten)]
    pub surface: SurfaceArg,

    #[arg(long = "H", value_parser = class, allow_hyphen_values = true)]
    pub h: DivisorClass,

    #[arg(long = "D", value_parser = class, allow_hyphen_values = true)]
    pub d: Option<DivisorClass>,

    /// Closed interval "a..b".
    #[arg(long, value_parser = interval, allow_hyphen_values = true)]
    pub beta: Interval,

    #[arg(long, value_parser = positive)]
    pub step: Rational,

    #[arg(long = "box", value_name = "N", default_value_t = 5)]
    pub bound: i64,

    #[arg(long, default_value_t = 8)]
    pub max_rank: i64,
}

#[derive(Args, Debug)]
pub struct PinchArgs {
    /// "x0,x1,a0,a1"
    #[arg(long, value_parser = float_grid, allow_hyphen_values = true, default_value = "-2,2,-3,3")]
    pub grid: [f64; 4],

    #[arg(long, default_value_t = 0.05)]
    pub spacing: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Closed,
    Punctured,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Closed => Convention::Closed,
            ConventionArg::Punctured => Convention::Punctured,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Grid(pub Vec<Rational>);

#[derive(Clone, Debug)]
pub struct Interval(pub Rational, pub Rational);

#[derive(Clone, Debug)]
pub struct PointSpec {
    pub z: BaseCoordinate,
    pub alpha: Rational,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn positive(s: &str) -> Result<Rational, String> {
    let q = rational(s)?;
    if q.is_positive() {
        Ok(q)
    } else {
        Err(format!("{q} is not positive"))
    }
}

fn class(s: &str) -> Result<DivisorClass, String> {
    Ok(DivisorClass::new(
        parse_rational_list(s).map_err(|e| e.to_string())?,
    ))
}

fn grid(s: &str) -> Result<Grid, String> {
    Ok(Grid(parse_rational_list(s).map_err(|e| e.to_string())?))
}

fn character(s: &str) -> Result<ChernCharacter, String> {
    parse_character(s).map_err(|e| e.to_string())
}

fn interval(s: &str) -> Result<Interval, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `a..b`, got {s:?}"))?;
    let (a, b) = (rational(a)?, rational(b)?);
    if a > b {
        return Err(format!("empty interval {a}..{b}"));
    }
    Ok(Interval(a, b))
}

fn lambda(s: &str) -> Result<Lambda, String> {
    match parse_rational_list(s)
        .map_err(|e| e.to_string())?
        .as_slice()
    {
        [re, im] => Ok(Lambda::new(re.clone(), im.clone())),
        _ => Err(format!("lambda needs two entries `re,im`, got {s:?}")),
    }
}

fn coordinate(fields: &[&str]) -> Result<BaseCoordinate, String> {
    Ok(BaseCoordinate::new(
        lambda(fields[0])?,
        class(fields[1])?,
        class(fields[2])?,
        rational(fields[3])?,
    ))
}

fn base(s: &str) -> Result<BaseCoordinate, String> {
    let fields: Vec<&str> = s.split(';').collect();
    if fields.len() != 4 {
        return Err(format!(
            "expected `lambda_re,lambda_im;H;D;beta`, got {s:?}"
        ));
    }
    coordinate(&fields)
}

fn point(s: &str) -> Result<PointSpec, String> {
    let fields: Vec<&str> = s.split(';').collect();
    if fields.len() != 5 {
        return Err(format!(
            "expected `lambda_re,lambda_im;H;D;beta;alpha`, got {s:?}"
        ));
    }
    Ok(PointSpec {
        z: coordinate(&fields[..4])?,
        alpha: rational(fields[4])?,
    })
}

fn float_grid(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {x:?}"))
        })
        .collect::<Result<_, _>>()?;
    let arr: [f64; 4] = v
        .try_into()
        .map_err(|_| format!("expected `x0,x1,a0,a1`, got {s:?}"))?;
    if arr.iter().any(|x| !x.is_finite()) {
        return Err(format!("non-finite bound in {s:?}"));
    }
    Ok(arr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use stabgeo::rational::{int, ratio};

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn point_fields_in_order() {
        let p = point("1/2,-1;1,2;0,-1/3;3/4;5").unwrap();
        assert_eq!(p.z.lambda, Lambda::new(ratio(1, 2), int(-1)));
        assert_eq!(p.z.h, DivisorClass::from_ints(&[1, 2]));
        assert_eq!(p.z.d, DivisorClass::new(vec![int(0), ratio(-1, 3)]));
        assert_eq!(p.z.beta, ratio(3, 4));
        assert_eq!(p.alpha, int(5));
        for bad in ["0;1;0;0;1", "0,0;1;0;0", "0,0;1;0;0;1;2", "0,0;1;0;x;1"] {
            assert!(point(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn intervals_and_grids() {
        let i = interval("-2..3/2").unwrap();
        assert_eq!((i.0, i.1), (int(-2), ratio(3, 2)));
        assert!(interval("1..0").is_err());
        assert!(interval("1").is_err());
        assert_eq!(float_grid("-2,2,-3,3").unwrap(), [-2.0, 2.0, -3.0, 3.0]);
        assert!(float_grid("1,2,3").is_err());
        assert!(float_grid("1,2,3,inf").is_err());
        assert!(positive("0").is_err());
    }
}
