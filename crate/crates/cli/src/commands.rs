use std::f64::consts::PI;
use std::path::Path;

use stabgeo::contraction::{contract, verify_path};
use stabgeo::io::load_surface;
use stabgeo::lepotier::{phi_at_slope, phi_profile, phi_upper};
use stabgeo::rational::{int, to_f64, Scalar};
use stabgeo::region::{central_charge, membership, Certificate, GeoPoint, Verdict};
use stabgeo::{validate_surface, DivisorClass, EnumerationBox, Error, Rational, Surface};

use crate::args::{
    ChargeArgs, Cli, Command, ContractArgs, MemberArgs, PhiArgs, PinchArgs, PointSpec, SearchArgs,
    SliceArgs,
};
use crate::render::{coords, csv_line, describe, enclose, real, sup_text, table, witness_fields};

pub const OUTSIDE: u8 = 1;
pub const UNKNOWN: u8 = 2;
pub const USAGE: u8 = 64;
pub const DATA: u8 = 65;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: DATA,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BadParameter(_) | Error::EmptyGrid(_) => USAGE,
            _ => DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Output text and exit status of a successful run.
pub struct Report {
    pub text: String,
    pub code: u8,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: 0 }
    }
}

pub fn run(cli: Cli) -> Result<Report, Failure> {
    let csv = cli.csv;
    match cli.command {
        Command::Validate { file } => validate(&file, csv),
        Command::Phi(a) => phi(a, csv),
        Command::Member(a) => member(a, csv),
        Command::Charge(a) => charge(a, csv, &cli.precision),
        Command::Contract(a) => contract_cmd(a, csv, &cli.precision),
        Command::Slice(a) => slice(a),
        Command::PinchDemo(a) => pinch(a, csv),
    }
}

fn load(path: &Path) -> Result<Surface, Failure> {
    let data = load_surface(path).map_err(|e| match e {
        Error::Io(io) => Failure::data(format!("cannot read {}: {io}", path.display())),
        other => Failure::data(format!("{}: {other}", path.display())),
    })?;
    validate_surface(data).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn search_box(bound: i64, max_rank: i64) -> Result<EnumerationBox, Failure> {
    Ok(EnumerationBox::new(bound, max_rank, int(1))?)
}

/// The given grid, or the window tolerance halved three times.
fn window_grid(search: &SearchArgs, bx: &EnumerationBox) -> Vec<Rational> {
    match &search.grid {
        Some(g) => g.0.clone(),
        None => (0..4).map(|k| &bx.slope_tolerance / int(1 << k)).collect(),
    }
}

fn geo_point(s: &Surface, p: PointSpec) -> Result<GeoPoint, Failure> {
    let z = p.z;
    Ok(GeoPoint::new(s, z.lambda, z.h, z.d, z.beta, p.alpha)?)
}

fn validate(file: &Path, csv: bool) -> Result<Report, Failure> {
    let s = load(file)?;
    let sig = s.inertia();
    let mode = s.ample().mode_name();
    let text = if csv {
        csv_line(
            &[
                "rank",
                "positive",
                "negative",
                "ample_mode",
                "stable_characters",
            ]
            .map(String::from),
        ) + &csv_line(&[
            s.rank().to_string(),
            sig.positive.to_string(),
            sig.negative.to_string(),
            mode.to_string(),
            s.stable_characters().len().to_string(),
        ])
    } else {
        format!(
            "ok\nrank: {}\nsignature: ({}, {})\nample mode: {}\nstable characters: {}\n",
            s.rank(),
            sig.positive,
            sig.negative,
            mode,
            s.stable_characters().len()
        )
    };
    Ok(Report::ok(text))
}

fn phi(a: PhiArgs, csv: bool) -> Result<Report, Failure> {
    let s = load(&a.surface.surface)?;
    let d = a.d.unwrap_or_else(|| DivisorClass::zero(s.rank()));
    let bx = search_box(a.search.bound, a.search.max_rank)?;
    let grid = window_grid(&a.search, &bx);
    let b = phi_profile(
        &s,
        &a.h,
        &d,
        &a.beta,
        &bx,
        &grid,
        a.search.convention.into(),
    )?;
    let mut text = String::new();
    if csv {
        text += &csv_line(
            &[
                "delta",
                "punctured_sup",
                "witness_r",
                "witness_c1",
                "witness_ch2",
            ]
            .map(String::from),
        );
        for w in &b.window_profile {
            let [r, c1, ch2] = witness_fields(w.sup.witness.as_ref());
            text += &csv_line(&[w.delta.to_string(), w.sup.value.to_string(), r, c1, ch2]);
        }
    } else {
        text += &format!("H = {}, D = {}, beta = {}\n", a.h, d, a.beta);
        text += &format!("upper: {}\n", b.upper);
        text += &format!("pointwise: {}\n", sup_text(&s, &b.pointwise));
        for w in &b.window_profile {
            text += &format!("punctured window {}: {}\n", w.delta, sup_text(&s, &w.sup));
        }
        text += &format!("estimate ({}): {}\n", b.convention.name(), b.estimate());
    }
    Ok(Report::ok(text))
}

fn member(a: MemberArgs, csv: bool) -> Result<Report, Failure> {
    let s = load(&a.surface.surface)?;
    let p = geo_point(&s, a.point)?;
    let bx = search_box(a.search.bound, a.search.max_rank)?;
    let grid = window_grid(&a.search, &bx);
    let m = membership(&s, &p, &bx, &grid, a.search.convention.into())?;
    let verified = m.verify(&s, &p)?;
    if !verified {
        return Err(Failure::data("membership certificate failed to re-verify"));
    }

    let (kind, lower, witness) = match &m.certificate {
        Certificate::AboveUpper { .. } => ("above_upper", String::new(), None),
        Certificate::Witness { witness, value, .. } => {
            ("witness", value.to_string(), Some(witness))
        }
        Certificate::Bracket { lower, .. } => ("bracket", lower.to_string(), None),
    };
    let text = if csv {
        let [r, c1, ch2] = witness_fields(witness);
        csv_line(
            &[
                "verdict",
                "certificate",
                "alpha",
                "upper",
                "lower",
                "witness_r",
                "witness_c1",
                "witness_ch2",
                "verified",
            ]
            .map(String::from),
        ) + &csv_line(&[
            m.verdict.name().into(),
            kind.into(),
            p.alpha.to_string(),
            m.bracket.upper.to_string(),
            lower,
            r,
            c1,
            ch2,
            verified.to_string(),
        ])
    } else {
        let certificate = match &m.certificate {
            Certificate::AboveUpper { upper } => {
                format!("alpha = {} > upper bound {upper}", p.alpha)
            }
            Certificate::Witness {
                witness,
                value,
                convention,
            } => format!(
                "{} at slope beta has value {value} >= alpha = {} ({} convention)",
                describe(&s, witness),
                p.alpha,
                convention.name()
            ),
            Certificate::Bracket { lower, upper } => {
                format!("{lower} < alpha = {} <= {upper}", p.alpha)
            }
        };
        format!(
            "verdict: {}\ncertificate: {certificate}\nupper: {}\npointwise: {}\nverified: yes\n",
            m.verdict.name(),
            m.bracket.upper,
            sup_text(&s, &m.bracket.pointwise)
        )
    };
    let code = match m.verdict {
        Verdict::Inside => 0,
        Verdict::Outside => OUTSIDE,
        Verdict::Unknown => UNKNOWN,
    };
    Ok(Report { text, code })
}

fn charge(a: ChargeArgs, csv: bool, precision: &Rational) -> Result<Report, Failure> {
    let s = load(&a.surface.surface)?;
    let p = geo_point(&s, a.point)?;
    let z = central_charge(&s, &p, &a.character)?;
    let lambda = &z.lambda;

    // Z = exp(iπλ)·Z0 is transcendental unless λ = 0; enclose the float
    // value with a bound covering argument reduction, exp, cos and sin.
    let (re, im) = if lambda.re.is_zero() && lambda.im.is_zero() {
        (
            (z.base.re.clone(), z.base.re.clone()),
            (z.base.im.clone(), z.base.im.clone()),
        )
    } else {
        let value = z.value();
        let spread = PI * (to_f64(&lambda.re).abs() + to_f64(&lambda.im).abs());
        let err = value.norm() * f64::EPSILON * (16.0 + 8.0 * spread) + f64::MIN_POSITIVE;
        let out_of_range = || Failure::data(format!("central charge {value} is out of range"));
        (
            enclose(value.re, err, precision).ok_or_else(out_of_range)?,
            enclose(value.im, err, precision).ok_or_else(out_of_range)?,
        )
    };

    let text = if csv {
        csv_line(
            &[
                "lambda_re",
                "lambda_im",
                "z0_re",
                "z0_im",
                "z_re_lo",
                "z_re_hi",
                "z_im_lo",
                "z_im_hi",
            ]
            .map(String::from),
        ) + &csv_line(&[
            lambda.re.to_string(),
            lambda.im.to_string(),
            z.base.re.to_string(),
            z.base.im.to_string(),
            re.0.to_string(),
            re.1.to_string(),
            im.0.to_string(),
            im.1.to_string(),
        ])
    } else {
        let exact = re.0 == re.1 && im.0 == im.1;
        let mut t = format!(
            "character: {}\nZ0: {} + {} i\n",
            describe(&s, &a.character),
            z.base.re,
            z.base.im
        );
        if exact {
            t += &format!("Z: {} + {} i (exact, lambda = 0)\n", re.0, im.0);
        } else {
            t += &format!(
                "lambda: {lambda}\nRe Z in [{}, {}]\nIm Z in [{}, {}]\n",
                re.0, re.1, im.0, im.1
            );
        }
        t
    };
    Ok(Report::ok(text))
}

fn contract_cmd(a: ContractArgs, csv: bool, precision: &Rational) -> Result<Report, Failure> {
    let s = load(&a.surface.surface)?;
    let p = geo_point(&s, a.point)?;
    let path = contract(&s, &p, a.steps, a.base.as_ref(), a.allow_uncertified)?;
    let report = verify_path(&s, &path, 0.0);
    if !report.ok() {
        let flags: Vec<String> = report
            .violations
            .iter()
            .map(|f| format!("{:?} at {}", f.kind, f.index))
            .collect();
        return Err(Failure::data(format!(
            "path failed verification: {}",
            flags.join(", ")
        )));
    }

    let mut rows = Vec::with_capacity(path.len());
    for sample in &path.samples {
        let q = &sample.point;
        let upper = phi_upper(&s, &q.z.h, &q.z.d, &q.z.beta)?;
        let certificate = if q.alpha > upper {
            "above_upper"
        } else {
            "uncertified"
        };
        rows.push(vec![
            sample.t.to_string(),
            sample.phase.to_string(),
            q.z.lambda.re.to_string(),
            q.z.lambda.im.to_string(),
            if csv {
                coords(&q.z.h)
            } else {
                q.z.h.to_string()
            },
            if csv {
                coords(&q.z.d)
            } else {
                q.z.d.to_string()
            },
            q.z.beta.to_string(),
            q.alpha.to_string(),
            certificate.to_string(),
        ]);
    }
    let header = [
        "t",
        "phase",
        "lambda_re",
        "lambda_im",
        "H",
        "D",
        "beta",
        "alpha",
        "certificate",
    ];
    let text = if csv {
        let mut t = csv_line(&header.map(String::from));
        for row in &rows {
            t += &csv_line(row);
        }
        t
    } else {
        let jump = enclose(report.max_jump, 0.0, precision)
            .map_or_else(|| report.max_jump.to_string(), |(_, hi)| hi.to_string());
        let base = &path.base_point;
        format!(
            "{}samples: {}\nverified: yes\nmax step (sup norm) <= {jump}\nbase point: lambda {}, H {}, D {}, beta {}, alpha {}\n",
            table(&header, &rows),
            path.len(),
            base.z.lambda,
            base.z.h,
            base.z.d,
            base.z.beta,
            base.alpha
        )
    };
    Ok(Report::ok(text))
}

fn slice(a: SliceArgs) -> Result<Report, Failure> {
    let s = load(&a.surface.surface)?;
    let d = a.d.unwrap_or_else(|| DivisorClass::zero(s.rank()));
    let bx = search_box(a.bound, a.max_rank)?;
    let (lo, hi) = (a.beta.0, a.beta.1);
    let mut text = csv_line(
        &[
            "beta",
            "phi_upper",
            "phi_pointwise",
            "witness_r",
            "witness_c1",
            "witness_ch2",
        ]
        .map(String::from),
    );
    let mut beta = lo;
    while beta <= hi {
        let upper = phi_upper(&s, &a.h, &d, &beta)?;
        let sup = phi_at_slope(&s, &a.h, &d, &beta, &bx)?;
        let [r, c1, ch2] = witness_fields(sup.witness.as_ref());
        text += &csv_line(&[
            beta.to_string(),
            upper.to_string(),
            sup.value.to_string(),
            r,
            c1,
            ch2,
        ]);
        beta += &a.step;
    }
    Ok(Report::ok(text))
}

fn pinch(a: PinchArgs, csv: bool) -> Result<Report, Failure> {
    let [x0, x1, a0, a1] = a.grid;
    let r = stabgeo::contraction::pinch_demo((x0, x1), (a0, a1), a.spacing)?;
    let reps = r.representatives();
    let mut text = String::new();
    if csv {
        text += &csv_line(&["component", "x", "alpha"].map(String::from));
        for (k, (x, alpha)) in reps.iter().enumerate() {
            text += &csv_line(&[k.to_string(), real(*x), real(*alpha)]);
        }
    } else {
        text += &format!("components: {}\n", r.components);
        for (x, alpha) in reps.iter().take(2) {
            let label = r.label_at(*x, *alpha).map_or("-".into(), |l| l.to_string());
            text += &format!(
                "component {label}: representative x = {}, alpha = {}\n",
                real(*x),
                real(*alpha)
            );
        }
    }
    Ok(Report::ok(text))
}
