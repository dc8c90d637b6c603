//! Coordinates `(λ, H, D, β, α)` for geometric stability conditions, their
//! central charges, and certified membership in the region `Φ(H, D, β) < α`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Add;

use num_complex::Complex64;

use crate::chern::ChernCharacter;
use crate::error::{Error, Result};
use crate::lattice::{Applicability, DivisorClass, Surface};
use crate::lepotier::{
    self, declared_candidates, line_bundles_in, normalized_ch2, phi_upper, Convention,
    EnumerationBox, PhiBracket, Window,
};
use crate::rational::{int, to_f64, Extended, Rational, RationalExt, Scalar};
use crate::signature::inertia;

/// The `C` factor, stored exactly as `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Lambda {
    pub re: Rational,
    pub im: Rational,
}

impl Lambda {
    pub fn new(re: Rational, im: Rational) -> Self {
        Lambda { re, im }
    }

    pub fn zero() -> Self {
        Lambda::default()
    }

    /// `exp(iπλ) = e^{−π·im} (cos π·re + i sin π·re)`.
    pub fn rotation(&self) -> Complex64 {
        let modulus = (-PI * to_f64(&self.im)).exp();
        let angle = PI * to_f64(&self.re);
        Complex64::new(modulus * angle.cos(), modulus * angle.sin())
    }

    pub fn lerp(&self, other: &Lambda, t: &Rational) -> Lambda {
        let s = int(1) - t;
        Lambda::new(&self.re * &s + &other.re * t, &self.im * &s + &other.im * t)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

/// The part of a stability coordinate that does not involve α.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseCoordinate {
    pub lambda: Lambda,
    pub h: DivisorClass,
    pub d: DivisorClass,
    pub beta: Rational,
}

impl BaseCoordinate {
    pub fn new(lambda: Lambda, h: DivisorClass, d: DivisorClass, beta: Rational) -> Self {
        BaseCoordinate { lambda, h, d, beta }
    }

    pub fn check(&self, s: &Surface) -> Result<()> {
        s.check_dim(&self.d)?;
        s.require_ample(&self.h)
    }
}

/// A point `(λ, H, D, β, α)`; `H` is ample, α is unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeoPoint {
    pub z: BaseCoordinate,
    pub alpha: Rational,
}

impl GeoPoint {
    pub fn new(
        s: &Surface,
        lambda: Lambda,
        h: DivisorClass,
        d: DivisorClass,
        beta: Rational,
        alpha: Rational,
    ) -> Result<Self> {
        let z = BaseCoordinate::new(lambda, h, d, beta);
        z.check(s)?;
        Ok(GeoPoint { z, alpha })
    }

    pub fn at(z: BaseCoordinate, alpha: Rational) -> Self {
        GeoPoint { z, alpha }
    }

    pub fn h(&self) -> &DivisorClass {
        &self.z.h
    }

    pub fn d(&self) -> &DivisorClass {
        &self.z.d
    }

    pub fn beta(&self) -> &Rational {
        &self.z.beta
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Rational,
    pub im: Rational,
}

impl ExactComplex {
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn norm(&self) -> f64 {
        to_f64(&(&self.re * &self.re + &self.im * &self.im)).sqrt()
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

/// `Z(v) = exp(iπλ)·Z₀(v)`, kept factored so that `Z₀` stays exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralCharge {
    pub lambda: Lambda,
    pub base: ExactComplex,
}

impl CentralCharge {
    pub fn value(&self) -> Complex64 {
        self.lambda.rotation() * self.base.to_complex()
    }

    /// Sum of two charges at the same λ.
    pub fn try_add(&self, other: &CentralCharge) -> Result<CentralCharge> {
        if self.lambda != other.lambda {
            return Err(Error::BadParameter(format!(
                "charges at different λ: {} and {}",
                self.lambda, other.lambda
            )));
        }
        Ok(CentralCharge {
            lambda: self.lambda.clone(),
            base: &self.base + &other.base,
        })
    }
}

/// `Z₀(v) = (−ch2 + D·c1 + α·H²·r) + i·(H·c1 − β·H²·r)`.
pub fn charge0(s: &Surface, p: &GeoPoint, v: &ChernCharacter) -> Result<ExactComplex> {
    s.check_character(v)?;
    let hh = s.square(p.h())?;
    let r = int(v.rank);
    let re = -&v.ch2 + s.pair(p.d(), &v.c1)? + &p.alpha * &hh * &r;
    let im = s.pair(p.h(), &v.c1)? - p.beta() * &hh * &r;
    Ok(ExactComplex { re, im })
}

pub fn central_charge(s: &Surface, p: &GeoPoint, v: &ChernCharacter) -> Result<CentralCharge> {
    Ok(CentralCharge {
        lambda: p.z.lambda.clone(),
        base: charge0(s, p, v)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Inside,
    Outside,
    Unknown,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Inside => "inside",
            Verdict::Outside => "outside",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `α > upper`, with `upper` the closed-form bound at `(H, D, β)`.
    AboveUpper { upper: Rational },
    /// A candidate at slope β whose value is at least α.
    Witness {
        witness: ChernCharacter,
        value: Rational,
        convention: Convention,
    },
    /// `lower < α <= upper`.
    Bracket { lower: Extended, upper: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub bracket: PhiBracket,
}

impl Membership {
    /// Rechecks the certificate against `p` from scratch, without enumeration.
    pub fn verify(&self, s: &Surface, p: &GeoPoint) -> Result<bool> {
        let upper = phi_upper(s, p.h(), p.d(), p.beta())?;
        Ok(match (&self.verdict, &self.certificate) {
            (Verdict::Inside, Certificate::AboveUpper { upper: u }) => {
                *u == upper && p.alpha > upper
            }
            (
                Verdict::Outside,
                Certificate::Witness {
                    witness,
                    value,
                    convention,
                },
            ) => {
                *convention == Convention::Closed
                    && witness.rank >= 1
                    && in_declared_family(s, p.h(), witness)?
                    && s.bogomolov_ok(witness)?
                    && s.normalized_slope(witness, p.h())? == *p.beta()
                    && normalized_ch2(s, witness, p.h(), p.d())? == *value
                    && p.alpha <= *value
            }
            (Verdict::Unknown, Certificate::Bracket { lower, upper: u }) => {
                *u == upper && *lower < Extended::Finite(p.alpha.clone()) && p.alpha <= upper
            }
            _ => false,
        })
    }
}

/// Whether `v` is an integral line bundle or an applicable declared character.
fn in_declared_family(s: &Surface, h: &DivisorClass, v: &ChernCharacter) -> Result<bool> {
    if v.rank == 1 && v.c1.coords().iter().all(|c| c.is_integer()) && *v == s.line_bundle(&v.c1)? {
        return Ok(true);
    }
    Ok(s.stable_characters().iter().any(|sc| {
        sc.character == *v
            && match &sc.applicability {
                Applicability::AllPolarizations => true,
                Applicability::FixedH(h0) => {
                    let k = h0
                        .coords()
                        .iter()
                        .zip(h.coords())
                        .find(|(_, b)| !b.is_zero())
                        .map(|(a, b)| a / b);
                    matches!(k, Some(k) if k.is_positive() && h.scale(&k) == *h0)
                }
            }
    }))
}

/// Three-valued membership in `{Φ(H, D, β) < α}`.
///
/// Inside rests on the closed-form upper bound alone. Outside needs a witness
/// at slope exactly β and is only issued under the closed convention.
pub fn membership(
    s: &Surface,
    p: &GeoPoint,
    bx: &EnumerationBox,
    grid: &[Rational],
    convention: Convention,
) -> Result<Membership> {
    p.z.check(s)?;
    let bracket = lepotier::phi_profile(s, p.h(), p.d(), p.beta(), bx, grid, convention)?;
    let alpha = &p.alpha;
    let (verdict, certificate) = if *alpha > bracket.upper {
        (
            Verdict::Inside,
            Certificate::AboveUpper {
                upper: bracket.upper.clone(),
            },
        )
    } else {
        match (
            &bracket.pointwise.value,
            &bracket.pointwise.witness,
            convention,
        ) {
            (Extended::Finite(value), Some(w), Convention::Closed) if alpha <= value => (
                Verdict::Outside,
                Certificate::Witness {
                    witness: w.clone(),
                    value: value.clone(),
                    convention,
                },
            ),
            _ => {
                let lower = match convention {
                    Convention::Closed => bracket.pointwise.value.clone(),
                    Convention::Punctured => Extended::NegInfinity,
                };
                (
                    Verdict::Unknown,
                    Certificate::Bracket {
                        lower,
                        upper: bracket.upper.clone(),
                    },
                )
            }
        }
    };
    Ok(Membership {
        verdict,
        certificate,
        bracket,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityReport {
    pub checked: usize,
    pub violations: Vec<ChernCharacter>,
}

impl PositivityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Re Z₀(v) > 0` for every candidate of slope exactly β.
pub fn charge_positivity_check(
    s: &Surface,
    p: &GeoPoint,
    bx: &EnumerationBox,
) -> Result<PositivityReport> {
    p.z.check(s)?;
    let candidates = lepotier::enumerate_candidates(s, p.h(), p.beta(), &Rational::zero(), bx)?;
    let mut violations = Vec::new();
    for v in &candidates {
        if !charge0(s, p, v)?.re.is_positive() {
            violations.push(v.clone());
        }
    }
    Ok(PositivityReport {
        checked: candidates.len(),
        violations,
    })
}

/// The sampled family for the support probe: every line bundle in the box,
/// applicable declared characters at any slope, and the skyscraper.
pub fn probe_family(s: &Surface, p: &GeoPoint, bx: &EnumerationBox) -> Result<Vec<ChernCharacter>> {
    p.z.check(s)?;
    let n = bx.coord_bound;
    let mut out = line_bundles_in(s, p.h(), p.beta(), &Window::Unbounded, n, -n..=n)?;
    out.extend(declared_candidates(
        s,
        p.h(),
        p.beta(),
        &Window::Unbounded,
        bx.max_rank,
    )?);
    out.push(ChernCharacter::skyscraper(s.rank()));
    out.sort();
    out.dedup();
    Ok(out)
}

/// `min |Z₀(v)| / ‖v‖` over nonzero `v` in `candidates`; `+∞` when there are none.
pub fn support_probe_over(
    s: &Surface,
    p: &GeoPoint,
    candidates: &[ChernCharacter],
    norm_gram: &[Vec<Rational>],
) -> Result<f64> {
    let n = s.rank() + 2;
    if norm_gram.len() != n || norm_gram.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: norm_gram.len(),
        });
    }
    let symmetric = (0..n).all(|i| (0..n).all(|j| norm_gram[i][j] == norm_gram[j][i]));
    if !symmetric || !inertia(norm_gram).is_positive_definite(n) {
        return Err(Error::NotPositiveDefinite);
    }
    let mut best = f64::INFINITY;
    for v in candidates.iter().filter(|v| !v.is_zero()) {
        let x = v.as_vector();
        let mut sq = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                sq += &x[i] * &norm_gram[i][j] * &x[j];
            }
        }
        let ratio = charge0(s, p, v)?.norm() / to_f64(&sq).sqrt();
        best = best.min(ratio);
    }
    Ok(best)
}

pub fn support_probe(
    s: &Surface,
    p: &GeoPoint,
    bx: &EnumerationBox,
    norm_gram: &[Vec<Rational>],
) -> Result<f64> {
    let family = probe_family(s, p, bx)?;
    support_probe_over(s, p, &family, norm_gram)
}

/// The identity matrix of size `ρ + 2`.
pub fn euclidean_norm(s: &Surface) -> Vec<Vec<Rational>> {
    let n = s.rank() + 2;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { int(1) } else { int(0) })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::fixtures::{p2, quadric};
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn d(v: &[i64]) -> DivisorClass {
        DivisorClass::from_ints(v)
    }

    fn p2_point(lambda: Lambda, h: i64, dd: Rational, beta: Rational, alpha: Rational) -> GeoPoint {
        GeoPoint::new(
            &p2(),
            lambda,
            d(&[h]),
            DivisorClass::new(vec![dd]),
            beta,
            alpha,
        )
        .unwrap()
    }

    fn bx() -> EnumerationBox {
        EnumerationBox::with_bound(5).unwrap()
    }

    fn grid() -> Vec<Rational> {
        vec![int(1), ratio(1, 2), ratio(1, 4)]
    }

    #[test]
    fn rejects_non_ample_point() {
        let r = GeoPoint::new(&p2(), Lambda::zero(), d(&[-1]), d(&[0]), int(0), int(0));
        assert!(matches!(r, Err(Error::NotAmple(_))));
    }

    #[test]
    fn charge_examples() {
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), int(0), int(1));
        let sky = ChernCharacter::skyscraper(1);
        let o = s.line_bundle(&d(&[0])).unwrap();
        let zs = central_charge(&s, &p, &sky).unwrap();
        assert_eq!(
            zs.base,
            ExactComplex {
                re: int(-1),
                im: int(0)
            }
        );
        assert_eq!(zs.value(), Complex64::new(-1.0, 0.0));
        let zo = central_charge(&s, &p, &o).unwrap();
        assert_eq!(
            zo.base,
            ExactComplex {
                re: int(1),
                im: int(0)
            }
        );
        let zsum = central_charge(&s, &p, &(&o + &sky)).unwrap();
        assert_eq!(
            zsum.base,
            ExactComplex {
                re: int(0),
                im: int(0)
            }
        );
        assert_eq!(zsum, zo.try_add(&zs).unwrap());
    }

    #[test]
    fn skyscraper_sits_on_phase_one() {
        let s = quadric();
        let p = GeoPoint::new(
            &s,
            Lambda::new(ratio(1, 3), ratio(-1, 5)),
            d(&[2, 1]),
            d(&[1, -3]),
            ratio(7, 2),
            int(-4),
        )
        .unwrap();
        let z = central_charge(&s, &p, &ChernCharacter::skyscraper(2)).unwrap();
        let expected = -p.z.lambda.rotation();
        assert!((z.value() - expected).norm() < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let s = p2();
        let inside = p2_point(Lambda::zero(), 1, int(0), int(0), ratio(1, 2));
        let m = membership(&s, &inside, &bx(), &grid(), Convention::Closed).unwrap();
        assert_eq!(m.verdict, Verdict::Inside);
        assert_eq!(m.certificate, Certificate::AboveUpper { upper: int(0) });
        assert!(m.verify(&s, &inside).unwrap());

        for alpha in [int(-1), int(0)] {
            let p = p2_point(Lambda::zero(), 1, int(0), int(0), alpha);
            let m = membership(&s, &p, &bx(), &grid(), Convention::Closed).unwrap();
            assert_eq!(m.verdict, Verdict::Outside);
            let Certificate::Witness { witness, value, .. } = &m.certificate else {
                panic!("{:?}", m.certificate);
            };
            assert_eq!(witness, &s.line_bundle(&d(&[0])).unwrap());
            assert_eq!(value, &int(0));
            assert!(m.verify(&s, &p).unwrap());
        }
    }

    #[test]
    fn unknown_when_bracket_open() {
        // β = 1/2: no line bundle at that slope, upper = 1/8
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), ratio(1, 2), int(0));
        let m = membership(&s, &p, &bx(), &grid(), Convention::Closed).unwrap();
        assert_eq!(m.verdict, Verdict::Unknown);
        assert_eq!(
            m.certificate,
            Certificate::Bracket {
                lower: Extended::NegInfinity,
                upper: ratio(1, 8)
            }
        );
        assert!(m.verify(&s, &p).unwrap());
    }

    #[test]
    fn punctured_convention_never_claims_outside() {
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), int(0), int(-1));
        let m = membership(&s, &p, &bx(), &grid(), Convention::Punctured).unwrap();
        assert_eq!(m.verdict, Verdict::Unknown);
    }

    #[test]
    fn tampered_certificate_fails() {
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), int(0), int(-1));
        let mut m = membership(&s, &p, &bx(), &grid(), Convention::Closed).unwrap();
        m.certificate = Certificate::Witness {
            witness: ChernCharacter::new(1, d(&[0]), int(5)),
            value: int(5),
            convention: Convention::Closed,
        };
        assert!(!m.verify(&s, &p).unwrap());
    }

    #[test]
    fn positivity_examples() {
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), int(0), ratio(1, 2));
        let r = charge_positivity_check(&s, &p, &bx()).unwrap();
        assert!(r.ok());
        assert_eq!(r.checked, 1);
        let q = p2_point(Lambda::zero(), 1, int(0), int(0), int(-1));
        let r = charge_positivity_check(&s, &q, &bx()).unwrap();
        assert_eq!(r.violations, vec![s.line_bundle(&d(&[0])).unwrap()]);
        let e = p2_point(Lambda::zero(), 1, int(0), ratio(1, 2), int(-1));
        let r = charge_positivity_check(&s, &e, &bx()).unwrap();
        assert!(r.ok());
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn probe_examples() {
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), int(0), int(1));
        let e = euclidean_norm(&s);
        let sky = ChernCharacter::skyscraper(1);
        let o = s.line_bundle(&d(&[0])).unwrap();
        assert_eq!(
            support_probe_over(&s, &p, std::slice::from_ref(&sky), &e).unwrap(),
            1.0
        );
        assert_eq!(support_probe_over(&s, &p, &[], &e).unwrap(), f64::INFINITY);
        assert_eq!(support_probe_over(&s, &p, &[o, sky], &e).unwrap(), 1.0);
        assert_eq!(
            support_probe_over(&s, &p, &[ChernCharacter::zero(1)], &e).unwrap(),
            f64::INFINITY
        );
        let full = support_probe(&s, &p, &bx(), &e).unwrap();
        assert!(full > 0.0 && full <= 1.0);
    }

    #[test]
    fn probe_rejects_indefinite_norm() {
        let s = p2();
        let p = p2_point(Lambda::zero(), 1, int(0), int(0), int(1));
        let mut n = euclidean_norm(&s);
        n[1][1] = int(-1);
        assert!(matches!(
            support_probe_over(&s, &p, &[], &n),
            Err(Error::NotPositiveDefinite)
        ));
    }

    fn q() -> impl Strategy<Value = Rational> {
        (-30i64..=30, 1i64..=6).prop_map(|(p, q)| ratio(p, q))
    }

    fn character() -> impl Strategy<Value = ChernCharacter> {
        (-3i64..=5, q(), q(), q())
            .prop_map(|(r, a, b, c)| ChernCharacter::new(r, DivisorClass::new(vec![a, b]), c))
    }

    fn quadric_point() -> impl Strategy<Value = GeoPoint> {
        (q(), q(), 1i64..5, 1i64..5, q(), q(), q(), q()).prop_map(
            |(lr, li, h1, h2, d1, d2, b, a)| {
                GeoPoint::new(
                    &quadric(),
                    Lambda::new(lr, li / int(4)),
                    d(&[h1, h2]),
                    DivisorClass::new(vec![d1, d2]),
                    b,
                    a,
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn charge_is_additive(p in quadric_point(), v in character(), w in character()) {
            let s = quadric();
            let sum = central_charge(&s, &p, &(&v + &w)).unwrap();
            let parts = central_charge(&s, &p, &v).unwrap().try_add(&central_charge(&s, &p, &w).unwrap()).unwrap();
            prop_assert_eq!(sum, parts);
        }

        #[test]
        fn rotation_factors_out(p in quadric_point(), v in character()) {
            let s = quadric();
            let z = central_charge(&s, &p, &v).unwrap();
            let mut flat = p.clone();
            flat.z.lambda = Lambda::zero();
            let z0 = central_charge(&s, &flat, &v).unwrap();
            prop_assert_eq!(&z.base, &z0.base);
            prop_assert_eq!(z.value(), p.z.lambda.rotation() * z0.value());
        }

        #[test]
        fn verdicts_are_monotone_in_alpha(p in quadric_point(), bump in 1i64..40) {
            let s = quadric();
            let bx = EnumerationBox::with_bound(3).unwrap();
            let g = [int(1), ratio(1, 3)];
            let m = membership(&s, &p, &bx, &g, Convention::Closed).unwrap();
            let mut up = p.clone();
            up.alpha = &p.alpha + ratio(bump, 7);
            let mut down = p.clone();
            down.alpha = &p.alpha - ratio(bump, 7);
            if m.verdict == Verdict::Inside {
                prop_assert_eq!(membership(&s, &up, &bx, &g, Convention::Closed).unwrap().verdict, Verdict::Inside);
                prop_assert!(charge_positivity_check(&s, &p, &bx).unwrap().ok());
            }
            if m.verdict == Verdict::Outside {
                prop_assert_eq!(membership(&s, &down, &bx, &g, Convention::Closed).unwrap().verdict, Verdict::Outside);
            }
            prop_assert!(m.verify(&s, &p).unwrap());
        }
    }
}
