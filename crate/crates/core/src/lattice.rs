//! Néron–Severi lattice arithmetic: the intersection pairing, signature
//! validation of the Gram matrix, and ample-cone membership.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::chern::ChernCharacter;
use crate::error::{Error, Result, Violation};
use crate::lp::{self, LpOutcome};
use crate::rational::{int, join, Rational, RationalExt, Scalar};
use crate::signature::{inertia, Inertia};

/// Coordinates of a real (here: rational) divisor class in a fixed basis of NS.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass(Vec<Rational>);

impl DivisorClass {
    pub fn new(coords: Vec<Rational>) -> Self {
        DivisorClass(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        DivisorClass(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        DivisorClass(vec![Rational::zero(); dim])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        DivisorClass(self.0.iter().map(|c| c * k).collect())
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: &Rational) -> Self {
        let s = Rational::one() - t;
        DivisorClass(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a * &s + b * t)
                .collect(),
        )
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.0, ","))
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| -a).collect())
    }
}

/// How the ample cone is described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmpleSpec {
    /// Open cone spanned by these generators.
    Polyhedral { generators: Vec<DivisorClass> },
    /// The component of `{x : x·x > 0}` containing the reference class.
    PositiveCone { reference: DivisorClass },
}

impl AmpleSpec {
    pub fn mode_name(&self) -> &'static str {
        match self {
            AmpleSpec::Polyhedral { .. } => "polyhedral",
            AmpleSpec::PositiveCone { .. } => "positive_cone",
        }
    }
}

/// For which polarizations a user-declared character is known to be slope stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Applicability {
    AllPolarizations,
    FixedH(DivisorClass),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableCharacter {
    pub character: ChernCharacter,
    pub applicability: Applicability,
}

/// Unvalidated description of a surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceData {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub ample: AmpleSpec,
    pub stable_characters: Vec<StableCharacter>,
    pub albanese_finite: Option<bool>,
}

impl SurfaceData {
    pub fn new(gram: Vec<Vec<i64>>, ample: AmpleSpec) -> Self {
        SurfaceData {
            rank: gram.len(),
            gram,
            ample,
            stable_characters: Vec::new(),
            albanese_finite: None,
        }
    }
}

/// A surface whose Gram matrix and ample cone passed validation.
#[derive(Clone, Debug)]
pub struct Surface {
    data: SurfaceData,
    gram: Vec<Vec<Rational>>,
    inertia: Inertia,
    reference: DivisorClass,
}

pub fn validate_surface(data: SurfaceData) -> Result<Surface> {
    let rho = data.rank;
    let mut violations = Vec::new();
    let dim = |what: &str, found: usize, v: &mut Vec<Violation>| {
        if found != rho {
            v.push(Violation::DimensionMismatch {
                what: what.to_string(),
                expected: rho,
                found,
            });
        }
    };

    if rho == 0 {
        violations.push(Violation::DimensionMismatch {
            what: "rank".into(),
            expected: 1,
            found: 0,
        });
        return Err(Error::InvalidSurface(violations));
    }
    dim("gram rows", data.gram.len(), &mut violations);
    for (i, row) in data.gram.iter().enumerate() {
        dim(&format!("gram row {i}"), row.len(), &mut violations);
    }
    if !violations.is_empty() {
        return Err(Error::InvalidSurface(violations));
    }

    for i in 0..rho {
        for j in i + 1..rho {
            if data.gram[i][j] != data.gram[j][i] {
                violations.push(Violation::NonSymmetric { row: i, col: j });
            }
        }
    }
    let gram: Vec<Vec<Rational>> = data
        .gram
        .iter()
        .map(|r| r.iter().map(|&x| int(x)).collect())
        .collect();
    let sig = inertia(&gram);
    if violations.is_empty() && !sig.is_hyperbolic(rho) {
        violations.push(Violation::WrongSignature {
            positive: sig.positive,
            negative: sig.negative,
            zero: sig.zero,
        });
    }

    let pairing = |a: &DivisorClass, b: &DivisorClass| bilinear(&gram, a, b);
    let mut reference = DivisorClass::zero(rho);
    match &data.ample {
        AmpleSpec::PositiveCone { reference: a } => {
            dim("ample reference", a.dim(), &mut violations);
            if a.dim() == rho {
                if pairing(a, a).is_positive() {
                    reference = a.clone();
                } else {
                    violations.push(Violation::EmptyAmpleCone(format!(
                        "reference {a} has nonpositive square"
                    )));
                }
            }
        }
        AmpleSpec::Polyhedral { generators } => {
            let before = violations.len();
            if generators.is_empty() {
                violations.push(Violation::EmptyAmpleCone("no generators".into()));
            }
            for (k, g) in generators.iter().enumerate() {
                dim(&format!("generator {k}"), g.dim(), &mut violations);
            }
            if violations.len() == before {
                let sum = generators
                    .iter()
                    .fold(DivisorClass::zero(rho), |acc, g| &acc + g);
                for (k, g) in generators.iter().enumerate() {
                    if g.is_zero() || pairing(g, g).is_negative() {
                        violations.push(Violation::EmptyAmpleCone(format!(
                            "generator {k} = {g} is outside the closed positive cone"
                        )));
                    }
                    for (l, h) in generators.iter().enumerate().skip(k + 1) {
                        if pairing(g, h).is_negative() {
                            violations.push(Violation::EmptyAmpleCone(format!(
                                "generators {k} and {l} lie in opposite halves of the light cone"
                            )));
                        }
                    }
                }
                let span = matrix_rank(
                    &generators
                        .iter()
                        .map(|g| g.coords().to_vec())
                        .collect::<Vec<_>>(),
                );
                if span < rho {
                    violations.push(Violation::EmptyAmpleCone(format!(
                        "generators span a subspace of dimension {span} < {rho}"
                    )));
                } else if !pairing(&sum, &sum).is_positive()
                    || generators.iter().any(|g| !pairing(g, &sum).is_positive())
                {
                    violations.push(Violation::EmptyAmpleCone(
                        "generator sum is not in the positive cone".into(),
                    ));
                }
                reference = sum;
            }
        }
    }

    for (k, sc) in data.stable_characters.iter().enumerate() {
        dim(
            &format!("stable character {k} c1"),
            sc.character.c1.dim(),
            &mut violations,
        );
        if let Applicability::FixedH(h) = &sc.applicability {
            dim(
                &format!("stable character {k} polarization"),
                h.dim(),
                &mut violations,
            );
        }
    }

    if !violations.is_empty() {
        return Err(Error::InvalidSurface(violations));
    }
    Ok(Surface {
        data,
        gram,
        inertia: sig,
        reference,
    })
}

fn bilinear(gram: &[Vec<Rational>], a: &DivisorClass, b: &DivisorClass) -> Rational {
    let mut acc = Rational::zero();
    for (i, ai) in a.coords().iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coords().iter().enumerate() {
            if !bj.is_zero() && !gram[i][j].is_zero() {
                acc += ai * &gram[i][j] * bj;
            }
        }
    }
    acc
}

/// Rank of a list of row vectors by exact elimination.
pub(crate) fn matrix_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[rank][col];
            let (top, rest) = m.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[rank][col..]) {
                *x -= &f * y;
            }
        }
        rank += 1;
    }
    rank
}

impl Surface {
    pub fn rank(&self) -> usize {
        self.data.rank
    }

    pub fn data(&self) -> &SurfaceData {
        &self.data
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn ample(&self) -> &AmpleSpec {
        &self.data.ample
    }

    pub fn stable_characters(&self) -> &[StableCharacter] {
        &self.data.stable_characters
    }

    /// The canonical ample class: the positive-cone reference, or the sum of
    /// the polyhedral generators.
    pub fn reference_ample(&self) -> &DivisorClass {
        &self.reference
    }

    pub fn check_dim(&self, d: &DivisorClass) -> Result<()> {
        if d.dim() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: d.dim(),
            });
        }
        Ok(())
    }

    /// Intersection product `aᵀ·gram·b`.
    pub fn pair(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Rational> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(bilinear(&self.gram, a, b))
    }

    pub(crate) fn pair_unchecked(&self, a: &DivisorClass, b: &DivisorClass) -> Rational {
        bilinear(&self.gram, a, b)
    }

    pub fn square(&self, a: &DivisorClass) -> Result<Rational> {
        self.pair(a, a)
    }

    /// Open ample-cone membership; boundary points are not ample.
    pub fn is_ample(&self, h: &DivisorClass) -> Result<bool> {
        self.check_dim(h)?;
        match &self.data.ample {
            AmpleSpec::PositiveCone { reference } => Ok(bilinear(&self.gram, h, h).is_positive()
                && bilinear(&self.gram, h, reference).is_positive()),
            AmpleSpec::Polyhedral { generators } => Ok(in_open_cone(generators, h)),
        }
    }

    pub fn require_ample(&self, h: &DivisorClass) -> Result<()> {
        if self.is_ample(h)? {
            Ok(())
        } else {
            Err(Error::NotAmple(h.coords().to_vec()))
        }
    }
}

/// Whether `h = Σ λ_i g_i` with every `λ_i > 0`.
///
/// Solved as `max ε` subject to `Σ μ_i g_i + ε Σ g_i = h`, `μ, ε >= 0`; the
/// strict representation exists exactly when the optimum is positive.
fn in_open_cone(generators: &[DivisorClass], h: &DivisorClass) -> bool {
    let rho = h.dim();
    let k = generators.len();
    let sum = generators
        .iter()
        .fold(DivisorClass::zero(rho), |acc, g| &acc + g);
    let a: Vec<Vec<Rational>> = (0..rho)
        .map(|i| {
            generators
                .iter()
                .map(|g| g.coords()[i].clone())
                .chain(std::iter::once(sum.coords()[i].clone()))
                .collect()
        })
        .collect();
    let mut c = vec![Rational::zero(); k + 1];
    c[k] = Rational::one();
    match lp::maximize(&a, h.coords(), &c) {
        LpOutcome::Infeasible => false,
        LpOutcome::Unbounded => true,
        LpOutcome::Optimal { value, .. } => value.is_positive(),
    }
}
