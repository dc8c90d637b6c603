//! Numerical Chern characters `(rank, c1, ch2)` on a surface.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, Surface};
use crate::rational::{int, Rational, RationalExt, Scalar};

/// A class `(ch0, ch1, ch2)` in `Z ⊕ NS_Q ⊕ Q`.
///
/// Any integer rank is allowed so formal differences can be represented;
/// candidate enumeration only ever produces `rank >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChernCharacter {
    pub rank: i64,
    pub c1: DivisorClass,
    pub ch2: Rational,
}

impl ChernCharacter {
    pub fn new(rank: i64, c1: DivisorClass, ch2: Rational) -> Self {
        ChernCharacter { rank, c1, ch2 }
    }

    /// Class of a skyscraper sheaf, `(0, 0, 1)`.
    pub fn skyscraper(dim: usize) -> Self {
        ChernCharacter::new(0, DivisorClass::zero(dim), int(1))
    }

    pub fn zero(dim: usize) -> Self {
        ChernCharacter::new(0, DivisorClass::zero(dim), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.c1.is_zero() && self.ch2.is_zero()
    }

    /// The flattened vector `(r, c1_1, ..., c1_ρ, ch2)`.
    pub fn as_vector(&self) -> Vec<Rational> {
        let mut v = Vec::with_capacity(self.c1.dim() + 2);
        v.push(int(self.rank));
        v.extend(self.c1.coords().iter().cloned());
        v.push(self.ch2.clone());
        v
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.rank, self.c1, self.ch2)
    }
}

impl Add for &ChernCharacter {
    type Output = ChernCharacter;
    fn add(self, rhs: &ChernCharacter) -> ChernCharacter {
        ChernCharacter::new(
            self.rank + rhs.rank,
            &self.c1 + &rhs.c1,
            &self.ch2 + &rhs.ch2,
        )
    }
}

impl Sub for &ChernCharacter {
    type Output = ChernCharacter;
    fn sub(self, rhs: &ChernCharacter) -> ChernCharacter {
        ChernCharacter::new(
            self.rank - rhs.rank,
            &self.c1 - &rhs.c1,
            &self.ch2 - &rhs.ch2,
        )
    }
}

impl Neg for &ChernCharacter {
    type Output = ChernCharacter;
    fn neg(self) -> ChernCharacter {
        ChernCharacter::new(-self.rank, -&self.c1, -&self.ch2)
    }
}

impl Surface {
    /// `(1, L, L²/2)`.
    pub fn line_bundle(&self, l: &DivisorClass) -> Result<ChernCharacter> {
        let sq = self.square(l)?;
        Ok(ChernCharacter::new(1, l.clone(), sq / int(2)))
    }

    pub fn check_character(&self, v: &ChernCharacter) -> Result<()> {
        self.check_dim(&v.c1)
    }

    /// Slope `(H·c1)/r` with respect to an ample `H`.
    pub fn slope(&self, v: &ChernCharacter, h: &DivisorClass) -> Result<Rational> {
        if v.rank <= 0 {
            return Err(Error::NonpositiveRank(v.rank));
        }
        self.require_ample(h)?;
        Ok(self.pair(h, &v.c1)? / int(v.rank))
    }

    /// Slope divided by `H²`, i.e. `(H·c1)/(H²·r)`.
    ///
    /// This is the slope variable β of the Le Potier function and of the
    /// central charge: `Im Z₀(v) = 0` exactly when it equals β, and the
    /// closed-form upper bound on Φ is stated in terms of it. It agrees with
    /// [`Surface::slope`] whenever `H² = 1`.
    pub fn normalized_slope(&self, v: &ChernCharacter, h: &DivisorClass) -> Result<Rational> {
        Ok(self.slope(v, h)? / self.square(h)?)
    }

    /// `c1² − 2·r·ch2`.
    pub fn discriminant(&self, v: &ChernCharacter) -> Result<Rational> {
        Ok(self.square(&v.c1)? - int(2 * v.rank) * &v.ch2)
    }

    pub fn bogomolov_ok(&self, v: &ChernCharacter) -> Result<bool> {
        Ok(!self.discriminant(v)?.is_negative())
    }

    /// Tensor by the line bundle `L`: `(r, c1 + rL, ch2 + c1·L + rL²/2)`.
    pub fn twist(&self, v: &ChernCharacter, l: &DivisorClass) -> Result<ChernCharacter> {
        self.check_character(v)?;
        let r = int(v.rank);
        let c1 = &v.c1 + &l.scale(&r);
        let ch2 = &v.ch2 + self.pair(&v.c1, l)? + r * self.square(l)? / int(2);
        Ok(ChernCharacter::new(v.rank, c1, ch2))
    }
}
