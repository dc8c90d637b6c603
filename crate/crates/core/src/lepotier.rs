//! Brackets for the generalized Le Potier function Φ(H, D, β).
//!
//! The upper end is the closed-form quadratic bound; the lower end is a
//! supremum of `(ch2 − D·c1)/(H²·r)` over an enumerated family of stable
//! characters (line bundles in a coordinate box plus user-declared classes),
//! each carried with its witness.

use crate::chern::ChernCharacter;
use crate::error::{Error, Result};
use crate::lattice::{Applicability, DivisorClass, Surface};
use crate::rational::{int, Extended, Rational, RationalExt, Scalar};

/// Search region for candidate characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationBox {
    /// Line-bundle coordinates range over `[-coord_bound, coord_bound]`.
    pub coord_bound: i64,
    /// Largest rank of a user-declared character that is screened in.
    pub max_rank: i64,
    /// Default window half-width.
    pub slope_tolerance: Rational,
}

impl EnumerationBox {
    pub fn new(coord_bound: i64, max_rank: i64, slope_tolerance: Rational) -> Result<Self> {
        if coord_bound < 1 {
            return Err(Error::BadParameter(format!(
                "coord_bound {coord_bound} < 1"
            )));
        }
        if max_rank < 1 {
            return Err(Error::BadParameter(format!("max_rank {max_rank} < 1")));
        }
        if slope_tolerance.is_negative() {
            return Err(Error::BadParameter(format!(
                "negative slope tolerance {slope_tolerance}"
            )));
        }
        Ok(EnumerationBox {
            coord_bound,
            max_rank,
            slope_tolerance,
        })
    }

    /// Box of half-width `n`, ranks up to 8 and window 1.
    pub fn with_bound(n: i64) -> Result<Self> {
        Self::new(n, 8, int(1))
    }
}

/// Whether `μ = β` participates in the limsup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Closed,
    Punctured,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Closed => "closed",
            Convention::Punctured => "punctured",
        }
    }
}

/// Which slopes a candidate may have relative to β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Window {
    /// `|μ − β| <= δ`
    Closed(Rational),
    /// `0 < |μ − β| <= δ`
    Punctured(Rational),
    /// No slope restriction.
    Unbounded,
}

impl Window {
    pub fn contains(&self, slope: &Rational, beta: &Rational) -> bool {
        let gap = (slope - beta).abs();
        match self {
            Window::Closed(delta) => gap <= *delta,
            Window::Punctured(delta) => !gap.is_zero() && gap <= *delta,
            Window::Unbounded => true,
        }
    }
}

/// A supremum together with the character attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sup {
    pub value: Extended,
    pub witness: Option<ChernCharacter>,
}

impl Sup {
    pub fn empty() -> Self {
        Sup {
            value: Extended::NegInfinity,
            witness: None,
        }
    }

    /// Order-independent merge: larger value wins, ties go to the smaller witness.
    pub fn merge(self, other: Sup) -> Sup {
        match self.value.cmp(&other.value) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => match (&self.witness, &other.witness) {
                (None, _) => other,
                (Some(a), Some(b)) if b < a => other,
                _ => self,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSup {
    pub delta: Rational,
    pub sup: Sup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiBracket {
    pub upper: Rational,
    pub pointwise: Sup,
    pub window_profile: Vec<WindowSup>,
    pub convention: Convention,
}

impl PhiBracket {
    /// Headline estimate: under the closed convention the larger of the
    /// pointwise value and the smallest-window sup, otherwise the latter alone.
    pub fn estimate(&self) -> Extended {
        let tail = self
            .window_profile
            .last()
            .map_or(Extended::NegInfinity, |w| w.sup.value.clone());
        match self.convention {
            Convention::Closed => tail.max(self.pointwise.value.clone()),
            Convention::Punctured => tail,
        }
    }
}

/// `½((β − D·H/H²)² − D²/H²)`.
pub fn phi_upper(
    s: &Surface,
    h: &DivisorClass,
    d: &DivisorClass,
    beta: &Rational,
) -> Result<Rational> {
    s.require_ample(h)?;
    s.check_dim(d)?;
    Ok(upper_formula(s, h, d, beta))
}

/// The closed form without the ampleness check; callers guarantee `H` ample.
pub(crate) fn upper_formula(
    s: &Surface,
    h: &DivisorClass,
    d: &DivisorClass,
    beta: &Rational,
) -> Rational {
    let hh = s.pair_unchecked(h, h);
    let dh = s.pair_unchecked(d, h);
    let dd = s.pair_unchecked(d, d);
    let shifted = beta - &dh / &hh;
    (&shifted * &shifted - dd / hh) / int(2)
}

/// `(ch2 − D·c1)/(H²·r)` for a character of positive rank.
pub fn normalized_ch2(
    s: &Surface,
    v: &ChernCharacter,
    h: &DivisorClass,
    d: &DivisorClass,
) -> Result<Rational> {
    if v.rank <= 0 {
        return Err(Error::NonpositiveRank(v.rank));
    }
    let hh = s.square(h)?;
    Ok((&v.ch2 - s.pair(d, &v.c1)?) / (hh * int(v.rank)))
}

/// Whether a declared polarization is a positive multiple of `h`.
fn same_ray(declared: &DivisorClass, h: &DivisorClass) -> bool {
    if declared.dim() != h.dim() {
        return false;
    }
    let Some(i) = h.coords().iter().position(|c| !c.is_zero()) else {
        return false;
    };
    let k = &declared.coords()[i] / &h.coords()[i];
    k.is_positive() && h.scale(&k) == *declared
}

/// Line bundles `O(L)` with integral `L` in the box whose first coordinate
/// lies in `first`, filtered by the slope window.
pub fn line_bundles_in(
    s: &Surface,
    h: &DivisorClass,
    beta: &Rational,
    window: &Window,
    bound: i64,
    first: std::ops::RangeInclusive<i64>,
) -> Result<Vec<ChernCharacter>> {
    let rho = s.rank();
    // normalized slope of O(L) is Σ L_i w_i with w = gram · H / H²
    let hh = s.square(h)?;
    let w: Vec<Rational> = s
        .gram()
        .iter()
        .map(|row| {
            row.iter()
                .zip(h.coords())
                .map(|(g, x)| g * x)
                .sum::<Rational>()
                / &hh
        })
        .collect();
    let lo = (*first.start()).max(-bound);
    let hi = (*first.end()).min(bound);
    let mut out = Vec::new();
    if lo > hi {
        return Ok(out);
    }
    let mut l = vec![-bound; rho];
    l[0] = lo;
    loop {
        let slope: Rational = l.iter().zip(&w).map(|(&a, b)| b * int(a)).sum();
        if window.contains(&slope, beta) {
            out.push(s.line_bundle(&DivisorClass::from_ints(&l))?);
        }
        // odometer over the remaining coordinates, then the first
        let mut k = rho - 1;
        loop {
            let top = if k == 0 { hi } else { bound };
            if l[k] < top {
                l[k] += 1;
                break;
            }
            if k == 0 {
                return Ok(out);
            }
            l[k] = -bound;
            k -= 1;
        }
    }
}

/// User-declared characters applicable at `h` that pass the rank and
/// Bogomolov screens and have slope in the window.
pub fn declared_candidates(
    s: &Surface,
    h: &DivisorClass,
    beta: &Rational,
    window: &Window,
    max_rank: i64,
) -> Result<Vec<ChernCharacter>> {
    let mut out = Vec::new();
    for sc in s.stable_characters() {
        let v = &sc.character;
        let applies = match &sc.applicability {
            Applicability::AllPolarizations => true,
            Applicability::FixedH(h0) => same_ray(h0, h),
        };
        if !applies || v.rank < 1 || v.rank > max_rank || !s.bogomolov_ok(v)? {
            continue;
        }
        if window.contains(&s.normalized_slope(v, h)?, beta) {
            out.push(v.clone());
        }
    }
    Ok(out)
}

/// All candidate characters with slope in the window, sorted and deduplicated.
pub fn enumerate_window(
    s: &Surface,
    h: &DivisorClass,
    beta: &Rational,
    window: &Window,
    bx: &EnumerationBox,
) -> Result<Vec<ChernCharacter>> {
    s.require_ample(h)?;
    let n = bx.coord_bound;
    let mut out = line_bundles_in(s, h, beta, window, n, -n..=n)?;
    out.extend(declared_candidates(s, h, beta, window, bx.max_rank)?);
    out.sort();
    out.dedup();
    Ok(out)
}

/// Candidates with `|μ − β| <= δ`.
pub fn enumerate_candidates(
    s: &Surface,
    h: &DivisorClass,
    beta: &Rational,
    delta: &Rational,
    bx: &EnumerationBox,
) -> Result<Vec<ChernCharacter>> {
    if delta.is_negative() {
        return Err(Error::BadParameter(format!("negative window {delta}")));
    }
    enumerate_window(s, h, beta, &Window::Closed(delta.clone()), bx)
}

fn sup_of(
    s: &Surface,
    h: &DivisorClass,
    d: &DivisorClass,
    candidates: impl IntoIterator<Item = ChernCharacter>,
) -> Result<Sup> {
    let mut best = Sup::empty();
    for v in candidates {
        let value = normalized_ch2(s, &v, h, d)?;
        best = best.merge(Sup {
            value: Extended::Finite(value),
            witness: Some(v),
        });
    }
    Ok(best)
}

/// Pointwise sup at slope exactly β, with the line-bundle box split into
/// `parts` slabs along the first coordinate and merged by max.
pub fn phi_at_slope_partitioned(
    s: &Surface,
    h: &DivisorClass,
    d: &DivisorClass,
    beta: &Rational,
    bx: &EnumerationBox,
    parts: usize,
) -> Result<Sup> {
    s.require_ample(h)?;
    s.check_dim(d)?;
    let n = bx.coord_bound;
    let window = Window::Closed(Rational::zero());
    let parts = parts.max(1) as i64;
    let width = (2 * n + 1 + parts - 1) / parts;
    let mut best = sup_of(
        s,
        h,
        d,
        declared_candidates(s, h, beta, &window, bx.max_rank)?,
    )?;
    for p in 0..parts {
        let lo = -n + p * width;
        let slab = line_bundles_in(s, h, beta, &window, n, lo..=lo + width - 1)?;
        best = best.merge(sup_of(s, h, d, slab)?);
    }
    Ok(best)
}

/// Sup of `(ch2 − D·c1)/(H²·r)` over candidates of slope exactly β; the
/// empty sup is `−∞` with no witness.
pub fn phi_at_slope(
    s: &Surface,
    h: &DivisorClass,
    d: &DivisorClass,
    beta: &Rational,
    bx: &EnumerationBox,
) -> Result<Sup> {
    phi_at_slope_partitioned(s, h, d, beta, bx, 1)
}

pub fn check_grid(grid: &[Rational]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid("window grid has no entries".into()));
    }
    if let Some(bad) = grid.iter().find(|d| !d.is_positive()) {
        return Err(Error::BadParameter(format!("window {bad} is not positive")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] >= w[0]) {
        return Err(Error::BadParameter(format!(
            "window grid not strictly decreasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Full bracket: closed-form upper bound, pointwise sup, and punctured-window
/// sups along a strictly decreasing grid of half-widths.
pub fn phi_profile(
    s: &Surface,
    h: &DivisorClass,
    d: &DivisorClass,
    beta: &Rational,
    bx: &EnumerationBox,
    grid: &[Rational],
    convention: Convention,
) -> Result<PhiBracket> {
    check_grid(grid)?;
    let upper = phi_upper(s, h, d, beta)?;
    let pointwise = phi_at_slope(s, h, d, beta, bx)?;
    let widest = enumerate_window(s, h, beta, &Window::Punctured(grid[0].clone()), bx)?;
    let mut window_profile = Vec::with_capacity(grid.len());
    for delta in grid {
        let window = Window::Punctured(delta.clone());
        let mut inside = Vec::new();
        for v in &widest {
            if window.contains(&s.normalized_slope(v, h)?, beta) {
                inside.push(v.clone());
            }
        }
        window_profile.push(WindowSup {
            delta: delta.clone(),
            sup: sup_of(s, h, d, inside)?,
        });
    }
    Ok(PhiBracket {
        upper,
        pointwise,
        window_profile,
        convention,
    })
}
