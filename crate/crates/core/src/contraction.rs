//! Explicit contraction of the region `{Φ < α}` onto a base point.
//!
//! A path is made of three phases. `F` lifts α above the continuous majorant
//! `g = phi_upper + 1`, `G` slides α down onto the graph of `g`, and `Base`
//! moves `(λ, H, D, β)` linearly to the base coordinate while α rides the graph.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, Surface};
use crate::lepotier::{phi_upper, upper_formula};
use crate::rational::{int, ratio, to_f64, Rational, RationalExt, Scalar};
use crate::region::{BaseCoordinate, GeoPoint, Lambda};

pub type RegionPoint = GeoPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    F,
    G,
    Base,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::F => "F",
            Phase::G => "G",
            Phase::Base => "Base",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSample {
    pub t: Rational,
    pub point: GeoPoint,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPath {
    pub samples: Vec<PathSample>,
    pub base_point: GeoPoint,
}

/// `phi_upper(H, D, β) + 1`.
pub fn g_majorant(s: &Surface, z: &BaseCoordinate) -> Result<Rational> {
    Ok(phi_upper(s, &z.h, &z.d, &z.beta)? + int(1))
}

fn check_t<T: Scalar>(t: &T) -> Result<()> {
    if *t >= T::zero() && *t <= T::one() {
        Ok(())
    } else {
        Err(Error::BadParameter(
            "homotopy parameter outside [0, 1]".into(),
        ))
    }
}

/// `max{α, (g − α)·t + α}`.
pub fn homotopy_f<T: Scalar>(alpha: &T, t: &T, g: &T) -> Result<T> {
    check_t(t)?;
    let moved = (g.clone() - alpha.clone()) * t.clone() + alpha.clone();
    Ok(if moved > *alpha { moved } else { alpha.clone() })
}

/// `α(1 − t) + g·t`, defined for `α >= g`.
pub fn homotopy_g<T: Scalar>(alpha: &T, t: &T, g: &T) -> Result<T> {
    check_t(t)?;
    if alpha < g {
        return Err(Error::PreconditionViolated("G needs α >= g".into()));
    }
    Ok(alpha.clone() * (T::one() - t.clone()) + g.clone() * t.clone())
}

/// `(1 − t)·z + t·z₀` componentwise.
pub fn base_contraction(
    s: &Surface,
    z: &BaseCoordinate,
    t: &Rational,
    z0: &BaseCoordinate,
) -> Result<BaseCoordinate> {
    check_t(t)?;
    z.check(s)?;
    z0.check(s)?;
    Ok(segment(z, t, z0))
}

// H stays ample along the segment because the ample cone is convex.
fn segment(z: &BaseCoordinate, t: &Rational, z0: &BaseCoordinate) -> BaseCoordinate {
    BaseCoordinate {
        lambda: z.lambda.lerp(&z0.lambda, t),
        h: z.h.lerp(&z0.h, t),
        d: z.d.lerp(&z0.d, t),
        beta: &z.beta * (int(1) - t) + &z0.beta * t,
    }
}

/// `(0, H₀, 0, 0)` with `H₀` the surface's reference ample class.
pub fn canonical_base(s: &Surface) -> BaseCoordinate {
    BaseCoordinate::new(
        Lambda::zero(),
        s.reference_ample().clone(),
        DivisorClass::zero(s.rank()),
        Rational::zero(),
    )
}

/// Samples the three-phase contraction of `p`, `steps` samples per phase.
///
/// The start must satisfy `α > phi_upper(H, D, β)` unless `allow_uncertified`
/// is set.
pub fn contract(
    s: &Surface,
    p: &GeoPoint,
    steps: usize,
    base: Option<&BaseCoordinate>,
    allow_uncertified: bool,
) -> Result<ContractionPath> {
    if steps == 0 {
        return Err(Error::BadParameter(
            "steps per phase must be positive".into(),
        ));
    }
    p.z.check(s)?;
    let z0 = base.cloned().unwrap_or_else(|| canonical_base(s));
    z0.check(s)?;
    let g = g_majorant(s, &p.z)?;
    if !allow_uncertified && p.alpha <= &g - int(1) {
        return Err(Error::NotInside(format!(
            "α = {} does not exceed the upper bound {}",
            p.alpha,
            &g - int(1)
        )));
    }

    let k = steps as i64;
    let total = int(3 * k);
    let mut samples = Vec::with_capacity(3 * steps);
    let lifted = homotopy_f(&p.alpha, &int(1), &g)?;
    for i in 0..k {
        let local = ratio(i, k);
        let alpha = homotopy_f(&p.alpha, &local, &g)?;
        samples.push(PathSample {
            t: int(i) / &total,
            point: GeoPoint::at(p.z.clone(), alpha),
            phase: Phase::F,
        });
    }
    for i in 0..k {
        let local = ratio(i, k);
        let alpha = homotopy_g(&lifted, &local, &g)?;
        samples.push(PathSample {
            t: int(k + i) / &total,
            point: GeoPoint::at(p.z.clone(), alpha),
            phase: Phase::G,
        });
    }
    for i in 1..=k {
        let local = ratio(i, k);
        let z = segment(&p.z, &local, &z0);
        let alpha = upper_formula(s, &z.h, &z.d, &z.beta) + int(1);
        samples.push(PathSample {
            t: int(2 * k + i) / &total,
            point: GeoPoint::at(z, alpha),
            phase: Phase::Base,
        });
    }
    let base_alpha = g_majorant(s, &z0)?;
    Ok(ContractionPath {
        samples,
        base_point: GeoPoint::at(z0, base_alpha),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathViolation {
    NonIncreasingTime,
    PhaseOrder,
    CoordinateMoved,
    NotAmple,
    BelowStart,
    Decreasing,
    BelowMajorant,
    OffGraph,
    EndpointMismatch,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub index: usize,
    pub kind: PathViolation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathReport {
    pub violations: Vec<Flag>,
    /// Largest coordinate change between consecutive samples (sup norm).
    pub max_jump: f64,
}

impl PathReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn coordinate_vector(p: &GeoPoint) -> Vec<f64> {
    let mut v = vec![to_f64(&p.z.lambda.re), to_f64(&p.z.lambda.im)];
    v.extend(p.z.h.coords().iter().map(to_f64));
    v.extend(p.z.d.coords().iter().map(to_f64));
    v.push(to_f64(&p.z.beta));
    v.push(to_f64(&p.alpha));
    v
}

fn distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    coordinate_vector(a)
        .iter()
        .zip(coordinate_vector(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn phase_rank(p: Phase) -> u8 {
    match p {
        Phase::F => 0,
        Phase::G => 1,
        Phase::Base => 2,
    }
}

/// Rechecks the per-phase invariants of a path sample by sample.
pub fn verify_path(s: &Surface, path: &ContractionPath, tolerance: f64) -> PathReport {
    let mut violations = Vec::new();
    let mut flag = |index, kind| violations.push(Flag { index, kind });
    let samples = &path.samples;
    let Some(first) = samples.first() else {
        flag(0, PathViolation::Empty);
        return PathReport {
            violations,
            max_jump: 0.0,
        };
    };

    let mut max_jump: f64 = 0.0;
    for (i, w) in samples.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            flag(i + 1, PathViolation::NonIncreasingTime);
        }
        if phase_rank(w[1].phase) < phase_rank(w[0].phase) {
            flag(i + 1, PathViolation::PhaseOrder);
        }
        max_jump = max_jump.max(distance(&w[0].point, &w[1].point));
    }

    let start = &first.point;
    let mut prev_alpha: Option<&Rational> = None;
    for (i, sample) in samples.iter().enumerate() {
        let p = &sample.point;
        if !matches!(s.is_ample(&p.z.h), Ok(true)) || s.check_dim(&p.z.d).is_err() {
            flag(i, PathViolation::NotAmple);
            continue;
        }
        let g = upper_formula(s, &p.z.h, &p.z.d, &p.z.beta) + int(1);
        match sample.phase {
            Phase::F => {
                if p.z != start.z {
                    flag(i, PathViolation::CoordinateMoved);
                }
                if p.alpha < start.alpha {
                    flag(i, PathViolation::BelowStart);
                }
                if prev_alpha.is_some_and(|a| p.alpha < *a) {
                    flag(i, PathViolation::Decreasing);
                }
                prev_alpha = Some(&p.alpha);
            }
            Phase::G => {
                if p.z != start.z {
                    flag(i, PathViolation::CoordinateMoved);
                }
                if p.alpha < g {
                    flag(i, PathViolation::BelowMajorant);
                }
            }
            Phase::Base => {
                if p.alpha != g {
                    flag(i, PathViolation::OffGraph);
                }
            }
        }
    }

    let last = &samples[samples.len() - 1].point;
    if distance(last, &path.base_point) > tolerance {
        flag(samples.len() - 1, PathViolation::EndpointMismatch);
    }
    PathReport {
        violations,
        max_jump,
    }
}

/// Minimal union-find with path halving and union by size.
#[derive(Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// `1/z` with the value at 0 set to 0.
pub fn pinch_function(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        1.0 / z
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PinchResult {
    pub xs: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Component label per sample, row-major in `(x, α)`; `None` outside.
    pub labels: Vec<Option<usize>>,
    pub components: usize,
}

impl PinchResult {
    fn nearest(grid: &[f64], v: f64) -> usize {
        let mut best = 0;
        for (i, g) in grid.iter().enumerate() {
            if (g - v).abs() < (grid[best] - v).abs() {
                best = i;
            }
        }
        best
    }

    /// Label of the grid sample nearest to `(x, α)`.
    pub fn label_at(&self, x: f64, alpha: f64) -> Option<usize> {
        let i = Self::nearest(&self.xs, x);
        let j = Self::nearest(&self.alphas, alpha);
        self.labels[i * self.alphas.len() + j]
    }

    /// First sample (in row-major order) of each component.
    pub fn representatives(&self) -> Vec<(f64, f64)> {
        let mut reps = vec![None; self.components];
        for (k, label) in self.labels.iter().enumerate() {
            if let Some(c) = label {
                if reps[*c].is_none() {
                    let i = k / self.alphas.len();
                    let j = k % self.alphas.len();
                    reps[*c] = Some((self.xs[i], self.alphas[j]));
                }
            }
        }
        reps.into_iter().flatten().collect()
    }
}

fn axis(lo: f64, hi: f64, spacing: f64) -> Result<Vec<f64>> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::EmptyGrid(format!("range [{lo}, {hi}] is empty")));
    }
    let n = ((hi - lo) / spacing + 1e-9).floor() as usize;
    // positions from integer counts so that e.g. 0 lands exactly on 0
    let span = n as f64 * spacing;
    Ok((0..=n)
        .map(|i| {
            if n == 0 {
                lo
            } else {
                lo + span * i as f64 / n as f64
            }
        })
        .collect())
}

/// Connected components of the sampled set `{(z, α) : f(z) < α}` for the
/// pinch function, joining 4-neighbours.
pub fn pinch_demo(
    x_range: (f64, f64),
    alpha_range: (f64, f64),
    spacing: f64,
) -> Result<PinchResult> {
    if !spacing.is_finite() || spacing <= 0.0 {
        return Err(Error::BadParameter(format!(
            "spacing {spacing} must be positive"
        )));
    }
    let xs = axis(x_range.0, x_range.1, spacing)?;
    let alphas = axis(alpha_range.0, alpha_range.1, spacing)?;
    let (nx, na) = (xs.len(), alphas.len());
    let inside: Vec<bool> = xs
        .iter()
        .flat_map(|&x| alphas.iter().map(move |&a| pinch_function(x) < a))
        .collect();

    let mut uf = UnionFind::new(nx * na);
    for i in 0..nx {
        for j in 0..na {
            let k = i * na + j;
            if !inside[k] {
                continue;
            }
            if i + 1 < nx && inside[k + na] {
                uf.union(k, k + na);
            }
            if j + 1 < na && inside[k + 1] {
                uf.union(k, k + 1);
            }
        }
    }
    let mut root_label = std::collections::HashMap::new();
    let mut labels = Vec::with_capacity(nx * na);
    for (k, &is_in) in inside.iter().enumerate() {
        if is_in {
            let r = uf.find(k);
            let next = root_label.len();
            labels.push(Some(*root_label.entry(r).or_insert(next)));
        } else {
            labels.push(None);
        }
    }
    Ok(PinchResult {
        xs,
        alphas,
        labels,
        components: root_label.len(),
    })
}

impl ContractionPath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Whether every `G` and `Base` sample lies strictly above the upper bound.
    pub fn certified(&self, s: &Surface) -> Result<bool> {
        for sample in &self.samples {
            if sample.phase == Phase::F {
                continue;
            }
            let p = &sample.point;
            if !(&p.alpha - phi_upper(s, &p.z.h, &p.z.d, &p.z.beta)?).is_positive() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
