//! Surface description files (JSON or TOML).
//!
//! ```json
//! {
//!   "rank": 2,
//!   "gram": [[0, 1], [1, 0]],
//!   "ample": { "mode": "positive_cone", "reference": ["1", "1"] },
//!   "stable_characters": [
//!     { "rank": 2, "c1": ["1", "0"], "ch2": "-1/2", "applicability": "all_polarizations" },
//!     { "rank": 2, "c1": ["1", "1"], "ch2": "0", "applicability": { "fixed_H": ["1", "1"] } }
//!   ],
//!   "albanese_finite": true
//! }
//! ```
//!
//! Rationals are written as strings (`"p/q"`, `"3"`, `"0.25"`) or integers.

use std::path::Path;

use serde::Deserialize;

use crate::chern::ChernCharacter;
use crate::error::{Error, Result};
use crate::lattice::{AmpleSpec, Applicability, DivisorClass, StableCharacter, SurfaceData};
use crate::rational::{int, parse_rational, parse_rational_list, Rational, RationalExt};

#[derive(Deserialize)]
#[serde(untagged)]
enum Lit {
    Int(i64),
    Text(String),
    Float(f64),
}

impl Lit {
    fn value(&self) -> Result<Rational> {
        match self {
            Lit::Int(n) => Ok(int(*n)),
            Lit::Text(s) => parse_rational(s),
            Lit::Float(x) => Err(Error::Parse(format!(
                "bare float {x} is not exact; write rationals as strings such as \"1/3\""
            ))),
        }
    }
}

fn class(v: &[Lit]) -> Result<DivisorClass> {
    Ok(DivisorClass::new(
        v.iter().map(Lit::value).collect::<Result<_>>()?,
    ))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawGram {
    Nested(Vec<Vec<Lit>>),
    Flat(Vec<Lit>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAmple {
    mode: String,
    generators: Option<Vec<Vec<Lit>>>,
    reference: Option<Vec<Lit>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawApplicability {
    Tag(String),
    Fixed {
        #[serde(rename = "fixed_H", alias = "fixed_h")]
        fixed_h: Vec<Lit>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCharacter {
    #[serde(alias = "r")]
    rank: i64,
    c1: Vec<Lit>,
    ch2: Lit,
    applicability: Option<RawApplicability>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    rank: usize,
    gram: RawGram,
    ample: RawAmple,
    #[serde(default)]
    stable_characters: Vec<RawCharacter>,
    albanese_finite: Option<bool>,
}

fn gram_entry(l: &Lit) -> Result<i64> {
    let q = l.value()?;
    if !q.is_integer() {
        return Err(Error::Parse(format!("gram entry {q} is not an integer")));
    }
    q.to_i64()
        .ok_or_else(|| Error::Parse(format!("gram entry {q} is out of range")))
}

impl RawSurface {
    fn into_data(self) -> Result<SurfaceData> {
        let gram = match self.gram {
            RawGram::Nested(rows) => rows
                .iter()
                .map(|r| r.iter().map(gram_entry).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
            RawGram::Flat(flat) => {
                let n = self.rank;
                if flat.len() != n * n {
                    return Err(Error::Parse(format!(
                        "flat gram has {} entries, expected {}",
                        flat.len(),
                        n * n
                    )));
                }
                flat.chunks(n.max(1))
                    .map(|r| r.iter().map(gram_entry).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let ample = match self.ample.mode.as_str() {
            "polyhedral" => {
                let gens = self.ample.generators.ok_or_else(|| {
                    Error::Parse("polyhedral ample mode needs `generators`".into())
                })?;
                AmpleSpec::Polyhedral {
                    generators: gens.iter().map(|g| class(g)).collect::<Result<_>>()?,
                }
            }
            "positive_cone" => {
                let r = self.ample.reference.ok_or_else(|| {
                    Error::Parse("positive_cone ample mode needs `reference`".into())
                })?;
                AmpleSpec::PositiveCone {
                    reference: class(&r)?,
                }
            }
            other => return Err(Error::Parse(format!("unknown ample mode {other:?}"))),
        };
        let mut stable_characters = Vec::with_capacity(self.stable_characters.len());
        for c in self.stable_characters {
            let applicability = match c.applicability {
                None => Applicability::AllPolarizations,
                Some(RawApplicability::Tag(t)) if t == "all_polarizations" => {
                    Applicability::AllPolarizations
                }
                Some(RawApplicability::Tag(t)) => {
                    return Err(Error::Parse(format!("unknown applicability {t:?}")))
                }
                Some(RawApplicability::Fixed { fixed_h }) => {
                    Applicability::FixedH(class(&fixed_h)?)
                }
            };
            stable_characters.push(StableCharacter {
                character: ChernCharacter::new(c.rank, class(&c.c1)?, c.ch2.value()?),
                applicability,
            });
        }
        Ok(SurfaceData {
            rank: self.rank,
            gram,
            ample,
            stable_characters,
            albanese_finite: self.albanese_finite,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Toml,
}

pub fn parse_surface(text: &str, format: Format) -> Result<SurfaceData> {
    let raw: RawSurface = match format {
        Format::Json => serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
        Format::Toml => toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
    };
    raw.into_data()
}

/// Reads a surface file; `.toml` files are TOML, anything else is tried as
/// JSON first and then as TOML.
pub fn load_surface(path: &Path) -> Result<SurfaceData> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => parse_surface(&text, Format::Toml),
        Some("json") => parse_surface(&text, Format::Json),
        _ => parse_surface(&text, Format::Json).or_else(|_| parse_surface(&text, Format::Toml)),
    }
}

/// Parses a single Chern character, either compact `r;c1;ch2` (for example
/// `2;1,0;-1/2`) or a JSON object `{"rank": 2, "c1": ["1", "0"], "ch2": "-1/2"}`.
pub fn parse_character(text: &str) -> Result<ChernCharacter> {
    let t = text.trim();
    if t.starts_with('{') {
        let raw: RawCharacter = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.applicability.is_some() {
            return Err(Error::Parse("applicability is not meaningful here".into()));
        }
        return Ok(ChernCharacter::new(
            raw.rank,
            class(&raw.c1)?,
            raw.ch2.value()?,
        ));
    }
    let parts: Vec<&str> = t.split(';').collect();
    let [r, c1, ch2] = parts[..] else {
        return Err(Error::Parse(format!("expected `r;c1;ch2`, got {text:?}")));
    };
    let rank = parse_rational(r)?
        .to_i64()
        .ok_or_else(|| Error::Parse(format!("rank {r:?} is not an integer")))?;
    Ok(ChernCharacter::new(
        rank,
        DivisorClass::new(parse_rational_list(c1)?),
        parse_rational(ch2)?,
    ))
}
