//! Text and CSV formatting. Rationals always print as canonical `p/q`.

use stabgeo::lepotier::Sup;
use stabgeo::rational::{join, round_down, round_up, RationalExt};
use stabgeo::{ChernCharacter, DivisorClass, Rational, Surface};

/// Coordinates joined by `;`, safe inside a CSV field.
pub fn coords(d: &DivisorClass) -> String {
    join(d.coords(), ";")
}

pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

/// `O(L)` for an integral line bundle, otherwise `(r, c1, ch2)`.
pub fn describe(s: &Surface, v: &ChernCharacter) -> String {
    let integral = v.c1.coords().iter().all(|c| c.is_integer());
    if v.rank == 1 && integral && s.line_bundle(&v.c1).is_ok_and(|l| l == *v) {
        format!("O{}", v.c1)
    } else {
        v.to_string()
    }
}

/// `value` plus the witness, if any, in words.
pub fn sup_text(s: &Surface, sup: &Sup) -> String {
    match &sup.witness {
        Some(w) => format!("{} (witness {})", sup.value, describe(s, w)),
        None => sup.value.to_string(),
    }
}

/// The three witness CSV fields `r, c1, ch2`, empty when absent.
pub fn witness_fields(w: Option<&ChernCharacter>) -> [String; 3] {
    match w {
        Some(v) => [v.rank.to_string(), coords(&v.c1), v.ch2.to_string()],
        None => Default::default(),
    }
}

/// A user-supplied real to 12 decimals, trailing zeros dropped.
pub fn real(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Grid-aligned rationals `lo <= x - err` and `hi >= x + err`.
pub fn enclose(x: f64, err: f64, precision: &Rational) -> Option<(Rational, Rational)> {
    Some((
        round_down(x - err, precision)?,
        round_up(x + err, precision)?,
    ))
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&width).enumerate() {
            out.push_str(cell);
            if i + 1 < cells.len() {
                out.push_str(&" ".repeat(w - cell.chars().count() + 2));
            }
        }
        out.push('\n');
        out
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
