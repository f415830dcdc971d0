//! Marked groups: finite generator lists with a distinguished boundary word
//! evaluating to the reference parabolic xi_1, plus the text description
//! format used by the CLI.

use std::fmt;

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::scalar::{parse_real, Mode, Scalar, TOL_CLASS};

/// A word in the generators of one group: (generator index, exponent) pairs
/// with nonzero exponents and no adjacent equal indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupWord(pub Vec<(usize, i64)>);

impl GroupWord {
    pub fn reduced(mut letters: Vec<(usize, i64)>) -> GroupWord {
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(letters.len());
        for (g, e) in letters.drain(..) {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((lg, le)) if *lg == g => {
                    *le += e;
                    if *le == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        GroupWord(out)
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn len_letters(&self) -> usize {
        self.0.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    FuchsianExact,
    QuasifuchsianNumeric,
}

/// A group with named generators and a boundary word realizing xi_1.
#[derive(Debug, Clone)]
pub struct MarkedGroup {
    pub id: String,
    pub gen_names: Vec<String>,
    pub gens: Vec<MoebiusMap>,
    pub boundary_word: GroupWord,
    pub genus: Option<u32>,
    pub kind: GroupKind,
}

impl MarkedGroup {
    pub fn new(
        id: impl Into<String>,
        gen_names: Vec<String>,
        gens: Vec<MoebiusMap>,
        boundary_word: GroupWord,
        genus: Option<u32>,
        kind: GroupKind,
    ) -> Result<Self> {
        let g = MarkedGroup {
            id: id.into(),
            gen_names,
            gens,
            boundary_word,
            genus,
            kind,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gen_names.len() != self.gens.len() {
            return Err(Error::Precondition("generator name/matrix mismatch".into()));
        }
        for (g, e) in &self.boundary_word.0 {
            if *g >= self.gens.len() || *e == 0 {
                return Err(Error::Precondition("boundary word out of range".into()));
            }
        }
        if let Some(genus) = self.genus {
            if self.gens.len() != 2 * genus as usize {
                return Err(Error::Precondition(format!(
                    "genus {genus} group must have {} generators, has {}",
                    2 * genus,
                    self.gens.len()
                )));
            }
        }
        let boundary = self.evaluate(&self.boundary_word);
        let xi1 = MoebiusMap::xi_one(self.mode());
        let ok = match self.kind {
            GroupKind::FuchsianExact => boundary.proj_eq(&xi1),
            GroupKind::QuasifuchsianNumeric => boundary.proj_eq_tol(&xi1, TOL_CLASS),
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "boundary word of {} evaluates to {boundary}, not xi_1",
                self.id
            )));
        }
        if self.kind == GroupKind::FuchsianExact {
            for (name, g) in self.gen_names.iter().zip(&self.gens) {
                if g.mode() != Mode::Exact {
                    return Err(Error::Precondition(format!(
                        "fuchsian_exact generator {name} is not exact"
                    )));
                }
                if !(g.a.is_real() && g.b.is_real() && g.c.is_real() && g.d.is_real()) {
                    return Err(Error::Precondition(format!(
                        "fuchsian_exact generator {name} has non-real entries"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        if self.gens.iter().all(|g| g.mode() == Mode::Exact) {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn evaluate(&self, w: &GroupWord) -> MoebiusMap {
        let mut out = MoebiusMap::identity(self.mode());
        for &(g, e) in &w.0 {
            out = out.compose(&self.gens[g].pow(e));
        }
        out
    }

    pub fn boundary_map(&self) -> MoebiusMap {
        self.evaluate(&self.boundary_word)
    }

    /// The group conjugated by xi_{h i} (vertical translation by real h).
    /// The boundary word still evaluates to xi_1 because xi_1 commutes with
    /// vertical translations; for numeric data the verification tolerance
    /// scales with h^2, which bounds how conjugation amplifies the noise
    /// already present in the entries.
    pub fn conjugated_vertical(&self, h: &Scalar, new_id: impl Into<String>) -> Result<MarkedGroup> {
        let conj = MoebiusMap::xi_vertical(h);
        let group = MarkedGroup {
            id: new_id.into(),
            gen_names: self.gen_names.clone(),
            gens: self.gens.iter().map(|g| g.conjugate_by(&conj)).collect(),
            boundary_word: self.boundary_word.clone(),
            genus: self.genus,
            // Vertical conjugates of real groups stop being real.
            kind: match self.kind {
                GroupKind::FuchsianExact if h.is_zero() => GroupKind::FuchsianExact,
                GroupKind::FuchsianExact => GroupKind::QuasifuchsianNumeric,
                k => k,
            },
        };
        let boundary = group.boundary_map();
        let xi1 = MoebiusMap::xi_one(group.mode());
        let ok = match self.kind {
            GroupKind::FuchsianExact => boundary.proj_eq(&xi1),
            GroupKind::QuasifuchsianNumeric => {
                boundary.proj_eq_tol(&xi1, conditioned_tolerance(h))
            }
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "conjugated boundary of {} drifted off xi_1: {boundary}",
                group.id
            )));
        }
        Ok(group)
    }

    /// Re-express float entries as exact dyadic rationals. Word evaluation
    /// over the result is free of rounding, which matters when blocks are
    /// conjugated to large heights (float products there cancel
    /// catastrophically); the data is still only as accurate as the floats
    /// it came from, so downstream checks use a fuzz band.
    pub fn rationalized(&self) -> Result<MarkedGroup> {
        use num_rational::BigRational;
        let lift = |s: &Scalar| -> Result<Scalar> {
            match s {
                Scalar::Exact(_) => Ok(s.clone()),
                Scalar::Float(z) => {
                    let re = BigRational::from_float(z.re)
                        .ok_or_else(|| Error::Degenerate("non-finite entry".into()))?;
                    let im = BigRational::from_float(z.im)
                        .ok_or_else(|| Error::Degenerate("non-finite entry".into()))?;
                    Ok(Scalar::exact_big(re, im))
                }
            }
        };
        let mut gens = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            gens.push(
                MoebiusMap {
                    a: lift(&g.a)?,
                    b: lift(&g.b)?,
                    c: lift(&g.c)?,
                    d: lift(&g.d)?,
                }
                .canonical(),
            );
        }
        MarkedGroup::new(
            self.id.clone(),
            self.gen_names.clone(),
            gens,
            self.boundary_word.clone(),
            self.genus,
            GroupKind::QuasifuchsianNumeric,
        )
    }

    /// Parse a word like "A B A^-1 B^-1" or "A^2 B^-3".
    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok}")))?,
                ),
                None => (tok, 1),
            };
            let idx = self
                .gen_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name}")))?;
            letters.push((idx, exp));
        }
        Ok(GroupWord::reduced(letters))
    }

    pub fn word_to_string(&self, w: &GroupWord) -> String {
        w.0.iter()
            .map(|&(g, e)| {
                if e == 1 {
                    self.gen_names[g].clone()
                } else {
                    format!("{}^{}", self.gen_names[g], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Serialize to the group description text format.
    pub fn to_description(&self) -> String {
        let mut out = String::new();
        out.push_str("group-description v1\n");
        out.push_str(&format!("id {}\n", self.id));
        out.push_str(&format!(
            "mode {}\n",
            match self.mode() {
                Mode::Exact => "exact",
                Mode::Float => "float",
            }
        ));
        out.push_str(&format!(
            "kind {}\n",
            match self.kind {
                GroupKind::FuchsianExact => "fuchsian_exact",
                GroupKind::QuasifuchsianNumeric => "quasifuchsian_numeric",
            }
        ));
        match self.genus {
            Some(g) => out.push_str(&format!("genus {g}\n")),
            None => out.push_str("genus unknown\n"),
        }
        for (name, g) in self.gen_names.iter().zip(&self.gens) {
            out.push_str(&format!(
                "gen {name} {} {} {} {} {} {} {} {}\n",
                fmt_part(&g.a.real_part()),
                fmt_part(&g.a.imag_part()),
                fmt_part(&g.b.real_part()),
                fmt_part(&g.b.imag_part()),
                fmt_part(&g.c.real_part()),
                fmt_part(&g.c.imag_part()),
                fmt_part(&g.d.real_part()),
                fmt_part(&g.d.imag_part()),
            ));
        }
        out.push_str(&format!(
            "boundary {}\n",
            self.word_to_string(&self.boundary_word)
        ));
        out
    }

    /// Parse the group description text format.
    pub fn from_description(text: &str) -> Result<MarkedGroup> {
        let mut id = String::from("group");
        let mut kind = GroupKind::QuasifuchsianNumeric;
        let mut genus: Option<u32> = None;
        let mut names = Vec::new();
        let mut gens = Vec::new();
        let mut boundary: Option<String> = None;
        let mut saw_header = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            match key {
                "group-description" => saw_header = true,
                "id" => id = parts.collect::<Vec<_>>().join(" "),
                "mode" => {} // implied by scalar syntax
                "kind" => {
                    kind = match parts.next() {
                        Some("fuchsian_exact") => GroupKind::FuchsianExact,
                        Some("quasifuchsian_numeric") => GroupKind::QuasifuchsianNumeric,
                        other => {
                            return Err(Error::Parse(format!(
                                "line {}: unknown kind {other:?}",
                                ln + 1
                            )))
                        }
                    }
                }
                "genus" => {
                    genus = match parts.next() {
                        Some("unknown") | None => None,
                        Some(v) => Some(v.parse::<u32>().map_err(|_| {
                            Error::Parse(format!("line {}: bad genus", ln + 1))
                        })?),
                    }
                }
                "gen" => {
                    let name = parts
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {}: gen needs a name", ln + 1)))?
                        .to_string();
                    let vals: Vec<Scalar> = parts
                        .map(parse_real)
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
                    if vals.len() != 8 {
                        return Err(Error::Parse(format!(
                            "line {}: gen needs 8 scalars, got {}",
                            ln + 1,
                            vals.len()
                        )));
                    }
                    let cx = |re: &Scalar, im: &Scalar| -> Scalar {
                        let i = match (re.mode(), im.mode()) {
                            (Mode::Exact, Mode::Exact) => Scalar::exact_int(0, 1),
                            _ => Scalar::from_f64(0.0, 1.0),
                        };
                        re + &(&i * im)
                    };
                    let m = MoebiusMap::new(
                        cx(&vals[0], &vals[1]),
                        cx(&vals[2], &vals[3]),
                        cx(&vals[4], &vals[5]),
                        cx(&vals[6], &vals[7]),
                    )?;
                    names.push(name);
                    gens.push(m);
                }
                "boundary" => boundary = Some(parts.collect::<Vec<_>>().join(" ")),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other}",
                        ln + 1
                    )))
                }
            }
        }
        if !saw_header {
            return Err(Error::Parse("missing group-description header".into()));
        }
        let boundary =
            boundary.ok_or_else(|| Error::Parse("missing boundary line".into()))?;
        let mut group = MarkedGroup {
            id,
            gen_names: names,
            gens,
            boundary_word: GroupWord(Vec::new()),
            genus,
            kind,
        };
        group.boundary_word = group.parse_word(&boundary)?;
        group.validate()?;
        Ok(group)
    }
}

fn fmt_part(s: &Scalar) -> String {
    match s {
        Scalar::Exact(_) => format!("{}", s),
        Scalar::Float(z) => format!("{:?}", z.re),
    }
}

/// Tolerance for comparisons on numeric data conjugated to height h: the
/// entry noise of order machine epsilon is amplified by at most O(h^2).
pub fn conditioned_tolerance(h: &Scalar) -> f64 {
    let hv = h.to_c64().norm();
    TOL_CLASS.max(64.0 * f64::EPSILON * (1.0 + hv * hv))
}

impl fmt::Display for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (rank {}, genus {:?})",
            self.id,
            self.rank(),
            self.genus
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> MarkedGroup {
        crate::fuchsian::punctured_torus_group().unwrap()
    }

    #[test]
    fn word_reduction() {
        let w = GroupWord::reduced(vec![(0, 1), (0, 1), (1, -1), (1, 1), (0, -2)]);
        assert_eq!(w, GroupWord(vec![]));
        let w = GroupWord::reduced(vec![(0, 1), (1, 2), (1, -1)]);
        assert_eq!(w, GroupWord(vec![(0, 1), (1, 1)]));
        assert_eq!(w.inverse(), GroupWord(vec![(1, -1), (0, -1)]));
    }

    #[test]
    fn description_roundtrip() {
        let g = torus();
        let text = g.to_description();
        let back = MarkedGroup::from_description(&text).unwrap();
        assert_eq!(back.rank(), g.rank());
        for (a, b) in back.gens.iter().zip(&g.gens) {
            assert!(a.proj_eq(b));
        }
        assert_eq!(back.boundary_word, g.boundary_word);
        assert_eq!(back.genus, g.genus);
    }

    #[test]
    fn malformed_descriptions_rejected() {
        assert!(MarkedGroup::from_description("nonsense").is_err());
        assert!(MarkedGroup::from_description("group-description v1\nboundary A\n").is_err());
    }

    #[test]
    fn parse_word_exponents() {
        let g = torus();
        let w = g.parse_word("A^2 B^-1 A").unwrap();
        assert_eq!(w.0, vec![(0, 2), (1, -1), (0, 1)]);
        assert!(g.parse_word("Z").is_err());
    }
}
