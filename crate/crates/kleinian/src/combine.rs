//! Constructive Klein-Maskit combination: amalgamated free products of
//! marked blocks over the cyclic parabolic subgroup J, HNN extension by a
//! vertical parabolic letter, syllable normal forms, and ping-pong
//! certification of nontriviality.
//!
//! A combined group cannot be constructed without its hypothesis checks
//! passing: spacing, per-block precise invariance, and (for the HNN letter)
//! the width inequality against half-planes certified in the amalgam.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariance::{check_precisely_invariant, Alphabet, InvarianceCertificate};
use crate::marked::MarkedGroup;
use crate::moebius::{ExtComplex, MoebiusMap};
use crate::region::{region_image, Region};
use crate::scalar::{Mode, Scalar};

/// One block of a combined group: the base group (boundary xi_1, centered at
/// height 0) and its conjugate at the assigned height.
#[derive(Debug, Clone)]
pub struct BlockEntry {
    pub base: MarkedGroup,
    pub group: MarkedGroup,
    pub height: Scalar,
}

#[derive(Debug, Clone)]
pub struct HnnLetter {
    /// Vertical translation length of the stable letter (a positive integer
    /// in the shuffle pipeline).
    pub p: Scalar,
    pub map: MoebiusMap,
}

/// Serializable record of the HNN width hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct HnnCertificate {
    pub p: f64,
    pub strip_bottom: f64,
    pub strip_top: f64,
    pub width: f64,
    /// The two half-plane checks follow from the amalgam's union certificate
    /// by subset monotonicity; this records the budget of that certificate.
    pub derived_from_union_at: usize,
}

/// Amalgamated product of blocks over J, with an optional HNN letter.
#[derive(Debug, Clone)]
pub struct CombinedGroup {
    pub id: String,
    pub blocks: Vec<BlockEntry>,
    pub c: Scalar,
    pub hnn: Option<HnnLetter>,
    pub block_certificates: Vec<InvarianceCertificate>,
    pub combined_certificate: Option<InvarianceCertificate>,
    pub hnn_certificate: Option<HnnCertificate>,
}

impl CombinedGroup {
    pub fn mode(&self) -> Mode {
        if self.blocks.iter().all(|b| b.group.mode() == Mode::Exact)
            && self.c.mode() == Mode::Exact
        {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    pub fn bottom_height(&self) -> Scalar {
        &self.blocks.first().unwrap().height - &self.c
    }

    pub fn top_height(&self) -> Scalar {
        &self.blocks.last().unwrap().height + &self.c
    }

    /// Reference region pair (H_{a_N + c}, H*_{a_1 - c}).
    pub fn reference_regions(&self) -> [Region; 2] {
        [
            Region::upper(self.top_height()),
            Region::lower(self.bottom_height()),
        ]
    }

    /// Flattened generator alphabet of all conjugated blocks (the HNN letter
    /// is not part of the amalgam alphabet). The fuzz band is inherited from
    /// the base blocks: any numeric block makes the whole alphabet fuzzy,
    /// with the tolerance conditioned on the top height (conjugation
    /// amplifies the blocks' entry noise by O(height^2)).
    pub fn alphabet(&self) -> Alphabet {
        let mut names = Vec::new();
        let mut mats = Vec::new();
        let mut fuzz = 0.0f64;
        for (i, b) in self.blocks.iter().enumerate() {
            for (n, m) in b.group.gen_names.iter().zip(&b.group.gens) {
                names.push(format!("b{i}.{n}"));
                mats.push(m.clone());
            }
            if b.base.kind == crate::marked::GroupKind::QuasifuchsianNumeric {
                fuzz = fuzz.max(crate::marked::conditioned_tolerance(&b.height));
            }
        }
        Alphabet {
            id: self.id.clone(),
            names,
            mats,
            fuzz,
        }
    }

    /// Presentation summary, e.g. "G1 *_J G2 *_J G3" or "(...) *_f".
    pub fn presentation(&self) -> String {
        let amalgam = self
            .blocks
            .iter()
            .map(|b| b.base.id.clone())
            .collect::<Vec<_>>()
            .join(" *_J ");
        match &self.hnn {
            None => amalgam,
            Some(h) => format!("({amalgam}) *_f  with f = xi_{{{} i}}", h.p),
        }
    }

    /// Matrix of a word letter.
    fn letter_map(&self, letter: &Letter) -> Result<MoebiusMap> {
        match letter {
            Letter::Gen { block, gen } => {
                let b = self
                    .blocks
                    .get(*block)
                    .ok_or_else(|| Error::Precondition(format!("no block {block}")))?;
                b.group
                    .gens
                    .get(*gen)
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("no generator {gen}")))
            }
            Letter::Xi => Ok(MoebiusMap::xi_one(self.mode())),
            Letter::Stable => self
                .hnn
                .as_ref()
                .map(|h| h.map.clone())
                .ok_or_else(|| Error::Precondition("group has no stable letter".into())),
        }
    }

    pub fn evaluate(&self, w: &Word) -> Result<MoebiusMap> {
        let mut out = MoebiusMap::identity(self.mode());
        for (letter, e) in &w.0 {
            out = out.compose(&self.letter_map(letter)?.pow(*e));
        }
        Ok(out)
    }
}

/// Letters of words over a combined group: block generators, the J generator
/// xi_1, and the optional stable letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Gen { block: usize, gen: usize },
    Xi,
    Stable,
}

/// A word: letters with nonzero exponents, adjacent equal letters merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word(pub Vec<(Letter, i64)>);

impl Word {
    pub fn reduced(letters: Vec<(Letter, i64)>) -> Word {
        let mut out: Vec<(Letter, i64)> = Vec::with_capacity(letters.len());
        for (l, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((ll, le)) if *ll == l => {
                    *le += e;
                    if *le == 0 {
                        out.pop();
                    }
                }
                _ => out.push((l, e)),
            }
        }
        Word(out)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend(other.0.iter().copied());
        Word::reduced(letters)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(l, e)| (l, -e)).collect())
    }
}

/// Conjugate a block by xi_{a i}: the paper's placement of a building block
/// at height a. The boundary word still evaluates to xi_1.
pub fn conjugate_block(g: &MarkedGroup, a: &Scalar) -> Result<MarkedGroup> {
    g.conjugated_vertical(a, format!("{}@{}", g.id, a))
}

/// Build the iterated amalgamated product of `blocks` placed at the given
/// heights, verifying the combination hypotheses:
///   - heights strictly increasing with gaps >= 2c,
///   - H_c and H*_{-c} (as a union) precisely J-invariant in every block up
///     to word length `word_budget`.
/// Hypothesis failures are errors; a combined group cannot exist without its
/// certificates.
pub fn amalgamate(
    id: impl Into<String>,
    blocks: Vec<(MarkedGroup, Scalar)>,
    c: Scalar,
    word_budget: usize,
) -> Result<CombinedGroup> {
    if blocks.is_empty() {
        return Err(Error::Precondition("no blocks".into()));
    }
    if c.re_sign() <= 0 || !c.is_real() {
        return Err(Error::Precondition("strip constant must be positive".into()));
    }
    let two = Scalar::exact_int(2, 0);
    for w in blocks.windows(2) {
        let gap = &w[1].1 - &w[0].1;
        if gap.re_sign() <= 0 {
            return Err(Error::hypothesis(
                "spacing",
                format!(
                    "heights must be strictly increasing ({} then {})",
                    w[0].1, w[1].1
                ),
            ));
        }
        if (&gap - &(&two * &c)).re_sign() < 0 {
            return Err(Error::hypothesis(
                "spacing",
                format!("gap {gap} between consecutive heights is below 2c = {}", &two * &c),
            ));
        }
    }

    let strip_regions = [Region::upper(c.clone()), Region::lower(-&c)];
    let mut block_certificates = Vec::with_capacity(blocks.len());
    let mut entries = Vec::with_capacity(blocks.len());
    for (base, height) in blocks {
        let alpha = Alphabet::from_marked(&base);
        let outcome = check_precisely_invariant(&alpha, &strip_regions, word_budget)?;
        match outcome {
            crate::invariance::InvarianceOutcome::Certificate(cert) => {
                block_certificates.push(cert)
            }
            crate::invariance::InvarianceOutcome::Violation(v) => {
                return Err(Error::hypothesis(
                    "precise-invariance",
                    format!(
                        "block {} violates H_{c} / H*_{} invariance: witness {}",
                        base.id,
                        -&c,
                        v.witness_word
                    ),
                ));
            }
        }
        let group = conjugate_block(&base, &height)?;
        entries.push(BlockEntry {
            base,
            group,
            height,
        });
    }

    Ok(CombinedGroup {
        id: id.into(),
        blocks: entries,
        c,
        hnn: None,
        block_certificates,
        combined_certificate: None,
        hnn_certificate: None,
    })
}

/// Run the combined-group check: H_{a_N + c} union H*_{a_1 - c} precisely
/// J-invariant over the flattened alphabet up to `word_budget`. Attaches and
/// returns the certificate; a violation is a hypothesis error (it falsifies
/// the construction).
pub fn certify_combined(
    group: &mut CombinedGroup,
    word_budget: usize,
) -> Result<&InvarianceCertificate> {
    let regions = group.reference_regions();
    let outcome = check_precisely_invariant(&group.alphabet(), &regions, word_budget)?;
    match outcome {
        crate::invariance::InvarianceOutcome::Certificate(cert) => {
            group.combined_certificate = Some(cert);
            Ok(group.combined_certificate.as_ref().unwrap())
        }
        crate::invariance::InvarianceOutcome::Violation(v) => Err(Error::hypothesis(
            "precise-invariance",
            format!(
                "combined reference region not precisely invariant: witness {}",
                v.witness_word
            ),
        )),
    }
}

/// Adjoin the stable letter f = xi_{p i}. Hypotheses (checked):
///   - width of the strip (a_1 - c, a_N + 3c) is strictly less than p;
///   - both complementary half-planes H_{a_N + 3c} and H*_{a_1 - c} are
///     precisely J-invariant in the amalgam. These follow from the union
///     certificate at the same budget: a J-invariant subset of a precisely
///     invariant set is precisely invariant, and each component of a
///     precisely invariant union is precisely invariant.
pub fn hnn_extend(
    mut group: CombinedGroup,
    p: Scalar,
    word_budget: usize,
) -> Result<CombinedGroup> {
    if group.hnn.is_some() {
        return Err(Error::Precondition("group already has a stable letter".into()));
    }
    if p.re_sign() <= 0 || !p.is_real() {
        return Err(Error::Precondition("translation length must be positive".into()));
    }
    let three = Scalar::exact_int(3, 0);
    let bottom = group.bottom_height();
    let top = &group.blocks.last().unwrap().height + &(&three * &group.c);
    let width = &top - &bottom;
    if (&p - &width).re_sign() <= 0 {
        return Err(Error::hypothesis(
            "hnn-width",
            format!("strip width {width} is not less than p = {p}"),
        ));
    }
    let needs_cert = match &group.combined_certificate {
        Some(cert) => cert.word_length < word_budget,
        None => true,
    };
    if needs_cert {
        certify_combined(&mut group, word_budget)?;
    }
    let budget = group.combined_certificate.as_ref().unwrap().word_length;
    group.hnn_certificate = Some(HnnCertificate {
        p: p.to_c64().re,
        strip_bottom: bottom.to_c64().re,
        strip_top: top.to_c64().re,
        width: width.to_c64().re,
        derived_from_union_at: budget,
    });
    let i = match p.mode() {
        Mode::Exact => Scalar::exact_int(0, 1),
        Mode::Float => Scalar::from_f64(0.0, 1.0),
    };
    group.hnn = Some(HnnLetter {
        map: MoebiusMap::translation(&i * &p),
        p,
    });
    Ok(group)
}

// ---------------------------------------------------------------------------
// Normal forms

struct Syllable {
    block: usize,
    tokens: Vec<(Letter, i64)>,
    matrix: MoebiusMap,
}

/// One segment between stable letters: alternating non-J block syllables and
/// a trailing xi power.
struct Segment {
    syllables: Vec<Syllable>,
    tail: i64,
}

impl CombinedGroup {
    /// Canonical normal form: alternating non-J block syllables (canonical
    /// J-coset representatives, with xi powers extracted to the right),
    /// stable-letter runs with Britton pinches applied (the stable letter
    /// commutes with J), and a single trailing xi power. Idempotent; the
    /// result is empty exactly when the word is trivial in the presentation.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        let w = Word::reduced(w.0.clone());
        // Split into segments between stable-letter runs.
        let mut segments: Vec<Vec<(Letter, i64)>> = vec![Vec::new()];
        let mut stable_runs: Vec<i64> = Vec::new();
        for &(l, e) in &w.0 {
            match l {
                Letter::Stable => {
                    stable_runs.push(e);
                    segments.push(Vec::new());
                }
                _ => segments.last_mut().unwrap().push((l, e)),
            }
        }

        // Britton pass at the token level: a segment between stable letters
        // that evaluates into J commutes through, merging the runs.
        loop {
            let mut pinched = false;
            let mut i = 1;
            while i + 1 <= stable_runs.len() {
                // segment i sits between stable_runs[i-1] and stable_runs[i]
                let m = self.evaluate(&Word::reduced(segments[i].clone()))?;
                if let Some(t) = xi_power_i64(&m)? {
                    let moved: Vec<(Letter, i64)> = if t == 0 {
                        Vec::new()
                    } else {
                        vec![(Letter::Xi, t)]
                    };
                    segments[i - 1].extend(moved);
                    let merged = stable_runs[i - 1] + stable_runs[i];
                    segments.remove(i);
                    stable_runs.remove(i);
                    if merged == 0 {
                        // f^0 disappears: concatenate neighbors.
                        let rest = segments.remove(i);
                        segments[i - 1].extend(rest);
                        stable_runs.remove(i - 1);
                    } else {
                        stable_runs[i - 1] = merged;
                    }
                    pinched = true;
                } else {
                    i += 1;
                }
            }
            if !pinched {
                break;
            }
        }

        // Amalgam normal form per segment, threading the xi carry through
        // stable letters (the stable letter commutes with xi).
        let mut out: Vec<(Letter, i64)> = Vec::new();
        let mut carry: i64 = 0;
        for (idx, seg) in segments.iter().enumerate() {
            let segment = self.segment_normal_form(seg, carry)?;
            for syl in &segment.syllables {
                out.extend(syl.tokens.iter().copied());
            }
            carry = segment.tail;
            if idx < stable_runs.len() {
                out.push((Letter::Stable, stable_runs[idx]));
            }
        }
        if carry != 0 {
            out.push((Letter::Xi, carry));
        }
        Ok(Word::reduced(out))
    }

    /// Stack syllabification of one segment, with incoming xi carry.
    fn segment_normal_form(&self, tokens: &[(Letter, i64)], incoming: i64) -> Result<Segment> {
        let mut stack: Vec<Syllable> = Vec::new();
        let mut pending: i64 = incoming;
        for &(l, e) in tokens {
            match l {
                Letter::Xi => pending += e,
                Letter::Stable => unreachable!("segments carry no stable letters"),
                Letter::Gen { block, gen } => {
                    let gmat = self.letter_map(&Letter::Gen { block, gen })?.pow(e);
                    let mut prefix: Vec<(Letter, i64)> = Vec::new();
                    if pending != 0 {
                        prefix.push((Letter::Xi, pending));
                    }
                    prefix.push((Letter::Gen { block, gen }, e));
                    let xi_pending = MoebiusMap::xi_one(self.mode()).pow(pending);
                    pending = 0;
                    match stack.last_mut() {
                        Some(top) if top.block == block => {
                            top.tokens.extend(prefix);
                            top.matrix = top.matrix.compose(&xi_pending).compose(&gmat);
                            if let Some(t) = xi_power_i64(&top.matrix)? {
                                pending = t;
                                stack.pop();
                            }
                        }
                        _ => {
                            let matrix = xi_pending.compose(&gmat);
                            if let Some(t) = xi_power_i64(&matrix)? {
                                pending = t;
                            } else {
                                stack.push(Syllable {
                                    block,
                                    tokens: prefix,
                                    matrix,
                                });
                            }
                        }
                    }
                }
            }
        }
        // Canonicalize J-coset representatives left to right: each syllable
        // is right-multiplied by the xi power putting the real part of its
        // pole into [0, 1); the compensating power migrates rightward into
        // the next syllable, and off the end into the segment tail.
        let mut carry: i64 = 0;
        for syl in stack.iter_mut() {
            if carry != 0 {
                syl.tokens.insert(0, (Letter::Xi, carry));
                syl.matrix = MoebiusMap::xi_one(self.mode())
                    .pow(carry)
                    .compose(&syl.matrix);
            }
            let shift = coset_shift(&syl.matrix);
            if shift != 0 {
                syl.tokens.push((Letter::Xi, shift));
                syl.matrix = syl
                    .matrix
                    .compose(&MoebiusMap::xi_one(self.mode()).pow(shift));
            }
            syl.tokens = Word::reduced(std::mem::take(&mut syl.tokens)).0;
            carry = -shift;
        }
        Ok(Segment {
            syllables: stack,
            tail: carry + pending,
        })
    }
}

/// xi power with an i64 exponent; words whose J powers exceed i64 are
/// rejected rather than silently wrapped.
fn xi_power_i64(m: &MoebiusMap) -> Result<Option<i64>> {
    match m.xi_power() {
        None => Ok(None),
        Some(b) => i64::try_from(b)
            .map(Some)
            .map_err(|_| Error::Precondition("xi power exceeds i64".into())),
    }
}

/// The right xi-power shift putting Re(pole) into [0, 1); 0 for affine maps.
fn coset_shift(m: &MoebiusMap) -> i64 {
    if m.c.is_zero_tol(1e-12) {
        return 0;
    }
    let pole = -&(&m.d / &m.c);
    match &pole {
        Scalar::Exact(_) => {
            let r = pole.real_part().as_rational().unwrap();
            let f = r.floor().to_integer();
            i64::try_from(f).unwrap_or(0)
        }
        Scalar::Float(z) => z.re.floor() as i64,
    }
}

// ---------------------------------------------------------------------------
// Ping-pong certification

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "regime", rename_all = "lowercase")]
pub enum PingPongRegime {
    Exhaustive,
    Randomized { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct PingPongCertificate {
    pub group: String,
    pub depth: usize,
    pub words_checked: u64,
    pub skipped_trivial: u64,
    pub regime: PingPongRegime,
}

#[derive(Debug, Clone)]
pub struct PingPongViolation {
    pub word: Word,
    pub description: String,
}

/// Certify that every examined nonempty normal-form word maps the reference
/// region H_{a_N+c} union H*_{a_1-c} into the closed middle strip and moves
/// the marker point (infinity) strictly inside it, witnessing a nontrivial
/// isometry for every such word.
///
/// Words are alternating-block single-generator syllables. Depth <= 3 is
/// enumerated exhaustively; beyond that a seeded sample of `samples` words
/// of exactly `depth` syllables is drawn.
pub fn ping_pong_certify(
    group: &CombinedGroup,
    depth: usize,
    seed: u64,
    samples: u64,
) -> std::result::Result<PingPongCertificate, Box<PingPongViolation>> {
    let exhaustive = depth <= 3;
    let mut checked = 0u64;
    let mut skipped = 0u64;

    let syllables: Vec<(usize, Letter, i64)> = group
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(bi, b)| {
            (0..b.group.gens.len()).flat_map(move |g| {
                [
                    (bi, Letter::Gen { block: bi, gen: g }, 1i64),
                    (bi, Letter::Gen { block: bi, gen: g }, -1i64),
                ]
            })
        })
        .collect();

    let verify_word = |word: &Word| -> std::result::Result<bool, Box<PingPongViolation>> {
        let nf = group.normal_form(word).map_err(|e| {
            Box::new(PingPongViolation {
                word: word.clone(),
                description: format!("normal form failed: {e}"),
            })
        })?;
        if nf.is_empty() {
            return Ok(false);
        }
        let m = group.evaluate(word).map_err(|e| {
            Box::new(PingPongViolation {
                word: word.clone(),
                description: format!("evaluation failed: {e}"),
            })
        })?;
        let bottom = group.bottom_height();
        let top = group.top_height();
        for r in group.reference_regions() {
            let img = region_image(&m, &r).map_err(|e| {
                Box::new(PingPongViolation {
                    word: word.clone(),
                    description: format!("image failed: {e}"),
                })
            })?;
            if !img.contained_in_strip(&bottom, &top) {
                return Err(Box::new(PingPongViolation {
                    word: word.clone(),
                    description: format!("image {img} escapes the middle strip"),
                }));
            }
        }
        // Marker: infinity lies in the reference region; its image must land
        // strictly inside the strip, so the word is a nontrivial isometry.
        match m.apply(&ExtComplex::Infinity) {
            ExtComplex::Infinity => {
                return Err(Box::new(PingPongViolation {
                    word: word.clone(),
                    description: "marker point stays at infinity".into(),
                }))
            }
            ExtComplex::Finite(z) => {
                let im = z.imag_part();
                if !((&im - &bottom).re_sign() > 0 && (&top - &im).re_sign() > 0) {
                    return Err(Box::new(PingPongViolation {
                        word: word.clone(),
                        description: "marker image not strictly inside the strip".into(),
                    }));
                }
            }
        }
        Ok(true)
    };

    if exhaustive {
        // DFS over alternating-block syllable sequences of length 1..=depth.
        let mut stack: Vec<(Vec<(Letter, i64)>, usize)> = syllables
            .iter()
            .rev()
            .map(|&(bi, l, e)| (vec![(l, e)], bi))
            .collect();
        while let Some((tokens, last_block)) = stack.pop() {
            let word = Word::reduced(tokens.clone());
            if word.is_empty() {
                skipped += 1;
            } else if verify_word(&word)? {
                checked += 1;
            } else {
                skipped += 1;
            }
            if tokens.len() < depth {
                for &(bi, l, e) in syllables.iter().rev() {
                    if bi == last_block {
                        continue;
                    }
                    let mut next = tokens.clone();
                    next.push((l, e));
                    stack.push((next, bi));
                }
            }
        }
        Ok(PingPongCertificate {
            group: group.id.clone(),
            depth,
            words_checked: checked,
            skipped_trivial: skipped,
            regime: PingPongRegime::Exhaustive,
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nblocks = group.blocks.len();
        for _ in 0..samples {
            let mut tokens = Vec::with_capacity(depth);
            let mut last = usize::MAX;
            for _ in 0..depth {
                let mut bi = rng.random_range(0..nblocks);
                if nblocks > 1 {
                    while bi == last {
                        bi = rng.random_range(0..nblocks);
                    }
                }
                last = bi;
                let g = rng.random_range(0..group.blocks[bi].group.gens.len());
                let e = if rng.random_bool(0.5) { 1 } else { -1 };
                tokens.push((Letter::Gen { block: bi, gen: g }, e));
            }
            let word = Word::reduced(tokens);
            if word.is_empty() {
                skipped += 1;
            } else if verify_word(&word)? {
                checked += 1;
            } else {
                skipped += 1;
            }
        }
        Ok(PingPongCertificate {
            group: group.id.clone(),
            depth,
            words_checked: checked,
            skipped_trivial: skipped,
            regime: PingPongRegime::Randomized { seed, samples },
        })
    }
}

// ---------------------------------------------------------------------------
// Serialization of combined groups

impl CombinedGroup {
    pub fn to_description(&self) -> String {
        let mut out = String::new();
        out.push_str("combined-group v1\n");
        out.push_str(&format!("id {}\n", self.id));
        out.push_str(&format!("c {}\n", self.c));
        match &self.hnn {
            Some(h) => out.push_str(&format!("hnn {}\n", h.p)),
            None => out.push_str("hnn none\n"),
        }
        out.push_str(&format!("blocks {}\n", self.blocks.len()));
        for b in &self.blocks {
            out.push_str(&format!("begin-block height {}\n", b.height));
            out.push_str(&b.base.to_description());
            out.push_str("end-block\n");
        }
        for cert in &self.block_certificates {
            out.push_str(&format!(
                "certificate-block {}\n",
                serde_json::to_string(cert).unwrap()
            ));
        }
        if let Some(cert) = &self.combined_certificate {
            out.push_str(&format!(
                "certificate-combined {}\n",
                serde_json::to_string(cert).unwrap()
            ));
        }
        if let Some(cert) = &self.hnn_certificate {
            out.push_str(&format!(
                "certificate-hnn {}\n",
                serde_json::to_string(cert).unwrap()
            ));
        }
        out
    }

    /// Parse the combined-group format. Certificates embedded in the file are
    /// not trusted or restored; combination hypotheses are re-checked up to
    /// `word_budget`.
    pub fn from_description(text: &str, word_budget: usize) -> Result<CombinedGroup> {
        let mut lines = text.lines().peekable();
        let header = lines.next().unwrap_or_default();
        if !header.starts_with("combined-group") {
            return Err(Error::Parse("missing combined-group header".into()));
        }
        let mut id = String::from("combined");
        let mut c: Option<Scalar> = None;
        let mut hnn_p: Option<Scalar> = None;
        let mut blocks: Vec<(MarkedGroup, Scalar)> = Vec::new();
        while let Some(raw) = lines.next() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("certificate") {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next().unwrap() {
                "id" => id = parts.collect::<Vec<_>>().join(" "),
                "c" => {
                    c = Some(crate::scalar::parse_real(
                        &parts.collect::<Vec<_>>().join(" "),
                    )?)
                }
                "hnn" => {
                    let v = parts.next().unwrap_or("none");
                    if v != "none" {
                        hnn_p = Some(crate::scalar::parse_real(v)?);
                    }
                }
                "blocks" => {}
                "begin-block" => {
                    let height = match (parts.next(), parts.next()) {
                        (Some("height"), Some(v)) => crate::scalar::parse_real(v)?,
                        _ => return Err(Error::Parse("begin-block needs a height".into())),
                    };
                    let mut body = String::new();
                    for inner in lines.by_ref() {
                        if inner.trim() == "end-block" {
                            break;
                        }
                        body.push_str(inner);
                        body.push('\n');
                    }
                    blocks.push((MarkedGroup::from_description(&body)?, height));
                }
                other => return Err(Error::Parse(format!("unknown key {other}"))),
            }
        }
        let c = c.ok_or_else(|| Error::Parse("missing c".into()))?;
        let mut group = amalgamate(id, blocks, c, word_budget)?;
        if let Some(p) = hnn_p {
            group = hnn_extend(group, p, word_budget)?;
        }
        Ok(group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::punctured_torus_group;

    fn two_torus_amalgam() -> CombinedGroup {
        let t = punctured_torus_group().unwrap();
        amalgamate(
            "T2",
            vec![
                (t.clone(), Scalar::exact_int(0, 0)),
                (t, Scalar::exact_int(2, 0)),
            ],
            Scalar::exact_int(1, 0),
            4,
        )
        .unwrap()
    }

    #[test]
    fn conjugate_block_identity_at_zero() {
        let t = punctured_torus_group().unwrap();
        let same = conjugate_block(&t, &Scalar::exact_int(0, 0)).unwrap();
        for (a, b) in same.gens.iter().zip(&t.gens) {
            assert!(a.proj_eq(b));
        }
        let up = conjugate_block(&t, &Scalar::exact_int(3, 0)).unwrap();
        assert!(up.boundary_map().proj_eq(&MoebiusMap::xi_one(Mode::Exact)));
    }

    #[test]
    fn amalgamate_two_blocks() {
        let g = two_torus_amalgam();
        assert_eq!(g.blocks.len(), 2);
        assert_eq!(g.block_certificates.len(), 2);
        assert_eq!(g.presentation(), "G0(1) *_J G0(1)");
    }

    #[test]
    fn amalgamate_rejects_bad_spacing() {
        let t = punctured_torus_group().unwrap();
        let err = amalgamate(
            "bad",
            vec![
                (t.clone(), Scalar::exact_int(0, 0)),
                (t, Scalar::exact_int(1, 0)),
            ],
            Scalar::exact_int(1, 0),
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Hypothesis { .. }));
    }

    #[test]
    fn single_block_amalgam_certifies_union() {
        let t = punctured_torus_group().unwrap();
        let mut g = amalgamate(
            "single",
            vec![(t, Scalar::exact_int(5, 0))],
            Scalar::exact_int(1, 0),
            4,
        )
        .unwrap();
        let cert = certify_combined(&mut g, 4).unwrap();
        assert!(cert.margin.unwrap() > 0.0);
    }

    #[test]
    fn hnn_width_check() {
        // Strip of a two-block amalgam at heights 0 and 2 with c = 1:
        // bottom -1, top 2 + 3 = 5, width 6.
        let g = two_torus_amalgam();
        let err = hnn_extend(g.clone(), Scalar::exact_int(6, 0), 3).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { .. }));
        let ok = hnn_extend(g, Scalar::exact_int(7, 0), 3).unwrap();
        assert!(ok.hnn.is_some());
        let cert = ok.hnn_certificate.as_ref().unwrap();
        assert_eq!(cert.width, 6.0);
    }

    #[test]
    fn normal_form_of_stable_commutator_is_empty() {
        let g = two_torus_amalgam();
        let g = hnn_extend(g, Scalar::exact_int(7, 0), 3).unwrap();
        let w = Word(vec![
            (Letter::Stable, 1),
            (Letter::Xi, 1),
            (Letter::Stable, -1),
            (Letter::Xi, -1),
        ]);
        let nf = g.normal_form(&w).unwrap();
        assert!(nf.is_empty(), "normal form {:?}", nf);
    }

    #[test]
    fn normal_form_idempotent_and_two_syllable() {
        let g = two_torus_amalgam();
        let w = Word(vec![
            (Letter::Gen { block: 0, gen: 0 }, 1),
            (Letter::Gen { block: 1, gen: 1 }, 1),
        ]);
        let nf = g.normal_form(&w).unwrap();
        assert!(!nf.is_empty());
        let nf2 = g.normal_form(&nf).unwrap();
        assert_eq!(nf, nf2);
        // Evaluation factors through the normal form.
        assert!(g
            .evaluate(&w)
            .unwrap()
            .proj_eq(&g.evaluate(&nf).unwrap()));
    }

    #[test]
    fn normal_form_kills_inverse_pairs() {
        let g = two_torus_amalgam();
        let w = Word(vec![
            (Letter::Gen { block: 0, gen: 0 }, 1),
            (Letter::Gen { block: 1, gen: 0 }, 2),
            (Letter::Gen { block: 0, gen: 1 }, -1),
        ]);
        let ww = w.concat(&w.inverse());
        let nf = g.normal_form(&ww).unwrap();
        assert!(nf.is_empty(), "normal form {:?}", nf);
    }

    #[test]
    fn boundary_word_in_block_is_xi() {
        // The block boundary word evaluates to xi_1, so as a word over the
        // amalgam it normal-forms to the single trailing xi token.
        let g = two_torus_amalgam();
        let w = Word(vec![
            (Letter::Gen { block: 0, gen: 0 }, 1),
            (Letter::Gen { block: 0, gen: 1 }, 1),
            (Letter::Gen { block: 0, gen: 0 }, -1),
            (Letter::Gen { block: 0, gen: 1 }, -1),
        ]);
        let nf = g.normal_form(&w).unwrap();
        assert_eq!(nf, Word(vec![(Letter::Xi, 1)]));
    }

    #[test]
    fn ping_pong_certifies_two_block_amalgam() {
        let g = two_torus_amalgam();
        let cert = ping_pong_certify(&g, 2, 7, 0).unwrap();
        assert!(cert.words_checked > 0);
        assert_eq!(cert.skipped_trivial, 0);
    }

    #[test]
    fn combined_description_roundtrip() {
        let g = two_torus_amalgam();
        let text = g.to_description();
        let back = CombinedGroup::from_description(&text, 3).unwrap();
        assert_eq!(back.blocks.len(), 2);
        assert_eq!(back.blocks[1].height, Scalar::exact_int(2, 0));
        for (a, b) in back.blocks[0]
            .group
            .gens
            .iter()
            .zip(&g.blocks[0].group.gens)
        {
            assert!(a.proj_eq(b));
        }
    }
}
