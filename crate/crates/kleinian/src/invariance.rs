//! Word-length-truncated verification of precise J-invariance, per-instance
//! strip constants, strip confinement of sampled points, and the Jorgensen
//! necessary condition.
//!
//! J is always the cyclic parabolic subgroup generated by xi_1. All checks
//! enumerate reduced words up to a stated letter budget; certificates carry
//! the budget because the statements they support quantify over the whole
//! group.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::marked::MarkedGroup;
use crate::moebius::{commutator, jorgensen_quantity, MoebiusMap};
use crate::region::{region_disjoint, region_image, Region, RegionDesc};
use crate::scalar::{Mode, Scalar, TOL_CLASS};

/// A named generator list for enumeration. Combined groups flatten to this.
///
/// `fuzz` is the tolerance band for recognizing elements of J and for
/// accepting separation margins. It is zero for exactly constructed groups;
/// groups holding rationalized numeric data use the classification
/// tolerance, because their near-J words are only J up to the original
/// float noise.
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub id: String,
    pub names: Vec<String>,
    pub mats: Vec<MoebiusMap>,
    pub fuzz: f64,
}

impl Alphabet {
    pub fn from_marked(g: &MarkedGroup) -> Alphabet {
        Alphabet {
            id: g.id.clone(),
            names: g.gen_names.clone(),
            mats: g.gens.clone(),
            fuzz: match g.kind {
                crate::marked::GroupKind::FuchsianExact => 0.0,
                crate::marked::GroupKind::QuasifuchsianNumeric => crate::scalar::TOL_CLASS,
            },
        }
    }

    pub fn mode(&self) -> Mode {
        if self.mats.iter().all(|m| m.mode() == Mode::Exact) {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    fn signed_name(&self, letter: usize) -> String {
        let n = self.names.len();
        if letter < n {
            self.names[letter].clone()
        } else {
            format!("{}^-1", self.names[letter - n])
        }
    }

    fn signed_mats(&self) -> Vec<MoebiusMap> {
        let mut out = self.mats.clone();
        out.extend(self.mats.iter().map(|m| m.inverse()));
        out
    }

    pub fn word_string(&self, letters: &[usize]) -> String {
        letters
            .iter()
            .map(|&l| self.signed_name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Certificate that a region (or union of two regions) is precisely
/// J-invariant as far as the enumeration saw.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceCertificate {
    pub group: String,
    pub region: Vec<RegionDesc>,
    #[serde(rename = "L")]
    pub word_length: usize,
    pub examined: u64,
    /// Minimum separation margin over all tested elements; None when the
    /// check was vacuous (no non-J elements at this budget).
    pub margin: Option<f64>,
    pub mode: Mode,
    /// Subtrees rooted at elements of J that were skipped: their elements
    /// repeat the J-cosets of shorter enumerated words.
    pub pruned_subtrees: u64,
}

/// A concrete failure of precise invariance, with a re-verifiable witness.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub group: String,
    pub witness_word: String,
    /// Matrix entries of the witness, row major, as (re, im) pairs.
    pub witness_entries: [[f64; 2]; 4],
    #[serde(skip)]
    pub witness: Option<MoebiusMap>,
    /// Index of the region component whose image met `region_hit`.
    pub region_moved: usize,
    pub region_hit: usize,
    pub margin: f64,
}

impl Violation {
    /// Re-check the stored witness against the regions it claims to overlap.
    pub fn reverify(&self, regions: &[Region]) -> bool {
        let Some(w) = &self.witness else {
            return false;
        };
        if w.xi_power().is_some() {
            return false; // witness must not lie in J
        }
        let Ok(img) = region_image(w, &regions[self.region_moved]) else {
            return false;
        };
        !region_disjoint(&img, &regions[self.region_hit]).0
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum InvarianceOutcome {
    Certificate(InvarianceCertificate),
    Violation(Violation),
}

impl InvarianceOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, InvarianceOutcome::Certificate(_))
    }

    pub fn certificate(&self) -> Option<&InvarianceCertificate> {
        match self {
            InvarianceOutcome::Certificate(c) => Some(c),
            _ => None,
        }
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            InvarianceOutcome::Violation(v) => Some(v),
            _ => None,
        }
    }
}

struct SubtreeResult {
    examined: u64,
    pruned: u64,
    min_margin: f64,
    violation: Option<(Vec<usize>, Violation)>,
}

/// Check that B (one region or a union of two) is precisely J-invariant up
/// to reduced words of length `max_len` over the alphabet: every enumerated
/// element outside J must move every component of B off every component.
///
/// Precondition (checked): every component is invariant under z -> z + 1.
pub fn check_precisely_invariant(
    alpha: &Alphabet,
    regions: &[Region],
    max_len: usize,
) -> Result<InvarianceOutcome> {
    if regions.is_empty() || regions.len() > 2 {
        return Err(Error::Precondition(
            "expected one region or a union of two".into(),
        ));
    }
    for r in regions {
        if !r.is_xi1_invariant() {
            return Err(Error::Precondition(format!(
                "region {r} is not invariant under z -> z + 1"
            )));
        }
    }
    let mode = alpha.mode();
    let signed = alpha.signed_mats();
    let n = alpha.mats.len();

    let results: Vec<SubtreeResult> = (0..2 * n)
        .into_par_iter()
        .map(|first| {
            let mut res = SubtreeResult {
                examined: 0,
                pruned: 0,
                min_margin: f64::INFINITY,
                violation: None,
            };
            let mut seen: HashSet<Vec<crate::scalar::ExactKey>> = HashSet::new();
            let mut path = vec![first];
            let m = signed[first].clone();
            dfs_invariant(
                &signed,
                n,
                regions,
                max_len,
                mode,
                &m,
                &mut path,
                &mut seen,
                &mut res,
                alpha,
            );
            res
        })
        .collect();

    let mut examined = 0;
    let mut pruned = 0;
    let mut margin = f64::INFINITY;
    for res in &results {
        examined += res.examined;
        pruned += res.pruned;
        margin = margin.min(res.min_margin);
    }
    // Deterministic witness selection: first subtree in letter order, then
    // the DFS-order path recorded inside it.
    for res in results {
        if let Some((_, v)) = res.violation {
            return Ok(InvarianceOutcome::Violation(v));
        }
    }
    Ok(InvarianceOutcome::Certificate(InvarianceCertificate {
        group: alpha.id.clone(),
        region: regions.iter().map(RegionDesc::from).collect(),
        word_length: max_len,
        examined,
        margin: if margin.is_finite() { Some(margin) } else { None },
        mode,
        pruned_subtrees: pruned,
    }))
}

#[allow(clippy::too_many_arguments)]
fn dfs_invariant(
    signed: &[MoebiusMap],
    n: usize,
    regions: &[Region],
    max_len: usize,
    mode: Mode,
    m: &MoebiusMap,
    path: &mut Vec<usize>,
    seen: &mut HashSet<Vec<crate::scalar::ExactKey>>,
    res: &mut SubtreeResult,
    alpha: &Alphabet,
) {
    if res.violation.is_some() {
        return;
    }
    // Elements of J are allowed; their whole subtree repeats the J-cosets of
    // the shorter continuation words, which the enumeration reaches anyway.
    if m.xi_power_fuzzy(alpha.fuzz).is_some() {
        if path.len() < max_len {
            res.pruned += 1;
        }
        return;
    }

    // Deduplicate canonical double-coset representatives (exact mode only,
    // bounded set) so xi-translate repeats are tested once.
    let mut tested = true;
    if mode == Mode::Exact {
        if let Some(key) = coset_canonical(m).exact_key() {
            let key = key.to_vec();
            if seen.contains(&key) {
                tested = false;
            } else if seen.len() < 1 << 20 {
                seen.insert(key);
            }
        }
    }

    if tested {
        res.examined += 1;
        for (ri, r) in regions.iter().enumerate() {
            let img = match region_image(m, r) {
                Ok(img) => img,
                Err(_) => continue,
            };
            for (rj, target) in regions.iter().enumerate() {
                let (mut disjoint, margin) = region_disjoint(&img, target);
                // For rationalized numeric data a margin inside the fuzz
                // band cannot be certified.
                if disjoint && alpha.fuzz > 0.0 && !(margin > alpha.fuzz) {
                    disjoint = false;
                }
                if disjoint {
                    if margin.is_finite() {
                        res.min_margin = res.min_margin.min(margin);
                    }
                } else {
                    let e = m.entries_c64();
                    res.violation = Some((
                        path.clone(),
                        Violation {
                            group: alpha.id.clone(),
                            witness_word: alpha.word_string(path),
                            witness_entries: [
                                [e[0].re, e[0].im],
                                [e[1].re, e[1].im],
                                [e[2].re, e[2].im],
                                [e[3].re, e[3].im],
                            ],
                            witness: Some(m.clone()),
                            region_moved: ri,
                            region_hit: rj,
                            margin,
                        },
                    ));
                    return;
                }
            }
        }
    }

    if path.len() >= max_len {
        return;
    }
    let last = *path.last().unwrap();
    for l in 0..2 * n {
        if inverse_letter(l, n) == last {
            continue;
        }
        path.push(l);
        let next = m.compose(&signed[l]);
        dfs_invariant(signed, n, regions, max_len, mode, &next, path, seen, res, alpha);
        path.pop();
        if res.violation.is_some() {
            return;
        }
    }
}

fn inverse_letter(l: usize, n: usize) -> usize {
    if l < n {
        l + n
    } else {
        l - n
    }
}

/// Canonical representative of the double coset J g J: left and right
/// xi-powers are chosen so that g(inf) and g^-1(inf) have real part in
/// [0, 1). Affine elements are returned sign-canonical unchanged.
pub fn coset_canonical(m: &MoebiusMap) -> MoebiusMap {
    if m.c.is_zero() {
        return m.canonical();
    }
    let orbit = &m.a / &m.c; // g(inf)
    let pole = -&(&m.d / &m.c); // g^-1(inf)
    let s = -floor_re(&orbit);
    let t = floor_re(&pole);
    let xi = |k: i64| MoebiusMap::translation(match m.mode() {
        Mode::Exact => Scalar::exact_int(k, 0),
        Mode::Float => Scalar::from_f64(k as f64, 0.0),
    });
    xi(s).compose(m).compose(&xi(t))
}

fn floor_re(s: &Scalar) -> i64 {
    match s {
        Scalar::Exact(_) => {
            let r = s.real_part().as_rational().unwrap();
            let f = r.floor();
            f.to_integer().try_into().unwrap_or(0)
        }
        Scalar::Float(z) => z.re.floor() as i64,
    }
}

/// Collect the canonical double-coset representatives of all non-J elements
/// of reduced word length <= max_len.
fn collect_elements(alpha: &Alphabet, max_len: usize) -> Vec<MoebiusMap> {
    let signed = alpha.signed_mats();
    let n = alpha.mats.len();
    let mode = alpha.mode();
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<crate::scalar::ExactKey>> = HashSet::new();
    let mut stack: Vec<(MoebiusMap, usize, usize)> = (0..2 * n)
        .rev()
        .map(|l| (signed[l].clone(), l, 1))
        .collect();
    while let Some((m, last, len)) = stack.pop() {
        if m.xi_power_fuzzy(alpha.fuzz).is_some() {
            continue; // J-subtree: redundant, as in the invariance DFS
        }
        let canon = coset_canonical(&m);
        let fresh = if mode == Mode::Exact {
            match canon.exact_key() {
                Some(k) => seen.insert(k.to_vec()),
                None => true,
            }
        } else {
            true
        };
        if fresh {
            out.push(canon);
        }
        if len < max_len {
            for l in 0..2 * n {
                if inverse_letter(l, n) == last {
                    continue;
                }
                stack.push((m.compose(&signed[l]), l, len + 1));
            }
        }
    }
    out
}

/// The least c (to within `tol`, default bracket 1e-12) such that every
/// enumerated non-J element of word length <= max_len maps H_c off H_c and
/// H*_{-c} off H*_{-c}. Returns 0 for groups with no constraining elements
/// and infinity when some enumerated element fixes infinity (no strip can
/// work). The predicate is monotone in c, so the value is found by bisection
/// with exact region tests at dyadic heights.
pub fn min_strip_constant(alpha: &Alphabet, max_len: usize) -> f64 {
    let elements = collect_elements(alpha, max_len);
    if elements.is_empty() {
        return 0.0;
    }
    let mode = alpha.mode();
    let mk = |v: f64| -> Scalar {
        match mode {
            Mode::Exact => {
                let r = num_rational::BigRational::from_float(v).unwrap();
                Scalar::exact_real(r)
            }
            Mode::Float => Scalar::from_f64(v, 0.0),
        }
    };
    let fuzz = alpha.fuzz;
    let clears = move |r: &Region, target: &Region| -> bool {
        let (disjoint, margin) = region_disjoint(r, target);
        disjoint && (fuzz == 0.0 || margin > fuzz)
    };
    let passes = |c: f64| -> bool {
        let upper = Region::upper(mk(c));
        let lower = Region::lower(mk(-c));
        elements.iter().all(|g| {
            let up = match region_image(g, &upper) {
                Ok(r) => clears(&r, &upper),
                Err(_) => false,
            };
            if !up {
                return false;
            }
            match region_image(g, &lower) {
                Ok(r) => clears(&r, &lower),
                Err(_) => false,
            }
        })
    };
    // Affine non-J elements make every strip fail.
    let affine_tol = match mode {
        Mode::Exact => alpha.fuzz,
        Mode::Float => TOL_CLASS.max(alpha.fuzz),
    };
    if elements.iter().any(|g| g.c.is_zero_tol(affine_tol)) {
        return f64::INFINITY;
    }
    let mut hi = 1.0;
    let mut grow = 0;
    while !passes(hi) {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    if passes(lo) {
        return 0.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    hi
}

/// Strip confinement of sampled points: all must satisfy
/// lo - tol <= Im z <= hi + tol. Returns the worst offender when violated.
pub fn strip_confinement(
    points: &[(f64, f64)],
    lo: f64,
    hi: f64,
    tol: f64,
) -> (bool, Option<(f64, f64)>) {
    let mut worst: Option<((f64, f64), f64)> = None;
    for &(re, im) in points {
        let excess = (lo - im).max(im - hi);
        if excess > tol {
            match worst {
                Some((_, w)) if w >= excess => {}
                _ => worst = Some(((re, im), excess)),
            }
        }
    }
    match worst {
        None => (true, None),
        Some((p, _)) => (false, Some(p)),
    }
}

/// One row of the Jorgensen report.
#[derive(Debug, Clone, Serialize)]
pub struct JorgensenRow {
    pub pair: (String, String),
    /// None when the pair is elementary (shared fixed points) and the
    /// inequality does not apply.
    pub quantity: Option<f64>,
    pub pass: bool,
}

/// Evaluate |tr^2 A - 4| + |tr [A,B] - 2| for every ordered generator pair,
/// skipping elementary pairs (tr [A,B] = 2 characterizes a common fixed
/// point). This is a necessary condition for discreteness: a failing row
/// falsifies discreteness claims.
pub fn jorgensen_check(group: &MarkedGroup) -> Vec<JorgensenRow> {
    let mut rows = Vec::new();
    for i in 0..group.gens.len() {
        for j in 0..group.gens.len() {
            if i == j {
                continue;
            }
            let a = &group.gens[i];
            let b = &group.gens[j];
            let ctr = commutator(a, b).trace().to_c64();
            let elementary = (ctr - num_complex::Complex64::new(2.0, 0.0)).norm() <= TOL_CLASS;
            if elementary {
                rows.push(JorgensenRow {
                    pair: (group.gen_names[i].clone(), group.gen_names[j].clone()),
                    quantity: None,
                    pass: true,
                });
                continue;
            }
            let q = jorgensen_quantity(a, b);
            rows.push(JorgensenRow {
                pair: (group.gen_names[i].clone(), group.gen_names[j].clone()),
                quantity: Some(q),
                pass: q >= 1.0 - TOL_CLASS,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::punctured_torus_group;
    use crate::marked::{GroupKind, GroupWord};

    fn torus_alpha() -> Alphabet {
        Alphabet::from_marked(&punctured_torus_group().unwrap())
    }

    fn h(t: i64) -> Region {
        Region::upper(Scalar::exact_int(t, 0))
    }

    #[test]
    fn torus_h1_union_is_precisely_invariant() {
        let alpha = torus_alpha();
        let regions = [
            Region::upper(Scalar::exact_int(1, 0)),
            Region::lower(Scalar::exact_int(-1, 0)),
        ];
        let out = check_precisely_invariant(&alpha, &regions, 6).unwrap();
        let cert = out.certificate().expect("expected a certificate");
        assert!(cert.margin.unwrap() > 0.0);
        assert!(cert.examined > 100);
    }

    #[test]
    fn torus_low_halfplane_violated_with_witness() {
        let alpha = torus_alpha();
        let regions = [Region::upper(Scalar::exact_ratio(1, 100, 0, 1))];
        let out = check_precisely_invariant(&alpha, &regions, 6).unwrap();
        let v = out.violation().expect("expected a violation");
        assert!(v.reverify(&regions));
        assert!(v.margin <= 0.0);
    }

    #[test]
    fn cyclic_group_is_vacuously_certified() {
        let g = MarkedGroup::new(
            "J",
            vec!["X".into()],
            vec![MoebiusMap::xi_one(Mode::Exact)],
            GroupWord(vec![(0, 1)]),
            None,
            GroupKind::FuchsianExact,
        )
        .unwrap();
        let alpha = Alphabet::from_marked(&g);
        let out = check_precisely_invariant(&alpha, &[h(1)], 5).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.examined, 0);
        assert!(cert.margin.is_none());
    }

    #[test]
    fn non_xi_invariant_region_rejected() {
        let alpha = torus_alpha();
        let disk = Region::disk(Scalar::exact_int(0, 0), Scalar::exact_int(1, 0)).unwrap();
        assert!(check_precisely_invariant(&alpha, &[disk], 3).is_err());
    }

    #[test]
    fn min_strip_constant_of_cyclic_group_is_zero() {
        let g = MarkedGroup::new(
            "J",
            vec!["X".into()],
            vec![MoebiusMap::xi_one(Mode::Exact)],
            GroupWord(vec![(0, 1)]),
            None,
            GroupKind::FuchsianExact,
        )
        .unwrap();
        assert_eq!(min_strip_constant(&Alphabet::from_marked(&g), 5), 0.0);
    }

    #[test]
    fn min_strip_constant_of_torus_at_most_one() {
        let alpha = torus_alpha();
        let c = min_strip_constant(&alpha, 6);
        assert!(c <= 1.0, "strip constant {c}");
        assert!(c > 0.0);
    }

    #[test]
    fn min_strip_constant_monotone_in_length() {
        let alpha = torus_alpha();
        let c4 = min_strip_constant(&alpha, 4);
        let c6 = min_strip_constant(&alpha, 6);
        assert!(c4 <= c6 + 1e-9, "c4 = {c4}, c6 = {c6}");
    }

    #[test]
    fn invariance_commutes_with_vertical_conjugation() {
        let g = punctured_torus_group().unwrap();
        let h5 = Scalar::exact_int(5, 0);
        let conj = g.conjugated_vertical(&h5, "shifted").unwrap();
        let regions = [
            Region::upper(Scalar::exact_int(1, 0)),
            Region::lower(Scalar::exact_int(-1, 0)),
        ];
        let shifted: Vec<Region> = regions.iter().map(|r| r.shift_vertical(&h5)).collect();
        let a = check_precisely_invariant(&Alphabet::from_marked(&g), &regions, 4).unwrap();
        let b = check_precisely_invariant(&Alphabet::from_marked(&conj), &shifted, 4).unwrap();
        let (ca, cb) = (a.certificate().unwrap(), b.certificate().unwrap());
        assert_eq!(ca.examined, cb.examined);
        assert!((ca.margin.unwrap() - cb.margin.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn jorgensen_rows() {
        let g = punctured_torus_group().unwrap();
        let rows = jorgensen_check(&g);
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!((row.quantity.unwrap() - 9.0).abs() < 1e-9);
            assert!(row.pass);
        }
    }

    #[test]
    fn jorgensen_skips_elementary_pairs() {
        let g = MarkedGroup::new(
            "elem",
            vec!["X".into(), "Y".into()],
            vec![
                MoebiusMap::xi_one(Mode::Exact),
                MoebiusMap::translation(Scalar::exact_int(0, 1)),
            ],
            GroupWord(vec![(0, 1)]),
            None,
            GroupKind::QuasifuchsianNumeric,
        )
        .unwrap();
        let rows = jorgensen_check(&g);
        assert!(rows.iter().all(|r| r.quantity.is_none() && r.pass));
    }

    #[test]
    fn jorgensen_fails_on_scaled_parabolic_pair() {
        // For f = [[1, a], [0, 1]] and g = [[1, 0], [c, 1]] the quantity is
        // exactly (a c)^2; scaling both below the Shimizu threshold records
        // a necessary-condition failure.
        let f = MoebiusMap::new(
            Scalar::from_f64(1.0, 0.0),
            Scalar::from_f64(0.1, 0.0),
            Scalar::from_f64(0.0, 0.0),
            Scalar::from_f64(1.0, 0.0),
        )
        .unwrap();
        let gmat = MoebiusMap::new(
            Scalar::from_f64(1.0, 0.0),
            Scalar::from_f64(0.0, 0.0),
            Scalar::from_f64(0.1, 0.0),
            Scalar::from_f64(1.0, 0.0),
        )
        .unwrap();
        // f^10 = xi_1, so the pair wraps into a marked group.
        let group = MarkedGroup::new(
            "scaled",
            vec!["F".into(), "G".into()],
            vec![f, gmat],
            GroupWord(vec![(0, 10)]),
            None,
            GroupKind::QuasifuchsianNumeric,
        )
        .unwrap();
        let rows = jorgensen_check(&group);
        let fg = rows
            .iter()
            .find(|r| r.pair == ("F".to_string(), "G".to_string()))
            .unwrap();
        let q = fg.quantity.unwrap();
        assert!((q - 1e-4).abs() < 1e-10, "quantity {q}");
        assert!(!fg.pass);
    }

    #[test]
    fn strip_confinement_reports_worst() {
        let pts = [(0.0, 0.5), (1.0, -0.2), (2.0, 3.0)];
        let (ok, worst) = strip_confinement(&pts, -1.0, 1.0, 1e-9);
        assert!(!ok);
        assert_eq!(worst, Some((2.0, 3.0)));
        let (ok, _) = strip_confinement(&pts[..2], -1.0, 1.0, 1e-9);
        assert!(ok);
    }
}
