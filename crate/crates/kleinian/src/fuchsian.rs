//! Construction of the Fuchsian building blocks: the exact once-punctured
//! torus group, higher-genus blocks obtained as finite covers extracted by
//! the Reidemeister-Schreier procedure, a bounded-search primitivity
//! certificate for the boundary parabolic, and the trace-parameter (Markov)
//! family of numerically deformed specimens.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::marked::{GroupKind, GroupWord, MarkedGroup};
use crate::moebius::{commutator, MoebiusMap};
use crate::perm::Perm;
use crate::scalar::{Mode, Scalar, TOL_CLASS};

/// Permutation data realizing a genus-j block as a degree-d cover of the
/// punctured torus: the images of the two base generators. The commutator
/// image must be a single d-cycle (one boundary component upstairs) and the
/// image must be transitive (connected cover).
#[derive(Debug, Clone, Serialize)]
pub struct PermutationCoverData {
    pub degree: usize,
    #[serde(serialize_with = "ser_perm")]
    pub sigma: Perm,
    #[serde(serialize_with = "ser_perm")]
    pub theta: Perm,
}

fn ser_perm<S: serde::Serializer>(p: &Perm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_cycles())
}

impl PermutationCoverData {
    pub fn validate(&self) -> Result<()> {
        if self.degree % 2 == 0 {
            return Err(Error::Precondition("cover degree must be odd".into()));
        }
        if !(self.sigma.is_valid() && self.theta.is_valid())
            || self.sigma.degree() != self.degree
            || self.theta.degree() != self.degree
        {
            return Err(Error::Precondition("invalid permutations".into()));
        }
        if !Perm::transitive(&[&self.sigma, &self.theta]) {
            return Err(Error::Precondition("cover is not connected".into()));
        }
        if !self.sigma.commutator(&self.theta).is_full_cycle() {
            return Err(Error::Precondition(
                "commutator image is not a single cycle".into(),
            ));
        }
        Ok(())
    }
}

/// The exact once-punctured torus group on the seed pair
/// A = [[1,1],[1,2]], B = [[1,-1],[-1,2]], renormalized so the commutator
/// boundary word evaluates exactly to xi_1.
pub fn punctured_torus_group() -> Result<MarkedGroup> {
    let a = MoebiusMap::from_i64(1, 1, 1, 2)?;
    let b = MoebiusMap::from_i64(1, -1, -1, 2)?;
    let (a, b) = normalize_boundary_exact(&a, &b)?;
    MarkedGroup::new(
        "G0(1)",
        vec!["A".into(), "B".into()],
        vec![a, b],
        GroupWord(vec![(0, 1), (1, 1), (0, -1), (1, -1)]),
        Some(1),
        GroupKind::FuchsianExact,
    )
}

/// Conjugate the pair (a, b) by an exact chain of rational moves so that the
/// commutator [a, b] becomes exactly xi_1. Requires the commutator to be
/// parabolic with rational data, which holds for the integer seed pair.
fn normalize_boundary_exact(a: &MoebiusMap, b: &MoebiusMap) -> Result<(MoebiusMap, MoebiusMap)> {
    let k = commutator(a, b);
    let tr = k.trace_sq();
    if tr != Scalar::exact_int(4, 0) {
        return Err(Error::Degenerate(format!(
            "commutator is not parabolic (tr^2 = {tr})"
        )));
    }
    let (mut a, mut b, mut k) = (a.clone(), b.clone(), k);
    if !k.c.is_zero() {
        // Send the finite fixed point p = (a_k - d_k) / (2 c_k) to infinity
        // with s: z -> -1/(z - p).
        let two = Scalar::exact_int(2, 0);
        let p = &(&k.a - &k.d) / &(&two * &k.c);
        let s = MoebiusMap::new(
            Scalar::exact_int(0, 0),
            Scalar::exact_int(-1, 0),
            Scalar::exact_int(1, 0),
            -&p,
        )?;
        a = a.conjugate_by(&s);
        b = b.conjugate_by(&s);
        k = commutator(&a, &b);
    }
    let t = k
        .translation_amount()
        .ok_or_else(|| Error::Degenerate("commutator does not fix infinity".into()))?;
    if t.is_zero() {
        return Err(Error::Degenerate("commutator is the identity".into()));
    }
    if t.re_sign() < 0 {
        // Conjugate by z -> -z to make the translation positive.
        a = a.flip();
        b = b.flip();
    }
    let t = commutator(&a, &b)
        .translation_amount()
        .expect("still a translation");
    a = a.dilation_conjugate(&t)?;
    b = b.dilation_conjugate(&t)?;
    debug_assert!(commutator(&a, &b).proj_eq(&MoebiusMap::xi_one(Mode::Exact)));
    Ok((a, b))
}

/// The built-in cover recipe for genus j >= 2: degree d = 2j - 1, sigma the
/// full d-cycle, theta the first permutation (transpositions in index order,
/// then the reversal, then all of S_d lexicographically) whose commutator
/// with sigma is a d-cycle.
pub fn cover_data(j: u32) -> Result<PermutationCoverData> {
    if j < 2 {
        return Err(Error::Precondition("cover construction needs j >= 2".into()));
    }
    let d = (2 * j - 1) as usize;
    let sigma = Perm::full_cycle(d);
    let mut candidates: Vec<Perm> = Vec::new();
    for i in 0..d {
        for k in i + 1..d {
            candidates.push(Perm::transposition(d, i, k));
        }
    }
    candidates.push(Perm::reversal(d));
    candidates.extend(Perm::all(d.min(7)).into_iter().filter(|p| p.degree() == d));
    for theta in candidates {
        let data = PermutationCoverData {
            degree: d,
            sigma: sigma.clone(),
            theta,
        };
        if data.validate().is_ok() {
            return Ok(data);
        }
    }
    Err(Error::Degenerate(format!(
        "no valid permutation cover of degree {d}"
    )))
}

/// A genus-j Fuchsian block (j >= 2) built as a finite cover of the exact
/// punctured-torus group: the index-d subgroup extracted by the
/// Reidemeister-Schreier procedure, with the cusp renormalized to xi_1 by an
/// exact dilation.
pub fn genus_cover_group(j: u32) -> Result<MarkedGroup> {
    if j == 1 {
        return punctured_torus_group();
    }
    let base = punctured_torus_group()?;
    let data = cover_data(j)?;
    let d = data.degree;
    let act = [
        data.sigma.clone(),
        data.theta.clone(),
        data.sigma.inverse(),
        data.theta.inverse(),
    ];
    // Signed letters 0 = A, 1 = B, 2 = A^-1, 3 = B^-1 acting on points.
    let step = |i: usize, letter: usize| act[letter].apply(i);

    // BFS spanning tree from the base point 0, giving a prefix-closed
    // transversal. tree_edge marks used positive edges (point, gen).
    let mut transversal: Vec<Option<Vec<(usize, i64)>>> = vec![None; d];
    transversal[0] = Some(vec![]);
    let mut tree_edge = vec![[false; 2]; d];
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for letter in 0..4 {
            let jpt = step(i, letter);
            if transversal[jpt].is_none() {
                let mut w = transversal[i].clone().unwrap();
                let (g, e) = if letter < 2 {
                    (letter, 1)
                } else {
                    (letter - 2, -1)
                };
                w.push((g, e));
                transversal[jpt] = Some(w);
                // Mark the positive edge this traversal used.
                if e > 0 {
                    tree_edge[i][g] = true;
                } else {
                    tree_edge[jpt][g] = true;
                }
                queue.push_back(jpt);
            }
        }
    }
    let transversal: Vec<GroupWord> = transversal
        .into_iter()
        .map(|w| GroupWord::reduced(w.expect("transitive action covers all points")))
        .collect();

    // Schreier generators: one per non-tree positive edge.
    let mut sgen_index = vec![[usize::MAX; 2]; d];
    let mut gen_words: Vec<GroupWord> = Vec::new();
    for i in 0..d {
        for g in 0..2 {
            if tree_edge[i][g] {
                continue;
            }
            let target = step(i, g);
            let mut letters = transversal[i].0.clone();
            letters.push((g, 1));
            letters.extend(transversal[target].inverse().0.iter().copied());
            sgen_index[i][g] = gen_words.len();
            gen_words.push(GroupWord::reduced(letters));
        }
    }
    let rank = gen_words.len();
    if rank != d + 1 {
        return Err(Error::Degenerate(format!(
            "Schreier rank {rank}, expected {}",
            d + 1
        )));
    }

    // Rewrite a word of the base group that lies in the subgroup as a word
    // in the Schreier generators.
    let rewrite = |w: &GroupWord| -> Result<GroupWord> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        let mut point = 0usize;
        for &(g, e) in &w.0 {
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    if !tree_edge[point][g] {
                        out.push((sgen_index[point][g], 1));
                    }
                    point = step(point, g);
                } else {
                    let from = step(point, g + 2);
                    if !tree_edge[from][g] {
                        out.push((sgen_index[from][g], -1));
                    }
                    point = from;
                }
            }
        }
        if point != 0 {
            return Err(Error::Precondition(
                "word does not lie in the subgroup".into(),
            ));
        }
        Ok(GroupWord::reduced(out))
    };

    // The cusp element upstairs is (base boundary)^d.
    let mut cusp_letters = Vec::new();
    for _ in 0..d {
        cusp_letters.extend(base.boundary_word.0.iter().copied());
    }
    let boundary_word = rewrite(&GroupWord::reduced(cusp_letters))?;

    // Evaluate Schreier generators in the base group, then renormalize the
    // cusp xi_d to xi_1 by conjugating with z -> z/d, which is entrywise
    // exact.
    let lam = Scalar::exact_int(d as i64, 0);
    let mut gens = Vec::with_capacity(rank);
    let mut names = Vec::with_capacity(rank);
    for (idx, w) in gen_words.iter().enumerate() {
        gens.push(base.evaluate(w).dilation_conjugate(&lam)?);
        names.push(format!("g{}", idx + 1));
    }

    let group = MarkedGroup::new(
        format!("G0({j})"),
        names,
        gens,
        boundary_word,
        Some(j),
        GroupKind::FuchsianExact,
    )?;
    // The cusp really was xi_d before the dilation.
    debug_assert!(group.boundary_map().proj_eq(&MoebiusMap::xi_one(Mode::Exact)));
    Ok(group)
}

/// Outcome of the bounded primitivity search.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum Primitivity {
    Certificate {
        group: String,
        word_length: usize,
        examined: usize,
        fixing_infinity: usize,
    },
    Violation {
        group: String,
        witness_word: String,
        root_order: i64,
    },
}

/// Search all reduced words of length <= L for an element h fixing infinity
/// with h^m = xi_1 for some m >= 2. Such an h must be the translation by 1/m.
pub fn verify_boundary_primitive(group: &MarkedGroup, max_len: usize) -> Primitivity {
    let gens = &group.gens;
    let n = gens.len();
    let mode = group.mode();
    let mut examined = 0usize;
    let mut fixing = 0usize;

    // letters: 0..n positive, n..2n inverse
    let letter_map = |l: usize| -> MoebiusMap {
        if l < n {
            gens[l].clone()
        } else {
            gens[l - n].inverse()
        }
    };
    let letter_inverse = |l: usize| -> usize { if l < n { l + n } else { l - n } };
    let letter_name = |l: usize| -> String {
        if l < n {
            group.gen_names[l].clone()
        } else {
            format!("{}^-1", group.gen_names[l - n])
        }
    };

    let mats: Vec<MoebiusMap> = (0..2 * n).map(letter_map).collect();
    let mut stack: Vec<(MoebiusMap, Vec<usize>)> = vec![(MoebiusMap::identity(mode), vec![])];
    while let Some((m, word)) = stack.pop() {
        if !word.is_empty() {
            examined += 1;
            let ztol = match mode {
                Mode::Exact => 0.0,
                Mode::Float => TOL_CLASS,
            };
            if m.c.is_zero_tol(ztol) {
                fixing += 1;
                if let Some(t) = m.translation_amount() {
                    if let Some(order) = proper_root_order(&t) {
                        return Primitivity::Violation {
                            group: group.id.clone(),
                            witness_word: word
                                .iter()
                                .map(|&l| letter_name(l))
                                .collect::<Vec<_>>()
                                .join(" "),
                            root_order: order,
                        };
                    }
                }
            }
        }
        if word.len() < max_len {
            for l in 0..2 * n {
                if let Some(&last) = word.last() {
                    if letter_inverse(last) == l {
                        continue;
                    }
                }
                let mut w = word.clone();
                w.push(l);
                stack.push((m.compose(&mats[l]), w));
            }
        }
    }
    Primitivity::Certificate {
        group: group.id.clone(),
        word_length: max_len,
        examined,
        fixing_infinity: fixing,
    }
}

/// If xi_t^m = xi_1 for an integer m >= 2, return m.
fn proper_root_order(t: &Scalar) -> Option<i64> {
    match t {
        Scalar::Exact(_) => {
            let r = t.as_rational()?;
            use num_traits::One;
            if r.numer().is_one() {
                let den = r.denom();
                if let Ok(m) = i64::try_from(den.clone()) {
                    if m >= 2 {
                        return Some(m);
                    }
                }
            }
            None
        }
        Scalar::Float(z) => {
            if z.im.abs() > TOL_CLASS || z.re.abs() < 1e-6 {
                return None;
            }
            let m = 1.0 / z.re;
            if (m - m.round()).abs() <= 1e-6 && m.round() >= 2.0 {
                Some(m.round() as i64)
            } else {
                None
            }
        }
    }
}

/// The trace-parameter family: a rank-2 group with tr A = x, tr B = y and
/// parabolic commutator of trace -2, normalized so the commutator is xi_1.
/// The trace of AB is the root z of z^2 - xyz + x^2 + y^2 = 0 with the
/// negative branch of the square root. Discreteness is NOT certified.
pub fn markov_family(x: Complex64, y: Complex64) -> Result<MarkedGroup> {
    let four = Complex64::new(4.0, 0.0);
    let reject_trace = |name: &str, t: Complex64| -> Result<()> {
        let t2 = t * t;
        if (t2 - four).norm() <= TOL_CLASS {
            return Err(Error::Degenerate(format!(
                "trace {name} = {t} gives a parabolic or identity generator"
            )));
        }
        if t2.im.abs() <= TOL_CLASS && t2.re >= -TOL_CLASS && t2.re < 4.0 {
            return Err(Error::Degenerate(format!(
                "trace {name} = {t} gives an elliptic generator"
            )));
        }
        Ok(())
    };
    reject_trace("x", x)?;
    reject_trace("y", y)?;
    let disc = x * x * y * y - 4.0 * (x * x + y * y);
    let z = (x * y - disc.sqrt()) / 2.0;
    reject_trace("z", z)?;

    // Standard two-generator recipe realizing traces (x, y, z) with
    // commutator trace -2.
    let i = Complex64::i();
    let den0 = y * z - 2.0 * x + 2.0 * i * z;
    if den0.norm() <= 1e-12 {
        return Err(Error::Degenerate("singular trace configuration".into()));
    }
    let z0 = (z - 2.0) * y / den0;
    let a = MoebiusMap::new(
        Scalar::from_c64(x / 2.0),
        Scalar::from_c64((x * z - 2.0 * y + 4.0 * i) / ((2.0 * z + 4.0) * z0)),
        Scalar::from_c64((x * z - 2.0 * y - 4.0 * i) * z0 / (2.0 * z - 4.0)),
        Scalar::from_c64(x / 2.0),
    )?;
    let b = MoebiusMap::new(
        Scalar::from_c64((y - 2.0 * i) / 2.0),
        Scalar::from_c64(y / 2.0),
        Scalar::from_c64(y / 2.0),
        Scalar::from_c64((y + 2.0 * i) / 2.0),
    )?;

    let k = commutator(&a, &b);
    if (k.trace().to_c64().norm() - 2.0).abs() > 1e-6 {
        return Err(Error::Degenerate(format!(
            "commutator trace {} is not parabolic",
            k.trace()
        )));
    }
    // Normalize the parabolic commutator to xi_1: move its fixed point to
    // infinity, then rotate/scale the translation to 1.
    let (mut a, mut b) = (a, b);
    let kc = k.c.to_c64();
    if kc.norm() > 1e-9 {
        let p = (k.a.to_c64() - k.d.to_c64()) / (2.0 * kc);
        let s = MoebiusMap::new(
            Scalar::from_f64(0.0, 0.0),
            Scalar::from_f64(-1.0, 0.0),
            Scalar::from_f64(1.0, 0.0),
            Scalar::from_c64(-p),
        )?;
        a = a.conjugate_by(&s);
        b = b.conjugate_by(&s);
    }
    let k = commutator(&a, &b);
    let t = k
        .translation_amount()
        .ok_or_else(|| Error::Degenerate("commutator failed to normalize".into()))?;
    if t.is_zero_tol(1e-12) {
        return Err(Error::Degenerate("commutator is numerically trivial".into()));
    }
    a = a.dilation_conjugate(&t)?;
    b = b.dilation_conjugate(&t)?;

    MarkedGroup::new(
        format!("markov({x},{y})"),
        vec!["A".into(), "B".into()],
        vec![a, b],
        GroupWord(vec![(0, 1), (1, 1), (0, -1), (1, -1)]),
        Some(1),
        GroupKind::QuasifuchsianNumeric,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::jorgensen_quantity;

    #[test]
    fn torus_block_is_exactly_normalized() {
        let g = punctured_torus_group().unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.genus, Some(1));
        // Boundary word evaluates exactly to [[1,1],[0,1]].
        let bd = g.boundary_map();
        assert!(bd.proj_eq(&MoebiusMap::xi_one(Mode::Exact)));
        assert_eq!(bd.a, Scalar::exact_int(1, 0));
        assert_eq!(bd.b, Scalar::exact_int(1, 0));
        assert_eq!(bd.c, Scalar::exact_int(0, 0));
        assert_eq!(bd.d, Scalar::exact_int(1, 0));
        // Traces survive conjugation: tr A = 3, tr [A,B] = -2.
        assert_eq!(g.gens[0].trace_sq(), Scalar::exact_int(9, 0));
        let k = commutator(&g.gens[0], &g.gens[1]);
        assert_eq!(&k.trace() * &k.trace(), Scalar::exact_int(4, 0));
    }

    #[test]
    fn torus_block_jorgensen_is_nine() {
        let g = punctured_torus_group().unwrap();
        let q = jorgensen_quantity(&g.gens[0], &g.gens[1]);
        assert!((q - 9.0).abs() < 1e-12);
    }

    #[test]
    fn seed_pair_commutator_trace() {
        let a = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        let b = MoebiusMap::from_i64(1, -1, -1, 2).unwrap();
        let k = commutator(&a, &b);
        // tr [A,B] = -2 as an element of SL2 (lift-independent).
        assert_eq!(k.trace(), Scalar::exact_int(-2, 0));
    }

    #[test]
    fn cover_recipe_for_genus_two() {
        let data = cover_data(2).unwrap();
        assert_eq!(data.degree, 3);
        assert_eq!(data.sigma, Perm::full_cycle(3));
        assert_eq!(data.theta, Perm::transposition(3, 0, 1));
    }

    #[test]
    fn genus_two_cover_block() {
        let g = genus_cover_group(2).unwrap();
        assert_eq!(g.rank(), 4);
        assert_eq!(g.genus, Some(2));
        assert!(g.boundary_map().proj_eq(&MoebiusMap::xi_one(Mode::Exact)));
        for gen in &g.gens {
            assert!(gen.a.is_real() && gen.b.is_real() && gen.c.is_real() && gen.d.is_real());
        }
    }

    #[test]
    fn genus_three_cover_block() {
        let g = genus_cover_group(3).unwrap();
        assert_eq!(g.rank(), 6);
        assert!(g.boundary_map().proj_eq(&MoebiusMap::xi_one(Mode::Exact)));
    }

    #[test]
    fn primitivity_certificate_for_torus() {
        let g = punctured_torus_group().unwrap();
        match verify_boundary_primitive(&g, 8) {
            Primitivity::Certificate { examined, .. } => assert!(examined > 1000),
            Primitivity::Violation { witness_word, .. } => {
                panic!("unexpected violation: {witness_word}")
            }
        }
    }

    #[test]
    fn primitivity_violation_with_half_translation() {
        let base = punctured_torus_group().unwrap();
        let mut names = base.gen_names.clone();
        names.push("E".into());
        let mut gens = base.gens.clone();
        gens.push(MoebiusMap::translation(Scalar::exact_ratio(1, 2, 0, 1)));
        let g = MarkedGroup::new(
            "torus-ext",
            names,
            gens,
            base.boundary_word.clone(),
            None,
            GroupKind::FuchsianExact,
        )
        .unwrap();
        match verify_boundary_primitive(&g, 1) {
            Primitivity::Violation {
                witness_word,
                root_order,
                ..
            } => {
                assert_eq!(root_order, 2);
                assert_eq!(witness_word, "E");
            }
            Primitivity::Certificate { .. } => panic!("expected a violation"),
        }
    }

    #[test]
    fn primitivity_of_cyclic_group() {
        let g = MarkedGroup::new(
            "J",
            vec!["X".into()],
            vec![MoebiusMap::xi_one(Mode::Exact)],
            GroupWord(vec![(0, 1)]),
            None,
            GroupKind::FuchsianExact,
        )
        .unwrap();
        assert!(matches!(
            verify_boundary_primitive(&g, 6),
            Primitivity::Certificate { .. }
        ));
    }

    #[test]
    fn markov_fuchsian_specimen() {
        let g = markov_family(Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)).unwrap();
        // z = 3 solves z^2 - 9z + 18 = 0 with the negative branch.
        let ab = g.gens[0].compose(&g.gens[1]);
        assert!((ab.trace().to_c64().norm() - 3.0).abs() < 1e-9);
        assert!(g
            .boundary_map()
            .proj_eq_tol(&MoebiusMap::xi_one(Mode::Float), 1e-9));
    }

    #[test]
    fn markov_perturbed_specimen_passes_jorgensen() {
        let g = markov_family(Complex64::new(3.0, 0.1), Complex64::new(3.0, 0.0)).unwrap();
        let q = jorgensen_quantity(&g.gens[0], &g.gens[1]);
        assert!(q >= 1.0 - TOL_CLASS, "quantity {q}");
    }

    #[test]
    fn markov_degenerate_rejected() {
        assert!(markov_family(Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)).is_err());
        assert!(markov_family(Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)).is_err());
    }
}
