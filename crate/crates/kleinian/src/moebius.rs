//! Moebius transformations as determinant-one 2x2 complex matrices acting on
//! the extended plane, together with trace classification and fixed points.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{ExactKey, Mode, Scalar, TOL_CLASS, TOL_DET};

/// A point of the extended complex plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtComplex {
    Finite(Scalar),
    Infinity,
}

impl ExtComplex {
    pub fn finite_f64(re: f64, im: f64) -> Self {
        ExtComplex::Finite(Scalar::from_f64(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn to_c64(&self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(s) => Some(s.to_c64()),
            ExtComplex::Infinity => None,
        }
    }

    pub fn approx_eq(&self, other: &ExtComplex, tol: f64) -> bool {
        match (self, other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => true,
            (ExtComplex::Finite(a), ExtComplex::Finite(b)) => a.approx_eq(b, tol),
            _ => false,
        }
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(s) => write!(f, "{s}"),
            ExtComplex::Infinity => write!(f, "inf"),
        }
    }
}

/// Trace classification of a Moebius transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapClass {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// Element of PSL2(C): normalized so that ad - bc = 1, with a deterministic
/// projective sign (first nonzero entry in order a, b, c, d has positive real
/// part, ties broken by positive imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusMap {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl MoebiusMap {
    /// Build and normalize. The determinant must be 1, or have a square root
    /// expressible in the entry mode (exact rational square root in exact
    /// mode; any nonzero determinant in float mode).
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        // Mixed modes promote every entry to float.
        let mode = if [&a, &b, &c, &d].iter().all(|s| s.mode() == Mode::Exact) {
            Mode::Exact
        } else {
            Mode::Float
        };
        let (a, b, c, d) = match mode {
            Mode::Exact => (a, b, c, d),
            Mode::Float => (a.to_float(), b.to_float(), c.to_float(), d.to_float()),
        };
        let det = &(&a * &d) - &(&b * &c);
        let map = if det == Scalar::one(mode) || (mode == Mode::Float && det.approx_eq(&Scalar::one(Mode::Float), TOL_DET)) {
            MoebiusMap { a, b, c, d }
        } else {
            match mode {
                Mode::Exact => {
                    let root = det.exact_sqrt().ok_or_else(|| {
                        Error::Arithmetic(format!(
                            "exact normalization needs a rational square determinant, got {det}"
                        ))
                    })?;
                    let inv = Scalar::one(Mode::Exact).div_checked(&root)?;
                    MoebiusMap {
                        a: &a * &inv,
                        b: &b * &inv,
                        c: &c * &inv,
                        d: &d * &inv,
                    }
                }
                Mode::Float => {
                    let dz = det.to_c64();
                    if dz.norm_sqr() < TOL_DET * TOL_DET {
                        return Err(Error::Arithmetic("singular matrix".into()));
                    }
                    let inv = Scalar::from_c64(1.0 / dz.sqrt());
                    MoebiusMap {
                        a: &a * &inv,
                        b: &b * &inv,
                        c: &c * &inv,
                        d: &d * &inv,
                    }
                }
            }
        };
        Ok(map.canonical())
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        MoebiusMap::new(
            Scalar::exact_int(a, 0),
            Scalar::exact_int(b, 0),
            Scalar::exact_int(c, 0),
            Scalar::exact_int(d, 0),
        )
    }

    pub fn identity(mode: Mode) -> Self {
        MoebiusMap {
            a: Scalar::one(mode),
            b: Scalar::zero(mode),
            c: Scalar::zero(mode),
            d: Scalar::one(mode),
        }
    }

    /// The translation xi_a : z -> z + a.
    pub fn translation(a: Scalar) -> Self {
        let mode = a.mode();
        MoebiusMap {
            a: Scalar::one(mode),
            b: a,
            c: Scalar::zero(mode),
            d: Scalar::one(mode),
        }
        .canonical()
    }

    /// xi_1, the reference boundary parabolic.
    pub fn xi_one(mode: Mode) -> Self {
        MoebiusMap::translation(Scalar::one(mode))
    }

    /// Vertical translation xi_{h i} for real h.
    pub fn xi_vertical(h: &Scalar) -> Self {
        let i = match h.mode() {
            Mode::Exact => Scalar::exact_int(0, 1),
            Mode::Float => Scalar::from_f64(0.0, 1.0),
        };
        MoebiusMap::translation(&i * h)
    }

    pub fn mode(&self) -> Mode {
        if self.a.mode() == Mode::Exact
            && self.b.mode() == Mode::Exact
            && self.c.mode() == Mode::Exact
            && self.d.mode() == Mode::Exact
        {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    pub fn to_float(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.a.to_float(),
            b: self.b.to_float(),
            c: self.c.to_float(),
            d: self.d.to_float(),
        }
    }

    /// Deterministic projective sign normalization.
    pub fn canonical(&self) -> MoebiusMap {
        let tol = match self.mode() {
            Mode::Exact => 0.0,
            Mode::Float => TOL_DET,
        };
        for entry in [&self.a, &self.b, &self.c, &self.d] {
            if entry.is_zero_tol(tol) {
                continue;
            }
            let rs = entry.re_sign();
            let flip = rs < 0 || (rs == 0 && entry.im_sign() < 0);
            return if flip {
                MoebiusMap {
                    a: -&self.a,
                    b: -&self.b,
                    c: -&self.c,
                    d: -&self.d,
                }
            } else {
                self.clone()
            };
        }
        self.clone()
    }

    /// Group law. The result is the matrix product, renormalized.
    pub fn compose(&self, rhs: &MoebiusMap) -> MoebiusMap {
        self.compose_raw(rhs).canonical()
    }

    /// Matrix product without the projective sign normalization. Used where
    /// the honest SL2 lift matters (commutator traces).
    pub fn compose_raw(&self, rhs: &MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: &(&self.a * &rhs.a) + &(&self.b * &rhs.c),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.d),
            c: &(&self.c * &rhs.a) + &(&self.d * &rhs.c),
            d: &(&self.c * &rhs.b) + &(&self.d * &rhs.d),
        }
    }

    /// Adjugate without sign normalization: the SL2 inverse of this lift.
    pub fn inverse_raw(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// Inverse via the adjugate (determinant is 1).
    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
        .canonical()
    }

    pub fn pow(&self, n: i64) -> MoebiusMap {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = MoebiusMap::identity(self.mode());
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// Conjugation h g h^-1.
    pub fn conjugate_by(&self, h: &MoebiusMap) -> MoebiusMap {
        h.compose(self).compose(&h.inverse())
    }

    /// Conjugation by the dilation z -> z / lambda, computed entrywise so the
    /// conjugator itself (whose normalized form needs sqrt(lambda)) is never
    /// materialized: (a, b, c, d) -> (a, b/lambda, c*lambda, d).
    pub fn dilation_conjugate(&self, lambda: &Scalar) -> Result<MoebiusMap> {
        if lambda.is_zero() {
            return Err(Error::Arithmetic("dilation by zero".into()));
        }
        Ok(MoebiusMap {
            a: self.a.clone(),
            b: self.b.div_checked(lambda)?,
            c: &self.c * lambda,
            d: self.d.clone(),
        }
        .canonical())
    }

    /// Conjugation by z -> -z, entrywise (a, -b, -c, d). Maps xi_t to xi_{-t}
    /// and preserves real matrices.
    pub fn flip(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.a.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.d.clone(),
        }
        .canonical()
    }

    /// Apply to a point of the extended plane.
    pub fn apply(&self, z: &ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Infinity => {
                if self.c.is_zero() {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(&self.a / &self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = &(&self.c * z) + &self.d;
                if den.is_zero() {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(&(&(&self.a * z) + &self.b) / &den)
                }
            }
        }
    }

    pub fn trace(&self) -> Scalar {
        &self.a + &self.d
    }

    /// tr^2, which is projectively well defined.
    pub fn trace_sq(&self) -> Scalar {
        let t = self.trace();
        &t * &t
    }

    pub fn is_identity(&self) -> bool {
        let tol = match self.mode() {
            Mode::Exact => 0.0,
            Mode::Float => TOL_CLASS,
        };
        let g = self.canonical();
        g.b.is_zero_tol(tol)
            && g.c.is_zero_tol(tol)
            && (&g.a - &g.d).is_zero_tol(tol)
    }

    /// Projective equality (exact in exact mode, tol-close in float mode).
    pub fn proj_eq(&self, other: &MoebiusMap) -> bool {
        let tol = match (self.mode(), other.mode()) {
            (Mode::Exact, Mode::Exact) => 0.0,
            _ => TOL_CLASS,
        };
        self.proj_eq_tol(other, tol)
    }

    pub fn proj_eq_tol(&self, other: &MoebiusMap, tol: f64) -> bool {
        let g = self.canonical();
        let h = other.canonical();
        if tol == 0.0 {
            g.a == h.a && g.b == h.b && g.c == h.c && g.d == h.d
        } else {
            g.a.approx_eq(&h.a, tol)
                && g.b.approx_eq(&h.b, tol)
                && g.c.approx_eq(&h.c, tol)
                && g.d.approx_eq(&h.d, tol)
        }
    }

    /// If this map is the translation z -> z + t, return t.
    pub fn translation_amount(&self) -> Option<Scalar> {
        let tol = match self.mode() {
            Mode::Exact => 0.0,
            Mode::Float => TOL_CLASS,
        };
        let g = self.canonical();
        if g.c.is_zero_tol(tol) && (&g.a - &g.d).is_zero_tol(tol) {
            // a = d = +-1 after sign normalization; determinant 1 forces a*d = 1.
            let t = g.b.div_checked(&g.a).ok()?;
            Some(t)
        } else {
            None
        }
    }

    /// Is this map xi_1^m for some integer m (i.e. in J = <xi_1>)?
    /// Returns m.
    pub fn xi_power(&self) -> Option<BigInt> {
        let t = self.translation_amount()?;
        match &t {
            Scalar::Exact(_) => t.as_integer(),
            Scalar::Float(_) => {
                let z = t.to_c64();
                if z.im.abs() <= TOL_CLASS && (z.re - z.re.round()).abs() <= TOL_CLASS {
                    Some(BigInt::from(z.re.round() as i64))
                } else {
                    None
                }
            }
        }
    }

    /// Tolerance-band variant of [`xi_power`](Self::xi_power) for groups
    /// whose entries are exact rationalizations of numeric data: an element
    /// within `tol` of an integer translation counts as lying in J.
    pub fn xi_power_fuzzy(&self, tol: f64) -> Option<BigInt> {
        if tol == 0.0 {
            return self.xi_power();
        }
        let g = self.canonical();
        let [a, b, c, d] = g.entries_c64();
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if scale == 0.0 || c.norm() > tol * scale || (a - d).norm() > tol * scale {
            return None;
        }
        if a.norm() < tol {
            return None;
        }
        let t = b / a;
        if t.im.abs() <= tol && (t.re - t.re.round()).abs() <= tol {
            Some(BigInt::from(t.re.round() as i64))
        } else {
            None
        }
    }

    /// Trace classification.
    pub fn classify(&self) -> MapClass {
        if self.is_identity() {
            return MapClass::Identity;
        }
        let t2 = self.trace_sq();
        match &t2 {
            Scalar::Exact(_) => {
                let four = Scalar::exact_int(4, 0);
                if t2 == four {
                    MapClass::Parabolic
                } else if t2.is_real() {
                    let re = t2.real_part().as_rational().unwrap();
                    if !re.is_negative() && re < BigRational::from_integer(BigInt::from(4)) {
                        MapClass::Elliptic
                    } else {
                        MapClass::Loxodromic
                    }
                } else {
                    MapClass::Loxodromic
                }
            }
            Scalar::Float(z) => {
                if (z - Complex64::new(4.0, 0.0)).norm() <= TOL_CLASS {
                    MapClass::Parabolic
                } else if z.im.abs() <= TOL_CLASS && z.re >= -TOL_CLASS && z.re < 4.0 {
                    MapClass::Elliptic
                } else {
                    MapClass::Loxodromic
                }
            }
        }
    }

    /// Fixed points: one for a parabolic, two otherwise. Rejects the identity.
    /// Exact inputs stay exact when the discriminant has an exact square
    /// root; otherwise the result demotes to float.
    pub fn fixed_points(&self) -> Result<Vec<ExtComplex>> {
        if self.is_identity() {
            return Err(Error::Precondition(
                "fixed points of the identity are everything".into(),
            ));
        }
        let tol = match self.mode() {
            Mode::Exact => 0.0,
            Mode::Float => TOL_CLASS,
        };
        if self.c.is_zero_tol(tol) {
            // Affine: infinity is fixed; a second point b/(d-a) unless parabolic.
            let diff = &self.d - &self.a;
            if diff.is_zero_tol(tol) {
                return Ok(vec![ExtComplex::Infinity]);
            }
            return Ok(vec![
                ExtComplex::Infinity,
                ExtComplex::Finite(&self.b / &diff),
            ]);
        }
        // Roots of c z^2 + (d - a) z - b = 0.
        let two = match self.mode() {
            Mode::Exact => Scalar::exact_int(2, 0),
            Mode::Float => Scalar::from_f64(2.0, 0.0),
        };
        let diff = &self.a - &self.d;
        let disc = &self.trace_sq() - &match self.mode() {
            Mode::Exact => Scalar::exact_int(4, 0),
            Mode::Float => Scalar::from_f64(4.0, 0.0),
        };
        if disc.is_zero_tol(tol) {
            return Ok(vec![ExtComplex::Finite(&diff / &(&two * &self.c))]);
        }
        let sqrt = complex_sqrt(&disc);
        let den = &two * &self.c;
        Ok(vec![
            ExtComplex::Finite(&(&diff + &sqrt) / &den),
            ExtComplex::Finite(&(&diff - &sqrt) / &den),
        ])
    }

    /// Hashable canonical key for exact maps.
    pub fn exact_key(&self) -> Option<[ExactKey; 4]> {
        let g = self.canonical();
        Some([
            g.a.exact_key()?,
            g.b.exact_key()?,
            g.c.exact_key()?,
            g.d.exact_key()?,
        ])
    }

    pub fn entries_c64(&self) -> [Complex64; 4] {
        [
            self.a.to_c64(),
            self.b.to_c64(),
            self.c.to_c64(),
            self.d.to_c64(),
        ]
    }
}

/// Square root of a complex scalar. Exact when the input is a real rational
/// whose magnitude has an exact square root (the root is then real or purely
/// imaginary); demotes to float otherwise.
pub fn complex_sqrt(s: &Scalar) -> Scalar {
    if let Scalar::Exact(e) = s {
        if e.im.is_zero() {
            let mag = Scalar::exact_real(e.re.abs());
            if let Some(root) = mag.exact_sqrt() {
                let r = root.as_rational().unwrap();
                return if e.re.is_negative() {
                    Scalar::exact_big(BigRational::zero(), r)
                } else {
                    Scalar::exact_real(r)
                };
            }
        }
    }
    Scalar::from_c64(s.to_c64().sqrt())
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Commutator [f, g] = f g f^-1 g^-1 as an SL2 element. The raw product is
/// independent of the sign choices of the lifts of f and g, so its trace is
/// well defined (unlike a general product of projective classes).
pub fn commutator(f: &MoebiusMap, g: &MoebiusMap) -> MoebiusMap {
    f.compose_raw(g)
        .compose_raw(&f.inverse_raw())
        .compose_raw(&g.inverse_raw())
}

/// The Jorgensen quantity |tr^2 f - 4| + |tr [f,g] - 2| evaluated in floats.
pub fn jorgensen_quantity(f: &MoebiusMap, g: &MoebiusMap) -> f64 {
    let t2 = f.trace_sq().to_c64();
    let tc = commutator(f, g).trace().to_c64();
    // tr of a commutator is lift-independent; tr^2 likewise.
    (t2 - Complex64::new(4.0, 0.0)).norm() + (tc - Complex64::new(2.0, 0.0)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(n: i64) -> MoebiusMap {
        MoebiusMap::translation(Scalar::exact_int(n, 0))
    }

    #[test]
    fn compose_translations_adds() {
        let f = MoebiusMap::translation(Scalar::exact_int(1, 0));
        let g = MoebiusMap::translation(Scalar::exact_int(0, 2));
        let fg = f.compose(&g);
        assert!(fg.proj_eq(&MoebiusMap::translation(Scalar::exact_int(1, 2))));
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let g = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn compose_integer_example() {
        // Frozen from a direct 2x2 integer product.
        let f = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        let g = MoebiusMap::from_i64(1, -1, -1, 2).unwrap();
        let expect = MoebiusMap::from_i64(0, 1, -1, 3).unwrap();
        assert!(f.compose(&g).proj_eq(&expect));
    }

    #[test]
    fn inverse_is_adjugate() {
        let g = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        let expect = MoebiusMap::from_i64(2, -1, -1, 1).unwrap();
        assert!(g.inverse().proj_eq(&expect));
        assert!(xi(1).inverse().proj_eq(&xi(-1)));
        assert!(MoebiusMap::identity(Mode::Exact)
            .inverse()
            .is_identity());
    }

    #[test]
    fn apply_conventions() {
        let t = MoebiusMap::translation(Scalar::exact_int(0, 5));
        let z = ExtComplex::Finite(Scalar::exact_int(3, 0));
        assert_eq!(
            t.apply(&z),
            ExtComplex::Finite(Scalar::exact_int(3, 5))
        );
        // z -> -1/z
        let s = MoebiusMap::new(
            Scalar::exact_int(0, 0),
            Scalar::exact_int(-1, 0),
            Scalar::exact_int(1, 0),
            Scalar::exact_int(0, 0),
        )
        .unwrap();
        assert_eq!(
            s.apply(&ExtComplex::Infinity),
            ExtComplex::Finite(Scalar::exact_int(0, 0))
        );
        let i = ExtComplex::Finite(Scalar::exact_int(0, 1));
        assert_eq!(s.apply(&i), i);
        // Pole goes to infinity.
        assert_eq!(
            s.apply(&ExtComplex::Finite(Scalar::exact_int(0, 0))),
            ExtComplex::Infinity
        );
    }

    #[test]
    fn classification() {
        assert_eq!(xi(1).classify(), MapClass::Parabolic);
        let lox = MoebiusMap::new(
            Scalar::exact_int(2, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_ratio(1, 2, 0, 1),
        )
        .unwrap();
        assert_eq!(lox.classify(), MapClass::Loxodromic);
        let ell = MoebiusMap::from_i64(0, -1, 1, 0).unwrap();
        assert_eq!(ell.classify(), MapClass::Elliptic);
        assert_eq!(
            MoebiusMap::identity(Mode::Exact).classify(),
            MapClass::Identity
        );
    }

    #[test]
    fn fixed_points_cases() {
        assert_eq!(xi(1).fixed_points().unwrap(), vec![ExtComplex::Infinity]);
        let lox = MoebiusMap::new(
            Scalar::exact_int(2, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_ratio(1, 2, 0, 1),
        )
        .unwrap();
        let fps = lox.fixed_points().unwrap();
        assert!(fps.contains(&ExtComplex::Infinity));
        assert!(fps.contains(&ExtComplex::Finite(Scalar::exact_int(0, 0))));
        // Golden pair for [[1,1],[1,2]]: roots of z^2 + z - 1, i.e. (-1 +- sqrt 5)/2.
        let g = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        let fps = g.fixed_points().unwrap();
        let expected = [0.618033988749895_f64, -1.618033988749895_f64];
        for e in expected {
            assert!(
                fps.iter().any(|p| p
                    .approx_eq(&ExtComplex::finite_f64(e, 0.0), 1e-12)),
                "missing fixed point {e}"
            );
        }
        // Each fixed point is genuinely fixed.
        for p in &fps {
            assert!(g.apply(p).approx_eq(p, 1e-12));
        }
        assert!(MoebiusMap::identity(Mode::Exact).fixed_points().is_err());
    }

    #[test]
    fn xi_power_detection() {
        assert_eq!(xi(3).xi_power(), Some(BigInt::from(3)));
        assert_eq!(xi(-2).xi_power(), Some(BigInt::from(-2)));
        let half = MoebiusMap::translation(Scalar::exact_ratio(1, 2, 0, 1));
        assert_eq!(half.xi_power(), None);
        let g = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        assert_eq!(g.xi_power(), None);
    }

    #[test]
    fn dilation_conjugation_entrywise() {
        // z -> z/3 conjugation sends xi_3 to xi_1.
        let lam = Scalar::exact_int(3, 0);
        let g = xi(3).dilation_conjugate(&lam).unwrap();
        assert!(g.proj_eq(&xi(1)));
    }

    #[test]
    fn flip_sends_xi_to_inverse() {
        assert!(xi(2).flip().proj_eq(&xi(-2)));
        // Flip preserves real entries and determinant.
        let g = MoebiusMap::from_i64(1, 1, 1, 2).unwrap();
        let fg = g.flip();
        assert!(fg.a.is_real() && fg.b.is_real() && fg.c.is_real() && fg.d.is_real());
    }

    #[test]
    fn classify_is_conjugation_invariant() {
        let h = MoebiusMap::from_i64(2, 1, 1, 1).unwrap();
        for g in [
            xi(1),
            MoebiusMap::from_i64(1, 1, 1, 2).unwrap(),
            MoebiusMap::from_i64(0, -1, 1, 0).unwrap(),
        ] {
            assert_eq!(g.classify(), g.conjugate_by(&h).classify());
        }
    }
}
