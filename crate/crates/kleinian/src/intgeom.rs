//! Gaussian-integer fast path for the invariance enumerations.
//!
//! Matrices with exact rational entries are scaled entrywise to Gaussian
//! integers (a projective no-op), so word products and the Hermitian region
//! algebra run over BigInt with no gcd normalization. Region targets are
//! vertical half-planes { dir * Im z >= num/den }, which is all the
//! invariance machinery ever checks, and every verdict stays exact.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::moebius::MoebiusMap;
use crate::region::Region;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GInt {
    fn zero() -> GInt {
        GInt {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GInt) -> GInt {
        GInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn add(&self, o: &GInt) -> GInt {
        GInt {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn neg(&self) -> GInt {
        GInt {
            re: -&self.re,
            im: -&self.im,
        }
    }

    fn conj(&self) -> GInt {
        GInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    fn norm_sqr(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GMat {
    pub a: GInt,
    pub b: GInt,
    pub c: GInt,
    pub d: GInt,
}

impl GMat {
    pub fn mul(&self, o: &GMat) -> GMat {
        GMat {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    pub fn adjugate(&self) -> GMat {
        GMat {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    pub fn entries_c64_normalized(&self) -> [Complex64; 4] {
        let mut e = [
            self.a.to_c64(),
            self.b.to_c64(),
            self.c.to_c64(),
            self.d.to_c64(),
        ];
        let s = e.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if s > 0.0 && s.is_finite() {
            for z in &mut e {
                *z /= s;
            }
        } else {
            // Entries exceed f64 range: scale by the largest bit length.
            let bits = [&self.a, &self.b, &self.c, &self.d]
                .iter()
                .map(|g| g.re.bits().max(g.im.bits()))
                .max()
                .unwrap();
            let shift = bits.saturating_sub(500);
            let sc = |g: &GInt| {
                Complex64::new(
                    (&g.re >> shift).to_f64().unwrap_or(f64::NAN),
                    (&g.im >> shift).to_f64().unwrap_or(f64::NAN),
                )
            };
            e = [sc(&self.a), sc(&self.b), sc(&self.c), sc(&self.d)];
            let s = e.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            if s > 0.0 {
                for z in &mut e {
                    *z /= s;
                }
            }
        }
        e
    }

    /// Is this (projectively) an integer translation? Returns the amount.
    /// The matrix carries an arbitrary Gaussian-integer scalar factor.
    pub fn xi_power(&self) -> Option<BigInt> {
        if !self.c.is_zero() || self.a != self.d || self.a.is_zero() {
            return None;
        }
        // b / a must be a (real) integer: b * conj(a) = k |a|^2.
        let n = self.b.mul(&self.a.conj());
        if !n.im.is_zero() {
            return None;
        }
        let asq = self.a.norm_sqr();
        let (q, r) = num_integer::Integer::div_rem(&n.re, &asq);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Tolerance-band J test for rationalized numeric data.
    pub fn xi_power_fuzzy(&self, fuzz: f64) -> bool {
        if fuzz == 0.0 {
            return self.xi_power().is_some();
        }
        let [a, b, c, d] = self.entries_c64_normalized();
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if scale == 0.0 || c.norm() > fuzz * scale || (a - d).norm() > fuzz * scale {
            return false;
        }
        if a.norm() < fuzz {
            return false;
        }
        let t = b / a;
        t.im.abs() <= fuzz && (t.re - t.re.round()).abs() <= fuzz
    }

    /// Recover a normalized MoebiusMap (the scalar factor has a square
    /// determinant, so exact normalization succeeds).
    pub fn to_moebius(&self) -> MoebiusMap {
        let s = |g: &GInt| {
            Scalar::exact_big(
                BigRational::from_integer(g.re.clone()),
                BigRational::from_integer(g.im.clone()),
            )
        };
        MoebiusMap::new(s(&self.a), s(&self.b), s(&self.c), s(&self.d))
            .unwrap_or_else(|_| {
                let [a, b, c, d] = self.entries_c64_normalized();
                MoebiusMap {
                    a: Scalar::from_c64(a),
                    b: Scalar::from_c64(b),
                    c: Scalar::from_c64(c),
                    d: Scalar::from_c64(d),
                }
            })
    }
}

/// Scale an exact-entry map to Gaussian integers. None for float entries.
pub(crate) fn integerize(m: &MoebiusMap) -> Option<GMat> {
    let parts = |s: &Scalar| -> Option<(BigRational, BigRational)> {
        match s {
            Scalar::Exact(_) => Some((
                s.real_part().as_rational().unwrap(),
                s.imag_part().as_rational().unwrap(),
            )),
            Scalar::Float(_) => None,
        }
    };
    let entries = [
        parts(&m.a)?,
        parts(&m.b)?,
        parts(&m.c)?,
        parts(&m.d)?,
    ];
    let mut lcm = BigInt::from(1);
    for (re, im) in &entries {
        lcm = num_integer::Integer::lcm(&lcm, re.denom());
        lcm = num_integer::Integer::lcm(&lcm, im.denom());
    }
    let lift = |(re, im): &(BigRational, BigRational)| GInt {
        re: (re * BigRational::from_integer(lcm.clone())).to_integer(),
        im: (im * BigRational::from_integer(lcm.clone())).to_integer(),
    };
    Some(GMat {
        a: lift(&entries[0]),
        b: lift(&entries[1]),
        c: lift(&entries[2]),
        d: lift(&entries[3]),
    })
}

/// Vertical half-plane { dir * Im z >= num / den }, den > 0.
#[derive(Debug, Clone)]
pub(crate) struct VertHalf {
    pub dir: i8,
    pub num: BigInt,
    pub den: BigInt,
}

impl VertHalf {
    pub fn from_region(r: &Region) -> Option<VertHalf> {
        let Region::HalfPlane { normal, offset } = r else {
            return None;
        };
        if !normal.real_part().is_zero_tol(1e-15) {
            return None;
        }
        let n_im = match normal {
            Scalar::Exact(_) => normal.imag_part().as_rational()?,
            Scalar::Float(z) => BigRational::from_float(z.im)?,
        };
        if n_im.is_zero() {
            return None;
        }
        let t = match offset {
            Scalar::Exact(_) => offset.as_rational()?,
            Scalar::Float(z) => {
                if z.im != 0.0 {
                    return None;
                }
                BigRational::from_float(z.re)?
            }
        };
        // { <n, z> >= t } with n = (0, n_im): n_im * Im z >= t.
        let dir = if n_im.is_positive() { 1 } else { -1 };
        let t_scaled = t / n_im.abs();
        Some(VertHalf {
            dir,
            num: t_scaled.numer().clone(),
            den: t_scaled.denom().clone(),
        })
    }

    /// Hermitian form (A, B, C) of { Q >= 0 }, scaled integral:
    /// Q = 2 den dir Im z - 2 num.
    fn herm(&self) -> (BigInt, GInt, BigInt) {
        (
            BigInt::zero(),
            GInt {
                re: BigInt::zero(),
                im: BigInt::from(self.dir) * &self.den,
            },
            BigInt::from(-2) * &self.num,
        )
    }

    pub fn value_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / self.den.to_f64().unwrap_or(f64::NAN)
            * self.dir as f64
    }
}

/// Image Hermitian form of the half-plane under the matrix: the congruence
/// by the adjugate (a positive multiple of the true inverse congruence).
pub(crate) fn image_herm(m: &GMat, h: &VertHalf) -> (BigInt, GInt, BigInt) {
    let (ha, hb, hc) = h.herm();
    let inv = m.adjugate();
    let (al, be, ga, de) = (&inv.a, &inv.b, &inv.c, &inv.d);
    // A' = A|al|^2 + 2 Re(B conj(al) ga) + C |ga|^2
    let t = hb.mul(&al.conj()).mul(ga);
    let a2 = &ha * al.norm_sqr() + BigInt::from(2) * &t.re + &hc * ga.norm_sqr();
    // B' = conj(al)(A be + B de) + conj(ga)(conj(B) be + C de)
    let term1 = GInt {
        re: &ha * &be.re,
        im: &ha * &be.im,
    }
    .add(&hb.mul(de));
    let term2 = hb.conj().mul(be).add(&GInt {
        re: &hc * &de.re,
        im: &hc * &de.im,
    });
    let b2 = al.conj().mul(&term1).add(&ga.conj().mul(&term2));
    let t2 = hb.mul(&be.conj()).mul(de);
    let c2 = &ha * be.norm_sqr() + BigInt::from(2) * &t2.re + &hc * de.norm_sqr();
    (a2, b2, c2)
}

/// Exact disjointness of the image region {A'|z|^2 + 2Re(conj(B')z) + C' >= 0}
/// from the vertical half-plane target, with a float margin.
pub(crate) fn disjoint_from_vert(
    herm: &(BigInt, GInt, BigInt),
    target: &VertHalf,
) -> (bool, f64) {
    let (a, b, c) = herm;
    let t_num = &target.num;
    let t_den = &target.den;
    let dir = BigInt::from(target.dir);
    match a.sign() {
        num_bigint::Sign::NoSign => {
            // Half-plane image { 2 Re(conj(B) z) + C >= 0 }. Disjoint only
            // when antiparallel to the vertical target.
            if !b.re.is_zero() {
                return (false, f64::NEG_INFINITY);
            }
            let m = -(&dir * &b.im); // antiparallel iff m > 0
            if !m.is_positive() {
                return (false, f64::NEG_INFINITY);
            }
            // Image: dir * Im z <= C / (2m); target: dir * Im z >= num/den.
            // Disjoint iff C * den < 2 m * num.
            let lhs = c * t_den;
            let rhs = BigInt::from(2) * &m * t_num;
            let margin = (rhs.to_f64().unwrap_or(f64::NAN)
                - lhs.to_f64().unwrap_or(f64::NAN))
                / (2.0 * m.to_f64().unwrap_or(f64::NAN) * t_den.to_f64().unwrap_or(f64::NAN));
            (lhs < rhs, margin)
        }
        num_bigint::Sign::Plus => {
            // Complement of a disk always meets a half-plane.
            (false, f64::NEG_INFINITY)
        }
        num_bigint::Sign::Minus => {
            // Disk with u = -A > 0, center Im = Im(B)/u,
            // r^2 = (|B|^2 + u C)/u^2.
            let u = -a;
            // S2 = num * u - dir * Im(B) * den  (u den times the distance
            // from the boundary line to the center, signed).
            let s2 = t_num * &u - &dir * &b.im * t_den;
            let rad2 = b.norm_sqr() + &u * c; // r^2 u^2
            let disjoint = s2.is_positive() && &s2 * &s2 > &rad2 * t_den * t_den;
            let uf = u.to_f64().unwrap_or(f64::NAN);
            let margin = s2.to_f64().unwrap_or(f64::NAN)
                / (uf * t_den.to_f64().unwrap_or(f64::NAN))
                - (rad2.to_f64().unwrap_or(f64::NAN).max(0.0)).sqrt() / uf;
            (disjoint, margin)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::punctured_torus_group;
    use crate::region::{region_disjoint, region_image};

    fn vert(dir: i8, num: i64, den: i64) -> VertHalf {
        VertHalf {
            dir,
            num: BigInt::from(num),
            den: BigInt::from(den),
        }
    }

    #[test]
    fn integerize_clears_denominators() {
        let m = MoebiusMap::new(
            Scalar::exact_ratio(1, 3, 0, 1),
            Scalar::exact_int(1, 0),
            Scalar::exact_int(0, 0),
            Scalar::exact_int(3, 0),
        )
        .unwrap();
        let g = integerize(&m).unwrap();
        assert!(g.a.im.is_zero());
        // Entries are integer multiples of the original by one factor.
        assert_eq!(&g.d.re, &(&g.a.re * BigInt::from(9)));
    }

    #[test]
    fn xi_power_with_scalar_factor() {
        // 5 * xi_3.
        let m = GMat {
            a: GInt { re: 5.into(), im: 0.into() },
            b: GInt { re: 15.into(), im: 0.into() },
            c: GInt::zero(),
            d: GInt { re: 5.into(), im: 0.into() },
        };
        assert_eq!(m.xi_power(), Some(BigInt::from(3)));
        let n = GMat {
            a: GInt { re: 2.into(), im: 0.into() },
            b: GInt { re: 1.into(), im: 0.into() },
            c: GInt::zero(),
            d: GInt { re: 2.into(), im: 0.into() },
        };
        assert_eq!(n.xi_power(), None); // translation by 1/2
    }

    #[test]
    fn integer_engine_matches_scalar_engine() {
        // Cross-validate image/disjointness against the Scalar-based region
        // machinery on the torus generators and several heights.
        let g = punctured_torus_group().unwrap();
        let mut mats = g.gens.clone();
        mats.extend(g.gens.iter().map(|m| m.inverse()));
        for gen in &mats {
            let gm = integerize(gen).unwrap();
            for (dir, t) in [(1i8, 1i64), (1, 2), (-1, -1), (1, 0)] {
                let vh = vert(dir, t, 1);
                let herm = image_herm(&gm, &vh);
                let (fast, fast_margin) = disjoint_from_vert(&herm, &vh);
                let region = if dir == 1 {
                    Region::upper(Scalar::exact_int(t, 0))
                } else {
                    Region::lower(Scalar::exact_int(-t, 0))
                };
                let img = region_image(gen, &region).unwrap();
                let (slow, slow_margin) = region_disjoint(&img, &region);
                assert_eq!(fast, slow, "gen {gen} target dir {dir} t {t}");
                if fast && fast_margin.is_finite() {
                    assert!((fast_margin - slow_margin).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn tangency_is_not_disjoint_exactly() {
        // z -> -1/z maps H_1 to the disk tangent to H_1 at i.
        let s = MoebiusMap::from_i64(0, -1, 1, 0).unwrap();
        let gm = integerize(&s).unwrap();
        let vh = vert(1, 1, 1);
        let herm = image_herm(&gm, &vh);
        let (disjoint, margin) = disjoint_from_vert(&herm, &vh);
        assert!(!disjoint);
        assert!(margin.abs() < 1e-12);
    }
}
