//! Closed half-planes, disks and disk complements on the extended plane, with
//! exact images under Moebius maps and exact disjointness verdicts.
//!
//! Internally a region is the nonnegativity locus of a Hermitian form
//! Q(z) = A|z|^2 + 2 Re(conj(B) z) + C. Images under a Moebius map g are the
//! congruence transform of the form by g^-1, which keeps every computation
//! rational in exact mode. Radii are stored squared for the same reason.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::moebius::{ExtComplex, MoebiusMap};
use crate::scalar::{Mode, Scalar};

/// A closed region of the extended plane.
///
/// `HalfPlane { normal, offset }` is `{ z : <normal, z> >= offset }` where
/// `<n, z> = Re(conj(n) z)`; the normal need not be unit length (the pair is
/// scale invariant up to positive factors). `Disk { outside: true }` is the
/// closed complement of the open disk and contains infinity.
#[derive(Debug, Clone)]
pub enum Region {
    HalfPlane { normal: Scalar, offset: Scalar },
    Disk { center: Scalar, radius_sq: Scalar, outside: bool },
}

impl Region {
    /// H_t = { Im z >= t }.
    pub fn upper(t: Scalar) -> Region {
        let mode = t.mode();
        Region::HalfPlane {
            normal: match mode {
                Mode::Exact => Scalar::exact_int(0, 1),
                Mode::Float => Scalar::from_f64(0.0, 1.0),
            },
            offset: t,
        }
    }

    /// H*_t = { Im z <= t }.
    pub fn lower(t: Scalar) -> Region {
        let mode = t.mode();
        Region::HalfPlane {
            normal: match mode {
                Mode::Exact => Scalar::exact_int(0, -1),
                Mode::Float => Scalar::from_f64(0.0, -1.0),
            },
            offset: -&t,
        }
    }

    pub fn disk(center: Scalar, radius_sq: Scalar) -> Result<Region> {
        if radius_sq.re_sign() <= 0 || !radius_sq.is_real() {
            return Err(Error::Precondition("disk radius^2 must be positive".into()));
        }
        Ok(Region::Disk {
            center,
            radius_sq,
            outside: false,
        })
    }

    pub fn mode(&self) -> Mode {
        match self {
            Region::HalfPlane { normal, offset } => {
                if normal.mode() == Mode::Exact && offset.mode() == Mode::Exact {
                    Mode::Exact
                } else {
                    Mode::Float
                }
            }
            Region::Disk { center, radius_sq, .. } => {
                if center.mode() == Mode::Exact && radius_sq.mode() == Mode::Exact {
                    Mode::Exact
                } else {
                    Mode::Float
                }
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Region::Disk { outside: false, .. })
    }

    /// Does the closed region (in the extended plane) contain the point?
    /// Half-planes and disk complements contain infinity.
    pub fn contains(&self, z: &ExtComplex) -> bool {
        match z {
            ExtComplex::Infinity => !self.is_bounded(),
            ExtComplex::Finite(z) => match self {
                Region::HalfPlane { normal, offset } => {
                    (&dot(normal, z) - offset).re_sign() >= 0
                }
                Region::Disk { center, radius_sq, outside } => {
                    let d2 = (z - center).norm_sqr();
                    let s = (&d2 - radius_sq).re_sign();
                    if *outside {
                        s >= 0
                    } else {
                        s <= 0
                    }
                }
            },
        }
    }

    /// Strict interior membership for finite points.
    pub fn contains_interior(&self, z: &Scalar) -> bool {
        match self {
            Region::HalfPlane { normal, offset } => (&dot(normal, z) - offset).re_sign() > 0,
            Region::Disk { center, radius_sq, outside } => {
                let d2 = (z - center).norm_sqr();
                let s = (&d2 - radius_sq).re_sign();
                if *outside {
                    s > 0
                } else {
                    s < 0
                }
            }
        }
    }

    /// Is the region invariant under z -> z + 1 (the generator of J)?
    /// True exactly for half-planes with horizontal boundary.
    pub fn is_xi1_invariant(&self) -> bool {
        match self {
            Region::HalfPlane { normal, .. } => normal.real_part().is_zero_tol(1e-15),
            Region::Disk { .. } => false,
        }
    }

    /// Translate vertically by real h.
    pub fn shift_vertical(&self, h: &Scalar) -> Region {
        let ih = match h.mode() {
            Mode::Exact => &Scalar::exact_int(0, 1) * h,
            Mode::Float => &Scalar::from_f64(0.0, 1.0) * h,
        };
        match self {
            Region::HalfPlane { normal, offset } => Region::HalfPlane {
                normal: normal.clone(),
                offset: offset + &dot(normal, &ih),
            },
            Region::Disk { center, radius_sq, outside } => Region::Disk {
                center: center + &ih,
                radius_sq: radius_sq.clone(),
                outside: *outside,
            },
        }
    }

    /// Containment in the closed horizontal strip { lo <= Im z <= hi }.
    /// Unbounded regions never fit.
    pub fn contained_in_strip(&self, lo: &Scalar, hi: &Scalar) -> bool {
        match self {
            Region::Disk { center, radius_sq, outside: false } => {
                let im = center.imag_part();
                let up = hi - &im;
                let dn = &im - lo;
                up.re_sign() >= 0
                    && dn.re_sign() >= 0
                    && (&(&up * &up) - radius_sq).re_sign() >= 0
                    && (&(&dn * &dn) - radius_sq).re_sign() >= 0
            }
            _ => false,
        }
    }

    /// Top and bottom heights (Im range) of a bounded disk, in floats.
    pub fn im_range_f64(&self) -> Option<(f64, f64)> {
        match self {
            Region::Disk { center, radius_sq, outside: false } => {
                let c = center.to_c64();
                let r = radius_sq.to_c64().re.max(0.0).sqrt();
                Some((c.im - r, c.im + r))
            }
            _ => None,
        }
    }
}

fn dot(n: &Scalar, z: &Scalar) -> Scalar {
    // <n, z> = Re(conj(n) z)
    (&n.conj() * z).real_part()
}

/// Hermitian form A|z|^2 + 2 Re(conj(B) z) + C with A, C real.
struct Herm {
    a: Scalar,
    b: Scalar,
    c: Scalar,
}

fn to_herm(r: &Region) -> Herm {
    match r {
        Region::HalfPlane { normal, offset } => {
            let mode = r.mode();
            let half = match mode {
                Mode::Exact => Scalar::exact_ratio(1, 2, 0, 1),
                Mode::Float => Scalar::from_f64(0.5, 0.0),
            };
            Herm {
                a: Scalar::zero(mode),
                b: &half * normal,
                c: -offset,
            }
        }
        Region::Disk { center, radius_sq, outside } => {
            let a = radius_sq.mode();
            let one = Scalar::one(a);
            let c0 = radius_sq - &center.norm_sqr();
            if *outside {
                Herm {
                    a: one,
                    b: -center,
                    c: -&c0,
                }
            } else {
                Herm {
                    a: -&one,
                    b: center.clone(),
                    c: c0,
                }
            }
        }
    }
}

fn from_herm(h: Herm) -> Result<Region> {
    let sign = h.a.re_sign();
    if sign == 0 {
        if h.b.is_zero() {
            return Err(Error::Arithmetic("degenerate region form".into()));
        }
        let mode = if h.b.mode() == Mode::Exact && h.c.mode() == Mode::Exact {
            Mode::Exact
        } else {
            Mode::Float
        };
        let two = match mode {
            Mode::Exact => Scalar::exact_int(2, 0),
            Mode::Float => Scalar::from_f64(2.0, 0.0),
        };
        return Ok(Region::HalfPlane {
            normal: &two * &h.b,
            offset: -&h.c,
        });
    }
    // center = -B/A, r^2 = (|B|^2 - A C)/A^2
    let center = &(-&h.b) / &h.a;
    let radius_sq = &(&h.b.norm_sqr() - &(&h.a * &h.c)) / &(&h.a * &h.a);
    if radius_sq.re_sign() <= 0 {
        return Err(Error::Arithmetic(
            "image form is not a genuine circle".into(),
        ));
    }
    Ok(Region::Disk {
        center,
        radius_sq,
        outside: sign > 0,
    })
}

/// Exact image g(R) of a region under a Moebius map. The image of a
/// half-plane whose boundary passes through the pole of g is again a
/// half-plane; if the pole lies inside the open region the image is a disk
/// complement; otherwise a disk.
pub fn region_image(g: &MoebiusMap, r: &Region) -> Result<Region> {
    // Congruence by m = g^-1: H' = m^dagger H m.
    let inv = g.inverse();
    let (al, be, ga, de) = (&inv.a, &inv.b, &inv.c, &inv.d);
    let h = to_herm(r);

    let two = match h.b.mode() {
        Mode::Exact => Scalar::exact_int(2, 0),
        Mode::Float => Scalar::from_f64(2.0, 0.0),
    };
    // A' = A|al|^2 + 2 Re(B conj(al) ga) + C |ga|^2  (note: B pairs with
    // conj(row) * col; entry (0,0) of m^dagger H m)
    let a2 = &(&(&h.a * &al.norm_sqr()) + &(&two * &(&(&h.b * &al.conj()) * ga).real_part()))
        + &(&h.c * &ga.norm_sqr());
    // B' (entry (0,1)) = conj(al)(A be + B de) + conj(ga)(conj(B) be + C de)
    let b2 = &(&al.conj() * &(&(&h.a * be) + &(&h.b * de)))
        + &(&ga.conj() * &(&(&h.b.conj() * be) + &(&h.c * de)));
    let c2 = &(&(&h.a * &be.norm_sqr()) + &(&two * &(&(&h.b * &be.conj()) * de).real_part()))
        + &(&h.c * &de.norm_sqr());

    from_herm(Herm {
        a: a2.real_part(),
        b: b2,
        c: c2.real_part(),
    })
}

/// Image of a half-plane (spec wrapper around [`region_image`]).
pub fn halfplane_image(g: &MoebiusMap, h: &Region) -> Result<Region> {
    match h {
        Region::HalfPlane { .. } => region_image(g, h),
        _ => Err(Error::Precondition("expected a half-plane".into())),
    }
}

/// Disjointness verdict for two closed regions of the plane, with a signed
/// separation margin in floats. Tangent closed regions are NOT disjoint and
/// report margin 0. The verdict is exact in exact mode. Pairs of regions
/// that always overlap in an unbounded set report `-inf`.
pub fn region_disjoint(r1: &Region, r2: &Region) -> (bool, f64) {
    use Region::*;
    match (r1, r2) {
        (HalfPlane { normal: n1, offset: t1 }, HalfPlane { normal: n2, offset: t2 }) => {
            // Antiparallel normals: { <n1,z> >= t1 } vs { <n1,z> <= -t2/lam }.
            let cross = (&(&n1.conj() * n2)).imag_part();
            let dotn = (&(&n1.conj() * n2)).real_part();
            if cross.is_zero_tol(1e-15) && dotn.re_sign() < 0 {
                // n2 = -lam n1 with lam = -<n1,n2>/|n1|^2 > 0.
                let lam = &(-&dotn) / &n1.norm_sqr();
                // Disjoint iff t1 > -t2/lam, i.e. lam t1 + t2 > 0.
                let s = &(&lam * t1) + t2;
                let n1a = n1.to_c64().norm();
                let n2a = n2.to_c64().norm();
                let margin = t1.to_c64().re / n1a + t2.to_c64().re / n2a;
                (s.re_sign() > 0, margin)
            } else {
                (false, f64::NEG_INFINITY)
            }
        }
        (HalfPlane { normal, offset }, Disk { center, radius_sq, outside })
        | (Disk { center, radius_sq, outside }, HalfPlane { normal, offset }) => {
            if *outside {
                // A half-plane always meets the complement of a bounded disk.
                (false, f64::NEG_INFINITY)
            } else {
                // Disjoint iff the center is strictly on the negative side at
                // distance > r: s = offset - <n,c> with s > 0 and s^2 > r^2 |n|^2.
                let s = offset - &dot(normal, center);
                let lhs = &(&s * &s) - &(radius_sq * &normal.norm_sqr());
                let verdict = s.re_sign() > 0 && lhs.re_sign() > 0;
                let margin = s.to_c64().re / normal.to_c64().norm()
                    - radius_sq.to_c64().re.max(0.0).sqrt();
                (verdict, margin)
            }
        }
        (
            Disk { center: c1, radius_sq: r1s, outside: o1 },
            Disk { center: c2, radius_sq: r2s, outside: o2 },
        ) => {
            let d2 = (c1 - c2).norm_sqr();
            let dist = d2.to_c64().re.max(0.0).sqrt();
            let rad1 = r1s.to_c64().re.max(0.0).sqrt();
            let rad2 = r2s.to_c64().re.max(0.0).sqrt();
            match (o1, o2) {
                (false, false) => {
                    // |c1-c2| > r1 + r2
                    let e = &(&d2 - r1s) - r2s;
                    let strict = e.re_sign() > 0
                        && (&(&e * &e) - &(&(&Scalar::exact_int(4, 0).to_mode(e.mode()) * r1s) * r2s))
                            .re_sign()
                            > 0;
                    (strict, dist - rad1 - rad2)
                }
                (false, true) | (true, false) => {
                    // Inner disk strictly inside the removed open disk:
                    // |c1-c2| + r_in < r_out, square-free as
                    // E = r_out^2 + r_in^2 - d^2 > 2 r_in r_out together with
                    // r_out^2 > r_in^2.
                    let (rin_sq, rout_sq, rin_f, rout_f) = if *o1 {
                        (r2s, r1s, rad2, rad1)
                    } else {
                        (r1s, r2s, rad1, rad2)
                    };
                    let e = &(rout_sq + rin_sq) - &d2;
                    let four = Scalar::exact_int(4, 0).to_mode(e.mode());
                    let verdict = e.re_sign() > 0
                        && (&(&e * &e) - &(&(&four * rin_sq) * rout_sq)).re_sign() > 0
                        && (rout_sq - rin_sq).re_sign() > 0;
                    (verdict, rout_f - dist - rin_f)
                }
                (true, true) => (false, f64::NEG_INFINITY),
            }
        }
    }
}

impl Scalar {
    fn to_mode(&self, mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => self.clone(),
            Mode::Float => self.to_float(),
        }
    }
}

/// Serializable shape of a region for certificates and reports.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionDesc {
    HalfPlane { normal: [f64; 2], offset: f64 },
    Disk { center: [f64; 2], radius: f64, outside: bool },
}

impl From<&Region> for RegionDesc {
    fn from(r: &Region) -> Self {
        match r {
            Region::HalfPlane { normal, offset } => {
                let n = normal.to_c64();
                RegionDesc::HalfPlane {
                    normal: [n.re, n.im],
                    offset: offset.to_c64().re,
                }
            }
            Region::Disk { center, radius_sq, outside } => {
                let c: Complex64 = center.to_c64();
                RegionDesc::Disk {
                    center: [c.re, c.im],
                    radius: radius_sq.to_c64().re.max(0.0).sqrt(),
                    outside: *outside,
                }
            }
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::HalfPlane { normal, offset } => {
                let n = normal.to_c64();
                if n.re == 0.0 && n.im > 0.0 {
                    write!(f, "H_{}", offset.to_c64().re / n.im)
                } else if n.re == 0.0 && n.im < 0.0 {
                    write!(f, "H*_{}", offset.to_c64().re / n.im)
                } else {
                    write!(f, "halfplane(n={}, t={})", normal, offset)
                }
            }
            Region::Disk { center, radius_sq, outside } => write!(
                f,
                "{}disk({}, r={})",
                if *outside { "co-" } else { "" },
                center,
                radius_sq.to_c64().re.max(0.0).sqrt()
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(v: i64) -> Scalar {
        Scalar::exact_int(v, 0)
    }

    #[test]
    fn identity_preserves_halfplane() {
        let h = Region::upper(exact(3));
        let img = region_image(&MoebiusMap::identity(Mode::Exact), &h).unwrap();
        match img {
            Region::HalfPlane { .. } => {}
            _ => panic!("expected half-plane"),
        }
        assert!(img.contains(&ExtComplex::Finite(Scalar::exact_int(0, 5))));
        assert!(!img.contains(&ExtComplex::Finite(Scalar::exact_int(0, 2))));
    }

    #[test]
    fn vertical_translation_shifts_offset() {
        let h = Region::upper(exact(1));
        let g = MoebiusMap::xi_vertical(&exact(2));
        let img = region_image(&g, &h).unwrap();
        // H_1 + 2i = H_3
        assert!(img.contains(&ExtComplex::Finite(Scalar::exact_int(0, 3))));
        assert!(!img.contains_interior(&Scalar::exact_int(0, 3)));
        assert!(!img.contains(&ExtComplex::Finite(Scalar::exact_int(0, 2))));
        assert!(img.is_xi1_invariant());
    }

    #[test]
    fn inversion_maps_h1_to_golden_disk() {
        // z -> -1/z sends H_1 to the disk centered i/2 of radius 1/2;
        // oracle: the image circle passes through the images of i, 1+i and
        // infinity -> 0 on the boundary of H_1.
        let s = MoebiusMap::from_i64(0, -1, 1, 0).unwrap();
        let h = Region::upper(exact(1));
        let img = region_image(&s, &h).unwrap();
        match &img {
            Region::Disk { center, radius_sq, outside } => {
                assert!(!outside);
                assert_eq!(*center, Scalar::exact_ratio(0, 1, 1, 2));
                assert_eq!(*radius_sq, Scalar::exact_ratio(1, 4, 0, 1));
            }
            _ => panic!("expected disk"),
        }
        for bdry in [
            ExtComplex::Finite(Scalar::exact_int(0, 1)),
            ExtComplex::Finite(Scalar::exact_int(1, 1)),
            ExtComplex::Infinity,
        ] {
            let p = s.apply(&bdry);
            // Image boundary points lie on the image boundary: contained in
            // the closed disk but not its interior.
            if let ExtComplex::Finite(z) = &p {
                assert!(img.contains(&p));
                assert!(!img.contains_interior(z));
            }
        }
    }

    #[test]
    fn pole_inside_gives_complement() {
        // z -> -1/z with H_{-1}: pole 0 is interior, image is a disk complement.
        let s = MoebiusMap::from_i64(0, -1, 1, 0).unwrap();
        let h = Region::upper(exact(-1));
        let img = region_image(&s, &h).unwrap();
        match img {
            Region::Disk { outside: true, .. } => {}
            other => panic!("expected disk complement, got {other}"),
        }
        assert!(img.contains(&ExtComplex::Infinity));
    }

    #[test]
    fn pole_on_boundary_gives_halfplane() {
        // z -> -1/z with H_0: pole 0 on the boundary, image stays a half-plane.
        let s = MoebiusMap::from_i64(0, -1, 1, 0).unwrap();
        let h = Region::upper(exact(0));
        let img = region_image(&s, &h).unwrap();
        assert!(matches!(img, Region::HalfPlane { .. }));
    }

    #[test]
    fn disjointness_goldens() {
        let h1 = Region::upper(exact(1));
        let hm1 = Region::lower(exact(-1));
        let (dj, m) = region_disjoint(&h1, &hm1);
        assert!(dj);
        assert!((m - 2.0).abs() < 1e-12);

        // Tangent disk: not disjoint, margin 0.
        let d = Region::disk(Scalar::exact_ratio(0, 1, 1, 2), Scalar::exact_ratio(1, 4, 0, 1))
            .unwrap();
        let (dj, m) = region_disjoint(&d, &h1);
        assert!(!dj);
        assert!(m.abs() < 1e-12);

        let d01 = Region::disk(exact(0), exact(1)).unwrap();
        let h2 = Region::upper(exact(2));
        let (dj, m) = region_disjoint(&d01, &h2);
        assert!(dj);
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjointness_is_symmetric_and_irreflexive() {
        let regions = [
            Region::upper(exact(1)),
            Region::lower(exact(-2)),
            Region::disk(exact(0), exact(4)).unwrap(),
            Region::Disk {
                center: exact(3),
                radius_sq: exact(1),
                outside: true,
            },
        ];
        for r in &regions {
            let (dj, _) = region_disjoint(r, r);
            assert!(!dj, "{r} is not disjoint from itself");
        }
        for r in &regions {
            for s in &regions {
                assert_eq!(region_disjoint(r, s).0, region_disjoint(s, r).0);
            }
        }
    }

    #[test]
    fn disk_disk_cases() {
        let d1 = Region::disk(exact(0), exact(1)).unwrap();
        let d2 = Region::disk(exact(4), exact(1)).unwrap();
        let (dj, m) = region_disjoint(&d1, &d2);
        assert!(dj);
        assert!((m - 2.0).abs() < 1e-12);
        // Tangent externally: distance 2 = 1 + 1 -> closed sets meet.
        let d3 = Region::disk(exact(2), exact(1)).unwrap();
        assert!(!region_disjoint(&d1, &d3).0);
        // Inside a complement: disk radius 1 at 0 vs complement of disk radius 3 at 0.
        let comp = Region::Disk {
            center: exact(0),
            radius_sq: exact(9),
            outside: true,
        };
        let (dj, m) = region_disjoint(&d1, &comp);
        assert!(dj);
        assert!((m - 2.0).abs() < 1e-12);
        // Internally tangent: radius 3 disk at 0 vs complement of radius-3 disk.
        let d4 = Region::disk(exact(0), exact(9)).unwrap();
        assert!(!region_disjoint(&d4, &comp).0);
    }

    #[test]
    fn strip_containment() {
        let d = Region::disk(Scalar::exact_int(0, 5), exact(4)).unwrap();
        assert!(d.contained_in_strip(&exact(3), &exact(7)));
        assert!(!d.contained_in_strip(&exact(4), &exact(7)));
        assert!(!Region::upper(exact(0)).contained_in_strip(&exact(-10), &exact(10)));
    }

    #[test]
    fn boundary_three_point_oracle() {
        // The image boundary passes through the images of three boundary points.
        let g = MoebiusMap::from_i64(2, 1, 3, 2).unwrap();
        let h = Region::upper(exact(2));
        let img = region_image(&g, &h).unwrap();
        for x in [-1i64, 0, 7] {
            let p = g.apply(&ExtComplex::Finite(Scalar::exact_int(x, 2)));
            if let ExtComplex::Finite(z) = &p {
                assert!(img.contains(&p) && !img.contains_interior(z));
            }
        }
    }
}
