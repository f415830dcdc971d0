//! Small permutation arithmetic on {0, .., n-1}. Products compose left to
//! right: `(p * q)` acts as "apply p, then q", matching the right action of
//! words on coset points.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_valid(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &v in &self.0 {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// Full cycle 0 -> 1 -> ... -> n-1 -> 0.
    pub fn full_cycle(n: usize) -> Perm {
        Perm((0..n).map(|i| (i + 1) % n).collect())
    }

    /// Reversal i -> n-1-i.
    pub fn reversal(n: usize) -> Perm {
        Perm((0..n).rev().collect())
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Perm {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, j);
        Perm(v)
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0; self.0.len()];
        for (i, &pi) in self.0.iter().enumerate() {
            v[pi] = i;
        }
        Perm(v)
    }

    /// Left-to-right product: (self * rhs)(i) = rhs(self(i)).
    pub fn then(&self, rhs: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| rhs.0[i]).collect())
    }

    pub fn commutator(&self, rhs: &Perm) -> Perm {
        self.then(rhs).then(&self.inverse()).then(&rhs.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    pub fn is_full_cycle(&self) -> bool {
        self.cycle_lengths() == vec![self.0.len()]
    }

    /// Do the given permutations generate a transitive subgroup?
    pub fn transitive(gens: &[&Perm]) -> bool {
        if gens.is_empty() {
            return false;
        }
        let n = gens[0].degree();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for g in gens {
                for j in [g.apply(i), g.inverse().apply(i)] {
                    if !seen[j] {
                        seen[j] = true;
                        count += 1;
                        stack.push(j);
                    }
                }
            }
        }
        count == n
    }

    /// Cycle notation with 1-based points, e.g. "(1 2)(3 4)"; identity is "()".
    pub fn to_cycles(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(i + 1).to_string());
                first = false;
                i = self.0[i];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    /// Parse cycle notation with 1-based points: "(1 2)(3 4)", "(12)" (single
    /// digits may omit spaces), "()" or "id" for the identity.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Perm> {
        let s = s.trim();
        if s == "id" || s == "()" || s.is_empty() {
            return Ok(Perm::identity(n));
        }
        let mut v: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("bad cycle notation: {s}")))?;
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s}")))?
                + open;
            let inner = &rest[open + 1..close];
            let points: Vec<usize> = if inner.contains(|c: char| c.is_whitespace() || c == ',') {
                inner
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("bad point in {s}")))?
            } else {
                // Spaceless form like (12): single-digit points only.
                inner
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Parse(format!("bad point in {s}")))
                    })
                    .collect::<Result<_>>()?
            };
            if points.len() < 2 {
                return Err(Error::Parse(format!("cycle too short in {s}")));
            }
            for &p in &points {
                if p == 0 || p > n {
                    return Err(Error::Parse(format!(
                        "point {p} out of range 1..={n} in {s}"
                    )));
                }
                if used[p - 1] {
                    return Err(Error::Parse(format!("point {p} repeated in {s}")));
                }
                used[p - 1] = true;
            }
            for w in 0..points.len() {
                v[points[w] - 1] = points[(w + 1) % points.len()] - 1;
            }
            rest = &rest[close + 1..];
            rest = rest.trim_start();
        }
        let p = Perm(v);
        if !p.is_valid() {
            return Err(Error::Parse(format!("not a permutation: {s}")));
        }
        Ok(p)
    }

    /// All permutations of degree n in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut v: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(v.clone()));
            // next_permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
            v.swap(i, j);
            v[i + 1..].reverse();
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_cycles())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_convention() {
        // (1 2 3) then (1 2): point 1 -> 2 -> 1, point 2 -> 3 -> 3, point 3 -> 1 -> 2.
        let c = Perm::full_cycle(3);
        let t = Perm::transposition(3, 0, 1);
        let p = c.then(&t);
        assert_eq!(p.0, vec![0, 2, 1]);
    }

    #[test]
    fn commutator_of_cycle_and_transposition() {
        // The degree-3 cover recipe: [sigma, theta] is a 3-cycle.
        let sigma = Perm::full_cycle(3);
        let theta = Perm::transposition(3, 0, 1);
        let c = sigma.commutator(&theta);
        assert!(c.is_full_cycle());
        assert!(Perm::transitive(&[&sigma, &theta]));
    }

    #[test]
    fn reversal_conjugates_cycle_to_inverse() {
        for n in [3usize, 5, 7, 9] {
            let sigma = Perm::full_cycle(n);
            let theta = Perm::reversal(n);
            let c = sigma.commutator(&theta);
            // [sigma, reversal] = sigma^2, a full cycle for odd n.
            assert!(c.is_full_cycle(), "n = {n}");
        }
    }

    #[test]
    fn cycle_notation_roundtrip() {
        let p = Perm::parse_cycles("(1 3)(2 4)", 5).unwrap();
        assert_eq!(p.to_cycles(), "(1 3)(2 4)");
        let q = Perm::parse_cycles("(13)(24)", 5).unwrap();
        assert_eq!(p, q);
        assert_eq!(Perm::parse_cycles("id", 4).unwrap(), Perm::identity(4));
        assert_eq!(Perm::parse_cycles("()", 4).unwrap(), Perm::identity(4));
        assert!(Perm::parse_cycles("(1 9)", 4).is_err());
        assert!(Perm::parse_cycles("(1 1)", 4).is_err());
    }

    #[test]
    fn all_permutations_sorted() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert!(all.iter().all(|p| p.is_valid()));
    }
}
