use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on enumerated ball sizes.
pub const DEFAULT_BALL_CAP: usize = 2_000_000;
const DEFAULT_HEISENBERG_RADIUS: usize = 10;

/// Canonical encoding of a group element.
///
/// * lattice `Z^d`: the coordinate vector;
/// * free group: the reduced word as signed generator indices `±1..=±rank`;
/// * Heisenberg: `(a, b, c)` for the upper unitriangular matrix with entries a, c / b;
/// * cyclic `Z/n`: a single residue in `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Element(pub Vec<i64>);

impl Element {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupFamily {
    Lattice { dim: usize },
    Free { rank: usize },
    Heisenberg,
    Cyclic { n: u64 },
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFamily::Lattice { dim } => write!(f, "Z^{dim}"),
            GroupFamily::Free { rank } => write!(f, "F_{rank}"),
            GroupFamily::Heisenberg => write!(f, "H_3(Z)"),
            GroupFamily::Cyclic { n } => write!(f, "Z/{n}"),
        }
    }
}

/// A finitely generated group with its standard symmetric generating set.
#[derive(Clone, Debug)]
pub struct GroupModel {
    family: GroupFamily,
    generators: Vec<Element>,
    /// BFS word lengths for families without a closed formula.
    length_table: Option<HashMap<Element, usize>>,
    length_radius: usize,
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl GroupModel {
    pub fn new(family: GroupFamily) -> Result<Self> {
        let generators = match family {
            GroupFamily::Lattice { dim } => {
                if dim == 0 {
                    return Err(Error::InvalidParameter("lattice dimension must be positive".into()));
                }
                let mut g = Vec::with_capacity(2 * dim);
                for i in 0..dim {
                    for s in [1, -1] {
                        let mut v = vec![0; dim];
                        v[i] = s;
                        g.push(Element(v));
                    }
                }
                g
            }
            GroupFamily::Free { rank } => {
                if rank == 0 {
                    return Err(Error::InvalidParameter("free group rank must be positive".into()));
                }
                (1..=rank as i64)
                    .flat_map(|i| [Element(vec![i]), Element(vec![-i])])
                    .collect()
            }
            GroupFamily::Heisenberg => vec![
                Element(vec![1, 0, 0]),
                Element(vec![-1, 0, 0]),
                Element(vec![0, 1, 0]),
                Element(vec![0, -1, 0]),
            ],
            GroupFamily::Cyclic { n } => {
                if n < 2 {
                    return Err(Error::InvalidParameter("cyclic order must be at least 2".into()));
                }
                if n == 2 {
                    vec![Element(vec![1])]
                } else {
                    vec![Element(vec![1]), Element(vec![n as i64 - 1])]
                }
            }
        };
        let mut model = Self {
            family,
            generators,
            length_table: None,
            length_radius: 0,
        };
        if family == GroupFamily::Heisenberg {
            model = model.with_length_radius(DEFAULT_HEISENBERG_RADIUS)?;
        }
        Ok(model)
    }

    pub fn lattice(dim: usize) -> Self {
        Self::new(GroupFamily::Lattice { dim }).expect("positive dimension")
    }

    pub fn free(rank: usize) -> Self {
        Self::new(GroupFamily::Free { rank }).expect("positive rank")
    }

    pub fn heisenberg() -> Self {
        Self::new(GroupFamily::Heisenberg).expect("valid family")
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(GroupFamily::Cyclic { n }).expect("order at least 2")
    }

    /// Rebuilds the BFS length table (Heisenberg only) out to `radius`.
    pub fn with_length_radius(mut self, radius: usize) -> Result<Self> {
        if self.family == GroupFamily::Heisenberg {
            let mut table = HashMap::new();
            for (x, l) in self.bfs_layers(radius, DEFAULT_BALL_CAP)? {
                table.insert(x, l);
            }
            self.length_table = Some(table);
            self.length_radius = radius;
        }
        Ok(self)
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.family, GroupFamily::Cyclic { .. })
    }

    pub fn is_abelian(&self) -> bool {
        matches!(
            self.family,
            GroupFamily::Lattice { .. } | GroupFamily::Cyclic { .. }
        ) || matches!(self.family, GroupFamily::Free { rank: 1 })
    }

    pub fn identity(&self) -> Element {
        match self.family {
            GroupFamily::Lattice { dim } => Element(vec![0; dim]),
            GroupFamily::Free { .. } => Element(Vec::new()),
            GroupFamily::Heisenberg => Element(vec![0, 0, 0]),
            GroupFamily::Cyclic { .. } => Element(vec![0]),
        }
    }

    /// Whether `x` is a well-formed canonical encoding for this model.
    pub fn contains(&self, x: &Element) -> bool {
        let v = &x.0;
        match self.family {
            GroupFamily::Lattice { dim } => v.len() == dim,
            GroupFamily::Free { rank } => {
                v.iter().all(|&s| s != 0 && s.unsigned_abs() as usize <= rank)
                    && v.windows(2).all(|w| w[0] != -w[1])
            }
            GroupFamily::Heisenberg => v.len() == 3,
            GroupFamily::Cyclic { n } => v.len() == 1 && v[0] >= 0 && (v[0] as u64) < n,
        }
    }

    fn check(&self, x: &Element) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{:?} is not an element of {}",
                x.0, self.family
            )))
        }
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let (a, b) = (&x.0, &y.0);
        match self.family {
            GroupFamily::Lattice { .. } => Element(a.iter().zip(b).map(|(p, q)| p + q).collect()),
            GroupFamily::Free { .. } => {
                let mut w = a.clone();
                let mut rest = b.as_slice();
                while let (Some(&last), Some(&first)) = (w.last(), rest.first()) {
                    if last == -first {
                        w.pop();
                        rest = &rest[1..];
                    } else {
                        break;
                    }
                }
                w.extend_from_slice(rest);
                Element(w)
            }
            GroupFamily::Heisenberg => Element(vec![
                a[0] + b[0],
                a[1] + b[1],
                a[2] + b[2] + a[0] * b[1],
            ]),
            GroupFamily::Cyclic { n } => {
                let n = n as i64;
                Element(vec![(a[0] + b[0]).rem_euclid(n)])
            }
        }
    }

    pub fn inverse(&self, x: &Element) -> Element {
        let a = &x.0;
        match self.family {
            GroupFamily::Lattice { .. } => Element(a.iter().map(|v| -v).collect()),
            GroupFamily::Free { .. } => Element(a.iter().rev().map(|v| -v).collect()),
            GroupFamily::Heisenberg => Element(vec![-a[0], -a[1], -a[2] + a[0] * a[1]]),
            GroupFamily::Cyclic { n } => Element(vec![(-a[0]).rem_euclid(n as i64)]),
        }
    }

    /// Word length with respect to the standard generators.
    ///
    /// Closed forms for lattices, free and cyclic groups; the Heisenberg group
    /// uses the precomputed BFS table and fails outside its radius.
    pub fn word_length(&self, x: &Element) -> Result<usize> {
        self.check(x)?;
        let v = &x.0;
        Ok(match self.family {
            GroupFamily::Lattice { .. } => v.iter().map(|c| c.unsigned_abs() as usize).sum(),
            GroupFamily::Free { .. } => v.len(),
            GroupFamily::Cyclic { n } => {
                let k = v[0] as u64;
                k.min(n - k) as usize
            }
            GroupFamily::Heisenberg => *self
                .length_table
                .as_ref()
                .expect("Heisenberg models carry a length table")
                .get(x)
                .ok_or_else(|| Error::OutsideRadius(self.encode(x)))?,
        })
    }

    /// Radius out to which [`word_length`](Self::word_length) is available
    /// for BFS-backed families; `usize::MAX` otherwise.
    pub fn length_radius(&self) -> usize {
        if self.length_table.is_some() {
            self.length_radius
        } else {
            usize::MAX
        }
    }

    /// BFS over the Cayley graph, yielding `(element, length)` in BFS order.
    pub fn bfs_layers(&self, radius: usize, cap: usize) -> Result<Vec<(Element, usize)>> {
        let mut seen: HashSet<Element> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        let e = self.identity();
        seen.insert(e.clone());
        queue.push_back((e, 0usize));
        while let Some((x, l)) = queue.pop_front() {
            out.push((x.clone(), l));
            if out.len() > cap {
                return Err(Error::CapExceeded { radius, cap });
            }
            if l == radius {
                continue;
            }
            for g in &self.generators {
                let y = self.multiply(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back((y, l + 1));
                }
            }
        }
        Ok(out)
    }

    /// Word length by breadth-first search, independent of the closed forms.
    pub fn bfs_word_length(&self, x: &Element, max_radius: usize) -> Result<usize> {
        self.check(x)?;
        self.bfs_layers(max_radius, DEFAULT_BALL_CAP)?
            .into_iter()
            .find(|(y, _)| y == x)
            .map(|(_, l)| l)
            .ok_or_else(|| Error::OutsideRadius(self.encode(x)))
    }

    /// The ball `B(e, r)`, deduplicated, in BFS order.
    pub fn ball(&self, r: usize) -> Result<Vec<Element>> {
        self.ball_with_cap(r, DEFAULT_BALL_CAP)
    }

    pub fn ball_with_cap(&self, r: usize, cap: usize) -> Result<Vec<Element>> {
        if let Some(size) = self.ball_size_formula(r) {
            if size > cap as u128 {
                return Err(Error::CapExceeded { radius: r, cap });
            }
        }
        Ok(self.bfs_layers(r, cap)?.into_iter().map(|(x, _)| x).collect())
    }

    fn ball_size_formula(&self, r: usize) -> Option<u128> {
        match self.family {
            GroupFamily::Free { rank } if rank >= 2 => {
                let q = 2 * rank as u128 - 1;
                // 1 + 2k (q^r - 1) / (q - 1)
                let qr = q.checked_pow(r as u32)?;
                Some(1 + 2 * rank as u128 * (qr - 1) / (q - 1))
            }
            _ => None,
        }
    }

    /// Text encoding: `+1 -2 +1` for free-group words (`e` for the identity),
    /// comma-separated integers otherwise.
    pub fn encode(&self, x: &Element) -> String {
        match self.family {
            GroupFamily::Free { .. } => {
                if x.0.is_empty() {
                    "e".to_string()
                } else {
                    x.0.iter().map(|s| format!("{s:+}")).collect::<Vec<_>>().join(" ")
                }
            }
            _ => x.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
        }
    }

    pub fn decode(&self, s: &str) -> Result<Element> {
        let s = s.trim();
        let parse = |tok: &str| -> Result<i64> {
            // Accept the Unicode minus sign as well as '-'.
            let t = tok.trim().replace('\u{2212}', "-");
            t.parse::<i64>().map_err(|_| Error::Parse(format!("bad token `{tok}` in `{s}`")))
        };
        let x = match self.family {
            GroupFamily::Free { .. } => {
                if s.is_empty() || s == "e" {
                    Element(Vec::new())
                } else {
                    // Reduce on the way in so non-reduced input still maps to
                    // the canonical word.
                    let mut x = Element(Vec::new());
                    for tok in s.split_whitespace() {
                        let g = parse(tok)?;
                        x = self.multiply(&x, &Element(vec![g]));
                    }
                    x
                }
            }
            _ => {
                let v = s.split(',').map(parse).collect::<Result<Vec<_>>>()?;
                Element(v)
            }
        };
        self.check(&x)?;
        if let GroupFamily::Free { rank } = self.family {
            if x.0.iter().any(|g| g.unsigned_abs() as usize > rank) {
                return Err(Error::Parse(format!("generator out of range in `{s}`")));
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_length_zero() {
        for g in [
            GroupModel::lattice(2),
            GroupModel::free(2),
            GroupModel::heisenberg(),
            GroupModel::cyclic(7),
        ] {
            assert_eq!(g.word_length(&g.identity()).unwrap(), 0);
            assert_eq!(g.ball(0).unwrap(), vec![g.identity()]);
        }
    }

    #[test]
    fn word_length_examples() {
        let f2 = GroupModel::free(2);
        assert_eq!(f2.word_length(&Element(vec![1, 2, -1])).unwrap(), 3);
        let z2 = GroupModel::lattice(2);
        assert_eq!(z2.word_length(&Element(vec![2, -1])).unwrap(), 3);
        let c7 = GroupModel::cyclic(7);
        assert_eq!(c7.word_length(&Element(vec![5])).unwrap(), 2);
    }

    #[test]
    fn free_ball_sizes() {
        let f2 = GroupModel::free(2);
        assert_eq!(f2.ball(1).unwrap().len(), 5);
        // 1 + 4 (3^3 - 1) / 2
        assert_eq!(f2.ball(3).unwrap().len(), 53);
        let sizes: Vec<usize> = (0..6).map(|r| f2.ball(r).unwrap().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ball_cap_is_an_error() {
        let f2 = GroupModel::free(2);
        assert!(matches!(f2.ball_with_cap(6, 100), Err(Error::CapExceeded { .. })));
        let z2 = GroupModel::lattice(2);
        assert!(matches!(z2.ball_with_cap(10, 50), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn closed_forms_agree_with_bfs() {
        for g in [
            GroupModel::lattice(1),
            GroupModel::lattice(2),
            GroupModel::free(2),
            GroupModel::cyclic(9),
            GroupModel::heisenberg(),
        ] {
            for (x, l) in g.bfs_layers(4, DEFAULT_BALL_CAP).unwrap() {
                assert_eq!(g.word_length(&x).unwrap(), l, "{} {:?}", g.family(), x);
                assert_eq!(g.word_length(&g.inverse(&x)).unwrap(), l);
            }
        }
    }

    #[test]
    fn heisenberg_outside_radius() {
        let h = GroupModel::heisenberg().with_length_radius(3).unwrap();
        assert!(matches!(
            h.word_length(&Element(vec![0, 0, 100])),
            Err(Error::OutsideRadius(_))
        ));
    }

    #[test]
    fn group_axioms_hold_on_small_balls() {
        for g in [GroupModel::free(2), GroupModel::heisenberg(), GroupModel::cyclic(5)] {
            let b = g.ball(2).unwrap();
            for x in &b {
                assert_eq!(g.multiply(x, &g.inverse(x)), g.identity());
                for y in &b {
                    for z in b.iter().take(5) {
                        let l = g.multiply(&g.multiply(x, y), z);
                        let r = g.multiply(x, &g.multiply(y, z));
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn generators_symmetric_and_identity_free() {
        for g in [GroupModel::lattice(3), GroupModel::free(3), GroupModel::heisenberg(), GroupModel::cyclic(2), GroupModel::cyclic(6)] {
            for s in g.generators() {
                assert_ne!(*s, g.identity());
                assert!(g.generators().contains(&g.inverse(s)));
            }
        }
    }

    #[test]
    fn encoding_round_trip() {
        let f2 = GroupModel::free(2);
        let x = f2.decode("+1 −2 +1").unwrap();
        assert_eq!(x, Element(vec![1, -2, 1]));
        assert_eq!(f2.encode(&x), "+1 -2 +1");
        assert_eq!(f2.decode("+1 -1").unwrap(), f2.identity());
        assert_eq!(f2.decode(&f2.encode(&f2.identity())).unwrap(), f2.identity());
        assert!(f2.decode("+3").is_err());
        let z2 = GroupModel::lattice(2);
        assert_eq!(z2.decode("2,-1").unwrap(), Element(vec![2, -1]));
        assert!(z2.decode("2").is_err());
    }
}
