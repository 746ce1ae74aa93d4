//! Matroids on at most 16 elements, stored by their list of bases.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::{rank as qrank, QMatrix};

pub const MAX_ELEMENTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("element {0} is not in the ground set")]
    ElementNotInGroundSet(String),
    #[error("matroid is not simple (loops or parallel elements)")]
    NotSimple,
    #[error("basepoint {0} is a loop")]
    ImproperBasepoint(String),
    #[error("invalid bases: {0}")]
    InvalidBases(String),
    #[error("ground set larger than {MAX_ELEMENTS} elements")]
    TooLarge,
    #[error("malformed matroid description: {0}")]
    Malformed(String),
}

/// Subsets of the ground set are bit masks.
pub type Set = u32;

pub fn set_of(elems: &[usize]) -> Set {
    elems.iter().fold(0, |s, &e| s | (1 << e))
}

pub fn elements(s: Set) -> Vec<usize> {
    (0..32).filter(|&i| s & (1 << i) != 0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    labels: Vec<String>,
    rank: usize,
    bases: Vec<Set>,
}

#[derive(Clone, Debug)]
pub struct FlatsLattice {
    /// Sorted by rank, then by bit pattern.
    pub flats: Vec<Set>,
    pub ranks: Vec<usize>,
    /// Pairs (i, j) with flats[i] covered by flats[j].
    pub covers: Vec<(usize, usize)>,
    /// Indices of non-empty flats different from the ground set.
    pub proper: Vec<usize>,
}

impl Matroid {
    /// Builds a matroid from bases, checking equicardinality and basis exchange.
    pub fn from_bases(labels: Vec<String>, bases: Vec<Vec<usize>>) -> Result<Self, MatroidError> {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge);
        }
        if bases.is_empty() {
            return Err(MatroidError::InvalidBases("no bases".into()));
        }
        if let Some(e) = bases.iter().flatten().find(|&&e| e >= n) {
            return Err(MatroidError::ElementNotInGroundSet(e.to_string()));
        }
        let mut sets: Vec<Set> = bases.iter().map(|b| set_of(b)).collect();
        sets.sort_unstable();
        sets.dedup();
        let rank = sets[0].count_ones() as usize;
        if sets.iter().any(|b| b.count_ones() as usize != rank) {
            return Err(MatroidError::InvalidBases("bases of different sizes".into()));
        }
        let all: HashSet<Set> = sets.iter().copied().collect();
        for &a in &sets {
            for &b in &sets {
                for x in elements(a & !b) {
                    let ok = elements(b & !a).iter().any(|&y| all.contains(&((a & !(1 << x)) | (1 << y))));
                    if !ok {
                        return Err(MatroidError::InvalidBases("exchange axiom fails".into()));
                    }
                }
            }
        }
        Ok(Matroid { labels, rank, bases: sets })
    }

    fn from_independence(labels: Vec<String>, independent: impl Fn(&[usize]) -> bool) -> Result<Self, MatroidError> {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge);
        }
        for r in (0..=n).rev() {
            let bases: Vec<Vec<usize>> = (0..n).combinations(r).filter(|c| independent(c)).collect();
            if !bases.is_empty() {
                return Self::from_bases(labels, bases);
            }
        }
        unreachable!("the empty set is independent")
    }

    pub fn uniform(r: usize, n: usize) -> Self {
        assert!(r <= n && n <= MAX_ELEMENTS);
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut bases: Vec<Set> = (0..n).combinations(r).map(|c| set_of(&c)).collect();
        bases.sort_unstable();
        Matroid { labels, rank: r, bases }
    }

    /// Cycle matroid of a multigraph on `n_vertices` vertices.
    pub fn graphic(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, MatroidError> {
        if edges.iter().any(|&(u, v)| u >= n_vertices || v >= n_vertices) {
            return Err(MatroidError::Malformed("edge endpoint out of range".into()));
        }
        let labels = (0..edges.len()).map(|i| i.to_string()).collect();
        Self::from_independence(labels, |sub| {
            let mut parent: Vec<usize> = (0..n_vertices).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut x = x;
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for &e in sub {
                let (a, b) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
            true
        })
    }

    /// Matroid of the columns of an integer configuration; `vectors[e]` is the vector of e.
    pub fn linear(vectors: &[Vec<i64>]) -> Result<Self, MatroidError> {
        let dim = vectors.first().map_or(0, |v| v.len());
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(MatroidError::Malformed("vectors of different lengths".into()));
        }
        let labels = (0..vectors.len()).map(|i| i.to_string()).collect();
        Self::from_independence(labels, |sub| {
            let rows: Vec<Vec<i64>> = sub.iter().map(|&e| vectors[e].clone()).collect();
            sub.is_empty() || qrank(&QMatrix::from_ints(&rows)) == sub.len()
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MatroidError> {
        if labels.len() != self.labels.len() {
            return Err(MatroidError::Malformed("label count mismatch".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full_rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> &[Set] {
        &self.bases
    }

    pub fn ground(&self) -> Set {
        if self.size() == 32 {
            u32::MAX
        } else {
            (1u32 << self.size()) - 1
        }
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MatroidError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| MatroidError::ElementNotInGroundSet(label.to_string()))
    }

    pub fn rank_set(&self, a: Set) -> usize {
        self.bases.iter().map(|b| (b & a).count_ones() as usize).max().unwrap_or(0)
    }

    pub fn rank(&self, a: &[usize]) -> Result<usize, MatroidError> {
        self.check(a)?;
        Ok(self.rank_set(set_of(a)))
    }

    fn check(&self, a: &[usize]) -> Result<(), MatroidError> {
        match a.iter().find(|&&e| e >= self.size()) {
            Some(e) => Err(MatroidError::ElementNotInGroundSet(e.to_string())),
            None => Ok(()),
        }
    }

    pub fn closure_set(&self, a: Set) -> Set {
        let r = self.rank_set(a);
        (0..self.size()).filter(|&e| self.rank_set(a | (1 << e)) == r).fold(a, |s, e| s | (1 << e))
    }

    pub fn closure(&self, a: &[usize]) -> Result<Vec<usize>, MatroidError> {
        self.check(a)?;
        Ok(elements(self.closure_set(set_of(a))))
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.rank_set(1 << e) == 0
    }

    pub fn is_simple(&self) -> bool {
        let n = self.size();
        (0..n).all(|e| !self.is_loop(e))
            && (0..n).tuple_combinations().all(|(a, b)| self.rank_set((1 << a) | (1 << b)) == 2)
    }

    pub fn flats(&self) -> Result<FlatsLattice, MatroidError> {
        if !self.is_simple() {
            return Err(MatroidError::NotSimple);
        }
        Ok(self.flats_unchecked())
    }

    pub fn flats_unchecked(&self) -> FlatsLattice {
        let mut seen: BTreeSet<(usize, Set)> = BTreeSet::new();
        let start = self.closure_set(0);
        let mut stack = vec![start];
        seen.insert((self.rank_set(start), start));
        while let Some(f) = stack.pop() {
            for e in 0..self.size() {
                if f & (1 << e) == 0 {
                    let g = self.closure_set(f | (1 << e));
                    if seen.insert((self.rank_set(g), g)) {
                        stack.push(g);
                    }
                }
            }
        }
        let flats: Vec<Set> = seen.iter().map(|&(_, f)| f).collect();
        let ranks: Vec<usize> = seen.iter().map(|&(r, _)| r).collect();
        let mut covers = Vec::new();
        for i in 0..flats.len() {
            for j in 0..flats.len() {
                if ranks[j] == ranks[i] + 1 && flats[i] & !flats[j] == 0 {
                    covers.push((i, j));
                }
            }
        }
        let ground = self.ground();
        let proper = (0..flats.len()).filter(|&i| flats[i] != 0 && flats[i] != ground).collect();
        FlatsLattice { flats, ranks, covers, proper }
    }

    fn remove_element_labels(&self, e: usize) -> Vec<String> {
        self.labels.iter().enumerate().filter(|&(i, _)| i != e).map(|(_, l)| l.clone()).collect()
    }

    fn squeeze(s: Set, e: usize) -> Set {
        let low = s & ((1 << e) - 1);
        let high = (s >> (e + 1)) << e;
        low | high
    }

    pub fn delete(&self, e: usize) -> Result<Matroid, MatroidError> {
        self.check(&[e])?;
        let sub = self.ground() & !(1 << e);
        let r = self.rank_set(sub);
        let mut bases: Vec<Set> = self
            .bases
            .iter()
            .filter(|b| (*b & sub).count_ones() as usize == r)
            .map(|b| Self::squeeze(b & sub, e))
            .collect();
        bases.sort_unstable();
        bases.dedup();
        Ok(Matroid { labels: self.remove_element_labels(e), rank: r, bases })
    }

    pub fn contract(&self, e: usize) -> Result<Matroid, MatroidError> {
        self.check(&[e])?;
        if self.is_loop(e) {
            return self.delete(e);
        }
        let mut bases: Vec<Set> =
            self.bases.iter().filter(|b| *b & (1 << e) != 0).map(|b| Self::squeeze(b & !(1 << e), e)).collect();
        bases.sort_unstable();
        bases.dedup();
        Ok(Matroid { labels: self.remove_element_labels(e), rank: self.rank - 1, bases })
    }

    /// Wedge sum identifying `e1` of `m1` with `e2` of `m2`.
    ///
    /// Ground set: elements of m1 in order, then those of m2 other than e2. The wedge
    /// point keeps the label of e1.
    pub fn parallel_connection(m1: &Matroid, e1: usize, m2: &Matroid, e2: usize) -> Result<Matroid, MatroidError> {
        m1.check(&[e1])?;
        m2.check(&[e2])?;
        if m1.is_loop(e1) {
            return Err(MatroidError::ImproperBasepoint(m1.labels[e1].clone()));
        }
        if m2.is_loop(e2) {
            return Err(MatroidError::ImproperBasepoint(m2.labels[e2].clone()));
        }
        let n1 = m1.size();
        let n = n1 + m2.size() - 1;
        if n > MAX_ELEMENTS {
            return Err(MatroidError::TooLarge);
        }
        let map2 = |x: usize| -> usize {
            if x == e2 {
                e1
            } else if x < e2 {
                n1 + x
            } else {
                n1 + x - 1
            }
        };
        let lift2 = |b: Set| -> Set { elements(b).into_iter().fold(0, |s, x| s | (1 << map2(x))) };
        let star = 1u32 << e1;
        let mut bases = BTreeSet::new();
        for &b in &m1.bases {
            for &b2 in &m2.bases {
                let in1 = b & star != 0;
                let in2 = b2 & (1 << e2) != 0;
                let u = b | lift2(b2);
                match (in1, in2) {
                    (true, true) => {
                        bases.insert(u);
                    }
                    (true, false) | (false, true) => {
                        bases.insert(u & !star);
                    }
                    (false, false) => {}
                }
            }
        }
        let mut labels = m1.labels.clone();
        for (i, l) in m2.labels.iter().enumerate() {
            if i != e2 {
                let mut l = l.clone();
                while labels.contains(&l) {
                    l.push('\'');
                }
                labels.push(l);
            }
        }
        let bases: Vec<Vec<usize>> = bases.into_iter().map(elements).collect();
        Matroid::from_bases(labels, bases)
    }

    pub fn from_json(v: &Value) -> Result<Matroid, MatroidError> {
        let raw: MatroidJson =
            serde_json::from_value(v.clone()).map_err(|e| MatroidError::Malformed(e.to_string()))?;
        let labels: Vec<String> = raw
            .ground_set
            .iter()
            .map(|x| match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        let n = labels.len();
        let m = match raw.kind.as_str() {
            "uniform" => {
                let r = raw.rank.ok_or_else(|| MatroidError::Malformed("uniform needs rank".into()))?;
                if r > n {
                    return Err(MatroidError::Malformed("rank exceeds ground set".into()));
                }
                Matroid::uniform(r, n)
            }
            "bases" => {
                let bases = raw.bases.ok_or_else(|| MatroidError::Malformed("missing bases".into()))?;
                let idx: Result<Vec<Vec<usize>>, MatroidError> = bases
                    .iter()
                    .map(|b| {
                        b.iter()
                            .map(|x| {
                                let l = match x {
                                    Value::String(s) => s.clone(),
                                    other => other.to_string(),
                                };
                                labels
                                    .iter()
                                    .position(|y| *y == l)
                                    .ok_or(MatroidError::ElementNotInGroundSet(l))
                            })
                            .collect()
                    })
                    .collect();
                Matroid::from_bases(labels.clone(), idx?)?
            }
            "graphic" => {
                let edges = raw.edges.ok_or_else(|| MatroidError::Malformed("missing edges".into()))?;
                if edges.len() != n {
                    return Err(MatroidError::Malformed("one edge per ground-set element expected".into()));
                }
                let nv = raw.vertices.unwrap_or_else(|| edges.iter().map(|e| e[0].max(e[1]) + 1).max().unwrap_or(0));
                let e: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Matroid::graphic(nv, &e)?
            }
            "linear" => {
                let vs = raw.vectors.ok_or_else(|| MatroidError::Malformed("missing vectors".into()))?;
                if vs.len() != n {
                    return Err(MatroidError::Malformed("one vector per ground-set element expected".into()));
                }
                Matroid::linear(&vs)?
            }
            k => return Err(MatroidError::Malformed(format!("unknown kind {k}"))),
        };
        m.with_labels(labels)
    }

    pub fn to_json(&self) -> Value {
        let bases: Vec<Vec<String>> =
            self.bases.iter().map(|&b| elements(b).iter().map(|&e| self.labels[e].clone()).collect()).collect();
        serde_json::json!({
            "ground_set": self.labels,
            "kind": "bases",
            "bases": bases,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MatroidJson {
    ground_set: Vec<Value>,
    kind: String,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    bases: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    vertices: Option<usize>,
    #[serde(default)]
    edges: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    vectors: Option<Vec<Vec<i64>>>,
}

/// Edges of the complete graph on four vertices.
pub fn k4_edges() -> Vec<(usize, usize)> {
    vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
}

/// The Fano plane: points are nonzero vectors of F_2^3, represented over Z by lines.
pub fn fano() -> Matroid {
    let lines: [[usize; 3]; 7] = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    let bases: Vec<Vec<usize>> = (0..7)
        .combinations(3)
        .filter(|c| !lines.iter().any(|l| l.to_vec() == *c))
        .collect();
    Matroid::from_bases((0..7).map(|i| i.to_string()).collect(), bases).expect("Fano bases are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Matroid {
        Matroid::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(Matroid::uniform(3, 3).rank(&[0, 1]).unwrap(), 2);
        assert_eq!(triangle().rank(&[0, 1, 2]).unwrap(), 2);
        assert_eq!(triangle().rank(&[]).unwrap(), 0);
        assert!(matches!(triangle().rank(&[5]), Err(MatroidError::ElementNotInGroundSet(_))));
    }

    #[test]
    fn closures() {
        assert_eq!(Matroid::uniform(2, 3).closure(&[0]).unwrap(), vec![0]);
        assert_eq!(triangle().closure(&[0, 1]).unwrap(), vec![0, 1, 2]);
        assert_eq!(triangle().closure(&[0, 1, 2]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn flats_of_uniform() {
        let f = Matroid::uniform(3, 3).flats().unwrap();
        assert_eq!(f.proper.len(), 6);
        let f = Matroid::uniform(2, 3).flats().unwrap();
        let mut p: Vec<Set> = f.proper.iter().map(|&i| f.flats[i]).collect();
        p.sort_unstable();
        assert_eq!(p, vec![1, 2, 4]);
        assert_eq!(Matroid::uniform(3, 4).flats().unwrap().proper.len(), 10);
    }

    #[test]
    fn non_simple_rejected() {
        let m = Matroid::graphic(2, &[(0, 1), (0, 1)]).unwrap();
        assert!(matches!(m.flats(), Err(MatroidError::NotSimple)));
    }

    #[test]
    fn minors_of_uniform() {
        assert_eq!(Matroid::uniform(3, 4).delete(0).unwrap().bases, Matroid::uniform(3, 3).bases);
        assert_eq!(Matroid::uniform(3, 4).contract(0).unwrap().bases, Matroid::uniform(2, 3).bases);
    }

    #[test]
    fn k4_contraction_is_graphic() {
        let k4 = Matroid::graphic(4, &k4_edges()).unwrap();
        // Contract edge (2,3): vertices 2 and 3 merge.
        let c = k4.contract(5).unwrap();
        let merged: Vec<(usize, usize)> = k4_edges()[..5].iter().map(|&(u, v)| (u.min(2), v.min(2))).collect();
        let g = Matroid::graphic(3, &merged).unwrap();
        assert_eq!(c.bases, g.bases);
    }

    #[test]
    fn wedges() {
        let u22 = Matroid::uniform(2, 2);
        let w = Matroid::parallel_connection(&u22, 1, &u22, 1).unwrap();
        assert_eq!((w.size(), w.full_rank()), (3, 3));
        assert_eq!(w.bases, Matroid::uniform(3, 3).bases);
        let u23 = Matroid::uniform(2, 3);
        let w = Matroid::parallel_connection(&u23, 2, &u23, 2).unwrap();
        assert_eq!((w.size(), w.full_rank()), (5, 3));
        let m = Matroid::uniform(2, 3);
        let w = Matroid::parallel_connection(&m, 0, &Matroid::uniform(1, 1), 0).unwrap();
        assert_eq!(w.bases, m.bases);
    }

    #[test]
    fn json_round_trip() {
        let v = serde_json::json!({"ground_set": [0, 1, 2, 3], "kind": "uniform", "rank": 2});
        let m = Matroid::from_json(&v).unwrap();
        assert_eq!(m, Matroid::from_json(&m.to_json()).unwrap());
        let v = serde_json::json!({"ground_set": ["a", "b", "c"], "kind": "linear", "vectors": [[1, 0], [0, 1], [1, 1]]});
        assert_eq!(Matroid::from_json(&v).unwrap().bases, Matroid::uniform(2, 3).bases);
    }

    #[test]
    fn fano_has_seven_lines() {
        let f = fano().flats().unwrap();
        assert_eq!(f.proper.iter().filter(|&&i| f.ranks[i] == 2).count(), 7);
    }
}
