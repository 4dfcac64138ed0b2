//! Finite posets, subsets and monotone maps.
//!
//! Elements are stored in a canonical order: a topological sort that always
//! takes the lexicographically smallest available name. Two posets with the
//! same names and relation therefore have identical index layouts, and every
//! bit-mask in the crate refers to that layout.

pub(crate) mod construct;
mod enumerate;
mod iso;
mod mask;
mod monotone;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use enumerate::{all_posets, MAX_FAMILY};
pub use mask::SubsetMask;
pub use monotone::MonotoneMap;

/// Largest supported element count; subsets are single machine words.
pub const MAX_ELEMENTS: usize = 64;

#[derive(Clone)]
pub struct FinitePoset {
    names: Vec<String>,
    /// `below[i]` = { j : j ≤ i }
    below: Vec<SubsetMask>,
    /// `above[i]` = { j : i ≤ j }
    above: Vec<SubsetMask>,
    index: HashMap<String, usize>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.below == other.below
    }
}

impl Eq for FinitePoset {}

impl std::fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let covers: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(a, b)| format!("{}<{}", self.names[a], self.names[b]))
            .collect();
        write!(f, "FinitePoset {:?} covers {:?}", self.names, covers)
    }
}

/// On-disk poset format: names plus cover pairs `[below, above]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub names: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

impl FinitePoset {
    /// Order generated by the given cover pairs `(below, above)`.
    pub fn from_covers<S: AsRef<str>>(names: &[S], covers: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let n = names.len();
        check_size(n)?;
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownName(s.to_string()))
        };
        let mut succ = vec![Vec::new(); n];
        for (a, b) in covers {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            succ[a].push(b);
        }
        if let Some(cycle) = find_cycle(&succ) {
            return Err(Error::Cycle(
                cycle.into_iter().map(|i| names[i].clone()).collect(),
            ));
        }
        // reflexive-transitive closure: above[i] = everything reachable from i
        let mut above = vec![SubsetMask::EMPTY; n];
        let order = topo_order(&succ);
        for &i in order.iter().rev() {
            let mut acc = SubsetMask::singleton(i);
            for &j in &succ[i] {
                acc = acc.union(above[j]);
            }
            above[i] = acc;
        }
        Ok(Self::from_above_unchecked(names, &above))
    }

    /// Order given by a full `leq[i][j]` table, validated.
    pub fn from_leq_table<S: AsRef<str>>(names: &[S], leq: &[Vec<bool>]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let n = names.len();
        check_size(n)?;
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "order table must be {n}x{n}"
            )));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::Invalid(format!("order is not reflexive at `{}`", names[i])));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::Cycle(vec![names[i].clone(), names[j].clone(), names[i].clone()]));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::Invalid(format!(
                            "order is not transitive: {} ≤ {} ≤ {}",
                            names[i], names[j], names[k]
                        )));
                    }
                }
            }
        }
        let above: Vec<SubsetMask> = (0..n)
            .map(|i| SubsetMask::from_indices((0..n).filter(|&j| leq[i][j])))
            .collect();
        Ok(Self::from_above_unchecked(names, &above))
    }

    /// Builds from principal up-sets that are already a valid order, putting
    /// the elements into canonical order.
    pub(crate) fn from_above_unchecked(names: Vec<String>, above: &[SubsetMask]) -> Self {
        let n = names.len();
        let mut indeg: Vec<usize> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && above[j].contains(i)).count())
            .collect();
        let mut ready: BTreeSet<(String, usize)> = (0..n)
            .filter(|&i| indeg[i] == 0)
            .map(|i| (names[i].clone(), i))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(first) = ready.iter().next().cloned() {
            ready.remove(&first);
            let i = first.1;
            order.push(i);
            for j in above[i].iter() {
                if j != i {
                    indeg[j] -= 1;
                    if indeg[j] == 0 {
                        ready.insert((names[j].clone(), j));
                    }
                }
            }
        }
        debug_assert_eq!(order.len(), n, "relation was not acyclic");
        let mut pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let new_names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        let new_above: Vec<SubsetMask> = order
            .iter()
            .map(|&i| SubsetMask::from_indices(above[i].iter().map(|j| pos[j])))
            .collect();
        let mut below = vec![SubsetMask::EMPTY; n];
        for (i, up) in new_above.iter().enumerate() {
            for j in up.iter() {
                below[j] = below[j].with(i);
            }
        }
        let index = new_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        FinitePoset {
            names: new_names,
            below,
            above: new_above,
            index,
        }
    }

    pub fn from_json(json: &PosetJson) -> Result<Self> {
        let covers: Vec<(&str, &str)> = json
            .covers
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        let names: Vec<&str> = json.names.iter().map(String::as_str).collect();
        Self::from_covers(&names, &covers)
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson {
            names: self.names.clone(),
            covers: self
                .covers()
                .into_iter()
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(i)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// Principal down-set ↓i.
    pub fn below(&self, i: usize) -> SubsetMask {
        self.below[i]
    }

    /// Principal up-set ↑i.
    pub fn above(&self, i: usize) -> SubsetMask {
        self.above[i]
    }

    pub fn contains_subset(&self, s: SubsetMask) -> bool {
        s.is_subset_of(self.full())
    }

    pub fn check_subset(&self, s: SubsetMask) -> Result<()> {
        if self.contains_subset(s) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: 63 - s.bits().leading_zeros() as usize,
                len: self.len(),
            })
        }
    }

    pub fn down_closure(&self, s: SubsetMask) -> SubsetMask {
        s.iter()
            .fold(SubsetMask::EMPTY, |acc, i| acc.union(self.below[i]))
    }

    pub fn up_closure(&self, s: SubsetMask) -> SubsetMask {
        s.iter()
            .fold(SubsetMask::EMPTY, |acc, i| acc.union(self.above[i]))
    }

    pub fn is_downset(&self, s: SubsetMask) -> bool {
        self.down_closure(s) == s
    }

    pub fn is_upset(&self, s: SubsetMask) -> bool {
        self.up_closure(s) == s
    }

    /// Cover pairs `(a, b)` with `a ⋖ b`, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.len() {
            let strict = self.below[b].without(b);
            for a in strict.iter() {
                let between = self.above[a].intersection(strict).without(a);
                if between.is_empty() {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn minimal(&self, s: SubsetMask) -> SubsetMask {
        SubsetMask::from_indices(
            s.iter()
                .filter(|&i| self.below[i].without(i).intersection(s).is_empty()),
        )
    }

    pub fn maximal(&self, s: SubsetMask) -> SubsetMask {
        SubsetMask::from_indices(
            s.iter()
                .filter(|&i| self.above[i].without(i).intersection(s).is_empty()),
        )
    }

    /// Length of the longest chain ending at each element (minimal elements
    /// have height 0).
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0; self.len()];
        // canonical order is a linear extension
        for i in 0..self.len() {
            h[i] = self.below[i]
                .without(i)
                .iter()
                .map(|j| h[j] + 1)
                .max()
                .unwrap_or(0);
        }
        h
    }

    /// Element names of a subset, sorted.
    pub fn subset_names(&self, s: SubsetMask) -> Vec<String> {
        let mut v: Vec<String> = s.iter().map(|i| self.names[i].clone()).collect();
        v.sort();
        v
    }

    pub fn subset_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<SubsetMask> {
        names.iter().try_fold(SubsetMask::EMPTY, |acc, s| {
            self.index_of(s.as_ref())
                .map(|i| acc.with(i))
                .ok_or_else(|| Error::UnknownName(s.as_ref().to_string()))
        })
    }

    /// Moves a subset to another poset carrying the same element names.
    pub fn transport(&self, s: SubsetMask, to: &FinitePoset) -> Result<SubsetMask> {
        s.iter().try_fold(SubsetMask::EMPTY, |acc, i| {
            to.index_of(&self.names[i])
                .map(|j| acc.with(j))
                .ok_or_else(|| Error::UnknownName(self.names[i].clone()))
        })
    }

    /// Index map `self → to` matching element names.
    pub fn name_map(&self, to: &FinitePoset) -> Result<Vec<usize>> {
        self.names
            .iter()
            .map(|s| to.index_of(s).ok_or_else(|| Error::UnknownName(s.clone())))
            .collect()
    }

    /// Sub-poset with the induced order, and the index of each of its
    /// elements in `self`.
    pub fn induced(&self, s: SubsetMask) -> (FinitePoset, Vec<usize>) {
        let members: Vec<usize> = s.iter().collect();
        let names: Vec<String> = members.iter().map(|&i| self.names[i].clone()).collect();
        let above: Vec<SubsetMask> = members
            .iter()
            .map(|&i| {
                SubsetMask::from_indices(
                    members
                        .iter()
                        .enumerate()
                        .filter(|&(_, &j)| self.leq(i, j))
                        .map(|(k, _)| k),
                )
            })
            .collect();
        let sub = Self::from_above_unchecked(names, &above);
        let back = sub
            .names
            .iter()
            .map(|nm| self.index[nm])
            .collect();
        (sub, back)
    }

    /// Same elements with the order reversed.
    pub fn opposite(&self) -> FinitePoset {
        Self::from_above_unchecked(self.names.clone(), &self.below)
    }

    /// Same elements, no relations.
    pub fn discretization(&self) -> FinitePoset {
        let above: Vec<SubsetMask> = (0..self.len()).map(SubsetMask::singleton).collect();
        Self::from_above_unchecked(self.names.clone(), &above)
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.len()).all(|i| self.below[i] == SubsetMask::singleton(i))
    }

    /// Monotone embedding `p ↦ (indicator of q ≤ p)_q` into the cube on the
    /// element set; coordinates follow this poset's canonical order.
    pub fn urysohn_cube_embedding(&self) -> Result<MonotoneMap> {
        let n = self.len();
        let cube = Self::cube(n)?;
        let image = (0..n)
            .map(|p| {
                let coords: Vec<usize> = self.below[p].iter().map(|q| q + 1).collect();
                cube.index_of(&construct::subset_label(&coords))
                    .expect("cube contains every subset")
            })
            .collect();
        MonotoneMap::new(self.clone(), cube, image)
    }

    /// Decodes a cube element back into its coordinate indicator (1-based
    /// coordinates as in its label).
    pub fn cube_coordinates(label: &str) -> Option<Vec<usize>> {
        construct::parse_subset_label(label)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        Err(Error::TooLarge {
            what: "poset",
            size: n,
            bound: MAX_ELEMENTS,
        })
    } else {
        Ok(())
    }
}

fn topo_order(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut indeg = vec![0; n];
    for s in succ {
        for &j in s {
            indeg[j] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(i) = stack.pop() {
        out.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                stack.push(j);
            }
        }
    }
    out
}

/// A directed cycle `[v0, v1, ..., v0]` in the graph, if any.
fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    fn visit(v: usize, succ: &[Vec<usize>], mark: &mut [Mark], path: &mut Vec<usize>) -> Option<Vec<usize>> {
        mark[v] = Mark::Open;
        path.push(v);
        for &w in &succ[v] {
            match mark[w] {
                Mark::Open => {
                    let start = path.iter().position(|&x| x == w).unwrap();
                    let mut cycle = path[start..].to_vec();
                    cycle.push(w);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = visit(w, succ, mark, path) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        path.pop();
        mark[v] = Mark::Done;
        None
    }
    let mut mark = vec![Mark::New; succ.len()];
    let mut path = Vec::new();
    (0..succ.len()).find_map(|v| {
        if mark[v] == Mark::New {
            visit(v, succ, &mut mark, &mut path)
        } else {
            None
        }
    })
}
