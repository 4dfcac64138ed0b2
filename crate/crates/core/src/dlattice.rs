//! Finite distributive lattices in Birkhoff normal form.
//!
//! A lattice is stored as the family of all down-sets of its poset of
//! join-irreducibles, ordered by inclusion. Tables coming from outside go
//! through [`DistLattice::from_order_table`], which validates the lattice and
//! distributive laws before re-deriving that representation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap, PosetJson, SubsetMask};

/// Upper bound on lattice size accepted by the constructors.
pub const MAX_LATTICE: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct DistLattice {
    base: FinitePoset,
    elements: Vec<SubsetMask>,
    index: HashMap<SubsetMask, usize>,
}

impl PartialEq for DistLattice {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl Eq for DistLattice {}

impl DistLattice {
    /// The frame of opens of the Alexandrov space on `p`.
    pub fn downset_lattice(p: &FinitePoset) -> Result<Self> {
        let elements = p.downsets_bounded(MAX_LATTICE)?;
        let index = elements.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(DistLattice {
            base: p.clone(),
            elements,
            index,
        })
    }

    /// The free bounded distributive lattice on `n ≤ 4` generators, realized as
    /// down-sets of the `n`-cube.
    pub fn free_bounded(n: usize) -> Result<Self> {
        if n > 4 {
            return Err(Error::TooLarge {
                what: "free distributive lattice rank",
                size: n,
                bound: 4,
            });
        }
        Self::downset_lattice(&FinitePoset::cube(n)?)
    }

    /// Validates an abstract finite order, checks it is a distributive
    /// lattice, and returns it in Birkhoff form together with the index of
    /// each input element.
    pub fn from_order_table<S: AsRef<str>>(
        labels: &[S],
        leq: &[Vec<bool>],
    ) -> Result<(Self, Vec<usize>)> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::NotALattice("a lattice has at least one element".into()));
        }
        if n > MAX_LATTICE {
            return Err(Error::TooLarge {
                what: "lattice table",
                size: n,
                bound: MAX_LATTICE,
            });
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("order table must be {n}x{n}")));
        }
        let names: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        validate_order(&names, leq)?;
        let table = LatticeTable::new(&names, leq)?;
        table.check_distributive(&names)?;
        let (base, downs) = table.birkhoff(&names);
        let lat = Self::downset_lattice(&base)?;
        let map = downs.iter().map(|m| lat.index[m]).collect::<Vec<_>>();
        let mut seen = vec![false; lat.len()];
        for &i in &map {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Internal("Birkhoff map is not injective".into()));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Internal("Birkhoff map is not surjective".into()));
        }
        Ok((lat, map))
    }

    pub fn from_json(json: &LatticeJson) -> Result<Self> {
        match json {
            LatticeJson::Birkhoff { birkhoff_base } => {
                Self::downset_lattice(&FinitePoset::from_json(birkhoff_base)?)
            }
            LatticeJson::Table {
                elements,
                leq_table,
            } => Ok(Self::from_order_table(elements, leq_table)?.0),
        }
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson::Birkhoff {
            birkhoff_base: self.base.to_json(),
        }
    }

    pub fn base(&self) -> &FinitePoset {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[SubsetMask] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> SubsetMask {
        self.elements[i]
    }

    pub fn index_of(&self, m: SubsetMask) -> Option<usize> {
        self.index.get(&m).copied()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.elements[a].is_subset_of(self.elements[b])
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].intersection(self.elements[b])]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].union(self.elements[b])]
    }

    /// Set-style label of an element in terms of base names, e.g. `{a,b}`.
    pub fn label(&self, i: usize) -> String {
        format!("{{{}}}", self.base.subset_names(self.elements[i]).join(","))
    }

    /// The lattice order as a poset named by [`Self::label`], plus the poset
    /// index of each lattice element.
    pub fn order_poset(&self) -> (FinitePoset, Vec<usize>) {
        let names: Vec<String> = (0..self.len()).map(|i| self.label(i)).collect();
        let leq: Vec<Vec<bool>> = (0..self.len())
            .map(|a| (0..self.len()).map(|b| self.leq(a, b)).collect())
            .collect();
        let p = FinitePoset::from_leq_table(&names, &leq).expect("lattice order is a poset");
        let map = names.iter().map(|s| p.index_of(s).unwrap()).collect();
        (p, map)
    }

    /// Join-irreducible elements, computed from the lattice order (an element
    /// is join-irreducible iff it has exactly one lower cover), with the
    /// induced order. Names are element labels.
    pub fn join_irreducibles(&self) -> Result<FinitePoset> {
        let names: Vec<String> = (0..self.len()).map(|i| self.label(i)).collect();
        let leq: Vec<Vec<bool>> = (0..self.len())
            .map(|a| (0..self.len()).map(|b| self.leq(a, b)).collect())
            .collect();
        let table = LatticeTable::new(&names, &leq)?;
        table.check_distributive(&names)?;
        Ok(table.birkhoff(&names).0)
    }

    /// Boolean lattice on the join-irreducibles, with the canonical
    /// embedding of `self` into it.
    pub fn booleanize(&self) -> Result<(DistLattice, Vec<usize>)> {
        let boolean = Self::downset_lattice(&self.base.discretization())?;
        let embed = self
            .elements
            .iter()
            .map(|&m| {
                let moved = self.base.transport(m, boolean.base()).expect("same names");
                boolean.index[&moved]
            })
            .collect();
        Ok((boolean, embed))
    }

    /// `D^op` in Birkhoff form (base reversed), and the order-reversing
    /// bijection `U ↦ complement of U` from `self` into it.
    pub fn hochster_dual(&self) -> (DistLattice, Vec<usize>) {
        let base = self.base.opposite();
        let dual = Self::downset_lattice(&base).expect("same size as self");
        let n = self.base.len();
        let map = self
            .elements
            .iter()
            .map(|&m| {
                let c = self.base.transport(m.complement(n), &base).expect("same names");
                dual.index[&c]
            })
            .collect();
        (dual, map)
    }

    pub fn is_boolean(&self) -> bool {
        self.base.is_discrete()
    }

    /// Lattice isomorphism, decided on the join-irreducible bases.
    pub fn is_isomorphic(a: &DistLattice, b: &DistLattice) -> bool {
        FinitePoset::is_isomorphic(&a.base, &b.base)
    }
}

/// JSON lattice format: a Birkhoff base, or an explicit order table that is
/// validated on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeJson {
    Birkhoff {
        birkhoff_base: PosetJson,
    },
    Table {
        elements: Vec<String>,
        leq_table: Vec<Vec<bool>>,
    },
}

fn validate_order(names: &[String], leq: &[Vec<bool>]) -> Result<()> {
    FinitePoset::from_leq_table(names, leq).map(|_| ())
}

/// Meet/join tables of a validated finite lattice.
struct LatticeTable<'a> {
    leq: &'a [Vec<bool>],
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
}

impl<'a> LatticeTable<'a> {
    fn new(names: &[String], leq: &'a [Vec<bool>]) -> Result<Self> {
        let n = names.len();
        let glb = |a: usize, b: usize| -> Option<usize> {
            let lower: Vec<usize> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
            lower
                .iter()
                .copied()
                .find(|&g| lower.iter().all(|&x| leq[x][g]))
        };
        let lub = |a: usize, b: usize| -> Option<usize> {
            let upper: Vec<usize> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
            upper
                .iter()
                .copied()
                .find(|&g| upper.iter().all(|&x| leq[g][x]))
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in a..n {
                let m = glb(a, b).ok_or_else(|| {
                    Error::NotALattice(format!("`{}` and `{}` have no meet", names[a], names[b]))
                })?;
                let j = lub(a, b).ok_or_else(|| {
                    Error::NotALattice(format!("`{}` and `{}` have no join", names[a], names[b]))
                })?;
                meet[a][b] = m;
                meet[b][a] = m;
                join[a][b] = j;
                join[b][a] = j;
            }
        }
        let bottom = (0..n)
            .find(|&x| (0..n).all(|y| leq[x][y]))
            .ok_or_else(|| Error::NotALattice("no bottom element".into()))?;
        Ok(LatticeTable {
            leq,
            meet,
            join,
            bottom,
        })
    }

    fn check_distributive(&self, names: &[String]) -> Result<()> {
        let n = names.len();
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let lhs = self.meet[a][self.join[b][c]];
                    let rhs = self.join[self.meet[a][b]][self.meet[a][c]];
                    if lhs != rhs {
                        return Err(Error::NotDistributive(format!(
                            "{0} ∧ ({1} ∨ {2}) ≠ ({0} ∧ {1}) ∨ ({0} ∧ {2})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Join-irreducible poset, and each element's down-set of join-irreducibles.
    fn birkhoff(&self, names: &[String]) -> (FinitePoset, Vec<SubsetMask>) {
        let n = names.len();
        let lower_covers = |x: usize| {
            (0..n)
                .filter(|&y| y != x && self.leq[y][x])
                .filter(|&y| !(0..n).any(|z| z != x && z != y && self.leq[y][z] && self.leq[z][x]))
                .count()
        };
        let ji: Vec<usize> = (0..n)
            .filter(|&x| x != self.bottom && lower_covers(x) == 1)
            .collect();
        let ji_names: Vec<String> = ji.iter().map(|&x| names[x].clone()).collect();
        let ji_leq: Vec<Vec<bool>> = ji
            .iter()
            .map(|&a| ji.iter().map(|&b| self.leq[a][b]).collect())
            .collect();
        let base = FinitePoset::from_leq_table(&ji_names, &ji_leq).expect("sub-order of a poset");
        let pos: Vec<usize> = ji_names.iter().map(|s| base.index_of(s).unwrap()).collect();
        let downs = (0..n)
            .map(|x| {
                SubsetMask::from_indices(
                    ji.iter()
                        .enumerate()
                        .filter(|&(_, &j)| self.leq[j][x])
                        .map(|(k, _)| pos[k]),
                )
            })
            .collect();
        (base, downs)
    }
}

/// Whether a lattice map must preserve the top element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomFlavor {
    Bounded,
    LowerBounded,
}

/// The first equation a candidate homomorphism breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomViolation {
    Malformed(String),
    Bottom,
    Top,
    Meet(usize, usize),
    Join(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeHom {
    pub src: DistLattice,
    pub dst: DistLattice,
    pub image: Vec<usize>,
    pub flavor: HomFlavor,
}

impl LatticeHom {
    pub fn identity(d: &DistLattice) -> Self {
        LatticeHom {
            src: d.clone(),
            dst: d.clone(),
            image: (0..d.len()).collect(),
            flavor: HomFlavor::Bounded,
        }
    }

    /// Checks ⊥, binary meets and joins, and ⊤ when bounded; reports the
    /// first violating pair.
    pub fn check(&self) -> std::result::Result<(), HomViolation> {
        if self.image.len() != self.src.len() {
            return Err(HomViolation::Malformed(format!(
                "{} images for {} elements",
                self.image.len(),
                self.src.len()
            )));
        }
        if let Some(&j) = self.image.iter().find(|&&j| j >= self.dst.len()) {
            return Err(HomViolation::Malformed(format!("image index {j} out of range")));
        }
        let f = |i: usize| self.image[i];
        if f(self.src.bottom()) != self.dst.bottom() {
            return Err(HomViolation::Bottom);
        }
        if self.flavor == HomFlavor::Bounded && f(self.src.top()) != self.dst.top() {
            return Err(HomViolation::Top);
        }
        for a in 0..self.src.len() {
            for b in a + 1..self.src.len() {
                if f(self.src.meet(a, b)) != self.dst.meet(f(a), f(b)) {
                    return Err(HomViolation::Meet(a, b));
                }
                if f(self.src.join(a, b)) != self.dst.join(f(a), f(b)) {
                    return Err(HomViolation::Join(a, b));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &LatticeHom) -> Result<LatticeHom> {
        if self.dst != other.src {
            return Err(Error::DimensionMismatch("lattice homs do not compose".into()));
        }
        let flavor = if self.flavor == HomFlavor::Bounded && other.flavor == HomFlavor::Bounded {
            HomFlavor::Bounded
        } else {
            HomFlavor::LowerBounded
        };
        Ok(LatticeHom {
            src: self.src.clone(),
            dst: other.dst.clone(),
            image: self.image.iter().map(|&j| other.image[j]).collect(),
            flavor,
        })
    }
}

/// Stone dual of a monotone map `f : P → Q`: the bounded hom
/// `𝒪(Q) → 𝒪(P)` taking preimages of down-sets.
pub fn stone_of_monotone(f: &MonotoneMap) -> Result<LatticeHom> {
    let src = DistLattice::downset_lattice(f.dst())?;
    let dst = DistLattice::downset_lattice(f.src())?;
    let image = src
        .elements()
        .iter()
        .map(|&v| dst.index_of(f.preimage(v)).expect("preimage of a down-set is a down-set"))
        .collect();
    Ok(LatticeHom {
        src,
        dst,
        image,
        flavor: HomFlavor::Bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_lattice(n: usize) -> DistLattice {
        DistLattice::downset_lattice(&FinitePoset::chain(n)).unwrap()
    }

    #[test]
    fn downset_lattice_examples() {
        assert_eq!(chain_lattice(2).len(), 3);
        let b = DistLattice::downset_lattice(&FinitePoset::antichain(2)).unwrap();
        assert_eq!(b.len(), 4);
        assert!(b.is_boolean());
        assert_eq!(chain_lattice(0).len(), 1);
    }

    #[test]
    fn join_irreducible_examples() {
        let j = chain_lattice(2).join_irreducibles().unwrap();
        assert!(FinitePoset::is_isomorphic(&j, &FinitePoset::chain(2)));
        let b = DistLattice::downset_lattice(&FinitePoset::antichain(2)).unwrap();
        assert!(FinitePoset::is_isomorphic(&b.join_irreducibles().unwrap(), &FinitePoset::antichain(2)));
        assert!(chain_lattice(0).join_irreducibles().unwrap().is_empty());
    }

    #[test]
    fn free_lattice_sizes() {
        let sizes: Vec<usize> = (1..=3)
            .map(|n| DistLattice::free_bounded(n).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![3, 6, 20]);
        assert!(DistLattice::free_bounded(5).is_err());
    }

    #[test]
    fn booleanize_examples() {
        let (b, embed) = chain_lattice(2).booleanize().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(embed.len(), 3);
        let free2 = DistLattice::free_bounded(2).unwrap();
        assert_eq!(free2.join_irreducibles().unwrap().len(), 4);
        assert_eq!(free2.booleanize().unwrap().0.len(), 16);
        let four = DistLattice::downset_lattice(&FinitePoset::antichain(2)).unwrap();
        assert!(DistLattice::is_isomorphic(&four.booleanize().unwrap().0, &four));
    }

    #[test]
    fn hochster_dual_examples() {
        let c = chain_lattice(2);
        assert!(DistLattice::is_isomorphic(&c.hochster_dual().0, &c));
        let v = FinitePoset::spine();
        let dv = DistLattice::downset_lattice(&v).unwrap().hochster_dual().0;
        let lambda = DistLattice::downset_lattice(&v.opposite()).unwrap();
        assert!(DistLattice::is_isomorphic(&dv, &lambda));
        // the complement map reverses order
        let (d, map) = DistLattice::downset_lattice(&v).unwrap().hochster_dual();
        let orig = DistLattice::downset_lattice(&v).unwrap();
        for a in 0..orig.len() {
            for b in 0..orig.len() {
                assert_eq!(orig.leq(a, b), d.leq(map[b], map[a]));
            }
        }
    }

    #[test]
    fn order_table_validation() {
        // diamond M3 is not distributive
        let labels = ["0", "a", "b", "c", "1"];
        let mut leq = vec![vec![false; 5]; 5];
        for i in 0..5 {
            leq[i][i] = true;
            leq[0][i] = true;
            leq[i][4] = true;
        }
        assert!(matches!(
            DistLattice::from_order_table(&labels, &leq),
            Err(Error::NotDistributive(_))
        ));
        // two incomparable maximal elements: no join
        let labels2 = ["0", "a", "b"];
        let leq2 = vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ];
        assert!(matches!(
            DistLattice::from_order_table(&labels2, &leq2),
            Err(Error::NotALattice(_))
        ));
        // 2x2 Boolean table round-trips
        let labels3 = ["0", "a", "b", "1"];
        let leq3 = vec![
            vec![true, true, true, true],
            vec![false, true, false, true],
            vec![false, false, true, true],
            vec![false, false, false, true],
        ];
        let (d, map) = DistLattice::from_order_table(&labels3, &leq3).unwrap();
        assert!(d.is_boolean());
        assert_eq!(map[0], d.bottom());
        assert_eq!(map[3], d.top());
    }

    #[test]
    fn hom_check_examples() {
        let d = chain_lattice(2);
        assert!(LatticeHom::identity(&d).is_valid());
        let mut h = LatticeHom {
            src: d.clone(),
            dst: d.clone(),
            image: vec![0; 3],
            flavor: HomFlavor::LowerBounded,
        };
        assert!(h.is_valid());
        h.flavor = HomFlavor::Bounded;
        assert_eq!(h.check(), Err(HomViolation::Top));
    }

    #[test]
    fn stone_examples() {
        let c = FinitePoset::chain(2);
        let id = stone_of_monotone(&MonotoneMap::identity(&c)).unwrap();
        assert_eq!(id.image, vec![0, 1, 2]);
        let to_pt = MonotoneMap::new(c.clone(), FinitePoset::point(), vec![0, 0]).unwrap();
        let h = stone_of_monotone(&to_pt).unwrap();
        assert_eq!(h.image, vec![h.dst.bottom(), h.dst.top()]);
        // inclusion of {0} into the 2-chain
        let incl = MonotoneMap::new(FinitePoset::point(), c.clone(), vec![0]).unwrap();
        let h = stone_of_monotone(&incl).unwrap();
        assert_eq!(h.src.len(), 3);
        assert_eq!(h.dst.len(), 2);
        let zero = h.src.index_of(SubsetMask::singleton(0)).unwrap();
        assert_eq!(h.image[zero], h.dst.top());
        assert_eq!(h.image[h.src.top()], h.dst.top());
        assert!(h.is_valid());
    }

    #[test]
    fn json_forms() {
        let json = r#"{"birkhoff_base":{"names":["0","1"],"covers":[["0","1"]]}}"#;
        let l: LatticeJson = serde_json::from_str(json).unwrap();
        assert_eq!(DistLattice::from_json(&l).unwrap().len(), 3);
        let json = r#"{"elements":["bot","top"],"leq_table":[[true,true],[false,true]]}"#;
        let l: LatticeJson = serde_json::from_str(json).unwrap();
        assert_eq!(DistLattice::from_json(&l).unwrap().len(), 2);
    }
}
