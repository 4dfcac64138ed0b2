//! Finite frames: Heyting implication, nuclei, congruences and the second
//! isomorphism theorem for sublocales.
//!
//! A finite distributive lattice is a frame, so [`DistLattice`] doubles as
//! the frame type. Sublocales are always carried by their nucleus.

use crate::dlattice::DistLattice;
use crate::error::{Error, Result};
use crate::poset::SubsetMask;

/// Largest frame accepted by [`enumerate_nuclei`].
pub const MAX_NUCLEUS_FRAME: usize = 256;

/// `U → V`: the largest `W` with `W ∧ U ≤ V`.
pub fn heyting(f: &DistLattice, u: usize, v: usize) -> usize {
    let p = f.base();
    let allowed = f.element(u).complement(p.len()).union(f.element(v));
    // largest down-set inside `allowed`
    let w = SubsetMask::from_indices((0..p.len()).filter(|&i| p.below(i).is_subset_of(allowed)));
    f.index_of(w).expect("interior of a set is a down-set")
}

/// An inflationary, idempotent, meet-preserving endomap of a finite frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nucleus {
    frame: DistLattice,
    table: Vec<usize>,
}

impl Nucleus {
    /// Validates the three nucleus laws.
    pub fn new(frame: DistLattice, table: Vec<usize>) -> Result<Self> {
        check_nucleus(&frame, &table)?;
        Ok(Nucleus { frame, table })
    }

    pub fn identity(f: &DistLattice) -> Self {
        Nucleus {
            frame: f.clone(),
            table: (0..f.len()).collect(),
        }
    }

    /// Constant ⊤: the empty sublocale.
    pub fn constant_top(f: &DistLattice) -> Self {
        Nucleus {
            frame: f.clone(),
            table: vec![f.top(); f.len()],
        }
    }

    pub fn frame(&self) -> &DistLattice {
        &self.frame
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x] == x).collect()
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Nucleus) -> bool {
        (0..self.table.len()).all(|x| self.frame.leq(self.table[x], other.table[x]))
    }

    /// Pointwise meet, which is again a nucleus.
    pub fn meet(&self, other: &Nucleus) -> Result<Nucleus> {
        let table = (0..self.table.len())
            .map(|x| self.frame.meet(self.table[x], other.table[x]))
            .collect();
        Nucleus::new(self.frame.clone(), table)
    }

    /// The open `U` when this is the open nucleus `U → −`.
    pub fn as_open(&self) -> Option<usize> {
        (0..self.frame.len()).find(|&u| open_nucleus(&self.frame, u).table == self.table)
    }

    /// The open `U` when this is the closed nucleus `U ∨ −`.
    pub fn as_closed(&self) -> Option<usize> {
        (0..self.frame.len()).find(|&u| closed_nucleus(&self.frame, u).table == self.table)
    }

    /// Whether the sublocale has a Boolean frame of opens.
    pub fn is_boolean(&self) -> bool {
        fixed_frame(self).lattice.is_boolean()
    }
}

fn check_nucleus(f: &DistLattice, table: &[usize]) -> Result<()> {
    let n = f.len();
    if table.len() != n {
        return Err(Error::InvalidNucleus(format!(
            "table has {} entries for a frame of {n} elements",
            table.len()
        )));
    }
    if let Some(&bad) = table.iter().find(|&&y| y >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    for x in 0..n {
        if !f.leq(x, table[x]) {
            return Err(Error::InvalidNucleus(format!("not inflationary at {}", f.label(x))));
        }
        if table[table[x]] != table[x] {
            return Err(Error::InvalidNucleus(format!("not idempotent at {}", f.label(x))));
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if table[f.meet(x, y)] != f.meet(table[x], table[y]) {
                return Err(Error::InvalidNucleus(format!(
                    "does not preserve the meet of {} and {}",
                    f.label(x),
                    f.label(y)
                )));
            }
        }
    }
    Ok(())
}

/// The open sublocale of `U`: `V ↦ (U → V)`.
pub fn open_nucleus(f: &DistLattice, u: usize) -> Nucleus {
    let table = (0..f.len()).map(|v| heyting(f, u, v)).collect();
    Nucleus::new(f.clone(), table).expect("open nuclei satisfy the nucleus laws")
}

/// The closed sublocale complementary to `U`: `V ↦ U ∨ V`.
pub fn closed_nucleus(f: &DistLattice, u: usize) -> Nucleus {
    let table = (0..f.len()).map(|v| f.join(u, v)).collect();
    Nucleus::new(f.clone(), table).expect("closed nuclei satisfy the nucleus laws")
}

/// All nuclei of `f`, ordered lexicographically by table.
///
/// Tables are filled from the top element downwards; by the time `x` is
/// reached every element above it is assigned, so idempotence and the meet
/// law for every pair meeting in `x` can be checked immediately.
pub fn enumerate_nuclei(f: &DistLattice) -> Result<Vec<Nucleus>> {
    let n = f.len();
    if n > MAX_NUCLEUS_FRAME {
        return Err(Error::TooLarge {
            what: "frame for nucleus enumeration",
            size: n,
            bound: MAX_NUCLEUS_FRAME,
        });
    }
    // elements are sorted by size, so larger indices are never below smaller ones
    let mut meets_into: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            let m = f.meet(a, b);
            if m != a && m != b {
                meets_into[m].push((a, b));
            }
        }
    }
    let above: Vec<Vec<usize>> = (0..n)
        .map(|x| (x..n).filter(|&y| f.leq(x, y)).collect())
        .collect();
    let mut table = vec![usize::MAX; n];
    let mut out = Vec::new();
    search(f, n, &meets_into, &above, &mut table, &mut out);
    let mut nuclei: Vec<Nucleus> = out
        .into_iter()
        .map(|t| Nucleus {
            frame: f.clone(),
            table: t,
        })
        .collect();
    nuclei.sort_by(|a, b| a.table.cmp(&b.table));
    debug_assert!(nuclei.iter().all(|k| check_nucleus(f, &k.table).is_ok()));
    Ok(nuclei)
}

fn search(
    f: &DistLattice,
    k: usize,
    meets_into: &[Vec<(usize, usize)>],
    above: &[Vec<usize>],
    table: &mut [usize],
    out: &mut Vec<Vec<usize>>,
) {
    if k == 0 {
        out.push(table.to_vec());
        return;
    }
    let x = k - 1;
    // meet law forces N(x) when x is a proper meet
    let forced = meets_into[x]
        .first()
        .map(|&(a, b)| f.meet(table[a], table[b]));
    for &y in &above[x] {
        if forced.is_some_and(|v| v != y) {
            continue;
        }
        if y != x && table[y] != y {
            continue;
        }
        // monotone against everything assigned above x
        if !above[x][1..].iter().all(|&z| f.leq(y, table[z])) {
            continue;
        }
        if !meets_into[x]
            .iter()
            .all(|&(a, b)| f.meet(table[a], table[b]) == y)
        {
            continue;
        }
        table[x] = y;
        search(f, x, meets_into, above, table, out);
        table[x] = usize::MAX;
    }
}

/// The frame of opens of a sublocale and its quotient map from `F`.
#[derive(Clone, Debug)]
pub struct FixedFrame {
    /// Fixed points of the nucleus in Birkhoff form.
    pub lattice: DistLattice,
    /// For each lattice element, the fixed point of `F` it stands for.
    pub inclusion: Vec<usize>,
    /// `ν = N` as a map `F → lattice`.
    pub nu: Vec<usize>,
}

/// Fixed points `{U : N(U) = U}` with meets inherited and joins `N(∪)`.
pub fn fixed_frame(n: &Nucleus) -> FixedFrame {
    let f = &n.frame;
    let fixed = n.fixed_points();
    let labels: Vec<String> = fixed.iter().map(|&x| f.label(x)).collect();
    let leq: Vec<Vec<bool>> = fixed
        .iter()
        .map(|&a| fixed.iter().map(|&b| f.leq(a, b)).collect())
        .collect();
    let (lattice, map) =
        DistLattice::from_order_table(&labels, &leq).expect("fixed points of a nucleus form a frame");
    let mut inclusion = vec![0; lattice.len()];
    let mut pos = vec![usize::MAX; f.len()];
    for (k, &x) in fixed.iter().enumerate() {
        inclusion[map[k]] = x;
        pos[x] = map[k];
    }
    let nu = (0..f.len()).map(|x| pos[n.table[x]]).collect();
    FixedFrame {
        lattice,
        inclusion,
        nu,
    }
}

/// The congruence `{(U,V) : N(U) = N(V)}` with its classes.
#[derive(Clone, Debug)]
pub struct Congruence {
    pub frame: DistLattice,
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    nucleus: Vec<usize>,
}

impl Congruence {
    pub fn related(&self, u: usize, v: usize) -> bool {
        self.class_of[u] == self.class_of[v]
    }

    /// `p_*(U,V) = (U ∧ N(V), V ∧ N(U))`.
    pub fn pushforward(&self, u: usize, v: usize) -> (usize, usize) {
        let f = &self.frame;
        (f.meet(u, self.nucleus[v]), f.meet(v, self.nucleus[u]))
    }

    /// All related pairs: the frame of the glued locale as a subframe of `F × F`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.frame.len();
        (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.related(u, v))
            .collect()
    }

    /// Exhaustively checks that `p_*` lands in the congruence and is right
    /// adjoint to the inclusion `p^*` of the congruence into `F × F`.
    pub fn check_adjunction(&self) -> std::result::Result<(), String> {
        let f = &self.frame;
        let n = f.len();
        let pairs = self.pairs();
        for a in 0..n {
            for b in 0..n {
                let (pa, pb) = self.pushforward(a, b);
                if !self.related(pa, pb) {
                    return Err(format!("p_*({}, {}) is not a related pair", f.label(a), f.label(b)));
                }
                for &(u, v) in &pairs {
                    let lhs = f.leq(u, a) && f.leq(v, b);
                    let rhs = f.leq(u, pa) && f.leq(v, pb);
                    if lhs != rhs {
                        return Err(format!(
                            "adjunction fails at ({}, {}) against ({}, {})",
                            f.label(u),
                            f.label(v),
                            f.label(a),
                            f.label(b)
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The relation is a sublattice of `F × F` containing the diagonal.
    pub fn is_subframe(&self) -> bool {
        let f = &self.frame;
        let pairs = self.pairs();
        (0..f.len()).all(|x| self.related(x, x))
            && pairs.iter().all(|&(a, b)| {
                pairs.iter().all(|&(c, d)| {
                    self.related(f.meet(a, c), f.meet(b, d)) && self.related(f.join(a, c), f.join(b, d))
                })
            })
    }
}

/// Congruence of a nucleus, with the adjunction for `p_*` verified.
pub fn congruence_quotient(n: &Nucleus) -> Result<Congruence> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0; n.table.len()];
    let mut rep: Vec<usize> = Vec::new();
    for x in 0..n.table.len() {
        let c = match rep.iter().position(|&r| r == n.table[x]) {
            Some(c) => c,
            None => {
                rep.push(n.table[x]);
                classes.push(Vec::new());
                classes.len() - 1
            }
        };
        classes[c].push(x);
        class_of[x] = c;
    }
    let cong = Congruence {
        frame: n.frame.clone(),
        classes,
        class_of,
        nucleus: n.table.clone(),
    };
    cong.check_adjunction().map_err(Error::Internal)?;
    Ok(cong)
}

/// Nucleus of `S ∨ C` for `S` given by `n` and `C` the closed complement of
/// `U`: the pointwise meet `N(−) ∧ (− ∨ U)`.
pub fn sublocale_join_closed(n: &Nucleus, u: usize) -> Nucleus {
    let f = &n.frame;
    let table = (0..f.len())
        .map(|x| f.meet(n.table[x], f.join(x, u)))
        .collect();
    Nucleus::new(f.clone(), table).expect("meet of nuclei is a nucleus")
}

/// Outcome of [`second_iso_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondIso {
    /// Opens of the open complement of `S ∧ C` inside `S`.
    pub in_s: Vec<usize>,
    /// Opens of the open complement of `C` inside `S ∨ C`.
    pub in_join: Vec<usize>,
    /// Witness pairs `(V, V ∧ U)`.
    pub witness: Vec<(usize, usize)>,
    /// First pair on which the maps fail to be inverse order isomorphisms.
    pub counterexample: Option<(usize, usize)>,
}

impl SecondIso {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that `− ∧ U` and `N` are inverse order isomorphisms between
/// `{V = N(V) ≤ N(U)}` and `{W = M(W) ≤ U}`, `M` the nucleus of `S ∨ C`.
pub fn second_iso_check(n: &Nucleus, u: usize) -> SecondIso {
    let f = &n.frame;
    let m = sublocale_join_closed(n, u);
    let nu = n.table[u];
    let in_s: Vec<usize> = (0..f.len())
        .filter(|&v| n.table[v] == v && f.leq(v, nu))
        .collect();
    let in_join: Vec<usize> = (0..f.len())
        .filter(|&w| m.table[w] == w && f.leq(w, u))
        .collect();
    let fwd = |v: usize| f.meet(v, u);
    let back = |w: usize| n.table[w];
    let mut counterexample = None;
    for &v in &in_s {
        let w = fwd(v);
        if !in_join.contains(&w) || back(w) != v {
            counterexample = Some((v, w));
            break;
        }
    }
    if counterexample.is_none() {
        for &w in &in_join {
            let v = back(w);
            if !in_s.contains(&v) || fwd(v) != w {
                counterexample = Some((v, w));
                break;
            }
        }
    }
    if counterexample.is_none() {
        'outer: for &a in &in_s {
            for &b in &in_s {
                if f.leq(a, b) != f.leq(fwd(a), fwd(b)) {
                    counterexample = Some((a, b));
                    break 'outer;
                }
            }
        }
    }
    let witness = in_s.iter().map(|&v| (v, fwd(v))).collect();
    SecondIso {
        in_s,
        in_join,
        witness,
        counterexample,
    }
}

/// The nuclei of a frame with their pointwise order.
#[derive(Clone, Debug)]
pub struct NucleusLattice {
    pub nuclei: Vec<Nucleus>,
}

impl NucleusLattice {
    pub fn new(f: &DistLattice) -> Result<Self> {
        Ok(NucleusLattice {
            nuclei: enumerate_nuclei(f)?,
        })
    }

    pub fn len(&self) -> usize {
        self.nuclei.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nuclei.is_empty()
    }

    pub fn leq_table(&self) -> Vec<Vec<bool>> {
        self.nuclei
            .iter()
            .map(|a| self.nuclei.iter().map(|b| a.leq(b)).collect())
            .collect()
    }

    /// Labels `N0, N1, …` in enumeration order.
    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| format!("N{i}")).collect()
    }

    /// Validates the pointwise order as a distributive lattice and returns
    /// it in Birkhoff form with the index of each nucleus.
    pub fn as_lattice(&self) -> Result<(DistLattice, Vec<usize>)> {
        DistLattice::from_order_table(&self.labels(), &self.leq_table())
    }
}
