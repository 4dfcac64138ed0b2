//! The K₀ model: a sheaf on a finite poset has one integer rank per point,
//! every subset `K` carries the free group `ℤ^K`, and descent squares,
//! cosheaf extension and the main theorem become statements about integer
//! matrices, decided by Smith normal form.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poset::{FinitePoset, MonotoneMap, SubsetMask};
use crate::scalar::Field;
use crate::space::FiniteSpace;
use crate::tower::{threads, Tower};
use crate::vsheaf::{cube_cartesian_direct, cube_cartesian_recursive, CubeDiagram, VecSheaf};
use crate::{Integer, QMatrix, Rational, ZMatrix};

/// An integer function on the points of a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Class {
    pub space: FinitePoset,
    pub vector: Vec<i64>,
}

impl K0Class {
    pub fn new(space: FinitePoset, vector: Vec<i64>) -> Result<Self> {
        if vector.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} points",
                vector.len(),
                space.len()
            )));
        }
        Ok(K0Class { space, vector })
    }

    /// Value at the point with this name.
    pub fn at(&self, name: &str) -> Option<i64> {
        self.space.index_of(name).map(|i| self.vector[i])
    }
}

pub fn k0_of_vecsheaf<T: Field>(f: &VecSheaf<T>) -> K0Class {
    K0Class {
        space: f.space().clone(),
        vector: f.dims().iter().map(|&d| d as i64).collect(),
    }
}

/// `p ↦ c(f(p))`.
pub fn pullback_k0(f: &MonotoneMap, c: &K0Class) -> Result<K0Class> {
    if f.dst() != &c.space {
        return Err(Error::Invalid("class lives on a different poset than the map's target".into()));
    }
    Ok(K0Class {
        space: f.src().clone(),
        vector: f.image().iter().map(|&q| c.vector[q]).collect(),
    })
}

/// `f_*G` for a monotone `f : P → Q`: `(f_*G)(q) = Γ(f⁻¹(↓q), G)`.
pub fn direct_image<T: Field>(f: &MonotoneMap, g: &VecSheaf<T>) -> Result<VecSheaf<T>> {
    if f.src() != g.space() {
        return Err(Error::Invalid("sheaf lives on a different poset than the map's source".into()));
    }
    let q = f.dst();
    let lims = (0..q.len())
        .map(|y| g.sections(f.preimage(q.below(y))))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = BTreeMap::new();
    for lo in 0..q.len() {
        for hi in q.above(lo).iter().filter(|&hi| hi != lo) {
            maps.insert((lo, hi), lims[hi].map_to(&lims[lo])?);
        }
    }
    VecSheaf::new(q.clone(), lims.iter().map(|l| l.dim()).collect(), maps)
}

fn z(v: i64) -> Integer {
    Integer::from(v)
}

/// `ℤ^from → ℤ^to` restricting functions, for `to ⊆ from`; coordinates
/// follow ascending point index.
fn restriction(from: SubsetMask, to: SubsetMask) -> ZMatrix {
    let src: Vec<usize> = from.iter().collect();
    let dst: Vec<usize> = to.iter().collect();
    ZMatrix::from_fn(dst.len(), src.len(), |r, c| {
        if dst[r] == src[c] {
            Integer::one()
        } else {
            Integer::zero()
        }
    })
}

/// Pullback of functions along an image vector `A → B`: `ℤ^B → ℤ^A`.
fn pullback_matrix(image: &[usize], target_len: usize) -> ZMatrix {
    ZMatrix::from_index_map(target_len, image).transpose()
}

/// Integer ranks for the comparison of a commutative square of free abelian
/// groups with the fiber product of its cospan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub label: String,
    /// Rank of the kernel of `A0 → A1 ×_{B1} B0`.
    pub kernel_rank: usize,
    /// Number of generators of its cokernel, torsion included.
    pub cokernel_rank: usize,
    /// `A1 ⊕ B0 → B1` is onto.
    pub pair_surjective: bool,
    pub verdict: bool,
}

/// The square `top : A0 → A1`, `left : A0 → B0`, `right : A1 → B1`,
/// `bottom : B0 → B1` over ℤ.
fn integer_square(label: String, top: &ZMatrix, left: &ZMatrix, right: &ZMatrix, bottom: &ZMatrix) -> Result<DescentReport> {
    if right.mul(top) != bottom.mul(left) {
        return Err(Error::NotFunctorial(format!("square `{label}` does not commute")));
    }
    let a0 = top.cols();
    let c = ZMatrix::vstack(a0, &[top, left]);
    let neg = bottom.scale(&z(-1));
    let d = ZMatrix::hstack(right.rows(), &[right, &neg]);
    let rank_c = c.integer_rank();
    let rank_p = d.cols() - d.integer_rank();
    // ker d is saturated, so the torsion of coker c sits inside P / im c
    let kernel_rank = a0 - rank_c;
    let cokernel_rank = rank_p - rank_c + c.torsion_generators();
    let pair_surjective = d.is_integrally_surjective();
    Ok(DescentReport {
        label,
        kernel_rank,
        cokernel_rank,
        pair_surjective,
        verdict: kernel_rank == 0 && cokernel_rank == 0 && pair_surjective,
    })
}

fn check_mask(x: &FinitePoset, s: SubsetMask) -> Result<()> {
    x.check_subset(s)
}

fn names(x: &FinitePoset, s: SubsetMask) -> String {
    format!("{{{}}}", x.subset_names(s).join(","))
}

/// `ℤ^{K∪L} → ℤ^K ×_{ℤ^{K∩L}} ℤ^L` is an isomorphism and the pair map onto
/// `ℤ^{K∩L}` is surjective.
pub fn descent_square_check(x: &FinitePoset, k: SubsetMask, l: SubsetMask) -> Result<DescentReport> {
    check_mask(x, k)?;
    check_mask(x, l)?;
    let (u, m) = (k.union(l), k.intersection(l));
    integer_square(
        format!("{} ∪ {}", names(x, k), names(x, l)),
        &restriction(u, k),
        &restriction(u, l),
        &restriction(k, m),
        &restriction(l, m),
    )
}

/// `0 → ℤ^U → ℤ^X → ℤ^{X∖U} → 0` (extension by zero, then restriction) is
/// split exact.
pub fn open_closed_k0_exactness(x: &FinitePoset, u: SubsetMask) -> Result<DescentReport> {
    check_mask(x, u)?;
    if !x.is_downset(u) {
        return Err(Error::WrongSubsetKind {
            expected: "open (a down-set)",
            detail: names(x, u),
        });
    }
    let all = x.full();
    let c = u.complement(x.len());
    let iota = restriction(all, u).transpose();
    let rho = restriction(all, c);
    let composite_zero = rho.mul(&iota).is_zero();
    let injective = iota.integer_rank() == u.len();
    let saturated = iota.torsion_generators() == 0;
    let onto = rho.is_integrally_surjective();
    let middle = x.len() - rho.integer_rank() == iota.integer_rank();
    let kernel_rank = u.len() - iota.integer_rank();
    let cokernel_rank = usize::from(!onto) + usize::from(!middle) + usize::from(!saturated);
    Ok(DescentReport {
        label: format!("open {}", names(x, u)),
        kernel_rank,
        cokernel_rank,
        pair_surjective: onto,
        verdict: composite_zero && injective && saturated && onto && middle,
    })
}

/// The cube `A ↦ ℚ^{Z_A}` with `Z_∅ = Y₁ ∪ Y₂ ∪ Y₃` and `Z_A = ⋂_{a∈A} Y_a`,
/// maps restricting functions.
fn cover_cube(ys: [SubsetMask; 3]) -> Result<CubeDiagram<Rational>> {
    let zset = |b: u64| -> SubsetMask {
        if b == 0 {
            return ys[0].union(ys[1]).union(ys[2]);
        }
        let mut s = SubsetMask::full(64);
        for (k, y) in ys.iter().enumerate() {
            if b >> k & 1 == 1 {
                s = s.intersection(*y);
            }
        }
        s
    };
    let dims = (0..8u64).map(|b| (b, zset(b).len())).collect();
    let mut edges = BTreeMap::new();
    for a in 0..8u64 {
        for k in 0..3 {
            if a >> k & 1 == 0 {
                let b = a | 1 << k;
                let m: QMatrix = restriction(zset(a), zset(b)).map(|v| Rational::from_integer(v.clone()));
                edges.insert((a, b), m);
            }
        }
    }
    CubeDiagram::from_edges(3, &dims, &edges)
}

/// The squares and cube replayed by the elementary-compact induction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementaryInduction {
    pub squares: Vec<DescentReport>,
    pub cube_direct: bool,
    pub cube_recursive: bool,
    pub verdict: bool,
}

/// Descent for `(K, S ∪ C)` through the three auxiliary squares
/// `(K ∪ C, S)`, `(K, C)`, `(K ∩ S, C ∩ S)` and the cube on the cover
/// `{K, C, S}`, read along the first axis.
pub fn elementary_induction_check(
    x: &FinitePoset,
    k: SubsetMask,
    s: SubsetMask,
    c: SubsetMask,
) -> Result<ElementaryInduction> {
    check_mask(x, k)?;
    check_mask(x, s)?;
    check_mask(x, c)?;
    if !x.is_downset(s) {
        return Err(Error::WrongSubsetKind {
            expected: "saturated compact (a down-set)",
            detail: names(x, s),
        });
    }
    if !x.is_upset(c) {
        return Err(Error::WrongSubsetKind {
            expected: "closed (an up-set)",
            detail: names(x, c),
        });
    }
    let squares = vec![
        descent_square_check(x, k.union(c), s)?,
        descent_square_check(x, k, c)?,
        descent_square_check(x, k.intersection(s), c.intersection(s))?,
    ];
    let cube = cover_cube([k, c, s])?;
    let cube_direct = cube_cartesian_direct(&cube)?;
    let cube_recursive = cube_cartesian_recursive(&cube, 1)?;
    let verdict = squares.iter().all(|r| r.verdict) && cube_direct && cube_recursive;
    Ok(ElementaryInduction {
        squares,
        cube_direct,
        cube_recursive,
        verdict,
    })
}

/// Left Kan extension of `E ↦ ℤ^E` (restriction maps) from elementary
/// compacts to all subsets, compared with `ℤ^K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosheafExtension {
    /// `(K, rank of the extension at K, |K|)` for every subset `K`.
    pub values: Vec<(SubsetMask, usize, usize)>,
    /// Subsets where the canonical map to `ℤ^K` is not an isomorphism.
    pub failures: Vec<SubsetMask>,
    /// Pairs of elementary compacts whose union square is not a pushout.
    pub hypothesis_failures: Vec<(SubsetMask, SubsetMask)>,
}

impl CosheafExtension {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.hypothesis_failures.is_empty()
    }
}

/// The colimit over `{E elementary : E ⊇ K}` of `ℤ^E`, with the canonical
/// map to `ℤ^K`; returns (rank of the colimit, map is an isomorphism).
fn lan_at(elementary: &[SubsetMask], k: SubsetMask) -> (usize, bool) {
    let over: Vec<SubsetMask> = elementary.iter().copied().filter(|e| k.is_subset_of(*e)).collect();
    let offsets: Vec<usize> = over
        .iter()
        .scan(0, |acc, e| {
            let o = *acc;
            *acc += e.len();
            Some(o)
        })
        .collect();
    let total: usize = over.iter().map(|e| e.len()).sum();
    // one relation block per strict inclusion E' ⊂ E: ι_E v − ι_{E'} (v|E')
    let mut cols: Vec<ZMatrix> = Vec::new();
    for (a, &e) in over.iter().enumerate() {
        for (b, &e2) in over.iter().enumerate() {
            if a != b && e2.is_subset_of(e) {
                let r = restriction(e, e2);
                let mut block = ZMatrix::zeros(total, e.len());
                for j in 0..e.len() {
                    block.set(offsets[a] + j, j, Integer::one());
                    for i in 0..e2.len() {
                        if !r.get(i, j).is_zero() {
                            block.set(offsets[b] + i, j, z(-1));
                        }
                    }
                }
                cols.push(block);
            }
        }
    }
    let refs: Vec<&ZMatrix> = cols.iter().collect();
    let rel = ZMatrix::hstack(total, &refs);
    let phi = ZMatrix::hstack(
        k.len(),
        &over.iter().map(|&e| restriction(e, k)).collect::<Vec<_>>().iter().collect::<Vec<_>>(),
    );
    let rel_rank = rel.integer_rank();
    let rank = total - rel_rank;
    let iso = phi.mul(&rel).is_zero()
        && phi.is_integrally_surjective()
        && rel_rank == total - phi.integer_rank()
        && rel.torsion_generators() == 0;
    (rank, iso)
}

pub fn cosheaf_extension_check(x: &FiniteSpace) -> Result<CosheafExtension> {
    let p = x.carrier();
    let elementary = x.elementary_compacts();
    let mut hypothesis_failures = Vec::new();
    for (i, &a) in elementary.iter().enumerate() {
        for &b in &elementary[i + 1..] {
            if !descent_square_check(p, a, b)?.verdict {
                hypothesis_failures.push((a, b));
            }
        }
    }
    let mut values = Vec::new();
    let mut failures = Vec::new();
    for k in SubsetMask::all_subsets(p.len()) {
        let (rank, iso) = lan_at(&elementary, k);
        if !iso || rank != k.len() {
            failures.push(k);
        }
        values.push((k, rank, k.len()));
    }
    Ok(CosheafExtension {
        values,
        failures,
        hypothesis_failures,
    })
}

/// Both sides of the main theorem at one depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainTheoremSide {
    pub k0_rank: usize,
    pub k0_torsion: usize,
    pub patch_rank: usize,
    pub iso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainTheoremReport {
    pub depth: usize,
    pub compact: MainTheoremSide,
    /// Kernels of evaluation at the added point on the one-point tower.
    pub compactly_supported: MainTheoremSide,
    /// Descent squares checked at each level, and how many failed.
    pub level_squares: usize,
    pub level_failures: usize,
    pub verdict: bool,
}

/// Pairs of subsets used to certify a level: all pairs up to five points,
/// otherwise pairs of principal down-sets, up-sets and singletons.
fn level_pairs(p: &FinitePoset) -> Vec<(SubsetMask, SubsetMask)> {
    let n = p.len();
    let family: Vec<SubsetMask> = if n <= 5 {
        SubsetMask::all_subsets(n).collect()
    } else {
        let mut f: Vec<SubsetMask> = (0..n)
            .flat_map(|i| [p.below(i), p.above(i), SubsetMask::singleton(i)])
            .collect();
        f.sort_by_key(|s| s.bits());
        f.dedup();
        f
    };
    let mut out = Vec::new();
    for (i, &a) in family.iter().enumerate() {
        for &b in &family[i..] {
            out.push((a, b));
        }
    }
    out
}

/// `colim_{i≤d} ℤ^{level_i}` as generators modulo relations, the map to
/// functions on threads sending a level point to its cylinder indicator,
/// and optionally the evaluation functionals at a marked thread.
struct Sides {
    relations: ZMatrix,
    to_threads: ZMatrix,
    eval_k0: Option<ZMatrix>,
    eval_patch: Option<ZMatrix>,
}

fn sides(t: &Tower, d: usize, marked: Option<&[usize]>) -> Result<Sides> {
    let sizes: Vec<usize> = (0..=d).map(|i| t.level(i).len()).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    // e_{i,p} − pullback(e_{i,p}) to level i + 1
    let mut relations = ZMatrix::zeros(total, total - sizes[d]);
    let mut col = 0;
    for i in 0..d {
        let f = &t.transitions()[i];
        for p in 0..sizes[i] {
            relations.set(offsets[i] + p, col, Integer::one());
            for q in (0..sizes[i + 1]).filter(|&q| f.apply(q) == p) {
                relations.set(offsets[i + 1] + q, col, z(-1));
            }
            col += 1;
        }
    }
    let patch = t.patch();
    let th = threads(&patch, d)?;
    let to_threads = ZMatrix::from_fn(th.len(), total, |r, c| {
        let i = offsets.iter().rposition(|&o| o <= c).unwrap();
        if th.threads[r][i] == c - offsets[i] {
            Integer::one()
        } else {
            Integer::zero()
        }
    });
    let (eval_k0, eval_patch) = match marked {
        Some(m) => {
            let ek = ZMatrix::from_fn(1, total, |_, c| {
                let i = offsets.iter().rposition(|&o| o <= c).unwrap();
                if m[i] == c - offsets[i] {
                    Integer::one()
                } else {
                    Integer::zero()
                }
            });
            let row = th
                .threads
                .iter()
                .position(|s| s.iter().zip(m).all(|(a, b)| a == b))
                .ok_or_else(|| Error::Internal("marked thread missing".into()))?;
            let ep = ZMatrix::from_fn(1, th.len(), |_, c| if c == row { Integer::one() } else { Integer::zero() });
            (Some(ek), Some(ep))
        }
        None => (None, None),
    };
    Ok(Sides {
        relations,
        to_threads,
        eval_k0,
        eval_patch,
    })
}

/// The canonical map `colim → ℤ^{threads}` is an isomorphism: it kills the
/// relations, is onto, and its kernel is exactly the saturated relation
/// lattice.
fn compare(s: &Sides) -> MainTheoremSide {
    let total = s.relations.rows();
    let rel_rank = s.relations.integer_rank();
    let k0_torsion = s.relations.torsion_generators();
    let k0_rank = total - rel_rank;
    let patch_rank = s.to_threads.rows();
    let phi_rank = s.to_threads.integer_rank();
    let iso = s.to_threads.mul(&s.relations).is_zero()
        && s.to_threads.is_integrally_surjective()
        && rel_rank == total - phi_rank
        && k0_torsion == 0;
    MainTheoremSide {
        k0_rank,
        k0_torsion,
        patch_rank,
        iso,
    }
}

/// Restricted to the kernels of the evaluations, which the canonical map
/// must intertwine.
fn compare_kernels(s: &Sides) -> MainTheoremSide {
    let full = compare(s);
    let (ek, ep) = (s.eval_k0.as_ref().unwrap(), s.eval_patch.as_ref().unwrap());
    let intertwines = ep.mul(&s.to_threads) == *ek;
    let ek_onto = ek.is_integrally_surjective();
    let ep_onto = ep.is_integrally_surjective();
    MainTheoremSide {
        k0_rank: full.k0_rank - usize::from(ek_onto && ek.mul(&s.relations).is_zero()),
        k0_torsion: full.k0_torsion,
        patch_rank: full.patch_rank - usize::from(ep_onto),
        iso: full.iso && intertwines && ek_onto && ep_onto,
    }
}

pub fn main_theorem_check(t: &Tower, d: usize) -> Result<MainTheoremReport> {
    let t = t.truncate(d)?;
    let mut level_squares = 0;
    let mut level_failures = 0;
    for p in t.levels() {
        for (a, b) in level_pairs(p) {
            level_squares += 1;
            if !descent_square_check(p, a, b)?.verdict {
                level_failures += 1;
            }
        }
    }
    let compact = compare(&sides(&t, d, None)?);
    let plus = t.one_point()?;
    let inf = plus.infinity_points();
    let compactly_supported = compare_kernels(&sides(&plus, d, Some(&inf))?);
    let verdict = level_failures == 0
        && compact.iso
        && compactly_supported.iso
        && compact.k0_rank == compact.patch_rank
        && compactly_supported.k0_rank == compactly_supported.patch_rank;
    Ok(MainTheoremReport {
        depth: d,
        compact,
        compactly_supported,
        level_squares,
        level_failures,
        verdict,
    })
}

/// The sheaf `⊕_p (i_p)_* k^{e_p}`: pointwise `dims = ζ·e`, restrictions
/// are coordinate projections, so every restriction of sections is onto.
pub fn flasque_sheaf<T: Field>(x: &FinitePoset, e: &[usize]) -> Result<VecSheaf<T>> {
    if e.len() != x.len() {
        return Err(Error::DimensionMismatch(format!("{} multiplicities for {} points", e.len(), x.len())));
    }
    // coordinates at q: blocks for p ≤ q in ascending p
    let coords = |q: usize| -> Vec<(usize, usize)> {
        x.below(q).iter().flat_map(|p| (0..e[p]).map(move |j| (p, j))).collect()
    };
    let dims: Vec<usize> = (0..x.len()).map(|q| coords(q).len()).collect();
    let mut maps = BTreeMap::new();
    for lo in 0..x.len() {
        for hi in x.above(lo).iter().filter(|&hi| hi != lo) {
            let (cl, ch) = (coords(lo), coords(hi));
            let m = Matrix::from_fn(cl.len(), ch.len(), |r, c| if cl[r] == ch[c] { T::one() } else { T::zero() });
            maps.insert((lo, hi), m);
        }
    }
    VecSheaf::new(x.clone(), dims, maps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdierReport {
    /// Set when some restriction of sections is not onto; no verdict then.
    pub skipped: Option<String>,
    /// `V ↦ rank Γ(X) − rank Γ(X∖V)` over the opens `V` of the dual space.
    pub dual_cosheaf_table: Vec<(SubsetMask, usize)>,
    /// Section ranks of the matching sheaf on the dual space.
    pub dual_sheaf_table: Vec<(SubsetMask, usize)>,
    /// Point multiplicities recovered on each side.
    pub classes: (Vec<i64>, Vec<i64>),
    pub verdict: bool,
}

/// Point multiplicities `e` with `rank Γ(V) = Σ_{p∈V} e_p`, recovered from a
/// table over the opens of `y` by differencing along `↓p ∖ {p}`.
fn multiplicities(y: &FinitePoset, table: &[(SubsetMask, usize)]) -> Vec<i64> {
    let at = |s: SubsetMask| table.iter().find(|(m, _)| *m == s).map(|&(_, d)| d as i64).unwrap();
    (0..y.len())
        .map(|p| at(y.below(p)) - at(y.below(p).without(p)))
        .collect()
}

/// Verdier duality at K₀ for a flasque sheaf `f` on `x` with point
/// multiplicities `e`: the dual cosheaf table on `x^∨` matches the sections
/// of `flasque_sheaf(x^∨, e)`, and both recover the class `e`.
pub fn verdier_k0_check<T: Field>(f: &VecSheaf<T>, e: &[usize]) -> Result<VerdierReport> {
    let x = f.space();
    let all = x.full();
    let opens: Vec<SubsetMask> = SubsetMask::all_subsets(x.len()).filter(|&s| x.is_downset(s)).collect();
    for &u in &opens {
        let r = f.section_restriction(all, u)?;
        if r.rank() != r.rows() {
            return Ok(VerdierReport {
                skipped: Some(format!("restriction to {} is not onto", names(x, u))),
                dual_cosheaf_table: Vec::new(),
                dual_sheaf_table: Vec::new(),
                classes: (Vec::new(), Vec::new()),
                verdict: false,
            });
        }
    }
    let dual = x.opposite();
    let total = f.sections(all)?.dim();
    // opens of the dual are up-sets of x; transport by name
    let mut dual_cosheaf_table = Vec::new();
    for v in SubsetMask::all_subsets(x.len()).filter(|&s| x.is_upset(s)) {
        let rest = f.sections(v.complement(x.len()))?.dim();
        dual_cosheaf_table.push((x.transport(v, &dual)?, total - rest));
    }
    dual_cosheaf_table.sort_by_key(|(m, _)| m.bits());
    let g: VecSheaf<T> = flasque_sheaf(&dual, &x.name_map(&dual)?.iter().enumerate().fold(
        vec![0; e.len()],
        |mut acc, (p, &q)| {
            acc[q] = e[p];
            acc
        },
    ))?;
    let mut dual_sheaf_table = Vec::new();
    for v in SubsetMask::all_subsets(dual.len()).filter(|&s| dual.is_downset(s)) {
        dual_sheaf_table.push((v, g.sections(v)?.dim()));
    }
    dual_sheaf_table.sort_by_key(|(m, _)| m.bits());
    let on_dual = multiplicities(&dual, &dual_cosheaf_table);
    let back = dual.name_map(x)?;
    let mut cosheaf_class = vec![0; x.len()];
    for (q, &p) in back.iter().enumerate() {
        cosheaf_class[p] = on_dual[q];
    }
    let sheaf_table: Vec<(SubsetMask, usize)> = opens
        .iter()
        .map(|&u| Ok((u, f.sections(u)?.dim())))
        .collect::<Result<_>>()?;
    let sheaf_class = multiplicities(x, &sheaf_table);
    let expected: Vec<i64> = e.iter().map(|&v| v as i64).collect();
    let verdict = dual_cosheaf_table == dual_sheaf_table && cosheaf_class == sheaf_class && sheaf_class == expected;
    Ok(VerdierReport {
        skipped: None,
        dual_cosheaf_table,
        dual_sheaf_table,
        classes: (sheaf_class, cosheaf_class),
        verdict,
    })
}

/// The square `ℤ^X → ℤ^C`, `ℤ^X → ℤ^Y`, `ℤ^C → ℤ^{f⁻¹C}`, `ℤ^Y → ℤ^{f⁻¹C}`
/// for a monotone `f : Y → X` and an up-set `C`, or `None` when `f` is not
/// an isomorphism between the open complements.
pub fn nisnevich_square_check(f: &MonotoneMap, c: SubsetMask) -> Result<Option<DescentReport>> {
    let (y, x) = (f.src(), f.dst());
    check_mask(x, c)?;
    if !x.is_upset(c) {
        return Err(Error::WrongSubsetKind {
            expected: "closed (an up-set)",
            detail: names(x, c),
        });
    }
    let fc = f.preimage(c);
    let (yu, xu) = (fc.complement(y.len()), c.complement(x.len()));
    let yu_pts: Vec<usize> = yu.iter().collect();
    let hits: Vec<usize> = yu_pts.iter().map(|&p| f.apply(p)).collect();
    let bijective = hits.len() == xu.len() && SubsetMask::from_indices(hits.iter().copied()) == xu;
    let order_iso = bijective
        && yu_pts
            .iter()
            .all(|&a| yu_pts.iter().all(|&b| y.leq(a, b) == x.leq(f.apply(a), f.apply(b))));
    if !order_iso {
        return Ok(None);
    }
    let pull = pullback_matrix(f.image(), x.len());
    let yc = restriction(y.full(), fc);
    let report = integer_square(
        format!("nisnevich {} over {}", names(x, c), names(y, fc)),
        &restriction(x.full(), c),
        &pull,
        &{
            // ℤ^C → ℤ^{f⁻¹C}: pullback along f restricted
            let img: Vec<usize> = fc.iter().map(|p| c.iter().position(|q| q == f.apply(p)).unwrap()).collect();
            pullback_matrix(&img, c.len())
        },
        &yc,
    )?;
    Ok(Some(report))
}

/// The K₀ shadow of additivity on the Sierpinski space `0 < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SierpinskiAdditivity {
    /// `(m, n) ↦` class of `p_*` of the sheaf with ranks `(m, n)` on `𝟐^disc`,
    /// as ranks at the open point `0` and the closed point `1`.
    pub samples: Vec<((usize, usize), (i64, i64))>,
    /// Matrix of `p_*` on K₀ in the bases (points of `𝟐`) → (points of `𝐒`).
    pub matrix: [[i64; 2]; 2],
    /// `p_*` is invertible over ℤ.
    pub unimodular: bool,
    /// Ranks agree with `(m, n) ↦ (m, m + n)` and the patch of `𝐒` has
    /// functions `ℤ²` on its two points.
    pub verdict: bool,
}

pub fn sierpinski_additivity(bound: usize) -> Result<SierpinskiAdditivity> {
    let s = FinitePoset::chain(2);
    let two = s.discretization();
    let p = MonotoneMap::new(two.clone(), s.clone(), two.name_map(&s)?)?;
    let (a, b) = (two.index_of("0").unwrap(), two.index_of("1").unwrap());
    let mut samples = Vec::new();
    let mut ok = true;
    for m in 0..=bound {
        for n in 0..=bound {
            let mut dims = vec![0; 2];
            dims[a] = m;
            dims[b] = n;
            let g: VecSheaf<Rational> = VecSheaf::new(two.clone(), dims, BTreeMap::new())?;
            let c = k0_of_vecsheaf(&direct_image(&p, &g)?);
            let (open, closed) = (c.at("0").unwrap(), c.at("1").unwrap());
            ok &= (open, closed) == (m as i64, (m + n) as i64);
            samples.push(((m, n), (open, closed)));
        }
    }
    let col = |m: usize, n: usize| samples.iter().find(|(k, _)| *k == (m, n)).map(|(_, v)| *v).unwrap();
    let (e0, e1) = (col(1, 0), col(0, 1));
    let matrix = [[e0.0, e1.0], [e0.1, e1.1]];
    let zm = ZMatrix::from_fn(2, 2, |r, c| z(matrix[r][c]));
    let unimodular = zm.is_integrally_surjective();
    let patch_points = threads(&Tower::constant(&s, 0).patch(), 0)?.len();
    Ok(SierpinskiAdditivity {
        samples,
        matrix,
        unimodular,
        verdict: ok && unimodular && patch_points == 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::all_posets;
    use crate::QSheaf;

    fn m(x: &FinitePoset, names: &[&str]) -> SubsetMask {
        x.subset_from_names(names).unwrap()
    }

    #[test]
    fn classes_of_sheaves() {
        let c = FinitePoset::chain(2);
        assert_eq!(k0_of_vecsheaf(&QSheaf::constant(c.clone(), 1)).vector, vec![1, 1]);
        assert_eq!(k0_of_vecsheaf(&QSheaf::zero(c.clone())).vector, vec![0, 0]);
        let top = c.index_of("1").unwrap();
        let sky = k0_of_vecsheaf(&QSheaf::skyscraper_at_maximal(c.clone(), top).unwrap());
        assert_eq!((sky.at("0"), sky.at("1")), (Some(0), Some(1)));
    }

    #[test]
    fn pullback_of_classes() {
        let two = FinitePoset::antichain(2);
        let pt = FinitePoset::point();
        let collapse = MonotoneMap::new(two.clone(), pt.clone(), vec![0, 0]).unwrap();
        let c = K0Class::new(pt, vec![3]).unwrap();
        assert_eq!(pullback_k0(&collapse, &c).unwrap().vector, vec![3, 3]);
        let id = MonotoneMap::identity(&two);
        let d = K0Class::new(two, vec![2, 5]).unwrap();
        assert_eq!(pullback_k0(&id, &d).unwrap(), d);
    }

    #[test]
    fn open_closed_sequences() {
        let s = FinitePoset::chain(2);
        for u in [SubsetMask::default(), m(&s, &["0"]), s.full()] {
            assert!(open_closed_k0_exactness(&s, u).unwrap().verdict);
        }
        assert!(open_closed_k0_exactness(&s, m(&s, &["1"])).is_err());
    }

    #[test]
    fn descent_examples() {
        let c2 = FinitePoset::chain(2);
        assert!(descent_square_check(&c2, m(&c2, &["0"]), m(&c2, &["1"])).unwrap().verdict);
        let c3 = FinitePoset::chain(3);
        let r = descent_square_check(&c3, m(&c3, &["0", "1"]), m(&c3, &["1", "2"])).unwrap();
        assert_eq!((r.kernel_rank, r.cokernel_rank), (0, 0));
        assert!(r.verdict);
    }

    #[test]
    fn broken_square_is_caught() {
        // ℤ → ℤ ×_ℤ ℤ through multiplication by 2 has cokernel ℤ/2
        let two = ZMatrix::from_fn(1, 1, |_, _| z(2));
        let one = ZMatrix::identity(1);
        let r = integer_square("x2".into(), &two, &two, &one, &one).unwrap();
        assert_eq!((r.kernel_rank, r.cokernel_rank), (0, 1));
        assert!(!r.verdict);
        let proj = ZMatrix::from_fn(1, 2, |_, c| if c == 0 { z(1) } else { z(0) });
        let r = integer_square("kernel".into(), &proj, &proj, &one, &one).unwrap();
        assert_eq!(r.kernel_rank, 1);
        assert!(!r.verdict);
    }

    #[test]
    fn elementary_induction_examples() {
        let c3 = FinitePoset::chain(3);
        let r = elementary_induction_check(&c3, m(&c3, &["1"]), m(&c3, &["0"]), m(&c3, &["2"])).unwrap();
        assert_eq!(r.squares.len(), 3);
        assert!(r.verdict);
        let e = SubsetMask::default();
        assert!(elementary_induction_check(&c3, m(&c3, &["1"]), m(&c3, &["0"]), e).unwrap().verdict);
        assert!(elementary_induction_check(&c3, m(&c3, &["1"]), e, m(&c3, &["2"])).unwrap().verdict);
        assert!(elementary_induction_check(&c3, e, m(&c3, &["2"]), e).is_err());
    }

    #[test]
    fn induction_matches_direct_square() {
        for x in (0..=3).flat_map(all_posets) {
            let n = x.len();
            let downs: Vec<SubsetMask> = SubsetMask::all_subsets(n).filter(|&s| x.is_downset(s)).collect();
            let ups: Vec<SubsetMask> = SubsetMask::all_subsets(n).filter(|&s| x.is_upset(s)).collect();
            for k in SubsetMask::all_subsets(n) {
                for &s in &downs {
                    for &c in &ups {
                        let a = elementary_induction_check(&x, k, s, c).unwrap().verdict;
                        let b = descent_square_check(&x, k, s.union(c)).unwrap().verdict;
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn cosheaf_extension_examples() {
        let d = FiniteSpace::new(FinitePoset::antichain(3));
        assert_eq!(d.elementary_compacts().len(), 8);
        assert!(cosheaf_extension_check(&d).unwrap().holds());
        let c3 = FiniteSpace::new(FinitePoset::chain(3));
        let r = cosheaf_extension_check(&c3).unwrap();
        assert!(r.holds());
        let one = m(c3.carrier(), &["1"]);
        assert!(!c3.is_elementary(one));
        assert_eq!(r.values.iter().find(|v| v.0 == one).unwrap().1, 1);
        assert_eq!(lan_at(&c3.elementary_compacts(), one), (1, true));
    }

    #[test]
    fn direct_image_and_pullback_naturality() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for x in (1..=3).flat_map(all_posets) {
            for y in (1..=3).flat_map(all_posets) {
                let img: Vec<usize> = (0..y.len()).map(|i| i % x.len()).collect();
                let Ok(f) = MonotoneMap::new(y.clone(), x.clone(), img) else { continue };
                let s: QSheaf = crate::vsheaf::random_sheaf(&mut rng, &x, Default::default());
                let lhs = pullback_k0(&f, &k0_of_vecsheaf(&s)).unwrap();
                assert_eq!(lhs, k0_of_vecsheaf(&s.pullback(&f).unwrap()));
            }
        }
    }

    #[test]
    fn main_theorem_examples() {
        let p = FinitePoset::from_covers(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
        let r = main_theorem_check(&Tower::constant(&p, 2), 2).unwrap();
        assert!(r.verdict);
        assert_eq!((r.compact.k0_rank, r.compact.patch_rank), (3, 3));
        let r = main_theorem_check(&Tower::cantor(3).unwrap(), 3).unwrap();
        assert!(r.verdict);
        assert_eq!((r.compact.k0_rank, r.compact.patch_rank), (8, 8));
        assert_eq!(
            (r.compactly_supported.k0_rank, r.compactly_supported.patch_rank),
            (8, 8)
        );
        let r = main_theorem_check(&Tower::dyadic_chain(2).unwrap(), 2).unwrap();
        assert!(r.verdict);
        assert_eq!(r.compact.k0_rank, 5);
    }

    #[test]
    fn verdier_examples() {
        let c2 = FinitePoset::chain(2);
        let e = [1, 0];
        let f: QSheaf = flasque_sheaf(&c2, &e).unwrap();
        assert_eq!(f, QSheaf::constant(c2.clone(), 1));
        let r = verdier_k0_check(&f, &e).unwrap();
        assert!(r.verdict);
        let z: QSheaf = QSheaf::zero(c2.clone());
        let r = verdier_k0_check(&z, &[0, 0]).unwrap();
        assert!(r.verdict && r.dual_cosheaf_table.iter().all(|&(_, d)| d == 0));
        let v = FinitePoset::from_covers(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let r = verdier_k0_check(&QSheaf::constant(v, 1), &[0, 0, 0]).unwrap();
        assert!(r.skipped.is_some());
        let d = FinitePoset::antichain(3);
        let e = [2, 0, 1];
        let r = verdier_k0_check(&flasque_sheaf::<Rational>(&d, &e).unwrap(), &e).unwrap();
        assert!(r.verdict);
        assert_eq!(r.dual_cosheaf_table, r.dual_sheaf_table);
    }

    #[test]
    fn nisnevich_identity_and_covers() {
        let c2 = FinitePoset::chain(2);
        let id = MonotoneMap::identity(&c2);
        for c in [SubsetMask::default(), m(&c2, &["1"]), c2.full()] {
            assert!(nisnevich_square_check(&id, c).unwrap().unwrap().verdict);
        }
    }

    #[test]
    fn sierpinski_instance() {
        let r = sierpinski_additivity(3).unwrap();
        assert!(r.verdict);
        assert_eq!(r.matrix, [[1, 0], [1, 1]]);
    }
}
