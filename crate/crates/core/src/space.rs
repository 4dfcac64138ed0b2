//! Finite T0 spaces: a poset with the down-sets as opens.
//!
//! Every subset of a finite space is compact, so the saturated compacts are
//! the down-sets again and every subset is a perfect subspace. The checks in
//! this module compute the relevant families directly and compare them.

use crate::dlattice::DistLattice;
use crate::error::{Error, Result};
use crate::frame::Nucleus;
use crate::poset::{FinitePoset, MonotoneMap, SubsetMask};
use crate::scalar::Field;
use crate::vsheaf::{bicartesian_square_check, Square, VecSheaf};

/// Name given to the point added by [`FiniteSpace::one_point`].
pub const INFINITY: &str = "∞";

/// Largest space accepted by exhaustive filter enumeration.
pub const MAX_FILTER_SPACE: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    carrier: FinitePoset,
}

impl FiniteSpace {
    pub fn new(carrier: FinitePoset) -> Self {
        FiniteSpace { carrier }
    }

    pub fn carrier(&self) -> &FinitePoset {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn frame(&self) -> Result<DistLattice> {
        DistLattice::downset_lattice(&self.carrier)
    }

    /// Down-sets, sorted by (size, bits).
    pub fn opens(&self) -> Vec<SubsetMask> {
        self.carrier.downsets()
    }

    /// Up-sets, sorted by (size, bits).
    pub fn closed_sets(&self) -> Vec<SubsetMask> {
        self.carrier.upsets()
    }

    /// Intersections of opens, which at finite scale are the opens again.
    pub fn saturated_compacts(&self) -> Vec<SubsetMask> {
        let mut out: Vec<SubsetMask> = SubsetMask::all_subsets(self.len())
            .filter(|&k| self.saturation(k) == k)
            .collect();
        out.sort_by_key(|s| (s.len(), s.bits()));
        out
    }

    /// Intersection of all opens containing `k`.
    pub fn saturation(&self, k: SubsetMask) -> SubsetMask {
        self.opens()
            .into_iter()
            .filter(|&u| k.is_subset_of(u))
            .fold(self.carrier.full(), SubsetMask::intersection)
    }

    /// Unions `C ∪ S` with `C` closed and `S` saturated compact.
    pub fn elementary_compacts(&self) -> Vec<SubsetMask> {
        let closed = self.closed_sets();
        let compact = self.saturated_compacts();
        let mut out: Vec<SubsetMask> = closed
            .iter()
            .flat_map(|&c| compact.iter().map(move |&s| c.union(s)))
            .collect();
        out.sort_by_key(|s| (s.len(), s.bits()));
        out.dedup();
        out
    }

    pub fn is_elementary(&self, e: SubsetMask) -> bool {
        let n = self.len();
        // E = C ∪ S forces C ⊆ up-interior and S ⊆ down-interior of E
        let up_part = SubsetMask::from_indices((0..n).filter(|&i| self.carrier.above(i).is_subset_of(e)));
        let down_part =
            SubsetMask::from_indices((0..n).filter(|&i| self.carrier.below(i).is_subset_of(e)));
        up_part.union(down_part) == e
    }

    /// Discrete space on the same points.
    pub fn patch(&self) -> FiniteSpace {
        FiniteSpace::new(self.carrier.discretization())
    }

    /// Opposite order: opens become the complements of saturated compacts.
    pub fn de_groot_dual(&self) -> FiniteSpace {
        FiniteSpace::new(self.carrier.opposite())
    }

    /// `X⁺`: a new point above everything, whose only open neighbourhood is
    /// the whole space, together with the open inclusion `X ↪ X⁺`.
    pub fn one_point(&self) -> Result<(FiniteSpace, MonotoneMap)> {
        let mut name = INFINITY.to_string();
        while self.carrier.index_of(&name).is_some() {
            name.push('\'');
        }
        let plus = FinitePoset::join(&self.carrier, &FinitePoset::discrete(vec![name]))?;
        let image = self.carrier.name_map(&plus)?;
        let incl = MonotoneMap::new(self.carrier.clone(), plus.clone(), image)?;
        Ok((FiniteSpace::new(plus), incl))
    }

    /// Index of the added point in a space produced by [`Self::one_point`].
    pub fn point_at_infinity(plus: &FiniteSpace, incl: &MonotoneMap) -> usize {
        let hit = SubsetMask::from_indices(incl.image().iter().copied());
        hit.complement(plus.len()).iter().next().expect("one added point")
    }

    /// Subspace opens on `s` are exactly the traces of opens of the space.
    pub fn is_perfect_subspace(&self, s: SubsetMask) -> Result<bool> {
        self.carrier.check_subset(s)?;
        let (sub, back) = self.carrier.induced(s);
        let to_sub = |m: SubsetMask| {
            SubsetMask::from_indices((0..sub.len()).filter(|&k| m.contains(back[k])))
        };
        let mut traces: Vec<SubsetMask> = self
            .opens()
            .into_iter()
            .map(|u| to_sub(u.intersection(s)))
            .collect();
        traces.sort();
        traces.dedup();
        let mut own = sub.downsets();
        own.sort();
        Ok(traces == own)
    }

    /// `N = i_* i^*` for the subspace `s`: `U ↦ interior((U ∩ s) ∪ sᶜ)`.
    pub fn subspace_nucleus(&self, frame: &DistLattice, s: SubsetMask) -> Result<Nucleus> {
        let n = self.len();
        let p = &self.carrier;
        let table = frame
            .elements()
            .iter()
            .map(|&u| {
                let allowed = u.intersection(s).union(s.complement(n));
                let w = SubsetMask::from_indices((0..n).filter(|&i| p.below(i).is_subset_of(allowed)));
                frame.index_of(w).expect("interior is open")
            })
            .collect();
        Nucleus::new(frame.clone(), table)
    }
}

/// A Scott open filter of `𝒪(X)`, as indices into the frame of opens.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScottFilter {
    pub members: Vec<usize>,
}

impl ScottFilter {
    pub fn contains(&self, u: usize) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    pub fn is_subset_of(&self, other: &ScottFilter) -> bool {
        self.members.iter().all(|&u| other.contains(u))
    }
}

/// All nonempty, upward closed, meet-closed families of opens. Scott
/// openness is automatic on a finite frame.
pub fn scott_open_filters(x: &FiniteSpace) -> Result<Vec<ScottFilter>> {
    if x.len() > MAX_FILTER_SPACE {
        return Err(Error::TooLarge {
            what: "space for filter enumeration",
            size: x.len(),
            bound: MAX_FILTER_SPACE,
        });
    }
    let frame = x.frame()?;
    let (order, pos) = frame.order_poset();
    let mut back = vec![0; frame.len()];
    for (i, &k) in pos.iter().enumerate() {
        back[k] = i;
    }
    let mut out: Vec<ScottFilter> = order
        .downsets_bounded(crate::poset::MAX_FAMILY)?
        .into_iter()
        .map(|d| d.complement(order.len()))
        .filter(|up| !up.is_empty())
        .map(|up| {
            let mut members: Vec<usize> = up.iter().map(|k| back[k]).collect();
            members.sort_unstable();
            ScottFilter { members }
        })
        .filter(|f| {
            f.members
                .iter()
                .all(|&a| f.members.iter().all(|&b| f.contains(frame.meet(a, b))))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Result of comparing `Q(X)^op` with the filters of `𝒪(X)`.
#[derive(Clone, Debug)]
pub struct HofmannMislove {
    pub compacts: Vec<SubsetMask>,
    pub filters: Vec<ScottFilter>,
    /// Filter index of `{U : K ⊆ U}` for each compact `K`.
    pub correspondence: Vec<usize>,
    pub failure: Option<String>,
}

impl HofmannMislove {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that `K ↦ {U open : K ⊆ U}` is an order isomorphism from
/// saturated compacts under reverse inclusion onto filters under inclusion.
pub fn hofmann_mislove_check(x: &FiniteSpace) -> Result<HofmannMislove> {
    let frame = x.frame()?;
    let filters = scott_open_filters(x)?;
    let compacts = x.saturated_compacts();
    let mut correspondence = Vec::with_capacity(compacts.len());
    let mut failure = None;
    for &k in &compacts {
        let members: Vec<usize> = (0..frame.len())
            .filter(|&u| k.is_subset_of(frame.element(u)))
            .collect();
        match filters.iter().position(|f| f.members == members) {
            Some(i) => correspondence.push(i),
            None => {
                failure = Some(format!("neighbourhoods of {k:?} are not a listed filter"));
                break;
            }
        }
    }
    if failure.is_none() {
        let mut hit = vec![false; filters.len()];
        for &i in &correspondence {
            hit[i] = true;
        }
        if compacts.len() != filters.len() || hit.iter().any(|h| !h) {
            failure = Some(format!(
                "{} saturated compacts against {} filters",
                compacts.len(),
                filters.len()
            ));
        }
    }
    if failure.is_none() {
        'outer: for (a, &ka) in compacts.iter().enumerate() {
            for (b, &kb) in compacts.iter().enumerate() {
                let lhs = kb.is_subset_of(ka);
                let rhs = filters[correspondence[a]].is_subset_of(&filters[correspondence[b]]);
                if lhs != rhs {
                    failure = Some(format!("order not preserved between {ka:?} and {kb:?}"));
                    break 'outer;
                }
            }
        }
    }
    Ok(HofmannMislove {
        compacts,
        filters,
        correspondence,
        failure,
    })
}

/// Every subset as an intersection of elementary compacts.
#[derive(Clone, Debug)]
pub struct PatchGeneration {
    /// `(subset, elementary compacts whose intersection is the subset)`.
    pub witnesses: Vec<(SubsetMask, Vec<SubsetMask>)>,
    pub failures: Vec<SubsetMask>,
}

impl PatchGeneration {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each subset, keeps every elementary superset that shrinks the running
/// intersection; the subset is generated iff the intersection reaches it.
pub fn patch_generation_check(x: &FiniteSpace) -> PatchGeneration {
    let elementary = x.elementary_compacts();
    let full = x.carrier.full();
    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    for s in SubsetMask::all_subsets(x.len()) {
        let mut acc = full;
        let mut family = Vec::new();
        for &e in elementary.iter().filter(|&&e| s.is_subset_of(e)) {
            let next = acc.intersection(e);
            if next != acc || family.is_empty() {
                family.push(e);
                acc = next;
            }
            if acc == s {
                break;
            }
        }
        if acc == s {
            witnesses.push((s, family));
        } else {
            failures.push(s);
        }
    }
    PatchGeneration {
        witnesses,
        failures,
    }
}

/// Outcome of a family-level law check.
pub type LawCheck = std::result::Result<(), String>;

fn names_of(p: &FinitePoset, family: &[SubsetMask]) -> Vec<Vec<String>> {
    let mut v: Vec<Vec<String>> = family.iter().map(|&s| p.subset_names(s)).collect();
    v.sort();
    v
}

/// `𝒪(X⁺) = 𝒪(X) + new top` and `Q(X⁺) = Q(X) + X⁺`, the new saturated
/// compact being the least filter `{X⁺}` under Hofmann–Mislove.
pub fn one_point_laws(x: &FiniteSpace) -> Result<LawCheck> {
    let (plus, incl) = x.one_point()?;
    let pp = plus.carrier();
    let lift = |family: Vec<SubsetMask>| -> Vec<SubsetMask> {
        family
            .into_iter()
            .map(|s| SubsetMask::from_indices(s.iter().map(|i| incl.apply(i))))
            .collect()
    };
    let mut expected = lift(x.opens());
    expected.push(pp.full());
    if names_of(pp, &expected) != names_of(pp, &plus.opens()) {
        return Ok(Err("opens of X⁺ are not the opens of X plus a new top".into()));
    }
    let mut expected = lift(x.saturated_compacts());
    expected.push(pp.full());
    let q_plus = plus.saturated_compacts();
    if names_of(pp, &expected) != names_of(pp, &q_plus) {
        return Ok(Err("Q(X⁺) is not Q(X) plus one new element".into()));
    }
    if q_plus.iter().any(|&k| !k.is_subset_of(pp.full())) || !q_plus.contains(&pp.full()) {
        return Ok(Err("new saturated compact is not extremal".into()));
    }
    if x.len() < MAX_FILTER_SPACE {
        let hm = hofmann_mislove_check(&plus)?;
        let top_filter = ScottFilter {
            members: vec![plus.frame()?.top()],
        };
        if !hm.holds() || !hm.filters.iter().all(|f| top_filter.is_subset_of(f)) {
            return Ok(Err("{X⁺} is not the least filter of 𝒪(X⁺)".into()));
        }
    }
    Ok(Ok(()))
}

/// The dual swaps closed and saturated compact families, is an involution,
/// and has the same patch.
pub fn de_groot_laws(x: &FiniteSpace) -> LawCheck {
    let d = x.de_groot_dual();
    let p = x.carrier();
    let dp = d.carrier();
    if names_of(dp, &d.closed_sets()) != names_of(p, &x.saturated_compacts()) {
        return Err("closed sets of the dual are not the saturated compacts".into());
    }
    if names_of(dp, &d.saturated_compacts()) != names_of(p, &x.closed_sets()) {
        return Err("saturated compacts of the dual are not the closed sets".into());
    }
    if d.de_groot_dual() != *x {
        return Err("de Groot duality is not an involution".into());
    }
    if d.patch() != x.patch() {
        return Err("dual and original have different patch".into());
    }
    if names_of(dp, &d.elementary_compacts()) != names_of(p, &x.elementary_compacts()) {
        return Err("dual has different elementary compacts".into());
    }
    Ok(())
}

/// Summary counts for the closed / compact / elementary / patch table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceReport {
    pub points: usize,
    pub opens: usize,
    pub closed: usize,
    pub saturated_compact: usize,
    pub elementary: usize,
    pub patch_closed: usize,
    pub patch_points: usize,
}

pub fn space_report(x: &FiniteSpace) -> SpaceReport {
    let generation = patch_generation_check(x);
    SpaceReport {
        points: x.len(),
        opens: x.opens().len(),
        closed: x.closed_sets().len(),
        saturated_compact: x.saturated_compacts().len(),
        elementary: x.elementary_compacts().len(),
        patch_closed: generation.witnesses.len(),
        patch_points: x.patch().len(),
    }
}

/// Dimensions of sections over every saturated compact set, in the order of
/// [`FiniteSpace::saturated_compacts`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSheafTable {
    pub entries: Vec<(SubsetMask, usize)>,
}

impl KSheafTable {
    pub fn get(&self, k: SubsetMask) -> Option<usize> {
        self.entries.iter().find(|(m, _)| *m == k).map(|&(_, d)| d)
    }
}

/// `K ↦ dim Γ(K, F)`. Each saturated compact set is open here, so the
/// colimit over open neighbourhoods is the value at `K` itself. Rejects data
/// failing the empty-set axiom or the pullback square on a binary union.
pub fn ksheaf_value_table<T: Field>(x: &FiniteSpace, f: &VecSheaf<T>) -> Result<KSheafTable> {
    if f.space() != x.carrier() {
        return Err(Error::Invalid("sheaf lives on a different poset".into()));
    }
    let ks = x.saturated_compacts();
    let mut entries = Vec::with_capacity(ks.len());
    for &k in &ks {
        entries.push((k, f.sections(k)?.dim()));
    }
    if f.sections(SubsetMask::default())?.dim() != 0 {
        return Err(Error::Invalid("K-sheaf value on the empty set is nonzero".into()));
    }
    for (i, &a) in ks.iter().enumerate() {
        for &b in &ks[i + 1..] {
            let (w, m) = (a.union(b), a.intersection(b));
            let sq = Square::new(
                f.section_restriction(w, a)?,
                f.section_restriction(w, b)?,
                f.section_restriction(a, m)?,
                f.section_restriction(b, m)?,
            )?;
            if !bicartesian_square_check(&sq)?.is_pullback {
                return Err(Error::Invalid(format!(
                    "K-sheaf square on {:?} ∪ {:?} is not a pullback",
                    x.carrier().subset_names(a),
                    x.carrier().subset_names(b)
                )));
            }
        }
    }
    Ok(KSheafTable { entries })
}
