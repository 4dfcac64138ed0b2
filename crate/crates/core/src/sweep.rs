//! Exhaustive and seeded verification suites.
//!
//! Work items are checked in parallel; results are collected in item order,
//! so a report depends only on its parameters and seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dlattice::DistLattice;
use crate::error::Result;
use crate::frame::{enumerate_nuclei, second_iso_check};
use crate::kzero::{
    cosheaf_extension_check, descent_square_check, elementary_induction_check, flasque_sheaf,
    main_theorem_check, nisnevich_square_check, open_closed_k0_exactness, sierpinski_additivity,
    verdier_k0_check,
};
use crate::poset::{all_posets, FinitePoset, MonotoneMap, SubsetMask};
use crate::space::{de_groot_laws, hofmann_mislove_check, one_point_laws, patch_generation_check, FiniteSpace};
use crate::tower::Tower;
use crate::vsheaf::{
    random_diagram, random_sheaf, recollement_exactness_check, CubeDiagram, CubeVerdict, RandomSpec, Variance,
};
use crate::{QSheaf, Rational};

/// `{suite, cases, failures}`; each failure names its counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-item case counts and failures, merged in item order.
fn run<I: Sync>(
    suite: &str,
    items: &[I],
    check: impl Fn(&I) -> Result<(usize, Vec<String>)> + Sync,
) -> Result<SuiteReport> {
    let parts = items.par_iter().map(&check).collect::<Vec<_>>();
    let mut cases = 0;
    let mut failures = Vec::new();
    for p in parts {
        let (c, f) = p?;
        cases += c;
        failures.extend(f);
    }
    Ok(SuiteReport {
        suite: suite.to_string(),
        cases,
        failures,
    })
}

/// All posets with at most `n` elements, one per isomorphism class.
pub fn posets_upto(n: usize) -> Vec<FinitePoset> {
    (0..=n).flat_map(all_posets).collect()
}

pub fn describe(p: &FinitePoset) -> String {
    serde_json::to_string(&p.to_json()).expect("poset json")
}

fn subset(p: &FinitePoset, s: SubsetMask) -> String {
    format!("{{{}}}", p.subset_names(s).join(","))
}

/// Distinct seeds per work item, derived from the suite seed.
fn item_rng(seed: u64, item: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (item as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn birkhoff_sweep(max_size: usize) -> Result<SuiteReport> {
    run("birkhoff", &posets_upto(max_size), |p| {
        let j = DistLattice::downset_lattice(p)?.join_irreducibles()?;
        let ok = FinitePoset::is_isomorphic(&j, p);
        Ok((1, if ok { vec![] } else { vec![describe(p)] }))
    })
}

pub fn booleanization_sweep(max_size: usize) -> Result<SuiteReport> {
    run("booleanization", &posets_upto(max_size), |p| {
        let (b, _) = DistLattice::downset_lattice(p)?.booleanize()?;
        let patch = DistLattice::downset_lattice(&FiniteSpace::new(p.clone()).patch().carrier().clone())?;
        let ok = DistLattice::is_isomorphic(&b, &patch);
        Ok((1, if ok { vec![] } else { vec![describe(p)] }))
    })
}

pub fn hofmann_mislove_sweep(max_size: usize) -> Result<SuiteReport> {
    run("hofmann-mislove", &posets_upto(max_size), |p| {
        let hm = hofmann_mislove_check(&FiniteSpace::new(p.clone()))?;
        Ok((1, if hm.holds() { vec![] } else { vec![describe(p)] }))
    })
}

pub fn escardo_sweep(max_size: usize) -> Result<SuiteReport> {
    run("escardo-generation", &posets_upto(max_size), |p| {
        let g = patch_generation_check(&FiniteSpace::new(p.clone()));
        let fails = g
            .failures
            .iter()
            .map(|&s| format!("{} in {}", subset(p, s), describe(p)))
            .collect();
        Ok((g.witnesses.len() + g.failures.len(), fails))
    })
}

pub fn second_iso_sweep(max_size: usize) -> Result<SuiteReport> {
    run("second-iso", &posets_upto(max_size), |p| {
        let f = DistLattice::downset_lattice(p)?;
        let mut cases = 0;
        let mut fails = Vec::new();
        for n in enumerate_nuclei(&f)? {
            for u in 0..f.len() {
                cases += 1;
                let r = second_iso_check(&n, u);
                if !r.holds() {
                    fails.push(format!("nucleus {:?}, open {} in {}", n.table(), f.label(u), describe(p)));
                }
            }
        }
        Ok((cases, fails))
    })
}

pub fn one_point_sweep(max_size: usize) -> Result<SuiteReport> {
    run("one-point-de-groot", &posets_upto(max_size), |p| {
        let x = FiniteSpace::new(p.clone());
        let mut fails = Vec::new();
        if let Err(e) = one_point_laws(&x)? {
            fails.push(format!("{e}: {}", describe(p)));
        }
        if let Err(e) = de_groot_laws(&x) {
            fails.push(format!("{e}: {}", describe(p)));
        }
        Ok((2, fails))
    })
}

/// Random cubes per dimension: agreement of the two criteria, constructed
/// limits pass, enlarged bottoms fail.
pub fn cube_sweep(seed: u64, per_n: usize, dims: &[usize], max_dim: usize) -> Result<SuiteReport> {
    let items: Vec<(usize, usize)> = dims
        .iter()
        .flat_map(|&n| (0..per_n).map(move |k| (n, k)))
        .collect();
    run("cube-criterion", &items, |&(n, k)| {
        let mut rng = item_rng(seed, n * 1_000_003 + k);
        let spec = RandomSpec {
            max_dim,
            entry_bound: 2,
        };
        let shape = FinitePoset::cube(n)?;
        let c = CubeDiagram::new(n, random_diagram::<Rational, _>(&mut rng, &shape, Variance::Covariant, spec))?;
        let mut fails = Vec::new();
        if !CubeVerdict::compute(&c)?.agree() {
            fails.push(format!("n={n} cube {k}: criteria disagree"));
        }
        let lim = c.right_kan_completion()?;
        let v = CubeVerdict::compute(&lim)?;
        if !(v.direct && v.agree()) {
            fails.push(format!("n={n} cube {k}: constructed limit rejected"));
        }
        let big = lim.enlarge_bottom(1)?;
        let v = CubeVerdict::compute(&big)?;
        if v.direct || !v.agree() {
            fails.push(format!("n={n} cube {k}: perturbed cube accepted"));
        }
        Ok((3, fails))
    })
}

pub fn recollement_sweep(seed: u64, per_poset: usize, max_size: usize) -> Result<SuiteReport> {
    let posets = posets_upto(max_size);
    let items: Vec<usize> = (0..posets.len()).collect();
    run("recollement", &items, |&i| {
        let p = &posets[i];
        let mut rng = item_rng(seed, i);
        let opens: Vec<SubsetMask> = SubsetMask::all_subsets(p.len()).filter(|&s| p.is_downset(s)).collect();
        let mut cases = 0;
        let mut fails = Vec::new();
        for k in 0..per_poset {
            let f: QSheaf = random_sheaf(&mut rng, p, RandomSpec::default());
            for &u in &opens {
                cases += 1;
                if !recollement_exactness_check(&f, u)? {
                    fails.push(format!("sheaf {k}, open {} in {}", subset(p, u), describe(p)));
                }
            }
        }
        Ok((cases, fails))
    })
}

/// Largest up-set and largest down-set inside `e`; `e` is elementary iff
/// they cover it.
fn elementary_split(p: &FinitePoset, e: SubsetMask) -> Option<(SubsetMask, SubsetMask)> {
    let c = SubsetMask::from_indices(e.iter().filter(|&i| p.above(i).is_subset_of(e)));
    let s = SubsetMask::from_indices(e.iter().filter(|&i| p.below(i).is_subset_of(e)));
    (c.union(s) == e).then_some((s, c))
}

/// Every pair of subsets; when the second is elementary the verdict is
/// replayed through the induction.
pub fn k0_descent_sweep(max_size: usize) -> Result<SuiteReport> {
    run("k0-descent", &posets_upto(max_size), |p| {
        let n = p.len();
        let mut cases = 0;
        let mut fails = Vec::new();
        for k in SubsetMask::all_subsets(n) {
            for l in SubsetMask::all_subsets(n) {
                cases += 1;
                let direct = descent_square_check(p, k, l)?;
                if !direct.verdict {
                    fails.push(format!("{} in {}", direct.label, describe(p)));
                }
                if let Some((s, c)) = elementary_split(p, l) {
                    cases += 1;
                    let ind = elementary_induction_check(p, k, s, c)?;
                    if ind.verdict != direct.verdict {
                        fails.push(format!("induction differs on {} in {}", direct.label, describe(p)));
                    }
                }
            }
        }
        for u in SubsetMask::all_subsets(n).filter(|&u| p.is_downset(u)) {
            cases += 1;
            if !open_closed_k0_exactness(p, u)?.verdict {
                fails.push(format!("open-closed sequence for {} in {}", subset(p, u), describe(p)));
            }
        }
        Ok((cases, fails))
    })
}

pub fn cosheaf_sweep(max_size: usize) -> Result<SuiteReport> {
    run("cosheaf-extension", &posets_upto(max_size), |p| {
        let r = cosheaf_extension_check(&FiniteSpace::new(p.clone()))?;
        let mut fails: Vec<String> = r
            .failures
            .iter()
            .map(|&k| format!("extension at {} in {}", subset(p, k), describe(p)))
            .collect();
        fails.extend(
            r.hypothesis_failures
                .iter()
                .map(|&(a, b)| format!("hypothesis at ({}, {}) in {}", subset(p, a), subset(p, b), describe(p))),
        );
        Ok((r.values.len(), fails))
    })
}

/// Every depth up to `depth`, on the given tower.
pub fn main_theorem_on(t: &Tower, name: &str, depth: usize) -> Result<(usize, Vec<String>)> {
    let mut fails = Vec::new();
    for d in 0..=depth.min(t.depth()) {
        let r = main_theorem_check(t, d)?;
        if !r.verdict {
            fails.push(format!("{name} at depth {d}: {r:?}"));
        }
    }
    Ok((depth.min(t.depth()) + 1, fails))
}

/// Constant towers on every poset up to `max_size` and the Cantor and
/// dyadic towers, each at every depth up to `depth`.
pub fn main_theorem_sweep(max_size: usize, depth: usize) -> Result<SuiteReport> {
    let mut towers: Vec<(String, Tower)> = posets_upto(max_size)
        .into_iter()
        .map(|p| (format!("constant {}", describe(&p)), Tower::constant(&p, depth)))
        .collect();
    towers.push((format!("cantor({depth})"), Tower::cantor(depth)?));
    towers.push((format!("dyadic({depth})"), Tower::dyadic_chain(depth)?));
    run("main-theorem", &towers, |(name, t)| main_theorem_on(t, name, depth))
}

/// Flasque sheaves with random point multiplicities, plus the constant
/// sheaf where its restrictions are onto.
pub fn verdier_sweep(seed: u64, max_size: usize) -> Result<SuiteReport> {
    let posets = posets_upto(max_size);
    let items: Vec<usize> = (0..posets.len()).collect();
    run("verdier", &items, |&i| {
        use rand::Rng;
        let p = &posets[i];
        let mut rng = item_rng(seed, i);
        let mut cases = 0;
        let mut fails = Vec::new();
        for k in 0..3 {
            let e: Vec<usize> = (0..p.len()).map(|_| rng.gen_range(0..=2)).collect();
            let f: QSheaf = flasque_sheaf(p, &e)?;
            let r = verdier_k0_check(&f, &e)?;
            cases += 1;
            if r.skipped.is_some() || !r.verdict {
                fails.push(format!("flasque sheaf {k} with multiplicities {e:?} in {}", describe(p)));
            }
        }
        Ok((cases, fails))
    })
}

/// Every monotone map between posets of at most `max_size` points and every
/// up-set of the target for which the map is an isomorphism off it.
pub fn nisnevich_sweep(max_size: usize) -> Result<SuiteReport> {
    let posets = posets_upto(max_size);
    let pairs: Vec<(usize, usize)> = (0..posets.len())
        .flat_map(|a| (0..posets.len()).map(move |b| (a, b)))
        .collect();
    run("nisnevich", &pairs, |&(a, b)| {
        let (y, x) = (&posets[a], &posets[b]);
        let mut cases = 0;
        let mut fails = Vec::new();
        if x.is_empty() && !y.is_empty() {
            return Ok((0, fails));
        }
        let total = x.len().pow(y.len() as u32);
        for code in 0..total {
            let mut c = code;
            let img: Vec<usize> = (0..y.len())
                .map(|_| {
                    let v = c % x.len();
                    c /= x.len();
                    v
                })
                .collect();
            let Ok(f) = MonotoneMap::new(y.clone(), x.clone(), img.clone()) else {
                continue;
            };
            for cl in SubsetMask::all_subsets(x.len()).filter(|&s| x.is_upset(s)) {
                if let Some(r) = nisnevich_square_check(&f, cl)? {
                    cases += 1;
                    if !r.verdict {
                        fails.push(format!("{} along {img:?} from {} to {}", r.label, describe(y), describe(x)));
                    }
                }
            }
        }
        Ok((cases, fails))
    })
}

pub fn sierpinski_suite(bound: usize) -> Result<SuiteReport> {
    let r = sierpinski_additivity(bound)?;
    Ok(SuiteReport {
        suite: "sierpinski-additivity".into(),
        cases: r.samples.len(),
        failures: if r.verdict {
            vec![]
        } else {
            vec![format!("{r:?}")]
        },
    })
}
