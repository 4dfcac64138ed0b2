//! Acceptance suite: one line per criterion, exact arithmetic throughout.
//! Each criterion runs the library check and compares against an oracle
//! computed here from first principles.

use std::time::{Duration, Instant};

use patchwork::dlattice::DistLattice;
use patchwork::frame::{enumerate_nuclei, second_iso_check};
use patchwork::kzero::{main_theorem_check, sierpinski_additivity};
use patchwork::linalg::Matrix;
use patchwork::poset::all_posets;
use patchwork::space::{hofmann_mislove_check, patch_generation_check, FiniteSpace};
use patchwork::sweep::{
    birkhoff_sweep, booleanization_sweep, cosheaf_sweep, cube_sweep, escardo_sweep, hofmann_mislove_sweep,
    k0_descent_sweep, main_theorem_sweep, one_point_sweep, recollement_sweep, second_iso_sweep, SuiteReport,
};
use patchwork::tower::{threads, Tower};
use patchwork::vsheaf::{random_diagram, random_sheaf, CubeDiagram, RandomSpec, Variance};
use patchwork::{FinitePoset, QMatrix, QSheaf, Rational, SubsetMask};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;

/// Posets on n unlabeled points, n = 0..=5.
const POSET_COUNTS: [usize; 6] = [1, 1, 2, 5, 16, 63];

fn posets(max: usize) -> Vec<FinitePoset> {
    (0..=max).flat_map(all_posets).collect()
}

fn leq_table(p: &FinitePoset) -> Vec<Vec<bool>> {
    (0..p.len()).map(|a| (0..p.len()).map(|b| p.leq(a, b)).collect()).collect()
}

/// Down-closed subsets straight from the order relation.
fn oracle_downsets(p: &FinitePoset) -> Vec<u64> {
    let n = p.len();
    (0..1u64 << n)
        .filter(|s| {
            (0..n).all(|i| s >> i & 1 == 0 || (0..n).all(|j| !p.leq(j, i) || s >> j & 1 == 1))
        })
        .collect()
}

fn oracle_upsets(p: &FinitePoset) -> Vec<u64> {
    let n = p.len();
    (0..1u64 << n)
        .filter(|s| {
            (0..n).all(|i| s >> i & 1 == 0 || (0..n).all(|j| !p.leq(i, j) || s >> j & 1 == 1))
        })
        .collect()
}

/// Isomorphism of order tables by trying every bijection.
fn brute_iso(a: &[Vec<bool>], b: &[Vec<bool>]) -> bool {
    fn go(a: &[Vec<bool>], b: &[Vec<bool>], perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let k = perm.len();
        if k == a.len() {
            return true;
        }
        for t in 0..b.len() {
            if used[t] {
                continue;
            }
            if (0..k).all(|i| a[i][k] == b[perm[i]][t] && a[k][i] == b[t][perm[i]]) && a[k][k] == b[t][t] {
                perm.push(t);
                used[t] = true;
                if go(a, b, perm, used) {
                    return true;
                }
                perm.pop();
                used[t] = false;
            }
        }
        false
    }
    a.len() == b.len() && go(a, b, &mut Vec::new(), &mut vec![false; b.len()])
}

fn lattice_table(l: &DistLattice) -> Vec<Vec<bool>> {
    (0..l.len()).map(|a| (0..l.len()).map(|b| l.leq(a, b)).collect()).collect()
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn from_report(r: &SuiteReport) -> Result<(), String> {
    if r.passed() {
        Ok(())
    } else {
        Err(format!("{} failed on {}", r.suite, r.failures[0]))
    }
}

fn criterion_1() -> Outcome {
    let mut fails = Vec::new();
    for (n, &count) in POSET_COUNTS.iter().enumerate() {
        if all_posets(n).len() != count {
            fails.push(format!("{} posets on {n} points, expected {count}", all_posets(n).len()));
        }
    }
    let ps = posets(5);
    for p in &ps {
        let j = DistLattice::downset_lattice(p).unwrap().join_irreducibles().unwrap();
        if !brute_iso(&leq_table(&j), &leq_table(p)) {
            fails.push(format!("J(D(P)) differs for {:?}", p.names()));
        }
    }
    let r = birkhoff_sweep(5).unwrap();
    if let Err(e) = from_report(&r) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{} posets; {}", ps.len(), fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_2() -> Outcome {
    let mut fails = Vec::new();
    for p in posets(5) {
        let (b, _) = DistLattice::downset_lattice(&p).unwrap().booleanize().unwrap();
        // the discrete poset on |P| points has the power set as its downsets
        let n = p.len();
        let power: Vec<Vec<bool>> = (0..1u64 << n)
            .map(|a| (0..1u64 << n).map(|c| a & !c == 0).collect())
            .collect();
        if !brute_iso_lattice(&lattice_table(&b), &power) {
            fails.push(format!("booleanization of {:?}", p.names()));
        }
    }
    let cube = FinitePoset::cube(3).unwrap();
    let oracle = oracle_downsets(&cube).len();
    let free = DistLattice::free_bounded(3).unwrap().len();
    if free != 20 || oracle != 20 {
        fails.push(format!("free_bounded(3) = {free}, downsets of the 3-cube = {oracle}"));
    }
    if let Err(e) = from_report(&booleanization_sweep(5).unwrap()) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("free_bounded(3) = {free}; {}", fails.first().cloned().unwrap_or_default()),
    }
}

/// Boolean lattices are determined by size; compare sizes and check every
/// element has a complement.
fn brute_iso_lattice(a: &[Vec<bool>], power: &[Vec<bool>]) -> bool {
    if a.len() != power.len() {
        return false;
    }
    let n = a.len();
    let bot = (0..n).find(|&i| (0..n).all(|j| a[i][j])).unwrap();
    let top = (0..n).find(|&i| (0..n).all(|j| a[j][i])).unwrap();
    let meet_is = |x: usize, y: usize, m: usize| {
        a[m][x] && a[m][y] && (0..n).all(|z| !(a[z][x] && a[z][y]) || a[z][m])
    };
    let join_is = |x: usize, y: usize, j: usize| {
        a[x][j] && a[y][j] && (0..n).all(|z| !(a[x][z] && a[y][z]) || a[j][z])
    };
    (0..n).all(|x| (0..n).any(|y| meet_is(x, y, bot) && join_is(x, y, top)))
}

fn criterion_3() -> Outcome {
    let mut fails = Vec::new();
    for p in posets(5) {
        let x = FiniteSpace::new(p.clone());
        let hm = hofmann_mislove_check(&x).unwrap();
        // every filter of a finite lattice is principal: one per open
        let opens = oracle_downsets(&p).len();
        if hm.filters.len() != opens || hm.compacts.len() != opens || !hm.holds() {
            fails.push(format!("{:?}: {} filters, {opens} opens", p.names(), hm.filters.len()));
        }
    }
    if let Err(e) = from_report(&hofmann_mislove_sweep(5).unwrap()) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: fails.first().cloned().unwrap_or_default(),
    }
}

fn criterion_4() -> Outcome {
    let mut fails = Vec::new();
    let mut witnessed = 0;
    for p in posets(5) {
        let ups = oracle_upsets(&p);
        let downs = oracle_downsets(&p);
        let elementary = |e: u64| ups.iter().any(|&u| downs.iter().any(|&d| u | d == e));
        let g = patch_generation_check(&FiniteSpace::new(p.clone()));
        if !g.holds() {
            fails.push(format!("{:?} has ungenerated subsets", p.names()));
        }
        for (s, family) in &g.witnesses {
            witnessed += 1;
            let meet = family.iter().fold((1u64 << p.len()) - 1, |acc, e| acc & e.bits());
            if meet != s.bits() || !family.iter().all(|e| elementary(e.bits())) {
                fails.push(format!("bad witness for {:?} in {:?}", p.subset_names(*s), p.names()));
            }
        }
        if g.witnesses.len() != 1 << p.len() {
            fails.push(format!("{:?}: {} witnesses", p.names(), g.witnesses.len()));
        }
    }
    if let Err(e) = from_report(&escardo_sweep(5).unwrap()) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{witnessed} subsets witnessed; {}", fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_5() -> Outcome {
    let mut fails = Vec::new();
    let mut triples = 0;
    for p in posets(4) {
        let f = DistLattice::downset_lattice(&p).unwrap();
        let nuclei = enumerate_nuclei(&f).unwrap();
        // nuclei of a finite frame correspond to subsets of its join-irreducibles
        if nuclei.len() != 1 << p.len() {
            fails.push(format!("{:?}: {} nuclei", p.names(), nuclei.len()));
        }
        for n in &nuclei {
            for u in 0..f.len() {
                triples += 1;
                if !second_iso_check(n, u).holds() {
                    fails.push(format!("{:?}: nucleus {:?} open {}", p.names(), n.table(), f.label(u)));
                }
            }
        }
    }
    if let Err(e) = from_report(&second_iso_sweep(4).unwrap()) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{triples} triples; {}", fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_6() -> Outcome {
    let mut fails = Vec::new();
    for p in posets(5) {
        let x = FiniteSpace::new(p.clone());
        let (plus, _) = x.one_point().unwrap();
        let pp = plus.carrier();
        if oracle_downsets(pp).len() != oracle_downsets(&p).len() + 1 {
            fails.push(format!("opens of X⁺ for {:?}", p.names()));
        }
        if plus.saturated_compacts().len() != x.saturated_compacts().len() + 1 {
            fails.push(format!("Q(X⁺) for {:?}", p.names()));
        }
        // the dual's closed sets are X's saturated compacts and vice versa, by name
        let d = x.de_groot_dual();
        let by_name = |fam: Vec<SubsetMask>| -> Vec<u64> {
            let mut v: Vec<u64> = fam.iter().map(|s| d.carrier().transport(*s, &p).unwrap().bits()).collect();
            v.sort();
            v
        };
        if by_name(d.closed_sets()) != oracle_downsets(&p)
            || by_name(d.saturated_compacts()) != oracle_upsets(&p)
            || d.de_groot_dual() != x
            || d.patch().carrier().len() != x.patch().carrier().len()
            || d.patch().opens().len() != 1 << p.len()
        {
            fails.push(format!("de Groot dual of {:?}", p.names()));
        }
    }
    if let Err(e) = from_report(&one_point_sweep(5).unwrap()) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: fails.first().cloned().unwrap_or_default(),
    }
}

/// `F(∅)` against the limit of the punctured cube, from the compatibility
/// equations over every comparable pair.
fn oracle_cube_cartesian(c: &CubeDiagram<Rational>) -> bool {
    let n = c.n();
    let verts: Vec<u64> = (1..1u64 << n).collect();
    let mut off = std::collections::BTreeMap::new();
    let mut total = 0;
    for &v in &verts {
        off.insert(v, total);
        total += c.dim_at(v);
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for &a in &verts {
        for &b in &verts {
            if a != b && a & !b == 0 {
                let m = c.map_bits(a, b);
                for i in 0..m.rows() {
                    let mut row = vec![Rational::from_integer(0.into()); total];
                    for j in 0..m.cols() {
                        row[off[&a] + j] = m.get(i, j).clone();
                    }
                    row[off[&b] + i] -= Rational::from_integer(1.into());
                    rows.push(row);
                }
            }
        }
    }
    let lim = total - QMatrix::from_rows(rows, total).unwrap().rank();
    let d0 = c.dim_at(0);
    let legs: Vec<QMatrix> = verts.iter().map(|&v| c.map_bits(0, v)).collect();
    let refs: Vec<&QMatrix> = legs.iter().collect();
    let stacked = Matrix::vstack(d0, &refs);
    d0 == lim && stacked.rank() == d0
}

fn criterion_7() -> Outcome {
    let mut fails = Vec::new();
    let mut cubes = 0;
    let spec = RandomSpec {
        max_dim: 4,
        entry_bound: 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for n in [2usize, 3, 4] {
        let shape = FinitePoset::cube(n).unwrap();
        for k in 0..200 {
            cubes += 1;
            let c = CubeDiagram::new(n, random_diagram(&mut rng, &shape, Variance::Covariant, spec)).unwrap();
            let direct = patchwork::vsheaf::cube_cartesian_direct(&c).unwrap();
            let recursive: Vec<bool> = (1..=n)
                .map(|i| patchwork::vsheaf::cube_cartesian_recursive(&c, i).unwrap())
                .collect();
            if recursive.iter().any(|&r| r != direct) || direct != oracle_cube_cartesian(&c) {
                fails.push(format!("n={n} cube {k}: direct {direct}, recursive {recursive:?}"));
            }
            let lim = c.right_kan_completion().unwrap();
            if !patchwork::vsheaf::cube_cartesian_direct(&lim).unwrap() || !oracle_cube_cartesian(&lim) {
                fails.push(format!("n={n} cube {k}: constructed limit rejected"));
            }
            let big = lim.enlarge_bottom(1).unwrap();
            let rec_big = (1..=n).any(|i| patchwork::vsheaf::cube_cartesian_recursive(&big, i).unwrap());
            if patchwork::vsheaf::cube_cartesian_direct(&big).unwrap() || rec_big || oracle_cube_cartesian(&big) {
                fails.push(format!("n={n} cube {k}: perturbed cube accepted"));
            }
        }
    }
    if let Err(e) = from_report(&cube_sweep(SEED, 20, &[2, 3], 3).unwrap()) {
        fails.push(e);
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{cubes} cubes; {}", fails.first().cloned().unwrap_or_default()),
    }
}

/// `dim Γ(S)` from the compatibility equations over every comparable pair.
fn oracle_sections(f: &QSheaf, s: u64) -> usize {
    let p = f.space();
    let pts: Vec<usize> = (0..p.len()).filter(|i| s >> i & 1 == 1).collect();
    let mut off = vec![0; p.len()];
    let mut total = 0;
    for &q in &pts {
        off[q] = total;
        total += f.dim(q);
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for &hi in &pts {
        for &lo in &pts {
            if lo != hi && p.leq(lo, hi) {
                let m = f.restriction(hi, lo);
                for i in 0..m.rows() {
                    let mut row = vec![Rational::from_integer(0.into()); total];
                    for j in 0..m.cols() {
                        row[off[hi] + j] = m.get(i, j).clone();
                    }
                    row[off[lo] + i] -= Rational::from_integer(1.into());
                    rows.push(row);
                }
            }
        }
    }
    total - QMatrix::from_rows(rows, total).unwrap().rank()
}

fn criterion_8() -> Outcome {
    let mut fails = Vec::new();
    let r = recollement_sweep(SEED, 100, 4).unwrap();
    if let Err(e) = from_report(&r) {
        fails.push(e);
    }
    // pointwise ranks: dim F(p) = [p ∈ U]·dim F(p) + dim Γ(C ∩ ↓p)
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for p in posets(4) {
        let n = p.len();
        for _ in 0..5 {
            let f: QSheaf = random_sheaf(&mut rng, &p, RandomSpec::default());
            for u in oracle_downsets(&p) {
                let c = !u & ((1u64 << n) - 1);
                for q in 0..n {
                    let below: u64 = (0..n).filter(|&j| p.leq(j, q)).map(|j| 1u64 << j).sum();
                    let closed_part = oracle_sections(&f, c & below);
                    let open_part = if u >> q & 1 == 1 { f.dim(q) } else { 0 };
                    let expected = if u >> q & 1 == 1 { 0 } else { f.dim(q) };
                    if open_part + closed_part != f.dim(q) || closed_part != expected {
                        fails.push(format!("ranks at {} for open {u:b} in {:?}", p.name(q), p.names()));
                    }
                }
            }
        }
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{} cases; {}", r.cases, fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_9() -> Outcome {
    let r = k0_descent_sweep(5).unwrap();
    let mut fails = Vec::new();
    if let Err(e) = from_report(&r) {
        fails.push(e);
    }
    // pairs counted independently: 4^n per poset plus the induction replays
    let pairs: usize = posets(5).iter().map(|p| 1usize << (2 * p.len())).sum();
    if r.cases < pairs {
        fails.push(format!("{} cases for {pairs} pairs", r.cases));
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{} cases over {pairs} pairs; {}", r.cases, fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_10() -> Outcome {
    let r = cosheaf_sweep(4).unwrap();
    let mut fails = Vec::new();
    if let Err(e) = from_report(&r) {
        fails.push(e);
    }
    let subsets: usize = posets(4).iter().map(|p| 1usize << p.len()).sum();
    if r.cases != subsets {
        fails.push(format!("{} cases for {subsets} subsets", r.cases));
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{subsets} subsets; {}", fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_11() -> Outcome {
    let mut fails = Vec::new();
    let r = main_theorem_sweep(5, 2).unwrap();
    if let Err(e) = from_report(&r) {
        fails.push(e);
    }
    // ranks on both sides against point and thread counts
    let cases: Vec<(Tower, usize)> = (0..=4)
        .flat_map(|d| {
            [
                (Tower::cantor(d).unwrap(), 1usize << d),
                (Tower::dyadic_chain(d).unwrap(), (1usize << d) + 1),
            ]
        })
        .collect();
    for (t, expected) in &cases {
        let d = t.depth();
        let m = main_theorem_check(t, d).unwrap();
        let th = threads(&t.patch(), d).unwrap().len();
        let th_plus = threads(&t.one_point().unwrap().patch(), d).unwrap().len();
        if !m.verdict
            || m.compact.k0_rank != *expected
            || m.compact.patch_rank != th
            || th != *expected
            || m.compactly_supported.k0_rank != th_plus - 1
            || m.compactly_supported.patch_rank != *expected
        {
            fails.push(format!("depth {d}: {m:?}"));
        }
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("{} tower depths; {}", r.cases + cases.len(), fails.first().cloned().unwrap_or_default()),
    }
}

fn criterion_12() -> Outcome {
    let r = sierpinski_additivity(4).unwrap();
    let mut fails = Vec::new();
    for &((m, n), got) in &r.samples {
        if got != (m as i64, (m + n) as i64) {
            fails.push(format!("({m},{n}) ↦ {got:?}"));
        }
    }
    // det [[1,0],[1,1]] = 1 and the patch of 𝐒 has two points
    let det = r.matrix[0][0] * r.matrix[1][1] - r.matrix[0][1] * r.matrix[1][0];
    if r.matrix != [[1, 0], [1, 1]] || det != 1 || !r.verdict {
        fails.push(format!("matrix {:?}", r.matrix));
    }
    let patch = FinitePoset::chain(2).discretization();
    if SubsetMask::all_subsets(patch.len()).count() != 4 {
        fails.push("patch of 𝐒 is not 2^disc".into());
    }
    Outcome {
        ok: fails.is_empty(),
        detail: format!("(m,n) ↦ (m, m+n) on {} samples; {}", r.samples.len(), fails.first().cloned().unwrap_or_default()),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 12] = [
        ("Birkhoff/Stone round trip", criterion_1, Duration::from_secs(10)),
        ("patch via Booleanization", criterion_2, Duration::from_secs(10)),
        ("Hofmann-Mislove", criterion_3, Duration::from_secs(30)),
        ("Escardo generation", criterion_4, Duration::from_secs(30)),
        ("second isomorphism theorem", criterion_5, Duration::from_secs(120)),
        ("one-point and de Groot laws", criterion_6, Duration::from_secs(10)),
        ("cube criterion", criterion_7, Duration::from_secs(60)),
        ("recollement exactness", criterion_8, Duration::from_secs(60)),
        ("K0 perfect descent", criterion_9, Duration::from_secs(120)),
        ("cosheaf extension", criterion_10, Duration::from_secs(60)),
        ("main theorem at K0", criterion_11, Duration::from_secs(60)),
        ("Sierpinski additivity", criterion_12, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, bound)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.ok && took <= *bound;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} in {:.2?} (bound {:?}) {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            took,
            bound,
            out.detail.trim_end_matches("; ")
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
