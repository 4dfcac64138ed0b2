use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::poset::all_posets;
use crate::{QMatrix, QSheaf, Rational};

fn q(rows: &[&[i64]], cols: usize) -> QMatrix {
    QMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
            .collect(),
        cols,
    )
    .unwrap()
}

fn opens(x: &FinitePoset) -> Vec<SubsetMask> {
    SubsetMask::all_subsets(x.len()).filter(|&s| x.is_downset(s)).collect()
}

/// Sections over `u` counted from every comparable pair, not just covers.
fn oracle_sections(f: &QSheaf, u: SubsetMask) -> usize {
    let pts: Vec<usize> = u.iter().collect();
    let mut off = vec![0; f.space().len()];
    let mut total = 0;
    for &p in &pts {
        off[p] = total;
        total += f.dim(p);
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for &p in &pts {
        for &r in &pts {
            if r != p && f.space().leq(r, p) {
                let m = f.restriction(p, r);
                for i in 0..m.rows() {
                    let mut row = vec![Rational::from_int(0); total];
                    for j in 0..m.cols() {
                        row[off[p] + j] = m.get(i, j).clone();
                    }
                    row[off[r] + i] -= Rational::from_int(1);
                    rows.push(row);
                }
            }
        }
    }
    let a = QMatrix::from_rows(rows, total).unwrap();
    total - a.rank()
}

fn small_spaces() -> Vec<FinitePoset> {
    (0..=4).flat_map(all_posets).collect()
}

#[test]
fn constant_sheaf_sections() {
    let two = FinitePoset::antichain(2);
    let f = QSheaf::constant(two.clone(), 1);
    assert_eq!(f.sections(two.full()).unwrap().dim(), 2);
    assert_eq!(f.sections(SubsetMask::default()).unwrap().dim(), 0);
    let chain = FinitePoset::chain(2);
    let g = QSheaf::constant(chain.clone(), 1);
    assert_eq!(g.sections(chain.full()).unwrap().dim(), 1);
}

#[test]
fn limit_of_cospan() {
    // a → c ← b with a = b = k, c = k, both maps identity: limit is k
    let v = FinitePoset::from_covers(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
    let (a, b, c) = (v.index_of("a").unwrap(), v.index_of("b").unwrap(), v.index_of("c").unwrap());
    let mut maps = BTreeMap::new();
    maps.insert((a, c), q(&[&[1]], 1));
    maps.insert((b, c), q(&[&[1]], 1));
    let d = PosetDiagram::new(v.clone(), Variance::Covariant, vec![1, 1, 1], maps.clone()).unwrap();
    assert_eq!(d.limit().dim(), 1);
    assert_eq!(d.colimit().dim(), 1);
    maps.insert((b, c), q(&[&[0]], 1));
    let d = PosetDiagram::new(v, Variance::Covariant, vec![1, 1, 1], maps).unwrap();
    assert_eq!(d.limit().dim(), 1);
    assert_eq!(d.colimit().dim(), 1);
}

#[test]
fn sections_match_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for x in small_spaces() {
        for _ in 0..3 {
            let f: QSheaf = random_sheaf(&mut rng, &x, RandomSpec::default());
            f.check_open(x.full()).unwrap();
            for u in opens(&x) {
                assert_eq!(f.sections(u).unwrap().dim(), oracle_sections(&f, u));
            }
        }
    }
}

#[test]
fn binary_cover_is_pullback() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for x in small_spaces() {
        let f: QSheaf = random_sheaf(&mut rng, &x, RandomSpec::default());
        let os = opens(&x);
        for &u in &os {
            for &v in &os {
                let (w, m) = (u.union(v), u.intersection(v));
                let sq = Square::new(
                    f.section_restriction(w, u).unwrap(),
                    f.section_restriction(w, v).unwrap(),
                    f.section_restriction(u, m).unwrap(),
                    f.section_restriction(v, m).unwrap(),
                )
                .unwrap();
                assert!(bicartesian_square_check(&sq).unwrap().is_pullback);
            }
        }
    }
}

#[test]
fn extension_and_pushforward_on_chain() {
    // 0 < 1: U = {0} open, C = {1} closed
    let x = FinitePoset::chain(2);
    let (lo, hi) = (0, 1);
    let u = SubsetMask::singleton(lo);
    let f = QSheaf::constant(x.clone(), 1);
    let e = extend_zero(&f.restrict_open(u).unwrap(), &x).unwrap();
    assert_eq!((e.dim(lo), e.dim(hi)), (1, 0));
    let c = SubsetMask::singleton(hi);
    let g = pushforward_closed(&f.restrict_closed(c).unwrap(), &x).unwrap();
    assert_eq!((g.dim(lo), g.dim(hi)), (0, 1));
}

#[test]
fn recollement_and_triangles_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for x in small_spaces() {
        let f: QSheaf = random_sheaf(&mut rng, &x, RandomSpec::default());
        for u in opens(&x) {
            assert!(recollement_exactness_check(&f, u).unwrap());
            assert!(adjunction_triangles_open(&f, u).unwrap());
            assert!(adjunction_triangles_closed(&f, u.complement(x.len())).unwrap());
        }
    }
}

#[test]
fn recollement_rejects_non_open() {
    let x = FinitePoset::chain(2);
    let f = QSheaf::constant(x.clone(), 1);
    assert!(recollement_exactness_check(&f, SubsetMask::singleton(1)).is_err());
}

#[test]
fn perturbed_composites_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rejected = 0;
    for x in small_spaces() {
        for _ in 0..4 {
            let d: PosetDiagram<Rational> =
                random_diagram(&mut rng, &x, Variance::Covariant, RandomSpec::default());
            if let Some(maps) = perturb_one_entry(&mut rng, &d) {
                let r = PosetDiagram::new(x.clone(), Variance::Covariant, d.dims().to_vec(), maps);
                assert!(matches!(r, Err(Error::NotFunctorial(_))));
                rejected += 1;
            }
        }
    }
    assert!(rejected > 0);
}

fn random_cube(rng: &mut ChaCha8Rng, n: usize) -> CubeDiagram<Rational> {
    let shape = FinitePoset::cube(n).unwrap();
    let spec = RandomSpec {
        max_dim: 2,
        entry_bound: 2,
    };
    CubeDiagram::new(n, random_diagram(rng, &shape, Variance::Covariant, spec)).unwrap()
}

#[test]
fn cube_criteria_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 1..=3 {
        for _ in 0..10 {
            let c = random_cube(&mut rng, n);
            assert!(CubeVerdict::compute(&c).unwrap().agree());
            let k = c.right_kan_completion().unwrap();
            let v = CubeVerdict::compute(&k).unwrap();
            assert!(v.direct && v.agree());
            let big = k.enlarge_bottom(1).unwrap();
            let v = CubeVerdict::compute(&big).unwrap();
            assert!(!v.direct && v.agree());
        }
    }
}

#[test]
fn cube_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let c = random_cube(&mut rng, 2);
    let j = CubeJson::from_cube(&c);
    let text = serde_json::to_string(&j).unwrap();
    let back: CubeJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_cube().unwrap(), c);
}

#[test]
fn cube_json_rejects_bad_composite() {
    let text = r#"{"n": 2,
        "dims": {"{}": 1, "{1}": 1, "{2}": 1, "{1,2}": 1},
        "maps": {"{}→{1}": [["1"]], "{}→{2}": [["1"]],
                 "{1}→{1,2}": [["1"]], "{2}→{1,2}": [["2"]]}}"#;
    let j: CubeJson = serde_json::from_str(text).unwrap();
    assert!(matches!(j.to_cube(), Err(Error::NotFunctorial(_))));
}

#[test]
fn square_criteria_on_random_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..200 {
        let c = random_cube(&mut rng, 2);
        let sq = Square::new(
            c.map_bits(0, 1),
            c.map_bits(0, 2),
            c.map_bits(1, 3),
            c.map_bits(2, 3),
        )
        .unwrap();
        let v = bicartesian_square_check(&sq).unwrap();
        assert_eq!(v.is_pullback, cube_cartesian_direct(&c).unwrap());
    }
}
