//! Sequential towers of finite posets, standing in for coherent spaces.
//!
//! Level `i + 1` maps to level `i`. Nothing here pretends to compute the
//! inverse limit itself: every query takes a depth and answers exactly for
//! the truncation at that depth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{FinitePoset, MonotoneMap, PosetJson};
use crate::space::FiniteSpace;
use crate::ZMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Tower {
    levels: Vec<FinitePoset>,
    /// `transitions[i] : levels[i + 1] → levels[i]`.
    transitions: Vec<MonotoneMap>,
}

/// `{"levels": [<poset>...], "transitions": [[img...], ...]}`; `img[k]` is
/// the position, in level `i`'s `names` list, of the image of the `k`-th
/// name of level `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerJson {
    pub levels: Vec<PosetJson>,
    pub transitions: Vec<Vec<usize>>,
}

fn binary_words(k: usize) -> Vec<String> {
    if k == 0 {
        return vec!["*".to_string()];
    }
    (0..1usize << k)
        .map(|w| format!("{w:0k$b}"))
        .collect()
}

impl Tower {
    /// Checks that every transition runs from level `i + 1` to level `i`.
    pub fn new(levels: Vec<FinitePoset>, transitions: Vec<MonotoneMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("a tower needs at least one level".into()));
        }
        if transitions.len() + 1 != levels.len() {
            return Err(Error::Invalid(format!(
                "{} levels need {} transitions, got {}",
                levels.len(),
                levels.len() - 1,
                transitions.len()
            )));
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.src() != &levels[i + 1] || t.dst() != &levels[i] {
                return Err(Error::Invalid(format!("transition {i} has the wrong endpoints")));
            }
        }
        Ok(Tower { levels, transitions })
    }

    /// Transitions given by image indices; non-monotone images are rejected.
    pub fn from_images(levels: Vec<FinitePoset>, images: Vec<Vec<usize>>) -> Result<Self> {
        if images.len() + 1 != levels.len() {
            return Err(Error::Invalid(format!(
                "{} levels need {} transitions, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                images.len()
            )));
        }
        let transitions = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| MonotoneMap::new(levels[i + 1].clone(), levels[i].clone(), img))
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels, transitions)
    }

    /// Discrete levels of `2^k` binary words, truncating the last letter.
    pub fn cantor(d: usize) -> Result<Self> {
        let levels: Vec<FinitePoset> = (0..=d).map(|k| FinitePoset::discrete(binary_words(k))).collect();
        let images = (0..d)
            .map(|k| {
                let (src, dst) = (&levels[k + 1], &levels[k]);
                (0..src.len())
                    .map(|i| {
                        let w = src.name(i);
                        let parent = if k == 0 { "*" } else { &w[..k] };
                        dst.index_of(parent).expect("parent word")
                    })
                    .collect()
            })
            .collect();
        Self::from_images(levels, images)
    }

    /// Chains of `2^k + 1` points `j/2^k`, with `j ↦ ⌊j/2⌋` merging each new
    /// midpoint into its left neighbour.
    pub fn dyadic_chain(d: usize) -> Result<Self> {
        let level = |k: usize| {
            let n = (1usize << k) + 1;
            let names: Vec<String> = (0..n).map(|j| format!("{j}/{}", 1usize << k)).collect();
            let covers: Vec<(String, String)> = (1..n).map(|j| (names[j - 1].clone(), names[j].clone())).collect();
            FinitePoset::from_covers(&names, &covers)
        };
        let levels = (0..=d).map(level).collect::<Result<Vec<_>>>()?;
        let images = (0..d)
            .map(|k| {
                let (src, dst) = (&levels[k + 1], &levels[k]);
                (0..src.len())
                    .map(|i| {
                        let j: usize = src.name(i).split('/').next().unwrap().parse().unwrap();
                        dst.index_of(&format!("{}/{}", j / 2, 1usize << k)).expect("dyadic point")
                    })
                    .collect()
            })
            .collect();
        Self::from_images(levels, images)
    }

    /// `d + 1` copies of `p` with identity transitions.
    pub fn constant(p: &FinitePoset, d: usize) -> Self {
        Tower {
            levels: vec![p.clone(); d + 1],
            transitions: vec![MonotoneMap::identity(p); d],
        }
    }

    pub fn from_json(json: &TowerJson) -> Result<Self> {
        let levels = json
            .levels
            .iter()
            .map(FinitePoset::from_json)
            .collect::<Result<Vec<_>>>()?;
        if json.transitions.len() + 1 != levels.len() {
            return Err(Error::Invalid(format!(
                "{} levels need {} transitions, got {}",
                levels.len(),
                levels.len().saturating_sub(1),
                json.transitions.len()
            )));
        }
        let mut images = Vec::new();
        for (i, img) in json.transitions.iter().enumerate() {
            let (src, dst) = (&json.levels[i + 1], &json.levels[i]);
            if img.len() != src.names.len() {
                return Err(Error::Invalid(format!(
                    "transition {i} has {} entries for {} points",
                    img.len(),
                    src.names.len()
                )));
            }
            let mut canon = vec![0; src.names.len()];
            for (k, &t) in img.iter().enumerate() {
                let target = dst.names.get(t).ok_or(Error::IndexOutOfRange {
                    index: t,
                    len: dst.names.len(),
                })?;
                canon[levels[i + 1].index_of(&src.names[k]).unwrap()] = levels[i].index_of(target).unwrap();
            }
            images.push(canon);
        }
        Self::from_images(levels, images)
    }

    pub fn to_json(&self) -> TowerJson {
        TowerJson {
            levels: self.levels.iter().map(FinitePoset::to_json).collect(),
            transitions: self.transitions.iter().map(|t| t.image().to_vec()).collect(),
        }
    }

    /// Index of the deepest level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[FinitePoset] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &FinitePoset {
        &self.levels[i]
    }

    pub fn transitions(&self) -> &[MonotoneMap] {
        &self.transitions
    }

    fn check_depth(&self, d: usize) -> Result<()> {
        if d > self.depth() {
            return Err(Error::Invalid(format!("depth {d} exceeds tower depth {}", self.depth())));
        }
        Ok(())
    }

    /// Levels `0..=d`.
    pub fn truncate(&self, d: usize) -> Result<Tower> {
        self.check_depth(d)?;
        Ok(Tower {
            levels: self.levels[..=d].to_vec(),
            transitions: self.transitions[..d].to_vec(),
        })
    }

    /// Composite `level j → level i` for `i ≤ j`, as an image vector.
    pub fn composite(&self, j: usize, i: usize) -> Vec<usize> {
        assert!(i <= j && j <= self.depth());
        (0..self.levels[j].len())
            .map(|mut p| {
                for k in (i..j).rev() {
                    p = self.transitions[k].apply(p);
                }
                p
            })
            .collect()
    }

    fn map_levels(&self, f: impl Fn(&FinitePoset) -> FinitePoset) -> Result<Tower> {
        let levels: Vec<FinitePoset> = self.levels.iter().map(f).collect();
        let images = self.transitions.iter().map(|t| t.image().to_vec()).collect();
        Self::from_images(levels, images)
    }

    /// Levelwise patch (discretization).
    pub fn patch(&self) -> Tower {
        self.map_levels(|p| p.discretization()).expect("discrete levels accept any map")
    }

    /// Levelwise de Groot dual (opposite order).
    pub fn dual(&self) -> Tower {
        self.map_levels(|p| p.opposite()).expect("opposite of a monotone map is monotone")
    }

    /// Levelwise one-point compactification; transitions send the added top
    /// to the added top.
    pub fn one_point(&self) -> Result<Tower> {
        let mut levels = Vec::new();
        let mut incls = Vec::new();
        for p in &self.levels {
            let (plus, incl) = FiniteSpace::new(p.clone()).one_point()?;
            levels.push(plus.carrier().clone());
            incls.push(incl);
        }
        let images = self
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let (src_plus, dst_plus) = (&levels[i + 1], &levels[i]);
                let src_inf = FiniteSpace::point_at_infinity(&FiniteSpace::new(src_plus.clone()), &incls[i + 1]);
                let dst_inf = FiniteSpace::point_at_infinity(&FiniteSpace::new(dst_plus.clone()), &incls[i]);
                let mut img = vec![dst_inf; src_plus.len()];
                for k in 0..self.levels[i + 1].len() {
                    img[incls[i + 1].apply(k)] = incls[i].apply(t.apply(k));
                }
                debug_assert_eq!(img[src_inf], dst_inf);
                img
            })
            .collect();
        Self::from_images(levels, images)
    }

    /// Index of the added top at each level of a tower built by [`Self::one_point`].
    pub fn infinity_points(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|p| {
                let tops = p.maximal(p.full());
                tops.iter()
                    .find(|&t| p.below(t) == p.full() && p.name(t).starts_with(crate::space::INFINITY))
                    .expect("one-point level")
            })
            .collect()
    }
}

/// Compatible tuples `(p_0, ..., p_d)` with `f_i(p_{i+1}) = p_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadSet {
    pub depth: usize,
    pub threads: Vec<Vec<usize>>,
}

impl ThreadSet {
    pub fn len(&self) -> usize {
        self.threads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threads.is_empty()
    }
}

/// Grows threads from level 0 through fibers of the transitions.
pub fn threads(t: &Tower, d: usize) -> Result<ThreadSet> {
    t.check_depth(d)?;
    let mut current: Vec<Vec<usize>> = (0..t.level(0).len()).map(|p| vec![p]).collect();
    for k in 0..d {
        let f = &t.transitions()[k];
        let mut next = Vec::new();
        for thread in &current {
            let last = *thread.last().unwrap();
            for q in (0..f.src().len()).filter(|&q| f.apply(q) == last) {
                let mut ext = thread.clone();
                ext.push(q);
                next.push(ext);
            }
        }
        current = next;
    }
    Ok(ThreadSet { depth: d, threads: current })
}

/// An element of `colim_i ℤ^{level_i}`, represented at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColimClass {
    pub level: usize,
    pub values: Vec<i64>,
}

impl ColimClass {
    pub fn new(t: &Tower, level: usize, values: Vec<i64>) -> Result<Self> {
        t.check_depth(level)?;
        if values.len() != t.level(level).len() {
            return Err(Error::DimensionMismatch(format!(
                "level {level} has {} points, got {} values",
                t.level(level).len(),
                values.len()
            )));
        }
        Ok(ColimClass { level, values })
    }
}

/// The representative of `c` at level `j ≥ c.level`: `v ∘ f`.
pub fn pullback_class(t: &Tower, c: &ColimClass, j: usize) -> Result<Vec<i64>> {
    t.check_depth(j)?;
    if j < c.level {
        return Err(Error::Invalid(format!("level {j} is shallower than the representative level {}", c.level)));
    }
    Ok(t.composite(j, c.level).into_iter().map(|p| c.values[p]).collect())
}

/// Equality in the colimit, decided at the deeper of the two levels; exact
/// for the truncation at that depth.
pub fn classes_equal(t: &Tower, a: &ColimClass, b: &ColimClass) -> Result<bool> {
    let j = a.level.max(b.level);
    Ok(pullback_class(t, a, j)? == pullback_class(t, b, j)?)
}

/// `colim_{i≤d} ℤ^{level_i}`: free on the level-`d` points, with the
/// pullback embedding of each shallower level.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionGroup {
    pub depth: usize,
    pub rank: usize,
    /// `embeddings[i]` is the `rank × |level_i|` matrix of pullback to level `d`.
    pub embeddings: Vec<ZMatrix>,
}

pub fn clopen_function_group(t: &Tower, d: usize) -> Result<FunctionGroup> {
    t.check_depth(d)?;
    let rank = t.level(d).len();
    let embeddings = (0..=d)
        .map(|i| ZMatrix::from_index_map(t.level(i).len(), &t.composite(d, i)).transpose())
        .collect();
    Ok(FunctionGroup {
        depth: d,
        rank,
        embeddings,
    })
}
