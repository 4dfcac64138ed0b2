use super::FinitePoset;
use crate::error::{Error, Result};

/// An order-preserving map between finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    src: FinitePoset,
    dst: FinitePoset,
    image: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(src: FinitePoset, dst: FinitePoset, image: Vec<usize>) -> Result<Self> {
        if !Self::is_monotone(&src, &dst, &image)? {
            let (p, q) = first_violation(&src, &dst, &image).expect("violation exists");
            return Err(Error::NotMonotone(format!(
                "{} ≤ {} but {} ≰ {}",
                src.name(p),
                src.name(q),
                dst.name(image[p]),
                dst.name(image[q])
            )));
        }
        Ok(MonotoneMap { src, dst, image })
    }

    /// Checks a candidate image array; malformed arrays are errors rather
    /// than `false`.
    pub fn is_monotone(src: &FinitePoset, dst: &FinitePoset, image: &[usize]) -> Result<bool> {
        if image.len() != src.len() {
            return Err(Error::DimensionMismatch(format!(
                "image has {} entries for {} source elements",
                image.len(),
                src.len()
            )));
        }
        if let Some(&bad) = image.iter().find(|&&j| j >= dst.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: dst.len(),
            });
        }
        Ok(first_violation(src, dst, image).is_none())
    }

    pub fn identity(p: &FinitePoset) -> Self {
        MonotoneMap {
            src: p.clone(),
            dst: p.clone(),
            image: (0..p.len()).collect(),
        }
    }

    /// Map given by element names, `pairs[k] = (source, target)`.
    pub fn from_names<S: AsRef<str>>(
        src: &FinitePoset,
        dst: &FinitePoset,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut image = vec![usize::MAX; src.len()];
        for (a, b) in pairs {
            let i = src
                .index_of(a.as_ref())
                .ok_or_else(|| Error::UnknownName(a.as_ref().to_string()))?;
            let j = dst
                .index_of(b.as_ref())
                .ok_or_else(|| Error::UnknownName(b.as_ref().to_string()))?;
            image[i] = j;
        }
        if let Some(i) = image.iter().position(|&j| j == usize::MAX) {
            return Err(Error::Invalid(format!("no image given for `{}`", src.name(i))));
        }
        Self::new(src.clone(), dst.clone(), image)
    }

    pub fn src(&self) -> &FinitePoset {
        &self.src
    }

    pub fn dst(&self) -> &FinitePoset {
        &self.dst
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &MonotoneMap) -> Result<MonotoneMap> {
        if self.dst != other.src {
            return Err(Error::DimensionMismatch(
                "composed maps do not share a middle poset".into(),
            ));
        }
        Ok(MonotoneMap {
            src: self.src.clone(),
            dst: other.dst.clone(),
            image: self.image.iter().map(|&j| other.image[j]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.len()];
        self.image.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    /// `p ≤ q` iff `f(p) ≤ f(q)`.
    pub fn is_order_reflecting(&self) -> bool {
        (0..self.src.len()).all(|p| {
            (0..self.src.len())
                .all(|q| self.src.leq(p, q) == self.dst.leq(self.image[p], self.image[q]))
        })
    }

    /// Preimage of a subset of the target.
    pub fn preimage(&self, s: super::SubsetMask) -> super::SubsetMask {
        super::SubsetMask::from_indices((0..self.src.len()).filter(|&i| s.contains(self.image[i])))
    }
}

fn first_violation(src: &FinitePoset, dst: &FinitePoset, image: &[usize]) -> Option<(usize, usize)> {
    (0..src.len()).find_map(|q| {
        src.below(q)
            .iter()
            .find(|&p| !dst.leq(image[p], image[q]))
            .map(|p| (p, q))
    })
}
