//! The pair groupoid `M × M` over a finite base of labelled points.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairGroupoidElement {
    source: usize,
    target: usize,
}

impl PairGroupoidElement {
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairGroupoid {
    base_size: usize,
}

impl PairGroupoid {
    pub fn new(base_size: usize) -> Result<Self> {
        if base_size == 0 {
            return Err(Error::InvalidArgument("groupoid base must be non-empty".into()));
        }
        Ok(PairGroupoid { base_size })
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    /// The arrow from `source` to `target`.
    pub fn element(&self, source: usize, target: usize) -> Result<PairGroupoidElement> {
        if source >= self.base_size || target >= self.base_size {
            return Err(Error::InvalidArgument(format!(
                "points must lie in 0..{}, got ({source}, {target})",
                self.base_size
            )));
        }
        Ok(PairGroupoidElement { source, target })
    }

    pub fn identity(&self, x: usize) -> Result<PairGroupoidElement> {
        self.element(x, x)
    }

    pub fn inverse(&self, g: PairGroupoidElement) -> PairGroupoidElement {
        PairGroupoidElement { source: g.target, target: g.source }
    }

    /// `g1` followed by `g2`; `None` unless `t(g1) = s(g2)`.
    pub fn compose(&self, g1: PairGroupoidElement, g2: PairGroupoidElement) -> Option<PairGroupoidElement> {
        (g1.target == g2.source).then_some(PairGroupoidElement { source: g1.source, target: g2.target })
    }

    pub fn elements(&self) -> impl Iterator<Item = PairGroupoidElement> + '_ {
        let n = self.base_size;
        (0..n).flat_map(move |s| (0..n).map(move |t| PairGroupoidElement { source: s, target: t }))
    }
}

/// Law violations found by exhaustive enumeration; all zero for a lawful groupoid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GroupoidLawReport {
    pub triples_checked: usize,
    pub associativity_failures: usize,
    pub unit_failures: usize,
    pub inverse_failures: usize,
    pub composability_failures: usize,
}

impl GroupoidLawReport {
    pub fn failures(&self) -> usize {
        self.associativity_failures + self.unit_failures + self.inverse_failures + self.composability_failures
    }
}

impl PairGroupoid {
    pub fn check_laws(&self) -> GroupoidLawReport {
        let mut rep = GroupoidLawReport::default();
        let all: Vec<_> = self.elements().collect();
        for &g in &all {
            let (ls, rt) = (self.identity(g.source).unwrap(), self.identity(g.target).unwrap());
            if self.compose(ls, g) != Some(g) || self.compose(g, rt) != Some(g) {
                rep.unit_failures += 1;
            }
            let inv = self.inverse(g);
            if self.compose(g, inv) != Some(ls) || self.compose(inv, g) != Some(rt) {
                rep.inverse_failures += 1;
            }
            for &h in &all {
                if self.compose(g, h).is_some() != (g.target == h.source) {
                    rep.composability_failures += 1;
                }
                for &k in &all {
                    let left = self.compose(g, h).and_then(|gh| self.compose(gh, k));
                    let right = self.compose(h, k).and_then(|hk| self.compose(g, hk));
                    if g.target == h.source && h.target == k.source {
                        rep.triples_checked += 1;
                        if left.is_none() || left != right {
                            rep.associativity_failures += 1;
                        }
                    } else if left.is_some() || right.is_some() {
                        rep.associativity_failures += 1;
                    }
                }
            }
        }
        rep
    }
}
