//! Belief assignments over a small finite frame and their PCR5 combination.
//!
//! Subsets of the frame are bitmasks over the ordered element list, which
//! keeps the set algebra of the conjunctive consensus exact for frames of up
//! to eight elements.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported frame; subsets must fit in a `u8` bitmask.
pub const MAX_FRAME_SIZE: usize = 8;

const MASS_TOLERANCE: f64 = 1e-12;

/// Ordered set of atomic event labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFrame {
    elements: Vec<String>,
}

impl FiniteFrame {
    pub fn new<I, S>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() || elements.len() > MAX_FRAME_SIZE {
            return Err(Error::InvalidFrame(format!(
                "frame size {} outside 1..={MAX_FRAME_SIZE}",
                elements.len()
            )));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::InvalidFrame(format!("duplicate label `{e}`")));
            }
        }
        Ok(Self { elements })
    }

    /// Frame with labels `a`, `b`, `c`, ...
    pub fn lettered(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// The whole frame as a subset.
    pub fn full(&self) -> Subset {
        Subset(((1u16 << self.len()) - 1) as u8)
    }

    pub fn singleton(&self, label: &str) -> Option<Subset> {
        self.elements
            .iter()
            .position(|e| e == label)
            .map(|i| Subset(1 << i))
    }

    /// Subset made of the given labels; `None` if a label is unknown.
    pub fn subset(&self, labels: &[&str]) -> Option<Subset> {
        labels
            .iter()
            .try_fold(Subset::EMPTY, |acc, l| self.singleton(l).map(|s| acc.union(s)))
    }

    /// Every non-empty subset, in increasing bitmask order.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = Subset> {
        (1..=self.full().0 as u16).map(|b| Subset(b as u8))
    }

    fn contains(&self, s: Subset) -> bool {
        s.0 & !self.full().0 == 0
    }
}

/// A subset of a [`FiniteFrame`], as a bitmask over its ordered elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(pub u8);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:#010b}}}", self.0)
    }
}

/// Basic belief assignment: masses on non-empty subsets summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBBA {
    frame: FiniteFrame,
    masses: BTreeMap<Subset, f64>,
}

impl DiscreteBBA {
    /// Validating constructor. Zero masses are dropped; repeated subsets
    /// accumulate.
    pub fn new<I>(frame: FiniteFrame, masses: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut map = BTreeMap::new();
        for (s, m) in masses {
            if s.is_empty() {
                return Err(Error::InvalidMass("mass on the empty set".into()));
            }
            if !frame.contains(s) {
                return Err(Error::InvalidMass(format!("subset {s} outside the frame")));
            }
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidMass(format!("mass {m} on {s}")));
            }
            if m > 0.0 {
                *map.entry(s).or_insert(0.0) += m;
            }
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}")));
        }
        Ok(Self { frame, masses: map })
    }

    /// Singleton-focal encoding of a probability vector.
    pub fn from_probability(p: &DiscreteProbability) -> Self {
        let masses = p
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, &v)| (Subset(1 << i), v))
            .collect();
        Self {
            frame: p.frame().clone(),
            masses,
        }
    }

    pub fn frame(&self) -> &FiniteFrame {
        &self.frame
    }

    pub fn mass(&self, s: Subset) -> f64 {
        self.masses.get(&s).copied().unwrap_or(0.0)
    }

    /// Focal elements with their masses.
    pub fn focal(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.masses.iter().map(|(&s, &m)| (s, m))
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }
}

/// A probabilistic belief assignment: one probability per atomic element.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProbability {
    frame: FiniteFrame,
    probs: Vec<f64>,
}

impl DiscreteProbability {
    pub fn new(frame: FiniteFrame, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != frame.len() {
            return Err(Error::InvalidMass(format!(
                "{} probabilities for a frame of {}",
                probs.len(),
                frame.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidMass(format!("probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("probabilities sum to {total}")));
        }
        Ok(Self { frame, probs })
    }

    pub fn frame(&self) -> &FiniteFrame {
        &self.frame
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Conjunctive consensus of two bbas, with the mass that fell on the
/// empty set kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjunctive {
    pub masses: BTreeMap<Subset, f64>,
    pub conflict: f64,
}

impl Conjunctive {
    pub fn mass(&self, s: Subset) -> f64 {
        self.masses.get(&s).copied().unwrap_or(0.0)
    }
}

fn check_frames(a: &FiniteFrame, b: &FiniteFrame) -> Result<()> {
    if a != b {
        return Err(Error::FrameMismatch(format!(
            "{:?} vs {:?}",
            a.elements(),
            b.elements()
        )));
    }
    Ok(())
}

/// Product masses assigned to intersections of focal elements.
pub fn conjunctive_combine(m1: &DiscreteBBA, m2: &DiscreteBBA) -> Result<Conjunctive> {
    check_frames(&m1.frame, &m2.frame)?;
    let mut masses = BTreeMap::new();
    let mut conflict = 0.0;
    for (x1, a) in m1.focal() {
        for (x2, b) in m2.focal() {
            let x = x1.intersection(x2);
            if x.is_empty() {
                conflict += a * b;
            } else {
                *masses.entry(x).or_insert(0.0) += a * b;
            }
        }
    }
    Ok(Conjunctive { masses, conflict })
}

/// `num / den`, or zero when the denominator vanishes.
fn ratio_or_discard(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// PCR5 combination: each partial conflict `m1(X) m2(Y)` with `X ∩ Y = ∅`
/// goes back to `X` and `Y` in proportion to `m1(X)` and `m2(Y)`.
pub fn discrete_pcr5(m1: &DiscreteBBA, m2: &DiscreteBBA) -> Result<DiscreteBBA> {
    let conj = conjunctive_combine(m1, m2)?;
    let frame = m1.frame.clone();
    let mut masses = BTreeMap::new();
    for x in frame.nonempty_subsets() {
        let (a1, a2) = (m1.mass(x), m2.mass(x));
        let mut value = conj.mass(x);
        if a1 > 0.0 || a2 > 0.0 {
            for y in frame.nonempty_subsets() {
                if !x.intersection(y).is_empty() {
                    continue;
                }
                let (b1, b2) = (m1.mass(y), m2.mass(y));
                value += ratio_or_discard(a1 * a1 * b2, a1 + b2);
                value += ratio_or_discard(a2 * a2 * b1, a2 + b1);
            }
        }
        if value > 0.0 {
            masses.insert(x, value);
        }
    }
    Ok(DiscreteBBA { frame, masses })
}

/// Probabilistic PCR5 on singleton-only assignments. The `Y = X` term of
/// each sum reproduces the conjunctive product `P1(X) P2(X)`.
pub fn discrete_p_pcr5(
    p1: &DiscreteProbability,
    p2: &DiscreteProbability,
) -> Result<DiscreteProbability> {
    check_frames(&p1.frame, &p2.frame)?;
    let (a, b) = (&p1.probs, &p2.probs);
    let probs = (0..a.len())
        .map(|x| {
            let first: f64 = b
                .iter()
                .map(|&by| ratio_or_discard(a[x] * by, a[x] + by))
                .sum();
            let second: f64 = a
                .iter()
                .map(|&ay| ratio_or_discard(b[x] * ay, b[x] + ay))
                .sum();
            a[x] * first + b[x] * second
        })
        .collect();
    Ok(DiscreteProbability {
        frame: p1.frame.clone(),
        probs,
    })
}
