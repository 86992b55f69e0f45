use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::arrangement::Arrangement;
use crate::dependency::{build_triple_family, find_special_spaces, is_dependent_triple, DependencyError};
use crate::linalg::Tolerance;
use crate::rational::{format_rational, times_count, Rational};
use crate::scalar::Real;

/// A 2- or 3-element index set of a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepSet {
    Pair([usize; 2]),
    Triple([usize; 3]),
}

impl DepSet {
    pub fn indices(&self) -> &[usize] {
        match self {
            DepSet::Pair(p) => p,
            DepSet::Triple(t) => t,
        }
    }

    pub fn len(&self) -> usize {
        self.indices().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices().contains(&i)
    }

    /// Unordered pairs inside the set.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let ix = self.indices();
        let mut out = Vec::with_capacity(3);
        for a in 0..ix.len() {
            for b in a + 1..ix.len() {
                out.push((ix[a].min(ix[b]), ix[a].max(ix[b])));
            }
        }
        out
    }
}

/// Sets `S_1, ..., S_w` over `0..n` with parameters `alpha` (pair
/// multiplicity cap) and `delta` (each index in at least `delta * n` sets).
/// Sets form a multiset; repeats are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleSystem {
    n: usize,
    sets: Vec<DepSet>,
    alpha: u64,
    delta: Rational,
}

impl TripleSystem {
    /// Checks index ranges and distinctness within each set; the system
    /// requirements proper are left to [`validate_system`].
    pub fn new(n: usize, sets: Vec<DepSet>, alpha: u64, delta: Rational) -> Result<Self, DependencyError> {
        for (s, set) in sets.iter().enumerate() {
            let ix = set.indices();
            for (p, &i) in ix.iter().enumerate() {
                if i >= n {
                    return Err(DependencyError::IndexOutOfRange { set: s, index: i, n });
                }
                if ix[..p].contains(&i) {
                    return Err(DependencyError::RepeatedIndex { set: s, index: i });
                }
            }
        }
        Ok(Self { n, sets, alpha, delta })
    }

    pub fn empty(n: usize, alpha: u64) -> Self {
        Self {
            n,
            sets: Vec::new(),
            alpha,
            delta: Ratio::from_integer(0),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of sets `w`.
    #[inline]
    pub fn w(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn sets(&self) -> &[DepSet] {
        &self.sets
    }

    #[inline]
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    #[inline]
    pub fn delta(&self) -> Rational {
        self.delta
    }

    pub fn with_delta(mut self, delta: Rational) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_alpha(mut self, alpha: u64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Number of sets containing each index.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for s in &self.sets {
            for &i in s.indices() {
                deg[i] += 1;
            }
        }
        deg
    }

    /// Multiplicity of each unordered pair that occurs at all.
    pub fn pair_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for s in &self.sets {
            for p in s.pairs() {
                *m.entry(p).or_default() += 1;
            }
        }
        m
    }

    /// Largest delta for which the degree requirement holds: `min degree / n`.
    pub fn measured_delta(&self) -> Rational {
        match self.degrees().into_iter().min() {
            Some(d) if self.n > 0 => Ratio::new(d as u64, self.n as u64),
            _ => Ratio::from_integer(0),
        }
    }

    /// Smallest alpha for which the pair requirement holds.
    pub fn measured_alpha(&self) -> u64 {
        self.pair_counts().values().copied().max().unwrap_or(0) as u64
    }

    /// Indices of sets containing `i`, in system order.
    pub fn sets_containing(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.sets.iter().enumerate().filter(move |(_, s)| s.contains(i)).map(|(j, _)| j)
    }
}

/// A broken system requirement.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    SizeMismatch { system_n: usize, arrangement_n: usize },
    NotDependent { set: usize, indices: [usize; 3] },
    NotEqual { set: usize, indices: [usize; 2] },
    LowDegree { index: usize, count: usize, required: Rational },
    PairOverload { pair: (usize, usize), count: usize, alpha: u64 },
    CountingLower { w: usize, bound: Rational },
    CountingUpper { w: usize, bound: Rational },
    RatioBound { ratio: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SizeMismatch { system_n, arrangement_n } => {
                write!(f, "size: system has n = {system_n}, arrangement has {arrangement_n} spaces")
            }
            Violation::NotDependent { set, indices } => {
                write!(f, "dependency: set {set} {indices:?} is not a dependent triple")
            }
            Violation::NotEqual { set, indices } => {
                write!(f, "equality: set {set} {indices:?} joins two different spaces")
            }
            Violation::LowDegree { index, count, required } => write!(
                f,
                "degree: index {index} appears in {count} sets, needs at least {}",
                format_rational(required)
            ),
            Violation::PairOverload { pair, count, alpha } => {
                write!(f, "pair multiplicity: pair {pair:?} appears together in {count} sets, alpha = {alpha}")
            }
            Violation::CountingLower { w, bound } => {
                write!(f, "counting bound: w = {w} below delta*n^2/3 = {}", format_rational(bound))
            }
            Violation::CountingUpper { w, bound } => {
                write!(f, "counting bound: w = {w} above alpha*n^2/2 = {}", format_rational(bound))
            }
            Violation::RatioBound { ratio } => {
                write!(f, "counting bound: delta/alpha = {} exceeds 3/2", format_rational(ratio))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every (alpha, delta)-system requirement and the counting bounds
/// `delta n^2 / 3 <= w <= alpha n^2 / 2`, `delta / alpha <= 3/2`.
pub fn validate_system<T: Real>(arr: &Arrangement<T>, sys: &TripleSystem, tol: &Tolerance<T>) -> ValidationReport {
    let mut v = Vec::new();
    if sys.n() != arr.n() {
        v.push(Violation::SizeMismatch { system_n: sys.n(), arrangement_n: arr.n() });
        return ValidationReport { violations: v };
    }
    for (j, s) in sys.sets().iter().enumerate() {
        match *s {
            DepSet::Triple(t) => {
                if !is_dependent_triple(arr.space(t[0]), arr.space(t[1]), arr.space(t[2]), tol) {
                    v.push(Violation::NotDependent { set: j, indices: t });
                }
            }
            DepSet::Pair(p) => {
                if !arr.space(p[0]).same_as(arr.space(p[1]), tol) {
                    v.push(Violation::NotEqual { set: j, indices: p });
                }
            }
        }
    }
    let required = times_count(&sys.delta(), sys.n());
    for (i, d) in sys.degrees().into_iter().enumerate() {
        if Ratio::from_integer(d as u64) < required {
            v.push(Violation::LowDegree { index: i, count: d, required });
        }
    }
    for (pair, count) in sys.pair_counts() {
        if count as u64 > sys.alpha() {
            v.push(Violation::PairOverload { pair, count, alpha: sys.alpha() });
        }
    }
    let n2 = (sys.n() * sys.n()) as u64;
    let w = Ratio::from_integer(sys.w() as u64);
    let lower = sys.delta() * Ratio::new(n2, 3);
    if w < lower {
        v.push(Violation::CountingLower { w: sys.w(), bound: lower });
    }
    let upper = Ratio::new(sys.alpha() * n2, 2);
    if w > upper {
        v.push(Violation::CountingUpper { w: sys.w(), bound: upper });
    }
    if sys.alpha() > 0 {
        let ratio = sys.delta() / Ratio::from_integer(sys.alpha());
        if ratio > Ratio::new(3, 2) {
            v.push(Violation::RatioBound { ratio });
        }
    } else if *sys.delta().numer() > 0 {
        v.push(Violation::RatioBound { ratio: Ratio::from_integer(u64::MAX) });
    }
    ValidationReport { violations: v }
}

/// The union of triple families over all special spaces, with `alpha = 6` and
/// the measured `delta`.
pub fn build_sg_system<T: Real>(arr: &Arrangement<T>, k: usize, tol: &Tolerance<T>) -> Result<TripleSystem, DependencyError> {
    let specials = find_special_spaces(arr, k, tol)?;
    let mut sets = Vec::new();
    for sp in &specials {
        for t in build_triple_family(sp.size())? {
            let mut mapped = t.map(|x| sp.members[x]);
            mapped.sort_unstable();
            sets.push(DepSet::Triple(mapped));
        }
    }
    let sys = TripleSystem::new(arr.n(), sets, 6, Ratio::from_integer(0))?;
    let delta = sys.measured_delta();
    Ok(sys.with_delta(delta))
}
