//! Filtered, graded chain complexes over GF(2).
//!
//! Boundary depth is read off a filtered column reduction: the longest finite bar of the
//! barcode. Small instances can be checked against exhaustive search, and generator sets
//! without a known differential get a lower bound on the depth of every admissible
//! acyclic differential.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of admissible entries explored by [`min_depth_over_admissible`].
pub const BRUTE_FORCE_BUDGET: usize = 24;
/// Largest complex accepted by [`boundary_depth_exhaustive`].
pub const EXHAUSTIVE_MAX_GENERATORS: usize = 20;
const SHIFT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexGenerator {
    pub id: usize,
    pub grading: i64,
    pub filtration: f64,
}

/// A complex with an optional explicit differential, stored as `(target, source)` id pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredComplex {
    pub generators: Vec<ComplexGenerator>,
    #[serde(default)]
    pub differential: Option<Vec<(usize, usize)>>,
}

/// Dense GF(2) vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn toggle(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn xor(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn highest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&i| self.get(i))
    }
}

fn gf2_rank(columns: &[Bits]) -> usize {
    let mut pivots: HashMap<usize, Bits> = HashMap::new();
    for col in columns {
        let mut c = col.clone();
        while let Some(low) = c.highest() {
            match pivots.get(&low) {
                Some(p) => c.xor(p),
                None => {
                    pivots.insert(low, c);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn check_generators(gens: &[ComplexGenerator]) -> Result<()> {
    let mut ids = HashSet::new();
    let mut filtrations = HashSet::new();
    for g in gens {
        if !g.filtration.is_finite() {
            return Err(Error::InvariantViolation(format!("generator {} has non-finite filtration", g.id)));
        }
        if !ids.insert(g.id) {
            return Err(Error::InvariantViolation(format!("duplicate generator id {}", g.id)));
        }
        if !filtrations.insert(g.filtration.to_bits()) {
            return Err(Error::InvariantViolation(format!("filtration {} is not unique", g.filtration)));
        }
    }
    Ok(())
}

/// Generators sorted by filtration, with each column's targets as positions in that order.
struct Sorted {
    filtration: Vec<f64>,
    columns: Vec<Bits>,
}

impl FilteredComplex {
    pub fn new(generators: Vec<ComplexGenerator>, differential: Vec<(usize, usize)>) -> Result<Self> {
        let c = FilteredComplex { generators, differential: Some(differential) };
        c.validate()?;
        Ok(c)
    }

    /// Generators only; the differential is left unspecified.
    pub fn from_generators(generators: Vec<ComplexGenerator>) -> Result<Self> {
        check_generators(&generators)?;
        Ok(FilteredComplex { generators, differential: None })
    }

    fn entries(&self) -> Result<&[(usize, usize)]> {
        self.differential
            .as_deref()
            .ok_or_else(|| Error::BadParameters("complex has no explicit differential".into()))
    }

    fn position_map(&self) -> HashMap<usize, usize> {
        self.generators.iter().enumerate().map(|(i, g)| (g.id, i)).collect()
    }

    /// Check ids, distinct filtrations, degree and filtration of every entry, and `∂² = 0`.
    pub fn validate(&self) -> Result<()> {
        check_generators(&self.generators)?;
        let Some(entries) = &self.differential else { return Ok(()) };
        let pos = self.position_map();
        let mut seen = HashSet::new();
        for &(t, s) in entries {
            let (Some(&ti), Some(&si)) = (pos.get(&t), pos.get(&s)) else {
                return Err(Error::InvariantViolation(format!("entry ({t}, {s}) names an unknown generator")));
            };
            if !seen.insert((t, s)) {
                return Err(Error::InvariantViolation(format!("entry ({t}, {s}) listed twice")));
            }
            let (tg, sg) = (&self.generators[ti], &self.generators[si]);
            if tg.grading != sg.grading - 1 {
                return Err(Error::InvariantViolation(format!("entry ({t}, {s}) does not lower the grading by one")));
            }
            if tg.filtration >= sg.filtration {
                return Err(Error::InvariantViolation(format!("entry ({t}, {s}) does not lower the filtration")));
            }
        }
        let sorted = self.sorted()?;
        for col in &sorted.columns {
            let mut dd = Bits::zeros(col.0.len() * 64);
            for t in col.ones() {
                dd.xor(&sorted.columns[t]);
            }
            if !dd.is_zero() {
                return Err(Error::InvariantViolation("differential does not square to zero".into()));
            }
        }
        Ok(())
    }

    fn sorted(&self) -> Result<Sorted> {
        let entries = self.entries()?;
        let n = self.generators.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.generators[a].filtration.total_cmp(&self.generators[b].filtration));
        let mut rank = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let pos = self.position_map();
        let mut columns = vec![Bits::zeros(n); n];
        for &(t, s) in entries {
            columns[rank[pos[&s]]].toggle(rank[pos[&t]]);
        }
        let filtration = order.iter().map(|&i| self.generators[i].filtration).collect();
        Ok(Sorted { filtration, columns })
    }

    /// Smallest `β ≥ 0` such that every boundary has a primitive of filtration at most
    /// its own plus `β`; the longest finite bar of the barcode.
    pub fn boundary_depth(&self) -> Result<f64> {
        self.validate()?;
        let Sorted { filtration, columns } = self.sorted()?;
        Ok(reduce_depth(&filtration, columns))
    }

    /// Boundary depth by enumerating every chain; exponential, for cross-checking.
    pub fn boundary_depth_exhaustive(&self) -> Result<f64> {
        self.validate()?;
        let n = self.generators.len();
        if n > EXHAUSTIVE_MAX_GENERATORS {
            return Err(Error::BudgetExceeded { entries: n, budget: EXHAUSTIVE_MAX_GENERATORS });
        }
        let pos = self.position_map();
        let mut boundary = vec![0u32; n];
        for &(t, s) in self.entries()? {
            boundary[pos[&s]] ^= 1 << pos[&t];
        }
        let level = |chain: u32| -> f64 {
            (0..n)
                .filter(|&i| chain >> i & 1 == 1)
                .map(|i| self.generators[i].filtration)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let mut cheapest: HashMap<u32, f64> = HashMap::new();
        for chain in 1u32..(1 << n) {
            let b = (0..n).filter(|&i| chain >> i & 1 == 1).fold(0, |acc, i| acc ^ boundary[i]);
            if b != 0 {
                let l = level(chain);
                cheapest.entry(b).and_modify(|v| *v = v.min(l)).or_insert(l);
            }
        }
        Ok(cheapest.iter().map(|(&b, &p)| p - level(b)).fold(0.0, f64::max))
    }

    /// Negated gradings and filtrations with the transposed differential.
    pub fn opposite(&self) -> FilteredComplex {
        FilteredComplex {
            generators: opposite_generators(&self.generators),
            differential: self.differential.as_ref().map(|e| e.iter().map(|&(t, s)| (s, t)).collect()),
        }
    }

    /// Uniform shift of every grading and filtration.
    pub fn shifted(&self, grade_shift: i64, filt_shift: f64) -> FilteredComplex {
        FilteredComplex {
            generators: self
                .generators
                .iter()
                .map(|g| ComplexGenerator { id: g.id, grading: g.grading + grade_shift, filtration: g.filtration + filt_shift })
                .collect(),
            differential: self.differential.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: FilteredComplex = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

/// Filtered reduction over columns already sorted by filtration.
fn reduce_depth(filtration: &[f64], columns: Vec<Bits>) -> f64 {
    let n = filtration.len();
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut reduced: Vec<Bits> = Vec::with_capacity(n);
    let mut beta = 0.0f64;
    for (j, mut col) in columns.into_iter().enumerate() {
        while let Some(low) = col.highest() {
            match pivot_owner[low] {
                Some(k) => col.xor(&reduced[k]),
                None => {
                    pivot_owner[low] = Some(j);
                    beta = beta.max(filtration[j] - filtration[low]);
                    break;
                }
            }
        }
        reduced.push(col);
    }
    beta
}

pub fn opposite_generators(gens: &[ComplexGenerator]) -> Vec<ComplexGenerator> {
    gens.iter()
        .map(|g| ComplexGenerator { id: g.id, grading: -g.grading, filtration: -g.filtration })
        .collect()
}

/// `(target, source)` pairs allowed in a differential: grading drops by one and the
/// filtration strictly decreases.
pub fn admissible_entries(gens: &[ComplexGenerator]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in gens {
        for t in gens {
            if t.grading == s.grading - 1 && t.filtration < s.filtration {
                out.push((t.id, s.id));
            }
        }
    }
    out
}

/// Ranks `r_k = rank(∂: C_k → C_{k-1})` forced by acyclicity, or `None` if the graded
/// dimensions admit no acyclic differential.
fn acyclic_ranks(gens: &[ComplexGenerator]) -> Option<BTreeMap<i64, usize>> {
    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    for g in gens {
        *dims.entry(g.grading).or_default() += 1;
    }
    let (Some(&lo), Some(&hi)) = (dims.keys().next(), dims.keys().next_back()) else {
        return Some(BTreeMap::new());
    };
    let mut ranks = BTreeMap::new();
    let mut r: i64 = 0;
    for k in lo..=hi {
        ranks.insert(k, r as usize);
        r = dims.get(&k).copied().unwrap_or(0) as i64 - r;
        if r < 0 {
            return None;
        }
    }
    (r == 0).then_some(ranks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleMinimum {
    pub min_beta: f64,
    pub witness: FilteredComplex,
    /// Number of acyclic admissible differentials examined.
    pub acyclic_differentials: usize,
}

struct Search<'a> {
    gens: &'a [ComplexGenerator],
    /// Positions sorted by (grading, filtration).
    targets: Vec<Vec<usize>>,
    ranks: BTreeMap<i64, usize>,
    columns: Vec<Bits>,
    by_filtration: Vec<usize>,
    best: Option<(f64, Vec<Bits>)>,
    found: usize,
}

impl Search<'_> {
    fn run(&mut self, s: usize) {
        let n = self.gens.len();
        if s > 0 && (s == n || self.gens[s].grading != self.gens[s - 1].grading) {
            let g = self.gens[s - 1].grading;
            let cols: Vec<Bits> = (0..s).filter(|&i| self.gens[i].grading == g).map(|i| self.columns[i].clone()).collect();
            if gf2_rank(&cols) != self.ranks[&g] {
                return;
            }
        }
        if s == n {
            self.found += 1;
            let mut rank = vec![0; n];
            for (r, &i) in self.by_filtration.iter().enumerate() {
                rank[i] = r;
            }
            let mut sorted_cols = vec![Bits::zeros(n); n];
            for (i, col) in self.columns.iter().enumerate() {
                for t in col.ones() {
                    sorted_cols[rank[i]].toggle(rank[t]);
                }
            }
            let filtration: Vec<f64> = self.by_filtration.iter().map(|&i| self.gens[i].filtration).collect();
            let beta = reduce_depth(&filtration, sorted_cols);
            if self.best.as_ref().is_none_or(|(b, _)| beta < *b) {
                self.best = Some((beta, self.columns.clone()));
            }
            return;
        }
        let targets = self.targets[s].clone();
        for mask in 0u64..(1 << targets.len()) {
            let mut col = Bits::zeros(n);
            let mut dd = Bits::zeros(n);
            for (b, &t) in targets.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    col.toggle(t);
                    dd.xor(&self.columns[t]);
                }
            }
            if !dd.is_zero() {
                continue;
            }
            self.columns[s] = col;
            self.run(s + 1);
        }
        self.columns[s] = Bits::zeros(n);
    }
}

/// Minimum boundary depth over all admissible acyclic differentials on `gens`.
pub fn min_depth_over_admissible(gens: &[ComplexGenerator]) -> Result<AdmissibleMinimum> {
    check_generators(gens)?;
    let entries = admissible_entries(gens);
    if entries.len() > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded { entries: entries.len(), budget: BRUTE_FORCE_BUDGET });
    }
    let ranks = acyclic_ranks(gens)
        .ok_or_else(|| Error::Infeasible("graded dimensions admit no acyclic differential".into()))?;
    let mut sorted = gens.to_vec();
    sorted.sort_by(|a, b| a.grading.cmp(&b.grading).then(a.filtration.total_cmp(&b.filtration)));
    let n = sorted.len();
    let targets = (0..n)
        .map(|s| {
            (0..n)
                .filter(|&t| sorted[t].grading == sorted[s].grading - 1 && sorted[t].filtration < sorted[s].filtration)
                .collect()
        })
        .collect();
    let mut by_filtration: Vec<usize> = (0..n).collect();
    by_filtration.sort_by(|&a, &b| sorted[a].filtration.total_cmp(&sorted[b].filtration));
    let mut search = Search {
        gens: &sorted,
        targets,
        ranks,
        columns: vec![Bits::zeros(n); n],
        by_filtration,
        best: None,
        found: 0,
    };
    search.run(0);
    let (min_beta, columns) = search
        .best
        .ok_or_else(|| Error::Infeasible("no admissible differential is acyclic".into()))?;
    let mut differential = Vec::new();
    for (s, col) in columns.iter().enumerate() {
        for t in col.ones() {
            differential.push((sorted[t].id, sorted[s].id));
        }
    }
    differential.sort_unstable();
    Ok(AdmissibleMinimum {
        min_beta,
        witness: FilteredComplex { generators: gens.to_vec(), differential: Some(differential) },
        acyclic_differentials: search.found,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateClause {
    /// A forced cycle needs a primitive one degree up.
    Direct,
    /// The same argument on the complex with gradings and filtrations negated.
    Opposite,
}

/// One forced-cycle witness, reported in the original gradings and filtrations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClauseCertificate {
    pub clause: CertificateClause,
    pub witness: usize,
    pub grading: i64,
    pub filtration: f64,
    /// Filtration of the cheapest possible primitive.
    pub primitive_filtration: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthCertificate {
    /// Best lower bound on the boundary depth of any admissible acyclic differential.
    pub bound: f64,
    pub best: Option<ClauseCertificate>,
    pub direct: Option<ClauseCertificate>,
    pub opposite: Option<ClauseCertificate>,
}

/// Strongest forced-cycle bound in the direct orientation.
fn direct_clause(gens: &[ComplexGenerator], clause: CertificateClause) -> Result<Option<ClauseCertificate>> {
    let mut by_grading: HashMap<i64, Vec<f64>> = HashMap::new();
    for g in gens {
        by_grading.entry(g.grading).or_default().push(g.filtration);
    }
    for v in by_grading.values_mut() {
        v.sort_by(f64::total_cmp);
    }
    let mut best: Option<ClauseCertificate> = None;
    for g in gens {
        let below = by_grading.get(&(g.grading - 1));
        if below.is_some_and(|v| v[0] < g.filtration) {
            continue;
        }
        let above = by_grading.get(&(g.grading + 1));
        let p_min = above.and_then(|v| {
            let i = v.partition_point(|&f| f <= g.filtration);
            v.get(i).copied()
        });
        let Some(p_min) = p_min else {
            return Err(Error::NoPrimitiveAvailable { id: g.id });
        };
        let cert = ClauseCertificate {
            clause,
            witness: g.id,
            grading: g.grading,
            filtration: g.filtration,
            primitive_filtration: p_min,
            bound: p_min - g.filtration,
        };
        let better = match &best {
            None => true,
            Some(b) => cert.bound > b.bound || (cert.bound == b.bound && cert.witness < b.witness),
        };
        if better {
            best = Some(cert);
        }
    }
    Ok(best)
}

/// Lower bound on the boundary depth of every admissible acyclic differential on `gens`.
///
/// A generator with nothing below it one degree down is a cycle, hence a boundary; any
/// primitive contains a generator one degree up with higher filtration. The same argument
/// runs on the opposite complex and the larger bound is returned.
pub fn certificate_lower_bound(gens: &[ComplexGenerator]) -> Result<DepthCertificate> {
    check_generators(gens)?;
    let direct = direct_clause(gens, CertificateClause::Direct)?;
    let opposite = direct_clause(&opposite_generators(gens), CertificateClause::Opposite)?.map(|c| ClauseCertificate {
        grading: -c.grading,
        filtration: -c.filtration,
        primitive_filtration: -c.primitive_filtration,
        ..c
    });
    let best = match (direct, opposite) {
        (Some(d), Some(o)) => Some(if o.bound > d.bound { o } else { d }),
        (d, o) => d.or(o),
    };
    Ok(DepthCertificate { bound: best.map_or(0.0, |b| b.bound), best, direct, opposite })
}

/// True when the boundary depths of `c1` and `c2` differ by at most `delta`.
pub fn quasiequivalence_gap(c1: &FilteredComplex, c2: &FilteredComplex, delta: f64) -> Result<bool> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::BadParameters(format!("delta must be nonnegative, got {delta}")));
    }
    Ok((c1.boundary_depth()? - c2.boundary_depth()?).abs() <= delta + SHIFT_TOLERANCE)
}

/// True when uniform grading and filtration shifts leave the boundary depth unchanged.
pub fn relabel_invariance_check(c: &FilteredComplex, grade_shift: i64, filt_shift: f64) -> Result<bool> {
    let before = c.boundary_depth()?;
    let after = c.shifted(grade_shift, filt_shift).boundary_depth()?;
    Ok((before - after).abs() <= SHIFT_TOLERANCE * (1.0 + filt_shift.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gen(id: usize, grading: i64, filtration: f64) -> ComplexGenerator {
        ComplexGenerator { id, grading, filtration }
    }

    /// Random complex with `n` generators in gradings 0..3 and a random `∂` with `∂² = 0`.
    fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> FilteredComplex {
        loop {
            let mut gens: Vec<ComplexGenerator> =
                (0..n).map(|id| gen(id, rng.gen_range(0..3), rng.gen_range(-10.0..10.0))).collect();
            gens.dedup_by(|a, b| a.filtration == b.filtration);
            let entries: Vec<(usize, usize)> =
                admissible_entries(&gens).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            if let Ok(c) = FilteredComplex::new(gens, entries) {
                return c;
            }
        }
    }

    #[test]
    fn single_pair_depth() {
        let c = FilteredComplex::new(vec![gen(0, 0, 0.0), gen(1, 1, 5.0)], vec![(0, 1)]).unwrap();
        assert_eq!(c.boundary_depth().unwrap(), 5.0);
        assert_eq!(c.boundary_depth_exhaustive().unwrap(), 5.0);
    }

    #[test]
    fn zero_differential_has_zero_depth() {
        let c = FilteredComplex::new(vec![gen(0, 0, 0.0), gen(1, 1, 5.0)], vec![]).unwrap();
        assert_eq!(c.boundary_depth().unwrap(), 0.0);
        let empty = FilteredComplex::new(vec![], vec![]).unwrap();
        assert_eq!(empty.boundary_depth().unwrap(), 0.0);
    }

    #[test]
    fn invariants_are_enforced() {
        let bad_degree = FilteredComplex::new(vec![gen(0, 0, 0.0), gen(1, 2, 5.0)], vec![(0, 1)]);
        assert!(matches!(bad_degree, Err(Error::InvariantViolation(_))));
        let bad_filtration = FilteredComplex::new(vec![gen(0, 0, 6.0), gen(1, 1, 5.0)], vec![(0, 1)]);
        assert!(matches!(bad_filtration, Err(Error::InvariantViolation(_))));
        // x <- y, x <- z, y, z <- w: ∂w = y + z, ∂²w = 2x = 0 holds; drop one to break it.
        let gens = vec![gen(0, 0, 0.0), gen(1, 1, 1.0), gen(2, 1, 2.0), gen(3, 2, 3.0)];
        assert!(FilteredComplex::new(gens.clone(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]).is_ok());
        let not_square_zero = FilteredComplex::new(gens, vec![(0, 1), (1, 3)]);
        assert!(matches!(not_square_zero, Err(Error::InvariantViolation(_))));
        let repeated = FilteredComplex::new(vec![gen(0, 0, 1.0), gen(1, 1, 1.0)], vec![]);
        assert!(matches!(repeated, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn reduction_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let c = random_complex(&mut rng, n);
            let fast = c.boundary_depth().unwrap();
            let slow = c.boundary_depth_exhaustive().unwrap();
            assert!((fast - slow).abs() <= 1e-12, "{fast} vs {slow}: {c:?}");
        }
    }

    #[test]
    fn opposite_and_shift_preserve_depth() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let c = random_complex(&mut rng, n);
            let d = c.boundary_depth().unwrap();
            assert!((c.opposite().boundary_depth().unwrap() - d).abs() <= 1e-12);
            assert_eq!(c.opposite().opposite(), c);
            assert!(relabel_invariance_check(&c, rng.gen_range(-5..5), rng.gen_range(-10.0..10.0)).unwrap());
        }
        let c = random_complex(&mut rng, 6);
        assert!(relabel_invariance_check(&c, 3, 2.5).unwrap());
        assert!(relabel_invariance_check(&c, 0, 0.0).unwrap());
    }

    #[test]
    fn quasiequivalence_examples() {
        let c1 = FilteredComplex::new(vec![gen(0, 0, 0.0), gen(1, 1, 5.0)], vec![(0, 1)]).unwrap();
        assert!(quasiequivalence_gap(&c1, &c1.shifted(0, 0.3), 0.3).unwrap());
        let raised = FilteredComplex::new(vec![gen(0, 0, 0.0), gen(1, 1, 5.2)], vec![(0, 1)]).unwrap();
        assert!(quasiequivalence_gap(&c1, &raised, 0.2).unwrap());
        let far = FilteredComplex::new(vec![gen(0, 0, 0.0), gen(1, 1, 6.0)], vec![(0, 1)]).unwrap();
        assert!(!quasiequivalence_gap(&c1, &far, 0.5).unwrap());
    }

    #[test]
    fn forced_pair_minimum() {
        let m = min_depth_over_admissible(&[gen(0, 0, -6.0), gen(1, 1, -2.0)]).unwrap();
        assert_eq!(m.min_beta, 4.0);
        assert_eq!(m.witness.differential, Some(vec![(0, 1)]));
        assert_eq!(m.acyclic_differentials, 1);
    }

    #[test]
    fn unbalanced_dimensions_are_infeasible() {
        let odd = [gen(0, 0, -6.0), gen(1, 1, -0.4), gen(2, 1, 7.0)];
        assert!(matches!(min_depth_over_admissible(&odd), Err(Error::Infeasible(_))));
        // Balanced counts, but the only degree-1 generator sits below the degree-0 one.
        let inverted = [gen(0, 0, 1.0), gen(1, 1, -1.0)];
        assert!(matches!(min_depth_over_admissible(&inverted), Err(Error::Infeasible(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let wide: Vec<ComplexGenerator> = (0..20).map(|i| gen(i, (i % 2) as i64, i as f64)).collect();
        assert!(admissible_entries(&wide).len() > BRUTE_FORCE_BUDGET);
        assert!(matches!(min_depth_over_admissible(&wide), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn certificate_direct_clause_example() {
        let gens = [gen(0, 0, -6.0), gen(1, 1, -0.4), gen(2, 1, 7.0)];
        let cert = certificate_lower_bound(&gens).unwrap();
        let direct = cert.direct.unwrap();
        assert_eq!(direct.witness, 0);
        assert_eq!(direct.primitive_filtration, -0.4);
        assert!((direct.bound - 5.6).abs() < 1e-12);
        // In the opposite orientation z is a forced cycle whose only primitive is x.
        let opposite = cert.opposite.unwrap();
        assert_eq!(opposite.witness, 2);
        assert_eq!(opposite.bound, 13.0);
        assert_eq!(cert.bound, 13.0);
    }

    #[test]
    fn isolated_generator_has_no_primitive() {
        assert!(matches!(certificate_lower_bound(&[gen(4, 0, 1.0)]), Err(Error::NoPrimitiveAvailable { id: 4 })));
        let empty = certificate_lower_bound(&[]).unwrap();
        assert_eq!(empty.bound, 0.0);
        assert!(empty.best.is_none());
    }

    #[test]
    fn certificate_is_an_involution_invariant() {
        let gens = [gen(0, 0, -6.0), gen(1, 1, -2.0), gen(2, 1, 3.0), gen(3, 2, 4.0)];
        let twice = opposite_generators(&opposite_generators(&gens));
        assert_eq!(certificate_lower_bound(&gens).unwrap(), certificate_lower_bound(&twice).unwrap());
        let flipped = certificate_lower_bound(&opposite_generators(&gens)).unwrap();
        assert_eq!(flipped.bound, certificate_lower_bound(&gens).unwrap().bound);
    }

    #[test]
    fn certificate_is_sound_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 30 {
            // Pairs (k, k+1) with the upper member higher keep the instance feasible often.
            let pairs = rng.gen_range(1..=4);
            let mut gens = Vec::new();
            for p in 0..pairs {
                let k = rng.gen_range(0..3);
                let lo = rng.gen_range(-10.0..10.0);
                gens.push(gen(2 * p, k, lo));
                gens.push(gen(2 * p + 1, k + 1, lo + rng.gen_range(0.1..5.0)));
            }
            let Ok(min) = min_depth_over_admissible(&gens) else { continue };
            let cert = certificate_lower_bound(&gens).unwrap();
            assert!(cert.bound <= min.min_beta + 1e-12, "{gens:?}");
            checked += 1;
        }
    }

    #[test]
    fn certificate_monotone_under_new_primitives() {
        let gens = vec![gen(0, 0, -6.0), gen(1, 1, -2.0), gen(2, 1, 3.0), gen(3, 0, 2.0)];
        let base = certificate_lower_bound(&gens).unwrap().direct.unwrap().bound;
        let mut cheaper = gens.clone();
        cheaper.push(gen(9, 1, -4.0));
        assert!(certificate_lower_bound(&cheaper).unwrap().direct.unwrap().bound <= base);
        let mut expensive = gens;
        expensive.push(gen(9, 1, 20.0));
        assert!(certificate_lower_bound(&expensive).unwrap().direct.unwrap().bound >= base);
    }

    #[test]
    fn json_round_trip() {
        let c = FilteredComplex::new(vec![gen(0, 0, -0.1), gen(1, 1, 5.3)], vec![(0, 1)]).unwrap();
        assert_eq!(FilteredComplex::from_json(&c.to_json().unwrap()).unwrap(), c);
    }
}
