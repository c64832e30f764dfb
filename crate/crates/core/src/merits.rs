//! Figures of merit of a pure ground state: entanglement entropy across a
//! bipartition, mean magnetization, l1 coherence and fidelity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::QuantumState;

/// Squared singular values below this are treated as zero.
pub const SCHMIDT_CUTOFF: f64 = 1e-14;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// Split of the sites into two non-empty groups. Sites are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut left: Vec<usize>, mut right: Vec<usize>, n_sites: usize) -> Result<Self> {
        left.sort_unstable();
        right.sort_unstable();
        if left.is_empty() || right.is_empty() {
            return Err(Error::validation("both sides of a bipartition must be non-empty"));
        }
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (1..=n_sites).collect::<Vec<_>>() {
            return Err(Error::validation(format!(
                "bipartition {left:?}|{right:?} does not split sites 1..={n_sites} into disjoint groups"
            )));
        }
        Ok(Bipartition { left, right })
    }

    /// First `k` sites against the remaining `n_sites - k`.
    pub fn split(n_sites: usize, k: usize) -> Result<Self> {
        Bipartition::new((1..=k).collect(), (k + 1..=n_sites).collect(), n_sites)
    }

    /// `{n/2 | n - n/2, 1 | n-1, n-1 | 1}` without duplicates; for four sites
    /// this is `2|2, 1|3, 3|1`.
    pub fn default_set(n_sites: usize) -> Vec<Bipartition> {
        let mut out: Vec<Bipartition> = Vec::new();
        for k in [n_sites / 2, 1, n_sites.saturating_sub(1)] {
            if let Ok(p) = Bipartition::split(n_sites, k) {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_sites(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// The reversed split, `right|left`.
    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    fn is_contiguous_split(&self) -> bool {
        self.left.iter().copied().eq(1..=self.left.len())
    }

    /// `"2|2"` for contiguous splits, `"{1,3}|{2,4}"` otherwise.
    pub fn label(&self) -> String {
        if self.is_contiguous_split() {
            format!("{}|{}", self.left.len(), self.right.len())
        } else {
            let list = |s: &[usize]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            format!("{{{}}}|{{{}}}", list(&self.left), list(&self.right))
        }
    }

    /// Result-table column name, e.g. `entropy_2_2`.
    pub fn column_name(&self) -> String {
        let cleaned: String = self
            .label()
            .chars()
            .map(|c| match c {
                '|' | ',' => '_',
                c => c,
            })
            .filter(|c| *c != '{' && *c != '}')
            .collect();
        format!("entropy_{cleaned}")
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::config(format!(
                "invalid partition `{s}`; expected `a|b` (e.g. \"2|2\") or `{{1,3}}|{{2,4}}`"
            ))
        };
        let (l, r) = s.split_once('|').ok_or_else(bad)?;
        let (l, r) = (l.trim(), r.trim());
        if l.starts_with('{') {
            let parse = |side: &str| -> Result<Vec<usize>> {
                side.strip_prefix('{')
                    .and_then(|x| x.strip_suffix('}'))
                    .ok_or_else(bad)?
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                    .collect()
            };
            let (left, right) = (parse(l)?, parse(r)?);
            let n = left.len() + right.len();
            Bipartition::new(left, right, n).map_err(|e| Error::config(format!("partition `{s}`: {e}")))
        } else {
            let a: usize = l.parse().map_err(|_| bad())?;
            let b: usize = r.parse().map_err(|_| bad())?;
            Bipartition::split(a + b, a).map_err(|e| Error::config(format!("partition `{s}`: {e}")))
        }
    }
}

impl Serialize for Bipartition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Bipartition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Logarithm base for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    /// Nats.
    #[default]
    Natural,
    /// Bits.
    Binary,
}

impl LogBase {
    fn scale(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Binary => std::f64::consts::LN_2.recip(),
        }
    }
}

/// Reshapes the amplitudes into the coefficient matrix `A[l, r]` of the
/// bipartition, keeping the site order within each side.
fn coefficient_matrix(state: &QuantumState, part: &Bipartition) -> Result<DMatrix<Complex64>> {
    let n = state.n_sites();
    if part.n_sites() != n {
        return Err(Error::validation(format!(
            "partition {part} covers {} sites but the state has {n}",
            part.n_sites()
        )));
    }
    let bit = |site: usize| n - site; // one-based site 1 is the top bit
    let sub_index = |b: usize, sites: &[usize]| {
        sites
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((b >> bit(s)) & 1))
    };
    let mut a = DMatrix::zeros(1 << part.left.len(), 1 << part.right.len());
    for (b, amp) in state.amplitudes().iter().enumerate() {
        a[(sub_index(b, &part.left), sub_index(b, &part.right))] = *amp;
    }
    Ok(a)
}

/// Von Neumann entanglement entropy in nats.
pub fn entanglement_entropy(state: &QuantumState, part: &Bipartition) -> Result<f64> {
    entanglement_entropy_in(state, part, LogBase::Natural)
}

pub fn entanglement_entropy_in(state: &QuantumState, part: &Bipartition, base: LogBase) -> Result<f64> {
    let a = coefficient_matrix(state, part)?;
    let svd = SVD::try_new(a, false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("SVD of the coefficient matrix did not converge"))?;
    let s: f64 = svd
        .singular_values
        .iter()
        .map(|sv| sv * sv)
        .filter(|&p| p >= SCHMIDT_CUTOFF)
        .map(|p| -p * p.ln())
        .sum();
    Ok(s.max(0.0) * base.scale())
}

/// `(1/N) Σ_i ⟨Z_i⟩`.
pub fn mean_magnetization(state: &QuantumState) -> f64 {
    let n = state.n_sites();
    if n == 0 {
        return 0.0;
    }
    let total: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(b, a)| {
            let down = b.count_ones() as f64;
            a.norm_sqr() * (n as f64 - 2.0 * down)
        })
        .sum();
    (total / n as f64).clamp(-1.0, 1.0)
}

/// Sum of absolute off-diagonal elements of `|ψ⟩⟨ψ|`.
pub fn coherence_l1(state: &QuantumState) -> f64 {
    let (l1, l2sq) = state
        .amplitudes()
        .iter()
        .fold((0.0, 0.0), |(s, q), a| (s + a.norm(), q + a.norm_sqr()));
    (l1 * l1 - l2sq).max(0.0)
}

/// `|⟨target|state⟩|²`.
pub fn fidelity(state: &QuantumState, target: &QuantumState) -> Result<f64> {
    Ok(target.inner(state)?.norm_sqr().clamp(0.0, 1.0))
}

/// Weight of `state` in the span of orthonormal `targets`.
pub fn fidelity_to_subspace(state: &QuantumState, targets: &[QuantumState]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::validation("target subspace is empty"));
    }
    for (a, ta) in targets.iter().enumerate() {
        for tb in &targets[a..] {
            let overlap = ta.inner(tb)?;
            let expected = if std::ptr::eq(ta, tb) { 1.0 } else { 0.0 };
            if (overlap - Complex64::new(expected, 0.0)).norm() > ORTHONORMAL_TOL {
                return Err(Error::validation(format!(
                    "target states are not orthonormal (overlap {overlap})"
                )));
            }
        }
    }
    let total: f64 = targets
        .iter()
        .map(|t| t.inner(state).map(|z| z.norm_sqr()))
        .sum::<Result<f64>>()?;
    Ok(total.clamp(0.0, 1.0))
}

/// Every merit of one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeritSet {
    /// One entry per configured partition, in order.
    pub entropies: Vec<f64>,
    pub magnetization: f64,
    pub coherence_l1: f64,
    pub fidelity: f64,
}

impl MeritSet {
    pub fn evaluate(
        state: &QuantumState,
        partitions: &[Bipartition],
        targets: &[QuantumState],
        base: LogBase,
    ) -> Result<Self> {
        let entropies = partitions
            .iter()
            .map(|p| entanglement_entropy_in(state, p, base))
            .collect::<Result<Vec<_>>>()?;
        let fidelity = match targets {
            [single] => fidelity(state, single)?,
            many => fidelity_to_subspace(state, many)?,
        };
        Ok(MeritSet {
            entropies,
            magnetization: mean_magnetization(state),
            coherence_l1: coherence_l1(state),
            fidelity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ghz(n: usize) -> QuantumState {
        let dim = 1 << n;
        let mut v = vec![c(0.0); dim];
        v[0] = c(1.0 / 2f64.sqrt());
        v[dim - 1] = c(1.0 / 2f64.sqrt());
        QuantumState::new(v).unwrap()
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let s = QuantumState::basis(4, 15).unwrap();
        for p in Bipartition::default_set(4) {
            assert_eq!(entanglement_entropy(&s, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn bell_and_ghz_entropy() {
        let bell = ghz(2);
        let p = Bipartition::split(2, 1).unwrap();
        assert!((entanglement_entropy(&bell, &p).unwrap() - LN_2).abs() < 1e-12);
        assert!((entanglement_entropy(&bell, &p).unwrap() - 2f64.ln()).abs() < 1e-12);
        let g = ghz(4);
        let p = Bipartition::split(4, 2).unwrap();
        assert!((entanglement_entropy(&g, &p).unwrap() - LN_2).abs() < 1e-12);
        assert!((entanglement_entropy_in(&g, &p, LogBase::Binary).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_contiguous_partition() {
        // Bell pair on sites 2 and 4, sites 1 and 3 in |0>.
        let mut v = vec![c(0.0); 16];
        v[0b0000] = c(1.0 / 2f64.sqrt());
        v[0b0101] = c(1.0 / 2f64.sqrt());
        let s = QuantumState::new(v).unwrap();
        let mid = Bipartition::split(4, 2).unwrap();
        let odd_even = Bipartition::new(vec![1, 3], vec![2, 4], 4).unwrap();
        assert!((entanglement_entropy(&s, &mid).unwrap() - LN_2).abs() < 1e-12);
        assert!(entanglement_entropy(&s, &odd_even).unwrap().abs() < 1e-12);
        assert!(entanglement_entropy(&s, &odd_even.swapped()).unwrap().abs() < 1e-12);
        assert_eq!(odd_even.label(), "{1,3}|{2,4}");
        assert_eq!(odd_even.column_name(), "entropy_1_3_2_4");
        let back: Bipartition = odd_even.label().parse().unwrap();
        assert_eq!(back, odd_even);
    }

    #[test]
    fn separable_across_grouping() {
        // Bell pair on sites 1,3 and |00> on 2,4: zero entropy for {1,3}|{2,4}.
        let mut v = vec![c(0.0); 16];
        v[0b0000] = c(1.0 / 2f64.sqrt());
        v[0b1010] = c(1.0 / 2f64.sqrt());
        let s = QuantumState::new(v).unwrap();
        let grouping = Bipartition::new(vec![1, 3], vec![2, 4], 4).unwrap();
        assert!(entanglement_entropy(&s, &grouping).unwrap().abs() < 1e-12);
        let mid = Bipartition::split(4, 2).unwrap();
        assert!((entanglement_entropy(&s, &mid).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn partition_validation() {
        assert!(Bipartition::new(vec![], vec![1, 2], 2).is_err());
        assert!(Bipartition::new(vec![1, 2], vec![2, 3], 3).is_err());
        assert!(Bipartition::new(vec![1], vec![3], 3).is_err());
        assert!("2|2".parse::<Bipartition>().is_ok());
        assert!("0|4".parse::<Bipartition>().is_err());
        assert!("22".parse::<Bipartition>().is_err());
        let labels: Vec<String> = Bipartition::default_set(4).iter().map(|p| p.label()).collect();
        assert_eq!(labels, vec!["2|2", "1|3", "3|1"]);
        assert_eq!(Bipartition::default_set(2).len(), 1);
        assert!(Bipartition::default_set(1).is_empty());
        let p = Bipartition::split(4, 2).unwrap();
        assert!(entanglement_entropy(&ghz(3), &p).is_err());
    }

    #[test]
    fn magnetization_examples() {
        assert_eq!(mean_magnetization(&QuantumState::basis(4, 15).unwrap()), -1.0);
        assert!(mean_magnetization(&QuantumState::uniform(4)).abs() < 1e-15);
        assert_eq!(mean_magnetization(&QuantumState::basis(2, 2).unwrap()), 0.0);
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(coherence_l1(&QuantumState::basis(3, 5).unwrap()), 0.0);
        assert!((coherence_l1(&QuantumState::uniform(4)) - 15.0).abs() < 1e-12);
        assert!((coherence_l1(&QuantumState::uniform(1)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let zero = QuantumState::basis(1, 0).unwrap();
        let one = QuantumState::basis(1, 1).unwrap();
        let plus = QuantumState::uniform(1);
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&plus, &QuantumState::uniform(2)).is_err());
    }

    #[test]
    fn subspace_fidelity_examples() {
        let b = |k| QuantumState::basis(2, k).unwrap();
        let plus = QuantumState::uniform(1);
        let zero = QuantumState::basis(1, 0).unwrap();
        assert_eq!(
            fidelity_to_subspace(&plus, std::slice::from_ref(&zero)).unwrap(),
            fidelity(&plus, &zero).unwrap()
        );
        let inside = QuantumState::new(vec![c(0.6), c(0.8), c(0.0), c(0.0)]).unwrap();
        assert!((fidelity_to_subspace(&inside, &[b(0), b(1)]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity_to_subspace(&b(3), &[b(0), b(1)]).unwrap(), 0.0);
        assert!(fidelity_to_subspace(&inside, &[b(0), inside.clone()]).is_err());
        assert!(fidelity_to_subspace(&inside, &[]).is_err());
    }

    fn arb_state(max_sites: usize) -> impl Strategy<Value = QuantumState> {
        (1..=max_sites).prop_flat_map(|n| {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map(
                "zero vector",
                |raw| QuantumState::normalized(raw.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).ok(),
            )
        })
    }

    fn arb_state_with_partition() -> impl Strategy<Value = (QuantumState, Bipartition)> {
        (2usize..=6).prop_flat_map(|n| {
            (
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n),
                proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 1..n),
            )
                .prop_filter_map("zero vector", move |(raw, left)| {
                    let state =
                        QuantumState::normalized(raw.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).ok()?;
                    let right = (1..=n).filter(|s| !left.contains(s)).collect();
                    Some((state, Bipartition::new(left, right, n).unwrap()))
                })
        })
    }

    /// Direct double sum over off-diagonal density-matrix elements.
    fn coherence_oracle(s: &QuantumState) -> f64 {
        let a = s.amplitudes();
        let mut total = 0.0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                if i != j {
                    total += (a[i] * a[j].conj()).norm();
                }
            }
        }
        total
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn entropy_symmetric_and_bounded((s, p) in arb_state_with_partition()) {
            let forward = entanglement_entropy(&s, &p).unwrap();
            let backward = entanglement_entropy(&s, &p.swapped()).unwrap();
            prop_assert!((forward - backward).abs() <= 1e-12);
            let bound = p.left().len().min(p.right().len()) as f64 * LN_2;
            prop_assert!(forward >= 0.0 && forward <= bound + 1e-12);
        }

        #[test]
        fn coherence_identity(s in arb_state(6)) {
            let l1: f64 = s.amplitudes().iter().map(|a| a.norm()).sum();
            let c = coherence_l1(&s);
            prop_assert!((c - (l1 * l1 - 1.0)).abs() <= 1e-10);
            prop_assert!((c - coherence_oracle(&s)).abs() <= 1e-10);
        }

        #[test]
        fn fidelity_symmetric_in_range(
            (a, b) in (1usize..=5).prop_flat_map(|n| {
                let v = move || proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
                    .prop_filter_map("zero", |raw| QuantumState::normalized(raw.into_iter().map(|(x, y)| Complex64::new(x, y)).collect()).ok());
                (v(), v())
            })
        ) {
            let f = fidelity(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!((f - fidelity(&b, &a).unwrap()).abs() <= 1e-15);
        }

        #[test]
        fn merits_are_phase_invariant((s, p) in arb_state_with_partition(), phi in 0.0f64..std::f64::consts::TAU) {
            let t = s.with_global_phase(phi);
            prop_assert!((entanglement_entropy(&s, &p).unwrap() - entanglement_entropy(&t, &p).unwrap()).abs() <= 1e-12);
            prop_assert!((mean_magnetization(&s) - mean_magnetization(&t)).abs() <= 1e-12);
            prop_assert!((coherence_l1(&s) - coherence_l1(&t)).abs() <= 1e-12);
            let target = QuantumState::uniform(s.n_sites());
            prop_assert!((fidelity(&s, &target).unwrap() - fidelity(&t, &target).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn product_state_magnetization(bits in proptest::collection::vec(proptest::bool::ANY, 1..=8)) {
            let n = bits.len();
            let index = bits.iter().fold(0usize, |acc, &down| (acc << 1) | down as usize);
            let s = QuantumState::basis(n, index).unwrap();
            let mean = bits.iter().map(|&down| if down { -1.0 } else { 1.0 }).sum::<f64>() / n as f64;
            prop_assert!((mean_magnetization(&s) - mean).abs() <= 1e-15);
        }
    }
}
