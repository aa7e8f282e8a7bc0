//! Multiple-access-channel decodability engine.
//!
//! A receiver observes the downlink signal (SNR `γ_B`) superimposed with
//! `N_M` machine-type transmissions, each sent at the same fixed rate
//! `R_M = C(Γ_M)`. A candidate set `D` of MTD signals is jointly decodable,
//! with the complement folded into noise, iff every nonempty `S ⊆ D`
//! satisfies
//!
//! ```text
//! 1 + Σ_{i∈S} γ'_i ≥ (1 + Γ_M)^|S|,   γ'_i = γ_i / (1 + Σ_{j∉D} γ_j)
//! ```
//!
//! and the downlink rate admitted by a decodable `D` is
//!
//! ```text
//! min_{S ⊆ D} C(γ'_B + Σ_{i∈S} γ'_i) − |S|·R_M
//! ```
//!
//! Because every inequality groups devices only by cardinality, the binding
//! subset of each cardinality `k` is the one with the smallest SNR sum, and
//! swapping any member of a feasible set for a stronger outside device keeps
//! the set feasible without lowering its rate bound. Both searches therefore
//! reduce exactly to scanning the `N_M + 1` strongest-first prefixes; the
//! equivalence with full subset enumeration is exercised in the test suite.

use crate::channel::{LinSnr, Rate, SnrThreshold};
use crate::error::{Error, Result};

use std::f64::consts::LN_2;

/// Enumeration cap on the number of associated MTDs.
pub const MAX_MTDS: usize = 20;

/// Absolute slack on rate comparisons, protecting exact-formula versus
/// brute-force equality checks from floating-point noise.
pub const DECODABILITY_SLACK: f64 = 1e-12;

/// Relative slack on the non-strict MAC inequalities, so that boundary
/// constructions (feasible exactly at equality) survive rounding.
pub(crate) const FEASIBILITY_SLACK: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// One MAC realization: downlink SNR, the fixed MTD threshold Γ_M and the
/// instantaneous MTD SNRs.
#[derive(Debug, Clone, PartialEq)]
pub struct MacScenario {
    gamma_b: LinSnr,
    gamma_mtds: Vec<LinSnr>,
    gamma_m_threshold: SnrThreshold,
}

impl MacScenario {
    pub fn new(
        gamma_b: LinSnr,
        gamma_mtds: Vec<LinSnr>,
        gamma_m_threshold: SnrThreshold,
    ) -> Result<Self> {
        let count = gamma_mtds.len();
        if count == 0 || count > MAX_MTDS {
            return Err(Error::MtdCountOutOfRange { count, max: MAX_MTDS });
        }
        Ok(MacScenario { gamma_b, gamma_mtds, gamma_m_threshold })
    }

    pub fn gamma_b(&self) -> LinSnr {
        self.gamma_b
    }

    pub fn mtd_snrs(&self) -> &[LinSnr] {
        &self.gamma_mtds
    }

    pub fn gamma_m_threshold(&self) -> SnrThreshold {
        self.gamma_m_threshold
    }

    pub fn n_mtds(&self) -> usize {
        self.gamma_mtds.len()
    }

    /// MTD SNR values ranked strongest first; ties keep ascending index.
    fn ranked(&self) -> Vec<(f64, usize)> {
        let mut ranked: Vec<(f64, usize)> = self
            .gamma_mtds
            .iter()
            .enumerate()
            .map(|(i, g)| (g.value(), i))
            .collect();
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        ranked
    }
}

/// Aggregated decodability outcome for one scenario and candidate rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeVerdict {
    /// Indices (ascending) of the maximal jointly decodable MTD set.
    pub decodable_mtds: Vec<usize>,
    /// Whether the candidate downlink rate is decodable.
    pub downlink_decodable: bool,
    /// Brute-force maximal decodable downlink rate.
    pub max_downlink_rate: Rate,
}

/// Evaluate a scenario against a candidate downlink rate.
pub fn decode_verdict(scenario: &MacScenario, r_b: Rate) -> DecodeVerdict {
    DecodeVerdict {
        decodable_mtds: decodable_mtd_set(scenario),
        downlink_decodable: downlink_decodable(scenario, r_b),
        max_downlink_rate: max_downlink_rate(scenario),
    }
}

// ---------------------------------------------------------------------------
// MAC inequalities
// ---------------------------------------------------------------------------

/// Raw (unscaled) MAC inequality for one subset of MTDs:
/// `1 + Σ_{i∈subset} γ_i ≥ (1 + Γ_M)^|subset|`, non-strict.
pub fn mtd_subset_feasible(scenario: &MacScenario, subset: &[usize]) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let count = scenario.n_mtds();
    let mut seen = [false; MAX_MTDS];
    let mut sum = 0.0;
    for &index in subset {
        if index >= count {
            return Err(Error::IndexOutOfRange { index, count });
        }
        if seen[index] {
            return Err(Error::DuplicateIndex { index });
        }
        seen[index] = true;
        sum += scenario.gamma_mtds[index].value();
    }
    let rhs = one_plus_gm_pow(scenario.gamma_m_threshold.value(), subset.len());
    Ok(1.0 + sum >= rhs * (1.0 - FEASIBILITY_SLACK))
}

fn one_plus_gm_pow(gamma_m: f64, exponent: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exponent {
        acc *= 1.0 + gamma_m;
    }
    acc
}

/// Check the `k`-strongest prefix of `ranked` for joint decodability with
/// the complement folded into noise. `pow[j]` must hold `(1+Γ_M)^j`.
///
/// The inequality for cardinality `j` binds at the `j` weakest members of
/// the prefix, so ascending partial sums cover all `2^k − 1` subsets.
fn prefix_feasible(ranked: &[(f64, usize)], k: usize, noise: f64, pow: &[f64]) -> bool {
    let mut ascending_sum = 0.0;
    for j in 1..=k {
        ascending_sum += ranked[k - j].0;
        if noise + ascending_sum < pow[j] * noise * (1.0 - FEASIBILITY_SLACK) {
            return false;
        }
    }
    true
}

/// Largest `k` such that the `k` strongest MTDs are jointly decodable when
/// the remaining ones are treated as noise. Reads only the MTD SNRs.
fn best_decodable_count(ranked: &[(f64, usize)], gamma_m: f64) -> usize {
    let n = ranked.len();
    let mut pow = vec![1.0; n + 1];
    for j in 1..=n {
        pow[j] = pow[j - 1] * (1.0 + gamma_m);
    }
    // suffix[k] = total SNR outside the k-strongest prefix
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + ranked[k].0;
    }
    for k in (1..=n).rev() {
        if prefix_feasible(ranked, k, 1.0 + suffix[k], &pow) {
            return k;
        }
    }
    0
}

/// Maximum-cardinality jointly decodable MTD set, complement folded into
/// noise. Ties between equal-cardinality feasible sets resolve to the
/// largest total SNR, then to lexicographic index order; both are realized
/// by the strongest-first ranking. Independent of `γ_B` by construction.
pub fn decodable_mtd_set(scenario: &MacScenario) -> Vec<usize> {
    let ranked = scenario.ranked();
    let k = best_decodable_count(&ranked, scenario.gamma_m_threshold.value());
    let mut indices: Vec<usize> = ranked[..k].iter().map(|&(_, i)| i).collect();
    indices.sort_unstable();
    indices
}

// ---------------------------------------------------------------------------
// Downlink rate
// ---------------------------------------------------------------------------

/// Brute-force maximal downlink rate over all admissible decode sets.
///
/// For each decodable set the admitted rate is the minimum over subset
/// cardinalities of `C(γ'_B + Σ γ'_i) − |S|·R_M`; treating every MTD as
/// noise (the empty set) is always admissible, so the result is ≥ 0.
pub fn max_downlink_rate(scenario: &MacScenario) -> Rate {
    let ranked = scenario.ranked();
    let n = ranked.len();
    let gamma_m = scenario.gamma_m_threshold.value();
    let gamma_b = scenario.gamma_b.value();

    let mut pow = vec![1.0; n + 1];
    for j in 1..=n {
        pow[j] = pow[j - 1] * (1.0 + gamma_m);
    }
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + ranked[k].0;
    }

    let mut best = f64::NEG_INFINITY;
    for k in 0..=n {
        let noise = 1.0 + suffix[k];
        if k > 0 && !prefix_feasible(&ranked, k, noise, &pow) {
            continue;
        }
        // The cardinality-j term C(γ'_B + Σ γ'_i) − j·R_M, rewritten as a
        // single logarithm of a ratio so that near-cancelling constraints
        // (the worst-case equal-SNR construction) keep full precision:
        //   log2((noise + γ_B + Σ) / (noise·(1+Γ_M)^j))
        //     = ln_1p((γ_B + Σ − noise·((1+Γ_M)^j − 1)) / (noise·(1+Γ_M)^j)) / ln 2
        // The ascending sum carries a Neumaier compensation term so the
        // subtraction above cancels exactly instead of amplifying rounding.
        let mut bound = f64::INFINITY;
        let mut ascending_sum = 0.0;
        let mut compensation = 0.0;
        for j in 0..=k {
            if j > 0 {
                let x = ranked[k - j].0;
                let t = ascending_sum + x;
                compensation += if ascending_sum.abs() >= x.abs() {
                    (ascending_sum - t) + x
                } else {
                    (x - t) + ascending_sum
                };
                ascending_sum = t;
            }
            let diff = ((ascending_sum - noise * (pow[j] - 1.0)) + compensation) + gamma_b;
            let rate_j = (diff / (noise * pow[j])).ln_1p() / LN_2;
            if rate_j < bound {
                bound = rate_j;
            }
        }
        if bound > best {
            best = bound;
        }
    }
    Rate::new(best.max(0.0)).expect("rate bound is finite and nonnegative")
}

/// Whether the receiver can decode downlink rate `r_b` for this scenario.
pub fn downlink_decodable(scenario: &MacScenario, r_b: Rate) -> bool {
    r_b.value() <= max_downlink_rate(scenario).value() + DECODABILITY_SLACK
}

/// Maximal downlink rate under successive single-user decoding.
///
/// Repeatedly attempt to decode the strongest remaining MTD, treating all
/// other undecoded signals (including the downlink) as noise; cancel it on
/// success, stop on the first failure, then decode the downlink against
/// whatever remains. Decoding order is strongest current effective SNR
/// first, which coincides with strongest raw SNR first.
pub fn sd_max_downlink_rate(scenario: &MacScenario) -> Rate {
    let gamma_b = scenario.gamma_b.value();
    let gamma_m = scenario.gamma_m_threshold.value();
    let mut remaining: Vec<f64> = scenario.ranked().iter().map(|&(g, _)| g).collect();

    while let Some(&strongest) = remaining.first() {
        let others: f64 = remaining[1..].iter().sum();
        let denom = 1.0 + gamma_b + others;
        // effective SNR test strongest/denom ≥ Γ_M, multiplied through
        if strongest >= gamma_m * denom * (1.0 - FEASIBILITY_SLACK) {
            remaining.remove(0);
        } else {
            break;
        }
    }

    let residual: f64 = remaining.iter().sum();
    Rate::new((gamma_b / (1.0 + residual)).ln_1p() / LN_2)
        .expect("SIC residual rate is finite and nonnegative")
}

// ---------------------------------------------------------------------------
// Worst-case construction
// ---------------------------------------------------------------------------

/// Equal-SNR construction `γ_i = ((1+Γ_M)^n − 1)/n` under which all `n`
/// MTDs are jointly decodable with the full-set inequality met at equality,
/// and the admitted downlink rate attains the zero-outage minimum.
pub fn worst_case_mtd_snrs(gamma_m_threshold: SnrThreshold, n_m: usize) -> Result<Vec<LinSnr>> {
    if n_m == 0 || n_m > MAX_MTDS {
        return Err(Error::MtdCountOutOfRange { count: n_m, max: MAX_MTDS });
    }
    let value = (one_plus_gm_pow(gamma_m_threshold.value(), n_m) - 1.0) / n_m as f64;
    let snr = LinSnr::new(value)?;
    Ok(vec![snr; n_m])
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
