//! One-query and two-query identification of linear and affine functions.
//!
//! The one-query circuit is `H^{⊗(n+1)} · U · H^{⊗(n+1)}` on `|0⟩^{⊗n}|1⟩`
//! followed by a measurement of the input register. The two-query circuit
//! applies the oracle once more, measures the input register to get `C`, and
//! then reads the workspace. When `C` is a don't-care entry the workspace first
//! gets one classically controlled `H`. The workspace reading `w` decodes to
//! `c_n = 1 ⊕ w ⊕ parity(C)`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::boolfn::{BitString, PartialFunction};
use crate::error::{Error, Result};
use crate::rng::shot_rng;
use crate::statevector::{OracleVariant, StateVector};

/// Shots per oracle used when none is configured. 25 is the smallest count
/// that gets a simple majority above 95% at the 2/3 success floor.
pub const DEFAULT_TRIALS_PER_ORACLE: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Recover `C` with the one-query circuit.
    LinearOnly,
    /// Recover `(C, c_n)` with the two-query circuit.
    Affine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantPolicy {
    /// Choose the oracle from the presumptive `d0`, `d1` (see [`choose_variant`]).
    Auto,
    ForcePlus,
    ForceMinus,
    /// Split the shots evenly between both oracles and vote.
    BothWithVote,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub variant_policy: VariantPolicy,
    pub trials_per_oracle: usize,
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Affine,
            variant_policy: VariantPolicy::Auto,
            trials_per_oracle: DEFAULT_TRIALS_PER_ORACLE,
            rng_seed: crate::rng::DEFAULT_SEED,
        }
    }
}

/// A vote key: the coefficient string, plus the affinity in affine mode.
/// Orders by integer encoding, which is also the tie-break order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub linear: BitString,
    pub affinity: Option<bool>,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C={}", self.linear)?;
        if let Some(a) = self.affinity {
            write!(f, " c_n={}", a as u8)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantUsed {
    Single(OracleVariant),
    Both,
}

impl fmt::Display for VariantUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantUsed::Single(v) => f.write_str(v.name()),
            VariantUsed::Both => f.write_str("both"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentificationResult {
    pub linear: BitString,
    pub affinity: Option<bool>,
    pub vote_table: BTreeMap<Candidate, usize>,
    pub variant_used: VariantUsed,
    pub shots: usize,
    pub seed: u64,
    /// `d >= N/2`: the function may have several linear completions.
    pub ambiguous: bool,
    /// The presumptive DC split was negative, so no balanced completion exists.
    pub variant_anomaly: bool,
}

impl IdentificationResult {
    pub fn winner(&self) -> Candidate {
        Candidate {
            linear: self.linear,
            affinity: self.affinity,
        }
    }
}

/// State just before the one-query measurement.
pub fn one_query_state(partial: &PartialFunction, variant: OracleVariant) -> Result<StateVector> {
    let mut state = StateVector::new_register(partial.n())?;
    state.hadamard_all();
    state.apply_oracle(partial, variant)?;
    state.hadamard_all();
    Ok(state)
}

/// State after both queries, before any measurement.
pub fn two_query_state(partial: &PartialFunction, variant: OracleVariant) -> Result<StateVector> {
    let mut state = one_query_state(partial, variant)?;
    state.apply_oracle(partial, variant)?;
    Ok(state)
}

/// Exact distribution of the one-query outcome over the `2^n` strings `C`.
pub fn one_query_distribution(
    partial: &PartialFunction,
    variant: OracleVariant,
) -> Result<Vec<f64>> {
    Ok(one_query_state(partial, variant)?.exact_distribution(true))
}

/// Exact distribution of the two-query result `(C, c_n)`, indexed by
/// `2 C + c_n`, including the conditional workspace Hadamard.
pub fn two_query_distribution(
    partial: &PartialFunction,
    variant: OracleVariant,
) -> Result<Vec<f64>> {
    let state = two_query_state(partial, variant)?;
    let n = partial.n();
    let mut out = vec![0.0; 2 << n];
    for z in 0..partial.len() {
        let [mut a, mut b] = state.block(z);
        if partial.is_dc(z) {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            (a, b) = ((a + b) * h, (a - b) * h);
        }
        let c = BitString::new(n, z as u64)?;
        for (w, amp) in [(false, a), (true, b)] {
            out[2 * z + decode_cn(w, &c) as usize] += amp.norm_sqr();
        }
    }
    Ok(out)
}

pub fn run_one_query<R: Rng + ?Sized>(
    partial: &PartialFunction,
    variant: OracleVariant,
    rng: &mut R,
) -> Result<BitString> {
    one_query_state(partial, variant)?.measure_first_n(rng)
}

/// `c_n = 1 ⊕ w ⊕ parity(C)`.
pub fn decode_cn(workspace_bit: bool, c: &BitString) -> bool {
    !workspace_bit ^ c.parity()
}

pub fn run_two_query<R: Rng + ?Sized>(
    partial: &PartialFunction,
    variant: OracleVariant,
    rng: &mut R,
) -> Result<(BitString, bool)> {
    let mut state = two_query_state(partial, variant)?;
    let c = state.measure_first_n(rng)?;
    if partial.is_dc(c.value() as usize) {
        state.hadamard_workspace();
    }
    let w = state.measure_workspace(rng)?;
    Ok((c, decode_cn(w, &c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariantChoice {
    pub variant: OracleVariant,
    /// `N/2 - n0'`
    pub presumptive_d0: i64,
    /// `N/2 - n1'`
    pub presumptive_d1: i64,
    pub anomaly: bool,
}

/// `Plus` when the presumptive `d0 < d1`, `Minus` otherwise, from the
/// balanced-completion counts `d_b = N/2 - n_b'`. A negative count means no
/// balanced completion exists; that falls back to `Plus` and sets `anomaly`.
pub fn choose_variant(partial: &PartialFunction) -> VariantChoice {
    let half = (partial.len() / 2) as i64;
    let d0 = half - partial.n0_prime() as i64;
    let d1 = half - partial.n1_prime() as i64;
    let anomaly = d0 < 0 || d1 < 0;
    let variant = if anomaly || d0 < d1 {
        OracleVariant::Plus
    } else {
        OracleVariant::Minus
    };
    VariantChoice {
        variant,
        presumptive_d0: d0,
        presumptive_d1: d1,
        anomaly,
    }
}

/// Runs the configured shots and returns the most voted candidate, ties going
/// to the lowest candidate. Shot `k` draws from `shot_rng(seed, k)`, so the
/// tally does not depend on scheduling.
pub fn majority_vote(
    partial: &PartialFunction,
    config: &RunConfig,
) -> Result<IdentificationResult> {
    if config.trials_per_oracle == 0 {
        return Err(Error::InvalidArgument(
            "trials_per_oracle must be at least 1".into(),
        ));
    }
    let k = config.trials_per_oracle;
    let choice = choose_variant(partial);
    let (plan, variant_used) = match config.variant_policy {
        VariantPolicy::Auto => (
            vec![(choice.variant, 2 * k)],
            VariantUsed::Single(choice.variant),
        ),
        VariantPolicy::ForcePlus => (
            vec![(OracleVariant::Plus, 2 * k)],
            VariantUsed::Single(OracleVariant::Plus),
        ),
        VariantPolicy::ForceMinus => (
            vec![(OracleVariant::Minus, 2 * k)],
            VariantUsed::Single(OracleVariant::Minus),
        ),
        VariantPolicy::BothWithVote => (
            vec![(OracleVariant::Plus, k), (OracleVariant::Minus, k)],
            VariantUsed::Both,
        ),
    };
    let schedule: Vec<OracleVariant> = plan
        .iter()
        .flat_map(|&(v, count)| std::iter::repeat_n(v, count))
        .collect();

    let outcomes = schedule
        .par_iter()
        .enumerate()
        .map(|(shot, &variant)| {
            let mut rng = shot_rng(config.rng_seed, shot as u64);
            match config.mode {
                Mode::LinearOnly => run_one_query(partial, variant, &mut rng).map(|c| Candidate {
                    linear: c,
                    affinity: None,
                }),
                Mode::Affine => run_two_query(partial, variant, &mut rng).map(|(c, a)| Candidate {
                    linear: c,
                    affinity: Some(a),
                }),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut vote_table = BTreeMap::new();
    for c in outcomes {
        *vote_table.entry(c).or_insert(0usize) += 1;
    }
    let winner = plurality(&vote_table).expect("at least one shot");

    Ok(IdentificationResult {
        linear: winner.linear,
        affinity: winner.affinity,
        vote_table,
        variant_used,
        shots: schedule.len(),
        seed: config.rng_seed,
        ambiguous: partial.is_half_or_more_dc(),
        variant_anomaly: choice.anomaly,
    })
}

/// Highest count, lowest key among equals.
fn plurality(votes: &BTreeMap<Candidate, usize>) -> Option<Candidate> {
    let mut best: Option<(Candidate, usize)> = None;
    for (&c, &count) in votes {
        if best.is_none_or(|(_, top)| count > top) {
            best = Some((c, count));
        }
    }
    best.map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{mask, truth_table, AffineSpec, Entry};
    use crate::rng::rng_from_seed;
    use crate::statevector::{CIRCUIT_TOLERANCE, OP_TOLERANCE};

    fn spec(c: &str, cn: bool) -> AffineSpec {
        AffineSpec::new(c.parse().unwrap(), cn).unwrap()
    }

    fn full(s: &AffineSpec) -> PartialFunction {
        PartialFunction::from_truth_table(&truth_table(s).unwrap())
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn one_query_recovers_c_with_certainty() {
        for cn in [false, true] {
            let p = full(&spec("101", cn));
            let dist = one_query_distribution(&p, OracleVariant::Plus).unwrap();
            assert!((dist[0b101] - 1.0).abs() < CIRCUIT_TOLERANCE);
            let mut rng = rng_from_seed(1);
            for _ in 0..20 {
                assert_eq!(
                    run_one_query(&p, OracleVariant::Plus, &mut rng).unwrap(),
                    bs("101")
                );
            }
        }
    }

    #[test]
    fn one_query_final_state_is_a_single_basis_vector() {
        // (-1)^{c_n} |C⟩ ⊗ |1⟩
        for s in AffineSpec::all(4).unwrap() {
            let st = one_query_state(&full(&s), OracleVariant::Plus).unwrap();
            let c = s.linear_coeffs().value() as usize;
            let sign = if s.affinity() { -1.0 } else { 1.0 };
            assert!((st.amplitude(c, true).re - sign).abs() < CIRCUIT_TOLERANCE);
            assert!((st.norm_sqr() - st.amplitude(c, true).norm_sqr()).abs() < CIRCUIT_TOLERANCE);
        }
    }

    #[test]
    fn one_query_with_two_dc1_entries() {
        // C = 110, x_0 ⊕ x_1; mask two ON entries (indices 2 and 3).
        let s = spec("110", false);
        let p = mask(&truth_table(&s).unwrap(), [2, 3]).unwrap();
        let dist = one_query_distribution(&p, OracleVariant::Plus).unwrap();
        // γ0² + γ1² at n = 3, d0 = 0, d1 = 2, evaluated independently.
        assert!((dist[0b110] - 0.890_165_042_945).abs() < 1e-11);
    }

    #[test]
    fn decode_examples() {
        assert!(!decode_cn(true, &bs("000")));
        assert!(decode_cn(false, &bs("000")));
        assert!(!decode_cn(true, &bs("101")));
        assert!(decode_cn(true, &bs("100")));
    }

    #[test]
    fn decode_inverts_the_workspace_encoding() {
        for n in 1..=6 {
            for c in 0..1u64 << n {
                let c = BitString::new(n, c).unwrap();
                for cn in [false, true] {
                    assert_eq!(decode_cn(!cn ^ c.parity(), &c), cn);
                }
            }
        }
    }

    #[test]
    fn two_query_examples() {
        let mut rng = rng_from_seed(5);
        let p = full(&spec("110", true));
        for _ in 0..20 {
            assert_eq!(
                run_two_query(&p, OracleVariant::Plus, &mut rng).unwrap(),
                (bs("110"), true)
            );
        }
        let p = full(&spec("00", false));
        for _ in 0..20 {
            assert_eq!(
                run_two_query(&p, OracleVariant::Minus, &mut rng).unwrap(),
                (bs("00"), false)
            );
        }
    }

    #[test]
    fn two_query_certainty_for_complete_functions() {
        for n in 1..=5 {
            for s in AffineSpec::all(n).unwrap() {
                let p = full(&s);
                let want = 2 * s.linear_coeffs().value() as usize + s.affinity() as usize;
                for v in [OracleVariant::Plus, OracleVariant::Minus] {
                    let dist = two_query_distribution(&p, v).unwrap();
                    assert!((dist[want] - 1.0).abs() < CIRCUIT_TOLERANCE, "{s}");
                }
                let mut rng = rng_from_seed(n as u64);
                let got = run_two_query(&p, OracleVariant::Plus, &mut rng).unwrap();
                assert_eq!(got, (s.linear_coeffs(), s.affinity()));
            }
        }
    }

    #[test]
    fn one_query_is_blind_to_affinity() {
        for n in 1..=5 {
            for c in 0..1u64 << n {
                let lin = AffineSpec::from_parts(n, c, false).unwrap();
                let a = one_query_distribution(&full(&lin), OracleVariant::Plus).unwrap();
                let b =
                    one_query_distribution(&full(&lin.complement()), OracleVariant::Plus).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= OP_TOLERANCE);
                }
            }
        }
    }

    #[test]
    fn joint_success_when_c_is_defined() {
        // n = 3, C = 011, c_n = 1; mask two DC1 entries and one DC0 entry,
        // none of them at C = 3.
        let s = spec("011", true);
        let t = truth_table(&s).unwrap();
        let dc1: Vec<usize> = (0..8).filter(|&i| t.get(i) && i != 3).take(2).collect();
        let dc0: Vec<usize> = (0..8).filter(|&i| !t.get(i) && i != 3).take(1).collect();
        let p = mask(&t, dc1.iter().chain(&dc0).copied()).unwrap();
        assert!(!p.is_dc(3));
        let dist = two_query_distribution(&p, OracleVariant::Plus).unwrap();
        // γ1 at n = 3, d0 = 1, d1 = 2.
        let g1 = 1.0 - (2f64.sqrt() * 3.0 + 1.0 - 2.0) / (2f64.sqrt() * 8.0);
        assert!((dist[2 * 3 + 1] - g1 * g1).abs() < 1e-12);
    }

    #[test]
    fn joint_success_flips_when_c_is_a_dc1_entry() {
        // C = 01, c_n = 0 gives f(C) = 1; masking C makes it a DC1 entry and the
        // γ1 branch then decodes the wrong affinity.
        let s = spec("01", false);
        let p = mask(&truth_table(&s).unwrap(), [1]).unwrap();
        let dist = two_query_distribution(&p, OracleVariant::Plus).unwrap();
        let r = 2f64.sqrt();
        let g0 = -1.0 / (r * 4.0);
        let g1 = 1.0 - (r - 1.0) / (r * 4.0);
        assert!((dist[2] - g0 * g0).abs() < 1e-12);
        assert!((dist[3] - g1 * g1).abs() < 1e-12);
    }

    #[test]
    fn sampled_two_query_matches_exact_distribution() {
        let s = spec("1011", false);
        let mut t_dc: Vec<usize> = Vec::new();
        let t = truth_table(&s).unwrap();
        t_dc.extend((0..16).filter(|&i| t.get(i)).take(3));
        t_dc.extend((0..16).filter(|&i| !t.get(i)).take(1));
        let p = mask(&t, t_dc).unwrap();
        let exact = two_query_distribution(&p, OracleVariant::Plus).unwrap();
        let target = 2 * 0b1011;
        let shots = 10_000;
        let hits = (0..shots)
            .filter(|&k| {
                let mut rng = shot_rng(99, k);
                let (c, a) = run_two_query(&p, OracleVariant::Plus, &mut rng).unwrap();
                2 * c.value() as usize + a as usize == target
            })
            .count();
        let pr = exact[target];
        let sigma = (pr * (1.0 - pr) / shots as f64).sqrt();
        assert!((hits as f64 / shots as f64 - pr).abs() <= 3.0 * sigma);
    }

    #[test]
    fn variant_selection_examples() {
        // n = 3, N/2 = 4: every don't care hides a zero (n1' = 4).
        let t = truth_table(&spec("100", false)).unwrap();
        let p = mask(&t, [0, 1]).unwrap();
        let ch = choose_variant(&p);
        assert_eq!((ch.presumptive_d0, ch.presumptive_d1), (2, 0));
        assert_eq!(ch.variant, OracleVariant::Minus);

        let p = mask(&t, [4, 5]).unwrap();
        assert_eq!(choose_variant(&p).variant, OracleVariant::Plus);

        let ch = choose_variant(&full(&spec("100", false)));
        assert_eq!(ch.variant, OracleVariant::Minus);
        assert!(!ch.anomaly);
    }

    #[test]
    fn variant_selection_flags_unbalanced_inputs() {
        // Constant zero: n0' = N > N/2.
        let ch = choose_variant(&full(&spec("00", false)));
        assert!(ch.anomaly);
        assert_eq!(ch.variant, OracleVariant::Plus);
    }

    #[test]
    fn majority_vote_is_unanimous_at_d0() {
        let s = spec("1101", true);
        for policy in [
            VariantPolicy::Auto,
            VariantPolicy::ForcePlus,
            VariantPolicy::ForceMinus,
            VariantPolicy::BothWithVote,
        ] {
            let cfg = RunConfig {
                variant_policy: policy,
                trials_per_oracle: 7,
                ..RunConfig::default()
            };
            let r = majority_vote(&full(&s), &cfg).unwrap();
            assert_eq!((r.linear, r.affinity), (s.linear_coeffs(), Some(true)));
            assert_eq!(r.vote_table.len(), 1);
            assert_eq!(r.vote_table.values().sum::<usize>(), 14);
            assert_eq!(r.shots, 14);
        }
    }

    #[test]
    fn majority_vote_linear_mode_omits_affinity() {
        let cfg = RunConfig {
            mode: Mode::LinearOnly,
            ..RunConfig::default()
        };
        let r = majority_vote(&full(&spec("011", true)), &cfg).unwrap();
        assert_eq!(r.affinity, None);
        assert_eq!(r.linear, bs("011"));
    }

    #[test]
    fn majority_vote_is_reproducible() {
        let t = truth_table(&spec("0110", false)).unwrap();
        let p = mask(&t, [1, 2, 9]).unwrap();
        let cfg = RunConfig {
            variant_policy: VariantPolicy::BothWithVote,
            rng_seed: 42,
            ..RunConfig::default()
        };
        assert_eq!(
            majority_vote(&p, &cfg).unwrap(),
            majority_vote(&p, &cfg).unwrap()
        );
    }

    #[test]
    fn majority_vote_rejects_zero_trials() {
        let cfg = RunConfig {
            trials_per_oracle: 0,
            ..RunConfig::default()
        };
        assert!(matches!(
            majority_vote(&full(&spec("1", false)), &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn majority_vote_splits_on_half_dc() {
        // n = 2, C1 = 01, C2 = 10: they differ at indices 1 and 2.
        let p = mask(&truth_table(&spec("01", false)).unwrap(), [1, 2]).unwrap();
        let cfg = RunConfig {
            mode: Mode::LinearOnly,
            variant_policy: VariantPolicy::ForcePlus,
            trials_per_oracle: 2000,
            rng_seed: 8,
        };
        let r = majority_vote(&p, &cfg).unwrap();
        assert!(r.ambiguous);
        let share = |c: &str| {
            let key = Candidate {
                linear: bs(c),
                affinity: None,
            };
            *r.vote_table.get(&key).unwrap_or(&0) as f64 / r.shots as f64
        };
        let sigma = (0.25 * 0.75 / r.shots as f64).sqrt();
        assert!((share("01") - 0.25).abs() < 3.0 * sigma);
        assert!((share("10") - 0.25).abs() < 3.0 * sigma);
    }

    #[test]
    fn plurality_breaks_ties_low() {
        let mut votes = BTreeMap::new();
        let key = |v| Candidate {
            linear: BitString::new(2, v).unwrap(),
            affinity: Some(false),
        };
        votes.insert(key(3), 4);
        votes.insert(key(1), 4);
        votes.insert(key(2), 1);
        assert_eq!(plurality(&votes), Some(key(1)));
    }

    #[test]
    fn dc_free_blocks_ignore_variant() {
        let p = PartialFunction::new(2, vec![Entry::One, Entry::Zero, Entry::Zero, Entry::One])
            .unwrap();
        assert_eq!(
            two_query_distribution(&p, OracleVariant::Plus).unwrap(),
            two_query_distribution(&p, OracleVariant::Minus).unwrap()
        );
    }
}
