//! End-to-end checks that compare the circuits, the closed forms and the
//! sampler against each other. Drives the CLI's `verify` command.

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::algorithms::{one_query_distribution, run_two_query, two_query_distribution};
use crate::analysis::{
    in_affine_class, in_linear_class, p_affine, p_linear, simulated_success, DcFractions,
    CLASS_LEVEL,
};
use crate::boolfn::{
    check_register, dc_split, mask, truth_table, AffineSpec, Entry, PartialFunction,
    MAX_COMPLETION_N,
};
use crate::error::Result;
use crate::rng::{rng_from_seed, shot_rng, shot_seed, SimRng};
use crate::statevector::{OracleVariant, CIRCUIT_TOLERANCE, OP_TOLERANCE};

/// Agreement required between a closed form and the exact simulation.
pub const FORMULA_TOLERANCE: f64 = 1e-9;

/// Points per axis of the class-predicate grid.
pub const CLASS_GRID: usize = 500;

/// The closed forms under test; replaceable so that a broken formula can be
/// shown to fail.
#[derive(Clone, Copy)]
pub struct Formulas {
    pub p_linear: fn(&DcFractions) -> f64,
    pub p_affine: fn(&DcFractions) -> f64,
}

impl Default for Formulas {
    fn default() -> Self {
        Self { p_linear, p_affine }
    }
}

impl fmt::Debug for Formulas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Formulas")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub max_n: usize,
    pub masks: usize,
    pub shots: usize,
    pub seed: u64,
    pub formulas: Formulas,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_n: 4,
            masks: 50,
            shots: 10_000,
            seed: crate::rng::DEFAULT_SEED,
            formulas: Formulas::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First counterexample, in deterministic order.
    pub counterexample: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn from_cases(name: &'static str, outcomes: Vec<Option<String>>) -> Self {
        let failures = outcomes.iter().filter(|o| o.is_some()).count();
        Self {
            name,
            cases: outcomes.len(),
            failures,
            counterexample: outcomes.into_iter().flatten().next(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

/// Masks a uniformly random subset of size `d < N/2` (with `d` uniform).
pub fn random_below_half_mask(rng: &mut SimRng, spec: &AffineSpec) -> Result<PartialFunction> {
    let t = truth_table(spec)?;
    let len = t.outputs().len();
    let d = rng.random_range(0..(len / 2).max(1));
    mask(&t, sample(rng, len, d))
}

/// The same don't cares with every defined value flipped. Relative to the
/// complemented completion this exchanges `d0` and `d1`.
pub fn complement_defined(partial: &PartialFunction) -> PartialFunction {
    let entries = partial
        .entries()
        .iter()
        .map(|e| match e {
            Entry::Zero => Entry::One,
            Entry::One => Entry::Zero,
            Entry::DontCare => Entry::DontCare,
        })
        .collect();
    PartialFunction::new(partial.n(), entries).expect("same shape")
}

pub fn run_verification(config: &VerifyConfig) -> Result<VerifyReport> {
    check_register(config.max_n, MAX_COMPLETION_N)?;
    let ns: Vec<usize> = (1..=config.max_n).collect();
    let mut checks = vec![check_certainty(&ns)?, check_affinity_blindness(&ns)?];
    let (linear, affine) =
        check_formula_agreement(&ns, config.masks, config.seed, config.formulas)?;
    checks.push(linear);
    checks.push(affine);
    checks.push(check_sampling(&ns, config.shots, config.seed)?);
    checks.push(check_variant_symmetry(&ns, config.masks, config.seed)?);
    checks.push(check_class_equivalence(CLASS_GRID));
    Ok(VerifyReport { checks })
}

fn all_specs(ns: &[usize]) -> Result<Vec<AffineSpec>> {
    let mut specs = Vec::new();
    for &n in ns {
        specs.extend(AffineSpec::all(n)?);
    }
    Ok(specs)
}

/// Both circuits return the true answer with probability 1 when `d = 0`.
pub fn check_certainty(ns: &[usize]) -> Result<CheckResult> {
    let outcomes = all_specs(ns)?
        .par_iter()
        .map(|s| -> Result<Vec<Option<String>>> {
            let p = PartialFunction::from_truth_table(&truth_table(s)?);
            let want = 2 * s.linear_coeffs().value() as usize + s.affinity() as usize;
            let mut out = Vec::new();
            for v in [OracleVariant::Plus, OracleVariant::Minus] {
                let got = two_query_distribution(&p, v)?[want];
                out.push(
                    ((got - 1.0).abs() > CIRCUIT_TOLERANCE)
                        .then(|| format!("{s} with {} oracle: P(correct) = {got:.12}", v.name())),
                );
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckResult::from_cases(
        "certainty at d=0",
        outcomes.into_iter().flatten().collect(),
    ))
}

/// One-query distributions do not depend on `c_n`.
pub fn check_affinity_blindness(ns: &[usize]) -> Result<CheckResult> {
    let linear: Vec<AffineSpec> = all_specs(ns)?
        .into_iter()
        .filter(|s| s.is_linear())
        .collect();
    let outcomes = linear
        .par_iter()
        .map(|s| -> Result<Option<String>> {
            let a = one_query_distribution(
                &PartialFunction::from_truth_table(&truth_table(s)?),
                OracleVariant::Plus,
            )?;
            let b = one_query_distribution(
                &PartialFunction::from_truth_table(&truth_table(&s.complement())?),
                OracleVariant::Plus,
            )?;
            let worst = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok((worst > OP_TOLERANCE).then(|| format!("{s}: distributions differ by {worst:e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckResult::from_cases("affinity blindness", outcomes))
}

/// Closed forms against exact simulation on `masks` random masks per spec
/// with `d < N/2`, using the `Plus` oracle.
pub fn check_formula_agreement(
    ns: &[usize],
    masks: usize,
    seed: u64,
    formulas: Formulas,
) -> Result<(CheckResult, CheckResult)> {
    let specs = all_specs(ns)?;
    let per_spec = specs
        .par_iter()
        .enumerate()
        .map(|(idx, s)| -> Result<Vec<(Option<String>, Option<String>)>> {
            let mut rng = shot_rng(seed, idx as u64);
            let t = truth_table(s)?;
            (0..masks)
                .map(|_| {
                    let p = random_below_half_mask(&mut rng, s)?;
                    let split = dc_split(&p, &t)?;
                    let fr = DcFractions::from_counts(s.n(), split)?;
                    let sim = simulated_success(&p, s, OracleVariant::Plus)?;
                    let (pl, pa) = ((formulas.p_linear)(&fr), (formulas.p_affine)(&fr));
                    let describe = |what: &str, analytic: f64, simulated: f64| {
                        format!(
                            "{s}, g = {p} (d0={}, d1={}): {what} analytic {analytic:.12} vs simulated {simulated:.12}",
                            split.d0, split.d1
                        )
                    };
                    Ok((
                        ((pl - sim.p_linear).abs() > FORMULA_TOLERANCE)
                            .then(|| describe("P_L", pl, sim.p_linear)),
                        ((pa - sim.p_affine).abs() > FORMULA_TOLERANCE)
                            .then(|| describe("P_A", pa, sim.p_affine)),
                    ))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let (lin, aff): (Vec<_>, Vec<_>) = per_spec.into_iter().flatten().unzip();
    Ok((
        CheckResult::from_cases("P_L formula vs simulation", lin),
        CheckResult::from_cases("P_A formula vs simulation", aff),
    ))
}

/// Sampled two-query frequencies within 3 binomial standard deviations of
/// the exact probabilities, one random instance per `n`.
pub fn check_sampling(ns: &[usize], shots: usize, seed: u64) -> Result<CheckResult> {
    let mut outcomes = Vec::new();
    for &n in ns {
        let mut rng = rng_from_seed(shot_seed(seed ^ 0xA5A5, n as u64));
        let c = rng.random_range(0..1u64 << n);
        let s = AffineSpec::from_parts(n, c, rng.random())?;
        let p = random_below_half_mask(&mut rng, &s)?;
        let want = 2 * c as usize + s.affinity() as usize;
        let exact = two_query_distribution(&p, OracleVariant::Plus)?[want];
        let run_seed = shot_seed(seed, 1000 + n as u64);
        let hits = (0..shots as u64)
            .into_par_iter()
            .map(|k| -> Result<bool> {
                let (lin, a) = run_two_query(&p, OracleVariant::Plus, &mut shot_rng(run_seed, k))?;
                Ok(2 * lin.value() as usize + a as usize == want)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&h| h)
            .count();
        let freq = hits as f64 / shots.max(1) as f64;
        let sigma = (exact * (1.0 - exact) / shots.max(1) as f64).sqrt();
        outcomes.push(((freq - exact).abs() > 3.0 * sigma + 1e-12).then(|| {
            format!(
                "{s}, g = {p}: frequency {freq:.6} vs exact {exact:.6} (3σ = {:.6})",
                3.0 * sigma
            )
        }));
    }
    Ok(CheckResult::from_cases("sampling statistics", outcomes))
}

/// `Plus` on `g` and `Minus` on the role-swapped instance give the same
/// success probabilities, with the decoded affinity flipped.
pub fn check_variant_symmetry(ns: &[usize], masks: usize, seed: u64) -> Result<CheckResult> {
    let specs = all_specs(ns)?;
    let outcomes = specs
        .par_iter()
        .enumerate()
        .map(|(idx, s)| -> Result<Vec<Option<String>>> {
            let mut rng = shot_rng(seed ^ 0x5A5A, idx as u64);
            (0..masks.min(10))
                .map(|_| {
                    let p = random_below_half_mask(&mut rng, s)?;
                    let swapped = complement_defined(&p);
                    let worst = symmetry_gap(&p, &swapped)?;
                    Ok((worst > CIRCUIT_TOLERANCE).then(|| format!("{s}, g = {p}: gap {worst:e}")))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckResult::from_cases(
        "variant symmetry",
        outcomes.into_iter().flatten().collect(),
    ))
}

/// Largest difference between the `Plus` distributions of `p` and the `Minus`
/// distributions of `swapped`, with `c_n` relabelled.
pub fn symmetry_gap(p: &PartialFunction, swapped: &PartialFunction) -> Result<f64> {
    let one_a = one_query_distribution(p, OracleVariant::Plus)?;
    let one_b = one_query_distribution(swapped, OracleVariant::Minus)?;
    let two_a = two_query_distribution(p, OracleVariant::Plus)?;
    let two_b = two_query_distribution(swapped, OracleVariant::Minus)?;
    let one = one_a.iter().zip(&one_b).map(|(x, y)| (x - y).abs());
    let two = (0..two_a.len()).map(|k| (two_a[k] - two_b[k ^ 1]).abs());
    Ok(one.chain(two).fold(0.0, f64::max))
}

/// Closed-form class thresholds against `P >= 2/3` on a `grid x grid` mesh of
/// valid `(D, D1)`; disagreement is allowed only within 1e-9 of the level set.
pub fn check_class_equivalence(grid: usize) -> CheckResult {
    let outcomes = (0..grid)
        .into_par_iter()
        .flat_map_iter(|i| {
            let d = i as f64 * 0.5 / grid as f64;
            (0..grid).map(move |j| {
                let d1 = (j as f64 * d / (grid - 1) as f64).min(d);
                let fr = DcFractions::new(d, d1).expect("grid stays in range");
                let (pl, pa) = (p_linear(&fr), p_affine(&fr));
                let bad_lin =
                    in_linear_class(&fr) != (pl >= CLASS_LEVEL) && (pl - CLASS_LEVEL).abs() > 1e-9;
                let bad_aff =
                    in_affine_class(&fr) != (pa >= CLASS_LEVEL) && (pa - CLASS_LEVEL).abs() > 1e-9;
                (bad_lin || bad_aff)
                    .then(|| format!("D={d:.9}, D1={d1:.9}: P_L={pl:.12}, P_A={pa:.12}"))
            })
        })
        .collect();
    CheckResult::from_cases("class predicate equivalence", outcomes)
}
