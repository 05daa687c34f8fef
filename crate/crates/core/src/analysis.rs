//! Closed-form success probabilities, the 2/3-success class predicates, and
//! the `(D, D1)` landscape sweep.
//!
//! `D = d/N`, `D0 = d0/N` and `D1 = d1/N` are the don't-care counts normalized
//! by `N = 2^n`, where `d0` and `d1` count the don't cares that the true
//! completion sets to 0 and 1. With the `Plus` oracle the amplitudes of the
//! correct string `C` just before the one-query measurement are
//!
//! ```text
//! γ0 = (d0 - d1) / (√2 N)                    on |C⟩|0⟩
//! γ1 = 1 - (√2 d + d0 - d1) / (√2 N)         on |C⟩|1⟩
//! ```
//!
//! up to the unobservable global sign `(-1)^{c_n}`, which is dropped here.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::io::{self, Write};

use rayon::prelude::*;

use crate::algorithms::{one_query_distribution, two_query_distribution};
use crate::boolfn::{dc_split, mask, truth_table, AffineSpec, BitString, DcSplit, PartialFunction};
use crate::error::{Error, Result};
use crate::statevector::OracleVariant;

/// Success level that defines the bounded-error classes.
pub const CLASS_LEVEL: f64 = 2.0 / 3.0;

/// Normalized don't-care counts, `0 <= D < 1/2` and `D0 + D1 = D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DcFractions {
    d: f64,
    d0: f64,
    d1: f64,
}

impl DcFractions {
    pub fn new(d: f64, d1: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&d) {
            return Err(Error::Domain(format!("D = {d} is outside [0, 1/2)")));
        }
        if !(0.0..=d).contains(&d1) {
            return Err(Error::Domain(format!("D1 = {d1} is outside [0, D = {d}]")));
        }
        Ok(Self { d, d0: d - d1, d1 })
    }

    pub fn from_counts(n: usize, split: DcSplit) -> Result<Self> {
        check_counts(n, split)?;
        let big_n = (1u64 << n) as f64;
        Ok(Self {
            d: split.total() as f64 / big_n,
            d0: split.d0 as f64 / big_n,
            d1: split.d1 as f64 / big_n,
        })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPair {
    pub gamma0: f64,
    pub gamma1: f64,
}

impl GammaPair {
    pub fn p_linear(&self) -> f64 {
        self.gamma0 * self.gamma0 + self.gamma1 * self.gamma1
    }

    pub fn p_affine(&self) -> f64 {
        self.gamma1 * self.gamma1
    }
}

fn check_counts(n: usize, split: DcSplit) -> Result<()> {
    if n == 0 || n > 62 {
        return Err(Error::Domain(format!("n = {n} is outside 1..=62")));
    }
    let half = 1usize << (n - 1);
    if split.total() >= half {
        return Err(Error::Domain(format!(
            "d = {} is not below N/2 = {half}",
            split.total()
        )));
    }
    Ok(())
}

/// Amplitudes of `|C⟩|0⟩` and `|C⟩|1⟩` for integer counts with `d0 + d1 < N/2`.
pub fn gammas(n: usize, d0: usize, d1: usize) -> Result<GammaPair> {
    check_counts(n, DcSplit { d0, d1 })?;
    let scale = SQRT_2 * (1u64 << n) as f64;
    let (d0, d1) = (d0 as f64, d1 as f64);
    Ok(GammaPair {
        gamma0: (d0 - d1) / scale,
        gamma1: 1.0 - (SQRT_2 * (d0 + d1) + d0 - d1) / scale,
    })
}

/// `P_L = (1 - (1 + 1/√2) D + √2 D1)² + (D/√2 - √2 D1)²`.
pub fn p_linear(fr: &DcFractions) -> f64 {
    let a = 1.0 - (1.0 + FRAC_1_SQRT_2) * fr.d + SQRT_2 * fr.d1;
    let b = FRAC_1_SQRT_2 * fr.d - SQRT_2 * fr.d1;
    a * a + b * b
}

/// `P_A = (1 - (1 + 1/√2) D + √2 D1)²`.
pub fn p_affine(fr: &DcFractions) -> f64 {
    let a = 1.0 - (1.0 + FRAC_1_SQRT_2) * fr.d + SQRT_2 * fr.d1;
    a * a
}

/// Smallest `D1` with `P_L >= 2/3` at fixed `D`: `(√(K1² + 4 K2) - K1) / 4`
/// with `K1 = √2 - (2 + √2) D` and `K2 = (2 + √2) D (1 - D) - 1/3`.
/// `None` when the discriminant is negative and the quadratic has no real root.
pub fn linear_class_threshold(d: f64) -> Option<f64> {
    let k1 = SQRT_2 - (2.0 + SQRT_2) * d;
    let k2 = (2.0 + SQRT_2) * d * (1.0 - d) - 1.0 / 3.0;
    let disc = k1 * k1 + 4.0 * k2;
    (disc >= 0.0).then(|| (disc.sqrt() - k1) / 4.0)
}

/// Smallest `D1` with `P_A >= 2/3` at fixed `D`: `1/√3 - 1/√2 + ((1 + √2)/2) D`.
pub fn affine_class_threshold(d: f64) -> f64 {
    1.0 / 3f64.sqrt() - FRAC_1_SQRT_2 + (1.0 + SQRT_2) / 2.0 * d
}

pub fn in_linear_class(fr: &DcFractions) -> bool {
    match linear_class_threshold(fr.d) {
        Some(t) => fr.d1 >= t,
        None => p_linear(fr) >= CLASS_LEVEL,
    }
}

pub fn in_affine_class(fr: &DcFractions) -> bool {
    fr.d1 >= affine_class_threshold(fr.d)
}

/// The partial function that agrees with the linear functions `C1` and `C2`
/// where they agree and is a don't care where they differ (`d = N/2`).
pub fn half_dc_instance(c1: &BitString, c2: &BitString) -> Result<PartialFunction> {
    check_pair(c1, c2)?;
    let f1 = truth_table(&AffineSpec::linear(*c1)?)?;
    let diff = c1.value() ^ c2.value();
    let dc = (0..f1.outputs().len()).filter(|&x| crate::boolfn::parity_u64(diff & x as u64));
    mask(&f1, dc)
}

fn check_pair(c1: &BitString, c2: &BitString) -> Result<()> {
    if c1.width() != c2.width() {
        return Err(Error::DimensionMismatch {
            expected: c1.width(),
            found: c2.width(),
        });
    }
    if c1 == c2 {
        return Err(Error::Domain("C1 and C2 must differ".into()));
    }
    Ok(())
}

/// Predicted one-query (`Plus`) distribution over `C` for
/// [`half_dc_instance`]`(C1, C2)`.
///
/// The pre-measurement state is
/// `½(|C1⟩ + |C2⟩)|1⟩ + ½(|0ⁿ⟩ - |C1 ⊕ C2⟩)(|0⟩ - |1⟩)/√2`, so when
/// `C1`, `C2`, `0ⁿ` and `C1 ⊕ C2` are distinct each gets probability 1/4.
/// Coinciding strings (one of `C1`, `C2` is zero) interfere and are summed
/// amplitude-wise.
pub fn half_dc_case(n: usize, c1: &BitString, c2: &BitString) -> Result<Vec<f64>> {
    check_pair(c1, c2)?;
    if c1.width() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c1.width(),
        });
    }
    crate::boolfn::check_register(n, crate::boolfn::MAX_REGISTER_N)?;
    let len = 1usize << n;
    let mut amp0 = vec![0.0; len];
    let mut amp1 = vec![0.0; len];
    let q = 0.5 * FRAC_1_SQRT_2;
    amp1[c1.value() as usize] += 0.5;
    amp1[c2.value() as usize] += 0.5;
    let mix = (c1.value() ^ c2.value()) as usize;
    amp0[0] += q;
    amp1[0] -= q;
    amp0[mix] -= q;
    amp1[mix] += q;
    Ok(amp0.iter().zip(&amp1).map(|(a, b)| a * a + b * b).collect())
}

/// Exact simulated success of both circuits for one completion of `partial`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulatedSuccess {
    /// Probability that the one-query circuit measures `C`.
    pub p_linear: f64,
    /// Probability that the two-query circuit returns `(C, c_n)`.
    pub p_affine: f64,
}

pub fn simulated_success(
    partial: &PartialFunction,
    truth: &AffineSpec,
    variant: OracleVariant,
) -> Result<SimulatedSuccess> {
    let c = truth.linear_coeffs().value() as usize;
    let one = one_query_distribution(partial, variant)?;
    let two = two_query_distribution(partial, variant)?;
    Ok(SimulatedSuccess {
        p_linear: one[c],
        p_affine: two[2 * c + truth.affinity() as usize],
    })
}

/// Closed-form and simulated figures for one completion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletionReport {
    pub completion: AffineSpec,
    pub split: DcSplit,
    /// `None` when `d >= N/2`.
    pub gammas: Option<GammaPair>,
    pub simulated: SimulatedSuccess,
}

pub fn completion_report(
    partial: &PartialFunction,
    completion: &AffineSpec,
) -> Result<CompletionReport> {
    let split = dc_split(partial, &truth_table(completion)?)?;
    let gammas = if partial.is_half_or_more_dc() {
        None
    } else {
        Some(gammas(partial.n(), split.d0, split.d1)?)
    };
    Ok(CompletionReport {
        completion: *completion,
        split,
        gammas,
        simulated: simulated_success(partial, completion, OracleVariant::Plus)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Linear,
    Affine,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub d1: f64,
    pub probability: f64,
    pub in_class: bool,
}

/// Evaluates the success probability and class predicate on a grid.
///
/// Both axes use the same `steps` values `v_k = k (1/2 - 1/steps) / (steps - 1)`,
/// so `D` stops `1/steps` short of the excluded `D = 1/2`. Only points with
/// `D1 <= D` are emitted, in lexicographic `(D, D1)` order; each `D` row
/// therefore contains both `D1 = 0` and `D1 = D`.
pub fn sweep_landscape(mode: SweepMode, steps: usize) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_steps must be at least 2, got {steps}"
        )));
    }
    let top = 0.5 - 1.0 / steps as f64;
    let value = |k: usize| k as f64 * top / (steps - 1) as f64;
    let points: Vec<(usize, usize)> = (0..steps)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .collect();
    points
        .par_iter()
        .map(|&(i, j)| {
            let fr = DcFractions::new(value(i), value(j))?;
            let (probability, in_class) = match mode {
                SweepMode::Linear => (p_linear(&fr), in_linear_class(&fr)),
                SweepMode::Affine => (p_affine(&fr), in_affine_class(&fr)),
            };
            Ok(SweepRow {
                d: fr.d,
                d1: fr.d1,
                probability,
                in_class,
            })
        })
        .collect()
}

/// Writes `D,D1,P,in_class` rows with nine fractional digits.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "D,D1,P,in_class")?;
    for r in rows {
        writeln!(
            out,
            "{:.9},{:.9},{:.9},{}",
            r.d, r.d1, r.probability, r.in_class
        )?;
    }
    out.flush()
}
