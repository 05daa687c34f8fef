//! Exact amplitude simulation of an `n`-qubit input register plus one
//! workspace qubit.
//!
//! Basis index `k = 2 i + t`: `i` is the big-endian input index and `t` the
//! workspace bit, so the workspace is the least significant index bit and the
//! two amplitudes of input `i` sit next to each other. Oracles act on those
//! length-2 blocks in place.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::boolfn::{check_register, BitString, Entry, PartialFunction, MAX_REGISTER_N};
use crate::error::{Error, Result};

/// Tolerance for norm and identity checks after a single operation.
pub const OP_TOLERANCE: f64 = 1e-12;

/// Tolerance for end-to-end circuit assertions.
pub const CIRCUIT_TOLERANCE: f64 = 1e-10;

/// How a don't-care input acts on the workspace qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleVariant {
    /// `U_g`: don't cares map the workspace through `H`, encoding `(|0⟩+|1⟩)/√2`.
    Plus,
    /// `U_g'`: don't cares map the workspace through `H·X`, encoding `(|0⟩-|1⟩)/√2`.
    Minus,
}

impl OracleVariant {
    pub fn name(self) -> &'static str {
        match self {
            OracleVariant::Plus => "plus",
            OracleVariant::Minus => "minus",
        }
    }

    pub fn other(self) -> Self {
        match self {
            OracleVariant::Plus => OracleVariant::Minus,
            OracleVariant::Minus => OracleVariant::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0⟩^{⊗n} ⊗ |1⟩`.
    pub fn new_register(n: usize) -> Result<Self> {
        check_register(n, MAX_REGISTER_N)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 << n];
        amplitudes[1] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    /// Wraps explicit amplitudes; they must have length `2^{n+1}` and unit norm.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n, MAX_REGISTER_N)?;
        if amplitudes.len() != 2 << n {
            return Err(Error::DimensionMismatch {
                expected: 2 << n,
                found: amplitudes.len(),
            });
        }
        let state = Self { n, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > OP_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    /// Width of the input register.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, input: usize, workspace: bool) -> Complex64 {
        self.amplitudes[2 * input + workspace as usize]
    }

    /// The `(t = 0, t = 1)` amplitudes of input index `input`.
    pub fn block(&self, input: usize) -> [Complex64; 2] {
        [self.amplitudes[2 * input], self.amplitudes[2 * input + 1]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `H^{⊗(n+1)}` as an in-place fast Walsh-Hadamard transform.
    ///
    /// Butterflies run stage by stage from the workspace bit (stride 1) up to
    /// `x_0` (stride `2^n`), each stage in ascending index order, and every
    /// stage scales by `1/√2`. That order is fixed, so results are
    /// bit-reproducible.
    pub fn hadamard_all(&mut self) {
        let len = self.amplitudes.len();
        let mut stride = 1;
        while stride < len {
            for start in (0..len).step_by(2 * stride) {
                for k in start..start + stride {
                    let a = self.amplitudes[k];
                    let b = self.amplitudes[k + stride];
                    self.amplitudes[k] = (a + b) * FRAC_1_SQRT_2;
                    self.amplitudes[k + stride] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            stride *= 2;
        }
    }

    /// `I^{⊗n} ⊗ H`.
    pub fn hadamard_workspace(&mut self) {
        for block in self.amplitudes.chunks_exact_mut(2) {
            hadamard_block(block);
        }
    }

    /// Applies `U_f` (all entries defined), `U_g` (`Plus`) or `U_g'` (`Minus`).
    ///
    /// Per input block: `Zero` is the identity, `One` is `X`, and `DontCare`
    /// is `H` for `Plus` or `H·X` for `Minus`.
    pub fn apply_oracle(
        &mut self,
        partial: &PartialFunction,
        variant: OracleVariant,
    ) -> Result<()> {
        if partial.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: partial.n(),
            });
        }
        for (block, &entry) in self.amplitudes.chunks_exact_mut(2).zip(partial.entries()) {
            match entry {
                Entry::Zero => {}
                Entry::One => block.swap(0, 1),
                Entry::DontCare => {
                    if variant == OracleVariant::Minus {
                        block.swap(0, 1);
                    }
                    hadamard_block(block);
                }
            }
        }
        Ok(())
    }

    /// Born-rule probabilities over all `2^{n+1}` basis states, or over the
    /// `2^n` input indices when `first_n_only` marginalizes the workspace.
    pub fn exact_distribution(&self, first_n_only: bool) -> Vec<f64> {
        if first_n_only {
            self.amplitudes
                .chunks_exact(2)
                .map(|b| b[0].norm_sqr() + b[1].norm_sqr())
                .collect()
        } else {
            self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
        }
    }

    /// Measures the input register, collapsing onto the observed index.
    pub fn measure_first_n<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<BitString> {
        let marginal = self.exact_distribution(true);
        let outcome = sample(&marginal, rng)?;
        let scale = 1.0 / marginal[outcome].sqrt();
        for (i, block) in self.amplitudes.chunks_exact_mut(2).enumerate() {
            if i == outcome {
                block[0] *= scale;
                block[1] *= scale;
            } else {
                block[0] = Complex64::new(0.0, 0.0);
                block[1] = Complex64::new(0.0, 0.0);
            }
        }
        BitString::new(self.n, outcome as u64)
    }

    /// Measures the workspace qubit, collapsing onto the observed bit.
    pub fn measure_workspace<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        let mut marginal = [0.0; 2];
        for (k, a) in self.amplitudes.iter().enumerate() {
            marginal[k & 1] += a.norm_sqr();
        }
        let bit = sample(&marginal, rng)? == 1;
        let scale = 1.0 / marginal[bit as usize].sqrt();
        for (k, a) in self.amplitudes.iter_mut().enumerate() {
            if (k & 1 == 1) == bit {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(bit)
    }
}

fn hadamard_block(block: &mut [Complex64]) {
    let (a, b) = (block[0], block[1]);
    block[0] = (a + b) * FRAC_1_SQRT_2;
    block[1] = (a - b) * FRAC_1_SQRT_2;
}

/// Draws an index with probability proportional to `weights`.
fn sample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !total.is_finite() || total <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateDistribution);
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_nonzero = i;
            if target < acc {
                return Ok(i);
            }
        }
    }
    // Rounding left `target` just past the final partial sum.
    Ok(last_nonzero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{mask, truth_table, AffineSpec};
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_close(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (k, (g, w)) in got.iter().zip(want).enumerate() {
            assert!((g - w).norm() <= tol, "index {k}: got {g}, want {w}");
        }
    }

    /// `H^{⊗m}|x⟩ = 2^{-m/2} Σ_y (-1)^{x·y} |y⟩`, summed term by term.
    fn walsh_hadamard_by_definition(input: &[Complex64]) -> Vec<Complex64> {
        let len = input.len();
        let norm = 1.0 / (len as f64).sqrt();
        (0..len)
            .map(|y| {
                input
                    .iter()
                    .enumerate()
                    .map(|(x, &a)| if (x & y).count_ones() % 2 == 0 { a } else { -a })
                    .sum::<Complex64>()
                    * norm
            })
            .collect()
    }

    /// The oracle written out as a dense `2^{n+1} x 2^{n+1}` matrix.
    fn dense_oracle(partial: &PartialFunction, variant: OracleVariant) -> Vec<Vec<Complex64>> {
        let dim = 2 * partial.len();
        let h = FRAC_1_SQRT_2;
        let mut m = vec![vec![c(0.0); dim]; dim];
        for (i, &e) in partial.entries().iter().enumerate() {
            let block = match (e, variant) {
                (Entry::Zero, _) => [[1.0, 0.0], [0.0, 1.0]],
                (Entry::One, _) => [[0.0, 1.0], [1.0, 0.0]],
                (Entry::DontCare, OracleVariant::Plus) => [[h, h], [h, -h]],
                // H·X
                (Entry::DontCare, OracleVariant::Minus) => [[h, h], [-h, h]],
            };
            for r in 0..2 {
                for col in 0..2 {
                    m[2 * i + r][2 * i + col] = c(block[r][col]);
                }
            }
        }
        m
    }

    fn matvec(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = rng_from_seed(seed);
        let raw: Vec<Complex64> = (0..2 << n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(n, raw.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    fn random_partial(n: usize, seed: u64) -> PartialFunction {
        let mut rng = rng_from_seed(seed);
        let entries = (0..1 << n)
            .map(|_| match rng.random_range(0..3) {
                0 => Entry::Zero,
                1 => Entry::One,
                _ => Entry::DontCare,
            })
            .collect();
        PartialFunction::new(n, entries).unwrap()
    }

    #[test]
    fn new_register_examples() {
        let s = StateVector::new_register(1).unwrap();
        assert_eq!(s.amplitudes(), [c(0.0), c(1.0), c(0.0), c(0.0)]);
        let s = StateVector::new_register(2).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_eq!(s.amplitude(0, true), c(1.0));
        let s = StateVector::new_register(3).unwrap();
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
    }

    #[test]
    fn new_register_guards() {
        assert!(matches!(
            StateVector::new_register(0),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(
            StateVector::new_register(21).unwrap_err(),
            Error::RegisterLimit {
                n: 21,
                limit: MAX_REGISTER_N
            }
        );
    }

    #[test]
    fn hadamard_all_on_initial_register() {
        let mut s = StateVector::new_register(1).unwrap();
        s.hadamard_all();
        assert_close(
            s.amplitudes(),
            &[c(0.5), c(-0.5), c(0.5), c(-0.5)],
            OP_TOLERANCE,
        );

        // n = 2 by hand: (1/√8) Σ_x |x⟩ ⊗ (|0⟩ - |1⟩).
        let mut s = StateVector::new_register(2).unwrap();
        s.hadamard_all();
        let m = 1.0 / 8f64.sqrt();
        let want: Vec<Complex64> = (0..8).map(|k| c(if k % 2 == 0 { m } else { -m })).collect();
        assert_close(s.amplitudes(), &want, OP_TOLERANCE);

        for n in 3..=6 {
            let mut s = StateVector::new_register(n).unwrap();
            s.hadamard_all();
            let m = 1.0 / ((2u32 << n) as f64).sqrt();
            for (k, a) in s.amplitudes().iter().enumerate() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a - c(sign * m)).norm() < OP_TOLERANCE);
            }
        }
    }

    #[test]
    fn hadamard_all_matches_definition() {
        for n in 1..=5 {
            let mut s = random_state(n, 100 + n as u64);
            let want = walsh_hadamard_by_definition(s.amplitudes());
            s.hadamard_all();
            assert_close(s.amplitudes(), &want, OP_TOLERANCE);
        }
    }

    #[test]
    fn hadamard_all_is_an_involution() {
        let mut s = random_state(4, 1);
        let before = s.clone();
        s.hadamard_all();
        s.hadamard_all();
        assert_close(s.amplitudes(), before.amplitudes(), OP_TOLERANCE);
    }

    #[test]
    fn hadamard_workspace_examples() {
        let mut s = StateVector::new_register(2).unwrap();
        s.hadamard_workspace();
        let h = FRAC_1_SQRT_2;
        assert_eq!(s.block(0), [c(h), c(-h)]);
        s.hadamard_workspace();
        assert_close(
            s.amplitudes(),
            StateVector::new_register(2).unwrap().amplitudes(),
            OP_TOLERANCE,
        );
    }

    #[test]
    fn hadamard_workspace_undoes_the_dc_query_on_the_c_block() {
        // Workspace block of |C⟩ after U_g at a don't care:
        // ((γ0 + γ1)/√2, (γ0 - γ1)/√2). One more H restores (γ0, γ1).
        let (g0, g1): (f64, f64) = (-0.176_776_695_297, 0.926_776_695_297);
        let norm = (g0 * g0 + g1 * g1).sqrt();
        let (g0, g1) = (g0 / norm, g1 / norm);
        let h = FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 4];
        amps[2] = c((g0 + g1) * h);
        amps[3] = c((g0 - g1) * h);
        let mut s = StateVector::from_amplitudes(1, amps).unwrap();
        s.hadamard_workspace();
        assert_close(&s.block(1), &[c(g0), c(g1)], OP_TOLERANCE);
    }

    #[test]
    fn oracle_kicks_back_phase_when_fully_defined() {
        for s in AffineSpec::all(3).unwrap() {
            let p = PartialFunction::from_truth_table(&truth_table(&s).unwrap());
            let h = FRAC_1_SQRT_2;
            for x in 0..8 {
                let mut amps = vec![c(0.0); 16];
                amps[2 * x] = c(h);
                amps[2 * x + 1] = c(-h);
                let mut st = StateVector::from_amplitudes(3, amps.clone()).unwrap();
                st.apply_oracle(&p, OracleVariant::Plus).unwrap();
                let sign = if s.eval_index(x) { -1.0 } else { 1.0 };
                let want: Vec<Complex64> = amps.iter().map(|a| a * sign).collect();
                assert_close(st.amplitudes(), &want, OP_TOLERANCE);
            }
        }
    }

    #[test]
    fn oracle_dc_block_plus_on_zero() {
        let p = PartialFunction::new(1, vec![Entry::Zero, Entry::DontCare]).unwrap();
        let mut s = StateVector::from_amplitudes(1, vec![c(0.0), c(0.0), c(1.0), c(0.0)]).unwrap();
        s.apply_oracle(&p, OracleVariant::Plus).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_close(&s.block(1), &[c(h), c(h)], OP_TOLERANCE);
    }

    #[test]
    fn first_oracle_splits_uniform_state() {
        // g = 0 1 - 0 on the state after the first H^{⊗3}: defined inputs pick
        // up (-1)^{g(x)} on (|0⟩-|1⟩)/√2, the don't care ends in |1⟩ / 2.
        let p = PartialFunction::new(
            2,
            vec![Entry::Zero, Entry::One, Entry::DontCare, Entry::Zero],
        )
        .unwrap();
        let mut s = StateVector::new_register(2).unwrap();
        s.hadamard_all();
        s.apply_oracle(&p, OracleVariant::Plus).unwrap();
        let q = 1.0 / (2.0 * 2f64.sqrt());
        let want = [c(q), c(-q), c(-q), c(q), c(0.0), c(0.5), c(q), c(-q)];
        assert_close(s.amplitudes(), &want, OP_TOLERANCE);
    }

    #[test]
    fn oracle_rejects_width_mismatch() {
        let p = PartialFunction::new(2, vec![Entry::Zero; 4]).unwrap();
        let mut s = StateVector::new_register(3).unwrap();
        assert_eq!(
            s.apply_oracle(&p, OracleVariant::Plus).unwrap_err(),
            Error::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn oracle_matches_dense_matrix() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 4);
            let p = random_partial(n, seed);
            for variant in [OracleVariant::Plus, OracleVariant::Minus] {
                let mut s = random_state(n, 1000 + seed);
                let want = matvec(&dense_oracle(&p, variant), s.amplitudes());
                s.apply_oracle(&p, variant).unwrap();
                assert_close(s.amplitudes(), &want, OP_TOLERANCE);
            }
        }
    }

    #[test]
    fn double_oracle_block_actions() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 4);
            let p = random_partial(n, 50 + seed);
            let before = random_state(n, 500 + seed);

            let mut plus = before.clone();
            plus.apply_oracle(&p, OracleVariant::Plus).unwrap();
            plus.apply_oracle(&p, OracleVariant::Plus).unwrap();
            assert_close(plus.amplitudes(), before.amplitudes(), OP_TOLERANCE);

            // (H·X)^2 = [[0, 1], [-1, 0]] on don't-care blocks.
            let mut minus = before.clone();
            minus.apply_oracle(&p, OracleVariant::Minus).unwrap();
            minus.apply_oracle(&p, OracleVariant::Minus).unwrap();
            for i in 0..p.len() {
                let [a, b] = before.block(i);
                let want = if p.is_dc(i) { [b, -a] } else { [a, b] };
                assert_close(&minus.block(i), &want, OP_TOLERANCE);
            }
        }
    }

    #[test]
    fn exact_distribution_examples() {
        let mut s = StateVector::new_register(3).unwrap();
        s.hadamard_all();
        let full = s.exact_distribution(false);
        assert!(full.iter().all(|&p| (p - 1.0 / 16.0).abs() < OP_TOLERANCE));
        let marginal = s.exact_distribution(true);
        assert_eq!(marginal.len(), 8);
        assert!((marginal.iter().sum::<f64>() - 1.0).abs() < OP_TOLERANCE);
    }

    #[test]
    fn deterministic_measurement_is_identity() {
        let mut amps = vec![c(0.0); 8];
        amps[5] = c(-1.0);
        let mut s = StateVector::from_amplitudes(2, amps).unwrap();
        let before = s.clone();
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            assert_eq!(s.measure_first_n(&mut rng).unwrap().value(), 2);
            assert!(s.measure_workspace(&mut rng).unwrap());
            assert_eq!(s, before);
        }
    }

    #[test]
    fn measurement_frequency_of_even_split() {
        let h = FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[1] = c(h);
        amps[6] = c(h);
        let base = StateVector::from_amplitudes(2, amps).unwrap();
        let mut rng = rng_from_seed(11);
        let shots = 10_000;
        let mut hits = 0;
        for _ in 0..shots {
            let mut s = base.clone();
            let x = s.measure_first_n(&mut rng).unwrap().value();
            assert!(x == 0 || x == 3);
            hits += (x == 0) as usize;
            // collapsed and renormalized
            assert!((s.norm_sqr() - 1.0).abs() < OP_TOLERANCE);
            assert_eq!(s.measure_workspace(&mut rng).unwrap(), x == 0);
        }
        let sigma = (0.25f64 / shots as f64).sqrt();
        assert!((hits as f64 / shots as f64 - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn measurement_of_zero_state_is_an_error() {
        let mut s = StateVector {
            n: 1,
            amplitudes: vec![c(0.0); 4],
        };
        let mut rng = rng_from_seed(0);
        assert_eq!(
            s.measure_first_n(&mut rng).unwrap_err(),
            Error::DegenerateDistribution
        );
        assert_eq!(
            s.measure_workspace(&mut rng).unwrap_err(),
            Error::DegenerateDistribution
        );
    }

    #[test]
    fn character_sums_vanish_off_zero() {
        for n in 1..=8u32 {
            let size = 1u64 << n;
            for z in 0..size {
                let sum: i64 = (0..size)
                    .map(|x| if (x & z).count_ones() % 2 == 0 { 1 } else { -1 })
                    .sum();
                assert_eq!(sum, if z == 0 { size as i64 } else { 0 });
            }
        }
    }

    #[test]
    fn uniform_mask_keeps_dc_with_truth() {
        let t = truth_table(&AffineSpec::from_parts(2, 0b11, false).unwrap()).unwrap();
        let p = mask(&t, [0]).unwrap();
        let mut s = StateVector::new_register(2).unwrap();
        s.apply_oracle(&p, OracleVariant::Minus).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < OP_TOLERANCE);
    }

    #[derive(Clone, Debug)]
    enum Op {
        HadamardAll,
        HadamardWorkspace,
        Oracle(u64, bool),
        MeasureInputs(u64),
        MeasureWorkspace(u64),
    }

    fn arb_op() -> impl Strategy<Value = Op> {
        prop_oneof![
            Just(Op::HadamardAll),
            Just(Op::HadamardWorkspace),
            (any::<u64>(), any::<bool>()).prop_map(|(s, v)| Op::Oracle(s, v)),
            any::<u64>().prop_map(Op::MeasureInputs),
            any::<u64>().prop_map(Op::MeasureWorkspace),
        ]
    }

    proptest! {
        #[test]
        fn every_operation_preserves_norm(n in 1usize..=5, ops in proptest::collection::vec(arb_op(), 1..12)) {
            let mut s = StateVector::new_register(n).unwrap();
            for op in ops {
                match op {
                    Op::HadamardAll => s.hadamard_all(),
                    Op::HadamardWorkspace => s.hadamard_workspace(),
                    Op::Oracle(seed, minus) => {
                        let v = if minus { OracleVariant::Minus } else { OracleVariant::Plus };
                        s.apply_oracle(&random_partial(n, seed), v).unwrap();
                    }
                    Op::MeasureInputs(seed) => {
                        s.measure_first_n(&mut rng_from_seed(seed)).unwrap();
                    }
                    Op::MeasureWorkspace(seed) => {
                        s.measure_workspace(&mut rng_from_seed(seed)).unwrap();
                    }
                }
                prop_assert!((s.norm_sqr() - 1.0).abs() < OP_TOLERANCE);
            }
        }
    }
}
