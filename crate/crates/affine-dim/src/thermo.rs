//! Thermodynamic formalism on the symbolic past: transfer operators for
//! locally constant potentials, Gibbs cylinder measures, entropy and
//! Lyapunov exponents.
//!
//! Cylinders of depth `k` are words `(i_{-k}, ..., i_{-1})` stored
//! oldest-first. A potential is made locally constant at depth `k` by
//! evaluating it on the cylinder word extended into the past with the fixed
//! tail `(1, 1, 1, ...)`. The transfer operator acts on functions of
//! depth-`k` words; the entry from `w` to `w'` is `exp(phi(w'))` exactly
//! when `w'` arises from `w` by appending one symbol at the recent end and
//! dropping the oldest. For a full shift this matrix is positive after `k`
//! steps, so power iteration converges to the Perron pair and the Gibbs
//! cylinder masses are the normalized products of left and right
//! eigenvector entries.

use crate::matrix::{word_count, Mat2, MatOrder, ProjPoint, Word};
use crate::splitting::{stable_direction, SplittingCertificate};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Which symbolic half-axis a cylinder table is indexed by. The mass table
/// itself is shared: reading the oldest-first word `(i_{-n}, ..., i_{-1})`
/// as `(i_0, ..., i_{n-1})` identifies the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Minus,
    Plus,
}

/// Number of past symbols prepended when a potential needs the stable
/// direction; long enough that the truncation sits at rounding level for
/// any certified system.
pub const STABLE_TAIL_LEN: usize = 40;

/// Hard cap on the number of depth-`k` cylinder states.
pub const STATE_BUDGET: u64 = 1 << 20;

/// Default cylinder depth: the largest `k <= 6` with `N^k <= 4096`.
pub fn default_cylinder_depth(n_symbols: usize) -> usize {
    let mut k = 1;
    while k < 6 && word_count(n_symbols, k + 1) <= 4096 {
        k += 1;
    }
    k
}

/// Stable direction for a finite past `prefix` (oldest-first), extended
/// into the deep past with the fixed tail of 1s.
pub fn tail_stable_direction(
    mats: &[Mat2],
    cert: &SplittingCertificate,
    prefix: &[u8],
) -> Result<ProjPoint> {
    let mut symbols = vec![1u8; STABLE_TAIL_LEN];
    symbols.extend_from_slice(prefix);
    let word = Word::new(symbols)?;
    let n = word.len();
    let (p, _) = stable_direction(mats, &word, n, cert)?;
    Ok(p)
}

/// A potential on the symbolic past, evaluated on finite oldest-first
/// windows (the unseen deeper past is the fixed tail of 1s).
#[derive(Clone)]
pub enum Potential {
    /// Singular-value potential at exponent `s`:
    /// `s * log ||A_{i_{-1}} | e^s|| ` for `s <= 1`, and
    /// `(s-1) * log |det A_{i_{-1}}| + (2-s) * log ||A_{i_{-1}} | e^s||`
    /// for `1 < s < 2`, with the stable direction taken at the shifted past.
    Kaenmaki {
        mats: Vec<Mat2>,
        cert: SplittingCertificate,
        s: f64,
    },
    /// `log p_{i_{-1}}`.
    Bernoulli { weights: Vec<f64> },
    /// Constant value (useful as a reference: its Gibbs measure is uniform).
    Constant { value: f64 },
    /// Arbitrary word evaluator.
    Custom {
        name: String,
        eval: Arc<dyn Fn(&[u8]) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::Kaenmaki { s, .. } => write!(f, "Kaenmaki {{ s: {s} }}"),
            Potential::Bernoulli { weights } => write!(f, "Bernoulli {{ weights: {weights:?} }}"),
            Potential::Constant { value } => write!(f, "Constant {{ value: {value} }}"),
            Potential::Custom { name, .. } => write!(f, "Custom {{ name: {name:?} }}"),
        }
    }
}

impl Potential {
    pub fn kaenmaki(mats: &[Mat2], cert: &SplittingCertificate, s: f64) -> Result<Potential> {
        if !(0.0..2.0).contains(&s) {
            return Err(Error::InvalidInput(format!(
                "singular-value potential needs 0 <= s < 2, got {s}"
            )));
        }
        crate::matrix::validate_system(mats)?;
        Ok(Potential::Kaenmaki {
            mats: mats.to_vec(),
            cert: cert.clone(),
            s,
        })
    }

    pub fn bernoulli(weights: Vec<f64>) -> Result<Potential> {
        if weights.is_empty() || weights.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidInput(
                "bernoulli weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "bernoulli weights must sum to 1, got {total}"
            )));
        }
        Ok(Potential::Bernoulli { weights })
    }

    /// Evaluates on an oldest-first window `(i_{-m}, ..., i_{-1})`.
    pub fn evaluate(&self, window: &[u8]) -> Result<f64> {
        let last = *window.last().ok_or(Error::EmptyWord)?;
        match self {
            Potential::Kaenmaki { mats, cert, s } => {
                let a = &mats[(last - 1) as usize];
                let prefix = &window[..window.len() - 1];
                let es = tail_stable_direction(mats, cert, prefix)?;
                let r = a.restricted_norm(&es);
                if *s <= 1.0 {
                    Ok(s * r.ln())
                } else {
                    Ok((s - 1.0) * a.det().abs().ln() + (2.0 - s) * r.ln())
                }
            }
            Potential::Bernoulli { weights } => {
                let idx = (last - 1) as usize;
                if idx >= weights.len() {
                    return Err(Error::SymbolOutOfRange {
                        symbol: last,
                        n_symbols: weights.len(),
                    });
                }
                Ok(weights[idx].ln())
            }
            Potential::Constant { value } => Ok(*value),
            Potential::Custom { eval, .. } => Ok(eval(window)),
        }
    }

    /// Birkhoff sum `sum_{j=0}^{m-1} phi(sigma_-^j i)` over a finite past
    /// window: each shift drops the most recent symbol.
    pub fn birkhoff_sum(&self, window: &[u8]) -> Result<f64> {
        let mut total = 0.0;
        for j in 0..window.len() {
            total += self.evaluate(&window[..window.len() - j])?;
        }
        Ok(total)
    }
}

/// Transfer operator for a depth-`k` locally constant potential on the full
/// shift with `N` symbols.
///
/// States are depth-`k` oldest-first words, indexed base-`N` with the
/// oldest symbol most significant. Row `w` has exactly `N` nonzero entries,
/// at the successors `w' = (w_2, ..., w_k, j)`, each equal to
/// `exp(phi(w'))`; the operator is irreducible and aperiodic.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    n_symbols: usize,
    depth: usize,
    /// `exp(phi(w))` per state index.
    weights: Vec<f64>,
    /// `phi(w)` per state index.
    phi: Vec<f64>,
}

/// Oldest-first word for a state index.
pub fn word_of_index(mut index: usize, n_symbols: usize, depth: usize) -> Word {
    let mut symbols = vec![1u8; depth];
    for k in (0..depth).rev() {
        symbols[k] = (index % n_symbols) as u8 + 1;
        index /= n_symbols;
    }
    Word::new(symbols).expect("symbols are 1-based by construction")
}

fn index_of_symbols(symbols: &[u8], n_symbols: usize) -> usize {
    let mut idx = 0usize;
    for &s in symbols {
        idx = idx * n_symbols + (s - 1) as usize;
    }
    idx
}

impl TransferOperator {
    pub fn build(
        n_symbols: usize,
        potential: &Potential,
        depth: usize,
    ) -> Result<TransferOperator> {
        if n_symbols == 0 {
            return Err(Error::EmptySystem);
        }
        if depth == 0 {
            return Err(Error::InvalidInput("cylinder depth must be >= 1".into()));
        }
        let states = word_count(n_symbols, depth);
        if states > STATE_BUDGET as u128 {
            return Err(Error::BudgetExceeded {
                required: states,
                budget: STATE_BUDGET,
            });
        }
        let states = states as usize;
        let mut phi = Vec::with_capacity(states);
        let mut weights = Vec::with_capacity(states);
        let mut buf = vec![1u8; depth];
        for x in 0..states {
            let mut idx = x;
            for k in (0..depth).rev() {
                buf[k] = (idx % n_symbols) as u8 + 1;
                idx /= n_symbols;
            }
            let v = potential.evaluate(&buf)?;
            phi.push(v);
            weights.push(v.exp());
        }
        Ok(TransferOperator {
            n_symbols,
            depth,
            weights,
            phi,
        })
    }

    pub fn n_states(&self) -> usize {
        self.weights.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// `(L f)(w) = sum_j exp(phi(w_2..w_k j)) f(w_2..w_k j)`.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let n = self.n_symbols;
        let tail_states = self.n_states() / n;
        for (x, slot) in out.iter_mut().enumerate() {
            let base = (x % tail_states) * n;
            let mut acc = 0.0;
            for j in 0..n {
                let succ = base + j;
                acc += self.weights[succ] * f[succ];
            }
            *slot = acc;
        }
    }

    /// `(L^T g)(w') = exp(phi(w')) sum over predecessors w of g(w)`.
    pub fn apply_transpose(&self, g: &[f64], out: &mut [f64]) {
        let n = self.n_symbols;
        let tail_states = self.n_states() / n;
        for (x, slot) in out.iter_mut().enumerate() {
            let head = x / n; // w' minus its newest symbol
            let mut acc = 0.0;
            for j in 0..n {
                acc += g[j * tail_states + head];
            }
            *slot = self.weights[x] * acc;
        }
    }

    /// Dense form, for small state counts.
    pub fn to_dense(&self) -> Result<Vec<Vec<f64>>> {
        let states = self.n_states();
        if states > 256 {
            return Err(Error::BudgetExceeded {
                required: (states as u128) * (states as u128),
                budget: 256 * 256,
            });
        }
        let n = self.n_symbols;
        let tail_states = states / n;
        let mut dense = vec![vec![0.0; states]; states];
        for x in 0..states {
            let base = (x % tail_states) * n;
            for j in 0..n {
                dense[x][base + j] += self.weights[base + j];
            }
        }
        Ok(dense)
    }
}

/// Gibbs measure restricted to depth-`k` cylinders, plus the data needed to
/// extend it to deeper cylinders through the induced Markov chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylinderMeasure {
    pub n_symbols: usize,
    pub depth: usize,
    pub side: Side,
    /// Log of the Perron eigenvalue of the transfer operator.
    pub pressure: f64,
    /// Probability of each depth-`k` cylinder, indexed like the operator.
    masses: Vec<f64>,
    /// Right Perron eigenvector (for the chain extension).
    right: Vec<f64>,
    /// Potential values per state.
    phi: Vec<f64>,
    lambda: f64,
}

impl CylinderMeasure {
    /// Mass of a cylinder word of any length (oldest-first).
    ///
    /// Shorter words marginalize over the deeper past; longer words extend
    /// through the stationary Markov chain induced by the Perron pair.
    pub fn mass(&self, word: &Word) -> Result<f64> {
        word.validate(self.n_symbols)?;
        let m = word.len();
        let k = self.depth;
        if m == 0 {
            return Ok(1.0);
        }
        if m == k {
            return Ok(self.masses[index_of_symbols(word.symbols(), self.n_symbols)]);
        }
        if m < k {
            // Sum over the unobserved oldest symbols.
            let missing = k - m;
            let blocks = word_count(self.n_symbols, missing) as usize;
            let suffix_idx = index_of_symbols(word.symbols(), self.n_symbols);
            let stride = word_count(self.n_symbols, m) as usize;
            let mut total = 0.0;
            for b in 0..blocks {
                total += self.masses[b * stride + suffix_idx];
            }
            return Ok(total);
        }
        // m > k: stationary start then one-step transitions.
        let mut idx = index_of_symbols(&word.symbols()[..k], self.n_symbols);
        let mut mass = self.masses[idx];
        let tail_states = self.masses.len() / self.n_symbols;
        for t in k..m {
            let j = (word.symbols()[t] - 1) as usize;
            let succ = (idx % tail_states) * self.n_symbols + j;
            let weight = self.phi[succ].exp();
            mass *= weight * self.right[succ] / (self.lambda * self.right[idx]);
            idx = succ;
        }
        Ok(mass)
    }

    /// Sum of the depth-`k` masses (1 up to rounding).
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Iterates `(word, mass)` over the depth-`k` cylinders.
    pub fn iter_masses(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        (0..self.masses.len())
            .map(move |x| (word_of_index(x, self.n_symbols, self.depth), self.masses[x]))
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Largest discrepancy between marginalizing the newest symbol and
    /// marginalizing the oldest symbol (with the shift identification).
    /// Zero for an exactly stationary table.
    pub fn marginal_consistency_defect(&self) -> f64 {
        if self.depth == 1 {
            // Both marginalizations give the total mass.
            return 0.0;
        }
        let shorter = self.masses.len() / self.n_symbols;
        let mut worst = 0.0f64;
        for v in 0..shorter {
            // Sum over newest symbol of (v, j).
            let over_newest: f64 = (0..self.n_symbols)
                .map(|j| self.masses[v * self.n_symbols + j])
                .sum();
            // Sum over oldest symbol of (j, v).
            let over_oldest: f64 = (0..self.n_symbols)
                .map(|j| self.masses[j * shorter + v])
                .sum();
            worst = worst.max((over_newest - over_oldest).abs());
        }
        worst
    }

    /// Expectation of a per-state function against the depth-`k` masses.
    fn expect_states(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.masses.iter().enumerate().map(|(x, &m)| m * f(x)).sum()
    }
}

/// Re-tags the mass table as a measure on the future half-axis. The table
/// is unchanged: reading oldest-first past words as forward words is the
/// standard identification of the two one-sided shifts.
pub fn plus_side_measure(measure: &CylinderMeasure) -> CylinderMeasure {
    let mut m = measure.clone();
    m.side = Side::Plus;
    m
}

/// Power-iterates the transfer operator to its Perron pair and returns the
/// Gibbs cylinder measure together with the pressure `log lambda`.
pub fn gibbs_measure(
    op: &TransferOperator,
    tol: f64,
    max_iterations: u64,
) -> Result<(CylinderMeasure, f64)> {
    let states = op.n_states();
    let right = perron_vector(op, false, tol, max_iterations)?;
    let left = perron_vector(op, true, tol, max_iterations)?;
    // Rayleigh-style eigenvalue from the converged right vector.
    let mut image = vec![0.0; states];
    op.apply(&right, &mut image);
    let lambda = image.iter().sum::<f64>() / right.iter().sum::<f64>();
    let mut masses: Vec<f64> = (0..states).map(|x| left[x] * right[x]).collect();
    let total: f64 = masses.iter().sum();
    for m in &mut masses {
        *m /= total;
    }
    let pressure = lambda.ln();
    Ok((
        CylinderMeasure {
            n_symbols: op.n_symbols,
            depth: op.depth,
            side: Side::Minus,
            pressure,
            masses,
            right,
            phi: op.phi.clone(),
            lambda,
        },
        pressure,
    ))
}

fn perron_vector(
    op: &TransferOperator,
    transpose: bool,
    tol: f64,
    max_iterations: u64,
) -> Result<Vec<f64>> {
    let states = op.n_states();
    let mut v = vec![1.0 / states as f64; states];
    let mut next = vec![0.0; states];
    let mut lambda_prev = f64::NAN;
    for _ in 0..max_iterations {
        if transpose {
            op.apply_transpose(&v, &mut next);
        } else {
            op.apply(&v, &mut next);
        }
        let norm: f64 = next.iter().sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::PowerIterationDiverged {
                iterations: max_iterations,
            });
        }
        let mut delta = 0.0f64;
        for (slot, x) in next.iter_mut().zip(v.iter()) {
            *slot /= norm;
            delta = delta.max((*slot - x).abs());
        }
        std::mem::swap(&mut v, &mut next);
        let lambda_delta = if lambda_prev.is_nan() {
            f64::INFINITY
        } else {
            (norm - lambda_prev).abs() / norm.max(1.0)
        };
        lambda_prev = norm;
        if delta <= tol && lambda_delta <= tol {
            return Ok(v);
        }
    }
    Err(Error::PowerIterationDiverged {
        iterations: max_iterations,
    })
}

/// Result of sampling the defining Gibbs ratio at a test depth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsConstantCheck {
    /// Largest two-sided deviation `max(ratio, 1/ratio)` observed.
    pub c: f64,
    pub test_depth: usize,
    pub words_checked: usize,
}

/// Compares cylinder masses at depth `n_test` against
/// `exp(-n P + Birkhoff sum of phi)` and reports the worst two-sided ratio.
pub fn gibbs_constant_check(
    measure: &CylinderMeasure,
    potential: &Potential,
    n_test: usize,
    seed: u64,
) -> Result<GibbsConstantCheck> {
    if n_test == 0 {
        return Err(Error::InvalidInput("test depth must be >= 1".into()));
    }
    let n_sym = measure.n_symbols;
    let exhaustive = word_count(n_sym, n_test) <= 4096;
    let words: Vec<Word> = if exhaustive {
        let mut all = Vec::new();
        crate::matrix::for_each_word(n_sym, n_test, &mut |w| {
            all.push(Word::new(w.to_vec()).unwrap());
        });
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..2048)
            .map(|_| {
                Word::new(
                    (0..n_test)
                        .map(|_| rng.gen_range(1..=n_sym as u8))
                        .collect(),
                )
                .unwrap()
            })
            .collect()
    };
    let mut c = 1.0f64;
    for w in &words {
        let mass = measure.mass(w)?;
        let birkhoff = potential.birkhoff_sum(w.symbols())?;
        let reference = (-(n_test as f64) * measure.pressure + birkhoff).exp();
        if !(mass > 0.0 && reference > 0.0) {
            return Err(Error::InvalidInput(format!(
                "degenerate gibbs ratio at word {w}: mass {mass}, reference {reference}"
            )));
        }
        let ratio = mass / reference;
        c = c.max(ratio.max(1.0 / ratio));
    }
    Ok(GibbsConstantCheck {
        c,
        test_depth: n_test,
        words_checked: words.len(),
    })
}

/// Result of the quasi-Bernoulli ratio sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiBernoulliCheck {
    /// Largest two-sided deviation of `mu(uv) / (mu(u) mu(v))`.
    pub c: f64,
    pub max_word_len: usize,
    pub splits_checked: usize,
}

/// Sweeps `mu(uv) / (mu(u) mu(v))` over every split of every word up to
/// `max_len` (sampled once the alphabet makes enumeration too large).
pub fn quasi_bernoulli_check(
    measure: &CylinderMeasure,
    max_len: usize,
    seed: u64,
) -> Result<QuasiBernoulliCheck> {
    let n_sym = measure.n_symbols;
    let mut c = 1.0f64;
    let mut splits = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 2..=max_len {
        let exhaustive = word_count(n_sym, m) <= 4096;
        let words: Vec<Word> = if exhaustive {
            let mut all = Vec::new();
            crate::matrix::for_each_word(n_sym, m, &mut |w| {
                all.push(Word::new(w.to_vec()).unwrap());
            });
            all
        } else {
            (0..1024)
                .map(|_| {
                    Word::new((0..m).map(|_| rng.gen_range(1..=n_sym as u8)).collect()).unwrap()
                })
                .collect()
        };
        for w in &words {
            let whole = measure.mass(w)?;
            for cut in 1..m {
                let u = w.slice(0..cut);
                let v = w.slice(cut..m);
                let ratio = whole / (measure.mass(&u)? * measure.mass(&v)?);
                c = c.max(ratio.max(1.0 / ratio));
                splits += 1;
            }
        }
    }
    Ok(QuasiBernoulliCheck {
        c,
        max_word_len: max_len,
        splits_checked: splits,
    })
}

/// Lyapunov exponents of the matrix cocycle under a cylinder measure.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LyapunovExponents {
    /// Contraction rate along the stable direction (the slow one).
    pub chi_s: f64,
    /// Contraction rate along the strong-stable direction.
    pub chi_ss: f64,
    /// Gap to the depth-`k` singular-value estimate of `chi_s`.
    pub crosscheck_gap_s: f64,
    /// Gap to the depth-`k` singular-value estimate of `chi_ss`.
    pub crosscheck_gap_ss: f64,
}

/// Computes `chi_s` from the one-step restricted norms along the stable
/// field and `chi_ss` from the determinant identity
/// `chi_s + chi_ss = -E[log |det A|]`; both are cross-checked against the
/// singular values of depth-`k` cylinder products.
pub fn lyapunov_exponents(
    mats: &[Mat2],
    measure: &CylinderMeasure,
    cert: &SplittingCertificate,
) -> Result<LyapunovExponents> {
    crate::matrix::validate_system(mats)?;
    if mats.len() != measure.n_symbols {
        return Err(Error::InvalidInput(format!(
            "system has {} matrices but the measure uses {} symbols",
            mats.len(),
            measure.n_symbols
        )));
    }
    let k = measure.depth;
    let mut chi_s = 0.0;
    let mut log_det = 0.0;
    let mut chi_s_sv = 0.0;
    let mut chi_ss_sv = 0.0;
    for (word, mass) in measure.iter_masses() {
        let symbols = word.symbols();
        let last = &mats[word.idx(k - 1)];
        let es = tail_stable_direction(mats, cert, &symbols[..k - 1])?;
        chi_s -= mass * last.restricted_norm(&es).ln();
        log_det -= mass * last.det().abs().ln();
        let prod = crate::matrix::word_product(mats, &word, MatOrder::Reversed)?;
        let (a1, a2) = prod.singular_values();
        chi_s_sv -= mass * a1.ln();
        chi_ss_sv -= mass * a2.ln();
    }
    let chi_ss = log_det - chi_s;
    Ok(LyapunovExponents {
        chi_s,
        chi_ss,
        crosscheck_gap_s: (chi_s - chi_s_sv / k as f64).abs(),
        crosscheck_gap_ss: (chi_ss - chi_ss_sv / k as f64).abs(),
    })
}

/// Entropy of the Gibbs measure via `h = P - integral of phi`.
pub fn entropy(measure: &CylinderMeasure) -> f64 {
    let mean_phi = measure.expect_states(|x| measure.phi[x]);
    measure.pressure - mean_phi
}

/// Shannon entropy rate of the depth-`k` marginal, `-(1/k) sum mu log mu`,
/// and its gap to the Gibbs entropy. The gap shrinks as `k` grows.
pub fn entropy_shannon_gap(measure: &CylinderMeasure) -> (f64, f64) {
    let k = measure.depth as f64;
    let shannon = -measure.expect_states(|x| {
        let m = measure.masses[x];
        if m > 0.0 {
            m.ln()
        } else {
            0.0
        }
    }) / k;
    (shannon, (shannon - entropy(measure)).abs())
}
