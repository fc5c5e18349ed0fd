//! Decomposing a joint action's value into per-unit values.
//!
//! A [`JointQTable`] holds a value `q` and an anchor log-probability for
//! every tuple in a product action space. The joint policy is
//! `softmax(q + β·log τ)` over tuples. [`JointQTable::exact_unit_q`]
//! collapses the table into one unit's conditional values by log-sum-exp
//! over all completions of a prefix, so that unit-by-unit softmax sampling
//! reproduces the joint policy exactly — [`JointQTable::factored_joint_gap`]
//! measures the (floating-point-sized) discrepancy. The cheap alternative,
//! [`JointQTable::lb_unit_q`], reuses one sampled tuple's scalar
//! `q + β·log τ` as a lower bound for every unit's exact value.

use crate::error::SolverError;
use crate::math::{logsumexp, softmax};

/// Whether a [`UnitQ`] was computed exactly or as the single-tuple bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    Exact,
    LowerBound,
}

/// One unit's values, conditioned on the orders chosen for earlier units.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitQ {
    /// Unit position in the canonical ordering, 0-based.
    pub unit: usize,
    /// Choices already made for units 0..unit.
    pub prefix: Vec<usize>,
    /// One value per order in the unit's alphabet.
    pub values: Vec<f64>,
    pub mode: QMode,
}

/// Per-unit softmax of a [`UnitQ`]; sums to 1.
pub fn factor_policy(unit_q: &UnitQ) -> Vec<f64> {
    softmax(&unit_q.values)
}

/// A dense value table over a product action space.
#[derive(Debug, Clone)]
pub struct JointQTable {
    beta: f64,
    sizes: Vec<usize>,
    q: Vec<f64>,
    anchor_logprob: Vec<f64>,
}

impl JointQTable {
    /// Builds a table from flat row-major vectors (the last unit varies
    /// fastest).
    pub fn new(
        beta: f64,
        sizes: Vec<usize>,
        q: Vec<f64>,
        anchor_logprob: Vec<f64>,
    ) -> Result<JointQTable, SolverError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(SolverError::Shape("every unit needs a non-empty alphabet".to_string()));
        }
        let len: usize = sizes.iter().product();
        if q.len() != len || anchor_logprob.len() != len {
            return Err(SolverError::Shape(format!(
                "product space has {} tuples, got {} q values and {} log-probabilities",
                len,
                q.len(),
                anchor_logprob.len()
            )));
        }
        Ok(JointQTable { beta, sizes, q, anchor_logprob })
    }

    /// Builds a table by evaluating `f(tuple) -> (q, anchor_logprob)` on
    /// every tuple.
    pub fn from_fn(
        beta: f64,
        sizes: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> (f64, f64),
    ) -> Result<JointQTable, SolverError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(SolverError::Shape("every unit needs a non-empty alphabet".to_string()));
        }
        let len: usize = sizes.iter().product();
        let mut q = Vec::with_capacity(len);
        let mut lp = Vec::with_capacity(len);
        let mut tuple = vec![0usize; sizes.len()];
        for _ in 0..len {
            let (qi, lpi) = f(&tuple);
            q.push(qi);
            lp.push(lpi);
            advance(&mut tuple, &sizes);
        }
        JointQTable::new(beta, sizes, q, lp)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of units D.
    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    /// Number of tuples in the product space.
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn q(&self, tuple: &[usize]) -> f64 {
        self.q[self.index(tuple)]
    }

    pub fn anchor_logprob(&self, tuple: &[usize]) -> f64 {
        self.anchor_logprob[self.index(tuple)]
    }

    /// The regularized score `q + β·log τ` of one tuple.
    pub fn shaped(&self, tuple: &[usize]) -> f64 {
        let i = self.index(tuple);
        self.q[i] + self.beta * self.anchor_logprob[i]
    }

    /// The joint policy `softmax(q + β·log τ)` over all tuples, row-major.
    pub fn joint_policy(&self) -> Vec<f64> {
        let shaped: Vec<f64> =
            self.q.iter().zip(&self.anchor_logprob).map(|(q, lp)| q + self.beta * lp).collect();
        softmax(&shaped)
    }

    /// Exact conditional values for unit `prefix.len()` given `prefix`:
    /// `values[a] = logsumexp over completions of (q + β·log τ)`.
    pub fn exact_unit_q(&self, prefix: &[usize]) -> Result<UnitQ, SolverError> {
        let d = prefix.len();
        if d >= self.dims() {
            return Err(SolverError::Shape(format!(
                "prefix of length {} leaves no unit to value in a {}-unit table",
                d,
                self.dims()
            )));
        }
        for (i, &a) in prefix.iter().enumerate() {
            if a >= self.sizes[i] {
                return Err(SolverError::Shape(format!(
                    "prefix symbol {} out of range for unit {} (alphabet {})",
                    a, i, self.sizes[i]
                )));
            }
        }
        let mut values = Vec::with_capacity(self.sizes[d]);
        let suffix_sizes = &self.sizes[d + 1..];
        let suffix_len: usize = suffix_sizes.iter().product();
        let mut tuple = prefix.to_vec();
        tuple.push(0);
        tuple.extend(std::iter::repeat_n(0, suffix_sizes.len()));
        for a in 0..self.sizes[d] {
            tuple[d] = a;
            for slot in tuple[d + 1..].iter_mut() {
                *slot = 0;
            }
            let mut terms = Vec::with_capacity(suffix_len);
            for _ in 0..suffix_len {
                terms.push(self.shaped(&tuple));
                advance_tail(&mut tuple, &self.sizes, d + 1);
            }
            values.push(logsumexp(&terms));
        }
        Ok(UnitQ { unit: d, prefix: prefix.to_vec(), values, mode: QMode::Exact })
    }

    /// The single-tuple lower bound: every unit along `tuple` shares the
    /// scalar `q + β·log τ`, which never exceeds the exact value.
    pub fn lb_unit_q(&self, tuple: &[usize]) -> Vec<f64> {
        vec![self.shaped(tuple); self.dims()]
    }

    /// Probability of each tuple under unit-by-unit softmax of the exact
    /// conditional values, row-major.
    pub fn factored_policy(&self) -> Result<Vec<f64>, SolverError> {
        let mut out = Vec::with_capacity(self.len());
        let mut tuple = vec![0usize; self.dims()];
        for _ in 0..self.len() {
            let mut prob = 1.0;
            for d in 0..self.dims() {
                let unit_q = self.exact_unit_q(&tuple[..d])?;
                prob *= factor_policy(&unit_q)[tuple[d]];
            }
            out.push(prob);
            advance(&mut tuple, &self.sizes);
        }
        Ok(out)
    }

    /// Maximum absolute difference between the joint policy and its
    /// unit-by-unit factorization, over all tuples. Exact decomposition
    /// makes this float-rounding small.
    pub fn factored_joint_gap(&self) -> Result<f64, SolverError> {
        let joint = self.joint_policy();
        let factored = self.factored_policy()?;
        Ok(joint
            .iter()
            .zip(&factored)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn index(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.dims(), "tuple arity matches the table");
        let mut idx = 0;
        for (&a, &size) in tuple.iter().zip(&self.sizes) {
            assert!(a < size, "symbol within the unit's alphabet");
            idx = idx * size + a;
        }
        idx
    }
}

/// Advances a row-major tuple counter by one, wrapping at the end.
fn advance(tuple: &mut [usize], sizes: &[usize]) {
    advance_tail(tuple, sizes, 0);
}

/// Advances only positions `from..`, wrapping within them.
fn advance_tail(tuple: &mut [usize], sizes: &[usize], from: usize) {
    let mut d = sizes.len();
    while d > from {
        d -= 1;
        tuple[d] += 1;
        if tuple[d] < sizes[d] {
            return;
        }
        tuple[d] = 0;
    }
}
