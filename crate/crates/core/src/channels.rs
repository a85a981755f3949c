//! Random unitary channels `rho -> sum_i p_i U_i rho U_i^dagger`.
//!
//! Product channels are applied one factor at a time: conjugating the
//! `k`-th tensor factor by each of its `n_k` unitaries costs `sum_k n_k`
//! local conjugations of the full state instead of `prod_k n_k`.
//!
//! Channel sums are split into fixed blocks of [`SUM_BLOCK`] terms. Blocks
//! may be evaluated in parallel, but they are always added in block order,
//! so the result is bit-identical for every [`ExecMode`] and thread count.

use crate::exec::ExecMode;
use crate::linalg::{local_conjugate, maximally_mixed, ComplexMatrix, DensityMatrix, Unitary, C64};
use crate::random::{haar_unitary, random_pure_state, weyl_heisenberg_operators, RngStream};
use crate::{Error, Result};

/// Number of channel terms accumulated sequentially inside one block.
pub const SUM_BLOCK: usize = 64;

/// Number of unitaries `ceil(150 d / eps^2)` that makes a Haar-sampled
/// uniform channel `eps`-randomizing on `C^d`.
pub fn required_n(d: usize, epsilon: f64) -> Result<usize> {
    if d < 2 {
        return Err(Error::invalid("d", "dimension must be at least 2"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon", format!("{epsilon} is outside (0, 1)")));
    }
    let exact = 150.0 * d as f64 / (epsilon * epsilon);
    // Values like 150 * 2 / 0.1^2 land a few ulps off an integer.
    let nearest = exact.round();
    let n = if (exact - nearest).abs() <= 1e-9 * exact {
        nearest
    } else {
        exact.ceil()
    };
    if !(n.is_finite() && n < u64::MAX as f64) {
        return Err(Error::invalid("epsilon", "required channel size overflows"));
    }
    Ok(n as usize)
}

/// A convex combination of unitary conjugations on `C^d`, `d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomUnitaryChannel {
    dim: usize,
    unitaries: Vec<Unitary>,
    probs: Vec<f64>,
}

impl RandomUnitaryChannel {
    pub fn new(unitaries: Vec<Unitary>, probs: Vec<f64>) -> Result<Self> {
        let first = unitaries
            .first()
            .ok_or_else(|| Error::invalid("unitaries", "channel needs at least one unitary"))?;
        let dim = first.dim();
        if dim < 2 {
            return Err(Error::invalid("d", "channels on a one-dimensional space are trivial"));
        }
        if let Some(u) = unitaries.iter().find(|u| u.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.dim(),
            });
        }
        if probs.len() != unitaries.len() {
            return Err(Error::DimensionMismatch {
                expected: unitaries.len(),
                found: probs.len(),
            });
        }
        if probs.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(Error::invalid("probs", "probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("probs", format!("probabilities sum to {total}")));
        }
        Ok(Self { dim, unitaries, probs })
    }

    /// Equal weights `1/n`.
    pub fn uniform(unitaries: Vec<Unitary>) -> Result<Self> {
        let n = unitaries.len();
        Self::new(unitaries, vec![1.0 / n.max(1) as f64; n])
    }

    /// The channel that does nothing.
    pub fn identity(d: usize) -> Result<Self> {
        Self::uniform(vec![Unitary::identity(d)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[Unitary] {
        &self.unitaries
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn unitary(&self, key: usize) -> Result<&Unitary> {
        self.unitaries.get(key).ok_or(Error::KeyOutOfRange {
            index: key,
            n: self.n(),
        })
    }
}

/// `n` i.i.d. Haar unitaries with uniform weights.
pub fn sample_ruc(d: usize, n: usize, rng: &mut RngStream) -> Result<RandomUnitaryChannel> {
    if n == 0 {
        return Err(Error::invalid("n", "channel needs at least one unitary"));
    }
    if d < 2 {
        return Err(Error::invalid("d", "channels on a one-dimensional space are trivial"));
    }
    let unitaries = (0..n).map(|_| haar_unitary(d, rng)).collect::<Result<Vec<_>>>()?;
    RandomUnitaryChannel::uniform(unitaries)
}

/// Uniform channel over the `d^2` Weyl-Heisenberg operators; maps every
/// state exactly to `1/d`.
pub fn perfect_pqc(d: usize) -> Result<RandomUnitaryChannel> {
    RandomUnitaryChannel::uniform(weyl_heisenberg_operators(d)?)
}

/// Applies `channel` to the middle factor of a `left * d * right` operator.
pub(crate) fn apply_local(
    channel: &RandomUnitaryChannel,
    state: &ComplexMatrix,
    left: usize,
    right: usize,
    mode: ExecMode,
) -> ComplexMatrix {
    let dim = state.rows();
    let n = channel.n();
    let blocks = n.div_ceil(SUM_BLOCK);
    let partial = mode.map_indexed(blocks, |b| {
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for i in b * SUM_BLOCK..((b + 1) * SUM_BLOCK).min(n) {
            let term = local_conjugate(state, channel.unitaries[i].matrix(), left, right);
            acc.add_scaled(&term, channel.probs[i]);
        }
        acc
    });
    let mut iter = partial.into_iter();
    let mut total = iter.next().expect("channel has at least one term");
    for block in iter {
        total.add_scaled(&block, 1.0);
    }
    total
}

/// `sum_i p_i U_i rho U_i^dagger`.
pub fn apply(channel: &RandomUnitaryChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_with(ExecMode::default(), channel, rho)
}

pub fn apply_with(mode: ExecMode, channel: &RandomUnitaryChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.dim,
            found: rho.dim(),
        });
    }
    finish(apply_local(channel, rho.matrix(), 1, 1, mode))
}

/// Applies `channel` to tensor factor `position` of a state on
/// `dims[0] * dims[1] * ...`, leaving the other factors alone.
pub fn apply_on_factor(
    channel: &RandomUnitaryChannel,
    rho: &DensityMatrix,
    dims: &[usize],
    position: usize,
) -> Result<DensityMatrix> {
    let (left, right) = split_dims(dims, position, rho.dim())?;
    if dims[position] != channel.dim {
        return Err(Error::DimensionMismatch {
            expected: dims[position],
            found: channel.dim,
        });
    }
    finish(apply_local(channel, rho.matrix(), left, right, ExecMode::default()))
}

/// `(left, right)` dimensions around factor `position`.
pub(crate) fn split_dims(dims: &[usize], position: usize, total: usize) -> Result<(usize, usize)> {
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: product,
        });
    }
    if position >= dims.len() {
        return Err(Error::invalid("position", "subsystem index out of range"));
    }
    Ok((dims[..position].iter().product(), dims[position + 1..].iter().product()))
}

fn finish(m: ComplexMatrix) -> Result<DensityMatrix> {
    let herm = m.hermiticity_error();
    if herm > crate::linalg::STATE_TOL || !m.is_finite() {
        return Err(Error::InvariantViolation(format!(
            "channel output drifted from Hermitian by {herm:e}"
        )));
    }
    Ok(DensityMatrix::from_matrix_trusted(m))
}

/// Ordered list of channels, one per tensor factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFamily {
    parts: Vec<RandomUnitaryChannel>,
}

impl ChannelFamily {
    pub fn new(parts: Vec<RandomUnitaryChannel>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::invalid("parts", "channel family is empty"));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[RandomUnitaryChannel] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> &RandomUnitaryChannel {
        &self.parts[k]
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim).product()
    }
}

/// `(N_1 (x) ... (x) N_m)(rho)`, applied factor by factor.
pub fn apply_product(family: &ChannelFamily, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_product_with(ExecMode::default(), family, rho)
}

pub fn apply_product_with(mode: ExecMode, family: &ChannelFamily, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_product_subset(mode, family, rho, &vec![true; family.len()])
}

/// Applies only the parts flagged in `active`.
pub(crate) fn apply_product_subset(
    mode: ExecMode,
    family: &ChannelFamily,
    rho: &DensityMatrix,
    active: &[bool],
) -> Result<DensityMatrix> {
    let dims = family.dims();
    let total = family.total_dim();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: rho.dim(),
        });
    }
    let mut state = rho.matrix().clone();
    for (k, part) in family.parts.iter().enumerate() {
        if !active[k] {
            continue;
        }
        let (left, right) = split_dims(&dims, k, total)?;
        state = apply_local(part, &state, left, right, mode);
    }
    finish(state)
}

/// `||N(rho) - 1/d||_1`.
pub fn epsilon_randomizing_distance(channel: &RandomUnitaryChannel, rho: &DensityMatrix) -> Result<f64> {
    Ok(apply(channel, rho)?.distance_to_maximally_mixed())
}

/// `U_key rho U_key^dagger`.
pub fn encode_with_key(channel: &RandomUnitaryChannel, key: usize, state: &DensityMatrix) -> Result<DensityMatrix> {
    channel.unitary(key)?.conjugate(state)
}

/// `U_key^dagger rho U_key`, the inverse of [`encode_with_key`].
pub fn decode_with_key(channel: &RandomUnitaryChannel, key: usize, state: &DensityMatrix) -> Result<DensityMatrix> {
    channel.unitary(key)?.adjoint().conjugate(state)
}

/// Sampled check of the `eps`-randomizing property.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizingReport {
    pub epsilon: f64,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    /// Indices of probe states whose distance exceeds `epsilon`.
    pub violations: Vec<usize>,
}

impl RandomizingReport {
    pub fn is_randomizing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Measures `||N(rho) - 1/d||_1` on every probe state. A sampled channel
/// exceeding `epsilon` is reported, not treated as an error.
pub fn randomizing_diagnostic(
    channel: &RandomUnitaryChannel,
    epsilon: f64,
    probes: &[DensityMatrix],
) -> Result<RandomizingReport> {
    let distances = probes
        .iter()
        .map(|rho| epsilon_randomizing_distance(channel, rho))
        .collect::<Result<Vec<_>>>()?;
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let violations = distances
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > epsilon)
        .map(|(i, _)| i)
        .collect();
    Ok(RandomizingReport {
        epsilon,
        distances,
        max_distance,
        violations,
    })
}

/// Probe states for [`randomizing_diagnostic`]: the `d` computational basis
/// states, the maximally mixed state (the reduction of a maximally
/// entangled state), then `random` Haar pure states.
pub fn probe_states(d: usize, random: usize, rng: &mut RngStream) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(d + 1 + random);
    for k in 0..d {
        let mut ket = vec![C64::new(0.0, 0.0); d];
        ket[k] = C64::new(1.0, 0.0);
        out.push(DensityMatrix::from_ket(&ket)?);
    }
    out.push(maximally_mixed(d)?);
    for _ in 0..random {
        out.push(random_pure_state(d, rng)?);
    }
    Ok(out)
}
