//! Approximate quantum state sharing between a sender and `m` receivers.
//!
//! The sender holds one random unitary channel per receiver. To share a
//! state on `C^d (x) ... (x) C^d` it picks one key index per receiver,
//! conjugates each tensor factor by the selected unitary and sends the
//! result. Receiver `k` learns only key `k`; recovering the plaintext needs
//! every key at one location.
//!
//! Adversary model: the unitary lists are public, key indices are secret.
//! An outsider therefore holds the key-averaged state, which is the product
//! channel applied to the plaintext. A coalition of receivers can undo its
//! own factors; the factors of everybody else stay averaged over their keys.

use crate::channels::{apply_product, apply_product_subset, required_n, sample_ruc, split_dims, ChannelFamily};
use crate::exec::ExecMode;
use crate::linalg::{local_conjugate, partial_trace, partial_trace_multi, DensityMatrix, Subsystem};
use crate::random::RngStream;
use crate::{Error, Result};

/// Largest joint dimension `d^m` a session may allocate.
pub const MAX_JOINT_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub d: usize,
    pub epsilon: f64,
    pub parties: usize,
    pub n_per_channel: usize,
}

impl ProtocolConfig {
    /// Uses `n_per_channel = required_n(d, epsilon)`.
    pub fn new(d: usize, epsilon: f64, parties: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::invalid("parties", "need at least two receivers"));
        }
        let n_per_channel = required_n(d, epsilon)?;
        Ok(Self {
            d,
            epsilon,
            parties,
            n_per_channel,
        })
    }

    pub fn with_n(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "channels need at least one unitary"));
        }
        self.n_per_channel = n;
        Ok(self)
    }

    /// `d^m`, the dimension of the shared state.
    pub fn joint_dim(&self) -> Option<usize> {
        u32::try_from(self.parties).ok().and_then(|m| self.d.checked_pow(m))
    }

    fn check_resources(&self) -> Result<usize> {
        match self.joint_dim() {
            Some(dim) if dim <= MAX_JOINT_DIM => Ok(dim),
            other => Err(Error::ResourceGuard {
                parameter: "d^m",
                value: other.map_or(u128::MAX, |v| v as u128),
                limit: MAX_JOINT_DIM as u128,
            }),
        }
    }
}

/// One run of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct AqssSession {
    config: ProtocolConfig,
    channels: ChannelFamily,
    plaintext: DensityMatrix,
    key_indices: Vec<Option<usize>>,
    ciphertext: DensityMatrix,
}

impl AqssSession {
    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn channels(&self) -> &ChannelFamily {
        &self.channels
    }

    pub fn plaintext(&self) -> &DensityMatrix {
        &self.plaintext
    }

    pub fn ciphertext(&self) -> &DensityMatrix {
        &self.ciphertext
    }

    /// Key indices available at the decoding location; `None` marks a key
    /// that was withheld.
    pub fn key_indices(&self) -> &[Option<usize>] {
        &self.key_indices
    }

    pub fn key(&self, party: usize) -> Result<usize> {
        self.key_indices
            .get(party)
            .copied()
            .flatten()
            .ok_or(Error::MissingKey { party })
    }

    /// The same session with `party`'s key withheld.
    pub fn without_key(&self, party: usize) -> Self {
        let mut s = self.clone();
        if let Some(k) = s.key_indices.get_mut(party) {
            *k = None;
        }
        s
    }

    /// The same ciphertext relabelled with different keys. Used to model a
    /// receiver decoding with a wrong index.
    pub fn with_keys(&self, keys: Vec<Option<usize>>) -> Result<Self> {
        if keys.len() != self.channels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.channels.len(),
                found: keys.len(),
            });
        }
        for (k, key) in keys.iter().enumerate() {
            if let Some(i) = *key {
                self.channels.part(k).unitary(i)?;
            }
        }
        let mut s = self.clone();
        s.key_indices = keys;
        Ok(s)
    }

    fn dims(&self) -> Vec<usize> {
        self.channels.dims()
    }
}

/// Conjugates every factor `k` by `U_{k, keys[k]}` (or its adjoint).
fn conjugate_by_keys(
    channels: &ChannelFamily,
    keys: &[usize],
    state: &DensityMatrix,
    inverse: bool,
) -> Result<DensityMatrix> {
    let dims = channels.dims();
    let total = channels.total_dim();
    let mut m = state.matrix().clone();
    for (k, part) in channels.parts().iter().enumerate() {
        let u = part.unitary(keys[k])?;
        let (left, right) = split_dims(&dims, k, total)?;
        let op = if inverse {
            u.matrix().adjoint()
        } else {
            u.matrix().clone()
        };
        m = local_conjugate(&m, &op, left, right);
    }
    DensityMatrix::new(m)
}

/// Samples one Haar channel per receiver, draws the keys and encodes.
pub fn charlie_encode(config: &ProtocolConfig, plaintext: &DensityMatrix, rng: &mut RngStream) -> Result<AqssSession> {
    config.check_resources()?;
    let parts = (0..config.parties)
        .map(|_| sample_ruc(config.d, config.n_per_channel, rng))
        .collect::<Result<Vec<_>>>()?;
    charlie_encode_with_channels(config, ChannelFamily::new(parts)?, plaintext, rng)
}

/// Encodes with pre-built channels (for example the exact Weyl-Heisenberg
/// channels). Channel sizes may differ from `config.n_per_channel`.
pub fn charlie_encode_with_channels(
    config: &ProtocolConfig,
    channels: ChannelFamily,
    plaintext: &DensityMatrix,
    rng: &mut RngStream,
) -> Result<AqssSession> {
    let joint = config.check_resources()?;
    if channels.len() != config.parties || channels.dims().iter().any(|&d| d != config.d) {
        return Err(Error::invalid(
            "channels",
            "one channel on C^d per receiver is required",
        ));
    }
    if plaintext.dim() != joint {
        return Err(Error::DimensionMismatch {
            expected: joint,
            found: plaintext.dim(),
        });
    }
    let keys: Vec<usize> = channels.parts().iter().map(|p| rng.index_below(p.n())).collect();
    let ciphertext = conjugate_by_keys(&channels, &keys, plaintext, false)?;
    Ok(AqssSession {
        config: *config,
        channels,
        plaintext: plaintext.clone(),
        key_indices: keys.into_iter().map(Some).collect(),
        ciphertext,
    })
}

/// All receivers at one location undo their unitaries.
pub fn cooperate_decode(session: &AqssSession) -> Result<DensityMatrix> {
    let keys = (0..session.channels.len())
        .map(|k| session.key(k))
        .collect::<Result<Vec<_>>>()?;
    conjugate_by_keys(&session.channels, &keys, &session.ciphertext, true)
}

/// What an outsider without keys holds: `(N_1 (x) ... (x) N_m)(plaintext)`.
pub fn exterior_adversary_view(session: &AqssSession) -> Result<DensityMatrix> {
    apply_product(&session.channels, &session.plaintext)
}

/// Joint state held by `colluders` after undoing their own unitaries,
/// averaged over the keys of everybody else.
pub fn collusion_view(session: &AqssSession, colluders: &[usize]) -> Result<DensityMatrix> {
    let m = session.channels.len();
    let mut active = vec![true; m];
    for &c in colluders {
        if c >= m {
            return Err(Error::invalid("colluders", format!("receiver {c} does not exist")));
        }
        session.key(c)?;
        active[c] = false;
    }
    apply_product_subset(ExecMode::default(), &session.channels, &session.plaintext, &active)
}

/// Reduced state of the receivers outside the coalition, taken from
/// [`collusion_view`].
pub fn non_colluder_marginal(session: &AqssSession, colluders: &[usize]) -> Result<DensityMatrix> {
    let joint = collusion_view(session, colluders)?;
    let outside: Vec<usize> = (0..session.channels.len()).filter(|k| !colluders.contains(k)).collect();
    if outside.is_empty() {
        return Err(Error::invalid("colluders", "every receiver is in the coalition"));
    }
    partial_trace_multi(&joint, &session.dims(), &outside)
}

/// Result of a malicious Bob undoing his own factor.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorView {
    /// `(N_A (x) 1)(plaintext)`.
    pub joint: DensityMatrix,
    /// `tr_B` of `joint`, equal to `N_A(tr_B plaintext)`.
    pub alice_marginal: DensityMatrix,
    /// `tr_A` of `joint`, equal to `tr_A plaintext`.
    pub bob_marginal: DensityMatrix,
}

pub fn interior_attack_bob(session: &AqssSession) -> Result<InteriorView> {
    if session.channels.len() != 2 {
        return Err(Error::invalid(
            "parties",
            "the interior attack is defined for two receivers",
        ));
    }
    let joint = collusion_view(session, &[1])?;
    let dims = (session.config.d, session.config.d);
    Ok(InteriorView {
        alice_marginal: partial_trace(&joint, dims, Subsystem::A)?,
        bob_marginal: partial_trace(&joint, dims, Subsystem::B)?,
        joint,
    })
}

/// Sessions with three or more receivers.
pub fn multiparty_session(
    config: &ProtocolConfig,
    plaintext: &DensityMatrix,
    rng: &mut RngStream,
) -> Result<AqssSession> {
    if config.parties < 3 {
        return Err(Error::invalid(
            "parties",
            "multiparty sessions need at least three receivers",
        ));
    }
    charlie_encode(config, plaintext, rng)
}

/// Secret key bits: exact Weyl-Heisenberg scheme vs. sampled channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyCostReport {
    /// `2 m log2 d`.
    pub perfect_bits: f64,
    /// `sum_k ceil(log2 n_k)`.
    pub approx_bits: f64,
    pub ratio: f64,
}

/// Bits needed to name one of `n` keys.
pub fn key_bits(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Pure accounting; no matrices are built, so `d` is not resource-guarded.
pub fn key_cost(config: &ProtocolConfig) -> KeyCostReport {
    let m = config.parties as f64;
    let perfect_bits = 2.0 * m * (config.d as f64).log2();
    let approx_bits = m * f64::from(key_bits(config.n_per_channel));
    KeyCostReport {
        perfect_bits,
        approx_bits,
        ratio: approx_bits / perfect_bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{perfect_pqc, RandomUnitaryChannel};
    use crate::linalg::{maximally_entangled_state, maximally_mixed, purity, tensor_product, ComplexMatrix};
    use crate::random::{random_pure_state, random_separable_state};

    fn config(d: usize, parties: usize, n: usize) -> ProtocolConfig {
        ProtocolConfig::new(d, 0.5, parties).unwrap().with_n(n).unwrap()
    }

    fn perfect_family(d: usize, m: usize) -> ChannelFamily {
        ChannelFamily::new(vec![perfect_pqc(d).unwrap(); m]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ProtocolConfig::new(2, 0.5, 1).is_err());
        assert!(ProtocolConfig::new(1, 0.5, 2).is_err());
        assert!(ProtocolConfig::new(2, 1.5, 2).is_err());
        assert_eq!(ProtocolConfig::new(8, 0.5, 2).unwrap().n_per_channel, 4800);
        assert!(config(2, 2, 1).with_n(0).is_err());
    }

    #[test]
    fn resource_guard() {
        let mut rng = RngStream::new(0, 0);
        let cfg = config(4, 6, 2);
        let rho = maximally_mixed(2).unwrap();
        assert!(matches!(
            charlie_encode(&cfg, &rho, &mut rng),
            Err(Error::ResourceGuard { parameter: "d^m", .. })
        ));
    }

    #[test]
    fn encode_preserves_purity_and_is_deterministic() {
        let cfg = config(2, 2, 5);
        let rho = random_pure_state(4, &mut RngStream::new(1, 1)).unwrap();
        let s1 = charlie_encode(&cfg, &rho, &mut RngStream::new(1, 0)).unwrap();
        let s2 = charlie_encode(&cfg, &rho, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(s1, s2);
        assert!((purity(s1.ciphertext()) - purity(&rho)).abs() <= 1e-10);
        assert!(matches!(
            charlie_encode(&cfg, &maximally_mixed(3).unwrap(), &mut RngStream::new(1, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_unitary_channels_encode_by_that_unitary() {
        let cfg = config(2, 2, 1);
        let rho = random_pure_state(4, &mut RngStream::new(2, 1)).unwrap();
        let s = charlie_encode(&cfg, &rho, &mut RngStream::new(2, 0)).unwrap();
        let u = tensor_product(
            s.channels().part(0).unitaries()[0].matrix(),
            s.channels().part(1).unitaries()[0].matrix(),
        );
        let expected = &(&u * rho.matrix()) * &u.adjoint();
        assert!(s.ciphertext().matrix().max_abs_diff(&expected) <= 1e-12);
        assert_eq!(s.key_indices(), &[Some(0), Some(0)]);
    }

    #[test]
    fn round_trip() {
        let mut rng = RngStream::new(3, 0);
        for d in [2, 4] {
            let cfg = config(d, 2, 6);
            for i in 0..50 {
                let phi = if i == 0 {
                    maximally_entangled_state(d).unwrap()
                } else {
                    random_pure_state(d * d, &mut rng).unwrap()
                };
                let s = charlie_encode(&cfg, &phi, &mut rng).unwrap();
                assert!(cooperate_decode(&s).unwrap().matrix().max_abs_diff(phi.matrix()) <= 1e-12);
            }
        }
    }

    #[test]
    fn lone_decode_is_refused_and_wrong_keys_fail() {
        let mut rng = RngStream::new(4, 0);
        let cfg = config(4, 2, 8);
        let phi = random_pure_state(16, &mut rng).unwrap();
        let s = charlie_encode(&cfg, &phi, &mut rng).unwrap();
        assert_eq!(cooperate_decode(&s.without_key(0)), Err(Error::MissingKey { party: 0 }));
        let bob = s.key(1).unwrap();
        let wrong = s.with_keys(vec![Some((s.key(0).unwrap() + 1) % 8), Some(bob)]).unwrap();
        let out = cooperate_decode(&wrong).unwrap();
        assert!(out.distance(&phi).unwrap() > 0.01);
        assert!(s.with_keys(vec![Some(8), Some(0)]).is_err());
    }

    #[test]
    fn exterior_view_of_perfect_channels_is_maximally_mixed() {
        let mut rng = RngStream::new(5, 0);
        for (d, m) in [(2, 2), (3, 2), (2, 3)] {
            let cfg = config(d, m, 1);
            let dim = d.pow(m as u32);
            let phi = random_pure_state(dim, &mut rng).unwrap();
            let s = charlie_encode_with_channels(&cfg, perfect_family(d, m), &phi, &mut rng).unwrap();
            let view = exterior_adversary_view(&s).unwrap();
            assert!(view.matrix().max_abs_diff(maximally_mixed(dim).unwrap().matrix()) <= 1e-12);
        }
    }

    /// Independent route: average the ciphertext over every key tuple.
    fn key_averaged_ciphertext(s: &AqssSession) -> ComplexMatrix {
        let (a, b) = (s.channels().part(0), s.channels().part(1));
        let dim = a.dim() * b.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for i in 0..a.n() {
            for j in 0..b.n() {
                let ct = s.with_keys(vec![Some(i), Some(j)]).unwrap();
                let enc = conjugate_by_keys(ct.channels(), &[i, j], ct.plaintext(), false).unwrap();
                acc.add_scaled(enc.matrix(), a.probs()[i] * b.probs()[j]);
            }
        }
        acc
    }

    #[test]
    fn key_averaging_equals_product_channel() {
        let mut rng = RngStream::new(6, 0);
        for (d, n) in [(2, 16), (3, 5)] {
            let cfg = config(d, 2, n);
            let phi = random_pure_state(d * d, &mut rng).unwrap();
            let s = charlie_encode(&cfg, &phi, &mut rng).unwrap();
            let view = exterior_adversary_view(&s).unwrap();
            assert!(view.matrix().max_abs_diff(&key_averaged_ciphertext(&s)) <= 1e-12);
        }
    }

    #[test]
    fn interior_attack_algebra() {
        let mut rng = RngStream::new(7, 0);
        let cfg = config(2, 2, 6);
        let phi = random_pure_state(4, &mut rng).unwrap();
        let s = charlie_encode(&cfg, &phi, &mut rng).unwrap();
        let view = interior_attack_bob(&s).unwrap();

        // Bob undoes his own key on each key-tuple ciphertext; Alice's key is averaged.
        let bob = s.key(1).unwrap();
        let a = s.channels().part(0);
        let mut avg = ComplexMatrix::zeros(4, 4);
        for i in 0..a.n() {
            let ct = conjugate_by_keys(s.channels(), &[i, bob], &phi, false).unwrap();
            let b_only = ChannelFamily::new(vec![
                RandomUnitaryChannel::identity(2).unwrap(),
                s.channels().part(1).clone(),
            ])
            .unwrap();
            let undone = conjugate_by_keys(&b_only, &[0, bob], &ct, true).unwrap();
            avg.add_scaled(undone.matrix(), a.probs()[i]);
        }
        assert!(view.joint.matrix().max_abs_diff(&avg) <= 1e-12);

        let phi_a = partial_trace(&phi, (2, 2), Subsystem::A).unwrap();
        let phi_b = partial_trace(&phi, (2, 2), Subsystem::B).unwrap();
        let na = crate::channels::apply(a, &phi_a).unwrap();
        assert!(view.alice_marginal.matrix().max_abs_diff(na.matrix()) <= 1e-12);
        assert!(view.bob_marginal.matrix().max_abs_diff(phi_b.matrix()) <= 1e-10);
    }

    #[test]
    fn interior_attack_with_perfect_alice_channel() {
        let mut rng = RngStream::new(8, 0);
        let cfg = config(3, 2, 4);
        let fam = ChannelFamily::new(vec![perfect_pqc(3).unwrap(), sample_ruc(3, 4, &mut rng).unwrap()]).unwrap();
        let phi = random_pure_state(9, &mut rng).unwrap();
        let s = charlie_encode_with_channels(&cfg, fam, &phi, &mut rng).unwrap();
        let view = interior_attack_bob(&s).unwrap();
        assert!(view.alice_marginal.distance_to_maximally_mixed() <= 1e-10);
        assert!(interior_attack_bob(&s.without_key(1)).is_err());
    }

    #[test]
    fn interior_attack_requires_two_parties() {
        let mut rng = RngStream::new(9, 0);
        let cfg = config(2, 3, 2);
        let s = charlie_encode(&cfg, &random_pure_state(8, &mut rng).unwrap(), &mut rng).unwrap();
        assert!(interior_attack_bob(&s).is_err());
    }

    #[test]
    fn multiparty_sessions() {
        let mut rng = RngStream::new(10, 0);
        let cfg = config(2, 3, 1);
        let phi = random_separable_state(2, 4, 3, &mut rng).unwrap();
        let s = charlie_encode_with_channels(&cfg, perfect_family(2, 3), &phi, &mut rng).unwrap();
        let view = exterior_adversary_view(&s).unwrap();
        assert!(view.matrix().max_abs_diff(maximally_mixed(8).unwrap().matrix()) <= 1e-12);
        assert!(cooperate_decode(&s).unwrap().matrix().max_abs_diff(phi.matrix()) <= 1e-12);
        for coalition in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
            let out = non_colluder_marginal(&s, &coalition).unwrap();
            assert!(out.distance_to_maximally_mixed() <= 1e-10, "{coalition:?}");
        }
        assert!(non_colluder_marginal(&s, &[0, 1, 2]).is_err());

        let sampled = multiparty_session(&config(2, 3, 3), &phi, &mut rng).unwrap();
        assert!(cooperate_decode(&sampled).unwrap().matrix().max_abs_diff(phi.matrix()) <= 1e-12);
        assert!(multiparty_session(&config(2, 2, 3), &maximally_mixed(4).unwrap(), &mut rng).is_err());
    }

    #[test]
    fn marginal_commutes_with_local_channel() {
        let mut rng = RngStream::new(11, 0);
        let cfg = config(3, 2, 7);
        let phi = random_pure_state(9, &mut rng).unwrap();
        let s = charlie_encode(&cfg, &phi, &mut rng).unwrap();
        let joint = collusion_view(&s, &[1]).unwrap();
        let lhs = partial_trace(&joint, (3, 3), Subsystem::A).unwrap();
        let rhs = crate::channels::apply(
            s.channels().part(0),
            &partial_trace(&phi, (3, 3), Subsystem::A).unwrap(),
        )
        .unwrap();
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) <= 1e-12);
    }

    #[test]
    fn key_cost_examples() {
        let r = key_cost(&ProtocolConfig::new(8, 0.5, 2).unwrap());
        assert_eq!((r.perfect_bits, r.approx_bits), (12.0, 26.0));

        let big = ProtocolConfig::new(1 << 20, 0.5, 2).unwrap();
        assert_eq!(big.n_per_channel, 150 * (1 << 20) * 4);
        let r = key_cost(&big);
        assert_eq!((r.perfect_bits, r.approx_bits), (80.0, 60.0));
        assert!((r.ratio - 0.75).abs() < 1e-15);

        let mut prev = f64::INFINITY;
        for k in 1..=30 {
            let r = key_cost(&ProtocolConfig::new(1 << k, 0.5, 2).unwrap());
            assert!(r.ratio <= prev);
            prev = r.ratio;
        }
        assert!(prev < 0.7 && prev > 0.5);
    }

    #[test]
    fn key_bits_is_ceil_log2() {
        assert_eq!(key_bits(1), 0);
        assert_eq!(key_bits(2), 1);
        assert_eq!(key_bits(3), 2);
        assert_eq!(key_bits(4800), 13);
        assert_eq!(key_bits(4096), 12);
        assert_eq!(key_bits(4097), 13);
    }
}
