//! Monte Carlo estimators and inequality checks for product random unitary
//! channels.
//!
//! Each trial draws fresh channels and a fresh input from its own
//! [`RngStream`] (stream index = trial index), so results do not depend on
//! how trials are scheduled. Per-trial values are collected in trial order
//! and reduced sequentially.

use std::fmt;
use std::str::FromStr;

use crate::channels::{apply_product_with, perfect_pqc, sample_ruc, split_dims, ChannelFamily, RandomUnitaryChannel};
use crate::exec::ExecMode;
use crate::linalg::{
    hs_norm, local_conjugate, maximally_entangled_state, purity, trace_norm, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, Unitary, STATE_TOL,
};
use crate::random::{
    haar_unitary, random_product_pure_state, random_separable_decomposition, RngStream, SeparableState,
};
use crate::{Error, Result};

/// Slack allowed by [`BoundCheck`] for rounding.
pub const BOUND_SLACK: f64 = 1e-12;

/// Standard errors allowed between an estimate and an identity.
pub const IDENTITY_SIGMAS: f64 = 5.0;

/// Number of product terms in inputs drawn from [`InputFamily::Separable`].
pub const SEPARABLE_TERMS: usize = 4;

const TRIAL_DOMAIN: u16 = 1;
const LOCC_DOMAIN: u16 = 2;

/// Aggregate of independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct McStats {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for one trial.
    pub stderr: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub per_trial_values: Vec<f64>,
}

impl McStats {
    pub fn from_values(per_trial_values: Vec<f64>, master_seed: u64) -> Result<Self> {
        let trials = per_trial_values.len();
        if trials == 0 {
            return Err(Error::invalid("trials", "no trial values"));
        }
        let n = trials as f64;
        let mean = per_trial_values.iter().sum::<f64>() / n;
        let stderr = if trials < 2 {
            0.0
        } else {
            let var = per_trial_values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Ok(Self {
            mean,
            stderr,
            trials,
            master_seed,
            per_trial_values,
        })
    }
}

/// `observed <= bound`, up to [`BOUND_SLACK`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub observed: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl BoundCheck {
    pub fn new(observed: f64, bound: f64) -> Self {
        Self {
            observed,
            bound,
            satisfied: observed <= bound + BOUND_SLACK,
            slack: bound - observed,
        }
    }
}

/// Inputs fed to the product channel in Monte Carlo trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputFamily {
    ProductPure,
    Separable,
    MaxEntangled,
}

impl InputFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            InputFamily::ProductPure => "product-pure",
            InputFamily::Separable => "separable",
            InputFamily::MaxEntangled => "max-entangled",
        }
    }

    /// Draws one bipartite `d x d` input.
    pub fn sample(self, d: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
        match self {
            InputFamily::ProductPure => random_product_pure_state(d, d, rng),
            InputFamily::Separable => Ok(random_separable_decomposition(d, d, SEPARABLE_TERMS, rng)?.state()),
            InputFamily::MaxEntangled => maximally_entangled_state(d),
        }
    }
}

impl fmt::Display for InputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InputFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "product-pure" => Ok(InputFamily::ProductPure),
            "separable" => Ok(InputFamily::Separable),
            "max-entangled" => Ok(InputFamily::MaxEntangled),
            other => Err(Error::invalid("input_family", format!("unknown family `{other}`"))),
        }
    }
}

/// Where the channels of a trial come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ChannelSource {
    /// Fresh i.i.d. Haar unitaries every trial.
    #[default]
    Haar,
    /// The exact Weyl-Heisenberg channel; requested sizes are ignored.
    Perfect,
}

/// Trial count, seed, channel source and scheduling of an estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPlan {
    pub trials: usize,
    pub seed: u64,
    pub source: ChannelSource,
    pub exec: ExecMode,
}

impl McPlan {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            source: ChannelSource::Haar,
            exec: ExecMode::default(),
        }
    }

    pub fn with_source(mut self, source: ChannelSource) -> Self {
        self.source = source;
        self
    }

    pub fn with_exec(mut self, exec: ExecMode) -> Self {
        self.exec = exec;
        self
    }

    fn channel(&self, d: usize, n: usize, rng: &mut RngStream) -> Result<RandomUnitaryChannel> {
        match self.source {
            ChannelSource::Haar => sample_ruc(d, n, rng),
            ChannelSource::Perfect => perfect_pqc(d),
        }
    }

    fn effective_n(&self, d: usize, n: usize) -> usize {
        match self.source {
            ChannelSource::Haar => n,
            ChannelSource::Perfect => d * d,
        }
    }

    /// Runs `trial` for every index and aggregates in index order.
    fn run<F>(&self, trial: F) -> Result<McStats>
    where
        F: Fn(&mut RngStream) -> Result<f64> + Sync + Send,
    {
        let values = self.exec.try_map_indexed(self.trials, |t| {
            let mut rng = RngStream::in_domain(self.seed, TRIAL_DOMAIN, t as u64);
            trial(&mut rng)
        })?;
        McStats::from_values(values, self.seed)
    }

    /// Channel sums inside a trial stay sequential when trials themselves
    /// run in parallel.
    fn inner_exec(&self) -> ExecMode {
        ExecMode::Sequential
    }
}

/// `d / sqrt(n_A n_B)`.
pub fn claimed_distance_bound(d: usize, n_a: usize, n_b: usize) -> f64 {
    d as f64 / ((n_a as f64) * (n_b as f64)).sqrt()
}

/// `1/(n_A n_B) + 1/d^2`, the claimed Haar average of the output purity
/// for product pure inputs.
pub fn purity_identity(d: usize, n_a: usize, n_b: usize) -> f64 {
    1.0 / ((n_a as f64) * (n_b as f64)) + 1.0 / (d * d) as f64
}

/// Exact Haar average of `tr[(N_A (x) N_B)(a (x) b)]^2` for pure `a`, `b`.
///
/// The output factorizes, and `E tr N(a)^2 = 1/n + (1 - 1/n)/d` for one
/// uniform channel of `n` Haar unitaries, so the mean is the product of the
/// two factors. Unlike [`purity_identity`] this keeps the cross terms in
/// which only one of the two unitary indices differs.
pub fn product_purity_expectation(d: usize, n_a: usize, n_b: usize) -> f64 {
    let factor = |n: usize| {
        let n = n as f64;
        1.0 / n + (1.0 - 1.0 / n) / d as f64
    };
    factor(n_a) * factor(n_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDistanceEstimate {
    pub stats: McStats,
    /// `d / sqrt(n_A n_B)` with the channel sizes actually used.
    pub bound: f64,
    /// Only asserted for product pure inputs.
    pub check: Option<BoundCheck>,
}

/// Estimates `E ||(N_A (x) N_B)(phi) - 1/d^2||_1` over fresh channels and
/// inputs.
pub fn mc_expected_trace_distance(
    d: usize,
    n_a: usize,
    n_b: usize,
    family: InputFamily,
    plan: &McPlan,
) -> Result<TraceDistanceEstimate> {
    if plan.trials < 10 {
        return Err(Error::invalid("trials", "need at least 10 trials"));
    }
    let stats = plan.run(|rng| {
        let family_channels = ChannelFamily::new(vec![plan.channel(d, n_a, rng)?, plan.channel(d, n_b, rng)?])?;
        let input = family.sample(d, rng)?;
        let out = apply_product_with(plan.inner_exec(), &family_channels, &input)?;
        Ok(out.distance_to_maximally_mixed())
    })?;
    let bound = claimed_distance_bound(d, plan.effective_n(d, n_a), plan.effective_n(d, n_b));
    let check = (family == InputFamily::ProductPure).then(|| BoundCheck::new(stats.mean, bound));
    Ok(TraceDistanceEstimate { stats, bound, check })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityEstimate {
    pub stats: McStats,
    /// [`purity_identity`] for the channel sizes used.
    pub identity: f64,
    /// [`product_purity_expectation`] for the channel sizes used.
    pub product_expectation: f64,
    /// `|mean - identity| <= 5 stderr`.
    pub check: BoundCheck,
}

/// Estimates the output purity of the product channel on product pure
/// inputs.
pub fn mc_purity(d: usize, n_a: usize, n_b: usize, plan: &McPlan) -> Result<PurityEstimate> {
    if plan.trials < 30 {
        return Err(Error::invalid("trials", "need at least 30 trials"));
    }
    let stats = plan.run(|rng| {
        let channels = ChannelFamily::new(vec![plan.channel(d, n_a, rng)?, plan.channel(d, n_b, rng)?])?;
        let input = random_product_pure_state(d, d, rng)?;
        Ok(purity(&apply_product_with(plan.inner_exec(), &channels, &input)?))
    })?;
    let (ea, eb) = (plan.effective_n(d, n_a), plan.effective_n(d, n_b));
    let identity = purity_identity(d, ea, eb);
    let check = BoundCheck::new((stats.mean - identity).abs(), IDENTITY_SIGMAS * stats.stderr);
    Ok(PurityEstimate {
        stats,
        identity,
        product_expectation: product_purity_expectation(d, ea, eb),
        check,
    })
}

/// `||(N_A (x) N_B)(sigma) - 1/d^2||_1 <= eps_A + eps_B`, where `eps_X` is
/// the largest distance of `N_X` applied to a local term of the
/// decomposition.
pub fn check_separable_2eps(
    chan_a: &RandomUnitaryChannel,
    chan_b: &RandomUnitaryChannel,
    decomposition: &SeparableState,
) -> Result<BoundCheck> {
    // Fields are public, so revalidate.
    let decomposition = SeparableState::new(decomposition.terms.clone())?;
    let (da, db) = decomposition.dims();
    if (da, db) != (chan_a.dim(), chan_b.dim()) {
        return Err(Error::DimensionMismatch {
            expected: chan_a.dim() * chan_b.dim(),
            found: da * db,
        });
    }
    let mut eps_a = 0.0f64;
    let mut eps_b = 0.0f64;
    for t in &decomposition.terms {
        eps_a = eps_a.max(crate::channels::epsilon_randomizing_distance(chan_a, &t.a)?);
        eps_b = eps_b.max(crate::channels::epsilon_randomizing_distance(chan_b, &t.b)?);
    }
    let family = ChannelFamily::new(vec![chan_a.clone(), chan_b.clone()])?;
    let out = crate::channels::apply_product(&family, &decomposition.state())?;
    Ok(BoundCheck::new(out.distance_to_maximally_mixed(), eps_a + eps_b))
}

/// `log2(D) - S(state)` in bits for a state of dimension `D`.
pub fn entropy_deficit(state: &DensityMatrix, d_total_log2: f64) -> f64 {
    let deficit = d_total_log2 - von_neumann_entropy(state);
    if (-1e-8..0.0).contains(&deficit) {
        0.0
    } else {
        deficit
    }
}

/// Outcome distribution of the product projective measurement in the
/// bases given by the columns of `basis_a` and `basis_b`.
fn product_measurement(
    state: &DensityMatrix,
    dims: (usize, usize),
    basis_a: &Unitary,
    basis_b: &Unitary,
) -> Result<Vec<f64>> {
    let total = dims.0 * dims.1;
    let (la, ra) = split_dims(&[dims.0, dims.1], 0, total)?;
    let (lb, rb) = split_dims(&[dims.0, dims.1], 1, total)?;
    // <a b| rho |a b> is the diagonal of (U_A (x) U_B)^dagger rho (U_A (x) U_B).
    let m = local_conjugate(state.matrix(), &basis_a.matrix().adjoint(), la, ra);
    let m = local_conjugate(&m, &basis_b.matrix().adjoint(), lb, rb);
    Ok((0..total).map(|i| m[(i, i)].re).collect())
}

/// `sum_{ab} |p_ab - q_ab|` for one product measurement setting.
pub fn locc_distance_in_bases(
    state: &DensityMatrix,
    reference: &DensityMatrix,
    dims: (usize, usize),
    basis_a: &Unitary,
    basis_b: &Unitary,
) -> Result<f64> {
    let total = dims.0 * dims.1;
    for rho in [state, reference] {
        if rho.dim() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: rho.dim(),
            });
        }
    }
    if basis_a.dim() != dims.0 || basis_b.dim() != dims.1 {
        return Err(Error::invalid(
            "basis",
            "measurement bases do not match the local dimensions",
        ));
    }
    let p = product_measurement(state, dims, basis_a, basis_b)?;
    let q = product_measurement(reference, dims, basis_a, basis_b)?;
    Ok(p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum())
}

/// Largest total-variation gap `sum |p - q|` over `num_settings` random
/// product measurements (independent Haar bases on each side).
pub fn locc_distinguishability(
    state: &DensityMatrix,
    reference: &DensityMatrix,
    dims: (usize, usize),
    num_settings: usize,
    seed: u64,
) -> Result<f64> {
    if num_settings == 0 {
        return Err(Error::invalid("num_settings", "need at least one measurement setting"));
    }
    let gaps = ExecMode::default().try_map_indexed(num_settings, |s| {
        let mut rng = RngStream::in_domain(seed, LOCC_DOMAIN, s as u64);
        let ua = haar_unitary(dims.0, &mut rng)?;
        let ub = haar_unitary(dims.1, &mut rng)?;
        locc_distance_in_bases(state, reference, dims, &ua, &ub)
    })?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// `||X - 1/D||_1^2 <= D ||X||_2^2 - 1` for a unit-trace Hermitian `X` of
/// dimension `D = d_sq`.
pub fn check_norm_relation(x: &ComplexMatrix, d_sq: usize) -> Result<BoundCheck> {
    if !x.is_square() || x.rows() != d_sq {
        return Err(Error::DimensionMismatch {
            expected: d_sq,
            found: x.rows(),
        });
    }
    if x.hermiticity_error() > STATE_TOL {
        return Err(Error::invalid("x", "matrix is not Hermitian"));
    }
    let tr = x.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::invalid(
            "x",
            format!("trace is {tr}, the relation needs trace 1"),
        ));
    }
    let mut shifted = x.clone();
    for i in 0..d_sq {
        shifted[(i, i)] -= 1.0 / d_sq as f64;
    }
    let lhs = trace_norm(&shifted)?.powi(2);
    let rhs = d_sq as f64 * hs_norm(x).powi(2) - 1.0;
    Ok(BoundCheck::new(lhs, rhs))
}

/// `E Y <= sqrt(E Y^2)` on the per-trial values.
pub fn jensen_chain_check(mc: &McStats) -> BoundCheck {
    let n = mc.per_trial_values.len() as f64;
    let mean = mc.per_trial_values.iter().sum::<f64>() / n;
    let mean_sq = mc.per_trial_values.iter().map(|y| y * y).sum::<f64>() / n;
    BoundCheck::new(mean, mean_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::apply_product;
    use crate::linalg::{maximally_mixed, C64};
    use crate::random::{random_pure_state, random_separable_decomposition, SeparableTerm};

    #[test]
    fn stats_and_bound_check_basics() {
        let s = McStats::from_values(vec![1.0, 2.0, 3.0, 4.0], 9).unwrap();
        assert_eq!(s.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((s.stderr - sd / 2.0).abs() < 1e-15);
        assert!(McStats::from_values(vec![], 0).is_err());

        let b = BoundCheck::new(1.0, 1.0);
        assert!(b.satisfied);
        assert_eq!(b.slack, 0.0);
        assert!(!BoundCheck::new(1.0 + 1e-9, 1.0).satisfied);
    }

    #[test]
    fn family_names() {
        for f in [
            InputFamily::ProductPure,
            InputFamily::Separable,
            InputFamily::MaxEntangled,
        ] {
            assert_eq!(f.as_str().parse::<InputFamily>().unwrap(), f);
        }
        assert_eq!("product_pure".parse::<InputFamily>().unwrap(), InputFamily::ProductPure);
        assert!("ghz".parse::<InputFamily>().is_err());
    }

    #[test]
    fn bound_constants() {
        assert_eq!(claimed_distance_bound(4, 64, 64), 0.0625);
        let n = crate::channels::required_n(4, 0.5).unwrap();
        assert!((claimed_distance_bound(4, n, n) - 0.25 / 150.0).abs() < 1e-15);
        assert!((purity_identity(4, 32, 32) - 0.063_476_562_5).abs() < 1e-15);
    }

    #[test]
    fn perfect_channels_give_zero_distance() {
        let plan = McPlan::new(20, 1).with_source(ChannelSource::Perfect);
        for family in [
            InputFamily::ProductPure,
            InputFamily::Separable,
            InputFamily::MaxEntangled,
        ] {
            let est = mc_expected_trace_distance(3, 5, 5, family, &plan).unwrap();
            assert!(est.stats.per_trial_values.iter().all(|&v| v <= 1e-10));
            assert_eq!(est.check.is_some(), family == InputFamily::ProductPure);
        }
        assert!(mc_expected_trace_distance(3, 5, 5, InputFamily::ProductPure, &McPlan::new(5, 1)).is_err());
    }

    #[test]
    fn estimates_are_reproducible_across_exec_modes() {
        let seq = McPlan::new(12, 77).with_exec(ExecMode::Sequential);
        let par = McPlan::new(12, 77).with_exec(ExecMode::Parallel);
        let a = mc_expected_trace_distance(2, 6, 6, InputFamily::Separable, &seq).unwrap();
        let b = mc_expected_trace_distance(2, 6, 6, InputFamily::Separable, &par).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn purity_matches_factorized_expectation() {
        let est = mc_purity(3, 8, 5, &McPlan::new(400, 3)).unwrap();
        let diff = (est.stats.mean - est.product_expectation).abs();
        assert!(
            diff <= IDENTITY_SIGMAS * est.stats.stderr,
            "diff {diff} se {}",
            est.stats.stderr
        );
        assert!(mc_purity(3, 8, 5, &McPlan::new(29, 3)).is_err());
    }

    /// Exact enumeration oracle for the factorized expectation at d = 2,
    /// n = 2: E tr N(a)^2 = (1 + E|<u|v>|^2) / 2 with E|<u|v>|^2 = 1/2.
    #[test]
    fn factorized_expectation_small_case() {
        assert!((product_purity_expectation(2, 2, 2) - 0.75 * 0.75).abs() < 1e-15);
        assert!((product_purity_expectation(4, 1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_unitary_channels_keep_purity_one() {
        let est = mc_purity(3, 1, 1, &McPlan::new(30, 5)).unwrap();
        assert!(est.stats.per_trial_values.iter().all(|&p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn perfect_channels_give_minimal_purity() {
        let est = mc_purity(3, 1, 1, &McPlan::new(30, 5).with_source(ChannelSource::Perfect)).unwrap();
        assert!(est
            .stats
            .per_trial_values
            .iter()
            .all(|&p| (p - 1.0 / 9.0).abs() < 1e-12));
    }

    #[test]
    fn separable_triangle_bound() {
        let mut rng = RngStream::new(11, 0);
        let p = perfect_pqc(3).unwrap();
        let sep = random_separable_decomposition(3, 3, 3, &mut rng).unwrap();
        let chk = check_separable_2eps(&p, &p, &sep).unwrap();
        assert!(chk.observed <= 1e-10 && chk.bound <= 1e-10 && chk.satisfied);

        let a = sample_ruc(2, 8, &mut rng).unwrap();
        let b = sample_ruc(2, 8, &mut rng).unwrap();
        let single = random_separable_decomposition(2, 2, 1, &mut rng).unwrap();
        assert!(check_separable_2eps(&a, &b, &single).unwrap().satisfied);

        let a = sample_ruc(4, 64, &mut rng).unwrap();
        let b = sample_ruc(4, 64, &mut rng).unwrap();
        let four = random_separable_decomposition(4, 4, 4, &mut rng).unwrap();
        let chk = check_separable_2eps(&a, &b, &four).unwrap();
        assert!(chk.satisfied && chk.slack >= 0.0);

        let mut bad = four.clone();
        bad.terms[0].weight += 0.1;
        assert!(check_separable_2eps(&a, &b, &bad).is_err());
        let wrong_dims = SeparableState::new(vec![SeparableTerm {
            weight: 1.0,
            a: random_pure_state(2, &mut rng).unwrap(),
            b: random_pure_state(2, &mut rng).unwrap(),
        }])
        .unwrap();
        assert!(check_separable_2eps(&a, &b, &wrong_dims).is_err());
    }

    #[test]
    fn entropy_deficit_examples() {
        assert!(entropy_deficit(&maximally_mixed(8).unwrap(), 3.0).abs() < 1e-12);
        let pure = random_pure_state(8, &mut RngStream::new(0, 0)).unwrap();
        assert!((entropy_deficit(&pure, 3.0) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn locc_examples() {
        let mut rng = RngStream::new(12, 0);
        let phi = random_product_pure_state(3, 3, &mut rng).unwrap();
        assert!(locc_distinguishability(&phi, &phi, (3, 3), 10, 1).unwrap() <= 1e-12);

        for d in [2, 3] {
            let p = perfect_pqc(d).unwrap();
            let fam = ChannelFamily::new(vec![p.clone(), p]).unwrap();
            let view = apply_product(&fam, &maximally_entangled_state(d).unwrap()).unwrap();
            let mixed = maximally_mixed(d * d).unwrap();
            assert!(locc_distinguishability(&view, &mixed, (d, d), 50, 2).unwrap() <= 1e-10);
        }

        let ket = |k: usize| {
            let mut v = vec![C64::new(0.0, 0.0); 4];
            v[k] = C64::new(1.0, 0.0);
            DensityMatrix::from_ket(&v).unwrap()
        };
        let id = Unitary::identity(2);
        let gap = locc_distance_in_bases(&ket(0), &ket(3), (2, 2), &id, &id).unwrap();
        assert!((gap - 2.0).abs() < 1e-15);
        assert!(locc_distinguishability(&ket(0), &mixed_dim(9), (2, 2), 3, 0).is_err());
    }

    fn mixed_dim(d: usize) -> DensityMatrix {
        maximally_mixed(d).unwrap()
    }

    #[test]
    fn locc_is_symmetric_and_bounded() {
        let mut rng = RngStream::new(13, 0);
        for _ in 0..10 {
            let a = random_pure_state(6, &mut rng).unwrap();
            let b = random_pure_state(6, &mut rng).unwrap();
            let ab = locc_distinguishability(&a, &b, (2, 3), 8, 5).unwrap();
            let ba = locc_distinguishability(&b, &a, (2, 3), 8, 5).unwrap();
            assert_eq!(ab, ba);
            assert!(ab <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn norm_relation_examples() {
        let eq = check_norm_relation(maximally_mixed(4).unwrap().matrix(), 4).unwrap();
        assert!(eq.satisfied && eq.observed.abs() < 1e-24 && eq.bound.abs() < 1e-12);

        let mut ket = vec![C64::new(0.0, 0.0); 4];
        ket[0] = C64::new(1.0, 0.0);
        let pure = DensityMatrix::from_ket(&ket).unwrap();
        let chk = check_norm_relation(pure.matrix(), 4).unwrap();
        assert!((chk.observed - 2.25).abs() < 1e-12);
        assert!((chk.bound - 3.0).abs() < 1e-12);
        assert!(chk.satisfied);

        let mut rng = RngStream::new(14, 0);
        for _ in 0..100 {
            let rho = random_separable_decomposition(3, 3, 3, &mut rng).unwrap().state();
            assert!(check_norm_relation(rho.matrix(), 9).unwrap().satisfied);
        }
        assert!(check_norm_relation(&ComplexMatrix::identity(4), 4).is_err());
        assert!(check_norm_relation(pure.matrix(), 9).is_err());
    }

    #[test]
    fn jensen_examples() {
        let c = McStats::from_values(vec![0.3; 10], 0).unwrap();
        let chk = jensen_chain_check(&c);
        assert!(chk.satisfied && chk.slack.abs() < 1e-15);
        let two = McStats::from_values(vec![0.0, 2.0], 0).unwrap();
        let chk = jensen_chain_check(&two);
        assert_eq!(chk.observed, 1.0);
        assert!((chk.bound - 2f64.sqrt()).abs() < 1e-15);
        let est = mc_expected_trace_distance(2, 4, 4, InputFamily::ProductPure, &McPlan::new(10, 0)).unwrap();
        assert!(jensen_chain_check(&est.stats).satisfied);
    }
}
