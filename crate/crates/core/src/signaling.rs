//! The Alice-to-Bob channel.
//!
//! Alice chooses a letter by choosing which basis to measure in. Bob cannot
//! identify single states but can average `f` over the sequence he receives.
//! The exact averages come from the two conditional ensembles; Monte-Carlo
//! routines model Bob's finite statistics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{ensemble_average, FunctionalObservable};
use crate::states::{self, build_entangled, Ensemble, EnsembleSampler, EntangledState, PureState};
use crate::streams::{self, domain, par_map, Streams};
use crate::tolerance;

/// Draws per Monte-Carlo partition. Fixed so that results do not depend on
/// the number of workers.
pub const PARTITION: usize = 8192;

/// Trials per channel partition.
pub const CHANNEL_PARTITION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    /// Alice measures in `basis_a`.
    Zero,
    /// Alice measures in `basis_a_prime`.
    One,
}

impl Letter {
    pub fn index(self) -> usize {
        match self {
            Letter::Zero => 0,
            Letter::One => 1,
        }
    }

    fn stream_domain(self) -> u64 {
        match self {
            Letter::Zero => domain::LETTER_B,
            Letter::One => domain::LETTER_B_PRIME,
        }
    }
}

/// An EPR source, two Alice bases spanning the same subspace, and Bob's
/// observable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    state: EntangledState,
    basis_a: Vec<PureState>,
    basis_a_prime: Vec<PureState>,
    f: FunctionalObservable,
    ensembles: [Ensemble; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRepr {
    state: EntangledState,
    basis_a: Vec<PureState>,
    basis_a_prime: Vec<PureState>,
    observable: FunctionalObservable,
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = Error;
    fn try_from(r: ScenarioRepr) -> Result<Self> {
        Scenario::new(r.state, r.basis_a, r.basis_a_prime, r.observable)
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        Self {
            state: s.state,
            basis_a: s.basis_a,
            basis_a_prime: s.basis_a_prime,
            observable: s.f,
        }
    }
}

impl Scenario {
    pub fn new(
        state: EntangledState,
        basis_a: Vec<PureState>,
        basis_a_prime: Vec<PureState>,
        f: FunctionalObservable,
    ) -> Result<Self> {
        if f.dim() != state.dim_b() {
            return Err(Error::DimensionMismatch {
                expected: state.dim_b(),
                actual: f.dim(),
            });
        }
        let e0 = state.rebase_alice(&basis_a)?.conditional_ensemble();
        let e1 = state.rebase_alice(&basis_a_prime)?.conditional_ensemble();
        Ok(Self {
            state,
            basis_a,
            basis_a_prime,
            f,
            ensembles: [e0, e1],
        })
    }

    /// Random scenario: Haar Alice span of dimension `n`, two Haar bases of
    /// that span, random coefficients and Bob states.
    pub fn random<R: Rng + ?Sized>(
        dim_a: usize,
        n: usize,
        f: FunctionalObservable,
        rng: &mut R,
    ) -> Result<Self> {
        let state = states::random_entangled(dim_a, f.dim(), n, rng)?;
        let basis_a = states::random_alice_rebasing(&state, rng)?;
        let basis_a_prime = states::random_alice_rebasing(&state, rng)?;
        Self::new(state, basis_a, basis_a_prime, f)
    }

    pub fn state(&self) -> &EntangledState {
        &self.state
    }

    pub fn basis(&self, letter: Letter) -> &[PureState] {
        match letter {
            Letter::Zero => &self.basis_a,
            Letter::One => &self.basis_a_prime,
        }
    }

    pub fn observable(&self) -> &FunctionalObservable {
        &self.f
    }

    /// Bob's ensemble for the given letter.
    pub fn ensemble(&self, letter: Letter) -> &Ensemble {
        &self.ensembles[letter.index()]
    }

    fn member_values(&self, letter: Letter) -> Result<Vec<f64>> {
        self.ensemble(letter)
            .members()
            .iter()
            .map(|(_, s)| self.f.evaluate(s))
            .collect()
    }
}

/// Bell pair `(|00> + |11>)/√2` with Alice measuring `{e0, e1}` for letter 0
/// and `{(e0 ± e1)/√2}` for letter 1.
pub fn bell_scenario(f: FunctionalObservable) -> Result<Scenario> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| num_complex::Complex64::new(x, 0.0);
    let e0 = PureState::basis(2, 0)?;
    let e1 = PureState::basis(2, 1)?;
    let plus = PureState::from_amplitudes(&[c(1.0), c(1.0)])?;
    let minus = PureState::from_amplitudes(&[c(1.0), c(-1.0)])?;
    let state = build_entangled(vec![c(s), c(s)], vec![e0.clone(), e1.clone()], vec![e0.clone(), e1.clone()])?;
    Scenario::new(state, vec![e0, e1], vec![plus, minus], f)
}

/// Sample statistics of one letter's `f` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mc_fb: f64,
    pub mc_fbprime: f64,
    pub stderr_b: f64,
    pub stderr_bprime: f64,
    /// `|mc_fb - mc_fbprime| / sqrt(stderr_b^2 + stderr_bprime^2)`. With both
    /// standard errors zero it is infinite if the means differ by more than
    /// `1e-12`, else zero.
    pub z: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl MonteCarloEstimate {
    pub fn mc_gap(&self) -> f64 {
        self.mc_fb - self.mc_fbprime
    }

    pub fn pooled_stderr(&self) -> f64 {
        self.stderr_b.hypot(self.stderr_bprime)
    }
}

/// Exact averages `f[b]`, `f[b']` and, when sampled, Bob's estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalReport {
    pub exact_fb: f64,
    pub exact_fbprime: f64,
    pub gap: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none", default)]
    pub monte_carlo: Option<MonteCarloEstimate>,
}

impl SignalReport {
    /// True when a Monte-Carlo estimate exists and its z reaches `threshold`.
    pub fn signal_detected(&self, threshold: f64) -> bool {
        self.monte_carlo.is_some_and(|mc| mc.z >= threshold)
    }
}

/// `f[b]` and `f[b']` from the two conditional ensembles. No randomness.
pub fn exact_gap(sc: &Scenario) -> Result<SignalReport> {
    let exact_fb = ensemble_average(&sc.f, sc.ensemble(Letter::Zero))?;
    let exact_fbprime = ensemble_average(&sc.f, sc.ensemble(Letter::One))?;
    Ok(SignalReport {
        exact_fb,
        exact_fbprime,
        gap: exact_fb - exact_fbprime,
        monte_carlo: None,
    })
}

/// `n` i.i.d. states from the letter's ensemble.
pub fn sample_sequence<R: Rng + ?Sized>(
    sc: &Scenario,
    letter: Letter,
    n: usize,
    rng: &mut R,
) -> Result<Vec<PureState>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let ens = sc.ensemble(letter);
    let sampler = ens.sampler();
    Ok((0..n)
        .map(|_| ens.members()[sampler.sample_index(rng)].1.clone())
        .collect())
}

/// Running count, mean and centered second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pooled moments of two disjoint samples.
    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.count - 1) as f64).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.sample_variance() / self.count as f64).sqrt()
    }
}

fn draw_partition<R: Rng + ?Sized>(
    values: &[f64],
    sampler: &EnsembleSampler,
    len: usize,
    rng: &mut R,
    mut sink: impl FnMut(f64),
) {
    for _ in 0..len {
        sink(values[sampler.sample_index(rng)]);
    }
}

/// Per-sample `f` values Bob records for one letter, in draw order. Uses the
/// same streams as [`monte_carlo_report`].
pub fn sample_values(sc: &Scenario, letter: Letter, n: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
    let values = sc.member_values(letter)?;
    let sampler = sc.ensemble(letter).sampler();
    let streams = Streams::new(seed);
    let parts = streams::partitions(n, PARTITION);
    let chunks = par_map(workers, parts.len(), |i| {
        let mut rng = streams.stream(letter.stream_domain(), i as u64);
        let mut out = Vec::with_capacity(parts[i].1);
        draw_partition(&values, &sampler, parts[i].1, &mut rng, |x| out.push(x));
        out
    });
    Ok(chunks.concat())
}

fn letter_moments(sc: &Scenario, letter: Letter, n: usize, streams: Streams, workers: usize) -> Result<Moments> {
    let values = sc.member_values(letter)?;
    let sampler = sc.ensemble(letter).sampler();
    let parts = streams::partitions(n, PARTITION);
    let partials = par_map(workers, parts.len(), |i| {
        let mut rng = streams.stream(letter.stream_domain(), i as u64);
        let mut m = Moments::default();
        draw_partition(&values, &sampler, parts[i].1, &mut rng, |x| m.push(x));
        m
    });
    Ok(partials.into_iter().fold(Moments::default(), Moments::merge))
}

/// Exact averages plus sample means over `n` draws per letter, standard
/// errors and the two-sample z statistic.
pub fn monte_carlo_report(sc: &Scenario, n: usize, seed: u64, workers: usize) -> Result<SignalReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let mut report = exact_gap(sc)?;
    let streams = Streams::new(seed);
    let b = letter_moments(sc, Letter::Zero, n, streams, workers)?;
    let bp = letter_moments(sc, Letter::One, n, streams, workers)?;
    let (stderr_b, stderr_bprime) = (b.stderr(), bp.stderr());
    let diff = (b.mean - bp.mean).abs();
    let pooled = stderr_b.hypot(stderr_bprime);
    let z = if pooled > 0.0 {
        diff / pooled
    } else if diff > tolerance::STRUCTURAL {
        f64::INFINITY
    } else {
        0.0
    };
    report.monte_carlo = Some(MonteCarloEstimate {
        mc_fb: b.mean,
        mc_fbprime: bp.mean,
        stderr_b,
        stderr_bprime,
        z,
        n_samples: n,
        seed,
    });
    Ok(report)
}

/// One point of a convergence curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub mc_gap: f64,
    pub stderr: f64,
}

/// Monte-Carlo gap and pooled standard error at each sample size. Prefixes
/// of the same streams are reused, so larger `n` extends smaller ones.
pub fn convergence_series(sc: &Scenario, sizes: &[usize], seed: u64, workers: usize) -> Result<Vec<ConvergencePoint>> {
    sizes
        .iter()
        .map(|&n| {
            let mc = monte_carlo_report(sc, n, seed, workers)?
                .monte_carlo
                .expect("monte_carlo_report fills the estimate");
            Ok(ConvergencePoint {
                n,
                mc_gap: mc.mc_gap(),
                stderr: mc.pooled_stderr(),
            })
        })
        .collect()
}

/// Outcome of sending random bits through the channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub block_length: usize,
    pub trials: usize,
    pub bit_errors: usize,
    pub bit_error_rate: f64,
    /// `1 - H2(bit_error_rate)`, or 0 when the exact gap vanishes.
    pub estimated_capacity_bits_per_block: f64,
    pub decision_threshold: f64,
    pub gap: f64,
    pub seed: u64,
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Each trial encodes a uniformly random letter; Bob averages `f` over a
/// block of `block` states and decodes by comparing with the midpoint of the
/// exact averages. A mean exactly on the threshold decodes as letter one.
pub fn channel_capacity(sc: &Scenario, block: usize, trials: usize, seed: u64, workers: usize) -> Result<ChannelReport> {
    if block == 0 || trials == 0 {
        return Err(Error::InvalidParameter(
            "block length and trials must be at least 1".into(),
        ));
    }
    let exact = exact_gap(sc)?;
    let threshold = 0.5 * (exact.exact_fb + exact.exact_fbprime);
    let zero_above = exact.exact_fb >= exact.exact_fbprime;
    let values = [sc.member_values(Letter::Zero)?, sc.member_values(Letter::One)?];
    let samplers = [sc.ensemble(Letter::Zero).sampler(), sc.ensemble(Letter::One).sampler()];
    let streams = Streams::new(seed);
    let parts = streams::partitions(trials, CHANNEL_PARTITION);
    let errors = par_map(workers, parts.len(), |i| {
        let mut rng = streams.stream(domain::CHANNEL, i as u64);
        let mut errors = 0usize;
        for _ in 0..parts[i].1 {
            let letter = if rng.random::<bool>() { Letter::One } else { Letter::Zero };
            let l = letter.index();
            let mut sum = 0.0;
            draw_partition(&values[l], &samplers[l], block, &mut rng, |x| sum += x);
            let mean = sum / block as f64;
            let decoded = if (mean > threshold) == zero_above && mean != threshold {
                Letter::Zero
            } else {
                Letter::One
            };
            errors += usize::from(decoded != letter);
        }
        errors
    });
    let bit_errors: usize = errors.into_iter().sum();
    let bit_error_rate = bit_errors as f64 / trials as f64;
    let capacity = if exact.gap.abs() < tolerance::DERIVED {
        0.0
    } else {
        1.0 - binary_entropy(bit_error_rate)
    };
    Ok(ChannelReport {
        block_length: block,
        trials,
        bit_errors,
        bit_error_rate,
        estimated_capacity_bits_per_block: capacity,
        decision_threshold: threshold,
        gap: exact.gap,
        seed,
    })
}

/// Largest `|gap|` found over `draws` random scenarios for `f`, with
/// `dim_a` in `{2, ..., max(2, dim_b)}` and full-rank Alice spans.
pub fn search_signaling_scenario(f: &FunctionalObservable, draws: usize, seed: u64) -> Result<Option<(Scenario, f64)>> {
    let streams = Streams::new(seed);
    let mut best: Option<(Scenario, f64)> = None;
    for i in 0..draws {
        let mut rng = streams.stream(domain::SEARCH, i as u64);
        let dim_a = rng.random_range(2..=f.dim().max(2));
        let sc = Scenario::random(dim_a, dim_a, f.clone(), &mut rng)?;
        let gap = exact_gap(&sc)?.gap.abs();
        if best.as_ref().is_none_or(|(_, g)| gap > *g) {
            best = Some((sc, gap));
        }
    }
    Ok(best)
}
