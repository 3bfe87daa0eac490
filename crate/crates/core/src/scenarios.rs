//! Experiment harness: randomized TVD studies over Haar inputs, the
//! phi-parameterized prepare-and-measure setup, the CGLMP entanglement
//! setup with its inequality evaluator, the cutoff sweep, and report
//! statistics.
//!
//! All studies are deterministic functions of (config, seed): every setup
//! owns independent RNG streams addressed by its index, so parallel and
//! serial executions agree bit for bit.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::p1::{run_ent_trial_conj, run_pm_trial, P1Params};
use crate::prtq::{bloch_from_state, prtq_rejection_trial, BlochVector};
use crate::qmath::{
    born_entangled, born_pm, complete_basis, conjugate_basis, Basis, JointDistribution, PureState,
};
use crate::sampling::{is_clamped, random_basis, random_pure_state, RngStream};
use crate::stats::mean_and_std_err;
use num_complex::Complex64;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("study needs at least one setup and one trial (n = {n}, n_ini = {n_ini})")]
    EmptyStudy { n: usize, n_ini: usize },
    #[error("protocol '{protocol}' does not support the {scenario} scenario at d = {d}")]
    Unsupported {
        protocol: String,
        scenario: Scenario,
        d: usize,
    },
    #[error("empty distribution: no accepted trials")]
    EmptyDistribution,
    #[error("CGLMP self-check failed: analytic I3 = {got}, expected 2.87 within 0.005")]
    CglmpSelfCheck { got: f64 },
    #[error("phi setup requires d = 3, got {0}")]
    PhiDimension(usize),
    #[error(transparent)]
    Sampling(#[from] crate::sampling::SamplingError),
    #[error(transparent)]
    Qmath(#[from] crate::qmath::QmathError),
}

/// Which statistics the protocol must reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Pm,
    Ent,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::Pm => write!(f, "pm"),
            Scenario::Ent => write!(f, "ent"),
        }
    }
}

/// Outcome counts of one setup, with aborts tracked separately. Reported
/// probabilities exclude aborted runs (post-selection).
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    counts: Vec<u64>,
    n_ini: usize,
    clamped: u64,
}

impl EmpiricalDistribution {
    pub fn new(cells: usize, n_ini: usize) -> Self {
        Self {
            counts: vec![0; cells],
            n_ini,
            clamped: 0,
        }
    }

    pub fn record(&mut self, cell: usize) {
        self.counts[cell] += 1;
    }

    pub fn record_clamp(&mut self) {
        self.clamped += 1;
    }

    pub fn n_out(&self) -> usize {
        self.counts.iter().sum::<u64>() as usize
    }

    pub fn n_ini(&self) -> usize {
        self.n_ini
    }

    pub fn aborts(&self) -> usize {
        self.n_ini - self.n_out()
    }

    pub fn clamped(&self) -> u64 {
        self.clamped
    }

    pub fn accept_ratio(&self) -> f64 {
        self.n_out() as f64 / self.n_ini as f64
    }

    /// Normalized probabilities over accepted runs; errors when everything
    /// aborted.
    pub fn probs(&self) -> Result<Vec<f64>, ScenarioError> {
        let n = self.n_out();
        if n == 0 {
            return Err(ScenarioError::EmptyDistribution);
        }
        Ok(self
            .counts
            .iter()
            .map(|&c| c as f64 / n as f64)
            .collect())
    }
}

/// Total variation distance between two distributions on the same outcome
/// space: half the l1 distance.
pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions live on different spaces");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// A simulation protocol: runs a block of trials for one setup and returns
/// the outcome counts. Plugin point for additional protocols.
pub trait Protocol: Sync {
    fn id(&self) -> String;
    fn dim(&self) -> usize;

    fn run_pm_setup(
        &self,
        state: &PureState,
        meas: &Basis,
        n_ini: usize,
        lambda_rng: &mut RngStream,
        trial_rng: &mut RngStream,
    ) -> Result<EmpiricalDistribution, ScenarioError>;

    fn run_ent_setup(
        &self,
        meas_a: &Basis,
        meas_b: &Basis,
        n_ini: usize,
        lambda_rng: &mut RngStream,
        trial_rng: &mut RngStream,
    ) -> Result<EmpiricalDistribution, ScenarioError>;
}

/// The P1 protocol behind the [`Protocol`] interface.
#[derive(Debug, Clone)]
pub struct P1Protocol {
    pub params: P1Params,
}

impl P1Protocol {
    pub fn new(params: P1Params) -> Self {
        Self { params }
    }

    pub fn with_defaults(d: usize) -> Self {
        Self::new(P1Params::defaults(d))
    }
}

impl Protocol for P1Protocol {
    fn id(&self) -> String {
        "p1".into()
    }

    fn dim(&self) -> usize {
        self.params.d
    }

    fn run_pm_setup(
        &self,
        state: &PureState,
        meas: &Basis,
        n_ini: usize,
        lambda_rng: &mut RngStream,
        trial_rng: &mut RngStream,
    ) -> Result<EmpiricalDistribution, ScenarioError> {
        let d = self.params.d;
        let cfg = self.params.rejection_config();
        let mut dist = EmpiricalDistribution::new(d, n_ini);
        for _ in 0..n_ini {
            let lambda = random_basis(d, lambda_rng)?;
            let mt = crate::p1::match_table(&lambda, meas);
            if is_clamped(crate::p1::p1_weight(&mt, &self.params), &cfg) {
                dist.record_clamp();
            }
            let rec = run_pm_trial(state, meas, &lambda, &self.params, trial_rng);
            if let Some(b) = rec.b {
                dist.record(b);
            }
        }
        Ok(dist)
    }

    fn run_ent_setup(
        &self,
        meas_a: &Basis,
        meas_b: &Basis,
        n_ini: usize,
        lambda_rng: &mut RngStream,
        trial_rng: &mut RngStream,
    ) -> Result<EmpiricalDistribution, ScenarioError> {
        let d = self.params.d;
        let b_conj = conjugate_basis(meas_b);
        let cfg = self.params.rejection_config();
        let mut dist = EmpiricalDistribution::new(d * d, n_ini);
        for _ in 0..n_ini {
            let lambda = random_basis(d, lambda_rng)?;
            let mt = crate::p1::match_table(&lambda, &b_conj);
            if is_clamped(crate::p1::p1_weight(&mt, &self.params), &cfg) {
                dist.record_clamp();
            }
            let rec = run_ent_trial_conj(meas_a, &b_conj, &lambda, &self.params, trial_rng);
            if let (Some(a), Some(b)) = (rec.a, rec.b) {
                dist.record(a * d + b);
            }
        }
        Ok(dist)
    }
}

/// The d=2 rejection-method reference protocol behind the [`Protocol`]
/// interface (prepare-and-measure only).
#[derive(Debug, Clone, Default)]
pub struct PrtqRejectionProtocol;

impl Protocol for PrtqRejectionProtocol {
    fn id(&self) -> String {
        "prtq".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn run_pm_setup(
        &self,
        state: &PureState,
        meas: &Basis,
        n_ini: usize,
        lambda_rng: &mut RngStream,
        trial_rng: &mut RngStream,
    ) -> Result<EmpiricalDistribution, ScenarioError> {
        let x = bloch_from_state(state)?;
        let y = bloch_from_state(meas.vector(0))?;
        let mut dist = EmpiricalDistribution::new(2, n_ini);
        for _ in 0..n_ini {
            let lambda = BlochVector::random(lambda_rng);
            let u = trial_rng.uniform();
            if let Some(b) = prtq_rejection_trial(&x, &y, &lambda, u) {
                dist.record(b);
            }
        }
        Ok(dist)
    }

    fn run_ent_setup(
        &self,
        _meas_a: &Basis,
        _meas_b: &Basis,
        _n_ini: usize,
        _lambda_rng: &mut RngStream,
        _trial_rng: &mut RngStream,
    ) -> Result<EmpiricalDistribution, ScenarioError> {
        Err(ScenarioError::Unsupported {
            protocol: "prtq".into(),
            scenario: Scenario::Ent,
            d: 2,
        })
    }
}

/// Study configuration shared by the randomized study and the sweeps.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StudyConfig {
    pub d: usize,
    /// Number of randomized input setups.
    pub n_setups: usize,
    /// Shared-randomness samples drawn per setup.
    pub n_ini: usize,
    pub seed: u64,
    /// Reuse one shared-randomness stream across all setups (the paper's
    /// correlated-error regime) instead of independent per-setup streams.
    pub shared_pool: bool,
}

/// Per-setup study outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SetupResult {
    pub setup_index: usize,
    pub n_ini: usize,
    pub n_out: usize,
    pub accept_ratio: f64,
    pub delta: f64,
    pub clamped: u64,
    /// Setups where every trial aborted are flagged and excluded from the
    /// aggregate.
    pub flagged: bool,
}

/// Aggregated study report: per-setup TVDs plus mean and std_n / sqrt(n).
#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub protocol: String,
    pub scenario: Scenario,
    pub d: usize,
    pub seed: u64,
    pub setups: Vec<SetupResult>,
    pub mean_delta: f64,
    pub std_err: f64,
    pub warnings: Vec<String>,
}

impl StudyReport {
    fn aggregate(
        protocol: String,
        scenario: Scenario,
        d: usize,
        seed: u64,
        setups: Vec<SetupResult>,
    ) -> Self {
        let deltas: Vec<f64> = setups
            .iter()
            .filter(|s| !s.flagged)
            .map(|s| s.delta)
            .collect();
        let (mean_delta, std_err) = mean_and_std_err(&deltas);
        let warnings = setups
            .iter()
            .filter(|s| s.flagged)
            .map(|s| format!("setup {} had zero accepted trials; excluded", s.setup_index))
            .collect();
        Self {
            protocol,
            scenario,
            d,
            seed,
            setups,
            mean_delta,
            std_err,
            warnings,
        }
    }

    pub fn total_n_out(&self) -> usize {
        self.setups.iter().map(|s| s.n_out).sum()
    }

    pub fn mean_accept_ratio(&self) -> f64 {
        let n: f64 = self.setups.iter().map(|s| s.n_ini as f64).sum();
        self.setups.iter().map(|s| s.n_out as f64).sum::<f64>() / n
    }
}

// Stream id layout: ids 0..16 are reserved for global purposes (1 = the
// shared Lambda pool), per-setup blocks start at 16.
fn setup_streams(seed: u64, setup_index: usize, shared_pool: bool) -> (RngStream, RngStream, RngStream) {
    let base = 16 + 4 * setup_index as u64;
    let input = RngStream::new(seed, base);
    let lambda = if shared_pool {
        RngStream::new(seed, 1)
    } else {
        RngStream::new(seed, base + 1)
    };
    let trial = RngStream::new(seed, base + 2);
    (input, lambda, trial)
}

/// Runs a protocol over `n_setups` Haar-random input setups and compares
/// each empirical outcome distribution against the Born-rule oracle.
pub fn randomized_study(
    protocol: &dyn Protocol,
    scenario: Scenario,
    cfg: &StudyConfig,
) -> Result<StudyReport, ScenarioError> {
    if cfg.n_setups == 0 || cfg.n_ini == 0 {
        return Err(ScenarioError::EmptyStudy {
            n: cfg.n_setups,
            n_ini: cfg.n_ini,
        });
    }
    let setups: Result<Vec<SetupResult>, ScenarioError> = (0..cfg.n_setups)
        .into_par_iter()
        .map(|i| {
            let (mut input, mut lambda, mut trial) = setup_streams(cfg.seed, i, cfg.shared_pool);
            let (dist, quantum) = match scenario {
                Scenario::Pm => {
                    let state = random_pure_state(cfg.d, &mut input)?;
                    let meas = random_basis(cfg.d, &mut input)?;
                    let dist =
                        protocol.run_pm_setup(&state, &meas, cfg.n_ini, &mut lambda, &mut trial)?;
                    (dist, born_pm(&state, &meas)?)
                }
                Scenario::Ent => {
                    let meas_a = random_basis(cfg.d, &mut input)?;
                    let meas_b = random_basis(cfg.d, &mut input)?;
                    let dist = protocol
                        .run_ent_setup(&meas_a, &meas_b, cfg.n_ini, &mut lambda, &mut trial)?;
                    (dist, born_entangled(&meas_a, &meas_b)?.probs().to_vec())
                }
            };
            let flagged = dist.n_out() == 0;
            let delta = if flagged {
                f64::NAN
            } else {
                tvd(&dist.probs()?, &quantum)
            };
            Ok(SetupResult {
                setup_index: i,
                n_ini: dist.n_ini(),
                n_out: dist.n_out(),
                accept_ratio: dist.accept_ratio(),
                delta,
                clamped: dist.clamped(),
                flagged,
            })
        })
        .collect();
    Ok(StudyReport::aggregate(
        protocol.id(),
        scenario,
        cfg.d,
        cfg.seed,
        setups?,
    ))
}

/// Sampling-noise floor of the TVD estimator: the Born oracle sampled
/// against its own multinomial draws at matched N_out.
pub fn noise_floor(
    scenario: Scenario,
    d: usize,
    n_setups: usize,
    n_out: usize,
    seed: u64,
) -> Result<f64, ScenarioError> {
    let deltas: Result<Vec<f64>, ScenarioError> = (0..n_setups)
        .into_par_iter()
        .map(|i| {
            let (mut input, _, mut trial) = setup_streams(seed, i, false);
            let quantum = match scenario {
                Scenario::Pm => {
                    let state = random_pure_state(d, &mut input)?;
                    let meas = random_basis(d, &mut input)?;
                    born_pm(&state, &meas)?
                }
                Scenario::Ent => {
                    let meas_a = random_basis(d, &mut input)?;
                    let meas_b = random_basis(d, &mut input)?;
                    born_entangled(&meas_a, &meas_b)?.probs().to_vec()
                }
            };
            let mut counts = vec![0u64; quantum.len()];
            for _ in 0..n_out {
                let mut u = trial.uniform();
                let mut cell = quantum.len() - 1;
                for (k, &p) in quantum.iter().enumerate() {
                    if u < p {
                        cell = k;
                        break;
                    }
                    u -= p;
                }
                counts[cell] += 1;
            }
            let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / n_out as f64).collect();
            Ok(tvd(&empirical, &quantum))
        })
        .collect();
    let (mean, _) = mean_and_std_err(&deltas?);
    Ok(mean)
}

/// The structured d=3 measurement in which the target state lives in the
/// span of the first two outcome vectors:
/// b1 = cos(phi) psi + sin(phi) perp2, b2 = sin(phi) psi - cos(phi) perp2,
/// b3 = perp3.
pub fn phi_setup(psi: &PureState, phi: f64) -> Result<Basis, ScenarioError> {
    if psi.dim() != 3 {
        return Err(ScenarioError::PhiDimension(psi.dim()));
    }
    let completion = complete_basis(psi);
    let perp2 = completion.vector(1);
    let perp3 = completion.vector(2);
    let (c, s) = (phi.cos(), phi.sin());
    let mix = |cp: f64, cq: f64| {
        let amps: Vec<Complex64> = psi
            .amps()
            .iter()
            .zip(perp2.amps())
            .map(|(p, q)| p * cp + q * cq)
            .collect();
        PureState::from_raw(amps)
    };
    Ok(Basis::new(vec![mix(c, s), mix(s, -c), perp3.clone()])?)
}

/// One grid point of the phi study.
#[derive(Debug, Clone, Serialize)]
pub struct PhiPoint {
    pub phi: f64,
    pub n_ini: usize,
    pub n_out: usize,
    pub accept_ratio: f64,
    pub delta: f64,
    /// Empirical outcome probabilities (b = 1, 2, 3).
    pub probs: Vec<f64>,
    /// Quantum predictions (cos^2 phi, sin^2 phi, 0).
    pub quantum: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiStudyReport {
    pub protocol: String,
    pub seed: u64,
    pub points: Vec<PhiPoint>,
    pub mean_delta: f64,
    pub std_err: f64,
}

/// Runs a PM protocol over `n_phi` equally spaced phi values in
/// [0, pi/2], with a fresh Haar-random target state per point.
pub fn phi_study(
    protocol: &dyn Protocol,
    n_phi: usize,
    n_ini: usize,
    seed: u64,
) -> Result<PhiStudyReport, ScenarioError> {
    if n_phi == 0 || n_ini == 0 {
        return Err(ScenarioError::EmptyStudy {
            n: n_phi,
            n_ini,
        });
    }
    let points: Result<Vec<PhiPoint>, ScenarioError> = (0..n_phi)
        .into_par_iter()
        .map(|i| {
            let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (n_phi - 1).max(1) as f64;
            let (mut input, mut lambda, mut trial) = setup_streams(seed, i, false);
            let psi = random_pure_state(3, &mut input)?;
            let meas = phi_setup(&psi, phi)?;
            let quantum = born_pm(&psi, &meas)?;
            let dist = protocol.run_pm_setup(&psi, &meas, n_ini, &mut lambda, &mut trial)?;
            let probs = dist.probs()?;
            Ok(PhiPoint {
                phi,
                n_ini: dist.n_ini(),
                n_out: dist.n_out(),
                accept_ratio: dist.accept_ratio(),
                delta: tvd(&probs, &quantum),
                probs,
                quantum,
            })
        })
        .collect();
    let points = points?;
    let deltas: Vec<f64> = points.iter().map(|p| p.delta).collect();
    let (mean_delta, std_err) = mean_and_std_err(&deltas);
    Ok(PhiStudyReport {
        protocol: protocol.id(),
        seed,
        points,
        mean_delta,
        std_err,
    })
}

/// The four d=3 measurement bases achieving the maximal quantum violation
/// of the CGLMP inequality: phase shifts followed by a discrete Fourier
/// transform, measured in the computational basis.
#[derive(Debug, Clone)]
pub struct CglmpSetup {
    pub alice: [Basis; 2],
    pub bob: [Basis; 2],
}

/// Phase parameters: Alice alpha in {0, 1/2}, Bob beta in {-1/4, 1/4}.
const CGLMP_ALICE_PHASES: [f64; 2] = [0.0, 0.5];
const CGLMP_BOB_PHASES: [f64; 2] = [-0.25, 0.25];

fn phased_fourier(d: usize, param: f64, sign: f64) -> Basis {
    let norm = 1.0 / (d as f64).sqrt();
    let vectors = (0..d)
        .map(|k| {
            let amps = (0..d)
                .map(|j| {
                    let phase =
                        sign * 2.0 * std::f64::consts::PI * j as f64 * (k as f64 + param) / d as f64;
                    Complex64::from_polar(norm, phase)
                })
                .collect();
            PureState::from_raw(amps)
        })
        .collect();
    Basis::from_raw(vectors)
}

/// Builds the CGLMP setup and validates it at construction: the analytic
/// Born-rule joints must reproduce I3 = 2.87 +- 0.005, otherwise the phase
/// convention is wrong and the setup is rejected.
pub fn cglmp_setup() -> Result<CglmpSetup, ScenarioError> {
    let setup = CglmpSetup {
        alice: [
            phased_fourier(3, CGLMP_ALICE_PHASES[0], 1.0),
            phased_fourier(3, CGLMP_ALICE_PHASES[1], 1.0),
        ],
        bob: [
            phased_fourier(3, CGLMP_BOB_PHASES[0], -1.0),
            phased_fourier(3, CGLMP_BOB_PHASES[1], -1.0),
        ],
    };
    let i3 = cglmp_value(&cglmp_quantum_joints(&setup)?);
    if (i3 - 2.87).abs() > 0.005 {
        return Err(ScenarioError::CglmpSelfCheck { got: i3 });
    }
    Ok(setup)
}

/// Born-rule joint distributions for the four measurement pairs, ordered
/// (A1,B1), (A1,B2), (A2,B1), (A2,B2).
pub fn cglmp_quantum_joints(setup: &CglmpSetup) -> Result<[JointDistribution; 4], ScenarioError> {
    Ok([
        born_entangled(&setup.alice[0], &setup.bob[0])?,
        born_entangled(&setup.alice[0], &setup.bob[1])?,
        born_entangled(&setup.alice[1], &setup.bob[0])?,
        born_entangled(&setup.alice[1], &setup.bob[1])?,
    ])
}

fn prob_a_eq_b_plus(j: &JointDistribution, k: usize) -> f64 {
    let d = j.dim();
    (0..d).map(|b| j.prob((b + k) % d, b)).sum()
}

fn prob_b_eq_a_plus(j: &JointDistribution, k: usize) -> f64 {
    let d = j.dim();
    (0..d).map(|a| j.prob(a, (a + k) % d)).sum()
}

/// Evaluates the d=3 CGLMP expression I3 on four joint distributions
/// ordered (A1,B1), (A1,B2), (A2,B1), (A2,B2). Local deterministic
/// strategies satisfy I3 <= 2; the quantum maximum on the maximally
/// entangled state is 2.87.
pub fn cglmp_value(joints: &[JointDistribution; 4]) -> f64 {
    let [a1b1, a1b2, a2b1, a2b2] = joints;
    let d = a1b1.dim();
    assert_eq!(d, 3, "the I3 evaluator is specific to d = 3");
    prob_a_eq_b_plus(a1b1, 0)
        + prob_b_eq_a_plus(a2b1, 1)
        + prob_a_eq_b_plus(a2b2, 0)
        + prob_b_eq_a_plus(a1b2, 0)
        - prob_a_eq_b_plus(a1b1, d - 1)
        - prob_b_eq_a_plus(a2b1, 0)
        - prob_a_eq_b_plus(a2b2, d - 1)
        - prob_b_eq_a_plus(a1b2, d - 1)
}

/// Report of the CGLMP study: per-pair TVDs, the simulated inequality
/// value, and the quantum reference.
#[derive(Debug, Clone, Serialize)]
pub struct CglmpReport {
    pub protocol: String,
    pub seed: u64,
    pub deltas: Vec<f64>,
    pub mean_delta: f64,
    pub std_err: f64,
    pub i3_simulated: f64,
    pub i3_quantum: f64,
    pub n_ini: usize,
    pub n_out: Vec<usize>,
    pub simulated_joints: Vec<Vec<f64>>,
}

/// Runs an entanglement protocol on the four CGLMP measurement pairs and
/// evaluates both the per-pair TVD and the simulated I3.
pub fn cglmp_study(
    protocol: &dyn Protocol,
    n_ini: usize,
    seed: u64,
) -> Result<CglmpReport, ScenarioError> {
    if n_ini == 0 {
        return Err(ScenarioError::EmptyStudy { n: 4, n_ini });
    }
    let setup = cglmp_setup()?;
    let quantum = cglmp_quantum_joints(&setup)?;
    let pairs: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let runs: Result<Vec<(Vec<f64>, usize)>, ScenarioError> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let (_, mut lambda, mut trial) = setup_streams(seed, i, false);
            let dist = protocol.run_ent_setup(
                &setup.alice[a],
                &setup.bob[b],
                n_ini,
                &mut lambda,
                &mut trial,
            )?;
            Ok((dist.probs()?, dist.n_out()))
        })
        .collect();
    let runs = runs?;
    let deltas: Vec<f64> = runs
        .iter()
        .zip(quantum.iter())
        .map(|((probs, _), q)| tvd(probs, q.probs()))
        .collect();
    let simulated: [JointDistribution; 4] = [
        JointDistribution::from_raw(3, runs[0].0.clone()),
        JointDistribution::from_raw(3, runs[1].0.clone()),
        JointDistribution::from_raw(3, runs[2].0.clone()),
        JointDistribution::from_raw(3, runs[3].0.clone()),
    ];
    let (mean_delta, std_err) = mean_and_std_err(&deltas);
    Ok(CglmpReport {
        protocol: protocol.id(),
        seed,
        deltas,
        mean_delta,
        std_err,
        i3_simulated: cglmp_value(&simulated),
        i3_quantum: cglmp_value(&quantum),
        n_ini,
        n_out: runs.iter().map(|r| r.1).collect(),
        simulated_joints: runs.into_iter().map(|r| r.0).collect(),
    })
}

/// Maximum of I3 over all 3^4 local deterministic strategies (fixed
/// outcomes per measurement, no communication). The local bound is 2.
pub fn cglmp_deterministic_maximum() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for a1 in 0..3usize {
        for a2 in 0..3usize {
            for b1 in 0..3usize {
                for b2 in 0..3usize {
                    let point = |a: usize, b: usize| {
                        let mut probs = vec![0.0; 9];
                        probs[a * 3 + b] = 1.0;
                        JointDistribution::from_raw(3, probs)
                    };
                    let joints = [
                        point(a1, b1),
                        point(a1, b2),
                        point(a2, b1),
                        point(a2, b2),
                    ];
                    best = best.max(cglmp_value(&joints));
                }
            }
        }
    }
    best
}

/// One row of the cutoff sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub cutoff: f64,
    pub mean_delta: f64,
    pub std_err: f64,
    pub n_ini_total: usize,
    pub n_out_total: usize,
    pub accept_ratio: f64,
}

/// Reruns the randomized PM study with the P1 cutoff Delta swept over a
/// grid; accuracy peaks at Delta = 1/2.
pub fn delta_sweep(
    cutoffs: &[f64],
    base: P1Params,
    cfg: &StudyConfig,
) -> Result<Vec<SweepRow>, ScenarioError> {
    cutoffs
        .iter()
        .map(|&cutoff| {
            let protocol = P1Protocol::new(base.with_cutoff(cutoff));
            let report = randomized_study(&protocol, Scenario::Pm, cfg)?;
            Ok(SweepRow {
                cutoff,
                mean_delta: report.mean_delta,
                std_err: report.std_err,
                n_ini_total: report.setups.iter().map(|s| s.n_ini).sum(),
                n_out_total: report.total_n_out(),
                accept_ratio: report.mean_accept_ratio(),
            })
        })
        .collect()
}
