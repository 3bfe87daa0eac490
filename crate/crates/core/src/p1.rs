//! The P1 protocol: classical simulation of projective measurements using a
//! shared Haar-random basis, one bit from Bob, and one message in {0..d}
//! from Alice, in both prepare-and-measure and entanglement modes.
//!
//! The shared basis is kept with probability proportional to
//! (t* - Delta)^alpha_d gated on every matched overlap reaching the cutoff,
//! where t* is the weakest per-outcome matched overlap between the shared
//! basis and Bob's measurement.

use crate::qmath::{complete_basis, conjugate_basis, overlap_unchecked, Basis, PureState};
use crate::sampling::{accept, random_basis, RejectionConfig, RngStream, SamplingError};

/// Protocol parameters: dimension, weight exponent alpha_d, rejection scale
/// M_d, and acceptance cutoff Delta.
#[derive(Debug, Clone, Copy)]
pub struct P1Params {
    pub d: usize,
    pub alpha: f64,
    pub scale: f64,
    pub cutoff: f64,
}

impl P1Params {
    /// Defaults: alpha_d = 2^(2-d), M_2 = 0.5, M_3 = M_4 = 0.7, Delta = 1/2.
    pub fn defaults(d: usize) -> Self {
        assert!(d >= 2);
        let scale = if d == 2 { 0.5 } else { 0.7 };
        Self {
            d,
            alpha: 2.0_f64.powi(2 - d as i32),
            scale,
            cutoff: 0.5,
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn rejection_config(&self) -> RejectionConfig {
        RejectionConfig::new(self.scale).expect("scale must be positive")
    }
}

/// Per-outcome matching between the shared basis and Bob's measurement:
/// for each target outcome j, the best-matching index i(j) and its overlap
/// t(j) = Tr[Lambda_i(j) B_j], plus the starred pair attaining
/// t* = min_j t(j).
#[derive(Debug, Clone)]
pub struct MatchTable {
    matched: Vec<(usize, f64)>,
    star: (usize, usize),
    t_star: f64,
}

impl MatchTable {
    pub fn matched_index(&self, j: usize) -> usize {
        self.matched[j].0
    }

    pub fn matched_overlap(&self, j: usize) -> f64 {
        self.matched[j].1
    }

    /// The (i*, j*) pair with the weakest matched overlap.
    pub fn star(&self) -> (usize, usize) {
        self.star
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    /// The similarity value D(i*, j*) = 2 t* - 1.
    pub fn d_star(&self) -> f64 {
        2.0 * self.t_star - 1.0
    }
}

/// Builds the match table between a shared basis and a measurement.
/// Argmax ties break toward the lowest index; ties have measure zero under
/// Haar inputs.
pub fn match_table(lambda: &Basis, meas: &Basis) -> MatchTable {
    let d = lambda.dim();
    debug_assert_eq!(d, meas.dim());
    let mut matched = Vec::with_capacity(d);
    let mut star = (0, 0);
    let mut t_star = f64::INFINITY;
    for (j, b) in meas.vectors().iter().enumerate() {
        let mut best_i = 0;
        let mut best_t = f64::NEG_INFINITY;
        for (i, l) in lambda.vectors().iter().enumerate() {
            let t = overlap_unchecked(l, b);
            if t > best_t {
                best_t = t;
                best_i = i;
            }
        }
        if best_t < t_star {
            t_star = best_t;
            star = (best_i, j);
        }
        matched.push((best_i, best_t));
    }
    MatchTable {
        matched,
        star,
        t_star,
    }
}

/// The unnormalized acceptance weight (t* - Delta)^alpha_d, gated to zero
/// when any matched overlap falls below the cutoff.
pub fn p1_weight(mt: &MatchTable, params: &P1Params) -> f64 {
    if mt.matched.iter().any(|&(_, t)| t < params.cutoff) {
        return 0.0;
    }
    (mt.t_star - params.cutoff).powf(params.alpha)
}

/// One protocol run. `c2 == d` is the abort sentinel; aborted outcomes are
/// `None` (the paper's "e").
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub c1: bool,
    pub c2: usize,
    pub a: Option<usize>,
    pub b: Option<usize>,
}

impl TrialRecord {
    pub fn aborted(&self) -> bool {
        !self.c1
    }

    fn abort(d: usize) -> Self {
        Self {
            c1: false,
            c2: d,
            a: None,
            b: None,
        }
    }
}

/// Prepare-and-measure trial. Bob draws u, gates on the rejection weight;
/// on accept Alice sends c2 = argmax_i Tr[Lambda_i sigma_A] and Bob reports
/// b = argmax_j Tr[B_j Lambda_c2].
pub fn run_pm_trial(
    state: &PureState,
    meas: &Basis,
    lambda: &Basis,
    params: &P1Params,
    rng: &mut RngStream,
) -> TrialRecord {
    let mt = match_table(lambda, meas);
    let weight = p1_weight(&mt, params);
    let u = rng.uniform();
    let accepted = accept(weight, &params.rejection_config(), u).expect("weight is non-negative");
    if !accepted {
        return TrialRecord::abort(params.d);
    }
    let c2 = argmax_overlap(lambda, state);
    let b = argmax_overlap(meas, lambda.vector(c2));
    TrialRecord {
        c1: true,
        c2,
        a: None,
        b: Some(b),
    }
}

/// Entanglement-mode trial: identical to the PM trial with B replaced by
/// its conjugate (transpose of the rank-1 projectors), plus Alice rolling
/// an unbiased die for her outcome a.
pub fn run_ent_trial(
    meas_a: &Basis,
    meas_b: &Basis,
    lambda: &Basis,
    params: &P1Params,
    rng: &mut RngStream,
) -> TrialRecord {
    let b_conj = conjugate_basis(meas_b);
    run_ent_trial_conj(meas_a, &b_conj, lambda, params, rng)
}

/// Entanglement-mode trial with the conjugated Bob basis precomputed;
/// study loops hoist the conjugation out of the trial loop.
pub fn run_ent_trial_conj(
    meas_a: &Basis,
    meas_b_conj: &Basis,
    lambda: &Basis,
    params: &P1Params,
    rng: &mut RngStream,
) -> TrialRecord {
    let mt = match_table(lambda, meas_b_conj);
    let weight = p1_weight(&mt, params);
    let u = rng.uniform();
    let accepted = accept(weight, &params.rejection_config(), u).expect("weight is non-negative");
    if !accepted {
        return TrialRecord::abort(params.d);
    }
    let a = rng.die(params.d);
    let c2 = argmax_overlap(lambda, meas_a.vector(a));
    let b = argmax_overlap(meas_b_conj, lambda.vector(c2));
    TrialRecord {
        c1: true,
        c2,
        a: Some(a),
        b: Some(b),
    }
}

fn argmax_overlap(basis: &Basis, target: &PureState) -> usize {
    let mut best = 0;
    let mut best_t = f64::NEG_INFINITY;
    for (i, v) in basis.vectors().iter().enumerate() {
        let t = overlap_unchecked(v, target);
        if t > best_t {
            best_t = t;
            best = i;
        }
    }
    best
}

/// Result of driving the PM scenario through the entanglement-mode protocol
/// via the Choi correspondence: run with Alice's measurement completed from
/// the conjugated target state and keep outcomes conditioned on a = 0.
#[derive(Debug, Clone)]
pub struct ChoiPmReport {
    /// Conditional empirical distribution P(b | a = 0).
    pub conditional: Vec<f64>,
    /// Number of accepted trials with a = 0.
    pub conditioned_samples: usize,
    /// Total accepted trials.
    pub accepted: usize,
    /// Total trials attempted.
    pub n_ini: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum ChoiError {
    #[error("no conditioned samples: every trial aborted or landed on a != 0")]
    NoConditionedSamples,
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// Runs the entanglement-mode protocol with Alice's first projector equal to
/// the conjugate of the PM input state (remaining projectors completed by
/// Gram-Schmidt) and returns the distribution of b conditioned on a = 0,
/// which converges to the direct PM statistics.
pub fn choi_pm_from_ent(
    state: &PureState,
    meas: &Basis,
    params: &P1Params,
    n_ini: usize,
    rng: &mut RngStream,
) -> Result<ChoiPmReport, ChoiError> {
    let d = params.d;
    // conditioning on the maximally entangled state leaves Bob with the
    // conjugate of Alice's projector, so Alice measures conj(state) to
    // steer Bob onto the PM input
    let meas_a = complete_basis(&state.conj());
    let b_conj = conjugate_basis(meas);
    let mut counts = vec![0u64; d];
    let mut accepted = 0usize;
    let mut conditioned = 0usize;
    for _ in 0..n_ini {
        let lambda = random_basis(d, rng)?;
        let rec = run_ent_trial_conj(&meas_a, &b_conj, &lambda, params, rng);
        if let (Some(a), Some(b)) = (rec.a, rec.b) {
            accepted += 1;
            if a == 0 {
                counts[b] += 1;
                conditioned += 1;
            }
        }
    }
    if conditioned == 0 {
        return Err(ChoiError::NoConditionedSamples);
    }
    let conditional = counts
        .iter()
        .map(|&c| c as f64 / conditioned as f64)
        .collect();
    Ok(ChoiPmReport {
        conditional,
        conditioned_samples: conditioned,
        accepted,
        n_ini,
    })
}

/// Empirical PM outcome distribution over accepted trials, excluding aborts.
pub fn pm_empirical(
    state: &PureState,
    meas: &Basis,
    params: &P1Params,
    n_ini: usize,
    lambda_rng: &mut RngStream,
    u_rng: &mut RngStream,
) -> Result<(Vec<f64>, usize), SamplingError> {
    let d = params.d;
    let mut counts = vec![0u64; d];
    let mut n_out = 0usize;
    for _ in 0..n_ini {
        let lambda = random_basis(d, lambda_rng)?;
        let rec = run_pm_trial(state, meas, &lambda, params, u_rng);
        if let Some(b) = rec.b {
            counts[b] += 1;
            n_out += 1;
        }
    }
    let probs = if n_out > 0 {
        counts.iter().map(|&c| c as f64 / n_out as f64).collect()
    } else {
        vec![0.0; d]
    };
    Ok((probs, n_out))
}
