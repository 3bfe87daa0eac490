//! The exact d=2 reference protocol in its original choice-method form and
//! the equivalent rejection-method form, together with Bloch-sphere
//! conversions. Serves as the ground-truth exact simulator for qubits and
//! the equivalence testbed for the rejection sampler.

use crate::qmath::{PureState, QmathError};
use crate::sampling::RngStream;
use num_complex::Complex64;

/// A real three-dimensional Bloch vector; unit norm for pure states and
/// projective outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    /// Uniform draw from the unit sphere.
    pub fn random(rng: &mut RngStream) -> Self {
        // z uniform in [-1, 1], azimuth uniform
        let z = 2.0 * rng.uniform() - 1.0;
        let phi = 2.0 * std::f64::consts::PI * rng.uniform();
        let r = (1.0 - z * z).max(0.0).sqrt();
        Self::new(r * phi.cos(), r * phi.sin(), z)
    }
}

/// Bloch vector of a qubit pure state: sigma = (I + x . pauli) / 2.
pub fn bloch_from_state(s: &PureState) -> Result<BlochVector, QmathError> {
    if s.dim() != 2 {
        return Err(QmathError::DimensionMismatch(2, s.dim()));
    }
    let a = s.amps()[0];
    let b = s.amps()[1];
    let cross = a.conj() * b;
    Ok(BlochVector::new(
        2.0 * cross.re,
        2.0 * cross.im,
        a.norm_sqr() - b.norm_sqr(),
    ))
}

/// Inverse of [`bloch_from_state`] up to global phase.
pub fn state_from_bloch(v: &BlochVector) -> PureState {
    let theta = v.z.clamp(-1.0, 1.0).acos();
    let phi = v.y.atan2(v.x);
    PureState::from_raw(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
}

/// One choice-method trial. Bob picks the shared vector more aligned with
/// his measurement axis, Alice orients it toward her state, and Bob reports
/// the outcome on its side of the measurement axis.
///
/// The printed c1 formula indexes the less aligned vector; the surrounding
/// prose and the target density proportional to |lambda . y| both require
/// the more aligned one, which is what this follows.
pub fn prtq_choice_trial(
    x: &BlochVector,
    y: &BlochVector,
    lambda0: &BlochVector,
    lambda1: &BlochVector,
) -> usize {
    let selected = if y.dot(lambda0).abs() >= y.dot(lambda1).abs() {
        *lambda0
    } else {
        *lambda1
    };
    finish_trial(x, y, &selected)
}

/// One rejection-method trial: a single shared vector, accepted with
/// probability |lambda . y| (scale M_2 = 0.5 on the P1 weight
/// |lambda . y| / 2 gives the same comparison); the accepted branch is
/// identical to the choice method.
pub fn prtq_rejection_trial(
    x: &BlochVector,
    y: &BlochVector,
    lambda: &BlochVector,
    u: f64,
) -> Option<usize> {
    if y.dot(lambda).abs() - u < 0.0 {
        return None;
    }
    Some(finish_trial(x, y, lambda))
}

fn finish_trial(x: &BlochVector, y: &BlochVector, lambda: &BlochVector) -> usize {
    // c2 = H(x . lambda); flip lambda when c2 = 0
    let lambda_prime = if x.dot(lambda) >= 0.0 {
        *lambda
    } else {
        lambda.neg()
    };
    // outcome b with H(y_b . lambda') = 1, where y_0 = y, y_1 = -y
    if y.dot(&lambda_prime) >= 0.0 {
        0
    } else {
        1
    }
}

/// Outcome distributions of the two protocol variants on the same input,
/// each run to `n` accepted outcomes, and the TVD between them.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub dist_choice: [f64; 2],
    pub dist_rejection: [f64; 2],
    pub tvd: f64,
    pub rejection_acceptance: f64,
}

pub fn prtq_equivalence_report(
    x: &BlochVector,
    y: &BlochVector,
    n: usize,
    rng: &mut RngStream,
) -> EquivalenceReport {
    let mut choice_counts = [0u64; 2];
    for _ in 0..n {
        let l0 = BlochVector::random(rng);
        let l1 = BlochVector::random(rng);
        choice_counts[prtq_choice_trial(x, y, &l0, &l1)] += 1;
    }
    let mut rej_counts = [0u64; 2];
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < n {
        let lambda = BlochVector::random(rng);
        let u = rng.uniform();
        attempts += 1;
        if let Some(b) = prtq_rejection_trial(x, y, &lambda, u) {
            rej_counts[b] += 1;
            accepted += 1;
        }
    }
    let dist_choice = [
        choice_counts[0] as f64 / n as f64,
        choice_counts[1] as f64 / n as f64,
    ];
    let dist_rejection = [
        rej_counts[0] as f64 / n as f64,
        rej_counts[1] as f64 / n as f64,
    ];
    let tvd = 0.5
        * ((dist_choice[0] - dist_rejection[0]).abs() + (dist_choice[1] - dist_rejection[1]).abs());
    EquivalenceReport {
        dist_choice,
        dist_rejection,
        tvd,
        rejection_acceptance: accepted as f64 / attempts as f64,
    }
}
