//! Monte Carlo simulation of an Ekert91 session.
//!
//! Each singlet pair passes through the configured channel on Bob's side.
//! Alice and Bob each pick one of three azimuthal settings uniformly at
//! random. Rounds where the settings coincide are key rounds; the four CHSH
//! combinations feed the Bell test; every other round is discarded.
//!
//! Pairs are processed in fixed-size batches. Batch `k` draws from a ChaCha8
//! stream seeded with `rng_seed` on stream `k`, so a run is reproducible and
//! independent of how batches are scheduled across threads.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::ops::AddAssign;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::{joint_probabilities, MeasurementDirection, CLASSICAL_BOUND};
use crate::channels::{apply_one_sided, KrausChannel};
use crate::exec::{map_indexed, Execution};
use crate::states::{key_statistics, singlet, TwoQubitState};
use crate::{Error, Result};

/// Pairs per independently seeded batch.
pub const BATCH_SIZE: u64 = 1 << 16;

const ANGLE_MATCH_TOL: f64 = 1e-12;

/// Measurement outcome `±1` along a direction, or the key bit in the
/// computational basis (`Plus` ↔ 0, `Minus` ↔ 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

/// Basis used in key rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeyMeasurement {
    /// Projective measurement onto `|0⟩, |1⟩` on both sides.
    #[default]
    Computational,
    /// Measurement along the matched azimuthal direction.
    InPlane,
}

/// Indices into the three-angle sets naming `a1, a2` and `b1, b2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChshRoles {
    pub alice: [usize; 2],
    pub bob: [usize; 2],
}

impl Default for ChshRoles {
    fn default() -> Self {
        Self {
            alice: [0, 2],
            bob: [0, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub n_pairs: u64,
    /// Applied to Bob's qubit of every pair.
    pub channel: KrausChannel,
    pub alice_angles: [MeasurementDirection; 3],
    pub bob_angles: [MeasurementDirection; 3],
    pub chsh_roles: ChshRoles,
    pub key_measurement: KeyMeasurement,
    pub rng_seed: u64,
    pub s_threshold: f64,
}

impl ProtocolConfig {
    /// Alice `{0, π/4, π/2}`, Bob `{π/4, π/2, 3π/4}`, key from the two
    /// matching settings, CHSH from `a = {0, π/2}`, `b = {π/4, 3π/4}`.
    pub fn new(channel: KrausChannel, n_pairs: u64, rng_seed: u64) -> Self {
        let d = MeasurementDirection::new;
        Self {
            n_pairs,
            channel,
            alice_angles: [d(0.0), d(FRAC_PI_4), d(FRAC_PI_2)],
            bob_angles: [d(FRAC_PI_4), d(FRAC_PI_2), d(3.0 * FRAC_PI_4)],
            chsh_roles: ChshRoles::default(),
            key_measurement: KeyMeasurement::default(),
            rng_seed,
            s_threshold: CLASSICAL_BOUND,
        }
    }

    fn matches(&self, i: usize, j: usize) -> bool {
        (self.alice_angles[i].theta() - self.bob_angles[j].theta()).abs() <= ANGLE_MATCH_TOL
    }

    /// Role of every `(alice index, bob index)` setting pair.
    fn round_kinds(&self) -> Result<[[RoundKind; 3]; 3]> {
        if self.n_pairs == 0 {
            return Err(Error::Config("n_pairs must be at least 1".into()));
        }
        if !self.s_threshold.is_finite() {
            return Err(Error::Config("s_threshold must be finite".into()));
        }
        let mut kinds = [[RoundKind::Discard; 3]; 3];
        let mut matched = 0;
        for (i, row) in kinds.iter_mut().enumerate() {
            for (j, kind) in row.iter_mut().enumerate() {
                if self.matches(i, j) {
                    *kind = RoundKind::Key;
                    matched += 1;
                }
            }
        }
        if matched != 2 {
            return Err(Error::Config(format!(
                "expected exactly two matching angle pairs, found {matched}"
            )));
        }
        let roles = self.chsh_roles;
        for (ai, &i) in roles.alice.iter().enumerate() {
            for (bj, &j) in roles.bob.iter().enumerate() {
                if i > 2 || j > 2 {
                    return Err(Error::Config("CHSH role index out of range".into()));
                }
                if kinds[i][j] != RoundKind::Discard {
                    return Err(Error::Config(format!(
                        "CHSH setting pair ({i}, {j}) is already used"
                    )));
                }
                kinds[i][j] = RoundKind::Chsh(2 * ai + bj);
            }
        }
        Ok(kinds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RoundKind {
    Key,
    /// Index in CHSH order (a1b1, a1b2, a2b1, a2b2).
    Chsh(usize),
    Discard,
}

/// Outcome counts for one CHSH setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCounts {
    pub plus_plus: u64,
    pub plus_minus: u64,
    pub minus_plus: u64,
    pub minus_minus: u64,
}

impl CellCounts {
    pub fn total(&self) -> u64 {
        self.plus_plus + self.plus_minus + self.minus_plus + self.minus_minus
    }

    pub fn record(&mut self, (a, b): (Outcome, Outcome)) {
        match (a, b) {
            (Outcome::Plus, Outcome::Plus) => self.plus_plus += 1,
            (Outcome::Plus, Outcome::Minus) => self.plus_minus += 1,
            (Outcome::Minus, Outcome::Plus) => self.minus_plus += 1,
            (Outcome::Minus, Outcome::Minus) => self.minus_minus += 1,
        }
    }

    /// Empirical `P₊₊ + P₋₋ - P₊₋ - P₋₊`.
    pub fn correlation(&self) -> Option<f64> {
        let n = self.total();
        if n == 0 {
            return None;
        }
        let agree = (self.plus_plus + self.minus_minus) as f64;
        let disagree = (self.plus_minus + self.minus_plus) as f64;
        Some((agree - disagree) / n as f64)
    }
}

impl AddAssign for CellCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.plus_plus += rhs.plus_plus;
        self.plus_minus += rhs.plus_minus;
        self.minus_plus += rhs.minus_plus;
        self.minus_minus += rhs.minus_minus;
    }
}

/// Plug-in CHSH estimate from the four cells (CHSH order) and its standard
/// error. Each cell's correlation has binomial variance `(1 - E²)/n`; the
/// variances add since cells are independent.
pub fn estimate_s(cells: &[CellCounts; 4]) -> Result<(f64, f64)> {
    const SIGNS: [f64; 4] = [1.0, -1.0, 1.0, 1.0];
    let mut s = 0.0;
    let mut var = 0.0;
    for (cell, (counts, sign)) in cells.iter().zip(SIGNS).enumerate() {
        let e = counts.correlation().ok_or(Error::EmptyCell { cell })?;
        s += sign * e;
        var += (1.0 - e * e).max(0.0) / counts.total() as f64;
    }
    Ok((s, var.sqrt()))
}

/// Inverse-transform sampler over the four joint outcomes
/// `(+,+), (+,-), (-,+), (-,-)`.
#[derive(Debug, Clone, Copy)]
struct OutcomeSampler {
    cumulative: [f64; 3],
}

impl OutcomeSampler {
    fn new(probs: [f64; 4]) -> Self {
        let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
        let mut cumulative = [0.0; 3];
        let mut acc = 0.0;
        for (slot, p) in cumulative.iter_mut().zip(probs) {
            acc += p.max(0.0) / total;
            *slot = acc;
        }
        Self { cumulative }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Outcome, Outcome) {
        use Outcome::{Minus, Plus};
        let u: f64 = rng.random();
        if u < self.cumulative[0] {
            (Plus, Plus)
        } else if u < self.cumulative[1] {
            (Plus, Minus)
        } else if u < self.cumulative[2] {
            (Minus, Plus)
        } else {
            (Minus, Minus)
        }
    }
}

/// Draws one joint outcome for directions `a` (Alice) and `b` (Bob).
pub fn sample_pair_outcome<R: Rng + ?Sized>(
    rho: &TwoQubitState,
    a: MeasurementDirection,
    b: MeasurementDirection,
    rng: &mut R,
) -> (Outcome, Outcome) {
    OutcomeSampler::new(joint_probabilities(rho, a, b).as_array()).sample(rng)
}

/// Integer tallies of a (partial) run. Merging is plain addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub key_rounds: u64,
    pub key_errors: u64,
    pub chsh: [CellCounts; 4],
    pub discarded: u64,
}

impl AddAssign for Tally {
    fn add_assign(&mut self, rhs: Self) {
        self.key_rounds += rhs.key_rounds;
        self.key_errors += rhs.key_errors;
        for (a, b) in self.chsh.iter_mut().zip(rhs.chsh) {
            *a += b;
        }
        self.discarded += rhs.discarded;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Secure,
    BellViolationFailed,
    InsufficientSamples,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Secure => "secure",
            Verdict::BellViolationFailed => "bell_violation_failed",
            Verdict::InsufficientSamples => "insufficient_samples",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub n_pairs: u64,
    pub tally: Tally,
    pub sifted_key_length: u64,
    pub qber_estimate: f64,
    /// Binomial standard error of the QBER estimate.
    pub qber_standard_error: f64,
    /// Signed CHSH estimate; compare its magnitude to the threshold.
    pub s_estimate: f64,
    pub s_standard_error: f64,
    pub verdict: Verdict,
}

struct Plan {
    kinds: [[RoundKind; 3]; 3],
    /// Samplers for key cells; `None` elsewhere.
    key: [[Option<OutcomeSampler>; 3]; 3],
    chsh: [OutcomeSampler; 4],
}

impl Plan {
    fn new(cfg: &ProtocolConfig) -> Result<Self> {
        let kinds = cfg.round_kinds()?;
        let rho = apply_one_sided(&cfg.channel, &singlet())?;
        let in_plane = |i: usize, j: usize| {
            let probs = joint_probabilities(&rho, cfg.alice_angles[i], cfg.bob_angles[j]);
            OutcomeSampler::new(probs.as_array())
        };

        let mut key = [[None; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if kinds[i][j] != RoundKind::Key {
                    continue;
                }
                key[i][j] = Some(match cfg.key_measurement {
                    KeyMeasurement::Computational => {
                        // Bit 0 ↔ Plus.
                        let k = key_statistics(&rho).probabilities;
                        OutcomeSampler::new([k[0][0], k[0][1], k[1][0], k[1][1]])
                    }
                    KeyMeasurement::InPlane => in_plane(i, j),
                });
            }
        }

        let roles = cfg.chsh_roles;
        let mut chsh = [OutcomeSampler::new([0.25; 4]); 4];
        for (ai, &i) in roles.alice.iter().enumerate() {
            for (bj, &j) in roles.bob.iter().enumerate() {
                chsh[2 * ai + bj] = in_plane(i, j);
            }
        }
        Ok(Self { kinds, key, chsh })
    }

    /// Runs `n` pairs of batch `index` and tallies them.
    fn run_batch(&self, seed: u64, index: u64, n: u64) -> Tally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut tally = Tally::default();
        for _ in 0..n {
            let i = rng.random_range(0..3usize);
            let j = rng.random_range(0..3usize);
            match self.kinds[i][j] {
                RoundKind::Key => {
                    let sampler = self.key[i][j].as_ref().expect("key cell has a sampler");
                    let (a, b) = sampler.sample(&mut rng);
                    tally.key_rounds += 1;
                    // Bob flips his bit, so equal raw outcomes disagree.
                    if a == b {
                        tally.key_errors += 1;
                    }
                }
                RoundKind::Chsh(cell) => {
                    tally.chsh[cell].record(self.chsh[cell].sample(&mut rng));
                }
                RoundKind::Discard => tally.discarded += 1,
            }
        }
        tally
    }
}

/// Simulates all pairs and tallies them, batch by batch.
pub fn simulate(cfg: &ProtocolConfig, exec: Execution) -> Result<Tally> {
    let plan = Plan::new(cfg)?;
    let batches = cfg.n_pairs.div_ceil(BATCH_SIZE);
    let partials = map_indexed(exec, batches as usize, |k| {
        let k = k as u64;
        let n = BATCH_SIZE.min(cfg.n_pairs - k * BATCH_SIZE);
        plan.run_batch(cfg.rng_seed, k, n)
    });
    let mut total = Tally::default();
    for t in partials {
        total += t;
    }
    Ok(total)
}

/// Turns raw tallies into estimates and a verdict. The session is `Secure`
/// iff `|S| - 2σ_S > s_threshold`.
pub fn report(cfg: &ProtocolConfig, tally: Tally) -> ProtocolReport {
    let sifted = tally.key_rounds;
    let (qber, qber_se) = if sifted > 0 {
        let q = tally.key_errors as f64 / sifted as f64;
        (q, (q * (1.0 - q) / sifted as f64).sqrt())
    } else {
        (0.0, 0.0)
    };
    let (s, s_se, verdict) = match estimate_s(&tally.chsh) {
        Ok((s, se)) if sifted > 0 => {
            let verdict = if s.abs() - 2.0 * se > cfg.s_threshold {
                Verdict::Secure
            } else {
                Verdict::BellViolationFailed
            };
            (s, se, verdict)
        }
        Ok((s, se)) => (s, se, Verdict::InsufficientSamples),
        Err(_) => (0.0, 0.0, Verdict::InsufficientSamples),
    };
    ProtocolReport {
        n_pairs: cfg.n_pairs,
        tally,
        sifted_key_length: sifted,
        qber_estimate: qber,
        qber_standard_error: qber_se,
        s_estimate: s,
        s_standard_error: s_se,
        verdict,
    }
}

/// Runs a full session with the default (parallel when available) executor.
pub fn run_ekert91(cfg: &ProtocolConfig) -> Result<ProtocolReport> {
    run_ekert91_with(cfg, Execution::default())
}

pub fn run_ekert91_with(cfg: &ProtocolConfig, exec: Execution) -> Result<ProtocolReport> {
    Ok(report(cfg, simulate(cfg, exec)?))
}
