//! Monte Carlo simulation of the quantize / zero-force / interfere chain.
//!
//! One trial draws Rayleigh channels, quantizes each protected user's
//! channel direction against a random vector codebook, builds the
//! pseudo-inverse zero-forcing beamformer and records the leakage power each
//! user actually receives. Averaged over many trials this measures how well
//! the closed-form model in [`crate::model`] tracks a real quantizer.
//!
//! Reproducibility contract: every randomized operation takes an explicit
//! seed, per-trial generators are derived from the master seed by a counter
//! (so trials are independent and order-insensitive), and identical inputs
//! produce bit-identical statistics.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{BitAllocation, SystemParams};

/// Instantaneous channels for one trial: the served user's vector plus one
/// row per protected user, scaled by the square root of its average gain.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Channel to the served receiver (`N` entries).
    pub su_channel: DVector<Complex64>,
    /// Channel to each protected user (`K` rows of `N` entries); row `k`
    /// already carries the `sqrt(lambda_k)` gain factor.
    pub pu_channels: Vec<DVector<Complex64>>,
}

impl ChannelRealization {
    /// Unit-norm direction of protected user `k`'s channel.
    pub fn pu_direction(&self, k: usize) -> DVector<Complex64> {
        let row = &self.pu_channels[k];
        row.unscale(row.norm())
    }
}

/// A set of `2^bits` independent isotropic unit vectors.
#[derive(Debug, Clone)]
pub struct Codebook {
    entries: Vec<DVector<Complex64>>,
    bits: u32,
}

impl Codebook {
    pub fn entries(&self) -> &[DVector<Complex64>] {
        &self.entries
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Outcome of quantizing one direction against a codebook.
#[derive(Debug, Clone)]
pub struct QuantizationResult {
    /// Index of the selected codeword.
    pub index: usize,
    /// The selected codeword itself.
    pub quantized_dir: DVector<Complex64>,
    /// Squared inner product between direction and codeword, in `[0, 1]`.
    pub cos2_theta: f64,
    /// `1 - cos2_theta`: the squared quantization error.
    pub sin2_theta: f64,
}

/// Whether codebooks are redrawn for every trial (the ensemble average the
/// closed-form model describes) or drawn once and reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookMode {
    RedrawnPerTrial,
    Fixed,
}

/// Per-user sample statistics of a measurement run.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloStats {
    pub trials: usize,
    /// Mean received leakage power per protected user (watts).
    pub mean_interference: Vec<f64>,
    /// Mean squared quantization error per protected user.
    pub mean_distortion: Vec<f64>,
    /// Standard error of `mean_interference`.
    pub std_error: Vec<f64>,
    /// Standard error of `mean_distortion`.
    pub std_error_distortion: Vec<f64>,
    /// Master seed the run was keyed on.
    pub seed: u64,
}

/// Derive the generator for one trial from the master seed by a counter.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// One complex Gaussian entry with unit variance (0.5 per real component).
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| complex_gaussian(rng))
}

/// A uniformly random unit vector on the complex sphere.
fn random_direction<R: Rng>(n: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let v = gaussian_vector(n, rng);
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

fn check_dimensions(params: &SystemParams) -> Result<()> {
    if params.num_antennas() < params.num_users() + 1 {
        return Err(Error::Dimension(format!(
            "zero-forcing {} users needs at least {} antennas, got {}",
            params.num_users(),
            params.num_users() + 1,
            params.num_antennas()
        )));
    }
    Ok(())
}

/// Draw one i.i.d. Rayleigh channel realization, deterministic in `seed`.
pub fn generate_channels(params: &SystemParams, seed: u64) -> Result<ChannelRealization> {
    check_dimensions(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(generate_channels_with_rng(params, &mut rng))
}

/// Same as [`generate_channels`] but drawing from a caller-owned generator.
pub fn generate_channels_with_rng<R: Rng>(
    params: &SystemParams,
    rng: &mut R,
) -> ChannelRealization {
    let n = params.num_antennas();
    let su_channel = gaussian_vector(n, rng);
    let pu_channels = params
        .avg_gains()
        .iter()
        .map(|&g| gaussian_vector(n, rng).scale(g.sqrt()))
        .collect();
    ChannelRealization {
        su_channel,
        pu_channels,
    }
}

/// Guard on codebook size: `2^16` entries at most.
pub const MAX_CODEBOOK_BITS: u32 = 16;

/// Draw a random vector codebook of `2^bits` unit vectors, deterministic in
/// `seed`.
pub fn build_rvq_codebook(bits: u32, num_antennas: usize, seed: u64) -> Result<Codebook> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_rvq_codebook_with_rng(bits, num_antennas, &mut rng)
}

/// Same as [`build_rvq_codebook`] but drawing from a caller-owned generator.
pub fn build_rvq_codebook_with_rng<R: Rng>(
    bits: u32,
    num_antennas: usize,
    rng: &mut R,
) -> Result<Codebook> {
    if bits > MAX_CODEBOOK_BITS {
        return Err(Error::TooLarge(format!(
            "codebook of 2^{bits} entries exceeds the 2^{MAX_CODEBOOK_BITS} guard"
        )));
    }
    if num_antennas < 2 {
        return Err(Error::InvalidParameter(format!(
            "codebook needs num_antennas >= 2, got {num_antennas}"
        )));
    }
    let entries = (0..(1usize << bits))
        .map(|_| random_direction(num_antennas, rng))
        .collect();
    Ok(Codebook { entries, bits })
}

/// Pick the codeword maximizing `|direction^H entry|^2`; ties go to the
/// lowest index.
pub fn quantize(direction: &DVector<Complex64>, codebook: &Codebook) -> QuantizationResult {
    debug_assert!(
        (direction.norm() - 1.0).abs() < 1e-9,
        "direction not unit norm"
    );
    let mut best_idx = 0usize;
    let mut best_cos2 = f64::NEG_INFINITY;
    for (i, entry) in codebook.entries.iter().enumerate() {
        let cos2 = direction.dotc(entry).norm_sqr();
        if cos2 > best_cos2 {
            best_cos2 = cos2;
            best_idx = i;
        }
    }
    let cos2 = best_cos2.clamp(0.0, 1.0);
    QuantizationResult {
        index: best_idx,
        quantized_dir: codebook.entries[best_idx].clone(),
        cos2_theta: cos2,
        sin2_theta: 1.0 - cos2,
    }
}

/// Pseudo-inverse zero-forcing beamformer: the normalized first column of
/// `H (H^H H)^-1` with `H = [h0, d1, ..., dK]`.
///
/// The result is unit norm, orthogonal to every quantized direction `d_k`
/// and non-orthogonal to `h0`. Rank-deficient stacks (duplicate directions,
/// or more directions than fit) are reported as errors so the caller can
/// resample.
pub fn zf_beamformer(
    su_channel: &DVector<Complex64>,
    quantized_pu_dirs: &[DVector<Complex64>],
) -> Result<DVector<Complex64>> {
    let n = su_channel.len();
    let cols = quantized_pu_dirs.len() + 1;
    if cols > n {
        return Err(Error::Dimension(format!(
            "{} directions plus the served user exceed {n} antennas",
            quantized_pu_dirs.len()
        )));
    }
    for d in quantized_pu_dirs {
        if d.len() != n {
            return Err(Error::Dimension(format!(
                "direction of length {} does not match {n} antennas",
                d.len()
            )));
        }
    }

    let mut stacked = DMatrix::<Complex64>::zeros(n, cols);
    stacked.set_column(0, su_channel);
    for (j, d) in quantized_pu_dirs.iter().enumerate() {
        stacked.set_column(j + 1, d);
    }

    let gram = stacked.adjoint() * &stacked;
    let inv = gram.try_inverse().ok_or(Error::RankDeficient)?;
    // first column of H * G^-1  ==  H * (G^-1 e_1)
    let weights = inv.column(0).into_owned();
    let beam = &stacked * weights;
    let norm = beam.norm();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(Error::RankDeficient);
    }
    Ok(beam.unscale(norm))
}

/// Measure mean leakage power and quantization error under an integer bit
/// allocation, averaging over `trials` independent channel draws.
///
/// Per trial: fresh channels, one fresh codebook of `2^{b_k}` entries per
/// user (see [`CodebookMode`]), quantize, zero-force, and accumulate
/// `P0 * |sqrt(lambda_k) h_k^H v0|^2` per user. Accumulation runs in trial
/// order, so results are bit-identical for identical arguments.
pub fn measure_interference(
    params: &SystemParams,
    allocation: &BitAllocation,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloStats> {
    measure_interference_with_mode(
        params,
        allocation,
        trials,
        seed,
        CodebookMode::RedrawnPerTrial,
    )
}

/// [`measure_interference`] with an explicit codebook mode.
pub fn measure_interference_with_mode(
    params: &SystemParams,
    allocation: &BitAllocation,
    trials: usize,
    seed: u64,
    mode: CodebookMode,
) -> Result<MonteCarloStats> {
    check_dimensions(params)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if allocation.num_users() != params.num_users() {
        return Err(Error::Dimension(format!(
            "allocation has {} entries for {} users",
            allocation.num_users(),
            params.num_users()
        )));
    }
    let bits = allocation.integer_bits()?;
    for &b in &bits {
        if b > MAX_CODEBOOK_BITS as u64 {
            return Err(Error::TooLarge(format!(
                "per-user codebook of 2^{b} entries exceeds the 2^{MAX_CODEBOOK_BITS} guard"
            )));
        }
    }

    let k = params.num_users();
    let n = params.num_antennas();
    let p0 = params.tx_power();

    // fixed mode draws the codebooks once, from a dedicated stream
    let fixed_codebooks: Option<Vec<Codebook>> = match mode {
        CodebookMode::Fixed => {
            let mut rng = trial_rng(seed, u64::MAX);
            Some(
                bits.iter()
                    .map(|&b| build_rvq_codebook_with_rng(b as u32, n, &mut rng))
                    .collect::<Result<_>>()?,
            )
        }
        CodebookMode::RedrawnPerTrial => None,
    };

    let mut sum_i = vec![0.0f64; k];
    let mut sum_i_sq = vec![0.0f64; k];
    let mut sum_d = vec![0.0f64; k];
    let mut sum_d_sq = vec![0.0f64; k];

    const MAX_RANK_RETRIES: usize = 16;

    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let mut attempts = 0usize;
        let (channels, sin2, beam) = loop {
            let channels = generate_channels_with_rng(params, &mut rng);
            let mut sin2 = Vec::with_capacity(k);
            let mut dirs = Vec::with_capacity(k);
            for user in 0..k {
                let direction = channels.pu_direction(user);
                let q = match &fixed_codebooks {
                    Some(books) => quantize(&direction, &books[user]),
                    None => {
                        let book = build_rvq_codebook_with_rng(bits[user] as u32, n, &mut rng)?;
                        quantize(&direction, &book)
                    }
                };
                sin2.push(q.sin2_theta);
                dirs.push(q.quantized_dir);
            }
            match zf_beamformer(&channels.su_channel, &dirs) {
                Ok(beam) => break (channels, sin2, beam),
                Err(Error::RankDeficient) if attempts < MAX_RANK_RETRIES => {
                    attempts += 1; // keep drawing from the same trial stream
                }
                Err(e) => return Err(e),
            }
        };

        for user in 0..k {
            let leak = p0 * channels.pu_channels[user].dotc(&beam).norm_sqr();
            sum_i[user] += leak;
            sum_i_sq[user] += leak * leak;
            sum_d[user] += sin2[user];
            sum_d_sq[user] += sin2[user] * sin2[user];
        }
    }

    let t = trials as f64;
    let finish = |sum: &[f64], sum_sq: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let mean: Vec<f64> = sum.iter().map(|s| s / t).collect();
        let se = mean
            .iter()
            .zip(sum_sq)
            .map(|(&m, &sq)| {
                if trials < 2 {
                    0.0
                } else {
                    let var = ((sq / t) - m * m).max(0.0) * t / (t - 1.0);
                    (var / t).sqrt()
                }
            })
            .collect();
        (mean, se)
    };
    let (mean_interference, std_error) = finish(&sum_i, &sum_i_sq);
    let (mean_distortion, std_error_distortion) = finish(&sum_d, &sum_d_sq);

    Ok(MonteCarloStats {
        trials,
        mean_interference,
        mean_distortion,
        std_error,
        std_error_distortion,
        seed,
    })
}
