//! η × Jt sweeps and disorder ensembles of the end-to-end flux.
//!
//! Times are dimensionless `Jt` with bulk coupling `J = 1`. Peaks are found on
//! the grid, then every grid local maximum that could hide the true maximum
//! (within the grid's discretization margin) is polished by golden-section
//! search. Among peaks within [`TIE_TOLERANCE`] of the best, the smallest
//! `Jt` wins, then the smallest η.

use num_complex::Complex64;

use crate::error::{FluxError, Result};
use crate::par::map_range;

use super::{ChainPropagator, CouplingProfile, DisorderSpec};

pub const TIE_TOLERANCE: f64 = 1e-9;

/// `f(t) = Σ_j w_j e^{−iE_j t}` for one profile.
struct Endpoint {
    weights: Vec<f64>,
    energies: Vec<f64>,
    norm: f64,
}

impl Endpoint {
    fn new(profile: &CouplingProfile) -> Result<Self> {
        let prop = ChainPropagator::new(profile)?;
        let e = prop.eigen();
        let last = e.dim() - 1;
        Ok(Self {
            weights: (0..e.dim())
                .map(|j| e.component(0, j) * e.component(last, j))
                .collect(),
            energies: e.eigenvalues.clone(),
            norm: profile.norm_bound(),
        })
    }

    fn f(&self, t: f64) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.energies)
            .map(|(&w, &e)| Complex64::from_polar(w, -e * t))
            .sum()
    }

    /// Best peak of `|f|` over the grid, polished.
    fn peak(&self, times: &[f64], magnitudes: &[f64]) -> (f64, f64) {
        let n = times.len();
        let grid_max = magnitudes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if n < 3 {
            let k = magnitudes.iter().position(|&m| m == grid_max).unwrap_or(0);
            return (times[k], grid_max);
        }
        let h = times
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let margin = 2.0 * self.norm * self.norm * h * h + TIE_TOLERANCE;
        let mut best: Option<(f64, f64)> = None;
        for k in 0..n {
            let m = magnitudes[k];
            if m < grid_max - margin {
                continue;
            }
            let left = k == 0 || magnitudes[k - 1] <= m;
            let right = k + 1 == n || magnitudes[k + 1] <= m;
            if !(left && right) {
                continue;
            }
            let a = times[k.saturating_sub(1)];
            let b = times[(k + 1).min(n - 1)];
            let (t, v) = golden_max(|t| self.f(t).norm(), a.min(b), a.max(b));
            let (t, v) = if v >= m { (t, v) } else { (times[k], m) };
            best = match best {
                Some((bt, bv)) if bv > v + TIE_TOLERANCE => Some((bt, bv)),
                Some((bt, bv)) if (bv - v).abs() <= TIE_TOLERANCE && bt <= t => Some((bt, bv)),
                _ => Some((t, v)),
            };
        }
        best.expect("the grid maximum is a local maximum")
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(FluxError::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(FluxError::InvalidArgument(format!(
            "{name} grid has non-finite values"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepArgmax {
    pub eta: f64,
    pub jt: f64,
    /// `|f|`, equal to `|I^{XX}|` for odd `N`.
    pub magnitude: f64,
    /// Signed `I^{XX} = Re f`.
    pub signed_flux: f64,
    /// `|f|²`.
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSurface {
    pub n_qubits: usize,
    pub etas: Vec<f64>,
    pub times: Vec<f64>,
    /// Row-major `etas × times`, signed `I^{XX}`.
    pub signed_flux: Vec<f64>,
    /// Row-major `etas × times`, `|f|`.
    pub magnitude: Vec<f64>,
    /// Best polished peak for each η.
    pub per_eta: Vec<SweepArgmax>,
    pub argmax: SweepArgmax,
}

impl SweepSurface {
    pub fn at(&self, eta_index: usize, time_index: usize) -> (f64, f64) {
        let k = eta_index * self.times.len() + time_index;
        (self.signed_flux[k], self.magnitude[k])
    }
}

/// Flux surface of `uniform_eta(N, 1, η)` over the grids, with the polished
/// argmax of `|f|`.
pub fn eta_sweep(n_qubits: usize, etas: &[f64], times: &[f64]) -> Result<SweepSurface> {
    check_grid("eta", etas)?;
    check_grid("time", times)?;
    let rows: Vec<Result<(Vec<Complex64>, SweepArgmax)>> = map_range(etas.len(), |i| {
        let eta = etas[i];
        let ep = Endpoint::new(&CouplingProfile::uniform_eta(n_qubits, 1.0, eta)?)?;
        let fs: Vec<Complex64> = times.iter().map(|&t| ep.f(t)).collect();
        let mags: Vec<f64> = fs.iter().map(|f| f.norm()).collect();
        let (jt, _) = ep.peak(times, &mags);
        let f = ep.f(jt);
        Ok((
            fs,
            SweepArgmax {
                eta,
                jt,
                magnitude: f.norm(),
                signed_flux: f.re,
                fidelity: f.norm_sqr(),
            },
        ))
    });
    let mut signed_flux = Vec::with_capacity(etas.len() * times.len());
    let mut magnitude = Vec::with_capacity(etas.len() * times.len());
    let mut per_eta = Vec::with_capacity(etas.len());
    for row in rows {
        let (fs, best) = row?;
        signed_flux.extend(fs.iter().map(|f| f.re));
        magnitude.extend(fs.iter().map(|f| f.norm()));
        per_eta.push(best);
    }
    let argmax = select(&per_eta);
    Ok(SweepSurface {
        n_qubits,
        etas: etas.to_vec(),
        times: times.to_vec(),
        signed_flux,
        magnitude,
        per_eta,
        argmax,
    })
}

fn select(candidates: &[SweepArgmax]) -> SweepArgmax {
    let top = candidates
        .iter()
        .map(|c| c.magnitude)
        .fold(f64::NEG_INFINITY, f64::max);
    *candidates
        .iter()
        .filter(|c| c.magnitude >= top - TIE_TOLERANCE)
        .min_by(|a, b| a.jt.total_cmp(&b.jt).then(a.eta.total_cmp(&b.eta)))
        .expect("non-empty")
}

#[derive(Debug, Clone)]
pub struct DisorderEnsemble {
    pub n_qubits: usize,
    pub eta: f64,
    pub spec: DisorderSpec,
    pub times: Vec<f64>,
    /// Mean and standard deviation of `|f|` across trials at each time.
    pub mean_magnitude: Vec<f64>,
    pub std_magnitude: Vec<f64>,
    /// Mean signed `I^{XX}` at each time.
    pub mean_signed_flux: Vec<f64>,
    /// Polished argmax time and peak `|f|` of every trial.
    pub argmax_jt: Vec<f64>,
    pub max_flux: Vec<f64>,
    /// Trials in which some drawn coupling came out negative.
    pub negative_coupling_trials: Vec<usize>,
    /// The disorder-free peak.
    pub clean_argmax_jt: f64,
    pub clean_max_flux: f64,
}

impl DisorderEnsemble {
    pub fn trials(&self) -> usize {
        self.argmax_jt.len()
    }

    pub fn mean_max_flux(&self) -> f64 {
        self.max_flux.iter().sum::<f64>() / self.max_flux.len() as f64
    }

    pub fn median_argmax_jt(&self) -> f64 {
        median(&self.argmax_jt)
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Runs `spec.trials` disordered copies of `uniform_eta(N, 1, η)`. Trial `k`
/// draws its offsets from [`DisorderSpec::trial_rng`]`(k)`, so the result does
/// not depend on scheduling.
pub fn disorder_ensemble(
    n_qubits: usize,
    eta: f64,
    spec: &DisorderSpec,
    times: &[f64],
) -> Result<DisorderEnsemble> {
    spec.validate()?;
    check_grid("time", times)?;
    let clean = CouplingProfile::uniform_eta(n_qubits, 1.0, eta)?;
    let run = |profile: &CouplingProfile| -> Result<(Vec<Complex64>, f64, f64)> {
        let ep = Endpoint::new(profile)?;
        let fs: Vec<Complex64> = times.iter().map(|&t| ep.f(t)).collect();
        let mags: Vec<f64> = fs.iter().map(|f| f.norm()).collect();
        let (jt, peak) = ep.peak(times, &mags);
        Ok((fs, jt, peak))
    };
    let (_, clean_jt, clean_peak) = run(&clean)?;
    let trials: Vec<Result<(Vec<Complex64>, f64, f64, bool)>> = map_range(spec.trials, |k| {
        let profile = clean.with_disorder(spec.sigma_fraction, &mut spec.trial_rng(k))?;
        let (fs, jt, peak) = run(&profile)?;
        Ok((fs, jt, peak, profile.has_negative()))
    });

    let nt = times.len();
    let mut sum = vec![0.0; nt];
    let mut sum_sq = vec![0.0; nt];
    let mut sum_signed = vec![0.0; nt];
    let mut argmax_jt = Vec::with_capacity(spec.trials);
    let mut max_flux = Vec::with_capacity(spec.trials);
    let mut negative = Vec::new();
    for (k, trial) in trials.into_iter().enumerate() {
        let (fs, jt, peak, neg) = trial?;
        for (i, f) in fs.iter().enumerate() {
            let m = f.norm();
            sum[i] += m;
            sum_sq[i] += m * m;
            sum_signed[i] += f.re;
        }
        argmax_jt.push(jt);
        max_flux.push(peak);
        if neg {
            negative.push(k);
        }
    }
    let count = spec.trials as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
    let std = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| (sq / count - m * m).max(0.0).sqrt())
        .collect();
    Ok(DisorderEnsemble {
        n_qubits,
        eta,
        spec: *spec,
        times: times.to_vec(),
        mean_magnitude: mean,
        std_magnitude: std,
        mean_signed_flux: sum_signed.iter().map(|s| s / count).collect(),
        argmax_jt,
        max_flux,
        negative_coupling_trials: negative,
        clean_argmax_jt: clean_jt,
        clean_max_flux: clean_peak,
    })
}
