//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`. The `*_curve` helpers hold the
//! actual logic and are plain Rust so they can be tested natively.

use fluxion::dense::ChainCloner;
use fluxion::open::{open_flux_tomography, LindbladSpec};
use fluxion::transfer::eta_sweep;
use fluxion::{Pauli, RegisterState};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 20_000;

fn grid(t_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(format!("time range must be positive, got {t_max}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}, got {points}"));
    }
    Ok((0..points)
        .map(|k| t_max * k as f64 / (points - 1) as f64)
        .collect())
}

/// `|f|` on an η × Jt grid, row-major in η, followed by the argmax
/// `(η, Jt, |f|)` as the last three entries.
pub fn transfer_surface(
    n: usize,
    eta_min: f64,
    eta_max: f64,
    etas: usize,
    jt_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if !(0.0 < eta_min && eta_min <= eta_max && etas >= 1 && etas * points <= 40 * MAX_POINTS) {
        return Err(format!(
            "eta range must satisfy 0 < eta_min <= eta_max, got [{eta_min}, {eta_max}]"
        ));
    }
    let eta_grid: Vec<f64> = (0..etas)
        .map(|i| {
            if etas == 1 {
                eta_min
            } else {
                eta_min + (eta_max - eta_min) * i as f64 / (etas - 1) as f64
            }
        })
        .collect();
    let s = eta_sweep(n, &eta_grid, &grid(jt_max, points)?).map_err(|e| e.to_string())?;
    let mut out = s.magnitude;
    out.extend([s.argmax.eta, s.argmax.jt, s.argmax.magnitude]);
    Ok(out)
}

/// Diagonal fluxes `(I^XX, I^YY, I^ZZ)` of the outer clone of the
/// three-qubit Heisenberg cloner, interleaved per time step.
pub fn cloner_curve(anisotropy: f64, jt_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let cloner = ChainCloner::new(1.0, anisotropy).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * points);
    for t in grid(jt_max, points)? {
        out.extend(cloner.flux(t, 0).map_err(|e| e.to_string())?.diagonal());
    }
    Ok(out)
}

/// Single-qubit `(I^XX, I^ZZ)` under damping `Γ` and dephasing `γ`,
/// interleaved per step of `Γt` (or `t` when `Γ = 0`).
pub fn decay_curve(
    gamma: f64,
    gamma_deph: f64,
    t_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let spec = LindbladSpec::new(gamma, gamma_deph);
    spec.validate(1).map_err(|e| e.to_string())?;
    let scale = if gamma > 0.0 { gamma } else { 1.0 };
    let empty = RegisterState::empty();
    let mut out = Vec::with_capacity(2 * points);
    for t in grid(t_max, points)? {
        let m = open_flux_tomography(&spec, t / scale, 0, &empty, 0).map_err(|e| e.to_string())?;
        out.push(m.get(Pauli::X, Pauli::X));
        out.push(m.get(Pauli::Z, Pauli::Z));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn surface(
    n: usize,
    eta_min: f64,
    eta_max: f64,
    etas: usize,
    jt_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    transfer_surface(n, eta_min, eta_max, etas, jt_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cloner(anisotropy: f64, jt_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    cloner_curve(anisotropy, jt_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decay(gamma: f64, gamma_deph: f64, t_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    decay_curve(gamma, gamma_deph, t_max, points).map_err(|e| JsError::new(&e))
}
