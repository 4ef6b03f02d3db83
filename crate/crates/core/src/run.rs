//! Experiment driver behind the `fluxion` command.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::clifford::{self, CliffordCircuit, PreparationTarget};
use crate::config::{
    ChainParams, Diagnostic, HamiltonianKind, OpenParams, Parameters, PrepTarget, ProfileKind,
    ProfileParams, RunConfig,
};
use crate::dense::{self, SpectralPropagator, SpinHamiltonian};
use crate::error::{FluxError, Result};
use crate::flux::{FluxMatrix, TimeLabel};
use crate::open::{open_flux_tomography, LindbladSpec};
use crate::pauli::Pauli;
use crate::state::{BlochVector, RegisterState};
use crate::table::{write_output, Cell, ResultTable, RunOutput};
use crate::transfer::{self, ChainPropagator, CouplingProfile, DisorderSpec};

const JT_NOTE: &str = "time unit: Jt (J = bulk coupling, hbar = 1)";
const QUBIT_NOTE: &str = "qubits are 0-indexed; the input is qubit 0 unless stated";

#[derive(Debug)]
pub enum RunError {
    Config(Vec<Diagnostic>),
    Compute(FluxError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for configuration problems, 1 for anything that fails afterwards.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(d) => {
                writeln!(f, "invalid configuration:")?;
                for x in d {
                    writeln!(f, "  {x}")?;
                }
                Ok(())
            }
            RunError::Compute(e) => write!(f, "{e}"),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<FluxError> for RunError {
    fn from(e: FluxError) -> Self {
        RunError::Compute(e)
    }
}

/// Validates, computes and writes the experiment's files into `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> std::result::Result<Vec<PathBuf>, RunError> {
    let diagnostics = config.validate();
    if !diagnostics.is_empty() {
        return Err(RunError::Config(diagnostics));
    }
    let start = Instant::now();
    let output = execute(config)?;
    let wall = start.elapsed().as_secs_f64();
    write_output(&output, out_dir, wall).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })
}

/// Computes an experiment without touching the filesystem. The config is
/// assumed valid.
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let mut summary = toml::Table::new();
    let tables = match &config.parameters {
        Parameters::Table1(_) => vec![table1()],
        Parameters::UqcmCircuit(p) => uqcm_circuit(p.inputs, config.seed, &mut summary)?,
        Parameters::UqcmPrepOpt(p) => vec![prep_opt(p.target, &mut summary)?],
        Parameters::UqcmChain(p) => vec![uqcm_chain(p, &mut summary)?],
        Parameters::UniversalityScan(p) => {
            vec![universality(&p.lambdas, p.j, &p.jt.values(), &mut summary)?]
        }
        Parameters::TransferSingle(p) => vec![transfer_single(p, &mut summary)?],
        Parameters::TransferSweep(p) => {
            transfer_sweep(p.n, &p.eta.values(), &p.jt.values(), &mut summary)?
        }
        Parameters::TransferDisorder(p) => {
            let spec = DisorderSpec {
                sigma_fraction: p.sigma,
                trials: p.trials,
                seed: config.seed,
            };
            transfer_disorder(p.n, p.eta, &spec, &p.jt.values(), &mut summary)?
        }
        Parameters::PerfectTransfer(p) => vec![perfect_transfer(
            &p.n,
            p.lambda,
            &p.jt.values(),
            &mut summary,
        )?],
        Parameters::SeriesCheck(p) => vec![series_check(p, &mut summary)?],
        Parameters::OpenFlux(p) => vec![open_flux(p, &mut summary)?],
    };
    Ok(RunOutput {
        config: config.clone(),
        tables,
        summary,
    })
}

const FLUX_COLUMNS: [&str; 12] = [
    "I_XX", "I_XY", "I_XZ", "I_XI", "I_YX", "I_YY", "I_YZ", "I_YI", "I_ZX", "I_ZY", "I_ZZ", "I_ZI",
];

fn flux_cells(m: &FluxMatrix) -> Vec<Cell> {
    m.entries.iter().flatten().map(|&v| Cell::Num(v)).collect()
}

fn table1() -> ResultTable {
    let mut t = ResultTable::new("table1", &["operator", "t1", "t2", "t3", "t4"])
        .note("evolved operators after each gate of the copying stage CNOT(1,2) CNOT(1,3) CNOT(2,1) CNOT(3,1)")
        .note("qubits are 1-indexed in operator symbols");
    for row in clifford::table1() {
        let mut cells = vec![Cell::Text(row.label())];
        cells.extend(row.after_gate.iter().map(|o| Cell::Text(o.symbolic())));
        t.push(cells);
    }
    t
}

fn flux_table(name: &str, fluxes: &[&FluxMatrix], time_column: &str) -> ResultTable {
    let mut cols = vec![time_column, "target"];
    cols.extend(FLUX_COLUMNS);
    let mut t = ResultTable::new(name, &cols)
        .note(QUBIT_NOTE)
        .note("I_RC: target letter R, input letter C (I = identity column)");
    for m in fluxes {
        let mut row = vec![
            match m.time {
                TimeLabel::Gates(g) => Cell::Int(g as i64),
                TimeLabel::Time(x) => Cell::Num(x),
            },
            m.target_qubit.into(),
        ];
        row.extend(flux_cells(m));
        t.push(row);
    }
    t
}

fn random_bloch(rng: &mut ChaCha20Rng) -> BlochVector {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    BlochVector::from_angles(z.clamp(-1.0, 1.0).acos(), phi)
}

fn uqcm_circuit(inputs: usize, seed: u64, summary: &mut toml::Table) -> Result<Vec<ResultTable>> {
    let circuit = CliffordCircuit::uqcm_copying_stage();
    let register = RegisterState::uqcm_preparation();
    let a = clifford::circuit_flux(&circuit, &register, 0, 1)?;
    let b = clifford::circuit_flux(&circuit, &register, 0, 2)?;
    let fluxes = flux_table("uqcm-circuit", &[&a, &b], "gates");

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut fid = ResultTable::new(
        "uqcm-circuit_fidelity",
        &["input", "r_x", "r_y", "r_z", "fidelity_q1", "fidelity_q2"],
    );
    let mut worst: f64 = 0.0;
    for k in 0..inputs {
        let r = random_bloch(&mut rng);
        let (fa, fb) = (a.fidelity(&r), b.fidelity(&r));
        worst = worst
            .max((fa - 5.0 / 6.0).abs())
            .max((fb - 5.0 / 6.0).abs());
        fid.push(vec![
            k.into(),
            r.x.into(),
            r.y.into(),
            r.z.into(),
            fa.into(),
            fb.into(),
        ]);
    }
    summary.insert(
        "mean_diagonal_q1".into(),
        (a.diagonal().iter().sum::<f64>() / 3.0).into(),
    );
    summary.insert(
        "mean_diagonal_q2".into(),
        (b.diagonal().iter().sum::<f64>() / 3.0).into(),
    );
    summary.insert("max_cross".into(), a.max_cross().max(b.max_cross()).into());
    summary.insert(
        "max_offset".into(),
        a.max_offset().max(b.max_offset()).into(),
    );
    summary.insert("max_fidelity_deviation_from_5_6".into(), worst.into());
    Ok(vec![fluxes, fid])
}

fn prep_opt(target: PrepTarget, summary: &mut toml::Table) -> Result<ResultTable> {
    let target = match target {
        PrepTarget::Symmetric => PreparationTarget::SymmetricUniversal,
        PrepTarget::Biased => PreparationTarget::FullyBiased,
    };
    let opt = clifford::optimize_preparation(target)?;
    for (k, name) in ["alpha", "beta", "gamma", "delta"].iter().enumerate() {
        summary.insert((*name).into(), opt.amplitudes[k].into());
    }
    summary.insert("flux".into(), opt.flux.into());
    summary.insert("iterations".into(), (opt.iterations as i64).into());
    Ok(flux_table("uqcm-prep-opt", &[&opt.flux_clone_a, &opt.flux_clone_b], "gates")
        .note("register amplitudes (alpha, beta, gamma, delta) on |00>,|01>,|10>,|11> are in the sidecar summary"))
}

/// `|ψ+⟩` on register qubits `a`, `b`; ground elsewhere.
fn pair_register(n_register: usize, a: usize, b: usize) -> Result<RegisterState> {
    let dim = 1usize << n_register;
    let bit = |q: usize| 1usize << (n_register - 1 - q);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amps[bit(a)] = Complex64::new(h, 0.0);
    amps[bit(b)] = Complex64::new(h, 0.0);
    RegisterState::new(amps)
}

fn uqcm_chain(p: &ChainParams, summary: &mut toml::Table) -> Result<ResultTable> {
    let input = p.n / 2;
    let (left, right) = (input - 1, input + 1);
    let register = pair_register(p.n - 1, left, input)?;
    let prop = SpectralPropagator::new(&SpinHamiltonian::heisenberg_chain(p.n, p.j, p.lambda)?)?;
    let mut t = ResultTable::new(
        "uqcm-chain",
        &[
            "jt",
            "target",
            "I_XX",
            "I_YY",
            "I_ZZ",
            "max_cross",
            "max_offset",
            "isotropy_deviation",
        ],
    )
    .note(JT_NOTE)
    .note(format!(
        "input qubit {input}; |psi+> on qubits {left},{right}; other qubits |0>; 0-indexed"
    ));
    let mut best = (f64::NEG_INFINITY, 0.0);
    for jt in p.jt.values() {
        let time = jt / p.j;
        for target in [left, right] {
            let m = prop.flux(time, input, &register, target)?;
            let d = m.diagonal();
            if target == left && d.iter().sum::<f64>() / 3.0 > best.0 + 1e-14 {
                best = (d.iter().sum::<f64>() / 3.0, jt);
            }
            t.push(vec![
                jt.into(),
                target.into(),
                d[0].into(),
                d[1].into(),
                d[2].into(),
                m.max_cross().into(),
                m.max_offset().into(),
                m.isotropy_deviation().into(),
            ]);
        }
    }
    summary.insert("best_mean_flux".into(), best.0.into());
    summary.insert("best_jt".into(), best.1.into());
    if p.n == 3 {
        let ts = dense::optimal_cloning_time(p.j);
        let m = prop.flux(ts, input, &register, left)?;
        summary.insert("t_star_jt".into(), (ts * p.j).into());
        summary.insert(
            "mean_flux_at_t_star".into(),
            (m.diagonal().iter().sum::<f64>() / 3.0).into(),
        );
        summary.insert(
            "fidelity_plus_z_at_t_star".into(),
            m.fidelity(&BlochVector::PLUS_Z).into(),
        );
    }
    Ok(t)
}

fn universality(
    lambdas: &[f64],
    j: f64,
    jt: &[f64],
    summary: &mut toml::Table,
) -> Result<ResultTable> {
    let times: Vec<f64> = jt.iter().map(|x| x / j).collect();
    let points = dense::universality_scan(lambdas, j, &times)?;
    let mut t = ResultTable::new(
        "universality-scan",
        &[
            "lambda",
            "jt_opt",
            "mean_flux_at_opt",
            "deviation_at_opt",
            "max_deviation",
        ],
    )
    .note(JT_NOTE)
    .note("three-qubit Heisenberg cloner, |psi+> register, flux toward qubit 0");
    for p in &points {
        t.push(vec![
            p.anisotropy.into(),
            (p.t_opt * j).into(),
            p.mean_flux_at_opt.into(),
            p.deviation_at_opt.into(),
            p.max_deviation.into(),
        ]);
    }
    summary.insert("points".into(), (points.len() as i64).into());
    Ok(t)
}

fn build_profile(p: &ProfileParams) -> Result<CouplingProfile> {
    match p.profile {
        ProfileKind::Eta => CouplingProfile::uniform_eta(p.n, p.j, p.eta),
        ProfileKind::Perfect => CouplingProfile::perfect(p.n, p.lambda),
        ProfileKind::Custom => CouplingProfile::from_couplings(p.couplings.clone()),
    }
}

fn transfer_single(p: &ProfileParams, summary: &mut toml::Table) -> Result<ResultTable> {
    let profile = build_profile(p)?;
    let prop = ChainPropagator::new(&profile)?;
    let target = profile.n_qubits() - 1;
    let mut t = ResultTable::new(
        "transfer-single",
        &["jt", "re_f", "im_f", "abs_f", "I_XX", "I_YY", "I_XY", "I_YX", "I_ZZ", "I_ZI", "worst_case_fidelity"],
    )
    .note(JT_NOTE)
    .note(format!("flux of qubit {target} from input qubit 0, register |0...0>; times are in units of 1/J with J = 1"));
    let mut best = (f64::NEG_INFINITY, 0.0);
    for jt in p.jt.values() {
        let f = prop.end_to_end(jt);
        let m = transfer::flux_components(f, target, TimeLabel::Time(jt))?;
        if f.norm() > best.0 + transfer::TIE_TOLERANCE {
            best = (f.norm(), jt);
        }
        t.push(vec![
            jt.into(),
            f.re.into(),
            f.im.into(),
            f.norm().into(),
            m.get(Pauli::X, Pauli::X).into(),
            m.get(Pauli::Y, Pauli::Y).into(),
            m.get(Pauli::X, Pauli::Y).into(),
            m.get(Pauli::Y, Pauli::X).into(),
            m.get(Pauli::Z, Pauli::Z).into(),
            m.get(Pauli::Z, Pauli::I).into(),
            f.norm_sqr().into(),
        ]);
    }
    summary.insert("max_abs_f".into(), best.0.into());
    summary.insert("jt_at_max".into(), best.1.into());
    Ok(t)
}

fn argmax_summary(a: &transfer::SweepArgmax) -> toml::Table {
    let mut s = toml::Table::new();
    s.insert("eta".into(), a.eta.into());
    s.insert("jt".into(), a.jt.into());
    s.insert("abs_f".into(), a.magnitude.into());
    s.insert("signed_I_XX".into(), a.signed_flux.into());
    s.insert("worst_case_fidelity".into(), a.fidelity.into());
    s
}

fn transfer_sweep(
    n: usize,
    etas: &[f64],
    jt: &[f64],
    summary: &mut toml::Table,
) -> Result<Vec<ResultTable>> {
    let s = transfer::eta_sweep(n, etas, jt)?;
    let mut surface = ResultTable::new("transfer-sweep", &["eta", "jt", "I_XX", "abs_f"])
        .note(JT_NOTE)
        .note(format!("uniform chain of {n} qubits with end couplings eta*J; I_XX is signed (Re f), abs_f = |f|"));
    for (i, &eta) in s.etas.iter().enumerate() {
        for (k, &t) in s.times.iter().enumerate() {
            let (signed, mag) = s.at(i, k);
            surface.push(vec![eta.into(), t.into(), signed.into(), mag.into()]);
        }
    }
    let mut peaks = ResultTable::new(
        "transfer-sweep_peaks",
        &["eta", "jt_peak", "abs_f_peak", "I_XX_peak"],
    )
    .note(JT_NOTE)
    .note("per-eta maximum of |f|, refined between grid points");
    for a in &s.per_eta {
        peaks.push(vec![
            a.eta.into(),
            a.jt.into(),
            a.magnitude.into(),
            a.signed_flux.into(),
        ]);
    }
    summary.insert("argmax".into(), argmax_summary(&s.argmax).into());
    Ok(vec![surface, peaks])
}

fn transfer_disorder(
    n: usize,
    eta: f64,
    spec: &DisorderSpec,
    jt: &[f64],
    summary: &mut toml::Table,
) -> Result<Vec<ResultTable>> {
    let e = transfer::disorder_ensemble(n, eta, spec, jt)?;
    let mut mean = ResultTable::new(
        "transfer-disorder",
        &["jt", "mean_abs_f", "std_abs_f", "mean_I_XX"],
    )
    .note(JT_NOTE)
    .note(format!(
        "{} trials, J_i -> J_i + N(0, ({} J_i)^2), trial k uses ChaCha20(seed) stream k",
        spec.trials, spec.sigma_fraction
    ));
    for (k, &t) in e.times.iter().enumerate() {
        mean.push(vec![
            t.into(),
            e.mean_magnitude[k].into(),
            e.std_magnitude[k].into(),
            e.mean_signed_flux[k].into(),
        ]);
    }
    let mut trials = ResultTable::new(
        "transfer-disorder_trials",
        &["trial", "argmax_jt", "max_abs_f", "negative_coupling"],
    )
    .note(JT_NOTE);
    for k in 0..e.trials() {
        trials.push(vec![
            k.into(),
            e.argmax_jt[k].into(),
            e.max_flux[k].into(),
            (e.negative_coupling_trials.contains(&k) as usize).into(),
        ]);
    }
    summary.insert("trials".into(), (e.trials() as i64).into());
    summary.insert("mean_max_abs_f".into(), e.mean_max_flux().into());
    summary.insert("median_argmax_jt".into(), e.median_argmax_jt().into());
    summary.insert("clean_argmax_jt".into(), e.clean_argmax_jt.into());
    summary.insert("clean_max_abs_f".into(), e.clean_max_flux.into());
    summary.insert(
        "negative_coupling_trials".into(),
        (e.negative_coupling_trials.len() as i64).into(),
    );
    Ok(vec![mean, trials])
}

fn perfect_transfer(
    ns: &[usize],
    lambda: f64,
    jt: &[f64],
    summary: &mut toml::Table,
) -> Result<ResultTable> {
    let mut t = ResultTable::new("perfect-transfer", &["n", "jt", "re_f", "im_f", "abs_f"])
        .note(JT_NOTE)
        .note(format!(
            "couplings J_i = lambda*sqrt(i(N-i)) with lambda = {lambda}; jt is lambda*t"
        ));
    for &n in ns {
        let prop = ChainPropagator::new(&CouplingProfile::perfect(n, lambda)?)?;
        for &x in jt {
            let f = prop.end_to_end(x / lambda);
            t.push(vec![
                n.into(),
                x.into(),
                f.re.into(),
                f.im.into(),
                f.norm().into(),
            ]);
        }
        let mut s = toml::Table::new();
        s.insert(
            "abs_f_at_pi_over_lambda".into(),
            prop.end_to_end(std::f64::consts::PI / lambda).norm().into(),
        );
        s.insert(
            "abs_f_at_half_pi_over_lambda".into(),
            prop.end_to_end(std::f64::consts::FRAC_PI_2 / lambda)
                .norm()
                .into(),
        );
        summary.insert(format!("n{n}"), s.into());
    }
    Ok(t)
}

fn series_check(p: &ProfileParams, summary: &mut toml::Table) -> Result<ResultTable> {
    let profile = build_profile(p)?;
    let n = profile.n_qubits();
    let prop = ChainPropagator::new(&profile)?;
    let mut t = ResultTable::new(
        "series-check",
        &["jt", "site", "series", "propagator", "abs_diff", "order", "truncation_bound"],
    )
    .note(JT_NOTE)
    .note("coefficient of the evolved last-qubit operator on each site (Re - Im of the propagator entry)");
    let mut worst: f64 = 0.0;
    for jt in p.jt.values() {
        let order = p
            .order
            .unwrap_or_else(|| transfer::required_order(&profile, jt));
        let s = transfer::series_flux(&profile, jt, order)?;
        let col = prop.column(jt, n - 1);
        for (k, &c) in s.coefficients.iter().enumerate() {
            let site = n - 1 - k;
            let want = col[site].re - col[site].im;
            worst = worst.max((c - want).abs());
            t.push(vec![
                jt.into(),
                site.into(),
                c.into(),
                want.into(),
                (c - want).abs().into(),
                order.into(),
                s.truncation_bound.into(),
            ]);
        }
    }
    summary.insert("max_abs_diff".into(), worst.into());
    Ok(t)
}

fn open_flux(p: &OpenParams, summary: &mut toml::Table) -> Result<ResultTable> {
    let mut spec = LindbladSpec::new(p.gamma, p.gamma_deph).with_nbar(p.nbar);
    spec.hamiltonian = match p.hamiltonian {
        HamiltonianKind::None => None,
        HamiltonianKind::Xy => Some(SpinHamiltonian::xy_chain(&CouplingProfile::uniform_eta(
            p.n, p.j, 1.0,
        )?)?),
        HamiltonianKind::Heisenberg => Some(SpinHamiltonian::heisenberg_chain(p.n, p.j, p.lambda)?),
    };
    let (scale, unit) = if p.gamma > 0.0 {
        (p.gamma, "gamma_t")
    } else if p.hamiltonian != HamiltonianKind::None && p.j != 0.0 {
        (p.j.abs(), "jt")
    } else {
        (1.0, "t")
    };
    let register = RegisterState::ground(p.n - 1)?;
    let mut cols = vec![unit];
    cols.extend(FLUX_COLUMNS);
    let mut t = ResultTable::new("open-flux", &cols)
        .note(format!("time unit: {unit} (hbar = 1)"))
        .note(format!(
            "input qubit {}, target qubit {}, other qubits |0>; I_RC: target letter R, input letter C",
            p.input, p.target
        ));
    let mut last = None;
    for x in p.t.values() {
        let m = open_flux_tomography(&spec, x / scale, p.input, &register, p.target)?;
        let mut row = vec![Cell::Num(x)];
        row.extend(flux_cells(&m));
        t.push(row);
        last = Some(m);
    }
    if let Some(m) = last {
        summary.insert("final_I_XX".into(), m.get(Pauli::X, Pauli::X).into());
        summary.insert("final_I_ZZ".into(), m.get(Pauli::Z, Pauli::Z).into());
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    fn cfg(e: Experiment, params: &str) -> RunConfig {
        RunConfig::parse(&format!("[parameters]\n{params}"), Some(e)).unwrap()
    }

    #[test]
    fn table1_has_24_cells() {
        let out = execute(&cfg(Experiment::Table1, "")).unwrap();
        assert_eq!(out.tables[0].rows.len(), 6);
        assert_eq!(out.tables[0].columns.len(), 5);
    }

    #[test]
    fn pair_register_is_psi_plus() {
        assert_eq!(pair_register(2, 0, 1).unwrap(), RegisterState::psi_plus());
    }

    #[test]
    fn open_flux_single_qubit() {
        let out = execute(&cfg(
            Experiment::OpenFlux,
            "n = 1\ngamma = 1.0\ngamma_deph = 0.25\nhamiltonian = \"none\"\ntarget = 0\nt = [1.0]\n",
        ))
        .unwrap();
        let row = &out.tables[0].rows[0];
        let xx = out.tables[0].column("I_XX").unwrap();
        match row[xx] {
            Cell::Num(v) => assert!((v - (-1.0f64).exp()).abs() < 1e-7),
            ref c => panic!("{c:?}"),
        }
    }
}
