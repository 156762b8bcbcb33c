//! The four run pipelines and their artifact emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use qbeat_core::beat::{drift_and_diffusion, frequency_test, simulate, BeatConfig};
use qbeat_core::io as core_io;
use qbeat_core::kinematics::{self, Constants};
use qbeat_core::realisation::Regime;
use qbeat_core::{
    assemble_state, born_probabilities, build_ep, build_system, classify_regime, find_all_roots,
    group_realisations, random_system, reconciled_roots, solve_full, solve_truncated,
    AssembledState, CoupledSystem, EffectivePotential, FullSpectrum, GroupingPolicy,
    RealisationSet, RootRecord, SizeBounds, TruncatedSpectrum,
};

use crate::report::Report;
use crate::RunFile;

pub struct SolveOptions {
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub policy_override: Option<GroupingPolicy>,
    pub export_matrices: bool,
}

/// Everything the solve pipeline produces, kept for chaining and tests.
pub struct Solved {
    pub file: RunFile,
    pub digest: String,
    pub config_echo: String,
    pub system: CoupledSystem,
    pub truncated: TruncatedSpectrum,
    pub ep: EffectivePotential,
    /// Surviving channel-0 roots (branch crossings).
    pub roots: Vec<RootRecord>,
    /// Full multiset including decoupled levels.
    pub reconciled: Vec<RootRecord>,
    pub full: FullSpectrum,
    pub states: Vec<AssembledState>,
    pub set: RealisationSet,
    pub alpha_born: Vec<f64>,
    pub regime_counting: Regime,
    pub regime_born: Regime,
    pub max_oracle_dev: f64,
    pub oracle_tol: f64,
}

impl Solved {
    pub fn oracle_pass(&self) -> bool {
        self.max_oracle_dev <= self.oracle_tol
    }
}

pub fn load_run_file(path: &Path) -> Result<(RunFile, String, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).context("config is not UTF-8")?;
    let file = RunFile::parse(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    Ok((file, text, bytes))
}

fn sha256_hex(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the model → spectral → reduction → realisation chain on a config.
pub fn solve_from_file(
    file: RunFile,
    digest: String,
    policy_override: Option<GroupingPolicy>,
) -> Result<Solved> {
    let system_config = file
        .system_config()
        .ok_or_else(|| anyhow::anyhow!("config has no system description (grid/channels/coupling)"))?;
    let system = build_system(&system_config).context("config schema error")?;
    let diagnostics = system.validate();
    if !diagnostics.is_clean() {
        bail!("system validation failed: {diagnostics}");
    }

    let params = file.solver.params();
    let truncated = solve_truncated(&system).context("truncated solve")?;
    let ep = build_ep(&system, &truncated, &params);
    let roots = find_all_roots(&ep, system.background(), &params).context("root search")?;
    let reconciled = reconciled_roots(&ep, &roots);

    let full = solve_full(&system);
    let eps0 = system.channels().energy(0);
    let mut max_oracle_dev = 0.0_f64;
    for (root, &oracle) in reconciled.iter().zip(full.eigenvalues()) {
        let dev = (root.eta + eps0 - oracle).abs() / oracle.abs().max(1.0);
        max_oracle_dev = max_oracle_dev.max(dev);
    }

    let states: Vec<AssembledState> = roots
        .iter()
        .map(|r| assemble_state(&system, &truncated, r, &params))
        .collect::<Result<_, _>>()
        .context("state assembly")?;

    let policy = file.realisation.policy(policy_override.as_ref())?;
    let mut set = group_realisations(&states, policy);
    let reference = file.realisation.born_reference()?;
    let (_, alpha_born) =
        born_probabilities(&states, &reference, &set).context("projection probabilities")?;
    set.attach_born(alpha_born.clone());

    let thresholds = file.realisation.thresholds();
    let regime_counting = classify_regime(&set.alpha_counting, &thresholds)?;
    let regime_born = classify_regime(&alpha_born, &thresholds)?;

    let config_echo = effective_config_echo(&file, &policy);
    let oracle_tol = file.solver.oracle_tol();
    Ok(Solved {
        file,
        digest,
        config_echo,
        system,
        truncated,
        ep,
        roots,
        reconciled,
        full,
        states,
        set,
        alpha_born,
        regime_counting,
        regime_born,
        max_oracle_dev,
        oracle_tol,
    })
}

fn effective_config_echo(file: &RunFile, policy: &GroupingPolicy) -> String {
    let mut lines = Vec::new();
    if let Some(label) = &file.label {
        lines.push(format!("label = {label:?}"));
    }
    let params = file.solver.params();
    lines.push(format!("solver.pole_guard_factor = {:e}", params.pole_guard_factor));
    lines.push(format!("solver.merge_gap_factor = {:e}", params.merge_gap_factor));
    lines.push(format!("solver.residue_drop_tol = {:e}", params.residue_drop_tol));
    lines.push(format!(
        "solver.root_residual_target = {:e}",
        params.root_residual_target
    ));
    lines.push(format!("solver.oracle_tol = {:e}", file.solver.oracle_tol()));
    match policy {
        GroupingPolicy::Elementary => lines.push("realisation.policy = \"elementary\"".into()),
        GroupingPolicy::Cluster { delta } => {
            lines.push("realisation.policy = \"cluster\"".into());
            lines.push(format!("realisation.cluster_delta = {delta}"));
        }
    }
    let reference = file
        .realisation
        .born_reference
        .clone()
        .unwrap_or_else(|| "uniform-vector".into());
    lines.push(format!("realisation.born_reference = {reference:?}"));
    let t = file.realisation.thresholds();
    lines.push(format!("realisation.soc_max_alpha = {}", t.soc_max_alpha));
    lines.push(format!(
        "realisation.uniform_entropy_min = {}",
        t.uniform_entropy_min
    ));
    lines.push(format!(
        "realisation.uniform_max_alpha_factor = {}",
        t.uniform_max_alpha_factor
    ));
    lines.join("\n")
}

fn write_solve_artifacts(out: &Path, solved: &Solved, export_matrices: bool) -> Result<()> {
    fs::create_dir_all(out)?;
    let eps0 = solved.system.channels().energy(0);

    let mut buf = Vec::new();
    core_io::write_roots(&mut buf, &solved.reconciled, eps0)?;
    fs::write(out.join("roots.csv"), &buf)?;

    buf.clear();
    core_io::write_full_spectrum(&mut buf, &solved.full)?;
    fs::write(out.join("spectrum_full.csv"), &buf)?;

    buf.clear();
    core_io::write_truncated_spectrum(&mut buf, &solved.truncated)?;
    fs::write(out.join("spectrum_truncated.csv"), &buf)?;

    buf.clear();
    core_io::write_states(&mut buf, &solved.states, solved.system.grid().points())?;
    fs::write(out.join("states.csv"), &buf)?;

    buf.clear();
    core_io::write_realisations(&mut buf, &solved.set)?;
    fs::write(out.join("realisations.csv"), &buf)?;

    // Expectation density under the counting probabilities.
    let rho = qbeat_core::expectation_density(
        &solved.set,
        &solved.states,
        &solved.set.alpha_counting,
    );
    buf.clear();
    {
        use std::io::Write;
        writeln!(&mut buf, "channel,xi,rho_ex")?;
        let n_xi = solved.system.n_points();
        for n in 0..solved.system.n_channels() {
            for (j, &xi) in solved.system.grid().points().iter().enumerate() {
                writeln!(
                    &mut buf,
                    "{},{},{}",
                    n,
                    core_io::fmt_f64(xi),
                    core_io::fmt_f64(rho[n * n_xi + j])
                )?;
            }
        }
    }
    fs::write(out.join("expectation.csv"), &buf)?;

    if export_matrices {
        let dir = out.join("matrices");
        fs::create_dir_all(&dir)?;
        buf.clear();
        core_io::write_matrix(&mut buf, solved.system.background())?;
        fs::write(dir.join("h_g.csv"), &buf)?;
        let nq = solved.system.n_channels();
        for n in 0..nq {
            for m in 0..nq {
                buf.clear();
                core_io::write_matrix(&mut buf, solved.system.coupling(n, m))?;
                fs::write(dir.join(format!("V_{n}_{m}.csv")), &buf)?;
            }
        }
    }
    Ok(())
}

fn solve_report(solved: &Solved, command: &str, wall: f64) -> String {
    let mut report = Report::new(command);
    report.kv("config-digest", format!("sha256:{}", solved.digest));
    if let Some(label) = &solved.file.label {
        report.kv("label", label.clone());
    }
    report.section("effective-config", &solved.config_echo);

    let mut body = String::new();
    body.push_str(&format!("channels: {}\n", solved.system.n_channels()));
    body.push_str(&format!("grid-points: {}\n", solved.system.n_points()));
    body.push_str(&format!("surviving-roots: {}\n", solved.roots.len()));
    body.push_str(&format!("total-levels: {}\n", solved.reconciled.len()));
    let max_residual = solved
        .roots
        .iter()
        .map(|r| r.residual)
        .fold(0.0_f64, f64::max);
    body.push_str(&format!(
        "max-root-residual: {}\n",
        core_io::fmt_f64(max_residual)
    ));
    if let (Some(first), Some(last)) = (solved.reconciled.first(), solved.reconciled.last()) {
        body.push_str(&format!("eta-min: {}\n", core_io::fmt_f64(first.eta)));
        body.push_str(&format!("eta-max: {}\n", core_io::fmt_f64(last.eta)));
    }
    report.section("roots", body.trim_end());

    let mut body = String::new();
    body.push_str(&format!(
        "max-relative-deviation: {}\n",
        core_io::fmt_f64(solved.max_oracle_dev)
    ));
    body.push_str(&format!("tolerance: {:e}\n", solved.oracle_tol));
    body.push_str(&format!(
        "status: {}\n",
        if solved.oracle_pass() { "pass" } else { "FAIL" }
    ));
    report.section("oracle", body.trim_end());

    let mut body = String::new();
    body.push_str(&format!("groups: {}\n", solved.set.num_groups()));
    body.push_str(&format!(
        "complexity: {}\n",
        core_io::fmt_f64(solved.set.complexity)
    ));
    body.push_str(&format!("regime-counting: {}\n", solved.regime_counting));
    body.push_str(&format!("regime-born: {}\n", solved.regime_born));
    let counting = solved
        .set
        .alpha_counting
        .iter()
        .map(|a| core_io::fmt_f64(*a))
        .collect::<Vec<_>>()
        .join(" ");
    body.push_str(&format!("alpha-counting: {counting}\n"));
    let born = solved
        .alpha_born
        .iter()
        .map(|a| core_io::fmt_f64(*a))
        .collect::<Vec<_>>()
        .join(" ");
    body.push_str(&format!("alpha-born: {born}\n"));
    report.section("realisations", body.trim_end());

    report.kv("wall-seconds", format!("{wall:.3}"));
    report.render()
}

pub struct SolveSummary {
    pub root_count: usize,
    pub total_levels: usize,
    pub max_oracle_dev: f64,
    pub oracle_pass: bool,
    pub complexity: f64,
    pub report_path: PathBuf,
}

pub fn run_solve(opts: &SolveOptions) -> Result<SolveSummary> {
    let start = Instant::now();
    let (file, _, bytes) = load_run_file(&opts.config_path)?;
    let export = opts.export_matrices || file.solver.export_matrices.unwrap_or(false);
    let solved = solve_from_file(file, sha256_hex(&bytes), opts.policy_override)?;
    write_solve_artifacts(&opts.out_dir, &solved, export)?;
    let report = solve_report(&solved, "solve", start.elapsed().as_secs_f64());
    let report_path = opts.out_dir.join("report.txt");
    fs::write(&report_path, report)?;
    Ok(SolveSummary {
        root_count: solved.roots.len(),
        total_levels: solved.reconciled.len(),
        max_oracle_dev: solved.max_oracle_dev,
        oracle_pass: solved.oracle_pass(),
        complexity: solved.set.complexity,
        report_path,
    })
}

pub struct VerifyOptions {
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    /// Test hook: perturb one pole of this trial's effective potential so
    /// the campaign must flag it.
    pub inject_fault: Option<usize>,
}

pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub nq: usize,
    pub nxi: usize,
    pub expected: usize,
    pub found: usize,
    pub max_rel_dev: f64,
    pub pass: bool,
}

pub struct VerifySummary {
    pub trials: Vec<TrialResult>,
    pub worst_dev: f64,
    pub tolerance: f64,
    pub report_path: PathBuf,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }

    pub fn failed_trials(&self) -> Vec<usize> {
        self.trials
            .iter()
            .filter(|t| !t.pass)
            .map(|t| t.trial)
            .collect()
    }
}

/// Randomized oracle campaign: every generated system must reduce exactly.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifySummary> {
    let start = Instant::now();
    let (file, digest) = match &opts.config_path {
        Some(path) => {
            let (file, _, bytes) = load_run_file(path)?;
            (Some(file), sha256_hex(&bytes))
        }
        None => (None, "none".to_string()),
    };
    let section = file.as_ref().map(|f| f.verify.clone()).unwrap_or_default();
    let solver = file.as_ref().map(|f| f.solver.clone()).unwrap_or_default();

    let trials = opts.trials.or(section.trials).unwrap_or(100);
    if trials < 1 {
        bail!("verify needs at least one trial");
    }
    let base_seed = opts.seed.or(section.seed).unwrap_or(0);
    let bounds = SizeBounds {
        nq: (section.nq_min.unwrap_or(2), section.nq_max.unwrap_or(6)),
        nxi: (section.nxi_min.unwrap_or(2), section.nxi_max.unwrap_or(12)),
    };
    let params = solver.params();
    let tolerance = solver.oracle_tol();

    let mut results = Vec::with_capacity(trials);
    let mut worst_dev = 0.0_f64;
    for trial in 0..trials {
        let seed = base_seed.wrapping_add(trial as u64);
        let instance = random_system(seed, &bounds);
        let system = &instance.system;
        let expected = system.full_dim();

        let truncated = solve_truncated(system)?;
        let mut ep = build_ep(system, &truncated, &params);
        if opts.inject_fault == Some(trial) {
            ep.perturb_pole_for_testing(0.05);
        }
        let outcome = find_all_roots(&ep, system.background(), &params)
            .map(|roots| reconciled_roots(&ep, &roots));

        let (found, max_rel_dev) = match outcome {
            Ok(all) => {
                let full = solve_full(system);
                let eps0 = system.channels().energy(0);
                let mut dev = 0.0_f64;
                if all.len() == full.len() {
                    for (root, &oracle) in all.iter().zip(full.eigenvalues()) {
                        dev = dev.max((root.eta + eps0 - oracle).abs() / oracle.abs().max(1.0));
                    }
                } else {
                    dev = f64::INFINITY;
                }
                (all.len(), dev)
            }
            Err(_) => (0, f64::INFINITY),
        };
        let pass = found == expected && max_rel_dev <= tolerance;
        worst_dev = worst_dev.max(if max_rel_dev.is_finite() { max_rel_dev } else { 0.0 });
        results.push(TrialResult {
            trial,
            seed,
            nq: instance.nq,
            nxi: instance.nxi,
            expected,
            found,
            max_rel_dev,
            pass,
        });
    }

    fs::create_dir_all(&opts.out_dir)?;
    let mut buf = Vec::new();
    {
        use std::io::Write;
        writeln!(&mut buf, "trial,seed,nq,nxi,expected,found,max_rel_dev,pass")?;
        for t in &results {
            writeln!(
                &mut buf,
                "{},{},{},{},{},{},{},{}",
                t.trial,
                t.seed,
                t.nq,
                t.nxi,
                t.expected,
                t.found,
                core_io::fmt_f64(t.max_rel_dev),
                t.pass
            )?;
        }
    }
    fs::write(opts.out_dir.join("trials.csv"), &buf)?;

    let mut report = Report::new("verify");
    report.kv("config-digest", format!("sha256:{digest}"));
    report.kv("trials", trials.to_string());
    report.kv("base-seed", base_seed.to_string());
    report.kv(
        "bounds",
        format!(
            "nq [{}, {}], nxi [{}, {}]",
            bounds.nq.0, bounds.nq.1, bounds.nxi.0, bounds.nxi.1
        ),
    );
    report.kv("tolerance", format!("{tolerance:e}"));
    report.kv("worst-relative-deviation", core_io::fmt_f64(worst_dev));
    let failed: Vec<String> = results
        .iter()
        .filter(|t| !t.pass)
        .map(|t| t.trial.to_string())
        .collect();
    if failed.is_empty() {
        report.kv("status", "pass".to_string());
    } else {
        report.kv("status", "FAIL".to_string());
        report.kv("failed-trials", failed.join(" "));
    }
    report.kv("wall-seconds", format!("{:.3}", start.elapsed().as_secs_f64()));
    let report_path = opts.out_dir.join("report.txt");
    fs::write(&report_path, report.render())?;

    Ok(VerifySummary {
        trials: results,
        worst_dev,
        tolerance,
        report_path,
    })
}

pub struct SimulateOptions {
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub policy_override: Option<GroupingPolicy>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

pub struct SimulateSummary {
    pub steps: usize,
    pub seed: u64,
    pub drift: f64,
    pub variance: f64,
    pub chi_square: f64,
    pub chi_square_pass: bool,
    pub report_path: PathBuf,
}

/// Solve, then feed the realisation probabilities and centres into the jump
/// process.
pub fn run_simulate(opts: &SimulateOptions) -> Result<SimulateSummary> {
    let start = Instant::now();
    let (file, _, bytes) = load_run_file(&opts.config_path)?;
    let export = file.solver.export_matrices.unwrap_or(false);
    let solved = solve_from_file(file, sha256_hex(&bytes), opts.policy_override)?;
    write_solve_artifacts(&opts.out_dir, &solved, export)?;

    let beat = &solved.file.beat;
    let alpha = match beat.alpha_source.as_deref() {
        None | Some("counting") => solved.set.alpha_counting.clone(),
        Some("born") => solved.alpha_born.clone(),
        Some(other) => bail!("unknown beat.alpha_source '{other}'"),
    };
    let centres = solved.set.centres();
    let steps = opts.steps.or(beat.steps).unwrap_or(100_000);
    let seed = opts.seed.or(beat.seed).unwrap_or(0);
    let mut config = BeatConfig::new(alpha, centres, steps, seed);
    if let Some(tau) = beat.tau {
        config.tau = tau;
    }
    if let Some(q) = beat.action_quantum {
        config.action_quantum = q;
    }
    if let Some(a0) = beat.initial_action {
        config.initial_action = a0;
    }

    let traj = simulate(&config).context("beat simulation")?;
    let stats = drift_and_diffusion(&traj);
    let freq = frequency_test(&traj, &config.alpha)?;

    let mut buf = Vec::new();
    core_io::write_trajectory(&mut buf, &traj)?;
    fs::write(opts.out_dir.join("trajectory.csv"), &buf)?;

    let mut report_text = solve_report(&solved, "simulate", start.elapsed().as_secs_f64());
    let mut beat_report = Report::new("beat");
    beat_report.kv("steps", steps.to_string());
    beat_report.kv("seed", seed.to_string());
    beat_report.kv("tau", core_io::fmt_f64(config.tau));
    beat_report.kv("action-quantum", core_io::fmt_f64(config.action_quantum));
    beat_report.kv("drift", core_io::fmt_f64(stats.drift));
    beat_report.kv(
        "theoretical-drift",
        core_io::fmt_f64(stats.theoretical_drift),
    );
    beat_report.kv("variance", core_io::fmt_f64(stats.variance));
    beat_report.kv("chi-square", core_io::fmt_f64(freq.statistic));
    beat_report.kv("chi-square-dof", freq.dof.to_string());
    beat_report.kv("chi-square-critical-99.9", core_io::fmt_f64(freq.critical_999));
    beat_report.kv(
        "chi-square-status",
        if freq.passed { "pass" } else { "FAIL" }.to_string(),
    );
    report_text.push('\n');
    report_text.push_str(&beat_report.render());
    let report_path = opts.out_dir.join("report.txt");
    fs::write(&report_path, report_text)?;

    Ok(SimulateSummary {
        steps,
        seed,
        drift: stats.drift,
        variance: stats.variance,
        chi_square: freq.statistic,
        chi_square_pass: freq.passed,
        report_path,
    })
}

pub struct KinematicsOptions {
    pub m0: f64,
    pub v: Option<f64>,
    pub beta: Option<f64>,
    pub sweep: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Derives and formats the kinematic table; with `sweep`, also writes the
/// β-sweep CSV.
pub fn run_kinematics(opts: &KinematicsOptions) -> Result<String> {
    let constants = Constants::default();
    let v = match (opts.v, opts.beta) {
        (Some(v), None) => v,
        (None, Some(beta)) => beta * constants.c,
        (None, None) => 0.0,
        (Some(_), Some(_)) => bail!("give either --v or --beta, not both"),
    };
    let state = kinematics::derive(opts.m0, v, &constants)?;
    let residuals = kinematics::identity_residuals(&state, &constants);

    let mut out = String::new();
    let mut row = |k: &str, v: String| out.push_str(&format!("{k:<22} {v}\n"));
    row("m0 [kg]", core_io::fmt_f64(state.m0));
    row("v [m/s]", core_io::fmt_f64(state.v));
    row("beta", core_io::fmt_f64(state.beta));
    row("gamma", core_io::fmt_f64(state.gamma));
    row("E0 [J]", core_io::fmt_f64(state.e0));
    row("E [J]", core_io::fmt_f64(state.e));
    row("m [kg]", core_io::fmt_f64(state.m));
    row("p [kg m/s]", core_io::fmt_f64(state.p));
    row("nu0 [Hz]", core_io::fmt_f64(state.nu0));
    row("nu [Hz]", core_io::fmt_f64(state.nu));
    row("N [Hz]", core_io::fmt_f64(state.n_freq));
    row("tau0 [s]", core_io::fmt_f64(state.tau0));
    row("T [s]", core_io::fmt_f64(state.t_period));
    row("tau [s]", core_io::fmt_f64(state.tau));
    row(
        "lambda_B [m]",
        state
            .lambda_b
            .map(core_io::fmt_f64)
            .unwrap_or_else(|| "absent (v = 0)".into()),
    );
    row(
        "lambda_B0 [m]",
        state
            .lambda_b0
            .map(core_io::fmt_f64)
            .unwrap_or_else(|| "absent (v = 0)".into()),
    );
    row("nu_B [Hz]", core_io::fmt_f64(state.nu_b));
    row("nu_B0 [Hz]", core_io::fmt_f64(state.nu_b0));
    let (rest, motion) = kinematics::energy_partition(&state);
    row("partition rest [J]", core_io::fmt_f64(rest));
    row("partition motion [J]", core_io::fmt_f64(motion));
    row("max identity residual", core_io::fmt_f64(residuals.max_abs()));

    if let Some(n) = opts.sweep {
        if n < 2 {
            bail!("--sweep needs at least 2 points");
        }
        let betas: Vec<f64> = (0..n)
            .map(|i| 0.01 + (0.999 - 0.01) * i as f64 / (n - 1) as f64)
            .collect();
        let states: Vec<_> = betas
            .iter()
            .map(|&b| kinematics::derive(opts.m0, b * constants.c, &constants))
            .collect::<Result<_, _>>()?;
        let dir = opts
            .out_dir
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("--sweep requires --out"))?;
        fs::create_dir_all(dir)?;
        let mut buf = Vec::new();
        core_io::write_kinematics_sweep(&mut buf, &states, &constants)?;
        fs::write(dir.join("kinematics_sweep.csv"), &buf)?;
        out.push_str(&format!(
            "sweep: {} points written to {}\n",
            n,
            dir.join("kinematics_sweep.csv").display()
        ));
    }
    Ok(out)
}

/// Prints an existing run report back out.
pub fn run_report(out_dir: &Path) -> Result<String> {
    let path = out_dir.join("report.txt");
    fs::read_to_string(&path)
        .with_context(|| format!("no report at {} (run solve/verify/simulate first)", path.display()))
}
