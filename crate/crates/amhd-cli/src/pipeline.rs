//! Pipeline orchestration: plan, execute, verify, report, export.
//!
//! A run builds every stage up front and type-checks the transform chain
//! before any field is evaluated, so a misconfigured pipeline fails without
//! writing partial outputs. Report files contain no paths or timestamps;
//! identical configs produce byte-identical reports and exports.

use std::fs;
use std::path::{Path, PathBuf};

use amhd::sample::SampleSet;
use amhd::seeds::catalog;
use amhd::transform::physicality_warnings;
use amhd::verify::verify_state;
use amhd::{DiffMode, EquilibriumState, StateKind, ToleranceSpec, TransformSpec, Vec3};
use anyhow::{ensure, Context, Result};

use crate::config::PipelineConfig;
use crate::export;

pub struct Overrides {
    pub fd_step: Option<f64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

pub fn list_seeds() {
    for info in catalog() {
        println!("{}", info.name);
        println!("  {}", info.summary);
        println!("  parameters:");
        for (name, doc) in info.params {
            println!("    {name}: {doc}");
        }
        println!("  feeds: {}", info.feeds.join(", "));
    }
}

pub fn run(config_path: &Path, overrides: &Overrides, verify: bool) -> Result<u8> {
    let text = fs::read_to_string(config_path)
        .with_context(|| format!("reading {}", config_path.display()))?;
    let cfg: PipelineConfig = toml::from_str(&text)
        .with_context(|| format!("parsing {}", config_path.display()))?;

    let fd_step = overrides.fd_step.unwrap_or(cfg.domain.fd_step);
    let sample_count = overrides.samples.unwrap_or(cfg.domain.samples);
    let gates = ToleranceSpec {
        analytic: cfg.tolerances.analytic,
        fd: overrides.tol.unwrap_or(cfg.tolerances.fd),
    };
    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    ensure!(fd_step > 0.0 && fd_step.is_finite(), "fd step must be positive");
    ensure!(sample_count > 0, "sample count must be positive");
    ensure!(
        gates.analytic > 0.0 && gates.fd > 0.0,
        "tolerances must be positive"
    );
    for axis in 0..3 {
        ensure!(
            cfg.domain.min[axis] < cfg.domain.max[axis],
            "domain must have positive extent along every axis"
        );
    }

    // Build every stage, then type-check the chain; nothing has evaluated a
    // field yet, so a mismatch aborts before any output exists.
    let seed_label = cfg.seed.label();
    let mut state = cfg.seed.build().context("building seed")?;
    let specs: Vec<TransformSpec<f64>> = cfg
        .transforms
        .iter()
        .enumerate()
        .map(|(i, t)| t.build().with_context(|| format!("transform {}", i + 1)))
        .collect::<Result<_>>()?;
    let mut kind = state.kind();
    for (i, spec) in specs.iter().enumerate() {
        ensure!(
            spec.required_input() == kind,
            "transform {} ({}) expects a {} state but receives {}",
            i + 1,
            spec.name(),
            spec.required_input(),
            kind
        );
        kind = StateKind::Anisotropic;
    }

    let samples = SampleSet::in_box(
        Vec3::new(cfg.domain.min[0], cfg.domain.min[1], cfg.domain.min[2]),
        Vec3::new(cfg.domain.max[0], cfg.domain.max[1], cfg.domain.max[2]),
        sample_count,
    );
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let mut all_pass = true;
    if verify {
        let step_name = format!("seed:{seed_label}");
        all_pass &= verify_stage(0, &step_name, &state, &samples, fd_step, &gates, &out_dir)?;
    }
    for (i, spec) in specs.iter().enumerate() {
        state = spec
            .apply(&state, &samples)
            .with_context(|| format!("transform {} ({})", i + 1, spec.name()))?;
        if verify {
            all_pass &=
                verify_stage(i + 1, spec.name(), &state, &samples, fd_step, &gates, &out_dir)?;
        }
    }

    for (i, entry) in cfg.exports.iter().enumerate() {
        let path = out_dir.join(&entry.path);
        export::write_export(&state, entry, &path)
            .with_context(|| format!("export {} ({})", i + 1, entry.path.display()))?;
        println!("export: wrote {}", path.display());
    }

    if !verify {
        return Ok(0);
    }
    if all_pass {
        println!("run: all stages pass");
        Ok(0)
    } else {
        println!("run: tolerance breach");
        Ok(1)
    }
}

/// Verifies one stage in both modes, writes its report file, and returns
/// whether every report met its gate.
fn verify_stage(
    index: usize,
    step_name: &str,
    state: &EquilibriumState<f64>,
    samples: &SampleSet<f64>,
    fd_step: f64,
    gates: &ToleranceSpec,
    out_dir: &Path,
) -> Result<bool> {
    let mut body = String::new();
    let mut pass = true;
    let mut worst = [0.0f64; 2];
    for (slot, mode) in [DiffMode::Analytic, DiffMode::Fd { step: fd_step }]
        .into_iter()
        .enumerate()
    {
        let reports = verify_state(state, samples, mode)
            .with_context(|| format!("verifying stage {index} ({step_name})"))?;
        for report in &reports {
            pass &= report.passes(gates.for_mode(mode));
            worst[slot] = worst[slot].max(report.max_linf());
            body.push_str(&report.to_string());
        }
        body.push('\n');
    }

    let mut warnings = Vec::new();
    if let EquilibriumState::Anisotropic(s) = state {
        warnings = physicality_warnings(s, samples);
    }

    let status = if pass { "pass" } else { "breach" };
    let mut text = format!(
        "stage={index} step={step_name} state={}\nsamples={} fd_step={:e} gate_analytic={:e} gate_fd={:e}\nstatus={status}\n",
        state.kind(),
        samples.count(),
        fd_step,
        gates.analytic,
        gates.fd,
    );
    for warning in &warnings {
        text.push_str(&format!("{warning}\n"));
    }
    text.push('\n');
    text.push_str(&body);

    let file_name = format!("stage_{index:02}_{}.txt", step_name.replace(':', "_"));
    fs::write(out_dir.join(&file_name), text)
        .with_context(|| format!("writing {file_name}"))?;

    println!(
        "stage {index} ({step_name}): {status} worst_analytic={:e} worst_fd={:e}",
        worst[0], worst[1]
    );
    for warning in &warnings {
        eprintln!("stage {index} ({step_name}): {warning}");
    }
    Ok(pass)
}
