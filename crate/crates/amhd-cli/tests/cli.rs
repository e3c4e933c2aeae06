//! End-to-end tests of the `amhd` binary: exit codes, report files, exports,
//! and flag overrides, all driven through real process invocations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_amhd"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("pipeline.toml");
    fs::write(&path, text).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

const HELICAL_SEED: &str = "[seed]\nname = \"force_free_helical\"\nb0 = 1.0\nalpha = 1.0\n\n[domain]\nsamples = 2000\n";

// ---------------------------------------------------------------------------
// list-seeds
// ---------------------------------------------------------------------------

#[test]
fn list_seeds_is_alphabetical_and_annotated() {
    let output = bin().arg("list-seeds").output().unwrap();
    assert!(output.status.success());
    let text = stdout(&output);
    let abc = text.find("abc_beltrami").expect("abc listed");
    let pinch = text.find("theta_pinch").expect("pinch listed");
    let vacuum = text.find("vacuum_planar_harmonic").expect("vacuum listed");
    assert!(abc < pinch && pinch < vacuum, "catalog out of order");
    assert!(text.contains("constant f"), "abc note missing");
    assert!(text.contains("feeds: backlund_static, embed"));
}

// ---------------------------------------------------------------------------
// run: success, breach, and config errors
// ---------------------------------------------------------------------------

#[test]
fn run_vacuum_pipeline_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
            [seed]
            name = "vacuum_planar_harmonic"
            kind = "exp_trig"
            bz0 = 1.0

            [domain]
            samples = 2000

            [[transform]]
            kind = "backlund_vacuum"
            c0 = 1.0

            [transform.f]
            kind = "sin"
            outer_shift = 2.0
        "#,
    );
    let output = bin()
        .args(["run", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("run: all stages pass"));
    let seed_report =
        fs::read_to_string(dir.path().join("stage_00_seed_vacuum_planar_harmonic.txt")).unwrap();
    assert!(seed_report.contains("status=pass"));
    assert!(seed_report.contains("system=vacuum"));
    let map_report =
        fs::read_to_string(dir.path().join("stage_01_backlund_vacuum.txt")).unwrap();
    assert!(map_report.contains("state=anisotropic"));
}

#[test]
fn run_reports_tolerance_breach_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            "{HELICAL_SEED}\n[tolerances]\nfd = 1e-12\n\n[[export]]\nwhat = \"b\"\nformat = \"table\"\npath = \"b.dat\"\n\n[export.grid]\nshape = [2, 2, 2]\norigin = [0.0, 0.0, 0.0]\nspacing = [0.5, 0.5, 0.5]\n"
        ),
    );
    let output = bin()
        .args(["run", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("run: tolerance breach"));
    let report =
        fs::read_to_string(dir.path().join("stage_00_seed_force_free_helical.txt")).unwrap();
    assert!(report.contains("status=breach"));
    assert!(dir.path().join("b.dat").exists(), "breach still exports");
}

#[test]
fn tol_flag_overrides_only_the_fd_gate() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!("{HELICAL_SEED}\n[tolerances]\nfd = 1e-12\n"),
    );
    let output = bin()
        .args([
            "run",
            config.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--tol",
            "1e-5",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
}

#[test]
fn sample_and_step_flags_reach_the_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), HELICAL_SEED);
    let output = bin()
        .args([
            "run",
            config.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--samples",
            "500",
            "--fd-step",
            "1e-4",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let report =
        fs::read_to_string(dir.path().join("stage_00_seed_force_free_helical.txt")).unwrap();
    assert!(report.contains("samples=500"));
    assert!(report.contains("fd_step=1e-4"));
}

#[test]
fn chain_type_mismatch_exits_two_without_exports() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
            [seed]
            name = "vacuum_planar_harmonic"
            kind = "exp_trig"
            bz0 = 1.0

            [[transform]]
            kind = "backlund_static"
            c0 = 1.0

            [transform.f]
            kind = "constant"
            value = 2.0

            [[export]]
            what = "all"
            format = "table"
            path = "out.dat"

            [export.grid]
            shape = [2, 2, 2]
            origin = [0.0, 0.0, 0.0]
            spacing = [0.5, 0.5, 0.5]
        "#,
    );
    let output = bin()
        .args(["run", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(
        err.contains("expects a static_isotropic state") && err.contains("vacuum"),
        "unhelpful mismatch message: {err}"
    );
    assert!(!dir.path().join("out.dat").exists(), "partial export written");
}

#[test]
fn transform_precondition_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
            [seed]
            name = "field_aligned_flow"
            b0 = 1.0
            alpha = 1.0
            rho0 = 1.0
            p0 = 1.0

            [seed.lambda]
            kind = "identity"

            [domain]
            samples = 1000

            [[transform]]
            kind = "backlund_flowing"
            c0 = 1.0

            [transform.f]
            kind = "poly"
            coeffs = [-0.5, 1.0]

            [transform.g]
            kind = "constant"
            value = 1.0
        "#,
    );
    let output = bin()
        .args(["run", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("transform 1 (backlund_flowing)"));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[seed]\nname = \"no_such_seed\"\n");
    let output = bin().args(["run", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("error:"));
}

// ---------------------------------------------------------------------------
// export subcommand
// ---------------------------------------------------------------------------

#[test]
fn export_skips_verification_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            "{HELICAL_SEED}\n[tolerances]\nfd = 1e-30\n\n[[export]]\nwhat = \"b\"\nformat = \"table\"\npath = \"helix.dat\"\n\n[export.grid]\nshape = [1, 1, 2]\norigin = [0.25, 0.25, 0.0]\nspacing = [0.1, 0.1, 1.5707963267948966]\n"
        ),
    );
    let output = bin()
        .args(["export", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(!dir.path().join("stage_00_seed_force_free_helical.txt").exists());

    let table = fs::read_to_string(dir.path().join("helix.dat")).unwrap();
    let rows: Vec<Vec<f64>> = table
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    // B = (sin z, cos z, 0): the grid hits z = 0 and z = pi/2.
    assert_eq!(rows[0][3..6], [0.0, 1.0, 0.0]);
    assert!((rows[1][3] - 1.0).abs() <= 1e-15);
    assert!(rows[1][4].abs() <= 1e-15);
}

#[test]
fn identity_mixing_exports_bit_identical_grids() {
    let base = r#"
        [seed]
        name = "theta_pinch"
        p0 = 1.0

        [seed.bz_profile]
        kind = "exp"
        inner_scale = -0.5

        [domain]
        samples = 1000

        [[transform]]
        kind = "embed"

        [transform.rho]
        kind = "constant"
        value = 1.0
    "#;
    let noop = r#"
        [[transform]]
        kind = "mixing_symmetry"

        [transform.a]
        kind = "constant"
        value = 1.0

        [transform.b]
        kind = "constant"
        value = 0.0
    "#;
    let export = r#"
        [[export]]
        what = "all"
        format = "table"
        path = "state.dat"

        [export.grid]
        shape = [4, 4, 4]
        origin = [0.0, 0.0, 0.0]
        spacing = [0.25, 0.25, 0.25]
    "#;
    let mut grids = Vec::new();
    for config_text in [format!("{base}{export}"), format!("{base}{noop}{export}")] {
        let dir = tempfile::tempdir().unwrap();
        let config = write_config(dir.path(), &config_text);
        let output = bin()
            .args(["export", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
        grids.push(fs::read(dir.path().join("state.dat")).unwrap());
    }
    assert_eq!(grids[0], grids[1], "identity parameters changed the exported grid");
}

#[test]
fn non_finite_export_aborts_with_grid_index() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"
            [seed]
            name = "theta_pinch"
            p0 = 1.0

            [seed.bz_profile]
            kind = "exp"
            inner_scale = 400.0

            [[export]]
            what = "b"
            format = "table"
            path = "spike.dat"

            [export.grid]
            shape = [2, 2, 1]
            origin = [0.0, 0.0, 0.0]
            spacing = [1.0, 1.0, 1.0]
        "#,
    );
    let output = bin()
        .args(["export", config.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("non-finite sample for `b` at grid index 3"));
    assert!(!dir.path().join("spike.dat").exists());
}
