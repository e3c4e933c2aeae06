//! TOML pipeline configs and their conversion into library types.
//!
//! Free functions are declared by kind plus coefficients; there is no
//! expression parser. A declaration builds
//! `outer_scale * kind(inner_scale * s + inner_shift) + outer_shift`,
//! with every wrapper optional.

use std::path::PathBuf;

use amhd::freefn::FreeFunction;
use amhd::seeds::{
    abc_beltrami, field_aligned_flow, force_free_helical, theta_pinch, vacuum_planar_harmonic,
    HarmonicKind,
};
use amhd::transform::{AbPair, Sign};
use amhd::{EquilibriumState, TransformSpec};
use anyhow::{ensure, Context, Result};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: SeedConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default, rename = "transform")]
    pub transforms: Vec<TransformConfig>,
    #[serde(default, rename = "export")]
    pub exports: Vec<ExportConfig>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Domain and tolerances
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainConfig {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub samples: usize,
    pub fd_step: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            min: [0.0; 3],
            max: [1.0; 3],
            samples: 10_000,
            fd_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub analytic: f64,
    pub fd: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            analytic: 1e-7,
            fd: 1e-5,
        }
    }
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FreeFnKind {
    Constant,
    Identity,
    Poly,
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl FreeFnKind {
    fn label(self) -> &'static str {
        match self {
            FreeFnKind::Constant => "constant",
            FreeFnKind::Identity => "identity",
            FreeFnKind::Poly => "poly",
            FreeFnKind::Exp => "exp",
            FreeFnKind::Sin => "sin",
            FreeFnKind::Cos => "cos",
            FreeFnKind::Sinh => "sinh",
            FreeFnKind::Cosh => "cosh",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeFnConfig {
    pub kind: FreeFnKind,
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub inner_scale: Option<f64>,
    #[serde(default)]
    pub inner_shift: Option<f64>,
    #[serde(default)]
    pub outer_scale: Option<f64>,
    #[serde(default)]
    pub outer_shift: Option<f64>,
}

impl FreeFnConfig {
    pub fn build(&self) -> Result<FreeFunction<f64>> {
        let base = match self.kind {
            FreeFnKind::Constant => {
                ensure!(self.coeffs.is_none(), "`constant` takes `value`, not `coeffs`");
                FreeFunction::constant(self.value.context("`constant` needs `value`")?)
            }
            FreeFnKind::Poly => {
                ensure!(self.value.is_none(), "`poly` takes `coeffs`, not `value`");
                let coeffs = self.coeffs.as_deref().context("`poly` needs `coeffs`")?;
                ensure!(!coeffs.is_empty(), "`poly` needs at least one coefficient");
                FreeFunction::poly(coeffs)
            }
            kind => {
                ensure!(
                    self.value.is_none() && self.coeffs.is_none(),
                    "`{}` takes neither `value` nor `coeffs`",
                    kind.label()
                );
                match kind {
                    FreeFnKind::Identity => FreeFunction::identity(),
                    FreeFnKind::Exp => FreeFunction::exp(),
                    FreeFnKind::Sin => FreeFunction::sin(),
                    FreeFnKind::Cos => FreeFunction::cos(),
                    FreeFnKind::Sinh => FreeFunction::sinh(),
                    FreeFnKind::Cosh => FreeFunction::cosh(),
                    FreeFnKind::Constant | FreeFnKind::Poly => unreachable!(),
                }
            }
        };
        let mut f = base;
        if self.inner_scale.is_some() || self.inner_shift.is_some() {
            f = f.of_affine(self.inner_scale.unwrap_or(1.0), self.inner_shift.unwrap_or(0.0));
        }
        if let Some(k) = self.outer_scale {
            f = f.scaled(k);
        }
        if let Some(c) = self.outer_shift {
            f = f.shifted(c);
        }
        Ok(f)
    }
}

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicKindName {
    Power,
    ExpTrig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedConfig {
    AbcBeltrami {
        a: f64,
        b: f64,
        c: f64,
    },
    FieldAlignedFlow {
        b0: f64,
        alpha: f64,
        lambda: FreeFnConfig,
        rho0: f64,
        p0: f64,
    },
    ForceFreeHelical {
        b0: f64,
        alpha: f64,
    },
    ThetaPinch {
        bz_profile: FreeFnConfig,
        p0: f64,
    },
    VacuumPlanarHarmonic {
        kind: HarmonicKindName,
        #[serde(default)]
        n: Option<u32>,
        bz0: f64,
        #[serde(default)]
        p_label: Option<FreeFnConfig>,
    },
}

impl SeedConfig {
    pub fn label(&self) -> &'static str {
        match self {
            SeedConfig::AbcBeltrami { .. } => "abc_beltrami",
            SeedConfig::FieldAlignedFlow { .. } => "field_aligned_flow",
            SeedConfig::ForceFreeHelical { .. } => "force_free_helical",
            SeedConfig::ThetaPinch { .. } => "theta_pinch",
            SeedConfig::VacuumPlanarHarmonic { .. } => "vacuum_planar_harmonic",
        }
    }

    pub fn build(&self) -> Result<EquilibriumState<f64>> {
        let state = match self {
            SeedConfig::AbcBeltrami { a, b, c } => {
                EquilibriumState::StaticIsotropic(abc_beltrami(*a, *b, *c))
            }
            SeedConfig::FieldAlignedFlow {
                b0,
                alpha,
                lambda,
                rho0,
                p0,
            } => EquilibriumState::FlowingIsotropic(field_aligned_flow(
                *b0,
                *alpha,
                &lambda.build().context("seed `lambda`")?,
                *rho0,
                *p0,
            )?),
            SeedConfig::ForceFreeHelical { b0, alpha } => {
                EquilibriumState::StaticIsotropic(force_free_helical(*b0, *alpha))
            }
            SeedConfig::ThetaPinch { bz_profile, p0 } => EquilibriumState::StaticIsotropic(
                theta_pinch(&bz_profile.build().context("seed `bz_profile`")?, *p0),
            ),
            SeedConfig::VacuumPlanarHarmonic {
                kind,
                n,
                bz0,
                p_label,
            } => {
                let kind = match kind {
                    HarmonicKindName::Power => {
                        HarmonicKind::Power((*n).context("`power` kind needs `n`")?)
                    }
                    HarmonicKindName::ExpTrig => {
                        ensure!(n.is_none(), "`exp_trig` kind takes no `n`");
                        HarmonicKind::ExpTrig
                    }
                };
                let label = match p_label {
                    Some(cfg) => Some(cfg.build().context("seed `p_label`")?),
                    None => None,
                };
                EquilibriumState::Vacuum(vacuum_planar_harmonic(kind, *bz0, label.as_ref())?)
            }
        };
        Ok(state)
    }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SignName {
    #[default]
    Plus,
    Minus,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformConfig {
    Embed {
        rho: FreeFnConfig,
    },
    BacklundFlowing {
        f: FreeFnConfig,
        g: FreeFnConfig,
        c0: f64,
        #[serde(default)]
        c1: f64,
    },
    BacklundStatic {
        f: FreeFnConfig,
        c0: f64,
        #[serde(default)]
        c1: f64,
    },
    BacklundVacuum {
        f: FreeFnConfig,
        c0: f64,
        #[serde(default)]
        c1: f64,
    },
    MixingSymmetry {
        a: FreeFnConfig,
        b: FreeFnConfig,
        #[serde(default)]
        c: Option<f64>,
        #[serde(default)]
        m: Option<FreeFnConfig>,
        #[serde(default)]
        n: Option<FreeFnConfig>,
        #[serde(default)]
        sign: SignName,
    },
}

fn build_or_one(cfg: &Option<FreeFnConfig>, what: &str) -> Result<FreeFunction<f64>> {
    match cfg {
        Some(c) => c.build().with_context(|| format!("transform `{what}`")),
        None => Ok(FreeFunction::constant(1.0)),
    }
}

impl TransformConfig {
    pub fn build(&self) -> Result<TransformSpec<f64>> {
        let spec = match self {
            TransformConfig::Embed { rho } => TransformSpec::Embed {
                rho: rho.build().context("transform `rho`")?,
            },
            TransformConfig::BacklundFlowing { f, g, c0, c1 } => TransformSpec::BacklundFlowing {
                f: f.build().context("transform `f`")?,
                g: g.build().context("transform `g`")?,
                c0: *c0,
                c1: *c1,
            },
            TransformConfig::BacklundStatic { f, c0, c1 } => TransformSpec::BacklundStatic {
                f: f.build().context("transform `f`")?,
                c0: *c0,
                c1: *c1,
            },
            TransformConfig::BacklundVacuum { f, c0, c1 } => TransformSpec::BacklundVacuum {
                f: f.build().context("transform `f`")?,
                c0: *c0,
                c1: *c1,
            },
            TransformConfig::MixingSymmetry {
                a,
                b,
                c,
                m,
                n,
                sign,
            } => {
                let a = a.build().context("transform `a`")?;
                let b = b.build().context("transform `b`")?;
                let c = c.unwrap_or_else(|| {
                    let (a0, b0) = (a.eval(0.0), b.eval(0.0));
                    a0 * a0 - b0 * b0
                });
                TransformSpec::MixingSymmetry {
                    ab: AbPair::new(a, b, c),
                    m: build_or_one(m, "m")?,
                    n: build_or_one(n, "n")?,
                    sign: match sign {
                        SignName::Plus => Sign::Plus,
                        SignName::Minus => Sign::Minus,
                    },
                }
            }
        };
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Vtk,
    Table,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub shape: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportConfig {
    /// Field to sample: a state field name, `p_par`, or `all`.
    pub what: String,
    pub format: ExportFormat,
    /// Output file, joined onto the out directory.
    pub path: PathBuf,
    pub grid: GridConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_function_declaration_builds_shifted_sin() {
        let cfg: FreeFnConfig = toml::from_str("kind = \"sin\"\nouter_shift = 2.0").unwrap();
        let f = cfg.build().unwrap();
        assert_eq!(f.eval(0.0), 2.0);
        assert!((f.eval(1.0) - (2.0 + 1.0f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn constant_declaration_requires_value() {
        let cfg: FreeFnConfig = toml::from_str("kind = \"constant\"").unwrap();
        let err = cfg.build().unwrap_err();
        assert!(err.to_string().contains("needs `value`"));
    }

    #[test]
    fn mixing_defaults_fill_unit_rescalings_and_c() {
        let text = "kind = \"mixing_symmetry\"\n[a]\nkind = \"cosh\"\n[b]\nkind = \"sinh\"\n";
        let cfg: TransformConfig = toml::from_str(text).unwrap();
        match cfg.build().unwrap() {
            TransformSpec::MixingSymmetry { ab, m, n, sign } => {
                assert_eq!(ab.c, 1.0);
                assert_eq!(m.eval(0.7), 1.0);
                assert_eq!(n.eval(0.7), 1.0);
                assert_eq!(sign, Sign::Plus);
            }
            other => panic!("unexpected spec {}", other.name()),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "[seed]\nname = \"force_free_helical\"\nb0 = 1.0\nalpha = 1.0\nbogus = 3\n";
        assert!(toml::from_str::<PipelineConfig>(text).is_err());
    }

    #[test]
    fn full_pipeline_config_parses() {
        let text = r#"
            [seed]
            name = "theta_pinch"
            p0 = 1.0

            [seed.bz_profile]
            kind = "exp"
            inner_scale = -0.5

            [domain]
            samples = 500

            [[transform]]
            kind = "embed"

            [transform.rho]
            kind = "constant"
            value = 1.0

            [[export]]
            what = "all"
            format = "vtk"
            path = "state.vtk"

            [export.grid]
            shape = [4, 4, 4]
            origin = [0.0, 0.0, 0.0]
            spacing = [0.25, 0.25, 0.25]
        "#;
        let cfg: PipelineConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.seed.label(), "theta_pinch");
        assert_eq!(cfg.domain.samples, 500);
        assert_eq!(cfg.domain.fd_step, 1e-3);
        assert_eq!(cfg.transforms.len(), 1);
        assert_eq!(cfg.exports.len(), 1);
        assert_eq!(cfg.exports[0].format, ExportFormat::Vtk);
    }
}
