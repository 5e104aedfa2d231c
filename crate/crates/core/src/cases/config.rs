//! Run configuration: TOML text, case-dependent defaults, validation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::CaseName;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: String,
    pub seed: u64,
    pub output_dir: String,
    pub network: NetworkConfig,
    pub training: TrainingConfig,
    pub physics: PhysicsConfig,
    pub grid: GridConfig,
}

/// Hidden layer widths; inputs and outputs follow from the case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub flow_hidden: Vec<usize>,
    pub species_hidden: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub flow_epochs: usize,
    pub species_epochs: usize,
    pub learning_rate: f64,
    /// Factor applied every `decay_every` of the epoch budget.
    pub decay: f64,
    pub decay_every: f64,
    pub weight_pde: f64,
    pub weight_bc: f64,
    /// Early stop tolerance; 0 disables early stopping.
    pub early_stop_tol: f64,
    pub early_stop_patience: usize,
    pub divergence_factor: f64,
    pub log_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub k1: f64,
    pub k2: f64,
    pub viscosity: f64,
    pub alpha_l: f64,
    pub alpha_t: f64,
    pub d_m: f64,
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Divide the anisotropic tensor by its largest eigenvalue (the
    /// source-free solution does not change).
    pub normalize_tensor: bool,
    pub hole_side: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Lattice points per side for flow networks.
    pub flow_n: usize,
    /// Lattice points per side for invariant and concentration networks.
    pub species_n: usize,
    /// Cells per side of the flow oracle.
    pub oracle_flow_n: usize,
    /// Nodes per side of the diffusion oracle.
    pub oracle_diffusion_n: usize,
}

impl RunConfig {
    /// Defaults for `case`.
    pub fn defaults(case: CaseName) -> Self {
        let mut cfg = RunConfig {
            case: case.name().to_string(),
            seed: 42,
            output_dir: format!("out/{}", case.name()),
            network: NetworkConfig {
                flow_hidden: vec![50; 4],
                species_hidden: vec![30; 3],
            },
            training: TrainingConfig {
                flow_epochs: 4000,
                species_epochs: 4000,
                learning_rate: 1e-3,
                decay: 0.5,
                decay_every: 0.2,
                weight_pde: 1.0,
                weight_bc: 10.0,
                early_stop_tol: 1e-6,
                early_stop_patience: 500,
                divergence_factor: 1e3,
                log_every: 0,
            },
            physics: PhysicsConfig {
                k1: 1.0,
                k2: 10.0,
                viscosity: 1.0,
                alpha_l: 1.0,
                alpha_t: 1e-5,
                d_m: 1e-6,
                theta: PI / 6.0,
                lambda1: 1e4,
                lambda2: 1.0,
                normalize_tensor: true,
                hole_side: 0.2,
                n_a: 1.0,
                n_b: 2.0,
                n_c: 1.0,
            },
            grid: GridConfig {
                flow_n: 50,
                species_n: 50,
                oracle_flow_n: 257,
                oracle_diffusion_n: 151,
            },
        };
        match case {
            CaseName::PatchVertical => cfg.training.flow_epochs = 3000,
            CaseName::PatchHorizontal => cfg.training.flow_epochs = 6000,
            CaseName::PatchInclined => {
                cfg.training.flow_epochs = 3000;
                cfg.training.learning_rate = 3e-3;
                cfg.grid.flow_n = 100;
            }
            CaseName::TransportHole => {
                cfg.grid.species_n = 150;
                cfg.training.species_epochs = 8000;
                cfg.training.learning_rate = 3e-3;
            }
            CaseName::ReactionExplicit => {
                cfg.training.species_epochs = 8000;
                cfg.training.learning_rate = 3e-3;
                cfg.training.weight_bc = 1000.0;
            }
            CaseName::Custom => {
                cfg.network.flow_hidden = vec![8; 2];
                cfg.training.flow_epochs = 200;
                cfg.grid.flow_n = 12;
                cfg.grid.oracle_flow_n = 17;
            }
            _ => {}
        }
        cfg
    }

    pub fn case_name(&self) -> Result<CaseName> {
        self.case.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, msg: &str| Err(Error::parse(key, msg));
        self.case_name()?;
        let t = &self.training;
        let p = &self.physics;
        let g = &self.grid;
        for (key, layers) in [
            ("network.flow_hidden", &self.network.flow_hidden),
            ("network.species_hidden", &self.network.species_hidden),
        ] {
            if layers.is_empty() || layers.contains(&0) {
                return fail(key, "needs at least one hidden layer, all widths >= 1");
            }
        }
        if t.flow_epochs == 0 {
            return fail("training.flow_epochs", "must be >= 1");
        }
        if t.species_epochs == 0 {
            return fail("training.species_epochs", "must be >= 1");
        }
        let positive = [
            ("training.learning_rate", t.learning_rate),
            ("training.decay", t.decay),
            ("training.decay_every", t.decay_every),
            ("physics.k1", p.k1),
            ("physics.k2", p.k2),
            ("physics.viscosity", p.viscosity),
            ("physics.lambda1", p.lambda1),
            ("physics.lambda2", p.lambda2),
            ("physics.n_a", p.n_a),
            ("physics.n_b", p.n_b),
            ("physics.n_c", p.n_c),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return fail(key, "must be positive and finite");
            }
        }
        let non_negative = [
            ("training.weight_pde", t.weight_pde),
            ("training.weight_bc", t.weight_bc),
            ("training.early_stop_tol", t.early_stop_tol),
            ("physics.alpha_l", p.alpha_l),
            ("physics.alpha_t", p.alpha_t),
            ("physics.d_m", p.d_m),
        ];
        for (key, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(key, "must be non-negative and finite");
            }
        }
        if t.decay > 1.0 {
            return fail("training.decay", "must lie in (0, 1]");
        }
        if t.decay_every > 1.0 {
            return fail("training.decay_every", "must lie in (0, 1]");
        }
        if !(t.divergence_factor > 1.0) {
            return fail("training.divergence_factor", "must be > 1");
        }
        if p.alpha_l < p.alpha_t {
            return fail("physics.alpha_l", "must be >= physics.alpha_t");
        }
        if !p.theta.is_finite() {
            return fail("physics.theta", "must be finite");
        }
        if !(p.hole_side > 0.0 && p.hole_side < 1.0) {
            return fail("physics.hole_side", "must lie in (0, 1)");
        }
        if g.flow_n < 3 {
            return fail("grid.flow_n", "must be >= 3");
        }
        if g.species_n < 3 {
            return fail("grid.species_n", "must be >= 3");
        }
        if g.oracle_flow_n < 17 {
            return fail("grid.oracle_flow_n", "must be >= 17");
        }
        if g.oracle_diffusion_n < 3 {
            return fail("grid.oracle_diffusion_n", "must be >= 3");
        }
        Ok(())
    }

    /// TOML text that [`parse_config`] maps back to `self`.
    pub fn render(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::parse("<root>", e.to_string()))
    }
}

/// Parses TOML text. Only `case` is required; every other key defaults per
/// case. Unknown keys and type mismatches are reported with their key path.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let user: Table = text.parse().map_err(|e: toml::de::Error| Error::parse("<root>", e.message()))?;
    let case = match user.get("case") {
        Some(Value::String(s)) if !s.trim().is_empty() => s.parse::<CaseName>()?,
        Some(Value::String(_)) => return Err(Error::parse("case", "must not be empty")),
        Some(_) => return Err(Error::parse("case", "must be a string")),
        None => return Err(Error::parse("case", "missing")),
    };
    let defaults = RunConfig::defaults(case);
    let mut merged = Table::try_from(&defaults).map_err(|e| Error::parse("<root>", e.to_string()))?;
    merge(&mut merged, user, "")?;
    let cfg: RunConfig = Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| Error::parse("<root>", e.message()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn merge(base: &mut Table, user: Table, prefix: &str) -> Result<()> {
    for (key, value) in user {
        let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        let Some(slot) = base.get_mut(&key) else {
            return Err(Error::parse(path, "unknown key"));
        };
        match (slot, value) {
            (Value::Table(b), Value::Table(u)) => merge(b, u, &path)?,
            (slot @ Value::Float(_), Value::Integer(i)) => *slot = Value::Float(i as f64),
            (Value::Array(b), Value::Array(u)) => {
                if let Some(bad) = u.iter().find(|v| !matches!(v, Value::Integer(i) if *i >= 0)) {
                    return Err(Error::parse(path, format!("expected non-negative integers, found {bad}")));
                }
                *b = u;
            }
            (slot, value) => {
                if std::mem::discriminant(slot) != std::mem::discriminant(&value) {
                    return Err(Error::parse(
                        path,
                        format!("expected {}, found {}", slot.type_str(), value.type_str()),
                    ));
                }
                *slot = value;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Parse { key, .. } => key,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn minimal_vertical_config() {
        let cfg = parse_config("case = \"patch_vertical\"").unwrap();
        assert_eq!((cfg.physics.k1, cfg.physics.k2), (1.0, 10.0));
        assert_eq!(cfg, RunConfig::defaults(CaseName::PatchVertical));
    }

    #[test]
    fn empty_or_unknown_case() {
        assert_eq!(key_of(parse_config("case = \"\"").unwrap_err()), "case");
        assert_eq!(key_of(parse_config("seed = 1").unwrap_err()), "case");
        assert_eq!(key_of(parse_config("case = \"nope\"").unwrap_err()), "case");
    }

    #[test]
    fn negative_transverse_dispersivity() {
        let err = parse_config("case = \"reaction_uniform\"\n[physics]\nalpha_t = -1.0").unwrap_err();
        assert_eq!(key_of(err), "physics.alpha_t");
    }

    #[test]
    fn unknown_keys_and_types_name_their_path() {
        let err = parse_config("case = \"patch_vertical\"\n[physics]\nk3 = 1.0").unwrap_err();
        assert_eq!(key_of(err), "physics.k3");
        let err = parse_config("case = \"patch_vertical\"\nfoo = 1").unwrap_err();
        assert_eq!(key_of(err), "foo");
        let err = parse_config("case = \"patch_vertical\"\n[training]\nflow_epochs = \"many\"").unwrap_err();
        assert_eq!(key_of(err), "training.flow_epochs");
        let err = parse_config("case = \"patch_vertical\"\n[network]\nflow_hidden = [10, -1]").unwrap_err();
        assert_eq!(key_of(err), "network.flow_hidden");
    }

    #[test]
    fn integers_are_accepted_for_reals() {
        let cfg = parse_config("case = \"patch_vertical\"\n[physics]\nk2 = 100").unwrap();
        assert_eq!(cfg.physics.k2, 100.0);
    }

    #[test]
    fn render_round_trips_for_every_case() {
        for case in CaseName::ALL {
            let mut cfg = RunConfig::defaults(case);
            cfg.physics.theta = 0.1 + 1.0 / 3.0;
            cfg.seed = u32::MAX as u64 + 7;
            let text = cfg.render().unwrap();
            assert_eq!(parse_config(&text).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn constraint_violations() {
        for (text, key) in [
            ("[physics]\nalpha_l = 1e-6\nalpha_t = 1e-3", "physics.alpha_l"),
            ("[physics]\nhole_side = 1.0", "physics.hole_side"),
            ("[grid]\nflow_n = 2", "grid.flow_n"),
            ("[training]\nflow_epochs = 0", "training.flow_epochs"),
            ("[network]\nspecies_hidden = []", "network.species_hidden"),
            ("[physics]\nk1 = 0.0", "physics.k1"),
        ] {
            let err = parse_config(&format!("case = \"transport_hole\"\n{text}")).unwrap_err();
            assert_eq!(key_of(err), key, "{text}");
        }
    }
}
