//! Run configuration: defaults, key-value config files, command-line flags.

use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mass_param: f64,
    pub epsilon: f64,
    pub bump_delta: f64,
    pub grid_n: usize,
    /// Outer solve radius beyond the cap: the domain is [0, tau2 + outer_rho].
    pub outer_rho: f64,
    pub sphere_n_theta: usize,
    pub sphere_n_phi: usize,
    /// Amplitude of the angular probe perturbation for the CMC solves.
    pub perturbation: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub quad_tol: f64,
    pub root_tol: f64,
    pub cmc_tol: f64,
    /// Sweep lists (pipeline uses the scalars above).
    pub masses: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mass_param: 1.0,
            epsilon: 0.1,
            bump_delta: 0.0,
            grid_n: 4096,
            outer_rho: 8.0,
            sphere_n_theta: 16,
            sphere_n_phi: 32,
            perturbation: 0.0,
            seed: 42,
            out_dir: PathBuf::from("out"),
            quad_tol: 1e-12,
            root_tol: 1e-12,
            cmc_tol: 1e-8,
            masses: vec![],
            epsilons: vec![],
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse {key} = {value:?}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|tok| parse_num::<f64>(key, tok))
        .collect()
}

impl RunConfig {
    /// Applies one `key = value` or `--key value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "mass_param" | "mass-param" => self.mass_param = parse_num(key, value)?,
            "epsilon" => self.epsilon = parse_num(key, value)?,
            "bump_delta" | "bump-delta" => self.bump_delta = parse_num(key, value)?,
            "grid_n" | "grid-n" => self.grid_n = parse_num(key, value)?,
            "outer_rho" | "outer-rho" => self.outer_rho = parse_num(key, value)?,
            "sphere_res" | "sphere-res" => {
                // "NxM" or a single N (with M = 2N).
                if let Some((a, b)) = value.split_once('x') {
                    self.sphere_n_theta = parse_num(key, a)?;
                    self.sphere_n_phi = parse_num(key, b)?;
                } else {
                    self.sphere_n_theta = parse_num(key, value)?;
                    self.sphere_n_phi = 2 * self.sphere_n_theta;
                }
            }
            "perturbation" => self.perturbation = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out_dir" | "out-dir" => self.out_dir = PathBuf::from(value.trim()),
            "quad_tol" | "quad-tol" => self.quad_tol = parse_num(key, value)?,
            "root_tol" | "root-tol" => self.root_tol = parse_num(key, value)?,
            "cmc_tol" | "cmc-tol" => self.cmc_tol = parse_num(key, value)?,
            "masses" => self.masses = parse_list(key, value)?,
            "epsilons" => self.epsilons = parse_list(key, value)?,
            _ => return Err(ConfigError(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Reads a key-value file: `key = value` lines, `#` comments.
    pub fn load_file(&mut self, path: &std::path::Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Structural validation; domain-dependent bounds (like the cutoff scale
    /// against tau2) are enforced by the numerical stages.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mass_param > 0.0) || !self.mass_param.is_finite() {
            return Err(ConfigError(format!(
                "mass_param must be positive, got {}",
                self.mass_param
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(ConfigError(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.bump_delta < 0.0 {
            return Err(ConfigError(format!(
                "bump_delta must be nonnegative, got {}",
                self.bump_delta
            )));
        }
        if self.grid_n < 512 {
            return Err(ConfigError(format!(
                "grid_n must be at least 512, got {}",
                self.grid_n
            )));
        }
        if !(self.outer_rho >= 4.0) {
            return Err(ConfigError(format!(
                "outer_rho must be at least 4, got {}",
                self.outer_rho
            )));
        }
        if self.sphere_n_theta < 4 || self.sphere_n_phi < 8 || self.sphere_n_phi % 2 != 0 {
            return Err(ConfigError(format!(
                "sphere resolution {}x{} is invalid",
                self.sphere_n_theta, self.sphere_n_phi
            )));
        }
        if self.perturbation < 0.0 {
            return Err(ConfigError("perturbation must be nonnegative".into()));
        }
        Ok(())
    }

    /// Canonical echo used in reports; re-runnable as a config file.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("mass_param = {}\n", self.mass_param));
        s.push_str(&format!("epsilon = {}\n", self.epsilon));
        s.push_str(&format!("bump_delta = {}\n", self.bump_delta));
        s.push_str(&format!("grid_n = {}\n", self.grid_n));
        s.push_str(&format!("outer_rho = {}\n", self.outer_rho));
        s.push_str(&format!(
            "sphere_res = {}x{}\n",
            self.sphere_n_theta, self.sphere_n_phi
        ));
        s.push_str(&format!("perturbation = {}\n", self.perturbation));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("out_dir = {}\n", self.out_dir.display()));
        s.push_str(&format!("quad_tol = {}\n", self.quad_tol));
        s.push_str(&format!("root_tol = {}\n", self.root_tol));
        s.push_str(&format!("cmc_tol = {}\n", self.cmc_tol));
        if !self.masses.is_empty() {
            let list: Vec<String> = self.masses.iter().map(|m| m.to_string()).collect();
            s.push_str(&format!("masses = {}\n", list.join(",")));
        }
        if !self.epsilons.is_empty() {
            let list: Vec<String> = self.epsilons.iter().map(|m| m.to_string()).collect();
            s.push_str(&format!("epsilons = {}\n", list.join(",")));
        }
        s
    }
}
