//! Sweep and figure-data generation: grid resolution from flags plus an
//! optional key=value config file, deterministic Monte Carlo evaluation,
//! and CSV serialization with round-trip-exact floats.

use std::fs;
use std::path::{Path, PathBuf};

use ar1_bounds::rng::mix_seed;
use ar1_bounds::{
    estimate_deviation_probs, estimate_variance, exact_det_bound, stable_deviation_bound,
    stable_variance_bound, unstable_deviation_bound, unstable_variance_bound, Ar1Params,
    DeviationQuery, McConfig, Regime,
};

use crate::{Failure, SweepArgs};

const SWEEP_HEADER: &str =
    "a0,eps,N,runs,empirical_prob,ci_low,ci_high,std_err,bound_closed,bound_det_exact,regime\n";

const FIG2_HEADER: &str = "a0,N,runs,empirical_var,ci_low,ci_high,std_err,bound_var,regime\n";

/// The four coefficients used by the simulation figures.
const FIGURE_A0: [f64; 4] = [0.5, 0.98, 1.01, 1.1];

/// A fully resolved sweep: sorted, deduplicated grids and scalar settings.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub a0_list: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub n_list: Vec<u64>,
    pub runs: u64,
    pub base_seed: u64,
    pub sigma: f64,
    pub output_path: PathBuf,
}

impl SweepSpec {
    /// Merge flags over config-file values over defaults, then validate.
    pub fn resolve(args: SweepArgs) -> Result<SweepSpec, Failure> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let output_path = args.out.or(file.out).ok_or_else(|| {
            Failure::Domain("--out is required (flag or config key 'out')".into())
        })?;
        let mut spec = SweepSpec {
            a0_list: if args.a0.is_empty() { file.a0 } else { args.a0 },
            eps_list: if args.eps.is_empty() { file.eps } else { args.eps },
            n_list: if args.n.is_empty() { file.n } else { args.n },
            runs: args.runs.or(file.runs).unwrap_or(1000),
            base_seed: args.seed.or(file.seed).unwrap_or(0),
            sigma: args.sigma.or(file.sigma).unwrap_or(1.0),
            output_path,
        };
        spec.normalize_and_validate()?;
        Ok(spec)
    }

    fn normalize_and_validate(&mut self) -> Result<(), Failure> {
        if self.a0_list.is_empty() {
            return Err(Failure::Domain("--a0 is required (flag or config key 'a0')".into()));
        }
        if self.eps_list.is_empty() {
            return Err(Failure::Domain("--eps is required (flag or config key 'eps')".into()));
        }
        if self.n_list.is_empty() {
            return Err(Failure::Domain("--n is required (flag or config key 'n')".into()));
        }
        for &a0 in &self.a0_list {
            if !a0.is_finite() || a0.abs() == 1.0 {
                return Err(Failure::Domain(format!(
                    "each a0 must be finite with |a0| != 1, got {a0}"
                )));
            }
        }
        for &eps in &self.eps_list {
            if !eps.is_finite() || eps < 0.0 {
                return Err(Failure::Domain(format!("each eps must be >= 0, got {eps}")));
            }
        }
        for &n in &self.n_list {
            if n < 2 {
                return Err(Failure::Domain(format!("each N must be >= 2, got {n}")));
            }
        }
        if self.runs < 1 {
            return Err(Failure::Domain("runs must be >= 1".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Failure::Domain(format!("sigma must be > 0, got {}", self.sigma)));
        }
        self.a0_list.sort_unstable_by(f64::total_cmp);
        self.a0_list.dedup();
        self.eps_list.sort_unstable_by(f64::total_cmp);
        self.eps_list.dedup();
        self.n_list.sort_unstable();
        self.n_list.dedup();
        Ok(())
    }
}

/// Values read from a flat key=value sweep config.
#[derive(Debug, Default)]
struct ConfigFile {
    a0: Vec<f64>,
    eps: Vec<f64>,
    n: Vec<u64>,
    runs: Option<u64>,
    seed: Option<u64>,
    sigma: Option<f64>,
    out: Option<PathBuf>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<ConfigFile, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
        ConfigFile::parse(&text)
    }

    fn parse(text: &str) -> Result<ConfigFile, Failure> {
        let mut cfg = ConfigFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::Domain(format!("config line {} is not key=value: {line}", idx + 1))
            })?;
            let value = value.trim();
            match key.trim() {
                "a0" => cfg.a0 = parse_f64_list("a0", value)?,
                "eps" => cfg.eps = parse_f64_list("eps", value)?,
                "n" => cfg.n = parse_u64_list("n", value)?,
                "runs" => cfg.runs = Some(parse_scalar("runs", value)?),
                "seed" => cfg.seed = Some(parse_scalar("seed", value)?),
                "sigma" => cfg.sigma = Some(parse_scalar("sigma", value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => {
                    return Err(Failure::Domain(format!("unknown config key '{other}'")));
                }
            }
        }
        Ok(cfg)
    }
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>, Failure> {
    value.split(',').map(|item| parse_scalar(key, item.trim())).collect()
}

fn parse_u64_list(key: &str, value: &str) -> Result<Vec<u64>, Failure> {
    value.split(',').map(|item| parse_scalar(key, item.trim())).collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure> {
    value
        .parse()
        .map_err(|_| Failure::Domain(format!("config value '{value}' is invalid for key '{key}'")))
}

/// Shortest decimal that parses back to the same f64, switching to
/// exponent form outside [1e-4, 1e16) so tiny bounds stay one token.
pub fn fmt_f64(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e16) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn regime_of(a0: f64) -> Result<Regime, Failure> {
    if a0.abs() < 1.0 {
        Ok(Regime::StableStationary)
    } else if a0.abs() > 1.0 {
        Ok(Regime::UnstableZeroInit)
    } else {
        Err(Failure::Domain(format!("a0 must satisfy |a0| != 1, got {a0}")))
    }
}

/// Seed for one (a0, N) grid cell, so cells draw independent noise while
/// staying reproducible from the base seed alone.
fn cell_seed(base_seed: u64, a0: f64, n: u64) -> u64 {
    mix_seed(mix_seed(base_seed, a0.to_bits()), n)
}

/// CSV for a deviation-probability grid: one row per (a0, eps, N), with
/// runs shared across the eps column for each (a0, N) pair.
pub fn deviation_grid_csv(
    a0_list: &[f64],
    eps_list: &[f64],
    n_list: &[u64],
    runs: u64,
    base_seed: u64,
    sigma: f64,
) -> Result<String, Failure> {
    let mut out = String::from(SWEEP_HEADER);
    for &a0 in a0_list {
        let regime = regime_of(a0)?;
        let params = Ar1Params::new(a0, sigma, regime, 0)?;
        // estimates[n_idx][eps_idx], one config per (a0, N)
        let mut estimates = Vec::with_capacity(n_list.len());
        for &n in n_list {
            let cfg = McConfig::new(
                params,
                n as usize,
                runs,
                cell_seed(base_seed, a0, n),
                eps_list.to_vec(),
            )?;
            estimates.push(estimate_deviation_probs(&cfg)?);
        }
        for (eps_idx, &eps) in eps_list.iter().enumerate() {
            for (n_idx, &n) in n_list.iter().enumerate() {
                let est = estimates[n_idx][eps_idx];
                let query = DeviationQuery::new(a0, eps, n)?;
                let closed = match regime {
                    Regime::StableStationary => stable_deviation_bound(query)?.value,
                    Regime::UnstableZeroInit => unstable_deviation_bound(query)?.value,
                };
                // det(I) = 1 exactly, and the factorization path requires
                // a perturbation to factor
                let det = if eps == 0.0 { 1.0 } else { exact_det_bound(a0, sigma, eps, n)? };
                out.push_str(&format!(
                    "{},{},{n},{runs},{},{},{},{},{},{},{}\n",
                    fmt_f64(a0),
                    fmt_f64(eps),
                    fmt_f64(est.value),
                    fmt_f64(est.ci_low),
                    fmt_f64(est.ci_high),
                    fmt_f64(est.std_err),
                    fmt_f64(closed),
                    fmt_f64(det),
                    regime.label(),
                ));
            }
        }
    }
    Ok(out)
}

/// Write, removing any partial file if the write fails midway.
pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Err(e) = fs::write(path, contents) {
        let _ = fs::remove_file(path);
        return Err(Failure::Io(format!("cannot write {}: {e}", path.display())));
    }
    Ok(())
}

/// Settings shared by both figure reproductions.
pub struct ReproduceSpec {
    pub runs: u64,
    pub base_seed: u64,
    pub out_dir: PathBuf,
}

impl ReproduceSpec {
    fn prepare_dir(&self) -> Result<(), Failure> {
        fs::create_dir_all(&self.out_dir).map_err(|e| {
            Failure::Io(format!("cannot create directory {}: {e}", self.out_dir.display()))
        })
    }

    fn file(&self, prefix: &str, a0: f64) -> PathBuf {
        self.out_dir.join(format!("{prefix}_a0_{a0}.csv"))
    }
}

/// `count` points from `lo` to `hi`, uniform in log, endpoints exact.
fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    grid
}

fn log_spaced_ints(lo: f64, hi: f64, count: usize) -> Vec<u64> {
    let mut grid: Vec<u64> =
        log_spaced(lo, hi, count).into_iter().map(|x| x.round() as u64).collect();
    grid.dedup();
    grid
}

fn fig1_eps_grid() -> Vec<f64> {
    log_spaced(0.01, 5.0, 20)
}

fn fig1_n_grid() -> Vec<u64> {
    log_spaced_ints(2.0, 100.0, 13)
}

fn fig2_n_grid() -> Vec<u64> {
    log_spaced_ints(7.0, 1000.0, 25)
}

/// One deviation-surface CSV per figure coefficient.
pub fn reproduce_fig1(spec: &ReproduceSpec) -> Result<(), Failure> {
    spec.prepare_dir()?;
    let eps_grid = fig1_eps_grid();
    let n_grid = fig1_n_grid();
    for a0 in FIGURE_A0 {
        let csv = deviation_grid_csv(&[a0], &eps_grid, &n_grid, spec.runs, spec.base_seed, 1.0)?;
        write_file(&spec.file("fig1", a0), &csv)?;
    }
    Ok(())
}

/// One empirical-variance curve CSV per figure coefficient.
pub fn reproduce_fig2(spec: &ReproduceSpec) -> Result<(), Failure> {
    spec.prepare_dir()?;
    let n_grid = fig2_n_grid();
    for a0 in FIGURE_A0 {
        let regime = regime_of(a0)?;
        let params = Ar1Params::new(a0, 1.0, regime, 0)?;
        let mut csv = String::from(FIG2_HEADER);
        for &n in &n_grid {
            let cfg = McConfig::new(
                params,
                n as usize,
                spec.runs,
                cell_seed(spec.base_seed, a0, n),
                Vec::new(),
            )?;
            let est = estimate_variance(&cfg)?;
            let bound = match regime {
                Regime::StableStationary => stable_variance_bound(a0, n)?.value,
                Regime::UnstableZeroInit => unstable_variance_bound(a0, n)?.value,
            };
            csv.push_str(&format!(
                "{},{n},{},{},{},{},{},{},{}\n",
                fmt_f64(a0),
                spec.runs,
                fmt_f64(est.value),
                fmt_f64(est.ci_low),
                fmt_f64(est.ci_high),
                fmt_f64(est.std_err),
                fmt_f64(bound),
                regime.label(),
            ));
        }
        write_file(&spec.file("fig2", a0), &csv)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_format_shortest_and_switch_to_exponent_form() {
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(0.01), "0.01");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(2.5e-9), "2.5e-9");
        assert_eq!(fmt_f64(3.0e20), "3e20");
        // round-trip exactness on an awkward mantissa
        let x = 0.013894954943731374f64;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        let y = 4.82e-317f64;
        assert_eq!(fmt_f64(y).parse::<f64>().unwrap(), y);
    }

    #[test]
    fn figure_grids_are_pinned() {
        assert_eq!(fig1_n_grid(), vec![2, 3, 4, 5, 7, 10, 14, 20, 27, 38, 52, 72, 100]);
        assert_eq!(
            fig2_n_grid(),
            vec![
                7, 9, 11, 13, 16, 20, 24, 30, 37, 45, 55, 68, 84, 103, 127, 156, 191, 235, 289,
                356, 437, 538, 661, 813, 1000
            ]
        );
        let eps = fig1_eps_grid();
        assert_eq!(eps.len(), 20);
        assert_eq!(eps[0], 0.01);
        assert_eq!(eps[19], 5.0);
        assert!(eps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_parses_all_keys_and_rejects_unknown_ones() {
        let cfg = ConfigFile::parse(
            "# sweep definition\n\
             a0 = 0.5, 0.98\n\
             eps = 0.1,1\n\
             n = 2,10\n\
             runs = 50\n\
             seed = 7\n\
             sigma = 2.0\n\
             out = grid.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.a0, vec![0.5, 0.98]);
        assert_eq!(cfg.eps, vec![0.1, 1.0]);
        assert_eq!(cfg.n, vec![2, 10]);
        assert_eq!(cfg.runs, Some(50));
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.sigma, Some(2.0));
        assert_eq!(cfg.out, Some(PathBuf::from("grid.csv")));

        assert!(matches!(ConfigFile::parse("speed = 9\n"), Err(Failure::Domain(_))));
        assert!(matches!(ConfigFile::parse("a0: 0.5\n"), Err(Failure::Domain(_))));
        assert!(matches!(ConfigFile::parse("runs = fast\n"), Err(Failure::Domain(_))));
    }

    #[test]
    fn spec_normalization_sorts_dedups_and_validates() {
        let mut spec = SweepSpec {
            a0_list: vec![1.1, 0.5, 0.5],
            eps_list: vec![1.0, 0.1],
            n_list: vec![10, 2, 10],
            runs: 10,
            base_seed: 0,
            sigma: 1.0,
            output_path: PathBuf::from("x.csv"),
        };
        spec.normalize_and_validate().unwrap();
        assert_eq!(spec.a0_list, vec![0.5, 1.1]);
        assert_eq!(spec.eps_list, vec![0.1, 1.0]);
        assert_eq!(spec.n_list, vec![2, 10]);

        let bad = |f: &dyn Fn(&mut SweepSpec)| {
            let mut s = spec.clone();
            f(&mut s);
            s.normalize_and_validate().is_err()
        };
        assert!(bad(&|s| s.a0_list = vec![1.0]));
        assert!(bad(&|s| s.a0_list.clear()));
        assert!(bad(&|s| s.eps_list = vec![-0.1]));
        assert!(bad(&|s| s.n_list = vec![1]));
        assert!(bad(&|s| s.runs = 0));
        assert!(bad(&|s| s.sigma = 0.0));
    }

    #[test]
    fn small_grid_csv_has_expected_shape_and_bounds() {
        let csv = deviation_grid_csv(&[0.5, 1.1], &[0.0, 0.5], &[2, 5], 64, 9, 1.0).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER.trim_end());
        assert_eq!(lines.len(), 1 + 2 * 2 * 2);
        for row in &lines[1..] {
            let cols: Vec<&str> = row.split(',').collect();
            assert_eq!(cols.len(), 11);
            let eps: f64 = cols[1].parse().unwrap();
            let prob: f64 = cols[4].parse().unwrap();
            let closed: f64 = cols[8].parse().unwrap();
            let det: f64 = cols[9].parse().unwrap();
            assert!((0.0..=1.0).contains(&prob));
            assert!(closed > 0.0 && closed <= 1.0);
            assert!(det > 0.0 && det <= 1.0);
            if eps == 0.0 {
                assert_eq!(closed, 1.0);
                assert_eq!(det, 1.0);
            }
        }
        let stable_rows = lines[1..].iter().filter(|r| r.ends_with("stable")).count();
        assert_eq!(stable_rows, 8); // "unstable" also ends with "stable"
        assert_eq!(lines[1..].iter().filter(|r| r.ends_with(",unstable")).count(), 4);
    }
}
