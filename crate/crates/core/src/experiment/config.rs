use std::fmt::Write as _;
use std::path::Path;

use crate::bitseq::Partition;
use crate::error::{Error, Result};
use crate::schedule::{optimal_fixed_alpha, Schedule, ScheduleKind};

/// Parameters of a worst-case redundancy study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Sequence length.
    pub n: usize,
    /// Competitor partition; must cover `(0, n]`.
    pub partition: Partition,
    /// Class floor: priors satisfy `eps <= p(0), p(1)`.
    pub eps: f64,
    /// Fractions used both for the prior `p(0) = q_0` and the per-segment
    /// fractions of 1-bits.
    pub q_grid: Vec<f64>,
    /// Random sequences drawn per fraction combination.
    pub repeats: usize,
    pub schedule: ScheduleKind,
    /// Rate override (`alpha` or `lambda`). `None` selects
    /// `exp(-pi / sqrt(6 (n - 1)))`.
    pub rate: Option<f64>,
    /// Count-smoothing `m`.
    pub m: u32,
    pub seed: u64,
}

/// Grid `0.05, 0.05 + step, ...` up to `0.95`, built from integer hundredths.
pub fn q_grid_with_step(step: f64) -> Result<Vec<f64>> {
    let hundredths = (step * 100.0).round();
    if !(hundredths >= 1.0 && (step * 100.0 - hundredths).abs() < 1e-9) {
        return Err(Error::InvalidConfig(format!(
            "q step {step} must be a positive multiple of 0.01"
        )));
    }
    let h = hundredths as u32;
    Ok((0..)
        .map(|i| 5 + i * h)
        .take_while(|&v| v <= 95)
        .map(|v| f64::from(v) / 100.0)
        .collect())
}

impl ExperimentConfig {
    /// `n = 1000`, partition `{(0,200], (200,700], (700,1000]}`, `eps = 0.05`,
    /// 19 fractions `0.05..=0.95` and 100 repeats.
    pub fn full(schedule: ScheduleKind) -> Self {
        Self {
            n: 1000,
            partition: Partition::new(vec![0, 200, 700, 1000]).expect("valid partition"),
            eps: 0.05,
            q_grid: q_grid_with_step(0.05).expect("valid step"),
            repeats: 100,
            schedule,
            rate: None,
            m: 1,
            seed: 0,
        }
    }

    /// The full setup shrunk to grid step 0.15 and 10 repeats.
    pub fn reduced(schedule: ScheduleKind) -> Self {
        Self {
            q_grid: q_grid_with_step(0.15).expect("valid step"),
            repeats: 10,
            ..Self::full(schedule)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if self.partition.n() != self.n {
            return bad(format!(
                "partition covers {} letters, n = {}",
                self.partition.n(),
                self.n
            ));
        }
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return bad(format!("eps = {} must lie in (0, 0.5]", self.eps));
        }
        if self.q_grid.is_empty() {
            return bad("empty q grid".into());
        }
        if let Some(q) = self.q_grid.iter().find(|&&q| !(q >= self.eps && q <= 1.0 - self.eps)) {
            return bad(format!("q = {q} outside [eps, 1 - eps]"));
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        self.schedule_instance().map(|_| ())
    }

    /// The smoothing schedule shared by every instance in the class.
    pub fn schedule_instance(&self) -> Result<Schedule<f64>> {
        let rate = match self.rate {
            Some(r) => r,
            None => optimal_fixed_alpha::<f64>(self.n.max(2))?.alpha,
        };
        match self.schedule {
            ScheduleKind::Fixed => Schedule::fixed(rate),
            ScheduleKind::Decaying => Ok(Schedule::decaying()),
            ScheduleKind::Count => Schedule::count(rate, self.m),
        }
    }

    /// Number of fraction combinations `|grid|^(s+1)`.
    pub fn combinations(&self) -> u64 {
        (self.q_grid.len() as u64).pow(self.partition.segment_count() as u32 + 1)
    }

    /// Total simulations `|grid|^(s+1) * repeats`.
    pub fn simulations(&self) -> u64 {
        self.combinations() * self.repeats as u64
    }

    /// Parses `key = value` lines; `#` starts a comment. Keys: `n`,
    /// `partition`, `eps`, `q_step`, `q_grid`, `repeats`, `schedule`, `rate`,
    /// `m`, `seed`. Unset keys keep the reduced defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::reduced(ScheduleKind::Fixed);
        let mut partition_set = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", lineno + 1)))?;
            partition_set |= key.trim() == "partition";
        }
        if !partition_set && cfg.partition.n() != cfg.n {
            return Err(Error::InvalidConfig(format!(
                "n = {} needs an explicit partition",
                cfg.n
            )));
        }
        Ok(cfg)
    }

    pub fn from_kv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_str(&text)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<V: std::str::FromStr>(key: &str, value: &str) -> Result<V> {
            value
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value for {key}: {value:?}")))
        }
        match key {
            "n" => self.n = num(key, value)?,
            "partition" => self.partition = Partition::parse(value)?,
            "eps" => self.eps = num(key, value)?,
            "q_step" => self.q_grid = q_grid_with_step(num(key, value)?)?,
            "q_grid" => {
                self.q_grid = value.split(',').map(|v| num(key, v.trim())).collect::<Result<_>>()?;
            }
            "repeats" => self.repeats = num(key, value)?,
            "schedule" => self.schedule = value.parse()?,
            "rate" | "alpha" | "lambda" => self.rate = Some(num(key, value)?),
            "m" => self.m = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Round-trippable `key = value` text.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let join = |v: &[String]| v.join(",");
        let _ = writeln!(s, "n = {}", self.n);
        let b: Vec<String> = self.partition.boundaries().iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "partition = {}", join(&b));
        let _ = writeln!(s, "eps = {}", self.eps);
        let q: Vec<String> = self.q_grid.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(s, "q_grid = {}", join(&q));
        let _ = writeln!(s, "repeats = {}", self.repeats);
        let _ = writeln!(s, "schedule = {}", self.schedule);
        if let Some(r) = self.rate {
            let _ = writeln!(s, "rate = {r}");
        }
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = q_grid_with_step(0.05).unwrap();
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[18], 0.95);
        assert_eq!(
            q_grid_with_step(0.15).unwrap(),
            vec![0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95]
        );
        assert!(q_grid_with_step(0.0).is_err());
        assert!(q_grid_with_step(0.123).is_err());
    }

    #[test]
    fn full_scale_counts() {
        let cfg = ExperimentConfig::full(ScheduleKind::Fixed);
        assert_eq!(cfg.simulations(), 13_032_100);
        cfg.validate().unwrap();
        let r = ExperimentConfig::reduced(ScheduleKind::Count);
        assert_eq!(r.simulations(), 7u64.pow(4) * 10);
        // count smoothing with m = 1 uses the fixed-rate optimum for lambda
        match r.schedule_instance().unwrap() {
            Schedule::Count { lambda, m } => {
                assert_eq!(m, 1);
                assert!((lambda - 0.9602).abs() < 5e-4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_failures() {
        let mut c = ExperimentConfig::reduced(ScheduleKind::Fixed);
        c.q_grid.push(0.99);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::reduced(ScheduleKind::Fixed);
        c.n = 900;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::reduced(ScheduleKind::Fixed);
        c.repeats = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn kv_roundtrip_and_errors() {
        let mut c = ExperimentConfig::reduced(ScheduleKind::Decaying);
        c.seed = 42;
        c.rate = Some(0.9);
        let back = ExperimentConfig::from_kv_str(&c.to_kv_string()).unwrap();
        assert_eq!(back, c);

        let parsed =
            ExperimentConfig::from_kv_str("# small\nn = 10\npartition = 0,4,10\nq_step = 0.45\nschedule = count\n")
                .unwrap();
        assert_eq!(parsed.n, 10);
        assert_eq!(parsed.q_grid, vec![0.05, 0.5, 0.95]);
        assert_eq!(parsed.schedule, ScheduleKind::Count);

        assert!(ExperimentConfig::from_kv_str("bogus = 1").is_err());
        assert!(ExperimentConfig::from_kv_str("n 10").is_err());
        assert!(ExperimentConfig::from_kv_str("n = 10").is_err());
    }
}
