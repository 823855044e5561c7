//! Trial CSV files.
//!
//! ```text
//! # n=2,visibility=1,seed=42
//! trial,a,b,x,y
//! 0,2,1,1,-1
//! ```
//!
//! The metadata line is mandatory; the visibility is written with 17
//! significant digits so the file reproduces the run parameters exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::simulate::{TrialDataset, TrialRecord};
use crate::error::{Error, Result};
use crate::fmt::sig17;

pub const HEADER: &str = "trial,a,b,x,y";

impl TrialDataset {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 + self.records.len() * 16);
        let _ = writeln!(
            out,
            "# n={},visibility={},seed={}",
            self.n,
            sig17(self.visibility),
            self.seed
        );
        out.push_str(HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{}", r.trial_index, r.a, r.b, r.x, r.y);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, meta) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
        let meta = meta
            .strip_prefix('#')
            .ok_or_else(|| Error::parse(1, "missing `# n=…,visibility=…,seed=…` metadata line"))?;
        let (mut n, mut visibility, mut seed) = (None, None, None);
        for field in meta.split(',') {
            let (key, value) = field
                .trim()
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("bad metadata field `{}`", field.trim())))?;
            let bad = || Error::parse(1, format!("bad value for {key}"));
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "visibility" => visibility = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
                "seed" => seed = Some(value.trim().parse::<u64>().map_err(|_| bad())?),
                other => return Err(Error::parse(1, format!("unknown metadata key `{other}`"))),
            }
        }
        let (Some(n), Some(visibility), Some(seed)) = (n, visibility, seed) else {
            return Err(Error::parse(1, "metadata needs n, visibility and seed"));
        };
        if n == 0 || !(0.0..=1.0).contains(&visibility) {
            return Err(Error::parse(1, "metadata out of range"));
        }
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(Error::parse(2, format!("expected header `{HEADER}`"))),
        }
        let mut records = Vec::new();
        for (ln, line) in lines {
            let line_no = ln + 1;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(Error::parse(line_no, "expected 5 fields"));
            }
            let int = |s: &str, what: &str| -> Result<i64> {
                s.parse().map_err(|_| Error::parse(line_no, format!("bad {what} `{s}`")))
            };
            let outcome = |s: &str, what: &str| -> Result<i8> {
                match int(s, what)? {
                    1 => Ok(1),
                    -1 => Ok(-1),
                    v => Err(Error::parse(line_no, format!("{what} is {v}; outcomes are ±1"))),
                }
            };
            let trial_index = f[0]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad trial index `{}`", f[0])))?;
            let (a, b) = (int(f[1], "a")?, int(f[2], "b")?);
            let n_i = n as i64;
            if a < 0 || a % 2 != 0 || a > 2 * n_i - 2 {
                return Err(Error::parse(line_no, format!("a={a} is not an Alice setting for N={n}")));
            }
            if b < 1 || b % 2 != 1 || b > 2 * n_i - 1 {
                return Err(Error::parse(line_no, format!("b={b} is not a Bob setting for N={n}")));
            }
            records.push(TrialRecord {
                trial_index,
                a,
                b,
                x: outcome(f[3], "x")?,
                y: outcome(f[4], "y")?,
            });
        }
        Ok(Self {
            n,
            visibility,
            seed,
            records,
        })
    }
}

pub fn write_dataset(dataset: &TrialDataset, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, dataset.to_csv())?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<TrialDataset> {
    TrialDataset::from_csv(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::simulate::simulate;

    #[test]
    fn round_trip_through_file() {
        let d = simulate(3, 0.1 + 0.2, 500, 99).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trials.csv");
        write_dataset(&d, &path).unwrap();
        assert_eq!(read_dataset(&path).unwrap(), d);
    }

    #[test]
    fn rejects_zero_outcome() {
        let text = "# n=2,visibility=1,seed=1\ntrial,a,b,x,y\n0,0,1,1,1\n1,2,3,0,1\n";
        let err = TrialDataset::from_csv(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn rejects_missing_metadata() {
        let err = TrialDataset::from_csv("trial,a,b,x,y\n0,0,1,1,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_foreign_settings() {
        let text = "# n=2,visibility=1,seed=1\ntrial,a,b,x,y\n0,4,1,1,1\n";
        assert!(matches!(TrialDataset::from_csv(text), Err(Error::Parse { line: 3, .. })));
    }
}
